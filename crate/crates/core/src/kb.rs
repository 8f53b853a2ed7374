//! The knowledge base: classes, objects, dependency rules and a log of the
//! operations that produced derived classes and objects.
//!
//! Operations take `&mut self`, so registrations are serialized by the
//! borrow checker; share a knowledge base across threads behind a lock.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::{self, AlgebraError, Namespace, ObjectSet, Typed};
use crate::expr::MethodDef;
use crate::model::{FuzzyClass, FuzzyObject, ModelError};
use crate::modifier::{self, DependencyRule, Mode, Modification, Modifier, ModifyError, Violation};
use crate::scalar::Scalar;

/// One entry of the derivation log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub operation: String,
    pub inputs: Vec<String>,
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KbError {
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("class `{0}` is already defined")]
    DuplicateClass(String),
    #[error("object `{0}` is already defined")]
    DuplicateObject(String),
    #[error("object `{object}` does not fit the shape of class `{class}`")]
    ShapeMismatch { object: String, class: String },
    #[error("rule `{rule}` names properties no class has together: {}", .missing.join(", "))]
    DanglingRule { rule: String, missing: Vec<String> },
    #[error("object `{object}` has no method `{method}`")]
    UnknownMethod { object: String, method: String },
    #[error("derivation output `{0}` is neither a class nor an object")]
    DanglingDerivation(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Modify(#[from] ModifyError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeBase<S: Scalar = f64> {
    classes: BTreeMap<String, FuzzyClass<S>>,
    objects: BTreeMap<String, FuzzyObject<S>>,
    rules: Vec<DependencyRule<S>>,
    derivations: Vec<Derivation>,
}

impl<S: Scalar> Default for KnowledgeBase<S> {
    fn default() -> Self {
        Self {
            classes: BTreeMap::new(),
            objects: BTreeMap::new(),
            rules: Vec::new(),
            derivations: Vec::new(),
        }
    }
}

impl<S: Scalar> Namespace for KnowledgeBase<S> {
    fn has_class(&self, name: &str) -> bool {
        self.classes.contains_key(name)
    }

    fn has_object(&self, id: &str) -> bool {
        self.objects.contains_key(id)
    }
}

impl<S: Scalar> KnowledgeBase<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn classes(&self) -> impl Iterator<Item = &FuzzyClass<S>> {
        self.classes.values()
    }

    pub fn objects(&self) -> impl Iterator<Item = &FuzzyObject<S>> {
        self.objects.values()
    }

    pub fn rules(&self) -> &[DependencyRule<S>] {
        &self.rules
    }

    pub fn derivations(&self) -> &[Derivation] {
        &self.derivations
    }

    pub fn class(&self, name: &str) -> Result<&FuzzyClass<S>, KbError> {
        self.classes.get(name).ok_or_else(|| KbError::UnknownClass(name.to_owned()))
    }

    pub fn object(&self, id: &str) -> Result<&FuzzyObject<S>, KbError> {
        self.objects.get(id).ok_or_else(|| KbError::UnknownObject(id.to_owned()))
    }

    /// An object paired with its (homogeneous) class.
    pub fn typed(&self, id: &str) -> Result<Typed<'_, S>, KbError> {
        let obj = self.object(id)?;
        Ok(Typed::new(obj, self.class(obj.class_name())?)?)
    }

    /// Finds `method` for object `id`: in its own class first, then in the
    /// classes of the objects it was cloned or modified from. The flag is
    /// true when the method came from an ancestor, i.e. it was dropped.
    pub fn find_method(&self, id: &str, method: &str) -> Result<(&MethodDef<S>, bool), KbError> {
        let mut current = self.object(id)?;
        let mut inherited = false;
        loop {
            let class = self.class(current.class_name())?;
            let found = class
                .object_shapes()
                .into_iter()
                .flat_map(|(_, methods)| methods)
                .find(|m| m.name() == method);
            if let Some(m) = found {
                return Ok((m, inherited));
            }
            let parent = self
                .derivations
                .iter()
                .rev()
                .find(|d| d.output == current.id() && matches!(d.operation.as_str(), "clone" | "modify"))
                .and_then(|d| d.inputs.first())
                .and_then(|p| self.objects.get(p));
            match parent {
                Some(p) => {
                    current = p;
                    inherited = true;
                }
                None => {
                    return Err(KbError::UnknownMethod {
                        object: id.to_owned(),
                        method: method.to_owned(),
                    })
                }
            }
        }
    }

    pub fn add_class(&mut self, class: FuzzyClass<S>) -> Result<(), KbError> {
        if self.classes.contains_key(class.name()) {
            return Err(KbError::DuplicateClass(class.name().to_owned()));
        }
        self.classes.insert(class.name().to_owned(), class);
        Ok(())
    }

    /// Adds an object whose class is already present and admits its shape.
    pub fn add_object(&mut self, obj: FuzzyObject<S>) -> Result<(), KbError> {
        if self.objects.contains_key(obj.id()) {
            return Err(KbError::DuplicateObject(obj.id().to_owned()));
        }
        let class = self.class(obj.class_name())?;
        if !class.admits(obj.spec()) {
            return Err(KbError::ShapeMismatch {
                object: obj.id().to_owned(),
                class: class.name().to_owned(),
            });
        }
        self.objects.insert(obj.id().to_owned(), obj);
        Ok(())
    }

    /// Adds a rule whose dependent and sources all appear in one class shape.
    pub fn add_rule(&mut self, rule: DependencyRule<S>) -> Result<(), KbError> {
        let names: Vec<&str> = std::iter::once(rule.dependent())
            .chain(rule.sources().iter().map(String::as_str))
            .collect();
        let resolves = self.classes.values().any(|c| {
            c.object_shapes()
                .iter()
                .any(|(props, _)| names.iter().all(|n| props.iter().any(|p| p.name() == *n)))
        });
        if !resolves {
            let missing = names
                .iter()
                .filter(|n| {
                    !self.classes.values().any(|c| {
                        c.object_shapes()
                            .iter()
                            .any(|(props, _)| props.iter().any(|p| p.name() == **n))
                    })
                })
                .map(|n| (*n).to_owned())
                .collect::<Vec<_>>();
            let missing = if missing.is_empty() {
                names.iter().map(|n| (*n).to_owned()).collect()
            } else {
                missing
            };
            return Err(KbError::DanglingRule {
                rule: rule.name().to_owned(),
                missing,
            });
        }
        self.rules.push(rule);
        Ok(())
    }

    /// Appends a log entry whose output names an existing class or object.
    pub fn add_derivation(&mut self, d: Derivation) -> Result<(), KbError> {
        if !self.has_class(&d.output) && !self.has_object(&d.output) {
            return Err(KbError::DanglingDerivation(d.output));
        }
        self.derivations.push(d);
        Ok(())
    }

    fn log(&mut self, operation: &str, inputs: &[&str], output: &str) {
        self.derivations.push(Derivation {
            operation: operation.to_owned(),
            inputs: inputs.iter().map(|s| (*s).to_owned()).collect(),
            output: output.to_owned(),
        });
    }

    /// Rule violations of every object, keyed by object id.
    pub fn violations(&self) -> Vec<(String, Violation)> {
        self.objects
            .values()
            .flat_map(|o| {
                modifier::check_consistency(o, &self.rules)
                    .into_iter()
                    .map(|v| (o.id().to_owned(), v))
            })
            .collect()
    }

    fn typed_all(&self, ids: &[&str]) -> Result<Vec<Typed<'_, S>>, KbError> {
        ids.iter().map(|id| self.typed(id)).collect()
    }

    /// Registers and returns the class of the union of `ids`.
    pub fn union(&mut self, ids: &[&str]) -> Result<(ObjectSet, &FuzzyClass<S>), KbError> {
        let (set, class) = algebra::union(self, &self.typed_all(ids)?)?;
        let name = class.name().to_owned();
        self.add_class(class)?;
        self.log("union", ids, &name);
        Ok((set, &self.classes[&name]))
    }

    pub fn intersect(&mut self, ids: &[&str]) -> Result<&FuzzyClass<S>, KbError> {
        let class = algebra::intersection(self, &self.typed_all(ids)?)?;
        Ok(self.register("intersect", ids, class))
    }

    pub fn diff(&mut self, a: &str, b: &str) -> Result<&FuzzyClass<S>, KbError> {
        let class = algebra::difference(self, self.typed(a)?, self.typed(b)?)?;
        Ok(self.register("diff", &[a, b], class))
    }

    pub fn symdiff(&mut self, a: &str, b: &str) -> Result<&FuzzyClass<S>, KbError> {
        let class = algebra::symmetric_difference(self, self.typed(a)?, self.typed(b)?)?;
        Ok(self.register("symdiff", &[a, b], class))
    }

    fn register(&mut self, op: &str, ids: &[&str], class: FuzzyClass<S>) -> &FuzzyClass<S> {
        let name = class.name().to_owned();
        self.classes.insert(name.clone(), class);
        self.log(op, ids, &name);
        &self.classes[&name]
    }

    /// Adds copy number `n` of `id` and returns it.
    pub fn clone_object(&mut self, id: &str, n: u32) -> Result<&FuzzyObject<S>, KbError> {
        let copy = algebra::clone_object(self, self.object(id)?, n)?;
        let new_id = copy.id().to_owned();
        self.objects.insert(new_id.clone(), copy);
        self.log("clone", &[id], &new_id);
        Ok(&self.objects[&new_id])
    }

    /// Applies a modifier to `id` under this knowledge base's rules and
    /// registers the successor (and its class, when one is generated).
    pub fn modify(&mut self, id: &str, m: &Modifier<S>, mode: Mode) -> Result<Modification<S>, KbError> {
        let result = modifier::apply_modifier(self, self.typed(id)?, m, &self.rules, mode)?;
        if result.generated {
            self.classes.insert(result.class.name().to_owned(), result.class.clone());
        }
        self.objects.insert(result.successor.id().to_owned(), result.successor.clone());
        self.log("modify", &[id], result.successor.id());
        Ok(result)
    }
}
