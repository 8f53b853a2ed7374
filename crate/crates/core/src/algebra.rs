//! Union, intersection, difference, symmetric difference and cloning of
//! fuzzy objects, each producing a freshly named class.
//!
//! All operations work on the class-level shape of their arguments. The
//! core of a group of parts is the set of properties equivalent across every
//! part plus the methods alpha-equivalent across every part, both matched by
//! name; what remains of each part is its projection.

use thiserror::Error;

use crate::expr::alpha_equivalent;
use crate::model::{
    eq_property, ClassPart, FuzzyClass, FuzzyObject, ModelError, Projection, Signature, Specification,
};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("object `{0}` is given more than once")]
    DuplicateId(String),
    #[error("the objects have no common properties or methods")]
    EmptyCore,
    #[error("the operation leaves nothing to build a class from")]
    EmptyResult,
    #[error("object `{0}` already exists")]
    IdCollision(String),
    #[error("copy index must be at least 1")]
    BadCopyIndex,
    #[error("object `{object}` is typed by `{expected}`, not `{found}`")]
    ClassMismatch {
        object: String,
        expected: String,
        found: String,
    },
    #[error("an operation needs at least one object")]
    NoOperands,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Lookup of names already in use, so generated names stay unique.
pub trait Namespace {
    fn has_class(&self, name: &str) -> bool;
    fn has_object(&self, id: &str) -> bool;
}

/// A namespace with nothing in it.
#[derive(Debug, Clone, Copy, Default)]
pub struct EmptyNamespace;

impl Namespace for EmptyNamespace {
    fn has_class(&self, _: &str) -> bool {
        false
    }

    fn has_object(&self, _: &str) -> bool {
        false
    }
}

/// `<op>(<input>,…)#<n>` with the smallest `n ≥ 1` not yet taken.
pub fn fresh_class_name(ns: &impl Namespace, op: &str, inputs: &[&str]) -> String {
    let stem = format!("{op}({})", inputs.join(","));
    (1u64..)
        .map(|n| format!("{stem}#{n}"))
        .find(|name| !ns.has_class(name))
        .expect("unbounded counter")
}

const SUBSCRIPTS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];

pub fn subscript(n: u32) -> String {
    n.to_string()
        .chars()
        .map(|d| SUBSCRIPTS[d.to_digit(10).expect("decimal digit") as usize])
        .collect()
}

/// Splits a trailing subscript number off an identifier: `A₁₂` → (`A`, 12).
pub fn split_subscript(id: &str) -> (&str, Option<u32>) {
    let base = id.trim_end_matches(|c| SUBSCRIPTS.contains(&c));
    let digits: String = id[base.len()..]
        .chars()
        .map(|c| char::from(b'0' + SUBSCRIPTS.iter().position(|&s| s == c).unwrap_or(0) as u8))
        .collect();
    (base, digits.parse().ok())
}

/// An object together with the homogeneous class that types it.
#[derive(Debug, Clone, Copy)]
pub struct Typed<'a, S: Scalar> {
    object: &'a FuzzyObject<S>,
    class: &'a FuzzyClass<S>,
    part: &'a ClassPart<S>,
}

impl<'a, S: Scalar> Typed<'a, S> {
    pub fn new(object: &'a FuzzyObject<S>, class: &'a FuzzyClass<S>) -> Result<Self, AlgebraError> {
        if object.class_name() != class.name() {
            return Err(AlgebraError::ClassMismatch {
                object: object.id().to_owned(),
                expected: object.class_name().to_owned(),
                found: class.name().to_owned(),
            });
        }
        Ok(Self {
            object,
            class,
            part: class.as_homogeneous()?,
        })
    }

    pub fn object(&self) -> &'a FuzzyObject<S> {
        self.object
    }

    pub fn class(&self) -> &'a FuzzyClass<S> {
        self.class
    }

    pub fn part(&self) -> &'a ClassPart<S> {
        self.part
    }
}

/// The core of a group of parts and each part's projection.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<S: Scalar> {
    pub core: ClassPart<S>,
    pub projections: Vec<Projection<S>>,
}

impl<S: Scalar> Decomposition<S> {
    pub fn projection(&self, label: &str) -> Option<&ClassPart<S>> {
        self.projections.iter().find(|p| p.label == label).map(|p| &p.part)
    }
}

/// Splits labelled parts into their common core and per-part projections.
///
/// Core members keep the first part's definitions and order; each
/// projection keeps its part's order. An empty input yields an empty core.
pub fn core_and_projections<S: Scalar>(parts: &[(&str, &ClassPart<S>)]) -> Decomposition<S> {
    let Some(((_, first), rest)) = parts.split_first() else {
        return Decomposition {
            core: ClassPart::default(),
            projections: Vec::new(),
        };
    };
    let core_props: Vec<_> = first
        .spec
        .iter()
        .filter(|p| {
            rest.iter()
                .all(|(_, q)| q.spec.get(p.name()).is_some_and(|q| eq_property(p, q)))
        })
        .cloned()
        .collect();
    let core_methods: Vec<_> = first
        .sig
        .iter()
        .filter(|m| {
            rest.iter()
                .all(|(_, q)| q.sig.get(m.name()).is_some_and(|n| alpha_equivalent(m, n)))
        })
        .cloned()
        .collect();
    let in_core_prop = |n: &str| core_props.iter().any(|p| p.name() == n);
    let in_core_method = |n: &str| core_methods.iter().any(|m| m.name() == n);
    let projections = parts
        .iter()
        .map(|(label, part)| {
            let spec = part.spec.iter().filter(|p| !in_core_prop(p.name())).cloned().collect();
            let sig = part.sig.iter().filter(|m| !in_core_method(m.name())).cloned().collect();
            Projection {
                label: (*label).to_owned(),
                part: ClassPart::new(
                    Specification::new(spec).expect("subset of a valid specification"),
                    Signature::new(sig).expect("subset of a valid signature"),
                ),
            }
        })
        .collect();
    Decomposition {
        core: ClassPart::new(
            Specification::new(core_props).expect("subset of a valid specification"),
            Signature::new(core_methods).expect("subset of a valid signature"),
        ),
        projections,
    }
}

fn decompose<S: Scalar>(objs: &[Typed<'_, S>]) -> Decomposition<S> {
    let parts: Vec<(&str, &ClassPart<S>)> = objs.iter().map(|t| (t.object.id(), t.part)).collect();
    core_and_projections(&parts)
}

fn class_names<'a, S: Scalar>(objs: &[Typed<'a, S>]) -> Vec<&'a str> {
    objs.iter().map(|t| t.class.name()).collect()
}

/// A set of objects typed by a generated class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectSet {
    pub members: Vec<String>,
    pub class_name: String,
}

/// Union of objects: the set of them, typed by a class made of their core
/// and projections. Collapses to a homogeneous class when every projection
/// is empty.
pub fn union<S: Scalar>(
    ns: &impl Namespace,
    objs: &[Typed<'_, S>],
) -> Result<(ObjectSet, FuzzyClass<S>), AlgebraError> {
    if objs.is_empty() {
        return Err(AlgebraError::NoOperands);
    }
    for (i, t) in objs.iter().enumerate() {
        if objs[..i].iter().any(|u| u.object.id() == t.object.id()) {
            return Err(AlgebraError::DuplicateId(t.object.id().to_owned()));
        }
    }
    let d = decompose(objs);
    let name = fresh_class_name(ns, "union", &class_names(objs));
    let class = if d.projections.iter().all(|p| p.part.is_empty()) {
        FuzzyClass::homogeneous(name, d.core)?
    } else {
        FuzzyClass::heterogeneous(name, d.core, d.projections)?
    };
    let set = ObjectSet {
        members: objs.iter().map(|t| t.object.id().to_owned()).collect(),
        class_name: class.name().to_owned(),
    };
    Ok((set, class))
}

/// The homogeneous class of everything the objects share.
pub fn intersection<S: Scalar>(
    ns: &impl Namespace,
    objs: &[Typed<'_, S>],
) -> Result<FuzzyClass<S>, AlgebraError> {
    if objs.is_empty() {
        return Err(AlgebraError::NoOperands);
    }
    let d = decompose(objs);
    if d.core.is_empty() {
        return Err(AlgebraError::EmptyCore);
    }
    Ok(FuzzyClass::homogeneous(
        fresh_class_name(ns, "intersect", &class_names(objs)),
        d.core,
    )?)
}

/// The homogeneous class of what `a` has and `b` lacks: `a`'s projection.
pub fn difference<S: Scalar>(
    ns: &impl Namespace,
    a: Typed<'_, S>,
    b: Typed<'_, S>,
) -> Result<FuzzyClass<S>, AlgebraError> {
    let pair = [a, b];
    let mut d = decompose(&pair);
    let part = d.projections.swap_remove(0).part;
    if part.is_empty() {
        return Err(AlgebraError::EmptyResult);
    }
    Ok(FuzzyClass::homogeneous(
        fresh_class_name(ns, "diff", &class_names(&pair)),
        part,
    )?)
}

/// A heterogeneous class with an empty core and both projections.
pub fn symmetric_difference<S: Scalar>(
    ns: &impl Namespace,
    a: Typed<'_, S>,
    b: Typed<'_, S>,
) -> Result<FuzzyClass<S>, AlgebraError> {
    let pair = [a, b];
    let d = decompose(&pair);
    if d.projections.iter().all(|p| p.part.is_empty()) {
        return Err(AlgebraError::EmptyResult);
    }
    Ok(FuzzyClass::heterogeneous(
        fresh_class_name(ns, "symdiff", &class_names(&pair)),
        ClassPart::default(),
        d.projections,
    )?)
}

/// A numbered copy: `A` with `n = 1` becomes `A₁` of the same class.
pub fn clone_object<S: Scalar>(
    ns: &impl Namespace,
    a: &FuzzyObject<S>,
    n: u32,
) -> Result<FuzzyObject<S>, AlgebraError> {
    if n == 0 {
        return Err(AlgebraError::BadCopyIndex);
    }
    let id = format!("{}{}", a.id(), subscript(n));
    if ns.has_object(&id) {
        return Err(AlgebraError::IdCollision(id));
    }
    Ok(a.renamed(id, a.class_name().to_owned(), a.spec().clone())?)
}
