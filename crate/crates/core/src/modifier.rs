//! Modifiers: transformations of a fuzzy object into a successor object,
//! checked against dependency rules between properties.
//!
//! A dependency rule ties a verification degree to the components of other
//! properties (all sides equal, all angles equal, …). After a modifier runs,
//! strict mode rejects any broken rule; auto-reflect mode first recomputes
//! broken verification dependents from their sources. Methods whose guards
//! no longer hold are dropped from the successor's class, and a new class is
//! generated whenever the successor's shape differs from the original's.

use std::fmt;

use thiserror::Error;

use crate::algebra::{fresh_class_name, split_subscript, subscript, AlgebraError, Namespace, Typed};
use crate::expr::{evaluate, Binding, Bindings, Expr, ExprError, MethodDef, MethodKind, Param};
use crate::fuzzy::{concentration, dilution, Degree, FuzzyError, Type1FuzzySet, Type2FuzzySet};
use crate::model::{
    ClassPart, FuzzyClass, FuzzyObject, FuzzyTuple, ModelError, Property, PropertyValue, Quantity, Signature,
    Specification, ValueKind,
};
use crate::notation::format_scalar;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModifierKind {
    /// Changes every property.
    Complete,
    /// Changes a strict subset of the properties.
    Partial,
    /// Adds new properties.
    Generating,
    /// Removes properties.
    Destroying,
    /// Swaps values for values of another kind.
    Replacing,
}

impl ModifierKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModifierKind::Complete => "complete",
            ModifierKind::Partial => "partial",
            ModifierKind::Generating => "generating",
            ModifierKind::Destroying => "destroying",
            ModifierKind::Replacing => "replacing",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            ModifierKind::Complete,
            ModifierKind::Partial,
            ModifierKind::Generating,
            ModifierKind::Destroying,
            ModifierKind::Replacing,
        ]
        .into_iter()
        .find(|k| k.as_str() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModAction<S = f64> {
    SetValue(PropertyValue<S>),
    Dilute(i64),
    Concentrate(i64),
    /// Rewrites each value through an expression in the single variable `var`.
    MapValues { var: String, expr: Expr<S> },
    Remove,
    Add(PropertyValue<S>),
}

impl<S: Scalar> ModAction<S> {
    pub fn name(&self) -> &'static str {
        match self {
            ModAction::SetValue(_) => "set",
            ModAction::Dilute(_) => "dilute",
            ModAction::Concentrate(_) => "concentrate",
            ModAction::MapValues { .. } => "map",
            ModAction::Remove => "remove",
            ModAction::Add(_) => "add",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Modifier<S = f64> {
    kind: ModifierKind,
    actions: Vec<(String, ModAction<S>)>,
}

impl<S: Scalar> Modifier<S> {
    /// Checks the action discipline of `kind`; target existence is checked
    /// when the modifier is applied.
    pub fn new(kind: ModifierKind, actions: Vec<(String, ModAction<S>)>) -> Result<Self, ModifyError> {
        for (i, (t, _)) in actions.iter().enumerate() {
            if actions[..i].iter().any(|(u, _)| u == t) {
                return Err(ModifyError::InvalidModifier(format!("`{t}` is targeted twice")));
            }
        }
        let allowed = |a: &ModAction<S>| match kind {
            ModifierKind::Generating => matches!(a, ModAction::Add(_)),
            ModifierKind::Destroying => matches!(a, ModAction::Remove),
            ModifierKind::Replacing => matches!(a, ModAction::SetValue(_)),
            ModifierKind::Complete | ModifierKind::Partial => {
                !matches!(a, ModAction::Add(_) | ModAction::Remove)
            }
        };
        if let Some((t, a)) = actions.iter().find(|(_, a)| !allowed(a)) {
            return Err(ModifyError::InvalidModifier(format!(
                "a {} modifier cannot `{}` property `{t}`",
                kind.as_str(),
                a.name()
            )));
        }
        if matches!(kind, ModifierKind::Generating | ModifierKind::Destroying) && actions.is_empty() {
            return Err(ModifierKind::invalid(kind, "needs at least one action"));
        }
        Ok(Self { kind, actions })
    }

    pub fn partial(actions: Vec<(String, ModAction<S>)>) -> Result<Self, ModifyError> {
        Self::new(ModifierKind::Partial, actions)
    }

    pub fn kind(&self) -> ModifierKind {
        self.kind
    }

    pub fn actions(&self) -> &[(String, ModAction<S>)] {
        &self.actions
    }
}

impl ModifierKind {
    fn invalid(self, what: &str) -> ModifyError {
        ModifyError::InvalidModifier(format!("a {} modifier {what}", self.as_str()))
    }
}

/// Predicate a dependency rule enforces on its dependent degree.
#[derive(Debug, Clone, PartialEq)]
pub enum Check<S = f64> {
    /// Degree is 1 exactly when every source component is the same.
    AllEqualComponents,
    /// Degree is 1 exactly when every source component equals `value`.
    AllComponentsEqual { value: S },
    /// Degree lies in `[min, max]`.
    DegreeBound { min: S, max: S },
}

impl<S: Scalar> Check<S> {
    pub fn name(&self) -> &'static str {
        match self {
            Check::AllEqualComponents => "all-equal-components",
            Check::AllComponentsEqual { .. } => "all-components-equal-constant",
            Check::DegreeBound { .. } => "custom-degree-bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DependencyRule<S = f64> {
    name: String,
    dependent: String,
    sources: Vec<String>,
    check: Check<S>,
}

impl<S: Scalar> DependencyRule<S> {
    /// `name` defaults to `<dependent>:<check>` when `None`.
    pub fn new(
        name: Option<String>,
        dependent: impl Into<String>,
        sources: Vec<String>,
        check: Check<S>,
    ) -> Result<Self, ModifyError> {
        let dependent = dependent.into();
        if sources.contains(&dependent) {
            return Err(ModifyError::InvalidRule(format!("`{dependent}` depends on itself")));
        }
        if let Check::DegreeBound { min, max } = &check {
            if !(S::zero() <= *min && min <= max && *max <= S::one()) {
                return Err(ModifyError::InvalidRule(format!(
                    "degree bound [{}, {}] is not inside [0, 1]",
                    format_scalar(*min),
                    format_scalar(*max)
                )));
            }
        }
        let name = name.unwrap_or_else(|| format!("{dependent}:{}", check.name()));
        Ok(Self {
            name,
            dependent,
            sources,
            check,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dependent(&self) -> &str {
        &self.dependent
    }

    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    pub fn check(&self) -> &Check<S> {
        &self.check
    }

    fn applies_to(&self, spec: &Specification<S>) -> bool {
        spec.get(&self.dependent).is_some() && self.sources.iter().all(|s| spec.get(s).is_some())
    }

    fn components<'a>(&self, spec: &'a Specification<S>) -> Vec<Quantity<'a, S>> {
        self.sources
            .iter()
            .filter_map(|s| spec.get(s))
            .flat_map(|p| p.value().quantities())
            .collect()
    }

    /// Degree the dependent should carry given the current sources.
    pub fn reflected_degree(&self, spec: &Specification<S>) -> S {
        let comps = self.components(spec);
        match &self.check {
            Check::AllEqualComponents => {
                let mut d = S::one();
                for (i, a) in comps.iter().enumerate() {
                    for b in &comps[i + 1..] {
                        d = d.min(similarity(*a, *b));
                    }
                }
                d
            }
            Check::AllComponentsEqual { value } => comps
                .iter()
                .map(|c| similarity(*c, Quantity::Crisp(*value)))
                .fold(S::one(), S::min),
            Check::DegreeBound { min, max } => match spec.get(&self.dependent).and_then(|p| p.value().degree()) {
                Some(d) => d.value().max(*min).min(*max),
                None => *min,
            },
        }
    }

    fn evaluate(&self, spec: &Specification<S>) -> Option<Violation> {
        if !self.applies_to(spec) {
            return None;
        }
        let violation = |observed: String, required: String| Violation {
            rule: self.name.clone(),
            dependent: self.dependent.clone(),
            observed,
            required,
        };
        let dep = spec.get(&self.dependent).expect("applies");
        let Some(d) = dep.value().degree().map(Degree::value) else {
            return Some(violation(
                format!("a {} value", dep.value().kind()),
                "a verification degree".into(),
            ));
        };
        let shown = format!("{} = {}", self.dependent, format_scalar(d));
        match &self.check {
            Check::AllEqualComponents | Check::AllComponentsEqual { .. } => {
                let holds = self.reflected_degree(spec).approx_eq(S::one());
                let what = match &self.check {
                    Check::AllComponentsEqual { value } => {
                        format!("all components of {} equal {}", self.sources.join(", "), format_scalar(*value))
                    }
                    _ => format!("all components of {} equal", self.sources.join(", ")),
                };
                match (holds, d.approx_eq(S::one())) {
                    (true, false) => Some(violation(shown, format!("{} = 1 since {what}", self.dependent))),
                    (false, true) => Some(violation(shown, format!("{} < 1 since not {what}", self.dependent))),
                    _ => None,
                }
            }
            Check::DegreeBound { min, max } => {
                let inside = d >= *min - S::tolerance() && d <= *max + S::tolerance();
                (!inside).then(|| {
                    violation(
                        shown,
                        format!("{} in [{}, {}]", self.dependent, format_scalar(*min), format_scalar(*max)),
                    )
                })
            }
        }
    }
}

/// How alike two quantities are, in `[0, 1]`; 1 exactly when they are equal.
///
/// Positive crisp values compare by ratio `min/max`; other crisp values by
/// `1 − |x−y|/(|x|+|y|)`. Anything fuzzy compares by the Jaccard index of
/// membership over the union of supports; type-2 sets use (value, grade)
/// points weighted by secondary membership.
pub fn similarity<S: Scalar>(a: Quantity<'_, S>, b: Quantity<'_, S>) -> S {
    if let (Quantity::Crisp(x), Quantity::Crisp(y)) = (a, b) {
        if x.approx_eq(y) {
            return S::one();
        }
        if x > S::zero() && y > S::zero() {
            return x.min(y) / x.max(y);
        }
        return S::one() - (x - y).abs() / (x.abs() + y.abs());
    }
    let lifted = matches!(a, Quantity::Type2(_)) || matches!(b, Quantity::Type2(_));
    let (pa, pb) = (points(a, lifted), points(b, lifted));
    let membership = |ps: &[((S, S), S)], key: (S, S)| {
        ps.iter()
            .find(|(k, _)| k.0.approx_eq(key.0) && k.1.approx_eq(key.1))
            .map_or(S::zero(), |p| p.1)
    };
    let inter = pa.iter().fold(S::zero(), |acc, (k, m)| acc + m.min(membership(&pb, *k)));
    let total = pa.iter().chain(pb.iter()).fold(S::zero(), |acc, (_, m)| acc + *m) - inter;
    if total <= S::zero() {
        S::one()
    } else {
        inter / total
    }
}

/// Flattens a quantity into weighted points keyed by (value, grade).
///
/// Without a type-2 operand the grade is unused and the weight is the
/// membership, which makes the index the usual Σmin/Σmax over supports.
/// Against a type-2 operand, type-1 sets take their default lift.
fn points<S: Scalar>(q: Quantity<'_, S>, lifted: bool) -> Vec<((S, S), S)> {
    match q {
        Quantity::Crisp(x) => vec![((x, S::one()), S::one())],
        Quantity::Type1(s) if lifted => s.elements().iter().map(|&(v, m)| ((v, m), S::one())).collect(),
        Quantity::Type1(s) => s.elements().iter().map(|&(v, m)| ((v, S::one()), m)).collect(),
        Quantity::Type2(s) => s
            .elements()
            .iter()
            .flat_map(|(v, g)| g.elements().iter().map(move |&(x, m)| ((*v, x), m)))
            .collect(),
    }
}

/// A broken dependency rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: String,
    pub dependent: String,
    pub observed: String,
    pub required: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule `{}`: {} but requires {}", self.rule, self.observed, self.required)
    }
}

/// Evaluates every rule that applies to `obj`. Empty means consistent.
pub fn check_consistency<S: Scalar>(obj: &FuzzyObject<S>, rules: &[DependencyRule<S>]) -> Vec<Violation> {
    rules.iter().filter_map(|r| r.evaluate(obj.spec())).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Strict,
    AutoReflect,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModifyError {
    #[error("reflection violated: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    ReflectionViolation(Vec<Violation>),
    #[error("unknown target property `{0}`")]
    UnknownTarget(String),
    #[error("property `{0}` already exists")]
    TargetExists(String),
    #[error("cannot apply `{action}` to `{target}`: {reason}")]
    KindViolation {
        target: String,
        action: &'static str,
        reason: String,
    },
    #[error("invalid modifier: {0}")]
    InvalidModifier(String),
    #[error("invalid dependency rule: {0}")]
    InvalidRule(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Outcome of applying a modifier.
#[derive(Debug, Clone, PartialEq)]
pub struct Modification<S: Scalar = f64> {
    pub successor: FuzzyObject<S>,
    /// The successor's class: the original when nothing about its shape
    /// changed, otherwise a generated one.
    pub class: FuzzyClass<S>,
    pub generated: bool,
    /// Methods removed from the signature because their guards fail.
    pub dropped: Vec<String>,
    /// Dependents recomputed in auto-reflect mode.
    pub reflected: Vec<String>,
}

fn kind_error(target: &str, action: &ModAction<impl Scalar>, reason: impl Into<String>) -> ModifyError {
    ModifyError::KindViolation {
        target: target.to_owned(),
        action: action.name(),
        reason: reason.into(),
    }
}

fn hedge<S: Scalar>(value: &PropertyValue<S>, target: &str, action: &ModAction<S>) -> Result<PropertyValue<S>, ModifyError> {
    let (dil, k) = match action {
        ModAction::Dilute(k) => (true, *k),
        ModAction::Concentrate(n) => (false, *n),
        _ => unreachable!("only hedges"),
    };
    fn h<S: Scalar, T: crate::fuzzy::Hedge<S>>(x: &T, dil: bool, k: i64) -> Result<T, FuzzyError> {
        if dil {
            dilution(x, k)
        } else {
            concentration(x, k)
        }
    }
    Ok(match value {
        PropertyValue::Verification(d) => PropertyValue::Verification(h(d, dil, k)?),
        PropertyValue::Fuzzy1 { set, unit } => PropertyValue::fuzzy1(h(set, dil, k)?, unit.clone()),
        PropertyValue::Fuzzy2 { set, unit } => PropertyValue::fuzzy2(h(set, dil, k)?, unit.clone()),
        PropertyValue::FuzzyTuple {
            sets: FuzzyTuple::Type1(s),
            unit,
        } => PropertyValue::FuzzyTuple {
            sets: FuzzyTuple::Type1(s.iter().map(|x| h(x, dil, k)).collect::<Result<_, _>>()?),
            unit: unit.clone(),
        },
        PropertyValue::FuzzyTuple {
            sets: FuzzyTuple::Type2(s),
            unit,
        } => PropertyValue::FuzzyTuple {
            sets: FuzzyTuple::Type2(s.iter().map(|x| h(x, dil, k)).collect::<Result<_, _>>()?),
            unit: unit.clone(),
        },
        PropertyValue::Crisp { .. } | PropertyValue::CrispTuple { .. } => {
            return Err(kind_error(target, action, "hedges apply to fuzzy or verification properties"))
        }
    })
}

fn map_values<S: Scalar>(
    obj: &FuzzyObject<S>,
    value: &PropertyValue<S>,
    target: &str,
    var: &str,
    expr: &Expr<S>,
    action: &ModAction<S>,
) -> Result<PropertyValue<S>, ModifyError> {
    if !value.kind().is_quantitative() {
        return Err(kind_error(target, action, "only quantitative properties can be remapped"));
    }
    let method = MethodDef::new("map", vec![Param::new(var, None)], expr.clone(), Vec::new(), MethodKind::Modifier)?;
    let apply = |v: PropertyValue<S>| -> Result<PropertyValue<S>, ModifyError> {
        let mut b = Bindings::new();
        b.insert(var.to_owned(), Binding::Value(v));
        Ok(evaluate(&method, obj, &b)?)
    };
    if !value.is_tuple() {
        return apply(value.clone());
    }
    let n = value.quantities().len();
    let parts = (0..n)
        .map(|i| apply(value.component(i).expect("in range")))
        .collect::<Result<Vec<_>, _>>()?;
    let unit = parts[0].unit().unwrap_or_default().to_owned();
    let out = match value.kind() {
        ValueKind::CrispTuple => PropertyValue::crisp_tuple(
            parts
                .iter()
                .map(|p| match p {
                    PropertyValue::Crisp { value, .. } => *value,
                    _ => unreachable!("crisp in, crisp out"),
                })
                .collect(),
            unit,
        )?,
        ValueKind::Fuzzy1Tuple => PropertyValue::fuzzy_tuple(
            FuzzyTuple::Type1(
                parts
                    .into_iter()
                    .map(|p| match p {
                        PropertyValue::Fuzzy1 { set, .. } => set,
                        PropertyValue::Crisp { value, .. } => Type1FuzzySet::singleton(value).expect("finite"),
                        _ => unreachable!("type-1 in, type-1 out"),
                    })
                    .collect(),
            ),
            unit,
        )?,
        _ => PropertyValue::fuzzy_tuple(
            FuzzyTuple::Type2(
                parts
                    .into_iter()
                    .map(|p| match p {
                        PropertyValue::Fuzzy2 { set, .. } => set,
                        _ => Type2FuzzySet::default_lift(&Type1FuzzySet::singleton(S::zero()).expect("finite")),
                    })
                    .collect(),
            ),
            unit,
        )?,
    };
    Ok(out)
}

fn apply_actions<S: Scalar>(obj: &FuzzyObject<S>, m: &Modifier<S>) -> Result<Specification<S>, ModifyError> {
    let spec = obj.spec();
    let targets: Vec<&str> = m.actions.iter().map(|(t, _)| t.as_str()).collect();
    match m.kind {
        ModifierKind::Partial if targets.len() >= spec.len() => {
            return Err(m.kind.invalid("must leave at least one property untouched"))
        }
        ModifierKind::Complete if spec.names().any(|n| !targets.contains(&n)) => {
            return Err(m.kind.invalid("must touch every property"))
        }
        ModifierKind::Destroying if targets.len() >= spec.len() => {
            return Err(m.kind.invalid("cannot remove every property"))
        }
        _ => {}
    }
    let mut next = spec.clone();
    for (target, action) in &m.actions {
        let current = spec.get(target).map(Property::value);
        let value = match (action, current) {
            (ModAction::Add(v), None) => Some(v.clone()),
            (ModAction::Add(_), Some(_)) => return Err(ModifyError::TargetExists(target.clone())),
            (_, None) => return Err(ModifyError::UnknownTarget(target.clone())),
            (ModAction::Remove, Some(_)) => None,
            (ModAction::SetValue(v), Some(cur)) => {
                if m.kind == ModifierKind::Replacing && v.kind().compatible(cur.kind()) {
                    return Err(kind_error(target, action, "a replacing modifier must change the value kind"));
                }
                if m.kind != ModifierKind::Replacing && !v.kind().compatible(cur.kind()) {
                    return Err(kind_error(
                        target,
                        action,
                        format!("{} value cannot replace a {} value", v.kind(), cur.kind()),
                    ));
                }
                Some(v.clone())
            }
            (ModAction::Dilute(_) | ModAction::Concentrate(_), Some(cur)) => Some(hedge(cur, target, action)?),
            (ModAction::MapValues { var, expr }, Some(cur)) => Some(map_values(obj, cur, target, var, expr, action)?),
        };
        next = next.with(target, value)?;
    }
    Ok(next)
}

fn successor_id(ns: &impl Namespace, id: &str) -> String {
    let (base, n) = split_subscript(id);
    (n.map_or(1, |n| n + 1)..)
        .map(|k| format!("{base}{}", subscript(k)))
        .find(|cand| !ns.has_object(cand))
        .expect("unbounded counter")
}

fn same_part<S: Scalar>(a: &ClassPart<S>, b: &ClassPart<S>) -> bool {
    a.spec.len() == b.spec.len()
        && a.spec
            .iter()
            .zip(b.spec.iter())
            .all(|(p, q)| p.name() == q.name() && p.value().approx_eq(q.value()))
        && a.sig.names().eq(b.sig.names())
}

/// Applies a modifier, returning the successor object and its class. The
/// input object and class are left untouched.
pub fn apply_modifier<S: Scalar>(
    ns: &impl Namespace,
    subject: Typed<'_, S>,
    m: &Modifier<S>,
    rules: &[DependencyRule<S>],
    mode: Mode,
) -> Result<Modification<S>, ModifyError> {
    let obj = subject.object();
    let mut spec = apply_actions(obj, m)?;
    let mut reflected = Vec::new();
    if mode == Mode::AutoReflect {
        for rule in rules {
            if rule.evaluate(&spec).is_none() {
                continue;
            }
            let dep = spec.get(rule.dependent()).expect("rule applies");
            if dep.value().kind() == ValueKind::Verification {
                let d = Degree::new(rule.reflected_degree(&spec))?;
                spec = spec.with(rule.dependent(), Some(PropertyValue::Verification(d)))?;
                reflected.push(rule.dependent().to_owned());
            }
        }
    }
    let violations: Vec<Violation> = rules.iter().filter_map(|r| r.evaluate(&spec)).collect();
    if !violations.is_empty() {
        return Err(ModifyError::ReflectionViolation(violations));
    }

    let id = successor_id(ns, obj.id());
    let original = subject.part();
    let unchanged = spec.len() == obj.spec().len()
        && spec
            .iter()
            .zip(obj.spec().iter())
            .all(|(p, q)| p.name() == q.name() && p.value().approx_eq(q.value()));
    if unchanged {
        let successor = FuzzyObject::new(id, subject.class().name(), spec)?;
        return Ok(Modification {
            successor,
            class: subject.class().clone(),
            generated: false,
            dropped: Vec::new(),
            reflected,
        });
    }

    let class_props = spec
        .iter()
        .map(|p| {
            let kept = obj.property(p.name()).is_some_and(|q| q.value().approx_eq(p.value()));
            match original.spec.get(p.name()) {
                Some(cp) if kept => Ok(cp.clone()),
                _ => p.with_value(p.value().erase_grades()),
            }
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    let class_spec = Specification::new(class_props)?;
    let probe = FuzzyObject::new(id.clone(), subject.class().name(), spec.clone())?;
    let (kept, dropped): (Vec<&MethodDef<S>>, Vec<&MethodDef<S>>) = original.sig.iter().partition(|meth| {
        meth.check_against(&class_spec).is_ok() && crate::expr::guard_holds(meth, &probe).is_ok()
    });
    let part = ClassPart::new(class_spec, Signature::new(kept.into_iter().cloned().collect())?);
    let dropped: Vec<String> = dropped.iter().map(|m| m.name().to_owned()).collect();

    let (class, generated) = if same_part(&part, original) {
        (subject.class().clone(), false)
    } else {
        let name = fresh_class_name(ns, "modify", &[subject.class().name()]);
        (FuzzyClass::homogeneous(name, part)?, true)
    };
    let successor = FuzzyObject::new(id, class.name(), spec)?;
    Ok(Modification {
        successor,
        class,
        generated,
        dropped,
        reflected,
    })
}

/// Single-action partial modifier applying a dilution or concentration.
pub fn apply_fuzzy_modifier<S: Scalar>(
    ns: &impl Namespace,
    subject: Typed<'_, S>,
    target: &str,
    action: ModAction<S>,
    rules: &[DependencyRule<S>],
    mode: Mode,
) -> Result<Modification<S>, ModifyError> {
    if !matches!(action, ModAction::Dilute(_) | ModAction::Concentrate(_)) {
        return Err(ModifyError::InvalidModifier(format!(
            "`{}` is not a dilution or concentration",
            action.name()
        )));
    }
    let m = Modifier::partial(vec![(target.to_owned(), action)])?;
    apply_modifier(ns, subject, &m, rules, mode)
}
