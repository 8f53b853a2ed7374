//! Properties, specifications, signatures, fuzzy objects and fuzzy classes.
//!
//! Properties are matched across objects and classes by name. Equivalence of
//! quantitative properties looks only at units, aligned memberships and the
//! spacing of support values, so two sets that differ by a translation are
//! equivalent.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::expr::{alpha_equivalent, MethodDef};
use crate::fuzzy::{Degree, FuzzyError, Type1FuzzySet, Type2FuzzySet};
use crate::notation;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("identifier must not be empty")]
    EmptyName,
    #[error("tuple value must have at least one component")]
    EmptyTuple,
    #[error("specification must contain at least one property")]
    EmptySpecification,
    #[error("class `{0}` has neither properties nor methods")]
    EmptyClass(String),
    #[error("property `{0}` is declared more than once")]
    DuplicateProperty(String),
    #[error("method `{0}` is declared more than once")]
    DuplicateMethod(String),
    #[error("cannot compare a {left} value with a {right} value")]
    KindMismatch { left: ValueKind, right: ValueKind },
    #[error("unknown property `{0}`")]
    UnknownProperty(String),
    #[error("property `{0}` is not a type-1 fuzzy property and cannot take grade sets")]
    NotLiftable(String),
    #[error("property `{property}` has {expected} values but {found} grade sets were supplied")]
    ArityMismatch {
        property: String,
        expected: usize,
        found: usize,
    },
    #[error("class `{0}` is heterogeneous")]
    NotHomogeneous(String),
    #[error("heterogeneous class `{0}` needs at least one projection")]
    NoProjections(String),
    #[error("`{0}` appears both in the core and in a projection")]
    CoreOverlap(String),
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
}

/// Discriminant of [`PropertyValue`], used in error messages and shape checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueKind {
    Crisp,
    CrispTuple,
    Fuzzy1,
    Fuzzy2,
    Fuzzy1Tuple,
    Fuzzy2Tuple,
    Verification,
}

impl ValueKind {
    pub fn is_quantitative(self) -> bool {
        self != ValueKind::Verification
    }

    /// Kinds that may stand in for one another between a class and its
    /// objects: a type-1 class property becomes type-2 on instantiation.
    pub fn compatible(self, other: ValueKind) -> bool {
        use ValueKind::*;
        let family = |k| match k {
            Crisp => 0,
            CrispTuple => 1,
            Fuzzy1 | Fuzzy2 => 2,
            Fuzzy1Tuple | Fuzzy2Tuple => 3,
            Verification => 4,
        };
        family(self) == family(other)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ValueKind::Crisp => "crisp",
            ValueKind::CrispTuple => "crisp_tuple",
            ValueKind::Fuzzy1 => "fuzzy1",
            ValueKind::Fuzzy2 => "fuzzy2",
            ValueKind::Fuzzy1Tuple => "fuzzy1_tuple",
            ValueKind::Fuzzy2Tuple => "fuzzy2_tuple",
            ValueKind::Verification => "verification",
        }
    }
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Components of a tuple of fuzzy sets; all of one type.
#[derive(Debug, Clone, PartialEq)]
pub enum FuzzyTuple<S = f64> {
    Type1(Vec<Type1FuzzySet<S>>),
    Type2(Vec<Type2FuzzySet<S>>),
}

impl<S: Scalar> FuzzyTuple<S> {
    pub fn len(&self) -> usize {
        match self {
            FuzzyTuple::Type1(v) => v.len(),
            FuzzyTuple::Type2(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Value of a property.
#[derive(Debug, Clone, PartialEq)]
pub enum PropertyValue<S = f64> {
    Crisp { value: S, unit: String },
    CrispTuple { values: Vec<S>, unit: String },
    Fuzzy1 { set: Type1FuzzySet<S>, unit: String },
    Fuzzy2 { set: Type2FuzzySet<S>, unit: String },
    FuzzyTuple { sets: FuzzyTuple<S>, unit: String },
    Verification(Degree<S>),
}

/// One scalar-like component of a quantitative value.
#[derive(Debug, Clone, Copy)]
pub enum Quantity<'a, S> {
    Crisp(S),
    Type1(&'a Type1FuzzySet<S>),
    Type2(&'a Type2FuzzySet<S>),
}

impl<S: Scalar> PropertyValue<S> {
    pub fn crisp(value: S, unit: impl Into<String>) -> Self {
        PropertyValue::Crisp {
            value,
            unit: unit.into(),
        }
    }

    pub fn fuzzy1(set: Type1FuzzySet<S>, unit: impl Into<String>) -> Self {
        PropertyValue::Fuzzy1 {
            set,
            unit: unit.into(),
        }
    }

    pub fn fuzzy2(set: Type2FuzzySet<S>, unit: impl Into<String>) -> Self {
        PropertyValue::Fuzzy2 {
            set,
            unit: unit.into(),
        }
    }

    pub fn crisp_tuple(values: Vec<S>, unit: impl Into<String>) -> Result<Self, ModelError> {
        let v = PropertyValue::CrispTuple {
            values,
            unit: unit.into(),
        };
        v.validate()?;
        Ok(v)
    }

    pub fn fuzzy_tuple(sets: FuzzyTuple<S>, unit: impl Into<String>) -> Result<Self, ModelError> {
        let v = PropertyValue::FuzzyTuple {
            sets,
            unit: unit.into(),
        };
        v.validate()?;
        Ok(v)
    }

    pub fn verification(degree: S) -> Result<Self, ModelError> {
        Ok(PropertyValue::Verification(Degree::new(degree)?))
    }

    /// Checks the invariants that the enum shape alone cannot express.
    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            PropertyValue::Crisp { value, .. } if !value.is_finite() => {
                Err(FuzzyError::NonFinite(value.as_f64()).into())
            }
            PropertyValue::CrispTuple { values, .. } => {
                if values.is_empty() {
                    return Err(ModelError::EmptyTuple);
                }
                match values.iter().find(|v| !v.is_finite()) {
                    Some(v) => Err(FuzzyError::NonFinite(v.as_f64()).into()),
                    None => Ok(()),
                }
            }
            PropertyValue::FuzzyTuple { sets, .. } if sets.is_empty() => Err(ModelError::EmptyTuple),
            _ => Ok(()),
        }
    }

    pub fn kind(&self) -> ValueKind {
        match self {
            PropertyValue::Crisp { .. } => ValueKind::Crisp,
            PropertyValue::CrispTuple { .. } => ValueKind::CrispTuple,
            PropertyValue::Fuzzy1 { .. } => ValueKind::Fuzzy1,
            PropertyValue::Fuzzy2 { .. } => ValueKind::Fuzzy2,
            PropertyValue::FuzzyTuple {
                sets: FuzzyTuple::Type1(_),
                ..
            } => ValueKind::Fuzzy1Tuple,
            PropertyValue::FuzzyTuple {
                sets: FuzzyTuple::Type2(_),
                ..
            } => ValueKind::Fuzzy2Tuple,
            PropertyValue::Verification(_) => ValueKind::Verification,
        }
    }

    pub fn unit(&self) -> Option<&str> {
        match self {
            PropertyValue::Crisp { unit, .. }
            | PropertyValue::CrispTuple { unit, .. }
            | PropertyValue::Fuzzy1 { unit, .. }
            | PropertyValue::Fuzzy2 { unit, .. }
            | PropertyValue::FuzzyTuple { unit, .. } => Some(unit),
            PropertyValue::Verification(_) => None,
        }
    }

    pub fn is_tuple(&self) -> bool {
        matches!(
            self,
            PropertyValue::CrispTuple { .. } | PropertyValue::FuzzyTuple { .. }
        )
    }

    pub fn degree(&self) -> Option<Degree<S>> {
        match self {
            PropertyValue::Verification(d) => Some(*d),
            _ => None,
        }
    }

    /// Quantitative components: one for scalar kinds, one per tuple slot.
    pub fn quantities(&self) -> Vec<Quantity<'_, S>> {
        match self {
            PropertyValue::Crisp { value, .. } => vec![Quantity::Crisp(*value)],
            PropertyValue::CrispTuple { values, .. } => {
                values.iter().map(|v| Quantity::Crisp(*v)).collect()
            }
            PropertyValue::Fuzzy1 { set, .. } => vec![Quantity::Type1(set)],
            PropertyValue::Fuzzy2 { set, .. } => vec![Quantity::Type2(set)],
            PropertyValue::FuzzyTuple {
                sets: FuzzyTuple::Type1(sets),
                ..
            } => sets.iter().map(Quantity::Type1).collect(),
            PropertyValue::FuzzyTuple {
                sets: FuzzyTuple::Type2(sets),
                ..
            } => sets.iter().map(Quantity::Type2).collect(),
            PropertyValue::Verification(_) => Vec::new(),
        }
    }

    /// Component `index` of a tuple as a standalone value.
    pub fn component(&self, index: usize) -> Option<PropertyValue<S>> {
        match self {
            PropertyValue::CrispTuple { values, unit } => values
                .get(index)
                .map(|v| PropertyValue::crisp(*v, unit.clone())),
            PropertyValue::FuzzyTuple {
                sets: FuzzyTuple::Type1(sets),
                unit,
            } => sets
                .get(index)
                .map(|s| PropertyValue::fuzzy1(s.clone(), unit.clone())),
            PropertyValue::FuzzyTuple {
                sets: FuzzyTuple::Type2(sets),
                unit,
            } => sets
                .get(index)
                .map(|s| PropertyValue::fuzzy2(s.clone(), unit.clone())),
            _ => None,
        }
    }

    /// Replaces each type-2 set by its principal type-1 set.
    pub fn erase_grades(&self) -> PropertyValue<S> {
        match self {
            PropertyValue::Fuzzy2 { set, unit } => PropertyValue::fuzzy1(set.principal(), unit.clone()),
            PropertyValue::FuzzyTuple {
                sets: FuzzyTuple::Type2(sets),
                unit,
            } => PropertyValue::FuzzyTuple {
                sets: FuzzyTuple::Type1(sets.iter().map(Type2FuzzySet::principal).collect()),
                unit: unit.clone(),
            },
            other => other.clone(),
        }
    }

    /// Structural equality within tolerance. Stricter than equivalence.
    pub fn approx_eq(&self, other: &Self) -> bool {
        use PropertyValue::*;
        match (self, other) {
            (Verification(a), Verification(b)) => a.approx_eq(*b),
            (a, b) => {
                a.kind() == b.kind()
                    && a.unit() == b.unit()
                    && a.quantities().len() == b.quantities().len()
                    && a
                        .quantities()
                        .iter()
                        .zip(b.quantities())
                        .all(|(x, y)| quantity_identical(*x, y))
            }
        }
    }
}

impl<S: Scalar> fmt::Display for PropertyValue<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&notation::render_value(self))
    }
}

pub(crate) fn quantity_identical<S: Scalar>(a: Quantity<'_, S>, b: Quantity<'_, S>) -> bool {
    match (a, b) {
        (Quantity::Crisp(x), Quantity::Crisp(y)) => x.approx_eq(y),
        (Quantity::Type1(x), Quantity::Type1(y)) => x.approx_eq(y),
        (Quantity::Type2(x), Quantity::Type2(y)) => x.approx_eq(y),
        _ => false,
    }
}

fn spacings_match<S: Scalar>(a: impl Iterator<Item = S>, b: impl Iterator<Item = S>) -> bool {
    a.zip(b).all(|(x, y)| x.approx_eq(y))
}

/// Equivalence of two single quantities: same cardinality, aligned
/// memberships equal, consecutive spacings equal. A crisp value stands for
/// the singleton `{v/1}` and must then match by value.
fn quantity_equivalent<S: Scalar>(a: Quantity<'_, S>, b: Quantity<'_, S>) -> bool {
    use Quantity::*;
    match (a, b) {
        (Crisp(x), Crisp(y)) => x.approx_eq(y),
        (Crisp(x), Type1(s)) | (Type1(s), Crisp(x)) => {
            s.len() == 1 && s.elements()[0].0.approx_eq(x) && s.elements()[0].1.approx_eq(S::one())
        }
        (Crisp(x), Type2(s)) | (Type2(s), Crisp(x)) => {
            let one = Type1FuzzySet::singleton(S::one()).expect("1 is finite");
            s.len() == 1 && s.elements()[0].0.approx_eq(x) && s.elements()[0].1.approx_eq(&one)
        }
        (Type1(x), Type1(y)) => {
            x.len() == y.len()
                && x.memberships().zip(y.memberships()).all(|(m, n)| m.approx_eq(n))
                && spacings_match(x.spacings(), y.spacings())
        }
        (Type2(x), Type2(y)) => {
            x.len() == y.len()
                && x
                    .elements()
                    .iter()
                    .zip(y.elements())
                    .all(|(m, n)| m.1.approx_eq(&n.1))
                && spacings_match(x.spacings(), y.spacings())
        }
        (Type1(x), Type2(y)) | (Type2(y), Type1(x)) => {
            let lifted = Type2FuzzySet::default_lift(x);
            quantity_equivalent(Type2(&lifted), Type2(y))
        }
    }
}

/// A named property.
#[derive(Debug, Clone, PartialEq)]
pub struct Property<S = f64> {
    name: String,
    value: PropertyValue<S>,
}

impl<S: Scalar> Property<S> {
    pub fn new(name: impl Into<String>, value: PropertyValue<S>) -> Result<Self, ModelError> {
        let name = name.into();
        if name.is_empty() {
            return Err(ModelError::EmptyName);
        }
        value.validate()?;
        Ok(Self { name, value })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self) -> &PropertyValue<S> {
        &self.value
    }

    pub fn with_value(&self, value: PropertyValue<S>) -> Result<Self, ModelError> {
        Self::new(self.name.clone(), value)
    }
}

/// Equivalence of two quantitative properties: equal units, equal
/// cardinalities with aligned memberships, equal spacings. Tuples compare
/// componentwise. Names are not consulted.
pub fn eq_quantitative<S: Scalar>(p: &Property<S>, q: &Property<S>) -> Result<bool, ModelError> {
    let (a, b) = (p.value(), q.value());
    if !a.kind().is_quantitative() || !b.kind().is_quantitative() {
        return Err(ModelError::KindMismatch {
            left: a.kind(),
            right: b.kind(),
        });
    }
    if a.unit() != b.unit() || a.is_tuple() != b.is_tuple() {
        return Ok(false);
    }
    let (xs, ys) = (a.quantities(), b.quantities());
    Ok(xs.len() == ys.len()
        && xs
            .iter()
            .zip(ys)
            .all(|(x, y)| quantity_equivalent(*x, y)))
}

/// Equivalence of two qualitative properties: equal verification degrees.
pub fn eq_qualitative<S: Scalar>(p: &Property<S>, q: &Property<S>) -> Result<bool, ModelError> {
    match (p.value(), q.value()) {
        (PropertyValue::Verification(a), PropertyValue::Verification(b)) => Ok(a.approx_eq(*b)),
        (a, b) => Err(ModelError::KindMismatch {
            left: a.kind(),
            right: b.kind(),
        }),
    }
}

/// Name-aware equivalence dispatching on the property kind.
pub fn eq_property<S: Scalar>(p: &Property<S>, q: &Property<S>) -> bool {
    if p.name() != q.name() {
        return false;
    }
    let (pq, qq) = (p.value().kind().is_quantitative(), q.value().kind().is_quantitative());
    match (pq, qq) {
        (true, true) => eq_quantitative(p, q).unwrap_or(false),
        (false, false) => eq_qualitative(p, q).unwrap_or(false),
        _ => false,
    }
}

/// Ordered properties with distinct names. May be empty: cores and
/// projections are specifications too. Objects require a non-empty one.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Specification<S = f64> {
    properties: Vec<Property<S>>,
}

impl<S: Scalar> Specification<S> {
    pub fn new(properties: Vec<Property<S>>) -> Result<Self, ModelError> {
        for (i, p) in properties.iter().enumerate() {
            if properties[..i].iter().any(|q| q.name() == p.name()) {
                return Err(ModelError::DuplicateProperty(p.name().to_owned()));
            }
        }
        Ok(Self { properties })
    }

    pub fn empty() -> Self {
        Self {
            properties: Vec::new(),
        }
    }

    pub fn properties(&self) -> &[Property<S>] {
        &self.properties
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Property<S>> {
        self.properties.iter()
    }

    pub fn len(&self) -> usize {
        self.properties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.properties.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&Property<S>> {
        self.properties.iter().find(|p| p.name() == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.properties.iter().map(Property::name)
    }

    /// Returns a copy with `name` replaced, appended, or removed (`None`).
    pub(crate) fn with(&self, name: &str, value: Option<PropertyValue<S>>) -> Result<Self, ModelError> {
        let mut props = self.properties.clone();
        match (props.iter().position(|p| p.name() == name), value) {
            (Some(i), Some(v)) => props[i] = props[i].with_value(v)?,
            (Some(i), None) => {
                props.remove(i);
            }
            (None, Some(v)) => props.push(Property::new(name, v)?),
            (None, None) => return Err(ModelError::UnknownProperty(name.to_owned())),
        }
        Ok(Self { properties: props })
    }
}

impl<'a, S> IntoIterator for &'a Specification<S> {
    type Item = &'a Property<S>;
    type IntoIter = std::slice::Iter<'a, Property<S>>;

    fn into_iter(self) -> Self::IntoIter {
        self.properties.iter()
    }
}

/// Ordered methods with distinct names.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Signature<S = f64> {
    methods: Vec<MethodDef<S>>,
}

impl<S: Scalar> Signature<S> {
    pub fn new(methods: Vec<MethodDef<S>>) -> Result<Self, ModelError> {
        for (i, m) in methods.iter().enumerate() {
            if methods[..i].iter().any(|n| n.name() == m.name()) {
                return Err(ModelError::DuplicateMethod(m.name().to_owned()));
            }
        }
        Ok(Self { methods })
    }

    pub fn empty() -> Self {
        Self {
            methods: Vec::new(),
        }
    }

    pub fn methods(&self) -> &[MethodDef<S>] {
        &self.methods
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MethodDef<S>> {
        self.methods.iter()
    }

    pub fn len(&self) -> usize {
        self.methods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.methods.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&MethodDef<S>> {
        self.methods.iter().find(|m| m.name() == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.methods.iter().map(MethodDef::name)
    }
}

/// A fuzzy object `A/P(A)` typed by the class it was created from.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyObject<S = f64> {
    id: String,
    class_name: String,
    spec: Specification<S>,
}

impl<S: Scalar> FuzzyObject<S> {
    pub fn new(
        id: impl Into<String>,
        class_name: impl Into<String>,
        spec: Specification<S>,
    ) -> Result<Self, ModelError> {
        let (id, class_name) = (id.into(), class_name.into());
        if id.is_empty() || class_name.is_empty() {
            return Err(ModelError::EmptyName);
        }
        if spec.is_empty() {
            return Err(ModelError::EmptySpecification);
        }
        Ok(Self {
            id,
            class_name,
            spec,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn class_name(&self) -> &str {
        &self.class_name
    }

    pub fn spec(&self) -> &Specification<S> {
        &self.spec
    }

    pub fn property(&self, name: &str) -> Option<&Property<S>> {
        self.spec.get(name)
    }

    pub(crate) fn renamed(&self, id: String, class_name: String, spec: Specification<S>) -> Result<Self, ModelError> {
        Self::new(id, class_name, spec)
    }
}

/// Specification plus signature; the body of a homogeneous class and the
/// shape of a core or projection.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClassPart<S = f64> {
    pub spec: Specification<S>,
    pub sig: Signature<S>,
}

impl<S: Scalar> ClassPart<S> {
    pub fn new(spec: Specification<S>, sig: Signature<S>) -> Self {
        Self { spec, sig }
    }

    pub fn is_empty(&self) -> bool {
        self.spec.is_empty() && self.sig.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projection<S = f64> {
    pub label: String,
    pub part: ClassPart<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClassBody<S = f64> {
    Homogeneous(ClassPart<S>),
    Heterogeneous {
        core: ClassPart<S>,
        projections: Vec<Projection<S>>,
    },
}

/// Properties and methods one object of a class may carry.
pub type Shape<'a, S> = (Vec<&'a Property<S>>, Vec<&'a MethodDef<S>>);

#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyClass<S = f64> {
    name: String,
    body: ClassBody<S>,
}

impl<S: Scalar> FuzzyClass<S> {
    pub fn homogeneous(name: impl Into<String>, part: ClassPart<S>) -> Result<Self, ModelError> {
        let name = name.into();
        if name.is_empty() {
            return Err(ModelError::EmptyName);
        }
        if part.is_empty() {
            return Err(ModelError::EmptyClass(name));
        }
        Ok(Self {
            name,
            body: ClassBody::Homogeneous(part),
        })
    }

    pub fn heterogeneous(
        name: impl Into<String>,
        core: ClassPart<S>,
        projections: Vec<Projection<S>>,
    ) -> Result<Self, ModelError> {
        let name = name.into();
        if name.is_empty() {
            return Err(ModelError::EmptyName);
        }
        if projections.is_empty() {
            return Err(ModelError::NoProjections(name));
        }
        for pr in &projections {
            if let Some(n) = pr.part.spec.names().find(|n| core.spec.get(n).is_some()) {
                return Err(ModelError::CoreOverlap(n.to_owned()));
            }
            if let Some(n) = pr.part.sig.names().find(|n| core.sig.get(n).is_some()) {
                return Err(ModelError::CoreOverlap(n.to_owned()));
            }
        }
        Ok(Self {
            name,
            body: ClassBody::Heterogeneous { core, projections },
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn body(&self) -> &ClassBody<S> {
        &self.body
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self.body, ClassBody::Homogeneous(_))
    }

    pub fn as_homogeneous(&self) -> Result<&ClassPart<S>, ModelError> {
        match &self.body {
            ClassBody::Homogeneous(part) => Ok(part),
            ClassBody::Heterogeneous { .. } => Err(ModelError::NotHomogeneous(self.name.clone())),
        }
    }

    /// Every shape an object of this class may take: the homogeneous part,
    /// or the core merged with each projection.
    pub fn object_shapes(&self) -> Vec<Shape<'_, S>> {
        match &self.body {
            ClassBody::Homogeneous(p) => vec![(p.spec.iter().collect(), p.sig.iter().collect())],
            ClassBody::Heterogeneous { core, projections } => projections
                .iter()
                .map(|pr| {
                    (
                        core.spec.iter().chain(pr.part.spec.iter()).collect(),
                        core.sig.iter().chain(pr.part.sig.iter()).collect(),
                    )
                })
                .collect(),
        }
    }

    /// Checks that `spec` has the property names and kinds of some shape of
    /// this class.
    pub fn admits(&self, spec: &Specification<S>) -> bool {
        self.object_shapes().iter().any(|(props, _)| {
            props.len() == spec.len()
                && props.iter().all(|p| {
                    spec.get(p.name())
                        .is_some_and(|q| p.value().kind().compatible(q.value().kind()))
                })
        })
    }
}

/// Same type: equivalent specifications and alpha-equivalent signatures,
/// both aligned by name.
pub fn same_type<S: Scalar>(
    a: &FuzzyObject<S>,
    sig_a: &Signature<S>,
    b: &FuzzyObject<S>,
    sig_b: &Signature<S>,
) -> bool {
    let specs = a.spec().len() == b.spec().len()
        && a
            .spec()
            .iter()
            .all(|p| b.property(p.name()).is_some_and(|q| eq_property(p, q)));
    let sigs = sig_a.len() == sig_b.len()
        && sig_a
            .iter()
            .all(|m| sig_b.get(m.name()).is_some_and(|n| alpha_equivalent(m, n)));
    specs && sigs
}

/// Grade sets to attach to each type-1 property when instantiating a class,
/// keyed by property name, one grade set per value of the class set.
pub type SecondaryGrades<S = f64> = BTreeMap<String, Vec<Type1FuzzySet<S>>>;

/// Creates an object of a homogeneous class. Type-1 fuzzy properties become
/// type-2, using the supplied grade sets or `{μ/1}` for every value.
pub fn instantiate<S: Scalar>(
    class: &FuzzyClass<S>,
    id: impl Into<String>,
    secondary: &SecondaryGrades<S>,
) -> Result<FuzzyObject<S>, ModelError> {
    let part = class.as_homogeneous()?;
    for name in secondary.keys() {
        match part.spec.get(name) {
            None => return Err(ModelError::UnknownProperty(name.clone())),
            Some(p) if !matches!(p.value().kind(), ValueKind::Fuzzy1 | ValueKind::Fuzzy1Tuple) => {
                return Err(ModelError::NotLiftable(name.clone()))
            }
            Some(_) => {}
        }
    }
    let lift = |name: &str, set: &Type1FuzzySet<S>| -> Result<Type2FuzzySet<S>, ModelError> {
        match secondary.get(name) {
            None => Ok(Type2FuzzySet::default_lift(set)),
            Some(grades) if grades.len() != set.len() => Err(ModelError::ArityMismatch {
                property: name.to_owned(),
                expected: set.len(),
                found: grades.len(),
            }),
            Some(grades) => Ok(Type2FuzzySet::lift_with(set, grades)?),
        }
    };
    let mut props = Vec::with_capacity(part.spec.len());
    for p in &part.spec {
        let value = match p.value() {
            PropertyValue::Fuzzy1 { set, unit } => PropertyValue::fuzzy2(lift(p.name(), set)?, unit.clone()),
            PropertyValue::FuzzyTuple {
                sets: FuzzyTuple::Type1(sets),
                unit,
            } => PropertyValue::FuzzyTuple {
                sets: FuzzyTuple::Type2(
                    sets.iter()
                        .map(|s| lift(p.name(), s))
                        .collect::<Result<_, _>>()?,
                ),
                unit: unit.clone(),
            },
            other => other.clone(),
        };
        props.push(Property::new(p.name(), value)?);
    }
    FuzzyObject::new(id, class.name(), Specification::new(props)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t1(pairs: &[(f64, f64)]) -> Type1FuzzySet {
        Type1FuzzySet::new(pairs.iter().copied()).unwrap()
    }

    fn fz(name: &str, pairs: &[(f64, f64)], unit: &str) -> Property {
        Property::new(name, PropertyValue::fuzzy1(t1(pairs), unit)).unwrap()
    }

    fn vf(name: &str, d: f64) -> Property {
        Property::new(name, PropertyValue::verification(d).unwrap()).unwrap()
    }

    #[test]
    fn square_and_rhombus_sides_differ() {
        let a = fz("p2", &[(2.9, 0.95), (3., 1.), (3.4, 0.75)], "cm");
        let b = fz("p2", &[(1.7, 0.85), (2., 1.), (2.1, 0.95)], "cm");
        assert!(!eq_quantitative(&a, &b).unwrap());
        assert!(eq_quantitative(&a, &a).unwrap());
    }

    #[test]
    fn translated_sets_are_equivalent() {
        let a = fz("p", &[(10., 0.8), (11., 0.9), (12., 1.)], "cm");
        let b = fz("p", &[(20., 0.8), (21., 0.9), (22., 1.)], "cm");
        assert!(eq_quantitative(&a, &b).unwrap());
        let c = fz("p", &[(20., 0.8), (21., 0.9), (22., 1.)], "mm");
        assert!(!eq_quantitative(&a, &c).unwrap());
    }

    #[test]
    fn quantitative_rejects_verification() {
        let a = fz("p", &[(1., 1.)], "cm");
        assert!(matches!(
            eq_quantitative(&a, &vf("p", 1.)),
            Err(ModelError::KindMismatch { .. })
        ));
        assert!(matches!(
            eq_qualitative(&a, &vf("p", 1.)),
            Err(ModelError::KindMismatch { .. })
        ));
    }

    #[test]
    fn qualitative_equivalence() {
        assert!(eq_qualitative(&vf("p5", 1.), &vf("p5", 1.)).unwrap());
        assert!(!eq_qualitative(&vf("p6", 1.), &vf("p6", 0.8)).unwrap());
    }

    #[test]
    fn eq_property_dispatch() {
        let sides = Property::new("p1", PropertyValue::crisp(4.0, "sd.")).unwrap();
        assert!(eq_property(&sides, &sides.clone()));
        assert!(!eq_property(&sides, &vf("p1", 1.)));
        let other = Property::new("p9", PropertyValue::crisp(4.0, "sd.")).unwrap();
        assert!(!eq_property(&sides, &other));
    }

    #[test]
    fn crisp_compares_as_singleton() {
        let c = Property::new("p", PropertyValue::crisp(4.0, "cm")).unwrap();
        let s = fz("p", &[(4., 1.)], "cm");
        let t = fz("p", &[(5., 1.)], "cm");
        assert!(eq_quantitative(&c, &s).unwrap());
        assert!(!eq_quantitative(&c, &t).unwrap());
        let tup = Property::new("p", PropertyValue::crisp_tuple(vec![4.0], "cm").unwrap()).unwrap();
        assert!(!eq_quantitative(&c, &tup).unwrap());
    }

    #[test]
    fn crisp_tuples_compare_componentwise() {
        let a = PropertyValue::crisp_tuple(vec![90., 90., 90., 90.], "deg").unwrap();
        let b = PropertyValue::crisp_tuple(vec![100., 80., 100., 80.], "deg").unwrap();
        let pa = Property::new("p4", a).unwrap();
        let pb = Property::new("p4", b).unwrap();
        assert!(!eq_property(&pa, &pb));
        assert!(eq_property(&pa, &pa));
    }

    #[test]
    fn tuple_invariants() {
        assert_eq!(
            PropertyValue::<f64>::crisp_tuple(vec![], "cm"),
            Err(ModelError::EmptyTuple)
        );
        assert_eq!(
            PropertyValue::<f64>::fuzzy_tuple(FuzzyTuple::Type1(vec![]), "cm"),
            Err(ModelError::EmptyTuple)
        );
    }

    #[test]
    fn specification_names_unique() {
        let r = Specification::new(vec![vf("p", 1.), vf("p", 0.5)]);
        assert_eq!(r, Err(ModelError::DuplicateProperty("p".into())));
    }

    #[test]
    fn heterogeneous_invariants() {
        let core = ClassPart::new(Specification::new(vec![vf("p", 1.)]).unwrap(), Signature::empty());
        let pr = Projection {
            label: "A".into(),
            part: ClassPart::new(Specification::new(vec![vf("p", 0.5)]).unwrap(), Signature::empty()),
        };
        assert_eq!(
            FuzzyClass::heterogeneous("T", core.clone(), vec![pr]),
            Err(ModelError::CoreOverlap("p".into()))
        );
        assert_eq!(
            FuzzyClass::heterogeneous("T", core, vec![]),
            Err(ModelError::NoProjections("T".into()))
        );
    }

    fn square_class() -> FuzzyClass {
        let spec = Specification::new(vec![
            Property::new("p1", PropertyValue::crisp(4.0, "sd.")).unwrap(),
            fz("p3", &[(2., 0.9), (2.2, 1.)], "cm"),
            vf("p5", 1.),
        ])
        .unwrap();
        FuzzyClass::homogeneous("Square", ClassPart::new(spec, Signature::empty())).unwrap()
    }

    #[test]
    fn instantiate_default_lift() {
        let obj = instantiate(&square_class(), "A", &SecondaryGrades::new()).unwrap();
        match obj.property("p3").unwrap().value() {
            PropertyValue::Fuzzy2 { set, unit } => {
                assert_eq!(unit, "cm");
                assert_eq!(set.elements()[0].0, 2.);
                assert_eq!(set.elements()[0].1.elements(), &[(0.9, 1.)]);
                assert_eq!(set.elements()[1].1.elements(), &[(1., 1.)]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(obj.property("p1").unwrap().value(), &PropertyValue::crisp(4.0, "sd."));
        let erased = obj.property("p3").unwrap().value().erase_grades();
        assert_eq!(&erased, square_class().as_homogeneous().unwrap().spec.get("p3").unwrap().value());
        assert!(square_class().admits(obj.spec()));
    }

    #[test]
    fn instantiate_errors() {
        let mut sec = SecondaryGrades::new();
        sec.insert("nope".into(), vec![]);
        assert_eq!(
            instantiate(&square_class(), "A", &sec),
            Err(ModelError::UnknownProperty("nope".into()))
        );
        let mut sec = SecondaryGrades::new();
        sec.insert("p3".into(), vec![t1(&[(0.9, 1.)])]);
        assert_eq!(
            instantiate(&square_class(), "A", &sec),
            Err(ModelError::ArityMismatch {
                property: "p3".into(),
                expected: 2,
                found: 1
            })
        );
        let mut sec = SecondaryGrades::new();
        sec.insert("p1".into(), vec![]);
        assert_eq!(
            instantiate(&square_class(), "A", &sec),
            Err(ModelError::NotLiftable("p1".into()))
        );
    }

    #[test]
    fn crisp_only_class_instantiates_verbatim() {
        let spec = Specification::new(vec![Property::new("n", PropertyValue::crisp(3.0, "")).unwrap()]).unwrap();
        let class = FuzzyClass::homogeneous("C", ClassPart::new(spec.clone(), Signature::empty())).unwrap();
        let obj = instantiate(&class, "x", &SecondaryGrades::new()).unwrap();
        assert_eq!(obj.spec(), &spec);
    }
}
