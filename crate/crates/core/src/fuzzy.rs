//! Discrete type-1 and type-2 fuzzy sets and verification degrees.
//!
//! Sets are kept sorted by value with no two values closer than the scalar
//! tolerance. Constructors merge such near-duplicates by maximum membership
//! unless [`Validation::Strict`] is requested.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::notation;
use crate::scalar::{in_unit_interval, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuzzyError {
    #[error("fuzzy set must contain at least one element")]
    EmptySet,
    #[error("degree {0} is outside [0, 1]")]
    BadDegree(f64),
    #[error("exponent must be a positive integer, got {0}")]
    BadExponent(i64),
    #[error("value {0} is not finite")]
    NonFinite(f64),
    #[error("value {0} appears more than once")]
    DuplicateValue(f64),
}

/// How constructors treat repeated values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Validation {
    /// Merge repeated values, keeping the larger membership.
    #[default]
    Lenient,
    /// Reject repeated values with [`FuzzyError::DuplicateValue`].
    Strict,
}

/// A truth degree in `[0, 1]`, the value of a qualitative property.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Degree<S = f64>(S);

impl<S: Scalar> Degree<S> {
    pub fn new(value: S) -> Result<Self, FuzzyError> {
        if in_unit_interval(value) {
            Ok(Self(value))
        } else {
            Err(FuzzyError::BadDegree(value.as_f64()))
        }
    }

    pub fn one() -> Self {
        Self(S::one())
    }

    pub fn value(self) -> S {
        self.0
    }

    pub fn approx_eq(self, other: Self) -> bool {
        self.0.approx_eq(other.0)
    }
}

impl<S: Scalar> fmt::Display for Degree<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&notation::format_scalar(self.0))
    }
}

fn check_finite<S: Scalar>(x: S) -> Result<S, FuzzyError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(FuzzyError::NonFinite(x.as_f64()))
    }
}

/// Sorts by value and collapses runs of values within tolerance of the run's
/// first element, combining payloads with `merge`.
fn sort_and_merge<S: Scalar, T>(
    mut items: Vec<(S, T)>,
    validation: Validation,
    mut merge: impl FnMut(&T, &T) -> T,
) -> Result<Vec<(S, T)>, FuzzyError> {
    if items.is_empty() {
        return Err(FuzzyError::EmptySet);
    }
    items.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let mut out: Vec<(S, T)> = Vec::with_capacity(items.len());
    for (v, t) in items {
        match out.last_mut() {
            Some(last) if last.0.approx_eq(v) => {
                if validation == Validation::Strict {
                    return Err(FuzzyError::DuplicateValue(v.as_f64()));
                }
                last.1 = merge(&last.1, &t);
            }
            _ => out.push((v, t)),
        }
    }
    Ok(out)
}

/// Discrete type-1 fuzzy set `{v1/μ1 + … + vn/μn}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Type1FuzzySet<S = f64> {
    elements: Vec<(S, S)>,
}

impl<S: Scalar> Type1FuzzySet<S> {
    pub fn new(pairs: impl IntoIterator<Item = (S, S)>) -> Result<Self, FuzzyError> {
        Self::with_validation(pairs, Validation::Lenient)
    }

    pub fn with_validation(
        pairs: impl IntoIterator<Item = (S, S)>,
        validation: Validation,
    ) -> Result<Self, FuzzyError> {
        let items = pairs
            .into_iter()
            .map(|(v, mu)| {
                check_finite(v)?;
                if !in_unit_interval(mu) {
                    return Err(FuzzyError::BadDegree(mu.as_f64()));
                }
                Ok((v, mu))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let elements = sort_and_merge(items, validation, |a: &S, b: &S| a.max(*b))?;
        Ok(Self { elements })
    }

    /// A crisp value as the degenerate set `{v/1}`.
    pub fn singleton(value: S) -> Result<Self, FuzzyError> {
        Self::new([(value, S::one())])
    }

    pub fn elements(&self) -> &[(S, S)] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> impl Iterator<Item = S> + '_ {
        self.elements.iter().map(|e| e.0)
    }

    pub fn memberships(&self) -> impl Iterator<Item = S> + '_ {
        self.elements.iter().map(|e| e.1)
    }

    pub fn membership_of(&self, value: S) -> S {
        self.elements
            .iter()
            .find(|e| e.0.approx_eq(value))
            .map_or(S::zero(), |e| e.1)
    }

    pub fn height(&self) -> S {
        self.memberships().fold(S::zero(), S::max)
    }

    /// Value carrying the highest membership; the first one on ties.
    pub fn peak(&self) -> S {
        let mut best = self.elements[0];
        for &e in &self.elements[1..] {
            if e.1 > best.1 {
                best = e;
            }
        }
        best.0
    }

    /// Spacings between consecutive support values.
    pub fn spacings(&self) -> impl Iterator<Item = S> + '_ {
        self.elements.windows(2).map(|w| w[1].0 - w[0].0)
    }

    /// Unary extension principle: values go through `f`, memberships are
    /// carried over, and collisions keep the larger membership.
    pub fn map_unary<E: From<FuzzyError>>(
        &self,
        mut f: impl FnMut(S) -> Result<S, E>,
    ) -> Result<Self, E> {
        let mut pairs = Vec::with_capacity(self.elements.len());
        for &(v, mu) in &self.elements {
            pairs.push((check_finite(f(v)?)?, mu));
        }
        Ok(Self::new(pairs)?)
    }

    /// Maps every membership through `f`. Values are untouched.
    pub fn map_memberships(&self, f: impl Fn(S) -> S) -> Result<Self, FuzzyError> {
        Self::new(self.elements.iter().map(|&(v, mu)| (v, f(mu))))
    }

    /// Pointwise maximum over the union of both supports.
    pub fn union_max(&self, other: &Self) -> Self {
        let pairs = self.elements.iter().chain(other.elements.iter()).copied();
        Self::new(pairs.collect::<Vec<_>>()).expect("union of valid sets is valid")
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self
                .elements
                .iter()
                .zip(&other.elements)
                .all(|(a, b)| a.0.approx_eq(b.0) && a.1.approx_eq(b.1))
    }
}

impl<S: Scalar> fmt::Display for Type1FuzzySet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&notation::render_type1(self))
    }
}

/// Discrete type-2 fuzzy set: each primary value carries a type-1 grade set
/// over `[0, 1]`, written `v/{g1/m1 + …}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Type2FuzzySet<S = f64> {
    elements: Vec<(S, Type1FuzzySet<S>)>,
}

impl<S: Scalar> Type2FuzzySet<S> {
    pub fn new(
        pairs: impl IntoIterator<Item = (S, Type1FuzzySet<S>)>,
    ) -> Result<Self, FuzzyError> {
        Self::with_validation(pairs, Validation::Lenient)
    }

    pub fn with_validation(
        pairs: impl IntoIterator<Item = (S, Type1FuzzySet<S>)>,
        validation: Validation,
    ) -> Result<Self, FuzzyError> {
        let items = pairs
            .into_iter()
            .map(|(v, grades)| {
                check_finite(v)?;
                if let Some(g) = grades.values().find(|g| !in_unit_interval(*g)) {
                    return Err(FuzzyError::BadDegree(g.as_f64()));
                }
                Ok((v, grades))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let elements = sort_and_merge(items, validation, |a: &Type1FuzzySet<S>, b| a.union_max(b))?;
        Ok(Self { elements })
    }

    /// Lifts each `v/μ` to `v/{μ/1}`.
    pub fn default_lift(set: &Type1FuzzySet<S>) -> Self {
        let elements = set
            .elements()
            .iter()
            .map(|&(v, mu)| (v, Type1FuzzySet::singleton(mu).expect("membership is finite")))
            .collect();
        Self { elements }
    }

    /// Lifts a type-1 set with one supplied grade set per value, in value order.
    pub fn lift_with(
        set: &Type1FuzzySet<S>,
        grades: &[Type1FuzzySet<S>],
    ) -> Result<Self, FuzzyError> {
        Self::new(set.values().zip(grades.iter().cloned()))
    }

    pub fn elements(&self) -> &[(S, Type1FuzzySet<S>)] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn primaries(&self) -> impl Iterator<Item = S> + '_ {
        self.elements.iter().map(|e| e.0)
    }

    /// Collapses each grade set to its peak grade. Inverts [`Self::default_lift`].
    pub fn principal(&self) -> Type1FuzzySet<S> {
        Type1FuzzySet {
            elements: self.elements.iter().map(|(v, g)| (*v, g.peak())).collect(),
        }
    }

    pub fn spacings(&self) -> impl Iterator<Item = S> + '_ {
        self.elements.windows(2).map(|w| w[1].0 - w[0].0)
    }

    /// Maps primary values; grade sets ride along and merge on collision.
    pub fn map_unary<E: From<FuzzyError>>(
        &self,
        mut f: impl FnMut(S) -> Result<S, E>,
    ) -> Result<Self, E> {
        let mut pairs = Vec::with_capacity(self.elements.len());
        for (v, g) in &self.elements {
            pairs.push((check_finite(f(*v)?)?, g.clone()));
        }
        Ok(Self::new(pairs)?)
    }

    /// Maps every secondary grade value through `f`.
    pub fn map_grades(&self, f: impl Fn(S) -> S) -> Result<Self, FuzzyError> {
        let mut pairs = Vec::with_capacity(self.elements.len());
        for (v, g) in &self.elements {
            let mapped = Type1FuzzySet::new(g.elements().iter().map(|&(x, m)| (f(x), m)))?;
            pairs.push((*v, mapped));
        }
        Self::new(pairs)
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self
                .elements
                .iter()
                .zip(&other.elements)
                .all(|(a, b)| a.0.approx_eq(b.0) && a.1.approx_eq(&b.1))
    }
}

impl<S: Scalar> fmt::Display for Type2FuzzySet<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&notation::render_type2(self))
    }
}

/// Anything whose truth degrees can be reshaped by a power hedge.
pub trait Hedge<S: Scalar>: Sized {
    fn map_degrees(&self, f: &dyn Fn(S) -> S) -> Result<Self, FuzzyError>;
}

impl<S: Scalar> Hedge<S> for Degree<S> {
    fn map_degrees(&self, f: &dyn Fn(S) -> S) -> Result<Self, FuzzyError> {
        Degree::new(f(self.0))
    }
}

impl<S: Scalar> Hedge<S> for Type1FuzzySet<S> {
    fn map_degrees(&self, f: &dyn Fn(S) -> S) -> Result<Self, FuzzyError> {
        self.map_memberships(f)
    }
}

impl<S: Scalar> Hedge<S> for Type2FuzzySet<S> {
    fn map_degrees(&self, f: &dyn Fn(S) -> S) -> Result<Self, FuzzyError> {
        self.map_grades(f)
    }
}

/// `μ ↦ μ^(1/k)`. Raises every degree below one.
pub fn dilution<S: Scalar, H: Hedge<S>>(x: &H, k: i64) -> Result<H, FuzzyError> {
    if k < 1 {
        return Err(FuzzyError::BadExponent(k));
    }
    if k == 1 {
        return x.map_degrees(&|mu| mu);
    }
    let exp = S::one() / S::of(k as f64);
    x.map_degrees(&|mu| mu.powf(exp))
}

/// `μ ↦ μ^n`. Lowers every degree below one.
pub fn concentration<S: Scalar, H: Hedge<S>>(x: &H, n: i64) -> Result<H, FuzzyError> {
    if n < 1 {
        return Err(FuzzyError::BadExponent(n));
    }
    let n = i32::try_from(n).map_err(|_| FuzzyError::BadExponent(n))?;
    x.map_degrees(&|mu| mu.powi(n))
}
