use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar used for values, memberships and degrees.
///
/// Every comparison in the crate goes through [`Scalar::approx_eq`], so the
/// tolerance is a property of the scalar type rather than of the call site.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Absolute tolerance for equality of values, memberships and spacings.
    fn tolerance() -> Self;

    /// Fractional digits worth printing; beyond these is rounding noise.
    fn fraction_digits() -> usize;

    fn approx_eq(self, other: Self) -> bool {
        (self - other).abs() <= Self::tolerance()
    }

    /// Lossy conversion from `f64`; used by parsers and the document loader.
    fn of(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(Self::nan)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn tolerance() -> Self {
        1e-9
    }

    fn fraction_digits() -> usize {
        9
    }
}

// f32 cannot resolve 1e-9 around 1.0; its epsilon is ~1.2e-7.
impl Scalar for f32 {
    fn tolerance() -> Self {
        1e-5
    }

    fn fraction_digits() -> usize {
        6
    }
}

pub(crate) fn in_unit_interval<S: Scalar>(x: S) -> bool {
    x >= S::zero() && x <= S::one()
}
