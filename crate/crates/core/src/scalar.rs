//! Scalar abstraction shared by every numerical module.
//!
//! The solver is written once against [`Real`] and instantiated at `f64` for
//! production use. `f32` compiles for cheap previews, and the quad-precision
//! [`f128`] type backs the series-route oracles whose defining formulas cancel
//! too many digits to be evaluated in double precision.

use std::fmt::Debug;
use std::sync::OnceLock;

use f128::f128;
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

use crate::quadrature::legendre_rule;

/// Number of nodes in the Gauss–Legendre panel rule.
pub const GAUSS_LEGENDRE_ORDER: usize = 32;

/// Floating-point scalar usable throughout the crate.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Send + Sync + 'static
{
    /// Cached `(node, weight)` pairs of the order-32 Gauss–Legendre rule on [-1, 1].
    fn gauss_legendre() -> &'static [(Self, Self)];

    /// Converts an `f64` literal. Every implementor represents all finite `f64`
    /// values (f32 rounds), so this never fails for finite input.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Lossy view as `f64`, for diagnostics and error payloads.
    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! impl_real {
    ($($t:ty),*) => {$(
        impl Real for $t {
            fn gauss_legendre() -> &'static [(Self, Self)] {
                static RULE: OnceLock<Vec<($t, $t)>> = OnceLock::new();
                RULE.get_or_init(|| legendre_rule::<$t>(GAUSS_LEGENDRE_ORDER))
            }
        }
    )*};
}

impl_real!(f32, f64, f128);

/// `Complex::new(0, 1)` for any scalar.
#[inline]
pub(crate) fn imag_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// `Complex::new(x, 0)`.
#[inline]
pub(crate) fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// `sin(pi z)` with the argument reduced by the nearest integer first, so the
/// value keeps full relative accuracy next to the integer zeros.
pub fn sin_pi<T: Real>(z: Complex<T>) -> Complex<T> {
    let n = z.re.round();
    let r = Complex::new(z.re - n, z.im);
    let s = (r * T::PI()).sin();
    let odd = (n / T::lit(2.0)).fract() != T::zero();
    if odd {
        -s
    } else {
        s
    }
}
