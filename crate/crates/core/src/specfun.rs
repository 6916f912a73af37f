//! Complex gamma, Bessel J and Hankel functions of complex order, and the
//! modified Bessel function K of purely imaginary order.
//!
//! J is summed from its ascending series, so it is restricted to |z| <= 30.
//! Hankel functions are assembled from J of orders +nu and -nu; at integer
//! orders that combination is 0/0 and is replaced by a Richardson-extrapolated
//! symmetric limit. K of imaginary order comes from its cosine-transform
//! integral, which shares no code with the series route and therefore serves
//! as an independent check of it.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::scalar::{imag_unit, re, sin_pi, Real};

/// Largest |z| accepted by the ascending J series.
pub const SERIES_Z_MAX: f64 = 30.0;
/// Term cap of the ascending J series.
pub const SERIES_MAX_TERMS: usize = 200;
/// Orders closer than this to an integer take the Richardson limit path.
pub const NEAR_INTEGER: f64 = 1e-5;
/// Offsets of the symmetric samples used for the integer-order limit.
pub const RICHARDSON_STEPS: (f64, f64) = (1e-4, 5e-5);
/// The asymptotic expansion replaces the series on the real axis once its
/// relative truncation error is below this many machine epsilons.
pub const ASYMPTOTIC_ULPS: f64 = 4.0;
/// Relative truncation error accepted from the asymptotic expansion when
/// the near-integer limit is inconsistent.
pub const ASYMPTOTIC_FALLBACK: f64 = 1e-10;

/// A special-function value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecFunResult<V, T> {
    pub value: V,
    pub est_abs_error: T,
}

/// Bernoulli numbers B_2..B_34 as exact (numerator, denominator) pairs.
const BERNOULLI: [(f64, f64); 17] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
    (854513.0, 138.0),
    (-236364091.0, 2730.0),
    (8553103.0, 6.0),
    (-23749461029.0, 870.0),
    (8615841276005.0, 14322.0),
    (-7709321041217.0, 510.0),
    (2577687858367.0, 6.0),
];

/// Re(z) is shifted above this before the Stirling series is applied: the
/// smallest w for which the B_34 term falls below machine epsilon (about 7
/// for f64, 24 for quad precision).
fn stirling_shift<T: Real>() -> T {
    let last_coef = T::lit(2577687858367.0 / (6.0 * 34.0 * 33.0));
    (last_coef / T::epsilon())
        .powf(T::lit(1.0 / 33.0))
        .max(T::lit(2.0))
        .ceil()
}

/// ln Gamma(w) by Stirling's series, valid for Re(w) >= stirling_shift().
fn ln_gamma_stirling<T: Real>(w: Complex<T>) -> Complex<T> {
    let half = T::lit(0.5);
    let ln_two_pi = (T::PI() * T::lit(2.0)).ln();
    let mut acc = (w - half) * w.ln() - w + re(half * ln_two_pi);
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut pow = inv;
    for (k, &(num, den)) in BERNOULLI.iter().enumerate() {
        let two_k = T::lit(2.0 * (k + 1) as f64);
        let coef = T::lit(num) / (T::lit(den) * two_k * (two_k - T::one()));
        let term = pow * coef;
        acc = acc + term;
        if term.norm() <= T::epsilon() * acc.norm() {
            break;
        }
        pow = pow * inv2;
    }
    acc
}

/// Gamma(z) for Re(z) >= 1/2: upward shift, Stirling, then divide the shift
/// product back out.
fn gamma_right_half<T: Real>(z: Complex<T>) -> Complex<T> {
    // exact factorials for small positive integers
    if z.im == T::zero() && z.re == z.re.round() && z.re <= T::lit(20.0) {
        let mut f = T::one();
        let mut k = T::lit(2.0);
        while k < z.re {
            f = f * k;
            k = k + T::one();
        }
        return re(f);
    }
    let shift = stirling_shift::<T>();
    let mut w = z;
    let mut prod = re(T::one());
    while w.re < shift {
        prod = prod * w;
        w = w + T::one();
    }
    ln_gamma_stirling(w).exp() / prod
}

fn is_non_positive_integer<T: Real>(z: Complex<T>) -> bool {
    z.im == T::zero() && z.re <= T::zero() && z.re == z.re.round()
}

/// Complex gamma function. Uses the reflection formula for Re(z) < 1/2.
pub fn gamma_complex<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if is_non_positive_integer(z) {
        return Err(Error::PoleAtNonPositiveInteger {
            z: z.re.to_f64_lossy(),
        });
    }
    if z.re >= T::lit(0.5) {
        Ok(gamma_right_half(z))
    } else {
        let one = re(T::one());
        Ok(re(T::PI()) / (sin_pi(z) * gamma_right_half(one - z)))
    }
}

/// 1/Gamma(z); entire, exactly zero at the non-positive integers.
pub fn rgamma_complex<T: Real>(z: Complex<T>) -> Complex<T> {
    if is_non_positive_integer(z) {
        return Complex::new(T::zero(), T::zero());
    }
    if z.re >= T::lit(0.5) {
        gamma_right_half(z).inv()
    } else {
        let one = re(T::one());
        sin_pi(z) * gamma_right_half(one - z) / T::PI()
    }
}

fn check_series_arg<T: Real>(z: Complex<T>) -> Result<()> {
    let r = z.norm();
    if !(r > T::zero()) {
        return Err(Error::InvalidParameter(
            "Bessel argument must be non-zero".into(),
        ));
    }
    if r > T::lit(SERIES_Z_MAX) {
        return Err(Error::ArgumentTooLargeForSeries {
            z: r.to_f64_lossy(),
            limit: SERIES_Z_MAX,
        });
    }
    Ok(())
}

/// J_nu(z) for complex order and complex argument (principal branch of
/// (z/2)^nu), with an error estimate.
pub fn bessel_j_complex_arg_with_error<T: Real>(
    nu: Complex<T>,
    z: Complex<T>,
) -> Result<SpecFunResult<Complex<T>, T>> {
    check_series_arg(z)?;
    // J_{-m} = (-1)^m J_m for integers; the series' leading 1/Gamma vanishes there
    if nu.im == T::zero() && nu.re < T::zero() && nu.re == nu.re.round() {
        let pos = bessel_j_complex_arg_with_error(-nu, z)?;
        let odd = (nu.re / T::lit(2.0)).fract() != T::zero();
        return Ok(SpecFunResult {
            value: if odd { -pos.value } else { pos.value },
            est_abs_error: pos.est_abs_error,
        });
    }
    let half = z * T::lit(0.5);
    let prefactor = (half.ln() * nu).exp() * rgamma_complex(nu + T::one());
    let w = -(half * half);
    let eps = T::epsilon();
    let mut term = re(T::one());
    let mut sum = term;
    let mut abs_sum = T::one();
    let zn = z.norm();
    let mut converged = false;
    for k in 1..=SERIES_MAX_TERMS {
        let kf = T::lit(k as f64);
        term = term * w / ((nu + kf) * kf);
        sum = sum + term;
        let t = term.norm();
        abs_sum = abs_sum + t;
        if t <= eps * sum.norm() && kf > zn * T::lit(0.5) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            what: "ascending Bessel J series",
            terms: SERIES_MAX_TERMS,
        });
    }
    let scale = prefactor.norm();
    let value = prefactor * sum;
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::NonConvergence {
            what: "ascending Bessel J series (overflow)",
            terms: SERIES_MAX_TERMS,
        });
    }
    Ok(SpecFunResult {
        value,
        est_abs_error: scale * (term.norm() + T::lit(4.0) * eps * abs_sum),
    })
}

/// J_nu(z) for complex order and complex argument.
pub fn bessel_j_complex_arg<T: Real>(nu: Complex<T>, z: Complex<T>) -> Result<Complex<T>> {
    bessel_j_complex_arg_with_error(nu, z).map(|r| r.value)
}

/// J_nu(z) for complex order and real positive argument.
pub fn bessel_j<T: Real>(nu: Complex<T>, z: T) -> Result<Complex<T>> {
    bessel_j_with_error(nu, z).map(|r| r.value)
}

/// J_nu(z) with the series truncation/roundoff estimate.
pub fn bessel_j_with_error<T: Real>(nu: Complex<T>, z: T) -> Result<SpecFunResult<Complex<T>, T>> {
    if !(z > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "Bessel argument must be positive, got {}",
            z.to_f64_lossy()
        )));
    }
    bessel_j_complex_arg_with_error(nu, re(z))
}

/// Hankel values with a relative error estimate, the larger of the two.
type HankelEstimate<T> = (Complex<T>, Complex<T>, T);

/// Hankel pair from the J_{+nu}, J_{-nu} combination; singular at integer nu.
/// The error estimate carries the series error through the division by
/// sin(pi nu).
fn hankel_direct<T: Real>(nu: Complex<T>, z: Complex<T>) -> Result<HankelEstimate<T>> {
    let jp = bessel_j_complex_arg_with_error(nu, z)?;
    let jm = bessel_j_complex_arg_with_error(-nu, z)?;
    let i = imag_unit::<T>();
    let i_pi_nu = i * nu * T::PI();
    let denom = i * sin_pi(nu);
    let (down, up) = ((-i_pi_nu).exp(), i_pi_nu.exp());
    let h1 = (jm.value - down * jp.value) / denom;
    let h2 = (up * jp.value - jm.value) / denom;
    let e1 = (jm.est_abs_error + down.norm() * jp.est_abs_error) / denom.norm();
    let e2 = (jm.est_abs_error + up.norm() * jp.est_abs_error) / denom.norm();
    Ok((h1, h2, (e1 / h1.norm()).max(e2 / h2.norm())))
}

fn near_integer<T: Real>(nu: Complex<T>) -> bool {
    let n = nu.re.round();
    Complex::new(nu.re - n, nu.im).norm() < T::lit(NEAR_INTEGER)
}

/// Symmetric average of the direct formula at nu +- delta, Richardson
/// extrapolated over the two offsets to remove the O(delta^2) bias.
fn hankel_limit<T: Real>(nu: Complex<T>, z: Complex<T>) -> Result<HankelEstimate<T>> {
    let sym = |d: T| -> Result<HankelEstimate<T>> {
        let (a1, a2, ea) = hankel_direct(nu + d, z)?;
        let (b1, b2, eb) = hankel_direct(nu - d, z)?;
        let h = T::lit(0.5);
        Ok(((a1 + b1) * h, (a2 + b2) * h, ea.max(eb)))
    };
    let (d1, d2) = RICHARDSON_STEPS;
    let (c1, c2, _) = sym(T::lit(d1))?;
    let (f1, f2, ef) = sym(T::lit(d2))?;
    let ratio = T::lit((d1 / d2) * (d1 / d2));
    let denom = ratio - T::one();
    let h1 = (f1 * ratio - c1) / denom;
    let h2 = (f2 * ratio - c2) / denom;
    let spread = (c1 - f1).norm() / (f1.norm() + T::min_positive_value())
        + (c2 - f2).norm() / (f2.norm() + T::min_positive_value());
    if !(spread <= T::lit(1e-6)) {
        return Err(Error::NearIntegerOrderLimitFailed {
            nu_re: nu.re.to_f64_lossy(),
            nu_im: nu.im.to_f64_lossy(),
        });
    }
    Ok((h1, h2, ef * (ratio + T::one()) / denom))
}

/// (H1_nu(z), H2_nu(z)) for complex order and complex argument |z| <= 30.
/// On the positive real axis the large-argument expansion is used whenever
/// its truncation error estimate beats the series route.
pub fn hankel_pair_complex_arg<T: Real>(
    nu: Complex<T>,
    z: Complex<T>,
) -> Result<(Complex<T>, Complex<T>)> {
    let asymptotic = (z.im == T::zero() && z.re > T::zero()).then(|| hankel_asymptotic_with_error(nu, z.re));
    if let Some((h1, h2, rel)) = asymptotic {
        if rel <= T::lit(ASYMPTOTIC_ULPS) * T::epsilon() {
            return Ok((h1, h2));
        }
    }
    let series = if near_integer(nu) {
        hankel_limit(nu, z)
    } else {
        hankel_direct(nu, z)
    };
    match (series, asymptotic) {
        (Ok((s1, s2, es)), Some((a1, a2, ea))) => Ok(if ea < es { (a1, a2) } else { (s1, s2) }),
        (Ok((s1, s2, _)), None) => Ok((s1, s2)),
        (Err(Error::NearIntegerOrderLimitFailed { .. }), Some((a1, a2, ea))) if ea <= T::lit(ASYMPTOTIC_FALLBACK) => {
            Ok((a1, a2))
        }
        (Err(e), _) => Err(e),
    }
}

/// (H1_nu(z), H2_nu(z)) for complex order and real positive argument.
pub fn hankel_pair<T: Real>(nu: Complex<T>, z: T) -> Result<(Complex<T>, Complex<T>)> {
    if !(z > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "Hankel argument must be positive, got {}",
            z.to_f64_lossy()
        )));
    }
    hankel_pair_complex_arg(nu, re(z))
}

/// Derivatives with respect to z via H'_nu = H_{nu-1} - (nu/z) H_nu.
pub fn hankel_deriv_pair_complex_arg<T: Real>(
    nu: Complex<T>,
    z: Complex<T>,
) -> Result<(Complex<T>, Complex<T>)> {
    let (h1, h2) = hankel_pair_complex_arg(nu, z)?;
    let (l1, l2) = hankel_pair_complex_arg(nu - T::one(), z)?;
    let r = nu / z;
    Ok((l1 - r * h1, l2 - r * h2))
}

/// (H1'_nu(z), H2'_nu(z)) for real positive argument.
pub fn hankel_deriv_pair<T: Real>(nu: Complex<T>, z: T) -> Result<(Complex<T>, Complex<T>)> {
    if !(z > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "Hankel argument must be positive, got {}",
            z.to_f64_lossy()
        )));
    }
    hankel_deriv_pair_complex_arg(nu, re(z))
}

/// Both Hankel functions of one order together with their z-derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HankelValues<T> {
    pub h1: Complex<T>,
    pub h2: Complex<T>,
    pub h1p: Complex<T>,
    pub h2p: Complex<T>,
}

/// Values and derivatives sharing the order nu-1 evaluation.
pub fn hankel_values<T: Real>(nu: Complex<T>, z: Complex<T>) -> Result<HankelValues<T>> {
    let (h1, h2) = hankel_pair_complex_arg(nu, z)?;
    let (l1, l2) = hankel_pair_complex_arg(nu - T::one(), z)?;
    let r = nu / z;
    Ok(HankelValues {
        h1,
        h2,
        h1p: l1 - r * h1,
        h2p: l2 - r * h2,
    })
}

/// Large-argument Hankel expansion, for arguments past the series limit:
/// H1,2 ~ sqrt(2/(pi z)) exp(+-i(z - nu pi/2 - pi/4)) sum (+-i)^k a_k(nu) / z^k.
/// Summation stops at the smallest term.
pub fn hankel_asymptotic<T: Real>(nu: Complex<T>, z: T) -> (Complex<T>, Complex<T>) {
    let (h1, h2, _) = hankel_asymptotic_with_error(nu, z);
    (h1, h2)
}

/// [`hankel_asymptotic`] together with the first omitted term relative to
/// the smaller partial sum, as a relative error estimate.
pub fn hankel_asymptotic_with_error<T: Real>(nu: Complex<T>, z: T) -> (Complex<T>, Complex<T>, T) {
    let i = imag_unit::<T>();
    let mu = nu * nu * T::lit(4.0);
    let mut a = re(T::one());
    let mut s1 = a;
    let mut s2 = a;
    let mut last = T::infinity();
    let mut omitted = T::infinity();
    for k in 1..60 {
        let kf = T::lit(k as f64);
        let odd = T::lit((2 * k - 1) as f64);
        a = a * (mu - odd * odd) / (kf * T::lit(8.0) * z);
        let mag = a.norm();
        if mag >= last || mag <= T::epsilon() {
            omitted = mag.min(last);
            break;
        }
        last = mag;
        let ik = i.powi(k);
        s1 = s1 + ik * a;
        s2 = s2 + ik.conj() * a;
    }
    let amp = (T::lit(2.0) / (T::PI() * z)).sqrt();
    let phase = re(z) - nu * (T::PI() * T::lit(0.5)) - re(T::PI() * T::lit(0.25));
    let h1 = (i * phase).exp() * s1 * amp;
    let h2 = (-(i * phase)).exp() * s2 * amp;
    (h1, h2, omitted / s1.norm().min(s2.norm()))
}

/// Upper limit of the K integral: exp(-x cosh t) has dropped by ln(1/eps)
/// plus a fixed guard of 40 e-folds, relative to its value at t = 0 for small
/// x and in absolute terms for large x.
fn k_integral_cutoff<T: Real>(x: T) -> T {
    let l = (T::one() / T::epsilon()).ln();
    let c = (l / x).max(T::one()) + T::lit(40.0) / x;
    c.acosh()
}

fn check_k_args<T: Real>(x: T) -> Result<()> {
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "K argument must be positive and finite, got {}",
            x.to_f64_lossy()
        )));
    }
    Ok(())
}

const K_ABS_TOL: f64 = 1e-12;

/// K_{i nu}(x) = int_0^inf exp(-x cosh t) cos(nu t) dt, with error estimate.
pub fn k_imag_order_with_error<T: Real>(nu_im: T, x: T) -> Result<SpecFunResult<T, T>> {
    check_k_args(x)?;
    let nu = nu_im.abs();
    let r = quadrature::integrate(
        |t: T| (-x * t.cosh()).exp() * (nu * t).cos(),
        T::zero(),
        k_integral_cutoff(x),
        T::lit(K_ABS_TOL),
    )?;
    Ok(SpecFunResult {
        value: r.value,
        est_abs_error: r.est_abs_error,
    })
}

/// K_{i nu}(x) for real nu and x > 0.
pub fn k_imag_order<T: Real>(nu_im: T, x: T) -> Result<T> {
    k_imag_order_with_error(nu_im, x).map(|r| r.value)
}

/// dK_{i nu}(x)/dx = -int_0^inf exp(-x cosh t) cosh t cos(nu t) dt.
pub fn k_imag_order_deriv_with_error<T: Real>(nu_im: T, x: T) -> Result<SpecFunResult<T, T>> {
    check_k_args(x)?;
    let nu = nu_im.abs();
    let r = quadrature::integrate(
        |t: T| {
            let c = t.cosh();
            -(-x * c).exp() * c * (nu * t).cos()
        },
        T::zero(),
        k_integral_cutoff(x),
        T::lit(K_ABS_TOL),
    )?;
    Ok(SpecFunResult {
        value: r.value,
        est_abs_error: r.est_abs_error,
    })
}

/// dK_{i nu}(x)/dx for real nu and x > 0.
pub fn k_imag_order_deriv<T: Real>(nu_im: T, x: T) -> Result<T> {
    k_imag_order_deriv_with_error(nu_im, x).map(|r| r.value)
}
