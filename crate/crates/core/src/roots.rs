//! Sign-change scanning and bracketed root polishing.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A bracket `[lo, hi]` on which `f` changes sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket<T> {
    pub lo: T,
    pub hi: T,
    pub f_lo: T,
    pub f_hi: T,
}

/// Brackets of strict sign changes between consecutive samples.
pub fn sign_changes<T: Real>(xs: &[T], fs: &[T]) -> Vec<Bracket<T>> {
    xs.windows(2)
        .zip(fs.windows(2))
        .filter(|(_, f)| f[0] * f[1] < T::zero() || (f[1] == T::zero() && f[0] != T::zero()))
        .map(|(x, f)| Bracket {
            lo: x[0],
            hi: x[1],
            f_lo: f[0],
            f_hi: f[1],
        })
        .collect()
}

/// Bisects until the bracket is narrower than `width`, then takes
/// `secant_steps` secant steps that are kept inside the bracket.
pub fn polish<T: Real, F>(f: F, bracket: Bracket<T>, width: T, secant_steps: usize) -> Result<T>
where
    F: Fn(T) -> Result<T>,
{
    let Bracket {
        mut lo,
        mut hi,
        mut f_lo,
        mut f_hi,
    } = bracket;
    if f_lo == T::zero() {
        return Ok(lo);
    }
    if f_hi == T::zero() {
        return Ok(hi);
    }
    if f_lo * f_hi > T::zero() || !(lo < hi) {
        return Err(Error::BracketingFailed {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
        });
    }
    let half = T::lit(0.5);
    for _ in 0..400 {
        if hi - lo <= width {
            break;
        }
        let mid = lo + (hi - lo) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == T::zero() {
            return Ok(mid);
        }
        if (fm < T::zero()) == (f_lo < T::zero()) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }
    let mut best = if f_lo.abs() < f_hi.abs() { lo } else { hi };
    for _ in 0..secant_steps {
        let denom = f_hi - f_lo;
        if denom == T::zero() {
            break;
        }
        let x = hi - f_hi * (hi - lo) / denom;
        if !(x > lo && x < hi) {
            break;
        }
        let fx = f(x)?;
        best = x;
        if fx == T::zero() {
            break;
        }
        if (fx < T::zero()) == (f_lo < T::zero()) {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
    }
    Ok(best)
}

/// Bisection to an absolute width, returning the midpoint of the final bracket.
pub fn bisect<T: Real, F>(f: F, bracket: Bracket<T>, width: T) -> Result<T>
where
    F: Fn(T) -> Result<T>,
{
    let Bracket {
        mut lo,
        mut hi,
        mut f_lo,
        f_hi,
    } = bracket;
    if f_lo * f_hi > T::zero() || !(lo < hi) {
        return Err(Error::BracketingFailed {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
        });
    }
    let half = T::lit(0.5);
    while hi - lo > width {
        let mid = lo + (hi - lo) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == T::zero() {
            return Ok(mid);
        }
        if (fm < T::zero()) == (f_lo < T::zero()) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) * half)
}

/// Doubles `hi` (starting from `lo + step`) until `f(hi)` has the opposite
/// sign of `f(lo)`.
pub fn expand_upward<T: Real, F>(f: &F, lo: T, step: T, max_doublings: usize) -> Result<Bracket<T>>
where
    F: Fn(T) -> Result<T>,
{
    let f_lo = f(lo)?;
    let mut width = step;
    for _ in 0..max_doublings {
        let hi = lo + width;
        let f_hi = f(hi)?;
        if f_lo * f_hi <= T::zero() {
            return Ok(Bracket { lo, hi, f_lo, f_hi });
        }
        width = width * T::lit(2.0);
    }
    Err(Error::BracketingFailed {
        lo: lo.to_f64_lossy(),
        hi: (lo + width).to_f64_lossy(),
    })
}
