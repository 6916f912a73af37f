//! Bound states of the open well.
//!
//! With z = q a e^{|x|/a} the Schrödinger equation becomes the modified Bessel
//! equation of order i k a, and the decaying solution is K_{ika}(z). Even
//! states need dK/dz = 0 at x = 0 and odd states need K = 0 there.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{EnergyGridSpec, WellParams};
use crate::quadrature;
use crate::roots::{polish, sign_changes, Bracket};
use crate::scalar::Real;
use crate::semiclassical::wkb_spectrum;
use crate::specfun::{k_imag_order, k_imag_order_deriv, SERIES_Z_MAX};

/// Default scan step as a fraction of V0.
pub const SCAN_STEP: f64 = 0.05;
/// Offset of the first scan point above the well bottom.
pub const SCAN_START_OFFSET: f64 = 1e-6;
const POLISH_WIDTH: f64 = 1e-8;
const SECANT_STEPS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_level(n: usize) -> Self {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// One bound state. `norm_constant` is zero until [`normalize`] sets it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenstate<T> {
    pub n: usize,
    pub parity: Parity,
    pub energy: T,
    pub k: T,
    pub norm_constant: T,
}

/// K'_{ika}(qa) for even parity, K_{ika}(qa) for odd parity.
pub fn parity_condition<T: Real>(params: &WellParams<T>, energy: T, parity: Parity) -> Result<T> {
    let order = params.k(energy)? * params.a;
    let x = params.q() * params.a;
    match parity {
        Parity::Even => k_imag_order_deriv(order, x),
        Parity::Odd => k_imag_order(order, x),
    }
}

/// Scan grid used when none is given: step 0.05 V0 from just above the well
/// bottom to half a level spacing past the WKB estimate of level n_max + 1.
pub fn default_scan<T: Real>(params: &WellParams<T>, n_max: usize) -> Result<EnergyGridSpec<T>> {
    let wkb = wkb_spectrum(params, n_max + 1)?;
    let top = wkb[n_max + 1].1;
    let below = wkb[n_max].1;
    let stop = top + (top - below) * T::lit(0.5);
    EnergyGridSpec::with_step(
        -params.v0 + T::lit(SCAN_START_OFFSET),
        stop,
        params.v0 * T::lit(SCAN_STEP),
    )
}

/// Roots of both parity conditions on the scan, polished and merged in
/// energy order. Every root found on the scan is returned.
pub fn scan_roots<T: Real>(
    params: &WellParams<T>,
    scan: &EnergyGridSpec<T>,
) -> Result<Vec<(Parity, T)>> {
    let energies = scan.energies();
    let samples: Vec<(T, T)> = energies
        .par_iter()
        .map(|&e| {
            Ok((
                parity_condition(params, e, Parity::Even)?,
                parity_condition(params, e, Parity::Odd)?,
            ))
        })
        .collect::<Result<_>>()?;
    let mut roots = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        let fs: Vec<T> = samples
            .iter()
            .map(|s| if parity == Parity::Even { s.0 } else { s.1 })
            .collect();
        let brackets = sign_changes(&energies, &fs);
        let polished: Vec<T> = brackets
            .into_par_iter()
            .map(|b| polish_root(params, parity, b))
            .collect::<Result<_>>()?;
        roots.extend(polished.into_iter().map(|e| (parity, e)));
    }
    roots.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite roots"));
    Ok(roots)
}

fn polish_root<T: Real>(params: &WellParams<T>, parity: Parity, b: Bracket<T>) -> Result<T> {
    polish(
        |e| parity_condition(params, e, parity),
        b,
        T::lit(POLISH_WIDTH),
        SECANT_STEPS,
    )
}

fn check_interlacing<T: Real>(roots: &[(Parity, T)]) -> Result<()> {
    for (n, (parity, e)) in roots.iter().enumerate() {
        if *parity != Parity::of_level(n) {
            return Err(Error::InterlacingViolated {
                energy: e.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

/// States 0..=n_max from roots found on `scan`.
pub fn solve_spectrum<T: Real>(
    params: &WellParams<T>,
    n_max: usize,
    scan: &EnergyGridSpec<T>,
) -> Result<Vec<Eigenstate<T>>> {
    let roots = scan_roots(params, scan)?;
    check_interlacing(&roots)?;
    if roots.len() < n_max + 1 {
        return Err(Error::TooFewStatesInRange {
            found: roots.len(),
            wanted: n_max + 1,
        });
    }
    roots
        .into_iter()
        .take(n_max + 1)
        .enumerate()
        .map(|(n, (parity, energy))| {
            Ok(Eigenstate {
                n,
                parity,
                energy,
                k: params.k(energy)?,
                norm_constant: T::zero(),
            })
        })
        .collect()
}

/// [`solve_spectrum`] on [`default_scan`], extended until n_max + 2 roots
/// are seen so that interlacing is checked past the last returned state.
pub fn solve_spectrum_default<T: Real>(
    params: &WellParams<T>,
    n_max: usize,
) -> Result<Vec<Eigenstate<T>>> {
    let mut scan = default_scan(params, n_max)?;
    for _ in 0..8 {
        let roots = scan_roots(params, &scan)?;
        if roots.len() >= n_max + 2 {
            return solve_spectrum(params, n_max, &scan);
        }
        let span = scan.stop - scan.start;
        scan = EnergyGridSpec::with_step(scan.start, scan.stop + span, scan.step())?;
    }
    Err(Error::TooFewStatesInRange {
        found: scan_roots(params, &scan)?.len(),
        wanted: n_max + 2,
    })
}

/// Largest |x| at which the Bessel argument q a e^{|x|/a} stays below the
/// validated special-function limit.
pub fn x_cap<T: Real>(params: &WellParams<T>) -> T {
    params.a * (T::lit(SERIES_Z_MAX) / (params.q() * params.a)).ln()
}

fn sgn<T: Real>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else if x < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

fn eigenfunction_unchecked<T: Real>(params: &WellParams<T>, state: &Eigenstate<T>, x: T) -> Result<T> {
    let z = params.q() * params.a * (x.abs() / params.a).exp();
    let scale = if state.norm_constant > T::zero() {
        state.norm_constant
    } else {
        T::one()
    };
    let k = k_imag_order(state.k * params.a, z)? * scale;
    Ok(match state.parity {
        Parity::Even => k,
        Parity::Odd => sgn(x) * k,
    })
}

/// psi(x) = A K_{ika}(q a e^{|x|/a}), times sgn(x) for odd states, with
/// A = norm_constant if set and 1 otherwise.
pub fn eigenfunction<T: Real>(params: &WellParams<T>, state: &Eigenstate<T>, x: T) -> Result<T> {
    let cap = x_cap(params);
    if !(x.abs() <= cap) {
        return Err(Error::ArgumentOutOfSpecfunDomain {
            x: x.to_f64_lossy(),
            x_cap: cap.to_f64_lossy(),
        });
    }
    eigenfunction_unchecked(params, state, x)
}

/// Number of strict sign changes of psi on `grid`; exact zeros are skipped.
pub fn count_nodes<T: Real>(params: &WellParams<T>, state: &Eigenstate<T>, grid: &[T]) -> Result<usize> {
    let values: Vec<T> = grid
        .par_iter()
        .map(|&x| eigenfunction(params, state, x))
        .collect::<Result<_>>()?;
    let mut last = T::zero();
    let mut nodes = 0;
    for v in values {
        if v == T::zero() {
            continue;
        }
        if last != T::zero() && (v < T::zero()) != (last < T::zero()) {
            nodes += 1;
        }
        last = v;
    }
    Ok(nodes)
}

/// Uniform grid over [-x_cap, x_cap].
pub fn node_grid<T: Real>(params: &WellParams<T>, points: usize) -> Vec<T> {
    EnergyGridSpec::new(-x_cap(params), x_cap(params), points)
        .map(|g| g.energies())
        .unwrap_or_default()
}

/// Integral of psi^2 over [-cap, cap] and an upper bound on the part
/// outside, from |K_{iv}(z)| <= K_0(z) <= sqrt(pi/(2z)) e^{-z}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormIntegral<T> {
    pub inside: T,
    pub est_abs_error: T,
    pub tail_bound: T,
}

pub fn norm_integral<T: Real>(params: &WellParams<T>, state: &Eigenstate<T>, cap: T) -> Result<NormIntegral<T>> {
    let bare = Eigenstate {
        norm_constant: T::zero(),
        ..*state
    };
    let r = quadrature::integrate(
        |x: T| {
            let v = eigenfunction_unchecked(params, &bare, x).unwrap_or(T::nan());
            v * v
        },
        T::zero(),
        cap,
        T::lit(1e-13),
    )?;
    let two = T::lit(2.0);
    let z = params.q() * params.a * (cap / params.a).exp();
    // a * int_Z^inf (pi/2z) e^{-2z} dz/z, both sides
    let tail_bound = two * params.a * T::PI() / (T::lit(4.0) * z * z) * (-two * z).exp();
    Ok(NormIntegral {
        inside: two * r.value,
        est_abs_error: two * r.est_abs_error,
        tail_bound,
    })
}

/// Sets `norm_constant` so that the integral of psi^2 is one.
pub fn normalize<T: Real>(params: &WellParams<T>, state: &Eigenstate<T>) -> Result<Eigenstate<T>> {
    normalize_with_cap(params, state, x_cap(params))
}

/// [`normalize`] with the quadrature range set explicitly.
pub fn normalize_with_cap<T: Real>(
    params: &WellParams<T>,
    state: &Eigenstate<T>,
    cap: T,
) -> Result<Eigenstate<T>> {
    let ni = norm_integral(params, state, cap)?;
    if !(ni.inside > T::zero()) || !ni.inside.is_finite() {
        return Err(Error::QuadratureNonConvergence {
            difference: ni.est_abs_error.to_f64_lossy(),
        });
    }
    Ok(Eigenstate {
        norm_constant: ni.inside.sqrt().recip(),
        ..*state
    })
}
