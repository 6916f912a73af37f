//! Scattering off the bottomless barrier, and the poles of the same
//! amplitudes after continuing the barrier into the well.
//!
//! For incidence from the left the wave function is
//!
//! ```text
//! x < 0:  A H2_{ipa}(sa e^{-x/a}) + B H1_{-ipa}(sa e^{-x/a})
//! x > 0:  C H1_{ipa}(sa e^{x/a})
//! ```
//!
//! and A, B, C follow from continuity of psi and psi' at x = 0.

use num_complex::Complex;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::bound::default_scan;
use crate::error::{Error, Result};
use crate::model::{BarrierParams, EnergyGridSpec, ExponentialPotential, WellParams};
use crate::roots::{bisect, polish, sign_changes, Bracket};
use crate::scalar::{imag_unit, re, Real};
use crate::specfun::{hankel_values, HankelValues};
use crate::table::{Column, CurveTable};

/// Scan step for the crossover search.
pub const CROSSOVER_SCAN_STEP: f64 = 0.05;
const CROSSOVER_WIDTH: f64 = 1e-8;
/// Both pole factors below this count as a tie.
pub const DEGENERATE_POLE: f64 = 1e-12;

/// Amplitudes of the incident (A), reflected (B) and transmitted (C) waves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchCoefficients<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
}

/// One energy sample of the scattering solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterPoint<T> {
    pub energy: T,
    pub p: Complex<T>,
    /// B/A
    pub r_amp: Complex<T>,
    /// C/A
    pub t_ratio: Complex<T>,
    pub reflection: T,
    pub transmission: T,
}

impl<T: Real> ScatterPoint<T> {
    pub fn unitarity_defect(&self) -> T {
        (self.reflection + self.transmission - T::one()).abs()
    }

    pub fn to_json(&self) -> Value {
        let c = |z: Complex<T>| json!([z.re.to_f64_lossy(), z.im.to_f64_lossy()]);
        json!({
            "E": self.energy.to_f64_lossy(),
            "p": c(self.p),
            "r_amp": c(self.r_amp),
            "t_ratio": c(self.t_ratio),
            "R": self.reflection.to_f64_lossy(),
            "T": self.transmission.to_f64_lossy(),
        })
    }
}

struct Matching<T> {
    p: Complex<T>,
    z: T,
    plus: HankelValues<T>,
}

fn matching_values<T: Real>(params: &BarrierParams<T>, energy: T) -> Result<Matching<T>> {
    let wn = params.wavenumbers(energy)?;
    let z = wn.lambda;
    Ok(Matching {
        p: wn.k_or_p,
        z,
        plus: hankel_values(wn.order, re(z))?,
    })
}

/// e^{pi p a} as a complex exponential, valid on both branches of p.
fn growth<T: Real>(p: Complex<T>, a: T) -> Complex<T> {
    (p * (T::PI() * a)).exp()
}

/// Closed-form A, B, C at z = s a. The overall normalisation is fixed by
/// A = -2 H1_{-ipa} H1'_{ipa}, the sign for which B/A and C/A coincide with
/// the amplitude ratios of [`rt_probabilities`] and with the matching system.
pub fn coefficients_abc<T: Real>(params: &BarrierParams<T>, energy: T) -> Result<MatchCoefficients<T>> {
    let m = matching_values(params, energy)?;
    let wn = params.wavenumbers(energy)?;
    let minus = hankel_values(-wn.order, re(m.z))?;
    let h = m.plus;
    Ok(MatchCoefficients {
        a: -(minus.h1 * h.h1p) * T::lit(2.0),
        b: h.h1p * h.h2 + h.h1 * h.h2p,
        c: minus.h1 * h.h2p - minus.h1p * h.h2,
    })
}

fn amplitude_ratios<T: Real>(p: Complex<T>, a: T, z: Complex<T>, h: &HankelValues<T>) -> Result<(Complex<T>, Complex<T>)> {
    let denom = h.h1 * h.h1p;
    if denom.norm() == T::zero() || !denom.norm().is_finite() {
        return Err(Error::PoleEncountered {
            energy: f64::NAN,
        });
    }
    let half = T::lit(0.5);
    let r_amp = -(growth(p, a) * (h.h2 / h.h1 + h.h2p / h.h1p)) * half;
    let t_ratio = imag_unit::<T>() * T::lit(2.0) / (z * T::PI()) / denom;
    Ok((r_amp, t_ratio))
}

fn probabilities<T: Real>(p: Complex<T>, a: T, r_amp: Complex<T>, t_ratio: Complex<T>) -> (T, T) {
    (r_amp.norm_sqr(), (growth(p, a) * t_ratio).norm_sqr())
}

/// R = |B/A|^2 and T = |e^{pi p a} C/A|^2 from the amplitude ratios
/// B/A = -e^{pi p a}/2 [H2/H1 + H2'/H1'], C/A = (2i/(pi s a)) / (H1 H1').
pub fn rt_probabilities<T: Real>(params: &BarrierParams<T>, energy: T) -> Result<ScatterPoint<T>> {
    let m = matching_values(params, energy)?;
    let (r_amp, t_ratio) = amplitude_ratios(m.p, params.a, re(m.z), &m.plus).map_err(|_| {
        Error::PoleEncountered {
            energy: energy.to_f64_lossy(),
        }
    })?;
    let (reflection, transmission) = probabilities(m.p, params.a, r_amp, t_ratio);
    Ok(ScatterPoint {
        energy,
        p: m.p,
        r_amp,
        t_ratio,
        reflection,
        transmission,
    })
}

/// R and T computed from closed-form coefficients instead of the ratios.
pub fn rt_from_coefficients<T: Real>(
    params: &BarrierParams<T>,
    energy: T,
    coeffs: &MatchCoefficients<T>,
) -> Result<(T, T)> {
    if coeffs.a.norm() == T::zero() {
        return Err(Error::PoleEncountered {
            energy: energy.to_f64_lossy(),
        });
    }
    let p = params.p(energy);
    Ok(probabilities(p, params.a, coeffs.b / coeffs.a, coeffs.c / coeffs.a))
}

/// Signed probability currents of the incident, reflected and transmitted
/// waves, in units with hbar = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Currents<T> {
    pub incident: T,
    pub reflected: T,
    pub transmitted: T,
}

/// Asymptotic currents: J0 |A|^2, -J0 |B|^2, J0 |C|^2 below U0, with the extra
/// factors e^{-pi p a} on the left and e^{+pi p a} on the right above it.
/// J0 = 2 hbar/(mu a pi).
pub fn current_densities<T: Real>(
    params: &BarrierParams<T>,
    energy: T,
    coeffs: &MatchCoefficients<T>,
) -> Currents<T> {
    let mu = params.two_mu_over_hbar2 / T::lit(2.0);
    let j0 = T::lit(2.0) / (mu * params.a * T::PI());
    let (left, right) = if energy < params.u0 {
        (T::one(), T::one())
    } else {
        let p = (params.two_mu_over_hbar2 * (energy - params.u0)).sqrt();
        let e = (T::PI() * p * params.a).exp();
        (e.recip(), e)
    };
    Currents {
        incident: j0 * left * coeffs.a.norm_sqr(),
        reflected: -j0 * left * coeffs.b.norm_sqr(),
        transmitted: j0 * right * coeffs.c.norm_sqr(),
    }
}

/// R and T on a grid. Points that fail are kept as NaN rows and listed in
/// the `invalid_points` metadata entry.
pub fn sweep<T: Real>(params: &BarrierParams<T>, grid: &EnergyGridSpec<T>) -> CurveTable {
    let energies = grid.energies();
    let points: Vec<Result<ScatterPoint<T>>> =
        energies.par_iter().map(|&e| rt_probabilities(params, e)).collect();
    let mut table = CurveTable::new(vec![
        Column::new("E", "energy"),
        Column::new("R", "1"),
        Column::new("T", "1"),
        Column::new("unitarity_defect", "1"),
    ]);
    let mut max_defect = 0.0f64;
    let mut invalid = Vec::new();
    let mut records = Vec::new();
    for (e, p) in energies.iter().zip(points) {
        let e = e.to_f64_lossy();
        match p {
            Ok(pt) => {
                let d = pt.unitarity_defect().to_f64_lossy();
                max_defect = max_defect.max(d);
                table
                    .push_row(vec![
                        e,
                        pt.reflection.to_f64_lossy(),
                        pt.transmission.to_f64_lossy(),
                        d,
                    ])
                    .expect("four columns");
                records.push(pt.to_json());
            }
            Err(err) => {
                table
                    .push_row(vec![e, f64::NAN, f64::NAN, f64::NAN])
                    .expect("four columns");
                invalid.push(json!({ "E": e, "error": err.to_string() }));
                records.push(Value::Null);
            }
        }
    }
    table.set_meta("potential", "barrier");
    table.set_meta(
        "params",
        json!({
            "u0": params.u0.to_f64_lossy(),
            "a": params.a.to_f64_lossy(),
            "two_mu_over_hbar2": params.two_mu_over_hbar2.to_f64_lossy(),
        }),
    );
    table.set_meta(
        "grid",
        json!({
            "start": grid.start.to_f64_lossy(),
            "stop": grid.stop.to_f64_lossy(),
            "points": grid.points,
        }),
    );
    table.set_meta("max_unitarity_defect", max_defect);
    table.set_meta("invalid_points", Value::Array(invalid));
    table.records = Some(Value::Array(records));
    table
}

/// Energy in [lo, hi] where R = 1/2: the first sign change of R - 1/2 on a
/// 0.05 grid, bisected to 1e-8.
pub fn find_crossover<T: Real>(params: &BarrierParams<T>, lo: T, hi: T) -> Result<T> {
    let grid = EnergyGridSpec::with_step(lo, hi, T::lit(CROSSOVER_SCAN_STEP))?;
    let xs = grid.energies();
    let half = T::lit(0.5);
    let f = |e: T| Ok(rt_probabilities(params, e)?.reflection - half);
    let fs: Vec<T> = xs.par_iter().map(|&e| f(e)).collect::<Result<_>>()?;
    let bracket = sign_changes(&xs, &fs)
        .into_iter()
        .next()
        .ok_or(Error::NoSignChange {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
        })?;
    bisect(f, bracket, T::lit(CROSSOVER_WIDTH))
}

/// Length a in (a_lo, a_hi) at which the crossover sits at the barrier top,
/// found by bisection on a of E_c(a). Returns (a, E_c(a)).
pub fn barrier_top_length<T: Real>(
    u0: T,
    a_lo: T,
    a_hi: T,
    search: (T, T),
    two_mu_over_hbar2: T,
) -> Result<(T, T)> {
    let ec = |a: T| -> Result<T> {
        let p = BarrierParams::with_units(u0, a, two_mu_over_hbar2)?;
        find_crossover(&p, search.0, search.1)
    };
    let b = Bracket {
        lo: a_lo,
        hi: a_hi,
        f_lo: ec(a_lo)?,
        f_hi: ec(a_hi)?,
    };
    if b.f_lo * b.f_hi > T::zero() {
        return Err(Error::NoSignChange {
            lo: a_lo.to_f64_lossy(),
            hi: a_hi.to_f64_lossy(),
        });
    }
    let a = bisect(ec, b, T::lit(1e-9))?;
    Ok((a, ec(a)?))
}

/// Which factor of the common denominator vanishes at a pole.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum PoleKind {
    /// K_{ika}(qa) = 0, an odd bound state.
    KZero,
    /// K'_{ika}(qa) = 0, an even bound state.
    KPrimeZero,
    /// Both factors below the tie threshold.
    Degenerate,
}

impl PoleKind {
    pub fn label(self) -> &'static str {
        match self {
            PoleKind::KZero => "K-zero",
            PoleKind::KPrimeZero => "K'-zero",
            PoleKind::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole<T> {
    pub energy: T,
    pub kind: PoleKind,
    pub k_factor: T,
    pub k_prime_factor: T,
}

/// Hankel values of the barrier problem with U0 -> -V0, i.e. p -> k and the
/// argument s a -> i q a.
fn continued_values<T: Real>(params: &WellParams<T>, energy: T) -> Result<(Complex<T>, Complex<T>, HankelValues<T>)> {
    let p = re(params.k(energy)?);
    let order = imag_unit::<T>() * p * params.a;
    let z = imag_unit::<T>() * (params.q() * params.a);
    Ok((p, z, hankel_values(order, z)?))
}

/// The two factors of the continued denominator H1(iqa) H1'(iqa), rescaled
/// by K_nu(x) = (pi i/2) e^{i pi nu/2} H1_nu(ix) into K_{ika}(qa) and
/// K'_{ika}(qa). Both are real; the real parts are returned.
pub fn continued_factors<T: Real>(params: &WellParams<T>, energy: T) -> Result<(T, T)> {
    let (p, _, h) = continued_values(params, energy)?;
    let i = imag_unit::<T>();
    let order = i * p * params.a;
    let pref = i * (T::PI() * T::lit(0.5)) * (i * order * (T::PI() * T::lit(0.5))).exp();
    Ok(((pref * h.h1).re, (pref * i * h.h1p).re))
}

/// R and T of the continued problem; their poles are the bound states.
pub fn continued_rt<T: Real>(params: &WellParams<T>, energy: T) -> Result<ScatterPoint<T>> {
    let (p, z, h) = continued_values(params, energy)?;
    let (r_amp, t_ratio) = amplitude_ratios(p, params.a, z, &h).map_err(|_| Error::PoleEncountered {
        energy: energy.to_f64_lossy(),
    })?;
    let (reflection, transmission) = probabilities(p, params.a, r_amp, t_ratio);
    Ok(ScatterPoint {
        energy,
        p,
        r_amp,
        t_ratio,
        reflection,
        transmission,
    })
}

/// The lowest n_max + 1 poles of the continued amplitudes, each attributed to
/// the factor with the smaller magnitude at the root.
pub fn pole_locate<T: Real>(params: &WellParams<T>, n_max: usize) -> Result<Vec<Pole<T>>> {
    let mut scan = default_scan(params, n_max)?;
    for _ in 0..8 {
        let poles = scan_poles(params, &scan)?;
        if poles.len() > n_max {
            return Ok(poles.into_iter().take(n_max + 1).collect());
        }
        let span = scan.stop - scan.start;
        scan = EnergyGridSpec::with_step(scan.start, scan.stop + span, scan.step())?;
    }
    Err(Error::BracketingFailed {
        lo: scan.start.to_f64_lossy(),
        hi: scan.stop.to_f64_lossy(),
    })
}

fn scan_poles<T: Real>(params: &WellParams<T>, scan: &EnergyGridSpec<T>) -> Result<Vec<Pole<T>>> {
    let xs = scan.energies();
    let samples: Vec<(T, T)> = xs
        .par_iter()
        .map(|&e| continued_factors(params, e))
        .collect::<Result<_>>()?;
    let mut roots = Vec::new();
    for which in [0usize, 1] {
        let fs: Vec<T> = samples.iter().map(|s| if which == 0 { s.0 } else { s.1 }).collect();
        for b in sign_changes(&xs, &fs) {
            let f = |e: T| {
                let v = continued_factors(params, e)?;
                Ok(if which == 0 { v.0 } else { v.1 })
            };
            roots.push(polish(f, b, T::lit(1e-8), 3)?);
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite poles"));
    roots
        .into_iter()
        .map(|energy| {
            let (kf, kpf) = continued_factors(params, energy)?;
            let tie = T::lit(DEGENERATE_POLE);
            let kind = if kf.abs() < tie && kpf.abs() < tie {
                PoleKind::Degenerate
            } else if kf.abs() < kpf.abs() {
                PoleKind::KZero
            } else {
                PoleKind::KPrimeZero
            };
            Ok(Pole {
                energy,
                kind,
                k_factor: kf,
                k_prime_factor: kpf,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::{parity_condition, Parity};

    fn barrier(u0: f64, a: f64) -> BarrierParams<f64> {
        BarrierParams::new(u0, a).unwrap()
    }

    #[test]
    fn unitarity_on_both_branches() {
        let b = barrier(5.0, 1.0);
        for e in [-10.0, -3.0, 0.0, 3.0, 4.999, 5.0, 5.001, 8.0, 10.0] {
            let pt = rt_probabilities(&b, e).unwrap();
            assert!(pt.unitarity_defect() < 1e-8, "E={e}: {pt:?}");
        }
    }

    #[test]
    fn reference_probabilities() {
        let b = barrier(5.0, 1.0);
        let lo = rt_probabilities(&b, -3.0).unwrap();
        assert!((lo.reflection - 0.7402).abs() < 1e-4);
        let hi = rt_probabilities(&b, 8.0).unwrap();
        assert!((hi.reflection - 0.01326).abs() < 1e-5);
    }

    #[test]
    fn ratio_formula_matches_coefficients() {
        let b = barrier(5.0, 1.0);
        for e in [-7.0, -3.0, 0.5, 3.0, 8.0] {
            let pt = rt_probabilities(&b, e).unwrap();
            let c = coefficients_abc(&b, e).unwrap();
            let rb = c.b / c.a;
            let tc = c.c / c.a;
            assert!((rb - pt.r_amp).norm() <= 1e-10 * pt.r_amp.norm().max(1e-300), "E={e}");
            assert!((tc - pt.t_ratio).norm() <= 1e-10 * pt.t_ratio.norm(), "E={e}");
            let (r, t) = rt_from_coefficients(&b, e, &c).unwrap();
            assert!((r - pt.reflection).abs() < 1e-10);
            assert!((t - pt.transmission).abs() < 1e-10);
        }
    }

    #[test]
    fn coefficient_a_is_continuous_at_u0() {
        let b = barrier(5.0, 1.0);
        let lo = coefficients_abc(&b, 5.0 - 1e-4).unwrap().a;
        let hi = coefficients_abc(&b, 5.0 + 1e-4).unwrap().a;
        assert!((lo - hi).norm() <= 1e-3 * lo.norm());
    }

    #[test]
    fn currents_conserve_flux() {
        let b = barrier(5.0, 1.0);
        for e in [-3.0, 8.0] {
            let c = coefficients_abc(&b, e).unwrap();
            let j = current_densities(&b, e, &c);
            let pt = rt_probabilities(&b, e).unwrap();
            assert!((j.incident + j.reflected - j.transmitted).abs() <= 1e-10 * j.incident.abs());
            assert!(((j.reflected / j.incident).abs() - pt.reflection).abs() <= 1e-10);
            assert!(((j.transmitted / j.incident).abs() - pt.transmission).abs() <= 1e-10);
        }
    }

    #[test]
    fn crossovers() {
        let ec1 = find_crossover(&barrier(5.0, 1.0), -5.0, 5.0).unwrap();
        assert!((ec1 + 1.1487).abs() < 1e-3, "{ec1}");
        let ec2 = find_crossover(&barrier(5.0, 0.2), -5.0, 5.0).unwrap();
        assert!((ec2 - 0.4886).abs() < 1e-3, "{ec2}");
        let pt = rt_probabilities(&barrier(5.0, 1.0), ec1).unwrap();
        assert!((pt.reflection - 0.5).abs() < 1e-6);
        assert!(matches!(
            find_crossover(&barrier(5.0, 1.0), 2.0, 5.0),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn sweep_records_every_point() {
        let g = EnergyGridSpec::new(-10.0, 10.0, 41).unwrap();
        let t = sweep(&barrier(1.0, 1.0), &g);
        assert_eq!(t.rows.len(), 41);
        assert_eq!(t.columns.len(), 4);
        assert!(t.metadata["max_unitarity_defect"].as_f64().unwrap() < 1e-8);
        assert_eq!(t.metadata["invalid_points"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn continued_factors_are_the_bound_conditions() {
        let w = WellParams::<f64>::new(1.0, 1.0).unwrap();
        for e in [0.0, 2.0, 9.0] {
            let (k, kp) = continued_factors(&w, e).unwrap();
            let odd = parity_condition(&w, e, Parity::Odd).unwrap();
            let even = parity_condition(&w, e, Parity::Even).unwrap();
            assert!((k - odd).abs() < 1e-10, "E={e}: {k} vs {odd}");
            assert!((kp - even).abs() < 1e-10, "E={e}: {kp} vs {even}");
        }
    }

    #[test]
    fn poles_alternate_and_spike() {
        let w = WellParams::<f64>::new(1.0, 1.0).unwrap();
        let poles = pole_locate(&w, 3).unwrap();
        let kinds: Vec<PoleKind> = poles.iter().map(|p| p.kind).collect();
        assert_eq!(
            kinds,
            vec![PoleKind::KPrimeZero, PoleKind::KZero, PoleKind::KPrimeZero, PoleKind::KZero]
        );
        for p in &poles {
            for d in [-1e-4, 1e-4] {
                assert!(continued_rt(&w, p.energy + d).unwrap().reflection > 1e3);
            }
        }
    }

    fn barrier_for(case: usize) -> BarrierParams<f64> {
        [barrier(5.0, 1.0), barrier(5.0, 0.2), barrier(1.0, 1.0)][case]
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(100))]

        #[test]
        fn ratio_and_coefficient_routes_agree(case in 0usize..3, frac in 0.0f64..1.0, above in proptest::bool::ANY) {
            let b = barrier_for(case);
            let e = if above { b.u0 + 1e-3 + 10.0 * frac } else { b.u0 - 1e-3 - 15.0 * frac };
            let pt = rt_probabilities(&b, e).unwrap();
            let (r, t) = rt_from_coefficients(&b, e, &coefficients_abc(&b, e).unwrap()).unwrap();
            proptest::prop_assert!((pt.reflection - r).abs() <= 1e-10, "E={e}");
            proptest::prop_assert!((pt.transmission - t).abs() <= 1e-10, "E={e}");
        }

        #[test]
        fn current_ratios_equal_amplitude_route(case in 0usize..3, e in -10.0f64..10.0) {
            let b = barrier_for(case);
            let c = coefficients_abc(&b, e).unwrap();
            let j = current_densities(&b, e, &c);
            let pt = rt_probabilities(&b, e).unwrap();
            proptest::prop_assert!(((j.reflected / j.incident).abs() - pt.reflection).abs() <= 1e-10);
            proptest::prop_assert!(((j.transmitted / j.incident).abs() - pt.transmission).abs() <= 1e-10);
        }

        #[test]
        fn incidence_side_does_not_matter(case in 0usize..3, e in -10.0f64..10.0) {
            use crate::oracle::{matching_linear_solve, Incidence};
            let b = barrier_for(case);
            let left = matching_linear_solve(&b, e, Incidence::Left).unwrap();
            let right = matching_linear_solve(&b, e, Incidence::Right).unwrap();
            let (rl, tl) = rt_from_coefficients(&b, e, &left).unwrap();
            let (rr, tr) = rt_from_coefficients(&b, e, &right).unwrap();
            proptest::prop_assert!((rl - rr).abs() <= 1e-12 && (tl - tr).abs() <= 1e-12, "E={e}: {rl} {rr} {tl} {tr}");
        }
    }
}
