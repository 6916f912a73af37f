//! WKB quantization of the well, Kemble tunneling through the barrier, and the
//! WKB pole condition obtained by continuing the barrier action to the well.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{BarrierParams, WellParams};
use crate::roots::{expand_upward, polish};
use crate::scalar::{imag_unit, re, Real};

/// An action integral together with the ratio g (well) or G (barrier) it was
/// evaluated at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionValue<T> {
    pub value: T,
    pub g_or_g_cap: T,
}

/// atanh(u) - u for u = sqrt(g^2 - 1)/g, as a function of g >= 1.
///
/// Small u uses the odd power series to avoid cancelling two nearly equal
/// terms.
fn atanh_minus_identity<T: Real>(g: T) -> T {
    if g <= T::one() {
        return T::zero();
    }
    let u = ((g * g - T::one()).sqrt() / g).min(T::one());
    if u < T::lit(0.1) {
        let u2 = u * u;
        let mut term = u * u2;
        let mut sum = T::zero();
        let mut k = 3.0;
        while term / T::lit(k) > T::epsilon() * sum.max(T::min_positive_value()) {
            sum = sum + term / T::lit(k);
            term = term * u2;
            k += 2.0;
        }
        return sum;
    }
    T::lit(0.5) * ((T::one() + u) / (T::one() - u)).ln() - u
}

/// Phase integral of the well in units of pi hbar:
/// f(E) = (2 q a g / pi) (atanh(u) - u), g = sqrt((E + V0)/V0).
pub fn action_f<T: Real>(params: &WellParams<T>, energy: T) -> Result<ActionValue<T>> {
    if energy < T::zero() {
        return Err(Error::NegativeEnergyForWellAction {
            energy: energy.to_f64_lossy(),
        });
    }
    let g = ((energy + params.v0) / params.v0).sqrt();
    let value = T::lit(2.0) * params.q() * params.a * g / T::PI() * atanh_minus_identity(g);
    Ok(ActionValue {
        value,
        g_or_g_cap: g,
    })
}

/// Energies solving f(E) = n + 1/2 for n = 0..=n_max.
pub fn wkb_spectrum<T: Real>(params: &WellParams<T>, n_max: usize) -> Result<Vec<(usize, T)>> {
    solve_levels(params, n_max, |e| Ok(action_f(params, e)?.value))
}

fn solve_levels<T: Real, F>(params: &WellParams<T>, n_max: usize, phase: F) -> Result<Vec<(usize, T)>>
where
    F: Fn(T) -> Result<T>,
{
    let mut out = Vec::with_capacity(n_max + 1);
    let mut lo = T::zero();
    for n in 0..=n_max {
        let target = T::lit(n as f64 + 0.5);
        let g = |e: T| Ok(phase(e)? - target);
        let bracket = expand_upward(&g, lo, params.v0, 200)?;
        let width = T::lit(1e-14) * (T::one() + bracket.hi.abs());
        let e = polish(g, bracket, width, 3)?;
        out.push((n, e));
        lo = e;
    }
    Ok(out)
}

/// Barrier penetration integral F = 2 s a G (atanh(u) - u), G = sqrt(1 - E/U0).
#[allow(non_snake_case)]
pub fn barrier_action_F<T: Real>(params: &BarrierParams<T>, energy: T) -> Result<ActionValue<T>> {
    if !(energy < T::zero()) {
        return Err(Error::EnergyNotBelowBarrierTop {
            energy: energy.to_f64_lossy(),
        });
    }
    let big_g = (T::one() - energy / params.u0).sqrt();
    let value = T::lit(2.0) * params.s() * params.a * big_g * atanh_minus_identity(big_g);
    Ok(ActionValue {
        value,
        g_or_g_cap: big_g,
    })
}

/// Kemble transmission 1/(1 + e^{2F}) below the barrier top.
pub fn t_wkb<T: Real>(params: &BarrierParams<T>, energy: T) -> Result<T> {
    let f = barrier_action_F(params, energy)?.value;
    Ok(T::one() / (T::one() + (T::lit(2.0) * f).exp()))
}

/// Barrier action with U0 replaced by -V0, so that s becomes i q and G
/// becomes g. The result is purely imaginary.
pub fn continued_barrier_action<T: Real>(params: &WellParams<T>, energy: T) -> Result<Complex<T>> {
    if energy < T::zero() {
        return Err(Error::NegativeEnergyForWellAction {
            energy: energy.to_f64_lossy(),
        });
    }
    let u0 = -params.v0;
    let s = (re(params.two_mu_over_hbar2 * u0)).sqrt();
    let s = if s.im < T::zero() { -s } else { s };
    let big_g = (T::one() - energy / u0).sqrt();
    Ok(s * (T::lit(2.0) * params.a * big_g * atanh_minus_identity(big_g)))
}

/// Energy of the n-th pole of the continued Kemble formula,
/// 1/(1 + e^{2F}) with F = i pi f, i.e. Im F = (n + 1/2) pi.
pub fn wkb_pole_condition<T: Real>(params: &WellParams<T>, n: usize) -> Result<T> {
    let levels = solve_levels(params, n, |e| {
        let f = continued_barrier_action(params, e)?;
        Ok((f * imag_unit::<T>().conj()).re / T::PI())
    })?;
    Ok(levels[n].1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn well() -> WellParams<f64> {
        WellParams::<f64>::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn action_vanishes_at_zero() {
        assert_eq!(action_f(&well(), 0.0).unwrap().value, 0.0);
        let b = BarrierParams::<f64>::new(5.0, 1.0).unwrap();
        assert!(barrier_action_F(&b, -1e-300).unwrap().value.abs() < 1e-300);
        assert!(matches!(
            barrier_action_F(&b, 0.0),
            Err(Error::EnergyNotBelowBarrierTop { .. })
        ));
        assert!(matches!(
            action_f(&well(), -1.0),
            Err(Error::NegativeEnergyForWellAction { .. })
        ));
    }

    #[test]
    fn half_quantum_at_first_level() {
        let f = action_f(&well(), 2.6471).unwrap().value;
        assert!((f - 0.5).abs() < 1e-3);
    }

    #[test]
    fn wkb_levels() {
        let expected = [2.6471, 7.6486, 13.2651, 19.4743];
        let levels = wkb_spectrum(&well(), 3).unwrap();
        for ((n, e), want) in levels.iter().zip(expected) {
            assert!((e - want).abs() < 5e-4, "n={n} got {e}");
        }
        assert!(levels.windows(2).all(|w| w[1].1 > w[0].1));
    }

    #[test]
    fn pole_condition_matches_levels() {
        let levels = wkb_spectrum(&well(), 3).unwrap();
        for (n, e) in levels {
            let p = wkb_pole_condition(&well(), n).unwrap();
            assert!((p - e).abs() <= 1e-10, "n={n}: {p} vs {e}");
        }
    }

    #[test]
    fn kemble_limits() {
        let b = BarrierParams::<f64>::new(5.0, 1.0).unwrap();
        assert!((t_wkb(&b, -1e-14).unwrap() - 0.5).abs() < 1e-6);
        assert!(t_wkb(&b, -1e4).unwrap() < 1e-30);
        let mut prev = 0.0;
        for i in 0..200 {
            let e = -20.0 + 0.1 * i as f64 + 0.05;
            let t = t_wkb(&b, e).unwrap();
            assert!(t > prev && t <= 0.5);
            prev = t;
        }
    }

    #[test]
    fn barrier_action_scales_with_length() {
        let b1 = BarrierParams::<f64>::new(5.0, 1.0).unwrap();
        let b2 = BarrierParams::<f64>::new(5.0, 0.2).unwrap();
        for e in [-0.1, -3.0, -12.0] {
            let f1 = barrier_action_F(&b1, e).unwrap().value;
            let f2 = barrier_action_F(&b2, e).unwrap().value;
            assert!((f2 - 0.2 * f1).abs() <= 1e-14 * f1);
        }
    }

    proptest! {
        #[test]
        fn series_branch_is_continuous(g in 1.0f64..1.2) {
            let u = (g * g - 1.0).sqrt() / g;
            let direct = u.atanh() - u;
            let v = atanh_minus_identity(g);
            prop_assert!((v - direct).abs() <= 1e-15 + 1e-10 * direct.abs());
        }

        #[test]
        fn action_is_increasing(e in 0.0f64..50.0, de in 1e-3f64..5.0) {
            let w = well();
            prop_assert!(action_f(&w, e + de).unwrap().value > action_f(&w, e).unwrap().value);
        }
    
        #[test]
        fn kemble_probability_is_at_most_half(e in -200.0f64..-1e-9) {
            let t = t_wkb(&BarrierParams::<f64>::new(5.0, 1.0).unwrap(), e).unwrap();
            prop_assert!(t > 0.0 && t <= 0.5, "T({e}) = {t}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn closed_forms_match_quadrature(v0 in 0.2f64..10.0, a in 0.1f64..3.0, e_frac in 1e-3f64..30.0, b_frac in 1e-3f64..10.0) {
            use crate::oracle::{action_f_quadrature, barrier_action_quadrature};
            let w = WellParams::<f64>::new(v0, a).unwrap();
            let e = e_frac * v0;
            let f = action_f(&w, e).unwrap().value;
            prop_assert!((action_f_quadrature(&w, e).unwrap() - f).abs() <= 1e-8 * f, "well E={e}");
            let b = BarrierParams::<f64>::new(v0, a).unwrap();
            let e = -b_frac * v0;
            let big_f = barrier_action_F(&b, e).unwrap().value;
            prop_assert!((barrier_action_quadrature(&b, e).unwrap() - big_f).abs() <= 1e-8 * big_f, "barrier E={e}");
        }
    }
}
