//! Oracle comparisons run by the `selfcheck` subcommand.

use f128::f128;
use num_complex::Complex;
use serde::Serialize;

use crate::bound::solve_spectrum_default;
use crate::error::Result;
use crate::model::{BarrierParams, EnergyGridSpec, WellParams};
use crate::oracle::{
    action_f_quadrature, barrier_action_quadrature, k_series_oracle, matching_linear_solve,
    shoot_spectrum, Incidence, MAX_STEP,
};
use crate::scalar::Real;
use crate::scatter::{coefficients_abc, pole_locate, sweep};
use crate::semiclassical::{action_f, barrier_action_F};
use crate::specfun::{hankel_values, k_imag_order};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: &'static str, measured: f64, tolerance: f64) -> Self {
        Self {
            name,
            measured,
            tolerance,
            passed: measured <= tolerance,
        }
    }

    fn failed(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            measured: f64::INFINITY,
            tolerance,
            passed: false,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {:<18} measured {:.3e} tolerance {:.1e}",
            if self.passed { "pass" } else { "FAIL" },
            self.name,
            self.measured,
            self.tolerance
        )
    }
}

fn run(name: &'static str, tolerance: f64, f: impl FnOnce() -> Result<f64>) -> CheckOutcome {
    match f() {
        Ok(m) if m.is_finite() => CheckOutcome::new(name, m, tolerance),
        _ => CheckOutcome::failed(name, tolerance),
    }
}

/// Point `i` of the Halton sequence in base `b`.
fn halton(mut i: usize, b: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// Absolute Wronskian tolerance plus the cancellation floor of
/// `H1 H2' - H1' H2` in double precision.
pub fn wronskian_allowance(h1h2p: f64, h1ph2: f64) -> f64 {
    1e-9 + 256.0 * f64::EPSILON * (h1h2p + h1ph2)
}

/// Largest ratio of the Wronskian defect |H1 H2' - H1' H2 + 4i/(pi z)| to
/// [`wronskian_allowance`] over `count` quasi-random points with |nu| <= 5
/// and z in [0.2, 20].
pub fn wronskian_defect(count: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 1..=count {
        let r = 5.0 * halton(i, 2).sqrt();
        let theta = 2.0 * std::f64::consts::PI * halton(i, 3);
        let z = 0.2 + 19.8 * halton(i, 5);
        let h = hankel_values(Complex::from_polar(r, theta), Complex::new(z, 0.0))?;
        let (p, q) = (h.h1 * h.h2p, h.h1p * h.h2);
        let w = p - q + Complex::new(0.0, 4.0 / (std::f64::consts::PI * z));
        worst = worst.max(w.norm() / wronskian_allowance(p.norm(), q.norm()));
    }
    Ok(worst)
}

/// Largest relative gap between the quadrature K and the quad-precision
/// series K on a fixed grid of orders and arguments.
pub fn k_route_gap(orders: &[f64], args: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &nu in orders {
        for &x in args {
            let quad = k_imag_order(nu, x)?;
            let series = k_series_oracle(Complex::new(f128::lit(0.0), f128::lit(nu)), f128::lit(x))?;
            worst = worst.max((series.re.to_f64_lossy() - quad).abs() / quad.abs());
        }
    }
    Ok(worst)
}

/// Largest relative gap between the linear-solve and closed-form B/A, C/A.
pub fn matching_gap(barrier: &BarrierParams<f64>, energies: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &e in energies {
        let lin = matching_linear_solve(barrier, e, Incidence::Left)?;
        let cf = coefficients_abc(barrier, e)?;
        let rb = cf.b / cf.a;
        let tc = cf.c / cf.a;
        worst = worst
            .max((lin.b - rb).norm() / rb.norm())
            .max((lin.c - tc).norm() / tc.norm());
    }
    Ok(worst)
}

pub fn run_all(well: &WellParams<f64>, barrier: &BarrierParams<f64>, n_max: usize) -> Vec<CheckOutcome> {
    let exact = solve_spectrum_default(well, n_max);
    let mut out = Vec::new();
    out.push(run("numerov-spectrum", 1e-3, || {
        let exact = exact.clone()?;
        let shots = shoot_spectrum(well, n_max, well.a * MAX_STEP)?;
        Ok(exact
            .iter()
            .zip(&shots)
            .map(|(e, s)| (e.energy - s.energy).abs())
            .fold(0.0, f64::max))
    }));
    out.push(run("pole-spectrum", 1e-6, || {
        let exact = exact.clone()?;
        let poles = pole_locate(well, n_max)?;
        Ok(exact
            .iter()
            .zip(&poles)
            .map(|(e, p)| (e.energy - p.energy).abs())
            .fold(0.0, f64::max))
    }));
    out.push(run("linear-solve", 1e-9, || {
        matching_gap(barrier, &[-3.0, 0.6 * barrier.u0, barrier.u0 + 3.0])
    }));
    out.push(run("k-series", 1e-9, || {
        k_route_gap(&[0.0, 0.5, 1.91727, 3.0, 6.0], &[0.1, 1.0, 5.0, 10.0])
    }));
    out.push(run("wronskian", 1.0, || wronskian_defect(200)));
    out.push(run("wkb-quadrature", 1e-8, || {
        let mut worst = 0.0f64;
        for e in [0.5, 10.0, 25.0] {
            let e = e * well.v0;
            let cf = action_f(well, e)?.value;
            worst = worst.max((action_f_quadrature(well, e)? - cf).abs() / cf);
        }
        for e in [-0.5, -5.0, -20.0] {
            let e = e * barrier.u0;
            let cf = barrier_action_F(barrier, e)?.value;
            worst = worst.max((barrier_action_quadrature(barrier, e)? - cf).abs() / cf);
        }
        Ok(worst)
    }));
    out.push(run("unitarity", 1e-8, || {
        let grid = EnergyGridSpec::new(-10.0, 10.0, 401)?;
        let t = sweep(barrier, &grid);
        if !t.metadata["invalid_points"].as_array().is_some_and(|a| a.is_empty()) {
            return Ok(f64::INFINITY);
        }
        Ok(t.metadata["max_unitarity_defect"].as_f64().unwrap_or(f64::INFINITY))
    }));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_points_are_in_unit_interval() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(2, 3), 2.0 / 3.0);
        assert!((1..500).all(|i| (0.0..1.0).contains(&halton(i, 5))));
    }

    #[test]
    fn k_routes_agree_on_grid() {
        let gap = k_route_gap(&[0.0, 0.5, 1.91727, 3.0, 6.0], &[0.1, 1.0, 5.0, 10.0]).unwrap();
        assert!(gap < 1e-9, "{gap}");
    }

    #[test]
    fn defaults_pass() {
        let w = WellParams::new(1.0, 1.0).unwrap();
        let b = BarrierParams::new(5.0, 1.0).unwrap();
        for c in run_all(&w, &b, 3) {
            assert!(c.passed, "{}", c.line());
        }
    }
}
