//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one pass/fail line; exits non-zero on failure.

use f128::f128;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xwell::bound::{count_nodes, eigenfunction, node_grid, solve_spectrum_default, Parity};
use xwell::model::EnergyGridSpec;
use xwell::oracle::{
    action_f_quadrature, barrier_action_quadrature, k_series_oracle, matching_linear_solve, shoot_spectrum,
    Incidence, MAX_STEP,
};
use xwell::scalar::Real;
use xwell::scatter::{
    barrier_top_length, coefficients_abc, continued_rt, find_crossover, pole_locate, rt_probabilities, sweep,
    PoleKind,
};
use xwell::semiclassical::{action_f, barrier_action_F, t_wkb, wkb_spectrum};
use xwell::specfun::{hankel_values, k_imag_order};
use xwell::{Barrier, Complex, Well};

const EXACT: [f64; 4] = [2.6759, 7.7766, 13.3305, 19.5616];
const WKB: [f64; 4] = [2.6471, 7.6486, 13.2651, 19.4743];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn well() -> Well {
    Well::new(1.0, 1.0).unwrap()
}

fn exact_spectrum() -> Outcome {
    let states = solve_spectrum_default(&well(), 3).map_err(fail)?;
    let dev = states
        .iter()
        .zip(EXACT)
        .map(|(s, e)| (s.energy - e).abs())
        .fold(0.0, f64::max);
    let levels: Vec<String> = states.iter().map(|s| format!("{:.4}", s.energy)).collect();
    check(dev <= 5e-4, format!("E = [{}], max deviation {dev:.2e}", levels.join(", ")))
}

fn wkb_levels() -> Outcome {
    let w = well();
    let levels = wkb_spectrum(&w, 3).map_err(fail)?;
    let exact = solve_spectrum_default(&w, 3).map_err(fail)?;
    let dev = levels
        .iter()
        .zip(WKB)
        .map(|(l, e)| (l.1 - e).abs())
        .fold(0.0, f64::max);
    let rel = levels
        .iter()
        .zip(&exact)
        .map(|(l, s)| (l.1 - s.energy).abs() / s.energy)
        .fold(0.0, f64::max);
    check(
        levels.len() == 4 && dev <= 5e-4 && rel <= 0.02,
        format!("max deviation {dev:.2e}, max relative gap to exact {rel:.3}"),
    )
}

fn crossovers() -> Outcome {
    let ec1 = find_crossover(&Barrier::new(5.0, 1.0).map_err(fail)?, -5.0, 5.0).map_err(fail)?;
    let ec02 = find_crossover(&Barrier::new(5.0, 0.2).map_err(fail)?, -5.0, 5.0).map_err(fail)?;
    let (a_top, ec_top) = barrier_top_length::<f64>(5.0, 0.2, 1.0, (-5.0, 5.0), 1.0).map_err(fail)?;
    check(
        (ec1 + 1.1487).abs() <= 1e-3 && (ec02 - 0.4886).abs() <= 1e-3 && ec_top.abs() <= 1e-3 && a_top > 0.2 && a_top < 1.0,
        format!("E_c(a=1) = {ec1:.5}, E_c(a=0.2) = {ec02:.5}, E_c = {ec_top:.1e} at a = {a_top:.5}"),
    )
}

fn unitarity() -> Outcome {
    let grid = EnergyGridSpec::new(-10.0, 10.0, 401).map_err(fail)?;
    let mut worst = 0.0f64;
    for (u0, a) in [(5.0, 1.0), (5.0, 0.2), (1.0, 1.0)] {
        let t = sweep(&Barrier::new(u0, a).map_err(fail)?, &grid);
        let defects = t.column("unitarity_defect").ok_or("missing column")?;
        if defects.iter().any(|d| !d.is_finite()) {
            return Err(format!("invalid points in sweep U0={u0}, a={a}"));
        }
        worst = defects.iter().copied().fold(worst, f64::max);
    }
    check(worst <= 1e-8, format!("max |R+T-1| = {worst:.2e}"))
}

fn tunneling_at_top() -> Outcome {
    let b1 = Barrier::new(5.0, 1.0).map_err(fail)?;
    let b02 = Barrier::new(5.0, 0.2).map_err(fail)?;
    let wkb_top = t_wkb(&b1, -f64::MIN_POSITIVE).map_err(fail)?;
    let t1 = rt_probabilities(&b1, 0.0).map_err(fail)?.transmission;
    let t02 = rt_probabilities(&b02, 0.0).map_err(fail)?.transmission;
    check(
        wkb_top == 0.5 && t1 > 0.5 && t02 < 0.5,
        format!("T_wkb(0-) = {wkb_top}, T(0; a=1) = {t1:.4}, T(0; a=0.2) = {t02:.4}"),
    )
}

fn poles() -> Outcome {
    let w = well();
    let exact = solve_spectrum_default(&w, 3).map_err(fail)?;
    let found = pole_locate(&w, 3).map_err(fail)?;
    if found.len() != exact.len() {
        return Err(format!("{} poles for {} levels", found.len(), exact.len()));
    }
    let dev = found
        .iter()
        .zip(&exact)
        .map(|(p, s)| (p.energy - s.energy).abs())
        .fold(0.0, f64::max);
    let alternate = found.iter().enumerate().all(|(n, p)| {
        p.kind
            == if n % 2 == 0 {
                PoleKind::KPrimeZero
            } else {
                PoleKind::KZero
            }
    });
    let mut min_r = f64::INFINITY;
    for p in &found {
        for e in [p.energy - 1e-4, p.energy + 1e-4] {
            min_r = min_r.min(continued_rt(&w, e).map_err(fail)?.reflection);
        }
    }
    let kinds: Vec<&str> = found.iter().map(|p| p.kind.label()).collect();
    check(
        dev <= 1e-6 && alternate && min_r > 1e3,
        format!("max |E_pole - E_n| = {dev:.1e}, kinds [{}], min R near poles {min_r:.2e}", kinds.join(", ")),
    )
}

fn wronskian_defect() -> Result<f64, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let r = 5.0 * rng.random::<f64>().sqrt();
        let theta = 2.0 * std::f64::consts::PI * rng.random::<f64>();
        let z = 0.2 + 19.8 * rng.random::<f64>();
        let h = hankel_values(Complex::from_polar(r, theta), Complex::new(z, 0.0)).map_err(fail)?;
        let w = h.h1 * h.h2p - h.h1p * h.h2 + Complex::new(0.0, 4.0 / (std::f64::consts::PI * z));
        worst = worst.max(w.norm());
    }
    Ok(worst)
}

fn oracle_suite() -> Outcome {
    let w = well();
    let exact = solve_spectrum_default(&w, 3).map_err(fail)?;
    let shots = shoot_spectrum(&w, 3, w.a * MAX_STEP).map_err(fail)?;
    let numerov = exact
        .iter()
        .zip(&shots)
        .map(|(s, o)| (s.energy - o.energy).abs())
        .fold(0.0, f64::max);

    let mut linear = 0.0f64;
    for (u0, a) in [(5.0, 1.0), (5.0, 0.2)] {
        let b = Barrier::new(u0, a).map_err(fail)?;
        for e in [-8.0, -3.0, -0.5, 0.0, 2.0, 4.5, 5.5, 8.0, 10.0] {
            let lin = matching_linear_solve(&b, e, Incidence::Left).map_err(fail)?;
            let cf = coefficients_abc(&b, e).map_err(fail)?;
            let (rb, tc) = (cf.b / cf.a, cf.c / cf.a);
            linear = linear
                .max((lin.b - rb).norm() / rb.norm())
                .max((lin.c - tc).norm() / tc.norm());
        }
    }

    let mut k_gap = 0.0f64;
    let orders = [0.0, 0.5, 1.0, 1.5, 2.5, 3.5, 4.5, 6.0];
    for nu in orders {
        for x in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
            let quad = k_imag_order(nu, x).map_err(fail)?;
            let series = k_series_oracle(Complex::new(f128::lit(0.0), f128::lit(nu)), f128::lit(x)).map_err(fail)?;
            k_gap = k_gap.max((series.re.to_f64_lossy() - quad).abs() / quad.abs());
        }
    }

    let wronskian = wronskian_defect()?;

    let mut wkb_gap = 0.0f64;
    for e in [0.01, 0.5, 2.6471, 7.0, 13.0, 19.5, 30.0] {
        let cf = action_f(&w, e).map_err(fail)?.value;
        wkb_gap = wkb_gap.max((action_f_quadrature(&w, e).map_err(fail)? - cf).abs() / cf);
    }
    for (u0, a) in [(5.0, 1.0), (5.0, 0.2), (1.0, 1.0)] {
        let b = Barrier::new(u0, a).map_err(fail)?;
        for e in [-0.05, -0.5, -2.0, -5.0, -10.0] {
            let cf = barrier_action_F(&b, e).map_err(fail)?.value;
            wkb_gap = wkb_gap.max((barrier_action_quadrature(&b, e).map_err(fail)? - cf).abs() / cf);
        }
    }

    check(
        numerov <= 1e-3 && linear <= 1e-9 && k_gap <= 1e-9 && wronskian <= 1e-9 && wkb_gap <= 1e-8,
        format!(
            "numerov {numerov:.1e}, linear solve {linear:.1e}, K routes {k_gap:.1e}, wronskian {wronskian:.1e}, WKB quadrature {wkb_gap:.1e}"
        ),
    )
}

fn nodes_and_parity() -> Outcome {
    let w = well();
    let states = solve_spectrum_default(&w, 3).map_err(fail)?;
    let grid = node_grid(&w, 2001);
    let mut worst_slope = 0.0f64;
    for s in &states {
        let nodes = count_nodes(&w, s, &grid).map_err(fail)?;
        if nodes != s.n {
            return Err(format!("state {} has {nodes} nodes", s.n));
        }
        if s.parity != Parity::of_level(s.n) {
            return Err(format!("state {} has parity {:?}", s.n, s.parity));
        }
        let at_origin = eigenfunction(&w, s, 0.0).map_err(fail)?;
        match s.parity {
            Parity::Even => {
                let peak = grid
                    .iter()
                    .map(|&x| eigenfunction(&w, s, x).map(f64::abs))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(fail)?
                    .into_iter()
                    .fold(0.0, f64::max);
                let h = 1e-5;
                let slope = (eigenfunction(&w, s, h).map_err(fail)? - at_origin) / h;
                worst_slope = worst_slope.max(slope.abs() / peak);
            }
            Parity::Odd => {
                if at_origin != 0.0 {
                    return Err(format!("odd state {} has psi(0) = {at_origin:e}", s.n));
                }
            }
        }
    }
    check(
        worst_slope <= 1e-4,
        format!("nodes 0..3, parities alternate, odd psi(0) = 0, even |psi'(0)|/max|psi| <= {worst_slope:.1e}"),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("exact spectrum", exact_spectrum),
        ("WKB spectrum", wkb_levels),
        ("crossover energies", crossovers),
        ("unitarity", unitarity),
        ("tunneling at barrier top", tunneling_at_top),
        ("poles equal bound states", poles),
        ("oracle suite", oracle_suite),
        ("nodes and parity", nodes_and_parity),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name}: {detail} ({secs:.2} s)", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {} FAIL {name}: {detail} ({secs:.2} s)", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
