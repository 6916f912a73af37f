//! Command-line front end: every subcommand computes one table and emits it
//! as CSV or JSON.

pub mod config;
pub mod selfcheck;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::bound::{count_nodes, eigenfunction, node_grid, normalize, solve_spectrum_default, x_cap, Parity};
use crate::error::{Error, Result};
use crate::model::{BarrierParams, EnergyGridSpec, WellParams};
use crate::scatter::{continued_rt, find_crossover, pole_locate, rt_probabilities, sweep, PoleKind};
use crate::semiclassical::{action_f, t_wkb, wkb_spectrum};
use crate::table::{emit, Column, CurveTable, Format};

pub use crate::table;
use config::ConfigFile;

#[derive(Debug, Parser)]
#[command(name = "xwell", version, about = "Exponential open well and bottomless barrier: spectra, WKB and scattering tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact bound states of the well (`--table levels|psi`)
    Spectrum(Opts),
    /// WKB action f(E) and semiclassical levels (`--table curve|levels`)
    Wkb(Opts),
    /// Reflection and transmission of the barrier over an energy grid
    Scatter(Opts),
    /// Exact versus WKB transmission below the barrier top
    TunnelCompare(Opts),
    /// Poles of R and T continued to the well (`--table curve|list`)
    Poles(Opts),
    /// Energy at which R = T = 1/2
    Crossover(Opts),
    /// Compare the solver against its independent oracles
    Selfcheck(Opts),
}

#[derive(Debug, Default, Args)]
struct Opts {
    #[arg(long, allow_negative_numbers = true)]
    v0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    u0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long)]
    nmax: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    emin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    emax: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Output file; standard output when absent
    #[arg(long)]
    output: Option<PathBuf>,
    /// key=value parameter file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "two-mu-over-hbar2", allow_negative_numbers = true)]
    two_mu_over_hbar2: Option<f64>,
    #[arg(long)]
    table: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Well,
    Barrier,
}

/// Flags merged over the config file merged over defaults.
struct Settings {
    v0: f64,
    u0: f64,
    a: f64,
    kappa: f64,
    nmax: usize,
    emin: Option<f64>,
    emax: Option<f64>,
    points: Option<usize>,
    format: Format,
    output: Option<PathBuf>,
    table: Option<String>,
}

impl Settings {
    fn resolve(opts: Opts, kind: Kind) -> Result<Self> {
        let cfg = match &opts.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        if let Some(pot) = cfg.get_str("potential") {
            let want = match kind {
                Kind::Well => "well",
                Kind::Barrier => "barrier",
            };
            if !matches!(pot, "well" | "barrier") {
                return Err(Error::InvalidParameter(format!("unknown potential `{pot}`")));
            }
            if pot != want {
                return Err(Error::InvalidParameter(format!(
                    "config describes a {pot}, this command needs a {want}"
                )));
            }
        }
        let format = match opts.format.or(cfg.get::<String>("format")?) {
            Some(f) => f.parse()?,
            None => Format::Csv,
        };
        Ok(Self {
            v0: opts.v0.or(cfg.get("v0")?).unwrap_or(1.0),
            u0: opts.u0.or(cfg.get("u0")?).unwrap_or(5.0),
            a: opts.a.or(cfg.get("a")?).unwrap_or(1.0),
            kappa: opts.two_mu_over_hbar2.or(cfg.get("two_mu_over_hbar2")?).unwrap_or(1.0),
            nmax: opts.nmax.or(cfg.get("nmax")?).unwrap_or(3),
            emin: opts.emin.or(cfg.get("emin")?),
            emax: opts.emax.or(cfg.get("emax")?),
            points: opts.points.or(cfg.get("points")?),
            format,
            output: opts.output,
            table: opts.table,
        })
    }

    fn well(&self) -> Result<WellParams<f64>> {
        WellParams::with_units(self.v0, self.a, self.kappa)
    }

    fn barrier(&self) -> Result<BarrierParams<f64>> {
        BarrierParams::with_units(self.u0, self.a, self.kappa)
    }

    fn grid(&self, emin: f64, emax: f64, points: usize) -> Result<EnergyGridSpec<f64>> {
        EnergyGridSpec::new(
            self.emin.unwrap_or(emin),
            self.emax.unwrap_or(emax),
            self.points.unwrap_or(points),
        )
    }

    fn table_choice<'a>(&'a self, allowed: &[&'a str]) -> Result<&'a str> {
        match self.table.as_deref() {
            None => Ok(allowed[0]),
            Some(t) if allowed.contains(&t) => Ok(t),
            Some(t) => Err(Error::InvalidParameter(format!(
                "--table {t}: expected one of {}",
                allowed.join(", ")
            ))),
        }
    }

    fn emit(&self, table: &CurveTable) -> Result<()> {
        emit(table, self.format, self.output.as_deref())
    }
}

fn well_meta(t: &mut CurveTable, w: &WellParams<f64>) {
    t.set_meta("potential", "well");
    t.set_meta(
        "params",
        json!({ "v0": w.v0, "a": w.a, "two_mu_over_hbar2": w.two_mu_over_hbar2 }),
    );
}

fn barrier_meta(t: &mut CurveTable, b: &BarrierParams<f64>) {
    t.set_meta("potential", "barrier");
    t.set_meta(
        "params",
        json!({ "u0": b.u0, "a": b.a, "two_mu_over_hbar2": b.two_mu_over_hbar2 }),
    );
}

fn grid_meta(t: &mut CurveTable, g: &EnergyGridSpec<f64>) {
    t.set_meta("grid", json!({ "start": g.start, "stop": g.stop, "points": g.points }));
}

fn parity_code(p: Parity) -> f64 {
    match p {
        Parity::Even => 1.0,
        Parity::Odd => -1.0,
    }
}

fn spectrum(s: &Settings) -> Result<CurveTable> {
    let w = s.well()?;
    let states = solve_spectrum_default(&w, s.nmax)?;
    let which = s.table_choice(&["levels", "psi"])?;
    let mut t = if which == "levels" {
        let grid = node_grid(&w, 2001);
        let mut t = CurveTable::new(vec![
            Column::new("n", "1"),
            Column::new("parity", "1"),
            Column::new("E", "energy"),
            Column::new("k", "1/length"),
            Column::new("nodes", "1"),
        ]);
        for st in &states {
            let nodes = count_nodes(&w, st, &grid)?;
            t.push_row(vec![st.n as f64, parity_code(st.parity), st.energy, st.k, nodes as f64])?;
        }
        t.set_meta("parity_codes", json!({ "even": 1, "odd": -1 }));
        t
    } else {
        let normed = states.iter().map(|st| normalize(&w, st)).collect::<Result<Vec<_>>>()?;
        let cap = x_cap(&w);
        let xs = EnergyGridSpec::new(-cap, cap, s.points.unwrap_or(401))?.energies();
        let mut cols = vec![Column::new("x", "length")];
        cols.extend(normed.iter().map(|st| Column::new(&format!("psi_{}", st.n), "length^-1/2")));
        let mut t = CurveTable::new(cols);
        for x in xs {
            let mut row = vec![x];
            for st in &normed {
                row.push(eigenfunction(&w, st, x)?);
            }
            t.push_row(row)?;
        }
        t.set_meta("norm_constants", normed.iter().map(|st| st.norm_constant).collect::<Vec<_>>());
        t.set_meta("x_cap", cap);
        t
    };
    well_meta(&mut t, &w);
    t.set_meta("energies", states.iter().map(|st| st.energy).collect::<Vec<_>>());
    Ok(t)
}

fn wkb(s: &Settings) -> Result<CurveTable> {
    let w = s.well()?;
    let levels = wkb_spectrum(&w, s.nmax)?;
    let mut t = if s.table_choice(&["curve", "levels"])? == "curve" {
        let g = s.grid(0.0, 25.0 * w.v0, 501)?;
        let mut t = CurveTable::new(vec![Column::new("E", "energy"), Column::new("f", "1")]);
        for e in g.energies() {
            t.push_row(vec![e, action_f(&w, e)?.value])?;
        }
        grid_meta(&mut t, &g);
        t
    } else {
        let exact = solve_spectrum_default(&w, s.nmax)?;
        let mut t = CurveTable::new(vec![
            Column::new("n", "1"),
            Column::new("E_wkb", "energy"),
            Column::new("E_exact", "energy"),
            Column::new("relative_difference", "1"),
        ]);
        for ((n, e), ex) in levels.iter().zip(&exact) {
            t.push_row(vec![*n as f64, *e, ex.energy, (e - ex.energy).abs() / ex.energy])?;
        }
        t
    };
    well_meta(&mut t, &w);
    t.set_meta("wkb_levels", levels.iter().map(|l| l.1).collect::<Vec<_>>());
    Ok(t)
}

fn scatter(s: &Settings) -> Result<CurveTable> {
    let b = s.barrier()?;
    let g = s.grid(-10.0, 10.0, 401)?;
    Ok(sweep(&b, &g))
}

fn tunnel_compare(s: &Settings) -> Result<CurveTable> {
    let b = s.barrier()?;
    let g = s.grid(-10.0, 0.0, 401)?;
    let mut t = CurveTable::new(vec![
        Column::new("E", "energy"),
        Column::new("T_exact", "1"),
        Column::new("T_wkb", "1"),
    ]);
    for e in g.energies() {
        let exact = rt_probabilities(&b, e).map(|p| p.transmission).unwrap_or(f64::NAN);
        let approx = if e < 0.0 {
            t_wkb(&b, e)?
        } else if e == 0.0 {
            0.5
        } else {
            f64::NAN
        };
        t.push_row(vec![e, exact, approx])?;
    }
    barrier_meta(&mut t, &b);
    grid_meta(&mut t, &g);
    t.set_meta("T_exact_at_top", rt_probabilities(&b, 0.0)?.transmission);
    t.set_meta("T_wkb_at_top", 0.5);
    Ok(t)
}

fn poles(s: &Settings) -> Result<CurveTable> {
    let w = s.well()?;
    let found = pole_locate(&w, s.nmax)?;
    let mut t = if s.table_choice(&["curve", "list"])? == "curve" {
        let g = s.grid(0.0, 21.0 * w.v0, 2101)?;
        let mut t = CurveTable::new(vec![
            Column::new("E", "energy"),
            Column::new("R", "1"),
            Column::new("T", "1"),
        ]);
        for e in g.energies() {
            let (r, tr) = continued_rt(&w, e)
                .map(|p| (p.reflection, p.transmission))
                .unwrap_or((f64::NAN, f64::NAN));
            t.push_row(vec![e, r, tr])?;
        }
        grid_meta(&mut t, &g);
        t
    } else {
        let mut t = CurveTable::new(vec![
            Column::new("n", "1"),
            Column::new("E_pole", "energy"),
            Column::new("kind", "1"),
        ]);
        for (n, p) in found.iter().enumerate() {
            let code = match p.kind {
                PoleKind::KPrimeZero => 0.0,
                PoleKind::KZero => 1.0,
                PoleKind::Degenerate => 2.0,
            };
            t.push_row(vec![n as f64, p.energy, code])?;
        }
        t.set_meta("kind_codes", json!({ "K'-zero": 0, "K-zero": 1, "degenerate": 2 }));
        t
    };
    well_meta(&mut t, &w);
    t.set_meta(
        "poles",
        found
            .iter()
            .map(|p| json!({ "E": p.energy, "kind": p.kind.label() }))
            .collect::<Vec<_>>(),
    );
    Ok(t)
}

fn crossover(s: &Settings) -> Result<CurveTable> {
    let b = s.barrier()?;
    let lo = s.emin.unwrap_or(-5.0);
    let hi = s.emax.unwrap_or(5.0);
    let ec = find_crossover(&b, lo, hi)?;
    let mut t = CurveTable::new(vec![Column::new("E_c", "energy")]);
    t.push_row(vec![ec])?;
    barrier_meta(&mut t, &b);
    t.set_meta("search", json!([lo, hi]));
    Ok(t)
}

fn run_selfcheck(s: &Settings, out: &mut dyn Write) -> Result<bool> {
    let w = s.well()?;
    let b = s.barrier()?;
    let outcomes = selfcheck::run_all(&w, &b, s.nmax);
    let ok = outcomes.iter().all(|c| c.passed);
    let mut text = Vec::new();
    match s.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut text, &json!({ "passed": ok, "checks": outcomes }))
                .map_err(|e| Error::Io(e.to_string()))?;
            text.push(b'\n');
        }
        Format::Csv => {
            for c in &outcomes {
                writeln!(text, "{}", c.line())?;
            }
        }
    }
    match &s.output {
        Some(p) => std::fs::write(p, &text)?,
        None => out.write_all(&text)?,
    }
    Ok(ok)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter(_) => 1,
        _ => 2,
    }
}

type Producer = fn(&Settings) -> Result<CurveTable>;

fn execute(command: Command) -> Result<i32> {
    let (opts, kind, run): (Opts, Kind, Producer) = match command {
        Command::Spectrum(o) => (o, Kind::Well, spectrum),
        Command::Wkb(o) => (o, Kind::Well, wkb),
        Command::Poles(o) => (o, Kind::Well, poles),
        Command::Scatter(o) => (o, Kind::Barrier, scatter),
        Command::TunnelCompare(o) => (o, Kind::Barrier, tunnel_compare),
        Command::Crossover(o) => (o, Kind::Barrier, crossover),
        Command::Selfcheck(o) => {
            let s = Settings::resolve(o, Kind::Well)?;
            let ok = run_selfcheck(&s, &mut std::io::stdout().lock())?;
            return Ok(if ok { 0 } else { 2 });
        }
    };
    let s = Settings::resolve(opts, kind)?;
    s.emit(&run(&s)?)?;
    Ok(0)
}

/// Runs the command line `argv` (program name first) and returns the process
/// exit code: 0 on success, 1 for usage errors, 2 for numerical failures.
pub fn dispatch<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = match std::env::var("XWELL_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => rayon::ThreadPoolBuilder::new().num_threads(n).build().ok(),
            _ => {
                eprintln!("xwell: XWELL_THREADS must be a positive integer, got `{v}`");
                return 1;
            }
        },
        Err(_) => None,
    };
    let result = match &pool {
        Some(p) => p.install(|| execute(cli.command)),
        None => execute(cli.command),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("xwell: {e}");
            exit_code(&e)
        }
    }
}
