// `!(x > 0)` style checks are there to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;
mod validate;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use chroma_core::curves::{eval_curve, CurveKind};
use chroma_core::fv::{self, Component, DeficitConfig, Scheme, SimConfig};
use chroma_core::gspt::{self, InvariantRegionSpec};
use chroma_core::inner::{self, InnerConfig, InnerState};
use chroma_core::riemann::{classify_pair, singular_shock_data, solve};
use chroma_core::{Error, FrozenParams};

use config::{parse_pair, CommonArgs, Config};
use output::{emit, fmt, to_json, write_file};

#[derive(Parser, Debug)]
#[command(name = "chroma", version, about = "Riemann solver and singular-shock toolkit for two-component chromatography")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    /// Flat JSON config file; flags override its values.
    #[arg(long, env = "CHROMA_CONFIG", global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Region of the pair (U_L, U_R) and singular-shock data when relevant.
    Classify,
    /// Waves and constant states of the exact solution.
    Solve,
    /// Exact solution sampled in xi = x/t, as CSV.
    Profile {
        #[arg(long = "xi-min", allow_hyphen_values = true)]
        xi_min: Option<f64>,
        #[arg(long = "xi-max", allow_hyphen_values = true)]
        xi_max: Option<f64>,
    },
    /// Wave curves through U_L, as CSV.
    Curves {
        #[arg(long = "v-min")]
        v_min: Option<f64>,
        #[arg(long = "v-max")]
        v_max: Option<f64>,
    },
    /// Homoclinic orbit of the inner system with its tail fit and deficit limit.
    Inner {
        /// Starting point `y1,y2` at eta = 0.
        #[arg(long, value_parser = parse_pair, default_value = "1,1")]
        y0: [f64; 2],
    },
    /// Corner equilibria, q-points and invariant regions of the blow-up chart.
    GsptCheck,
    /// Finite-volume run with measurements.
    Simulate {
        #[arg(long = "x-lo", allow_hyphen_values = true, default_value_t = -1.0)]
        x_lo: f64,
        #[arg(long = "x-hi", allow_hyphen_values = true, default_value_t = 2.0)]
        x_hi: f64,
        /// Number of snapshots, evenly spaced from t-end/4 to t-end.
        #[arg(long, default_value_t = 16)]
        snapshots: usize,
        /// Dyadic refinement levels starting at --n.
        #[arg(long, default_value_t = 1)]
        levels: usize,
        #[arg(long, value_enum, default_value_t = SchemeArg::Llxf)]
        scheme: SchemeArg,
    },
    /// Quick self-check of the solver's invariants; exit 2 on any failure.
    Validate {
        /// Include a small finite-volume check.
        #[arg(long)]
        fv: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SchemeArg {
    Lxf,
    Llxf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let internal = e.chain().any(|c| c.downcast_ref::<Error>().is_some_and(Error::is_internal));
            ExitCode::from(if internal { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let cfg = Config::load(&cli.common, cli.config.as_deref())?;
    match cli.command {
        Command::Classify => classify(&cfg)?,
        Command::Solve => solve_cmd(&cfg)?,
        Command::Profile { xi_min, xi_max } => profile(&cfg, xi_min, xi_max)?,
        Command::Curves { v_min, v_max } => curves(&cfg, v_min, v_max)?,
        Command::Inner { y0 } => inner_cmd(&cfg, y0)?,
        Command::GsptCheck => gspt_check(&cfg)?,
        Command::Simulate { x_lo, x_hi, snapshots, levels, scheme } => simulate(&cfg, x_lo, x_hi, snapshots, levels, scheme)?,
        Command::Validate { fv } => {
            let report = validate::run(&cfg, fv)?;
            json_out(&cfg, "validate.json", &report)?;
            if !report.all_pass {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// JSON to stdout, and to `out/name` when an output directory is set.
fn json_out<T: Serialize>(cfg: &Config, name: &str, value: &T) -> Result<()> {
    let text = to_json(value)?;
    if let Some(dir) = &cfg.out {
        write_file(dir, name, &text)?;
    }
    print!("{text}");
    Ok(())
}

#[derive(Serialize)]
struct ClassifyReport {
    region: u8,
    s: Option<f64>,
    k: Option<f64>,
    overcompressive: Option<bool>,
    warning: Option<String>,
}

fn classify(cfg: &Config) -> Result<()> {
    let c = classify_pair(cfg.ul, cfg.ur, &cfg.params)?;
    let report = ClassifyReport {
        region: c.region,
        s: c.singular.map(|d| d.s),
        k: c.singular.map(|d| d.k),
        overcompressive: c.singular.map(|d| d.oc1 && d.oc2),
        warning: c.warning,
    };
    json_out(cfg, "classify.json", &report)
}

fn solve_cmd(cfg: &Config) -> Result<()> {
    let sol = solve(cfg.ul, cfg.ur, &cfg.params)?;
    json_out(cfg, "solve.json", &sol)
}

fn profile(cfg: &Config, xi_min: Option<f64>, xi_max: Option<f64>) -> Result<()> {
    let sol = solve(cfg.ul, cfg.ur, &cfg.params)?;
    let (lo, hi) = sol
        .waves
        .iter()
        .map(|w| w.speed_range())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (l, h)| (a.min(l), b.max(h)));
    let (lo, hi) = if lo.is_finite() {
        let pad = 0.25 * (hi - lo).max(0.1);
        (lo - pad, hi + pad)
    } else {
        (-1.0, 1.0)
    };
    let (lo, hi) = (xi_min.unwrap_or(lo), xi_max.unwrap_or(hi));
    if !(hi > lo) {
        bail!(Error::InvalidParameter(format!("need xi-min < xi-max, got {lo}, {hi}")));
    }
    let n = cfg.n.unwrap_or(401).max(2);
    let mut csv = String::from("xi,v,y\n");
    for i in 0..n {
        let xi = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let (u, _) = sol.evaluate(xi);
        writeln!(csv, "{},{},{}", fmt(xi), fmt(u.v), fmt(u.y))?;
    }
    emit(cfg.out.as_deref(), "profile.csv", &csv)?;
    if let (Some(d), Some(dir)) = (sol.singular(), cfg.out.as_deref()) {
        #[derive(Serialize)]
        struct Sidecar {
            s: f64,
            k: f64,
        }
        write_file(dir, "profile_singular.json", &to_json(&Sidecar { s: d.s, k: d.k })?)?;
    }
    Ok(())
}

fn curves(cfg: &Config, v_min: Option<f64>, v_max: Option<f64>) -> Result<()> {
    let ul = cfg.ul;
    let (lo, hi) = (v_min.unwrap_or(0.01 * ul.v), v_max.unwrap_or(10.0 * ul.v));
    if !(lo > 0.0 && hi > lo) {
        bail!(Error::InvalidParameter(format!("need 0 < v-min < v-max, got {lo}, {hi}")));
    }
    let n = cfg.n.unwrap_or(200).max(2);
    let mut csv = String::from("v,y,curve_id\n");
    for kind in CurveKind::ALL {
        for i in 0..n {
            let v = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            // points outside a curve's domain are simply not sampled
            match eval_curve(kind, ul, v) {
                Ok(y) => writeln!(csv, "{},{},{}", fmt(v), fmt(y), kind.name())?,
                Err(e) if e.is_internal() => return Err(e.into()),
                Err(_) => {}
            }
        }
    }
    emit(cfg.out.as_deref(), "curves.csv", &csv)
}

#[derive(Serialize)]
struct InnerReport {
    c: f64,
    d: f64,
    p: f64,
    r: f64,
    kappa: f64,
    theory: inner::AsymptoticFit<f64>,
    kappa_limit_exact: f64,
    eta_range: (f64, f64),
    samples: usize,
    tail_exponents: TailExponents,
}

#[derive(Serialize)]
struct TailExponents {
    beta2: f64,
    beta3: f64,
    fitted: (f64, f64),
    expected: (f64, f64),
}

fn inner_cmd(cfg: &Config, y0: [f64; 2]) -> Result<()> {
    let icfg = InnerConfig {
        rtol: cfg.tol.unwrap_or(1e-10),
        ..InnerConfig::default()
    };
    let orbit = inner::integrate_homoclinic(InnerState::new(y0[0], y0[1]), (-1e3, 1e7), &icfg)?;
    let fit = inner::fit_asymptotics(&orbit)?;
    let grid = [1e-1, 5e-2, 2e-2, 1e-2, 5e-3, 2e-3, 1e-3];
    let kappa = inner::deficit_limit(&orbit, &grid, 1e-3)?.kappa;
    let eps: Vec<f64> = (0..=8).map(|i| 10f64.powf(-4.0 + 0.25 * i as f64)).collect();
    let (b2, b3) = (cfg.exps.beta2, cfg.exps.beta3);
    let fitted = inner::tail_scaling(b2, b3, &eps)?;
    if let Some(dir) = &cfg.out {
        let mut csv = String::from("eta,y1,y2\n");
        for s in &orbit.samples {
            writeln!(csv, "{},{},{}", fmt(s.t), fmt(s.y[0]), fmt(s.y[1]))?;
        }
        write_file(dir, "inner_orbit.csv", &csv)?;
    }
    let report = InnerReport {
        c: fit.c,
        d: fit.d,
        p: fit.p,
        r: fit.r,
        kappa,
        theory: inner::AsymptoticFit::theory(),
        kappa_limit_exact: 2f64.powf(-1.0 / 3.0),
        eta_range: orbit.eta_range(),
        samples: orbit.samples.len(),
        tail_exponents: TailExponents {
            beta2: b2,
            beta3: b3,
            fitted,
            expected: (6.0 - b3, 5.0 - b2 / 2.0),
        },
    };
    json_out(cfg, "inner.json", &report)
}

#[derive(Serialize)]
struct RegionSummary {
    invariant: bool,
    precondition_ok: bool,
    e: f64,
    e_window: (f64, f64),
    samples: usize,
    consistent: usize,
    violations: usize,
}

fn region_summary(spec: &InvariantRegionSpec<f64>, fp: &FrozenParams, n: usize) -> RegionSummary {
    let rep = gspt::invariant_region_check(spec, fp, n);
    RegionSummary {
        invariant: rep.invariant(),
        precondition_ok: rep.precondition_ok,
        e: spec.e,
        e_window: rep.e_window,
        samples: rep.curves.iter().map(|c| c.samples).sum(),
        consistent: rep.curves.iter().map(|c| c.consistent).sum(),
        violations: rep.curves.iter().map(|c| c.violations.len()).sum(),
    }
}

#[derive(Serialize)]
struct GsptReport {
    roots: Vec<f64>,
    equilibria: Vec<gspt::EquilibriumReport<f64>>,
    q_points: Option<gspt::QPoints<f64>>,
    region_left: Option<RegionSummary>,
    region_right: Option<RegionSummary>,
}

fn gspt_check(cfg: &Config) -> Result<()> {
    let roots = gspt::reduced_roots::<f64>()?;
    let equilibria = gspt::equilibria_and_eigen(&cfg.exps)?;
    let n = cfg.n.unwrap_or(200);
    let (ul, ur) = (cfg.ul, cfg.ur);
    let (mut q_points, mut region_left, mut region_right) = (None, None, None);
    if let Ok(data) = singular_shock_data(ul, ur) {
        let s = data.s;
        q_points = Some(gspt::q_points(ul, ur)?);
        let spec = InvariantRegionSpec::left_of(ul, InvariantRegionSpec::e_midpoint(ul), s);
        region_left = Some(region_summary(&spec, &FrozenParams::at(ul, s), n));
        let spec = InvariantRegionSpec::right_of(ur, InvariantRegionSpec::e_midpoint(ur), s);
        region_right = Some(region_summary(&spec, &FrozenParams::at(ur, s), n));
    }
    json_out(
        cfg,
        "gspt_check.json",
        &GsptReport {
            roots,
            equilibria,
            q_points,
            region_left,
            region_right,
        },
    )
}

#[derive(Serialize)]
struct SimReport {
    region: u8,
    s_exact: Option<f64>,
    k_exact: Option<f64>,
    s_hat: Option<f64>,
    k_hat: Option<f64>,
    /// `(t, max y)` per snapshot of the finest run.
    peaks: Vec<(f64, f64)>,
    refinement_table: Vec<fv::RefinementRow<f64>>,
}

fn simulate(cfg: &Config, x_lo: f64, x_hi: f64, snapshots: usize, levels: usize, scheme: SchemeArg) -> Result<()> {
    let (ul, ur) = (cfg.ul, cfg.ur);
    let class = classify_pair(ul, ur, &cfg.params)?;
    let n0 = cfg.n.unwrap_or(400);
    let ns: Vec<usize> = (0..levels.max(1)).map(|l| n0 << l).collect();
    let mut sim = SimConfig::new(cfg.cfl, cfg.t_end).with_snapshots(0.25 * cfg.t_end, snapshots);
    sim.scheme = match scheme {
        SchemeArg::Lxf => Scheme::LxF,
        SchemeArg::Llxf => Scheme::LLxF,
    };
    let singular = class.singular.filter(|_| class.region == 6);
    let deficit = DeficitConfig::for_pair(ul, ur);
    let exact = if singular.is_none() { Some(solve(ul, ur, &cfg.params)?) } else { None };
    let table = fv::refinement_study(ul, ur, (x_lo, x_hi), &ns, &sim, singular.map(|_| &deficit), exact.as_ref())?;

    // the finest run again, for its snapshots
    let finest = *ns.last().expect("at least one level");
    let grid = fv::Grid1D::new(x_lo, x_hi, finest)?;
    let snaps = fv::simulate(ul, ur, &grid, &sim)?;
    if let Some(dir) = &cfg.out {
        let mut csv = String::from("t,x,v,y\n");
        for s in &snaps {
            for (i, c) in s.cells.iter().enumerate() {
                writeln!(csv, "{},{},{},{}", fmt(s.t), fmt(grid.center(i)), fmt(c.v), fmt(c.y))?;
            }
        }
        write_file(dir, "snapshots.csv", &csv)?;
    }
    let last = table.last().expect("at least one row");
    let s_hat = match singular {
        Some(_) => last.s_hat,
        None if snaps.len() >= 3 => fv::measure_front_speed(&snaps, &grid, Component::V, 0.5 * (ul.v + ur.v)).ok(),
        None => None,
    };
    let report = SimReport {
        region: class.region,
        s_exact: singular.map(|d| d.s),
        k_exact: singular.map(|d| d.k),
        s_hat,
        k_hat: last.k_hat,
        peaks: snaps.iter().map(|s| (s.t, fv::peak_y(s))).collect(),
        refinement_table: table,
    };
    json_out(cfg, "simulate.json", &report)
}
