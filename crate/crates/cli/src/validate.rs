//! Fast self-checks behind `chroma validate`.

use anyhow::Result;
use serde::Serialize;

use chroma_core::curves::{eval_curve, shock_speed, tangency_points, CurveKind};
use chroma_core::fv::{self, Component, Grid1D, SimConfig};
use chroma_core::gspt::{self, InvariantRegionSpec};
use chroma_core::inner::{self, AsymptoticFit, Direction, InnerConfig, InnerState};
use chroma_core::model::{eigen, Eigen, Family};
use chroma_core::riemann::{singular_shock_data, solve};
use chroma_core::{FrozenParams, RegularizationExponents, State};

use crate::config::Config;

#[derive(Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    /// Worst observed error or the measured value.
    pub value: f64,
    pub tolerance: f64,
    pub detail: Option<String>,
}

#[derive(Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub all_pass: bool,
}

/// Deterministic quasi-random points in `[0, 1)^2`.
fn r2_sequence(n: usize) -> impl Iterator<Item = (f64, f64)> {
    const G: f64 = 1.324_717_957_244_746;
    (1..=n).map(|i| {
        let i = i as f64;
        ((0.5 + i / G).fract(), (0.5 + i / (G * G)).fract())
    })
}

fn check(name: &'static str, value: f64, tolerance: f64) -> Check {
    Check {
        name,
        pass: value.is_finite() && value <= tolerance,
        value,
        tolerance,
        detail: None,
    }
}

fn failed(name: &'static str, tolerance: f64, e: impl std::fmt::Display) -> Check {
    Check {
        name,
        pass: false,
        value: f64::NAN,
        tolerance,
        detail: Some(e.to_string()),
    }
}

fn hyperbolic_sample(a: f64, b: f64) -> State {
    let v = 0.05 + 5.0 * a;
    State::new(v, -(4.0 * v).sqrt() * (1.01 + 2.0 * b))
}

fn eigen_residual() -> f64 {
    let mut worst: f64 = 0.0;
    for (a, b) in r2_sequence(1000) {
        let u = hyperbolic_sample(a, b);
        let (v, y) = (u.v, u.y);
        // Jacobian of (y/v, 1/v)
        let j = [[-y / (v * v), 1.0 / v], [-1.0 / (v * v), 0.0]];
        if let Ok(Eigen::Strict(fields)) = eigen(u) {
            for f in fields {
                let [e0, e1] = f.eigvec;
                let scale = f.lambda.abs().max(1.0) * e0.hypot(e1);
                let r0 = j[0][0] * e0 + j[0][1] * e1 - f.lambda * e0;
                let r1 = j[1][0] * e0 + j[1][1] * e1 - f.lambda * e1;
                worst = worst.max(r0.hypot(r1) / scale);
            }
        } else {
            return f64::INFINITY;
        }
    }
    worst
}

fn rankine_hugoniot() -> f64 {
    let mut worst: f64 = 0.0;
    for (a, b) in r2_sequence(500) {
        let ul = hyperbolic_sample(a, b);
        let v = ul.v * (0.1 + 4.0 * b);
        for (kind, fam) in [(CurveKind::S1, Family::One), (CurveKind::S2, Family::Two)] {
            let (Ok(y), Ok(s)) = (eval_curve(kind, ul, v), shock_speed(ul, v, fam)) else {
                continue;
            };
            let u = State::new(v, y);
            let (fl, fr) = (ul.flux_raw(), u.flux_raw());
            let scale = 1.0 + fl[0].abs() + fl[1].abs() + s.abs() * (ul.v + ul.y.abs());
            let r1 = (fr[0] - fl[0] - s * (u.v - ul.v)).abs() / scale;
            let r2 = (fr[1] - fl[1] - s * (u.y - ul.y)).abs() / scale;
            worst = worst.max(r1).max(r2);
        }
    }
    worst
}

fn special_points() -> Result<f64> {
    let (g, d) = tangency_points(State::new(1.0, -3.0))?;
    Ok([g.v - 0.145898, g.y + 0.763932, d.v - 6.854102, d.y + 5.236068]
        .iter()
        .fold(0.0f64, |m, e: &f64| m.max(e.abs())))
}

fn riemann_round_trip(cfg: &Config) -> f64 {
    let mut worst: f64 = 0.0;
    for (a, b) in r2_sequence(200) {
        let ul = hyperbolic_sample(a, 0.3 * b);
        let Ok((g, _)) = tangency_points(ul) else { return f64::INFINITY };
        let vm = g.v * 1.001 + (3.0 * ul.v - g.v) * a;
        let Ok(ym) = eval_curve(CurveKind::R1, ul, vm) else { continue };
        let um = State::new(vm, ym);
        let vd = um.k_invariant().powi(2) / 4.0;
        let vr = 0.05 * vm + (vd - 0.05 * vm) * b * 0.999;
        let Ok(yr) = eval_curve(CurveKind::R2, um, vr) else { continue };
        let Ok(sol) = solve(ul, State::new(vr, yr), &cfg.params) else { return f64::INFINITY };
        if sol.region > 4 {
            continue;
        }
        let got = sol.states.iter().min_by(|p, q| p.dist(&um).total_cmp(&q.dist(&um))).copied().unwrap_or(ul);
        worst = worst.max(got.dist(&um) / (1.0 + um.v + um.y.abs()));
    }
    worst
}

fn inner_orbit(cfg: &Config) -> Result<(f64, f64)> {
    let icfg = InnerConfig {
        rtol: cfg.tol.unwrap_or(1e-10),
        ..InnerConfig::default()
    };
    let orbit = inner::integrate_homoclinic(InnerState::new(1.0, 1.0), (-1e3, 1e7), &icfg)?;
    let fit = inner::fit_asymptotics(&orbit)?;
    let th = AsymptoticFit::<f64>::theory();
    let rel = |x: f64, t: f64| ((x - t) / t).abs();
    let exps = rel(fit.p, th.p).max(rel(fit.r, th.r)) / 0.02;
    let consts = rel(fit.c, th.c).max(rel(fit.d, th.d)) / 0.05;
    // an orbit started on the invariant curve must stay on it
    // relative error control only, so the tiny tail is resolved too
    let rel_cfg = InnerConfig { atol: 1e-30, ..icfg };
    let on = inner::integrate(InnerState::on_parabola(1.0), 0.0, (-0.5, 1e4), Direction::Both, &rel_cfg)?;
    let parabola = on
        .samples
        .iter()
        .map(|s| InnerState::new(s.y[0], s.y[1]).parabola_residual().abs())
        .fold(0.0, f64::max);
    Ok((exps.max(consts), parabola))
}

fn tail_scaling() -> Result<f64> {
    let eps: Vec<f64> = (0..=8).map(|i| 10f64.powf(-4.0 + 0.25 * i as f64)).collect();
    let mut worst: f64 = 0.0;
    for b3 in [5.25, 5.5, 5.75] {
        for b2 in [8.0, 10.0] {
            let (e1, e2) = inner::tail_scaling(b2, b3, &eps)?;
            worst = worst.max((e1 - (6.0 - b3)).abs()).max((e2 - (5.0 - b2 / 2.0)).abs());
        }
    }
    Ok(worst)
}

fn chart2(exps: &RegularizationExponents) -> Result<f64> {
    let roots = gspt::reduced_roots::<f64>()?;
    let a2 = 2f64.powf(5.0 / 11.0);
    let mut worst: f64 = if roots.len() == 2 { roots[0].abs().max((roots[1] - a2).abs()) } else { f64::INFINITY };
    for r in gspt::equilibria_and_eigen(exps)? {
        let expected = if r.a_value.abs() < 0.5 { [10.0 / 11.0, 75.0 / 22.0, -75.0 / 22.0] } else { [-2.0, -7.5, 7.5] };
        for (got, want) in [r.eigen_a, r.eigen_r, r.eigen_b].into_iter().zip(expected) {
            let (got, want): (f64, f64) = (got, want);
            worst = worst.max((got - want).abs());
        }
    }
    Ok(worst)
}

fn invariant_regions(ul: State, ur: State) -> Result<usize> {
    let s = singular_shock_data(ul, ur)?.s;
    let left = gspt::invariant_region_check(&InvariantRegionSpec::left_of(ul, InvariantRegionSpec::e_midpoint(ul), s), &FrozenParams::at(ul, s), 200);
    let right = gspt::invariant_region_check(&InvariantRegionSpec::right_of(ur, InvariantRegionSpec::e_midpoint(ur), s), &FrozenParams::at(ur, s), 200);
    let bad: usize = left.curves.iter().chain(&right.curves).map(|c| c.violations.len()).sum();
    Ok(bad + usize::from(!left.precondition_ok) + usize::from(!right.precondition_ok))
}

/// Single shock on the 2-curve at a coarse grid: relative speed error.
fn fv_shock() -> Result<f64> {
    let ul = State::new(1.0, -3.0);
    let v = 4.0;
    let ur = State::new(v, eval_curve(CurveKind::S2, ul, v)?);
    let s = shock_speed(ul, v, Family::Two)?;
    let grid = Grid1D::new(-0.5, 1.5, 800)?;
    let snaps = fv::simulate(ul, ur, &grid, &SimConfig::new(0.45, 1.0).with_snapshots(0.25, 8))?;
    let s_hat = fv::measure_front_speed(&snaps, &grid, Component::V, 0.5 * (ul.v + ur.v))?;
    Ok(((s_hat - s) / s).abs())
}

pub fn run(cfg: &Config, with_fv: bool) -> Result<Report> {
    let mut checks = vec![check("eigen_residual", eigen_residual(), 1e-10), check("rankine_hugoniot", rankine_hugoniot(), 1e-10)];
    checks.push(match special_points() {
        Ok(e) => check("special_points", e, 1e-6),
        Err(e) => failed("special_points", 1e-6, e),
    });
    checks.push(check("riemann_round_trip", riemann_round_trip(cfg), 1e-8));
    let (ul, ur) = (State::new(1.0, -3.0), State::new(8.0, -5.66));
    checks.push(match singular_shock_data(ul, ur) {
        Ok(d) => {
            let err = (d.s - 0.3275).abs().max((d.k - 0.00385).abs());
            let mut c = check("singular_shock", err, 1e-9);
            c.pass &= d.oc1 && d.oc2;
            c
        }
        Err(e) => failed("singular_shock", 1e-9, e),
    });
    match inner_orbit(cfg) {
        Ok((fit, parabola)) => {
            checks.push(check("inner_asymptotics", fit, 1.0));
            checks.push(check("parabola_invariance", parabola, 1e-8));
        }
        Err(e) => checks.push(failed("inner_asymptotics", 1.0, e)),
    }
    checks.push(match tail_scaling() {
        Ok(e) => check("tail_scaling", e, 0.03),
        Err(e) => failed("tail_scaling", 0.03, e),
    });
    checks.push(match chart2(&cfg.exps) {
        Ok(e) => check("chart2_equilibria", e, 1e-6),
        Err(e) => failed("chart2_equilibria", 1e-6, e),
    });
    checks.push(match invariant_regions(ul, ur) {
        Ok(bad) => check("invariant_regions", bad as f64, 0.0),
        Err(e) => failed("invariant_regions", 0.0, e),
    });
    if with_fv {
        checks.push(match fv_shock() {
            Ok(e) => check("fv_shock_speed", e, 0.02),
            Err(e) => failed("fv_shock_speed", 0.02, e),
        });
    }
    let all_pass = checks.iter().all(|c| c.pass);
    Ok(Report { checks, all_pass })
}
