//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. The finite-volume criterion takes a few minutes.

use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use chroma_core::curves::{eval_curve, shock_speed, tangency_points, CurveKind};
use chroma_core::fv::{self, Component, DeficitConfig};
use chroma_core::gspt::{self, InvariantRegionSpec};
use chroma_core::inner::{self, Direction, InnerConfig};
use chroma_core::model::{eigen, speeds, Family};
use chroma_core::riemann::{singular_shock_data, solve};
use chroma_core::{AsymptoticFit, Eigen, FrozenParams, Grid1D, InnerState, PhysParams, RegularizationExponents, SimConfig, State, Wave, WaveCurve};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn rel(x: f64, t: f64) -> f64 {
    ((x - t) / t).abs()
}

fn random_triangle_state(rng: &mut StdRng, p: &PhysParams) -> State {
    let tri = p.triangle();
    loop {
        let v = rng.gen_range(tri.a.v..tri.b.v);
        let y = rng.gen_range(tri.b.y..0.0);
        let u = State::new(v, y);
        if tri.contains(u) && u.discriminant() > 1e-9 {
            return u;
        }
    }
}

fn random_anchor(rng: &mut StdRng) -> State {
    let v = rng.gen_range(0.2..5.0);
    State::new(v, -(4.0 * v).sqrt() * (1.0 + rng.gen_range(0.05..2.0)))
}

fn eigen_flux_suite() -> Outcome {
    let t0 = Instant::now();
    let p = PhysParams::default();
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let u = random_triangle_state(&mut rng, &p);
        let (v, y) = (u.v, u.y);
        let j = [[-y / (v * v), 1.0 / v], [-1.0 / (v * v), 0.0]];
        let norm = j.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        let Ok(Eigen::Strict(fields)) = eigen(u) else {
            return Err(format!("state ({v}, {y}) not strictly hyperbolic"));
        };
        for f in fields {
            let [e0, e1] = f.eigvec;
            let r0 = j[0][0] * e0 + j[0][1] * e1 - f.lambda * e0;
            let r1 = j[1][0] * e0 + j[1][1] * e1 - f.lambda * e1;
            worst = worst.max(r0.hypot(r1) / ((norm + f.lambda.abs()) * e0.hypot(e1)));
        }
    }
    let mut coincide: f64 = 0.0;
    for _ in 0..1000 {
        let v: f64 = rng.gen_range(0.01..10.0);
        let (l1, l2) = speeds(State::new(v, -2.0 * v.sqrt()));
        coincide = coincide.max(rel(l1, l2));
    }
    let secs = t0.elapsed().as_secs_f64();
    ensure(
        worst <= 1e-10 && coincide <= 1e-12 && secs < 1.0,
        format!("eigen residual {worst:.2e}, |l1-l2| on parabola {coincide:.2e}, {secs:.3} s"),
    )
}

fn rankine_hugoniot() -> Outcome {
    let t0 = Instant::now();
    let mut rng = StdRng::seed_from_u64(2);
    let (mut rh, mut speed, mut n) = (0.0f64, 0.0f64, 0);
    while n < 500 {
        let ul = random_anchor(&mut rng);
        let v = ul.v * rng.gen_range(0.05..5.0);
        for (kind, fam) in [(CurveKind::S1, Family::One), (CurveKind::S2, Family::Two)] {
            let y = eval_curve(kind, ul, v).map_err(|e| e.to_string())?;
            let s = shock_speed(ul, v, fam).map_err(|e| e.to_string())?;
            let u = State::new(v, y);
            let (fl, fr) = (ul.flux_raw(), u.flux_raw());
            let scale = 1.0 + fl[0].abs().max(fr[0].abs()) + fl[1].abs().max(fr[1].abs());
            rh = rh.max((fr[0] - fl[0] - s * (u.v - ul.v)).abs() / scale);
            rh = rh.max((fr[1] - fl[1] - s * (u.y - ul.y)).abs() / scale);
            // textbook form of the speeds, with its cancellation left in
            let sd = ul.discriminant().sqrt();
            let closed = match fam {
                Family::One => (-ul.y - sd) / (2.0 * v * ul.v),
                Family::Two => (-ul.y + sd) / (2.0 * v * ul.v),
            };
            speed = speed.max(rel(s, closed));
        }
        n += 1;
    }
    let secs = t0.elapsed().as_secs_f64();
    ensure(
        rh <= 1e-10 && speed <= 1e-12 && secs < 1.0,
        format!("RH residual {rh:.2e}, speed formula error {speed:.2e}, {secs:.3} s"),
    )
}

fn special_points() -> Outcome {
    let ul = State::new(1.0, -3.0);
    let (g, d) = tangency_points(ul).map_err(|e| e.to_string())?;
    let err = [g.v - 0.145898, g.y + 0.763932, d.v - 6.854102, d.y + 5.236068]
        .iter()
        .fold(0.0f64, |m, e| m.max(e.abs()));
    let curve = |k| WaveCurve::new(k, ul).unwrap();
    let member = [
        curve(CurveKind::Parabola4v).residual(g),
        curve(CurveKind::R1).residual(g),
        curve(CurveKind::Parabola4v).residual(d),
        curve(CurveKind::S2).residual(d),
    ]
    .iter()
    .fold(0.0f64, |m, e| m.max(e.abs()));
    ensure(
        err <= 1e-6 && member <= 1e-10,
        format!("U_G = ({:.6}, {:.6}), U_D = ({:.6}, {:.6}), value error {err:.1e}, membership {member:.1e}", g.v, g.y, d.v, d.y),
    )
}

fn riemann_round_trip() -> Outcome {
    let p = PhysParams::default();
    let mut rng = StdRng::seed_from_u64(4);
    let (mut worst, mut n, mut regions) = (0.0f64, 0, [0usize; 5]);
    let mut attempts = 0;
    while n < 500 {
        attempts += 1;
        if attempts > 5000 {
            return Err(format!("only {n} classical samples constructed"));
        }
        let ul = random_anchor(&mut rng);
        let (g, _) = tangency_points(ul).unwrap();
        let vm = g.v * 1.001 + (3.0 * ul.v - g.v) * rng.gen::<f64>();
        let um = State::new(vm, eval_curve(CurveKind::R1, ul, vm).unwrap());
        let vd = um.k_invariant().powi(2) / 4.0;
        let vr = 0.05 * vm + (vd - 0.05 * vm) * rng.gen::<f64>() * 0.999;
        let ur = State::new(vr, eval_curve(CurveKind::R2, um, vr).unwrap());
        let sol = solve(ul, ur, &p).map_err(|e| e.to_string())?;
        if sol.region > 4 || sol.states.len() != 3 {
            continue;
        }
        regions[sol.region as usize] += 1;
        let err = sol.states[1].dist(&um) / (1.0 + um.v + um.y.abs());
        worst = worst.max(err);
        for w in sol.waves.windows(2) {
            if w[0].speed_range().1 >= w[1].speed_range().0 {
                return Err(format!("speeds not ordered for ({}, {}) -> ({}, {})", ul.v, ul.y, ur.v, ur.y));
            }
        }
        n += 1;
    }
    // region 5: vacuum fans along the parabola
    let (mut fan, mut n5) = (0.0f64, 0);
    while n5 < 200 {
        let ul = random_anchor(&mut rng);
        let ur = State::new(rng.gen_range(0.01..10.0), rng.gen_range(-10.0..-0.1));
        if ur.discriminant() <= 1e-6 || ur.k_invariant() >= 4.0 / ul.w_invariant() {
            continue;
        }
        let sol = solve(ul, ur, &p).map_err(|e| e.to_string())?;
        if sol.region != 5 {
            return Err(format!("K_R < K_G but region {}", sol.region));
        }
        for w in &sol.waves {
            if let Wave::ParabolaRarefaction { xi_lo, xi_hi, .. } = *w {
                for i in 0..=20 {
                    let u = sol.evaluate(xi_lo + (xi_hi - xi_lo) * i as f64 / 20.0).0;
                    fan = fan.max((u.y * u.y - 4.0 * u.v).abs() / (1.0 + u.y * u.y));
                }
            }
        }
        n5 += 1;
    }
    ensure(
        worst <= 1e-8 && fan <= 1e-10,
        format!("{n} classical data (regions 1-4: {:?}), intermediate error {worst:.2e}; {n5} region-5 fans, parabola residual {fan:.2e}", &regions[1..]),
    )
}

fn singular_arithmetic() -> Outcome {
    let (ul, ur) = (State::new(1.0, -3.0), State::new(8.0, -5.66));
    let d = singular_shock_data(ul, ur).map_err(|e| e.to_string())?;
    let (l1l, l2r) = (speeds(ul).0, speeds(ur).1);
    ensure(
        (d.s - 0.3275).abs() <= 1e-9 && (d.k - 0.00385).abs() <= 1e-9 && d.s < l1l && d.s > l2r,
        format!("s = {:.10}, k = {:.10}, lambda2(U_R) = {l2r:.6} < s < lambda1(U_L) = {l1l:.6}", d.s, d.k),
    )
}

fn inner_asymptotics() -> Outcome {
    let t0 = Instant::now();
    let cfg = InnerConfig::<f64>::default();
    let orbit = inner::integrate_homoclinic(InnerState::new(1.0, 1.0), (-1e3, 1e7), &cfg).map_err(|e| e.to_string())?;
    let fit = inner::fit_asymptotics(&orbit).map_err(|e| e.to_string())?;
    let th = AsymptoticFit::theory();
    // invariance: an orbit started on the curve, with relative error control only
    let rel_cfg = InnerConfig { atol: 1e-30, ..cfg };
    let on = inner::integrate(InnerState::on_parabola(1.0), 0.0, (-0.5, 1e4), Direction::Both, &rel_cfg).map_err(|e| e.to_string())?;
    let parabola = on
        .samples
        .iter()
        .map(|s| InnerState::new(s.y[0], s.y[1]).parabola_residual().abs())
        .fold(0.0, f64::max);
    let secs = t0.elapsed().as_secs_f64();
    let (ep, er, ec, ed) = (rel(fit.p, th.p), rel(fit.r, th.r), rel(fit.c, th.c), rel(fit.d, th.d));
    ensure(
        ep <= 0.02 && er <= 0.02 && ec <= 0.05 && ed <= 0.05 && parabola <= 1e-8 && secs < 10.0,
        format!(
            "p = {:.4} ({:.2}%), r = {:.4} ({:.2}%), c = {:.5} ({:.2}%), d = {:.5} ({:.2}%), parabola residual {parabola:.1e}, {secs:.2} s",
            fit.p,
            100.0 * ep,
            fit.r,
            100.0 * er,
            fit.c,
            100.0 * ec,
            fit.d,
            100.0 * ed
        ),
    )
}

fn tail_scalings() -> Outcome {
    let eps: Vec<f64> = (0..=8).map(|i| 10f64.powf(-4.0 + 0.25 * i as f64)).collect();
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for b3 in [5.25, 5.5, 5.75] {
        for b2 in [8.0, 10.0] {
            let (e1, e2) = inner::tail_scaling(b2, b3, &eps).map_err(|e| e.to_string())?;
            worst = worst.max((e1 - (6.0 - b3)).abs()).max((e2 - (5.0 - b2 / 2.0)).abs());
            rows.push(format!("({b3}, {b2}) -> ({e1:.3}, {e2:.3})"));
        }
    }
    ensure(worst <= 0.03, format!("max exponent error {worst:.1e}; {}", rows.join(", ")))
}

fn chart2_equilibria() -> Outcome {
    let roots = gspt::reduced_roots::<f64>().map_err(|e| e.to_string())?;
    let a2 = 2f64.powf(5.0 / 11.0);
    if roots.len() != 2 {
        return Err(format!("roots {roots:?}"));
    }
    let root_err = roots[0].abs().max((roots[1] - a2).abs());
    let reports = gspt::equilibria_and_eigen(&RegularizationExponents::default()).map_err(|e| e.to_string())?;
    let mut eig_err: f64 = 0.0;
    let mut found = Vec::new();
    for r in &reports {
        let expected = if r.a_value.abs() < 0.5 { [10.0 / 11.0, 75.0 / 22.0, -75.0 / 22.0] } else { [-2.0, -7.5, 7.5] };
        let got = [r.eigen_a, r.eigen_r, r.eigen_b];
        for (g, w) in got.iter().zip(expected) {
            eig_err = eig_err.max((g - w).abs());
        }
        found.push(format!("a = {:.6}: ({:.6}, {:.6}, {:.6})", r.a_value, got[0], got[1], got[2]));
    }
    ensure(
        root_err <= 1e-10 && eig_err <= 1e-6 && reports.len() == 2,
        format!("root error {root_err:.1e}, eigenvalue error {eig_err:.1e}; {}", found.join("; ")),
    )
}

fn invariant_regions() -> Outcome {
    let (ul, ur) = (State::new(1.0, -3.0), State::new(8.0, -5.66));
    let s = singular_shock_data(ul, ur).map_err(|e| e.to_string())?.s;
    let left = InvariantRegionSpec::left_of(ul, InvariantRegionSpec::e_midpoint(ul), s);
    let right = InvariantRegionSpec::right_of(ur, InvariantRegionSpec::e_midpoint(ur), s);
    let rl = gspt::invariant_region_check(&left, &FrozenParams::at(ul, s), 200);
    let rr = gspt::invariant_region_check(&right, &FrozenParams::at(ur, s), 200);
    let summary: Vec<String> = [("left", &rl), ("right", &rr)]
        .iter()
        .flat_map(|(side, r)| r.curves.iter().map(move |c| format!("{side}/{} {}/{}", c.name, c.consistent, c.samples)))
        .collect();
    ensure(rl.invariant() && rr.invariant(), summary.join(", "))
}

fn fv_validation() -> Outcome {
    let t0 = Instant::now();
    let mut msgs = Vec::new();
    let mut ok = true;

    // classical: two shocks, each picked out by its own xi window
    let (ul, ur) = (State::new(1.0, -3.0), State::new(3.0, -4.2));
    let sol = solve(ul, ur, &PhysParams::default()).map_err(|e| e.to_string())?;
    let shocks: Vec<(f64, State, State)> = sol
        .waves
        .iter()
        .filter_map(|w| match *w {
            Wave::Shock { speed, left, right, .. } => Some((speed, left, right)),
            _ => None,
        })
        .collect();
    if shocks.len() != 2 {
        return Err(format!("expected two classical shocks, got {:?}", sol.waves));
    }
    let grid = Grid1D::new(-0.25, 1.5, 4000).map_err(|e| e.to_string())?;
    let cfg = SimConfig::new(0.45, 1.0).with_snapshots(0.25, 16);
    let snaps = fv::simulate(ul, ur, &grid, &cfg).map_err(|e| e.to_string())?;
    let split = 0.5 * (shocks[0].0 + shocks[1].0);
    for (i, &(s, l, r)) in shocks.iter().enumerate() {
        let window = if i == 0 { (-0.2, split) } else { (split, 1.45) };
        let s_hat = fv::measure_front_speed_within(&snaps, &grid, Component::V, 0.5 * (l.v + r.v), window).map_err(|e| e.to_string())?;
        let e = rel(s_hat, s);
        ok &= e <= 0.02;
        msgs.push(format!("s{} {s_hat:.5} vs {s:.5} ({:.2}%)", i + 1, 100.0 * e));
    }

    // region 6
    let (ul, ur) = (State::new(1.0, -3.0), State::new(8.0, -5.66));
    let d = singular_shock_data(ul, ur).map_err(|e| e.to_string())?;
    let cfg = SimConfig::new(0.45, 2.0).with_snapshots(0.5, 16);
    let deficit = DeficitConfig::for_pair(ul, ur);
    let rows = fv::refinement_study(ul, ur, (-0.25, 1.405), &[1000, 2000, 4000, 8000], &cfg, Some(&deficit), None).map_err(|e| e.to_string())?;
    let fine = rows.last().unwrap();
    let (s_hat, k_hat) = (fine.s_hat.unwrap(), fine.k_hat.unwrap());
    let (es, ek) = (rel(s_hat, d.s), rel(k_hat, d.k));
    ok &= es <= 0.02 && ek <= 0.15;
    msgs.push(format!("n=8000 s {s_hat:.5} ({:.2}%), k {k_hat:.5} ({:.1}%)", 100.0 * es, 100.0 * ek));
    let peaks: Vec<f64> = rows.iter().map(|r| r.peak_y).collect();
    let monotone = peaks.windows(2).all(|w| w[1] > w[0]);
    ok &= monotone;
    msgs.push(format!("peak y {:?}", peaks.iter().map(|p| (p * 1e3).round() / 1e3).collect::<Vec<_>>()));
    let (up, down) = fine.excursions.unwrap();
    ok &= up > down;
    msgs.push(format!("max(y-v) {up:.3} > max(v-y) {down:.3}"));
    msgs.push(format!("{:.0} s", t0.elapsed().as_secs_f64()));
    ensure(ok, msgs.join("; "))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("eigen/flux suite", eigen_flux_suite),
        ("Rankine-Hugoniot exactness", rankine_hugoniot),
        ("special points", special_points),
        ("Riemann round-trip", riemann_round_trip),
        ("singular-shock arithmetic", singular_arithmetic),
        ("inner-orbit asymptotics", inner_asymptotics),
        ("tail scalings", tail_scalings),
        ("chart-2 equilibria", chart2_equilibria),
        ("invariant regions", invariant_regions),
        ("finite-volume validation", fv_validation),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg}", i + 1),
            Err(msg) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
