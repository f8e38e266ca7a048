//! Independent oracles: closed forms and direct arithmetic recomputed here
//! without going through the library's own formulas.

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use chroma_core::fv::{self, Component};
use chroma_core::gspt;
use chroma_core::inner::{self, InnerConfig};
use chroma_core::model::{from_conserved, to_conserved, to_conserved_omega};
use chroma_core::riemann::{classify_pair, singular_shock_data, solve};
use chroma_core::{AsymptoticFit, Grid1D, InnerState, PhysParams, PhysState, SimConfig, State};

/// Speed from the first jump condition and the residual of the second, for
/// the flux `(y/v, 1/v)`.
fn jump_oracle(ul: State, ur: State) -> (f64, f64) {
    let s = (ul.y / ul.v - ur.y / ur.v) / (ul.v - ur.v);
    let k = (1.0 / ul.v - 1.0 / ur.v) - s * (ul.y - ur.y);
    (s, k)
}

#[test]
fn singular_shock_matches_jump_arithmetic() {
    let (ul, ur) = (State::new(1.0, -3.0), State::new(8.0, -5.66));
    let (s, k) = jump_oracle(ul, ur);
    // by hand: (-3 + 0.7075) / (1 - 8) and (1 - 0.125) - s (-3 + 5.66)
    assert!((s - 2.2925 / 7.0).abs() < 1e-15);
    assert!((k - (0.875 - s * 2.66)).abs() < 1e-15);
    let d = singular_shock_data(ul, ur).unwrap();
    assert!((d.s - s).abs() < 1e-14 && (d.k - k).abs() < 1e-14);
}

#[test]
fn closed_form_constants() {
    // reduced chart-2 field -(5/11) a (a^(11/5) - 2) vanishes at 2^(5/11)
    let roots = gspt::reduced_roots::<f64>().unwrap();
    assert!((roots[1] - 2f64.powf(5.0 / 11.0)).abs() < 1e-12);
    let th = AsymptoticFit::theory();
    assert!((th.c - (2.0f64 / 3.0).powf(2.5)).abs() < 1e-15);
    assert!((th.d - 3f64.cbrt() * (2.0f64 / 3.0).powf(13.0 / 6.0)).abs() < 1e-15);
    // deficit limit (3/4) d^2 c^(-16/15) reduces to 2^(-1/3)
    let closed = 0.75 * th.d * th.d * th.c.powf(-16.0 / 15.0);
    assert!((closed - 2f64.powf(-1.0 / 3.0)).abs() < 1e-12);
    let orbit = inner::integrate_homoclinic(InnerState::new(1.0, 1.0), (-1e3, 1e7), &InnerConfig::default()).unwrap();
    let kappa = inner::deficit_limit(&orbit, &[1e-1, 5e-2, 2e-2, 1e-2, 5e-3, 2e-3, 1e-3], 1e-3).unwrap().kappa;
    assert!((kappa - closed).abs() < 1e-3, "kappa {kappa}");
}

#[test]
fn single_shock_run_matches_jump_speed() {
    let ul = State::new(1.0, -3.0);
    let k = (9.0f64 - 4.0).sqrt() + 3.0;
    // line 2 m y + 4 v + m^2 = 0 with m = K
    let ur = State::new(4.0, -(16.0 + k * k) / (2.0 * k));
    let (s, resid) = jump_oracle(ul, ur);
    assert!(resid.abs() < 1e-14, "not a classical shock: {resid}");
    let grid = Grid1D::new(-0.5, 1.5, 1600).unwrap();
    let snaps = fv::simulate(ul, ur, &grid, &SimConfig::new(0.45, 1.0).with_snapshots(0.25, 8)).unwrap();
    let s_hat = fv::measure_front_speed(&snaps, &grid, Component::V, 2.5).unwrap();
    assert!(((s_hat - s) / s).abs() < 0.01, "{s_hat} vs {s}");
    // mass balance against the outflow recorded at the boundaries
    let first = &snaps[0];
    let last = snaps.last().unwrap();
    let (m0, m1) = (first.mass(grid.dx), last.mass(grid.dx));
    for c in 0..2 {
        let balance = m1[c] - m0[c] + (last.boundary_outflow[c] - first.boundary_outflow[c]);
        assert!(balance.abs() <= 1e-10 * (1.0 + m0[c].abs()), "component {c}: {balance:e}");
    }
}

proptest! {
    #[test]
    fn omega_route_agrees(u1 in 0.01f64..0.9, frac in 0.0f64..1.0) {
        let p = PhysParams::default();
        let ph = PhysState::new(u1, frac * u1);
        let a = to_conserved(ph, &p).unwrap();
        let b = to_conserved_omega(ph, &p).unwrap();
        prop_assert!(a.dist(&b) <= 1e-12 * (1.0 + a.v + a.y.abs()));
        let back = from_conserved(a, &p).unwrap();
        prop_assert!((back.u1 - ph.u1).abs() <= 1e-11 && (back.u2 - ph.u2).abs() <= 1e-11);
    }
}

/// Region 6 without a warning means an admissible singular shock that `solve`
/// builds; with a warning, `solve` refuses.
#[test]
fn region_six_admissibility() {
    let mut rng = StdRng::seed_from_u64(6);
    let p = PhysParams::default();
    let (mut admissible, mut refused) = (0, 0);
    for _ in 0..50_000 {
        let vl: f64 = rng.gen_range(0.2..5.0);
        let ul = State::new(vl, -(4.0 * vl).sqrt() * (1.0 + rng.gen_range(0.05..2.0)));
        let ur = State::new(rng.gen_range(0.01..10.0), rng.gen_range(-10.0..-0.1));
        if ur.discriminant() <= 1e-6 {
            continue;
        }
        let c = classify_pair(ul, ur, &p).unwrap();
        if c.region != 6 {
            continue;
        }
        let d = c.singular.unwrap();
        let (s, k) = jump_oracle(ul, ur);
        assert!((d.s - s).abs() <= 1e-12 * (1.0 + s.abs()));
        assert!((d.k - k).abs() <= 1e-12 * (1.0 + k.abs() + s.abs() * (ul.y - ur.y).abs()));
        if c.warning.is_none() {
            assert!(d.k > 0.0 && d.oc1 && d.oc2);
            let sol = solve(ul, ur, &p).unwrap();
            assert_eq!(sol.singular().map(|x| x.s), Some(d.s));
            admissible += 1;
        } else {
            assert!(solve(ul, ur, &p).is_err());
            refused += 1;
        }
    }
    assert!(admissible >= 50, "only {admissible} admissible region-6 samples ({refused} refused)");
}
