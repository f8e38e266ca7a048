//! The inner system of the singular-shock layer
//!
//! ```text
//! dy1/deta = (5/2) (y1^(18/5) / y2^3 - 2 y1^(7/5))
//! dy2/deta = (5/2) y1^(13/5) / y2^2 - 4 y2 y1^(2/5)
//! ```
//!
//! whose orbits leave and return to the degenerate equilibrium at the origin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ode::{hermite, Control, Dopri5, Step};
use crate::numerics::quad::{gauss_legendre5, integrate_to_infinity};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerState<S> {
    pub y1: S,
    pub y2: S,
}

impl<S: Scalar> InnerState<S> {
    pub const fn new(y1: S, y2: S) -> Self {
        Self { y1, y2 }
    }

    /// `y2 = 2^(1/3) y1^(11/15)`, the curve the forward tail hugs.
    pub fn on_parabola(y1: S) -> Self {
        Self::new(y1, parabola(y1))
    }

    /// `y2 / (2^(1/3) y1^(11/15)) - 1`.
    pub fn parabola_residual(&self) -> S {
        self.y2 / parabola(self.y1) - S::one()
    }
}

fn parabola<S: Scalar>(y1: S) -> S {
    S::lit(2.0).cbrt() * y1.powr(11, 15)
}

/// Amplitudes and exponents of `y1 ~ c eta^(-p)`, `y2 ~ d eta^(-r)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit<S> {
    pub c: S,
    pub d: S,
    pub p: S,
    pub r: S,
}

impl<S: Scalar> AsymptoticFit<S> {
    /// Values forced by balancing the leading powers in the vector field.
    pub fn theory() -> Self {
        let two_thirds = S::lit(2.0 / 3.0);
        Self {
            c: two_thirds.powr(5, 2),
            d: S::lit(3.0).cbrt() * two_thirds.powr(13, 6),
            p: S::lit(2.5),
            r: S::lit(11.0 / 6.0),
        }
    }
}

#[inline]
fn rhs_raw<S: Scalar>(y1: S, y2: S) -> [S; 2] {
    let h = S::lit(2.5);
    let q = y1.powr(1, 5);
    let y1_25 = q * q;
    let y1_75 = y1 * y1_25;
    let y1_135 = y1 * y1 * q * q * q;
    let y1_185 = y1_135 * y1;
    [
        h * (y1_185 / (y2 * y2 * y2) - S::lit(2.0) * y1_75),
        h * y1_135 / (y2 * y2) - S::lit(4.0) * y2 * y1_25,
    ]
}

pub fn rhs_inner<S: Scalar>(y: InnerState<S>) -> Result<[S; 2]> {
    if !(y.y1 > S::zero() && y.y2 > S::zero()) {
        return Err(Error::Domain(format!(
            "inner system needs y1, y2 > 0, got ({}, {})",
            y.y1, y.y2
        )));
    }
    Ok(rhs_raw(y.y1, y.y2))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerConfig<S> {
    pub rtol: S,
    pub atol: S,
    /// Integration halts once `max(y1, y2)` drops below this.
    pub floor: S,
    /// `BlowUp` is raised once `max(y1, y2)` exceeds this.
    pub bound: S,
}

impl<S: Scalar> Default for InnerConfig<S> {
    fn default() -> Self {
        Self {
            rtol: S::lit(1e-10),
            atol: S::lit(1e-12),
            floor: S::lit(1e-8),
            bound: S::lit(1e4),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Backward,
    Both,
}

/// Orbit samples ordered by increasing `eta`, each with its derivative so
/// that the trajectory can be interpolated.
#[derive(Clone, Debug, PartialEq)]
pub struct InnerOrbit<S> {
    pub samples: Vec<Step<S, 2>>,
    pub eta0: S,
    pub direction: Direction,
    /// Whether the floor was reached at the forward / backward end.
    pub forward_complete: bool,
    pub backward_complete: bool,
}

impl<S: Scalar> InnerOrbit<S> {
    pub fn eta_range(&self) -> (S, S) {
        (self.samples[0].t, self.samples[self.samples.len() - 1].t)
    }

    /// State at `eta` by cubic Hermite interpolation; `None` outside the
    /// sampled range.
    pub fn interpolate(&self, eta: S) -> Option<InnerState<S>> {
        let (lo, hi) = self.eta_range();
        if eta < lo || eta > hi {
            return None;
        }
        let i = self.samples.partition_point(|s| s.t <= eta).clamp(1, self.samples.len() - 1);
        let y = hermite(&self.samples[i - 1], &self.samples[i], eta);
        Some(InnerState::new(y[0], y[1]))
    }

    pub fn last(&self) -> InnerState<S> {
        let s = self.samples[self.samples.len() - 1];
        InnerState::new(s.y[0], s.y[1])
    }

    /// Forward part cut at `eta_max`, as if integration had stopped there.
    pub fn truncated(&self, eta_max: S) -> Self {
        let samples: Vec<_> = self.samples.iter().copied().filter(|s| s.t <= eta_max).collect();
        Self {
            samples,
            forward_complete: false,
            ..self.clone()
        }
    }
}

fn integrate_one<S: Scalar>(y0: InnerState<S>, eta0: S, eta_end: S, cfg: &InnerConfig<S>) -> Result<(Vec<Step<S, 2>>, bool)> {
    rhs_inner(y0)?;
    let mut reached = false;
    let steps = Dopri5::with_tol(cfg.rtol, cfg.atol).integrate(
        |_, y: &[S; 2]| (y[0] > S::zero() && y[1] > S::zero()).then(|| rhs_raw(y[0], y[1])),
        eta0,
        [y0.y1, y0.y2],
        eta_end,
        |s| {
            let m = s.y[0].max(s.y[1]);
            if m > cfg.bound || !m.is_finite() {
                return Err(Error::BlowUp { eta: s.t.as_f64() });
            }
            if m < cfg.floor {
                reached = true;
                return Ok(Control::Stop);
            }
            Ok(Control::Continue)
        },
    )?;
    Ok((steps, reached))
}

/// Integrates from `y0` at `eta = eta_span.0.max(..)`: forward up to
/// `eta_span.1`, backward down to `eta_span.0`, or both, halting at the floor.
pub fn integrate<S: Scalar>(
    y0: InnerState<S>,
    eta0: S,
    eta_span: (S, S),
    direction: Direction,
    cfg: &InnerConfig<S>,
) -> Result<InnerOrbit<S>> {
    let (mut back, mut fwd) = (Vec::new(), Vec::new());
    let (mut back_ok, mut fwd_ok) = (false, false);
    if matches!(direction, Direction::Backward | Direction::Both) {
        let (s, ok) = integrate_one(y0, eta0, eta_span.0, cfg)?;
        back = s;
        back_ok = ok;
    }
    if matches!(direction, Direction::Forward | Direction::Both) {
        let (s, ok) = integrate_one(y0, eta0, eta_span.1, cfg)?;
        fwd = s;
        fwd_ok = ok;
    }
    back.reverse();
    if !back.is_empty() && !fwd.is_empty() {
        back.pop();
    }
    back.extend(fwd);
    Ok(InnerOrbit {
        samples: back,
        eta0,
        direction,
        forward_complete: fwd_ok,
        backward_complete: back_ok,
    })
}

/// Both halves of the orbit through `y0` at `eta = 0`; fails unless both ends
/// reach the origin floor inside `eta_span`.
pub fn integrate_homoclinic<S: Scalar>(y0: InnerState<S>, eta_span: (S, S), cfg: &InnerConfig<S>) -> Result<InnerOrbit<S>> {
    let orbit = integrate(y0, S::zero(), eta_span, Direction::Both, cfg)?;
    if !(orbit.forward_complete && orbit.backward_complete) {
        return Err(Error::Domain(format!(
            "orbit did not reach the floor {} within eta in [{}, {}]",
            cfg.floor, eta_span.0, eta_span.1
        )));
    }
    Ok(orbit)
}

/// Least-squares slope and intercept of `ln y` against `ln x`.
fn loglog_fit<S: Scalar>(pts: &[(S, S)]) -> (S, S) {
    let n = S::from_count(pts.len());
    let (mut sx, mut sy, mut sxx, mut sxy) = (S::zero(), S::zero(), S::zero(), S::zero());
    for &(x, y) in pts {
        let (lx, ly) = (x.ln(), y.ln());
        sx = sx + lx;
        sy = sy + ly;
        sxx = sxx + lx * lx;
        sxy = sxy + lx * ly;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (slope, (sy - slope * sx) / n)
}

/// Number of decades of forward tail, measured from `eta = 1`.
pub fn tail_decades<S: Scalar>(orbit: &InnerOrbit<S>) -> S {
    let (_, hi) = orbit.eta_range();
    let start = orbit.eta0.max(S::one());
    if hi <= start {
        S::zero()
    } else {
        (hi / start).log10()
    }
}

/// Power-law fit over the final decade of the forward tail.
pub fn fit_asymptotics<S: Scalar>(orbit: &InnerOrbit<S>) -> Result<AsymptoticFit<S>> {
    let decades = tail_decades(orbit);
    if decades < S::lit(2.0) {
        return Err(Error::InsufficientTail {
            decades: decades.as_f64(),
            required: 2.0,
        });
    }
    let (_, hi) = orbit.eta_range();
    let lo = hi / S::lit(10.0);
    let n = 200;
    let (mut p1, mut p2) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for i in 0..n {
        let eta = lo * (S::lit(10.0).ln() * S::from_count(i) / S::from_count(n - 1)).exp();
        let y = orbit.interpolate(eta.min(hi)).expect("eta inside the sampled range");
        p1.push((eta, y.y1));
        p2.push((eta, y.y2));
    }
    let (s1, b1) = loglog_fit(&p1);
    let (s2, b2) = loglog_fit(&p2);
    Ok(AsymptoticFit {
        c: b1.exp(),
        d: b2.exp(),
        p: -s1,
        r: -s2,
    })
}

/// The two far-field contributions to the generalized jump, evaluated with
/// the leading-order tails `y1 ~ eta^(-5/2)`, `y2 ~ eta^(-11/6)` from
/// `eta = 1` onward, after integrating `eta d/deta(...)` by parts.
pub fn tail_integrals<S: Scalar>(beta2: S, beta3: S, eps: S) -> Result<(S, S)> {
    let tol = S::lit(1e-10);
    let half3 = S::lit(1.5);
    let e3 = eps.powf(beta3);
    let e2 = eps.powf(beta2);
    let g1 = |eta: S| eta.powr(-11, 6) / (eta.powr(-5, 3) + e3).powf(half3);
    let g2 = |eta: S| eta.powr(-11, 3) / (eta.powr(-8, 3) + e2).powf(half3);
    let eta0 = S::one();
    // boundary terms from the lower limit; the ones at infinity vanish
    let i1 = eps.powi(6) * (eta0 * g1(eta0) + integrate_to_infinity(g1, eta0, tol)?);
    let i2 = eps.powi(5) * (eta0 * g2(eta0) + integrate_to_infinity(g2, eta0, tol)?);
    Ok((i1, i2))
}

/// Log–log slopes of the two tail integrals over `eps_grid`.
pub fn tail_scaling<S: Scalar>(beta2: S, beta3: S, eps_grid: &[S]) -> Result<(S, S)> {
    let (lo, hi) = eps_grid
        .iter()
        .fold((S::infinity(), S::zero()), |(a, b), &e| (a.min(e), b.max(e)));
    if eps_grid.len() < 3 || !(lo > S::zero()) || (hi / lo).log10() < S::lit(2.0) - S::lit(1e-9) {
        return Err(Error::InvalidParameter(
            "eps grid needs at least three positive values spanning two decades".into(),
        ));
    }
    let mut p1 = Vec::with_capacity(eps_grid.len());
    let mut p2 = Vec::with_capacity(eps_grid.len());
    for &eps in eps_grid {
        let (i1, i2) = tail_integrals(beta2, beta3, eps)?;
        p1.push((eps, i1));
        p2.push((eps, i2));
    }
    Ok((loglog_fit(&p1).0, loglog_fit(&p2).0))
}

/// Power-law continuation of the forward tail beyond the last sample:
/// exact exponents with the theoretical amplitudes, shifted in `eta` so both
/// components match the last sample.
#[derive(Clone, Copy, Debug)]
struct TailExtension<S> {
    eta_end: S,
    c: S,
    d: S,
    shift1: S,
    shift2: S,
}

impl<S: Scalar> TailExtension<S> {
    fn new(orbit: &InnerOrbit<S>) -> Self {
        let th = AsymptoticFit::<S>::theory();
        let (_, eta_end) = orbit.eta_range();
        let y = orbit.last();
        Self {
            eta_end,
            c: th.c,
            d: th.d,
            shift1: eta_end - (th.c / y.y1).powf(th.p.recip()),
            shift2: eta_end - (th.d / y.y2).powf(th.r.recip()),
        }
    }

    fn at(&self, eta: S) -> (S, S) {
        (
            self.c * (eta - self.shift1).powf(-S::lit(2.5)),
            self.d * (eta - self.shift2).powr(-11, 6),
        )
    }
}

/// `eps^5 * integral of y2^2 / (y1^(16/15) + eps^beta2)^(3/2)` along the
/// orbit, optionally continued past the last sample by the tail power laws.
pub fn kappa<S: Scalar>(orbit: &InnerOrbit<S>, eps: S, beta2: S, extend_tail: bool) -> Result<S> {
    let e2 = eps.powf(beta2);
    let half3 = S::lit(1.5);
    let g = |y1: S, y2: S| y2 * y2 / (y1.powr(16, 15) + e2).powf(half3);
    let mut total = S::zero();
    for w in orbit.samples.windows(2) {
        total = total
            + gauss_legendre5(
                |eta| {
                    let y = hermite(&w[0], &w[1], eta);
                    g(y[0].max(S::zero()), y[1])
                },
                w[0].t,
                w[1].t,
            );
    }
    if extend_tail {
        let tail = TailExtension::new(orbit);
        total = total
            + integrate_to_infinity(
                |eta| {
                    let (y1, y2) = tail.at(eta);
                    g(y1, y2)
                },
                tail.eta_end,
                S::lit(1e-11),
            )?;
    }
    if !total.is_finite() {
        return Err(Error::QuadratureFailure(format!("deficit integral not finite at eps = {eps}")));
    }
    Ok(eps.powi(5) * total)
}

/// `kappa(eps)` for each entry of `eps_grid`.
pub fn kappa_curve<S: Scalar>(orbit: &InnerOrbit<S>, eps_grid: &[S], beta2: S, extend_tail: bool) -> Result<Vec<S>> {
    eps_grid.iter().map(|&e| kappa(orbit, e, beta2, extend_tail)).collect()
}

/// Outcome of [`deficit_limit`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeficitLimit<S> {
    pub kappa: S,
    pub samples: Vec<(S, S)>,
}

/// Limit of `kappa(eps)` as `eps -> 0` with the tail extension and
/// `beta2 = 10`.
///
/// `eps_grid` must be decreasing; the last three values must agree to
/// `rel_tol` and be positive, and the limit is their Aitken extrapolation
/// when that is well conditioned.
pub fn deficit_limit<S: Scalar>(orbit: &InnerOrbit<S>, eps_grid: &[S], rel_tol: S) -> Result<DeficitLimit<S>> {
    deficit_limit_with(orbit, eps_grid, rel_tol, S::lit(10.0), true)
}

pub fn deficit_limit_with<S: Scalar>(
    orbit: &InnerOrbit<S>,
    eps_grid: &[S],
    rel_tol: S,
    beta2: S,
    extend_tail: bool,
) -> Result<DeficitLimit<S>> {
    if eps_grid.len() < 3 || eps_grid.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter(
            "eps grid needs at least three strictly decreasing values".into(),
        ));
    }
    let ks = kappa_curve(orbit, eps_grid, beta2, extend_tail)?;
    let samples: Vec<(S, S)> = eps_grid.iter().copied().zip(ks.iter().copied()).collect();
    let n = ks.len();
    let (a, b, c) = (ks[n - 3], ks[n - 2], ks[n - 1]);
    let spread = (a - b).abs().max((b - c).abs()).max((a - c).abs());
    if !(c > S::zero()) || spread > rel_tol * c.abs() {
        return Err(Error::NonConvergent(format!(
            "last three values {a}, {b}, {c} differ by more than {rel_tol} relative"
        )));
    }
    let den = a - S::lit(2.0) * b + c;
    let aitken = c - (c - b) * (c - b) / den;
    let kappa = if den != S::zero() && aitken.is_finite() && (aitken - c).abs() <= spread {
        aitken
    } else {
        c
    };
    Ok(DeficitLimit { kappa, samples })
}
