//! First-order finite-volume solver for Riemann data and the measurements
//! used to compare it against the exact solver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{spectral_radius, State};
use crate::riemann::RiemannSolution;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D<S> {
    pub x_lo: S,
    pub x_hi: S,
    pub n: usize,
    pub dx: S,
}

impl<S: Scalar> Grid1D<S> {
    pub fn new(x_lo: S, x_hi: S, n: usize) -> Result<Self> {
        if n < 16 || !(x_hi > x_lo) {
            return Err(Error::InvalidParameter(format!(
                "grid needs n >= 16 and x_hi > x_lo, got n = {n}, [{x_lo}, {x_hi}]"
            )));
        }
        Ok(Self {
            x_lo,
            x_hi,
            n,
            dx: (x_hi - x_lo) / S::from_count(n),
        })
    }

    pub fn center(&self, i: usize) -> S {
        self.x_lo + (S::from_count(i) + S::lit(0.5)) * self.dx
    }

    pub fn centers(&self) -> Vec<S> {
        (0..self.n).map(|i| self.center(i)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Global numerical viscosity `dx/dt`.
    LxF,
    /// Rusanov flux with the local spectral radius.
    LLxF,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig<S> {
    pub cfl: S,
    pub t_end: S,
    /// Lower bound on `v` inside flux and wave-speed evaluation only.
    pub v_floor: S,
    pub scheme: Scheme,
    /// Output times in `(0, t_end]`; only `t_end` when empty.
    pub snapshot_times: Vec<S>,
}

impl<S: Scalar> SimConfig<S> {
    pub fn new(cfl: S, t_end: S) -> Self {
        Self {
            cfl,
            t_end,
            v_floor: S::lit(1e-6),
            scheme: Scheme::LLxF,
            snapshot_times: Vec::new(),
        }
    }

    /// `count` equally spaced output times from `t0` to `t_end`.
    pub fn with_snapshots(mut self, t0: S, count: usize) -> Self {
        self.snapshot_times = if count < 2 {
            vec![self.t_end]
        } else {
            (0..count)
                .map(|i| t0 + (self.t_end - t0) * S::from_count(i) / S::from_count(count - 1))
                .collect()
        };
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > S::zero() && self.cfl <= S::lit(0.5)) {
            return Err(Error::InvalidParameter(format!("cfl must lie in (0, 0.5], got {}", self.cfl)));
        }
        if !(self.v_floor > S::zero()) {
            return Err(Error::InvalidParameter("v_floor must be positive".into()));
        }
        if !(self.t_end > S::zero()) {
            return Err(Error::InvalidParameter("t_end must be positive".into()));
        }
        if self.snapshot_times.iter().any(|&t| !(t > S::zero() && t <= self.t_end)) {
            return Err(Error::InvalidParameter("snapshot times must lie in (0, t_end]".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot<S> {
    pub t: S,
    pub cells: Vec<State<S>>,
    /// `∫ (G_right - G_left) dt` from 0 to `t`: mass that left through the
    /// boundaries, per component.
    pub boundary_outflow: [S; 2],
    pub steps: usize,
}

impl<S: Scalar> Snapshot<S> {
    /// `(Σ v dx, Σ y dx)`.
    pub fn mass(&self, dx: S) -> [S; 2] {
        mass(&self.cells, dx)
    }
}

fn mass<S: Scalar>(cells: &[State<S>], dx: S) -> [S; 2] {
    let (mut a, mut b) = (S::zero(), S::zero());
    for c in cells {
        a = a + c.v;
        b = b + c.y;
    }
    [a * dx, b * dx]
}

/// Piecewise-constant Riemann data on cell centres.
pub fn initial_cells<S: Scalar>(ul: State<S>, ur: State<S>, grid: &Grid1D<S>) -> Vec<State<S>> {
    (0..grid.n)
        .map(|i| if grid.center(i) < S::zero() { ul } else { ur })
        .collect()
}

#[inline]
fn flux_and_speed<S: Scalar>(u: State<S>, floor: S) -> ([S; 2], S) {
    let v = u.v.max(floor);
    let inv = v.recip();
    ([u.y * inv, inv], spectral_radius(State::new(v, u.y)))
}

/// Evolves Riemann data to `t_end`, recording the requested snapshots.
pub fn simulate<S: Scalar>(ul: State<S>, ur: State<S>, grid: &Grid1D<S>, config: &SimConfig<S>) -> Result<Vec<Snapshot<S>>> {
    config.validate()?;
    for u in [ul, ur] {
        if !(u.v > S::zero()) || u.discriminant() < S::zero() {
            return Err(Error::Domain(format!("simulation needs hyperbolic data with v > 0, got ({}, {})", u.v, u.y)));
        }
    }
    let mut times = if config.snapshot_times.is_empty() {
        vec![config.t_end]
    } else {
        config.snapshot_times.clone()
    };
    times.sort_by(|a, b| a.partial_cmp(b).expect("finite snapshot times"));
    times.dedup();

    let n = grid.n;
    let dx = grid.dx;
    let floor = config.v_floor;
    let mut u = initial_cells(ul, ur, grid);
    let mut f = vec![[S::zero(); 2]; n];
    let mut lam = vec![S::zero(); n];
    let mut g = vec![[S::zero(); 2]; n + 1];
    let mut out = [S::zero(); 2];
    let mut t = S::zero();
    let mut steps = 0usize;
    let mut snaps = Vec::with_capacity(times.len());
    let half = S::lit(0.5);
    let min_dt = S::lit(1e-13) * config.t_end;

    for &t_out in &times {
        while t < t_out {
            let mut amax = S::zero();
            for i in 0..n {
                let (fi, li) = flux_and_speed(u[i], floor);
                f[i] = fi;
                lam[i] = li;
                amax = amax.max(li);
            }
            if !amax.is_finite() {
                return Err(Error::CflCollapse { t: t.as_f64(), dt: 0.0 });
            }
            let mut dt = config.cfl * dx / amax;
            let mut last = false;
            if t + dt >= t_out {
                dt = t_out - t;
                last = true;
            } else if dt < min_dt {
                return Err(Error::CflCollapse { t: t.as_f64(), dt: dt.as_f64() });
            }
            let global = dx / dt;
            // zero-gradient ghosts: the boundary fluxes are the physical ones
            g[0] = f[0];
            g[n] = f[n - 1];
            for i in 1..n {
                let a = match config.scheme {
                    Scheme::LLxF => lam[i - 1].max(lam[i]),
                    Scheme::LxF => global,
                };
                let (l, r) = (u[i - 1], u[i]);
                g[i] = [
                    half * (f[i - 1][0] + f[i][0]) - half * a * (r.v - l.v),
                    half * (f[i - 1][1] + f[i][1]) - half * a * (r.y - l.y),
                ];
            }
            let k = dt / dx;
            for i in 0..n {
                u[i].v = u[i].v - k * (g[i + 1][0] - g[i][0]);
                u[i].y = u[i].y - k * (g[i + 1][1] - g[i][1]);
            }
            out[0] = out[0] + dt * (g[n][0] - g[0][0]);
            out[1] = out[1] + dt * (g[n][1] - g[0][1]);
            t = if last { t_out } else { t + dt };
            steps += 1;
        }
        if u.iter().any(|c| !(c.v.is_finite() && c.y.is_finite())) {
            return Err(Error::CflCollapse { t: t.as_f64(), dt: 0.0 });
        }
        snaps.push(Snapshot {
            t,
            cells: u.clone(),
            boundary_outflow: out,
            steps,
        });
    }
    Ok(snaps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    V,
    Y,
}

impl Component {
    fn of<S: Scalar>(self, u: &State<S>) -> S {
        match self {
            Component::V => u.v,
            Component::Y => u.y,
        }
    }
}

/// Leftmost crossing of `level` in `x_range`, by linear interpolation
/// between cell centres.
pub fn front_position<S: Scalar>(snap: &Snapshot<S>, grid: &Grid1D<S>, component: Component, level: S, x_range: (S, S)) -> Option<S> {
    for i in 0..grid.n - 1 {
        let (xa, xb) = (grid.center(i), grid.center(i + 1));
        if xa < x_range.0 || xb > x_range.1 {
            continue;
        }
        let a = component.of(&snap.cells[i]) - level;
        let b = component.of(&snap.cells[i + 1]) - level;
        if a == S::zero() {
            return Some(xa);
        }
        if (a < S::zero()) != (b < S::zero()) {
            return Some(xa + (xb - xa) * a / (a - b));
        }
    }
    None
}

fn linear_fit<S: Scalar>(pts: &[(S, S)]) -> (S, S) {
    let n = S::from_count(pts.len());
    let (mut sx, mut sy, mut sxx, mut sxy) = (S::zero(), S::zero(), S::zero(), S::zero());
    for &(x, y) in pts {
        sx = sx + x;
        sy = sy + y;
        sxx = sxx + x * x;
        sxy = sxy + x * y;
    }
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (slope, (sy - slope * sx) / n)
}

/// Slope of the level-crossing position against `t`, searching the whole
/// domain.
pub fn measure_front_speed<S: Scalar>(snaps: &[Snapshot<S>], grid: &Grid1D<S>, component: Component, level: S) -> Result<S> {
    measure_front_speed_within(snaps, grid, component, level, (S::neg_infinity(), S::infinity()))
}

/// As [`measure_front_speed`], restricted to `xi_range.0 * t <= x <=
/// xi_range.1 * t` so that one of several fronts can be singled out.
pub fn measure_front_speed_within<S: Scalar>(
    snaps: &[Snapshot<S>],
    grid: &Grid1D<S>,
    component: Component,
    level: S,
    xi_range: (S, S),
) -> Result<S> {
    if snaps.len() < 3 {
        return Err(Error::InvalidParameter("front speed needs at least three snapshots".into()));
    }
    let mut pts = Vec::with_capacity(snaps.len());
    for s in snaps {
        let range = (scale(xi_range.0, s.t), scale(xi_range.1, s.t));
        let x = front_position(s, grid, component, level, range).ok_or(Error::NoFront { level: level.as_f64() })?;
        pts.push((s.t, x));
    }
    Ok(linear_fit(&pts).0)
}

fn scale<S: Scalar>(xi: S, t: S) -> S {
    if xi.is_infinite() {
        xi
    } else {
        xi * t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeficitConfig<S> {
    /// The front is the leftmost crossing of this `v` level.
    pub level: S,
    /// Half-width of the co-moving window, in cells.
    pub half_width_cells: usize,
}

impl<S: Scalar> DeficitConfig<S> {
    /// Level midway between the two `v` values, 20-cell half-width.
    pub fn for_pair(ul: State<S>, ur: State<S>) -> Self {
        Self {
            level: (ul.v + ur.v) / S::lit(2.0),
            half_width_cells: 20,
        }
    }
}

/// Excess `y` mass over the piecewise background `U_L | U_R` in a window
/// that follows the measured front, for each snapshot: `(t, x_front, M)`.
pub fn excess_mass_series<S: Scalar>(
    snaps: &[Snapshot<S>],
    grid: &Grid1D<S>,
    ul: State<S>,
    ur: State<S>,
    cfg: &DeficitConfig<S>,
) -> Result<Vec<(S, S, S)>> {
    let hw = S::from_count(cfg.half_width_cells) * grid.dx;
    let mut rows = Vec::with_capacity(snaps.len());
    for s in snaps {
        let xf = front_position(s, grid, Component::V, cfg.level, (grid.x_lo, grid.x_hi))
            .ok_or(Error::NoFront { level: cfg.level.as_f64() })?;
        if xf - hw < grid.x_lo || xf + hw > grid.x_hi {
            return Err(Error::WindowEscape { t: s.t.as_f64() });
        }
        // cells weighted by their overlap with [xf - hw, xf + hw], so the
        // background integral is exact wherever the window edges fall
        let (a, b) = (xf - hw, xf + hw);
        let mut m = S::zero();
        for (i, c) in s.cells.iter().enumerate() {
            let lo = grid.x_lo + S::from_count(i) * grid.dx;
            let w = ((lo + grid.dx).min(b) - lo.max(a)).max(S::zero());
            m = m + c.y * w;
        }
        m = m - hw * (ul.y + ur.y);
        rows.push((s.t, xf, m));
    }
    Ok(rows)
}

/// `k_hat`, the growth rate of the excess `y` mass at the front.
pub fn measure_deficit_rate<S: Scalar>(
    snaps: &[Snapshot<S>],
    grid: &Grid1D<S>,
    ul: State<S>,
    ur: State<S>,
    cfg: &DeficitConfig<S>,
) -> Result<S> {
    if snaps.len() < 2 {
        return Err(Error::InvalidParameter("deficit rate needs at least two snapshots".into()));
    }
    let rows = excess_mass_series(snaps, grid, ul, ur, cfg)?;
    let pts: Vec<(S, S)> = rows.iter().map(|&(t, _, m)| (t, m)).collect();
    Ok(linear_fit(&pts).0)
}

/// `Σ (|v - v_exact| + |y - y_exact|) dx` against the self-similar exact
/// solution.
pub fn l1_error<S: Scalar>(snap: &Snapshot<S>, grid: &Grid1D<S>, exact: &RiemannSolution<S>) -> S {
    let mut e = S::zero();
    for (i, c) in snap.cells.iter().enumerate() {
        let (u, _) = exact.evaluate(grid.center(i) / snap.t);
        e = e + (c.v - u.v).abs() + (c.y - u.y).abs();
    }
    e * grid.dx
}

/// Largest `y - v` and `v - y` excursions of the deviation from the
/// background `U_L | U_R` split at the measured front, skipping cells within
/// `2 dx` of the front where any discrete shock differs from the background
/// by the full jump.
pub fn singular_excursions<S: Scalar>(
    snap: &Snapshot<S>,
    grid: &Grid1D<S>,
    ul: State<S>,
    ur: State<S>,
    level: S,
) -> Result<(S, S)> {
    let xf = front_position(snap, grid, Component::V, level, (grid.x_lo, grid.x_hi))
        .ok_or(Error::NoFront { level: level.as_f64() })?;
    let (mut up, mut down) = (S::neg_infinity(), S::neg_infinity());
    let band = S::lit(2.0) * grid.dx;
    for (i, c) in snap.cells.iter().enumerate() {
        let x = grid.center(i);
        if (x - xf).abs() < band {
            continue;
        }
        let bg = if x < xf { ul } else { ur };
        let d = (c.y - bg.y) - (c.v - bg.v);
        up = up.max(d);
        down = down.max(-d);
    }
    Ok((up, down))
}

pub fn peak_y<S: Scalar>(snap: &Snapshot<S>) -> S {
    snap.cells.iter().fold(S::neg_infinity(), |m, c| m.max(c.y))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementRow<S> {
    pub n: usize,
    pub dx: S,
    pub steps: usize,
    pub s_hat: Option<S>,
    pub k_hat: Option<S>,
    pub peak_y: S,
    pub min_v: S,
    /// `(max(y - v), max(v - y))` of the deviation from the background.
    pub excursions: Option<(S, S)>,
    pub l1_error: Option<S>,
}

/// Runs the same data on each resolution in `ns` concurrently and measures
/// every run. Front and deficit measurements use `deficit`; the L1 error is
/// filled in when `exact` is given.
pub fn refinement_study<S: Scalar>(
    ul: State<S>,
    ur: State<S>,
    domain: (S, S),
    ns: &[usize],
    config: &SimConfig<S>,
    deficit: Option<&DeficitConfig<S>>,
    exact: Option<&RiemannSolution<S>>,
) -> Result<Vec<RefinementRow<S>>> {
    let results: Vec<Result<RefinementRow<S>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = ns
            .iter()
            .map(|&n| {
                scope.spawn(move || -> Result<RefinementRow<S>> {
                    let grid = Grid1D::new(domain.0, domain.1, n)?;
                    let snaps = simulate(ul, ur, &grid, config)?;
                    let last = snaps.last().expect("at least one snapshot");
                    let (mut s_hat, mut k_hat, mut excursions) = (None, None, None);
                    if let Some(d) = deficit {
                        if snaps.len() >= 3 {
                            s_hat = Some(measure_front_speed(&snaps, &grid, Component::V, d.level)?);
                        }
                        k_hat = Some(measure_deficit_rate(&snaps, &grid, ul, ur, d)?);
                        excursions = Some(singular_excursions(last, &grid, ul, ur, d.level)?);
                    }
                    Ok(RefinementRow {
                        n,
                        dx: grid.dx,
                        steps: last.steps,
                        s_hat,
                        k_hat,
                        peak_y: peak_y(last),
                        min_v: last.cells.iter().fold(S::infinity(), |m, c| m.min(c.v)),
                        excursions,
                        l1_error: exact.map(|e| l1_error(last, &grid, e)),
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Consistency("refinement worker panicked".into()))))
            .collect()
    });
    results.into_iter().collect()
}
