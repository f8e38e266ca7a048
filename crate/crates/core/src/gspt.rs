//! Blow-up of the degenerate equilibrium set of the inner system: the second
//! chart, its corner equilibria, the bridge points `q_L`, `q_R`, and the
//! frozen planar systems at either end of a singular shock.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inner::InnerState;
use crate::model::{flux, speeds, State};
use crate::numerics::ode::{Control, Dopri5, Step};
use crate::numerics::roots::{bisect, sign_changes};
use crate::riemann::singular_shock_data;
use crate::scalar::Scalar;

/// Chart coordinates `(a, r, w1, w2, xi, b)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chart2Point<S> {
    pub a: S,
    pub r: S,
    pub w1: S,
    pub w2: S,
    pub xi: S,
    pub b: S,
}

impl<S: Scalar> Chart2Point<S> {
    pub fn to_array(self) -> [S; 6] {
        [self.a, self.r, self.w1, self.w2, self.xi, self.b]
    }

    pub fn from_array(x: [S; 6]) -> Self {
        Self {
            a: x[0],
            r: x[1],
            w1: x[2],
            w2: x[3],
            xi: x[4],
            b: x[5],
        }
    }

    /// Back to scaled variables: `(Y, eps, w1, w2, xi)`.
    pub fn to_scaled(&self) -> Result<(InnerState<S>, S, S, S, S)> {
        if !(self.a > S::zero() && self.r > S::zero()) || self.b < S::zero() {
            return Err(Error::Domain(format!(
                "chart point needs a, r > 0 and b >= 0, got a = {}, r = {}, b = {}",
                self.a, self.r, self.b
            )));
        }
        let y2 = self.r.powr(11, 15);
        let y1 = self.r / self.a;
        Ok((InnerState::new(y1, y2), self.b * self.r, self.w1, self.w2, self.xi))
    }
}

pub fn chart2_from_scaled<S: Scalar>(y: InnerState<S>, eps: S, w1: S, w2: S, xi: S) -> Result<Chart2Point<S>> {
    if !(y.y1 > S::zero() && y.y2 > S::zero()) || eps < S::zero() {
        return Err(Error::Domain(format!(
            "chart map needs y1, y2 > 0 and eps >= 0, got ({}, {}), eps = {}",
            y.y1, y.y2, eps
        )));
    }
    let r = y.y2.powr(15, 11);
    Ok(Chart2Point {
        a: r / y.y1,
        r,
        w1,
        w2,
        xi,
        b: eps / r,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularizationExponents<S> {
    pub beta1: S,
    pub beta2: S,
    pub beta3: S,
    pub beta4: S,
}

impl<S: Scalar> Default for RegularizationExponents<S> {
    fn default() -> Self {
        Self {
            beta1: S::lit(1.5),
            beta2: S::lit(10.0),
            beta3: S::lit(5.5),
            beta4: S::lit(3.0),
        }
    }
}

impl<S: Scalar> RegularizationExponents<S> {
    pub fn new(beta1: S, beta2: S, beta3: S, beta4: S) -> Result<Self> {
        let e = Self { beta1, beta2, beta3, beta4 };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.into()));
        if !(self.beta1 > S::one()) {
            return bad("beta1 must exceed 1");
        }
        if !(self.beta4 > S::lit(41.0 / 15.0)) {
            return bad("beta4 must exceed 41/15");
        }
        if !(self.beta3 > S::lit(5.0) && self.beta3 < S::lit(6.0)) {
            return bad("beta3 must lie in (5, 6)");
        }
        if self.beta2 != S::lit(10.0) {
            return bad("beta2 must be 10");
        }
        Ok(())
    }
}

/// `num / den`, with `0/0` read as 0 (the numerator vanishes to higher order
/// on the chart boundary).
fn ratio<S: Scalar>(num: S, den: S, factor: &'static str) -> Result<S> {
    if num == S::zero() {
        return Ok(S::zero());
    }
    if den == S::zero() {
        return Err(Error::SingularDenominator { factor });
    }
    Ok(num / den)
}

fn nonzero<S: Scalar>(x: S, factor: &'static str) -> Result<S> {
    if x == S::zero() || !x.is_finite() {
        Err(Error::SingularDenominator { factor })
    } else {
        Ok(x)
    }
}

/// The desingularized vector field in chart coordinates, component order
/// `(a, r, w1, w2, xi, b)`.
pub fn rhs_chart2<S: Scalar>(p: Chart2Point<S>, exps: &RegularizationExponents<S>) -> Result<[S; 6]> {
    let Chart2Point { a, r, w1, w2, xi, b } = p;
    if !(a >= S::zero() && r >= S::zero() && b >= S::zero()) {
        return Err(Error::Domain(format!(
            "chart field needs a, r, b >= 0, got a = {a}, r = {r}, b = {b}"
        )));
    }
    let RegularizationExponents { beta1: b1, beta3: b3, beta4: b4, .. } = *exps;
    let l = S::lit;
    let q = |x: S, n: i32, d: i32| x.powr(n, d);
    let pw = |x: S, e: S| x.powf(e);
    let one = S::one();
    let h = l(1.5);
    let h5 = l(2.5);

    let f = pw(r, b3 - one) * q(r, 1, 3) * q(a, 2, 3) * pw(b, b3);
    let g = q(r, 134, 15) * q(a, 16, 15) * pw(b, l(10.0));
    let opf = one + f;
    let opg = one + g;
    let theta = ratio(pw(b, b4 - l(2.0)) * pw(r, b4 - l(2.0)) * q(r, 4, 15), a, "a")? * pw(opf, h);
    let omt = nonzero(one - theta, "1 - Theta")?;
    let den = nonzero(l(4.0) * f - l(5.0) * g - one, "4F - 5G - 1")?;
    nonzero(opf, "1 + F")?;
    nonzero(opg, "1 + G")?;

    let p1 = pw(opf, h) / omt - xi * q(r, 39, 15) * q(a, 13, 5) * b.powi(3) / pw(opg, h) - q(r, 26, 15) * a * b * b * w2
        + pw(r, b1) * q(r, 26, 15) * a * pw(b, l(2.0) + b1) * xi;
    let p2 = q(a, 3, 5) * pw(opf, h) / (pw(opg, h) * omt)
        - q(r, 13, 5) * a * b.powi(3) * xi * omt / pw(opf, h)
        - q(r, 13, 15) * b * w1
        - ratio(q(r, 2, 15) * pw(r, b1 - one) * pw(b, b1 - one), a * omt, "a")? * pw(opf, h);

    let a2415 = q(a, 24, 15);
    let core = -l(75.0 / 22.0) * pw(opg, h5) * p1 + l(60.0 / 11.0) * a2415 * pw(opf, h5) * p2
        - l(5.0) * q(a, 33, 15) * opf.powi(4) / (opg.sqrt() * omt)
        + h5 * xi * q(r, 39, 15) * q(a, 39, 15) * b.powi(3) * opf * opg
        + h5 * pw(opf, h5) * pw(opg, h5)
        - l(5.0) * pw(b, b4 + one) * q(r, 13, 15) * pw(r, b4) * q(a, 24, 25) * xi * pw(opf, h5) * opg
        + l(5.0) * b * w1 * q(r, 13, 15) * a2415 * pw(opf, h5) * opg
        - h5 * w2 * q(r, 26, 15) * a * b * b * opf * pw(opg, h5)
        + l(5.0) * pw(r, b1 - one) * q(r, 2, 15) * q(a, 3, 5) * pw(b, b1 - one) * opf.powi(4) * opg / omt
        + h5 * xi * pw(r, b1 + one) * q(r, 11, 15) * a * pw(b, l(2.0) + b1) * opf * pw(opg, h5);
    let da = a / den * core;

    let inner_r = -h5 * pw(opg, h5) * p1 + l(4.0) * a2415 * pw(opf, h5) * p2;
    let dr = l(15.0) * r / (l(11.0) * den) * inner_r;
    let db = l(15.0) * b / (l(11.0) * den) * (-inner_r);

    let dw1 = -q(r, 16, 3) * q(a, 54, 15) * b.powi(6) / pw(opf, h) + q(a, 39, 15) * pw(b, l(4.0) + b4) * pw(r, b4) * q(r, 54, 15);
    let dw2 = q(a, 39, 15) * pw(b, l(4.0) + b1) * pw(r, b1) * q(r, 54, 15) - q(r, 67, 15) * q(a, 21, 5) * b.powi(5) / pw(opg, h);
    let dxi = q(r, 18, 5) * q(a, 39, 15) * b.powi(4);

    let out = [da, dr, dw1, dw2, dxi, db];
    if out.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("chart field not finite".into()));
    }
    Ok(out)
}

/// `-(5/11) a (a^(11/5) - 2)`, the `a` equation on `r = b = 0`.
pub fn reduced_rhs<S: Scalar>(a: S) -> S {
    -S::lit(5.0 / 11.0) * a * (a.powr(11, 5) - S::lit(2.0))
}

/// Central differences, one-sided for `a`, `r`, `b` near zero.
pub fn numeric_jacobian<S: Scalar>(p: Chart2Point<S>, exps: &RegularizationExponents<S>) -> Result<[[S; 6]; 6]> {
    let x = p.to_array();
    let mut jac = [[S::zero(); 6]; 6];
    for j in 0..6 {
        let h = S::lit(1e-6) * x[j].abs().max(S::one());
        let signed = matches!(j, 0 | 1 | 5);
        let (mut xp, mut xm) = (x, x);
        let width;
        xp[j] = x[j] + h;
        if signed && x[j] < h {
            width = h;
        } else {
            xm[j] = x[j] - h;
            width = h + h;
        }
        let fp = rhs_chart2(Chart2Point::from_array(xp), exps)?;
        let fm = rhs_chart2(Chart2Point::from_array(xm), exps)?;
        for i in 0..6 {
            jac[i][j] = (fp[i] - fm[i]) / width;
        }
    }
    Ok(jac)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport<S> {
    pub a_value: S,
    /// Eigenvalues along `R2 = e_a`, `R3 = e_r`, `R4 = e_b`.
    pub eigen_a: S,
    pub eigen_r: S,
    pub eigen_b: S,
    pub tag_a: Stability,
    pub tag_r: Stability,
    pub tag_b: Stability,
    /// Eigenvalues of the full Jacobian within `1e-8` of zero.
    pub zero_multiplicity: usize,
    /// `max |J e - lambda e|` over the three transversal directions.
    pub eigvec_residual: S,
    /// Full spectrum (real parts), ascending.
    pub spectrum: Vec<S>,
}

impl<S: Scalar> EquilibriumReport<S> {
    pub fn unstable_dim(&self) -> usize {
        [self.tag_a, self.tag_r, self.tag_b].iter().filter(|t| **t == Stability::Unstable).count()
    }
}

/// Roots of the reduced field on `[0, 3]`, ascending.
pub fn reduced_roots<S: Scalar>() -> Result<Vec<S>> {
    let n = 600;
    let grid: Vec<S> = (0..=n).map(|i| S::lit(3.0) * S::from_count(i) / S::from_count(n)).collect();
    let mut roots = Vec::new();
    for (lo, hi) in sign_changes(reduced_rhs, &grid) {
        roots.push(if lo == hi { lo } else { bisect(reduced_rhs, lo, hi, S::lit(1e-14))? });
    }
    roots.dedup_by(|x, y| (*x - *y).abs() < S::lit(1e-12));
    Ok(roots)
}

/// Linearization at `(a_j, 0, w, xi, 0)` for both corner equilibria, `a_3 = 0`
/// first.
pub fn equilibria_and_eigen_at<S: Scalar>(exps: &RegularizationExponents<S>, w: [S; 2], xi: S) -> Result<Vec<EquilibriumReport<S>>> {
    let roots = reduced_roots::<S>()?;
    let mut reports = Vec::with_capacity(roots.len());
    for a in roots {
        let p = Chart2Point { a, r: S::zero(), w1: w[0], w2: w[1], xi, b: S::zero() };
        let jac = numeric_jacobian(p, exps)?;
        let m = DMatrix::<f64>::from_fn(6, 6, |i, j| jac[i][j].as_f64());
        let mut spectrum: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.re).collect();
        spectrum.sort_by(|x, y| x.total_cmp(y));
        let zero_multiplicity = spectrum.iter().filter(|x| x.abs() < 1e-8).count();
        // e_a, e_r, e_b are eigenvectors iff their columns vanish off the diagonal
        let mut residual = S::zero();
        for j in [0usize, 1, 5] {
            for (i, row) in jac.iter().enumerate() {
                if i != j {
                    residual = residual.max(row[j].abs());
                }
            }
        }
        let tag = |x: S| if x > S::zero() { Stability::Unstable } else { Stability::Stable };
        reports.push(EquilibriumReport {
            a_value: a,
            eigen_a: jac[0][0],
            eigen_r: jac[1][1],
            eigen_b: jac[5][5],
            tag_a: tag(jac[0][0]),
            tag_r: tag(jac[1][1]),
            tag_b: tag(jac[5][5]),
            zero_multiplicity,
            eigvec_residual: residual,
            spectrum: spectrum.into_iter().map(S::lit).collect(),
        });
    }
    Ok(reports)
}

pub fn equilibria_and_eigen<S: Scalar>(exps: &RegularizationExponents<S>) -> Result<Vec<EquilibriumReport<S>>> {
    equilibria_and_eigen_at(exps, [S::zero(), S::zero()], S::zero())
}

/// Closed-form transversal eigenvalues at `a`, with the `lambda_2` exponent
/// 11/5 (the derivative of the reduced field).
pub fn eigen_formulas<S: Scalar>(a: S) -> [S; 3] {
    let a115 = a.powr(11, 5);
    [
        -S::lit(16.0 / 11.0) * a115 + S::lit(10.0 / 11.0),
        -S::lit(60.0 / 11.0) * a115 + S::lit(75.0 / 22.0),
        S::lit(60.0 / 11.0) * a115 - S::lit(75.0 / 22.0),
    ]
}

/// Positive root of `y^2 + y^(30/11) / a^2 = 1`, the sphere normalization of
/// the bridge point with chart coordinate `a`.
pub fn sphere_y2bar<S: Scalar>(a: S) -> Result<S> {
    if !(a > S::zero()) {
        return Err(Error::Domain("sphere normalization needs a > 0".into()));
    }
    let a2 = a * a;
    bisect(|y: S| y * y + y.powr(30, 11) / a2 - S::one(), S::zero(), S::one(), S::lit(1e-15))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QPoints<S> {
    pub q_l: Chart2Point<S>,
    pub q_r: Chart2Point<S>,
    pub w_l: [S; 2],
    pub w_r: [S; 2],
    pub s: S,
    pub k: S,
    pub y2bar_r: S,
}

/// `W = F(U) - s U`.
pub fn frozen_w<S: Scalar>(u: State<S>, s: S) -> [S; 2] {
    let f = u.flux_raw();
    [f[0] - s * u.v, f[1] - s * u.y]
}

pub fn q_points<S: Scalar>(ul: State<S>, ur: State<S>) -> Result<QPoints<S>> {
    let data = singular_shock_data(ul, ur)?;
    let s = data.s;
    let (w_l, w_r) = (frozen_w(ul, s), frozen_w(ur, s));
    let a2 = S::lit(2.0).powr(5, 11);
    Ok(QPoints {
        q_l: Chart2Point { a: S::zero(), r: S::zero(), w1: w_l[0], w2: w_l[1], xi: s, b: S::zero() },
        q_r: Chart2Point { a: a2, r: S::zero(), w1: w_r[0], w2: w_r[1], xi: s, b: S::zero() },
        w_l,
        w_r,
        s,
        k: data.k,
        y2bar_r: sphere_y2bar(a2)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrozenParams<S> {
    pub s: S,
    pub w: [S; 2],
}

impl<S: Scalar> FrozenParams<S> {
    /// Parameters making `u` an equilibrium of the frozen system.
    pub fn at(u: State<S>, s: S) -> Self {
        Self { s, w: frozen_w(u, s) }
    }
}

/// `F(U) - s U - W`.
pub fn frozen_planar_rhs<S: Scalar>(u: State<S>, fp: &FrozenParams<S>) -> Result<[S; 2]> {
    let f = flux(u, S::min_positive_value())?;
    Ok([f[0] - fp.s * u.v - fp.w[0], f[1] - fp.s * u.y - fp.w[1]])
}

/// Eigenvalues `lambda_i(U) - s` of the frozen system's Jacobian at `u`.
pub fn frozen_eigenvalues<S: Scalar>(u: State<S>, s: S) -> (S, S) {
    let (l1, l2) = speeds(u);
    (l1 - s, l2 - s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryShape {
    /// `y_A - E (v - v_A)`
    Line,
    /// `(1/s)(1/v - 1/v_A) + y_A`
    Hyperbola,
    /// `s v (v - v_A) + (y_A / v_A) v`
    Parabola,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryCurve<S> {
    pub name: &'static str,
    pub shape: BoundaryShape,
    /// Open `v` interval sampled along the curve.
    pub v_range: (S, S),
    /// The region lies below the curve (otherwise above).
    pub region_below: bool,
    /// Flow must leave the region across this curve (otherwise enter).
    pub outward: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantRegionSpec<S> {
    pub anchor: State<S>,
    pub e: S,
    pub s: S,
    pub curves: Vec<BoundaryCurve<S>>,
}

impl<S: Scalar> InvariantRegionSpec<S> {
    /// Window `(v λ1, v λ2)` at the anchor that `E` must lie in.
    pub fn e_window(&self) -> (S, S) {
        let (l1, l2) = speeds(self.anchor);
        (self.anchor.v * l1, self.anchor.v * l2)
    }

    pub fn e_midpoint(anchor: State<S>) -> S {
        let (l1, l2) = speeds(anchor);
        anchor.v * (l1 + l2) / S::lit(2.0)
    }

    /// Region left of `U_L` between the line and the hyperbola; flow leaves
    /// it across both.
    pub fn left_of(ul: State<S>, e: S, s: S) -> Self {
        let range = (S::zero(), ul.v);
        Self {
            anchor: ul,
            e,
            s,
            curves: vec![
                BoundaryCurve { name: "phi1", shape: BoundaryShape::Line, v_range: range, region_below: false, outward: true },
                BoundaryCurve { name: "phi2", shape: BoundaryShape::Hyperbola, v_range: range, region_below: true, outward: true },
            ],
        }
    }

    /// Region right of `U_R` between the line and the parabola, sampled up to
    /// `3 v_R`, which the flow enters; plus the region under the hyperbola
    /// left of `U_R`, down to where it meets `y = 0`, which it leaves.
    pub fn right_of(ur: State<S>, e: S, s: S) -> Self {
        let range = (ur.v, S::lit(3.0) * ur.v);
        let mut curves = vec![
            BoundaryCurve { name: "phi1", shape: BoundaryShape::Line, v_range: range, region_below: false, outward: false },
            BoundaryCurve { name: "phi2", shape: BoundaryShape::Parabola, v_range: range, region_below: true, outward: false },
        ];
        let v0 = (ur.v.recip() - s * ur.y).recip();
        if v0 > S::zero() {
            let v0 = v0.min(ur.v);
            curves.push(BoundaryCurve {
                name: "phi3",
                shape: BoundaryShape::Hyperbola,
                v_range: (S::zero(), v0),
                region_below: true,
                outward: true,
            });
        }
        Self { anchor: ur, e, s, curves }
    }

    /// `(phi(v), phi'(v))` for a boundary curve.
    pub fn boundary(&self, shape: BoundaryShape, v: S) -> (S, S) {
        let State { v: va, y: ya } = self.anchor;
        let s = self.s;
        match shape {
            BoundaryShape::Line => (ya - self.e * (v - va), -self.e),
            BoundaryShape::Hyperbola => ((v.recip() - va.recip()) / s + ya, -(s * v * v).recip()),
            BoundaryShape::Parabola => (
                s * v * (v - va) + ya / va * v,
                s * (S::lit(2.0) * v - va) + ya / va,
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveCheck<S> {
    pub name: &'static str,
    pub samples: usize,
    pub consistent: usize,
    /// `(v, signed crossing rate)` at samples with the wrong sign.
    pub violations: Vec<(S, S)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvariantRegionReport<S> {
    pub precondition_ok: bool,
    pub e_window: (S, S),
    pub curves: Vec<CurveCheck<S>>,
}

impl<S> InvariantRegionReport<S> {
    pub fn invariant(&self) -> bool {
        self.precondition_ok && self.curves.iter().all(|c| c.violations.is_empty())
    }
}

/// Samples each boundary curve at `n_samples` interior points and checks the
/// direction in which the frozen flow crosses it.
pub fn invariant_region_check<S: Scalar>(spec: &InvariantRegionSpec<S>, fp: &FrozenParams<S>, n_samples: usize) -> InvariantRegionReport<S> {
    let e_window = spec.e_window();
    let precondition_ok = e_window.0 < spec.e && spec.e < e_window.1;
    let mut curves = Vec::with_capacity(spec.curves.len());
    for c in &spec.curves {
        let mut check = CurveCheck { name: c.name, samples: n_samples, consistent: 0, violations: Vec::new() };
        let (lo, hi) = c.v_range;
        for i in 0..n_samples {
            let v = lo + (hi - lo) * S::from_count(i + 1) / S::from_count(n_samples + 1);
            let (y, dy) = spec.boundary(c.shape, v);
            let Ok(f) = frozen_planar_rhs(State::new(v, y), fp) else {
                check.violations.push((v, S::nan()));
                continue;
            };
            // rate at which the flow moves up across the curve
            let up = f[1] - dy * f[0];
            let leaves = if c.region_below { up > S::zero() } else { up < S::zero() };
            let enters = if c.region_below { up < S::zero() } else { up > S::zero() };
            if (c.outward && leaves) || (!c.outward && enters) {
                check.consistent += 1;
            } else {
                check.violations.push((v, up));
            }
        }
        curves.push(check);
    }
    InvariantRegionReport { precondition_ok, e_window, curves }
}

/// Integrates the chart field from `p0`, stopping once `|4F - 5G - 1|` or
/// `|1 - Theta|` falls below `guard` or the field leaves its domain.
pub fn integrate_chart2<S: Scalar>(p0: Chart2Point<S>, exps: &RegularizationExponents<S>, zeta_end: S, guard: S) -> Result<Vec<Step<S, 6>>> {
    let near_singular = |x: &[S; 6]| {
        let p = Chart2Point::from_array(*x);
        let f = p.r.powf(exps.beta3 - S::one()) * p.r.powr(1, 3) * p.a.powr(2, 3) * p.b.powf(exps.beta3);
        let g = p.r.powr(134, 15) * p.a.powr(16, 15) * p.b.powf(S::lit(10.0));
        let num = p.b.powf(exps.beta4 - S::lit(2.0)) * p.r.powf(exps.beta4 - S::lit(2.0)) * p.r.powr(4, 15);
        let theta = if num == S::zero() { S::zero() } else { num / p.a * (S::one() + f).powf(S::lit(1.5)) };
        (S::lit(4.0) * f - S::lit(5.0) * g - S::one()).abs() < guard || (S::one() - theta).abs() < guard
    };
    Dopri5::default().integrate(
        |_, x: &[S; 6]| rhs_chart2(Chart2Point::from_array(*x), exps).ok(),
        S::zero(),
        p0.to_array(),
        zeta_end,
        |s| Ok(if near_singular(&s.y) { Control::Stop } else { Control::Continue }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type Ex = RegularizationExponents<f64>;
    type P = Chart2Point<f64>;

    #[test]
    fn chart_map_examples() {
        let p = chart2_from_scaled(InnerState::new(1.0f64, 1.0), 0.0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!((p.a, p.r, p.b), (1.0, 1.0, 0.0));
        let p = chart2_from_scaled(InnerState::new(1.0f64, 0.5), 0.01, 0.0, 0.0, 0.0).unwrap();
        assert!((p.a - 0.388602).abs() < 1e-6 && (p.r - 0.388602).abs() < 1e-6);
        assert!((p.b - 0.025733).abs() < 1e-6);
        for y1 in [1e-3, 0.5, 7.0] {
            let p = chart2_from_scaled(InnerState::on_parabola(y1), 0.0, 0.0, 0.0, 0.0).unwrap();
            assert!((p.a - 2f64.powf(5.0 / 11.0)).abs() < 1e-12);
        }
        assert!(chart2_from_scaled(InnerState::new(0.0, 1.0), 0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn equilibria() {
        let ex = Ex::default();
        let a2 = 2f64.powf(5.0 / 11.0);
        let p = P { a: a2, r: 0.0, w1: 1.0, w2: -2.0, xi: 0.3, b: 0.0 };
        assert!(rhs_chart2(p, &ex).unwrap().iter().all(|x| x.abs() < 1e-14));
        let p = P { a: 0.0, ..p };
        assert_eq!(rhs_chart2(p, &ex).unwrap(), [0.0; 6]);
        let roots = reduced_roots::<f64>().unwrap();
        assert_eq!(roots.len(), 2);
        assert_eq!(roots[0], 0.0);
        assert!((roots[1] - a2).abs() < 1e-10);
    }

    #[test]
    fn corner_eigenvalues() {
        let reps = equilibria_and_eigen(&Ex::default()).unwrap();
        let expect = [[10.0 / 11.0, 75.0 / 22.0, -75.0 / 22.0], [-2.0, -7.5, 7.5]];
        for (rep, ex) in reps.iter().zip(expect) {
            let got = [rep.eigen_a, rep.eigen_r, rep.eigen_b];
            for (g, e) in got.iter().zip(ex) {
                assert!((g - e).abs() < 1e-6, "{rep:?}");
            }
            let formula = eigen_formulas(rep.a_value);
            for (g, e) in got.iter().zip(formula) {
                assert!((g - e).abs() < 1e-6);
            }
            assert_eq!(rep.zero_multiplicity, 3);
            assert!(rep.eigvec_residual < 1e-9);
            for e in ex {
                assert!(rep.spectrum.iter().any(|x| (x - e).abs() < 1e-6));
            }
        }
        assert_eq!(reps[0].unstable_dim(), 2);
        assert_eq!(reps[1].unstable_dim(), 1);
    }

    #[test]
    fn singular_denominators_named() {
        let ex = Ex::default();
        let p = P { a: 0.0, r: 0.5, w1: 0.0, w2: 0.0, xi: 0.0, b: 0.5 };
        assert!(matches!(rhs_chart2(p, &ex), Err(Error::SingularDenominator { factor: "a" })));
        assert!(rhs_chart2(P { a: -1.0, ..p }, &ex).is_err());
    }

    #[test]
    fn q_point_example() {
        let q = q_points(State::<f64>::new(1.0, -3.0), State::<f64>::new(8.0, -5.66)).unwrap();
        assert!((q.s - 0.3275).abs() < 1e-12);
        assert!((q.w_l[0] + 3.3275).abs() < 1e-12 && (q.w_l[1] - 1.9825).abs() < 1e-12);
        assert!((q.w_r[0] + 3.3275).abs() < 1e-12 && (q.w_r[1] - 1.97865).abs() < 1e-12);
        assert_eq!(q.w_l[1] - q.w_r[1], q.k);
        assert!((q.k - 0.00385).abs() < 1e-12, "{}", q.k);
        assert!((q.y2bar_r - 0.827).abs() < 1e-3);
        assert_eq!(q.q_l.a, 0.0);
        assert!(q_points(State::<f64>::new(1.0, -3.0), State::<f64>::new(1.0, -5.0)).is_err());
    }

    #[test]
    fn frozen_system() {
        let (ul, ur) = (State::<f64>::new(1.0, -3.0), State::<f64>::new(8.0, -5.66));
        let s = singular_shock_data(ul, ur).unwrap().s;
        let fl = FrozenParams::at(ul, s);
        let fr = FrozenParams::at(ur, s);
        assert!(frozen_planar_rhs(ul, &fl).unwrap().iter().all(|x| x.abs() < 1e-15));
        assert!(frozen_planar_rhs(ur, &fr).unwrap().iter().all(|x| x.abs() < 1e-15));
        let (a, b) = frozen_eigenvalues(ul, s);
        assert!(a > 0.0 && b > 0.0);
        let (a, b) = frozen_eigenvalues(ur, s);
        assert!(a < 0.0 && b < 0.0);
        assert!(frozen_planar_rhs(State::<f64>::new(0.0, 1.0), &fl).is_err());
    }

    #[test]
    fn invariant_regions() {
        let (ul, ur) = (State::<f64>::new(1.0, -3.0), State::<f64>::new(8.0, -5.66));
        let s = singular_shock_data(ul, ur).unwrap().s;
        let e = InvariantRegionSpec::e_midpoint(ul);
        assert!((e - 1.5).abs() < 1e-12);
        let rep = invariant_region_check(&InvariantRegionSpec::left_of(ul, e, s), &FrozenParams::at(ul, s), 200);
        assert!(rep.invariant(), "{rep:?}");
        let e = InvariantRegionSpec::e_midpoint(ur);
        assert!((e - 0.35375).abs() < 1e-12);
        let spec = InvariantRegionSpec::right_of(ur, e, s);
        assert_eq!(spec.curves.len(), 3);
        let rep = invariant_region_check(&spec, &FrozenParams::at(ur, s), 200);
        assert!(rep.invariant(), "{rep:?}");
        let rep = invariant_region_check(&InvariantRegionSpec::left_of(ul, 5.0, s), &FrozenParams::at(ul, s), 20);
        assert!(!rep.precondition_ok && !rep.invariant());
    }

    #[test]
    fn exponent_validation() {
        assert!(Ex::default().validate().is_ok());
        assert!(Ex::new(1.0, 10.0, 5.5, 3.0).is_err());
        assert!(Ex::new(1.5, 10.0, 6.0, 3.0).is_err());
        assert!(Ex::new(1.5, 8.0, 5.5, 3.0).is_err());
        assert!(Ex::new(1.5, 10.0, 5.5, 2.7).is_err());
    }

    #[test]
    fn chart_flow_stays_on_invariant_plane() {
        let ex = Ex::default();
        let p = P { a: 0.5, r: 0.0, w1: -1.0, w2: 2.0, xi: 0.3, b: 0.0 };
        let steps = integrate_chart2(p, &ex, 5.0, 1e-6).unwrap();
        let last = steps.last().unwrap();
        // along r = b = 0 only a moves, toward a2
        assert!((last.y[0] - 2f64.powf(5.0 / 11.0)).abs() < 1e-3);
        assert_eq!(&last.y[1..], &[0.0, -1.0, 2.0, 0.3, 0.0]);
    }

    proptest! {
        #[test]
        fn reduced_field_matches(a in 0.0f64..2.0, w1 in -5.0f64..5.0, w2 in -5.0f64..5.0, xi in -2.0f64..2.0) {
            let f = rhs_chart2(P { a, r: 0.0, w1, w2, xi, b: 0.0 }, &Ex::default()).unwrap();
            prop_assert!((f[0] - reduced_rhs(a)).abs() <= 1e-9);
            prop_assert!(f[1..].iter().all(|x| *x == 0.0));
        }

        #[test]
        fn chart_round_trip(y1 in 1e-3f64..1e3, y2 in 1e-3f64..1e3, eps in 1e-6f64..1.0) {
            let p = chart2_from_scaled(InnerState::new(y1, y2), eps, 0.1, 0.2, 0.3).unwrap();
            let (y, e, w1, w2, xi) = p.to_scaled().unwrap();
            prop_assert!((y.y1 / y1 - 1.0).abs() < 1e-12);
            prop_assert!((y.y2 / y2 - 1.0).abs() < 1e-12);
            prop_assert!((e / eps - 1.0).abs() < 1e-12);
            prop_assert_eq!((w1, w2, xi), (0.1, 0.2, 0.3));
        }
    }
}
