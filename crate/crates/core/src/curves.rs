//! Wave curves through a left state, shock speeds, Lax admissibility, the
//! special intersection points and the singular-shock boundary curves.
//!
//! Every rarefaction and shock curve of this system is a straight line in the
//! `(v, y)` plane: `S_i` and `R_i` through a state are the same line, and the
//! line of `R_1` is tangent to `y^2 = 4v` at `U_G`, continuing as `R_2(U_G)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{speeds, Family, PhysParams, State};
use crate::numerics::roots::brent;
use crate::scalar::{near_zero, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CurveKind {
    R1,
    R2,
    S1,
    S2,
    J5,
    J6,
    /// `y^2 = 4v`, anchor ignored.
    Parabola4v,
    /// `y^2 = 16v/3`, anchor ignored.
    ParabolaGN,
}

impl CurveKind {
    pub const ALL: [CurveKind; 8] = [
        CurveKind::R1,
        CurveKind::R2,
        CurveKind::S1,
        CurveKind::S2,
        CurveKind::J5,
        CurveKind::J6,
        CurveKind::Parabola4v,
        CurveKind::ParabolaGN,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CurveKind::R1 => "R1",
            CurveKind::R2 => "R2",
            CurveKind::S1 => "S1",
            CurveKind::S2 => "S2",
            CurveKind::J5 => "J5",
            CurveKind::J6 => "J6",
            CurveKind::Parabola4v => "Parabola4v",
            CurveKind::ParabolaGN => "ParabolaGN",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name().eq_ignore_ascii_case(s))
    }
}

/// A curve anchored at a left state, with the anchor's `sqrt(y^2-4v)` and
/// `K = sqrt(y^2-4v) - y` cached.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveCurve<S> {
    pub kind: CurveKind,
    pub anchor: State<S>,
    sqrt_d: S,
    k: S,
}

/// Checks `v > 0`, `y < 0` and `y^2 >= 4v` (up to roundoff) and returns
/// `sqrt(y^2 - 4v)`.
pub(crate) fn anchor_sqrt_d<S: Scalar>(u: State<S>) -> Result<S> {
    let d = u.discriminant();
    let on_parabola = near_zero(d, u.y * u.y + S::lit(4.0) * u.v.abs());
    if !(u.v > S::zero() && u.y < S::zero()) || (d < S::zero() && !on_parabola) || !d.is_finite() {
        return Err(Error::Domain(format!(
            "anchor ({}, {}) must satisfy v > 0, y < 0, y^2 >= 4v",
            u.v, u.y
        )));
    }
    Ok(if on_parabola { S::zero() } else { d.sqrt() })
}

impl<S: Scalar> WaveCurve<S> {
    pub fn new(kind: CurveKind, anchor: State<S>) -> Result<Self> {
        let (sqrt_d, k) = match kind {
            CurveKind::Parabola4v | CurveKind::ParabolaGN => (S::zero(), S::zero()),
            _ => {
                let sd = anchor_sqrt_d(anchor)?;
                (sd, sd - anchor.y)
            }
        };
        Ok(Self { kind, anchor, sqrt_d, k })
    }

    /// `K` of the anchor.
    pub fn k_anchor(&self) -> S {
        self.k
    }

    /// Slope and intercept of the anchor's family-`i` wave line.
    pub fn line(&self, family: Family) -> (S, S) {
        let two = S::lit(2.0);
        let (vl, yl, sd) = (self.anchor.v, self.anchor.y, self.sqrt_d);
        match family {
            Family::One => ((yl - sd) / (two * vl), (yl + sd) / two),
            Family::Two => ((yl + sd) / (two * vl), (yl - sd) / two),
        }
    }

    /// `y` on the curve at abscissa `v`.
    pub fn eval(&self, v: S) -> Result<S> {
        if !(v > S::zero()) || !v.is_finite() {
            return Err(Error::Domain(format!("curve abscissa must be positive, got {v}")));
        }
        let a = self.anchor;
        let two = S::lit(2.0);
        let four = S::lit(4.0);
        match self.kind {
            CurveKind::Parabola4v => return Ok(-two * v.sqrt()),
            CurveKind::ParabolaGN => return Ok(-(S::lit(16.0) * v / S::lit(3.0)).sqrt()),
            _ => {}
        }
        if v == a.v {
            return Ok(a.y);
        }
        match self.kind {
            CurveKind::R1 | CurveKind::R2 => {
                let m = if self.kind == CurveKind::R1 { v / a.v * self.k } else { self.k };
                Ok(-(four * v + m * m) / (two * m))
            }
            CurveKind::S1 | CurveKind::S2 => {
                let fam = if self.kind == CurveKind::S1 { Family::One } else { Family::Two };
                let (slope, icpt) = self.line(fam);
                Ok(slope * v + icpt)
            }
            CurveKind::J5 => {
                let (l1, _) = speeds(a);
                Ok(a.y / a.v * v + v * (v - a.v) * l1)
            }
            CurveKind::J6 => self.eval_j6(v),
            CurveKind::Parabola4v | CurveKind::ParabolaGN => unreachable!(),
        }
    }

    fn eval_j6(&self, v: S) -> Result<S> {
        let a = self.anchor;
        let two = S::lit(2.0);
        let four = S::lit(4.0);
        let den = two * v - a.v;
        if !(den > S::zero()) {
            return Err(Error::Domain(format!(
                "J6 is defined only for v > v_L/2 = {}, got {v}",
                a.v / two
            )));
        }
        let (vl, yl) = (a.v, a.y);
        let root = ((v * yl - four * vl * vl / yl).powi(2)
            + four * vl.powi(3) * a.discriminant().max(S::zero()) / (yl * yl))
            .sqrt();
        let y = (v * yl * den + v * v * yl) / (two * vl * den) + (v - vl) / (two * vl * den) * root;

        if (v - vl).abs() > S::lit(1e-6) * vl {
            self.check_j6(v, y)?;
        }
        Ok(y)
    }

    // Solves the defining relation s_singular(U_L, U) = lambda2(U) near the
    // closed-form value and insists the two agree.
    fn check_j6(&self, v: S, y_formula: S) -> Result<()> {
        let a = self.anchor;
        let g = |y: S| singular_speed_raw(a, State::new(v, y)) - speeds(State::new(v, y)).1;
        let scale = S::one() + y_formula.abs();
        let parabola = -S::lit(2.0) * v.sqrt();
        let mut width = S::lit(1e-3) * scale;
        for _ in 0..40 {
            let lo = y_formula - width;
            let hi = (y_formula + width).min(parabola);
            if lo < hi && g(lo).signum() != g(hi).signum() {
                let y = brent(g, lo, hi, S::lit(1e-13) * scale)?;
                if (y - y_formula).abs() > S::lit(1e-6) * scale {
                    return Err(Error::Consistency(format!(
                        "J6 closed form gives y = {y_formula} at v = {v}, defining relation gives {y}"
                    )));
                }
                return Ok(());
            }
            width = width * S::lit(2.0);
        }
        Err(Error::Consistency(format!(
            "could not bracket the J6 defining relation at v = {v}"
        )))
    }

    /// Signed residual of the curve's defining relation at `u`.
    ///
    /// Rarefaction curves use the squared (line) form `2 m y + 4 v + m^2`; the
    /// J curves use their speed relation, which is singular at the anchor and
    /// falls back to `y - y_L` there.
    pub fn residual(&self, u: State<S>) -> S {
        let a = self.anchor;
        let two = S::lit(2.0);
        match self.kind {
            CurveKind::Parabola4v => u.y * u.y - S::lit(4.0) * u.v,
            CurveKind::ParabolaGN => u.y * u.y - S::lit(16.0) * u.v / S::lit(3.0),
            CurveKind::R1 | CurveKind::R2 => {
                let m = if self.kind == CurveKind::R1 { u.v / a.v * self.k } else { self.k };
                two * m * u.y + S::lit(4.0) * u.v + m * m
            }
            CurveKind::S1 | CurveKind::S2 => {
                let fam = if self.kind == CurveKind::S1 { Family::One } else { Family::Two };
                let (slope, icpt) = self.line(fam);
                u.y - (slope * u.v + icpt)
            }
            CurveKind::J5 | CurveKind::J6 => {
                if near_zero(u.v - a.v, a.v) {
                    return u.y - a.y;
                }
                let s = singular_speed_raw(a, u);
                if self.kind == CurveKind::J5 {
                    s - speeds(a).0
                } else {
                    s - speeds(u).1
                }
            }
        }
    }
}

pub fn eval_curve<S: Scalar>(kind: CurveKind, anchor: State<S>, v: S) -> Result<S> {
    WaveCurve::new(kind, anchor)?.eval(v)
}

/// `(F1(U_L) - F1(U)) / (v_L - v)` with no guard.
#[inline]
pub(crate) fn singular_speed_raw<S: Scalar>(ul: State<S>, u: State<S>) -> S {
    (ul.y / ul.v - u.y / u.v) / (ul.v - u.v)
}

/// Shock speed from `U_L` to the point of `S_family(U_L)` at abscissa `v`.
pub fn shock_speed<S: Scalar>(ul: State<S>, v: S, family: Family) -> Result<S> {
    let sd = anchor_sqrt_d(ul)?;
    if !(v > S::zero()) {
        return Err(Error::Domain(format!("shock abscissa must be positive, got {v}")));
    }
    let k = sd - ul.y;
    let two = S::lit(2.0);
    // (-y_L -+ sqrt d) / (2 v v_L), written without cancellation
    Ok(match family {
        Family::One => two / (k * v),
        Family::Two => k / (two * v * ul.v),
    })
}

/// Lax inequalities `lambda_i(U_L) > s_i > lambda_i(U)` for a state on the
/// family's shock curve.
pub fn lax_admissible<S: Scalar>(ul: State<S>, u: State<S>, family: Family) -> Result<bool> {
    let kind = match family {
        Family::One => CurveKind::S1,
        Family::Two => CurveKind::S2,
    };
    let curve = WaveCurve::new(kind, ul)?;
    let res = curve.residual(u);
    let scale = S::one() + u.y.abs() + u.v.abs();
    if res.abs() > S::lit(1e-8) * scale {
        return Err(Error::NotOnCurve {
            curve: kind.name(),
            residual: res.as_f64(),
        });
    }
    if u == ul || !(u.v > S::zero()) {
        return Ok(false);
    }
    let s = shock_speed(ul, u.v, family)?;
    let pick = |st: State<S>| {
        let (a, b) = speeds(st);
        if family == Family::One {
            a
        } else {
            b
        }
    };
    Ok(pick(ul) > s && s > pick(u))
}

/// Intersections of the wave curves through `U_L` with the parabola and the
/// triangle sides.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecialPoints<S> {
    /// `R_1` tangent to `y^2 = 4v`.
    pub g: State<S>,
    /// `R_1` (equivalently `S_1`) meets OB.
    pub h: State<S>,
    /// `R_2` meets OA.
    pub c: State<S>,
    /// `S_2` (equivalently `R_2`) tangent to `y^2 = 4v`.
    pub d: State<S>,
    /// `R_2` meets OB.
    pub e: State<S>,
    /// `R_2(U_G)` meets OA.
    pub f: State<S>,
}

fn checked_div<S: Scalar>(num: S, den: S, scale: S, what: &str) -> Result<S> {
    if near_zero(den, scale) || !den.is_finite() {
        return Err(Error::Domain(format!("vanishing denominator for {what}")));
    }
    Ok(num / den)
}

/// `U_G` and `U_D` only; needs no triangle parameters.
pub fn tangency_points<S: Scalar>(ul: State<S>) -> Result<(State<S>, State<S>)> {
    let sd = anchor_sqrt_d(ul)?;
    let k = sd - ul.y;
    let four = S::lit(4.0);
    let yg = -four * ul.v / k;
    let yd = ul.y - sd;
    Ok((State::new(yg * yg / four, yg), State::new(yd * yd / four, yd)))
}

pub fn special_points<S: Scalar>(ul: State<S>, params: &PhysParams<S>) -> Result<SpecialPoints<S>> {
    let (g, d) = tangency_points(ul)?;
    let sd = anchor_sqrt_d(ul)?;
    let k = sd - ul.y;
    let PhysParams { alpha1: a1, alpha2: a2, alpha: a } = *params;
    let tri = params.triangle();
    let (two, four) = (S::lit(2.0), S::lit(4.0));
    let (vl, yl) = (ul.v, ul.y);
    let a_sq = a * a;

    let h_den = a_sq * k * k - two * a1 * vl * k;
    let vh = checked_div(
        -four * a_sq * vl * vl + two * a * a2 * vl * k,
        h_den,
        a_sq * k * k,
        "U_H",
    )?;
    let c_den = four * a_sq - two * a2 * k;
    let vc = checked_div((two * a * a1 - a_sq * sd + a_sq * yl) * k, c_den, four * a_sq, "U_C")?;
    let e_den = four * a_sq - two * a1 * k;
    let ve = checked_div((two * a * a2 - a_sq * sd + a_sq * yl) * k, e_den, four * a_sq, "U_E")?;
    let f_den = a_sq * k * k - two * a2 * vl * k;
    let vf = checked_div(
        -four * a_sq * vl * vl + two * a * a1 * vl * k,
        f_den,
        a_sq * k * k,
        "U_F",
    )?;

    Ok(SpecialPoints {
        g,
        h: State::new(vh, tri.ob(vh)),
        c: State::new(vc, tri.oa(vc)),
        d,
        e: State::new(ve, tri.ob(ve)),
        f: State::new(vf, tri.oa(vf)),
    })
}
