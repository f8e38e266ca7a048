//! Riemann problem: region classification and the self-similar solution.

use serde::{Deserialize, Serialize};

use crate::curves::{anchor_sqrt_d, tangency_points};
use crate::error::{Error, Result};
use crate::model::{speeds, Family, PhysParams, State};
use crate::numerics::roots::{bisect, sign_changes};
use crate::scalar::{near_zero, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Wave<S> {
    Shock {
        family: Family,
        speed: S,
        left: State<S>,
        right: State<S>,
    },
    Rarefaction {
        family: Family,
        xi_lo: S,
        xi_hi: S,
        left: State<S>,
        right: State<S>,
    },
    /// Fan along `y^2 = 4v` with speed `v^(-3/2)`.
    ParabolaRarefaction {
        xi_lo: S,
        xi_hi: S,
        left: State<S>,
        right: State<S>,
    },
    SingularShock {
        speed: S,
        deficit: S,
        left: State<S>,
        right: State<S>,
    },
}

impl<S: Scalar> Wave<S> {
    pub fn left(&self) -> State<S> {
        match *self {
            Wave::Shock { left, .. }
            | Wave::Rarefaction { left, .. }
            | Wave::ParabolaRarefaction { left, .. }
            | Wave::SingularShock { left, .. } => left,
        }
    }

    pub fn right(&self) -> State<S> {
        match *self {
            Wave::Shock { right, .. }
            | Wave::Rarefaction { right, .. }
            | Wave::ParabolaRarefaction { right, .. }
            | Wave::SingularShock { right, .. } => right,
        }
    }

    /// Slowest and fastest speed occupied by the wave.
    pub fn speed_range(&self) -> (S, S) {
        match *self {
            Wave::Shock { speed, .. } | Wave::SingularShock { speed, .. } => (speed, speed),
            Wave::Rarefaction { xi_lo, xi_hi, .. } | Wave::ParabolaRarefaction { xi_lo, xi_hi, .. } => {
                (xi_lo, xi_hi)
            }
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Wave::Shock { .. } => "shock",
            Wave::Rarefaction { .. } => "rarefaction",
            Wave::ParabolaRarefaction { .. } => "parabola_rarefaction",
            Wave::SingularShock { .. } => "singular_shock",
        }
    }

    fn fan_state(&self, xi: S) -> State<S> {
        match *self {
            Wave::Rarefaction { family: Family::One, left, .. } => r1_fan(left.w_invariant(), xi),
            Wave::Rarefaction { family: Family::Two, left, .. } => r2_fan(left.k_invariant(), xi),
            Wave::ParabolaRarefaction { .. } => parabola_fan(xi),
            _ => self.left(),
        }
    }
}

fn from_invariants<S: Scalar>(k: S, w: S) -> State<S> {
    let v = k / w;
    State::new(v, -(S::lit(4.0) * v + k * k) / (S::lit(2.0) * k))
}

// lambda1 = 2 w / K^2 with w = K/v fixed
fn r1_fan<S: Scalar>(w: S, xi: S) -> State<S> {
    from_invariants((S::lit(2.0) * w / xi).sqrt(), w)
}

// lambda2 = w^2 / (2K) with K fixed
fn r2_fan<S: Scalar>(k: S, xi: S) -> State<S> {
    from_invariants(k, (S::lit(2.0) * k * xi).sqrt())
}

fn parabola_fan<S: Scalar>(xi: S) -> State<S> {
    let v = xi.powr(-2, 3);
    State::new(v, -S::lit(2.0) * v.sqrt())
}

/// Speed, deficit and overcompressivity of the singular shock joining
/// `U_L` to `U_R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularShockData<S> {
    pub s: S,
    pub k: S,
    /// `s < lambda1(U_L)`
    pub oc1: bool,
    /// `lambda2(U_R) < s`
    pub oc2: bool,
}

impl<S: Scalar> SingularShockData<S> {
    /// Positive deficit with all four characteristics entering the shock.
    pub fn is_admissible(&self) -> bool {
        self.k > S::zero() && self.oc1 && self.oc2
    }
}

pub fn singular_shock_data<S: Scalar>(ul: State<S>, ur: State<S>) -> Result<SingularShockData<S>> {
    anchor_sqrt_d(ul)?;
    anchor_sqrt_d(ur)?;
    if ul.v == ur.v {
        return Err(Error::EqualV);
    }
    let (fl, fr) = (ul.flux_raw(), ur.flux_raw());
    let s = (fl[0] - fr[0]) / (ul.v - ur.v);
    // written as w_L2 - w_R2 with w = F(U) - sU, the chart q-point form
    let k = (fl[1] - s * ul.y) - (fr[1] - s * ur.y);
    Ok(SingularShockData {
        s,
        k,
        oc1: s < speeds(ul).0,
        oc2: speeds(ur).1 < s,
    })
}

/// The delta carried by a singular shock: mass growing at rate `rate` in the
/// `y` component, located at `xi = position`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeltaReport<S> {
    pub position: S,
    pub rate: S,
    pub component: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiemannSolution<S> {
    pub region: u8,
    pub waves: Vec<Wave<S>>,
    /// `U_L`, the states joining consecutive waves, `U_R`.
    pub states: Vec<State<S>>,
}

impl<S: Scalar> RiemannSolution<S> {
    /// State at `xi = x/t`, plus the delta report when `xi` sits on a
    /// singular shock.
    pub fn evaluate(&self, xi: S) -> (State<S>, Option<DeltaReport<S>>) {
        evaluate(self, xi)
    }

    pub fn singular(&self) -> Option<SingularShockData<S>> {
        self.waves.iter().find_map(|w| match *w {
            Wave::SingularShock { speed, deficit, left, right } => Some(SingularShockData {
                s: speed,
                k: deficit,
                oc1: speed < speeds(left).0,
                oc2: speeds(right).1 < speed,
            }),
            _ => None,
        })
    }
}

pub fn evaluate<S: Scalar>(sol: &RiemannSolution<S>, xi: S) -> (State<S>, Option<DeltaReport<S>>) {
    for w in &sol.waves {
        let (lo, hi) = w.speed_range();
        if let Wave::SingularShock { speed, deficit, left, .. } = *w {
            if near_zero(xi - speed, S::one() + speed.abs()) {
                let report = DeltaReport {
                    position: speed,
                    rate: deficit,
                    component: "y",
                };
                return (left, Some(report));
            }
        }
        if xi < lo {
            return (w.left(), None);
        }
        if xi <= hi && hi > lo {
            return (w.fan_state(xi), None);
        }
    }
    (*sol.states.last().expect("solution has at least one state"), None)
}

/// Region tag plus the classification caveat, if any.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification<S> {
    pub region: u8,
    pub singular: Option<SingularShockData<S>>,
    /// Set when the datum falls outside regions 1–5 but the singular-shock
    /// inequalities fail.
    pub warning: Option<String>,
}

struct Classical<S> {
    um: State<S>,
    waves: Vec<Wave<S>>,
    region: u8,
}

fn check_inputs<S: Scalar>(ul: State<S>, ur: State<S>) -> Result<()> {
    anchor_sqrt_d(ur)?;
    if !ul.is_admissible() {
        return Err(Error::Domain(format!(
            "left state ({}, {}) must be strictly hyperbolic with v > 0, y < 0",
            ul.v, ul.y
        )));
    }
    Ok(())
}

/// Point of the composite 1-curve through `U_L` at abscissa `v >= v_G`.
fn one_curve<S: Scalar>(ul: State<S>, v: S) -> State<S> {
    let m = ul.k_invariant() * v / ul.v;
    State::new(v, -(S::lit(4.0) * v + m * m) / (S::lit(2.0) * m))
}

/// Point of the 2-curve through `um` at abscissa `v`.
fn two_curve<S: Scalar>(um: State<S>, v: S) -> S {
    let k = um.k_invariant();
    -(S::lit(4.0) * v + k * k) / (S::lit(2.0) * k)
}

fn same<S: Scalar>(a: S, b: S) -> bool {
    (a - b).abs() <= S::lit(1e-10) * (a.abs() + b.abs()).max(S::min_positive_value())
}

/// Builds the two-wave fan through `um` if it is admissible and ordered.
fn assemble<S: Scalar>(ul: State<S>, um: State<S>, ur: State<S>) -> Option<Classical<S>> {
    // U_R must sit on the branch of the 2-curve where K is conserved, i.e.
    // before the tangency of that curve with the parabola.
    let (kr, km) = (ur.k_invariant(), um.k_invariant());
    if (kr - km).abs() > S::lit(1e-8) * kr {
        return None;
    }
    let w1 = if same(um.v, ul.v) {
        None
    } else if um.v < ul.v {
        Some(Wave::Rarefaction {
            family: Family::One,
            xi_lo: speeds(ul).0,
            xi_hi: speeds(um).0,
            left: ul,
            right: um,
        })
    } else {
        Some(Wave::Shock {
            family: Family::One,
            speed: (ul.flux_raw()[0] - um.flux_raw()[0]) / (ul.v - um.v),
            left: ul,
            right: um,
        })
    };
    let w2 = if same(ur.v, um.v) {
        None
    } else if ur.v < um.v {
        Some(Wave::Rarefaction {
            family: Family::Two,
            xi_lo: speeds(um).1,
            xi_hi: speeds(ur).1,
            left: um,
            right: ur,
        })
    } else {
        Some(Wave::Shock {
            family: Family::Two,
            speed: (um.flux_raw()[0] - ur.flux_raw()[0]) / (um.v - ur.v),
            left: um,
            right: ur,
        })
    };
    if let (Some(a), Some(b)) = (&w1, &w2) {
        // strict separation, except rarefactions may touch at a state on
        // the parabola
        let (hi, lo) = (a.speed_range().1, b.speed_range().0);
        let touching = matches!((a, b), (Wave::Rarefaction { .. }, Wave::Rarefaction { .. }));
        if !(hi < lo || (touching && hi <= lo * (S::one() + S::lit(1e-12)))) {
            return None;
        }
    }
    // a zero-strength wave counts as a shock
    let shock1 = !matches!(w1, Some(Wave::Rarefaction { .. }));
    let shock2 = !matches!(w2, Some(Wave::Rarefaction { .. }));
    let region = match (shock1, shock2) {
        (true, true) => 1,
        (false, false) => 2,
        (false, true) => 3,
        (true, false) => 4,
    };
    Some(Classical {
        um,
        waves: w1.into_iter().chain(w2).collect(),
        region,
    })
}

/// Intermediate state by scanning the composite 1-curve for points whose
/// 2-curve passes through `U_R`, bisecting each sign change.
fn classical<S: Scalar>(ul: State<S>, ur: State<S>) -> Result<Option<Classical<S>>> {
    let (g, _) = tangency_points(ul)?;
    let w1l = ul.w_invariant();
    let kr = ur.k_invariant();
    // both roots of the residual lie at K_M in {K_R, 4 v_R / K_R}
    let v_max = S::lit(2.0) * ul.v.max(kr / w1l).max(S::lit(4.0) * ur.v / (kr * w1l));
    let residual = |v: S| {
        let um = one_curve(ul, v);
        (ur.y - two_curve(um, ur.v)) / (S::one() + ur.y.abs())
    };
    let n = 400;
    let ratio = (v_max / g.v).ln() / S::from_count(n);
    let grid: Vec<S> = (0..=n)
        .map(|i| if i == 0 { g.v } else { g.v * (ratio * S::from_count(i)).exp() })
        .collect();

    let mut found = None;
    for (lo, hi) in sign_changes(residual, &grid) {
        let vm = if lo == hi {
            lo
        } else {
            bisect(residual, lo, hi, S::lit(1e-12) * hi)?
        };
        if let Some(c) = assemble(ul, one_curve(ul, vm), ur) {
            found = Some(c);
            break;
        }
    }

    // cross-check with the exact intersection in invariant coordinates
    let exact = if kr >= g.k_invariant() * (S::one() - S::lit(1e-12)) {
        let vm = kr / w1l;
        assemble(ul, one_curve(ul, vm), ur)
    } else {
        None
    };
    match (&found, &exact) {
        (Some(f), Some(e)) if f.um.dist(&e.um) > S::lit(1e-8) * (S::one() + e.um.v.abs() + e.um.y.abs()) => {
            Err(Error::Consistency(format!(
                "intermediate state from the curve scan ({}, {}) disagrees with the invariant intersection ({}, {})",
                f.um.v, f.um.y, e.um.v, e.um.y
            )))
        }
        (None, Some(e)) => Err(Error::NoIntermediate(format!(
            "curve scan failed to bracket the intermediate state near v = {}",
            e.um.v
        ))),
        _ => Ok(found),
    }
}

pub fn classify_pair<S: Scalar>(
    ul: State<S>,
    ur: State<S>,
    _params: &PhysParams<S>,
) -> Result<Classification<S>> {
    check_inputs(ul, ur)?;
    if ul == ur {
        return Ok(Classification {
            region: 1,
            singular: None,
            warning: None,
        });
    }
    if let Some(c) = classical(ul, ur)? {
        return Ok(Classification {
            region: c.region,
            singular: None,
            warning: None,
        });
    }
    let (g, _) = tangency_points(ul)?;
    if ur.k_invariant() < g.k_invariant() {
        return Ok(Classification {
            region: 5,
            singular: None,
            warning: None,
        });
    }
    let data = singular_shock_data(ul, ur)?;
    let warning = (!data.is_admissible()).then(|| {
        format!(
            "datum lies outside regions 1-5 but the singular shock is inadmissible (k = {}, s < lambda1(U_L): {}, lambda2(U_R) < s: {})",
            data.k, data.oc1, data.oc2
        )
    });
    Ok(Classification {
        region: 6,
        singular: Some(data),
        warning,
    })
}

/// Full self-similar solution. Region-6 data whose singular shock violates
/// the admissibility inequalities are refused with a domain error.
pub fn solve<S: Scalar>(ul: State<S>, ur: State<S>, params: &PhysParams<S>) -> Result<RiemannSolution<S>> {
    check_inputs(ul, ur)?;
    if ul == ur {
        return Ok(RiemannSolution {
            region: 1,
            waves: vec![],
            states: vec![ul],
        });
    }
    if let Some(c) = classical(ul, ur)? {
        let mut states = vec![ul];
        states.extend(c.waves.iter().map(|w| w.right()));
        return Ok(RiemannSolution {
            region: c.region,
            waves: c.waves,
            states,
        });
    }
    let class = classify_pair(ul, ur, params)?;
    if class.region == 5 {
        return vacuum_solution(ul, ur);
    }
    let data = class.singular.expect("region 6 carries singular-shock data");
    if let Some(w) = class.warning {
        return Err(Error::Domain(w));
    }
    Ok(RiemannSolution {
        region: 6,
        waves: vec![Wave::SingularShock {
            speed: data.s,
            deficit: data.k,
            left: ul,
            right: ur,
        }],
        states: vec![ul, ur],
    })
}

/// 1-rarefaction to `U_G`, a fan along the parabola, then a 2-rarefaction.
fn vacuum_solution<S: Scalar>(ul: State<S>, ur: State<S>) -> Result<RiemannSolution<S>> {
    let (g, _) = tangency_points(ul)?;
    let kr = ur.k_invariant();
    let on_parabola = same(ur.v, kr * kr / S::lit(4.0));
    let uab = if on_parabola { ur } else { State::new(kr * kr / S::lit(4.0), -kr) };
    let lam_g = g.v.powr(-3, 2);
    let lam_ab = uab.v.powr(-3, 2);
    let mut waves = vec![
        Wave::Rarefaction {
            family: Family::One,
            xi_lo: speeds(ul).0,
            xi_hi: lam_g,
            left: ul,
            right: g,
        },
        Wave::ParabolaRarefaction {
            xi_lo: lam_g,
            xi_hi: lam_ab,
            left: g,
            right: uab,
        },
    ];
    if !on_parabola {
        waves.push(Wave::Rarefaction {
            family: Family::Two,
            xi_lo: lam_ab,
            xi_hi: speeds(ur).1,
            left: uab,
            right: ur,
        });
    }
    let mut states = vec![ul];
    states.extend(waves.iter().map(|w| w.right()));
    Ok(RiemannSolution {
        region: 5,
        waves,
        states,
    })
}
