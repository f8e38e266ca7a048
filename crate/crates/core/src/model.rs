//! Physical parameters, variable transforms, flux and eigenstructure.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{near_zero, Scalar};

/// Adsorption constants `alpha1 < alpha2` and the cube-root mean `alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysParams<S> {
    pub alpha1: S,
    pub alpha2: S,
    pub alpha: S,
}

impl<S: Scalar> PhysParams<S> {
    pub fn new(alpha1: S, alpha2: S) -> Result<Self> {
        if !(alpha1 > S::zero() && alpha2 > alpha1 && alpha2.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < alpha1 < alpha2, got ({alpha1}, {alpha2})"
            )));
        }
        Ok(Self {
            alpha1,
            alpha2,
            alpha: (alpha1 * alpha2).cbrt(),
        })
    }

    /// Whether `alpha2/3 < alpha1 < 3 alpha2`.
    pub fn strict_gn(&self) -> bool {
        let three = S::lit(3.0);
        self.alpha2 / three < self.alpha1 && self.alpha1 < three * self.alpha2
    }

    /// States with `|v|` below this are treated as vacuum.
    pub fn degeneracy_floor(&self) -> S {
        S::lit(1e-12) * self.alpha
    }

    pub fn flux(&self, u: State<S>) -> Result<[S; 2]> {
        flux(u, self.degeneracy_floor())
    }

    pub fn triangle(&self) -> Triangle<S> {
        Triangle::new(*self)
    }
}

impl<S: Scalar> Default for PhysParams<S> {
    fn default() -> Self {
        Self::new(S::one(), S::lit(2.0)).expect("default parameters are valid")
    }
}

/// A point `(v, y)` in conserved variables.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct State<S> {
    pub v: S,
    pub y: S,
}

impl<S: Scalar> State<S> {
    pub const fn new(v: S, y: S) -> Self {
        Self { v, y }
    }

    /// `y^2 - 4v`; positive in the strictly hyperbolic region.
    #[inline]
    pub fn discriminant(&self) -> S {
        self.y * self.y - S::lit(4.0) * self.v
    }

    /// Strictly hyperbolic with `v > 0`, `y < 0`: the setting of every wave
    /// curve construction.
    pub fn is_admissible(&self) -> bool {
        self.v > S::zero() && self.y < S::zero() && self.discriminant() > S::zero()
    }

    /// `K = sqrt(y^2 - 4v) - y`, constant along 2-rarefactions.
    #[inline]
    pub fn k_invariant(&self) -> S {
        self.discriminant().max(S::zero()).sqrt() - self.y
    }

    /// `K / v`, constant along 1-rarefactions.
    #[inline]
    pub fn w_invariant(&self) -> S {
        self.k_invariant() / self.v
    }

    /// Raw flux `(y/v, 1/v)` with no floor check.
    #[inline]
    pub fn flux_raw(&self) -> [S; 2] {
        let inv = self.v.recip();
        [self.y * inv, inv]
    }

    pub fn dist(&self, other: &Self) -> S {
        (self.v - other.v).hypot(self.y - other.y)
    }

    pub fn cast<T: Scalar>(self) -> State<T> {
        State::new(T::lit(self.v.as_f64()), T::lit(self.y.as_f64()))
    }
}

impl<S: Scalar> From<(S, S)> for State<S> {
    fn from((v, y): (S, S)) -> Self {
        Self::new(v, y)
    }
}

/// Component concentrations `(u1, u2)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhysState<S> {
    pub u1: S,
    pub u2: S,
}

impl<S: Scalar> PhysState<S> {
    pub const fn new(u1: S, u2: S) -> Self {
        Self { u1, u2 }
    }

    fn denom(&self) -> S {
        S::one() - self.u1 + self.u2
    }

    /// `(omega1, omega2) = (u1, u2) / (1 - u1 + u2)`.
    pub fn omega(&self) -> Result<[S; 2]> {
        let d = self.denom();
        if d <= S::zero() {
            return Err(Error::DegenerateState {
                v: d.as_f64(),
                floor: 0.0,
            });
        }
        Ok([self.u1 / d, self.u2 / d])
    }
}

/// `F(U) = (y/v, 1/v)`, refusing states closer to vacuum than `floor`.
pub fn flux<S: Scalar>(u: State<S>, floor: S) -> Result<[S; 2]> {
    if !(u.v.abs() >= floor) || u.v == S::zero() {
        return Err(Error::DegenerateState {
            v: u.v.abs().as_f64(),
            floor: floor.as_f64(),
        });
    }
    Ok(u.flux_raw())
}

/// Flux Jacobian, row major.
pub fn jacobian<S: Scalar>(u: State<S>) -> [[S; 2]; 2] {
    let iv = u.v.recip();
    [[-u.y * iv * iv, iv], [-iv * iv, S::zero()]]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    One = 1,
    Two = 2,
}

impl Family {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Family::One),
            2 => Ok(Family::Two),
            _ => Err(Error::InvalidParameter(format!("family must be 1 or 2, got {i}"))),
        }
    }
}

/// Characteristic speed and right eigenvector of one family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharField<S> {
    pub family: Family,
    pub lambda: S,
    pub eigvec: [S; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Eigen<S> {
    Strict([CharField<S>; 2]),
    /// On `y^2 = 4v`, a single eigenvalue with a one-dimensional eigenspace.
    Coincident(CharField<S>),
    Elliptic,
}

impl<S: Scalar> Eigen<S> {
    /// `(lambda1, lambda2)`, duplicated when coincident.
    pub fn speeds(&self) -> Option<(S, S)> {
        match self {
            Eigen::Strict([a, b]) => Some((a.lambda, b.lambda)),
            Eigen::Coincident(c) => Some((c.lambda, c.lambda)),
            Eigen::Elliptic => None,
        }
    }
}

/// Characteristic speeds `(lambda1, lambda2)` of a state with `d > 0`.
///
/// Uses `lambda1 lambda2 = 1/v^3` to avoid cancellation in the small root.
#[inline]
pub fn speeds<S: Scalar>(u: State<S>) -> (S, S) {
    let d = u.discriminant();
    // roundoff-level discriminants are the parabola itself
    let sd = if near_zero(d, u.y * u.y + S::lit(4.0) * u.v.abs()) {
        S::zero()
    } else {
        d.max(S::zero()).sqrt()
    };
    let two_v2 = S::lit(2.0) * u.v * u.v;
    let det = (u.v * u.v * u.v).recip();
    if u.y <= S::zero() {
        let l2 = (sd - u.y) / two_v2;
        (det / l2, l2)
    } else {
        let l1 = (-u.y - sd) / two_v2;
        (l1, det / l1)
    }
}

/// Largest characteristic speed in magnitude; `v^(-3/2)` for elliptic states,
/// where it is the modulus of the complex pair.
#[inline]
pub fn spectral_radius<S: Scalar>(u: State<S>) -> S {
    if u.discriminant() <= S::zero() {
        u.v.abs().powr(-3, 2)
    } else {
        let (a, b) = speeds(u);
        a.abs().max(b.abs())
    }
}

pub fn eigen<S: Scalar>(u: State<S>) -> Result<Eigen<S>> {
    if u.v == S::zero() || !u.v.is_finite() || !u.y.is_finite() {
        return Err(Error::DegenerateState {
            v: u.v.as_f64(),
            floor: 0.0,
        });
    }
    let d = u.discriminant();
    let two_v = S::lit(2.0) * u.v;
    match classify_hyperbolicity(u) {
        Hyperbolicity::Elliptic => Ok(Eigen::Elliptic),
        Hyperbolicity::Boundary => Ok(Eigen::Coincident(CharField {
            family: Family::One,
            lambda: -u.y / (two_v * u.v),
            eigvec: [two_v, u.y],
        })),
        Hyperbolicity::Hyperbolic => {
            let sd = d.sqrt();
            let (l1, l2) = speeds(u);
            Ok(Eigen::Strict([
                CharField {
                    family: Family::One,
                    lambda: l1,
                    eigvec: [two_v, u.y - sd],
                },
                CharField {
                    family: Family::Two,
                    lambda: l2,
                    eigvec: [two_v, u.y + sd],
                },
            ]))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hyperbolicity {
    Hyperbolic,
    Boundary,
    Elliptic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Nonlinearity {
    GN,
    NotGN,
    OnGNCurve,
}

pub fn classify_hyperbolicity<S: Scalar>(u: State<S>) -> Hyperbolicity {
    let d = u.discriminant();
    if near_zero(d, u.y * u.y + S::lit(4.0) * u.v.abs()) {
        Hyperbolicity::Boundary
    } else if d > S::zero() {
        Hyperbolicity::Hyperbolic
    } else {
        Hyperbolicity::Elliptic
    }
}

/// Sign class of `y^2 - 16v/3`.
pub fn classify_nonlinearity<S: Scalar>(u: State<S>) -> Nonlinearity {
    let g = u.y * u.y - S::lit(16.0) * u.v / S::lit(3.0);
    if near_zero(g, u.y * u.y + S::lit(6.0) * u.v.abs()) {
        Nonlinearity::OnGNCurve
    } else if g > S::zero() {
        Nonlinearity::GN
    } else {
        Nonlinearity::NotGN
    }
}

pub fn classify_state<S: Scalar>(u: State<S>) -> (Hyperbolicity, Nonlinearity) {
    (classify_hyperbolicity(u), classify_nonlinearity(u))
}

/// Exact `grad(lambda_i) . r_i` with the eigenvector scaling used by
/// [`eigen`]. Requires a strictly hyperbolic state with `y < 0`.
pub fn gn_factor<S: Scalar>(u: State<S>, family: Family) -> S {
    let k = u.k_invariant();
    match family {
        Family::One => -S::lit(8.0) / (k * u.v),
        Family::Two => -S::lit(2.0) * k / (u.v * u.v),
    }
}

/// Concentrations to conserved variables.
pub fn to_conserved<S: Scalar>(p: PhysState<S>, params: &PhysParams<S>) -> Result<State<S>> {
    let d = S::one() - p.u1 + p.u2;
    if d <= S::zero() {
        return Err(Error::DegenerateState {
            v: d.as_f64(),
            floor: 0.0,
        });
    }
    let PhysParams { alpha1, alpha2, alpha } = *params;
    Ok(State::new(
        alpha / d,
        (alpha2 * p.u1 - alpha1 * p.u2 - (alpha1 + alpha2)) / (alpha * d),
    ))
}

/// Same map routed through `omega = u / (1 - u1 + u2)`.
pub fn to_conserved_omega<S: Scalar>(p: PhysState<S>, params: &PhysParams<S>) -> Result<State<S>> {
    let [w1, w2] = p.omega()?;
    let PhysParams { alpha1, alpha2, alpha } = *params;
    let v = alpha * (S::one() + w1 - w2);
    let y = (alpha2 * w1 - alpha1 * w2 - (alpha1 + alpha2) * v / alpha) / alpha;
    Ok(State::new(v, y))
}

pub fn from_conserved<S: Scalar>(u: State<S>, params: &PhysParams<S>) -> Result<PhysState<S>> {
    if !(u.v > S::zero()) {
        return Err(Error::DegenerateState {
            v: u.v.as_f64(),
            floor: 0.0,
        });
    }
    let PhysParams { alpha1, alpha2, alpha } = *params;
    // d = 1 - u1 + u2
    let d = alpha / u.v;
    let u1 = (u.y * alpha * d + alpha1 * d + alpha2) / (alpha2 - alpha1);
    Ok(PhysState::new(u1, u1 - S::one() + d))
}

/// The curvilinear triangle of physical states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triangle<S> {
    pub o: State<S>,
    pub a: State<S>,
    pub b: State<S>,
    params: PhysParams<S>,
}

impl<S: Scalar> Triangle<S> {
    pub fn new(params: PhysParams<S>) -> Self {
        let PhysParams { alpha1, alpha2, alpha } = params;
        let two = S::lit(2.0);
        Self {
            o: State::new(alpha, -(alpha1 + alpha2) / alpha),
            a: State::new(alpha1 * alpha / alpha2, -two * alpha1 / alpha),
            b: State::new(alpha2 * alpha / alpha1, -two * alpha2 / alpha),
            params,
        }
    }

    /// Line through O and A (where `u1 = 0`).
    pub fn oa(&self, v: S) -> S {
        let p = &self.params;
        -p.alpha2 * v / (p.alpha * p.alpha) - p.alpha1 / p.alpha
    }

    /// Line through O and B (where `u2 = 0`).
    pub fn ob(&self, v: S) -> S {
        let p = &self.params;
        -p.alpha1 * v / (p.alpha * p.alpha) - p.alpha2 / p.alpha
    }

    pub fn contains(&self, u: State<S>) -> bool {
        let tol = S::lit(1e-12) * (S::one() + u.v.abs() + u.y.abs());
        u.v >= self.a.v - tol
            && u.v <= self.b.v + tol
            && u.y >= self.oa(u.v) - tol
            && u.y >= self.ob(u.v) - tol
            && u.y <= S::zero()
            && u.discriminant() >= -tol
    }
}

pub fn triangle_membership<S: Scalar>(u: State<S>, params: &PhysParams<S>) -> bool {
    params.triangle().contains(u)
}
