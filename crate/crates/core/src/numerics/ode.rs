//! Dormand–Prince 5(4) with step rejection on invalid states.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Accepted step: time, state and derivative (first-same-as-last).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Step<S, const N: usize> {
    pub t: S,
    pub y: [S; N],
    pub dy: [S; N],
}

/// Returned by the step observer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Clone, Copy, Debug)]
pub struct Dopri5<S> {
    pub rtol: S,
    pub atol: S,
    /// Initial step magnitude; estimated from the data when `None`.
    pub h0: Option<S>,
    pub h_max: S,
    pub max_steps: usize,
}

impl<S: Scalar> Default for Dopri5<S> {
    fn default() -> Self {
        Self {
            rtol: S::lit(1e-10),
            atol: S::lit(1e-12),
            h0: None,
            h_max: S::infinity(),
            max_steps: 1_000_000,
        }
    }
}

const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth minus fourth order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

impl<S: Scalar> Dopri5<S> {
    pub fn with_tol(rtol: S, atol: S) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    /// Integrates from `t0` towards `t_end` (either direction).
    ///
    /// `f` returns `None` for states outside its domain; the step is then
    /// rejected and retried with a smaller step. `observe` sees every accepted
    /// step, including the initial point, and may stop the integration or
    /// abort it with an error. The returned vector holds every accepted step.
    pub fn integrate<const N: usize, F, O>(
        &self,
        mut f: F,
        t0: S,
        y0: [S; N],
        t_end: S,
        mut observe: O,
    ) -> Result<Vec<Step<S, N>>>
    where
        F: FnMut(S, &[S; N]) -> Option<[S; N]>,
        O: FnMut(&Step<S, N>) -> Result<Control>,
    {
        let dir = if t_end >= t0 { S::one() } else { -S::one() };
        let dy0 = f(t0, &y0).ok_or_else(|| {
            Error::Domain(format!("initial state {y0:?} outside the vector field domain"))
        })?;
        let mut cur = Step { t: t0, y: y0, dy: dy0 };
        let mut out = vec![cur];
        if observe(&cur)? == Control::Stop || t0 == t_end {
            return Ok(out);
        }

        let mut h = self.h0.unwrap_or_else(|| self.initial_step(&y0, &dy0)).min(self.h_max);
        let span = (t_end - t0).abs();
        let mut k = [[S::zero(); N]; 7];
        let mut rejected_last = false;

        for _ in 0..self.max_steps {
            let remaining = (t_end - cur.t).abs();
            if remaining <= S::epsilon() * span.max(cur.t.abs()) {
                break;
            }
            h = h.min(remaining);
            let h_floor = S::lit(16.0) * S::epsilon() * cur.t.abs().max(span);
            if h <= h_floor {
                return Err(Error::Domain(format!(
                    "step size underflow at t = {}",
                    cur.t
                )));
            }
            let hs = h * dir;

            k[0] = cur.dy;
            let mut ok = true;
            let mut y_new = cur.y;
            for s in 0..6 {
                let mut ys = cur.y;
                for i in 0..N {
                    let mut acc = S::zero();
                    for (j, kj) in k.iter().enumerate().take(s + 1) {
                        let a = A[s][j];
                        if a != 0.0 {
                            acc = acc + S::lit(a) * kj[i];
                        }
                    }
                    ys[i] = cur.y[i] + hs * acc;
                }
                match f(cur.t + S::lit(C[s]) * hs, &ys) {
                    Some(d) if d.iter().all(|x| x.is_finite()) => k[s + 1] = d,
                    _ => {
                        ok = false;
                        break;
                    }
                }
                if s == 5 {
                    y_new = ys;
                }
            }
            if !ok {
                h = h * S::lit(0.25);
                rejected_last = true;
                continue;
            }

            let mut err = S::zero();
            for i in 0..N {
                let mut e = S::zero();
                for (j, kj) in k.iter().enumerate() {
                    e = e + S::lit(E[j]) * kj[i];
                }
                let sc = self.atol + self.rtol * cur.y[i].abs().max(y_new[i].abs());
                let r = hs * e / sc;
                err = err + r * r;
            }
            err = (err / S::from_count(N)).sqrt();

            if err <= S::one() && err.is_finite() {
                let t_new = if h == remaining { t_end } else { cur.t + hs };
                cur = Step { t: t_new, y: y_new, dy: k[6] };
                out.push(cur);
                if observe(&cur)? == Control::Stop {
                    return Ok(out);
                }
                let mut fac = S::lit(0.9) * err.max(S::lit(1e-10)).powf(S::lit(-0.2));
                fac = fac.min(S::lit(5.0)).max(S::lit(0.2));
                if rejected_last {
                    fac = fac.min(S::one());
                }
                h = (h * fac).min(self.h_max);
                rejected_last = false;
            } else {
                let fac = if err.is_finite() {
                    (S::lit(0.9) * err.powf(S::lit(-0.2))).max(S::lit(0.1))
                } else {
                    S::lit(0.1)
                };
                h = h * fac;
                rejected_last = true;
            }
        }
        if (t_end - cur.t).abs() > S::epsilon() * span.max(cur.t.abs()) {
            return Err(Error::Domain(format!(
                "step budget of {} exhausted at t = {}",
                self.max_steps, cur.t
            )));
        }
        Ok(out)
    }

    fn initial_step<const N: usize>(&self, y: &[S; N], dy: &[S; N]) -> S {
        let mut d0 = S::zero();
        let mut d1 = S::zero();
        for i in 0..N {
            let sc = self.atol + self.rtol * y[i].abs();
            d0 = d0 + (y[i] / sc).powi(2);
            d1 = d1 + (dy[i] / sc).powi(2);
        }
        let (d0, d1) = (d0.sqrt(), d1.sqrt());
        if d0 < S::lit(1e-5) || d1 < S::lit(1e-5) {
            S::lit(1e-6)
        } else {
            S::lit(0.01) * d0 / d1
        }
    }
}

/// Cubic Hermite interpolation between two accepted steps.
pub fn hermite<S: Scalar, const N: usize>(a: &Step<S, N>, b: &Step<S, N>, t: S) -> [S; N] {
    let h = b.t - a.t;
    let th = (t - a.t) / h;
    let th2 = th * th;
    let th3 = th2 * th;
    let two = S::lit(2.0);
    let three = S::lit(3.0);
    let h00 = two * th3 - three * th2 + S::one();
    let h10 = th3 - two * th2 + th;
    let h01 = -two * th3 + three * th2;
    let h11 = th3 - th2;
    std::array::from_fn(|i| h00 * a.y[i] + h10 * h * a.dy[i] + h01 * b.y[i] + h11 * h * b.dy[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let sol = Dopri5::<f64>::default()
            .integrate(|_, y| Some([-y[0]]), 0.0, [1.0], 5.0, |_| Ok(Control::Continue))
            .unwrap();
        let last = sol.last().unwrap();
        assert_eq!(last.t, 5.0);
        assert!((last.y[0] - (-5f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn backward_harmonic() {
        let sol = Dopri5::<f64>::default()
            .integrate(
                |_, y| Some([y[1], -y[0]]),
                0.0,
                [0.0, 1.0],
                -std::f64::consts::PI,
                |_| Ok(Control::Continue),
            )
            .unwrap();
        let y = sol.last().unwrap().y;
        assert!(y[0].abs() < 1e-9 && (y[1] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_invalid_states() {
        // y' = -1/(2y) hits zero at t = 1; steps past it are refused
        let sol = Dopri5::<f64>::default()
            .integrate(
                |_, y| if y[0] > 0.0 { Some([-0.5 / y[0]]) } else { None },
                0.0,
                [1.0],
                2.0,
                |s| Ok(if s.y[0] < 1e-3 { Control::Stop } else { Control::Continue }),
            )
            .unwrap();
        assert!(sol.iter().all(|s| s.y[0] > 0.0));
        let last = sol.last().unwrap();
        let exact = (1.0 - last.t).sqrt();
        assert!(last.y[0] < 1e-3 && (last.y[0] - exact).abs() < 1e-2 * exact);
    }

    #[test]
    fn observer_error_propagates() {
        let r = Dopri5::<f64>::default().integrate(
            |_, y| Some([y[0]]),
            0.0,
            [1.0],
            10.0,
            |s| {
                if s.y[0] > 100.0 {
                    Err(Error::BlowUp { eta: s.t })
                } else {
                    Ok(Control::Continue)
                }
            },
        );
        assert!(matches!(r, Err(Error::BlowUp { .. })));
    }

    #[test]
    fn dense_output() {
        let sol = Dopri5::<f64>::default()
            .integrate(|_, y| Some([y[1], -y[0]]), 0.0, [0.0, 1.0], 6.0, |_| Ok(Control::Continue))
            .unwrap();
        for w in sol.windows(2) {
            let tm = 0.5 * (w[0].t + w[1].t);
            let y = hermite(&w[0], &w[1], tm);
            assert!((y[0] - tm.sin()).abs() < 1e-6);
        }
    }

    #[test]
    fn f32_integration() {
        let sol = Dopri5::<f32>::with_tol(1e-5, 1e-7)
            .integrate(|_, y| Some([-y[0]]), 0.0, [1.0], 1.0, |_| Ok(Control::Continue))
            .unwrap();
        assert!((sol.last().unwrap().y[0] - (-1f32).exp()).abs() < 1e-5);
    }
}
