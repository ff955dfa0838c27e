//! Dormand-Prince 5(4) integrator for two-component systems with per-step event checks.

use crate::error::{Error, Result};

pub type State = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, max_step: 0.02, initial_step: 1e-4, max_steps: 2_000_000 }
    }
}

/// Outcome of an event check after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeEvent<E> {
    Continue,
    Stop(E),
}

/// Accepted steps `(r, y, y')` of an integration, plus the stopping event if any.
#[derive(Debug, Clone)]
pub struct OdeTrajectory<E> {
    pub r: Vec<f64>,
    pub y: Vec<State>,
    pub dy: Vec<State>,
    pub event: Option<E>,
}

impl<E> OdeTrajectory<E> {
    /// Cubic Hermite interpolation of component `k` between accepted steps.
    pub fn eval(&self, k: usize, r: f64) -> f64 {
        let n = self.r.len();
        if r <= self.r[0] {
            return self.y[0][k];
        }
        if r >= self.r[n - 1] {
            return self.y[n - 1][k];
        }
        let i = self.r.partition_point(|&x| x <= r) - 1;
        let (r0, r1) = (self.r[i], self.r[i + 1]);
        let h = r1 - r0;
        let t = (r - r0) / h;
        let (y0, y1) = (self.y[i][k], self.y[i + 1][k]);
        let (d0, d1) = (self.dy[i][k] * h, self.dy[i + 1][k] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * d0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * d1
    }

    pub fn last_r(&self) -> f64 {
        *self.r.last().unwrap()
    }
}

pub struct Dopri5<F> {
    rhs: F,
    opts: OdeOptions,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const E: [f64; 7] =
    [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

impl<F> Dopri5<F>
where
    F: Fn(f64, State) -> State,
{
    pub fn new(rhs: F, opts: OdeOptions) -> Self {
        Self { rhs, opts }
    }

    /// Integrates from `r0` to `r_end`, calling `check(r, y)` after every accepted step.
    pub fn integrate<Ev>(
        &self,
        r0: f64,
        y0: State,
        r_end: f64,
        mut check: impl FnMut(f64, &State) -> OdeEvent<Ev>,
    ) -> Result<OdeTrajectory<Ev>> {
        let o = &self.opts;
        let mut r = r0;
        let mut y = y0;
        let mut k1 = (self.rhs)(r, y);
        let mut traj = OdeTrajectory { r: vec![r], y: vec![y], dy: vec![k1], event: None };
        let mut h = o.initial_step.min(o.max_step);
        let mut steps = 0usize;
        while r < r_end {
            steps += 1;
            if steps > o.max_steps {
                return Err(Error::IntegratorFault { t: r, dump: format!("step budget {} exhausted", o.max_steps) });
            }
            h = h.min(r_end - r).min(o.max_step);
            let mut k = [[0.0; 2]; 7];
            k[0] = k1;
            for s in 1..7 {
                let mut ys = y;
                for c in 0..2 {
                    let mut acc = 0.0;
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += A[s][j] * kj[c];
                    }
                    ys[c] += h * acc;
                }
                k[s] = (self.rhs)(r + C[s] * h, ys);
            }
            let mut y_new = y;
            let mut err: f64 = 0.0;
            for c in 0..2 {
                let mut acc = 0.0;
                let mut e = 0.0;
                for s in 0..7 {
                    acc += B[s] * k[s][c];
                    e += E[s] * k[s][c];
                }
                y_new[c] += h * acc;
                let scale = o.atol + o.rtol * y[c].abs().max(y_new[c].abs());
                err = err.max((h * e / scale).abs());
            }
            if !err.is_finite() || !y_new.iter().all(|v| v.is_finite()) {
                if h < 1e-14 {
                    return Err(Error::IntegratorFault { t: r, dump: format!("non-finite state from y = {y:?}") });
                }
                h *= 0.25;
                continue;
            }
            if err <= 1.0 {
                r += h;
                y = y_new;
                k1 = k[6];
                traj.r.push(r);
                traj.y.push(y);
                traj.dy.push(k1);
                if let OdeEvent::Stop(ev) = check(r, &y) {
                    traj.event = Some(ev);
                    return Ok(traj);
                }
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
            if h < 1e-14 * r.abs().max(1.0) {
                return Err(Error::IntegratorFault { t: r, dump: format!("step size collapse, y = {y:?}") });
            }
        }
        Ok(traj)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let ode = Dopri5::new(|_, y: State| [y[1], -y[0]], OdeOptions::default());
        let traj = ode.integrate(0.0, [1.0, 0.0], 10.0, |_, _| OdeEvent::<()>::Continue).unwrap();
        assert!((traj.y.last().unwrap()[0] - 10f64.cos()).abs() < 1e-10);
        assert!((traj.eval(0, 3.3) - 3.3f64.cos()).abs() < 1e-8);
    }

    #[test]
    fn event_stops_integration() {
        let ode = Dopri5::new(|_, y: State| [y[1], -y[0]], OdeOptions::default());
        let traj = ode
            .integrate(0.0, [1.0, 0.0], 10.0, |_, y| if y[0] < 0.0 { OdeEvent::Stop(1) } else { OdeEvent::Continue })
            .unwrap();
        assert_eq!(traj.event, Some(1));
        assert!((traj.last_r() - std::f64::consts::FRAC_PI_2).abs() < 0.03);
    }
}
