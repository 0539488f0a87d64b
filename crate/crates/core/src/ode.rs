//! Adaptive Dormand–Prince 5(4) integration of autonomous planar fields
//! with event location.

use crate::error::{Error, Result};
use crate::roots;

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Step-size control of [`Integrator`].
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: [f64; 2],
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: [1e-12, 1e-12],
            h_init: 1e-4,
            h_min: 1e-14,
            h_max: 0.05,
            max_steps: 5_000_000,
        }
    }
}

/// Step statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub min_step: f64,
    pub evaluations: usize,
}

/// One accepted step `(t0, z0) → (t1, z1)`.
#[derive(Debug, Clone, Copy)]
pub struct Step {
    pub t0: f64,
    pub z0: [f64; 2],
    pub t1: f64,
    pub z1: [f64; 2],
}

/// Adaptive integrator of `z' = f(z)`.
pub struct Integrator<F> {
    f: F,
    opts: OdeOptions,
    t: f64,
    z: [f64; 2],
    k1: [f64; 2],
    h: f64,
    pub stats: OdeStats,
}

impl<F: Fn([f64; 2]) -> [f64; 2]> Integrator<F> {
    pub fn new(f: F, z0: [f64; 2], opts: OdeOptions) -> Self {
        let k1 = f(z0);
        Integrator {
            f,
            opts,
            t: 0.0,
            z: z0,
            k1,
            h: opts.h_init,
            stats: OdeStats {
                min_step: f64::INFINITY,
                evaluations: 1,
                ..OdeStats::default()
            },
        }
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> [f64; 2] {
        self.z
    }

    /// A single explicit step of size `h` from `z` with its error estimate.
    pub fn rk_step(&self, z: [f64; 2], k1: [f64; 2], h: f64) -> ([f64; 2], [f64; 2], [f64; 2]) {
        let mut k = [[0.0; 2]; 7];
        k[0] = k1;
        for s in 1..7 {
            let mut zs = z;
            for (j, kj) in k.iter().enumerate().take(s) {
                zs[0] += h * A[s][j] * kj[0];
                zs[1] += h * A[s][j] * kj[1];
            }
            k[s] = (self.f)(zs);
        }
        let mut z1 = z;
        let mut err = [0.0; 2];
        for s in 0..7 {
            for c in 0..2 {
                z1[c] += h * B[s] * k[s][c];
                err[c] += h * E[s] * k[s][c];
            }
        }
        (z1, err, k[6])
    }

    /// Takes one accepted adaptive step, never beyond `t_end`.
    pub fn step(&mut self, t_end: f64) -> Result<Step> {
        loop {
            if self.stats.accepted + self.stats.rejected >= self.opts.max_steps {
                return Err(Error::NotConverged {
                    what: "ODE integration (step budget)",
                    estimate: self.t,
                    tolerance: t_end,
                });
            }
            let h = self.h.min(self.opts.h_max).min(t_end - self.t);
            if h < self.opts.h_min && t_end - self.t > self.opts.h_min {
                return Err(Error::StepUnderflow {
                    t: self.t,
                    x: self.z[0],
                    y: self.z[1],
                });
            }
            let (z1, err, k7) = self.rk_step(self.z, self.k1, h);
            self.stats.evaluations += 6;
            let mut norm = 0.0;
            for c in 0..2 {
                let sc = self.opts.atol[c] + self.opts.rtol * self.z[c].abs().max(z1[c].abs());
                norm += (err[c] / sc).powi(2);
            }
            let norm = (0.5 * norm).sqrt();
            if !norm.is_finite() || !z1[0].is_finite() || !z1[1].is_finite() {
                self.stats.rejected += 1;
                self.h = 0.2 * h;
                continue;
            }
            let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
            if norm <= 1.0 {
                let step = Step {
                    t0: self.t,
                    z0: self.z,
                    t1: self.t + h,
                    z1,
                };
                self.t += h;
                self.z = z1;
                self.k1 = k7;
                self.stats.accepted += 1;
                self.stats.min_step = self.stats.min_step.min(h);
                self.h = h * factor;
                return Ok(step);
            }
            self.stats.rejected += 1;
            self.h = h * factor.min(1.0);
        }
    }

    /// Restarts from a new state at the current time.
    pub fn reset(&mut self, z: [f64; 2]) {
        self.z = z;
        self.k1 = (self.f)(z);
        self.stats.evaluations += 1;
    }

    /// State at `t0 + dt` inside an accepted step, by a fresh single step
    /// from its start.
    pub fn dense(&self, step: &Step, dt: f64) -> [f64; 2] {
        if dt <= 0.0 {
            return step.z0;
        }
        self.rk_step(step.z0, (self.f)(step.z0), dt).0
    }

    /// Locates `g = 0` inside an accepted step by re-integrating from its
    /// start with a single step of the bisected length.
    pub fn locate<G: Fn([f64; 2]) -> f64>(&self, step: &Step, g: G, time_tol: f64) -> Result<(f64, [f64; 2])> {
        let k0 = (self.f)(step.z0);
        let at = |dt: f64| {
            if dt <= 0.0 {
                step.z0
            } else {
                self.rk_step(step.z0, k0, dt).0
            }
        };
        let h = step.t1 - step.t0;
        let dt = roots::brent_with_values(|dt| g(at(dt)), 0.0, h, g(step.z0), g(step.z1), time_tol)?;
        Ok((step.t0 + dt, at(dt)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let opts = OdeOptions::default();
        let mut ig = Integrator::new(|z: [f64; 2]| [z[1], -z[0]], [1.0, 0.0], opts);
        let t_end = 2.0 * std::f64::consts::PI;
        while ig.time() < t_end {
            ig.step(t_end).unwrap();
        }
        let z = ig.state();
        assert!((z[0] - 1.0).abs() < 1e-9 && z[1].abs() < 1e-9, "{z:?}");
    }

    #[test]
    fn exponential_decay_and_event() {
        let opts = OdeOptions::default();
        let mut ig = Integrator::new(|z: [f64; 2]| [-z[0], 1.0], [1.0, 0.0], opts);
        loop {
            let s = ig.step(10.0).unwrap();
            if s.z1[0] < 0.5 {
                let (t, z) = ig.locate(&s, |z| z[0] - 0.5, 1e-13).unwrap();
                assert!((t - 2f64.ln()).abs() < 1e-10);
                assert!((z[1] - t).abs() < 1e-12);
                break;
            }
        }
    }

    #[test]
    fn fifth_order_convergence() {
        let ig = Integrator::new(|z: [f64; 2]| [z[1], -z[0]], [1.0, 0.0], OdeOptions::default());
        let err = |h: f64| {
            let n = (1.0 / h).round() as usize;
            let mut z = [1.0, 0.0];
            for _ in 0..n {
                let k1 = [z[1], -z[0]];
                z = ig.rk_step(z, k1, h).0;
            }
            (z[0] - 1f64.cos()).hypot(z[1] + 1f64.sin())
        };
        let ratio = err(0.1) / err(0.05);
        assert!(ratio > 24.0 && ratio < 40.0, "{ratio}");
    }

    #[test]
    fn underflow_is_reported() {
        let opts = OdeOptions {
            h_min: 1e-6,
            ..OdeOptions::default()
        };
        let mut ig = Integrator::new(|z: [f64; 2]| [z[0] * z[0], 0.0], [1.0, 0.0], opts);
        let mut out = Ok(());
        while ig.time() < 2.0 {
            if let Err(e) = ig.step(2.0) {
                out = Err(e);
                break;
            }
        }
        assert!(matches!(out, Err(Error::StepUnderflow { .. })));
    }
}
