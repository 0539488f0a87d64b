//! Monotone transition functions `φ: ℝ → (0, 1)` used to smooth the switching.
//!
//! Every slow divergence formula needs `φ` only through the composite
//! `q(p) = φ'(φ⁻¹(p))`, so [`Regularizer::q`] uses a closed form whenever one
//! exists.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::roots;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Which built-in formula a regularizer uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RegKind {
    Tanh,
    Arctan,
    Custom,
}

/// A transition function with derivative, inverse and slope-at-level.
#[derive(Clone)]
pub struct Regularizer {
    name: String,
    kind: RegKind,
    phi: RealFn,
    dphi: RealFn,
}

impl fmt::Debug for Regularizer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Regularizer")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .finish()
    }
}

/// `φ(u) = (1 + tanh u) / 2`, with `q(p) = 2p(1 - p)`.
pub fn make_tanh_regularizer() -> Regularizer {
    Regularizer {
        name: "tanh".into(),
        kind: RegKind::Tanh,
        phi: Arc::new(|u: f64| 0.5 * (1.0 + u.tanh())),
        dphi: Arc::new(|u: f64| {
            let c = u.cosh();
            0.5 / (c * c)
        }),
    }
}

/// `φ(u) = 1/2 + arctan(u)/π`, with `q(p) = sin²(πp)/π`.
pub fn make_arctan_regularizer() -> Regularizer {
    Regularizer {
        name: "arctan".into(),
        kind: RegKind::Arctan,
        phi: Arc::new(|u: f64| 0.5 + u.atan() / PI),
        dphi: Arc::new(|u: f64| 1.0 / (PI * (1.0 + u * u))),
    }
}

impl Regularizer {
    /// A user-supplied transition function. The inverse is found by a
    /// bracketed root search and `q` is assembled from it.
    pub fn custom<P, D>(name: &str, phi: P, dphi: D) -> Self
    where
        P: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Regularizer {
            name: name.to_string(),
            kind: RegKind::Custom,
            phi: Arc::new(phi),
            dphi: Arc::new(dphi),
        }
    }

    /// Looks up a built-in by its model-file name.
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "tanh" => Some(make_tanh_regularizer()),
            "arctan" => Some(make_arctan_regularizer()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> RegKind {
        self.kind
    }

    pub fn phi(&self, u: f64) -> f64 {
        (self.phi)(u)
    }

    pub fn dphi(&self, u: f64) -> f64 {
        (self.dphi)(u)
    }

    /// Inverse of `φ` on `(0, 1)`; infinite outside.
    pub fn phi_inv(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if p >= 1.0 {
            return f64::INFINITY;
        }
        match self.kind {
            RegKind::Tanh => (2.0 * p - 1.0).atanh(),
            RegKind::Arctan => (PI * (p - 0.5)).tan(),
            RegKind::Custom => self.numeric_inverse(p),
        }
    }

    fn numeric_inverse(&self, p: f64) -> f64 {
        let (mut lo, mut hi) = (-1.0, 1.0);
        let mut guard = 0;
        while self.phi(lo) > p && guard < 200 {
            lo *= 2.0;
            guard += 1;
        }
        while self.phi(hi) < p && guard < 400 {
            hi *= 2.0;
            guard += 1;
        }
        roots::brent(|u| self.phi(u) - p, lo, hi, 1e-14).unwrap_or(f64::NAN)
    }

    /// Slope at level `p`: `φ'(φ⁻¹(p))`, extended by zero at `p = 0, 1`.
    pub fn q(&self, p: f64) -> f64 {
        if p <= 0.0 || p >= 1.0 {
            return 0.0;
        }
        match self.kind {
            RegKind::Tanh => 2.0 * p * (1.0 - p),
            RegKind::Arctan => {
                let s = (PI * p).sin();
                s * s / PI
            }
            RegKind::Custom => self.dphi(self.phi_inv(p)),
        }
    }

    /// `φ'(φ⁻¹(p))` computed through the inverse, bypassing closed forms.
    pub fn q_composite(&self, p: f64) -> f64 {
        if p <= 0.0 || p >= 1.0 {
            return 0.0;
        }
        self.dphi(self.phi_inv(p))
    }
}

/// Sampling used by [`verify_regularizer`].
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    /// Number of interior levels `p` in `(0, 1)`.
    pub levels: usize,
    /// Number of samples of `u` in `[-u_max, u_max]`.
    pub samples: usize,
    pub u_max: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            levels: 1000,
            samples: 4001,
            u_max: 20.0,
        }
    }
}

/// Numerical check of the admissibility conditions.
#[derive(Debug, Clone, Serialize)]
pub struct RegularizerReport {
    pub name: String,
    pub monotone: bool,
    /// Most negative derivative (or increment) seen, `0` when monotone.
    pub worst_monotonicity: f64,
    pub limits: bool,
    /// Largest of `|1 - φ(10^k)|` and `|φ(-10^k)|` at `k = 6`.
    pub limit_gap: f64,
    pub inverse_max_error: f64,
    pub endpoints_vanish: bool,
    pub q_positive: bool,
    pub passed: bool,
}

/// Checks monotonicity, the limits at ±∞, the inverse and `q` on grids.
pub fn verify_regularizer(reg: &Regularizer, grid: GridSpec) -> RegularizerReport {
    let mut worst = 0.0f64;
    let mut prev = f64::NEG_INFINITY;
    for i in 0..grid.samples {
        let u = -grid.u_max + 2.0 * grid.u_max * i as f64 / (grid.samples - 1) as f64;
        let d = reg.dphi(u);
        let v = reg.phi(u);
        if d <= 0.0 || !d.is_finite() {
            worst = worst.min(d);
        }
        if v < prev {
            worst = worst.min(v - prev);
        }
        prev = v;
    }
    let monotone = worst == 0.0;

    let mut limits = true;
    let mut last_gap = f64::INFINITY;
    let mut limit_gap = 0.0;
    for k in 1..=6 {
        let u = 10f64.powi(k);
        let gap = (1.0 - reg.phi(u)).abs().max(reg.phi(-u).abs());
        if !gap.is_finite() || gap > last_gap + 1e-15 {
            limits = false;
        }
        last_gap = gap;
        limit_gap = gap;
    }
    limits &= limit_gap < 1e-3;

    let mut inverse_max_error = 0.0f64;
    let mut q_positive = true;
    for i in 0..grid.levels {
        let p = (i as f64 + 0.5) / grid.levels as f64;
        let err = (reg.phi(reg.phi_inv(p)) - p).abs();
        inverse_max_error = inverse_max_error.max(if err.is_finite() { err } else { f64::INFINITY });
        let q = reg.q(p);
        if q <= 0.0 || !q.is_finite() {
            q_positive = false;
        }
    }
    let endpoints_vanish = reg.q(0.0) == 0.0
        && reg.q(1.0) == 0.0
        && reg.q(1e-9) < 1e-6
        && reg.q(1.0 - 1e-9) < 1e-6;
    let passed = monotone && limits && inverse_max_error < 1e-12 && endpoints_vanish && q_positive;
    RegularizerReport {
        name: reg.name.clone(),
        monotone,
        worst_monotonicity: worst,
        limits,
        limit_gap,
        inverse_max_error,
        endpoints_vanish,
        q_positive,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tanh_values() {
        let r = make_tanh_regularizer();
        assert_eq!(r.q(0.5), 0.5);
        assert_eq!(r.q(0.0), 0.0);
        assert_eq!(r.q(1.0), 0.0);
        assert_eq!(r.phi_inv(0.5), 0.0);
    }

    #[test]
    fn arctan_values() {
        let r = make_arctan_regularizer();
        assert!((r.q(0.5) - 1.0 / PI).abs() < 1e-16);
        assert!((r.q(0.25) - 0.5 / PI).abs() < 1e-16);
        assert_eq!(r.q(0.0), 0.0);
    }

    #[test]
    fn builtins_pass_verification() {
        for r in [make_tanh_regularizer(), make_arctan_regularizer()] {
            let rep = verify_regularizer(&r, GridSpec::default());
            assert!(rep.passed, "{rep:?}");
        }
    }

    #[test]
    fn non_monotone_wrapper_fails() {
        let r = Regularizer::custom("cubic", |u| u * u * u - u, |u| 3.0 * u * u - 1.0);
        let rep = verify_regularizer(&r, GridSpec::default());
        assert!(!rep.monotone);
        assert!(rep.worst_monotonicity < 0.0);
        assert!(!rep.passed);
    }

    #[test]
    fn custom_inverse_matches_closed_form() {
        let c = Regularizer::custom("logistic", |u| 1.0 / (1.0 + (-u).exp()), |u| {
            let e = (-u).exp();
            e / ((1.0 + e) * (1.0 + e))
        });
        let rep = verify_regularizer(&c, GridSpec { levels: 200, ..GridSpec::default() });
        assert!(rep.passed, "{rep:?}");
        for i in 1..50 {
            let p = i as f64 / 50.0;
            assert!((c.q(p) - p * (1.0 - p)).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn composite_matches_closed_form(p in 1e-6f64..(1.0 - 1e-6)) {
            for r in [make_tanh_regularizer(), make_arctan_regularizer()] {
                prop_assert!((r.q_composite(p) - r.q(p)).abs() < 1e-12);
            }
        }
    }
}
