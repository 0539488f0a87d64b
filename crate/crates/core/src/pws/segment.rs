use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

use super::{classify_boundary_point, filippov_unchecked, BoundaryTag, Diffeomorphism, PwsSystem};

/// How a sliding segment ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum EndpointKind {
    Regular,
    TwoFold,
    OneSidedTangency,
}

/// `v ↦ (p(v), p'(v))`.
pub type SegmentCurve = Arc<dyn Fn(f64) -> ([f64; 2], [f64; 2]) + Send + Sync>;

/// A parameterized arc `p: [v1, v2] → Σ` inside the sliding set.
#[derive(Clone)]
pub struct SlidingSegment {
    curve: SegmentCurve,
    pub v1: f64,
    pub v2: f64,
    pub start: EndpointKind,
    pub end: EndpointKind,
    /// Smallest sliding speed accepted before reporting a pseudo-equilibrium.
    pub min_speed: f64,
}

impl std::fmt::Debug for SlidingSegment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SlidingSegment")
            .field("v1", &self.v1)
            .field("v2", &self.v2)
            .field("start", &self.start)
            .field("end", &self.end)
            .finish()
    }
}

impl SlidingSegment {
    /// The interval `[a, b]` of the line `y = 0`, parameterized by `x`.
    pub fn on_axis(a: f64, b: f64) -> Self {
        Self::from_curve(Arc::new(|v| ([v, 0.0], [1.0, 0.0])), a, b)
    }

    pub fn from_curve(curve: SegmentCurve, v1: f64, v2: f64) -> Self {
        SlidingSegment {
            curve,
            v1,
            v2,
            start: EndpointKind::Regular,
            end: EndpointKind::Regular,
            min_speed: 1e-8,
        }
    }

    pub fn with_endpoints(mut self, start: EndpointKind, end: EndpointKind) -> Self {
        self.start = start;
        self.end = end;
        self
    }

    pub fn point(&self, v: f64) -> [f64; 2] {
        (self.curve)(v).0
    }

    pub fn eval(&self, v: f64) -> ([f64; 2], [f64; 2]) {
        (self.curve)(v)
    }

    /// The same arc in coordinates `w` with `z = T(w)`: `v ↦ T⁻¹(p(v))`.
    pub fn mapped(&self, t: Arc<dyn Diffeomorphism>) -> Self {
        let base = self.curve.clone();
        let curve: SegmentCurve = Arc::new(move |v| {
            let (p, dp) = base(v);
            match t.inverse(p) {
                Ok(w) => {
                    let j = t.jacobian(w);
                    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
                    let dw = [
                        (dp[0] * j[1][1] - dp[1] * j[0][1]) / det,
                        (j[0][0] * dp[1] - j[1][0] * dp[0]) / det,
                    ];
                    (w, dw)
                }
                Err(_) => ([f64::NAN; 2], [f64::NAN; 2]),
            }
        });
        SlidingSegment { curve, ..self.clone() }
    }

    /// Substitutes `v = r(u)` for an increasing `r: [u1, u2] → [v1, v2]`
    /// given as `u ↦ (r(u), r'(u))`.
    pub fn reparameterized<R>(&self, r: R, u1: f64, u2: f64) -> Self
    where
        R: Fn(f64) -> (f64, f64) + Send + Sync + 'static,
    {
        let base = self.curve.clone();
        let curve: SegmentCurve = Arc::new(move |u| {
            let (v, dv) = r(u);
            let (p, dp) = base(v);
            (p, [dp[0] * dv, dp[1] * dv])
        });
        SlidingSegment {
            curve,
            v1: u1,
            v2: u2,
            ..self.clone()
        }
    }

    /// Checks that interior samples share one sliding class and that the
    /// sliding field does not vanish. Returns the class.
    pub fn validate(&self, system: &PwsSystem) -> Result<BoundaryTag> {
        if !(self.v1 < self.v2) {
            return Err(Error::InvalidInput(format!(
                "segment parameters [{}, {}] are not increasing",
                self.v1, self.v2
            )));
        }
        let n = 64;
        let mut tag = None;
        let mut speed_sign = 0.0;
        for i in 1..n {
            let v = self.v1 + (self.v2 - self.v1) * i as f64 / n as f64;
            let (p, dp) = self.eval(v);
            let class = classify_boundary_point(system, p)?;
            match class.tag {
                BoundaryTag::StableSliding | BoundaryTag::UnstableSliding => {}
                BoundaryTag::Crossing => return Err(Error::CrossingPoint { x: p[0], y: p[1] }),
                BoundaryTag::Tangency => {
                    return Err(Error::Precondition(format!(
                        "tangency inside the segment at ({}, {})",
                        p[0], p[1]
                    )))
                }
            }
            if *tag.get_or_insert(class.tag) != class.tag {
                return Err(Error::Precondition("sliding class changes along the segment".into()));
            }
            let s = filippov_unchecked(system, p)?;
            let speed = (s[0] * dp[0] + s[1] * dp[1]) / (dp[0] * dp[0] + dp[1] * dp[1]).sqrt();
            if speed.abs() < self.min_speed || speed * speed_sign < 0.0 {
                return Err(Error::PseudoEquilibrium { at: v });
            }
            speed_sign = speed;
        }
        Ok(tag.expect("at least one interior sample"))
    }
}
