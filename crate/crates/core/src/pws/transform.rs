//! Smooth coordinate changes `z = T(w)` and pulled-back systems.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{finite_difference, Partial, Poly2, ScalarField, SmoothMap2, VectorField};

use super::{Domain, PwsSystem};

/// An invertible smooth map of the plane with its Jacobian.
pub trait Diffeomorphism: Send + Sync {
    fn forward(&self, w: [f64; 2]) -> [f64; 2];

    /// `DT(w)` as rows `[[∂T₁/∂w₁, ∂T₁/∂w₂], [∂T₂/∂w₁, ∂T₂/∂w₂]]`.
    fn jacobian(&self, w: [f64; 2]) -> [[f64; 2]; 2];

    /// `T⁻¹(z)`, by Newton's method from `z` unless overridden.
    fn inverse(&self, z: [f64; 2]) -> Result<[f64; 2]> {
        newton_inverse(self, z)
    }
}

fn det2(m: [[f64; 2]; 2]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Solves `m · x = b` for a 2×2 system.
fn solve2(m: [[f64; 2]; 2], b: [f64; 2]) -> Option<[f64; 2]> {
    let d = det2(m);
    let scale = m.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    if d.abs() <= 1e-14 * scale * scale || !d.is_finite() {
        return None;
    }
    Some([
        (b[0] * m[1][1] - b[1] * m[0][1]) / d,
        (m[0][0] * b[1] - m[1][0] * b[0]) / d,
    ])
}

fn newton_inverse<T: Diffeomorphism + ?Sized>(t: &T, z: [f64; 2]) -> Result<[f64; 2]> {
    let mut w = z;
    for _ in 0..60 {
        let f = t.forward(w);
        let r = [f[0] - z[0], f[1] - z[1]];
        let step = solve2(t.jacobian(w), r).ok_or(Error::SingularJacobian { x: w[0], y: w[1] })?;
        w = [w[0] - step[0], w[1] - step[1]];
        if step[0].abs().max(step[1].abs()) <= 1e-15 * (1.0 + w[0].abs().max(w[1].abs())) {
            return Ok(w);
        }
    }
    let f = t.forward(w);
    let res = (f[0] - z[0]).hypot(f[1] - z[1]);
    if res < 1e-13 * (1.0 + z[0].abs().max(z[1].abs())) {
        Ok(w)
    } else {
        Err(Error::NotConverged {
            what: "inverse coordinate change",
            estimate: res,
            tolerance: 1e-13,
        })
    }
}

/// The identity map.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityMap;

impl Diffeomorphism for IdentityMap {
    fn forward(&self, w: [f64; 2]) -> [f64; 2] {
        w
    }
    fn jacobian(&self, _w: [f64; 2]) -> [[f64; 2]; 2] {
        [[1.0, 0.0], [0.0, 1.0]]
    }
    fn inverse(&self, z: [f64; 2]) -> Result<[f64; 2]> {
        Ok(z)
    }
}

/// Polynomial coordinate change `T(w) = (t₁(w), t₂(w))`.
#[derive(Debug, Clone)]
pub struct PolyDiffeo {
    pub t1: Poly2,
    pub t2: Poly2,
}

impl PolyDiffeo {
    pub fn new(t1: Poly2, t2: Poly2) -> Self {
        PolyDiffeo { t1, t2 }
    }
}

impl Diffeomorphism for PolyDiffeo {
    fn forward(&self, w: [f64; 2]) -> [f64; 2] {
        [self.t1.value(w[0], w[1], 0.0), self.t2.value(w[0], w[1], 0.0)]
    }
    fn jacobian(&self, w: [f64; 2]) -> [[f64; 2]; 2] {
        let d = |p: &Poly2, q: Partial| p.partial(q, w[0], w[1], 0.0);
        [
            [d(&self.t1, Partial::X), d(&self.t1, Partial::Y)],
            [d(&self.t2, Partial::X), d(&self.t2, Partial::Y)],
        ]
    }
}

/// Component `i` of `DT(w)⁻¹ Z(T(w))`.
struct PulledComponent {
    t: Arc<dyn Diffeomorphism>,
    field: VectorField,
    index: usize,
}

impl ScalarField for PulledComponent {
    fn value(&self, x: f64, y: f64, lambda: f64) -> f64 {
        let z = self.t.forward([x, y]);
        let v = self.field.eval(z, lambda);
        match solve2(self.t.jacobian([x, y]), v) {
            Some(w) => w[self.index],
            None => f64::NAN,
        }
    }

    fn describe(&self) -> String {
        format!("pulled-back component {}", self.index)
    }
}

/// `h ∘ T` with the exact chain-rule gradient.
struct PulledScalar {
    t: Arc<dyn Diffeomorphism>,
    h: SmoothMap2,
}

impl PulledScalar {
    fn first(&self, axis: usize, x: f64, y: f64, lambda: f64) -> f64 {
        let z = self.t.forward([x, y]);
        let g = self.h.gradient(z[0], z[1], lambda);
        let j = self.t.jacobian([x, y]);
        g[0] * j[0][axis] + g[1] * j[1][axis]
    }
}

impl ScalarField for PulledScalar {
    fn value(&self, x: f64, y: f64, lambda: f64) -> f64 {
        let z = self.t.forward([x, y]);
        self.h.value(z[0], z[1], lambda)
    }

    fn partial(&self, d: Partial, x: f64, y: f64, lambda: f64) -> f64 {
        if d.dl > 0 {
            return finite_difference(&|a, b, c| self.value(a, b, c), d, x, y, lambda);
        }
        let axis = if d.dx > 0 { 0 } else { 1 };
        let rest = if axis == 0 {
            Partial::new(d.dx - 1, d.dy, 0)
        } else {
            Partial::new(d.dx, d.dy - 1, 0)
        };
        if rest == Partial::VALUE {
            return self.first(axis, x, y, lambda);
        }
        finite_difference(&|a, b, c| self.first(axis, a, b, c), rest, x, y, lambda)
    }

    fn describe(&self) -> String {
        format!("({}) ∘ T", self.h.describe())
    }
}

fn pull_field(t: &Arc<dyn Diffeomorphism>, f: &VectorField) -> VectorField {
    let comp = |index| {
        SmoothMap2::from_field(PulledComponent {
            t: t.clone(),
            field: f.clone(),
            index,
        })
    };
    VectorField {
        x: comp(0),
        y: comp(1),
    }
}

/// Expresses the system in coordinates `w` with `z = T(w)`.
///
/// The new fields are `DT⁻¹ · (Z± ∘ T)` and the switching function is
/// `h ∘ T`. The new domain is the bounding box of the preimage of the old
/// domain's edges, and `DT` must be nonsingular (with constant orientation)
/// there.
pub fn pullback_system(system: &PwsSystem, t: Arc<dyn Diffeomorphism>) -> Result<PwsSystem> {
    let d = system.domain;
    let n = 100;
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for i in 0..=n {
        let u = i as f64 / n as f64;
        let xs = d.x[0] + u * (d.x[1] - d.x[0]);
        let ys = d.y[0] + u * (d.y[1] - d.y[0]);
        for z in [[xs, d.y[0]], [xs, d.y[1]], [d.x[0], ys], [d.x[1], ys]] {
            let w = t.inverse(z)?;
            for k in 0..2 {
                lo[k] = lo[k].min(w[k]);
                hi[k] = hi[k].max(w[k]);
            }
        }
    }
    let domain = Domain::new([lo[0], hi[0]], [lo[1], hi[1]])?;
    let mut orientation = 0.0;
    for w in domain.grid(41) {
        let j = t.jacobian(w);
        let det = det2(j);
        let scale = j.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        if det.abs() <= 1e-12 * (scale * scale).max(1e-300) || det * orientation < 0.0 {
            return Err(Error::SingularJacobian { x: w[0], y: w[1] });
        }
        orientation = det;
    }
    let h = SmoothMap2::from_field(PulledScalar {
        t: t.clone(),
        h: system.h.clone(),
    });
    PwsSystem::new(
        pull_field(&t, &system.z_plus),
        pull_field(&t, &system.z_minus),
        h,
        domain,
        system.lambda,
    )
}
