//! Planar piecewise-smooth systems `ż = Z±(z)` on either side of `Σ = {h = 0}`.
//!
//! Points of `Σ` are classified by the signs of the Lie derivatives `Z±(h)`:
//! stable sliding when `Z⁺(h) < 0 < Z⁻(h)`, unstable sliding for the reverse
//! signs, crossing when both signs agree and tangency when either vanishes.
//! On the sliding set the Filippov field `τZ⁺ + (1 - τ)Z⁻` with
//! `τ = -Z⁻(h) / (Z⁺ - Z⁻)(h)` is tangent to `Σ`.

mod segment;
mod transform;

pub use segment::{EndpointKind, SegmentCurve, SlidingSegment};
pub use transform::{pullback_system, Diffeomorphism, IdentityMap, PolyDiffeo};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Partial, SmoothMap2, VectorField};
use crate::roots;

/// Default threshold for treating a Lie derivative as zero (relative to the
/// local field scale).
pub const TANGENCY_TOL: f64 = 1e-10;

/// Distance from `Σ` accepted for boundary queries.
pub const BOUNDARY_TOL: f64 = 1e-10;

/// Closed rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct Domain {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl Domain {
    pub fn new(x: [f64; 2], y: [f64; 2]) -> Result<Self> {
        if !(x[0] < x[1] && y[0] < y[1]) || !x.iter().chain(&y).all(|v| v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "domain [{}, {}] x [{}, {}] is empty or not finite",
                x[0], x[1], y[0], y[1]
            )));
        }
        Ok(Domain { x, y })
    }

    pub fn square(r: f64) -> Self {
        Domain {
            x: [-r, r],
            y: [-r, r],
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let sx = 1e-12 * (1.0 + self.x[1] - self.x[0]);
        let sy = 1e-12 * (1.0 + self.y[1] - self.y[0]);
        p[0] >= self.x[0] - sx && p[0] <= self.x[1] + sx && p[1] >= self.y[0] - sy && p[1] <= self.y[1] + sy
    }

    /// `n × n` tensor grid including the edges.
    pub fn grid(&self, n: usize) -> Vec<[f64; 2]> {
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let u = i as f64 / (n - 1) as f64;
                let v = j as f64 / (n - 1) as f64;
                out.push([
                    self.x[0] + u * (self.x[1] - self.x[0]),
                    self.y[0] + v * (self.y[1] - self.y[0]),
                ]);
            }
        }
        out
    }
}

/// Which of the two vector fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

/// A λ-family of PWS systems evaluated at a fixed λ.
#[derive(Debug, Clone)]
pub struct PwsSystem {
    pub z_plus: VectorField,
    pub z_minus: VectorField,
    pub h: SmoothMap2,
    pub domain: Domain,
    pub lambda: f64,
}

/// Sign class of a point on `Σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundaryTag {
    Crossing,
    StableSliding,
    UnstableSliding,
    Tangency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TangencySide {
    Plus,
    Minus,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Visibility {
    Visible,
    Invisible,
    Degenerate,
}

/// Which fields are tangent and how their tangent orbits sit relative to `Σ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TangencyDetail {
    pub side: TangencySide,
    pub plus: Option<Visibility>,
    pub minus: Option<Visibility>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundaryClass {
    pub tag: BoundaryTag,
    pub tangency: Option<TangencyDetail>,
}

impl BoundaryClass {
    pub fn is_sliding(&self) -> bool {
        matches!(self.tag, BoundaryTag::StableSliding | BoundaryTag::UnstableSliding)
    }
}

/// Two-fold types. Only the sliding cases are resolved; other generic
/// configurations are lumped together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TwoFoldType {
    VV1,
    II1,
    VI2,
    VI3,
    OtherGeneric,
    NonGenericSliding,
    Degenerate,
}

impl PwsSystem {
    /// Builds a system and checks that `∇h` does not vanish on `Σ`.
    pub fn new(
        z_plus: VectorField,
        z_minus: VectorField,
        h: SmoothMap2,
        domain: Domain,
        lambda: f64,
    ) -> Result<Self> {
        let sys = PwsSystem {
            z_plus,
            z_minus,
            h,
            domain,
            lambda,
        };
        sys.check_boundary_gradient()?;
        Ok(sys)
    }

    /// Same system at another parameter value.
    pub fn with_lambda(&self, lambda: f64) -> Self {
        PwsSystem {
            lambda,
            ..self.clone()
        }
    }

    pub fn field(&self, side: Side) -> &VectorField {
        match side {
            Side::Plus => &self.z_plus,
            Side::Minus => &self.z_minus,
        }
    }

    /// Samples `Σ` along grid lines and checks `|∇h| > 1e-12` there.
    fn check_boundary_gradient(&self) -> Result<()> {
        let n = 33;
        let m = 65;
        let d = self.domain;
        for i in 0..n {
            for axis in 0..2 {
                let t = i as f64 / (n - 1) as f64;
                let (fixed, range) = if axis == 0 {
                    (d.x[0] + t * (d.x[1] - d.x[0]), d.y)
                } else {
                    (d.y[0] + t * (d.y[1] - d.y[0]), d.x)
                };
                let point = |s: f64| if axis == 0 { [fixed, s] } else { [s, fixed] };
                let hv = |s: f64| {
                    let p = point(s);
                    self.h.value(p[0], p[1], self.lambda)
                };
                let ss: Vec<f64> = (0..m)
                    .map(|j| range[0] + (range[1] - range[0]) * j as f64 / (m - 1) as f64)
                    .collect();
                let vs: Vec<f64> = ss.iter().map(|&s| hv(s)).collect();
                let mut candidates: Vec<f64> = ss
                    .iter()
                    .zip(&vs)
                    .filter(|(_, v)| **v == 0.0)
                    .map(|(s, _)| *s)
                    .collect();
                for k in roots::sign_changes(&vs) {
                    if let Ok(r) = roots::brent_with_values(hv, ss[k], ss[k + 1], vs[k], vs[k + 1], 1e-13) {
                        candidates.push(r);
                    }
                }
                for s in candidates {
                    let p = point(s);
                    let g = self.h.gradient(p[0], p[1], self.lambda);
                    if g[0].hypot(g[1]) <= 1e-12 {
                        return Err(Error::DegenerateBoundary { x: p[0], y: p[1] });
                    }
                }
            }
        }
        Ok(())
    }

    fn require_in_domain(&self, z: [f64; 2]) -> Result<()> {
        if !self.domain.contains(z) || !z[0].is_finite() || !z[1].is_finite() {
            return Err(Error::OutsideDomain { x: z[0], y: z[1] });
        }
        Ok(())
    }

    fn require_on_boundary(&self, z: [f64; 2]) -> Result<()> {
        self.require_in_domain(z)?;
        let r = self.h.value(z[0], z[1], self.lambda);
        if r.abs() > BOUNDARY_TOL {
            return Err(Error::NotOnBoundary {
                x: z[0],
                y: z[1],
                residual: r.abs(),
            });
        }
        Ok(())
    }

    /// `Z^side(h)` without domain checks.
    pub(crate) fn lie1(&self, side: Side, z: [f64; 2]) -> f64 {
        let f = self.field(side);
        let l = self.lambda;
        let g = self.h.gradient(z[0], z[1], l);
        f.x.value(z[0], z[1], l) * g[0] + f.y.value(z[0], z[1], l) * g[1]
    }

    /// Gradient of `Z^side(h)`.
    pub(crate) fn lie1_gradient(&self, side: Side, z: [f64; 2]) -> [f64; 2] {
        let f = self.field(side);
        let (x, y, l) = (z[0], z[1], self.lambda);
        let hx = self.h.partial(Partial::X, x, y, l);
        let hy = self.h.partial(Partial::Y, x, y, l);
        let xv = f.x.value(x, y, l);
        let yv = f.y.value(x, y, l);
        let mut out = [0.0; 2];
        for (axis, o) in out.iter_mut().enumerate() {
            let d = Partial::VALUE.bump(axis);
            *o = f.x.partial(d, x, y, l) * hx
                + xv * self.h.partial(Partial::X.bump(axis), x, y, l)
                + f.y.partial(d, x, y, l) * hy
                + yv * self.h.partial(Partial::Y.bump(axis), x, y, l);
        }
        out
    }

    /// `Z^side(Z^side(h))` without domain checks.
    pub(crate) fn lie2(&self, side: Side, z: [f64; 2]) -> f64 {
        let f = self.field(side);
        let g = self.lie1_gradient(side, z);
        f.x.value(z[0], z[1], self.lambda) * g[0] + f.y.value(z[0], z[1], self.lambda) * g[1]
    }

    /// `|Z^side| · |∇h|`, the scale used by the tangency threshold.
    fn lie_scale(&self, side: Side, z: [f64; 2]) -> f64 {
        let v = self.field(side).eval(z, self.lambda);
        let g = self.h.gradient(z[0], z[1], self.lambda);
        v[0].hypot(v[1]) * g[0].hypot(g[1])
    }

    pub(crate) fn is_tangent(&self, side: Side, z: [f64; 2], tol: f64) -> bool {
        self.lie1(side, z).abs() < tol * (1.0 + self.lie_scale(side, z))
    }

    /// True when `h` is exactly the polynomial `y`.
    pub fn is_normal_form(&self) -> bool {
        self.h.as_poly().map(|p| p.is_identity_y()).unwrap_or(false)
    }

    pub(crate) fn require_normal_form(&self) -> Result<()> {
        if self.is_normal_form() {
            Ok(())
        } else {
            Err(Error::NotNormalForm)
        }
    }

    /// `k`-th derivative in `x` of `det Z = X⁺Y⁻ - X⁻Y⁺` along `y = 0`.
    pub fn det_z_derivative(&self, x: f64, k: u8) -> f64 {
        let l = self.lambda;
        let d = |f: &SmoothMap2, j: u8| f.partial(Partial::new(j, 0, 0), x, 0.0, l);
        let mut acc = 0.0;
        let mut binom = 1.0;
        for j in 0..=k {
            acc += binom
                * (d(&self.z_plus.x, j) * d(&self.z_minus.y, k - j)
                    - d(&self.z_minus.x, j) * d(&self.z_plus.y, k - j));
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
        acc
    }
}

/// First or second Lie derivative of `h` along `Z^side` at `z`.
pub fn lie_derivative(system: &PwsSystem, side: Side, z: [f64; 2], order: u8) -> Result<f64> {
    system.require_in_domain(z)?;
    match order {
        1 => Ok(system.lie1(side, z)),
        2 => Ok(system.lie2(side, z)),
        _ => Err(Error::InvalidInput(format!("Lie derivative order {order} not supported"))),
    }
}

fn visibility(side: Side, second: f64, tol: f64) -> Visibility {
    if second.abs() < tol {
        return Visibility::Degenerate;
    }
    let visible = match side {
        Side::Plus => second > 0.0,
        Side::Minus => second < 0.0,
    };
    if visible {
        Visibility::Visible
    } else {
        Visibility::Invisible
    }
}

/// Classifies a point of `Σ` with the default tangency threshold.
pub fn classify_boundary_point(system: &PwsSystem, z: [f64; 2]) -> Result<BoundaryClass> {
    classify_boundary_point_with(system, z, TANGENCY_TOL)
}

/// Classifies a point of `Σ` treating `|Z±(h)| < tol·(1 + |Z±||∇h|)` as zero.
pub fn classify_boundary_point_with(system: &PwsSystem, z: [f64; 2], tol: f64) -> Result<BoundaryClass> {
    system.require_on_boundary(z)?;
    let tp = system.is_tangent(Side::Plus, z, tol);
    let tm = system.is_tangent(Side::Minus, z, tol);
    if tp || tm {
        let side = match (tp, tm) {
            (true, true) => TangencySide::Both,
            (true, false) => TangencySide::Plus,
            _ => TangencySide::Minus,
        };
        let plus = tp.then(|| visibility(Side::Plus, system.lie2(Side::Plus, z), tol));
        let minus = tm.then(|| visibility(Side::Minus, system.lie2(Side::Minus, z), tol));
        return Ok(BoundaryClass {
            tag: BoundaryTag::Tangency,
            tangency: Some(TangencyDetail { side, plus, minus }),
        });
    }
    let lp = system.lie1(Side::Plus, z);
    let lm = system.lie1(Side::Minus, z);
    let tag = if lp * lm > 0.0 {
        BoundaryTag::Crossing
    } else if lp < 0.0 {
        BoundaryTag::StableSliding
    } else {
        BoundaryTag::UnstableSliding
    };
    Ok(BoundaryClass { tag, tangency: None })
}

/// Resolves the two-fold type at a point where both fields are tangent.
///
/// Requires `h = y`. Visible-invisible sliding two-folds are split by the
/// direction of the sliding flow through the fold: the type is `VI3` when
/// the flow runs from the stable part of the sliding set to the unstable one.
pub fn classify_two_fold(system: &PwsSystem, z: [f64; 2]) -> Result<TwoFoldType> {
    system.require_normal_form()?;
    let class = classify_boundary_point(system, z)?;
    let detail = match class.tangency {
        Some(d) if d.side == TangencySide::Both => d,
        _ => {
            return Err(Error::Precondition(format!(
                "({}, {}) is not tangent for both fields",
                z[0], z[1]
            )))
        }
    };
    let (vp, vm) = (detail.plus.unwrap(), detail.minus.unwrap());
    if vp == Visibility::Degenerate || vm == Visibility::Degenerate {
        return Err(Error::Precondition("a second Lie derivative vanishes".into()));
    }
    let l = system.lambda;
    let dyp = system.z_plus.y.partial(Partial::X, z[0], 0.0, l);
    let dym = system.z_minus.y.partial(Partial::X, z[0], 0.0, l);
    if dyp * dym >= 0.0 {
        return Ok(TwoFoldType::OtherGeneric);
    }
    let scale = 1.0 + dyp.abs() + dym.abs();
    let d1 = system.det_z_derivative(z[0], 1);
    if d1.abs() < TANGENCY_TOL * scale {
        let d2 = system.det_z_derivative(z[0], 2);
        return Ok(if d2.abs() < TANGENCY_TOL * scale {
            TwoFoldType::Degenerate
        } else {
            TwoFoldType::NonGenericSliding
        });
    }
    Ok(match (vp, vm) {
        (Visibility::Visible, Visibility::Visible) => TwoFoldType::VV1,
        (Visibility::Invisible, Visibility::Invisible) => TwoFoldType::II1,
        _ => {
            let nu = d1 / (dym - dyp);
            if nu.signum() == dyp.signum() {
                TwoFoldType::VI3
            } else {
                TwoFoldType::VI2
            }
        }
    })
}

/// Convex weight `τ` of the Filippov combination on the closure of the
/// sliding set, using the tangential limit at two-folds.
pub fn tau(system: &PwsSystem, z: [f64; 2]) -> Result<f64> {
    system.require_on_boundary(z)?;
    tau_unchecked(system, z)
}

pub(crate) fn tau_unchecked(system: &PwsSystem, z: [f64; 2]) -> Result<f64> {
    let tp = system.is_tangent(Side::Plus, z, TANGENCY_TOL);
    let tm = system.is_tangent(Side::Minus, z, TANGENCY_TOL);
    let lp = system.lie1(Side::Plus, z);
    let lm = system.lie1(Side::Minus, z);
    if tp && tm {
        let g = system.h.gradient(z[0], z[1], system.lambda);
        let t = [-g[1], g[0]];
        let gp = system.lie1_gradient(Side::Plus, z);
        let gm = system.lie1_gradient(Side::Minus, z);
        let dp = gp[0] * t[0] + gp[1] * t[1];
        let dm = gm[0] * t[0] + gm[1] * t[1];
        let den = dm - dp;
        if den.abs() < TANGENCY_TOL * (1.0 + dp.abs() + dm.abs()) {
            return Err(Error::DenominatorVanishes { x: z[0], y: z[1] });
        }
        return Ok(dm / den);
    }
    if lp * lm > 0.0 && !tp && !tm {
        return Err(Error::CrossingPoint { x: z[0], y: z[1] });
    }
    let den = lp - lm;
    if den == 0.0 {
        return Err(Error::DenominatorVanishes { x: z[0], y: z[1] });
    }
    Ok((-lm / den).clamp(0.0, 1.0))
}

/// Filippov sliding vector `τZ⁺ + (1 - τ)Z⁻` at `z`.
pub fn filippov_sliding_vf(system: &PwsSystem, z: [f64; 2]) -> Result<[f64; 2]> {
    system.require_on_boundary(z)?;
    filippov_unchecked(system, z)
}

pub(crate) fn filippov_unchecked(system: &PwsSystem, z: [f64; 2]) -> Result<[f64; 2]> {
    let t = tau_unchecked(system, z)?;
    let p = system.z_plus.eval(z, system.lambda);
    let m = system.z_minus.eval(z, system.lambda);
    Ok([t * p[0] + (1.0 - t) * m[0], t * p[1] + (1.0 - t) * m[1]])
}

/// `det Z(x) = (X⁺Y⁻ - X⁻Y⁺)(x, 0)` for systems with `h = y`.
pub fn det_z(system: &PwsSystem, x: f64) -> Result<f64> {
    system.require_normal_form()?;
    Ok(system.det_z_derivative(x, 0))
}

/// Zeros of the sliding field on the boundary interval `[a, b]` of a system
/// with `h = y`.
pub fn pseudo_equilibria(system: &PwsSystem, a: f64, b: f64) -> Result<Vec<f64>> {
    system.require_normal_form()?;
    if !(a < b) {
        return Err(Error::InvalidInput(format!("interval [{a}, {b}] is empty")));
    }
    system.require_in_domain([a, 0.0])?;
    system.require_in_domain([b, 0.0])?;
    let n = 400;
    for i in 0..=n {
        let x = a + (b - a) * i as f64 / n as f64;
        let c = classify_boundary_point(system, [x, 0.0])?;
        if c.tag == BoundaryTag::Crossing {
            return Err(Error::Precondition(format!(
                "interval [{a}, {b}] meets the crossing set at x = {x}"
            )));
        }
    }
    let f = |x: f64| filippov_unchecked(system, [x, 0.0]).map(|v| v[0]).unwrap_or(f64::NAN);
    roots::all_roots(f, a, b, n, 1e-12)
}

/// Multiplies both fields by a strictly positive function.
pub fn scale_system(system: &PwsSystem, g: &SmoothMap2) -> Result<PwsSystem> {
    for p in system.domain.grid(41) {
        let v = g.value(p[0], p[1], system.lambda);
        if !(v > 0.0) {
            return Err(Error::NonPositiveMultiplier {
                x: p[0],
                y: p[1],
                value: v,
            });
        }
    }
    Ok(PwsSystem {
        z_plus: system.z_plus.scaled(g),
        z_minus: system.z_minus.scaled(g),
        ..system.clone()
    })
}

/// The system with both fields negated.
pub fn time_reversed(system: &PwsSystem) -> PwsSystem {
    PwsSystem {
        z_plus: system.z_plus.negated(),
        z_minus: system.z_minus.negated(),
        ..system.clone()
    }
}
