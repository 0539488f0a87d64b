//! Slow divergence integrals along sliding segments.
//!
//! Along a sliding segment `p: [v1, v2] → Σ` the regularized system carries a
//! normally hyperbolic critical curve. Its layer divergence is
//! `E(z) = (Z⁺ - Z⁻)(h)(z) · q(τ(z))` and the slow divergence integral is
//! `∫ E(p(v)) / |p̃(v)| dv`, where the Filippov field satisfies
//! `Z^sl(p(v)) = p̃(v) p'(v)`.
//!
//! For `h = y` the integrand in the boundary coordinate is
//! `Φ(x) = |Y⁻ - Y⁺| (Y⁺ - Y⁻) q(τ) / |det Z|`. It stays bounded at a two-fold
//! where `det Z` vanishes to order one or two, and tends to zero at a
//! one-sided tangency where `τ` reaches 0 or 1.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Partial, SmoothMap2};
use crate::pws::{
    self, classify_boundary_point, filippov_unchecked, pullback_system, scale_system, tau_unchecked, BoundaryTag,
    Diffeomorphism, PwsSystem, Side, SlidingSegment,
};
use crate::quadrature::{self, neville_at_zero, QuadOptions};
use crate::regularization::Regularizer;

/// Default absolute tolerance of every integral.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Value of a slow divergence integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SdiResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub converged: bool,
    pub subdivisions: usize,
}

impl SdiResult {
    fn zero() -> Self {
        SdiResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            converged: true,
            subdivisions: 0,
        }
    }

    fn combine(self, other: SdiResult) -> Self {
        SdiResult {
            value: self.value + other.value,
            abs_error_estimate: self.abs_error_estimate + other.abs_error_estimate,
            converged: self.converged && other.converged,
            subdivisions: self.subdivisions + other.subdivisions,
        }
    }
}

fn quad_opts(tol: f64) -> QuadOptions {
    QuadOptions {
        abs_tol: tol,
        ..QuadOptions::default()
    }
}

/// Layer divergence `(Z⁺ - Z⁻)(h) q(τ)` at a point of the sliding set.
pub fn e_weight(system: &PwsSystem, reg: &Regularizer, z: [f64; 2]) -> Result<f64> {
    let class = classify_boundary_point(system, z)?;
    if class.tag == BoundaryTag::Crossing {
        return Err(Error::CrossingPoint { x: z[0], y: z[1] });
    }
    Ok(e_weight_unchecked(system, reg, z))
}

fn e_weight_unchecked(system: &PwsSystem, reg: &Regularizer, z: [f64; 2]) -> f64 {
    let d = system.lie1(Side::Plus, z) - system.lie1(Side::Minus, z);
    match tau_unchecked(system, z) {
        Ok(t) => d * reg.q(t),
        Err(_) => f64::NAN,
    }
}

/// `E(p(v)) / |p̃(v)|` for a parameterized segment.
pub fn segment_integrand(system: &PwsSystem, reg: &Regularizer, seg: &SlidingSegment, v: f64) -> f64 {
    let (p, dp) = seg.eval(v);
    let s = match filippov_unchecked(system, p) {
        Ok(s) => s,
        Err(_) => return f64::NAN,
    };
    let speed = (s[0] * dp[0] + s[1] * dp[1]) / (dp[0] * dp[0] + dp[1] * dp[1]);
    e_weight_unchecked(system, reg, p) / speed.abs()
}

/// Slow divergence integral along a regular sliding segment.
pub fn sdi_regular_segment(
    system: &PwsSystem,
    reg: &Regularizer,
    seg: &SlidingSegment,
    tol: f64,
) -> Result<SdiResult> {
    seg.validate(system)?;
    let r = quadrature::integrate(|v| segment_integrand(system, reg, seg, v), seg.v1, seg.v2, quad_opts(tol));
    Ok(SdiResult {
        value: r.value,
        abs_error_estimate: r.abs_error,
        converged: r.converged,
        subdivisions: r.subdivisions,
    })
}

/// Boundary-coordinate integrand `Φ(x)` for systems with `h = y`.
pub fn phi_integrand(system: &PwsSystem, reg: &Regularizer, x: f64) -> f64 {
    let l = system.lambda;
    let yp = system.z_plus.y.value(x, 0.0, l);
    let ym = system.z_minus.y.value(x, 0.0, l);
    let det = system.z_plus.x.value(x, 0.0, l) * ym - system.z_minus.x.value(x, 0.0, l) * yp;
    let diff = yp - ym;
    let tau = -ym / diff;
    diff.abs() * diff * reg.q(tau) / det.abs()
}

/// Vanishing order of `det Z` at the origin, or a divergence error when it
/// exceeds two.
fn det_multiplicity(system: &PwsSystem) -> Result<u8> {
    let l = system.lambda;
    let scale = 1.0
        + system.z_plus.y.partial(Partial::X, 0.0, 0.0, l).abs()
        + system.z_minus.y.partial(Partial::X, 0.0, 0.0, l).abs();
    let thr = 1e-9 * scale;
    if system.det_z_derivative(0.0, 1).abs() > thr {
        Ok(1)
    } else if system.det_z_derivative(0.0, 2).abs() > thr {
        Ok(2)
    } else {
        Err(Error::Divergent(
            "det Z vanishes to order three or more at the two-fold".into(),
        ))
    }
}

/// Limit of `Φ` at the two-fold from the side `sign(x)`.
pub fn phi_at_two_fold(system: &PwsSystem, reg: &Regularizer, side: f64) -> Result<f64> {
    let l = system.lambda;
    let dyp = system.z_plus.y.partial(Partial::X, 0.0, 0.0, l);
    let dym = system.z_minus.y.partial(Partial::X, 0.0, 0.0, l);
    let tau0 = dym / (dym - dyp);
    match det_multiplicity(system)? {
        1 => Ok(0.0),
        _ => {
            let dd = dyp - dym;
            let d2 = system.det_z_derivative(0.0, 2);
            Ok(side.signum() * 2.0 * dd * dd.abs() / d2.abs() * reg.q(tau0))
        }
    }
}

fn sliding_scan(system: &PwsSystem, x1: f64, undefined_on_crossing: bool) -> Result<()> {
    let l = system.lambda;
    let n = 256;
    let mut det_sign = 0.0;
    for i in 1..=n {
        let x = x1 * i as f64 / n as f64;
        let yp = system.z_plus.y.value(x, 0.0, l);
        let ym = system.z_minus.y.value(x, 0.0, l);
        if yp * ym >= 0.0 {
            let msg = format!("x = {x} is not in the sliding set");
            return Err(if undefined_on_crossing {
                Error::Undefined(format!("crossing region adjacent to the tangency ({msg})"))
            } else {
                Error::Precondition(msg)
            });
        }
        let det = pws::det_z(system, x)?;
        if det == 0.0 || det * det_sign < 0.0 {
            return Err(Error::PseudoEquilibrium { at: x });
        }
        det_sign = det;
    }
    Ok(())
}

/// Improper integral from the two-fold at the origin to `x1` (or from `x1`
/// to the origin when `x1 < 0`).
///
/// The inner endpoint `x0 = x1 · 2^-k` is pushed towards zero for
/// `k = 4, …, 20` and the partial integrals are extrapolated to `x0 = 0`.
pub fn sdi_to_two_fold(system: &PwsSystem, reg: &Regularizer, x1: f64, tol: f64) -> Result<SdiResult> {
    system.require_normal_form()?;
    let o = [0.0, 0.0];
    if !system.is_tangent(Side::Plus, o, pws::TANGENCY_TOL) || !system.is_tangent(Side::Minus, o, pws::TANGENCY_TOL) {
        return Err(Error::Precondition("the origin is not a two-fold".into()));
    }
    det_multiplicity(system)?;
    if x1 == 0.0 {
        return Ok(SdiResult::zero());
    }
    if !system.domain.contains([x1, 0.0]) {
        return Err(Error::OutsideDomain { x: x1, y: 0.0 });
    }
    sliding_scan(system, x1, false)?;
    let f = |x: f64| phi_integrand(system, reg, x);
    let inner_tol = tol / 20.0;
    let piece = |a: f64, b: f64| quadrature::integrate(f, a.min(b), a.max(b), quad_opts(inner_tol));

    let mut ts = Vec::new();
    let mut partial = Vec::new();
    let mut quad_err = 0.0;
    let mut subdivisions = 0;
    let mut quad_ok = true;
    let mut last_x0 = x1;
    let mut acc = 0.0;
    let mut prev_extrap: Option<f64> = None;
    let mut best = (f64::NAN, f64::INFINITY);
    for k in 4..=20 {
        let x0 = x1 * 0.5f64.powi(k);
        let r = piece(x0, last_x0);
        acc += r.value;
        quad_err += r.abs_error;
        subdivisions += r.subdivisions;
        quad_ok &= r.converged;
        last_x0 = x0;
        ts.push(x0.abs());
        partial.push(acc);
        let m = ts.len().min(5);
        let e = neville_at_zero(&ts[ts.len() - m..], &partial[partial.len() - m..]);
        if let Some(p) = prev_extrap {
            let diff = (e - p).abs();
            if diff < best.1 {
                best = (e, diff);
            }
            if diff < tol && m >= 3 {
                return Ok(SdiResult {
                    value: e,
                    abs_error_estimate: diff + quad_err,
                    converged: quad_ok && diff + quad_err <= tol,
                    subdivisions,
                });
            }
        }
        prev_extrap = Some(e);
    }
    Ok(SdiResult {
        value: best.0,
        abs_error_estimate: best.1 + quad_err,
        converged: false,
        subdivisions,
    })
}

/// Integral from a one-sided tangency at the origin to `x1`, with the
/// integrand extended by zero at the tangency.
pub fn sdi_to_tangency(system: &PwsSystem, reg: &Regularizer, x1: f64, tol: f64) -> Result<SdiResult> {
    system.require_normal_form()?;
    let o = [0.0, 0.0];
    let tp = system.is_tangent(Side::Plus, o, pws::TANGENCY_TOL);
    let tm = system.is_tangent(Side::Minus, o, pws::TANGENCY_TOL);
    match (tp, tm) {
        (true, true) => {
            return Err(Error::Precondition(
                "both fields are tangent at the origin; use the two-fold integral".into(),
            ))
        }
        (false, false) => return Err(Error::Precondition("the origin is not a tangency point".into())),
        _ => {}
    }
    for side in [Side::Plus, Side::Minus] {
        let v = system.field(side).eval(o, system.lambda);
        if v[0] == 0.0 && v[1] == 0.0 {
            return Err(Error::Precondition("a field vanishes at the tangency point".into()));
        }
    }
    if x1 == 0.0 {
        return Ok(SdiResult::zero());
    }
    if !system.domain.contains([x1, 0.0]) {
        return Err(Error::OutsideDomain { x: x1, y: 0.0 });
    }
    sliding_scan(system, x1, true)?;
    let f = |x: f64| if x == 0.0 { 0.0 } else { phi_integrand(system, reg, x) };
    let r = quadrature::integrate(f, x1.min(0.0), x1.max(0.0), quad_opts(tol));
    Ok(SdiResult {
        value: r.value,
        abs_error_estimate: r.abs_error,
        converged: r.converged,
        subdivisions: r.subdivisions,
    })
}

/// `∫_a^0 + ∫_0^b` through a two-fold at the origin.
pub fn sdi_split_sum(system: &PwsSystem, reg: &Regularizer, a: f64, b: f64, tol: f64) -> Result<SdiResult> {
    if !(a < 0.0 && b > 0.0) {
        return Err(Error::InvalidInput(format!(
            "split interval [{a}, {b}] must contain the two-fold in its interior"
        )));
    }
    let left = sdi_to_two_fold(system, reg, a, tol / 2.0)?;
    let right = sdi_to_two_fold(system, reg, b, tol / 2.0)?;
    Ok(left.combine(right))
}

/// Compares `E(x, 0)` with the divergence of the rescaled layer equation
/// `ỹ' = φ(ỹ) Y⁺(x, 0) + (1 - φ(ỹ)) Y⁻(x, 0)` at its equilibrium
/// `ỹ = φ⁻¹(τ)`, computed by a five-point difference in `ỹ`.
///
/// Returns `(e_weight, divergence)`.
pub fn rescaled_divergence_crosscheck(system: &PwsSystem, reg: &Regularizer, x: f64) -> Result<(f64, f64)> {
    system.require_normal_form()?;
    let z = [x, 0.0];
    let e = e_weight(system, reg, z)?;
    let l = system.lambda;
    let yp = system.z_plus.y.value(x, 0.0, l);
    let ym = system.z_minus.y.value(x, 0.0, l);
    let t = pws::tau(system, z)?;
    let ys = reg.phi_inv(t);
    if !ys.is_finite() {
        return Err(Error::Precondition(format!("x = {x} is a tangency, the layer has no equilibrium")));
    }
    let layer = |u: f64| {
        let p = reg.phi(u);
        p * yp + (1.0 - p) * ym
    };
    let h = 1e-3;
    let div = (layer(ys - 2.0 * h) - 8.0 * layer(ys - h) + 8.0 * layer(ys + h) - layer(ys + 2.0 * h)) / (12.0 * h);
    Ok((e, div))
}

/// Integrals on the original, pulled-back and rescaled systems.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InvarianceReport {
    pub original: SdiResult,
    pub pulled_back: SdiResult,
    pub scaled: SdiResult,
    pub diff_pullback: f64,
    pub diff_scaled: f64,
    pub diff_pullback_scaled: f64,
}

impl InvarianceReport {
    pub fn max_difference(&self) -> f64 {
        self.diff_pullback.max(self.diff_scaled).max(self.diff_pullback_scaled)
    }
}

/// Evaluates the integral along `seg` for the system, its pullback by `t`
/// and its rescaling by `g`.
pub fn invariance_report(
    system: &PwsSystem,
    reg: &Regularizer,
    seg: &SlidingSegment,
    t: Arc<dyn Diffeomorphism>,
    g: &SmoothMap2,
    tol: f64,
) -> Result<InvarianceReport> {
    let original = sdi_regular_segment(system, reg, seg, tol)?;
    let pulled = pullback_system(system, t.clone())?;
    let pulled_back = sdi_regular_segment(&pulled, reg, &seg.mapped(t), tol)?;
    let scaled_sys = scale_system(system, g)?;
    let scaled = sdi_regular_segment(&scaled_sys, reg, seg, tol)?;
    Ok(InvarianceReport {
        original,
        pulled_back,
        scaled,
        diff_pullback: (original.value - pulled_back.value).abs(),
        diff_scaled: (original.value - scaled.value).abs(),
        diff_pullback_scaled: (pulled_back.value - scaled.value).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Poly2;
    use crate::models;
    use crate::pws::{time_reversed, PolyDiffeo};
    use crate::regularization::{make_arctan_regularizer, make_tanh_regularizer};

    fn tanh() -> Regularizer {
        make_tanh_regularizer()
    }

    #[test]
    fn weight_values() {
        let s = models::canonical_vi3();
        assert!((e_weight(&s, &tanh(), [0.5, 0.0]).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((e_weight(&s, &tanh(), [-0.5, 0.0]).unwrap() + 2.0 / 3.0).abs() < 1e-15);
        let t = models::tangency_model();
        assert!(e_weight(&t, &tanh(), [1e-12, 0.0]).unwrap().abs() < 1e-11);
        assert!(e_weight(&models::crossing_adjacent(), &tanh(), [0.5, 0.0]).is_err());
    }

    #[test]
    fn regular_segment_closed_form() {
        let s = models::canonical_vi3();
        let seg = SlidingSegment::on_axis(0.1, 0.3);
        let r = sdi_regular_segment(&s, &tanh(), &seg, DEFAULT_TOL).unwrap();
        assert!(r.converged);
        assert!((r.value - 0.16).abs() < 1e-12);
        let rev = sdi_regular_segment(&time_reversed(&s), &tanh(), &seg, DEFAULT_TOL).unwrap();
        assert_eq!(rev.value, -r.value);
    }

    #[test]
    fn segment_through_two_fold_is_rejected() {
        let s = models::canonical_vi3();
        let seg = SlidingSegment::on_axis(-0.2, 0.2);
        assert!(sdi_regular_segment(&s, &tanh(), &seg, DEFAULT_TOL).is_err());
    }

    #[test]
    fn two_fold_integrals() {
        let s = models::canonical_vi3();
        let r = sdi_to_two_fold(&s, &tanh(), 0.3, DEFAULT_TOL).unwrap();
        assert!(r.converged, "{r:?}");
        assert!((r.value - 0.18).abs() < 1e-10);
        let l = sdi_to_two_fold(&s, &tanh(), -0.3, DEFAULT_TOL).unwrap();
        assert!((l.value + 0.18).abs() < 1e-10);
        assert!(matches!(
            sdi_to_two_fold(&models::cubic_two_fold(), &tanh(), 0.3, DEFAULT_TOL),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn multiplicity_two_integral_matches_direct_quadrature() {
        let s = models::non_generic_two_fold();
        let reg = tanh();
        let r = sdi_to_two_fold(&s, &reg, 0.4, 1e-11).unwrap();
        assert!(r.converged);
        let direct = quadrature::integrate(|x| phi_integrand(&s, &reg, x), 0.0, 0.4, quad_opts(1e-13));
        assert!((r.value - direct.value).abs() < 1e-9);
        let lim = phi_at_two_fold(&s, &reg, 1.0).unwrap();
        assert!((lim - phi_integrand(&s, &reg, 1e-7)).abs() < 1e-5);
    }

    #[test]
    fn split_sums() {
        let s = models::canonical_vi3();
        let r = |a, b| sdi_split_sum(&s, &tanh(), a, b, DEFAULT_TOL).unwrap().value;
        assert!(r(-0.3, 0.3).abs() < 1e-10);
        assert!((r(-0.1, 0.3) - 0.16).abs() < 1e-10);
        assert!((r(-0.3, 0.1) + 0.16).abs() < 1e-10);
        assert!(sdi_split_sum(&s, &tanh(), 0.1, 0.3, DEFAULT_TOL).is_err());
    }

    #[test]
    fn tangency_integral() {
        let s = models::tangency_model();
        let r = sdi_to_tangency(&s, &tanh(), 0.3, 1e-12).unwrap();
        let exact = 2.0 * (-0.3 - 0.7f64.ln());
        assert!((r.value - exact).abs() < 1e-11);
        assert_eq!(sdi_to_tangency(&s, &tanh(), 0.0, 1e-12).unwrap().value, 0.0);
        assert!(matches!(
            sdi_to_tangency(&models::crossing_adjacent(), &tanh(), 0.3, 1e-12),
            Err(Error::Undefined(_))
        ));
        assert!(sdi_to_tangency(&models::canonical_vi3(), &tanh(), 0.3, 1e-12).is_err());
    }

    #[test]
    fn crosscheck_agrees() {
        let s = models::canonical_vi3();
        for reg in [tanh(), make_arctan_regularizer()] {
            for x in [-0.5, 0.5, 0.77] {
                let (e, d) = rescaled_divergence_crosscheck(&s, &reg, x).unwrap();
                assert!((e - d).abs() < 1e-8);
            }
        }
        let (e, _) = rescaled_divergence_crosscheck(&s, &tanh(), 0.5).unwrap();
        assert!((e - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn invariance_under_coordinates_and_time_scaling() {
        let s = models::canonical_vi3();
        let seg = SlidingSegment::on_axis(0.1, 0.3);
        let t: Arc<dyn Diffeomorphism> = Arc::new(PolyDiffeo::new(
            Poly2::from_terms(&[(1, 0, 1.0)]),
            Poly2::from_terms(&[(0, 1, 1.0), (1, 1, 0.2), (2, 0, 0.1)]),
        ));
        let g = SmoothMap2::closure(|x, _, _| 2.0 + x.cos());
        let rep = invariance_report(&s, &tanh(), &seg, t, &g, 1e-11).unwrap();
        assert!(rep.max_difference() < 1e-6, "{rep:?}");
        let rep3 = invariance_report(
            &s,
            &tanh(),
            &seg,
            Arc::new(pws::IdentityMap),
            &SmoothMap2::constant(3.0),
            1e-11,
        )
        .unwrap();
        assert!(rep3.diff_scaled < 1e-9);
        assert!(rep3.diff_pullback < 1e-12);
    }

    #[test]
    fn reparameterization_keeps_value() {
        let s = models::canonical_vi3();
        let seg = SlidingSegment::on_axis(0.1, 0.3);
        let base = sdi_regular_segment(&s, &tanh(), &seg, 1e-11).unwrap().value;
        // v = 0.1 + 0.1 (u^2 + u) maps [0, 1] onto [0.1, 0.3].
        let re = seg.reparameterized(|u| (0.1 + 0.2 * (u * u + u) / 2.0, 0.2 * (2.0 * u + 1.0) / 2.0), 0.0, 1.0);
        let v = sdi_regular_segment(&s, &tanh(), &re, 1e-11).unwrap().value;
        assert!((v - base).abs() < 2e-11);
    }
}
