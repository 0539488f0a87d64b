//! Balanced canard cycles through a visible-invisible two-fold.
//!
//! A [`CanardSetup`] fixes a system in normal form (`h = y`, two-fold at the
//! origin), a regularizer, the sliding range `[η₋, η₊]` and a vertical
//! section `x = 0`, `y = y₀ + s`. The lower orbit through the section point
//! meets `Σ` at `ψ₋(s) < 0 < ψ₊(s)`; the cycle `Γ_s` closes it with the
//! sliding segment between those points. Along it the slow divergence
//! integral is
//!
//! ```text
//! I(s) = ∫_{ψ₋(s)}^{ψ₊(s)} Φ(x) dx
//! ```
//!
//! and the slow relation function `G` pairs an entry parameter `s` with the
//! exit parameter `G(s)` at which the contraction gathered on the stable
//! side is used up on the unstable side.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Partial;
use crate::fractal::{dim_from_multiplicity, fit_line, multiplicity_from_dim, Multiplicity};
use crate::models::{self, ModelFile, TunedModel};
use crate::ode::{Integrator, OdeOptions};
use crate::pws::{
    classify_boundary_point, classify_two_fold, filippov_unchecked, BoundaryTag, PwsSystem, TwoFoldType,
};
use crate::regularization::{verify_regularizer, GridSpec, Regularizer};
use crate::roots;
use crate::sdi::{self, SdiResult};

/// A system prepared for the canard analysis.
#[derive(Clone)]
pub struct CanardSetup {
    pub system: PwsSystem,
    pub reg: Regularizer,
    pub eta_minus: f64,
    pub eta_plus: f64,
    /// Height of the section anchor `(0, y₀)`.
    pub section_y0: f64,
    pub s_bar: f64,
    /// Absolute tolerance of every integral.
    pub tol: f64,
}

impl std::fmt::Debug for CanardSetup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CanardSetup")
            .field("reg", &self.reg.name())
            .field("eta_minus", &self.eta_minus)
            .field("eta_plus", &self.eta_plus)
            .field("section_y0", &self.section_y0)
            .field("s_bar", &self.s_bar)
            .finish()
    }
}

impl CanardSetup {
    pub fn new(
        system: PwsSystem,
        reg: Regularizer,
        eta_minus: f64,
        eta_plus: f64,
        section_y0: f64,
        s_bar: f64,
    ) -> Result<Self> {
        system.require_normal_form()?;
        if !(eta_minus < 0.0 && eta_plus > 0.0) {
            return Err(Error::InvalidInput(format!(
                "sliding range [{eta_minus}, {eta_plus}] must contain the origin"
            )));
        }
        if !(s_bar > 0.0 && section_y0 + s_bar < 0.0) {
            return Err(Error::InvalidInput(format!(
                "section y0 = {section_y0}, sBar = {s_bar} must stay below the switching line"
            )));
        }
        for z in [[eta_minus, 0.0], [eta_plus, 0.0], [0.0, section_y0 - s_bar]] {
            if !system.domain.contains(z) {
                return Err(Error::OutsideDomain { x: z[0], y: z[1] });
            }
        }
        Ok(CanardSetup {
            system,
            reg,
            eta_minus,
            eta_plus,
            section_y0,
            s_bar,
            tol: 1e-13,
        })
    }

    /// Setup around a tuned member: `η± = ±1.4 p₀`, `y₀ = -p₀²`,
    /// `s̄ = p₀² / 2`.
    pub fn from_tuned(model: &TunedModel, reg: Regularizer) -> Result<Self> {
        let p0 = model.coefficients.p0;
        Self::new(model.system.clone(), reg, -1.4 * p0, 1.4 * p0, -p0 * p0, 0.5 * p0 * p0)
    }

    /// The symmetric model with `c = 2` and the same layout for a given `p₀`.
    pub fn canonical(reg: Regularizer, p0: f64) -> Result<Self> {
        Self::new(models::canonical_vi3(), reg, -1.4 * p0, 1.4 * p0, -p0 * p0, 0.5 * p0 * p0)
    }

    /// Setup described by a model file with a `canard` section.
    pub fn from_model_file(file: &ModelFile) -> Result<Self> {
        let c = file
            .canard
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("the model file has no canard section".into()))?;
        Self::new(
            file.to_system()?,
            file.to_regularizer()?,
            c.eta_minus,
            c.eta_plus,
            c.section_y0,
            c.s_bar,
        )
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn section_point(&self, s: f64) -> [f64; 2] {
        [0.0, self.section_y0 + s]
    }

    /// Rejects section parameters outside `[-sBar, sBar]`.
    pub fn require_s(&self, s: f64) -> Result<()> {
        if !(s.abs() <= self.s_bar * (1.0 + 1e-12)) {
            return Err(Error::InvalidInput(format!("|s| = {} exceeds sBar = {}", s.abs(), self.s_bar)));
        }
        Ok(())
    }
}

/// Outcome of one assumption check.
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionCheck {
    pub name: char,
    pub passed: bool,
    pub witness: String,
}

/// Per-assumption verdicts.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct AssumptionReport {
    pub checks: Vec<AssumptionCheck>,
    /// Parameters at which the sign of `I` was sampled.
    pub tested_range: (f64, f64),
}

impl AssumptionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn passed(&self, name: char) -> bool {
        self.checks.iter().any(|c| c.name == name && c.passed)
    }
}

fn check(name: char, passed: bool, witness: String) -> AssumptionCheck {
    AssumptionCheck { name, passed, witness }
}

fn check_sliding(setup: &CanardSetup) -> AssumptionCheck {
    let sys = &setup.system;
    let n = 200;
    for i in 0..=n {
        let t = i as f64 / n as f64;
        for (x, want) in [
            (setup.eta_minus * (1.0 - t), BoundaryTag::StableSliding),
            (setup.eta_plus * (1.0 - t), BoundaryTag::UnstableSliding),
        ] {
            if x == 0.0 {
                continue;
            }
            let z = [x, 0.0];
            match classify_boundary_point(sys, z) {
                Ok(c) if c.tag == want => {}
                Ok(c) => return check('A', false, format!("x = {x:.6}: {:?}, expected {want:?}", c.tag)),
                Err(e) => return check('A', false, format!("x = {x:.6}: {e}")),
            }
            match filippov_unchecked(sys, z) {
                Ok(v) if v[0] > 0.0 => {}
                Ok(v) => return check('A', false, format!("sliding speed {:.3e} at x = {x:.6}", v[0])),
                Err(e) => return check('A', false, format!("x = {x:.6}: {e}")),
            }
        }
    }
    check(
        'A',
        true,
        format!(
            "stable on [{}, 0), unstable on (0, {}], positive speed ({} samples per side)",
            setup.eta_minus, setup.eta_plus, n
        ),
    )
}

fn check_two_fold(setup: &CanardSetup) -> AssumptionCheck {
    let sys = &setup.system;
    let d1 = sys.det_z_derivative(0.0, 1);
    match classify_two_fold(sys, [0.0, 0.0]) {
        Ok(t) => check(
            'B',
            t == TwoFoldType::VI3 && d1 < 0.0,
            format!("two-fold type {t:?}, (det Z)'(0) = {d1:.6}"),
        ),
        Err(e) => check('B', false, e.to_string()),
    }
}

fn check_velocity(setup: &CanardSetup) -> AssumptionCheck {
    let s = &setup.system;
    let l = s.lambda;
    let d = |f: &crate::field::SmoothMap2, p: Partial| f.partial(p, 0.0, 0.0, l);
    let v = d(&s.z_minus.y, Partial::LAMBDA) * d(&s.z_plus.y, Partial::X)
        - d(&s.z_plus.y, Partial::LAMBDA) * d(&s.z_minus.y, Partial::X);
    check('C', v.abs() > 1e-8, format!("collision determinant {v:.6}"))
}

fn check_regularizer(setup: &CanardSetup) -> AssumptionCheck {
    let r = verify_regularizer(&setup.reg, GridSpec::default());
    check(
        'D',
        r.passed,
        format!(
            "{}: monotone {}, limit gap {:.1e}, inverse error {:.1e}",
            r.name, r.monotone, r.limit_gap, r.inverse_max_error
        ),
    )
}

/// Noise level below which `I(s)` is treated as zero.
pub const I_NOISE_FLOOR: f64 = 1e-11;

fn check_balance(setup: &CanardSetup) -> (AssumptionCheck, (f64, f64)) {
    let range = (setup.s_bar / 20.0, setup.s_bar);
    let i0 = match sdi_i(setup, 0.0) {
        Ok(v) => v,
        Err(e) => return (check('E', false, format!("I(0): {e}")), range),
    };
    if i0.abs() > 1e-9 {
        return (check('E', false, format!("I(0) = {i0:.3e} is not zero")), range);
    }
    let ks: Vec<f64> = (1..=20).map(|k| setup.s_bar * k as f64 / 20.0).collect();
    let vals: Vec<Result<f64>> = ks.par_iter().map(|&s| sdi_i(setup, s)).collect();
    let mut sign = 0.0;
    for (s, v) in ks.iter().zip(vals) {
        let v = match v {
            Ok(v) => v,
            Err(e) => return (check('E', false, format!("I({s:.4e}): {e}")), range),
        };
        if v.abs() <= I_NOISE_FLOOR {
            return (
                check('E', false, format!("I({s:.4e}) = {v:.3e} is at the noise floor; zero not isolated")),
                range,
            );
        }
        if v * sign < 0.0 {
            return (check('E', false, format!("I changes sign near s = {s:.4e}")), range);
        }
        sign = v.signum();
    }
    (
        check(
            'E',
            true,
            format!("I(0) = {i0:.2e}; I has sign {sign} on 20 points of [{:.4e}, {:.4e}]", range.0, range.1),
        ),
        range,
    )
}

/// Checks the sliding, two-fold, collision, regularizer and balance
/// assumptions on grids.
pub fn check_assumptions(setup: &CanardSetup) -> AssumptionReport {
    let (e, tested_range) = check_balance(setup);
    AssumptionReport {
        checks: vec![
            check_sliding(setup),
            check_two_fold(setup),
            check_velocity(setup),
            check_regularizer(setup),
            e,
        ],
        tested_range,
    }
}

fn lower_flow_to_boundary(setup: &CanardSetup, s: f64, backward: bool) -> Result<f64> {
    let sys = &setup.system;
    let l = sys.lambda;
    let sign = if backward { -1.0 } else { 1.0 };
    let f = |z: [f64; 2]| {
        let v = sys.z_minus.eval(z, l);
        [sign * v[0], sign * v[1]]
    };
    let opts = OdeOptions {
        rtol: 1e-13,
        atol: [1e-15, 1e-15],
        h_init: 1e-4,
        h_max: 0.02,
        ..OdeOptions::default()
    };
    let mut ig = Integrator::new(f, setup.section_point(s), opts);
    let t_max = 1e3;
    while ig.time() < t_max {
        let step = ig.step(t_max)?;
        if !sys.domain.contains(step.z1) {
            return Err(Error::Escaped {
                t: step.t1,
                x: step.z1[0],
                y: step.z1[1],
            });
        }
        if step.z1[1] >= 0.0 {
            let (_, z) = ig.locate(&step, |z| z[1], 1e-15)?;
            return Ok(z[0]);
        }
    }
    Err(Error::NoReturn { t_max })
}

/// Abscissas `(ψ₋(s), ψ₊(s))` where the lower orbit through the section
/// point meets the switching line in forward and backward time.
pub fn connection_endpoints(setup: &CanardSetup, s: f64) -> Result<(f64, f64)> {
    setup.require_s(s)?;
    let m = lower_flow_to_boundary(setup, s, false)?;
    let p = lower_flow_to_boundary(setup, s, true)?;
    if !(setup.eta_minus <= m && m < 0.0 && 0.0 < p && p <= setup.eta_plus) {
        return Err(Error::Precondition(format!(
            "endpoints ({m}, {p}) leave the sliding range [{}, {}]",
            setup.eta_minus, setup.eta_plus
        )));
    }
    Ok((m, p))
}

fn left_part(setup: &CanardSetup, s: f64) -> Result<SdiResult> {
    let (m, _) = connection_endpoints(setup, s)?;
    sdi::sdi_to_two_fold(&setup.system, &setup.reg, m, setup.tol)
}

fn right_part(setup: &CanardSetup, s: f64) -> Result<SdiResult> {
    setup.require_s(s)?;
    let p = lower_flow_to_boundary(setup, s, true)?;
    if !(0.0 < p && p <= setup.eta_plus) {
        return Err(Error::Precondition(format!("exit point {p} leaves (0, {}]", setup.eta_plus)));
    }
    sdi::sdi_to_two_fold(&setup.system, &setup.reg, p, setup.tol)
}

/// Slow divergence integral `I(s)` along the cycle `Γ_s`.
pub fn sdi_i(setup: &CanardSetup, s: f64) -> Result<f64> {
    let (m, p) = connection_endpoints(setup, s)?;
    Ok(sdi::sdi_split_sum(&setup.system, &setup.reg, m, p, setup.tol)?.value)
}

/// `∫_{ψ₋(s)}^{ψ₊(g)} Φ`, the quantity the slow relation sets to zero.
pub fn slow_relation_residual(setup: &CanardSetup, s: f64, g: f64) -> Result<f64> {
    Ok(left_part(setup, s)?.value + right_part(setup, g)?.value)
}

fn solve_exit(setup: &CanardSetup, target: f64, tol: f64, part: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let f = |g: f64| part(g).map(|v| v + target).unwrap_or(f64::NAN);
    let (a, b) = (-setup.s_bar, setup.s_bar);
    let (fa, fb) = (f(a), f(b));
    let g = roots::brent_with_values(&f, a, b, fa, fb, 1e-15).map_err(|_| {
        Error::NoBracket(format!(
            "slow relation has no root in [-sBar, sBar] (residuals {fa:.3e}, {fb:.3e})"
        ))
    })?;
    let r = f(g);
    if !(r.abs() < tol) {
        return Err(Error::NotConverged {
            what: "slow relation residual",
            estimate: r.abs(),
            tolerance: tol,
        });
    }
    Ok(g)
}

/// Exit parameter `G(s)`: `∫_{ψ₋(s)}^{ψ₊(G(s))} Φ = 0`.
pub fn slow_relation_g(setup: &CanardSetup, s: f64, tol: f64) -> Result<f64> {
    let left = left_part(setup, s)?.value;
    solve_exit(setup, left, tol, |g| right_part(setup, g).map(|r| r.value))
}

/// Entry parameter `G⁻¹(s)`: `∫_{ψ₋(G⁻¹(s))}^{ψ₊(s)} Φ = 0`.
pub fn slow_relation_g_inverse(setup: &CanardSetup, s: f64, tol: f64) -> Result<f64> {
    let right = right_part(setup, s)?.value;
    solve_exit(setup, right, tol, |g| left_part(setup, g).map(|r| r.value))
}

/// Which map generates an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum OrbitDirection {
    ForwardG,
    InverseG,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum StopReason {
    FloorReached,
    MaxIter,
    RootFailure,
}

/// Entry-exit sequence `s₀ > s₁ > …`.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OrbitSequence {
    pub s0: f64,
    /// All terms starting with `s₀`, ending with the first term below the
    /// floor when it is reached.
    pub terms: Vec<f64>,
    pub direction: OrbitDirection,
    pub stop_reason: StopReason,
    pub failure: Option<String>,
}

pub const DEFAULT_FLOOR: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Iterates an arbitrary map from `s₀` until the floor or the iteration
/// limit. A failed or non-decreasing step ends the orbit with
/// [`StopReason::RootFailure`].
pub fn generate_orbit_with<F>(
    mut map: F,
    s0: f64,
    floor: f64,
    max_iter: usize,
    direction: OrbitDirection,
) -> OrbitSequence
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut terms = vec![s0];
    let mut stop_reason = StopReason::MaxIter;
    let mut failure = None;
    if s0 <= floor {
        stop_reason = StopReason::FloorReached;
    } else {
        let mut s = s0;
        for _ in 0..max_iter {
            match map(s) {
                Ok(next) if next < s && next.is_finite() => {
                    terms.push(next);
                    s = next;
                    if s <= floor {
                        stop_reason = StopReason::FloorReached;
                        break;
                    }
                }
                Ok(next) => {
                    stop_reason = StopReason::RootFailure;
                    failure = Some(format!("map sent {s:e} to {next:e}"));
                    break;
                }
                Err(e) => {
                    stop_reason = StopReason::RootFailure;
                    failure = Some(e.to_string());
                    break;
                }
            }
        }
    }
    OrbitSequence {
        s0,
        terms,
        direction,
        stop_reason,
        failure,
    }
}

/// Entry-exit orbit of the setup, iterating `G` when `I < 0` near `s̄/2`
/// and `G⁻¹` otherwise.
pub fn generate_orbit(setup: &CanardSetup, s0: f64, floor: f64, max_iter: usize) -> Result<OrbitSequence> {
    if !(s0 >= 0.0 && s0 <= setup.s_bar) {
        return Err(Error::InvalidInput(format!("s0 = {s0} must lie in [0, sBar = {}]", setup.s_bar)));
    }
    if s0 == 0.0 {
        return Ok(generate_orbit_with(|s| Ok(s), 0.0, floor, max_iter, OrbitDirection::ForwardG));
    }
    let i = sdi_i(setup, 0.5 * setup.s_bar)?;
    if i.abs() <= I_NOISE_FLOOR {
        return Err(Error::Precondition("I vanishes near sBar/2; orbits do not move".into()));
    }
    let tol = 1e-10;
    Ok(if i < 0.0 {
        generate_orbit_with(|s| slow_relation_g(setup, s, tol), s0, floor, max_iter, OrbitDirection::ForwardG)
    } else {
        generate_orbit_with(
            |s| slow_relation_g_inverse(setup, s, tol),
            s0,
            floor,
            max_iter,
            OrbitDirection::InverseG,
        )
    })
}

/// Integer multiplicity read off a log-log slope.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MultiplicityEstimate {
    /// `None` when the slope is not within 0.15 of an integer or the fit is
    /// poor; `Some(Infinite)` when every sample is at the noise floor.
    pub multiplicity: Option<Multiplicity>,
    pub slope: f64,
    pub fit_quality: f64,
    pub range: (f64, f64),
    pub samples: Vec<(f64, f64)>,
}

/// Log-spaced grid used for multiplicity fits.
#[derive(Debug, Clone, Copy)]
pub struct FitRange {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Default for FitRange {
    fn default() -> Self {
        FitRange { lo: 1e-4, hi: 1e-2, n: 50 }
    }
}

impl FitRange {
    fn points(&self) -> Vec<f64> {
        let (a, b) = (self.lo.ln(), self.hi.ln());
        (0..self.n)
            .map(|i| (a + (b - a) * i as f64 / (self.n - 1) as f64).exp())
            .collect()
    }
}

fn multiplicity_fit(range: FitRange, f: impl Fn(f64) -> Result<f64> + Sync) -> Result<MultiplicityEstimate> {
    if !(range.lo > 0.0 && range.lo < range.hi && range.n >= 3) {
        return Err(Error::InvalidInput("fit range must satisfy 0 < lo < hi and n ≥ 3".into()));
    }
    let s = range.points();
    let vals: Vec<f64> = s.par_iter().map(|&x| f(x)).collect::<Result<_>>()?;
    let samples: Vec<(f64, f64)> = s.iter().cloned().zip(vals.iter().cloned()).collect();
    if vals.iter().all(|v| v.abs() <= I_NOISE_FLOOR) {
        return Ok(MultiplicityEstimate {
            multiplicity: Some(Multiplicity::Infinite),
            slope: f64::NAN,
            fit_quality: f64::NAN,
            range: (range.lo, range.hi),
            samples,
        });
    }
    if vals.iter().any(|v| v.abs() <= I_NOISE_FLOOR) {
        return Err(Error::Precondition("some samples are at the noise floor; narrow the fit range".into()));
    }
    let lx: Vec<f64> = s.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = vals.iter().map(|v| v.abs().ln()).collect();
    let (slope, fit_quality) = fit_line(&lx, &ly);
    let m = slope.round();
    let multiplicity =
        (m >= 1.0 && (slope - m).abs() < 0.15 && fit_quality < 0.05).then_some(Multiplicity::Finite(m as u32));
    Ok(MultiplicityEstimate {
        multiplicity,
        slope,
        fit_quality,
        range: (range.lo, range.hi),
        samples,
    })
}

/// Multiplicity of the zero of `I` at `s = 0`.
pub fn multiplicity_of_i(setup: &CanardSetup, range: FitRange) -> Result<MultiplicityEstimate> {
    multiplicity_fit(range, |s| sdi_i(setup, s))
}

/// Multiplicity of the zero of `s - G(s)` at `s = 0`.
pub fn multiplicity_of_displacement(setup: &CanardSetup, range: FitRange) -> Result<MultiplicityEstimate> {
    multiplicity_fit(range, |s| Ok(s - slow_relation_g(setup, s, 1e-10)?))
}

/// Qualitative picture predicted near the balanced cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Scenario {
    UniqueHyperbolic,
    SaddleNode,
    AttractingUnique,
    RepellingUnique,
}

/// What the prediction starts from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CyclicityInput {
    Dimension(f64),
    Multiplicity(Multiplicity),
    /// A cycle with `I(0) ≠ 0`.
    Unbalanced { i0: f64 },
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CyclicityPrediction {
    pub dim_b: f64,
    /// `Finite(0)` stands for an unbalanced cycle.
    pub multiplicity: Multiplicity,
    pub bound: u32,
    pub scenarios: Vec<Scenario>,
    pub warning: Option<String>,
}

/// Upper bound `(2 - d)/(1 - d)` on the number of limit cycles near `Γ₀`.
pub fn predict_cyclicity(input: CyclicityInput) -> Result<CyclicityPrediction> {
    match input {
        CyclicityInput::Unbalanced { i0 } => {
            if i0 == 0.0 || !i0.is_finite() {
                return Err(Error::InvalidInput("an unbalanced cycle needs I(0) ≠ 0".into()));
            }
            Ok(CyclicityPrediction {
                dim_b: 0.0,
                multiplicity: Multiplicity::Finite(0),
                bound: 1,
                scenarios: vec![if i0 < 0.0 {
                    Scenario::AttractingUnique
                } else {
                    Scenario::RepellingUnique
                }],
                warning: None,
            })
        }
        CyclicityInput::Multiplicity(m) => {
            let d = dim_from_multiplicity(m)?;
            let k = match m {
                Multiplicity::Finite(k) => k,
                Multiplicity::Infinite => {
                    return Err(Error::InvalidInput("infinite multiplicity gives no finite bound".into()))
                }
            };
            Ok(prediction(d, k, None))
        }
        CyclicityInput::Dimension(d) => {
            if !(d >= 0.0) {
                return Err(Error::InvalidInput(format!("dimension {d} is negative")));
            }
            if d >= 1.0 {
                return Err(Error::InvalidInput(format!("dimension {d} ≥ 1 gives no finite bound")));
            }
            let snap = multiplicity_from_dim(d)?;
            match snap.m {
                Some(k) => Ok(prediction(d, k, snap.warning)),
                None => {
                    let raw = (2.0 - d) / (1.0 - d);
                    Ok(CyclicityPrediction {
                        dim_b: d,
                        multiplicity: Multiplicity::Finite(raw.floor() as u32 - 1),
                        bound: raw.floor() as u32,
                        scenarios: vec![],
                        warning: snap.warning,
                    })
                }
            }
        }
    }
}

fn prediction(d: f64, m: u32, warning: Option<String>) -> CyclicityPrediction {
    CyclicityPrediction {
        dim_b: d,
        multiplicity: Multiplicity::Finite(m),
        bound: m + 1,
        scenarios: if m == 1 {
            vec![Scenario::UniqueHyperbolic, Scenario::SaddleNode]
        } else {
            vec![]
        },
        warning,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{default_tuned_double, default_tuned_simple};
    use crate::regularization::make_tanh_regularizer;

    fn tuned() -> CanardSetup {
        CanardSetup::from_tuned(&default_tuned_simple().unwrap(), make_tanh_regularizer()).unwrap()
    }

    #[test]
    fn endpoints_follow_the_parabolas() {
        let setup = tuned();
        let p0 = 0.5;
        for s in [-0.1, 0.0, 0.05, 0.12] {
            let (m, p) = connection_endpoints(&setup, s).unwrap();
            let exact = (p0 * p0 - s).sqrt();
            assert!((p - exact).abs() < 1e-10 && (m + exact).abs() < 1e-10, "{s}: {m} {p}");
        }
        assert!(connection_endpoints(&setup, 0.2).is_err());
    }

    #[test]
    fn canonical_setup_is_symmetric() {
        let setup = CanardSetup::canonical(make_tanh_regularizer(), 0.5).unwrap();
        for s in [0.0, 0.05, 0.1] {
            assert!(sdi_i(&setup, s).unwrap().abs() < 1e-11);
            let g = slow_relation_g(&setup, s, 1e-9).unwrap();
            assert!((g - s).abs() < 1e-10, "{g} vs {s}");
        }
        let r = check_assumptions(&setup);
        assert!(r.passed('A') && r.passed('B') && r.passed('C') && r.passed('D'));
        assert!(!r.passed('E'));
        let m = multiplicity_of_i(&setup, FitRange { n: 8, ..FitRange::default() }).unwrap();
        assert_eq!(m.multiplicity, Some(Multiplicity::Infinite));
    }

    #[test]
    fn weak_lower_field_fails_the_two_fold_check() {
        let setup = CanardSetup::new(models::canonical_with_c(0.5), make_tanh_regularizer(), -0.5, 0.5, -0.1, 0.05);
        let r = check_assumptions(&setup.unwrap());
        assert!(!r.passed('B'));
    }

    #[test]
    fn tuned_setup_passes_and_orders_g() {
        let setup = tuned();
        let r = check_assumptions(&setup);
        assert!(r.all_passed(), "{r:?}");
        let i = sdi_i(&setup, 0.06).unwrap();
        for s in [0.01, 0.06, 0.12] {
            let g = slow_relation_g(&setup, s, 1e-9).unwrap();
            assert!(slow_relation_residual(&setup, s, g).unwrap().abs() < 1e-9);
            if i < 0.0 {
                assert!(0.0 < g && g < s);
            } else {
                assert!(g > s);
            }
        }
        let g = slow_relation_g(&setup, 0.05, 1e-9).unwrap();
        let back = slow_relation_g_inverse(&setup, g, 1e-9).unwrap();
        assert!((back - 0.05).abs() < 1e-9);
        assert!(slow_relation_g(&setup, 0.0, 1e-9).unwrap().abs() < 1e-9);
    }

    #[test]
    fn multiplicities_of_tuned_members() {
        let setup = tuned();
        let m = multiplicity_of_i(&setup, FitRange::default()).unwrap();
        assert_eq!(m.multiplicity, Some(Multiplicity::Finite(1)), "{m:?}");
        let d = multiplicity_of_displacement(&setup, FitRange { n: 12, ..FitRange::default() }).unwrap();
        assert_eq!(d.multiplicity, Some(Multiplicity::Finite(1)), "{d:?}");
        let double = CanardSetup::from_tuned(&default_tuned_double().unwrap(), make_tanh_regularizer()).unwrap();
        let m = multiplicity_of_i(&double, FitRange::default()).unwrap();
        assert_eq!(m.multiplicity, Some(Multiplicity::Finite(2)), "{m:?}");
    }

    #[test]
    fn synthetic_orbits() {
        let half = generate_orbit_with(|s| Ok(s / 2.0), 0.5, 1e-9, 1000, OrbitDirection::ForwardG);
        assert_eq!(half.terms.len(), 30);
        assert_eq!(half.stop_reason, StopReason::FloorReached);
        let quad = generate_orbit_with(|s| Ok(s - s * s), 0.5, 1e-9, 20_000, OrbitDirection::ForwardG);
        assert_eq!(quad.stop_reason, StopReason::MaxIter);
        let n = quad.terms.len() - 1;
        assert!((quad.terms[n] * n as f64 - 1.0).abs() < 0.01);
        let fixed = generate_orbit_with(|s| Ok(s), 0.0, 1e-9, 10, OrbitDirection::ForwardG);
        assert_eq!(fixed.terms, vec![0.0]);
        assert_eq!(fixed.stop_reason, StopReason::FloorReached);
        let stuck = generate_orbit_with(|s| Ok(s), 0.5, 1e-9, 10, OrbitDirection::ForwardG);
        assert_eq!(stuck.stop_reason, StopReason::RootFailure);
    }

    #[test]
    fn tuned_orbit_decreases_geometrically() {
        let o = generate_orbit(&tuned(), 0.1, 1e-6, 200).unwrap();
        assert_eq!(o.stop_reason, StopReason::FloorReached);
        assert!(o.terms.windows(2).all(|w| w[1] < w[0]));
        let r: Vec<f64> = o.terms.windows(2).map(|w| w[1] / w[0]).collect();
        let last = r[r.len() - 1];
        assert!((last - r[r.len() - 2]).abs() < 0.01 && last < 1.0);
    }

    #[test]
    fn cyclicity_predictions() {
        let p = predict_cyclicity(CyclicityInput::Dimension(0.0)).unwrap();
        assert_eq!(p.bound, 2);
        assert_eq!(p.scenarios, vec![Scenario::UniqueHyperbolic, Scenario::SaddleNode]);
        for (d, b) in [(0.5, 3), (2.0 / 3.0, 4), (0.75, 5)] {
            assert_eq!(predict_cyclicity(CyclicityInput::Dimension(d)).unwrap().bound, b);
        }
        let m1 = predict_cyclicity(CyclicityInput::Multiplicity(Multiplicity::Finite(1))).unwrap();
        assert_eq!(m1.dim_b, 0.0);
        assert!(predict_cyclicity(CyclicityInput::Dimension(1.0)).is_err());
        assert!(predict_cyclicity(CyclicityInput::Multiplicity(Multiplicity::Infinite)).is_err());
        let u = predict_cyclicity(CyclicityInput::Unbalanced { i0: -0.2 }).unwrap();
        assert_eq!((u.bound, u.scenarios[0]), (1, Scenario::AttractingUnique));
    }
}
