//! Ready-made systems and the JSON model file format.
//!
//! The canonical visible-invisible family uses `X⁺ = 1`, `X⁻ = -1`, `h = y`,
//! `Y⁻ = -c x` and
//!
//! ```text
//! Y⁺ = x + a x² + b x⁴ + e x⁶ + λ
//! ```
//!
//! With `a = b = e = 0` and `c = 2` the integrand is `Φ(x) = 4x` under the
//! tanh regularizer and the lower orbits are the parabolas `y = x² - ψ²`.
//! Writing `u = 1 + a x + b x³ + e x⁵` one finds `Φ = 4x u / (2 - u)`, whose
//! even part has the sign of `a + b x² + e x⁴`. The tuned members choose the
//! coefficients so that the integral across `[-p₀, p₀]` vanishes (simple
//! zero) or, additionally, so that its derivative in the section parameter
//! vanishes (double zero). They are always computed, never tabulated.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Monomial, Poly2, SmoothMap2, VectorField};
use crate::pws::{Domain, PwsSystem};
use crate::regularization::{make_tanh_regularizer, Regularizer};
use crate::roots;
use crate::sdi;

fn y_poly() -> SmoothMap2 {
    Poly2::from_terms(&[(0, 1, 1.0)]).into()
}

fn system(zp: (Poly2, Poly2), zm: (Poly2, Poly2)) -> PwsSystem {
    PwsSystem::new(
        VectorField::new(zp.0, zp.1),
        VectorField::new(zm.0, zm.1),
        y_poly(),
        Domain::square(1.0),
        0.0,
    )
    .expect("built-in models have a regular switching line")
}

fn c(v: f64) -> Poly2 {
    Poly2::constant(v)
}

fn x_times(k: f64) -> Poly2 {
    Poly2::from_terms(&[(1, 0, k)])
}

/// `Z⁺ = (1, x + λ)`, `Z⁻ = (-1, -c x)`, `h = y` on `[-1, 1]²`.
pub fn canonical_with_c(cc: f64) -> PwsSystem {
    system(
        (c(1.0), x_times(1.0).with_lambda_term(0, 0, 1.0)),
        (c(-1.0), x_times(-cc)),
    )
}

/// The canonical visible-invisible two-fold with `c = 2`.
pub fn canonical_vi3() -> PwsSystem {
    canonical_with_c(2.0)
}

fn mirror_map(m: &SmoothMap2, negate: bool) -> SmoothMap2 {
    match m.as_poly() {
        Some(p) => {
            let q = p.mirrored_x();
            if negate { q.negated() } else { q }.into()
        }
        None => {
            let inner = m.clone();
            let s = if negate { -1.0 } else { 1.0 };
            SmoothMap2::closure(move |x, y, l| s * inner.value(-x, y, l))
        }
    }
}

/// The image under `x ↦ -x`: fields `(-X(-x, y), Y(-x, y))`.
pub fn mirrored(sys: &PwsSystem) -> PwsSystem {
    let f = |v: &VectorField| VectorField {
        x: mirror_map(&v.x, true),
        y: mirror_map(&v.y, false),
    };
    PwsSystem {
        z_plus: f(&sys.z_plus),
        z_minus: f(&sys.z_minus),
        h: mirror_map(&sys.h, false),
        domain: Domain {
            x: [-sys.domain.x[1], -sys.domain.x[0]],
            y: sys.domain.y,
        },
        lambda: sys.lambda,
    }
}

/// Both folds visible: `Z⁺ = (1, x)`, `Z⁻ = (1, -2x)`.
pub fn same_visibility() -> PwsSystem {
    system((c(1.0), x_times(1.0)), (c(1.0), x_times(-2.0)))
}

/// `det Z = x²` at the two-fold: `Z⁺ = (1, x)`, `Z⁻ = (-1, -x + x²)`.
pub fn non_generic_two_fold() -> PwsSystem {
    system(
        (c(1.0), x_times(1.0)),
        (c(-1.0), Poly2::from_terms(&[(1, 0, -1.0), (2, 0, 1.0)])),
    )
}

/// `det Z = x³` at the two-fold: `Z⁺ = (1, x)`, `Z⁻ = (-1, -x + x³)`.
pub fn cubic_two_fold() -> PwsSystem {
    system(
        (c(1.0), x_times(1.0)),
        (c(-1.0), Poly2::from_terms(&[(1, 0, -1.0), (3, 0, 1.0)])),
    )
}

/// One-sided tangency from above: `Z⁺ = (1, x)`, `Z⁻ = (-1, -1)`.
pub fn tangency_model() -> PwsSystem {
    system((c(1.0), x_times(1.0)), (c(-1.0), c(-1.0)))
}

/// Tangency with crossing on both sides: `Z⁺ = (1, x²)`, `Z⁻ = (1, 1)`.
pub fn crossing_adjacent() -> PwsSystem {
    system((c(1.0), Poly2::from_terms(&[(2, 0, 1.0)])), (c(1.0), c(1.0)))
}

/// Sliding field `X^sl = x - 1/2`: `Z± = (x - 1/2, ∓1)`.
pub fn pseudo_equilibrium_model() -> PwsSystem {
    let xs = Poly2::from_terms(&[(1, 0, 1.0), (0, 0, -0.5)]);
    system((xs.clone(), c(-1.0)), (xs, c(1.0)))
}

/// Coefficients of the upper field `Y⁺ = x + a x² + b x⁴ + e x⁶ + λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TunedCoefficients {
    pub p0: f64,
    pub a: f64,
    pub b: f64,
    pub e: f64,
}

/// Member of the tuned family together with its coefficients.
#[derive(Debug, Clone)]
pub struct TunedModel {
    pub coefficients: TunedCoefficients,
    pub system: PwsSystem,
}

/// The family member with the given coefficients, `Y⁻ = -2x`.
pub fn family_member(a: f64, b: f64, e: f64) -> PwsSystem {
    let yp = Poly2::from_terms(&[(1, 0, 1.0), (2, 0, a), (4, 0, b), (6, 0, e)]).with_lambda_term(0, 0, 1.0);
    system((c(1.0), yp), (c(-1.0), x_times(-2.0)))
}

/// `u = 1 + a x + b x³ + e x⁵` must stay in `(0, 2)` for sliding on both sides
/// with positive sliding speed.
fn admissible(a: f64, b: f64, e: f64, eta: f64) -> bool {
    (0..=200).all(|i| {
        let x = -eta + 2.0 * eta * i as f64 / 200.0;
        let u = 1.0 + a * x + b * x.powi(3) + e * x.powi(5);
        u > 0.05 && u < 1.95
    })
}

fn balance(reg: &Regularizer, p0: f64, a: f64, b: f64, e: f64) -> f64 {
    let s = family_member(a, b, e);
    sdi::sdi_split_sum(&s, reg, -p0, p0, 1e-14)
        .map(|r| r.value)
        .unwrap_or(f64::NAN)
}

fn scan_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize, ok: impl Fn(f64) -> bool) -> Result<f64> {
    let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let vs: Vec<f64> = xs.iter().map(|&x| if ok(x) { f(x) } else { f64::NAN }).collect();
    for i in roots::sign_changes(&vs) {
        return roots::brent_with_values(&f, xs[i], xs[i + 1], vs[i], vs[i + 1], 1e-15 * (1.0 + xs[i].abs()));
    }
    Err(Error::NoBracket(format!("no balanced member found in [{lo}, {hi}]")))
}

/// Balanced member with a simple zero: `e = 0` and `b` solves `I(0) = 0`.
///
/// The section sits at `y = -p₀²` so that the lower orbit through it meets
/// `Σ` at `±p₀`. Admissibility is checked on `[-1.4 p₀, 1.4 p₀]`.
pub fn tuned_simple(p0: f64, a: f64, reg: &Regularizer) -> Result<TunedModel> {
    if !(p0 > 0.0 && p0 < 0.7 && a < 0.0) {
        return Err(Error::InvalidInput("tuning needs 0 < p0 < 0.7 and a < 0".into()));
    }
    let scale = -a / (p0 * p0);
    let eta = 1.4 * p0;
    let b = scan_root(
        |b| balance(reg, p0, a, b, 0.0),
        0.5 * scale,
        3.0 * scale,
        50,
        |b| admissible(a, b, 0.0, eta),
    )?;
    Ok(TunedModel {
        coefficients: TunedCoefficients { p0, a, b, e: 0.0 },
        system: family_member(a, b, 0.0),
    })
}

/// Balanced member with a double zero.
///
/// The even factor is written as `e (z - z₁)(z - p₀²)` in `z = x²`, which
/// makes the integrand's even part vanish at `±p₀` and kills the first
/// derivative of `I`. The remaining unknown `z₁` is fixed by `I(0) = 0`.
pub fn tuned_double(p0: f64, a: f64, reg: &Regularizer) -> Result<TunedModel> {
    if !(p0 > 0.0 && p0 < 0.7 && a < 0.0) {
        return Err(Error::InvalidInput("tuning needs 0 < p0 < 0.7 and a < 0".into()));
    }
    let pp = p0 * p0;
    let eta = 1.4 * p0;
    let coeffs = |z1: f64| {
        let e = a / (z1 * pp);
        (-e * (z1 + pp), e)
    };
    let z1 = scan_root(
        |z1| {
            let (b, e) = coeffs(z1);
            balance(reg, p0, a, b, e)
        },
        0.05 * pp,
        0.95 * pp,
        60,
        |z1| {
            let (b, e) = coeffs(z1);
            admissible(a, b, e, eta)
        },
    )?;
    let (b, e) = coeffs(z1);
    Ok(TunedModel {
        coefficients: TunedCoefficients { p0, a, b, e },
        system: family_member(a, b, e),
    })
}

/// Default tuned member used by the canard analysis.
pub fn default_tuned_simple() -> Result<TunedModel> {
    tuned_simple(0.5, -0.3, &make_tanh_regularizer())
}

/// Default double-zero member.
pub fn default_tuned_double() -> Result<TunedModel> {
    tuned_double(0.5, -0.3, &make_tanh_regularizer())
}

/// Member used for the regularized simulations.
pub fn simulation_tuned_simple() -> Result<TunedModel> {
    tuned_simple(0.1, -1.0, &make_tanh_regularizer())
}

/// Schema tag of the model file format.
pub const SCHEMA: &str = "pws-model/1";

/// One monomial entry of a model file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub px: u32,
    pub py: u32,
    #[serde(default)]
    pub c: f64,
    #[serde(default, rename = "cLambda")]
    pub c_lambda: f64,
}

/// Polynomial components of one vector field.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub x: Vec<TermSpec>,
    pub y: Vec<TermSpec>,
}

/// Optional section and sliding-range data for the canard analysis.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CanardSpec {
    pub eta_minus: f64,
    pub eta_plus: f64,
    /// Anchor `y₀ < 0` of the section `{x = 0}`; the point of parameter `s`
    /// is `(0, y₀ + s)`.
    pub section_y0: f64,
    pub s_bar: f64,
}

/// Transition function shapes available under the name `"custom"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CustomShape {
    /// `φ(u) = 1 / (1 + e^{-u})`.
    Logistic,
    /// `φ(u) = (1 + u / √(1 + u²)) / 2`.
    Algebraic,
}

/// A model file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ModelFile {
    pub schema: String,
    #[serde(default)]
    pub name: String,
    #[serde(default = "default_reg")]
    pub regularizer: String,
    #[serde(default)]
    pub custom_shape: Option<CustomShape>,
    pub domain: Domain,
    #[serde(default)]
    pub lambda: f64,
    pub z_plus: FieldSpec,
    pub z_minus: FieldSpec,
    pub h: Vec<TermSpec>,
    #[serde(default)]
    pub canard: Option<CanardSpec>,
}

fn default_reg() -> String {
    "tanh".into()
}

fn to_poly(terms: &[TermSpec], what: &str) -> Result<Poly2> {
    Poly2::new(
        terms
            .iter()
            .map(|t| Monomial {
                px: t.px,
                py: t.py,
                c: t.c,
                c_lambda: t.c_lambda,
            })
            .collect(),
    )
    .map_err(|e| Error::Model(format!("{what}: {e}")))
}

fn from_poly(p: &Poly2) -> Vec<TermSpec> {
    p.terms
        .iter()
        .map(|t| TermSpec {
            px: t.px,
            py: t.py,
            c: t.c,
            c_lambda: t.c_lambda,
        })
        .collect()
}

impl ModelFile {
    /// Parses JSON text. Syntax errors carry their line and column.
    pub fn parse(text: &str) -> Result<Self> {
        let m: ModelFile = serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        if m.schema != SCHEMA {
            return Err(Error::Model(format!(
                "unsupported schema \"{}\" (expected \"{SCHEMA}\")",
                m.schema
            )));
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Model(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_system(&self) -> Result<PwsSystem> {
        let domain = Domain::new(self.domain.x, self.domain.y).map_err(|e| Error::Model(e.to_string()))?;
        PwsSystem::new(
            VectorField::new(to_poly(&self.z_plus.x, "zPlus.x")?, to_poly(&self.z_plus.y, "zPlus.y")?),
            VectorField::new(to_poly(&self.z_minus.x, "zMinus.x")?, to_poly(&self.z_minus.y, "zMinus.y")?),
            to_poly(&self.h, "h")?.into(),
            domain,
            self.lambda,
        )
    }

    pub fn to_regularizer(&self) -> Result<Regularizer> {
        regularizer_by_name(&self.regularizer, self.custom_shape)
    }

    /// Serialises a system whose maps are all polynomials.
    pub fn from_system(name: &str, sys: &PwsSystem, canard: Option<CanardSpec>) -> Result<Self> {
        let p = |m: &SmoothMap2| {
            m.as_poly()
                .map(from_poly)
                .ok_or_else(|| Error::InvalidInput("only polynomial systems can be written".into()))
        };
        Ok(ModelFile {
            schema: SCHEMA.into(),
            name: name.into(),
            regularizer: "tanh".into(),
            custom_shape: None,
            domain: sys.domain,
            lambda: sys.lambda,
            z_plus: FieldSpec {
                x: p(&sys.z_plus.x)?,
                y: p(&sys.z_plus.y)?,
            },
            z_minus: FieldSpec {
                x: p(&sys.z_minus.x)?,
                y: p(&sys.z_minus.y)?,
            },
            h: p(&sys.h)?,
            canard,
        })
    }
}

/// Resolves `"tanh"`, `"arctan"` or `"custom"` (with a shape).
pub fn regularizer_by_name(name: &str, shape: Option<CustomShape>) -> Result<Regularizer> {
    match name {
        "custom" => match shape {
            Some(CustomShape::Logistic) => Ok(Regularizer::custom(
                "custom-logistic",
                |u| 1.0 / (1.0 + (-u).exp()),
                |u| {
                    let e = (-u.abs()).exp();
                    e / ((1.0 + e) * (1.0 + e))
                },
            )),
            Some(CustomShape::Algebraic) => Ok(Regularizer::custom(
                "custom-algebraic",
                |u| 0.5 * (1.0 + u / (1.0 + u * u).sqrt()),
                |u| 0.5 / (1.0 + u * u).powf(1.5),
            )),
            None => Err(Error::Model("regularizer \"custom\" needs \"customShape\"".into())),
        },
        other => Regularizer::by_name(other)
            .ok_or_else(|| Error::Model(format!("unknown regularizer \"{other}\""))),
    }
}
