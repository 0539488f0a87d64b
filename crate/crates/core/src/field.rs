//! Smooth scalar maps `f(x, y, λ)` and planar vector fields built from them.
//!
//! Two representations live behind [`SmoothMap2`]:
//!
//! * [`Poly2`], bivariate polynomials of degree at most [`MAX_DEGREE`] whose
//!   coefficients are affine in λ. Every partial derivative is exact.
//! * Closed-form callables. Partials fall back to fourth-order central
//!   differences, with the step chosen per derivative order.
//!
//! Composite maps produced by coordinate changes implement [`ScalarField`]
//! directly so they can supply analytic first derivatives through the chain
//! rule (see [`crate::pws::transform`]).

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest total degree accepted for polynomial maps.
pub const MAX_DEGREE: u32 = 6;

/// Multi-index of a partial derivative: orders in `x`, `y` and `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Partial {
    pub dx: u8,
    pub dy: u8,
    pub dl: u8,
}

impl Partial {
    pub const VALUE: Partial = Partial::new(0, 0, 0);
    pub const X: Partial = Partial::new(1, 0, 0);
    pub const Y: Partial = Partial::new(0, 1, 0);
    pub const LAMBDA: Partial = Partial::new(0, 0, 1);

    pub const fn new(dx: u8, dy: u8, dl: u8) -> Self {
        Partial { dx, dy, dl }
    }

    pub fn order(self) -> u8 {
        self.dx + self.dy + self.dl
    }

    /// Adds one derivative in the spatial direction `axis` (0 = x, 1 = y).
    pub fn bump(self, axis: usize) -> Self {
        match axis {
            0 => Partial::new(self.dx + 1, self.dy, self.dl),
            _ => Partial::new(self.dx, self.dy + 1, self.dl),
        }
    }

    fn within_limits(self) -> bool {
        self.dx + self.dy <= 3 && self.dl <= 1
    }
}

/// A smooth scalar function of `(x, y, λ)`.
pub trait ScalarField: Send + Sync {
    fn value(&self, x: f64, y: f64, lambda: f64) -> f64;

    /// Partial derivative of order at most 3 in `(x, y)` and 1 in `λ`.
    fn partial(&self, d: Partial, x: f64, y: f64, lambda: f64) -> f64 {
        finite_difference(&|a, b, c| self.value(a, b, c), d, x, y, lambda)
    }

    fn as_poly(&self) -> Option<&Poly2> {
        None
    }

    fn describe(&self) -> String {
        "closure".to_string()
    }
}

/// One monomial `(c + c_λ λ) x^px y^py`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub px: u32,
    pub py: u32,
    pub c: f64,
    #[serde(default)]
    pub c_lambda: f64,
}

/// Bivariate polynomial with coefficients affine in λ.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Poly2 {
    pub terms: Vec<Monomial>,
}

impl Poly2 {
    pub fn new(terms: Vec<Monomial>) -> Result<Self> {
        for t in &terms {
            if t.px + t.py > MAX_DEGREE {
                return Err(Error::InvalidInput(format!(
                    "monomial x^{} y^{} exceeds degree {MAX_DEGREE}",
                    t.px, t.py
                )));
            }
            if !t.c.is_finite() || !t.c_lambda.is_finite() {
                return Err(Error::InvalidInput("non-finite coefficient".into()));
            }
        }
        Ok(Poly2 { terms })
    }

    /// Builds a λ-independent polynomial from `(px, py, c)` triples.
    pub fn from_terms(terms: &[(u32, u32, f64)]) -> Self {
        Poly2 {
            terms: terms
                .iter()
                .map(|&(px, py, c)| Monomial {
                    px,
                    py,
                    c,
                    c_lambda: 0.0,
                })
                .collect(),
        }
    }

    pub fn constant(c: f64) -> Self {
        Poly2::from_terms(&[(0, 0, c)])
    }

    pub fn with_lambda_term(mut self, px: u32, py: u32, c_lambda: f64) -> Self {
        self.terms.push(Monomial {
            px,
            py,
            c: 0.0,
            c_lambda,
        });
        self
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.px + t.py).max().unwrap_or(0)
    }

    pub fn negated(&self) -> Self {
        Poly2 {
            terms: self
                .terms
                .iter()
                .map(|t| Monomial {
                    c: -t.c,
                    c_lambda: -t.c_lambda,
                    ..*t
                })
                .collect(),
        }
    }

    /// Substitutes `x -> -x`.
    pub fn mirrored_x(&self) -> Self {
        Poly2 {
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let s = if t.px % 2 == 1 { -1.0 } else { 1.0 };
                    Monomial {
                        c: s * t.c,
                        c_lambda: s * t.c_lambda,
                        ..*t
                    }
                })
                .collect(),
        }
    }

    /// True when the polynomial is exactly `y`.
    pub fn is_identity_y(&self) -> bool {
        let mut linear_y = 0.0;
        for t in &self.terms {
            if t.c_lambda != 0.0 {
                return false;
            }
            if (t.px, t.py) == (0, 1) {
                linear_y += t.c;
            } else if t.c != 0.0 {
                return false;
            }
        }
        linear_y == 1.0
    }

    fn eval_partial(&self, d: Partial, x: f64, y: f64, lambda: f64) -> f64 {
        let mut acc = 0.0;
        for t in &self.terms {
            let (dx, dy) = (d.dx as u32, d.dy as u32);
            if t.px < dx || t.py < dy {
                continue;
            }
            let coeff = match d.dl {
                0 => t.c + t.c_lambda * lambda,
                1 => t.c_lambda,
                _ => 0.0,
            };
            if coeff == 0.0 {
                continue;
            }
            let fx = falling_factorial(t.px, dx);
            let fy = falling_factorial(t.py, dy);
            acc += coeff * fx * fy * powi(x, t.px - dx) * powi(y, t.py - dy);
        }
        acc
    }
}

fn falling_factorial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64)
}

fn powi(v: f64, n: u32) -> f64 {
    v.powi(n as i32)
}

impl ScalarField for Poly2 {
    fn value(&self, x: f64, y: f64, lambda: f64) -> f64 {
        self.eval_partial(Partial::VALUE, x, y, lambda)
    }

    fn partial(&self, d: Partial, x: f64, y: f64, lambda: f64) -> f64 {
        self.eval_partial(d, x, y, lambda)
    }

    fn as_poly(&self) -> Option<&Poly2> {
        Some(self)
    }

    fn describe(&self) -> String {
        let mut parts = Vec::new();
        for t in &self.terms {
            parts.push(format!("({}+{}λ)x^{}y^{}", t.c, t.c_lambda, t.px, t.py));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

struct FnField<F>(F);

impl<F> ScalarField for FnField<F>
where
    F: Fn(f64, f64, f64) -> f64 + Send + Sync,
{
    fn value(&self, x: f64, y: f64, lambda: f64) -> f64 {
        (self.0)(x, y, lambda)
    }
}

struct Negated(SmoothMap2);

impl ScalarField for Negated {
    fn value(&self, x: f64, y: f64, lambda: f64) -> f64 {
        -self.0.value(x, y, lambda)
    }
    fn partial(&self, d: Partial, x: f64, y: f64, lambda: f64) -> f64 {
        -self.0.partial(d, x, y, lambda)
    }
    fn describe(&self) -> String {
        format!("-({})", self.0.describe())
    }
}

/// Product `g · f` of a λ-independent positive multiplier and a map.
struct Product {
    g: SmoothMap2,
    f: SmoothMap2,
}

impl ScalarField for Product {
    fn value(&self, x: f64, y: f64, lambda: f64) -> f64 {
        self.g.value(x, y, lambda) * self.f.value(x, y, lambda)
    }
    fn partial(&self, d: Partial, x: f64, y: f64, lambda: f64) -> f64 {
        // Leibniz rule over the multi-index.
        let mut acc = 0.0;
        for ix in 0..=d.dx {
            for iy in 0..=d.dy {
                for il in 0..=d.dl {
                    let w = binom(d.dx, ix) * binom(d.dy, iy) * binom(d.dl, il);
                    let a = self.g.partial(Partial::new(ix, iy, il), x, y, lambda);
                    if a == 0.0 {
                        continue;
                    }
                    let b = self.f.partial(
                        Partial::new(d.dx - ix, d.dy - iy, d.dl - il),
                        x,
                        y,
                        lambda,
                    );
                    acc += w * a * b;
                }
            }
        }
        acc
    }
}

fn binom(n: u8, k: u8) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Shared handle to a smooth scalar map.
#[derive(Clone)]
pub struct SmoothMap2(Arc<dyn ScalarField>);

impl fmt::Debug for SmoothMap2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothMap2({})", self.0.describe())
    }
}

impl From<Poly2> for SmoothMap2 {
    fn from(p: Poly2) -> Self {
        SmoothMap2(Arc::new(p))
    }
}

impl SmoothMap2 {
    pub fn poly(p: Poly2) -> Self {
        p.into()
    }

    pub fn constant(c: f64) -> Self {
        Poly2::constant(c).into()
    }

    /// Wraps a closed-form callable; partials use finite differences.
    pub fn closure<F>(f: F) -> Self
    where
        F: Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
    {
        SmoothMap2(Arc::new(FnField(f)))
    }

    pub fn from_field<S: ScalarField + 'static>(s: S) -> Self {
        SmoothMap2(Arc::new(s))
    }

    pub fn value(&self, x: f64, y: f64, lambda: f64) -> f64 {
        self.0.value(x, y, lambda)
    }

    pub fn partial(&self, d: Partial, x: f64, y: f64, lambda: f64) -> f64 {
        debug_assert!(d.within_limits(), "partial {d:?} exceeds supported order");
        if d == Partial::VALUE {
            return self.0.value(x, y, lambda);
        }
        self.0.partial(d, x, y, lambda)
    }

    pub fn gradient(&self, x: f64, y: f64, lambda: f64) -> [f64; 2] {
        [
            self.partial(Partial::X, x, y, lambda),
            self.partial(Partial::Y, x, y, lambda),
        ]
    }

    pub fn as_poly(&self) -> Option<&Poly2> {
        self.0.as_poly()
    }

    pub fn describe(&self) -> String {
        self.0.describe()
    }

    /// `-f`, exact under floating point for both representations.
    pub fn negated(&self) -> Self {
        match self.as_poly() {
            Some(p) => p.negated().into(),
            None => SmoothMap2(Arc::new(Negated(self.clone()))),
        }
    }

    pub fn times(&self, g: &SmoothMap2) -> Self {
        SmoothMap2(Arc::new(Product {
            g: g.clone(),
            f: self.clone(),
        }))
    }
}

/// Planar vector field `Z = (X, Y)`.
#[derive(Debug, Clone)]
pub struct VectorField {
    pub x: SmoothMap2,
    pub y: SmoothMap2,
}

impl VectorField {
    pub fn new(x: impl Into<SmoothMap2>, y: impl Into<SmoothMap2>) -> Self {
        VectorField {
            x: x.into(),
            y: y.into(),
        }
    }

    pub fn eval(&self, p: [f64; 2], lambda: f64) -> [f64; 2] {
        [
            self.x.value(p[0], p[1], lambda),
            self.y.value(p[0], p[1], lambda),
        ]
    }

    pub fn component(&self, i: usize) -> &SmoothMap2 {
        if i == 0 {
            &self.x
        } else {
            &self.y
        }
    }

    pub fn negated(&self) -> Self {
        VectorField {
            x: self.x.negated(),
            y: self.y.negated(),
        }
    }

    pub fn scaled(&self, g: &SmoothMap2) -> Self {
        VectorField {
            x: self.x.times(g),
            y: self.y.times(g),
        }
    }
}

/// Fourth-order central difference for the multi-index `d`.
///
/// Mixed partials apply the one-dimensional stencil direction by direction.
/// Steps grow with the derivative order to balance truncation against
/// cancellation error.
pub fn finite_difference(
    f: &dyn Fn(f64, f64, f64) -> f64,
    d: Partial,
    x: f64,
    y: f64,
    lambda: f64,
) -> f64 {
    let step = match d.order() {
        0 => return f(x, y, lambda),
        1 => 1e-3,
        2 => 3e-3,
        _ => 1e-2,
    };
    if d.dx > 0 {
        let rest = Partial::new(d.dx - 1, d.dy, d.dl);
        let h = step * (1.0 + x.abs());
        return stencil(|t| finite_difference(f, rest, t, y, lambda), x, h);
    }
    if d.dy > 0 {
        let rest = Partial::new(d.dx, d.dy - 1, d.dl);
        let h = step * (1.0 + y.abs());
        return stencil(|t| finite_difference(f, rest, x, t, lambda), y, h);
    }
    let rest = Partial::new(d.dx, d.dy, d.dl - 1);
    let h = step * (1.0 + lambda.abs());
    stencil(|t| finite_difference(f, rest, x, y, t), lambda, h)
}

fn stencil(g: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (g(t - 2.0 * h) - 8.0 * g(t - h) + 8.0 * g(t + h) - g(t + 2.0 * h)) / (12.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_poly() -> Poly2 {
        Poly2::new(vec![
            Monomial { px: 0, py: 0, c: 0.3, c_lambda: 1.0 },
            Monomial { px: 1, py: 0, c: -1.5, c_lambda: 0.0 },
            Monomial { px: 2, py: 1, c: 0.7, c_lambda: -0.2 },
            Monomial { px: 3, py: 2, c: 0.25, c_lambda: 0.0 },
            Monomial { px: 0, py: 4, c: -0.1, c_lambda: 0.0 },
            Monomial { px: 6, py: 0, c: 0.05, c_lambda: 0.0 },
        ])
        .unwrap()
    }

    #[test]
    fn polynomial_partials_match_finite_differences() {
        let p = sample_poly();
        let pc = p.clone();
        let closure = SmoothMap2::closure(move |x, y, l| pc.value(x, y, l));
        let exact = SmoothMap2::poly(p);
        let orders = [
            Partial::X,
            Partial::Y,
            Partial::LAMBDA,
            Partial::new(2, 0, 0),
            Partial::new(1, 1, 0),
            Partial::new(0, 2, 0),
            Partial::new(1, 0, 1),
            Partial::new(3, 0, 0),
            Partial::new(1, 2, 0),
        ];
        let grid = [-0.8, -0.3, 0.0, 0.45, 0.9];
        for &x in &grid {
            for &y in &grid {
                for d in orders {
                    let a = exact.partial(d, x, y, 0.2);
                    let n = closure.partial(d, x, y, 0.2);
                    let tol = match d.order() {
                        1 => 1e-9,
                        2 => 1e-8,
                        _ => 1e-5,
                    };
                    assert!(
                        (a - n).abs() < tol * (1.0 + a.abs()),
                        "{d:?} at ({x},{y}): {a} vs {n}"
                    );
                }
            }
        }
    }

    #[test]
    fn degree_limit_is_enforced() {
        let bad = Poly2::new(vec![Monomial { px: 4, py: 3, c: 1.0, c_lambda: 0.0 }]);
        assert!(bad.is_err());
    }

    #[test]
    fn negation_is_exact() {
        let p = SmoothMap2::poly(sample_poly());
        let n = p.negated();
        for &(x, y) in &[(0.1, 0.2), (-0.77, 0.31), (0.5, -0.9)] {
            assert_eq!(n.value(x, y, 0.4), -p.value(x, y, 0.4));
        }
    }

    #[test]
    fn product_rule_partials() {
        let g = SmoothMap2::poly(Poly2::from_terms(&[(0, 0, 2.0), (1, 0, 0.5)]));
        let f = SmoothMap2::poly(Poly2::from_terms(&[(2, 0, 1.0), (1, 1, 3.0)]));
        let gf = f.times(&g);
        // (2 + x/2)(x^2 + 3xy); d/dx at (1, 2): 0.5 * 7 + 2.5 * 8 = 23.5
        assert!((gf.partial(Partial::X, 1.0, 2.0, 0.0) - 23.5).abs() < 1e-12);
    }

    #[test]
    fn identity_y_detection() {
        assert!(Poly2::from_terms(&[(0, 1, 1.0)]).is_identity_y());
        assert!(!Poly2::from_terms(&[(0, 1, 1.0), (2, 0, 0.1)]).is_identity_y());
        assert!(!Poly2::from_terms(&[(0, 1, 2.0)]).is_identity_y());
    }
}
