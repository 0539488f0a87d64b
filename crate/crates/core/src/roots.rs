//! Scalar root finding and bounded maximisation.

use crate::error::{Error, Result};

/// Brent's method on `[a, b]`, which must bracket a sign change.
///
/// Returns once the bracket is narrower than `xtol` (plus a few ulps) or an
/// exact zero is hit.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    brent_with_values(f, a, b, fa, fb, xtol)
}

/// Like [`brent`] when `f(a)` and `f(b)` are already known.
pub fn brent_with_values<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    xtol: f64,
) -> Result<f64> {
    if !fa.is_finite() || !fb.is_finite() {
        return Err(Error::NoBracket(format!(
            "non-finite value at the bracket ends [{a}, {b}]"
        )));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket(format!(
            "f({a}) = {fa:e} and f({b}) = {fb:e} have the same sign"
        )));
    }
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if !fb.is_finite() {
            return Err(Error::NoBracket(format!("non-finite value at {b}")));
        }
    }
    Err(Error::NotConverged {
        what: "Brent root search",
        estimate: (c - b).abs(),
        tolerance: xtol,
    })
}

/// Scans `grid` for sign changes of `values` and returns the index pairs.
pub fn sign_changes(values: &[f64]) -> Vec<usize> {
    values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0].is_finite() && w[1].is_finite() && w[0] * w[1] < 0.0)
        .map(|(i, _)| i)
        .collect()
}

/// Finds all roots of `f` on `[a, b]` by sampling `n` subintervals and
/// refining every sign change.
pub fn all_roots<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize, xtol: f64) -> Result<Vec<f64>> {
    let xs: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for (i, &v) in vs.iter().enumerate() {
        if v == 0.0 && (roots.last() != Some(&xs[i])) {
            roots.push(xs[i]);
        }
    }
    for i in sign_changes(&vs) {
        roots.push(brent_with_values(&f, xs[i], xs[i + 1], vs[i], vs[i + 1], xtol)?);
    }
    roots.sort_by(|p, q| p.total_cmp(q));
    Ok(roots)
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
///
/// Returns `(argmax, max)`.
pub fn golden_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > xtol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn finds_cubic_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-13);
    }

    #[test]
    fn rejects_missing_bracket() {
        assert!(matches!(
            brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(Error::NoBracket(_))
        ));
    }

    #[test]
    fn collects_all_roots() {
        let r = all_roots(|x: f64| (3.0 * x).sin(), -2.0, 2.0, 100, 1e-13).unwrap();
        assert_eq!(r.len(), 3);
        assert!((r[0] + std::f64::consts::PI / 3.0).abs() < 1e-12);
        assert!(r[1].abs() < 1e-12);
    }

    #[test]
    fn golden_finds_peak() {
        let (x, v) = golden_max(|x| -(x - 0.3) * (x - 0.3) + 1.0, 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
        assert!((v - 1.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn brent_recovers_linear_roots(r in -10.0f64..10.0, k in 0.1f64..5.0) {
            let x = brent(|x| k * (x - r), -11.0, 11.0, 1e-13).unwrap();
            prop_assert!((x - r).abs() < 1e-11);
        }
    }
}
