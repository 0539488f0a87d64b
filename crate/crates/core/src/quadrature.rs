//! Adaptive Gauss-Kronrod quadrature and polynomial extrapolation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Kronrod nodes on `[-1, 1]` (non-negative half, descending).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];

/// Kronrod weights matching [`XGK`].
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Settings for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-10,
            max_subdivisions: 10_000,
        }
    }
}

/// Outcome of an adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub converged: bool,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = r * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    let value = k * r;
    let error = ((k - g) * r).abs();
    Panel { a, b, value, error }
}

/// Integrates `f` over `[a, b]` with adaptive G7/K15 bisection.
///
/// The panel with the largest error estimate is split until the summed
/// estimate drops below `abs_tol`. The final sum runs over panels ordered by
/// their left endpoint, so the result does not depend on the refinement
/// history. Reversed limits give the negated integral.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            abs_error: 0.0,
            converged: true,
            subdivisions: 0,
        };
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod(&mut f, a, b);
    let mut total_err = first.error;
    heap.push(first);
    let mut subdivisions = 1;
    while total_err > opts.abs_tol && subdivisions < opts.max_subdivisions {
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        if mid == worst.a || mid == worst.b {
            heap.push(worst);
            break;
        }
        let left = kronrod(&mut f, worst.a, mid);
        let right = kronrod(&mut f, mid, worst.b);
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
        if !total_err.is_finite() {
            break;
        }
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| {
        if a < b {
            p.a.total_cmp(&q.a)
        } else {
            q.a.total_cmp(&p.a)
        }
    });
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let abs_error: f64 = panels.iter().map(|p| p.error).sum();
    QuadResult {
        value,
        abs_error,
        converged: abs_error <= opts.abs_tol && value.is_finite(),
        subdivisions,
    }
}

/// Neville evaluation at `x = 0` of the interpolating polynomial through
/// `(xs[i], ys[i])`.
pub fn neville_at_zero(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len();
    let mut p = ys.to_vec();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i]);
        }
    }
    p[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_high_degree_polynomials() {
        // K15 is exact to degree 22, G7 to degree 13.
        let k = kronrod(&mut |x: f64| x.powi(22) + x.powi(3), -1.0, 1.0);
        assert!((k.value - 2.0 / 23.0).abs() < 1e-15);
        let r = integrate(|x: f64| x.powi(9) - 2.0 * x * x, 0.0, 1.0, QuadOptions::default());
        assert!((r.value - (0.1 - 2.0 / 3.0)).abs() < 1e-15);
        assert_eq!(r.subdivisions, 1);
        let p = kronrod(&mut |x: f64| x.powi(12), -1.0, 1.0);
        assert!(p.error < 1e-15);
    }

    #[test]
    fn weights_are_normalised() {
        let k = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        let g = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn handles_endpoint_singularity() {
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, QuadOptions::default());
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn reversed_limits_negate() {
        let o = QuadOptions::default();
        let f = |x: f64| (3.0 * x).cos() * x.exp();
        let p = integrate(f, 0.2, 1.7, o);
        let q = integrate(f, 1.7, 0.2, o);
        assert_eq!(p.value, -q.value);
    }

    #[test]
    fn negated_integrand_gives_negated_result() {
        let o = QuadOptions::default();
        let f = |x: f64| 1.0 / (1.0 + 25.0 * x * x);
        let p = integrate(f, -1.0, 1.0, o);
        let q = integrate(|x| -f(x), -1.0, 1.0, o);
        assert_eq!(p.value, -q.value);
        assert_eq!(p.subdivisions, q.subdivisions);
    }

    #[test]
    fn neville_extrapolates_polynomials() {
        let xs = [0.4, 0.2, 0.1, 0.05];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 - x + 2.0 * x * x * x).collect();
        assert!((neville_at_zero(&xs, &ys) - 3.0).abs() < 1e-13);
    }
}
