//! Minkowski (box) dimension of entry-exit sequences and planar curves.
//!
//! For a sequence accumulating at 0 the `δ`-neighbourhood measure behaves
//! like `|U_δ| ~ δ^(1 - d)`. Finite truncations lose the part of the
//! neighbourhood swept by the omitted tail, so by default the estimator
//! adds the interval between 0 and the smallest term, which lies in the
//! closure of the full orbit.
//!
//! Geometric sequences have `|U_δ| ~ δ log(1/δ)`, which a power-law fit
//! reads as a small positive exponent. Both models are fitted and the one
//! with the smaller residual decides: the logarithmic law means `d = 0` for
//! sequences and `d = 1` for curves.

use std::collections::HashSet;
use std::hash::{BuildHasherDefault, Hasher};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Which scaling law explained the data best.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum ScalingModel {
    PowerLaw,
    LogLaw,
}

/// A fitted dimension with its diagnostics.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DimensionEstimate {
    pub value: f64,
    /// Slope of the power-law fit in log-log coordinates.
    pub fit_slope: f64,
    /// Largest residual of the power-law fit.
    pub fit_residual: f64,
    /// Largest relative residual of the logarithmic-law fit.
    pub log_law_residual: f64,
    pub model: ScalingModel,
    pub delta_range: (f64, f64),
    pub point_count: usize,
    /// Dimension implied by a tail fit `s_n ≈ C n^-α` (sequences only).
    pub tail_exponent_dimension: Option<f64>,
    /// `max / min` of `|U_δ| / δ^(N - d)` over the fit range.
    pub content_ratio_spread: f64,
    /// The `(δ, measure or count)` samples used in the fit.
    pub samples: Vec<(f64, f64)>,
}

/// Measure of the union of `[p - δ, p + δ]` over the points.
pub fn neighborhood_measure_1d(points: &[f64], delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::InvalidInput(format!("δ = {delta} must be positive")));
    }
    if points.is_empty() {
        return Ok(0.0);
    }
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.total_cmp(b));
    Ok(measure_sorted(&p, delta))
}

fn measure_sorted(p: &[f64], delta: f64) -> f64 {
    let two = 2.0 * delta;
    two + p.windows(2).map(|w| (w[1] - w[0]).min(two)).sum::<f64>()
}

/// Options for [`dim_sequence_with`].
#[derive(Debug, Clone, Copy)]
pub struct SequenceOptions {
    pub min_points: usize,
    pub deltas: usize,
    /// `δ_min` as a fraction of the smallest gap.
    pub delta_min_factor: f64,
    /// `δ_max` as a fraction of the span.
    pub delta_max_factor: f64,
    pub tail_completion: bool,
}

impl Default for SequenceOptions {
    fn default() -> Self {
        SequenceOptions {
            min_points: 16,
            deltas: 40,
            delta_min_factor: 0.5,
            delta_max_factor: 0.1,
            tail_completion: true,
        }
    }
}

struct Fit {
    slope: f64,
    intercept: f64,
    residual: f64,
}

fn linear_fit(x: &[f64], y: &[f64]) -> Fit {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = x
        .iter()
        .zip(y)
        .map(|(a, b)| (intercept + slope * a - b).abs())
        .fold(0.0, f64::max);
    Fit {
        slope,
        intercept,
        residual,
    }
}

/// Least-squares line through `(x, y)`: returns `(slope, max residual)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let f = linear_fit(x, y);
    (f.slope, f.residual)
}

/// Fits `value = a + b ln(1/δ)` and returns the largest residual in log
/// space, or infinity when the fitted line is not positive.
fn log_law_residual(deltas: &[f64], values: &[f64]) -> f64 {
    let l: Vec<f64> = deltas.iter().map(|d| -d.ln()).collect();
    let f = linear_fit(&l, values);
    let mut worst = 0.0f64;
    for (li, v) in l.iter().zip(values) {
        let fit = f.intercept + f.slope * li;
        if !(fit > 0.0) || f.slope < 0.0 {
            return f64::INFINITY;
        }
        worst = worst.max((fit.ln() - v.ln()).abs());
    }
    worst
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Dimension of a positive monotone sequence with default options.
pub fn dim_sequence(points: &[f64]) -> Result<DimensionEstimate> {
    dim_sequence_with(points, SequenceOptions::default())
}

/// Dimension of a positive monotone sequence accumulating at 0.
pub fn dim_sequence_with(points: &[f64], opts: SequenceOptions) -> Result<DimensionEstimate> {
    if points.len() < opts.min_points {
        return Err(Error::InvalidInput(format!(
            "{} points given, at least {} needed",
            points.len(),
            opts.min_points
        )));
    }
    if points.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
        return Err(Error::InvalidInput("sequence terms must be positive and finite".into()));
    }
    let increasing = points.windows(2).all(|w| w[1] > w[0]);
    let decreasing = points.windows(2).all(|w| w[1] < w[0]);
    if !increasing && !decreasing {
        return Err(Error::InvalidInput("sequence is not strictly monotone".into()));
    }
    let mut p = points.to_vec();
    if decreasing {
        p.reverse();
    }
    let min_gap = p.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let span = p[p.len() - 1] - p[0];
    let dmin = opts.delta_min_factor * min_gap;
    let dmax = opts.delta_max_factor * span;
    if !(dmin < dmax) {
        return Err(Error::InvalidInput(format!(
            "empty δ range [{dmin:e}, {dmax:e}]; the sequence is too short"
        )));
    }
    let deltas = log_space(dmin, dmax, opts.deltas);
    let tail = if opts.tail_completion { p[0] } else { 0.0 };
    let measures: Vec<f64> = deltas.iter().map(|&d| measure_sorted(&p, d) + tail).collect();
    let lx: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
    let ly: Vec<f64> = measures.iter().map(|m| m.ln()).collect();
    let power = linear_fit(&lx, &ly);
    let counts: Vec<f64> = measures.iter().zip(&deltas).map(|(m, d)| m / (2.0 * d)).collect();
    let log_res = log_law_residual(&deltas, &counts);
    let (model, value) = if log_res < power.residual {
        (ScalingModel::LogLaw, 0.0)
    } else {
        (ScalingModel::PowerLaw, (1.0 - power.slope).clamp(0.0, 1.0))
    };
    let spread = content_spread(&deltas, &measures, 1.0 - value);
    Ok(DimensionEstimate {
        value,
        fit_slope: power.slope,
        fit_residual: power.residual,
        log_law_residual: log_res,
        model,
        delta_range: (dmin, dmax),
        point_count: p.len(),
        tail_exponent_dimension: tail_dimension(points, decreasing),
        content_ratio_spread: spread,
        samples: deltas.into_iter().zip(measures).collect(),
    })
}

fn content_spread(deltas: &[f64], values: &[f64], exponent: f64) -> f64 {
    let r: Vec<f64> = deltas.iter().zip(values).map(|(d, v)| v / d.powf(exponent)).collect();
    let hi = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = r.iter().cloned().fold(f64::INFINITY, f64::min);
    hi / lo
}

/// Fits `ln s_n` against `ln n` over the last 90% of the terms.
fn tail_dimension(points: &[f64], decreasing: bool) -> Option<f64> {
    let seq: Vec<f64> = if decreasing {
        points.to_vec()
    } else {
        points.iter().rev().cloned().collect()
    };
    let start = (seq.len() / 10).max(1);
    let (x, y): (Vec<f64>, Vec<f64>) = seq
        .iter()
        .enumerate()
        .skip(start)
        .map(|(i, s)| (((i + 1) as f64).ln(), s.ln()))
        .unzip();
    if x.len() < 3 {
        return None;
    }
    let alpha = -linear_fit(&x, &y).slope;
    (alpha > 0.0).then(|| 1.0 / (1.0 + alpha))
}

/// Multiplicity of a zero, possibly infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Multiplicity {
    Finite(u32),
    Infinite,
}

/// `d = 1 - 1/m`, and `d = 1` for an infinite multiplicity.
pub fn dim_from_multiplicity(m: Multiplicity) -> Result<f64> {
    match m {
        Multiplicity::Finite(0) => Err(Error::InvalidInput("multiplicity must be at least 1".into())),
        Multiplicity::Finite(k) => Ok((k - 1) as f64 / k as f64),
        Multiplicity::Infinite => Ok(1.0),
    }
}

/// Result of inverting `d = 1 - 1/m`.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MultiplicityFromDim {
    pub raw: f64,
    pub m: Option<u32>,
    pub snapped: bool,
    pub warning: Option<String>,
}

/// `m = 1/(1 - d)`, snapped to the nearest integer when within 0.1.
pub fn multiplicity_from_dim(d: f64) -> Result<MultiplicityFromDim> {
    if !(0.0..1.0).contains(&d) {
        return Err(Error::InvalidInput(format!("dimension {d} is outside [0, 1)")));
    }
    let raw = 1.0 / (1.0 - d);
    let nearest = raw.round();
    let off = (raw - nearest).abs();
    if off <= 0.1 {
        let warning = (off > 1e-9).then(|| format!("1/(1 - d) = {raw:.6} snapped to {nearest}"));
        Ok(MultiplicityFromDim {
            raw,
            m: Some(nearest as u32),
            snapped: warning.is_some(),
            warning,
        })
    } else {
        Ok(MultiplicityFromDim {
            raw,
            m: None,
            snapped: false,
            warning: Some(format!("1/(1 - d) = {raw:.6} is not close to an integer")),
        })
    }
}

/// Options for [`box_dimension_2d`].
#[derive(Debug, Clone)]
pub struct BoxOptions {
    /// Dyadic levels `k`; the cell size is `extent · 2^-k`.
    pub levels: Vec<u32>,
    pub min_points: usize,
    /// Choose between power and logarithmic scaling as for sequences.
    pub model_selection: bool,
    /// Only count cells met inside this box, given as `(lower, upper)`
    /// corners.
    pub window: Option<([f64; 2], [f64; 2])>,
}

impl BoxOptions {
    pub fn levels(levels: impl IntoIterator<Item = u32>) -> Self {
        BoxOptions {
            levels: levels.into_iter().collect(),
            min_points: 1000,
            model_selection: true,
            window: None,
        }
    }

    pub fn with_window(mut self, lower: [f64; 2], upper: [f64; 2]) -> Self {
        self.window = Some((lower, upper));
        self
    }
}

/// Multiplicative hash for packed cell indices.
#[derive(Default)]
struct CellHasher(u64);

impl Hasher for CellHasher {
    fn finish(&self) -> u64 {
        self.0
    }
    fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 = (self.0.rotate_left(8) ^ *b as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        }
    }
    fn write_u64(&mut self, v: u64) {
        self.0 = (v ^ (v >> 29)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    }
}

fn inside(p: [f64; 2], window: Option<([f64; 2], [f64; 2])>) -> bool {
    match window {
        Some((lo, hi)) => p[0] >= lo[0] && p[0] <= hi[0] && p[1] >= lo[1] && p[1] <= hi[1],
        None => true,
    }
}

/// Number of grid cells of size `delta` met by the polyline (inside the
/// window, if any), anchored at `origin`.
pub fn occupied_cells(
    points: &[[f64; 2]],
    origin: [f64; 2],
    delta: f64,
    window: Option<([f64; 2], [f64; 2])>,
) -> usize {
    let cell = |p: [f64; 2]| -> u64 {
        let i = ((p[0] - origin[0]) / delta).floor() as i64 as u64 & 0xFFFF_FFFF;
        let j = ((p[1] - origin[1]) / delta).floor() as i64 as u64 & 0xFFFF_FFFF;
        (i << 32) | j
    };
    let mut cells: HashSet<u64, BuildHasherDefault<CellHasher>> = HashSet::default();
    let mut last = u64::MAX;
    if let Some(&first) = points.first() {
        if inside(first, window) {
            last = cell(first);
            cells.insert(last);
        }
    }
    let step = 0.25 * delta;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let n = (len / step).ceil().max(1.0) as usize;
        for k in 1..=n {
            let t = k as f64 / n as f64;
            let p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            if !inside(p, window) {
                last = u64::MAX;
                continue;
            }
            let key = cell(p);
            if key != last {
                cells.insert(key);
                last = key;
            }
        }
    }
    cells.len()
}

/// Box-counting dimension of a planar polyline on dyadic grids.
pub fn box_dimension_2d(points: &[[f64; 2]], opts: &BoxOptions) -> Result<DimensionEstimate> {
    if points.len() < opts.min_points {
        return Err(Error::InvalidInput(format!(
            "{} points given, at least {} needed",
            points.len(),
            opts.min_points
        )));
    }
    if opts.levels.len() < 5 {
        return Err(Error::InvalidInput("at least five grid levels are needed".into()));
    }
    if points.iter().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
        return Err(Error::InvalidInput("polyline contains non-finite points".into()));
    }
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points.iter().filter(|p| inside(**p, opts.window)) {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    if !(extent > 0.0) {
        return Err(Error::InvalidInput("polyline has zero extent".into()));
    }
    let origin = [lo[0] - 1e-9 * extent, lo[1] - 1e-9 * extent];
    let cover = extent * (1.0 + 4e-9);
    let deltas: Vec<f64> = opts.levels.iter().map(|&k| cover * 0.5f64.powi(k as i32)).collect();
    let counts: Vec<f64> = deltas
        .par_iter()
        .map(|&d| occupied_cells(points, origin, d, opts.window) as f64)
        .collect();
    let lx: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
    let ly: Vec<f64> = counts.iter().map(|c| c.ln()).collect();
    let power = linear_fit(&lx, &ly);
    let lengths: Vec<f64> = counts.iter().zip(&deltas).map(|(c, d)| c * d).collect();
    let log_res = log_law_residual(&deltas, &lengths);
    let (model, value) = if opts.model_selection && log_res < power.residual {
        (ScalingModel::LogLaw, 1.0)
    } else {
        (ScalingModel::PowerLaw, (-power.slope).clamp(0.0, 2.0))
    };
    let (dmin, dmax) = deltas.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &d| (a.min(d), b.max(d)));
    let content: Vec<f64> = counts.iter().zip(&deltas).map(|(c, d)| c * d * d).collect();
    let spread = content_spread(&deltas, &content, 2.0 - value);
    Ok(DimensionEstimate {
        value,
        fit_slope: power.slope,
        fit_residual: power.residual,
        log_law_residual: log_res,
        model,
        delta_range: (dmin, dmax),
        point_count: points.len(),
        tail_exponent_dimension: None,
        content_ratio_spread: spread,
        samples: deltas.into_iter().zip(counts).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn measure_examples() {
        assert!((neighborhood_measure_1d(&[0.0], 0.1).unwrap() - 0.2).abs() < 1e-15);
        assert!((neighborhood_measure_1d(&[0.0, 1.0], 0.1).unwrap() - 0.4).abs() < 1e-15);
        assert!((neighborhood_measure_1d(&[1.0, 0.0], 0.6).unwrap() - 2.2).abs() < 1e-15);
        assert_eq!(neighborhood_measure_1d(&[], 0.3).unwrap(), 0.0);
        assert!(neighborhood_measure_1d(&[0.0], 0.0).is_err());
    }

    #[test]
    fn measure_matches_fine_grid() {
        let pts: Vec<f64> = (1..=200).map(|n| 1.0 / n as f64).collect();
        let delta = 3e-4;
        let h = 1e-6;
        let n = ((1.0 + 2.0 * delta) / h) as usize + 2;
        let mut covered = 0usize;
        let mut sorted = pts.clone();
        sorted.sort_by(|a, b| a.total_cmp(b));
        let mut j = 0;
        for i in 0..n {
            let x = -delta + (i as f64 + 0.5) * h;
            while j + 1 < sorted.len() && sorted[j + 1] <= x {
                j += 1;
            }
            let near = (x - sorted[j]).abs() <= delta || (j + 1 < sorted.len() && (sorted[j + 1] - x).abs() <= delta);
            if near {
                covered += 1;
            }
        }
        let brute = covered as f64 * h;
        let exact = neighborhood_measure_1d(&pts, delta).unwrap();
        assert!((brute - exact).abs() < 4.0 * h * 1.0, "{brute} vs {exact}");
    }

    #[test]
    fn geometric_sequence_has_dimension_zero() {
        let s: Vec<f64> = (1..=60).map(|n| 0.5f64.powi(n)).collect();
        let d = dim_sequence(&s).unwrap();
        assert_eq!(d.model, ScalingModel::LogLaw);
        assert!(d.value.abs() < 0.05);
    }

    #[test]
    fn power_sequences() {
        let a: Vec<f64> = (1..=100_000).map(|n| 1.0 / n as f64).collect();
        let d = dim_sequence(&a).unwrap();
        assert!((d.value - 0.5).abs() < 0.05, "{}", d.value);
        assert!((d.tail_exponent_dimension.unwrap() - 0.5).abs() < 0.01);
        let b: Vec<f64> = (1..=100_000).map(|n| 1.0 / (n as f64).sqrt()).collect();
        let d = dim_sequence(&b).unwrap();
        assert!((d.value - 2.0 / 3.0).abs() < 0.05, "{}", d.value);
    }

    #[test]
    fn rejects_bad_sequences() {
        assert!(dim_sequence(&[0.5, 0.25]).is_err());
        let bumpy: Vec<f64> = (0..100).map(|n| 1.0 + ((n % 3) as f64)).collect();
        assert!(dim_sequence(&bumpy).is_err());
    }

    #[test]
    fn multiplicity_dimension_bijection() {
        for m in 1..=10u32 {
            let d = dim_from_multiplicity(Multiplicity::Finite(m)).unwrap();
            assert_eq!(multiplicity_from_dim(d).unwrap().m, Some(m));
        }
        assert_eq!(dim_from_multiplicity(Multiplicity::Infinite).unwrap(), 1.0);
        assert!(dim_from_multiplicity(Multiplicity::Finite(0)).is_err());
        let s = multiplicity_from_dim(0.52).unwrap();
        assert_eq!(s.m, Some(2));
        assert!(s.snapped && s.warning.is_some());
        assert_eq!(multiplicity_from_dim(0.75).unwrap().m, Some(4));
        assert!(multiplicity_from_dim(1.0).is_err());
    }

    #[test]
    fn box_counting_line_and_square() {
        let line: Vec<[f64; 2]> = (0..2000).map(|i| [i as f64 / 1999.0, 0.3 * i as f64 / 1999.0]).collect();
        let d = box_dimension_2d(&line, &BoxOptions::levels(2..=10)).unwrap();
        assert!((d.value - 1.0).abs() < 0.05, "{d:?}");
        let n = 400;
        let mut sq = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let jj = if i % 2 == 0 { j } else { n - 1 - j };
                sq.push([i as f64 / n as f64, jj as f64 / n as f64]);
            }
        }
        let d = box_dimension_2d(&sq, &BoxOptions::levels(1..=7)).unwrap();
        assert!((d.value - 2.0).abs() < 0.05, "{d:?}");
        assert!(box_dimension_2d(&line[..10], &BoxOptions::levels(2..=10)).is_err());
        let dot = vec![[0.5, 0.5]; 2000];
        assert!(box_dimension_2d(&dot, &BoxOptions::levels(2..=10)).is_err());
    }

    #[test]
    fn spiral_accumulating_on_circle() {
        // r(θ) = 1 + 1/θ: the distance to the circle after n turns is ~1/n.
        let turns = 2000.0;
        let pts: Vec<[f64; 2]> = {
            let mut v = Vec::new();
            let mut th = 2.0 * std::f64::consts::PI;
            let end = 2.0 * std::f64::consts::PI * turns;
            while th < end {
                let r = 1.0 + 1.0 / th;
                v.push([r * th.cos(), r * th.sin()]);
                th += 2e-3;
            }
            v
        };
        let d = box_dimension_2d(&pts, &BoxOptions::levels(7..=12)).unwrap();
        assert!((d.value - 1.5).abs() < 0.1, "{d:?}");
    }

    proptest! {
        #[test]
        fn measure_is_monotone_and_bounded(
            pts in proptest::collection::vec(-10.0f64..10.0, 1..60),
            d1 in 1e-4f64..1.0,
            f in 1.0f64..5.0,
        ) {
            let a = neighborhood_measure_1d(&pts, d1).unwrap();
            let b = neighborhood_measure_1d(&pts, d1 * f).unwrap();
            prop_assert!(b >= a - 1e-12);
            prop_assert!(a <= 2.0 * d1 * pts.len() as f64 + 1e-12);
        }
    }
}
