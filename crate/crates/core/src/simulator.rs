//! Direct simulation of the regularized system
//!
//! ```text
//! z' = φ(y/ε²) Z⁺(z, λ) + (1 - φ(y/ε²)) Z⁻(z, λ),   λ = λ₀ + ε λ̃,
//! ```
//!
//! its first-return map on the section of a [`CanardSetup`], and the limit
//! cycles and saddle-node bifurcations it reveals.
//!
//! The section is `x = 0`, `y < 0`. Lower orbits cross it with decreasing
//! `x`, and only crossings with that orientation count as returns.

use rayon::prelude::*;
use serde::Serialize;

use crate::canard::CanardSetup;
use crate::error::{Error, Result};
use crate::fractal::{box_dimension_2d, BoxOptions, DimensionEstimate};
use crate::ode::{Integrator, OdeOptions, OdeStats, Step};
use crate::roots;

/// Integration settings of the regularized flow.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SimOptions {
    pub rtol: f64,
    /// Absolute tolerance in `x`; the tolerance in `y` is this times `ε²`.
    pub atol: f64,
    pub h_max: f64,
    pub t_max: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            rtol: 1e-10,
            atol: 1e-11,
            h_max: 0.01,
            t_max: 50.0,
        }
    }
}

impl SimOptions {
    fn ode(&self, eps: f64) -> OdeOptions {
        OdeOptions {
            rtol: self.rtol,
            atol: [self.atol, self.atol * eps * eps],
            h_init: 1e-4 * eps * eps,
            h_min: 1e-13,
            h_max: self.h_max,
            max_steps: 20_000_000,
        }
    }
}

/// A refined crossing of the section.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SectionEvent {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// Section parameter `y - y₀`.
    pub s: f64,
}

/// Sampled solution with section events and step statistics.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    pub events: Vec<SectionEvent>,
    pub stats: OdeStats,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 0.2) {
        return Err(Error::InvalidInput(format!("ε = {eps} must lie in (0, 0.2]")));
    }
    Ok(())
}

/// Right-hand side of the regularized system.
pub fn regularized_field(setup: &CanardSetup, eps: f64, lambda_tilde: f64) -> impl Fn([f64; 2]) -> [f64; 2] + '_ {
    let lambda = setup.system.lambda + eps * lambda_tilde;
    let e2 = eps * eps;
    move |z: [f64; 2]| {
        let p = setup.reg.phi(z[1] / e2);
        let a = setup.system.z_plus.eval(z, lambda);
        let b = setup.system.z_minus.eval(z, lambda);
        [p * a[0] + (1.0 - p) * b[0], p * a[1] + (1.0 - p) * b[1]]
    }
}

struct Flow<'a, F> {
    setup: &'a CanardSetup,
    ig: Integrator<F>,
    backward: bool,
}

impl<'a, F: Fn([f64; 2]) -> [f64; 2]> Flow<'a, F> {
    fn advance(&mut self, t_max: f64) -> Result<(Step, Option<SectionEvent>)> {
        let step = self.ig.step(t_max)?;
        if !self.setup.system.domain.contains(step.z1) {
            return Err(Error::Escaped {
                t: step.t1,
                x: step.z1[0],
                y: step.z1[1],
            });
        }
        let (a, b) = if self.backward {
            (-step.z0[0], -step.z1[0])
        } else {
            (step.z0[0], step.z1[0])
        };
        if a > 0.0 && b <= 0.0 && step.z0[1].max(step.z1[1]) < 0.0 {
            let (t, z) = self.ig.locate(&step, |z| z[0], 1e-12)?;
            let ev = SectionEvent {
                t,
                x: z[0],
                y: z[1],
                s: z[1] - self.setup.section_y0,
            };
            return Ok((step, Some(ev)));
        }
        Ok((step, None))
    }
}

fn flow<'a>(
    setup: &'a CanardSetup,
    eps: f64,
    lambda_tilde: f64,
    z0: [f64; 2],
    opts: &SimOptions,
    backward: bool,
) -> Result<Flow<'a, impl Fn([f64; 2]) -> [f64; 2] + 'a>> {
    check_eps(eps)?;
    if !setup.system.domain.contains(z0) {
        return Err(Error::OutsideDomain { x: z0[0], y: z0[1] });
    }
    let f = regularized_field(setup, eps, lambda_tilde);
    let sign = if backward { -1.0 } else { 1.0 };
    let g = move |z: [f64; 2]| {
        let v = f(z);
        [sign * v[0], sign * v[1]]
    };
    Ok(Flow {
        setup,
        ig: Integrator::new(g, z0, opts.ode(eps)),
        backward,
    })
}

/// Integrates the regularized system from `z0` for `t_max` time units,
/// recording every accepted step and every section crossing.
pub fn flow_regularized(
    setup: &CanardSetup,
    eps: f64,
    lambda_tilde: f64,
    z0: [f64; 2],
    t_max: f64,
    opts: &SimOptions,
) -> Result<Trajectory> {
    let mut fl = flow(setup, eps, lambda_tilde, z0, opts, false)?;
    let mut times = vec![0.0];
    let mut points = vec![z0];
    let mut events = Vec::new();
    while fl.ig.time() < t_max {
        let (step, ev) = fl.advance(t_max)?;
        times.push(step.t1);
        points.push(step.z1);
        events.extend(ev);
    }
    Ok(Trajectory {
        times,
        points,
        events,
        stats: fl.ig.stats,
    })
}

/// First return `P(s)` to the section.
pub fn return_map(setup: &CanardSetup, eps: f64, lambda_tilde: f64, s: f64, opts: &SimOptions) -> Result<f64> {
    let mut fl = flow(setup, eps, lambda_tilde, setup.section_point(s), opts, false)?;
    while fl.ig.time() < opts.t_max {
        if let (_, Some(ev)) = fl.advance(opts.t_max)? {
            return Ok(ev.s);
        }
    }
    Err(Error::NoReturn { t_max: opts.t_max })
}

/// `P(s)` on a grid, evaluated concurrently; failures are kept per point.
pub fn return_map_grid(
    setup: &CanardSetup,
    eps: f64,
    lambda_tilde: f64,
    grid: &[f64],
    opts: &SimOptions,
) -> Vec<Result<f64>> {
    grid.par_iter()
        .map(|&s| return_map(setup, eps, lambda_tilde, s, opts))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum CycleClass {
    HyperbolicAttracting,
    HyperbolicRepelling,
    NearDouble,
}

/// A fixed point of the return map.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LimitCycleReport {
    pub s_star: f64,
    pub multiplier: f64,
    pub classification: CycleClass,
    pub residual: f64,
}

/// Options of the cycle search.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CycleOptions {
    /// Half-width of the band around 1 classified as near-double.
    pub theta: f64,
    pub root_tol: f64,
    /// Multiplier step relative to `|s*| + s̄`.
    pub relative_step: f64,
    /// Extrema of `P(s) - s` closer to zero than this are reported as
    /// near-double cycles even without a sign change.
    pub tangency_tol: f64,
}

impl Default for CycleOptions {
    fn default() -> Self {
        CycleOptions {
            theta: 0.05,
            root_tol: 1e-10,
            relative_step: 1e-5,
            tangency_tol: 1e-9,
        }
    }
}

/// Equally spaced section grid.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1).max(1) as f64).collect()
}

fn classify(multiplier: f64, theta: f64) -> CycleClass {
    if multiplier < 1.0 - theta {
        CycleClass::HyperbolicAttracting
    } else if multiplier > 1.0 + theta {
        CycleClass::HyperbolicRepelling
    } else {
        CycleClass::NearDouble
    }
}

/// Multiplier `P'(s)` by central differences.
pub fn multiplier(
    setup: &CanardSetup,
    eps: f64,
    lambda_tilde: f64,
    s: f64,
    opts: &SimOptions,
    cy: &CycleOptions,
) -> Result<f64> {
    let h = cy.relative_step * (s.abs() + setup.s_bar);
    let p = return_map(setup, eps, lambda_tilde, s + h, opts)?;
    let m = return_map(setup, eps, lambda_tilde, s - h, opts)?;
    Ok((p - m) / (2.0 * h))
}

fn report_at(
    setup: &CanardSetup,
    eps: f64,
    lambda_tilde: f64,
    s: f64,
    opts: &SimOptions,
    cy: &CycleOptions,
    force_double: bool,
) -> Result<LimitCycleReport> {
    let d = return_map(setup, eps, lambda_tilde, s, opts)? - s;
    let mu = multiplier(setup, eps, lambda_tilde, s, opts, cy)?;
    Ok(LimitCycleReport {
        s_star: s,
        multiplier: mu,
        classification: if force_double { CycleClass::NearDouble } else { classify(mu, cy.theta) },
        residual: d.abs(),
    })
}

/// Limit cycles whose section parameter lies in the grid range.
///
/// Sign changes of `P(s) - s` are refined by Brent's method. Interior
/// extrema of `P(s) - s` that come within `tangency_tol` of zero without a
/// sign change are reported as near-double cycles.
pub fn find_limit_cycles(
    setup: &CanardSetup,
    eps: f64,
    lambda_tilde: f64,
    grid: &[f64],
    opts: &SimOptions,
    cy: &CycleOptions,
) -> Result<Vec<LimitCycleReport>> {
    if grid.len() < 3 {
        return Err(Error::InvalidInput("the section grid needs at least three points".into()));
    }
    let d = displacement(setup, eps, lambda_tilde, grid, opts);
    let mut found: Vec<LimitCycleReport> = Vec::new();
    let disp = |s: f64| return_map(setup, eps, lambda_tilde, s, opts).map(|p| p - s).unwrap_or(f64::NAN);
    let changes = roots::sign_changes(&d);
    for &i in &changes {
        let s = roots::brent_with_values(disp, grid[i], grid[i + 1], d[i], d[i + 1], cy.root_tol)?;
        found.push(report_at(setup, eps, lambda_tilde, s, opts, cy, false)?);
    }
    for i in 1..d.len() - 1 {
        let (a, b, c) = (d[i - 1], d[i], d[i + 1]);
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            continue;
        }
        let max = b < 0.0 && b >= a && b >= c;
        let min = b > 0.0 && b <= a && b <= c;
        if !(max || min) || changes.iter().any(|&k| k + 1 >= i && k <= i) {
            continue;
        }
        let sign = if max { 1.0 } else { -1.0 };
        let (s, v) = roots::golden_max(|s| sign * disp(s), grid[i - 1], grid[i + 1], 1e-9);
        if v.abs() < cy.tangency_tol {
            found.push(report_at(setup, eps, lambda_tilde, s, opts, cy, true)?);
        }
    }
    found.sort_by(|p, q| p.s_star.total_cmp(&q.s_star));
    Ok(found)
}

/// `P(s) - s` on the grid with failed points as NaN.
pub fn displacement(setup: &CanardSetup, eps: f64, lambda_tilde: f64, grid: &[f64], opts: &SimOptions) -> Vec<f64> {
    return_map_grid(setup, eps, lambda_tilde, grid, opts)
        .into_iter()
        .zip(grid)
        .map(|(p, s)| p.map(|p| p - s).unwrap_or(f64::NAN))
        .collect()
}

/// Number of sign changes of `P(s) - s` on the grid.
pub fn fixed_point_count(setup: &CanardSetup, eps: f64, lambda_tilde: f64, grid: &[f64], opts: &SimOptions) -> usize {
    roots::sign_changes(&displacement(setup, eps, lambda_tilde, grid, opts)).len()
}

/// One bisection step record.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SweepSample {
    pub lambda_tilde: f64,
    pub count: usize,
}

/// Location of the saddle-node bifurcation of cycles.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SaddleNodeResult {
    pub lambda_star: f64,
    /// Final bisection bracket on the fixed-point count.
    pub bracket: (f64, f64),
    /// `max_s (P(s) - s)` at `λ̃*`.
    pub max_displacement: f64,
    pub cycle: LimitCycleReport,
    pub samples: Vec<SweepSample>,
}

/// Bisects `λ̃` on the fixed-point count until the bracket is below
/// `1e-6`, then solves `max_s (P(s) - s) = 0` inside it.
pub fn saddle_node_sweep(
    setup: &CanardSetup,
    eps: f64,
    range: (f64, f64),
    grid: &[f64],
    opts: &SimOptions,
    cy: &CycleOptions,
) -> Result<SaddleNodeResult> {
    let (mut lo, mut hi) = range;
    if !(lo < hi) {
        return Err(Error::InvalidInput(format!("λ̃ range [{lo}, {hi}] is empty")));
    }
    let count = |l: f64| fixed_point_count(setup, eps, l, grid, opts);
    let (c_lo, c_hi) = (count(lo), count(hi));
    let mut samples = vec![
        SweepSample {
            lambda_tilde: lo,
            count: c_lo,
        },
        SweepSample {
            lambda_tilde: hi,
            count: c_hi,
        },
    ];
    if c_lo == c_hi {
        return Err(Error::Precondition(format!(
            "the fixed-point count is {c_lo} at both ends of the λ̃ range"
        )));
    }
    while hi - lo >= 1e-6 {
        let mid = 0.5 * (lo + hi);
        let c = count(mid);
        samples.push(SweepSample { lambda_tilde: mid, count: c });
        if c == c_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let paired = if c_lo > c_hi { lo } else { hi };
    let d = displacement(setup, eps, paired, grid, opts);
    let ch = roots::sign_changes(&d);
    let (a, b) = match (ch.first(), ch.last()) {
        (Some(&f), Some(&l)) => (grid[f.saturating_sub(1)], grid[(l + 2).min(grid.len() - 1)]),
        _ => (grid[0], grid[grid.len() - 1]),
    };
    let peak = |l: f64| {
        roots::golden_max(
            |s| return_map(setup, eps, l, s, opts).map(|p| p - s).unwrap_or(f64::NEG_INFINITY),
            a,
            b,
            1e-9,
        )
    };
    let (mut pl, mut ph) = (lo, hi);
    let mut m_lo = peak(pl).1;
    let mut m_hi = peak(ph).1;
    let width = hi - lo;
    let toward_empty = if c_lo > c_hi { 1.0 } else { -1.0 };
    for k in 0..40 {
        if m_lo * m_hi < 0.0 || !m_lo.is_finite() || !m_hi.is_finite() {
            break;
        }
        let step = width * 2f64.powi(k);
        if (m_lo > 0.0) == (toward_empty > 0.0) {
            pl = ph;
            m_lo = m_hi;
            ph += step;
            m_hi = peak(ph).1;
        } else {
            ph = pl;
            m_hi = m_lo;
            pl -= step;
            m_lo = peak(pl).1;
        }
    }
    let lambda_star = if m_lo * m_hi < 0.0 {
        roots::brent_with_values(|l| peak(l).1, pl, ph, m_lo, m_hi, 1e-12)?
    } else {
        0.5 * (lo + hi)
    };
    let (s_star, max_displacement) = peak(lambda_star);
    let cycle = report_at(setup, eps, lambda_star, s_star, opts, cy, false)?;
    Ok(SaddleNodeResult {
        lambda_star,
        bracket: (lo, hi),
        max_displacement,
        cycle,
        samples,
    })
}

/// Trajectory through `n_returns` section crossings, resampled so that
/// consecutive points are at most `spacing` apart. Backward integration
/// follows the time-reversed flow.
pub fn spiral_trajectory(
    setup: &CanardSetup,
    eps: f64,
    lambda_tilde: f64,
    z0: [f64; 2],
    n_returns: usize,
    spacing: f64,
    backward: bool,
    opts: &SimOptions,
) -> Result<Vec<[f64; 2]>> {
    if !(spacing > 0.0) {
        return Err(Error::InvalidInput("point spacing must be positive".into()));
    }
    let mut fl = flow(setup, eps, lambda_tilde, z0, opts, backward)?;
    let mut points = vec![z0];
    let mut returns = 0;
    let t_max = opts.t_max * (n_returns as f64 + 1.0);
    while returns < n_returns {
        if fl.ig.time() >= t_max {
            return Err(Error::NoReturn { t_max });
        }
        let (step, ev) = fl.advance(t_max)?;
        let len = (step.z1[0] - step.z0[0]).hypot(step.z1[1] - step.z0[1]);
        let pieces = (len / spacing).ceil() as usize;
        let end = match ev {
            Some(e) => {
                returns += 1;
                if returns == n_returns {
                    e.t
                } else {
                    step.t1
                }
            }
            None => step.t1,
        };
        let dt = end - step.t0;
        for k in 1..pieces.max(1) {
            points.push(fl.ig.dense(&step, dt * k as f64 / pieces as f64));
        }
        points.push(if end < step.t1 { fl.ig.dense(&step, dt) } else { step.z1 });
    }
    Ok(points)
}

/// Settings of [`spiral_box_dimension`].
#[derive(Debug, Clone)]
pub struct SpiralOptions {
    pub n_returns: usize,
    pub spacing: f64,
    /// Dyadic box-counting levels.
    pub levels: Vec<u32>,
    /// Only points with `y` at most this value are counted, which keeps
    /// the boxes away from the regularization layer.
    pub y_max: f64,
}

impl Default for SpiralOptions {
    fn default() -> Self {
        SpiralOptions {
            n_returns: 2500,
            spacing: 2e-4,
            levels: (11..=15).collect(),
            y_max: -0.006,
        }
    }
}

/// Box dimension of the spiral that starts at section parameter `s_start`
/// and accumulates on the cycle through `s_cycle`. One loop of the cycle
/// itself is appended to the spiral before counting.
pub fn spiral_box_dimension(
    setup: &CanardSetup,
    eps: f64,
    lambda_tilde: f64,
    s_start: f64,
    s_cycle: f64,
    spiral: &SpiralOptions,
    opts: &SimOptions,
) -> Result<DimensionEstimate> {
    setup.require_s(s_start)?;
    setup.require_s(s_cycle)?;
    let mut pts = spiral_trajectory(
        setup,
        eps,
        lambda_tilde,
        setup.section_point(s_start),
        spiral.n_returns,
        spiral.spacing,
        false,
        opts,
    )?;
    pts.extend(spiral_trajectory(
        setup,
        eps,
        lambda_tilde,
        setup.section_point(s_cycle),
        1,
        spiral.spacing,
        false,
        opts,
    )?);
    let bo = BoxOptions::levels(spiral.levels.iter().copied()).with_window([f64::NEG_INFINITY; 2], [f64::INFINITY, spiral.y_max]);
    box_dimension_2d(&pts, &bo)
}
