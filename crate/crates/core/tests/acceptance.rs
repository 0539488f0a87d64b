//! Acceptance checks. Each check prints one `PASS` or `FAIL` line with the
//! measured quantity and the tolerance it is held to; the process fails if
//! any check fails. The last check integrates thousands of cycle loops and
//! takes about a minute in release mode.

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use slowdiv::canard::{
    generate_orbit_with, slow_relation_g, slow_relation_residual, CanardSetup, OrbitDirection,
};
use slowdiv::field::{Poly2, SmoothMap2};
use slowdiv::fractal::{dim_from_multiplicity, dim_sequence, Multiplicity};
use slowdiv::models::{canonical_vi3, canonical_with_c, default_tuned_simple, simulation_tuned_simple};
use slowdiv::pws::{time_reversed, Diffeomorphism, PolyDiffeo, SlidingSegment};
use slowdiv::regularization::{make_arctan_regularizer, make_tanh_regularizer};
use slowdiv::sdi::{invariance_report, rescaled_divergence_crosscheck, sdi_regular_segment, sdi_to_two_fold, DEFAULT_TOL};
use slowdiv::simulator::{
    find_limit_cycles, fixed_point_count, saddle_node_sweep, spiral_box_dimension, uniform_grid, CycleClass,
    CycleOptions, SimOptions, SpiralOptions,
};

const Q_TOL: f64 = 1e-12;
const Q_TIME: Duration = Duration::from_secs(1);
const SEGMENT_TOL: f64 = 1e-8;
const TWO_FOLD_TOL: f64 = 1e-7;
const INVARIANCE_TOL: f64 = 1e-6;
const INVARIANCE_SAMPLES: usize = 20;
const INVARIANCE_TIME: Duration = Duration::from_secs(30);
const WEIGHT_TOL: f64 = 1e-8;
const WEIGHT_TIME: Duration = Duration::from_secs(5);
const RESIDUAL_TOL: f64 = 1e-9;
const SYMMETRIC_TOL: f64 = 1e-10;
const SLOW_RELATION_TIME: Duration = Duration::from_secs(60);
const DIM_TOL: f64 = 0.05;
const HYPERBOLIC_MARGIN: f64 = 0.05;
const CYCLE_BOUND: usize = 2;
const SWEEP_TIME: Duration = Duration::from_secs(600);
const SPIRAL_TOL: f64 = 0.1;
const SPIRAL_TIME: Duration = Duration::from_secs(1800);

type Check = (&'static str, fn() -> Result<String, String>);

fn main() {
    let checks: [Check; 9] = [
        ("1 regularizer composite", regularizer_composite),
        ("2 canonical integrals", canonical_integrals),
        ("3 invariance", invariance),
        ("4 weight against layer divergence", weight_crosscheck),
        ("5 slow relation", slow_relation),
        ("6 orbit dimensions", orbit_dimensions),
        ("7 cyclicity from dimension", cyclicity_from_dimension),
        ("8 saddle-node of cycles", saddle_node),
        ("9 spiral dimensions (slow)", spiral_dimensions),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {name}: {msg} [{secs:.2} s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} [{secs:.2} s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}

fn ensure(ok: bool, msg: String) -> Result<String, String> {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn err(e: slowdiv::Error) -> String {
    e.to_string()
}

fn regularizer_composite() -> Result<String, String> {
    let t0 = Instant::now();
    let (t, a) = (make_tanh_regularizer(), make_arctan_regularizer());
    let mut worst = [0.0f64; 2];
    for i in 0..1000 {
        let p = (i as f64 + 0.5) / 1000.0;
        worst[0] = worst[0].max((t.q_composite(p) - 2.0 * p * (1.0 - p)).abs());
        worst[1] = worst[1].max((a.q_composite(p) - (PI * p).sin().powi(2) / PI).abs());
    }
    let el = t0.elapsed();
    ensure(
        worst[0] < Q_TOL && worst[1] < Q_TOL && el < Q_TIME,
        format!("max error tanh {:.1e}, arctan {:.1e} (tol {Q_TOL:e}), {el:.2?}", worst[0], worst[1]),
    )
}

fn canonical_integrals() -> Result<String, String> {
    let sys = canonical_vi3();
    let reg = make_tanh_regularizer();
    let seg = sdi_regular_segment(&sys, &reg, &SlidingSegment::on_axis(0.1, 0.3), DEFAULT_TOL).map_err(err)?;
    let tf = sdi_to_two_fold(&sys, &reg, 0.3, DEFAULT_TOL).map_err(err)?;
    let (e1, e2) = ((seg.value - 0.16).abs(), (tf.value - 0.18).abs());
    ensure(
        e1 < SEGMENT_TOL && e2 < TWO_FOLD_TOL && tf.converged,
        format!(
            "[0.1, 0.3] = {:.12} (err {e1:.1e}, tol {SEGMENT_TOL:e}); [0, 0.3] = {:.12} (err {e2:.1e}, tol {TWO_FOLD_TOL:e}, converged {})",
            seg.value, tf.value, tf.converged
        ),
    )
}

fn random_diffeo(rng: &mut StdRng) -> Arc<dyn Diffeomorphism> {
    let mut c = || rng.gen_range(-0.08..0.08);
    Arc::new(PolyDiffeo::new(
        Poly2::from_terms(&[(1, 0, 1.0), (0, 1, c()), (2, 0, c()), (1, 1, c()), (3, 0, c())]),
        Poly2::from_terms(&[(0, 1, 1.0 + c()), (1, 0, c()), (2, 0, c()), (1, 1, c()), (0, 2, c())]),
    ))
}

fn random_multiplier(rng: &mut StdRng) -> SmoothMap2 {
    let (a, b, c, k) = (
        rng.gen_range(0.5..3.0),
        rng.gen_range(-0.4..0.4),
        rng.gen_range(-0.4..0.4),
        rng.gen_range(0.5..3.0),
    );
    SmoothMap2::closure(move |x, y, _| a * (1.0 + b * (k * x).sin() + c * (k * y).cos()))
}

fn invariance() -> Result<String, String> {
    let t0 = Instant::now();
    let reg = make_tanh_regularizer();
    let models = [
        ("canonical", canonical_vi3()),
        ("canonical c = 0.5", canonical_with_c(0.5)),
        ("tuned", default_tuned_simple().map_err(err)?.system),
    ];
    let seg = SlidingSegment::on_axis(0.1, 0.3);
    let mut rng = StdRng::seed_from_u64(20240611);
    let mut worst = 0.0f64;
    let mut reversal_exact = true;
    for (_, sys) in &models {
        for _ in 0..INVARIANCE_SAMPLES {
            let rep = invariance_report(sys, &reg, &seg, random_diffeo(&mut rng), &random_multiplier(&mut rng), 1e-11)
                .map_err(err)?;
            worst = worst.max(rep.max_difference());
        }
        let fwd = sdi_regular_segment(sys, &reg, &seg, DEFAULT_TOL).map_err(err)?.value;
        let rev = sdi_regular_segment(&time_reversed(sys), &reg, &seg, DEFAULT_TOL).map_err(err)?.value;
        reversal_exact &= rev == -fwd;
    }
    let el = t0.elapsed();
    ensure(
        worst < INVARIANCE_TOL && reversal_exact && el < INVARIANCE_TIME,
        format!(
            "{} models x {INVARIANCE_SAMPLES} samples, max |ΔSDI| {worst:.1e} (tol {INVARIANCE_TOL:e}), time reversal exact {reversal_exact}, {el:.2?}",
            models.len()
        ),
    )
}

fn weight_crosscheck() -> Result<String, String> {
    let t0 = Instant::now();
    let reg = make_tanh_regularizer();
    let models = [
        ("canonical", canonical_vi3()),
        ("canonical c = 0.5", canonical_with_c(0.5)),
        ("tuned", default_tuned_simple().map_err(err)?.system),
    ];
    let mut worst = 0.0f64;
    for (_, sys) in &models {
        for i in 0..100 {
            let u = 0.02 + 0.38 * i as f64 / 99.0;
            let x = if i % 2 == 0 { u } else { -u };
            let (e, div) = rescaled_divergence_crosscheck(sys, &reg, x).map_err(err)?;
            worst = worst.max((e - div).abs());
        }
    }
    let el = t0.elapsed();
    ensure(
        worst < WEIGHT_TOL && el < WEIGHT_TIME,
        format!("3 models x 100 points, max |E - div| {worst:.1e} (tol {WEIGHT_TOL:e}), {el:.2?}"),
    )
}

fn slow_relation() -> Result<String, String> {
    let t0 = Instant::now();
    let reg = make_tanh_regularizer();
    let tuned = CanardSetup::from_tuned(&default_tuned_simple().map_err(err)?, reg.clone()).map_err(err)?;
    let mut worst_res = 0.0f64;
    for k in 1..=50 {
        let s = tuned.s_bar * k as f64 / 50.0;
        let g = slow_relation_g(&tuned, s, RESIDUAL_TOL).map_err(err)?;
        worst_res = worst_res.max(slow_relation_residual(&tuned, s, g).map_err(err)?.abs());
    }
    let sym = CanardSetup::canonical(reg, 0.5).map_err(err)?;
    let mut worst_sym = 0.0f64;
    for k in 1..=50 {
        let s = sym.s_bar * k as f64 / 50.0;
        worst_sym = worst_sym.max((slow_relation_g(&sym, s, RESIDUAL_TOL).map_err(err)? - s).abs());
    }
    let el = t0.elapsed();
    ensure(
        worst_res < RESIDUAL_TOL && worst_sym < SYMMETRIC_TOL && el < SLOW_RELATION_TIME,
        format!(
            "50 values, max residual {worst_res:.1e} (tol {RESIDUAL_TOL:e}); symmetric max |G(s) - s| {worst_sym:.1e} (tol {SYMMETRIC_TOL:e}); {el:.2?}"
        ),
    )
}

fn orbit_dimensions() -> Result<String, String> {
    let mut parts = Vec::new();
    let mut ok = true;
    for (m, expected) in [(1u32, 0.0), (2, 0.5), (3, 2.0 / 3.0)] {
        let map = move |s: f64| Ok(if m == 1 { 0.5 * s } else { s - s.powi(m as i32) });
        let orbit = generate_orbit_with(map, 0.5, 1e-9, 100_000, OrbitDirection::ForwardG);
        let d = dim_sequence(&orbit.terms).map_err(err)?.value;
        ok &= (d - expected).abs() <= DIM_TOL;
        parts.push(format!("m = {m}: d = {d:.4}"));
    }
    let pairs = [
        (Multiplicity::Finite(1), 0.0),
        (Multiplicity::Finite(2), 0.5),
        (Multiplicity::Finite(3), 2.0 / 3.0),
        (Multiplicity::Finite(4), 0.75),
        (Multiplicity::Infinite, 1.0),
    ];
    let exact = pairs.iter().all(|(m, d)| dim_from_multiplicity(*m).ok() == Some(*d));
    ensure(ok && exact, format!("{} (tol {DIM_TOL}); bijection exact {exact}", parts.join(", ")))
}

fn cyclicity_from_dimension() -> Result<String, String> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (d, bound) in [(0.0, 2.0), (0.5, 3.0), (2.0 / 3.0, 4.0)] {
        let b = (2.0 - d) / (1.0 - d);
        ok &= b == bound;
        let p = slowdiv::canard::predict_cyclicity(slowdiv::canard::CyclicityInput::Dimension(d)).map_err(err)?;
        ok &= p.bound as f64 == bound;
        parts.push(format!("d = {d:.4} -> {b}"));
    }
    ensure(ok, parts.join(", "))
}

fn saddle_node() -> Result<String, String> {
    let t0 = Instant::now();
    let setup = CanardSetup::from_tuned(&simulation_tuned_simple().map_err(err)?, make_tanh_regularizer()).map_err(err)?;
    let eps = 0.05;
    let grid = uniform_grid(-0.004, 0.004, 17);
    let opts = SimOptions::default();
    let cy = CycleOptions::default();
    let scan = uniform_grid(0.0085, 0.0088, 13);
    let counts: Vec<usize> = scan.iter().map(|&l| fixed_point_count(&setup, eps, l, &grid, &opts)).collect();
    let max_count = *counts.iter().max().unwrap_or(&0);
    let i = (0..counts.len() - 1)
        .find(|&i| counts[i] == 2 && counts[i + 1] == 0)
        .ok_or_else(|| format!("no 2 -> 0 transition in the scan, counts {counts:?}"))?;
    let sn = saddle_node_sweep(&setup, eps, (scan[i], scan[i + 1]), &grid, &opts, &cy).map_err(err)?;
    let at_star = find_limit_cycles(&setup, eps, sn.lambda_star, &grid, &opts, &cy).map_err(err)?;
    let double = at_star.len() == 1 && at_star[0].classification == CycleClass::NearDouble;
    let below = sn.lambda_star - 5e-5;
    let hyp = find_limit_cycles(&setup, eps, below, &grid, &opts, &cy).map_err(err)?;
    let unique_hyperbolic = hyp.len() == 1 && (hyp[0].multiplier - 1.0).abs() > HYPERBOLIC_MARGIN;
    let seq_ok = fixed_point_count(&setup, eps, sn.bracket.0, &grid, &opts) == 2
        && fixed_point_count(&setup, eps, sn.bracket.1, &grid, &opts) == 0;
    let bound_ok = max_count <= CYCLE_BOUND && sn.samples.iter().all(|s| s.count <= CYCLE_BOUND);
    let el = t0.elapsed();
    ensure(
        double && unique_hyperbolic && seq_ok && bound_ok && el < SWEEP_TIME,
        format!(
            "counts {counts:?}; λ̃* = {:.9} in {:?} with a double cycle at s = {:.6} ({double}); at λ̃* - 5e-5 {} cycle(s), μ = {:?} (margin {HYPERBOLIC_MARGIN}); max count {max_count} (bound {CYCLE_BOUND}); {el:.2?}",
            sn.lambda_star,
            sn.bracket,
            sn.cycle.s_star,
            hyp.len(),
            hyp.iter().map(|c| c.multiplier).collect::<Vec<_>>()
        ),
    )
}

fn spiral_dimensions() -> Result<String, String> {
    let t0 = Instant::now();
    let setup = CanardSetup::from_tuned(&simulation_tuned_simple().map_err(err)?, make_tanh_regularizer()).map_err(err)?;
    let eps = 0.05;
    let grid = uniform_grid(-0.004, 0.004, 17);
    let opts = SimOptions::default();
    let cy = CycleOptions::default();
    let sn = saddle_node_sweep(&setup, eps, (0.008625, 0.0087), &grid, &opts, &cy).map_err(err)?;
    let s = sn.cycle.s_star;
    let near = spiral_box_dimension(&setup, eps, sn.lambda_star, s + 0.002, s, &SpiralOptions::default(), &opts)
        .map_err(err)?
        .value;
    let lt = sn.lambda_star - 3e-5;
    let att = find_limit_cycles(&setup, eps, lt, &grid, &opts, &cy)
        .map_err(err)?
        .into_iter()
        .find(|c| c.classification == CycleClass::HyperbolicAttracting)
        .ok_or("no attracting hyperbolic cycle below the saddle-node")?;
    let hyp_opts = SpiralOptions {
        n_returns: 150,
        ..SpiralOptions::default()
    };
    let hyp = spiral_box_dimension(&setup, eps, lt, att.s_star - 1e-3, att.s_star, &hyp_opts, &opts)
        .map_err(err)?
        .value;
    let el = t0.elapsed();
    ensure(
        (hyp - 1.0).abs() <= SPIRAL_TOL && (near - 1.5).abs() <= SPIRAL_TOL && el < SPIRAL_TIME,
        format!("hyperbolic d = {hyp:.4} (target 1), near-double d = {near:.4} (target 1.5), tol {SPIRAL_TOL}; {el:.2?}"),
    )
}
