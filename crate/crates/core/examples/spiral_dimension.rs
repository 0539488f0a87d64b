//! Box dimension of spiral trajectories of the regularized tuned model that
//! accumulate on a hyperbolic and on a nearly double limit cycle. The first
//! is close to 1 and the second close to 3/2.

use std::time::Instant;

use slowdiv::canard::CanardSetup;
use slowdiv::models::simulation_tuned_simple;
use slowdiv::regularization::make_tanh_regularizer;
use slowdiv::simulator::{
    find_limit_cycles, saddle_node_sweep, spiral_box_dimension, uniform_grid, CycleClass, CycleOptions, SimOptions,
    SpiralOptions,
};

fn main() -> slowdiv::Result<()> {
    let setup = CanardSetup::from_tuned(&simulation_tuned_simple()?, make_tanh_regularizer())?;
    let eps = 0.05;
    let grid = uniform_grid(-0.004, 0.004, 17);
    let opts = SimOptions::default();
    let cy = CycleOptions::default();
    let sn = saddle_node_sweep(&setup, eps, (0.008625, 0.0087), &grid, &opts, &cy)?;
    println!("saddle-node at λ̃* = {:.9}, s* = {:.6}", sn.lambda_star, sn.cycle.s_star);

    let t = Instant::now();
    let spiral = SpiralOptions::default();
    let s = sn.cycle.s_star;
    let d = spiral_box_dimension(&setup, eps, sn.lambda_star, s + 0.002, s, &spiral, &opts)?;
    println!("near-double cycle: d = {:.4} ({:?}, {:.1?})", d.value, d.model, t.elapsed());

    let lt = sn.lambda_star - 3e-5;
    let cycles = find_limit_cycles(&setup, eps, lt, &grid, &opts, &cy)?;
    let Some(att) = cycles.iter().find(|c| c.classification == CycleClass::HyperbolicAttracting) else {
        println!("no attracting cycle at λ̃ = {lt}");
        return Ok(());
    };
    let t = Instant::now();
    let hyp = SpiralOptions {
        n_returns: 150,
        ..SpiralOptions::default()
    };
    let d = spiral_box_dimension(&setup, eps, lt, att.s_star - 1e-3, att.s_star, &hyp, &opts)?;
    println!("hyperbolic cycle (μ = {:.3}): d = {:.4} ({:?}, {:.1?})", att.multiplier, d.value, d.model, t.elapsed());
    Ok(())
}
