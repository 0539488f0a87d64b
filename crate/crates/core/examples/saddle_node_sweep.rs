//! Locates the saddle-node bifurcation of canard cycles in the regularized
//! tuned model and lists the cycles on either side of it.

use std::time::Instant;

use slowdiv::canard::CanardSetup;
use slowdiv::models::simulation_tuned_simple;
use slowdiv::regularization::make_tanh_regularizer;
use slowdiv::simulator::{displacement, find_limit_cycles, saddle_node_sweep, uniform_grid, CycleOptions, SimOptions};

fn main() -> slowdiv::Result<()> {
    let model = simulation_tuned_simple()?;
    let setup = CanardSetup::from_tuned(&model, make_tanh_regularizer())?;
    let eps = 0.05;
    let grid = uniform_grid(-0.004, 0.004, 17);
    let opts = SimOptions::default();
    let cy = CycleOptions::default();

    for lt in [0.0, 0.008, 0.0086, 0.008625, 0.0087] {
        let t = Instant::now();
        let d = displacement(&setup, eps, lt, &grid, &opts);
        println!("λ̃ = {lt}: {:?} ({:.2?})", d.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>(), t.elapsed());
    }
    let t = Instant::now();
    let sn = saddle_node_sweep(&setup, eps, (0.008625, 0.0087), &grid, &opts, &cy)?;
    println!("λ̃* = {:.9} (bracket {:?}), max P(s)-s = {:.2e}, {:?} ({:.2?})", sn.lambda_star, sn.bracket, sn.max_displacement, sn.cycle, t.elapsed());
    for lt in [sn.lambda_star - 3e-5, sn.lambda_star - 5e-6, sn.lambda_star + 1e-5] {
        println!("λ̃ = {lt:.6}: {:?}", find_limit_cycles(&setup, eps, lt, &grid, &opts, &cy)?);
    }
    Ok(())
}
