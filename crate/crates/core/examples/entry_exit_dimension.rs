//! Orbits of maps `s ↦ s - s^m` have Minkowski dimension `1 - 1/m`, which
//! recovers the multiplicity of a zero of the slow divergence integral and
//! hence the cyclicity bound of the canard cycle.

use slowdiv::canard::{generate_orbit, generate_orbit_with, CanardSetup, OrbitDirection, DEFAULT_FLOOR};
use slowdiv::fractal::{dim_from_multiplicity, dim_sequence, multiplicity_from_dim, Multiplicity};
use slowdiv::models::{default_tuned_double, default_tuned_simple};
use slowdiv::regularization::make_tanh_regularizer;

fn main() -> slowdiv::Result<()> {
    for m in 1..=3u32 {
        let map = |s: f64| Ok(if m == 1 { 0.5 * s } else { s - s.powi(m as i32) });
        let orbit = generate_orbit_with(map, 0.5, DEFAULT_FLOOR, 100_000, OrbitDirection::ForwardG);
        let d = dim_sequence(&orbit.terms)?;
        println!(
            "m = {m}: {} terms, d = {:.4} (exact {:.4}), {:?}",
            orbit.terms.len(),
            d.value,
            dim_from_multiplicity(Multiplicity::Finite(m))?,
            multiplicity_from_dim(d.value)?.m
        );
    }
    for (name, model) in [("simple zero", default_tuned_simple()?), ("double zero", default_tuned_double()?)] {
        let setup = CanardSetup::from_tuned(&model, make_tanh_regularizer())?;
        let orbit = generate_orbit(&setup, 0.5 * setup.s_bar, DEFAULT_FLOOR, 2000)?;
        let d = dim_sequence(&orbit.terms)?;
        println!("{name}: {} terms ({:?}), d = {:.4}", orbit.terms.len(), orbit.stop_reason, d.value);
    }
    Ok(())
}
