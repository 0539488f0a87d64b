//! Improper slow divergence integral up to the visible-invisible two-fold,
//! for both regularizers and on both sides of the fold.

use slowdiv::models::canonical_vi3;
use slowdiv::regularization::{make_arctan_regularizer, make_tanh_regularizer};
use slowdiv::sdi::{phi_integrand, sdi_split_sum, sdi_to_two_fold, DEFAULT_TOL};

fn main() -> slowdiv::Result<()> {
    let sys = canonical_vi3();
    for reg in [make_tanh_regularizer(), make_arctan_regularizer()] {
        let r = sdi_to_two_fold(&sys, &reg, 0.3, DEFAULT_TOL)?;
        let l = sdi_to_two_fold(&sys, &reg, -0.3, DEFAULT_TOL)?;
        println!("{}: [0, 0.3] = {:.10} ({} subdivisions, converged {})", reg.name(), r.value, r.subdivisions, r.converged);
        println!("{}: [-0.3, 0] = {:.10}", reg.name(), l.value);
        println!("{}: split sum over [-0.3, 0.2] = {:.10}", reg.name(), sdi_split_sum(&sys, &reg, -0.3, 0.2, DEFAULT_TOL)?.value);
        let near: Vec<String> = [1e-2, 1e-4, 1e-6].iter().map(|x| format!("{:.3e}", phi_integrand(&sys, &reg, *x))).collect();
        println!("{}: integrand near the fold {near:?}", reg.name());
    }
    Ok(())
}
