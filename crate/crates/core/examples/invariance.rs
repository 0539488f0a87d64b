//! The slow divergence integral is unchanged by smooth coordinate changes
//! and by multiplying both fields with a positive function.

use std::sync::Arc;

use slowdiv::field::{Poly2, SmoothMap2};
use slowdiv::models::{canonical_vi3, default_tuned_simple};
use slowdiv::pws::{Diffeomorphism, PolyDiffeo, SlidingSegment};
use slowdiv::regularization::make_tanh_regularizer;
use slowdiv::sdi::{e_weight, invariance_report, rescaled_divergence_crosscheck};

fn main() -> slowdiv::Result<()> {
    let reg = make_tanh_regularizer();
    let t: Arc<dyn Diffeomorphism> = Arc::new(PolyDiffeo::new(
        Poly2::from_terms(&[(1, 0, 1.0), (0, 1, 0.1), (2, 0, 0.05)]),
        Poly2::from_terms(&[(0, 1, 1.0), (1, 1, 0.2), (2, 0, 0.1)]),
    ));
    let g = SmoothMap2::closure(|x, y, _| 2.0 + (x - y).cos());
    let tuned = default_tuned_simple()?.system;
    for (name, sys) in [("canonical", canonical_vi3()), ("tuned", tuned)] {
        let seg = SlidingSegment::on_axis(0.1, 0.3);
        let rep = invariance_report(&sys, &reg, &seg, t.clone(), &g, 1e-11)?;
        println!(
            "{name}: original {:.12}, pulled back {:.12}, rescaled {:.12}, max difference {:.1e}",
            rep.original.value,
            rep.pulled_back.value,
            rep.scaled.value,
            rep.max_difference()
        );
        let (e, div) = rescaled_divergence_crosscheck(&sys, &reg, 0.2)?;
        println!("{name}: E(0.2, 0) = {e:.10}, layer divergence {div:.10}, E(0.3, 0) = {:.10}", e_weight(&sys, &reg, [0.3, 0.0])?);
    }
    Ok(())
}
