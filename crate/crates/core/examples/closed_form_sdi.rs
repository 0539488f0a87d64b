//! Slow divergence integral along a regular sliding segment, compared with
//! its closed form `2 (b² - a²)` for the canonical model.

use slowdiv::models::canonical_vi3;
use slowdiv::pws::{time_reversed, SlidingSegment};
use slowdiv::regularization::{make_arctan_regularizer, make_tanh_regularizer};
use slowdiv::sdi::{sdi_regular_segment, DEFAULT_TOL};

fn main() -> slowdiv::Result<()> {
    let sys = canonical_vi3();
    for (a, b) in [(0.1, 0.3), (0.2, 0.5), (-0.4, -0.1)] {
        let seg = SlidingSegment::on_axis(a, b);
        let t = sdi_regular_segment(&sys, &make_tanh_regularizer(), &seg, DEFAULT_TOL)?;
        let r = sdi_regular_segment(&sys, &make_arctan_regularizer(), &seg, DEFAULT_TOL)?;
        let rev = sdi_regular_segment(&time_reversed(&sys), &make_tanh_regularizer(), &seg, DEFAULT_TOL)?;
        println!(
            "[{a}, {b}]: tanh {:.12}, arctan {:.12}, closed form {:.12}, reversed {:.12}",
            t.value,
            r.value,
            2.0 * (b * b - a * a),
            rev.value
        );
    }
    Ok(())
}
