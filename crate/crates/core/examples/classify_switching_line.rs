//! Classifies points of the switching line of the canonical two-fold model
//! and prints the Filippov sliding vector field on each sliding branch.

use slowdiv::models::{canonical_vi3, canonical_with_c};
use slowdiv::pws::{classify_boundary_point, classify_two_fold, filippov_sliding_vf, tau};

fn main() -> slowdiv::Result<()> {
    let sys = canonical_vi3();
    for x in [-0.6, -0.2, 0.0, 0.2, 0.6] {
        let c = classify_boundary_point(&sys, [x, 0.0])?;
        if c.is_sliding() {
            let v = filippov_sliding_vf(&sys, [x, 0.0])?;
            let t = tau(&sys, [x, 0.0])?;
            println!("x = {x:5.2}: {:?}, tau = {t:.4}, sliding field ({:.4}, {:.4})", c.tag, v[0], v[1]);
        } else {
            println!("x = {x:5.2}: {:?} {:?}", c.tag, c.tangency);
        }
    }
    println!("two-fold of the canonical model: {:?}", classify_two_fold(&sys, [0.0, 0.0])?);
    println!("with c = 0.5: {:?}", classify_two_fold(&canonical_with_c(0.5), [0.0, 0.0])?);
    Ok(())
}
