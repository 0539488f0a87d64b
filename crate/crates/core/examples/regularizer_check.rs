//! Admissibility checks of the built-in transition functions and of a
//! user-supplied one, with the composite `φ'(φ⁻¹(p))` against its closed form.

use std::f64::consts::PI;

use slowdiv::regularization::{make_arctan_regularizer, make_tanh_regularizer, verify_regularizer, GridSpec, Regularizer};

fn main() {
    let logistic = Regularizer::custom("logistic", |u| 1.0 / (1.0 + (-u).exp()), |u| {
        let e = (-u.abs()).exp();
        e / (1.0 + e).powi(2)
    });
    for reg in [make_tanh_regularizer(), make_arctan_regularizer(), logistic] {
        let r = verify_regularizer(&reg, GridSpec::default());
        println!("{}: passed {} (inverse error {:.1e}, limit gap {:.1e})", r.name, r.passed, r.inverse_max_error, r.limit_gap);
    }
    let (t, a) = (make_tanh_regularizer(), make_arctan_regularizer());
    let mut worst = [0.0f64; 2];
    for i in 1..1000 {
        let p = i as f64 / 1000.0;
        worst[0] = worst[0].max((t.q_composite(p) - 2.0 * p * (1.0 - p)).abs());
        worst[1] = worst[1].max((a.q_composite(p) - (PI * p).sin().powi(2) / PI).abs());
    }
    println!("largest deviation from the closed forms: tanh {:.1e}, arctan {:.1e}", worst[0], worst[1]);
}
