//! Slow relation function of the balanced canard cycle of the tuned model:
//! the exit point `G(s)` for each entry point `s` such that the slow
//! divergence integral from `ψ₋(s)` to `ψ₊(G(s))` vanishes.

use slowdiv::canard::{connection_endpoints, sdi_i, slow_relation_g, slow_relation_residual, CanardSetup};
use slowdiv::models::default_tuned_simple;
use slowdiv::regularization::make_tanh_regularizer;

fn main() -> slowdiv::Result<()> {
    let setup = CanardSetup::from_tuned(&default_tuned_simple()?, make_tanh_regularizer())?;
    println!("{:>8} {:>12} {:>12} {:>14} {:>12} {:>10}", "s", "psi-", "psi+", "I(s)", "G(s)", "residual");
    for k in 0..=8 {
        let s = setup.s_bar * k as f64 / 8.0;
        let (m, p) = connection_endpoints(&setup, s)?;
        let g = slow_relation_g(&setup, s, 1e-9)?;
        println!(
            "{s:8.4} {m:12.8} {p:12.8} {:14.6e} {g:12.8} {:10.1e}",
            sdi_i(&setup, s)?,
            slow_relation_residual(&setup, s, g)?
        );
    }
    let sym = CanardSetup::canonical(make_tanh_regularizer(), 0.5)?;
    let worst = (1..=10)
        .map(|k| {
            let s = sym.s_bar * k as f64 / 10.0;
            slow_relation_g(&sym, s, 1e-9).map(|g| (g - s).abs())
        })
        .collect::<slowdiv::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    println!("symmetric model: max |G(s) - s| = {worst:.1e}");
    Ok(())
}
