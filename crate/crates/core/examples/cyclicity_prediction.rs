//! Checks the standing assumptions for the tuned models, fits the order of
//! the zero of `I(s)` at `s = 0` and turns it into a bound on the number of
//! limit cycles born from the canard cycle.

use slowdiv::canard::{check_assumptions, multiplicity_of_i, predict_cyclicity, CanardSetup, CyclicityInput, FitRange};
use slowdiv::models::{default_tuned_double, default_tuned_simple};
use slowdiv::regularization::make_tanh_regularizer;

fn main() -> slowdiv::Result<()> {
    for (name, model) in [("simple zero", default_tuned_simple()?), ("double zero", default_tuned_double()?)] {
        let setup = CanardSetup::from_tuned(&model, make_tanh_regularizer())?;
        let report = check_assumptions(&setup);
        let failed: Vec<char> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        println!("{name}: assumptions passed {} {failed:?}", report.all_passed());
        let m = multiplicity_of_i(&setup, FitRange::default())?;
        println!("  slope {:.4}, multiplicity {:?}", m.slope, m.multiplicity);
        if let Some(mult) = m.multiplicity {
            let p = predict_cyclicity(CyclicityInput::Multiplicity(mult))?;
            println!("  dim {:.4}, at most {} cycles, scenarios {:?}", p.dim_b, p.bound, p.scenarios);
        }
    }
    let fixed = predict_cyclicity(CyclicityInput::Dimension(2.0 / 3.0))?;
    println!("from d = 2/3: bound {}", fixed.bound);
    Ok(())
}
