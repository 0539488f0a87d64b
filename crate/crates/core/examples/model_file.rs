//! Loads a model from the JSON model format, classifies its two-fold and
//! integrates the slow divergence up to it. Malformed files are reported
//! with line and column.

use slowdiv::models::{canonical_vi3, ModelFile};
use slowdiv::pws::classify_two_fold;
use slowdiv::sdi::{sdi_to_two_fold, DEFAULT_TOL};

fn main() -> slowdiv::Result<()> {
    let text = serde_json::to_string_pretty(&ModelFile::from_system("canonical", &canonical_vi3(), None)?)?;
    println!("{text}");
    let file = ModelFile::parse(&text)?;
    let sys = file.to_system()?;
    let reg = file.to_regularizer()?;
    println!("two-fold: {:?}", classify_two_fold(&sys, [0.0, 0.0])?);
    println!("integral over [0, 0.3]: {:.10}", sdi_to_two_fold(&sys, &reg, 0.3, DEFAULT_TOL)?.value);
    match ModelFile::parse("{\n  \"schema\": \"pws-model/1\",\n  \"zPlus\": [1,\n}") {
        Err(e) => println!("malformed file: {e}"),
        Ok(_) => println!("malformed file unexpectedly parsed"),
    }
    Ok(())
}
