// Counting invariants by exact orbit ranks and fitting a Poincare series.

use std::error::Error;

use jetvariant::expr::parse;
use jetvariant::invariants::LieAlgebraSpec;
use jetvariant::jet::JetContext;
use jetvariant::orbitdim::{hilbert_function, poincare_fit, Sampling};
use jetvariant::prolong::PointVectorField;

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let ctx = JetContext::curves();
    let field = |name: &str, a: &str, b: &str| -> Result<PointVectorField, Box<dyn Error>> {
        Ok(PointVectorField::new(name, vec![parse(a, &ctx)?], vec![parse(b, &ctx)?], &ctx)?)
    };
    let g = LieAlgebraSpec::from_fields(vec![
        field("translation-x", "1", "0")?,
        field("translation-y", "0", "1")?,
        field("rotation", "-y", "x")?,
    ]);
    let profile = hilbert_function(&g, &ctx, None, 5, 8, &Sampling::default())?;
    let fit = poincare_fit(&profile);
    Ok(format!(
        "d_k = {:?}\norbit dimensions = {:?}\nfit: {:?}, d = {:?}, R = {:?}\n",
        profile.d, profile.orbit, fit.status, fit.d, fit.r
    ))
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run_example()?);
    Ok(())
}
