// Prolonging the plane rotation to curve jets, two ways.

use std::error::Error;

use jetvariant::expr::{parse, print};
use jetvariant::jet::JetContext;
use jetvariant::prolong::{prolong_field, prolong_field_characteristic, PointVectorField};

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let ctx = JetContext::curves();
    let rotation = PointVectorField::new(
        "rotation",
        vec![parse("-y", &ctx)?],
        vec![parse("x", &ctx)?],
        &ctx,
    )?;
    let p = prolong_field(&rotation, 3, &ctx);
    let c = prolong_field_characteristic(&rotation, 3, &ctx);
    let mut out = String::new();
    for (v, coeff) in &p.coeffs {
        out += &format!("d_{}: {}\n", ctx.name_of(*v), print(coeff, &ctx));
    }
    let agree = p
        .coeffs
        .iter()
        .all(|(v, a)| c.coeff(*v).map_or(a.is_zero(), |b| a.equals(b)));
    out += &format!("recursion and characteristic formulas agree: {agree}\n");
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run_example()?);
    Ok(())
}
