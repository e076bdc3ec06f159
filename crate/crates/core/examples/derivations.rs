// Tresse derivatives, commutators and their decomposition.

use std::error::Error;

use jetvariant::expr::{parse, print};
use jetvariant::invariants::{commutator, decompose_commutator, tresse_derivatives, Decomposition, Derivation};
use jetvariant::jet::JetContext;

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let ctx = JetContext::new(&["x", "y"], &["u"])?
        .with_alias_named("u_x", "u_10")?
        .with_alias_named("u_y", "u_01")?
        .with_alias_named("u_xy", "u_11")?;
    let mut out = String::new();
    let fs = vec![parse("u", &ctx)?, parse("y", &ctx)?];
    let dual = tresse_derivatives(&fs, &ctx, None)?;
    for (name, d) in ["d/du", "d/dy"].iter().zip(&dual) {
        let c: Vec<String> = d.coefficients.iter().map(|c| print(c, &ctx)).collect();
        out += &format!("{name} = ({})\n", c.join(", "));
    }
    let nabla = Derivation::new(vec![parse("1/u_x", &ctx)?, parse("0", &ctx)?]);
    let dy = Derivation::total(1, 2);
    let c = commutator(&nabla, &dy, &ctx, None)?;
    out += &format!("[nabla_x, D_y] = ({})*D_x\n", print(&c.coefficients[0], &ctx));
    if let Decomposition::Coefficients(r) = decompose_commutator(&c, &[nabla, dy], &ctx, None)? {
        let r: Vec<String> = r.iter().map(|x| print(x, &ctx)).collect();
        out += &format!("in the basis (nabla_x, D_y): ({})\n", r.join(", "));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run_example()?);
    Ok(())
}
