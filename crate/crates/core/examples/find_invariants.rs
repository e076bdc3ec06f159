// Solving for all invariants of a prescribed shape, with a pseudogroup.

use std::error::Error;

use jetvariant::equation::{Rule, SolvedEquation};
use jetvariant::expr::{parse, print, RatFun};
use jetvariant::invariants::{find_invariants_linear, Ansatz, FamilySpec, LieAlgebraSpec};
use jetvariant::jet::JetContext;
use jetvariant::prolong::PointVectorField;

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let ctx = JetContext::new(&["x", "y"], &["u"])?
        .with_alias_named("u_x", "u_10")?
        .with_alias_named("u_y", "u_01")?;
    let p = |s: &str| parse(s, &ctx);
    let fields = vec![
        PointVectorField::new("d_y", vec![p("0")?, p("1")?], vec![p("0")?], &ctx)?,
        PointVectorField::new("d_u", vec![p("0")?, p("0")?], vec![p("1")?], &ctx)?,
    ];
    let g = LieAlgebraSpec {
        fields,
        families: vec![FamilySpec::parse("f(x)*d_x", 0, &ctx)?],
    };
    let lead = ctx.resolve("u_x").ok_or("unknown")?;
    let eq = SolvedEquation::new(&ctx, vec![Rule { lead, rhs: RatFun::zero() }])?;
    let ansatz = Ansatz {
        order: 1,
        degree: 1,
        denominator: RatFun::one(),
        variables: None,
    };
    let basis = find_invariants_linear(&g, &ansatz, &ctx, Some(&eq))?;
    let shown: Vec<String> = basis.iter().map(|b| print(b, &ctx)).collect();
    Ok(format!("first-order invariants on u_x = 0: span{{{}}}\n", shown.join(", ")))
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run_example()?);
    Ok(())
}
