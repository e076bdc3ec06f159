// An orthonomic equation, its prolongation table and normal forms.

use std::error::Error;

use jetvariant::equation::{format_table, Rule, SolvedEquation};
use jetvariant::expr::{parse, print};
use jetvariant::jet::JetContext;

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let ctx = JetContext::new(&["x", "y"], &["w"])?;
    let lead = ctx.resolve("w_10").ok_or("unknown")?;
    let eq = SolvedEquation::new(&ctx, vec![Rule { lead, rhs: parse("w*w_01", &ctx)? }])?;
    let mut out = format_table(&*eq.table(2)?, &ctx);
    out.push('\n');
    let f = parse("w_20 - w_11", &ctx)?;
    let r = eq.reduce(&f)?;
    out += &format!("w_20 - w_11 reduces to {}\n", print(&r, &ctx));
    out += &format!("reduction is idempotent: {}\n", eq.reduce(&r)?.equals(&r));
    let d = eq.total_derivative(&parse("w", &ctx)?, 0)?;
    out += &format!("D_x w on the equation = {}\n", print(&d, &ctx));
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run_example()?);
    Ok(())
}
