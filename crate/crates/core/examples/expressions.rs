// Exact rational functions on a jet space: parsing, arithmetic, printing.

use std::error::Error;

use jetvariant::expr::{parse, print};
use jetvariant::jet::JetContext;

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let ctx = JetContext::new(&["x", "y"], &["u"])?
        .with_alias_named("u_x", "u_10")?
        .with_alias_named("u_y", "u_01")?;
    let f = parse("(u_x^2 + u_y^2)/u", &ctx)?;
    let g = parse("u_x - 1/2*u_y", &ctx)?;
    let mut out = String::new();
    out += &format!("f = {}\n", print(&f, &ctx));
    out += &format!("f*g = {}\n", print(&f.mul(&g), &ctx));
    out += &format!("f - f = {}\n", print(&f.sub(&f), &ctx));
    let u_x = ctx.resolve("u_x").ok_or("no u_x")?;
    out += &format!("df/du_x = {}\n", print(&f.partial(u_x), &ctx));
    let back = parse(&print(&f, &ctx), &ctx)?;
    out += &format!("reparses to the same value: {}\n", back.equals(&f));
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run_example()?);
    Ok(())
}
