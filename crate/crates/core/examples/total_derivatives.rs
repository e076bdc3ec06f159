// Total derivatives and the horizontal differential.

use std::error::Error;

use jetvariant::expr::{parse, print};
use jetvariant::jet::{horizontal_differential, total_derivative, JetContext};

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let ctx = JetContext::new(&["x", "y"], &["u"])?;
    let f = parse("x*u_10^2 + y*u", &ctx)?;
    let dx = total_derivative(&f, 0, &ctx);
    let dy = total_derivative(&f, 1, &ctx);
    let dxy = total_derivative(&dx, 1, &ctx);
    let dyx = total_derivative(&dy, 0, &ctx);
    let mut out = String::new();
    out += &format!("D_x f = {}\n", print(&dx, &ctx));
    out += &format!("D_y f = {}\n", print(&dy, &ctx));
    out += &format!("D_y D_x f = D_x D_y f: {}\n", dxy.equals(&dyx));
    let h = horizontal_differential(&f, &ctx);
    out += &format!("horizontal differential has {} components\n", h.components.len());
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run_example()?);
    Ok(())
}
