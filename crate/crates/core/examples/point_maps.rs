// Prolonged point transformations: the reflection flips curvature.

use std::error::Error;

use jetvariant::expr::{parse, print};
use jetvariant::jet::JetContext;
use jetvariant::prolong::{prolong_point_map, PointMap};

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let ctx = JetContext::curves();
    let reflection = PointMap::new("reflection", vec![parse("x", &ctx)?], vec![parse("-y", &ctx)?], &ctx)?;
    let r2 = prolong_point_map(&reflection, 2, &ctx)?;
    let k2 = parse("y2^2/(1 + y1^2)^3", &ctx)?;
    let rational_part = parse("y2", &ctx)?;
    let mut out = String::new();
    for v in ["y1", "y2"] {
        let id = ctx.resolve(v).ok_or("unknown")?;
        out += &format!("{v} -> {}\n", print(&r2.images[&id], &ctx));
    }
    out += &format!("K^2 is fixed: {}\n", r2.pull_back(&k2)?.equals(&k2));
    out += &format!(
        "y2 -> -y2, so K = y2*(1+y1^2)^(-3/2) flips sign: {}\n",
        r2.pull_back(&rational_part)?.equals(&rational_part.neg())
    );
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run_example()?);
    Ok(())
}
