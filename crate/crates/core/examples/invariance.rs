// Checking invariance under the Euclidean group and reading residues.

use std::error::Error;

use jetvariant::expr::{parse, print};
use jetvariant::invariants::{is_invariant, LieAlgebraSpec};
use jetvariant::jet::JetContext;
use jetvariant::prolong::PointVectorField;

pub fn euclidean(ctx: &JetContext) -> Result<LieAlgebraSpec, Box<dyn Error>> {
    let field = |name: &str, a: &str, b: &str| -> Result<PointVectorField, Box<dyn Error>> {
        Ok(PointVectorField::new(name, vec![parse(a, ctx)?], vec![parse(b, ctx)?], ctx)?)
    };
    Ok(LieAlgebraSpec::from_fields(vec![
        field("translation-x", "1", "0")?,
        field("translation-y", "0", "1")?,
        field("rotation", "-y", "x")?,
    ]))
}

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let ctx = JetContext::curves();
    let g = euclidean(&ctx)?;
    let mut out = String::new();
    for src in ["y2^2/(1 + y1^2)^3", "y2"] {
        let f = parse(src, &ctx)?;
        let v = is_invariant(&g, &f, &ctx, None, 2)?;
        out += &format!("{src}: invariant = {}", v.invariant);
        if let Some((gen, res)) = v.witness {
            out += &format!(" (`{gen}` leaves {})", print(&res, &ctx));
        }
        out.push('\n');
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run_example()?);
    Ok(())
}
