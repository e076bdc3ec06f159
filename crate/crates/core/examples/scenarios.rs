// Loading a scenario from text and running its expectations.

use std::error::Error;

use jetvariant::corpus::run_scenario;
use jetvariant::scenario::Scenario;

const SOURCE: &str = r#"
name = "heat-translations"

[context]
independents = ["t", "x"]
dependents = ["u"]
aliases = { u_t = "u_10", u_x = "u_01", u_xx = "u_02" }

[[fields]]
name = "d_t"
alpha = ["1", "0"]
beta = ["0"]

[[fields]]
name = "d_x"
alpha = ["0", "1"]
beta = ["0"]

[[equation]]
lead = "u_xx"
rhs = "u_t"

[[expect]]
check = "symmetry"
order = 2
origin = "trivial"

[[expect]]
check = "invariant"
target = "u_x"
order = 1
origin = "trivial"
"#;

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let sc = Scenario::from_str_named(SOURCE, "heat.toml", "heat")?;
    let report = run_scenario(&sc, false)?;
    let mut out = format!("{}: {} fields\n", sc.name, sc.algebra.fields.len());
    for o in &report.outcomes {
        out += &format!("{:?} {} {}\n", o.status, o.check, o.target);
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run_example()?);
    Ok(())
}
