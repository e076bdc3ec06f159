// Driving the command line in-process and reading its JSON report.

use std::error::Error;

use jetvariant::cli::run;

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let out = run(["jetvariant", "--json", "check", "euclidean-curves", "--invariant", "K2", "--order", "2"]);
    let v: serde_json::Value = serde_json::from_str(&out.stdout)?;
    Ok(format!(
        "exit {} schema {} status {}\n",
        out.code, v["schema_version"], v["status"]
    ))
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run_example()?);
    Ok(())
}
