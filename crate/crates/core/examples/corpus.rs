// Running the shipped worked examples as a library call.

use std::error::Error;

use jetvariant::cli::corpus_text;
use jetvariant::corpus::run_corpus;

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let report = run_corpus(Some("euclidean"), true)?;
    Ok(corpus_text(&report))
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    print!("{}", run_example()?);
    Ok(())
}
