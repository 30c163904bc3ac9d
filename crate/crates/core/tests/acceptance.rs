//! Runs the numbered acceptance criteria and prints one line per criterion.
//!
//! Arguments that parse as numbers select criteria; the default is all of
//! them. Criteria in `KNOWN_FAILURES` are expected to fail, and the run
//! fails if any other criterion fails or if a known failure starts passing.

use std::process::ExitCode;

use fracmin::verify::{criterion, CRITERIA, DEFAULT_SEED};

/// Criteria whose targets the implementation does not reach.
const KNOWN_FAILURES: [u32; 2] = [7, 10];

fn main() -> ExitCode {
    let picked: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let ids: Vec<u32> = if picked.is_empty() { (1..=CRITERIA).collect() } else { picked };
    let mut surprises = Vec::new();
    for n in ids {
        let check = match criterion(n, DEFAULT_SEED) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("{e}");
                return ExitCode::FAILURE;
            }
        };
        let known = KNOWN_FAILURES.contains(&n);
        println!("{}{}", check.line(), if known && !check.passed { "  [known]" } else { "" });
        if check.passed == known {
            surprises.push(n);
        }
    }
    if surprises.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcome for criteria {surprises:?}");
        ExitCode::FAILURE
    }
}
