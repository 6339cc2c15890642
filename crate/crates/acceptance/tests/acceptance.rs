//! Every acceptance criterion at its stated tolerance, one line each.
//!
//! Custom harness so the lines are printed whether or not a criterion
//! passes. Numeric arguments select criteria: `cargo test --test acceptance -- 3 5`.

use std::process::ExitCode;

fn main() -> ExitCode {
    let ids: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if squeezamp_validation::run(&ids) == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
