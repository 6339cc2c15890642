//! Runner for the acceptance suite. The test target `acceptance` calls
//! [`run`]; the same criteria back `squeezamp validate`.

use squeezamp::validation::{run_criterion, ValidationOptions, CRITERIA};

/// Runs the selected criteria (all when `ids` is empty), printing one block
/// per criterion and the summary line. Returns the number of failures.
pub fn run(ids: &[usize]) -> usize {
    let opts = ValidationOptions::default();
    let ids: Vec<usize> = if ids.is_empty() { (1..=CRITERIA).collect() } else { ids.to_vec() };
    let mut failed = 0;
    for &id in &ids {
        let outcome = run_criterion(id, &opts);
        if !outcome.passed() {
            failed += 1;
        }
        println!("{outcome}");
    }
    println!("PASS {}/{}", ids.len() - failed, ids.len());
    failed
}
