//! Release gate: runs every acceptance criterion at its pinned tolerance and
//! prints one pass/fail line per criterion.
//!
//! The full suite takes several minutes (it contains a 64^3 solver pair and
//! the full witness sweeps), so it runs as a single test.

use mfnls_core::acceptance;

#[test]
fn acceptance_criteria() {
    let reports = acceptance::run_all();
    let mut all_pass = true;
    for r in &reports {
        println!("{}", r.line());
        all_pass &= r.pass;
    }
    assert!(
        all_pass,
        "acceptance criteria failed:\n{}",
        reports
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.line())
            .collect::<Vec<_>>()
            .join("\n")
    );
}
