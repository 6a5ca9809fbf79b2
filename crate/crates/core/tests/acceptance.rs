//! Runs the nine acceptance checks and prints one PASS/FAIL line each.

use std::io::Write;

use somc::acceptance;

#[test]
fn acceptance_suite() {
    let reports = acceptance::run(None);
    // Written to the stdout handle directly so the lines survive output capture.
    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    for r in &reports {
        writeln!(out, "{r}").unwrap();
    }
    let failed: Vec<_> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
