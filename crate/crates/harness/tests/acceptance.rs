//! Runs all twelve acceptance criteria and prints one line per criterion.
//! Criteria listed in `KNOWN_RED` may print FAIL without failing the test.

use std::io::Write;

use gapstress_harness::verify::{ALL, KNOWN_RED, verify};

#[test]
fn acceptance() {
    let results = verify(&ALL, None, None).unwrap();
    assert_eq!(results.len(), 12);
    // straight to stderr so the lines show up without --nocapture
    let mut err = std::io::stderr().lock();
    for r in &results {
        writeln!(err, "{}", r.line()).unwrap();
    }
    for (id, reason) in KNOWN_RED {
        writeln!(err, "known red {id}: {reason}").unwrap();
    }
    let bad: Vec<String> = results.iter().filter(|r| !r.acceptable()).map(|r| r.line()).collect();
    assert!(bad.is_empty(), "unexpected failures:\n{}", bad.join("\n"));
}
