//! One line per acceptance criterion; fails if any criterion fails.

use geocycle::verify::{run_all, DEFAULT_SEED};

#[test]
fn acceptance() {
    let outcomes = run_all(DEFAULT_SEED);
    println!();
    for o in &outcomes {
        println!("{}", o.line());
    }
    assert_eq!(outcomes.len(), 8);
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
