use std::collections::BTreeSet;
use std::io::Write;

use tenscomb::verify::{run_suite, thread_pool, CRITERIA};

/// Criteria that cannot pass with the formulas as given; see the README.
const KNOWN_FAILING: [usize; 3] = [11, 14, 15];

#[test]
fn acceptance() {
    let ids: Vec<usize> = (1..=CRITERIA).collect();
    let results = thread_pool().unwrap().install(|| run_suite(&ids, 42));
    assert_eq!(results.len(), CRITERIA);
    // written to the handle directly so the lines survive test output capture
    let mut out = std::io::stdout().lock();
    for r in &results {
        writeln!(out, "{}", r.line()).unwrap();
        if !r.passed {
            writeln!(out, "    {}", r.detail).unwrap();
        }
    }
    drop(out);
    let failed: BTreeSet<usize> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert_eq!(failed, KNOWN_FAILING.into_iter().collect::<BTreeSet<_>>());
}
