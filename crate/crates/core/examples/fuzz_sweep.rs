//! Property and matching sweep over seeded random frames for every space of rank 2..6.
//!
//! ```text
//! cargo run --release --example fuzz_sweep -- 1000
//! ```

use eigmatch::fuzz::{sweep, unconstrained_sweep};
use eigmatch::rootdata::catalogue;

fn main() -> eigmatch::Result<()> {
    let count = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    for s in catalogue()
        .into_iter()
        .filter(|s| !s.excluded && (2..=6).contains(&s.rank))
    {
        let st = sweep(&s, count, 1)?;
        println!(
            "{:<10} frames {:>5}  properties {}  matching {}  repairs {:>3}  equal rows {:>4}",
            st.space,
            st.frames,
            if st.properties_pass() { "ok" } else { "FAIL" },
            if st.matching_pass() { "ok" } else { "FAIL" },
            st.repairs,
            st.equal_row_frames
        );
    }
    let u = unconstrained_sweep(count, 1);
    println!(
        "unconstrained: {} matrices, greedy {}, oracle {}, unsound {}",
        u.matrices, u.greedy_successes, u.oracle_successes, u.unsound
    );
    Ok(())
}
