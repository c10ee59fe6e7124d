//! The staged greedy matching with its trace, cross-checked by the exact oracle.

use eigmatch::framematrix::BinaryMatrix;
use eigmatch::matcher::{greedy_match, oracle_match, validate};

fn main() -> eigmatch::Result<()> {
    let a = BinaryMatrix::new(vec![
        vec![0, 0, 1, 0, 1, 1],
        vec![1, 1, 1, 0, 0, 0],
        vec![1, 0, 1, 1, 0, 1],
    ])?;
    let (m, trace) = greedy_match(&a)?;
    for s in &trace.stages {
        println!(
            "stage {} phase {}: order {:?}, row {} takes columns {:?}",
            s.t,
            s.phase,
            s.order,
            s.top + 1,
            (s.chosen.0 + 1, s.chosen.1 + 1)
        );
    }
    println!("pairs {:?}, valid {}", m.one_based(), validate(&a, &m));

    // Needs a repair: the last row is squeezed out by the first choice.
    let b = BinaryMatrix::new(vec![
        vec![1, 1, 1, 0, 0, 0, 0],
        vec![0, 1, 0, 1, 1, 0, 0],
        vec![1, 0, 0, 1, 0, 0, 1],
    ])?;
    let (m, trace) = greedy_match(&b)?;
    for r in &trace.repairs {
        println!(
            "{:?} at stage {} for row {}: {:?}",
            r.kind,
            r.stage,
            r.failing_row + 1,
            r.swaps
        );
    }
    println!(
        "pairs {:?}, oracle finds one too: {}",
        m.one_based(),
        oracle_match(&b).is_some()
    );
    Ok(())
}
