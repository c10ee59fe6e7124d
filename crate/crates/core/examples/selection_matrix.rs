//! Builds the selection matrix of a frame and checks the five overlap properties.

use eigmatch::framematrix::{build_matrix, verify_properties, FrameSpec};
use eigmatch::rational::qv;
use eigmatch::rootdata::lookup;

fn main() -> eigmatch::Result<()> {
    let space = lookup("SL(4,R)")?;
    let frame = FrameSpec::new(
        &space,
        vec![qv(&[1, 1, 1, -3]), qv(&[-3, 1, 1, 1]), qv(&[1, -1, 1, -1])],
    )?;
    let a = build_matrix(&frame)?;
    print!("{}", a.to_text());

    let report = verify_properties(&a.grid, &space)?;
    println!("row weights {:?}", report.row_weights);
    for v in &report.verdicts {
        println!(
            "({}) {}: {}",
            v.id,
            v.statement,
            if v.holds { "holds" } else { "fails" }
        );
    }

    let so = lookup("SO(3,5)")?;
    let frame = FrameSpec::new(&so, vec![qv(&[1, 0, 0]), qv(&[1, 1, 0]), qv(&[3, 2, 1])])?;
    let b = build_matrix(&frame)?;
    println!("\n{} with {} columns:", so.name, b.cols());
    print!("{}", b.to_text());
    println!("all properties hold: {}", verify_properties(&b.grid, &so)?.all_pass());
    Ok(())
}
