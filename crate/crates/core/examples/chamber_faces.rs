//! Chamber faces and stabilizer codimensions.
//!
//! ```text
//! cargo run --example chamber_faces -- "Sp(6,R)"
//! ```

use eigmatch::chamber::{enumerate_faces, verify_codim_bounds};
use eigmatch::rational::format_q;
use eigmatch::rootdata::lookup;

fn main() -> eigmatch::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "SL(4,R)".into());
    let space = lookup(&name)?;
    for f in enumerate_faces(&space) {
        let w: Vec<String> = f.witness.iter().map(format_q).collect();
        println!(
            "S = {:?}: {} vanishing roots, codim {}, witness ({})",
            f.simple_subset.iter().map(|i| i + 1).collect::<Vec<_>>(),
            f.vanishing.len(),
            f.codim,
            w.join(", ")
        );
    }
    let report = verify_codim_bounds(&space)?;
    println!(
        "bound {}: min codim {}, pass {}",
        report.faces[0].bound, report.min_codim, report.pass
    );
    Ok(())
}
