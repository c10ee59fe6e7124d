//! Prints the catalogue of spaces with their dimension data and identity checks.

use eigmatch::rootdata::catalogue;

fn main() {
    println!(
        "{:<10} {:>4} {:>5} {:>5} {:>5} {:>4}  roots",
        "space", "rank", "dimX", "dimK", "dimM", "Σm"
    );
    for s in catalogue() {
        let roots: Vec<String> = s
            .rootsys
            .positives
            .iter()
            .take(4)
            .map(|r| format!("{}^{}", r.label(), r.multiplicity))
            .collect();
        println!(
            "{:<10} {:>4} {:>5} {:>5} {:>5} {:>4}  {} ...{}",
            s.name,
            s.rank,
            s.dim_x,
            s.dim_k,
            s.dim_m,
            s.columns(),
            roots.join(" "),
            if s.excluded { " (excluded)" } else { "" }
        );
        for bad in s.identity_violations() {
            println!("  violation: {bad}");
        }
    }
}
