//! Perturbed frames `exp(εu)·w·exp(-εu)`: snapping, aligned rotations and linear Gram scaling.

use eigmatch::modelgeom::{pipeline_perturbed, random_flat_frame, random_unit_skew, ModelSpace, SampleOptions};

fn main() -> eigmatch::Result<()> {
    let model = ModelSpace::new(4)?;
    let frame = random_flat_frame(4, true, 3);
    let u = random_unit_skew(4, 3);
    let opts = SampleOptions { samples: 0, seed: 1 };
    for eps in [1e-2, 1e-3, 1e-4] {
        let out = pipeline_perturbed(&model, &frame, &u, eps, opts)?;
        let blocks: Vec<_> = out.snaps.iter().map(|s| s.blocks.clone()).collect();
        println!(
            "eps {eps:e}: gram {:.3e} (/eps {:.4}), |<v', v>| {:.1e}, |k' - 1| {:.2e}, blocks {:?}",
            out.frame.gram_deviation,
            out.frame.gram_deviation / eps,
            out.self_overlap,
            out.rotation_sizes.iter().copied().fold(0.0, f64::max),
            blocks
        );
    }
    let out = pipeline_perturbed(&model, &frame, &u, 1e-3, opts)?;
    println!("bracket floors {:?}", out.bracket_floors);
    Ok(())
}
