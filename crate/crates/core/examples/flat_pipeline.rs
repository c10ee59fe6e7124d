//! Doubled frame for a frame of the flat in the SL(n,R) model, with sampled angle ratios.

use eigmatch::modelgeom::{pipeline_flat, ModelSpace, SampleOptions};
use eigmatch::rational::qv;

fn main() -> eigmatch::Result<()> {
    let model = ModelSpace::new(4)?;
    let frame = vec![qv(&[1, 1, 1, -3]), qv(&[-3, 1, 1, 1]), qv(&[1, -1, 1, -1])];
    let out = pipeline_flat(
        &model,
        &frame,
        SampleOptions {
            samples: 20_000,
            seed: 1,
        },
    )?;
    for (i, [p, pp]) in out.labels.iter().enumerate() {
        println!("v{} -> b_{}{}, b_{}{}", i + 1, p.0 + 1, p.1 + 1, pp.0 + 1, pp.1 + 1);
    }
    println!("gram deviation {:e}", out.gram_deviation);
    println!("largest flat component {:e}", out.max_flat_component(&model));
    println!("sampled ratio constant {:.4}", out.ratio_estimate.unwrap_or(f64::NAN));
    Ok(())
}
