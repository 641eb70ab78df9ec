// Accuracy and run time as the projection dimension grows.

use dtseg::pipeline::{sweep_csv, sweep_k, LabeledVideo, PipelineConfig};
use dtseg::synth::{generate, SynthSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let videos = (0..2)
        .map(|seed| {
            let f = generate(&SynthSpec {
                height: 32,
                width: 32,
                frames: 12,
                seed,
                ..SynthSpec::default()
            })?;
            Ok(LabeledVideo {
                name: format!("fixture_{seed}"),
                cube: f.cube,
                ground_truth: f.ground_truth,
            })
        })
        .collect::<dtseg::Result<Vec<_>>>()?;

    let rows = sweep_k(&videos, &PipelineConfig::default(), &[10, 40, 100])?;
    print!("{}", sweep_csv(&rows));
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
