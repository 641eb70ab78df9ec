// Weak segmentations from every plane family and projection seed.

use dtseg::ensemble::{generate_ensemble, EnsembleConfig};
use dtseg::features::{FeatureParams, LbpParams};
use dtseg::metrics::pr_index;
use dtseg::synth::{generate, SynthSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let fixture = generate(&SynthSpec {
        height: 32,
        width: 32,
        frames: 12,
        ..SynthSpec::default()
    })?;
    let cfg = EnsembleConfig {
        replicates: 2,
        projection_dim: 60,
        ..EnsembleConfig::default()
    };
    let ensemble = generate_ensemble(
        &fixture.cube,
        &LbpParams::default(),
        &FeatureParams::default(),
        &cfg,
    )?;
    assert_eq!(ensemble.len(), cfg.ensemble_size());

    for m in &ensemble.members {
        let pr = pr_index(&m.map, &fixture.ground_truth)?;
        println!(
            "{:<14} seed {:>20}  {} labels  PR {pr:.3}",
            m.file_stem(),
            m.seed,
            m.map.num_labels()
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
