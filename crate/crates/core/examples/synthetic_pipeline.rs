// Generate a two-texture fixture, segment it end to end and score it.

use dtseg::metrics::evaluate;
use dtseg::pipeline::{segment, write_outputs, PipelineConfig};
use dtseg::synth::{generate, region_means, SynthSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let spec = SynthSpec { seed: 4, ..SynthSpec::default() };
    let fixture = generate(&spec)?;
    let means = region_means(&fixture);
    println!("region means {:.1} / {:.1}", means[0], means[1]);

    let config = PipelineConfig::default();
    let mut run = segment(&fixture.cube, &config)?;
    for t in &run.timings {
        println!("{:<22} {:.3}s", t.stage, t.seconds);
    }
    let report = evaluate(&run.consensus, &fixture.ground_truth)?;
    println!(
        "consensus energy {:.5} (best member {:.5}), PR {:.4}",
        run.final_energy(),
        run.min_member_energy(),
        report.pr
    );

    let dir = std::env::temp_dir().join("dtseg_synthetic_pipeline");
    let written = write_outputs(&mut run, &fixture.cube, &config, &dir)?;
    println!("wrote {} files under {}", written.len(), dir.display());
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
