// Fusing noisy label maps into one consensus by ICM on the mean GCE.

use dtseg::fusion::{consensus_energy, gce_star, icm_fuse, IcmParams};
use dtseg::SegmentationMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (h, w) = (20, 20);
    let truth: Vec<u32> = (0..h * w).map(|i| u32::from(i % w >= w / 2)).collect();
    let truth = SegmentationMap::new(h, w, truth)?;

    // Six members, each with 15% of pixels flipped at random.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let members: Vec<SegmentationMap> = (0..6)
        .map(|_| {
            let labels: Vec<u32> = truth
                .labels()
                .iter()
                .map(|&l| if rng.random_bool(0.15) { 1 - l } else { l })
                .collect();
            SegmentationMap::compacted(h, w, &labels)
        })
        .collect::<Result<_, _>>()?;

    let outcome = icm_fuse(&members, &IcmParams { labels: Some(2), ..IcmParams::default() })?;
    println!(
        "start member {} energy {:.4}, {} sweeps",
        outcome.init_member,
        outcome.initial_energy,
        outcome.sweeps()
    );
    for (i, e) in outcome.energy_trace.iter().enumerate() {
        println!("  sweep {}: {e:.5}", i + 1);
    }
    let final_energy = consensus_energy(&outcome.map, &members)?;
    assert!(final_energy <= outcome.initial_energy);
    println!("GCE* to the clean map: {:.4}", gce_star(&outcome.map, &truth)?);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
