// LBP codes and windowed code histograms for one plane family.

use dtseg::features::{extract_features, lbp_code, requantize, FeatureParams, LbpParams};
use dtseg::synth::{generate, SynthSpec};
use dtseg::{PlaneFamily, Slice};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let params = LbpParams::default();

    // A flat patch sets every bit.
    let flat = Slice::from_image(3, 3, vec![50; 9])?;
    let code = lbp_code(&flat, 1, 1, &params)?;
    assert_eq!(code, 255);
    println!("flat patch: code {code}, bin {}", requantize(code, params.neighbors, params.bins));

    // A bright centre clears every bit.
    let mut peak = vec![10; 9];
    peak[4] = 200;
    let peak = Slice::from_image(3, 3, peak)?;
    assert_eq!(lbp_code(&peak, 1, 1, &params)?, 0);

    let fixture = generate(&SynthSpec {
        height: 24,
        width: 24,
        frames: 10,
        ..SynthSpec::default()
    })?;
    let features = FeatureParams::default();
    for plane in PlaneFamily::ALL {
        let m = extract_features(&fixture.cube, plane, &params, &features)?;
        // Each row holds one histogram of `bins` entries per retained frame.
        assert_eq!(m.dim, 10 * params.bins as usize);
        println!("{plane}: {} rows x {} features", m.rows, m.dim);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
