// Random projection of feature rows, with a check on how well squared
// distances survive.

use dtseg::ensemble::{random_projection, ProjectionSpec};
use dtseg::features::FeatureMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (rows, dim, k) = (60, 480, 100);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let values: Vec<f32> = (0..rows * dim).map(|_| rng.random_range(0.0..10.0)).collect();
    let x = FeatureMatrix::new(rows, dim, values)?;

    let y = random_projection(&x, &ProjectionSpec::new(dim, k, 11))?;
    assert_eq!((y.rows, y.dim), (rows, k));

    let mut ratios = Vec::new();
    for i in 0..rows {
        for j in i + 1..rows {
            let before: f64 = x
                .row(i)
                .iter()
                .zip(x.row(j))
                .map(|(a, b)| f64::from(a - b).powi(2))
                .sum();
            let after: f64 = y.row(i).iter().zip(y.row(j)).map(|(a, b)| (a - b).powi(2)).sum();
            ratios.push(after / before);
        }
    }
    let within = ratios.iter().filter(|r| (0.65..=1.35).contains(*r)).count();
    let share = within as f64 / ratios.len() as f64;
    println!("{dim} -> {k}: {:.1}% of pair distances within 35%", share * 100.0);
    assert!(share > 0.9);
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
