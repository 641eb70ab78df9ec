use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::rng::seeded;

use super::Points;

/// Distribution of the random projection matrix entries. Both have zero
/// mean and unit variance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjectionKind {
    /// i.i.d. standard normal entries.
    #[default]
    Gaussian,
    /// Sparse entries `sqrt(3) * {+1, 0, -1}` with probabilities `{1/6, 2/3, 1/6}`.
    Achlioptas,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectionSpec {
    pub input_dim: usize,
    pub output_dim: usize,
    pub seed: u64,
    pub kind: ProjectionKind,
}

impl ProjectionSpec {
    pub fn new(input_dim: usize, output_dim: usize, seed: u64) -> Self {
        ProjectionSpec {
            input_dim,
            output_dim,
            seed,
            kind: ProjectionKind::Gaussian,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.output_dim == 0 || self.output_dim > self.input_dim {
            return Err(Error::InvalidParameter(format!(
                "projection dimension k = {} must be in [1, {}]",
                self.output_dim, self.input_dim
            )));
        }
        Ok(())
    }

    /// The `input_dim x output_dim` projection matrix, row-major.
    pub fn matrix(&self) -> Vec<f64> {
        let mut rng = seeded(self.seed);
        let n = self.input_dim * self.output_dim;
        match self.kind {
            ProjectionKind::Gaussian => (0..n).map(|_| rng.sample(StandardNormal)).collect(),
            ProjectionKind::Achlioptas => {
                let s = 3f64.sqrt();
                (0..n)
                    .map(|_| match rng.random_range(0..6u8) {
                        0 => s,
                        1 => -s,
                        _ => 0.0,
                    })
                    .collect()
            }
        }
    }
}

/// `X * rp / sqrt(k)` for an explicit `D x k` matrix `rp`.
pub fn project_with(x: &FeatureMatrix, rp: &[f64], k: usize) -> Result<Points> {
    if k == 0 || rp.len() != x.dim * k {
        return Err(Error::DimensionMismatch(format!(
            "projection matrix has {} entries, expected {} x {k}",
            rp.len(),
            x.dim
        )));
    }
    let root_k = (k as f64).sqrt();
    let mut values = vec![0f64; x.rows * k];
    values.par_chunks_mut(k).enumerate().for_each(|(i, out)| {
        for (d, &v) in x.row(i).iter().enumerate() {
            if v != 0.0 {
                let v = f64::from(v);
                for (o, &r) in out.iter_mut().zip(&rp[d * k..(d + 1) * k]) {
                    *o += v * r;
                }
            }
        }
        for o in out.iter_mut() {
            *o /= root_k;
        }
    });
    Ok(Points::new(x.rows, k, values))
}

/// Seeded random projection of `x` down to `spec.output_dim` columns.
pub fn random_projection(x: &FeatureMatrix, spec: &ProjectionSpec) -> Result<Points> {
    if spec.input_dim != x.dim {
        return Err(Error::DimensionMismatch(format!(
            "projection expects {} input columns, matrix has {}",
            spec.input_dim, x.dim
        )));
    }
    spec.validate()?;
    project_with(x, &spec.matrix(), spec.output_dim)
}
