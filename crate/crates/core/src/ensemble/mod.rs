//! Weak segmentation ensemble: per plane family, several seeded random
//! projections of the feature matrix, each clustered with k-means.

mod kmeans;
mod projection;

use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use kmeans::{kmeans, KMeansFit, KMeansParams};
pub use projection::{project_with, random_projection, ProjectionKind, ProjectionSpec};

use crate::error::{Error, Result};
use crate::features::{feature_matrix, lbp_volume, FeatureMatrix, FeatureParams, LbpParams};
use crate::labelmap::{write_labelmap, SegmentationMap};
use crate::rng::derive_seed;
use crate::video::{PlaneFamily, VideoCube};

/// Dense row-major `rows x dim` matrix of `f64` points.
#[derive(Debug, Clone, PartialEq)]
pub struct Points {
    pub rows: usize,
    pub dim: usize,
    pub values: Vec<f64>,
}

impl Points {
    pub fn new(rows: usize, dim: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), rows * dim, "points buffer size");
        Points { rows, dim, values }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    /// Replicates (projection seeds) per plane family; the ensemble has
    /// `3 * replicates` members.
    pub replicates: usize,
    /// k-means cluster count.
    pub clusters: usize,
    /// Reduced dimension after random projection.
    pub projection_dim: usize,
    pub projection_kind: ProjectionKind,
    pub kmeans_max_iter: usize,
    pub kmeans_tol: f64,
    pub seed: u64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            replicates: 4,
            clusters: 2,
            projection_dim: 100,
            projection_kind: ProjectionKind::Gaussian,
            kmeans_max_iter: 100,
            kmeans_tol: 1e-4,
            seed: 1,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidParameter("replicates must be at least 1".into()));
        }
        if self.clusters < 2 {
            return Err(Error::InvalidParameter(format!(
                "cluster count must be at least 2, got {}",
                self.clusters
            )));
        }
        if self.projection_dim == 0 {
            return Err(Error::InvalidParameter("projection dimension must be positive".into()));
        }
        if self.kmeans_max_iter == 0 || self.kmeans_tol.is_nan() || self.kmeans_tol < 0.0 {
            return Err(Error::InvalidParameter(
                "k-means needs max_iter >= 1 and a non-negative tolerance".into(),
            ));
        }
        Ok(())
    }

    pub fn ensemble_size(&self) -> usize {
        3 * self.replicates
    }

    /// Seed of member `(plane, replicate)`.
    pub fn member_seed(&self, plane: PlaneFamily, replicate: usize) -> u64 {
        derive_seed(self.seed, &[plane.tag(), replicate as u64])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub plane: PlaneFamily,
    pub replicate: usize,
    pub seed: u64,
    pub inertia: f64,
    pub kmeans_iterations: usize,
    pub map: SegmentationMap,
}

impl Member {
    /// File stem used when dumping the member, e.g. `member_xt_2`.
    pub fn file_stem(&self) -> String {
        format!("member_{}_{}", self.plane, self.replicate)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub members: Vec<Member>,
}

impl Ensemble {
    pub fn maps(&self) -> Vec<SegmentationMap> {
        self.members.iter().map(|m| m.map.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Writes every member as `member_<family>_<replicate>.pgm` (+ sidecar).
    pub fn dump(&self, dir: impl AsRef<Path>) -> Result<()> {
        for m in &self.members {
            write_labelmap(&m.map, dir.as_ref().join(format!("{}.pgm", m.file_stem())))?;
        }
        Ok(())
    }
}

/// Wall time spent in each ensemble phase.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnsembleTimings {
    pub lbp: Duration,
    pub features: Duration,
    pub projection_clustering: Duration,
}

/// Projects and clusters one member from a family's feature matrix.
pub fn cluster_member(
    features: &FeatureMatrix,
    height: usize,
    width: usize,
    plane: PlaneFamily,
    replicate: usize,
    cfg: &EnsembleConfig,
) -> Result<Member> {
    let seed = cfg.member_seed(plane, replicate);
    let spec = ProjectionSpec {
        input_dim: features.dim,
        output_dim: cfg.projection_dim,
        seed: derive_seed(seed, &[0]),
        kind: cfg.projection_kind,
    };
    let reduced = random_projection(features, &spec)?;
    let params = KMeansParams {
        clusters: cfg.clusters,
        max_iter: cfg.kmeans_max_iter,
        tol: cfg.kmeans_tol,
        seed: derive_seed(seed, &[1]),
    };
    let fit = kmeans(&reduced, &params)?;
    Ok(Member {
        plane,
        replicate,
        seed,
        inertia: fit.inertia,
        kmeans_iterations: fit.iterations,
        map: fit.to_map(height, width)?,
    })
}

/// Builds the `3 * replicates` weak segmentations of `cube`, reporting the
/// time spent per phase. Members are ordered by family (xy, xt, yt), then
/// replicate.
pub fn generate_ensemble_timed(
    cube: &VideoCube,
    lbp: &LbpParams,
    features: &FeatureParams,
    cfg: &EnsembleConfig,
) -> Result<(Ensemble, EnsembleTimings)> {
    cfg.validate()?;
    lbp.validate()?;
    features.validate()?;
    let mut timings = EnsembleTimings::default();
    let mut members = Vec::with_capacity(cfg.ensemble_size());
    for plane in PlaneFamily::ALL {
        let start = Instant::now();
        let volume = lbp_volume(cube, plane, lbp)?;
        timings.lbp += start.elapsed();

        let start = Instant::now();
        let matrix = feature_matrix(&volume, features)?;
        drop(volume);
        timings.features += start.elapsed();

        let start = Instant::now();
        let family: Vec<Member> = (0..cfg.replicates)
            .into_par_iter()
            .map(|r| cluster_member(&matrix, cube.height(), cube.width(), plane, r, cfg))
            .collect::<Result<_>>()?;
        members.extend(family);
        timings.projection_clustering += start.elapsed();
    }
    Ok((Ensemble { members }, timings))
}

pub fn generate_ensemble(
    cube: &VideoCube,
    lbp: &LbpParams,
    features: &FeatureParams,
    cfg: &EnsembleConfig,
) -> Result<Ensemble> {
    generate_ensemble_timed(cube, lbp, features, cfg).map(|(e, _)| e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn striped_cube() -> VideoCube {
        VideoCube::from_fn(16, 16, 12, |y, x, t| {
            if x < 8 {
                ((y * 40 + t * 13) % 256) as u8
            } else {
                ((x * 40 + t * 29) % 256) as u8
            }
        })
        .unwrap()
    }

    fn small_cfg(replicates: usize) -> EnsembleConfig {
        EnsembleConfig {
            replicates,
            projection_dim: 20,
            ..Default::default()
        }
    }

    #[test]
    fn one_replicate_gives_three_members() {
        let e = generate_ensemble(
            &striped_cube(),
            &LbpParams::default(),
            &FeatureParams::default(),
            &small_cfg(1),
        )
        .unwrap();
        assert_eq!(e.len(), 3);
        let planes: Vec<_> = e.members.iter().map(|m| m.plane).collect();
        assert_eq!(planes, PlaneFamily::ALL.to_vec());
        for m in &e.members {
            assert_eq!((m.map.height(), m.map.width()), (16, 16));
            assert!(m.map.num_labels() <= 2);
        }
    }

    #[test]
    fn master_seed_determines_ensemble() {
        let cube = striped_cube();
        let run = |seed| {
            let cfg = EnsembleConfig {
                seed,
                ..small_cfg(2)
            };
            generate_ensemble(&cube, &LbpParams::default(), &FeatureParams::default(), &cfg)
                .unwrap()
        };
        assert_eq!(run(5), run(5));
        let seeds: Vec<u64> = run(5).members.iter().map(|m| m.seed).collect();
        let mut unique = seeds.clone();
        unique.sort_unstable();
        unique.dedup();
        assert_eq!(unique.len(), seeds.len());
    }

    #[test]
    fn projection_dim_above_feature_dim_fails() {
        let cfg = EnsembleConfig {
            projection_dim: 10_000,
            ..small_cfg(1)
        };
        let err = generate_ensemble(
            &striped_cube(),
            &LbpParams::default(),
            &FeatureParams::default(),
            &cfg,
        );
        assert!(err.is_err());
    }

    #[test]
    fn dump_writes_named_members() {
        let dir = tempfile::tempdir().unwrap();
        let e = generate_ensemble(
            &striped_cube(),
            &LbpParams::default(),
            &FeatureParams::default(),
            &small_cfg(1),
        )
        .unwrap();
        e.dump(dir.path()).unwrap();
        for name in ["member_xy_0", "member_xt_0", "member_yt_0"] {
            assert!(dir.path().join(format!("{name}.pgm")).exists());
            assert!(dir.path().join(format!("{name}.json")).exists());
        }
    }
}
