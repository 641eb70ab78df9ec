use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labelmap::SegmentationMap;
use crate::rng::seeded;

use super::Points;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMeansParams {
    pub clusters: usize,
    pub max_iter: usize,
    /// Stop once the relative inertia improvement of an iteration drops
    /// below this value.
    pub tol: f64,
    pub seed: u64,
}

impl KMeansParams {
    pub fn new(clusters: usize, seed: u64) -> Self {
        KMeansParams {
            clusters,
            max_iter: 100,
            tol: 1e-4,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    /// Cluster index per point; may skip ids of clusters that emptied.
    pub labels: Vec<u32>,
    pub centroids: Points,
    pub inertia: f64,
    /// Inertia after the initial assignment and after every Lloyd step.
    pub inertia_trace: Vec<f64>,
    pub iterations: usize,
}

impl KMeansFit {
    /// Lays the labels out on an `height x width` grid, dropping empty
    /// clusters and numbering by decreasing cluster size.
    pub fn to_map(&self, height: usize, width: usize) -> Result<SegmentationMap> {
        SegmentationMap::compacted(height, width, &self.labels)
    }
}

#[inline]
fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn plus_plus_init(points: &Points, clusters: usize, seed: u64) -> Points {
    let mut rng = seeded(seed);
    let mut centroids = Vec::with_capacity(clusters * points.dim);
    let first = rng.random_range(0..points.rows);
    centroids.extend_from_slice(points.row(first));
    let mut nearest: Vec<f64> = (0..points.rows)
        .map(|i| sq_dist(points.row(i), points.row(first)))
        .collect();
    for _ in 1..clusters {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            nearest
                .iter()
                .position(|&d| {
                    acc += d;
                    acc > target
                })
                .unwrap_or_else(|| nearest.iter().rposition(|&d| d > 0.0).unwrap())
        } else {
            rng.random_range(0..points.rows)
        };
        let c = points.row(pick).to_vec();
        for (i, n) in nearest.iter_mut().enumerate() {
            *n = n.min(sq_dist(points.row(i), &c));
        }
        centroids.extend_from_slice(&c);
    }
    Points::new(clusters, points.dim, centroids)
}

/// Assigns every point to its nearest centroid (lowest index on ties) and
/// returns the inertia.
fn assign(points: &Points, centroids: &Points, labels: &mut [u32]) -> f64 {
    let mut inertia = 0.0;
    for (i, label) in labels.iter_mut().enumerate() {
        let row = points.row(i);
        let (best, dist) = (0..centroids.rows)
            .map(|c| (c, sq_dist(row, centroids.row(c))))
            .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
        *label = best as u32;
        inertia += dist;
    }
    inertia
}

/// Moves every non-empty centroid to the mean of its points. Empty
/// clusters keep their centroid.
fn update(points: &Points, labels: &[u32], centroids: &mut Points) {
    let dim = points.dim;
    let mut sums = vec![0f64; centroids.rows * dim];
    let mut counts = vec![0usize; centroids.rows];
    for (i, &l) in labels.iter().enumerate() {
        let l = l as usize;
        counts[l] += 1;
        for (s, v) in sums[l * dim..(l + 1) * dim].iter_mut().zip(points.row(i)) {
            *s += v;
        }
    }
    for (c, &n) in counts.iter().enumerate() {
        if n > 0 {
            let inv = 1.0 / n as f64;
            for (dst, s) in centroids.values[c * dim..(c + 1) * dim]
                .iter_mut()
                .zip(&sums[c * dim..(c + 1) * dim])
            {
                *dst = s * inv;
            }
        }
    }
}

/// Lloyd's k-means with k-means++ seeding.
pub fn kmeans(points: &Points, params: &KMeansParams) -> Result<KMeansFit> {
    if params.clusters == 0 {
        return Err(Error::InvalidParameter("k-means needs at least one cluster".into()));
    }
    if points.rows < params.clusters {
        return Err(Error::InvalidParameter(format!(
            "k-means with {} clusters needs at least as many points, got {}",
            params.clusters, points.rows
        )));
    }
    let mut centroids = plus_plus_init(points, params.clusters, params.seed);
    let mut labels = vec![0u32; points.rows];
    let mut inertia = assign(points, &centroids, &mut labels);
    let mut trace = vec![inertia];
    let mut iterations = 0;
    while iterations < params.max_iter {
        iterations += 1;
        update(points, &labels, &mut centroids);
        let next = assign(points, &centroids, &mut labels);
        assert!(
            next <= inertia * (1.0 + 1e-9) + 1e-12,
            "k-means inertia increased from {inertia} to {next}"
        );
        let improvement = if inertia > 0.0 {
            (inertia - next) / inertia
        } else {
            0.0
        };
        inertia = next;
        trace.push(inertia);
        if improvement < params.tol {
            break;
        }
    }
    Ok(KMeansFit {
        labels,
        centroids,
        inertia,
        inertia_trace: trace,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs() -> (Points, Vec<usize>) {
        let centers = [(0.0, 0.0), (100.0, 0.0), (0.0, 100.0)];
        let mut values = Vec::new();
        let mut truth = Vec::new();
        for i in 0..60 {
            let b = i % 3;
            let jitter = (i as f64 * 0.37).sin();
            values.push(centers[b].0 + jitter);
            values.push(centers[b].1 - jitter * 0.5);
            truth.push(b);
        }
        (Points::new(60, 2, values), truth)
    }

    #[test]
    fn separated_blobs_are_recovered() {
        let (p, truth) = blobs();
        for seed in 0..5 {
            let fit = kmeans(&p, &KMeansParams::new(3, seed)).unwrap();
            for i in 0..60 {
                for j in 0..60 {
                    assert_eq!(truth[i] == truth[j], fit.labels[i] == fit.labels[j]);
                }
            }
        }
    }

    #[test]
    fn single_cluster_inertia_is_total_scatter() {
        let (p, _) = blobs();
        let fit = kmeans(&p, &KMeansParams::new(1, 0)).unwrap();
        assert!(fit.labels.iter().all(|&l| l == 0));
        let mean: Vec<f64> = (0..2)
            .map(|d| (0..60).map(|i| p.row(i)[d]).sum::<f64>() / 60.0)
            .collect();
        let scatter: f64 = (0..60).map(|i| sq_dist(p.row(i), &mean)).sum();
        assert!((fit.inertia - scatter).abs() < 1e-9 * scatter);
    }

    #[test]
    fn inertia_trace_is_non_increasing() {
        let values: Vec<f64> = (0..400).map(|i| ((i * 2654435761u64 as usize) % 1000) as f64).collect();
        let p = Points::new(100, 4, values);
        let fit = kmeans(&p, &KMeansParams::new(5, 11)).unwrap();
        assert!(fit.inertia_trace.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
        assert!(fit.iterations <= 100);
    }

    #[test]
    fn too_few_points() {
        let p = Points::new(2, 1, vec![0.0, 1.0]);
        assert!(kmeans(&p, &KMeansParams::new(3, 0)).is_err());
    }

    #[test]
    fn duplicate_points_leave_empty_clusters_compacted() {
        let p = Points::new(6, 1, vec![1.0; 6]);
        let fit = kmeans(&p, &KMeansParams::new(3, 4)).unwrap();
        let map = fit.to_map(2, 3).unwrap();
        assert_eq!(map.num_labels(), 1);
    }
}
