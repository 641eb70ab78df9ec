//! Partition-comparison metrics between an automatic segmentation and a
//! ground truth. Everything is computed from the contingency table of the
//! two label maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::gce_from_table;
use crate::labelmap::SegmentationMap;

/// Overlap counts `m[a][b] = |segment a of A ∩ segment b of B|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    total: u64,
}

impl ContingencyTable {
    pub fn new(a: &SegmentationMap, b: &SegmentationMap) -> Result<Self> {
        a.check_same_shape(b)?;
        let (rows, cols) = (a.num_labels(), b.num_labels());
        let mut counts = vec![0u64; rows * cols];
        let mut row_sums = vec![0u64; rows];
        let mut col_sums = vec![0u64; cols];
        for (&x, &y) in a.labels().iter().zip(b.labels()) {
            counts[x as usize * cols + y as usize] += 1;
            row_sums[x as usize] += 1;
            col_sums[y as usize] += 1;
        }
        Ok(ContingencyTable {
            rows,
            cols,
            counts,
            row_sums,
            col_sums,
            total: a.len() as u64,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, a: usize, b: usize) -> u64 {
        self.counts[a * self.cols + b]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Segment sizes of the first map.
    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    /// Segment sizes of the second map.
    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    /// `(sum_b m_ab^2 per a, sum_a m_ab^2 per b)`.
    pub fn squared_marginals(&self) -> (Vec<u64>, Vec<u64>) {
        let mut row_sq = vec![0u64; self.rows];
        let mut col_sq = vec![0u64; self.cols];
        for (a, rs) in row_sq.iter_mut().enumerate() {
            for (b, cs) in col_sq.iter_mut().enumerate() {
                let m = self.get(a, b);
                *rs += m * m;
                *cs += m * m;
            }
        }
        (row_sq, col_sq)
    }

    fn nonzero(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        (0..self.rows).flat_map(move |a| {
            (0..self.cols).filter_map(move |b| {
                let m = self.get(a, b);
                (m > 0).then_some((a, b, m))
            })
        })
    }

    /// Same-segment pixel pair counts `(in both maps, in the first, in the second)`.
    fn pair_counts(&self) -> (u128, u128, u128) {
        let pairs = |n: u64| u128::from(n) * u128::from(n.saturating_sub(1)) / 2;
        (
            self.counts.iter().map(|&m| pairs(m)).sum(),
            self.row_sums.iter().map(|&m| pairs(m)).sum(),
            self.col_sums.iter().map(|&m| pairs(m)).sum(),
        )
    }
}

/// Fraction of pixel pairs on which both maps agree about being in the
/// same segment or not.
pub fn pr_index(aut: &SegmentationMap, gt: &SegmentationMap) -> Result<f64> {
    let table = ContingencyTable::new(aut, gt)?;
    pr_from_table(&table)
}

fn pr_from_table(table: &ContingencyTable) -> Result<f64> {
    let n = u128::from(table.total());
    if n < 2 {
        return Err(Error::Undefined("PR index needs at least two pixels".into()));
    }
    let (both, same_a, same_b) = table.pair_counts();
    let all = n * (n - 1) / 2;
    let disagree = same_a + same_b - 2 * both;
    Ok((all - disagree) as f64 / all as f64)
}

/// Variation of information in nats.
pub fn voi(aut: &SegmentationMap, gt: &SegmentationMap) -> Result<f64> {
    let table = ContingencyTable::new(aut, gt)?;
    Ok(voi_from_table(&table))
}

fn voi_from_table(table: &ContingencyTable) -> f64 {
    let n = table.total() as f64;
    if n == 0.0 {
        return 0.0;
    }
    table
        .nonzero()
        .map(|(a, b, m)| {
            let m = m as f64;
            let ra = table.row_sums[a] as f64;
            let cb = table.col_sums[b] as f64;
            m / n * ((ra / m).ln() + (cb / m).ln())
        })
        .sum()
}

/// Probabilistic Rand index against a set of ground truths: the mean over
/// pixel pairs of the probability that the pair relation of `aut` matches
/// a ground truth drawn from the set.
pub fn pri(aut: &SegmentationMap, ground_truths: &[SegmentationMap]) -> Result<f64> {
    if ground_truths.is_empty() {
        return Err(Error::Undefined("PRI needs at least one ground truth".into()));
    }
    let mut total = 0.0;
    for gt in ground_truths {
        total += pr_index(aut, gt)?;
    }
    Ok(total / ground_truths.len() as f64)
}

/// Harmonic mean of pair precision and pair recall.
pub fn f_measure(aut: &SegmentationMap, gt: &SegmentationMap) -> Result<f64> {
    let table = ContingencyTable::new(aut, gt)?;
    f_from_table(&table)
}

fn f_from_table(table: &ContingencyTable) -> Result<f64> {
    let (both, same_aut, same_gt) = table.pair_counts();
    if same_aut == 0 || same_gt == 0 {
        return Err(Error::Undefined(
            "pair F-measure needs at least one same-segment pair in each map".into(),
        ));
    }
    if both == 0 {
        return Ok(0.0);
    }
    let precision = both as f64 / same_aut as f64;
    let recall = both as f64 / same_gt as f64;
    Ok(2.0 * precision * recall / (precision + recall))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub pr: f64,
    pub gce: f64,
    pub voi: f64,
    pub pri: f64,
    pub f_measure: f64,
    pub pixels: usize,
}

/// All metrics of `aut` against a single ground truth.
pub fn evaluate(aut: &SegmentationMap, gt: &SegmentationMap) -> Result<MetricsReport> {
    let table = ContingencyTable::new(aut, gt)?;
    let pr = pr_from_table(&table)?;
    Ok(MetricsReport {
        pr,
        gce: gce_from_table(&table),
        voi: voi_from_table(&table),
        pri: pr,
        f_measure: f_from_table(&table)?,
        pixels: aut.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(h: usize, w: usize, labels: &[u32]) -> SegmentationMap {
        SegmentationMap::compacted(h, w, labels).unwrap()
    }

    #[test]
    fn contingency_marginals() {
        let a = map(2, 3, &[0, 0, 1, 1, 2, 2]);
        let b = map(2, 3, &[0, 1, 1, 1, 0, 0]);
        let t = ContingencyTable::new(&a, &b).unwrap();
        assert_eq!(t.total(), 6);
        assert_eq!(t.row_sums().iter().sum::<u64>(), 6);
        assert_eq!(t.col_sums(), &[3, 3]);
    }

    #[test]
    fn pr_examples() {
        let a = map(2, 2, &[0, 0, 1, 1]);
        assert_eq!(pr_index(&a, &a).unwrap(), 1.0);
        let x = map(2, 1, &[0, 0]);
        let y = map(2, 1, &[0, 1]);
        assert_eq!(pr_index(&x, &y).unwrap(), 0.0);
        assert!(pr_index(&map(1, 1, &[0]), &map(1, 1, &[0])).is_err());
        assert!(pr_index(&a, &map(1, 4, &[0, 0, 1, 1])).is_err());
    }

    #[test]
    fn voi_of_identical_and_independent_maps() {
        let a = map(2, 2, &[0, 0, 1, 1]);
        assert_eq!(voi(&a, &a).unwrap(), 0.0);
        let b = map(2, 2, &[0, 1, 0, 1]);
        assert!((voi(&a, &b).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn pri_with_conflicting_truths() {
        // Pairs of 4 pixels: (01)(02)(03)(12)(13)(23).
        // aut = [0,0,1,1] same: 01, 23.
        // g1 = [0,0,1,1] agrees on all 6; g2 = [0,1,0,1] same: 02, 13
        // -> aut disagrees with g2 on 01, 23, 02, 13: agrees on 2 of 6.
        let aut = map(1, 4, &[0, 0, 1, 1]);
        let g1 = map(1, 4, &[0, 0, 1, 1]);
        let g2 = map(1, 4, &[0, 1, 0, 1]);
        let v = pri(&aut, &[g1.clone(), g2]).unwrap();
        assert!((v - (1.0 + 2.0 / 6.0) / 2.0).abs() < 1e-15);
        assert_eq!(pri(&aut, std::slice::from_ref(&g1)).unwrap(), pr_index(&aut, &g1).unwrap());
        assert!(pri(&aut, &[]).is_err());
    }

    #[test]
    fn f_measure_examples() {
        let a = map(2, 2, &[0, 0, 1, 1]);
        assert_eq!(f_measure(&a, &a).unwrap(), 1.0);
        let singles = map(2, 2, &[0, 1, 2, 3]);
        assert!(f_measure(&singles, &a).is_err());
        assert!(f_measure(&a, &singles).is_err());
        let b = map(2, 2, &[0, 1, 0, 1]);
        assert_eq!(f_measure(&a, &b).unwrap(), 0.0);
    }

    #[test]
    fn evaluate_identical() {
        let a = map(3, 3, &[0, 0, 1, 1, 1, 2, 2, 2, 2]);
        let r = evaluate(&a, &a).unwrap();
        assert_eq!((r.pr, r.gce, r.voi, r.pri, r.f_measure), (1.0, 0.0, 0.0, 1.0, 1.0));
        assert_eq!(r.pixels, 9);
    }
}
