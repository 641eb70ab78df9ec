use crate::error::{Error, Result};
use crate::labelmap::SegmentationMap;
use crate::metrics::ContingencyTable;

/// Local refinement error at `pixel`: the fraction of `a`'s segment
/// through `pixel` that lies outside `b`'s segment through `pixel`.
pub fn lre(a: &SegmentationMap, b: &SegmentationMap, pixel: usize) -> Result<f64> {
    a.check_same_shape(b)?;
    if pixel >= a.len() {
        return Err(Error::OutOfRange {
            what: "pixel",
            index: pixel,
            limit: a.len(),
        });
    }
    let (la, lb) = (a.labels()[pixel], b.labels()[pixel]);
    let mut size = 0usize;
    let mut outside = 0usize;
    for (&x, &y) in a.labels().iter().zip(b.labels()) {
        if x == la {
            size += 1;
            if y != lb {
                outside += 1;
            }
        }
    }
    Ok(outside as f64 / size as f64)
}

/// `sum_a sum_b n_ab (|a| - n_ab) / |a|`, i.e. the sum over pixels of the
/// refinement error of the row partition against the column partition.
pub(crate) fn one_sided_lre_sum(rows: &[u64], row_sq: &[u64]) -> f64 {
    rows.iter()
        .zip(row_sq)
        .filter(|(&size, _)| size > 0)
        .map(|(&size, &sq)| (size * size - sq) as f64 / size as f64)
        .sum()
}

/// Symmetrized global consistency error, in `[0, 1]`.
pub fn gce_star(a: &SegmentationMap, b: &SegmentationMap) -> Result<f64> {
    let table = ContingencyTable::new(a, b)?;
    Ok(gce_from_table(&table))
}

pub(crate) fn gce_from_table(table: &ContingencyTable) -> f64 {
    let n = table.total();
    if n == 0 {
        return 0.0;
    }
    let (row_sq, col_sq) = table.squared_marginals();
    let sum = one_sided_lre_sum(table.row_sums(), &row_sq)
        + one_sided_lre_sum(table.col_sums(), &col_sq);
    sum / (2 * n) as f64
}

/// Mean GCE* between `candidate` and every ensemble member.
pub fn consensus_energy(candidate: &SegmentationMap, ensemble: &[SegmentationMap]) -> Result<f64> {
    if ensemble.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let mut total = 0.0;
    for member in ensemble {
        total += gce_star(candidate, member)?;
    }
    Ok(total / ensemble.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(h: usize, w: usize, labels: &[u32]) -> SegmentationMap {
        SegmentationMap::compacted(h, w, labels).unwrap()
    }

    #[test]
    fn lre_hand_example() {
        let a = map(4, 1, &[0, 0, 1, 1]);
        let b = map(4, 1, &[0, 0, 0, 1]);
        assert_eq!(lre(&a, &b, 2).unwrap(), 0.5);
        assert_eq!(lre(&b, &a, 2).unwrap(), 2.0 / 3.0);
        assert_eq!(lre(&a, &b, 0).unwrap(), 0.0);
    }

    #[test]
    fn lre_errors() {
        let a = map(2, 2, &[0, 1, 0, 1]);
        let b = map(1, 4, &[0, 1, 0, 1]);
        assert!(lre(&a, &b, 0).is_err());
        assert!(lre(&a, &a, 4).is_err());
        assert!(gce_star(&a, &b).is_err());
    }

    #[test]
    fn identical_maps_have_zero_error() {
        let a = map(3, 3, &[0, 1, 2, 0, 1, 2, 2, 2, 2]);
        for p in 0..9 {
            assert_eq!(lre(&a, &a, p).unwrap(), 0.0);
        }
        assert_eq!(gce_star(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn subset_segment_has_zero_lre() {
        let fine = map(1, 6, &[0, 0, 1, 2, 2, 3]);
        let coarse = map(1, 6, &[0, 0, 0, 1, 1, 1]);
        for p in 0..6 {
            assert_eq!(lre(&fine, &coarse, p).unwrap(), 0.0);
        }
    }

    #[test]
    fn one_segment_vs_singletons() {
        for n in [4usize, 16, 64] {
            let one = SegmentationMap::uniform(1, n);
            let singles = map(1, n, &(0..n as u32).collect::<Vec<_>>());
            let expected = (n - 1) as f64 / (2 * n) as f64;
            assert_eq!(gce_star(&one, &singles).unwrap(), expected);
        }
    }

    #[test]
    fn consensus_energy_examples() {
        let s = map(2, 2, &[0, 0, 1, 1]);
        let t = map(2, 2, &[0, 1, 0, 1]);
        assert_eq!(consensus_energy(&s, &[s.clone(), s.clone(), s.clone()]).unwrap(), 0.0);
        let e = consensus_energy(&s, &[s.clone(), t.clone()]).unwrap();
        assert_eq!(e, gce_star(&s, &t).unwrap() / 2.0);
        assert!(matches!(consensus_energy(&s, &[]), Err(Error::EmptyEnsemble)));
    }
}
