use crate::error::{Error, Result};
use crate::labelmap::SegmentationMap;

use super::gce::one_sided_lre_sum;

/// Overlap counts between a mutable candidate labeling (labels in
/// `[0, candidate_labels)`, some possibly empty) and one fixed ensemble
/// member, with the per-segment sums of squared overlaps that make GCE*
/// updates O(1) per single-pixel move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionTable {
    candidate_labels: usize,
    member_labels: usize,
    counts: Vec<u64>,
    candidate_sizes: Vec<u64>,
    member_sizes: Vec<u64>,
    /// `sum_b n_ab^2` per candidate label `a`.
    candidate_sq: Vec<u64>,
    /// `sum_a n_ab^2` per member label `b`.
    member_sq: Vec<u64>,
}

impl IntersectionTable {
    pub fn build(candidate: &[u32], candidate_labels: usize, member: &SegmentationMap) -> Result<Self> {
        if candidate.len() != member.len() {
            return Err(Error::DimensionMismatch(format!(
                "candidate has {} pixels, member has {}",
                candidate.len(),
                member.len()
            )));
        }
        let member_labels = member.num_labels();
        let mut table = IntersectionTable {
            candidate_labels,
            member_labels,
            counts: vec![0; candidate_labels * member_labels],
            candidate_sizes: vec![0; candidate_labels],
            member_sizes: vec![0; member_labels],
            candidate_sq: vec![0; candidate_labels],
            member_sq: vec![0; member_labels],
        };
        for (&a, &b) in candidate.iter().zip(member.labels()) {
            let (a, b) = (a as usize, b as usize);
            if a >= candidate_labels {
                return Err(Error::OutOfRange {
                    what: "candidate label",
                    index: a,
                    limit: candidate_labels,
                });
            }
            table.counts[a * member_labels + b] += 1;
            table.candidate_sizes[a] += 1;
            table.member_sizes[b] += 1;
        }
        for a in 0..candidate_labels {
            for b in 0..member_labels {
                let n = table.counts[a * member_labels + b];
                table.candidate_sq[a] += n * n;
                table.member_sq[b] += n * n;
            }
        }
        Ok(table)
    }

    #[inline]
    pub fn count(&self, a: usize, b: usize) -> u64 {
        self.counts[a * self.member_labels + b]
    }

    pub fn candidate_sizes(&self) -> &[u64] {
        &self.candidate_sizes
    }

    pub fn member_sizes(&self) -> &[u64] {
        &self.member_sizes
    }

    pub fn total(&self) -> u64 {
        self.member_sizes.iter().sum()
    }

    /// `sum_i LRE(candidate, member, p_i) + sum_i LRE(member, candidate, p_i)`.
    pub fn lre_sum(&self) -> f64 {
        one_sided_lre_sum(&self.candidate_sizes, &self.candidate_sq)
            + one_sided_lre_sum(&self.member_sizes, &self.member_sq)
    }

    /// GCE* between the candidate and this member.
    pub fn gce(&self) -> f64 {
        let n = self.total();
        if n == 0 {
            0.0
        } else {
            self.lre_sum() / (2 * n) as f64
        }
    }

    /// Change of [`lre_sum`](Self::lre_sum) if one pixel with member label
    /// `b` moved from candidate label `from` to `to`.
    #[inline]
    pub fn move_delta(&self, b: usize, from: usize, to: usize) -> f64 {
        if from == to {
            return 0.0;
        }
        let n_from = self.count(from, b) as i128;
        let n_to = self.count(to, b) as i128;
        let size_from = self.candidate_sizes[from] as i128;
        let size_to = self.candidate_sizes[to] as i128;
        let sq_from = self.candidate_sq[from] as i128;
        let sq_to = self.candidate_sq[to] as i128;

        // lre_sum = sum_a (|a| - S_a / |a|) + sum_b (|b| - T_b / |b|); only
        // the S/|a| terms of `from` and `to` and the T/|b| term of `b` move.
        let d_from = if size_from == 1 {
            -(sq_from as f64)
        } else {
            (sq_from - size_from * (2 * n_from - 1)) as f64 / (size_from * (size_from - 1)) as f64
        };
        let d_to = if size_to == 0 {
            1.0
        } else {
            (size_to * (2 * n_to + 1) - sq_to) as f64 / (size_to * (size_to + 1)) as f64
        };
        let d_member = (2 * (n_to - n_from + 1)) as f64 / self.member_sizes[b] as f64;
        -(d_from + d_to + d_member)
    }

    /// Moves one pixel with member label `b` from candidate label `from` to `to`.
    pub fn apply_move(&mut self, b: usize, from: usize, to: usize) {
        if from == to {
            return;
        }
        let m = self.member_labels;
        let n_from = self.counts[from * m + b];
        let n_to = self.counts[to * m + b];
        debug_assert!(n_from > 0, "moving a pixel out of an empty cell");
        self.counts[from * m + b] = n_from - 1;
        self.counts[to * m + b] = n_to + 1;
        self.candidate_sizes[from] -= 1;
        self.candidate_sizes[to] += 1;
        self.candidate_sq[from] = self.candidate_sq[from] + 1 - 2 * n_from;
        self.candidate_sq[to] += 2 * n_to + 1;
        self.member_sq[b] = self.member_sq[b] + 2 * n_to + 2 - 2 * n_from;
    }
}
