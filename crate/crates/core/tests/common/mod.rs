//! Brute-force reference implementations and fixtures shared by the
//! integration tests. Everything here works straight from the definitions,
//! pixel by pixel or pair by pair.

#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::PI;

use dtseg::SegmentationMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random compact map of the given shape with labels drawn from `0..max_labels`.
pub fn random_map(rng: &mut ChaCha8Rng, h: usize, w: usize, max_labels: u32) -> SegmentationMap {
    let labels: Vec<u32> = (0..h * w).map(|_| rng.random_range(0..max_labels)).collect();
    SegmentationMap::compacted(h, w, &labels).unwrap()
}

/// Fraction of the `a` segment through `i` that is not in the `b` segment through `i`.
pub fn lre(a: &[u32], b: &[u32], i: usize) -> f64 {
    let seg: Vec<usize> = (0..a.len()).filter(|&j| a[j] == a[i]).collect();
    let outside = seg.iter().filter(|&&j| b[j] != b[i]).count();
    outside as f64 / seg.len() as f64
}

pub fn gce(a: &SegmentationMap, b: &SegmentationMap) -> f64 {
    let (a, b) = (a.labels(), b.labels());
    let n = a.len();
    let sum: f64 = (0..n).map(|i| lre(a, b, i) + lre(b, a, i)).sum();
    sum / (2.0 * n as f64)
}

pub fn consensus_energy(candidate: &SegmentationMap, members: &[SegmentationMap]) -> f64 {
    members.iter().map(|m| gce(candidate, m)).sum::<f64>() / members.len() as f64
}

/// `(pairs same in both, same in a, same in b, all pairs)`.
fn pair_counts(a: &SegmentationMap, b: &SegmentationMap) -> (u64, u64, u64, u64) {
    let (a, b) = (a.labels(), b.labels());
    let mut counts = (0, 0, 0, 0);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let (sa, sb) = (a[i] == a[j], b[i] == b[j]);
            counts.0 += u64::from(sa && sb);
            counts.1 += u64::from(sa);
            counts.2 += u64::from(sb);
            counts.3 += 1;
        }
    }
    counts
}

pub fn pr(a: &SegmentationMap, b: &SegmentationMap) -> f64 {
    let (a, b) = (a.labels(), b.labels());
    let mut agree = 0u64;
    let mut all = 0u64;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            agree += u64::from((a[i] == a[j]) == (b[i] == b[j]));
            all += 1;
        }
    }
    agree as f64 / all as f64
}

/// `None` when either map has no same-segment pair.
pub fn pair_f(a: &SegmentationMap, b: &SegmentationMap) -> Option<f64> {
    let (both, same_a, same_b, _) = pair_counts(a, b);
    if same_a == 0 || same_b == 0 {
        return None;
    }
    if both == 0 {
        return Some(0.0);
    }
    let p = both as f64 / same_a as f64;
    let r = both as f64 / same_b as f64;
    Some(2.0 * p * r / (p + r))
}

fn entropy<K: std::hash::Hash + Eq>(keys: impl Iterator<Item = K>, n: f64) -> f64 {
    let mut counts: HashMap<K, f64> = HashMap::new();
    for k in keys {
        *counts.entry(k).or_default() += 1.0;
    }
    counts.values().map(|&c| -(c / n) * (c / n).ln()).sum()
}

/// `2 H(A, B) - H(A) - H(B)`, from label frequencies.
pub fn voi(a: &SegmentationMap, b: &SegmentationMap) -> f64 {
    let (a, b) = (a.labels(), b.labels());
    let n = a.len() as f64;
    let ha = entropy(a.iter(), n);
    let hb = entropy(b.iter(), n);
    let hab = entropy(a.iter().zip(b), n);
    2.0 * hab - ha - hb
}

/// LBP code at `(row, col)` of a row-major patch: neighbor `p` sits at
/// angle `2 pi p / P` on a circle of radius `r`, is sampled bilinearly from
/// the four surrounding pixels and contributes bit `p` when it is at least
/// the center value.
pub fn lbp(patch: &[u8], cols: usize, row: usize, col: usize, p_count: u32, r: f64) -> u32 {
    let px = |y: i64, x: i64| f64::from(patch[y as usize * cols + x as usize]);
    let center = px(row as i64, col as i64);
    let mut code = 0;
    for p in 0..p_count {
        let angle = 2.0 * PI * f64::from(p) / f64::from(p_count);
        let y = row as f64 + r * angle.sin();
        let x = col as f64 + r * angle.cos();
        // Snap values that are integers up to rounding onto the grid.
        let (y, x) = (snap(y), snap(x));
        let (y0, x0) = (y.floor(), x.floor());
        let (fy, fx) = (y - y0, x - x0);
        let (y0, x0) = (y0 as i64, x0 as i64);
        let at = |dy: i64, dx: i64, w: f64| if w == 0.0 { 0.0 } else { w * px(y0 + dy, x0 + dx) };
        let value = at(0, 0, (1.0 - fy) * (1.0 - fx))
            + at(0, 1, (1.0 - fy) * fx)
            + at(1, 0, fy * (1.0 - fx))
            + at(1, 1, fy * fx);
        if value >= center - 1e-9 {
            code |= 1 << p;
        }
    }
    code
}

fn snap(v: f64) -> f64 {
    if (v - v.round()).abs() < 1e-9 {
        v.round()
    } else {
        v
    }
}
