use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labelmap::SegmentationMap;
use crate::rng::seeded;

use super::{consensus_energy, IntersectionTable};

/// Moves whose summed LRE change (in pixel units, over all members) is
/// above `-MOVE_EPSILON` count as ties and keep the current label.
pub const MOVE_EPSILON: f64 = 1e-12;

/// Allowed gap between the incrementally tracked energy and a rebuild.
pub const AUDIT_TOLERANCE: f64 = 1e-9;

/// Candidate labeling plus one intersection table per ensemble member.
#[derive(Debug, Clone)]
pub struct FusionState {
    height: usize,
    width: usize,
    labels: usize,
    candidate: Vec<u32>,
    members: Vec<SegmentationMap>,
    tables: Vec<IntersectionTable>,
    energy: f64,
}

impl FusionState {
    /// `candidate` holds labels in `[0, labels)`; some may be unused.
    pub fn new(
        height: usize,
        width: usize,
        candidate: Vec<u32>,
        labels: usize,
        members: &[SegmentationMap],
    ) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if candidate.len() != height * width {
            return Err(Error::DimensionMismatch(format!(
                "candidate has {} pixels, expected {height}x{width}",
                candidate.len()
            )));
        }
        for m in members {
            if (m.height(), m.width()) != (height, width) {
                return Err(Error::DimensionMismatch(format!(
                    "ensemble member is {}x{}, candidate is {height}x{width}",
                    m.height(),
                    m.width()
                )));
            }
        }
        let tables = members
            .iter()
            .map(|m| IntersectionTable::build(&candidate, labels, m))
            .collect::<Result<Vec<_>>>()?;
        let mut state = FusionState {
            height,
            width,
            labels,
            candidate,
            members: members.to_vec(),
            tables,
            energy: 0.0,
        };
        state.energy = state.table_energy();
        Ok(state)
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn candidate(&self) -> &[u32] {
        &self.candidate
    }

    pub fn tables(&self) -> &[IntersectionTable] {
        &self.tables
    }

    pub fn label_count(&self) -> usize {
        self.labels
    }

    fn scale(&self) -> f64 {
        1.0 / (2.0 * self.candidate.len() as f64 * self.tables.len() as f64)
    }

    /// Mean GCE* computed from the current tables.
    pub fn table_energy(&self) -> f64 {
        self.tables.iter().map(|t| t.lre_sum()).sum::<f64>() * self.scale()
    }

    /// Summed LRE change over all members if `pixel` took label `to`.
    pub fn move_delta(&self, pixel: usize, to: u32) -> f64 {
        let from = self.candidate[pixel] as usize;
        self.tables
            .iter()
            .zip(&self.members)
            .map(|(t, m)| t.move_delta(m.labels()[pixel] as usize, from, to as usize))
            .sum()
    }

    /// Relabels `pixel` to `to`, updating tables and the tracked energy.
    pub fn apply(&mut self, pixel: usize, to: u32) {
        let from = self.candidate[pixel] as usize;
        if from == to as usize {
            return;
        }
        let delta = self.move_delta(pixel, to);
        for (t, m) in self.tables.iter_mut().zip(&self.members) {
            t.apply_move(m.labels()[pixel] as usize, from, to as usize);
        }
        self.candidate[pixel] = to;
        self.energy += delta * self.scale();
    }

    /// Tables rebuilt from scratch for the current candidate.
    pub fn rebuilt_tables(&self) -> Result<Vec<IntersectionTable>> {
        self.members
            .iter()
            .map(|m| IntersectionTable::build(&self.candidate, self.labels, m))
            .collect()
    }

    /// Current candidate as a compacted segmentation map.
    pub fn candidate_map(&self) -> SegmentationMap {
        SegmentationMap::compacted(self.height, self.width, &self.candidate)
            .expect("candidate length checked at construction")
    }

    /// Recomputes the energy from scratch, checks it against the tracked
    /// value and resynchronizes. Returns the from-scratch energy.
    pub fn audit(&mut self) -> Result<f64> {
        let exact = consensus_energy(&self.candidate_map(), &self.members)?;
        assert!(
            (exact - self.energy).abs() <= AUDIT_TOLERANCE,
            "tracked energy {} drifted from recomputed {exact}",
            self.energy
        );
        self.energy = exact;
        Ok(exact)
    }
}

/// Ensemble member with the lowest consensus energy (first on ties), and
/// that energy.
pub fn init_candidate(ensemble: &[SegmentationMap]) -> Result<(usize, f64)> {
    if ensemble.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let mut best = (0, f64::INFINITY);
    for (i, member) in ensemble.iter().enumerate() {
        let e = consensus_energy(member, ensemble)?;
        if e < best.1 {
            best = (i, e);
        }
    }
    Ok(best)
}

/// Most frequent label count among members; ties go to the smaller count.
pub fn modal_label_count(ensemble: &[SegmentationMap]) -> usize {
    let mut counts = std::collections::BTreeMap::new();
    for m in ensemble {
        *counts.entry(m.num_labels()).or_insert(0usize) += 1;
    }
    counts
        .into_iter()
        .fold((0, 0), |best, (labels, n)| if n > best.1 { (labels, n) } else { best })
        .0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IcmParams {
    /// Consensus label count; `None` uses the ensemble's modal label count.
    pub labels: Option<usize>,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for IcmParams {
    fn default() -> Self {
        IcmParams {
            labels: None,
            max_sweeps: 20,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FusionOutcome {
    #[serde(skip)]
    pub map: SegmentationMap,
    /// Ensemble index of the starting member.
    pub init_member: usize,
    pub initial_energy: f64,
    /// Consensus energy after each sweep.
    pub energy_trace: Vec<f64>,
    /// Relabeled pixels per sweep.
    pub changes: Vec<usize>,
    pub labels: usize,
}

impl FusionOutcome {
    pub fn final_energy(&self) -> f64 {
        self.energy_trace.last().copied().unwrap_or(self.initial_energy)
    }

    pub fn sweeps(&self) -> usize {
        self.energy_trace.len()
    }
}

/// Fuses the ensemble into one map by ICM on the mean GCE* energy.
///
/// Starts from the best ensemble member (labels beyond the consensus label
/// count are folded into the last label), visits pixels in a fresh seeded
/// random order every sweep, and gives each pixel the label with the
/// strictly lowest energy. Stops after a sweep without changes or after
/// `max_sweeps` sweeps.
pub fn icm_fuse(ensemble: &[SegmentationMap], params: &IcmParams) -> Result<FusionOutcome> {
    if params.max_sweeps == 0 {
        return Err(Error::InvalidParameter("max_sweeps must be at least 1".into()));
    }
    let (init_member, _) = init_candidate(ensemble)?;
    let labels = params
        .labels
        .unwrap_or_else(|| modal_label_count(ensemble).max(2));
    if labels < 2 {
        return Err(Error::InvalidParameter(format!(
            "consensus label count must be at least 2, got {labels}"
        )));
    }
    let start = &ensemble[init_member];
    let last = labels as u32 - 1;
    let candidate: Vec<u32> = start.labels().iter().map(|&l| l.min(last)).collect();
    let mut state = FusionState::new(start.height(), start.width(), candidate, labels, ensemble)?;
    let initial_energy = state.audit()?;

    let mut rng = seeded(params.seed);
    let mut order: Vec<usize> = (0..start.len()).collect();
    let mut trace = Vec::new();
    let mut changes = Vec::new();
    for _ in 0..params.max_sweeps {
        order.shuffle(&mut rng);
        let mut changed = 0;
        for &pixel in &order {
            let mut best = (state.candidate()[pixel], -MOVE_EPSILON);
            for label in 0..labels as u32 {
                if label == state.candidate()[pixel] {
                    continue;
                }
                let delta = state.move_delta(pixel, label);
                if delta < best.1 {
                    best = (label, delta);
                }
            }
            if best.0 != state.candidate()[pixel] {
                state.apply(pixel, best.0);
                changed += 1;
            }
        }
        let energy = state.audit()?;
        trace.push(energy);
        changes.push(changed);
        if changed == 0 {
            break;
        }
    }
    Ok(FusionOutcome {
        map: state.candidate_map(),
        init_member,
        initial_energy,
        energy_trace: trace,
        changes,
        labels,
    })
}
