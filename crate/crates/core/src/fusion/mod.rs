//! Consensus fusion: the mean GCE* energy over the ensemble, minimized
//! pixel by pixel with iterated conditional modes.

mod gce;
mod icm;
mod table;

pub use gce::{consensus_energy, gce_star, lre};
pub(crate) use gce::gce_from_table;
pub use icm::{
    icm_fuse, init_candidate, modal_label_count, FusionOutcome, FusionState, IcmParams,
    AUDIT_TOLERANCE, MOVE_EPSILON,
};
pub use table::IntersectionTable;
