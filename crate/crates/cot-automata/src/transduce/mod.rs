pub mod eps;
pub mod fst;
pub mod wfst;

pub use eps::{EpsArc, EpsWfsa};
pub use fst::{
    fst_apply, identity_fst, make_eraser_fst, make_marker_split_fst, AugmentedAlphabet, Fst, FstArc, Phi, PhiState,
    PhiTracker, Projection,
};
pub use wfst::{pfsa_lift, wfst_compose, wfst_invert, wfst_project_input, Wfst, WfstArc};
