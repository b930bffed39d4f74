//! Low-PMEPR preamble sequences for dynamic spectrum access OFDMA.
//!
//! Sequences of length `2^m` are built from generalized Boolean functions
//! over `Z_q`. Every one of the 15 masks that zero out some of its four
//! resource blocks keeps a bounded peak-to-mean envelope power ratio.
//! The crate generates the two sequence families and checks their
//! complementary-pair and almost-complementary-pair structure. It also
//! computes PMEPR per mask and regenerates the comparison tables.

pub mod baselines;
pub mod correlation;
pub mod dsa;
pub mod envelope;
pub mod error;
pub mod families;
pub mod io;
pub mod seqcore;
pub mod tables;

pub use correlation::{default_tolerance, is_css, is_gcp, is_golay_mate, xcorr};
pub use dsa::{apply_mask, classify_mask, dsa_report, DsaPmeprReport, MaskClass, RbMask};
pub use envelope::{pmepr, pmepr_critical, pmepr_with, PmeprResult, Sampling};
pub use error::{Error, Result};
pub use families::{
    build_family, enumerate_families, verify_family, FamilyInstance, TheoremVerdict,
};
pub use seqcore::{
    psi, BooleanFunction, ComplexSequence, FamilyDescriptor, FamilyKind, PhaseSequence,
};
pub use tables::{reproduce_table, BaselineConfig, TableArtifact, TableId};
