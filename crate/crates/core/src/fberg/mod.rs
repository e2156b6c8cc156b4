//! Nonconventional averages, the Furstenberg self-joining and the
//! van der Corput inequality on finite systems.

mod average;
mod joining;
mod structure;
mod vdc;

pub use average::{
    cesaro_limit_scalar, multirec2_check, nonconventional_average, period, recurrence_certificate, RecurrenceCertificate,
};
pub use joining::{furstenberg_joining, FurstenbergJoining};
pub use structure::{fberg_structure_predicates, structure_of, upsets_for_predicates, FbergStructureReport, UpsetPairFailure};
pub use vdc::{vdc_inequality, VdcReport, VectorSequence};
