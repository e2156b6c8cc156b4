//! Combinatorial spaces over `[k]`, line-free extremal search, the
//! correspondence measures and finite truncations of strongly stationary laws.

mod correspondence;
mod extremal;
mod stationary;
mod word;

pub use correspondence::{build_correspondence, check_inf_dhj_premises, CorrespondenceMeasure, PointEvents};
pub use extremal::{max_line_free, subspace_forcing_check, ForcingReport, LineFreeResult, MAX_POINTS};
pub use stationary::{
    coordinate_count, coordinates, dhj2_implication, insensitive_algebra, line_structure_predicates, marginals,
    strong_stationarity_check, Dhj2Report, LineStructureReport, Marginals, StationarityReport, StationaryLawTruncation,
};
pub use word::{enumerate_lines, letter_replace, subspace_embed, subspaces_of_len, CombinatorialSubspace, Word, MAX_ALPHABET};
