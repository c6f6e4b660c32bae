//! Constructive finite-blocklength machinery: frequency types, the
//! typical-subspace encoding family and its identities, entanglement-assisted
//! code objects with exact error evaluation, the no-strong-converse
//! counterexample code, the max-from-average conversion, the robustification
//! implication, permutation-derandomized codes, and a pretty-good-measurement
//! codebook search.

pub mod code;
pub mod convert;
pub mod counterexample;
pub mod encoding;
pub mod pgm;
pub mod robustify;
pub mod types;

pub use code::{EACode, ErrorReport, evaluate_code_avqc, evaluate_code_compound, random_toy_code};
pub use convert::{avqc_code_from_compound, max_from_avg, permuted_code, random_permutation};
pub use counterexample::{CounterexampleCode, counterexample_code};
pub use encoding::{
    EncodingFamily, MutualGapReport, build_encoding_family, mutual_approx_gap,
    verify_entropy_invariance, verify_scrambling, weyl_basis,
};
pub use pgm::{CqCode, pgm_best_of_seeds, pgm_code_search};
pub use robustify::{
    RobustificationReport, RobustificationSweep, robustification_check, robustification_sweep,
};
pub use types::{TypeClass, enumerate_types, type_of};
