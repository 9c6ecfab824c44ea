//! Brackets of finite rank, the universal enveloping tower `U^[n]`, the
//! trivial tower and Nichols algebras, and Milnor–Moore reconstruction.

mod bracket;
mod finite;
mod nichols;
mod reconstruct;
mod tower;

pub use bracket::{
    classical_envelope, dynkin_evaluate, BracketRule, ClassicalBracket, ExplicitBracket, StageBracket,
    StructureConstants, TrivialBracket,
};
pub use finite::{FiniteBraidedBialgebra, TensorAction};
pub use nichols::{
    class_s_evidence, combinatorial_rank, detect_trivial_bracket, ideal_tower, minimal_relations, nichols_truncation,
    rank_one_envelope, IdealChain, NicholsReport, RankOneEnvelope, RankReport,
};
pub use reconstruct::{infinitesimal_lie, reconstruct, CanonicalBracket, InfinitesimalLie, ReconstructionReport};
pub use tower::{
    bracket_constraint_space, check_bracket_compat, check_implicit_jacobi, check_split, compat_witness, run_tower,
    tower_step, trivial_bracket_step, BracketConstraints, TowerRun, TowerState,
};

/// Default cap on the number of tower stages.
pub const DEFAULT_MAX_STAGES: usize = 8;

/// Stage cap, overridable through `BRAIDTOWER_MAX_STAGES`.
pub fn max_stages() -> usize {
    std::env::var("BRAIDTOWER_MAX_STAGES").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_MAX_STAGES)
}
