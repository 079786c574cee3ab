//! Exact game-theoretic machinery: dominance via rational simplex, iterated
//! elimination traces, belief structures and an epistemic model checker.

pub mod dominance;
pub mod elimination;
pub mod game;
pub mod harness;
pub mod logic;
pub mod lp;
pub mod ratio;
pub mod structures;

pub use dominance::{
    find_dominator, find_justifying_belief, BeliefCertificate, DominanceCertificate, Dominator,
    DominatorClass, DominanceMode, SupportMode,
};
pub use elimination::{eliminate, rationalizable_sets, survives, Depth, EliminationTrace};
pub use game::{
    best_responses, expected_utility, Belief, GameError, MixedStrategy, NormalFormGame,
    StrategyRestriction,
};
pub use harness::{
    fixed_suite, run_verification, GameGenerator, HarnessError, VerificationReport, VerifyParams,
};
pub use logic::{
    diamond_query, mk_c, mk_d, mk_e, mk_ominus, parse, rat_all, render,
    strongly_admissible_level, DiamondOracle, Formula, LogicError, ModelChecker, TheoremOracle,
};
pub use lp::{solve, Constraint, LinearProgram, LpError, LpOutcome, Relation, Sense};
pub use ratio::Rat;
pub use structures::{
    add_null_state, build_mbar, build_minfty, build_rationalizability_structure, check_appropriate,
    merge_conjunction, AppropriatenessReport, ProbabilityStructure, StructureError,
};
