//! Minimax, Borda and Copeland social choice correspondences, μ-majority
//! graphs, and tools for checking when Minimax is biased under preference
//! reversal.
//!
//! Alternatives are `1..=n`. A [`Profile`] holds one [`Ranking`] per voter;
//! every majority query goes through its [`TallyMatrix`].
//!
//! ```
//! use reversal_bias::{audit_rule, Profile, Rule};
//!
//! let p: Profile = "1 1 1 2 3 4\n2 3 4 3 4 2\n3 4 2 4 2 3\n4 2 3 1 1 1".parse().unwrap();
//! let report = audit_rule(&p, Rule::Minimax);
//! assert!(report.type1);
//! assert_eq!(report.selection_p.to_vec(), vec![1]);
//! ```

pub mod bias;
pub mod error;
pub mod graph;
pub mod lab;
pub mod prefs;
pub mod rules;
pub mod search;
pub mod set;

pub use bias::{
    audit_profile, audit_record, audit_rule, bias_flags, in_table, AuditRecord, BiasFlags,
    BiasReport, BiasType,
};
pub use error::{Error, Result};
pub use graph::{
    acyclicity_threshold, dominant_set, greenberg_threshold, majority_graph, minimal_threshold,
    profile_threshold, Digraph, GraphAnalysis, MajorityGraph,
};
pub use prefs::{parse_profile, reverse_profile, serialize_profile, tally, Profile, Ranking, TallyMatrix};
pub use rules::{
    borda, borda_scores, condorcet_loser, condorcet_winner, copeland, copeland_scores, minimax,
    minimax_direct, minimax_threshold, Rule, Scores,
};
pub use search::{
    construct_cycle_profile, construct_witness_even, construct_witness_odd, enumerate_anonymous,
    find_witness, fixture, FixtureId, SearchMode, SearchOutcome, SearchStrategy, Witness,
    WitnessBundle,
};
pub use set::AltSet;
