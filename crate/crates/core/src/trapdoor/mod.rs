//! Propagation chains through Feistel networks, chain searches, the
//! exclusion check, cipher constructions and the partition attack.

mod attack;
mod chain;
mod construct;
mod exclusion;
mod search;

pub use attack::{
    distinguish, distinguish_spec, recover_key_coset, AttackReport, DistinguisherReport,
    KeyRecovery, MAX_KEY_TUPLES,
};
pub use chain::{
    lift_partition, maps_cosets_into, propagate_chain, reduce_to_spn, spn_image, verify_chain,
    verify_lift, PartitionChain, Propagation, SpnReduction,
};
pub use construct::{build_strong_cipher, build_weak_cipher, weak_walls};
pub use exclusion::{
    chain_verdict, check_exclusion_theorem, check_hypotheses, ChainVerdict, ExclusionReport,
    FamilyOutcome, HypothesisCheck, RoundHypotheses, Variant,
};
pub use search::{
    linear_loci, round_loci, search_trapdoor_chains, SearchFamily, MAX_EXHAUSTIVE_WIDTH,
    MAX_GRAPH_ANCHORS,
};
