//! Partition-based trapdoor analysis for long-key Feistel networks.
//!
//! The crate is layered bottom-up:
//!
//! * [`f2lin`]: packed vectors, canonical subspaces, bricks and walls.
//! * [`sboxprops`]: differential and invariant-subspace metrics of S-boxes.
//! * [`difflayer`]: properness of linear diffusion layers.
//! * [`partition`]: partitions of `V` and their images under permutations.
//! * [`goursat`]: subgroups of `V×V` as Goursat triples.
//! * [`feistel`]: the Feistel operator and keyed encryption.
//! * [`trapdoor`]: propagation chains, chain searches, exclusion checks and
//!   the partition attack.
//! * [`permgroup`]: small permutation-group oracle.
//! * [`verify`]: self-check suites used by the command line tool.

pub mod difflayer;
pub mod error;
pub mod f2lin;
pub mod feistel;
pub mod goursat;
pub mod par;
pub mod partition;
pub mod permgroup;
pub mod sboxprops;
pub mod trapdoor;
pub mod verify;

pub use error::{Error, Result};
