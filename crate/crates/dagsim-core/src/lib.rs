//! Deterministic simulation laboratory for a block-DAG ledger.
//!
//! The ledger departs from a linear chain: every block references two
//! previous blocks, so the ledger forms a directed acyclic graph that can
//! be extended in many directions at once. This crate models the pieces
//! needed to study such a system at desk scale:
//!
//! - [`dag`] — the append-only reference DAG with distance, ancestor and
//!   descendant queries, leaf tracking, and the depth-threshold
//!   finalization predicate.
//! - [`reward`] — transaction rewards capped by a spread factor and the
//!   increasing per-depth verification reward split, paid to producers of
//!   descendants and collectable only at finalization.
//! - [`conflict`] — elimination of conflicting blocks by the
//!   largest-weighted-descendants rule, with abandonment propagation.
//! - [`game`] — the one-shot transaction-selection game played by rational
//!   miners: exact and Monte Carlo utilities, best-response dynamics,
//!   a brute-force equilibrium scan, and selection statistics.
//! - [`growth`] — round-based DAG growth with uniform tip selection,
//!   leaf-set traces, and descendant-coverage experiments.
//! - [`walk`] — survival probabilities of a biased fixed-step random walk.
//! - [`budget`] — the verification-budget feasibility calculator.
//!
//! Everything is deterministic given a seed: simulations draw from
//! per-trial ChaCha substreams (see [`rng`]) and reward accounting uses
//! exact rational arithmetic throughout.

pub mod budget;
pub mod conflict;
pub mod dag;
pub mod game;
pub mod growth;
pub mod rational;
pub mod reward;
pub mod rng;
pub mod walk;

pub use dag::{Block, BlockId, DagError, DagLedger, Distance, MinerId, TransactionId};
pub use reward::{PayoutLedger, RewardError, RewardSchedule, TransactionPool};
