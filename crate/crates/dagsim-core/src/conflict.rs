//! Conflict elimination by the largest-weighted-descendants rule.
//!
//! Conflicting blocks stay live until an explicit resolution: the block
//! with more live descendants wins, ties break toward the smaller id, and
//! the loser is abandoned together with every block reachable from it.
//! Weight is the descendant count; all blocks weigh the same.

use std::collections::BTreeSet;
use std::io::{self, Write};

use thiserror::Error;

use crate::dag::{BlockId, DagError, DagLedger};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConflictError {
    #[error("a block cannot conflict with itself")]
    SelfConflict(BlockId),
    #[error("conflict ({0}, {1}) is already registered")]
    DuplicateRegistration(BlockId, BlockId),
    #[error("cannot register a conflict on abandoned block {0}")]
    RegisterAbandoned(BlockId),
    #[error("({0}, {1}) is not a registered conflict pair")]
    NotRegistered(BlockId, BlockId),
    #[error("conflict ({0}, {1}) is already resolved")]
    AlreadyResolved(BlockId, BlockId),
    #[error(transparent)]
    Dag(#[from] DagError),
}

/// Outcome of one resolution: who prevailed, the descendant weights that
/// decided it, and everything that was abandoned (the loser plus all of
/// its descendants at resolution time).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictDecision {
    pub winner: BlockId,
    pub loser: BlockId,
    pub winner_weight: u64,
    pub loser_weight: u64,
    pub abandoned: BTreeSet<BlockId>,
}

/// Records `(a, b)` as conflicting. Scenario-declared conflicts go through
/// here; duplicate-transaction conflicts are registered automatically on
/// append.
pub fn register_conflict(
    ledger: &mut DagLedger,
    a: BlockId,
    b: BlockId,
) -> Result<(), ConflictError> {
    if a == b {
        return Err(ConflictError::SelfConflict(a));
    }
    ledger.block(a)?;
    ledger.block(b)?;
    if ledger.is_abandoned(a)? {
        return Err(ConflictError::RegisterAbandoned(a));
    }
    if ledger.is_abandoned(b)? {
        return Err(ConflictError::RegisterAbandoned(b));
    }
    let key = DagLedger::pair_key(a, b);
    if ledger.conflicts.contains(&key) || ledger.resolved.contains(&key) {
        return Err(ConflictError::DuplicateRegistration(a, b));
    }
    ledger.conflicts.insert(key);
    Ok(())
}

/// Resolves a registered conflict pair: the side with more live
/// descendants wins (ties to the smaller id); the loser and all of its
/// descendants are abandoned, and later appends may not reference them.
///
/// Resolution is deterministic: re-running on an identical snapshot picks
/// the same winner.
pub fn resolve_conflict(
    ledger: &mut DagLedger,
    a: BlockId,
    b: BlockId,
) -> Result<ConflictDecision, ConflictError> {
    ledger.block(a)?;
    ledger.block(b)?;
    let key = DagLedger::pair_key(a, b);
    if ledger.resolved.contains(&key) {
        return Err(ConflictError::AlreadyResolved(a, b));
    }
    if !ledger.conflicts.contains(&key) {
        return Err(ConflictError::NotRegistered(a, b));
    }
    if ledger.is_abandoned(a)? || ledger.is_abandoned(b)? {
        // A side lost some other conflict first; there is nothing left to
        // decide here.
        return Err(ConflictError::AlreadyResolved(a, b));
    }

    let des_a = ledger.all_descendants(a)?;
    let des_b = ledger.all_descendants(b)?;
    let weight_a = des_a.len() as u64;
    let weight_b = des_b.len() as u64;
    let a_wins = match weight_a.cmp(&weight_b) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => a < b,
    };
    let (winner, loser, winner_weight, loser_weight, mut abandoned) = if a_wins {
        (a, b, weight_a, weight_b, des_b)
    } else {
        (b, a, weight_b, weight_a, des_a)
    };
    abandoned.insert(loser);
    ledger.mark_abandoned(&abandoned);
    ledger.conflicts.remove(&key);
    ledger.resolved.insert(key);
    Ok(ConflictDecision {
        winner,
        loser,
        winner_weight,
        loser_weight,
        abandoned,
    })
}

/// Decision log: `round,winner,loser,winner_weight,loser_weight` per line.
pub fn write_decision_log<W: Write>(
    decisions: &[(u32, ConflictDecision)],
    mut w: W,
) -> io::Result<()> {
    for (round, d) in decisions {
        writeln!(
            w,
            "{},{},{},{},{}",
            round,
            d.winner.index(),
            d.loser.index(),
            d.winner_weight,
            d.loser_weight
        )?;
    }
    Ok(())
}
