//! Reward accounting: spread-capped transaction rewards, the increasing
//! per-depth verification split, and finalization-gated settlement.
//!
//! Every block carries a uniform verification reward `vrf`, divided into
//! strictly increasing parts `vrf_1 < vrf_2 < ... < vrf_depth`. The
//! producer of block `b` earns `vrf_k / |Des(x, k)|` from every ancestor
//! `x` at distance `k`, i.e. each ancestor's depth-`k` part is split
//! evenly over its distance-`k` descendants. Credits are evaluated
//! against a ledger snapshot and, together with the block's transaction
//! reward, move from pending to accrued exactly once -- when the block
//! first passes the finalization check.
//!
//! All amounts are exact rationals: conservation properties hold with
//! zero tolerance, never "up to epsilon".

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::dag::{BlockId, DagError, DagLedger, MinerId, TransactionId};

#[derive(Debug, Error, PartialEq)]
pub enum RewardError {
    #[error("reward amounts must be strictly positive")]
    NonPositiveAmount,
    #[error("verification depth must be at least 1")]
    ZeroDepth,
    #[error("spread cap must be at least 1")]
    SpreadCapBelowOne,
    #[error("transaction {0} breaks the max/min reward spread cap")]
    SpreadCapViolated(TransactionId),
    #[error("transaction {0} already has a reward")]
    DuplicateTransaction(TransactionId),
    #[error("block {0} is already tracked for payout")]
    AlreadyTracked(BlockId),
    #[error("payouts of an abandoned block are void")]
    AbandonedBlock(BlockId),
    #[error(transparent)]
    Dag(#[from] DagError),
}

/// Total verification reward of a block and its split into strictly
/// increasing per-depth parts summing exactly to the total.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewardSchedule {
    total: BigRational,
    parts: Vec<BigRational>,
}

impl RewardSchedule {
    /// Linear split: part `k` is proportional to `k`, so
    /// `vrf_k = total * 2k / (depth * (depth + 1))`. This is the simplest
    /// split that is strictly increasing and sums exactly to the total.
    pub fn linear(total: BigRational, depth: u32) -> Result<Self, RewardError> {
        if !total.is_positive() {
            return Err(RewardError::NonPositiveAmount);
        }
        if depth == 0 {
            return Err(RewardError::ZeroDepth);
        }
        let denom = BigRational::from_integer(BigInt::from(depth) * BigInt::from(depth + 1));
        let parts: Vec<BigRational> = (1..=depth)
            .map(|k| &total * BigRational::from_integer(BigInt::from(2 * u64::from(k))) / &denom)
            .collect();
        debug_assert_eq!(parts.iter().sum::<BigRational>(), total);
        Ok(RewardSchedule { total, parts })
    }

    pub fn total(&self) -> &BigRational {
        &self.total
    }

    pub fn depth(&self) -> u32 {
        self.parts.len() as u32
    }

    /// Part for depth `k`, 1-based.
    pub fn part(&self, k: u32) -> &BigRational {
        &self.parts[(k - 1) as usize]
    }

    pub fn parts(&self) -> &[BigRational] {
        &self.parts
    }
}

/// One verification credit: the paying ancestor, its distance, and the
/// exact amount `vrf_depth / |Des(source, depth)|`.
#[derive(Clone, Debug, PartialEq)]
pub struct Credit {
    pub source: BlockId,
    pub depth: u32,
    pub amount: BigRational,
}

/// All verification credits earned by the producer of one block, against
/// a fixed ledger snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationPayout {
    pub block: BlockId,
    pub producer: MinerId,
    pub credits: Vec<Credit>,
}

impl VerificationPayout {
    pub fn total(&self) -> BigRational {
        self.credits.iter().map(|c| &c.amount).sum()
    }
}

/// Verification credits owed to the producer of `b` under `schedule`,
/// evaluated against the current ledger snapshot.
///
/// For every depth `k` and every ancestor `x` at distance `k`, the
/// producer is credited `vrf_k / |Des(x, k)|`. Abandoned blocks neither
/// receive credits (calling this on one is an error) nor convey them
/// (they are invisible to the distance queries).
pub fn verification_payouts(
    ledger: &DagLedger,
    b: BlockId,
    schedule: &RewardSchedule,
) -> Result<VerificationPayout, RewardError> {
    let block = ledger.block(b)?;
    if ledger.is_abandoned(b)? {
        return Err(RewardError::AbandonedBlock(b));
    }
    let producer = block.producer;
    let mut credits = Vec::new();
    for k in 1..=schedule.depth() {
        for source in ledger.ancestors_at(b, k)? {
            let layer = ledger.descendants_at(source, k)?;
            debug_assert!(layer.contains(&b));
            let amount = schedule.part(k) / BigRational::from_integer(BigInt::from(layer.len()));
            credits.push(Credit {
                source,
                depth: k,
                amount,
            });
        }
    }
    Ok(VerificationPayout {
        block: b,
        producer,
        credits,
    })
}

/// Pool of pending transactions with spread-capped rewards: the largest
/// and smallest rewards may differ by a factor of at most the cap.
#[derive(Clone, Debug)]
pub struct TransactionPool {
    rewards: BTreeMap<TransactionId, BigRational>,
    spread_cap: BigRational,
}

impl TransactionPool {
    pub fn new(spread_cap: BigRational) -> Result<Self, RewardError> {
        if spread_cap < BigRational::from_integer(BigInt::from(1)) {
            return Err(RewardError::SpreadCapBelowOne);
        }
        Ok(TransactionPool {
            rewards: BTreeMap::new(),
            spread_cap,
        })
    }

    /// Adds a transaction reward, rejecting non-positive amounts,
    /// duplicates, and anything that would break the spread cap.
    pub fn insert(&mut self, tx: TransactionId, reward: BigRational) -> Result<(), RewardError> {
        if !reward.is_positive() {
            return Err(RewardError::NonPositiveAmount);
        }
        if self.rewards.contains_key(&tx) {
            return Err(RewardError::DuplicateTransaction(tx));
        }
        let mut lo = &reward;
        let mut hi = &reward;
        for r in self.rewards.values() {
            if r < lo {
                lo = r;
            }
            if r > hi {
                hi = r;
            }
        }
        if hi > &(lo * &self.spread_cap) {
            return Err(RewardError::SpreadCapViolated(tx));
        }
        self.rewards.insert(tx, reward);
        Ok(())
    }

    pub fn reward(&self, tx: TransactionId) -> Option<&BigRational> {
        self.rewards.get(&tx)
    }

    pub fn remove(&mut self, tx: TransactionId) -> Option<BigRational> {
        self.rewards.remove(&tx)
    }

    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }

    pub fn spread_cap(&self) -> &BigRational {
        &self.spread_cap
    }

    /// Rewards in descending order, the shape the selection game expects.
    pub fn sorted_rewards(&self) -> Vec<BigRational> {
        let mut out: Vec<BigRational> = self.rewards.values().cloned().collect();
        out.sort_by(|a, b| b.cmp(a));
        out
    }
}

#[derive(Clone, Debug)]
struct PendingEntry {
    producer: MinerId,
    tx_reward: BigRational,
}

/// Per-miner accrued balances plus per-block pending entries gated on
/// finalization.
#[derive(Clone, Debug, Default)]
pub struct PayoutLedger {
    accrued: BTreeMap<MinerId, BigRational>,
    pending: BTreeMap<BlockId, PendingEntry>,
    settled: BTreeSet<BlockId>,
    settled_counts: BTreeMap<MinerId, u64>,
}

impl PayoutLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a freshly appended block: its transaction reward waits,
    /// together with the verification credits, for finalization.
    pub fn track(
        &mut self,
        block: BlockId,
        producer: MinerId,
        tx_reward: BigRational,
    ) -> Result<(), RewardError> {
        if !tx_reward.is_positive() {
            return Err(RewardError::NonPositiveAmount);
        }
        if self.pending.contains_key(&block) || self.settled.contains(&block) {
            return Err(RewardError::AlreadyTracked(block));
        }
        self.pending.insert(
            block,
            PendingEntry {
                producer,
                tx_reward,
            },
        );
        Ok(())
    }

    /// Moves every pending block that now passes the finalization check to
    /// accrued: transaction reward plus verification credits evaluated
    /// against the current snapshot. Each block settles at most once;
    /// repeated calls settle nothing new. Returns the newly settled ids.
    pub fn settle_finalized(
        &mut self,
        ledger: &DagLedger,
        schedule: &RewardSchedule,
        threshold: u64,
    ) -> Result<Vec<BlockId>, RewardError> {
        let mut newly_settled = Vec::new();
        let candidates: Vec<BlockId> = self.pending.keys().copied().collect();
        for block in candidates {
            if ledger.is_abandoned(block)? {
                // Abandoned blocks can never finalize; the entry stays
                // pending and inert.
                continue;
            }
            if !ledger.is_finalized(block, schedule.depth(), threshold)? {
                continue;
            }
            let entry = self.pending.remove(&block).expect("candidate is pending");
            let verification = verification_payouts(ledger, block, schedule)?;
            let amount = entry.tx_reward + verification.total();
            *self
                .accrued
                .entry(entry.producer)
                .or_insert_with(BigRational::zero) += amount;
            self.settled.insert(block);
            *self.settled_counts.entry(entry.producer).or_insert(0) += 1;
            newly_settled.push(block);
        }
        Ok(newly_settled)
    }

    pub fn accrued(&self, miner: MinerId) -> BigRational {
        self.accrued.get(&miner).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Sum of pending transaction rewards for `miner`. Verification
    /// credits are not included: they are only fixed at settlement.
    pub fn pending_total(&self, miner: MinerId) -> BigRational {
        self.pending
            .values()
            .filter(|e| e.producer == miner)
            .map(|e| &e.tx_reward)
            .sum()
    }

    pub fn settled_count(&self, miner: MinerId) -> u64 {
        self.settled_counts.get(&miner).copied().unwrap_or(0)
    }

    pub fn is_settled(&self, block: BlockId) -> bool {
        self.settled.contains(&block)
    }

    /// Miners appearing anywhere in the books, in id order.
    pub fn miners(&self) -> BTreeSet<MinerId> {
        let mut out: BTreeSet<MinerId> = self.accrued.keys().copied().collect();
        out.extend(self.pending.values().map(|e| e.producer));
        out
    }

    /// Tabular report: `miner,accrued,pending,settled_blocks`, one row per
    /// miner in id order. Amounts are exact rationals.
    pub fn write_report<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "miner,accrued,pending,settled_blocks")?;
        for miner in self.miners() {
            writeln!(
                w,
                "{},{},{},{}",
                miner.0,
                self.accrued(miner),
                self.pending_total(miner),
                self.settled_count(miner)
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn chain(n: usize) -> (DagLedger, Vec<BlockId>) {
        let mut ledger = DagLedger::new();
        let mut ids = vec![ledger.genesis()];
        for i in 1..n {
            let tip = *ids.last().unwrap();
            let id = ledger
                .append_block((tip, tip), TransactionId(i as u64), MinerId(i as u32), i as u32)
                .unwrap();
            ids.push(id);
        }
        (ledger, ids)
    }

    #[test]
    fn linear_schedule_examples() {
        let s = RewardSchedule::linear(int(1), 1).unwrap();
        assert_eq!(s.parts(), &[int(1)]);

        let s = RewardSchedule::linear(int(1), 2).unwrap();
        assert_eq!(s.parts(), &[ratio(1, 3), ratio(2, 3)]);

        let s = RewardSchedule::linear(int(6), 3).unwrap();
        assert_eq!(s.parts(), &[int(1), int(2), int(3)]);
    }

    #[test]
    fn schedule_is_strictly_increasing_and_exact() {
        let s = RewardSchedule::linear(ratio(7, 3), 5).unwrap();
        for w in s.parts().windows(2) {
            assert!(w[0] < w[1]);
        }
        assert_eq!(s.parts().iter().sum::<BigRational>(), ratio(7, 3));
    }

    #[test]
    fn schedule_rejects_bad_inputs() {
        assert_eq!(
            RewardSchedule::linear(int(0), 3),
            Err(RewardError::NonPositiveAmount)
        );
        assert_eq!(
            RewardSchedule::linear(int(1), 0),
            Err(RewardError::ZeroDepth)
        );
    }

    #[test]
    fn chain_payout_is_whole_part() {
        // g <- a: producer of a receives vrf_1 / |Des(g, 1)| = 1
        let (ledger, ids) = chain(2);
        let schedule = RewardSchedule::linear(int(1), 1).unwrap();
        let payout = verification_payouts(&ledger, ids[1], &schedule).unwrap();
        assert_eq!(payout.total(), int(1));
        assert_eq!(payout.credits.len(), 1);
        assert_eq!(payout.credits[0].source, ids[0]);
    }

    #[test]
    fn siblings_split_the_part() {
        let mut ledger = DagLedger::new();
        let g = ledger.genesis();
        let a = ledger
            .append_block((g, g), TransactionId(1), MinerId(1), 1)
            .unwrap();
        let b = ledger
            .append_block((g, g), TransactionId(2), MinerId(2), 1)
            .unwrap();
        let schedule = RewardSchedule::linear(int(1), 1).unwrap();
        let pa = verification_payouts(&ledger, a, &schedule).unwrap();
        let pb = verification_payouts(&ledger, b, &schedule).unwrap();
        assert_eq!(pa.total(), ratio(1, 2));
        assert_eq!(pb.total(), ratio(1, 2));
    }

    #[test]
    fn pool_enforces_spread_cap() {
        let mut pool = TransactionPool::new(int(2)).unwrap();
        pool.insert(TransactionId(1), int(2)).unwrap();
        pool.insert(TransactionId(2), int(4)).unwrap();
        assert_eq!(
            pool.insert(TransactionId(3), int(5)),
            Err(RewardError::SpreadCapViolated(TransactionId(3)))
        );
        assert_eq!(
            pool.insert(TransactionId(4), ratio(3, 2)),
            Err(RewardError::SpreadCapViolated(TransactionId(4)))
        );
        // boundary exactly at the cap is allowed
        pool.insert(TransactionId(5), int(2)).unwrap();
        assert_eq!(pool.len(), 3);
    }

    #[test]
    fn settlement_is_gated_and_idempotent() {
        let (ledger, ids) = chain(7);
        let schedule = RewardSchedule::linear(int(1), 5).unwrap();
        let mut payouts = PayoutLedger::new();
        for (i, &id) in ids.iter().enumerate().skip(1) {
            payouts
                .track(id, MinerId(i as u32), int(10))
                .unwrap();
        }
        // threshold 4: a block needs 5 ancestors within depth 5, so only
        // blocks 5 and 6 qualify (4 and fewer ancestors otherwise)
        let settled = payouts.settle_finalized(&ledger, &schedule, 4).unwrap();
        assert_eq!(settled, vec![ids[5], ids[6]]);
        let again = payouts.settle_finalized(&ledger, &schedule, 4).unwrap();
        assert!(again.is_empty());
        assert!(payouts.is_settled(ids[5]));
        assert!(!payouts.is_settled(ids[2]));
        // accrued = tx reward + full verification total (all layers exist)
        assert_eq!(payouts.accrued(MinerId(5)), int(10) + int(1));
        assert_eq!(payouts.accrued(MinerId(2)), int(0));
    }

    #[test]
    fn double_track_rejected() {
        let (_, ids) = chain(2);
        let mut payouts = PayoutLedger::new();
        payouts.track(ids[1], MinerId(1), int(1)).unwrap();
        assert_eq!(
            payouts.track(ids[1], MinerId(1), int(1)),
            Err(RewardError::AlreadyTracked(ids[1]))
        );
    }

    #[test]
    fn report_is_deterministic() {
        let (ledger, ids) = chain(7);
        let schedule = RewardSchedule::linear(int(1), 5).unwrap();
        let mut payouts = PayoutLedger::new();
        for (i, &id) in ids.iter().enumerate().skip(1) {
            payouts.track(id, MinerId(i as u32), int(10)).unwrap();
        }
        payouts.settle_finalized(&ledger, &schedule, 4).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        payouts.write_report(&mut a).unwrap();
        payouts.write_report(&mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("miner,accrued,pending,settled_blocks\n"));
        assert!(text.contains("5,11,0,1"));
    }
}
