//! Round-based DAG growth and descendant coverage.
//!
//! Each round, `s` new blocks are appended; every one independently
//! references an unordered pair of distinct leaves drawn uniformly from
//! the leaf set as it stood at the start of the round (all blocks of a
//! round see the same snapshot). With a single leaf, both refs name it.
//! Writing `X` for the number of snapshot leaves that were referenced at
//! least once, the leaf count obeys the exact bookkeeping identity
//!
//! ```text
//! |L_{t+1}| = |L_t| - X_t + s
//! ```
//!
//! since exactly the referenced leaves stop being leaves and all `s` new
//! blocks are leaves. Coverage experiments watch a single target block
//! and track how many leaves descend from it round by round until the
//! whole leaf set does.
//!
//! Growth runs keep all blocks conflict-free (distinct transactions);
//! every trial derives its own substream from the master seed.

use std::io::{self, Write};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dag::{BlockId, DagLedger, MinerId, TransactionId};
use crate::rng::substream;

/// Growth run parameters: blocks per round, number of rounds, seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthConfig {
    pub blocks_per_round: u32,
    pub rounds: u32,
    pub seed: u64,
}

/// One simulated round: the leaf count when the round began, how many of
/// those leaves gained a descendant, and the leaf count after.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u32,
    pub leaves: u32,
    pub referenced: u32,
    pub leaves_after: u32,
}

/// Per-round trace of a growth run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeafTrace {
    pub config: GrowthConfig,
    pub records: Vec<RoundRecord>,
}

impl LeafTrace {
    pub fn max_leaves(&self) -> u32 {
        self.records
            .iter()
            .map(|r| r.leaves.max(r.leaves_after))
            .max()
            .unwrap_or(1)
    }

    /// Exact bookkeeping identity on every recorded round, including
    /// continuity between consecutive records.
    pub fn recurrence_holds(&self) -> bool {
        let s = self.config.blocks_per_round;
        self.records
            .iter()
            .all(|r| r.leaves_after == r.leaves - r.referenced + s)
            && self
                .records
                .windows(2)
                .all(|w| w[1].leaves == w[0].leaves_after)
    }

    /// `round,leaves,referenced` per line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "round,leaves,referenced")?;
        for r in &self.records {
            writeln!(w, "{},{},{}", r.round, r.leaves, r.referenced)?;
        }
        Ok(())
    }
}

/// The round-synchronous grower. Wraps a ledger, a seeded stream, and a
/// fresh-transaction counter so grown blocks never conflict.
pub struct GrowthSim {
    ledger: DagLedger,
    rng: ChaCha8Rng,
    round: u32,
    next_tx: u64,
    last_appended: Vec<BlockId>,
}

impl GrowthSim {
    pub fn new(seed: u64) -> Self {
        GrowthSim {
            ledger: DagLedger::new(),
            rng: substream(seed, 0),
            round: 0,
            next_tx: 1,
            last_appended: Vec::new(),
        }
    }

    pub fn ledger(&self) -> &DagLedger {
        &self.ledger
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    /// Blocks appended by the most recent `step`, in append order.
    pub fn last_appended(&self) -> &[BlockId] {
        &self.last_appended
    }

    /// Runs one round: appends `s` blocks against the current leaf-set
    /// snapshot and returns the round record.
    pub fn step(&mut self, s: u32) -> RoundRecord {
        assert!(s >= 1, "at least one block per round");
        let snapshot: Vec<BlockId> = self.ledger.leaf_set().into_iter().collect();
        let leaves = snapshot.len() as u32;
        let mut referenced = vec![false; snapshot.len()];
        self.last_appended.clear();
        let append_round = self.round + 1;
        for _ in 0..s {
            let (a, b) = sample_leaf_pair(snapshot.len(), &mut self.rng);
            referenced[a] = true;
            referenced[b] = true;
            let id = self
                .ledger
                .append_block(
                    (snapshot[a], snapshot[b]),
                    TransactionId(self.next_tx),
                    MinerId(0),
                    append_round,
                )
                .expect("leaf refs are always valid");
            self.next_tx += 1;
            self.last_appended.push(id);
        }
        let x = referenced.iter().filter(|&&r| r).count() as u32;
        let record = RoundRecord {
            round: self.round,
            leaves,
            referenced: x,
            leaves_after: self.ledger.leaf_count() as u32,
        };
        debug_assert_eq!(record.leaves_after, leaves - x + s);
        self.round = append_round;
        record
    }
}

/// Uniform unordered pair of distinct indices below `count`; (0, 0) in
/// the single-leaf degenerate case.
fn sample_leaf_pair<R: Rng>(count: usize, rng: &mut R) -> (usize, usize) {
    if count == 1 {
        return (0, 0);
    }
    let a = rng.random_range(0..count);
    let mut b = rng.random_range(0..count - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

/// Runs `config.rounds` rounds from a fresh genesis ledger.
pub fn run_growth(config: &GrowthConfig) -> LeafTrace {
    let mut sim = GrowthSim::new(config.seed);
    let records = (0..config.rounds)
        .map(|_| sim.step(config.blocks_per_round))
        .collect();
    LeafTrace {
        config: *config,
        records,
    }
}

/// One draw of `X`: how many of `leaf_count` leaves get referenced when
/// `s` blocks each pick a uniform pair. Uses the same pair sampler as the
/// simulator.
pub fn sample_referenced<R: Rng>(leaf_count: u32, s: u32, rng: &mut R) -> u32 {
    let count = leaf_count as usize;
    let mut referenced = vec![false; count];
    for _ in 0..s {
        let (a, b) = sample_leaf_pair(count, rng);
        referenced[a] = true;
        referenced[b] = true;
    }
    referenced.iter().filter(|&&r| r).count() as u32
}

/// Closed-form `E[X] = L - L * (1 - 2/L)^s` at fixed leaf count `L`.
pub fn expected_referenced(leaf_count: u32, s: u32) -> f64 {
    let l = leaf_count as f64;
    l - l * (1.0 - 2.0 / l).powi(s as i32)
}

/// The bracket `[2s - 2s(s-1)/L, 2s]` that contains `E[X]` whenever
/// `L >= 2s`.
pub fn expected_referenced_bracket(leaf_count: u32, s: u32) -> (f64, f64) {
    let l = leaf_count as f64;
    let s = s as f64;
    (2.0 * s - 2.0 * s * (s - 1.0) / l, 2.0 * s)
}

/// Coverage experiment parameters. The target is the first block created
/// in `inject_round` (rounds are 0-based); the run stops once every leaf
/// descends from the target, then continues `post_rounds` more rounds to
/// expose absorption, or gives up at `max_rounds`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageConfig {
    pub blocks_per_round: u32,
    pub inject_round: u32,
    pub max_rounds: u32,
    pub post_rounds: u32,
    pub seed: u64,
}

/// Per-round coverage record, starting at the injection round. `leaves`
/// and `covered` are both taken at the end of the round, so they describe
/// the same leaf set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub round: u32,
    pub leaves: u32,
    pub referenced: u32,
    /// Leaves that descend from the target (the target itself while it
    /// stays a leaf).
    pub covered: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageTrace {
    pub config: CoverageConfig,
    pub target: BlockId,
    /// First round whose whole leaf set descends from the target.
    pub covered_round: Option<u32>,
    pub rows: Vec<CoverageRow>,
}

impl CoverageTrace {
    /// Rounds from injection to full coverage.
    pub fn coverage_delay(&self) -> Option<u32> {
        self.covered_round.map(|r| r - self.config.inject_round)
    }

    /// `round,leaves,referenced,covered` per line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "round,leaves,referenced,covered")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{}",
                r.round, r.leaves, r.referenced, r.covered
            )?;
        }
        Ok(())
    }
}

/// Tracks how long the first block of `inject_round` takes to sit below
/// the entire leaf set. A new block is covered exactly when it references
/// a covered block (or the target); coverage of the leaf set is absorbing
/// because new blocks only reference leaves.
pub fn coverage_time(config: &CoverageConfig) -> CoverageTrace {
    assert!(config.inject_round < config.max_rounds);
    let s = config.blocks_per_round;
    let mut sim = GrowthSim::new(config.seed);
    for _ in 0..config.inject_round {
        sim.step(s);
    }
    let record = sim.step(s);
    let target = sim.last_appended()[0];
    // covered[i] = block with index i descends from target (or is it)
    let mut covered = vec![false; sim.ledger().len()];
    covered[target.index() as usize] = true;

    let mut rows = Vec::new();
    let mut covered_round = None;
    let mut push_row = |sim: &GrowthSim, record: &RoundRecord, covered: &[bool]| -> (u32, u32) {
        let leaves = sim.ledger().leaf_count() as u32;
        let covered_leaves = sim
            .ledger()
            .leaf_set()
            .iter()
            .filter(|id| covered[id.index() as usize])
            .count() as u32;
        rows.push(CoverageRow {
            round: record.round,
            leaves,
            referenced: record.referenced,
            covered: covered_leaves,
        });
        (covered_leaves, leaves)
    };
    let (c, l) = push_row(&sim, &record, &covered);
    if c == l {
        covered_round = Some(record.round);
    }

    let mut post_left = config.post_rounds;
    while sim.round() < config.max_rounds {
        if covered_round.is_some() {
            if post_left == 0 {
                break;
            }
            post_left -= 1;
        }
        let record = sim.step(s);
        covered.resize(sim.ledger().len(), false);
        for &id in sim.last_appended() {
            let parents_covered = sim
                .ledger()
                .block(id)
                .expect("fresh block")
                .parents()
                .any(|p| covered[p.index() as usize]);
            if parents_covered {
                covered[id.index() as usize] = true;
            }
        }
        let (c, l) = push_row(&sim, &record, &covered);
        if covered_round.is_none() && c == l {
            covered_round = Some(record.round);
        }
    }

    CoverageTrace {
        config: *config,
        target,
        covered_round,
        rows,
    }
}
