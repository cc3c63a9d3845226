//! The append-only reference DAG.
//!
//! Blocks reference two previous blocks, so the ledger grows as a directed
//! acyclic graph rather than a chain. Distance between blocks is the length
//! of the shortest directed reference path, measured parent-to-child: for
//! blocks `a` and `b`, `distance(a, b)` is finite exactly when `b` is a
//! descendant of `a`. Abandoned blocks (losers of conflict resolution and
//! their descendants) are excluded from every query: they neither receive
//! nor convey reachability. Since abandonment is closed under descendants,
//! the live subgraph is closed under ancestors, so queries on live blocks
//! never see a half-abandoned path.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Miner identity. The genesis block is produced by `MinerId(0)` by
/// convention.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct MinerId(pub u32);

/// Transaction identity. Each block carries exactly one transaction;
/// `TransactionId(0)` is reserved for genesis.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct TransactionId(pub u64);

impl TransactionId {
    pub const GENESIS: TransactionId = TransactionId(0);
}

impl fmt::Display for MinerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m{}", self.0)
    }
}

impl fmt::Display for TransactionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tx{}", self.0)
    }
}

/// Block identifier: a dense creation index plus the round the block was
/// appended in. Ordering follows creation order, which makes ids usable
/// for deterministic tie-breaking.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BlockId {
    index: u32,
    round: u32,
}

impl BlockId {
    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn round(&self) -> u32 {
        self.round
    }
}

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b{}", self.index)
    }
}

impl fmt::Debug for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b{}@r{}", self.index, self.round)
    }
}

/// A ledger entry. `refs` is `None` only for genesis; appends made while
/// the ledger had a single leaf may store the same parent twice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub id: BlockId,
    pub refs: Option<(BlockId, BlockId)>,
    pub tx: TransactionId,
    pub producer: MinerId,
    pub round: u32,
}

impl Block {
    /// Distinct parents (one entry when both refs name the same block).
    pub fn parents(&self) -> impl Iterator<Item = BlockId> {
        let (a, b) = match self.refs {
            None => (None, None),
            Some((a, b)) if a == b => (Some(a), None),
            Some((a, b)) => (Some(a), Some(b)),
        };
        a.into_iter().chain(b)
    }
}

/// Hop count along the shortest directed reference path, or `Infinite`
/// when no path exists. `Finite(k) < Infinite` for every `k`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Distance {
    Finite(u32),
    Infinite,
}

impl Distance {
    pub fn as_finite(&self) -> Option<u32> {
        match self {
            Distance::Finite(k) => Some(*k),
            Distance::Infinite => None,
        }
    }
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use Distance::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Infinite) => std::cmp::Ordering::Less,
            (Infinite, Finite(_)) => std::cmp::Ordering::Greater,
            (Infinite, Infinite) => std::cmp::Ordering::Equal,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DagError {
    #[error("unknown block {0}")]
    UnknownBlock(BlockId),
    #[error("reference to abandoned block {0}")]
    AbandonedRef(BlockId),
    #[error("equal refs are only allowed while the ledger has exactly one leaf")]
    RefsNotDistinct,
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("malformed ledger record at line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },
}

/// The reference DAG plus bookkeeping: reverse (parent-to-children) index,
/// abandonment flags, the maintained leaf set, and registered conflict
/// pairs.
///
/// Appends are serialized through `&mut self`; every query takes `&self`
/// and is pure over the current snapshot.
#[derive(Clone, Debug)]
pub struct DagLedger {
    blocks: Vec<Block>,
    children: Vec<Vec<u32>>,
    abandoned: Vec<bool>,
    leaves: BTreeSet<BlockId>,
    tx_owners: BTreeMap<TransactionId, Vec<u32>>,
    /// Unresolved conflict pairs, stored as (low index, high index).
    pub(crate) conflicts: BTreeSet<(u32, u32)>,
    /// Pairs that have already been resolved.
    pub(crate) resolved: BTreeSet<(u32, u32)>,
    /// Highest round seen so far; appends in a strictly larger round
    /// refresh the sole-leaf snapshot below.
    snapshot_round: u32,
    /// The single leaf as of the start of `snapshot_round`, if the leaf
    /// set was a singleton then. Blocks of one round are created against
    /// the same leaf-set snapshot, so the equal-refs allowance must hold
    /// for the whole round, not just the first append.
    snapshot_sole_leaf: Option<BlockId>,
}

impl Default for DagLedger {
    fn default() -> Self {
        Self::new()
    }
}

impl DagLedger {
    /// Fresh ledger holding only the genesis block (round 0, no refs).
    pub fn new() -> Self {
        let genesis = Block {
            id: BlockId { index: 0, round: 0 },
            refs: None,
            tx: TransactionId::GENESIS,
            producer: MinerId(0),
            round: 0,
        };
        let mut leaves = BTreeSet::new();
        leaves.insert(genesis.id);
        let mut tx_owners = BTreeMap::new();
        tx_owners.insert(TransactionId::GENESIS, vec![0]);
        DagLedger {
            blocks: vec![genesis],
            children: vec![Vec::new()],
            abandoned: vec![false],
            leaves,
            tx_owners,
            conflicts: BTreeSet::new(),
            resolved: BTreeSet::new(),
            snapshot_round: 0,
            snapshot_sole_leaf: Some(BlockId { index: 0, round: 0 }),
        }
    }

    pub fn genesis(&self) -> BlockId {
        self.blocks[0].id
    }

    /// Number of blocks, including abandoned ones.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    /// A ledger always holds at least genesis.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, id: BlockId) -> bool {
        self.blocks
            .get(id.index as usize)
            .is_some_and(|b| b.id == id)
    }

    pub fn block(&self, id: BlockId) -> Result<&Block, DagError> {
        self.blocks
            .get(id.index as usize)
            .filter(|b| b.id == id)
            .ok_or(DagError::UnknownBlock(id))
    }

    pub fn is_abandoned(&self, id: BlockId) -> Result<bool, DagError> {
        self.block(id)?;
        Ok(self.abandoned[id.index as usize])
    }

    pub fn blocks(&self) -> impl Iterator<Item = &Block> {
        self.blocks.iter()
    }

    fn live(&self, index: u32) -> bool {
        !self.abandoned[index as usize]
    }

    /// Appends a block referencing `refs`, carrying `tx`, produced by
    /// `producer` in `round`. Returns the new id, strictly greater than
    /// every existing id.
    ///
    /// Both refs must exist and be live. Equal refs are rejected unless
    /// they name the block that was the ledger's sole leaf when `round`
    /// began (the two-reference rule is unsatisfiable otherwise); the
    /// allowance covers every append of that round, since all blocks of a
    /// round are created against the same leaf-set snapshot. If `tx` is
    /// already carried by a live block, the new block is appended anyway
    /// and the pair is recorded as a conflict for later resolution.
    pub fn append_block(
        &mut self,
        refs: (BlockId, BlockId),
        tx: TransactionId,
        producer: MinerId,
        round: u32,
    ) -> Result<BlockId, DagError> {
        let (a, b) = refs;
        self.block(a)?;
        self.block(b)?;
        if self.abandoned[a.index as usize] {
            return Err(DagError::AbandonedRef(a));
        }
        if self.abandoned[b.index as usize] {
            return Err(DagError::AbandonedRef(b));
        }
        if round > self.snapshot_round {
            self.snapshot_round = round;
            self.snapshot_sole_leaf = if self.leaves.len() == 1 {
                self.leaves.iter().next().copied()
            } else {
                None
            };
        }
        if a == b && self.snapshot_sole_leaf != Some(a) {
            return Err(DagError::RefsNotDistinct);
        }

        let index = self.blocks.len() as u32;
        let id = BlockId { index, round };

        // A duplicate transaction in a live block is a conflict, resolved
        // later by the largest-weighted-descendants rule.
        match self.tx_owners.entry(tx) {
            Entry::Occupied(mut entry) => {
                for &owner in entry.get().iter() {
                    if !self.abandoned[owner as usize] {
                        self.conflicts.insert((owner, index));
                    }
                }
                entry.get_mut().push(index);
            }
            Entry::Vacant(entry) => {
                entry.insert(vec![index]);
            }
        }

        self.children[a.index as usize].push(index);
        if b != a {
            self.children[b.index as usize].push(index);
        }
        self.blocks.push(Block {
            id,
            refs: Some((a, b)),
            tx,
            producer,
            round,
        });
        self.children.push(Vec::new());
        self.abandoned.push(false);
        self.leaves.remove(&a);
        self.leaves.remove(&b);
        self.leaves.insert(id);
        Ok(id)
    }

    /// Shortest reference distance from `from` down to `to`; `Infinite`
    /// when `to` is not a descendant of `from`. Paths through abandoned
    /// blocks do not count, and `d(x, x) = 0` for every block.
    pub fn distance(&self, from: BlockId, to: BlockId) -> Result<Distance, DagError> {
        self.block(from)?;
        self.block(to)?;
        if from == to {
            return Ok(Distance::Finite(0));
        }
        if !self.live(from.index) || !self.live(to.index) {
            return Ok(Distance::Infinite);
        }
        // Walk upward from `to` along refs; the upward out-degree is at
        // most 2, which keeps frontiers small.
        let mut visited = vec![false; self.blocks.len()];
        visited[to.index as usize] = true;
        let mut frontier = vec![to.index];
        let mut depth = 0u32;
        while !frontier.is_empty() {
            depth += 1;
            let mut next = Vec::new();
            for idx in frontier {
                for parent in self.blocks[idx as usize].parents() {
                    let p = parent.index;
                    if !self.live(p) || visited[p as usize] {
                        continue;
                    }
                    if parent == from {
                        return Ok(Distance::Finite(depth));
                    }
                    visited[p as usize] = true;
                    next.push(p);
                }
            }
            frontier = next;
        }
        Ok(Distance::Infinite)
    }

    /// Blocks at shortest distance exactly `k` above `b` (`k >= 1`).
    /// Shortest-path semantics: a block belongs to exactly one layer.
    pub fn ancestors_at(&self, b: BlockId, k: u32) -> Result<BTreeSet<BlockId>, DagError> {
        if k == 0 {
            return Err(DagError::ZeroDepth);
        }
        let mut layers = self.layers_up(b, k)?;
        if layers.len() == k as usize {
            Ok(layers.pop().unwrap())
        } else {
            Ok(BTreeSet::new())
        }
    }

    /// Blocks at shortest distance exactly `k` below `b` (`k >= 1`).
    pub fn descendants_at(&self, b: BlockId, k: u32) -> Result<BTreeSet<BlockId>, DagError> {
        self.block(b)?;
        if k == 0 {
            return Err(DagError::ZeroDepth);
        }
        if !self.live(b.index) {
            return Ok(BTreeSet::new());
        }
        let mut visited = vec![false; self.blocks.len()];
        visited[b.index as usize] = true;
        let mut frontier = vec![b.index];
        for _ in 0..k {
            let mut next = Vec::new();
            for idx in frontier {
                for &child in &self.children[idx as usize] {
                    if self.live(child) && !visited[child as usize] {
                        visited[child as usize] = true;
                        next.push(child);
                    }
                }
            }
            frontier = next;
            if frontier.is_empty() {
                break;
            }
        }
        Ok(frontier
            .into_iter()
            .map(|i| self.blocks[i as usize].id)
            .collect())
    }

    /// Every live block reachable below `b`, excluding `b` itself.
    pub fn all_descendants(&self, b: BlockId) -> Result<BTreeSet<BlockId>, DagError> {
        self.block(b)?;
        let mut out = BTreeSet::new();
        if !self.live(b.index) {
            return Ok(out);
        }
        let mut visited = vec![false; self.blocks.len()];
        visited[b.index as usize] = true;
        let mut stack = vec![b.index];
        while let Some(idx) = stack.pop() {
            for &child in &self.children[idx as usize] {
                if self.live(child) && !visited[child as usize] {
                    visited[child as usize] = true;
                    out.insert(self.blocks[child as usize].id);
                    stack.push(child);
                }
            }
        }
        Ok(out)
    }

    /// Union of ancestor layers 1..=depth above `b`.
    pub fn ancestors_within(&self, b: BlockId, depth: u32) -> Result<BTreeSet<BlockId>, DagError> {
        if depth == 0 {
            return Err(DagError::ZeroDepth);
        }
        let layers = self.layers_up(b, depth)?;
        let mut out = BTreeSet::new();
        for layer in layers {
            out.extend(layer);
        }
        Ok(out)
    }

    /// BFS layers above `b` out to `max_depth`. Entry `i` of the result
    /// holds the blocks at shortest distance `i + 1`; the vector is cut
    /// short once a layer comes up empty.
    fn layers_up(&self, b: BlockId, max_depth: u32) -> Result<Vec<BTreeSet<BlockId>>, DagError> {
        self.block(b)?;
        let mut layers = Vec::new();
        if !self.live(b.index) {
            return Ok(layers);
        }
        let mut visited = vec![false; self.blocks.len()];
        visited[b.index as usize] = true;
        let mut frontier = vec![b.index];
        for _ in 0..max_depth {
            let mut next = Vec::new();
            let mut layer = BTreeSet::new();
            for idx in &frontier {
                for parent in self.blocks[*idx as usize].parents() {
                    let p = parent.index;
                    if self.live(p) && !visited[p as usize] {
                        visited[p as usize] = true;
                        layer.insert(parent);
                        next.push(p);
                    }
                }
            }
            if layer.is_empty() {
                break;
            }
            layers.push(layer);
            frontier = next;
        }
        Ok(layers)
    }

    /// Live blocks with no live children.
    pub fn leaf_set(&self) -> BTreeSet<BlockId> {
        self.leaves.clone()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_leaf(&self, id: BlockId) -> bool {
        self.leaves.contains(&id)
    }

    /// Finalization check: true once more than `threshold` distinct
    /// ancestors sit within `depth` hops above `b`. Genesis has no
    /// ancestors and is finalized by definition.
    pub fn is_finalized(&self, b: BlockId, depth: u32, threshold: u64) -> Result<bool, DagError> {
        self.block(b)?;
        if b == self.genesis() {
            return Ok(true);
        }
        Ok(self.ancestors_within(b, depth)?.len() as u64 > threshold)
    }

    /// Marks every block in `set` abandoned and repairs the leaf set:
    /// parents left without live children become leaves again.
    pub(crate) fn mark_abandoned(&mut self, set: &BTreeSet<BlockId>) {
        for id in set {
            self.abandoned[id.index as usize] = true;
            self.leaves.remove(id);
        }
        for id in set {
            for parent in self.blocks[id.index as usize].parents() {
                let p = parent.index as usize;
                if !self.abandoned[p]
                    && self.children[p].iter().all(|&c| self.abandoned[c as usize])
                {
                    self.leaves.insert(parent);
                }
            }
        }
    }

    pub(crate) fn pair_key(a: BlockId, b: BlockId) -> (u32, u32) {
        if a.index <= b.index {
            (a.index, b.index)
        } else {
            (b.index, a.index)
        }
    }

    pub(crate) fn id_at(&self, index: u32) -> BlockId {
        self.blocks[index as usize].id
    }

    /// Registered, still unresolved conflict pairs.
    pub fn conflict_pairs(&self) -> Vec<(BlockId, BlockId)> {
        self.conflicts
            .iter()
            .map(|&(a, b)| (self.id_at(a), self.id_at(b)))
            .collect()
    }

    /// Writes one record per block, ordered by id:
    /// `index,ref1,ref2,tx,producer,round` with empty refs for genesis.
    pub fn export_records<W: Write>(&self, mut w: W) -> io::Result<()> {
        for block in &self.blocks {
            let (r1, r2) = match block.refs {
                None => (String::new(), String::new()),
                Some((a, b)) => (a.index.to_string(), b.index.to_string()),
            };
            writeln!(
                w,
                "{},{},{},{},{},{}",
                block.id.index, r1, r2, block.tx.0, block.producer.0, block.round
            )?;
        }
        Ok(())
    }

    /// Rebuilds a ledger from `export_records` output. Structure and
    /// duplicate-transaction conflicts are reconstructed; conflict
    /// resolutions (abandonment) are not part of the record format.
    pub fn import_records<R: BufRead>(r: R) -> Result<DagLedger, DagError> {
        let mut ledger: Option<DagLedger> = None;
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| DagError::MalformedRecord {
                line: lineno + 1,
                reason: e.to_string(),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            let malformed = |reason: &str| DagError::MalformedRecord {
                line: lineno + 1,
                reason: reason.to_string(),
            };
            if fields.len() != 6 {
                return Err(malformed("expected 6 comma-separated fields"));
            }
            let index: u32 = fields[0].parse().map_err(|_| malformed("bad index"))?;
            let tx: u64 = fields[3].parse().map_err(|_| malformed("bad tx"))?;
            let producer: u32 = fields[4].parse().map_err(|_| malformed("bad producer"))?;
            let round: u32 = fields[5].parse().map_err(|_| malformed("bad round"))?;
            match ledger {
                None => {
                    if index != 0 || !fields[1].is_empty() || !fields[2].is_empty() {
                        return Err(malformed("first record must be genesis with empty refs"));
                    }
                    if tx != TransactionId::GENESIS.0 || round != 0 {
                        return Err(malformed("genesis must carry tx 0 at round 0"));
                    }
                    ledger = Some(DagLedger::new());
                }
                Some(ref mut led) => {
                    if index as usize != led.len() {
                        return Err(malformed("record index out of order"));
                    }
                    let a_idx: u32 = fields[1].parse().map_err(|_| malformed("bad ref"))?;
                    let b_idx: u32 = fields[2].parse().map_err(|_| malformed("bad ref"))?;
                    if a_idx as usize >= led.len() || b_idx as usize >= led.len() {
                        return Err(malformed("ref to a later block"));
                    }
                    let a = led.blocks[a_idx as usize].id;
                    let b = led.blocks[b_idx as usize].id;
                    led.append_block((a, b), TransactionId(tx), MinerId(producer), round)?;
                }
            }
        }
        ledger.ok_or(DagError::MalformedRecord {
            line: 0,
            reason: "empty ledger file".to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> (DagLedger, Vec<BlockId>) {
        // genesis <- b1 <- b2 <- ... each referencing the single leaf twice
        let mut ledger = DagLedger::new();
        let mut ids = vec![ledger.genesis()];
        for i in 1..n {
            let tip = *ids.last().unwrap();
            let id = ledger
                .append_block((tip, tip), TransactionId(i as u64), MinerId(0), i as u32)
                .unwrap();
            ids.push(id);
        }
        (ledger, ids)
    }

    /// g with direct children a and b, joined by c = (a, b).
    fn diamond() -> (DagLedger, BlockId, BlockId, BlockId, BlockId) {
        let mut ledger = DagLedger::new();
        let g = ledger.genesis();
        let a = ledger
            .append_block((g, g), TransactionId(1), MinerId(1), 1)
            .unwrap();
        // leaves = {a}: the single-leaf rule still permits equal refs
        let b = ledger
            .append_block((g, g), TransactionId(2), MinerId(2), 1)
            .unwrap();
        let c = ledger
            .append_block((a, b), TransactionId(3), MinerId(3), 2)
            .unwrap();
        (ledger, g, a, b, c)
    }

    #[test]
    fn empty_ledger_has_genesis_leaf() {
        let ledger = DagLedger::new();
        let g = ledger.genesis();
        assert_eq!(ledger.len(), 1);
        assert_eq!(ledger.leaf_set(), BTreeSet::from([g]));
        assert_eq!(ledger.block(g).unwrap().refs, None);
        assert_eq!(ledger.block(g).unwrap().round, 0);
    }

    #[test]
    fn single_leaf_degenerate_append() {
        let mut ledger = DagLedger::new();
        let g = ledger.genesis();
        let a = ledger
            .append_block((g, g), TransactionId(1), MinerId(0), 1)
            .unwrap();
        assert!(a > g);
        assert_eq!(ledger.leaf_set(), BTreeSet::from([a]));
        // a counts g as one parent, not two
        assert_eq!(ledger.block(a).unwrap().parents().count(), 1);
    }

    #[test]
    fn equal_refs_rejected_with_multiple_leaves() {
        let (mut ledger, g, a, b, _c) = diamond();
        // one leaf (c): equal refs fine; grow two leaves first
        let d = ledger
            .append_block((a, b), TransactionId(4), MinerId(0), 3)
            .unwrap();
        assert_eq!(ledger.leaf_count(), 2); // c and d
        let err = ledger
            .append_block((g, g), TransactionId(5), MinerId(0), 4)
            .unwrap_err();
        assert_eq!(err, DagError::RefsNotDistinct);
        let _ = d;
    }

    #[test]
    fn two_children_of_genesis_are_both_leaves() {
        let mut ledger = DagLedger::new();
        let g = ledger.genesis();
        let a = ledger
            .append_block((g, g), TransactionId(1), MinerId(0), 1)
            .unwrap();
        let b = ledger
            .append_block((g, g), TransactionId(2), MinerId(0), 1)
            .unwrap();
        assert_eq!(ledger.leaf_set(), BTreeSet::from([a, b]));
    }

    #[test]
    fn chain_distances() {
        let (ledger, ids) = chain(3);
        let (g, a, b) = (ids[0], ids[1], ids[2]);
        assert_eq!(ledger.distance(g, b).unwrap(), Distance::Finite(2));
        assert_eq!(ledger.distance(g, a).unwrap(), Distance::Finite(1));
        assert_eq!(ledger.distance(b, g).unwrap(), Distance::Infinite);
        assert_eq!(ledger.distance(b, b).unwrap(), Distance::Finite(0));
    }

    #[test]
    fn chain_ancestor_layers() {
        let (ledger, ids) = chain(3);
        let (g, a, b) = (ids[0], ids[1], ids[2]);
        assert_eq!(ledger.ancestors_at(b, 1).unwrap(), BTreeSet::from([a]));
        assert_eq!(ledger.ancestors_at(b, 2).unwrap(), BTreeSet::from([g]));
        assert!(ledger.ancestors_at(b, 3).unwrap().is_empty());
        assert_eq!(ledger.descendants_at(g, 1).unwrap(), BTreeSet::from([a]));
        assert_eq!(ledger.descendants_at(g, 2).unwrap(), BTreeSet::from([b]));
        assert_eq!(ledger.ancestors_at(b, 0), Err(DagError::ZeroDepth));
    }

    #[test]
    fn diamond_queries() {
        let (ledger, g, a, b, c) = diamond();
        assert_eq!(ledger.distance(g, c).unwrap(), Distance::Finite(2));
        assert_eq!(ledger.distance(c, g).unwrap(), Distance::Infinite);
        assert_eq!(ledger.ancestors_at(c, 1).unwrap(), BTreeSet::from([a, b]));
        assert_eq!(ledger.ancestors_at(c, 2).unwrap(), BTreeSet::from([g]));
        assert_eq!(ledger.descendants_at(g, 1).unwrap(), BTreeSet::from([a, b]));
        assert_eq!(ledger.descendants_at(g, 2).unwrap(), BTreeSet::from([c]));
        assert_eq!(ledger.all_descendants(a).unwrap(), BTreeSet::from([c]));
        assert_eq!(
            ledger.all_descendants(g).unwrap(),
            BTreeSet::from([a, b, c])
        );
        assert!(ledger.all_descendants(c).unwrap().is_empty());
        assert_eq!(ledger.leaf_set(), BTreeSet::from([c]));
        // |{a, b, g}| = 3 > 2
        assert!(ledger.is_finalized(c, 2, 2).unwrap());
    }

    #[test]
    fn finalization_threshold() {
        let (ledger, ids) = chain(6);
        let last = *ids.last().unwrap();
        assert!(ledger.is_finalized(last, 5, 4).unwrap());
        assert!(!ledger.is_finalized(last, 5, 5).unwrap());
        assert!(ledger.is_finalized(ledger.genesis(), 5, 1_000).unwrap());
    }

    #[test]
    fn duplicate_tx_registers_conflict() {
        let mut ledger = DagLedger::new();
        let g = ledger.genesis();
        let a = ledger
            .append_block((g, g), TransactionId(7), MinerId(0), 1)
            .unwrap();
        let b = ledger
            .append_block((g, a), TransactionId(7), MinerId(1), 2)
            .unwrap();
        assert_eq!(ledger.conflict_pairs(), vec![(a, b)]);
    }

    #[test]
    fn unknown_and_forged_ids_are_rejected() {
        let (ledger, ids) = chain(3);
        let forged = BlockId {
            index: 1,
            round: 99,
        };
        assert_eq!(ledger.block(forged), Err(DagError::UnknownBlock(forged)));
        assert!(ledger.contains(ids[1]));
        assert!(!ledger.contains(forged));
    }

    #[test]
    fn export_import_round_trip() {
        let (ledger, _) = chain(5);
        let mut buf = Vec::new();
        ledger.export_records(&mut buf).unwrap();
        let rebuilt = DagLedger::import_records(buf.as_slice()).unwrap();
        assert_eq!(rebuilt.len(), ledger.len());
        let mut buf2 = Vec::new();
        rebuilt.export_records(&mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn import_rejects_malformed_records() {
        assert!(DagLedger::import_records("nonsense".as_bytes()).is_err());
        assert!(DagLedger::import_records("".as_bytes()).is_err());
        // ref to a later block
        let bad = "0,,,0,0,0\n1,2,0,1,0,1\n";
        assert!(DagLedger::import_records(bad.as_bytes()).is_err());
    }
}
