//! Shared helpers for the oracle test suites: a seeded random-DAG
//! generator and a brute-force all-paths enumerator kept deliberately
//! independent of the library's BFS machinery (it rebuilds edges from
//! raw block refs and walks every directed path).

use std::collections::BTreeMap;

use dagsim_core::dag::{BlockId, DagLedger, MinerId, TransactionId};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random ledger with up to `max_blocks` blocks (genesis included).
/// Block 1 necessarily references genesis twice; later blocks reference
/// two distinct uniformly chosen existing blocks.
pub fn random_dag(rng: &mut ChaCha8Rng, max_blocks: usize) -> (DagLedger, Vec<BlockId>) {
    let n = rng.random_range(2..=max_blocks.max(2));
    random_dag_exact(rng, n)
}

pub fn random_dag_exact(rng: &mut ChaCha8Rng, blocks: usize) -> (DagLedger, Vec<BlockId>) {
    let mut ledger = DagLedger::new();
    let mut ids = vec![ledger.genesis()];
    for i in 1..blocks {
        let (a, b) = if ids.len() == 1 {
            (0, 0)
        } else {
            let a = rng.random_range(0..ids.len());
            let mut b = rng.random_range(0..ids.len() - 1);
            if b >= a {
                b += 1;
            }
            (a, b)
        };
        let id = ledger
            .append_block(
                (ids[a], ids[b]),
                TransactionId(i as u64),
                MinerId(rng.random_range(0..4)),
                i as u32,
            )
            .expect("generator picks valid refs");
        ids.push(id);
    }
    (ledger, ids)
}

/// Minimum directed distance from every live block to every live block,
/// found by enumerating all directed paths from each source with a plain
/// DFS over edges rebuilt from block refs. `None` marks "no path".
pub fn oracle_all_pairs(ledger: &DagLedger) -> BTreeMap<BlockId, BTreeMap<BlockId, u32>> {
    let live: Vec<BlockId> = ledger
        .blocks()
        .map(|b| b.id)
        .filter(|id| !ledger.is_abandoned(*id).unwrap())
        .collect();
    let mut children: BTreeMap<BlockId, Vec<BlockId>> =
        live.iter().map(|id| (*id, Vec::new())).collect();
    for &id in &live {
        for parent in ledger.block(id).unwrap().parents() {
            if let Some(list) = children.get_mut(&parent) {
                list.push(id);
            }
        }
    }
    let mut out = BTreeMap::new();
    for &source in &live {
        let mut best: BTreeMap<BlockId, u32> = BTreeMap::new();
        let mut steps = 0u64;
        walk_all_paths(&children, source, source, 0, &mut best, &mut steps);
        assert!(steps < 50_000_000, "pathological path explosion");
        out.insert(source, best);
    }
    out
}

fn walk_all_paths(
    children: &BTreeMap<BlockId, Vec<BlockId>>,
    source: BlockId,
    current: BlockId,
    depth: u32,
    best: &mut BTreeMap<BlockId, u32>,
    steps: &mut u64,
) {
    *steps += 1;
    if current != source {
        let entry = best.entry(current).or_insert(depth);
        if depth < *entry {
            *entry = depth;
        }
    }
    if let Some(list) = children.get(&current) {
        for &child in list {
            walk_all_paths(children, source, child, depth + 1, best, steps);
        }
    }
}

/// Leaf set computed from scratch: live blocks with no live children in
/// the rebuilt edge list.
pub fn oracle_leaf_set(ledger: &DagLedger) -> Vec<BlockId> {
    let live: Vec<BlockId> = ledger
        .blocks()
        .map(|b| b.id)
        .filter(|id| !ledger.is_abandoned(*id).unwrap())
        .collect();
    let mut has_live_child: BTreeMap<BlockId, bool> =
        live.iter().map(|id| (*id, false)).collect();
    for &id in &live {
        for parent in ledger.block(id).unwrap().parents() {
            if let Some(flag) = has_live_child.get_mut(&parent) {
                *flag = true;
            }
        }
    }
    live.into_iter()
        .filter(|id| !has_live_child[id])
        .collect()
}
