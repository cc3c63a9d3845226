//! Subset power-sum bound.
//!
//! For capped weights `a_1..a_n` in `[0, delta]` summing to 1, with
//! `k * delta = zeta < 1`, the sum of `(sum of any k weights)^m` over all
//! k-subsets is bounded by `e^k * zeta^(m-k)`. This is the combinatorial
//! core of the throughput argument: it caps the probability that `m`
//! miners squeeze into only `k` transactions when no transaction is
//! over-subscribed. The check enumerates the left side exhaustively in
//! rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use super::GameError;

/// Max weight count: the check enumerates all k-subsets of n.
pub const MAX_BOUND_WEIGHTS: usize = 16;

/// A validated instance of the bound check.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsetBoundInstance {
    weights: Vec<BigRational>,
    subset_size: usize,
    cap_inverse: u64,
    exponent: u32,
}

impl SubsetBoundInstance {
    /// Weights must lie in `[0, 1/cap_inverse]` and sum to exactly 1;
    /// `subset_size / cap_inverse` must lie in (0, 1).
    pub fn new(
        weights: Vec<BigRational>,
        subset_size: usize,
        cap_inverse: u64,
        exponent: u32,
    ) -> Result<Self, GameError> {
        if weights.is_empty() || weights.len() > MAX_BOUND_WEIGHTS {
            return Err(GameError::BoundDomain(
                "weight count must be between 1 and 16",
            ));
        }
        if subset_size == 0 || subset_size > weights.len() {
            return Err(GameError::BoundDomain(
                "subset size must be in 1..=weight count",
            ));
        }
        if cap_inverse == 0 || subset_size as u64 >= cap_inverse {
            return Err(GameError::BoundDomain(
                "need subset_size / cap_inverse strictly inside (0, 1)",
            ));
        }
        if exponent == 0 {
            return Err(GameError::BoundDomain("exponent must be at least 1"));
        }
        let cap = BigRational::new(BigInt::one(), BigInt::from(cap_inverse));
        let mut sum = BigRational::zero();
        for w in &weights {
            if w < &BigRational::zero() || w > &cap {
                return Err(GameError::BoundDomain("weights must lie in [0, cap]"));
            }
            sum += w;
        }
        if sum != BigRational::one() {
            return Err(GameError::BoundDomain("weights must sum to exactly 1"));
        }
        Ok(SubsetBoundInstance {
            weights,
            subset_size,
            cap_inverse,
            exponent,
        })
    }

    /// Random valid instance: exact rational weights `w_i / (d * q)` with
    /// per-part cap `q`, so the cap and unit-sum constraints hold exactly.
    pub fn random<R: Rng>(rng: &mut R, max_weights: usize, max_exponent: u32) -> Self {
        let max_weights = max_weights.clamp(2, MAX_BOUND_WEIGHTS);
        let cap_inverse = rng.random_range(2..=max_weights as u64);
        let n = rng.random_range(cap_inverse as usize..=max_weights);
        let subset_size = rng.random_range(1..cap_inverse) as usize;
        let exponent = rng.random_range(subset_size as u32..=max_exponent.max(subset_size as u32));
        let per_part_cap = rng.random_range(1..=40u64);
        let total = cap_inverse * per_part_cap;
        // sequential feasible split of `total` into n parts of at most
        // per_part_cap each
        let mut parts = Vec::with_capacity(n);
        let mut remaining = total;
        for i in 0..n {
            let slots_left = (n - 1 - i) as u64;
            let low = remaining.saturating_sub(slots_left * per_part_cap);
            let high = per_part_cap.min(remaining);
            let w = rng.random_range(low..=high);
            parts.push(w);
            remaining -= w;
        }
        debug_assert_eq!(remaining, 0);
        let weights = parts
            .into_iter()
            .map(|w| BigRational::new(BigInt::from(w), BigInt::from(total)))
            .collect();
        SubsetBoundInstance::new(weights, subset_size, cap_inverse, exponent)
            .expect("construction keeps all constraints")
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn subset_size(&self) -> usize {
        self.subset_size
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// `zeta = subset_size / cap_inverse`.
    pub fn zeta(&self) -> BigRational {
        BigRational::new(
            BigInt::from(self.subset_size),
            BigInt::from(self.cap_inverse),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubsetBoundCheck {
    /// Exact enumerated left side.
    pub lhs: BigRational,
    /// `e^k * zeta^(m-k)`; `e^k` is transcendental so the right side is
    /// evaluated in f64.
    pub rhs: f64,
    pub holds: bool,
}

/// Enumerates every k-subset, sums `(subset weight)^m` exactly, and
/// compares against `e^k * zeta^(m-k)` with no added tolerance.
pub fn check_subset_power_bound(inst: &SubsetBoundInstance) -> SubsetBoundCheck {
    let mut lhs = BigRational::zero();
    let mut chosen = Vec::with_capacity(inst.subset_size);
    enumerate_subsets(
        &inst.weights,
        inst.subset_size,
        0,
        &BigRational::zero(),
        &mut chosen,
        inst.exponent,
        &mut lhs,
    );
    let k = inst.subset_size as f64;
    let zeta = crate::rational::to_f64(&inst.zeta());
    let rhs = k.exp() * zeta.powi(inst.exponent as i32 - inst.subset_size as i32);
    let holds = lhs.to_f64().map(|l| l <= rhs).unwrap_or(false);
    SubsetBoundCheck { lhs, rhs, holds }
}

fn enumerate_subsets(
    weights: &[BigRational],
    k: usize,
    start: usize,
    partial: &BigRational,
    chosen: &mut Vec<usize>,
    exponent: u32,
    acc: &mut BigRational,
) {
    if chosen.len() == k {
        *acc += num_traits::pow::pow(partial.clone(), exponent as usize);
        return;
    }
    let needed = k - chosen.len();
    for i in start..=weights.len().saturating_sub(needed) {
        chosen.push(i);
        let next = partial + &weights[i];
        enumerate_subsets(weights, k, i + 1, &next, chosen, exponent, acc);
        chosen.pop();
    }
}
