//! The one-shot transaction-selection game.
//!
//! `m` miners simultaneously pick one transaction each from a pool of `n`,
//! whose rewards are sorted non-increasing and spread-capped. When several
//! miners pick the same transaction exactly one of them succeeds, chosen
//! with probability proportional to computational power; miners picking
//! alone always succeed. Strategies are mixed: a probability row per
//! miner.
//!
//! Utilities are linear in a miner's own row, so pure best responses
//! always exist and damped best-response dynamics search for approximate
//! equilibria. Exact expected utilities are available in rational
//! arithmetic (by enumerating competitor subsets) both as the reference
//! implementation and as the deviation oracle for small games.

mod bound;
mod equilibrium;
mod stats;
mod utility;

pub use bound::{check_subset_power_bound, SubsetBoundCheck, SubsetBoundInstance};
pub use equilibrium::{
    best_response, brute_force_nash, exact_regrets, find_equilibrium, BestResponse,
    EquilibriumReport, NashScan, DAMPING,
};
pub use stats::{distinct_count, fairness_check, DistinctStats, FairnessReport};
pub use utility::{
    exact_utility, exact_utility_rational, marginal_values, mc_utility, McEstimate,
    MAX_EXACT_MINERS,
};

use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GameError {
    #[error("a game needs at least one miner and one transaction")]
    EmptyGame,
    #[error("powers must be strictly positive and finite")]
    BadPower,
    #[error("rewards must be strictly positive, finite, and sorted non-increasing")]
    BadRewards,
    #[error("spread cap must be at least 1")]
    SpreadCapBelowOne,
    #[error("max/min reward ratio exceeds the spread cap")]
    SpreadCapViolated,
    #[error("profile shape does not match the game")]
    ProfileMismatch,
    #[error("strategy rows must be non-negative and sum to 1 within 1e-12")]
    BadProfile,
    #[error("miner index out of range")]
    MinerOutOfRange,
    #[error("exact enumeration supports at most {max} miners, got {miners}")]
    TooManyMiners { miners: usize, max: usize },
    #[error("brute-force scan supports at most 3 miners and 3 transactions")]
    BruteForceTooLarge,
    #[error("grid resolution must be at least 1")]
    ZeroGrid,
    #[error("at least one sample required")]
    ZeroSamples,
    #[error("invalid bound instance: {0}")]
    BoundDomain(&'static str),
}

/// Game instance: miner powers, non-increasing transaction rewards, and
/// the reward spread cap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionGame {
    powers: Vec<f64>,
    rewards: Vec<f64>,
    spread_cap: f64,
}

impl SelectionGame {
    pub fn new(powers: Vec<f64>, rewards: Vec<f64>, spread_cap: f64) -> Result<Self, GameError> {
        if powers.is_empty() || rewards.is_empty() {
            return Err(GameError::EmptyGame);
        }
        if powers.iter().any(|u| !u.is_finite() || *u <= 0.0) {
            return Err(GameError::BadPower);
        }
        if rewards.iter().any(|p| !p.is_finite() || *p <= 0.0) {
            return Err(GameError::BadRewards);
        }
        if rewards.windows(2).any(|w| w[0] < w[1]) {
            return Err(GameError::BadRewards);
        }
        if !spread_cap.is_finite() || spread_cap < 1.0 {
            return Err(GameError::SpreadCapBelowOne);
        }
        let hi = rewards[0];
        let lo = rewards[rewards.len() - 1];
        // tiny relative slack so caps constructed as `cap * lo` pass
        if hi > spread_cap * lo * (1.0 + 1e-12) {
            return Err(GameError::SpreadCapViolated);
        }
        Ok(SelectionGame {
            powers,
            rewards,
            spread_cap,
        })
    }

    pub fn miners(&self) -> usize {
        self.powers.len()
    }

    pub fn transactions(&self) -> usize {
        self.rewards.len()
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn spread_cap(&self) -> f64 {
        self.spread_cap
    }

    pub fn max_reward(&self) -> f64 {
        self.rewards[0]
    }

    /// Convergence target used by callers that follow the default policy:
    /// 1e-6 relative to the largest reward.
    pub fn default_epsilon(&self) -> f64 {
        1e-6 * self.max_reward()
    }

    pub(crate) fn equal_powers(&self) -> bool {
        self.powers.iter().all(|u| *u == self.powers[0])
    }

    pub(crate) fn check_profile(&self, profile: &StrategyProfile) -> Result<(), GameError> {
        if profile.miners() != self.miners() || profile.transactions() != self.transactions() {
            return Err(GameError::ProfileMismatch);
        }
        Ok(())
    }

    pub(crate) fn check_miner(&self, miner: usize) -> Result<(), GameError> {
        if miner >= self.miners() {
            return Err(GameError::MinerOutOfRange);
        }
        Ok(())
    }
}

/// Mixed-strategy profile: one probability row per miner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile {
    rows: Vec<Vec<f64>>,
}

pub(crate) const ROW_SUM_TOLERANCE: f64 = 1e-12;

impl StrategyProfile {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, GameError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(GameError::BadProfile);
        }
        let n = rows[0].len();
        for row in &rows {
            if row.len() != n {
                return Err(GameError::BadProfile);
            }
            if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(GameError::BadProfile);
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(GameError::BadProfile);
            }
        }
        Ok(StrategyProfile { rows })
    }

    /// Every miner plays the given pure pick.
    pub fn pure(picks: &[usize], transactions: usize) -> Result<Self, GameError> {
        if picks.iter().any(|j| *j >= transactions) {
            return Err(GameError::BadProfile);
        }
        let rows = picks
            .iter()
            .map(|&j| {
                let mut row = vec![0.0; transactions];
                row[j] = 1.0;
                row
            })
            .collect();
        Ok(StrategyProfile { rows })
    }

    pub fn uniform(miners: usize, transactions: usize) -> Result<Self, GameError> {
        if miners == 0 || transactions == 0 {
            return Err(GameError::BadProfile);
        }
        let row = vec![1.0 / transactions as f64; transactions];
        Ok(StrategyProfile {
            rows: vec![row; miners],
        })
    }

    /// Random interior profile: each row is an independent normalized
    /// vector of Exp(1) draws, so every entry is strictly positive.
    pub fn random_interior<R: Rng>(miners: usize, transactions: usize, rng: &mut R) -> Self {
        let rows = (0..miners)
            .map(|_| {
                let mut row: Vec<f64> = (0..transactions)
                    .map(|_| -(1.0 - rng.random::<f64>()).ln())
                    .collect();
                let sum: f64 = row.iter().sum();
                for p in &mut row {
                    *p /= sum;
                }
                row
            })
            .collect();
        StrategyProfile { rows }
    }

    pub(crate) fn from_rows_unchecked(rows: Vec<Vec<f64>>) -> Self {
        StrategyProfile { rows }
    }

    pub fn miners(&self) -> usize {
        self.rows.len()
    }

    pub fn transactions(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn row(&self, miner: usize) -> &[f64] {
        &self.rows[miner]
    }

    /// Total probability mass each transaction receives across miners.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.transactions()];
        for row in &self.rows {
            for (s, p) in sums.iter_mut().zip(row) {
                *s += p;
            }
        }
        sums
    }
}

/// Exact conversion of an f64 into a rational; every finite f64 is a
/// dyadic rational, so nothing is lost.
pub(crate) fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// Draws every miner's pick from the profile into `picks`.
pub(crate) fn sample_profile_picks<R: Rng>(
    profile: &StrategyProfile,
    picks: &mut [usize],
    rng: &mut R,
) {
    for (h, pick) in picks.iter_mut().enumerate() {
        *pick = utility::sample_index(profile.row(h), rng);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn game_validation() {
        assert!(SelectionGame::new(vec![1.0], vec![1.0], 1.0).is_ok());
        assert_eq!(
            SelectionGame::new(vec![], vec![1.0], 1.0),
            Err(GameError::EmptyGame)
        );
        assert_eq!(
            SelectionGame::new(vec![1.0], vec![0.5, 1.0], 2.0),
            Err(GameError::BadRewards)
        );
        assert_eq!(
            SelectionGame::new(vec![1.0], vec![3.0, 1.0], 2.0),
            Err(GameError::SpreadCapViolated)
        );
        assert!(SelectionGame::new(vec![1.0], vec![2.0, 1.0], 2.0).is_ok());
    }

    #[test]
    fn profile_validation() {
        assert!(StrategyProfile::new(vec![vec![0.5, 0.5]]).is_ok());
        assert!(StrategyProfile::new(vec![vec![0.5, 0.6]]).is_err());
        assert!(StrategyProfile::new(vec![vec![-0.1, 1.1]]).is_err());
        assert!(StrategyProfile::new(vec![vec![1.0], vec![0.5, 0.5]]).is_err());
    }

    #[test]
    fn interior_profile_is_valid_and_positive() {
        let mut rng = crate::rng::substream(5, 0);
        let p = StrategyProfile::random_interior(4, 7, &mut rng);
        StrategyProfile::new(p.rows().to_vec()).unwrap();
        assert!(p.rows().iter().flatten().all(|x| *x > 0.0));
    }
}
