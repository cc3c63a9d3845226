//! Best responses, damped best-response dynamics, and equilibrium
//! oracles.
//!
//! Because utility is affine in a miner's own row, a pure best response
//! always exists and equals the argmax of the marginal values. The
//! dynamics sweep miners in index order, each time blending the current
//! row toward the pure best response with a fixed damping factor;
//! undamped updates 2-cycle in anti-coordination games, damped ones
//! settle. Convergence is declared when every miner's regret -- the gain
//! of the best unilateral deviation -- drops to the tolerance.

use num_rational::BigRational;
use num_traits::Zero;

use super::utility::success_weight_rational;
use super::{exact, marginal_values, GameError, SelectionGame, StrategyProfile};
use crate::rng::substream;

/// Blend weight toward the pure best response per update.
pub const DAMPING: f64 = 0.2;

/// A pure best response: the maximizing pick and the marginal value of
/// every pick, ties broken toward the smaller index.
#[derive(Clone, Debug, PartialEq)]
pub struct BestResponse {
    pub index: usize,
    pub marginals: Vec<f64>,
}

pub fn best_response(
    game: &SelectionGame,
    profile: &StrategyProfile,
    miner: usize,
) -> Result<BestResponse, GameError> {
    let marginals = marginal_values(game, profile, miner)?;
    Ok(BestResponse {
        index: argmax(&marginals),
        marginals,
    })
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (j, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = j;
        }
    }
    best
}

/// Result of the best-response dynamics. `regrets` is computed against
/// the final profile whether or not the run converged.
#[derive(Clone, Debug)]
pub struct EquilibriumReport {
    pub profile: StrategyProfile,
    pub regrets: Vec<f64>,
    pub iterations: u32,
    pub converged: bool,
    /// Max regret after each sweep, handy for diagnosing the dynamics.
    pub max_regret_history: Vec<f64>,
}

impl EquilibriumReport {
    pub fn max_regret(&self) -> f64 {
        self.regrets.iter().cloned().fold(0.0, f64::max)
    }
}

/// Damped best-response dynamics from a seeded random interior profile.
///
/// Each sweep updates miners sequentially (`row <- (1 - DAMPING) * row +
/// DAMPING * pure_best_response`, renormalized) and then measures every
/// miner's regret; the run stops once all regrets are at most `epsilon`
/// or after `max_iters` sweeps. `epsilon` is absolute -- callers wanting
/// the usual policy pass [`SelectionGame::default_epsilon`].
pub fn find_equilibrium(
    game: &SelectionGame,
    epsilon: f64,
    max_iters: u32,
    seed: u64,
) -> Result<EquilibriumReport, GameError> {
    assert!(epsilon > 0.0, "epsilon must be positive");
    let m = game.miners();
    let n = game.transactions();
    let mut rng = substream(seed, 0);
    let mut profile = StrategyProfile::random_interior(m, n, &mut rng);
    let mut history = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut regrets = vec![0.0; m];

    while iterations < max_iters {
        iterations += 1;
        for miner in 0..m {
            let marginals = marginal_values(game, &profile, miner)?;
            let br = argmax(&marginals);
            let mut rows = profile.rows().to_vec();
            {
                let row = &mut rows[miner];
                let mut sum = 0.0;
                for (j, p) in row.iter_mut().enumerate() {
                    *p *= 1.0 - DAMPING;
                    if j == br {
                        *p += DAMPING;
                    }
                    sum += *p;
                }
                for p in row.iter_mut() {
                    *p /= sum;
                }
            }
            profile = StrategyProfile::from_rows_unchecked(rows);
        }
        let mut max_regret = 0.0f64;
        for (miner, regret) in regrets.iter_mut().enumerate() {
            let marginals = marginal_values(game, &profile, miner)?;
            let current: f64 = profile
                .row(miner)
                .iter()
                .zip(&marginals)
                .map(|(p, v)| p * v)
                .sum();
            let best = marginals[argmax(&marginals)];
            *regret = (best - current).max(0.0);
            max_regret = max_regret.max(*regret);
        }
        history.push(max_regret);
        if max_regret <= epsilon {
            converged = true;
            break;
        }
    }

    Ok(EquilibriumReport {
        profile,
        regrets,
        iterations,
        converged,
        max_regret_history: history,
    })
}

/// Exact per-miner regret of a profile: best pure deviation utility minus
/// current utility, in rational arithmetic. The deviation oracle used to
/// audit converged profiles.
pub fn exact_regrets(
    game: &SelectionGame,
    profile: &StrategyProfile,
) -> Result<Vec<BigRational>, GameError> {
    game.check_profile(profile)?;
    if game.miners() > super::MAX_EXACT_MINERS {
        return Err(GameError::TooManyMiners {
            miners: game.miners(),
            max: super::MAX_EXACT_MINERS,
        });
    }
    let powers: Vec<BigRational> = game.powers().iter().map(|&u| exact(u)).collect();
    let rewards: Vec<BigRational> = game.rewards().iter().map(|&p| exact(p)).collect();
    let rows: Vec<Vec<BigRational>> = profile
        .rows()
        .iter()
        .map(|row| row.iter().map(|&p| exact(p)).collect())
        .collect();
    let mut out = Vec::with_capacity(game.miners());
    for miner in 0..game.miners() {
        // marginal value of each pure pick, own mixing integrated out
        let marginals: Vec<BigRational> = (0..game.transactions())
            .map(|j| &rewards[j] * success_weight_rational(&powers, &rows, miner, j))
            .collect();
        let current: BigRational = marginals
            .iter()
            .zip(&rows[miner])
            .map(|(v, p)| v * p)
            .sum();
        let best = marginals.iter().max().cloned().unwrap_or_else(BigRational::zero);
        out.push(best - current);
    }
    Ok(out)
}

/// Grid scan output: every profile whose exact regret stays within the
/// grid-induced tolerance.
#[derive(Clone, Debug)]
pub struct NashScan {
    pub profiles: Vec<StrategyProfile>,
    /// Max exact regret accepted: `2 * max_reward / grid`.
    pub tolerance: f64,
}

/// Exhaustive scan of the product of probability simplices discretized
/// with step `1/grid`. Only tiny games are allowed (at most 3 miners and
/// 3 transactions); the returned profiles are exactly those whose maximal
/// regret under the rational deviation scan is at most the tolerance.
pub fn brute_force_nash(game: &SelectionGame, grid: u32) -> Result<NashScan, GameError> {
    if game.miners() > 3 || game.transactions() > 3 {
        return Err(GameError::BruteForceTooLarge);
    }
    if grid == 0 {
        return Err(GameError::ZeroGrid);
    }
    let n = game.transactions();
    let m = game.miners();
    let rows_int = compositions(grid, n);
    let rows_rat: Vec<Vec<BigRational>> = rows_int
        .iter()
        .map(|row| {
            row.iter()
                .map(|&c| BigRational::new(c.into(), grid.into()))
                .collect()
        })
        .collect();
    let rows_f64: Vec<Vec<f64>> = rows_int
        .iter()
        .map(|row| row.iter().map(|&c| c as f64 / grid as f64).collect())
        .collect();

    let powers: Vec<BigRational> = game.powers().iter().map(|&u| exact(u)).collect();
    let rewards: Vec<BigRational> = game.rewards().iter().map(|&p| exact(p)).collect();
    let tolerance_rat =
        exact(game.max_reward()) * BigRational::new(2.into(), grid.into());

    let mut profiles = Vec::new();
    let mut choice = vec![0usize; m];
    loop {
        let rows: Vec<Vec<BigRational>> =
            choice.iter().map(|&c| rows_rat[c].clone()).collect();
        let mut ok = true;
        for miner in 0..m {
            let marginals: Vec<BigRational> = (0..n)
                .map(|j| &rewards[j] * success_weight_rational(&powers, &rows, miner, j))
                .collect();
            let current: BigRational = marginals
                .iter()
                .zip(&rows[miner])
                .map(|(v, p)| v * p)
                .sum();
            let best = marginals.iter().max().cloned().unwrap_or_else(BigRational::zero);
            if best - current > tolerance_rat {
                ok = false;
                break;
            }
        }
        if ok {
            profiles.push(StrategyProfile::from_rows_unchecked(
                choice.iter().map(|&c| rows_f64[c].clone()).collect(),
            ));
        }
        // next point in the m-fold cartesian product
        let mut pos = 0;
        loop {
            if pos == m {
                return Ok(NashScan {
                    profiles,
                    tolerance: crate::rational::to_f64(&tolerance_rat),
                });
            }
            choice[pos] += 1;
            if choice[pos] < rows_int.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// All ways to split `total` grid steps over `parts` bins.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; parts];
    fill(total, 0, &mut current, &mut out);
    out
}

fn fill(remaining: u32, idx: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if idx + 1 == current.len() {
        current[idx] = remaining;
        out.push(current.clone());
        return;
    }
    for take in 0..=remaining {
        current[idx] = take;
        fill(remaining - take, idx + 1, current, out);
    }
}
