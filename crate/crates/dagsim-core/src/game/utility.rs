//! Expected utilities: exact rational enumeration, fast f64 marginals,
//! and a Monte Carlo estimator.
//!
//! Miner `i`'s expected utility under profile `pi` is
//!
//! ```text
//! sum_j pi[i][j] * p_j * E[ u_i / (u_i + sum of powers competing on j) ]
//! ```
//!
//! where the expectation runs over the independent picks of the other
//! miners. The expectation factors per transaction, so it can be computed
//! by enumerating the 2^(m-1) competitor subsets -- exactly, in rational
//! arithmetic -- or, when powers are all equal, by a success-count
//! distribution in O(m^2).

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use super::{exact, GameError, SelectionGame, StrategyProfile};
use crate::rng::substream;

/// Hard cap on miners for subset enumeration (2^(m-1) terms).
pub const MAX_EXACT_MINERS: usize = 20;

/// Exact expected utility of `miner`, by rational enumeration over all
/// competitor subsets. Supports at most [`MAX_EXACT_MINERS`] miners.
pub fn exact_utility(
    game: &SelectionGame,
    profile: &StrategyProfile,
    miner: usize,
) -> Result<BigRational, GameError> {
    game.check_profile(profile)?;
    game.check_miner(miner)?;
    if game.miners() > MAX_EXACT_MINERS {
        return Err(GameError::TooManyMiners {
            miners: game.miners(),
            max: MAX_EXACT_MINERS,
        });
    }
    let powers: Vec<BigRational> = game.powers().iter().map(|&u| exact(u)).collect();
    let rewards: Vec<BigRational> = game.rewards().iter().map(|&p| exact(p)).collect();
    let rows: Vec<Vec<BigRational>> = profile
        .rows()
        .iter()
        .map(|row| row.iter().map(|&p| exact(p)).collect())
        .collect();
    Ok(exact_utility_rational(&powers, &rewards, &rows, miner))
}

/// Exact expected utility over arbitrary rational strategy rows. This is
/// the reference form: utilities are linear in the miner's own row, and
/// that identity holds exactly here, not merely up to rounding.
pub fn exact_utility_rational(
    powers: &[BigRational],
    rewards: &[BigRational],
    rows: &[Vec<BigRational>],
    miner: usize,
) -> BigRational {
    let mut total = BigRational::zero();
    for (j, reward) in rewards.iter().enumerate() {
        let own = &rows[miner][j];
        if own.is_zero() {
            continue;
        }
        let weight = success_weight_rational(powers, rows, miner, j);
        total += own * reward * weight;
    }
    total
}

/// Rational `E[u_i / (u_i + competing power on j)]` over the other
/// miners' independent picks.
pub(crate) fn success_weight_rational(
    powers: &[BigRational],
    rows: &[Vec<BigRational>],
    miner: usize,
    tx: usize,
) -> BigRational {
    let others: Vec<(BigRational, BigRational)> = (0..rows.len())
        .filter(|&h| h != miner)
        .map(|h| (powers[h].clone(), rows[h][tx].clone()))
        .collect();
    let mut acc = BigRational::zero();
    recurse_rational(
        &powers[miner],
        &others,
        0,
        BigRational::one(),
        BigRational::zero(),
        &mut acc,
    );
    acc
}

fn recurse_rational(
    own: &BigRational,
    others: &[(BigRational, BigRational)],
    idx: usize,
    prob: BigRational,
    competing: BigRational,
    acc: &mut BigRational,
) {
    if prob.is_zero() {
        return;
    }
    if idx == others.len() {
        *acc += prob * own / (own + competing);
        return;
    }
    let (power, q) = &others[idx];
    let stay_out = BigRational::one() - q;
    recurse_rational(
        own,
        others,
        idx + 1,
        prob.clone() * stay_out,
        competing.clone(),
        acc,
    );
    if !q.is_zero() {
        recurse_rational(own, others, idx + 1, prob * q, competing + power, acc);
    }
}

/// Marginal value of each pure pick for `miner`, holding everyone else
/// fixed: entry `j` is `p_j * E[u_i / (u_i + competitors on j)]`.
///
/// Utility is affine in the miner's own row, so the utility of any row is
/// its dot product with these marginals; a best response is an argmax.
/// Equal-power games use an O(m^2) competitor-count distribution and have
/// no size cap; unequal powers fall back to subset enumeration, capped at
/// [`MAX_EXACT_MINERS`] miners.
pub fn marginal_values(
    game: &SelectionGame,
    profile: &StrategyProfile,
    miner: usize,
) -> Result<Vec<f64>, GameError> {
    game.check_profile(profile)?;
    game.check_miner(miner)?;
    let equal = game.equal_powers();
    if !equal && game.miners() > MAX_EXACT_MINERS {
        return Err(GameError::TooManyMiners {
            miners: game.miners(),
            max: MAX_EXACT_MINERS,
        });
    }
    let n = game.transactions();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let weight = if equal {
            equal_power_weight(profile, miner, j)
        } else {
            enumerated_weight(game.powers(), profile, miner, j)
        };
        out.push(game.rewards()[j] * weight);
    }
    Ok(out)
}

/// With equal powers the success chance is 1/(1+c) where c counts the
/// competitors on the same pick; fold the competitor-count distribution
/// one miner at a time.
fn equal_power_weight(profile: &StrategyProfile, miner: usize, tx: usize) -> f64 {
    let mut pmf = vec![1.0f64];
    for (h, row) in profile.rows().iter().enumerate() {
        if h == miner {
            continue;
        }
        let q = row[tx];
        if q == 0.0 {
            continue;
        }
        pmf.push(0.0);
        for c in (0..pmf.len() - 1).rev() {
            let move_up = pmf[c] * q;
            pmf[c] -= move_up;
            pmf[c + 1] += move_up;
        }
    }
    pmf.iter()
        .enumerate()
        .map(|(c, p)| p / (c as f64 + 1.0))
        .sum()
}

fn enumerated_weight(powers: &[f64], profile: &StrategyProfile, miner: usize, tx: usize) -> f64 {
    let others: Vec<(f64, f64)> = (0..profile.miners())
        .filter(|&h| h != miner)
        .map(|h| (powers[h], profile.row(h)[tx]))
        .collect();
    let mut acc = 0.0;
    recurse_f64(powers[miner], &others, 0, 1.0, 0.0, &mut acc);
    acc
}

fn recurse_f64(own: f64, others: &[(f64, f64)], idx: usize, prob: f64, competing: f64, acc: &mut f64) {
    if prob == 0.0 {
        return;
    }
    if idx == others.len() {
        *acc += prob * own / (own + competing);
        return;
    }
    let (power, q) = others[idx];
    recurse_f64(own, others, idx + 1, prob * (1.0 - q), competing, acc);
    if q > 0.0 {
        recurse_f64(own, others, idx + 1, prob * q, competing + power, acc);
    }
}

/// Monte Carlo utility estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub samples: u64,
}

/// Unbiased Monte Carlo estimate of [`exact_utility`]: samples every
/// miner's pick and adds the conditional success value
/// `p_j * u_i / (sum of powers on j)` instead of simulating the winner,
/// which keeps the estimator unbiased while removing one noise source.
/// Deterministic given the seed.
pub fn mc_utility(
    game: &SelectionGame,
    profile: &StrategyProfile,
    miner: usize,
    samples: u64,
    seed: u64,
) -> Result<McEstimate, GameError> {
    game.check_profile(profile)?;
    game.check_miner(miner)?;
    if samples == 0 {
        return Err(GameError::ZeroSamples);
    }
    let mut rng = substream(seed, 0);
    let m = game.miners();
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut picks = vec![0usize; m];
    for _ in 0..samples {
        for (h, pick) in picks.iter_mut().enumerate() {
            *pick = sample_index(profile.row(h), &mut rng);
        }
        let own_pick = picks[miner];
        let mut competing = 0.0;
        for h in 0..m {
            if h != miner && picks[h] == own_pick {
                competing += game.powers()[h];
            }
        }
        let own = game.powers()[miner];
        let value = game.rewards()[own_pick] * own / (own + competing);
        sum += value;
        sum_sq += value * value;
    }
    let n = samples as f64;
    let mean = sum / n;
    let variance = if samples > 1 {
        ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        mean,
        std_err: (variance / n).sqrt(),
        samples,
    })
}

/// Inverse-CDF draw from a probability row. The tail guard picks the last
/// positive entry when rounding pushes the running sum short of the draw.
pub(crate) fn sample_index<R: Rng>(row: &[f64], rng: &mut R) -> usize {
    let r: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (j, p) in row.iter().enumerate() {
        if *p > 0.0 {
            acc += p;
            last_positive = j;
            if r < acc {
                return j;
            }
        }
    }
    last_positive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn rational_profile(profile: &StrategyProfile) -> Vec<Vec<BigRational>> {
        profile
            .rows()
            .iter()
            .map(|row| row.iter().map(|&p| exact(p)).collect())
            .collect()
    }

    #[test]
    fn lone_miner_collects_full_reward() {
        let game = SelectionGame::new(vec![3.0], vec![5.0, 1.0], 5.0).unwrap();
        let profile = StrategyProfile::pure(&[0], 2).unwrap();
        assert_eq!(exact_utility(&game, &profile, 0).unwrap(), int(5));
    }

    #[test]
    fn equal_powers_split_evenly() {
        let game = SelectionGame::new(vec![1.0, 1.0], vec![1.0, 1.0], 1.0).unwrap();
        let profile = StrategyProfile::pure(&[0, 0], 2).unwrap();
        assert_eq!(exact_utility(&game, &profile, 0).unwrap(), ratio(1, 2));
        assert_eq!(exact_utility(&game, &profile, 1).unwrap(), ratio(1, 2));
    }

    #[test]
    fn mixed_against_pure_opponent() {
        // miner 0 plays (1/2, 1/2), miner 1 sits on tx 0:
        // utility = 1/2 * 1/2 + 1/2 * 1 = 3/4
        let game = SelectionGame::new(vec![1.0, 1.0], vec![1.0, 1.0], 1.0).unwrap();
        let profile =
            StrategyProfile::new(vec![vec![0.5, 0.5], vec![1.0, 0.0]]).unwrap();
        assert_eq!(exact_utility(&game, &profile, 0).unwrap(), ratio(3, 4));
    }

    #[test]
    fn marginals_match_exact_utility_on_pure_rows() {
        let game =
            SelectionGame::new(vec![2.0, 1.0, 1.5], vec![3.0, 2.0, 1.5], 2.0).unwrap();
        let mut rng = crate::rng::substream(11, 0);
        let profile = StrategyProfile::random_interior(3, 3, &mut rng);
        for miner in 0..3 {
            let marginals = marginal_values(&game, &profile, miner).unwrap();
            for j in 0..3 {
                let mut rows = rational_profile(&profile);
                rows[miner] = (0..3)
                    .map(|c| if c == j { int(1) } else { int(0) })
                    .collect();
                let powers: Vec<BigRational> =
                    game.powers().iter().map(|&u| exact(u)).collect();
                let rewards: Vec<BigRational> =
                    game.rewards().iter().map(|&p| exact(p)).collect();
                let exact_val = exact_utility_rational(&powers, &rewards, &rows, miner);
                let approx = crate::rational::to_f64(&exact_val);
                assert!((marginals[j] - approx).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn equal_power_path_agrees_with_enumeration() {
        let game = SelectionGame::new(vec![2.0; 5], vec![2.0, 1.5, 1.0], 2.0).unwrap();
        let mut rng = crate::rng::substream(13, 0);
        let profile = StrategyProfile::random_interior(5, 3, &mut rng);
        for miner in 0..5 {
            for j in 0..3 {
                let fast = equal_power_weight(&profile, miner, j);
                let slow = enumerated_weight(game.powers(), &profile, miner, j);
                assert!((fast - slow).abs() < 1e-12, "{fast} vs {slow}");
            }
        }
    }

    #[test]
    fn mc_is_exact_and_zero_variance_without_competition() {
        let game = SelectionGame::new(vec![1.0, 1.0], vec![2.0, 1.5], 2.0).unwrap();
        let profile = StrategyProfile::pure(&[0, 1], 2).unwrap();
        let est = mc_utility(&game, &profile, 0, 500, 3).unwrap();
        assert_eq!(est.mean, 2.0);
        assert_eq!(est.std_err, 0.0);
    }

    #[test]
    fn mc_determinism() {
        let game = SelectionGame::new(vec![1.0, 2.0, 3.0], vec![1.0, 1.0], 1.0).unwrap();
        let mut rng = crate::rng::substream(17, 0);
        let profile = StrategyProfile::random_interior(3, 2, &mut rng);
        let a = mc_utility(&game, &profile, 1, 10_000, 42).unwrap();
        let b = mc_utility(&game, &profile, 1, 10_000, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mc_tracks_exact_within_four_standard_errors() {
        let game =
            SelectionGame::new(vec![1.0, 2.0, 1.0, 3.0], vec![4.0, 3.0, 2.0], 2.0).unwrap();
        let mut rng = crate::rng::substream(19, 0);
        let profile = StrategyProfile::random_interior(4, 3, &mut rng);
        for miner in 0..4 {
            let exact_val =
                crate::rational::to_f64(&exact_utility(&game, &profile, miner).unwrap());
            let est = mc_utility(&game, &profile, miner, 40_000, 7).unwrap();
            assert!(
                (est.mean - exact_val).abs() <= 4.0 * est.std_err,
                "miner {miner}: {} vs {} (se {})",
                est.mean,
                exact_val,
                est.std_err
            );
        }
    }
}
