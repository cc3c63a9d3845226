//! Selection statistics over a strategy profile.

use super::{sample_profile_picks, GameError, SelectionGame, StrategyProfile};
use crate::rng::substream;

/// Empirical distribution of the number of distinct transactions picked
/// when every miner samples independently from the profile.
#[derive(Clone, Debug, PartialEq)]
pub struct DistinctStats {
    /// `histogram[c]` counts trials with exactly `c` distinct picks.
    pub histogram: Vec<u64>,
    pub trials: u64,
    pub mean: f64,
}

/// Samples every miner's pick `trials` times and counts distinct
/// transactions per trial. One block per distinct transaction is mined,
/// so this is the per-round throughput of the profile.
pub fn distinct_count(
    game: &SelectionGame,
    profile: &StrategyProfile,
    trials: u64,
    seed: u64,
) -> Result<DistinctStats, GameError> {
    game.check_profile(profile)?;
    if trials == 0 {
        return Err(GameError::ZeroSamples);
    }
    let n = game.transactions();
    let mut rng = substream(seed, 0);
    let mut histogram = vec![0u64; n.min(game.miners()) + 1];
    let mut seen = vec![false; n];
    let mut picks = vec![0usize; game.miners()];
    for _ in 0..trials {
        seen.fill(false);
        sample_profile_picks(profile, &mut picks, &mut rng);
        let mut distinct = 0usize;
        for &j in &picks {
            if !seen[j] {
                seen[j] = true;
                distinct += 1;
            }
        }
        histogram[distinct] += 1;
    }
    let mean = histogram
        .iter()
        .enumerate()
        .map(|(c, &count)| c as f64 * count as f64)
        .sum::<f64>()
        / trials as f64;
    Ok(DistinctStats {
        histogram,
        trials,
        mean,
    })
}

/// Outcome of the probability-mass dichotomy check.
///
/// At equilibrium, either no transaction collects total probability mass
/// `>= 12 * spread_cap`, or every transaction collects at least 1/2. For
/// approximate equilibria the lower threshold is relaxed to
/// `1/2 - 10 * epsilon * miners`.
#[derive(Clone, Debug, PartialEq)]
pub struct FairnessReport {
    pub column_sums: Vec<f64>,
    /// First transaction whose mass reaches `12 * spread_cap`, if any.
    pub trigger: Option<usize>,
    pub upper_threshold: f64,
    pub lower_threshold: f64,
    pub holds: bool,
}

/// Checks the dichotomy on a profile. `epsilon` is the relative
/// equilibrium tolerance the profile was solved to (0 for exact).
pub fn fairness_check(
    profile: &StrategyProfile,
    spread_cap: f64,
    epsilon: f64,
) -> FairnessReport {
    let column_sums = profile.column_sums();
    let upper_threshold = 12.0 * spread_cap;
    let lower_threshold = 0.5 - 10.0 * epsilon * profile.miners() as f64;
    let trigger = column_sums
        .iter()
        .position(|&s| s >= upper_threshold);
    let holds = match trigger {
        None => true,
        Some(_) => column_sums.iter().all(|&s| s >= lower_threshold),
    };
    FairnessReport {
        column_sums,
        trigger,
        upper_threshold,
        lower_threshold,
        holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_on_one_tx_counts_one() {
        let game = SelectionGame::new(vec![1.0; 4], vec![1.0, 1.0], 1.0).unwrap();
        let profile = StrategyProfile::pure(&[0, 0, 0, 0], 2).unwrap();
        let stats = distinct_count(&game, &profile, 200, 9).unwrap();
        assert_eq!(stats.mean, 1.0);
        assert_eq!(stats.histogram[1], 200);
    }

    #[test]
    fn distinct_pure_picks_count_m() {
        let game = SelectionGame::new(vec![1.0; 3], vec![1.0, 1.0, 1.0], 1.0).unwrap();
        let profile = StrategyProfile::pure(&[0, 1, 2], 3).unwrap();
        let stats = distinct_count(&game, &profile, 100, 9).unwrap();
        assert_eq!(stats.mean, 3.0);
    }

    #[test]
    fn uniform_profile_matches_occupancy_formula() {
        let m = 20;
        let n = 20;
        let game = SelectionGame::new(vec![1.0; m], vec![1.0; n], 1.0).unwrap();
        let profile = StrategyProfile::uniform(m, n).unwrap();
        let trials = 40_000u64;
        let stats = distinct_count(&game, &profile, trials, 123).unwrap();
        let expected = n as f64 * (1.0 - (1.0 - 1.0 / n as f64).powi(m as i32));
        // distinct count is bounded by min(m, n): its std dev is < 2 here,
        // so 4 sigma over 40k trials is a slack margin
        let margin = 4.0 * 2.0 / (trials as f64).sqrt();
        assert!(
            (stats.mean - expected).abs() < margin,
            "{} vs {expected}",
            stats.mean
        );
    }

    #[test]
    fn fairness_vacuous_when_no_column_triggers() {
        let profile = StrategyProfile::uniform(4, 4).unwrap();
        let report = fairness_check(&profile, 1.0, 1e-6);
        assert_eq!(report.trigger, None);
        assert!(report.holds);
    }

    #[test]
    fn fairness_flags_a_starved_column() {
        // 13 miners on tx 0, total mass 13 >= 12, while tx 1 is starved
        let picks = vec![0usize; 13];
        let profile = StrategyProfile::pure(&picks, 2).unwrap();
        let report = fairness_check(&profile, 1.0, 1e-6);
        assert_eq!(report.trigger, Some(0));
        assert!(!report.holds);
    }

    #[test]
    fn fairness_holds_when_all_columns_are_fed() {
        let mut picks = vec![0usize; 13];
        picks.extend(vec![1usize; 13]);
        let profile = StrategyProfile::pure(&picks, 2).unwrap();
        let report = fairness_check(&profile, 1.0, 1e-6);
        assert_eq!(report.trigger, Some(0));
        assert!(report.holds);
    }
}
