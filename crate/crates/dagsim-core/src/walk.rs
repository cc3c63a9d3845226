//! Biased fixed-step random walk survival.
//!
//! The leaf-set size under round-based growth behaves like a walk that
//! moves down by `s` with high probability and up by `s` otherwise. The
//! quantity of interest is the chance the walk never goes negative over a
//! horizon; for an upward bias `p > q` the infinite-horizon limit is
//! `(p - q) / p`, and it is 0 otherwise.

use rand::Rng;

use crate::rng::substream;

/// Walk parameters: step size, probability of an upward step, and the
/// number of steps checked.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkSpec {
    pub step: u32,
    pub up_probability: f64,
    pub horizon: u32,
}

impl WalkSpec {
    pub fn down_probability(&self) -> f64 {
        1.0 - self.up_probability
    }

    /// Infinite-horizon probability that the walk stays non-negative:
    /// `(p - q) / p` when `p > q`, else 0.
    pub fn survival_limit(&self) -> f64 {
        let p = self.up_probability;
        let q = self.down_probability();
        if p > q {
            (p - q) / p
        } else {
            0.0
        }
    }
}

/// Monte Carlo estimate of the survival probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurvivalEstimate {
    pub survived: u64,
    pub trials: u64,
    pub estimate: f64,
    pub std_err: f64,
}

/// Estimates `Pr(walk >= 0 at every step up to the horizon)` over
/// independent seeded trials. Deterministic given (spec, trials, seed).
pub fn walk_survival(spec: &WalkSpec, trials: u64, seed: u64) -> SurvivalEstimate {
    assert!(trials >= 1, "at least one trial required");
    assert!(
        (0.0..=1.0).contains(&spec.up_probability),
        "up_probability must lie in [0, 1]"
    );
    let mut survived = 0u64;
    for trial in 0..trials {
        let mut rng = substream(seed, trial);
        if survives(spec, &mut rng) {
            survived += 1;
        }
    }
    let estimate = survived as f64 / trials as f64;
    let std_err = (estimate * (1.0 - estimate) / trials as f64).sqrt();
    SurvivalEstimate {
        survived,
        trials,
        estimate,
        std_err,
    }
}

/// One walk in units of the step size. Dies on the first negative
/// position; survives early once the remaining steps cannot reach below
/// zero.
fn survives<R: Rng>(spec: &WalkSpec, rng: &mut R) -> bool {
    let mut position: i64 = 0;
    let horizon = i64::from(spec.horizon);
    for step in 1..=horizon {
        if rng.random::<f64>() < spec.up_probability {
            position += 1;
        } else {
            position -= 1;
        }
        if position < 0 {
            return false;
        }
        if position >= horizon - step {
            return true;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certain_up_always_survives() {
        let spec = WalkSpec {
            step: 3,
            up_probability: 1.0,
            horizon: 100,
        };
        let est = walk_survival(&spec, 200, 1);
        assert_eq!(est.estimate, 1.0);
        assert_eq!(spec.survival_limit(), 1.0);
    }

    #[test]
    fn certain_down_dies_immediately() {
        let spec = WalkSpec {
            step: 1,
            up_probability: 0.0,
            horizon: 10,
        };
        let est = walk_survival(&spec, 50, 1);
        assert_eq!(est.estimate, 0.0);
        assert_eq!(spec.survival_limit(), 0.0);
    }

    #[test]
    fn estimates_are_deterministic() {
        let spec = WalkSpec {
            step: 2,
            up_probability: 0.8,
            horizon: 500,
        };
        let a = walk_survival(&spec, 2_000, 99);
        let b = walk_survival(&spec, 2_000, 99);
        assert_eq!(a, b);
    }

    #[test]
    fn biased_up_walk_tracks_the_limit() {
        let spec = WalkSpec {
            step: 1,
            up_probability: 0.9,
            horizon: 2_000,
        };
        let est = walk_survival(&spec, 20_000, 7);
        let limit = spec.survival_limit();
        assert!((est.estimate - limit).abs() <= 4.0 * est.std_err);
    }
}
