//! Verification-budget feasibility.
//!
//! If every block must be verified by an `alpha` fraction of nodes within
//! a fixed delay, each node has to perform `alpha * throughput`
//! verifications in that window, but can only fit `delay / verify_time`
//! of them. The calculator compares the two exactly, in rational
//! arithmetic, and locates the throughput threshold where feasibility
//! ends when throughput grows linearly with the node count.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BudgetError {
    #[error("verification fraction must lie in (0, 1]")]
    FractionOutOfRange,
    #[error("{0} must be strictly positive")]
    NonPositive(&'static str),
}

/// One feasibility question: fraction of verifying nodes, system
/// throughput (blocks per unit time), allowed delay, and the
/// per-verification time of the slowest node considered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BudgetQuery {
    pub verify_fraction: BigRational,
    pub throughput: BigRational,
    pub delay: BigRational,
    pub verify_time: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BudgetVerdict {
    /// Verifications demanded of each node inside the delay window.
    pub required: BigRational,
    /// Verifications a node can complete inside the window.
    pub capacity: BigRational,
    pub feasible: bool,
}

fn check_positive(value: &BigRational, name: &'static str) -> Result<(), BudgetError> {
    if value.is_positive() {
        Ok(())
    } else {
        Err(BudgetError::NonPositive(name))
    }
}

/// Exact feasibility verdict: feasible iff
/// `verify_fraction * throughput <= delay / verify_time`.
pub fn budget_check(q: &BudgetQuery) -> Result<BudgetVerdict, BudgetError> {
    check_positive(&q.verify_fraction, "verify_fraction")?;
    if q.verify_fraction > BigRational::from_integer(BigInt::from(1)) {
        return Err(BudgetError::FractionOutOfRange);
    }
    check_positive(&q.throughput, "throughput")?;
    check_positive(&q.delay, "delay")?;
    check_positive(&q.verify_time, "verify_time")?;
    let required = &q.verify_fraction * &q.throughput;
    let capacity = &q.delay / &q.verify_time;
    let feasible = required <= capacity;
    Ok(BudgetVerdict {
        required,
        capacity,
        feasible,
    })
}

/// Largest node count `m` that stays feasible when throughput scales as
/// `n_b(m) = m`: exactly `floor(capacity / verify_fraction)`. Infeasibility
/// begins at the next integer.
pub fn max_feasible_miners(
    verify_fraction: &BigRational,
    delay: &BigRational,
    verify_time: &BigRational,
) -> Result<BigInt, BudgetError> {
    check_positive(verify_fraction, "verify_fraction")?;
    if verify_fraction > &BigRational::from_integer(BigInt::from(1)) {
        return Err(BudgetError::FractionOutOfRange);
    }
    check_positive(delay, "delay")?;
    check_positive(verify_time, "verify_time")?;
    let capacity = delay / verify_time;
    Ok((capacity / verify_fraction).floor().to_integer())
}
