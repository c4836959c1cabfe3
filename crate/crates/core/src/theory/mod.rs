//! Exact analytical oracles.
//!
//! Combinatorial quantities use arbitrary-precision integers and reduced
//! rationals; the race probabilities and the leading-constant recurrences are
//! evaluated in double precision.

mod drift;
mod race;
mod recurrence;
mod ridge;
mod walk;

pub use drift::{drift_closed, drift_exact, DriftQuery};
pub use race::{race_bound, race_exact, race_joint_exact, RaceModel, MAX_EXACT_STEPS};
pub use recurrence::{
    recurrence_table, recurrence_table_exact, ExactRecurrenceRow, RecurrenceRow, RecurrenceTable,
    TABLE_K,
};
pub use ridge::expected_opt_time_ridge;
pub use walk::{lazy_walk_hitting_time, lazy_walk_hitting_times};

use num_bigint::BigUint;

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    // Running product stays integral: after step i it equals C(n-k+i, i).
    let mut acc = BigUint::from(1u32);
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}
