use num_bigint::BigUint;

use super::binomial;
use crate::error::{Error, Result};

/// Expected optimisation time of RLS_k on Ridge*, `⌊n/k⌋·C(n,k)`.
///
/// Every improvement is a leap flipping exactly the first `k` path zeros,
/// which happens with probability `1/C(n,k)` per iteration, and `⌊n/k⌋` leaps
/// are needed. Defined for `1 ≤ k ≤ n/2`.
pub fn expected_opt_time_ridge(n: u64, k: u64) -> Result<BigUint> {
    if k < 1 || 2 * k > n {
        return Err(Error::OutOfDomain(format!(
            "expected Ridge* time requires 1 ≤ k ≤ n/2, got n = {n}, k = {k}"
        )));
    }
    Ok(BigUint::from(n / k) * binomial(n, k))
}
