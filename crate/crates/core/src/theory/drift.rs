use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::binomial;
use crate::error::{Error, Result};

/// Expected one-step progress of RLS_k at distance `s` from the OneMax
/// optimum, for strings of length `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DriftQuery {
    pub n: u64,
    pub k: u64,
    pub s: u64,
}

impl DriftQuery {
    pub fn new(n: u64, k: u64, s: u64) -> Result<Self> {
        if n < 1 || k < 1 || k > n {
            return Err(Error::invalid(format!(
                "need 1 ≤ k ≤ n, got n = {n}, k = {k}"
            )));
        }
        if s > n {
            return Err(Error::invalid(format!("distance s = {s} exceeds n = {n}")));
        }
        Ok(Self { n, k, s })
    }
}

fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

/// `Δ_k(s) = Σ_{i=⌊k/2⌋+1}^{k} (2i−k) C(s,i) C(n−s,k−i) / C(n,k)`.
///
/// A mutation flipping `i` wrong bits and `k−i` correct bits moves `2i−k`
/// closer; only strictly improving moves count.
pub fn drift_exact(q: DriftQuery) -> BigRational {
    let DriftQuery { n, k, s } = q;
    let mut num = BigInt::zero();
    for i in (k / 2 + 1)..=k {
        if i > s || k - i > n - s {
            continue;
        }
        let ways = binomial(s, i) * binomial(n - s, k - i);
        num += BigInt::from(ways) * int((2 * i - k) as i64);
    }
    BigRational::new(num, BigInt::from(binomial(n, k)))
}

/// Closed forms of `Δ_k(s)` for `k ≤ 5`, valid for `s ≥ k`.
pub fn drift_closed(q: DriftQuery) -> Result<BigRational> {
    let DriftQuery { n, k, s } = q;
    if k > 5 {
        return Err(Error::Unsupported(format!(
            "closed form drift only exists for k ≤ 5, got k = {k}"
        )));
    }
    if s < k {
        return Err(Error::OutOfDomain(format!(
            "closed form drift requires s ≥ k, got s = {s}, k = {k}"
        )));
    }
    let (n, s) = (n as i64, s as i64);
    let r = |num: BigInt, den: BigInt| BigRational::new(num, den);
    Ok(match k {
        1 => r(int(s), int(n)),
        2 => r(int(2 * s * (s - 1)), int(n * (n - 1))),
        3 => r(int(3 * s * (s - 1)), int(n * (n - 1))),
        4 | 5 => {
            // c·s(s−1)(s−2)(n − s/2 − 3/2) / (n(n−1)(n−2)(n−3)), with the
            // halves cleared: (n − s/2 − 3/2) = (2n − s − 3)/2.
            let c = if k == 4 { 8 } else { 10 };
            let num = int(c) * int(s) * int(s - 1) * int(s - 2) * int(2 * n - s - 3);
            let den = int(2) * int(n) * int(n - 1) * int(n - 2) * int(n - 3);
            r(num, den)
        }
        _ => unreachable!(),
    })
}
