//! Hitting times of the pessimistic lazy walk on `{1, .., φ}`: move down or
//! up with probability 1/4 each, stay with probability 1/2, and blocked moves
//! at the top become self-loops.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Expected first hitting time of state 1 from every start `1..=phi`,
/// by exact tridiagonal elimination.
///
/// For `s ≥ 2`: `h(s) = 1 + h(s−1)/4 + h(s)/2 + h(s+1)/4`, with `h(φ+1)`
/// read as `h(φ)`. In the unknowns `h(2..=φ)` this is the tridiagonal system
/// `−h(s−1)/4 + d_s·h(s) − h(s+1)/4 = 1` with `d_s = 1/2` inside and
/// `d_φ = 1/4`, and `h(1) = 0`.
pub fn lazy_walk_hitting_times(phi: u32) -> Result<Vec<BigRational>> {
    if phi < 1 {
        return Err(Error::invalid("phi must be at least 1"));
    }
    let m = phi as usize - 1;
    let mut out = vec![BigRational::zero()];
    if m == 0 {
        return Ok(out);
    }
    let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    let off = q(-1, 4);
    let diag: Vec<BigRational> = (0..m)
        .map(|i| if i + 1 == m { q(1, 4) } else { q(1, 2) })
        .collect();
    let rhs = vec![BigRational::one(); m];

    // Thomas algorithm: forward sweep then back substitution.
    let mut c_prime = vec![BigRational::zero(); m];
    let mut d_prime = vec![BigRational::zero(); m];
    c_prime[0] = &off / &diag[0];
    d_prime[0] = &rhs[0] / &diag[0];
    for i in 1..m {
        let denom = &diag[i] - &off * &c_prime[i - 1];
        c_prime[i] = &off / &denom;
        d_prime[i] = (&rhs[i] - &off * &d_prime[i - 1]) / &denom;
    }
    let mut h = vec![BigRational::zero(); m];
    h[m - 1] = d_prime[m - 1].clone();
    for i in (0..m - 1).rev() {
        h[i] = &d_prime[i] - &c_prime[i] * &h[i + 1];
    }
    out.extend(h);
    Ok(out)
}

pub fn lazy_walk_hitting_time(phi: u32, start: u32) -> Result<BigRational> {
    if start < 1 || start > phi {
        return Err(Error::invalid(format!("start {start} outside [1, {phi}]")));
    }
    Ok(lazy_walk_hitting_times(phi)?.swap_remove(start as usize - 1))
}
