//! The Ridge* and OneMax function classes.
//!
//! Every instance is the base function composed with an XOR shift `a`:
//! `f_a(x) = f(x ⊕ a)`. With the identity shift (all zeros) OneMax counts
//! one-bits and Ridge* rewards the path `1^i 0^(n-i)` starting at `0^n`.

use serde::{Deserialize, Serialize};

use crate::bitcore::{BitString, RngStream};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    #[serde(alias = "onemax")]
    OneMax,
    #[serde(alias = "ridge", alias = "ridgestar")]
    RidgeStar,
}

/// A pseudo-Boolean instance: function class plus XOR shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Problem {
    kind: ProblemKind,
    shift: BitString,
}

impl Problem {
    pub fn new(kind: ProblemKind, shift: BitString) -> Result<Self> {
        if shift.is_empty() {
            return Err(Error::invalid("problem size n must be positive"));
        }
        Ok(Self { kind, shift })
    }

    /// Instance with the identity (all-zeros) shift.
    pub fn identity(kind: ProblemKind, n: usize) -> Result<Self> {
        Self::new(kind, BitString::zeros(n))
    }

    pub fn one_max(n: usize) -> Result<Self> {
        Self::identity(ProblemKind::OneMax, n)
    }

    pub fn ridge_star(n: usize) -> Result<Self> {
        Self::identity(ProblemKind::RidgeStar, n)
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.shift.len()
    }

    pub fn shift(&self) -> &BitString {
        &self.shift
    }

    /// For OneMax, the unique global optimum `¬a`.
    pub fn one_max_optimum(&self) -> BitString {
        BitString::from_bits(self.shift.as_slice().iter().map(|&b| !b).collect())
    }

    pub fn fitness(&self, x: &BitString) -> Result<i64> {
        self.check_len(x)?;
        let (x, a) = (x.as_slice(), self.shift.as_slice());
        Ok(match self.kind {
            ProblemKind::OneMax => x.iter().zip(a).filter(|(xi, ai)| xi != ai).count() as i64,
            ProblemKind::RidgeStar => {
                let mut y = x.iter().zip(a).map(|(xi, ai)| xi ^ ai);
                let ones = y.by_ref().take_while(|&b| b).count();
                // `take_while` consumed the first zero (if any); the rest must be zero.
                if y.any(|b| b) {
                    -1
                } else {
                    ones as i64
                }
            }
        })
    }

    /// Ridge* starts at the path origin `a` (so `x ⊕ a = 0^n`); OneMax starts
    /// uniformly at random.
    pub fn initial_solution(&self, rng: &mut RngStream) -> BitString {
        match self.kind {
            ProblemKind::OneMax => BitString::random(self.n(), rng),
            ProblemKind::RidgeStar => self.shift.clone(),
        }
    }

    /// Best value RLS_k can reach: `⌊n/k⌋·k` on Ridge*, `n` on OneMax.
    pub fn reachable_optimum(&self, k: usize) -> Result<i64> {
        self.check_k(k)?;
        let n = self.n();
        Ok(match self.kind {
            ProblemKind::OneMax => n as i64,
            ProblemKind::RidgeStar => ((n / k) * k) as i64,
        })
    }

    /// Exact comparison with [`Problem::reachable_optimum`].
    pub fn is_optimal(&self, x: &BitString, k: usize) -> Result<bool> {
        Ok(self.fitness(x)? == self.reachable_optimum(k)?)
    }

    pub(crate) fn check_k(&self, k: usize) -> Result<()> {
        if k < 1 || k > self.n() {
            return Err(Error::invalid(format!(
                "k = {k} must lie in [1, {}]",
                self.n()
            )));
        }
        Ok(())
    }

    fn check_len(&self, x: &BitString) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::invalid(format!(
                "bit string has length {}, problem has n = {}",
                x.len(),
                self.n()
            )));
        }
        Ok(())
    }

    /// Fitness of `x` with `flips` applied, given `x` itself has fitness
    /// `current`. Requires `flips` distinct; costs O(|flips|).
    ///
    /// On Ridge* this relies on `x` being on the path (`current ≥ 0`): the
    /// offspring is on the path only if the flipped block is the k positions
    /// directly above or below the current path end.
    #[inline]
    pub(crate) fn offspring_fitness(&self, x: &BitString, current: i64, flips: &[u32]) -> i64 {
        match self.kind {
            ProblemKind::OneMax => {
                let a = self.shift.as_slice();
                let mut delta = 0i64;
                for &i in flips {
                    let i = i as usize;
                    delta += if x.get(i) != a[i] { -1 } else { 1 };
                }
                current + delta
            }
            ProblemKind::RidgeStar => {
                debug_assert!(current >= 0);
                let (mut lo, mut hi) = (u32::MAX, 0u32);
                for &i in flips {
                    lo = lo.min(i);
                    hi = hi.max(i);
                }
                let k = flips.len() as i64;
                if (hi - lo) as i64 != k - 1 {
                    return -1;
                }
                let pos = current;
                if lo as i64 == pos {
                    pos + k
                } else if hi as i64 + 1 == pos {
                    pos - k
                } else {
                    -1
                }
            }
        }
    }
}
