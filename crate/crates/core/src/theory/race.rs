//! Races between two processes with constant progress probabilities.
//!
//! Process A gains `alpha` with probability `p_a` per step, process B gains
//! `beta` with probability `p_b`; both start at 0. These functions bound or
//! evaluate `P(Δ_t^b ≥ Δ_t^a)` after `t` steps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `t` accepted by the exact summations.
pub const MAX_EXACT_STEPS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaceModel {
    pub p_a: f64,
    pub p_b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub t: u64,
}

impl RaceModel {
    pub fn new(p_a: f64, p_b: f64, alpha: f64, beta: f64, t: u64) -> Result<Self> {
        let m = Self {
            p_a,
            p_b,
            alpha,
            beta,
            t,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let unit = |p: f64| (0.0..=1.0).contains(&p);
        if !unit(self.p_a) || !unit(self.p_b) {
            return Err(Error::invalid("progress probabilities must lie in [0, 1]"));
        }
        if self.p_b > self.p_a {
            return Err(Error::OutOfDomain(format!(
                "race bound requires p_b ≤ p_a, got p_a = {}, p_b = {}",
                self.p_a, self.p_b
            )));
        }
        if !(self.alpha >= 0.0 && self.beta >= 0.0 && self.alpha + self.beta > 0.0) {
            return Err(Error::invalid(
                "step sizes must be ≥ 0 with alpha + beta > 0",
            ));
        }
        Ok(())
    }

    /// Probability that exactly one process progresses in a step.
    pub fn q(&self) -> f64 {
        self.p_a * (1.0 - self.p_b) + (1.0 - self.p_a) * self.p_b
    }

    /// Conditional probability that A is the one progressing.
    pub fn q_a(&self) -> f64 {
        self.p_a * (1.0 - self.p_b) / self.q()
    }

    pub fn q_b(&self) -> f64 {
        self.p_b * (1.0 - self.p_a) / self.q()
    }

    /// Smallest count `i` of B-only steps out of `l` exclusive steps with
    /// `beta·i ≥ alpha·(l − i)`.
    fn threshold(&self, l: u64) -> u64 {
        let (a, b) = (self.alpha, self.beta);
        let mut c = ((l as f64 * a) / (a + b)).ceil().max(0.0) as u64;
        while c > 0 && b * (c - 1) as f64 >= a * (l - (c - 1)) as f64 {
            c -= 1;
        }
        while c <= l && b * (c as f64) < a * (l - c) as f64 {
            c += 1;
        }
        c
    }
}

/// `exp(−q·t·(1 − 2·q_b^{α/(α+β)}·q_a^{β/(α+β)}))`, an upper bound on
/// `P(Δ_t^b ≥ Δ_t^a)` when steps in which both processes progress can be
/// neglected. May exceed 1, in which case it is vacuous.
pub fn race_bound(m: &RaceModel) -> Result<f64> {
    m.validate()?;
    let q = m.q();
    if q == 0.0 || m.t == 0 {
        return Ok(1.0);
    }
    let s = m.alpha + m.beta;
    let base = 2.0 * m.q_b().powf(m.alpha / s) * m.q_a().powf(m.beta / s);
    Ok((-q * m.t as f64 * (1.0 - base)).exp())
}

/// `Σ_ℓ P(Bin(t,q) = ℓ) · P(Bin(ℓ, q_b) ≥ ⌈ℓα/(α+β)⌉)`.
///
/// This conditions on the `ℓ` steps in which exactly one process moves and
/// ignores steps in which both move. It equals `P(Δ_t^b ≥ Δ_t^a)` exactly
/// when `alpha == beta` or `p_a·p_b == 0`; see [`race_joint_exact`] for the
/// probability in general.
pub fn race_exact(m: &RaceModel) -> Result<f64> {
    m.validate()?;
    check_steps(m.t)?;
    let q = m.q();
    if q == 0.0 {
        return Ok(1.0);
    }
    let (q_a, q_b) = (m.q_a(), m.q_b());
    let outer = binomial_pmf(m.t, q);
    let mut total = Neumaier::default();
    // Row ℓ of Pascal's triangle weighted by q_b (successes) and q_a.
    let mut row = vec![1.0];
    for (l, &w) in outer.iter().enumerate() {
        let l = l as u64;
        if l > 0 {
            row = next_row(&row, q_b, q_a);
        }
        if w == 0.0 {
            continue;
        }
        let c = m.threshold(l) as usize;
        let tail: f64 = sum(&row[c.min(row.len())..]);
        total.add(w * tail);
    }
    Ok(total.value().min(1.0))
}

/// `P(β·J ≥ α·I)` for independent `I ~ Bin(t, p_a)`, `J ~ Bin(t, p_b)`: the
/// probability that B is at least level with A after `t` steps, including
/// steps in which both progress.
pub fn race_joint_exact(m: &RaceModel) -> Result<f64> {
    m.validate()?;
    check_steps(m.t)?;
    let a = binomial_pmf(m.t, m.p_a);
    let b = binomial_pmf(m.t, m.p_b);
    // suffix[j] = P(J ≥ j)
    let mut suffix = vec![0.0; b.len() + 1];
    let mut acc = Neumaier::default();
    for j in (0..b.len()).rev() {
        acc.add(b[j]);
        suffix[j] = acc.value();
    }
    let mut total = Neumaier::default();
    for (i, &pi) in a.iter().enumerate() {
        if pi == 0.0 {
            continue;
        }
        let need = m.alpha * i as f64;
        let j = if need <= 0.0 {
            0
        } else if m.beta == 0.0 {
            b.len()
        } else {
            let mut j = (need / m.beta).ceil() as usize;
            while j > 0 && m.beta * (j - 1) as f64 >= need {
                j -= 1;
            }
            while j < b.len() && m.beta * (j as f64) < need {
                j += 1;
            }
            j
        };
        total.add(pi * suffix[j.min(b.len())]);
    }
    Ok(total.value().min(1.0))
}

fn check_steps(t: u64) -> Result<()> {
    if t > MAX_EXACT_STEPS {
        return Err(Error::ResourceLimit(format!(
            "exact race summation limited to t ≤ {MAX_EXACT_STEPS}, got t = {t}"
        )));
    }
    Ok(())
}

/// Binomial pmf built by repeated convolution with a Bernoulli step; every
/// update is a convex combination so no cancellation occurs.
fn binomial_pmf(t: u64, p: f64) -> Vec<f64> {
    let mut row = vec![1.0];
    for _ in 0..t {
        row = next_row(&row, p, 1.0 - p);
    }
    row
}

fn next_row(prev: &[f64], success: f64, failure: f64) -> Vec<f64> {
    let mut next = vec![0.0; prev.len() + 1];
    for (i, &v) in prev.iter().enumerate() {
        next[i] += v * failure;
        next[i + 1] += v * success;
    }
    next
}

fn sum(xs: &[f64]) -> f64 {
    let mut acc = Neumaier::default();
    xs.iter().for_each(|&x| acc.add(x));
    acc.value()
}

/// Neumaier compensated summation.
#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
