//! ParamRLS: a random local search over the parameter `k` of RLS_k.
//!
//! Each iteration proposes a neighbour of the active parameter with the ±1 or
//! ±{1,2} operator and lets an [`Evaluator`] decide between the two. The two
//! evaluators from the analysis are eval-F (best fitness, ties broken by the
//! earlier last improvement) and eval-T (penalised capped optimisation time).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitcore::RngStream;
use crate::error::{Error, Result};
use crate::problems::Problem;
use crate::target::{capped_opt_time, run_rlsk, RunRecord};

/// Permitted parameter values `{1, .., phi}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSpace {
    phi: u32,
}

impl ParamSpace {
    pub fn new(phi: u32) -> Result<Self> {
        if phi < 1 {
            return Err(Error::invalid("phi must be at least 1"));
        }
        Ok(Self { phi })
    }

    pub fn phi(&self) -> u32 {
        self.phi
    }

    pub fn contains(&self, theta: i64) -> bool {
        (1..=self.phi as i64).contains(&theta)
    }

    fn check(&self, theta: u32) -> Result<()> {
        if !self.contains(theta as i64) {
            return Err(Error::invalid(format!(
                "parameter {theta} outside [1, {}]",
                self.phi
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    /// ±1
    Pm1,
    /// ±{1,2}
    Pm12,
}

impl Operator {
    fn steps(self) -> &'static [i64] {
        match self {
            Operator::Pm1 => &[-1, 1],
            Operator::Pm12 => &[-2, -1, 1, 2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    /// Best fitness within the cutoff (ParamRLS-F).
    #[serde(rename = "f", alias = "F")]
    Fitness,
    /// Penalised capped optimisation time (ParamRLS-T).
    #[serde(rename = "t", alias = "T")]
    Time,
}

/// PAR10 convention.
pub const DEFAULT_PENALTY: f64 = 10.0;

#[derive(Debug, Clone)]
pub struct TunerConfig {
    pub space: ParamSpace,
    pub operator: Operator,
    pub metric: Metric,
    /// Cutoff time κ in iterations.
    pub kappa: u64,
    /// Runs per evaluation, r.
    pub runs: u32,
    /// Number of configurator iterations, T.
    pub evaluations: u32,
    /// Penalty constant p (time metric only).
    pub penalty: f64,
    pub problem: Problem,
}

impl TunerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs < 1 {
            return Err(Error::invalid("runs per evaluation must be at least 1"));
        }
        if self.evaluations < 1 {
            return Err(Error::invalid("number of evaluations must be at least 1"));
        }
        if !(self.penalty >= 1.0 && self.penalty.is_finite()) {
            return Err(Error::invalid("penalty must be a finite number ≥ 1"));
        }
        if self.space.phi() as usize > self.problem.n() {
            return Err(Error::invalid(format!(
                "phi = {} exceeds problem size n = {}",
                self.space.phi(),
                self.problem.n()
            )));
        }
        Ok(())
    }
}

/// Outcome of a mutation of the active parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Proposal {
    Feasible(u32),
    /// The proposed value overstepped a boundary.
    Infeasible(i64),
}

impl Proposal {
    pub fn value(self) -> i64 {
        match self {
            Proposal::Feasible(v) => v as i64,
            Proposal::Infeasible(v) => v,
        }
    }
}

pub fn mutate(
    theta: u32,
    op: Operator,
    space: ParamSpace,
    rng: &mut RngStream,
) -> Result<Proposal> {
    space.check(theta)?;
    let steps = op.steps();
    let proposed = theta as i64 + steps[rng.gen_range(0..steps.len())];
    Ok(if space.contains(proposed) {
        Proposal::Feasible(proposed as u32)
    } else {
        Proposal::Infeasible(proposed)
    })
}

/// Decides between the active parameter and a challenger.
pub trait Evaluator {
    /// Returns the winner, which must be `theta` or `challenger`.
    fn compare(&self, theta: u32, challenger: u32, rng: &mut RngStream) -> u32;
}

/// Which side of a pairwise comparison won.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

/// Winner of one paired run under eval-F: higher final fitness, then the
/// strictly earlier last improvement; `None` on a full tie.
pub fn fitness_run_winner(a: &RunRecord, b: &RunRecord) -> Option<Side> {
    use std::cmp::Ordering::*;
    match a.final_fitness.cmp(&b.final_fitness) {
        Greater => Some(Side::First),
        Less => Some(Side::Second),
        Equal => match a.last_improvement_iter.cmp(&b.last_improvement_iter) {
            Less => Some(Side::First),
            Greater => Some(Side::Second),
            Equal => None,
        },
    }
}

fn pick<T: Copy>(first: T, second: T, side: Side) -> T {
    match side {
        Side::First => first,
        Side::Second => second,
    }
}

fn coin(rng: &mut RngStream) -> Side {
    if rng.gen::<bool>() {
        Side::First
    } else {
        Side::Second
    }
}

/// eval-F decision from already executed paired runs.
pub fn decide_f(pairs: &[(RunRecord, RunRecord)], rng: &mut RngStream) -> Side {
    let (mut wins, mut wins2) = (0u32, 0u32);
    for (a, b) in pairs {
        match fitness_run_winner(a, b) {
            Some(Side::First) => wins += 1,
            Some(Side::Second) => wins2 += 1,
            None => {}
        }
    }
    match wins.cmp(&wins2) {
        std::cmp::Ordering::Greater => Side::First,
        std::cmp::Ordering::Less => Side::Second,
        std::cmp::Ordering::Equal => coin(rng),
    }
}

/// eval-T decision from already executed paired runs.
pub fn decide_t(
    pairs: &[(RunRecord, RunRecord)],
    kappa: u64,
    penalty: f64,
    rng: &mut RngStream,
) -> Side {
    let (mut time, mut time2) = (0.0, 0.0);
    for (a, b) in pairs {
        time += capped_opt_time(a, kappa, penalty);
        time2 += capped_opt_time(b, kappa, penalty);
    }
    if time < time2 {
        Side::First
    } else if time2 < time {
        Side::Second
    } else {
        coin(rng)
    }
}

/// Executes the `r` paired runs of one evaluation.
///
/// Run `i` of parameter `v` draws from the substream labelled `(i, v)` of
/// `rng`, so a configuration's runs do not depend on which side of the
/// comparison it sits.
pub fn paired_runs(
    theta: u32,
    theta2: u32,
    cfg: &TunerConfig,
    rng: &RngStream,
) -> Result<Vec<(RunRecord, RunRecord)>> {
    cfg.space.check(theta)?;
    cfg.space.check(theta2)?;
    (0..cfg.runs as u64)
        .map(|i| {
            let mut s1 = rng.derive((i << 32) | theta as u64);
            let mut s2 = rng.derive((i << 32) | theta2 as u64);
            Ok((
                run_rlsk(&cfg.problem, theta as usize, cfg.kappa, &mut s1)?,
                run_rlsk(&cfg.problem, theta2 as usize, cfg.kappa, &mut s2)?,
            ))
        })
        .collect()
}

pub fn eval_f(theta: u32, theta2: u32, cfg: &TunerConfig, rng: &mut RngStream) -> Result<u32> {
    let pairs = paired_runs(theta, theta2, cfg, rng)?;
    Ok(pick(theta, theta2, decide_f(&pairs, rng)))
}

pub fn eval_t(theta: u32, theta2: u32, cfg: &TunerConfig, rng: &mut RngStream) -> Result<u32> {
    let pairs = paired_runs(theta, theta2, cfg, rng)?;
    Ok(pick(
        theta,
        theta2,
        decide_t(&pairs, cfg.kappa, cfg.penalty, rng),
    ))
}

/// Dispatches to eval-F or eval-T according to the configured metric.
pub fn evaluate(theta: u32, theta2: u32, cfg: &TunerConfig, rng: &mut RngStream) -> Result<u32> {
    match cfg.metric {
        Metric::Fitness => eval_f(theta, theta2, cfg, rng),
        Metric::Time => eval_t(theta, theta2, cfg, rng),
    }
}

impl Evaluator for TunerConfig {
    fn compare(&self, theta: u32, challenger: u32, rng: &mut RngStream) -> u32 {
        // Parameters come from `mutate` on a validated space.
        evaluate(theta, challenger, self, rng).expect("validated tuner configuration")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TunerStep {
    /// Active parameter before the step.
    pub theta: u32,
    pub proposed: i64,
    pub feasible: bool,
    /// Active parameter after the step.
    pub winner: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TunerTrace {
    pub initial_theta: u32,
    pub steps: Vec<TunerStep>,
    pub returned_theta: u32,
    /// Feasible steps, i.e. comparisons that executed target runs.
    pub evaluations_used: u64,
}

impl TunerTrace {
    /// Number of configurator iterations before the active parameter first
    /// equals `value` (0 if it started there).
    pub fn first_hit(&self, value: u32) -> Option<usize> {
        if self.initial_theta == value {
            return Some(0);
        }
        self.steps
            .iter()
            .position(|s| s.winner == value)
            .map(|i| i + 1)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "theta", "theta_proposed", "feasible", "winner"])?;
        for (i, s) in self.steps.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                s.theta.to_string(),
                s.proposed.to_string(),
                s.feasible.to_string(),
                s.winner.to_string(),
            ])?;
        }
        w.flush().map_err(|source| Error::Io {
            path: "<trace>".into(),
            source,
        })?;
        Ok(())
    }
}

/// ParamRLS with the configured target problem and comparison metric.
pub fn param_rls(cfg: &TunerConfig, rng: &mut RngStream) -> Result<TunerTrace> {
    cfg.validate()?;
    Ok(param_rls_with(
        cfg.space,
        cfg.operator,
        cfg.evaluations,
        cfg,
        rng,
    ))
}

/// ParamRLS driven by an arbitrary evaluator.
///
/// Runs exactly `evaluations` iterations. An infeasible proposal leaves the
/// active parameter unchanged and runs nothing. Step `j`'s comparison uses
/// the substream of `rng` labelled `j`.
pub fn param_rls_with<E: Evaluator + ?Sized>(
    space: ParamSpace,
    op: Operator,
    evaluations: u32,
    evaluator: &E,
    rng: &mut RngStream,
) -> TunerTrace {
    let mut theta = rng.gen_range(1..=space.phi());
    let initial_theta = theta;
    let mut steps = Vec::with_capacity(evaluations as usize);
    let mut used = 0;
    for j in 0..evaluations as u64 {
        let proposal = mutate(theta, op, space, rng).expect("active parameter within space");
        let before = theta;
        match proposal {
            Proposal::Feasible(challenger) => {
                let mut eval_rng = rng.derive(j);
                theta = evaluator.compare(theta, challenger, &mut eval_rng);
                debug_assert!(theta == before || theta == challenger);
                used += 1;
            }
            Proposal::Infeasible(_) => {}
        }
        steps.push(TunerStep {
            theta: before,
            proposed: proposal.value(),
            feasible: matches!(proposal, Proposal::Feasible(_)),
            winner: theta,
        });
    }
    TunerTrace {
        initial_theta,
        steps,
        returned_theta: theta,
        evaluations_used: used,
    }
}
