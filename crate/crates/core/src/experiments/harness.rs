//! Replicated experiments.
//!
//! Replicate `i` draws all its randomness from stream `i` of the scenario's
//! master seed and results are gathered in replicate order, so reports do
//! not depend on the number of worker threads.

use std::time::Instant;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{Estimate, Report, CONFIDENCE};
use super::scenario::{Mode, Scenario};
use super::stats::{chi_square_uniform, mean_se, z_value};
use crate::bitcore::{flip_k_distinct, RngStream};
use crate::configurator::{evaluate, param_rls};
use crate::error::{Error, Result};
use crate::target::{Rlsk, Step};
use crate::theory::{self, DriftQuery};

/// Execution settings that do not affect results.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Exec {
    /// Worker threads; the global pool when `None`.
    pub workers: Option<usize>,
}

impl Exec {
    pub fn with_workers(workers: usize) -> Self {
        Self {
            workers: Some(workers),
        }
    }
}

/// Maps `f` over replicate indices `0..replicates`, in parallel, returning
/// results in index order.
pub fn replicate<T, F>(replicates: u64, exec: Exec, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let job = || {
        (0..replicates)
            .into_par_iter()
            .map(&f)
            .collect::<Result<Vec<T>>>()
    };
    match exec.workers {
        None => job(),
        Some(0) => Err(Error::invalid("worker count must be at least 1")),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::ResourceLimit(format!("cannot start {w} workers: {e}")))?
            .install(job),
    }
}

fn expect_mode(sc: &Scenario, mode: Mode) -> Result<()> {
    if sc.mode != mode {
        return Err(Error::config(
            "mode",
            format!("expected `{}`, got `{}`", mode.as_str(), sc.mode.as_str()),
        ));
    }
    sc.validate()
}

/// Repeated single evaluations between RLS_a and RLS_b. The histogram counts
/// wins per parameter value.
pub fn run_race(sc: &Scenario, exec: Exec) -> Result<Report> {
    let start = Instant::now();
    expect_mode(sc, Mode::Race)?;
    let setup = sc.race_setup()?;
    let winners = replicate(sc.replicates, exec, |i| {
        let mut rng = RngStream::new(sc.master_seed, i);
        evaluate(setup.a, setup.b, &setup.config, &mut rng)
    })?;
    let a_wins = winners.iter().filter(|&&w| w == setup.a).count() as u64;
    let mut rep = Report::new(&sc.name, sc.mode, sc.master_seed, sc.replicates);
    rep.set_counts([
        (setup.a.to_string(), a_wins),
        (setup.b.to_string(), sc.replicates - a_wins),
    ]);
    rep.stat("a", setup.a as f64);
    rep.stat("b", setup.b as f64);
    rep.stat("kappa", setup.config.kappa as f64);
    rep.stat("runs", setup.config.runs as f64);
    rep.stat("a_win_frequency", a_wins as f64 / sc.replicates as f64);
    rep.wall_time = start.elapsed();
    Ok(rep)
}

/// Repeated ParamRLS executions. The histogram covers every value of the
/// parameter space, including those never returned.
pub fn run_tune(sc: &Scenario, exec: Exec) -> Result<Report> {
    let start = Instant::now();
    expect_mode(sc, Mode::Tune)?;
    let cfg = sc.tuner_config()?;
    let phi = cfg.space.phi();
    let outcomes = replicate(sc.replicates, exec, |i| {
        let trace = param_rls(&cfg, &mut RngStream::new(sc.master_seed, i))?;
        Ok((
            trace.returned_theta,
            trace.first_hit(1),
            trace.evaluations_used,
        ))
    })?;

    let mut hist = vec![0u64; phi as usize];
    for (theta, _, _) in &outcomes {
        hist[*theta as usize - 1] += 1;
    }
    let mut rep = Report::new(&sc.name, sc.mode, sc.master_seed, sc.replicates);
    rep.set_counts(
        hist.iter()
            .enumerate()
            .map(|(i, &c)| ((i + 1).to_string(), c)),
    );

    let (chi, p) = chi_square_uniform(&hist);
    rep.stat("phi", phi as f64);
    rep.stat("kappa", cfg.kappa as f64);
    rep.stat("runs", cfg.runs as f64);
    rep.stat("evaluations", cfg.evaluations as f64);
    rep.stat("chi_square", chi);
    rep.stat("chi_square_p", p);
    rep.stat("k1_frequency", hist[0] as f64 / sc.replicates as f64);

    let hits: Vec<f64> = outcomes
        .iter()
        .filter_map(|(_, h, _)| h.map(|h| h as f64))
        .collect();
    rep.stat("first_hit_1_reached", hits.len() as f64);
    if !hits.is_empty() {
        rep.estimates.push(mean_estimate("first_hit_1", &hits));
    }
    let used: Vec<f64> = outcomes.iter().map(|(_, _, u)| *u as f64).collect();
    rep.estimates.push(mean_estimate("evaluations_used", &used));
    rep.wall_time = start.elapsed();
    Ok(rep)
}

/// One RLS_k step on OneMax from a uniformly random point at distance `s`
/// from the optimum, repeated. The histogram counts the progress made.
pub fn run_drift(sc: &Scenario, exec: Exec) -> Result<Report> {
    let start = Instant::now();
    expect_mode(sc, Mode::Drift)?;
    let setup = sc.drift_setup()?;
    let p = &setup.problem;
    let optimum = p.one_max_optimum();
    let gains = replicate(sc.replicates, exec, |i| {
        let mut rng = RngStream::new(sc.master_seed, i);
        let x = flip_k_distinct(&optimum, setup.s, &mut rng)?;
        let mut search = Rlsk::from_solution(p, setup.k, x)?;
        Ok(match search.step(&mut rng) {
            Step::Accepted(d) => d as u64,
            Step::Rejected => 0,
        })
    })?;

    let max = gains.iter().copied().max().unwrap_or(0) as usize;
    let mut hist = vec![0u64; max + 1];
    for &g in &gains {
        hist[g as usize] += 1;
    }
    let mut rep = Report::new(&sc.name, sc.mode, sc.master_seed, sc.replicates);
    rep.set_counts(
        hist.iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(g, &c)| (g.to_string(), c)),
    );
    let xs: Vec<f64> = gains.iter().map(|&g| g as f64).collect();
    let est = mean_estimate("drift", &xs);
    let (_, se) = mean_se(&xs);
    let exact = theory::drift_exact(DriftQuery::new(
        p.n() as u64,
        setup.k as u64,
        setup.s as u64,
    )?)
    .to_f64()
    .unwrap_or(f64::NAN);
    rep.stat("n", p.n() as f64);
    rep.stat("k", setup.k as f64);
    rep.stat("s", setup.s as f64);
    rep.stat("drift_exact", exact);
    rep.stat("drift_se", se);
    if se > 0.0 {
        rep.stat("z_score", (est.value - exact) / se);
    }
    rep.estimates.push(est);
    rep.wall_time = start.elapsed();
    Ok(rep)
}

/// Dispatches replicated modes; table-like modes have no report.
pub fn run_scenario(sc: &Scenario, exec: Exec) -> Result<Report> {
    match sc.mode {
        Mode::Race => run_race(sc, exec),
        Mode::Tune => run_tune(sc, exec),
        Mode::Drift => run_drift(sc, exec),
        other => Err(Error::config(
            "mode",
            format!(
                "`{}` produces a table, not a replicated report",
                other.as_str()
            ),
        )),
    }
}

fn mean_estimate(name: &str, xs: &[f64]) -> Estimate {
    let (mean, se) = mean_se(xs);
    let half = z_value(CONFIDENCE) * se;
    Estimate {
        name: name.to_string(),
        value: mean,
        ci_low: mean - half,
        ci_high: mean + half,
    }
}

/// Exact hitting time of state 1 for the lazy walk on `{1, .., phi}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkRow {
    pub start: u64,
    /// Reduced fraction.
    pub exact: String,
    pub value: f64,
    /// `2·phi²`.
    pub bound: u64,
}

pub fn walk_rows(phi: u32) -> Result<Vec<WalkRow>> {
    let times = theory::lazy_walk_hitting_times(phi)?;
    Ok(times
        .iter()
        .enumerate()
        .map(|(i, h)| WalkRow {
            start: i as u64 + 1,
            exact: h.to_string(),
            value: h.to_f64().unwrap_or(f64::NAN),
            bound: 2 * phi as u64 * phi as u64,
        })
        .collect())
}

/// Expected Ridge* optimisation time of RLS_k.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedTimeRow {
    pub n: u64,
    pub k: u64,
    /// Decimal integer; may exceed 64 bits.
    pub expected_time: String,
}

pub fn expected_time_rows(n: u64, ks: &[u64]) -> Result<Vec<ExpectedTimeRow>> {
    ks.iter()
        .map(|&k| {
            Ok(ExpectedTimeRow {
                n,
                k,
                expected_time: theory::expected_opt_time_ridge(n, k)?.to_string(),
            })
        })
        .collect()
}

/// Exact drift of RLS_k on OneMax at every distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftRow {
    pub n: u64,
    pub k: u64,
    pub s: u64,
    pub exact: String,
    pub value: f64,
    /// Closed form where defined, else empty.
    pub closed: Option<String>,
}

pub fn drift_rows(n: u64, k: u64) -> Result<Vec<DriftRow>> {
    (0..=n)
        .map(|s| {
            let q = DriftQuery::new(n, k, s)?;
            let exact = theory::drift_exact(q);
            Ok(DriftRow {
                n,
                k,
                s,
                value: exact.to_f64().unwrap_or(f64::NAN),
                exact: exact.to_string(),
                closed: theory::drift_closed(q).ok().map(|c| c.to_string()),
            })
        })
        .collect()
}
