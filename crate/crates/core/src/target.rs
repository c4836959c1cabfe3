//! RLS_k: flip exactly `k` distinct bits, keep the offspring if it is at
//! least as fit.

use serde::{Deserialize, Serialize};

use crate::bitcore::{BitString, RngStream, SubsetSampler};
use crate::error::Result;
use crate::problems::Problem;

/// Outcome of one capped run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub final_fitness: i64,
    /// 1-based iteration of the last strict fitness increase; 0 if none.
    pub last_improvement_iter: u64,
    /// Iteration at which the reachable optimum was first held. `Some(0)`
    /// when the initial solution is already optimal.
    pub optimum_hit_iter: Option<u64>,
    pub iterations_executed: u64,
    /// `(iteration, fitness)` at the start and after every strict
    /// improvement, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<(u64, i64)>>,
}

/// One RLS_k search in progress.
#[derive(Debug, Clone)]
pub struct Rlsk<'p> {
    problem: &'p Problem,
    k: usize,
    x: BitString,
    fitness: i64,
    sampler: SubsetSampler,
}

/// Result of a single mutation-selection step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Rejected,
    /// Accepted with the given fitness change (≥ 0).
    Accepted(i64),
}

impl<'p> Rlsk<'p> {
    /// Starts from the problem's initialisation scheme.
    pub fn new(problem: &'p Problem, k: usize, rng: &mut RngStream) -> Result<Self> {
        problem.check_k(k)?;
        let x = problem.initial_solution(rng);
        Self::from_solution(problem, k, x)
    }

    /// Starts from `x`. On Ridge* `x` must lie on the path.
    pub fn from_solution(problem: &'p Problem, k: usize, x: BitString) -> Result<Self> {
        problem.check_k(k)?;
        let fitness = problem.fitness(&x)?;
        if fitness < 0 {
            return Err(crate::Error::invalid(
                "RLS_k must start from a solution with non-negative fitness",
            ));
        }
        Ok(Self {
            problem,
            k,
            x,
            fitness,
            sampler: SubsetSampler::new(problem.n()),
        })
    }

    pub fn fitness(&self) -> i64 {
        self.fitness
    }

    pub fn solution(&self) -> &BitString {
        &self.x
    }

    #[inline]
    pub fn step(&mut self, rng: &mut RngStream) -> Step {
        let flips = self.sampler.sample(self.k, rng);
        let child = self.problem.offspring_fitness(&self.x, self.fitness, flips);
        if child >= self.fitness {
            for &i in flips {
                self.x.flip(i as usize);
            }
            let delta = child - self.fitness;
            self.fitness = child;
            Step::Accepted(delta)
        } else {
            Step::Rejected
        }
    }
}

/// Runs RLS_k for at most `kappa` iterations, stopping early once the
/// reachable optimum is held.
pub fn run_rlsk(p: &Problem, k: usize, kappa: u64, rng: &mut RngStream) -> Result<RunRecord> {
    run_rlsk_with(p, k, kappa, rng, false)
}

/// As [`run_rlsk`], optionally recording the improvement trajectory.
pub fn run_rlsk_with(
    p: &Problem,
    k: usize,
    kappa: u64,
    rng: &mut RngStream,
    trace: bool,
) -> Result<RunRecord> {
    let optimum = p.reachable_optimum(k)?;
    let mut search = Rlsk::new(p, k, rng)?;
    let mut trajectory = trace.then(|| vec![(0, search.fitness())]);
    let mut last_improvement_iter = 0;
    let mut optimum_hit_iter = (search.fitness() == optimum).then_some(0);
    let mut iter = 0;
    while iter < kappa && optimum_hit_iter.is_none() {
        iter += 1;
        if let Step::Accepted(delta) = search.step(rng) {
            if delta > 0 {
                last_improvement_iter = iter;
                if let Some(t) = trajectory.as_mut() {
                    t.push((iter, search.fitness()));
                }
                if search.fitness() == optimum {
                    optimum_hit_iter = Some(iter);
                }
            }
        }
    }
    Ok(RunRecord {
        final_fitness: search.fitness(),
        last_improvement_iter,
        optimum_hit_iter,
        iterations_executed: iter,
        trajectory,
    })
}

/// Time to the optimum, or `penalty · kappa` if the run never reached it.
pub fn capped_opt_time(rec: &RunRecord, kappa: u64, penalty: f64) -> f64 {
    match rec.optimum_hit_iter {
        Some(t) => t as f64,
        None => penalty * kappa as f64,
    }
}

/// Writes a trajectory as `iteration,fitness` CSV rows with a header.
pub fn write_trajectory_csv<W: std::io::Write>(rec: &RunRecord, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["iteration", "fitness"])?;
    for (it, f) in rec.trajectory.iter().flatten() {
        w.write_record([it.to_string(), f.to_string()])?;
    }
    w.flush().map_err(|source| crate::Error::Io {
        path: "<trajectory>".into(),
        source,
    })?;
    Ok(())
}
