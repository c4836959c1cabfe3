//! Scenario files: JSON documents describing one experiment.
//!
//! Integer fields accept either a literal or an expression string over `n`
//! (and `phi` inside the tuner section), e.g. `"kappa": "floor(0.03*n)"`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::expr::{Env, Expr};
use crate::bitcore::{BitString, RngStream};
use crate::configurator::{Metric, Operator, ParamSpace, TunerConfig, DEFAULT_PENALTY};
use crate::error::{Error, Result};
use crate::problems::{Problem, ProblemKind};

/// Stream id reserved for drawing a random instance shift.
const SHIFT_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Tune,
    Race,
    Drift,
    Table,
    Walk,
    ExpectedTime,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Tune => "tune",
            Mode::Race => "race",
            Mode::Drift => "drift",
            Mode::Table => "table",
            Mode::Walk => "walk",
            Mode::ExpectedTime => "expected-time",
        }
    }
}

/// A non-negative integer given literally or as an expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Int(u64),
    Expr(String),
}

impl From<u64> for Quantity {
    fn from(v: u64) -> Self {
        Quantity::Int(v)
    }
}

impl From<&str> for Quantity {
    fn from(s: &str) -> Self {
        Quantity::Expr(s.to_string())
    }
}

impl Quantity {
    pub fn resolve(&self, path: &str, env: &Env) -> Result<u64> {
        match self {
            Quantity::Int(v) => Ok(*v),
            Quantity::Expr(src) => Expr::parse(src)
                .and_then(|e| e.eval(env))
                .map_err(|msg| Error::config(path, msg)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub kind: ProblemKind,
    pub n: Quantity,
    /// `"identity"`, `"random"` or a hex-encoded shift.
    #[serde(default = "identity")]
    pub shift: String,
}

fn identity() -> String {
    "identity".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TunerSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Quantity>,
    #[serde(default = "default_operator")]
    pub operator: Operator,
    #[serde(default = "default_metric")]
    pub metric: Metric,
    pub kappa: Quantity,
    #[serde(default = "one")]
    pub runs: Quantity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluations: Option<Quantity>,
    #[serde(default = "default_penalty")]
    pub penalty: f64,
}

fn default_operator() -> Operator {
    Operator::Pm1
}

fn default_metric() -> Metric {
    Metric::Fitness
}

fn default_penalty() -> f64 {
    DEFAULT_PENALTY
}

fn one() -> Quantity {
    Quantity::Int(1)
}

/// The two parameter values of a direct race, `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaceSpec {
    pub a: u32,
    pub b: u32,
}

/// One RLS_k step from a uniformly random point at distance `s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriftSpec {
    pub k: Quantity,
    pub s: Quantity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSpec {
    pub periods: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkSpec {
    pub phi: Quantity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedTimeSpec {
    /// A single `k`; all of `1..=n/2` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Quantity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuner: Option<TunerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub race: Option<RaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drift: Option<DriftSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<TableSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walk: Option<WalkSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_time: Option<ExpectedTimeSpec>,
    #[serde(default = "one_u64")]
    pub replicates: u64,
    #[serde(default)]
    pub master_seed: u64,
}

fn one_u64() -> u64 {
    1
}

/// Fully evaluated race settings.
#[derive(Debug, Clone)]
pub struct RaceSetup {
    pub a: u32,
    pub b: u32,
    pub config: TunerConfig,
}

/// Fully evaluated drift settings.
#[derive(Debug, Clone)]
pub struct DriftSetup {
    pub problem: Problem,
    pub k: usize,
    pub s: usize,
}

impl Scenario {
    /// Minimal scenario of the given mode; sections are filled in by the
    /// caller.
    pub fn new(name: impl Into<String>, mode: Mode) -> Self {
        Self {
            name: name.into(),
            description: None,
            mode,
            problem: None,
            tuner: None,
            race: None,
            drift: None,
            table: None,
            walk: None,
            expected_time: None,
            replicates: 1,
            master_seed: 0,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let sc: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let path = if path == "." {
                "<root>".to_string()
            } else {
                path
            };
            Error::config(path, e.into_inner().to_string())
        })?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Checks that every section the mode needs is present and evaluates.
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::config("name", "must not be empty"));
        }
        if self.replicates < 1 {
            return Err(Error::config("replicates", "must be at least 1"));
        }
        match self.mode {
            Mode::Tune => self.tuner_config().map(drop),
            Mode::Race => self.race_setup().map(drop),
            Mode::Drift => self.drift_setup().map(drop),
            Mode::Table => self.periods().map(drop),
            Mode::Walk => self.walk_phi().map(drop),
            Mode::ExpectedTime => self.expected_time_ks().map(drop),
        }
    }

    fn problem_spec(&self) -> Result<&ProblemSpec> {
        self.problem
            .as_ref()
            .ok_or_else(|| Error::config("problem", "missing section"))
    }

    fn tuner_spec(&self) -> Result<&TunerSpec> {
        self.tuner
            .as_ref()
            .ok_or_else(|| Error::config("tuner", "missing section"))
    }

    /// Problem size.
    pub fn n(&self) -> Result<usize> {
        let n = self.problem_spec()?.n.resolve("problem.n", &Env::new())?;
        if n < 1 {
            return Err(Error::config("problem.n", "must be positive"));
        }
        usize::try_from(n).map_err(|_| Error::config("problem.n", "too large"))
    }

    fn env(&self) -> Result<Env> {
        Ok([("n", self.n()? as u64)].into_iter().collect())
    }

    /// The instance. A random shift is drawn from a stream reserved for
    /// that purpose, so every replicate sees the same instance.
    pub fn problem(&self) -> Result<Problem> {
        let spec = self.problem_spec()?;
        let n = self.n()?;
        let shift = match spec.shift.as_str() {
            "identity" => BitString::zeros(n),
            "random" => BitString::random(n, &mut RngStream::new(self.master_seed, SHIFT_STREAM)),
            hex => BitString::from_hex(hex, n)
                .map_err(|e| Error::config("problem.shift", e.to_string()))?,
        };
        Problem::new(spec.kind, shift).map_err(|e| Error::config("problem", e.to_string()))
    }

    fn kappa_runs(&self, env: &Env) -> Result<(u64, u32)> {
        let t = self.tuner_spec()?;
        let kappa = t.kappa.resolve("tuner.kappa", env)?;
        let runs = t.runs.resolve("tuner.runs", env)?;
        if runs < 1 {
            return Err(Error::config("tuner.runs", "must be at least 1"));
        }
        let runs = u32::try_from(runs).map_err(|_| Error::config("tuner.runs", "too large"))?;
        if !(t.penalty >= 1.0 && t.penalty.is_finite()) {
            return Err(Error::config(
                "tuner.penalty",
                "must be a finite number ≥ 1",
            ));
        }
        Ok((kappa, runs))
    }

    /// Settings for a ParamRLS run.
    pub fn tuner_config(&self) -> Result<TunerConfig> {
        let problem = self.problem()?;
        let t = self.tuner_spec()?;
        let mut env = self.env()?;
        let phi = t
            .phi
            .as_ref()
            .ok_or_else(|| Error::config("tuner.phi", "missing field"))?
            .resolve("tuner.phi", &env)?;
        if phi < 1 || phi as usize > problem.n() {
            return Err(Error::config(
                "tuner.phi",
                format!("must lie in [1, n], got {phi}"),
            ));
        }
        env.insert("phi", phi);
        let (kappa, runs) = self.kappa_runs(&env)?;
        let evaluations = t
            .evaluations
            .as_ref()
            .ok_or_else(|| Error::config("tuner.evaluations", "missing field"))?
            .resolve("tuner.evaluations", &env)?;
        if evaluations < 1 {
            return Err(Error::config("tuner.evaluations", "must be at least 1"));
        }
        let cfg = TunerConfig {
            space: ParamSpace::new(phi as u32)?,
            operator: t.operator,
            metric: t.metric,
            kappa,
            runs,
            evaluations: u32::try_from(evaluations)
                .map_err(|_| Error::config("tuner.evaluations", "too large"))?,
            penalty: t.penalty,
            problem,
        };
        cfg.validate()
            .map_err(|e| Error::config("tuner", e.to_string()))?;
        Ok(cfg)
    }

    /// Settings for a direct race between RLS_a and RLS_b.
    pub fn race_setup(&self) -> Result<RaceSetup> {
        let problem = self.problem()?;
        let race = self
            .race
            .ok_or_else(|| Error::config("race", "missing section"))?;
        if race.a < 1 {
            return Err(Error::config("race.a", "must be at least 1"));
        }
        if race.a >= race.b {
            return Err(Error::config(
                "race",
                format!("need a < b, got a = {}, b = {}", race.a, race.b),
            ));
        }
        if race.b as usize > problem.n() {
            return Err(Error::config("race.b", "must not exceed n"));
        }
        let t = self.tuner_spec()?;
        let (kappa, runs) = self.kappa_runs(&self.env()?)?;
        let config = TunerConfig {
            space: ParamSpace::new(race.b)?,
            operator: t.operator,
            metric: t.metric,
            kappa,
            runs,
            evaluations: 1,
            penalty: t.penalty,
            problem,
        };
        Ok(RaceSetup {
            a: race.a,
            b: race.b,
            config,
        })
    }

    pub fn drift_setup(&self) -> Result<DriftSetup> {
        let problem = self.problem()?;
        if problem.kind() != ProblemKind::OneMax {
            return Err(Error::config("problem.kind", "drift scenarios use one_max"));
        }
        let d = self
            .drift
            .as_ref()
            .ok_or_else(|| Error::config("drift", "missing section"))?;
        let env = self.env()?;
        let n = problem.n();
        let k = d.k.resolve("drift.k", &env)? as usize;
        let s = d.s.resolve("drift.s", &env)? as usize;
        if k < 1 || k > n {
            return Err(Error::config(
                "drift.k",
                format!("must lie in [1, n], got {k}"),
            ));
        }
        if s > n {
            return Err(Error::config(
                "drift.s",
                format!("must lie in [0, n], got {s}"),
            ));
        }
        Ok(DriftSetup { problem, k, s })
    }

    pub fn periods(&self) -> Result<u32> {
        Ok(self
            .table
            .ok_or_else(|| Error::config("table", "missing section"))?
            .periods)
    }

    pub fn walk_phi(&self) -> Result<u32> {
        let w = self
            .walk
            .as_ref()
            .ok_or_else(|| Error::config("walk", "missing section"))?;
        let env = match self.problem {
            Some(_) => self.env()?,
            None => Env::new(),
        };
        let phi = w.phi.resolve("walk.phi", &env)?;
        if phi < 1 {
            return Err(Error::config("walk.phi", "must be at least 1"));
        }
        u32::try_from(phi).map_err(|_| Error::config("walk.phi", "too large"))
    }

    /// Problem size and the values of `k` to tabulate.
    pub fn expected_time_ks(&self) -> Result<(u64, Vec<u64>)> {
        let n = self.n()? as u64;
        let env = self.env()?;
        let ks = match self.expected_time.as_ref().and_then(|e| e.k.as_ref()) {
            Some(k) => vec![k.resolve("expected_time.k", &env)?],
            None => (1..=n / 2).collect(),
        };
        for &k in &ks {
            if k < 1 || 2 * k > n {
                return Err(Error::config(
                    "expected_time.k",
                    format!("must lie in [1, n/2], got {k}"),
                ));
            }
        }
        Ok((n, ks))
    }
}

macro_rules! builtin {
    ($($name:literal),* $(,)?) => {
        /// Scenarios shipped with the library, by name.
        pub const BUILTIN: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../../scenarios/", $name, ".json")))),*
        ];
    };
}

builtin!(
    "ridge_tuning_time",
    "ridge_tuning_time_walk",
    "can_tune_for_ridge_cutoff_time_1",
    "pRLST_no_good_ridge_small_cutoff",
    "exp_opt_time",
    "min_t_a_ahead_b",
    "small_k_wins_long_runs_om",
    "small_k_wins_long_runs_om_race",
    "k_ge1_returned_for_small_cutoff",
    "RLS3_beats_RLS1_short_race_wop",
    "paramrls_t_small_cutoff_uniform",
    "drift_bounds",
    "numerical_distances",
);

/// Looks up a shipped scenario by name.
pub fn builtin(name: &str) -> Option<Scenario> {
    BUILTIN
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| Scenario::from_json(text).expect("shipped scenarios parse"))
}
