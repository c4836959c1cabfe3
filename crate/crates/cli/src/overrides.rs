//! Inline flags that build or patch a scenario.

use clap::{Args, ValueEnum};
use paramrls::configurator::DEFAULT_PENALTY;
use paramrls::experiments::scenario::{
    DriftSpec, ExpectedTimeSpec, ProblemSpec, Quantity, RaceSpec, TableSpec, TunerSpec, WalkSpec,
};
use paramrls::experiments::{Mode, Scenario};
use paramrls::{Error, Metric, Operator, ProblemKind, Result};

#[derive(Args, Debug, Default)]
pub struct Overrides {
    /// Scenario name used in the report.
    #[arg(long)]
    name: Option<String>,
    /// Function class.
    #[arg(long, value_enum)]
    problem: Option<KindArg>,
    /// Problem size.
    #[arg(long)]
    n: Option<String>,
    /// Instance shift: identity, random, or hex.
    #[arg(long)]
    shift: Option<String>,
    /// Largest parameter value; with `walk`, the walk length.
    #[arg(long)]
    phi: Option<String>,
    /// Cutoff time, literal or expression in n (e.g. "floor(0.03*n)").
    #[arg(long)]
    kappa: Option<String>,
    /// Runs per evaluation.
    #[arg(long)]
    runs: Option<String>,
    /// Configurator iterations.
    #[arg(long)]
    evals: Option<String>,
    #[arg(long, value_enum)]
    metric: Option<MetricArg>,
    #[arg(long, value_enum)]
    operator: Option<OperatorArg>,
    /// Penalty constant for the time metric.
    #[arg(long)]
    penalty: Option<f64>,
    #[arg(long)]
    replicates: Option<u64>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Smaller raced parameter.
    #[arg(long)]
    a: Option<u32>,
    /// Larger raced parameter.
    #[arg(long)]
    b: Option<u32>,
    /// Neighbourhood size for `drift` and `expected-time`.
    #[arg(long)]
    pub k: Option<String>,
    /// Distance to the optimum for a Monte Carlo drift estimate.
    #[arg(long)]
    pub s: Option<String>,
    /// Periods of the recurrence table.
    #[arg(long)]
    periods: Option<u32>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KindArg {
    #[value(alias = "onemax")]
    OneMax,
    #[value(alias = "ridge")]
    RidgeStar,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MetricArg {
    #[value(alias = "F")]
    F,
    #[value(alias = "T")]
    T,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OperatorArg {
    Pm1,
    Pm12,
}

pub fn quantity(s: &str) -> Quantity {
    match s.trim().parse::<u64>() {
        Ok(v) => Quantity::Int(v),
        Err(_) => Quantity::Expr(s.to_string()),
    }
}

fn missing(path: &str, flag: &str) -> Error {
    Error::config(path, format!("missing; pass {flag} or a scenario"))
}

impl Overrides {
    fn kind(&self) -> Option<ProblemKind> {
        self.problem.map(|k| match k {
            KindArg::OneMax => ProblemKind::OneMax,
            KindArg::RidgeStar => ProblemKind::RidgeStar,
        })
    }

    pub fn apply(&self, sc: &mut Scenario) -> Result<()> {
        if let Some(name) = &self.name {
            sc.name = name.clone();
        }
        if let Some(r) = self.replicates {
            sc.replicates = r;
        }
        if let Some(seed) = self.seed {
            sc.master_seed = seed;
        }
        self.apply_problem(sc)?;
        self.apply_tuner(sc)?;
        self.apply_sections(sc)
    }

    fn apply_problem(&self, sc: &mut Scenario) -> Result<()> {
        if self.problem.is_none() && self.n.is_none() && self.shift.is_none() {
            return Ok(());
        }
        let spec = match sc.problem.as_mut() {
            Some(p) => p,
            None => {
                let kind = self.kind().or(match sc.mode {
                    Mode::Drift => Some(ProblemKind::OneMax),
                    Mode::ExpectedTime => Some(ProblemKind::RidgeStar),
                    _ => None,
                });
                sc.problem.insert(ProblemSpec {
                    kind: kind.ok_or_else(|| missing("problem.kind", "--problem"))?,
                    n: quantity(
                        self.n
                            .as_deref()
                            .ok_or_else(|| missing("problem.n", "--n"))?,
                    ),
                    shift: "identity".into(),
                })
            }
        };
        if let Some(kind) = self.kind() {
            spec.kind = kind;
        }
        if let Some(n) = &self.n {
            spec.n = quantity(n);
        }
        if let Some(shift) = &self.shift {
            spec.shift = shift.clone();
        }
        Ok(())
    }

    fn apply_tuner(&self, sc: &mut Scenario) -> Result<()> {
        if !matches!(sc.mode, Mode::Tune | Mode::Race) {
            return Ok(());
        }
        let any = self.phi.is_some()
            || self.kappa.is_some()
            || self.runs.is_some()
            || self.evals.is_some()
            || self.metric.is_some()
            || self.operator.is_some()
            || self.penalty.is_some();
        if !any {
            return Ok(());
        }
        let t = match sc.tuner.as_mut() {
            Some(t) => t,
            None => sc.tuner.insert(TunerSpec {
                phi: None,
                operator: Operator::Pm1,
                metric: Metric::Fitness,
                kappa: quantity(
                    self.kappa
                        .as_deref()
                        .ok_or_else(|| missing("tuner.kappa", "--kappa"))?,
                ),
                runs: Quantity::Int(1),
                evaluations: None,
                penalty: DEFAULT_PENALTY,
            }),
        };
        if let Some(v) = &self.phi {
            t.phi = Some(quantity(v));
        }
        if let Some(v) = &self.kappa {
            t.kappa = quantity(v);
        }
        if let Some(v) = &self.runs {
            t.runs = quantity(v);
        }
        if let Some(v) = &self.evals {
            t.evaluations = Some(quantity(v));
        }
        if let Some(m) = self.metric {
            t.metric = match m {
                MetricArg::F => Metric::Fitness,
                MetricArg::T => Metric::Time,
            };
        }
        if let Some(op) = self.operator {
            t.operator = match op {
                OperatorArg::Pm1 => Operator::Pm1,
                OperatorArg::Pm12 => Operator::Pm12,
            };
        }
        if let Some(p) = self.penalty {
            t.penalty = p;
        }
        Ok(())
    }

    fn apply_sections(&self, sc: &mut Scenario) -> Result<()> {
        match sc.mode {
            Mode::Race => {
                if self.a.is_some() || self.b.is_some() {
                    let cur = sc.race;
                    let a = self
                        .a
                        .or(cur.map(|r| r.a))
                        .ok_or_else(|| missing("race.a", "--a"))?;
                    let b = self
                        .b
                        .or(cur.map(|r| r.b))
                        .ok_or_else(|| missing("race.b", "--b"))?;
                    sc.race = Some(RaceSpec { a, b });
                }
            }
            Mode::Drift => match (sc.drift.as_mut(), &self.k, &self.s) {
                (Some(d), k, s) => {
                    if let Some(k) = k {
                        d.k = quantity(k);
                    }
                    if let Some(s) = s {
                        d.s = quantity(s);
                    }
                }
                (None, Some(k), Some(s)) => {
                    sc.drift = Some(DriftSpec {
                        k: quantity(k),
                        s: quantity(s),
                    })
                }
                (None, None, Some(_)) => return Err(missing("drift.k", "--k")),
                (None, _, None) => {}
            },
            Mode::Table => {
                if let Some(p) = self.periods {
                    sc.table = Some(TableSpec { periods: p });
                }
            }
            Mode::Walk => {
                if let Some(phi) = &self.phi {
                    sc.walk = Some(WalkSpec { phi: quantity(phi) });
                }
            }
            Mode::ExpectedTime => {
                if let Some(k) = &self.k {
                    sc.expected_time = Some(ExpectedTimeSpec {
                        k: Some(quantity(k)),
                    });
                }
            }
            Mode::Tune => {}
        }
        Ok(())
    }
}
