//! Scenario files: a JSON tree with unknown keys rejected.

use bellcorr::{Algebra, Matrix, OptimizerOptions, SamplerOptions, State, StateSpec};
use num_complex::Complex;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Beta,
    Invariant,
    Cluster,
    ChainCurve,
    VerifySuite,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Beta => "beta",
            Task::Invariant => "invariant",
            Task::Cluster => "cluster",
            Task::ChainCurve => "chain_curve",
            Task::VerifySuite => "verify_suite",
        }
    }
}

/// A complex entry as `[re, im]`.
pub type Entry = [f64; 2];
/// Row-major matrix of complex entries.
pub type RawMatrix = Vec<Vec<Entry>>;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    QubitPair,
    QutritPair,
    /// `(D₂ ⊗ 1, 1 ⊗ M₂)`: an abelian side against a full factor.
    DiagonalPair,
    /// Two qubit pairs embedded block-diagonally on `C^8`.
    DirectSum,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetPair {
    pub preset: Preset,
}

/// Algebras generated by explicit matrices on `C^dim`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorPair {
    pub dim: usize,
    pub a: Vec<RawMatrix>,
    pub b: Vec<RawMatrix>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged, expecting = "a pair: {\"preset\": name} or {\"dim\", \"a\", \"b\"}")]
pub enum PairConfig {
    Preset(PresetPair),
    Generators(GeneratorPair),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateConfig {
    Singlet {},
    Werner {
        w: f64,
    },
    Product {
        left: Box<StateConfig>,
        right: Box<StateConfig>,
    },
    Mixture {
        weights: Vec<f64>,
        states: Vec<StateConfig>,
    },
    /// Seed defaults to the scenario seed.
    Random {
        dim: usize,
        rank: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
    TfimGround {
        sites: usize,
        coupling: f64,
        field: f64,
        #[serde(default = "default_chain_tol")]
        tol: f64,
    },
    Matrix {
        rows: RawMatrix,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_sweeps: usize,
    pub tol: f64,
    pub temperature: f64,
    pub step: f64,
    pub max_iterations: usize,
    pub gap_tol: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        let o = OptimizerOptions::default();
        Self {
            restarts: o.restarts,
            max_sweeps: o.max_sweeps,
            tol: o.tol,
            temperature: o.temperature,
            step: o.step,
            max_iterations: o.max_iterations,
            gap_tol: o.gap_tol,
        }
    }
}

impl OptimizerConfig {
    pub fn options(&self, seed: u64) -> OptimizerOptions {
        OptimizerOptions {
            restarts: self.restarts,
            max_sweeps: self.max_sweeps,
            tol: self.tol,
            seed,
            temperature: self.temperature,
            step: self.step,
            max_iterations: self.max_iterations,
            gap_tol: self.gap_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterConfig {
    pub mass_gap: f64,
    pub distances: Vec<f64>,
    /// Clustering constant fed to the bound check; required when a state is given.
    #[serde(default)]
    pub gamma: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_passes")]
    pub refinement_passes: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    pub sites: usize,
    pub coupling: f64,
    pub field: f64,
    pub width: usize,
    pub separations: Vec<usize>,
    #[serde(default = "default_chain_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    /// Werner weights, each checked with `γ = w`.
    #[serde(default)]
    pub werner: Vec<f64>,
    /// Random two-qubit states checked with `γ = 1`.
    #[serde(default)]
    pub random_states: usize,
    #[serde(default = "default_slack")]
    pub slack: f64,
}

fn default_chain_tol() -> f64 {
    1e-10
}

fn default_samples() -> usize {
    SamplerOptions::default().samples
}

fn default_passes() -> usize {
    SamplerOptions::default().refinement_passes
}

fn default_slack() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub task: Task,
    pub seed: u64,
    #[serde(default)]
    pub pair: Option<PairConfig>,
    /// Batch of pairs for the invariant task.
    #[serde(default)]
    pub pairs: Vec<PairConfig>,
    #[serde(default)]
    pub state: Option<StateConfig>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub cluster: Option<ClusterConfig>,
    #[serde(default)]
    pub chain: Option<ChainConfig>,
    #[serde(default)]
    pub verify: Option<VerifyConfig>,
    /// Output directory, overridden by `--out`.
    #[serde(default)]
    pub output: Option<String>,
}

/// Parses and validates a scenario, collecting every field-level problem.
pub fn parse_scenario(text: &[u8]) -> Result<Scenario, CliError> {
    let text = std::str::from_utf8(text).map_err(|e| CliError::Config(vec![format!("not UTF-8: {e}")]))?;
    let s: Scenario = serde_json::from_str(text).map_err(|e| CliError::Config(vec![e.to_string()]))?;
    let errs = s.validate();
    if errs.is_empty() {
        Ok(s)
    } else {
        Err(CliError::Config(errs))
    }
}

impl Scenario {
    fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let need = |errs: &mut Vec<String>, present: bool, field: &str| {
            if !present {
                errs.push(format!("{field}: required for task {}", self.task.name()));
            }
        };
        match self.task {
            Task::Beta => {
                need(&mut errs, self.pair.is_some(), "pair");
                need(&mut errs, self.state.is_some(), "state");
            }
            Task::Invariant => need(&mut errs, self.pair.is_some() || !self.pairs.is_empty(), "pair"),
            Task::Cluster => {
                need(&mut errs, self.cluster.is_some(), "cluster");
                if self.state.is_some() != self.pair.is_some() {
                    errs.push("state, pair: give both or neither".into());
                }
                if self.state.is_some() && self.cluster.as_ref().is_some_and(|c| c.gamma.is_none()) {
                    errs.push("cluster.gamma: required when a state is given".into());
                }
            }
            Task::ChainCurve => need(&mut errs, self.chain.is_some(), "chain"),
            Task::VerifySuite => need(&mut errs, self.verify.is_some(), "verify"),
        }
        if let Some(st) = &self.state {
            validate_state(st, "state", &mut errs);
        }
        let o = &self.optimizer;
        if o.restarts == 0 {
            errs.push("optimizer.restarts: must be at least 1".into());
        }
        for (name, v) in [("tol", o.tol), ("temperature", o.temperature), ("step", o.step)] {
            if !(v > 0.0 && v.is_finite()) {
                errs.push(format!("optimizer.{name}: must be positive"));
            }
        }
        if let Some(c) = &self.cluster {
            if !(c.mass_gap > 0.0 && c.mass_gap.is_finite()) {
                errs.push("cluster.mass_gap: must be positive".into());
            }
            if c.distances.iter().any(|d| !(*d >= 0.0)) {
                errs.push("cluster.distances: must be non-negative".into());
            }
            if let Some(g) = c.gamma {
                if !(0.0..=1.0).contains(&g) {
                    errs.push(format!("cluster.gamma: {g} outside [0, 1]"));
                }
            }
            if c.samples == 0 {
                errs.push("cluster.samples: must be at least 1".into());
            }
        }
        if let Some(c) = &self.chain {
            if c.width == 0 {
                errs.push("chain.width: must be at least 1".into());
            }
            if c.separations.is_empty() {
                errs.push("chain.separations: must not be empty".into());
            }
            if let Some(a) = c.separations.iter().max() {
                if 2 * c.width + a > c.sites {
                    errs.push(format!("chain.separations: separation {a} overflows {} sites", c.sites));
                }
            }
            if !(c.tol > 0.0) {
                errs.push("chain.tol: must be positive".into());
            }
        }
        if let Some(v) = &self.verify {
            if v.werner.iter().any(|w| !(0.0..=1.0).contains(w)) {
                errs.push("verify.werner: weights must lie in [0, 1]".into());
            }
            if !(v.slack >= 0.0) {
                errs.push("verify.slack: must be non-negative".into());
            }
            if v.werner.is_empty() && v.random_states == 0 {
                errs.push("verify: nothing to check".into());
            }
        }
        errs
    }

    pub fn optimizer_options(&self) -> OptimizerOptions {
        self.optimizer.options(self.seed)
    }
}

fn validate_state(st: &StateConfig, path: &str, errs: &mut Vec<String>) {
    match st {
        StateConfig::Werner { w } if !(0.0..=1.0).contains(w) => {
            errs.push(format!("{path}.w: {w} outside [0, 1]"));
        }
        StateConfig::Product { left, right } => {
            validate_state(left, &format!("{path}.left"), errs);
            validate_state(right, &format!("{path}.right"), errs);
        }
        StateConfig::Mixture { weights, states } => {
            if weights.len() != states.len() || weights.is_empty() {
                errs.push(format!("{path}.weights: need one weight per state"));
            }
            if weights.iter().any(|w| *w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
                errs.push(format!("{path}.weights: not on the simplex"));
            }
            for (i, s) in states.iter().enumerate() {
                validate_state(s, &format!("{path}.states[{i}]"), errs);
            }
        }
        StateConfig::Random { dim, rank, .. } if *rank == 0 || rank > dim => {
            errs.push(format!("{path}.rank: need 1 <= rank <= dim"));
        }
        _ => {}
    }
}

fn matrix(raw: &RawMatrix, dim: usize, what: &str) -> Result<Matrix, CliError> {
    if raw.len() != dim || raw.iter().any(|r| r.len() != dim) {
        return Err(CliError::Config(vec![format!("{what}: expected a {dim}x{dim} matrix")]));
    }
    Ok(Matrix::from_fn(dim, dim, |i, j| {
        Complex::new(raw[i][j][0], raw[i][j][1])
    }))
}

impl PairConfig {
    pub fn build(&self) -> Result<(Algebra, Algebra), CliError> {
        match self {
            PairConfig::Preset(PresetPair { preset }) => Ok(match preset {
                Preset::QubitPair => Algebra::matrix_pair(2)?,
                Preset::QutritPair => Algebra::matrix_pair(3)?,
                Preset::DiagonalPair => (
                    Algebra::diagonal(2)?.tensor_identity_right(2)?,
                    Algebra::full(2)?.tensor_identity_left(2)?,
                ),
                Preset::DirectSum => {
                    let q = Algebra::matrix_pair(2)?;
                    bellcorr::direct_sum_pair(&[q.clone(), q])?
                }
            }),
            PairConfig::Generators(GeneratorPair { dim, a, b }) => {
                let ga = a
                    .iter()
                    .enumerate()
                    .map(|(i, m)| matrix(m, *dim, &format!("pair.a[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                let gb = b
                    .iter()
                    .enumerate()
                    .map(|(i, m)| matrix(m, *dim, &format!("pair.b[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((
                    bellcorr::generate_algebra(&ga, *dim)?,
                    bellcorr::generate_algebra(&gb, *dim)?,
                ))
            }
        }
    }
}

impl StateConfig {
    pub fn build(&self, seed: u64) -> Result<State, CliError> {
        let spec = match self {
            StateConfig::Singlet {} => StateSpec::Singlet,
            StateConfig::Werner { w } => StateSpec::Werner { w: *w },
            StateConfig::Product { left, right } => StateSpec::Product(left.build(seed)?, right.build(seed)?),
            StateConfig::Mixture { weights, states } => StateSpec::Mixture {
                weights: weights.clone(),
                states: states.iter().map(|s| s.build(seed)).collect::<Result<_, _>>()?,
            },
            StateConfig::Random { dim, rank, seed: own } => StateSpec::Random {
                seed: own.unwrap_or(seed),
                dim: *dim,
                rank: *rank,
            },
            StateConfig::TfimGround {
                sites,
                coupling,
                field,
                tol,
            } => StateSpec::TfimGround {
                sites: *sites,
                coupling: *coupling,
                field: *field,
                tol: *tol,
            },
            StateConfig::Matrix { rows } => StateSpec::Matrix(matrix(rows, rows.len(), "state.rows")?),
        };
        Ok(bellcorr::make_state(spec)?)
    }
}
