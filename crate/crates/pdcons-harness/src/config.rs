//! JSON experiment configuration: schema, validation, and `--set` overrides.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

/// Top-level experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub graph: GraphSpec,
    pub objective: ObjectiveSpec,
    pub algorithms: Vec<AlgorithmSpec>,
    pub stopping: StoppingSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    QuadraticSweep,
    LogisticCompare,
    Certify,
    SingleRun,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub topology: Topology,
    /// Agent counts; sweeps iterate over all entries, other kinds use the first.
    pub n: Vec<usize>,
    /// Degree for the regular topology.
    #[serde(default = "default_degree")]
    pub k: usize,
    pub seeds: SeedRange,
    /// Explicit edge list for the `edges` topology.
    #[serde(default)]
    pub edges: Option<Vec<(usize, usize)>>,
}

fn default_degree() -> usize {
    4
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    Cycle,
    KRegular,
    Path,
    Complete,
    Edges,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedRange {
    pub start: u64,
    pub count: u64,
}

impl SeedRange {
    pub fn iter(&self) -> impl Iterator<Item = u64> {
        self.start..self.start + self.count
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    /// Random scalar quadratics; coefficient ranges default to the standard
    /// integer ranges `[1, 10^4]` and `[1, 100]`.
    Quadratic {
        #[serde(default = "default_c_range")]
        c_range: (u32, u32),
        #[serde(default = "default_b_range")]
        b_range: (u32, u32),
    },
    /// Regularized logistic regression over a LIBSVM-format file.
    Logistic {
        dataset_path: String,
        #[serde(default = "default_nu")]
        nu: f64,
        /// Optional deterministic subsample size for desk-scale runs.
        #[serde(default)]
        subsample: Option<usize>,
        #[serde(default)]
        subsample_seed: u64,
    },
    /// Regularized logistic regression over a generated dataset, for
    /// environments without the benchmark files.
    SyntheticLogistic {
        points: usize,
        dim: usize,
        seed: u64,
        #[serde(default = "default_nu")]
        nu: f64,
    },
}

fn default_c_range() -> (u32, u32) {
    (1, 10_000)
}

fn default_b_range() -> (u32, u32) {
    (1, 100)
}

fn default_nu() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    pub name: AlgoName,
    /// Primal updates per iteration; one run per entry.
    #[serde(default = "default_t_values")]
    pub t_values: Vec<usize>,
    #[serde(default)]
    pub alpha: AlphaMode,
    #[serde(default)]
    pub beta: BetaMode,
    #[serde(default)]
    pub b_kind: AugmentationKind,
    /// Gradient-norm tolerance of the centralized inner solver.
    #[serde(default = "default_inner_tol")]
    pub inner_tol: f64,
    /// Enforce the dual stepsize upper bound even when the augmentation is a
    /// Laplacian multiple (where the bound is removable).
    #[serde(default = "default_true")]
    pub enforce_beta_bound: bool,
}

fn default_t_values() -> Vec<usize> {
    vec![1]
}

fn default_inner_tol() -> f64 {
    1e-10
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgoName {
    Pd,
    Extra,
    Diging,
    NearDgdPlus,
    Dgd,
    Mm,
}

impl AlgoName {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlgoName::Pd => "pd",
            AlgoName::Extra => "extra",
            AlgoName::Diging => "diging",
            AlgoName::NearDgdPlus => "near_dgd_plus",
            AlgoName::Dgd => "dgd",
            AlgoName::Mm => "mm",
        }
    }
}

/// Primal stepsize selection: the theoretical bound scaled by a safety
/// factor, or an explicit value (the comparison figures were hand-tuned).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlphaMode {
    Theorem {
        #[serde(default = "default_safety")]
        safety: f64,
    },
    Manual {
        value: f64,
    },
}

fn default_safety() -> f64 {
    0.95
}

impl Default for AlphaMode {
    fn default() -> Self {
        AlphaMode::Theorem { safety: default_safety() }
    }
}

/// Dual stepsize selection: equal to the number of primal steps, or manual.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
#[derive(Default)]
pub enum BetaMode {
    #[default]
    TRule,
    Manual { value: f64 },
}


#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AugmentationKind {
    Laplacian,
    #[default]
    BetaLaplacian,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoppingSpec {
    pub epsilon: f64,
    pub max_iters: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_out_dir")]
    pub dir: String,
}

fn default_out_dir() -> String {
    "out".to_string()
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: default_out_dir() }
    }
}

impl ExperimentConfig {
    /// Load a config file, apply `--set key=value` overrides (dotted paths
    /// into the JSON tree), and validate.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| {
            HarnessError::Config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        Self::from_json(&text, overrides)
    }

    pub fn from_json(text: &str, overrides: &[String]) -> Result<Self> {
        let mut tree: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| HarnessError::Config(format!("malformed config JSON: {e}")))?;
        for entry in overrides {
            apply_override(&mut tree, entry)?;
        }
        let cfg: ExperimentConfig = serde_json::from_value(tree)
            .map_err(|e| HarnessError::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.graph.n.is_empty() {
            return Err(HarnessError::Config("graph.n must be nonempty".into()));
        }
        if self.graph.seeds.count == 0 {
            return Err(HarnessError::Config("graph.seeds.count must be positive".into()));
        }
        if !(self.stopping.epsilon > 0.0 && self.stopping.epsilon < 1.0) {
            return Err(HarnessError::Config(format!(
                "stopping.epsilon must lie in (0, 1), got {}",
                self.stopping.epsilon
            )));
        }
        if self.algorithms.is_empty() {
            return Err(HarnessError::Config("algorithms list must be nonempty".into()));
        }
        if self.graph.topology == Topology::Edges && self.graph.edges.is_none() {
            return Err(HarnessError::Config(
                "topology \"edges\" requires graph.edges".into(),
            ));
        }
        if let ObjectiveSpec::Logistic { dataset_path, .. } = &self.objective {
            if !Path::new(dataset_path).exists() {
                return Err(HarnessError::Config(format!(
                    "dataset file not found: {dataset_path}"
                )));
            }
        }
        for alg in &self.algorithms {
            if alg.t_values.is_empty() || alg.t_values.contains(&0) {
                return Err(HarnessError::Config(format!(
                    "{}: t_values must be positive and nonempty",
                    alg.name.as_str()
                )));
            }
        }
        Ok(())
    }

    /// Advisory notes that do not block execution.
    pub fn warnings(&self) -> Vec<String> {
        let mut notes = Vec::new();
        if self.kind == ExperimentKind::QuadraticSweep {
            for &n in &self.graph.n {
                if !(5..=30).contains(&n) {
                    notes.push(format!(
                        "graph size n={n} is outside the usual sweep range [5, 30]"
                    ));
                }
            }
        }
        notes
    }

    /// Canonical JSON echo of the resolved configuration.
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

fn apply_override(tree: &mut serde_json::Value, entry: &str) -> Result<()> {
    let (path, raw_value) = entry.split_once('=').ok_or_else(|| {
        HarnessError::Config(format!("--set expects key=value, got `{entry}`"))
    })?;
    let value: serde_json::Value = serde_json::from_str(raw_value)
        .unwrap_or_else(|_| serde_json::Value::String(raw_value.to_string()));

    let mut node = tree;
    let segments: Vec<&str> = path.split('.').collect();
    for (i, seg) in segments.iter().enumerate() {
        let last = i + 1 == segments.len();
        let next = if let Ok(idx) = seg.parse::<usize>() {
            node.get_mut(idx)
        } else {
            node.get_mut(*seg)
        };
        match next {
            Some(child) if last => {
                *child = value;
                return Ok(());
            }
            Some(child) => node = child,
            None => {
                return Err(HarnessError::Config(format!(
                    "--set path `{path}` does not exist in the config (failed at `{seg}`)"
                )));
            }
        }
    }
    unreachable!("split produced at least one segment")
}
