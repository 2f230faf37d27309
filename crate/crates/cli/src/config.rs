//! Experiment configuration files.
//!
//! A config is a TOML document with flat typed keys plus three optional
//! tables (`graph`, `kernel`, `increment`). Unknown keys are rejected.
//! See the README for the grammar of each experiment.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use typgraph::graph::Graph;
use typgraph::graphon::{Kernel, KernelKind, SmoothKind};
use typgraph::random_graphs::{model_erdos_renyi, sample_graph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Deviation,
    FreedmanTail,
    PercolationGap,
    GraphonSpectrum,
    Quasirandom,
    PerturbationSuite,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Deviation => "deviation",
            Self::FreedmanTail => "freedman-tail",
            Self::PercolationGap => "percolation-gap",
            Self::GraphonSpectrum => "graphon-spectrum",
            Self::Quasirandom => "quasirandom",
            Self::PerturbationSuite => "perturbation-suite",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelChoice {
    ErdosRenyi,
    Percolation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixChoice {
    Adjacency,
    Laplacian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFamily {
    Complete,
    Cycle,
    Path,
    Star,
    ErdosRenyi,
}

/// Deterministic or seeded base graph.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub kind: GraphFamily,
    pub n: usize,
    pub p: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelFamily {
    Constant,
    RankOne,
    Block,
    Gaussian,
    Cosine,
}

/// `constant` uses `value`; `rank-one` is `coef·(xy)^exponent`; `block`
/// takes a square `matrix`; `gaussian` takes `bandwidth`; `cosine` takes
/// `scale`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub kind: KernelFamily,
    pub value: Option<f64>,
    pub coef: Option<f64>,
    pub exponent: Option<f64>,
    pub matrix: Option<Vec<Vec<f64>>>,
    pub bandwidth: Option<f64>,
    pub scale: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IncrementFamily {
    DiagonalRademacher,
    RankOneSign,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncrementSpec {
    pub kind: IncrementFamily,
    pub d: usize,
    pub scale: Option<f64>,
    pub vector_seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub master_seed: u64,
    pub trials: i64,
    pub output_path: Option<PathBuf>,
    pub delta: Option<f64>,
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub model: Option<ModelChoice>,
    pub matrix: Option<MatrixChoice>,
    pub graph: Option<GraphSpec>,
    pub graph_file: Option<PathBuf>,
    pub kernel: Option<KernelSpec>,
    pub leading: Option<usize>,
    pub tolerance: Option<f64>,
    pub increment: Option<IncrementSpec>,
    pub steps: Option<usize>,
    pub thresholds: Option<Vec<f64>>,
    pub slack: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub max_order: Option<usize>,
    pub quad_points: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub key: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: `{}`: {}", self.key, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Parse(String),
    #[error("{}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

pub const DEFAULT_DELTA: f64 = 0.1;
pub const DEFAULT_TOLERANCE: f64 = 0.1;
pub const DEFAULT_SLACK: f64 = 0.1;
pub const DEFAULT_MAX_ORDER: usize = 40;
pub const DEFAULT_QUAD_POINTS: usize = 2000;
pub const DEFAULT_THRESHOLDS: [f64; 5] = [10.0, 20.0, 30.0, 40.0, 50.0];

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Reads a config file. A relative `graph_file` is taken relative to
    /// the directory holding the config.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let mut cfg = Self::from_toml(&text)?;
        if let (Some(file), Some(dir)) = (&cfg.graph_file, path.parent()) {
            if file.is_relative() {
                cfg.graph_file = Some(dir.join(file));
            }
        }
        Ok(cfg)
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(DEFAULT_DELTA)
    }

    pub fn trial_count(&self) -> usize {
        self.trials.max(0) as usize
    }

    /// All problems with the config. Errors block `run`; warnings do not.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut v = Validator::default();
        if self.trials < 1 {
            v.error("trials", format!("must be a positive integer, got {}", self.trials));
        }
        match self.experiment {
            ExperimentKind::Deviation => {
                v.delta(self.delta);
                let model = self.model.unwrap_or(ModelChoice::ErdosRenyi);
                match model {
                    ModelChoice::ErdosRenyi => {
                        v.order("n", self.n, 2);
                        v.open_unit("p", self.p);
                        v.forbid("graph", self.graph.is_some());
                        v.forbid("graph_file", self.graph_file.is_some());
                    }
                    ModelChoice::Percolation => {
                        v.open_unit("p", self.p);
                        v.forbid("n", self.n.is_some());
                        v.base_graph(self);
                    }
                }
                v.forbid_all(self, &["kernel", "leading", "tolerance", "increment", "steps", "thresholds", "slack", "c1", "c2", "max_order", "quad_points"]);
            }
            ExperimentKind::FreedmanTail => {
                match &self.increment {
                    None => v.error("increment", "table is required".into()),
                    Some(inc) => {
                        if inc.d == 0 {
                            v.error("increment.d", "must be >= 1".into());
                        }
                        if let Some(s) = inc.scale {
                            if !(s > 0.0 && s.is_finite()) {
                                v.error("increment.scale", format!("must be positive, got {s}"));
                            }
                        }
                        if inc.kind == IncrementFamily::DiagonalRademacher && inc.vector_seed.is_some() {
                            v.error("increment.vector_seed", "only applies to rank-one-sign".into());
                        }
                    }
                }
                v.order("steps", self.steps, 1);
                if let Some(ts) = &self.thresholds {
                    if ts.is_empty() {
                        v.error("thresholds", "must not be empty".into());
                    }
                    if let Some(t) = ts.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
                        v.error("thresholds", format!("entries must be finite and >= 0, got {t}"));
                    }
                }
                v.forbid_all(self, &["delta", "n", "p", "model", "matrix", "graph", "graph_file", "kernel", "leading", "tolerance", "slack", "c1", "c2", "max_order", "quad_points"]);
            }
            ExperimentKind::PercolationGap => {
                v.delta(self.delta);
                v.open_unit("p", self.p);
                v.base_graph(self);
                for (key, c) in [("c1", self.c1), ("c2", self.c2)] {
                    if let Some(c) = c {
                        if !(c >= 0.0 && c.is_finite()) {
                            v.error(key, format!("must be finite and >= 0, got {c}"));
                        }
                    }
                }
                v.forbid_all(self, &["n", "model", "matrix", "kernel", "leading", "tolerance", "increment", "steps", "thresholds", "slack", "max_order", "quad_points"]);
            }
            ExperimentKind::GraphonSpectrum => {
                v.order("n", self.n, 2);
                let p = v.half_open_unit("p", self.p);
                match &self.kernel {
                    None => v.error("kernel", "table is required".into()),
                    Some(spec) => match spec.build() {
                        Err(d) => v.push(d),
                        Ok(k) => {
                            if let Some(p) = p {
                                if p * k.sup_bound() > 1.0 {
                                    v.warning(
                                        "p",
                                        format!(
                                            "p = {p} exceeds 1/K = {}; the approximation bound assumes p <= 1/K and \
                                             edge probabilities will be clipped at 1",
                                            1.0 / k.sup_bound()
                                        ),
                                    );
                                }
                            }
                        }
                    },
                }
                if let Some(0) = self.leading {
                    v.error("leading", "must be >= 1".into());
                }
                v.positive("tolerance", self.tolerance);
                v.forbid_all(self, &["delta", "model", "matrix", "graph", "graph_file", "increment", "steps", "thresholds", "slack", "c1", "c2", "max_order", "quad_points"]);
            }
            ExperimentKind::Quasirandom => {
                v.order("n", self.n, 2);
                v.open_unit("p", self.p);
                if let Some(s) = self.slack {
                    if !(s >= 0.0 && s.is_finite()) {
                        v.error("slack", format!("must be finite and >= 0, got {s}"));
                    }
                }
                v.forbid_all(self, &["delta", "model", "matrix", "graph", "graph_file", "kernel", "leading", "tolerance", "increment", "steps", "thresholds", "c1", "c2", "max_order", "quad_points"]);
            }
            ExperimentKind::PerturbationSuite => {
                if let Some(m) = self.max_order {
                    if !(2..=60).contains(&m) {
                        v.error("max_order", format!("must lie in [2, 60], got {m}"));
                    }
                }
                if let Some(q) = self.quad_points {
                    if q < 32 {
                        v.error("quad_points", format!("must be >= 32, got {q}"));
                    }
                }
                v.forbid_all(self, &["delta", "n", "p", "model", "matrix", "graph", "graph_file", "kernel", "leading", "tolerance", "increment", "steps", "thresholds", "slack", "c1", "c2"]);
            }
        }
        v.out
    }

    fn present(&self, key: &str) -> bool {
        match key {
            "delta" => self.delta.is_some(),
            "n" => self.n.is_some(),
            "p" => self.p.is_some(),
            "model" => self.model.is_some(),
            "matrix" => self.matrix.is_some(),
            "graph" => self.graph.is_some(),
            "graph_file" => self.graph_file.is_some(),
            "kernel" => self.kernel.is_some(),
            "leading" => self.leading.is_some(),
            "tolerance" => self.tolerance.is_some(),
            "increment" => self.increment.is_some(),
            "steps" => self.steps.is_some(),
            "thresholds" => self.thresholds.is_some(),
            "slack" => self.slack.is_some(),
            "c1" => self.c1.is_some(),
            "c2" => self.c2.is_some(),
            "max_order" => self.max_order.is_some(),
            "quad_points" => self.quad_points.is_some(),
            other => unreachable!("unknown key {other}"),
        }
    }

    /// Base graph from `graph` or `graph_file`. Call only on a config
    /// without validation errors.
    pub fn base_graph(&self) -> Result<Graph, ConfigError> {
        if let Some(path) = &self.graph_file {
            let file = std::fs::File::open(path)
                .map_err(|source| ConfigError::Io { path: path.clone(), source })?;
            return Graph::read_from(std::io::BufReader::new(file)).map_err(|e| {
                ConfigError::Invalid(vec![Diagnostic {
                    severity: Severity::Error,
                    key: "graph_file".into(),
                    message: format!("{}: {e}", path.display()),
                }])
            });
        }
        let spec = self.graph.as_ref().expect("validated config has a base graph");
        Ok(match spec.kind {
            GraphFamily::Complete => Graph::complete(spec.n),
            GraphFamily::Cycle => Graph::cycle(spec.n),
            GraphFamily::Path => Graph::path(spec.n),
            GraphFamily::Star => Graph::star(spec.n),
            GraphFamily::ErdosRenyi => {
                let model = model_erdos_renyi(spec.n, spec.p.expect("validated")).expect("validated");
                sample_graph(&model, spec.seed.unwrap_or(0))
            }
        })
    }
}

impl KernelSpec {
    pub fn build(&self) -> Result<Kernel, Diagnostic> {
        let err = |key: &str, message: String| Diagnostic { severity: Severity::Error, key: format!("kernel.{key}"), message };
        let need = |key: &str, v: Option<f64>| v.ok_or_else(|| err(key, "is required for this kernel kind".into()));
        let allowed: &[&str] = match self.kind {
            KernelFamily::Constant => &["value"],
            KernelFamily::RankOne => &["coef", "exponent"],
            KernelFamily::Block => &["matrix"],
            KernelFamily::Gaussian => &["bandwidth"],
            KernelFamily::Cosine => &["scale"],
        };
        let set = [
            ("value", self.value.is_some()),
            ("coef", self.coef.is_some()),
            ("exponent", self.exponent.is_some()),
            ("matrix", self.matrix.is_some()),
            ("bandwidth", self.bandwidth.is_some()),
            ("scale", self.scale.is_some()),
        ];
        if let Some((key, _)) = set.iter().find(|(k, on)| *on && !allowed.contains(k)) {
            return Err(err(key, "does not apply to this kernel kind".into()));
        }
        let kind = match self.kind {
            KernelFamily::Constant => KernelKind::Constant(need("value", self.value)?),
            KernelFamily::RankOne => {
                KernelKind::RankOneProduct { coef: need("coef", self.coef)?, exponent: self.exponent.unwrap_or(1.0) }
            }
            KernelFamily::Block => KernelKind::Block(
                self.matrix.clone().ok_or_else(|| err("matrix", "is required for this kernel kind".into()))?,
            ),
            KernelFamily::Gaussian => KernelKind::Smooth(SmoothKind::Gaussian { bandwidth: need("bandwidth", self.bandwidth)? }),
            KernelFamily::Cosine => KernelKind::Smooth(SmoothKind::Cosine { scale: self.scale.unwrap_or(1.0) }),
        };
        Kernel::new(kind).map_err(|e| err(allowed[0], e.to_string()))
    }
}

#[derive(Default)]
struct Validator {
    out: Vec<Diagnostic>,
}

impl Validator {
    fn push(&mut self, d: Diagnostic) {
        self.out.push(d);
    }

    fn error(&mut self, key: &str, message: String) {
        self.push(Diagnostic { severity: Severity::Error, key: key.into(), message });
    }

    fn warning(&mut self, key: &str, message: String) {
        self.push(Diagnostic { severity: Severity::Warning, key: key.into(), message });
    }

    fn forbid(&mut self, key: &str, present: bool) {
        if present {
            self.error(key, "does not apply to this experiment".into());
        }
    }

    fn forbid_all(&mut self, cfg: &ExperimentConfig, keys: &[&str]) {
        for key in keys {
            self.forbid(key, cfg.present(key));
        }
    }

    fn order(&mut self, key: &str, n: Option<usize>, min: usize) {
        match n {
            None => self.error(key, "is required".into()),
            Some(n) if n < min => self.error(key, format!("must be >= {min}, got {n}")),
            _ => {}
        }
    }

    fn open_unit(&mut self, key: &str, p: Option<f64>) -> Option<f64> {
        match p {
            None => self.error(key, "is required".into()),
            Some(p) if !(p > 0.0 && p < 1.0) => self.error(key, format!("must lie in (0, 1), got {p}")),
            Some(p) => return Some(p),
        }
        None
    }

    fn half_open_unit(&mut self, key: &str, p: Option<f64>) -> Option<f64> {
        match p {
            None => self.error(key, "is required".into()),
            Some(p) if !(p > 0.0 && p <= 1.0) => self.error(key, format!("must lie in (0, 1], got {p}")),
            Some(p) => return Some(p),
        }
        None
    }

    fn positive(&mut self, key: &str, x: Option<f64>) {
        if let Some(x) = x {
            if !(x > 0.0 && x.is_finite()) {
                self.error(key, format!("must be positive, got {x}"));
            }
        }
    }

    fn delta(&mut self, delta: Option<f64>) {
        if let Some(d) = delta {
            if !(d > 0.0 && d <= 0.5) {
                self.error(
                    "delta",
                    format!("must lie in (0, 1/2], got {d}; the concentration bounds hold only for delta <= 1/2"),
                );
            }
        }
    }

    fn base_graph(&mut self, cfg: &ExperimentConfig) {
        match (&cfg.graph, &cfg.graph_file) {
            (None, None) => self.error("graph", "a `graph` table or a `graph_file` is required".into()),
            (Some(_), Some(_)) => self.error("graph_file", "give either `graph` or `graph_file`, not both".into()),
            (Some(g), None) => {
                if g.n < 3 {
                    self.error("graph.n", format!("must be >= 3, got {}", g.n));
                }
                match g.kind {
                    GraphFamily::ErdosRenyi => {
                        self.open_unit("graph.p", g.p);
                    }
                    _ => {
                        self.forbid("graph.p", g.p.is_some());
                        self.forbid("graph.seed", g.seed.is_some());
                    }
                }
            }
            (None, Some(_)) => {}
        }
    }
}
