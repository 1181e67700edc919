//! Experiment configuration files.
//!
//! ```json
//! {
//!   "problem": {"family": "matrix_game", "params": {"d": 100, "kappa": 1.0}, "seed": 0},
//!   "solvers": [{"algorithm": "PF_NE_EG", "eta0": 0.5}, {"algorithm": "EG_FIXED"}],
//!   "metrics": ["eg", "gap"],
//!   "out_dir": "results/matrix_game"
//! }
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use thiserror::Error;

use crate::config::{Algorithm, LambdaSchedule, MetricSet, SolverConfig, StopMetric};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema errors:\n  {}", .0.join("\n  "))]
    Schema(Vec<String>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    MatrixGame,
    Lasso,
    Fairness,
    Mesp,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::MatrixGame, Family::Lasso, Family::Fairness, Family::Mesp];

    pub fn name(self) -> &'static str {
        match self {
            Family::MatrixGame => "matrix_game",
            Family::Lasso => "lasso",
            Family::Fairness => "fairness",
            Family::Mesp => "mesp",
        }
    }

    /// Parameter names with their defaults.
    pub fn params(self) -> &'static [(&'static str, Value)] {
        // Values are built lazily since `Value` is not const-constructible.
        use std::sync::OnceLock;
        static TABLE: OnceLock<[Vec<(&'static str, Value)>; 4]> = OnceLock::new();
        let table = TABLE.get_or_init(|| {
            [
                vec![("d", 100.into()), ("kappa", 1.0.into()), ("file", Value::Null)],
                vec![
                    ("m", 250.into()),
                    ("n", 1000.into()),
                    ("sparsity_frac", 0.5.into()),
                    ("sigma", 0.01.into()),
                    ("lambda", 1.0.into()),
                ],
                vec![
                    ("m", 10.into()),
                    ("n", 200.into()),
                    ("d", 100.into()),
                    ("fairness_sign_paper", false.into()),
                ],
                vec![("d", 20.into()), ("s", 10.into()), ("file", Value::Null)],
            ]
        });
        &table[self as usize]
    }

    pub fn has_gap_oracle(self) -> bool {
        self == Family::MatrixGame
    }

    /// Gap for matrix games, the natural residual otherwise.
    pub fn stop_metric(self) -> StopMetric {
        if self.has_gap_oracle() {
            StopMetric::Gap
        } else {
            StopMetric::NaturalResidual
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub family: Family,
    /// Every parameter of the family, defaults filled in. `file` is `Null`
    /// unless given.
    pub params: Map<String, Value>,
    pub seed: u64,
}

impl ProblemSpec {
    pub fn usize(&self, key: &str) -> usize {
        self.params[key].as_u64().expect("validated") as usize
    }

    pub fn f64(&self, key: &str) -> f64 {
        self.params[key].as_f64().expect("validated")
    }

    pub fn bool(&self, key: &str) -> bool {
        self.params[key].as_bool().expect("validated")
    }

    pub fn file(&self) -> Option<&str> {
        self.params.get("file").and_then(Value::as_str)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverSpec {
    /// Used in file names and the summary.
    pub label: String,
    /// `eta0` holds a placeholder when [`SolverSpec::eta0_given`] is false;
    /// the harness fills in the family default.
    pub config: SolverConfig,
    pub eta0_given: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub solvers: Vec<SolverSpec>,
    /// `eg` is always recorded; this selects the optional columns.
    pub metrics: MetricSet,
    pub out_dir: PathBuf,
    pub workers: Option<usize>,
}

const TOP_KEYS: [&str; 5] = ["problem", "solvers", "metrics", "out_dir", "workers"];
const PROBLEM_KEYS: [&str; 3] = ["family", "params", "seed"];
const SOLVER_KEYS: [&str; 10] = [
    "algorithm",
    "label",
    "eta0",
    "theta",
    "rho",
    "lambda_schedule",
    "max_iter",
    "residual_tol",
    "stationarity_tol",
    "bt_increase_trick",
];
const METRICS: [&str; 5] = ["eg", "nat", "tan", "gap", "dist"];

pub fn parse_config(path: impl AsRef<Path>) -> Result<ExperimentConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let root: Value = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut v = Violations::default();
    let Some(obj) = root.as_object() else {
        return Err(ConfigError::Schema(vec!["top level must be an object".into()]));
    };
    v.unknown_keys("", obj, &TOP_KEYS);

    let problem = match obj.get("problem") {
        Some(p) => parse_problem(p, &mut v),
        None => {
            v.push("problem", "missing required key");
            None
        }
    };
    let solvers = match obj.get("solvers") {
        Some(Value::Array(list)) if list.is_empty() => {
            v.push("solvers", "at least one solver is required");
            Vec::new()
        }
        Some(Value::Array(list)) => list
            .iter()
            .enumerate()
            .filter_map(|(i, s)| parse_solver(i, s, &mut v))
            .collect(),
        Some(_) => {
            v.push("solvers", "must be an array");
            Vec::new()
        }
        None => {
            v.push("solvers", "missing required key");
            Vec::new()
        }
    };
    let mut metrics = MetricSet::default();
    match obj.get("metrics") {
        None => {
            metrics.nat = true;
            metrics.gap = problem.as_ref().is_some_and(|p| p.family.has_gap_oracle());
        }
        Some(Value::Array(list)) => {
            for (i, m) in list.iter().enumerate() {
                match m.as_str() {
                    Some("eg") => {}
                    Some("nat") => metrics.nat = true,
                    Some("tan") => metrics.tan = true,
                    Some("gap") => metrics.gap = true,
                    Some("dist") => metrics.dist = true,
                    _ => v.push(
                        &format!("metrics[{i}]"),
                        &format!("must be one of {}", METRICS.join(", ")),
                    ),
                }
            }
            if metrics.gap && problem.as_ref().is_some_and(|p| !p.family.has_gap_oracle()) {
                v.push("metrics", "'gap' requires a problem with a gap oracle (matrix_game)");
            }
        }
        Some(_) => v.push("metrics", "must be an array of strings"),
    }
    let out_dir = match obj.get("out_dir") {
        Some(Value::String(s)) if !s.is_empty() => Some(PathBuf::from(s)),
        Some(_) => {
            v.push("out_dir", "must be a non-empty string");
            None
        }
        None => {
            v.push("out_dir", "missing required key");
            None
        }
    };
    let workers = match obj.get("workers") {
        None => None,
        Some(w) => match w.as_u64() {
            Some(n) if n >= 1 => Some(n as usize),
            _ => {
                v.push("workers", "must be a positive integer");
                None
            }
        },
    };
    let mut solvers = solvers;
    dedupe_labels(&mut solvers);
    match (v.0.is_empty(), problem, out_dir) {
        (true, Some(problem), Some(out_dir)) => Ok(ExperimentConfig {
            problem,
            solvers,
            metrics,
            out_dir,
            workers,
        }),
        _ => Err(ConfigError::Schema(v.0)),
    }
}

#[derive(Default)]
struct Violations(Vec<String>);

impl Violations {
    fn push(&mut self, key: &str, msg: &str) {
        self.0.push(format!("{key}: {msg}"));
    }

    fn unknown_keys(&mut self, prefix: &str, obj: &Map<String, Value>, allowed: &[&str]) {
        for k in obj.keys() {
            if !allowed.contains(&k.as_str()) {
                self.push(
                    &format!("{prefix}{k}"),
                    &format!("unknown key; expected one of {}", allowed.join(", ")),
                );
            }
        }
    }
}

fn parse_problem(p: &Value, v: &mut Violations) -> Option<ProblemSpec> {
    let Some(obj) = p.as_object() else {
        v.push("problem", "must be an object");
        return None;
    };
    v.unknown_keys("problem.", obj, &PROBLEM_KEYS);
    let family = match obj.get("family").and_then(Value::as_str) {
        Some(name) => Family::ALL.into_iter().find(|f| f.name() == name).or_else(|| {
            let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
            v.push(
                "problem.family",
                &format!("unknown family '{name}'; valid names are {}", names.join(", ")),
            );
            None
        }),
        None => {
            v.push("problem.family", "missing or not a string");
            None
        }
    };
    let seed = match obj.get("seed") {
        None => 0,
        Some(s) => s.as_u64().unwrap_or_else(|| {
            v.push("problem.seed", "must be a nonnegative integer");
            0
        }),
    };
    let family = family?;
    let given = match obj.get("params") {
        None => Map::new(),
        Some(Value::Object(m)) => m.clone(),
        Some(_) => {
            v.push("problem.params", "must be an object");
            Map::new()
        }
    };
    let defaults = family.params();
    let mut params = Map::new();
    for k in given.keys() {
        if !defaults.iter().any(|(name, _)| name == k) {
            let names: Vec<_> = defaults.iter().map(|(n, _)| *n).collect();
            v.push(
                &format!("problem.params.{k}"),
                &format!("unknown parameter for {family}; expected one of {}", names.join(", ")),
            );
        }
    }
    for (name, default) in defaults {
        let key = format!("problem.params.{name}");
        let val = given.get(*name).cloned().unwrap_or_else(|| default.clone());
        let ok = match default {
            Value::Null => val.is_null() || val.is_string(),
            Value::Bool(_) => val.is_boolean(),
            Value::Number(n) if n.is_u64() => val.as_u64().is_some_and(|x| x >= 1),
            Value::Number(_) => val.as_f64().is_some_and(|x| x.is_finite()),
            _ => true,
        };
        if !ok {
            let what = match default {
                Value::Null => "a file path",
                Value::Bool(_) => "a boolean",
                Value::Number(n) if n.is_u64() => "a positive integer",
                _ => "a finite number",
            };
            v.push(&key, &format!("must be {what}"));
        }
        params.insert(name.to_string(), val);
    }
    Some(ProblemSpec { family, params, seed })
}

fn parse_solver(i: usize, s: &Value, v: &mut Violations) -> Option<SolverSpec> {
    let at = |k: &str| format!("solvers[{i}].{k}");
    let Some(obj) = s.as_object() else {
        v.push(&format!("solvers[{i}]"), "must be an object");
        return None;
    };
    v.unknown_keys(&format!("solvers[{i}]."), obj, &SOLVER_KEYS);
    let before = v.0.len();
    let algorithm = match obj.get("algorithm").and_then(Value::as_str) {
        Some(name) => match name.parse::<Algorithm>() {
            Ok(a) => Some(a),
            Err(e) => {
                v.push(
                    &at("algorithm"),
                    &e.to_string().replace("invalid solver configuration: ", ""),
                );
                None
            }
        },
        None => {
            v.push(&at("algorithm"), "missing or not a string");
            None
        }
    };
    let mut cfg = SolverConfig::new(algorithm.unwrap_or(Algorithm::PfNeEg), 1.0);
    let num = |k: &str, v: &mut Violations| -> Option<f64> {
        let x = obj.get(k)?;
        let n = x.as_f64();
        if n.is_none() {
            v.push(&at(k), "must be a number");
        }
        n
    };
    let eta0 = num("eta0", v);
    if let Some(e) = eta0 {
        if !(e > 0.0) {
            v.push(&at("eta0"), "eta0 must be positive");
        }
        cfg.eta0 = e;
    }
    if let Some(t) = num("theta", v) {
        if !(t > 0.0 && t < 1.0) {
            v.push(&at("theta"), "theta must lie in (0,1)");
        }
        cfg.theta = t;
    }
    if let Some(r) = num("rho", v) {
        if !(r > 0.0 && r < 1.0) {
            v.push(&at("rho"), "rho must lie in (0,1)");
        }
        cfg.rho = r;
    }
    if let Some(t) = num("residual_tol", v) {
        if !(t >= 0.0) {
            v.push(&at("residual_tol"), "must be nonnegative");
        }
        cfg.residual_tol = t;
    }
    if let Some(t) = num("stationarity_tol", v) {
        if !(t >= 0.0) {
            v.push(&at("stationarity_tol"), "must be nonnegative");
        }
        cfg.stationarity_tol = t;
    }
    if let Some(m) = obj.get("max_iter") {
        match m.as_u64() {
            Some(n) if n >= 1 => cfg.max_iter = n as usize,
            _ => v.push(&at("max_iter"), "must be a positive integer"),
        }
    }
    if let Some(l) = obj.get("lambda_schedule") {
        match l.as_str().map(str::parse::<LambdaSchedule>) {
            Some(Ok(s)) => cfg.lambda_schedule = s,
            _ => v.push(&at("lambda_schedule"), "must be CONSTANT_ONE or LOG_DECAY"),
        }
    }
    if let Some(b) = obj.get("bt_increase_trick") {
        match b.as_bool() {
            Some(b) => cfg.bt_increase_trick = b,
            None => v.push(&at("bt_increase_trick"), "must be a boolean"),
        }
    }
    let label = match obj.get("label") {
        None => cfg.algorithm.name().to_ascii_lowercase(),
        Some(Value::String(s))
            if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || "_-.".contains(c)) =>
        {
            s.clone()
        }
        Some(_) => {
            v.push(
                &at("label"),
                "must be a non-empty string of letters, digits, '_', '-' or '.'",
            );
            String::new()
        }
    };
    (v.0.len() == before && algorithm.is_some()).then_some(SolverSpec {
        label,
        config: cfg,
        eta0_given: eta0.is_some(),
    })
}

fn dedupe_labels(solvers: &mut [SolverSpec]) {
    let labels: Vec<String> = solvers.iter().map(|s| s.label.clone()).collect();
    for (i, s) in solvers.iter_mut().enumerate() {
        if labels.iter().filter(|l| **l == s.label).count() > 1 {
            s.label = format!("{}_{i}", s.label);
        }
    }
}
