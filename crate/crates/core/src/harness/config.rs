//! Experiment configuration: JSON schema, validation and content hash.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::circuit::InitialState;
use crate::error::{Error, Result};
use crate::scaling::NU_PERCOLATION;
use crate::zx::Schedule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    MiScan,
    PercScan,
    PhaseDiagram,
    Slc,
    DistanceStats,
    Collapse,
    BoundaryFit,
}

impl Experiment {
    pub const ALL: [Experiment; 7] = [
        Experiment::MiScan,
        Experiment::PercScan,
        Experiment::PhaseDiagram,
        Experiment::Slc,
        Experiment::DistanceStats,
        Experiment::Collapse,
        Experiment::BoundaryFit,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Experiment::MiScan => "mi_scan",
            Experiment::PercScan => "perc_scan",
            Experiment::PhaseDiagram => "phase_diagram",
            Experiment::Slc => "slc",
            Experiment::DistanceStats => "distance_stats",
            Experiment::Collapse => "collapse",
            Experiment::BoundaryFit => "boundary_fit",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == name || e.name().replace('_', "-") == name)
    }

    /// Whether the experiment measures I₂, which needs `N` divisible by 3.
    pub fn uses_mutual_information(&self) -> bool {
        matches!(
            self,
            Experiment::MiScan | Experiment::PhaseDiagram | Experiment::Collapse | Experiment::BoundaryFit
        )
    }
}

/// A full experiment description. Everything that can change a data byte
/// enters [`ExperimentConfig::hash`]; `output_dir` and `workers` do not.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub p_grid: Vec<f64>,
    pub r_grid: Vec<f64>,
    pub n_list: Vec<usize>,
    pub n_realizations: usize,
    pub master_seed: u64,
    pub output_dir: PathBuf,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    /// Circuit depth in full layers per qubit.
    pub depth_factor: usize,
    pub initial_state: InitialState,
    /// Late-window fraction for distance statistics.
    pub window: f64,
    pub nu: f64,
    /// Two-sided confidence level parameter of the extrapolation.
    pub alpha: f64,
    pub schedule: Schedule,
    /// Exponents compared by the `collapse` experiment.
    pub collapse_nus: Vec<f64>,
    /// `(p, r)` points whose sampled circuits `phase_diagram` dumps.
    pub marked_points: Vec<(f64, f64)>,
}

const FIELDS: [&str; 16] = [
    "experiment",
    "p_grid",
    "r_grid",
    "n_list",
    "n_realizations",
    "master_seed",
    "output_dir",
    "workers",
    "depth_factor",
    "initial_state",
    "window",
    "nu",
    "alpha",
    "schedule",
    "collapse_nus",
    "marked_points",
];

fn bad(field: &str, message: impl Into<String>) -> Error {
    Error::config(field, message)
}

fn real(field: &str, v: &Value) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| bad(field, format!("expected a finite number, got {v}")))
}

fn count(field: &str, v: &Value) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| bad(field, format!("expected a non-negative integer, got {v}")))
}

fn list<'a>(field: &str, v: &'a Value) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| bad(field, "expected an array"))
}

fn reals(field: &str, v: &Value) -> Result<Vec<f64>> {
    list(field, v)?.iter().map(|x| real(field, x)).collect()
}

fn named<T: for<'de> Deserialize<'de>>(field: &str, v: &Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| bad(field, e.to_string()))
}

impl ExperimentConfig {
    /// Defaults for everything but the grids.
    pub fn new(experiment: Experiment, p_grid: Vec<f64>, r_grid: Vec<f64>, n_list: Vec<usize>, n_realizations: usize) -> Self {
        ExperimentConfig {
            experiment,
            p_grid,
            r_grid,
            n_list,
            n_realizations,
            master_seed: 0,
            output_dir: PathBuf::from("out"),
            workers: 0,
            depth_factor: 4,
            initial_state: InitialState::BellPairs,
            window: 0.25,
            nu: NU_PERCOLATION,
            alpha: 0.05,
            schedule: Schedule::Parallel,
            collapse_nus: vec![0.8, NU_PERCOLATION, 2.0],
            marked_points: vec![(0.15, 0.1), (0.7, 0.8), (0.95, 0.5)],
        }
    }

    /// Parses and validates a JSON config. `experiment` may be omitted when
    /// `default_experiment` supplies it; if both are present they must agree.
    pub fn from_json(text: &str, default_experiment: Option<Experiment>) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| bad("$", e.to_string()))?;
        Self::from_value(&value, default_experiment)
    }

    pub fn from_value(value: &Value, default_experiment: Option<Experiment>) -> Result<Self> {
        let obj: &Map<String, Value> = value.as_object().ok_or_else(|| bad("$", "expected a JSON object"))?;
        if let Some(unknown) = obj.keys().find(|k| !FIELDS.contains(&k.as_str())) {
            return Err(bad(unknown, "unknown field"));
        }
        let experiment = match (obj.get("experiment"), default_experiment) {
            (Some(v), default) => {
                let name = v.as_str().ok_or_else(|| bad("experiment", "expected a string"))?;
                let e = Experiment::from_name(name).ok_or_else(|| bad("experiment", format!("unknown experiment `{name}`")))?;
                if let Some(d) = default.filter(|&d| d != e) {
                    return Err(bad("experiment", format!("config names `{}` but `{}` was requested", e.name(), d.name())));
                }
                e
            }
            (None, Some(d)) => d,
            (None, None) => return Err(bad("experiment", "missing field")),
        };
        let required = |k: &str| obj.get(k).ok_or_else(|| bad(k, "missing field"));
        let n_list = list("n_list", required("n_list")?)?
            .iter()
            .map(|v| count("n_list", v).map(|n| n as usize))
            .collect::<Result<Vec<_>>>()?;
        let mut cfg = ExperimentConfig::new(
            experiment,
            reals("p_grid", required("p_grid")?)?,
            reals("r_grid", required("r_grid")?)?,
            n_list,
            count("n_realizations", required("n_realizations")?)? as usize,
        );
        for (k, v) in obj {
            match k.as_str() {
                "master_seed" => cfg.master_seed = count(k, v)?,
                "output_dir" => cfg.output_dir = PathBuf::from(v.as_str().ok_or_else(|| bad(k, "expected a string"))?),
                "workers" => cfg.workers = count(k, v)? as usize,
                "depth_factor" => cfg.depth_factor = count(k, v)? as usize,
                "initial_state" => cfg.initial_state = named(k, v)?,
                "window" => cfg.window = real(k, v)?,
                "nu" => cfg.nu = real(k, v)?,
                "alpha" => cfg.alpha = real(k, v)?,
                "schedule" => cfg.schedule = named(k, v)?,
                "collapse_nus" => cfg.collapse_nus = reals(k, v)?,
                "marked_points" => {
                    cfg.marked_points = list(k, v)?
                        .iter()
                        .map(|pt| match reals(k, pt)?.as_slice() {
                            &[p, r] => Ok((p, r)),
                            _ => Err(bad(k, "each point is [p, r]")),
                        })
                        .collect::<Result<Vec<_>>>()?
                }
                _ => {}
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let probabilities = |field: &str, xs: &[f64]| -> Result<()> {
            if xs.is_empty() {
                return Err(bad(field, "grid is empty"));
            }
            if let Some(x) = xs.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                return Err(bad(field, format!("{x} is not a probability")));
            }
            if xs.windows(2).any(|w| w[0] >= w[1]) {
                return Err(bad(field, "grid must be strictly increasing"));
            }
            Ok(())
        };
        probabilities("p_grid", &self.p_grid)?;
        probabilities("r_grid", &self.r_grid)?;
        if self.n_list.is_empty() {
            return Err(bad("n_list", "list is empty"));
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(bad("n_list", "sizes must be strictly increasing"));
        }
        let step = if self.experiment.uses_mutual_information() { 6 } else { 2 };
        if let Some(n) = self.n_list.iter().find(|&&n| n < 2 || n % step != 0) {
            return Err(bad("n_list", format!("N = {n} must be a positive multiple of {step}")));
        }
        if self.n_realizations < 2 {
            return Err(bad("n_realizations", "need at least 2 realizations"));
        }
        if self.depth_factor == 0 {
            return Err(bad("depth_factor", "must be positive"));
        }
        if !(self.window > 0.0 && self.window <= 1.0) {
            return Err(bad("window", "must lie in (0, 1]"));
        }
        if !(self.nu > 0.0) {
            return Err(bad("nu", "must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(bad("alpha", "must lie in (0, 1)"));
        }
        if self.collapse_nus.is_empty() || self.collapse_nus.iter().any(|&v| !(v > 0.0)) {
            return Err(bad("collapse_nus", "need positive exponents"));
        }
        if self.marked_points.iter().any(|&(p, r)| !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&r)) {
            return Err(bad("marked_points", "points must be probabilities"));
        }
        Ok(())
    }

    /// The fields that determine the data, as canonical JSON.
    pub fn canonical_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        let obj = v.as_object_mut().expect("object");
        obj.remove("output_dir");
        obj.remove("workers");
        serde_json::to_string(&v).expect("config serializes")
    }

    /// SHA-256 of [`canonical_json`](Self::canonical_json), hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    pub fn depth_for(&self, n: usize) -> usize {
        self.depth_factor * n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"experiment": "perc_scan", "p_grid": [0.1, 0.2], "r_grid": [0.1], "n_list": [8, 16], "n_realizations": 10}"#;

    fn field_of(e: Error) -> String {
        match e {
            Error::Config { field, .. } => field,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::from_json(MINIMAL, None).unwrap();
        assert_eq!(c.experiment, Experiment::PercScan);
        assert_eq!(c.depth_for(8), 32);
        assert_eq!(c.window, 0.25);
        assert_eq!(c.master_seed, 0);
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            (r#"{"experiment": "perc_scan", "p_grid": [], "r_grid": [0.1], "n_list": [8], "n_realizations": 10}"#, "p_grid"),
            (r#"{"experiment": "perc_scan", "p_grid": [0.1], "r_grid": [1.5], "n_list": [8], "n_realizations": 10}"#, "r_grid"),
            (r#"{"experiment": "mi_scan", "p_grid": [0.1], "r_grid": [0.1], "n_list": [8], "n_realizations": 10}"#, "n_list"),
            (r#"{"experiment": "perc_scan", "p_grid": [0.1], "r_grid": [0.1], "n_list": [7], "n_realizations": 10}"#, "n_list"),
            (r#"{"experiment": "perc_scan", "p_grid": [0.1], "r_grid": [0.1], "n_list": [8], "n_realizations": 1}"#, "n_realizations"),
            (r#"{"experiment": "perc_scan", "p_grid": [0.1], "r_grid": [0.1], "n_list": [8]}"#, "n_realizations"),
            (r#"{"experiment": "nope", "p_grid": [0.1], "r_grid": [0.1], "n_list": [8], "n_realizations": 4}"#, "experiment"),
            (r#"{"experiment": "slc", "p_grid": [0.1], "r_grid": [0.1], "n_list": [8], "n_realizations": 4, "colour": 1}"#, "colour"),
            (r#"{"experiment": "slc", "p_grid": [0.1], "r_grid": [0.1], "n_list": [8], "n_realizations": 4, "schedule": "random"}"#, "schedule"),
            (r#"{"experiment": "slc", "p_grid": [0.1], "r_grid": [0.1], "n_list": [8], "n_realizations": 4, "window": 0}"#, "window"),
            (r#"[1, 2]"#, "$"),
        ];
        for (text, field) in cases {
            assert_eq!(field_of(ExperimentConfig::from_json(text, None).unwrap_err()), field, "{text}");
        }
        let e = ExperimentConfig::from_json(MINIMAL, Some(Experiment::Slc)).unwrap_err();
        assert_eq!(field_of(e), "experiment");
    }

    #[test]
    fn hash_ignores_placement_only() {
        let a = ExperimentConfig::from_json(MINIMAL, None).unwrap();
        let mut b = a.clone();
        b.workers = 7;
        b.output_dir = PathBuf::from("elsewhere");
        assert_eq!(a.hash(), b.hash());
        b.master_seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
