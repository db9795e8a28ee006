use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_circuit, sample_circuit, InitialState, ModelParams};
use crate::error::{Error, Result};
use crate::seeds;

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStat {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl EnsembleStat {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let n = samples.len();
        if n <= 1 {
            return Err(Error::invalid(format!("need at least 2 samples, got {n}")));
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Ok(EnsembleStat {
            mean,
            stderr: (var / n as f64).sqrt(),
            n,
        })
    }
}

/// Key identifying a parameter point in seed derivation.
pub(crate) fn params_key(params: &ModelParams) -> [u64; 5] {
    let init = match params.initial_state {
        InitialState::BellPairs => 0,
        InitialState::Product => 1,
    };
    [
        seeds::float_key(params.p),
        seeds::float_key(params.r),
        params.n_qubits as u64,
        params.depth_layers as u64,
        init,
    ]
}

/// I₂ of one realization; `params.seed` is the realization seed.
pub fn i2_realization(params: &ModelParams) -> Result<i64> {
    let c = sample_circuit(params)?;
    run_circuit(&c, params.initial_state)?.mutual_information_i2()
}

/// Per-realization I₂ values, in realization order. `params.seed` is the
/// master seed.
pub fn i2_samples(params: &ModelParams, n_realizations: usize) -> Result<Vec<i64>> {
    params.validate()?;
    if params.n_qubits % 3 != 0 {
        return Err(Error::invalid(format!("N = {} is not divisible by 3", params.n_qubits)));
    }
    let key = params_key(params);
    (0..n_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let seed = seeds::derive_seed(params.seed, "i2", &key, i);
            i2_realization(&params.clone().with_seed(seed))
        })
        .collect()
}

/// Mean and standard error of I₂ over independent realizations.
pub fn measure_i2_ensemble(params: &ModelParams, n_realizations: usize) -> Result<EnsembleStat> {
    if n_realizations <= 1 {
        return Err(Error::invalid("n_realizations must exceed 1"));
    }
    let values: Vec<f64> = i2_samples(params, n_realizations)?
        .into_iter()
        .map(|v| v as f64)
        .collect();
    EnsembleStat::from_samples(&values)
}
