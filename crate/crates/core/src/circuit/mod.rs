//! Random brickwork circuits built from CNOT, SWAP, identity and Bell-pair
//! measurements.
//!
//! Layer `j` (0-based sub-layer index) acts on bonds `(0,1), (2,3), ...` when
//! `j` is even and on `(1,2), (3,4), ...` when `j` is odd; the edge qubits
//! idle on odd sub-layers. A full layer is one even plus one odd sub-layer,
//! so sub-layer `j` sits at time `j / 2`.

mod analysis;
pub(crate) mod ensemble;
mod record;

pub use analysis::{find_crossing, scaling_collapse, Collapse, CollapseMode, Crossing, Curve, PairCrossing};
pub use ensemble::{i2_realization, i2_samples, measure_i2_ensemble, EnsembleStat};
pub use record::CircuitRecord;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds;
use crate::tableau::StabilizerTableau;

/// Which qubit of a CNOT brick is the control.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlSide {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    Cnot(ControlSide),
    Swap,
    Identity,
    BellMeasure,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Cnot(_) => "cnot",
            GateKind::Swap => "swap",
            GateKind::Identity => "identity",
            GateKind::BellMeasure => "bell",
        }
    }
}

/// One two-site operation. `bond` is the left site of the pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Brick {
    pub layer: u32,
    pub bond: u32,
    pub kind: GateKind,
}

impl Brick {
    pub fn sites(&self) -> (usize, usize) {
        (self.bond as usize, self.bond as usize + 1)
    }

    /// `(control, target)` for a CNOT brick.
    pub fn cnot_sites(&self) -> Option<(usize, usize)> {
        let (l, r) = self.sites();
        match self.kind {
            GateKind::Cnot(ControlSide::Left) => Some((l, r)),
            GateKind::Cnot(ControlSide::Right) => Some((r, l)),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    #[default]
    BellPairs,
    Product,
}

impl InitialState {
    pub fn prepare(&self, n_qubits: usize) -> Result<StabilizerTableau> {
        match self {
            InitialState::BellPairs => StabilizerTableau::init_bell_pairs(n_qubits),
            InitialState::Product => StabilizerTableau::init_product_state(n_qubits),
        }
    }
}

/// Per-brick operation probabilities for measurement rate `p` and CNOT
/// fraction `r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperationProbabilities {
    pub cnot: f64,
    pub swap: f64,
    pub identity: f64,
    pub bell: f64,
}

impl OperationProbabilities {
    pub fn new(p: f64, r: f64) -> Result<Self> {
        check_probability("p", p)?;
        check_probability("r", r)?;
        Ok(OperationProbabilities {
            cnot: r * (1.0 - p),
            swap: (1.0 - r) * (1.0 - p),
            identity: p / 2.0,
            bell: p / 2.0,
        })
    }
}

fn check_probability(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) || v.is_nan() {
        return Err(Error::invalid(format!("{name} = {v} is not a probability")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub p: f64,
    pub r: f64,
    pub n_qubits: usize,
    /// Number of full (even + odd) layers.
    pub depth_layers: usize,
    #[serde(default)]
    pub initial_state: InitialState,
    pub seed: u64,
}

impl ModelParams {
    /// Parameters with the default depth of `4N` full layers.
    pub fn new(p: f64, r: f64, n_qubits: usize, seed: u64) -> Self {
        ModelParams {
            p,
            r,
            n_qubits,
            depth_layers: 4 * n_qubits,
            initial_state: InitialState::BellPairs,
            seed,
        }
    }

    pub fn with_depth(mut self, depth_layers: usize) -> Self {
        self.depth_layers = depth_layers;
        self
    }

    pub fn with_initial_state(mut self, initial_state: InitialState) -> Self {
        self.initial_state = initial_state;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("p", self.p)?;
        check_probability("r", self.r)?;
        if self.n_qubits < 2 || self.n_qubits % 2 != 0 {
            return Err(Error::invalid(format!(
                "brickwork circuits need an even qubit count >= 2, got {}",
                self.n_qubits
            )));
        }
        if self.depth_layers == 0 {
            return Err(Error::invalid("depth must be positive"));
        }
        Ok(())
    }
}

/// A sampled circuit realization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrickworkCircuit {
    pub n_qubits: usize,
    pub depth_layers: usize,
    pub seed: u64,
    pub bricks: Vec<Brick>,
}

/// Time stamp of sub-layer `layer`.
pub fn time_of_layer(layer: u32) -> f64 {
    layer as f64 / 2.0
}

/// Left sites of the bonds active on sub-layer `layer`.
pub fn active_bonds(n_qubits: usize, layer: u32) -> impl Iterator<Item = u32> {
    let start = (layer % 2) as usize;
    (start..n_qubits.saturating_sub(1)).step_by(2).map(|b| b as u32)
}

impl BrickworkCircuit {
    pub fn n_sublayers(&self) -> u32 {
        2 * self.depth_layers as u32
    }

    pub fn time_of_layer(&self, layer: u32) -> f64 {
        time_of_layer(layer)
    }

    /// Checks brick placement against the brickwork pattern.
    pub fn validate(&self) -> Result<()> {
        if self.n_qubits < 2 || self.n_qubits % 2 != 0 {
            return Err(Error::invalid(format!("odd or tiny qubit count {}", self.n_qubits)));
        }
        let mut expected = (0..self.n_sublayers()).flat_map(|l| active_bonds(self.n_qubits, l).map(move |b| (l, b)));
        for (k, brick) in self.bricks.iter().enumerate() {
            match expected.next() {
                Some((l, b)) if l == brick.layer && b == brick.bond => {}
                Some((l, b)) => {
                    return Err(Error::invalid(format!(
                        "brick {k} at (layer {}, bond {}) where (layer {l}, bond {b}) was expected",
                        brick.layer, brick.bond
                    )))
                }
                None => return Err(Error::invalid(format!("surplus brick {k}"))),
            }
        }
        if expected.next().is_some() {
            return Err(Error::invalid("circuit is missing bricks"));
        }
        Ok(())
    }

    pub fn count(&self, pred: impl Fn(&GateKind) -> bool) -> usize {
        self.bricks.iter().filter(|b| pred(&b.kind)).count()
    }
}

/// Draws one brick kind from the operation distribution.
#[inline]
pub fn sample_kind<R: Rng + ?Sized>(probs: &OperationProbabilities, rng: &mut R) -> GateKind {
    let u: f64 = rng.gen();
    if u < probs.cnot {
        if rng.gen::<bool>() {
            GateKind::Cnot(ControlSide::Left)
        } else {
            GateKind::Cnot(ControlSide::Right)
        }
    } else if u < probs.cnot + probs.swap {
        GateKind::Swap
    } else if u < probs.cnot + probs.swap + probs.identity {
        GateKind::Identity
    } else {
        GateKind::BellMeasure
    }
}

/// Sub-stream of a realization seed used for circuit sampling.
const CIRCUIT_STREAM: u64 = 1;
/// Sub-stream used for measurement outcomes.
const OUTCOME_STREAM: u64 = 2;

/// Samples every brick i.i.d. from the operation distribution.
pub fn sample_circuit(params: &ModelParams) -> Result<BrickworkCircuit> {
    params.validate()?;
    let probs = OperationProbabilities::new(params.p, params.r)?;
    let mut rng = seeds::rng_for(params.seed, CIRCUIT_STREAM);
    let n_sub = 2 * params.depth_layers as u32;
    let mut bricks = Vec::with_capacity(params.depth_layers * params.n_qubits);
    for layer in 0..n_sub {
        for bond in active_bonds(params.n_qubits, layer) {
            bricks.push(Brick {
                layer,
                bond,
                kind: sample_kind(&probs, &mut rng),
            });
        }
    }
    Ok(BrickworkCircuit {
        n_qubits: params.n_qubits,
        depth_layers: params.depth_layers,
        seed: params.seed,
        bricks,
    })
}

/// Applies one brick to a tableau.
pub fn apply_brick<R: Rng + ?Sized>(t: &mut StabilizerTableau, brick: &Brick, rng: &mut R) -> Result<()> {
    let (l, r) = brick.sites();
    match brick.kind {
        GateKind::Cnot(ControlSide::Left) => t.apply_cnot(l, r),
        GateKind::Cnot(ControlSide::Right) => t.apply_cnot(r, l),
        GateKind::Swap => t.apply_swap(l, r),
        GateKind::Identity => Ok(()),
        GateKind::BellMeasure => t.measure_bell_pair(l, r, rng),
    }
}

/// Evolves the initial state through the circuit, layer by layer and left
/// to right within a layer. Measurement outcomes are drawn from a sub-stream
/// of the circuit seed.
pub fn run_circuit(c: &BrickworkCircuit, initial_state: InitialState) -> Result<StabilizerTableau> {
    let mut t = initial_state.prepare(c.n_qubits)?;
    let mut rng = seeds::rng_for(c.seed, OUTCOME_STREAM);
    for brick in &c.bricks {
        apply_brick(&mut t, brick, &mut rng)?;
    }
    Ok(t)
}
