//! C ABI over the circuit, simplification and percolation pipeline.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free`. Every fallible call returns a
//! [`ZxpStatus`]; on failure `zxp_last_error` describes the problem until
//! the next call on the same thread. Strings returned through `char **`
//! are released with `zxp_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use zxperc::circuit::{measure_i2_ensemble, run_circuit, sample_circuit, BrickworkCircuit, CircuitRecord, InitialState, ModelParams};
use zxperc::harness::{self, ExperimentConfig};
use zxperc::percolation::{estimate_p_path, is_percolating, ClassicalNetwork};
use zxperc::zx::{clifford_simplify_with, diagram_from_circuit, to_graph_like, Schedule, ZxDiagram};
use zxperc::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZxpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Config = 4,
    Io = 5,
    Runtime = 6,
    Panic = 7,
}

/// Initial state for entropy calculations.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZxpInitialState {
    BellPairs = 0,
    Product = 1,
}

/// Rewrite order of the simplifier.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZxpSchedule {
    Sweep = 0,
    Parallel = 1,
}

/// A sampled brickwork circuit.
pub struct ZxpCircuit(BrickworkCircuit);

/// A ZX diagram.
pub struct ZxpDiagram(ZxDiagram);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = clean);
}

fn status_of(e: &Error) -> ZxpStatus {
    match e {
        Error::Parse { .. } => ZxpStatus::Parse,
        Error::Config { .. } => ZxpStatus::Config,
        Error::Io(_) => ZxpStatus::Io,
        Error::InvalidArgument(_) => ZxpStatus::InvalidArgument,
        _ => ZxpStatus::Runtime,
    }
}

struct Fail(ZxpStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(ZxpStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, translating errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Fail>) -> ZxpStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ZxpStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(&format!("internal panic: {msg}"));
            ZxpStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Fail(ZxpStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(ZxpStatus::Runtime, "string contains NUL".into()))?;
    write_out(out, c.into_raw(), "out")
}

unsafe fn circuit_ref<'a>(c: *const ZxpCircuit) -> Result<&'a ZxpCircuit, Fail> {
    c.as_ref().ok_or_else(|| null("circuit"))
}

unsafe fn diagram_mut<'a>(d: *mut ZxpDiagram) -> Result<&'a mut ZxpDiagram, Fail> {
    d.as_mut().ok_or_else(|| null("diagram"))
}

fn model(p: f64, r: f64, n_qubits: usize, depth_layers: usize, seed: u64) -> ModelParams {
    let m = ModelParams::new(p, r, n_qubits, seed);
    if depth_layers == 0 {
        m
    } else {
        m.with_depth(depth_layers)
    }
}

/// Message describing the last failure on this thread; empty after a
/// successful call. Valid until the next call into the library.
#[no_mangle]
pub extern "C" fn zxp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn zxp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn zxp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Samples a circuit. `depth_layers = 0` selects the default depth `4N`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zxp_circuit_sample(
    p: f64,
    r: f64,
    n_qubits: usize,
    depth_layers: usize,
    seed: u64,
    out: *mut *mut ZxpCircuit,
) -> ZxpStatus {
    guard(|| {
        let c = sample_circuit(&model(p, r, n_qubits, depth_layers, seed))?;
        write_out(out, Box::into_raw(Box::new(ZxpCircuit(c))), "out")
    })
}

/// Parses a JSON circuit record.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zxp_circuit_from_json(json: *const c_char, out: *mut *mut ZxpCircuit) -> ZxpStatus {
    guard(|| {
        let rec = CircuitRecord::from_json(read_str(json, "json")?)?;
        rec.circuit.validate()?;
        write_out(out, Box::into_raw(Box::new(ZxpCircuit(rec.circuit))), "out")
    })
}

/// Serializes a circuit as a JSON record.
///
/// # Safety
/// `c` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zxp_circuit_to_json(c: *const ZxpCircuit, out: *mut *mut c_char) -> ZxpStatus {
    guard(|| {
        let c = circuit_ref(c)?;
        write_string(out, CircuitRecord::new(c.0.clone()).to_json())
    })
}

/// # Safety
/// `c` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zxp_circuit_free(c: *mut ZxpCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Number of qubits and bricks of a circuit.
///
/// # Safety
/// `c` must be a live handle; outputs valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zxp_circuit_shape(c: *const ZxpCircuit, n_qubits: *mut usize, n_bricks: *mut usize) -> ZxpStatus {
    guard(|| {
        let c = circuit_ref(c)?;
        write_out(n_qubits, c.0.n_qubits, "n_qubits")?;
        write_out(n_bricks, c.0.bricks.len(), "n_bricks")
    })
}

/// Evolves the initial state through the circuit and returns I₂ of the
/// three equal thirds of the chain.
///
/// # Safety
/// `c` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zxp_circuit_i2(c: *const ZxpCircuit, initial_state: ZxpInitialState, out: *mut i64) -> ZxpStatus {
    guard(|| {
        let c = circuit_ref(c)?;
        let init = match initial_state {
            ZxpInitialState::BellPairs => InitialState::BellPairs,
            ZxpInitialState::Product => InitialState::Product,
        };
        let i2 = run_circuit(&c.0, init)?.mutual_information_i2()?;
        write_out(out, i2, "out")
    })
}

/// Diagram of the circuit's linear map, with open inputs and outputs.
///
/// # Safety
/// `c` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zxp_diagram_from_circuit(c: *const ZxpCircuit, out: *mut *mut ZxpDiagram) -> ZxpStatus {
    guard(|| {
        let d = diagram_from_circuit(&circuit_ref(c)?.0, None)?;
        write_out(out, Box::into_raw(Box::new(ZxpDiagram(d))), "out")
    })
}

/// Parses a diagram dump.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zxp_diagram_from_json(json: *const c_char, out: *mut *mut ZxpDiagram) -> ZxpStatus {
    guard(|| {
        let d = ZxDiagram::from_json(read_str(json, "json")?)?;
        write_out(out, Box::into_raw(Box::new(ZxpDiagram(d))), "out")
    })
}

/// # Safety
/// `d` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zxp_diagram_to_json(d: *mut ZxpDiagram, out: *mut *mut c_char) -> ZxpStatus {
    guard(|| {
        let d = diagram_mut(d)?;
        write_string(out, d.0.to_json())
    })
}

/// # Safety
/// `d` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zxp_diagram_free(d: *mut ZxpDiagram) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Converts the diagram to graph-like form in place.
///
/// # Safety
/// `d` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn zxp_diagram_to_graph_like(d: *mut ZxpDiagram) -> ZxpStatus {
    guard(|| {
        to_graph_like(&mut diagram_mut(d)?.0);
        Ok(())
    })
}

/// Clifford simplification in place. `steps` (may be null) receives the
/// number of passes in which a rule fired.
///
/// # Safety
/// `d` must be a live handle; `steps` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zxp_diagram_simplify(d: *mut ZxpDiagram, schedule: ZxpSchedule, steps: *mut u32) -> ZxpStatus {
    guard(|| {
        let d = diagram_mut(d)?;
        let schedule = match schedule {
            ZxpSchedule::Sweep => Schedule::Sweep,
            ZxpSchedule::Parallel => Schedule::Parallel,
        };
        let report = clifford_simplify_with(&mut d.0, false, schedule);
        if !steps.is_null() {
            steps.write(report.steps);
        }
        Ok(())
    })
}

/// Live spiders, boundary spiders included, and wires.
///
/// # Safety
/// `d` must be a live handle; outputs valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zxp_diagram_size(d: *mut ZxpDiagram, spiders: *mut usize, wires: *mut usize) -> ZxpStatus {
    guard(|| {
        let d = diagram_mut(d)?;
        write_out(spiders, d.0.num_spiders(), "spiders")?;
        write_out(wires, d.0.num_wires(), "wires")
    })
}

/// Whether any input connects to any output in the diagram's network.
///
/// # Safety
/// `d` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zxp_diagram_is_percolating(d: *mut ZxpDiagram, out: *mut bool) -> ZxpStatus {
    guard(|| {
        let d = diagram_mut(d)?;
        write_out(out, is_percolating(&ClassicalNetwork::from_diagram(&d.0)), "out")
    })
}

/// `P_path` and its standard error at one parameter point.
/// `depth_layers = 0` selects `4N`.
///
/// # Safety
/// Outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zxp_estimate_p_path(
    p: f64,
    r: f64,
    n_qubits: usize,
    depth_layers: usize,
    master_seed: u64,
    n_realizations: usize,
    p_path: *mut f64,
    stderr: *mut f64,
) -> ZxpStatus {
    guard(|| {
        let pts = estimate_p_path(&model(p, r, n_qubits, depth_layers, master_seed), &[p], n_realizations)?;
        write_out(p_path, pts[0].p_path, "p_path")?;
        write_out(stderr, pts[0].stderr, "stderr")
    })
}

/// Ensemble mean of I₂ and its standard error. `depth_layers = 0`
/// selects `4N`.
///
/// # Safety
/// Outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zxp_measure_i2(
    p: f64,
    r: f64,
    n_qubits: usize,
    depth_layers: usize,
    master_seed: u64,
    n_realizations: usize,
    mean: *mut f64,
    stderr: *mut f64,
) -> ZxpStatus {
    guard(|| {
        let s = measure_i2_ensemble(&model(p, r, n_qubits, depth_layers, master_seed), n_realizations)?;
        write_out(mean, s.mean, "mean")?;
        write_out(stderr, s.stderr, "stderr")
    })
}

/// Runs an experiment from a JSON config and writes its files. A non-null
/// `output_dir` overrides the config's. `manifest` (may be null) receives
/// the manifest JSON.
///
/// # Safety
/// Strings must be NUL-terminated; `manifest` null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zxp_run_experiment(
    config_json: *const c_char,
    output_dir: *const c_char,
    manifest: *mut *mut c_char,
) -> ZxpStatus {
    guard(|| {
        let mut cfg = ExperimentConfig::from_json(read_str(config_json, "config_json")?, None)?;
        if !output_dir.is_null() {
            cfg.output_dir = PathBuf::from(read_str(output_dir, "output_dir")?);
        }
        let m = harness::run_experiment(&cfg)?;
        if !manifest.is_null() {
            write_string(manifest, serde_json::to_string(&m).map_err(|e| Fail(ZxpStatus::Runtime, e.to_string()))?)?;
        }
        Ok(())
    })
}

/// Runs the oracle suites; `passed` receives whether all of them passed.
///
/// # Safety
/// `passed` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zxp_selftest(seed: u64, passed: *mut bool) -> ZxpStatus {
    guard(|| {
        if passed.is_null() {
            return Err(null("passed"));
        }
        let ok = harness::selftest(seed).iter().all(|c| c.passed);
        passed.write(ok);
        Ok(())
    })
}
