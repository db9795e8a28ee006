//! The experiment pipelines. Each one fills an [`Outputs`] set from a
//! validated config; nothing here touches the filesystem.

use serde::Serialize;
use serde_json::{json, Value};

use super::config::{Experiment, ExperimentConfig};
use super::output::Outputs;
use crate::circuit::{find_crossing, measure_i2_ensemble, sample_circuit, scaling_collapse, CircuitRecord, CollapseMode, Crossing, Curve, EnsembleStat, ModelParams};
use crate::error::Result;
use crate::percolation::{distance_telemetry, estimate_p_path, slc_curve, PathPoint, SlcCurve};
use crate::scaling::{binomial_sigma, collapse_check, extrapolate_threshold, fermionic_fit, FssEstimate, Observation, SizePoint, ThresholdFit};
use crate::seeds;

fn params(cfg: &ExperimentConfig, p: f64, r: f64, n: usize) -> ModelParams {
    ModelParams::new(p, r, n, cfg.master_seed)
        .with_depth(cfg.depth_for(n))
        .with_initial_state(cfg.initial_state)
}

/// I₂ statistics on a grid; `x` runs over `xs` and `at(x)` gives `(p, r)`.
#[derive(Clone, Debug, Serialize)]
pub struct MiTable {
    pub rows: Vec<(f64, f64, usize, EnsembleStat)>,
    pub curves: Vec<Curve>,
}

pub fn mi_table(cfg: &ExperimentConfig, xs: &[f64], at: impl Fn(f64) -> (f64, f64)) -> Result<MiTable> {
    let mut rows = Vec::new();
    let mut curves = Vec::new();
    for &n in &cfg.n_list {
        let mut ys = Vec::with_capacity(xs.len());
        let mut errs = Vec::with_capacity(xs.len());
        for &x in xs {
            let (p, r) = at(x);
            let s = measure_i2_ensemble(&params(cfg, p, r, n), cfg.n_realizations)?;
            ys.push(s.mean);
            errs.push(s.stderr);
            rows.push((p, r, n, s));
        }
        curves.push(Curve::new(n, xs.to_vec(), ys, errs)?);
    }
    Ok(MiTable { rows, curves })
}

fn mi_rows(table: &MiTable) -> Vec<String> {
    table
        .rows
        .iter()
        .map(|(p, r, n, s)| format!("{p},{r},{n},{},{},{}", s.n, s.mean, s.stderr))
        .collect()
}

const MI_HEADER: &str = "p,r,N,M,I2_mean,stderr";

fn crossing_value(c: &Result<Crossing>) -> Value {
    match c {
        Ok(c) => json!(c),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

/// `P_path` curves at one `r`, one per size.
pub fn path_table(cfg: &ExperimentConfig, r: f64) -> Result<Vec<Vec<PathPoint>>> {
    cfg.n_list
        .iter()
        .map(|&n| estimate_p_path(&params(cfg, 0.0, r, n), &cfg.p_grid, cfg.n_realizations))
        .collect()
}

fn path_rows(points: &[PathPoint]) -> Vec<String> {
    points
        .iter()
        .map(|q| format!("{},{},{},{},{},{}", q.p, q.r, q.n_qubits, q.realizations, q.p_path, q.stderr))
        .collect()
}

/// Sigmoid observations with regularized binomial errors.
pub fn observations(points: &[PathPoint]) -> Vec<Observation> {
    points
        .iter()
        .map(|q| {
            let hits = (q.p_path * q.realizations as f64).round() as usize;
            Observation {
                x: q.p,
                y: q.p_path,
                err: binomial_sigma(hits, q.realizations),
            }
        })
        .collect()
}

/// Per-size threshold fits and their extrapolation.
#[derive(Debug)]
pub struct PercolationAnalysis {
    pub r: f64,
    pub fits: Vec<(usize, Result<ThresholdFit>)>,
    pub estimate: Result<FssEstimate>,
}

pub fn analyse_paths(cfg: &ExperimentConfig, r: f64, curves: &[Vec<PathPoint>]) -> PercolationAnalysis {
    let fits: Vec<(usize, Result<ThresholdFit>)> = cfg
        .n_list
        .iter()
        .zip(curves)
        .map(|(&n, pts)| (n, fermionic_fit(&observations(pts), n, cfg.nu)))
        .collect();
    let points: Vec<SizePoint> = fits.iter().filter_map(|(_, f)| f.as_ref().ok()).map(SizePoint::from).collect();
    let estimate = extrapolate_threshold(&points, cfg.nu, cfg.alpha);
    PercolationAnalysis { r, fits, estimate }
}

impl PercolationAnalysis {
    pub fn to_value(&self) -> Value {
        let per_n: Vec<Value> = self
            .fits
            .iter()
            .map(|(n, f)| match f {
                Ok(f) => json!(f),
                Err(e) => json!({ "n": n, "error": e.to_string() }),
            })
            .collect();
        match &self.estimate {
            Ok(e) => json!({
                "r": self.r,
                "p_c_inf": e.p_c_infinity,
                "var": e.variance,
                "half_width": e.half_width,
                "t_factor": e.t_factor,
                "slope": e.slope,
                "nu": e.nu,
                "per_N": per_n,
            }),
            Err(err) => json!({ "r": self.r, "error": err.to_string(), "per_N": per_n }),
        }
    }

    /// Successfully fitted sizes with their `P_path` curves.
    pub fn fitted_curves(&self, curves: &[Vec<PathPoint>]) -> (Vec<Curve>, Vec<f64>) {
        let mut out = (Vec::new(), Vec::new());
        for ((n, fit), pts) in self.fits.iter().zip(curves) {
            if let Ok(f) = fit {
                let c = Curve {
                    n: *n,
                    x: pts.iter().map(|q| q.p).collect(),
                    y: pts.iter().map(|q| q.p_path).collect(),
                    err: pts.iter().map(|q| q.stderr).collect(),
                };
                out.0.push(c);
                out.1.push(f.p_c);
            }
        }
        out
    }
}

fn mi_scan(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let mut rows = Vec::new();
    let mut crossings = Vec::new();
    for &r in &cfg.r_grid {
        let t = mi_table(cfg, &cfg.p_grid, |p| (p, r))?;
        rows.extend(mi_rows(&t));
        crossings.push(json!({ "r": r, "crossing": crossing_value(&find_crossing(&t.curves)) }));
    }
    out.csv("mi_scan.csv", MI_HEADER, rows);
    out.json("mi_crossing.json", Value::Array(crossings));
    Ok(())
}

fn perc_scan(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    let mut collapse_rows = Vec::new();
    for &r in &cfg.r_grid {
        let curves = path_table(cfg, r)?;
        rows.extend(curves.iter().flat_map(|c| path_rows(c)));
        let a = analyse_paths(cfg, r, &curves);
        let (fitted, p_c) = a.fitted_curves(&curves);
        if !fitted.is_empty() {
            let c = collapse_check(&fitted, &p_c, cfg.nu)?;
            collapse_rows.extend(c.points.iter().map(|(x, y, n)| format!("{r},{n},{x},{y}")));
        }
        fits.push(a.to_value());
    }
    out.csv("p_path.csv", "p,r,N,M,P_path,stderr", rows);
    out.json("perc_fit.json", Value::Array(fits));
    out.csv("perc_collapse.csv", "r,N,x_rescaled,P_path", collapse_rows);
    Ok(())
}

/// Threshold in `p` at one `r` from the percolation curves: the
/// extrapolated value when three sizes fit, else the largest fitted size.
fn percolation_threshold(a: &PercolationAnalysis) -> (f64, f64, &'static str) {
    if let Ok(e) = &a.estimate {
        return (e.p_c_infinity, e.variance.sqrt(), "extrapolated");
    }
    match a.fits.iter().rev().find_map(|(_, f)| f.as_ref().ok()) {
        Some(f) => (f.p_c, f.p_c_err, "largest_size"),
        None => (f64::NAN, f64::NAN, "none"),
    }
}

fn phase_diagram(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let (mut mi, mut paths, mut mi_boundary, mut perc_boundary) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for &r in &cfg.r_grid {
        let t = mi_table(cfg, &cfg.p_grid, |p| (p, r))?;
        mi.extend(mi_rows(&t));
        match find_crossing(&t.curves) {
            Ok(c) => mi_boundary.push(format!("{r},{},{},ok", c.x, c.err)),
            Err(_) => mi_boundary.push(format!("{r},,,no_crossing")),
        }
        let curves = path_table(cfg, r)?;
        paths.extend(curves.iter().flat_map(|c| path_rows(c)));
        let (p_c, err, method) = percolation_threshold(&analyse_paths(cfg, r, &curves));
        if p_c.is_finite() {
            perc_boundary.push(format!("{r},{p_c},{err},{method}"));
        } else {
            perc_boundary.push(format!("{r},,,{method}"));
        }
    }
    out.csv("mi_scan.csv", MI_HEADER, mi);
    out.csv("p_path.csv", "p,r,N,M,P_path,stderr", paths);
    out.csv("mi_boundary.csv", "r,p_c,err,status", mi_boundary);
    out.csv("perc_boundary.csv", "r,p_c,err,method", perc_boundary);
    let n = cfg.n_list[0];
    for (k, &(p, r)) in cfg.marked_points.iter().enumerate() {
        let base = params(cfg, p, r, n);
        let seed = seeds::derive_seed(cfg.master_seed, "marked", &crate::circuit::ensemble::params_key(&base), k as u64);
        let c = sample_circuit(&base.with_seed(seed))?;
        out.json(
            &format!("sample_point_{}.json", k + 1),
            json!({ "p": p, "r": r, "N": n, "record": CircuitRecord::new(c).to_value() }),
        );
    }
    Ok(())
}

/// Least-squares `p_peak(N) = a + C N^{-3/4}` through the located peaks.
fn peak_scaling(peaks: &[(usize, f64, f64)]) -> Value {
    let pts: Vec<SizePoint> = peaks
        .iter()
        .map(|&(n, p, w)| SizePoint { n, p_c: p, err: w.max(1e-12) })
        .collect();
    match extrapolate_threshold(&pts, crate::scaling::NU_PERCOLATION, 0.05) {
        Ok(e) => json!({ "p_inf": e.p_c_infinity, "C": e.slope, "half_width": e.half_width }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn slc(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &r in &cfg.r_grid {
        let curves: Vec<SlcCurve> = cfg
            .n_list
            .iter()
            .map(|&n| slc_curve(&params(cfg, 0.0, r, n), &cfg.p_grid, cfg.n_realizations))
            .collect::<Result<_>>()?;
        let mut located = Vec::new();
        let mut per_n = Vec::new();
        for (c, &n) in curves.iter().zip(&cfg.n_list) {
            rows.extend(c.points.iter().map(|q| format!("{},{},{},{},{}", q.p, q.r, q.n_qubits, q.mean_slc, q.stderr)));
            match c.peak {
                Some(pk) => {
                    located.push((n, pk.p, pk.width));
                    per_n.push(json!({ "N": n, "p": pk.p, "width": pk.width, "height": pk.height }));
                }
                None => per_n.push(json!({ "N": n, "peak": "undefined" })),
            }
        }
        summary.push(json!({ "r": r, "peaks": per_n, "scaling": peak_scaling(&located) }));
    }
    out.csv("slc.csv", "p,r,N,mean_SLC,stderr", rows);
    out.json("slc_peaks.json", Value::Array(summary));
    Ok(())
}

fn distance_stats(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let (mut hist, mut steps, mut summary) = (Vec::new(), Vec::new(), Vec::new());
    for &r in &cfg.r_grid {
        for &p in &cfg.p_grid {
            for &n in &cfg.n_list {
                let e = distance_telemetry(&params(cfg, p, r, n), cfg.n_realizations, cfg.window, cfg.schedule)?;
                hist.extend(e.histogram.iter().enumerate().map(|(d, c)| format!("{p},{r},{n},{d},{c}")));
                steps.extend(e.mean_by_step.iter().map(|(s, m, k)| format!("{p},{r},{n},{s},{m},{k}")));
                summary.push(json!({
                    "p": p, "r": r, "N": n,
                    "realizations": e.realizations,
                    "window": e.window,
                    "window_events": e.window_events,
                    "beyond_N": e.beyond_n,
                    "fraction_beyond_N": e.fraction_beyond_n,
                    "d_max": e.d_max,
                    "max_distance": e.max_distance,
                    "tail_slope": e.tail_slope,
                }));
            }
        }
    }
    out.csv("distance_hist.csv", "p,r,N,d_bin,count", hist);
    out.csv("distance_by_step.csv", "p,r,N,step,mean_distance,events", steps);
    out.json("distance_summary.json", Value::Array(summary));
    Ok(())
}

/// Collapse scores of I₂ (about its crossing) and of `P_path` (about the
/// per-size fitted thresholds) for each exponent.
pub fn collapse_scores(
    nus: &[f64],
    mi_curves: &[Curve],
    mi_crossing: Option<f64>,
    path_curves: &[Curve],
    path_thresholds: &[f64],
) -> Result<Vec<(&'static str, f64, f64, bool)>> {
    let mut rows = Vec::new();
    for &nu in nus {
        if let Some(x_c) = mi_crossing {
            let c = scaling_collapse(mi_curves, x_c, nu, CollapseMode::Transition)?;
            rows.push(("I2", nu, c.score, c.degenerate));
        }
        if !path_curves.is_empty() {
            let c = collapse_check(path_curves, path_thresholds, nu)?;
            rows.push(("P_path", nu, c.score, c.degenerate));
        }
    }
    Ok(rows)
}

fn collapse(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let (mut mi, mut paths, mut scores) = (Vec::new(), Vec::new(), Vec::new());
    for &r in &cfg.r_grid {
        let t = mi_table(cfg, &cfg.p_grid, |p| (p, r))?;
        mi.extend(mi_rows(&t));
        let crossing = find_crossing(&t.curves).ok().map(|c| c.x);
        let curves = path_table(cfg, r)?;
        paths.extend(curves.iter().flat_map(|c| path_rows(c)));
        let (fitted, p_c) = analyse_paths(cfg, r, &curves).fitted_curves(&curves);
        for (obs, nu, score, degenerate) in collapse_scores(&cfg.collapse_nus, &t.curves, crossing, &fitted, &p_c)? {
            scores.push(format!("{r},{obs},{nu},{score},{degenerate}"));
        }
    }
    out.csv("mi_scan.csv", MI_HEADER, mi);
    out.csv("p_path.csv", "p,r,N,M,P_path,stderr", paths);
    out.csv("collapse_scores.csv", "r,observable,nu,score,degenerate", scores);
    Ok(())
}

fn boundary_fit(cfg: &ExperimentConfig, out: &mut Outputs) -> Result<()> {
    let (mut mi, mut rows, mut points) = (Vec::new(), Vec::new(), Vec::new());
    for &p in &cfg.p_grid {
        let t = mi_table(cfg, &cfg.r_grid, |r| (p, r))?;
        mi.extend(mi_rows(&t));
        match find_crossing(&t.curves) {
            Ok(c) => {
                rows.push(format!("{p},{},{},ok", c.x, c.err));
                if c.x > 0.0 {
                    points.push((p, c.x));
                }
            }
            Err(_) => rows.push(format!("{p},,,no_crossing")),
        }
    }
    let fit = match crate::scaling::boundary_exponential_fit(&points) {
        Ok(f) => json!({ "A": f.a, "prefactor": f.prefactor, "residual_rms": f.residual_rms, "points": points }),
        Err(e) => json!({ "error": e.to_string(), "points": points }),
    };
    out.csv("mi_r_scan.csv", MI_HEADER, mi);
    out.csv("boundary_points.csv", "p,r_c,err,status", rows);
    out.json("boundary_fit.json", fit);
    Ok(())
}

/// Runs the experiment into memory.
pub fn compute(cfg: &ExperimentConfig) -> Result<Outputs> {
    cfg.validate()?;
    let mut out = Outputs::new(&cfg.hash(), cfg.master_seed);
    match cfg.experiment {
        Experiment::MiScan => mi_scan(cfg, &mut out)?,
        Experiment::PercScan => perc_scan(cfg, &mut out)?,
        Experiment::PhaseDiagram => phase_diagram(cfg, &mut out)?,
        Experiment::Slc => slc(cfg, &mut out)?,
        Experiment::DistanceStats => distance_stats(cfg, &mut out)?,
        Experiment::Collapse => collapse(cfg, &mut out)?,
        Experiment::BoundaryFit => boundary_fit(cfg, &mut out)?,
    }
    Ok(out)
}
