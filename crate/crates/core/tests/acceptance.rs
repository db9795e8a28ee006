//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! `cargo test --release -p zxperc --test acceptance` runs everything
//! (over an hour on one core). Pass a substring such as `slc` or `7` after
//! `--` to run only matching criteria.

use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use zxperc::circuit::{find_crossing, measure_i2_ensemble, Crossing, ModelParams};
use zxperc::harness::{
    analyse_paths, collapse_scores, compute, mi_table, path_table, run_experiment, stabilizer_oracle, with_workers, zx_oracle, Experiment,
    ExperimentConfig, MiTable, PercolationAnalysis,
};
use zxperc::percolation::{distance_telemetry, estimate_p_path, slc_curve, PathPoint, SlcCurve};
use zxperc::zx::Schedule;

const SEED: u64 = 2024;
const SIZES: [usize; 3] = [48, 96, 192];
const REALIZATIONS: usize = 2000;
const R_MAIN: f64 = 0.1;

const MI_TARGET: f64 = 0.24;
const MI_TOL: f64 = 0.02;
const PERC_TARGET: f64 = 0.25;
const PERC_TOL: f64 = 0.03;
const ORACLE_STABILIZER_CASES: usize = 500;
const ORACLE_STABILIZER_LIMIT: Duration = Duration::from_secs(60);
const ORACLE_ZX_CASES: usize = 1000;
const ORACLE_ZX_LIMIT: Duration = Duration::from_secs(300);
const COLLAPSE_NUS: [f64; 3] = [0.8, 4.0 / 3.0, 2.0];
const LOCALIZATION_CONTRAST: f64 = 5.0;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn base_config(experiment: Experiment, p_grid: Vec<f64>) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(experiment, p_grid, vec![R_MAIN], SIZES.to_vec(), REALIZATIONS);
    cfg.master_seed = SEED;
    cfg
}

fn mi_data() -> &'static (MiTable, Result<Crossing, String>) {
    static DATA: OnceLock<(MiTable, Result<Crossing, String>)> = OnceLock::new();
    DATA.get_or_init(|| {
        let t = Instant::now();
        let cfg = base_config(Experiment::MiScan, vec![0.20, 0.22, 0.24, 0.26, 0.28]);
        let table = mi_table(&cfg, &cfg.p_grid, |p| (p, R_MAIN)).expect("I2 scan");
        let crossing = find_crossing(&table.curves).map_err(|e| e.to_string());
        eprintln!("  I2 scan: {:.0?}", t.elapsed());
        (table, crossing)
    })
}

fn path_data() -> &'static (Vec<Vec<PathPoint>>, PercolationAnalysis) {
    static DATA: OnceLock<(Vec<Vec<PathPoint>>, PercolationAnalysis)> = OnceLock::new();
    DATA.get_or_init(|| {
        let t = Instant::now();
        let cfg = base_config(Experiment::PercScan, vec![0.14, 0.16, 0.18, 0.20, 0.22, 0.24, 0.26]);
        let curves = path_table(&cfg, R_MAIN).expect("P_path scan");
        let analysis = analyse_paths(&cfg, R_MAIN, &curves);
        eprintln!("  P_path scan: {:.0?}", t.elapsed());
        (curves, analysis)
    })
}

fn stabilizer_equivalence() -> Outcome {
    let t = Instant::now();
    let check = stabilizer_oracle(ORACLE_STABILIZER_CASES, SEED);
    let elapsed = t.elapsed();
    outcome(
        check.passed && elapsed < ORACLE_STABILIZER_LIMIT,
        format!("{} in {:.1?} (limit {:?})", check.detail, elapsed, ORACLE_STABILIZER_LIMIT),
    )
}

fn zx_equivalence() -> Outcome {
    let t = Instant::now();
    let check = zx_oracle(ORACLE_ZX_CASES, SEED);
    let elapsed = t.elapsed();
    outcome(
        check.passed && elapsed < ORACLE_ZX_LIMIT,
        format!("{} in {:.1?} (limit {:?})", check.detail, elapsed, ORACLE_ZX_LIMIT),
    )
}

fn mi_location() -> Outcome {
    match &mi_data().1 {
        Ok(c) => {
            let pairs: Vec<String> = c.pairs.iter().map(|q| format!("{}/{}: {:.4}", q.n_small, q.n_large, q.x)).collect();
            outcome(
                (c.x - MI_TARGET).abs() <= MI_TOL,
                format!("crossing {:.4} ± {:.4} [{}], target {MI_TARGET} ± {MI_TOL}", c.x, c.err, pairs.join(", ")),
            )
        }
        Err(e) => outcome(false, format!("no crossing: {e}")),
    }
}

fn percolation_threshold() -> Outcome {
    let analysis = &path_data().1;
    let fitted: Vec<(usize, f64, f64)> = analysis
        .fits
        .iter()
        .filter_map(|(n, f)| f.as_ref().ok().map(|f| (*n, f.p_c, f.p_c_err)))
        .collect();
    let per_n: Vec<String> = analysis
        .fits
        .iter()
        .map(|(n, f)| match f {
            Ok(f) => format!("N={n}: {:.4} ± {:.4}", f.p_c, f.p_c_err),
            Err(e) => format!("N={n}: {e}"),
        })
        .collect();
    let decreasing = fitted.len() == SIZES.len() && fitted.windows(2).all(|w| w[1].1 < w[0].1);
    match &analysis.estimate {
        Ok(e) => {
            let located = (e.p_c_infinity - PERC_TARGET).abs() <= PERC_TOL;
            outcome(
                located && decreasing,
                format!(
                    "p_c(inf) {:.4} ± {:.4}, target {PERC_TARGET} ± {PERC_TOL} ({}); finite-N [{}] {}",
                    e.p_c_infinity,
                    e.half_width,
                    if located { "in range" } else { "out of range" },
                    per_n.join(", "),
                    if decreasing { "decreasing" } else { "not decreasing" }
                ),
            )
        }
        Err(err) => outcome(false, format!("extrapolation failed: {err}; [{}]", per_n.join(", "))),
    }
}

fn coincidence() -> Outcome {
    let (Ok(c), Ok(e)) = (&mi_data().1, &path_data().1.estimate) else {
        return outcome(false, "one of the two estimates is missing");
    };
    let (a_lo, a_hi) = (c.x - c.err, c.x + c.err);
    let (b_lo, b_hi) = (e.p_c_infinity - e.half_width, e.p_c_infinity + e.half_width);
    outcome(
        a_lo <= b_hi && b_lo <= a_hi,
        format!("I2 [{a_lo:.4}, {a_hi:.4}] vs P_path [{b_lo:.4}, {b_hi:.4}]"),
    )
}

fn exponent_consistency() -> Outcome {
    let (table, crossing) = mi_data();
    let (curves, analysis) = path_data();
    let (fitted, p_c) = analysis.fitted_curves(curves);
    let scores = match collapse_scores(&COLLAPSE_NUS, &table.curves, crossing.as_ref().ok().map(|c| c.x), &fitted, &p_c) {
        Ok(s) => s,
        Err(e) => return outcome(false, format!("collapse failed: {e}")),
    };
    let mut passed = true;
    let mut detail = Vec::new();
    for obs in ["I2", "P_path"] {
        let rows: Vec<_> = scores.iter().filter(|s| s.0 == obs).collect();
        let best = rows.iter().find(|s| s.1 == 4.0 / 3.0);
        let ok = match best {
            Some(b) => !b.3 && rows.iter().filter(|s| s.1 != 4.0 / 3.0).all(|s| b.2 < s.2),
            None => false,
        };
        passed &= ok;
        let listed: Vec<String> = rows.iter().map(|s| format!("nu={:.3}: {:.4}", s.1, s.2)).collect();
        detail.push(format!("{obs} [{}]", listed.join(", ")));
    }
    outcome(passed, detail.join("; "))
}

fn phase_structure() -> Outcome {
    let mut passed = true;
    let mut detail = Vec::new();

    for r in [0.0, 0.1, 0.5, 0.8, 1.0] {
        let pts = estimate_p_path(&ModelParams::new(0.0, r, 48, SEED), &[0.0], 100).expect("p = 0 scan");
        passed &= pts[0].p_path == 1.0;
        detail.push(format!("P_path(p=0, r={r})={}", pts[0].p_path));
    }

    let sizes = [24usize, 48, 96];
    let series = |p: f64, r: f64| -> Vec<(f64, f64)> {
        sizes
            .iter()
            .map(|&n| {
                let s = measure_i2_ensemble(&ModelParams::new(p, r, n, SEED), 300).expect("I2 ensemble");
                (s.mean, s.stderr)
            })
            .collect()
    };
    let fmt = |v: &[(f64, f64)]| v.iter().map(|(m, e)| format!("{m:.3}±{e:.3}")).collect::<Vec<_>>().join(" ");

    let unitary = series(1.0, R_MAIN);
    let bounded = unitary.last().unwrap().0 - unitary[0].0 <= 1.0;
    passed &= bounded;
    detail.push(format!("I2(p=1) [{}] {}", fmt(&unitary), if bounded { "bounded" } else { "grows" }));

    let volume = series(0.15, R_MAIN);
    let grows = volume.windows(2).all(|w| w[1].0 > w[0].0);
    passed &= grows;
    detail.push(format!("I2(0.15) [{}] {}", fmt(&volume), if grows { "grows" } else { "does not grow" }));

    let area = series(0.35, R_MAIN);
    let decays = area.windows(2).all(|w| w[1].0 < w[0].0);
    passed &= decays;
    detail.push(format!("I2(0.35) [{}] {}", fmt(&area), if decays { "decays" } else { "does not decay" }));

    outcome(passed, detail.join("; "))
}

/// One interior maximum; away from it the curve falls within two combined
/// standard errors of monotone.
fn single_peak(c: &SlcCurve) -> bool {
    let pts = &c.points;
    let top = (0..pts.len()).max_by(|&a, &b| pts[a].mean_slc.total_cmp(&pts[b].mean_slc)).unwrap();
    if top == 0 || top == pts.len() - 1 {
        return false;
    }
    let tolerance = |a: usize, b: usize| 2.0 * (pts[a].stderr.powi(2) + pts[b].stderr.powi(2)).sqrt();
    let rising = (0..top).all(|i| pts[i].mean_slc <= pts[i + 1].mean_slc + tolerance(i, i + 1));
    let falling = (top..pts.len() - 1).all(|i| pts[i + 1].mean_slc <= pts[i].mean_slc + tolerance(i, i + 1));
    rising && falling
}

fn slc_shift() -> Outcome {
    let ps: Vec<f64> = (0..11).map(|i| 0.05 + 0.025 * i as f64).collect();
    let mut peaks = Vec::new();
    let mut passed = true;
    for n in [16usize, 32, 64] {
        let c = slc_curve(&ModelParams::new(0.0, 0.8, n, SEED), &ps, 200).expect("SLC scan");
        passed &= single_peak(&c);
        match c.peak {
            Some(pk) => peaks.push((n, pk.p, pk.height)),
            None => passed = false,
        }
    }
    passed &= peaks.len() == 3 && peaks.windows(2).all(|w| w[1].1 < w[0].1);
    let listed: Vec<String> = peaks.iter().map(|(n, p, h)| format!("N={n}: p={p:.4} height {h:.1}")).collect();
    outcome(passed, format!("peaks [{}]", listed.join(", ")))
}

fn distance_localization() -> Outcome {
    let run = |p: f64| distance_telemetry(&ModelParams::new(p, 0.2, 48, SEED), 100, 0.25, Schedule::Parallel).expect("telemetry");
    let critical = run(0.15);
    let localized = run(0.4);
    let slope = |e: &zxperc::percolation::DistanceEnsemble| e.tail_slope.map_or("n/a".to_string(), |s| format!("{s:.2}"));
    outcome(
        critical.fraction_beyond_n > 0.0 && LOCALIZATION_CONTRAST * localized.fraction_beyond_n <= critical.fraction_beyond_n,
        format!(
            "fraction d>N: p=0.15 {:.4} ({} of {}), p=0.4 {:.4} ({} of {}); tail slopes {} / {}",
            critical.fraction_beyond_n,
            critical.beyond_n,
            critical.window_events,
            localized.fraction_beyond_n,
            localized.beyond_n,
            localized.window_events,
            slope(&critical),
            slope(&localized)
        ),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let mut failures = Vec::new();
    for e in Experiment::ALL {
        let mut cfg = ExperimentConfig::new(e, vec![0.1, 0.2, 0.3, 0.4], vec![0.1, 0.8], vec![6, 12], 8);
        cfg.master_seed = SEED;
        cfg.marked_points = vec![(0.15, 0.1)];
        let one = with_workers(1, || compute(&cfg)).and_then(|r| r);
        let three = with_workers(3, || compute(&cfg)).and_then(|r| r);
        let same = match (&one, &three) {
            (Ok(a), Ok(b)) => a.files().iter().map(|f| &f.contents).eq(b.files().iter().map(|f| &f.contents)),
            _ => false,
        };
        cfg.output_dir = dir.path().join(format!("{}-a", e.name()));
        cfg.workers = 1;
        let a = run_experiment(&cfg);
        cfg.output_dir = dir.path().join(format!("{}-b", e.name()));
        cfg.workers = 2;
        let b = run_experiment(&cfg);
        let on_disk = match (a, b) {
            (Ok(a), Ok(b)) => {
                a.files == b.files
                    && a.files.iter().all(|f| {
                        std::fs::read(dir.path().join(format!("{}-a", e.name())).join(&f.name)).ok()
                            == std::fs::read(dir.path().join(format!("{}-b", e.name())).join(&f.name)).ok()
                    })
            }
            _ => false,
        };
        if !(same && on_disk) {
            failures.push(e.name());
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} experiments byte-identical across 1, 2 and 3 workers", Experiment::ALL.len())
        } else {
            format!("differences in {}", failures.join(", "))
        },
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 10] = [
        (1, "stabilizer_oracle", stabilizer_equivalence),
        (2, "zx_oracle", zx_equivalence),
        (3, "mi_crossing", mi_location),
        (4, "percolation_threshold", percolation_threshold),
        (5, "coincidence", coincidence),
        (6, "exponent_consistency", exponent_consistency),
        (7, "phase_structure", phase_structure),
        (8, "slc_peak_shift", slc_shift),
        (9, "distance_localization", distance_localization),
        (10, "determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let selected = |id: u32, name: &str| filter.is_empty() || filter.iter().any(|f| f == &id.to_string() || name.contains(f.as_str()));

    let mut failed = 0;
    let mut ran = 0;
    for (id, name, run) in criteria {
        if !selected(id, name) {
            continue;
        }
        let t = Instant::now();
        let o = run();
        ran += 1;
        if !o.passed {
            failed += 1;
        }
        println!("{} {id:>2} {name}: {} [{:.0?}]", if o.passed { "PASS" } else { "FAIL" }, o.detail, t.elapsed());
    }
    println!("acceptance: {} of {ran} passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
