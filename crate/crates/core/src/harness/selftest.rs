//! Oracle suites runnable from the command line: stabilizer entropies
//! against a dense statevector, rewrites against dense tensor contraction,
//! percolation against union-find, fitters against their own models.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::circuit::{sample_circuit, ControlSide, GateKind, InitialState, ModelParams};
use crate::oracle::DenseState;
use crate::percolation::{is_percolating, is_percolating_union_find, ClassicalNetwork};
use crate::scaling::{extrapolate_threshold, fermi, fermionic_fit, Observation, SizePoint};
use crate::seeds::rng_for;
use crate::zx::{
    clifford_simplify_with, diagram_from_circuit, evaluate_dense, insert_boundary_dummy, is_graph_like, proportional,
    rule_copy, rule_fusion, rule_hopf, rule_identity, rule_local_complement, rule_pivot, to_graph_like, Color, DenseMap,
    EdgeType, Position, Schedule, ZxDiagram, DEFAULT_LEG_CAP,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1 << n) - 1).map(move |m| (0..n).filter(|&s| m >> s & 1 == 1).collect())
}

/// Random circuits with `N <= 6` and depth `<= 6`; after every brick, the
/// entropy of every proper subset of sites must agree with the dense state.
pub fn stabilizer_oracle(cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut compared = 0usize;
    for case in 0..cases {
        let n = [2, 4, 6][case % 3];
        let depth = rng.gen_range(1..=6);
        let init = if rng.gen_bool(0.5) { InitialState::BellPairs } else { InitialState::Product };
        let params = ModelParams::new(rng.gen(), rng.gen(), n, rng.gen())
            .with_depth(depth)
            .with_initial_state(init);
        let c = sample_circuit(&params).expect("valid parameters");
        let mut t = init.prepare(n).expect("even N");
        let mut d = match init {
            InitialState::BellPairs => DenseState::bell_pairs(n),
            InitialState::Product => DenseState::zeros(n),
        }
        .expect("small N");
        let (mut rt, mut rd) = (rng_for(c.seed, 2), rng_for(c.seed, 3));
        for b in &c.bricks {
            let (l, r) = b.sites();
            let step = match b.kind {
                GateKind::Cnot(side) => {
                    let (ctl, tgt) = if side == ControlSide::Left { (l, r) } else { (r, l) };
                    d.apply_cnot(ctl, tgt);
                    t.apply_cnot(ctl, tgt)
                }
                GateKind::Swap => {
                    d.apply_swap(l, r);
                    t.apply_swap(l, r)
                }
                GateKind::Identity => Ok(()),
                GateKind::BellMeasure => {
                    d.measure_bell_pair(l, r, &mut rd);
                    t.measure_bell_pair(l, r, &mut rt)
                }
            };
            if let Err(e) = step {
                return Check::new("stabilizer_oracle", false, format!("case {case}: {e}"));
            }
            for region in subsets(n) {
                let exact = t.entanglement_entropy(&region);
                let dense = d.entropy(&region);
                if (dense - exact as f64).abs() > 1e-9 {
                    return Check::new(
                        "stabilizer_oracle",
                        false,
                        format!("case {case} region {region:?}: tableau {exact}, dense {dense}"),
                    );
                }
                compared += 1;
            }
        }
    }
    Check::new(
        "stabilizer_oracle",
        true,
        format!("{cases} circuits, {compared} entropies equal"),
    )
}

fn random_diagram(rng: &mut ChaCha8Rng, graph_like: bool) -> ZxDiagram {
    let mut d = ZxDiagram::new();
    let at = |k: usize| Position::new(k as f64, 0.5 * k as f64);
    let (ni, no) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
    let ins: Vec<u32> = (0..ni).map(|k| d.add_input(at(k))).collect();
    let outs: Vec<u32> = (0..no).map(|k| d.add_output(at(k))).collect();
    let k = rng.gen_range(1..=6);
    let ids: Vec<u32> = (0..k)
        .map(|i| {
            let color = if !graph_like && rng.gen_bool(0.5) { Color::X } else { Color::Z };
            d.add_spider(color, rng.gen_range(0..4), at(i))
        })
        .collect();
    for _ in 0..rng.gen_range(0..=2 * k) {
        let (a, b) = (ids[rng.gen_range(0..k)], ids[rng.gen_range(0..k)]);
        if graph_like {
            if a != b && !d.connected(a, b) {
                d.add_edge(a, b, EdgeType::Hadamard);
            }
        } else {
            let ty = if rng.gen_bool(0.5) { EdgeType::Hadamard } else { EdgeType::Plain };
            d.add_edge(a, b, ty);
        }
    }
    for &b in ins.iter().chain(&outs) {
        let ty = if rng.gen_bool(0.5) { EdgeType::Hadamard } else { EdgeType::Plain };
        d.add_edge(b, ids[rng.gen_range(0..k)], ty);
    }
    d
}

const RULES: [&str; 9] = [
    "fusion",
    "copy",
    "hopf",
    "identity",
    "graph_like",
    "local_complement",
    "pivot",
    "boundary_dummy",
    "clifford_simplify",
];

/// Applies rule `which` at the first location (in id order) where it is
/// applicable. Returns `false` if it applies nowhere.
fn apply_somewhere(d: &mut ZxDiagram, which: usize) -> bool {
    let ids: Vec<u32> = d.spider_ids().collect();
    let pairs = || ids.iter().flat_map(|&a| ids.iter().map(move |&b| (a, b))).filter(|(a, b)| a != b);
    let try_on = |d: &mut ZxDiagram, f: &dyn Fn(&mut ZxDiagram) -> crate::Result<()>| {
        let mut trial = d.clone();
        if f(&mut trial).is_ok() {
            *d = trial;
            true
        } else {
            false
        }
    };
    match which {
        0 => pairs().any(|(a, b)| try_on(d, &|d| rule_fusion(d, a, b))),
        1 => pairs().any(|(a, b)| try_on(d, &|d| rule_copy(d, a, b))),
        2 => pairs().any(|(a, b)| try_on(d, &|d| rule_hopf(d, a, b))),
        3 => ids.iter().any(|&v| try_on(d, &|d| rule_identity(d, v))),
        4 => {
            to_graph_like(d);
            is_graph_like(d).is_ok()
        }
        5 => ids.iter().any(|&v| try_on(d, &|d| rule_local_complement(d, v))),
        6 => pairs().any(|(a, b)| try_on(d, &|d| rule_pivot(d, a, b))),
        7 => {
            let boundary: Vec<u32> = d.inputs().iter().chain(d.outputs()).copied().collect();
            boundary.iter().any(|&b| try_on(d, &|d| insert_boundary_dummy(d, b).map(|_| ())))
        }
        _ => {
            clifford_simplify_with(d, false, Schedule::Sweep);
            is_graph_like(d).is_ok()
        }
    }
}

fn same_map(before: &DenseMap, after: &ZxDiagram) -> Result<bool, String> {
    let after = evaluate_dense(after, DEFAULT_LEG_CAP).map_err(|e| e.to_string())?;
    Ok(proportional(before, &after, 1e-9))
}

/// Every rewrite, the graph-like conversion and full simplification
/// (both schedules, on random circuits) against dense contraction. Counts
/// only comparisons with a nonzero map.
pub fn zx_oracle(cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_rule = [0usize; RULES.len() + 2];
    let mut done = 0usize;
    let mut attempts = 0usize;
    while done < cases {
        attempts += 1;
        if attempts > 50 * cases {
            return Check::new("zx_oracle", false, format!("only {done} applicable cases in {attempts} attempts"));
        }
        let slot = done % per_rule.len();
        let (mut d, label) = if slot < RULES.len() {
            let graph_like = matches!(slot, 5 | 6);
            (random_diagram(&mut rng, graph_like), RULES[slot])
        } else {
            let n = [2, 4, 6][rng.gen_range(0..3)];
            let params = ModelParams::new(rng.gen(), rng.gen(), n, rng.gen()).with_depth(rng.gen_range(1..=6));
            let c = sample_circuit(&params).expect("valid parameters");
            (diagram_from_circuit(&c, None).expect("valid circuit"), "circuit_simplify")
        };
        let before = match evaluate_dense(&d, DEFAULT_LEG_CAP) {
            Ok(m) if !m.is_zero(1e-9) => m,
            _ => continue,
        };
        let applied = match slot {
            s if s < RULES.len() => apply_somewhere(&mut d, s),
            s => {
                let schedule = if s == RULES.len() { Schedule::Sweep } else { Schedule::Parallel };
                clifford_simplify_with(&mut d, false, schedule);
                is_graph_like(&d).is_ok()
            }
        };
        if !applied {
            continue;
        }
        if let Err(e) = d.check_consistency() {
            return Check::new("zx_oracle", false, format!("{label}: inconsistent diagram: {e}"));
        }
        match same_map(&before, &d) {
            Ok(true) => {}
            Ok(false) => return Check::new("zx_oracle", false, format!("{label} changed the linear map")),
            Err(e) => return Check::new("zx_oracle", false, format!("{label}: {e}")),
        }
        per_rule[slot] += 1;
        done += 1;
    }
    let names: Vec<String> = RULES
        .iter()
        .copied()
        .chain(["circuit_simplify_sweep", "circuit_simplify_parallel"])
        .zip(per_rule)
        .map(|(r, k)| format!("{r}={k}"))
        .collect();
    Check::new("zx_oracle", true, format!("{done} rewrites preserve the map ({})", names.join(" ")))
}

/// Breadth-first search against union-find on random sparse graphs.
pub fn percolation_oracle(cases: usize, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0;
    for case in 0..cases {
        let n = rng.gen_range(4..400u32);
        let m = rng.gen_range(0..=n);
        let edges = (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
        let k = rng.gen_range(1..=n / 4);
        let net = ClassicalNetwork::new(n as usize, edges, (0..k).collect(), (n - k..n).collect()).expect("valid network");
        let bfs = is_percolating(&net);
        if bfs != is_percolating_union_find(&net) {
            return Check::new("percolation_oracle", false, format!("case {case} disagrees"));
        }
        hits += bfs as usize;
    }
    Check::new("percolation_oracle", true, format!("{cases} graphs agree, {hits} percolating"))
}

/// The fitters recover the parameters of data drawn from their own models.
pub fn fit_oracle() -> Check {
    let data: Vec<Observation> = (0..11)
        .map(|i| {
            let x = 0.15 + 0.02 * i as f64;
            Observation { x, y: fermi(x, 0.25, 0.02), err: 0.01 }
        })
        .collect();
    let fit = match fermionic_fit(&data, 64, 4.0 / 3.0) {
        Ok(f) => f,
        Err(e) => return Check::new("fit_oracle", false, e.to_string()),
    };
    let points: Vec<SizePoint> = [24usize, 48, 96, 192]
        .iter()
        .map(|&n| SizePoint { n, p_c: 0.251 + 0.3 * (n as f64).powf(-0.75), err: 0.01 })
        .collect();
    let fss = match extrapolate_threshold(&points, 4.0 / 3.0, 0.05) {
        Ok(e) => e,
        Err(e) => return Check::new("fit_oracle", false, e.to_string()),
    };
    let ok = (fit.p_c - 0.25).abs() < 1e-6 && (fss.p_c_infinity - 0.251).abs() < 1e-9 && fss.sigma2 < 1e-20;
    Check::new(
        "fit_oracle",
        ok,
        format!("fermionic p_c = {:.9}, extrapolated p_c = {:.9}", fit.p_c, fss.p_c_infinity),
    )
}

/// The oracle suites at their default sizes.
pub fn selftest(seed: u64) -> Vec<Check> {
    vec![
        stabilizer_oracle(500, seed),
        zx_oracle(1100, seed),
        percolation_oracle(2000, seed),
        fit_oracle(),
    ]
}
