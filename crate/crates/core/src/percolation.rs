//! Classical networks read off simplified diagrams, and the percolation
//! observables built on them.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{sample_circuit, ModelParams};
use crate::error::{Error, Result};
use crate::seeds;
use crate::zx::{
    clifford_simplify, clifford_simplify_with, diagram_from_circuit, histogram_tail_slope, late_window_cut, DiagramDump, Schedule,
    ZxDiagram,
};

/// Undirected graph with distinguished input and output nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalNetwork {
    pub n_nodes: usize,
    pub edges: Vec<(u32, u32)>,
    pub input_nodes: Vec<u32>,
    pub output_nodes: Vec<u32>,
}

impl ClassicalNetwork {
    pub fn new(n_nodes: usize, edges: Vec<(u32, u32)>, input_nodes: Vec<u32>, output_nodes: Vec<u32>) -> Result<Self> {
        let in_range = |v: &u32| (*v as usize) < n_nodes;
        if !edges.iter().all(|(a, b)| in_range(a) && in_range(b)) {
            return Err(Error::invalid("edge references a missing node"));
        }
        if !input_nodes.iter().chain(&output_nodes).all(in_range) {
            return Err(Error::invalid("boundary node out of range"));
        }
        if input_nodes.iter().any(|i| output_nodes.contains(i)) {
            return Err(Error::invalid("a node is both input and output"));
        }
        Ok(ClassicalNetwork { n_nodes, edges, input_nodes, output_nodes })
    }

    /// One node per live spider, numbered in id order; one link per wire.
    pub fn from_diagram(d: &ZxDiagram) -> Self {
        let mut index = vec![u32::MAX; d.capacity()];
        for (k, v) in d.spider_ids().enumerate() {
            index[v as usize] = k as u32;
        }
        let edges = d
            .wires()
            .into_iter()
            .map(|(a, b, _)| (index[a as usize], index[b as usize]))
            .collect();
        ClassicalNetwork {
            n_nodes: d.num_spiders(),
            edges,
            input_nodes: d.inputs().iter().map(|&v| index[v as usize]).collect(),
            output_nodes: d.outputs().iter().map(|&v| index[v as usize]).collect(),
        }
    }

    pub fn from_dump(dump: &DiagramDump) -> Result<Self> {
        Ok(Self::from_diagram(&ZxDiagram::from_dump(dump)?))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(Self::from_diagram(&ZxDiagram::from_json(text)?))
    }

    fn neighbours(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n_nodes];
        for &(a, b) in &self.edges {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
        adj
    }
}

/// Whether some input reaches some output (breadth-first search).
pub fn is_percolating(net: &ClassicalNetwork) -> bool {
    let adj = net.neighbours();
    let mut is_output = vec![false; net.n_nodes];
    for &o in &net.output_nodes {
        is_output[o as usize] = true;
    }
    let mut seen = vec![false; net.n_nodes];
    let mut queue: VecDeque<u32> = VecDeque::new();
    for &i in &net.input_nodes {
        if !seen[i as usize] {
            seen[i as usize] = true;
            queue.push_back(i);
        }
    }
    while let Some(u) = queue.pop_front() {
        if is_output[u as usize] {
            return true;
        }
        for &w in &adj[u as usize] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                queue.push_back(w);
            }
        }
    }
    false
}

/// Disjoint sets with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    pub fn find(&mut self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            let grand = self.parent[self.parent[v as usize] as usize];
            self.parent[v as usize] = grand;
            v = grand;
        }
        v
    }

    pub fn union(&mut self, a: u32, b: u32) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
    }

    pub fn component_size(&mut self, v: u32) -> usize {
        let r = self.find(v);
        self.size[r as usize] as usize
    }
}

fn union_find(net: &ClassicalNetwork) -> UnionFind {
    let mut uf = UnionFind::new(net.n_nodes);
    for &(a, b) in &net.edges {
        uf.union(a, b);
    }
    uf
}

/// Component sizes in decreasing order; they sum to `n_nodes`.
pub fn cluster_sizes(net: &ClassicalNetwork) -> Vec<usize> {
    let mut uf = union_find(net);
    let mut sizes: Vec<usize> = Vec::new();
    for v in 0..net.n_nodes as u32 {
        if uf.find(v) == v {
            sizes.push(uf.component_size(v));
        }
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

/// Percolation predicate computed with union-find; agrees with
/// [`is_percolating`].
pub fn is_percolating_union_find(net: &ClassicalNetwork) -> bool {
    let mut uf = union_find(net);
    let roots: std::collections::HashSet<u32> = net.input_nodes.iter().map(|&i| uf.find(i)).collect();
    net.output_nodes.iter().any(|&o| roots.contains(&uf.find(o)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PercolationSample {
    pub p: f64,
    pub r: f64,
    pub n_qubits: usize,
    pub connected: bool,
    pub largest_cluster: usize,
    pub second_largest_cluster: usize,
    pub seed: u64,
}

/// Which observables a realization has to produce. Cluster statistics need
/// the whole simplified diagram; the percolation predicate alone can skip
/// every component that cannot join an input to an output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Observables {
    PathOnly,
    Clusters,
}

/// Simplified diagram of one sampled circuit; `params.seed` is the
/// realization seed.
pub fn simplified_network(params: &ModelParams, observables: Observables) -> Result<ClassicalNetwork> {
    let c = sample_circuit(params)?;
    let mut d = diagram_from_circuit(&c, None)?;
    if observables == Observables::PathOnly {
        d.prune_non_spanning();
    }
    clifford_simplify(&mut d, false);
    Ok(ClassicalNetwork::from_diagram(&d))
}

/// One pass through the pipeline: sample, build, simplify, map, search.
pub fn percolation_realization(params: &ModelParams, observables: Observables) -> Result<PercolationSample> {
    let net = simplified_network(params, observables)?;
    let connected = is_percolating(&net);
    let (largest, second) = match observables {
        Observables::PathOnly => (0, 0),
        Observables::Clusters => {
            let sizes = cluster_sizes(&net);
            (sizes.first().copied().unwrap_or(0), sizes.get(1).copied().unwrap_or(0))
        }
    };
    Ok(PercolationSample {
        p: params.p,
        r: params.r,
        n_qubits: params.n_qubits,
        connected,
        largest_cluster: largest,
        second_largest_cluster: second,
        seed: params.seed,
    })
}

/// Realizations at one parameter point; `params.seed` is the master seed.
pub fn percolation_samples(params: &ModelParams, n_realizations: usize, observables: Observables) -> Result<Vec<PercolationSample>> {
    params.validate()?;
    let key = crate::circuit::ensemble::params_key(params);
    let label = match observables {
        Observables::PathOnly => "perc",
        Observables::Clusters => "slc",
    };
    (0..n_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let seed = seeds::derive_seed(params.seed, label, &key, i);
            percolation_realization(&params.clone().with_seed(seed), observables)
        })
        .collect()
}

/// `P_path` at one parameter point, with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PathPoint {
    pub p: f64,
    pub r: f64,
    pub n_qubits: usize,
    pub realizations: usize,
    pub p_path: f64,
    pub stderr: f64,
}

impl PathPoint {
    pub fn from_counts(params: &ModelParams, hits: usize, m: usize) -> Self {
        let p_path = hits as f64 / m as f64;
        PathPoint {
            p: params.p,
            r: params.r,
            n_qubits: params.n_qubits,
            realizations: m,
            p_path,
            stderr: (p_path * (1.0 - p_path) / m as f64).sqrt(),
        }
    }
}

/// `P_path` over a grid of measurement probabilities at fixed `r` and `N`.
/// `base.p` is ignored and `base.seed` is the master seed.
pub fn estimate_p_path(base: &ModelParams, ps: &[f64], n_realizations: usize) -> Result<Vec<PathPoint>> {
    if n_realizations == 0 {
        return Err(Error::invalid("n_realizations must be positive"));
    }
    ps.iter()
        .map(|&p| {
            let params = ModelParams { p, ..base.clone() };
            let hits = percolation_samples(&params, n_realizations, Observables::PathOnly)?
                .iter()
                .filter(|s| s.connected)
                .count();
            Ok(PathPoint::from_counts(&params, hits, n_realizations))
        })
        .collect()
}

/// Mean second-largest cluster at one parameter point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlcPoint {
    pub p: f64,
    pub r: f64,
    pub n_qubits: usize,
    pub realizations: usize,
    pub mean_slc: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlcCurve {
    pub points: Vec<SlcPoint>,
    /// Peak location from a parabola through the maximum and its two
    /// neighbours; `None` when the curve is flat or peaks at the grid edge.
    pub peak: Option<SlcPeak>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlcPeak {
    pub p: f64,
    /// Half the local grid spacing.
    pub width: f64,
    pub height: f64,
}

pub fn slc_curve(base: &ModelParams, ps: &[f64], n_realizations: usize) -> Result<SlcCurve> {
    if n_realizations < 2 {
        return Err(Error::invalid("n_realizations must be at least 2"));
    }
    let points = ps
        .iter()
        .map(|&p| {
            let params = ModelParams { p, ..base.clone() };
            let values: Vec<f64> = percolation_samples(&params, n_realizations, Observables::Clusters)?
                .iter()
                .map(|s| s.second_largest_cluster as f64)
                .collect();
            let stat = crate::circuit::EnsembleStat::from_samples(&values)?;
            Ok(SlcPoint {
                p,
                r: base.r,
                n_qubits: base.n_qubits,
                realizations: n_realizations,
                mean_slc: stat.mean,
                stderr: stat.stderr,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = points.iter().map(|q| q.p).collect();
    let ys: Vec<f64> = points.iter().map(|q| q.mean_slc).collect();
    Ok(SlcCurve { peak: quadratic_peak(&xs, &ys), points })
}

/// Vertex of the parabola through the discrete maximum and its neighbours.
pub fn quadratic_peak(xs: &[f64], ys: &[f64]) -> Option<SlcPeak> {
    let k = ys
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))?
        .0;
    if k == 0 || k + 1 >= ys.len() {
        return None;
    }
    let (x0, x1, x2) = (xs[k - 1], xs[k], xs[k + 1]);
    let (y0, y1, y2) = (ys[k - 1], ys[k], ys[k + 1]);
    let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    if !(a < 0.0) {
        return None;
    }
    let p = (-b / (2.0 * a)).clamp(x0, x2);
    let c = y1 - a * x1 * x1 - b * x1;
    Some(SlcPeak { p, width: (x2 - x0) / 4.0, height: a * p * p + b * p + c })
}

/// Rewrite distances pooled over realizations at one parameter point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistanceEnsemble {
    pub p: f64,
    pub r: f64,
    pub n_qubits: usize,
    pub realizations: usize,
    pub window: f64,
    /// `(step, mean distance, events)` over every realization.
    pub mean_by_step: Vec<(u32, f64, u64)>,
    /// Unit-width bins of late-window distances, summed over realizations.
    pub histogram: Vec<u64>,
    pub window_events: u64,
    /// Late-window events with distance above `N`.
    pub beyond_n: u64,
    /// `beyond_n / window_events`: the normalized histogram mass above `N`.
    pub fraction_beyond_n: f64,
    pub d_max: f64,
    pub max_distance: f64,
    pub tail_slope: Option<f64>,
}

/// Simplifies `n_realizations` sampled circuits with the given schedule and
/// pools their rewrite distances. Each realization's late window is its own
/// final `window` fraction of steps. `params.seed` is the master seed.
pub fn distance_telemetry(params: &ModelParams, n_realizations: usize, window: f64, schedule: Schedule) -> Result<DistanceEnsemble> {
    params.validate()?;
    if n_realizations == 0 {
        return Err(Error::invalid("n_realizations must be positive"));
    }
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::invalid(format!("window = {window} outside (0, 1]")));
    }
    let key = crate::circuit::ensemble::params_key(params);
    let runs = (0..n_realizations as u64)
        .into_par_iter()
        .map(|i| {
            let seed = seeds::derive_seed(params.seed, "distance", &key, i);
            let c = sample_circuit(&params.clone().with_seed(seed))?;
            let mut d = diagram_from_circuit(&c, None)?;
            Ok(clifford_simplify_with(&mut d, true, schedule).events)
        })
        .collect::<Result<Vec<_>>>()?;

    let n = params.n_qubits as f64;
    let d_max = 17f64.sqrt() * n;
    let mut histogram = vec![0u64; d_max.ceil() as usize + 1];
    let mut by_step: std::collections::BTreeMap<u32, (f64, u64)> = Default::default();
    let (mut window_events, mut beyond_n, mut max_distance) = (0u64, 0u64, 0.0f64);
    for events in &runs {
        let cut = late_window_cut(events, window);
        for e in events {
            let slot = by_step.entry(e.step).or_default();
            slot.0 += e.distance;
            slot.1 += 1;
            max_distance = max_distance.max(e.distance);
            if e.step > cut {
                let bin = (e.distance.floor() as usize).min(histogram.len() - 1);
                histogram[bin] += 1;
                window_events += 1;
                beyond_n += (e.distance > n) as u64;
            }
        }
    }
    Ok(DistanceEnsemble {
        p: params.p,
        r: params.r,
        n_qubits: params.n_qubits,
        realizations: n_realizations,
        window,
        mean_by_step: by_step.into_iter().map(|(s, (t, k))| (s, t / k as f64, k)).collect(),
        tail_slope: histogram_tail_slope(&histogram),
        histogram,
        window_events,
        beyond_n,
        fraction_beyond_n: if window_events == 0 { 0.0 } else { beyond_n as f64 / window_events as f64 },
        d_max,
        max_distance,
    })
}

pub fn path_points_to_csv(points: &[PathPoint]) -> String {
    let mut out = String::from("p,r,N,M,P_path,stderr\n");
    for q in points {
        out.push_str(&format!("{},{},{},{},{},{}\n", q.p, q.r, q.n_qubits, q.realizations, q.p_path, q.stderr));
    }
    out
}

pub fn slc_points_to_csv(points: &[SlcPoint]) -> String {
    let mut out = String::from("p,r,N,mean_SLC,stderr\n");
    for q in points {
        out.push_str(&format!("{},{},{},{},{}\n", q.p, q.r, q.n_qubits, q.mean_slc, q.stderr));
    }
    out
}
