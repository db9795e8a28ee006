use serde::Serialize;

use super::rules::{identity_graph_like, insert_boundary_dummy, pivot_pair_ok, rule_local_complement, rule_pivot, to_graph_like};
use super::{Color, EdgeType, RewriteEvent, ZxDiagram};

#[derive(Clone, Debug, Serialize)]
pub struct SimplifyReport {
    /// Passes in which at least one rule fired.
    pub steps: u32,
    pub spiders_before: usize,
    pub spiders_after: usize,
    pub events: Vec<RewriteEvent>,
}

/// Order in which rewrites are applied within a pass.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// Scan every spider in ascending id order and apply each match as soon
    /// as it is found, so one pass can cascade along the circuit.
    #[default]
    Sweep,
    /// Apply a rule at every location that matches when the pass begins,
    /// skipping matches that overlap one already applied; each pass is one
    /// step of simultaneous, non-overlapping rewrites.
    Parallel,
}

/// Clifford simplification to a fixed point with the default schedule.
pub fn clifford_simplify(d: &mut ZxDiagram, telemetry: bool) -> SimplifyReport {
    clifford_simplify_with(d, telemetry, Schedule::Sweep)
}

/// Graph-like conversion, then repeated passes of identity removal, local
/// complementation and pivoting until a full round changes nothing. A step
/// is a pass in which something fired. Spiders are visited in ascending id
/// order so the result is a function of the input and the schedule alone.
pub fn clifford_simplify_with(d: &mut ZxDiagram, telemetry: bool, schedule: Schedule) -> SimplifyReport {
    d.set_telemetry(telemetry);
    let spiders_before = d.num_spiders();
    let steps_before = d.steps();
    to_graph_like(d);
    let mut claims = Claims { enabled: schedule == Schedule::Parallel, ..Claims::default() };
    // spiders that may match each rule; a rewrite creates matches only at
    // spiders whose phase or wires it changed
    let mut work: [Vec<u32>; 3] = match schedule {
        Schedule::Sweep => Default::default(),
        Schedule::Parallel => std::array::from_fn(|_| d.spider_ids().collect()),
    };
    loop {
        let mut fired = false;
        for (rule, apply) in [try_identity, try_local_complement, try_pivot].into_iter().enumerate() {
            d.begin_pass();
            claims.next_pass(d);
            let mut list = match schedule {
                Schedule::Sweep => d.spider_ids().collect(),
                Schedule::Parallel => std::mem::take(&mut work[rule]),
            };
            list.sort_unstable();
            list.dedup();
            let mut touched = Vec::new();
            for v in list {
                match apply(d, v, &claims) {
                    Attempt::Applied(spiders) => {
                        claims.claim(d, &spiders);
                        touched.extend(spiders);
                    }
                    Attempt::Blocked => work[rule].push(v),
                    Attempt::NoMatch => {}
                }
            }
            if schedule == Schedule::Parallel {
                for w in &mut work {
                    w.extend_from_slice(&touched);
                }
            }
            fired |= d.pass_fired();
        }
        if !fired {
            break;
        }
    }
    #[cfg(debug_assertions)]
    if d.capacity() <= 4096 {
        debug_assert_eq!(super::rules::is_graph_like(d), Ok(()));
    }
    SimplifyReport {
        steps: d.steps() - steps_before,
        spiders_before,
        spiders_after: d.num_spiders(),
        events: d.take_events(),
    }
}

enum Attempt {
    /// Fired, changing the phase or wires of these spiders.
    Applied(Vec<u32>),
    /// Matches, but overlaps a rewrite made earlier in the pass.
    Blocked,
    NoMatch,
}

fn try_identity(d: &mut ZxDiagram, v: u32, claims: &Claims) -> Attempt {
    if !d.contains(v) || d.is_boundary(v) {
        return Attempt::NoMatch;
    }
    if d.degree(v) == 0 {
        d.remove_spider(v);
        return Attempt::NoMatch;
    }
    if d.phase(v) != 0 || d.degree(v) != 2 || d.connected(v, v) {
        return Attempt::NoMatch;
    }
    let ends: Vec<u32> = d.edges(v).iter().map(|e| e.0).collect();
    if claims.taken(v) || ends.iter().any(|&w| claims.taken(w)) {
        return Attempt::Blocked;
    }
    // fusing the two ends can cancel wires at their neighbours
    let mut touched = ends.clone();
    for &w in &ends {
        touched.extend(d.edges(w).iter().map(|e| e.0));
    }
    identity_graph_like(d, v);
    Attempt::Applied(touched)
}

fn try_local_complement(d: &mut ZxDiagram, v: u32, claims: &Claims) -> Attempt {
    if !d.contains(v) || d.phase(v) % 2 == 0 {
        return Attempt::NoMatch;
    }
    let nbrs: Vec<u32> = d.edges(v).iter().map(|e| e.0).collect();
    if claims.taken(v) || nbrs.iter().any(|&w| claims.taken(w)) {
        return Attempt::Blocked;
    }
    match rule_local_complement(d, v) {
        Ok(()) => Attempt::Applied(nbrs),
        Err(_) => Attempt::NoMatch,
    }
}

fn try_pivot(d: &mut ZxDiagram, s: u32, claims: &Claims) -> Attempt {
    if !pivot_candidate(d, s) {
        return Attempt::NoMatch;
    }
    let Some(t) = pivot_partner(d, s) else {
        return Attempt::NoMatch;
    };
    let near = |v: u32| claims.taken(v) || d.edges(v).iter().any(|e| claims.taken(e.0));
    if near(s) || near(t) {
        return Attempt::Blocked;
    }
    for b in boundary_neighbours(d, s).chain(boundary_neighbours(d, t)).collect::<Vec<_>>() {
        insert_boundary_dummy(d, b).expect("boundary wire");
    }
    let touched: Vec<u32> = d.edges(s).iter().chain(d.edges(t)).map(|e| e.0).collect();
    rule_pivot(d, s, t).expect("pivot precondition checked");
    Attempt::Applied(touched)
}

fn boundary_neighbours(d: &ZxDiagram, v: u32) -> impl Iterator<Item = u32> + '_ {
    d.edges(v).iter().map(|e| e.0).filter(|&w| d.is_boundary(w))
}

/// Interior Pauli Z spider whose wires are Hadamard wires to interior Z
/// spiders, apart from at most one boundary wire.
fn pivot_candidate(d: &ZxDiagram, s: u32) -> bool {
    if !d.contains(s) || d.is_boundary(s) || d.phase(s) % 2 != 0 {
        return false;
    }
    let mut boundary = 0;
    for &(w, ty) in d.edges(s) {
        if w == s {
            return false;
        }
        if d.is_boundary(w) {
            boundary += 1;
        } else if ty != EdgeType::Hadamard || d.spider(w).expect("live").color != Color::Z {
            return false;
        }
    }
    boundary <= 1
}

/// Spiders already rewritten or neighbouring a rewrite in the current pass.
/// A pass applies only matches that do not overlap, so every rewrite in it
/// sees the diagram as it was when the pass began.
#[derive(Default)]
struct Claims {
    enabled: bool,
    stamp: Vec<u32>,
    pass: u32,
}

impl Claims {
    fn next_pass(&mut self, d: &ZxDiagram) {
        self.pass += 1;
        self.stamp.resize(d.capacity(), 0);
    }

    fn taken(&self, v: u32) -> bool {
        self.enabled && self.stamp.get(v as usize).is_none_or(|&s| s == self.pass)
    }

    fn claim(&mut self, d: &ZxDiagram, spiders: &[u32]) {
        self.stamp.resize(d.capacity(), self.pass);
        for &v in spiders {
            self.stamp[v as usize] = self.pass;
        }
    }
}

fn pivot_partner(d: &ZxDiagram, s: u32) -> Option<u32> {
    let bs = boundary_neighbours(d, s).count();
    d.edges(s)
        .iter()
        .filter(|&&(t, ty)| ty == EdgeType::Hadamard && !d.is_boundary(t))
        .map(|e| e.0)
        .filter(|&t| pivot_candidate(d, t) && bs + boundary_neighbours(d, t).count() <= 1)
        .filter(|&t| pivot_pair_ok(d, s, t, true))
        .min()
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceStats {
    /// `(step, mean distance)` for every step with events.
    pub mean_by_step: Vec<(u32, f64)>,
    /// Unit-width bins over `[0, ceil(d_max)]` for events in the late window.
    pub histogram: Vec<u64>,
    pub window_events: usize,
    pub max_distance: f64,
    /// Bound `sqrt(17) N` from the light cone of one step.
    pub d_max: f64,
    /// Fraction of late-window events with distance above `N`.
    pub fraction_beyond_n: f64,
    /// Log-log slope of the histogram tail; descriptive only.
    pub tail_slope: Option<f64>,
}

/// Summarizes rewrite distances. The late window holds the events whose
/// step exceeds `floor((1 - window) S)`, `S` being the last step.
pub fn rewrite_distance_stats(events: &[RewriteEvent], window: f64, n_qubits: usize) -> DistanceStats {
    let n = n_qubits as f64;
    let d_max = 17f64.sqrt() * n;
    let mut sums: std::collections::BTreeMap<u32, (f64, usize)> = Default::default();
    for e in events {
        let entry = sums.entry(e.step).or_default();
        entry.0 += e.distance;
        entry.1 += 1;
    }
    let mean_by_step = sums.into_iter().map(|(s, (t, k))| (s, t / k as f64)).collect();

    let cut = late_window_cut(events, window);
    let late: Vec<f64> = events.iter().filter(|e| e.step > cut).map(|e| e.distance).collect();
    let mut histogram = vec![0u64; d_max.ceil() as usize + 1];
    for &x in &late {
        let bin = (x.floor() as usize).min(histogram.len() - 1);
        histogram[bin] += 1;
    }
    let beyond = late.iter().filter(|&&x| x > n).count();
    DistanceStats {
        mean_by_step,
        window_events: late.len(),
        max_distance: events.iter().map(|e| e.distance).fold(0.0, f64::max),
        d_max,
        fraction_beyond_n: if late.is_empty() { 0.0 } else { beyond as f64 / late.len() as f64 },
        tail_slope: histogram_tail_slope(&histogram),
        histogram,
    }
}

/// Events with a step above the returned value form the final `window`
/// fraction of the run.
pub fn late_window_cut(events: &[RewriteEvent], window: f64) -> u32 {
    let last = events.iter().map(|e| e.step).max().unwrap_or(0);
    ((1.0 - window.clamp(0.0, 1.0)) * last as f64).floor() as u32
}

/// Least-squares slope of `ln count` against `ln d` over the non-empty bins
/// from `d = 1` on; `None` with fewer than three such bins.
pub fn histogram_tail_slope(histogram: &[u64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = histogram
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (((i as f64) + 0.5).ln(), (c as f64).ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let m = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / m, a.1 + p.1 / m));
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
