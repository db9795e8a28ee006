//! ZX diagrams of brickwork circuits and the Clifford rewrite engine.
//!
//! Phases are integers mod 4 in units of π/2. Boundary spiders are degree-1
//! placeholders for the open legs; rules never touch them.

mod build;
mod dense;
mod rules;
mod simplify;

pub use build::{diagram_from_circuit, diagram_from_record_json};
pub use dense::{evaluate_dense, proportional, DenseMap, DEFAULT_LEG_CAP};
pub use rules::{
    insert_boundary_dummy, is_graph_like, rule_copy, rule_fusion, rule_hopf, rule_identity, rule_local_complement,
    rule_pivot, to_graph_like,
};
pub use simplify::{
    clifford_simplify, clifford_simplify_with, histogram_tail_slope, late_window_cut, rewrite_distance_stats, DistanceStats, Schedule,
    SimplifyReport,
};

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Color {
    Z,
    X,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeType {
    Plain,
    Hadamard,
}

impl EdgeType {
    /// Type of two edges composed through a phase-free degree-2 spider.
    #[inline]
    pub fn compose(self, other: EdgeType) -> EdgeType {
        if self == other {
            EdgeType::Plain
        } else {
            EdgeType::Hadamard
        }
    }

    #[inline]
    pub fn toggled(self) -> EdgeType {
        match self {
            EdgeType::Plain => EdgeType::Hadamard,
            EdgeType::Hadamard => EdgeType::Plain,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryTag {
    None,
    Input(u32),
    Output(u32),
}

/// Site and time coordinates, both multiples of 1/2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub site: f64,
    pub time: f64,
}

impl Position {
    pub fn new(site: f64, time: f64) -> Self {
        Position { site, time }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.site - other.site).hypot(self.time - other.time)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spider {
    pub color: Color,
    /// Multiple of π/2, in `0..4`.
    pub phase: u8,
    pub pos: Position,
    pub boundary: BoundaryTag,
}

impl Spider {
    pub fn is_boundary(&self) -> bool {
        self.boundary != BoundaryTag::None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Fusion,
    Copy,
    Hopf,
    Identity,
    LocalComplement,
    Pivot,
    ParallelHadamard,
    SelfLoop,
}

impl RuleKind {
    pub fn name(&self) -> &'static str {
        match self {
            RuleKind::Fusion => "fusion",
            RuleKind::Copy => "copy",
            RuleKind::Hopf => "hopf",
            RuleKind::Identity => "identity",
            RuleKind::LocalComplement => "local_complement",
            RuleKind::Pivot => "pivot",
            RuleKind::ParallelHadamard => "parallel_hadamard",
            RuleKind::SelfLoop => "self_loop",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewriteEvent {
    pub rule: RuleKind,
    pub step: u32,
    pub distance: f64,
    pub participants: (u32, u32),
}

#[derive(Clone, Debug, Default)]
struct Telemetry {
    enabled: bool,
    step: u32,
    pass_fired: bool,
    events: Vec<RewriteEvent>,
}

/// Spiders, wires (multi-edges and self-loops allowed) and ordered boundary
/// lists. Spider ids are stable; deleted ids are never reused.
#[derive(Clone, Debug, Default)]
pub struct ZxDiagram {
    spiders: Vec<Option<Spider>>,
    adj: Vec<Vec<(u32, EdgeType)>>,
    inputs: Vec<u32>,
    outputs: Vec<u32>,
    n_live: usize,
    telemetry: Telemetry,
    pub(crate) marks: Marks,
}

/// Epoch-stamped scratch arrays indexed by spider id, so membership tests
/// cost O(1) without clearing between uses.
#[derive(Clone, Debug, Default)]
pub(crate) struct Marks {
    pub member: Vec<u64>,
    pub seen: Vec<u64>,
    pub class: Vec<u8>,
    epoch: u64,
}

impl Marks {
    fn grow(&mut self, len: usize) {
        self.member.resize(len, 0);
        self.seen.resize(len, 0);
        self.class.resize(len, 0);
    }

    pub fn next_epoch(&mut self) -> u64 {
        self.epoch += 1;
        self.epoch
    }
}

impl ZxDiagram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_spider(&mut self, color: Color, phase: u8, pos: Position) -> u32 {
        self.push(Spider {
            color,
            phase: phase % 4,
            pos,
            boundary: BoundaryTag::None,
        })
    }

    pub fn add_input(&mut self, pos: Position) -> u32 {
        let k = self.inputs.len() as u32;
        let id = self.push(Spider {
            color: Color::Z,
            phase: 0,
            pos,
            boundary: BoundaryTag::Input(k),
        });
        self.inputs.push(id);
        id
    }

    pub fn add_output(&mut self, pos: Position) -> u32 {
        let k = self.outputs.len() as u32;
        let id = self.push(Spider {
            color: Color::Z,
            phase: 0,
            pos,
            boundary: BoundaryTag::Output(k),
        });
        self.outputs.push(id);
        id
    }

    fn push(&mut self, s: Spider) -> u32 {
        self.spiders.push(Some(s));
        self.adj.push(Vec::new());
        self.marks.grow(self.spiders.len());
        self.n_live += 1;
        (self.spiders.len() - 1) as u32
    }

    /// Adds one wire without any normalization. A self-loop is stored as
    /// two entries in the spider's own list.
    pub fn add_edge(&mut self, a: u32, b: u32, ty: EdgeType) {
        debug_assert!(self.contains(a) && self.contains(b));
        self.adj[a as usize].push((b, ty));
        self.adj[b as usize].push((a, ty));
    }

    /// Removes one wire `a–b` of type `ty`; returns whether it existed.
    pub fn remove_edge(&mut self, a: u32, b: u32, ty: EdgeType) -> bool {
        let Some(i) = self.adj[a as usize].iter().position(|&e| e == (b, ty)) else {
            return false;
        };
        self.adj[a as usize].swap_remove(i);
        let j = self.adj[b as usize]
            .iter()
            .position(|&e| e == (a, ty))
            .expect("wire lists are symmetric");
        self.adj[b as usize].swap_remove(j);
        true
    }

    /// Deletes a spider and every wire touching it.
    pub fn remove_spider(&mut self, v: u32) {
        let edges = std::mem::take(&mut self.adj[v as usize]);
        for (w, ty) in edges {
            if w != v {
                let list = &mut self.adj[w as usize];
                if let Some(j) = list.iter().position(|&e| e == (v, ty)) {
                    list.swap_remove(j);
                }
            }
        }
        if self.spiders[v as usize].take().is_some() {
            self.n_live -= 1;
        }
    }

    pub fn contains(&self, v: u32) -> bool {
        self.spiders.get(v as usize).is_some_and(Option::is_some)
    }

    pub fn spider(&self, v: u32) -> Option<&Spider> {
        self.spiders.get(v as usize).and_then(Option::as_ref)
    }

    pub(crate) fn adj_mut(&mut self, v: u32) -> &mut Vec<(u32, EdgeType)> {
        &mut self.adj[v as usize]
    }

    pub(crate) fn marks_and_adj(&mut self, v: u32) -> (&mut Marks, &mut Vec<(u32, EdgeType)>) {
        (&mut self.marks, &mut self.adj[v as usize])
    }

    pub(crate) fn spider_mut(&mut self, v: u32) -> &mut Spider {
        self.spiders[v as usize].as_mut().expect("live spider")
    }

    pub fn phase(&self, v: u32) -> u8 {
        self.spider(v).map_or(0, |s| s.phase)
    }

    pub fn add_phase(&mut self, v: u32, delta: u8) {
        let s = self.spider_mut(v);
        s.phase = (s.phase + delta) % 4;
    }

    pub fn is_boundary(&self, v: u32) -> bool {
        self.spider(v).is_some_and(Spider::is_boundary)
    }

    /// Wire ends at `v`, one per wire (two per self-loop).
    pub fn edges(&self, v: u32) -> &[(u32, EdgeType)] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    /// Number of wires between `a` and `b` of each type, `(plain, hadamard)`.
    pub fn edge_counts(&self, a: u32, b: u32) -> (usize, usize) {
        let mut counts = (0, 0);
        for &(w, ty) in &self.adj[a as usize] {
            if w == b {
                match ty {
                    EdgeType::Plain => counts.0 += 1,
                    EdgeType::Hadamard => counts.1 += 1,
                }
            }
        }
        if a == b {
            (counts.0 / 2, counts.1 / 2)
        } else {
            counts
        }
    }

    pub fn connected(&self, a: u32, b: u32) -> bool {
        self.adj[a as usize].iter().any(|&(w, _)| w == b)
    }

    pub fn num_spiders(&self) -> usize {
        self.n_live
    }

    /// Live spiders that are not boundaries.
    pub fn num_internal(&self) -> usize {
        self.n_live - self.inputs.len() - self.outputs.len()
    }

    pub fn num_wires(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn capacity(&self) -> usize {
        self.spiders.len()
    }

    pub fn spider_ids(&self) -> impl Iterator<Item = u32> + '_ {
        self.spiders
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_some())
            .map(|(i, _)| i as u32)
    }

    /// Every wire once, as `(a, b, type)` with `a <= b`, in id order.
    pub fn wires(&self) -> Vec<(u32, u32, EdgeType)> {
        let mut out = Vec::with_capacity(self.num_wires());
        for v in self.spider_ids() {
            let mut loops = 0;
            for &(w, ty) in &self.adj[v as usize] {
                if w > v {
                    out.push((v, w, ty));
                } else if w == v {
                    loops += 1;
                    if loops % 2 == 1 {
                        out.push((v, v, ty));
                    }
                }
            }
        }
        out
    }

    pub fn inputs(&self) -> &[u32] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[u32] {
        &self.outputs
    }

    pub fn set_telemetry(&mut self, enabled: bool) {
        self.telemetry.enabled = enabled;
    }

    pub fn events(&self) -> &[RewriteEvent] {
        &self.telemetry.events
    }

    pub fn take_events(&mut self) -> Vec<RewriteEvent> {
        std::mem::take(&mut self.telemetry.events)
    }

    pub fn steps(&self) -> u32 {
        self.telemetry.step
    }

    pub(crate) fn begin_pass(&mut self) {
        self.telemetry.pass_fired = false;
    }

    pub(crate) fn pass_fired(&self) -> bool {
        self.telemetry.pass_fired
    }

    /// Records a rule application between spiders `a` and `b`, which must
    /// still be live.
    pub(crate) fn record(&mut self, rule: RuleKind, a: u32, b: u32) {
        if !self.telemetry.pass_fired {
            self.telemetry.pass_fired = true;
            self.telemetry.step += 1;
        }
        if self.telemetry.enabled {
            let pa = self.spider(a).expect("live participant").pos;
            let pb = self.spider(b).expect("live participant").pos;
            let step = self.telemetry.step;
            self.telemetry.events.push(RewriteEvent {
                rule,
                step,
                distance: pa.distance(&pb),
                participants: (a, b),
            });
        }
    }

    /// Connected-component label of every spider id (`u32::MAX` for dead ids).
    pub fn component_labels(&self) -> (Vec<u32>, usize) {
        let mut label = vec![u32::MAX; self.spiders.len()];
        let mut count = 0u32;
        let mut stack = Vec::new();
        for v in self.spider_ids() {
            if label[v as usize] != u32::MAX {
                continue;
            }
            label[v as usize] = count;
            stack.push(v);
            while let Some(u) = stack.pop() {
                for &(w, _) in &self.adj[u as usize] {
                    if label[w as usize] == u32::MAX {
                        label[w as usize] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (label, count as usize)
    }

    /// Drops every component that does not touch both an input and an
    /// output. Connectivity between the two boundary sets is unchanged.
    pub fn prune_non_spanning(&mut self) {
        let (label, count) = self.component_labels();
        let mut has_in = vec![false; count];
        let mut has_out = vec![false; count];
        for &i in &self.inputs {
            has_in[label[i as usize] as usize] = true;
        }
        for &o in &self.outputs {
            has_out[label[o as usize] as usize] = true;
        }
        let doomed: Vec<u32> = self
            .spider_ids()
            .filter(|&v| {
                let c = label[v as usize] as usize;
                !(has_in[c] && has_out[c]) && !self.is_boundary(v)
            })
            .collect();
        for v in doomed {
            self.remove_spider(v);
        }
    }

    pub fn to_dump(&self) -> DiagramDump {
        DiagramDump {
            spiders: self
                .spider_ids()
                .map(|id| {
                    let s = self.spider(id).expect("live");
                    SpiderDump {
                        id,
                        color: s.color,
                        phase: s.phase,
                        site: s.pos.site,
                        time: s.pos.time,
                        boundary: s.boundary,
                    }
                })
                .collect(),
            wires: self.wires(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_dump()).expect("dump serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        let dump: DiagramDump = serde_json::from_value(value)?;
        Self::from_dump(&dump)
    }

    /// Rebuilds a diagram from its dump, keeping the original ids.
    pub fn from_dump(dump: &DiagramDump) -> Result<Self> {
        let parse = |location: String, message: &str| Error::Parse {
            location,
            message: message.to_string(),
        };
        let cap = dump.spiders.iter().map(|s| s.id as usize + 1).max().unwrap_or(0);
        let mut d = ZxDiagram {
            spiders: vec![None; cap],
            adj: vec![Vec::new(); cap],
            ..Default::default()
        };
        d.marks.grow(cap);
        for (i, s) in dump.spiders.iter().enumerate() {
            if s.phase > 3 {
                return Err(parse(format!("spiders[{i}]"), "phase must be in 0..4"));
            }
            if d.spiders[s.id as usize].is_some() {
                return Err(parse(format!("spiders[{i}]"), "duplicate id"));
            }
            d.spiders[s.id as usize] = Some(Spider {
                color: s.color,
                phase: s.phase,
                pos: Position::new(s.site, s.time),
                boundary: s.boundary,
            });
            d.n_live += 1;
        }
        for (i, &(a, b, ty)) in dump.wires.iter().enumerate() {
            if !d.contains(a) || !d.contains(b) {
                return Err(parse(format!("wires[{i}]"), "wire references a missing spider"));
            }
            d.add_edge(a, b, ty);
        }
        for (name, list, want_input) in [("inputs", &dump.inputs, true), ("outputs", &dump.outputs, false)] {
            for (k, &id) in list.iter().enumerate() {
                let tag = d.spider(id).map(|s| s.boundary);
                let expected = if want_input {
                    BoundaryTag::Input(k as u32)
                } else {
                    BoundaryTag::Output(k as u32)
                };
                if tag != Some(expected) {
                    return Err(parse(format!("{name}[{k}]"), "boundary list disagrees with spider tags"));
                }
                if d.degree(id) != 1 {
                    return Err(parse(format!("{name}[{k}]"), "boundary spider must have exactly one wire"));
                }
            }
        }
        let tagged = d.spider_ids().filter(|&v| d.is_boundary(v)).count();
        if tagged != dump.inputs.len() + dump.outputs.len() {
            return Err(parse("spiders".into(), "boundary spider missing from inputs/outputs"));
        }
        d.inputs = dump.inputs.clone();
        d.outputs = dump.outputs.clone();
        Ok(d)
    }

    /// Structural self-check: symmetric wire lists, live endpoints and
    /// degree-1 phase-0 boundaries.
    pub fn check_consistency(&self) -> std::result::Result<(), String> {
        for v in self.spider_ids() {
            for &(w, ty) in &self.adj[v as usize] {
                if !self.contains(w) {
                    return Err(format!("spider {v} has a wire to dead spider {w}"));
                }
                let here = self.adj[v as usize].iter().filter(|&&e| e == (w, ty)).count();
                let there = self.adj[w as usize].iter().filter(|&&e| e == (v, ty)).count();
                if here != there {
                    return Err(format!("asymmetric wire {v}-{w}"));
                }
            }
            if self.is_boundary(v) && (self.degree(v) != 1 || self.phase(v) != 0) {
                return Err(format!("boundary {v} has degree {} phase {}", self.degree(v), self.phase(v)));
            }
        }
        for (i, s) in self.spiders.iter().enumerate() {
            if s.is_none() && !self.adj[i].is_empty() {
                return Err(format!("dead spider {i} keeps wires"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for ZxDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.spider_ids() {
            let s = self.spider(v).expect("live");
            write!(f, "{v}: {:?}({}) {:?} ->", s.color, s.phase, s.boundary)?;
            for (w, ty) in self.edges(v) {
                let mark = if *ty == EdgeType::Hadamard { "h" } else { "" };
                write!(f, " {w}{mark}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpiderDump {
    pub id: u32,
    pub color: Color,
    pub phase: u8,
    pub site: f64,
    pub time: f64,
    pub boundary: BoundaryTag,
}

/// JSON form: `{spiders: [{id, color, phase, site, time, boundary}], wires: [[a, b, type]], inputs, outputs}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagramDump {
    pub spiders: Vec<SpiderDump>,
    pub wires: Vec<(u32, u32, EdgeType)>,
    pub inputs: Vec<u32>,
    pub outputs: Vec<u32>,
}

/// Event log as CSV with header `step,rule,distance,id_a,id_b`.
pub fn events_to_csv(events: &[RewriteEvent]) -> String {
    let mut s = String::from("step,rule,distance,id_a,id_b\n");
    for e in events {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            e.step,
            e.rule.name(),
            e.distance,
            e.participants.0,
            e.participants.1
        ));
    }
    s
}
