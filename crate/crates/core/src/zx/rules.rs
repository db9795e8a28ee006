//! Rewrite rules. Each `rule_*` checks its precondition and returns
//! `RuleNotApplicable` without touching the diagram when it fails.
//!
//! `fusion`, `copy`, `hopf` and `identity` work on any diagram. `to_graph_like`
//! brings a diagram to graph-like form, after which local complementation
//! and pivoting apply.

use super::{Color, EdgeType, RuleKind, ZxDiagram};
use crate::error::{Error, Result};

fn interior(d: &ZxDiagram, v: u32) -> bool {
    d.contains(v) && !d.is_boundary(v)
}

fn color(d: &ZxDiagram, v: u32) -> Color {
    d.spider(v).expect("live spider").color
}

fn require(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::not_applicable(what()))
    }
}

/// Merges `b` into `a`. Both must be non-boundary spiders of one color
/// joined by at least one plain wire. Every plain `a–b` wire disappears,
/// Hadamard `a–b` wires become Hadamard self-loops on `a`.
pub fn rule_fusion(d: &mut ZxDiagram, a: u32, b: u32) -> Result<()> {
    require(a != b && interior(d, a) && interior(d, b), || {
        format!("fusion needs two distinct non-boundary spiders, got {a} and {b}")
    })?;
    require(color(d, a) == color(d, b), || format!("spiders {a} and {b} differ in color"))?;
    require(d.edge_counts(a, b).0 >= 1, || format!("no plain wire between {a} and {b}"))?;

    fuse(d, a, b);
    Ok(())
}

/// Pushes a degree-1 Pauli-phase `leaf` through `hub`: the hub disappears
/// and a copy of the leaf caps each of the hub's other wires.
///
/// The leaf must see the hub as the opposite color: a plain wire to a hub of
/// the other color, or a Hadamard wire to a hub of its own color.
pub fn rule_copy(d: &mut ZxDiagram, leaf: u32, hub: u32) -> Result<()> {
    require(leaf != hub && interior(d, leaf) && interior(d, hub), || {
        format!("copy needs two distinct non-boundary spiders, got {leaf} and {hub}")
    })?;
    require(d.degree(leaf) == 1, || format!("leaf {leaf} has degree {}", d.degree(leaf)))?;
    let (w, leaf_ty) = d.edges(leaf)[0];
    require(w == hub, || format!("leaf {leaf} is not attached to {hub}"))?;
    require(d.phase(leaf) % 2 == 0, || format!("leaf {leaf} has a non-Pauli phase"))?;
    let opposite = (color(d, leaf) != color(d, hub)) == (leaf_ty == EdgeType::Plain);
    require(opposite, || format!("leaf {leaf} does not see {hub} as the opposite color"))?;
    require(!d.connected(hub, hub), || format!("hub {hub} has a self-loop"))?;

    d.record(RuleKind::Copy, leaf, hub);
    let leaf_spider = *d.spider(leaf).expect("live");
    let hub_pos = d.spider(hub).expect("live").pos;
    let mut others = d.edges(hub).to_vec();
    let at = others.iter().position(|&e| e == (leaf, leaf_ty)).expect("leaf wire");
    others.remove(at);
    d.remove_spider(leaf);
    d.remove_spider(hub);
    for (w, ty) in others {
        let copy = d.add_spider(leaf_spider.color, leaf_spider.phase, hub_pos);
        d.add_edge(copy, w, ty.compose(leaf_ty));
    }
    Ok(())
}

/// Deletes a pair of parallel wires: two plain wires between spiders of
/// opposite colors, or two Hadamard wires between spiders of one color.
pub fn rule_hopf(d: &mut ZxDiagram, a: u32, b: u32) -> Result<()> {
    require(a != b && interior(d, a) && interior(d, b), || {
        format!("hopf needs two distinct non-boundary spiders, got {a} and {b}")
    })?;
    let (plain, had) = d.edge_counts(a, b);
    let ty = if color(d, a) != color(d, b) && plain == 2 && had == 0 {
        EdgeType::Plain
    } else if color(d, a) == color(d, b) && had == 2 && plain == 0 {
        EdgeType::Hadamard
    } else {
        return Err(Error::not_applicable(format!(
            "spiders {a} and {b} are not joined by a removable wire pair"
        )));
    };
    d.record(RuleKind::Hopf, a, b);
    d.remove_edge(a, b, ty);
    d.remove_edge(a, b, ty);
    Ok(())
}

fn identity_ends(d: &ZxDiagram, v: u32) -> Result<[(u32, EdgeType); 2]> {
    require(interior(d, v), || format!("{v} is not a live non-boundary spider"))?;
    require(d.phase(v) == 0, || format!("spider {v} has phase {}", d.phase(v)))?;
    match d.edges(v) {
        &[e1, e2] if e1.0 != v && e2.0 != v => Ok([e1, e2]),
        _ => Err(Error::not_applicable(format!("spider {v} is not a plain degree-2 spider"))),
    }
}

/// Removes a phase-0 degree-2 spider, joining its neighbours directly.
pub fn rule_identity(d: &mut ZxDiagram, v: u32) -> Result<()> {
    let [(a, ta), (b, tb)] = identity_ends(d, v)?;
    d.record(RuleKind::Identity, a, b);
    d.remove_spider(v);
    d.add_edge(a, b, ta.compose(tb));
    Ok(())
}

/// Graph-like variant of identity removal; the new wire is normalized.
pub(crate) fn identity_graph_like(d: &mut ZxDiagram, v: u32) -> bool {
    let Ok([(a, ta), (b, tb)]) = identity_ends(d, v) else {
        return false;
    };
    d.record(RuleKind::Identity, a, b);
    d.remove_spider(v);
    add_edge_smart(d, a, b, ta.compose(tb));
    true
}

/// Adds a wire in a graph-like diagram and restores graph-like form:
/// plain self-loops vanish, Hadamard self-loops add π, a second Hadamard
/// wire cancels the first, and a plain wire between spiders fuses them.
pub(crate) fn add_edge_smart(d: &mut ZxDiagram, a: u32, b: u32, ty: EdgeType) {
    if d.is_boundary(a) || d.is_boundary(b) {
        d.add_edge(a, b, ty);
    } else if a != b && ty == EdgeType::Hadamard && d.remove_edge(a, b, ty) {
        d.record(RuleKind::ParallelHadamard, a, b);
    } else {
        d.add_edge(a, b, ty);
        normalize_at(d, a);
    }
}

/// Unchecked fusion of `b` into `a`.
fn fuse(d: &mut ZxDiagram, a: u32, b: u32) {
    d.record(RuleKind::Fusion, a, b);
    let pb = d.phase(b);
    d.add_phase(a, pb);
    let edges = d.edges(b).to_vec();
    d.remove_spider(b);
    let mut loops = 0;
    for (w, ty) in edges {
        if w == b {
            loops += 1;
            if loops % 2 == 1 {
                d.add_edge(a, a, ty);
            }
        } else if w == a {
            if ty == EdgeType::Hadamard {
                d.add_edge(a, a, ty);
            }
        } else {
            d.add_edge(a, w, ty);
        }
    }
}

/// Clears self-loops, plain wires to non-boundary spiders and parallel
/// Hadamard wires at `v`, repeating until none remain.
fn normalize_at(d: &mut ZxDiagram, v: u32) {
    loop {
        if let Some(&(_, ty)) = d.edges(v).iter().find(|e| e.0 == v) {
            d.remove_edge(v, v, ty);
            d.record(RuleKind::SelfLoop, v, v);
            if ty == EdgeType::Hadamard {
                d.add_phase(v, 2);
            }
            continue;
        }
        let plain = d
            .edges(v)
            .iter()
            .find(|&&(w, ty)| ty == EdgeType::Plain && !d.is_boundary(w))
            .map(|e| e.0);
        if let Some(w) = plain {
            fuse(d, v, w);
            continue;
        }
        let mut had: Vec<u32> = d
            .edges(v)
            .iter()
            .filter(|e| !d.is_boundary(e.0))
            .map(|e| e.0)
            .collect();
        had.sort_unstable();
        match had.windows(2).find(|p| p[0] == p[1]) {
            Some(p) => {
                let w = p[0];
                d.record(RuleKind::ParallelHadamard, v, w);
                d.remove_edge(v, w, EdgeType::Hadamard);
                d.remove_edge(v, w, EdgeType::Hadamard);
            }
            None => break,
        }
    }
}

/// Converts to graph-like form: X spiders become Z spiders by Hadamard
/// conjugation of every leg, then same-color plain neighbours are fused,
/// parallel Hadamard wires cancel in pairs and self-loops are resolved.
pub fn to_graph_like(d: &mut ZxDiagram) {
    d.begin_pass();
    let wires = d.wires();
    let is_x = |d: &ZxDiagram, v: u32| !d.is_boundary(v) && color(d, v) == Color::X;
    let flips: Vec<bool> = wires
        .iter()
        .map(|&(a, b, _)| (is_x(d, a) as u8 + is_x(d, b) as u8) % 2 == 1)
        .collect();
    if flips.iter().any(|&f| f) {
        for (&(a, b, ty), &flip) in wires.iter().zip(&flips) {
            if flip {
                d.remove_edge(a, b, ty);
                d.add_edge(a, b, ty.toggled());
            }
        }
    }
    let ids: Vec<u32> = d.spider_ids().collect();
    for &v in &ids {
        if is_x(d, v) {
            d.spider_mut(v).color = Color::Z;
        }
    }
    for v in ids {
        if interior(d, v) {
            normalize_at(d, v);
        }
    }
}

/// Checks the graph-like conditions: only Z spiders, Hadamard wires between
/// non-boundary spiders, no parallel wires and no self-loops.
pub fn is_graph_like(d: &ZxDiagram) -> std::result::Result<(), String> {
    for v in d.spider_ids() {
        if d.is_boundary(v) {
            continue;
        }
        if color(d, v) != Color::Z {
            return Err(format!("spider {v} is an X spider"));
        }
        let mut seen: Vec<u32> = Vec::with_capacity(d.degree(v));
        for &(w, ty) in d.edges(v) {
            if w == v {
                return Err(format!("spider {v} has a self-loop"));
            }
            if !d.is_boundary(w) && ty != EdgeType::Hadamard {
                return Err(format!("plain wire between {v} and {w}"));
            }
            seen.push(w);
        }
        seen.sort_unstable();
        if let Some(p) = seen.windows(2).find(|p| p[0] == p[1]) {
            return Err(format!("parallel wires between {v} and {}", p[0]));
        }
    }
    Ok(())
}

/// Whether every wire at `v` is a Hadamard wire to a non-boundary Z spider,
/// with no self-loops; boundary wires are allowed when `allow_boundary`.
fn clean_neighbourhood(d: &ZxDiagram, v: u32, allow_boundary: bool) -> bool {
    d.edges(v).iter().all(|&(w, ty)| {
        if w == v {
            return false;
        }
        if d.is_boundary(w) {
            return allow_boundary;
        }
        ty == EdgeType::Hadamard && color(d, w) == Color::Z
    })
}

fn graph_like_spider(d: &ZxDiagram, v: u32) -> bool {
    interior(d, v) && color(d, v) == Color::Z
}

/// Toggles Hadamard wires between members of different classes (or, with
/// `same_class`, between members of the same class). Members must be
/// interior Z spiders of a graph-like diagram.
fn toggle_classes(d: &mut ZxDiagram, members: &[(u32, u8)], same_class: bool) {
    let epoch = d.marks.next_epoch();
    for &(u, c) in members {
        d.marks.member[u as usize] = epoch;
        d.marks.class[u as usize] = c;
    }
    let toggles = |cu: u8, cw: u8| (cu == cw) == same_class;
    for &(u, cu) in members {
        let seen_epoch = d.marks.next_epoch();
        let (marks, list) = d.marks_and_adj(u);
        list.retain(|&(w, _)| {
            let wi = w as usize;
            if w != u && marks.member[wi] == epoch && toggles(cu, marks.class[wi]) {
                marks.seen[wi] = seen_epoch;
                false
            } else {
                true
            }
        });
        for &(w, cw) in members {
            if w != u && toggles(cu, cw) && d.marks.seen[w as usize] != seen_epoch {
                d.adj_mut(u).push((w, EdgeType::Hadamard));
            }
        }
    }
}

fn distinct_neighbours(d: &ZxDiagram, v: u32) -> Vec<u32> {
    d.edges(v).iter().map(|e| e.0).collect()
}

/// Local complementation about an interior Z spider `s` of phase ±π/2:
/// `s` is removed, its neighbourhood is complemented and every neighbour's
/// phase drops by the phase of `s`.
pub fn rule_local_complement(d: &mut ZxDiagram, s: u32) -> Result<()> {
    require(graph_like_spider(d, s), || format!("{s} is not a non-boundary Z spider"))?;
    require(d.phase(s) % 2 == 1, || format!("spider {s} has phase {}", d.phase(s)))?;
    require(clean_neighbourhood(d, s, false), || {
        format!("spider {s} is not interior with Hadamard wires only")
    })?;
    let nbrs = distinct_neighbours(d, s);
    let first = nbrs.first().copied().unwrap_or(s);
    d.record(RuleKind::LocalComplement, s, first);
    let delta = 4 - d.phase(s);
    for &u in &nbrs {
        d.add_phase(u, delta);
    }
    d.remove_spider(s);
    let members: Vec<(u32, u8)> = nbrs.into_iter().map(|u| (u, 0)).collect();
    toggle_classes(d, &members, true);
    Ok(())
}

/// Whether `s` and `t` form a pivot pair, ignoring boundary wires.
pub(crate) fn pivot_pair_ok(d: &ZxDiagram, s: u32, t: u32, allow_boundary: bool) -> bool {
    s != t
        && graph_like_spider(d, s)
        && graph_like_spider(d, t)
        && d.phase(s) % 2 == 0
        && d.phase(t) % 2 == 0
        && d.edges(s).iter().any(|&e| e == (t, EdgeType::Hadamard))
        && clean_neighbourhood(d, s, allow_boundary)
        && clean_neighbourhood(d, t, allow_boundary)
}

/// Pivot on a Hadamard-joined pair of interior Z spiders with Pauli phases.
///
/// Neighbours split into those of `s` only (A), of `t` only (B) and shared
/// ones (C). Wires between different classes are toggled, A gains the phase
/// of `t`, B the phase of `s`, C both plus π, and `s`, `t` are removed.
pub fn rule_pivot(d: &mut ZxDiagram, s: u32, t: u32) -> Result<()> {
    require(pivot_pair_ok(d, s, t, false), || {
        format!("spiders {s} and {t} are not an interior Pauli pair")
    })?;
    d.record(RuleKind::Pivot, s, t);
    let (ps, pt) = (d.phase(s), d.phase(t));
    let epoch = d.marks.next_epoch();
    for &(w, _) in d.edges(s).to_vec().iter() {
        d.marks.member[w as usize] = epoch;
    }
    let mut members: Vec<(u32, u8)> = Vec::new();
    let mut shared_epoch_mark = Vec::new();
    for &(w, _) in d.edges(t) {
        if w == s {
            continue;
        }
        if d.marks.member[w as usize] == epoch {
            members.push((w, 2));
            shared_epoch_mark.push(w);
        } else {
            members.push((w, 1));
        }
    }
    let seen = d.marks.next_epoch();
    for &w in &shared_epoch_mark {
        d.marks.seen[w as usize] = seen;
    }
    for &(w, _) in d.edges(s) {
        if w != t && d.marks.seen[w as usize] != seen {
            members.push((w, 0));
        }
    }
    for &(w, class) in &members {
        let delta = match class {
            0 => pt,
            1 => ps,
            _ => ps + pt + 2,
        };
        d.add_phase(w, delta % 4);
    }
    d.remove_spider(s);
    d.remove_spider(t);
    toggle_classes(d, &members, false);
    Ok(())
}

/// Moves a boundary wire off its spider: `b –e– v` becomes
/// `b –(toggled e)– n –H– v` with a fresh phase-0 Z spider `n` placed at `v`.
pub fn insert_boundary_dummy(d: &mut ZxDiagram, b: u32) -> Result<u32> {
    require(d.is_boundary(b) && d.degree(b) == 1, || format!("{b} is not a boundary spider"))?;
    let (v, ty) = d.edges(b)[0];
    require(!d.is_boundary(v), || format!("boundary {b} is wired to boundary {v}"))?;
    let pos = d.spider(v).expect("live").pos;
    d.remove_edge(b, v, ty);
    let n = d.add_spider(Color::Z, 0, pos);
    d.add_edge(b, n, ty.toggled());
    d.add_edge(n, v, EdgeType::Hadamard);
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zx::{evaluate_dense, proportional, Position};

    fn p() -> Position {
        Position::new(0.0, 0.0)
    }

    fn same_map(before: &ZxDiagram, after: &ZxDiagram) -> bool {
        let a = evaluate_dense(before, 12).unwrap();
        let b = evaluate_dense(after, 12).unwrap();
        proportional(&a, &b, 1e-9)
    }

    #[test]
    fn fusion_adds_phases() {
        let mut d = ZxDiagram::new();
        let i = d.add_input(p());
        let o = d.add_output(p());
        let a = d.add_spider(Color::Z, 1, p());
        let b = d.add_spider(Color::Z, 3, p());
        d.add_edge(i, a, EdgeType::Plain);
        d.add_edge(a, b, EdgeType::Plain);
        d.add_edge(b, o, EdgeType::Plain);
        let before = d.clone();
        rule_fusion(&mut d, a, b).unwrap();
        assert_eq!(d.phase(a), 0);
        assert!(!d.contains(b));
        assert!(same_map(&before, &d));
        assert!(rule_fusion(&mut d, a, i).is_err());
    }

    #[test]
    fn double_wire_fusion_leaves_no_plain_loop() {
        let mut d = ZxDiagram::new();
        let a = d.add_spider(Color::X, 0, p());
        let b = d.add_spider(Color::X, 0, p());
        d.add_edge(a, b, EdgeType::Plain);
        d.add_edge(a, b, EdgeType::Plain);
        rule_fusion(&mut d, a, b).unwrap();
        assert_eq!(d.degree(a), 0);
    }

    #[test]
    fn fusion_precondition() {
        let mut d = ZxDiagram::new();
        let a = d.add_spider(Color::Z, 0, p());
        let b = d.add_spider(Color::X, 0, p());
        d.add_edge(a, b, EdgeType::Plain);
        assert!(matches!(rule_fusion(&mut d, a, b), Err(Error::RuleNotApplicable(_))));
        assert_eq!(d.num_wires(), 1);
    }

    #[test]
    fn copy_through_degree_three_hub() {
        let mut d = ZxDiagram::new();
        let leaf = d.add_spider(Color::X, 2, p());
        let hub = d.add_spider(Color::Z, 1, p());
        let o1 = d.add_output(p());
        let o2 = d.add_output(p());
        d.add_edge(leaf, hub, EdgeType::Plain);
        d.add_edge(hub, o1, EdgeType::Plain);
        d.add_edge(hub, o2, EdgeType::Hadamard);
        let before = d.clone();
        rule_copy(&mut d, leaf, hub).unwrap();
        assert_eq!(d.num_internal(), 2);
        assert!(same_map(&before, &d));
    }

    #[test]
    fn copy_onto_lone_hub_leaves_scalar() {
        let mut d = ZxDiagram::new();
        let leaf = d.add_spider(Color::Z, 0, p());
        let hub = d.add_spider(Color::X, 0, p());
        d.add_edge(leaf, hub, EdgeType::Plain);
        rule_copy(&mut d, leaf, hub).unwrap();
        assert_eq!(d.num_spiders(), 0);
    }

    #[test]
    fn hopf_disconnects() {
        let mut d = ZxDiagram::new();
        let a = d.add_spider(Color::Z, 0, p());
        let b = d.add_spider(Color::X, 0, p());
        d.add_edge(a, b, EdgeType::Plain);
        d.add_edge(a, b, EdgeType::Plain);
        rule_hopf(&mut d, a, b).unwrap();
        assert_eq!(d.num_wires(), 0);
        assert_eq!(d.num_spiders(), 2);
    }

    #[test]
    fn lc_connects_neighbours() {
        let mut d = ZxDiagram::new();
        let i = d.add_input(p());
        let o = d.add_output(p());
        let u = d.add_spider(Color::Z, 0, p());
        let s = d.add_spider(Color::Z, 1, p());
        let w = d.add_spider(Color::Z, 0, p());
        d.add_edge(i, u, EdgeType::Plain);
        d.add_edge(u, s, EdgeType::Hadamard);
        d.add_edge(s, w, EdgeType::Hadamard);
        d.add_edge(w, o, EdgeType::Plain);
        let before = d.clone();
        rule_local_complement(&mut d, s).unwrap();
        assert!(d.connected(u, w));
        assert_eq!((d.phase(u), d.phase(w)), (3, 3));
        assert_eq!(d.num_spiders(), before.num_spiders() - 1);
        assert!(same_map(&before, &d));
    }

    #[test]
    fn pivot_on_dumbbell_empties() {
        let mut d = ZxDiagram::new();
        let s = d.add_spider(Color::Z, 0, p());
        let t = d.add_spider(Color::Z, 2, p());
        d.add_edge(s, t, EdgeType::Hadamard);
        rule_pivot(&mut d, s, t).unwrap();
        assert_eq!(d.num_spiders(), 0);
    }

    #[test]
    fn graph_like_conversion_of_cnot() {
        let mut d = ZxDiagram::new();
        let i0 = d.add_input(p());
        let i1 = d.add_input(p());
        let z = d.add_spider(Color::Z, 0, p());
        let x = d.add_spider(Color::X, 0, p());
        let o0 = d.add_output(p());
        let o1 = d.add_output(p());
        for (a, b) in [(i0, z), (i1, x), (z, x), (z, o0), (x, o1)] {
            d.add_edge(a, b, EdgeType::Plain);
        }
        let before = d.clone();
        to_graph_like(&mut d);
        is_graph_like(&d).unwrap();
        assert_eq!(d.edge_counts(z, x), (0, 1));
        assert_eq!(d.edge_counts(x, i1), (0, 1));
        assert!(same_map(&before, &d));
        let again = d.clone();
        to_graph_like(&mut d);
        assert_eq!(d.to_json(), again.to_json());
    }

    #[test]
    fn parallel_hadamards_cancel() {
        let mut d = ZxDiagram::new();
        let i = d.add_input(p());
        let a = d.add_spider(Color::Z, 0, p());
        let b = d.add_spider(Color::Z, 0, p());
        let o = d.add_output(p());
        d.add_edge(i, a, EdgeType::Plain);
        d.add_edge(a, b, EdgeType::Hadamard);
        d.add_edge(a, b, EdgeType::Hadamard);
        d.add_edge(b, o, EdgeType::Plain);
        to_graph_like(&mut d);
        assert!(!d.connected(a, b));
        is_graph_like(&d).unwrap();
    }

    #[test]
    fn boundary_dummy_preserves_map() {
        let mut d = ZxDiagram::new();
        let i = d.add_input(p());
        let o = d.add_output(p());
        let z = d.add_spider(Color::Z, 2, p());
        d.add_edge(i, z, EdgeType::Hadamard);
        d.add_edge(z, o, EdgeType::Plain);
        let before = d.clone();
        let n = insert_boundary_dummy(&mut d, i).unwrap();
        assert!(d.connected(n, z));
        assert!(same_map(&before, &d));
        assert!(insert_boundary_dummy(&mut d, z).is_err());
    }
}
