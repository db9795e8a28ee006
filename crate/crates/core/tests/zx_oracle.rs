use proptest::prelude::*;
use zxperc::circuit::{sample_circuit, ModelParams};
use zxperc::zx::*;

#[derive(Clone, Debug)]
struct Shape {
    inputs: usize,
    outputs: usize,
    spiders: Vec<(bool, u8)>,
    wires: Vec<(usize, usize, bool)>,
    boundary_wires: Vec<(usize, bool)>,
}

fn shape(max_spiders: usize) -> impl Strategy<Value = Shape> {
    (0usize..=3, 0usize..=3, 1usize..=max_spiders).prop_flat_map(|(i, o, k)| {
        (
            Just(i),
            Just(o),
            prop::collection::vec((any::<bool>(), 0u8..4), k),
            prop::collection::vec((0..k, 0..k, any::<bool>()), 0..=2 * k),
            prop::collection::vec((0..k, any::<bool>()), i + o),
        )
            .prop_map(|(inputs, outputs, spiders, wires, boundary_wires)| Shape {
                inputs,
                outputs,
                spiders,
                wires,
                boundary_wires,
            })
    })
}

fn ty(h: bool) -> EdgeType {
    if h {
        EdgeType::Hadamard
    } else {
        EdgeType::Plain
    }
}

fn at(k: usize) -> Position {
    Position::new(k as f64, 0.5 * k as f64)
}

/// Returns the diagram and the ids of its non-boundary spiders.
fn build(s: &Shape, graph_like: bool) -> (ZxDiagram, Vec<u32>) {
    let mut d = ZxDiagram::new();
    let ins: Vec<u32> = (0..s.inputs).map(|k| d.add_input(at(k))).collect();
    let outs: Vec<u32> = (0..s.outputs).map(|k| d.add_output(at(k))).collect();
    let ids: Vec<u32> = s
        .spiders
        .iter()
        .enumerate()
        .map(|(k, &(x, phase))| {
            let color = if x && !graph_like { Color::X } else { Color::Z };
            d.add_spider(color, phase, at(k))
        })
        .collect();
    let mut seen = std::collections::HashSet::new();
    for &(a, b, h) in &s.wires {
        if graph_like {
            let key = (a.min(b), a.max(b));
            if a == b || !seen.insert(key) {
                continue;
            }
            d.add_edge(ids[a], ids[b], EdgeType::Hadamard);
        } else {
            d.add_edge(ids[a], ids[b], ty(h));
        }
    }
    for (&b, &(v, h)) in ins.iter().chain(&outs).zip(&s.boundary_wires) {
        d.add_edge(b, ids[v], ty(h));
    }
    (d, ids)
}

fn dense(d: &ZxDiagram) -> DenseMap {
    evaluate_dense(d, DEFAULT_LEG_CAP).expect("within the leg cap")
}

fn assert_same(before: &DenseMap, after: &ZxDiagram) -> Result<(), TestCaseError> {
    if before.is_zero(1e-9) {
        return Ok(());
    }
    prop_assert!(proportional(before, &dense(after), 1e-9), "maps differ after rewrite");
    Ok(())
}

fn boundaries_kept(before: &ZxDiagram, after: &ZxDiagram) -> Result<(), TestCaseError> {
    prop_assert_eq!(before.inputs(), after.inputs());
    prop_assert_eq!(before.outputs(), after.outputs());
    prop_assert!(after.check_consistency().is_ok());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn fusion(s in shape(6), pick in any::<(prop::sample::Index, prop::sample::Index)>()) {
        let (d, ids) = build(&s, false);
        let a = ids[pick.0.index(ids.len())];
        let b = ids[pick.1.index(ids.len())];
        prop_assume!(a != b);
        let color = d.spider(a).unwrap().color;
        let pa = d.spider(a).unwrap().phase;
        let pb = d.spider(b).unwrap().phase;
        let mut dump = d.to_dump();
        dump.spiders.iter_mut().find(|x| x.id == b).unwrap().color = color;
        dump.wires.push((a, b, EdgeType::Plain));
        let mut d = ZxDiagram::from_dump(&dump).unwrap();
        let before = d.clone();
        let m = dense(&d);
        rule_fusion(&mut d, a, b).unwrap();
        prop_assert_eq!(d.phase(a), (pa + pb) % 4);
        prop_assert!(!d.contains(b));
        assert_same(&m, &d)?;
        boundaries_kept(&before, &d)?;
    }

    #[test]
    fn copy(s in shape(5), pick in any::<prop::sample::Index>(), leaf_phase in prop::sample::select(vec![0u8, 2]), h in any::<bool>()) {
        let (mut d, ids) = build(&s, false);
        let hub = ids[pick.index(ids.len())];
        prop_assume!(!d.connected(hub, hub));
        let hub_color = d.spider(hub).unwrap().color;
        let other = if hub_color == Color::Z { Color::X } else { Color::Z };
        let leaf_color = if h { hub_color } else { other };
        let leaf = d.add_spider(leaf_color, leaf_phase, at(0));
        d.add_edge(leaf, hub, ty(h));
        let before = d.clone();
        let m = dense(&d);
        rule_copy(&mut d, leaf, hub).unwrap();
        prop_assert_eq!(d.num_spiders(), before.num_spiders() - 2 + before.degree(hub) - 1);
        assert_same(&m, &d)?;
        boundaries_kept(&before, &d)?;
    }

    #[test]
    fn hopf(s in shape(6), pick in any::<(prop::sample::Index, prop::sample::Index)>(), h in any::<bool>()) {
        let (d, ids) = build(&s, false);
        let a = ids[pick.0.index(ids.len())];
        let b = ids[pick.1.index(ids.len())];
        prop_assume!(a != b);
        let mut dump = d.to_dump();
        dump.wires.retain(|w| !((w.0 == a && w.1 == b) || (w.0 == b && w.1 == a)));
        let ca = dump.spiders.iter().find(|x| x.id == a).unwrap().color;
        let cb = if h { ca } else if ca == Color::Z { Color::X } else { Color::Z };
        dump.spiders.iter_mut().find(|x| x.id == b).unwrap().color = cb;
        dump.wires.push((a, b, ty(h)));
        dump.wires.push((a, b, ty(h)));
        let mut d = ZxDiagram::from_dump(&dump).unwrap();
        let before = d.clone();
        let m = dense(&d);
        rule_hopf(&mut d, a, b).unwrap();
        prop_assert!(!d.connected(a, b));
        assert_same(&m, &d)?;
        boundaries_kept(&before, &d)?;
    }

    #[test]
    fn identity(s in shape(6), pick in any::<prop::sample::Index>(), h in any::<(bool, bool)>()) {
        let (mut d, _) = build(&s, false);
        let wires = d.wires();
        prop_assume!(!wires.is_empty());
        let (a, b, t) = wires[pick.index(wires.len())];
        d.remove_edge(a, b, t);
        let v = d.add_spider(Color::X, 0, at(1));
        d.add_edge(a, v, ty(h.0));
        d.add_edge(v, b, ty(h.1));
        let before = d.clone();
        let m = dense(&d);
        rule_identity(&mut d, v).unwrap();
        prop_assert!(!d.contains(v));
        assert_same(&m, &d)?;
        boundaries_kept(&before, &d)?;
    }

    #[test]
    fn graph_like_conversion(s in shape(6)) {
        let (mut d, _) = build(&s, false);
        let before = d.clone();
        let m = dense(&d);
        to_graph_like(&mut d);
        prop_assert_eq!(is_graph_like(&d), Ok(()));
        assert_same(&m, &d)?;
        boundaries_kept(&before, &d)?;
        let once = d.to_json();
        to_graph_like(&mut d);
        prop_assert_eq!(d.to_json(), once);
    }

    #[test]
    fn local_complementation(s in shape(6), pick in any::<prop::sample::Index>(), phase in prop::sample::select(vec![1u8, 3])) {
        let (d, ids) = build(&s, true);
        let v = ids[pick.index(ids.len())];
        let mut dump = d.to_dump();
        dump.spiders.iter_mut().find(|x| x.id == v).unwrap().phase = phase;
        // move boundary wires off `v`
        let mut d = ZxDiagram::from_dump(&dump).unwrap();
        let boundary: Vec<u32> = d.edges(v).iter().map(|e| e.0).filter(|&w| d.is_boundary(w)).collect();
        for b in boundary {
            insert_boundary_dummy(&mut d, b).unwrap();
        }
        let before = d.clone();
        let m = dense(&d);
        rule_local_complement(&mut d, v).unwrap();
        prop_assert_eq!(d.num_spiders(), before.num_spiders() - 1);
        prop_assert_eq!(is_graph_like(&d), Ok(()));
        assert_same(&m, &d)?;
        boundaries_kept(&before, &d)?;
    }

    #[test]
    fn pivot(s in shape(6), pick in any::<(prop::sample::Index, prop::sample::Index)>(), phases in (prop::sample::select(vec![0u8, 2]), prop::sample::select(vec![0u8, 2]))) {
        let (d, ids) = build(&s, true);
        let a = ids[pick.0.index(ids.len())];
        let b = ids[pick.1.index(ids.len())];
        prop_assume!(a != b);
        let mut dump = d.to_dump();
        dump.spiders.iter_mut().find(|x| x.id == a).unwrap().phase = phases.0;
        dump.spiders.iter_mut().find(|x| x.id == b).unwrap().phase = phases.1;
        if !dump.wires.iter().any(|w| (w.0 == a && w.1 == b) || (w.0 == b && w.1 == a)) {
            dump.wires.push((a, b, EdgeType::Hadamard));
        }
        let mut d = ZxDiagram::from_dump(&dump).unwrap();
        for v in [a, b] {
            let boundary: Vec<u32> = d.edges(v).iter().map(|e| e.0).filter(|&w| d.is_boundary(w)).collect();
            for w in boundary {
                insert_boundary_dummy(&mut d, w).unwrap();
            }
        }
        let before = d.clone();
        let m = dense(&d);
        rule_pivot(&mut d, a, b).unwrap();
        prop_assert_eq!(d.num_spiders(), before.num_spiders() - 2);
        prop_assert_eq!(is_graph_like(&d), Ok(()));
        assert_same(&m, &d)?;
        boundaries_kept(&before, &d)?;
    }

    #[test]
    fn boundary_dummy(s in shape(6), pick in any::<prop::sample::Index>()) {
        let (mut d, _) = build(&s, false);
        let bs: Vec<u32> = d.inputs().iter().chain(d.outputs()).copied().collect();
        prop_assume!(!bs.is_empty());
        let b = bs[pick.index(bs.len())];
        let before = d.clone();
        let m = dense(&d);
        insert_boundary_dummy(&mut d, b).unwrap();
        assert_same(&m, &d)?;
        boundaries_kept(&before, &d)?;
    }

    #[test]
    fn full_simplification_of_diagrams(schedule in prop::sample::select(vec![Schedule::Sweep, Schedule::Parallel]), s in shape(6)) {
        let (mut d, _) = build(&s, false);
        let before = d.clone();
        let m = dense(&d);
        let report = clifford_simplify_with(&mut d, true, schedule);
        prop_assert_eq!(is_graph_like(&d), Ok(()));
        prop_assert!(report.spiders_after <= report.spiders_before + d.inputs().len() + d.outputs().len());
        assert_same(&m, &d)?;
        boundaries_kept(&before, &d)?;
    }

    #[test]
    fn full_simplification_of_circuits(schedule in prop::sample::select(vec![Schedule::Sweep, Schedule::Parallel]), n in prop::sample::select(vec![2usize, 4, 6]), depth in 1usize..=6, p in 0.0f64..0.6, r in 0.0f64..=1.0, seed in any::<u64>()) {
        let c = sample_circuit(&ModelParams::new(p, r, n, seed).with_depth(depth)).unwrap();
        let mut d = diagram_from_circuit(&c, None).unwrap();
        let before = d.clone();
        let m = dense(&d);
        clifford_simplify_with(&mut d, false, schedule);
        prop_assert_eq!(is_graph_like(&d), Ok(()));
        assert_same(&m, &d)?;
        boundaries_kept(&before, &d)?;
    }
}

#[test]
fn local_rule_sequence_disconnects() {
    // fusion of two Z spiders, two Hopf cuts, then a copy
    let mut d = ZxDiagram::new();
    let in0 = d.add_input(Position::new(0.0, 0.0));
    let in1 = d.add_input(Position::new(1.0, 0.0));
    let out0 = d.add_output(Position::new(0.0, 2.0));
    let out1 = d.add_output(Position::new(1.0, 2.0));
    let out2 = d.add_output(Position::new(2.0, 2.0));
    let za = d.add_spider(Color::Z, 0, Position::new(0.0, 0.5));
    let zb = d.add_spider(Color::Z, 0, Position::new(0.0, 1.0));
    let x1 = d.add_spider(Color::X, 0, Position::new(1.0, 0.5));
    let x2 = d.add_spider(Color::X, 0, Position::new(1.0, 1.0));
    let zc = d.add_spider(Color::Z, 0, Position::new(1.5, 1.5));
    for (a, b) in [
        (za, zb),
        (x1, za),
        (x1, zb),
        (x2, za),
        (x2, zb),
        (in0, za),
        (zb, out0),
        (x1, zc),
        (zc, out1),
        (zc, out2),
        (x2, in1),
    ] {
        d.add_edge(a, b, EdgeType::Plain);
    }
    d.set_telemetry(true);
    let m = dense(&d);
    let (_, components_before) = d.component_labels();

    rule_fusion(&mut d, za, zb).unwrap();
    rule_hopf(&mut d, za, x1).unwrap();
    rule_hopf(&mut d, za, x2).unwrap();
    rule_copy(&mut d, x1, zc).unwrap();

    let rules: Vec<&str> = d.events().iter().map(|e| e.rule.name()).collect();
    assert_eq!(rules, ["fusion", "hopf", "hopf", "copy"]);
    let (_, components_after) = d.component_labels();
    assert!(components_after > components_before);
    assert!(proportional(&m, &dense(&d), 1e-9));
}
