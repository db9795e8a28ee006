use super::{Color, EdgeType, Position, ZxDiagram};
use crate::circuit::{BrickworkCircuit, CircuitRecord, GateKind, InitialState};
use crate::error::Result;

/// Splices out a phase-0 degree-2 placeholder, joining its two neighbours.
/// Closed loops and plain self-loops left behind are scalars and vanish.
fn splice(d: &mut ZxDiagram, v: u32) {
    let ends = d.edges(v).to_vec();
    d.remove_spider(v);
    if let [(a, ta), (b, tb)] = ends[..] {
        if a == v || b == v {
            return;
        }
        let ty = ta.compose(tb);
        if a == b && ty == EdgeType::Plain {
            return;
        }
        d.add_edge(a, b, ty);
    }
}

/// Diagram of the circuit's linear map.
///
/// With `prepared = None` the diagram has one input per site at `t = 0` and
/// one output per site at `t = depth`. With a prepared initial state the
/// inputs are replaced by that state: Bell pairs as cups, product states as
/// one-legged X spiders.
///
/// CNOT becomes a Z spider on the control joined by a plain wire to an X
/// spider on the target. SWAP crosses wires. A Bell-pair measurement becomes
/// a cap on the incoming wires followed by a cup on the outgoing ones, the
/// projector onto `(|00> + |11>)/sqrt 2`.
pub fn diagram_from_circuit(c: &BrickworkCircuit, prepared: Option<InitialState>) -> Result<ZxDiagram> {
    c.validate()?;
    let n = c.n_qubits;
    let mut d = ZxDiagram::new();
    let mut placeholders = Vec::new();
    // spider owning the open wire end on each site
    let mut front: Vec<u32> = Vec::with_capacity(n);
    match prepared {
        None => {
            for k in 0..n {
                front.push(d.add_input(Position::new(k as f64, 0.0)));
            }
        }
        Some(InitialState::BellPairs) => {
            for k in (0..n).step_by(2) {
                let cup = d.add_spider(Color::Z, 0, Position::new(k as f64 + 0.5, 0.0));
                placeholders.push(cup);
                front.push(cup);
                front.push(cup);
            }
        }
        Some(InitialState::Product) => {
            for k in 0..n {
                front.push(d.add_spider(Color::X, 0, Position::new(k as f64, 0.0)));
            }
        }
    }
    for brick in &c.bricks {
        let (l, r) = brick.sites();
        let t = c.time_of_layer(brick.layer);
        match brick.kind {
            GateKind::Identity => {}
            GateKind::Swap => front.swap(l, r),
            GateKind::Cnot(_) => {
                let (ctl, tgt) = brick.cnot_sites().expect("cnot");
                let z = d.add_spider(Color::Z, 0, Position::new(ctl as f64, t));
                let x = d.add_spider(Color::X, 0, Position::new(tgt as f64, t));
                d.add_edge(front[ctl], z, EdgeType::Plain);
                d.add_edge(front[tgt], x, EdgeType::Plain);
                d.add_edge(z, x, EdgeType::Plain);
                front[ctl] = z;
                front[tgt] = x;
            }
            GateKind::BellMeasure => {
                d.add_edge(front[l], front[r], EdgeType::Plain);
                let cup = d.add_spider(Color::Z, 0, Position::new(l as f64 + 0.5, t));
                placeholders.push(cup);
                front[l] = cup;
                front[r] = cup;
            }
        }
    }
    for (k, &f) in front.iter().enumerate() {
        let o = d.add_output(Position::new(k as f64, c.depth_layers as f64));
        d.add_edge(f, o, EdgeType::Plain);
    }
    for v in placeholders {
        splice(&mut d, v);
    }
    Ok(d)
}

/// [`diagram_from_circuit`] on a JSON circuit record.
pub fn diagram_from_record_json(text: &str, prepared: Option<InitialState>) -> Result<ZxDiagram> {
    let rec = CircuitRecord::from_json(text)?;
    diagram_from_circuit(&rec.circuit, prepared)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{sample_circuit, Brick, ControlSide, ModelParams};

    fn circuit(n: usize, depth: usize, kinds: &[GateKind]) -> BrickworkCircuit {
        let mut c = sample_circuit(&ModelParams::new(1.0, 0.0, n, 0).with_depth(depth)).unwrap();
        for (b, k) in c.bricks.iter_mut().zip(kinds.iter().chain(std::iter::repeat(&GateKind::Identity))) {
            b.kind = *k;
        }
        c
    }

    #[test]
    fn single_cnot() {
        let c = circuit(2, 1, &[GateKind::Cnot(ControlSide::Left)]);
        let d = diagram_from_circuit(&c, None).unwrap();
        assert_eq!(d.num_internal(), 2);
        assert_eq!(d.num_wires(), 5);
        d.check_consistency().unwrap();
    }

    #[test]
    fn identity_circuit_is_parallel_wires() {
        let c = circuit(6, 3, &[]);
        let d = diagram_from_circuit(&c, None).unwrap();
        assert_eq!(d.num_internal(), 0);
        assert_eq!(d.num_wires(), 6);
        for k in 0..6 {
            assert!(d.connected(d.inputs()[k], d.outputs()[k]));
        }
    }

    #[test]
    fn bell_measurement_is_cap_and_cup() {
        let c = circuit(2, 1, &[GateKind::BellMeasure]);
        let d = diagram_from_circuit(&c, None).unwrap();
        let (i, o) = (d.inputs().to_vec(), d.outputs().to_vec());
        assert_eq!(d.num_internal(), 0);
        assert!(d.connected(i[0], i[1]));
        assert!(d.connected(o[0], o[1]));
    }

    #[test]
    fn prepared_states() {
        let c = circuit(4, 2, &[]);
        let d = diagram_from_circuit(&c, Some(InitialState::BellPairs)).unwrap();
        assert!(d.inputs().is_empty());
        assert!(d.connected(d.outputs()[0], d.outputs()[1]));
        assert_eq!(d.num_spiders(), 4);
        let d = diagram_from_circuit(&c, Some(InitialState::Product)).unwrap();
        assert_eq!(d.num_internal(), 4);
    }

    #[test]
    fn repeated_caps_close_loops() {
        let mut c = circuit(2, 2, &[]);
        c.bricks = vec![
            Brick { layer: 0, bond: 0, kind: GateKind::BellMeasure },
            Brick { layer: 2, bond: 0, kind: GateKind::BellMeasure },
        ];
        let d = diagram_from_circuit(&c, None).unwrap();
        d.check_consistency().unwrap();
        assert_eq!(d.num_internal(), 0);
        assert_eq!(d.num_wires(), 2);
    }

    #[test]
    fn record_json_entry_point() {
        let d = diagram_from_record_json(
            r#"{"n_qubits":2,"depth":1,"seed":0,"bricks":[[0,0,"cnot","left"]]}"#,
            None,
        )
        .unwrap();
        assert_eq!(d.num_internal(), 2);
        assert!(diagram_from_record_json("[]", None).is_err());
    }
}
