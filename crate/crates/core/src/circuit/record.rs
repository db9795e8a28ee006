//! JSON circuit records: `{n_qubits, depth, seed, bricks: [[layer, bond, kind, control_side?], ...]}`.

use serde_json::{json, Value};

use super::{BrickworkCircuit, Brick, ControlSide, GateKind};
use crate::error::{Error, Result};

#[derive(serde::Serialize)]
struct Layout {
    n_qubits: usize,
    depth: usize,
    seed: u64,
    bricks: Vec<Value>,
}

/// Serializable form of a [`BrickworkCircuit`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitRecord {
    pub circuit: BrickworkCircuit,
}

fn parse_err(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        location: location.into(),
        message: message.into(),
    }
}

fn field_u64(obj: &serde_json::Map<String, Value>, name: &str) -> Result<u64> {
    obj.get(name)
        .ok_or_else(|| parse_err(name, "missing field"))?
        .as_u64()
        .ok_or_else(|| parse_err(name, "expected a non-negative integer"))
}

impl CircuitRecord {
    pub fn new(circuit: BrickworkCircuit) -> Self {
        CircuitRecord { circuit }
    }

    fn layout(&self) -> Layout {
        let c = &self.circuit;
        let bricks = c
            .bricks
            .iter()
            .map(|b| match b.kind {
                GateKind::Cnot(side) => {
                    let side = match side {
                        ControlSide::Left => "left",
                        ControlSide::Right => "right",
                    };
                    json!([b.layer, b.bond, "cnot", side])
                }
                k => json!([b.layer, b.bond, k.name()]),
            })
            .collect();
        Layout {
            n_qubits: c.n_qubits,
            depth: c.depth_layers,
            seed: c.seed,
            bricks,
        }
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self.layout()).expect("record serializes")
    }

    /// Compact JSON with keys in schema order.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.layout()).expect("record serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text)?;
        Self::from_value(&value)
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| parse_err("$", "expected an object"))?;
        let n_qubits = field_u64(obj, "n_qubits")? as usize;
        let depth_layers = field_u64(obj, "depth")? as usize;
        let seed = field_u64(obj, "seed")?;
        let raw = obj
            .get("bricks")
            .and_then(Value::as_array)
            .ok_or_else(|| parse_err("bricks", "expected an array"))?;
        let mut bricks = Vec::with_capacity(raw.len());
        for (i, entry) in raw.iter().enumerate() {
            let loc = format!("bricks[{i}]");
            let items = entry
                .as_array()
                .ok_or_else(|| parse_err(&loc, "expected [layer, bond, kind, control_side?]"))?;
            if !(3..=4).contains(&items.len()) {
                return Err(parse_err(&loc, format!("expected 3 or 4 entries, got {}", items.len())));
            }
            let layer = items[0]
                .as_u64()
                .and_then(|v| u32::try_from(v).ok())
                .ok_or_else(|| parse_err(&loc, "layer must be a non-negative integer"))?;
            let bond = items[1]
                .as_u64()
                .and_then(|v| u32::try_from(v).ok())
                .ok_or_else(|| parse_err(&loc, "bond must be a non-negative integer"))?;
            let kind_name = items[2]
                .as_str()
                .ok_or_else(|| parse_err(&loc, "kind must be a string"))?;
            let kind = match (kind_name, items.get(3)) {
                ("cnot", Some(side)) => match side.as_str() {
                    Some("left") => GateKind::Cnot(ControlSide::Left),
                    Some("right") => GateKind::Cnot(ControlSide::Right),
                    _ => return Err(parse_err(&loc, "control side must be \"left\" or \"right\"")),
                },
                ("cnot", None) => return Err(parse_err(&loc, "cnot needs a control side")),
                (_, Some(_)) => return Err(parse_err(&loc, "only cnot takes a control side")),
                ("swap", None) => GateKind::Swap,
                ("identity", None) => GateKind::Identity,
                ("bell", None) => GateKind::BellMeasure,
                (other, None) => return Err(parse_err(&loc, format!("unknown kind {other:?}"))),
            };
            bricks.push(Brick { layer, bond, kind });
        }
        let circuit = BrickworkCircuit {
            n_qubits,
            depth_layers,
            seed,
            bricks,
        };
        circuit
            .validate()
            .map_err(|e| parse_err("bricks", e.to_string()))?;
        Ok(CircuitRecord { circuit })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{sample_circuit, ModelParams};

    #[test]
    fn round_trip() {
        let c = sample_circuit(&ModelParams::new(0.3, 0.5, 6, 9).with_depth(3)).unwrap();
        let rec = CircuitRecord::new(c.clone());
        let back = CircuitRecord::from_json(&rec.to_json()).unwrap();
        assert_eq!(back.circuit, c);
    }

    #[test]
    fn literal_record() {
        let text = r#"{"n_qubits":2,"depth":1,"seed":5,"bricks":[[0,0,"cnot","right"]]}"#;
        let rec = CircuitRecord::from_json(text).unwrap();
        assert_eq!(rec.circuit.bricks[0].kind, GateKind::Cnot(ControlSide::Right));
        assert_eq!(rec.to_json(), text);
    }

    #[test]
    fn errors_name_the_brick() {
        let bad_kind = r#"{"n_qubits":2,"depth":1,"seed":0,"bricks":[[0,0,"toffoli"]]}"#;
        match CircuitRecord::from_json(bad_kind) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "bricks[0]"),
            other => panic!("{other:?}"),
        }
        let missing_side = r#"{"n_qubits":4,"depth":1,"seed":0,"bricks":[[0,0,"swap"],[0,2,"cnot"],[1,1,"swap"]]}"#;
        match CircuitRecord::from_json(missing_side) {
            Err(Error::Parse { location, .. }) => assert_eq!(location, "bricks[1]"),
            other => panic!("{other:?}"),
        }
        let misplaced = r#"{"n_qubits":2,"depth":1,"seed":0,"bricks":[[0,1,"swap"]]}"#;
        assert!(matches!(CircuitRecord::from_json(misplaced), Err(Error::Parse { .. })));
        assert!(matches!(CircuitRecord::from_json("{"), Err(Error::Parse { .. })));
        assert!(matches!(
            CircuitRecord::from_json(r#"{"depth":1,"seed":0,"bricks":[]}"#),
            Err(Error::Parse { .. })
        ));
    }
}
