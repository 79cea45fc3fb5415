use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::*;

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct DiagramFile {
    #[serde(default)]
    edges: Vec<String>,
    #[serde(default)]
    crossings: Vec<CrossingFile>,
    #[serde(default)]
    framing_points: Vec<(String, Value)>,
    #[serde(default)]
    regions: Vec<RegionFile>,
    #[serde(default)]
    orientations: BTreeMap<String, Value>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct CrossingFile {
    e: [String; 4],
    sign: i64,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RegionFile {
    id: u32,
    #[serde(default)]
    strands: Vec<StrandFile>,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct StrandFile {
    edge: String,
    dir: Dir,
}

fn orientation_bit(v: &Value) -> Option<bool> {
    match v {
        Value::Number(n) => match n.as_i64() {
            Some(1) => Some(true),
            Some(-1) => Some(false),
            _ => None,
        },
        Value::String(s) => match s.as_str() {
            "+" | "+1" | "fwd" | "ccw" => Some(true),
            "-" | "-1" | "rev" | "cw" => Some(false),
            _ => None,
        },
        _ => None,
    }
}

pub(super) fn parse(text: &str) -> Result<LinkDiagram, DiagramError> {
    let f: DiagramFile = serde_json::from_str(text)
        .map_err(|e| DiagramError::Schema(format!("line {} column {}: {e}", e.line(), e.column())))?;
    let index: HashMap<&str, EdgeId> = f.edges.iter().enumerate().map(|(i, s)| (s.as_str(), i as EdgeId)).collect();
    let lookup = |name: &str, ctx: &str| -> Result<EdgeId, DiagramError> {
        index
            .get(name)
            .copied()
            .ok_or_else(|| DiagramError::Schema(format!("{ctx}: edge {name:?} is not listed in `edges`")))
    };
    let mut crossings = Vec::with_capacity(f.crossings.len());
    for (i, c) in f.crossings.iter().enumerate() {
        let ctx = format!("crossings[{i}]");
        if c.sign != 1 && c.sign != -1 {
            return Err(DiagramError::Schema(format!("{ctx}: sign must be 1 or -1, got {}", c.sign)));
        }
        let mut e = [0; 4];
        for k in 0..4 {
            e[k] = lookup(&c.e[k], &ctx)?;
        }
        crossings.push(Crossing { e, sign: c.sign as i8 });
    }
    let mut framing = Vec::new();
    for (i, (name, w)) in f.framing_points.iter().enumerate() {
        let ctx = format!("framing_points[{i}]");
        let e = lookup(name, &ctx)?;
        let w = match w {
            Value::Number(n) if n.is_i64() => n.as_i64().unwrap(),
            _ => {
                return Err(DiagramError::Schema(format!(
                    "{ctx}: weight must be an integer (half-integral framing points are not admissible), got {w}"
                )))
            }
        };
        framing.push((e, w));
    }
    let mut regions = Vec::new();
    for (i, r) in f.regions.iter().enumerate() {
        let ctx = format!("regions[{i}]");
        let mut strands = Vec::new();
        for s in &r.strands {
            strands.push(Transit { edge: lookup(&s.edge, &ctx)?, dir: s.dir });
        }
        regions.push(SurgeryRegion { id: r.id, strands });
    }
    let mut bits = BTreeMap::new();
    for (name, v) in &f.orientations {
        let e = lookup(name, "orientations")?;
        let b = orientation_bit(v)
            .ok_or_else(|| DiagramError::Schema(format!("orientations: bad tag {v} for edge {name:?}")))?;
        bits.insert(e, b);
    }
    let d = LinkDiagram::new(f.edges.clone(), crossings, framing, regions, bits.clone())?;
    for (&e, &b) in &bits {
        if !d.is_loop_edge(e) && reference_bit(&d, e) != b {
            return Err(DiagramError::Orientation(format!(
                "edge {:?}: declared orientation disagrees with crossing data",
                d.edge_name(e)
            )));
        }
    }
    Ok(d)
}

/// `true` when edge `e` runs from its first listed slot to its second one.
fn reference_bit(d: &LinkDiagram, e: EdgeId) -> bool {
    let (t, h) = (d.tail(e).unwrap(), d.head(e).unwrap());
    (t.crossing, t.slot) < (h.crossing, h.slot)
}

pub(super) fn to_json(d: &LinkDiagram) -> String {
    let name = |e: EdgeId| d.edge_name(e).to_string();
    let f = DiagramFile {
        edges: d.edges().to_vec(),
        crossings: d
            .crossings()
            .iter()
            .map(|x| CrossingFile { e: x.e.map(name), sign: x.sign as i64 })
            .collect(),
        framing_points: d.framing_points().iter().map(|&(e, w)| (name(e), Value::from(w))).collect(),
        regions: d
            .regions()
            .iter()
            .map(|r| RegionFile {
                id: r.id,
                strands: r.strands.iter().map(|t| StrandFile { edge: name(t.edge), dir: t.dir }).collect(),
            })
            .collect(),
        orientations: (0..d.edges().len() as EdgeId)
            .map(|e| {
                let b = if d.is_loop_edge(e) { d.loop_ccw(e) } else { reference_bit(d, e) };
                (name(e), Value::from(if b { "+" } else { "-" }))
            })
            .collect(),
    };
    serde_json::to_string_pretty(&f).expect("serialisable")
}
