//! On-disk instance formats.
//!
//! Instances are one JSON object `{"kind", "d", "items", ...}` with every
//! float written as a decimal string (Rust's shortest round-trip form), so a
//! load after a save gives back the same bits. Traces are newline-delimited
//! JSON: a header line with `kind = "trace"`, then one operation per line.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use maxrs_core::convolution::WeightedPoint1D;
use maxrs_core::{ColoredBall, PointD, WeightedBall};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Balls,
    ColoredDisks,
    Sequences,
    Batched1d,
    Bsei,
    Trace,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Balls => "balls",
            Kind::ColoredDisks => "colored_disks",
            Kind::Sequences => "sequences",
            Kind::Batched1d => "batched1d",
            Kind::Bsei => "bsei",
            Kind::Trace => "trace",
        }
    }
}

pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn parse_num(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

fn nums(v: &[f64]) -> Vec<String> {
    v.iter().map(|x| num(*x)).collect()
}

fn parse_nums(v: &[String]) -> Result<Vec<f64>, String> {
    v.iter().map(|s| parse_num(s)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallItem {
    pub id: u64,
    pub center: Vec<String>,
    pub weight: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskItem {
    pub id: u64,
    pub center: Vec<String>,
    pub color: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairItem {
    pub a: Vec<String>,
    pub b: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointItem {
    pub x: String,
    pub w: String,
}

/// The raw file object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub kind: Kind,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub generator: BTreeMap<String, String>,
    /// Known optimum (planted value), if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opt: Option<String>,
    /// Interval lengths of a batched 1D instance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<String>>,
    pub items: Vec<Value>,
}

/// Parsed instance content.
#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Balls(Vec<WeightedBall>),
    ColoredDisks(Vec<ColoredBall>),
    Sequences(Vec<(Vec<f64>, Vec<f64>)>),
    Batched1d { points: Vec<WeightedPoint1D>, lengths: Vec<f64> },
    Bsei(Vec<f64>),
    Trace(Vec<TraceOp>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub d: usize,
    pub seed: Option<u64>,
    pub generator: BTreeMap<String, String>,
    pub opt: Option<f64>,
    pub payload: Payload,
}

impl Instance {
    pub fn kind(&self) -> Kind {
        match self.payload {
            Payload::Balls(_) => Kind::Balls,
            Payload::ColoredDisks(_) => Kind::ColoredDisks,
            Payload::Sequences(_) => Kind::Sequences,
            Payload::Batched1d { .. } => Kind::Batched1d,
            Payload::Bsei(_) => Kind::Bsei,
            Payload::Trace(_) => Kind::Trace,
        }
    }

    pub fn len(&self) -> usize {
        match &self.payload {
            Payload::Balls(v) => v.len(),
            Payload::ColoredDisks(v) => v.len(),
            Payload::Sequences(v) => v.first().map_or(0, |p| p.0.len()),
            Payload::Batched1d { points, .. } => points.len(),
            Payload::Bsei(v) => v.len(),
            Payload::Trace(v) => v.len(),
        }
    }
}

/// One line of a trace.
#[derive(Clone, Debug, PartialEq)]
pub enum TraceOp {
    Insert(WeightedBall),
    Delete(u64),
    Query,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
enum TraceLine {
    Insert { id: u64, center: Vec<String>, weight: String },
    Delete { id: u64 },
    Query,
}

#[derive(Serialize, Deserialize)]
struct TraceHeader {
    kind: Kind,
    d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    generator: BTreeMap<String, String>,
}

fn point(center: &[String], d: usize) -> Result<PointD, String> {
    let c = parse_nums(center)?;
    if c.len() != d {
        return Err(format!("center has {} coordinates, expected {d}", c.len()));
    }
    PointD::new(&c).map_err(|e| e.to_string())
}

fn items<T: for<'de> Deserialize<'de>>(values: &[Value]) -> Result<Vec<T>, String> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| serde_json::from_value(v.clone()).map_err(|e| format!("item {i}: {e}")))
        .collect()
}

fn to_values<T: Serialize>(v: impl IntoIterator<Item = T>) -> Vec<Value> {
    v.into_iter().map(|x| serde_json::to_value(x).expect("plain data")).collect()
}

impl Instance {
    pub fn to_file(&self) -> InstanceFile {
        let d = self.d;
        let mut lengths = None;
        let items = match &self.payload {
            Payload::Balls(v) => to_values(v.iter().map(|b| BallItem {
                id: b.id,
                center: nums(b.center.coords()),
                weight: num(b.weight),
            })),
            Payload::ColoredDisks(v) => to_values(v.iter().map(|b| DiskItem {
                id: b.id,
                center: nums(b.center.coords()),
                color: b.color,
            })),
            Payload::Sequences(v) => to_values(v.iter().map(|(a, b)| PairItem { a: nums(a), b: nums(b) })),
            Payload::Batched1d { points, lengths: l } => {
                lengths = Some(nums(l));
                to_values(points.iter().map(|p| PointItem { x: num(p.x), w: num(p.w) }))
            }
            Payload::Bsei(v) => to_values(nums(v)),
            Payload::Trace(_) => Vec::new(),
        };
        InstanceFile {
            kind: self.kind(),
            d,
            seed: self.seed,
            generator: self.generator.clone(),
            opt: self.opt.map(num),
            lengths,
            items,
        }
    }

    pub fn from_file(f: InstanceFile) -> Result<Instance, String> {
        let d = f.d;
        let payload = match f.kind {
            Kind::Balls => Payload::Balls(
                items::<BallItem>(&f.items)?
                    .iter()
                    .map(|b| {
                        WeightedBall::new(b.id, point(&b.center, d)?, parse_num(&b.weight)?).map_err(|e| e.to_string())
                    })
                    .collect::<Result<_, String>>()?,
            ),
            Kind::ColoredDisks => Payload::ColoredDisks(
                items::<DiskItem>(&f.items)?
                    .iter()
                    .map(|b| ColoredBall::new(b.id, point(&b.center, d)?, b.color).map_err(|e| e.to_string()))
                    .collect::<Result<_, String>>()?,
            ),
            Kind::Sequences => Payload::Sequences(
                items::<PairItem>(&f.items)?
                    .iter()
                    .map(|p| Ok((parse_nums(&p.a)?, parse_nums(&p.b)?)))
                    .collect::<Result<_, String>>()?,
            ),
            Kind::Batched1d => Payload::Batched1d {
                points: items::<PointItem>(&f.items)?
                    .iter()
                    .map(|p| Ok(WeightedPoint1D { x: parse_num(&p.x)?, w: parse_num(&p.w)? }))
                    .collect::<Result<_, String>>()?,
                lengths: parse_nums(f.lengths.as_deref().ok_or("batched1d instance without lengths")?)?,
            },
            Kind::Bsei => Payload::Bsei(parse_nums(&items::<String>(&f.items)?)?),
            Kind::Trace => return Err("traces are newline-delimited; see the trace format".into()),
        };
        Ok(Instance {
            d,
            seed: f.seed,
            generator: f.generator,
            opt: f.opt.as_deref().map(parse_num).transpose()?,
            payload,
        })
    }

    /// Serialized form: pretty JSON, or NDJSON for traces.
    pub fn to_text(&self) -> String {
        if let Payload::Trace(ops) = &self.payload {
            let header = TraceHeader {
                kind: Kind::Trace,
                d: self.d,
                seed: self.seed,
                generator: self.generator.clone(),
            };
            let mut out = serde_json::to_string(&header).expect("plain data");
            out.push('\n');
            for op in ops {
                let line = match op {
                    TraceOp::Insert(b) => TraceLine::Insert {
                        id: b.id,
                        center: nums(b.center.coords()),
                        weight: num(b.weight),
                    },
                    TraceOp::Delete(id) => TraceLine::Delete { id: *id },
                    TraceOp::Query => TraceLine::Query,
                };
                out.push_str(&serde_json::to_string(&line).expect("plain data"));
                out.push('\n');
            }
            return out;
        }
        let mut s = serde_json::to_string_pretty(&self.to_file()).expect("plain data");
        s.push('\n');
        s
    }

    pub fn from_text(text: &str) -> Result<Instance, String> {
        let first = text.lines().find(|l| !l.trim().is_empty()).ok_or("empty instance file")?;
        if let Ok(h) = serde_json::from_str::<TraceHeader>(first) {
            if h.kind == Kind::Trace {
                let mut ops = Vec::new();
                for (i, line) in text.lines().skip_while(|l| l.trim().is_empty()).skip(1).enumerate() {
                    if line.trim().is_empty() {
                        continue;
                    }
                    let op: TraceLine = serde_json::from_str(line).map_err(|e| format!("trace line {}: {e}", i + 2))?;
                    ops.push(match op {
                        TraceLine::Insert { id, center, weight } => TraceOp::Insert(
                            WeightedBall::new(id, point(&center, h.d)?, parse_num(&weight)?).map_err(|e| e.to_string())?,
                        ),
                        TraceLine::Delete { id } => TraceOp::Delete(id),
                        TraceLine::Query => TraceOp::Query,
                    });
                }
                return Ok(Instance {
                    d: h.d,
                    seed: h.seed,
                    generator: h.generator,
                    opt: None,
                    payload: Payload::Trace(ops),
                });
            }
        }
        let f: InstanceFile = serde_json::from_str(text).map_err(|e| format!("instance: {e}"))?;
        Instance::from_file(f)
    }

    pub fn load(path: &Path) -> Result<Instance, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Instance::from_text(&text)
    }

    pub fn save(&self, path: &Path) -> Result<(), String> {
        fs::write(path, self.to_text()).map_err(|e| format!("{}: {e}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_survive_a_round_trip() {
        let b = WeightedBall::new(3, PointD::xy(0.1 + 0.2, -1e-300), 1.0 / 3.0).unwrap();
        let inst = Instance {
            d: 2,
            seed: Some(9),
            generator: BTreeMap::from([("name".into(), "test".into())]),
            opt: Some(2.5),
            payload: Payload::Balls(vec![b]),
        };
        let back = Instance::from_text(&inst.to_text()).unwrap();
        assert_eq!(back, inst);
        let text = inst.to_text();
        assert!(text.contains("\"0.30000000000000004\""));
    }

    #[test]
    fn trace_round_trip() {
        let inst = Instance {
            d: 2,
            seed: None,
            generator: BTreeMap::new(),
            opt: None,
            payload: Payload::Trace(vec![
                TraceOp::Insert(WeightedBall::new(1, PointD::xy(0.5, 0.25), 2.0).unwrap()),
                TraceOp::Query,
                TraceOp::Delete(1),
            ]),
        };
        let text = inst.to_text();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(Instance::from_text(&text).unwrap(), inst);
    }

    #[test]
    fn bad_inputs() {
        assert!(Instance::from_text("").is_err());
        assert!(Instance::from_text(r#"{"kind":"balls","d":2,"items":[{"id":0,"center":["x","0"],"weight":"1"}]}"#).is_err());
        assert!(Instance::from_text(r#"{"kind":"balls","d":3,"items":[{"id":0,"center":["0","0"],"weight":"1"}]}"#).is_err());
        assert!(Instance::from_text(r#"{"kind":"batched1d","d":1,"items":[]}"#).is_err());
    }
}
