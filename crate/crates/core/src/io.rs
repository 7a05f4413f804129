//! Geometry JSON, sweep CSV, and JSON views of exact results.
//!
//! Geometry files look like
//! `{"dim": 2, "boxes": [[["0/1","1/1"],["0/1","1/1"]]], "balls": [{"c": [0.5, 0.5], "r": 0.25}]}`.
//! Box coordinates are exact and written as `"num/den"`; plain numbers and
//! decimal strings are accepted on input. Ball data is binary floating point.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::ball::Ball;
use crate::boxset::{AxisBox, BoxSet};
use crate::chain::ChainTrace;
use crate::error::{Error, Result};
use crate::halo::sweep::SweepRecord;
use crate::interval::IntervalSet;
use crate::maximal_1d::SuperlevelResult;
use crate::scalar::{exact_from_f64, format_exact, parse_exact, pow_exact, ExactScalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Geometry {
    pub set: BoxSet<ExactScalar>,
    pub balls: Vec<Ball>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawScalar {
    Text(String),
    Number(f64),
}

#[derive(Serialize, Deserialize)]
struct RawBall {
    c: Vec<f64>,
    r: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    dim: usize,
    #[serde(default)]
    boxes: Vec<Vec<(RawScalar, RawScalar)>>,
    #[serde(default)]
    balls: Vec<RawBall>,
}

fn scalar(raw: &RawScalar) -> Result<ExactScalar> {
    match raw {
        RawScalar::Text(s) => parse_exact(s),
        RawScalar::Number(x) => exact_from_f64(*x),
    }
}

impl Geometry {
    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    /// The set as a union of intervals (dimension 1 only).
    pub fn interval_set(&self) -> Result<IntervalSet<ExactScalar>> {
        if self.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: self.dim(),
            });
        }
        Ok(IntervalSet::from_intervals(
            self.set.boxes().iter().map(|b| b.axis(0).clone()),
        ))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawGeometry = serde_json::from_str(text).map_err(|e| Error::Geometry(e.to_string()))?;
        let mut boxes = Vec::with_capacity(raw.boxes.len());
        for b in &raw.boxes {
            let bounds = b
                .iter()
                .map(|(lo, hi)| Ok((scalar(lo)?, scalar(hi)?)))
                .collect::<Result<Vec<_>>>()?;
            boxes.push(AxisBox::from_bounds(bounds)?);
        }
        let set = BoxSet::canonicalize(raw.dim, boxes)?;
        let balls = raw
            .balls
            .into_iter()
            .map(|b| {
                if b.c.len() != raw.dim {
                    return Err(Error::DimensionMismatch {
                        expected: raw.dim,
                        found: b.c.len(),
                    });
                }
                Ball::new(b.c, b.r)
            })
            .collect::<Result<_>>()?;
        Ok(Self { set, balls })
    }

    pub fn to_json(&self) -> Value {
        let boxes: Vec<Value> = self
            .set
            .boxes()
            .iter()
            .map(|b| {
                Value::Array(
                    b.axes()
                        .iter()
                        .map(|iv| json!([format_exact(iv.lo()), format_exact(iv.hi())]))
                        .collect(),
                )
            })
            .collect();
        let balls: Vec<Value> = self
            .balls
            .iter()
            .map(|b| json!({"c": b.center(), "r": b.radius()}))
            .collect();
        json!({"dim": self.dim(), "boxes": boxes, "balls": balls})
    }
}

pub fn interval_set_json(set: &IntervalSet<ExactScalar>) -> Value {
    Value::Array(
        set.intervals()
            .iter()
            .map(|iv| json!([format_exact(iv.lo()), format_exact(iv.hi())]))
            .collect(),
    )
}

pub fn superlevel_json(res: &SuperlevelResult<ExactScalar>) -> Value {
    json!({
        "level": format_exact(&res.level),
        "intervals": interval_set_json(&res.set),
        "measure": format_exact(&res.set.measure()),
        "ratio": format_exact(&res.ratio),
    })
}

pub fn boxset_json(set: &BoxSet<ExactScalar>) -> Value {
    Geometry {
        set: set.clone(),
        balls: Vec::new(),
    }
    .to_json()["boxes"]
        .clone()
}

pub fn chain_trace_json(trace: &ChainTrace<ExactScalar>) -> Value {
    let steps: Vec<Value> = trace
        .sets
        .iter()
        .zip(&trace.measures)
        .enumerate()
        .map(|(j, (set, m))| {
            json!({
                "step": j,
                "level": format_exact(&trace.levels[j]),
                "boxes": boxset_json(set),
                "measure": format_exact(m),
            })
        })
        .collect();
    json!({
        "dim": trace.dim,
        "axes": trace.axes.iter().map(|a| a + 1).collect::<Vec<_>>(),
        "levels": trace.levels.iter().map(format_exact).collect::<Vec<_>>(),
        "step_factor": format_exact(&trace.bound_factor),
        "bound_factor": format_exact(&pow_exact(&trace.bound_factor, trace.axes.len() as u32)),
        "bound_holds": trace.bound_holds(),
        "steps": steps,
    })
}

const CSV_HEADER: [&str; 6] = ["alpha", "lower_ratio", "upper_bound", "family", "grid", "seed"];

/// Sweep records as CSV with the columns
/// `alpha, lower_ratio, upper_bound, family, grid, seed`.
pub fn sweep_csv(records: &[SweepRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| Error::Table(e.to_string());
    w.write_record(CSV_HEADER).map_err(io_err)?;
    for r in records {
        w.write_record([
            r.alpha.to_string(),
            r.lower_ratio.to_string(),
            r.upper_bound.map(|u| u.to_string()).unwrap_or_default(),
            r.family.clone(),
            r.grid.to_string(),
            r.seed.to_string(),
        ])
        .map_err(io_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Table(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// `(alpha, column)` pairs from a sweep CSV; blank cells and `#` comment
/// lines are skipped.
pub fn read_sweep_column(text: &str, column: &str) -> Result<Vec<(f64, f64)>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = r.headers().map_err(|e| Error::Table(e.to_string()))?.clone();
    let find = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::InvalidParameter {
            name: "col",
            reason: format!("no column {name:?}"),
        })
    };
    let (ia, iv) = (find("alpha")?, find(column)?);
    let num = |s: &str| {
        s.trim().parse::<f64>().map_err(|_| Error::ParseScalar {
            input: s.to_string(),
            reason: "not a number".into(),
        })
    };
    let mut out = Vec::new();
    for row in r.records() {
        let row = row.map_err(|e| Error::Table(e.to_string()))?;
        let v = &row[iv];
        if v.trim().is_empty() {
            continue;
        }
        out.push((num(&row[ia])?, num(v)?));
    }
    Ok(out)
}

#[derive(Deserialize)]
struct CsvRow {
    alpha: f64,
    lower_ratio: f64,
    upper_bound: Option<f64>,
    family: String,
    grid: f64,
    seed: u64,
}

/// Sweep records back from [`sweep_csv`] output. Columns the CSV does not
/// carry (`set`, `candidates`, `exact_ratio`) come back empty.
pub fn read_sweep_records(text: &str) -> Result<Vec<SweepRecord>> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    r.deserialize::<CsvRow>()
        .map(|row| {
            let row = row.map_err(|e| Error::Table(e.to_string()))?;
            Ok(SweepRecord {
                alpha: row.alpha,
                lower_ratio: row.lower_ratio,
                upper_bound: row.upper_bound,
                family: row.family,
                set: String::new(),
                grid: row.grid,
                candidates: 0,
                seed: row.seed,
                exact_ratio: None,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn geometry_round_trip() {
        let text = r#"{"dim":2,"boxes":[[["1/2","3"],[0,"1.25"]],[[0,1],[0,1]]],"balls":[{"c":[0.5,0.25],"r":0.125}]}"#;
        let g = Geometry::parse(text).unwrap();
        assert_eq!(g.set.measure(), q(25, 8) + q(1, 2));
        let again = Geometry::parse(&g.to_json().to_string()).unwrap();
        assert_eq!(again, g);
        assert_eq!(again.to_json(), g.to_json());
    }

    #[test]
    fn malformed_geometry() {
        assert!(matches!(Geometry::parse("{"), Err(Error::Geometry(_))));
        assert!(matches!(
            Geometry::parse(r#"{"dim":1,"boxes":[[["1/0","1"]]]}"#),
            Err(Error::ParseScalar { .. })
        ));
        assert!(Geometry::parse(r#"{"dim":1,"boxes":[[["1","0"]]]}"#).is_err());
        assert!(Geometry::parse(r#"{"dim":2,"balls":[{"c":[0],"r":1}]}"#).is_err());
    }

    #[test]
    fn intervals_from_one_dimensional_geometry() {
        let g = Geometry::parse(r#"{"dim":1,"boxes":[[["2","3"]],[["0","1"]]]}"#).unwrap();
        let e = g.interval_set().unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(interval_set_json(&e), json!([["0/1", "1/1"], ["2/1", "3/1"]]));
    }

    #[test]
    fn csv_column_round_trip() {
        let recs: Vec<SweepRecord> = [0.5, 0.75]
            .iter()
            .map(|&a| SweepRecord {
                alpha: a,
                lower_ratio: 2.0 / a - 1.0,
                upper_bound: (a > 0.6).then_some(9.0),
                family: "intervals1d".into(),
                set: "unit".into(),
                grid: 0.001,
                candidates: 1,
                seed: 0,
                exact_ratio: None,
            })
            .collect();
        let text = sweep_csv(&recs).unwrap();
        assert!(text.starts_with("alpha,lower_ratio,upper_bound,family,grid,seed\n"));
        let text = format!("# provenance line\n{text}");
        assert_eq!(read_sweep_column(&text, "lower_ratio").unwrap(), vec![(0.5, 3.0), (0.75, 2.0 / 0.75 - 1.0)]);
        assert_eq!(read_sweep_column(&text, "upper_bound").unwrap(), vec![(0.75, 9.0)]);
        assert!(read_sweep_column(&text, "nope").is_err());
        let back = read_sweep_records(&text).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!((back[1].alpha, back[1].upper_bound, back[0].upper_bound), (0.75, Some(9.0), None));
        assert!(matches!(read_sweep_records("alpha\nx\n"), Err(Error::Table(_))));
    }
}
