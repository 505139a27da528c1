//! JSON encodings. Rationals are strings in lowest terms (`"3"`, `"-1/2"`),
//! `"-inf"` marks negative infinity, and ids are array positions. Encoders
//! are deterministic so equal values give identical bytes.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohomology::{Ambient, CohomologyError, CohomologyTable, Region};
use crate::curve::{BalancingReport, CurveError, Edge, EdgeHead, ExtendedPoint, Length, SmoothnessReport, SmoothnessWitness, TropicalCurve};
use crate::mumford::{SkeletonEdge, SkeletonError, SkeletonGraph};
use crate::tropicalize::{ModificationMap, PiecewiseAffineFunction, TropicalizeError};
use crate::valuation::{LogDistanceMatrix, MatrixError, ValidationReport};
use crate::value::{format_rational, parse_rational, LogValue, Q};

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Function(#[from] TropicalizeError),
    #[error(transparent)]
    Region(#[from] CohomologyError),
    #[error(transparent)]
    Skeleton(#[from] SkeletonError),
}

type Result<T> = std::result::Result<T, DecodeError>;

fn schema<T>(path: impl Into<String>, message: impl Into<String>) -> Result<T> {
    Err(DecodeError::Schema { path: path.into(), message: message.into() })
}

fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        DecodeError::Schema { path: if path == "." { "$".into() } else { path }, message: e.into_inner().to_string() }
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

fn log_value(s: &str, path: &str) -> Result<LogValue> {
    s.parse::<LogValue>().or_else(|e| schema(path, e.to_string()))
}

fn rational(s: &str, path: &str) -> Result<Q> {
    parse_rational(s).or_else(|e| schema(path, e.to_string()))
}

fn check_ids(ids: impl Iterator<Item = usize>, path: &str) -> Result<()> {
    for (pos, id) in ids.enumerate() {
        if id != pos {
            return schema(format!("{path}[{pos}].id"), format!("id {id} must equal its position {pos}"));
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    n: usize,
    #[serde(default)]
    labels: Vec<String>,
    #[serde(rename = "L")]
    l: Vec<Vec<String>>,
}

pub fn encode_matrix(m: &LogDistanceMatrix) -> String {
    to_json(&MatrixJson {
        n: m.n(),
        labels: m.labels().to_vec(),
        l: m.rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
    })
}

/// Parses shape and entries only; see [`decode_matrix`] for full validation.
pub fn decode_matrix_unchecked(text: &str) -> Result<LogDistanceMatrix> {
    let raw: MatrixJson = parse_json(text)?;
    if raw.l.len() != raw.n {
        return schema("n", format!("n = {} but L has {} rows", raw.n, raw.l.len()));
    }
    let entries = raw
        .l
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().enumerate().map(|(j, s)| log_value(s, &format!("L[{i}][{j}]"))).collect())
        .collect::<Result<Vec<Vec<LogValue>>>>()?;
    Ok(LogDistanceMatrix::from_rows_unchecked(entries, raw.labels)?)
}

pub fn decode_matrix(text: &str) -> Result<LogDistanceMatrix> {
    let m = decode_matrix_unchecked(text)?;
    Ok(LogDistanceMatrix::new(m.rows().to_vec(), m.labels().to_vec())?)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexJson {
    id: usize,
    coords: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeJson {
    tail: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    head: Option<usize>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    free: bool,
    direction: Vec<i64>,
    length: String,
    weight: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveJson {
    r: usize,
    vertices: Vec<VertexJson>,
    edges: Vec<EdgeJson>,
}

fn curve_json(c: &TropicalCurve) -> CurveJson {
    CurveJson {
        r: c.r(),
        vertices: c
            .vertices()
            .iter()
            .enumerate()
            .map(|(id, p)| VertexJson { id, coords: p.coords().iter().map(|x| x.to_string()).collect() })
            .collect(),
        edges: c
            .edges()
            .iter()
            .map(|e| EdgeJson {
                tail: e.tail,
                head: e.head.vertex(),
                free: e.is_free(),
                direction: e.direction.clone(),
                length: match e.length {
                    Length::Finite(l) => format_rational(&l),
                    Length::Infinite => "inf".into(),
                },
                weight: e.weight,
            })
            .collect(),
    }
}

fn curve_from_json(raw: CurveJson, prefix: &str) -> Result<TropicalCurve> {
    check_ids(raw.vertices.iter().map(|v| v.id), &format!("{prefix}vertices"))?;
    let vertices = raw
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.coords
                .iter()
                .enumerate()
                .map(|(j, s)| log_value(s, &format!("{prefix}vertices[{i}].coords[{j}]")))
                .collect::<Result<Vec<_>>>()
                .map(ExtendedPoint)
        })
        .collect::<Result<Vec<_>>>()?;
    let edges = raw
        .edges
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            let path = format!("{prefix}edges[{i}]");
            let head = match (e.head, e.free) {
                (Some(h), false) => EdgeHead::Vertex(h),
                (None, true) => EdgeHead::Free,
                _ => return schema(path, "exactly one of `head` and `free: true` is required"),
            };
            let length = if e.length == "inf" {
                Length::Infinite
            } else {
                let l = rational(&e.length, &format!("{path}.length"))?;
                if l <= Q::from_integer(0) {
                    return schema(format!("{path}.length"), "length must be positive or \"inf\"");
                }
                Length::Finite(l)
            };
            Ok(Edge { tail: e.tail, head, direction: e.direction, length, weight: e.weight })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TropicalCurve::new(raw.r, vertices, edges)?)
}

pub fn encode_curve(c: &TropicalCurve) -> String {
    to_json(&curve_json(c))
}

pub fn decode_curve(text: &str) -> Result<TropicalCurve> {
    curve_from_json(parse_json(text)?, "")
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PafJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base: Option<CurveJson>,
    values: BTreeMap<usize, String>,
    slopes: BTreeMap<usize, i64>,
}

/// Encodes values and slopes; the base curve is included when `with_base`.
pub fn encode_paf(p: &PiecewiseAffineFunction, with_base: bool) -> String {
    to_json(&PafJson {
        base: with_base.then(|| curve_json(p.base())),
        values: p
            .values()
            .iter()
            .enumerate()
            .filter_map(|(v, x)| x.map(|x| (v, format_rational(&x))))
            .collect(),
        slopes: p.slopes().iter().copied().enumerate().collect(),
    })
}

/// Decodes a function on its embedded `base`, or on `curve` if it has none.
pub fn decode_paf(text: &str, curve: &TropicalCurve) -> Result<PiecewiseAffineFunction> {
    let raw: PafJson = parse_json(text)?;
    let base = match raw.base {
        Some(b) => curve_from_json(b, "base.")?,
        None => curve.clone(),
    };
    let nv = base.vertices().len();
    let ne = base.edges().len();
    if let Some(v) = raw.values.keys().find(|&&v| v >= nv) {
        return schema(format!("values.{v}"), "no such vertex");
    }
    if let Some(e) = (0..ne).find(|e| !raw.slopes.contains_key(e)) {
        return schema("slopes", format!("missing slope for edge {e}"));
    }
    if let Some(e) = raw.slopes.keys().find(|&&e| e >= ne) {
        return schema(format!("slopes.{e}"), "no such edge");
    }
    let values = (0..nv)
        .map(|v| raw.values.get(&v).map(|s| rational(s, &format!("values.{v}"))).transpose())
        .collect::<Result<Vec<_>>>()?;
    let slopes = (0..ne).map(|e| raw.slopes[&e]).collect();
    Ok(PiecewiseAffineFunction::new(base, values, slopes)?)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionJson {
    vertices: Vec<usize>,
    edges: Vec<usize>,
    boundary: Vec<usize>,
}

pub fn encode_region(r: &Region) -> String {
    to_json(&RegionJson { vertices: r.vertices().to_vec(), edges: r.edges().to_vec(), boundary: r.boundary().to_vec() })
}

pub fn decode_region(text: &str, ambient: &Ambient) -> Result<Region> {
    let raw: RegionJson = parse_json(text)?;
    Ok(Region::new(ambient.clone(), raw.vertices, raw.edges, raw.boundary)?)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableJson {
    h: [[usize; 2]; 2],
    hc: [[usize; 2]; 2],
}

#[derive(Serialize)]
struct CompactTableJson {
    hc: [[usize; 2]; 2],
}

pub fn encode_table(t: &CohomologyTable) -> String {
    to_json(&TableJson { h: t.h, hc: t.hc })
}

/// Only the compactly supported half `{"hc": ...}`.
pub fn encode_table_compact(t: &CohomologyTable) -> String {
    to_json(&CompactTableJson { hc: t.hc })
}

pub fn decode_table(text: &str) -> Result<CohomologyTable> {
    let raw: TableJson = parse_json(text)?;
    Ok(CohomologyTable { h: raw.h, hc: raw.hc })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SkeletonEdgeJson {
    id: usize,
    ends: [usize; 2],
    length: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SkeletonJson {
    vertices: Vec<usize>,
    edges: Vec<SkeletonEdgeJson>,
}

pub fn encode_skeleton(s: &SkeletonGraph) -> String {
    to_json(&SkeletonJson {
        vertices: (0..s.vertex_count()).collect(),
        edges: s
            .edges()
            .iter()
            .enumerate()
            .map(|(id, e)| SkeletonEdgeJson { id, ends: e.ends, length: format_rational(&e.length) })
            .collect(),
    })
}

pub fn decode_skeleton(text: &str) -> Result<SkeletonGraph> {
    let raw: SkeletonJson = parse_json(text)?;
    for (pos, &id) in raw.vertices.iter().enumerate() {
        if id != pos {
            return schema(format!("vertices[{pos}]"), format!("id {id} must equal its position {pos}"));
        }
    }
    check_ids(raw.edges.iter().map(|e| e.id), "edges")?;
    let edges = raw
        .edges
        .iter()
        .enumerate()
        .map(|(i, e)| Ok(SkeletonEdge { ends: e.ends, length: rational(&e.length, &format!("edges[{i}].length"))? }))
        .collect::<Result<Vec<_>>>()?;
    Ok(SkeletonGraph::new(raw.vertices.len(), edges)?)
}

#[derive(Serialize)]
struct RayJson {
    vertex: usize,
    weight: u64,
}

#[derive(Serialize)]
struct ModificationJson {
    source: CurveJson,
    base: CurveJson,
    target: CurveJson,
    added_rays: Vec<RayJson>,
}

pub fn encode_modification(m: &ModificationMap) -> String {
    to_json(&ModificationJson {
        source: curve_json(&m.source),
        base: curve_json(&m.base),
        target: curve_json(&m.target),
        added_rays: m.added_rays.iter().map(|r| RayJson { vertex: r.vertex, weight: r.weight }).collect(),
    })
}

#[derive(Serialize)]
struct BalancingFailureJson {
    vertex: usize,
    defect: Vec<i64>,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum WitnessJson {
    Vertex { vertex: usize, val: usize, dim: usize },
    Weight { edge: usize, weight: u64 },
}

#[derive(Serialize)]
struct CurveCheckJson {
    balanced: bool,
    balancing_failures: Vec<BalancingFailureJson>,
    smooth: bool,
    smoothness_witnesses: Vec<WitnessJson>,
}

pub fn encode_curve_check(b: &BalancingReport, s: &SmoothnessReport) -> String {
    to_json(&CurveCheckJson {
        balanced: b.is_balanced(),
        balancing_failures: b
            .failures
            .iter()
            .map(|f| BalancingFailureJson { vertex: f.vertex, defect: f.defect.clone() })
            .collect(),
        smooth: s.is_smooth(),
        smoothness_witnesses: s
            .witnesses
            .iter()
            .map(|w| match *w {
                SmoothnessWitness::Vertex { vertex, val, dim } => WitnessJson::Vertex { vertex, val, dim },
                SmoothnessWitness::Weight { edge, weight } => WitnessJson::Weight { edge, weight },
            })
            .collect(),
    })
}

#[derive(Serialize)]
struct MatrixCheckJson {
    ok: bool,
    diagonal: Vec<usize>,
    coincident: Vec<[usize; 2]>,
    violations: Vec<[usize; 3]>,
}

/// Violating indices are reported 1-based.
pub fn encode_matrix_check(r: &ValidationReport) -> String {
    to_json(&MatrixCheckJson {
        ok: r.is_ok(),
        diagonal: r.diagonal.iter().map(|d| d + 1).collect(),
        coincident: r.coincident.iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
        violations: r.violations.iter().map(|v| [v.i + 1, v.j + 1, v.k + 1]).collect(),
    })
}

/// Serializes any plain serde value with the same formatting as the encoders.
pub fn encode_value<T: Serialize>(value: &T) -> String {
    to_json(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tropicalize::tropicalize_direct;
    use crate::valuation::from_padic_points;

    fn two_point_curve() -> TropicalCurve {
        tropicalize_direct(&from_padic_points(5, &[Q::from_integer(0), Q::from_integer(1)]).unwrap()).unwrap()
    }

    #[test]
    fn curve_round_trip_is_byte_stable() {
        let c = two_point_curve();
        let text = encode_curve(&c);
        let back = decode_curve(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(encode_curve(&back), text);
    }

    #[test]
    fn bad_length_reports_path() {
        let text = encode_curve(&two_point_curve()).replacen("\"inf\"", "\"-inf\"", 1);
        match decode_curve(&text) {
            Err(DecodeError::Schema { path, .. }) => assert!(path.starts_with("edges[") && path.ends_with("].length")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_canonical_rational_rejected() {
        let text = r#"{"n": 2, "labels": [], "L": [["-inf", "2/4"], ["2/4", "-inf"]]}"#;
        match decode_matrix(text) {
            Err(DecodeError::Schema { path, .. }) => assert_eq!(path, "L[0][1]"),
            other => panic!("unexpected {other:?}"),
        }
        let ok = r#"{"n": 2, "labels": [], "L": [["-inf", "1/2"], ["1/2", "-inf"]]}"#;
        let m = decode_matrix(ok).unwrap();
        assert_eq!(m.dist(0, 1), Q::new(1, 2));
    }

    #[test]
    fn matrix_round_trip() {
        let m = from_padic_points(5, &[Q::from_integer(0), Q::from_integer(1), Q::from_integer(5)]).unwrap();
        let text = encode_matrix(&m);
        assert!(text.contains("\"-inf\""));
        assert_eq!(decode_matrix(&text).unwrap(), m);
    }

    #[test]
    fn schema_errors_have_paths() {
        match decode_matrix(r#"{"n": 1, "L": [["-inf"]], "extra": 1}"#) {
            Err(DecodeError::Schema { .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match decode_curve(r#"{"r": 1, "vertices": [{"id": 0, "coords": ["-inf"]}], "edges": [{"tail": 0, "free": true, "direction": [1], "length": "inf", "weight": "1"}]}"#) {
            Err(DecodeError::Schema { path, .. }) => assert_eq!(path, "edges[0].weight"),
            other => panic!("unexpected {other:?}"),
        }
        match decode_curve(r#"{"r": 1, "vertices": [{"id": 1, "coords": ["-inf"]}], "edges": []}"#) {
            Err(DecodeError::Schema { path, .. }) => assert_eq!(path, "vertices[0].id"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn skeleton_and_table_round_trip() {
        let s = crate::mumford::random_skeleton(3, 4);
        let text = encode_skeleton(&s);
        assert_eq!(decode_skeleton(&text).unwrap(), s);
        let t = CohomologyTable { h: [[1, 2], [2, 1]], hc: [[1, 2], [2, 1]] };
        assert_eq!(decode_table(&encode_table(&t)).unwrap(), t);
    }

    #[test]
    fn paf_round_trip() {
        let c = two_point_curve();
        let poly = crate::tropicalize::TropicalPolynomial { terms: vec![(vec![1, 0], Q::from_integer(0)), (vec![0, 0], Q::new(-1, 2))] };
        let p = poly.restrict_to(&c).unwrap();
        let text = encode_paf(&p, true);
        assert_eq!(decode_paf(&text, &c).unwrap(), p);
        let bare = encode_paf(&p, false);
        if p.base() == &c {
            assert_eq!(decode_paf(&bare, &c).unwrap(), p);
        }
    }
}
