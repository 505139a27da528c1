//! Tropicalizations of linear embeddings `x -> (x - a_1, ..., x - a_r)` of
//! the affine line, built two ways:
//!
//! * directly, as the tree of discs spanned by the paths
//!   `s -> (max(log|a_i - a_j|, s))_j` of the points `a_i`;
//! * incrementally, adding one point `b` at a time through the tropical
//!   modification along the iterated maximum `P_b`, whose only non-affine point
//!   is `z_s = (log|b - a_i|)_i`.
//!
//! Both routes must agree; the test-suite and the CLI compare them.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::curve::{CurveError, Edge, EdgeHead, EdgeId, ExtendedPoint, Length, Location, TropicalCurve, VertexId};
use crate::valuation::{LogDistanceMatrix, MatrixError};
use crate::value::{primitivize, LogValue, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TropicalizeError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("point {0} does not lie on the curve")]
    NotOnCurve(ExtendedPoint),
    #[error("piecewise affine function: {0}")]
    Function(String),
    #[error("balancing defect at vertex {vertex} is {defect:?}, not vertical")]
    DefectNotVertical { vertex: VertexId, defect: Vec<i64> },
    #[error("balancing defect at vertex {vertex} is {c} < 0 and would need a negative weight")]
    NegativeDefect { vertex: VertexId, c: i64 },
    #[error("function is defined on a subdivision of a different curve")]
    BaseMismatch,
    #[error("coordinate selection must be a nonempty set of valid, distinct coordinates")]
    BadSelection,
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

type Result<T> = std::result::Result<T, TropicalizeError>;

fn invariant<T>(msg: impl Into<String>) -> Result<T> {
    Err(TropicalizeError::Invariant(msg.into()))
}

/// The point of the path of `a_i` at height `s`: coordinate `j` is
/// `max(L[i][j], s)`, coordinate `i` is `s`.
fn path_point(m: &LogDistanceMatrix, i: usize, s: Q) -> ExtendedPoint {
    ExtendedPoint(
        (0..m.n())
            .map(|j| if j == i { LogValue::Finite(s) } else { LogValue::Finite(m.dist(i, j).max(s)) })
            .collect(),
    )
}

/// Tree of discs of the configuration: leaves at infinity for each point,
/// branch points where two discs merge, one free end in direction `(1, ..., 1)`.
pub fn tropicalize_direct(m: &LogDistanceMatrix) -> Result<TropicalCurve> {
    let n = m.n();
    if n == 1 {
        return Ok(TropicalCurve::line());
    }
    let mut index: BTreeMap<ExtendedPoint, VertexId> = BTreeMap::new();
    let mut vertices: Vec<ExtendedPoint> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut seen_edges: BTreeMap<(VertexId, VertexId), ()> = BTreeMap::new();
    let mut intern = |p: ExtendedPoint, vertices: &mut Vec<ExtendedPoint>| -> VertexId {
        *index.entry(p.clone()).or_insert_with(|| {
            vertices.push(p);
            vertices.len() - 1
        })
    };
    for i in 0..n {
        let mut breaks: Vec<Q> = (0..n).filter(|&j| j != i).map(|j| m.dist(i, j)).collect();
        breaks.sort();
        breaks.dedup();
        let ids: Vec<VertexId> = breaks
            .iter()
            .map(|&s| intern(path_point(m, i, s), &mut vertices))
            .collect();
        for t in 0..breaks.len().saturating_sub(1) {
            let (lo, hi) = (breaks[t], breaks[t + 1]);
            if seen_edges.insert((ids[t], ids[t + 1]), ()).is_some() {
                continue;
            }
            let direction = (0..n).map(|j| i64::from(j == i || m.dist(i, j) <= lo)).collect();
            edges.push(Edge::bounded(ids[t], ids[t + 1], direction, hi - lo));
        }
        let leaf = ExtendedPoint(
            (0..n)
                .map(|j| if j == i { LogValue::NegInf } else { LogValue::Finite(m.dist(i, j)) })
                .collect(),
        );
        let leaf_id = intern(leaf, &mut vertices);
        let mut down = vec![0; n];
        down[i] = -1;
        edges.push(Edge::unbounded(ids[0], leaf_id, down));
    }
    let top = m.diameter().expect("at least two points");
    let top_id = intern(path_point(m, 0, top), &mut vertices);
    edges.push(Edge::free(top_id, vec![1; n]));
    Ok(TropicalCurve::new(n, vertices, edges)?.canonicalize())
}

/// The iterated maximum `P_b` on the tropicalization of `a_1, ..., a_r`,
/// determined by the column `log|b - a_i|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IteratedMaximum {
    column: Vec<Q>,
}

impl IteratedMaximum {
    /// Checks that `column` extends `matrix` to a valid configuration.
    pub fn new(matrix: &LogDistanceMatrix, column: Vec<Q>) -> Result<Self> {
        matrix.extended(&column)?;
        Ok(IteratedMaximum { column })
    }

    pub fn column(&self) -> &[Q] {
        &self.column
    }

    /// `z_s = (log|b - a_i|)_i`, the only point where `P_b` is not affine.
    pub fn special_point(&self) -> ExtendedPoint {
        ExtendedPoint::finite(&self.column)
    }

    /// `max(z_i, log|b - a_i|)` for a minimizing coordinate `i`. Every
    /// minimizing `i`, and every `j` where `max(z_j, log|b - a_j|)` is attained
    /// uniquely, must give the same value.
    pub fn value_at(&self, z: &ExtendedPoint) -> Result<Q> {
        let coords = z.coords();
        if coords.len() != self.column.len() {
            return invariant("point dimension does not match the configuration");
        }
        let term = |i: usize| -> Q {
            match coords[i] {
                LogValue::NegInf => self.column[i],
                LogValue::Finite(x) => x.max(self.column[i]),
            }
        };
        let min = *coords.iter().min().expect("r >= 1");
        let mut value: Option<Q> = None;
        for i in (0..coords.len()).filter(|&i| coords[i] == min) {
            let t = term(i);
            if value.is_some_and(|v| v != t) {
                return invariant(format!("iterated maximum depends on the minimizing coordinate at {z}"));
            }
            value = Some(t);
        }
        let value = value.expect("some coordinate is minimal");
        for j in 0..coords.len() {
            if coords[j] != LogValue::Finite(self.column[j]) && term(j) != value {
                return invariant(format!("unique-maximum formula disagrees in coordinate {j} at {z}"));
            }
        }
        Ok(value)
    }
}

/// Evaluates `P_b` at a point of `curve`, rejecting points off the curve.
pub fn eval_p(curve: &TropicalCurve, p: &IteratedMaximum, z: &ExtendedPoint) -> Result<Q> {
    if !curve.contains(z) {
        return Err(TropicalizeError::NotOnCurve(z.clone()));
    }
    p.value_at(z)
}

/// Continuous function on a curve, affine with integer slope on every edge.
/// Slopes are taken along the stored tail-to-head direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseAffineFunction {
    base: TropicalCurve,
    values: Vec<Option<Q>>,
    slopes: Vec<i64>,
}

impl PiecewiseAffineFunction {
    /// `values[v]` must be `Some` exactly at finite vertices.
    pub fn new(base: TropicalCurve, values: Vec<Option<Q>>, slopes: Vec<i64>) -> Result<Self> {
        let bad = |msg: String| Err(TropicalizeError::Function(msg));
        if values.len() != base.vertices().len() {
            return bad(format!("{} values for {} vertices", values.len(), base.vertices().len()));
        }
        if slopes.len() != base.edges().len() {
            return bad(format!("{} slopes for {} edges", slopes.len(), base.edges().len()));
        }
        for (v, value) in values.iter().enumerate() {
            if value.is_some() != base.is_finite_vertex(v) {
                return bad(format!("vertex {v}: values are given exactly at finite vertices"));
            }
        }
        for (e, edge) in base.edges().iter().enumerate() {
            let s = slopes[e];
            let tail_val = values[edge.tail];
            match edge.head {
                EdgeHead::Free if tail_val.is_none() => {
                    return bad(format!("edge {e} has no finite end; subdivide it first"))
                }
                EdgeHead::Free => {}
                EdgeHead::Vertex(h) => match (tail_val, values[h]) {
                    (Some(a), Some(b)) => {
                        let len = edge.length.finite().expect("bounded edge");
                        if b - a != Q::from_integer(s) * len {
                            return bad(format!("edge {e}: value difference is not slope * length"));
                        }
                    }
                    (Some(_), None) if s > 0 => {
                        return bad(format!("edge {e}: function would tend to +inf at a vertex at infinity"))
                    }
                    (None, Some(_)) if s < 0 => {
                        return bad(format!("edge {e}: function would tend to +inf at a vertex at infinity"))
                    }
                    _ => {}
                },
            }
        }
        Ok(PiecewiseAffineFunction { base, values, slopes })
    }

    pub fn base(&self) -> &TropicalCurve {
        &self.base
    }

    pub fn values(&self) -> &[Option<Q>] {
        &self.values
    }

    pub fn slopes(&self) -> &[i64] {
        &self.slopes
    }

    pub fn value(&self, v: VertexId) -> Option<Q> {
        self.values[v]
    }

    pub fn slope(&self, e: EdgeId) -> i64 {
        self.slopes[e]
    }

    /// Limit value at a vertex at infinity: the neighbour's value if the
    /// function is constant along the edge, `-inf` otherwise.
    fn extended_value(&self, v: VertexId) -> LogValue {
        if let Some(x) = self.values[v] {
            return LogValue::Finite(x);
        }
        let e = self.base.incident_edges(v)[0];
        let edge = self.base.edge(e);
        let other = if edge.tail == v { edge.head.vertex().expect("bounded") } else { edge.tail };
        match self.values[other] {
            Some(x) if self.slopes[e] == 0 => LogValue::Finite(x),
            _ => LogValue::NegInf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AddedRay {
    pub vertex: VertexId,
    pub weight: u64,
}

/// A tropical modification `delta: source -> target` given by dropping the
/// last coordinate. Vertex and edge ids of `source` extend those of `base`
/// (the subdivision of `target` on which the function is affine); the rays
/// added to restore balancing come last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModificationMap {
    pub source: TropicalCurve,
    pub base: TropicalCurve,
    pub target: TropicalCurve,
    pub added_rays: Vec<AddedRay>,
}

impl ModificationMap {
    /// Id in `source` of the lifted vertex `v` of `base`.
    pub fn lift_vertex(&self, v: VertexId) -> VertexId {
        v
    }

    /// Source edge of each added ray, with the vertex at infinity it ends at.
    pub fn ray_edges(&self) -> Vec<(EdgeId, VertexId, VertexId)> {
        let m = self.base.edges().len();
        self.added_rays
            .iter()
            .enumerate()
            .map(|(k, ray)| {
                let e = m + k;
                let head = self.source.edge(e).head.vertex().expect("rays end at infinity");
                (e, ray.vertex, head)
            })
            .collect()
    }
}

/// Graph of `p` completed by downward rays wherever it fails to be balanced.
pub fn modify(target: &TropicalCurve, p: &PiecewiseAffineFunction) -> Result<ModificationMap> {
    let base = p.base();
    if base.canonicalize() != target.canonicalize() {
        return Err(TropicalizeError::BaseMismatch);
    }
    let r = base.r();
    let mut vertices: Vec<ExtendedPoint> = (0..base.vertices().len())
        .map(|v| {
            let mut c = base.vertex(v).coords().to_vec();
            c.push(p.extended_value(v));
            ExtendedPoint(c)
        })
        .collect();
    let mut edges: Vec<Edge> = base
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let mut dir = edge.direction.clone();
            dir.push(p.slope(e));
            let (g, dir) = primitivize(&dir).expect("nonzero direction");
            let length = match edge.length {
                Length::Finite(l) => Length::Finite(l * Q::from_integer(g)),
                Length::Infinite => Length::Infinite,
            };
            Edge { tail: edge.tail, head: edge.head, direction: dir, length, weight: edge.weight }
        })
        .collect();
    let lifted = TropicalCurve::from_parts_unchecked(r + 1, vertices.clone(), edges.clone());
    let mut added_rays = Vec::new();
    for v in 0..base.vertices().len() {
        if !base.is_finite_vertex(v) {
            continue;
        }
        let defect = lifted.balancing_defect(v);
        if defect[..r].iter().any(|&x| x != 0) {
            return Err(TropicalizeError::DefectNotVertical { vertex: v, defect });
        }
        let c = defect[r];
        if c < 0 {
            return Err(TropicalizeError::NegativeDefect { vertex: v, c });
        }
        if c > 0 {
            let mut bottom = vertices[v].coords().to_vec();
            bottom[r] = LogValue::NegInf;
            vertices.push(ExtendedPoint(bottom));
            let mut down = vec![0; r + 1];
            down[r] = -1;
            edges.push(Edge::unbounded(v, vertices.len() - 1, down).with_weight(c as u64));
            added_rays.push(AddedRay { vertex: v, weight: c as u64 });
        }
    }
    let source = TropicalCurve::new(r + 1, vertices, edges)?;
    if !source.check_balancing().is_balanced() {
        return invariant("modified curve is not balanced");
    }
    let target = target.canonicalize();
    let keep: Vec<usize> = (0..r).collect();
    if project_transition(&source, &keep)? != target {
        return invariant("projection of the modification does not recover the target");
    }
    Ok(ModificationMap { source, base: base.clone(), target, added_rays })
}

/// Coordinate projection onto `keep` (in that order): contracted edges are
/// collapsed, directions re-primitivized, and the result canonicalized.
pub fn project_transition(curve: &TropicalCurve, keep: &[usize]) -> Result<TropicalCurve> {
    let r = curve.r();
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if keep.is_empty() || sorted.len() != keep.len() || sorted.iter().any(|&i| i >= r) {
        return Err(TropicalizeError::BadSelection);
    }
    let proj = |p: &ExtendedPoint| ExtendedPoint(keep.iter().map(|&i| p.coords()[i]).collect());
    let projected: Vec<ExtendedPoint> = curve.vertices().iter().map(proj).collect();

    // vertices with equal images are identified; contracted edges join equal images
    let mut class: BTreeMap<ExtendedPoint, VertexId> = BTreeMap::new();
    let mut vertices = Vec::new();
    let mut new_id = vec![0; projected.len()];
    for (v, p) in projected.iter().enumerate() {
        new_id[v] = *class.entry(p.clone()).or_insert_with(|| {
            vertices.push(p.clone());
            vertices.len() - 1
        });
    }
    let mut merged: BTreeMap<(VertexId, EdgeHead, Vec<i64>), (Length, u64)> = BTreeMap::new();
    for edge in curve.edges() {
        let dir: Vec<i64> = keep.iter().map(|&i| edge.direction[i]).collect();
        let Some((g, dir)) = primitivize(&dir) else {
            continue;
        };
        let length = match edge.length {
            Length::Finite(l) => Length::Finite(l * Q::from_integer(g)),
            Length::Infinite => Length::Infinite,
        };
        let head = match edge.head {
            EdgeHead::Vertex(h) => EdgeHead::Vertex(new_id[h]),
            EdgeHead::Free => EdgeHead::Free,
        };
        let weight = edge.weight * g as u64;
        merged
            .entry((new_id[edge.tail], head, dir))
            .and_modify(|(_, w)| *w += weight)
            .or_insert((length, weight));
    }
    let edges = merged
        .into_iter()
        .map(|((tail, head, direction), (length, weight))| Edge { tail, head, direction, length, weight })
        .collect();
    Ok(TropicalCurve::new(keep.len(), vertices, edges)?.canonicalize())
}

/// Function values along an edge of `curve` for the slope derivation of the
/// incremental construction.
fn derive_slope(curve: &TropicalCurve, e: EdgeId, f: &impl Fn(&ExtendedPoint) -> Result<Q>) -> Result<i64> {
    let edge = curve.edge(e);
    let integral = |q: Q, what: &str| -> Result<i64> {
        if q.is_integer() {
            Ok(q.to_integer())
        } else {
            invariant(format!("non-integral slope {q} on edge {e} ({what})"))
        }
    };
    if let (Some(a), Some(b)) = (curve.vertex(edge.tail).as_finite(), edge.head.vertex().and_then(|h| curve.vertex(h).as_finite())) {
        let len = edge.length.finite().expect("bounded edge");
        let (va, vb) = (f(&ExtendedPoint::finite(&a))?, f(&ExtendedPoint::finite(&b))?);
        let mid = curve.vertex(edge.tail).offset(len / Q::from_integer(2), &edge.direction);
        if f(&mid)? * Q::from_integer(2) != va + vb {
            return invariant(format!("function is not affine on edge {e}"));
        }
        return integral((vb - va) / len, "bounded");
    }
    let Some((v, out)) = curve.finite_end(e) else {
        return invariant(format!("edge {e} has no finite endpoint"));
    };
    let start = curve.vertex(v);
    let p0 = f(start)?;
    let p1 = f(&start.offset(Q::from_integer(1), &out))?;
    let p2 = f(&start.offset(Q::from_integer(2), &out))?;
    if p2 - p1 != p1 - p0 {
        return invariant(format!("function is not affine on unbounded edge {e}"));
    }
    let s = integral(p1 - p0, "unbounded")?;
    Ok(if v == edge.tail { s } else { -s })
}

/// One incremental step: the modification adding the point with log-distances
/// `column` to the tropicalization `current` of `matrix`.
pub fn modification_step(
    current: &TropicalCurve,
    matrix: &LogDistanceMatrix,
    column: Vec<Q>,
) -> Result<ModificationMap> {
    let pb = IteratedMaximum::new(matrix, column)?;
    let zs = pb.special_point();
    let (base, zs_vertex) = match current.locate(&zs) {
        Some(Location::Vertex(v)) => (current.clone(), v),
        Some(Location::EdgeInterior(e)) => current.split_at_point(e, &zs)?,
        None => return invariant(format!("special point {zs} is not on the curve")),
    };
    let f = |z: &ExtendedPoint| eval_p(&base, &pb, z);
    let values = (0..base.vertices().len())
        .map(|v| if base.is_finite_vertex(v) { f(base.vertex(v)).map(Some) } else { Ok(None) })
        .collect::<Result<Vec<_>>>()?;
    let slopes = (0..base.edges().len())
        .map(|e| derive_slope(&base, e, &f))
        .collect::<Result<Vec<_>>>()?;
    let paf = PiecewiseAffineFunction::new(base, values, slopes)?;
    let map = modify(current, &paf)?;
    match map.added_rays.as_slice() {
        [AddedRay { vertex, weight: 1 }] if *vertex == zs_vertex => Ok(map),
        rays => invariant(format!("expected one weight-1 ray at the special point, got {rays:?}")),
    }
}

/// All modification steps of the incremental construction, one per point
/// after the first.
pub fn incremental_steps(m: &LogDistanceMatrix) -> Result<Vec<ModificationMap>> {
    let mut current = TropicalCurve::line();
    let mut steps = Vec::with_capacity(m.n().saturating_sub(1));
    for k in 1..m.n() {
        let prefix: Vec<usize> = (0..k).collect();
        let sub = m.restrict(&prefix)?;
        let column = (0..k).map(|i| m.dist(k, i)).collect();
        let step = modification_step(&current, &sub, column)?;
        current = step.source.canonicalize();
        steps.push(step);
    }
    Ok(steps)
}

/// Tropicalization built by iterated modifications.
pub fn tropicalize_incremental(m: &LogDistanceMatrix) -> Result<TropicalCurve> {
    Ok(incremental_steps(m)?
        .pop()
        .map_or_else(TropicalCurve::line, |step| step.source.canonicalize()))
}

/// A tropical polynomial `max_k (<m_k, z> + c_k)` with non-negative integer
/// exponent vectors; its restriction to a curve is a valid modification input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalPolynomial {
    pub terms: Vec<(Vec<i64>, Q)>,
}

impl TropicalPolynomial {
    pub fn eval(&self, z: &ExtendedPoint) -> LogValue {
        self.terms
            .iter()
            .map(|(m, c)| {
                z.coords().iter().zip(m).fold(LogValue::Finite(*c), |acc, (x, &k)| match (acc, x) {
                    (_, _) if k == 0 => acc,
                    (LogValue::Finite(a), LogValue::Finite(x)) => LogValue::Finite(a + x * Q::from_integer(k)),
                    _ => LogValue::NegInf,
                })
            })
            .max()
            .unwrap_or(LogValue::NegInf)
    }

    /// Breakpoints of the upper envelope along edge `e`, as points of the curve.
    fn breakpoints(&self, curve: &TropicalCurve, e: EdgeId) -> Vec<ExtendedPoint> {
        let Some((v, out)) = curve.finite_end(e) else {
            return Vec::new();
        };
        let start = curve.vertex(v);
        let limit = curve.edge(e).length.finite();
        let lines: Vec<(Q, i64)> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let at = start.coords().iter().zip(m).fold(*c, |a, (x, &k)| {
                    a + x.finite().expect("finite end") * Q::from_integer(k)
                });
                let slope: i64 = out.iter().zip(m).map(|(d, k)| d * k).sum();
                (at, slope)
            })
            .collect();
        // active line at t = 0: highest value, then steepest
        let mut active = (0..lines.len()).max_by_key(|&k| (lines[k].0, lines[k].1)).expect("nonempty");
        let mut t = Q::from_integer(0);
        let mut points = Vec::new();
        loop {
            let (a0, s0) = lines[active];
            let next = (0..lines.len())
                .filter(|&k| lines[k].1 > s0)
                .map(|k| ((a0 - lines[k].0) / Q::from_integer(lines[k].1 - s0), lines[k].1, k))
                .filter(|&(tk, _, _)| tk > t)
                .min_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)));
            let Some((tk, _, k)) = next else {
                break;
            };
            if limit.is_some_and(|l| tk >= l) {
                break;
            }
            // steepest among lines meeting at tk
            active = (0..lines.len())
                .filter(|&j| lines[j].0 + tk * Q::from_integer(lines[j].1) == lines[k].0 + tk * Q::from_integer(lines[k].1))
                .max_by_key(|&j| lines[j].1)
                .expect("k itself");
            t = tk;
            points.push(start.offset(tk, &out));
        }
        points
    }

    /// Restriction to `curve`, subdividing it at every breakpoint.
    pub fn restrict_to(&self, curve: &TropicalCurve) -> Result<PiecewiseAffineFunction> {
        if self.terms.is_empty() || self.terms.iter().any(|(m, _)| m.len() != curve.r() || m.iter().any(|&k| k < 0)) {
            return Err(TropicalizeError::Function("exponents must be non-negative vectors of the ambient dimension".into()));
        }
        if (0..curve.edges().len()).any(|e| curve.finite_end(e).is_none()) {
            return Err(TropicalizeError::Function("curve has an edge without finite endpoint".into()));
        }
        let points: Vec<ExtendedPoint> = (0..curve.edges().len())
            .flat_map(|e| self.breakpoints(curve, e))
            .collect();
        let mut base = curve.clone();
        for p in &points {
            if let Some(Location::EdgeInterior(e)) = base.locate(p) {
                base = base.split_at_point(e, p)?.0;
            }
        }
        let f = |z: &ExtendedPoint| -> Result<Q> {
            self.eval(z).finite().ok_or_else(|| TropicalizeError::Function("value -inf at a finite point".into()))
        };
        let values = (0..base.vertices().len())
            .map(|v| if base.is_finite_vertex(v) { f(base.vertex(v)).map(Some) } else { Ok(None) })
            .collect::<Result<Vec<_>>>()?;
        let slopes = (0..base.edges().len())
            .map(|e| derive_slope(&base, e, &f))
            .collect::<Result<Vec<_>>>()?;
        PiecewiseAffineFunction::new(base, values, slopes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::valuation::from_padic_points;

    fn q(n: i64) -> Q {
        Q::from_integer(n)
    }

    fn pts(xs: &[i64]) -> Vec<Q> {
        xs.iter().map(|&x| q(x)).collect()
    }

    fn inf_point(coords: &[Option<i64>]) -> ExtendedPoint {
        ExtendedPoint(coords.iter().map(|c| c.map_or(LogValue::NegInf, LogValue::int)).collect())
    }

    #[test]
    fn direct_one_point_is_the_line() {
        let m = from_padic_points(5, &pts(&[3])).unwrap();
        assert_eq!(tropicalize_direct(&m).unwrap(), TropicalCurve::line());
    }

    #[test]
    fn direct_two_points() {
        let m = from_padic_points(5, &pts(&[0, 1])).unwrap();
        let c = tropicalize_direct(&m).unwrap();
        let expected = TropicalCurve::new(
            2,
            vec![ExtendedPoint::ints(&[0, 0]), inf_point(&[None, Some(0)]), inf_point(&[Some(0), None])],
            vec![Edge::free(0, vec![1, 1]), Edge::unbounded(0, 1, vec![-1, 0]), Edge::unbounded(0, 2, vec![0, -1])],
        )
        .unwrap()
        .canonicalize();
        assert_eq!(c, expected);
    }

    #[test]
    fn direct_three_points_p5() {
        let m = from_padic_points(5, &pts(&[0, 1, 5])).unwrap();
        let c = tropicalize_direct(&m).unwrap();
        let finite: Vec<&ExtendedPoint> = c.vertices().iter().filter(|p| !p.is_at_infinity()).collect();
        assert_eq!(finite, vec![&ExtendedPoint::ints(&[-1, 0, -1]), &ExtendedPoint::ints(&[0, 0, 0])]);
        assert_eq!(c.vertices().len(), 5);
        assert_eq!(c.edges().len(), 5);
        assert!(c.check_balancing().is_balanced());
        assert!(c.check_smooth().is_smooth());
    }

    #[test]
    fn iterated_maximum_examples() {
        let line = TropicalCurve::line();
        let one = from_padic_points(5, &pts(&[0])).unwrap();
        let p = IteratedMaximum::new(&one, vec![q(0)]).unwrap();
        assert_eq!(eval_p(&line, &p, &ExtendedPoint::ints(&[-5])).unwrap(), q(0));
        assert_eq!(eval_p(&line, &p, &ExtendedPoint::ints(&[3])).unwrap(), q(3));

        let m = from_padic_points(5, &pts(&[0, 1])).unwrap();
        let x = tropicalize_direct(&m).unwrap();
        let p = IteratedMaximum::new(&m, vec![q(-1), q(0)]).unwrap();
        assert_eq!(eval_p(&x, &p, &ExtendedPoint::ints(&[0, 0])).unwrap(), q(0));
        assert_eq!(eval_p(&x, &p, &p.special_point()).unwrap(), q(-1));
        assert!(matches!(eval_p(&x, &p, &ExtendedPoint::ints(&[1, 0])), Err(TropicalizeError::NotOnCurve(_))));
        // b_column (0, -1) forces |a_1 - a_2| <= max(1, 1/5)... fine; (-1, -1) is not ultrametric
        assert!(IteratedMaximum::new(&m, vec![q(-1), q(-1)]).is_err());
    }

    #[test]
    fn modify_line_by_max() {
        let line = TropicalCurve::line();
        let poly = TropicalPolynomial { terms: vec![(vec![1], q(0)), (vec![0], q(0))] };
        let paf = poly.restrict_to(&TropicalCurve::line().split_at_point(0, &ExtendedPoint::ints(&[0])).unwrap().0)
            .unwrap();
        let map = modify(&line, &paf).unwrap();
        assert_eq!(map.added_rays, vec![AddedRay { vertex: 1, weight: 1 }]);
        let m = from_padic_points(5, &pts(&[0, 1])).unwrap();
        assert_eq!(map.source.canonicalize(), tropicalize_direct(&m).unwrap());
    }

    #[test]
    fn affine_function_adds_no_rays() {
        let m = from_padic_points(5, &pts(&[0, 1, 5])).unwrap();
        let x = tropicalize_direct(&m).unwrap();
        // duplicating coordinate 2: z -> (z, z_2)
        let poly = TropicalPolynomial { terms: vec![(vec![0, 1, 0], q(0))] };
        let paf = poly.restrict_to(&x).unwrap();
        let map = modify(&x, &paf).unwrap();
        assert!(map.added_rays.is_empty());
        assert_eq!(project_transition(&map.source, &[0, 1, 2]).unwrap(), x);
        assert_eq!(map.source.vertices().len(), x.vertices().len());
        // constant function: same curve shifted to height 7
        let constant = TropicalPolynomial { terms: vec![(vec![0, 0, 0], q(7))] };
        let map = modify(&x, &constant.restrict_to(&x).unwrap()).unwrap();
        assert!(map.added_rays.is_empty());
    }

    #[test]
    fn incremental_step_adds_ray_at_special_point() {
        let m = from_padic_points(5, &pts(&[0, 1, 5])).unwrap();
        let steps = incremental_steps(&m).unwrap();
        assert_eq!(steps.len(), 2);
        let last = &steps[1];
        let (_, v, _) = last.ray_edges()[0];
        assert_eq!(last.source.vertex(v), &ExtendedPoint::ints(&[-1, 0, -1]));
        assert_eq!(tropicalize_incremental(&m).unwrap(), tropicalize_direct(&m).unwrap());
    }

    #[test]
    fn negative_defect_rejected() {
        let split = TropicalCurve::line().split_at_point(0, &ExtendedPoint::ints(&[0])).unwrap().0;
        let v0 = split.vertex_by_coords(&ExtendedPoint::ints(&[0])).unwrap();
        let values: Vec<Option<Q>> = (0..2).map(|v| (v == v0).then_some(q(0))).collect();
        // growing without bound towards the vertex at infinity
        let slopes = split
            .edges()
            .iter()
            .map(|e| if e.is_free() { 0 } else if e.tail == v0 { 1 } else { -1 })
            .collect();
        assert!(PiecewiseAffineFunction::new(split, values, slopes).is_err());
        let split = TropicalCurve::line().split_at_point(0, &ExtendedPoint::ints(&[0])).unwrap().0;
        let values = (0..2).map(|v| (v == v0).then_some(q(0))).collect();
        let slopes = split.edges().iter().map(|e| if e.is_free() { -1 } else { 0 }).collect();
        let paf = PiecewiseAffineFunction::new(split, values, slopes).unwrap();
        assert!(matches!(
            modify(&TropicalCurve::line(), &paf),
            Err(TropicalizeError::NegativeDefect { c: -1, .. })
        ));
    }

    #[test]
    fn projections() {
        let m3 = from_padic_points(5, &pts(&[0, 1, 5])).unwrap();
        let x = tropicalize_direct(&m3).unwrap();
        let m2 = from_padic_points(5, &pts(&[0, 1])).unwrap();
        assert_eq!(project_transition(&x, &[0, 1]).unwrap(), tropicalize_direct(&m2).unwrap());
        assert_eq!(project_transition(&x, &[0, 1, 2]).unwrap(), x);
        assert_eq!(project_transition(&x, &[0]).unwrap(), TropicalCurve::line());
        assert_eq!(project_transition(&x, &[]), Err(TropicalizeError::BadSelection));
        assert_eq!(project_transition(&x, &[0, 0]), Err(TropicalizeError::BadSelection));
    }

    #[test]
    fn random_configurations_agree() {
        use crate::valuation::{random_ultrametric, UltrametricParams};
        for seed in 0..60 {
            for n in 1..7 {
                let m = random_ultrametric(n, seed, UltrametricParams::default()).unwrap();
                let direct = tropicalize_direct(&m).unwrap();
                assert!(direct.is_smooth(), "seed {seed} n {n}");
                assert_eq!(tropicalize_incremental(&m).unwrap(), direct, "seed {seed} n {n}");
            }
        }
    }
}
