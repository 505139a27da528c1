//! Embedded weighted one-dimensional polyhedral curves in `T^r = [-inf, inf)^r`.
//!
//! Vertices at infinity (points with a `-inf` coordinate) are ordinary
//! vertices of valence one. Rays leaving `T^r` through a coordinate tending to
//! `+inf` have no head vertex and are stored as free ends.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::linalg::int_rank;
use crate::value::{is_primitive, q_is_positive, LogValue, Q};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("ambient dimension must be at least 1")]
    ZeroDimension,
    #[error("curve has no vertices")]
    NoVertices,
    #[error("vertex {vertex} has {got} coordinates, expected {r}")]
    CoordinateCount { vertex: VertexId, got: usize, r: usize },
    #[error("vertices {0} and {1} have the same coordinates")]
    DuplicateVertex(VertexId, VertexId),
    #[error("edge {edge} references missing vertex {vertex}")]
    MissingVertex { edge: EdgeId, vertex: VertexId },
    #[error("edge {0} is a loop")]
    Loop(EdgeId),
    #[error("edge {edge}: direction has {got} entries, expected {r}")]
    DirectionLength { edge: EdgeId, got: usize, r: usize },
    #[error("edge {0}: direction is not a primitive integer vector")]
    NotPrimitive(EdgeId),
    #[error("edge {0}: weight must be a positive integer")]
    Weight(EdgeId),
    #[error("edge {edge}: {reason}")]
    Geometry { edge: EdgeId, reason: &'static str },
    #[error("vertex at infinity {0} must have valence 1")]
    InfinityValence(VertexId),
    #[error("curve is not connected")]
    Disconnected,
    #[error("edge {0} does not exist")]
    NoSuchEdge(EdgeId),
    #[error("subdivision parameter must lie strictly inside the edge")]
    ParameterOutOfRange,
    #[error("edge {0} has no finite endpoint to measure from")]
    NoFiniteEnd(EdgeId),
    #[error("point does not lie in the interior of edge {0}")]
    NotOnEdge(EdgeId),
    #[error("free-ended edge {0} cannot be reversed")]
    FreeEdgeReversal(EdgeId),
}

/// A point of `T^r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtendedPoint(pub Vec<LogValue>);

impl ExtendedPoint {
    pub fn finite(coords: &[Q]) -> Self {
        ExtendedPoint(coords.iter().copied().map(LogValue::Finite).collect())
    }

    pub fn ints(coords: &[i64]) -> Self {
        ExtendedPoint(coords.iter().map(|&c| LogValue::int(c)).collect())
    }

    pub fn coords(&self) -> &[LogValue] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_at_infinity(&self) -> bool {
        self.0.iter().any(|c| !c.is_finite())
    }

    /// Coordinates as rationals if the point is finite.
    pub fn as_finite(&self) -> Option<Vec<Q>> {
        self.0.iter().map(|c| c.finite()).collect()
    }

    /// `self + t * direction`, with `-inf` absorbing.
    pub fn offset(&self, t: Q, direction: &[i64]) -> Self {
        ExtendedPoint(
            self.0
                .iter()
                .zip(direction)
                .map(|(c, &d)| c.shifted(t * Q::from_integer(d)))
                .collect(),
        )
    }
}

impl fmt::Display for ExtendedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeHead {
    Vertex(VertexId),
    Free,
}

impl EdgeHead {
    pub fn vertex(&self) -> Option<VertexId> {
        match self {
            EdgeHead::Vertex(v) => Some(*v),
            EdgeHead::Free => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Length {
    Finite(Q),
    Infinite,
}

impl Length {
    pub fn finite(&self) -> Option<Q> {
        match self {
            Length::Finite(q) => Some(*q),
            Length::Infinite => None,
        }
    }

    fn plus(self, other: Length) -> Length {
        match (self, other) {
            (Length::Finite(a), Length::Finite(b)) => Length::Finite(a + b),
            _ => Length::Infinite,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    pub tail: VertexId,
    pub head: EdgeHead,
    /// Primitive direction pointing from tail to head.
    pub direction: Vec<i64>,
    pub length: Length,
    pub weight: u64,
}

impl Edge {
    pub fn bounded(tail: VertexId, head: VertexId, direction: Vec<i64>, length: Q) -> Self {
        Edge { tail, head: EdgeHead::Vertex(head), direction, length: Length::Finite(length), weight: 1 }
    }

    /// Edge of infinite length between a finite vertex and a vertex at infinity
    /// (either orientation).
    pub fn unbounded(tail: VertexId, head: VertexId, direction: Vec<i64>) -> Self {
        Edge { tail, head: EdgeHead::Vertex(head), direction, length: Length::Infinite, weight: 1 }
    }

    pub fn free(tail: VertexId, direction: Vec<i64>) -> Self {
        Edge { tail, head: EdgeHead::Free, direction, length: Length::Infinite, weight: 1 }
    }

    pub fn with_weight(mut self, weight: u64) -> Self {
        self.weight = weight;
        self
    }

    pub fn is_free(&self) -> bool {
        self.head == EdgeHead::Free
    }

    pub fn touches(&self, v: VertexId) -> bool {
        self.tail == v || self.head == EdgeHead::Vertex(v)
    }
}

/// Where a point sits on a curve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    Vertex(VertexId),
    EdgeInterior(EdgeId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalancingFailure {
    pub vertex: VertexId,
    pub defect: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BalancingReport {
    pub failures: Vec<BalancingFailure>,
}

impl BalancingReport {
    pub fn is_balanced(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SmoothnessWitness {
    Vertex { vertex: VertexId, val: usize, dim: usize },
    Weight { edge: EdgeId, weight: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SmoothnessReport {
    pub witnesses: Vec<SmoothnessWitness>,
}

impl SmoothnessReport {
    pub fn is_smooth(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// A connected weighted polyhedral curve in `T^r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TropicalCurve {
    r: usize,
    vertices: Vec<ExtendedPoint>,
    edges: Vec<Edge>,
}

impl TropicalCurve {
    pub fn new(r: usize, vertices: Vec<ExtendedPoint>, edges: Vec<Edge>) -> Result<Self, CurveError> {
        let curve = TropicalCurve { r, vertices, edges };
        curve.validate()?;
        Ok(curve)
    }

    /// The curve `T` itself: one vertex at `-inf` and a ray towards `+inf`.
    pub fn line() -> Self {
        TropicalCurve {
            r: 1,
            vertices: vec![ExtendedPoint(vec![LogValue::NegInf])],
            edges: vec![Edge::free(0, vec![1])],
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn vertices(&self) -> &[ExtendedPoint] {
        &self.vertices
    }

    pub fn vertex(&self, v: VertexId) -> &ExtendedPoint {
        &self.vertices[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e]
    }

    pub fn is_finite_vertex(&self, v: VertexId) -> bool {
        !self.vertices[v].is_at_infinity()
    }

    pub fn vertex_by_coords(&self, p: &ExtendedPoint) -> Option<VertexId> {
        self.vertices.iter().position(|x| x == p)
    }

    fn validate(&self) -> Result<(), CurveError> {
        if self.r == 0 {
            return Err(CurveError::ZeroDimension);
        }
        if self.vertices.is_empty() {
            return Err(CurveError::NoVertices);
        }
        let mut seen = BTreeMap::new();
        for (v, p) in self.vertices.iter().enumerate() {
            if p.dim() != self.r {
                return Err(CurveError::CoordinateCount { vertex: v, got: p.dim(), r: self.r });
            }
            if let Some(&w) = seen.get(p) {
                return Err(CurveError::DuplicateVertex(w, v));
            }
            seen.insert(p.clone(), v);
        }
        for (e, edge) in self.edges.iter().enumerate() {
            self.validate_edge(e, edge)?;
        }
        for v in 0..self.vertices.len() {
            if !self.is_finite_vertex(v) && self.valence(v) != 1 && self.vertices.len() > 1 {
                return Err(CurveError::InfinityValence(v));
            }
        }
        if !self.is_connected() {
            return Err(CurveError::Disconnected);
        }
        Ok(())
    }

    fn validate_edge(&self, e: EdgeId, edge: &Edge) -> Result<(), CurveError> {
        let n = self.vertices.len();
        let geometry = |reason| CurveError::Geometry { edge: e, reason };
        if edge.tail >= n {
            return Err(CurveError::MissingVertex { edge: e, vertex: edge.tail });
        }
        if let EdgeHead::Vertex(h) = edge.head {
            if h >= n {
                return Err(CurveError::MissingVertex { edge: e, vertex: h });
            }
            if h == edge.tail {
                return Err(CurveError::Loop(e));
            }
        }
        if edge.direction.len() != self.r {
            return Err(CurveError::DirectionLength { edge: e, got: edge.direction.len(), r: self.r });
        }
        if !is_primitive(&edge.direction) {
            return Err(CurveError::NotPrimitive(e));
        }
        if edge.weight == 0 {
            return Err(CurveError::Weight(e));
        }
        let tail = &self.vertices[edge.tail];
        let dir = &edge.direction;
        match edge.head {
            EdgeHead::Free => {
                if edge.length != Length::Infinite {
                    return Err(geometry("free ends have infinite length"));
                }
                if !dir.iter().any(|&d| d > 0) {
                    return Err(geometry("a free end must leave T^r through a positive direction"));
                }
                if tail.is_at_infinity() {
                    check_infinite_end(tail, dir, 1).map_err(geometry)?;
                }
            }
            EdgeHead::Vertex(h) => {
                let head = &self.vertices[h];
                match (tail.is_at_infinity(), head.is_at_infinity()) {
                    (false, false) => {
                        let Length::Finite(len) = edge.length else {
                            return Err(geometry("edge between finite vertices needs finite length"));
                        };
                        if !q_is_positive(&len) {
                            return Err(geometry("length must be positive"));
                        }
                        if tail.offset(len, dir) != *head {
                            return Err(geometry("head != tail + length * direction"));
                        }
                    }
                    (false, true) => {
                        if edge.length != Length::Infinite {
                            return Err(geometry("edge to a vertex at infinity has infinite length"));
                        }
                        check_towards_infinity(tail, head, dir, 1).map_err(geometry)?;
                    }
                    (true, false) => {
                        if edge.length != Length::Infinite {
                            return Err(geometry("edge to a vertex at infinity has infinite length"));
                        }
                        check_towards_infinity(head, tail, dir, -1).map_err(geometry)?;
                    }
                    (true, true) => return Err(geometry("both endpoints at infinity")),
                }
            }
        }
        Ok(())
    }

    fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in &self.edges {
            if let EdgeHead::Vertex(h) = e.head {
                let (a, b) = (find(&mut parent, e.tail), find(&mut parent, h));
                parent[a] = b;
            }
        }
        let root = find(&mut parent, 0);
        (0..n).all(|v| find(&mut parent, v) == root)
    }

    /// Edges incident to `v` together with the outgoing primitive direction at `v`.
    pub fn outgoing(&self, v: VertexId) -> Vec<(EdgeId, Vec<i64>)> {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(e, edge)| {
                if edge.tail == v {
                    Some((e, edge.direction.clone()))
                } else if edge.head == EdgeHead::Vertex(v) {
                    Some((e, edge.direction.iter().map(|d| -d).collect()))
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn incident_edges(&self, v: VertexId) -> Vec<EdgeId> {
        self.outgoing(v).into_iter().map(|(e, _)| e).collect()
    }

    /// `val(v)`: number of incident edges.
    pub fn valence(&self, v: VertexId) -> usize {
        self.edges.iter().filter(|e| e.touches(v)).count()
    }

    /// `dim(v)`: rank of the incident directions, 0 at infinity.
    pub fn local_dim(&self, v: VertexId) -> usize {
        if !self.is_finite_vertex(v) {
            return 0;
        }
        let dirs: Vec<Vec<i64>> = self.outgoing(v).into_iter().map(|(_, d)| d).collect();
        int_rank(&dirs)
    }

    /// Weighted sum of outgoing directions at each finite vertex.
    pub fn check_balancing(&self) -> BalancingReport {
        let failures = (0..self.vertices.len())
            .filter(|&v| self.is_finite_vertex(v))
            .filter_map(|v| {
                let defect = self.balancing_defect(v);
                defect.iter().any(|&c| c != 0).then_some(BalancingFailure { vertex: v, defect })
            })
            .collect();
        BalancingReport { failures }
    }

    pub fn balancing_defect(&self, v: VertexId) -> Vec<i64> {
        let mut sum = vec![0i64; self.r];
        for (e, dir) in self.outgoing(v) {
            let w = self.edges[e].weight as i64;
            for (s, d) in sum.iter_mut().zip(&dir) {
                *s += w * d;
            }
        }
        sum
    }

    pub fn check_smooth(&self) -> SmoothnessReport {
        let mut witnesses = Vec::new();
        for (e, edge) in self.edges.iter().enumerate() {
            if edge.weight != 1 {
                witnesses.push(SmoothnessWitness::Weight { edge: e, weight: edge.weight });
            }
        }
        for v in 0..self.vertices.len() {
            let val = self.valence(v);
            let dim = self.local_dim(v);
            if val != dim + 1 {
                witnesses.push(SmoothnessWitness::Vertex { vertex: v, val, dim });
            }
        }
        SmoothnessReport { witnesses }
    }

    pub fn is_smooth(&self) -> bool {
        self.check_smooth().is_smooth()
    }

    /// Finite endpoint of `e` and the direction pointing from it into the edge.
    pub fn finite_end(&self, e: EdgeId) -> Option<(VertexId, Vec<i64>)> {
        let edge = &self.edges[e];
        if self.is_finite_vertex(edge.tail) {
            return Some((edge.tail, edge.direction.clone()));
        }
        match edge.head {
            EdgeHead::Vertex(h) if self.is_finite_vertex(h) => {
                Some((h, edge.direction.iter().map(|d| -d).collect()))
            }
            _ => None,
        }
    }

    /// Point at parameter `s` from the finite end of `e`, if `s` is interior.
    pub fn point_from_finite_end(&self, e: EdgeId, s: Q) -> Option<ExtendedPoint> {
        let (v, dir) = self.finite_end(e)?;
        if !q_is_positive(&s) {
            return None;
        }
        if let Length::Finite(len) = self.edges[e].length {
            if s >= len {
                return None;
            }
        }
        Some(self.vertices[v].offset(s, &dir))
    }

    /// Whether a finite point lies in the relative interior of edge `e`.
    pub fn edge_contains(&self, e: EdgeId, p: &ExtendedPoint) -> bool {
        let Some(pc) = p.as_finite() else {
            return false;
        };
        let edge = &self.edges[e];
        let tail = &self.vertices[edge.tail];
        let dir = &edge.direction;
        if let Some((v, out)) = self.finite_end(e) {
            let base = self.vertices[v].as_finite().expect("finite end");
            let Some(t) = solve_parameter(&base, &out, &pc) else {
                return false;
            };
            return q_is_positive(&t)
                && match edge.length {
                    Length::Finite(len) => t < len,
                    Length::Infinite => true,
                };
        }
        // full line from a vertex at infinity out of T^r
        let mut t: Option<Q> = None;
        for i in 0..self.r {
            if dir[i] == 0 {
                if tail.0[i] != LogValue::Finite(pc[i]) {
                    return false;
                }
            } else {
                let ti = pc[i] / Q::from_integer(dir[i]);
                if t.is_some_and(|t| t != ti) {
                    return false;
                }
                t = Some(ti);
            }
        }
        true
    }

    pub fn locate(&self, p: &ExtendedPoint) -> Option<Location> {
        if let Some(v) = self.vertex_by_coords(p) {
            return Some(Location::Vertex(v));
        }
        (0..self.edges.len())
            .find(|&e| self.edge_contains(e, p))
            .map(Location::EdgeInterior)
    }

    pub fn contains(&self, p: &ExtendedPoint) -> bool {
        self.locate(p).is_some()
    }

    /// Inserts a vertex at the interior point `p` of edge `e`. The new vertex
    /// is appended; the tail part keeps index `e`, the head part is appended.
    pub fn split_at_point(&self, e: EdgeId, p: &ExtendedPoint) -> Result<(TropicalCurve, VertexId), CurveError> {
        if e >= self.edges.len() {
            return Err(CurveError::NoSuchEdge(e));
        }
        if !self.edge_contains(e, p) {
            return Err(CurveError::NotOnEdge(e));
        }
        let edge = self.edges[e].clone();
        let pc = p.as_finite().expect("interior points are finite");
        let new_v = self.vertices.len();
        let tail_len = match self.vertices[edge.tail].as_finite() {
            Some(t) => Length::Finite(solve_parameter(&t, &edge.direction, &pc).expect("on edge")),
            None => Length::Infinite,
        };
        let head_len = match edge.head {
            EdgeHead::Vertex(h) => match self.vertices[h].as_finite() {
                Some(hc) => Length::Finite(solve_parameter(&pc, &edge.direction, &hc).expect("on edge")),
                None => Length::Infinite,
            },
            EdgeHead::Free => Length::Infinite,
        };
        let mut vertices = self.vertices.clone();
        vertices.push(p.clone());
        let mut edges = self.edges.clone();
        edges[e] = Edge {
            tail: edge.tail,
            head: EdgeHead::Vertex(new_v),
            direction: edge.direction.clone(),
            length: tail_len,
            weight: edge.weight,
        };
        edges.push(Edge { tail: new_v, head: edge.head, direction: edge.direction, length: head_len, weight: edge.weight });
        let curve = TropicalCurve { r: self.r, vertices, edges };
        debug_assert!(curve.validate().is_ok());
        Ok((curve, new_v))
    }

    /// Splits edge `e` at parameter `t` from its tail.
    pub fn subdivide_at(&self, e: EdgeId, t: Q) -> Result<TropicalCurve, CurveError> {
        if e >= self.edges.len() {
            return Err(CurveError::NoSuchEdge(e));
        }
        let edge = &self.edges[e];
        if !q_is_positive(&t) || edge.length.finite().is_some_and(|len| t >= len) {
            return Err(CurveError::ParameterOutOfRange);
        }
        if !self.is_finite_vertex(edge.tail) {
            return Err(CurveError::NoFiniteEnd(e));
        }
        let p = self.vertices[edge.tail].offset(t, &edge.direction);
        self.split_at_point(e, &p).map(|(c, _)| c)
    }

    /// Splits every edge into `pieces` parts: bounded edges evenly, unbounded
    /// ones at unit steps from their finite end. Full lines are left alone.
    pub fn subdivide_all(&self, pieces: u32) -> TropicalCurve {
        let mut curve = self.clone();
        let m = self.edges.len();
        for e in 0..m {
            let mut current = e;
            let len = curve.edges[e].length;
            for _ in 1..pieces {
                let step = match len {
                    Length::Finite(l) => l / Q::from_integer(pieces as i64),
                    Length::Infinite => Q::from_integer(1),
                };
                if curve.finite_end(current).is_none() {
                    break;
                }
                let from_tail = curve.is_finite_vertex(curve.edges[current].tail);
                let Some(p) = curve.point_from_finite_end(current, step) else {
                    break;
                };
                let (next, _) = curve.split_at_point(current, &p).expect("interior point");
                // continue splitting the part away from the finite end we measured from
                current = if from_tail { next.edges.len() - 1 } else { current };
                curve = next;
            }
        }
        curve
    }

    /// Same curve with edge `e` oriented the other way.
    pub fn reverse_edge(&self, e: EdgeId) -> Result<TropicalCurve, CurveError> {
        let edge = self.edges.get(e).ok_or(CurveError::NoSuchEdge(e))?;
        let EdgeHead::Vertex(h) = edge.head else {
            return Err(CurveError::FreeEdgeReversal(e));
        };
        let mut curve = self.clone();
        curve.edges[e] = Edge {
            tail: h,
            head: EdgeHead::Vertex(edge.tail),
            direction: edge.direction.iter().map(|d| -d).collect(),
            length: edge.length,
            weight: edge.weight,
        };
        Ok(curve)
    }

    /// Canonical form: removable 2-valent vertices erased, vertices sorted by
    /// coordinates, edges oriented and sorted. Curve equality is equality of
    /// canonical forms.
    pub fn canonicalize(&self) -> TropicalCurve {
        let mut curve = self.clone();
        while let Some(next) = curve.erase_one_removable_vertex() {
            curve = next;
        }
        curve.sorted()
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonicalize()
    }

    pub fn equivalent(&self, other: &TropicalCurve) -> bool {
        self.canonicalize() == other.canonicalize()
    }

    fn erase_one_removable_vertex(&self) -> Option<TropicalCurve> {
        for v in 0..self.vertices.len() {
            if !self.is_finite_vertex(v) {
                continue;
            }
            let out = self.outgoing(v);
            if out.len() != 2 {
                continue;
            }
            let (e1, d1) = &out[0];
            let (e2, d2) = &out[1];
            let (a, b) = (&self.edges[*e1], &self.edges[*e2]);
            if a.weight != b.weight || d1.iter().zip(d2).any(|(x, y)| *x != -*y) {
                continue;
            }
            let far = |edge: &Edge| if edge.tail == v { edge.head } else { EdgeHead::Vertex(edge.tail) };
            let (o1, o2) = (far(a), far(b));
            let merged = match (o1, o2) {
                (EdgeHead::Free, EdgeHead::Free) => continue,
                (EdgeHead::Vertex(x), EdgeHead::Vertex(y)) if x == y => continue,
                (EdgeHead::Free, EdgeHead::Vertex(w)) => Edge {
                    tail: w,
                    head: EdgeHead::Free,
                    direction: d1.clone(),
                    length: Length::Infinite,
                    weight: a.weight,
                },
                (EdgeHead::Vertex(u), head) => Edge {
                    tail: u,
                    head,
                    direction: d2.clone(),
                    length: a.length.plus(b.length),
                    weight: a.weight,
                },
            };
            let remap = |x: VertexId| if x > v { x - 1 } else { x };
            let mut vertices = self.vertices.clone();
            vertices.remove(v);
            let mut edges: Vec<Edge> = self
                .edges
                .iter()
                .enumerate()
                .filter(|(e, _)| e != e1 && e != e2)
                .map(|(_, e)| e.clone())
                .collect();
            edges.push(merged);
            for edge in &mut edges {
                edge.tail = remap(edge.tail);
                if let EdgeHead::Vertex(h) = edge.head {
                    edge.head = EdgeHead::Vertex(remap(h));
                }
            }
            return Some(TropicalCurve { r: self.r, vertices, edges });
        }
        None
    }

    fn sorted(&self) -> TropicalCurve {
        let mut order: Vec<VertexId> = (0..self.vertices.len()).collect();
        order.sort_by(|&a, &b| self.vertices[a].cmp(&self.vertices[b]));
        let mut new_index = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let vertices: Vec<ExtendedPoint> = order.iter().map(|&v| self.vertices[v].clone()).collect();
        let mut edges: Vec<Edge> = self
            .edges
            .iter()
            .map(|edge| {
                let mut edge = edge.clone();
                edge.tail = new_index[edge.tail];
                if let EdgeHead::Vertex(h) = edge.head {
                    edge.head = EdgeHead::Vertex(new_index[h]);
                }
                if let EdgeHead::Vertex(h) = edge.head {
                    let tail_inf = vertices[edge.tail].is_at_infinity();
                    let head_inf = vertices[h].is_at_infinity();
                    let flip = if tail_inf != head_inf { tail_inf } else { h < edge.tail };
                    if flip {
                        edge.head = EdgeHead::Vertex(edge.tail);
                        edge.tail = h;
                        edge.direction.iter_mut().for_each(|d| *d = -*d);
                    }
                }
                edge
            })
            .collect();
        edges.sort_by(|a, b| {
            (a.tail, a.head, &a.direction, a.weight, a.length).cmp(&(b.tail, b.head, &b.direction, b.weight, b.length))
        });
        TropicalCurve { r: self.r, vertices, edges }
    }

    /// Builds a curve without validation; callers must uphold the invariants.
    pub(crate) fn from_parts_unchecked(r: usize, vertices: Vec<ExtendedPoint>, edges: Vec<Edge>) -> TropicalCurve {
        TropicalCurve { r, vertices, edges }
    }
}

/// `t` with `p = base + t * dir`, if one exists.
fn solve_parameter(base: &[Q], dir: &[i64], p: &[Q]) -> Option<Q> {
    let mut t: Option<Q> = None;
    for i in 0..base.len() {
        if dir[i] == 0 {
            if base[i] != p[i] {
                return None;
            }
        } else {
            let ti = (p[i] - base[i]) / Q::from_integer(dir[i]);
            if t.is_some_and(|t| t != ti) {
                return None;
            }
            t = Some(ti);
        }
    }
    t
}

/// `sign = 1`: the ray from `finite` in direction `dir` ends at `inf`.
/// `sign = -1`: same with `-dir`.
fn check_towards_infinity(finite: &ExtendedPoint, inf: &ExtendedPoint, dir: &[i64], sign: i64) -> Result<(), &'static str> {
    for i in 0..dir.len() {
        let d = sign * dir[i];
        if d > 0 {
            return Err("a ray ending at a vertex at infinity cannot increase a coordinate");
        }
        let expected = if d < 0 { LogValue::NegInf } else { finite.0[i] };
        if inf.0[i] != expected {
            return Err("vertex at infinity is not the limit of the ray");
        }
    }
    Ok(())
}

/// A line starting at the vertex at infinity `inf` and moving along `sign * dir`.
fn check_infinite_end(inf: &ExtendedPoint, dir: &[i64], sign: i64) -> Result<(), &'static str> {
    for i in 0..dir.len() {
        let d = sign * dir[i];
        if d < 0 {
            return Err("a line leaving a vertex at infinity cannot decrease a coordinate");
        }
        if (d > 0) != (inf.0[i] == LogValue::NegInf) {
            return Err("-inf coordinates of the start must be exactly the increasing ones");
        }
    }
    Ok(())
}
