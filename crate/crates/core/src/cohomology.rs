//! Cellular models for `h^{p,q}` and `h^{p,q}_c` of open regions of curves.
//!
//! A region is a closed subcomplex `C` of a (subdivided) curve together with a
//! set `B` of its vertices that are removed; cohomology refers to `V = C \ B`.
//! Coefficients: `F^0` is one-dimensional on every cell, `F^1` is
//! one-dimensional on edges and the dual of the span of the incident
//! directions at a vertex (zero at vertices at infinity). On abstract graphs
//! every vertex is treated as smooth, with `F^1(v) = {c in Q^val : sum c = 0}`.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use thiserror::Error;

use crate::curve::{CurveError, EdgeId, ExtendedPoint, Length, TropicalCurve, VertexId};
use crate::linalg::{coordinates_in_basis, independent_subset, RationalMatrix};
use crate::tropicalize::ModificationMap;
use crate::value::{LogValue, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("graph: {0}")]
    Graph(String),
    #[error("region: {0}")]
    Region(String),
    #[error("closure of the region contains a cycle")]
    Cyclic,
    #[error("region has no boundary points and no free ends")]
    NoEnds,
    #[error("region does not live on the base of the modification")]
    NotOnBase,
}

type Result<T> = std::result::Result<T, CohomologyError>;

fn region_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(CohomologyError::Region(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct AbstractEdge {
    pub tail: VertexId,
    /// `None` for a free end.
    pub head: Option<VertexId>,
}

/// A graph without coordinates; loops, parallel edges and free ends allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbstractGraph {
    at_infinity: Vec<bool>,
    edges: Vec<AbstractEdge>,
}

impl AbstractGraph {
    pub fn new(at_infinity: Vec<bool>, edges: Vec<AbstractEdge>) -> Result<Self> {
        let n = at_infinity.len();
        if n == 0 {
            return Err(CohomologyError::Graph("no vertices".into()));
        }
        for (e, edge) in edges.iter().enumerate() {
            if edge.tail >= n || edge.head.is_some_and(|h| h >= n) {
                return Err(CohomologyError::Graph(format!("edge {e} references a missing vertex")));
            }
        }
        let g = AbstractGraph { at_infinity, edges };
        for v in 0..n {
            if g.at_infinity[v] && g.valence(v) != 1 {
                return Err(CohomologyError::Graph(format!("vertex at infinity {v} must have valence 1")));
            }
        }
        Ok(g)
    }

    /// Forgets coordinates, keeping incidences and orientations.
    pub fn from_curve(curve: &TropicalCurve) -> Self {
        let at_infinity = (0..curve.vertices().len()).map(|v| !curve.is_finite_vertex(v)).collect();
        let edges = curve
            .edges()
            .iter()
            .map(|e| AbstractEdge { tail: e.tail, head: e.head.vertex() })
            .collect();
        AbstractGraph { at_infinity, edges }
    }

    pub fn vertex_count(&self) -> usize {
        self.at_infinity.len()
    }

    pub fn edges(&self) -> &[AbstractEdge] {
        &self.edges
    }

    pub fn is_at_infinity(&self, v: VertexId) -> bool {
        self.at_infinity[v]
    }

    /// Number of edge ends at `v`; a loop counts twice.
    pub fn valence(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .map(|e| usize::from(e.tail == v) + usize::from(e.head == Some(v)))
            .sum()
    }

    /// Inserts a finite vertex inside edge `e`, which keeps its tail part.
    pub fn split_edge(&self, e: EdgeId) -> Result<(Self, VertexId)> {
        let edge = *self.edges.get(e).ok_or_else(|| CohomologyError::Graph(format!("no edge {e}")))?;
        let mut g = self.clone();
        let c = g.at_infinity.len();
        g.at_infinity.push(false);
        g.edges[e] = AbstractEdge { tail: edge.tail, head: Some(c) };
        g.edges.push(AbstractEdge { tail: c, head: edge.head });
        Ok((g, c))
    }

    /// Replaces every loop by a cycle through `points` new vertices.
    pub fn subdivide_loops(&self, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(CohomologyError::Graph("loops need at least two subdivision points".into()));
        }
        let mut g = self.clone();
        for e in 0..self.edges.len() {
            if self.edges[e].head != Some(self.edges[e].tail) {
                continue;
            }
            let mut current = e;
            for _ in 0..points {
                let (next, _) = g.split_edge(current)?;
                g = next;
                current = g.edges.len() - 1;
            }
        }
        Ok(g)
    }

    pub fn reverse_edge(&self, e: EdgeId) -> Result<Self> {
        let edge = *self.edges.get(e).ok_or_else(|| CohomologyError::Graph(format!("no edge {e}")))?;
        let Some(h) = edge.head else {
            return Err(CohomologyError::Graph(format!("free edge {e} cannot be reversed")));
        };
        let mut g = self.clone();
        g.edges[e] = AbstractEdge { tail: h, head: Some(edge.tail) };
        Ok(g)
    }
}

/// The space a region lives in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ambient {
    Embedded(TropicalCurve),
    Abstract(AbstractGraph),
}

/// `F^1(v)` in a chosen basis, with the row of `r_{v,e}` for each incident edge.
struct LocalModel {
    dim: usize,
    rows: Vec<(EdgeId, Vec<BigRational>)>,
}

impl LocalModel {
    fn row(&self, e: EdgeId) -> &[BigRational] {
        &self.rows.iter().find(|(f, _)| *f == e).expect("incident edge").1
    }
}

impl Ambient {
    pub fn vertex_count(&self) -> usize {
        match self {
            Ambient::Embedded(c) => c.vertices().len(),
            Ambient::Abstract(g) => g.vertex_count(),
        }
    }

    pub fn edge_count(&self) -> usize {
        match self {
            Ambient::Embedded(c) => c.edges().len(),
            Ambient::Abstract(g) => g.edges().len(),
        }
    }

    /// Tail and head (`None` for a free end) of edge `e`.
    pub fn ends(&self, e: EdgeId) -> (VertexId, Option<VertexId>) {
        match self {
            Ambient::Embedded(c) => (c.edge(e).tail, c.edge(e).head.vertex()),
            Ambient::Abstract(g) => (g.edges()[e].tail, g.edges()[e].head),
        }
    }

    pub fn is_at_infinity(&self, v: VertexId) -> bool {
        match self {
            Ambient::Embedded(c) => !c.is_finite_vertex(v),
            Ambient::Abstract(g) => g.is_at_infinity(v),
        }
    }

    pub fn incident_edges(&self, v: VertexId) -> Vec<EdgeId> {
        (0..self.edge_count())
            .filter(|&e| {
                let (t, h) = self.ends(e);
                t == v || h == Some(v)
            })
            .collect()
    }

    pub fn to_abstract(&self) -> AbstractGraph {
        match self {
            Ambient::Embedded(c) => AbstractGraph::from_curve(c),
            Ambient::Abstract(g) => g.clone(),
        }
    }

    /// Inserts a vertex inside edge `e` (midpoint of bounded edges, unit
    /// distance from the finite end otherwise). Edge `e` keeps its tail part;
    /// the new vertex and the head part are appended.
    pub fn split_edge(&self, e: EdgeId) -> Result<(Ambient, VertexId)> {
        match self {
            Ambient::Abstract(g) => g.split_edge(e).map(|(g, v)| (Ambient::Abstract(g), v)),
            Ambient::Embedded(c) => {
                if e >= c.edges().len() {
                    return Err(CurveError::NoSuchEdge(e).into());
                }
                let point = match (c.finite_end(e), c.edge(e).length) {
                    (Some(_), Length::Finite(len)) => c.point_from_finite_end(e, len / Q::from_integer(2)),
                    (Some(_), Length::Infinite) => c.point_from_finite_end(e, Q::one()),
                    (None, _) => Some(ExtendedPoint(
                        c.vertex(c.edge(e).tail)
                            .coords()
                            .iter()
                            .map(|x| if x.is_finite() { *x } else { LogValue::int(0) })
                            .collect(),
                    )),
                };
                let point = point.ok_or(CurveError::NotOnEdge(e))?;
                let (curve, v) = c.split_at_point(e, &point)?;
                Ok((Ambient::Embedded(curve), v))
            }
        }
    }

    pub fn reverse_edge(&self, e: EdgeId) -> Result<Ambient> {
        match self {
            Ambient::Embedded(c) => Ok(Ambient::Embedded(c.reverse_edge(e)?)),
            Ambient::Abstract(g) => Ok(Ambient::Abstract(g.reverse_edge(e)?)),
        }
    }

    /// `val(v) = dim(v) + 1` and weight-1 edges; always true on abstract graphs.
    fn smooth_at(&self, v: VertexId) -> bool {
        match self {
            Ambient::Embedded(c) => {
                c.valence(v) == c.local_dim(v) + 1 && c.incident_edges(v).iter().all(|&e| c.edge(e).weight == 1)
            }
            Ambient::Abstract(_) => true,
        }
    }

    fn local_model(&self, v: VertexId) -> LocalModel {
        let sign = |e: EdgeId, row: Vec<BigRational>| -> (EdgeId, Vec<BigRational>) {
            // r_{v,e} evaluates on the tail-to-head direction, the negative
            // of the outgoing one at the head
            if self.ends(e).0 == v {
                (e, row)
            } else {
                (e, row.into_iter().map(|x| -x).collect())
            }
        };
        match self {
            Ambient::Embedded(c) => {
                if !c.is_finite_vertex(v) {
                    return LocalModel { dim: 0, rows: c.incident_edges(v).into_iter().map(|e| (e, Vec::new())).collect() };
                }
                let out = c.outgoing(v);
                let dirs: Vec<Vec<i64>> = out.iter().map(|(_, d)| d.clone()).collect();
                let basis: Vec<Vec<i64>> = independent_subset(&dirs).into_iter().map(|i| dirs[i].clone()).collect();
                let rows = out
                    .iter()
                    .map(|(e, d)| sign(*e, coordinates_in_basis(&basis, d).expect("direction lies in the span")))
                    .collect();
                LocalModel { dim: basis.len(), rows }
            }
            Ambient::Abstract(_) => {
                let incident = self.incident_edges(v);
                let dim = incident.len().saturating_sub(1);
                let rows = incident
                    .iter()
                    .enumerate()
                    .map(|(j, &e)| {
                        let row = (0..dim)
                            .map(|i| {
                                if j == dim {
                                    -BigRational::one()
                                } else if i == j {
                                    BigRational::one()
                                } else {
                                    BigRational::zero()
                                }
                            })
                            .collect();
                        sign(e, row)
                    })
                    .collect();
                LocalModel { dim, rows }
            }
        }
    }
}

/// An open subset `V = C \ B` of an ambient curve or graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    ambient: Ambient,
    vertices: Vec<VertexId>,
    edges: Vec<EdgeId>,
    boundary: Vec<VertexId>,
}

fn as_set(ids: &[usize]) -> BTreeSet<usize> {
    ids.iter().copied().collect()
}

impl Region {
    /// Id lists are treated as sets.
    pub fn new(ambient: Ambient, vertices: Vec<VertexId>, edges: Vec<EdgeId>, boundary: Vec<VertexId>) -> Result<Self> {
        let (vs, es, bs) = (as_set(&vertices), as_set(&edges), as_set(&boundary));
        let (n, m) = (ambient.vertex_count(), ambient.edge_count());
        if let Some(v) = vs.iter().find(|&&v| v >= n) {
            return region_err(format!("vertex {v} does not exist"));
        }
        if let Some(e) = es.iter().find(|&&e| e >= m) {
            return region_err(format!("edge {e} does not exist"));
        }
        for &e in &es {
            let (t, h) = ambient.ends(e);
            if h == Some(t) {
                return region_err(format!("edge {e} is a loop; subdivide it first"));
            }
            if !vs.contains(&t) || h.is_some_and(|h| !vs.contains(&h)) {
                return region_err(format!("edge {e} has an endpoint outside the region"));
            }
        }
        for &b in &bs {
            if !vs.contains(&b) {
                return region_err(format!("boundary vertex {b} is not in the region"));
            }
            if ambient.is_at_infinity(b) {
                return region_err(format!("boundary vertex {b} is at infinity"));
            }
        }
        for &v in vs.difference(&bs) {
            if let Some(e) = ambient.incident_edges(v).into_iter().find(|e| !es.contains(e)) {
                return region_err(format!("vertex {v} is interior but its edge {e} is missing"));
            }
        }
        Ok(Region {
            ambient,
            vertices: vs.into_iter().collect(),
            edges: es.into_iter().collect(),
            boundary: bs.into_iter().collect(),
        })
    }

    /// The whole ambient space.
    pub fn whole(ambient: Ambient) -> Result<Self> {
        let vertices = (0..ambient.vertex_count()).collect();
        let edges = (0..ambient.edge_count()).collect();
        Region::new(ambient, vertices, edges, Vec::new())
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn boundary(&self) -> &[VertexId] {
        &self.boundary
    }

    fn in_boundary(&self, v: VertexId) -> bool {
        self.boundary.binary_search(&v).is_ok()
    }

    /// `k = |B| + #free ends in C`.
    pub fn end_count(&self) -> usize {
        self.boundary.len() + self.edges.iter().filter(|&&e| self.ambient.ends(e).1.is_none()).count()
    }

    /// Whether every point of `V` is a smooth point of the ambient curve.
    pub fn in_validated_envelope(&self) -> bool {
        self.vertices
            .iter()
            .filter(|&&v| !self.in_boundary(v))
            .all(|&v| self.ambient.smooth_at(v))
            && match &self.ambient {
                Ambient::Embedded(c) => self.edges.iter().all(|&e| c.edge(e).weight == 1),
                Ambient::Abstract(_) => true,
            }
    }

    /// The same open set with edge `e` subdivided.
    pub fn subdivide_edge(&self, e: EdgeId) -> Result<Region> {
        let (ambient, v) = self.ambient.split_edge(e)?;
        let mut vertices = self.vertices.clone();
        let mut edges = self.edges.clone();
        if self.edges.contains(&e) {
            vertices.push(v);
            edges.push(ambient.edge_count() - 1);
        }
        Region::new(ambient, vertices, edges, self.boundary.clone())
    }

    pub fn reverse_edge(&self, e: EdgeId) -> Result<Region> {
        let ambient = self.ambient.reverse_edge(e)?;
        Region::new(ambient, self.vertices.clone(), self.edges.clone(), self.boundary.clone())
    }

    /// Same region on the underlying abstract graph.
    pub fn to_abstract(&self) -> Region {
        Region { ambient: Ambient::Abstract(self.ambient.to_abstract()), ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    Ordinary,
    Compact,
}

/// Cells of the complexes. Trim vertices are the interior points at which
/// ordinary cohomology cuts edges ending in `B` or leaving through a free end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cell {
    Vertex(VertexId),
    Trim { edge: EdgeId, at_head: bool, parameter: Q },
    Edge(EdgeId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreGraph {
    pub vertices: Vec<Cell>,
    /// `(edge, tail index, head index)` into `vertices`.
    pub edges: Vec<(EdgeId, usize, usize)>,
}

/// The finite closed complex used for ordinary cohomology: `C` with every
/// edge ending in `B` or at a free end cut at an interior point.
pub fn core_graph(region: &Region, parameter: Q) -> CoreGraph {
    let mut vertices: Vec<Cell> = region
        .vertices
        .iter()
        .filter(|&&v| !region.in_boundary(v))
        .map(|&v| Cell::Vertex(v))
        .collect();
    let index = |cells: &[Cell], v: VertexId| cells.iter().position(|c| *c == Cell::Vertex(v)).expect("core vertex");
    let mut edges = Vec::with_capacity(region.edges.len());
    for &e in &region.edges {
        let (t, h) = region.ambient.ends(e);
        let tail = if region.in_boundary(t) {
            vertices.push(Cell::Trim { edge: e, at_head: false, parameter });
            vertices.len() - 1
        } else {
            index(&vertices, t)
        };
        let head = match h {
            Some(h) if !region.in_boundary(h) => index(&vertices, h),
            _ => {
                vertices.push(Cell::Trim { edge: e, at_head: true, parameter });
                vertices.len() - 1
            }
        };
        edges.push((e, tail, head));
    }
    CoreGraph { vertices, edges }
}

/// Cochain complex `C^0 -> C^1` of the coefficient sheaf `F^p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SheafComplex {
    pub p: usize,
    pub support: Support,
    /// Vertex cells with their coefficient dimension.
    pub c0: Vec<(Cell, usize)>,
    pub c1: Vec<Cell>,
    pub d: RationalMatrix,
}

impl SheafComplex {
    pub fn rank(&self) -> usize {
        self.d.rank()
    }

    pub fn kernel_dim(&self) -> usize {
        self.d.cols() - self.rank()
    }

    pub fn cokernel_dim(&self) -> usize {
        self.d.rows() - self.rank()
    }
}

pub fn build_complex(region: &Region, p: usize, support: Support) -> Result<SheafComplex> {
    build_complex_trimmed(region, p, support, Q::new(1, 2))
}

/// As [`build_complex`], with trim vertices recorded at `parameter` along
/// their edges.
/// Target edge and the restriction row into it.
type RestrictionRow = (EdgeId, Vec<BigRational>);

pub fn build_complex_trimmed(region: &Region, p: usize, support: Support, parameter: Q) -> Result<SheafComplex> {
    if p > 1 {
        return region_err("p must be 0 or 1");
    }
    let one = || vec![BigRational::one()];
    let model = |v: VertexId| (p == 1).then(|| region.ambient.local_model(v));
    let vertex_dim = |m: &Option<LocalModel>| m.as_ref().map_or(1, |m| m.dim);
    let vertex_row = |m: &Option<LocalModel>, e: EdgeId| m.as_ref().map_or_else(one, |m| m.row(e).to_vec());

    // (cell, dim, row of r_{cell,e} for each incident edge)
    let mut blocks: Vec<(Cell, usize, Vec<RestrictionRow>)> = Vec::new();
    // (edge cell, tail block, head block), blocks optional when dropped
    let mut rows: Vec<(Cell, Option<usize>, Option<usize>)> = Vec::new();
    let block_of = |cell: Cell, v: Option<VertexId>, blocks: &mut Vec<_>| -> usize {
        if let Some(i) = blocks.iter().position(|(c, _, _): &(Cell, usize, Vec<_>)| *c == cell) {
            return i;
        }
        let (dim, rows) = match v {
            Some(v) => {
                let m = model(v);
                let rows = region.ambient.incident_edges(v).into_iter().map(|e| (e, vertex_row(&m, e))).collect();
                (vertex_dim(&m), rows)
            }
            None => {
                let Cell::Trim { edge, .. } = cell else { unreachable!() };
                (1, vec![(edge, one())])
            }
        };
        blocks.push((cell, dim, rows));
        blocks.len() - 1
    };
    match support {
        Support::Compact => {
            for &v in region.vertices.iter().filter(|&&v| !region.in_boundary(v)) {
                block_of(Cell::Vertex(v), Some(v), &mut blocks);
            }
            for &e in &region.edges {
                let (t, h) = region.ambient.ends(e);
                let tail = (!region.in_boundary(t)).then(|| block_of(Cell::Vertex(t), Some(t), &mut blocks));
                let head = h
                    .filter(|&h| !region.in_boundary(h))
                    .map(|h| block_of(Cell::Vertex(h), Some(h), &mut blocks));
                rows.push((Cell::Edge(e), tail, head));
            }
        }
        Support::Ordinary => {
            let core = core_graph(region, parameter);
            let ids: Vec<usize> = core
                .vertices
                .iter()
                .map(|cell| {
                    let v = match cell {
                        Cell::Vertex(v) => Some(*v),
                        _ => None,
                    };
                    block_of(cell.clone(), v, &mut blocks)
                })
                .collect();
            for &(e, t, h) in &core.edges {
                rows.push((Cell::Edge(e), Some(ids[t]), Some(ids[h])));
            }
        }
    }
    let mut offsets = Vec::with_capacity(blocks.len());
    let mut cols = 0;
    for (_, dim, _) in &blocks {
        offsets.push(cols);
        cols += dim;
    }
    let mut d = RationalMatrix::zeros(rows.len(), cols);
    for (i, (cell, tail, head)) in rows.iter().enumerate() {
        let Cell::Edge(e) = cell else { unreachable!() };
        for (block, sign) in [(head, 1), (tail, -1)] {
            let Some(b) = *block else { continue };
            let row = &blocks[b].2.iter().find(|(f, _)| f == e).expect("incident").1;
            for (j, x) in row.iter().enumerate() {
                let x = if sign < 0 { -x } else { x.clone() };
                d.add_to(i, offsets[b] + j, &x);
            }
        }
    }
    Ok(SheafComplex {
        p,
        support,
        c0: blocks.into_iter().map(|(c, dim, _)| (c, dim)).collect(),
        c1: rows.into_iter().map(|(c, _, _)| c).collect(),
        d,
    })
}

/// `h[p][q]` and `hc[p][q]` for `p, q` in `{0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CohomologyTable {
    pub h: [[usize; 2]; 2],
    pub hc: [[usize; 2]; 2],
}

pub fn cohomology_table(region: &Region) -> Result<CohomologyTable> {
    cohomology_table_trimmed(region, Q::new(1, 2))
}

pub fn cohomology_table_trimmed(region: &Region, parameter: Q) -> Result<CohomologyTable> {
    let mut table = CohomologyTable::default();
    for p in 0..2 {
        let ord = build_complex_trimmed(region, p, Support::Ordinary, parameter)?;
        table.h[p] = [ord.kernel_dim(), ord.cokernel_dim()];
        let cpt = build_complex_trimmed(region, p, Support::Compact, parameter)?;
        table.hc[p] = [cpt.kernel_dim(), cpt.cokernel_dim()];
    }
    Ok(table)
}

/// Positions `(p, q)` where `h[p][q] != hc[1-p][1-q]`; empty iff duality holds.
pub fn pd_check(t: &CohomologyTable) -> (bool, Vec<(usize, usize)>) {
    let failures: Vec<(usize, usize)> = (0..2)
        .flat_map(|p| (0..2).map(move |q| (p, q)))
        .filter(|&(p, q)| t.h[p][q] != t.hc[1 - p][1 - q])
        .collect();
    (failures.is_empty(), failures)
}

/// `h^{0,0} - h^{0,1}` against the Euler characteristic of the core.
pub fn euler_check(region: &Region) -> Result<bool> {
    let t = cohomology_table(region)?;
    let core = core_graph(region, Q::new(1, 2));
    Ok(t.h[0][0] as i64 - t.h[0][1] as i64 == core.vertices.len() as i64 - core.edges.len() as i64)
}

/// Region on a subcomplex spanned by `core_vertices` and the tree
/// `tree_edges`; every other edge at the core is cut once next to it (twice if
/// both ends lie in the core). The result is strictly simple with
/// `k = end_count()` ends.
pub fn simple_region(ambient: &Ambient, core_vertices: &[VertexId], tree_edges: &[EdgeId]) -> Result<Region> {
    let core = as_set(core_vertices);
    let tree = as_set(tree_edges);
    if core.is_empty() {
        return region_err("empty core");
    }
    if core.iter().any(|&v| v >= ambient.vertex_count()) || tree.iter().any(|&e| e >= ambient.edge_count()) {
        return region_err("core references missing cells");
    }
    let mut parent: Vec<usize> = (0..ambient.vertex_count()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for &e in &tree {
        let (t, h) = ambient.ends(e);
        let Some(h) = h.filter(|h| core.contains(h) && core.contains(&t)) else {
            return region_err(format!("tree edge {e} must join two core vertices"));
        };
        let (a, b) = (find(&mut parent, t), find(&mut parent, h));
        if a == b {
            return Err(CohomologyError::Cyclic);
        }
        parent[a] = b;
    }
    let first = *core.iter().next().expect("nonempty");
    let root = find(&mut parent, first);
    if core.iter().any(|&v| find(&mut parent, v) != root) {
        return region_err("tree does not connect the core");
    }

    let mut amb = ambient.clone();
    let mut vertices = core.clone();
    let mut edges = tree.clone();
    let mut boundary = BTreeSet::new();
    for e in 0..ambient.edge_count() {
        if tree.contains(&e) {
            continue;
        }
        let (t, h) = ambient.ends(e);
        let t_in = core.contains(&t);
        let Some(h) = h else {
            if t_in {
                edges.insert(e);
            }
            continue;
        };
        match (t_in, core.contains(&h)) {
            (false, false) => {}
            (true, true) => {
                let (a, c1) = amb.split_edge(e)?;
                let rest = a.edge_count() - 1;
                let (a, c2) = a.split_edge(rest)?;
                let last = a.edge_count() - 1;
                amb = a;
                edges.extend([e, last]);
                vertices.extend([c1, c2]);
                boundary.extend([c1, c2]);
            }
            (true, false) => {
                let (a, c) = amb.split_edge(e)?;
                amb = a;
                edges.insert(e);
                vertices.insert(c);
                boundary.insert(c);
            }
            (false, true) => {
                let (a, c) = amb.split_edge(e)?;
                edges.insert(a.edge_count() - 1);
                amb = a;
                vertices.insert(c);
                boundary.insert(c);
            }
        }
    }
    let region = Region::new(
        amb,
        vertices.into_iter().collect(),
        edges.into_iter().collect(),
        boundary.into_iter().collect(),
    )?;
    if region.end_count() == 0 {
        return Err(CohomologyError::NoEnds);
    }
    Ok(region)
}

/// An open interval inside edge `e` (a half-line if `e` has a free end).
pub fn interval_region(ambient: &Ambient, e: EdgeId) -> Result<Region> {
    let (a, c1) = ambient.split_edge(e)?;
    let x = a.edge_count() - 1;
    if a.ends(x).1.is_none() {
        return Region::new(a, vec![c1], vec![x], vec![c1]);
    }
    let (a, c2) = a.split_edge(x)?;
    Region::new(a, vec![c1, c2], vec![x], vec![c1, c2])
}

/// Random strictly simple region: a random subtree grown from a random vertex.
pub fn random_simple_region<R: Rng>(ambient: &Ambient, rng: &mut R) -> Result<Region> {
    let n = ambient.vertex_count();
    let start = rng.gen_range(0..n);
    let mut core = vec![start];
    let mut tree = Vec::new();
    let target = rng.gen_range(1..=n);
    while core.len() < target {
        let frontier: Vec<(EdgeId, VertexId)> = (0..ambient.edge_count())
            .filter_map(|e| match ambient.ends(e) {
                (t, Some(h)) if core.contains(&t) != core.contains(&h) => {
                    Some((e, if core.contains(&t) { h } else { t }))
                }
                _ => None,
            })
            .collect();
        if frontier.is_empty() {
            break;
        }
        let (e, v) = frontier[rng.gen_range(0..frontier.len())];
        core.push(v);
        tree.push(e);
    }
    simple_region(ambient, &core, &tree)
}

/// Random open region made of the stars of a random vertex set `S`, plus
/// some open edges away from `S`. The ambient must be loop-free.
pub fn random_region<R: Rng>(ambient: &Ambient, rng: &mut R) -> Result<Region> {
    let n = ambient.vertex_count();
    let mut s: BTreeSet<VertexId> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    if s.is_empty() {
        s.insert(rng.gen_range(0..n));
    }
    // a vertex at infinity next to S cannot be a boundary point
    for e in 0..ambient.edge_count() {
        if let (t, Some(h)) = ambient.ends(e) {
            if s.contains(&t) && ambient.is_at_infinity(h) {
                s.insert(h);
            }
            if s.contains(&h) && ambient.is_at_infinity(t) {
                s.insert(t);
            }
        }
    }
    let mut vertices = s.clone();
    let mut edges = BTreeSet::new();
    for e in 0..ambient.edge_count() {
        let (t, h) = ambient.ends(e);
        let touches = s.contains(&t) || h.is_some_and(|h| s.contains(&h));
        let finite_outside = !ambient.is_at_infinity(t) && h.is_none_or(|h| !ambient.is_at_infinity(h));
        if touches || (finite_outside && rng.gen_bool(0.25)) {
            edges.insert(e);
            vertices.insert(t);
            vertices.extend(h);
        }
    }
    let boundary: Vec<VertexId> = vertices.difference(&s).copied().collect();
    Region::new(ambient.clone(), vertices.into_iter().collect(), edges.into_iter().collect(), boundary)
}

/// Preimage of a region on `map.base` under the modification: the same cells
/// plus the added rays at interior vertices.
pub fn preimage_region(map: &ModificationMap, region: &Region) -> Result<Region> {
    if region.ambient != Ambient::Embedded(map.base.clone()) {
        return Err(CohomologyError::NotOnBase);
    }
    let mut vertices = region.vertices.clone();
    let mut edges = region.edges.clone();
    for (e, v, end) in map.ray_edges() {
        if region.vertices.contains(&v) && !region.in_boundary(v) {
            edges.push(e);
            vertices.push(end);
        }
    }
    Region::new(Ambient::Embedded(map.source.clone()), vertices, edges, region.boundary.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tropicalize::tropicalize_direct;
    use crate::valuation::from_padic_points;

    fn two_point_curve() -> TropicalCurve {
        tropicalize_direct(&from_padic_points(5, &[Q::from_integer(0), Q::from_integer(1)]).unwrap()).unwrap()
    }

    fn graph(n: usize, edges: &[(usize, usize)]) -> AbstractGraph {
        AbstractGraph::new(
            vec![false; n],
            edges.iter().map(|&(t, h)| AbstractEdge { tail: t, head: Some(h) }).collect(),
        )
        .unwrap()
    }

    #[test]
    fn whole_two_point_curve() {
        let region = Region::whole(Ambient::Embedded(two_point_curve())).unwrap();
        let ord = build_complex(&region, 1, Support::Ordinary).unwrap();
        let dims: usize = ord.c0.iter().map(|(_, d)| d).sum();
        assert_eq!((dims, ord.c1.len(), ord.rank()), (3, 3, 3));
        let t = cohomology_table(&region).unwrap();
        assert_eq!(t.h, [[1, 0], [0, 0]]);
        assert_eq!(t.hc, [[0, 0], [0, 1]]);
        assert!(pd_check(&t).0);
        assert!(euler_check(&region).unwrap());
        assert_eq!(core_graph(&region, Q::new(1, 2)).vertices.len(), 4);
        assert_eq!(region.end_count(), 1);
    }

    #[test]
    fn open_interval() {
        let region = interval_region(&Ambient::Embedded(two_point_curve()), 0).unwrap();
        assert_eq!(region.end_count(), 2);
        let c = build_complex(&region, 0, Support::Compact).unwrap();
        assert_eq!((c.c0.len(), c.c1.len()), (0, 1));
        let t = cohomology_table(&region).unwrap();
        assert_eq!(t.h, [[1, 0], [1, 0]]);
        assert_eq!(t.hc, [[0, 1], [0, 1]]);
    }

    #[test]
    fn disc_at_infinity() {
        let curve = two_point_curve();
        let leaf = (0..curve.vertices().len()).find(|&v| !curve.is_finite_vertex(v)).unwrap();
        let region = simple_region(&Ambient::Embedded(curve), &[leaf], &[]).unwrap();
        assert_eq!(region.end_count(), 1);
        let c = build_complex(&region, 1, Support::Compact).unwrap();
        assert_eq!(c.c0, vec![(Cell::Vertex(leaf), 0)]);
        let t = cohomology_table(&region).unwrap();
        assert_eq!(t.hc[1], [0, 1]);
        assert_eq!(t.h, [[1, 0], [0, 0]]);
    }

    #[test]
    fn stars() {
        for k in 1..7 {
            // a vertex with k pendant edges
            let g = graph(k + 1, &(1..=k).map(|i| (0, i)).collect::<Vec<_>>());
            let region = simple_region(&Ambient::Abstract(g), &[0], &[]).unwrap();
            assert_eq!(region.end_count(), k);
            let t = cohomology_table(&region).unwrap();
            assert_eq!(t.h, [[1, 0], [k - 1, 0]], "k = {k}");
            assert_eq!(t.hc, [[0, k - 1], [0, 1]], "k = {k}");
        }
    }

    #[test]
    fn circle_and_theta() {
        let circle = graph(3, &[(0, 1), (1, 2), (2, 0)]);
        let t = cohomology_table(&Region::whole(Ambient::Abstract(circle)).unwrap()).unwrap();
        assert_eq!(t.h, [[1, 1], [1, 1]]);
        assert_eq!(t.hc, t.h);
        let theta = graph(2, &[(0, 1), (0, 1), (0, 1)]);
        let t = cohomology_table(&Region::whole(Ambient::Abstract(theta.clone())).unwrap()).unwrap();
        assert_eq!(t.h, [[1, 2], [2, 1]]);
        let star = simple_region(&Ambient::Abstract(theta.clone()), &[0], &[]).unwrap();
        assert_eq!(star.end_count(), 3);
        assert_eq!(simple_region(&Ambient::Abstract(theta), &[0, 1], &[0, 1]), Err(CohomologyError::Cyclic));
    }

    #[test]
    fn loops_must_be_subdivided() {
        let circle = AbstractGraph::new(vec![false], vec![AbstractEdge { tail: 0, head: Some(0) }]).unwrap();
        assert!(Region::whole(Ambient::Abstract(circle.clone())).is_err());
        for points in 2..5 {
            let g = circle.subdivide_loops(points).unwrap();
            let t = cohomology_table(&Region::whole(Ambient::Abstract(g)).unwrap()).unwrap();
            assert_eq!(t.h, [[1, 1], [1, 1]]);
        }
        assert!(circle.subdivide_loops(1).is_err());
    }

    #[test]
    fn region_validation() {
        let amb = Ambient::Abstract(graph(3, &[(0, 1), (1, 2)]));
        assert!(Region::new(amb.clone(), vec![0, 1], vec![0], vec![]).is_err());
        assert!(Region::new(amb.clone(), vec![0, 1], vec![0], vec![1]).is_ok());
        assert!(Region::new(amb.clone(), vec![0], vec![0], vec![]).is_err());
        assert!(Region::new(amb.clone(), vec![0, 1], vec![0], vec![2]).is_err());
        let curve = two_point_curve();
        let inf = (0..curve.vertices().len()).find(|&v| !curve.is_finite_vertex(v)).unwrap();
        let e = curve.incident_edges(inf)[0];
        assert!(Region::new(Ambient::Embedded(curve), vec![0, 1, 2], vec![e], vec![inf]).is_err());
    }

    #[test]
    fn isolated_vertex() {
        let g = AbstractGraph::new(vec![false], vec![]).unwrap();
        let t = cohomology_table(&Region::whole(Ambient::Abstract(g)).unwrap()).unwrap();
        assert_eq!(t.h, [[1, 0], [0, 0]]);
        assert_eq!(t.hc, [[1, 0], [0, 0]]);
    }
}
