//! Skeletons of Mumford curves and the closed-form dimension tables for the
//! whole analytification and for strictly simple open subsets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cohomology::{
    cohomology_table, interval_region, pd_check, random_simple_region, simple_region, AbstractEdge, AbstractGraph,
    Ambient, CohomologyError, CohomologyTable, Region,
};
use crate::curve::{EdgeId, VertexId};
use crate::value::{q_is_positive, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkeletonError {
    #[error("skeleton has no vertices")]
    NoVertices,
    #[error("edge {edge} references missing vertex {vertex}")]
    MissingVertex { edge: EdgeId, vertex: VertexId },
    #[error("edge {0} must have positive length")]
    Length(EdgeId),
    #[error("vertex {0} has no incident edge")]
    Isolated(VertexId),
    #[error("skeleton is not connected")]
    Disconnected,
    #[error("simple regions need k >= 1 ends, got {0}")]
    EndCount(usize),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

type Result<T> = std::result::Result<T, SkeletonError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonEdge {
    pub ends: [VertexId; 2],
    pub length: Q,
}

/// Connected metric multigraph; loops and parallel edges allowed, all vertex
/// genera zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonGraph {
    vertex_count: usize,
    edges: Vec<SkeletonEdge>,
}

impl SkeletonGraph {
    pub fn new(vertex_count: usize, edges: Vec<SkeletonEdge>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(SkeletonError::NoVertices);
        }
        let mut parent: Vec<usize> = (0..vertex_count).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            parent[x] = r;
            r
        }
        let mut touched = vec![false; vertex_count];
        for (e, edge) in edges.iter().enumerate() {
            for &v in &edge.ends {
                if v >= vertex_count {
                    return Err(SkeletonError::MissingVertex { edge: e, vertex: v });
                }
                touched[v] = true;
            }
            if !q_is_positive(&edge.length) {
                return Err(SkeletonError::Length(e));
            }
            let (a, b) = (find(&mut parent, edge.ends[0]), find(&mut parent, edge.ends[1]));
            parent[a] = b;
        }
        if let Some(v) = touched.iter().position(|t| !t) {
            return Err(SkeletonError::Isolated(v));
        }
        let root = find(&mut parent, 0);
        if (0..vertex_count).any(|v| find(&mut parent, v) != root) {
            return Err(SkeletonError::Disconnected);
        }
        Ok(SkeletonGraph { vertex_count, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[SkeletonEdge] {
        &self.edges
    }

    /// First Betti number `|E| - |V| + 1`.
    pub fn genus(&self) -> usize {
        self.edges.len() + 1 - self.vertex_count
    }

    pub fn valence(&self, v: VertexId) -> usize {
        self.edges.iter().map(|e| e.ends.iter().filter(|&&x| x == v).count()).sum()
    }

    /// Abstract graph with each loop replaced by a cycle through
    /// `loop_points >= 2` new vertices. Original ids are kept.
    pub fn to_abstract(&self, loop_points: usize) -> Result<AbstractGraph> {
        let edges = self
            .edges
            .iter()
            .map(|e| AbstractEdge { tail: e.ends[0], head: Some(e.ends[1]) })
            .collect();
        let g = AbstractGraph::new(vec![false; self.vertex_count], edges)?;
        Ok(g.subdivide_loops(loop_points)?)
    }

    pub fn ambient(&self) -> Result<Ambient> {
        Ok(Ambient::Abstract(self.to_abstract(2)?))
    }
}

/// `h = hc = [[1, g], [g, 1]]`.
pub fn theorem_table_global(g: usize) -> CohomologyTable {
    let h = [[1, g], [g, 1]];
    CohomologyTable { h, hc: h }
}

/// `h = [[1, 0], [k-1, 0]]`, `hc = [[0, k-1], [0, 1]]`.
pub fn theorem_table_simple(k: usize) -> Result<CohomologyTable> {
    if k < 1 {
        return Err(SkeletonError::EndCount(k));
    }
    Ok(CohomologyTable { h: [[1, 0], [k - 1, 0]], hc: [[0, k - 1], [0, 1]] })
}

/// Strictly simple region around the subtree (`core_vertices`, `tree_edges`)
/// of the skeleton; all other edges at the core are cut.
pub fn make_simple_region(s: &SkeletonGraph, core_vertices: &[VertexId], tree_edges: &[EdgeId]) -> Result<Region> {
    Ok(simple_region(&s.ambient()?, core_vertices, tree_edges)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleRegionCheck {
    pub description: String,
    pub k: usize,
    pub table: CohomologyTable,
    pub matches: bool,
    pub duality: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonReport {
    pub genus: usize,
    pub table: CohomologyTable,
    pub global_matches: bool,
    pub simple: Vec<SimpleRegionCheck>,
}

impl SkeletonReport {
    pub fn verified(&self) -> bool {
        self.global_matches && self.simple.iter().all(|c| c.matches && c.duality)
    }
}

fn check_simple(description: String, region: &Region) -> Result<SimpleRegionCheck> {
    let k = region.end_count();
    let table = cohomology_table(region)?;
    Ok(SimpleRegionCheck {
        description,
        k,
        table,
        matches: table == theorem_table_simple(k)?,
        duality: pd_check(&table).0,
    })
}

/// Compares the cellular table of the whole skeleton with the genus formula,
/// and the tables of generated strictly simple regions (vertex stars, open
/// edge intervals, `random` random subtrees) with the formula in `k`.
pub fn verify_skeleton(s: &SkeletonGraph, seed: u64, random: usize) -> Result<SkeletonReport> {
    let ambient = s.ambient()?;
    let table = cohomology_table(&Region::whole(ambient.clone())?)?;
    let genus = s.genus();
    let mut simple = Vec::new();
    for v in 0..s.vertex_count() {
        simple.push(check_simple(format!("star of vertex {v}"), &simple_region(&ambient, &[v], &[])?)?);
    }
    for e in 0..s.edges().len() {
        simple.push(check_simple(format!("open interval in edge {e}"), &interval_region(&ambient, e)?)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..random {
        match random_simple_region(&ambient, &mut rng) {
            Ok(region) => simple.push(check_simple(format!("random subtree {i}"), &region)?),
            Err(CohomologyError::NoEnds) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(SkeletonReport { genus, table, global_matches: table == theorem_table_global(genus), simple })
}

/// Random skeleton of genus `g`: a random tree plus `g` extra edges, which may
/// be loops or parallel edges.
pub fn random_skeleton(g: usize, seed: u64) -> SkeletonGraph {
    random_skeleton_with(g, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_skeleton_with<R: Rng>(g: usize, rng: &mut R) -> SkeletonGraph {
    let min = if g == 0 { 2 } else { 1 };
    let n = rng.gen_range(min..=6);
    let length = |rng: &mut R| Q::new(rng.gen_range(1..=8), rng.gen_range(1..=3));
    let mut edges = Vec::with_capacity(n - 1 + g);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.push(SkeletonEdge { ends: [u, v], length: length(rng) });
    }
    for _ in 0..g {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        edges.push(SkeletonEdge { ends: [a, b], length: length(rng) });
    }
    // relabel edges in random order
    for i in (1..edges.len()).rev() {
        let j = rng.gen_range(0..=i);
        edges.swap(i, j);
    }
    SkeletonGraph::new(n, edges).expect("connected by construction")
}
