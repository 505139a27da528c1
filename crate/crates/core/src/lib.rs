//! Tropicalizations of linear embeddings of the affine line over
//! non-archimedean data, tropical modifications, and cellular computations of
//! the Dolbeault cohomology dimensions `h^{p,q}` and `h^{p,q}_c` of open
//! regions of tropical curves and Mumford curve skeletons.
//!
//! All arithmetic is exact: log values are rationals or `-inf`, ranks are
//! computed by fraction-free elimination.

pub mod cohomology;
pub mod curve;
pub mod io;
pub mod linalg;
pub mod mumford;
pub mod selftest;
pub mod tropicalize;
pub mod valuation;
pub mod value;

pub use cohomology::{
    build_complex, cohomology_table, euler_check, pd_check, AbstractEdge, AbstractGraph, Ambient, CohomologyError,
    CohomologyTable, Region, SheafComplex, Support,
};
pub use curve::{Edge, EdgeHead, EdgeId, ExtendedPoint, Length, TropicalCurve, VertexId};
pub use mumford::{theorem_table_global, theorem_table_simple, SkeletonEdge, SkeletonGraph};
pub use tropicalize::{
    eval_p, modify, project_transition, tropicalize_direct, tropicalize_incremental, IteratedMaximum,
    ModificationMap, PiecewiseAffineFunction, TropicalPolynomial,
};
pub use valuation::{from_padic_points, random_ultrametric, validate_ultrametric, LogDistanceMatrix};
pub use value::{LogValue, Q};
