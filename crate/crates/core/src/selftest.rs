//! Deterministic randomized checks of the structural statements, one runner
//! per acceptance criterion. Every case derives its own RNG from the seed and
//! its index, so results do not depend on the number of worker threads.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cohomology::{
    cohomology_table, cohomology_table_trimmed, core_graph, euler_check, interval_region, pd_check, preimage_region,
    random_region, random_simple_region, Ambient, CohomologyError, Region,
};
use crate::curve::{ExtendedPoint, TropicalCurve};
use crate::mumford::{random_skeleton_with, theorem_table_global, theorem_table_simple};
use crate::tropicalize::{
    incremental_steps, modify, tropicalize_direct, tropicalize_incremental, TropicalPolynomial,
};
use crate::valuation::{random_ultrametric_with, LogDistanceMatrix, UltrametricParams};
use crate::value::Q;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelftestConfig {
    pub seed: u64,
    /// Base case count; criteria 3 and 4 run this many matrices, the others
    /// scale from it.
    pub cases: usize,
    pub jobs: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig { seed: 2024, cases: 200, jobs: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub detail: String,
}

impl CriterionResult {
    fn from_failures(id: u32, name: &'static str, cases: usize, failures: Vec<String>) -> Self {
        let detail = if failures.is_empty() {
            format!("{cases} cases")
        } else {
            let shown: Vec<&str> = failures.iter().take(5).map(String::as_str).collect();
            format!("{} of {cases} cases failed: {}", failures.len(), shown.join("; "))
        };
        CriterionResult { id, name, passed: failures.is_empty(), cases, detail }
    }
}

fn case_rng(seed: u64, criterion: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(criterion << 32 | index);
    rng
}

/// Runs `cases` independent checks on `jobs` threads; returns failure messages
/// in case order.
fn run_cases<F>(cfg: &SelftestConfig, criterion: u64, cases: usize, check: F) -> Vec<String>
where
    F: Fn(usize, &mut ChaCha8Rng) -> Result<(), String> + Sync,
{
    let body = || {
        (0..cases)
            .into_par_iter()
            .filter_map(|i| {
                let mut rng = case_rng(cfg.seed, criterion, i as u64);
                check(i, &mut rng).err().map(|e| format!("case {i}: {e}"))
            })
            .collect::<Vec<_>>()
    };
    match rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs.max(1)).build() {
        Ok(pool) => pool.install(body),
        Err(_) => body(),
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

pub fn random_matrix<R: Rng>(rng: &mut R, max_n: usize) -> LogDistanceMatrix {
    let n = rng.gen_range(1..=max_n);
    random_ultrametric_with(n, rng, UltrametricParams::default()).expect("valid parameters")
}

/// Random tropicalization with `2..=max_n` points.
pub fn random_tropicalization<R: Rng>(rng: &mut R, max_n: usize) -> TropicalCurve {
    let n = rng.gen_range(2..=max_n);
    let m = random_ultrametric_with(n, rng, UltrametricParams::default()).expect("valid parameters");
    tropicalize_direct(&m).expect("valid matrix")
}

/// Random smooth ambient: a tropicalization (possibly subdivided) or a skeleton.
fn random_smooth_ambient<R: Rng>(rng: &mut R) -> Ambient {
    if rng.gen_bool(0.5) {
        let curve = random_tropicalization(rng, 6);
        Ambient::Embedded(curve.subdivide_all(rng.gen_range(1..=2)))
    } else {
        let g = rng.gen_range(0..=3);
        let s = random_skeleton_with(g, rng);
        Ambient::Abstract(s.to_abstract(rng.gen_range(2..=3)).expect("valid skeleton"))
    }
}

fn random_any_region<R: Rng>(ambient: &Ambient, rng: &mut R) -> Result<Region, String> {
    match rng.gen_range(0..4) {
        0 => Region::whole(ambient.clone()).map_err(err),
        1 => loop {
            match random_simple_region(ambient, rng) {
                Err(CohomologyError::NoEnds) => continue,
                other => break other.map_err(err),
            }
        },
        2 => interval_region(ambient, rng.gen_range(0..ambient.edge_count())).map_err(err),
        _ => random_region(ambient, rng).map_err(err),
    }
}

fn random_polynomial<R: Rng>(rng: &mut R, r: usize) -> TropicalPolynomial {
    let terms = (0..rng.gen_range(1..=3))
        .map(|_| {
            let m = (0..r).map(|_| rng.gen_range(0..=2)).collect();
            (m, Q::new(rng.gen_range(-6..=6), 2))
        })
        .collect();
    TropicalPolynomial { terms }
}

const GENERA: [usize; 5] = [0, 1, 2, 3, 5];

/// Whole-skeleton tables against `[[1, g], [g, 1]]`.
pub fn criterion_1(cfg: &SelftestConfig) -> CriterionResult {
    let per_genus = 20;
    let failures = run_cases(cfg, 1, GENERA.len() * per_genus, |i, rng| {
        let g = GENERA[i / per_genus];
        let s = random_skeleton_with(g, rng);
        let t = cohomology_table(&Region::whole(s.ambient().map_err(err)?).map_err(err)?).map_err(err)?;
        if t != theorem_table_global(g) {
            return Err(format!("genus {g}: got h = {:?}, hc = {:?}", t.h, t.hc));
        }
        Ok(())
    });
    CriterionResult::from_failures(1, "global table of Mumford curve skeletons", GENERA.len() * per_genus, failures)
}

/// Strictly simple regions with `k = 1..=6` ends on skeletons and on
/// tropicalizations against the table in `k`.
pub fn criterion_2(cfg: &SelftestConfig) -> CriterionResult {
    let wanted = 5;
    let budget = 400;
    let mut failures = Vec::new();
    let mut total = 0;
    for (source, criterion) in [("skeleton", 20u64), ("tropicalization", 21)] {
        let per_case: Vec<Result<BTreeMap<usize, usize>, String>> = run_cases_collect(cfg, criterion, budget, |rng| {
            let ambient = if source == "skeleton" {
                let g = rng.gen_range(0..=4);
                random_skeleton_with(g, rng).ambient().map_err(err)?
            } else {
                Ambient::Embedded(random_tropicalization(rng, 8))
            };
            let mut hits = BTreeMap::new();
            for _ in 0..4 {
                let region = match random_simple_region(&ambient, rng) {
                    Err(CohomologyError::NoEnds) => continue,
                    other => other.map_err(err)?,
                };
                let k = region.end_count();
                let t = cohomology_table(&region).map_err(err)?;
                if Some(t) != theorem_table_simple(k).ok() {
                    return Err(format!("k = {k}: got h = {:?}, hc = {:?}", t.h, t.hc));
                }
                *hits.entry(k).or_insert(0) += 1;
            }
            Ok(hits)
        });
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for (i, r) in per_case.into_iter().enumerate() {
            match r {
                Ok(hits) => {
                    for (k, c) in hits {
                        *counts.entry(k).or_insert(0) += c;
                    }
                }
                Err(e) => failures.push(format!("{source} case {i}: {e}")),
            }
        }
        for k in 1..=6 {
            let c = counts.get(&k).copied().unwrap_or(0);
            total += c;
            if c < wanted {
                failures.push(format!("{source}: only {c} regions with k = {k}"));
            }
        }
    }
    CriterionResult::from_failures(2, "table of strictly simple regions", total, failures)
}

fn run_cases_collect<T, F>(cfg: &SelftestConfig, criterion: u64, cases: usize, f: F) -> Vec<Result<T, String>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<T, String> + Sync,
{
    let body = || {
        (0..cases)
            .into_par_iter()
            .map(|i| f(&mut case_rng(cfg.seed, criterion, i as u64)))
            .collect::<Vec<_>>()
    };
    match rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs.max(1)).build() {
        Ok(pool) => pool.install(body),
        Err(_) => body(),
    }
}

/// Direct and incremental tropicalizations agree.
pub fn criterion_3(cfg: &SelftestConfig) -> CriterionResult {
    let failures = run_cases(cfg, 3, cfg.cases, |_, rng| {
        let m = random_matrix(rng, 8);
        let direct = tropicalize_direct(&m).map_err(err)?;
        let incremental = tropicalize_incremental(&m).map_err(err)?;
        if direct != incremental {
            return Err(format!("n = {}: constructions differ", m.n()));
        }
        Ok(())
    });
    CriterionResult::from_failures(3, "direct and incremental tropicalizations agree", cfg.cases, failures)
}

/// Balancing, smoothness and unit weights of both constructions.
pub fn criterion_4(cfg: &SelftestConfig) -> CriterionResult {
    let failures = run_cases(cfg, 3, cfg.cases, |_, rng| {
        let m = random_matrix(rng, 8);
        for (name, c) in [("direct", tropicalize_direct(&m)), ("incremental", tropicalize_incremental(&m))] {
            let c = c.map_err(err)?;
            if !c.check_balancing().is_balanced() {
                return Err(format!("{name} curve is not balanced"));
            }
            if !c.is_smooth() {
                return Err(format!("{name} curve is not smooth: {:?}", c.check_smooth().witnesses));
            }
            if c.edges().iter().any(|e| e.weight != 1) {
                return Err(format!("{name} curve has an edge of weight != 1"));
            }
        }
        Ok(())
    });
    CriterionResult::from_failures(4, "tropicalizations are balanced, smooth, of weight 1", cfg.cases, failures)
}

fn compare_preimages<R: Rng>(map: &crate::tropicalize::ModificationMap, rng: &mut R, regions: usize) -> Result<(), String> {
    let base = Ambient::Embedded(map.base.clone());
    for i in 0..=regions {
        let region = if i == 0 { Region::whole(base.clone()) } else { random_region(&base, rng) }.map_err(err)?;
        let pre = preimage_region(map, &region).map_err(err)?;
        let (a, b) = (cohomology_table(&region).map_err(err)?, cohomology_table(&pre).map_err(err)?);
        if a != b {
            return Err(format!("region {:?}: {a:?} before, {b:?} after", region.vertices()));
        }
    }
    Ok(())
}

/// Tables of regions agree with those of their preimages under modifications.
pub fn criterion_5(cfg: &SelftestConfig) -> CriterionResult {
    let half = cfg.cases.div_ceil(2);
    let mut failures = run_cases(cfg, 50, half, |_, rng| {
        let mut curve = random_tropicalization(rng, 6);
        if rng.gen_bool(0.1) {
            curve = TropicalCurve::line();
        }
        let target = curve.clone();
        if curve.r() == 1 {
            curve = curve.split_at_point(0, &ExtendedPoint::ints(&[0])).map_err(err)?.0;
        }
        let p = random_polynomial(rng, curve.r()).restrict_to(&curve).map_err(err)?;
        let map = modify(&target, &p).map_err(err)?;
        compare_preimages(&map, rng, 3)
    });
    failures.extend(run_cases(cfg, 51, half, |_, rng| {
        let n = rng.gen_range(2..=8);
        let m = random_ultrametric_with(n, rng, UltrametricParams::default()).map_err(err)?;
        let steps = incremental_steps(&m).map_err(err)?;
        let step = &steps[rng.gen_range(0..steps.len())];
        compare_preimages(step, rng, 3)
    }));
    CriterionResult::from_failures(5, "modifications preserve cohomology", 2 * half, failures)
}

/// Duality on random regions of smooth curves and skeletons.
pub fn criterion_6(cfg: &SelftestConfig) -> CriterionResult {
    let cases = cfg.cases.div_ceil(2);
    let failures = run_cases(cfg, 6, cases, |_, rng| {
        let ambient = random_smooth_ambient(rng);
        let region = random_any_region(&ambient, rng)?;
        if !region.in_validated_envelope() {
            return Err("generated region is not smooth".into());
        }
        let t = cohomology_table(&region).map_err(err)?;
        let (ok, bad) = pd_check(&t);
        if !ok {
            return Err(format!("duality fails at {bad:?}: {t:?}"));
        }
        Ok(())
    });
    CriterionResult::from_failures(6, "Poincare duality on smooth regions", cases, failures)
}

fn betti_numbers(region: &Region) -> (usize, usize) {
    let core = core_graph(region, Q::new(1, 2));
    let mut parent: Vec<usize> = (0..core.vertices.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    let mut components = core.vertices.len();
    for &(_, a, b) in &core.edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            components -= 1;
        }
    }
    (components, core.edges.len() + components - core.vertices.len())
}

/// Orientation, subdivision and trim-point invariance, Euler characteristic,
/// `p = 0` row against graph homology, embedded/abstract agreement and
/// idempotence of canonical forms.
pub fn criterion_7(cfg: &SelftestConfig) -> CriterionResult {
    let cases = cfg.cases.div_ceil(2).max(100);
    let mut failures = run_cases(cfg, 7, cases, |_, rng| {
        let ambient = random_smooth_ambient(rng);
        let region = random_any_region(&ambient, rng)?;
        let t = cohomology_table(&region).map_err(err)?;

        let mut reoriented = region.clone();
        for e in 0..reoriented.ambient().edge_count() {
            if reoriented.ambient().ends(e).1.is_some() && rng.gen_bool(0.5) {
                reoriented = reoriented.reverse_edge(e).map_err(err)?;
            }
        }
        if cohomology_table(&reoriented).map_err(err)? != t {
            return Err("orientation changes the table".into());
        }

        let e = rng.gen_range(0..region.ambient().edge_count());
        if cohomology_table(&region.subdivide_edge(e).map_err(err)?).map_err(err)? != t {
            return Err(format!("subdividing edge {e} changes the table"));
        }

        for param in [Q::new(1, 3), Q::new(7, 8)] {
            if cohomology_table_trimmed(&region, param).map_err(err)? != t {
                return Err(format!("trim parameter {param} changes the table"));
            }
        }

        if !euler_check(&region).map_err(err)? {
            return Err("Euler characteristic mismatch".into());
        }

        let (b0, b1) = betti_numbers(&region);
        if t.h[0] != [b0, b1] {
            return Err(format!("p = 0 row {:?} but graph homology ({b0}, {b1})", t.h[0]));
        }

        if let Ambient::Embedded(_) = region.ambient() {
            if cohomology_table(&region.to_abstract()).map_err(err)? != t {
                return Err("embedded and abstract tables differ".into());
            }
        }
        Ok(())
    });
    failures.extend(run_cases(cfg, 70, cases, |_, rng| {
        let curve = random_tropicalization(rng, 6);
        let mut messy = curve.subdivide_all(rng.gen_range(1..=3));
        for e in 0..messy.edges().len() {
            if !messy.edge(e).is_free() && rng.gen_bool(0.5) {
                messy = messy.reverse_edge(e).map_err(err)?;
            }
        }
        let once = messy.canonicalize();
        if once.canonicalize() != once {
            return Err("canonicalize is not idempotent".into());
        }
        if once != curve {
            return Err("subdivision and reorientation change the canonical form".into());
        }
        Ok(())
    }));
    CriterionResult::from_failures(7, "invariance properties of the cellular model", 2 * cases, failures)
}

pub fn run_all(cfg: &SelftestConfig) -> Vec<CriterionResult> {
    vec![
        criterion_1(cfg),
        criterion_2(cfg),
        criterion_3(cfg),
        criterion_4(cfg),
        criterion_5(cfg),
        criterion_6(cfg),
        criterion_7(cfg),
    ]
}
