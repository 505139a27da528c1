//! Ultrametric log-distance data for finite point configurations.
//!
//! A [`LogDistanceMatrix`] stores `log|a_i - a_j|` for points `a_1, ..., a_n`
//! of a non-archimedean field. Everything downstream (tree of discs, the
//! iterated maximum, modifications) is a function of these numbers only, so the
//! field elements themselves are never kept.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::value::{LogValue, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("matrix must have at least one point")]
    Empty,
    #[error("row {row} has length {len}, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("entry ({i},{j}) differs from ({j},{i})")]
    NotSymmetric { i: usize, j: usize },
    #[error("{0} labels given for {1} points")]
    LabelCount(usize, usize),
    #[error("ultrametric violations: {0:?}")]
    Ultrametric(Vec<UltrametricViolation>),
    #[error("diagonal entry ({0},{0}) must be -inf")]
    Diagonal(usize),
    #[error("off-diagonal entry ({0},{1}) is -inf: points must be distinct")]
    Coincident(usize, usize),
    #[error("{0} is not a prime")]
    NotPrime(i64),
    #[error("points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),
    #[error("invalid generator parameters: {0}")]
    Parameters(&'static str),
}

/// A failing instance of `L[i][j] <= max(L[i][k], L[k][j])` (0-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UltrametricViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
}

/// Outcome of [`validate_ultrametric`]: structural problems (shape, symmetry)
/// are returned as `Err`, metric problems are collected here.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub diagonal: Vec<usize>,
    pub coincident: Vec<(usize, usize)>,
    pub violations: Vec<UltrametricViolation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.diagonal.is_empty() && self.coincident.is_empty() && self.violations.is_empty()
    }
}

/// Symmetric matrix of `log|a_i - a_j|` with `-inf` on the diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogDistanceMatrix {
    entries: Vec<Vec<LogValue>>,
    labels: Vec<String>,
}

impl LogDistanceMatrix {
    /// Builds a matrix and checks every invariant.
    pub fn new(entries: Vec<Vec<LogValue>>, labels: Vec<String>) -> Result<Self, MatrixError> {
        let m = Self::from_rows_unchecked(entries, labels)?;
        let report = validate_ultrametric(&m)?;
        if let Some(&d) = report.diagonal.first() {
            return Err(MatrixError::Diagonal(d));
        }
        if let Some(&(i, j)) = report.coincident.first() {
            return Err(MatrixError::Coincident(i, j));
        }
        if !report.violations.is_empty() {
            return Err(MatrixError::Ultrametric(report.violations));
        }
        Ok(m)
    }

    /// Checks only shape, symmetry and label count.
    pub fn from_rows_unchecked(
        entries: Vec<Vec<LogValue>>,
        labels: Vec<String>,
    ) -> Result<Self, MatrixError> {
        check_structure(&entries, &labels)?;
        Ok(LogDistanceMatrix { entries, labels })
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> LogValue {
        self.entries[i][j]
    }

    /// Off-diagonal entry as a rational. Panics on the diagonal.
    pub fn dist(&self, i: usize, j: usize) -> Q {
        self.entries[i][j]
            .finite()
            .expect("off-diagonal entries are finite")
    }

    pub fn rows(&self) -> &[Vec<LogValue>] {
        &self.entries
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Largest off-diagonal entry (the diameter), `None` for a single point.
    pub fn diameter(&self) -> Option<Q> {
        let n = self.n();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| self.dist(i, j))
            .max()
    }

    /// Principal submatrix on `keep` (in the given order).
    pub fn restrict(&self, keep: &[usize]) -> Result<Self, MatrixError> {
        if keep.is_empty() {
            return Err(MatrixError::Empty);
        }
        let entries = keep
            .iter()
            .map(|&i| keep.iter().map(|&j| self.entries[i][j]).collect())
            .collect();
        let labels = if self.labels.is_empty() {
            Vec::new()
        } else {
            keep.iter().map(|&i| self.labels[i].clone()).collect()
        };
        LogDistanceMatrix::new(entries, labels)
    }

    /// Matrix with rows and columns reordered so that new index `t` is old index `perm[t]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, MatrixError> {
        self.restrict(perm)
    }

    /// Appends a point `b` with `log|b - a_i| = column[i]`, checking the
    /// result is still a valid ultrametric configuration.
    pub fn extended(&self, column: &[Q]) -> Result<Self, MatrixError> {
        let n = self.n();
        if column.len() != n {
            return Err(MatrixError::NotSquare { row: n, len: column.len(), n });
        }
        let mut entries = self.entries.clone();
        for (row, c) in entries.iter_mut().zip(column) {
            row.push(LogValue::Finite(*c));
        }
        let mut last: Vec<LogValue> = column.iter().copied().map(LogValue::Finite).collect();
        last.push(LogValue::NegInf);
        entries.push(last);
        let labels = if self.labels.is_empty() {
            Vec::new()
        } else {
            let mut l = self.labels.clone();
            l.push(format!("b{}", n + 1));
            l
        };
        LogDistanceMatrix::new(entries, labels)
    }
}

fn check_structure(entries: &[Vec<LogValue>], labels: &[String]) -> Result<(), MatrixError> {
    let n = entries.len();
    if n == 0 {
        return Err(MatrixError::Empty);
    }
    for (row, r) in entries.iter().enumerate() {
        if r.len() != n {
            return Err(MatrixError::NotSquare { row, len: r.len(), n });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if entries[i][j] != entries[j][i] {
                return Err(MatrixError::NotSymmetric { i, j });
            }
        }
    }
    if !labels.is_empty() && labels.len() != n {
        return Err(MatrixError::LabelCount(labels.len(), n));
    }
    Ok(())
}

/// Checks the matrix invariants, listing every violating ordered triple.
pub fn validate_ultrametric(m: &LogDistanceMatrix) -> Result<ValidationReport, MatrixError> {
    check_structure(&m.entries, &m.labels)?;
    let n = m.n();
    let mut report = ValidationReport::default();
    for i in 0..n {
        if m.entries[i][i] != LogValue::NegInf {
            report.diagonal.push(i);
        }
        for j in i + 1..n {
            if m.entries[i][j] == LogValue::NegInf {
                report.coincident.push((i, j));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let bound = m.entries[i][k].max(m.entries[k][j]);
                if m.entries[i][j] > bound {
                    report.violations.push(UltrametricViolation { i, j, k });
                }
            }
        }
    }
    Ok(report)
}

pub fn is_prime(p: i64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// `v_p(n)` for a nonzero integer.
fn int_valuation(mut n: i64, p: i64) -> i64 {
    debug_assert!(n != 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Exact p-adic valuation of a nonzero rational.
pub fn padic_valuation(x: &Q, p: i64) -> Option<i64> {
    if *x.numer() == 0 {
        return None;
    }
    Some(int_valuation(*x.numer(), p) - int_valuation(*x.denom(), p))
}

/// Log-distance matrix of rational points in `Q_p`, with `log|x| := -v_p(x)`.
pub fn from_padic_points(p: i64, points: &[Q]) -> Result<LogDistanceMatrix, MatrixError> {
    if !is_prime(p) {
        return Err(MatrixError::NotPrime(p));
    }
    if points.is_empty() {
        return Err(MatrixError::Empty);
    }
    let n = points.len();
    let mut entries = vec![vec![LogValue::NegInf; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = padic_valuation(&(points[i] - points[j]), p)
                .ok_or(MatrixError::DuplicatePoint(i, j))?;
            entries[i][j] = LogValue::int(-v);
            entries[j][i] = LogValue::int(-v);
        }
    }
    let labels = points.iter().map(crate::value::format_rational).collect();
    LogDistanceMatrix::new(entries, labels)
}

/// Bounds for [`random_ultrametric`]. Radii are multiples of `1/denominator`;
/// the root radius lies in `[top_min, top_max]` and every child cluster's
/// radius is smaller than its parent's by between one and `max_step` units.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UltrametricParams {
    pub top_min: i64,
    pub top_max: i64,
    pub denominator: i64,
    pub max_step: i64,
}

impl Default for UltrametricParams {
    fn default() -> Self {
        UltrametricParams { top_min: -2, top_max: 3, denominator: 2, max_step: 4 }
    }
}

/// Random ultrametric from a random rooted cluster tree with strictly
/// decreasing radii; `L[i][j]` is the radius of the smallest cluster holding both.
pub fn random_ultrametric(
    n: usize,
    seed: u64,
    params: UltrametricParams,
) -> Result<LogDistanceMatrix, MatrixError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_ultrametric_with(n, &mut rng, params)
}

pub fn random_ultrametric_with<R: Rng>(
    n: usize,
    rng: &mut R,
    params: UltrametricParams,
) -> Result<LogDistanceMatrix, MatrixError> {
    if n == 0 {
        return Err(MatrixError::Empty);
    }
    if params.denominator < 1 || params.max_step < 1 || params.top_min > params.top_max {
        return Err(MatrixError::Parameters("need denominator >= 1, max_step >= 1, top_min <= top_max"));
    }
    let mut entries = vec![vec![LogValue::NegInf; n]; n];
    let den = params.denominator;
    let top = Q::from_integer(rng.gen_range(params.top_min..=params.top_max));
    let mut order: Vec<usize> = (0..n).collect();
    // shuffle so that cluster membership is not tied to index order
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    let mut stack = vec![(order, top)];
    while let Some((members, radius)) = stack.pop() {
        if members.len() < 2 {
            continue;
        }
        let parts = rng.gen_range(2..=members.len().min(4));
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); parts];
        // first `parts` members seed the groups so none is empty
        for (t, &m) in members.iter().enumerate() {
            let g = if t < parts { t } else { rng.gen_range(0..parts) };
            groups[g].push(m);
        }
        for (a, ga) in groups.iter().enumerate() {
            for gb in groups.iter().skip(a + 1) {
                for &i in ga {
                    for &j in gb {
                        entries[i][j] = LogValue::Finite(radius);
                        entries[j][i] = LogValue::Finite(radius);
                    }
                }
            }
        }
        for g in groups {
            let step = Q::new(rng.gen_range(1..=params.max_step), den);
            stack.push((g, radius - step));
        }
    }
    LogDistanceMatrix::new(entries, Vec::new())
}
