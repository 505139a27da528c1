//! Exact linear algebra over the rationals.
//!
//! Ranks are computed with fraction-free (Bareiss) elimination on integer
//! matrices obtained by clearing row denominators; no floating point is used.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Dense matrix over the rationals, stored row by row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &BigRational) {
        let cell = &mut self.data[r * self.cols + c];
        *cell += v;
    }

    pub fn row(&self, r: usize) -> &[BigRational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Row with denominators cleared (scaling a row does not change rank).
    fn integer_row(&self, r: usize) -> Vec<BigInt> {
        let row = self.row(r);
        let lcm = row
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        row.iter()
            .map(|x| x.numer() * (&lcm / x.denom()))
            .collect()
    }

    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<BigInt>> = (0..self.rows).map(|r| self.integer_row(r)).collect();
        bareiss_rank(rows, self.cols)
    }
}

/// Rank of an integer matrix by fraction-free Gaussian elimination.
pub fn bareiss_rank(mut m: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let nrows = m.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    for col in 0..cols {
        if rank == nrows {
            break;
        }
        let Some(pivot) = (rank..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in rank + 1..nrows {
            for c in col + 1..cols {
                let v = (&m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c]) / &prev;
                m[r][c] = v;
            }
            m[r][col] = BigInt::zero();
        }
        prev = m[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Rank of a family of integer vectors (all of the same length).
pub fn int_rank(vectors: &[Vec<i64>]) -> usize {
    let Some(first) = vectors.first() else {
        return 0;
    };
    let cols = first.len();
    let m = vectors
        .iter()
        .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    bareiss_rank(m, cols)
}

/// Greedily picks a maximal linearly independent subfamily, returning indices.
pub fn independent_subset(vectors: &[Vec<i64>]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut family: Vec<Vec<i64>> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        family.push(v.clone());
        if int_rank(&family) == family.len() {
            chosen.push(i);
        } else {
            family.pop();
        }
    }
    chosen
}

/// Coefficients `c` with `sum c_i basis_i = v`, or `None` if `v` is outside
/// the span. `basis` must be linearly independent.
pub fn coordinates_in_basis(basis: &[Vec<i64>], v: &[i64]) -> Option<Vec<BigRational>> {
    let k = basis.len();
    let n = v.len();
    // augmented n x (k+1) system: columns are basis vectors, last column is v
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|r| {
            let mut row: Vec<BigRational> =
                basis.iter().map(|b| BigRational::from_integer(b[r].into())).collect();
            row.push(BigRational::from_integer(v[r].into()));
            row
        })
        .collect();
    let mut pivots = Vec::with_capacity(k);
    let mut row = 0;
    for col in 0..k {
        let p = (row..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(row, p);
        let inv = a[row][col].recip();
        for c in col..=k {
            let x = &a[row][c] * &inv;
            a[row][c] = x;
        }
        for r in 0..n {
            if r != row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=k {
                    let x = &a[row][c] * &f;
                    a[r][c] -= x;
                }
            }
        }
        pivots.push(row);
        row += 1;
    }
    if (row..n).any(|r| !a[r][k].is_zero()) {
        return None;
    }
    Some(pivots.iter().map(|&r| a[r][k].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(q: i64) -> BigRational {
        BigRational::from_integer(q.into())
    }

    #[test]
    fn ranks_of_small_families() {
        assert_eq!(int_rank(&[vec![1, 1], vec![-1, 0], vec![0, -1]]), 2);
        assert_eq!(int_rank(&[vec![1, 0], vec![-1, 0]]), 1);
        assert_eq!(int_rank(&[vec![0, 0, 0]]), 0);
        assert_eq!(int_rank(&[]), 0);
        assert_eq!(int_rank(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]), 2);
    }

    #[test]
    fn rational_matrix_rank_ignores_row_scaling() {
        let mut m = RationalMatrix::zeros(2, 2);
        m.add_to(0, 0, &BigRational::new(1.into(), 3.into()));
        m.add_to(0, 1, &BigRational::new(2.into(), 3.into()));
        m.add_to(1, 0, &big(1));
        m.add_to(1, 1, &big(2));
        assert_eq!(m.rank(), 1);
        m.add_to(1, 1, &big(1));
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn basis_coordinates() {
        let basis = vec![vec![1, 0, 1], vec![0, 1, 0]];
        let c = coordinates_in_basis(&basis, &[-1, -1, -1]).unwrap();
        assert_eq!(c, vec![big(-1), big(-1)]);
        assert!(coordinates_in_basis(&basis, &[1, 0, 0]).is_none());
        assert_eq!(independent_subset(&[vec![1, 0], vec![2, 0], vec![0, 1]]), vec![0, 2]);
    }

    #[test]
    fn bareiss_matches_hand_elimination() {
        // rows e1, e2, -(e1+e2) plus a trim column: full rank 3
        let m = vec![
            vec![BigInt::from(-1), BigInt::from(0), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(-1), BigInt::from(0)],
            vec![BigInt::from(1), BigInt::from(1), BigInt::from(1)],
        ];
        assert_eq!(bareiss_rank(m, 3), 3);
    }
}
