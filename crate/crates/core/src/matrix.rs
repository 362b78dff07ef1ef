//! Dense integer matrices for adjacency and transition matrices.

use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn ones(n: usize) -> Self {
        IntMatrix {
            rows: n,
            cols: n,
            data: vec![1; n * n],
        }
    }

    /// Panics if the rows have different lengths.
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    /// Panics on a shape mismatch.
    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0 {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn row_sums(&self) -> Vec<i64> {
        (0..self.rows).map(|r| self.row(r).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<i64> {
        let mut s = vec![0; self.cols];
        for r in 0..self.rows {
            for (acc, &x) in s.iter_mut().zip(self.row(r)) {
                *acc += x;
            }
        }
        s
    }

    /// `Some(d)` if every row and column sums to `d`.
    pub fn regular_degree(&self) -> Option<i64> {
        let rs = self.row_sums();
        let d = *rs.first()?;
        (rs.iter().all(|&x| x == d) && self.col_sums().iter().all(|&x| x == d)).then_some(d)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|r| (0..r).all(|c| self[(r, c)] == self[(c, r)]))
    }

    pub fn trace(&self) -> i64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn entries(&self) -> &[i64] {
        &self.data
    }

    pub fn same_support(&self, other: &IntMatrix) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(&a, &b)| (a != 0) == (b != 0))
    }

    /// Nonzero entries as `(row, col, value)`, row-major.
    pub fn coo(&self) -> Vec<(usize, usize, i64)> {
        let mut out = Vec::new();
        for r in 0..self.rows {
            for (c, &x) in self.row(r).iter().enumerate() {
                if x != 0 {
                    out.push((r, c, x));
                }
            }
        }
        out
    }

    pub fn from_coo(rows: usize, cols: usize, triples: &[(usize, usize, i64)]) -> Option<Self> {
        let mut m = Self::zeros(rows, cols);
        for &(r, c, x) in triples {
            if r >= rows || c >= cols {
                return None;
            }
            m[(r, c)] += x;
        }
        Some(m)
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |r, c| self[(r, c)] as f64)
    }

    pub fn to_bigint(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> i64 {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|x| x.abs()).sum())
            .max()
            .unwrap_or(0)
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;

    fn index(&self, (r, c): (usize, usize)) -> &i64 {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut i64 {
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_and_sums() {
        let a = IntMatrix::from_rows(&[vec![1, 2], vec![3, 4]]);
        let b = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(a.mul(&b), IntMatrix::from_rows(&[vec![2, 1], vec![4, 3]]));
        assert_eq!(a.transpose()[(0, 1)], 3);
        assert_eq!(a.trace(), 5);
        assert_eq!(b.regular_degree(), Some(1));
        assert_eq!(a.regular_degree(), None);
        assert!(b.is_symmetric() && !a.is_symmetric());
        assert_eq!(IntMatrix::from_coo(2, 2, &a.coo()).unwrap(), a);
        assert_eq!(a.norm_inf(), 7);
    }
}
