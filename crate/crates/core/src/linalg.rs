//! Exact rational linear algebra: row reduction, rank, nullspace.

use num_traits::{One, Zero};

use crate::polyalg::Rational;

/// Dense row-major rational matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`, padded with zeros
    /// to `rows` entries.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col.iter().enumerate().take(rows) {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self[(r, col)].is_zero()) else {
                continue;
            };
            self.swap_rows(row, p);
            let inv = Rational::one() / self[(row, col)].clone();
            for c in col..self.cols {
                self[(row, c)] = self[(row, c)].clone() * inv.clone();
            }
            for r in 0..self.rows {
                if r == row || self[(r, col)].is_zero() {
                    continue;
                }
                let factor = self[(r, col)].clone();
                for c in col..self.cols {
                    let delta = factor.clone() * self[(row, c)].clone();
                    self[(r, c)] = self[(r, c)].clone() - delta;
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right nullspace `{v : A v = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -m[(r, f)].clone();
                }
                v
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (r, c): (usize, usize)) -> &Rational {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rational {
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::int;

    #[test]
    fn nullspace_of_rank_one() {
        let m = RatMatrix::from_columns(2, &[vec![int(1), int(2)], vec![int(2), int(4)], vec![int(0), int(0)]]);
        assert_eq!(m.rank(), 1);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in ns {
            for r in 0..2 {
                let s = (0..3).fold(int(0), |acc, c| acc + m[(r, c)].clone() * v[c].clone());
                assert!(s.is_zero());
            }
        }
    }

    #[test]
    fn full_rank_has_trivial_nullspace() {
        let m = RatMatrix::from_columns(2, &[vec![int(1), int(0)], vec![int(1), int(1)]]);
        assert_eq!(m.rank(), 2);
        assert!(m.nullspace().is_empty());
        assert_eq!(RatMatrix::zeros(0, 3).nullspace().len(), 3);
    }
}
