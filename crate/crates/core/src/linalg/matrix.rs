use std::fmt;

use serde::{Deserialize, Serialize};

use super::vector::{add_mod, dot_slices, inv_mod, mul_mod, sub_mod, GVector};

/// Dense row-major matrix over `F_p`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Matrix {
    p: u8,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl Matrix {
    pub fn zeros(p: u8, rows: usize, cols: usize) -> Self {
        Self {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u8, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from row-major residues; entries are reduced mod `p`.
    pub fn from_rows(p: u8, rows: &[Vec<u32>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix rows");
        let data = rows
            .iter()
            .flatten()
            .map(|&v| (v % p as u32) as u8)
            .collect();
        Self {
            p,
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub(crate) fn from_raw(p: u8, rows: usize, cols: usize, data: Vec<u8>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self {
            p,
            rows,
            cols,
            data,
        }
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.p, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &GVector) -> GVector {
        assert_eq!(v.n(), self.cols, "matrix/vector shape mismatch");
        let coords = (0..self.rows)
            .map(|r| dot_slices(self.row(r), v.coords(), self.p))
            .collect();
        GVector::from_raw(self.p, coords)
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch");
        let t = other.transpose();
        let mut out = Matrix::zeros(self.p, self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                out.data[r * other.cols + c] = dot_slices(self.row(r), t.row(c), self.p);
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let p = self.p;
        Matrix {
            p,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| add_mod(a, b, p))
                .collect(),
        }
    }

    pub fn scale(&self, s: u8) -> Matrix {
        let p = self.p;
        Matrix {
            p,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| mul_mod(a, s % p, p)).collect(),
        }
    }

    /// Row-reduces in place to reduced row-echelon form and returns the
    /// pivot column of each nonzero row. Zero rows end up at the bottom.
    pub fn rref(&mut self) -> Vec<usize> {
        self.rref_limited(self.cols)
    }

    /// Like [`Matrix::rref`], but only columns `< limit` may hold pivots.
    /// Used for augmented systems where the right-hand side must not pivot.
    pub fn rref_limited(&mut self, limit: usize) -> Vec<usize> {
        let (p, cols) = (self.p, self.cols);
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..limit.min(cols) {
            if row == self.rows {
                break;
            }
            let Some(found) = (row..self.rows).find(|&r| self.data[r * cols + col] != 0) else {
                continue;
            };
            if found != row {
                for c in 0..cols {
                    self.data.swap(found * cols + c, row * cols + c);
                }
            }
            let inv = inv_mod(self.data[row * cols + col], p);
            for c in col..cols {
                let v = &mut self.data[row * cols + c];
                *v = mul_mod(*v, inv, p);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.data[r * cols + col];
                if factor == 0 {
                    continue;
                }
                for c in col..cols {
                    let sub = mul_mod(factor, self.data[row * cols + c], p);
                    let v = &mut self.data[r * cols + c];
                    *v = sub_mod(*v, sub, p);
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

    /// Solves `self · X = rhs` with free variables fixed to zero, or `None`
    /// when the system is inconsistent.
    pub fn solve(&self, rhs: &Matrix) -> Option<Matrix> {
        assert_eq!(self.rows, rhs.rows, "system shape mismatch");
        let (n, k) = (self.cols, rhs.cols);
        let width = n + k;
        let mut aug = Matrix::zeros(self.p, self.rows, width);
        for r in 0..self.rows {
            aug.data[r * width..r * width + n].copy_from_slice(self.row(r));
            aug.data[r * width + n..(r + 1) * width].copy_from_slice(rhs.row(r));
        }
        let pivots = aug.rref_limited(n);
        // Rows below the pivots have a zero left block; any nonzero right
        // entry there is a contradiction.
        for r in pivots.len()..self.rows {
            if aug.data[r * width + n..(r + 1) * width].iter().any(|&v| v != 0) {
                return None;
            }
        }
        let mut x = Matrix::zeros(self.p, n, k);
        for (r, &pc) in pivots.iter().enumerate() {
            x.data[pc * k..(pc + 1) * k].copy_from_slice(&aug.data[r * width + n..(r + 1) * width]);
        }
        Some(x)
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for (i, v) in self.row(r).iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{v}")?;
            }
        }
        write!(f, "]")
    }
}
