//! Dense matrices over a [`Ring`], stored row-major with canonical entries.

use crate::error::CoreError;
use crate::ring::Ring;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat<R: Ring> {
    ring: R,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl<R: Ring> std::fmt::Debug for Mat<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "Mat {}x{} over {}",
            self.rows,
            self.cols,
            self.ring.name()
        )?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

impl<R: Ring> Mat<R> {
    pub fn zero(ring: R, rows: usize, cols: usize) -> Self {
        let data = vec![ring.zero(); rows * cols];
        Mat {
            ring,
            rows,
            cols,
            data,
        }
    }

    pub fn identity(ring: R, n: usize) -> Self {
        let mut m = Mat::zero(ring, n, n);
        for i in 0..n {
            let one = m.ring.one();
            m.set(i, i, one);
        }
        m
    }

    /// Builds a matrix from raw codes; entries must already be canonical.
    pub fn from_codes(ring: R, rows: usize, cols: usize, data: Vec<u64>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count mismatch");
        debug_assert!(data.iter().all(|&x| x < ring.card()));
        Mat {
            ring,
            rows,
            cols,
            data,
        }
    }

    /// Builds a matrix from integer entries, reducing them canonically.
    pub fn from_ints(ring: R, rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        let data = entries.iter().map(|&x| ring.encode(x)).collect();
        Mat {
            ring,
            rows,
            cols,
            data,
        }
    }

    /// A single matrix unit `E_{ij}` scaled by `value`.
    pub fn unit(ring: R, n: usize, i: usize, j: usize, value: u64) -> Self {
        let mut m = Mat::zero(ring, n, n);
        m.set(i, j, value);
        m
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        debug_assert!(v < self.ring.card());
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == self.ring.zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn assert_same_ring(&self, other: &Self) {
        assert_eq!(
            self.ring,
            other.ring,
            "ring mismatch: {} vs {}",
            self.ring.name(),
            other.ring.name()
        );
    }

    pub fn checked_same_ring(&self, other: &Self) -> Result<(), CoreError> {
        if self.ring != other.ring {
            return Err(CoreError::RingMismatch {
                left: self.ring.name(),
                right: other.ring.name(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_ring(other);
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.ring.add(a, b))
            .collect();
        Mat {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same_ring(other);
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.ring.sub(a, b))
            .collect();
        Mat {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, c: u64) -> Self {
        let data = self.data.iter().map(|&a| self.ring.mul(a, c)).collect();
        Mat {
            ring: self.ring.clone(),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_ring(other);
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let mut out = Mat::zero(self.ring.clone(), self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == self.ring.zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    let v = self.ring.add(cur, self.ring.mul(a, other.get(k, j)));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Matrix–vector product `self * v` (v as column).
    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![self.ring.zero(); self.rows];
        for i in 0..self.rows {
            let mut acc = self.ring.zero();
            for j in 0..self.cols {
                acc = self.ring.add(acc, self.ring.mul(self.get(i, j), v[j]));
            }
            out[i] = acc;
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Mat::zero(self.ring.clone(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Stacks `self` on top of `other` (same column count).
    pub fn vstack(&self, other: &Self) -> Self {
        self.assert_same_ring(other);
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat {
            ring: self.ring.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn from_rows(ring: R, cols: usize, rows: &[Vec<u64>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols);
            data.extend_from_slice(r);
        }
        Mat {
            ring,
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Flattens an `n x n` matrix into a single row of length `n^2`.
    pub fn flatten_row(&self) -> Vec<u64> {
        self.data.clone()
    }

    /// Inverse of [`Mat::flatten_row`].
    pub fn from_flat(ring: R, n: usize, flat: &[u64]) -> Self {
        assert_eq!(flat.len(), n * n);
        Mat::from_codes(ring, n, n, flat.to_vec())
    }

    /// Maps every entry through a ring change.
    pub fn map_ring<S: Ring>(&self, ring: S, f: impl Fn(u64) -> u64) -> Mat<S> {
        let data: Vec<u64> = self.data.iter().map(|&x| f(x)).collect();
        debug_assert!(data.iter().all(|&x| x < ring.card()));
        Mat {
            ring,
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Gauss–Jordan inverse; `None` when no unit pivot can be found, i.e.
    /// the matrix is singular over this ring.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let ring = self.ring.clone();
        let mut a = self.clone();
        let mut inv = Mat::identity(ring.clone(), n);
        for col in 0..n {
            let pivot = (col..n).find(|&i| ring.is_unit(a.get(i, col)))?;
            if pivot != col {
                for j in 0..n {
                    let (x, y) = (a.get(col, j), a.get(pivot, j));
                    a.set(col, j, y);
                    a.set(pivot, j, x);
                    let (x, y) = (inv.get(col, j), inv.get(pivot, j));
                    inv.set(col, j, y);
                    inv.set(pivot, j, x);
                }
            }
            let scale = ring.inv(a.get(col, col)).expect("pivot is a unit");
            for j in 0..n {
                a.set(col, j, ring.mul(a.get(col, j), scale));
                inv.set(col, j, ring.mul(inv.get(col, j), scale));
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a.get(i, col);
                if f == ring.zero() {
                    continue;
                }
                for j in 0..n {
                    let v = ring.sub(a.get(i, j), ring.mul(f, a.get(col, j)));
                    a.set(i, j, v);
                    let v = ring.sub(inv.get(i, j), ring.mul(f, inv.get(col, j)));
                    inv.set(i, j, v);
                }
            }
        }
        Some(inv)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Mat::identity(self.ring.clone(), self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

impl Mat<crate::ring::ModulusRing> {
    /// Reduces all entries into `Z/p^M'` for a lower precision `M'`.
    pub fn truncated(&self, precision: u32) -> Result<Self, CoreError> {
        let target = self.ring.truncated(precision)?;
        let m = target.modulus();
        Ok(self.map_ring(target, |x| x % m))
    }
}
