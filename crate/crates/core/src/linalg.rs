//! Small dense complex matrices and a cyclic Jacobi eigensolver for Hermitian
//! input.
//!
//! Matrices are row-major. Everything here is sized for `d <= 2^MAX_QUBITS`
//! and favours determinism over speed: the same input always yields the same
//! bits, which the sweep reductions rely on.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::math;
use crate::{Error, Result};

pub use num_complex::Complex64 as C64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// `i^k` for `k` taken mod 4.
#[inline]
pub fn i_pow(k: u8) -> C64 {
    match k & 3 {
        0 => ONE,
        1 => I,
        2 => -ONE,
        _ => -I,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Parse(alloc::format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Stacks equally sized vectors as columns.
    pub fn from_columns(columns: &[Vec<C64>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols, |r, c| columns[c][r])
    }

    /// `|v><v|`.
    pub fn outer(v: &[C64]) -> Self {
        let d = v.len();
        Self::from_fn(d, d, |r, c| v[r] * v[c].conj())
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<C64>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for (k, &a) in row.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let src = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in dst.iter_mut().zip(src) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "mul_vec shape mismatch");
        (0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: C64) -> Self {
        let data = self.data.iter().map(|a| a * s).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(C64::norm_sqr).sum())
    }

    /// `||self - other||_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        math::sqrt(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum())
    }

    /// `||A - A^dagger||_F`.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut acc = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                acc += (self[(r, c)] - self[(c, r)].conj()).norm_sqr();
            }
        }
        math::sqrt(acc)
    }

    /// `||A^dagger A - I||_F`.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint().matmul(self).distance(&Self::identity(self.rows))
    }

    /// `||AB - BA||_F`.
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        self.matmul(other).distance(&other.matmul(self))
    }

    /// `M^k` by repeated squaring.
    pub fn pow(&self, mut k: usize) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.matmul(&base);
            }
            base = base.matmul(&base);
            k >>= 1;
        }
        acc
    }

    /// Largest modulus of an off-diagonal entry.
    pub fn max_offdiag(&self) -> f64 {
        let mut m: f64 = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                if r != c {
                    m = m.max(self[(r, c)].norm());
                }
            }
        }
        m
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    math::sqrt(v.iter().map(C64::norm_sqr).sum())
}

/// Normalizes in place, returning the previous norm.
pub fn normalize(v: &mut [C64]) -> f64 {
    let n = norm(v);
    if n > 0.0 {
        let inv = 1.0 / n;
        for x in v.iter_mut() {
            *x *= inv;
        }
    }
    n
}

/// Rotates the global phase so the largest-magnitude entry is real and
/// positive. Ties (within 1e-9) go to the lowest index.
pub fn fix_phase(v: &mut [C64]) {
    let max = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let Some(pivot) = v.iter().position(|x| x.norm() >= max - 1e-9) else {
        return;
    };
    let phase = v[pivot].conj() / v[pivot].norm();
    for x in v.iter_mut() {
        *x *= phase;
    }
    v[pivot] = C64::new(v[pivot].re, 0.0);
}

/// Eigen-decomposition of a Hermitian matrix: values ascending, vectors as
/// the matching columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi diagonalization. Only the Hermitian part of the input is
/// used; callers that care should check `hermiticity_residual` first.
pub fn eigh(m: &CMatrix) -> HermitianEigen {
    let (values, vectors) = jacobi(m, true);
    let vectors = vectors.unwrap_or_else(|| CMatrix::identity(m.rows()));
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = CMatrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    HermitianEigen { values: sorted_values, vectors: sorted_vectors }
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    let (mut values, _) = jacobi(m, false);
    values.sort_by(f64::total_cmp);
    values
}

/// Largest eigenvalue only.
pub fn max_eigenvalue(m: &CMatrix) -> f64 {
    let (values, _) = jacobi(m, false);
    values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn jacobi(m: &CMatrix, want_vectors: bool) -> (Vec<f64>, Option<CMatrix>) {
    assert!(m.is_square(), "eigh needs a square matrix");
    let n = m.rows();
    // Work on the Hermitian part.
    let mut a = CMatrix::from_fn(n, n, |r, c| (m[(r, c)] + m[(c, r)].conj()) * 0.5);
    let mut v = want_vectors.then(|| CMatrix::identity(n));
    let total: f64 = a.data.iter().map(C64::norm_sqr).sum();
    let threshold = total * 1e-32;

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off <= threshold || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 || r * r <= threshold * 1e-4 {
                    continue;
                }
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + math::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + math::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = t * c;
                // G restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
                let g_qp = -phase.conj() * s;
                let g_qq = phase.conj() * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c + akq * g_qp;
                    a[(k, q)] = akp * s + akq * g_qq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c + aqk * g_qp.conj();
                    a[(q, k)] = apk * s + aqk * g_qq.conj();
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c + vkq * g_qp;
                        v[(k, q)] = vkp * s + vkq * g_qq;
                    }
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)].re).collect(), v)
}
