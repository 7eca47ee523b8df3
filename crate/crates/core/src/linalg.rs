//! Dense matrices over a prime field F_p.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Returns `p` if it is a prime below 2^31.
pub fn check_prime(p: u64) -> Result<u32> {
    if p < 2 || p >= 1 << 31 {
        return Err(Error::NotPrime(p));
    }
    let mut k = 2u64;
    while k * k <= p {
        if p % k == 0 {
            return Err(Error::NotPrime(p));
        }
        k += 1;
    }
    Ok(p as u32)
}

#[inline]
fn mul_mod(a: u32, b: u32, p: u32) -> u32 {
    ((a as u64 * b as u64) % p as u64) as u32
}

#[inline]
fn add_mod(a: u32, b: u32, p: u32) -> u32 {
    let s = a as u64 + b as u64;
    (if s >= p as u64 { s - p as u64 } else { s }) as u32
}

#[inline]
fn sub_mod(a: u32, b: u32, p: u32) -> u32 {
    if a >= b {
        a - b
    } else {
        (a as u64 + p as u64 - b as u64) as u32
    }
}

fn pow_mod(mut a: u32, mut e: u64, p: u32) -> u32 {
    let mut r = 1u32 % p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

#[inline]
fn inv_mod(a: u32, p: u32) -> u32 {
    debug_assert!(a % p != 0);
    pow_mod(a, p as u64 - 2, p)
}

/// Reduces an arbitrary integer into `[0, p)`.
pub fn reduce(v: i64, p: u32) -> u32 {
    v.rem_euclid(p as i64) as u32
}

/// An element of F_p.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    value: u32,
    p: u32,
}

impl Scalar {
    pub fn new(value: i64, p: u64) -> Result<Scalar> {
        let p = check_prime(p)?;
        Ok(Scalar { value: reduce(value, p), p })
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Option<Scalar> {
        (self.value != 0).then(|| Scalar { value: inv_mod(self.value, self.p), p: self.p })
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        assert_eq!(self.p, o.p, "modulus mismatch");
        Scalar { value: add_mod(self.value, o.value, self.p), p: self.p }
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        assert_eq!(self.p, o.p, "modulus mismatch");
        Scalar { value: sub_mod(self.value, o.value, self.p), p: self.p }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        assert_eq!(self.p, o.p, "modulus mismatch");
        Scalar { value: mul_mod(self.value, o.value, self.p), p: self.p }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { value: sub_mod(0, self.value, self.p), p: self.p }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Row-major dense matrix over F_p.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

/// Output of [`Matrix::solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    /// One solution, with every free variable set to zero.
    pub particular: Matrix,
    /// Kernel basis, one column per vector.
    pub kernel: Matrix,
}

/// Canonical quotient `F_p^rows -> F_p^rows / im(M)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cokernel {
    pub projection: Matrix,
    pub section: Matrix,
    /// Coordinates of the ambient space that survive as the quotient basis.
    pub kept: Vec<usize>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix[{}x{} mod {}]", self.rows, self.cols, self.p)?;
        for r in 0..self.rows {
            write!(f, "\n  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Matrix {
        Matrix { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u32, n: usize) -> Matrix {
        let mut m = Matrix::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    /// Builds a matrix from integer rows, reducing mod p.
    pub fn from_rows(p: u32, rows: &[Vec<i64>]) -> Result<Matrix> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&v| reduce(v, p)).collect();
        Ok(Matrix { p, rows: rows.len(), cols, data })
    }

    /// Like [`Matrix::from_rows`] but with an explicit column count, so
    /// that `0 x n` matrices can be described.
    pub fn from_rows_sized(p: u32, rows: usize, cols: usize, entries: &[Vec<i64>]) -> Result<Matrix> {
        if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension(format!("expected {rows}x{cols} entries")));
        }
        let data = entries.iter().flatten().map(|&v| reduce(v, p)).collect();
        Ok(Matrix { p, rows, cols, data })
    }

    pub fn from_fn(p: u32, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u32) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c) % p);
            }
        }
        Matrix { p, rows, cols, data }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.p;
    }

    pub fn scalar(&self, r: usize, c: usize) -> Scalar {
        Scalar { value: self.get(r, c), p: self.p }
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    /// Rows as integer vectors.
    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| self.row(r).iter().map(|&v| v as i64).collect()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|r| (0..self.cols).all(|c| self.get(r, c) == u32::from(r == c) % self.p))
    }

    fn check_same(&self, o: &Matrix) {
        assert_eq!(self.p, o.p, "modulus mismatch");
        assert_eq!(self.shape(), o.shape(), "shape mismatch");
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.p, self.cols, self.rows, |r, c| self.get(c, r))
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.p, o.p, "modulus mismatch");
        assert_eq!(self.cols, o.rows, "inner dimension mismatch: {:?} * {:?}", self.shape(), o.shape());
        let p = self.p as u64;
        let mut data = vec![0u32; self.rows * o.cols];
        let mut acc = vec![0u64; o.cols];
        for r in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k] as u64;
                if a == 0 {
                    continue;
                }
                let orow = &o.data[k * o.cols..(k + 1) * o.cols];
                for (slot, &b) in acc.iter_mut().zip(orow) {
                    *slot = (*slot + a * b as u64) % p;
                }
            }
            for (c, &v) in acc.iter().enumerate() {
                data[r * o.cols + c] = v as u32;
            }
        }
        Matrix { p: self.p, rows: self.rows, cols: o.cols, data }
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        self.check_same(o);
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| add_mod(a, b, self.p)).collect();
        Matrix { p: self.p, rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        self.check_same(o);
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| sub_mod(a, b, self.p)).collect();
        Matrix { p: self.p, rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Matrix {
        let data = self.data.iter().map(|&a| sub_mod(0, a, self.p)).collect();
        Matrix { p: self.p, rows: self.rows, cols: self.cols, data }
    }

    /// Multiplies by an integer scalar.
    pub fn scale(&self, k: i64) -> Matrix {
        let k = reduce(k, self.p);
        let data = self.data.iter().map(|&a| mul_mod(a, k, self.p)).collect();
        Matrix { p: self.p, rows: self.rows, cols: self.cols, data }
    }

    /// `[self | o]`.
    pub fn hstack(&self, o: &Matrix) -> Matrix {
        Matrix::hcat(self.p, self.rows, &[self, o])
    }

    /// `[self ; o]`.
    pub fn vstack(&self, o: &Matrix) -> Matrix {
        Matrix::vcat(self.p, self.cols, &[self, o])
    }

    /// Horizontal concatenation; `rows` is used when `blocks` is empty.
    pub fn hcat(p: u32, rows: usize, blocks: &[&Matrix]) -> Matrix {
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(p, rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hcat row mismatch");
            m.set_block(0, off, b);
            off += b.cols;
        }
        m
    }

    /// Vertical concatenation; `cols` is used when `blocks` is empty.
    pub fn vcat(p: u32, cols: usize, blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let mut m = Matrix::zeros(p, rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vcat column mismatch");
            m.set_block(off, 0, b);
            off += b.rows;
        }
        m
    }

    pub fn block_diag(p: u32, blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(p, rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            m.set_block(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        m
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        assert_eq!(self.p, b.p, "modulus mismatch");
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols, "block out of range");
        for r in 0..b.rows {
            let dst = (r0 + r) * self.cols + c0;
            self.data[dst..dst + b.cols].copy_from_slice(b.row(r));
        }
    }

    pub fn add_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols, "block out of range");
        for r in 0..b.rows {
            for c in 0..b.cols {
                let i = (r0 + r) * self.cols + c0 + c;
                self.data[i] = add_mod(self.data[i], b.get(r, c), self.p);
            }
        }
    }

    pub fn block(&self, r0: usize, rows: usize, c0: usize, cols: usize) -> Matrix {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "block out of range");
        Matrix::from_fn(self.p, rows, cols, |r, c| self.get(r0 + r, c0 + c))
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(self.p, idx.len(), self.cols, |r, c| self.get(idx[r], c))
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        Matrix::from_fn(self.p, self.rows, idx.len(), |r, c| self.get(r, idx[c]))
    }

    /// Reduced row echelon form, pivoting on the leftmost available column
    /// and the topmost available row.
    pub fn rref(&self) -> Rref {
        let p = self.p;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| m.get(r, col) != 0) else { continue };
            if pr != row {
                for c in 0..m.cols {
                    m.data.swap(pr * m.cols + c, row * m.cols + c);
                }
            }
            let inv = inv_mod(m.get(row, col), p);
            for c in col..m.cols {
                let i = row * m.cols + c;
                m.data[i] = mul_mod(m.data[i], inv, p);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let f = m.get(r, col);
                if f == 0 {
                    continue;
                }
                for c in col..m.cols {
                    let v = m.data[row * m.cols + c];
                    if v != 0 {
                        let i = r * m.cols + c;
                        m.data[i] = sub_mod(m.data[i], mul_mod(f, v, p), p);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref { matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// True iff the columns are linearly independent.
    pub fn is_injective(&self) -> bool {
        self.rank() == self.cols
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.rows
    }

    /// Solves `self * x = b` for every column of `b` at once.
    pub fn solve(&self, b: &Matrix) -> Result<Option<Solution>> {
        if b.rows != self.rows {
            return Err(Error::Dimension(format!(
                "solve: matrix has {} rows, right-hand side {}",
                self.rows, b.rows
            )));
        }
        if b.p != self.p {
            return Err(Error::ModulusMismatch(self.p, b.p));
        }
        let n = self.cols;
        let aug = self.hstack(b).rref();
        if aug.pivots.iter().any(|&c| c >= n) {
            return Ok(None);
        }
        let mut particular = Matrix::zeros(self.p, n, b.cols);
        for (r, &c) in aug.pivots.iter().enumerate() {
            for k in 0..b.cols {
                particular.set(c, k, aug.matrix.get(r, n + k));
            }
        }
        let kernel = kernel_from_rref(&aug.matrix, &aug.pivots, n);
        Ok(Some(Solution { particular, kernel }))
    }

    /// Kernel basis as the columns of the returned matrix.
    pub fn kernel(&self) -> Matrix {
        let r = self.rref();
        kernel_from_rref(&r.matrix, &r.pivots, self.cols)
    }

    /// Canonical cokernel. The quotient basis consists of the coordinates
    /// that are not pivots of the row-reduced transpose, kept in order.
    pub fn cokernel(&self) -> Cokernel {
        let m = self.rows;
        let r = self.transpose().rref();
        let mut is_pivot = vec![false; m];
        for &c in &r.pivots {
            is_pivot[c] = true;
        }
        let kept: Vec<usize> = (0..m).filter(|&c| !is_pivot[c]).collect();
        let mut pos = vec![usize::MAX; m];
        for (t, &c) in kept.iter().enumerate() {
            pos[c] = t;
        }
        let mut q = Matrix::zeros(self.p, kept.len(), m);
        for (t, &c) in kept.iter().enumerate() {
            q.set(t, c, 1);
        }
        for (s, &pc) in r.pivots.iter().enumerate() {
            for (t, &c) in kept.iter().enumerate() {
                let v = r.matrix.get(s, c);
                if v != 0 {
                    q.set(t, pc, sub_mod(0, v, self.p));
                }
            }
        }
        let mut s = Matrix::zeros(self.p, m, kept.len());
        for (t, &c) in kept.iter().enumerate() {
            s.set(c, t, 1);
        }
        Cokernel { projection: q, section: s, kept }
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let r = self.hstack(&Matrix::identity(self.p, n)).rref();
        if r.pivots.len() < n || r.pivots[..n].iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        Some(r.matrix.block(0, n, n, n))
    }

    /// Standard-coordinate complement of the column span: the coordinates
    /// that are not pivots of the row-reduced transpose.
    pub fn coordinate_complement(&self) -> Vec<usize> {
        self.cokernel().kept
    }
}

fn kernel_from_rref(r: &Matrix, pivots: &[usize], n: usize) -> Matrix {
    let mut is_pivot = vec![false; n];
    for &c in pivots.iter().filter(|&&c| c < n) {
        is_pivot[c] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let mut k = Matrix::zeros(r.p, n, free.len());
    for (j, &f) in free.iter().enumerate() {
        k.set(f, j, 1);
        for (row, &pc) in pivots.iter().enumerate() {
            let v = r.get(row, f);
            if v != 0 {
                k.set(pc, j, sub_mod(0, v, r.p));
            }
        }
    }
    k
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, o: &Matrix) -> Matrix {
        Matrix::add(self, o)
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, o: &Matrix) -> Matrix {
        Matrix::sub(self, o)
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, o: &Matrix) -> Matrix {
        Matrix::mul(self, o)
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix::neg(self)
    }
}
