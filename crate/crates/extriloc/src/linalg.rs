//! Dense linear algebra over prime fields `F_p`, `2 <= p <= 97`.
//!
//! Vectors are plain `Vec<u32>` with entries reduced mod `p`. Matrices are
//! row-major. Everything is exact; there are no tolerances anywhere.

use crate::error::{Error, Result};

/// A prime field `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !(2..=97).contains(&p) || !(2..p).all(|d| d * d > p || !p.is_multiple_of(d)) {
            return Err(Error::Domain(format!("{p} is not a prime in 2..=97")));
        }
        Ok(PrimeField { p })
    }

    pub fn p(self) -> u32 {
        self.p
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        (a + b) % self.p
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        (a + self.p - b) % self.p
    }

    pub fn neg(self, a: u32) -> u32 {
        (self.p - a % self.p) % self.p
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        (a * b) % self.p
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero in F_{}", self.p);
        self.pow(a, self.p - 2)
    }

    pub fn pow(self, a: u32, mut e: u32) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Reduce a signed integer into the field.
    pub fn from_i64(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }
}

/// Adds `c * src` into `dst`.
pub fn axpy(k: PrimeField, dst: &mut [u32], c: u32, src: &[u32]) {
    if c == 0 {
        return;
    }
    for (d, s) in dst.iter_mut().zip(src) {
        *d = (*d + c * s) % k.p;
    }
}

pub fn is_zero(v: &[u32]) -> bool {
    v.iter().all(|&x| x == 0)
}

/// Dense matrix over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub k: PrimeField,
    data: Vec<u32>,
}

impl Mat {
    pub fn zeros(k: PrimeField, rows: usize, cols: usize) -> Self {
        Mat { rows, cols, k, data: vec![0; rows * cols] }
    }

    pub fn identity(k: PrimeField, n: usize) -> Self {
        let mut m = Mat::zeros(k, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(k: PrimeField, rows: &[Vec<u32>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Mat::zeros(k, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v % k.p);
            }
        }
        m
    }

    pub fn from_cols(k: PrimeField, rows: usize, cols: &[Vec<u32>]) -> Self {
        let mut m = Mat::zeros(k, rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, &v) in col.iter().enumerate() {
                m.set(i, j, v % k.p);
            }
        }
        m
    }

    pub fn from_data(k: PrimeField, rows: usize, cols: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Mat { rows, cols, k, data: data.into_iter().map(|v| v % k.p).collect() }
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.k.p;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        is_zero(&self.data)
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.k, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matrix product shape");
        let p = self.k.p;
        let mut out = vec![0u32; self.rows * other.cols];
        for i in 0..self.rows {
            let orow = &mut out[i * other.cols..(i + 1) * other.cols];
            for l in 0..self.cols {
                let a = self.data[i * self.cols + l];
                if a == 0 {
                    continue;
                }
                let brow = &other.data[l * other.cols..(l + 1) * other.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o = (*o + a * b) % p;
                }
            }
        }
        Mat { rows: self.rows, cols: other.cols, k: self.k, data: out }
    }

    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "matrix-vector shape");
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).fold(0, |acc, (a, b)| (acc + a * b) % self.k.p)
            })
            .collect()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix sum shape");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| (a + b) % self.k.p).collect();
        Mat { rows: self.rows, cols: self.cols, k: self.k, data }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        self.add(&other.scale(self.k.p - 1))
    }

    pub fn scale(&self, c: u32) -> Mat {
        let data = self.data.iter().map(|a| (a * (c % self.k.p)) % self.k.p).collect();
        Mat { rows: self.rows, cols: self.cols, k: self.k, data }
    }

    pub fn neg(&self) -> Mat {
        self.scale(self.k.p - 1)
    }

    pub fn hstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows, "hstack rows");
        let mut m = Mat::zeros(self.k, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                m.set(i, self.cols + j, other.get(i, j));
            }
        }
        m
    }

    pub fn vstack(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.cols, "vstack cols");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Mat { rows: self.rows + other.rows, cols: self.cols, k: self.k, data }
    }

    /// Copy of the block with the given row and column ranges.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Mat {
        let mut m = Mat::zeros(self.k, r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                m.set(i - r0, j - c0, self.get(i, j));
            }
        }
        m
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j));
            }
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    fn rref_in_place(&mut self) -> Vec<usize> {
        let k = self.k;
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(piv) = (r..rows).find(|&i| self.get(i, c) != 0) else { continue };
            if piv != r {
                for j in 0..cols {
                    self.data.swap(piv * cols + j, r * cols + j);
                }
            }
            let inv = k.inv(self.get(r, c));
            for j in c..cols {
                let v = k.mul(self.get(r, j), inv);
                self.set(r, j, v);
            }
            let pivot_row: Vec<u32> = self.row(r)[c..].to_vec();
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let f = self.get(i, c);
                if f == 0 {
                    continue;
                }
                let neg = k.neg(f);
                let row = &mut self.data[i * cols + c..(i + 1) * cols];
                axpy(k, row, neg, &pivot_row);
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{v : A v = 0}`.
    pub fn kernel_basis(&self) -> Subspace {
        let (r, pivots) = self.rref();
        let k = self.k;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; self.cols];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = k.neg(r.get(i, free));
            }
            basis.push(v);
        }
        Subspace::span(k, self.cols, basis)
    }

    /// Some `x` with `A x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[u32]) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let k = self.k;
        let aug = self.hstack(&Mat::from_cols(k, self.rows, &[b.to_vec()]));
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u32; self.cols];
        for (i, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(i, self.cols);
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Mat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let aug = self.hstack(&Mat::identity(self.k, n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(r.block(0, n, n, 2 * n))
    }

    /// Column space as a subspace of `F_p^rows`.
    pub fn image(&self) -> Subspace {
        let cols: Vec<Vec<u32>> = (0..self.cols).map(|j| self.col(j)).collect();
        Subspace::span(self.k, self.rows, cols)
    }
}

/// A linear subspace of `F_p^n`, stored by a basis in reduced echelon form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    pub ambient_dim: usize,
    pub k: PrimeField,
    basis: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(k: PrimeField, n: usize) -> Self {
        Subspace { ambient_dim: n, k, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(k: PrimeField, n: usize) -> Self {
        let basis = (0..n)
            .map(|i| {
                let mut v = vec![0; n];
                v[i] = 1;
                v
            })
            .collect();
        Subspace { ambient_dim: n, k, basis, pivots: (0..n).collect() }
    }

    pub fn span(k: PrimeField, n: usize, vectors: Vec<Vec<u32>>) -> Self {
        if vectors.is_empty() || n == 0 {
            return Subspace::zero(k, n);
        }
        let m = Mat::from_rows(k, &vectors);
        let (r, pivots) = m.rref();
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace { ambient_dim: n, k, basis, pivots }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    /// Residue of `v` after eliminating the pivot coordinates of the basis.
    /// Two vectors are congruent modulo the subspace iff their residues agree.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.ambient_dim, "ambient mismatch");
        let mut w = v.to_vec();
        for (b, &pc) in self.basis.iter().zip(&self.pivots) {
            let c = w[pc];
            if c != 0 {
                axpy(self.k, &mut w, self.k.neg(c), b);
            }
        }
        w
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        is_zero(&self.reduce(v))
    }

    /// Coordinates of `v` in the echelon basis, when `v` lies in the subspace.
    pub fn coordinates(&self, v: &[u32]) -> Option<Vec<u32>> {
        let coords: Vec<u32> = self.pivots.iter().map(|&pc| v[pc]).collect();
        let mut w = v.to_vec();
        for (b, &c) in self.basis.iter().zip(&coords) {
            axpy(self.k, &mut w, self.k.neg(c), b);
        }
        is_zero(&w).then_some(coords)
    }

    fn check(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::Dimension(format!(
                "ambient {} vs {}",
                self.ambient_dim, other.ambient_dim
            )));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check(other)?;
        let mut v = self.basis.clone();
        v.extend(other.basis.iter().cloned());
        Ok(Subspace::span(self.k, self.ambient_dim, v))
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        self.check(other)?;
        let (a, b) = (self.dim(), other.dim());
        if a == 0 || b == 0 {
            return Ok(Subspace::zero(self.k, self.ambient_dim));
        }
        let mut cols = self.basis.clone();
        cols.extend(other.basis.iter().map(|v| v.iter().map(|&x| self.k.neg(x)).collect()));
        let m = Mat::from_cols(self.k, self.ambient_dim, &cols);
        let ker = m.kernel_basis();
        let vecs = ker
            .basis()
            .iter()
            .map(|c| {
                let mut w = vec![0; self.ambient_dim];
                for (i, b) in self.basis.iter().enumerate() {
                    axpy(self.k, &mut w, c[i], b);
                }
                w
            })
            .collect();
        Ok(Subspace::span(self.k, self.ambient_dim, vecs))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    /// Basis vectors of a complement, chosen among standard unit vectors.
    pub fn complement_units(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient_dim];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        (0..self.ambient_dim).filter(|&c| !is_pivot[c]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn rejects_non_primes() {
        assert!(PrimeField::new(4).is_err());
        assert!(PrimeField::new(101).is_err());
        assert!(PrimeField::new(97).is_ok());
    }

    #[test]
    fn kernel_of_zero_is_everything() {
        let k = f(2);
        assert_eq!(Mat::zeros(k, 2, 2).kernel_basis().dim(), 2);
    }

    #[test]
    fn kernel_of_identity_is_zero() {
        let k = f(3);
        assert_eq!(Mat::identity(k, 3).kernel_basis().dim(), 0);
    }

    #[test]
    fn kernel_of_all_ones_over_f2() {
        let k = f(2);
        let m = Mat::from_rows(k, &[vec![1, 1], vec![1, 1]]);
        let ker = m.kernel_basis();
        assert_eq!(ker.dim(), 1);
        assert!(ker.contains(&[1, 1]));
        assert!(!ker.contains(&[1, 0]));
    }

    #[test]
    fn solve_examples() {
        let k = f(5);
        let id = Mat::identity(k, 3);
        assert_eq!(id.solve(&[1, 2, 3]), Some(vec![1, 2, 3]));
        assert_eq!(Mat::zeros(k, 2, 2).solve(&[1, 0]), None);
        let k2 = f(2);
        let row = Mat::from_rows(k2, &[vec![1, 1]]);
        let x = row.solve(&[1]).unwrap();
        assert_eq!(row.apply(&x), vec![1]);
    }

    #[test]
    fn subspace_examples() {
        let k = f(2);
        let e = |i: usize| {
            let mut v = vec![0; 3];
            v[i] = 1;
            v
        };
        let u = Subspace::span(k, 3, vec![e(0), e(1)]);
        let v = Subspace::span(k, 3, vec![e(1), e(2)]);
        let i = u.intersection(&v).unwrap();
        assert_eq!(i.dim(), 1);
        assert!(i.contains(&e(1)));
        assert_eq!(u.sum(&Subspace::zero(k, 3)).unwrap(), u);
        assert_eq!(u.intersection(&u).unwrap(), u);
        assert!(u.sum(&Subspace::zero(k, 2)).is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let k = f(7);
        let m = Mat::from_rows(k, &[vec![2, 1], vec![1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Mat::identity(k, 2));
        assert!(Mat::from_rows(k, &[vec![1, 2], vec![2, 4]]).inverse().is_none());
    }
}
