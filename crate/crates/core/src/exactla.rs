//! Exact dense linear algebra.
//!
//! Subspaces are always stored in reduced row-echelon form, so two
//! [`SubspaceBasis`] values describe the same subspace iff they compare equal.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Field;

#[derive(Clone, PartialEq, Eq)]
pub struct DenseMatrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: fmt::Debug> fmt::Debug for DenseMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<F: Field> DenseMatrix<F> {
    pub fn new(rows: usize, cols: usize, data: Vec<F>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<F>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Dimension(format!("row {i} has {} entries, expected {cols}", r.len())));
            }
            data.extend(r);
        }
        Ok(DenseMatrix { rows: n, cols, data })
    }

    /// Builds a matrix from its columns.
    pub fn from_columns(rows: usize, columns: &[Vec<F>]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::Dimension(format!("column {j} has {} entries, expected {rows}", col.len())));
            }
            for (i, x) in col.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &F {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: F) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<F> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn entries(&self) -> &[F] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = out.data[idx].clone() + a.clone() * b.clone();
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[F]) -> Result<Vec<F>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} against {} columns", v.len(), self.cols)));
        }
        let mut out = vec![F::zero(); self.rows];
        for (j, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                let a = self.get(i, j);
                if !a.is_zero() {
                    *o = o.clone() + a.clone() * x.clone();
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(F, F) -> F) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Dimension(format!("{}x{} vs {}x{}", self.rows, self.cols, rhs.rows, rhs.cols)));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| f(a.clone(), b.clone())).collect();
        Ok(DenseMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, s: &F) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.clone() * s.clone()).collect(),
        }
    }

    /// Kronecker product `self ⊗ rhs` in the lexicographic basis convention.
    pub fn kron(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        let b = rhs.get(k, l);
                        if !b.is_zero() {
                            out.set(i * rhs.rows + k, j * rhs.cols + l, a.clone() * b.clone());
                        }
                    }
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        rref(self).1
    }
}

/// A subspace of `F^ambient`, held as the unique reduced row-echelon basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubspaceBasis<F> {
    ambient: usize,
    rows: Vec<Vec<F>>,
    pivots: Vec<usize>,
}

impl<F: Field> SubspaceBasis<F> {
    pub fn zero(ambient: usize) -> Self {
        SubspaceBasis { ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        rref(&DenseMatrix::identity(ambient)).0
    }

    /// Span of arbitrary vectors of length `ambient`.
    pub fn span(ambient: usize, vectors: Vec<Vec<F>>) -> Result<Self> {
        let m = DenseMatrix::from_rows(ambient, vectors)?;
        Ok(rref(&m).0)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<F>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn to_matrix(&self) -> DenseMatrix<F> {
        DenseMatrix::from_rows(self.ambient, self.rows.clone()).expect("consistent rows")
    }

    /// Reduces `v` modulo the subspace; the result vanishes on every pivot.
    pub fn reduce(&self, v: &[F]) -> Vec<F> {
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let coef = out[p].clone();
            if coef.is_zero() {
                continue;
            }
            for (o, r) in out.iter_mut().zip(row) {
                if !r.is_zero() {
                    *o = o.clone() - coef.clone() * r.clone();
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[F]) -> Result<bool> {
        if v.len() != self.ambient {
            return Err(Error::Dimension(format!("vector of length {} in ambient {}", v.len(), self.ambient)));
        }
        Ok(self.reduce(v).iter().all(|x| x.is_zero()))
    }

    /// Coefficients of `v` against the basis rows, if `v` lies in the span.
    pub fn coordinates(&self, v: &[F]) -> Option<Vec<F>> {
        if v.len() != self.ambient || !self.reduce(v).iter().all(|x| x.is_zero()) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    /// Linear combination of the basis rows.
    pub fn combine(&self, coefs: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); self.ambient];
        for (row, c) in self.rows.iter().zip(coefs) {
            if c.is_zero() {
                continue;
            }
            for (o, r) in out.iter_mut().zip(row) {
                if !r.is_zero() {
                    *o = o.clone() + c.clone() * r.clone();
                }
            }
        }
        out
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let mut vs = self.rows.clone();
        vs.extend(other.rows.iter().cloned());
        Self::span(self.ambient, vs)
    }

    pub fn is_subspace_of(&self, other: &Self) -> Result<bool> {
        self.check_ambient(other)?;
        for r in &self.rows {
            if !other.contains(r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        intersect(self, other)
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::Dimension(format!("ambient {} vs {}", self.ambient, other.ambient)));
        }
        Ok(())
    }
}

/// Reduced row-echelon form and rank.
pub fn rref<F: Field>(m: &DenseMatrix<F>) -> (SubspaceBasis<F>, usize) {
    let cols = m.cols();
    let mut rows: Vec<Vec<F>> = m.row_vectors().into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows.len() {
            break;
        }
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].inverse().expect("nonzero pivot");
        for x in rows[rank].iter_mut().skip(col) {
            if !x.is_zero() {
                *x = x.clone() * inv.clone();
            }
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                if !p.is_zero() {
                    *x = x.clone() - f.clone() * p.clone();
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    (SubspaceBasis { ambient: cols, rows, pivots }, rank)
}

/// Basis of `{x : m x = 0}`.
pub fn kernel_basis<F: Field>(m: &DenseMatrix<F>) -> SubspaceBasis<F> {
    let cols = m.cols();
    let (r, _) = rref(m);
    let pivot_set: Vec<Option<usize>> = {
        let mut v = vec![None; cols];
        for (i, &p) in r.pivots.iter().enumerate() {
            v[p] = Some(i);
        }
        v
    };
    let mut vecs = Vec::new();
    for free in 0..cols {
        if pivot_set[free].is_some() {
            continue;
        }
        let mut v = vec![F::zero(); cols];
        v[free] = F::one();
        for (i, &p) in r.pivots.iter().enumerate() {
            let a = &r.rows[i][free];
            if !a.is_zero() {
                v[p] = -a.clone();
            }
        }
        vecs.push(v);
    }
    SubspaceBasis::span(cols, vecs).expect("kernel vectors have ambient length")
}

pub fn intersect<F: Field>(a: &SubspaceBasis<F>, b: &SubspaceBasis<F>) -> Result<SubspaceBasis<F>> {
    a.check_ambient(b)?;
    if a.is_zero() || b.is_zero() {
        return Ok(SubspaceBasis::zero(a.ambient));
    }
    // (alpha, beta) with alpha A + beta B = 0 gives alpha A in both.
    let ka = a.dim();
    let kb = b.dim();
    let mut stacked = DenseMatrix::zeros(a.ambient, ka + kb);
    for (i, row) in a.rows.iter().enumerate() {
        for (c, x) in row.iter().enumerate() {
            stacked.set(c, i, x.clone());
        }
    }
    for (i, row) in b.rows.iter().enumerate() {
        for (c, x) in row.iter().enumerate() {
            stacked.set(c, ka + i, x.clone());
        }
    }
    let ker = kernel_basis(&stacked);
    let vecs = ker.rows.iter().map(|coef| a.combine(&coef[..ka])).collect();
    SubspaceBasis::span(a.ambient, vecs)
}

pub fn membership<F: Field>(v: &[F], s: &SubspaceBasis<F>) -> Result<bool> {
    s.contains(v)
}

/// Solves `a x = b`; returns a particular solution and the kernel of `a`.
pub fn solve<F: Field>(a: &DenseMatrix<F>, b: &[F]) -> Result<Option<(Vec<F>, SubspaceBasis<F>)>> {
    if b.len() != a.rows() {
        return Err(Error::Dimension(format!("rhs of length {} for {} rows", b.len(), a.rows())));
    }
    let n = a.cols();
    let mut aug = DenseMatrix::zeros(a.rows(), n + 1);
    for r in 0..a.rows() {
        for c in 0..n {
            aug.set(r, c, a.get(r, c).clone());
        }
        aug.set(r, n, b[r].clone());
    }
    let (r, _) = rref(&aug);
    if r.pivots.contains(&n) {
        return Ok(None);
    }
    let mut x = vec![F::zero(); n];
    for (row, &p) in r.rows.iter().zip(&r.pivots) {
        x[p] = row[n].clone();
    }
    Ok(Some((x, kernel_basis(a))))
}

/// Sparse row: strictly increasing column indices with nonzero values.
pub type SparseRow<F> = Vec<(usize, F)>;

/// Incremental row-echelon form over sparse rows, keyed by leading column.
///
/// Rows are only reduced at their leading entry, which keeps fill-in low.
#[derive(Clone, Debug, Default)]
pub struct EchelonBuilder<F> {
    rows: BTreeMap<usize, SparseRow<F>>,
}

impl<F: Field> EchelonBuilder<F> {
    pub fn new() -> Self {
        EchelonBuilder { rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn leading_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseRow<F>> {
        self.rows.values()
    }

    /// Adds `row` to the span; returns `true` if the rank grew.
    pub fn insert(&mut self, row: SparseRow<F>) -> bool {
        self.insert_reduced(row).is_some()
    }

    /// Like [`insert`](Self::insert), returning the stored row when the rank grew.
    pub fn insert_reduced(&mut self, mut row: SparseRow<F>) -> Option<&SparseRow<F>> {
        row.retain(|(_, x)| !x.is_zero());
        loop {
            let (lead, coef) = row.first().cloned()?;
            match self.rows.get(&lead) {
                Some(pivot) => row = axpy_sparse(&row, &-coef, pivot),
                None => {
                    let inv = coef.inverse().expect("nonzero lead");
                    for (_, x) in row.iter_mut() {
                        *x = x.clone() * inv.clone();
                    }
                    self.rows.insert(lead, row);
                    return self.rows.get(&lead);
                }
            }
        }
    }
}

/// `a + s * b` on sparse rows.
pub fn axpy_sparse<F: Field>(a: &[(usize, F)], s: &F, b: &[(usize, F)]) -> SparseRow<F> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, s.clone() * b[j].1.clone()));
            j += 1;
        } else {
            let v = a[i].1.clone() + s.clone() * b[j].1.clone();
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}
