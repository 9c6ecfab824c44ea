//! Braided vector spaces and their lifts to tensor powers.
//!
//! Basis vectors of `V^{⊗k}` are words over `0..n`, ordered lexicographically
//! with the first letter most significant. A braiding is stored both as the
//! dense `n²×n²` matrix and as per-column sparse lists, which is what the
//! word-level lift uses.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::exactla::{solve, DenseMatrix, SubspaceBasis};
use crate::scalar::Field;

/// Position of a word in the lexicographic basis of `V^{⊗len}`.
pub fn word_index(n: usize, word: &[usize]) -> usize {
    word.iter().fold(0, |acc, &l| acc * n + l)
}

/// Inverse of [`word_index`].
pub fn index_word(n: usize, len: usize, mut idx: usize) -> Vec<usize> {
    let mut w = vec![0; len];
    for slot in w.iter_mut().rev() {
        *slot = idx % n;
        idx /= n;
    }
    w
}

/// All words of length `len`, in lexicographic order.
pub fn words_of_length(n: usize, len: usize) -> Vec<Vec<usize>> {
    (0..n.pow(len as u32)).map(|i| index_word(n, len, i)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BraidedSpace<F> {
    n: usize,
    c: DenseMatrix<F>,
    // columns[i*n+j] = nonzero (k, l, coef) with c(e_i⊗e_j) = Σ coef e_k⊗e_l
    columns: Vec<Vec<(usize, usize, F)>>,
}

impl<F: Field> BraidedSpace<F> {
    /// Validates shape and the Yang–Baxter equation.
    pub fn new(n: usize, c: DenseMatrix<F>) -> Result<Self> {
        let s = Self::new_unchecked(n, c)?;
        if let Some([i, j, k]) = s.yang_baxter_witness() {
            return Err(Error::InvalidBraiding(format!("Yang-Baxter fails on x{}⊗x{}⊗x{}", i + 1, j + 1, k + 1)));
        }
        Ok(s)
    }

    /// Shape check only. Used for fault-injection fixtures.
    pub fn new_unchecked(n: usize, c: DenseMatrix<F>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidBraiding("dimension must be at least 1".into()));
        }
        if c.rows() != n * n || c.cols() != n * n {
            return Err(Error::InvalidBraiding(format!(
                "braiding is {}x{}, expected {}x{}",
                c.rows(),
                c.cols(),
                n * n,
                n * n
            )));
        }
        let columns = (0..n * n)
            .map(|col| {
                (0..n * n)
                    .filter(|&r| !c.get(r, col).is_zero())
                    .map(|r| (r / n, r % n, c.get(r, col).clone()))
                    .collect()
            })
            .collect();
        Ok(BraidedSpace { n, c, columns })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DenseMatrix<F> {
        &self.c
    }

    /// `c(e_i⊗e_j)` as a list of `(k, l, coef)`.
    pub fn image_of_pair(&self, i: usize, j: usize) -> &[(usize, usize, F)] {
        &self.columns[i * self.n + j]
    }

    pub fn is_flip(&self) -> bool {
        self.c == make_flip::<F>(self.n).c
    }

    /// First basis triple on which `c₁c₂c₁` and `c₂c₁c₂` differ.
    pub fn yang_baxter_witness(&self) -> Option<[usize; 3]> {
        let id = DenseMatrix::identity(self.n);
        let c1 = self.c.kron(&id);
        let c2 = id.kron(&self.c);
        let lhs = c1.mul(&c2).and_then(|m| m.mul(&c1)).expect("square");
        let rhs = c2.mul(&c1).and_then(|m| m.mul(&c2)).expect("square");
        (0..lhs.cols()).find(|&col| lhs.column(col) != rhs.column(col)).map(|col| {
            let w = index_word(self.n, 3, col);
            [w[0], w[1], w[2]]
        })
    }

    pub fn check_yang_baxter(&self) -> bool {
        self.yang_baxter_witness().is_none()
    }

    /// Monic minimal polynomial of `c`, coefficients from the constant term up.
    pub fn minimal_polynomial(&self) -> Vec<F> {
        let size = self.c.rows();
        let flatten = |m: &DenseMatrix<F>| m.entries().to_vec();
        let mut powers = vec![DenseMatrix::identity(size)];
        loop {
            let next = powers.last().unwrap().mul(&self.c).expect("square");
            let cols: Vec<Vec<F>> = powers.iter().map(flatten).collect();
            let a = DenseMatrix::from_columns(size * size, &cols).expect("consistent");
            let target = flatten(&next);
            if let Some((x, _)) = solve(&a, &target).expect("consistent") {
                // next = Σ x_k c^k, so the polynomial is X^m − Σ x_k X^k.
                let mut poly: Vec<F> = x.into_iter().map(|v| -v).collect();
                poly.push(F::one());
                return poly;
            }
            powers.push(next);
        }
    }

    /// `q` when the minimal polynomial is exactly `(X+1)(X−q)` with `q ≠ 0`.
    pub fn hecke_mark(&self) -> Option<F> {
        let p = self.minimal_polynomial();
        if p.len() != 3 {
            return None;
        }
        // (X+1)(X−q) = X² + (1−q)X − q
        let q = -p[0].clone();
        if q.is_zero() || p[1] != F::one() - q.clone() {
            return None;
        }
        Some(q)
    }
}

/// Renders a polynomial given by ascending coefficients, e.g. `X^3 + X^2 + X + 1`.
pub fn render_polynomial<F: Field>(coefs: &[F]) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (k, a) in coefs.iter().enumerate().rev() {
        if a.is_zero() {
            continue;
        }
        let neg = crate::scalar::renders_negative(a);
        let mag = if neg { -a.clone() } else { a.clone() };
        let mono = match k {
            0 => String::new(),
            1 => "X".to_string(),
            _ => format!("X^{k}"),
        };
        let body = if mono.is_empty() {
            mag.to_string()
        } else if mag.is_one() {
            mono
        } else {
            format!("{mag}*{mono}")
        };
        if parts.is_empty() {
            parts.push(if neg { format!("-{body}") } else { body });
        } else {
            parts.push(format!("{} {body}", if neg { "-" } else { "+" }));
        }
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ")
    }
}

/// Diagonal braiding `c(e_i⊗e_j) = q_ij e_j⊗e_i`.
pub fn make_diagonal<F: Field>(q: &DenseMatrix<F>) -> Result<BraidedSpace<F>> {
    let n = q.rows();
    if q.cols() != n {
        return Err(Error::InvalidBraiding("q-matrix must be square".into()));
    }
    let mut c = DenseMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let v = q.get(i, j);
            if v.is_zero() {
                return Err(Error::InvalidBraiding(format!("q{}{} is zero", i + 1, j + 1)));
            }
            c.set(j * n + i, i * n + j, v.clone());
        }
    }
    BraidedSpace::new(n, c)
}

pub fn make_flip<F: Field>(n: usize) -> BraidedSpace<F> {
    let mut c = DenseMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            c.set(j * n + i, i * n + j, F::one());
        }
    }
    BraidedSpace::new_unchecked(n, c).expect("flip has the right shape")
}

pub fn check_yang_baxter<F: Field>(b: &BraidedSpace<F>) -> bool {
    b.check_yang_baxter()
}

pub fn minimal_polynomial<F: Field>(b: &BraidedSpace<F>) -> Vec<F> {
    b.minimal_polynomial()
}

pub fn hecke_mark<F: Field>(b: &BraidedSpace<F>) -> Option<F> {
    b.hecke_mark()
}

/// Sparse vector on words.
pub type WordVec<F> = HashMap<Vec<usize>, F>;

fn add_into<F: Field>(acc: &mut WordVec<F>, w: Vec<usize>, v: F) {
    if v.is_zero() {
        return;
    }
    match acc.get_mut(&w) {
        Some(x) => {
            *x = x.clone() + v;
            if x.is_zero() {
                acc.remove(&w);
            }
        }
        None => {
            acc.insert(w, v);
        }
    }
}

/// Block crossings `c_{a,b}: V^{⊗a}⊗V^{⊗b} → V^{⊗b}⊗V^{⊗a}`.
///
/// `c_{a,b}` moves the letters of the left block across the right block,
/// last letter first, each by a run of adjacent braidings. Dense matrices
/// are cached per `(a, b)`.
#[derive(Debug)]
pub struct LiftedBraiding<F> {
    space: Arc<BraidedSpace<F>>,
    cache: RwLock<HashMap<(usize, usize), Arc<DenseMatrix<F>>>>,
}

impl<F: Field> Clone for LiftedBraiding<F> {
    fn clone(&self) -> Self {
        LiftedBraiding { space: self.space.clone(), cache: RwLock::new(self.cache.read().expect("cache lock").clone()) }
    }
}

impl<F: Field> LiftedBraiding<F> {
    pub fn new(space: Arc<BraidedSpace<F>>) -> Self {
        LiftedBraiding { space, cache: RwLock::new(HashMap::new()) }
    }

    pub fn space(&self) -> &Arc<BraidedSpace<F>> {
        &self.space
    }

    /// Applies `c` at positions `pos, pos+1` to every word of `v`.
    pub fn apply_adjacent(&self, v: &WordVec<F>, pos: usize) -> WordVec<F> {
        let mut out = WordVec::with_capacity(v.len());
        for (w, coef) in v {
            for (k, l, x) in self.space.image_of_pair(w[pos], w[pos + 1]) {
                let mut nw = w.clone();
                nw[pos] = *k;
                nw[pos + 1] = *l;
                add_into(&mut out, nw, coef.clone() * x.clone());
            }
        }
        out
    }

    /// `c_{a,b}` applied to the concatenated word `u·v` with `|u| = a`.
    pub fn apply(&self, a: usize, word: &[usize]) -> WordVec<F> {
        let b = word.len() - a;
        let mut v = WordVec::new();
        v.insert(word.to_vec(), F::one());
        if a == 0 || b == 0 {
            return v;
        }
        for i in (0..a).rev() {
            for p in i..i + b {
                v = self.apply_adjacent(&v, p);
            }
        }
        v
    }

    /// `c_{a,b}` applied to `u⊗v`, returned as pairs `(y, v')` with `|y| = |v|`.
    pub fn apply_pair(&self, u: &[usize], v: &[usize]) -> Vec<(Vec<usize>, Vec<usize>, F)> {
        let mut word = u.to_vec();
        word.extend_from_slice(v);
        let b = v.len();
        self.apply(u.len(), &word).into_iter().map(|(w, x)| (w[..b].to_vec(), w[b..].to_vec(), x)).collect()
    }

    /// Dense matrix of `c_{a,b}` on `V^{⊗(a+b)}`.
    pub fn matrix(&self, a: usize, b: usize) -> Arc<DenseMatrix<F>> {
        if let Some(m) = self.cache.read().expect("cache lock").get(&(a, b)) {
            return m.clone();
        }
        let n = self.space.dim();
        let size = n.pow((a + b) as u32);
        let mut m = DenseMatrix::zeros(size, size);
        for col in 0..size {
            let w = index_word(n, a + b, col);
            for (img, x) in self.apply(a, &w) {
                m.set(word_index(n, &img), col, x);
            }
        }
        let m = Arc::new(m);
        self.cache.write().expect("cache lock").entry((a, b)).or_insert_with(|| m.clone()).clone()
    }
}

pub fn lift_braiding<F: Field>(lb: &LiftedBraiding<F>, a: usize, b: usize) -> Arc<DenseMatrix<F>> {
    lb.matrix(a, b)
}

/// Span of `l ⊗ r` inside `F^{dim l}⊗F^{dim r}`.
pub fn tensor_span<F: Field>(l: &SubspaceBasis<F>, r: &SubspaceBasis<F>) -> SubspaceBasis<F> {
    let ambient = l.ambient_dim() * r.ambient_dim();
    let mut vecs = Vec::with_capacity(l.dim() * r.dim());
    for x in l.vectors() {
        for y in r.vectors() {
            let mut v = Vec::with_capacity(ambient);
            for a in x {
                for b in y {
                    v.push(a.clone() * b.clone());
                }
            }
            vecs.push(v);
        }
    }
    SubspaceBasis::span(ambient, vecs).expect("consistent ambient")
}

/// Whether `m` maps the subspace `src` into `dst`.
pub fn maps_into<F: Field>(m: &DenseMatrix<F>, src: &SubspaceBasis<F>, dst: &SubspaceBasis<F>) -> Result<bool> {
    for v in src.vectors() {
        if !dst.contains(&m.mul_vec(v)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_square_ambient<F: Field>(l: &SubspaceBasis<F>, c: &DenseMatrix<F>) -> Result<SubspaceBasis<F>> {
    let m = l.ambient_dim();
    if c.rows() != m * m || c.cols() != m * m {
        return Err(Error::Dimension(format!("subspace of ambient {m} against a {}x{} braiding", c.rows(), c.cols())));
    }
    Ok(SubspaceBasis::full(m))
}

/// `c(L⊗W + W⊗L) ⊆ L⊗W + W⊗L`, where `c` braids `W⊗W`.
pub fn is_precategorical<F: Field>(l: &SubspaceBasis<F>, c: &DenseMatrix<F>) -> Result<bool> {
    let w = check_square_ambient(l, c)?;
    let s = tensor_span(l, &w).sum(&tensor_span(&w, l))?;
    maps_into(c, &s, &s)
}

/// `c(L⊗W) ⊆ W⊗L` and `c(W⊗L) ⊆ L⊗W`.
pub fn is_categorical<F: Field>(l: &SubspaceBasis<F>, c: &DenseMatrix<F>) -> Result<bool> {
    let w = check_square_ambient(l, c)?;
    Ok(maps_into(c, &tensor_span(l, &w), &tensor_span(&w, l))?
        && maps_into(c, &tensor_span(&w, l), &tensor_span(l, &w))?)
}
