//! Brute-force cross-checks kept apart from the main construction path:
//! quantum symmetrizers, PBW straightening, and block-swap permutations.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;

use crate::braiding::{index_word, word_index, LiftedBraiding, WordVec};
use crate::envelope::StructureConstants;
use crate::error::{Error, Result};
use crate::exactla::{DenseMatrix, EchelonBuilder, SparseRow};
use crate::scalar::Field;

/// Largest degree accepted by the symmetrizer (`d!` terms).
pub const SYMMETRIZER_MAX_DEGREE: usize = 7;

/// Degree up to which a second reduced word is compared for every permutation.
const REDUCED_WORD_CHECK_DEGREE: usize = 4;

/// Adjacent transpositions `s_i` (swapping `i, i+1`) with `σ = s_{w_1} ⋯ s_{w_k}`,
/// found by bubble sort of the one-line notation.
fn bubble_word(perm: &[usize]) -> Vec<usize> {
    let mut p = perm.to_vec();
    let mut swaps = Vec::new();
    for end in (1..p.len()).rev() {
        for i in 0..end {
            if p[i] > p[i + 1] {
                p.swap(i, i + 1);
                swaps.push(i);
            }
        }
    }
    swaps.reverse();
    swaps
}

/// Another reduced word for the same permutation: move the smallest remaining
/// value to the front first.
fn insertion_word(perm: &[usize]) -> Vec<usize> {
    let mut p = perm.to_vec();
    let mut swaps = Vec::new();
    for target in 0..p.len() {
        let mut pos = p.iter().position(|&v| v == target).expect("permutation");
        while pos > target {
            p.swap(pos - 1, pos);
            swaps.push(pos - 1);
            pos -= 1;
        }
    }
    swaps.reverse();
    swaps
}

/// `T_σ` applied to one word, along the given reduced word (rightmost factor first).
fn apply_word<F: Field>(lb: &LiftedBraiding<F>, reduced: &[usize], word: &[usize]) -> WordVec<F> {
    let mut v = WordVec::new();
    v.insert(word.to_vec(), F::one());
    for &i in reduced.iter().rev() {
        v = lb.apply_adjacent(&v, i);
    }
    v
}

/// `S_d = Σ_{σ ∈ Sym(d)} T_σ` on `V^{⊗d}`, lexicographic word basis.
pub fn quantum_symmetrizer<F: Field>(lb: &LiftedBraiding<F>, d: usize) -> Result<DenseMatrix<F>> {
    if d > SYMMETRIZER_MAX_DEGREE {
        return Err(Error::Refused(format!("symmetrizer degree {d} exceeds the guardrail {SYMMETRIZER_MAX_DEGREE}")));
    }
    let n = lb.space().dim();
    let size = n.pow(d as u32);
    let mut s: DenseMatrix<F> = DenseMatrix::zeros(size, size);
    for perm in (0..d).permutations(d) {
        let word1 = bubble_word(&perm);
        let word2 = (d <= REDUCED_WORD_CHECK_DEGREE).then(|| insertion_word(&perm));
        for col in 0..size {
            let w = index_word(n, d, col);
            let image = apply_word(lb, &word1, &w);
            if let Some(word2) = &word2 {
                if word2 != &word1 && apply_word(lb, word2, &w) != image {
                    return Err(Error::Assertion(format!(
                        "T_σ depends on the reduced word for σ = {perm:?} (Yang–Baxter fails)"
                    )));
                }
            }
            for (img, x) in image {
                let row = word_index(n, &img);
                s.set(row, col, s.get(row, col).clone() + x);
            }
        }
    }
    Ok(s)
}

/// The symmetrizers `S_1, …, S_D`.
#[derive(Clone, Debug)]
pub struct SymmetrizerTable<F> {
    pub matrices: Vec<DenseMatrix<F>>,
}

impl<F: Field> SymmetrizerTable<F> {
    pub fn new(lb: &LiftedBraiding<F>, degree: usize) -> Result<Self> {
        let matrices = (1..=degree).map(|d| quantum_symmetrizer(lb, d)).collect::<Result<_>>()?;
        Ok(SymmetrizerTable { matrices })
    }

    /// `[1, rank S_1, …, rank S_D]`.
    pub fn ranks(&self) -> Vec<usize> {
        std::iter::once(1).chain(self.matrices.iter().map(sparse_rank)).collect()
    }
}

fn sparse_rank<F: Field>(m: &DenseMatrix<F>) -> usize {
    let mut ech = EchelonBuilder::new();
    for c in 0..m.cols() {
        let row: SparseRow<F> =
            (0..m.rows()).filter(|&r| !m.get(r, c).is_zero()).map(|r| (r, m.get(r, c).clone())).collect();
        ech.insert(row);
    }
    ech.rank()
}

/// Graded dimensions `dim B^d = rank S_d` for `d = 0..=D`.
pub fn nichols_dims_via_symmetrizer<F: Field>(lb: &LiftedBraiding<F>, degree: usize) -> Result<Vec<usize>> {
    Ok(SymmetrizerTable::new(lb, degree)?.ranks())
}

type Poly<F> = BTreeMap<Vec<usize>, F>;

fn add_poly<F: Field>(acc: &mut Poly<F>, w: Vec<usize>, v: F) {
    if v.is_zero() {
        return;
    }
    let e = acc.entry(w.clone()).or_insert_with(F::zero);
    *e = e.clone() + v;
    if e.is_zero() {
        acc.remove(&w);
    }
}

#[derive(Clone, Copy)]
enum Strategy {
    Leftmost,
    Rightmost,
}

/// Rewrites `x_i x_j → x_j x_i + [x_i, x_j]` for `i > j` until only
/// non-decreasing words remain.
struct Straightener<'a, F: Field> {
    sc: &'a StructureConstants<F>,
    strategy: Strategy,
    memo: HashMap<Vec<usize>, Poly<F>>,
}

impl<'a, F: Field> Straightener<'a, F> {
    fn new(sc: &'a StructureConstants<F>, strategy: Strategy) -> Self {
        Straightener { sc, strategy, memo: HashMap::new() }
    }

    fn word(&mut self, w: &[usize]) -> Poly<F> {
        if let Some(p) = self.memo.get(w) {
            return p.clone();
        }
        let descents: Vec<usize> = (0..w.len().saturating_sub(1)).filter(|&i| w[i] > w[i + 1]).collect();
        let pos = match self.strategy {
            Strategy::Leftmost => descents.first(),
            Strategy::Rightmost => descents.last(),
        };
        let out = match pos {
            None => Poly::from([(w.to_vec(), F::one())]),
            Some(&i) => {
                let mut acc = Poly::new();
                let mut swapped = w.to_vec();
                swapped.swap(i, i + 1);
                for (u, c) in self.word(&swapped) {
                    add_poly(&mut acc, u, c);
                }
                for (k, c) in self.sc.raw()[w[i]][w[i + 1]].iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let mut shorter = w[..i].to_vec();
                    shorter.push(k);
                    shorter.extend_from_slice(&w[i + 2..]);
                    for (u, x) in self.word(&shorter) {
                        add_poly(&mut acc, u, c.clone() * x);
                    }
                }
                acc
            }
        };
        self.memo.insert(w.to_vec(), out.clone());
        out
    }
}

/// Cumulative filtered dimensions of `U(g)` in degrees `0..=D` from PBW
/// straightening. Refuses constants that violate Jacobi, naming a triple.
pub fn pbw_dims<F: Field>(sc: &StructureConstants<F>, degree: usize) -> Result<Vec<usize>> {
    if F::characteristic() != 0 {
        return Err(Error::Refused("PBW straightening oracle needs characteristic 0".into()));
    }
    if let Some(([i, j, k], value)) = sc.jacobi_witness() {
        let shown: Vec<String> = value.iter().map(|v| v.to_string()).collect();
        return Err(Error::Refused(format!(
            "Jacobi identity fails on (x{}, x{}, x{}): Jacobiator = ({})",
            i + 1,
            j + 1,
            k + 1,
            shown.join(", ")
        )));
    }
    let n = sc.dim();
    let mut left = Straightener::new(sc, Strategy::Leftmost);
    let mut right = Straightener::new(sc, Strategy::Rightmost);
    let mut columns: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut ech = EchelonBuilder::new();
    let mut dims = Vec::with_capacity(degree + 1);
    for d in 0..=degree {
        for idx in 0..n.pow(d as u32) {
            let w = index_word(n, d, idx);
            let a = left.word(&w);
            if a != right.word(&w) {
                return Err(Error::Assertion(format!("straightening is not confluent on {w:?}")));
            }
            let mut row: SparseRow<F> = a
                .into_iter()
                .map(|(u, c)| {
                    let next = columns.len();
                    (*columns.entry(u).or_insert(next), c)
                })
                .collect();
            row.sort_by_key(|(c, _)| *c);
            ech.insert(row);
        }
        dims.push(ech.rank());
    }
    Ok(dims)
}

/// Whether `m` is the permutation matrix sending `u·v` to `v·u` (`|u| = a`, `|v| = b`).
pub fn is_block_swap<F: Field>(n: usize, a: usize, b: usize, m: &DenseMatrix<F>) -> bool {
    let size = n.pow((a + b) as u32);
    if m.rows() != size || m.cols() != size {
        return false;
    }
    for col in 0..size {
        let w = index_word(n, a + b, col);
        let mut swapped = w[a..].to_vec();
        swapped.extend_from_slice(&w[..a]);
        let target = word_index(n, &swapped);
        for row in 0..size {
            let expect = if row == target { F::one() } else { F::zero() };
            if m.get(row, col) != &expect {
                return false;
            }
        }
    }
    true
}

/// Compares the lifted `c_{a,b}` of a flip braiding with the block swap.
pub fn permutation_lift_check<F: Field>(lb: &LiftedBraiding<F>, a: usize, b: usize) -> Result<bool> {
    if !lb.space().is_flip() {
        return Err(Error::Refused("permutation oracle applies to the flip braiding only".into()));
    }
    Ok(is_block_swap(lb.space().dim(), a, b, &lb.matrix(a, b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braiding::{make_diagonal, make_flip};
    use crate::scalar::{Rational, F2};
    use num_traits::Zero;
    use std::sync::Arc;

    fn q(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    fn lifted(m: Vec<Vec<i64>>) -> LiftedBraiding<Rational> {
        let n = m.len();
        let qm = DenseMatrix::from_rows(n, m.into_iter().map(|r| r.into_iter().map(q).collect()).collect()).unwrap();
        LiftedBraiding::new(Arc::new(make_diagonal(&qm).unwrap()))
    }

    #[test]
    fn reduced_words_are_reduced_and_agree_as_permutations() {
        let apply = |word: &[usize], d: usize| {
            let mut p: Vec<usize> = (0..d).collect();
            for &i in word {
                p.swap(i, i + 1);
            }
            p
        };
        for perm in (0..4).permutations(4) {
            let inv = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
            let (w1, w2) = (bubble_word(&perm), insertion_word(&perm));
            assert_eq!(w1.len(), inv);
            assert_eq!(w2.len(), inv);
            assert_eq!(apply(&w1, 4), apply(&w2, 4));
        }
    }

    #[test]
    fn low_degree_symmetrizers() {
        let lb = lifted(vec![vec![-1, 1], vec![-1, -1]]);
        assert_eq!(quantum_symmetrizer(&lb, 1).unwrap(), DenseMatrix::identity(2));
        let s2 = quantum_symmetrizer(&lb, 2).unwrap();
        let c = lb.space().matrix().clone();
        assert_eq!(s2, DenseMatrix::identity(4).add(&c).unwrap());
        assert_eq!(s2.rank(), 2);
        // x1⊗x1 and x2⊗x2 are killed
        assert!(s2.column(0).iter().all(|v| v.is_zero()));
        assert!(s2.column(3).iter().all(|v| v.is_zero()));
    }

    #[test]
    fn guardrail() {
        let lb = lifted(vec![vec![2]]);
        assert!(matches!(quantum_symmetrizer(&lb, 8), Err(Error::Refused(_))));
    }

    #[test]
    fn symmetrizer_dims_simple_cases() {
        assert_eq!(nichols_dims_via_symmetrizer(&lifted(vec![vec![2]]), 4).unwrap(), vec![1; 5]);
        assert_eq!(nichols_dims_via_symmetrizer(&lifted(vec![vec![-1]]), 4).unwrap(), vec![1, 1, 0, 0, 0]);
        let flip = LiftedBraiding::new(Arc::new(make_flip::<Rational>(2)));
        assert_eq!(nichols_dims_via_symmetrizer(&flip, 4).unwrap(), vec![1, 2, 3, 4, 5]);
        let flip2 = LiftedBraiding::new(Arc::new(make_flip::<F2>(1)));
        assert_eq!(nichols_dims_via_symmetrizer(&flip2, 3).unwrap(), vec![1, 1, 0, 0]);
    }

    #[test]
    fn pbw_abelian() {
        let sc = StructureConstants::new(vec![vec![vec![q(0); 2]; 2]; 2]).unwrap();
        assert_eq!(pbw_dims(&sc, 3).unwrap(), vec![1, 3, 6, 10]);
    }

    #[test]
    fn block_swap_oracle() {
        let lb = LiftedBraiding::new(Arc::new(make_flip::<Rational>(2)));
        assert!(permutation_lift_check(&lb, 1, 1).unwrap());
        assert!(permutation_lift_check(&lb, 2, 3).unwrap());
        let mut bad = (*lb.matrix(2, 3)).clone();
        bad.set(0, 0, q(2));
        assert!(!is_block_swap(2, 2, 3, &bad));
        let diag = lifted(vec![vec![-1]]);
        assert!(permutation_lift_check(&diag, 1, 1).is_err());
    }
}
