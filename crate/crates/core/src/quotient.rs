//! Two-sided ideals of the truncated tensor algebra and the quotient
//! bialgebras `U = T/I`.
//!
//! Filtered spaces `F_d` (words of length `≤ d`) use the column order of
//! [`filtered_order`](crate::tensoralg::filtered_order): higher degree first.
//! RREF pivots are therefore leading monomials and the coset representatives
//! are the non-pivot words.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use crate::braiding::word_index;
use crate::error::{Error, Result};
use crate::exactla::{axpy_sparse, DenseMatrix, EchelonBuilder, SparseRow, SubspaceBasis};
use crate::scalar::Field;
use crate::tensoralg::{kernel_of_sparse_rows, TensorElement, TruncatedTensorAlgebra, Word};

/// Slack budget for filtered ideal closure.
pub const DEFAULT_SLACK_BUDGET: usize = 4;

/// Column indexing of `F_cap`: degree descending, lexicographic within a degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredIndex {
    n: usize,
    cap: usize,
    offsets: Vec<usize>,
}

impl FilteredIndex {
    pub fn new(n: usize, cap: usize) -> Self {
        let mut offsets = vec![0; cap + 1];
        let mut acc = 0;
        for k in (0..=cap).rev() {
            offsets[k] = acc;
            acc += n.pow(k as u32);
        }
        FilteredIndex { n, cap, offsets }
    }

    pub fn dim(&self) -> usize {
        self.offsets[0] + 1
    }

    pub fn col(&self, w: &Word) -> usize {
        self.offsets[w.len()] + word_index(self.n, w.letters())
    }

    pub fn degree_of(&self, col: usize) -> usize {
        (0..=self.cap).find(|&k| col >= self.offsets[k]).expect("column in range")
    }

    pub fn word(&self, col: usize) -> Word {
        let k = self.degree_of(col);
        Word(crate::braiding::index_word(self.n, k, col - self.offsets[k]))
    }

    fn sparse<F: Field>(&self, x: &TensorElement<F>) -> SparseRow<F> {
        let mut row: Vec<_> = x.terms().iter().map(|(w, c)| (self.col(w), c.clone())).collect();
        row.sort_by_key(|(c, _)| *c);
        row
    }
}

/// Per-degree filtration pieces `I∩F_d`, `d ≤ D`, of a two-sided ideal.
///
/// Held as one fully reduced echelon basis of `I∩F_D` keyed by pivot column;
/// `I∩F_d` is spanned by the rows whose pivot has degree `≤ d`.
#[derive(Clone, Debug)]
pub struct IdealPresentation<F> {
    generators: Vec<TensorElement<F>>,
    index: FilteredIndex,
    rows: BTreeMap<usize, SparseRow<F>>,
    slack: usize,
    graded: bool,
}

impl<F: Field> PartialEq for IdealPresentation<F> {
    /// Equality of the ideals at truncation, regardless of generators.
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.rows == other.rows
    }
}

impl<F: Field> IdealPresentation<F> {
    pub fn zero(n: usize, degree: usize) -> Self {
        IdealPresentation {
            generators: Vec::new(),
            index: FilteredIndex::new(n, degree),
            rows: BTreeMap::new(),
            slack: 0,
            graded: true,
        }
    }

    pub fn generators(&self) -> &[TensorElement<F>] {
        &self.generators
    }

    pub fn degree(&self) -> usize {
        self.index.cap
    }

    pub fn index(&self) -> &FilteredIndex {
        &self.index
    }

    /// Slack at which the filtration pieces stabilized (0 for graded generators).
    pub fn slack(&self) -> usize {
        self.slack
    }

    pub fn is_graded(&self) -> bool {
        self.graded
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    /// `dim(I∩F_d)` for `d = 0..=D`.
    pub fn dims(&self) -> Vec<usize> {
        let mut per = vec![0; self.degree() + 1];
        for &p in self.rows.keys() {
            per[self.index.degree_of(p)] += 1;
        }
        let mut acc = 0;
        per.iter()
            .map(|c| {
                acc += c;
                acc
            })
            .collect()
    }

    /// `I∩F_d` as a subspace of `F_d` (ambient in the filtered order of `F_d`).
    pub fn piece(&self, d: usize) -> SubspaceBasis<F> {
        let sub = FilteredIndex::new(self.index.n, d);
        let vecs = self
            .rows
            .iter()
            .filter(|(p, _)| self.index.degree_of(**p) <= d)
            .map(|(_, row)| {
                let mut v = vec![F::zero(); sub.dim()];
                for (c, x) in row {
                    v[sub.col(&self.index.word(*c))] = x.clone();
                }
                v
            })
            .collect();
        SubspaceBasis::span(sub.dim(), vecs).expect("consistent ambient")
    }

    /// Basis elements of `I∩F_D`.
    pub fn basis_elements(&self) -> Vec<TensorElement<F>> {
        self.rows.values().map(|r| self.element(r)).collect()
    }

    fn element(&self, row: &[(usize, F)]) -> TensorElement<F> {
        TensorElement::from_terms(row.iter().map(|(c, x)| (self.index.word(*c), x.clone())))
    }

    /// Reduction modulo `I∩F_D`; the result has no pivot columns.
    pub fn reduce_sparse(&self, v: &[(usize, F)]) -> SparseRow<F> {
        let mut out = v.to_vec();
        for (c, x) in v {
            if let Some(row) = self.rows.get(c) {
                out = axpy_sparse(&out, &-x.clone(), row);
            }
        }
        out
    }

    pub fn contains(&self, x: &TensorElement<F>) -> Result<bool> {
        self.check_element(x)?;
        Ok(self.reduce_sparse(&self.index.sparse(x)).is_empty())
    }

    fn check_element(&self, x: &TensorElement<F>) -> Result<()> {
        if x.is_truncated() {
            return Err(Error::Truncated(self.degree()));
        }
        if x.top_degree().unwrap_or(0) > self.degree() {
            return Err(Error::Dimension(format!(
                "element of degree {} beyond truncation {}",
                x.top_degree().unwrap_or(0),
                self.degree()
            )));
        }
        Ok(())
    }

    pub fn is_subideal_of(&self, other: &Self) -> bool {
        self.rows.values().all(|r| other.reduce_sparse(r).is_empty())
    }
}

/// Two-sided ideal generated by `gens`, with filtration pieces up to `t.degree()`.
///
/// The ideal is closed under letter multiplication inside `F_{D+s}`; `s` grows until the
/// pieces `I∩F_d` agree for consecutive values. Homogeneous generators give
/// a graded ideal, for which `s = 0` is already exact.
pub fn ideal_span<F: Field>(
    t: &TruncatedTensorAlgebra<F>,
    gens: &[TensorElement<F>],
    slack_budget: usize,
) -> Result<IdealPresentation<F>> {
    let d = t.degree();
    let n = t.n();
    for g in gens {
        if g.is_truncated() {
            return Err(Error::Truncated(d));
        }
        if g.top_degree().unwrap_or(0) > d {
            return Err(Error::Dimension(format!("generator `{g}` above truncation degree {d}")));
        }
    }
    let gens: Vec<TensorElement<F>> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    let graded = gens.iter().all(TensorElement::is_homogeneous);
    if graded {
        let rows = closure(n, d, d, &gens);
        return Ok(IdealPresentation { generators: gens, index: FilteredIndex::new(n, d), rows, slack: 0, graded });
    }
    let mut prev: Option<BTreeMap<usize, SparseRow<F>>> = None;
    for s in 0..=slack_budget {
        let rows = closure(n, d, d + s, &gens);
        if let Some(p) = &prev {
            if *p == rows {
                return Ok(IdealPresentation {
                    generators: gens,
                    index: FilteredIndex::new(n, d),
                    rows,
                    slack: s,
                    graded,
                });
            }
        }
        prev = Some(rows);
    }
    Err(Error::UnstableTruncation { degree: d, slack: slack_budget })
}

/// Fully reduced basis of `I_cap ∩ F_d`, where `I_cap` is the closure of
/// `span(gens)` under multiplication by letters on either side as long as the
/// result stays in `F_cap`. Only rows that raise the rank are multiplied again.
fn closure<F: Field>(n: usize, d: usize, cap: usize, gens: &[TensorElement<F>]) -> BTreeMap<usize, SparseRow<F>> {
    let big = FilteredIndex::new(n, cap);
    let mut ech = EchelonBuilder::new();
    let mut queue: VecDeque<SparseRow<F>> = VecDeque::new();
    for g in gens {
        if let Some(r) = ech.insert_reduced(big.sparse(g)) {
            queue.push_back(r.clone());
        }
    }
    while let Some(row) = queue.pop_front() {
        if ech.rank() == big.dim() {
            break;
        }
        if big.degree_of(row[0].0) >= cap {
            continue;
        }
        let words: Vec<(Word, F)> = row.iter().map(|(c, x)| (big.word(*c), x.clone())).collect();
        for x in 0..n {
            let letter = Word::letter(x);
            for left in [true, false] {
                let mut prod: SparseRow<F> = words
                    .iter()
                    .map(|(w, c)| (big.col(&if left { letter.concat(w) } else { w.concat(&letter) }), c.clone()))
                    .collect();
                prod.sort_by_key(|(c, _)| *c);
                if let Some(r) = ech.insert_reduced(prod) {
                    queue.push_back(r.clone());
                }
            }
        }
    }
    let small = FilteredIndex::new(n, d);
    let mut rows: BTreeMap<usize, SparseRow<F>> = BTreeMap::new();
    for row in ech.rows() {
        if big.degree_of(row[0].0) > d {
            continue;
        }
        let mapped: SparseRow<F> = row.iter().map(|(c, x)| (small.col(&big.word(*c)), x.clone())).collect();
        rows.insert(mapped[0].0, mapped);
    }
    back_substitute(rows)
}

/// Turns an echelon basis keyed by pivot into the reduced one.
fn back_substitute<F: Field>(rows: BTreeMap<usize, SparseRow<F>>) -> BTreeMap<usize, SparseRow<F>> {
    let mut done: BTreeMap<usize, SparseRow<F>> = BTreeMap::new();
    for (p, row) in rows.into_iter().rev() {
        let mut out = row.clone();
        for (c, x) in row.iter().skip(1) {
            if let Some(r) = done.get(c) {
                out = axpy_sparse(&out, &-x.clone(), r);
            }
        }
        done.insert(p, out);
    }
    done
}

/// Sparse vector over representative indices.
pub type RepVec<F> = Vec<(usize, F)>;

fn add_rep<F: Field>(acc: &mut BTreeMap<usize, F>, i: usize, v: F) {
    if v.is_zero() {
        return;
    }
    let e = acc.entry(i).or_insert_with(F::zero);
    *e = e.clone() + v;
    if e.is_zero() {
        acc.remove(&i);
    }
}

/// `U = T/I` at truncation `D`, with coset representatives the non-pivot words.
#[derive(Clone, Debug)]
pub struct QuotientAlgebra<F> {
    base: Arc<TruncatedTensorAlgebra<F>>,
    ideal: IdealPresentation<F>,
    reps: Vec<Word>,
    rep_index: HashMap<Word, usize>,
    nf: Vec<RepVec<F>>,
}

impl<F: Field> QuotientAlgebra<F> {
    pub fn new(base: Arc<TruncatedTensorAlgebra<F>>, ideal: IdealPresentation<F>) -> Result<Self> {
        if ideal.degree() != base.degree() || ideal.index.n != base.n() {
            return Err(Error::Dimension("ideal and tensor algebra truncations differ".into()));
        }
        let index = ideal.index.clone();
        let reps: Vec<Word> = (0..index.dim()).filter(|c| !ideal.rows.contains_key(c)).map(|c| index.word(c)).collect();
        let rep_index: HashMap<Word, usize> = reps.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let nf = (0..index.dim())
            .map(|c| match ideal.rows.get(&c) {
                None => vec![(rep_index[&index.word(c)], F::one())],
                Some(row) => {
                    let mut v: RepVec<F> =
                        row.iter().skip(1).map(|(k, x)| (rep_index[&index.word(*k)], -x.clone())).collect();
                    v.sort_by_key(|(i, _)| *i);
                    v
                }
            })
            .collect();
        Ok(QuotientAlgebra { base, ideal, reps, rep_index, nf })
    }

    /// The tensor algebra itself, as the quotient by the zero ideal.
    pub fn free(base: Arc<TruncatedTensorAlgebra<F>>) -> Self {
        let ideal = IdealPresentation::zero(base.n(), base.degree());
        Self::new(base, ideal).expect("matching truncation")
    }

    pub fn base(&self) -> &Arc<TruncatedTensorAlgebra<F>> {
        &self.base
    }

    pub fn ideal(&self) -> &IdealPresentation<F> {
        &self.ideal
    }

    pub fn degree(&self) -> usize {
        self.base.degree()
    }

    /// Representative words in the filtered order.
    pub fn reps(&self) -> &[Word] {
        &self.reps
    }

    pub fn rep_index(&self, w: &Word) -> Option<usize> {
        self.rep_index.get(w).copied()
    }

    /// `dim F_d(U)` for `d = 0..=D`.
    pub fn filtered_dims(&self) -> Vec<usize> {
        (0..=self.degree()).map(|d| self.reps.iter().filter(|w| w.len() <= d).count()).collect()
    }

    /// Number of representatives of each length; graded dims for graded ideals.
    pub fn graded_dims(&self) -> Vec<usize> {
        (0..=self.degree()).map(|d| self.reps.iter().filter(|w| w.len() == d).count()).collect()
    }

    /// True when no representative has length `D`, so `U` is finite at truncation.
    pub fn is_finite_at_truncation(&self) -> bool {
        self.reps.iter().all(|w| w.len() < self.degree())
    }

    pub fn nf_word(&self, w: &Word) -> Result<&RepVec<F>> {
        if w.len() > self.degree() {
            return Err(Error::Truncated(self.degree()));
        }
        Ok(&self.nf[self.ideal.index.col(w)])
    }

    /// Normal form of an element of `T`, as a combination of representatives.
    pub fn nf_vec(&self, x: &TensorElement<F>) -> Result<RepVec<F>> {
        self.ideal.check_element(x)?;
        let mut acc = BTreeMap::new();
        for (w, c) in x.terms() {
            for (i, k) in self.nf_word(w)? {
                add_rep(&mut acc, *i, c.clone() * k.clone());
            }
        }
        Ok(acc.into_iter().collect())
    }

    pub fn normal_form(&self, x: &TensorElement<F>) -> Result<TensorElement<F>> {
        Ok(self.element(&self.nf_vec(x)?))
    }

    pub fn element(&self, v: &[(usize, F)]) -> TensorElement<F> {
        TensorElement::from_terms(v.iter().map(|(i, c)| (self.reps[*i].clone(), c.clone())))
    }

    /// Dense coordinates over all representatives.
    pub fn dense(&self, v: &[(usize, F)]) -> Vec<F> {
        let mut out = vec![F::zero(); self.reps.len()];
        for (i, c) in v {
            out[*i] = c.clone();
        }
        out
    }

    pub fn sparse(&self, v: &[F]) -> RepVec<F> {
        v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i, c.clone())).collect()
    }

    /// Product of two representatives. Beyond the truncation it multiplies
    /// letter by letter, reducing after each step.
    pub fn multiply_reps(&self, a: usize, b: usize) -> Result<RepVec<F>> {
        let (u, v) = (&self.reps[a], &self.reps[b]);
        if u.len() + v.len() <= self.degree() {
            return Ok(self.nf_word(&u.concat(v))?.clone());
        }
        let mut cur: RepVec<F> = vec![(a, F::one())];
        for &l in v.letters() {
            let mut acc = BTreeMap::new();
            for (i, c) in &cur {
                let w = self.reps[*i].concat(&Word::letter(l));
                for (j, k) in self.nf_word(&w)? {
                    add_rep(&mut acc, *j, c.clone() * k.clone());
                }
            }
            cur = acc.into_iter().collect();
        }
        Ok(cur)
    }

    pub fn multiply(&self, x: &[(usize, F)], y: &[(usize, F)]) -> Result<RepVec<F>> {
        let mut acc = BTreeMap::new();
        for (i, a) in x {
            for (j, b) in y {
                for (k, c) in self.multiply_reps(*i, *j)? {
                    add_rep(&mut acc, k, a.clone() * b.clone() * c);
                }
            }
        }
        Ok(acc.into_iter().collect())
    }

    /// `Δ_U` of a representative, as `(i, j, coef)` over representative pairs.
    pub fn coproduct_rep(&self, i: usize) -> Vec<(usize, usize, F)> {
        let mut acc: BTreeMap<(usize, usize), F> = BTreeMap::new();
        for ((u, v), c) in self.base.coproduct_word(&self.reps[i]).iter() {
            let nu = self.nf_word(u).expect("factor degree within truncation");
            let nv = self.nf_word(v).expect("factor degree within truncation");
            for (a, x) in nu {
                for (b, y) in nv {
                    let k = (*a, *b);
                    let val = c.clone() * x.clone() * y.clone();
                    let e = acc.entry(k).or_insert_with(F::zero);
                    *e = e.clone() + val;
                }
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|((a, b), c)| (a, b, c)).collect()
    }

    /// Induced braiding `c_U(π u ⊗ π v) = (π⊗π) c_T(u⊗v)` on representatives.
    pub fn braid_reps(&self, i: usize, j: usize) -> Vec<(usize, usize, F)> {
        let mut acc: BTreeMap<(usize, usize), F> = BTreeMap::new();
        for (y, w, c) in self.base.braid_pair(&self.reps[i], &self.reps[j]) {
            for (a, x) in self.nf_word(&y).expect("within truncation") {
                for (b, z) in self.nf_word(&w).expect("within truncation") {
                    let e = acc.entry((*a, *b)).or_insert_with(F::zero);
                    *e = e.clone() + c.clone() * x.clone() * z.clone();
                }
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|((a, b), c)| (a, b, c)).collect()
    }

    /// Index of the unit representative, if `1 ∉ I`.
    pub fn unit_rep(&self) -> Option<usize> {
        self.rep_index(&Word::empty())
    }

    /// Primitive elements of `U` within `F_{up_to}(U)`.
    pub fn quotient_primitives(&self, up_to: usize) -> Result<QuotientPrimitives<F>> {
        if up_to > self.degree() {
            return Err(Error::Dimension(format!("filtration {up_to} beyond truncation {}", self.degree())));
        }
        let columns: Vec<usize> = (0..self.reps.len()).filter(|&i| (1..=up_to).contains(&self.reps[i].len())).collect();
        let unit = self.unit_rep();
        let mut rows: BTreeMap<(usize, usize), SparseRow<F>> = BTreeMap::new();
        for (col, &i) in columns.iter().enumerate() {
            let mut delta: BTreeMap<(usize, usize), F> = BTreeMap::new();
            for (a, b, c) in self.coproduct_rep(i) {
                delta.insert((a, b), -c);
            }
            if let Some(u) = unit {
                for key in [(i, u), (u, i)] {
                    let e = delta.entry(key).or_insert_with(F::zero);
                    *e = e.clone() + F::one();
                }
            }
            for (k, c) in delta {
                if !c.is_zero() {
                    rows.entry(k).or_default().push((col, c));
                }
            }
        }
        let basis = kernel_of_sparse_rows(columns.len(), rows.into_values());
        Ok(QuotientPrimitives { columns, degrees: Vec::new(), basis }.with_degrees(self))
    }

    /// Linear span of the given elements (in representative coordinates).
    pub fn span_of(&self, elems: &[RepVec<F>]) -> SubspaceBasis<F> {
        SubspaceBasis::span(self.reps.len(), elems.iter().map(|v| self.dense(v)).collect()).expect("ambient")
    }

    /// Whether iterated products of `gens` together with `1` span all of `F_D(U)`.
    pub fn generates_as_algebra(&self, gens: &[RepVec<F>]) -> Result<bool> {
        let Some(unit) = self.unit_rep() else {
            return Ok(true);
        };
        let mut span = self.span_of(&[vec![(unit, F::one())]]);
        let mut frontier: Vec<RepVec<F>> = vec![vec![(unit, F::one())]];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for p in &frontier {
                for g in gens {
                    let prod = match self.multiply(p, g) {
                        Ok(v) => v,
                        Err(Error::Truncated(_)) => continue,
                        Err(e) => return Err(e),
                    };
                    let dense = self.dense(&prod);
                    if !span.contains(&dense)? {
                        span = span.sum(&SubspaceBasis::span(self.reps.len(), vec![dense])?)?;
                        next.push(prod);
                    }
                }
            }
            frontier = next;
        }
        Ok(span.dim() == self.reps.len())
    }

    /// First violation of the braided-ideal conditions at truncation.
    pub fn braided_ideal_witness(&self) -> Option<String> {
        let t = &self.base;
        let words: Vec<Word> = (0..=self.degree()).flat_map(|k| t.words(k)).collect();
        for g in self.ideal.basis_elements() {
            if !t.counit(&g).is_zero() {
                return Some(format!("ε({g}) ≠ 0"));
            }
            for l in 0..t.n() {
                let x = TensorElement::letter(l);
                for prod in [g.concat_product(&x, self.degree()), x.concat_product(&g, self.degree())] {
                    if !prod.is_truncated() && !self.nf_vec(&prod).expect("within truncation").is_empty() {
                        return Some(format!("{g} times x{} leaves the ideal", l + 1));
                    }
                }
            }
            let pairs = t.coproduct(&g);
            if !self.pair_vanishes(pairs.terms().iter().map(|((u, v), c)| (u.clone(), v.clone(), c.clone()))) {
                return Some(format!("Δ({g}) ∉ I⊗T + T⊗I"));
            }
            for w in &words {
                let mut right = Vec::new();
                let mut left = Vec::new();
                for (u, c) in g.terms() {
                    for (y, z, k) in t.braid_pair(u, w) {
                        right.push((y, z, c.clone() * k));
                    }
                    for (y, z, k) in t.braid_pair(w, u) {
                        left.push((y, z, c.clone() * k));
                    }
                }
                if !self.pair_vanishes(right.into_iter()) || !self.pair_vanishes(left.into_iter()) {
                    return Some(format!("c({g} with {w}) ∉ I⊗T + T⊗I"));
                }
            }
        }
        None
    }

    pub fn check_braided_ideal(&self) -> bool {
        self.braided_ideal_witness().is_none()
    }

    // (π⊗π) of a sum of word pairs is zero
    fn pair_vanishes(&self, terms: impl Iterator<Item = (Word, Word, F)>) -> bool {
        let mut acc: BTreeMap<(usize, usize), F> = BTreeMap::new();
        for (u, v, c) in terms {
            let (Ok(nu), Ok(nv)) = (self.nf_word(&u), self.nf_word(&v)) else {
                continue;
            };
            for (a, x) in nu {
                for (b, y) in nv {
                    let e = acc.entry((*a, *b)).or_insert_with(F::zero);
                    *e = e.clone() + c.clone() * x.clone() * y.clone();
                }
            }
        }
        acc.values().all(|c| c.is_zero())
    }

    /// Structure maps restricted to representatives, for finite quotients.
    pub fn structure_tables(&self) -> Result<QuotientTables<F>> {
        if !self.is_finite_at_truncation() {
            return Err(Error::Refused(format!(
                "quotient has representatives of length {}; not finite at truncation",
                self.degree()
            )));
        }
        let r = self.reps.len();
        let mut mult = DenseMatrix::zeros(r, r * r);
        let mut comult = DenseMatrix::zeros(r * r, r);
        let mut braid = DenseMatrix::zeros(r * r, r * r);
        for i in 0..r {
            for j in 0..r {
                for (k, c) in self.multiply_reps(i, j)? {
                    mult.set(k, i * r + j, c);
                }
                for (a, b, c) in self.braid_reps(i, j) {
                    braid.set(a * r + b, i * r + j, c);
                }
            }
            for (a, b, c) in self.coproduct_rep(i) {
                comult.set(a * r + b, i, c);
            }
        }
        let unit = self.unit_rep().ok_or_else(|| Error::Refused("quotient is zero".into()))?;
        Ok(QuotientTables { mult, comult, braid, unit, words: self.reps.clone() })
    }

    /// Consistency of the descended structure on representatives: associativity
    /// for triples within the truncation, coassociativity and counit.
    pub fn check_descended_structure(&self) -> Option<String> {
        let r = self.reps.len();
        let d = self.degree();
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let len = self.reps[i].len() + self.reps[j].len() + self.reps[k].len();
                    if len > d {
                        continue;
                    }
                    let ij = self.multiply_reps(i, j).ok()?;
                    let l = self.multiply(&ij, &[(k, F::one())]).ok()?;
                    let jk = self.multiply_reps(j, k).ok()?;
                    let rr = self.multiply(&[(i, F::one())], &jk).ok()?;
                    if l != rr {
                        return Some(format!("associativity on {} {} {}", self.reps[i], self.reps[j], self.reps[k]));
                    }
                }
            }
        }
        let unit = self.unit_rep()?;
        for i in 0..r {
            let delta = self.coproduct_rep(i);
            let mut left: BTreeMap<(usize, usize, usize), F> = BTreeMap::new();
            let mut right: BTreeMap<(usize, usize, usize), F> = BTreeMap::new();
            let mut eps_l = BTreeMap::new();
            let mut eps_r = BTreeMap::new();
            for (a, b, c) in &delta {
                for (x, y, k) in self.coproduct_rep(*a) {
                    let e = left.entry((x, y, *b)).or_insert_with(F::zero);
                    *e = e.clone() + c.clone() * k;
                }
                for (x, y, k) in self.coproduct_rep(*b) {
                    let e = right.entry((*a, x, y)).or_insert_with(F::zero);
                    *e = e.clone() + c.clone() * k;
                }
                if *a == unit {
                    add_rep(&mut eps_l, *b, c.clone());
                }
                if *b == unit {
                    add_rep(&mut eps_r, *a, c.clone());
                }
            }
            left.retain(|_, c| !c.is_zero());
            right.retain(|_, c| !c.is_zero());
            if left != right {
                return Some(format!("coassociativity on {}", self.reps[i]));
            }
            let expect: BTreeMap<usize, F> = BTreeMap::from([(i, F::one())]);
            if eps_l != expect || eps_r != expect {
                return Some(format!("counit on {}", self.reps[i]));
            }
        }
        None
    }
}

/// Multiplication `r×r²`, comultiplication `r²×r` and braiding `r²×r²`
/// matrices of a finite quotient, in representative coordinates.
#[derive(Clone, Debug)]
pub struct QuotientTables<F> {
    pub mult: DenseMatrix<F>,
    pub comult: DenseMatrix<F>,
    pub braid: DenseMatrix<F>,
    pub unit: usize,
    pub words: Vec<Word>,
}

/// Primitives of a quotient in coordinates over the non-unit representatives
/// of bounded length. Columns follow the filtered order, so `P ∩ F_d` is
/// spanned by the basis rows whose pivot has degree `≤ d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientPrimitives<F> {
    columns: Vec<usize>,
    degrees: Vec<usize>,
    basis: SubspaceBasis<F>,
}

impl<F: Field> QuotientPrimitives<F> {
    fn with_degrees(mut self, q: &QuotientAlgebra<F>) -> Self {
        self.degrees = self.columns.iter().map(|&i| q.reps[i].len()).collect();
        self
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// `dim (P ∩ F_d)`.
    pub fn dim_at(&self, d: usize) -> usize {
        self.basis.pivots().iter().filter(|&&p| self.degrees[p] <= d).count()
    }

    pub fn basis(&self) -> &SubspaceBasis<F> {
        &self.basis
    }

    /// Basis elements as representative vectors.
    pub fn elements(&self) -> Vec<RepVec<F>> {
        self.basis.vectors().iter().map(|v| self.to_reps(v)).collect()
    }

    /// `Σ coefs_k · basis_k` as a representative vector.
    pub fn combine(&self, coefs: &[F]) -> RepVec<F> {
        self.to_reps(&self.basis.combine(coefs))
    }

    fn to_reps(&self, v: &[F]) -> RepVec<F> {
        v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (self.columns[k], c.clone())).collect()
    }

    /// Coordinates against the basis, if `x` is primitive.
    pub fn coordinates(&self, x: &[(usize, F)]) -> Option<Vec<F>> {
        let pos: HashMap<usize, usize> = self.columns.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let mut v = vec![F::zero(); self.columns.len()];
        for (i, c) in x {
            v[*pos.get(i)?] = c.clone();
        }
        self.basis.coordinates(&v)
    }

    /// Representative indices of the pivots (leading representative of each basis vector).
    pub fn pivot_reps(&self) -> Vec<usize> {
        self.basis.pivots().iter().map(|&p| self.columns[p]).collect()
    }

    pub fn contains(&self, x: &[(usize, F)]) -> bool {
        self.coordinates(x).is_some()
    }
}

/// Words appearing with nonzero coefficient in any element.
pub fn support<F: Field>(elems: &[TensorElement<F>]) -> BTreeSet<Word> {
    elems.iter().flat_map(|e| e.terms().keys().cloned()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braiding::{make_diagonal, make_flip};
    use crate::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn example(d: usize) -> Arc<TruncatedTensorAlgebra<Rational>> {
        let qm = DenseMatrix::from_rows(2, vec![vec![q(-1), q(1)], vec![q(-1), q(-1)]]).unwrap();
        Arc::new(TruncatedTensorAlgebra::new(Arc::new(make_diagonal(&qm).unwrap()), d))
    }

    fn flip(n: usize, d: usize) -> Arc<TruncatedTensorAlgebra<Rational>> {
        Arc::new(TruncatedTensorAlgebra::new(Arc::new(make_flip(n)), d))
    }

    fn el(s: &str, n: usize) -> TensorElement<Rational> {
        TensorElement::parse(s, n).unwrap()
    }

    #[test]
    fn filtered_index_round_trip() {
        let ix = FilteredIndex::new(2, 3);
        assert_eq!(ix.dim(), 15);
        assert_eq!(ix.col(&Word(vec![0, 0, 0])), 0);
        assert_eq!(ix.col(&Word::empty()), 14);
        for c in 0..15 {
            assert_eq!(ix.col(&ix.word(c)), c);
        }
    }

    #[test]
    fn zero_ideal_is_full_quotient() {
        let t = flip(2, 3);
        let i = ideal_span(&t, &[], DEFAULT_SLACK_BUDGET).unwrap();
        let u = QuotientAlgebra::new(t, i).unwrap();
        assert_eq!(u.graded_dims(), vec![1, 2, 4, 8]);
        assert!(u.check_braided_ideal());
    }

    #[test]
    fn letter_ideal() {
        let t = flip(2, 3);
        let i = ideal_span(&t, &[el("x1", 2)], DEFAULT_SLACK_BUDGET).unwrap();
        let u = QuotientAlgebra::new(t, i).unwrap();
        assert_eq!(u.graded_dims(), vec![1, 1, 1, 1]);
        assert_eq!(u.reps().last().unwrap(), &Word::empty());
        assert!(u.reps().iter().all(|w| w.letters().iter().all(|&l| l == 1)));
    }

    #[test]
    fn squares_ideal_dims() {
        let t = example(4);
        let i = ideal_span(&t, &[el("x1.x1", 2), el("x2.x2", 2)], DEFAULT_SLACK_BUDGET).unwrap();
        assert!(i.is_graded());
        let u = QuotientAlgebra::new(t, i).unwrap();
        // square-free words: alternating letters
        assert_eq!(u.graded_dims(), vec![1, 2, 2, 2, 2]);
        assert!(u.normal_form(&el("x1.x1", 2)).unwrap().is_zero());
        assert!(u.check_braided_ideal());
        assert!(u.check_descended_structure().is_none());
    }

    #[test]
    fn normal_form_idempotent_and_linear() {
        let t = example(4);
        let i = ideal_span(&t, &[el("x1.x2 + x2.x1", 2)], DEFAULT_SLACK_BUDGET).unwrap();
        let u = QuotientAlgebra::new(t, i).unwrap();
        let x = el("x2.x1.x2 - 3*x1.x2.x1 + x1", 2);
        let y = el("x2.x2.x1 + 1/2*x2", 2);
        let nx = u.normal_form(&x).unwrap();
        assert_eq!(u.normal_form(&nx).unwrap(), nx);
        assert!(u.normal_form(&x.sub(&nx)).unwrap().is_zero());
        let lhs = u.normal_form(&x.add(&y.scale(&q(5)))).unwrap();
        let rhs = nx.add(&u.normal_form(&y).unwrap().scale(&q(5)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn nonhomogeneous_ideal_stabilizes() {
        // x1.x2 - x2.x1 - x1 under the flip: U of the 2-dim non-abelian Lie algebra.
        let t = flip(2, 4);
        let i = ideal_span(&t, &[el("x1.x2 - x2.x1 - x1", 2)], DEFAULT_SLACK_BUDGET).unwrap();
        assert!(!i.is_graded());
        let u = QuotientAlgebra::new(t, i).unwrap();
        assert_eq!(u.filtered_dims(), vec![1, 3, 6, 10, 15]);
        assert!(u.check_descended_structure().is_none());
    }

    #[test]
    fn graded_shortcut_matches_slack_loop() {
        let t = example(4);
        let gens = [el("x1.x1", 2), el("x2.x2", 2)];
        let graded = ideal_span(&t, &gens, DEFAULT_SLACK_BUDGET).unwrap();
        let forced = IdealPresentation { rows: closure(2, 4, 6, &gens), ..graded.clone() };
        assert_eq!(graded, forced);
    }

    #[test]
    fn flip_quotient_primitives() {
        let t = flip(2, 4);
        let u = QuotientAlgebra::free(t.clone());
        let p = u.quotient_primitives(3).unwrap();
        assert_eq!(p.dim_at(1), 2);
        assert_eq!(p.dim_at(2), 3);
        assert_eq!(p.dim_at(3), 5);
        let i = ideal_span(&t, &[el("x1.x2 - x2.x1", 2)], DEFAULT_SLACK_BUDGET).unwrap();
        let s = QuotientAlgebra::new(t, i).unwrap();
        let p = s.quotient_primitives(4).unwrap();
        assert_eq!(p.dim(), 2);
    }

    #[test]
    fn generation() {
        let t = flip(2, 3);
        let u = QuotientAlgebra::free(t);
        let x1 = vec![(u.rep_index(&Word::letter(0)).unwrap(), q(1))];
        let x2 = vec![(u.rep_index(&Word::letter(1)).unwrap(), q(1))];
        assert!(u.generates_as_algebra(&[x1.clone(), x2]).unwrap());
        assert!(!u.generates_as_algebra(&[x1]).unwrap());
        assert!(!u.generates_as_algebra(&[]).unwrap());
    }

    #[test]
    fn non_braided_ideal_witness() {
        // x1.x2 is not primitive under the flip; its ideal is not a coideal.
        let t = flip(2, 3);
        let i = ideal_span(&t, &[el("x1.x2", 2)], DEFAULT_SLACK_BUDGET).unwrap();
        let u = QuotientAlgebra::new(t, i).unwrap();
        let w = u.braided_ideal_witness().expect("not a coideal");
        assert!(w.contains('Δ'), "{w}");
    }
}
