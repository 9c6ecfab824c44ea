//! The braided tensor bialgebra `T(V,c)` truncated at a degree `D`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::braiding::{word_index, words_of_length, BraidedSpace, LiftedBraiding};
use crate::error::{Error, Result};
use crate::exactla::{kernel_basis, DenseMatrix, EchelonBuilder, SparseRow, SubspaceBasis};
use crate::scalar::{renders_negative, Field};

/// A word in the letters `0..n`; displayed 1-based as `x1.x2`.
///
/// Ordered by length first, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Word(pub Vec<usize>);

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(i: usize) -> Self {
        Word(vec![i])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|l| format!("x{}", l + 1)).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// Orders words by degree descending, then lexicographically. This is the
/// global column order of filtered spaces, so RREF pivots are leading terms.
pub fn filtered_order(a: &Word, b: &Word) -> Ordering {
    b.len().cmp(&a.len()).then_with(|| a.0.cmp(&b.0))
}

fn add_term<K: Ord, F: Field>(map: &mut BTreeMap<K, F>, k: K, v: F) {
    if v.is_zero() {
        return;
    }
    match map.get_mut(&k) {
        Some(x) => {
            *x = x.clone() + v;
            if x.is_zero() {
                map.remove(&k);
            }
        }
        None => {
            map.insert(k, v);
        }
    }
}

fn render_terms<F: Field>(terms: impl Iterator<Item = (String, F)>) -> String {
    let mut out = String::new();
    for (body, c) in terms {
        let neg = renders_negative(&c);
        let mag = if neg { -c } else { c };
        let term = if mag.is_one() { body } else { format!("{mag}*{body}") };
        if out.is_empty() {
            out = if neg { format!("-{term}") } else { term };
        } else {
            out.push_str(if neg { " - " } else { " + " });
            out.push_str(&term);
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// Finitely supported linear combination of words.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TensorElement<F> {
    terms: BTreeMap<Word, F>,
    truncated: bool,
}

impl<F: Field> Default for TensorElement<F> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<F: Field> TensorElement<F> {
    pub fn zero() -> Self {
        TensorElement { terms: BTreeMap::new(), truncated: false }
    }

    pub fn one() -> Self {
        Self::word(Word::empty())
    }

    pub fn word(w: Word) -> Self {
        Self::monomial(w, F::one())
    }

    pub fn letter(i: usize) -> Self {
        Self::word(Word::letter(i))
    }

    pub fn monomial(w: Word, c: F) -> Self {
        let mut e = Self::zero();
        e.add_term(w, c);
        e
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Word, F)>) -> Self {
        let mut e = Self::zero();
        for (w, c) in terms {
            e.add_term(w, c);
        }
        e
    }

    /// Element of `V^{⊗d}` from coordinates in the lexicographic word basis.
    pub fn from_vector(n: usize, d: usize, v: &[F]) -> Self {
        Self::from_terms(words_of_length(n, d).into_iter().zip(v.iter().cloned()).map(|(w, c)| (Word(w), c)))
    }

    /// Coordinates of the degree-`d` component in the lexicographic basis.
    pub fn to_vector(&self, n: usize, d: usize) -> Vec<F> {
        let mut v = vec![F::zero(); n.pow(d as u32)];
        for (w, c) in &self.terms {
            if w.len() == d {
                v[word_index(n, &w.0)] = c.clone();
            }
        }
        v
    }

    pub fn add_term(&mut self, w: Word, c: F) {
        add_term(&mut self.terms, w, c);
    }

    pub fn terms(&self) -> &BTreeMap<Word, F> {
        &self.terms
    }

    pub fn coefficient(&self, w: &Word) -> F {
        self.terms.get(w).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True if some product feeding this element exceeded the truncation degree.
    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn mark_truncated(&mut self) {
        self.truncated = true;
    }

    pub fn top_degree(&self) -> Option<usize> {
        self.terms.keys().map(Word::len).max()
    }

    pub fn homogeneous_part(&self, d: usize) -> Self {
        Self::from_terms(self.terms.iter().filter(|(w, _)| w.len() == d).map(|(w, c)| (w.clone(), c.clone())))
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(Word::len);
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out.truncated |= other.truncated;
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-F::one()))
    }

    pub fn scale(&self, s: &F) -> Self {
        let mut out = Self::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c.clone() * s.clone());
        }
        out.truncated = self.truncated;
        out
    }

    /// Concatenation product; terms above `max_degree` are dropped and flagged.
    pub fn concat_product(&self, other: &Self, max_degree: usize) -> Self {
        let mut out = Self::zero();
        out.truncated = self.truncated || other.truncated;
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                if u.len() + v.len() > max_degree {
                    out.truncated = true;
                    continue;
                }
                out.add_term(u.concat(v), a.clone() * b.clone());
            }
        }
        out
    }

    /// Parses the text form, e.g. `3*x1.x2.x1 - 1/2*x2 + 1`.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let mut out = Self::zero();
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() || s == "0" {
            return Ok(out);
        }
        let mut chunks: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (i, ch) in s.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 {
                chunks.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            } else if ch == '-' && i == 0 {
                neg = true;
            } else if ch == '+' && i == 0 {
            } else {
                cur.push(ch);
            }
        }
        chunks.push((neg, cur));
        for (neg, chunk) in chunks {
            if chunk.is_empty() {
                return Err(Error::Parse(format!("empty term in `{text}`")));
            }
            let (coef, body) = match chunk.split_once('*') {
                Some((c, b)) => (F::parse_scalar(c)?, b.to_string()),
                None if chunk.starts_with('x') => (F::one(), chunk.clone()),
                None => (F::parse_scalar(&chunk)?, "1".to_string()),
            };
            let w = parse_word(&body, n)?;
            out.add_term(w, if neg { -coef } else { coef });
        }
        Ok(out)
    }
}

fn parse_word(body: &str, n: usize) -> Result<Word> {
    if body == "1" {
        return Ok(Word::empty());
    }
    let mut letters = Vec::new();
    for part in body.split('.') {
        let idx = part
            .strip_prefix('x')
            .and_then(|d| d.parse::<usize>().ok())
            .ok_or_else(|| Error::Parse(format!("bad letter `{part}`")))?;
        if idx == 0 || idx > n {
            return Err(Error::Parse(format!("letter x{idx} outside x1..x{n}")));
        }
        letters.push(idx - 1);
    }
    Ok(Word(letters))
}

impl<F: Field> fmt::Display for TensorElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut keys: Vec<&Word> = self.terms.keys().collect();
        keys.sort_by(|a, b| filtered_order(a, b));
        let s = render_terms(keys.into_iter().map(|w| (w.to_string(), self.terms[w].clone())));
        write!(f, "{s}")
    }
}

/// Element of `T ⊗_c T`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TwoSidedElement<F> {
    terms: BTreeMap<(Word, Word), F>,
    truncated: bool,
}

impl<F: Field> Default for TwoSidedElement<F> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<F: Field> TwoSidedElement<F> {
    pub fn zero() -> Self {
        TwoSidedElement { terms: BTreeMap::new(), truncated: false }
    }

    pub fn pure(u: Word, v: Word) -> Self {
        let mut e = Self::zero();
        e.add_term(u, v, F::one());
        e
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((Word, Word), F)>) -> Self {
        let mut e = Self::zero();
        for ((u, v), c) in terms {
            e.add_term(u, v, c);
        }
        e
    }

    pub fn add_term(&mut self, u: Word, v: Word, c: F) {
        add_term(&mut self.terms, (u, v), c);
    }

    pub fn terms(&self) -> &BTreeMap<(Word, Word), F> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((u, v), c) in &other.terms {
            out.add_term(u.clone(), v.clone(), c.clone());
        }
        out.truncated |= other.truncated;
        out
    }

    pub fn scale(&self, s: &F) -> Self {
        let mut out = Self::zero();
        for ((u, v), c) in &self.terms {
            out.add_term(u.clone(), v.clone(), c.clone() * s.clone());
        }
        out.truncated = self.truncated;
        out
    }

    /// Terms whose bidegree is `(a, b)`.
    pub fn bidegree_part(&self, a: usize, b: usize) -> Self {
        Self::from_terms(
            self.terms.iter().filter(|((u, v), _)| u.len() == a && v.len() == b).map(|(k, c)| (k.clone(), c.clone())),
        )
    }
}

impl<F: Field> fmt::Display for TwoSidedElement<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = render_terms(self.terms.iter().map(|((u, v), c)| (format!("{u}⊗{v}"), c.clone())));
        write!(f, "{s}")
    }
}

type Triple = (Word, Word, Word);

/// `T(V,c)` in degrees `0..=D`, with the braiding-dependent coproduct.
#[derive(Debug)]
pub struct TruncatedTensorAlgebra<F> {
    lifted: LiftedBraiding<F>,
    degree: usize,
    memo: RwLock<HashMap<Word, Arc<Vec<((Word, Word), F)>>>>,
}

impl<F: Field> Clone for TruncatedTensorAlgebra<F> {
    fn clone(&self) -> Self {
        TruncatedTensorAlgebra {
            lifted: self.lifted.clone(),
            degree: self.degree,
            memo: RwLock::new(self.memo.read().expect("memo lock").clone()),
        }
    }
}

impl<F: Field> TruncatedTensorAlgebra<F> {
    pub fn new(space: Arc<BraidedSpace<F>>, degree: usize) -> Self {
        TruncatedTensorAlgebra { lifted: LiftedBraiding::new(space), degree, memo: RwLock::new(HashMap::new()) }
    }

    pub fn space(&self) -> &Arc<BraidedSpace<F>> {
        self.lifted.space()
    }

    pub fn lifted(&self) -> &LiftedBraiding<F> {
        &self.lifted
    }

    pub fn n(&self) -> usize {
        self.space().dim()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Words of length exactly `d`, lexicographic.
    pub fn words(&self, d: usize) -> Vec<Word> {
        words_of_length(self.n(), d).into_iter().map(Word).collect()
    }

    /// Words of length `≤ d` in the filtered order.
    pub fn filtered_words(&self, d: usize) -> Vec<Word> {
        (0..=d).rev().flat_map(|k| self.words(k)).collect()
    }

    pub fn multiply(&self, x: &TensorElement<F>, y: &TensorElement<F>) -> TensorElement<F> {
        x.concat_product(y, self.degree)
    }

    /// `c_T(u⊗v)` as `(y, v')` pairs.
    pub fn braid_pair(&self, u: &Word, v: &Word) -> Vec<(Word, Word, F)> {
        self.lifted.apply_pair(&u.0, &v.0).into_iter().map(|(y, w, c)| (Word(y), Word(w), c)).collect()
    }

    pub fn braid(&self, x: &TwoSidedElement<F>) -> TwoSidedElement<F> {
        let mut out = TwoSidedElement::zero();
        out.truncated = x.truncated;
        for ((u, v), c) in &x.terms {
            for (y, w, k) in self.braid_pair(u, v) {
                out.add_term(y, w, c.clone() * k);
            }
        }
        out
    }

    /// `(u⊗w)(u'⊗w') = Σ u·y ⊗ w''·w'` where `c(w⊗u') = Σ y⊗w''`.
    pub fn multiply_twosided(&self, a: &TwoSidedElement<F>, b: &TwoSidedElement<F>) -> TwoSidedElement<F> {
        let mut out = TwoSidedElement::zero();
        out.truncated = a.truncated || b.truncated;
        for ((u, w), x) in &a.terms {
            for ((u2, w2), y) in &b.terms {
                if u.len() + u2.len() > self.degree || w.len() + w2.len() > self.degree {
                    out.truncated = true;
                    continue;
                }
                for (p, q, k) in self.braid_pair(w, u2) {
                    out.add_term(u.concat(&p), q.concat(w2), x.clone() * y.clone() * k);
                }
            }
        }
        out
    }

    /// `Δ` of a single word, memoized.
    pub fn coproduct_word(&self, w: &Word) -> Arc<Vec<((Word, Word), F)>> {
        if let Some(v) = self.memo.read().expect("memo lock").get(w) {
            return v.clone();
        }
        let result: Vec<((Word, Word), F)> = if w.is_empty() {
            vec![((Word::empty(), Word::empty()), F::one())]
        } else {
            let prefix = Word(w.0[..w.len() - 1].to_vec());
            let x = Word::letter(w.0[w.len() - 1]);
            let mut acc: BTreeMap<(Word, Word), F> = BTreeMap::new();
            for ((u, v), c) in self.coproduct_word(&prefix).iter() {
                // (u⊗v)(1⊗x) = u⊗vx
                add_term(&mut acc, (u.clone(), v.concat(&x)), c.clone());
                // (u⊗v)(x⊗1) = Σ u·y ⊗ v'
                for (y, v2, k) in self.braid_pair(v, &x) {
                    add_term(&mut acc, (u.concat(&y), v2), c.clone() * k);
                }
            }
            acc.into_iter().collect()
        };
        let result = Arc::new(result);
        self.memo.write().expect("memo lock").entry(w.clone()).or_insert_with(|| result.clone()).clone()
    }

    pub fn coproduct(&self, x: &TensorElement<F>) -> TwoSidedElement<F> {
        let mut out = TwoSidedElement::zero();
        out.truncated = x.truncated;
        for (w, c) in &x.terms {
            for ((u, v), k) in self.coproduct_word(w).iter() {
                out.add_term(u.clone(), v.clone(), c.clone() * k.clone());
            }
        }
        out
    }

    /// `δ(x) = x⊗1 + 1⊗x − Δ(x)` on the augmentation-ideal part of `x`.
    pub fn reduced_coproduct(&self, x: &TensorElement<F>) -> TwoSidedElement<F> {
        let aug = TensorElement::from_terms(
            x.terms.iter().filter(|(w, _)| !w.is_empty()).map(|(w, c)| (w.clone(), c.clone())),
        );
        let mut out = self.coproduct(&aug).scale(&-F::one());
        for (w, c) in &aug.terms {
            out.add_term(w.clone(), Word::empty(), c.clone());
            out.add_term(Word::empty(), w.clone(), c.clone());
        }
        out.truncated = x.truncated;
        out
    }

    pub fn counit(&self, x: &TensorElement<F>) -> F {
        x.coefficient(&Word::empty())
    }

    /// Primitive elements of `V^{⊗d}` as a subspace of the lexicographic word basis.
    pub fn primitives_of_degree(&self, d: usize) -> Result<SubspaceBasis<F>> {
        if d == 0 || d > self.degree {
            return Err(Error::Dimension(format!("degree {d} outside 1..={}", self.degree)));
        }
        let words = self.words(d);
        let mut rows: BTreeMap<(Word, Word), SparseRow<F>> = BTreeMap::new();
        for (j, w) in words.iter().enumerate() {
            for ((u, v), c) in self.coproduct_word(w).iter() {
                if !u.is_empty() && !v.is_empty() {
                    rows.entry((u.clone(), v.clone())).or_default().push((j, c.clone()));
                }
            }
        }
        Ok(kernel_of_sparse_rows(words.len(), rows.into_values()))
    }

    /// Degree-`d` pieces of `E(V,c)` for `d = 2..=D`.
    pub fn e_space(&self) -> Result<Vec<SubspaceBasis<F>>> {
        if self.degree < 2 {
            return Err(Error::Dimension("E-space needs truncation degree at least 2".into()));
        }
        (2..=self.degree).map(|d| self.primitives_of_degree(d)).collect()
    }

    /// Whether the homogeneous pieces `(d, L_d)` form a categorical subspace,
    /// tested against every word of degree `≤ D − d` on the other side.
    pub fn is_categorical_graded(&self, pieces: &[(usize, SubspaceBasis<F>)]) -> Result<bool> {
        let n = self.n();
        for (d, l) in pieces {
            if l.ambient_dim() != n.pow(*d as u32) {
                return Err(Error::Dimension(format!("piece of degree {d} has wrong ambient")));
            }
            for b in 0..=self.degree - d {
                for w in self.words(b) {
                    for v in l.vectors() {
                        let p = TensorElement::from_vector(n, *d, v);
                        let mut right = TwoSidedElement::zero();
                        let mut left = TwoSidedElement::zero();
                        for (u, c) in &p.terms {
                            right.add_term(u.clone(), w.clone(), c.clone());
                            left.add_term(w.clone(), u.clone(), c.clone());
                        }
                        // c(L⊗W) ⊆ W⊗L: group by the left factor
                        if !self.factor_in(&self.braid(&right), 1, *d, l) {
                            return Ok(false);
                        }
                        // c(W⊗L) ⊆ L⊗W: group by the right factor
                        if !self.factor_in(&self.braid(&left), 0, *d, l) {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    // Every slice of `x` with the other factor fixed lies in `l` (in position `side`).
    fn factor_in(&self, x: &TwoSidedElement<F>, side: usize, d: usize, l: &SubspaceBasis<F>) -> bool {
        let n = self.n();
        let mut slices: BTreeMap<Word, TensorElement<F>> = BTreeMap::new();
        for ((u, v), c) in &x.terms {
            let (fixed, moving) = if side == 1 { (u, v) } else { (v, u) };
            slices.entry(fixed.clone()).or_default().add_term(moving.clone(), c.clone());
        }
        slices.values().all(|e| e.terms.keys().all(|w| w.len() == d) && l.contains(&e.to_vector(n, d)).unwrap_or(false))
    }

    fn apply_delta_left(&self, x: &BTreeMap<(Word, Word), F>) -> BTreeMap<Triple, F> {
        let mut out = BTreeMap::new();
        for ((u, v), c) in x {
            for ((a, b), k) in self.coproduct_word(u).iter() {
                add_term(&mut out, (a.clone(), b.clone(), v.clone()), c.clone() * k.clone());
            }
        }
        out
    }

    fn apply_delta_right(&self, x: &BTreeMap<(Word, Word), F>) -> BTreeMap<Triple, F> {
        let mut out = BTreeMap::new();
        for ((u, v), c) in x {
            for ((a, b), k) in self.coproduct_word(v).iter() {
                add_term(&mut out, (u.clone(), a.clone(), b.clone()), c.clone() * k.clone());
            }
        }
        out
    }

    // c on the first two factors of a triple
    fn braid12(&self, x: &BTreeMap<Triple, F>) -> BTreeMap<Triple, F> {
        let mut out = BTreeMap::new();
        for ((a, b, z), c) in x {
            for (p, q, k) in self.braid_pair(a, b) {
                add_term(&mut out, (p, q, z.clone()), c.clone() * k);
            }
        }
        out
    }

    // c on the last two factors of a triple
    fn braid23(&self, x: &BTreeMap<Triple, F>) -> BTreeMap<Triple, F> {
        let mut out = BTreeMap::new();
        for ((a, b, z), c) in x {
            for (p, q, k) in self.braid_pair(b, z) {
                add_term(&mut out, (a.clone(), p, q), c.clone() * k);
            }
        }
        out
    }

    /// Exhaustive check of the braided bialgebra axioms at this truncation.
    pub fn check_bialgebra_axioms(&self) -> AxiomReport {
        let d = self.degree;
        let binary = d.min(6);
        let ternary = d.min(5);
        let all: Vec<Word> = (0..=d).flat_map(|k| self.words(k)).collect();
        let upto = |k: usize| all.iter().filter(move |w| w.len() <= k);
        let pairs: Vec<(&Word, &Word)> =
            upto(binary).flat_map(|u| upto(binary - u.len()).map(move |v| (u, v))).collect();
        let triples: Vec<(&Word, &Word, &Word)> = upto(ternary)
            .flat_map(|u| {
                upto(ternary - u.len()).flat_map(move |v| upto(ternary - u.len() - v.len()).map(move |w| (u, v, w)))
            })
            .collect();
        let mut report = AxiomReport { degree: d, checks: Vec::new() };

        report.push(
            "yang-baxter",
            self.space().yang_baxter_witness().map(|[i, j, k]| format!("x{}⊗x{}⊗x{}", i + 1, j + 1, k + 1)),
        );

        let assoc = triples.iter().find_map(|(u, v, w)| {
            let (a, b, c) = (
                TensorElement::word((*u).clone()),
                TensorElement::word((*v).clone()),
                TensorElement::word((*w).clone()),
            );
            let l = self.multiply(&self.multiply(&a, &b), &c);
            let r = self.multiply(&a, &self.multiply(&b, &c));
            (l != r).then(|| format!("({u})({v})({w})"))
        });
        report.push("associativity", assoc);

        let unit = upto(d).find_map(|w| {
            let x = TensorElement::word(w.clone());
            let one = TensorElement::one();
            (self.multiply(&one, &x) != x || self.multiply(&x, &one) != x).then(|| w.to_string())
        });
        report.push("unit", unit);

        let coassoc = all.iter().find_map(|w| {
            let delta: BTreeMap<(Word, Word), F> = self.coproduct_word(w).iter().cloned().collect();
            (self.apply_delta_left(&delta) != self.apply_delta_right(&delta)).then(|| w.to_string())
        });
        report.push("coassociativity", coassoc);

        let counit = all.iter().find_map(|w| {
            let delta = self.coproduct_word(w);
            let mut left = TensorElement::zero();
            let mut right = TensorElement::zero();
            for ((u, v), c) in delta.iter() {
                if u.is_empty() {
                    left.add_term(v.clone(), c.clone());
                }
                if v.is_empty() {
                    right.add_term(u.clone(), c.clone());
                }
            }
            let x = TensorElement::word(w.clone());
            (left != x || right != x).then(|| w.to_string())
        });
        report.push("counit", counit);

        let br1 = pairs.iter().find_map(|(u, v)| {
            let lhs = self.coproduct(&TensorElement::word(u.concat(v)));
            let rhs = self.multiply_twosided(
                &self.coproduct(&TensorElement::word((*u).clone())),
                &self.coproduct(&TensorElement::word((*v).clone())),
            );
            (lhs != rhs).then(|| format!("Δ({u}·{v})"))
        });
        report.push("Br1", br1);

        let br2 = triples.iter().find_map(|(u, v, w)| {
            let lhs: BTreeMap<(Word, Word), F> =
                self.braid_pair(&u.concat(v), w).into_iter().map(|(a, b, c)| ((a, b), c)).collect();
            let start = BTreeMap::from([(((*u).clone(), (*v).clone(), (*w).clone()), F::one())]);
            let rhs = merge_last(self.braid12(&self.braid23(&start)));
            (lhs != rhs).then(|| format!("({u}, {v}, {w})"))
        });
        report.push("Br2", br2);

        let br3 = triples.iter().find_map(|(u, v, w)| {
            let lhs: BTreeMap<(Word, Word), F> =
                self.braid_pair(u, &v.concat(w)).into_iter().map(|(a, b, c)| ((a, b), c)).collect();
            let start = BTreeMap::from([(((*u).clone(), (*v).clone(), (*w).clone()), F::one())]);
            let rhs = merge_first(self.braid23(&self.braid12(&start)));
            (lhs != rhs).then(|| format!("({u}, {v}, {w})"))
        });
        report.push("Br3", br3);

        let br4 = upto(d).find_map(|w| {
            let a = self.braid_pair(&Word::empty(), w);
            let b = self.braid_pair(w, &Word::empty());
            let ok = a == vec![(w.clone(), Word::empty(), F::one())] && b == vec![(Word::empty(), w.clone(), F::one())];
            (!ok).then(|| w.to_string())
        });
        report.push("Br4", br4);

        let br5 = pairs.iter().find_map(|(u, v)| {
            let braided: BTreeMap<(Word, Word), F> =
                self.braid_pair(u, v).into_iter().map(|(a, b, c)| ((a, b), c)).collect();
            let lhs = self.apply_delta_left(&braided);
            let start = BTreeMap::from([(((*u).clone(), (*v).clone()), F::one())]);
            let rhs = self.braid23(&self.braid12(&self.apply_delta_right(&start)));
            (lhs != rhs).then(|| format!("({u}, {v})"))
        });
        report.push("Br5", br5);

        let br6 = pairs.iter().find_map(|(u, v)| {
            let braided: BTreeMap<(Word, Word), F> =
                self.braid_pair(u, v).into_iter().map(|(a, b, c)| ((a, b), c)).collect();
            let lhs = self.apply_delta_right(&braided);
            let start = BTreeMap::from([(((*u).clone(), (*v).clone()), F::one())]);
            let rhs = self.braid12(&self.braid23(&self.apply_delta_left(&start)));
            (lhs != rhs).then(|| format!("({u}, {v})"))
        });
        report.push("Br6", br6);

        // c preserves bidegree, and ε lives in degree 0, where c is the identity.
        let br7 = pairs.iter().find_map(|(u, v)| {
            let img = self.braid_pair(u, v);
            let ok = img.iter().all(|(a, b, _)| a.len() == v.len() && b.len() == u.len())
                && (!(u.is_empty() || v.is_empty()) || img.len() == 1);
            (!ok).then(|| format!("({u}, {v})"))
        });
        report.push("Br7", br7);

        report
    }
}

fn merge_last<F: Field>(x: BTreeMap<Triple, F>) -> BTreeMap<(Word, Word), F> {
    let mut out = BTreeMap::new();
    for ((a, b, c), k) in x {
        add_term(&mut out, (a, b.concat(&c)), k);
    }
    out
}

fn merge_first<F: Field>(x: BTreeMap<Triple, F>) -> BTreeMap<(Word, Word), F> {
    let mut out = BTreeMap::new();
    for ((a, b, c), k) in x {
        add_term(&mut out, (a.concat(&b), c), k);
    }
    out
}

/// Kernel of the linear map whose rows are given sparsely, on `cols` columns.
pub fn kernel_of_sparse_rows<F: Field>(cols: usize, rows: impl IntoIterator<Item = SparseRow<F>>) -> SubspaceBasis<F> {
    let mut ech = EchelonBuilder::new();
    for r in rows {
        if ech.rank() == cols {
            break;
        }
        ech.insert(r);
    }
    let mut m = DenseMatrix::zeros(ech.rank(), cols);
    for (i, row) in ech.rows().enumerate() {
        for (j, x) in row {
            m.set(i, *j, x.clone());
        }
    }
    kernel_basis(&m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomCheck {
    pub name: String,
    pub passed: bool,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub degree: usize,
    pub checks: Vec<AxiomCheck>,
}

impl AxiomReport {
    pub(crate) fn push(&mut self, name: &str, witness: Option<String>) {
        self.checks.push(AxiomCheck { name: name.to_string(), passed: witness.is_none(), witness });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn get(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}
