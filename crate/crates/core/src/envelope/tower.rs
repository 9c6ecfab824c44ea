use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactla::{kernel_basis, solve, DenseMatrix};
use crate::quotient::{
    ideal_span, IdealPresentation, QuotientAlgebra, QuotientPrimitives, RepVec, DEFAULT_SLACK_BUDGET,
};
use crate::scalar::Field;
use crate::tensoralg::{TensorElement, TruncatedTensorAlgebra, Word};

use super::bracket::{BracketRule, StageBracket};

type PairVec<F> = BTreeMap<(usize, usize), F>;

fn add_pair<F: Field>(acc: &mut PairVec<F>, k: (usize, usize), v: F) {
    if v.is_zero() {
        return;
    }
    let e = acc.entry(k).or_insert_with(F::zero);
    *e = e.clone() + v;
    if e.is_zero() {
        acc.remove(&k);
    }
}

/// One stage `U^[n] = T/I_n` of the tower, with its primitives `P^[n]`
/// (filtration `≤ D`) and the section `i^[n]: V → P^[n]`.
#[derive(Clone, Debug)]
pub struct TowerState<F> {
    stage: usize,
    quotient: Arc<QuotientAlgebra<F>>,
    primitives: QuotientPrimitives<F>,
    section: Vec<RepVec<F>>,
}

impl<F: Field> TowerState<F> {
    pub fn initial(t: Arc<TruncatedTensorAlgebra<F>>) -> Result<Self> {
        let ideal = IdealPresentation::zero(t.n(), t.degree());
        Self::from_ideal(0, t, ideal)
    }

    pub fn from_ideal(stage: usize, t: Arc<TruncatedTensorAlgebra<F>>, ideal: IdealPresentation<F>) -> Result<Self> {
        let n = t.n();
        let d = t.degree();
        let quotient = Arc::new(QuotientAlgebra::new(t, ideal)?);
        let primitives = quotient.quotient_primitives(d)?;
        let section = (0..n).map(|j| quotient.nf_word(&Word::letter(j)).cloned()).collect::<Result<Vec<_>>>()?;
        Ok(TowerState { stage, quotient, primitives, section })
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn quotient(&self) -> &Arc<QuotientAlgebra<F>> {
        &self.quotient
    }

    pub fn ideal(&self) -> &IdealPresentation<F> {
        self.quotient.ideal()
    }

    pub fn primitives(&self) -> &QuotientPrimitives<F> {
        &self.primitives
    }

    /// `i^[n](x_j)` in representative coordinates.
    pub fn section(&self) -> &[RepVec<F>] {
        &self.section
    }

    pub fn n(&self) -> usize {
        self.section.len()
    }

    pub fn degree(&self) -> usize {
        self.quotient.degree()
    }

    /// `dim V^[n]`.
    pub fn section_rank(&self) -> usize {
        self.quotient.span_of(&self.section).dim()
    }

    pub fn section_injective(&self) -> bool {
        self.section_rank() == self.n()
    }

    /// `dim P^[n] × n` matrix whose column `j` holds the P-coordinates of `i(x_j)`.
    pub fn section_coordinates(&self) -> Result<DenseMatrix<F>> {
        let cols = self
            .section
            .iter()
            .enumerate()
            .map(|(j, v)| {
                self.primitives
                    .coordinates(v)
                    .ok_or_else(|| Error::Assertion(format!("i(x{}) is not primitive at stage {}", j + 1, self.stage)))
            })
            .collect::<Result<Vec<_>>>()?;
        DenseMatrix::from_columns(self.primitives.dim(), &cols)
    }

    /// The element of `T` spelled by a representative vector.
    pub fn lift(&self, z: &[(usize, F)]) -> TensorElement<F> {
        self.quotient.element(z)
    }

    /// `i b (z)` for a primitive `z`, in representative coordinates.
    pub fn apply_ib(&self, b: &DenseMatrix<F>, z: &[(usize, F)]) -> Result<RepVec<F>> {
        let coords =
            self.primitives.coordinates(z).ok_or_else(|| Error::Assertion("argument is not primitive".into()))?;
        let beta = b.mul_vec(&coords)?;
        Ok(self.combine_section(&beta))
    }

    /// `Σ β_j i(x_j)`.
    pub fn combine_section(&self, beta: &[F]) -> RepVec<F> {
        let mut acc = BTreeMap::new();
        for (bj, sj) in beta.iter().zip(&self.section) {
            for (i, c) in sj {
                let e = acc.entry(*i).or_insert_with(F::zero);
                *e = e.clone() + bj.clone() * c.clone();
            }
        }
        acc.into_iter().filter(|(_, c): &(usize, F)| !c.is_zero()).collect()
    }

    fn braid_vecs(&self, x: &[(usize, F)], y: &[(usize, F)]) -> PairVec<F> {
        let mut acc = PairVec::new();
        for (i, a) in x {
            for (j, b) in y {
                for (p, q, c) in self.quotient.braid_reps(*i, *j) {
                    add_pair(&mut acc, (p, q), a.clone() * b.clone() * c);
                }
            }
        }
        acc
    }

    fn check_shape(&self, b: &DenseMatrix<F>) -> Result<()> {
        if b.rows() != self.n() || b.cols() != self.primitives.dim() {
            return Err(Error::Dimension(format!(
                "stage-{} bracket must be {}x{} (V × P^[{}]), got {}x{}",
                self.stage,
                self.n(),
                self.primitives.dim(),
                self.stage,
                b.rows(),
                b.cols()
            )));
        }
        Ok(())
    }

    /// Precomputed data for both compatibility equations.
    fn compat_data(&self) -> Result<CompatData<F>> {
        let n = self.n();
        let basis = self.primitives.elements();
        let mut cvv = vec![vec![PairVec::new(); n]; n];
        for j in 0..n {
            for k in 0..n {
                cvv[j][k] = self.braid_vecs(&self.section[j], &self.section[k]);
            }
        }
        let mut eq1 = Vec::new();
        let mut eq2 = Vec::new();
        for (s, p) in basis.iter().enumerate() {
            for k in 0..n {
                // c(p ⊗ v) must lie in U ⊗ P; slice by the left representative.
                let z = self.braid_vecs(p, &self.section[k]);
                eq1.push((s, k, self.slices(&z, true)?));
                // c(v ⊗ p) must lie in P ⊗ U; slice by the right representative.
                let z = self.braid_vecs(&self.section[k], p);
                eq2.push((s, k, self.slices(&z, false)?));
            }
        }
        Ok(CompatData { cvv, eq1, eq2 })
    }

    fn slices(&self, z: &PairVec<F>, by_left: bool) -> Result<Vec<(usize, Vec<F>)>> {
        let mut groups: BTreeMap<usize, RepVec<F>> = BTreeMap::new();
        for ((a, b), c) in z {
            let (fixed, moving) = if by_left { (*a, *b) } else { (*b, *a) };
            groups.entry(fixed).or_default().push((moving, c.clone()));
        }
        groups
            .into_iter()
            .map(|(fixed, mut v)| {
                v.sort_by_key(|(i, _)| *i);
                let coords = self.primitives.coordinates(&v).ok_or_else(|| {
                    Error::IncompatibleBracket(format!(
                        "braiding does not preserve P^[{}] against V^[{}]",
                        self.stage, self.stage
                    ))
                })?;
                Ok((fixed, coords))
            })
            .collect()
    }
}

struct CompatData<F> {
    cvv: Vec<Vec<PairVec<F>>>,
    // (primitive index s, letter k, slices (fixed rep, P-coordinates))
    eq1: Vec<(usize, usize, Vec<(usize, Vec<F>)>)>,
    eq2: Vec<(usize, usize, Vec<(usize, Vec<F>)>)>,
}

impl<F: Field> CompatData<F> {
    /// Residual of both equations; linear in `b`. Keys: (equation, s, k, rep pair).
    fn residual(&self, ts: &TowerState<F>, b: &DenseMatrix<F>) -> BTreeMap<(usize, usize, usize, usize, usize), F> {
        let mut out = BTreeMap::new();
        for (eq, data) in [(1usize, &self.eq1), (2usize, &self.eq2)] {
            for (s, k, slices) in data {
                let mut acc = PairVec::new();
                let beta = b.column(*s);
                for (j, bj) in beta.iter().enumerate() {
                    if bj.is_zero() {
                        continue;
                    }
                    // eq1: c(ib(p) ⊗ v);  eq2: c(v ⊗ ib(p))
                    let src = if eq == 1 { &self.cvv[j][*k] } else { &self.cvv[*k][j] };
                    for (key, c) in src {
                        add_pair(&mut acc, *key, bj.clone() * c.clone());
                    }
                }
                for (fixed, coords) in slices {
                    let image = ts.combine_section(&b.mul_vec(coords).expect("shape checked"));
                    for (i, c) in image {
                        let key = if eq == 1 { (*fixed, i) } else { (i, *fixed) };
                        add_pair(&mut acc, key, -c);
                    }
                }
                for ((p, q), c) in acc {
                    out.insert((eq, *s, *k, p, q), c);
                }
            }
        }
        out
    }
}

/// First violated compatibility equation, if any.
pub fn compat_witness<F: Field>(ts: &TowerState<F>, b: &DenseMatrix<F>) -> Result<Option<String>> {
    ts.check_shape(b)?;
    let data = match ts.compat_data() {
        Ok(d) => d,
        Err(Error::IncompatibleBracket(msg)) => return Ok(Some(msg)),
        Err(e) => return Err(e),
    };
    let res = data.residual(ts, b);
    Ok(res.keys().next().map(|(eq, s, k, _, _)| {
        let p = ts.lift(&ts.primitives.elements()[*s]);
        format!(
            "equation {} fails for primitive {} against x{} at stage {}",
            if *eq == 1 { "c(ib⊗V) = (V⊗ib)c" } else { "c(V⊗ib) = (ib⊗V)c" },
            p,
            k + 1,
            ts.stage
        )
    }))
}

pub fn check_bracket_compat<F: Field>(ts: &TowerState<F>, b: &DenseMatrix<F>) -> Result<bool> {
    Ok(compat_witness(ts, b)?.is_none())
}

/// `b∘i = Id_V`.
pub fn check_split<F: Field>(ts: &TowerState<F>, b: &DenseMatrix<F>) -> Result<bool> {
    ts.check_shape(b)?;
    Ok(b.mul(&ts.section_coordinates()?)? == DenseMatrix::identity(ts.n()))
}

/// The trivial bracket: the coefficients of a primitive on the letters.
pub fn trivial_bracket_step<F: Field>(ts: &TowerState<F>) -> DenseMatrix<F> {
    let n = ts.n();
    let basis = ts.primitives.elements();
    let mut b = DenseMatrix::zeros(n, basis.len());
    for (s, p) in basis.iter().enumerate() {
        for (i, c) in p {
            let w = &ts.quotient.reps()[*i];
            if w.len() == 1 {
                b.set(w.letters()[0], s, c.clone());
            }
        }
    }
    b
}

/// All brackets at this stage satisfying both compatibility equations and
/// the split condition, as an affine space of `n × dim P` matrices
/// (entry `(j, s)` is variable `j·dim P + s`).
#[derive(Clone, Debug)]
pub struct BracketConstraints<F> {
    pub rows: usize,
    pub cols: usize,
    pub particular: DenseMatrix<F>,
    pub directions: Vec<DenseMatrix<F>>,
}

impl<F: Field> BracketConstraints<F> {
    /// Whether every admissible bracket sends `z` (P-coordinates) to `value`.
    pub fn forces(&self, z: &[F], value: &[F]) -> bool {
        self.particular.mul_vec(z).map(|v| v == value).unwrap_or(false)
            && self.directions.iter().all(|d| d.mul_vec(z).map(|v| v.iter().all(|x| x.is_zero())).unwrap_or(false))
    }
}

pub fn bracket_constraint_space<F: Field>(ts: &TowerState<F>) -> Result<Option<BracketConstraints<F>>> {
    let n = ts.n();
    let m = ts.primitives.dim();
    let data = ts.compat_data()?;
    let unit = |j: usize, s: usize| {
        let mut e = DenseMatrix::zeros(n, m);
        e.set(j, s, F::one());
        e
    };
    // Columns of the linear system: residual of each elementary matrix.
    let mut keys: BTreeMap<(usize, usize, usize, usize, usize), usize> = BTreeMap::new();
    let mut columns: Vec<BTreeMap<(usize, usize, usize, usize, usize), F>> = Vec::new();
    for j in 0..n {
        for s in 0..m {
            let r = data.residual(ts, &unit(j, s));
            for k in r.keys() {
                let len = keys.len();
                keys.entry(*k).or_insert(len);
            }
            columns.push(r);
        }
    }
    let sec = ts.section_coordinates()?;
    let compat_rows = keys.len();
    let split_rows = n * n;
    let mut a = DenseMatrix::zeros(compat_rows + split_rows, n * m);
    let mut rhs = vec![F::zero(); compat_rows + split_rows];
    for (var, col) in columns.iter().enumerate() {
        for (k, v) in col {
            a.set(keys[k], var, v.clone());
        }
    }
    // (b·sec)[j][k] = Σ_s b[j][s] sec[s][k] = δ_jk
    for j in 0..n {
        for k in 0..n {
            let row = compat_rows + j * n + k;
            for s in 0..m {
                a.set(row, j * m + s, sec.get(s, k).clone());
            }
            if j == k {
                rhs[row] = F::one();
            }
        }
    }
    let Some((x, ker)) = solve(&a, &rhs)? else {
        return Ok(None);
    };
    let to_matrix = |v: &[F]| DenseMatrix::new(n, m, v.to_vec()).expect("n·m entries");
    Ok(Some(BracketConstraints {
        rows: n,
        cols: m,
        particular: to_matrix(&x),
        directions: ker.vectors().iter().map(|v| to_matrix(v)).collect(),
    }))
}

/// `U^[n+1] = U^[n] / ((Id − i b)[P^[n]])`, realized as `T/I_{n+1}`.
pub fn tower_step<F: Field>(ts: &TowerState<F>, b: &DenseMatrix<F>) -> Result<TowerState<F>> {
    if let Some(w) = compat_witness(ts, b)? {
        return Err(Error::IncompatibleBracket(w));
    }
    let t = ts.quotient.base().clone();
    let basis = ts.primitives.elements();
    let mut gens: Vec<TensorElement<F>> = ts.ideal().generators().to_vec();
    for (s, p) in basis.iter().enumerate() {
        let mut g = ts.lift(p);
        for (j, bj) in b.column(s).into_iter().enumerate() {
            g.add_term(Word::letter(j), -bj);
        }
        if !g.is_zero() {
            gens.push(g);
        }
    }
    let ideal = ideal_span(&t, &gens, DEFAULT_SLACK_BUDGET)?;
    if check_split(ts, b)? {
        // With b∘i = Id the same quotient is cut out by Ker b.
        let ker = kernel_basis(b);
        let mut alt: Vec<TensorElement<F>> = ts.ideal().generators().to_vec();
        for v in ker.vectors() {
            alt.push(ts.lift(&ts.primitives.combine(v)));
        }
        let alt_ideal = ideal_span(&t, &alt, DEFAULT_SLACK_BUDGET)?;
        if alt_ideal != ideal {
            return Err(Error::Assertion(format!(
                "stage {}: quotient by Ker b differs from quotient by (Id - ib)[P]",
                ts.stage
            )));
        }
    }
    TowerState::from_ideal(ts.stage + 1, t, ideal)
}

/// A run of the tower until `I_{n+1} = I_n` at truncation.
#[derive(Clone, Debug)]
pub struct TowerRun<F> {
    pub rule: String,
    pub stages: Vec<TowerState<F>>,
    pub brackets: Vec<DenseMatrix<F>>,
    pub splits: Vec<bool>,
    /// First `n` with `I_{n+1} = I_n`, if reached.
    pub stabilized_at: Option<usize>,
    /// Why the run stopped early, if it did.
    pub stopped: Option<String>,
}

impl<F: Field> TowerRun<F> {
    pub fn final_stage(&self) -> &TowerState<F> {
        self.stages.last().expect("at least the initial stage")
    }

    pub fn degree(&self) -> usize {
        self.final_stage().degree()
    }
}

pub fn run_tower<F: Field>(
    t: Arc<TruncatedTensorAlgebra<F>>,
    rule: &dyn BracketRule<F>,
    max_stages: usize,
) -> Result<TowerRun<F>> {
    let mut run = TowerRun {
        rule: rule.name(),
        stages: vec![TowerState::initial(t)?],
        brackets: Vec::new(),
        splits: Vec::new(),
        stabilized_at: None,
        stopped: None,
    };
    for k in 0..max_stages {
        let ts = run.final_stage();
        let b = match rule.stage(ts)? {
            StageBracket::Map(b) => b,
            StageBracket::Undefined(why) => {
                run.stopped = Some(why);
                return Ok(run);
            }
        };
        let split = check_split(ts, &b)?;
        let next = tower_step(ts, &b)?;
        let same = next.ideal() == ts.ideal();
        run.brackets.push(b);
        run.splits.push(split);
        if same {
            run.stabilized_at = Some(k);
            return Ok(run);
        }
        run.stages.push(next);
    }
    Err(Error::StageCap(max_stages))
}

/// `i_U` injective at truncation: the run stabilized, every stage split, and
/// `V` survives in the final stage.
pub fn check_implicit_jacobi<F: Field>(run: &TowerRun<F>) -> bool {
    run.stabilized_at.is_some() && run.splits.iter().all(|&s| s) && run.final_stage().section_injective()
}
