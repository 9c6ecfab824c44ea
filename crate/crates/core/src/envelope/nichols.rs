use std::fmt;
use std::sync::Arc;

use crate::braiding::BraidedSpace;
use crate::error::{Error, Result};
use crate::exactla::{DenseMatrix, SubspaceBasis};
use crate::quotient::{ideal_span, IdealPresentation, QuotientAlgebra, DEFAULT_SLACK_BUDGET};
use crate::scalar::Field;
use crate::tensoralg::{TensorElement, TruncatedTensorAlgebra, Word};

use super::bracket::TrivialBracket;
use super::tower::{compat_witness, run_tower, tower_step, TowerRun, TowerState};

/// Outcome of the trivial-bracket tower.
#[derive(Clone, Debug)]
pub struct RankReport<F> {
    pub degree: usize,
    /// Number of steps before `I_{n+1} = I_n`.
    pub rank: usize,
    /// Graded dimensions of each stage `S^[k]`.
    pub stage_dims: Vec<Vec<usize>>,
    pub run: TowerRun<F>,
}

impl<F> fmt::Display for RankReport<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "combinatorial rank {} (at truncation {})", self.rank, self.degree)
    }
}

pub fn combinatorial_rank<F: Field>(bs: Arc<BraidedSpace<F>>, degree: usize) -> Result<RankReport<F>> {
    let t = Arc::new(TruncatedTensorAlgebra::new(bs, degree));
    let run = run_tower(t, &TrivialBracket, super::max_stages())?;
    let rank = run.stabilized_at.ok_or_else(|| Error::Assertion("trivial tower stopped without stabilizing".into()))?;
    let stage_dims = run.stages.iter().map(|s| s.quotient().graded_dims()).collect();
    Ok(RankReport { degree, rank, stage_dims, run })
}

/// The stabilized trivial tower `S^[∞]` in degrees `≤ D`.
#[derive(Clone, Debug)]
pub struct NicholsReport<F> {
    pub degree: usize,
    pub graded_dims: Vec<usize>,
    pub basis: Vec<Word>,
    /// A minimal generating set of the defining ideal, by increasing degree.
    pub relations: Vec<TensorElement<F>>,
    pub rank: usize,
    pub run: TowerRun<F>,
}

impl<F: Field> NicholsReport<F> {
    pub fn total_dim(&self) -> usize {
        self.graded_dims.iter().sum()
    }

    pub fn quotient(&self) -> &Arc<QuotientAlgebra<F>> {
        self.run.final_stage().quotient()
    }

    pub fn ideal(&self) -> &IdealPresentation<F> {
        self.run.final_stage().ideal()
    }
}

pub fn nichols_truncation<F: Field>(bs: Arc<BraidedSpace<F>>, degree: usize) -> Result<NicholsReport<F>> {
    let report = combinatorial_rank(bs, degree)?;
    let last = report.run.final_stage();
    let q = last.quotient();
    let t = q.base().clone();
    let relations = minimal_relations(&t, last.ideal().generators())?;
    Ok(NicholsReport {
        degree,
        graded_dims: q.graded_dims(),
        basis: q.reps().to_vec(),
        relations,
        rank: report.rank,
        run: report.run,
    })
}

/// A subset of `gens` generating the same ideal, scanning by increasing
/// degree and dropping every candidate already in the ideal of those kept.
pub fn minimal_relations<F: Field>(
    t: &TruncatedTensorAlgebra<F>,
    gens: &[TensorElement<F>],
) -> Result<Vec<TensorElement<F>>> {
    let mut cands: Vec<&TensorElement<F>> = gens.iter().filter(|g| !g.is_zero()).collect();
    cands.sort_by_key(|g| g.top_degree());
    let mut kept: Vec<TensorElement<F>> = Vec::new();
    let mut ideal = IdealPresentation::zero(t.n(), t.degree());
    for g in cands {
        if !ideal.contains(g)? {
            kept.push(g.clone());
            ideal = ideal_span(t, &kept, DEFAULT_SLACK_BUDGET)?;
        }
    }
    Ok(kept)
}

/// Whether every relation of the Nichols algebra vanishes in the final stage,
/// which by the vanishing criterion is equivalent to `b = b_tr`.
pub fn detect_trivial_bracket<F: Field>(run: &TowerRun<F>, relations: &[TensorElement<F>]) -> Result<bool> {
    let ideal = run.final_stage().ideal();
    for w in relations {
        if !ideal.contains(w)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sufficient evidence that `(V, c)` is of class S, if any.
pub fn class_s_evidence<F: Field>(bs: &BraidedSpace<F>) -> Option<String> {
    let char0 = F::characteristic() == 0;
    let size = bs.matrix().rows();
    let c2 = bs.matrix().mul(bs.matrix()).ok()?;
    if char0 && c2 == DenseMatrix::identity(size) {
        return Some("c² = Id in characteristic 0".into());
    }
    let poly = bs.minimal_polynomial();
    let mark = match poly.len() {
        // c = q·Id satisfies (c − q)(c + 1) = 0
        2 => Some(-poly[0].clone()),
        _ => bs.hecke_mark(),
    };
    let q = mark?;
    // In characteristic p every nonzero scalar is a root of unity; over Q only ±1.
    if char0 && q != F::one() && q != -F::one() {
        return Some(format!("Hecke type (c − q)(c + 1) = 0 with q = {q} not a root of unity"));
    }
    None
}

/// The single-step quotient `T/((Id − β)[E(V,c)])`.
#[derive(Clone, Debug)]
pub struct RankOneEnvelope<F> {
    pub quotient: Arc<QuotientAlgebra<F>>,
    /// Stage 1 of the tower with the bracket `Id_V + β`.
    pub stage_one: TowerState<F>,
    pub class_s: Option<String>,
    /// Under class-S evidence: whether stage 1 is already the limit, i.e.
    /// `P(U) = i(V)` with `i` injective.
    pub limit_reached: Option<bool>,
}

/// `beta` holds one `n × dim E_d` matrix per degree `d = 2..=D`, against the
/// bases of [`TruncatedTensorAlgebra::e_space`]; an empty slice means `β = 0`.
pub fn rank_one_envelope<F: Field>(
    bs: Arc<BraidedSpace<F>>,
    beta: &[DenseMatrix<F>],
    degree: usize,
) -> Result<RankOneEnvelope<F>> {
    let t = Arc::new(TruncatedTensorAlgebra::new(bs.clone(), degree));
    let n = t.n();
    let e = t.e_space()?;
    let zero = beta.is_empty();
    let beta: Vec<DenseMatrix<F>> =
        if zero { e.iter().map(|p| DenseMatrix::zeros(n, p.dim())).collect() } else { beta.to_vec() };
    if beta.len() != e.len() {
        return Err(Error::Dimension(format!("β needs {} degree pieces, got {}", e.len(), beta.len())));
    }
    for (k, (b, p)) in beta.iter().zip(&e).enumerate() {
        if b.rows() != n || b.cols() != p.dim() {
            return Err(Error::Dimension(format!(
                "β in degree {} must be {n}x{}, got {}x{}",
                k + 2,
                p.dim(),
                b.rows(),
                b.cols()
            )));
        }
    }
    let mut gens = Vec::new();
    for (k, (b, p)) in beta.iter().zip(&e).enumerate() {
        for (s, v) in p.vectors().iter().enumerate() {
            let mut g = TensorElement::from_vector(n, k + 2, v);
            for (j, x) in b.column(s).into_iter().enumerate() {
                g.add_term(Word::letter(j), -x);
            }
            gens.push(g);
        }
    }
    let ideal = ideal_span(&t, &gens, DEFAULT_SLACK_BUDGET)?;
    let quotient = Arc::new(QuotientAlgebra::new(t.clone(), ideal)?);

    // The same quotient as the first tower step for b = Id_V + β.
    let initial = TowerState::initial(t)?;
    let b0 = extend_beta(&initial, &e, &beta)?;
    if let Some(w) = compat_witness(&initial, &b0)? {
        return Err(Error::IncompatibleBracket(w));
    }
    let stage_one = tower_step(&initial, &b0)?;
    if stage_one.ideal() != quotient.ideal() {
        return Err(Error::Assertion("T/((Id - β)E) differs from stage 1 of the tower".into()));
    }
    let class_s = class_s_evidence(&bs);
    let limit_reached = class_s.as_ref().map(|_| stage_one.section_injective() && stage_one.primitives().dim() == n);
    if zero && limit_reached == Some(false) {
        return Err(Error::Assertion("class-S evidence but S^[1] has primitives beyond V".into()));
    }
    Ok(RankOneEnvelope { quotient, stage_one, class_s, limit_reached })
}

/// `b^[0] = Id_V ⊕ β` on the canonical basis of `P(T)`.
fn extend_beta<F: Field>(
    ts: &TowerState<F>,
    e: &[SubspaceBasis<F>],
    beta: &[DenseMatrix<F>],
) -> Result<DenseMatrix<F>> {
    let n = ts.n();
    let basis = ts.primitives().elements();
    let mut b = DenseMatrix::zeros(n, basis.len());
    for (s, p) in basis.iter().enumerate() {
        let x = ts.lift(p);
        let mut col = x.to_vector(n, 1);
        for (k, (piece, bk)) in e.iter().zip(beta).enumerate() {
            let v = x.to_vector(n, k + 2);
            if v.iter().all(|c| c.is_zero()) {
                continue;
            }
            let coords = piece
                .coordinates(&v)
                .ok_or_else(|| Error::Assertion(format!("degree-{} part of a primitive outside E", k + 2)))?;
            for (c, y) in col.iter_mut().zip(bk.mul_vec(&coords)?) {
                *c = c.clone() + y;
            }
        }
        for (j, c) in col.into_iter().enumerate() {
            b.set(j, s, c);
        }
    }
    Ok(b)
}

/// The ideals `Ker(π₀ⁿ)` of a tower next to the chain `I_{k+1}/I_k = P(T/I_k) ∩ I/I_k`.
#[derive(Clone, Debug)]
pub struct IdealChain<F> {
    pub tower: Vec<IdealPresentation<F>>,
    pub chain: Vec<IdealPresentation<F>>,
    /// First index and degree where the two disagree, if any.
    pub mismatch: Option<(usize, usize)>,
}

impl<F: Field> IdealChain<F> {
    pub fn agrees(&self) -> bool {
        self.mismatch.is_none() && self.tower.len() == self.chain.len()
    }

    /// `dim(I_k ∩ F_d)` per stage, for the tower side.
    pub fn dims(&self) -> Vec<Vec<usize>> {
        self.tower.iter().map(IdealPresentation::dims).collect()
    }
}

/// Builds the chain for `target` (the stabilized ideal of `run` by default)
/// and compares it with the tower stage by stage, per degree.
pub fn ideal_tower<F: Field>(run: &TowerRun<F>, target: Option<&IdealPresentation<F>>) -> Result<IdealChain<F>> {
    let target = target.unwrap_or_else(|| run.final_stage().ideal());
    let t = run.final_stage().quotient().base().clone();
    let tower: Vec<IdealPresentation<F>> = run.stages.iter().map(|s| s.ideal().clone()).collect();
    let mut chain = vec![IdealPresentation::zero(t.n(), t.degree())];
    let budget = super::max_stages() + 1;
    loop {
        let current = chain.last().expect("nonempty").clone();
        let q = QuotientAlgebra::new(t.clone(), current.clone())?;
        let image = q.span_of(&target.basis_elements().iter().map(|x| q.nf_vec(x)).collect::<Result<Vec<_>>>()?);
        let prims = q.quotient_primitives(t.degree())?;
        let pspace = q.span_of(&prims.elements());
        let meet = pspace.intersect(&image)?;
        if meet.is_zero() {
            break;
        }
        let mut gens = current.generators().to_vec();
        gens.extend(meet.vectors().iter().map(|v| q.element(&q.sparse(v))));
        let next = ideal_span(&t, &gens, DEFAULT_SLACK_BUDGET)?;
        if next == current {
            break;
        }
        chain.push(next);
        if chain.len() > budget {
            return Err(Error::StageCap(budget));
        }
    }
    let mut mismatch = None;
    for (k, (a, b)) in tower.iter().zip(&chain).enumerate() {
        if a != b {
            let (da, db) = (a.dims(), b.dims());
            let d = (0..da.len()).find(|&d| da[d] != db[d] || a.piece(d) != b.piece(d)).unwrap_or(t.degree());
            mismatch = Some((k, d));
            break;
        }
    }
    if mismatch.is_none() && tower.len() != chain.len() {
        mismatch = Some((tower.len().min(chain.len()), 0));
    }
    Ok(IdealChain { tower, chain, mismatch })
}
