use std::sync::{Arc, OnceLock};

use crate::braiding::{make_flip, BraidedSpace};
use crate::error::{Error, Result};
use crate::exactla::{DenseMatrix, SubspaceBasis};
use crate::quotient::{ideal_span, QuotientAlgebra, DEFAULT_SLACK_BUDGET};
use crate::scalar::Field;
use crate::tensoralg::{TensorElement, TruncatedTensorAlgebra, Word};

use super::tower::{run_tower, trivial_bracket_step, TowerRun, TowerState};

/// Value of a bracket rule at one stage.
#[derive(Clone, Debug)]
pub enum StageBracket<F> {
    /// `b^[n]` as an `n × dim P^[n]` matrix against the canonical primitive basis.
    Map(DenseMatrix<F>),
    /// The rule has no value at this stage; the run stops here.
    Undefined(String),
}

/// A source of stage brackets `b^[n]: P^[n] → V`.
pub trait BracketRule<F: Field> {
    fn name(&self) -> String;
    fn stage(&self, ts: &TowerState<F>) -> Result<StageBracket<F>>;
}

/// Projection of each primitive onto its degree-one component.
#[derive(Clone, Copy, Debug, Default)]
pub struct TrivialBracket;

impl<F: Field> BracketRule<F> for TrivialBracket {
    fn name(&self) -> String {
        "trivial".into()
    }

    fn stage(&self, ts: &TowerState<F>) -> Result<StageBracket<F>> {
        Ok(StageBracket::Map(trivial_bracket_step(ts)))
    }
}

/// User-supplied matrices for the first stages, trivial afterwards.
#[derive(Clone, Debug)]
pub struct ExplicitBracket<F> {
    pub stages: Vec<DenseMatrix<F>>,
}

impl<F: Field> BracketRule<F> for ExplicitBracket<F> {
    fn name(&self) -> String {
        format!("explicit ({} stage(s), trivial afterwards)", self.stages.len())
    }

    fn stage(&self, ts: &TowerState<F>) -> Result<StageBracket<F>> {
        Ok(StageBracket::Map(match self.stages.get(ts.stage()) {
            Some(b) => b.clone(),
            None => trivial_bracket_step(ts),
        }))
    }
}

/// Structure constants `[x_i, x_j] = Σ_k c[i][j][k] x_k` of a bracket on `V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureConstants<F> {
    n: usize,
    c: Vec<Vec<Vec<F>>>,
}

impl<F: Field> StructureConstants<F> {
    /// Rejects non-antisymmetric input, naming the offending indices.
    pub fn new(c: Vec<Vec<Vec<F>>>) -> Result<Self> {
        let n = c.len();
        for (i, row) in c.iter().enumerate() {
            if row.len() != n || row.iter().any(|v| v.len() != n) {
                return Err(Error::Dimension(format!("structure constants must be {n}x{n}x{n} (row {})", i + 1)));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if c[i][j][k] != -c[j][i][k].clone() {
                        return Err(Error::Refused(format!(
                            "structure constants not antisymmetric: [x{0},x{1}] and [x{1},x{0}] differ in x{2}",
                            i + 1,
                            j + 1,
                            k + 1
                        )));
                    }
                }
            }
        }
        Ok(StructureConstants { n, c })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn raw(&self) -> &[Vec<Vec<F>>] {
        &self.c
    }

    pub fn bracket(&self, x: &[F], y: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); self.n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o = o.clone() + xi.clone() * yj.clone() * self.c[i][j][k].clone();
                }
            }
        }
        out
    }

    fn unit(&self, i: usize) -> Vec<F> {
        let mut v = vec![F::zero(); self.n];
        v[i] = F::one();
        v
    }

    /// First triple `(i, j, k)` whose Jacobiator is nonzero, with its value.
    pub fn jacobi_witness(&self) -> Option<([usize; 3], Vec<F>)> {
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    let (a, b, c) = (self.unit(i), self.unit(j), self.unit(k));
                    let t1 = self.bracket(&a, &self.bracket(&b, &c));
                    let t2 = self.bracket(&b, &self.bracket(&c, &a));
                    let t3 = self.bracket(&c, &self.bracket(&a, &b));
                    let s: Vec<F> = (0..self.n).map(|m| t1[m].clone() + t2[m].clone() + t3[m].clone()).collect();
                    if s.iter().any(|v| !v.is_zero()) {
                        return Some(([i, j, k], s));
                    }
                }
            }
        }
        None
    }

    /// `x_i x_j − x_j x_i − [x_i, x_j]` for `i < j`.
    pub fn presentation(&self) -> Vec<TensorElement<F>> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                let mut g = TensorElement::zero();
                g.add_term(Word(vec![i, j]), F::one());
                g.add_term(Word(vec![j, i]), -F::one());
                for (k, v) in self.c[i][j].iter().enumerate() {
                    g.add_term(Word::letter(k), -v.clone());
                }
                out.push(g);
            }
        }
        out
    }
}

/// Value in `V` of a primitive of `T(V, flip)` under the Lie bracket, via the
/// Dynkin idempotent: a homogeneous Lie element `p` of degree `d` equals
/// `(1/d) Σ coeff_w [w]` with `[w]` left-normed.
pub fn dynkin_evaluate<F: Field>(sc: &StructureConstants<F>, p: &TensorElement<F>) -> Result<Vec<F>> {
    if F::characteristic() != 0 {
        return Err(Error::Refused("Dynkin evaluation needs characteristic 0".into()));
    }
    let mut out = vec![F::zero(); sc.dim()];
    for (w, coef) in p.terms() {
        if w.is_empty() {
            return Err(Error::Assertion("primitive with a constant term".into()));
        }
        let mut acc = sc.unit(w.letters()[0]);
        for &l in &w.letters()[1..] {
            acc = sc.bracket(&acc, &sc.unit(l));
        }
        let scale = coef.clone() * F::from_i64(w.len() as i64).inverse().expect("char 0");
        for (o, a) in out.iter_mut().zip(acc) {
            *o = o.clone() + scale.clone() * a;
        }
    }
    Ok(out)
}

/// Stage brackets induced by a classical Lie bracket on `(V, flip)`.
///
/// Stage 0 is the Dynkin evaluation on the free Lie algebra `P(T)`. Later
/// stages evaluate a primitive class in `U^[1] = T/(xy − yx − [x,y])` and
/// read off its `V`-coordinates.
pub struct ClassicalBracket<F: Field> {
    constants: StructureConstants<F>,
    first: OnceLock<Arc<QuotientAlgebra<F>>>,
}

impl<F: Field> ClassicalBracket<F> {
    pub fn new(constants: StructureConstants<F>) -> Result<Self> {
        if F::characteristic() != 0 {
            return Err(Error::Refused(format!(
                "classical envelope needs characteristic 0, field is {}",
                F::field_name()
            )));
        }
        Ok(ClassicalBracket { constants, first: OnceLock::new() })
    }

    pub fn constants(&self) -> &StructureConstants<F> {
        &self.constants
    }

    /// `U^[1]` from the classical presentation.
    pub fn first_stage(&self, t: &Arc<TruncatedTensorAlgebra<F>>) -> Result<Arc<QuotientAlgebra<F>>> {
        if let Some(q) = self.first.get() {
            return Ok(q.clone());
        }
        let ideal = ideal_span(t, &self.constants.presentation(), DEFAULT_SLACK_BUDGET)?;
        let q = Arc::new(QuotientAlgebra::new(t.clone(), ideal)?);
        Ok(self.first.get_or_init(|| q).clone())
    }
}

impl<F: Field> BracketRule<F> for ClassicalBracket<F> {
    fn name(&self) -> String {
        "classical".into()
    }

    fn stage(&self, ts: &TowerState<F>) -> Result<StageBracket<F>> {
        let n = ts.n();
        if n != self.constants.dim() {
            return Err(Error::Dimension(format!(
                "{} structure constants on a space of dim {n}",
                self.constants.dim()
            )));
        }
        if !ts.quotient().base().space().is_flip() {
            return Err(Error::Refused("classical brackets live on the flip braiding".into()));
        }
        let basis = ts.primitives().elements();
        let mut b = DenseMatrix::zeros(n, basis.len());
        if ts.stage() == 0 {
            for (s, p) in basis.iter().enumerate() {
                for (j, v) in dynkin_evaluate(&self.constants, &ts.lift(p))?.into_iter().enumerate() {
                    b.set(j, s, v);
                }
            }
            return Ok(StageBracket::Map(b));
        }
        let u1 = self.first_stage(ts.quotient().base())?;
        let section: Vec<Vec<F>> =
            (0..n).map(|j| u1.nf_word(&Word::letter(j)).map(|v| u1.dense(v))).collect::<Result<_>>()?;
        let image = SubspaceBasis::span(u1.reps().len(), section.clone())?;
        if image.dim() < n {
            return Ok(StageBracket::Undefined(format!(
                "V maps to a subspace of dim {} < {n} in U^[1]; the induced bracket is not defined",
                image.dim()
            )));
        }
        let m = DenseMatrix::from_columns(u1.reps().len(), &section)?;
        for (s, p) in basis.iter().enumerate() {
            let value = u1.dense(&u1.nf_vec(&ts.lift(p))?);
            match crate::exactla::solve(&m, &value)? {
                Some((x, _)) => {
                    for (j, v) in x.into_iter().enumerate() {
                        b.set(j, s, v);
                    }
                }
                None => {
                    return Ok(StageBracket::Undefined(format!(
                        "primitive {} of stage {} does not evaluate into V",
                        ts.lift(p),
                        ts.stage()
                    )))
                }
            }
        }
        Ok(StageBracket::Map(b))
    }
}

/// The tower of `(V, flip, [−,−])` with induced brackets. Also checks that
/// its first stage is the classical presentation `T/(xy − yx − [x,y])`.
pub fn classical_envelope<F: Field>(sc: &StructureConstants<F>, degree: usize) -> Result<TowerRun<F>> {
    let rule = ClassicalBracket::new(sc.clone())?;
    let space: Arc<BraidedSpace<F>> = Arc::new(make_flip(sc.dim()));
    let t = Arc::new(TruncatedTensorAlgebra::new(space, degree));
    let run = run_tower(t.clone(), &rule, super::max_stages())?;
    if let Some(s1) = run.stages.get(1) {
        if s1.ideal() != rule.first_stage(&t)?.ideal() {
            return Err(Error::Assertion("stage 1 differs from T/(xy - yx - [x,y])".into()));
        }
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::Zero;

    fn q(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    pub(crate) fn sl2() -> StructureConstants<Rational> {
        // basis e, f, h
        let mut c = vec![vec![vec![q(0); 3]; 3]; 3];
        c[0][1][2] = q(1);
        c[1][0][2] = q(-1);
        c[2][0][0] = q(2);
        c[0][2][0] = q(-2);
        c[2][1][1] = q(-2);
        c[1][2][1] = q(2);
        StructureConstants::new(c).unwrap()
    }

    #[test]
    fn antisymmetry_is_enforced() {
        let mut c = vec![vec![vec![q(0); 2]; 2]; 2];
        c[0][1][0] = q(1);
        let err = StructureConstants::new(c).unwrap_err();
        assert!(err.to_string().contains("[x1,x2]"), "{err}");
    }

    #[test]
    fn sl2_satisfies_jacobi_and_perturbation_does_not() {
        assert!(sl2().jacobi_witness().is_none());
        let mut c = sl2().raw().to_vec();
        c[2][0][0] = q(3);
        c[0][2][0] = q(-3);
        let bad = StructureConstants::new(c).unwrap();
        let ([i, j, k], value) = bad.jacobi_witness().unwrap();
        assert!(i != j || j != k);
        assert!(value.iter().any(|v| !v.is_zero()));
    }

    #[test]
    fn dynkin_recovers_the_bracket_on_commutators() {
        let sc = sl2();
        // e.f − f.e ↦ [e,f] = h
        let p = TensorElement::from_terms([(Word(vec![0, 1]), q(1)), (Word(vec![1, 0]), q(-1))]);
        assert_eq!(dynkin_evaluate(&sc, &p).unwrap(), vec![q(0), q(0), q(1)]);
        // [[h,e],e] has bracket value [2e,e] = 0
        let p = TensorElement::parse("x3.x1.x1 - 2*x1.x3.x1 + x1.x1.x3", 3).unwrap();
        assert_eq!(dynkin_evaluate(&sc, &p).unwrap(), vec![q(0); 3]);
    }

    #[test]
    fn classical_refuses_positive_characteristic() {
        use crate::F3;
        let c = vec![vec![vec![F3::new(0); 1]; 1]; 1];
        let sc = StructureConstants::new(c).unwrap();
        assert!(matches!(ClassicalBracket::new(sc), Err(Error::Refused(_))));
    }
}
