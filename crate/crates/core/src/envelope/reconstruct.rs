use std::sync::Arc;

use crate::braiding::BraidedSpace;
use crate::error::{Error, Result};
use crate::exactla::{DenseMatrix, SubspaceBasis};
use crate::scalar::Field;
use crate::tensoralg::{TensorElement, TruncatedTensorAlgebra};

use super::bracket::{BracketRule, StageBracket};
use super::finite::FiniteBraidedBialgebra;
use super::tower::{check_implicit_jacobi, run_tower, TowerRun, TowerState};

/// The canonical bracket of `A` on `P(A)`: a primitive class of `U_P^[n]`
/// is evaluated in `A` by multiplying out its words, and the value is read
/// in the basis of `P(A)`.
pub struct CanonicalBracket<F> {
    algebra: FiniteBraidedBialgebra<F>,
    primitives: SubspaceBasis<F>,
}

impl<F: Field> CanonicalBracket<F> {
    pub fn new(algebra: FiniteBraidedBialgebra<F>) -> Self {
        let primitives = algebra.primitives();
        CanonicalBracket { algebra, primitives }
    }

    /// `φ^[0]`: the algebra map `T(P) → A` sending the letter `j` to the `j`-th basis primitive.
    pub fn evaluate(&self, x: &TensorElement<F>) -> Vec<F> {
        let mut out = vec![F::zero(); self.algebra.dim()];
        for (w, c) in x.terms() {
            let mut acc = self.algebra.unit().to_vec();
            for &l in w.letters() {
                acc = self.algebra.multiply(&acc, &self.primitives.vectors()[l]);
            }
            for (o, a) in out.iter_mut().zip(acc) {
                *o = o.clone() + c.clone() * a;
            }
        }
        out
    }
}

impl<F: Field> BracketRule<F> for CanonicalBracket<F> {
    fn name(&self) -> String {
        "canonical".into()
    }

    fn stage(&self, ts: &TowerState<F>) -> Result<StageBracket<F>> {
        let basis = ts.primitives().elements();
        let mut b = DenseMatrix::zeros(ts.n(), basis.len());
        for (s, p) in basis.iter().enumerate() {
            let x = ts.lift(p);
            let value = self.evaluate(&x);
            let coords = self.primitives.coordinates(&value).ok_or_else(|| {
                Error::Assertion(format!("stage {}: primitive {x} evaluates outside P(A)", ts.stage()))
            })?;
            for (j, c) in coords.into_iter().enumerate() {
                b.set(j, s, c);
            }
        }
        Ok(StageBracket::Map(b))
    }
}

/// `P(A)` with its restricted braiding and the tower of its canonical bracket.
pub struct InfinitesimalLie<F> {
    pub primitives: SubspaceBasis<F>,
    /// `c_P` on `P ⊗ P`; `None` when `P = 0`.
    pub space: Option<Arc<BraidedSpace<F>>>,
    pub bracket: CanonicalBracket<F>,
    /// The tower `U_P^[n]`; `None` when `P = 0`.
    pub run: Option<TowerRun<F>>,
}

pub fn infinitesimal_lie<F: Field>(a: &FiniteBraidedBialgebra<F>, degree: usize) -> Result<InfinitesimalLie<F>> {
    let bracket = CanonicalBracket::new(a.clone());
    let primitives = bracket.primitives.clone();
    if primitives.is_zero() {
        return Ok(InfinitesimalLie { primitives, space: None, bracket, run: None });
    }
    let cp = a.restricted_braiding(&primitives)?;
    let space = Arc::new(BraidedSpace::new(primitives.dim(), cp)?);
    let t = Arc::new(TruncatedTensorAlgebra::new(space.clone(), degree));
    let run = run_tower(t, &bracket, super::max_stages())?;
    Ok(InfinitesimalLie { primitives, space: Some(space), bracket, run: Some(run) })
}

/// Comparison of `A` with `U(P(A), c_P, b_P)` through `φ^[∞]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReconstructionReport {
    pub degree: usize,
    pub dim_a: usize,
    pub dim_p: usize,
    pub dim_u: usize,
    pub rank_phi: usize,
    pub implicit_jacobi: bool,
    pub multiplicative: bool,
    pub comultiplicative: bool,
    pub braided: bool,
}

impl ReconstructionReport {
    /// `φ` is a bijective braided bialgebra map at truncation.
    pub fn is_isomorphism(&self) -> bool {
        self.rank_phi == self.dim_a
            && self.dim_u == self.dim_a
            && self.multiplicative
            && self.comultiplicative
            && self.braided
    }
}

pub fn reconstruct<F: Field>(a: &FiniteBraidedBialgebra<F>, degree: usize) -> Result<ReconstructionReport> {
    if !a.is_primitively_generated()? {
        return Err(Error::Refused("A is not primitively generated: P(A) does not generate A as an algebra".into()));
    }
    let lie = infinitesimal_lie(a, degree)?;
    let Some(run) = &lie.run else {
        // P = 0 and A = K·1.
        return Ok(ReconstructionReport {
            degree,
            dim_a: a.dim(),
            dim_p: 0,
            dim_u: 1,
            rank_phi: 1,
            implicit_jacobi: true,
            multiplicative: true,
            comultiplicative: true,
            braided: true,
        });
    };
    if run.stabilized_at.is_none() {
        return Err(Error::Assertion(format!("canonical tower stopped: {}", run.stopped.clone().unwrap_or_default())));
    }
    let u = run.final_stage().quotient();
    if !u.is_finite_at_truncation() {
        return Err(Error::Refused(format!("U(P, c_P, b_P) is not finite at truncation {degree}; raise the degree")));
    }
    let r = u.reps().len();
    let phi_cols: Vec<Vec<F>> =
        u.reps().iter().map(|w| lie.bracket.evaluate(&TensorElement::word(w.clone()))).collect();
    let phi = DenseMatrix::from_columns(a.dim(), &phi_cols)?;
    let apply = |v: &[(usize, F)]| phi.mul_vec(&u.dense(v)).expect("length r");

    let mut multiplicative = true;
    let mut comultiplicative = true;
    let mut braided = true;
    let pair = |x: &[F], y: &[F]| {
        let mut out = vec![F::zero(); a.dim() * a.dim()];
        for (i, p) in x.iter().enumerate() {
            for (j, q) in y.iter().enumerate() {
                out[i * a.dim() + j] = p.clone() * q.clone();
            }
        }
        out
    };
    let tensor_image = |terms: Vec<(usize, usize, F)>| {
        let mut out = vec![F::zero(); a.dim() * a.dim()];
        for (i, j, c) in terms {
            for (o, v) in out.iter_mut().zip(pair(&phi_cols[i], &phi_cols[j])) {
                *o = o.clone() + c.clone() * v;
            }
        }
        out
    };
    for i in 0..r {
        let di = tensor_image(u.coproduct_rep(i));
        if di != a.coproduct(&phi_cols[i]) {
            comultiplicative = false;
        }
        for j in 0..r {
            let prod = u.multiply_reps(i, j)?;
            if apply(&prod) != a.multiply(&phi_cols[i], &phi_cols[j]) {
                multiplicative = false;
            }
            if tensor_image(u.braid_reps(i, j)) != a.braid_pair(&phi_cols[i], &phi_cols[j]) {
                braided = false;
            }
        }
    }
    Ok(ReconstructionReport {
        degree,
        dim_a: a.dim(),
        dim_p: lie.primitives.dim(),
        dim_u: r,
        rank_phi: phi.rank(),
        implicit_jacobi: check_implicit_jacobi(run),
        multiplicative,
        comultiplicative,
        braided,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::finite::tests::{char2_b, exterior_like};
    use crate::scalar::{Rational, F2};

    #[test]
    fn exterior_algebra_reconstructs() {
        let one = Rational::from_integer(1.into());
        let a = exterior_like(1, -one.clone(), &[vec![(1, 0, one.clone()), (0, 1, one)]]).unwrap();
        let rep = reconstruct(&a, 4).unwrap();
        assert_eq!(rep.dim_u, 2);
        assert!(rep.is_isomorphism(), "{rep:?}");
        assert!(rep.implicit_jacobi);
    }

    #[test]
    fn truncated_polynomial_in_char_two_reconstructs() {
        let one = F2::new(1);
        let a = exterior_like(1, one, &[vec![(1, 0, one), (0, 1, one)]]).unwrap();
        let lie = infinitesimal_lie(&a, 3).unwrap();
        assert_eq!(lie.primitives.dim(), 1);
        let run = lie.run.unwrap();
        // P(T) = span{x.x, x} in that (filtered) order; x.x evaluates to 0 in A.
        let expected = DenseMatrix::from_rows(2, vec![vec![F2::new(0), F2::new(1)]]).unwrap();
        assert_eq!(run.brackets[0], expected);
        assert!(reconstruct(&a, 3).unwrap().is_isomorphism());
    }

    #[test]
    fn char2_b_is_refused() {
        let err = reconstruct(&char2_b().unwrap(), 4).unwrap_err();
        assert!(matches!(err, Error::Refused(_)), "{err}");
    }
}
