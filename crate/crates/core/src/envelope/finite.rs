use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exactla::{kernel_basis, solve, DenseMatrix, SubspaceBasis};
use crate::quotient::QuotientTables;
use crate::scalar::Field;
use crate::tensoralg::AxiomReport;

type Tensor<F> = BTreeMap<Vec<usize>, F>;

fn add_to<F: Field>(acc: &mut Tensor<F>, k: Vec<usize>, v: F) {
    if v.is_zero() {
        return;
    }
    let e = acc.entry(k.clone()).or_insert_with(F::zero);
    *e = e.clone() + v;
    if e.is_zero() {
        acc.remove(&k);
    }
}

fn basis_tensor<F: Field>(idx: &[usize]) -> Tensor<F> {
    BTreeMap::from([(idx.to_vec(), F::one())])
}

/// A linear map `A^{⊗k} → A^{⊗l}` applied to a slot range of a sparse tensor,
/// without forming Kronecker products.
#[derive(Clone, Debug)]
pub struct TensorAction<F> {
    r: usize,
    arity_in: usize,
    columns: Vec<Vec<(Vec<usize>, F)>>,
}

impl<F: Field> TensorAction<F> {
    pub fn new(r: usize, arity_in: usize, arity_out: usize, m: &DenseMatrix<F>) -> Result<Self> {
        if m.rows() != r.pow(arity_out as u32) || m.cols() != r.pow(arity_in as u32) {
            return Err(Error::Dimension(format!(
                "map A^{arity_in} -> A^{arity_out} with dim A = {r} must be {}x{}, got {}x{}",
                r.pow(arity_out as u32),
                r.pow(arity_in as u32),
                m.rows(),
                m.cols()
            )));
        }
        let split = |mut idx: usize, k: usize| {
            let mut out = vec![0; k];
            for slot in out.iter_mut().rev() {
                *slot = idx % r;
                idx /= r;
            }
            out
        };
        let columns = (0..m.cols())
            .map(|c| {
                (0..m.rows())
                    .filter(|&row| !m.get(row, c).is_zero())
                    .map(|row| (split(row, arity_out), m.get(row, c).clone()))
                    .collect()
            })
            .collect();
        Ok(TensorAction { r, arity_in, columns })
    }

    /// Applies the map to slots `pos..pos+k` of every term.
    pub fn apply(&self, v: &Tensor<F>, pos: usize) -> Tensor<F> {
        let mut out = Tensor::new();
        for (idx, c) in v {
            let col = idx[pos..pos + self.arity_in].iter().fold(0, |acc, &i| acc * self.r + i);
            for (img, k) in &self.columns[col] {
                let mut w = idx[..pos].to_vec();
                w.extend_from_slice(img);
                w.extend_from_slice(&idx[pos + self.arity_in..]);
                add_to(&mut out, w, c.clone() * k.clone());
            }
        }
        out
    }
}

/// A finite-dimensional braided bialgebra given by structure tables on a
/// basis `e_0, …, e_{r−1}`. Pairs `e_a ⊗ e_b` are indexed by `a·r + b`.
#[derive(Clone, Debug)]
pub struct FiniteBraidedBialgebra<F> {
    r: usize,
    mult: DenseMatrix<F>,
    unit: Vec<F>,
    comult: DenseMatrix<F>,
    counit: Vec<F>,
    braid: DenseMatrix<F>,
    labels: Vec<String>,
}

struct Actions<F> {
    m: TensorAction<F>,
    d: TensorAction<F>,
    c: TensorAction<F>,
    u: TensorAction<F>,
    e: TensorAction<F>,
}

impl<F: Field> FiniteBraidedBialgebra<F> {
    /// Checks every axiom exactly; the error names the first failure and its witness.
    pub fn new(
        mult: DenseMatrix<F>,
        unit: Vec<F>,
        comult: DenseMatrix<F>,
        counit: Vec<F>,
        braid: DenseMatrix<F>,
    ) -> Result<Self> {
        let r = unit.len();
        let labels = (0..r).map(|i| format!("e{i}")).collect();
        if counit.len() != r {
            return Err(Error::Dimension(format!("counit must have length {r}")));
        }
        let a = FiniteBraidedBialgebra { r, mult, unit, comult, counit, braid, labels };
        let report = a.axiom_report()?;
        if let Some(f) = report.failures().first() {
            return Err(Error::Assertion(format!("{} fails {}", f.name, f.witness.clone().unwrap_or_default())));
        }
        Ok(a)
    }

    /// The finite quotient described by `tables`, labelled by its representative words.
    pub fn from_tables(tables: &QuotientTables<F>) -> Result<Self> {
        let r = tables.words.len();
        let mut unit = vec![F::zero(); r];
        unit[tables.unit] = F::one();
        let counit = tables.words.iter().map(|w| if w.is_empty() { F::one() } else { F::zero() }).collect();
        let a = Self::new(tables.mult.clone(), unit, tables.comult.clone(), counit, tables.braid.clone())?;
        Ok(a.with_labels(tables.words.iter().map(|w| w.to_string()).collect()))
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        if labels.len() == self.r {
            self.labels = labels;
        }
        self
    }

    pub fn dim(&self) -> usize {
        self.r
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> &[F] {
        &self.unit
    }

    pub fn counit(&self) -> &[F] {
        &self.counit
    }

    pub fn braid(&self) -> &DenseMatrix<F> {
        &self.braid
    }

    fn actions(&self) -> Result<Actions<F>> {
        let r = self.r;
        let u = DenseMatrix::from_columns(r, std::slice::from_ref(&self.unit))?;
        let e = DenseMatrix::from_rows(r, vec![self.counit.clone()])?;
        Ok(Actions {
            m: TensorAction::new(r, 2, 1, &self.mult)?,
            d: TensorAction::new(r, 1, 2, &self.comult)?,
            c: TensorAction::new(r, 2, 2, &self.braid)?,
            u: TensorAction::new(r, 0, 1, &u)?,
            e: TensorAction::new(r, 1, 0, &e)?,
        })
    }

    fn show(&self, idx: &[usize]) -> String {
        idx.iter().map(|&i| self.labels[i].as_str()).collect::<Vec<_>>().join("⊗")
    }

    /// First basis tensor of arity `k` on which `lhs` and `rhs` disagree.
    fn compare(
        &self,
        k: usize,
        lhs: impl Fn(Tensor<F>) -> Tensor<F>,
        rhs: impl Fn(Tensor<F>) -> Tensor<F>,
    ) -> Option<String> {
        let total = self.r.pow(k as u32);
        for flat in 0..total {
            let mut idx = vec![0; k];
            let mut x = flat;
            for slot in idx.iter_mut().rev() {
                *slot = x % self.r;
                x /= self.r;
            }
            let v = basis_tensor(&idx);
            if lhs(v.clone()) != rhs(v) {
                return Some(format!("on {}", if k == 0 { "1".to_string() } else { self.show(&idx) }));
            }
        }
        None
    }

    /// Associativity, unit, coassociativity, counit, Yang–Baxter and Br1–Br7.
    pub fn axiom_report(&self) -> Result<AxiomReport> {
        let Actions { m, d, c, u, e } = self.actions()?;
        let mut rep = AxiomReport { degree: 1, checks: Vec::new() };
        rep.push(
            "yang-baxter",
            self.compare(3, |v| c.apply(&c.apply(&c.apply(&v, 0), 1), 0), |v| c.apply(&c.apply(&c.apply(&v, 1), 0), 1)),
        );
        rep.push("associativity", self.compare(3, |v| m.apply(&m.apply(&v, 0), 0), |v| m.apply(&m.apply(&v, 1), 0)));
        rep.push(
            "unit",
            self.compare(1, |v| m.apply(&u.apply(&v, 0), 0), |v| v.clone())
                .or_else(|| self.compare(1, |v| m.apply(&u.apply(&v, 1), 0), |v| v)),
        );
        rep.push("coassociativity", self.compare(1, |v| d.apply(&d.apply(&v, 0), 0), |v| d.apply(&d.apply(&v, 0), 1)));
        rep.push(
            "counit",
            self.compare(1, |v| e.apply(&d.apply(&v, 0), 0), |v| v.clone())
                .or_else(|| self.compare(1, |v| e.apply(&d.apply(&v, 0), 1), |v| v)),
        );
        rep.push(
            "Br1",
            self.compare(
                2,
                |v| d.apply(&m.apply(&v, 0), 0),
                |v| m.apply(&m.apply(&c.apply(&d.apply(&d.apply(&v, 1), 0), 1), 0), 1),
            )
            .or_else(|| self.compare(0, |v| d.apply(&u.apply(&v, 0), 0), |v| u.apply(&u.apply(&v, 0), 1)))
            .or_else(|| self.compare(2, |v| e.apply(&m.apply(&v, 0), 0), |v| e.apply(&e.apply(&v, 0), 0)))
            .or_else(|| self.compare(0, |v| e.apply(&u.apply(&v, 0), 0), |v| v)),
        );
        rep.push("Br2", self.compare(3, |v| c.apply(&m.apply(&v, 0), 0), |v| m.apply(&c.apply(&c.apply(&v, 1), 0), 1)));
        rep.push("Br3", self.compare(3, |v| c.apply(&m.apply(&v, 1), 0), |v| m.apply(&c.apply(&c.apply(&v, 0), 1), 0)));
        rep.push(
            "Br4",
            self.compare(1, |v| c.apply(&u.apply(&v, 0), 0), |v| u.apply(&v, 1))
                .or_else(|| self.compare(1, |v| c.apply(&u.apply(&v, 1), 0), |v| u.apply(&v, 0))),
        );
        rep.push("Br5", self.compare(2, |v| d.apply(&c.apply(&v, 0), 0), |v| c.apply(&c.apply(&d.apply(&v, 1), 0), 1)));
        rep.push("Br6", self.compare(2, |v| d.apply(&c.apply(&v, 0), 1), |v| c.apply(&c.apply(&d.apply(&v, 0), 1), 0)));
        rep.push(
            "Br7",
            self.compare(2, |v| e.apply(&c.apply(&v, 0), 0), |v| e.apply(&v, 1))
                .or_else(|| self.compare(2, |v| e.apply(&c.apply(&v, 0), 1), |v| e.apply(&v, 0))),
        );
        Ok(rep)
    }

    pub fn multiply(&self, a: &[F], b: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); self.r];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    let m = self.mult.get(k, i * self.r + j);
                    if !m.is_zero() {
                        *o = o.clone() + x.clone() * y.clone() * m.clone();
                    }
                }
            }
        }
        out
    }

    /// `Δ(a)` as an `r²` vector.
    pub fn coproduct(&self, a: &[F]) -> Vec<F> {
        self.comult.mul_vec(a).expect("length r")
    }

    /// `P(A) = Ker(a ↦ Δ(a) − a⊗1 − 1⊗a)`.
    pub fn primitives(&self) -> SubspaceBasis<F> {
        let r = self.r;
        let mut delta = self.comult.clone();
        for a in 0..r {
            for k in 0..r {
                if self.unit[k].is_zero() {
                    continue;
                }
                let (x, y) = (a * r + k, k * r + a);
                delta.set(x, a, delta.get(x, a).clone() - self.unit[k].clone());
                delta.set(y, a, delta.get(y, a).clone() - self.unit[k].clone());
            }
        }
        kernel_basis(&delta)
    }

    /// Whether `1` and `gens` generate `A` as an algebra.
    pub fn generates_as_algebra(&self, gens: &[Vec<F>]) -> Result<bool> {
        let mut span = SubspaceBasis::span(self.r, vec![self.unit.clone()])?;
        let mut frontier = vec![self.unit.clone()];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for p in &frontier {
                for g in gens {
                    let prod = self.multiply(p, g);
                    if !span.contains(&prod)? {
                        span = span.sum(&SubspaceBasis::span(self.r, vec![prod.clone()])?)?;
                        next.push(prod);
                    }
                }
            }
            frontier = next;
        }
        Ok(span.dim() == self.r)
    }

    pub fn is_primitively_generated(&self) -> Result<bool> {
        self.generates_as_algebra(self.primitives().vectors())
    }

    /// `c` restricted to `P ⊗ P`, in the basis `p_i ⊗ p_j` (index `i·dim P + j`).
    pub fn restricted_braiding(&self, p: &SubspaceBasis<F>) -> Result<DenseMatrix<F>> {
        let k = p.dim();
        let r = self.r;
        let Actions { c, .. } = self.actions()?;
        let cols: Vec<Vec<F>> = {
            let mut cols = Vec::with_capacity(k * k);
            for (a, b) in (0..k * k).map(|x| (x / k, x % k)) {
                cols.push(pair_vector(r, &p.vectors()[a], &p.vectors()[b]));
            }
            cols
        };
        let basis = DenseMatrix::from_columns(r * r, &cols)?;
        let mut out = DenseMatrix::zeros(k * k, k * k);
        for (col, v) in cols.iter().enumerate() {
            let t: Tensor<F> = v
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (vec![i / r, i % r], x.clone()))
                .collect();
            let image = c.apply(&t, 0);
            let mut dense = vec![F::zero(); r * r];
            for (idx, x) in image {
                dense[idx[0] * r + idx[1]] = x;
            }
            let Some((coords, _)) = solve(&basis, &dense)? else {
                return Err(Error::Assertion("c(P⊗P) leaves P⊗P; P is not categorical".into()));
            };
            for (row, x) in coords.into_iter().enumerate() {
                out.set(row, col, x);
            }
        }
        Ok(out)
    }

    /// Applies the braiding to `a ⊗ b`.
    pub fn braid_pair(&self, a: &[F], b: &[F]) -> Vec<F> {
        self.braid.mul_vec(&pair_vector(self.r, a, b)).expect("length r²")
    }
}

fn pair_vector<F: Field>(r: usize, a: &[F], b: &[F]) -> Vec<F> {
    let mut v = vec![F::zero(); r * r];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            v[i * r + j] = x.clone() * y.clone();
        }
    }
    v
}
