use std::sync::Arc;

use proptest::prelude::*;

use braidtower::braiding::{make_diagonal, make_flip, BraidedSpace, LiftedBraiding};
use braidtower::cli::{parse_config, render_config, BracketSpec, FieldSpec, JobConfig, OutputFormat, SpaceSpec, Task};
use braidtower::envelope::{combinatorial_rank, nichols_truncation};
use braidtower::exactla::{kernel_basis, rref, solve, DenseMatrix, SubspaceBasis};
use braidtower::oracle::{nichols_dims_via_symmetrizer, quantum_symmetrizer};
use braidtower::quotient::{ideal_span, QuotientAlgebra, DEFAULT_SLACK_BUDGET};
use braidtower::tensoralg::{TensorElement, TruncatedTensorAlgebra, Word};
use braidtower::{Field, Fp, Rational, F7};

fn q(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = DenseMatrix<Rational>> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(-3i64..=3, r * c)
            .prop_map(move |v| DenseMatrix::new(r, c, v.into_iter().map(q).collect()).unwrap())
    })
}

fn subspace(ambient: usize) -> impl Strategy<Value = SubspaceBasis<Rational>> {
    prop::collection::vec(prop::collection::vec(-2i64..=2, ambient), 0..=ambient).prop_map(move |vs| {
        SubspaceBasis::span(ambient, vs.into_iter().map(|v| v.into_iter().map(q).collect()).collect()).unwrap()
    })
}

fn element(n: usize, max_len: usize) -> impl Strategy<Value = TensorElement<Rational>> {
    let word = prop::collection::vec(0..n, 0..=max_len).prop_map(Word);
    prop::collection::vec((word, -4i64..=4, 1i64..=3), 0..5)
        .prop_map(|terms| TensorElement::from_terms(terms.into_iter().map(|(w, a, b)| (w, q(a) / q(b)))))
}

/// Diagonal braidings with entries among small nonzero rationals.
fn diagonal(n: usize) -> impl Strategy<Value = Arc<BraidedSpace<Rational>>> {
    prop::collection::vec(prop::sample::select(vec![-1i64, 1, 2, -2, 3]), n * n).prop_map(move |v| {
        let m = DenseMatrix::new(n, n, v.into_iter().map(q).collect()).unwrap();
        Arc::new(make_diagonal(&m).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prime_field_laws(a in 0i64..7, b in 0i64..7, c in 0i64..7) {
        let (a, b, c) = (F7::new(a), F7::new(b), F7::new(c));
        prop_assert_eq!((a + b) * c, a * c + b * c);
        prop_assert_eq!((a * b) * c, a * (b * c));
        if a != F7::new(0) {
            prop_assert_eq!(a * a.inverse().unwrap(), F7::new(1));
        }
        prop_assert_eq!(Fp::<7>::characteristic(), 7);
    }

    #[test]
    fn rref_is_idempotent(m in matrix(5, 6)) {
        let (r, rank) = rref(&m);
        let (again, rank2) = rref(&r.to_matrix());
        prop_assert_eq!(rank, rank2);
        prop_assert_eq!(again, r);
    }

    #[test]
    fn rank_nullity(m in matrix(5, 6)) {
        let k = kernel_basis(&m);
        prop_assert_eq!(m.rank() + k.dim(), m.cols());
        for v in k.vectors() {
            prop_assert!(m.mul_vec(v).unwrap().iter().all(|x| *x == q(0)));
        }
    }

    #[test]
    fn intersection_laws(a in subspace(4), b in subspace(4)) {
        let ab = a.intersect(&b).unwrap();
        prop_assert_eq!(&ab, &b.intersect(&a).unwrap());
        prop_assert_eq!(ab.dim() + a.sum(&b).unwrap().dim(), a.dim() + b.dim());
        prop_assert!(ab.is_subspace_of(&a).unwrap() && ab.is_subspace_of(&b).unwrap());
    }

    #[test]
    fn solve_returns_solutions(m in matrix(4, 4), x in prop::collection::vec(-3i64..=3, 4)) {
        let x: Vec<Rational> = x.into_iter().map(q).take(m.cols()).chain(std::iter::repeat(q(0))).take(m.cols()).collect();
        let b = m.mul_vec(&x).unwrap();
        let (sol, ker) = solve(&m, &b).unwrap().expect("consistent by construction");
        prop_assert_eq!(m.mul_vec(&sol).unwrap(), b);
        prop_assert_eq!(ker.dim(), m.cols() - m.rank());
    }

    #[test]
    fn element_text_round_trip(x in element(3, 4)) {
        prop_assert_eq!(TensorElement::parse(&x.to_string(), 3).unwrap(), x);
    }

    #[test]
    fn coproduct_is_multiplicative(bs in diagonal(2), x in element(2, 2), y in element(2, 2)) {
        let t = TruncatedTensorAlgebra::new(bs, 4);
        let lhs = t.coproduct(&t.multiply(&x, &y));
        let rhs = t.multiply_twosided(&t.coproduct(&x), &t.coproduct(&y));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn normal_form_is_idempotent(g in element(2, 3), x in element(2, 4)) {
        let t = Arc::new(TruncatedTensorAlgebra::new(Arc::new(make_flip::<Rational>(2)), 4));
        let i = ideal_span(&t, &[g], DEFAULT_SLACK_BUDGET);
        prop_assume!(i.is_ok());
        let u = QuotientAlgebra::new(t, i.unwrap()).unwrap();
        let nx = u.normal_form(&x).unwrap();
        prop_assert_eq!(u.normal_form(&nx).unwrap(), nx.clone());
        prop_assert!(u.ideal().contains(&x.sub(&nx)).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn symmetrizer_oracle_matches_tower(bs in diagonal(2)) {
        let lb = LiftedBraiding::new(bs.clone());
        let s2 = quantum_symmetrizer(&lb, 2).unwrap();
        prop_assert_eq!(s2, DenseMatrix::identity(4).add(bs.matrix()).unwrap());
        let sym = nichols_dims_via_symmetrizer(&lb, 4).unwrap();
        let tower = nichols_truncation(bs, 4).unwrap().graded_dims;
        prop_assert_eq!(sym, tower);
    }

    #[test]
    fn trivial_tower_is_monotone(bs in diagonal(2)) {
        let r = combinatorial_rank(bs, 4).unwrap();
        for w in r.stage_dims.windows(2) {
            prop_assert!(w[0].iter().zip(&w[1]).all(|(a, b)| a >= b), "{:?}", r.stage_dims);
        }
        for w in r.run.stages.windows(2) {
            prop_assert!(w[0].ideal().is_subideal_of(w[1].ideal()));
        }
    }

    #[test]
    fn config_round_trip(cfg in config()) {
        let text = render_config(&cfg);
        prop_assert_eq!(parse_config(&text).unwrap(), cfg);
    }
}

fn config() -> impl Strategy<Value = JobConfig> {
    let field = prop::sample::select(vec![FieldSpec::Rationals, FieldSpec::Prime(5), FieldSpec::Prime(7)]);
    let space = prop_oneof![
        (1usize..=3).prop_map(SpaceSpec::Flip),
        prop::collection::vec(prop::sample::select(vec!["-1", "1", "2", "3", "1/2"]), 4).prop_map(|v| {
            SpaceSpec::Diagonal(vec![vec![v[0].into(), v[1].into()], vec![v[2].into(), v[3].into()]])
        }),
    ];
    let task = prop::sample::select(vec![
        Task::Check,
        Task::Primitives,
        Task::Nichols,
        Task::Rank,
        Task::Envelope,
        Task::Reconstruct,
        Task::OracleCompare,
        Task::IdealTower,
    ]);
    let output = prop::sample::select(vec![OutputFormat::Text, OutputFormat::Structured]);
    (field, space, 1usize..=6, task, output).prop_map(|(field, space, degree, task, output)| {
        // `1/2` is fine in F5 and F7; the trivial bracket keeps envelope tasks valid.
        JobConfig { field, space, degree, task, bracket: Some(BracketSpec::Trivial), output }
    })
}
