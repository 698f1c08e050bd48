use std::cmp::Ordering;

use proptest::prelude::*;
use symhyp_core::algebraic::{alg_compare, int, RealAlgebraic, Rational};
use symhyp_core::linalg::{charpoly_coefficients, charpoly_newton, pencil_decompose, spectral_decompose, ExactMatrix};

fn same(x: &ExactMatrix, y: &ExactMatrix) -> bool {
    x.rows() == y.rows()
        && x.cols() == y.cols()
        && x.entries().iter().zip(y.entries()).all(|(a, b)| alg_compare(a, b) == Ordering::Equal)
}

fn symmetric(n: usize, vals: &[i64]) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            let v = RealAlgebraic::from_int(vals[k]);
            m.set(i, j, v.clone());
            m.set(j, i, v);
            k += 1;
        }
    }
    m
}

/// det(x I - A) by cofactor expansion over polynomials in x (lowest first).
fn cofactor_charpoly(a: &[Vec<Rational>]) -> Vec<Rational> {
    let n = a.len();
    let entry = |i: usize, j: usize| -> Vec<Rational> {
        if i == j {
            vec![-a[i][j].clone(), int(1)]
        } else {
            vec![-a[i][j].clone()]
        }
    };
    fn mul(p: &[Rational], q: &[Rational]) -> Vec<Rational> {
        let mut r = vec![int(0); p.len() + q.len() - 1];
        for (i, x) in p.iter().enumerate() {
            for (j, y) in q.iter().enumerate() {
                r[i + j] += x * y;
            }
        }
        r
    }
    fn add(p: &mut Vec<Rational>, q: &[Rational], sign: i64) {
        if p.len() < q.len() {
            p.resize(q.len(), int(0));
        }
        for (i, x) in q.iter().enumerate() {
            p[i] += x * int(sign);
        }
    }
    fn det(rows: &[usize], cols: &[usize], e: &dyn Fn(usize, usize) -> Vec<Rational>) -> Vec<Rational> {
        if rows.len() == 1 {
            return e(rows[0], cols[0]);
        }
        let mut acc = vec![int(0)];
        for (k, &c) in cols.iter().enumerate() {
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let minor = det(&rows[1..], &rest, e);
            add(&mut acc, &mul(&e(rows[0], c), &minor), if k % 2 == 0 { 1 } else { -1 });
        }
        acc
    }
    let idx: Vec<usize> = (0..n).collect();
    let mut p = det(&idx, &idx, &entry);
    p.truncate(n + 1);
    p
}

fn sym_strategy() -> impl Strategy<Value = (usize, Vec<i64>)> {
    (1usize..=3).prop_flat_map(|n| (Just(n), prop::collection::vec(-10i64..=10, n * (n + 1) / 2)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spectral_residuals_are_exactly_zero((n, vals) in sym_strategy()) {
        let a = symmetric(n, &vals);
        let s = spectral_decompose(&a).unwrap();
        let v = &s.eigenvectors;
        let av = a.mul(v).unwrap();
        let vl = v.mul(&ExactMatrix::diag(&s.eigenvalues)).unwrap();
        prop_assert!(same(&av, &vl));
        prop_assert!(same(&v.transpose().mul(v).unwrap(), &ExactMatrix::identity(n)));
        for w in s.eigenvalues.windows(2) {
            prop_assert!(alg_compare(&w[0], &w[1]) != Ordering::Greater);
        }
    }

    #[test]
    fn newton_matches_cofactor((n, vals) in sym_strategy()) {
        let a = symmetric(n, &vals);
        let c = charpoly_coefficients(&charpoly_newton(&a).unwrap());
        let want = cofactor_charpoly(&a.to_rationals().unwrap());
        let got: Vec<Rational> = c.iter().map(|x| x.as_rational().unwrap().clone()).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn pencil_invariants(
        (n, g, b) in (1usize..=3).prop_flat_map(|n| (
            Just(n),
            prop::collection::vec(-3i64..=3, n * n),
            prop::collection::vec(-5i64..=5, n * (n + 1) / 2),
        )),
    ) {
        let gm = ExactMatrix::new(n, n, g.iter().map(|&x| RealAlgebraic::from_int(x)).collect());
        let a = gm.transpose().mul(&gm).unwrap().add(&ExactMatrix::identity(n)).unwrap();
        let bm = symmetric(n, &b);
        let pd = pencil_decompose(&a, &bm).unwrap();
        let t = &pd.t;
        prop_assert!(same(&t.transpose().mul(&a).unwrap().mul(t).unwrap(), &ExactMatrix::identity(n)));
        prop_assert!(same(&t.transpose().mul(&bm).unwrap().mul(t).unwrap(), &ExactMatrix::diag(&pd.mu)));
        prop_assert!(same(&pd.t_inv.mul(t).unwrap(), &ExactMatrix::identity(n)));
        for mu in &pd.mu {
            let shifted = a.scale(mu).sub(&bm).unwrap();
            prop_assert!(shifted.det().unwrap().is_zero());
        }
    }
}

#[test]
fn repeated_eigenvalues_are_listed_with_multiplicity() {
    let a = ExactMatrix::from_i64(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 5]]);
    let s = spectral_decompose(&a).unwrap();
    assert_eq!(s.eigenvalues.iter().map(|x| x.as_rational().unwrap().clone()).collect::<Vec<_>>(), vec![int(2), int(2), int(5)]);
}
