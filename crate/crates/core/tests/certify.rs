use proptest::prelude::*;
use symhyp_core::algebraic::{int, pow2, rat, Rational};
use symhyp_core::certify::{certify, interp_eval, restrict_h, verify_certificate_json, CertifyError, Interpolant};
use symhyp_core::engine::{precompute, run, Backend, CauchyClosure, GridLayer, GridTrace, LayerData, RunOptions};
use symhyp_core::planner::{plan, GridPlan};
use symhyp_core::problem::{compute_domain, parse_problem_str};

const ADVECTION: &str = r#"{
    "kind": "cauchy", "m": 2, "n": 2,
    "A": [["1", "0"], ["0", "1"]],
    "B": [[["1", "0"], ["0", "-1"]], [["1/2", "0"], ["0", "-1/2"]]],
    "phi": [[{"coef": "1", "exps": [2, 1]}], [{"coef": "1", "exps": [1, 0]}, {"coef": "1", "exps": [0, 1]}]],
    "precision_a": 1
}"#;

fn small_plan() -> GridPlan {
    let tau = rat(1, 8);
    GridPlan {
        n_level: 2,
        h: pow2(-2),
        t: &tau * int(4),
        tau: tau.clone(),
        steps: 4,
        p_bound: int(1),
        budget_disc: int(1),
        budget_round: int(1),
        dyadic_precision_bits: 20,
        kappa: int(1),
        tau_bound: tau,
    }
}

/// Affine in t and bilinear in (x, y), so interpolation reproduces it.
fn g(t: &Rational, x: &Rational, y: &Rational) -> Vec<Rational> {
    let base = int(1) - x + int(3) * y + int(5) * x * y;
    vec![&base + int(2) * t, base * int(7) + t]
}

fn synthetic_trace(p: &GridPlan) -> GridTrace {
    let c = p.cells() as usize;
    let layers = (0..=p.steps)
        .map(|l| {
            let t = &p.tau * int(l as i64);
            let mut v = Vec::new();
            for i in 0..c {
                for j in 0..c {
                    let x = (int(i as i64) + rat(1, 2)) * &p.h;
                    let y = (int(j as i64) + rat(1, 2)) * &p.h;
                    v.extend(g(&t, &x, &y));
                }
            }
            GridLayer { level: l, time: t, nx: c, ny: c, n: 2, data: LayerData::Exact(v) }
        })
        .collect();
    GridTrace {
        layers,
        plan: p.clone(),
        backend: Backend::Exact,
        closure: None,
        rounding_spent: int(0),
        residual_norms: vec![],
        m: 2,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multilinear_fields_are_reproduced(a in 0i64..=16, b in 0i64..=32, c in 0i64..=32) {
        let plan = small_plan();
        let tr = synthetic_trace(&plan);
        let itp = Interpolant::new(&tr);
        // inside the hull of cell centres [1/8, 7/8]
        let t = rat(a, 32);
        let x = rat(1, 8) + rat(b, 32) * rat(3, 4);
        let y = rat(1, 8) + rat(c, 32) * rat(3, 4);
        prop_assert_eq!(interp_eval(&itp, &t, &[x.clone(), y.clone()]).unwrap(), g(&t, &x, &y));
    }

    #[test]
    fn restriction_matches_membership(a in 0i64..=16, b in 0i64..=32, c in 0i64..=32) {
        let p = parse_problem_str(ADVECTION).unwrap();
        let dom = compute_domain(&p).unwrap();
        let plan = small_plan();
        let tr = synthetic_trace(&plan);
        let itp = restrict_h(Interpolant::new(&tr), &dom);
        let (t, x, y) = (rat(a, 32), rat(b, 32), rat(c, 32));
        // H: t <= x <= 1 - t and t/2 <= y <= 1 - t/2
        let inside = t <= x && x <= int(1) - &t && &t / int(2) <= y && y <= int(1) - &t / int(2);
        match interp_eval(&itp, &t, &[x, y]) {
            Ok(_) => prop_assert!(inside),
            Err(CertifyError::OutsideH) => prop_assert!(!inside),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}

#[test]
fn points_outside_the_cylinder_are_rejected() {
    let plan = small_plan();
    let tr = synthetic_trace(&plan);
    let itp = Interpolant::new(&tr);
    assert!(matches!(interp_eval(&itp, &rat(3, 4), &[rat(1, 2), rat(1, 2)]), Err(CertifyError::OutOfCylinder)));
    assert!(matches!(interp_eval(&itp, &rat(1, 4), &[rat(5, 4), rat(1, 2)]), Err(CertifyError::OutOfCylinder)));
}

#[test]
fn planned_run_is_certified() {
    let p = parse_problem_str(ADVECTION).unwrap();
    let dom = compute_domain(&p).unwrap();
    let pl = plan(&p, &dom).unwrap();
    let sd = precompute(&p, &pl.grid, CauchyClosure::Cone).unwrap();
    let opts = RunOptions { backend: Backend::Dyadic, closure: CauchyClosure::Cone, keep_every: 1 };
    let tr = run(&p, &pl.grid, &sd, &opts).unwrap();
    let cert = certify(&p, &tr, &pl.grid, &pl.budget, &sd).unwrap();
    assert!(cert.total() < cert.target());
    assert_eq!(cert.target(), int(1));
    let v = cert.to_json();
    assert!(verify_certificate_json(&v));
    let mut forged = v.clone();
    forged["budgets"]["rounding_term"] = serde_json::json!("1/1000");
    assert!(!verify_certificate_json(&forged));
}

#[test]
fn coarse_grid_is_refused() {
    let p = parse_problem_str(ADVECTION).unwrap();
    let dom = compute_domain(&p).unwrap();
    let pl = plan(&p, &dom).unwrap();
    // N = 1 puts P h far above 1/a
    let grid = GridPlan { n_level: 1, h: rat(1, 2), tau: rat(1, 6), steps: 3, ..pl.grid.clone() };
    let sd = precompute(&p, &grid, CauchyClosure::Cone).unwrap();
    let opts = RunOptions { backend: Backend::Exact, closure: CauchyClosure::Cone, keep_every: 1 };
    let tr = run(&p, &grid, &sd, &opts).unwrap();
    assert!(matches!(certify(&p, &tr, &grid, &pl.budget, &sd), Err(CertifyError::Refused { .. })));
}
