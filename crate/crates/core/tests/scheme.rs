use proptest::prelude::*;
use symhyp_core::algebraic::{int, pow2, rat, RealAlgebraic, Rational};
use symhyp_core::engine::{
    energy, flux_branch_free, flux_branching, init_layer, layer_sum, precompute, run, step_exact, Backend,
    CauchyClosure, GridLayer, LayerData, RunOptions,
};
use symhyp_core::planner::{choose_tau, GridPlan};
use symhyp_core::problem::{parse_problem_str, HyperbolicProblem};

const ADVECTION: &str = r#"{
    "kind": "cauchy", "m": 2, "n": 2,
    "A": [["1", "0"], ["0", "1"]],
    "B": [[["1", "0"], ["0", "-1"]], [["1/2", "0"], ["0", "-1/2"]]],
    "phi": [[{"coef": "1", "exps": [2, 1]}], [{"coef": "1", "exps": [1, 0]}, {"coef": "1", "exps": [0, 1]}]],
    "precision_a": 10
}"#;

const COUPLED: &str = r#"{
    "kind": "cauchy", "m": 1, "n": 2,
    "A": [["2", "1"], ["1", "2"]],
    "B": [[["0", "1"], ["1", "0"]]],
    "phi": [[{"coef": "1", "exps": [2]}], [{"coef": "-1", "exps": [1]}]],
    "precision_a": 4
}"#;

fn grid(n_level: u32, tau: Rational, steps: u64) -> GridPlan {
    GridPlan {
        n_level,
        h: pow2(-(n_level as i64)),
        t: &tau * int(steps as i64),
        tau: tau.clone(),
        steps,
        p_bound: int(1),
        budget_disc: int(1),
        budget_round: int(1),
        dyadic_precision_bits: 24,
        kappa: int(1),
        tau_bound: tau,
    }
}

fn periodic(backend: Backend) -> RunOptions {
    RunOptions { backend, closure: CauchyClosure::Periodic, keep_every: 1 }
}

fn planned_tau(p: &HyperbolicProblem, n_level: u32) -> Rational {
    choose_tau(&pow2(-(n_level as i64)), &p.pencils().unwrap(), &int(1)).0
}

fn layer_from(base: &GridLayer, vals: Vec<Rational>) -> GridLayer {
    GridLayer { data: LayerData::Exact(vals), ..base.clone() }
}

/// Values cyclically shifted by (di, dj) cells.
fn shift(layer: &GridLayer, di: usize, dj: usize) -> Vec<Rational> {
    let (nx, ny, n) = (layer.nx, layer.ny, layer.n);
    let v = layer.rationals();
    let mut out = v.clone();
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..n {
                out[(((i + di) % nx) * ny + (j + dj) % ny) * n + k] = v[(i * ny + j) * n + k].clone();
            }
        }
    }
    out
}

#[test]
fn flux_forms_agree_on_every_sign_pattern() {
    let vals = [rat(3, 7), rat(-2, 5), rat(11, 3), rat(-1, 9), rat(0, 1), rat(5, 2)];
    for n in 1..=3usize {
        for code in 0..3usize.pow(n as u32) {
            let signs: Vec<i64> = (0..n).map(|k| (code / 3usize.pow(k as u32)) % 3).map(|d| d as i64 - 1).collect();
            let mu: Vec<RealAlgebraic> = signs.iter().map(|&s| RealAlgebraic::from_int(s)).collect();
            let s_minus: Vec<Rational> = signs.iter().map(|&s| int((s < 0) as i64)).collect();
            let s_plus: Vec<Rational> = signs.iter().map(|&s| int((s >= 0) as i64)).collect();
            let left = &vals[..n];
            let right = &vals[3..3 + n];
            assert_eq!(flux_branching(left, right, &mu), flux_branch_free(&s_minus, &s_plus, left, right), "{signs:?}");
        }
    }
}

#[test]
fn energy_is_non_increasing_under_planned_step() {
    let p = parse_problem_str(ADVECTION).unwrap();
    let tau = planned_tau(&p, 3);
    assert_eq!(tau, rat(1, 24));
    let plan = grid(3, tau, 12);
    let sd = precompute(&p, &plan, CauchyClosure::Periodic).unwrap();
    let tr = run(&p, &plan, &sd, &periodic(Backend::Exact)).unwrap();
    let a = p.a.to_rationals().unwrap();
    let e: Vec<Rational> = tr.layers.iter().map(|l| energy(l, &a, &plan.h, 2)).collect();
    assert!(e.windows(2).all(|w| w[1] <= w[0]), "{e:?}");
}

#[test]
fn energy_grows_beyond_the_bound() {
    let p = parse_problem_str(ADVECTION).unwrap();
    let tau = planned_tau(&p, 3) * int(4);
    let plan = grid(3, tau, 20);
    let sd = precompute(&p, &plan, CauchyClosure::Periodic).unwrap();
    let tr = run(&p, &plan, &sd, &periodic(Backend::Exact)).unwrap();
    let a = p.a.to_rationals().unwrap();
    let e0 = energy(&tr.layers[0], &a, &plan.h, 2);
    assert!(tr.layers.iter().any(|l| energy(l, &a, &plan.h, 2) > e0));
}

#[test]
fn coupled_energy_is_non_increasing() {
    let p = parse_problem_str(COUPLED).unwrap();
    let tau = planned_tau(&p, 4);
    let plan = grid(4, tau, 10);
    let sd = precompute(&p, &plan, CauchyClosure::Periodic).unwrap();
    let tr = run(&p, &plan, &sd, &periodic(Backend::Exact)).unwrap();
    let a = p.a.to_rationals().unwrap();
    let e: Vec<Rational> = tr.layers.iter().map(|l| energy(l, &a, &plan.h, 1)).collect();
    assert!(e.windows(2).all(|w| w[1] <= w[0]), "{e:?}");
}

#[test]
fn dyadic_stays_within_measured_rounding() {
    let p = parse_problem_str(COUPLED).unwrap();
    let tau = planned_tau(&p, 4);
    // kappa must bound sqrt(3), the condition ratio of A
    let plan = GridPlan { kappa: int(2), ..grid(4, tau, 8) };
    let sd = precompute(&p, &plan, CauchyClosure::Cone).unwrap();
    let cone = |b| RunOptions { backend: b, closure: CauchyClosure::Cone, keep_every: 1 };
    let ex = run(&p, &plan, &sd, &cone(Backend::Exact)).unwrap();
    let dy = run(&p, &plan, &sd, &cone(Backend::Dyadic)).unwrap();
    for (a, b) in ex.layers.iter().zip(&dy.layers) {
        let mut s = int(0);
        for (x, y) in a.rationals().iter().zip(b.rationals()) {
            s += (x - &y) * (x - &y);
        }
        let spent = &dy.rounding_spent;
        assert!(s * &plan.h <= spent * spent);
    }
}

fn random_layer(base: &GridLayer, seed: &[i64]) -> GridLayer {
    let vals = (0..base.cells() * base.n).map(|k| rat(seed[k % seed.len()] * (k as i64 % 5 - 2), 8)).collect();
    layer_from(base, vals)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn periodic_steps_conserve_sums(seed in prop::collection::vec(-9i64..=9, 1..12)) {
        let p = parse_problem_str(ADVECTION).unwrap();
        let plan = grid(2, planned_tau(&p, 2), 1);
        let sd = precompute(&p, &plan, CauchyClosure::Periodic).unwrap();
        let u = random_layer(&init_layer(&p, &plan), &seed);
        let v = step_exact(&p, &plan, &sd, &u);
        prop_assert_eq!(layer_sum(&v), layer_sum(&u));
    }

    #[test]
    fn periodic_steps_commute_with_shifts(
        seed in prop::collection::vec(-9i64..=9, 1..12), di in 0usize..4, dj in 0usize..4,
    ) {
        let p = parse_problem_str(ADVECTION).unwrap();
        let plan = grid(2, planned_tau(&p, 2), 1);
        let sd = precompute(&p, &plan, CauchyClosure::Periodic).unwrap();
        let u = random_layer(&init_layer(&p, &plan), &seed);
        let su = layer_from(&u, shift(&u, di, dj));
        let lhs = step_exact(&p, &plan, &sd, &su).rationals();
        let rhs = shift(&step_exact(&p, &plan, &sd, &u), di, dj);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn coupled_steps_are_linear(s1 in prop::collection::vec(-9i64..=9, 1..8), s2 in prop::collection::vec(-9i64..=9, 1..8)) {
        let p = parse_problem_str(COUPLED).unwrap();
        let plan = grid(3, planned_tau(&p, 3), 1);
        let sd = precompute(&p, &plan, CauchyClosure::Periodic).unwrap();
        let base = init_layer(&p, &plan);
        let u = random_layer(&base, &s1);
        let w = random_layer(&base, &s2);
        let sum = layer_from(&base, u.rationals().iter().zip(w.rationals()).map(|(a, b)| a + b).collect());
        let lhs = step_exact(&p, &plan, &sd, &sum).rationals();
        let rhs: Vec<Rational> = step_exact(&p, &plan, &sd, &u)
            .rationals()
            .iter()
            .zip(step_exact(&p, &plan, &sd, &w).rationals())
            .map(|(a, b)| a + b)
            .collect();
        prop_assert_eq!(lhs, rhs);
    }
}
