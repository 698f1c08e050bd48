use symhyp_core::algebraic::{alg_compare, rat, RealAlgebraic};
use symhyp_core::problem::{compute_domain, parse_problem_str, problem_hash, problem_to_json, validate, ProblemError};

const DECOUPLED: &str = r#"{
    "kind": "cauchy", "m": 2, "n": 2,
    "A": [["1", "0"], ["0", "1"]],
    "B": [[["1", "0"], ["0", "-1"]], [["1/2", "0"], ["0", "-1/2"]]],
    "phi": [[{"coef": "1", "exps": [2, 1]}], [{"coef": "1", "exps": [1, 0]}, {"coef": "1", "exps": [0, 1]}]],
    "precision_a": 10
}"#;

#[test]
fn decoupled_domain() {
    let p = parse_problem_str(DECOUPLED).unwrap();
    assert!(validate(&p).passed());
    let d = compute_domain(&p).unwrap();
    let is = |x: &RealAlgebraic, r| alg_compare(x, &RealAlgebraic::from_rational(r)).is_eq();
    assert!(is(&d.mu_min[0], rat(-1, 1)) && is(&d.mu_max[0], rat(1, 1)));
    assert!(is(&d.mu_min[1], rat(-1, 2)) && is(&d.mu_max[1], rat(1, 2)));
    assert_eq!(d.t, rat(1, 2));
}

#[test]
fn hash_is_stable_under_reformatting() {
    let p = parse_problem_str(DECOUPLED).unwrap();
    let again = parse_problem_str(&problem_to_json(&p).to_string()).unwrap();
    assert_eq!(problem_hash(&p), problem_hash(&again));
    let reordered = DECOUPLED.replace(r#",
    "precision_a": 10"#, "").replace(r#""kind""#, r#""precision_a": 10, "kind""#);
    assert_eq!(problem_hash(&parse_problem_str(&reordered).unwrap()), problem_hash(&p));
}

#[test]
fn diagnostics_name_the_field() {
    let bad = DECOUPLED.replace(r#"["1/2", "0"], ["0", "-1/2"]"#, r#"["1/2", "0"], ["0", "x"]"#);
    match parse_problem_str(&bad) {
        Err(ProblemError::Parse { path, .. }) => assert_eq!(path, "B[1][1][1]"),
        other => panic!("{other:?}"),
    }
    match parse_problem_str("{\"kind\": ") {
        Err(ProblemError::Parse { msg, .. }) => assert!(msg.contains("line 1"), "{msg}"),
        other => panic!("{other:?}"),
    }
}
