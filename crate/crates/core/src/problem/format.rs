//! JSON problem files. Exact numbers are strings (`"p/q"`, decimals) or
//! algebraic encodings `{"minpoly": [...], "root": k}`.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use super::{BoundaryPair, HyperbolicProblem, PolyData, ProblemError, ProblemKind};
use crate::algebraic::{format_rational, parse_rational, RealAlgebraic, Rational};
use crate::linalg::ExactMatrix;

fn err(path: impl Into<String>, msg: impl Into<String>) -> ProblemError {
    ProblemError::Parse { path: path.into(), msg: msg.into() }
}

fn field<'a>(o: &'a Map<String, Value>, key: &str) -> Result<&'a Value, ProblemError> {
    o.get(key).ok_or_else(|| err(key, "missing field"))
}

fn uint(v: &Value, path: &str) -> Result<u64, ProblemError> {
    v.as_u64().ok_or_else(|| err(path, "expected a nonnegative integer"))
}

fn rational(v: &Value, path: &str) -> Result<Rational, ProblemError> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(err(path, "expected a rational string")),
    };
    parse_rational(&s).map_err(|e| err(path, e.to_string()))
}

fn matrix(v: &Value, cols: usize, path: &str) -> Result<ExactMatrix, ProblemError> {
    let rows = v.as_array().ok_or_else(|| err(path, "expected an array of rows"))?;
    let mut data = Vec::with_capacity(rows.len() * cols);
    for (i, r) in rows.iter().enumerate() {
        let rp = format!("{path}[{i}]");
        let r = r.as_array().ok_or_else(|| err(&rp, "expected a row array"))?;
        if r.len() != cols {
            return Err(err(&rp, format!("expected {cols} entries, got {}", r.len())));
        }
        for (j, x) in r.iter().enumerate() {
            data.push(RealAlgebraic::from_json(x).map_err(|e| err(format!("{rp}[{j}]"), e.to_string()))?);
        }
    }
    Ok(ExactMatrix::new(rows.len(), cols, data))
}

fn poly_data(v: &Value, n: usize, vars: usize, path: &str) -> Result<PolyData, ProblemError> {
    let comps = v.as_array().ok_or_else(|| err(path, "expected an array of polynomials"))?;
    if comps.len() != n {
        return Err(err(path, format!("expected {n} components, got {}", comps.len())));
    }
    let mut out = Vec::with_capacity(n);
    for (k, c) in comps.iter().enumerate() {
        let cp = format!("{path}[{k}]");
        let terms = c.as_array().ok_or_else(|| err(&cp, "expected an array of terms"))?;
        let mut ts = Vec::with_capacity(terms.len());
        let mut seen = std::collections::BTreeSet::new();
        for (q, t) in terms.iter().enumerate() {
            let tp = format!("{cp}[{q}]");
            let o = t.as_object().ok_or_else(|| err(&tp, "expected {coef, exps}"))?;
            let coef = rational(o.get("coef").ok_or_else(|| err(&tp, "missing coef"))?, &format!("{tp}.coef"))?;
            let ev = o.get("exps").and_then(Value::as_array).ok_or_else(|| err(&tp, "missing exps array"))?;
            if ev.len() != vars {
                return Err(err(format!("{tp}.exps"), format!("expected {vars} exponents, got {}", ev.len())));
            }
            let exps = ev
                .iter()
                .map(|e| e.as_u64().and_then(|e| u32::try_from(e).ok()))
                .collect::<Option<Vec<u32>>>()
                .ok_or_else(|| err(format!("{tp}.exps"), "exponents must be nonnegative integers"))?;
            if !seen.insert(exps.clone()) {
                return Err(err(format!("{tp}.exps"), "duplicate exponent vector"));
            }
            ts.push((coef, exps));
        }
        out.push(ts);
    }
    PolyData::from_terms(vars, out)
}

/// Parses a problem document.
pub fn parse_problem(v: &Value) -> Result<HyperbolicProblem, ProblemError> {
    let o = v.as_object().ok_or_else(|| err("$", "expected an object"))?;
    let kind = match field(o, "kind")?.as_str() {
        Some("cauchy") => ProblemKind::Cauchy,
        Some("boundary") => ProblemKind::Boundary,
        _ => return Err(err("kind", "expected \"cauchy\" or \"boundary\"")),
    };
    let m = uint(field(o, "m")?, "m")? as usize;
    if !(1..=2).contains(&m) {
        return Err(err("m", "must be 1 or 2"));
    }
    let n = uint(field(o, "n")?, "n")? as usize;
    if n == 0 {
        return Err(err("n", "must be positive"));
    }
    let a = matrix(field(o, "A")?, n, "A")?;
    if a.rows() != n {
        return Err(err("A", format!("expected {n} rows")));
    }
    let bs = field(o, "B")?.as_array().ok_or_else(|| err("B", "expected an array of matrices"))?;
    if bs.len() != m {
        return Err(err("B", format!("expected {m} matrices, got {}", bs.len())));
    }
    let mut b = Vec::with_capacity(m);
    for (i, x) in bs.iter().enumerate() {
        let bi = matrix(x, n, &format!("B[{i}]"))?;
        if bi.rows() != n {
            return Err(err(format!("B[{i}]"), format!("expected {n} rows")));
        }
        b.push(bi);
    }
    let phi = poly_data(field(o, "phi")?, n, m, "phi")?;
    let f = match o.get("f") {
        None | Some(Value::Null) => None,
        Some(x) => Some(poly_data(x, n, m + 1, "f")?),
    };
    let boundary = match o.get("boundary") {
        None | Some(Value::Null) => None,
        Some(x) => {
            let arr = x.as_array().ok_or_else(|| err("boundary", "expected an array"))?;
            let mut out = Vec::with_capacity(arr.len());
            for (i, pair) in arr.iter().enumerate() {
                let pp = format!("boundary[{i}]");
                let po = pair.as_object().ok_or_else(|| err(&pp, "expected {left, right}"))?;
                let left = matrix(po.get("left").ok_or_else(|| err(&pp, "missing left"))?, n, &format!("{pp}.left"))?;
                let right =
                    matrix(po.get("right").ok_or_else(|| err(&pp, "missing right"))?, n, &format!("{pp}.right"))?;
                out.push(BoundaryPair { left, right });
            }
            Some(out)
        }
    };
    let precision_a = uint(field(o, "precision_a")?, "precision_a")?;
    let t = match o.get("T") {
        None | Some(Value::Null) => None,
        Some(x) => Some(rational(x, "T")?),
    };
    HyperbolicProblem::new(kind, a, b, phi, f, boundary, precision_a, t)
}

/// Parses problem text; syntax errors carry line and column.
pub fn parse_problem_str(s: &str) -> Result<HyperbolicProblem, ProblemError> {
    let v: Value = serde_json::from_str(s)
        .map_err(|e| err(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
    parse_problem(&v)
}

fn matrix_json(m: &ExactMatrix) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(RealAlgebraic::to_json).collect())).collect())
}

fn poly_json(d: &PolyData) -> Value {
    Value::Array(
        d.components()
            .iter()
            .map(|p| {
                Value::Array(
                    p.terms().iter().map(|(e, c)| json!({"coef": format_rational(c), "exps": e})).collect(),
                )
            })
            .collect(),
    )
}

/// Canonical serialisation: merged terms, exact strings, sorted keys.
pub fn problem_to_json(p: &HyperbolicProblem) -> Value {
    let mut o = Map::new();
    o.insert("kind".into(), json!(p.kind.as_str()));
    o.insert("m".into(), json!(p.m));
    o.insert("n".into(), json!(p.n));
    o.insert("A".into(), matrix_json(&p.a));
    o.insert("B".into(), Value::Array(p.b.iter().map(matrix_json).collect()));
    o.insert("phi".into(), poly_json(&p.phi));
    if let Some(f) = &p.f {
        o.insert("f".into(), poly_json(f));
    }
    if let Some(bd) = &p.boundary {
        o.insert(
            "boundary".into(),
            Value::Array(bd.iter().map(|b| json!({"left": matrix_json(&b.left), "right": matrix_json(&b.right)})).collect()),
        );
    }
    o.insert("precision_a".into(), json!(p.precision_a));
    if let Some(t) = &p.t_override {
        o.insert("T".into(), json!(format_rational(t)));
    }
    Value::Object(o)
}

/// SHA-256 of the canonical serialisation, hex encoded.
pub fn problem_hash(p: &HyperbolicProblem) -> String {
    let s = serde_json::to_string(&problem_to_json(p)).expect("serialisable");
    hex::encode(Sha256::digest(s.as_bytes()))
}
