//! Multilinear interpolation of traces, grid norms and precision certificates.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::algebraic::{floor, format_rational, parse_rational, sqrt_upper_rel, Rational};
use crate::engine::{Backend, CauchyClosure, GridLayer, GridTrace, SchemeData};
use crate::planner::{ErrorBudget, GridPlan};
use crate::problem::{problem_hash, DomainH, HyperbolicProblem};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertifyError {
    #[error("point outside [0, T] x Q")]
    OutOfCylinder,
    #[error("point outside the domain H")]
    OutsideH,
    #[error("layer {0} is not stored in the trace")]
    MissingLayer(u64),
    #[error("grids do not match")]
    GridMismatch,
    #[error("certificate refused: error terms sum to {total}, not below {target}")]
    Refused { total: String, target: String },
}

/// Interpolant of a trace, optionally restricted to H.
#[derive(Clone, Copy, Debug)]
pub struct Interpolant<'a> {
    pub trace: &'a GridTrace,
    pub domain: Option<&'a DomainH>,
}

impl<'a> Interpolant<'a> {
    pub fn new(trace: &'a GridTrace) -> Self {
        Self { trace, domain: None }
    }
}

/// Restricts evaluation to H (exact membership test).
pub fn restrict_h<'a>(itp: Interpolant<'a>, dom: &'a DomainH) -> Interpolant<'a> {
    Interpolant { trace: itp.trace, domain: Some(dom) }
}

/// Index and weight of the upper node along one axis, clamped to the
/// cell-centre hull.
fn bracket(x: &Rational, h: &Rational, cells: usize) -> (usize, usize, Rational) {
    let xi = x / h - Rational::new(BigInt::one(), BigInt::from(2));
    if xi <= Rational::zero() {
        return (0, 0, Rational::zero());
    }
    let last = Rational::from_integer(BigInt::from(cells - 1));
    if xi >= last {
        return (cells - 1, cells - 1, Rational::zero());
    }
    let i0 = floor(&xi);
    let w = &xi - Rational::from_integer(i0.clone());
    let i0: usize = i0.try_into().expect("index");
    (i0, i0 + 1, w)
}

fn spatial(layer: &GridLayer, x: &[Rational], h: &Rational) -> Vec<Rational> {
    let (i0, i1, wx) = bracket(&x[0], h, layer.nx);
    let (j0, j1, wy) = if x.len() > 1 { bracket(&x[1], h, layer.ny) } else { (0, 0, Rational::zero()) };
    let one = Rational::one();
    let mut out = vec![Rational::zero(); layer.n];
    for (i, a) in [(i0, &one - &wx), (i1, wx.clone())] {
        if a.is_zero() {
            continue;
        }
        for (j, b) in [(j0, &one - &wy), (j1, wy.clone())] {
            if b.is_zero() {
                continue;
            }
            let ab = &a * &b;
            for (k, o) in out.iter_mut().enumerate() {
                *o += &ab * layer.value(i, j, k);
            }
        }
    }
    out
}

/// Multilinear interpolation in (t, x) of the trace.
pub fn interp_eval(itp: &Interpolant, t: &Rational, x: &[Rational]) -> Result<Vec<Rational>, CertifyError> {
    let tr = itp.trace;
    let plan = &tr.plan;
    let one = Rational::one();
    if *t < Rational::zero() || *t > plan.t || x.len() != tr.m || x.iter().any(|v| *v < Rational::zero() || *v > one) {
        return Err(CertifyError::OutOfCylinder);
    }
    if let Some(d) = itp.domain {
        if !d.contains(t, x) {
            return Err(CertifyError::OutsideH);
        }
    }
    if plan.steps == 0 {
        let l = tr.layer(0).ok_or(CertifyError::MissingLayer(0))?;
        return Ok(spatial(l, x, &plan.h));
    }
    let s = t / &plan.tau;
    let l0 = floor(&s);
    let w = &s - Rational::from_integer(l0.clone());
    let l0: u64 = l0.try_into().expect("level");
    let a = tr.layer(l0).ok_or(CertifyError::MissingLayer(l0))?;
    let v0 = spatial(a, x, &plan.h);
    if w.is_zero() {
        return Ok(v0);
    }
    let b = tr.layer(l0 + 1).ok_or(CertifyError::MissingLayer(l0 + 1))?;
    let v1 = spatial(b, x, &plan.h);
    Ok(v0.iter().zip(&v1).map(|(p, q)| (&one - &w) * p + &w * q).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    /// max over cells of the Euclidean length.
    S,
    /// sqrt(h^m sum |u|^2).
    L2,
}

fn sum_sq(layer: &GridLayer, mask: impl Fn(usize, usize) -> bool) -> (Rational, Rational) {
    let mut total = Rational::zero();
    let mut max = Rational::zero();
    for i in 0..layer.nx {
        for j in 0..layer.ny {
            if !mask(i, j) {
                continue;
            }
            let s: Rational = layer.vector(i, j).iter().map(|v| v * v).sum();
            if s > max {
                max = s.clone();
            }
            total += s;
        }
    }
    (total, max)
}

/// Rational upper bound on a grid norm of a layer (exact when the square
/// root is rational).
pub fn grid_norm(layer: &GridLayer, which: Norm, h: &Rational, m: usize) -> Rational {
    let (total, max) = sum_sq(layer, |_, _| true);
    match which {
        Norm::S => sqrt_upper_rel(&max, 32),
        Norm::L2 => sqrt_upper_rel(&(total * num_traits::pow(h.clone(), m)), 32),
    }
}

/// sL2 norm of a trace: max over stored layers of the L2 norm.
pub fn trace_norm(tr: &GridTrace) -> Rational {
    tr.layers.iter().map(|l| grid_norm(l, Norm::L2, &tr.plan.h, tr.m)).max().unwrap_or_else(Rational::zero)
}

fn cell_center(i: usize, h: &Rational) -> Rational {
    Rational::from_integer(BigInt::from(2 * i + 1)) * h / Rational::from_integer(2.into())
}

fn node_in(dom: Option<&DomainH>, t: &Rational, i: usize, j: usize, h: &Rational, m: usize) -> bool {
    match dom {
        None => true,
        Some(d) => {
            let x = if m == 1 { vec![cell_center(i, h)] } else { vec![cell_center(i, h), cell_center(j, h)] };
            d.contains(t, &x)
        }
    }
}

fn diff_norm(a: &GridLayer, b: &GridLayer, h: &Rational, m: usize, dom: Option<&DomainH>) -> Rational {
    let mut s = Rational::zero();
    for i in 0..a.nx {
        for j in 0..a.ny {
            if !node_in(dom, &a.time, i, j, h, m) {
                continue;
            }
            for k in 0..a.n {
                let d = a.value(i, j, k) - b.value(i, j, k);
                s += &d * &d;
            }
        }
    }
    sqrt_upper_rel(&(s * num_traits::pow(h.clone(), m)), 32)
}

/// sL2 distance between two traces over their common stored layers,
/// optionally counting only nodes inside H.
pub fn compare_traces(t1: &GridTrace, t2: &GridTrace, dom: Option<&DomainH>) -> Result<Rational, CertifyError> {
    if t1.plan.h != t2.plan.h || t1.plan.tau != t2.plan.tau || t1.m != t2.m {
        return Err(CertifyError::GridMismatch);
    }
    let mut best = Rational::zero();
    for a in &t1.layers {
        if let Some(b) = t2.layer(a.level) {
            if (a.nx, a.ny, a.n) != (b.nx, b.ny, b.n) {
                return Err(CertifyError::GridMismatch);
            }
            let d = diff_norm(a, b, &t1.plan.h, t1.m, dom);
            if d > best {
                best = d;
            }
        }
    }
    Ok(best)
}

/// L2 distance of one layer to a callback solution at the nodes.
pub fn layer_error(
    layer: &GridLayer,
    h: &Rational,
    m: usize,
    dom: Option<&DomainH>,
    exact: &dyn Fn(&Rational, &[Rational]) -> Vec<Rational>,
) -> Rational {
    let mut s = Rational::zero();
    for i in 0..layer.nx {
        for j in 0..layer.ny {
            if !node_in(dom, &layer.time, i, j, h, m) {
                continue;
            }
            let x = if m == 1 { vec![cell_center(i, h)] } else { vec![cell_center(i, h), cell_center(j, h)] };
            let u = exact(&layer.time, &x);
            for (k, uk) in u.iter().enumerate() {
                let d = layer.value(i, j, k) - uk;
                s += &d * &d;
            }
        }
    }
    sqrt_upper_rel(&(s * num_traits::pow(h.clone(), m)), 32)
}

/// sL2 distance of a trace to a callback solution.
pub fn compare_with_solution(
    tr: &GridTrace,
    dom: Option<&DomainH>,
    exact: &dyn Fn(&Rational, &[Rational]) -> Vec<Rational>,
) -> Rational {
    tr.layers.iter().map(|l| layer_error(l, &tr.plan.h, tr.m, dom, exact)).max().unwrap_or_else(Rational::zero)
}

#[derive(Clone, Debug)]
pub struct SolutionCertificate {
    pub plan: GridPlan,
    pub budget: ErrorBudget,
    pub claim: String,
    pub precision_a: u64,
    pub kappa: Rational,
    pub eps_mat: Rational,
    pub operator_perturbation: Rational,
    pub mat_term: Rational,
    pub rounding_spent: Rational,
    pub problem_hash: String,
    pub backend: Backend,
    pub closure: Option<CauchyClosure>,
    pub caveats: Vec<String>,
}

fn s(r: &Rational) -> Value {
    json!(format_rational(r))
}

impl SolutionCertificate {
    pub fn total(&self) -> Rational {
        self.budget.total()
    }

    pub fn target(&self) -> Rational {
        Rational::new(BigInt::one(), BigInt::from(self.precision_a))
    }

    pub fn to_json(&self) -> Value {
        let total = self.total();
        json!({
            "claim": self.claim,
            "precision_a": self.precision_a,
            "target": s(&self.target()),
            "plan": self.plan.to_json(),
            "budgets": self.budget.to_json(),
            "total": s(&total),
            "total_decimal": crate::algebraic::RealAlgebraic::from_rational(total).to_decimal(8),
            "constants": {
                "P_bound": s(&self.plan.p_bound),
                "kappa": s(&self.kappa),
                "eps_mat": s(&self.eps_mat),
                "operator_perturbation": s(&self.operator_perturbation),
                "mat_term": s(&self.mat_term),
                "rounding_spent": s(&self.rounding_spent),
            },
            "problem_hash": self.problem_hash,
            "backend": self.backend.as_str(),
            "closure": self.closure.map(CauchyClosure::as_str),
            "caveats": self.caveats,
        })
    }
}

/// Assembles the certificate; refuses unless the recorded terms sum below 1/a.
pub fn certify(
    p: &HyperbolicProblem,
    trace: &GridTrace,
    plan: &GridPlan,
    budget: &ErrorBudget,
    sd: &SchemeData,
) -> Result<SolutionCertificate, CertifyError> {
    let mut b = budget.clone();
    b.interpolation_term = &plan.p_bound * &plan.h;
    b.scheme_term = &plan.p_bound * &plan.h;
    b.rounding_term = &trace.rounding_spent + &sd.mat_term;
    let target = Rational::new(BigInt::one(), BigInt::from(p.precision_a));
    if b.total() >= target {
        return Err(CertifyError::Refused { total: format_rational(&b.total()), target: format_rational(&target) });
    }
    let mut caveats = vec![
        "P_bound bounds both the interpolation and the scheme constant; the estimate is not machine-checked".to_string(),
    ];
    if trace.closure == Some(CauchyClosure::Periodic) {
        caveats.push("periodic closure: the claim concerns the periodically extended problem".into());
    }
    if p.f.is_some() {
        caveats.push("source term added explicitly at first order".into());
    }
    let region = if p.kind == crate::problem::ProblemKind::Cauchy { "H" } else { "[0,T] x Q" };
    Ok(SolutionCertificate {
        plan: plan.clone(),
        budget: b,
        claim: format!("||u - v|_{region}||_sL2 < 1/{}", p.precision_a),
        precision_a: p.precision_a,
        kappa: plan.kappa.clone(),
        eps_mat: sd.eps_mat.clone(),
        operator_perturbation: sd.operator_perturbation.clone(),
        mat_term: sd.mat_term.clone(),
        rounding_spent: trace.rounding_spent.clone(),
        problem_hash: problem_hash(p),
        backend: trace.backend,
        closure: trace.closure,
        caveats,
    })
}

/// Re-checks a serialised certificate from its recorded numbers only.
pub fn verify_certificate_json(v: &Value) -> bool {
    let get = |path: &[&str]| -> Option<Rational> {
        let mut x = v;
        for k in path {
            x = x.get(*k)?;
        }
        parse_rational(x.as_str()?).ok()
    };
    let (Some(i), Some(sch), Some(r), Some(a)) = (
        get(&["budgets", "interpolation_term"]),
        get(&["budgets", "scheme_term"]),
        get(&["budgets", "rounding_term"]),
        v.get("precision_a").and_then(Value::as_u64),
    ) else {
        return false;
    };
    let (Some(p), Some(h), Some(spent), Some(mt)) = (
        get(&["plan", "P_bound"]),
        get(&["plan", "h"]),
        get(&["constants", "rounding_spent"]),
        get(&["constants", "mat_term"]),
    ) else {
        return false;
    };
    let total = &i + &sch + &r;
    i == &p * &h && sch == &p * &h && r == spent + mt && a > 0 && total < Rational::new(BigInt::one(), BigInt::from(a))
        && get(&["total"]) == Some(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::{int, rat};
    use crate::engine::{LayerData, RunOptions};
    use crate::linalg::ExactMatrix;
    use crate::planner::plan;
    use crate::problem::{compute_domain, PolyData, ProblemKind};

    fn layer(vals: Vec<Rational>, nx: usize, ny: usize, n: usize, level: u64, time: Rational) -> GridLayer {
        GridLayer { level, time, nx, ny, n, data: LayerData::Exact(vals) }
    }

    fn trace_of(layers: Vec<GridLayer>, m: usize, n_level: u32, tau: Rational) -> GridTrace {
        let steps = layers.len() as u64 - 1;
        let h = crate::algebraic::pow2(-(n_level as i64));
        GridTrace {
            layers,
            plan: GridPlan {
                n_level,
                h,
                t: &tau * Rational::from_integer(steps.into()),
                tau: tau.clone(),
                steps,
                p_bound: int(1),
                budget_disc: int(1),
                budget_round: int(1),
                dyadic_precision_bits: 10,
                kappa: int(1),
                tau_bound: tau,
            },
            backend: Backend::Exact,
            closure: None,
            rounding_spent: int(0),
            residual_norms: vec![],
            m,
        }
    }

    #[test]
    fn interpolation_basics() {
        // 1D, 4 cells, values at centres 1/8, 3/8, 5/8, 7/8
        let l0 = layer(vec![int(1), int(3), int(5), int(7)], 4, 1, 1, 0, int(0));
        let l1 = layer(vec![int(2), int(4), int(6), int(8)], 4, 1, 1, 1, rat(1, 4));
        let tr = trace_of(vec![l0, l1], 1, 2, rat(1, 4));
        let itp = Interpolant::new(&tr);
        assert_eq!(interp_eval(&itp, &int(0), &[rat(3, 8)]).unwrap(), vec![int(3)]);
        assert_eq!(interp_eval(&itp, &int(0), &[rat(1, 2)]).unwrap(), vec![int(4)]);
        assert_eq!(interp_eval(&itp, &rat(1, 8), &[rat(1, 2)]).unwrap(), vec![rat(9, 2)]);
        // clamped margin
        assert_eq!(interp_eval(&itp, &int(0), &[int(0)]).unwrap(), vec![int(1)]);
        assert!(interp_eval(&itp, &int(1), &[int(0)]).is_err());
    }

    #[test]
    fn bilinear_center_average() {
        let l0 = layer(vec![int(1), int(2), int(3), int(6)], 2, 2, 1, 0, int(0));
        let tr = trace_of(vec![l0], 2, 1, rat(1, 4));
        let itp = Interpolant::new(&tr);
        assert_eq!(interp_eval(&itp, &int(0), &[rat(1, 2), rat(1, 2)]).unwrap(), vec![int(3)]);
    }

    #[test]
    fn norms() {
        let c = layer(vec![int(3); 4], 2, 2, 1, 0, int(0));
        assert_eq!(grid_norm(&c, Norm::S, &rat(1, 2), 2), int(3));
        assert_eq!(grid_norm(&c, Norm::L2, &rat(1, 2), 2), int(3));
        let single = layer(vec![int(4), int(0), int(0), int(0)], 2, 2, 1, 0, int(0));
        assert_eq!(grid_norm(&single, Norm::L2, &rat(1, 2), 2), int(2));
        let a = layer(vec![int(1), int(1), int(1), int(1)], 4, 1, 1, 0, int(0));
        let b = layer(vec![int(3), int(3), int(3), int(3)], 4, 1, 1, 0, int(0));
        let t1 = trace_of(vec![a.clone()], 1, 2, rat(1, 4));
        let t2 = trace_of(vec![b], 1, 2, rat(1, 4));
        assert_eq!(compare_traces(&t1, &t1, None).unwrap(), int(0));
        assert_eq!(compare_traces(&t1, &t2, None).unwrap(), int(2));
        assert_eq!(trace_norm(&t2), int(3));
    }

    #[test]
    fn certificate_guard_and_verifier() {
        let p = HyperbolicProblem::new(
            ProblemKind::Cauchy,
            ExactMatrix::identity(1),
            vec![ExactMatrix::from_i64(&[&[1]])],
            PolyData::from_terms(1, vec![vec![(int(1), vec![0])]]).unwrap(),
            None,
            None,
            1,
            Some(rat(1, 8)),
        )
        .unwrap();
        // mu = 1 only: no admissible domain, so plan with a hand domain
        assert!(compute_domain(&p).is_err());
        let p2 = HyperbolicProblem::new(
            ProblemKind::Cauchy,
            ExactMatrix::identity(2),
            vec![ExactMatrix::from_i64(&[&[1, 0], &[0, -1]])],
            PolyData::from_terms(1, vec![vec![(int(1), vec![0])], vec![(int(2), vec![1])]]).unwrap(),
            None,
            None,
            1,
            None,
        )
        .unwrap();
        let d = compute_domain(&p2).unwrap();
        let pl = plan(&p2, &d).unwrap();
        let sd = crate::engine::precompute(&p2, &pl.grid, CauchyClosure::Cone).unwrap();
        let tr = crate::engine::run(&p2, &pl.grid, &sd, &RunOptions::default()).unwrap();
        let cert = certify(&p2, &tr, &pl.grid, &pl.budget, &sd).unwrap();
        assert!(cert.total() < int(1));
        let j = cert.to_json();
        assert!(verify_certificate_json(&j));
        let mut bad = j.clone();
        bad["budgets"]["rounding_term"] = json!("1");
        assert!(!verify_certificate_json(&bad));
        let mut inflated = tr.clone();
        inflated.rounding_spent = int(1);
        assert!(matches!(certify(&p2, &inflated, &pl.grid, &pl.budget, &sd), Err(CertifyError::Refused { .. })));
        // H restriction
        let itp = restrict_h(Interpolant::new(&tr), &d);
        assert!(interp_eval(&itp, &int(0), &[rat(1, 16)]).is_ok());
        assert!(matches!(interp_eval(&itp, &rat(1, 4), &[rat(1, 8)]), Err(CertifyError::OutsideH)));
    }
}
