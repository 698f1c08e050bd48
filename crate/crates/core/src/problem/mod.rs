//! Problem data, hypothesis checks and the domain of determinacy.

mod domain;
mod format;
mod poly;
mod validate;

use std::sync::{Arc, OnceLock};

pub use domain::{compute_domain, DomainH};
pub use format::{parse_problem, parse_problem_str, problem_hash, problem_to_json};
pub use poly::{eval_poly, poly_partial, PolyData, Polynomial};
pub use validate::{validate, CheckResult, ValidationReport};

use crate::algebraic::Rational;
use crate::linalg::{pencil_decompose, ExactMatrix, LinalgError, PencilDecomposition};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProblemError {
    #[error("expected {expected} variables, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("malformed problem: {0}")]
    Structure(String),
    #[error("{path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("no admissible domain: {reason} on axis {axis}")]
    NoDomain { axis: usize, reason: String },
    #[error("boundary problems need an explicit horizon T")]
    MissingHorizon,
    #[error("horizon: {0}")]
    Horizon(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    Cauchy,
    Boundary,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Cauchy => "cauchy",
            ProblemKind::Boundary => "boundary",
        }
    }
}

/// Boundary matrices of one axis: `left u = 0` on `x_i = 0`,
/// `right u = 0` on `x_i = 1`.
#[derive(Clone, Debug)]
pub struct BoundaryPair {
    pub left: ExactMatrix,
    pub right: ExactMatrix,
}

/// `A u_t + sum_i B_i u_{x_i} = f` on the unit cube with data `phi`.
#[derive(Clone, Debug)]
pub struct HyperbolicProblem {
    pub kind: ProblemKind,
    pub m: usize,
    pub n: usize,
    pub a: ExactMatrix,
    pub b: Vec<ExactMatrix>,
    pub phi: PolyData,
    pub f: Option<PolyData>,
    pub boundary: Option<Vec<BoundaryPair>>,
    pub precision_a: u64,
    pub t_override: Option<Rational>,
    pencils: OnceLock<Arc<Vec<PencilDecomposition>>>,
}

impl HyperbolicProblem {
    /// Checks shapes only; mathematical hypotheses are left to [`validate`].
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        kind: ProblemKind,
        a: ExactMatrix,
        b: Vec<ExactMatrix>,
        phi: PolyData,
        f: Option<PolyData>,
        boundary: Option<Vec<BoundaryPair>>,
        precision_a: u64,
        t_override: Option<Rational>,
    ) -> Result<Self, ProblemError> {
        let p = Self {
            kind,
            m: b.len(),
            n: a.rows(),
            a,
            b,
            phi,
            f: f.filter(|f| !f.is_zero()),
            boundary,
            precision_a,
            t_override,
            pencils: OnceLock::new(),
        };
        let errs = p.structure_errors();
        if errs.is_empty() {
            Ok(p)
        } else {
            Err(ProblemError::Structure(errs.join("; ")))
        }
    }

    pub(crate) fn structure_errors(&self) -> Vec<String> {
        let mut e = Vec::new();
        let n = self.n;
        if !(1..=2).contains(&self.m) {
            e.push(format!("m must be 1 or 2, got {}", self.m));
        }
        if n == 0 || !self.a.is_square() {
            e.push("A must be a nonempty square matrix".into());
        }
        for (i, b) in self.b.iter().enumerate() {
            if b.rows() != n || b.cols() != n {
                e.push(format!("B{} must be {n}x{n}", i + 1));
            }
        }
        if self.phi.len() != n || self.phi.vars() != self.m {
            e.push(format!("phi must have {n} components in {} variables", self.m));
        }
        if let Some(f) = &self.f {
            if f.len() != n || f.vars() != self.m + 1 {
                e.push(format!("f must have {n} components in {} variables", self.m + 1));
            }
        }
        if self.precision_a == 0 {
            e.push("precision_a must be positive".into());
        }
        if let Some(t) = &self.t_override {
            if *t < Rational::from_integer(0.into()) {
                e.push("T must be nonnegative".into());
            }
        }
        match (&self.kind, &self.boundary) {
            (ProblemKind::Boundary, None) => e.push("boundary problems need boundary matrices".into()),
            (_, Some(bd)) => {
                if bd.len() != self.m {
                    e.push(format!("boundary needs one entry per axis ({})", self.m));
                }
                for (i, pair) in bd.iter().enumerate() {
                    for (side, mat) in [("left", &pair.left), ("right", &pair.right)] {
                        if mat.cols() != n {
                            e.push(format!("boundary[{i}].{side} must have {n} columns"));
                        }
                    }
                }
            }
            _ => {}
        }
        e
    }

    /// Pencil decompositions of `(A, B_i)` for every axis, computed once.
    pub fn pencils(&self) -> Result<Arc<Vec<PencilDecomposition>>, ProblemError> {
        if let Some(p) = self.pencils.get() {
            return Ok(p.clone());
        }
        let ps = self.b.iter().map(|b| pencil_decompose(&self.a, b)).collect::<Result<Vec<_>, _>>()?;
        Ok(self.pencils.get_or_init(|| Arc::new(ps)).clone())
    }

    pub fn source(&self) -> Option<&PolyData> {
        self.f.as_ref()
    }
}
