use serde::Serialize;

use super::{HyperbolicProblem, ProblemKind};
use crate::linalg::{null_space_basis, spectral_decompose, ExactMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    pub warnings: Vec<String>,
    /// Strict inequalities on every boundary face (boundary problems only).
    pub strongly_dissipative: Option<bool>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(CheckResult { name: name.into(), passed, detail: detail.into() });
    }
}

fn list(xs: &[crate::algebraic::RealAlgebraic]) -> String {
    xs.iter().map(|x| x.to_decimal(6)).collect::<Vec<_>>().join(", ")
}

/// Sign of the quadratic form of `b` restricted to `ker phi`:
/// returns (max eigenvalue sign, min eigenvalue sign), `None` for a trivial kernel.
fn restricted_form(b: &ExactMatrix, phi: &ExactMatrix) -> Result<Option<(i8, i8)>, String> {
    let z = if phi.rows() == 0 {
        (0..b.rows()).map(|i| ExactMatrix::identity(b.rows()).col(i)).collect()
    } else {
        null_space_basis(phi)
    };
    if z.is_empty() {
        return Ok(None);
    }
    let z = ExactMatrix::from_cols(&z);
    let q = z.transpose().mul(b).and_then(|x| x.mul(&z)).map_err(|e| e.to_string())?;
    let s = spectral_decompose(&q).map_err(|e| e.to_string())?;
    Ok(Some((s.max_eigenvalue().unwrap().sign(), s.min_eigenvalue().unwrap().sign())))
}

/// Checks every hypothesis on the coefficients and boundary data; each
/// failure is a separate report entry.
pub fn validate(p: &HyperbolicProblem) -> ValidationReport {
    let mut r = ValidationReport::default();
    let errs = p.structure_errors();
    r.push("structure", errs.is_empty(), errs.join("; "));
    if !errs.is_empty() {
        return r;
    }
    let a_sym = p.a.is_symmetric();
    r.push("A symmetric", a_sym, "");
    let mut b_sym = true;
    for (i, b) in p.b.iter().enumerate() {
        let s = b.is_symmetric();
        b_sym &= s;
        r.push(format!("B{} symmetric", i + 1), s, "");
    }
    let a_pd = if a_sym {
        match spectral_decompose(&p.a) {
            Ok(s) => {
                let ok = s.min_eigenvalue().is_some_and(|l| l.sign() > 0);
                r.push("A positive definite", ok, format!("eigenvalues {}", list(&s.eigenvalues)));
                ok
            }
            Err(e) => {
                r.push("A positive definite", false, e.to_string());
                false
            }
        }
    } else {
        r.push("A positive definite", false, "A is not symmetric");
        false
    };
    if !(a_pd && b_sym) {
        return r;
    }
    let pencils = match p.pencils() {
        Ok(ps) => ps,
        Err(e) => {
            r.push("pencil decomposition", false, e.to_string());
            return r;
        }
    };
    match p.kind {
        ProblemKind::Cauchy => {
            for (i, pd) in pencils.iter().enumerate() {
                let zero = pd.mu.iter().any(|m| m.is_zero());
                r.push(
                    format!("axis {}: nonzero characteristic speeds", i + 1),
                    !zero,
                    format!("speeds {}", list(&pd.mu)),
                );
            }
        }
        ProblemKind::Boundary => {
            let bd = p.boundary.as_ref().expect("checked by structure");
            let mut strong = true;
            for (i, (pd, pair)) in pencils.iter().zip(bd).enumerate() {
                let ax = i + 1;
                let pos = pd.mu.iter().filter(|m| m.sign() > 0).count();
                let neg = pd.mu.iter().filter(|m| m.sign() < 0).count();
                if pd.mu.iter().any(|m| m.is_zero()) {
                    r.warnings.push(format!("axis {ax}: zero characteristic speed (allowed for boundary problems)"));
                }
                r.push(
                    format!("axis {ax}: left boundary rows"),
                    pair.left.rows() == pos,
                    format!("{} rows, {pos} positive speeds", pair.left.rows()),
                );
                r.push(
                    format!("axis {ax}: right boundary rows"),
                    pair.right.rows() == neg,
                    format!("{} rows, {neg} negative speeds", pair.right.rows()),
                );
                let b = &p.b[i];
                for (side, phi, want) in [("left", &pair.left, -1i8), ("right", &pair.right, 1)] {
                    let name = format!("axis {ax}: {side} dissipativity");
                    match restricted_form(b, phi) {
                        Ok(None) => r.push(name, true, "trivial kernel"),
                        Ok(Some((max, min))) => {
                            let (ok, strict) = if want < 0 { (max <= 0, max < 0) } else { (min >= 0, min > 0) };
                            strong &= strict;
                            let what = if want < 0 { "(B u, u) <= 0" } else { "(B u, u) >= 0" };
                            r.push(name, ok, format!("{what} on the kernel of the {side} matrix"));
                        }
                        Err(e) => r.push(name, false, e),
                    }
                }
            }
            r.strongly_dissipative = Some(strong);
            r.warnings.push("compatibility between initial and boundary data is not checked".into());
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::int;
    use crate::problem::{BoundaryPair, PolyData};

    fn boundary_problem(b: &[&[i64]], left: &[&[i64]], right: &[&[i64]]) -> HyperbolicProblem {
        HyperbolicProblem::new(
            ProblemKind::Boundary,
            ExactMatrix::identity(2),
            vec![ExactMatrix::from_i64(b)],
            PolyData::zero(2, 1),
            None,
            Some(vec![BoundaryPair { left: ExactMatrix::from_i64(left), right: ExactMatrix::from_i64(right) }]),
            1,
            Some(int(1)),
        )
        .unwrap()
    }

    #[test]
    fn dissipative_example() {
        let p = boundary_problem(&[&[1, 0], &[0, -1]], &[&[1, 0]], &[&[0, 1]]);
        let r = validate(&p);
        assert!(r.passed(), "{:?}", r);
        assert_eq!(r.strongly_dissipative, Some(true));
        let p = boundary_problem(&[&[-1, 0], &[0, 1]], &[&[1, 0]], &[&[0, 1]]);
        let r = validate(&p);
        assert!(!r.passed());
        let names: Vec<_> = r.failures().map(|c| c.name.clone()).collect();
        assert_eq!(names, vec!["axis 1: left dissipativity", "axis 1: right dissipativity"]);
    }

    #[test]
    fn row_counts() {
        let p = boundary_problem(&[&[1, 0], &[0, -1]], &[&[1, 0], &[0, 1]], &[&[0, 1]]);
        let r = validate(&p);
        assert!(!r.check("axis 1: left boundary rows").unwrap().passed);
        assert!(r.check("axis 1: right boundary rows").unwrap().passed);
    }

    #[test]
    fn indefinite_and_nonsymmetric() {
        let mk = |a: &[&[i64]], b: &[&[i64]]| {
            HyperbolicProblem::new(
                ProblemKind::Cauchy,
                ExactMatrix::from_i64(a),
                vec![ExactMatrix::from_i64(b)],
                PolyData::zero(2, 1),
                None,
                None,
                1,
                None,
            )
            .unwrap()
        };
        let r = validate(&mk(&[&[1, 2], &[2, 1]], &[&[1, 0], &[0, -1]]));
        assert!(!r.check("A positive definite").unwrap().passed);
        let r = validate(&mk(&[&[1, 0], &[0, 1]], &[&[1, 1], &[0, -1]]));
        assert!(!r.check("B1 symmetric").unwrap().passed);
        assert!(r.check("A positive definite").unwrap().passed);
        let r = validate(&mk(&[&[1, 0], &[0, 1]], &[&[1, 0], &[0, 0]]));
        assert!(!r.check("axis 1: nonzero characteristic speeds").unwrap().passed);
        assert!(validate(&mk(&[&[1, 0], &[0, 1]], &[&[1, 0], &[0, -1]])).passed());
    }
}
