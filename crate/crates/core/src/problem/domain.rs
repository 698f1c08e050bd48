use num_traits::Zero;


use super::{HyperbolicProblem, ProblemError, ProblemKind};
use crate::algebraic::{ceil_dyadic, pow2, RealAlgebraic, Rational};

/// Fractional bits of the default dyadic horizon.
pub const HORIZON_BITS: u32 = 10;

/// Per-axis extreme characteristic speeds and the time horizon.
#[derive(Clone, Debug)]
pub struct DomainH {
    pub kind: ProblemKind,
    pub mu_min: Vec<RealAlgebraic>,
    pub mu_max: Vec<RealAlgebraic>,
    /// `min_i 1/(mu_max_i - mu_min_i)`, Cauchy problems only.
    pub t_apex: Option<RealAlgebraic>,
    pub t: Rational,
}

impl DomainH {
    /// Exact membership test for `(t, x)`; the full cylinder for boundary problems.
    pub fn contains(&self, t: &Rational, x: &[Rational]) -> bool {
        if *t < Rational::zero() || *t > self.t {
            return false;
        }
        let one = Rational::from_integer(1.into());
        match self.kind {
            ProblemKind::Boundary => x.iter().all(|xi| *xi >= Rational::zero() && *xi <= one),
            ProblemKind::Cauchy => {
                let tt = RealAlgebraic::from_rational(t.clone());
                x.iter().enumerate().all(|(i, xi)| {
                    let xr = RealAlgebraic::from_rational(xi.clone());
                    let lo = xr.sub(&self.mu_max[i].mul(&tt));
                    let hi = xr.sub(&RealAlgebraic::from_rational(one.clone())).sub(&self.mu_min[i].mul(&tt));
                    lo.sign() >= 0 && hi.sign() <= 0
                })
            }
        }
    }
}

/// Smallest dyadic with `bits` fractional bits that is `>= x`.
pub(crate) fn dyadic_ceiling(x: &RealAlgebraic, bits: u32) -> Rational {
    if let Some(r) = x.as_rational() {
        return ceil_dyadic(r, bits);
    }
    let mut w = pow2(-(bits as i64) - 4);
    loop {
        let (lo, hi) = x.refine(&w);
        let c = ceil_dyadic(&lo, bits);
        if c >= hi {
            return c;
        }
        w /= Rational::from_integer(16.into());
    }
}

/// Characteristic-speed extrema per axis and the horizon.
pub fn compute_domain(p: &HyperbolicProblem) -> Result<DomainH, ProblemError> {
    let pencils = p.pencils()?;
    let mu_min: Vec<RealAlgebraic> = pencils.iter().map(|pd| pd.mu_min().clone()).collect();
    let mu_max: Vec<RealAlgebraic> = pencils.iter().map(|pd| pd.mu_max().clone()).collect();
    match p.kind {
        ProblemKind::Boundary => {
            let t = p.t_override.clone().ok_or(ProblemError::MissingHorizon)?;
            Ok(DomainH { kind: p.kind, mu_min, mu_max, t_apex: None, t })
        }
        ProblemKind::Cauchy => {
            for (i, pd) in pencils.iter().enumerate() {
                let axis = i + 1;
                if mu_min[i].sign() >= 0 {
                    return Err(ProblemError::NoDomain { axis, reason: format!("mu_min = {} >= 0", mu_min[i]) });
                }
                if mu_max[i].sign() <= 0 {
                    return Err(ProblemError::NoDomain { axis, reason: format!("mu_max = {} <= 0", mu_max[i]) });
                }
                if pd.mu.iter().any(|m| m.is_zero()) {
                    return Err(ProblemError::NoDomain { axis, reason: "zero characteristic speed".into() });
                }
            }
            let mut apex: Option<RealAlgebraic> = None;
            for i in 0..p.m {
                let v = mu_max[i].sub(&mu_min[i]).inv().expect("positive width");
                apex = Some(match apex {
                    Some(a) if a <= v => a,
                    _ => v,
                });
            }
            let apex = apex.expect("m >= 1");
            let default_t = dyadic_ceiling(&apex, HORIZON_BITS);
            let t = match &p.t_override {
                None => default_t,
                Some(t) if *t <= default_t => t.clone(),
                Some(t) => {
                    return Err(ProblemError::Horizon(format!(
                        "T = {t} lies beyond the apex of the domain (T_apex = {})",
                        apex.to_decimal(6)
                    )))
                }
            };
            Ok(DomainH { kind: p.kind, mu_min, mu_max, t_apex: Some(apex), t })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::{int, rat};
    use crate::linalg::ExactMatrix;
    use crate::problem::PolyData;

    fn cauchy(a: ExactMatrix, b: Vec<ExactMatrix>) -> HyperbolicProblem {
        let m = b.len();
        let n = a.rows();
        HyperbolicProblem::new(ProblemKind::Cauchy, a, b, PolyData::zero(n, m), None, None, 1, None).unwrap()
    }

    fn ra(r: Rational) -> RealAlgebraic {
        RealAlgebraic::from_rational(r)
    }

    #[test]
    fn decoupled_2d() {
        let b1 = ExactMatrix::from_i64(&[&[1, 0], &[0, -1]]);
        let b2 = ExactMatrix::from_rationals(&[vec![rat(1, 2), int(0)], vec![int(0), rat(-1, 2)]]);
        let p = cauchy(ExactMatrix::identity(2), vec![b1, b2]);
        let d = compute_domain(&p).unwrap();
        assert_eq!(d.mu_min, vec![ra(int(-1)), ra(rat(-1, 2))]);
        assert_eq!(d.mu_max, vec![ra(int(1)), ra(rat(1, 2))]);
        assert_eq!(d.t_apex, Some(ra(rat(1, 2))));
        assert_eq!(d.t, rat(1, 2));
        // degenerate at the apex on axis 1, full at t = 0
        let apex = d.t_apex.clone().unwrap();
        assert_eq!(d.mu_max[0].mul(&apex), ra(int(1)).add(&d.mu_min[0].mul(&apex)));
        assert!(d.contains(&int(0), &[int(0), int(1)]));
        assert!(d.contains(&rat(1, 2), &[rat(1, 2), rat(1, 2)]));
        assert!(!d.contains(&rat(1, 2), &[rat(1, 4), rat(1, 2)]));
        assert!(!d.contains(&rat(1, 4), &[rat(1, 8), rat(1, 2)]));
    }

    #[test]
    fn rejection_and_pencil() {
        let p = cauchy(ExactMatrix::identity(2), vec![ExactMatrix::from_i64(&[&[1, 0], &[0, 2]])]);
        assert!(matches!(compute_domain(&p), Err(ProblemError::NoDomain { axis: 1, .. })));
        let p = cauchy(ExactMatrix::from_i64(&[&[1, 0], &[0, 4]]), vec![ExactMatrix::from_i64(&[&[0, 2], &[2, 0]])]);
        let d = compute_domain(&p).unwrap();
        assert_eq!(d.mu_min[0], ra(int(-1)));
        assert_eq!(d.mu_max[0], ra(int(1)));
    }

    #[test]
    fn irrational_apex_rounds_up() {
        // speeds +-sqrt2: apex 1/(2 sqrt2)
        let p = cauchy(ExactMatrix::identity(2), vec![ExactMatrix::from_i64(&[&[0, 1], &[1, 0]]).scale(&ra(int(2)).sqrt().unwrap())]);
        let d = compute_domain(&p).unwrap();
        let apex = d.t_apex.clone().unwrap();
        assert!(ra(d.t.clone()) > apex);
        assert!(ra(&d.t - pow2(-(HORIZON_BITS as i64))) < apex);
    }
}
