//! Error constant, space and time steps, and the error budget.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::algebraic::{ceil, format_rational, pow2, sqrt_upper_bound, Rational, RealAlgebraic};
use crate::linalg::{frobenius_bound, ExactMatrix, PencilDecomposition};
use crate::problem::{DomainH, HyperbolicProblem, PolyData, ProblemError};

/// Bits used when rounding algebraic quantities to rational bounds.
const BOUND_BITS: u32 = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct GridPlan {
    pub n_level: u32,
    pub h: Rational,
    pub tau: Rational,
    pub steps: u64,
    pub t: Rational,
    pub p_bound: Rational,
    pub budget_disc: Rational,
    pub budget_round: Rational,
    pub dyadic_precision_bits: u32,
    /// Upper bound on sqrt(lambda_max(A) / lambda_min(A)).
    pub kappa: Rational,
    /// Exact CFL bound rounded down to a rational.
    pub tau_bound: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorBudget {
    pub c_int_bound: Rational,
    pub c_diff_bound: Rational,
    pub interpolation_term: Rational,
    pub scheme_term: Rational,
    /// Allowance for rounding (dyadic rounding plus matrix rationalisation).
    pub rounding_term: Rational,
}

impl ErrorBudget {
    pub fn total(&self) -> Rational {
        &self.interpolation_term + &self.scheme_term + &self.rounding_term
    }
}

#[derive(Clone, Debug)]
pub struct Plan {
    pub grid: GridPlan,
    pub budget: ErrorBudget,
}

fn s(r: &Rational) -> Value {
    json!(format_rational(r))
}

impl GridPlan {
    pub fn cells(&self) -> u64 {
        1u64 << self.n_level
    }

    pub fn to_json(&self) -> Value {
        json!({
            "N": self.n_level,
            "h": s(&self.h),
            "tau": s(&self.tau),
            "L": self.steps,
            "T": s(&self.t),
            "P_bound": s(&self.p_bound),
            "budget_disc": s(&self.budget_disc),
            "budget_round": s(&self.budget_round),
            "dyadic_precision_bits": self.dyadic_precision_bits,
            "kappa": s(&self.kappa),
            "tau_bound": s(&self.tau_bound),
        })
    }
}

impl ErrorBudget {
    pub fn to_json(&self) -> Value {
        json!({
            "c_int_bound": s(&self.c_int_bound),
            "c_diff_bound": s(&self.c_diff_bound),
            "interpolation_term": s(&self.interpolation_term),
            "scheme_term": s(&self.scheme_term),
            "rounding_term": s(&self.rounding_term),
        })
    }
}

/// Max over components of the sum of absolute coefficients: a sup bound
/// on the unit cube.
pub fn poly_sup_bound(d: &PolyData) -> Rational {
    d.components().iter().map(|p| p.abs_coef_sum()).max().unwrap_or_else(Rational::zero)
}

/// Per-component sup bounds; variable 0 ranges over [0, t_max] when
/// `time_first`, all others over [0, 1].
fn component_bounds(d: &PolyData, t_max: Option<&Rational>) -> Vec<Rational> {
    let one = Rational::one();
    let tm = t_max.map(|t| if *t > one { t.clone() } else { one.clone() });
    d.components()
        .iter()
        .map(|p| {
            p.terms()
                .iter()
                .map(|(e, c)| match &tm {
                    Some(t) => c.abs() * num_traits::pow(t.clone(), e[0] as usize),
                    None => c.abs(),
                })
                .sum()
        })
        .collect()
}

/// Upper bound on the Euclidean sup norm from per-component bounds.
fn euclid(bs: &[Rational]) -> Rational {
    let sq: Rational = bs.iter().map(|b| b * b).sum();
    sqrt_upper_bound(&sq, BOUND_BITS)
}

fn second_derivative_bound(d: &PolyData, t_max: Option<&Rational>) -> Rational {
    let v = d.vars();
    let mut best = Rational::zero();
    for i in 0..v {
        let di = d.partial(i);
        for j in i..v {
            let b = euclid(&component_bounds(&di.partial(j), t_max));
            if b > best {
                best = b;
            }
        }
    }
    best
}

fn first_derivative_bound(d: &PolyData, t_max: Option<&Rational>) -> Rational {
    (0..d.vars()).map(|i| euclid(&component_bounds(&d.partial(i), t_max))).max().unwrap_or_else(Rational::zero)
}

/// Rational upper bound on lambda_max(A) / lambda_min(A).
pub fn condition_ratio(p: &HyperbolicProblem) -> Result<Rational, ProblemError> {
    let pencils = p.pencils()?;
    let spec = &pencils[0].a_spec;
    let hi = spec.max_eigenvalue().expect("n >= 1").upper_bound(BOUND_BITS);
    let lo = spec.min_eigenvalue().expect("n >= 1").lower_bound(BOUND_BITS);
    if lo.is_positive() {
        return Ok(hi / lo);
    }
    let mut bits = BOUND_BITS;
    loop {
        bits *= 2;
        let lo = spec.min_eigenvalue().unwrap().lower_bound(bits);
        if lo.is_positive() {
            return Ok(hi / lo);
        }
    }
}

/// Upper bound on the matrix factor of P (Frobenius in place of spectral norms).
fn matrix_factor(p: &HyperbolicProblem) -> Result<Rational, ProblemError> {
    let ainv = p.a.inverse().map_err(ProblemError::from)?;
    let prods: Vec<ExactMatrix> = p.b.iter().map(|b| ainv.mul(b)).collect::<Result<_, _>>()?;
    let mut ms: Vec<ExactMatrix> = vec![p.a.clone()];
    ms.extend(p.b.iter().cloned());
    for k in &prods {
        ms.push(k.mul(k)?);
    }
    if prods.len() == 2 {
        ms.push(prods[0].mul(&prods[1])?.sub(&prods[1].mul(&prods[0])?)?);
    }
    Ok(ms.iter().map(frobenius_bound).max().expect("nonempty"))
}

/// Rational upper bound on the error constant P(A, B, C, phi), with the
/// source derivatives on [0, T] x Q included in the derivative factor.
pub fn compute_p(p: &HyperbolicProblem, t: &Rational) -> Result<Rational, ProblemError> {
    let ratio = condition_ratio(p)?;
    let mut deriv = second_derivative_bound(&p.phi, None);
    if let Some(f) = &p.f {
        for b in [
            euclid(&component_bounds(f, Some(t))),
            first_derivative_bound(f, Some(t)),
            second_derivative_bound(f, Some(t)),
        ] {
            if b > deriv {
                deriv = b;
            }
        }
    }
    Ok(ratio * deriv * matrix_factor(p)?)
}

/// Smallest `N >= 2` with `2^N >= 4 a max(P, 1)`.
pub fn choose_h(p_bound: &Rational, a: u64) -> (u32, Rational) {
    let one = Rational::one();
    let pm = if *p_bound > one { p_bound.clone() } else { one };
    let need = pm * Rational::from_integer(BigInt::from(4u64) * BigInt::from(a));
    let mut n = 2u32;
    while pow2(n as i64) < need {
        n += 1;
    }
    (n, pow2(-(n as i64)))
}

/// Exact CFL bound `min(h (sum 1/mu_i)^-1, h / sum mu_i)` over axes with a
/// nonzero maximal speed `mu_i`; `h` when all speeds vanish.
pub fn cfl_bound(h: &Rational, pencils: &[PencilDecomposition]) -> RealAlgebraic {
    let mut inv_sum = RealAlgebraic::zero();
    let mut sum = RealAlgebraic::zero();
    for pd in pencils {
        let a = pd.mu_min().neg();
        let b = pd.mu_max();
        let m = if &a > b { a } else { b.clone() };
        if m.is_zero() {
            continue;
        }
        inv_sum = inv_sum.add(&m.inv().expect("nonzero"));
        sum = sum.add(&m);
    }
    let hh = RealAlgebraic::from_rational(h.clone());
    if sum.is_zero() {
        return hh;
    }
    let b1 = hh.div(&inv_sum).expect("nonzero");
    let b2 = hh.div(&sum).expect("nonzero");
    if b1 < b2 {
        b1
    } else {
        b2
    }
}

/// Largest rational not exceeding `x` found at `BOUND_BITS` precision.
fn rational_below(x: &RealAlgebraic) -> Rational {
    match x.as_rational() {
        Some(r) => r.clone(),
        None => x.lower_bound(BOUND_BITS),
    }
}

/// `tau = T / L` for the smallest `L` with `tau` within the CFL bound.
pub fn choose_tau(h: &Rational, pencils: &[PencilDecomposition], t: &Rational) -> (Rational, u64, Rational) {
    let exact = cfl_bound(h, pencils);
    let bound = rational_below(&exact);
    if t.is_zero() {
        return (bound.clone(), 0, bound);
    }
    let steps = ceil(&(t / &bound));
    let steps: u64 = steps.try_into().expect("step count fits in u64");
    let tau = t / Rational::from_integer(BigInt::from(steps));
    debug_assert!(RealAlgebraic::from_rational(tau.clone()) <= exact);
    (tau, steps, bound)
}

/// Fractional bits `p` with `2 kappa (L + 1) sqrt(n) (1 + 2 L h)^(m/2) 2^-(p+1) <= target`
/// (one half-ulp residual per entry on each of the L + 1 layers).
pub fn rounding_bits(kappa: &Rational, steps: u64, n: usize, m: usize, h: &Rational, target: &Rational) -> u32 {
    let growth = Rational::one() + Rational::from_integer(BigInt::from(2 * steps)) * h;
    let mut f = Rational::from_integer(BigInt::from(2 * (steps + 1))) * kappa;
    f *= sqrt_upper_bound(&Rational::from_integer(BigInt::from(n)), BOUND_BITS);
    f *= if m == 1 { sqrt_upper_bound(&growth, BOUND_BITS) } else { growth };
    let mut p = 8u32;
    while &f * pow2(-(p as i64 + 1)) > *target {
        p += 1;
    }
    p
}

/// Composes the error constant, steps and budget.
pub fn plan(p: &HyperbolicProblem, dom: &DomainH) -> Result<Plan, ProblemError> {
    let pencils = p.pencils()?;
    let p_bound = compute_p(p, &dom.t)?;
    let (n_level, h) = choose_h(&p_bound, p.precision_a);
    let (tau, steps, tau_bound) = choose_tau(&h, &pencils, &dom.t);
    let kappa = sqrt_upper_bound(&condition_ratio(p)?, BOUND_BITS);
    let half = Rational::new(BigInt::one(), BigInt::from(2u64 * p.precision_a));
    let quarter_round = &half / Rational::from_integer(4.into());
    let bits = rounding_bits(&kappa, steps, p.n, p.m, &h, &quarter_round);
    let grid = GridPlan {
        n_level,
        h: h.clone(),
        tau,
        steps,
        t: dom.t.clone(),
        p_bound: p_bound.clone(),
        budget_disc: half.clone(),
        budget_round: half.clone(),
        dyadic_precision_bits: bits,
        kappa,
        tau_bound,
    };
    let budget = ErrorBudget {
        c_int_bound: p_bound.clone(),
        c_diff_bound: p_bound.clone(),
        interpolation_term: &p_bound * &h,
        scheme_term: &p_bound * &h,
        rounding_term: &half / Rational::from_integer(2.into()),
    };
    Ok(Plan { grid, budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebraic::{int, rat};
    use crate::linalg::pencil_decompose;
    use crate::problem::{compute_domain, ProblemKind};

    fn advection(a: u64) -> HyperbolicProblem {
        let phi = PolyData::from_terms(
            2,
            vec![vec![(int(1), vec![2, 1])], vec![(int(1), vec![1, 0]), (int(1), vec![0, 1])]],
        )
        .unwrap();
        HyperbolicProblem::new(
            ProblemKind::Cauchy,
            ExactMatrix::identity(2),
            vec![
                ExactMatrix::from_i64(&[&[1, 0], &[0, -1]]),
                ExactMatrix::from_rationals(&[vec![rat(1, 2), int(0)], vec![int(0), rat(-1, 2)]]),
            ],
            phi,
            None,
            None,
            a,
            None,
        )
        .unwrap()
    }

    #[test]
    fn sup_bounds() {
        let d = PolyData::from_terms(2, vec![vec![(int(3), vec![2, 1]), (int(-2), vec![0, 1])]]).unwrap();
        assert_eq!(poly_sup_bound(&d), int(5));
        let c = PolyData::from_terms(1, vec![vec![(int(7), vec![0])]]).unwrap();
        assert_eq!(poly_sup_bound(&c), int(7));
        let z = PolyData::from_terms(1, vec![vec![(int(1), vec![1]), (int(-1), vec![1])]]).unwrap();
        assert_eq!(poly_sup_bound(&z), int(0));
        let s = PolyData::from_terms(2, vec![vec![(int(9), vec![2, 1]), (int(-6), vec![0, 1])]]).unwrap();
        assert_eq!(poly_sup_bound(&s), int(3) * poly_sup_bound(&d));
    }

    #[test]
    fn p_for_advection() {
        let p = advection(10);
        let pb = compute_p(&p, &rat(1, 2)).unwrap();
        // ratio 1, derivative factor 2, Frobenius sqrt(2) rounded up
        assert!(pb >= int(2) * rat(14142, 10000) && pb <= int(3));
        assert_eq!(choose_h(&pb, 10).0, 7);
    }

    #[test]
    fn h_rule() {
        assert_eq!(choose_h(&int(3), 10), (7, rat(1, 128)));
        assert_eq!(choose_h(&int(0), 1), (2, rat(1, 4)));
        assert_eq!(choose_h(&int(3), 20).0, choose_h(&int(3), 10).0 + 1);
    }

    #[test]
    fn tau_rule() {
        let i2 = ExactMatrix::identity(2);
        let pb = pencil_decompose(&i2, &ExactMatrix::from_i64(&[&[1, 0], &[0, -1]])).unwrap();
        let pc = pencil_decompose(&i2, &ExactMatrix::from_i64(&[&[2, 0], &[0, -2]])).unwrap();
        // printed bound 1/12 is capped by h / (1 + 2) = 1/24
        let (tau, l, _) = choose_tau(&rat(1, 8), &[pb.clone(), pc], &rat(1, 2));
        assert_eq!((tau, l), (rat(1, 24), 12));
        let (tau, l, _) = choose_tau(&rat(1, 4), &[pb], &rat(1, 2));
        assert_eq!((tau, l), (rat(1, 4), 2));
        let s2 = RealAlgebraic::from_int(2).sqrt().unwrap();
        let ps = pencil_decompose(&i2, &ExactMatrix::from_i64(&[&[1, 0], &[0, -1]]).scale(&s2)).unwrap();
        let (tau, l, bound) = choose_tau(&rat(1, 4), &[ps], &rat(1, 2));
        assert!(RealAlgebraic::from_rational(bound) < RealAlgebraic::from_rational(rat(1, 4)).div(&s2).unwrap());
        assert_eq!(&tau * Rational::from_integer(l.into()), rat(1, 2));
    }

    #[test]
    fn full_plan_and_monotonicity() {
        let p = advection(10);
        let d = compute_domain(&p).unwrap();
        let pl = plan(&p, &d).unwrap();
        let g = &pl.grid;
        assert_eq!(g.n_level, 7);
        assert_eq!(g.tau, rat(1, 384));
        assert_eq!(g.steps, 192);
        assert!(int(2) * &g.p_bound * &g.h <= g.budget_disc);
        assert!(&g.budget_disc + &g.budget_round <= rat(1, 10));
        assert!(pl.budget.total() < rat(1, 10));
        let mut prev_h = rat(1, 1);
        for a in [1, 2, 5, 10, 40] {
            let p = advection(a);
            let pl = plan(&p, &compute_domain(&p).unwrap()).unwrap();
            assert!(pl.grid.h <= prev_h);
            assert!(pl.budget.total() < Rational::new(1.into(), a.into()));
            prev_h = pl.grid.h.clone();
        }
    }
}
