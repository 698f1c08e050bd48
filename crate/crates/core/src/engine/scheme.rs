use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::mat::{from_exact, to_exact, Mat};
use super::{CauchyClosure, EngineError};
use crate::algebraic::{pow2, round_dyadic, sqrt_upper_rel, RealAlgebraic, Rational};
use crate::linalg::{frobenius_bound_at, ExactMatrix};
use crate::planner::GridPlan;
use crate::problem::{HyperbolicProblem, PolyData, ProblemKind};

/// Per-axis characteristic data of the scheme.
#[derive(Clone, Debug)]
pub struct AxisData {
    /// Pencil eigenvalues, ascending.
    pub mu: Vec<RealAlgebraic>,
    /// Diagonal of S_-: components with a negative speed.
    pub negative: Vec<bool>,
    pub zero: Vec<bool>,
    pub b: Mat,
    pub t: Mat,
    pub t_inv: Mat,
    /// Maps `v_{1/2} -> V_0` and `v_{2^N-1/2} -> V_{2^N}` in characteristic
    /// coordinates (boundary problems).
    pub boundary: Option<(Mat, Mat)>,
}

impl AxisData {
    pub fn s_minus(&self) -> Vec<bool> {
        self.negative.clone()
    }

    pub fn s_plus(&self) -> Vec<bool> {
        self.negative.iter().map(|x| !x).collect()
    }
}

/// Exact (possibly algebraic) matrices the rationalised ones approximate.
#[derive(Clone, Debug)]
pub struct ExactParts {
    pub a_inv: ExactMatrix,
    pub t: Vec<ExactMatrix>,
    pub t_inv: Vec<ExactMatrix>,
    pub boundary: Vec<Option<(ExactMatrix, ExactMatrix)>>,
}

#[derive(Clone, Debug)]
pub struct SchemeData {
    pub n: usize,
    pub m: usize,
    pub a_inv: Mat,
    pub axes: Vec<AxisData>,
    /// tau / h.
    pub courant: Rational,
    pub tau: Rational,
    pub h: Rational,
    /// Fractional bits of the rationalised matrices; `None` when every
    /// entry was rational already.
    pub matrix_bits: Option<u32>,
    /// Largest entrywise rationalisation error.
    pub eps_mat: Rational,
    /// Bound on the grid operator norm of (rationalised step - exact step).
    pub operator_perturbation: Rational,
    /// Bound on the solution perturbation caused by rationalisation.
    pub mat_term: Rational,
    pub exact: ExactParts,
}

/// Stencil of one step: `u' = K0 u + sum_d (Kp_d u(+e_d) + Km_d u(-e_d))`.
/// `center[d]` holds the axis-d contribution to K0 for the cell classes
/// interior, first cell, last cell, single cell.
#[derive(Clone, Debug)]
pub(crate) struct Stencil<M> {
    pub plus: Vec<M>,
    pub minus: Vec<M>,
    pub center: Vec<[M; 4]>,
}

fn sel(n: usize, keep: &[bool]) -> ExactMatrix {
    let d: Vec<RealAlgebraic> =
        (0..n).map(|k| if keep[k] { RealAlgebraic::one() } else { RealAlgebraic::zero() }).collect();
    ExactMatrix::diag(&d)
}

type AxisMats<'a> = (&'a ExactMatrix, &'a ExactMatrix, &'a ExactMatrix, &'a [bool], Option<&'a (ExactMatrix, ExactMatrix)>);

/// Stencil from (A^-1, [(B, T, T^-1, S_- diagonal, boundary maps)], tau/h).
pub(crate) fn stencil(a_inv: &ExactMatrix, axes: &[AxisMats], c: &Rational) -> Result<Stencil<ExactMatrix>, EngineError> {
    let n = a_inv.rows();
    let cc = RealAlgebraic::from_rational(c.clone());
    let mut st = Stencil { plus: vec![], minus: vec![], center: vec![] };
    for (b, t, t_inv, neg, bd) in axes {
        let pos: Vec<bool> = neg.iter().map(|x| !x).collect();
        let k = a_inv.mul(b)?.scale(&cc);
        let fm = t.mul(&sel(n, neg))?.mul(t_inv)?;
        let fp = t.mul(&sel(n, &pos))?.mul(t_inv)?;
        let plus = k.mul(&fm)?.scale(&RealAlgebraic::from_int(-1));
        let minus = k.mul(&fp)?;
        let interior = k.mul(&fp.sub(&fm)?)?.scale(&RealAlgebraic::from_int(-1));
        let c = match bd {
            None => [interior.clone(), interior.clone(), interior.clone(), interior],
            Some((ml, mr)) => {
                let gl = t.mul(ml)?.mul(t_inv)?;
                let gr = t.mul(mr)?.mul(t_inv)?;
                let neg1 = RealAlgebraic::from_int(-1);
                let first = k.mul(&fp.sub(&gl)?)?.scale(&neg1);
                let last = k.mul(&gr.sub(&fm)?)?.scale(&neg1);
                let single = k.mul(&gr.sub(&gl)?)?.scale(&neg1);
                [interior, first, last, single]
            }
        };
        st.plus.push(plus);
        st.minus.push(minus);
        st.center.push(c);
    }
    Ok(st)
}

/// Boundary map in characteristic coordinates: outgoing components are
/// copied, incoming ones solve `(phi T_in) V_in = -(phi T_out) V_out`,
/// zero-speed ones are 0.
fn boundary_map(
    t: &ExactMatrix,
    phi: &ExactMatrix,
    incoming: &[bool],
    zero: &[bool],
    axis: usize,
    side: &'static str,
) -> Result<ExactMatrix, EngineError> {
    let n = t.rows();
    let ins: Vec<usize> = (0..n).filter(|&k| incoming[k]).collect();
    let outs: Vec<usize> = (0..n).filter(|&k| !incoming[k] && !zero[k]).collect();
    if phi.rows() != ins.len() {
        return Err(EngineError::Boundary { axis, side, msg: format!("{} rows for {} incoming components", phi.rows(), ins.len()) });
    }
    let mut m = ExactMatrix::zeros(n, n);
    for &k in &outs {
        m.set(k, k, RealAlgebraic::one());
    }
    if ins.is_empty() {
        return Ok(m);
    }
    let pt = phi.mul(t)?;
    let p_in = ExactMatrix::from_cols(&ins.iter().map(|&k| pt.col(k)).collect::<Vec<_>>());
    let inv = p_in.inverse().map_err(|_| EngineError::Boundary { axis, side, msg: "singular incoming block".into() })?;
    if !outs.is_empty() {
        let p_out = ExactMatrix::from_cols(&outs.iter().map(|&k| pt.col(k)).collect::<Vec<_>>());
        let r = inv.mul(&p_out)?.scale(&RealAlgebraic::from_int(-1));
        for (a, &ki) in ins.iter().enumerate() {
            for (b, &ko) in outs.iter().enumerate() {
                m.set(ki, ko, r.get(a, b).clone());
            }
        }
    }
    Ok(m)
}

fn rationalize(x: &RealAlgebraic, bits: u32) -> (Rational, Rational) {
    if let Some(r) = x.as_rational() {
        return (r.clone(), Rational::zero());
    }
    let (lo, hi) = x.refine(&pow2(-(bits as i64) - 1));
    let a = round_dyadic(&lo, bits);
    let e1 = (&a - &lo).abs();
    let e2 = (&hi - &a).abs();
    let e = if e1 > e2 { e1 } else { e2 };
    (a, e)
}

fn rationalize_matrix(m: &ExactMatrix, bits: u32, err: &mut Rational) -> Mat {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let (a, e) = rationalize(m.get(i, j), bits);
                    if e > *err {
                        *err = e.clone();
                    }
                    a
                })
                .collect()
        })
        .collect()
}

/// Euclidean sup bound of vector polynomial data with spatial variables in
/// [-r + 1, r] (|x| <= r) and, when `t_max` is set, a leading time variable.
fn data_sup(d: &PolyData, r: &Rational, t_max: Option<&Rational>) -> Rational {
    let one = Rational::one();
    let r = if *r > one { r.clone() } else { one.clone() };
    let tm = t_max.map(|t| if *t > one { t.clone() } else { one.clone() });
    let sq: Rational = d
        .components()
        .iter()
        .map(|p| {
            let b: Rational = p
                .terms()
                .iter()
                .map(|(e, c)| {
                    let mut v = c.abs();
                    for (i, &k) in e.iter().enumerate() {
                        let base = if i == 0 && tm.is_some() { tm.as_ref().unwrap() } else { &r };
                        v *= num_traits::pow(base.clone(), k as usize);
                    }
                    v
                })
                .sum();
            &b * &b
        })
        .sum();
    sqrt_upper_rel(&sq, 24)
}

/// Stencil perturbation norm: sum over shifts of the Frobenius bounds of
/// the differences, maximised over cell classes for the centre.
fn perturbation(exact: &Stencil<ExactMatrix>, hat: &Stencil<ExactMatrix>, bits: u32) -> Result<Rational, EngineError> {
    let mut total = Rational::zero();
    for d in 0..exact.plus.len() {
        total += frobenius_bound_at(&hat.plus[d].sub(&exact.plus[d])?, bits);
        total += frobenius_bound_at(&hat.minus[d].sub(&exact.minus[d])?, bits);
        let mut worst = Rational::zero();
        for c in 0..4 {
            let f = frobenius_bound_at(&hat.center[d][c].sub(&exact.center[d][c])?, bits);
            if f > worst {
                worst = f;
            }
        }
        total += worst;
    }
    Ok(total)
}

/// Builds the scheme matrices and rationalises irrational entries so that
/// the induced perturbation `2 kappa^2 L ||E|| U + kappa T ||dA^-1|| F`
/// stays within a quarter of the rounding budget.
pub fn precompute(p: &HyperbolicProblem, plan: &GridPlan, closure: CauchyClosure) -> Result<SchemeData, EngineError> {
    let pencils = p.pencils()?;
    let n = p.n;
    let a_inv_e = p.a.inverse()?;
    let mut axes_e = Vec::with_capacity(p.m);
    for (d, pd) in pencils.iter().enumerate() {
        let negative: Vec<bool> = pd.mu.iter().map(|m| m.sign() < 0).collect();
        let zero: Vec<bool> = pd.mu.iter().map(|m| m.is_zero()).collect();
        let bd = match (&p.kind, &p.boundary) {
            (ProblemKind::Boundary, Some(bs)) => {
                let positive: Vec<bool> = pd.mu.iter().map(|m| m.sign() > 0).collect();
                let ml = boundary_map(&pd.t, &bs[d].left, &positive, &zero, d + 1, "left")?;
                let mr = boundary_map(&pd.t, &bs[d].right, &negative, &zero, d + 1, "right")?;
                Some((ml, mr))
            }
            _ => None,
        };
        axes_e.push((pd.mu.clone(), negative, zero, bd));
    }
    let c = &plan.tau / &plan.h;
    let all_rational = a_inv_e.is_rational()
        && p.b.iter().all(ExactMatrix::is_rational)
        && pencils.iter().all(|pd| pd.t.is_rational() && pd.t_inv.is_rational())
        && axes_e.iter().all(|(_, _, _, bd)| bd.as_ref().is_none_or(|(l, r)| l.is_rational() && r.is_rational()));

    let exact_parts = ExactParts {
        a_inv: a_inv_e.clone(),
        t: pencils.iter().map(|pd| pd.t.clone()).collect(),
        t_inv: pencils.iter().map(|pd| pd.t_inv.clone()).collect(),
        boundary: axes_e.iter().map(|a| a.3.clone()).collect(),
    };
    let build = |bits: u32, eps: &mut Rational| -> (Mat, Vec<AxisData>) {
        let a_inv = rationalize_matrix(&a_inv_e, bits, eps);
        let axes = pencils
            .iter()
            .zip(&axes_e)
            .enumerate()
            .map(|(d, (pd, (mu, neg, zero, bd)))| AxisData {
                mu: mu.clone(),
                negative: neg.clone(),
                zero: zero.clone(),
                b: rationalize_matrix(&p.b[d], bits, eps),
                t: rationalize_matrix(&pd.t, bits, eps),
                t_inv: rationalize_matrix(&pd.t_inv, bits, eps),
                boundary: bd
                    .as_ref()
                    .map(|(l, r)| (rationalize_matrix(l, bits, eps), rationalize_matrix(r, bits, eps))),
            })
            .collect();
        (a_inv, axes)
    };
    let mk = |a_inv, axes, bits, eps, pert, term| SchemeData {
        n,
        m: p.m,
        a_inv,
        axes,
        courant: c.clone(),
        tau: plan.tau.clone(),
        h: plan.h.clone(),
        matrix_bits: bits,
        eps_mat: eps,
        operator_perturbation: pert,
        mat_term: term,
        exact: exact_parts.clone(),
    };
    if all_rational {
        let mut eps = Rational::zero();
        let (a_inv, axes) = build(0, &mut eps);
        return Ok(mk(a_inv, axes, None, eps, Rational::zero(), Rational::zero()));
    }

    let exact_axes: Vec<AxisMats> = pencils
        .iter()
        .zip(&axes_e)
        .enumerate()
        .map(|(d, (pd, a))| (&p.b[d], &pd.t, &pd.t_inv, a.1.as_slice(), a.3.as_ref()))
        .collect();
    let st_exact = stencil(&a_inv_e, &exact_axes, &c)?;

    let kappa = &plan.kappa;
    let steps = Rational::from_integer(BigInt::from(plan.steps));
    let m = p.m as i32;
    let (reach, mass) = match (p.kind, closure) {
        (ProblemKind::Cauchy, CauchyClosure::Cone) => {
            let ext = &steps * &plan.h;
            (Rational::one() + &ext, Rational::one() + Rational::from_integer(2.into()) * ext)
        }
        _ => (Rational::one(), Rational::one()),
    };
    let mass_sqrt = sqrt_upper_rel(&num_traits::pow(mass, m as usize), 24);
    let f_sup = p.f.as_ref().map(|f| data_sup(f, &reach, Some(&plan.t))).unwrap_or_else(Rational::zero);
    let a_inv_norm = frobenius_bound_at(&a_inv_e, 40);
    let u_bound = &mass_sqrt * (kappa * data_sup(&p.phi, &reach, None) + &plan.t * &a_inv_norm * &f_sup);
    let target = &plan.budget_round / Rational::from_integer(4.into());

    let mut bits = plan.dyadic_precision_bits + 8;
    loop {
        let mut eps = Rational::zero();
        let (a_inv, axes) = build(bits, &mut eps);
        let hat_axes_m: Vec<(ExactMatrix, ExactMatrix, ExactMatrix, Option<(ExactMatrix, ExactMatrix)>)> = axes
            .iter()
            .map(|a| (to_exact(&a.b), to_exact(&a.t), to_exact(&a.t_inv), a.boundary.as_ref().map(|(l, r)| (to_exact(l), to_exact(r)))))
            .collect();
        let hat_axes: Vec<AxisMats> = hat_axes_m
            .iter()
            .zip(&axes)
            .map(|(h, a)| (&h.0, &h.1, &h.2, a.negative.as_slice(), h.3.as_ref()))
            .collect();
        let st_hat = stencil(&to_exact(&a_inv), &hat_axes, &c)?;
        let pert = perturbation(&st_exact, &st_hat, bits + 24)?;
        let d_ainv = frobenius_bound_at(&to_exact(&a_inv).sub(&a_inv_e)?, bits + 24);
        let term = Rational::from_integer(2.into()) * kappa * kappa * &steps * &pert * &u_bound
            + kappa * &plan.t * &d_ainv * &f_sup;
        if term <= target {
            return Ok(mk(a_inv, axes, Some(bits), eps, pert, term));
        }
        if bits > 4096 {
            return Err(EngineError::Budget("matrix rationalisation cannot meet the rounding budget".into()));
        }
        bits += 16;
    }
}

impl SchemeData {
    /// Rationalised stencil matrices.
    pub(crate) fn stencil(&self) -> Stencil<Mat> {
        let mats: Vec<(ExactMatrix, ExactMatrix, ExactMatrix, Option<(ExactMatrix, ExactMatrix)>)> = self
            .axes
            .iter()
            .map(|a| (to_exact(&a.b), to_exact(&a.t), to_exact(&a.t_inv), a.boundary.as_ref().map(|(l, r)| (to_exact(l), to_exact(r)))))
            .collect();
        let axes: Vec<AxisMats> =
            mats.iter().zip(&self.axes).map(|(h, a)| (&h.0, &h.1, &h.2, a.negative.as_slice(), h.3.as_ref())).collect();
        let st = stencil(&to_exact(&self.a_inv), &axes, &self.courant).expect("rational stencil");
        Stencil {
            plus: st.plus.iter().map(from_exact).collect(),
            minus: st.minus.iter().map(from_exact).collect(),
            center: st.center.iter().map(|c| [from_exact(&c[0]), from_exact(&c[1]), from_exact(&c[2]), from_exact(&c[3])]).collect(),
        }
    }
}
