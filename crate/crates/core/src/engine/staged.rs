//! The scheme stage by stage, in exact rational arithmetic.

use num_traits::Zero;
use rayon::prelude::*;

use super::mat::mat_vec;
use super::{cell_point, Region, SchemeData, Topology, Work};
use crate::algebraic::{RealAlgebraic, Rational};
use crate::problem::HyperbolicProblem;

/// Case-split flux rule: component k is taken from the left cell when
/// mu_k >= 0 and from the right cell otherwise.
pub fn flux_branching<T: Clone>(left: &[T], right: &[T], mu: &[RealAlgebraic]) -> Vec<T> {
    (0..mu.len()).map(|k| if mu[k].sign() >= 0 { left[k].clone() } else { right[k].clone() }).collect()
}

/// Branch-free form `S_- v_right + S_+ v_left` with 0/1 diagonals.
pub fn flux_branch_free(s_minus: &[Rational], s_plus: &[Rational], left: &[Rational], right: &[Rational]) -> Vec<Rational> {
    (0..left.len()).map(|k| &s_minus[k] * &right[k] + &s_plus[k] * &left[k]).collect()
}

fn select(neg: &[bool], left: &[Rational], right: &[Rational]) -> Vec<Rational> {
    (0..neg.len()).map(|k| if neg[k] { right[k].clone() } else { left[k].clone() }).collect()
}

fn shifted(i: i64, j: i64, d: usize, delta: i64) -> (i64, i64) {
    if d == 0 {
        (i + delta, j)
    } else {
        (i, j + delta)
    }
}

/// One step from `prev` onto `next` (steps 2-5).
pub(crate) fn step_layer(
    p: &HyperbolicProblem,
    sd: &SchemeData,
    prev: &Work<Rational>,
    next: Region,
    topo: Topology,
    t_l: &Rational,
) -> Work<Rational> {
    let n = p.n;
    let pr = prev.region;
    // step 2: characteristic variables per axis
    let v: Vec<Vec<Vec<Rational>>> = sd
        .axes
        .iter()
        .map(|ax| prev.data.par_chunks(n).map(|u| mat_vec(&ax.t_inv, u)).collect())
        .collect();
    let wrap = |i: i64, j: i64| -> (i64, i64) {
        if topo == Topology::Periodic {
            (i.rem_euclid(pr.len(0) as i64), j.rem_euclid(pr.len(1) as i64))
        } else {
            (i, j)
        }
    };
    let vat = |d: usize, i: i64, j: i64| -> &Vec<Rational> {
        let (i, j) = wrap(i, j);
        &v[d][pr.index(i, j)]
    };
    let source = p.f.as_ref();
    let rows: Vec<Vec<Rational>> = (next.lo[0]..next.hi[0])
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::with_capacity(next.len(1) * n);
            for j in next.lo[1]..next.hi[1] {
                let mut du = vec![Rational::zero(); n];
                for (d, ax) in sd.axes.iter().enumerate() {
                    let c = if d == 0 { i } else { j };
                    let first = topo == Topology::Boundary && c == pr.lo[d];
                    let last = topo == Topology::Boundary && c == pr.hi[d] - 1;
                    let vc = vat(d, i, j);
                    // steps 3 and 4 at the two faces of the cell
                    let w_right = if last {
                        mat_vec(&ax.boundary.as_ref().expect("boundary maps").1, vc)
                    } else {
                        let (a, b) = shifted(i, j, d, 1);
                        select(&ax.negative, vc, vat(d, a, b))
                    };
                    let w_left = if first {
                        mat_vec(&ax.boundary.as_ref().expect("boundary maps").0, vc)
                    } else {
                        let (a, b) = shifted(i, j, d, -1);
                        select(&ax.negative, vat(d, a, b), vc)
                    };
                    let u_right = mat_vec(&ax.t, &w_right);
                    let u_left = mat_vec(&ax.t, &w_left);
                    let diff: Vec<Rational> = u_right.iter().zip(&u_left).map(|(a, b)| a - b).collect();
                    for (x, y) in du.iter_mut().zip(mat_vec(&ax.b, &diff)) {
                        *x += y;
                    }
                }
                // step 5
                let corr = mat_vec(&sd.a_inv, &du);
                let u = prev.at(i, j);
                let mut out: Vec<Rational> = u.iter().zip(&corr).map(|(a, b)| a - &sd.courant * b).collect();
                if let Some(f) = source {
                    let mut pt = vec![t_l.clone()];
                    pt.extend(cell_point(p, i, j, &sd.h));
                    let g = mat_vec(&sd.a_inv, &f.eval(&pt).expect("arity"));
                    for (o, gk) in out.iter_mut().zip(g) {
                        *o += &sd.tau * gk;
                    }
                }
                row.extend(out);
            }
            row
        })
        .collect();
    Work { region: next, n, data: rows.concat() }
}
