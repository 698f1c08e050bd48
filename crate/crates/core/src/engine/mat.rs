//! Small dense rational matrices for the hot loop.

use num_traits::Zero;

use crate::algebraic::Rational;
use crate::linalg::ExactMatrix;

pub type Mat = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| if i == j { Rational::from_integer(1.into()) } else { Rational::zero() }).collect()).collect()
}

pub fn mat_vec(m: &Mat, v: &[Rational]) -> Vec<Rational> {
    m.iter()
        .map(|row| {
            let mut acc = Rational::zero();
            for (a, b) in row.iter().zip(v) {
                if !a.is_zero() && !b.is_zero() {
                    acc += a * b;
                }
            }
            acc
        })
        .collect()
}

pub fn to_exact(m: &Mat) -> ExactMatrix {
    ExactMatrix::from_rationals(m)
}

pub fn from_exact(m: &ExactMatrix) -> Mat {
    m.to_rationals().expect("rational matrix")
}
