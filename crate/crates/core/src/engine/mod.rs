//! Godunov scheme: exact-rational staged reference and a dyadic backend
//! with a fused stencil and tracked rounding.

mod kernel;
pub mod mat;
mod scheme;
mod staged;

use std::io::Write;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

pub use scheme::{precompute, AxisData, ExactParts, SchemeData};
pub use staged::{flux_branch_free, flux_branching};

use crate::algebraic::{format_rational, pow2, sqrt_upper_rel, Rational};
use crate::linalg::LinalgError;
use crate::planner::GridPlan;
use crate::problem::{HyperbolicProblem, ProblemError, ProblemKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("boundary system on axis {axis} ({side} face): {msg}")]
    Boundary { axis: usize, side: &'static str, msg: String },
    #[error("rounding budget exhausted: {0}")]
    Budget(String),
    #[error("dyadic mantissa overflow at layer {0}")]
    Overflow(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Dyadic,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Dyadic => "dyadic",
        }
    }
}

/// How the Cauchy scheme closes the grid at the edges of Q.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CauchyClosure {
    /// Sample the data on Q widened by L cells per side and drop the outer
    /// ring each step, so stored cells equal the unbounded-grid scheme.
    Cone,
    /// Periodic ghost values.
    Periodic,
}

impl CauchyClosure {
    pub fn as_str(self) -> &'static str {
        match self {
            CauchyClosure::Cone => "cone",
            CauchyClosure::Periodic => "periodic",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub backend: Backend,
    pub closure: CauchyClosure,
    /// Keep every k-th layer (plus the last) in the trace.
    pub keep_every: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { backend: Backend::Dyadic, closure: CauchyClosure::Cone, keep_every: 1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LayerData {
    Exact(Vec<Rational>),
    /// Values `mant / 2^bits`.
    Dyadic { bits: u32, mant: Vec<i128> },
}

/// Values on the cells of Q at time `level * tau`, indexed `(i * ny + j) * n + k`
/// with 0-based cell indices.
#[derive(Clone, Debug, PartialEq)]
pub struct GridLayer {
    pub level: u64,
    pub time: Rational,
    pub nx: usize,
    pub ny: usize,
    pub n: usize,
    pub data: LayerData,
}

impl GridLayer {
    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn value(&self, i: usize, j: usize, k: usize) -> Rational {
        let idx = (i * self.ny + j) * self.n + k;
        match &self.data {
            LayerData::Exact(v) => v[idx].clone(),
            LayerData::Dyadic { bits, mant } => Rational::new(BigInt::from(mant[idx]), BigInt::from(1u8) << *bits as usize),
        }
    }

    pub fn vector(&self, i: usize, j: usize) -> Vec<Rational> {
        (0..self.n).map(|k| self.value(i, j, k)).collect()
    }

    /// All values as exact rationals.
    pub fn rationals(&self) -> Vec<Rational> {
        match &self.data {
            LayerData::Exact(v) => v.clone(),
            LayerData::Dyadic { bits, mant } => {
                let d = BigInt::from(1u8) << *bits as usize;
                mant.iter().map(|m| Rational::new(BigInt::from(*m), d.clone())).collect()
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct GridTrace {
    pub layers: Vec<GridLayer>,
    pub plan: GridPlan,
    pub backend: Backend,
    pub closure: Option<CauchyClosure>,
    /// `2 kappa sum_l ||r_l||` over the per-layer rounding residuals.
    pub rounding_spent: Rational,
    pub residual_norms: Vec<Rational>,
    pub m: usize,
}

impl GridTrace {
    pub fn last(&self) -> &GridLayer {
        self.layers.last().expect("trace has a layer")
    }

    pub fn layer(&self, level: u64) -> Option<&GridLayer> {
        self.layers.iter().find(|l| l.level == level)
    }

    /// Layers as `l,i,j,u1..un` rows (1-based cell indices; `j = 1` for m = 1).
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        let n = self.layers.first().map(|l| l.n).unwrap_or(0);
        write!(w, "l,i,j")?;
        for k in 1..=n {
            write!(w, ",u{k}")?;
        }
        writeln!(w)?;
        for layer in &self.layers {
            for i in 0..layer.nx {
                for j in 0..layer.ny {
                    write!(w, "{},{},{}", layer.level, i + 1, j + 1)?;
                    for k in 0..n {
                        write!(w, ",{}", format_rational(&layer.value(i, j, k)))?;
                    }
                    writeln!(w)?;
                }
            }
        }
        Ok(())
    }
}

/// Half-open cell index ranges per axis (axis 1 is `[0, 1)` when m = 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Region {
    pub lo: [i64; 2],
    pub hi: [i64; 2],
}

impl Region {
    pub fn len(&self, d: usize) -> usize {
        (self.hi[d] - self.lo[d]) as usize
    }

    pub fn count(&self) -> usize {
        self.len(0) * self.len(1)
    }

    pub fn index(&self, i: i64, j: i64) -> usize {
        ((i - self.lo[0]) as usize) * self.len(1) + (j - self.lo[1]) as usize
    }

    pub fn shrink(&self, m: usize) -> Region {
        let mut r = *self;
        for d in 0..m {
            r.lo[d] += 1;
            r.hi[d] -= 1;
        }
        r
    }
}

/// Values on a region; `n` entries per cell.
#[derive(Clone, Debug)]
pub(crate) struct Work<T> {
    pub region: Region,
    pub n: usize,
    pub data: Vec<T>,
}

impl<T> Work<T> {
    pub fn at(&self, i: i64, j: i64) -> &[T] {
        let s = self.region.index(i, j) * self.n;
        &self.data[s..s + self.n]
    }
}

/// How a step finds neighbours and which stencil class a cell uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Topology {
    Periodic,
    Cone,
    Boundary,
}

impl Topology {
    fn of(p: &HyperbolicProblem, c: CauchyClosure) -> Self {
        match (p.kind, c) {
            (ProblemKind::Boundary, _) => Topology::Boundary,
            (ProblemKind::Cauchy, CauchyClosure::Cone) => Topology::Cone,
            (ProblemKind::Cauchy, CauchyClosure::Periodic) => Topology::Periodic,
        }
    }
}

pub(crate) fn q_region(plan: &GridPlan, m: usize) -> Region {
    let c = plan.cells() as i64;
    Region { lo: [0, 0], hi: [c, if m == 2 { c } else { 1 }] }
}

fn initial_region(plan: &GridPlan, m: usize, topo: Topology) -> Region {
    let mut r = q_region(plan, m);
    if topo == Topology::Cone {
        let ext = plan.steps as i64;
        for d in 0..m {
            r.lo[d] -= ext;
            r.hi[d] += ext;
        }
    }
    r
}

/// Cell centre `(i + 1/2) h` for a 0-based (possibly negative) index.
pub(crate) fn center(i: i64, h: &Rational) -> Rational {
    (Rational::from_integer(BigInt::from(2 * i + 1)) * h) / Rational::from_integer(2.into())
}

pub(crate) fn cell_point(p: &HyperbolicProblem, i: i64, j: i64, h: &Rational) -> Vec<Rational> {
    if p.m == 1 {
        vec![center(i, h)]
    } else {
        vec![center(i, h), center(j, h)]
    }
}

fn eval_work(p: &HyperbolicProblem, region: Region, h: &Rational) -> Work<Rational> {
    use rayon::prelude::*;
    let rows: Vec<Vec<Rational>> = (region.lo[0]..region.hi[0])
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::with_capacity(region.len(1) * p.n);
            for j in region.lo[1]..region.hi[1] {
                row.extend(p.phi.eval(&cell_point(p, i, j, h)).expect("arity"));
            }
            row
        })
        .collect();
    Work { region, n: p.n, data: rows.concat() }
}

/// Layer 0: the initial data at the cell centres of Q, exactly.
pub fn init_layer(p: &HyperbolicProblem, plan: &GridPlan) -> GridLayer {
    let w = eval_work(p, q_region(plan, p.m), &plan.h);
    restrict(&w, q_region(plan, p.m), 0, Rational::zero(), LayerKind::Exact)
}

#[derive(Clone, Copy)]
enum LayerKind {
    Exact,
    Dyadic(u32),
}

fn restrict<T: Clone + Into<LayerValue>>(w: &Work<T>, q: Region, level: u64, time: Rational, kind: LayerKind) -> GridLayer {
    let mut vals: Vec<LayerValue> = Vec::with_capacity(q.count() * w.n);
    for i in q.lo[0]..q.hi[0] {
        for j in q.lo[1]..q.hi[1] {
            vals.extend(w.at(i, j).iter().cloned().map(Into::into));
        }
    }
    let data = match kind {
        LayerKind::Exact => LayerData::Exact(vals.into_iter().map(|v| v.into_rational()).collect()),
        LayerKind::Dyadic(bits) => LayerData::Dyadic { bits, mant: vals.into_iter().map(|v| v.into_mant()).collect() },
    };
    GridLayer { level, time, nx: q.len(0), ny: q.len(1), n: w.n, data }
}

enum LayerValue {
    R(Rational),
    M(i128),
}

impl LayerValue {
    fn into_rational(self) -> Rational {
        match self {
            LayerValue::R(r) => r,
            LayerValue::M(_) => unreachable!(),
        }
    }
    fn into_mant(self) -> i128 {
        match self {
            LayerValue::M(m) => m,
            LayerValue::R(_) => unreachable!(),
        }
    }
}

impl From<Rational> for LayerValue {
    fn from(r: Rational) -> Self {
        LayerValue::R(r)
    }
}

impl From<i128> for LayerValue {
    fn from(m: i128) -> Self {
        LayerValue::M(m)
    }
}

/// Grid L2 norm upper bound of residuals given `sum r^2`.
pub(crate) fn residual_norm(sum_sq: &Rational, h: &Rational, m: usize) -> Rational {
    sqrt_upper_rel(&(sum_sq * num_traits::pow(h.clone(), m)), 24)
}

/// Runs the scheme for `plan.steps` steps; `observe` sees every layer.
pub fn run_with(
    p: &HyperbolicProblem,
    plan: &GridPlan,
    sd: &SchemeData,
    opts: &RunOptions,
    mut observe: impl FnMut(&GridLayer),
) -> Result<GridTrace, EngineError> {
    let topo = Topology::of(p, opts.closure);
    let q = q_region(plan, p.m);
    let mut region = initial_region(plan, p.m, topo);
    let every = opts.keep_every.max(1);
    let mut layers = Vec::new();
    let mut residual_norms = Vec::new();
    let two_kappa = Rational::from_integer(2.into()) * &plan.kappa;
    let mut spent = Rational::zero();
    let keep = |l: u64| l % every == 0 || l == plan.steps;
    let check = |spent: &Rational| -> Result<(), EngineError> {
        if spent + &sd.mat_term > plan.budget_round {
            return Err(EngineError::Budget(format!(
                "rounding {} plus matrix term {} exceeds {}",
                format_rational(spent),
                format_rational(&sd.mat_term),
                format_rational(&plan.budget_round)
            )));
        }
        Ok(())
    };
    let closure = (p.kind == ProblemKind::Cauchy).then_some(opts.closure);
    match opts.backend {
        Backend::Exact => {
            let mut w = eval_work(p, region, &plan.h);
            let l0 = restrict(&w, q, 0, Rational::zero(), LayerKind::Exact);
            observe(&l0);
            if keep(0) {
                layers.push(l0);
            }
            for l in 0..plan.steps {
                let next = if topo == Topology::Cone { region.shrink(p.m) } else { region };
                let t_l = &plan.tau * Rational::from_integer(BigInt::from(l));
                w = staged::step_layer(p, sd, &w, next, topo, &t_l);
                region = next;
                let time = &plan.tau * Rational::from_integer(BigInt::from(l + 1));
                let layer = restrict(&w, q, l + 1, time, LayerKind::Exact);
                observe(&layer);
                if keep(l + 1) {
                    layers.push(layer);
                }
            }
        }
        Backend::Dyadic => {
            let bits = plan.dyadic_precision_bits;
            let exact0 = eval_work(p, region, &plan.h);
            let scale = pow2(bits as i64);
            let mut sum0 = Rational::zero();
            let mut mant = Vec::with_capacity(exact0.data.len());
            for v in &exact0.data {
                let m = crate::algebraic::round_half_even(&(v.numer() << bits as usize), v.denom());
                let r = v - Rational::new(m.clone(), scale.numer().clone());
                sum0 += &r * &r;
                mant.push(m.to_i128().ok_or(EngineError::Overflow(0))?);
            }
            let r0 = residual_norm(&sum0, &plan.h, p.m);
            spent += &two_kappa * &r0;
            residual_norms.push(r0);
            check(&spent)?;
            let mut w = Work { region, n: p.n, data: mant };
            let l0 = restrict(&w, q, 0, Rational::zero(), LayerKind::Dyadic(bits));
            observe(&l0);
            if keep(0) {
                layers.push(l0);
            }
            let k = kernel::IntStencil::new(sd, p.m);
            for l in 0..plan.steps {
                let next = if topo == Topology::Cone { region.shrink(p.m) } else { region };
                let t_l = &plan.tau * Rational::from_integer(BigInt::from(l));
                let (nw, sum_sq) = kernel::step(p, sd, &k, &w, next, topo, &t_l, bits).ok_or(EngineError::Overflow(l + 1))?;
                w = nw;
                region = next;
                let rn = residual_norm(&sum_sq, &plan.h, p.m) * pow2(-(bits as i64));
                spent += &two_kappa * &rn;
                residual_norms.push(rn);
                check(&spent)?;
                let time = &plan.tau * Rational::from_integer(BigInt::from(l + 1));
                let layer = restrict(&w, q, l + 1, time, LayerKind::Dyadic(bits));
                observe(&layer);
                if keep(l + 1) {
                    layers.push(layer);
                }
            }
        }
    }
    Ok(GridTrace { layers, plan: plan.clone(), backend: opts.backend, closure, rounding_spent: spent, residual_norms, m: p.m })
}

/// One exact step from an arbitrary layer on Q, with periodic closure for
/// Cauchy problems; `layer.time` is the time of the source term.
pub fn step_exact(p: &HyperbolicProblem, plan: &GridPlan, sd: &SchemeData, layer: &GridLayer) -> GridLayer {
    let topo = Topology::of(p, CauchyClosure::Periodic);
    let q = q_region(plan, p.m);
    assert_eq!(layer.cells(), q.count(), "layer does not match the plan");
    let w = Work { region: q, n: p.n, data: layer.rationals() };
    let next = staged::step_layer(p, sd, &w, q, topo, &layer.time);
    let time = &layer.time + &plan.tau;
    restrict(&next, q, layer.level + 1, time, LayerKind::Exact)
}

pub fn run(p: &HyperbolicProblem, plan: &GridPlan, sd: &SchemeData, opts: &RunOptions) -> Result<GridTrace, EngineError> {
    run_with(p, plan, sd, opts, |_| {})
}

/// Discrete A-energy `h^m sum (A u, u)` of a layer (A rational).
pub fn energy(layer: &GridLayer, a: &[Vec<Rational>], h: &Rational, m: usize) -> Rational {
    let mut s = Rational::zero();
    for i in 0..layer.nx {
        for j in 0..layer.ny {
            let u = layer.vector(i, j);
            let au = mat::mat_vec(&a.to_vec(), &u);
            for (x, y) in au.iter().zip(&u) {
                s += x * y;
            }
        }
    }
    s * num_traits::pow(h.clone(), m)
}

/// Componentwise sum over all cells.
pub fn layer_sum(layer: &GridLayer) -> Vec<Rational> {
    let mut s = vec![Rational::zero(); layer.n];
    for i in 0..layer.nx {
        for j in 0..layer.ny {
            for (k, sk) in s.iter_mut().enumerate() {
                *sk += layer.value(i, j, k);
            }
        }
    }
    s
}
