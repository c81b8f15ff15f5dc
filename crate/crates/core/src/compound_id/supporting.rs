//! Weighted boundary functions of the BEC/BSC example and their
//! supporting-line description.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::info::{conv, h2, Pmf};
use crate::optimizer::{golden_section, grid_golden, isotonic_project, maximize, sigmoid, softmax_with_anchor};
use crate::optimizer::{Evaluation, SearchSpec};

use super::becbsc::alpha0_solve;
use super::{check_range, BecBscParams, CompoundError};

/// Largest auxiliary alphabet needed for a binary input.
pub const MAX_Q_CARD: usize = 4;
const UNIFORM_TOL: f64 = 1e-9;
const RAW_BOUND: f64 = 12.0;

/// Pmf of `Q` and `P(X = 1 | Q = q)` for each `q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxDesign {
    q: Pmf,
    x: Vec<f64>,
}

impl AuxDesign {
    pub fn new(q: Pmf, x: Vec<f64>) -> Result<Self, CompoundError> {
        if q.len() > MAX_Q_CARD || q.len() != x.len() {
            return Err(CompoundError::Design(format!(
                "need |Q| <= {MAX_Q_CARD} and one conditional per symbol, got {} and {}",
                q.len(),
                x.len()
            )));
        }
        if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(CompoundError::Design(format!("conditional {v} outside [0, 1]")));
        }
        Ok(Self { q, x })
    }

    /// Reads 3 logits and 3 sigmoids; the fourth conditional is set so that
    /// `P(X = 1) = 1/2`. `None` when that conditional leaves `[0, 1]`, with
    /// the overshoot reported.
    pub fn from_raw(raw: &[f64]) -> Result<Self, f64> {
        let w = softmax_with_anchor(&raw[..3]);
        let mut x: Vec<f64> = raw[3..6].iter().map(|&r| sigmoid(r)).collect();
        let partial: f64 = w[..3].iter().zip(&x).map(|(a, b)| a * b).sum();
        let last = (0.5 - partial) / w[3];
        if !(0.0..=1.0).contains(&last) {
            return Err(if last < 0.0 { -last } else { last - 1.0 });
        }
        x.push(last);
        let q = Pmf::normalized(w).map_err(|_| f64::INFINITY)?;
        Ok(Self { q, x })
    }

    pub fn q(&self) -> &Pmf {
        &self.q
    }

    pub fn conditionals(&self) -> &[f64] {
        &self.x
    }

    pub fn p_x1(&self) -> f64 {
        self.q.probs().iter().zip(&self.x).map(|(a, b)| a * b).sum()
    }

    pub fn has_uniform_input(&self) -> bool {
        (self.p_x1() - 0.5).abs() <= UNIFORM_TOL
    }
}

/// `I(Q;Y1)`, `I(Q;Y2)` and `I(X;Z|Q)` of a design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxTerms {
    pub i_q_y1: f64,
    pub i_q_y2: f64,
    pub i_x_z_given_q: f64,
}

pub fn aux_terms(params: &BecBscParams, design: &AuxDesign) -> AuxTerms {
    let pi = design.p_x1();
    let (mut y1, mut y2, mut z) = (h2(conv(params.p1, pi)), h2(pi), 0.0);
    for (&w, &x) in design.q.probs().iter().zip(&design.x) {
        y1 -= w * h2(conv(params.p1, x));
        y2 -= w * h2(x);
        z += w * (h2(conv(params.p, x)) - h2(params.p));
    }
    AuxTerms {
        i_q_y1: y1.max(0.0),
        i_q_y2: ((1.0 - params.e2) * y2).max(0.0),
        i_x_z_given_q: z.max(0.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iterations: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self { restarts: 2000, iterations: 500 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruteForce {
    pub value: f64,
    pub design: AuxDesign,
    pub residual: f64,
}

fn design_spec(budget: SearchBudget, seed: u64) -> SearchSpec {
    SearchSpec::boxed(vec![(-RAW_BOUND, RAW_BOUND); 6], budget.restarts, budget.iterations, seed)
}

fn weighted(a: f64, t: &AuxTerms) -> f64 {
    a * t.i_q_y1 + (1.0 - a) * t.i_q_y2
}

/// Best `a I(Q;Y1) + (1-a) I(Q;Y2)` found subject to `I(X;Z|Q) = x` with a
/// uniform input. A lower estimate of the weighted boundary at `x`.
pub fn brute_force_weighted(
    a: f64,
    x: f64,
    params: &BecBscParams,
    budget: SearchBudget,
    seed: u64,
) -> Result<BruteForce, CompoundError> {
    check_range("a", a, 0.0, 1.0)?;
    check_range("x", x, 0.0, 1.0 - h2(params.p))?;
    let objective = |raw: &[f64]| match AuxDesign::from_raw(raw) {
        Ok(d) => {
            let t = aux_terms(params, &d);
            Evaluation { value: weighted(a, &t), residuals: vec![t.i_x_z_given_q - x] }
        }
        Err(over) => Evaluation { value: -10.0 - over, residuals: vec![1.0 + over] },
    };
    let res = maximize(objective, &design_spec(budget, seed))?;
    let design = AuxDesign::from_raw(&res.point).map_err(|_| CompoundError::Design("best point infeasible".into()))?;
    Ok(BruteForce { value: res.value, design, residual: res.max_residual })
}

/// Exact `F_a(λ)`: with a uniform input the maximizing design is the
/// symmetric pair `{s, 1-s}`, so a 1D search over `s ∈ [0, 1/2]` suffices.
pub fn f_a_exact(a: f64, lambda: f64, params: &BecBscParams) -> f64 {
    let c = 1.0 - params.e2;
    let g = |s: f64| -a * h2(conv(params.p1, s)) - (1.0 - a) * c * h2(s) + lambda * h2(conv(params.p, s));
    let (_, best) = grid_golden(g, 0.0, 0.5, 200, 1e-12).expect("nondegenerate interval");
    a + (1.0 - a) * c - lambda * h2(params.p) + best
}

/// `F_a(λ)` as the larger of the exact route and a seeded design search.
pub fn f_a(a: f64, lambda: f64, params: &BecBscParams, budget: SearchBudget, seed: u64) -> Result<f64, CompoundError> {
    check_range("a", a, 0.0, 1.0)?;
    check_range("lambda", lambda, 0.0, f64::MAX)?;
    let objective = |raw: &[f64]| match AuxDesign::from_raw(raw) {
        Ok(d) => {
            let t = aux_terms(params, &d);
            Evaluation::unconstrained(weighted(a, &t) + lambda * t.i_x_z_given_q)
        }
        Err(over) => Evaluation::unconstrained(-10.0 - over),
    };
    let searched = maximize(objective, &design_spec(budget, seed))?.value;
    Ok(f_a_exact(a, lambda, params).max(searched))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub max: f64,
    pub step: f64,
}

impl Default for LambdaGrid {
    fn default() -> Self {
        Self { max: 10.0, step: 0.01 }
    }
}

impl LambdaGrid {
    pub fn points(&self) -> Vec<f64> {
        let n = (self.max / self.step).round() as usize;
        (0..=n).map(|k| k as f64 * self.step).collect()
    }
}

/// `F_a` sampled on a λ grid and the resulting upper bounds `t_a(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportingLineEval {
    pub a: f64,
    pub lambdas: Vec<f64>,
    pub f_values: Vec<f64>,
    pub xs: Vec<f64>,
    pub t_values: Vec<f64>,
}

impl SupportingLineEval {
    pub fn new(a: f64, params: &BecBscParams, grid: LambdaGrid) -> Self {
        let lambdas = grid.points();
        let f_values = lambdas.par_iter().map(|&l| f_a_exact(a, l, params)).collect();
        Self { a, lambdas, f_values, xs: Vec::new(), t_values: Vec::new() }
    }

    /// `min_λ F_a(λ) - λx`: grid minimum, refined by golden section in the
    /// bracketing cells.
    pub fn upper(&self, x: f64, params: &BecBscParams) -> f64 {
        let (k, best) = self
            .f_values
            .iter()
            .zip(&self.lambdas)
            .map(|(f, l)| f - l * x)
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (k, v)| if v < acc.1 { (k, v) } else { acc });
        let lo = self.lambdas[k.saturating_sub(1)];
        let hi = self.lambdas[(k + 1).min(self.lambdas.len() - 1)];
        if hi <= lo {
            return best;
        }
        let h = |l: f64| -(f_a_exact(self.a, l, params) - l * x);
        match golden_section(h, lo, hi, 1e-10) {
            Ok(l) => best.min(f_a_exact(self.a, l, params) - l * x),
            Err(_) => best,
        }
    }

    pub fn evaluate(mut self, xs: &[f64], params: &BecBscParams) -> Self {
        self.t_values = xs.par_iter().map(|&x| self.upper(x, params)).collect();
        self.xs = xs.to_vec();
        self
    }
}

/// Supporting-line upper bound on the weighted boundary at `x`.
pub fn t_a_upper(a: f64, x: f64, params: &BecBscParams, grid: LambdaGrid) -> f64 {
    SupportingLineEval::new(a, params, grid).upper(x, params)
}

fn check_x(params: &BecBscParams, x: f64) -> Result<f64, CompoundError> {
    check_range("x", x, 0.0, 1.0 - h2(params.p))
}

/// `s ∈ [0, 1/2]` with `H2(p*s) - H2(p) = x`.
fn z_crossover(params: &BecBscParams, x: f64) -> f64 {
    let target = h2(params.p) + x;
    let (mut lo, mut hi) = (0.0, 0.5);
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if h2(conv(params.p, m)) < target {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// Boundary for the first receiver alone: `1 - H2(p1*s)` at the `s` that
/// spends `x` on Z.
pub fn t1(params: &BecBscParams, x: f64) -> Result<f64, CompoundError> {
    let x = check_x(params, x)?;
    Ok(1.0 - h2(conv(params.p1, z_crossover(params, x))))
}

/// Boundary for the erasure receiver alone: `(1-e2)(1 - x / (1 - H2(p)))`.
pub fn t0(params: &BecBscParams, x: f64) -> Result<f64, CompoundError> {
    let x = check_x(params, x)?;
    Ok((1.0 - params.e2) * (1.0 - x / (1.0 - h2(params.p))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DaCurve {
    pub r1: Vec<f64>,
    /// Normalized difference; all zero when the raw gap is below `1e-9`.
    pub d: Vec<f64>,
    pub raw: Vec<f64>,
    pub max_abs: f64,
}

/// Inverse of a non-increasing sampled curve by linear interpolation.
fn invert(xs: &[f64], ts: &[f64], r: f64) -> f64 {
    if r >= ts[0] {
        return xs[0];
    }
    for k in 1..xs.len() {
        if ts[k] <= r {
            let (t0, t1) = (ts[k - 1], ts[k]);
            if t0 == t1 {
                return xs[k];
            }
            return xs[k - 1] + (xs[k] - xs[k - 1]) * (t0 - r) / (t0 - t1);
        }
    }
    xs[xs.len() - 1]
}

/// Normalized gap `t1^{-1}(R1) - t_a^{-1}(R1)` on the `R1` grid, from both
/// curves sampled at `x_points` abscissae and made monotone.
pub fn d_a_curve(
    a: f64,
    params: &BecBscParams,
    r1_grid: &[f64],
    x_points: usize,
    grid: LambdaGrid,
) -> Result<DaCurve, CompoundError> {
    check_range("a", a, 0.0, 1.0)?;
    let a0 = alpha0_solve(params)?;
    let r1_max = 1.0 - h2(conv(params.p1, a0));
    for &r in r1_grid {
        check_range("R1", r, f64::MIN_POSITIVE, r1_max)?;
    }
    let top = r1_grid.iter().fold(0.0f64, |m, &v| m.max(v));
    let x_max = 1.0 - h2(params.p);
    let sl = SupportingLineEval::new(a, params, grid);
    let mut x_lo = {
        let s = (crate::info::h2_inverse(1.0 - top)? - params.p1) / (1.0 - 2.0 * params.p1);
        (h2(conv(params.p, s.clamp(0.0, 0.5))) - h2(params.p) - 0.01).max(0.0)
    };
    while x_lo > 0.0 && sl.upper(x_lo, params) < top {
        x_lo = (x_lo - 0.02).max(0.0);
    }
    let n = x_points.max(2);
    let xs: Vec<f64> = (0..n).map(|k| x_lo + (x_max - x_lo) * k as f64 / (n - 1) as f64).collect();
    let t1s: Vec<f64> = xs.iter().map(|&x| t1(params, x)).collect::<Result<_, _>>()?;
    let sl = sl.evaluate(&xs, params);
    let t1s = isotonic_project(&t1s);
    let tas = isotonic_project(&sl.t_values);
    let raw: Vec<f64> = r1_grid.iter().map(|&r| invert(&xs, &t1s, r) - invert(&xs, &tas, r)).collect();
    let max_abs = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let d = if max_abs <= 1e-9 { vec![0.0; raw.len()] } else { raw.iter().map(|v| v / max_abs).collect() };
    Ok(DaCurve { r1: r1_grid.to_vec(), d, raw, max_abs })
}
