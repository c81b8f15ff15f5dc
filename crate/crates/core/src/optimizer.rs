//! Seeded derivative-free search: random restarts of an adaptive coordinate
//! walk with a ramped quadratic penalty, plus 1D and isotonic helpers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("objective is not finite at the start of any restart")]
    NonFinite,
    #[error("no restart met the constraint tolerance {0}")]
    Infeasible(f64),
    #[error("invalid search spec: {0}")]
    InvalidSpec(String),
    #[error("degenerate interval [{0}, {1}]")]
    Degenerate(f64, f64),
}

/// How the raw search vector is read by the objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parametrization {
    Box,
    /// `k` logits for a pmf on `k + 1` symbols; see [`softmax_with_anchor`].
    SimplexSoftmax,
    /// Lower-triangular factor entries; see [`cholesky_psd`].
    PsdCholesky,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltySchedule {
    pub start: f64,
    pub end: f64,
}

impl Default for PenaltySchedule {
    fn default() -> Self {
        Self { start: 1e2, end: 1e6 }
    }
}

impl PenaltySchedule {
    /// Geometric ramp from `start` to `end` over the iterations.
    pub fn weight(&self, it: usize, iterations: usize) -> f64 {
        if iterations <= 1 {
            return self.end;
        }
        let t = it as f64 / (iterations - 1) as f64;
        self.start * (self.end / self.start).powf(t)
    }
}

fn default_step() -> f64 {
    0.1
}

fn default_tol() -> f64 {
    1e-4
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub dimension: usize,
    pub parametrization: Parametrization,
    /// Box on the raw coordinates, one `(lo, hi)` per dimension.
    pub bounds: Vec<(f64, f64)>,
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
    #[serde(default)]
    pub penalty: PenaltySchedule,
    /// Initial step as a fraction of each coordinate's width.
    #[serde(default = "default_step")]
    pub initial_step: f64,
    #[serde(default = "default_tol")]
    pub feasibility_tol: f64,
}

impl SearchSpec {
    pub fn boxed(bounds: Vec<(f64, f64)>, restarts: usize, iterations: usize, seed: u64) -> Self {
        Self {
            dimension: bounds.len(),
            parametrization: Parametrization::Box,
            bounds,
            restarts,
            iterations,
            seed,
            penalty: PenaltySchedule::default(),
            initial_step: default_step(),
            feasibility_tol: default_tol(),
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: &str| Err(SearchError::InvalidSpec(m.into()));
        if self.restarts == 0 {
            return bad("restarts must be at least 1");
        }
        if self.dimension == 0 || self.bounds.len() != self.dimension {
            return bad("bounds must match a positive dimension");
        }
        if self.bounds.iter().any(|(lo, hi)| !(lo <= hi) || !lo.is_finite() || !hi.is_finite()) {
            return bad("every bound needs finite lo <= hi");
        }
        if !(self.penalty.start > 0.0 && self.penalty.end >= self.penalty.start) {
            return bad("penalty schedule must be positive and non-decreasing");
        }
        Ok(())
    }
}

/// Objective value and equality-constraint residuals at a point. A
/// non-finite value marks the point as outside the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub residuals: Vec<f64>,
}

impl Evaluation {
    pub fn unconstrained(value: f64) -> Self {
        Self { value, residuals: Vec::new() }
    }

    fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    fn sq_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r * r).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    pub restart: usize,
    pub value: f64,
    pub max_residual: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub value: f64,
    pub point: Vec<f64>,
    pub max_residual: f64,
    pub restart: usize,
    pub trace: Vec<RestartRecord>,
}

impl SearchResult {
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("restart,value,max_residual,feasible\n");
        for r in &self.trace {
            s.push_str(&format!("{},{},{},{}\n", r.restart, r.value, r.max_residual, r.feasible));
        }
        s
    }
}

/// 64-bit mix of a master seed and a stream index.
pub fn splitmix64(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn restart_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed, index as u64))
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

struct Walk {
    point: Vec<f64>,
    eval: Evaluation,
}

fn local_search<F>(f: &F, spec: &SearchSpec, index: usize) -> Option<Walk>
where
    F: Fn(&[f64]) -> Evaluation,
{
    let mut rng = restart_rng(spec.seed, index);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        spec.bounds.iter().map(|&(lo, hi)| if hi > lo { rng.gen_range(lo..=hi) } else { lo }).collect()
    };
    let mut start = None;
    for _ in 0..32 {
        let x = draw(&mut rng);
        let e = f(&x);
        if e.value.is_finite() && e.residuals.iter().all(|r| r.is_finite()) {
            start = Some((x, e));
            break;
        }
    }
    let (mut x, mut ex) = start?;
    let widths: Vec<f64> = spec.bounds.iter().map(|(lo, hi)| hi - lo).collect();
    let mut step: Vec<f64> = widths.iter().map(|w| w * spec.initial_step).collect();
    let d = spec.dimension;
    for it in 0..spec.iterations {
        let w = spec.penalty.weight(it, spec.iterations);
        let merit = |e: &Evaluation| e.value - w * e.sq_residual();
        let i = it % d;
        if widths[i] <= 0.0 {
            continue;
        }
        let mut y = x.clone();
        let (lo, hi) = spec.bounds[i];
        y[i] = (y[i] + step[i] * normal(&mut rng)).clamp(lo, hi);
        let ey = f(&y);
        if ey.value.is_finite() && merit(&ey) > merit(&ex) {
            x = y;
            ex = ey;
            step[i] = (step[i] * 1.2).min(widths[i]);
        } else {
            step[i] = (step[i] * 0.95).max(widths[i] * 1e-12);
        }
    }
    Some(Walk { point: x, eval: ex })
}

/// Best feasible value over seeded restarts. Restarts run in parallel; the
/// reduction is a max with ties broken by the lower restart index, so the
/// result does not depend on scheduling.
pub fn maximize<F>(objective: F, spec: &SearchSpec) -> Result<SearchResult, SearchError>
where
    F: Fn(&[f64]) -> Evaluation + Sync,
{
    spec.validate()?;
    let walks: Vec<Option<Walk>> = (0..spec.restarts)
        .into_par_iter()
        .map(|k| local_search(&objective, spec, k))
        .collect();
    if walks.iter().all(|w| w.is_none()) {
        return Err(SearchError::NonFinite);
    }
    let mut trace = Vec::with_capacity(walks.len());
    let mut best: Option<(usize, &Walk)> = None;
    for (k, w) in walks.iter().enumerate() {
        let Some(w) = w else { continue };
        let r = w.eval.max_residual();
        let feasible = r <= spec.feasibility_tol;
        trace.push(RestartRecord {
            restart: k,
            value: w.eval.value,
            max_residual: r,
            feasible,
        });
        if feasible && best.map_or(true, |(_, b)| w.eval.value > b.eval.value) {
            best = Some((k, w));
        }
    }
    let (k, w) = best.ok_or(SearchError::Infeasible(spec.feasibility_tol))?;
    Ok(SearchResult {
        value: w.eval.value,
        point: w.point.clone(),
        max_residual: w.eval.max_residual(),
        restart: k,
        trace,
    })
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section argmax on `[lo, hi]`; the endpoints are also compared so a
/// monotone `f` returns its boundary.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, SearchError> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(SearchError::Degenerate(lo, hi));
    }
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol.max(1e-15 * (a.abs() + b.abs())) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    let cands = [(mid, f(mid)), (lo, f(lo)), (hi, f(hi))];
    Ok(cands
        .iter()
        .fold(cands[0], |best, &c| if c.1 > best.1 { c } else { best })
        .0)
}

/// Grid scan to bracket the best cell, then golden refinement inside it.
/// Returns `(argmax, max)`.
pub fn grid_golden<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, cells: usize, tol: f64) -> Result<(f64, f64), SearchError> {
    if !(lo < hi) {
        return Err(SearchError::Degenerate(lo, hi));
    }
    let n = cells.max(2);
    let h = (hi - lo) / n as f64;
    let (mut bi, mut bv) = (0usize, f64::NEG_INFINITY);
    for i in 0..=n {
        let v = f(lo + h * i as f64);
        if v > bv {
            bv = v;
            bi = i;
        }
    }
    let a = (lo + h * (bi as f64 - 1.0)).max(lo);
    let b = (lo + h * (bi as f64 + 1.0)).min(hi);
    let x = golden_section(&f, a, b, tol)?;
    let fx = f(x);
    Ok(if fx >= bv { (x, fx) } else { (lo + h * bi as f64, bv) })
}

/// Least-squares nearest non-increasing sequence (pool adjacent violators).
pub fn isotonic_project(values: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() >= 2 {
            let (m2, n2) = blocks[blocks.len() - 1];
            let (m1, n1) = blocks[blocks.len() - 2];
            if m1 >= m2 {
                break;
            }
            blocks.pop();
            let n = n1 + n2;
            *blocks.last_mut().unwrap() = ((m1 * n1 as f64 + m2 * n2 as f64) / n as f64, n);
        }
    }
    blocks.into_iter().flat_map(|(m, n)| std::iter::repeat(m).take(n)).collect()
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Softmax over `raw` plus one extra logit fixed at zero.
pub fn softmax_with_anchor(raw: &[f64]) -> Vec<f64> {
    let m = raw.iter().fold(0.0f64, |m, &v| m.max(v));
    let mut e: Vec<f64> = raw.iter().map(|&v| (v - m).exp()).collect();
    e.push((-m).exp());
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// `L Lᵀ` for the row-major lower-triangular factor packed in `raw`
/// (`n(n+1)/2` entries). Returns the row-major `n×n` matrix.
pub fn cholesky_psd(raw: &[f64], n: usize) -> Vec<f64> {
    let mut l = vec![0.0; n * n];
    let mut k = 0;
    for i in 0..n {
        for j in 0..=i {
            l[i * n + j] = raw.get(k).copied().unwrap_or(0.0);
            k += 1;
        }
    }
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = (0..n).map(|m| l[i * n + m] * l[j * n + m]).sum();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_objective() {
        let spec = SearchSpec::boxed(vec![(0.0, 1.0); 2], 4, 20, 1);
        let r = maximize(|_| Evaluation::unconstrained(3.5), &spec).unwrap();
        assert_eq!(r.value, 3.5);
    }

    #[test]
    fn recovers_known_point() {
        let target = [0.3, -0.7, 0.55];
        let spec = SearchSpec::boxed(vec![(-1.0, 1.0); 3], 8, 3000, 7);
        let r = maximize(
            |x| Evaluation::unconstrained(-x.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum::<f64>()),
            &spec,
        )
        .unwrap();
        for (a, b) in r.point.iter().zip(&target) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn penalty_enforces_equality() {
        // max x + y subject to x - y = 0.2 on the unit box
        let spec = SearchSpec::boxed(vec![(0.0, 1.0); 2], 8, 2000, 3);
        let r = maximize(
            |x| Evaluation {
                value: x[0] + x[1],
                residuals: vec![x[0] - x[1] - 0.2],
            },
            &spec,
        )
        .unwrap();
        assert!(r.max_residual <= 1e-4);
        assert!((r.value - 1.8).abs() < 1e-3);
    }

    #[test]
    fn errors() {
        let spec = SearchSpec::boxed(vec![(0.0, 1.0)], 3, 10, 0);
        assert_eq!(maximize(|_| Evaluation::unconstrained(f64::NAN), &spec), Err(SearchError::NonFinite));
        let r = maximize(|_| Evaluation { value: 1.0, residuals: vec![1.0] }, &spec);
        assert!(matches!(r, Err(SearchError::Infeasible(_))));
        let bad = SearchSpec { restarts: 0, ..spec };
        assert!(matches!(maximize(|_| Evaluation::unconstrained(0.0), &bad), Err(SearchError::InvalidSpec(_))));
    }

    #[test]
    fn deterministic_and_order_free() {
        let spec = SearchSpec::boxed(vec![(-2.0, 2.0); 2], 16, 200, 42);
        let f = |x: &[f64]| Evaluation::unconstrained((3.0 * x[0]).sin() * (2.0 * x[1]).cos() - 0.1 * x[0] * x[0]);
        let a = maximize(f, &spec).unwrap();
        let b = maximize(f, &spec).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.point, b.point);
        // the reduction equals a sequential max over independent restarts
        let seq = (0..spec.restarts)
            .filter_map(|k| local_search(&f, &spec, k))
            .map(|w| w.eval.value)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(a.value, seq);
        assert!(a.trace_csv().starts_with("restart,value"));
    }

    #[test]
    fn golden_examples() {
        let x = golden_section(|x| -(x - 0.3).powi(2), -1.0, 2.0, 1e-12).unwrap();
        assert!((x - 0.3).abs() < 1e-10);
        assert_eq!(golden_section(|x| x, 0.0, 1.0, 1e-9).unwrap(), 1.0);
        assert_eq!(golden_section(|x| -x, 0.0, 1.0, 1e-9).unwrap(), 0.0);
        assert!(golden_section(|x| x, 1.0, 1.0, 1e-9).is_err());
        let (x, v) = grid_golden(|x| (x * 3.0).sin(), 0.0, 3.0, 50, 1e-12).unwrap();
        assert!((x - std::f64::consts::FRAC_PI_6).abs() < 1e-6 && (v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn isotonic_examples() {
        assert_eq!(isotonic_project(&[3.0, 2.0, 2.0, 1.0]), vec![3.0, 2.0, 2.0, 1.0]);
        assert_eq!(isotonic_project(&[1.0, 2.0]), vec![1.5, 1.5]);
        assert_eq!(isotonic_project(&[]), Vec::<f64>::new());
    }

    #[test]
    fn parametrization_helpers() {
        let p = softmax_with_anchor(&[0.0, 0.0, 0.0]);
        assert!(p.iter().all(|v| (v - 0.25).abs() < 1e-15));
        let k = cholesky_psd(&[1.0, 2.0, 3.0], 2);
        assert_eq!(k, vec![1.0, 2.0, 2.0, 13.0]);
        assert_eq!(sigmoid(0.0), 0.5);
        assert_ne!(splitmix64(1, 0), splitmix64(1, 1));
    }

    proptest! {
        #[test]
        fn isotonic_is_monotone_and_close(slope in 0.01f64..1.0, noise in prop::collection::vec(-0.05f64..0.05, 5..60)) {
            let line: Vec<f64> = (0..noise.len()).map(|i| 1.0 - slope * i as f64).collect();
            let noisy: Vec<f64> = line.iter().zip(&noise).map(|(a, b)| a + b).collect();
            let p = isotonic_project(&noisy);
            prop_assert!(p.windows(2).all(|w| w[0] >= w[1] - 1e-15));
            for (a, b) in p.iter().zip(&line) {
                prop_assert!((a - b).abs() <= 0.05 + 1e-12);
            }
            // mean is preserved by PAV
            let s1: f64 = p.iter().sum();
            let s2: f64 = noisy.iter().sum();
            prop_assert!((s1 - s2).abs() < 1e-9);
        }
    }
}
