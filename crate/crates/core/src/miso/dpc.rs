use serde::{Deserialize, Serialize};

use super::{check_range, Beam, DpcScheme, GaussRatePoint, MisoChannel, MisoError};

/// `k − ½·log₂(a(α−b)² + m)`, the shape shared by every DPC rate in `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LogQuad {
    pub k: f64,
    pub a: f64,
    pub b: f64,
    pub m: f64,
}

impl LogQuad {
    const ZERO: LogQuad = LogQuad { k: 0.0, a: 0.0, b: 0.0, m: 1.0 };

    pub fn value(&self, alpha: f64) -> f64 {
        let d = alpha - self.b;
        self.k - 0.5 * (self.a * d * d + self.m).log2()
    }

    fn denom(&self, alpha: f64) -> f64 {
        let d = alpha - self.b;
        self.a * d * d + self.m
    }
}

/// Channel gains along the two beams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Gains {
    pub hu: [f64; 2],
    pub hv: [f64; 2],
    pub gu: f64,
    pub gv: f64,
}

impl Gains {
    pub fn new(channel: &MisoChannel, b_u: Beam, b_v: Beam) -> Self {
        Self {
            hu: [b_u.project(channel.h1()), b_u.project(channel.h2())],
            hv: [b_v.project(channel.h1()), b_v.project(channel.h2())],
            gu: b_u.project(channel.g()),
            gv: b_v.project(channel.g()),
        }
    }

    /// Common-message rate for receiver `j ∈ {0, 1}` with private power `x`
    /// treated as the receiver-side term selected by `mode`.
    pub fn quad(&self, j: usize, p_u: f64, p_v: f64, n: f64, x: f64, mode: QuadMode) -> LogQuad {
        if p_u <= 0.0 {
            return LogQuad::ZERO;
        }
        let (hu, hv) = (self.hu[j], self.hv[j]);
        let s = hu * hu * p_u + n;
        let rem = p_u - x;
        let (a, b) = if rem <= 0.0 || p_v <= 0.0 {
            (0.0, 0.0)
        } else {
            let ix = p_v / rem * s * s / (s + hv * hv * p_v);
            (ix, rem * hu * hv / s)
        };
        let k = 0.5 * s.log2();
        match mode {
            QuadMode::Common => LogQuad { k, a, b, m: n },
            QuadMode::Private => LogQuad { k, a: a * n / (hu * hu * x + n), b, m: n },
            QuadMode::Uncorrelated(share) => {
                let free = 0.5 * share * ((hu * hu * x + n) / n).log2();
                LogQuad { k: k + free, a, b, m: n + hu * hu * x }
            }
        }
    }

    pub fn r2_common(&self, p_u: f64, p_v: f64, n: f64) -> f64 {
        let iu = self.gu * self.gu * p_u + n;
        0.5 * ((iu + self.gv * self.gv * p_v) / iu).log2()
    }

    pub fn r2_corner(&self, p_u: f64, p_v: f64, n: f64) -> GaussRatePoint {
        let r1 = (0..2)
            .map(|j| {
                let v = self.hv[j] * self.hv[j] * p_v + n;
                0.5 * ((self.hu[j] * self.hu[j] * p_u + v) / v).log2()
            })
            .fold(f64::INFINITY, f64::min);
        GaussRatePoint::new(r1, 0.5 * ((self.gv * self.gv * p_v + n) / n).log2())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum QuadMode {
    Common,
    Private,
    /// Time share of the receiver's private slot.
    Uncorrelated(f64),
}

/// Roots of `q1(α) − q2(α) = delta`.
pub(crate) fn crossings(q1: &LogQuad, q2: &LogQuad, delta: f64) -> Vec<f64> {
    let r = (2.0 * (q1.k - q2.k - delta)).exp2();
    if !r.is_finite() {
        return Vec::new();
    }
    let qa = q1.a - r * q2.a;
    let qb = -2.0 * (q1.a * q1.b - r * q2.a * q2.b);
    let qc = q1.a * q1.b * q1.b + q1.m - r * (q2.a * q2.b * q2.b + q2.m);
    let scale = q1.a + r * q2.a;
    if qa.abs() <= 1e-13 * scale.max(1e-300) {
        return if qb != 0.0 { vec![-qc / qb] } else { Vec::new() };
    }
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Vec::new();
    }
    let s = disc.sqrt();
    let t = -0.5 * (qb + qb.signum() * s);
    let mut roots = vec![t / qa];
    if t != 0.0 {
        roots.push(qc / t);
    }
    roots.retain(|r| r.is_finite());
    roots
}

/// Stationary points of `q1 + q2` between the two peaks.
fn sum_stationary(q1: &LogQuad, q2: &LogQuad) -> Vec<f64> {
    let (lo, hi) = if q1.b <= q2.b { (q1.b, q2.b) } else { (q2.b, q1.b) };
    if !(hi > lo) {
        return Vec::new();
    }
    let slope = |a: f64| q1.a * (a - q1.b) * q2.denom(a) + q2.a * (a - q2.b) * q1.denom(a);
    const CELLS: usize = 64;
    let h = (hi - lo) / CELLS as f64;
    let mut out = Vec::new();
    let mut prev = (lo, slope(lo));
    for i in 1..=CELLS {
        let a = lo + h * i as f64;
        let cur = (a, slope(a));
        if prev.1 == 0.0 {
            out.push(prev.0);
        } else if prev.1.signum() != cur.1.signum() && cur.1 != 0.0 {
            let (mut l, mut r, fl) = (prev.0, cur.0, prev.1);
            for _ in 0..80 {
                let mid = 0.5 * (l + r);
                if slope(mid).signum() == fl.signum() {
                    l = mid;
                } else {
                    r = mid;
                }
            }
            out.push(0.5 * (l + r));
        }
        prev = cur;
    }
    out
}

fn best_of<F: Fn(f64) -> f64>(f: F, cands: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let mut best = (0.0, f64::NEG_INFINITY);
    for a in cands {
        let v = f(a);
        if v > best.1 {
            best = (a, v);
        }
    }
    best
}

/// `max_α min(q1, q2)`: the optimum sits at a peak or at a crossing.
pub(crate) fn max_min(q: &[LogQuad; 2]) -> (f64, f64) {
    let f = |a: f64| q[0].value(a).min(q[1].value(a));
    let cands = [q[0].b, q[1].b].into_iter().chain(crossings(&q[0], &q[1], 0.0));
    best_of(f, cands)
}

/// `max_α min(q1, q2, ½(q1 + q2 − pen))`.
pub(crate) fn max_min_penalized(q: &[LogQuad; 2], pen: f64) -> (f64, f64) {
    if pen <= 0.0 {
        return max_min(q);
    }
    let f = |a: f64| {
        let (v1, v2) = (q[0].value(a), q[1].value(a));
        v1.min(v2).min(0.5 * (v1 + v2 - pen))
    };
    let cands = [q[0].b, q[1].b]
        .into_iter()
        .chain(crossings(&q[0], &q[1], 0.0))
        .chain(crossings(&q[0], &q[1], pen))
        .chain(crossings(&q[0], &q[1], -pen))
        .chain(sum_stationary(&q[0], &q[1]));
    best_of(f, cands)
}

fn channel_index(j: usize) -> Result<usize, MisoError> {
    match j {
        1 | 2 => Ok(j - 1),
        _ => Err(MisoError::Scheme(format!("channel index {j} not in {{1, 2}}"))),
    }
}

/// `I(U₀;Y_j) − I(U₀;V)` for the common DPC auxiliary `U₀ = X_u + αX_v`.
/// The private power `x` of the scheme is ignored. `P_u = 0` gives 0.
pub fn dpc_common_rate(channel: &MisoChannel, j: usize, scheme: &DpcScheme) -> Result<f64, MisoError> {
    let j = channel_index(j)?;
    scheme.validate(channel)?;
    let g = Gains::new(channel, scheme.b_u, scheme.b_v);
    Ok(g
        .quad(j, scheme.p_u, scheme.p_v, channel.noise(), 0.0, QuadMode::Common)
        .value(scheme.alpha))
}

/// Rate of receiver `j` with an optimally correlated private description of
/// power `x`, maximized over the private DPC parameter.
pub fn dpc_private_optimal(channel: &MisoChannel, j: usize, scheme: &DpcScheme) -> Result<f64, MisoError> {
    let j = channel_index(j)?;
    scheme.validate(channel)?;
    let g = Gains::new(channel, scheme.b_u, scheme.b_v);
    Ok(g
        .quad(j, scheme.p_u, scheme.p_v, channel.noise(), scheme.x, QuadMode::Private)
        .value(scheme.alpha))
}

/// Corner points of the two common-description DPC orders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdCorners {
    /// User 2 is precoded against: common message cancels user 2's signal.
    pub user1_cancels: GaussRatePoint,
    pub alpha: f64,
    /// User 2 cancels the common message; user 1 treats user 2 as noise.
    pub user2_cancels: GaussRatePoint,
}

pub fn cd_region(channel: &MisoChannel, scheme: &DpcScheme) -> Result<CdCorners, MisoError> {
    scheme.validate(channel)?;
    let n = channel.noise();
    let g = Gains::new(channel, scheme.b_u, scheme.b_v);
    let q = [0, 1].map(|j| g.quad(j, scheme.p_u, scheme.p_v, n, 0.0, QuadMode::Common));
    let (alpha, r1) = max_min(&q);
    Ok(CdCorners {
        user1_cancels: GaussRatePoint::new(r1, g.r2_common(scheme.p_u, scheme.p_v, n)),
        alpha,
        user2_cancels: g.r2_corner(scheme.p_u, scheme.p_v, n),
    })
}

fn check_special(eta: f64, p_u: f64, p_v: f64, n: f64) -> Result<(), MisoError> {
    check_range("eta", eta, -1.0, 1.0)?;
    check_range("P_u", p_u, 0.0, f64::INFINITY)?;
    check_range("P_v", p_v, 0.0, f64::INFINITY)?;
    if !(n.is_finite() && n > 0.0) {
        return Err(MisoError::Domain { name: "N", value: n, lo: f64::MIN_POSITIVE, hi: f64::INFINITY });
    }
    Ok(())
}

/// Residual interference power after the best common DPC parameter in the
/// unit-norm special geometry, `P = P_u + P_v`.
pub fn p_eta(eta: f64, p_u: f64, p_v: f64, n: f64) -> f64 {
    let c = p_u + p_v + 2.0 * n;
    let root = (c * c + (eta * eta - 1.0) * p_v * p_v).max(0.0).sqrt();
    (1.0 - eta) * p_v * p_u / (c + root)
}

pub fn cd_closed_form(eta: f64, p_u: f64, p_v: f64, n: f64) -> Result<GaussRatePoint, MisoError> {
    check_special(eta, p_u, p_v, n)?;
    let pe = p_eta(eta, p_u, p_v, n);
    Ok(GaussRatePoint::new(
        0.5 * ((p_u + 2.0 * n) / (pe + 2.0 * n)).log2(),
        0.5 * (((1.0 - eta) * p_v + 2.0 * n) / (2.0 * n)).log2(),
    ))
}

/// User-1 rate of uncorrelated private descriptions at `t = ½` in the
/// special geometry.
pub fn md_uncorrelated_closed_form(eta: f64, p_u: f64, p_v: f64, n: f64, x: f64) -> Result<f64, MisoError> {
    check_special(eta, p_u, p_v, n)?;
    if p_u <= 0.0 {
        return Err(MisoError::Domain { name: "P_u", value: p_u, lo: f64::MIN_POSITIVE, hi: f64::INFINITY });
    }
    check_range("x", x, 0.0, p_u)?;
    let pe = p_eta(eta, p_u, p_v, n);
    let (a, b) = ((2.0 * n).sqrt(), (x + 2.0 * n).sqrt());
    Ok(0.5 * ((p_u + 2.0 * n) / ((p_u - x) / b * a / p_u * pe + a * b)).log2())
}

/// User-1 rate of correlated private descriptions in the special geometry
/// when the sum constraint is inactive.
pub fn md_correlated_closed_form(eta: f64, p_u: f64, p_v: f64, n: f64, x: f64) -> Result<f64, MisoError> {
    check_special(eta, p_u, p_v, n)?;
    if p_u <= 0.0 {
        return Err(MisoError::Domain { name: "P_u", value: p_u, lo: f64::MIN_POSITIVE, hi: f64::INFINITY });
    }
    check_range("x", x, 0.0, p_u)?;
    let pe = p_eta(eta, p_u, p_v, n);
    Ok(0.5 * ((p_u + 2.0 * n) / ((p_u - x) / (x + 2.0 * n) * (2.0 * n / p_u) * pe + 2.0 * n)).log2())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncorrelatedPoint {
    pub point: GaussRatePoint,
    pub alpha: f64,
}

/// Private descriptions on disjoint time shares `t`, `1 − t`.
pub fn md_uncorrelated_point(channel: &MisoChannel, scheme: &DpcScheme) -> Result<UncorrelatedPoint, MisoError> {
    scheme.validate(channel)?;
    let n = channel.noise();
    let g = Gains::new(channel, scheme.b_u, scheme.b_v);
    let shares = [scheme.t, 1.0 - scheme.t];
    let q = [0, 1].map(|j| g.quad(j, scheme.p_u, scheme.p_v, n, scheme.x, QuadMode::Uncorrelated(shares[j])));
    let (alpha, r1) = max_min(&q);
    Ok(UncorrelatedPoint {
        point: GaussRatePoint::new(r1, g.r2_common(scheme.p_u, scheme.p_v, n)),
        alpha,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelatedPoint {
    pub point: GaussRatePoint,
    pub alpha: f64,
    /// The correlation cost `½·log₂(2πe·x)`.
    pub penalty: f64,
    /// Whether the sum constraint is tight at the optimum.
    pub sum_binding: bool,
}

/// Jointly Gaussian correlated private descriptions of power `x > 0`.
pub fn md_correlated_point(channel: &MisoChannel, scheme: &DpcScheme) -> Result<CorrelatedPoint, MisoError> {
    scheme.validate(channel)?;
    if scheme.x <= 0.0 {
        return Err(MisoError::Domain { name: "x", value: scheme.x, lo: f64::MIN_POSITIVE, hi: scheme.p_u });
    }
    let n = channel.noise();
    let g = Gains::new(channel, scheme.b_u, scheme.b_v);
    let q = [0, 1].map(|j| g.quad(j, scheme.p_u, scheme.p_v, n, scheme.x, QuadMode::Private));
    let penalty = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * scheme.x).log2();
    let (alpha, r1) = max_min_penalized(&q, penalty);
    let (v1, v2) = (q[0].value(alpha), q[1].value(alpha));
    let sum_binding = penalty > 0.0 && 0.5 * (v1 + v2 - penalty) < v1.min(v2) - 1e-12;
    Ok(CorrelatedPoint {
        point: GaussRatePoint::new(r1, g.r2_common(scheme.p_u, scheme.p_v, n)),
        alpha,
        penalty,
        sum_binding,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrictnessReport {
    /// `P(η) > P_u / 2`.
    pub condition: bool,
    pub r1_at_zero: f64,
    pub best_r1: f64,
    pub best_x: f64,
    pub gain: f64,
}

/// Log-spaced private powers on `[1e-4·P_u, P_u]`, plus `1/(2πe)` when it
/// falls inside.
pub(crate) fn private_grid(p_u: f64, points: usize) -> Vec<f64> {
    if p_u <= 0.0 {
        return vec![0.0];
    }
    let n = points.max(2);
    let (lo, hi) = ((1e-4 * p_u).ln(), p_u.ln());
    let mut xs: Vec<f64> = (0..n).map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp()).collect();
    xs[n - 1] = p_u;
    let brk = 1.0 / (2.0 * std::f64::consts::PI * std::f64::consts::E);
    if brk < p_u {
        xs.push(brk);
    }
    xs.sort_by(f64::total_cmp);
    xs
}

/// Sufficient condition for a strict user-1 gain of uncorrelated private
/// descriptions at `t = ½`, next to the direct sweep over `x`.
pub fn strictness_uncorrelated_check(p_u: f64, p_v: f64, n: f64, eta: f64) -> Result<StrictnessReport, MisoError> {
    check_special(eta, p_u, p_v, n)?;
    let channel = MisoChannel::special(p_u + p_v, n)?;
    let base = DpcScheme::special(eta, p_u, p_v)?.with_share(0.5);
    let r1_at_zero = md_uncorrelated_point(&channel, &base)?.point.r1;
    let (mut best_x, mut best_r1) = (0.0, r1_at_zero);
    for x in private_grid(p_u, 201) {
        let r1 = md_uncorrelated_point(&channel, &base.with_private(x))?.point.r1;
        if r1 > best_r1 {
            best_r1 = r1;
            best_x = x;
        }
    }
    Ok(StrictnessReport {
        condition: p_eta(eta, p_u, p_v, n) > 0.5 * p_u,
        r1_at_zero,
        best_r1,
        best_x,
        gain: best_r1 - r1_at_zero,
    })
}
