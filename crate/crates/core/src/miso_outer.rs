//! Sampled outer bound for the 2×1 compound MISO broadcast channel: the
//! intersection of four enhanced-receiver capacity regions, each the union
//! over covariance pairs `(K_u, K_v)` with `tr(K_u + K_v) ≤ P`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::format_sig;
use crate::miso::{BoundaryPoint, GaussRatePoint, MisoChannel, MisoError};
use crate::optimizer::restart_rng;
use crate::polyhedra::{HullInput, NumericRegion2D, RateCurve2D, convex_hull_union};

/// Symmetric 2×2 as `[k11, k12, k21, k22]`.
pub type Sym2 = [f64; 4];

fn quad_form(k: &Sym2, h: [f64; 2]) -> f64 {
    k[0] * h[0] * h[0] + (k[1] + k[2]) * h[0] * h[1] + k[3] * h[1] * h[1]
}

fn min_eig(k: &Sym2) -> f64 {
    let (a, b, d) = (k[0], 0.5 * (k[1] + k[2]), k[3]);
    0.5 * (a + d - ((a - d) * (a - d) + 4.0 * b * b).sqrt())
}

fn outer_product(v: [f64; 2], p: f64) -> Sym2 {
    [p * v[0] * v[0], p * v[0] * v[1], p * v[0] * v[1], p * v[1] * v[1]]
}

/// `½·log₂ det(I + K·S/N)` for symmetric `K`, `S`.
fn logdet_gain(k: &Sym2, s: &Sym2, n: f64) -> f64 {
    let m = [
        1.0 + (k[0] * s[0] + k[1] * s[2]) / n,
        (k[0] * s[1] + k[1] * s[3]) / n,
        (k[2] * s[0] + k[3] * s[2]) / n,
        1.0 + (k[2] * s[1] + k[3] * s[3]) / n,
    ];
    0.5 * (m[0] * m[3] - m[1] * m[2]).log2()
}

fn gram(vs: &[[f64; 2]]) -> Sym2 {
    vs.iter().fold([0.0; 4], |acc, v| {
        let o = outer_product(*v, 1.0);
        [acc[0] + o[0], acc[1] + o[1], acc[2] + o[2], acc[3] + o[3]]
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovPair {
    pub k_u: Sym2,
    pub k_v: Sym2,
}

impl CovPair {
    pub fn new(k_u: Sym2, k_v: Sym2, power: f64) -> Result<Self, MisoError> {
        for k in [&k_u, &k_v] {
            let scale = k[0].abs().max(k[3].abs()).max(1.0);
            if (k[1] - k[2]).abs() > 1e-12 * scale {
                return Err(MisoError::NotPsd(f64::NAN));
            }
            let e = min_eig(k);
            if e < -1e-12 * scale {
                return Err(MisoError::NotPsd(e));
            }
        }
        let tr = k_u[0] + k_u[3] + k_v[0] + k_v[3];
        if tr > power * (1.0 + 1e-12) + 1e-15 {
            return Err(MisoError::Channel(format!("trace {tr} exceeds power {power}")));
        }
        Ok(Self { k_u, k_v })
    }

    /// Rank-one pair along unit directions with powers `p_u`, `p_v`.
    pub fn beams(u: [f64; 2], p_u: f64, v: [f64; 2], p_v: f64) -> Self {
        Self { k_u: outer_product(u, p_u), k_v: outer_product(v, p_v) }
    }

    fn sum(&self) -> Sym2 {
        [self.k_u[0] + self.k_v[0], self.k_u[1] + self.k_v[1], self.k_u[2] + self.k_v[2], self.k_u[3] + self.k_v[3]]
    }
}

fn half_log(num: f64, den: f64) -> f64 {
    (0.5 * (num / den).log2()).max(0.0)
}

/// Both branches of the capacity region with outputs `(Y_j, Z)`.
pub fn outer_cj_point(j: usize, cov: &CovPair, channel: &MisoChannel) -> Result<[GaussRatePoint; 2], MisoError> {
    let h = channel.h(j)?;
    let (g, n) = (channel.g(), channel.noise());
    let all = cov.sum();
    let a = GaussRatePoint::new(
        half_log(quad_form(&cov.k_u, h) + n, n),
        half_log(quad_form(&all, g) + n, quad_form(&cov.k_u, g) + n),
    );
    let b = GaussRatePoint::new(
        half_log(quad_form(&all, h) + n, quad_form(&cov.k_v, h) + n),
        half_log(quad_form(&cov.k_v, g) + n, n),
    );
    Ok([a, b])
}

/// User 2 enhanced to observe `(Z, Y₁, Y₂)`.
pub fn outer_c12_point(cov: &CovPair, channel: &MisoChannel) -> GaussRatePoint {
    let n = channel.noise();
    let all = cov.sum();
    let r1 = [channel.h1(), channel.h2()]
        .iter()
        .map(|&h| half_log(quad_form(&all, h) + n, quad_form(&cov.k_v, h) + n))
        .fold(f64::INFINITY, f64::min);
    let s = gram(&[channel.g(), channel.h1(), channel.h2()]);
    GaussRatePoint::new(r1, logdet_gain(&cov.k_v, &s, n))
}

/// User 1 enhanced to observe `(Y_j, Z)`.
pub fn outer_cz_point(cov: &CovPair, channel: &MisoChannel) -> GaussRatePoint {
    let (g, n) = (channel.g(), channel.noise());
    let r1 = [channel.h1(), channel.h2()]
        .iter()
        .map(|&h| logdet_gain(&cov.k_u, &gram(&[h, g]), n))
        .fold(f64::INFINITY, f64::min);
    GaussRatePoint::new(r1, half_log(quad_form(&cov.sum(), g) + n, quad_form(&cov.k_u, g) + n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OuterFamily {
    C1,
    C2,
    C12,
    Cz,
}

impl OuterFamily {
    pub const ALL: [OuterFamily; 4] = [OuterFamily::C1, OuterFamily::C2, OuterFamily::C12, OuterFamily::Cz];

    pub fn name(&self) -> &'static str {
        match self {
            OuterFamily::C1 => "c1",
            OuterFamily::C2 => "c2",
            OuterFamily::C12 => "c12",
            OuterFamily::Cz => "cz",
        }
    }

    fn points(&self, cov: &CovPair, channel: &MisoChannel) -> Vec<[f64; 2]> {
        match self {
            OuterFamily::C1 | OuterFamily::C2 => {
                let j = if *self == OuterFamily::C1 { 1 } else { 2 };
                outer_cj_point(j, cov, channel)
                    .map(|b| b.iter().map(|p| p.as_array()).collect())
                    .unwrap_or_default()
            }
            OuterFamily::C12 => vec![outer_c12_point(cov, channel).as_array()],
            OuterFamily::Cz => vec![outer_cz_point(cov, channel).as_array()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterConfig {
    pub random_pairs: usize,
    /// Power split levels `{0, P/(L−1), …, P}` for random draws.
    pub random_levels: usize,
    /// Extra beacon directions on an equispaced angle grid over `[0, π)`.
    pub beacon_angles: usize,
    pub beacon_splits: usize,
    pub grid_points: usize,
}

impl Default for OuterConfig {
    fn default() -> Self {
        Self { random_pairs: 10_000, random_levels: 11, beacon_angles: 36, beacon_splits: 101, grid_points: 401 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyRegion {
    pub family: OuterFamily,
    /// Pareto staircase of the sampled points.
    pub staircase: RateCurve2D,
    /// Upper-right frontier of the time-shared staircase.
    pub frontier: RateCurve2D,
    region: NumericRegion2D,
}

impl FamilyRegion {
    fn new(family: OuterFamily, points: &[[f64; 2]]) -> Self {
        let staircase = RateCurve2D::staircase(points);
        let frontier = staircase.hull();
        let region = convex_hull_union(&[HullInput::Points(&staircase.points)]);
        Self { family, staircase, frontier, region }
    }

    /// Euclidean-normalized distance outside the time-shared region.
    pub fn violation(&self, p: [f64; 2]) -> f64 {
        if self.region.is_empty() {
            return f64::INFINITY;
        }
        self.region
            .halfplanes()
            .iter()
            .map(|h| {
                let norm = (h.a[0] * h.a[0] + h.a[1] * h.a[1]).sqrt();
                if norm > 0.0 { (h.a[0] * p[0] + h.a[1] * p[1] - h.b) / norm } else { -h.b }
            })
            .fold(0.0, f64::max)
    }

    /// Largest `R2` on the frontier at `r1`, or `−∞` beyond its reach.
    pub fn frontier_r2_at(&self, r1: f64) -> f64 {
        interpolate(&self.frontier.points, r1)
    }
}

fn interpolate(frontier: &[[f64; 2]], r1: f64) -> f64 {
    let Some(last) = frontier.last() else {
        return f64::NEG_INFINITY;
    };
    if r1 > last[0] {
        return f64::NEG_INFINITY;
    }
    if r1 <= frontier[0][0] {
        return frontier[0][1];
    }
    let k = frontier.partition_point(|p| p[0] < r1);
    let (a, b) = (frontier[k - 1], frontier[k]);
    if b[0] == a[0] {
        return a[1].max(b[1]);
    }
    a[1] + (b[1] - a[1]) * (r1 - a[0]) / (b[0] - a[0])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterRegion {
    pub families: Vec<FamilyRegion>,
    /// Intersection of the time-shared families on a common `R1` grid.
    pub intersection: RateCurve2D,
    /// Intersection of the raw staircases on the same grid.
    pub raw_intersection: RateCurve2D,
    pub pairs: usize,
}

impl OuterRegion {
    pub fn family(&self, f: OuterFamily) -> &FamilyRegion {
        self.families.iter().find(|r| r.family == f).expect("all families are built")
    }

    /// Largest distance by which `p` leaves any family region.
    pub fn violation(&self, p: [f64; 2]) -> f64 {
        self.families.iter().map(|f| f.violation(p)).fold(0.0, f64::max)
    }

    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        self.violation(p) <= tol
    }

    pub fn curve_csv(curve: &RateCurve2D) -> String {
        let mut s = String::from("R1,R2\n");
        for p in &curve.points {
            s.push_str(&format!("{},{}\n", format_sig(p[0]), format_sig(p[1])));
        }
        s
    }
}

fn special_directions(channel: &MisoChannel) -> Vec<[f64; 2]> {
    let unit = |v: [f64; 2]| {
        let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
        [v[0] / n, v[1] / n]
    };
    let perp = |v: [f64; 2]| [-v[1], v[0]];
    let mean = channel.mean_direction().vector();
    let (h1, h2, g) = (unit(channel.h1()), unit(channel.h2()), unit(channel.g()));
    vec![h1, h2, g, mean, perp(h1), perp(h2), perp(g), perp(mean)]
}

/// Rank-one beacons along the channel directions and an angle grid, on a
/// fine power split.
pub fn beacon_pairs(channel: &MisoChannel, cfg: &OuterConfig) -> Vec<CovPair> {
    let mut dirs = special_directions(channel);
    let na = cfg.beacon_angles;
    dirs.extend((0..na).map(|i| {
        let th = std::f64::consts::PI * i as f64 / na as f64;
        [th.cos(), th.sin()]
    }));
    let ns = cfg.beacon_splits.max(2);
    let p = channel.power();
    let mut out = Vec::with_capacity(dirs.len() * dirs.len() * ns);
    for &u in &dirs {
        for &v in &dirs {
            for k in 0..ns {
                let pu = p * k as f64 / (ns - 1) as f64;
                out.push(CovPair::beams(u, pu, v, p - pu));
            }
        }
    }
    out
}

/// Cholesky draws `K = LLᵗ`, each trace-normalized onto a power split level.
pub fn random_pairs(channel: &MisoChannel, cfg: &OuterConfig, seed: u64) -> Vec<CovPair> {
    let p = channel.power();
    let levels = cfg.random_levels.max(2);
    (0..cfg.random_pairs)
        .into_par_iter()
        .map(|i| {
            let mut rng = restart_rng(seed, i);
            let mut draw = || {
                let l: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                let k = [l[0] * l[0], l[0] * l[1], l[0] * l[1], l[1] * l[1] + l[2] * l[2]];
                let tr = k[0] + k[3];
                if tr > 0.0 { k.map(|e| e / tr) } else { [0.5, 0.0, 0.0, 0.5] }
            };
            let (ku, kv) = (draw(), draw());
            let s = rng.gen_range(0..levels) as f64 / (levels - 1) as f64;
            CovPair { k_u: ku.map(|e| e * s * p), k_v: kv.map(|e| e * (1.0 - s) * p) }
        })
        .collect()
}

/// Covariance pairs of the schemes achieving the given inner points.
pub fn scheme_pairs(points: &[BoundaryPoint]) -> Vec<CovPair> {
    points
        .iter()
        .map(|p| {
            let (k_u, k_v) = p.covariances();
            CovPair { k_u, k_v }
        })
        .collect()
}

/// Outer region from beacons and random draws.
pub fn outer_region(channel: &MisoChannel, cfg: &OuterConfig, seed: u64) -> OuterRegion {
    outer_region_with(channel, cfg, seed, &[])
}

/// Outer region whose sample also includes `extra` pairs, e.g. the
/// covariances of known inner-bound schemes.
pub fn outer_region_with(channel: &MisoChannel, cfg: &OuterConfig, seed: u64, extra: &[CovPair]) -> OuterRegion {
    let mut pairs = beacon_pairs(channel, cfg);
    pairs.extend(random_pairs(channel, cfg, seed));
    pairs.extend_from_slice(extra);
    let families: Vec<FamilyRegion> = OuterFamily::ALL
        .par_iter()
        .map(|f| {
            let pts: Vec<[f64; 2]> = pairs.iter().flat_map(|c| f.points(c, channel)).collect();
            FamilyRegion::new(*f, &pts)
        })
        .collect();
    let r1_max = families.iter().map(|f| f.frontier.max_r1()).fold(f64::INFINITY, f64::min);
    let n = cfg.grid_points.max(2);
    let mut grid: Vec<f64> = (0..n).map(|i| r1_max * i as f64 / (n - 1) as f64).collect();
    grid[n - 1] = r1_max;
    let curve = |r2_at: &dyn Fn(&FamilyRegion, f64) -> f64| {
        let mut pts: Vec<[f64; 2]> = grid
            .iter()
            .map(|&r1| [r1, families.iter().map(|f| r2_at(f, r1)).fold(f64::INFINITY, f64::min)])
            .filter(|p| p[1].is_finite())
            .collect();
        if let Some(&last) = pts.last() {
            if last[1] > 0.0 {
                pts.push([last[0], 0.0]);
            }
        }
        RateCurve2D { points: pts }
    };
    let intersection = curve(&|f, r1| f.frontier_r2_at(r1));
    let raw_intersection = curve(&|f, r1| f.staircase.staircase_r2_at(r1));
    OuterRegion { families, intersection, raw_intersection, pairs: pairs.len() }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DofEstimate {
    pub d1: f64,
    pub d2: f64,
    /// Slope of `max (2R1 + R2)` over the boundary.
    pub weighted_sum: f64,
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Least-squares slopes of the corner rates and of `max (2R1 + R2)` against
/// `½·log₂ SNR`.
pub fn dof_slopes(snr_db: &[f64], curves: &[RateCurve2D]) -> Result<DofEstimate, MisoError> {
    if snr_db.len() != curves.len() || snr_db.len() < 3 {
        return Err(MisoError::Insufficient("need at least 3 SNR points, one curve each".into()));
    }
    let span = snr_db.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - snr_db.iter().cloned().fold(f64::INFINITY, f64::min);
    if span < 20.0 {
        return Err(MisoError::Insufficient(format!("SNR span {span} dB is below 20 dB")));
    }
    let xs: Vec<f64> = snr_db.iter().map(|s| 0.5 * (s / 10.0 * 10f64.log2())).collect();
    let c1: Vec<f64> = curves.iter().map(|c| c.max_r1()).collect();
    let c2: Vec<f64> = curves.iter().map(|c| c.max_r2()).collect();
    let w: Vec<f64> = curves
        .iter()
        .map(|c| c.points.iter().map(|p| 2.0 * p[0] + p[1]).fold(0.0, f64::max))
        .collect();
    Ok(DofEstimate { d1: ls_slope(&xs, &c1), d2: ls_slope(&xs, &c2), weighted_sum: ls_slope(&xs, &w) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::miso::gaussian_mi_oracle;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn random_pair(seed: u64, p: f64) -> CovPair {
        let ch = MisoChannel::figure(10.0).unwrap().with_power(p).unwrap();
        let cfg = OuterConfig { random_pairs: 1, ..OuterConfig::default() };
        random_pairs(&ch, &cfg, seed)[0]
    }

    /// `I(X; y)` for `y = Hᵗx + noise` with input covariance `k`.
    fn mimo_mi(k: &Sym2, hs: &[[f64; 2]], n: f64, interference: &Sym2) -> f64 {
        let m = hs.len();
        let kx = DMatrix::from_row_slice(2, 2, k);
        let ki = DMatrix::from_row_slice(2, 2, interference);
        let h = DMatrix::from_fn(2, m, |r, c| hs[c][r]);
        let noise = DMatrix::identity(m, m) * n;
        let ky = h.transpose() * (&kx + &ki) * &h + &noise;
        let kn = h.transpose() * &ki * &h + noise;
        0.5 * (ky.determinant() / kn.determinant()).log2()
    }

    #[test]
    fn origin_and_point_to_point() {
        let ch = MisoChannel::new([1.0, 0.0], [0.0, 1.0], [1.0, 1.0], 5.0, 1.0).unwrap();
        let zero = CovPair::new([0.0; 4], [0.0; 4], 5.0).unwrap();
        for b in outer_cj_point(1, &zero, &ch).unwrap() {
            assert_eq!(b.as_array(), [0.0, 0.0]);
        }
        let c = CovPair::new([5.0, 0.0, 0.0, 0.0], [0.0; 4], 5.0).unwrap();
        let [a, _] = outer_cj_point(1, &c, &ch).unwrap();
        assert!((a.r1 - 0.5 * 6f64.log2()).abs() < 1e-15);
        assert_eq!(outer_c12_point(&c, &ch).r2, 0.0);
        let v_only = CovPair::new([0.0; 4], [2.5, 0.0, 0.0, 2.5], 5.0).unwrap();
        assert_eq!(outer_c12_point(&v_only, &ch).r1, 0.0);
        assert_eq!(outer_cz_point(&v_only, &ch).r1, 0.0);
        assert!(CovPair::new([1.0, 2.0, 2.0, 1.0], [0.0; 4], 5.0).is_err());
        assert!(CovPair::new([4.0, 0.0, 0.0, 4.0], [0.0; 4], 5.0).is_err());
    }

    #[test]
    fn cz_with_user2_nulled() {
        let ch = MisoChannel::figure(10.0).unwrap();
        let gp = [-ch.g()[1] / 2.0, ch.g()[0] / 2.0];
        let c = CovPair { k_u: outer_product(gp, 4.0), k_v: outer_product([0.6, 0.8], 6.0) };
        let r2 = outer_cz_point(&c, &ch).r2;
        assert!((r2 - 0.5 * ((quad_form(&c.k_v, ch.g()) + 1.0) / 1.0).log2()).abs() < 1e-12);
    }

    #[test]
    fn rank_one_c12_determinant() {
        let ch = MisoChannel::figure(10.0).unwrap();
        let gn = [ch.g()[0] / 2.0, ch.g()[1] / 2.0];
        let c = CovPair { k_u: [0.0; 4], k_v: outer_product(gn, 10.0) };
        let direct = mimo_mi(&c.k_v, &[ch.g(), ch.h1(), ch.h2()], 1.0, &[0.0; 4]);
        assert!((outer_c12_point(&c, &ch).r2 - direct).abs() < 1e-12);
        let gain: f64 = [ch.g(), ch.h1(), ch.h2()].iter().map(|h| (gn[0] * h[0] + gn[1] * h[1]).powi(2)).sum();
        assert!((direct - 0.5 * (1.0 + 10.0 * gain).log2()).abs() < 1e-12);
    }

    #[test]
    fn dof_of_time_sharing_inner_curve_is_one() {
        let snrs = [20.0, 30.0, 40.0];
        let curves: Vec<RateCurve2D> = snrs
            .iter()
            .map(|s| {
                let p = 10f64.powf(s / 10.0);
                let c = 0.5 * (1.0 + 4.0 * p).log2();
                RateCurve2D { points: vec![[0.0, c], [c, 0.0]] }
            })
            .collect();
        let d = dof_slopes(&snrs, &curves).unwrap();
        assert!((d.d1 - 1.0).abs() < 0.05 && (d.d2 - 1.0).abs() < 0.05);
        assert!((d.weighted_sum - 2.0).abs() < 0.1);
        let sum: Vec<f64> = curves.iter().map(|c| c.points.iter().map(|p| p[0] + p[1]).fold(0.0, f64::max)).collect();
        let xs: Vec<f64> = snrs.iter().map(|s| 0.5 * (s / 10.0 * 10f64.log2())).collect();
        assert!((ls_slope(&xs, &sum) - 1.0).abs() < 0.05);
        assert!(dof_slopes(&snrs[..2], &curves[..2]).is_err());
        assert!(dof_slopes(&[20.0, 25.0, 30.0], &curves).is_err());
    }

    #[test]
    fn zero_power_outer_region_is_origin() {
        let ch = MisoChannel::figure(10.0).unwrap().with_power(0.0).unwrap();
        let cfg = OuterConfig { random_pairs: 100, beacon_angles: 4, beacon_splits: 3, ..OuterConfig::default() };
        let o = outer_region(&ch, &cfg, 1);
        assert_eq!(o.intersection.max_r1(), 0.0);
        assert_eq!(o.intersection.max_r2(), 0.0);
    }

    #[test]
    fn sampling_is_deterministic_and_within_power() {
        let ch = MisoChannel::figure(10.0).unwrap();
        let cfg = OuterConfig { random_pairs: 500, ..OuterConfig::default() };
        let a = random_pairs(&ch, &cfg, 9);
        assert_eq!(a, random_pairs(&ch, &cfg, 9));
        for c in a.iter().chain(beacon_pairs(&ch, &cfg).iter()) {
            assert!(CovPair::new(c.k_u, c.k_v, ch.power()).is_ok());
        }
    }

    #[test]
    fn larger_sample_never_shrinks_families() {
        let ch = MisoChannel::figure(10.0).unwrap();
        let small = OuterConfig { random_pairs: 200, beacon_angles: 6, beacon_splits: 11, ..OuterConfig::default() };
        let big = OuterConfig { random_pairs: 2000, ..small.clone() };
        let (a, b) = (outer_region(&ch, &small, 3), outer_region(&ch, &big, 3));
        for f in OuterFamily::ALL {
            for p in &a.family(f).staircase.points {
                assert!(b.family(f).violation(*p) <= 1e-12);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn branches_match_determinant_oracle(seed in 0u64..10_000, p in 0.1f64..100.0) {
            let ch = MisoChannel::figure(10.0).unwrap().with_power(p).unwrap();
            let c = random_pair(seed, p);
            let (g, n) = (ch.g(), 1.0);
            let zero = [0.0; 4];
            for j in [1, 2] {
                let h = ch.h(j).unwrap();
                let [a, b] = outer_cj_point(j, &c, &ch).unwrap();
                prop_assert!(a.r1 >= 0.0 && a.r2 >= 0.0 && b.r1 >= 0.0 && b.r2 >= 0.0);
                prop_assert!((a.r1 - mimo_mi(&c.k_u, &[h], n, &zero)).abs() < 1e-9);
                prop_assert!((a.r2 - mimo_mi(&c.k_v, &[g], n, &c.k_u)).abs() < 1e-9);
                prop_assert!((b.r1 - mimo_mi(&c.k_u, &[h], n, &c.k_v)).abs() < 1e-9);
                prop_assert!((b.r2 - mimo_mi(&c.k_v, &[g], n, &zero)).abs() < 1e-9);
            }
            let c12 = outer_c12_point(&c, &ch);
            prop_assert!((c12.r2 - mimo_mi(&c.k_v, &[g, ch.h1(), ch.h2()], n, &zero)).abs() < 1e-9);
            let cz = outer_cz_point(&c, &ch);
            let r1 = [ch.h1(), ch.h2()].iter().map(|h| mimo_mi(&c.k_u, &[*h, g], n, &zero)).fold(f64::INFINITY, f64::min);
            prop_assert!((cz.r1 - r1).abs() < 1e-9);
            // scalar channel cross-check against the generic oracle
            let s = quad_form(&c.k_u, g);
            let cov = DMatrix::from_row_slice(2, 2, &[s, s, s, s + n]);
            if s > 1e-9 {
                prop_assert!((gaussian_mi_oracle(&cov, &[0], &[1]).unwrap() - mimo_mi(&c.k_u, &[g], n, &zero)).abs() < 1e-9);
            }
        }
    }
}
