use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dpc::{max_min, max_min_penalized, private_grid, Gains, QuadMode};
use super::{Beam, MisoChannel};
use crate::format_sig;
use crate::polyhedra::RateCurve2D;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKind {
    Cd,
    MdUncorrelated,
    MdCorrelated,
}

impl BoundaryKind {
    pub const ALL: [BoundaryKind; 3] = [BoundaryKind::Cd, BoundaryKind::MdUncorrelated, BoundaryKind::MdCorrelated];

    pub fn file_stem(&self) -> &'static str {
        match self {
            BoundaryKind::Cd => "cd",
            BoundaryKind::MdUncorrelated => "md_uncorr",
            BoundaryKind::MdCorrelated => "md_corr",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BeamSweep {
    /// Common beam fixed along the mean user-1 channel.
    MeanChannel,
    /// Common beam angle on an equispaced grid over `[0, π)`.
    Angles(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryConfig {
    pub beams: BeamSweep,
    /// Grid size for the interference beam angle over `[0, π)`.
    pub v_angles: usize,
    pub splits: usize,
    pub private_points: usize,
    pub shares: Vec<f64>,
    pub time_sharing: bool,
}

impl Default for BoundaryConfig {
    fn default() -> Self {
        Self {
            beams: BeamSweep::MeanChannel,
            v_angles: 401,
            splits: 201,
            private_points: 201,
            shares: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            time_sharing: false,
        }
    }
}

impl BoundaryConfig {
    /// Coarser grids for tests and quick looks.
    pub fn quick() -> Self {
        Self {
            beams: BeamSweep::MeanChannel,
            v_angles: 121,
            splits: 61,
            private_points: 41,
            shares: vec![0.5],
            time_sharing: false,
        }
    }
}

/// A boundary point with the parameters that achieve it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub r1: f64,
    pub r2: f64,
    pub theta_u: f64,
    pub theta_v: f64,
    pub p_u: f64,
    pub p_v: f64,
    pub x: f64,
    pub t: f64,
    pub alpha: f64,
}

impl BoundaryPoint {
    pub fn rates(&self) -> [f64; 2] {
        [self.r1, self.r2]
    }

    /// `(K_u, K_v)` of the achieving beams, row-major.
    pub fn covariances(&self) -> ([f64; 4], [f64; 4]) {
        let outer = |th: f64, p: f64| {
            let (s, c) = th.sin_cos();
            [p * c * c, p * c * s, p * c * s, p * s * s]
        };
        (outer(self.theta_u, self.p_u), outer(self.theta_v, self.p_v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub kind: BoundaryKind,
    /// Pareto staircase, `R1` increasing.
    pub points: Vec<BoundaryPoint>,
    pub hull: Option<RateCurve2D>,
}

impl Boundary {
    pub fn curve(&self) -> RateCurve2D {
        RateCurve2D { points: self.points.iter().map(|p| p.rates()).collect() }
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("R1,R2,theta_u,theta_v,P_u,P_v,x,t,alpha\n");
        for p in &self.points {
            let row = [p.r1, p.r2, p.theta_u, p.theta_v, p.p_u, p.p_v, p.x, p.t, p.alpha].map(format_sig);
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

fn angle_grid(n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..n).map(|i| std::f64::consts::PI * i as f64 / n as f64).collect()
}

fn sweep_cell(
    kind: BoundaryKind,
    channel: &MisoChannel,
    cfg: &BoundaryConfig,
    theta_u: f64,
    theta_v: f64,
    p_u: f64,
) -> Vec<BoundaryPoint> {
    let n = channel.noise();
    let p_v = (channel.power() - p_u).max(0.0);
    let g = Gains::new(channel, Beam::from_angle(theta_u), Beam::from_angle(theta_v));
    let r2 = g.r2_common(p_u, p_v, n);
    let base = BoundaryPoint { r1: 0.0, r2, theta_u, theta_v, p_u, p_v, x: 0.0, t: 0.5, alpha: 0.0 };
    match kind {
        BoundaryKind::Cd => {
            let q = [0, 1].map(|j| g.quad(j, p_u, p_v, n, 0.0, QuadMode::Common));
            let (alpha, r1) = max_min(&q);
            let c2 = g.r2_corner(p_u, p_v, n);
            vec![
                BoundaryPoint { r1: r1.max(0.0), alpha, ..base },
                BoundaryPoint { r1: c2.r1, r2: c2.r2, alpha: f64::NAN, ..base },
            ]
        }
        BoundaryKind::MdUncorrelated => {
            let mut best = BoundaryPoint { r1: f64::NEG_INFINITY, ..base };
            let xs = std::iter::once(0.0).chain(private_grid(p_u, cfg.private_points));
            for x in xs {
                for &t in &cfg.shares {
                    let q = [g.quad(0, p_u, p_v, n, x, QuadMode::Uncorrelated(t)), g.quad(1, p_u, p_v, n, x, QuadMode::Uncorrelated(1.0 - t))];
                    let (alpha, r1) = max_min(&q);
                    if r1 > best.r1 {
                        best = BoundaryPoint { r1, x, t, alpha, ..base };
                    }
                }
            }
            best.r1 = best.r1.max(0.0);
            vec![best]
        }
        BoundaryKind::MdCorrelated => {
            let mut best = BoundaryPoint { r1: f64::NEG_INFINITY, ..base };
            let xs = if p_u > 0.0 { private_grid(p_u, cfg.private_points) } else { vec![0.0] };
            for x in xs {
                if x <= 0.0 {
                    best = BoundaryPoint { r1: 0.0, ..base };
                    continue;
                }
                let q = [0, 1].map(|j| g.quad(j, p_u, p_v, n, x, QuadMode::Private));
                let pen = 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * x).log2();
                let (alpha, r1) = max_min_penalized(&q, pen);
                if r1 > best.r1 {
                    best = BoundaryPoint { r1, x, alpha, ..base };
                }
            }
            best.r1 = best.r1.max(0.0);
            vec![best]
        }
    }
}

/// Upper-right staircase keeping the achieving parameters.
fn pareto(mut pts: Vec<BoundaryPoint>) -> Vec<BoundaryPoint> {
    pts.retain(|p| p.r1.is_finite() && p.r2.is_finite());
    pts.sort_by(|a, b| b.r1.total_cmp(&a.r1).then(b.r2.total_cmp(&a.r2)));
    let mut out: Vec<BoundaryPoint> = Vec::new();
    let mut top = f64::NEG_INFINITY;
    for p in pts {
        if p.r2 > top {
            top = p.r2;
            out.push(p);
        }
    }
    out.reverse();
    out
}

/// Sweeps beams, power split and the kind's private parameters, keeping the
/// best user-1 rate per (beams, split) cell.
pub fn region_boundary(kind: BoundaryKind, channel: &MisoChannel, cfg: &BoundaryConfig) -> Boundary {
    let thetas_u = match cfg.beams {
        BeamSweep::MeanChannel => vec![channel.mean_direction().angle()],
        BeamSweep::Angles(n) => angle_grid(n),
    };
    let thetas_v = angle_grid(cfg.v_angles);
    let ns = cfg.splits.max(2);
    let mut cells = Vec::with_capacity(thetas_u.len() * thetas_v.len() * ns);
    for &tu in &thetas_u {
        for &tv in &thetas_v {
            for i in 0..ns {
                cells.push((tu, tv, channel.power() * i as f64 / (ns - 1) as f64));
            }
        }
    }
    let pts: Vec<BoundaryPoint> = cells
        .par_iter()
        .flat_map_iter(|&(tu, tv, pu)| sweep_cell(kind, channel, cfg, tu, tv, pu))
        .collect();
    let points = pareto(pts);
    let hull = cfg
        .time_sharing
        .then(|| RateCurve2D { points: points.iter().map(|p| p.rates()).collect() }.hull());
    Boundary { kind, points, hull }
}
