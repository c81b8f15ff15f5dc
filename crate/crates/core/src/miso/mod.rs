//! Dirty-paper coding inner bounds on the 2×1 Gaussian compound MISO
//! broadcast channel.
//!
//! User 1 is seen through one of two channel vectors `h1`, `h2`; user 2
//! through `g`. All rates are in bits per real channel use.

mod boundary;
mod dpc;
mod oracle;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::optimizer::SearchError;

pub use boundary::{region_boundary, Boundary, BoundaryConfig, BoundaryKind, BoundaryPoint, BeamSweep};
pub use dpc::{
    cd_closed_form, cd_region, dpc_common_rate, dpc_private_optimal, md_correlated_closed_form, md_correlated_point,
    md_uncorrelated_closed_form, md_uncorrelated_point, p_eta, strictness_uncorrelated_check, CdCorners,
    CorrelatedPoint, StrictnessReport, UncorrelatedPoint,
};
pub use oracle::{gaussian_mi_oracle, private_mi_gap, common_mi_gap};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MisoError {
    #[error("invalid channel: {0}")]
    Channel(String),
    #[error("invalid scheme: {0}")]
    Scheme(String),
    #[error("{name} = {value} outside [{lo}, {hi}]")]
    Domain { name: &'static str, value: f64, lo: f64, hi: f64 },
    #[error("covariance not positive semidefinite (min eigenvalue {0})")]
    NotPsd(f64),
    #[error("{0}")]
    Insufficient(String),
    #[error(transparent)]
    Search(#[from] SearchError),
}

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64, MisoError> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(MisoError::Domain { name, value, lo, hi })
    }
}

pub(crate) fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Channel config as read from JSON: `{h1, h2, g, P, N}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannel", into = "RawChannel")]
pub struct MisoChannel {
    h1: [f64; 2],
    h2: [f64; 2],
    g: [f64; 2],
    power: f64,
    noise: f64,
}

#[derive(Serialize, Deserialize)]
struct RawChannel {
    h1: [f64; 2],
    h2: [f64; 2],
    g: [f64; 2],
    #[serde(rename = "P")]
    power: f64,
    #[serde(rename = "N")]
    noise: f64,
}

impl TryFrom<RawChannel> for MisoChannel {
    type Error = MisoError;
    fn try_from(r: RawChannel) -> Result<Self, MisoError> {
        MisoChannel::new(r.h1, r.h2, r.g, r.power, r.noise)
    }
}

impl From<MisoChannel> for RawChannel {
    fn from(c: MisoChannel) -> Self {
        RawChannel { h1: c.h1, h2: c.h2, g: c.g, power: c.power, noise: c.noise }
    }
}

impl MisoChannel {
    /// `power = 0` is accepted so degenerate sweeps collapse to the origin.
    pub fn new(h1: [f64; 2], h2: [f64; 2], g: [f64; 2], power: f64, noise: f64) -> Result<Self, MisoError> {
        if !(power.is_finite() && power >= 0.0) {
            return Err(MisoError::Channel(format!("power {power} must be finite and >= 0")));
        }
        if !(noise.is_finite() && noise > 0.0) {
            return Err(MisoError::Channel(format!("noise {noise} must be finite and > 0")));
        }
        let vs = [("h1", h1), ("h2", h2), ("g", g)];
        for (i, (na, a)) in vs.iter().enumerate() {
            if !(a[0].is_finite() && a[1].is_finite()) {
                return Err(MisoError::Channel(format!("{na} has non-finite entries")));
            }
            for (nb, b) in &vs[i + 1..] {
                let scale = dot(*a, *a).sqrt() * dot(*b, *b).sqrt();
                if cross(*a, *b).abs() <= 1e-12 * scale.max(1e-300) {
                    return Err(MisoError::Channel(format!("{na} and {nb} are linearly dependent")));
                }
            }
        }
        Ok(Self { h1, h2, g, power, noise })
    }

    /// Unit-norm orthogonal `h1`, `h2` and unit `g` orthogonal to their mean.
    pub fn special(power: f64, noise: f64) -> Result<Self, MisoError> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::new([1.0, 0.0], [0.0, 1.0], [s, -s], power, noise)
    }

    /// Figure geometry: `‖h1‖ = ‖h2‖ = ‖g‖ = 2`, orthogonal user-1 channels,
    /// `g` orthogonal to the mean channel, unit noise.
    pub fn figure(snr_db: f64) -> Result<Self, MisoError> {
        let s = std::f64::consts::SQRT_2;
        Self::new([2.0, 0.0], [0.0, 2.0], [s, -s], 10f64.powf(snr_db / 10.0), 1.0)
    }

    pub fn h(&self, j: usize) -> Result<[f64; 2], MisoError> {
        match j {
            1 => Ok(self.h1),
            2 => Ok(self.h2),
            _ => Err(MisoError::Scheme(format!("channel index {j} not in {{1, 2}}"))),
        }
    }

    pub fn h1(&self) -> [f64; 2] {
        self.h1
    }

    pub fn h2(&self) -> [f64; 2] {
        self.h2
    }

    pub fn g(&self) -> [f64; 2] {
        self.g
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn with_power(&self, power: f64) -> Result<Self, MisoError> {
        Self::new(self.h1, self.h2, self.g, power, self.noise)
    }

    /// Unit vector along `h1 / ‖h1‖ + h2 / ‖h2‖`.
    pub fn mean_direction(&self) -> Beam {
        let n1 = dot(self.h1, self.h1).sqrt();
        let n2 = dot(self.h2, self.h2).sqrt();
        Beam::normalized([self.h1[0] / n1 + self.h2[0] / n2, self.h1[1] / n1 + self.h2[1] / n2])
            .unwrap_or_else(|_| Beam::from_angle(0.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Beam([f64; 2]);

impl TryFrom<[f64; 2]> for Beam {
    type Error = MisoError;
    fn try_from(v: [f64; 2]) -> Result<Self, MisoError> {
        Beam::new(v)
    }
}

impl From<Beam> for [f64; 2] {
    fn from(b: Beam) -> Self {
        b.0
    }
}

impl Beam {
    pub fn new(v: [f64; 2]) -> Result<Self, MisoError> {
        if (dot(v, v).sqrt() - 1.0).abs() > 1e-12 {
            return Err(MisoError::Scheme(format!("beam {v:?} is not unit norm")));
        }
        Ok(Self(v))
    }

    pub fn normalized(v: [f64; 2]) -> Result<Self, MisoError> {
        let n = dot(v, v).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(MisoError::Scheme(format!("cannot normalize {v:?}")));
        }
        Ok(Self([v[0] / n, v[1] / n]))
    }

    pub fn from_angle(theta: f64) -> Self {
        Self([theta.cos(), theta.sin()])
    }

    pub fn angle(&self) -> f64 {
        self.0[1].atan2(self.0[0])
    }

    pub fn vector(&self) -> [f64; 2] {
        self.0
    }

    pub fn orthogonal(&self) -> Beam {
        Self([-self.0[1], self.0[0]])
    }

    pub fn project(&self, v: [f64; 2]) -> f64 {
        dot(self.0, v)
    }
}

/// Beams, power split, private power, DPC parameter and time share.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DpcScheme {
    pub b_u: Beam,
    pub b_v: Beam,
    pub p_u: f64,
    pub p_v: f64,
    pub x: f64,
    pub alpha: f64,
    pub t: f64,
}

impl DpcScheme {
    pub fn new(b_u: Beam, b_v: Beam, p_u: f64, p_v: f64) -> Self {
        Self { b_u, b_v, p_u, p_v, x: 0.0, alpha: 0.0, t: 0.5 }
    }

    pub fn with_private(mut self, x: f64) -> Self {
        self.x = x;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_share(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    /// Beams of the unit-norm special geometry with `η = sin 2θ_v`, `θ_v ∈ [−π/4, π/4]`.
    pub fn special(eta: f64, p_u: f64, p_v: f64) -> Result<Self, MisoError> {
        check_range("eta", eta, -1.0, 1.0)?;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let b_u = Beam([s, s]);
        Ok(Self::new(b_u, Beam::from_angle(0.5 * eta.asin()), p_u, p_v))
    }

    pub fn validate(&self, channel: &MisoChannel) -> Result<(), MisoError> {
        check_range("P_u", self.p_u, 0.0, f64::INFINITY)?;
        check_range("P_v", self.p_v, 0.0, f64::INFINITY)?;
        if self.p_u + self.p_v > channel.power * (1.0 + 1e-12) + 1e-15 {
            return Err(MisoError::Scheme(format!(
                "P_u + P_v = {} exceeds P = {}",
                self.p_u + self.p_v,
                channel.power
            )));
        }
        check_range("x", self.x, 0.0, self.p_u)?;
        check_range("t", self.t, 0.0, 1.0)?;
        if !self.alpha.is_finite() {
            return Err(MisoError::Scheme("alpha must be finite".into()));
        }
        Ok(())
    }

    /// `(K_u, K_v)` as row-major 2×2 covariances.
    pub fn covariances(&self) -> ([f64; 4], [f64; 4]) {
        let outer = |b: [f64; 2], p: f64| [p * b[0] * b[0], p * b[0] * b[1], p * b[1] * b[0], p * b[1] * b[1]];
        (outer(self.b_u.0, self.p_u), outer(self.b_v.0, self.p_v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GaussRatePoint {
    pub r1: f64,
    pub r2: f64,
}

impl GaussRatePoint {
    pub fn new(r1: f64, r2: f64) -> Self {
        Self { r1: r1.max(0.0), r2: r2.max(0.0) }
    }

    pub fn as_array(&self) -> [f64; 2] {
        [self.r1, self.r2]
    }
}
