//! Interference-decoding regions for the two-instance compound broadcast
//! channel, and the BEC/BSC example built on them.

mod becbsc;
mod regions;
mod supporting;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::info::{h2, InfoError};
use crate::optimizer::SearchError;
use crate::polyhedra::PolyError;

pub use becbsc::{
    alpha0_solve, capacity_c1, capacity_c2, corner_e_dominance, curve_points, id_curve, marton_outer_curve,
    md_entropy_gap, mrs_gerber_lower, strict_inclusion_ratio_test, CurveKind, CurvePoint, RatioTest,
};
pub use regions::{
    listed_id_model, listed_id_system, listed_id_target, bit_recombination, build_id_region, build_id_region_for,
    build_t_constraints, id_pair_system, nid_system, project_out_t, standard_bc_region, three_arv_md_target,
    three_arv_md_reduction, three_arv_model, three_arv_region, DecodingChoice,
};
pub use supporting::{
    aux_terms, brute_force_weighted, d_a_curve, f_a, f_a_exact, t0, t1, t_a_upper, AuxDesign, AuxTerms, BruteForce,
    DaCurve, LambdaGrid, SearchBudget, SupportingLineEval,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CompoundError {
    #[error("parameter constraint violated: {0}")]
    Params(String),
    #[error("{name} = {value} outside [{lo}, {hi}]")]
    Domain { name: &'static str, value: f64, lo: f64, hi: f64 },
    #[error("decoding method {0} not in 1..=4")]
    Method(u8),
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("invalid auxiliary design: {0}")]
    Design(String),
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64, CompoundError> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(CompoundError::Domain { name, value, lo, hi })
    }
}

/// BSC crossover `p` towards Z, BSC crossover `p1` towards Y1 and erasure
/// probability `e2` towards Y2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BecBscParams {
    pub p: f64,
    pub p1: f64,
    pub e2: f64,
}

impl Default for BecBscParams {
    fn default() -> Self {
        Self { p: 0.1, p1: 0.13, e2: 0.46 }
    }
}

impl BecBscParams {
    /// Enforces `0 < p < p1 < 1/2` and `4p1(1-p1) < e2 <= H2(p)`.
    pub fn new(p: f64, p1: f64, e2: f64) -> Result<Self, CompoundError> {
        let s = Self::unchecked(p, p1, e2)?;
        if !(p > 0.0) {
            return Err(CompoundError::Params(format!("p > 0 fails: p = {p}")));
        }
        if !(p < p1) {
            return Err(CompoundError::Params(format!("p < p1 fails: p = {p}, p1 = {p1}")));
        }
        if !(p1 < 0.5) {
            return Err(CompoundError::Params(format!("p1 < 0.5 fails: p1 = {p1}")));
        }
        let low = 4.0 * p1 * (1.0 - p1);
        if !(low < e2) {
            return Err(CompoundError::Params(format!("4 p1 (1 - p1) < e2 fails: {low} >= {e2}")));
        }
        if !(e2 <= h2(p)) {
            return Err(CompoundError::Params(format!("e2 <= H2(p) fails: {e2} > {}", h2(p))));
        }
        Ok(s)
    }

    /// Only range checks: crossovers in `[0, 1/2]`, erasure in `[0, 1]`.
    pub fn unchecked(p: f64, p1: f64, e2: f64) -> Result<Self, CompoundError> {
        check_range("p", p, 0.0, 0.5)?;
        check_range("p1", p1, 0.0, 0.5)?;
        check_range("e2", e2, 0.0, 1.0)?;
        Ok(Self { p, p1, e2 })
    }

    pub fn is_valid(&self) -> bool {
        Self::new(self.p, self.p1, self.e2).is_ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_params_valid() {
        assert!(BecBscParams::default().is_valid());
    }

    #[test]
    fn violations_name_the_term() {
        let e = BecBscParams::new(0.13, 0.1, 0.46).unwrap_err().to_string();
        assert!(e.contains("p < p1"), "{e}");
        let e = BecBscParams::new(0.1, 0.13, 0.44).unwrap_err().to_string();
        assert!(e.contains("4 p1 (1 - p1) < e2"), "{e}");
        let e = BecBscParams::new(0.1, 0.13, 0.5).unwrap_err().to_string();
        assert!(e.contains("e2 <= H2(p)"), "{e}");
        assert!(matches!(BecBscParams::unchecked(0.6, 0.1, 0.2), Err(CompoundError::Domain { name: "p", .. })));
    }
}
