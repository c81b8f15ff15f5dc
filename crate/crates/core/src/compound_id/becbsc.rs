//! Closed-form curves of the BEC/BSC compound example: Z = BSC(p),
//! Y1 = BSC(p1), Y2 = BEC(e2).

use serde::{Deserialize, Serialize};

use crate::info::{cascade, conv, h2, make_bec, Pmf};
use crate::polyhedra::{HalfPlane, NumericRegion2D};

use super::supporting::{aux_terms, AuxDesign};
use super::{check_range, BecBscParams, CompoundError};

fn check_alpha(alpha: f64) -> Result<f64, CompoundError> {
    check_range("alpha", alpha, 0.0, 0.5)
}

/// Corner `(1 - H2(p1*a), H2(p*a) - H2(p))` of the first capacity piece.
pub fn capacity_c1(params: &BecBscParams, alpha: f64) -> Result<(f64, f64), CompoundError> {
    let a = check_alpha(alpha)?;
    Ok((1.0 - h2(conv(params.p1, a)), h2(conv(params.p, a)) - h2(params.p)))
}

/// Second capacity piece: `R1 <= (1-e2) H2(a)`, `R2 <= 1 - H2(p*a)`,
/// `R1 + R2 <= 1 - e2`.
pub fn capacity_c2(params: &BecBscParams, alpha: f64) -> Result<NumericRegion2D, CompoundError> {
    let a = check_alpha(alpha)?;
    let c = 1.0 - params.e2;
    Ok(NumericRegion2D::from_halfplanes(vec![
        HalfPlane::new(1.0, 0.0, c * h2(a)),
        HalfPlane::new(0.0, 1.0, 1.0 - h2(conv(params.p, a))),
        HalfPlane::new(1.0, 1.0, c),
    ]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioTest {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `(1-2p1)^2 / (1-2p)^2 <= 1 <= (1-e2) / (1-H2(p))`.
pub fn strict_inclusion_ratio_test(params: &BecBscParams) -> RatioTest {
    let lhs = (1.0 - 2.0 * params.p1).powi(2) / (1.0 - 2.0 * params.p).powi(2);
    let rhs = (1.0 - params.e2) / (1.0 - h2(params.p));
    RatioTest { lhs, rhs, holds: lhs <= 1.0 && 1.0 <= rhs }
}

/// Interference-decoding slice at `alpha`:
/// `R1 <= 1 - H2(p1*a)`, `R1 + R2 <= 1 - H2(p1*a) + H2(p*a) - H2(p)`.
pub fn id_curve(params: &BecBscParams, alpha: f64) -> Result<NumericRegion2D, CompoundError> {
    let (r1, r2) = capacity_c1(params, alpha)?;
    Ok(NumericRegion2D::from_halfplanes(vec![
        HalfPlane::new(1.0, 0.0, r1),
        HalfPlane::new(1.0, 1.0, r1 + r2),
    ]))
}

/// Minimum of `H2(p1*a) - H2(p*a)` over the grid.
pub fn corner_e_dominance(params: &BecBscParams, alphas: &[f64]) -> f64 {
    alphas
        .iter()
        .map(|&a| h2(conv(params.p1, a)) - h2(conv(params.p, a)))
        .fold(f64::INFINITY, f64::min)
}

/// `(min_j I(Q;Yj), I(X;Z|Q) + min_j I(Q;Yj))` for a uniform-input design.
pub fn marton_outer_curve(params: &BecBscParams, design: &AuxDesign) -> Result<(f64, f64), CompoundError> {
    if !design.has_uniform_input() {
        return Err(CompoundError::Design("input marginal must be uniform".into()));
    }
    let t = aux_terms(params, design);
    let r1 = t.i_q_y1.min(t.i_q_y2);
    Ok((r1, t.i_x_z_given_q + r1))
}

/// `(R2, R1)` with `R2 = H2(p*a) - H2(p)` and
/// `R1 = min{1 - H2(p1*a), (1-e2)(1 - H2(a))}`.
pub fn mrs_gerber_lower(params: &BecBscParams, alpha: f64) -> Result<(f64, f64), CompoundError> {
    let a = check_alpha(alpha)?;
    let r2 = h2(conv(params.p, a)) - h2(params.p);
    let r1 = (1.0 - h2(conv(params.p1, a))).min((1.0 - params.e2) * (1.0 - h2(a)));
    Ok((r2, r1))
}

/// Crossing point in `(0, 1/2)` of `1 - H2(p1*a)` and `(1-e2)(1 - H2(a))`.
/// A crossing exists only when `e2 < H2(p1)` and `(1-2p1)^2 > 1-e2`.
pub fn alpha0_solve(params: &BecBscParams) -> Result<f64, CompoundError> {
    let f = |a: f64| 1.0 - h2(conv(params.p1, a)) - (1.0 - params.e2) * (1.0 - h2(a));
    const CELLS: usize = 4990;
    let step = 1e-4;
    let mut lo = 0.0;
    let mut flo = f(lo);
    for k in 1..=CELLS {
        let hi = k as f64 * step;
        let fhi = f(hi);
        if flo < 0.0 && fhi >= 0.0 {
            let (mut a, mut b) = (lo, hi);
            while b - a > 1e-13 {
                let m = 0.5 * (a + b);
                if f(m) < 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            return Ok(0.5 * (a + b));
        }
        lo = hi;
        flo = fhi;
    }
    Err(CompoundError::NoRoot(format!(
        "1 - H2(p1*a) and (1-e2)(1 - H2(a)) do not cross on (0, 0.5) for {params:?}"
    )))
}

/// `I(X;Y2|Q) - H(X|Q)` evaluated by cascades; equals `-e2 H(X|Q)`.
pub fn md_entropy_gap(params: &BecBscParams, design: &AuxDesign) -> Result<f64, CompoundError> {
    let conds: Vec<Pmf> = design.conditionals().iter().map(|&x| Pmf::bernoulli(x)).collect::<Result<_, _>>()?;
    let j = cascade(design.q(), &conds, &make_bec(params.e2)?)?;
    let h_x_given_q = j.entropy_of(&[0, 1]) - j.entropy_of(&[0]);
    Ok(j.mi_sets(&[1], &[2], &[0]) - h_x_given_q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    Capacity,
    /// Corner of the ID slice; it coincides with the capacity corner.
    InterferenceDecoding,
    MrsGerber,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub alpha: f64,
    pub r1: f64,
    pub r2: f64,
}

/// Sampled curve over the `alpha` grid.
pub fn curve_points(params: &BecBscParams, kind: CurveKind, alphas: &[f64]) -> Result<Vec<CurvePoint>, CompoundError> {
    alphas
        .iter()
        .map(|&alpha| {
            let (r1, r2) = match kind {
                CurveKind::Capacity | CurveKind::InterferenceDecoding => capacity_c1(params, alpha)?,
                CurveKind::MrsGerber => {
                    let (r2, r1) = mrs_gerber_lower(params, alpha)?;
                    (r1, r2)
                }
            };
            Ok(CurvePoint { alpha, r1, r2 })
        })
        .collect()
}

/// Cascade oracle for the first capacity corner with a uniform input.
#[cfg(test)]
pub(crate) fn c1_by_cascade(params: &BecBscParams, alpha: f64) -> (f64, f64) {
    let q = Pmf::uniform(2).unwrap();
    let conds = [Pmf::bernoulli(alpha).unwrap(), Pmf::bernoulli(1.0 - alpha).unwrap()];
    let y1 = cascade(&q, &conds, &crate::info::make_bsc(params.p1).unwrap()).unwrap();
    let z = cascade(&q, &conds, &crate::info::make_bsc(params.p).unwrap()).unwrap();
    (y1.mi_sets(&[0], &[2], &[]), z.mi_sets(&[1], &[2], &[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedra::vertices_2d;
    use proptest::prelude::*;

    fn dp() -> BecBscParams {
        BecBscParams::default()
    }

    #[test]
    fn c1_endpoints_and_interior() {
        let (a, b) = capacity_c1(&dp(), 0.0).unwrap();
        assert!((a - (1.0 - h2(0.13))).abs() < 1e-15 && b.abs() < 1e-15);
        let (a, b) = capacity_c1(&dp(), 0.5).unwrap();
        assert!(a.abs() < 1e-15 && (b - (1.0 - h2(0.1))).abs() < 1e-15);
        let (a, b) = capacity_c1(&dp(), 0.2).unwrap();
        assert!((a - (1.0 - h2(0.278))).abs() < 1e-12);
        assert!((b - (h2(0.26) - h2(0.1))).abs() < 1e-12);
        let (oa, ob) = c1_by_cascade(&dp(), 0.2);
        assert!((a - oa).abs() < 1e-12 && (b - ob).abs() < 1e-12);
        assert!(capacity_c1(&dp(), 0.6).is_err());
    }

    #[test]
    fn c2_polygon() {
        let r = capacity_c2(&dp(), 0.0).unwrap();
        assert!(vertices_2d(&r).unwrap().iter().all(|v| v[0].abs() < 1e-15));
        let r = capacity_c2(&dp(), 0.5).unwrap();
        let v = vertices_2d(&r).unwrap();
        assert!(v.iter().all(|v| v[1].abs() < 1e-12));
        assert!(v.iter().any(|v| (v[0] - 0.54).abs() < 1e-12));
        let r = capacity_c2(&dp(), 0.3).unwrap();
        let (c, a) = (0.54, 0.3);
        let x = c * h2(a);
        let y = 1.0 - h2(conv(0.1, 0.3));
        assert!(x + y > c);
        assert!(r.contains_point([x, c - x], 1e-12));
        assert!(r.contains_point([c - y, y], 1e-12));
        assert!(!r.contains_point([x, c - x + 1e-6], 1e-9));
    }

    #[test]
    fn ratio_test_values() {
        let t = strict_inclusion_ratio_test(&dp());
        assert!((t.lhs - 0.855625).abs() < 1e-12);
        assert!((t.rhs - 0.54 / (1.0 - h2(0.1))).abs() < 1e-15);
        assert!((t.rhs - 1.016941).abs() < 1e-6);
        assert!(t.holds);
        let same = BecBscParams::unchecked(0.1, 0.1, 0.46).unwrap();
        assert_eq!(strict_inclusion_ratio_test(&same).lhs, 1.0);
        let edge = BecBscParams::unchecked(0.1, 0.13, h2(0.1)).unwrap();
        assert!((strict_inclusion_ratio_test(&edge).rhs - 1.0).abs() < 1e-15);
    }

    #[test]
    fn id_slice_at_zero() {
        let r = id_curve(&dp(), 0.0).unwrap();
        let c = 1.0 - h2(0.13);
        assert!(r.contains_point([c, 0.0], 1e-12));
        assert!(!r.contains_point([0.0, c + 1e-6], 1e-9));
    }

    #[test]
    fn corner_e() {
        let grid: Vec<f64> = (0..1000).map(|k| 0.5 * k as f64 / 999.0).collect();
        assert!(corner_e_dominance(&dp(), &grid) >= -1e-12);
        let same = BecBscParams::unchecked(0.1, 0.1, 0.46).unwrap();
        assert_eq!(corner_e_dominance(&same, &grid), 0.0);
        assert_eq!(corner_e_dominance(&dp(), &[0.5]), 0.0);
    }

    #[test]
    fn alpha0_root() {
        let a0 = alpha0_solve(&dp()).unwrap();
        let lhs = 1.0 - h2(conv(0.13, a0));
        let rhs = 0.54 * (1.0 - h2(a0));
        assert!((lhs - rhs).abs() < 1e-10);
        assert!((a0 - 0.29405).abs() < 1e-4);
        assert!((lhs - 0.068095).abs() < 1e-5);
        let (_, r1) = mrs_gerber_lower(&dp(), a0).unwrap();
        assert!((r1 - lhs).abs() < 1e-10);
    }

    #[test]
    fn alpha0_vanishes_as_e2_reaches_h2_p1() {
        let mut prev = 0.5;
        for gap in [1e-2, 1e-3, 1e-4] {
            let p = BecBscParams::unchecked(0.1, 0.13, h2(0.13) - gap).unwrap();
            let a0 = alpha0_solve(&p).unwrap();
            assert!(a0 < prev);
            prev = a0;
        }
        assert!(prev < 0.02);
        let none = BecBscParams::unchecked(0.1, 0.13, 0.99).unwrap();
        assert!(matches!(alpha0_solve(&none), Err(CompoundError::NoRoot(_))));
    }

    #[test]
    fn mrs_gerber_start() {
        let (r2, r1) = mrs_gerber_lower(&dp(), 0.0).unwrap();
        assert_eq!(r2, 0.0);
        assert!((r1 - (1.0 - h2(0.13)).min(0.54)).abs() < 1e-15);
    }

    #[test]
    fn marton_outer_special_designs() {
        let p = dp();
        let ident = AuxDesign::new(Pmf::uniform(2).unwrap(), vec![0.0, 1.0]).unwrap();
        let (r1, s) = marton_outer_curve(&p, &ident).unwrap();
        let expect = (1.0 - h2(0.13)).min(0.54);
        assert!((r1 - expect).abs() < 1e-12 && (s - expect).abs() < 1e-12);
        let indep = AuxDesign::new(Pmf::uniform(2).unwrap(), vec![0.5, 0.5]).unwrap();
        let (r1, s) = marton_outer_curve(&p, &indep).unwrap();
        assert!(r1.abs() < 1e-12 && (s - (1.0 - h2(0.1))).abs() < 1e-12);
        let bsc = AuxDesign::new(Pmf::uniform(2).unwrap(), vec![0.2, 0.8]).unwrap();
        let (r1, _) = marton_outer_curve(&p, &bsc).unwrap();
        let expect = (1.0 - h2(conv(0.13, 0.2))).min(0.54 * (1.0 - h2(0.2)));
        assert!((r1 - expect).abs() < 1e-12);
        let skew = AuxDesign::new(Pmf::uniform(2).unwrap(), vec![0.2, 0.2]).unwrap();
        assert!(marton_outer_curve(&p, &skew).is_err());
    }

    #[test]
    fn md_gap_is_negative_erasure_weighted_entropy() {
        let d = AuxDesign::new(Pmf::uniform(2).unwrap(), vec![0.2, 0.8]).unwrap();
        let g = md_entropy_gap(&dp(), &d).unwrap();
        assert!((g + 0.46 * h2(0.2)).abs() < 1e-12);
        assert!(g < 0.0);
    }

    proptest! {
        #[test]
        fn id_slice_contains_mrs_gerber_point(a in 0.0f64..=0.5) {
            let p = dp();
            let (r2, r1) = mrs_gerber_lower(&p, a).unwrap();
            let region = id_curve(&p, a).unwrap();
            prop_assert!(region.contains_point([r1, r2], 1e-12));
        }

        #[test]
        fn ratio_test_matches_parameter_inequality(p in 0.01f64..0.45, d in 0.001f64..0.05, t in 0.0f64..1.0) {
            let p1 = (p + d).min(0.499);
            let lo = 4.0 * p1 * (1.0 - p1);
            let hi = h2(p);
            prop_assume!(lo < hi);
            let e2 = lo + t * (hi - lo);
            prop_assume!(e2 > lo);
            let params = BecBscParams::new(p, p1, e2).unwrap();
            prop_assert!(strict_inclusion_ratio_test(&params).holds);
        }
    }
}
