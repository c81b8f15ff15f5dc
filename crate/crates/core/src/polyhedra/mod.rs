//! Symbolic rate-region systems and 2D region geometry.
//!
//! Symbolic work (elimination, substitution) is exact over rationals; only
//! [`RegionSystem::instantiate`] leaves the rationals.

mod atom;
mod geometry;
mod system;

use thiserror::Error;

pub use atom::{format_rational, parse_rational, rat, rat_int, rat_to_f64, split_vars, InfoAtom, InfoExpr, Rational};
pub use geometry::{
    contains, convex_hull, convex_hull_union, polygon_area, vertices_2d, vertices_nd, Containment, HalfPlane, HullInput,
    NumIneq, NumericRegion2D, NumericSystem, RateCurve2D, BOX_MAX, FEAS_TOL,
};
pub use system::{
    sample_valuations, AffineForm, Condition, LinForm, LinIneq, RegionSystem, Relation, Substitution, Valuation,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown rate variable {0}")]
    UnknownVar(String),
    #[error("no value for atom {0}")]
    MissingAtom(String),
    #[error("region is empty")]
    EmptyRegion,
    #[error("expected a 2-variable system, got {0} variables")]
    Dimension(usize),
    #[error("valuation model: {0}")]
    Model(String),
}

/// Vertex sets equal up to `tol` in both directions.
pub fn same_vertices(a: &[[f64; 2]], b: &[[f64; 2]], tol: f64) -> bool {
    let covered = |x: &[[f64; 2]], y: &[[f64; 2]]| {
        x.iter()
            .all(|p| y.iter().any(|q| (p[0] - q[0]).abs() <= tol && (p[1] - q[1]).abs() <= tol))
    };
    covered(a, b) && covered(b, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn val(pairs: &[(&str, f64)]) -> Valuation {
        pairs.iter().map(|(a, v)| (a.parse().unwrap(), *v)).collect()
    }

    #[test]
    fn single_pairing() {
        let s = RegionSystem::parse(&["T", "R"], &["T <= 3/2", "R <= T"]).unwrap();
        let p = s.fme_eliminate("T").unwrap();
        assert_eq!(p.rate_vars(), &["R".to_string()]);
        assert_eq!(p.len(), 1);
        assert_eq!(p.ineqs()[0].to_string(), "R <= 3/2");
    }

    #[test]
    fn combination_count() {
        let s = RegionSystem::parse(
            &["T", "A", "B"],
            &["T <= I(U;Y1)", "T + A <= I(U;Y2)", "2 T - B <= I(V;Z)", "A <= T", "B - T <= H(X)", "A + B <= 1"],
        )
        .unwrap();
        let p = s.fme_eliminate("T").unwrap();
        assert!(p.len() <= 3 * 2 + 1);
        assert_eq!(p.len(), 7);
    }

    #[test]
    fn strictness_propagates_and_coefficients_exact() {
        let s = RegionSystem::parse(&["T", "R"], &["3 T <= I(U;Y1)", "R - 2 T < I(U;V|Q)"]).unwrap();
        let p = s.fme_eliminate("T").unwrap();
        let i = &p.ineqs()[0];
        assert_eq!(i.rel, Relation::Lt);
        assert_eq!(i.lhs["R"], rat_int(1));
        assert_eq!(i.rhs.terms()[&"I(U;Y1)".parse::<InfoAtom>().unwrap()], rat(2, 3));
        assert_eq!(i.rhs.terms()[&"I(U;V|Q)".parse::<InfoAtom>().unwrap()], rat_int(1));
    }

    #[test]
    fn unbounded_var_passes_through() {
        let s = RegionSystem::parse(&["T", "R"], &["R <= 1", "R - T <= 0"]).unwrap();
        let p = s.fme_eliminate("T").unwrap();
        assert_eq!(p.len(), 1);
        assert!(s.fme_eliminate("W").is_err());
    }

    #[test]
    fn eliminating_everything_leaves_conditions() {
        let s = RegionSystem::parse(&["R"], &["R <= I(U;Y1)", "R >= I(U;V)"]).unwrap();
        let p = s.fme_eliminate("R").unwrap();
        assert!(p.is_empty());
        assert_eq!(p.conditions().len(), 1);
        assert_eq!(p.conditions()[0].to_string(), "0 <= -I(U;V) + I(U;Y1)");
    }

    #[test]
    fn substitution_cases() {
        let s = RegionSystem::parse(&["R1", "R2"], &["R1 + 2 R2 <= I(X;Y1)"]).unwrap();
        let id = Substitution::new(&[], &[]).unwrap();
        assert_eq!(s.substitute_rates(&id, &[]).unwrap(), s);
        let scale = Substitution::new(&[("R1", "2 S1")], &["S1"]).unwrap();
        let t = s.substitute_rates(&scale, &[]).unwrap();
        assert_eq!(t.ineqs()[0].lhs["S1"], rat_int(1));
        assert_eq!(t.ineqs()[0].lhs["R2"], rat_int(1));
        assert_eq!(t.ineqs()[0].rhs.terms().values().next().unwrap(), &rat(1, 2));
        let bad = Substitution::new(&[("R9", "S1")], &["S1"]).unwrap();
        assert!(matches!(s.substitute_rates(&bad, &[]), Err(PolyError::UnknownVar(_))));
        let fixed = s.fix_var("R2", rat(1, 4)).unwrap();
        let num = fixed.instantiate(&val(&[("I(X;Y1)", 1.0)])).unwrap();
        assert_eq!(num.rows[0].bound, 0.5);
    }

    #[test]
    fn instantiate_requires_values() {
        let s = RegionSystem::parse(&["R1", "R2"], &["R1 <= I(X;Y1)", "R2 <= I(X;Y2)"]).unwrap();
        assert!(matches!(s.instantiate(&val(&[("I(X;Y1)", 1.0)])), Err(PolyError::MissingAtom(_))));
        let r = s
            .instantiate(&val(&[("I(X;Y1)", 0.0), ("I(X;Y2)", 0.0)]))
            .unwrap()
            .to_region_2d()
            .unwrap();
        assert_eq!(vertices_2d(&r).unwrap(), &[[0.0, 0.0]]);
    }

    #[test]
    fn json_roundtrip() {
        let s = RegionSystem::parse(&["T1", "R1"], &["T1 - R1 > I(U;V|Q) - 1/3", "T1 <= I(QU;Y1)"]).unwrap();
        let j = s.to_json();
        assert!(j.contains("\"const\": \"1/3\""));
        let back = RegionSystem::from_json(&j).unwrap();
        assert_eq!(back, s);
        assert!(RegionSystem::from_json(&j.replace("\"T1\",", "")).is_err());
    }

    #[test]
    fn pruning_keeps_region() {
        let s = RegionSystem::parse(
            &["R1", "R2"],
            &["R1 <= I(X;Y1)", "R2 <= I(X;Y2)", "R1 + R2 <= I(X;Y1) + I(X;Y2) + 1", "R1 <= I(X;Y1) + 2"],
        )
        .unwrap();
        let vals = s.sample_valuations(50, 1).unwrap();
        let p = s.prune_redundant(&vals).unwrap();
        assert_eq!(p.len(), 2);
        for v in &vals {
            let a = s.instantiate(v).unwrap().to_region_2d().unwrap();
            let b = p.instantiate(v).unwrap().to_region_2d().unwrap();
            assert!(same_vertices(vertices_2d(&a).unwrap(), vertices_2d(&b).unwrap(), 1e-12));
        }
    }

    #[test]
    fn pruning_drops_rows_through_a_vertex() {
        let s = RegionSystem::parse(
            &["R1", "R2"],
            &["R1 <= I(X;Y1)", "R1 + R2 <= I(X;Y2)", "2 R1 + R2 <= I(X;Y1) + I(X;Y2)", "R2 >= 0"],
        )
        .unwrap();
        let vals = s.sample_valuations(30, 2).unwrap();
        let p = s.prune_redundant(&vals).unwrap();
        assert_eq!(p.len(), 2);
        for v in &vals {
            let a = s.instantiate(v).unwrap().to_region_2d().unwrap();
            let b = p.instantiate(v).unwrap().to_region_2d().unwrap();
            assert!(same_vertices(vertices_2d(&a).unwrap(), vertices_2d(&b).unwrap(), 1e-12));
        }
    }

    /// Feasible x (2D point) for the system with the var eliminated iff the
    /// 1D interval of the eliminated var is nonempty.
    fn extension_exists(sys: &RegionSystem, var: &str, point: &BTreeMap<String, f64>, v: &Valuation) -> bool {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for i in sys.ineqs() {
            let c = rat_to_f64(&i.coeff(var));
            let rest: f64 = i
                .lhs
                .iter()
                .filter(|(k, _)| k.as_str() != var)
                .map(|(k, a)| rat_to_f64(a) * point[k])
                .sum();
            let b = i.rhs.eval(v).unwrap() - rest;
            if c > 0.0 {
                hi = hi.min(b / c);
            } else if c < 0.0 {
                lo = lo.max(b / c);
            } else if b < -1e-9 {
                return false;
            }
        }
        lo <= hi + 1e-9
    }

    fn small_system() -> impl Strategy<Value = (Vec<String>, u64)> {
        let row = (-2i64..=2, -2i64..=2, -2i64..=2, 0usize..4, 0i64..4);
        (prop::collection::vec(row, 3..7), any::<u64>()).prop_map(|(rows, seed)| {
            let atoms = ["I(U;Y1)", "I(U;Y2|Q)", "I(QU;Y1)", "H(X|Q)"];
            let lines = rows
                .into_iter()
                .filter(|(a, b, c, _, _)| *a != 0 || *b != 0 || *c != 0)
                .map(|(a, b, c, k, n)| format!("{a} T + {b} R1 + {c} R2 <= {} + {n}", atoms[k]).replace("+ -", "- "))
                .collect();
            (lines, seed)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn fme_sound_and_complete((lines, seed) in small_system()) {
            prop_assume!(!lines.is_empty());
            let refs: Vec<&str> = lines.iter().map(|s| s.as_str()).collect();
            let sys = RegionSystem::parse(&["T", "R1", "R2"], &refs).unwrap();
            let proj = sys.fme_eliminate("T").unwrap();
            let vals = sys.sample_valuations(3, seed).unwrap();
            for v in &vals {
                let num = proj.instantiate(v).unwrap();
                for i in 0..12 {
                    for j in 0..12 {
                        let (r1, r2) = (i as f64 * 0.37, j as f64 * 0.41);
                        let pt: BTreeMap<String, f64> = [("R1".to_string(), r1), ("R2".to_string(), r2)].into();
                        let ours = num.conditions_hold(1e-9) && num.rows.iter().all(|r| {
                            let x: Vec<f64> = proj.rate_vars().iter().map(|k| pt[k]).collect();
                            r.slack(&x) >= -1e-9
                        });
                        let truth = extension_exists(&sys, "T", &pt, v);
                        // points within 1e-6 of a boundary are ambiguous at float precision
                        let near = num.rows.iter().any(|r| {
                            let x: Vec<f64> = proj.rate_vars().iter().map(|k| pt[k]).collect();
                            r.slack(&x).abs() < 1e-6
                        }) || num.conditions.iter().any(|(c, _)| c.abs() < 1e-6);
                        if !near {
                            prop_assert_eq!(ours, truth);
                        }
                    }
                }
            }
        }

        #[test]
        fn fme_order_independent(seed in any::<u64>()) {
            let sys = RegionSystem::parse(
                &["T1", "T2", "R1", "R2"],
                &["T1 <= I(U;Y1|Q)", "T1 + T2 <= I(UV;Y2|Q) + I(U;V|Q)", "T2 <= I(V;Z|Q)",
                  "R1 <= T1", "R2 <= T2", "T1 + T2 - R1 - R2 > I(U;V|Q)"],
            ).unwrap();
            let a = sys.fme_eliminate_all(&["T1", "T2"]).unwrap();
            let b = sys.fme_eliminate_all(&["T2", "T1"]).unwrap();
            for v in sys.sample_valuations(5, seed).unwrap() {
                let ra = a.instantiate(&v).unwrap().to_region_2d().unwrap();
                let rb = b.instantiate(&v).unwrap().to_region_2d().unwrap();
                let va = vertices_2d(&ra).map(|v| v.to_vec()).unwrap_or_default();
                let vb = vertices_2d(&rb).map(|v| v.to_vec()).unwrap_or_default();
                prop_assert!(same_vertices(&va, &vb, 1e-9));
            }
        }
    }
}
