use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::PolyError;

/// Side length of the bounding box intersected with every numeric region.
pub const BOX_MAX: f64 = 50.0;
/// Feasibility slack for vertices.
pub const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct NumIneq {
    pub coeffs: Vec<f64>,
    pub bound: f64,
    pub strict: bool,
}

impl NumIneq {
    pub fn slack(&self, x: &[f64]) -> f64 {
        self.bound - self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
    }
}

/// Instantiated inequality system; conditions are `0 <= value` (or `<`).
#[derive(Debug, Clone)]
pub struct NumericSystem {
    pub vars: Vec<String>,
    pub rows: Vec<NumIneq>,
    pub conditions: Vec<(f64, bool)>,
}

impl NumericSystem {
    /// Whether every variable-free condition holds within `tol`.
    pub fn conditions_hold(&self, tol: f64) -> bool {
        self.conditions.iter().all(|(v, _)| *v >= -tol)
    }

    pub fn contains_point(&self, x: &[f64], tol: f64) -> bool {
        self.conditions_hold(tol)
            && self.rows.iter().all(|r| r.slack(x) >= -tol)
            && x.iter().all(|v| *v >= -tol && *v <= BOX_MAX + tol)
    }

    /// 2D region in the order of `self.vars`; empty when a condition fails.
    pub fn to_region_2d(&self) -> Result<NumericRegion2D, PolyError> {
        if self.vars.len() != 2 {
            return Err(PolyError::Dimension(self.vars.len()));
        }
        if !self.conditions_hold(FEAS_TOL) {
            return Ok(NumericRegion2D::empty());
        }
        Ok(NumericRegion2D::from_halfplanes(
            self.rows
                .iter()
                .map(|r| HalfPlane {
                    a: [r.coeffs[0], r.coeffs[1]],
                    b: r.bound,
                    strict: r.strict,
                })
                .collect(),
        ))
    }
}

fn box_rows(d: usize) -> Vec<NumIneq> {
    let mut rows = Vec::with_capacity(2 * d);
    for k in 0..d {
        let mut e = vec![0.0; d];
        e[k] = -1.0;
        rows.push(NumIneq { coeffs: e.clone(), bound: 0.0, strict: false });
        e[k] = 1.0;
        rows.push(NumIneq { coeffs: e, bound: BOX_MAX, strict: false });
    }
    rows
}

fn subsets(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), f);
}

/// Vertices of `{rows} ∩ [0, BOX_MAX]^d` by solving every d-subset of tight
/// constraints. Only meant for d ≤ 4.
pub fn vertices_nd(rows: &[NumIneq], d: usize) -> Vec<Vec<f64>> {
    let mut all: Vec<NumIneq> = rows.to_vec();
    all.extend(box_rows(d));
    let mut out: Vec<Vec<f64>> = Vec::new();
    subsets(all.len(), d, &mut |idx| {
        let a = DMatrix::from_fn(d, d, |i, j| all[idx[i]].coeffs[j]);
        let b = DVector::from_fn(d, |i, _| all[idx[i]].bound);
        let lu = a.lu();
        if lu.determinant().abs() < 1e-12 {
            return;
        }
        if let Some(x) = lu.solve(&b) {
            let x: Vec<f64> = x.iter().copied().collect();
            if all.iter().all(|r| r.slack(&x) >= -FEAS_TOL)
                && !out.iter().any(|p| p.iter().zip(&x).all(|(u, v)| (u - v).abs() < 1e-10))
            {
                out.push(x);
            }
        }
    });
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub a: [f64; 2],
    pub b: f64,
    pub strict: bool,
}

impl HalfPlane {
    pub fn new(a1: f64, a2: f64, b: f64) -> Self {
        Self { a: [a1, a2], b, strict: false }
    }

    pub fn violation(&self, p: [f64; 2]) -> f64 {
        (self.a[0] * p[0] + self.a[1] * p[1] - self.b).max(0.0)
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise convex hull (monotone chain) without collinear points.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.iter().copied().filter(|p| p[0].is_finite() && p[1].is_finite()).collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut uniq: Vec<[f64; 2]> = Vec::with_capacity(pts.len());
    for p in pts {
        if !uniq.iter().any(|q| (q[0] - p[0]).abs() < 1e-12 && (q[1] - p[1]).abs() < 1e-12) {
            uniq.push(p);
        }
    }
    if uniq.len() < 3 {
        return uniq;
    }
    let scale = uniq.iter().fold(1.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    let eps = 1e-14 * scale * scale;
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * uniq.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(uniq.iter())
        } else {
            Box::new(uniq.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= eps {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() == 2 && (hull[0][0] - hull[1][0]).abs() < 1e-12 && (hull[0][1] - hull[1][1]).abs() < 1e-12 {
        hull.pop();
    }
    hull
}

/// Polygon area by the shoelace formula.
pub fn polygon_area(v: &[[f64; 2]]) -> f64 {
    if v.len() < 3 {
        return 0.0;
    }
    0.5 * (0..v.len())
        .map(|i| {
            let (p, q) = (v[i], v[(i + 1) % v.len()]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
        .abs()
}

/// Convex polygon `{a·r ≤ b} ∩ [0, 50]²` with cached vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericRegion2D {
    halfplanes: Vec<HalfPlane>,
    vertices: Vec<[f64; 2]>,
}

impl NumericRegion2D {
    pub fn empty() -> Self {
        Self {
            halfplanes: vec![HalfPlane::new(0.0, 0.0, -1.0)],
            vertices: Vec::new(),
        }
    }

    pub fn from_halfplanes(mut halfplanes: Vec<HalfPlane>) -> Self {
        halfplanes.extend([
            HalfPlane::new(-1.0, 0.0, 0.0),
            HalfPlane::new(0.0, -1.0, 0.0),
            HalfPlane::new(1.0, 0.0, BOX_MAX),
            HalfPlane::new(0.0, 1.0, BOX_MAX),
        ]);
        let feasible = |p: [f64; 2]| halfplanes.iter().all(|h| h.violation(p) <= FEAS_TOL);
        let mut pts = Vec::new();
        for i in 0..halfplanes.len() {
            for j in i + 1..halfplanes.len() {
                let (h, k) = (&halfplanes[i], &halfplanes[j]);
                let det = h.a[0] * k.a[1] - h.a[1] * k.a[0];
                if det.abs() < 1e-14 {
                    continue;
                }
                let p = [(h.b * k.a[1] - h.a[1] * k.b) / det, (h.a[0] * k.b - h.b * k.a[0]) / det];
                if feasible(p) {
                    pts.push(p);
                }
            }
        }
        let vertices = convex_hull(&pts);
        Self { halfplanes, vertices }
    }

    /// Region spanned by a convex polygon given counter-clockwise.
    pub fn from_polygon(vertices: &[[f64; 2]]) -> Self {
        let hull = convex_hull(vertices);
        let mut hp = Vec::new();
        match hull.len() {
            0 => return Self::empty(),
            1 => {
                let p = hull[0];
                hp.extend([HalfPlane::new(1.0, 0.0, p[0]), HalfPlane::new(-1.0, 0.0, -p[0])]);
                hp.extend([HalfPlane::new(0.0, 1.0, p[1]), HalfPlane::new(0.0, -1.0, -p[1])]);
            }
            2 => {
                let (p, q) = (hull[0], hull[1]);
                let n = [q[1] - p[1], p[0] - q[0]];
                let c = n[0] * p[0] + n[1] * p[1];
                hp.extend([HalfPlane::new(n[0], n[1], c), HalfPlane::new(-n[0], -n[1], -c)]);
                let t = [q[0] - p[0], q[1] - p[1]];
                hp.push(HalfPlane::new(t[0], t[1], t[0] * q[0] + t[1] * q[1]));
                hp.push(HalfPlane::new(-t[0], -t[1], -(t[0] * p[0] + t[1] * p[1])));
            }
            _ => {
                for i in 0..hull.len() {
                    let (p, q) = (hull[i], hull[(i + 1) % hull.len()]);
                    let n = [q[1] - p[1], p[0] - q[0]];
                    hp.push(HalfPlane::new(n[0], n[1], n[0] * p[0] + n[1] * p[1]));
                }
            }
        }
        let mut hp_full = hp;
        hp_full.extend([
            HalfPlane::new(-1.0, 0.0, 0.0),
            HalfPlane::new(0.0, -1.0, 0.0),
            HalfPlane::new(1.0, 0.0, BOX_MAX),
            HalfPlane::new(0.0, 1.0, BOX_MAX),
        ]);
        Self {
            halfplanes: hp_full,
            vertices: hull,
        }
    }

    pub fn halfplanes(&self) -> &[HalfPlane] {
        &self.halfplanes
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices)
    }

    pub fn contains_point(&self, p: [f64; 2], tol: f64) -> bool {
        !self.is_empty() && self.halfplanes.iter().all(|h| h.violation(p) <= tol)
    }

    /// Largest violation of any half-plane at `p`.
    pub fn violation(&self, p: [f64; 2]) -> f64 {
        self.halfplanes.iter().map(|h| h.violation(p)).fold(0.0, f64::max)
    }

    pub fn vertices_csv(&self) -> String {
        let mut s = String::from("R1,R2\n");
        for v in &self.vertices {
            s.push_str(&format!("{},{}\n", v[0], v[1]));
        }
        s
    }
}

/// Counter-clockwise vertex list; errors on an empty region.
pub fn vertices_2d(region: &NumericRegion2D) -> Result<&[[f64; 2]], PolyError> {
    if region.vertices.is_empty() {
        Err(PolyError::EmptyRegion)
    } else {
        Ok(&region.vertices)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Containment {
    pub holds: bool,
    pub max_violation: f64,
}

/// Checks every vertex of `inner` against the half-planes of `outer`.
pub fn contains(outer: &NumericRegion2D, inner: &NumericRegion2D) -> Containment {
    if inner.is_empty() {
        return Containment { holds: true, max_violation: 0.0 };
    }
    if outer.is_empty() {
        return Containment { holds: false, max_violation: f64::INFINITY };
    }
    let v = inner.vertices.iter().map(|&p| outer.violation(p)).fold(0.0, f64::max);
    Containment {
        holds: v <= FEAS_TOL,
        max_violation: v,
    }
}

pub enum HullInput<'a> {
    Region(&'a NumericRegion2D),
    /// Achievable rate points; each also brings its down-closure.
    Points(&'a [[f64; 2]]),
}

/// Time-sharing closure of a family of regions and rate points.
pub fn convex_hull_union(inputs: &[HullInput<'_>]) -> NumericRegion2D {
    let mut pts = Vec::new();
    for i in inputs {
        match i {
            HullInput::Region(r) => pts.extend_from_slice(&r.vertices),
            HullInput::Points(ps) => {
                for &p in ps.iter() {
                    pts.extend([p, [p[0], 0.0], [0.0, p[1]], [0.0, 0.0]]);
                }
            }
        }
    }
    NumericRegion2D::from_polygon(&pts)
}

/// Ordered boundary points of a 2D rate region, R1 increasing.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RateCurve2D {
    pub points: Vec<[f64; 2]>,
}

impl RateCurve2D {
    /// Pareto staircase of a cloud of achievable points.
    pub fn staircase(points: &[[f64; 2]]) -> Self {
        let mut pts: Vec<[f64; 2]> = points.iter().copied().filter(|p| p[0].is_finite() && p[1].is_finite()).collect();
        pts.sort_by(|a, b| b[0].total_cmp(&a[0]).then(b[1].total_cmp(&a[1])));
        let mut out: Vec<[f64; 2]> = Vec::new();
        let mut best = f64::NEG_INFINITY;
        for p in pts {
            if p[1] > best {
                best = p[1];
                out.push(p);
            }
        }
        out.reverse();
        Self { points: out }
    }

    /// Upper-right boundary of the convex hull of the down-closure.
    pub fn hull(&self) -> Self {
        let region = convex_hull_union(&[HullInput::Points(&self.points)]);
        let mut v: Vec<[f64; 2]> = region
            .vertices
            .iter()
            .copied()
            .filter(|p| p[0] > 0.0 || p[1] > 0.0)
            .collect();
        v.sort_by(|a, b| a[0].total_cmp(&b[0]).then(b[1].total_cmp(&a[1])));
        let mut out: Vec<[f64; 2]> = Vec::new();
        for p in v {
            while let Some(q) = out.last() {
                if q[1] <= p[1] && q[0] <= p[0] {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(p);
        }
        if let Some(&first) = out.first() {
            if first[0] > 0.0 {
                out.insert(0, [0.0, first[1]]);
            }
        }
        if let Some(&last) = out.last() {
            if last[1] > 0.0 {
                out.push([last[0], 0.0]);
            }
        }
        Self { points: out }
    }

    /// Convex region of the time-shared down-closure.
    pub fn hull_region(&self) -> NumericRegion2D {
        convex_hull_union(&[HullInput::Points(&self.points)])
    }

    /// Largest R2 in the staircase union of rectangles at a given R1.
    pub fn staircase_r2_at(&self, r1: f64) -> f64 {
        self.points
            .iter()
            .filter(|p| p[0] >= r1)
            .map(|p| p[1])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_r1(&self) -> f64 {
        self.points.iter().map(|p| p[0]).fold(0.0, f64::max)
    }

    pub fn max_r2(&self) -> f64 {
        self.points.iter().map(|p| p[1]).fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("R1,R2\n");
        for p in &self.points {
            s.push_str(&format!("{},{}\n", p[0], p[1]));
        }
        s
    }
}
