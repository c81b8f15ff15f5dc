//! Discrete probability and information primitives.
//!
//! All logarithms are base 2 and `0 log 0 = 0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Normalization tolerance for every probability table.
pub const PMF_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InfoError {
    #[error("{what} = {value} outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("negative probability {0}")]
    Negative(f64),
    #[error("probabilities sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("empty distribution")]
    Empty,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

fn check_unit(what: &'static str, x: f64) -> Result<(), InfoError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(InfoError::Domain {
            what,
            value: x,
            lo: 0.0,
            hi: 1.0,
        })
    }
}

/// `-x log2 x`, zero at zero.
#[inline]
pub fn plogp(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Binary entropy without the domain check. Arguments are clamped to [0, 1].
#[inline]
pub fn h2(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    plogp(x) + plogp(1.0 - x)
}

/// Binary convolution `x(1-y) + (1-x)y` without the domain check.
#[inline]
pub fn conv(x: f64, y: f64) -> f64 {
    x * (1.0 - y) + (1.0 - x) * y
}

pub fn binary_entropy(x: f64) -> Result<f64, InfoError> {
    check_unit("x", x)?;
    Ok(h2(x))
}

pub fn binary_convolve(x: f64, y: f64) -> Result<f64, InfoError> {
    check_unit("x", x)?;
    check_unit("y", y)?;
    Ok(conv(x, y))
}

/// Inverse of `h2` on [0, 1/2].
pub fn h2_inverse(h: f64) -> Result<f64, InfoError> {
    check_unit("h", h)?;
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h2(mid) < h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn validate_probs(probs: &[f64]) -> Result<(), InfoError> {
    if probs.is_empty() {
        return Err(InfoError::Empty);
    }
    if let Some(&bad) = probs.iter().find(|p| !(**p >= 0.0) || **p > 1.0 + PMF_TOL) {
        return Err(InfoError::Negative(bad));
    }
    let s: f64 = probs.iter().sum();
    if (s - 1.0).abs() > PMF_TOL {
        return Err(InfoError::NotNormalized(s));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Pmf {
    probs: Vec<f64>,
}

impl TryFrom<Vec<f64>> for Pmf {
    type Error = InfoError;
    fn try_from(v: Vec<f64>) -> Result<Self, InfoError> {
        Pmf::new(v)
    }
}

impl From<Pmf> for Vec<f64> {
    fn from(p: Pmf) -> Self {
        p.probs
    }
}

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Self, InfoError> {
        validate_probs(&probs)?;
        Ok(Self { probs })
    }

    /// Rescales nonnegative weights to unit mass.
    pub fn normalized(weights: Vec<f64>) -> Result<Self, InfoError> {
        if weights.is_empty() {
            return Err(InfoError::Empty);
        }
        if let Some(&bad) = weights.iter().find(|w| !(**w >= 0.0)) {
            return Err(InfoError::Negative(bad));
        }
        let s: f64 = weights.iter().sum();
        if !(s > 0.0) || !s.is_finite() {
            return Err(InfoError::NotNormalized(s));
        }
        Ok(Self {
            probs: weights.into_iter().map(|w| w / s).collect(),
        })
    }

    pub fn uniform(n: usize) -> Result<Self, InfoError> {
        if n == 0 {
            return Err(InfoError::Empty);
        }
        Ok(Self {
            probs: vec![1.0 / n as f64; n],
        })
    }

    pub fn bernoulli(p1: f64) -> Result<Self, InfoError> {
        check_unit("p", p1)?;
        Ok(Self {
            probs: vec![1.0 - p1, p1],
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn entropy(&self) -> f64 {
        self.probs.iter().map(|&p| plogp(p)).sum()
    }
}

/// Row-major probability table over a product of finite alphabets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableJson", into = "TableJson")]
pub struct JointDist {
    shape: Vec<usize>,
    data: Vec<f64>,
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    shape: Vec<usize>,
    data: Vec<f64>,
    labels: Vec<String>,
}

impl TryFrom<TableJson> for JointDist {
    type Error = InfoError;
    fn try_from(t: TableJson) -> Result<Self, InfoError> {
        JointDist::new(t.shape, t.data, t.labels)
    }
}

impl From<JointDist> for TableJson {
    fn from(j: JointDist) -> Self {
        TableJson {
            shape: j.shape,
            data: j.data,
            labels: j.labels,
        }
    }
}

impl JointDist {
    pub fn new(shape: Vec<usize>, data: Vec<f64>, labels: Vec<String>) -> Result<Self, InfoError> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(InfoError::Empty);
        }
        let n: usize = shape.iter().product();
        if n != data.len() {
            return Err(InfoError::Dimension(format!(
                "shape {shape:?} needs {n} entries, got {}",
                data.len()
            )));
        }
        let labels = if labels.is_empty() {
            (0..shape.len()).map(|i| format!("A{i}")).collect()
        } else {
            labels
        };
        if labels.len() != shape.len() {
            return Err(InfoError::Dimension(format!(
                "{} labels for {} axes",
                labels.len(),
                shape.len()
            )));
        }
        validate_probs(&data)?;
        Ok(Self {
            shape,
            data,
            labels,
        })
    }

    /// Product of independent marginals, axes in argument order.
    pub fn product(marginals: &[&Pmf]) -> Result<Self, InfoError> {
        let mut data = vec![1.0];
        for m in marginals {
            data = data
                .iter()
                .flat_map(|&a| m.probs().iter().map(move |&b| a * b))
                .collect();
        }
        let shape = marginals.iter().map(|m| m.len()).collect();
        Self::new(shape, data, Vec::new())
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    /// Sums out every axis not in `axes`; result axes follow the order of `axes`.
    pub fn marginal(&self, axes: &[usize]) -> Result<JointDist, InfoError> {
        if axes.is_empty() {
            return Err(InfoError::Dimension("no axes kept".into()));
        }
        for (i, &a) in axes.iter().enumerate() {
            if a >= self.rank() || axes[..i].contains(&a) {
                return Err(InfoError::Dimension(format!("bad axis list {axes:?}")));
            }
        }
        let shape: Vec<usize> = axes.iter().map(|&a| self.shape[a]).collect();
        let out = self.sum_onto(axes);
        Ok(JointDist {
            shape,
            data: out,
            labels: axes.iter().map(|&a| self.labels[a].clone()).collect(),
        })
    }

    fn sum_onto(&self, axes: &[usize]) -> Vec<f64> {
        let kept: Vec<usize> = axes.iter().map(|&a| self.shape[a]).collect();
        let mut out = vec![0.0; kept.iter().product()];
        let mut idx = vec![0usize; self.rank()];
        for &v in &self.data {
            let mut k = 0;
            for &a in axes {
                k = k * self.shape[a] + idx[a];
            }
            out[k] += v;
            for d in (0..self.rank()).rev() {
                idx[d] += 1;
                if idx[d] < self.shape[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
        out
    }

    pub fn entropy(&self) -> f64 {
        self.data.iter().map(|&p| plogp(p)).sum()
    }

    /// Joint entropy of a subset of axes; the empty subset has entropy 0.
    pub fn entropy_of(&self, axes: &[usize]) -> f64 {
        if axes.is_empty() {
            return 0.0;
        }
        let mut sorted = axes.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        self.sum_onto(&sorted).iter().map(|&p| plogp(p)).sum()
    }

    /// `I(A;B|C)` for disjoint axis sets, as `H(AC)+H(BC)-H(ABC)-H(C)`, clipped at 0.
    pub fn mi_sets(&self, a: &[usize], b: &[usize], c: &[usize]) -> f64 {
        let cat = |x: &[usize], y: &[usize]| -> Vec<usize> { x.iter().chain(y).copied().collect() };
        let ac = cat(a, c);
        let bc = cat(b, c);
        let abc = cat(&ac, b);
        let v = self.entropy_of(&ac) + self.entropy_of(&bc) - self.entropy_of(&abc) - self.entropy_of(c);
        v.max(0.0)
    }
}

pub fn mutual_information(joint: &JointDist) -> Result<f64, InfoError> {
    if joint.rank() != 2 {
        return Err(InfoError::Dimension(format!("expected 2 axes, got {}", joint.rank())));
    }
    Ok(joint.mi_sets(&[0], &[1], &[]))
}

/// `I(A;B|Q)` for a table over Q×A×B.
pub fn conditional_mi(joint: &JointDist) -> Result<f64, InfoError> {
    if joint.rank() != 3 {
        return Err(InfoError::Dimension(format!("expected 3 axes, got {}", joint.rank())));
    }
    Ok(joint.mi_sets(&[1], &[2], &[0]))
}

/// Row-stochastic transition matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableJson", into = "TableJson")]
pub struct DMChannel {
    input_size: usize,
    output_size: usize,
    rows: Vec<f64>,
}

impl TryFrom<TableJson> for DMChannel {
    type Error = InfoError;
    fn try_from(t: TableJson) -> Result<Self, InfoError> {
        if t.shape.len() != 2 {
            return Err(InfoError::Dimension("channel shape must have 2 entries".into()));
        }
        let rows = t.data.chunks(t.shape[1].max(1)).map(|r| r.to_vec()).collect();
        DMChannel::new(rows)
    }
}

impl From<DMChannel> for TableJson {
    fn from(c: DMChannel) -> Self {
        TableJson {
            shape: vec![c.input_size, c.output_size],
            data: c.rows,
            labels: vec!["X".into(), "Y".into()],
        }
    }
}

impl DMChannel {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, InfoError> {
        let input_size = rows.len();
        if input_size == 0 {
            return Err(InfoError::Empty);
        }
        let output_size = rows[0].len();
        let mut flat = Vec::with_capacity(input_size * output_size);
        for r in &rows {
            if r.len() != output_size {
                return Err(InfoError::Dimension("ragged transition matrix".into()));
            }
            validate_probs(r)?;
            flat.extend_from_slice(r);
        }
        Ok(Self {
            input_size,
            output_size,
            rows: flat,
        })
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.rows[x * self.output_size..(x + 1) * self.output_size]
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.rows[x * self.output_size + y]
    }

    /// Joint law of (X, Y) for the given input law.
    pub fn joint_with(&self, input: &Pmf) -> Result<JointDist, InfoError> {
        if input.len() != self.input_size {
            return Err(InfoError::Dimension(format!(
                "input alphabet {} vs channel {}",
                input.len(),
                self.input_size
            )));
        }
        let mut data = Vec::with_capacity(self.input_size * self.output_size);
        for (x, &px) in input.probs().iter().enumerate() {
            data.extend(self.row(x).iter().map(|&w| px * w));
        }
        JointDist::new(
            vec![self.input_size, self.output_size],
            data,
            vec!["X".into(), "Y".into()],
        )
    }
}

pub fn make_bsc(p: f64) -> Result<DMChannel, InfoError> {
    if !(0.0..=0.5).contains(&p) {
        return Err(InfoError::Domain {
            what: "crossover",
            value: p,
            lo: 0.0,
            hi: 0.5,
        });
    }
    DMChannel::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
}

/// Outputs ordered (0, 1, erasure).
pub fn make_bec(e: f64) -> Result<DMChannel, InfoError> {
    check_unit("erasure", e)?;
    DMChannel::new(vec![vec![1.0 - e, 0.0, e], vec![0.0, 1.0 - e, e]])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChannelOrdering {
    #[serde(rename = "BSC-degraded-of-BEC")]
    BscDegradedOfBec,
    #[serde(rename = "BEC-less-noisy-BSC")]
    BecLessNoisyBsc,
    #[serde(rename = "BEC-more-capable-BSC")]
    BecMoreCapableBsc,
    #[serde(rename = "BSC-ess-less-noisy-BEC")]
    BscEssLessNoisyBec,
}

impl ChannelOrdering {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::BscDegradedOfBec => "BSC-degraded-of-BEC",
            Self::BecLessNoisyBsc => "BEC-less-noisy-BSC",
            Self::BecMoreCapableBsc => "BEC-more-capable-BSC",
            Self::BscEssLessNoisyBec => "BSC-ess-less-noisy-BEC",
        }
    }
}

impl std::fmt::Display for ChannelOrdering {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Ordering between BEC(e) and BSC(p) by erasure-probability thresholds.
pub fn classify_bec_bsc(e: f64, p: f64) -> Result<ChannelOrdering, InfoError> {
    check_unit("erasure", e)?;
    if !(0.0..=0.5).contains(&p) {
        return Err(InfoError::Domain {
            what: "crossover",
            value: p,
            lo: 0.0,
            hi: 0.5,
        });
    }
    Ok(if e <= 2.0 * p {
        ChannelOrdering::BscDegradedOfBec
    } else if e <= 4.0 * p * (1.0 - p) {
        ChannelOrdering::BecLessNoisyBsc
    } else if e <= h2(p) {
        ChannelOrdering::BecMoreCapableBsc
    } else {
        ChannelOrdering::BscEssLessNoisyBec
    })
}

/// Joint law over Q×X×Y of `p(q) p(x|q) W(y|x)`.
pub fn cascade(q: &Pmf, x_given_q: &[Pmf], channel: &DMChannel) -> Result<JointDist, InfoError> {
    if x_given_q.len() != q.len() {
        return Err(InfoError::Dimension(format!(
            "{} conditionals for |Q| = {}",
            x_given_q.len(),
            q.len()
        )));
    }
    let nx = channel.input_size();
    let ny = channel.output_size();
    let mut data = Vec::with_capacity(q.len() * nx * ny);
    for (pq, cond) in q.probs().iter().zip(x_given_q) {
        if cond.len() != nx {
            return Err(InfoError::Dimension(format!(
                "conditional over {} symbols, channel input {}",
                cond.len(),
                nx
            )));
        }
        for (x, &px) in cond.probs().iter().enumerate() {
            data.extend(channel.row(x).iter().map(|&w| pq * px * w));
        }
    }
    let total: f64 = data.iter().sum();
    if (total - 1.0).abs() <= PMF_TOL {
        // absorb rounding from the three-way product
        data.iter_mut().for_each(|v| *v /= total);
    }
    JointDist::new(
        vec![q.len(), nx, ny],
        data,
        vec!["Q".into(), "X".into(), "Y".into()],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn entropy_sum_cmi(t: &[f64; 8]) -> f64 {
        // independent oracle: sum over cells of p log p(q)p(qab)/(p(qa)p(qb))
        let at = |q: usize, a: usize, b: usize| t[q * 4 + a * 2 + b];
        let mut s = 0.0;
        for q in 0..2 {
            let pq: f64 = (0..4).map(|k| t[q * 4 + k]).sum();
            for a in 0..2 {
                for b in 0..2 {
                    let p = at(q, a, b);
                    if p <= 0.0 {
                        continue;
                    }
                    let pqa = at(q, a, 0) + at(q, a, 1);
                    let pqb = at(q, 0, b) + at(q, 1, b);
                    s += p * (p * pq / (pqa * pqb)).log2();
                }
            }
        }
        s
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        let direct = -0.1 * 0.1f64.log2() - 0.9 * 0.9f64.log2();
        assert!((binary_entropy(0.1).unwrap() - direct).abs() < 1e-15);
        assert!((binary_entropy(0.1).unwrap() - 0.468996).abs() < 1e-6);
        assert!(binary_entropy(1.2).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn convolution_values() {
        assert_eq!(binary_convolve(0.3, 0.5).unwrap(), 0.5);
        assert_eq!(binary_convolve(0.0, 0.37).unwrap(), 0.37);
        assert!((binary_convolve(0.1, 0.13).unwrap() - (0.1 * 0.87 + 0.9 * 0.13)).abs() < 1e-15);
        assert!((binary_convolve(0.1, 0.13).unwrap() - 0.204).abs() < 1e-12);
        assert!(binary_convolve(0.1, 1.5).is_err());
    }

    #[test]
    fn h2_inverse_roundtrip() {
        for &x in &[0.0, 0.01, 0.1, 0.3] {
            assert!((h2_inverse(h2(x)).unwrap() - x).abs() < 1e-12);
        }
        // h2 is flat at its maximum
        assert!((h2_inverse(1.0).unwrap() - 0.5).abs() < 1e-7);
    }

    #[test]
    fn pmf_rejects_bad_input() {
        assert!(Pmf::new(vec![]).is_err());
        assert!(Pmf::new(vec![0.5, 0.6]).is_err());
        assert!(Pmf::new(vec![-0.1, 1.1]).is_err());
        assert!(Pmf::new(vec![0.5, 0.5 + 1e-13]).is_ok());
        assert_eq!(Pmf::normalized(vec![1.0, 3.0]).unwrap().probs(), &[0.25, 0.75]);
    }

    #[test]
    fn mi_examples() {
        let u = Pmf::uniform(2).unwrap();
        let prod = JointDist::product(&[&u, &Pmf::new(vec![0.3, 0.7]).unwrap()]).unwrap();
        assert!(mutual_information(&prod).unwrap().abs() < 1e-15);
        let id = DMChannel::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((mutual_information(&id.joint_with(&u).unwrap()).unwrap() - 1.0).abs() < 1e-15);
        let bsc = make_bsc(0.1).unwrap();
        let mi = mutual_information(&bsc.joint_with(&u).unwrap()).unwrap();
        assert!((mi - (1.0 - h2(0.1))).abs() < 1e-12);
        assert!((mi - 0.531004).abs() < 1e-6);
    }

    #[test]
    fn conditional_mi_examples() {
        // Q independent of (A,B)
        let q = Pmf::new(vec![0.2, 0.8]).unwrap();
        let ab = make_bsc(0.2).unwrap().joint_with(&Pmf::new(vec![0.4, 0.6]).unwrap()).unwrap();
        let mut data = Vec::new();
        for &pq in q.probs() {
            data.extend(ab.data().iter().map(|v| pq * v));
        }
        let j = JointDist::new(vec![2, 2, 2], data, vec![]).unwrap();
        assert!((conditional_mi(&j).unwrap() - mutual_information(&ab).unwrap()).abs() < 1e-12);

        // A = Q, B a noisy function of A
        let w = make_bsc(0.3).unwrap();
        let mut data = vec![0.0; 8];
        for qv in 0..2 {
            for b in 0..2 {
                data[qv * 4 + qv * 2 + b] = q.probs()[qv] * w.prob(qv, b);
            }
        }
        let j = JointDist::new(vec![2, 2, 2], data, vec![]).unwrap();
        assert!(conditional_mi(&j).unwrap().abs() < 1e-12);
    }

    #[test]
    fn bsc_bec_constructors() {
        assert_eq!(make_bsc(0.0).unwrap().row(0), &[1.0, 0.0]);
        assert_eq!(make_bsc(0.0).unwrap().row(1), &[0.0, 1.0]);
        let b = make_bec(1.0).unwrap();
        assert_eq!(b.row(0), &[0.0, 0.0, 1.0]);
        assert_eq!(b.row(1), &[0.0, 0.0, 1.0]);
        assert!(make_bsc(0.6).is_err());
        assert!(make_bec(-0.1).is_err());
    }

    #[test]
    fn classification_table() {
        assert_eq!(classify_bec_bsc(0.15, 0.1).unwrap(), ChannelOrdering::BscDegradedOfBec);
        assert_eq!(classify_bec_bsc(0.2, 0.1).unwrap(), ChannelOrdering::BscDegradedOfBec);
        assert_eq!(classify_bec_bsc(0.5, 0.2).unwrap(), ChannelOrdering::BecLessNoisyBsc);
        assert_eq!(classify_bec_bsc(0.46, 0.1).unwrap(), ChannelOrdering::BecMoreCapableBsc);
        assert_eq!(classify_bec_bsc(0.9, 0.1).unwrap(), ChannelOrdering::BscEssLessNoisyBec);
        assert!(classify_bec_bsc(0.5, 0.7).is_err());
    }

    #[test]
    fn cascade_examples() {
        let q = Pmf::new(vec![0.3, 0.7]).unwrap();
        let det = [Pmf::new(vec![1.0, 0.0]).unwrap(), Pmf::new(vec![0.0, 1.0]).unwrap()];
        let id = DMChannel::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let j = cascade(&q, &det, &id).unwrap();
        let qy = j.marginal(&[0, 2]).unwrap();
        assert_eq!(qy.data(), &[0.3, 0.0, 0.0, 0.7]);

        let one = Pmf::new(vec![1.0]).unwrap();
        let px = Pmf::new(vec![0.25, 0.75]).unwrap();
        let bsc = make_bsc(0.1).unwrap();
        let j = cascade(&one, &[px.clone()], &bsc).unwrap();
        let direct = bsc.joint_with(&px).unwrap();
        for (a, b) in j.data().iter().zip(direct.data()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(cascade(&q, &det[..1], &id).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let c = make_bec(0.3).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"shape\":[2,3]"));
        let back: DMChannel = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        let j = c.joint_with(&Pmf::uniform(2).unwrap()).unwrap();
        let back: JointDist = serde_json::from_str(&serde_json::to_string(&j).unwrap()).unwrap();
        assert_eq!(back, j);
    }

    fn table8() -> impl Strategy<Value = [f64; 8]> {
        prop::array::uniform8(0.0f64..1.0).prop_filter_map("nonzero", |w| {
            let s: f64 = w.iter().sum();
            (s > 1e-3).then(|| w.map(|v| v / s))
        })
    }

    proptest! {
        #[test]
        fn convolve_symmetric_with_identity(x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
            prop_assert_eq!(binary_convolve(x, y).unwrap(), binary_convolve(y, x).unwrap());
            prop_assert!((binary_convolve(x, 0.0).unwrap() - x).abs() < 1e-15);
        }

        #[test]
        fn h2_midpoint_concave(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            prop_assert!(h2(0.5 * (a + b)) >= 0.5 * (h2(a) + h2(b)) - 1e-15);
        }

        #[test]
        fn cmi_matches_entropy_sum(t in table8()) {
            let s: f64 = t.iter().sum();
            let j = JointDist::new(vec![2, 2, 2], t.map(|v| v / s).to_vec(), vec![]).unwrap();
            let c = conditional_mi(&j).unwrap();
            prop_assert!(c >= 0.0);
            prop_assert!((c - entropy_sum_cmi(&t.map(|v| v / s))).abs() < 1e-12);
        }

        #[test]
        fn data_processing(w in prop::collection::vec(0.01f64..1.0, 4),
                           xs in prop::collection::vec(0.0f64..=1.0, 4)) {
            let q = Pmf::normalized(w).unwrap();
            let conds: Vec<Pmf> = xs.iter().map(|&x| Pmf::bernoulli(x).unwrap()).collect();
            let j = cascade(&q, &conds, &make_bsc(0.1).unwrap()).unwrap();
            let iqy = j.mi_sets(&[0], &[2], &[]);
            let ixy = j.mi_sets(&[1], &[2], &[]);
            prop_assert!(iqy <= ixy + 1e-12);
        }

        #[test]
        fn mi_nonnegative_zero_on_products(a in 0.0f64..=1.0, b in 0.0f64..=1.0, t in table8()) {
            let p = JointDist::product(&[&Pmf::bernoulli(a).unwrap(), &Pmf::bernoulli(b).unwrap()]).unwrap();
            prop_assert!(mutual_information(&p).unwrap() < 1e-12);
            let s: f64 = t[..4].iter().sum();
            if s > 1e-3 {
                let j = JointDist::new(vec![2, 2], t[..4].iter().map(|v| v / s).collect(), vec![]).unwrap();
                let mi = mutual_information(&j).unwrap();
                prop_assert!(mi >= 0.0);
                let pa = j.marginal(&[0]).unwrap();
                let pb = j.marginal(&[1]).unwrap();
                let dev = (0..4).map(|k| (j.data()[k] - pa.data()[k / 2] * pb.data()[k % 2]).abs()).fold(0.0, f64::max);
                if mi < 1e-14 { prop_assert!(dev < 1e-6); }
                if dev > 1e-3 { prop_assert!(mi > 0.0); }
            }
        }

        #[test]
        fn classify_left_closed(p in 0.01f64..0.5) {
            prop_assert_eq!(classify_bec_bsc(2.0 * p, p).unwrap(), ChannelOrdering::BscDegradedOfBec);
        }
    }
}
