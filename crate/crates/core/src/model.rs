//! Small discrete Bayesian networks with random conditional tables.
//!
//! Sampling a network gives a joint law whose entropies are automatically
//! Shannon-consistent, which is what symbolic region tests need.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::info::{InfoError, JointDist};

/// One variable of a [`NetworkSpec`]. Parents must appear earlier in the list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub name: String,
    pub card: usize,
    #[serde(default)]
    pub parents: Vec<String>,
    /// Deterministic copy of another variable; `card` and `parents` are ignored.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub copy_of: Option<String>,
}

impl NodeSpec {
    pub fn random(name: &str, card: usize, parents: &[&str]) -> Self {
        Self {
            name: name.into(),
            card,
            parents: parents.iter().map(|s| s.to_string()).collect(),
            copy_of: None,
        }
    }

    pub fn copy(name: &str, source: &str) -> Self {
        Self {
            name: name.into(),
            card: 0,
            parents: Vec::new(),
            copy_of: Some(source.into()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub nodes: Vec<NodeSpec>,
}

/// A sampled joint law with named axes.
#[derive(Debug, Clone)]
pub struct Network {
    joint: JointDist,
    axes: BTreeMap<String, usize>,
}

impl NetworkSpec {
    pub fn new(nodes: Vec<NodeSpec>) -> Result<Self, InfoError> {
        let spec = Self { nodes };
        spec.resolve()?;
        Ok(spec)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.name.as_str())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.nodes.iter().any(|n| n.name == name)
    }

    fn resolve(&self) -> Result<Vec<(usize, Vec<usize>, Option<usize>)>, InfoError> {
        let mut out: Vec<(usize, Vec<usize>, Option<usize>)> = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let find = |s: &str| {
                self.nodes[..i]
                    .iter()
                    .position(|m| m.name == s)
                    .ok_or_else(|| InfoError::Dimension(format!("{}: unknown or later parent {s}", n.name)))
            };
            if self.nodes[..i].iter().any(|m| m.name == n.name) {
                return Err(InfoError::Dimension(format!("duplicate variable {}", n.name)));
            }
            match &n.copy_of {
                Some(src) => {
                    let k = find(src)?;
                    out.push((out[k].0, Vec::new(), Some(k)));
                }
                None => {
                    if n.card == 0 {
                        return Err(InfoError::Empty);
                    }
                    let ps = n.parents.iter().map(|p| find(p)).collect::<Result<_, _>>()?;
                    out.push((n.card, ps, None));
                }
            }
        }
        Ok(out)
    }

    /// Draws every conditional table uniformly from the simplex.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Result<Network, InfoError> {
        let nodes = self.resolve()?;
        let cards: Vec<usize> = nodes.iter().map(|n| n.0).collect();
        let cpts: Vec<Vec<f64>> = nodes
            .iter()
            .map(|(card, parents, copy)| {
                if copy.is_some() {
                    return Vec::new();
                }
                let rows: usize = parents.iter().map(|&p| cards[p]).product();
                let mut t = Vec::with_capacity(rows * card);
                for _ in 0..rows {
                    let w: Vec<f64> = (0..*card).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
                    let s: f64 = w.iter().sum();
                    t.extend(w.iter().map(|v| v / s));
                }
                t
            })
            .collect();

        let total: usize = cards.iter().product();
        let mut data = vec![0.0; total];
        let mut idx = vec![0usize; cards.len()];
        for cell in data.iter_mut() {
            let mut p = 1.0;
            for (k, (card, parents, copy)) in nodes.iter().enumerate() {
                if let Some(src) = copy {
                    if idx[k] != idx[*src] {
                        p = 0.0;
                        break;
                    }
                    continue;
                }
                let mut row = 0;
                for &q in parents {
                    row = row * cards[q] + idx[q];
                }
                p *= cpts[k][row * card + idx[k]];
            }
            *cell = p;
            for d in (0..cards.len()).rev() {
                idx[d] += 1;
                if idx[d] < cards[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
        let s: f64 = data.iter().sum();
        data.iter_mut().for_each(|v| *v /= s);
        let labels: Vec<String> = self.nodes.iter().map(|n| n.name.clone()).collect();
        let axes = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
        Ok(Network {
            joint: JointDist::new(cards, data, labels)?,
            axes,
        })
    }
}

impl Network {
    pub fn joint(&self) -> &JointDist {
        &self.joint
    }

    fn axes_of(&self, names: &[String]) -> Result<Vec<usize>, InfoError> {
        names
            .iter()
            .map(|n| {
                self.axes
                    .get(n)
                    .copied()
                    .ok_or_else(|| InfoError::Dimension(format!("variable {n} not in model")))
            })
            .collect()
    }

    pub fn entropy(&self, a: &[String], given: &[String]) -> Result<f64, InfoError> {
        let a = self.axes_of(a)?;
        let c = self.axes_of(given)?;
        let ac: Vec<usize> = a.iter().chain(&c).copied().collect();
        Ok((self.joint.entropy_of(&ac) - self.joint.entropy_of(&c)).max(0.0))
    }

    pub fn mutual_information(&self, a: &[String], b: &[String], given: &[String]) -> Result<f64, InfoError> {
        Ok(self
            .joint
            .mi_sets(&self.axes_of(a)?, &self.axes_of(b)?, &self.axes_of(given)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn markov_chain_respected() {
        let spec = NetworkSpec::new(vec![
            NodeSpec::random("Q", 2, &[]),
            NodeSpec::random("X", 2, &["Q"]),
            NodeSpec::random("Y", 3, &["X"]),
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = spec.sample(&mut rng).unwrap();
            assert!(n.mutual_information(&s(&["Q"]), &s(&["Y"]), &s(&["X"])).unwrap() < 1e-12);
            let iqy = n.mutual_information(&s(&["Q"]), &s(&["Y"]), &[]).unwrap();
            let ixy = n.mutual_information(&s(&["X"]), &s(&["Y"]), &[]).unwrap();
            assert!(iqy <= ixy + 1e-12);
        }
    }

    #[test]
    fn copies_are_deterministic() {
        let spec = NetworkSpec::new(vec![
            NodeSpec::random("Q", 3, &[]),
            NodeSpec::copy("U", "Q"),
        ])
        .unwrap();
        let n = spec.sample(&mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(n.entropy(&s(&["U"]), &s(&["Q"])).unwrap() < 1e-12);
        let h = n.entropy(&s(&["Q"]), &[]).unwrap();
        assert!((n.mutual_information(&s(&["Q"]), &s(&["U"]), &[]).unwrap() - h).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_order() {
        assert!(NetworkSpec::new(vec![NodeSpec::random("X", 2, &["Q"]), NodeSpec::random("Q", 2, &[])]).is_err());
        assert!(NetworkSpec::new(vec![NodeSpec::random("X", 2, &[]), NodeSpec::random("X", 2, &[])]).is_err());
    }
}
