use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::PolyError;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational, PolyError> {
    let bad = || PolyError::Parse(format!("bad rational {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

/// Sort key placing time-sharing first, then auxiliaries, input and outputs.
fn var_rank(v: &str) -> (u8, String, u64) {
    let (head, digits) = v.split_at(v.find(|c: char| c.is_ascii_digit()).unwrap_or(v.len()));
    let class = match head {
        "Q" => 0,
        "U" => 1,
        "V" => 2,
        "W" => 3,
        "X" => 4,
        "Y" => 5,
        "Z" => 6,
        _ => 7,
    };
    (class, head.to_string(), digits.parse().unwrap_or(0))
}

pub(crate) fn cmp_vars(a: &str, b: &str) -> Ordering {
    var_rank(a).cmp(&var_rank(b)).then_with(|| a.cmp(b))
}

fn canon_set(mut v: Vec<String>) -> Vec<String> {
    v.sort_by(|a, b| cmp_vars(a, b));
    v.dedup();
    v
}

fn cmp_sets(a: &[String], b: &[String]) -> Ordering {
    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
        match cmp_vars(x, y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Splits "QUY1" into ["Q", "U", "Y1"]. Variables are an uppercase letter
/// followed by optional digits.
pub fn split_vars(s: &str) -> Result<Vec<String>, PolyError> {
    let mut out: Vec<String> = Vec::new();
    for c in s.chars().filter(|c| !c.is_whitespace() && *c != ',') {
        if c.is_ascii_uppercase() {
            out.push(c.to_string());
        } else if c.is_ascii_digit() && !out.is_empty() {
            out.last_mut().unwrap().push(c);
        } else {
            return Err(PolyError::Parse(format!("bad variable list {s:?}")));
        }
    }
    if out.is_empty() {
        return Err(PolyError::Parse(format!("empty variable list in {s:?}")));
    }
    Ok(out)
}

/// A named information quantity: `I(A;B|C)` or `H(A|C)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum InfoAtom {
    Mi {
        a: Vec<String>,
        b: Vec<String>,
        given: Vec<String>,
    },
    Entropy {
        a: Vec<String>,
        given: Vec<String>,
    },
}

impl InfoAtom {
    pub fn mi(a: &[&str], b: &[&str], given: &[&str]) -> Result<Self, PolyError> {
        let own = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        Self::canonical_mi(own(a), own(b), own(given))
    }

    pub fn entropy(a: &[&str], given: &[&str]) -> Result<Self, PolyError> {
        let own = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        Self::canonical_entropy(own(a), own(given))
    }

    fn canonical_mi(a: Vec<String>, b: Vec<String>, given: Vec<String>) -> Result<Self, PolyError> {
        let given = canon_set(given);
        let strip = |v: Vec<String>| canon_set(v.into_iter().filter(|x| !given.contains(x)).collect());
        let (a, b) = (strip(a), strip(b));
        if a.is_empty() || b.is_empty() {
            return Err(PolyError::Parse("mutual information with an empty side".into()));
        }
        let (a, b) = if cmp_sets(&a, &b) == Ordering::Greater { (b, a) } else { (a, b) };
        Ok(Self::Mi { a, b, given })
    }

    fn canonical_entropy(a: Vec<String>, given: Vec<String>) -> Result<Self, PolyError> {
        let given = canon_set(given);
        let a = canon_set(a.into_iter().filter(|x| !given.contains(x)).collect());
        if a.is_empty() {
            return Err(PolyError::Parse("entropy of an empty set".into()));
        }
        Ok(Self::Entropy { a, given })
    }

    pub fn variables(&self) -> Vec<String> {
        let all: Vec<String> = match self {
            Self::Mi { a, b, given } => a.iter().chain(b).chain(given).cloned().collect(),
            Self::Entropy { a, given } => a.iter().chain(given).cloned().collect(),
        };
        canon_set(all)
    }

    /// Rewrites each variable into a set of variables. Overlapping sides are
    /// split as `I(A;B|C) = H(S|C) + I(A\\S;B\\S|CS)` with `S = A ∩ B`;
    /// degenerate pieces vanish.
    pub fn substitute_vars(&self, map: &BTreeMap<String, Vec<String>>) -> InfoExpr {
        let image = |v: &[String]| -> Vec<String> {
            canon_set(v.iter().flat_map(|x| map.get(x).cloned().unwrap_or_else(|| vec![x.clone()])).collect())
        };
        let mut out = InfoExpr::zero();
        match self {
            Self::Mi { a, b, given } => {
                let c = image(given);
                let a: Vec<String> = image(a).into_iter().filter(|x| !c.contains(x)).collect();
                let b: Vec<String> = image(b).into_iter().filter(|x| !c.contains(x)).collect();
                let common: Vec<String> = a.iter().filter(|x| b.contains(x)).cloned().collect();
                if let Ok(h) = Self::canonical_entropy(common.clone(), c.clone()) {
                    out.add_term(h, Rational::one());
                }
                let a_rest = a.into_iter().filter(|x| !common.contains(x)).collect();
                let b_rest = b.into_iter().filter(|x| !common.contains(x)).collect();
                let cs = c.into_iter().chain(common).collect();
                if let Ok(m) = Self::canonical_mi(a_rest, b_rest, cs) {
                    out.add_term(m, Rational::one());
                }
            }
            Self::Entropy { a, given } => {
                if let Ok(h) = Self::canonical_entropy(image(a), image(given)) {
                    out.add_term(h, Rational::one());
                }
            }
        }
        out
    }

    pub fn name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for InfoAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (head, body, given) = match self {
            Self::Mi { a, b, given } => ("I", format!("{};{}", a.concat(), b.concat()), given),
            Self::Entropy { a, given } => ("H", a.concat(), given),
        };
        if given.is_empty() {
            write!(f, "{head}({body})")
        } else {
            write!(f, "{head}({body}|{})", given.concat())
        }
    }
}

impl FromStr for InfoAtom {
    type Err = PolyError;
    fn from_str(s: &str) -> Result<Self, PolyError> {
        let s = s.trim();
        let bad = || PolyError::Parse(format!("bad atom {s:?}"));
        let inner = s
            .get(2..s.len().saturating_sub(1))
            .filter(|_| s.ends_with(')') && s.get(1..2) == Some("("))
            .ok_or_else(bad)?;
        let (body, given) = match inner.split_once('|') {
            Some((b, g)) => (b, split_vars(g)?),
            None => (inner, Vec::new()),
        };
        match &s[..1] {
            "I" => {
                let (a, b) = body.split_once(';').ok_or_else(bad)?;
                Self::canonical_mi(split_vars(a)?, split_vars(b)?, given)
            }
            "H" => Self::canonical_entropy(split_vars(body)?, given),
            _ => Err(bad()),
        }
    }
}

impl Ord for InfoAtom {
    fn cmp(&self, other: &Self) -> Ordering {
        let key = |a: &InfoAtom| -> (u8, Vec<String>) {
            match a {
                InfoAtom::Mi { a, b, given } => (0, [a.clone(), vec![";".into()], b.clone(), vec!["|".into()], given.clone()].concat()),
                InfoAtom::Entropy { a, given } => (1, [a.clone(), vec!["|".into()], given.clone()].concat()),
            }
        };
        let (ka, kb) = (key(self), key(other));
        ka.0.cmp(&kb.0).then_with(|| {
            for (x, y) in ka.1.iter().zip(&kb.1) {
                match cmp_vars(x, y) {
                    Ordering::Equal => {}
                    o => return o,
                }
            }
            ka.1.len().cmp(&kb.1.len())
        })
    }
}

impl PartialOrd for InfoAtom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exact rational combination of atoms plus a constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct InfoExpr {
    terms: BTreeMap<InfoAtom, Rational>,
    constant: Rational,
}

impl InfoExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self {
            terms: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn atom(a: InfoAtom) -> Self {
        let mut e = Self::zero();
        e.add_term(a, Rational::one());
        e
    }

    pub fn terms(&self) -> &BTreeMap<InfoAtom, Rational> {
        &self.terms
    }

    pub fn constant_part(&self) -> &Rational {
        &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, a: InfoAtom, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(a.clone()).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&a);
        }
    }

    pub fn add_constant(&mut self, c: &Rational) {
        self.constant += c;
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_term(a.clone(), c.clone());
        }
        out.constant += &other.constant;
        out
    }

    pub fn scaled(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(a, c)| (a.clone(), c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    pub fn eval(&self, values: &BTreeMap<InfoAtom, f64>) -> Result<f64, PolyError> {
        let mut s = rat_to_f64(&self.constant);
        for (a, c) in &self.terms {
            let v = values.get(a).ok_or_else(|| PolyError::MissingAtom(a.to_string()))?;
            s += rat_to_f64(c) * v;
        }
        Ok(s)
    }

    pub(crate) fn is_nonnegative_constant(&self) -> bool {
        self.terms.is_empty() && !self.constant.is_negative()
    }
}

impl fmt::Display for InfoExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (a, c) in &self.terms {
            write_term(f, c, &a.to_string(), &mut first)?;
        }
        if !self.constant.is_zero() || first {
            write_term(f, &self.constant, "", &mut first)?;
        }
        Ok(())
    }
}

pub(crate) fn write_term(f: &mut fmt::Formatter<'_>, c: &Rational, name: &str, first: &mut bool) -> fmt::Result {
    let neg = c.is_negative();
    if !*first {
        f.write_str(if neg { " - " } else { " + " })?;
    } else if neg {
        f.write_str("-")?;
    }
    *first = false;
    let m = c.abs();
    if name.is_empty() {
        write!(f, "{m}")
    } else if m.is_one() {
        f.write_str(name)
    } else {
        write!(f, "{m} {name}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_canonicalize() {
        let a: InfoAtom = "I(V;ZU|Q)".parse().unwrap();
        let b: InfoAtom = "I(UZ;V|Q)".parse().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "I(V;UZ|Q)");
        let c: InfoAtom = "I(Y1;UQ)".parse().unwrap();
        assert_eq!(c.to_string(), "I(QU;Y1)");
        let d: InfoAtom = "I(QU;Y1|Q)".parse().unwrap();
        assert_eq!(d.to_string(), "I(U;Y1|Q)");
        assert_eq!("H(X|Q)".parse::<InfoAtom>().unwrap().to_string(), "H(X|Q)");
        assert!("I(Q;Q|Q)".parse::<InfoAtom>().is_err());
        assert!("I(Q,Y)".parse::<InfoAtom>().is_err());
    }

    #[test]
    fn variable_substitution() {
        let map: BTreeMap<String, Vec<String>> = [
            ("U1".to_string(), vec!["Q".to_string()]),
            ("U2".to_string(), vec!["X".to_string()]),
            ("V".to_string(), vec!["X".to_string()]),
        ]
        .into();
        let sub = |s: &str| s.parse::<InfoAtom>().unwrap().substitute_vars(&map).to_string();
        assert_eq!(sub("I(U1;Y1|Q)"), "0");
        assert_eq!(sub("I(QU1;Y1)"), "I(Q;Y1)");
        assert_eq!(sub("I(U2;V|Q)"), "H(X|Q)");
        assert_eq!(sub("I(U1U2;V|Q)"), "H(X|Q)");
        assert_eq!(sub("I(U1;U2|Q)"), "0");
        assert_eq!(sub("I(U2V;Y2|Q)"), "I(X;Y2|Q)");
    }

    #[test]
    fn expr_arithmetic_is_exact() {
        let a: InfoAtom = "I(U;Y1|Q)".parse().unwrap();
        let mut e = InfoExpr::atom(a.clone());
        e.add_term(a.clone(), rat(-1, 3));
        assert_eq!(e.terms()[&a], rat(2, 3));
        let s = e.scaled(&rat(3, 2));
        assert_eq!(s.terms()[&a], rat_int(1));
        e.add_term(a, rat(-2, 3));
        assert!(e.is_constant());
    }

    #[test]
    fn rational_text_roundtrip() {
        let r = rat(-6, 4);
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(parse_rational("-3/2").unwrap(), r);
        assert_eq!(parse_rational("5").unwrap(), rat_int(5));
        assert!(parse_rational("1/0").is_err());
    }
}
