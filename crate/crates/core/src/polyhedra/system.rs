use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::atom::{cmp_vars, format_rational, parse_rational, rat_to_f64, write_term, InfoAtom, InfoExpr, Rational};
use super::geometry::{vertices_nd, NumIneq, NumericSystem};
use super::PolyError;
use crate::model::{NetworkSpec, NodeSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
}

impl Relation {
    pub fn combine(self, other: Relation) -> Relation {
        if self == Relation::Lt || other == Relation::Lt {
            Relation::Lt
        } else {
            Relation::Le
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Lt => "<",
        }
    }
}

pub type LinForm = BTreeMap<String, Rational>;

/// `lhs rel rhs` with rate variables on the left and information terms on the right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinIneq {
    pub lhs: LinForm,
    pub rel: Relation,
    pub rhs: InfoExpr,
}

/// `0 rel rhs`: what is left of an inequality once every rate variable is gone.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Condition {
    pub rel: Relation,
    pub rhs: InfoExpr,
}

fn add_into(form: &mut LinForm, var: &str, c: Rational) {
    if c.is_zero() {
        return;
    }
    let e = form.entry(var.to_string()).or_insert_with(Rational::zero);
    *e += c;
    if e.is_zero() {
        form.remove(var);
    }
}

enum Checked {
    Ineq(LinIneq),
    Cond(Condition),
}

impl LinIneq {
    /// Parses e.g. `"T1 + T2 - R1 > I(U;V|Q)"`. Rate variables may appear on
    /// either side; `>=` and `>` are flipped into `<=` and `<`.
    pub fn parse(s: &str) -> Result<LinIneq, PolyError> {
        match Self::parse_any(s)? {
            Checked::Ineq(i) => Ok(i),
            Checked::Cond(_) => Err(PolyError::Parse(format!("no rate variable in {s:?}"))),
        }
    }

    fn parse_any(s: &str) -> Result<Checked, PolyError> {
        let ops = ["<=", ">=", "<", ">"];
        let (pos, op) = ops
            .iter()
            .filter_map(|op| s.find(op).map(|p| (p, *op)))
            .min_by_key(|(p, op)| (*p, usize::MAX - op.len()))
            .ok_or_else(|| PolyError::Parse(format!("no relation in {s:?}")))?;
        let (left, right) = (&s[..pos], &s[pos + op.len()..]);
        let (mut lf, le) = parse_side(left)?;
        let (rf, re) = parse_side(right)?;
        for (v, c) in rf {
            add_into(&mut lf, &v, -c);
        }
        let mut rhs = re.plus(&le.scaled(&-Rational::one()));
        let rel = match op {
            "<=" | ">=" => Relation::Le,
            _ => Relation::Lt,
        };
        if op.starts_with('>') {
            lf = lf.into_iter().map(|(v, c)| (v, -c)).collect();
            rhs = rhs.scaled(&-Rational::one());
        }
        Ok(if lf.is_empty() {
            Checked::Cond(Condition { rel, rhs })
        } else {
            Checked::Ineq(LinIneq { lhs: lf, rel, rhs })
        })
    }

    pub fn new(lhs: LinForm, rel: Relation, rhs: InfoExpr) -> Result<LinIneq, PolyError> {
        let lhs: LinForm = lhs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if lhs.is_empty() {
            return Err(PolyError::Parse("inequality without rate variables".into()));
        }
        Ok(LinIneq { lhs, rel, rhs })
    }

    pub fn coeff(&self, var: &str) -> Rational {
        self.lhs.get(var).cloned().unwrap_or_else(Rational::zero)
    }

    fn scaled(&self, k: &Rational) -> (LinForm, InfoExpr) {
        (
            self.lhs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
            self.rhs.scaled(k),
        )
    }

    /// Scales so the leading coefficient has magnitude one.
    fn normalized(mut self) -> LinIneq {
        let lead = self.lhs.values().next().map(|c| c.abs()).unwrap_or_else(Rational::one);
        if !lead.is_one() {
            let k = lead.recip();
            let (l, r) = self.scaled(&k);
            self.lhs = l;
            self.rhs = r;
        }
        self
    }
}

enum Tok {
    Num(Rational),
    Var(String),
    Atom(InfoAtom),
    Sign(bool),
}

fn tokenize(s: &str) -> Result<Vec<Tok>, PolyError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() || c == '*' {
            i += 1;
        } else if c == '+' || c == '-' {
            out.push(Tok::Sign(c == '-'));
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '/') {
                i += 1;
            }
            out.push(Tok::Num(parse_rational(&chars[start..i].iter().collect::<String>())?));
        } else if (c == 'I' || c == 'H') && chars.get(i + 1) == Some(&'(') {
            let end = chars[i..]
                .iter()
                .position(|&c| c == ')')
                .ok_or_else(|| PolyError::Parse(format!("unclosed atom in {s:?}")))?;
            out.push(Tok::Atom(chars[i..=i + end].iter().collect::<String>().parse()?));
            i += end + 1;
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Var(chars[start..i].iter().collect()));
        } else {
            return Err(PolyError::Parse(format!("unexpected {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

/// One side of a relation: rate-variable part and information part.
fn parse_side(s: &str) -> Result<(LinForm, InfoExpr), PolyError> {
    let mut form = LinForm::new();
    let mut expr = InfoExpr::zero();
    let mut negative = false;
    let mut coef: Option<Rational> = None;
    let signed = |neg: bool, c: Option<Rational>| {
        let c = c.unwrap_or_else(Rational::one);
        if neg {
            -c
        } else {
            c
        }
    };
    for t in tokenize(s)? {
        match t {
            Tok::Sign(neg) => {
                if let Some(c) = coef.take() {
                    expr.add_constant(&signed(negative, Some(c)));
                    negative = false;
                }
                negative ^= neg;
            }
            Tok::Num(c) => {
                if coef.is_some() {
                    return Err(PolyError::Parse(format!("two numbers in a row in {s:?}")));
                }
                coef = Some(c);
            }
            Tok::Var(v) => {
                add_into(&mut form, &v, signed(negative, coef.take()));
                negative = false;
            }
            Tok::Atom(a) => {
                expr.add_term(a, signed(negative, coef.take()));
                negative = false;
            }
        }
    }
    if let Some(c) = coef {
        expr.add_constant(&signed(negative, Some(c)));
    }
    Ok((form, expr))
}

impl fmt::Display for LinIneq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.lhs {
            write_term(f, c, v, &mut first)?;
        }
        write!(f, " {} {}", self.rel.symbol(), self.rhs)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0 {} {}", self.rel.symbol(), self.rhs)
    }
}

/// Affine image of an old rate variable in terms of new ones.
#[derive(Debug, Clone, Default)]
pub struct AffineForm {
    pub coeffs: LinForm,
    pub constant: Rational,
}

impl AffineForm {
    pub fn var(name: &str) -> Self {
        let mut coeffs = LinForm::new();
        coeffs.insert(name.into(), Rational::one());
        Self {
            coeffs,
            constant: Rational::zero(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self {
            coeffs: LinForm::new(),
            constant: c,
        }
    }

    /// Parses `"R0s + R01 + R02"` style right-hand sides.
    pub fn parse(s: &str) -> Result<Self, PolyError> {
        let (coeffs, e) = parse_side(s)?;
        if !e.is_constant() {
            return Err(PolyError::Parse(format!("information term in substitution {s:?}")));
        }
        Ok(Self {
            coeffs,
            constant: e.constant_part().clone(),
        })
    }
}

/// Maps old rate variables to affine forms over `new_vars`. Variables not
/// mapped are kept as they are.
#[derive(Debug, Clone, Default)]
pub struct Substitution {
    pub map: BTreeMap<String, AffineForm>,
    pub new_vars: Vec<String>,
}

impl Substitution {
    pub fn new(pairs: &[(&str, &str)], new_vars: &[&str]) -> Result<Self, PolyError> {
        let map = pairs
            .iter()
            .map(|(v, f)| Ok((v.to_string(), AffineForm::parse(f)?)))
            .collect::<Result<_, PolyError>>()?;
        Ok(Self {
            map,
            new_vars: new_vars.iter().map(|s| s.to_string()).collect(),
        })
    }
}

pub type Valuation = BTreeMap<InfoAtom, f64>;

/// Conjunction of linear inequalities over named rate variables.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSystem {
    rate_vars: Vec<String>,
    ineqs: Vec<LinIneq>,
    conditions: Vec<Condition>,
    model: Option<NetworkSpec>,
}

impl RegionSystem {
    pub fn new(rate_vars: Vec<String>, ineqs: Vec<LinIneq>) -> Result<Self, PolyError> {
        let sys = Self {
            rate_vars,
            ineqs,
            conditions: Vec::new(),
            model: None,
        };
        sys.check_vars()?;
        Ok(sys.tidy())
    }

    /// Builds a system from textual inequalities.
    pub fn parse(rate_vars: &[&str], lines: &[&str]) -> Result<Self, PolyError> {
        let mut ineqs = Vec::new();
        let mut conditions = Vec::new();
        for l in lines {
            match LinIneq::parse_any(l)? {
                Checked::Ineq(i) => ineqs.push(i),
                Checked::Cond(c) => conditions.push(c),
            }
        }
        let sys = Self {
            rate_vars: rate_vars.iter().map(|s| s.to_string()).collect(),
            ineqs,
            conditions,
            model: None,
        };
        sys.check_vars()?;
        Ok(sys.tidy())
    }

    fn check_vars(&self) -> Result<(), PolyError> {
        for i in &self.ineqs {
            if i.lhs.is_empty() {
                return Err(PolyError::Parse("inequality without rate variables".into()));
            }
            for v in i.lhs.keys() {
                if !self.rate_vars.contains(v) {
                    return Err(PolyError::UnknownVar(v.clone()));
                }
            }
        }
        Ok(())
    }

    pub fn with_model(mut self, model: NetworkSpec) -> Self {
        self.model = Some(model);
        self
    }

    pub fn rate_vars(&self) -> &[String] {
        &self.rate_vars
    }

    pub fn ineqs(&self) -> &[LinIneq] {
        &self.ineqs
    }

    pub fn conditions(&self) -> &[Condition] {
        &self.conditions
    }

    pub fn model(&self) -> Option<&NetworkSpec> {
        self.model.as_ref()
    }

    pub fn len(&self) -> usize {
        self.ineqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ineqs.is_empty()
    }

    pub fn atoms(&self) -> BTreeSet<InfoAtom> {
        self.ineqs
            .iter()
            .map(|i| &i.rhs)
            .chain(self.conditions.iter().map(|c| &c.rhs))
            .flat_map(|e| e.terms().keys().cloned())
            .collect()
    }

    /// Logical AND. Rate variables are merged in first-seen order.
    pub fn conjoin(&self, other: &RegionSystem) -> RegionSystem {
        let mut vars = self.rate_vars.clone();
        for v in &other.rate_vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        Self {
            rate_vars: vars,
            ineqs: self.ineqs.iter().chain(&other.ineqs).cloned().collect(),
            conditions: self.conditions.iter().chain(&other.conditions).cloned().collect(),
            model: self.model.clone().or_else(|| other.model.clone()),
        }
        .tidy()
    }

    /// Normalizes, removes duplicates (keeping the strict copy) and drops
    /// conditions that hold for every valuation because they are constant.
    fn tidy(mut self) -> Self {
        let mut seen: BTreeMap<(LinForm, InfoExpr), Relation> = BTreeMap::new();
        let mut order = Vec::new();
        for i in self.ineqs.drain(..) {
            let i = i.normalized();
            let key = (i.lhs.clone(), i.rhs.clone());
            match seen.get_mut(&key) {
                Some(r) => *r = r.combine(i.rel),
                None => {
                    seen.insert(key.clone(), i.rel);
                    order.push(key);
                }
            }
        }
        self.ineqs = order
            .into_iter()
            .map(|k| {
                let rel = seen[&k];
                LinIneq { lhs: k.0, rel, rhs: k.1 }
            })
            .collect();
        let mut cs: Vec<Condition> = Vec::new();
        for c in self.conditions.drain(..) {
            let trivially_true = c.rhs.is_constant()
                && match c.rel {
                    Relation::Le => c.rhs.is_nonnegative_constant(),
                    Relation::Lt => c.rhs.constant_part().is_positive(),
                };
            if !trivially_true && !cs.contains(&c) {
                cs.push(c);
            }
        }
        self.conditions = cs;
        self
    }

    /// Projects out one rate variable by pairing every upper bound with every
    /// lower bound.
    pub fn fme_eliminate(&self, var: &str) -> Result<RegionSystem, PolyError> {
        if !self.rate_vars.iter().any(|v| v == var) {
            return Err(PolyError::UnknownVar(var.into()));
        }
        let (mut upper, mut lower, mut keep) = (Vec::new(), Vec::new(), Vec::new());
        for i in &self.ineqs {
            let c = i.coeff(var);
            if c.is_positive() {
                upper.push((i, c));
            } else if c.is_negative() {
                lower.push((i, -c));
            } else {
                keep.push(i.clone());
            }
        }
        let mut conditions = self.conditions.clone();
        for (u, cu) in &upper {
            for (l, cl) in &lower {
                let (mut lhs, ru) = u.scaled(&cu.recip());
                let (ll, rl) = l.scaled(&cl.recip());
                for (v, c) in ll {
                    add_into(&mut lhs, &v, c);
                }
                lhs.remove(var);
                let rhs = ru.plus(&rl);
                let rel = u.rel.combine(l.rel);
                if lhs.is_empty() {
                    conditions.push(Condition { rel, rhs });
                } else {
                    keep.push(LinIneq { lhs, rel, rhs });
                }
            }
        }
        Ok(Self {
            rate_vars: self.rate_vars.iter().filter(|v| *v != var).cloned().collect(),
            ineqs: keep,
            conditions,
            model: self.model.clone(),
        }
        .tidy())
    }

    pub fn fme_eliminate_all<S: AsRef<str>>(&self, vars: &[S]) -> Result<RegionSystem, PolyError> {
        let mut s = self.clone();
        for v in vars {
            s = s.fme_eliminate(v.as_ref())?;
        }
        Ok(s)
    }

    /// Rewrites the system under an affine change of rate variables and adjoins
    /// the auxiliary constraints.
    pub fn substitute_rates(&self, sub: &Substitution, aux: &[LinIneq]) -> Result<RegionSystem, PolyError> {
        for v in sub.map.keys() {
            if !self.rate_vars.contains(v) {
                return Err(PolyError::UnknownVar(v.clone()));
            }
        }
        let mut vars: Vec<String> = self
            .rate_vars
            .iter()
            .filter(|v| !sub.map.contains_key(*v))
            .cloned()
            .collect();
        for v in &sub.new_vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        for f in sub.map.values() {
            for v in f.coeffs.keys() {
                if !vars.contains(v) {
                    return Err(PolyError::UnknownVar(v.clone()));
                }
            }
        }
        let mut ineqs = Vec::new();
        let mut conditions = self.conditions.clone();
        for i in &self.ineqs {
            let mut lhs = LinForm::new();
            let mut rhs = i.rhs.clone();
            for (v, c) in &i.lhs {
                match sub.map.get(v) {
                    Some(f) => {
                        for (w, k) in &f.coeffs {
                            add_into(&mut lhs, w, c * k);
                        }
                        rhs.add_constant(&-(c * &f.constant));
                    }
                    None => add_into(&mut lhs, v, c.clone()),
                }
            }
            if lhs.is_empty() {
                conditions.push(Condition { rel: i.rel, rhs });
            } else {
                ineqs.push(LinIneq { lhs, rel: i.rel, rhs });
            }
        }
        for a in aux {
            for v in a.lhs.keys() {
                if !vars.contains(v) {
                    return Err(PolyError::UnknownVar(v.clone()));
                }
            }
            ineqs.push(a.clone());
        }
        Ok(Self {
            rate_vars: vars,
            ineqs,
            conditions,
            model: self.model.clone(),
        }
        .tidy())
    }

    /// Substitutes a constant for a rate variable.
    pub fn fix_var(&self, var: &str, value: Rational) -> Result<RegionSystem, PolyError> {
        let mut map = BTreeMap::new();
        map.insert(var.to_string(), AffineForm::constant(value));
        self.substitute_rates(&Substitution { map, new_vars: Vec::new() }, &[])
    }

    /// Renames rate variables.
    pub fn rename(&self, pairs: &[(&str, &str)]) -> Result<RegionSystem, PolyError> {
        let mut map = BTreeMap::new();
        let mut new_vars = Vec::new();
        for (old, new) in pairs {
            map.insert(old.to_string(), AffineForm::var(new));
            new_vars.push(new.to_string());
        }
        let renamed = self.substitute_rates(&Substitution { map, new_vars }, &[])?;
        let order: Vec<String> = self
            .rate_vars
            .iter()
            .map(|v| pairs.iter().find(|(o, _)| o == v).map(|(_, n)| n.to_string()).unwrap_or_else(|| v.clone()))
            .collect();
        Ok(Self { rate_vars: order, ..renamed })
    }

    /// Rewrites the random variables inside every atom (e.g. `U1 -> Q`).
    pub fn substitute_variables(&self, pairs: &[(&str, &[&str])]) -> RegionSystem {
        let map: BTreeMap<String, Vec<String>> = pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.iter().map(|s| s.to_string()).collect()))
            .collect();
        let rewrite = |e: &InfoExpr| {
            let mut out = InfoExpr::constant(e.constant_part().clone());
            for (a, c) in e.terms() {
                out = out.plus(&a.substitute_vars(&map).scaled(c));
            }
            out
        };
        Self {
            rate_vars: self.rate_vars.clone(),
            ineqs: self
                .ineqs
                .iter()
                .map(|i| LinIneq { lhs: i.lhs.clone(), rel: i.rel, rhs: rewrite(&i.rhs) })
                .collect(),
            conditions: self.conditions.iter().map(|c| Condition { rel: c.rel, rhs: rewrite(&c.rhs) }).collect(),
            model: None,
        }
        .tidy()
    }

    /// Numeric instantiation; strict relations are closed and recorded.
    pub fn instantiate(&self, values: &Valuation) -> Result<NumericSystem, PolyError> {
        let rows = self
            .ineqs
            .iter()
            .map(|i| {
                Ok(NumIneq {
                    coeffs: self.rate_vars.iter().map(|v| rat_to_f64(&i.coeff(v))).collect(),
                    bound: i.rhs.eval(values)?,
                    strict: i.rel == Relation::Lt,
                })
            })
            .collect::<Result<Vec<_>, PolyError>>()?;
        let conditions = self
            .conditions
            .iter()
            .map(|c| Ok((c.rhs.eval(values)?, c.rel == Relation::Lt)))
            .collect::<Result<Vec<_>, PolyError>>()?;
        Ok(NumericSystem {
            vars: self.rate_vars.clone(),
            rows,
            conditions,
        })
    }

    /// Model used for consistent valuations: the attached one, or a default in
    /// which auxiliaries are jointly random, X depends on all of them, and each
    /// output depends on X.
    pub fn valuation_model(&self) -> Result<NetworkSpec, PolyError> {
        if let Some(m) = &self.model {
            return Ok(m.clone());
        }
        Ok(default_model(self.atoms().iter().flat_map(|a| a.variables()).collect()))
    }

    /// Seeded Shannon-consistent atom values drawn from [`Self::valuation_model`].
    pub fn sample_valuations(&self, count: usize, seed: u64) -> Result<Vec<Valuation>, PolyError> {
        let model = self.valuation_model()?;
        sample_valuations(&model, &self.atoms(), count, seed)
    }

    /// Drops inequalities never active at any vertex across the valuations,
    /// then any whose removal leaves every instantiated region unchanged, and
    /// conditions that hold with margin in all of them.
    pub fn prune_redundant(&self, valuations: &[Valuation]) -> Result<RegionSystem, PolyError> {
        const ACTIVE: f64 = 1e-7;
        let d = self.rate_vars.len();
        if d == 0 || d > 4 || valuations.is_empty() {
            return Ok(self.clone());
        }
        let mut active = vec![false; self.ineqs.len()];
        let mut cond_needed = vec![false; self.conditions.len()];
        let mut informative = false;
        let nums: Vec<NumericSystem> = valuations.iter().map(|v| self.instantiate(v)).collect::<Result<_, _>>()?;
        for num in &nums {
            for (k, (v, _)) in num.conditions.iter().enumerate() {
                if *v <= ACTIVE {
                    cond_needed[k] = true;
                }
            }
            let verts = vertices_nd(&num.rows, d);
            if verts.is_empty() {
                continue;
            }
            informative = true;
            for v in &verts {
                for (k, r) in num.rows.iter().enumerate() {
                    let lhs: f64 = r.coeffs.iter().zip(v).map(|(a, x)| a * x).sum();
                    if r.bound - lhs <= ACTIVE {
                        active[k] = true;
                    }
                }
            }
        }
        if !informative {
            return Ok(self.clone());
        }
        let mut kept: Vec<usize> = (0..self.ineqs.len()).filter(|&k| active[k]).collect();
        let vertices = |idx: &[usize], num: &NumericSystem| {
            let rows: Vec<NumIneq> = idx.iter().map(|&k| num.rows[k].clone()).collect();
            vertices_nd(&rows, d)
        };
        let same = |a: &[Vec<f64>], b: &[Vec<f64>]| {
            a.len() == b.len() && a.iter().all(|p| b.iter().any(|q| p.iter().zip(q).all(|(u, v)| (u - v).abs() <= 1e-9)))
        };
        for k in (0..kept.len()).rev() {
            let mut trial = kept.clone();
            trial.remove(k);
            if nums.iter().all(|num| same(&vertices(&kept, num), &vertices(&trial, num))) {
                kept = trial;
            }
        }
        Ok(Self {
            rate_vars: self.rate_vars.clone(),
            ineqs: kept.iter().map(|&k| self.ineqs[k].clone()).collect(),
            conditions: self
                .conditions
                .iter()
                .zip(&cond_needed)
                .filter(|(_, n)| **n)
                .map(|(c, _)| c.clone())
                .collect(),
            model: self.model.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SystemJson::from(self)).expect("system serializes")
    }

    pub fn from_json(s: &str) -> Result<RegionSystem, PolyError> {
        let j: SystemJson = serde_json::from_str(s).map_err(|e| PolyError::Parse(e.to_string()))?;
        RegionSystem::try_from(j)
    }
}

impl fmt::Display for RegionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.ineqs {
            writeln!(f, "{i}")?;
        }
        for c in &self.conditions {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

pub(crate) fn default_model(vars: BTreeSet<String>) -> NetworkSpec {
    let mut sorted: Vec<String> = vars.into_iter().collect();
    sorted.sort_by(|a, b| cmp_vars(a, b));
    let is_aux = |v: &str| matches!(&v[..1], "Q" | "U" | "V" | "W");
    let is_out = |v: &str| matches!(&v[..1], "Y" | "Z");
    let aux: Vec<&str> = sorted.iter().map(|s| s.as_str()).filter(|v| is_aux(v)).collect();
    let mut nodes = Vec::new();
    for (k, a) in aux.iter().enumerate() {
        nodes.push(NodeSpec::random(a, 2, &aux[..k]));
    }
    nodes.push(NodeSpec::random("X", 2, &aux));
    for o in sorted.iter().filter(|v| !is_aux(v) && v.as_str() != "X") {
        let card = if is_out(o) && o.starts_with('Y') { 3 } else { 2 };
        nodes.push(NodeSpec::random(o, card, &["X"]));
    }
    NetworkSpec { nodes }
}

pub fn sample_valuations(
    model: &NetworkSpec,
    atoms: &BTreeSet<InfoAtom>,
    count: usize,
    seed: u64,
) -> Result<Vec<Valuation>, PolyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let net = model.sample(&mut rng).map_err(|e| PolyError::Model(e.to_string()))?;
            atoms
                .iter()
                .map(|a| {
                    let v = match a {
                        InfoAtom::Mi { a: x, b: y, given } => net.mutual_information(x, y, given),
                        InfoAtom::Entropy { a: x, given } => net.entropy(x, given),
                    }
                    .map_err(|e| PolyError::Model(e.to_string()))?;
                    Ok((a.clone(), v))
                })
                .collect()
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct IneqJson {
    lhs: BTreeMap<String, String>,
    rel: Relation,
    rhs: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct CondJson {
    rel: Relation,
    rhs: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize)]
struct SystemJson {
    rate_vars: Vec<String>,
    atoms: Vec<String>,
    ineqs: Vec<IneqJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    conditions: Vec<CondJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    model: Option<NetworkSpec>,
}

fn expr_to_json(e: &InfoExpr) -> BTreeMap<String, String> {
    let mut m: BTreeMap<String, String> = e.terms().iter().map(|(a, c)| (a.to_string(), format_rational(c))).collect();
    m.insert("const".into(), format_rational(e.constant_part()));
    m
}

fn expr_from_json(m: &BTreeMap<String, String>) -> Result<InfoExpr, PolyError> {
    let mut e = InfoExpr::zero();
    for (k, v) in m {
        let c = parse_rational(v)?;
        if k == "const" {
            e.add_constant(&c);
        } else {
            e.add_term(k.parse()?, c);
        }
    }
    Ok(e)
}

impl From<&RegionSystem> for SystemJson {
    fn from(s: &RegionSystem) -> Self {
        SystemJson {
            rate_vars: s.rate_vars.clone(),
            atoms: s.atoms().iter().map(|a| a.to_string()).collect(),
            ineqs: s
                .ineqs
                .iter()
                .map(|i| IneqJson {
                    lhs: i.lhs.iter().map(|(v, c)| (v.clone(), format_rational(c))).collect(),
                    rel: i.rel,
                    rhs: expr_to_json(&i.rhs),
                })
                .collect(),
            conditions: s
                .conditions
                .iter()
                .map(|c| CondJson {
                    rel: c.rel,
                    rhs: expr_to_json(&c.rhs),
                })
                .collect(),
            model: s.model.clone(),
        }
    }
}

impl TryFrom<SystemJson> for RegionSystem {
    type Error = PolyError;
    fn try_from(j: SystemJson) -> Result<Self, PolyError> {
        let declared: BTreeSet<InfoAtom> = j.atoms.iter().map(|a| a.parse()).collect::<Result<_, _>>()?;
        let ineqs = j
            .ineqs
            .iter()
            .map(|i| {
                let lhs = i
                    .lhs
                    .iter()
                    .map(|(v, c)| Ok((v.clone(), parse_rational(c)?)))
                    .collect::<Result<LinForm, PolyError>>()?;
                LinIneq::new(lhs, i.rel, expr_from_json(&i.rhs)?)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let conditions = j
            .conditions
            .iter()
            .map(|c| Ok(Condition { rel: c.rel, rhs: expr_from_json(&c.rhs)? }))
            .collect::<Result<Vec<_>, PolyError>>()?;
        let sys = RegionSystem {
            rate_vars: j.rate_vars,
            ineqs,
            conditions,
            model: j.model,
        };
        sys.check_vars()?;
        if let Some(a) = sys.atoms().iter().find(|a| !declared.contains(a)) {
            return Err(PolyError::MissingAtom(a.to_string()));
        }
        Ok(sys.tidy())
    }
}
