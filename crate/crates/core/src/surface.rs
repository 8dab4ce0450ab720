//! Finite cohomology models of a smooth quasi-projective surface.
//!
//! A model is a basis of `H^*(S)` adapted to a G-decomposition, the cup
//! product structure constants, the canonical class, and the forgetful map
//! `ι: H_c^* → H^*`. The compactly supported side is not separate input: it
//! is the graded dual of `H^*`, with basis `β^i` dual to `β_i` under
//! `∫ β_i β^j = δ_ij`, and its module structure is derived by adjointness.
//!
//! The length of the G-decomposition is fixed to 2 (the surface dimension),
//! so `g'(β^i) = 2 - g(β_i)` and `deg β^i = 4 - deg β_i`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{format_rational, int, rational_str, Rational, SparseVec};

/// Length of every G-decomposition handled by the engine.
pub const G_LENGTH: u8 = 2;
/// Real dimension of the surface.
pub const TOP_DEGREE: u8 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisClass {
    pub label: String,
    /// Cohomological degree.
    pub d: u8,
    /// G-degree.
    pub k: u8,
}

impl BasisClass {
    pub fn new(label: &str, d: u8, k: u8) -> Self {
        BasisClass {
            label: label.to_string(),
            d,
            k,
        }
    }

    pub fn is_odd(&self) -> bool {
        self.d % 2 == 1
    }
}

/// Which side a class coordinate vector lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    /// `H^*(S)`, coordinates in `β_i`.
    Ordinary,
    /// `H^*_c(S)`, coordinates in the dual basis `β^i`.
    Compact,
}

/// A class argument for operators: coordinates plus the side they live on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClassArg {
    pub side: Side,
    pub coords: SparseVec,
}

impl ClassArg {
    pub fn ordinary(coords: SparseVec) -> Self {
        ClassArg {
            side: Side::Ordinary,
            coords,
        }
    }

    pub fn compact(coords: SparseVec) -> Self {
        ClassArg {
            side: Side::Compact,
            coords,
        }
    }

    pub fn basis(i: usize) -> Self {
        Self::ordinary(SparseVec::unit(i))
    }

    pub fn dual(i: usize) -> Self {
        Self::compact(SparseVec::unit(i))
    }
}

#[derive(Clone, Debug)]
pub struct SurfaceModel {
    name: String,
    basis: Vec<BasisClass>,
    /// `cup[i][j] = β_i · β_j`
    cup: Vec<Vec<SparseVec>>,
    canonical: SparseVec,
    /// `iota[i] = ι(β^i)`
    iota: Vec<SparseVec>,
    strong: OnceLock<Option<String>>,
}

/// Outcome of a single structural check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub model: String,
    pub checks: Vec<Check>,
    pub strongly_multiplicative_g: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strong_witness: Option<String>,
    pub canonical_g_degree: Option<u8>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model {}", self.model)?;
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            write!(f, "  [{mark}] {}", c.name)?;
            if let Some(w) = &c.witness {
                write!(f, "  -- {w}")?;
            }
            writeln!(f)?;
        }
        writeln!(f, "  strongly multiplicative G: {}", self.strongly_multiplicative_g)?;
        if let Some(w) = &self.strong_witness {
            writeln!(f, "    witness: {w}")?;
        }
        match self.canonical_g_degree {
            Some(g) => writeln!(f, "  g(K) = {g}"),
            None => writeln!(f, "  g(K): zero or impure"),
        }
    }
}

fn sign(odd: bool) -> Rational {
    if odd {
        -Rational::one()
    } else {
        Rational::one()
    }
}

impl SurfaceModel {
    /// Builds a model from a full table of structure constants. Only
    /// index-range structure is checked here; use [`SurfaceModel::validate`]
    /// for the algebraic invariants.
    pub fn new(
        name: &str,
        basis: Vec<BasisClass>,
        cup: Vec<Vec<SparseVec>>,
        canonical: SparseVec,
        iota: Vec<SparseVec>,
    ) -> Result<Self> {
        let n = basis.len();
        if n == 0 {
            return Err(Error::MalformedModel("empty basis".into()));
        }
        if cup.len() != n || cup.iter().any(|row| row.len() != n) {
            return Err(Error::MalformedModel(format!("cup table must be {n}x{n}")));
        }
        for (i, row) in cup.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if let Some(m) = v.max_index().filter(|&m| m >= n) {
                    return Err(Error::IndexOutOfRange {
                        context: format!("cup({i},{j}) term"),
                        index: m,
                        size: n,
                    });
                }
            }
        }
        if let Some(m) = canonical.max_index().filter(|&m| m >= n) {
            return Err(Error::IndexOutOfRange {
                context: "canonical class".into(),
                index: m,
                size: n,
            });
        }
        if iota.len() != n {
            return Err(Error::MalformedModel(format!("iota must have {n} entries")));
        }
        for (i, v) in iota.iter().enumerate() {
            if let Some(m) = v.max_index().filter(|&m| m >= n) {
                return Err(Error::IndexOutOfRange {
                    context: format!("iota(dual of {i}) term"),
                    index: m,
                    size: n,
                });
            }
        }
        let mut labels = std::collections::HashSet::new();
        for b in &basis {
            if !labels.insert(b.label.as_str()) {
                return Err(Error::MalformedModel(format!("duplicate label {:?}", b.label)));
            }
            if b.label.is_empty() || !b.label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(Error::MalformedModel(format!(
                    "label {:?} must be nonempty and use only [A-Za-z0-9_]",
                    b.label
                )));
            }
        }
        Ok(SurfaceModel {
            name: name.to_string(),
            basis,
            cup,
            canonical,
            iota,
            strong: OnceLock::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisClass] {
        &self.basis
    }

    pub fn class(&self, i: usize) -> &BasisClass {
        &self.basis[i]
    }

    pub fn degree(&self, i: usize) -> u8 {
        self.basis[i].d
    }

    pub fn gdeg(&self, i: usize) -> u8 {
        self.basis[i].k
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.basis[i].is_odd()
    }

    pub fn dual_degree(&self, i: usize) -> u8 {
        TOP_DEGREE - self.basis[i].d
    }

    pub fn dual_gdeg(&self, i: usize) -> u8 {
        G_LENGTH - self.basis[i].k
    }

    pub fn label(&self, i: usize) -> &str {
        &self.basis[i].label
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.basis
            .iter()
            .position(|b| b.label == label)
            .ok_or_else(|| Error::UnknownClass(label.to_string()))
    }

    /// Parses `"p"` (ordinary basis class) or `"p^"` (its dual compact class).
    pub fn parse_class(&self, token: &str) -> Result<ClassArg> {
        let t = token.trim();
        match t.strip_suffix('^') {
            Some(base) => Ok(ClassArg::dual(self.index_of(base)?)),
            None => Ok(ClassArg::basis(self.index_of(t)?)),
        }
    }

    pub fn unit_index(&self) -> Option<usize> {
        self.basis.iter().position(|b| b.d == 0)
    }

    pub fn unit(&self) -> SparseVec {
        self.unit_index().map(SparseVec::unit).unwrap_or_default()
    }

    pub fn canonical(&self) -> &SparseVec {
        &self.canonical
    }

    pub fn iota_basis(&self, i: usize) -> &SparseVec {
        &self.iota[i]
    }

    pub fn cup_basis(&self, i: usize, j: usize) -> &SparseVec {
        &self.cup[i][j]
    }

    /// G-degree of a class if it is pure and nonzero.
    pub fn pure_gdeg(&self, v: &SparseVec) -> Option<u8> {
        let mut ks = v.indices().map(|i| self.gdeg(i));
        let first = ks.next()?;
        ks.all(|k| k == first).then_some(first)
    }

    /// G-degree of a compact class (dual grading) if pure and nonzero.
    pub fn pure_dual_gdeg(&self, v: &SparseVec) -> Option<u8> {
        let mut ks = v.indices().map(|i| self.dual_gdeg(i));
        let first = ks.next()?;
        ks.all(|k| k == first).then_some(first)
    }

    pub fn canonical_gdeg(&self) -> Option<u8> {
        self.pure_gdeg(&self.canonical)
    }

    /// `K = 0` or `K` pure of G-degree 1.
    pub fn canonical_in_g1(&self) -> bool {
        self.canonical.is_zero() || self.canonical_gdeg() == Some(1)
    }

    pub fn cup(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, x) in a.iter() {
            for (j, y) in b.iter() {
                out.add_scaled(&(x * y), &self.cup[i][j]);
            }
        }
        out
    }

    /// Left action `a · ξ` of `H^*` on `H^*_c`, characterised by
    /// `∫ b (a ξ) = ∫ (b a) ξ` for every `b`.
    pub fn module_mul(&self, a: &SparseVec, xi: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, x) in a.iter() {
            for (j, y) in xi.iter() {
                let c = x * y;
                // β_i · β^j = Σ_m (coefficient of β_j in β_m β_i) β^m
                for m in 0..self.dim() {
                    if let Some(s) = self.cup[m][i].coeff(j) {
                        out.add_at(m, &c * s);
                    }
                }
            }
        }
        out
    }

    /// Right action `ξ · a = (-1)^{|a||ξ|} a · ξ`.
    pub fn module_mul_right(&self, xi: &SparseVec, a: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, x) in a.iter() {
            for (j, y) in xi.iter() {
                let s = sign(self.is_odd(i) && self.is_odd(j));
                let term = self.module_mul(&SparseVec::unit(i), &SparseVec::unit(j));
                out.add_scaled(&(s * x * y), &term);
            }
        }
        out
    }

    pub fn iota(&self, xi: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, x) in xi.iter() {
            out.add_scaled(x, &self.iota[i]);
        }
        out
    }

    /// Evaluation of a compact class on the fundamental class; only the
    /// degree-4 part (dual of the unit) contributes.
    pub fn integral(&self, xi: &SparseVec) -> Rational {
        match self.unit_index() {
            Some(u) => xi.get(u),
            None => Rational::zero(),
        }
    }

    /// `∫ α ξ` for `α ∈ H^*`, `ξ ∈ H^*_c` (written order).
    pub fn pair(&self, a: &SparseVec, xi: &SparseVec) -> Rational {
        a.dot(xi)
    }

    /// `∫ ξ α` for `ξ ∈ H^*_c`, `α ∈ H^*` (written order, Koszul sign applied).
    pub fn pair_rev(&self, xi: &SparseVec, a: &SparseVec) -> Rational {
        let mut acc = Rational::zero();
        for (i, x) in a.iter() {
            if let Some(y) = xi.coeff(i) {
                acc += sign(self.is_odd(i)) * x * y;
            }
        }
        acc
    }

    /// `(β_i, β^i)` index pairs with their degrees: `(i, deg β_i, g(β_i), deg β^i, g'(β^i))`.
    pub fn dual_basis(&self) -> Vec<(usize, u8, u8, u8, u8)> {
        (0..self.dim())
            .map(|i| (i, self.degree(i), self.gdeg(i), self.dual_degree(i), self.dual_gdeg(i)))
            .collect()
    }

    /// `None` when strongly multiplicative, else a witness description.
    fn strong_failure(&self) -> &Option<String> {
        self.strong.get_or_init(|| {
            for i in 0..self.dim() {
                for j in 0..self.dim() {
                    for (m, c) in self.cup[i][j].iter() {
                        if self.gdeg(m) != self.gdeg(i) + self.gdeg(j) {
                            return Some(format!(
                                "{}·{} has coefficient {} on {} with g={} != {}+{}",
                                self.label(i),
                                self.label(j),
                                format_rational(c),
                                self.label(m),
                                self.gdeg(m),
                                self.gdeg(i),
                                self.gdeg(j)
                            ));
                        }
                    }
                }
            }
            None
        })
    }

    pub fn strongly_multiplicative_g(&self) -> bool {
        self.strong_failure().is_none()
    }

    pub fn format_class(&self, v: &SparseVec, side: Side) -> String {
        if v.is_zero() {
            return "0".into();
        }
        let suffix = if side == Side::Compact { "^" } else { "" };
        let mut s = String::new();
        for (n, (i, x)) in v.iter().enumerate() {
            let neg = x < &Rational::zero();
            let mag = if neg { -x.clone() } else { x.clone() };
            if n == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if !mag.is_one() {
                s.push_str(&format_rational(&mag));
                s.push(' ');
            }
            s.push_str(self.label(i));
            s.push_str(suffix);
        }
        s
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.dim();
        let mut checks = Vec::new();
        let mut push = |name: &str, witness: Option<String>| {
            checks.push(Check {
                name: name.to_string(),
                passed: witness.is_none(),
                witness,
            })
        };

        push(
            "grading ranges",
            self.basis
                .iter()
                .find(|b| b.d > TOP_DEGREE || b.k > G_LENGTH)
                .map(|b| format!("{} has (d,k)=({},{})", b.label, b.d, b.k)),
        );

        let units: Vec<usize> = (0..n).filter(|&i| self.degree(i) == 0).collect();
        push(
            "connected (dim H^0 = 1, unit in G_0)",
            match units.as_slice() {
                [u] if self.gdeg(*u) == 0 => None,
                [u] => Some(format!("unit {} has g={}", self.label(*u), self.gdeg(*u))),
                _ => Some(format!("dim H^0 = {}", units.len())),
            },
        );

        let mut w = None;
        'deg: for i in 0..n {
            for j in 0..n {
                for m in self.cup[i][j].indices() {
                    if self.degree(m) != self.degree(i) + self.degree(j) {
                        w = Some(format!(
                            "{}·{} has a term on {} of degree {}",
                            self.label(i),
                            self.label(j),
                            self.label(m),
                            self.degree(m)
                        ));
                        break 'deg;
                    }
                }
            }
        }
        push("cup respects degree", w);

        let mut w = None;
        'sc: for i in 0..n {
            for j in 0..n {
                let s = sign(self.is_odd(i) && self.is_odd(j));
                let rev = self.cup[j][i].scaled(&s);
                if self.cup[i][j] != rev {
                    w = Some(if i == j {
                        format!("odd class {} squares to {}", self.label(i), self.format_class(&self.cup[i][i], Side::Ordinary))
                    } else {
                        format!("({}, {})", self.label(i), self.label(j))
                    });
                    break 'sc;
                }
            }
        }
        push("super-commutativity", w);

        let w = match self.unit_index() {
            None => Some("no unit class".into()),
            Some(u) => (0..n)
                .find(|&x| self.cup[u][x] != SparseVec::unit(x) || self.cup[x][u] != SparseVec::unit(x))
                .map(|x| format!("1·{} != {}", self.label(x), self.label(x))),
        };
        push("unit law", w);

        let mut w = None;
        'assoc: for i in 0..n {
            for j in 0..n {
                let ij = &self.cup[i][j];
                for k in 0..n {
                    let left = self.cup(ij, &SparseVec::unit(k));
                    let right = self.cup(&SparseVec::unit(i), &self.cup[j][k]);
                    if left != right {
                        w = Some(format!("({},{},{})", self.label(i), self.label(j), self.label(k)));
                        break 'assoc;
                    }
                }
            }
        }
        push("associativity", w);

        push(
            "canonical class in H^2",
            self.canonical
                .indices()
                .find(|&m| self.degree(m) != 2)
                .map(|m| format!("K has a term on {} of degree {}", self.label(m), self.degree(m))),
        );

        let mut w = None;
        'io: for i in 0..n {
            for m in self.iota[i].indices() {
                if self.degree(m) != self.dual_degree(i) || self.gdeg(m) != self.dual_gdeg(i) {
                    w = Some(format!(
                        "ι({}^) hits {} with (d,k)=({},{}), expected ({},{})",
                        self.label(i),
                        self.label(m),
                        self.degree(m),
                        self.gdeg(m),
                        self.dual_degree(i),
                        self.dual_gdeg(i)
                    ));
                    break 'io;
                }
            }
        }
        push("iota compatible with G and G'", w);

        let mut w = None;
        'mm: for a in 0..n {
            for j in 0..n {
                let av = SparseVec::unit(a);
                let lhs = self.iota(&self.module_mul(&av, &SparseVec::unit(j)));
                let rhs = self.cup(&av, &self.iota[j]);
                if lhs != rhs {
                    w = Some(format!("ι({}·{}^) != {}·ι({}^)", self.label(a), self.label(j), self.label(a), self.label(j)));
                    break 'mm;
                }
            }
        }
        push("iota is a module map", w);

        // ∫ ι(β^i) β^j = (-1)^{|i||j|} ∫ ι(β^j) β^i
        let mut w = None;
        'sa: for i in 0..n {
            for j in 0..n {
                let s = sign(self.is_odd(i) && self.is_odd(j));
                if self.iota[i].get(j) != s * self.iota[j].get(i) {
                    w = Some(format!("pairing of ι({}^) with {}^", self.label(i), self.label(j)));
                    break 'sa;
                }
            }
        }
        push("iota self-adjoint", w);

        let strong_witness = self.strong_failure().clone();
        ValidationReport {
            model: self.name.clone(),
            checks,
            strongly_multiplicative_g: strong_witness.is_none(),
            strong_witness,
            canonical_g_degree: self.canonical_gdeg(),
        }
    }

    // --- serialization -------------------------------------------------

    pub fn from_file_repr(repr: ModelFile) -> Result<Self> {
        let n = repr.basis.len();
        let mut cup = vec![vec![SparseVec::new(); n]; n];
        let odd = |i: usize| repr.basis[i].d % 2 == 1;
        let check = |i: usize, ctx: &str| {
            if i >= n {
                Err(Error::IndexOutOfRange {
                    context: ctx.to_string(),
                    index: i,
                    size: n,
                })
            } else {
                Ok(())
            }
        };
        let mut touches_unit = false;
        let unit = repr.basis.iter().position(|b| b.d == 0);
        for entry in &repr.cup {
            check(entry.i, "cup.i")?;
            check(entry.j, "cup.j")?;
            if entry.i > entry.j {
                return Err(Error::MalformedModel(format!(
                    "cup entries must have i <= j, got ({}, {})",
                    entry.i, entry.j
                )));
            }
            if Some(entry.i) == unit || Some(entry.j) == unit {
                touches_unit = true;
            }
            let v = terms_to_vec(&entry.terms, n, "cup term")?;
            let s = sign(odd(entry.i) && odd(entry.j));
            cup[entry.j][entry.i] = v.scaled(&s);
            cup[entry.i][entry.j] = v;
        }
        if !touches_unit {
            if let Some(u) = unit {
                for x in 0..n {
                    cup[u][x] = SparseVec::unit(x);
                    cup[x][u] = SparseVec::unit(x);
                }
            }
        }
        let canonical = terms_to_vec(&repr.canonical, n, "K term")?;
        let mut iota = vec![SparseVec::new(); n];
        for entry in &repr.iota {
            check(entry.from_dual_of, "iota.from_dual_of")?;
            iota[entry.from_dual_of] = terms_to_vec(&entry.terms, n, "iota term")?;
        }
        SurfaceModel::new(repr.name.as_deref().unwrap_or("model"), repr.basis, cup, canonical, iota)
    }

    pub fn to_file_repr(&self) -> ModelFile {
        let n = self.dim();
        let unit = self.unit_index();
        let mut cup = Vec::new();
        for i in 0..n {
            for j in i..n {
                if Some(i) == unit || Some(j) == unit {
                    continue;
                }
                if !self.cup[i][j].is_zero() {
                    cup.push(CupEntry {
                        i,
                        j,
                        terms: vec_to_terms(&self.cup[i][j]),
                    });
                }
            }
        }
        let iota = (0..n)
            .filter(|&i| !self.iota[i].is_zero())
            .map(|i| IotaEntry {
                from_dual_of: i,
                terms: vec_to_terms(&self.iota[i]),
            })
            .collect();
        ModelFile {
            name: Some(self.name.clone()),
            basis: self.basis.clone(),
            cup,
            canonical: vec_to_terms(&self.canonical),
            iota,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: ModelFile = serde_json::from_str(text)?;
        Self::from_file_repr(repr)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file_repr()).expect("model serialization cannot fail")
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

fn terms_to_vec(terms: &[Term], n: usize, ctx: &str) -> Result<SparseVec> {
    let mut v = SparseVec::new();
    for t in terms {
        if t.m >= n {
            return Err(Error::IndexOutOfRange {
                context: ctx.to_string(),
                index: t.m,
                size: n,
            });
        }
        v.add_at(t.m, t.coeff.clone());
    }
    Ok(v)
}

fn vec_to_terms(v: &SparseVec) -> Vec<Term> {
    v.iter().map(|(m, c)| Term { m, coeff: c.clone() }).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub m: usize,
    #[serde(with = "rational_str")]
    pub coeff: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CupEntry {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IotaEntry {
    pub from_dual_of: usize,
    pub terms: Vec<Term>,
}

/// On-disk model format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub basis: Vec<BasisClass>,
    #[serde(default)]
    pub cup: Vec<CupEntry>,
    #[serde(rename = "K", default)]
    pub canonical: Vec<Term>,
    #[serde(default)]
    pub iota: Vec<IotaEntry>,
}

/// Helper for assembling models in code: products given by label.
pub struct ModelBuilder {
    name: String,
    basis: Vec<BasisClass>,
    products: BTreeMap<(usize, usize), SparseVec>,
    canonical: SparseVec,
    iota: Vec<SparseVec>,
}

impl ModelBuilder {
    pub fn new(name: &str, basis: Vec<BasisClass>) -> Self {
        let n = basis.len();
        ModelBuilder {
            name: name.to_string(),
            basis,
            products: BTreeMap::new(),
            canonical: SparseVec::new(),
            iota: vec![SparseVec::new(); n],
        }
    }

    fn idx(&self, label: &str) -> usize {
        self.basis
            .iter()
            .position(|b| b.label == label)
            .unwrap_or_else(|| panic!("unknown label {label}"))
    }

    /// Sets `x · y` (and `y · x` by super-commutativity).
    pub fn product(mut self, x: &str, y: &str, terms: &[(&str, Rational)]) -> Self {
        let (i, j) = (self.idx(x), self.idx(y));
        let v = SparseVec::from_pairs(terms.iter().map(|(l, c)| (self.idx(l), c.clone())));
        let s = sign(self.basis[i].is_odd() && self.basis[j].is_odd());
        self.products.insert((j, i), v.scaled(&s));
        self.products.insert((i, j), v);
        self
    }

    pub fn canonical(mut self, terms: &[(&str, Rational)]) -> Self {
        self.canonical = SparseVec::from_pairs(terms.iter().map(|(l, c)| (self.idx(l), c.clone())));
        self
    }

    pub fn iota(mut self, dual_of: &str, terms: &[(&str, Rational)]) -> Self {
        let i = self.idx(dual_of);
        self.iota[i] = SparseVec::from_pairs(terms.iter().map(|(l, c)| (self.idx(l), c.clone())));
        self
    }

    pub fn build(self) -> Result<SurfaceModel> {
        let n = self.basis.len();
        let mut cup = vec![vec![SparseVec::new(); n]; n];
        if let Some(u) = self.basis.iter().position(|b| b.d == 0) {
            for x in 0..n {
                cup[u][x] = SparseVec::unit(x);
                cup[x][u] = SparseVec::unit(x);
            }
        }
        for ((i, j), v) in self.products {
            cup[i][j] = v;
        }
        SurfaceModel::new(&self.name, self.basis, cup, self.canonical, self.iota)
    }
}

/// `H^*(E × A^1)` with its perverse G-grading: `a·b = p`, `K = 0`, `ι = 0`.
pub fn elliptic_model() -> SurfaceModel {
    ModelBuilder::new(
        "M_E",
        vec![
            BasisClass::new("1", 0, 0),
            BasisClass::new("a", 1, 1),
            BasisClass::new("b", 1, 1),
            BasisClass::new("p", 2, 2),
        ],
    )
    .product("a", "b", &[("p", int(1))])
    .build()
    .expect("fixture is well formed")
}

/// `H^*(C_2 × A^1)` for a genus-2 curve: `a_i·b_i = p`, `K = 2p`, `ι = 0`.
pub fn genus2_model() -> SurfaceModel {
    ModelBuilder::new(
        "M_2",
        vec![
            BasisClass::new("1", 0, 0),
            BasisClass::new("a1", 1, 1),
            BasisClass::new("b1", 1, 1),
            BasisClass::new("a2", 1, 1),
            BasisClass::new("b2", 1, 1),
            BasisClass::new("p", 2, 2),
        ],
    )
    .product("a1", "b1", &[("p", int(1))])
    .product("a2", "b2", &[("p", int(1))])
    .canonical(&[("p", int(2))])
    .build()
    .expect("fixture is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> SparseVec {
        SparseVec::unit(i)
    }

    #[test]
    fn elliptic_model_validates() {
        let m = elliptic_model();
        let r = m.validate();
        assert!(r.is_valid(), "{r}");
        assert!(r.strongly_multiplicative_g);
        assert_eq!(m.canonical_gdeg(), None);
        assert!(m.canonical_in_g1());
    }

    #[test]
    fn genus2_model_validates() {
        let m = genus2_model();
        let r = m.validate();
        assert!(r.is_valid(), "{r}");
        assert!(r.strongly_multiplicative_g);
        assert_eq!(m.canonical_gdeg(), Some(2));
        assert!(!m.canonical_in_g1());
        assert_eq!(m.dual_basis().len(), 6);
    }

    #[test]
    fn odd_square_is_caught() {
        let base = elliptic_model();
        let mut repr = base.to_file_repr();
        let a = base.index_of("a").unwrap();
        let p = base.index_of("p").unwrap();
        repr.cup.push(CupEntry {
            i: a,
            j: a,
            terms: vec![Term { m: p, coeff: int(1) }],
        });
        let m = SurfaceModel::from_file_repr(repr).unwrap();
        let r = m.validate();
        let c = r.check("super-commutativity").unwrap();
        assert!(!c.passed);
        assert!(c.witness.as_ref().unwrap().contains("odd class a"));
    }

    #[test]
    fn out_of_range_terms_are_rejected() {
        let mut repr = elliptic_model().to_file_repr();
        repr.cup[0].terms[0].m = 9;
        assert!(matches!(
            SurfaceModel::from_file_repr(repr),
            Err(Error::IndexOutOfRange { index: 9, .. })
        ));
    }

    #[test]
    fn cup_examples() {
        let m = elliptic_model();
        let (one, a, b, p) = (0, 1, 2, 3);
        for x in 0..4 {
            assert_eq!(m.cup(&e(one), &e(x)), e(x));
        }
        assert_eq!(m.cup(&e(a), &e(b)), e(p));
        assert_eq!(m.cup(&e(b), &e(a)), e(p).scaled(&int(-1)));
        assert!(m.cup(&e(a), &e(a)).is_zero());
        assert!(m.cup(&e(p), &e(p)).is_zero());
    }

    #[test]
    fn module_mul_examples() {
        let m = elliptic_model();
        for j in 0..4 {
            assert_eq!(m.module_mul(&e(0), &e(j)), e(j));
        }
        // p · p^ is the dual of the unit
        assert_eq!(m.module_mul(&e(3), &e(3)), e(0));
        // degree overflow: p · 1^ would have degree 6
        assert!(m.module_mul(&e(3), &e(0)).is_zero());
        assert_eq!(m.integral(&m.module_mul(&e(3), &e(3))), int(1));
    }

    #[test]
    fn pairing_is_dual_basis() {
        for m in [elliptic_model(), genus2_model()] {
            for i in 0..m.dim() {
                for j in 0..m.dim() {
                    let expect = if i == j { int(1) } else { int(0) };
                    assert_eq!(m.pair(&e(i), &e(j)), expect);
                    assert_eq!(m.integral(&m.module_mul(&e(i), &e(j))), expect);
                }
            }
            for (_, d, k, dd, kk) in m.dual_basis() {
                assert_eq!(d + dd, 4);
                assert_eq!(k + kk, 2);
            }
        }
    }

    #[test]
    fn module_adjointness() {
        // <a ξ, b> = (-1)^{|a||ξ|} <ξ, a b>, with <ξ, b> = ∫ ξ b
        for m in [elliptic_model(), genus2_model()] {
            let n = m.dim();
            for a in 0..n {
                for x in 0..n {
                    for b in 0..n {
                        let lhs = m.pair_rev(&m.module_mul(&e(a), &e(x)), &e(b));
                        let s = sign(m.is_odd(a) && m.is_odd(x));
                        let rhs = s * m.pair_rev(&e(x), &m.cup(&e(a), &e(b)));
                        assert_eq!(lhs, rhs, "a={a} ξ={x} b={b}");
                    }
                }
            }
        }
    }

    #[test]
    fn module_associativity() {
        let m = genus2_model();
        let n = m.dim();
        for a in 0..n {
            for b in 0..n {
                for x in 0..n {
                    let lhs = m.module_mul(&m.cup(&e(a), &e(b)), &e(x));
                    let rhs = m.module_mul(&e(a), &m.module_mul(&e(b), &e(x)));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn json_roundtrip_is_stable() {
        for m in [elliptic_model(), genus2_model()] {
            let text = m.to_json();
            let back = SurfaceModel::from_json(&text).unwrap();
            assert_eq!(back.to_json(), text);
            assert!(back.validate().is_valid());
        }
    }

    #[test]
    fn parse_class_tokens() {
        let m = elliptic_model();
        assert_eq!(m.parse_class("p").unwrap(), ClassArg::basis(3));
        assert_eq!(m.parse_class("p^").unwrap(), ClassArg::dual(3));
        assert!(matches!(m.parse_class("zz"), Err(Error::UnknownClass(_))));
    }
}
