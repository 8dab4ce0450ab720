//! The Fock space `⊕_n H^*(S^[n])` in its decorated-partition basis.
//!
//! A basis word is a multiset of generators `q_n(β_i)` kept in canonical
//! order (larger `n` first, then smaller class index). Odd generators
//! anticommute, so an odd generator may appear at most once and every
//! reordering carries a Koszul sign relative to the canonical order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, Rational, SparseVec};
use crate::surface::SurfaceModel;

/// Default enumeration cap on the conformal weight.
pub const DEFAULT_BASIS_CAP: usize = 6;

/// One creation operator `q_n(β_class)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gen {
    pub n: u32,
    pub class: usize,
}

impl Gen {
    pub fn new(n: u32, class: usize) -> Self {
        Gen { n, class }
    }
}

// Canonical order: n descending, then class ascending.
impl Ord for Gen {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.n.cmp(&self.n).then(self.class.cmp(&other.class))
    }
}

impl PartialOrd for Gen {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// A canonical basis word `q_{n_1}(β_1)⋯q_{n_s}(β_s)1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockWord {
    gens: Vec<Gen>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TriDegree {
    pub n: i64,
    pub d: i64,
    pub k: i64,
}

impl TriDegree {
    pub fn new(n: i64, d: i64, k: i64) -> Self {
        TriDegree { n, d, k }
    }
}

impl std::ops::Add for TriDegree {
    type Output = TriDegree;
    fn add(self, o: TriDegree) -> TriDegree {
        TriDegree::new(self.n + o.n, self.d + o.d, self.k + o.k)
    }
}

impl std::ops::Sub for TriDegree {
    type Output = TriDegree;
    fn sub(self, o: TriDegree) -> TriDegree {
        TriDegree::new(self.n - o.n, self.d - o.d, self.k - o.k)
    }
}

impl fmt::Display for TriDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.n, self.d, self.k)
    }
}

impl FockWord {
    pub fn vacuum() -> Self {
        FockWord::default()
    }

    pub fn gens(&self) -> &[Gen] {
        &self.gens
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.gens.iter().map(|g| g.n as usize).sum()
    }

    /// Trusted constructor for a sequence already in canonical order.
    pub(crate) fn from_sorted(gens: Vec<Gen>) -> Self {
        debug_assert!(gens.windows(2).all(|w| w[0] <= w[1]));
        FockWord { gens }
    }

    /// Word with position `i` removed (still canonical).
    pub fn without(&self, i: usize) -> FockWord {
        let mut gens = self.gens.clone();
        gens.remove(i);
        FockWord { gens }
    }

    pub fn parity(&self, m: &SurfaceModel) -> bool {
        self.gens.iter().filter(|g| m.is_odd(g.class)).count() % 2 == 1
    }

    pub fn contains_q1(&self) -> bool {
        self.gens.last().is_some_and(|g| g.n == 1)
    }

    /// `q_n(β) · self`, normalized. `None` when an odd generator repeats.
    pub fn prepend(&self, m: &SurfaceModel, g: Gen) -> Option<(bool, FockWord)> {
        let pos = self.gens.partition_point(|h| *h < g);
        let odd = m.is_odd(g.class);
        if odd && self.gens.get(pos) == Some(&g) {
            return None;
        }
        let negate = odd && self.gens[..pos].iter().filter(|h| m.is_odd(h.class)).count() % 2 == 1;
        let mut gens = self.gens.clone();
        gens.insert(pos, g);
        Some((negate, FockWord { gens }))
    }

    pub fn format(&self, m: &SurfaceModel) -> String {
        if self.gens.is_empty() {
            return "vac".into();
        }
        self.gens
            .iter()
            .map(|g| format!("q{}({})", g.n, m.label(g.class)))
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// Sorts an arbitrary generator sequence into canonical order.
///
/// Returns the Koszul sign of the sorting permutation (`true` = negative) and
/// the canonical word, or `Ok(None)` when an odd generator is repeated.
pub fn normalize(m: &SurfaceModel, seq: &[(i64, usize)]) -> Result<Option<(bool, FockWord)>> {
    let mut gens = Vec::with_capacity(seq.len());
    for &(n, c) in seq {
        if n <= 0 {
            return Err(Error::NonPositiveIndex(n));
        }
        if c >= m.dim() {
            return Err(Error::IndexOutOfRange {
                context: "generator class".into(),
                index: c,
                size: m.dim(),
            });
        }
        gens.push(Gen::new(n as u32, c));
    }
    // insertion sort, counting odd-odd transpositions
    let mut negate = false;
    for i in 1..gens.len() {
        let mut j = i;
        while j > 0 && gens[j - 1] > gens[j] {
            if m.is_odd(gens[j - 1].class) && m.is_odd(gens[j].class) {
                negate = !negate;
            }
            gens.swap(j - 1, j);
            j -= 1;
        }
    }
    if gens.windows(2).any(|w| w[0] == w[1] && m.is_odd(w[0].class)) {
        return Ok(None);
    }
    Ok(Some((negate, FockWord { gens })))
}

pub fn tridegree(m: &SurfaceModel, w: &FockWord) -> TriDegree {
    w.gens.iter().fold(TriDegree::default(), |acc, g| {
        let n = g.n as i64;
        acc + TriDegree::new(n, m.degree(g.class) as i64 + 2 * n - 2, m.gdeg(g.class) as i64 + n - 1)
    })
}

impl Default for TriDegree {
    fn default() -> Self {
        TriDegree::new(0, 0, 0)
    }
}

/// Sparse rational combination of basis words.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FockVector {
    terms: BTreeMap<FockWord, Rational>,
}

impl FockVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        Self::word(FockWord::vacuum())
    }

    pub fn word(w: FockWord) -> Self {
        let mut v = Self::new();
        v.terms.insert(w, Rational::one());
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockWord, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &FockWord) -> Rational {
        self.terms.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, w: FockWord, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, c: &Rational, other: &FockVector) {
        if c.is_zero() {
            return;
        }
        for (w, x) in &other.terms {
            self.add_term(w.clone(), c * x);
        }
    }

    pub fn add(&mut self, other: &FockVector) {
        self.add_scaled(&Rational::one(), other);
    }

    pub fn sub(&mut self, other: &FockVector) {
        self.add_scaled(&-Rational::one(), other);
    }

    pub fn scaled(&self, c: &Rational) -> FockVector {
        let mut out = FockVector::new();
        out.add_scaled(c, self);
        out
    }

    pub fn weights(&self) -> Vec<usize> {
        let mut ws: Vec<usize> = self.terms.keys().map(|w| w.weight()).collect();
        ws.sort_unstable();
        ws.dedup();
        ws
    }

    /// Common weight of all terms; `None` for the zero vector.
    pub fn weight(&self) -> Result<Option<usize>> {
        match self.weights().as_slice() {
            [] => Ok(None),
            [w] => Ok(Some(*w)),
            ws => Err(Error::Inhomogeneous(format!("mixed conformal weights {ws:?}"))),
        }
    }

    /// Splits into components keyed by tri-degree.
    pub fn by_tridegree(&self, m: &SurfaceModel) -> BTreeMap<TriDegree, FockVector> {
        let mut out: BTreeMap<TriDegree, FockVector> = BTreeMap::new();
        for (w, c) in &self.terms {
            out.entry(tridegree(m, w)).or_default().add_term(w.clone(), c.clone());
        }
        out
    }

    /// Splits into components keyed by G-degree.
    pub fn by_gdeg(&self, m: &SurfaceModel) -> BTreeMap<i64, FockVector> {
        let mut out: BTreeMap<i64, FockVector> = BTreeMap::new();
        for (w, c) in &self.terms {
            out.entry(tridegree(m, w).k).or_default().add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn format(&self, m: &SurfaceModel) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => s.push('-'),
                (0, false) => {}
                (_, true) => s.push_str(" - "),
                (_, false) => s.push_str(" + "),
            }
            if !mag.is_one() {
                s.push_str(&format_rational(&mag));
                s.push(' ');
            }
            s.push_str(&w.format(m));
        }
        s
    }
}

/// Basis of one weight component, with reverse index and tri-degrees.
#[derive(Clone, Debug)]
pub struct Basis {
    pub weight: usize,
    pub words: Vec<FockWord>,
    pub tri: Vec<TriDegree>,
    index: HashMap<FockWord, usize>,
}

impl Basis {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn index_of(&self, w: &FockWord) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn to_sparse(&self, v: &FockVector) -> Result<SparseVec> {
        let mut out = SparseVec::new();
        for (w, c) in v.iter() {
            let i = self.index_of(w).ok_or_else(|| {
                Error::Inhomogeneous(format!("word of weight {} in weight-{} space", w.weight(), self.weight))
            })?;
            out.add_at(i, c.clone());
        }
        Ok(out)
    }

    pub fn to_fock(&self, v: &SparseVec) -> FockVector {
        let mut out = FockVector::new();
        for (i, c) in v.iter() {
            out.add_term(self.words[i].clone(), c.clone());
        }
        out
    }
}

/// All canonical words of weight `n`, sorted.
pub fn enumerate_words(m: &SurfaceModel, n: usize) -> Vec<FockWord> {
    // generators in canonical order
    let mut gens: Vec<Gen> = Vec::new();
    for part in (1..=n as u32).rev() {
        for c in 0..m.dim() {
            gens.push(Gen::new(part, c));
        }
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(m: &SurfaceModel, gens: &[Gen], start: usize, left: usize, cur: &mut Vec<Gen>, out: &mut Vec<FockWord>) {
        if left == 0 {
            out.push(FockWord { gens: cur.clone() });
            return;
        }
        for i in start..gens.len() {
            let g = gens[i];
            if g.n as usize > left {
                continue;
            }
            cur.push(g);
            let next = if m.is_odd(g.class) { i + 1 } else { i };
            rec(m, gens, next, left - g.n as usize, cur, out);
            cur.pop();
        }
    }
    rec(m, &gens, 0, n, &mut cur, &mut out);
    out.sort();
    out
}

pub fn enumerate_basis(m: &SurfaceModel, n: usize) -> Vec<(FockWord, TriDegree)> {
    enumerate_words(m, n)
        .into_iter()
        .map(|w| {
            let t = tridegree(m, &w);
            (w, t)
        })
        .collect()
}

/// `(1/n!) q_1(1)^n 1`
pub fn unit_vector(m: &SurfaceModel, n: usize) -> FockVector {
    let Some(u) = m.unit_index() else {
        return FockVector::new();
    };
    let w = FockWord::from_sorted(vec![Gen::new(1, u); n]);
    let f = Rational::from_integer(crate::exact::factorial(n as u64));
    let mut v = FockVector::new();
    v.add_term(w, f.recip());
    v
}

/// A surface model together with cached weight-component bases.
#[derive(Debug)]
pub struct FockSpace {
    model: Arc<SurfaceModel>,
    cap: usize,
    bases: RwLock<BTreeMap<usize, Arc<Basis>>>,
}

impl FockSpace {
    pub fn new(model: Arc<SurfaceModel>) -> Self {
        Self::with_cap(model, DEFAULT_BASIS_CAP)
    }

    pub fn with_cap(model: Arc<SurfaceModel>, cap: usize) -> Self {
        FockSpace {
            model,
            cap,
            bases: RwLock::new(BTreeMap::new()),
        }
    }

    pub fn model(&self) -> &SurfaceModel {
        &self.model
    }

    pub fn model_arc(&self) -> Arc<SurfaceModel> {
        self.model.clone()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn check_weight(&self, n: usize) -> Result<()> {
        if n > self.cap {
            Err(Error::WeightCap {
                requested: n,
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }

    pub fn basis(&self, n: usize) -> Result<Arc<Basis>> {
        self.check_weight(n)?;
        if let Some(b) = self.bases.read().expect("basis cache poisoned").get(&n) {
            return Ok(b.clone());
        }
        let words = enumerate_words(&self.model, n);
        let tri = words.iter().map(|w| tridegree(&self.model, w)).collect();
        let index = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let b = Arc::new(Basis {
            weight: n,
            words,
            tri,
            index,
        });
        let mut guard = self.bases.write().expect("basis cache poisoned");
        Ok(guard.entry(n).or_insert(b).clone())
    }

    pub fn unit(&self, n: usize) -> FockVector {
        unit_vector(&self.model, n)
    }
}

// --- text forms -------------------------------------------------------

struct Cursor {
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    fn new(src: &str) -> Self {
        Cursor {
            chars: src.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected {c:?}")))
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let start = self.pos;
        while self.peek().is_some_and(&f) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }
}

fn parse_word_at(m: &SurfaceModel, cur: &mut Cursor) -> Result<Vec<(i64, usize)>> {
    if cur.peek() == Some('v') {
        let tok = cur.take_while(|c| c.is_ascii_alphabetic());
        if tok != "vac" {
            return Err(cur.err(format!("unknown token {tok:?}")));
        }
        return Ok(Vec::new());
    }
    let mut seq = Vec::new();
    loop {
        cur.expect('q')?;
        let digits = cur.take_while(|c| c.is_ascii_digit() || c == '-');
        let n: i64 = digits.parse().map_err(|_| cur.err(format!("bad index {digits:?}")))?;
        cur.expect('(')?;
        let label = cur.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
        let class = m.index_of(&label)?;
        cur.expect(')')?;
        seq.push((n, class));
        if !cur.eat('.') {
            break;
        }
    }
    Ok(seq)
}

/// Parses a single word such as `"q3(p).q1(a).q1(1)"` (or `"vac"`), in any
/// order; the result is the signed canonical word or zero.
pub fn parse_word(m: &SurfaceModel, s: &str) -> Result<FockVector> {
    let mut cur = Cursor::new(s);
    let seq = parse_word_at(m, &mut cur)?;
    if !cur.at_end() {
        return Err(cur.err("trailing input"));
    }
    seq_to_vector(m, &seq)
}

fn seq_to_vector(m: &SurfaceModel, seq: &[(i64, usize)]) -> Result<FockVector> {
    Ok(match normalize(m, seq)? {
        None => FockVector::new(),
        Some((neg, w)) => {
            let mut v = FockVector::new();
            v.add_term(w, if neg { -Rational::one() } else { Rational::one() });
            v
        }
    })
}

/// Parses a signed sum of rational multiples of words, for example
/// `"1/2 q2(1) - q1(a).q1(b)"`. Whitespace is ignored.
pub fn parse_vector(m: &SurfaceModel, s: &str) -> Result<FockVector> {
    let mut cur = Cursor::new(s);
    let mut out = FockVector::new();
    if cur.at_end() {
        return Err(cur.err("empty expression"));
    }
    let mut first = true;
    while !cur.at_end() {
        let mut neg = false;
        if cur.eat('-') {
            neg = true;
        } else if !cur.eat('+') && !first {
            return Err(cur.err("expected '+' or '-'"));
        }
        first = false;
        let mut coeff = Rational::one();
        if cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            let lit = cur.take_while(|c| c.is_ascii_digit() || c == '/');
            coeff = parse_rational(&lit).map_err(|_| cur.err(format!("bad coefficient {lit:?}")))?;
            cur.eat('*');
        }
        if neg {
            coeff = -coeff;
        }
        let seq = parse_word_at(m, &mut cur)?;
        out.add_scaled(&coeff, &seq_to_vector(m, &seq)?);
    }
    Ok(out)
}

/// Basis sizes from the generating function
/// `∏_n (1 + t^n)^{#odd} / (1 - t^n)^{#even}`, computed by series
/// multiplication; independent of the word enumerator.
pub fn basis_size_series(n_even: usize, n_odd: usize, max_weight: usize) -> Vec<u128> {
    let mut series = vec![0u128; max_weight + 1];
    series[0] = 1;
    for part in 1..=max_weight {
        for _ in 0..n_odd {
            // multiply by (1 + t^part)
            for w in (part..=max_weight).rev() {
                series[w] += series[w - part];
            }
        }
        for _ in 0..n_even {
            // multiply by 1/(1 - t^part)
            for w in part..=max_weight {
                series[w] += series[w - part];
            }
        }
    }
    series
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{elliptic_model, genus2_model};
    use proptest::prelude::*;

    fn counts(m: &SurfaceModel) -> (usize, usize) {
        let odd = (0..m.dim()).filter(|&i| m.is_odd(i)).count();
        (m.dim() - odd, odd)
    }

    #[test]
    fn normalize_examples() {
        let m = elliptic_model();
        let (one, a, b) = (0, 1, 2);
        let (neg, w) = normalize(&m, &[(1, a), (2, one)]).unwrap().unwrap();
        assert!(!neg);
        assert_eq!(w.format(&m), "q2(1).q1(a)");
        assert!(normalize(&m, &[(1, a), (1, a)]).unwrap().is_none());
        let (neg, w) = normalize(&m, &[(1, b), (1, a)]).unwrap().unwrap();
        assert!(neg);
        assert_eq!(w.format(&m), "q1(a).q1(b)");
        assert_eq!(normalize(&m, &[(0, a)]), Err(Error::NonPositiveIndex(0)));
    }

    #[test]
    fn basis_examples() {
        let m = elliptic_model();
        let b0 = enumerate_basis(&m, 0);
        assert_eq!(b0, vec![(FockWord::vacuum(), TriDegree::new(0, 0, 0))]);
        let b2 = enumerate_words(&m, 2);
        assert_eq!(b2.len(), 12);
        assert_eq!(b2.iter().filter(|w| w.len() == 1).count(), 4);
        assert_eq!(b2.iter().filter(|w| w.len() == 2).count(), 8);
        assert_eq!(enumerate_words(&m, 3).len(), 32);
    }

    #[test]
    fn tridegree_examples() {
        let m2 = genus2_model();
        let p = m2.index_of("p").unwrap();
        let w = FockWord::from_sorted(vec![Gen::new(2, p)]);
        assert_eq!(tridegree(&m2, &w), TriDegree::new(2, 4, 3));
        let m = elliptic_model();
        for n in 0..5 {
            let w = FockWord::from_sorted(vec![Gen::new(1, 0); n]);
            assert_eq!(tridegree(&m, &w), TriDegree::new(n as i64, 0, 0));
        }
        let w = FockWord::from_sorted(vec![Gen::new(2, 0)]);
        assert_eq!(tridegree(&m, &w), TriDegree::new(2, 2, 1));
    }

    #[test]
    fn basis_counts_match_series() {
        for m in [elliptic_model(), genus2_model()] {
            let (e, o) = counts(&m);
            let series = basis_size_series(e, o, 5);
            for (n, &expected) in series.iter().enumerate() {
                assert_eq!(enumerate_words(&m, n).len() as u128, expected, "weight {n}");
            }
        }
    }

    #[test]
    fn unit_vectors() {
        let m = elliptic_model();
        assert_eq!(unit_vector(&m, 0), FockVector::vacuum());
        let v = unit_vector(&m, 2);
        assert_eq!(v.format(&m), "1/2 q1(1).q1(1)");
        assert_eq!(unit_vector(&m, 3).format(&m), "1/6 q1(1).q1(1).q1(1)");
    }

    #[test]
    fn parse_and_print() {
        let m = elliptic_model();
        let v = parse_vector(&m, "1/2 q2(1) - q1(b).q1(a)").unwrap();
        assert_eq!(v.format(&m), "1/2 q2(1) + q1(a).q1(b)");
        let w = parse_word(&m, "q1(1).q3(p)").unwrap();
        assert_eq!(w.format(&m), "q3(p).q1(1)");
        assert_eq!(parse_word(&m, "vac").unwrap(), FockVector::vacuum());
        assert!(matches!(parse_vector(&m, "q1(zz)"), Err(Error::UnknownClass(_))));
        assert!(matches!(parse_vector(&m, "q1(a"), Err(Error::Parse { .. })));
        assert!(matches!(parse_vector(&m, "q0(a)"), Err(Error::NonPositiveIndex(0))));
        let back = parse_vector(&m, &v.format(&m)).unwrap();
        assert_eq!(back, v);
    }

    fn arb_seq() -> impl Strategy<Value = Vec<(i64, usize)>> {
        prop::collection::vec((1i64..4, 0usize..4), 0..6)
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(seq in arb_seq()) {
            let m = elliptic_model();
            if let Some((_, w)) = normalize(&m, &seq).unwrap() {
                let again: Vec<(i64, usize)> = w.gens().iter().map(|g| (g.n as i64, g.class)).collect();
                let (neg, w2) = normalize(&m, &again).unwrap().unwrap();
                prop_assert!(!neg);
                prop_assert_eq!(w2, w);
            }
        }

        #[test]
        fn tridegree_is_additive(a in arb_seq(), b in arb_seq()) {
            let m = elliptic_model();
            let joined: Vec<_> = a.iter().chain(b.iter()).copied().collect();
            if let (Some((_, wa)), Some((_, wb)), Some((_, wj))) = (
                normalize(&m, &a).unwrap(),
                normalize(&m, &b).unwrap(),
                normalize(&m, &joined).unwrap(),
            ) {
                prop_assert_eq!(tridegree(&m, &wa) + tridegree(&m, &wb), tridegree(&m, &wj));
            }
        }

        #[test]
        fn prepend_agrees_with_normalize(seq in arb_seq(), n in 1u32..4, c in 0usize..4) {
            let m = elliptic_model();
            if let Some((neg, w)) = normalize(&m, &seq).unwrap() {
                let mut full = vec![(n as i64, c)];
                full.extend(w.gens().iter().map(|g| (g.n as i64, g.class)));
                let expected = normalize(&m, &full).unwrap();
                let got = w.prepend(&m, Gen::new(n, c));
                let _ = neg;
                prop_assert_eq!(got, expected);
            }
        }
    }
}
