//! Exact rational scalars, sparse vectors, column-sparse matrices and an
//! incremental span tracker with witnesses.
//!
//! Everything here is arbitrary precision; there is no floating point
//! anywhere in the engine.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Reduced fraction with positive denominator.
pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"`; the result is reduced.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::BadRational(s.to_string());
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Canonical text form: `p/q`, with `q` omitted when it is 1.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: i64, k: i64) -> Rational {
    if k < 0 || n < 0 || k > n {
        return Rational::zero();
    }
    Rational::from_integer(factorial(n as u64) / (factorial(k as u64) * factorial((n - k) as u64)))
}

/// Serde adapter storing a rational as its canonical string.
pub mod rational_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Lit {
            S(String),
            I(i64),
        }
        match Lit::deserialize(d)? {
            Lit::S(s) => parse_rational(&s).map_err(serde::de::Error::custom),
            Lit::I(i) => Ok(int(i)),
        }
    }
}

/// Sparse vector over nonnegative indices; zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SparseVec {
    entries: BTreeMap<usize, Rational>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(i: usize) -> Self {
        let mut v = Self::new();
        v.entries.insert(i, Rational::one());
        v
    }

    pub fn from_dense(values: &[Rational]) -> Self {
        let mut v = Self::new();
        for (i, x) in values.iter().enumerate() {
            v.add_at(i, x.clone());
        }
        v
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, Rational)>>(pairs: I) -> Self {
        let mut v = Self::new();
        for (i, x) in pairs {
            v.add_at(i, x);
        }
        v
    }

    pub fn to_dense(&self, dim: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); dim];
        for (&i, x) in &self.entries {
            if i < dim {
                out[i] = x.clone();
            }
        }
        out
    }

    pub fn get(&self, i: usize) -> Rational {
        self.entries.get(&i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, i: usize) -> Option<&Rational> {
        self.entries.get(&i)
    }

    pub fn set(&mut self, i: usize, x: Rational) {
        if x.is_zero() {
            self.entries.remove(&i);
        } else {
            self.entries.insert(i, x);
        }
    }

    pub fn add_at(&mut self, i: usize, x: Rational) {
        if x.is_zero() {
            return;
        }
        let slot = self.entries.entry(i).or_insert_with(Rational::zero);
        *slot += x;
        if slot.is_zero() {
            self.entries.remove(&i);
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, c: &Rational, other: &SparseVec) {
        if c.is_zero() {
            return;
        }
        for (&i, x) in &other.entries {
            self.add_at(i, c * x);
        }
    }

    pub fn scaled(&self, c: &Rational) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(&i, x)| (i, x * c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.entries.iter().map(|(&i, x)| (i, x))
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn min_index(&self) -> Option<usize> {
        self.entries.keys().next().copied()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    pub fn dot(&self, other: &SparseVec) -> Rational {
        let (small, big) = if self.nnz() <= other.nnz() { (self, other) } else { (other, self) };
        let mut acc = Rational::zero();
        for (i, x) in small.iter() {
            if let Some(y) = big.coeff(i) {
                acc += x * y;
            }
        }
        acc
    }

    pub fn check_dim(&self, dim: usize, context: &'static str) -> Result<()> {
        match self.max_index() {
            Some(m) if m >= dim => Err(Error::DimensionMismatch {
                context,
                expected: dim,
                found: m + 1,
            }),
            _ => Ok(()),
        }
    }
}

impl std::ops::Add<&SparseVec> for &SparseVec {
    type Output = SparseVec;
    fn add(self, rhs: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.add_scaled(&Rational::one(), rhs);
        out
    }
}

impl std::ops::Sub<&SparseVec> for &SparseVec {
    type Output = SparseVec;
    fn sub(self, rhs: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.add_scaled(&-Rational::one(), rhs);
        out
    }
}

impl fmt::Display for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, (i, x)) in self.iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}: {}", i, format_rational(x))?;
        }
        write!(f, "}}")
    }
}

/// Column-sparse matrix; column `j` is the image of the `j`-th basis vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    nrows: usize,
    cols: Vec<SparseVec>,
}

impl Matrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Matrix {
            nrows,
            cols: vec![SparseVec::new(); ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Matrix {
            nrows: n,
            cols: (0..n).map(SparseVec::unit).collect(),
        }
    }

    pub fn from_columns(nrows: usize, cols: Vec<SparseVec>) -> Result<Self> {
        for c in &cols {
            c.check_dim(nrows, "matrix column")?;
        }
        Ok(Matrix { nrows, cols })
    }

    pub fn from_rows(rows: &[Vec<Rational>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut m = Matrix::zeros(nrows, ncols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch {
                    context: "matrix row length",
                    expected: ncols,
                    found: row.len(),
                });
            }
            for (c, x) in row.iter().enumerate() {
                m.cols[c].add_at(r, x.clone());
            }
        }
        Ok(m)
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self> {
        let rows: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &SparseVec {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[SparseVec] {
        &self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.cols[c].get(r)
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(SparseVec::is_zero)
    }

    pub fn apply(&self, v: &SparseVec) -> Result<SparseVec> {
        v.check_dim(self.ncols(), "matrix-vector product")?;
        Ok(self.apply_unchecked(v))
    }

    pub(crate) fn apply_unchecked(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (j, x) in v.iter() {
            out.add_scaled(x, &self.cols[j]);
        }
        out
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &Matrix) -> Result<Matrix> {
        if other.nrows != self.ncols() {
            return Err(Error::DimensionMismatch {
                context: "matrix composition",
                expected: self.ncols(),
                found: other.nrows,
            });
        }
        Ok(Matrix {
            nrows: self.nrows,
            cols: other.cols.iter().map(|c| self.apply_unchecked(c)).collect(),
        })
    }

    pub fn scaled(&self, c: &Rational) -> Matrix {
        Matrix {
            nrows: self.nrows,
            cols: self.cols.iter().map(|v| v.scaled(c)).collect(),
        }
    }

    pub fn add_scaled(&mut self, c: &Rational, other: &Matrix) -> Result<()> {
        if self.nrows != other.nrows || self.ncols() != other.ncols() {
            return Err(Error::DimensionMismatch {
                context: "matrix sum",
                expected: self.nrows * self.ncols(),
                found: other.nrows * other.ncols(),
            });
        }
        for (a, b) in self.cols.iter_mut().zip(&other.cols) {
            a.add_scaled(c, b);
        }
        Ok(())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.ncols(), self.nrows);
        for (j, col) in self.cols.iter().enumerate() {
            for (i, x) in col.iter() {
                t.cols[i].add_at(j, x.clone());
            }
        }
        t
    }

    pub fn rank(&self) -> usize {
        let mut sb = SpanBuilder::new(self.nrows);
        for c in &self.cols {
            sb.add_unchecked(c);
        }
        sb.rank()
    }
}

/// Solves `A x = b` exactly. Returns `None` when `b` is outside the column
/// span. Among multiple solutions the one supported on the earliest
/// independent columns is returned (free variables are zero).
pub fn solve(a: &Matrix, b: &SparseVec) -> Result<Option<SparseVec>> {
    b.check_dim(a.nrows(), "right-hand side")?;
    let mut sb = SpanBuilder::new(a.nrows());
    for c in a.columns() {
        sb.add_unchecked(c);
    }
    Ok(sb.express(b))
}

#[derive(Clone, Debug)]
struct PivotRow {
    pivot: usize,
    vec: SparseVec,
    witness: SparseVec,
}

/// Outcome of [`SpanBuilder::add`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanAdd {
    pub grew: bool,
    /// Expression of the inserted vector in the earlier insertions (by
    /// insertion index) when it did not enlarge the span.
    pub coords: Option<SparseVec>,
}

/// Incremental row-reduction of a growing set of vectors.
///
/// Rows are kept in reduced echelon form with unit pivots, pivot = smallest
/// index of the residual. Every row remembers how it was obtained from the
/// inserted vectors, so membership queries return explicit coordinates.
#[derive(Clone, Debug)]
pub struct SpanBuilder {
    dim: usize,
    rows: Vec<PivotRow>,
    pivot_row: BTreeMap<usize, usize>,
    inserted: usize,
    relations: Vec<SparseVec>,
}

impl SpanBuilder {
    pub fn new(dim: usize) -> Self {
        SpanBuilder {
            dim,
            rows: Vec::new(),
            pivot_row: BTreeMap::new(),
            inserted: 0,
            relations: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.dim
    }

    /// Relations `e_k - coords_k` among the insertions, one per insertion
    /// that did not grow the span. They span the kernel of the map from
    /// insertion coordinates to the ambient space.
    pub fn relations(&self) -> &[SparseVec] {
        &self.relations
    }

    /// Pivot indices in increasing order.
    pub fn pivots(&self) -> Vec<usize> {
        self.pivot_row.keys().copied().collect()
    }

    fn reduce(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut residual = v.clone();
        let mut combo = SparseVec::new();
        let hits: Vec<usize> = v.indices().filter(|i| self.pivot_row.contains_key(i)).collect();
        for p in hits {
            let c = residual.get(p);
            if c.is_zero() {
                continue;
            }
            let row = &self.rows[self.pivot_row[&p]];
            residual.add_scaled(&-c.clone(), &row.vec);
            combo.add_scaled(&c, &row.witness);
        }
        (residual, combo)
    }

    pub fn add(&mut self, v: &SparseVec) -> Result<SpanAdd> {
        v.check_dim(self.dim, "span insertion")?;
        Ok(self.add_unchecked(v))
    }

    pub(crate) fn add_unchecked(&mut self, v: &SparseVec) -> SpanAdd {
        let idx = self.inserted;
        self.inserted += 1;
        let (residual, combo) = self.reduce(v);
        let Some(pivot) = residual.min_index() else {
            let mut rel = SparseVec::unit(idx);
            rel.add_scaled(&-Rational::one(), &combo);
            self.relations.push(rel);
            return SpanAdd {
                grew: false,
                coords: Some(combo),
            };
        };
        let lead = residual.get(pivot);
        let inv = lead.recip();
        let vec = residual.scaled(&inv);
        let mut witness = SparseVec::unit(idx);
        witness.add_scaled(&-Rational::one(), &combo);
        let witness = witness.scaled(&inv);
        for row in &mut self.rows {
            let a = row.vec.get(pivot);
            if !a.is_zero() {
                let neg = -a;
                row.vec.add_scaled(&neg, &vec);
                row.witness.add_scaled(&neg, &witness);
            }
        }
        self.pivot_row.insert(pivot, self.rows.len());
        self.rows.push(PivotRow { pivot, vec, witness });
        SpanAdd {
            grew: true,
            coords: None,
        }
    }

    /// Coordinates of `v` in the inserted vectors, if it lies in the span.
    pub fn express(&self, v: &SparseVec) -> Option<SparseVec> {
        let (residual, combo) = self.reduce(v);
        residual.is_zero().then_some(combo)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.is_zero()
    }

    /// Row-reduced basis of the span (pivot, row) in pivot order.
    pub fn echelon_rows(&self) -> Vec<(usize, SparseVec)> {
        let mut out: Vec<_> = self.rows.iter().map(|r| (r.pivot, r.vec.clone())).collect();
        out.sort_by_key(|(p, _)| *p);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(xs: &[Rational]) -> SparseVec {
        SparseVec::from_dense(xs)
    }

    #[test]
    fn rational_text_roundtrip() {
        assert_eq!(format_rational(&rat(6, -4)), "-3/2");
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert_eq!(parse_rational(" -3/2 ").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("0/7").unwrap(), int(0));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn solve_identity() {
        let a = Matrix::identity(3);
        let b = v(&[rat(1, 2), int(0), int(-3)]);
        assert_eq!(solve(&a, &b).unwrap(), Some(b));
    }

    #[test]
    fn solve_inconsistent() {
        let a = Matrix::from_int_rows(&[&[1, 1], &[2, 2]]).unwrap();
        assert_eq!(solve(&a, &v(&[int(1), int(3)])).unwrap(), None);
    }

    #[test]
    fn solve_singular_free_variable_zero() {
        // hand back-substitution: 2 x0 = 1, 0 = 0, x1 free -> 0
        let a = Matrix::from_int_rows(&[&[2, 0], &[0, 0]]).unwrap();
        let x = solve(&a, &v(&[int(1), int(0)])).unwrap().unwrap();
        assert_eq!(x, v(&[rat(1, 2), int(0)]));
    }

    #[test]
    fn solve_dimension_mismatch() {
        let a = Matrix::identity(2);
        let err = solve(&a, &SparseVec::unit(5)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, found: 6, .. }));
    }

    #[test]
    fn span_examples() {
        let mut sb = SpanBuilder::new(2);
        assert!(sb.add(&v(&[int(1), int(0)])).unwrap().grew);
        let r = sb.add(&v(&[int(2), int(0)])).unwrap();
        assert!(!r.grew);
        assert_eq!(r.coords.unwrap(), SparseVec::unit(0).scaled(&int(2)));

        // elimination oracle: (3,5) = 3 (1,1) + 2 (0,1)
        let mut sb = SpanBuilder::new(2);
        sb.add(&v(&[int(1), int(1)])).unwrap();
        sb.add(&v(&[int(0), int(1)])).unwrap();
        let r = sb.add(&v(&[int(3), int(5)])).unwrap();
        assert!(!r.grew);
        assert_eq!(r.coords.unwrap(), v(&[int(3), int(2)]));
        assert_eq!(sb.relations().len(), 1);
    }

    #[test]
    fn span_dimension_mismatch() {
        let mut sb = SpanBuilder::new(2);
        assert!(sb.add(&SparseVec::unit(2)).is_err());
    }

    fn small_rat() -> impl Strategy<Value = Rational> {
        (-9i64..=9, 1i64..=7).prop_map(|(n, d)| rat(n, d))
    }

    fn small_vec(dim: usize) -> impl Strategy<Value = SparseVec> {
        proptest::collection::vec(small_rat(), dim).prop_map(|xs| SparseVec::from_dense(&xs))
    }

    proptest! {
        #[test]
        fn rational_field_laws(a in small_rat(), b in small_rat(), c in small_rat()) {
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }

        #[test]
        fn solve_is_exact(cols in proptest::collection::vec(small_vec(4), 1..6), x in small_vec(6)) {
            let a = Matrix::from_columns(4, cols).unwrap();
            let x = SparseVec::from_pairs(x.iter().filter(|(i, _)| *i < a.ncols()).map(|(i, q)| (i, q.clone())));
            let b = a.apply(&x).unwrap();
            let sol = solve(&a, &b).unwrap().expect("b is in the span by construction");
            prop_assert_eq!(a.apply(&sol).unwrap(), b);
        }

        #[test]
        fn span_rank_permutation_invariant(vs in proptest::collection::vec(small_vec(3), 0..6), seed in any::<u64>()) {
            let mut a = SpanBuilder::new(3);
            for x in &vs { a.add(x).unwrap(); }
            let mut perm: Vec<usize> = (0..vs.len()).collect();
            let mut s = seed;
            for i in (1..perm.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let mut b = SpanBuilder::new(3);
            for &i in &perm { b.add(&vs[i]).unwrap(); }
            prop_assert_eq!(a.rank(), b.rank());
        }

        #[test]
        fn span_coords_reproduce(vs in proptest::collection::vec(small_vec(3), 1..7)) {
            let mut sb = SpanBuilder::new(3);
            for (k, x) in vs.iter().enumerate() {
                let r = sb.add(x).unwrap();
                if let Some(c) = r.coords {
                    let mut rebuilt = SparseVec::new();
                    for (i, q) in c.iter() {
                        prop_assert!(i < k);
                        rebuilt.add_scaled(q, &vs[i]);
                    }
                    prop_assert_eq!(&rebuilt, x);
                }
            }
        }
    }
}
