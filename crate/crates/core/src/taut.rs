//! Multiplication by tautological classes and the cup product of `S^[n]`.
//!
//! `α^[•]` is computed through Lehn's commutator
//! `[α^[•], q_1(β)] = exp(ad ∂) q_1(αβ)` together with `[α^[•], ∂] = 0`,
//! by induction on the weight and, inside a weight, on cohomological degree:
//! every vector is written as `Σ_β q_1(β) y_β + ∂ z`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{factorial, format_rational, Matrix, Rational, SparseVec, SpanBuilder};
use crate::fock::{tridegree, FockSpace, FockVector, FockWord, Gen};
use crate::heisenberg::Heisenberg;
use crate::surface::SurfaceModel;

fn sgn(neg: bool) -> Rational {
    if neg {
        -Rational::one()
    } else {
        Rational::one()
    }
}

fn inv_factorial(j: u32) -> Rational {
    Rational::from_integer(factorial(j as u64)).recip()
}

/// Cap on the `j`-sum of `exp(ad ∂)` at weight `n`.
pub fn ad_cap(n: usize) -> u32 {
    2 * n as u32 + 2
}

/// `(α, l)`: the class `α^[n]_l` of degree `deg α + 2l - 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TautSpec {
    pub class: usize,
    pub l: u32,
}

impl TautSpec {
    pub fn degree_shift(&self, m: &SurfaceModel) -> i64 {
        m.degree(self.class) as i64 + 2 * self.l as i64 - 4
    }
}

/// Column of the spanning system `q_1(β) u` or `∂ u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Column {
    Q1 { beta: usize, u: usize },
    Del { u: usize },
}

/// Column orders for the decomposition system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ColumnOrder {
    /// `q_1` columns first, then `∂` columns.
    Q1First,
    /// `∂` columns first.
    DelFirst,
    /// Everything reversed.
    Reversed,
}

struct System {
    cols: Vec<Column>,
    span: SpanBuilder,
}

/// `v = Σ_β q_1(β) y_β + ∂ z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub y: BTreeMap<usize, FockVector>,
    pub z: FockVector,
}

pub struct Taut {
    h: Arc<Heisenberg>,
    totals: RwLock<HashMap<(usize, usize), Arc<Matrix>>>,
    exps: RwLock<HashMap<(SparseVec, usize), Arc<Matrix>>>,
    systems: RwLock<HashMap<(usize, i64, ColumnOrder), Arc<System>>>,
}

impl fmt::Debug for Taut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Taut").field("model", &self.model().name()).finish()
    }
}

impl Taut {
    pub fn new(h: Arc<Heisenberg>) -> Self {
        Taut {
            h,
            totals: RwLock::new(HashMap::new()),
            exps: RwLock::new(HashMap::new()),
            systems: RwLock::new(HashMap::new()),
        }
    }

    pub fn for_model(m: SurfaceModel) -> Self {
        Self::new(Arc::new(Heisenberg::for_model(m)))
    }

    /// Engine whose Fock bases refuse weights above `cap`.
    pub fn with_cap(m: SurfaceModel, cap: usize) -> Self {
        let space = Arc::new(FockSpace::with_cap(Arc::new(m), cap));
        Self::new(Arc::new(Heisenberg::new(space)))
    }

    pub fn heisenberg(&self) -> &Heisenberg {
        &self.h
    }

    pub fn model(&self) -> &SurfaceModel {
        self.h.model()
    }

    // --- decomposition ----------------------------------------------------

    fn system(&self, n: usize, d: i64, order: ColumnOrder) -> Result<Arc<System>> {
        if let Some(s) = self.systems.read().expect("system cache poisoned").get(&(n, d, order)) {
            return Ok(s.clone());
        }
        let m = self.model();
        let space = self.h.space();
        let basis = space.basis(n)?;
        let prev = space.basis(n - 1)?;
        let mut q1 = Vec::new();
        for beta in 0..m.dim() {
            for (u, t) in prev.tri.iter().enumerate() {
                if t.d + m.degree(beta) as i64 == d {
                    q1.push(Column::Q1 { beta, u });
                }
            }
        }
        let del: Vec<Column> = (0..basis.len())
            .filter(|&u| basis.tri[u].d == d - 2)
            .map(|u| Column::Del { u })
            .collect();
        let cols: Vec<Column> = match order {
            ColumnOrder::Q1First => q1.into_iter().chain(del).collect(),
            ColumnOrder::DelFirst => del.into_iter().chain(q1).collect(),
            ColumnOrder::Reversed => q1.into_iter().chain(del).rev().collect(),
        };
        let dmat = self.h.boundary_matrix(n)?;
        let mut span = SpanBuilder::new(basis.len());
        for c in &cols {
            let img = match *c {
                Column::Q1 { beta, u } => {
                    let v = self.h.create_basis(1, beta, &FockVector::word(prev.words[u].clone()));
                    basis.to_sparse(&v)?
                }
                Column::Del { u } => dmat.column(u).clone(),
            };
            span.add(&img)?;
        }
        let sys = Arc::new(System { cols, span });
        Ok(self
            .systems
            .write()
            .expect("system cache poisoned")
            .entry((n, d, order))
            .or_insert(sys)
            .clone())
    }

    /// Coefficients over the columns of the degree-`d` system, optionally
    /// shifted by a combination of kernel relations.
    fn solve_in(&self, n: usize, d: i64, target: &SparseVec, order: ColumnOrder, shift: &[Rational]) -> Result<(Arc<System>, SparseVec)> {
        let sys = self.system(n, d, order)?;
        let mut coords = sys.span.express(target).ok_or_else(|| {
            Error::Internal(format!(
                "weight {n}, degree {d}: vector is not in Σ q_1(β)H + ∂H (span rank {} of {})",
                sys.span.rank(),
                sys.span.dim()
            ))
        })?;
        for (rel, c) in sys.span.relations().iter().zip(shift) {
            coords.add_scaled(c, rel);
        }
        Ok((sys, coords))
    }

    pub fn decompose(&self, v: &FockVector) -> Result<Decomposition> {
        self.decompose_with(v, ColumnOrder::Q1First, &[])
    }

    /// Decomposition using a chosen column order; `shift` adds multiples of
    /// the kernel relations to obtain other valid preimages.
    pub fn decompose_with(&self, v: &FockVector, order: ColumnOrder, shift: &[Rational]) -> Result<Decomposition> {
        let n = match v.weight()? {
            Some(0) => return Err(Error::Precondition("decomposition needs weight n >= 1".into())),
            None => {
                return Ok(Decomposition {
                    y: BTreeMap::new(),
                    z: FockVector::new(),
                })
            }
            Some(n) => n,
        };
        let m = self.model();
        let space = self.h.space();
        let basis = space.basis(n)?;
        let prev = space.basis(n - 1)?;
        let mut y: BTreeMap<usize, FockVector> = BTreeMap::new();
        let mut z = FockVector::new();
        let mut by_degree: BTreeMap<i64, FockVector> = BTreeMap::new();
        for (w, c) in v.iter() {
            by_degree.entry(tridegree(m, w).d).or_default().add_term(w.clone(), c.clone());
        }
        for (d, part) in by_degree {
            let target = basis.to_sparse(&part)?;
            let (sys, coords) = self.solve_in(n, d, &target, order, shift)?;
            for (k, c) in coords.iter() {
                match sys.cols[k] {
                    Column::Q1 { beta, u } => y.entry(beta).or_default().add_term(prev.words[u].clone(), c.clone()),
                    Column::Del { u } => z.add_term(basis.words[u].clone(), c.clone()),
                }
            }
        }
        y.retain(|_, v| !v.is_zero());
        Ok(Decomposition { y, z })
    }

    // --- matrices ---------------------------------------------------------

    /// `Σ_j (1/j!) (ad ∂)^j q_1(x)` from weight `n` to `n + 1`.
    pub fn exp_ad_matrix(&self, x: &SparseVec, n: usize) -> Result<Arc<Matrix>> {
        let key = (x.clone(), n);
        if let Some(m) = self.exps.read().expect("exp cache poisoned").get(&key) {
            return Ok(m.clone());
        }
        let cap = ad_cap(n + 1);
        let terms = self.h.ad_boundary_matrices(x, n, cap + 1)?;
        if !terms[cap as usize + 1].is_zero() {
            return Err(Error::Internal(format!(
                "(ad ∂)^{} q_1 is nonzero at weight {n}; the exponential did not terminate",
                cap + 1
            )));
        }
        let mut acc = Matrix::zeros(terms[0].nrows(), terms[0].ncols());
        for (j, t) in terms.iter().take(cap as usize + 1).enumerate() {
            acc.add_scaled(&inv_factorial(j as u32), t)?;
        }
        let acc = Arc::new(acc);
        Ok(self.exps.write().expect("exp cache poisoned").entry(key).or_insert(acc).clone())
    }

    /// `T(q_1(β) u) = exp(ad ∂) q_1(αβ) u + (-1)^{|α||β|} q_1(β) T(u)` as a
    /// matrix from weight `n - 1` to `n`.
    fn pull_matrix(&self, a: usize, beta: usize, n: usize, prev_total: &Matrix) -> Result<Matrix> {
        let m = self.model();
        let ab = m.cup(&SparseVec::unit(a), &SparseVec::unit(beta));
        let mut f = if ab.is_zero() {
            let rows = self.h.space().basis(n)?.len();
            Matrix::zeros(rows, prev_total.ncols())
        } else {
            (*self.exp_ad_matrix(&ab, n - 1)?).clone()
        };
        let q1 = self.h.matrix_of(n - 1, n, |v| Ok(self.h.create_basis(1, beta, v)))?;
        let s = sgn(m.is_odd(a) && m.is_odd(beta));
        f.add_scaled(&s, &q1.compose(prev_total)?)?;
        Ok(f)
    }

    /// Matrix of multiplication by `β_a^[n]` (all degree components).
    pub fn total_matrix(&self, a: usize, n: usize) -> Result<Arc<Matrix>> {
        if let Some(mat) = self.totals.read().expect("taut cache poisoned").get(&(a, n)) {
            return Ok(mat.clone());
        }
        let mat = Arc::new(self.build_total(a, n)?);
        Ok(self
            .totals
            .write()
            .expect("taut cache poisoned")
            .entry((a, n))
            .or_insert(mat)
            .clone())
    }

    fn build_total(&self, a: usize, n: usize) -> Result<Matrix> {
        let space = self.h.space();
        let basis = space.basis(n)?;
        if n == 0 {
            return Ok(Matrix::zeros(1, 1));
        }
        let m = self.model();
        let prev_total = self.total_matrix(a, n - 1)?;
        let pulls: Vec<Matrix> = (0..m.dim())
            .into_par_iter()
            .map(|beta| self.pull_matrix(a, beta, n, &prev_total))
            .collect::<Result<_>>()?;
        let prev = space.basis(n - 1)?;
        let dmat = self.h.boundary_matrix(n)?;
        let mut order: Vec<usize> = (0..basis.len()).collect();
        order.sort_by_key(|&i| (basis.tri[i].d, i));
        let mut cols: Vec<Option<SparseVec>> = vec![None; basis.len()];
        for &i in &order {
            let w = &basis.words[i];
            let col = if let Some(p) = w.gens().iter().position(|g| g.n == 1) {
                let beta = w.gens()[p].class;
                let rest = w.without(p);
                let odd_before = w.gens()[..p].iter().filter(|g| m.is_odd(g.class)).count() % 2 == 1;
                let s = sgn(m.is_odd(beta) && odd_before);
                let u = prev.index_of(&rest).expect("sub-word is a basis word");
                pulls[beta].column(u).scaled(&s)
            } else {
                let d = basis.tri[i].d;
                let (sys, coords) = self.solve_in(n, d, &SparseVec::unit(i), ColumnOrder::Q1First, &[])?;
                let mut acc = SparseVec::new();
                for (k, c) in coords.iter() {
                    match sys.cols[k] {
                        Column::Q1 { beta, u } => acc.add_scaled(c, pulls[beta].column(u)),
                        Column::Del { u } => {
                            let tz = cols[u].as_ref().ok_or_else(|| {
                                Error::Internal("degree induction reached an unprocessed word".into())
                            })?;
                            acc.add_scaled(c, &dmat.apply(tz)?);
                        }
                    }
                }
                acc
            };
            cols[i] = Some(col);
        }
        Matrix::from_columns(basis.len(), cols.into_iter().map(|c| c.expect("all columns built")).collect())
    }

    /// Matrix of multiplication by `α^[n]_l` on weight `n`.
    pub fn component_matrix(&self, spec: TautSpec, n: usize) -> Result<Matrix> {
        let total = self.total_matrix(spec.class, n)?;
        let basis = self.h.space().basis(n)?;
        let shift = spec.degree_shift(self.model());
        let cols = total
            .columns()
            .iter()
            .enumerate()
            .map(|(j, col)| {
                let target = basis.tri[j].d + shift;
                SparseVec::from_pairs(col.iter().filter(|(i, _)| basis.tri[*i].d == target).map(|(i, c)| (i, c.clone())))
            })
            .collect();
        Matrix::from_columns(basis.len(), cols)
    }

    // --- vector level -----------------------------------------------------

    /// `α^[n] · v` for a class `α` and a weight-homogeneous `v`.
    pub fn taut_mul(&self, alpha: &SparseVec, v: &FockVector) -> Result<FockVector> {
        alpha.check_dim(self.model().dim(), "class coordinates")?;
        let Some(n) = v.weight()? else {
            return Ok(FockVector::new());
        };
        let basis = self.h.space().basis(n)?;
        let x = basis.to_sparse(v)?;
        let mut out = SparseVec::new();
        for (a, c) in alpha.iter() {
            out.add_scaled(c, &self.total_matrix(a, n)?.apply(&x)?);
        }
        Ok(basis.to_fock(&out))
    }

    /// Degree `D + deg α + 2l - 4` component of `α^[n] · v` for `v` of
    /// cohomological degree `D`.
    pub fn taut_component(&self, spec: TautSpec, v: &FockVector) -> Result<FockVector> {
        let m = self.model();
        if spec.class >= m.dim() {
            return Err(Error::IndexOutOfRange {
                context: "tautological class".into(),
                index: spec.class,
                size: m.dim(),
            });
        }
        let mut degrees: Vec<i64> = v.iter().map(|(w, _)| tridegree(m, w).d).collect();
        degrees.sort_unstable();
        degrees.dedup();
        let d = match degrees.as_slice() {
            [] => return Ok(FockVector::new()),
            [d] => *d,
            ds => return Err(Error::Inhomogeneous(format!("cohomological degrees {ds:?}"))),
        };
        let target = d + spec.degree_shift(m);
        let full = self.taut_mul(&SparseVec::unit(spec.class), v)?;
        let mut out = FockVector::new();
        for (w, c) in full.iter() {
            if tridegree(m, w).d == target {
                out.add_term(w.clone(), c.clone());
            }
        }
        Ok(out)
    }

    /// `α^[n]_l` itself, i.e. the component applied to the unit.
    pub fn taut_class(&self, spec: TautSpec, n: usize) -> Result<FockVector> {
        self.taut_component(spec, &self.h.space().unit(n))
    }

    /// Independent evaluation of `α^[n] · v` straight from the recursion:
    /// vector-level operators, a chosen decomposition column order and an
    /// optional kernel shift. Used to test that the result does not depend
    /// on the preimage.
    pub fn taut_mul_recursive(&self, a: usize, v: &FockVector, order: ColumnOrder, shift: &[Rational]) -> Result<FockVector> {
        let Some(n) = v.weight()? else {
            return Ok(FockVector::new());
        };
        if n == 0 {
            return Ok(FockVector::new());
        }
        let m = self.model();
        let dec = self.decompose_with(v, order, shift)?;
        let mut out = FockVector::new();
        for (&beta, y) in &dec.y {
            let ab = m.cup(&SparseVec::unit(a), &SparseVec::unit(beta));
            if !ab.is_zero() {
                out.add(&self.exp_ad_binomial(&ab, y, ad_cap(n))?);
            }
            let ty = self.taut_mul_recursive(a, y, order, shift)?;
            let s = sgn(m.is_odd(a) && m.is_odd(beta));
            out.add_scaled(&s, &self.h.create_basis(1, beta, &ty));
        }
        if !dec.z.is_zero() {
            let tz = self.taut_mul_recursive(a, &dec.z, order, shift)?;
            out.add(&self.h.apply_boundary(&tz));
        }
        Ok(out)
    }

    /// `Σ_j (1/j!) (ad ∂)^j q_1(x) y` through the binomial expansion
    /// `(ad ∂)^j F = Σ_i (-1)^i C(j,i) ∂^{j-i} F ∂^i`.
    fn exp_ad_binomial(&self, x: &SparseVec, y: &FockVector, cap: u32) -> Result<FockVector> {
        let mut dels = vec![y.clone()];
        for i in 1..=(cap + 1) as usize {
            let next = self.h.apply_boundary(&dels[i - 1]);
            dels.push(next);
        }
        let mut out = FockVector::new();
        for j in 0..=cap + 1 {
            let mut term = FockVector::new();
            for i in 0..=j {
                let mut t = self.h.create(1, x, &dels[i as usize]);
                for _ in 0..(j - i) {
                    t = self.h.apply_boundary(&t);
                }
                let c = crate::exact::binomial(j as i64, i as i64) * sgn(i % 2 == 1);
                term.add_scaled(&c, &t);
            }
            if j == cap + 1 {
                if !term.is_zero() {
                    return Err(Error::Internal("exp(ad ∂) did not terminate".into()));
                }
            } else {
                out.add_scaled(&inv_factorial(j), &term);
            }
        }
        Ok(out)
    }

    /// `1/(l-2)! Σ_i q_1(1)^i ((ad ∂)^{l-2} q_1(α)) q_1(1)^{n-1-i} 1`.
    pub fn unit_sandwich_sum(&self, spec: TautSpec, n: usize) -> Result<FockVector> {
        let m = self.model();
        let u = m
            .unit_index()
            .ok_or_else(|| Error::MalformedModel("no unit class".into()))?;
        if spec.l < 2 || n == 0 {
            return Ok(FockVector::new());
        }
        let j = spec.l - 2;
        let alpha = SparseVec::unit(spec.class);
        let mut out = FockVector::new();
        for i in 0..n {
            let mut v = FockVector::vacuum();
            for _ in 0..(n - 1 - i) {
                v = self.h.create_basis(1, u, &v);
            }
            v = self.h.apply_ad_boundary_pow(j, &alpha, &v);
            for _ in 0..i {
                v = self.h.create_basis(1, u, &v);
            }
            out.add(&v);
        }
        Ok(out.scaled(&inv_factorial(j)))
    }

    /// Generators `(α, l)` with `0 <= deg α^[n]_l <= 4n`, sorted by
    /// `(g(α), deg α, l)`.
    pub fn generators(&self, n: usize) -> Vec<TautSpec> {
        let m = self.model();
        let mut out = Vec::new();
        for a in 0..m.dim() {
            let d = m.degree(a) as i64;
            for l in 0..=(2 * n as i64 + 2) {
                let deg = d + 2 * l - 4;
                if (0..=4 * n as i64).contains(&deg) {
                    out.push(TautSpec { class: a, l: l as u32 });
                }
            }
        }
        out.sort_by_key(|s| (m.gdeg(s.class), m.degree(s.class), s.l, s.class));
        out
    }

    // --- cup table --------------------------------------------------------

    pub fn cup_table(&self, n: usize) -> Result<CupTable> {
        let space = self.h.space();
        let basis = space.basis(n)?;
        let dim = basis.len();
        let gens = self.generators(n);
        let mats: Vec<(TautSpec, Matrix)> = gens
            .par_iter()
            .map(|&g| self.component_matrix(g, n).map(|mat| (g, mat)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|(_, mat)| !mat.is_zero())
            .collect();

        let unit = basis.to_sparse(&space.unit(n))?;
        let mut span = SpanBuilder::new(dim);
        let mut monomials: Vec<Vec<TautSpec>> = Vec::new();
        let mut mono_mats: Vec<Matrix> = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        span.add(&unit)?;
        monomials.push(Vec::new());
        mono_mats.push(Matrix::identity(dim));
        queue.push_back(0usize);
        while let Some(idx) = queue.pop_front() {
            if span.is_full() {
                break;
            }
            for (g, gm) in &mats {
                let mat = gm.compose(&mono_mats[idx])?;
                let vec = mat.apply(&unit)?;
                if vec.is_zero() {
                    continue;
                }
                if !span.add(&vec)?.grew {
                    // keep insertion indices aligned with monomials
                    monomials.push(Vec::new());
                    mono_mats.push(Matrix::zeros(0, 0));
                    continue;
                }
                let mut word = monomials[idx].clone();
                word.push(*g);
                monomials.push(word);
                mono_mats.push(mat);
                queue.push_back(monomials.len() - 1);
            }
        }
        if !span.is_full() {
            return Err(Error::Internal(format!(
                "tautological classes span only {} of {} dimensions at weight {n}; quotient dimension {}",
                span.rank(),
                dim,
                dim - span.rank()
            )));
        }

        let mut mult = Vec::with_capacity(dim);
        let mut provenance = Vec::with_capacity(dim);
        for i in 0..dim {
            let coords = span
                .express(&SparseVec::unit(i))
                .ok_or_else(|| Error::Internal("full span cannot express a basis word".into()))?;
            let mut acc = Matrix::zeros(dim, dim);
            let mut prov = Vec::new();
            for (k, c) in coords.iter() {
                acc.add_scaled(c, &mono_mats[k])?;
                prov.push((c.clone(), monomials[k].clone()));
            }
            mult.push(acc);
            provenance.push(prov);
        }
        Ok(CupTable {
            n,
            words: basis.words.clone(),
            mult,
            provenance,
        })
    }
}

/// Boundary divisor class `q_1(1)^{n-2} q_2(1) 1`.
pub fn boundary_divisor_class(m: &SurfaceModel, n: usize) -> Result<FockVector> {
    if n < 2 {
        return Err(Error::Precondition(format!("boundary divisor needs n >= 2, got {n}")));
    }
    let u = m
        .unit_index()
        .ok_or_else(|| Error::MalformedModel("no unit class".into()))?;
    let mut gens = vec![Gen::new(2, u)];
    gens.extend(std::iter::repeat(Gen::new(1, u)).take(n - 2));
    Ok(FockVector::word(FockWord::from_sorted(gens)))
}

/// Structure constants of `H^*(S^[n])` in the Fock basis.
#[derive(Clone, Debug)]
pub struct CupTable {
    pub n: usize,
    pub words: Vec<FockWord>,
    /// `mult[i]` is multiplication by basis word `i`.
    pub mult: Vec<Matrix>,
    /// Expression of each basis word as a combination of monomials in the
    /// tautological generators applied to the unit.
    pub provenance: Vec<Vec<(Rational, Vec<TautSpec>)>>,
}

#[derive(Serialize)]
struct TableFile<'a> {
    model: &'a str,
    n: usize,
    basis: Vec<String>,
    products: Vec<ProductEntry>,
}

#[derive(Serialize)]
struct ProductEntry {
    i: usize,
    j: usize,
    terms: Vec<(String, String)>,
}

impl CupTable {
    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn product(&self, i: usize, j: usize) -> &SparseVec {
        self.mult[i].column(j)
    }

    pub fn multiply(&self, x: &SparseVec, y: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                out.add_scaled(&(a * b), self.product(i, j));
            }
        }
        out
    }

    /// Byte-stable JSON: products in `(i, j)` order, terms in word order.
    pub fn to_json(&self, m: &SurfaceModel) -> String {
        let basis: Vec<String> = self.words.iter().map(|w| w.format(m)).collect();
        let mut products = Vec::new();
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let p = self.product(i, j);
                if p.is_zero() {
                    continue;
                }
                products.push(ProductEntry {
                    i,
                    j,
                    terms: p.iter().map(|(k, c)| (basis[k].clone(), format_rational(c))).collect(),
                });
            }
        }
        let file = TableFile {
            model: m.name(),
            n: self.n,
            basis,
            products,
        };
        serde_json::to_string_pretty(&file).expect("table serialization cannot fail")
    }
}

/// Ratio `a / b` if `a` is a scalar multiple of nonzero `b`.
pub fn proportionality(a: &FockVector, b: &FockVector) -> Option<Rational> {
    let (w0, c0) = b.iter().next()?;
    let r = a.coeff(w0) / c0;
    (a.clone() == b.scaled(&r)).then_some(r)
}

/// `n!` as a rational.
pub fn factorial_rational(n: usize) -> Rational {
    Rational::from_integer(factorial(n as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::parse_vector;
    use crate::surface::{elliptic_model, genus2_model};

    fn v(t: &Taut, s: &str) -> FockVector {
        parse_vector(t.model(), s).unwrap()
    }

    #[test]
    fn decompose_examples() {
        let t = Taut::for_model(elliptic_model());
        let d = t.decompose(&v(&t, "q1(a)")).unwrap();
        assert_eq!(d.y.len(), 1);
        assert_eq!(d.y[&1], FockVector::vacuum());
        assert!(d.z.is_zero());
        let d = t.decompose(&v(&t, "q2(1)")).unwrap();
        assert!(d.y.is_empty());
        assert_eq!(t.heisenberg().apply_boundary(&d.z), v(&t, "q2(1)"));
        assert!(matches!(t.decompose(&FockVector::vacuum()), Err(Error::Precondition(_))));
    }

    #[test]
    fn weight_one_is_the_surface() {
        for m in [elliptic_model(), genus2_model()] {
            let t = Taut::for_model(m.clone());
            for a in 0..m.dim() {
                for b in 0..m.dim() {
                    let x = t.heisenberg().create_basis(1, b, &FockVector::vacuum());
                    let got = t.taut_mul(&SparseVec::unit(a), &x).unwrap();
                    let expect = t.heisenberg().create(1, &m.cup(&SparseVec::unit(a), &SparseVec::unit(b)), &FockVector::vacuum());
                    assert_eq!(got, expect);
                }
            }
        }
    }

    #[test]
    fn degree_two_part_of_one_is_boundary() {
        let t = Taut::for_model(genus2_model());
        for n in 1..=3 {
            let unit = t.heisenberg().space().unit(n);
            let got = t.taut_component(TautSpec { class: 0, l: 3 }, &unit).unwrap();
            assert_eq!(got, t.heisenberg().apply_boundary(&unit));
        }
        let got = t.taut_class(TautSpec { class: 0, l: 3 }, 2).unwrap();
        assert_eq!(got, v(&t, "1/2 q2(1)"));
    }

    #[test]
    fn component_examples() {
        let t = Taut::for_model(elliptic_model());
        let p = 3;
        let unit1 = t.heisenberg().space().unit(1);
        assert_eq!(t.taut_component(TautSpec { class: p, l: 2 }, &unit1).unwrap(), v(&t, "q1(p)"));
        // negative degree
        let unit2 = t.heisenberg().space().unit(2);
        assert!(t.taut_component(TautSpec { class: 0, l: 0 }, &unit2).unwrap().is_zero());
        assert!(matches!(
            t.taut_component(TautSpec { class: 0, l: 2 }, &v(&t, "q2(1) + q1(1).q1(1)")),
            Err(Error::Inhomogeneous(_))
        ));
    }

    #[test]
    fn boundary_divisor_examples() {
        let m = elliptic_model();
        assert_eq!(boundary_divisor_class(&m, 2).unwrap(), parse_vector(&m, "q2(1)").unwrap());
        assert_eq!(boundary_divisor_class(&m, 3).unwrap().format(&m), "q2(1).q1(1)");
        assert!(boundary_divisor_class(&m, 1).is_err());
    }
}
