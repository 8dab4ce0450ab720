//! Nakajima, Virasoro and boundary operators on the Fock space.
//!
//! Conventions (all signs relative to the canonical word order):
//!
//! * `[q_a(x), q_b(y)] = a δ_{a+b,0} ∫ x y`, with the integral taken in the
//!   written order. Creation operators take classes in `H^*`, annihilation
//!   operators take classes in `H^*_c`.
//! * `L_n(γ) = -1/2 Σ_k :q_k q_{n-k}: Δ(γ)`. The constant `-1/2` is the one
//!   for which `[L_m(β), q_n(α)] = n q_{m+n}(βα)` holds with the commutator
//!   normalisation above.
//! * `Δ₊(γ) = Σ_i β_i ⊗ β̃^i γ` with the left dual `β̃^i = (-1)^{|β_i|} β^i`
//!   (`∫ β̃^i β_j = δ_ij`), and `Δ₋(γ) = Σ_i β^i ⊗ β_i γ`.
//!   A compactly supported class in a creation slot is pushed through `ι`.
//! * `∂` is defined by `[∂, q_n(α)] = n L_n(α) + C(n,2) q_n(Kα)` and
//!   `∂ 1 = 0`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{binomial, int, rat, Matrix, Rational, SparseVec};
use crate::fock::{FockSpace, FockVector, FockWord, Gen};
use crate::surface::{ClassArg, Side, SurfaceModel};

/// Scalar in front of the normal-ordered Virasoro sum.
fn virasoro_constant() -> Rational {
    rat(-1, 2)
}

fn sgn(neg: bool) -> Rational {
    if neg {
        -Rational::one()
    } else {
        Rational::one()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpSpec {
    Nakajima { n: i64, class: ClassArg },
    Virasoro { n: i64, class: ClassArg },
    Boundary,
    /// `(ad ∂)^m q_1(α)`
    AdBoundary { m: u32, class: ClassArg },
}

impl OpSpec {
    pub fn weight_shift(&self) -> i64 {
        match self {
            OpSpec::Nakajima { n, .. } | OpSpec::Virasoro { n, .. } => *n,
            OpSpec::Boundary => 0,
            OpSpec::AdBoundary { .. } => 1,
        }
    }

    /// Parity of the operator (that of its class).
    pub fn parity(&self, m: &SurfaceModel) -> Result<bool> {
        match self {
            OpSpec::Boundary => Ok(false),
            OpSpec::Nakajima { class, .. } | OpSpec::Virasoro { class, .. } | OpSpec::AdBoundary { class, .. } => {
                class_parity(m, &class.coords)
            }
        }
    }

    /// Parses `q(2,p)`, `q(-1,p^)`, `L(2,1)`, `del`, `adq(3,a)`.
    pub fn parse(m: &SurfaceModel, s: &str) -> Result<OpSpec> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = |msg: &str| Error::Parse {
            position: 0,
            message: format!("{msg} in operator {s:?}"),
        };
        if t == "del" {
            return Ok(OpSpec::Boundary);
        }
        let open = t.find('(').ok_or_else(|| bad("missing '('"))?;
        if !t.ends_with(')') {
            return Err(bad("missing ')'"));
        }
        let head = &t[..open];
        let inner = &t[open + 1..t.len() - 1];
        let (idx, cls) = inner.split_once(',').ok_or_else(|| bad("expected (index,class)"))?;
        let n: i64 = idx.parse().map_err(|_| bad("bad index"))?;
        let class = m.parse_class(cls)?;
        match head {
            "q" => Ok(OpSpec::Nakajima { n, class }),
            "L" => Ok(OpSpec::Virasoro { n, class }),
            "adq" => {
                let m = u32::try_from(n).map_err(|_| bad("ad power must be nonnegative"))?;
                Ok(OpSpec::AdBoundary { m, class })
            }
            other => Err(Error::Parse {
                position: 0,
                message: format!("unknown operator {other:?}"),
            }),
        }
    }

    pub fn format(&self, m: &SurfaceModel) -> String {
        let cls = |c: &ClassArg| m.format_class(&c.coords, c.side);
        match self {
            OpSpec::Nakajima { n, class } => format!("q({n},{})", cls(class)),
            OpSpec::Virasoro { n, class } => format!("L({n},{})", cls(class)),
            OpSpec::Boundary => "del".into(),
            OpSpec::AdBoundary { m: j, class } => format!("adq({j},{})", cls(class)),
        }
    }
}

fn class_parity(m: &SurfaceModel, v: &SparseVec) -> Result<bool> {
    let mut ps = v.indices().map(|i| m.is_odd(i));
    let Some(first) = ps.next() else {
        return Ok(false);
    };
    if ps.all(|p| p == first) {
        Ok(first)
    } else {
        Err(Error::Inhomogeneous("class mixes even and odd degrees".into()))
    }
}

/// Exact matrix of an operator between two weight components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorMatrix {
    pub weight_in: usize,
    pub weight_out: usize,
    pub matrix: Matrix,
}

impl fmt::Display for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "weight {} -> {}: {}x{} matrix, rank {}",
            self.weight_in,
            self.weight_out,
            self.matrix.nrows(),
            self.matrix.ncols(),
            self.matrix.rank()
        )?;
        for (j, col) in self.matrix.columns().iter().enumerate() {
            if !col.is_zero() {
                writeln!(f, "  col {j}: {col}")?;
            }
        }
        Ok(())
    }
}

/// Order in which `∂` is expanded through a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Expansion {
    Leftmost,
    Rightmost,
}

/// Operator calculus on the Fock space of a fixed model.
#[derive(Debug)]
pub struct Heisenberg {
    space: Arc<FockSpace>,
    del_left: RwLock<HashMap<FockWord, FockVector>>,
    del_right: RwLock<HashMap<FockWord, FockVector>>,
    del_mats: RwLock<BTreeMap<usize, Arc<Matrix>>>,
}

impl Heisenberg {
    pub fn new(space: Arc<FockSpace>) -> Self {
        Heisenberg {
            space,
            del_left: RwLock::new(HashMap::new()),
            del_right: RwLock::new(HashMap::new()),
            del_mats: RwLock::new(BTreeMap::new()),
        }
    }

    pub fn for_model(model: SurfaceModel) -> Self {
        Self::new(Arc::new(FockSpace::new(Arc::new(model))))
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn space_arc(&self) -> Arc<FockSpace> {
        self.space.clone()
    }

    pub fn model(&self) -> &SurfaceModel {
        self.space.model()
    }

    // --- Nakajima operators ---------------------------------------------

    /// `q_n(β_i) v` for `n > 0`.
    pub fn create_basis(&self, n: u32, i: usize, v: &FockVector) -> FockVector {
        let m = self.model();
        let mut out = FockVector::new();
        for (w, c) in v.iter() {
            if let Some((neg, w2)) = w.prepend(m, Gen::new(n, i)) {
                out.add_term(w2, if neg { -c.clone() } else { c.clone() });
            }
        }
        out
    }

    /// `q_n(α) v` for `n > 0`, `α ∈ H^*`.
    pub fn create(&self, n: u32, alpha: &SparseVec, v: &FockVector) -> FockVector {
        let mut out = FockVector::new();
        for (i, c) in alpha.iter() {
            out.add_scaled(c, &self.create_basis(n, i, v));
        }
        out
    }

    /// `q_{-m}(β^j) v` for `m > 0`.
    pub fn annihilate_basis(&self, m: u32, j: usize, v: &FockVector) -> FockVector {
        let model = self.model();
        let xi_odd = model.is_odd(j);
        // ∫ β^j β_j = (-1)^{|β_j|}
        let base = -int(m as i64) * sgn(xi_odd);
        let mut out = FockVector::new();
        for (w, c) in v.iter() {
            let mut odd_before = false;
            for (p, g) in w.gens().iter().enumerate() {
                if g.n == m && g.class == j {
                    let s = sgn(xi_odd && odd_before);
                    out.add_term(w.without(p), &base * &s * c);
                }
                if model.is_odd(g.class) {
                    odd_before = !odd_before;
                }
            }
        }
        out
    }

    /// `q_{-m}(ξ) v` for `m > 0`, `ξ ∈ H^*_c`.
    pub fn annihilate(&self, m: u32, xi: &SparseVec, v: &FockVector) -> FockVector {
        let mut out = FockVector::new();
        for (j, c) in xi.iter() {
            out.add_scaled(c, &self.annihilate_basis(m, j, v));
        }
        out
    }

    /// `q_k(x)` with `x` on the given side; compact classes in creation
    /// slots go through `ι`.
    fn q_side(&self, k: i64, x: &SparseVec, side: Side, v: &FockVector) -> FockVector {
        if k == 0 || x.is_zero() {
            return FockVector::new();
        }
        if k > 0 {
            match side {
                Side::Ordinary => self.create(k as u32, x, v),
                Side::Compact => self.create(k as u32, &self.model().iota(x), v),
            }
        } else {
            debug_assert_eq!(side, Side::Compact, "annihilation needs a compact class");
            self.annihilate((-k) as u32, x, v)
        }
    }

    pub fn apply_nakajima(&self, n: i64, class: &ClassArg, v: &FockVector) -> Result<FockVector> {
        class.coords.check_dim(self.model().dim(), "class coordinates")?;
        match (n.signum(), class.side) {
            (0, _) => Ok(FockVector::new()),
            (1, Side::Ordinary) | (-1, Side::Compact) => Ok(self.q_side(n, &class.coords, class.side, v)),
            (1, Side::Compact) => Err(Error::ClassSpace(format!(
                "creation operator q_{n} needs a class in H, got a compact class"
            ))),
            _ => Err(Error::ClassSpace(format!(
                "annihilation operator q_{n} needs a compact class (suffix ^)"
            ))),
        }
    }

    // --- Virasoro operators ---------------------------------------------

    /// `L_n(β_i) v` for `n >= 0`.
    fn virasoro_pos_basis(&self, n: i64, i: usize, v: &FockVector) -> FockVector {
        let model = self.model();
        let c = virasoro_constant();
        let top = v.weights().last().copied().unwrap_or(0) as i64;
        let gamma = SparseVec::unit(i);
        let mut out = FockVector::new();
        for a in 0..model.dim() {
            // second tensor factor β̃^a γ
            let y = model
                .module_mul_right(&SparseVec::unit(a), &gamma)
                .scaled(&sgn(model.is_odd(a)));
            if y.is_zero() {
                continue;
            }
            // both creation: q_k(β_a) q_{n-k}(ι y)
            let iy = model.iota(&y);
            if !iy.is_zero() {
                for k in 1..n {
                    let t = self.create((n - k) as u32, &iy, v);
                    out.add_scaled(&c, &self.create_basis(k as u32, a, &t));
                }
            }
            // creation-annihilation: the term with the annihilator in the
            // first slot is its mirror image, hence the factor 2
            let two_c = &c * int(2);
            for k in (n + 1)..=(n + top) {
                let t = self.annihilate((k - n) as u32, &y, v);
                if !t.is_zero() {
                    out.add_scaled(&two_c, &self.create_basis(k as u32, a, &t));
                }
            }
        }
        out
    }

    /// `L_n(β^i) v` for `n < 0`.
    fn virasoro_neg_basis(&self, n: i64, i: usize, v: &FockVector) -> FockVector {
        let model = self.model();
        let c = virasoro_constant();
        let top = v.weights().last().copied().unwrap_or(0) as i64;
        let gamma = SparseVec::unit(i);
        let reach = top - n + 1;
        let mut out = FockVector::new();
        for a in 0..model.dim() {
            let x = SparseVec::unit(a);
            let y = model.module_mul(&SparseVec::unit(a), &gamma);
            if y.is_zero() {
                continue;
            }
            let swap = sgn(model.is_odd(a) && class_parity(model, &y).unwrap_or(false));
            for k in -reach..=reach {
                let l = n - k;
                if k == 0 || l == 0 {
                    continue;
                }
                let term = if k >= l {
                    let t = self.q_side(l, &y, Side::Compact, v);
                    self.q_side(k, &x, Side::Compact, &t)
                } else {
                    let t = self.q_side(k, &x, Side::Compact, v);
                    self.q_side(l, &y, Side::Compact, &t).scaled(&swap)
                };
                out.add_scaled(&c, &term);
            }
        }
        out
    }

    pub fn apply_virasoro(&self, n: i64, class: &ClassArg, v: &FockVector) -> Result<FockVector> {
        class.coords.check_dim(self.model().dim(), "class coordinates")?;
        let mut out = FockVector::new();
        match (n >= 0, class.side) {
            (true, Side::Ordinary) => {
                for (i, c) in class.coords.iter() {
                    out.add_scaled(c, &self.virasoro_pos_basis(n, i, v));
                }
            }
            (false, Side::Compact) => {
                for (i, c) in class.coords.iter() {
                    out.add_scaled(c, &self.virasoro_neg_basis(n, i, v));
                }
            }
            (true, Side::Compact) => {
                return Err(Error::ClassSpace(format!("L_{n} with n >= 0 needs a class in H")));
            }
            (false, Side::Ordinary) => {
                return Err(Error::ClassSpace(format!("L_{n} with n < 0 needs a compact class (suffix ^)")));
            }
        }
        Ok(out)
    }

    // --- boundary operator ----------------------------------------------

    /// `[∂, q_n(β_i)] v = n L_n(β_i) v + C(n,2) q_n(K β_i) v`, `n > 0`.
    pub fn boundary_bracket(&self, n: u32, i: usize, v: &FockVector) -> FockVector {
        let model = self.model();
        let mut out = self.virasoro_pos_basis(n as i64, i, v).scaled(&int(n as i64));
        let kb = model.cup(model.canonical(), &SparseVec::unit(i));
        let c = binomial(n as i64, 2);
        if !kb.is_zero() && !c.is_zero() {
            out.add_scaled(&c, &self.create(n, &kb, v));
        }
        out
    }

    fn boundary_word(&self, w: &FockWord, order: Expansion) -> FockVector {
        if w.is_empty() {
            return FockVector::new();
        }
        let cache = match order {
            Expansion::Leftmost => &self.del_left,
            Expansion::Rightmost => &self.del_right,
        };
        if let Some(v) = cache.read().expect("boundary cache poisoned").get(w) {
            return v.clone();
        }
        let model = self.model();
        let out = match order {
            Expansion::Leftmost => {
                // w = f · rest with f the first generator
                let f = w.gens()[0];
                let rest = FockVector::word(w.without(0));
                let mut out = self.boundary_bracket(f.n, f.class, &rest);
                let inner = self.boundary_vec(&rest, order);
                out.add(&self.create_basis(f.n, f.class, &inner));
                out
            }
            Expansion::Rightmost => {
                // w = rest · f · 1 = (-1)^{|f||rest|} f · rest · 1
                let last = w.len() - 1;
                let f = w.gens()[last];
                let rest_word = w.without(last);
                let s = sgn(model.is_odd(f.class) && rest_word.parity(model));
                let rest = FockVector::word(rest_word);
                let mut out = self.boundary_bracket(f.n, f.class, &rest);
                let inner = self.boundary_vec(&rest, order);
                out.add(&self.create_basis(f.n, f.class, &inner));
                out.scaled(&s)
            }
        };
        cache.write().expect("boundary cache poisoned").insert(w.clone(), out.clone());
        out
    }

    fn boundary_vec(&self, v: &FockVector, order: Expansion) -> FockVector {
        let mut out = FockVector::new();
        for (w, c) in v.iter() {
            out.add_scaled(c, &self.boundary_word(w, order));
        }
        out
    }

    /// `∂ v`, expanding through the leftmost generator first.
    pub fn apply_boundary(&self, v: &FockVector) -> FockVector {
        self.boundary_vec(v, Expansion::Leftmost)
    }

    /// `∂ v` with an explicit expansion order.
    pub fn apply_boundary_with(&self, v: &FockVector, order: Expansion) -> FockVector {
        self.boundary_vec(v, order)
    }

    /// `((ad ∂)^j q_1(α)) v` by the nested commutator recursion.
    pub fn apply_ad_boundary_pow(&self, j: u32, alpha: &SparseVec, v: &FockVector) -> FockVector {
        if j == 0 {
            return self.create(1, alpha, v);
        }
        let mut out = self.apply_boundary(&self.apply_ad_boundary_pow(j - 1, alpha, v));
        out.sub(&self.apply_ad_boundary_pow(j - 1, alpha, &self.apply_boundary(v)));
        out
    }

    // --- generic application and matrices -------------------------------

    pub fn apply(&self, spec: &OpSpec, v: &FockVector) -> Result<FockVector> {
        match spec {
            OpSpec::Nakajima { n, class } => self.apply_nakajima(*n, class, v),
            OpSpec::Virasoro { n, class } => self.apply_virasoro(*n, class, v),
            OpSpec::Boundary => Ok(self.apply_boundary(v)),
            OpSpec::AdBoundary { m, class } => {
                if class.side != Side::Ordinary {
                    return Err(Error::ClassSpace("(ad ∂)^m q_1 needs a class in H".into()));
                }
                class.coords.check_dim(self.model().dim(), "class coordinates")?;
                Ok(self.apply_ad_boundary_pow(*m, &class.coords, v))
            }
        }
    }

    /// Matrix of `f` from weight `weight_in` to `weight_out`, one column per
    /// basis word, computed in parallel.
    pub fn matrix_of<F>(&self, weight_in: usize, weight_out: usize, f: F) -> Result<Matrix>
    where
        F: Fn(&FockVector) -> Result<FockVector> + Sync,
    {
        let bin = self.space.basis(weight_in)?;
        let bout = self.space.basis(weight_out)?;
        let cols: Vec<SparseVec> = bin
            .words
            .par_iter()
            .map(|w| f(&FockVector::word(w.clone())).and_then(|img| bout.to_sparse(&img)))
            .collect::<Result<_>>()?;
        Matrix::from_columns(bout.len(), cols)
    }

    pub fn operator_matrix(&self, spec: &OpSpec, weight_in: usize) -> Result<OperatorMatrix> {
        let out = weight_in as i64 + spec.weight_shift();
        if out < 0 {
            return Err(Error::Precondition(format!(
                "{} lowers weight {weight_in} below zero",
                spec.format(self.model())
            )));
        }
        let weight_out = out as usize;
        let matrix = self.matrix_of(weight_in, weight_out, |v| self.apply(spec, v))?;
        Ok(OperatorMatrix {
            weight_in,
            weight_out,
            matrix,
        })
    }

    /// Matrix of `∂` on weight `n` (cached).
    pub fn boundary_matrix(&self, n: usize) -> Result<Arc<Matrix>> {
        if let Some(m) = self.del_mats.read().expect("matrix cache poisoned").get(&n) {
            return Ok(m.clone());
        }
        let m = Arc::new(self.matrix_of(n, n, |v| Ok(self.apply_boundary(v)))?);
        Ok(self.del_mats.write().expect("matrix cache poisoned").entry(n).or_insert(m).clone())
    }

    /// Matrices of `(ad ∂)^j q_1(α)` from weight `n` to `n + 1` for
    /// `j = 0..=jmax`, via `A_j = D_{n+1} A_{j-1} - A_{j-1} D_n`.
    pub fn ad_boundary_matrices(&self, alpha: &SparseVec, n: usize, jmax: u32) -> Result<Vec<Matrix>> {
        let q1 = self.matrix_of(n, n + 1, |v| Ok(self.create(1, alpha, v)))?;
        let d_in = self.boundary_matrix(n)?;
        let d_out = self.boundary_matrix(n + 1)?;
        let mut out = vec![q1];
        for _ in 0..jmax {
            let prev = out.last().expect("nonempty");
            let mut next = d_out.compose(prev)?;
            next.add_scaled(&-Rational::one(), &prev.compose(&d_in)?)?;
            out.push(next);
        }
        Ok(out)
    }
}

/// `[A, B] v = A B v - (-1)^{|A||B|} B A v`.
pub fn supercommutator<A, B>(a: A, a_odd: bool, b: B, b_odd: bool, v: &FockVector) -> Result<FockVector>
where
    A: Fn(&FockVector) -> Result<FockVector>,
    B: Fn(&FockVector) -> Result<FockVector>,
{
    let mut out = a(&b(v)?)?;
    let ba = b(&a(v)?)?;
    let s = if a_odd && b_odd { Rational::one() } else { -Rational::one() };
    out.add_scaled(&s, &ba);
    Ok(out)
}

/// `∫ x y` for classes on the given sides (written order); the mixed case
/// `H_c × H_c` is not a pairing and gives zero.
pub fn integral_pair(m: &SurfaceModel, x: &ClassArg, y: &ClassArg) -> Rational {
    match (x.side, y.side) {
        (Side::Ordinary, Side::Compact) => m.pair(&x.coords, &y.coords),
        (Side::Compact, Side::Ordinary) => m.pair_rev(&x.coords, &y.coords),
        _ => Rational::zero(),
    }
}

/// Product `x y` of two classes, as needed by `q_{m+n}(βα)`.
pub fn class_product(m: &SurfaceModel, x: &ClassArg, y: &ClassArg) -> ClassArg {
    match (x.side, y.side) {
        (Side::Ordinary, Side::Ordinary) => ClassArg::ordinary(m.cup(&x.coords, &y.coords)),
        (Side::Ordinary, Side::Compact) => ClassArg::compact(m.module_mul(&x.coords, &y.coords)),
        (Side::Compact, Side::Ordinary) => ClassArg::compact(m.module_mul_right(&x.coords, &y.coords)),
        (Side::Compact, Side::Compact) => ClassArg::compact(m.module_mul(&m.iota(&x.coords), &y.coords)),
    }
}

/// `q_k(x)` with a class that may need `ι` (creation with a compact class).
pub fn nakajima_any(h: &Heisenberg, k: i64, x: &ClassArg, v: &FockVector) -> FockVector {
    h.q_side(k, &x.coords, x.side, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{parse_vector, tridegree, TriDegree};
    use crate::surface::{elliptic_model, genus2_model};

    fn h(m: SurfaceModel) -> Heisenberg {
        Heisenberg::for_model(m)
    }

    fn vec(h: &Heisenberg, s: &str) -> FockVector {
        parse_vector(h.model(), s).unwrap()
    }

    #[test]
    fn nakajima_examples() {
        let h = h(elliptic_model());
        let one = h.model().parse_class("1").unwrap();
        let v = h.apply_nakajima(2, &one, &FockVector::vacuum()).unwrap();
        assert_eq!(v, vec(&h, "q2(1)"));
        let pd = h.model().parse_class("p^").unwrap();
        let v = h.apply_nakajima(-1, &pd, &vec(&h, "q1(p)")).unwrap();
        assert_eq!(v, FockVector::vacuum().scaled(&int(-1)));
        for w in crate::fock::enumerate_words(h.model(), 2).into_iter().filter(|w| w.len() == 2) {
            for j in 0..4 {
                let out = h.apply_nakajima(-2, &ClassArg::dual(j), &FockVector::word(w.clone())).unwrap();
                assert!(out.is_zero());
            }
        }
        assert!(matches!(
            h.apply_nakajima(1, &pd, &FockVector::vacuum()),
            Err(Error::ClassSpace(_))
        ));
        assert!(matches!(
            h.apply_nakajima(-1, &one, &FockVector::vacuum()),
            Err(Error::ClassSpace(_))
        ));
    }

    #[test]
    fn virasoro_examples() {
        for m in [elliptic_model(), genus2_model()] {
            let h = h(m);
            for i in 0..h.model().dim() {
                let v = h.apply_virasoro(1, &ClassArg::basis(i), &FockVector::vacuum()).unwrap();
                assert!(v.is_zero());
            }
            let v = h.apply_virasoro(2, &ClassArg::basis(0), &FockVector::vacuum()).unwrap();
            assert!(v.is_zero());
            // [L_1(1), q_1(α)] 1 = q_2(α) 1
            for i in 0..h.model().dim() {
                let a = ClassArg::basis(i);
                let lhs = h
                    .apply_virasoro(1, &ClassArg::basis(0), &h.apply_nakajima(1, &a, &FockVector::vacuum()).unwrap())
                    .unwrap();
                let rhs = h.apply_nakajima(2, &a, &FockVector::vacuum()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn boundary_examples() {
        let h2 = h(genus2_model());
        let m = h2.model();
        for i in 0..m.dim() {
            let v = h2.create_basis(1, i, &FockVector::vacuum());
            assert!(h2.apply_boundary(&v).is_zero());
        }
        assert_eq!(h2.apply_boundary(&vec(&h2, "q1(1).q1(1)")), vec(&h2, "q2(1)"));
        // [∂, q_2(1)] 1 = 2 L_2(1) 1 + q_2(K) 1 = q_2(2p) 1
        assert_eq!(h2.apply_boundary(&vec(&h2, "q2(1)")), vec(&h2, "2 q2(p)"));
        let unit2 = h2.space().unit(2);
        assert_eq!(h2.apply_boundary(&unit2), vec(&h2, "1/2 q2(1)"));
    }

    #[test]
    fn ad_boundary_examples() {
        let h = h(elliptic_model());
        let one = SparseVec::unit(0);
        assert_eq!(h.apply_ad_boundary_pow(0, &one, &FockVector::vacuum()), vec(&h, "q1(1)"));
        for i in 0..4 {
            assert!(h.apply_ad_boundary_pow(1, &SparseVec::unit(i), &FockVector::vacuum()).is_zero());
        }
        assert_eq!(h.apply_ad_boundary_pow(1, &one, &vec(&h, "q1(1)")), vec(&h, "q2(1)"));
    }

    #[test]
    fn ad_boundary_matrices_match_vectors() {
        let h = h(genus2_model());
        let m = h.model().clone();
        for n in 0..3 {
            let basis = h.space().basis(n).unwrap();
            let bout = h.space().basis(n + 1).unwrap();
            for a in 0..m.dim() {
                let alpha = SparseVec::unit(a);
                let mats = h.ad_boundary_matrices(&alpha, n, 3).unwrap();
                for (j, mat) in mats.iter().enumerate() {
                    for (col, w) in basis.words.iter().enumerate() {
                        let v = h.apply_ad_boundary_pow(j as u32, &alpha, &FockVector::word(w.clone()));
                        assert_eq!(bout.to_fock(mat.column(col)), v, "j={j} a={a} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn operator_matrix_examples() {
        let h = h(elliptic_model());
        let m = h.model().clone();
        let q11 = OpSpec::parse(&m, "q(1,1)").unwrap();
        let om = h.operator_matrix(&q11, 0).unwrap();
        assert_eq!((om.matrix.nrows(), om.matrix.ncols()), (4, 1));
        let b1 = h.space().basis(1).unwrap();
        assert_eq!(b1.to_fock(om.matrix.column(0)), vec(&h, "q1(1)"));
        let del = h.operator_matrix(&OpSpec::Boundary, 1).unwrap();
        assert!(del.matrix.is_zero());
        let ann = h.operator_matrix(&OpSpec::parse(&m, "q(-1,p^)").unwrap(), 1).unwrap();
        assert_eq!(ann.matrix.rank(), 1);
        assert_eq!(ann.weight_out, 0);
    }

    #[test]
    fn opspec_parsing() {
        let m = elliptic_model();
        for s in ["q(2,p)", "q(-1,p^)", "L(2,1)", "del", "adq(3,a)"] {
            let op = OpSpec::parse(&m, s).unwrap();
            assert_eq!(OpSpec::parse(&m, &op.format(&m)).unwrap(), op);
        }
        assert!(OpSpec::parse(&m, "x(1,p)").is_err());
        assert!(matches!(OpSpec::parse(&m, "q(1,zz)"), Err(Error::UnknownClass(_))));
    }

    #[test]
    fn nakajima_degree_shift() {
        let h = h(genus2_model());
        let m = h.model().clone();
        for n in 1..3u32 {
            for i in 0..m.dim() {
                for w in h.space().basis(2).unwrap().words.iter() {
                    let out = h.create_basis(n, i, &FockVector::word(w.clone()));
                    let shift = TriDegree::new(n as i64, m.degree(i) as i64 + 2 * n as i64 - 2, m.gdeg(i) as i64 + n as i64 - 1);
                    for (w2, _) in out.iter() {
                        assert_eq!(tridegree(&m, w2), tridegree(&m, w) + shift);
                    }
                }
            }
        }
    }
}
