//! Central fibers of Hitchin-type fibrations `S → A^1`.
//!
//! The input is the dual graph of the central fiber: components with
//! geometric genus, arithmetic genus and multiplicity, and one edge per
//! transverse intersection point. Self-intersections are derived from the
//! fiber class being numerically trivial on every component.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{int, Matrix, Rational, SparseVec};
use crate::surface::{BasisClass, SurfaceModel};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub label: String,
    /// Geometric genus.
    pub g: u32,
    /// Arithmetic genus.
    pub pa: u32,
    /// Multiplicity in the fiber.
    pub b: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberData {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub components: Vec<Component>,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
}

impl FiberData {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or("fiber")
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    fn positive_genus(&self) -> Vec<usize> {
        (0..self.k()).filter(|&i| self.components[i].g > 0).collect()
    }

    /// First Betti number of the dual multigraph (loops included).
    pub fn graph_betti(&self) -> usize {
        // connectedness is checked separately; count components anyway
        let mut uf = UnionFind::new(self.k());
        for &[i, j] in &self.edges {
            uf.union(i, j);
        }
        self.edges.len() + uf.count() - self.k()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let p = self.parent[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.parent[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn count(&mut self) -> usize {
        (0..self.parent.len()).filter(|&i| self.find(i) == i).count()
    }
}

/// Intersection matrix of a validated fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidFiber {
    pub data: FiberData,
    pub intersection: Vec<Vec<i64>>,
}

/// Checks structure and Zariski consistency; derives self-intersections.
pub fn validate_fiber(fd: &FiberData) -> Result<ValidFiber> {
    let k = fd.k();
    if k == 0 {
        return Err(Error::InvalidFiber("no components".into()));
    }
    for c in &fd.components {
        if c.b == 0 {
            return Err(Error::InvalidFiber(format!("component {} has multiplicity 0", c.label)));
        }
        if c.pa < c.g {
            return Err(Error::InvalidFiber(format!(
                "component {} has arithmetic genus {} < geometric genus {}",
                c.label, c.pa, c.g
            )));
        }
    }
    let mut e = vec![vec![0i64; k]; k];
    let mut uf = UnionFind::new(k);
    for &[i, j] in &fd.edges {
        if i >= k || j >= k {
            return Err(Error::InvalidFiber(format!("edge [{i}, {j}] refers to a missing component")));
        }
        uf.union(i, j);
        if i != j {
            e[i][j] += 1;
            e[j][i] += 1;
        }
    }
    if uf.count() != 1 {
        return Err(Error::InvalidFiber("dual graph is not connected".into()));
    }
    for i in 0..k {
        let s: i64 = (0..k).filter(|&j| j != i).map(|j| fd.components[j].b as i64 * e[i][j]).sum();
        let bi = fd.components[i].b as i64;
        if s % bi != 0 {
            return Err(Error::InvalidFiber(format!(
                "row {i} ({}): self-intersection -{s}/{bi} is not an integer",
                fd.components[i].label
            )));
        }
        e[i][i] = -s / bi;
    }
    let mat = Matrix::from_int_rows(&e.iter().map(|r| r.as_slice()).collect::<Vec<_>>())?;
    let rank = mat.rank();
    if rank != k - 1 {
        return Err(Error::InvalidFiber(format!("intersection matrix has rank {rank}, expected {}", k - 1)));
    }
    if !negative_semidefinite(&e) {
        return Err(Error::InvalidFiber("intersection matrix is not negative semidefinite".into()));
    }
    Ok(ValidFiber {
        data: fd.clone(),
        intersection: e,
    })
}

/// Exact symmetric elimination on `-E`.
fn negative_semidefinite(e: &[Vec<i64>]) -> bool {
    let n = e.len();
    let mut a: Vec<Vec<Rational>> = e.iter().map(|r| r.iter().map(|&x| int(-x)).collect()).collect();
    let mut alive: Vec<usize> = (0..n).collect();
    while !alive.is_empty() {
        if alive.iter().any(|&i| a[i][i].is_negative()) {
            return false;
        }
        let Some(pos) = alive.iter().position(|&i| a[i][i].is_positive()) else {
            // all remaining diagonal entries vanish
            return alive.iter().all(|&i| alive.iter().all(|&j| a[i][j].is_zero()));
        };
        let p = alive.remove(pos);
        let piv = a[p][p].clone();
        for &i in &alive {
            let f = &a[i][p] / &piv;
            if f.is_zero() {
                continue;
            }
            for &j in &alive {
                let d = &f * &a[p][j];
                a[i][j] -= d;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Prediction {
    /// `π_1` is always multiplicative.
    pub pi_1_multiplicative: bool,
    /// `π_n`, `n >= 2`, is multiplicative iff the fibration is elliptic.
    pub pi_n_multiplicative: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FibrationReport {
    pub name: String,
    pub k: usize,
    pub intersection_matrix: Vec<Vec<i64>>,
    pub self_intersections: Vec<i64>,
    pub zariski_ok: bool,
    pub dim_im_cl: usize,
    pub positive_genus_count: usize,
    pub star_ok: bool,
    pub canonical_coords: Vec<i64>,
    pub elliptic: bool,
    pub im_c_meets_im_cl: bool,
    pub graph_betti: usize,
    pub predicted: Prediction,
}

impl fmt::Display for FibrationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "fiber {} (k = {})", self.name, self.k)?;
        writeln!(f, "  intersection matrix: {:?}", self.intersection_matrix)?;
        writeln!(f, "  zariski_ok={} dim Im cl={}", self.zariski_ok, self.dim_im_cl)?;
        writeln!(
            f,
            "  positive genus components={} star={}",
            self.positive_genus_count, self.star_ok
        )?;
        writeln!(f, "  K coordinates c={:?} elliptic={}", self.canonical_coords, self.elliptic)?;
        writeln!(f, "  Im c ∩ Im cl nonzero: {}", self.im_c_meets_im_cl)?;
        writeln!(
            f,
            "  predicted: pi_1 multiplicative={}, pi_n (n>=2) multiplicative={}",
            self.predicted.pi_1_multiplicative, self.predicted.pi_n_multiplicative
        )
    }
}

pub fn analyze(fd: &FiberData) -> Result<FibrationReport> {
    let v = validate_fiber(fd)?;
    let k = fd.k();
    let e = &v.intersection;
    let c: Vec<i64> = (0..k)
        .map(|j| 2 * fd.components[j].pa as i64 - 2 - e[j][j])
        .collect();
    let sum_bc: i64 = (0..k).map(|j| fd.components[j].b as i64 * c[j]).sum();
    let positive = fd.positive_genus();
    let elliptic = sum_bc == 0;
    Ok(FibrationReport {
        name: fd.name().to_string(),
        k,
        intersection_matrix: e.clone(),
        self_intersections: (0..k).map(|i| e[i][i]).collect(),
        zariski_ok: true,
        dim_im_cl: k - 1,
        positive_genus_count: positive.len(),
        star_ok: positive.len() <= 1,
        canonical_coords: c,
        elliptic,
        im_c_meets_im_cl: im_c_meets_im_cl(&v),
        graph_betti: fd.graph_betti(),
        predicted: Prediction {
            pi_1_multiplicative: true,
            pi_n_multiplicative: elliptic,
        },
    })
}

/// Whether `span{p_j : g_j > 0}` meets the column span of the intersection
/// matrix nontrivially, by a rank count.
pub fn im_c_meets_im_cl(v: &ValidFiber) -> bool {
    let k = v.data.k();
    let im_c: Vec<SparseVec> = v.data.positive_genus().into_iter().map(SparseVec::unit).collect();
    let im_cl: Vec<SparseVec> = (0..k)
        .map(|j| SparseVec::from_pairs((0..k).map(|i| (i, int(v.intersection[i][j])))))
        .collect();
    let rank = |cols: Vec<SparseVec>| Matrix::from_columns(k, cols).map(|m| m.rank()).unwrap_or(0);
    let r_c = rank(im_c.clone());
    let r_cl = rank(im_cl.clone());
    let r_sum = rank(im_c.into_iter().chain(im_cl).collect());
    r_c + r_cl > r_sum
}

/// Positions of the emitted basis, for callers that need to locate classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmittedLayout {
    /// `(component, s)` → indices of `a_{j,s}`, `b_{j,s}`.
    pub symplectic: BTreeMap<(usize, u32), (usize, usize)>,
    pub cycles: Vec<usize>,
    /// `γ_j` for every component but the last.
    pub gammas: Vec<usize>,
    pub sigma: usize,
}

/// Builds the surface model of the fiber: `H^0 = Q`, `H^1` from
/// positive-genus components and graph cycles, `H^2 = span{p_j}` in the
/// basis `γ_j = p_j - (b_j/b_r) p_r` (G-degree 1) and `σ` (G-degree 2).
pub fn emit_surface_model(fd: &FiberData) -> Result<(SurfaceModel, EmittedLayout)> {
    let v = validate_fiber(fd)?;
    let k = fd.k();
    let r = k - 1;
    let e = &v.intersection;
    let single = k == 1;

    let mut basis = vec![BasisClass::new("1", 0, 0)];
    let mut symplectic = BTreeMap::new();
    for j in 0..k {
        for s in 1..=fd.components[j].g {
            let (la, lb) = if single {
                (format!("a{s}"), format!("b{s}"))
            } else {
                (format!("a{}_{s}", j + 1), format!("b{}_{s}", j + 1))
            };
            basis.push(BasisClass::new(&la, 1, 1));
            basis.push(BasisClass::new(&lb, 1, 1));
            symplectic.insert((j, s), (basis.len() - 2, basis.len() - 1));
        }
    }
    let mut cycles = Vec::new();
    for t in 1..=fd.graph_betti() {
        basis.push(BasisClass::new(&format!("t{t}"), 1, 1));
        cycles.push(basis.len() - 1);
    }
    let h2_start = basis.len();
    let mut gammas = Vec::new();
    for j in 0..r {
        basis.push(BasisClass::new(&format!("c{}", j + 1), 2, 1));
        gammas.push(basis.len() - 1);
    }
    basis.push(BasisClass::new(if single { "p" } else { "s" }, 2, 2));
    let sigma = basis.len() - 1;
    let n = basis.len();

    // P: columns are the adapted classes in p-coordinates
    let b: Vec<Rational> = fd.components.iter().map(|c| int(c.b as i64)).collect();
    let positive = fd.positive_genus();
    let mut p_cols = Vec::new();
    for j in 0..r {
        let mut col = SparseVec::unit(j);
        col.add_at(r, -(&b[j] / &b[r]));
        p_cols.push(col);
    }
    let sigma_col = if positive.len() == 1 {
        SparseVec::unit(positive[0])
    } else {
        let total: Rational = b.iter().sum();
        SparseVec::from_pairs((0..k).map(|j| (j, total.recip())))
    };
    p_cols.push(sigma_col);
    let p = Matrix::from_columns(k, p_cols)?;
    let p_inv = invert(&p)?;
    // p_j in adapted coordinates, shifted to model indices
    let p_class = |j: usize| -> SparseVec { SparseVec::from_pairs(p_inv.column(j).iter().map(|(i, x)| (h2_start + i, x.clone()))) };

    let mut cup = vec![vec![SparseVec::new(); n]; n];
    for x in 0..n {
        cup[0][x] = SparseVec::unit(x);
        cup[x][0] = SparseVec::unit(x);
    }
    for (&(j, _), &(ia, ib)) in &symplectic {
        let pj = p_class(j);
        cup[ib][ia] = pj.scaled(&-Rational::one());
        cup[ia][ib] = pj;
    }

    let mut canonical = SparseVec::new();
    for j in 0..k {
        let c = 2 * fd.components[j].pa as i64 - 2 - e[j][j];
        canonical.add_scaled(&int(c), &p_class(j));
    }

    // ι on H_c^2 in the adapted bases: P^{-1} E P^{-T}
    let e_mat = Matrix::from_int_rows(&e.iter().map(|r| r.as_slice()).collect::<Vec<_>>())?;
    let iota_adapted = p_inv.compose(&e_mat)?.compose(&p_inv.transpose())?;
    let mut iota = vec![SparseVec::new(); n];
    for l in 0..k {
        iota[h2_start + l] =
            SparseVec::from_pairs(iota_adapted.column(l).iter().map(|(i, x)| (h2_start + i, x.clone())));
    }

    let model = SurfaceModel::new(fd.name(), basis, cup, canonical, iota)?;
    Ok((
        model,
        EmittedLayout {
            symplectic,
            cycles,
            gammas,
            sigma,
        },
    ))
}

fn invert(m: &Matrix) -> Result<Matrix> {
    let n = m.nrows();
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        let x = crate::exact::solve(m, &SparseVec::unit(i))?
            .ok_or_else(|| Error::Internal("adapted H^2 basis is singular".into()))?;
        cols.push(x);
    }
    Matrix::from_columns(n, cols)
}

// --- catalogue ---------------------------------------------------------

fn comp(label: &str, g: u32, pa: u32, b: u32) -> Component {
    Component {
        label: label.into(),
        g,
        pa,
        b,
    }
}

/// `I_k`: a cycle of `k` rational curves (`I_1` is a nodal rational curve).
pub fn kodaira_cycle(k: usize) -> FiberData {
    assert!(k >= 1);
    if k == 1 {
        return FiberData {
            name: Some("I1".into()),
            components: vec![comp("E1", 0, 1, 1)],
            edges: vec![[0, 0]],
        };
    }
    FiberData {
        name: Some(format!("I{k}")),
        components: (1..=k).map(|i| comp(&format!("E{i}"), 0, 0, 1)).collect(),
        edges: (0..k).map(|i| [i, (i + 1) % k]).collect(),
    }
}

pub fn smooth_genus2() -> FiberData {
    FiberData {
        name: Some("smooth_genus2".into()),
        components: vec![comp("C", 2, 2, 1)],
        edges: vec![],
    }
}

pub fn two_elliptic_components() -> FiberData {
    FiberData {
        name: Some("two_genus1".into()),
        components: vec![comp("E1", 1, 1, 1), comp("E2", 1, 1, 1)],
        edges: vec![[0, 1]],
    }
}

/// Not a fiber: multiplicities `(1, 2)` with one edge.
pub fn non_integral_fixture() -> FiberData {
    FiberData {
        name: Some("b12_single_edge".into()),
        components: vec![comp("E1", 0, 0, 1), comp("E2", 0, 0, 2)],
        edges: vec![[0, 1]],
    }
}

/// The shipped catalogue: the three reference fibers and `I_1, …, I_5`.
pub fn catalogue() -> Vec<FiberData> {
    let mut out = vec![kodaira_cycle(2), smooth_genus2(), two_elliptic_components()];
    out.extend([1, 3, 4, 5].into_iter().map(kodaira_cycle));
    out
}

/// Catalogue file layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalogue {
    pub fibers: Vec<FiberData>,
}
