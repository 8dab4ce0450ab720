//! Audits of the operator relations, the tri-degree laws, multiplicativity
//! of the G-decomposition and the boundary self-intersection.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{int, Rational, SparseVec};
use crate::fibration::{analyze, emit_surface_model, FiberData};
use crate::fock::{tridegree, FockVector, FockWord, TriDegree};
use crate::heisenberg::{class_product, integral_pair, nakajima_any, supercommutator};
use crate::surface::{ClassArg, Side, SurfaceModel};
use crate::taut::{boundary_divisor_class, CupTable, Taut, TautSpec};

/// Witnesses kept per audit item.
pub const WITNESS_CAP: usize = 25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn parse(s: &str) -> Result<Verdict> {
        match s {
            "pass" => Ok(Verdict::Pass),
            "fail" => Ok(Verdict::Fail),
            other => Err(Error::Parse {
                position: 0,
                message: format!("expected pass or fail, got {other:?}"),
            }),
        }
    }

    fn of(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        })
    }
}

/// Maximal G-degree over the nonzero G-components of a vector; `None` for 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct PerversityValue(pub Option<i64>);

impl PerversityValue {
    pub fn of(m: &SurfaceModel, v: &FockVector) -> Self {
        PerversityValue(v.iter().map(|(w, _)| tridegree(m, w).k).max())
    }
}

/// G-degree of a nonzero vector if all its terms share one.
pub fn pure_gdeg(m: &SurfaceModel, v: &FockVector) -> Option<i64> {
    let mut ks = v.iter().map(|(w, _)| tridegree(m, w).k);
    let first = ks.next()?;
    ks.all(|k| k == first).then_some(first)
}

/// `"g=2: q2(p) | g=3: -4 q2(p)"`, or `"0"`.
pub fn describe_gdeg(m: &SurfaceModel, v: &FockVector) -> String {
    if v.is_zero() {
        return "0".into();
    }
    v.by_gdeg(m)
        .iter()
        .map(|(g, part)| format!("g={g}: {}", part.format(m)))
        .collect::<Vec<_>>()
        .join(" | ")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub input: String,
    pub expected: String,
    pub observed: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditItem {
    pub name: String,
    pub verdict: Verdict,
    /// Verdict predicted from the model's hypotheses, if any.
    pub expected: Option<Verdict>,
    pub checked: u64,
    pub failures: u64,
    pub witnesses: Vec<Witness>,
}

impl AuditItem {
    fn new(name: &str, expected: Option<Verdict>, checked: u64, failures: Vec<Witness>) -> Self {
        let count = failures.len() as u64;
        AuditItem {
            name: name.into(),
            verdict: Verdict::of(count == 0),
            expected,
            checked,
            failures: count,
            witnesses: failures.into_iter().take(WITNESS_CAP).collect(),
        }
    }

    pub fn conforms(&self) -> bool {
        self.expected.is_none_or(|e| e == self.verdict)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    pub strongly_multiplicative: bool,
    pub canonical_zero: bool,
    /// `None` when `K` is zero or not pure.
    pub canonical_gdeg: Option<u8>,
}

impl Hypotheses {
    pub fn of(m: &SurfaceModel) -> Self {
        Hypotheses {
            strongly_multiplicative: m.strongly_multiplicative_g(),
            canonical_zero: m.canonical().is_zero(),
            canonical_gdeg: m.canonical_gdeg(),
        }
    }

    /// `K ∈ G_1 H^2`.
    pub fn canonical_in_g1(&self) -> bool {
        self.canonical_zero || self.canonical_gdeg == Some(1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub name: String,
    pub model: String,
    pub parameters: BTreeMap<String, String>,
    pub hypotheses: Hypotheses,
    pub verdict: Verdict,
    /// Every item agrees with its predicted verdict.
    pub conforms: bool,
    pub items: Vec<AuditItem>,
}

impl AuditReport {
    fn new(name: &str, m: &SurfaceModel, parameters: &[(&str, String)], items: Vec<AuditItem>) -> Self {
        AuditReport {
            name: name.into(),
            model: m.name().into(),
            parameters: parameters.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            hypotheses: Hypotheses::of(m),
            verdict: Verdict::of(items.iter().all(|i| i.verdict == Verdict::Pass)),
            conforms: items.iter().all(AuditItem::conforms),
            items,
        }
    }

    pub fn item(&self, name: &str) -> Option<&AuditItem> {
        self.items.iter().find(|i| i.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(f, "audit {} on {} ({})", self.name, self.model, params.join(", "))?;
        let h = &self.hypotheses;
        let gk = match (h.canonical_zero, h.canonical_gdeg) {
            (true, _) => "K=0".to_string(),
            (false, Some(g)) => format!("g(K)={g}"),
            (false, None) => "K mixed".to_string(),
        };
        writeln!(f, "  hypotheses: strongly multiplicative={}, {gk}", h.strongly_multiplicative)?;
        for item in &self.items {
            let exp = item.expected.map_or("-".to_string(), |e| e.to_string());
            writeln!(
                f,
                "  [{}] {} (expected {exp}; {} checked, {} failures)",
                item.verdict, item.name, item.checked, item.failures
            )?;
            for w in &item.witnesses {
                writeln!(f, "      {}: expected {}; observed {}", w.input, w.expected, w.observed)?;
            }
        }
        write!(f, "  verdict: {} (conforms: {})", self.verdict, self.conforms)
    }
}

fn basis_classes(m: &SurfaceModel, n: i64) -> Vec<ClassArg> {
    (0..m.dim())
        .map(|i| if n >= 0 { ClassArg::basis(i) } else { ClassArg::dual(i) })
        .collect()
}

fn class_label(m: &SurfaceModel, c: &ClassArg) -> String {
    m.format_class(&c.coords, c.side)
}

fn class_odd(m: &SurfaceModel, c: &ClassArg) -> bool {
    c.coords.min_index().is_some_and(|i| m.is_odd(i))
}

fn words_up_to(t: &Taut, max_weight: usize) -> Result<Vec<FockWord>> {
    let mut out = Vec::new();
    for w in 0..=max_weight {
        out.extend(t.heisenberg().space().basis(w)?.words.iter().cloned());
    }
    Ok(out)
}

/// Heisenberg relation and `[L_m(β), q_n(α)] = n q_{m+n}(βα)` on every basis
/// word of weight `<= max_weight`, indices `|m|, |n| <= max_index`.
pub fn audit_relations(t: &Taut, max_weight: usize, max_index: i64) -> Result<AuditReport> {
    if max_weight < 1 || max_index < 1 {
        return Err(Error::Precondition("relation audit bounds must be >= 1".into()));
    }
    let h = t.heisenberg();
    let m = h.model();
    let words = words_up_to(t, max_weight)?;
    let indices: Vec<i64> = (-max_index..=max_index).filter(|&k| k != 0).collect();

    let heis: Vec<(u64, Vec<Witness>)> = words
        .par_iter()
        .map(|word| -> Result<(u64, Vec<Witness>)> {
            let v = FockVector::word(word.clone());
            let mut checked = 0;
            let mut bad = Vec::new();
            for &n1 in &indices {
                for &n2 in &indices {
                    for a in basis_classes(m, n1) {
                        for b in basis_classes(m, n2) {
                            let lhs = supercommutator(
                                |x| h.apply_nakajima(n1, &a, x),
                                class_odd(m, &a),
                                |x| h.apply_nakajima(n2, &b, x),
                                class_odd(m, &b),
                                &v,
                            )?;
                            let c = if n1 + n2 == 0 {
                                integral_pair(m, &a, &b) * int(n1)
                            } else {
                                Rational::from_integer(0.into())
                            };
                            let rhs = v.scaled(&c);
                            checked += 1;
                            if lhs != rhs {
                                bad.push(Witness {
                                    input: format!(
                                        "[q({n1},{}), q({n2},{})] on {}",
                                        class_label(m, &a),
                                        class_label(m, &b),
                                        word.format(m)
                                    ),
                                    expected: rhs.format(m),
                                    observed: lhs.format(m),
                                });
                            }
                        }
                    }
                }
            }
            Ok((checked, bad))
        })
        .collect::<Result<_>>()?;

    let lp: Vec<(u64, Vec<Witness>)> = words
        .par_iter()
        .map(|word| -> Result<(u64, Vec<Witness>)> {
            let v = FockVector::word(word.clone());
            let mut checked = 0;
            let mut bad = Vec::new();
            for mm in -max_index..=max_index {
                for &n in &indices {
                    for b in basis_classes(m, mm) {
                        for a in basis_classes(m, n) {
                            let lhs = supercommutator(
                                |x| h.apply_virasoro(mm, &b, x),
                                class_odd(m, &b),
                                |x| h.apply_nakajima(n, &a, x),
                                class_odd(m, &a),
                                &v,
                            )?;
                            let prod = class_product(m, &b, &a);
                            let rhs = nakajima_any(h, mm + n, &prod, &v).scaled(&int(n));
                            checked += 1;
                            if lhs != rhs {
                                bad.push(Witness {
                                    input: format!(
                                        "[L({mm},{}), q({n},{})] on {}",
                                        class_label(m, &b),
                                        class_label(m, &a),
                                        word.format(m)
                                    ),
                                    expected: rhs.format(m),
                                    observed: lhs.format(m),
                                });
                            }
                        }
                    }
                }
            }
            Ok((checked, bad))
        })
        .collect::<Result<_>>()?;

    let fold = |parts: Vec<(u64, Vec<Witness>)>| {
        parts.into_iter().fold((0, Vec::new()), |(c, mut w), (c2, w2)| {
            w.extend(w2);
            (c + c2, w)
        })
    };
    let (c1, w1) = fold(heis);
    let (c2, w2) = fold(lp);
    Ok(AuditReport::new(
        "relations",
        m,
        &[("max_weight", max_weight.to_string()), ("max_index", max_index.to_string())],
        vec![
            AuditItem::new("heisenberg", Some(Verdict::Pass), c1, w1),
            AuditItem::new("virasoro-nakajima", Some(Verdict::Pass), c2, w2),
        ],
    ))
}

struct Family<'a> {
    label: String,
    shift: TriDegree,
    weight_shift: i64,
    apply: Box<dyn Fn(&FockVector) -> Result<FockVector> + Sync + 'a>,
}

fn check_family(m: &SurfaceModel, words: &[FockWord], max_weight: usize, fam: &Family<'_>) -> Result<(u64, Vec<Witness>)> {
    let results: Vec<(u64, Option<Witness>)> = words
        .par_iter()
        .map(|w| -> Result<(u64, Option<Witness>)> {
            let target = w.weight() as i64 + fam.weight_shift;
            if target < 0 || target > max_weight as i64 || (fam.weight_shift == 0 && w.weight() == 0) {
                return Ok((0, None));
            }
            let v = FockVector::word(w.clone());
            let out = (fam.apply)(&v)?;
            let expect = tridegree(m, w) + fam.shift;
            let ok = out.iter().all(|(u, _)| tridegree(m, u) == expect);
            let witness = (!ok).then(|| Witness {
                input: format!("{} on {}", fam.label, w.format(m)),
                expected: format!("tri-degree {expect}"),
                observed: out
                    .by_tridegree(m)
                    .iter()
                    .map(|(t, part)| format!("{t}: {}", part.format(m)))
                    .collect::<Vec<_>>()
                    .join(" | "),
            });
            Ok((1, witness))
        })
        .collect::<Result<_>>()?;
    let checked = results.iter().map(|r| r.0).sum();
    Ok((checked, results.into_iter().filter_map(|r| r.1).collect()))
}

/// Tri-degree laws of the Nakajima, Virasoro, boundary and tautological
/// operators on all basis words of weight `<= n`.
pub fn audit_purity(t: &Taut, n: usize) -> Result<AuditReport> {
    let h = t.heisenberg();
    let m = h.model();
    t.heisenberg().space().check_weight(n)?;
    let hyp = Hypotheses::of(m);
    let words = words_up_to(t, n)?;
    let ni = n as i64;

    // `(k, d + 2k - 2 + dd, g + k - 1 + dg)`
    let shift_of = |k: i64, i: usize, side: Side, dd: i64, dg: i64| {
        let (d, g) = match side {
            Side::Ordinary => (m.degree(i) as i64, m.gdeg(i) as i64),
            Side::Compact => (m.dual_degree(i) as i64, m.dual_gdeg(i) as i64),
        };
        TriDegree::new(k, d + 2 * k - 2 + dd, g + k - 1 + dg)
    };

    let mut item1 = Vec::new();
    let mut item3 = Vec::new();
    for k in (-ni..=ni).filter(|&k| k != 0) {
        let side = if k > 0 { Side::Ordinary } else { Side::Compact };
        for i in 0..m.dim() {
            let cls = if k > 0 { ClassArg::basis(i) } else { ClassArg::dual(i) };
            let c1 = cls.clone();
            item1.push(Family {
                label: format!("q({k},{})", class_label(m, &cls)),
                shift: shift_of(k, i, side, 0, 0),
                weight_shift: k,
                apply: Box::new(move |v| h.apply_nakajima(k, &c1, v)),
            });
        }
    }
    for k in -ni..=ni {
        let side = if k >= 0 { Side::Ordinary } else { Side::Compact };
        for i in 0..m.dim() {
            let cls = if k >= 0 { ClassArg::basis(i) } else { ClassArg::dual(i) };
            let label = format!("L({k},{})", class_label(m, &cls));
            item3.push(Family {
                label,
                shift: shift_of(k, i, side, 2, 1),
                weight_shift: k,
                apply: Box::new(move |v| h.apply_virasoro(k, &cls, v)),
            });
        }
    }
    let mut item2 = Vec::new();
    if let Some(u) = m.unit_index() {
        for k in 0..=ni {
            item2.push(Family {
                label: format!("L({k},1)"),
                shift: TriDegree::new(k, 2 * k, k),
                weight_shift: k,
                apply: Box::new(move |v| h.apply_virasoro(k, &ClassArg::basis(u), v)),
            });
        }
    }
    let item4 = vec![Family {
        label: "del".into(),
        shift: TriDegree::new(0, 2, 1),
        weight_shift: 0,
        apply: Box::new(|v| Ok(h.apply_boundary(v))),
    }];
    let mut item5 = Vec::new();
    for spec in t.generators(n) {
        let d = m.degree(spec.class) as i64;
        let g = m.gdeg(spec.class) as i64;
        let l = spec.l as i64;
        item5.push(Family {
            label: format!("{}^[n]_{}", m.label(spec.class), spec.l),
            shift: TriDegree::new(0, d + 2 * l - 4, g + l - 2),
            weight_shift: 0,
            apply: Box::new(move |v| t.taut_component(spec, v)),
        });
    }

    let run = |fams: &[Family<'_>]| -> Result<(u64, Vec<Witness>)> {
        let mut checked = 0;
        let mut bad = Vec::new();
        for fam in fams {
            let (c, w) = check_family(m, &words, n, fam)?;
            checked += c;
            bad.extend(w);
        }
        Ok((checked, bad))
    };

    let full = hyp.strongly_multiplicative && hyp.canonical_in_g1();
    let obstructed = !hyp.canonical_zero && hyp.canonical_gdeg == Some(2);
    let expect45 = if full {
        Some(Verdict::Pass)
    } else if obstructed {
        Some(Verdict::Fail)
    } else {
        None
    };
    let expect3 = hyp.strongly_multiplicative.then_some(Verdict::Pass);

    let mut items = Vec::new();
    for (name, fams, expected) in [
        ("1 nakajima", &item1, Some(Verdict::Pass)),
        ("2 virasoro L(n,1)", &item2, Some(Verdict::Pass)),
        ("3 virasoro L(n,a)", &item3, expect3),
        ("4 boundary", &item4, expect45),
        ("5 tautological", &item5, expect45),
    ] {
        let (c, w) = run(fams)?;
        items.push(AuditItem::new(name, expected, c, w));
    }
    Ok(AuditReport::new("purity", m, &[("n", n.to_string())], items))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Strong,
    Filtration,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Mode> {
        match s {
            "strong" => Ok(Mode::Strong),
            "filtration" => Ok(Mode::Filtration),
            other => Err(Error::Parse {
                position: 0,
                message: format!("expected strong or filtration, got {other:?}"),
            }),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strong => "strong",
            Mode::Filtration => "filtration",
        })
    }
}

/// Verdict predicted from the model hypotheses, where they decide it.
pub fn predicted_multiplicativity(m: &SurfaceModel, n: usize, mode: Mode) -> Option<Verdict> {
    let hyp = Hypotheses::of(m);
    match (n, mode) {
        (1, Mode::Filtration) => Some(Verdict::Pass),
        (1, Mode::Strong) => Some(Verdict::of(hyp.strongly_multiplicative)),
        (_, Mode::Strong) if !hyp.canonical_in_g1() => Some(Verdict::Fail),
        (_, _) if hyp.strongly_multiplicative && hyp.canonical_in_g1() => Some(Verdict::Pass),
        _ => None,
    }
}

/// Checks products of all basis pairs of a cup table.
pub fn check_multiplicativity_table(m: &SurfaceModel, table: &CupTable, mode: Mode) -> AuditReport {
    let tri: Vec<TriDegree> = table.words.iter().map(|w| tridegree(m, w)).collect();
    let d = table.dim();
    let rows: Vec<Vec<Witness>> = (0..d)
        .into_par_iter()
        .map(|i| {
            let mut bad = Vec::new();
            for j in 0..d {
                let prod = table.product(i, j);
                if prod.is_zero() {
                    continue;
                }
                let bound = tri[i].k + tri[j].k;
                let ok = match mode {
                    Mode::Strong => prod.iter().all(|(u, _)| tri[u].k == bound),
                    Mode::Filtration => prod.iter().all(|(u, _)| tri[u].k <= bound),
                };
                if !ok {
                    let v = sparse_to_fock(table, prod);
                    bad.push(Witness {
                        input: format!("{} * {}", table.words[i].format(m), table.words[j].format(m)),
                        expected: match mode {
                            Mode::Strong => format!("g = {bound}"),
                            Mode::Filtration => format!("g <= {bound}"),
                        },
                        observed: describe_gdeg(m, &v),
                    });
                }
            }
            bad
        })
        .collect();
    let witnesses: Vec<Witness> = rows.into_iter().flatten().collect();
    let item = AuditItem::new(
        &format!("{mode} multiplicativity"),
        predicted_multiplicativity(m, table.n, mode),
        (d * d) as u64,
        witnesses,
    );
    AuditReport::new(
        "multiplicativity",
        m,
        &[("n", table.n.to_string()), ("mode", mode.to_string())],
        vec![item],
    )
}

fn sparse_to_fock(table: &CupTable, v: &SparseVec) -> FockVector {
    let mut out = FockVector::new();
    for (k, c) in v.iter() {
        out.add_term(table.words[k].clone(), c.clone());
    }
    out
}

pub fn check_multiplicativity(t: &Taut, n: usize, mode: Mode) -> Result<AuditReport> {
    let table = t.cup_table(n)?;
    Ok(check_multiplicativity_table(t.model(), &table, mode))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SelfIntersectionVerdict {
    /// Every G-component has `g <= 2`.
    Compatible,
    /// Some component has `g > 2`: multiplicativity is obstructed.
    Obstructed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundarySelfIntersection {
    pub n: usize,
    pub vector: String,
    /// G-degree to component.
    pub components: BTreeMap<i64, String>,
    pub all_at_most_2: bool,
    /// `-2 q_1(1)^{n-2} q_2(K) 1`, the contribution of `K`.
    pub canonical_term: String,
    pub canonical_term_gdeg: Option<i64>,
    pub verdict: SelfIntersectionVerdict,
    #[serde(skip)]
    pub value: FockVector,
    #[serde(skip)]
    pub canonical_value: FockVector,
}

impl fmt::Display for BoundarySelfIntersection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "boundary self-intersection at n={}: {}", self.n, self.vector)?;
        for (g, part) in &self.components {
            writeln!(f, "  g={g}: {part}")?;
        }
        let gk = self.canonical_term_gdeg.map_or("-".into(), |g| g.to_string());
        writeln!(f, "  K term: {} (g={gk})", self.canonical_term)?;
        write!(
            f,
            "  verdict: {}",
            match self.verdict {
                SelfIntersectionVerdict::Compatible => "compatible",
                SelfIntersectionVerdict::Obstructed => "multiplicativity obstructed",
            }
        )
    }
}

/// `∂S^[n] · ∂S^[n] = -2 ∂(q_1(1)^{n-2} q_2(1) 1)`.
pub fn boundary_self_intersection(t: &Taut, n: usize) -> Result<BoundarySelfIntersection> {
    let h = t.heisenberg();
    let m = h.model();
    let b = boundary_divisor_class(m, n)?;
    let value = h.apply_boundary(&b).scaled(&int(-2));
    let u = m.unit_index().ok_or_else(|| Error::MalformedModel("no unit class".into()))?;
    let mut kv = h.create(2, m.canonical(), &FockVector::vacuum());
    for _ in 0..n - 2 {
        kv = h.create_basis(1, u, &kv);
    }
    let canonical_value = kv.scaled(&int(-2));
    let parts = value.by_gdeg(m);
    let all_at_most_2 = parts.keys().all(|&g| g <= 2);
    Ok(BoundarySelfIntersection {
        n,
        vector: value.format(m),
        components: parts.iter().map(|(g, v)| (*g, v.format(m))).collect(),
        all_at_most_2,
        canonical_term: canonical_value.format(m),
        canonical_term_gdeg: pure_gdeg(m, &canonical_value),
        verdict: if all_at_most_2 {
            SelfIntersectionVerdict::Compatible
        } else {
            SelfIntersectionVerdict::Obstructed
        },
        value,
        canonical_value,
    })
}

/// For every dual pair with `ι β^i != 0`: `(β_i)^[n]_l` is zero or pure and
/// `g(ι β^i) + g((β_i)^[n]_l) = l`.
pub fn audit_chern(t: &Taut, n: usize, l: u32) -> Result<AuditReport> {
    let m = t.model();
    let hyp = Hypotheses::of(m);
    if !hyp.strongly_multiplicative || !(hyp.canonical_zero || hyp.canonical_gdeg.is_some_and(|g| g <= 1)) {
        return Err(Error::Precondition(
            "Chern audit needs a strongly multiplicative model with g(K) <= 1".into(),
        ));
    }
    let mut checked = 0;
    let mut bad = Vec::new();
    for i in 0..m.dim() {
        let iv = m.iota_basis(i);
        if iv.is_zero() {
            continue;
        }
        let tc = t.taut_class(TautSpec { class: i, l }, n)?;
        if tc.is_zero() {
            continue;
        }
        checked += 1;
        let gi = m.pure_gdeg(iv).map(i64::from);
        let gt = pure_gdeg(m, &tc);
        let ok = matches!((gi, gt), (Some(a), Some(b)) if a + b == l as i64);
        if !ok {
            bad.push(Witness {
                input: format!("pair ({}, {}^), l={l}", m.label(i), m.label(i)),
                expected: format!("g(iota {}^) + g(taut) = {l}", m.label(i)),
                observed: format!(
                    "iota {}^ = {} (g={}), taut = {}",
                    m.label(i),
                    m.format_class(iv, Side::Ordinary),
                    gi.map_or("mixed".into(), |g| g.to_string()),
                    describe_gdeg(m, &tc)
                ),
            });
        }
    }
    Ok(AuditReport::new(
        "chern",
        m,
        &[("n", n.to_string()), ("l", l.to_string())],
        vec![AuditItem::new("dual pairs", Some(Verdict::Pass), checked, bad)],
    ))
}

/// Over a list of fibers at weight `n`: the elliptic flag, strong and
/// filtration multiplicativity of the emitted model, and `K ∈ G_1` must all
/// agree.
pub fn equivalence_battery(fibers: &[FiberData], n: usize) -> Result<AuditReport> {
    let rows: Vec<(String, [bool; 4])> = fibers
        .par_iter()
        .map(|fd| -> Result<(String, [bool; 4])> {
            let report = analyze(fd)?;
            let (m, _) = emit_surface_model(fd)?;
            let t = Taut::for_model(m.clone());
            let table = t.cup_table(n)?;
            let strong = check_multiplicativity_table(&m, &table, Mode::Strong).verdict == Verdict::Pass;
            let filt = check_multiplicativity_table(&m, &table, Mode::Filtration).verdict == Verdict::Pass;
            Ok((fd.name().to_string(), [report.elliptic, strong, filt, m.canonical_in_g1()]))
        })
        .collect::<Result<_>>()?;
    let mut bad = Vec::new();
    for (name, flags) in &rows {
        if flags.iter().any(|&f| f != flags[0]) {
            bad.push(Witness {
                input: name.clone(),
                expected: "elliptic = strong = filtration = (K in G_1)".into(),
                observed: format!(
                    "elliptic={} strong={} filtration={} K in G_1={}",
                    flags[0], flags[1], flags[2], flags[3]
                ),
            });
        }
    }
    let first = fibers.first().map(|f| f.name().to_string()).unwrap_or_default();
    let mut report = AuditReport {
        name: "fibration-equivalence".into(),
        model: format!("{} fibers from {first}", fibers.len()),
        parameters: [("n".to_string(), n.to_string())].into_iter().collect(),
        hypotheses: Hypotheses {
            strongly_multiplicative: false,
            canonical_zero: false,
            canonical_gdeg: None,
        },
        verdict: Verdict::Pass,
        conforms: true,
        items: vec![AuditItem::new("equivalence", Some(Verdict::Pass), rows.len() as u64, bad)],
    };
    report.verdict = report.items[0].verdict;
    report.conforms = report.items[0].conforms();
    Ok(report)
}
