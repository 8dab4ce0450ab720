use std::sync::OnceLock;

use proptest::prelude::*;

use hilbfock::exact::{int, Rational, SparseVec};
use hilbfock::fibration::{emit_surface_model, kodaira_cycle};
use hilbfock::fock::FockVector;
use hilbfock::heisenberg::{integral_pair, supercommutator, Expansion};
use hilbfock::surface::{elliptic_model, genus2_model, ClassArg};
use hilbfock::taut::{ColumnOrder, CupTable, Taut};
use hilbfock::verify::PerversityValue;

struct Fixture {
    taut: Taut,
    tables: Vec<CupTable>,
}

fn fixtures() -> &'static [Fixture] {
    static CELL: OnceLock<Vec<Fixture>> = OnceLock::new();
    CELL.get_or_init(|| {
        [elliptic_model(), genus2_model(), emit_surface_model(&kodaira_cycle(2)).unwrap().0]
            .into_iter()
            .map(|m| {
                let taut = Taut::for_model(m);
                let tables = (0..=2).map(|n| taut.cup_table(n).unwrap()).collect();
                Fixture { taut, tables }
            })
            .collect()
    })
}

fn coeffs(len: usize) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(-3i64..=3, len)
}

// Random combination of the first basis words at a weight.
fn vector(f: &Fixture, n: usize, cs: &[i64]) -> FockVector {
    let basis = f.taut.heisenberg().space().basis(n).unwrap();
    let mut v = FockVector::new();
    for (w, c) in basis.words.iter().zip(cs) {
        v.add_term(w.clone(), int(*c));
    }
    v
}

fn sparse(dim: usize, cs: &[i64]) -> SparseVec {
    SparseVec::from_pairs(cs.iter().take(dim).enumerate().map(|(i, c)| (i, int(*c))))
}

fn class(f: &Fixture, n: i64, i: usize) -> (ClassArg, bool) {
    let m = f.taut.model();
    let i = i % m.dim();
    let c = if n > 0 { ClassArg::basis(i) } else { ClassArg::dual(i) };
    (c, m.is_odd(i))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn heisenberg_relation_on_random_vectors(
        fi in 0usize..3, w in 0usize..=3, cs in coeffs(12),
        n1 in prop::sample::select(vec![-2i64, -1, 1, 2]), n2 in prop::sample::select(vec![-2i64, -1, 1, 2]),
        i in 0usize..16, j in 0usize..16,
    ) {
        let f = &fixtures()[fi];
        let h = f.taut.heisenberg();
        let v = vector(f, w, &cs);
        let (a, pa) = class(f, n1, i);
        let (b, pb) = class(f, n2, j);
        let lhs = supercommutator(|x| h.apply_nakajima(n1, &a, x), pa, |x| h.apply_nakajima(n2, &b, x), pb, &v).unwrap();
        let c = if n1 + n2 == 0 { integral_pair(f.taut.model(), &a, &b) * int(n1) } else { Rational::from_integer(0.into()) };
        prop_assert_eq!(lhs, v.scaled(&c));
    }

    #[test]
    fn boundary_is_path_independent(fi in 0usize..3, w in 0usize..=4, cs in coeffs(20)) {
        let f = &fixtures()[fi];
        let h = f.taut.heisenberg();
        let v = vector(f, w, &cs);
        prop_assert_eq!(h.apply_boundary_with(&v, Expansion::Leftmost), h.apply_boundary_with(&v, Expansion::Rightmost));
    }

    #[test]
    fn tautological_product_ignores_kernel_shift(
        fi in 0usize..3, w in 1usize..=2, cs in coeffs(12), a in 0usize..16,
        shift in proptest::collection::vec(-5i64..=5, 8),
        order in prop::sample::select(vec![ColumnOrder::Q1First, ColumnOrder::DelFirst, ColumnOrder::Reversed]),
    ) {
        let f = &fixtures()[fi];
        let a = a % f.taut.model().dim();
        let v = vector(f, w, &cs);
        let shift: Vec<Rational> = shift.into_iter().map(int).collect();
        let mut rec = FockVector::new();
        for (word, c) in v.iter() {
            rec.add_scaled(c, &f.taut.taut_mul_recursive(a, &FockVector::word(word.clone()), order, &shift).unwrap());
        }
        prop_assert_eq!(rec, f.taut.taut_mul(&SparseVec::unit(a), &v).unwrap());
    }

    #[test]
    fn cup_product_is_associative(fi in 0usize..3, n in 1usize..=2, x in coeffs(24), y in coeffs(24), z in coeffs(24)) {
        let t = &fixtures()[fi].tables[n];
        let (x, y, z) = (sparse(t.dim(), &x), sparse(t.dim(), &y), sparse(t.dim(), &z));
        prop_assert_eq!(t.multiply(&t.multiply(&x, &y), &z), t.multiply(&x, &t.multiply(&y, &z)));
    }

    // Holds wherever the filtration is multiplicative: M_E and I2 at n = 2,
    // every model at n = 1.
    #[test]
    fn perversity_is_subadditive(fi in 0usize..3, n in 1usize..=2, x in coeffs(24), y in coeffs(24)) {
        prop_assume!(!(fi == 1 && n == 2));
        let f = &fixtures()[fi];
        let m = f.taut.model();
        let t = &f.tables[n];
        let basis = f.taut.heisenberg().space().basis(n).unwrap();
        let as_fock = |v: &SparseVec| {
            let mut out = FockVector::new();
            for (k, c) in v.iter() {
                out.add_term(t.words[k].clone(), c.clone());
            }
            out
        };
        let (xs, ys) = (sparse(t.dim(), &x), sparse(t.dim(), &y));
        let (px, py) = (PerversityValue::of(m, &as_fock(&xs)), PerversityValue::of(m, &as_fock(&ys)));
        let prod = as_fock(&t.multiply(&xs, &ys));
        // table words span the whole weight-n space
        prop_assert_eq!(t.dim(), basis.len());
        if let (Some(a), Some(b)) = (px.0, py.0) {
            prop_assert!(PerversityValue::of(m, &prod) <= PerversityValue(Some(a + b)));
        }
    }
}
