use num_traits::One;

use hilbfock::exact::{binomial, Rational, SparseVec};
use hilbfock::fibration::{emit_surface_model, kodaira_cycle};
use hilbfock::fock::FockVector;
use hilbfock::surface::{elliptic_model, genus2_model};
use hilbfock::taut::{ad_cap, ColumnOrder, Taut};
use hilbfock::SurfaceModel;

fn models() -> Vec<SurfaceModel> {
    vec![elliptic_model(), genus2_model(), emit_surface_model(&kodaira_cycle(2)).unwrap().0]
}

#[test]
fn tautological_operators_supercommute() {
    for m in models() {
        let t = Taut::for_model(m);
        let m = t.model();
        for n in 1..=3 {
            for a in 0..m.dim() {
                for b in 0..m.dim() {
                    let ta = t.total_matrix(a, n).unwrap();
                    let tb = t.total_matrix(b, n).unwrap();
                    let mut c = ta.compose(&tb).unwrap();
                    let s = if m.is_odd(a) && m.is_odd(b) { Rational::one() } else { -Rational::one() };
                    c.add_scaled(&s, &tb.compose(&ta).unwrap()).unwrap();
                    assert!(c.is_zero(), "{}: {} and {} at n={n}", m.name(), m.label(a), m.label(b));
                }
            }
        }
    }
}

// Different column orders and kernel shifts in the decomposition must give
// the same operator.
#[test]
fn recursion_is_independent_of_decomposition() {
    let shift: Vec<Rational> = (0..6).map(|i| Rational::from_integer((7 * i + 3).into())).collect();
    for m in models() {
        let t = Taut::for_model(m);
        let m = t.model();
        for n in 1..=2 {
            for w in t.heisenberg().space().basis(n).unwrap().words.iter() {
                let v = FockVector::word(w.clone());
                for a in 0..m.dim() {
                    let direct = t.taut_mul(&SparseVec::unit(a), &v).unwrap();
                    for order in [ColumnOrder::Q1First, ColumnOrder::DelFirst, ColumnOrder::Reversed] {
                        let r = t.taut_mul_recursive(a, &v, order, &shift).unwrap();
                        assert_eq!(r, direct, "{}: {} on {} ({order:?})", m.name(), m.label(a), w.format(m));
                    }
                }
            }
        }
    }
}

// (ad D)^j X = sum_i C(j,i) (-1)^i D^(j-i) X D^i, against the nested recursion.
#[test]
fn exp_ad_matches_binomial_expansion() {
    for m in models() {
        let t = Taut::for_model(m);
        let m = t.model();
        let h = t.heisenberg();
        let del_pow = |k: u32, v: &FockVector| (0..k).fold(v.clone(), |acc, _| h.apply_boundary(&acc));
        for n in 0..=2 {
            for w in h.space().basis(n).unwrap().words.iter() {
                let v = FockVector::word(w.clone());
                for a in 0..m.dim() {
                    let x = SparseVec::unit(a);
                    let mut total = FockVector::new();
                    let mut fact = Rational::one();
                    for j in 0..=ad_cap(n + 1) {
                        if j > 0 {
                            fact *= Rational::from_integer(j.into());
                        }
                        let nested = h.apply_ad_boundary_pow(j, &x, &v);
                        let mut binom = FockVector::new();
                        for i in 0..=j {
                            let s = if i % 2 == 0 { Rational::one() } else { -Rational::one() };
                            let term = del_pow(j - i, &h.create(1, &x, &del_pow(i, &v)));
                            binom.add_scaled(&(binomial(j as i64, i as i64) * s), &term);
                        }
                        assert_eq!(nested, binom, "{}: j={j} on {}", m.name(), w.format(m));
                        total.add_scaled(&fact.recip(), &nested);
                    }
                    let basis = h.space().basis(n).unwrap();
                    let col = basis.to_sparse(&v).unwrap();
                    let via_matrix = t.exp_ad_matrix(&x, n).unwrap().apply(&col).unwrap();
                    let out = h.space().basis(n + 1).unwrap().to_fock(&via_matrix);
                    assert_eq!(out, total, "{}: exp ad q1({}) on {}", m.name(), m.label(a), w.format(m));
                }
            }
        }
    }
}
