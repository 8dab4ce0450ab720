use hilbfock::fibration::{catalogue, emit_surface_model};
use hilbfock::taut::Taut;
use hilbfock::verify::{audit_chern, check_multiplicativity, predicted_multiplicativity, Hypotheses, Mode, Verdict};

#[test]
fn catalogue_verdicts_match_predictions() {
    for fd in catalogue() {
        let (m, _) = emit_surface_model(&fd).unwrap();
        let t = Taut::for_model(m);
        let m = t.model();
        for n in [2, 3] {
            for mode in [Mode::Strong, Mode::Filtration] {
                let r = check_multiplicativity(&t, n, mode).unwrap();
                if let Some(want) = predicted_multiplicativity(m, n, mode) {
                    assert_eq!(r.verdict, want, "{} n={n} {mode}", fd.name());
                }
                assert!(r.conforms, "{} n={n} {mode}", fd.name());
                assert!(r.items[0].checked > 0, "{} n={n} {mode} checked nothing", fd.name());
            }
        }
    }
}

#[test]
fn chern_audit_passes_where_it_applies() {
    let mut ran = 0;
    for fd in catalogue() {
        let (m, _) = emit_surface_model(&fd).unwrap();
        let h = Hypotheses::of(&m);
        let t = Taut::for_model(m);
        if !(h.strongly_multiplicative && h.canonical_in_g1()) {
            assert!(audit_chern(&t, 2, 2).is_err(), "{} should be refused", fd.name());
            continue;
        }
        for n in 1..=3 {
            for l in 0..=4 {
                let r = audit_chern(&t, n, l).unwrap();
                assert_eq!(r.verdict, Verdict::Pass, "{} n={n} l={l}: {r}", fd.name());
            }
        }
        ran += 1;
    }
    assert!(ran >= 3);
}
