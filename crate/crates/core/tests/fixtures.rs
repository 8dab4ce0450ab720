use std::path::PathBuf;

use hilbfock::fibration::{catalogue, kodaira_cycle, non_integral_fixture, smooth_genus2, two_elliptic_components, Catalogue, FiberData};
use hilbfock::surface::{elliptic_model, genus2_model};
use hilbfock::SurfaceModel;

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(rel)
}

#[test]
fn model_fixtures_match_builtins() {
    for (file, m) in [("M_E.json", elliptic_model()), ("M_2.json", genus2_model())] {
        assert_eq!(SurfaceModel::load(&fixture(file)).unwrap().to_json(), m.to_json(), "{file}");
    }
}

#[test]
fn model_json_round_trips() {
    for m in [elliptic_model(), genus2_model()] {
        let text = m.to_json();
        assert_eq!(SurfaceModel::from_json(&text).unwrap().to_json(), text);
    }
}

#[test]
fn catalogue_fixture_matches_builtin() {
    let text = std::fs::read_to_string(fixture("catalogue.json")).unwrap();
    let cat: Catalogue = serde_json::from_str(&text).unwrap();
    assert_eq!(cat.fibers, catalogue());
}

#[test]
fn fiber_fixtures_match_builtins() {
    let cases: Vec<(&str, FiberData)> = vec![
        ("I1", kodaira_cycle(1)),
        ("I2", kodaira_cycle(2)),
        ("I3", kodaira_cycle(3)),
        ("I4", kodaira_cycle(4)),
        ("I5", kodaira_cycle(5)),
        ("smooth_genus2", smooth_genus2()),
        ("two_genus1", two_elliptic_components()),
        ("b12_single_edge", non_integral_fixture()),
    ];
    for (name, fd) in cases {
        let loaded = FiberData::load(&fixture(&format!("fibers/{name}.json"))).unwrap();
        assert_eq!(loaded, fd, "{name}");
    }
}
