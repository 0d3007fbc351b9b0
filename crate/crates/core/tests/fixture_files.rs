//! The JSON fixtures shipped in `fixtures/` must stay in lockstep with the
//! built-in constructors.

use std::path::PathBuf;
use toricoh::collections::Quiver;
use toricoh::regions::RegionTable;
use toricoh::Fan;

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn load<T: serde::de::DeserializeOwned>(name: &str) -> T {
    let text = std::fs::read_to_string(fixture_path(name))
        .unwrap_or_else(|e| panic!("reading fixture {name}: {e}"));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("parsing fixture {name}: {e}"))
}

#[test]
fn fan_files_match_constructors() {
    for (name, fan) in toricoh::fixtures::named_fans() {
        let from_file: Fan = load(&format!("{name}.json"));
        assert_eq!(from_file, fan, "fixture file {name}.json is out of date");
    }
}

#[test]
fn quiver_file_matches_constructor() {
    let from_file: Quiver = load("pentagonal_prism_quiver.json");
    assert_eq!(from_file, toricoh::fixtures::pentagonal_prism_quiver());
}

#[test]
fn regions_file_matches_constructor() {
    let from_file: RegionTable = load("pentagonal_prism_regions.json");
    assert_eq!(from_file, toricoh::fixtures::pentagonal_prism_regions());
}
