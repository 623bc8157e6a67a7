//! Built-in example maps used across tests and documentation.
//!
//! Each fixture is a small uncertainty map with a story:
//!
//! * `spy` — an agent walks a corridor (`r`) and can duck into a side room
//!   (`u`); it starts unsure between two corridor positions and can reach a
//!   position it knows is safe without ever seeing where it is.
//! * `context` — knowledge of the *effect* of an action depends on what was
//!   executed before; evaluating subformulas in isolation goes wrong here.
//! * `example1` — executing `a;b` as one program can succeed while the
//!   step-by-step plan `a` then `b` can fail: after `a` the agent may be in a
//!   state where `b` is not executable.
//! * `example2` — each world has *some* path to the goal, yet no uniform
//!   conformant plan exists.
//! * `example3` — a plan must end in *knowledge* of the goal, not merely in
//!   the goal being true.
//! * `example4` — positive and negative epistemic goals: the agent must come
//!   to know `p` without coming to know `q`.

use crate::model::{KripkeModel, UncertaintyMap};
use std::collections::BTreeMap;

fn build(
    states: &[&str],
    valuation: &[(&str, &[&str])],
    relations: &[(&str, &[(&str, &str)])],
    uncertainty: &[&str],
) -> UncertaintyMap {
    let model = KripkeModel::new(
        states.iter().map(|s| s.to_string()).collect(),
        valuation
            .iter()
            .map(|(s, ps)| (s.to_string(), ps.iter().map(|p| p.to_string()).collect())),
        relations.iter().map(|(a, edges)| {
            (
                a.to_string(),
                edges
                    .iter()
                    .map(|(f, t)| (f.to_string(), t.to_string()))
                    .collect(),
            )
        }),
    )
    .expect("fixture models are well-formed");
    UncertaintyMap::from_names(model, uncertainty).expect("fixture uncertainty is valid")
}

fn spy() -> UncertaintyMap {
    build(
        &["s1", "s2", "s3", "s4", "s5", "s6", "s7", "s8"],
        &[("s4", &["Safe"]), ("s7", &["Safe"]), ("s8", &["Safe"])],
        &[
            (
                "r",
                &[("s1", "s2"), ("s2", "s3"), ("s3", "s4"), ("s4", "s5")],
            ),
            ("u", &[("s2", "s6"), ("s3", "s7"), ("s4", "s8")]),
        ],
        &["s2", "s3"],
    )
}

fn context() -> UncertaintyMap {
    build(
        &["s1", "s2", "s3", "s4"],
        &[("s3", &["p"])],
        &[
            ("a", &[("s1", "s2"), ("s2", "s3"), ("s3", "s4")]),
            ("b", &[("s1", "s3")]),
        ],
        &["s1", "s2"],
    )
}

fn example1() -> UncertaintyMap {
    build(
        &["s1", "s2", "s3", "s4"],
        &[("s4", &["p"])],
        &[("a", &[("s1", "s2"), ("s1", "s3")]), ("b", &[("s2", "s4")])],
        &["s1"],
    )
}

fn example2() -> UncertaintyMap {
    build(
        &["s1", "s2", "s3", "s4", "s5", "s6"],
        &[("s5", &["p"]), ("s6", &["p"])],
        &[
            ("a", &[("s1", "s3"), ("s4", "s6")]),
            ("b", &[("s2", "s4"), ("s3", "s5")]),
        ],
        &["s1", "s2"],
    )
}

fn example3() -> UncertaintyMap {
    build(
        &["s1", "s2", "s4", "s5"],
        &[("s5", &["p"])],
        &[("a", &[("s1", "s2")]), ("b", &[("s2", "s5"), ("s2", "s4")])],
        &["s1"],
    )
}

fn example4() -> UncertaintyMap {
    build(
        &["s1", "s2", "s3", "s4", "s5"],
        &[("s3", &["p"]), ("s4", &["p", "q"]), ("s5", &["p", "q"])],
        &[
            ("a", &[("s1", "s3"), ("s2", "s4")]),
            ("b", &[("s1", "s4"), ("s2", "s5")]),
        ],
        &["s1", "s2"],
    )
}

/// All built-in maps, keyed by name.
pub fn fixtures() -> BTreeMap<&'static str, UncertaintyMap> {
    BTreeMap::from([
        ("spy", spy()),
        ("context", context()),
        ("example1", example1()),
        ("example2", example2()),
        ("example3", example3()),
        ("example4", example4()),
    ])
}

/// Looks up one built-in map.
///
/// # Panics
///
/// Panics when `name` is not a fixture name.
pub fn fixture(name: &str) -> UncertaintyMap {
    fixtures()
        .remove(name)
        .unwrap_or_else(|| panic!("unknown fixture `{name}`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_inventory() {
        let all = fixtures();
        assert_eq!(
            all.keys().copied().collect::<Vec<_>>(),
            vec!["context", "example1", "example2", "example3", "example4", "spy"]
        );
        for (name, map) in &all {
            assert!(!map.uncertainty().is_empty(), "fixture `{name}`");
        }
    }

    #[test]
    fn spy_shape() {
        let map = fixture("spy");
        let m = map.model();
        assert_eq!(m.n_states(), 8);
        assert_eq!(m.actions().collect::<Vec<_>>(), ["r", "u"]);
        assert_eq!(map.uncertainty().len(), 2);
        assert_eq!(m.prop_set("Safe").len(), 3);
    }

    #[test]
    fn example3_keeps_paper_labels() {
        // The state list skips `s3` on purpose; ids still run 0..4.
        let map = fixture("example3");
        assert_eq!(map.model().state_names(), ["s1", "s2", "s4", "s5"]);
        assert_eq!(map.model().state_id("s3"), None);
    }

    #[test]
    #[should_panic(expected = "unknown fixture")]
    fn unknown_fixture_panics() {
        let _ = fixture("nope");
    }

    #[test]
    fn shipped_model_files_match_the_fixtures() {
        // The files under models/ are the on-disk form of these maps
        // (regenerate with the `dump_fixtures` example).
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models");
        for (name, map) in fixtures() {
            let path = dir.join(format!("{name}.um"));
            let text = std::fs::read_to_string(&path)
                .unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()));
            let loaded = crate::model::load_model(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(loaded, map, "file and fixture `{name}` diverge");
        }
    }
}
