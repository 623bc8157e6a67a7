//! Acceptance suite: golden example reproduction plus the cross-engine,
//! planning, reduction, and soundness property sweeps. One test per
//! criterion; each prints a `pass` line with its elapsed time (visible
//! under `--nocapture`).

use epdl_core::axioms::{self, random_formula, random_model};
use epdl_core::contextual;
use epdl_core::ets;
use epdl_core::fixtures::fixture;
use epdl_core::model::UncertaintyMap;
use epdl_core::planner::{self, Plan, PlanningProblem};
use epdl_core::qbf::{self, Qbf};
use epdl_core::semantics;
use epdl_core::syntax::{parse_formula, plan_existence_formula, Formula};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn finish(criterion: u32, name: &str, started: Instant) {
    println!(
        "criterion {criterion:02} ({name}): pass in {:.2}s",
        started.elapsed().as_secs_f64()
    );
}

/// Evaluates with every applicable engine and demands one common verdict.
fn agreed_verdict(map: &UncertaintyMap, point_name: &str, text: &str) -> bool {
    let f = parse_formula(text).unwrap();
    let s = map.point_id(point_name).unwrap();
    let direct = semantics::sat(map, s, &f);
    let ets_verdict = ets::sat(map, s, &f);
    assert_eq!(
        direct, ets_verdict,
        "engine split on `{text}` at {point_name}"
    );
    if f.star_free() {
        let ctx = contextual::check(map, s, &f).unwrap();
        assert_eq!(direct, ctx, "engine split on `{text}` at {point_name}");
    }
    direct
}

fn problem(fixture_name: &str, actions: &[&str], goal: &str) -> PlanningProblem {
    PlanningProblem::new(
        fixture(fixture_name),
        actions.iter().copied(),
        parse_formula(goal).unwrap(),
    )
    .unwrap()
}

#[test]
fn criterion_01_spy_golden_set() {
    let t = Instant::now();
    let map = fixture("spy");
    assert!(agreed_verdict(&map, "s3", "[r](Safe & ~K Safe)"));
    assert!(agreed_verdict(&map, "s3", "K [r][u](Safe & K Safe)"));
    let p = problem("spy", &["r", "u"], "Safe");
    assert_eq!(
        planner::find_plan(&p),
        Some(Plan::new(["r", "u"])),
        "planner must return the run-then-climb plan"
    );
    finish(1, "spy golden set", t);
}

#[test]
fn criterion_02_context_dependency() {
    let t = Instant::now();
    let map = fixture("context");
    assert!(agreed_verdict(&map, "s1", "<b>K p & <a><a>~K p"));
    finish(2, "context dependency", t);
}

#[test]
fn criterion_03_composition_versus_stepwise() {
    let t = Instant::now();
    let map = fixture("example1");
    assert!(agreed_verdict(&map, "s1", "[[a;b]]p"));
    assert!(!agreed_verdict(&map, "s1", "[[a]][[b]]p"));
    let p = problem("example1", &["a", "b"], "p");
    assert!(!planner::verify_plan(&p, &Plan::new(["a", "b"])));
    finish(3, "composition vs stepwise plans", t);
}

#[test]
fn criterion_04_paths_everywhere_but_no_plan() {
    let t = Instant::now();
    let map = fixture("example2");
    assert!(agreed_verdict(&map, "s1", "K <(a + b)*>p"));
    let p = problem("example2", &["a", "b"], "p");
    assert!(!planner::plan_exists(&p));
    assert_eq!(planner::find_plan(&p), None);
    finish(4, "paths everywhere but no plan", t);
}

#[test]
fn criterion_05_knowledge_in_the_goal_matters() {
    let t = Instant::now();
    let map = fixture("example3");
    let s1 = map.point_id("s1").unwrap();
    let theta = plan_existence_formula(&["a", "b"], &parse_formula("p").unwrap());
    assert!(!semantics::sat(&map, s1, &theta));
    assert!(!ets::sat(&map, s1, &theta));
    let bare = parse_formula("<(?K<a>T;a + ?K<b>T;b)*>p").unwrap();
    assert!(semantics::sat(&map, s1, &bare));
    assert!(ets::sat(&map, s1, &bare));
    finish(5, "knowledge in the goal matters", t);
}

#[test]
fn criterion_06_positive_and_negative_knowledge_goals() {
    let t = Instant::now();
    let know_p = problem("example4", &["a", "b"], "K p");
    assert!(planner::verify_plan(&know_p, &Plan::new(["a"])));
    assert!(planner::verify_plan(&know_p, &Plan::new(["b"])));
    let know_p_not_q = problem("example4", &["a", "b"], "K p & ~K q");
    assert!(planner::verify_plan(&know_p_not_q, &Plan::new(["a"])));
    assert!(!planner::verify_plan(&know_p_not_q, &Plan::new(["b"])));
    let found = planner::find_plan(&know_p).expect("a plan exists");
    assert_eq!(found.len(), 1);
    finish(6, "positive and negative knowledge goals", t);
}

#[test]
fn criterion_07_contextual_engine_equivalence() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0007);
    for case in 0..500 {
        let map = random_model(
            rng.random_range(1..=6),
            rng.random_range(1..=2),
            rng.random_range(1..=3),
            0.4,
            rng.random(),
        );
        let props: Vec<String> = map.model().prop_names().map(String::from).collect();
        let actions: Vec<String> = map.model().actions().map(String::from).collect();
        let f = loop {
            let candidate = random_formula(&mut rng, 4, &props, &actions, false);
            if candidate.size() <= 18 {
                break candidate;
            }
        };
        for s in map.uncertainty().iter() {
            assert_eq!(
                contextual::check(&map, s, &f).unwrap(),
                semantics::sat(&map, s, &f),
                "case {case}: engines split on {f}"
            );
        }
    }
    finish(7, "context-based engine equivalence, 500 cases", t);
}

#[test]
fn criterion_08_transition_system_engine_equivalence() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0008);
    for case in 0..200 {
        let map = random_model(
            rng.random_range(1..=5),
            rng.random_range(1..=2),
            rng.random_range(1..=3),
            0.4,
            rng.random(),
        );
        let props: Vec<String> = map.model().prop_names().map(String::from).collect();
        let actions: Vec<String> = map.model().actions().map(String::from).collect();
        let f = loop {
            let candidate = random_formula(&mut rng, 3, &props, &actions, true);
            if candidate.size() <= 20 {
                break candidate;
            }
        };
        for s in map.uncertainty().iter() {
            assert_eq!(
                ets::sat(&map, s, &f),
                semantics::sat(&map, s, &f),
                "case {case}: engines split on {f}"
            );
        }
    }
    finish(8, "transition-system engine equivalence, 200 cases", t);
}

fn random_epistemic_goal(rng: &mut ChaCha8Rng, depth: usize, props: &[String]) -> Formula {
    if depth == 0 || rng.random_bool(0.25) {
        return if props.is_empty() || rng.random_bool(0.15) {
            Formula::top()
        } else {
            Formula::prop(props[rng.random_range(0..props.len())].clone())
        };
    }
    match rng.random_range(0..5u32) {
        0 => Formula::not(random_epistemic_goal(rng, depth - 1, props)),
        1 => Formula::and(
            random_epistemic_goal(rng, depth - 1, props),
            random_epistemic_goal(rng, depth - 1, props),
        ),
        2 => Formula::or(
            random_epistemic_goal(rng, depth - 1, props),
            random_epistemic_goal(rng, depth - 1, props),
        ),
        3 => Formula::implies(
            random_epistemic_goal(rng, depth - 1, props),
            random_epistemic_goal(rng, depth - 1, props),
        ),
        _ => Formula::know(random_epistemic_goal(rng, depth - 1, props)),
    }
}

#[test]
fn criterion_09_plan_existence_equivalence() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0009);
    let mut produced = 0;
    while produced < 300 {
        let map = random_model(
            rng.random_range(2..=5),
            rng.random_range(1..=3),
            rng.random_range(1..=2),
            0.4,
            rng.random(),
        );
        let actions: Vec<String> = map.model().actions().map(String::from).collect();
        let reach = ets::build_guarded(
            map.model(),
            map.uncertainty(),
            &actions.iter().cloned().collect(),
        )
        .unwrap();
        // Keep the brute-force oracle affordable: the sound plan-length
        // bound is the guard-reachable belief count, so skip the rare
        // problems where |B|^bound explodes.
        let bound = reach.belief_count();
        if actions.len().pow(bound as u32) > 30_000 {
            continue;
        }
        produced += 1;
        let props: Vec<String> = map.model().prop_names().map(String::from).collect();
        let goal = random_epistemic_goal(&mut rng, 3, &props);
        let p = PlanningProblem::new(map.clone(), actions.clone(), goal.clone()).unwrap();
        let brute = planner::brute_force_plan(&p, bound);
        assert_eq!(
            planner::plan_exists(&p),
            brute.is_some(),
            "existence mismatch: goal {goal}, map {}",
            map.to_json()
        );
        let found = planner::find_plan(&p);
        match (&found, &brute) {
            (Some(f), Some(b)) => {
                assert!(planner::verify_plan(&p, f), "unsound extracted plan {f}");
                assert!(f.len() <= b.len(), "extracted plan is not minimal");
            }
            (None, None) => {}
            other => panic!("search/oracle disagree: {other:?}"),
        }
        assert_eq!(
            planner::savitch_reach(map.model(), map.uncertainty(), p.actions(), p.goal()),
            brute.is_some(),
            "bisection mismatch: goal {goal}"
        );
    }
    finish(9, "plan existence equals brute-force search, 300 cases", t);
}

#[test]
fn criterion_10_qbf_reduction_agreement() {
    let t = Instant::now();
    // Exhaustive: two variables, one or two clauses, one or two literals.
    let lits = [1i32, -1, 2, -2];
    let mut clause_shapes: Vec<Vec<i32>> = Vec::new();
    for &a in &lits {
        clause_shapes.push(vec![a]);
        for &b in &lits {
            clause_shapes.push(vec![a, b]);
        }
    }
    let mut checked = 0;
    for c1 in &clause_shapes {
        let q = Qbf::new(2, vec![c1.clone()]).unwrap();
        assert_eq!(qbf::reduction_check(&q), qbf::eval_qbf(&q), "{q:?}");
        checked += 1;
        for c2 in &clause_shapes {
            let q = Qbf::new(2, vec![c1.clone(), c2.clone()]).unwrap();
            assert_eq!(qbf::reduction_check(&q), qbf::eval_qbf(&q), "{q:?}");
            checked += 1;
        }
    }
    assert_eq!(checked, 420);
    // Random: three variables, up to three clauses of up to three literals.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0010);
    for _ in 0..100 {
        let clauses: Vec<Vec<i32>> = (0..rng.random_range(1..=3))
            .map(|_| {
                (0..rng.random_range(1..=3))
                    .map(|_| {
                        let v = rng.random_range(1..=3i32);
                        if rng.random_bool(0.5) {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect()
            })
            .collect();
        let q = Qbf::new(3, clauses).unwrap();
        assert_eq!(qbf::reduction_check(&q), qbf::eval_qbf(&q), "{q:?}");
    }
    finish(10, "reduction agrees with the brute-force oracle", t);
}

#[test]
fn criterion_11_axiom_soundness_sweep() {
    let t = Instant::now();
    let report = axioms::soundness_suite(0x5EED_0011, 1000);
    assert!(report.clean(), "\n{report}");
    let cex = axioms::obs_counterexample();
    assert!(!semantics::sat(&cex.map, cex.point, &cex.formula));
    finish(11, "axiom soundness, 1000 trials per schema", t);
}

#[test]
fn criterion_12_update_shape_law() {
    let t = Instant::now();
    for n in 1..=4usize {
        let map = qbf::build_model(n);
        let m = map.model();
        for depth in 0..=n {
            for mask in 0..(1u32 << depth) {
                let sigma: Vec<String> = (1..=depth)
                    .map(|i| {
                        if mask & (1 << (i - 1)) == 0 {
                            format!("a{i}")
                        } else {
                            format!("ab{i}")
                        }
                    })
                    .collect();
                let got = m.update_seq(map.uncertainty(), &sigma);
                let mut expected = vec!["x0".to_string()];
                expected.extend((1..=depth).map(|i| {
                    if mask & (1 << (i - 1)) == 0 {
                        format!("x{i}")
                    } else {
                        format!("xb{i}")
                    }
                }));
                assert_eq!(
                    got,
                    m.set_of_names(&expected, "expected").unwrap(),
                    "path {sigma:?} on n={n}"
                );
            }
        }
    }
    finish(12, "update shape law, exhaustive to n=4", t);
}
