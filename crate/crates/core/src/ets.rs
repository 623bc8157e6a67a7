//! The epistemic-transition-system engine: build an explicit two-dimensional
//! structure over (world, belief) pairs and model-check by global labeling.
//!
//! Each state pairs a base world `s` with a belief `Γ ∋ s`. Action edges move
//! the world along the base relation while the belief updates to its image;
//! the epistemic relation links states sharing a belief. Truth of a formula
//! at the original map coincides with truth at the state `s_{U}` of this
//! structure, which reduces evaluation — including `*` — to ordinary PDL+K
//! labeling with matrix composition, union, and reflexive-transitive closure.
//!
//! Only beliefs reachable from the initial one by updates are materialized;
//! action edges never leave that closure, so truth values at `s_{U}` are
//! unaffected (the exhaustive construction exists for cross-checks).

use crate::bits::{Relation, StateSet};
use crate::model::{KripkeModel, StateId, UncertaintyMap};
use crate::semantics::belief_closure;
use crate::syntax::{Formula, Program};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

/// The guarded construction needs at least one action.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("guarded construction requires a nonempty action repertoire")]
pub struct EmptyRepertoire;

/// An explicit epistemic transition system over one base model.
pub struct EtsModel {
    base: KripkeModel,
    /// Interned beliefs; index 0 is the initial belief.
    beliefs: Vec<StateSet>,
    /// ETS states as (world, belief index) pairs, in construction order.
    states: Vec<(StateId, usize)>,
    index: HashMap<(StateId, usize), usize>,
    /// Per-action adjacency over ETS states.
    action_rels: BTreeMap<String, Relation>,
    /// Epistemic classes: for each belief index, the set of ETS states
    /// carrying it. The epistemic relation is the induced equivalence.
    classes: Vec<StateSet>,
}

/// Builds the system over the beliefs reachable from `u0` by updates
/// (dropping empty images), with every action of the model.
pub fn build(m: &KripkeModel, u0: &StateSet) -> EtsModel {
    assert!(!u0.is_empty(), "initial belief must be nonempty");
    let mut beliefs: Vec<StateSet> = vec![u0.clone()];
    beliefs.extend(belief_closure(m, u0).into_iter().filter(|b| b != u0));
    let actions: Vec<String> = m.actions().map(|a| a.to_string()).collect();
    assemble(m, beliefs, &actions, false)
}

/// Builds over *all* nonempty beliefs — exponential; for cross-checking the
/// reachable construction on tiny models.
///
/// # Panics
///
/// Panics for models with more than 16 states.
pub fn build_full(m: &KripkeModel, u0: &StateSet) -> EtsModel {
    assert!(!u0.is_empty(), "initial belief must be nonempty");
    let n = m.n_states();
    assert!(n <= 16, "exhaustive construction is for tiny models only");
    let mut beliefs: Vec<StateSet> = vec![u0.clone()];
    for mask in 1u32..(1 << n) {
        let b = StateSet::from_iter(n, (0..n).filter(|&i| mask & (1 << i) != 0));
        if &b != u0 {
            beliefs.push(b);
        }
    }
    let actions: Vec<String> = m.actions().map(|a| a.to_string()).collect();
    assemble(m, beliefs, &actions, false)
}

/// Builds the guarded system used for planning: only actions from `repertoire`,
/// and an `a`-edge requires every world of the source belief to have an
/// `a`-successor (the agent must know the action is executable).
pub fn build_guarded(
    m: &KripkeModel,
    u0: &StateSet,
    repertoire: &BTreeSet<String>,
) -> Result<EtsModel, EmptyRepertoire> {
    assert!(!u0.is_empty(), "initial belief must be nonempty");
    if repertoire.is_empty() {
        return Err(EmptyRepertoire);
    }
    // Reachability itself is guarded: a belief only expands along actions
    // whose guard it passes.
    let mut beliefs: Vec<StateSet> = vec![u0.clone()];
    let mut seen: BTreeSet<StateSet> = BTreeSet::from([u0.clone()]);
    let mut frontier = vec![u0.clone()];
    while let Some(cur) = frontier.pop() {
        for a in repertoire {
            if !cur.is_subset(&m.executable_set(a)) {
                continue;
            }
            let next = m.update(&cur, a);
            debug_assert!(!next.is_empty(), "guarded update of a nonempty belief");
            if seen.insert(next.clone()) {
                beliefs.push(next.clone());
                frontier.push(next);
            }
        }
    }
    let actions: Vec<String> = repertoire.iter().cloned().collect();
    Ok(assemble(m, beliefs, &actions, true))
}

fn assemble(
    m: &KripkeModel,
    beliefs: Vec<StateSet>,
    actions: &[String],
    guarded: bool,
) -> EtsModel {
    let mut states = Vec::new();
    let mut index = HashMap::new();
    for (bi, b) in beliefs.iter().enumerate() {
        for s in b.iter() {
            index.insert((s, bi), states.len());
            states.push((s, bi));
        }
    }
    let belief_index: HashMap<&StateSet, usize> =
        beliefs.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let n_ets = states.len();
    let mut action_rels = BTreeMap::new();
    for a in actions {
        let mut rel = Relation::new(n_ets);
        let Some(base_rel) = m.relation(a) else {
            action_rels.insert(a.clone(), rel);
            continue;
        };
        for (x, &(s, bi)) in states.iter().enumerate() {
            if guarded && !beliefs[bi].is_subset(&m.executable_set(a)) {
                continue;
            }
            let image = m.update(&beliefs[bi], a);
            let Some(&target_bi) = belief_index.get(&image) else {
                continue;
            };
            for t in base_rel.successors(s).iter() {
                rel.insert(x, index[&(t, target_bi)]);
            }
        }
        action_rels.insert(a.clone(), rel);
    }
    let mut classes = vec![StateSet::new(n_ets); beliefs.len()];
    for (x, &(_, bi)) in states.iter().enumerate() {
        classes[bi].insert(x);
    }
    EtsModel {
        base: m.clone(),
        beliefs,
        states,
        index,
        action_rels,
        classes,
    }
}

impl EtsModel {
    pub fn base(&self) -> &KripkeModel {
        &self.base
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn beliefs(&self) -> &[StateSet] {
        &self.beliefs
    }

    pub fn belief_count(&self) -> usize {
        self.beliefs.len()
    }

    /// The ETS state for `world` carrying the initial belief.
    pub fn initial_state(&self, world: StateId) -> Option<usize> {
        self.index.get(&(world, 0)).copied()
    }

    pub fn world_of(&self, x: usize) -> StateId {
        self.states[x].0
    }

    pub fn belief_of(&self, x: usize) -> &StateSet {
        &self.beliefs[self.states[x].1]
    }

    /// All states epistemically indistinguishable from `x` (same belief).
    pub fn epistemic_class(&self, x: usize) -> &StateSet {
        &self.classes[self.states[x].1]
    }

    pub fn action_relation(&self, a: &str) -> Option<&Relation> {
        self.action_rels.get(a)
    }

    /// Global-labeling model check: does φ hold at ETS state `x`?
    pub fn check(&self, x: usize, f: &Formula) -> bool {
        Labeler::new(self).formula(f).contains(x)
    }

    /// The label set of φ: every ETS state satisfying it.
    pub fn label(&self, f: &Formula) -> StateSet {
        Labeler::new(self).formula(f)
    }

    /// The relation of π over ETS states.
    pub fn program_edges(&self, p: &Program) -> Relation {
        Labeler::new(self).program(p)
    }

    /// Re-expresses the system as a plain uncertainty map: states named
    /// `world@{belief}`, action relations as built, uncertainty = the
    /// epistemic class of the initial belief. The result loads back through
    /// the regular model format.
    pub fn to_map(&self) -> UncertaintyMap {
        let name_of = |&(s, bi): &(StateId, usize)| {
            format!(
                "{}@{}",
                self.base.state_name(s),
                self.base.format_set(&self.beliefs[bi])
            )
        };
        let names: Vec<String> = self.states.iter().map(name_of).collect();
        let valuation: Vec<(String, Vec<String>)> = self
            .states
            .iter()
            .enumerate()
            .map(|(x, &(s, _))| {
                let props: Vec<String> = self
                    .base
                    .prop_names()
                    .filter(|p| self.base.prop_holds(p, s))
                    .map(|p| p.to_string())
                    .collect();
                (names[x].clone(), props)
            })
            .collect();
        let relations: Vec<(String, Vec<(String, String)>)> = self
            .action_rels
            .iter()
            .map(|(a, rel)| {
                let edges = (0..self.n_states())
                    .flat_map(|x| {
                        rel.successors(x)
                            .iter()
                            .map(|y| (names[x].clone(), names[y].clone()))
                            .collect::<Vec<_>>()
                    })
                    .collect();
                (a.clone(), edges)
            })
            .collect();
        let model = KripkeModel::new(names.clone(), valuation, relations)
            .expect("derived model is well-formed");
        let uncertainty = self.classes[0]
            .iter()
            .map(|x| names[x].clone())
            .collect::<Vec<_>>();
        UncertaintyMap::from_names(model, &uncertainty).expect("initial class is nonempty")
    }
}

/// Does φ hold at state `s` of the map, by the ETS route? Supports full
/// syntax including `*`.
///
/// # Panics
///
/// Panics when `s` is outside the uncertainty set.
pub fn sat(map: &UncertaintyMap, s: StateId, f: &Formula) -> bool {
    assert!(
        map.uncertainty().contains(s),
        "evaluation point must lie inside the uncertainty set"
    );
    let ets = build(map.model(), map.uncertainty());
    let x = ets
        .initial_state(s)
        .expect("point is in the initial belief");
    ets.check(x, f)
}

struct Labeler<'e> {
    ets: &'e EtsModel,
    fcache: HashMap<*const Formula, StateSet>,
    pcache: HashMap<*const Program, Relation>,
}

impl<'e> Labeler<'e> {
    fn new(ets: &'e EtsModel) -> Self {
        Labeler {
            ets,
            fcache: HashMap::new(),
            pcache: HashMap::new(),
        }
    }

    fn formula(&mut self, f: &Formula) -> StateSet {
        let key = f as *const Formula;
        if let Some(cached) = self.fcache.get(&key) {
            return cached.clone();
        }
        let e = self.ets;
        let n = e.n_states();
        let out = match f {
            Formula::Top => StateSet::full(n),
            Formula::Prop(p) => {
                StateSet::from_iter(n, (0..n).filter(|&x| e.base.prop_holds(p, e.world_of(x))))
            }
            Formula::Not(g) => self.formula(g).complement(),
            Formula::And(l, r) => {
                let mut set = self.formula(l);
                set.intersect_with(&self.formula(r));
                set
            }
            Formula::Know(g) => {
                // K holds on a whole epistemic class or not at all.
                let inner = self.formula(g);
                let mut set = StateSet::new(n);
                for class in &e.classes {
                    if class.is_subset(&inner) {
                        set.union_with(class);
                    }
                }
                set
            }
            Formula::Box(p, g) => {
                let rel = self.program(p);
                let good = self.formula(g);
                StateSet::from_iter(n, (0..n).filter(|&x| rel.successors(x).is_subset(&good)))
            }
        };
        self.fcache.insert(key, out.clone());
        out
    }

    fn program(&mut self, p: &Program) -> Relation {
        let key = p as *const Program;
        if let Some(cached) = self.pcache.get(&key) {
            return cached.clone();
        }
        let n = self.ets.n_states();
        let out = match p {
            Program::Atom(a) => self
                .ets
                .action_rels
                .get(a)
                .cloned()
                .unwrap_or_else(|| Relation::new(n)),
            Program::Test(f) => Relation::diagonal(&self.formula(f)),
            Program::Seq(l, r) => self.program(l).compose(&self.program(r)),
            Program::Choice(l, r) => {
                let mut rel = self.program(l);
                rel.union_with(&self.program(r));
                rel
            }
            Program::Star(q) => self.program(q).reflexive_transitive_closure(),
        };
        self.pcache.insert(key, out.clone());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fixture;
    use crate::semantics;
    use crate::syntax::{parse_formula, parse_program, plan_existence_formula};

    fn belief_names(e: &EtsModel) -> Vec<String> {
        e.beliefs().iter().map(|b| e.base().format_set(b)).collect()
    }

    #[test]
    fn spy_belief_closure() {
        let map = fixture("spy");
        let e = build(map.model(), map.uncertainty());
        let names = belief_names(&e);
        assert_eq!(names[0], "{s2,s3}");
        for expected in ["{s3,s4}", "{s6,s7}", "{s4,s5}", "{s7,s8}", "{s5}", "{s8}"] {
            assert!(names.contains(&expected.to_string()), "missing {expected}");
        }
        assert_eq!(e.belief_count(), 7);
        assert_eq!(e.n_states(), 12);
        // Spot-check required states s3_{s3,s4} and s7_{s7,s8}.
        let m = map.model();
        let has = |world: &str, belief: &str| {
            (0..e.n_states()).any(|x| {
                e.world_of(x) == m.state_id(world).unwrap()
                    && m.format_set(e.belief_of(x)) == belief
            })
        };
        assert!(has("s2", "{s2,s3}"));
        assert!(has("s3", "{s2,s3}"));
        assert!(has("s3", "{s3,s4}"));
        assert!(has("s4", "{s3,s4}"));
        assert!(has("s7", "{s7,s8}"));
        assert!(has("s8", "{s7,s8}"));
    }

    #[test]
    fn single_state_model_degenerates() {
        let m = KripkeModel::new(
            vec!["s".into()],
            [("s".to_string(), vec!["p".to_string()])],
            [("a".to_string(), vec![("s".to_string(), "s".to_string())])],
        )
        .unwrap();
        let u = StateSet::full(1);
        let e = build(&m, &u);
        assert_eq!(e.belief_count(), 1);
        assert_eq!(e.n_states(), 1);
        let rel = e.action_relation("a").unwrap();
        assert!(rel.contains(0, 0));
        assert!(e.check(0, &parse_formula("K [a*]K p").unwrap()));
    }

    #[test]
    fn guarded_construction_blocks_unknown_executability() {
        // From {s1,s2} neither action passes the guard: s2 lacks a-moves
        // and s1 lacks b-moves. The guarded system has no edges at all.
        let map = fixture("example2");
        let b: BTreeSet<String> = ["a".to_string(), "b".to_string()].into();
        let e = build_guarded(map.model(), map.uncertainty(), &b).unwrap();
        assert_eq!(e.belief_count(), 1);
        for a in ["a", "b"] {
            let rel = e.action_relation(a).unwrap();
            for x in 0..e.n_states() {
                assert!(!rel.has_successor(x), "unexpected {a}-edge from {x}");
            }
        }
    }

    #[test]
    fn guarded_spy_walks_to_safety() {
        let map = fixture("spy");
        let m = map.model();
        let b: BTreeSet<String> = ["r".to_string(), "u".to_string()].into();
        let e = build_guarded(m, map.uncertainty(), &b).unwrap();
        // {s2,s3} passes the r-guard; {s3,s4} passes both; u leads to {s7,s8}.
        let names = belief_names(&e);
        assert!(names.contains(&"{s3,s4}".to_string()));
        assert!(names.contains(&"{s7,s8}".to_string()));
        // And every edge's source class passes the executability guard.
        for a in ["r", "u"] {
            let rel = e.action_relation(a).unwrap();
            for x in 0..e.n_states() {
                if rel.has_successor(x) {
                    assert!(
                        e.belief_of(x).is_subset(&m.executable_set(a)),
                        "{a}-edge from a class failing the guard"
                    );
                }
            }
        }
        // The u-guard fails at {s2,s3} (s2 has no u? it does — but s3 does too;
        // guard holds, the edge exists and leads to {s6,s7}).
        let x_s2 = e.initial_state(m.state_id("s2").unwrap()).unwrap();
        let u_rel = e.action_relation("u").unwrap();
        assert!(u_rel.has_successor(x_s2));
    }

    #[test]
    fn empty_repertoire_is_rejected() {
        let map = fixture("spy");
        assert_eq!(
            build_guarded(map.model(), map.uncertainty(), &BTreeSet::new()).err(),
            Some(EmptyRepertoire)
        );
    }

    #[test]
    fn labeling_matches_paper_claims() {
        let map = fixture("spy");
        let e = build(map.model(), map.uncertainty());
        let x = e
            .initial_state(map.model().state_id("s3").unwrap())
            .unwrap();
        assert!(e.check(x, &parse_formula("K [r][u](Safe & K Safe)").unwrap()));
        // ⊤ labels everything; <π*>φ labels at least φ's states.
        assert_eq!(e.label(&Formula::Top).len(), e.n_states());
        let phi = parse_formula("K Safe").unwrap();
        let starred = parse_formula("<(r + u)*>K Safe").unwrap();
        assert!(e.label(&phi).is_subset(&e.label(&starred)));
    }

    #[test]
    fn full_syntax_truths_at_the_initial_state() {
        // Each world has some path to p, yet no uniform guarded plan exists.
        let map = fixture("example2");
        let s1 = map.model().state_id("s1").unwrap();
        assert!(sat(&map, s1, &parse_formula("K <(a + b)*>p").unwrap()));
        let theta = plan_existence_formula(&["a", "b"], &parse_formula("p").unwrap());
        assert!(!sat(&map, s1, &theta));
        // The spy can plan its way to safety.
        let spy = fixture("spy");
        let s2 = spy.model().state_id("s2").unwrap();
        let theta_spy = plan_existence_formula(&["r", "u"], &parse_formula("Safe").unwrap());
        assert!(sat(&spy, s2, &theta_spy));
    }

    #[test]
    #[should_panic(expected = "inside the uncertainty set")]
    fn sat_rejects_outside_points() {
        let map = fixture("spy");
        let s1 = map.model().state_id("s1").unwrap();
        let _ = sat(&map, s1, &Formula::Top);
    }

    #[test]
    fn agrees_with_the_direct_engine_on_starred_formulas() {
        let pool = [
            "<(a + b)*>p",
            "K <(a + b)*>p",
            "[(a + b)*]~K p",
            "<(?K<a>T;a + ?K<b>T;b)*>K p",
            "[a*][b*]T",
            "<(a;b)*>p",
            "K p | <a*>K p",
        ];
        for name in ["context", "example1", "example2", "example3", "example4"] {
            let map = fixture(name);
            for text in pool {
                let f = parse_formula(text).unwrap();
                for s in map.uncertainty().iter() {
                    assert_eq!(
                        sat(&map, s, &f),
                        semantics::sat(&map, s, &f),
                        "fixture `{name}`, point {}, φ={text}",
                        map.model().state_name(s)
                    );
                }
            }
        }
    }

    #[test]
    fn program_edges_match_the_pointed_denotation() {
        // s_Γ →π t_Δ in the construction iff (Γ,s) ⟦π⟧ (Δ,t) directly.
        for name in ["spy", "context", "example2"] {
            let map = fixture(name);
            let e = build(map.model(), map.uncertainty());
            let progs = match name {
                "spy" => ["r", "u", "r;u", "r + u", "(r + u)*", "?K Safe;r"],
                _ => ["a", "b", "a;b", "a + b", "(a + b)*", "?K p;a"],
            };
            for text in progs {
                let p = parse_program(text).unwrap();
                let denot = semantics::program_relation(&map, &p);
                let edges = e.program_edges(&p);
                let mut expected = std::collections::BTreeSet::new();
                for x in 0..e.n_states() {
                    for y in edges.successors(x).iter() {
                        expected.insert((
                            (e.belief_of(x).clone(), e.world_of(x)),
                            (e.belief_of(y).clone(), e.world_of(y)),
                        ));
                    }
                }
                assert_eq!(denot, expected, "fixture `{name}`, π={text}");
            }
        }
    }

    #[test]
    fn reachable_fragment_agrees_with_exhaustive_construction() {
        // ≤ 4-state fixtures: the full 2^S build gives the same verdicts at
        // the initial states.
        let pool = [
            "K p",
            "[a]K p",
            "<(a + b)*>p",
            "K <b>p -> <a>T",
            "[[a]]~K p",
        ];
        for name in ["context", "example1", "example3"] {
            let map = fixture(name);
            assert!(map.model().n_states() <= 4);
            let reach = build(map.model(), map.uncertainty());
            let full = build_full(map.model(), map.uncertainty());
            for text in pool {
                let f = parse_formula(text).unwrap();
                for s in map.uncertainty().iter() {
                    let xr = reach.initial_state(s).unwrap();
                    let xf = full.initial_state(s).unwrap();
                    assert_eq!(
                        reach.check(xr, &f),
                        full.check(xf, &f),
                        "fixture `{name}`, φ={text}"
                    );
                }
            }
        }
    }

    #[test]
    fn star_labeling_is_a_bounded_fixpoint() {
        // The closure equals naive iteration, which stabilizes within
        // |ETS states| rounds.
        let map = fixture("spy");
        let e = build(map.model(), map.uncertainty());
        let base = e.program_edges(&parse_program("r + u").unwrap());
        let star = e.program_edges(&parse_program("(r + u)*").unwrap());
        let mut cur = Relation::identity(e.n_states());
        let mut rounds = 0;
        loop {
            let mut next = cur.compose(&base);
            next.union_with(&cur);
            if next == cur {
                break;
            }
            cur = next;
            rounds += 1;
            assert!(rounds <= e.n_states(), "fixpoint exceeded the state bound");
        }
        assert_eq!(star, cur);
    }

    #[test]
    fn ets_reexports_as_a_loadable_map() {
        let map = fixture("spy");
        let e = build(map.model(), map.uncertainty());
        let dumped = e.to_map();
        // Loads back through the JSON format.
        let reloaded = crate::model::load_model(&dumped.to_json()).unwrap();
        assert_eq!(reloaded, dumped);
        // Uncertainty = the epistemic class of the initial belief.
        assert_eq!(dumped.uncertainty().len(), 2);
        let names: Vec<&str> = dumped
            .uncertainty()
            .iter()
            .map(|i| dumped.model().state_name(i))
            .collect();
        assert_eq!(names, ["s2@{s2,s3}", "s3@{s2,s3}"]);
        // Worlds keep their valuation.
        let id = dumped.model().state_id("s7@{s7,s8}").unwrap();
        assert!(dumped.model().prop_holds("Safe", id));
    }
}
