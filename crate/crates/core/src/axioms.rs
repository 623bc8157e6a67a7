//! Random-model soundness harness for the axiom system: generate pseudo-
//! random pointed maps and schema instances, and hunt for counterexamples
//! to each axiom schema and to a family of program equivalences.
//!
//! Validity over *all* maps cannot be established by sampling; what the
//! suite asserts is zero counterexamples over its (reproducible) sample,
//! which is exactly the regression guarantee the engines need. The module
//! also keeps one deliberately *invalid* schema around — "the agent always
//! knows whether an action is executable" — whose counterexamples document
//! why it is not part of the system.

use crate::model::{KripkeModel, StateId, UncertaintyMap};
use crate::semantics;
use crate::syntax::{Formula, Program};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// The axiom schemata: the eight of the system, plus the dropped
/// executability-omniscience schema kept for counterexample hunting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    /// Propositional tautologies (a fixed representative template).
    Taut,
    /// K(p→q) → (Kp→Kq)
    DistK,
    /// [a](p→q) → ([a]p→[a]q)
    DistA,
    /// Kp → p
    T,
    /// Kp → KKp
    Four,
    /// ¬Kp → K¬Kp
    Five,
    /// Perfect recall: K[a]p → [a]Kp
    PerfectRecall,
    /// No miracles: ⟨a⟩Kp → K[a]p
    NoMiracles,
    /// Dropped: K⟨a⟩⊤ ∨ K¬⟨a⟩⊤ — *invalid* over uncertainty maps.
    Obs,
}

impl Schema {
    /// The eight schemata of the system (excludes the dropped one).
    pub fn system() -> [Schema; 8] {
        [
            Schema::Taut,
            Schema::DistK,
            Schema::DistA,
            Schema::T,
            Schema::Four,
            Schema::Five,
            Schema::PerfectRecall,
            Schema::NoMiracles,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Schema::Taut => "TAUT",
            Schema::DistK => "DISTK",
            Schema::DistA => "DISTa",
            Schema::T => "T",
            Schema::Four => "4",
            Schema::Five => "5",
            Schema::PerfectRecall => "PRa",
            Schema::NoMiracles => "NMa",
            Schema::Obs => "OBS",
        }
    }

    pub fn parse(name: &str) -> Option<Schema> {
        match name.to_ascii_uppercase().as_str() {
            "TAUT" => Some(Schema::Taut),
            "DISTK" => Some(Schema::DistK),
            "DISTA" => Some(Schema::DistA),
            "T" => Some(Schema::T),
            "4" => Some(Schema::Four),
            "5" => Some(Schema::Five),
            "PRA" => Some(Schema::PerfectRecall),
            "NMA" => Some(Schema::NoMiracles),
            "OBS" => Some(Schema::Obs),
            _ => None,
        }
    }

    /// The schema with `p`, `q` substituted and `a` filling the action slot.
    pub fn instantiate(&self, p: &Formula, q: &Formula, a: &str) -> Formula {
        let p = || p.clone();
        let q = || q.clone();
        let box_a = |f| Formula::boxp(Program::atom(a), f);
        let dia_a = |f| Formula::diamond(Program::atom(a), f);
        match self {
            // Excluded middle joined with Peirce's law: two classics in one.
            Schema::Taut => Formula::and(
                Formula::or(p(), Formula::not(p())),
                Formula::implies(Formula::implies(Formula::implies(p(), q()), p()), p()),
            ),
            Schema::DistK => Formula::implies(
                Formula::know(Formula::implies(p(), q())),
                Formula::implies(Formula::know(p()), Formula::know(q())),
            ),
            Schema::DistA => Formula::implies(
                box_a(Formula::implies(p(), q())),
                Formula::implies(box_a(p()), box_a(q())),
            ),
            Schema::T => Formula::implies(Formula::know(p()), p()),
            Schema::Four => Formula::implies(Formula::know(p()), Formula::know(Formula::know(p()))),
            Schema::Five => Formula::implies(
                Formula::not(Formula::know(p())),
                Formula::know(Formula::not(Formula::know(p()))),
            ),
            Schema::PerfectRecall => {
                Formula::implies(Formula::know(box_a(p())), box_a(Formula::know(p())))
            }
            Schema::NoMiracles => {
                Formula::implies(dia_a(Formula::know(p())), Formula::know(box_a(p())))
            }
            Schema::Obs => Formula::or(
                Formula::know(dia_a(Formula::top())),
                Formula::know(Formula::not(dia_a(Formula::top()))),
            ),
        }
    }
}

/// A reproducible pseudo-random map: states `s0..`, actions `a0..`, props
/// `p0..`; every prop/state pair flips a fair coin, every potential edge
/// appears with probability `edge_density`, and the uncertainty set is a
/// uniform nonempty subset.
pub fn random_model(
    n_states: usize,
    n_actions: usize,
    n_props: usize,
    edge_density: f64,
    seed: u64,
) -> UncertaintyMap {
    assert!(n_states >= 1, "a map needs at least one state");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..n_states).map(|i| format!("s{i}")).collect();
    let valuation: Vec<(String, Vec<String>)> = names
        .iter()
        .map(|s| {
            let props = (0..n_props)
                .filter(|_| rng.random_bool(0.5))
                .map(|j| format!("p{j}"))
                .collect();
            (s.clone(), props)
        })
        .collect();
    let relations: Vec<(String, Vec<(String, String)>)> = (0..n_actions)
        .map(|k| {
            let mut edges = Vec::new();
            for from in &names {
                for to in &names {
                    if edge_density > 0.0 && rng.random_bool(edge_density) {
                        edges.push((from.clone(), to.clone()));
                    }
                }
            }
            (format!("a{k}"), edges)
        })
        .collect();
    let model =
        KripkeModel::new(names.clone(), valuation, relations).expect("generated model is valid");
    let mut uncertainty: Vec<&String> = names.iter().filter(|_| rng.random_bool(0.5)).collect();
    if uncertainty.is_empty() {
        uncertainty.push(&names[rng.random_range(0..n_states)]);
    }
    UncertaintyMap::from_names(model, &uncertainty).expect("uncertainty is nonempty")
}

/// A random formula of nesting depth ≤ `depth` over the given vocabulary;
/// programs appear under boxes/diamonds, with `*` only when `allow_star`.
pub fn random_formula(
    rng: &mut ChaCha8Rng,
    depth: usize,
    props: &[String],
    actions: &[String],
    allow_star: bool,
) -> Formula {
    let leaf = |rng: &mut ChaCha8Rng| {
        if props.is_empty() || rng.random_bool(0.1) {
            Formula::top()
        } else {
            Formula::prop(props[rng.random_range(0..props.len())].clone())
        }
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.random_range(0..10u32) {
        0 => leaf(rng),
        1 | 2 => Formula::not(random_formula(rng, depth - 1, props, actions, allow_star)),
        3 => Formula::and(
            random_formula(rng, depth - 1, props, actions, allow_star),
            random_formula(rng, depth - 1, props, actions, allow_star),
        ),
        4 => Formula::or(
            random_formula(rng, depth - 1, props, actions, allow_star),
            random_formula(rng, depth - 1, props, actions, allow_star),
        ),
        5 => Formula::implies(
            random_formula(rng, depth - 1, props, actions, allow_star),
            random_formula(rng, depth - 1, props, actions, allow_star),
        ),
        6 | 7 => Formula::know(random_formula(rng, depth - 1, props, actions, allow_star)),
        8 => Formula::boxp(
            random_program(rng, depth - 1, props, actions, allow_star),
            random_formula(rng, depth - 1, props, actions, allow_star),
        ),
        _ => Formula::diamond(
            random_program(rng, depth - 1, props, actions, allow_star),
            random_formula(rng, depth - 1, props, actions, allow_star),
        ),
    }
}

/// A random program of nesting depth ≤ `depth`.
pub fn random_program(
    rng: &mut ChaCha8Rng,
    depth: usize,
    props: &[String],
    actions: &[String],
    allow_star: bool,
) -> Program {
    let atom = |rng: &mut ChaCha8Rng| {
        if actions.is_empty() {
            Program::test(Formula::top())
        } else {
            Program::atom(actions[rng.random_range(0..actions.len())].clone())
        }
    };
    if depth == 0 {
        return atom(rng);
    }
    match rng.random_range(0..10u32) {
        0..=2 => atom(rng),
        3 | 4 => Program::test(random_formula(rng, depth - 1, props, actions, allow_star)),
        5 | 6 => Program::seq(
            random_program(rng, depth - 1, props, actions, allow_star),
            random_program(rng, depth - 1, props, actions, allow_star),
        ),
        7 | 8 => Program::choice(
            random_program(rng, depth - 1, props, actions, allow_star),
            random_program(rng, depth - 1, props, actions, allow_star),
        ),
        _ => {
            if allow_star {
                Program::star(random_program(rng, depth - 1, props, actions, allow_star))
            } else {
                Program::seq(
                    atom(rng),
                    random_program(rng, depth - 1, props, actions, allow_star),
                )
            }
        }
    }
}

/// A failing (map, point) pair for some formula, with the formula attached.
#[derive(Debug, Clone)]
pub struct Counterexample {
    pub map: UncertaintyMap,
    pub point: StateId,
    pub formula: Formula,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "formula {} fails at point {}",
            self.formula,
            self.map.model().state_name(self.point)
        )?;
        write!(f, "{}", self.map.to_json())
    }
}

/// Evaluates `f` at every point of every map's uncertainty set (plain
/// recursive engine) and returns the first failure, greedily minimized.
pub fn check_validity(f: &Formula, maps: &[UncertaintyMap]) -> Option<Counterexample> {
    for map in maps {
        if let Some(point) = fails_somewhere(map, f) {
            return Some(minimize(Counterexample {
                map: map.clone(),
                point,
                formula: f.clone(),
            }));
        }
    }
    None
}

fn fails_somewhere(map: &UncertaintyMap, f: &Formula) -> Option<StateId> {
    map.uncertainty()
        .iter()
        .find(|&s| !semantics::sat(map, s, f))
}

/// Rebuilds the map without one state (`None` when that would empty the
/// model or the uncertainty set).
fn without_state(map: &UncertaintyMap, victim: StateId) -> Option<UncertaintyMap> {
    let m = map.model();
    if m.n_states() == 1 {
        return None;
    }
    let keep: Vec<StateId> = (0..m.n_states()).filter(|&s| s != victim).collect();
    let names: Vec<String> = keep.iter().map(|&s| m.state_name(s).to_string()).collect();
    let valuation: Vec<(String, Vec<String>)> = keep
        .iter()
        .map(|&s| {
            let props = m
                .prop_names()
                .filter(|p| m.prop_holds(p, s))
                .map(|p| p.to_string())
                .collect();
            (m.state_name(s).to_string(), props)
        })
        .collect();
    let relations: Vec<(String, Vec<(String, String)>)> = m
        .actions()
        .map(|a| {
            let rel = m.relation(a).expect("listed action");
            let mut edges = Vec::new();
            for &from in &keep {
                for to in rel.successors(from).iter() {
                    if to != victim {
                        edges.push((m.state_name(from).to_string(), m.state_name(to).to_string()));
                    }
                }
            }
            (a.to_string(), edges)
        })
        .collect();
    let uncertainty: Vec<String> = map
        .uncertainty()
        .iter()
        .filter(|&s| s != victim)
        .map(|s| m.state_name(s).to_string())
        .collect();
    if uncertainty.is_empty() {
        return None;
    }
    let model = KripkeModel::new(names, valuation, relations).ok()?;
    UncertaintyMap::from_names(model, &uncertainty).ok()
}

/// Rebuilds the map without one edge.
fn without_edge(map: &UncertaintyMap, action: &str, from: StateId, to: StateId) -> UncertaintyMap {
    let m = map.model();
    let names: Vec<String> = m.state_names().to_vec();
    let valuation: Vec<(String, Vec<String>)> = (0..m.n_states())
        .map(|s| {
            let props = m
                .prop_names()
                .filter(|p| m.prop_holds(p, s))
                .map(|p| p.to_string())
                .collect();
            (m.state_name(s).to_string(), props)
        })
        .collect();
    let relations: Vec<(String, Vec<(String, String)>)> = m
        .actions()
        .map(|a| {
            let rel = m.relation(a).expect("listed action");
            let mut edges = Vec::new();
            for f in 0..m.n_states() {
                for t in rel.successors(f).iter() {
                    if !(a == action && f == from && t == to) {
                        edges.push((m.state_name(f).to_string(), m.state_name(t).to_string()));
                    }
                }
            }
            (a.to_string(), edges)
        })
        .collect();
    let uncertainty: Vec<String> = map
        .uncertainty()
        .iter()
        .map(|s| m.state_name(s).to_string())
        .collect();
    let model = KripkeModel::new(names, valuation, relations).expect("same states");
    UncertaintyMap::from_names(model, &uncertainty).expect("same uncertainty")
}

/// Greedy shrink: drop states, then edges, as long as the formula still
/// fails somewhere in the uncertainty set.
fn minimize(cex: Counterexample) -> Counterexample {
    let formula = cex.formula;
    let mut map = cex.map;
    'outer: loop {
        for victim in 0..map.model().n_states() {
            if let Some(smaller) = without_state(&map, victim) {
                if fails_somewhere(&smaller, &formula).is_some() {
                    map = smaller;
                    continue 'outer;
                }
            }
        }
        let m = map.model();
        let edges: Vec<(String, StateId, StateId)> = m
            .actions()
            .flat_map(|a| {
                let rel = m.relation(a).expect("listed action");
                (0..m.n_states())
                    .flat_map(|f| {
                        rel.successors(f)
                            .iter()
                            .map(|t| (a.to_string(), f, t))
                            .collect::<Vec<_>>()
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        for (a, f, t) in edges {
            let smaller = without_edge(&map, &a, f, t);
            if fails_somewhere(&smaller, &formula).is_some() {
                map = smaller;
                continue 'outer;
            }
        }
        break;
    }
    let point = fails_somewhere(&map, &formula).expect("minimization preserves failure");
    Counterexample {
        map,
        point,
        formula,
    }
}

/// One row of the suite report.
pub struct SchemaReport {
    pub name: String,
    pub trials: usize,
    pub counterexample: Option<Counterexample>,
}

/// The full suite outcome: one row per schema/equivalence family.
pub struct SoundnessReport {
    pub seed: u64,
    pub rows: Vec<SchemaReport>,
}

impl SoundnessReport {
    /// No row found a counterexample.
    pub fn clean(&self) -> bool {
        self.rows.iter().all(|r| r.counterexample.is_none())
    }
}

impl fmt::Display for SoundnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "soundness suite (seed {})", self.seed)?;
        for row in &self.rows {
            match &row.counterexample {
                None => writeln!(f, "  {:<22} {:>5} trials  ok", row.name, row.trials)?,
                Some(cex) => {
                    writeln!(
                        f,
                        "  {:<22} {:>5} trials  COUNTEREXAMPLE",
                        row.name, row.trials
                    )?;
                    for line in cex.to_string().lines() {
                        writeln!(f, "    {line}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// The program-equivalence families checked alongside the schemata: both
/// sides of each biconditional must agree everywhere.
fn equivalence_families() -> Vec<&'static str> {
    vec![
        "<pi;pi'> composition",
        "<pi+pi'> choice",
        "<?q> test",
        "safe-step unfolding",
        "known-safe-step",
        "known-safe-chain",
    ]
}

fn equivalence_instance(
    family: &str,
    rng: &mut ChaCha8Rng,
    p: &Formula,
    q: &Formula,
    props: &[String],
    actions: &[String],
) -> Formula {
    let a = actions[rng.random_range(0..actions.len())].clone();
    let b = actions[rng.random_range(0..actions.len())].clone();
    let mut pi = || random_program(rng, 2, props, actions, false);
    let guarded = |x: &str, inner: Formula| {
        Formula::diamond(
            Program::seq(
                Program::test(Formula::know(Formula::diamond(
                    Program::atom(x),
                    Formula::top(),
                ))),
                Program::atom(x),
            ),
            inner,
        )
    };
    match family {
        "<pi;pi'> composition" => {
            let (r, s) = (pi(), pi());
            Formula::iff(
                Formula::diamond(Program::seq(r.clone(), s.clone()), p.clone()),
                Formula::diamond(r, Formula::diamond(s, p.clone())),
            )
        }
        "<pi+pi'> choice" => {
            let (r, s) = (pi(), pi());
            Formula::iff(
                Formula::diamond(Program::choice(r.clone(), s.clone()), p.clone()),
                Formula::or(
                    Formula::diamond(r, p.clone()),
                    Formula::diamond(s, p.clone()),
                ),
            )
        }
        "<?q> test" => Formula::iff(
            Formula::diamond(Program::test(q.clone()), p.clone()),
            Formula::and(q.clone(), p.clone()),
        ),
        "safe-step unfolding" => Formula::iff(
            Formula::box_diamond(Program::atom(a.clone()), p.clone()),
            Formula::and(
                Formula::diamond(Program::atom(a.clone()), Formula::top()),
                Formula::boxp(Program::atom(a), p.clone()),
            ),
        ),
        "known-safe-step" => Formula::iff(
            Formula::know(Formula::box_diamond(Program::atom(a.clone()), p.clone())),
            guarded(&a, Formula::know(p.clone())),
        ),
        "known-safe-chain" => Formula::iff(
            Formula::know(Formula::box_diamond(
                Program::atom(a.clone()),
                Formula::box_diamond(Program::atom(b.clone()), p.clone()),
            )),
            guarded(&a, guarded(&b, Formula::know(p.clone()))),
        ),
        other => unreachable!("unknown family `{other}`"),
    }
}

/// Runs `trials` random instances of every schema and equivalence family
/// over fresh random maps and reports per-family outcomes.
pub fn soundness_suite(seed: u64, trials: usize) -> SoundnessReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let families: Vec<String> = Schema::system()
        .iter()
        .map(|s| s.name().to_string())
        .chain(equivalence_families().into_iter().map(String::from))
        .collect();
    let mut rows: Vec<SchemaReport> = families
        .iter()
        .map(|name| SchemaReport {
            name: name.clone(),
            trials,
            counterexample: None,
        })
        .collect();
    for _ in 0..trials {
        let map = random_model(
            rng.random_range(2..=5),
            2,
            rng.random_range(1..=3),
            0.35,
            rng.random(),
        );
        let props: Vec<String> = map.model().prop_names().map(String::from).collect();
        let actions: Vec<String> = map.model().actions().map(String::from).collect();
        let p = random_formula(&mut rng, 3, &props, &actions, false);
        let q = random_formula(&mut rng, 3, &props, &actions, false);
        let a = actions[rng.random_range(0..actions.len())].clone();
        for (row, name) in rows.iter_mut().zip(&families) {
            if row.counterexample.is_some() {
                continue;
            }
            let instance = match Schema::parse(name) {
                Some(schema) => schema.instantiate(&p, &q, &a),
                None => equivalence_instance(name, &mut rng, &p, &q, &props, &actions),
            };
            row.counterexample = check_validity(&instance, std::slice::from_ref(&map));
        }
    }
    SoundnessReport { seed, rows }
}

/// The pinned counterexample to the dropped schema: halfway down the
/// corridor of the `spy` map (uncertain between `s4` and `s5`), `r` is
/// executable at one world and not the other, so the agent neither knows
/// `⟨r⟩⊤` nor knows its negation.
pub fn obs_counterexample() -> Counterexample {
    let map = crate::fixtures::fixture("spy");
    let shifted =
        UncertaintyMap::from_names(map.model().clone(), &["s4", "s5"]).expect("s4 and s5 exist");
    let instance = Schema::Obs.instantiate(&Formula::top(), &Formula::top(), "r");
    let point = fails_somewhere(&shifted, &instance).expect("the dropped schema fails here");
    Counterexample {
        map: shifted,
        point,
        formula: instance,
    }
}
