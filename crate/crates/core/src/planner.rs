//! Conformant planning over uncertainty maps: verify a candidate plan,
//! decide plan existence by model checking a single formula, extract a
//! shortest plan by belief-space search, and decide reachability in
//! logarithmic space relative to the belief graph by midpoint bisection.
//!
//! A conformant plan is an unconditional action sequence that, from every
//! state the agent considers possible, stays executable throughout and ends
//! with the goal achieved. Equivalently: stepping the belief through the
//! sequence keeps every intermediate belief inside the executability set of
//! the next action, and the goal holds at every world of the final belief
//! (with that belief as the uncertainty set).

use crate::bits::StateSet;
use crate::ets::{self, EmptyRepertoire};
use crate::model::{KripkeModel, StateId, UncertaintyMap};
use crate::semantics;
use crate::syntax::{plan_existence_formula, plan_verification_formula, Formula};
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

/// A conformant-planning instance: a map, a goal, and the repertoire of
/// actions plans may use.
pub struct PlanningProblem {
    map: UncertaintyMap,
    actions: BTreeSet<String>,
    goal: Formula,
}

impl PlanningProblem {
    pub fn new(
        map: UncertaintyMap,
        actions: impl IntoIterator<Item = impl Into<String>>,
        goal: Formula,
    ) -> Result<Self, EmptyRepertoire> {
        let actions: BTreeSet<String> = actions.into_iter().map(Into::into).collect();
        if actions.is_empty() {
            return Err(EmptyRepertoire);
        }
        Ok(PlanningProblem { map, actions, goal })
    }

    pub fn map(&self) -> &UncertaintyMap {
        &self.map
    }

    pub fn actions(&self) -> &BTreeSet<String> {
        &self.actions
    }

    pub fn goal(&self) -> &Formula {
        &self.goal
    }
}

/// A (possibly empty) sequence of action names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    steps: Vec<String>,
}

impl Plan {
    pub fn new(steps: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Plan {
            steps: steps.into_iter().map(Into::into).collect(),
        }
    }

    pub fn empty() -> Self {
        Plan { steps: Vec::new() }
    }

    pub fn steps(&self) -> &[String] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.steps.join(" "))
    }
}

/// Is σ a conformant plan for the problem? Decided by model checking
/// `K ⟪a₁⟫…⟪aₙ⟫ goal` — the step-wise chain, one `⟪·⟫` per action — at a
/// point of the uncertainty set, with the transition-system engine (so the
/// goal may contain programs, star included).
///
/// The chain must be step-wise: `⟪a;b⟫φ` is a strictly weaker requirement
/// (it allows the b-step to depend on where the a-step landed) and is *not*
/// plan verification.
///
/// # Panics
///
/// Panics when a step lies outside the problem's repertoire.
pub fn verify_plan(p: &PlanningProblem, plan: &Plan) -> bool {
    for step in plan.steps() {
        assert!(
            p.actions.contains(step),
            "plan step `{step}` is outside the action repertoire"
        );
    }
    let f = plan_verification_formula(plan.steps(), &p.goal);
    let point = p
        .map
        .uncertainty()
        .first()
        .expect("uncertainty is nonempty");
    ets::sat(&p.map, point, &f)
}

/// Does *some* conformant plan exist? Decided by model checking the single
/// formula `⟨(Σ_{a∈B}(?K⟨a⟩⊤;a))*⟩ K goal`: iterate "pick an action known to
/// be executable and do it" and ask whether the goal can become known.
pub fn plan_exists(p: &PlanningProblem) -> bool {
    let names: Vec<&str> = p.actions.iter().map(|s| s.as_str()).collect();
    let theta = plan_existence_formula(&names, &p.goal);
    let point = p
        .map
        .uncertainty()
        .first()
        .expect("uncertainty is nonempty");
    ets::sat(&p.map, point, &theta)
}

/// Does the goal hold at every world of `belief`, with `belief` itself as
/// the uncertainty set? This is the acceptance test of belief-space search:
/// exactly "K goal" at any state carrying that belief.
fn goal_met(m: &KripkeModel, belief: &StateSet, goal: &Formula) -> bool {
    belief
        .iter()
        .all(|s| semantics::holds_at(m, belief, s, goal))
}

/// One guarded step: `a` applies to `belief` only when every world of the
/// belief has an `a`-successor (the agent knows the action is executable).
fn guarded_step(m: &KripkeModel, belief: &StateSet, a: &str) -> Option<StateSet> {
    belief
        .is_subset(&m.executable_set(a))
        .then(|| m.update(belief, a))
}

/// Finds a shortest conformant plan, ties broken by action-name order;
/// `None` exactly when no plan exists.
///
/// Program-free goals run a breadth-first search over guarded belief states.
/// Goals with programs fall back to plan enumeration in length-lex order,
/// capped at the number of guard-reachable beliefs — a complete bound, since
/// a plan whose belief trajectory revisits a belief can be shortened.
pub fn find_plan(p: &PlanningProblem) -> Option<Plan> {
    if p.goal.program_free() {
        return bfs_plan(p);
    }
    let m = p.map.model();
    let u0 = p.map.uncertainty();
    let cap = ets::build_guarded(m, u0, &p.actions)
        .expect("problem repertoire is nonempty")
        .belief_count();
    plans_in_length_lex(&p.actions, cap).find(|plan| verify_plan(p, plan))
}

fn bfs_plan(p: &PlanningProblem) -> Option<Plan> {
    let m = p.map.model();
    let u0 = p.map.uncertainty().clone();
    // parent[belief] = (previous belief, action taken), for plan read-back.
    let mut parent: HashMap<StateSet, (StateSet, String)> = HashMap::new();
    let mut seen: BTreeSet<StateSet> = BTreeSet::from([u0.clone()]);
    let mut queue: VecDeque<StateSet> = VecDeque::from([u0.clone()]);
    while let Some(cur) = queue.pop_front() {
        if goal_met(m, &cur, &p.goal) {
            let mut steps: Vec<String> = Vec::new();
            let mut at = cur;
            while let Some((prev, a)) = parent.get(&at) {
                steps.push(a.clone());
                at = prev.clone();
            }
            steps.reverse();
            return Some(Plan::new(steps));
        }
        for a in &p.actions {
            let Some(next) = guarded_step(m, &cur, a) else {
                continue;
            };
            if seen.insert(next.clone()) {
                parent.insert(next.clone(), (cur.clone(), a.clone()));
                queue.push_back(next);
            }
        }
    }
    None
}

/// All plans over the repertoire with length ≤ `max_len`, shortest first,
/// same-length plans in lexicographic action order.
fn plans_in_length_lex(
    actions: &BTreeSet<String>,
    max_len: usize,
) -> impl Iterator<Item = Plan> + '_ {
    let alphabet: Vec<&str> = actions.iter().map(|s| s.as_str()).collect();
    (0..=max_len).flat_map(move |len| {
        let alphabet = alphabet.clone();
        let count = alphabet.len().pow(len as u32);
        (0..count).map(move |mut ix| {
            let mut steps = vec![""; len];
            for slot in (0..len).rev() {
                steps[slot] = alphabet[ix % alphabet.len()];
                ix /= alphabet.len();
            }
            Plan::new(steps)
        })
    })
}

/// Oracle-grade plan search: try every plan of length ≤ `max_len` in
/// length-lex order and return the first that verifies — using the plain
/// recursive engine end to end, independent of the transition-system and
/// search machinery.
pub fn brute_force_plan(p: &PlanningProblem, max_len: usize) -> Option<Plan> {
    let point = p
        .map
        .uncertainty()
        .first()
        .expect("uncertainty is nonempty");
    plans_in_length_lex(&p.actions, max_len).find(|plan| {
        let f = plan_verification_formula(plan.steps(), &p.goal);
        semantics::sat(&p.map, point, &f)
    })
}

/// Decides "some goal belief is reachable from `u0` in the guarded belief
/// graph" by Savitch-style midpoint bisection: `reach(Γ, Δ, k)` asks for a
/// path of at most 2^k steps and splits it at every possible midpoint
/// belief, recursing with k−1. The graph is never built — each single-step
/// test computes the guard and the update on demand — and the recursion
/// depth is bounded by log₂ of the 2^n-belief step bound, i.e. by n = |S|.
/// (Results are cached; the cache is an accelerator, not part of the
/// algorithm's logic.)
///
/// # Panics
///
/// Panics for goals with programs or models with more than 12 states (the
/// midpoint space is all nonempty beliefs — 2^n − 1 of them).
pub fn savitch_reach(
    m: &KripkeModel,
    u0: &StateSet,
    actions: &BTreeSet<String>,
    goal: &Formula,
) -> bool {
    assert!(
        goal.program_free(),
        "bisection search needs a program-free goal"
    );
    assert!(!u0.is_empty(), "initial belief must be nonempty");
    if goal_met(m, u0, goal) {
        return true;
    }
    // Candidate midpoints and endpoints: every nonempty belief drawn from
    // the states the base model can reach from u0 along repertoire edges —
    // updates never leave that span, so the restriction loses no path.
    let mut span = u0.clone();
    loop {
        let mut next = span.clone();
        for a in actions {
            next.union_with(&m.update(&span, a));
        }
        if next == span {
            break;
        }
        span = next;
    }
    let reachable: Vec<StateId> = span.iter().collect();
    let w = reachable.len();
    assert!(
        w <= 12,
        "midpoint enumeration is exponential in the reachable-state count"
    );
    let n = m.n_states();
    let beliefs: Vec<StateSet> = (1u32..(1 << w))
        .map(|mask| {
            StateSet::from_iter(
                n,
                (0..w)
                    .filter(|&i| mask & (1 << i) != 0)
                    .map(|i| reachable[i]),
            )
        })
        .collect();
    let targets: Vec<&StateSet> = beliefs.iter().filter(|b| goal_met(m, b, goal)).collect();
    if targets.is_empty() {
        return false;
    }
    // A shortest path visits each belief at most once, so 2^w steps suffice;
    // deepen k from 0 so easy instances stay shallow.
    let mut search = Bisection {
        m,
        actions,
        beliefs: &beliefs,
        memo: HashMap::new(),
    };
    (0..=w).any(|k| targets.iter().any(|t| search.reach(u0, t, k)))
}

struct Bisection<'a> {
    m: &'a KripkeModel,
    actions: &'a BTreeSet<String>,
    beliefs: &'a [StateSet],
    memo: HashMap<(StateSet, StateSet, usize), bool>,
}

impl Bisection<'_> {
    /// Is there a guarded path from `from` to `to` of at most 2^k steps?
    fn reach(&mut self, from: &StateSet, to: &StateSet, k: usize) -> bool {
        if from == to {
            return true;
        }
        if k == 0 {
            return self
                .actions
                .iter()
                .any(|a| guarded_step(self.m, from, a).as_ref() == Some(to));
        }
        let key = (from.clone(), to.clone(), k);
        if let Some(&hit) = self.memo.get(&key) {
            return hit;
        }
        // Midpoint = `to` covers paths that already fit in 2^{k−1} steps.
        let beliefs = self.beliefs;
        let out = beliefs
            .iter()
            .any(|mid| self.reach(from, mid, k - 1) && self.reach(mid, to, k - 1));
        self.memo.insert(key, out);
        out
    }
}
