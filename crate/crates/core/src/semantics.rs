//! The reference evaluation engine: literal recursion over pointed
//! uncertainty maps.
//!
//! A *pointed map* is a pair of a nonempty belief set and a state inside it.
//! `K φ` quantifies over the current belief; `[π] φ` quantifies over program
//! executions, and each action step replaces the belief by its update. This
//! engine favours transparency over speed and serves as the oracle the other
//! engines are checked against.

use crate::bits::StateSet;
use crate::model::{KripkeModel, StateId, UncertaintyMap};
use crate::syntax::{Formula, Program};
use std::collections::{BTreeSet, HashMap, HashSet};

/// A pointed map over some fixed model: a belief set and a state inside it.
pub type BeliefPoint = (StateSet, StateId);

/// The denotation ⟦π⟧ as a set of pointed-map pairs.
pub type PointedRelation = BTreeSet<(BeliefPoint, BeliefPoint)>;

/// Does φ hold at state `s` of the map?
///
/// # Panics
///
/// Panics when `s` is outside the uncertainty set: truth is only defined at
/// points the agent considers possible.
pub fn sat(map: &UncertaintyMap, s: StateId, f: &Formula) -> bool {
    assert!(
        map.uncertainty().contains(s),
        "evaluation point must lie inside the uncertainty set"
    );
    holds_at(map.model(), map.uncertainty(), s, f)
}

/// The raw evaluation clause over an explicit belief/state pair; for callers
/// that manage beliefs themselves. Requires `s ∈ u`.
pub fn holds_at(m: &KripkeModel, u: &StateSet, s: StateId, f: &Formula) -> bool {
    debug_assert!(u.contains(s), "state must belong to its belief");
    Evaluator::new(m).eval(u, s, f)
}

struct Evaluator<'a> {
    model: &'a KripkeModel,
    memo: HashMap<(StateSet, StateId, *const Formula), bool>,
}

impl<'a> Evaluator<'a> {
    fn new(model: &'a KripkeModel) -> Self {
        Evaluator {
            model,
            memo: HashMap::new(),
        }
    }

    fn eval(&mut self, u: &StateSet, s: StateId, f: &Formula) -> bool {
        match f {
            Formula::Top => true,
            Formula::Prop(p) => self.model.prop_holds(p, s),
            _ => {
                let key = (u.clone(), s, f as *const Formula);
                if let Some(&v) = self.memo.get(&key) {
                    return v;
                }
                let v = match f {
                    Formula::Top | Formula::Prop(_) => unreachable!(),
                    Formula::Not(g) => !self.eval(u, s, g),
                    Formula::And(l, r) => self.eval(u, s, l) && self.eval(u, s, r),
                    // K: φ at every state the agent considers possible.
                    Formula::Know(g) => u.iter().all(|v| self.eval(u, v, g)),
                    // [π]: φ at every pointed map one π-execution away.
                    Formula::Box(p, g) => self
                        .successors(u, s, p)
                        .iter()
                        .all(|(u2, t)| self.eval(u2, *t, g)),
                };
                self.memo.insert(key, v);
                v
            }
        }
    }

    /// All pointed maps reachable from `(u, s)` by one execution of `p`.
    fn successors(&mut self, u: &StateSet, s: StateId, p: &Program) -> Vec<BeliefPoint> {
        match p {
            Program::Atom(a) => {
                let u2 = self.model.update(u, a);
                match self.model.relation(a) {
                    Some(rel) => rel.successors(s).iter().map(|t| (u2.clone(), t)).collect(),
                    None => Vec::new(),
                }
            }
            Program::Test(f) => {
                if self.eval(u, s, f) {
                    vec![(u.clone(), s)]
                } else {
                    Vec::new()
                }
            }
            Program::Seq(l, r) => {
                let mut out = HashSet::new();
                for (u1, t1) in self.successors(u, s, l) {
                    for next in self.successors(&u1, t1, r) {
                        out.insert(next);
                    }
                }
                out.into_iter().collect()
            }
            Program::Choice(l, r) => {
                let mut out: HashSet<BeliefPoint> = self.successors(u, s, l).into_iter().collect();
                out.extend(self.successors(u, s, r));
                out.into_iter().collect()
            }
            // π*: least fixpoint — breadth-first closure of the one-round
            // step over the finite pointed-map space, including the start.
            Program::Star(q) => {
                let start = (u.clone(), s);
                let mut seen: HashSet<BeliefPoint> = HashSet::from([start.clone()]);
                let mut frontier = vec![start];
                while let Some((cu, ct)) = frontier.pop() {
                    for next in self.successors(&cu, ct, q) {
                        if seen.insert(next.clone()) {
                            frontier.push(next);
                        }
                    }
                }
                seen.into_iter().collect()
            }
        }
    }
}

/// All beliefs reachable from `u` by action updates (dropping empty results),
/// including `u` itself.
pub fn belief_closure(m: &KripkeModel, u: &StateSet) -> BTreeSet<StateSet> {
    let mut seen = BTreeSet::from([u.clone()]);
    let mut frontier = vec![u.clone()];
    let actions: Vec<String> = m.actions().map(|a| a.to_string()).collect();
    while let Some(cur) = frontier.pop() {
        for a in &actions {
            let next = m.update(&cur, a);
            if !next.is_empty() && seen.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    seen
}

/// The denotation ⟦π⟧ over the pointed maps reachable in the given map: all
/// pairs `(Γ, s)` with `Γ` in the belief closure of `U` and `s ∈ Γ`.
pub fn program_relation(map: &UncertaintyMap, p: &Program) -> PointedRelation {
    let m = map.model();
    let beliefs = belief_closure(m, map.uncertainty());
    let mut ev = Evaluator::new(m);
    let mut out = PointedRelation::new();
    for belief in &beliefs {
        for s in belief.iter() {
            for next in ev.successors(belief, s, p) {
                out.insert(((belief.clone(), s), next));
            }
        }
    }
    out
}
