//! The context-dependent evaluation engine for the star-free fragment.
//!
//! Instead of carrying updated beliefs around, this engine carries the
//! *context* σ — the sequence of actions executed so far — and recomputes the
//! current belief `U|^σ` from it on demand. Program modalities are resolved
//! by enumerating candidate computation words over the program's alphabet in
//! length-then-lexicographic order, filtering by automaton membership. The
//! engine holds only matrices, words, and the context, which is what keeps it
//! in polynomial space; the price is exponential time, and `*` (whose words
//! have unbounded length) is outside its fragment.

use crate::automaton::ProgramAutomaton;
use crate::bits::{Relation, StateSet};
use crate::model::{KripkeModel, StateId, UncertaintyMap};
use crate::syntax::{strip_tests, Formula, Program, SeqItem};
use std::collections::HashMap;
use std::rc::Rc;
use thiserror::Error;

/// The formula contains `*`, which this engine does not handle.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("star-free fragment only")]
pub struct NotStarFree;

/// Evaluates φ at point `s` in the empty context.
///
/// Returns [`NotStarFree`] when φ contains `*`.
///
/// # Panics
///
/// Panics when `s` is outside the uncertainty set.
pub fn check(map: &UncertaintyMap, s: StateId, f: &Formula) -> Result<bool, NotStarFree> {
    if !f.star_free() {
        return Err(NotStarFree);
    }
    assert!(
        map.uncertainty().contains(s),
        "evaluation point must lie inside the uncertainty set"
    );
    let mut ctx = Ctx::new(map, f.size());
    Ok(ctx.eval(s, &mut Vec::new(), f, 0))
}

/// Evaluates φ at state `s` in explicit context σ (the actions executed so
/// far). Requires φ star-free.
pub fn mc(map: &UncertaintyMap, s: StateId, sigma: &[String], f: &Formula) -> bool {
    assert!(f.star_free(), "star-free fragment only");
    let mut ctx = Ctx::new(map, f.size());
    ctx.eval(s, &mut sigma.to_vec(), f, 0)
}

/// The belief after executing σ from `u`: the fold of the one-step update,
/// computed as a chain of boolean vector–matrix products.
pub fn belief_after<S: AsRef<str>>(m: &KripkeModel, u: &StateSet, sigma: &[S]) -> StateSet {
    let mut cur = u.clone();
    for a in sigma {
        // One product: row-OR of the action's adjacency matrix over `cur`.
        cur = match m.relation(a.as_ref()) {
            Some(rel) => cur.image(rel),
            None => StateSet::new(m.n_states()),
        };
    }
    cur
}

/// The relation `→ω` of a computation word in context σ: compose the action
/// adjacency matrices and the diagonal filters of the tests, evaluating each
/// test in the context reached at its position.
pub fn word_relation(map: &UncertaintyMap, word: &[SeqItem], sigma: &[String]) -> Relation {
    let limit: usize = word
        .iter()
        .map(|item| match item {
            SeqItem::Act(_) => 1,
            SeqItem::Test(f) => 1 + f.size(),
        })
        .sum::<usize>()
        .max(1);
    let mut ctx = Ctx::new(map, limit);
    ctx.word_relation(word, &mut sigma.to_vec(), 0)
}

/// Successor of ω in length-then-lexicographic order over `sig`: treat ω as a
/// base-|sig| numeral, increment, and grow the length by one on overflow
/// (resetting every position to `sig[0]`). `None` only for an empty
/// alphabet; callers stop the enumeration at their own length bound.
pub fn next_word(word: &[SeqItem], sig: &[SeqItem]) -> Option<Vec<SeqItem>> {
    if sig.is_empty() {
        return None;
    }
    let mut digits: Vec<usize> = word
        .iter()
        .map(|item| {
            sig.iter()
                .position(|x| x == item)
                .expect("every word letter must come from the alphabet")
        })
        .collect();
    for d in digits.iter_mut().rev() {
        if *d + 1 < sig.len() {
            *d += 1;
            return Some(digits.iter().map(|&i| sig[i].clone()).collect());
        }
        *d = 0;
    }
    // Overflow: grow by one letter.
    Some(vec![sig[0].clone(); word.len() + 1])
}

struct Ctx<'a> {
    map: &'a UncertaintyMap,
    /// Per-program-node automaton cache; keyed by node address, which is
    /// stable for the lifetime of the borrowed formula.
    automata: HashMap<*const Program, Rc<ProgramAutomaton>>,
    /// Recursion bound: each recursive step descends to a strictly smaller
    /// formula, so the depth can never exceed the size of the entry formula.
    limit: usize,
}

impl<'a> Ctx<'a> {
    fn new(map: &'a UncertaintyMap, limit: usize) -> Self {
        Ctx {
            map,
            automata: HashMap::new(),
            limit,
        }
    }

    fn automaton(&mut self, p: &Program) -> Rc<ProgramAutomaton> {
        self.automata
            .entry(p as *const Program)
            .or_insert_with(|| Rc::new(ProgramAutomaton::new(p)))
            .clone()
    }

    fn eval(&mut self, s: StateId, sigma: &mut Vec<String>, f: &Formula, depth: usize) -> bool {
        assert!(
            depth <= self.limit,
            "context-dependent recursion exceeded the formula-size bound"
        );
        let m = self.map.model();
        match f {
            Formula::Top => true,
            Formula::Prop(p) => m.prop_holds(p, s),
            Formula::Not(g) => !self.eval(s, sigma, g, depth + 1),
            Formula::And(l, r) => {
                self.eval(s, sigma, l, depth + 1) && self.eval(s, sigma, r, depth + 1)
            }
            Formula::Know(g) => {
                // K ranges over the belief the context induces, recomputed
                // here rather than threaded through the recursion.
                let u = belief_after(m, self.map.uncertainty(), sigma);
                let members: Vec<StateId> = u.iter().collect();
                members
                    .into_iter()
                    .all(|v| self.eval(v, sigma, g, depth + 1))
            }
            Formula::Box(p, g) => {
                // [π]φ fails exactly when some computation word of π takes s
                // to a state where φ fails in the extended context. Candidate
                // words run in length-then-lex order; membership filters them.
                let aut = self.automaton(p);
                let sig = aut.sig();
                let bound = p
                    .longest_word_len()
                    .expect("star-free programs have bounded words");
                let mut word = vec![sig[0].clone()];
                while word.len() <= bound {
                    if aut.accepts(&word) {
                        let rel = self.word_relation(&word, sigma, depth + 1);
                        let actions = strip_tests(&word);
                        for t in rel.successors(s).iter() {
                            let saved = sigma.len();
                            sigma.extend(actions.iter().cloned());
                            let ok = self.eval(t, sigma, g, depth + 1);
                            sigma.truncate(saved);
                            if !ok {
                                return false;
                            }
                        }
                    }
                    match next_word(&word, sig) {
                        Some(next) => word = next,
                        None => break,
                    }
                }
                true
            }
        }
    }

    /// The matrix of `→ω` in context σ, left-to-right: identity for ε;
    /// a test contributes the diagonal of the states satisfying it in the
    /// context reached so far; an action contributes its adjacency matrix
    /// and extends the context.
    fn word_relation(
        &mut self,
        word: &[SeqItem],
        sigma: &mut Vec<String>,
        depth: usize,
    ) -> Relation {
        let m = self.map.model();
        let n = m.n_states();
        let saved = sigma.len();
        let mut acc = Relation::identity(n);
        for item in word {
            let step = match item {
                SeqItem::Test(f) => {
                    let passing = StateSet::from_iter(
                        n,
                        (0..n).filter(|&v| self.eval(v, sigma, f, depth + 1)),
                    );
                    Relation::diagonal(&passing)
                }
                SeqItem::Act(a) => {
                    let rel = m.relation(a).cloned().unwrap_or_else(|| Relation::new(n));
                    sigma.push(a.clone());
                    rel
                }
            };
            acc = acc.compose(&step);
        }
        sigma.truncate(saved);
        acc
    }
}
