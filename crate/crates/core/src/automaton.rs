//! Finite automata over computation words.
//!
//! A program denotes a regular language of computation words over its
//! alphabet of action and test letters (tests are opaque letters compared by
//! structural equality, not by semantic equivalence). The automaton is the
//! standard inductive regular-expression build with ε-transitions folded
//! away, so membership runs by subset simulation in space polynomial in the
//! program.

use crate::bits::StateSet;
use crate::syntax::{Program, SeqItem};
use std::collections::{BTreeSet, HashMap};

/// An ε-free nondeterministic automaton recognizing a program's computation
/// words.
pub struct ProgramAutomaton {
    sig: Vec<SeqItem>,
    /// `step[q][letter]` = ε-closed successor set of automaton state `q`.
    step: Vec<Vec<StateSet>>,
    /// ε-closure of the initial state.
    start: StateSet,
    accept: StateSet,
}

impl ProgramAutomaton {
    /// Compiles a program. Works for starred programs too; for star-free π
    /// every accepted word has length ≤ the structural size of π.
    pub fn new(p: &Program) -> Self {
        let sig = p.alphabet();
        let letter_of: HashMap<&SeqItem, usize> =
            sig.iter().enumerate().map(|(i, item)| (item, i)).collect();

        // Build the ε-NFA fragment-by-fragment.
        let mut nfa = NfaBuilder {
            edges: Vec::new(),
            letters: sig.len(),
        };
        let (start, end) = nfa.compile(p, &letter_of);

        // Fold ε away: per-state closures, then letter steps through them.
        let n = nfa.edges.len();
        let closure: Vec<StateSet> = (0..n).map(|q| nfa.eps_closure(q)).collect();
        let mut accept = StateSet::new(n);
        for (q, cl) in closure.iter().enumerate() {
            if cl.contains(end) {
                accept.insert(q);
            }
        }
        let step: Vec<Vec<StateSet>> = (0..n)
            .map(|q| {
                (0..sig.len())
                    .map(|l| {
                        let mut out = StateSet::new(n);
                        for &(letter, target) in &nfa.edges[q] {
                            if letter == Some(l) {
                                out.union_with(&closure[target]);
                            }
                        }
                        out
                    })
                    .collect()
            })
            .collect();
        ProgramAutomaton {
            sig,
            step,
            start: closure[start].clone(),
            accept,
        }
    }

    /// The program's alphabet in first-appearance order.
    pub fn sig(&self) -> &[SeqItem] {
        &self.sig
    }

    /// Is the word one of the program's computation words?
    pub fn accepts(&self, word: &[SeqItem]) -> bool {
        let mut cur = self.start.clone();
        for item in word {
            let Some(l) = self.sig.iter().position(|x| x == item) else {
                return false;
            };
            let mut next = StateSet::new(self.step.len());
            for q in cur.iter() {
                next.union_with(&self.step[q][l]);
            }
            cur = next;
            if cur.is_empty() {
                return false;
            }
        }
        cur.intersects(&self.accept)
    }
}

struct NfaBuilder {
    /// `edges[q]` = outgoing `(letter, target)` pairs; `None` letter is ε.
    edges: Vec<Vec<(Option<usize>, usize)>>,
    #[allow(dead_code)]
    letters: usize,
}

impl NfaBuilder {
    fn fresh(&mut self) -> usize {
        self.edges.push(Vec::new());
        self.edges.len() - 1
    }

    fn compile(&mut self, p: &Program, letter_of: &HashMap<&SeqItem, usize>) -> (usize, usize) {
        match p {
            Program::Atom(_) | Program::Test(_) => {
                let item = match p {
                    Program::Atom(a) => SeqItem::Act(a.clone()),
                    Program::Test(f) => SeqItem::Test((**f).clone()),
                    _ => unreachable!(),
                };
                let l = letter_of[&item];
                let s = self.fresh();
                let e = self.fresh();
                self.edges[s].push((Some(l), e));
                (s, e)
            }
            Program::Seq(a, b) => {
                let (s1, e1) = self.compile(a, letter_of);
                let (s2, e2) = self.compile(b, letter_of);
                self.edges[e1].push((None, s2));
                (s1, e2)
            }
            Program::Choice(a, b) => {
                let s = self.fresh();
                let e = self.fresh();
                let (s1, e1) = self.compile(a, letter_of);
                let (s2, e2) = self.compile(b, letter_of);
                self.edges[s].push((None, s1));
                self.edges[s].push((None, s2));
                self.edges[e1].push((None, e));
                self.edges[e2].push((None, e));
                (s, e)
            }
            Program::Star(q) => {
                let s = self.fresh();
                let e = self.fresh();
                let (s1, e1) = self.compile(q, letter_of);
                self.edges[s].push((None, e)); // zero rounds
                self.edges[s].push((None, s1));
                self.edges[e1].push((None, s1)); // another round
                self.edges[e1].push((None, e));
                (s, e)
            }
        }
    }

    fn eps_closure(&self, q: usize) -> StateSet {
        let mut seen = StateSet::singleton(self.edges.len(), q);
        let mut stack = vec![q];
        while let Some(u) = stack.pop() {
            for &(letter, v) in &self.edges[u] {
                if letter.is_none() && !seen.contains(v) {
                    seen.insert(v);
                    stack.push(v);
                }
            }
        }
        seen
    }
}

/// One-shot membership test `ω ∈ L(π)`.
pub fn in_language(word: &[SeqItem], p: &Program) -> bool {
    ProgramAutomaton::new(p).accepts(word)
}

/// Explicitly enumerates the computation words of a star-free program —
/// exponential, for cross-checking the automaton on small inputs. `None`
/// when the program contains `*`.
pub fn star_free_language(p: &Program) -> Option<BTreeSet<Vec<SeqItem>>> {
    match p {
        Program::Atom(a) => Some(BTreeSet::from([vec![SeqItem::Act(a.clone())]])),
        Program::Test(f) => Some(BTreeSet::from([vec![SeqItem::Test((**f).clone())]])),
        Program::Seq(a, b) => {
            let la = star_free_language(a)?;
            let lb = star_free_language(b)?;
            Some(
                la.iter()
                    .flat_map(|wa| {
                        lb.iter().map(move |wb| {
                            let mut w = wa.clone();
                            w.extend(wb.iter().cloned());
                            w
                        })
                    })
                    .collect(),
            )
        }
        Program::Choice(a, b) => {
            let mut l = star_free_language(a)?;
            l.extend(star_free_language(b)?);
            Some(l)
        }
        Program::Star(_) => None,
    }
}
