//! A quantified-boolean-formula harness: translate a prenex-CNF instance
//! with strictly alternating quantifiers (∃x₁∀x₂∃x₃…) into a linear-size
//! model and a star-free formula whose model-checking verdict equals the
//! instance's truth value, and cross-check that translation against a
//! brute-force evaluator.
//!
//! The model for n variables is a chain: a start state `x0` and, per
//! variable `i`, a pair `xi`/`xbi` carrying propositions `pi`/`qi`. Actions
//! `ai` and `abi` each put self-loops on every state and push the frontier
//! of the chain to `xi` or `xbi` respectively. Walking the chain while
//! testing `pi ∨ qi` prunes the uncertainty set down to exactly the visited
//! choices, so "x_i was set true" becomes the epistemic possibility `K̂ pi`.
//! Existential choices become diamonds over `(ai + abi);?(pi|qi)`, universal
//! ones boxes, and the CNF matrix is substituted literal by literal.

use crate::contextual;
use crate::model::{KripkeModel, UncertaintyMap};
use crate::syntax::{Formula, Program};
use thiserror::Error;

/// A prenex-CNF instance under the fixed alternation ∃x₁∀x₂∃x₃…: `n`
/// variables and a conjunction of clauses, each clause a disjunction of
/// signed variable indices (`-3` means ¬x₃).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Qbf {
    n: usize,
    clauses: Vec<Vec<i32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QbfError {
    #[error("an instance needs at least one variable")]
    NoVariables,
    #[error("an instance needs at least one clause")]
    NoClauses,
    #[error("clause {index} is empty")]
    EmptyClause { index: usize },
    #[error("literal {literal} is outside the variable range 1..={n}")]
    LiteralOutOfRange { literal: i32, n: usize },
}

impl Qbf {
    pub fn new(n: usize, clauses: Vec<Vec<i32>>) -> Result<Self, QbfError> {
        if n == 0 {
            return Err(QbfError::NoVariables);
        }
        if clauses.is_empty() {
            return Err(QbfError::NoClauses);
        }
        for (index, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(QbfError::EmptyClause { index });
            }
            for &literal in clause {
                if literal == 0 || literal.unsigned_abs() as usize > n {
                    return Err(QbfError::LiteralOutOfRange { literal, n });
                }
            }
        }
        Ok(Qbf { n, clauses })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    pub fn total_literals(&self) -> usize {
        self.clauses.iter().map(Vec::len).sum()
    }
}

/// The chain model for `n` variables: states `x0`, `x1..xn`, `xb1..xbn`
/// (2n+1 of them), propositions `pi` at `xi` and `qi` at `xbi`, actions `ai`
/// and `abi` with universal self-loops plus the forward edges from level
/// i−1 to level i (level 0 has no `xb0`, so `a1`/`ab1` get one forward edge
/// each, later levels two). Uncertainty starts as `{x0}`.
///
/// # Panics
///
/// Panics when `n` is 0.
pub fn build_model(n: usize) -> UncertaintyMap {
    assert!(n >= 1, "the chain model needs at least one variable");
    let mut states = vec!["x0".to_string()];
    states.extend((1..=n).map(|i| format!("x{i}")));
    states.extend((1..=n).map(|i| format!("xb{i}")));
    let valuation: Vec<(String, Vec<String>)> = (1..=n)
        .flat_map(|i| {
            [
                (format!("x{i}"), vec![format!("p{i}")]),
                (format!("xb{i}"), vec![format!("q{i}")]),
            ]
        })
        .collect();
    let mut relations = Vec::new();
    for i in 1..=n {
        for (action, target) in [
            (format!("a{i}"), format!("x{i}")),
            (format!("ab{i}"), format!("xb{i}")),
        ] {
            let mut edges: Vec<(String, String)> =
                states.iter().map(|s| (s.clone(), s.clone())).collect();
            edges.push((format!("x{}", i - 1), target.clone()));
            if i >= 2 {
                edges.push((format!("xb{}", i - 1), target.clone()));
            }
            relations.push((action, edges));
        }
    }
    let model =
        KripkeModel::new(states, valuation, relations).expect("the chain model is well-formed");
    UncertaintyMap::from_names(model, &["x0"]).expect("x0 exists")
}

/// The star-free formula whose truth at `x0` of the chain model equals the
/// instance's truth value: one quantifier template per variable — diamond
/// for ∃ (odd), box for ∀ (even) — over `(ai + abi);?(pi ∨ qi)`, wrapped
/// around the clause matrix with `xi ↦ K̂pi` and `¬xi ↦ K̂qi`.
pub fn build_formula(q: &Qbf) -> Formula {
    let literal = |lit: i32| {
        let i = lit.unsigned_abs();
        if lit > 0 {
            Formula::khat(Formula::prop(format!("p{i}")))
        } else {
            Formula::khat(Formula::prop(format!("q{i}")))
        }
    };
    let clause = |lits: &[i32]| {
        lits.iter()
            .copied()
            .map(literal)
            .reduce(Formula::or)
            .expect("clauses are nonempty")
    };
    let mut f = q
        .clauses
        .iter()
        .map(|c| clause(c))
        .reduce(Formula::and)
        .expect("instances have clauses");
    for i in (1..=q.n).rev() {
        let step = Program::seq(
            Program::choice(
                Program::atom(format!("a{i}")),
                Program::atom(format!("ab{i}")),
            ),
            Program::test(Formula::or(
                Formula::prop(format!("p{i}")),
                Formula::prop(format!("q{i}")),
            )),
        );
        f = if i % 2 == 1 {
            Formula::diamond(step, f)
        } else {
            Formula::boxp(step, f)
        };
    }
    f
}

/// Brute-force truth of the instance: play the alternation game over all
/// assignments — the independent oracle for the reduction.
pub fn eval_qbf(q: &Qbf) -> bool {
    fn go(q: &Qbf, assignment: &mut Vec<bool>) -> bool {
        let i = assignment.len();
        if i == q.n {
            return q.clauses.iter().all(|clause| {
                clause.iter().any(|&lit| {
                    let value = assignment[lit.unsigned_abs() as usize - 1];
                    if lit > 0 {
                        value
                    } else {
                        !value
                    }
                })
            });
        }
        let exists = (i + 1) % 2 == 1;
        let mut verdicts = [false, true].into_iter().map(|v| {
            assignment.push(v);
            let out = go(q, assignment);
            assignment.pop();
            out
        });
        if exists {
            verdicts.any(|v| v)
        } else {
            verdicts.all(|v| v)
        }
    }
    go(q, &mut Vec::with_capacity(q.n))
}

/// Truth of the instance via the reduction: model-check the translated
/// formula at `x0` of the chain model with the context-based engine.
pub fn reduction_check(q: &Qbf) -> bool {
    let map = build_model(q.n);
    let x0 = map.model().state_id("x0").expect("x0 exists");
    contextual::mc(&map, x0, &[], &build_formula(q))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QdimacsError {
    #[error("missing `p cnf <vars> <clauses>` header")]
    MissingHeader,
    #[error("malformed header line: {0}")]
    BadHeader(String),
    #[error("quantifier lines are not accepted; the alternation is fixed as ∃x1∀x2∃x3…")]
    QuantifierLine,
    #[error("unreadable literal `{0}`")]
    BadLiteral(String),
    #[error("the last clause is missing its terminating 0")]
    UnterminatedClause,
    #[error("header declares {declared} clauses but {found} were given")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error(transparent)]
    Invalid(#[from] QbfError),
}

/// Parses a DIMACS-style clause list: comment lines (`c …`), one
/// `p cnf <vars> <clauses>` header, then clauses as whitespace-separated
/// signed integers, each clause terminated by `0`. Quantifier-prefix lines
/// (`e`/`a`) are rejected — the alternation is fixed by construction.
pub fn parse_qdimacs(text: &str) -> Result<Qbf, QdimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut literals: Vec<i32> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('e') || line.starts_with('a') {
            return Err(QdimacsError::QuantifierLine);
        }
        if let Some(rest) = line.strip_prefix('p') {
            let fields: Vec<&str> = rest.split_whitespace().collect();
            let parsed = (fields.len() == 3 && fields[0] == "cnf")
                .then(|| {
                    Some((
                        fields[1].parse::<usize>().ok()?,
                        fields[2].parse::<usize>().ok()?,
                    ))
                })
                .flatten();
            match parsed {
                Some(pair) => header = Some(pair),
                None => return Err(QdimacsError::BadHeader(line.to_string())),
            }
            continue;
        }
        if header.is_none() {
            return Err(QdimacsError::MissingHeader);
        }
        for tok in line.split_whitespace() {
            let lit: i32 = tok
                .parse()
                .map_err(|_| QdimacsError::BadLiteral(tok.to_string()))?;
            literals.push(lit);
        }
    }
    let Some((n, m)) = header else {
        return Err(QdimacsError::MissingHeader);
    };
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    for lit in literals {
        if lit == 0 {
            clauses.push(std::mem::take(&mut current));
        } else {
            current.push(lit);
        }
    }
    if !current.is_empty() {
        return Err(QdimacsError::UnterminatedClause);
    }
    if clauses.len() != m {
        return Err(QdimacsError::ClauseCountMismatch {
            declared: m,
            found: clauses.len(),
        });
    }
    Ok(Qbf::new(n, clauses)?)
}
