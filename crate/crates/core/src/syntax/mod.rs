//! Formula and program syntax.
//!
//! The formula core has exactly six shapes (`T`, atoms, `~`, `&`, `K`, `[π]`)
//! and programs have five (actions, tests, `;`, `+`, `*`). Every other
//! connective — `F`, `|`, `->`, `<π>`, `Kh`, `[[π]]` — is a constructor that
//! expands into the core at build time, so the semantics engines only ever
//! match on the core shapes.

mod parser;
mod print;

pub use parser::{parse_formula, parse_program, ParseError};

use std::collections::BTreeSet;
use std::rc::Rc;

/// An epistemic PDL formula (core shapes only).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    /// The constant `T`.
    Top,
    /// An atomic proposition.
    Prop(String),
    /// Negation `~φ`.
    Not(Rc<Formula>),
    /// Conjunction `φ & ψ`.
    And(Rc<Formula>, Rc<Formula>),
    /// Knowledge `K φ`: φ holds at every state the agent considers possible.
    Know(Rc<Formula>),
    /// Program necessity `[π] φ`: φ holds after every execution of π.
    Box(Rc<Program>, Rc<Formula>),
}

/// A PDL program.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Program {
    /// An atomic action.
    Atom(String),
    /// A test `?φ`: proceed exactly when φ holds.
    Test(Rc<Formula>),
    /// Sequential composition `π ; π'`.
    Seq(Rc<Program>, Rc<Program>),
    /// Nondeterministic choice `π + π'`.
    Choice(Rc<Program>, Rc<Program>),
    /// Finite iteration `π*` (zero or more rounds).
    Star(Rc<Program>),
}

/// One letter of a computation word: an action name or a test.
///
/// Words over these letters are the computation sequences a program denotes;
/// [`strip_tests`] projects a word to its executable actions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SeqItem {
    /// An action letter.
    Act(String),
    /// A test letter `?φ`.
    Test(Formula),
}

impl std::fmt::Display for SeqItem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SeqItem::Act(a) => write!(f, "{a}"),
            SeqItem::Test(t) => write!(f, "?{t}"),
        }
    }
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

impl Formula {
    pub fn top() -> Formula {
        Formula::Top
    }

    /// `F`, defined as `~T`.
    pub fn bot() -> Formula {
        Formula::not(Formula::Top)
    }

    pub fn prop(name: impl Into<String>) -> Formula {
        Formula::Prop(name.into())
    }

    // Part of the constructor family (`and`, `or`, …), so the DSL name wins
    // over the `std::ops::Not` convention.
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Rc::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Rc::new(l), Rc::new(r))
    }

    /// `φ | ψ`, defined as `~(~φ & ~ψ)`.
    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(l), Formula::not(r)))
    }

    /// `φ -> ψ`, defined as `~φ | ψ`.
    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::or(Formula::not(l), r)
    }

    /// `φ <-> ψ`, defined as `(φ -> ψ) & (ψ -> φ)`.
    pub fn iff(l: Formula, r: Formula) -> Formula {
        Formula::and(
            Formula::implies(l.clone(), r.clone()),
            Formula::implies(r, l),
        )
    }

    pub fn know(f: Formula) -> Formula {
        Formula::Know(Rc::new(f))
    }

    /// `Kh φ` ("the agent considers φ possible"), defined as `~K~φ`.
    pub fn khat(f: Formula) -> Formula {
        Formula::not(Formula::know(Formula::not(f)))
    }

    pub fn boxp(p: Program, f: Formula) -> Formula {
        Formula::Box(Rc::new(p), Rc::new(f))
    }

    /// `<π> φ`, defined as `~[π]~φ`.
    pub fn diamond(p: Program, f: Formula) -> Formula {
        Formula::not(Formula::boxp(p, Formula::not(f)))
    }

    /// `[[π]] φ`, defined as `[π]φ & <π>φ`: every execution of π ends in φ
    /// and at least one execution exists.
    pub fn box_diamond(p: Program, f: Formula) -> Formula {
        Formula::and(Formula::boxp(p.clone(), f.clone()), Formula::diamond(p, f))
    }

    /// Structural size: `T` and atoms count 1, `~`/`K` add 1, `&` adds 1,
    /// and `[π]φ` costs `size(π) + size(φ)`.
    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Prop(_) => 1,
            Formula::Not(f) | Formula::Know(f) => 1 + f.size(),
            Formula::And(l, r) => 1 + l.size() + r.size(),
            Formula::Box(p, f) => p.size() + f.size(),
        }
    }

    /// All subformulas of `self` (including itself and the formulas under
    /// tests inside programs), deduplicated, in syntactic order.
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut out = BTreeSet::new();
        collect_sub(self, &mut out);
        out.into_iter().collect()
    }

    /// True when no program under any modality contains `*`.
    pub fn star_free(&self) -> bool {
        match self {
            Formula::Top | Formula::Prop(_) => true,
            Formula::Not(f) | Formula::Know(f) => f.star_free(),
            Formula::And(l, r) => l.star_free() && r.star_free(),
            Formula::Box(p, f) => p.star_free() && f.star_free(),
        }
    }

    /// True when the formula contains no program modality at all.
    pub fn program_free(&self) -> bool {
        match self {
            Formula::Top | Formula::Prop(_) => true,
            Formula::Not(f) | Formula::Know(f) => f.program_free(),
            Formula::And(l, r) => l.program_free() && r.program_free(),
            Formula::Box(_, _) => false,
        }
    }
}

impl Program {
    pub fn atom(name: impl Into<String>) -> Program {
        Program::Atom(name.into())
    }

    pub fn test(f: Formula) -> Program {
        Program::Test(Rc::new(f))
    }

    pub fn seq(l: Program, r: Program) -> Program {
        Program::Seq(Rc::new(l), Rc::new(r))
    }

    pub fn choice(l: Program, r: Program) -> Program {
        Program::Choice(Rc::new(l), Rc::new(r))
    }

    pub fn star(p: Program) -> Program {
        Program::Star(Rc::new(p))
    }

    /// Structural size: actions count 1, `?φ` costs `1 + size(φ)`,
    /// `;` and `+` add 1, and `π*` costs `1 + size(π)`.
    pub fn size(&self) -> usize {
        match self {
            Program::Atom(_) => 1,
            Program::Test(f) => 1 + f.size(),
            Program::Seq(l, r) | Program::Choice(l, r) => 1 + l.size() + r.size(),
            Program::Star(p) => 1 + p.size(),
        }
    }

    pub fn star_free(&self) -> bool {
        match self {
            Program::Atom(_) => true,
            Program::Test(f) => f.star_free(),
            Program::Seq(l, r) | Program::Choice(l, r) => l.star_free() && r.star_free(),
            Program::Star(_) => false,
        }
    }

    /// The alphabet of the program's computation words: its action and test
    /// letters in order of first appearance, deduplicated.
    pub fn alphabet(&self) -> Vec<SeqItem> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        collect_alphabet(self, &mut seen, &mut out);
        out
    }

    /// Length of the longest computation word of the program, or `None` when
    /// the program contains `*` (unbounded). Tests and actions both count as
    /// one letter, so for star-free π this bounds every word the program
    /// denotes.
    pub fn longest_word_len(&self) -> Option<usize> {
        match self {
            Program::Atom(_) | Program::Test(_) => Some(1),
            Program::Seq(l, r) => Some(l.longest_word_len()? + r.longest_word_len()?),
            Program::Choice(l, r) => Some(l.longest_word_len()?.max(r.longest_word_len()?)),
            Program::Star(_) => None,
        }
    }
}

fn collect_sub(f: &Formula, out: &mut BTreeSet<Formula>) {
    out.insert(f.clone());
    match f {
        Formula::Top | Formula::Prop(_) => {}
        Formula::Not(g) | Formula::Know(g) => collect_sub(g, out),
        Formula::And(l, r) => {
            collect_sub(l, out);
            collect_sub(r, out);
        }
        Formula::Box(p, g) => {
            collect_sub_program(p, out);
            collect_sub(g, out);
        }
    }
}

fn collect_sub_program(p: &Program, out: &mut BTreeSet<Formula>) {
    match p {
        Program::Atom(_) => {}
        Program::Test(f) => collect_sub(f, out),
        Program::Seq(l, r) | Program::Choice(l, r) => {
            collect_sub_program(l, out);
            collect_sub_program(r, out);
        }
        Program::Star(q) => collect_sub_program(q, out),
    }
}

fn collect_alphabet(p: &Program, seen: &mut BTreeSet<SeqItem>, out: &mut Vec<SeqItem>) {
    match p {
        Program::Atom(a) => {
            let item = SeqItem::Act(a.clone());
            if seen.insert(item.clone()) {
                out.push(item);
            }
        }
        Program::Test(f) => {
            let item = SeqItem::Test((**f).clone());
            if seen.insert(item.clone()) {
                out.push(item);
            }
        }
        Program::Seq(l, r) | Program::Choice(l, r) => {
            collect_alphabet(l, seen, out);
            collect_alphabet(r, seen, out);
        }
        Program::Star(q) => collect_alphabet(q, seen, out),
    }
}

/// Projects a computation word to the action names it executes, dropping the
/// tests.
pub fn strip_tests(word: &[SeqItem]) -> Vec<String> {
    word.iter()
        .filter_map(|item| match item {
            SeqItem::Act(a) => Some(a.clone()),
            SeqItem::Test(_) => None,
        })
        .collect()
}

/// The plan-existence formula for action repertoire `B` and goal φ:
///
/// ```text
/// < ( ?K<b1>T ; b1 + ?K<b2>T ; b2 + … )* > K φ
/// ```
///
/// It is true exactly when some sequence of actions from `B`, each known to be
/// executable when taken, leads to knowledge of the goal. Summands appear in
/// lexicographic action order; duplicates are merged.
///
/// # Panics
///
/// Panics when `actions` is empty — an empty repertoire has no plans, and the
/// program `( … )*` would have no summands to iterate.
pub fn plan_existence_formula<S: AsRef<str>>(actions: &[S], goal: &Formula) -> Formula {
    let names: BTreeSet<&str> = actions.iter().map(|s| s.as_ref()).collect();
    assert!(
        !names.is_empty(),
        "plan_existence_formula requires a nonempty action repertoire"
    );
    let summands: Vec<Program> = names.into_iter().map(guarded_step).collect();
    let body = summands
        .into_iter()
        .reduce(Program::choice)
        .expect("nonempty repertoire");
    Formula::diamond(Program::star(body), Formula::know(goal.clone()))
}

/// `?K<a>T ; a` — test that the action is known executable, then do it.
fn guarded_step(a: &str) -> Program {
    Program::seq(
        Program::test(Formula::know(Formula::diamond(
            Program::atom(a),
            Formula::Top,
        ))),
        Program::atom(a),
    )
}

/// The plan-verification formula for a concrete action sequence `σ = a1…an`
/// and goal φ:
///
/// ```text
/// K [[a1]] [[a2]] … [[an]] φ
/// ```
///
/// Each step is wrapped in its own `[[·]]`, so executability is required at
/// every intermediate stage — this is deliberately *not* `K [[a1;…;an]] φ`,
/// which would let executions that die midway be discounted. An empty σ
/// yields `K φ`.
pub fn plan_verification_formula<S: AsRef<str>>(steps: &[S], goal: &Formula) -> Formula {
    let mut f = goal.clone();
    for a in steps.iter().rev() {
        f = Formula::box_diamond(Program::atom(a.as_ref()), f);
    }
    Formula::know(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::prop("p")
    }

    fn q() -> Formula {
        Formula::prop("q")
    }

    #[test]
    fn sizes_follow_the_clauses() {
        assert_eq!(Formula::Top.size(), 1);
        assert_eq!(p().size(), 1);
        assert_eq!(Formula::boxp(Program::atom("a"), p()).size(), 2);
        assert_eq!(Formula::not(Formula::and(p(), q())).size(), 4);
        assert_eq!(Formula::know(p()).size(), 2);
        assert_eq!(Program::atom("a").size(), 1);
        assert_eq!(Program::test(p()).size(), 2);
        assert_eq!(
            Program::seq(Program::atom("a"), Program::atom("b")).size(),
            3
        );
        assert_eq!(
            Program::choice(Program::atom("a"), Program::atom("b")).size(),
            3
        );
        assert_eq!(Program::star(Program::atom("a")).size(), 2);
    }

    #[test]
    fn derived_connectives_expand() {
        assert_eq!(Formula::bot(), Formula::not(Formula::Top));
        assert_eq!(
            Formula::or(p(), q()),
            Formula::not(Formula::and(Formula::not(p()), Formula::not(q())))
        );
        assert_eq!(
            Formula::implies(p(), q()),
            Formula::or(Formula::not(p()), q())
        );
        assert_eq!(
            Formula::khat(p()),
            Formula::not(Formula::know(Formula::not(p())))
        );
        assert_eq!(
            Formula::diamond(Program::atom("a"), p()),
            Formula::not(Formula::boxp(Program::atom("a"), Formula::not(p())))
        );
        let bd = Formula::box_diamond(Program::atom("a"), p());
        assert_eq!(
            bd,
            Formula::and(
                Formula::boxp(Program::atom("a"), p()),
                Formula::diamond(Program::atom("a"), p())
            )
        );
    }

    #[test]
    fn subformulas_reach_into_tests() {
        // [?q ; a] p has subformulas {[?q;a]p, p, q}.
        let f = Formula::boxp(Program::seq(Program::test(q()), Program::atom("a")), p());
        let subs = f.subformulas();
        assert_eq!(subs.len(), 3);
        assert!(subs.contains(&f));
        assert!(subs.contains(&p()));
        assert!(subs.contains(&q()));
    }

    #[test]
    fn alphabet_in_first_appearance_order() {
        // (?Kp ; a) + (b ; ?Kp)  →  [?Kp, a, b]
        let test_kp = Program::test(Formula::know(p()));
        let prog = Program::choice(
            Program::seq(test_kp.clone(), Program::atom("a")),
            Program::seq(Program::atom("b"), test_kp),
        );
        assert_eq!(
            prog.alphabet(),
            vec![
                SeqItem::Test(Formula::know(p())),
                SeqItem::Act("a".into()),
                SeqItem::Act("b".into()),
            ]
        );
    }

    #[test]
    fn strip_tests_keeps_action_order() {
        let word = vec![
            SeqItem::Test(Formula::know(p())),
            SeqItem::Act("a".into()),
            SeqItem::Test(Formula::Top),
            SeqItem::Act("b".into()),
        ];
        assert_eq!(strip_tests(&word), vec!["a".to_string(), "b".to_string()]);
        assert!(strip_tests(&[]).is_empty());
    }

    #[test]
    fn star_and_program_freedom() {
        let starred = Formula::boxp(Program::star(Program::atom("a")), p());
        assert!(!starred.star_free());
        assert!(!starred.program_free());
        let plain = Formula::and(Formula::know(p()), Formula::not(q()));
        assert!(plain.star_free());
        assert!(plain.program_free());
        let boxed = Formula::boxp(Program::atom("a"), p());
        assert!(boxed.star_free());
        assert!(!boxed.program_free());
        // A star hiding inside a test still counts.
        let hidden = Formula::boxp(
            Program::test(Formula::boxp(Program::star(Program::atom("a")), p())),
            q(),
        );
        assert!(!hidden.star_free());
    }

    #[test]
    fn longest_word_lengths() {
        let a = Program::atom("a");
        let b = Program::atom("b");
        assert_eq!(a.longest_word_len(), Some(1));
        assert_eq!(Program::test(p()).longest_word_len(), Some(1));
        assert_eq!(
            Program::seq(a.clone(), Program::seq(b.clone(), a.clone())).longest_word_len(),
            Some(3)
        );
        assert_eq!(
            Program::choice(a.clone(), Program::seq(a.clone(), b.clone())).longest_word_len(),
            Some(2)
        );
        assert_eq!(Program::star(a).longest_word_len(), None);
    }

    #[test]
    fn plan_existence_formula_shape() {
        // For B = {u, r}: <(?K<r>T;r + ?K<u>T;u)*> K goal, summands sorted.
        let f = plan_existence_formula(&["u", "r"], &p());
        let r_step = Program::seq(
            Program::test(Formula::know(Formula::diamond(
                Program::atom("r"),
                Formula::Top,
            ))),
            Program::atom("r"),
        );
        let u_step = Program::seq(
            Program::test(Formula::know(Formula::diamond(
                Program::atom("u"),
                Formula::Top,
            ))),
            Program::atom("u"),
        );
        let expected = Formula::diamond(
            Program::star(Program::choice(r_step, u_step)),
            Formula::know(p()),
        );
        assert_eq!(f, expected);
        // Duplicates collapse.
        assert_eq!(plan_existence_formula(&["r", "r", "u"], &p()), f);
    }

    #[test]
    #[should_panic(expected = "nonempty action repertoire")]
    fn plan_existence_formula_rejects_empty_repertoire() {
        let _ = plan_existence_formula::<&str>(&[], &Formula::prop("p"));
    }

    #[test]
    fn plan_verification_formula_shape() {
        // σ = ε: just K φ.
        assert_eq!(
            plan_verification_formula::<&str>(&[], &p()),
            Formula::know(p())
        );
        // σ = [a]: K([a]p & <a>p).
        assert_eq!(
            plan_verification_formula(&["a"], &p()),
            Formula::know(Formula::box_diamond(Program::atom("a"), p()))
        );
        // σ = [a, b]: K [[a]] [[b]] p — step-wise, not K [[a;b]] p.
        let inner = Formula::box_diamond(Program::atom("b"), p());
        assert_eq!(
            plan_verification_formula(&["a", "b"], &p()),
            Formula::know(Formula::box_diamond(Program::atom("a"), inner))
        );
    }
}
