//! Model checking and conformant planning for epistemic PDL over uncertainty
//! maps.
//!
//! The logic speaks about a single agent acting under uncertainty: a Kripke
//! model describes how actions move the world, an *uncertainty set* `U`
//! collects the states the agent cannot currently tell apart, and executing
//! an action updates `U` to its image. Knowledge (`K`) quantifies over `U`;
//! program modalities (`[π]`, `<π>`, `[[π]]`) quantify over executions while
//! updating `U` along the way.
//!
//! The crate provides:
//!
//! * [`syntax`] — formula/program ASTs, a parser and printer for the ASCII
//!   concrete syntax, and builders for planning formulas;
//! * [`model`] — named Kripke models, uncertainty maps, belief update, and a
//!   JSON model format; [`fixtures`] ships six ready-made example maps;
//! * three independent, provably-equivalent evaluation engines:
//!   [`semantics`] (recursive evaluation over belief/state pairs),
//!   [`contextual`] (context-indexed word enumeration, star-free fragment,
//!   polynomial space), and [`ets`] (an explicit epistemic transition system
//!   labelled bottom-up);
//! * [`planner`] — conformant-plan verification, existence, and synthesis,
//!   plus two independent decision procedures used as cross-checks;
//! * [`qbf`] — a polynomial reduction from QBF truth, exercising the
//!   contextual engine's PSPACE-hardness frontier;
//! * [`axioms`] — randomized soundness harness for the logic's axiom
//!   schemata over generated models.

pub mod automaton;
pub mod axioms;
pub mod bits;
pub mod contextual;
pub mod ets;
pub mod fixtures;
pub mod model;
pub mod planner;
pub mod qbf;
pub mod semantics;
pub mod syntax;
