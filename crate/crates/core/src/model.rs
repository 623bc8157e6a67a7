//! Kripke models over named states, and uncertainty maps on top of them.
//!
//! A model is a set of states, a valuation, and one accessibility relation per
//! action. An uncertainty map adds a nonempty set `U` of states the agent
//! cannot tell apart; executing an action replaces `U` by its image under the
//! action's relation. Models load from and save to a small JSON format.

use crate::bits::{Relation, StateSet};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

/// Index of a state in its model's state list.
pub type StateId = usize;

/// Errors raised while constructing or loading a model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("model has no states")]
    NoStates,
    #[error("unknown state `{name}` in {context}")]
    UnknownState { name: String, context: String },
    #[error("uncertainty set is empty")]
    EmptyUncertainty,
    #[error("evaluation point `{0}` is outside the uncertainty set")]
    PointOutsideUncertainty(String),
    #[error("invalid model JSON: {0}")]
    Json(String),
}

/// A Kripke model: named states, a valuation, and a relation per action.
///
/// The order of `states` in the constructor is significant: it fixes the
/// state ids used everywhere else.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KripkeModel {
    states: Vec<String>,
    index: HashMap<String, StateId>,
    props: BTreeMap<String, StateSet>,
    relations: BTreeMap<String, Relation>,
}

impl KripkeModel {
    /// Builds a model from named parts.
    ///
    /// `valuation` maps state names to the propositions true there;
    /// `relations` maps action names to edge lists. Every state name
    /// mentioned anywhere must appear in `states`.
    pub fn new(
        states: Vec<String>,
        valuation: impl IntoIterator<Item = (String, Vec<String>)>,
        relations: impl IntoIterator<Item = (String, Vec<(String, String)>)>,
    ) -> Result<Self, ModelError> {
        if states.is_empty() {
            return Err(ModelError::NoStates);
        }
        let mut index = HashMap::new();
        for (i, name) in states.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(ModelError::DuplicateState(name.clone()));
            }
        }
        let n = states.len();
        let resolve = |name: &str, context: &str| -> Result<StateId, ModelError> {
            index
                .get(name)
                .copied()
                .ok_or_else(|| ModelError::UnknownState {
                    name: name.to_string(),
                    context: context.to_string(),
                })
        };
        let mut props: BTreeMap<String, StateSet> = BTreeMap::new();
        for (state, state_props) in valuation {
            let s = resolve(&state, "valuation")?;
            for p in state_props {
                props.entry(p).or_insert_with(|| StateSet::new(n)).insert(s);
            }
        }
        let mut rels: BTreeMap<String, Relation> = BTreeMap::new();
        for (action, edges) in relations {
            let rel = rels
                .entry(action.clone())
                .or_insert_with(|| Relation::new(n));
            let context = format!("relation `{action}`");
            for (from, to) in edges {
                let f = resolve(&from, &context)?;
                let t = resolve(&to, &context)?;
                rel.insert(f, t);
            }
        }
        Ok(KripkeModel {
            states,
            index,
            props,
            relations: rels,
        })
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.index.get(name).copied()
    }

    pub fn state_name(&self, id: StateId) -> &str {
        &self.states[id]
    }

    /// Action names carrying a relation, in sorted order.
    pub fn actions(&self) -> impl Iterator<Item = &str> {
        self.relations.keys().map(|s| s.as_str())
    }

    /// Is `prop` true at state `s`? Propositions the valuation never
    /// mentions are false everywhere.
    pub fn prop_holds(&self, prop: &str, s: StateId) -> bool {
        self.props.get(prop).is_some_and(|set| set.contains(s))
    }

    /// The states where `prop` is true (empty for propositions the valuation
    /// never mentions).
    pub fn prop_set(&self, prop: &str) -> StateSet {
        self.props
            .get(prop)
            .cloned()
            .unwrap_or_else(|| StateSet::new(self.n_states()))
    }

    /// The relation of `action`, if the model mentions it.
    /// Every proposition the valuation mentions, in sorted order.
    pub fn prop_names(&self) -> impl Iterator<Item = &str> {
        self.props.keys().map(|s| s.as_str())
    }

    pub fn relation(&self, action: &str) -> Option<&Relation> {
        self.relations.get(action)
    }

    /// Belief update: the image `{t | ∃s ∈ u. s →action t}`. Actions the
    /// model does not mention have the empty relation, so they update to ∅.
    pub fn update(&self, u: &StateSet, action: &str) -> StateSet {
        match self.relations.get(action) {
            Some(rel) => u.image(rel),
            None => StateSet::new(self.n_states()),
        }
    }

    /// Folds [`update`](Self::update) over a sequence of actions.
    pub fn update_seq<S: AsRef<str>>(&self, u: &StateSet, actions: &[S]) -> StateSet {
        let mut cur = u.clone();
        for a in actions {
            cur = self.update(&cur, a.as_ref());
        }
        cur
    }

    /// The states from which `action` has at least one successor.
    pub fn executable_set(&self, action: &str) -> StateSet {
        match self.relations.get(action) {
            Some(rel) => rel.source_set(),
            None => StateSet::new(self.n_states()),
        }
    }

    /// Renders a state set as `{name,name,…}` in id order.
    pub fn format_set(&self, set: &StateSet) -> String {
        let names: Vec<&str> = set.iter().map(|i| self.state_name(i)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Resolves a list of state names to a set.
    pub fn set_of_names<S: AsRef<str>>(
        &self,
        names: &[S],
        context: &str,
    ) -> Result<StateSet, ModelError> {
        let mut set = StateSet::new(self.n_states());
        for name in names {
            let id = self
                .state_id(name.as_ref())
                .ok_or_else(|| ModelError::UnknownState {
                    name: name.as_ref().to_string(),
                    context: context.to_string(),
                })?;
            set.insert(id);
        }
        Ok(set)
    }
}

/// A Kripke model together with a nonempty uncertainty set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UncertaintyMap {
    model: KripkeModel,
    uncertainty: StateSet,
}

impl UncertaintyMap {
    pub fn new(model: KripkeModel, uncertainty: StateSet) -> Result<Self, ModelError> {
        assert_eq!(
            uncertainty.universe(),
            model.n_states(),
            "uncertainty set universe must match the model"
        );
        if uncertainty.is_empty() {
            return Err(ModelError::EmptyUncertainty);
        }
        Ok(UncertaintyMap { model, uncertainty })
    }

    pub fn from_names<S: AsRef<str>>(
        model: KripkeModel,
        uncertainty: &[S],
    ) -> Result<Self, ModelError> {
        let set = model.set_of_names(uncertainty, "uncertainty")?;
        Self::new(model, set)
    }

    pub fn model(&self) -> &KripkeModel {
        &self.model
    }

    pub fn uncertainty(&self) -> &StateSet {
        &self.uncertainty
    }

    /// Resolves a state name to an evaluation point, requiring it to lie
    /// inside the uncertainty set.
    pub fn point_id(&self, name: &str) -> Result<StateId, ModelError> {
        let id = self
            .model
            .state_id(name)
            .ok_or_else(|| ModelError::UnknownState {
                name: name.to_string(),
                context: "evaluation point".to_string(),
            })?;
        if !self.uncertainty.contains(id) {
            return Err(ModelError::PointOutsideUncertainty(name.to_string()));
        }
        Ok(id)
    }

    /// Serializes to the JSON model format.
    pub fn to_json(&self) -> String {
        let m = &self.model;
        let doc = ModelDoc {
            states: m.states.clone(),
            valuation: m
                .states
                .iter()
                .enumerate()
                .filter_map(|(i, name)| {
                    let props: Vec<String> = m
                        .props
                        .iter()
                        .filter(|(_, set)| set.contains(i))
                        .map(|(p, _)| p.clone())
                        .collect();
                    if props.is_empty() {
                        None
                    } else {
                        Some((name.clone(), props))
                    }
                })
                .collect(),
            relations: m
                .relations
                .iter()
                .map(|(a, rel)| {
                    let edges: Vec<(String, String)> = (0..m.n_states())
                        .flat_map(|i| {
                            rel.successors(i)
                                .iter()
                                .map(|j| (m.state_name(i).to_string(), m.state_name(j).to_string()))
                                .collect::<Vec<_>>()
                        })
                        .collect();
                    (a.clone(), edges)
                })
                .collect(),
            uncertainty: self
                .uncertainty
                .iter()
                .map(|i| m.states[i].clone())
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("model serialization cannot fail")
    }
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    states: Vec<String>,
    #[serde(default)]
    valuation: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    relations: BTreeMap<String, Vec<(String, String)>>,
    uncertainty: Vec<String>,
}

/// Parses an uncertainty map from the JSON model format:
///
/// ```json
/// {
///   "states": ["s1", "s2"],
///   "valuation": {"s2": ["p"]},
///   "relations": {"a": [["s1", "s2"]]},
///   "uncertainty": ["s1"]
/// }
/// ```
///
/// `valuation` and `relations` may be omitted when empty. State ids follow
/// the order of `states`.
pub fn load_model(text: &str) -> Result<UncertaintyMap, ModelError> {
    let doc: ModelDoc = serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
    let model = KripkeModel::new(doc.states, doc.valuation, doc.relations)?;
    UncertaintyMap::from_names(model, &doc.uncertainty)
}
