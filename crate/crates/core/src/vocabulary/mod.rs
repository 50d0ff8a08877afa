//! Business vocabulary: object types, individual concepts, fact types,
//! attributes, characteristics and multiplicities, plus the class-model view
//! derived from them.

mod class_model;
mod load;

use std::collections::{BTreeSet, VecDeque};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::value::ValueType;

pub use class_model::{
    derive_class_model, Association, AssociationEnd, Attribute, Class, ClassModel,
    ClassModelError, EndRef, Operation, Parameter,
};
pub use load::load_vocabulary;

/// Fixed verb phrase of categorization fact types.
pub const CATEGORIZATION_VERB: &str = "is-category-of";
/// Fixed verb phrase of partitive fact types.
pub const PARTITIVE_VERB: &str = "is-part-of";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectType {
    pub term: String,
    pub plural: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndividualConcept {
    pub name: String,
    pub instance_of: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FactKind {
    Associative,
    Categorization,
    Partitive,
    /// Unary fact type introduced by a `characteristic` declaration.
    Characteristic,
}

/// Index of a fact type within its [`Vocabulary`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FactId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactType {
    pub kind: FactKind,
    pub subject: String,
    pub verb_phrase: String,
    /// Absent for characteristic (unary) fact types.
    pub object: Option<String>,
    pub is_action: bool,
}

impl FactType {
    /// Subject and object of a binary fact type.
    pub fn roles(&self) -> Option<(&str, &str)> {
        self.object.as_deref().map(|o| (self.subject.as_str(), o))
    }

    pub fn verb_words(&self) -> impl Iterator<Item = &str> {
        self.verb_phrase.split_whitespace()
    }

    /// Fact types that derive an association in the class model.
    pub fn is_relational(&self) -> bool {
        matches!(self.kind, FactKind::Associative | FactKind::Partitive)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeDecl {
    pub owner: String,
    pub name: String,
    pub value_type: ValueType,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacteristicDecl {
    pub owner: String,
    pub adjective: String,
}

/// Cardinality range; `high == None` is unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bounds {
    pub low: u32,
    pub high: Option<u32>,
}

impl Bounds {
    pub const MANY: Bounds = Bounds { low: 0, high: None };

    pub fn is_single(&self) -> bool {
        self.high == Some(1)
    }
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds::MANY
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.high {
            Some(h) => write!(f, "{}..{}", self.low, h),
            None => write!(f, "{}..*", self.low),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityDecl {
    pub fact: FactId,
    /// Objects per subject.
    pub forward: Bounds,
    /// Subjects per object.
    pub reverse: Bounds,
    pub forward_unique: bool,
    pub reverse_unique: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub object_types: Vec<ObjectType>,
    pub individual_concepts: Vec<IndividualConcept>,
    pub fact_types: Vec<FactType>,
    pub attributes: Vec<AttributeDecl>,
    pub characteristics: Vec<CharacteristicDecl>,
    pub multiplicities: Vec<MultiplicityDecl>,
}

/// A vocabulary loading failure, positioned at the offending directive.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum VocabError {
    #[error("{line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{line}:{col}: unknown term `{term}`")]
    UnknownTerm { line: usize, col: usize, term: String },
    #[error("{line}:{col}: no fact type `{fact}`")]
    UnknownFact { line: usize, col: usize, fact: String },
    #[error("{line}:{col}: `{name}` is already declared")]
    Duplicate { line: usize, col: usize, name: String },
}

impl VocabError {
    pub fn code(&self) -> &'static str {
        match self {
            VocabError::Syntax { .. } => "E_SYNTAX",
            VocabError::UnknownTerm { .. } => "E_UNKNOWN_TERM",
            VocabError::UnknownFact { .. } => "E_UNKNOWN_FACT",
            VocabError::Duplicate { .. } => "E_DUPLICATE",
        }
    }

    pub fn position(&self) -> (usize, usize) {
        match self {
            VocabError::Syntax { line, col, .. }
            | VocabError::UnknownTerm { line, col, .. }
            | VocabError::UnknownFact { line, col, .. }
            | VocabError::Duplicate { line, col, .. } => (*line, *col),
        }
    }
}

impl Vocabulary {
    pub fn object_type(&self, term: &str) -> Option<&ObjectType> {
        self.object_types.iter().find(|t| t.term == term)
    }

    /// Match `surface` against singular and plural forms.
    pub fn resolve_term(&self, surface: &str) -> Option<&ObjectType> {
        self.object_types
            .iter()
            .find(|t| t.term == surface || t.plural.as_deref() == Some(surface))
    }

    pub fn fact(&self, id: FactId) -> &FactType {
        &self.fact_types[id.0]
    }

    pub fn facts(&self) -> impl Iterator<Item = (FactId, &FactType)> {
        self.fact_types.iter().enumerate().map(|(i, f)| (FactId(i), f))
    }

    pub fn find_fact(&self, subject: &str, verb_phrase: &str, object: &str) -> Option<FactId> {
        self.facts()
            .find(|(_, f)| {
                f.subject == subject
                    && f.verb_phrase == verb_phrase
                    && f.object.as_deref() == Some(object)
            })
            .map(|(id, _)| id)
    }

    pub fn individual(&self, name: &str) -> Option<&IndividualConcept> {
        self.individual_concepts.iter().find(|i| i.name == name)
    }

    pub fn multiplicity(&self, fact: FactId) -> Option<&MultiplicityDecl> {
        self.multiplicities.iter().find(|m| m.fact == fact)
    }

    /// Direct generalizations of `term` (from categorization fact types).
    pub fn parents(&self, term: &str) -> Vec<&str> {
        self.fact_types
            .iter()
            .filter(|f| f.kind == FactKind::Categorization && f.subject == term)
            .filter_map(|f| f.object.as_deref())
            .collect()
    }

    /// `term` followed by its transitive generalizations, breadth first.
    pub fn ancestors<'a>(&'a self, term: &'a str) -> Vec<&'a str> {
        let mut seen = BTreeSet::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::from([term]);
        while let Some(t) = queue.pop_front() {
            if seen.insert(t) {
                order.push(t);
                queue.extend(self.parents(t));
            }
        }
        order
    }

    /// `sub` is `sup` or transitively specializes it.
    pub fn conforms(&self, sub: &str, sup: &str) -> bool {
        sub == sup || self.ancestors(sub).contains(&sup)
    }

    pub fn related(&self, a: &str, b: &str) -> bool {
        self.conforms(a, b) || self.conforms(b, a)
    }

    /// Attribute named `name` declared on `term` or one of its generalizations.
    pub fn attribute(&self, term: &str, name: &str) -> Option<&AttributeDecl> {
        self.ancestors(term).into_iter().find_map(|owner| {
            self.attributes
                .iter()
                .find(|a| a.owner == owner && a.name == name)
        })
    }

    pub fn characteristic(&self, term: &str, adjective: &str) -> Option<&CharacteristicDecl> {
        self.ancestors(term).into_iter().find_map(|owner| {
            self.characteristics
                .iter()
                .find(|c| c.owner == owner && c.adjective == adjective)
        })
    }

    /// Canonical `.vocab` text; loading it yields an equal vocabulary.
    pub fn to_canonical_text(&self) -> String {
        let mut out = String::new();
        for t in &self.object_types {
            match &t.plural {
                Some(p) => writeln!(out, "term {} plural {}", t.term, p),
                None => writeln!(out, "term {}", t.term),
            }
            .unwrap();
        }
        for i in &self.individual_concepts {
            writeln!(out, "instance {} : {}", i.name, i.instance_of).unwrap();
        }
        let mut characteristics = self.characteristics.iter();
        for f in &self.fact_types {
            match (f.kind, &f.object) {
                (FactKind::Characteristic, _) | (_, None) => {
                    if let Some(c) = characteristics.next() {
                        writeln!(out, "characteristic {} is {}", c.owner, c.adjective).unwrap();
                    }
                }
                (_, Some(object)) => {
                    let action = if f.is_action { " action" } else { "" };
                    writeln!(out, "fact {} {} {}{}", f.subject, f.verb_phrase, object, action)
                        .unwrap();
                }
            }
        }
        for a in &self.attributes {
            writeln!(out, "attribute {} . {} : {}", a.owner, a.name, a.value_type).unwrap();
        }
        for m in &self.multiplicities {
            let f = self.fact(m.fact);
            let object = f.object.as_deref().unwrap_or_default();
            let nonunique = if m.forward_unique { "" } else { " nonunique" };
            writeln!(
                out,
                "multiplicity {} {} {} : {} , {}{}",
                f.subject, f.verb_phrase, object, m.forward, m.reverse, nonunique
            )
            .unwrap();
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BANK: &str = "\
term customer plural customers
term account plural accounts
term savings_account
fact savings_account is-category-of account
fact customer has account
attribute account . balance : Integer
characteristic customer is premium
";

    #[test]
    fn resolves_singular_and_plural() {
        let v = load_vocabulary("term account plural accounts").unwrap();
        assert_eq!(v.resolve_term("account").unwrap().term, "account");
        assert_eq!(v.resolve_term("accounts").unwrap().term, "account");
        assert!(v.resolve_term("ledger").is_none());
    }

    #[test]
    fn inherited_lookups() {
        let v = load_vocabulary(BANK).unwrap();
        assert!(v.conforms("savings_account", "account"));
        assert!(!v.conforms("account", "savings_account"));
        assert!(v.related("account", "savings_account"));
        assert_eq!(
            v.attribute("savings_account", "balance").unwrap().owner,
            "account"
        );
        assert!(v.characteristic("customer", "premium").is_some());
        assert!(v.characteristic("account", "premium").is_none());
    }

    #[test]
    fn canonical_text_round_trips() {
        let v = load_vocabulary(BANK).unwrap();
        let again = load_vocabulary(&v.to_canonical_text()).unwrap();
        assert_eq!(v, again);
    }
}
