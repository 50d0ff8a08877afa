use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Bounds, FactId, FactKind, Vocabulary};
use crate::value::{sanitize_identifier, upper_camel, ValueType};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attribute {
    pub name: String,
    pub value_type: ValueType,
    /// Lowered from a characteristic rather than declared as an attribute.
    pub from_characteristic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    pub class: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Operation {
    pub name: String,
    pub params: Vec<Parameter>,
    pub fact: FactId,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Class {
    pub name: String,
    pub term: String,
    pub attributes: Vec<Attribute>,
    pub operations: Vec<Operation>,
    pub parents: Vec<String>,
}

/// One navigable end of an association, owned by `owner` and reaching `target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssociationEnd {
    pub owner: String,
    pub role: String,
    pub target: String,
    pub bounds: Bounds,
    pub unique: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Association {
    pub fact: FactId,
    /// Derived from a partitive fact type.
    pub composite: bool,
    /// Owned by the subject's class, reaching the object's class.
    pub subject_end: AssociationEnd,
    /// Owned by the object's class, reaching the subject's class.
    pub object_end: AssociationEnd,
}

/// Resolved association end: which association, and whether navigation goes
/// from subject to object (`forward`) or back.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EndRef {
    pub association: usize,
    pub forward: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassModel {
    pub classes: Vec<Class>,
    pub associations: Vec<Association>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ClassModelError {
    #[error("class `{class}` has two members named `{member}`")]
    NameClash { class: String, member: String },
}

impl ClassModelError {
    pub fn code(&self) -> &'static str {
        "E_NAME_CLASH"
    }
}

impl ClassModel {
    pub fn class(&self, name: &str) -> Option<&Class> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn class_of_term(&self, term: &str) -> Option<&Class> {
        self.classes.iter().find(|c| c.term == term)
    }

    /// `name` followed by its transitive parents, breadth first, without repeats.
    pub fn ancestors<'a>(&'a self, name: &'a str) -> Vec<&'a str> {
        let mut order: Vec<&str> = vec![name];
        let mut i = 0;
        while i < order.len() {
            if let Some(c) = self.class(order[i]) {
                for p in &c.parents {
                    if !order.contains(&p.as_str()) {
                        order.push(p);
                    }
                }
            }
            i += 1;
        }
        order
    }

    pub fn conforms(&self, sub: &str, sup: &str) -> bool {
        sub == sup || self.ancestors(sub).contains(&sup)
    }

    pub fn attribute(&self, class: &str, name: &str) -> Option<&Attribute> {
        self.ancestors(class).into_iter().find_map(|c| {
            self.class(c)?
                .attributes
                .iter()
                .find(|a| a.name == name)
        })
    }

    pub fn operation(&self, class: &str, name: &str) -> Option<&Operation> {
        self.ancestors(class).into_iter().find_map(|c| {
            self.class(c)?
                .operations
                .iter()
                .find(|o| o.name == name)
        })
    }

    pub fn end(&self, r: EndRef) -> &AssociationEnd {
        let a = &self.associations[r.association];
        if r.forward {
            &a.subject_end
        } else {
            &a.object_end
        }
    }

    /// Association end named `role`, owned by `class` or inherited.
    pub fn find_end(&self, class: &str, role: &str) -> Option<EndRef> {
        self.ancestors(class).into_iter().find_map(|c| {
            self.associations.iter().enumerate().find_map(|(i, a)| {
                if a.subject_end.owner == c && a.subject_end.role == role {
                    Some(EndRef { association: i, forward: true })
                } else if a.object_end.owner == c && a.object_end.role == role {
                    Some(EndRef { association: i, forward: false })
                } else {
                    None
                }
            })
        })
    }

    /// End navigating `fact` from its subject (`forward`) or its object.
    pub fn end_for_fact(&self, fact: FactId, forward: bool) -> Option<EndRef> {
        self.associations
            .iter()
            .position(|a| a.fact == fact)
            .map(|association| EndRef { association, forward })
    }
}

/// Lower a vocabulary to its class-model view. Classes follow object-type
/// declaration order, members follow their declarations.
pub fn derive_class_model(v: &Vocabulary) -> Result<ClassModel, ClassModelError> {
    let mut classes: Vec<Class> = v
        .object_types
        .iter()
        .map(|t| Class {
            name: upper_camel(&t.term),
            term: t.term.clone(),
            attributes: Vec::new(),
            operations: Vec::new(),
            parents: v.parents(&t.term).into_iter().map(upper_camel).collect(),
        })
        .collect();
    let index: BTreeMap<String, usize> = v
        .object_types
        .iter()
        .enumerate()
        .map(|(i, t)| (t.term.clone(), i))
        .collect();

    for a in &v.attributes {
        classes[index[&a.owner]].attributes.push(Attribute {
            name: a.name.clone(),
            value_type: a.value_type,
            from_characteristic: false,
        });
    }
    for c in &v.characteristics {
        classes[index[&c.owner]].attributes.push(Attribute {
            name: c.adjective.clone(),
            value_type: ValueType::Boolean,
            from_characteristic: true,
        });
    }

    let relational: Vec<(FactId, &str, &str)> = v
        .facts()
        .filter(|(_, f)| f.is_relational())
        .filter_map(|(id, f)| f.roles().map(|(s, o)| (id, s, o)))
        .collect();
    let mut associations = Vec::new();
    for &(id, subject, object) in &relational {
        let fact = v.fact(id);
        let shares_pair = relational.iter().any(|&(other, s, o)| {
            other != id && v.related(s, subject) && v.related(o, object)
        });
        let role = |term: &str| {
            if shares_pair {
                format!("{term}_{}", sanitize_identifier(&fact.verb_phrase))
            } else {
                term.to_string()
            }
        };
        let mult = v.multiplicity(id);
        let subject_class = upper_camel(subject);
        let object_class = upper_camel(object);
        associations.push(Association {
            fact: id,
            composite: fact.kind == FactKind::Partitive,
            subject_end: AssociationEnd {
                owner: subject_class.clone(),
                role: role(object),
                target: object_class.clone(),
                bounds: mult.map(|m| m.forward).unwrap_or_default(),
                unique: mult.is_none_or(|m| m.forward_unique),
            },
            object_end: AssociationEnd {
                owner: object_class.clone(),
                role: role(subject),
                target: subject_class.clone(),
                bounds: mult.map(|m| m.reverse).unwrap_or_default(),
                unique: mult.is_none_or(|m| m.reverse_unique),
            },
        });
        if fact.is_action {
            classes[index[subject]].operations.push(Operation {
                name: sanitize_identifier(&fact.verb_phrase),
                params: vec![Parameter {
                    name: object.to_string(),
                    class: object_class,
                }],
                fact: id,
            });
        }
    }

    let model = ClassModel {
        classes,
        associations,
    };
    check_member_names(&model)?;
    Ok(model)
}

/// Every class, together with everything it inherits, must expose each member
/// name at most once.
fn check_member_names(model: &ClassModel) -> Result<(), ClassModelError> {
    // (owner class, member name) declared in that class
    let mut own: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for c in &model.classes {
        let names = own.entry(&c.name).or_default();
        names.extend(c.attributes.iter().map(|a| a.name.as_str()));
        names.extend(c.operations.iter().map(|o| o.name.as_str()));
    }
    for a in &model.associations {
        for end in [&a.subject_end, &a.object_end] {
            own.entry(&end.owner).or_default().push(&end.role);
        }
    }
    for c in &model.classes {
        let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
        for ancestor in model.ancestors(&c.name) {
            for &member in own.get(ancestor).map(Vec::as_slice).unwrap_or_default() {
                if seen.insert(member, ancestor).is_some() {
                    return Err(ClassModelError::NameClash {
                        class: c.name.clone(),
                        member: member.to_string(),
                    });
                }
            }
        }
    }
    Ok(())
}
