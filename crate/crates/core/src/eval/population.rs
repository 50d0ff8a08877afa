use std::collections::HashMap;

use super::snapshot::{AttrEntry, Link, SnapObject, Snapshot};
use super::EvalError;
use crate::value::{Literal, ValueType};
use crate::vocabulary::{ClassModel, FactId};

/// Index-based view of a class model used by the evaluators.
#[derive(Clone, Debug)]
pub struct Schema {
    pub(crate) class_names: Vec<String>,
    class_terms: Vec<String>,
    /// `conforms[sub][sup]`
    conforms: Vec<Vec<bool>>,
    pub(crate) slots: Vec<String>,
    /// Attribute slots of each class, inherited ones included.
    pub(crate) class_attrs: Vec<Vec<(usize, ValueType)>>,
    pub(crate) facts: Vec<FactId>,
    /// Subject and object class of each fact slot.
    pub(crate) fact_classes: Vec<(usize, usize)>,
}

impl Schema {
    pub fn new(m: &ClassModel) -> Self {
        let class_names: Vec<String> = m.classes.iter().map(|c| c.name.clone()).collect();
        let idx = |name: &str| class_names.iter().position(|c| c == name).expect("class in model");
        let conforms = class_names
            .iter()
            .map(|sub| class_names.iter().map(|sup| m.conforms(sub, sup)).collect())
            .collect();
        let mut slots: Vec<String> = Vec::new();
        let mut class_attrs = Vec::new();
        for c in &m.classes {
            let mut attrs = Vec::new();
            for anc in m.ancestors(&c.name) {
                for a in &m.class(anc).expect("ancestor in model").attributes {
                    let slot = match slots.iter().position(|s| *s == a.name) {
                        Some(s) => s,
                        None => {
                            slots.push(a.name.clone());
                            slots.len() - 1
                        }
                    };
                    attrs.push((slot, a.value_type));
                }
            }
            class_attrs.push(attrs);
        }
        let facts = m.associations.iter().map(|a| a.fact).collect();
        let fact_classes = m
            .associations
            .iter()
            .map(|a| (idx(&a.subject_end.owner), idx(&a.subject_end.target)))
            .collect();
        Schema {
            class_terms: m.classes.iter().map(|c| c.term.clone()).collect(),
            class_names,
            conforms,
            slots,
            class_attrs,
            facts,
            fact_classes,
        }
    }

    pub fn class_index(&self, name: &str) -> Option<usize> {
        self.class_names.iter().position(|c| c == name)
    }

    pub fn class_of_term(&self, term: &str) -> Option<usize> {
        self.class_terms.iter().position(|t| t == term)
    }

    pub(crate) fn term(&self, class: usize) -> &str {
        &self.class_terms[class]
    }

    pub fn conforms(&self, sub: usize, sup: usize) -> bool {
        self.conforms[sub][sup]
    }

    pub fn slot(&self, attr: &str) -> Option<usize> {
        self.slots.iter().position(|s| s == attr)
    }

    pub fn fact_slot(&self, fact: FactId) -> Option<usize> {
        self.facts.iter().position(|f| *f == fact)
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }
}

/// A snapshot indexed for evaluation: objects are numbered, attribute values
/// sit in a dense table and links in adjacency lists.
#[derive(Clone, Debug)]
pub struct Population {
    pub ids: Vec<String>,
    pub class_of: Vec<usize>,
    /// Objects conforming to each class, in object order.
    members: Vec<Vec<u32>>,
    n_slots: usize,
    values: Vec<Option<Literal>>,
    /// `links[fact][0][s]` lists objects linked from `s`; `[1]` goes back.
    links: Vec<[Vec<Vec<u32>>; 2]>,
}

impl Population {
    pub fn with_objects(schema: &Schema, ids: Vec<String>, class_of: Vec<usize>) -> Self {
        let n = ids.len();
        let members = (0..schema.class_count())
            .map(|c| (0..n as u32).filter(|&o| schema.conforms(class_of[o as usize], c)).collect())
            .collect();
        Population {
            ids,
            class_of,
            members,
            n_slots: schema.slots.len(),
            values: vec![None; n * schema.slots.len()],
            links: schema.facts.iter().map(|_| [vec![Vec::new(); n], vec![Vec::new(); n]]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn members(&self, class: usize) -> &[u32] {
        &self.members[class]
    }

    pub fn value(&self, obj: u32, slot: usize) -> Option<&Literal> {
        self.values[obj as usize * self.n_slots + slot].as_ref()
    }

    pub fn set_value(&mut self, obj: u32, slot: usize, value: Option<Literal>) {
        self.values[obj as usize * self.n_slots + slot] = value;
    }

    pub fn clear_links(&mut self, fact: usize) {
        for dir in self.links[fact].iter_mut() {
            for l in dir.iter_mut() {
                l.clear();
            }
        }
    }

    pub fn add_link(&mut self, fact: usize, s: u32, o: u32) {
        let [fwd, rev] = &mut self.links[fact];
        if !fwd[s as usize].contains(&o) {
            fwd[s as usize].push(o);
            rev[o as usize].push(s);
        }
    }

    pub fn has_link(&self, fact: usize, s: u32, o: u32) -> bool {
        self.links[fact][0][s as usize].contains(&o)
    }

    /// Objects reached from `obj` through `fact`, forward or backward.
    pub fn targets(&self, fact: usize, forward: bool, obj: u32) -> &[u32] {
        &self.links[fact][usize::from(!forward)][obj as usize]
    }

    pub fn find(&self, id: &str) -> Option<u32> {
        self.ids.iter().position(|i| i == id).map(|i| i as u32)
    }

    pub fn from_snapshot(s: &Snapshot, schema: &Schema) -> Result<Self, EvalError> {
        let class_of = s
            .objects
            .iter()
            .map(|o| schema.class_index(&o.class).ok_or_else(|| EvalError::ClassUnknown(o.class.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let ids: Vec<String> = s.objects.iter().map(|o| o.id.clone()).collect();
        let mut p = Population::with_objects(schema, ids, class_of);
        let index: HashMap<&str, u32> = s.objects.iter().enumerate().map(|(i, o)| (o.id.as_str(), i as u32)).collect();
        let obj = |id: &str| index.get(id).copied().ok_or_else(|| EvalError::UnknownObject(id.to_string()));
        for a in &s.attr_values {
            let o = obj(&a.object)?;
            let slot = schema
                .class_attrs[p.class_of[o as usize]]
                .iter()
                .map(|(slot, _)| *slot)
                .find(|&slot| schema.slots[slot] == a.attr)
                .ok_or_else(|| EvalError::Model(format!("object `{}` has no attribute `{}`", a.object, a.attr)))?;
            p.set_value(o, slot, a.value.clone());
        }
        for l in &s.links {
            let fact = schema
                .fact_slot(l.fact)
                .ok_or_else(|| EvalError::Model(format!("fact type {} has no association", l.fact.0)))?;
            p.add_link(fact, obj(&l.subject)?, obj(&l.object)?);
        }
        Ok(p)
    }

    /// Back to a plain snapshot, listing every attribute slot (missing ones
    /// as `None`).
    pub fn to_snapshot(&self, schema: &Schema) -> Snapshot {
        let objects = self
            .ids
            .iter()
            .zip(&self.class_of)
            .map(|(id, &c)| SnapObject { id: id.clone(), class: schema.class_names[c].clone() })
            .collect();
        let mut attr_values = Vec::new();
        for (o, &c) in self.class_of.iter().enumerate() {
            for &(slot, _) in &schema.class_attrs[c] {
                attr_values.push(AttrEntry {
                    object: self.ids[o].clone(),
                    attr: schema.slots[slot].clone(),
                    value: self.value(o as u32, slot).cloned(),
                });
            }
        }
        let mut links = Vec::new();
        for (f, fact) in schema.facts.iter().enumerate() {
            for s in 0..self.len() as u32 {
                for &o in self.targets(f, true, s) {
                    links.push(Link {
                        fact: *fact,
                        subject: self.ids[s as usize].clone(),
                        object: self.ids[o as usize].clone(),
                    });
                }
            }
        }
        Snapshot { objects, attr_values, links }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::load_snapshot;
    use crate::vocabulary::{derive_class_model, load_vocabulary};

    #[test]
    fn snapshot_round_trip_and_subtype_membership() {
        let v = load_vocabulary(
            "term customer\nterm vip\nterm account\nfact vip is-category-of customer\n\
             fact customer has account\nattribute customer . age : Integer\n",
        )
        .unwrap();
        let m = derive_class_model(&v).unwrap();
        let schema = Schema::new(&m);
        let s = load_snapshot(
            "object c1 : customer\nobject v1 : vip\nobject a1 : account\nattr v1 . age = 4\nlink v1 has a1\n",
            &v,
            &m,
        )
        .unwrap();
        let p = Population::from_snapshot(&s, &schema).unwrap();
        let customer = schema.class_index("Customer").unwrap();
        let vip = schema.class_index("Vip").unwrap();
        assert_eq!(p.members(customer), [0, 1]);
        assert_eq!(p.members(vip), [1]);
        assert_eq!(p.targets(0, true, 1), [2]);
        assert_eq!(p.targets(0, false, 2), [1]);
        assert_eq!(p.value(1, schema.slot("age").unwrap()), Some(&Literal::Integer(4)));
        let back = p.to_snapshot(&schema);
        assert_eq!(back.links, s.links);
        assert_eq!(back.attr_values.len(), 2);
        assert_eq!(Population::from_snapshot(&back, &schema).unwrap().to_snapshot(&schema), back);

        let bad = Snapshot { objects: vec![SnapObject { id: "x".into(), class: "Bank".into() }], ..Default::default() };
        assert_eq!(Population::from_snapshot(&bad, &schema).unwrap_err().code(), "E_CLASS_UNKNOWN");
    }
}
