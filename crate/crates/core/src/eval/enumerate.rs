use super::population::{Population, Schema};
use super::snapshot::Snapshot;
use super::EvalError;
use crate::value::{Literal, ValueType};
use crate::vocabulary::ClassModel;

pub const DEFAULT_CAP: u128 = 10_000_000;

/// Finite value sets that attributes range over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttrDomain {
    pub integers: Vec<i64>,
    pub strings: Vec<String>,
    pub booleans: Vec<bool>,
}

impl Default for AttrDomain {
    fn default() -> Self {
        AttrDomain {
            integers: vec![0, 1, 2],
            strings: vec!["a".into(), "b".into()],
            booleans: vec![false, true],
        }
    }
}

impl AttrDomain {
    fn values(&self, t: ValueType, include_missing: bool) -> Vec<Option<Literal>> {
        let mut out: Vec<Option<Literal>> = match t {
            ValueType::Integer => self.integers.iter().map(|&n| Some(Literal::Integer(n))).collect(),
            ValueType::String => self.strings.iter().map(|s| Some(Literal::String(s.clone()))).collect(),
            ValueType::Boolean => self.booleans.iter().map(|&b| Some(Literal::Boolean(b))).collect(),
        };
        if include_missing {
            out.push(None);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumConfig {
    pub max_per_class: u32,
    pub domain: AttrDomain,
    pub include_missing: bool,
    pub cap: u128,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig { max_per_class: 2, domain: AttrDomain::default(), include_missing: false, cap: DEFAULT_CAP }
    }
}

/// Object count vectors in enumeration order: the last class varies fastest.
fn count_vectors(classes: usize, max: u32) -> impl Iterator<Item = Vec<u32>> {
    let mut next = Some(vec![0u32; classes]);
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        let mut i = classes;
        while i > 0 {
            i -= 1;
            if succ[i] < max {
                succ[i] += 1;
                next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(current)
    })
}

fn conforming(schema: &Schema, counts: &[u32], class: usize) -> u32 {
    (0..counts.len()).filter(|&c| schema.conforms(c, class)).map(|c| counts[c]).sum()
}

fn saturating_pow2(n: u32) -> u128 {
    if n >= 127 {
        u128::MAX
    } else {
        1u128 << n
    }
}

/// Number of snapshots `enumerate_snapshots` yields, saturating at `u128::MAX`.
pub fn count_snapshots(schema: &Schema, cfg: &EnumConfig) -> u128 {
    let size = |t| cfg.domain.values(t, cfg.include_missing).len() as u128;
    let mut total: u128 = 0;
    for counts in count_vectors(schema.class_count(), cfg.max_per_class) {
        let mut n: u128 = 1;
        for (c, &k) in counts.iter().enumerate() {
            for &(_, t) in &schema.class_attrs[c] {
                n = n.saturating_mul(size(t).saturating_pow(k));
            }
        }
        for &(s, o) in &schema.fact_classes {
            n = n.saturating_mul(saturating_pow2(conforming(schema, &counts, s) * conforming(schema, &counts, o)));
        }
        total = total.saturating_add(n);
    }
    total
}

/// Walks every population within the bounds, reusing one buffer. Object ids
/// are the term followed by a 1-based counter (`customer1`).
pub struct Enumerator {
    schema: Schema,
    domains: [Vec<Option<Literal>>; 3],
    counts: Vec<Vec<u32>>,
    next_counts: usize,
    /// `(object, slot, domain index)` per attribute cell, with its digit.
    cells: Vec<(u32, usize, usize)>,
    digits: Vec<usize>,
    pairs: Vec<Vec<(u32, u32)>>,
    masks: Vec<u64>,
    pop: Option<Population>,
    fresh: bool,
}

fn domain_index(t: ValueType) -> usize {
    match t {
        ValueType::Integer => 0,
        ValueType::String => 1,
        ValueType::Boolean => 2,
    }
}

impl Enumerator {
    pub fn new(schema: &Schema, cfg: &EnumConfig) -> Result<Self, EvalError> {
        if cfg.max_per_class > 3 {
            return Err(EvalError::BadBound(cfg.max_per_class));
        }
        let count = count_snapshots(schema, cfg);
        if count > cfg.cap {
            return Err(EvalError::TooLarge { count, cap: cfg.cap });
        }
        let d = |t| cfg.domain.values(t, cfg.include_missing);
        Ok(Enumerator {
            schema: schema.clone(),
            domains: [d(ValueType::Integer), d(ValueType::String), d(ValueType::Boolean)],
            counts: count_vectors(schema.class_count(), cfg.max_per_class).collect(),
            next_counts: 0,
            cells: Vec::new(),
            digits: Vec::new(),
            pairs: Vec::new(),
            masks: Vec::new(),
            pop: None,
            fresh: false,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    /// Set up the first population for the next object count vector.
    fn layout(&mut self) -> bool {
        let Some(counts) = self.counts.get(self.next_counts) else { return false };
        self.next_counts += 1;
        let schema = &self.schema;
        let mut ids = Vec::new();
        let mut class_of = Vec::new();
        for (c, &k) in counts.iter().enumerate() {
            for i in 1..=k {
                ids.push(format!("{}{i}", schema.term(c)));
                class_of.push(c);
            }
        }
        let mut pop = Population::with_objects(schema, ids, class_of.clone());
        self.cells.clear();
        for (o, &c) in class_of.iter().enumerate() {
            for &(slot, t) in &schema.class_attrs[c] {
                let d = domain_index(t);
                pop.set_value(o as u32, slot, self.domains[d][0].clone());
                self.cells.push((o as u32, slot, d));
            }
        }
        self.digits = vec![0; self.cells.len()];
        self.pairs = schema
            .fact_classes
            .iter()
            .map(|&(s, o)| {
                let subjects = pop.members(s).to_vec();
                let objects = pop.members(o);
                subjects.iter().flat_map(|&a| objects.iter().map(move |&b| (a, b))).collect()
            })
            .collect();
        self.masks = vec![0; self.pairs.len()];
        self.pop = Some(pop);
        true
    }

    fn set_links(&mut self, fact: usize) {
        let pop = self.pop.as_mut().expect("laid out");
        pop.clear_links(fact);
        let mask = self.masks[fact];
        for (i, &(s, o)) in self.pairs[fact].iter().enumerate() {
            if mask >> i & 1 == 1 {
                pop.add_link(fact, s, o);
            }
        }
    }

    /// Step the innermost odometer: links vary fastest, then attribute values.
    fn step(&mut self) -> bool {
        for f in (0..self.masks.len()).rev() {
            let limit = 1u64 << self.pairs[f].len();
            self.masks[f] += 1;
            let carry = self.masks[f] == limit;
            if carry {
                self.masks[f] = 0;
            }
            self.set_links(f);
            if !carry {
                return true;
            }
        }
        for i in (0..self.cells.len()).rev() {
            let (o, slot, d) = self.cells[i];
            self.digits[i] += 1;
            let carry = self.digits[i] == self.domains[d].len();
            if carry {
                self.digits[i] = 0;
            }
            let value = self.domains[d][self.digits[i]].clone();
            self.pop.as_mut().expect("laid out").set_value(o, slot, value);
            if !carry {
                return true;
            }
        }
        false
    }

    /// The next population, or `None` when exhausted.
    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Option<&Population> {
        let advanced = self.fresh && self.step();
        if !advanced && !self.layout() {
            return None;
        }
        self.fresh = true;
        self.pop.as_ref()
    }
}

/// Every snapshot within the bounds, in a deterministic order.
pub fn enumerate_snapshots(m: &ClassModel, cfg: &EnumConfig) -> Result<impl Iterator<Item = Snapshot>, EvalError> {
    let mut e = Enumerator::new(&Schema::new(m), cfg)?;
    Ok(std::iter::from_fn(move || {
        let pop = e.next()?.clone();
        Some(pop.to_snapshot(e.schema()))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocabulary::{derive_class_model, load_vocabulary};

    fn model(src: &str) -> ClassModel {
        derive_class_model(&load_vocabulary(src).unwrap()).unwrap()
    }

    fn cfg(max: u32) -> EnumConfig {
        EnumConfig { max_per_class: max, ..Default::default() }
    }

    #[test]
    fn two_classes_one_fact() {
        let m = model("term customer\nterm account\nfact customer has account");
        let snaps: Vec<Snapshot> = enumerate_snapshots(&m, &cfg(1)).unwrap().collect();
        // {} {a} {c} {c,a} {c,a,link}
        assert_eq!(snaps.len(), 5);
        assert_eq!(count_snapshots(&Schema::new(&m), &cfg(1)), 5);
        assert_eq!(snaps[4].links.len(), 1);
        assert_eq!(snaps[4].objects[0].id, "customer1");
        let distinct: std::collections::HashSet<_> = snaps.iter().collect();
        assert_eq!(distinct.len(), 5);
    }

    #[test]
    fn zero_bound_gives_the_empty_snapshot() {
        let m = model("term customer\nterm account\nfact customer has account\nattribute account . n : Integer");
        let snaps: Vec<Snapshot> = enumerate_snapshots(&m, &cfg(0)).unwrap().collect();
        assert_eq!(snaps, [Snapshot::default()]);
    }

    #[test]
    fn cap_and_bound() {
        let m = model("term customer\nterm account\nfact customer has account");
        let small = EnumConfig { cap: 10, ..cfg(3) };
        assert_eq!(enumerate_snapshots(&m, &small).err().unwrap().code(), "E_TOO_LARGE");
        assert_eq!(enumerate_snapshots(&m, &cfg(4)).err().unwrap().code(), "E_BAD_BOUND");
    }

    #[test]
    fn stream_length_matches_formula() {
        let src = "term customer\nterm vip\nterm account\nfact vip is-category-of customer\n\
                   fact customer has account\nattribute account . balance : Integer\n\
                   characteristic customer is premium\nattribute vip . code : String";
        let m = model(src);
        let schema = Schema::new(&m);
        for (max, missing) in [(1, false), (1, true), (2, false)] {
            let c = EnumConfig { include_missing: missing, ..cfg(max) };
            let mut e = Enumerator::new(&schema, &c).unwrap();
            let mut n = 0u128;
            let mut seen = std::collections::HashSet::new();
            while let Some(p) = e.next() {
                n += 1;
                if n < 5000 {
                    assert!(seen.insert(p.to_snapshot(&schema)));
                }
            }
            assert_eq!(n, count_snapshots(&schema, &c));
        }
        // one vip: premium (2) x code (2); one account: balance (3); vip-account link: 2
        let one = EnumConfig { max_per_class: 1, ..Default::default() };
        assert!(count_snapshots(&schema, &one) > 24);
    }

    #[test]
    fn missing_values_appear_only_when_requested() {
        let m = model("term account\nattribute account . balance : Integer");
        let with: Vec<Snapshot> = enumerate_snapshots(&m, &EnumConfig { include_missing: true, ..cfg(1) }).unwrap().collect();
        assert_eq!(with.len(), 1 + 4);
        assert!(with.iter().any(|s| s.attr_values.iter().any(|a| a.value.is_none())));
        let without: Vec<Snapshot> = enumerate_snapshots(&m, &cfg(1)).unwrap().collect();
        assert!(without.iter().all(|s| s.attr_values.iter().all(|a| a.value.is_some())));
    }
}
