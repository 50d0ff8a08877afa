use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::value::{CmpOp, Literal};
use crate::vocabulary::{AttributeDecl, CharacteristicDecl, FactId, Vocabulary};

/// Variable bound by a quantification. Numbered per rule from zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarId(pub u32);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => f.write_str("x"),
            1 => f.write_str("y"),
            2 => f.write_str("z"),
            3 => f.write_str("w"),
            n => write!(f, "v{n}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Modality {
    Necessity,
    Impossibility,
    Obligation,
    Prohibition,
}

impl Modality {
    pub const ALL: [Modality; 4] = [
        Modality::Necessity,
        Modality::Impossibility,
        Modality::Obligation,
        Modality::Prohibition,
    ];

    /// Impossibility and prohibition assert the negation of their body.
    pub fn is_negative(self) -> bool {
        matches!(self, Modality::Impossibility | Modality::Prohibition)
    }

    pub fn name(self) -> &'static str {
        match self {
            Modality::Necessity => "necessity",
            Modality::Impossibility => "impossibility",
            Modality::Obligation => "obligation",
            Modality::Prohibition => "prohibition",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleClass {
    Structural,
    Operative,
}

/// Quantifier of a quantification; counting kinds carry their bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantifier {
    Universal,
    Existential,
    AtLeast(u32),
    AtMost(u32),
    Exactly(u32),
    MoreThan(u32),
    /// "no": none of the objects satisfy the scope.
    None,
}

impl Quantifier {
    pub fn count(self) -> Option<u32> {
        match self {
            Quantifier::AtLeast(n)
            | Quantifier::AtMost(n)
            | Quantifier::Exactly(n)
            | Quantifier::MoreThan(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_counting(self) -> bool {
        self.count().is_some()
    }

    /// Whether `matching` objects satisfying the scope out of `total` make
    /// the quantification true.
    pub fn holds(self, matching: usize, total: usize) -> bool {
        let m = matching as u64;
        match self {
            Quantifier::Universal => matching == total,
            Quantifier::Existential => matching > 0,
            Quantifier::AtLeast(n) => m >= n as u64,
            Quantifier::AtMost(n) => m <= n as u64,
            Quantifier::Exactly(n) => m == n as u64,
            Quantifier::MoreThan(n) => m > n as u64,
            Quantifier::None => matching == 0,
        }
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantifier::Universal => f.write_str("forall"),
            Quantifier::Existential => f.write_str("exists"),
            Quantifier::AtLeast(n) => write!(f, "at-least {n}"),
            Quantifier::AtMost(n) => write!(f, "at-most {n}"),
            Quantifier::Exactly(n) => write!(f, "exactly {n}"),
            Quantifier::MoreThan(n) => write!(f, "more-than {n}"),
            Quantifier::None => f.write_str("no"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProjectionKind {
    Set,
    Bag,
    Closed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arg {
    Var(VarId),
    Individual(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Formulation {
    Quantification {
        quantifier: Quantifier,
        variable: VarId,
        /// Term of the object type ranged over.
        over: String,
        scope: Box<Formulation>,
    },
    Atomic {
        fact: FactId,
        args: Vec<Arg>,
    },
    CharacteristicTest {
        variable: VarId,
        characteristic: CharacteristicDecl,
    },
    AttrComparison {
        variable: VarId,
        attribute: AttributeDecl,
        op: CmpOp,
        literal: Literal,
    },
    Not(Box<Formulation>),
    And(Box<Formulation>, Box<Formulation>),
    Or(Box<Formulation>, Box<Formulation>),
    Implies(Box<Formulation>, Box<Formulation>),
    Projection {
        kind: ProjectionKind,
        inner: Box<Formulation>,
    },
}

impl Formulation {
    pub fn quantification(
        quantifier: Quantifier,
        variable: VarId,
        over: impl Into<String>,
        scope: Formulation,
    ) -> Self {
        Formulation::Quantification {
            quantifier,
            variable,
            over: over.into(),
            scope: Box::new(scope),
        }
    }

    pub fn atomic(fact: FactId, args: impl IntoIterator<Item = VarId>) -> Self {
        Formulation::Atomic {
            fact,
            args: args.into_iter().map(Arg::Var).collect(),
        }
    }

    pub fn negate(inner: Formulation) -> Self {
        Formulation::Not(Box::new(inner))
    }

    pub fn and(l: Formulation, r: Formulation) -> Self {
        Formulation::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formulation, r: Formulation) -> Self {
        Formulation::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formulation, r: Formulation) -> Self {
        Formulation::Implies(Box::new(l), Box::new(r))
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Formulation)) {
        visit(self);
        match self {
            Formulation::Quantification { scope, .. } => scope.walk(visit),
            Formulation::Not(inner) | Formulation::Projection { inner, .. } => inner.walk(visit),
            Formulation::And(l, r) | Formulation::Or(l, r) | Formulation::Implies(l, r) => {
                l.walk(visit);
                r.walk(visit);
            }
            Formulation::Atomic { .. }
            | Formulation::CharacteristicTest { .. }
            | Formulation::AttrComparison { .. } => {}
        }
    }

    fn write_dump(&self, v: &Vocabulary, out: &mut String) {
        match self {
            Formulation::Quantification {
                quantifier,
                variable,
                over,
                scope,
            } => {
                write!(out, "({quantifier} {variable}:{over} ").unwrap();
                scope.write_dump(v, out);
                out.push(')');
            }
            Formulation::Atomic { fact, args } => {
                let verb = v
                    .fact_types
                    .get(fact.0)
                    .map(|f| f.verb_phrase.replace(' ', "_"))
                    .unwrap_or_else(|| format!("fact{}", fact.0));
                write!(out, "({verb}").unwrap();
                for a in args {
                    match a {
                        Arg::Var(x) => write!(out, " {x}").unwrap(),
                        Arg::Individual(name) => write!(out, " \"{name}\"").unwrap(),
                    }
                }
                out.push(')');
            }
            Formulation::CharacteristicTest {
                variable,
                characteristic,
            } => write!(out, "({} {variable})", characteristic.adjective).unwrap(),
            Formulation::AttrComparison {
                variable,
                attribute,
                op,
                literal,
            } => write!(out, "({} ({} {variable}) {literal})", op.symbol(), attribute.name).unwrap(),
            Formulation::Not(inner) => {
                out.push_str("(not ");
                inner.write_dump(v, out);
                out.push(')');
            }
            Formulation::And(l, r) | Formulation::Or(l, r) | Formulation::Implies(l, r) => {
                let op = match self {
                    Formulation::And(..) => "and",
                    Formulation::Or(..) => "or",
                    _ => "implies",
                };
                write!(out, "({op} ").unwrap();
                l.write_dump(v, out);
                out.push(' ');
                r.write_dump(v, out);
                out.push(')');
            }
            Formulation::Projection { kind, inner } => {
                let k = match kind {
                    ProjectionKind::Set => "set",
                    ProjectionKind::Bag => "bag",
                    ProjectionKind::Closed => "closed",
                };
                write!(out, "({k} ").unwrap();
                inner.write_dump(v, out);
                out.push(')');
            }
        }
    }
}

/// Position of a rule's sentence in its source: 1-based line and column of
/// the first token, and the sentence length in characters through the period.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpan {
    pub line: usize,
    pub col: usize,
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SbvrRule {
    pub index: u32,
    pub modality: Modality,
    pub body: Formulation,
    pub span: SourceSpan,
}

impl SbvrRule {
    /// Deterministic prefix-notation dump, one line, e.g.
    /// `rule 1 necessity (forall x:customer (exists y:account (has x y)))`.
    pub fn dump(&self, v: &Vocabulary) -> String {
        let mut out = format!("rule {} {} ", self.index, self.modality.name());
        self.body.write_dump(v, &mut out);
        out
    }
}

pub fn classify_rule(r: &SbvrRule) -> RuleClass {
    match r.modality {
        Modality::Necessity | Modality::Impossibility => RuleClass::Structural,
        Modality::Obligation | Modality::Prohibition => RuleClass::Operative,
    }
}

/// A rule construct with no OCL counterpart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureViolation {
    pub rule_index: u32,
    pub code: &'static str,
    pub description: String,
}

/// Report every closed projection and every individual-concept argument in `r`.
pub fn check_supported(r: &SbvrRule) -> Vec<FeatureViolation> {
    let mut out = Vec::new();
    r.body.walk(&mut |f| match f {
        Formulation::Projection {
            kind: ProjectionKind::Closed,
            ..
        } => out.push(FeatureViolation {
            rule_index: r.index,
            code: "E_CLOSED_PROJECTION",
            description: format!("rule {}: closed projections have no OCL collection counterpart", r.index),
        }),
        Formulation::Atomic { args, .. } => {
            for a in args {
                if let Arg::Individual(name) = a {
                    out.push(FeatureViolation {
                        rule_index: r.index,
                        code: "E_INDIVIDUAL_CONCEPT",
                        description: format!(
                            "rule {}: individual concept `{name}` cannot be expressed in the OCL subset",
                            r.index
                        ),
                    });
                }
            }
        }
        _ => {}
    });
    out
}

/// Variables bound by some quantification in `f`, and variables used
/// outside any quantification that binds them.
pub fn free_and_bound_vars(f: &Formulation) -> (BTreeSet<VarId>, BTreeSet<VarId>) {
    fn go(
        f: &Formulation,
        scope: &mut Vec<VarId>,
        bound: &mut BTreeSet<VarId>,
        free: &mut BTreeSet<VarId>,
    ) {
        let mut use_var = |x: VarId, scope: &Vec<VarId>| {
            if !scope.contains(&x) {
                free.insert(x);
            }
        };
        match f {
            Formulation::Quantification {
                variable, scope: body, ..
            } => {
                bound.insert(*variable);
                scope.push(*variable);
                go(body, scope, bound, free);
                scope.pop();
            }
            Formulation::Atomic { args, .. } => {
                for a in args {
                    if let Arg::Var(x) = a {
                        use_var(*x, scope);
                    }
                }
            }
            Formulation::CharacteristicTest { variable, .. }
            | Formulation::AttrComparison { variable, .. } => use_var(*variable, scope),
            Formulation::Not(inner) | Formulation::Projection { inner, .. } => {
                go(inner, scope, bound, free)
            }
            Formulation::And(l, r) | Formulation::Or(l, r) | Formulation::Implies(l, r) => {
                go(l, scope, bound, free);
                go(r, scope, bound, free);
            }
        }
    }
    let mut bound = BTreeSet::new();
    let mut free = BTreeSet::new();
    go(f, &mut Vec::new(), &mut bound, &mut free);
    (bound, free)
}
