//! SBVR rule to OCL constraint mapping.
//!
//! Invariants take their context from a quantifier that ranges over every
//! instance of its type in effect: a positive `each`, a positive `no`, or an
//! existential under negation. That quantifier is replaced by `self`. Other
//! quantifiers become navigations from an already bound variable where the
//! fact type allows it, and `allInstances()` iterations otherwise.

use std::fmt;

use serde::Serialize;

use crate::ocl::{CollOpKind, ConstraintKind, IterKind, OclCmp, OclConstraint, OclExpr, OperationRef};
use crate::sbvr::{check_supported, classify_rule, Arg, Formulation, ProjectionKind, Quantifier, RuleClass, SbvrRule, VarId};
use crate::vocabulary::{ClassModel, FactId, Vocabulary};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MapIssue {
    pub code: &'static str,
    pub message: String,
}

impl MapIssue {
    fn new(code: &'static str, message: impl Into<String>) -> Self {
        MapIssue { code, message: message.into() }
    }
}

impl fmt::Display for MapIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

/// Exactly one of `constraint` and a non-empty `errors` is present.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MapResult {
    pub constraint: Option<OclConstraint>,
    pub warnings: Vec<MapIssue>,
    pub errors: Vec<MapIssue>,
}

impl MapResult {
    fn failed(errors: Vec<MapIssue>, warnings: Vec<MapIssue>) -> Self {
        MapResult { constraint: None, warnings, errors }
    }
}

/// Variable bindings in scope while mapping a formulation.
pub struct MapEnv<'a> {
    pub vocab: &'a Vocabulary,
    pub model: &'a ClassModel,
    bindings: Vec<(VarId, OclExpr, String)>,
    names: Vec<String>,
}

impl<'a> MapEnv<'a> {
    pub fn new(vocab: &'a Vocabulary, model: &'a ClassModel) -> Self {
        MapEnv {
            vocab,
            model,
            bindings: Vec::new(),
            names: Vec::new(),
        }
    }

    /// Bind `var` (ranging over `term`) to `expr`.
    pub fn bind(&mut self, var: VarId, expr: OclExpr, term: &str) {
        if let OclExpr::VarRef { name } = &expr {
            self.names.push(name.clone());
        }
        self.bindings.push((var, expr, term.to_string()));
    }

    fn lookup(&self, var: VarId) -> Option<&(VarId, OclExpr, String)> {
        self.bindings.iter().rev().find(|(v, _, _)| *v == var)
    }

    fn is_bound(&self, var: VarId) -> bool {
        self.lookup(var).is_some()
    }

    fn expr_of(&self, var: VarId) -> Result<OclExpr, MapIssue> {
        self.lookup(var)
            .map(|(_, e, _)| e.clone())
            .ok_or_else(|| MapIssue::new("E_NO_CONTEXT", format!("variable {var} is not bound")))
    }

    /// First letter of `term`, numbered on clashes with names in scope.
    fn fresh_name(&self, term: &str) -> String {
        let base: String = term.chars().take(1).flat_map(char::to_lowercase).collect();
        let base = if base.is_empty() { "v".to_string() } else { base };
        let mut k = 1;
        loop {
            let name = if k == 1 { base.clone() } else { format!("{base}{k}") };
            if !self.names.contains(&name) {
                return name;
            }
            k += 1;
        }
    }

    fn class_name(&self, term: &str) -> Result<String, MapIssue> {
        self.model
            .class_of_term(term)
            .map(|c| c.name.clone())
            .ok_or_else(|| MapIssue::new("E_NO_CONTEXT", format!("no class for term `{term}`")))
    }

    fn with_var<T>(&mut self, var: VarId, term: &str, f: impl FnOnce(&mut Self, String) -> T) -> T {
        let name = self.fresh_name(term);
        self.bind(var, OclExpr::var(name.clone()), term);
        let out = f(self, name);
        self.bindings.pop();
        self.names.pop();
        out
    }

    /// Role of the end reached from `from` through `fact`, when the end's
    /// target conforms to `term`.
    fn navigation(&self, fact: FactId, args: &[Arg], from: VarId, to: VarId, term: &str) -> Option<(OclExpr, String)> {
        let forward = match args {
            [Arg::Var(a), Arg::Var(b)] if *a == from && *b == to => true,
            [Arg::Var(a), Arg::Var(b)] if *a == to && *b == from => false,
            _ => return None,
        };
        let end = self.model.end(self.model.end_for_fact(fact, forward)?);
        let class = self.model.class_of_term(term)?;
        if !self.model.conforms(&end.target, &class.name) {
            return None;
        }
        let src = self.lookup(from)?.1.clone();
        Some((src.nav(end.role.clone()), end.role.clone()))
    }
}

fn count_cmp(q: Quantifier) -> Option<(OclCmp, i64)> {
    Some(match q {
        Quantifier::AtLeast(n) => (OclCmp::Ge, n as i64),
        Quantifier::AtMost(n) => (OclCmp::Le, n as i64),
        Quantifier::Exactly(n) => (OclCmp::Eq, n as i64),
        Quantifier::MoreThan(n) => (OclCmp::Gt, n as i64),
        _ => return None,
    })
}

fn sized(src: OclExpr, q: Quantifier) -> Option<OclExpr> {
    let (op, n) = count_cmp(q)?;
    Some(OclExpr::cmp(op, src.coll(CollOpKind::Size), OclExpr::int(n)))
}

/// The bound variable that `scope`'s leading atomic formulation links `y` to.
fn linked_var(env: &MapEnv, atomic: &Formulation, y: VarId) -> Option<(FactId, Vec<Arg>, VarId)> {
    let Formulation::Atomic { fact, args } = atomic else { return None };
    let other = match args.as_slice() {
        [Arg::Var(a), Arg::Var(b)] if *b == y && *a != y => *a,
        [Arg::Var(a), Arg::Var(b)] if *a == y && *b != y => *b,
        _ => return None,
    };
    env.is_bound(other).then(|| (*fact, args.clone(), other))
}

/// Map a quantification nested under already bound variables.
pub fn map_quantifier(f: &Formulation, env: &mut MapEnv) -> Result<OclExpr, MapIssue> {
    let Formulation::Quantification { quantifier: q, variable: y, over, scope } = f else {
        return map_formulation(f, env);
    };
    let (q, y) = (*q, *y);

    // Navigation forms: the scope starts with a fact linking y to a bound variable.
    let (atomic, rest, implies) = match scope.as_ref() {
        a @ Formulation::Atomic { .. } => (a, None, false),
        Formulation::And(a, p) => (a.as_ref(), Some(p.as_ref()), false),
        Formulation::Implies(a, p) => (a.as_ref(), Some(p.as_ref()), true),
        _ => (scope.as_ref(), None, false),
    };
    if let Some((fact, args, x)) = linked_var(env, atomic, y) {
        if let Some((nav, _)) = env.navigation(fact, &args, x, y, over) {
            let mapped = match (rest, implies, q) {
                (None, _, Quantifier::Existential) => Some(Ok(nav.coll(CollOpKind::NotEmpty))),
                (None, _, Quantifier::None) => Some(Ok(nav.coll(CollOpKind::IsEmpty))),
                (None, _, q) if q.is_counting() => sized(nav, q).map(Ok),
                (Some(p), false, Quantifier::Existential) => {
                    Some(env.with_var(y, over, |env, v| Ok(nav.iterate(IterKind::Exists, v, map_formulation(p, env)?))))
                }
                (Some(p), false, Quantifier::None) => Some(env.with_var(y, over, |env, v| {
                    Ok(nav.iterate(IterKind::Select, v, map_formulation(p, env)?).coll(CollOpKind::IsEmpty))
                })),
                (Some(p), false, q) if q.is_counting() => Some(env.with_var(y, over, |env, v| {
                    let sel = nav.iterate(IterKind::Select, v, map_formulation(p, env)?);
                    Ok(sized(sel, q).expect("counting quantifier"))
                })),
                (Some(p), true, Quantifier::Universal) => {
                    Some(env.with_var(y, over, |env, v| Ok(nav.iterate(IterKind::ForAll, v, map_formulation(p, env)?))))
                }
                _ => None,
            };
            if let Some(m) = mapped {
                return m;
            }
        }
    }

    // General form over every instance of the type.
    let src = OclExpr::all_instances(env.class_name(over)?);
    env.with_var(y, over, |env, v| {
        let body = map_formulation(scope, env)?;
        Ok(match q {
            Quantifier::Universal => src.iterate(IterKind::ForAll, v, body),
            Quantifier::Existential => src.iterate(IterKind::Exists, v, body),
            Quantifier::None => src.iterate(IterKind::Select, v, body).coll(CollOpKind::IsEmpty),
            q => sized(src.iterate(IterKind::Select, v, body), q).expect("counting quantifier"),
        })
    })
}

/// Map a fact, characteristic or attribute comparison over bound variables.
pub fn map_atomic(f: &Formulation, env: &mut MapEnv) -> Result<OclExpr, MapIssue> {
    match f {
        Formulation::CharacteristicTest { variable, characteristic } => {
            Ok(env.expr_of(*variable)?.attr(characteristic.adjective.clone()))
        }
        Formulation::AttrComparison { variable, attribute, op, literal } => Ok(OclExpr::cmp(
            (*op).into(),
            env.expr_of(*variable)?.attr(attribute.name.clone()),
            OclExpr::Lit(literal.clone()),
        )),
        Formulation::Atomic { fact, args } => {
            let (x, y) = match args.as_slice() {
                [Arg::Var(x), Arg::Var(y)] => (*x, *y),
                _ => {
                    let name = args
                        .iter()
                        .find_map(|a| match a {
                            Arg::Individual(n) => Some(n.as_str()),
                            Arg::Var(_) => None,
                        })
                        .unwrap_or("?");
                    return Err(MapIssue::new(
                        "E_INDIVIDUAL_CONCEPT",
                        format!("individual concept `{name}` cannot be expressed in the OCL subset"),
                    ));
                }
            };
            let end = env
                .model
                .end_for_fact(*fact, true)
                .map(|r| env.model.end(r).clone())
                .ok_or_else(|| MapIssue::new("E_NO_CONTEXT", "fact type has no association"))?;
            let src = env.expr_of(x)?.nav(end.role);
            let target = env.expr_of(y)?;
            let term = env.vocab.fact(*fact).object.clone().unwrap_or_default();
            let name = env.fresh_name(&term);
            Ok(src.iterate(
                IterKind::Exists,
                name.clone(),
                OclExpr::cmp(OclCmp::Eq, OclExpr::var(name), target),
            ))
        }
        other => map_formulation(other, env),
    }
}

/// Set and bag projections are transparent: their kind shows in the type of
/// the navigation, not in the printed text.
pub fn map_projection(f: &Formulation, env: &mut MapEnv) -> Result<OclExpr, MapIssue> {
    match f {
        Formulation::Projection { kind: ProjectionKind::Closed, .. } => Err(MapIssue::new(
            "E_CLOSED_PROJECTION",
            "closed projections have no OCL collection counterpart",
        )),
        Formulation::Projection { inner, .. } => map_formulation(inner, env),
        other => map_formulation(other, env),
    }
}

fn map_formulation(f: &Formulation, env: &mut MapEnv) -> Result<OclExpr, MapIssue> {
    match f {
        Formulation::Quantification { .. } => map_quantifier(f, env),
        Formulation::Atomic { .. } | Formulation::CharacteristicTest { .. } | Formulation::AttrComparison { .. } => {
            map_atomic(f, env)
        }
        Formulation::Projection { .. } => map_projection(f, env),
        Formulation::Not(g) => Ok(OclExpr::not(map_formulation(g, env)?)),
        Formulation::And(a, b) => Ok(OclExpr::and(map_formulation(a, env)?, map_formulation(b, env)?)),
        Formulation::Or(a, b) => Ok(OclExpr::or(map_formulation(a, env)?, map_formulation(b, env)?)),
        Formulation::Implies(a, b) => Ok(OclExpr::implies(map_formulation(a, env)?, map_formulation(b, env)?)),
    }
}

fn rename(f: &Formulation, from: VarId, to: VarId) -> Formulation {
    let r = |v: VarId| if v == from { to } else { v };
    let sub = |g: &Formulation| Box::new(rename(g, from, to));
    match f {
        Formulation::Quantification { quantifier, variable, over, scope } => Formulation::Quantification {
            quantifier: *quantifier,
            variable: r(*variable),
            over: over.clone(),
            scope: sub(scope),
        },
        Formulation::Atomic { fact, args } => Formulation::Atomic {
            fact: *fact,
            args: args
                .iter()
                .map(|a| match a {
                    Arg::Var(v) => Arg::Var(r(*v)),
                    other => other.clone(),
                })
                .collect(),
        },
        Formulation::CharacteristicTest { variable, characteristic } => Formulation::CharacteristicTest {
            variable: r(*variable),
            characteristic: characteristic.clone(),
        },
        Formulation::AttrComparison { variable, attribute, op, literal } => Formulation::AttrComparison {
            variable: r(*variable),
            attribute: attribute.clone(),
            op: *op,
            literal: literal.clone(),
        },
        Formulation::Not(g) => Formulation::Not(sub(g)),
        Formulation::And(a, b) => Formulation::And(sub(a), sub(b)),
        Formulation::Or(a, b) => Formulation::Or(sub(a), sub(b)),
        Formulation::Implies(a, b) => Formulation::Implies(sub(a), sub(b)),
        Formulation::Projection { kind, inner } => Formulation::Projection { kind: *kind, inner: sub(inner) },
    }
}

/// A quantifier that can become the invariant's `self`, and the formulation
/// with that quantifier removed.
struct Lifted {
    var: VarId,
    term: String,
    body: Formulation,
}

/// `positive` is false under an odd number of negations (counting the
/// antecedents of implications).
fn lift(f: &Formulation, positive: bool) -> Option<Lifted> {
    let keep = |var: VarId, term: &str, body: Formulation| Some(Lifted { var, term: term.to_string(), body });
    match f {
        Formulation::Quantification { quantifier, variable, over, scope } => match (quantifier, positive) {
            (Quantifier::Universal, true) | (Quantifier::Existential, false) => keep(*variable, over, (**scope).clone()),
            (Quantifier::None, true) => keep(*variable, over, Formulation::negate((**scope).clone())),
            _ => None,
        },
        Formulation::Not(g) => lift(g, !positive).map(|l| Lifted { body: Formulation::negate(l.body), ..l }),
        Formulation::Projection { kind, inner } => lift(inner, positive).map(|l| Lifted {
            body: Formulation::Projection { kind: *kind, inner: Box::new(l.body) },
            ..l
        }),
        Formulation::Or(a, b) if positive => lift_either(a, positive, b, positive, Formulation::or),
        Formulation::And(a, b) if !positive => lift_either(a, positive, b, positive, Formulation::and),
        Formulation::Implies(a, b) if positive => lift_either(a, !positive, b, positive, Formulation::implies),
        Formulation::And(a, b) => lift_both(a, positive, b, positive, Formulation::and),
        Formulation::Or(a, b) => lift_both(a, positive, b, positive, Formulation::or),
        Formulation::Implies(a, b) => lift_both(a, !positive, b, positive, Formulation::implies),
        _ => None,
    }
}

/// Disjunction in effect: one side suffices, the other stays closed.
fn lift_either(
    a: &Formulation,
    pa: bool,
    b: &Formulation,
    pb: bool,
    join: fn(Formulation, Formulation) -> Formulation,
) -> Option<Lifted> {
    if let Some(l) = lift(a, pa) {
        return Some(Lifted { body: join(l.body, b.clone()), ..l });
    }
    lift(b, pb).map(|l| Lifted { body: join(a.clone(), l.body), ..l })
}

/// Conjunction in effect: both sides must range over the same type.
fn lift_both(
    a: &Formulation,
    pa: bool,
    b: &Formulation,
    pb: bool,
    join: fn(Formulation, Formulation) -> Formulation,
) -> Option<Lifted> {
    let la = lift(a, pa)?;
    let lb = lift(b, pb)?;
    if la.term != lb.term {
        return None;
    }
    let rb = rename(&lb.body, lb.var, la.var);
    Some(Lifted { body: join(la.body, rb), ..la })
}

/// A clause `q1 x:T1 (q2 y:T2 (f x y [only if C]))` of an action fact type.
struct ActionClause {
    subject: VarId,
    subject_term: String,
    object: VarId,
    object_term: String,
    fact: FactId,
    condition: Option<Formulation>,
}

fn action_clause(f: &Formulation, fact: FactId) -> Option<ActionClause> {
    let Formulation::Quantification { variable: x, over: t1, scope, .. } = f else { return None };
    let Formulation::Quantification { variable: y, over: t2, scope: inner, .. } = scope.as_ref() else {
        return None;
    };
    let (atomic, condition) = match inner.as_ref() {
        Formulation::Implies(a, c) => (a.as_ref(), Some((**c).clone())),
        other => (other, None),
    };
    match atomic {
        Formulation::Atomic { fact: g, args } if *g == fact && *args == [Arg::Var(*x), Arg::Var(*y)] => {
            Some(ActionClause {
                subject: *x,
                subject_term: t1.clone(),
                object: *y,
                object_term: t2.clone(),
                fact,
                condition,
            })
        }
        _ => None,
    }
}

/// The fact type of the leftmost clause, if that clause has one.
fn main_fact(f: &Formulation) -> Option<FactId> {
    let mut clause = None;
    f.walk(&mut |g| {
        if clause.is_none() && matches!(g, Formulation::Quantification { .. }) {
            clause = Some(g);
        }
    });
    let mut found = None;
    clause?.walk(&mut |g| {
        if let (None, Formulation::Atomic { fact, .. }) = (found, g) {
            found = Some(*fact);
        }
    });
    found
}

/// Replace the first action clause in pre-order. For a postcondition, an
/// implication whose antecedent is the clause becomes its consequent.
fn replace_action(f: &Formulation, fact: FactId, done: &mut Option<ActionClause>) -> Formulation {
    if done.is_some() {
        return f.clone();
    }
    if let Some(c) = action_clause(f, fact) {
        let replacement = match &c.condition {
            Some(cond) => cond.clone(),
            None => Formulation::atomic(fact, [c.subject, c.object]),
        };
        *done = Some(c);
        return replacement;
    }
    let mut go = |g: &Formulation| Box::new(replace_action(g, fact, done));
    match f {
        Formulation::Implies(a, b) => {
            if let Some(c) = action_clause(a, fact).filter(|c| c.condition.is_none()) {
                *done = Some(c);
                return (**b).clone();
            }
            let a = go(a);
            Formulation::Implies(a, go(b))
        }
        Formulation::Not(g) => Formulation::Not(go(g)),
        Formulation::And(a, b) => {
            let a = go(a);
            Formulation::And(a, go(b))
        }
        Formulation::Or(a, b) => {
            let a = go(a);
            Formulation::Or(a, go(b))
        }
        Formulation::Projection { kind, inner } => Formulation::Projection { kind: *kind, inner: go(inner) },
        other => other.clone(),
    }
}

fn map_action(body: &Formulation, fact: FactId, label: String, env: &mut MapEnv) -> Option<Result<OclConstraint, MapIssue>> {
    let mut clause = None;
    let rewritten = replace_action(body, fact, &mut clause);
    let clause = clause?;
    let result = (|| {
        let context_class = env.class_name(&clause.subject_term)?;
        let op = env
            .model
            .operation(&context_class, &crate::value::sanitize_identifier(&env.vocab.fact(clause.fact).verb_phrase))
            .ok_or_else(|| MapIssue::new("E_NO_CONTEXT", "action fact type has no operation"))?
            .clone();
        let param = &op.params[0];
        env.bind(clause.subject, OclExpr::SelfRef, &clause.subject_term);
        env.bind(clause.object, OclExpr::var(param.name.clone()), &clause.object_term);
        let body = map_formulation(&rewritten, env)?;
        Ok(OclConstraint {
            context_class,
            operation: Some(OperationRef {
                name: op.name.clone(),
                params: op.params.iter().map(|p| (p.name.clone(), p.class.clone())).collect(),
            }),
            kind: if clause.condition.is_some() { ConstraintKind::Pre } else { ConstraintKind::Post },
            label,
            body,
        })
    })();
    Some(result)
}

/// Map one parsed rule to an OCL constraint.
pub fn map_rule(r: &SbvrRule, v: &Vocabulary, m: &ClassModel) -> MapResult {
    let violations = check_supported(r);
    if !violations.is_empty() {
        let errors = violations.into_iter().map(|x| MapIssue::new(x.code, x.description)).collect();
        return MapResult::failed(errors, Vec::new());
    }
    let label = format!("rule_{}", r.index);
    let body = if r.modality.is_negative() {
        Formulation::negate(r.body.clone())
    } else {
        r.body.clone()
    };
    let mut env = MapEnv::new(v, m);
    let mut warnings = Vec::new();

    if classify_rule(r) == RuleClass::Operative {
        if let Some(fact) = main_fact(&body).filter(|f| v.fact(*f).is_action) {
            if let Some(result) = map_action(&body, fact, label.clone(), &mut env) {
                return match result {
                    Ok(c) => MapResult { constraint: Some(c), warnings, errors: Vec::new() },
                    Err(e) => MapResult::failed(vec![e], warnings),
                };
            }
        }
        warnings.push(MapIssue::new(
            "W_OPERATIVE_AS_INV",
            format!("rule {}: {} rule names no action; mapped to an invariant", r.index, r.modality.name()),
        ));
    }

    let Some(lifted) = lift(&body, true) else {
        return MapResult::failed(
            vec![MapIssue::new(
                "E_NO_CONTEXT",
                format!("rule {}: no quantification ranges over every instance of a type", r.index),
            )],
            warnings,
        );
    };
    let result = env.class_name(&lifted.term).and_then(|context_class| {
        env.bind(lifted.var, OclExpr::SelfRef, &lifted.term);
        Ok(OclConstraint {
            context_class,
            operation: None,
            kind: ConstraintKind::Inv,
            label,
            body: map_formulation(&lifted.body, &mut env)?,
        })
    });
    match result {
        Ok(c) => MapResult { constraint: Some(c), warnings, errors: Vec::new() },
        Err(e) => MapResult::failed(vec![e], warnings),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ocl::{print_constraint, typecheck};
    use crate::sbvr::parse_rules;
    use crate::vocabulary::{derive_class_model, load_vocabulary};

    const VOCAB: &str = "\
term customer plural customers
term account plural accounts
term savings_account plural savings_accounts
term vip plural vips
term loan plural loans
fact savings_account is-category-of account
fact vip is-category-of customer
fact customer has account
fact customer requests loan action
fact customer repays loan action
attribute account . balance : Integer
attribute customer . name : String
characteristic customer is premium
characteristic account is frozen
attribute loan . amount : Integer
multiplicity customer has account : 0..* , 1..1
";

    fn map_all(src: &str) -> Vec<MapResult> {
        let v = load_vocabulary(VOCAB).unwrap();
        let m = derive_class_model(&v).unwrap();
        let out = parse_rules(src, &v);
        assert!(out.diagnostics.is_empty(), "{:?}", out.diagnostics);
        out.rules
            .iter()
            .map(|r| {
                let res = map_rule(r, &v, &m);
                if let Some(c) = &res.constraint {
                    assert_eq!(typecheck(c, &m), Ok(crate::ocl::OclType::Boolean), "{}", print_constraint(c));
                }
                res
            })
            .collect()
    }

    fn ocl(src: &str) -> String {
        let r = map_all(src).remove(0);
        assert!(r.errors.is_empty(), "{:?}", r.errors);
        print_constraint(r.constraint.as_ref().unwrap()).replace('\n', "  ")
    }

    #[test]
    fn structural_examples() {
        assert_eq!(
            ocl("It is necessary that each customer has at least one account."),
            "context Customer  inv rule_1: self.account->notEmpty()"
        );
        assert_eq!(
            ocl("It is impossible that a customer has more than 100 accounts."),
            "context Customer  inv rule_1: not (self.account->size() > 100)"
        );
    }

    #[test]
    fn scoped_inner_quantifiers() {
        assert_eq!(
            ocl("It is necessary that each customer has no account only if the balance of the account is less than 0."),
            "context Customer  inv rule_1: Account.allInstances()->select(a | self.account->exists(a2 | a2 = a) implies a.balance < 0)->isEmpty()"
        );
        assert_eq!(
            ocl("It is necessary that each customer has each account only if the balance of the account is at least 0."),
            "context Customer  inv rule_1: self.account->forAll(a | a.balance >= 0)"
        );
        assert_eq!(
            ocl("It is necessary that each customer has an account only if the balance of the account is at least 0."),
            "context Customer  inv rule_1: Account.allInstances()->exists(a | self.account->exists(a2 | a2 = a) implies a.balance >= 0)"
        );
        assert_eq!(
            ocl("It is necessary that each customer has at most 2 accounts only if the balance of the account is equal to 1."),
            "context Customer  inv rule_1: Account.allInstances()->select(a | self.account->exists(a2 | a2 = a) implies a.balance = 1)->size() <= 2"
        );
    }

    #[test]
    fn context_lifting() {
        assert_eq!(
            ocl("It is necessary that each account is frozen or each customer is premium."),
            "context Account  inv rule_1: self.frozen or Customer.allInstances()->forAll(c | c.premium)"
        );
        assert_eq!(
            ocl("It is necessary that some account is frozen or each customer is premium."),
            "context Customer  inv rule_1: Account.allInstances()->exists(a | a.frozen) or self.premium"
        );
        assert_eq!(
            ocl("It is necessary that each customer is premium and each customer has name equal to \"x\"."),
            "context Customer  inv rule_1: self.premium and self.name = 'x'"
        );
        assert_eq!(
            ocl("It is necessary that if an account is frozen then each customer is premium."),
            "context Account  inv rule_1: self.frozen implies Customer.allInstances()->forAll(c | c.premium)"
        );
        assert_eq!(
            ocl("It is necessary that no account is frozen."),
            "context Account  inv rule_1: not self.frozen"
        );
        assert_eq!(
            ocl("It is necessary that it is not the case that some customer is premium."),
            "context Customer  inv rule_1: not self.premium"
        );
        assert_eq!(
            ocl("It is impossible that each customer is premium and an account is frozen."),
            "context Account  inv rule_1: not (Customer.allInstances()->forAll(c | c.premium) and self.frozen)"
        );
    }

    #[test]
    fn no_context() {
        for src in [
            "It is necessary that some customer is premium.",
            "It is necessary that each customer is premium and each account is frozen.",
            "It is impossible that each customer is premium.",
        ] {
            let r = map_all(src).remove(0);
            assert_eq!(r.constraint, None);
            assert_eq!(r.errors.iter().map(|e| e.code).collect::<Vec<_>>(), ["E_NO_CONTEXT"]);
        }
    }

    #[test]
    fn subtype_quantifier_falls_back_to_all_instances() {
        assert_eq!(
            ocl("It is necessary that each vip has at least 1 savings_account."),
            "context Vip  inv rule_1: SavingsAccount.allInstances()->select(s | self.account->exists(a | a = s))->size() >= 1"
        );
    }

    #[test]
    fn action_rules() {
        assert_eq!(
            ocl("It is obligatory that a customer requests a loan only if the amount of the loan is at least 0."),
            "context Customer::requests(loan : Loan)  pre rule_1: loan.amount >= 0"
        );
        assert_eq!(
            ocl("It is prohibited that a customer repays a loan only if the amount of the loan is greater than 0."),
            "context Customer::repays(loan : Loan)  pre rule_1: not (loan.amount > 0)"
        );
        assert_eq!(
            ocl("It is obligatory that if a customer requests a loan then each customer is premium."),
            "context Customer::requests(loan : Loan)  post rule_1: Customer.allInstances()->forAll(c | c.premium)"
        );
        assert_eq!(
            ocl("It is obligatory that each customer requests some loan and each loan has amount at least 1."),
            "context Customer::requests(loan : Loan)  post rule_1: self.loan_requests->exists(l | l = loan) and Loan.allInstances()->forAll(l | l.amount >= 1)"
        );
        assert_eq!(
            ocl("It is obligatory that each vip requests a loan only if the amount of the loan is at most 9."),
            "context Vip::requests(loan : Loan)  pre rule_1: loan.amount <= 9"
        );
    }

    #[test]
    fn operative_without_action_warns() {
        let r = map_all("It is obligatory that each customer has at least one account.").remove(0);
        assert_eq!(r.warnings.iter().map(|w| w.code).collect::<Vec<_>>(), ["W_OPERATIVE_AS_INV"]);
        assert_eq!(r.constraint.unwrap().kind, ConstraintKind::Inv);
        // an action fact outside the leading clause does not make a pre/post
        let r = map_all("It is obligatory that each customer is premium or each customer requests a loan.").remove(0);
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn structural_rules_with_action_facts_are_invariants() {
        assert_eq!(
            ocl("It is necessary that each customer requests at most 3 loans."),
            "context Customer  inv rule_1: self.loan_requests->size() <= 3"
        );
    }

    #[test]
    fn reverse_navigation_to_single_valued_end() {
        let v = load_vocabulary(VOCAB).unwrap();
        let m = derive_class_model(&v).unwrap();
        let has = v.find_fact("customer", "has", "account").unwrap();
        let mut env = MapEnv::new(&v, &m);
        env.bind(VarId(0), OclExpr::SelfRef, "account");
        let q = Formulation::quantification(
            Quantifier::Exactly(1),
            VarId(1),
            "customer",
            Formulation::atomic(has, [VarId(1), VarId(0)]),
        );
        let e = map_quantifier(&q, &mut env).unwrap();
        assert_eq!(crate::ocl::print_expr(&e), "self.customer->size() = 1");
    }

    #[test]
    fn residual_atomic_with_both_bound() {
        let v = load_vocabulary(VOCAB).unwrap();
        let m = derive_class_model(&v).unwrap();
        let has = v.find_fact("customer", "has", "account").unwrap();
        let mut env = MapEnv::new(&v, &m);
        env.bind(VarId(0), OclExpr::SelfRef, "customer");
        env.bind(VarId(1), OclExpr::var("y"), "account");
        let e = map_atomic(&Formulation::atomic(has, [VarId(0), VarId(1)]), &mut env).unwrap();
        assert_eq!(crate::ocl::print_expr(&e), "self.account->exists(a | a = y)");
    }

    #[test]
    fn closed_projection_and_individuals_are_rejected() {
        let v = load_vocabulary(VOCAB).unwrap();
        let m = derive_class_model(&v).unwrap();
        let has = v.find_fact("customer", "has", "account").unwrap();
        let body = Formulation::quantification(
            Quantifier::Universal,
            VarId(0),
            "customer",
            Formulation::Projection {
                kind: ProjectionKind::Closed,
                inner: Box::new(Formulation::quantification(
                    Quantifier::Existential,
                    VarId(1),
                    "account",
                    Formulation::atomic(has, [VarId(0), VarId(1)]),
                )),
            },
        );
        let mut rule = SbvrRule {
            index: 4,
            modality: crate::sbvr::Modality::Necessity,
            body,
            span: Default::default(),
        };
        let r = map_rule(&rule, &v, &m);
        assert_eq!(r.constraint, None);
        assert_eq!(r.errors[0].code, "E_CLOSED_PROJECTION");
        assert!(r.errors[0].message.contains('4'));

        let mut env = MapEnv::new(&v, &m);
        env.bind(VarId(0), OclExpr::SelfRef, "customer");
        let Formulation::Quantification { scope, .. } = &rule.body else { unreachable!() };
        assert_eq!(map_projection(scope, &mut env).unwrap_err().code, "E_CLOSED_PROJECTION");

        // set projection is transparent
        let Formulation::Quantification { scope, .. } = &mut rule.body else { unreachable!() };
        let Formulation::Projection { kind, .. } = scope.as_mut() else { unreachable!() };
        *kind = ProjectionKind::Set;
        let r = map_rule(&rule, &v, &m);
        assert_eq!(print_constraint(&r.constraint.unwrap()), "context Customer\ninv rule_4: self.account->notEmpty()");

        rule.body = Formulation::quantification(
            Quantifier::Universal,
            VarId(0),
            "customer",
            Formulation::Atomic { fact: has, args: vec![Arg::Var(VarId(0)), Arg::Individual("John Doe".into())] },
        );
        assert_eq!(map_rule(&rule, &v, &m).errors[0].code, "E_INDIVIDUAL_CONCEPT");
    }
}
