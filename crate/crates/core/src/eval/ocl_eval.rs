use std::borrow::Cow;

use super::population::{Population, Schema};
use super::snapshot::Snapshot;
use super::{EvalError, TruthValue};
use crate::ocl::{BoolOpKind, CollOpKind, ConstraintKind, IterKind, OclCmp, OclConstraint, OclExpr};
use crate::value::Literal;
use crate::vocabulary::ClassModel;

#[derive(Clone, Debug)]
enum OExpr {
    Var(usize),
    Attr { src: Box<OExpr>, slot: usize },
    Nav { src: Box<OExpr>, fact: usize, forward: bool },
    AllInstances(usize),
    Iter { src: Box<OExpr>, kind: IterKind, var: usize, body: Box<OExpr> },
    Coll { src: Box<OExpr>, op: CollOpKind },
    Cmp { op: OclCmp, l: Box<OExpr>, r: Box<OExpr> },
    Bool { op: BoolOpKind, l: Box<OExpr>, r: Box<OExpr> },
    Not(Box<OExpr>),
    Lit(Literal),
}

struct Compiler<'a> {
    m: &'a ClassModel,
    schema: &'a Schema,
    /// Variables in scope with their static class, innermost last.
    scope: Vec<(String, Option<String>)>,
    slots: usize,
}

fn runtime(msg: impl Into<String>) -> EvalError {
    EvalError::TypeAtRuntime(msg.into())
}

impl Compiler<'_> {
    /// Compiled expression and, for object-valued ones, the static class.
    fn compile(&mut self, e: &OclExpr) -> Result<(OExpr, Option<String>), EvalError> {
        Ok(match e {
            OclExpr::SelfRef => (OExpr::Var(0), self.scope[0].1.clone()),
            OclExpr::VarRef { name } => {
                let i = self
                    .scope
                    .iter()
                    .rposition(|(n, _)| n == name)
                    .ok_or_else(|| runtime(format!("unbound variable `{name}`")))?;
                (OExpr::Var(i), self.scope[i].1.clone())
            }
            OclExpr::AttrNav { src, attr } => {
                let (src, _) = self.compile(src)?;
                let slot = self.schema.slot(attr).ok_or_else(|| runtime(format!("unknown attribute `{attr}`")))?;
                (OExpr::Attr { src: Box::new(src), slot }, None)
            }
            OclExpr::AssocNav { src, end } => {
                let (src, class) = self.compile(src)?;
                let class = class.ok_or_else(|| runtime(format!("navigation `{end}` from a non-object")))?;
                let r = self
                    .m
                    .find_end(&class, end)
                    .ok_or_else(|| runtime(format!("class `{class}` has no end `{end}`")))?;
                let assoc = &self.m.associations[r.association];
                let fact = self.schema.fact_slot(assoc.fact).expect("association fact in schema");
                let target = self.m.end(r).target.clone();
                (OExpr::Nav { src: Box::new(src), fact, forward: r.forward }, Some(target))
            }
            OclExpr::AllInstances { class } => {
                let c = self.schema.class_index(class).ok_or_else(|| EvalError::ClassUnknown(class.clone()))?;
                (OExpr::AllInstances(c), Some(class.clone()))
            }
            OclExpr::IterCall { src, iter, var, body } => {
                let (src, elem) = self.compile(src)?;
                self.scope.push((var.clone(), elem.clone()));
                let slot = self.scope.len() - 1;
                self.slots = self.slots.max(self.scope.len());
                let body = self.compile(body);
                self.scope.pop();
                let (body, _) = body?;
                let class = if *iter == IterKind::Select { elem } else { None };
                (OExpr::Iter { src: Box::new(src), kind: *iter, var: slot, body: Box::new(body) }, class)
            }
            OclExpr::CollOp { src, op } => (OExpr::Coll { src: Box::new(self.compile(src)?.0), op: *op }, None),
            OclExpr::Cmp { op, l, r } => (
                OExpr::Cmp { op: *op, l: Box::new(self.compile(l)?.0), r: Box::new(self.compile(r)?.0) },
                None,
            ),
            OclExpr::BoolOp { op, l, r } => (
                OExpr::Bool { op: *op, l: Box::new(self.compile(l)?.0), r: Box::new(self.compile(r)?.0) },
                None,
            ),
            OclExpr::Not { inner } => (OExpr::Not(Box::new(self.compile(inner)?.0)), None),
            OclExpr::Lit(l) => (OExpr::Lit(l.clone()), None),
        })
    }
}

#[derive(Clone, Debug)]
enum Val<'a> {
    Undef,
    Bool(bool),
    Lit(&'a Literal),
    Int(i64),
    Obj(u32),
    Objs(Cow<'a, [u32]>),
}

impl Val<'_> {
    fn truth(&self) -> TruthValue {
        match self {
            Val::Bool(b) => TruthValue::from_bool(*b),
            Val::Lit(Literal::Boolean(b)) => TruthValue::from_bool(*b),
            _ => TruthValue::Undefined,
        }
    }

    /// An object, treating a one-element navigation result as its element.
    fn object(&self) -> Option<u32> {
        match self {
            Val::Obj(o) => Some(*o),
            Val::Objs(c) if c.len() == 1 => Some(c[0]),
            _ => None,
        }
    }
}

fn truth_val<'a>(t: TruthValue) -> Val<'a> {
    match t.as_bool() {
        Some(b) => Val::Bool(b),
        None => Val::Undef,
    }
}

#[derive(PartialEq, PartialOrd)]
enum Scalar<'a> {
    Int(i64),
    Str(&'a str),
    Bool(bool),
    Obj(u32),
}

fn scalar<'a>(v: &'a Val<'a>) -> Option<Scalar<'a>> {
    Some(match v {
        Val::Int(n) | Val::Lit(Literal::Integer(n)) => Scalar::Int(*n),
        Val::Lit(Literal::String(s)) => Scalar::Str(s),
        Val::Bool(b) | Val::Lit(Literal::Boolean(b)) => Scalar::Bool(*b),
        other => Scalar::Obj(other.object()?),
    })
}

fn compare(op: OclCmp, l: &Val, r: &Val) -> TruthValue {
    let (Some(a), Some(b)) = (scalar(l), scalar(r)) else { return TruthValue::Undefined };
    let same_kind = std::mem::discriminant(&a) == std::mem::discriminant(&b);
    if !same_kind {
        return TruthValue::Undefined;
    }
    TruthValue::from_bool(match op {
        OclCmp::Eq => a == b,
        OclCmp::Ne => a != b,
        OclCmp::Lt => a < b,
        OclCmp::Le => a <= b,
        OclCmp::Gt => a > b,
        OclCmp::Ge => a >= b,
    })
}

fn collection<'a>(v: Val<'a>) -> Option<Cow<'a, [u32]>> {
    match v {
        Val::Objs(c) => Some(c),
        Val::Obj(o) => Some(Cow::Owned(vec![o])),
        _ => None,
    }
}

fn eval<'a>(e: &'a OExpr, p: &'a Population, env: &mut [u32]) -> Val<'a> {
    match e {
        OExpr::Var(i) => Val::Obj(env[*i]),
        OExpr::Attr { src, slot } => match eval(src, p, env).object() {
            Some(o) => match p.value(o, *slot) {
                Some(Literal::Boolean(b)) => Val::Bool(*b),
                Some(l) => Val::Lit(l),
                None => Val::Undef,
            },
            None => Val::Undef,
        },
        OExpr::Nav { src, fact, forward } => match eval(src, p, env).object() {
            Some(o) => Val::Objs(Cow::Borrowed(p.targets(*fact, *forward, o))),
            None => Val::Undef,
        },
        OExpr::AllInstances(c) => Val::Objs(Cow::Borrowed(p.members(*c))),
        OExpr::Iter { src, kind, var, body } => {
            let Some(items) = collection(eval(src, p, env)) else { return Val::Undef };
            let mut undefined = false;
            match kind {
                IterKind::ForAll | IterKind::Exists => {
                    let decisive = *kind == IterKind::Exists;
                    for &o in items.iter() {
                        env[*var] = o;
                        match eval(body, p, env).truth().as_bool() {
                            Some(b) if b == decisive => return Val::Bool(decisive),
                            Some(_) => {}
                            None => undefined = true,
                        }
                    }
                    if undefined {
                        Val::Undef
                    } else {
                        Val::Bool(!decisive)
                    }
                }
                IterKind::Select => {
                    let mut kept = Vec::new();
                    for &o in items.iter() {
                        env[*var] = o;
                        match eval(body, p, env).truth().as_bool() {
                            Some(true) => kept.push(o),
                            Some(false) => {}
                            None => return Val::Undef,
                        }
                    }
                    Val::Objs(Cow::Owned(kept))
                }
            }
        }
        OExpr::Coll { src, op } => match collection(eval(src, p, env)) {
            Some(c) => match op {
                CollOpKind::Size => Val::Int(c.len() as i64),
                CollOpKind::IsEmpty => Val::Bool(c.is_empty()),
                CollOpKind::NotEmpty => Val::Bool(!c.is_empty()),
            },
            None => Val::Undef,
        },
        OExpr::Cmp { op, l, r } => {
            let l = eval(l, p, env);
            let r = eval(r, p, env);
            truth_val(compare(*op, &l, &r))
        }
        OExpr::Bool { op, l, r } => {
            let a = eval(l, p, env).truth();
            // short circuits that hold whatever the right side is
            match (op, a) {
                (BoolOpKind::And, TruthValue::False) => return Val::Bool(false),
                (BoolOpKind::Or, TruthValue::True) => return Val::Bool(true),
                (BoolOpKind::Implies, TruthValue::False) => return Val::Bool(true),
                _ => {}
            }
            let b = eval(r, p, env).truth();
            truth_val(match op {
                BoolOpKind::And => a.and(b),
                BoolOpKind::Or => a.or(b),
                BoolOpKind::Implies => a.implies(b),
            })
        }
        OExpr::Not(g) => truth_val(eval(g, p, env).truth().not()),
        OExpr::Lit(Literal::Boolean(b)) => Val::Bool(*b),
        OExpr::Lit(l) => Val::Lit(l),
    }
}

/// An invariant resolved against a schema.
#[derive(Clone, Debug)]
pub struct CompiledInvariant {
    context: usize,
    body: OExpr,
    slots: usize,
}

impl CompiledInvariant {
    pub fn new(c: &OclConstraint, m: &ClassModel, schema: &Schema) -> Result<Self, EvalError> {
        if c.kind != ConstraintKind::Inv {
            let index = c.label.trim_start_matches("rule_").parse().unwrap_or(0);
            return Err(EvalError::NotAnInvariant(index));
        }
        let context = schema
            .class_index(&c.context_class)
            .ok_or_else(|| EvalError::ClassUnknown(c.context_class.clone()))?;
        let mut compiler = Compiler { m, schema, scope: vec![("self".into(), Some(c.context_class.clone()))], slots: 1 };
        let (body, _) = compiler.compile(&c.body)?;
        Ok(CompiledInvariant { context, body, slots: compiler.slots })
    }

    /// The invariant over every instance of the context class.
    pub fn eval(&self, p: &Population) -> TruthValue {
        let mut stack = [0u32; 16];
        let mut heap;
        let env: &mut [u32] = if self.slots <= stack.len() {
            &mut stack
        } else {
            heap = vec![0; self.slots];
            &mut heap
        };
        let mut result = TruthValue::True;
        for &o in p.members(self.context) {
            env[0] = o;
            match eval(&self.body, p, env).truth() {
                TruthValue::False => return TruthValue::False,
                TruthValue::Undefined => result = TruthValue::Undefined,
                TruthValue::True => {}
            }
        }
        result
    }
}

/// Evaluate invariant `c` on `s` with three-valued semantics.
pub fn eval_ocl(c: &OclConstraint, s: &Snapshot, m: &ClassModel) -> Result<TruthValue, EvalError> {
    let schema = Schema::new(m);
    let p = Population::from_snapshot(s, &schema)?;
    Ok(CompiledInvariant::new(c, m, &schema)?.eval(&p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::load_snapshot;
    use crate::vocabulary::{derive_class_model, load_vocabulary, Vocabulary};

    fn setup() -> (Vocabulary, ClassModel) {
        let v = load_vocabulary(
            "term customer\nterm account\nterm vip\nfact vip is-category-of customer\n\
             fact customer has account\nattribute account . balance : Integer\n\
             attribute account . owner : String\ncharacteristic account is frozen\n",
        )
        .unwrap();
        let m = derive_class_model(&v).unwrap();
        (v, m)
    }

    fn inv(class: &str, body: OclExpr) -> OclConstraint {
        OclConstraint { context_class: class.into(), operation: None, kind: ConstraintKind::Inv, label: "rule_1".into(), body }
    }

    fn run(c: &OclConstraint, snap: &str) -> TruthValue {
        let (v, m) = setup();
        eval_ocl(c, &load_snapshot(snap, &v, &m).unwrap(), &m).unwrap()
    }

    fn balance_ge0() -> OclExpr {
        OclExpr::cmp(OclCmp::Ge, OclExpr::SelfRef.attr("balance"), OclExpr::int(0))
    }

    #[test]
    fn invariant_examples() {
        let c = inv("Customer", OclExpr::SelfRef.nav("account").coll(CollOpKind::NotEmpty));
        assert_eq!(run(&c, "object c1 : customer\nobject a1 : account\nlink c1 has a1"), TruthValue::True);
        assert_eq!(run(&c, "object c1 : customer\nobject v1 : vip\nobject a1 : account\nlink c1 has a1"), TruthValue::False);
        assert_eq!(run(&inv("Account", balance_ge0()), "object a1 : account"), TruthValue::Undefined);
        let t = OclExpr::or(OclExpr::Lit(Literal::Boolean(true)), balance_ge0());
        assert_eq!(run(&inv("Account", t), "object a1 : account"), TruthValue::True);
        // an empty context class holds vacuously
        assert_eq!(run(&inv("Account", OclExpr::Lit(Literal::Boolean(false))), ""), TruthValue::True);
    }

    #[test]
    fn iterator_undefined_rules() {
        let snap = "object a1 : account\nobject a2 : account\nattr a1 . balance = 1\nattr a1 . frozen = true";
        let all = |k: IterKind, body: OclExpr| OclExpr::all_instances("Account").iterate(k, "a", body);
        let bal = || OclExpr::cmp(OclCmp::Ge, OclExpr::var("a").attr("balance"), OclExpr::int(1));
        let check = |body: OclExpr| run(&inv("Account", body), snap);
        assert_eq!(check(all(IterKind::Exists, bal())), TruthValue::True);
        assert_eq!(check(all(IterKind::ForAll, bal())), TruthValue::Undefined);
        let low = || OclExpr::cmp(OclCmp::Ge, OclExpr::var("a").attr("balance"), OclExpr::int(2));
        assert_eq!(check(all(IterKind::ForAll, low())), TruthValue::False);
        assert_eq!(check(all(IterKind::Exists, low())), TruthValue::Undefined);
        let sel = all(IterKind::Select, OclExpr::var("a").attr("frozen")).coll(CollOpKind::Size);
        assert_eq!(check(OclExpr::cmp(OclCmp::Eq, sel, OclExpr::int(1))), TruthValue::Undefined);
        let sel = all(IterKind::Select, bal()).coll(CollOpKind::IsEmpty);
        assert_eq!(check(sel), TruthValue::Undefined);
    }

    #[test]
    fn comparisons() {
        let snap = "object a1 : account\nattr a1 . owner = \"b\"";
        let owner = |op, s: &str| {
            OclExpr::cmp(op, OclExpr::SelfRef.attr("owner"), OclExpr::Lit(Literal::String(s.into())))
        };
        assert_eq!(run(&inv("Account", owner(OclCmp::Gt, "a")), snap), TruthValue::True);
        assert_eq!(run(&inv("Account", owner(OclCmp::Ne, "b")), snap), TruthValue::False);
        let same = OclExpr::SelfRef.nav("account").iterate(
            IterKind::Exists,
            "a",
            OclExpr::cmp(OclCmp::Eq, OclExpr::var("a"), OclExpr::var("a")),
        );
        assert_eq!(run(&inv("Customer", same), "object c1 : customer\nobject a1 : account\nlink c1 has a1"), TruthValue::True);
    }

    #[test]
    fn pre_and_post_are_not_evaluated() {
        let (_, m) = setup();
        let mut c = inv("Account", balance_ge0());
        c.kind = ConstraintKind::Pre;
        c.label = "rule_7".into();
        assert_eq!(eval_ocl(&c, &Snapshot::default(), &m), Err(EvalError::NotAnInvariant(7)));
    }
}
