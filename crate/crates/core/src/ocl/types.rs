use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::{CollOpKind, IterKind, OclConstraint, OclExpr};
use crate::value::ValueType;
use crate::vocabulary::ClassModel;

/// Types of the target subset. There is no Sequence or OrderedSet.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OclType {
    Integer,
    String,
    Boolean,
    Class(String),
    Set(Box<OclType>),
    Bag(Box<OclType>),
}

impl OclType {
    pub fn element(&self) -> Option<&OclType> {
        match self {
            OclType::Set(e) | OclType::Bag(e) => Some(e),
            _ => None,
        }
    }

    pub fn is_collection(&self) -> bool {
        self.element().is_some()
    }

    /// Conformance: reflexive, classes along generalization, collections
    /// covariantly in their element type.
    pub fn conforms_to(&self, other: &OclType, m: &ClassModel) -> bool {
        match (self, other) {
            (OclType::Class(c), OclType::Class(d)) => m.conforms(c, d),
            (OclType::Set(a), OclType::Set(b)) | (OclType::Bag(a), OclType::Bag(b)) => a.conforms_to(b, m),
            (a, b) => a == b,
        }
    }
}

impl From<ValueType> for OclType {
    fn from(t: ValueType) -> Self {
        match t {
            ValueType::Integer => OclType::Integer,
            ValueType::String => OclType::String,
            ValueType::Boolean => OclType::Boolean,
        }
    }
}

impl fmt::Display for OclType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OclType::Integer => f.write_str("Integer"),
            OclType::String => f.write_str("String"),
            OclType::Boolean => f.write_str("Boolean"),
            OclType::Class(c) => f.write_str(c),
            OclType::Set(e) => write!(f, "Set({e})"),
            OclType::Bag(e) => write!(f, "Bag({e})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeDiagnostic {
    pub code: &'static str,
    pub message: String,
    /// Path from the constraint body to the offending node, e.g. `body.l.src`.
    pub location: String,
}

impl fmt::Display for TypeDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.location, self.message)
    }
}

pub type TypeEnv = HashMap<String, OclType>;

struct Checker<'a> {
    m: &'a ClassModel,
    diags: Vec<TypeDiagnostic>,
}

impl Checker<'_> {
    fn fail(&mut self, code: &'static str, message: String, path: &str) -> Option<OclType> {
        self.diags.push(TypeDiagnostic {
            code,
            message,
            location: path.to_string(),
        });
        None
    }

    /// Element type of a collection source. A single-valued association
    /// navigation is implicitly a one-element Set.
    fn element_of(&mut self, src: &OclExpr, t: &OclType, path: &str) -> Option<(OclType, bool)> {
        match t {
            OclType::Set(e) => Some(((**e).clone(), true)),
            OclType::Bag(e) => Some(((**e).clone(), false)),
            OclType::Class(_) if matches!(src, OclExpr::AssocNav { .. }) => Some((t.clone(), true)),
            _ => {
                self.fail("E_NOT_A_COLLECTION", format!("`->` applied to non-collection type {t}"), path);
                None
            }
        }
    }

    fn boolean(&mut self, e: &OclExpr, env: &mut TypeEnv, path: String) -> Option<()> {
        let t = self.check(e, env, &path)?;
        if t != OclType::Boolean {
            self.fail("E_TYPE_MISMATCH", format!("expected Boolean, found {t}"), &path);
            return None;
        }
        Some(())
    }

    fn check(&mut self, e: &OclExpr, env: &mut TypeEnv, path: &str) -> Option<OclType> {
        match e {
            OclExpr::SelfRef => match env.get("self") {
                Some(t) => Some(t.clone()),
                None => self.fail("E_UNKNOWN_MEMBER", "`self` is not in scope".into(), path),
            },
            OclExpr::VarRef { name } => match env.get(name) {
                Some(t) => Some(t.clone()),
                None => self.fail("E_UNKNOWN_MEMBER", format!("unknown variable `{name}`"), path),
            },
            OclExpr::AttrNav { src, attr } => {
                let t = self.check(src, env, &format!("{path}.src"))?;
                let OclType::Class(c) = &t else {
                    return self.fail("E_TYPE_MISMATCH", format!("attribute `{attr}` accessed on {t}"), path);
                };
                match self.m.attribute(c, attr) {
                    Some(a) => Some(a.value_type.into()),
                    None => self.fail("E_UNKNOWN_MEMBER", format!("class `{c}` has no attribute `{attr}`"), path),
                }
            }
            OclExpr::AssocNav { src, end } => {
                let t = self.check(src, env, &format!("{path}.src"))?;
                let OclType::Class(c) = &t else {
                    return self.fail("E_TYPE_MISMATCH", format!("association end `{end}` navigated from {t}"), path);
                };
                let Some(r) = self.m.find_end(c, end) else {
                    return self.fail("E_UNKNOWN_MEMBER", format!("class `{c}` has no association end `{end}`"), path);
                };
                let end = self.m.end(r);
                let target = OclType::Class(end.target.clone());
                Some(if end.bounds.high == Some(1) {
                    target
                } else if end.unique {
                    OclType::Set(Box::new(target))
                } else {
                    OclType::Bag(Box::new(target))
                })
            }
            OclExpr::AllInstances { class } => match self.m.class(class) {
                Some(_) => Some(OclType::Set(Box::new(OclType::Class(class.clone())))),
                None => self.fail("E_UNKNOWN_MEMBER", format!("unknown class `{class}`"), path),
            },
            OclExpr::IterCall { src, iter, var, body } => {
                let t = self.check(src, env, &format!("{path}.src"))?;
                let (elem, unique) = self.element_of(src, &t, path)?;
                let shadowed = env.insert(var.clone(), elem.clone());
                let bt = self.check(body, env, &format!("{path}.body"));
                match shadowed {
                    Some(old) => env.insert(var.clone(), old),
                    None => env.remove(var),
                };
                let bt = bt?;
                if bt != OclType::Boolean {
                    return self.fail("E_NOT_BOOLEAN", format!("iterator body has type {bt}"), &format!("{path}.body"));
                }
                Some(match iter {
                    IterKind::ForAll | IterKind::Exists => OclType::Boolean,
                    IterKind::Select if unique => OclType::Set(Box::new(elem)),
                    IterKind::Select => OclType::Bag(Box::new(elem)),
                })
            }
            OclExpr::CollOp { src, op } => {
                let t = self.check(src, env, &format!("{path}.src"))?;
                self.element_of(src, &t, path)?;
                Some(match op {
                    CollOpKind::Size => OclType::Integer,
                    CollOpKind::IsEmpty | CollOpKind::NotEmpty => OclType::Boolean,
                })
            }
            OclExpr::Cmp { op, l, r } => {
                let lt = self.check(l, env, &format!("{path}.l"));
                let rt = self.check(r, env, &format!("{path}.r"));
                let (lt, rt) = (lt?, rt?);
                let ok = if op.is_ordering() {
                    lt == rt && matches!(lt, OclType::Integer | OclType::String)
                } else {
                    lt.conforms_to(&rt, self.m) || rt.conforms_to(&lt, self.m)
                };
                if ok {
                    Some(OclType::Boolean)
                } else {
                    self.fail(
                        "E_TYPE_MISMATCH",
                        format!("cannot compare {lt} with {rt} using `{}`", op.symbol()),
                        path,
                    )
                }
            }
            OclExpr::BoolOp { l, r, .. } => {
                let lok = self.boolean(l, env, format!("{path}.l"));
                let rok = self.boolean(r, env, format!("{path}.r"));
                lok.and(rok).map(|_| OclType::Boolean)
            }
            OclExpr::Not { inner } => {
                self.boolean(inner, env, format!("{path}.inner"))?;
                Some(OclType::Boolean)
            }
            OclExpr::Lit(lit) => Some(lit.value_type().into()),
        }
    }
}

/// Synthesize the type of `e` with free variables typed by `env`.
pub fn expr_type(e: &OclExpr, env: &TypeEnv, m: &ClassModel) -> Result<OclType, Vec<TypeDiagnostic>> {
    let mut checker = Checker { m, diags: Vec::new() };
    let mut env = env.clone();
    match checker.check(e, &mut env, "expr") {
        Some(t) if checker.diags.is_empty() => Ok(t),
        _ => Err(checker.diags),
    }
}

/// Check a whole constraint. Succeeds with `Boolean`.
pub fn typecheck(c: &OclConstraint, m: &ClassModel) -> Result<OclType, Vec<TypeDiagnostic>> {
    let mut checker = Checker { m, diags: Vec::new() };
    if m.class(&c.context_class).is_none() {
        checker.fail("E_UNKNOWN_MEMBER", format!("unknown context class `{}`", c.context_class), "context");
        return Err(checker.diags);
    }
    let mut env = TypeEnv::new();
    env.insert("self".into(), OclType::Class(c.context_class.clone()));
    if let Some(op) = &c.operation {
        let declared = m.operation(&c.context_class, &op.name);
        let matches = declared.is_some_and(|d| {
            d.params.len() == op.params.len()
                && d.params.iter().zip(&op.params).all(|(p, (_, t))| p.class == *t)
        });
        if !matches {
            checker.fail(
                "E_UNKNOWN_MEMBER",
                format!("class `{}` has no operation `{}` with these parameters", c.context_class, op.name),
                "context",
            );
            return Err(checker.diags);
        }
        for (name, class) in &op.params {
            env.insert(name.clone(), OclType::Class(class.clone()));
        }
    }
    match checker.check(&c.body, &mut env, "body") {
        Some(OclType::Boolean) if checker.diags.is_empty() => Ok(OclType::Boolean),
        Some(t) if checker.diags.is_empty() => {
            checker.fail("E_NOT_BOOLEAN", format!("constraint body has type {t}"), "body");
            Err(checker.diags)
        }
        _ => Err(checker.diags),
    }
}
