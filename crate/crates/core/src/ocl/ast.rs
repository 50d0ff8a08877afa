use std::fmt;

use serde::{Deserialize, Serialize};

use crate::value::{CmpOp, Literal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstraintKind {
    Inv,
    Pre,
    Post,
}

impl ConstraintKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ConstraintKind::Inv => "inv",
            ConstraintKind::Pre => "pre",
            ConstraintKind::Post => "post",
        }
    }
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// The operation a pre/post constraint is attached to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OperationRef {
    pub name: String,
    /// `(parameter name, class name)` pairs.
    pub params: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OclConstraint {
    pub context_class: String,
    pub operation: Option<OperationRef>,
    pub kind: ConstraintKind,
    pub label: String,
    pub body: OclExpr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IterKind {
    ForAll,
    Exists,
    Select,
}

impl IterKind {
    pub fn name(self) -> &'static str {
        match self {
            IterKind::ForAll => "forAll",
            IterKind::Exists => "exists",
            IterKind::Select => "select",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CollOpKind {
    Size,
    IsEmpty,
    NotEmpty,
}

impl CollOpKind {
    pub fn name(self) -> &'static str {
        match self {
            CollOpKind::Size => "size",
            CollOpKind::IsEmpty => "isEmpty",
            CollOpKind::NotEmpty => "notEmpty",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OclCmp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl OclCmp {
    pub fn symbol(self) -> &'static str {
        match self {
            OclCmp::Eq => "=",
            OclCmp::Ne => "<>",
            OclCmp::Lt => "<",
            OclCmp::Le => "<=",
            OclCmp::Gt => ">",
            OclCmp::Ge => ">=",
        }
    }

    pub fn is_ordering(self) -> bool {
        !matches!(self, OclCmp::Eq | OclCmp::Ne)
    }
}

impl From<CmpOp> for OclCmp {
    fn from(op: CmpOp) -> Self {
        match op {
            CmpOp::Eq => OclCmp::Eq,
            CmpOp::Gt => OclCmp::Gt,
            CmpOp::Lt => OclCmp::Lt,
            CmpOp::Ge => OclCmp::Ge,
            CmpOp::Le => OclCmp::Le,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoolOpKind {
    And,
    Or,
    Implies,
}

impl BoolOpKind {
    pub fn name(self) -> &'static str {
        match self {
            BoolOpKind::And => "and",
            BoolOpKind::Or => "or",
            BoolOpKind::Implies => "implies",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OclExpr {
    SelfRef,
    VarRef { name: String },
    AttrNav { src: Box<OclExpr>, attr: String },
    /// Navigation to the association end with role name `end`.
    AssocNav { src: Box<OclExpr>, end: String },
    AllInstances { class: String },
    IterCall { src: Box<OclExpr>, iter: IterKind, var: String, body: Box<OclExpr> },
    CollOp { src: Box<OclExpr>, op: CollOpKind },
    Cmp { op: OclCmp, l: Box<OclExpr>, r: Box<OclExpr> },
    BoolOp { op: BoolOpKind, l: Box<OclExpr>, r: Box<OclExpr> },
    Not { inner: Box<OclExpr> },
    Lit(Literal),
}

impl OclExpr {
    pub fn var(name: impl Into<String>) -> Self {
        OclExpr::VarRef { name: name.into() }
    }

    pub fn attr(self, attr: impl Into<String>) -> Self {
        OclExpr::AttrNav { src: Box::new(self), attr: attr.into() }
    }

    pub fn nav(self, end: impl Into<String>) -> Self {
        OclExpr::AssocNav { src: Box::new(self), end: end.into() }
    }

    pub fn all_instances(class: impl Into<String>) -> Self {
        OclExpr::AllInstances { class: class.into() }
    }

    pub fn iterate(self, iter: IterKind, var: impl Into<String>, body: OclExpr) -> Self {
        OclExpr::IterCall {
            src: Box::new(self),
            iter,
            var: var.into(),
            body: Box::new(body),
        }
    }

    pub fn coll(self, op: CollOpKind) -> Self {
        OclExpr::CollOp { src: Box::new(self), op }
    }

    pub fn cmp(op: OclCmp, l: OclExpr, r: OclExpr) -> Self {
        OclExpr::Cmp { op, l: Box::new(l), r: Box::new(r) }
    }

    pub fn bool_op(op: BoolOpKind, l: OclExpr, r: OclExpr) -> Self {
        OclExpr::BoolOp { op, l: Box::new(l), r: Box::new(r) }
    }

    pub fn and(l: OclExpr, r: OclExpr) -> Self {
        Self::bool_op(BoolOpKind::And, l, r)
    }

    pub fn or(l: OclExpr, r: OclExpr) -> Self {
        Self::bool_op(BoolOpKind::Or, l, r)
    }

    pub fn implies(l: OclExpr, r: OclExpr) -> Self {
        Self::bool_op(BoolOpKind::Implies, l, r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: OclExpr) -> Self {
        OclExpr::Not { inner: Box::new(inner) }
    }

    pub fn int(n: i64) -> Self {
        OclExpr::Lit(Literal::Integer(n))
    }
}
