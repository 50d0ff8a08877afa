use std::fmt;

use serde::{Deserialize, Serialize};

/// Primitive attribute types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ValueType {
    Integer,
    String,
    Boolean,
}

impl ValueType {
    pub fn name(self) -> &'static str {
        match self {
            ValueType::Integer => "Integer",
            ValueType::String => "String",
            ValueType::Boolean => "Boolean",
        }
    }

    pub fn from_name(name: &str) -> Option<ValueType> {
        match name {
            "Integer" => Some(ValueType::Integer),
            "String" => Some(ValueType::String),
            "Boolean" => Some(ValueType::Boolean),
            _ => None,
        }
    }
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A typed literal value, shared by rule comparisons, OCL literals and
/// snapshot attribute values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Literal {
    Integer(i64),
    String(String),
    Boolean(bool),
}

impl Literal {
    pub fn value_type(&self) -> ValueType {
        match self {
            Literal::Integer(_) => ValueType::Integer,
            Literal::String(_) => ValueType::String,
            Literal::Boolean(_) => ValueType::Boolean,
        }
    }
}

/// Comparison operators available on attribute values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    Eq,
    Gt,
    Lt,
    Ge,
    Le,
}

impl CmpOp {
    pub const ALL: [CmpOp; 5] = [CmpOp::Eq, CmpOp::Gt, CmpOp::Lt, CmpOp::Ge, CmpOp::Le];

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Gt => ">",
            CmpOp::Lt => "<",
            CmpOp::Ge => ">=",
            CmpOp::Le => "<=",
        }
    }

    /// Compare two literals of the same type. `None` when the types differ
    /// or the type has no ordering (Boolean with anything but `=`).
    pub fn apply(self, left: &Literal, right: &Literal) -> Option<bool> {
        use std::cmp::Ordering;
        let ord: Ordering = match (left, right) {
            (Literal::Integer(a), Literal::Integer(b)) => a.cmp(b),
            (Literal::String(a), Literal::String(b)) => a.cmp(b),
            (Literal::Boolean(a), Literal::Boolean(b)) => {
                return match self {
                    CmpOp::Eq => Some(a == b),
                    _ => None,
                }
            }
            _ => return None,
        };
        Some(match self {
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Ge => ord != Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
        })
    }
}

impl fmt::Display for Literal {
    /// Structured-English surface form (strings in double quotes).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Integer(n) => write!(f, "{n}"),
            Literal::String(s) => write!(f, "\"{s}\""),
            Literal::Boolean(b) => write!(f, "{b}"),
        }
    }
}

/// `savings_account` -> `SavingsAccount`.
pub fn upper_camel(term: &str) -> String {
    term.split('_')
        .filter(|part| !part.is_empty())
        .map(|part| {
            let mut chars = part.chars();
            match chars.next() {
                Some(first) => first.to_ascii_uppercase().to_string() + chars.as_str(),
                None => String::new(),
            }
        })
        .collect()
}

/// Replace every non-alphanumeric character with `_`.
pub fn sanitize_identifier(text: &str) -> String {
    text.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}
