//! Two-valued evaluation of SBVR rules, three-valued evaluation of OCL
//! invariants, and exhaustive snapshot enumeration for comparing the two.

mod compare;
mod enumerate;
mod ocl_eval;
mod population;
mod sbvr_eval;
mod snapshot;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use compare::{compare_semantics, EvalRecord, Summary};
pub use enumerate::{count_snapshots, enumerate_snapshots, AttrDomain, EnumConfig, Enumerator, DEFAULT_CAP};
pub use ocl_eval::{eval_ocl, CompiledInvariant};
pub use population::{Population, Schema};
pub use sbvr_eval::{eval_sbvr, CompiledRule};
pub use snapshot::{load_snapshot, AttrEntry, Link, SnapObject, Snapshot};

/// OCL truth values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TruthValue {
    True,
    False,
    Undefined,
}

impl TruthValue {
    pub fn from_bool(b: bool) -> Self {
        if b {
            TruthValue::True
        } else {
            TruthValue::False
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            TruthValue::True => Some(true),
            TruthValue::False => Some(false),
            TruthValue::Undefined => None,
        }
    }

    pub fn and(self, other: TruthValue) -> TruthValue {
        use TruthValue::*;
        match (self, other) {
            (False, _) | (_, False) => False,
            (True, True) => True,
            _ => Undefined,
        }
    }

    pub fn or(self, other: TruthValue) -> TruthValue {
        use TruthValue::*;
        match (self, other) {
            (True, _) | (_, True) => True,
            (False, False) => False,
            _ => Undefined,
        }
    }

    pub fn implies(self, other: TruthValue) -> TruthValue {
        self.not().or(other)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> TruthValue {
        match self {
            TruthValue::True => TruthValue::False,
            TruthValue::False => TruthValue::True,
            TruthValue::Undefined => TruthValue::Undefined,
        }
    }

    /// `t`, `f` or `u`.
    pub fn symbol(self) -> char {
        match self {
            TruthValue::True => 't',
            TruthValue::False => 'f',
            TruthValue::Undefined => 'u',
        }
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("line {line}: {message}")]
    Load { line: usize, code: &'static str, message: String },
    #[error("unknown class `{0}`")]
    ClassUnknown(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("{0}")]
    Model(String),
    #[error("projected {count} snapshots exceeds the cap of {cap}")]
    TooLarge { count: u128, cap: u128 },
    #[error("at most 3 objects per class can be enumerated, not {0}")]
    BadBound(u32),
    #[error("rule {0} does not map to an invariant")]
    NotAnInvariant(u32),
    #[error("expression outside the checked OCL subset: {0}")]
    TypeAtRuntime(String),
}

impl EvalError {
    pub fn code(&self) -> &'static str {
        match self {
            EvalError::Load { code, .. } => code,
            EvalError::ClassUnknown(_) => "E_CLASS_UNKNOWN",
            EvalError::UnknownObject(_) => "E_UNKNOWN_OBJECT",
            EvalError::Model(_) => "E_NAME_CLASH",
            EvalError::TooLarge { .. } => "E_TOO_LARGE",
            EvalError::BadBound(_) => "E_BAD_BOUND",
            EvalError::NotAnInvariant(_) => "E_NOT_AN_INVARIANT",
            EvalError::TypeAtRuntime(_) => "E_TYPE_AT_RUNTIME",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::TruthValue::{self, *};

    const ALL: [TruthValue; 3] = [True, False, Undefined];

    #[test]
    fn kleene_tables() {
        assert_eq!(True.or(Undefined), True);
        assert_eq!(Undefined.or(True), True);
        assert_eq!(False.and(Undefined), False);
        assert_eq!(Undefined.and(False), False);
        assert_eq!(False.implies(Undefined), True);
        assert_eq!(Undefined.implies(True), True);
        assert_eq!(Undefined.not(), Undefined);
        for a in ALL {
            for b in ALL {
                let defined = a != Undefined && b != Undefined;
                if defined {
                    let (x, y) = (a == True, b == True);
                    assert_eq!(a.and(b), TruthValue::from_bool(x && y));
                    assert_eq!(a.or(b), TruthValue::from_bool(x || y));
                    assert_eq!(a.implies(b), TruthValue::from_bool(!x || y));
                }
            }
        }
        // the remaining combinations with undefined
        assert_eq!(True.and(Undefined), Undefined);
        assert_eq!(Undefined.and(Undefined), Undefined);
        assert_eq!(False.or(Undefined), Undefined);
        assert_eq!(True.implies(Undefined), Undefined);
        assert_eq!(Undefined.implies(False), Undefined);
    }
}
