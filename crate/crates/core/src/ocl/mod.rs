//! OCL constraint AST, type checker and printer.

mod ast;
mod print;
mod types;

pub use ast::{BoolOpKind, CollOpKind, ConstraintKind, IterKind, OclCmp, OclConstraint, OclExpr, OperationRef};
pub use print::{print_constraint, print_expr, print_ocl_file};
pub use types::{expr_type, typecheck, OclType, TypeDiagnostic, TypeEnv};
