//! SBVR side: the Structured-English tokenizer and parser, and the
//! logical-formulation AST they produce.

mod generate;
mod lexer;
mod model;
mod parser;

pub use generate::{generate_rule, Pick};
pub use lexer::{tokenize, Token, TokenKind};
pub use model::{
    check_supported, classify_rule, free_and_bound_vars, Arg, FeatureViolation, Formulation,
    Modality, ProjectionKind, Quantifier, RuleClass, SbvrRule, SourceSpan, VarId,
};
pub use parser::{parse_rules, ParseDiagnostic, ParseOutput, Severity};
