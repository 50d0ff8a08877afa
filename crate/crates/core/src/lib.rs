//! Translate SBVR Structured-English business rules into OCL constraints.
//!
//! The pipeline is:
//!
//! 1. [`vocabulary::load_vocabulary`] reads a `.vocab` file and
//!    [`vocabulary::derive_class_model`] lowers it to a UML-like [`ClassModel`].
//! 2. [`sbvr::parse_rules`] turns `.sbvr` sentences into [`SbvrRule`] ASTs.
//! 3. [`mapper::map_rule`] produces an [`OclConstraint`] per rule, which
//!    [`ocl::typecheck`] verifies and [`ocl::print_constraint`] renders;
//!    [`transpile`] runs steps 2 and 3 over a whole file.
//! 4. [`eval`] evaluates rules under two-valued logic and constraints under
//!    three-valued logic over [`Snapshot`]s, and enumerates small snapshot
//!    spaces to compare the two exhaustively.

pub mod eval;
pub mod mapper;
pub mod ocl;
pub mod pipeline;
pub mod sbvr;
pub mod value;
pub mod vocabulary;

pub use eval::{Snapshot, TruthValue};
pub use mapper::{map_rule, MapResult};
pub use ocl::{OclConstraint, OclExpr, OclType};
pub use pipeline::{transpile, Transpiled};
pub use sbvr::{Formulation, SbvrRule};
pub use value::{Literal, ValueType};
pub use vocabulary::{ClassModel, Vocabulary};
