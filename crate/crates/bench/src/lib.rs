//! Fixtures shared by the benchmarks: the bundled corpora, loaded once.

use sbvr2ocl_core::sbvr::{parse_rules, SbvrRule};
use sbvr2ocl_core::vocabulary::{derive_class_model, load_vocabulary};
use sbvr2ocl_core::{ClassModel, Vocabulary};

pub const ORACLE_VOCAB: &str = include_str!("../../core/tests/corpus/oracle.vocab");
pub const ORACLE_RULES: &str = include_str!("../../core/tests/corpus/oracle.sbvr");
pub const BANK_VOCAB: &str = include_str!("../../core/tests/corpus/bank.vocab");
pub const BANK_RULES: &str = include_str!("../../core/tests/corpus/bank.sbvr");

pub struct Fixture {
    pub vocab: Vocabulary,
    pub model: ClassModel,
    pub source: &'static str,
    pub rules: Vec<SbvrRule>,
}

impl Fixture {
    pub fn load(vocab: &str, source: &'static str) -> Self {
        let vocab = load_vocabulary(vocab).expect("bundled vocabulary loads");
        let model = derive_class_model(&vocab).expect("bundled class model");
        let rules = parse_rules(source, &vocab).rules;
        Fixture { vocab, model, source, rules }
    }

    pub fn oracle() -> Self {
        Self::load(ORACLE_VOCAB, ORACLE_RULES)
    }

    pub fn bank() -> Self {
        Self::load(BANK_VOCAB, BANK_RULES)
    }
}
