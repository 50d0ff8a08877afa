use serde::Serialize;

use super::enumerate::{EnumConfig, Enumerator};
use super::ocl_eval::CompiledInvariant;
use super::population::{Population, Schema};
use super::sbvr_eval::CompiledRule;
use super::{EvalError, TruthValue};
use crate::mapper::map_rule;
use crate::sbvr::SbvrRule;
use crate::vocabulary::{ClassModel, Vocabulary};

/// One rule evaluated on one snapshot under both semantics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EvalRecord {
    pub rule_index: u32,
    pub snapshot: u64,
    pub sbvr: bool,
    pub ocl: TruthValue,
    /// OCL is defined and equal to the SBVR value.
    pub agree: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub snapshots: u64,
    pub evaluations: u64,
    pub agreements: u64,
    /// Both defined and different.
    pub disagreements: u64,
    pub undefined: u64,
    pub sbvr_false_ocl_undefined: u64,
}

impl Summary {
    fn record(&mut self, r: &EvalRecord) {
        self.evaluations += 1;
        match r.ocl.as_bool() {
            Some(b) if b == r.sbvr => self.agreements += 1,
            Some(_) => self.disagreements += 1,
            None => {
                self.undefined += 1;
                if !r.sbvr {
                    self.sbvr_false_ocl_undefined += 1;
                }
            }
        }
    }
}

/// Evaluate every rule and its mapped invariant on every enumerated snapshot.
/// `visit` sees each record with the population it was computed on.
pub fn compare_semantics(
    rules: &[SbvrRule],
    v: &Vocabulary,
    m: &ClassModel,
    cfg: &EnumConfig,
    mut visit: impl FnMut(&EvalRecord, &Population, &Schema),
) -> Result<Summary, EvalError> {
    let schema = Schema::new(m);
    let mut compiled = Vec::with_capacity(rules.len());
    for r in rules {
        let c = map_rule(r, v, m).constraint.ok_or(EvalError::NotAnInvariant(r.index))?;
        compiled.push((CompiledRule::new(r, &schema)?, CompiledInvariant::new(&c, m, &schema)?));
    }
    let mut summary = Summary::default();
    if compiled.is_empty() {
        return Ok(summary);
    }
    let mut e = Enumerator::new(&schema, cfg)?;
    while let Some(p) = e.next() {
        for (sbvr, ocl) in &compiled {
            let (s, o) = (sbvr.eval(p), ocl.eval(p));
            let record = EvalRecord {
                rule_index: sbvr.index,
                snapshot: summary.snapshots,
                sbvr: s,
                ocl: o,
                agree: o.as_bool() == Some(s),
            };
            summary.record(&record);
            visit(&record, p, &schema);
        }
        summary.snapshots += 1;
    }
    Ok(summary)
}
