//! Whole-file transpilation: parse, map, typecheck, print.

use serde::Serialize;

use crate::mapper::{map_rule, MapResult};
use crate::ocl::{print_ocl_file, typecheck, OclConstraint, TypeDiagnostic};
use crate::sbvr::{parse_rules, ParseDiagnostic, SbvrRule, Severity};
use crate::vocabulary::{ClassModel, Vocabulary};

#[derive(Clone, Debug, Serialize)]
pub struct RuleOutcome {
    pub rule: SbvrRule,
    pub mapped: MapResult,
    pub type_errors: Vec<TypeDiagnostic>,
}

impl RuleOutcome {
    /// The constraint, if it mapped and typechecked.
    pub fn constraint(&self) -> Option<&OclConstraint> {
        self.mapped.constraint.as_ref().filter(|_| self.type_errors.is_empty())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Transpiled {
    pub diagnostics: Vec<ParseDiagnostic>,
    pub rules: Vec<RuleOutcome>,
}

impl Transpiled {
    pub fn constraints(&self) -> impl Iterator<Item = &OclConstraint> {
        self.rules.iter().filter_map(RuleOutcome::constraint)
    }

    pub fn ocl_text(&self) -> String {
        print_ocl_file(self.constraints())
    }

    pub fn mapped(&self) -> usize {
        self.constraints().count()
    }

    pub fn warnings(&self) -> usize {
        let parse = self.diagnostics.iter().filter(|d| d.severity == Severity::Warning).count();
        parse + self.rules.iter().map(|r| r.mapped.warnings.len()).sum::<usize>()
    }

    pub fn errors(&self) -> usize {
        let parse = self.diagnostics.iter().filter(|d| d.severity == Severity::Error).count();
        parse
            + self
                .rules
                .iter()
                .map(|r| r.mapped.errors.len() + r.type_errors.len())
                .sum::<usize>()
    }
}

pub fn transpile(source: &str, v: &Vocabulary, m: &ClassModel) -> Transpiled {
    let parsed = parse_rules(source, v);
    let rules = parsed
        .rules
        .into_iter()
        .map(|rule| {
            let mapped = map_rule(&rule, v, m);
            let type_errors = match &mapped.constraint {
                Some(c) => typecheck(c, m).err().unwrap_or_default(),
                None => Vec::new(),
            };
            RuleOutcome { rule, mapped, type_errors }
        })
        .collect();
    Transpiled { diagnostics: parsed.diagnostics, rules }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocabulary::{derive_class_model, load_vocabulary};

    #[test]
    fn counts_and_text() {
        let v = load_vocabulary(
            "term customer\nterm account\nfact customer has account\nattribute account . balance : Integer\n\
             attribute account . owner : String\n",
        )
        .unwrap();
        let m = derive_class_model(&v).unwrap();
        let t = transpile(
            "It is necessary that each account has balance at least 0.\n\
             It is necessary that each account has owner equal to 3.\n\
             It is necessary that each account flies.\n\
             It is obligatory that each account has balance at most 9.\n",
            &v,
            &m,
        );
        assert_eq!(t.rules.len(), 3);
        assert_eq!(t.mapped(), 2);
        assert_eq!((t.warnings(), t.errors()), (1, 2));
        assert_eq!(t.rules[1].type_errors[0].code, "E_TYPE_MISMATCH");
        assert_eq!(
            t.ocl_text(),
            "context Account\ninv rule_1: self.balance >= 0\n\ncontext Account\ninv rule_4: self.balance <= 9\n"
        );
    }
}
