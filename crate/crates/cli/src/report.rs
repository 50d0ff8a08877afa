//! Feature comparison between SBVR and OCL, with usage counts over a corpus.

use serde::Serialize;

use sbvr2ocl_core::mapper::map_rule;
use sbvr2ocl_core::ocl::ConstraintKind;
use sbvr2ocl_core::sbvr::{Arg, Formulation, ProjectionKind, SbvrRule};
use sbvr2ocl_core::vocabulary::{ClassModel, Vocabulary};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FeatureRow {
    pub feature: &'static str,
    pub sbvr_supported: bool,
    pub ocl_supported: bool,
    pub usage_count: usize,
    #[serde(skip)]
    pub note: &'static str,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FeatureMatrix {
    pub version: u32,
    pub rows: Vec<FeatureRow>,
}

fn any(f: &Formulation, pred: &mut dyn FnMut(&Formulation) -> bool) -> bool {
    let mut hit = false;
    f.walk(&mut |g| hit |= pred(g));
    hit
}

fn count(rules: &[SbvrRule], mut pred: impl FnMut(&Formulation) -> bool) -> usize {
    rules.iter().filter(|r| any(&r.body, &mut pred)).count()
}

impl FeatureMatrix {
    pub fn build(rules: &[SbvrRule], v: &Vocabulary, m: &ClassModel) -> Self {
        let kinds: Vec<Option<ConstraintKind>> = rules
            .iter()
            .map(|r| map_rule(r, v, m).constraint.map(|c| c.kind))
            .collect();
        let emitted = |k: &[ConstraintKind]| kinds.iter().flatten().filter(|c| k.contains(c)).count();
        let nonunique = |f: &Formulation| match f {
            Formulation::Atomic { fact, .. } => v
                .multiplicity(*fact)
                .is_some_and(|d| !d.forward_unique || !d.reverse_unique),
            Formulation::Projection { kind, .. } => *kind == ProjectionKind::Bag,
            _ => false,
        };
        let row = |feature, sbvr_supported, ocl_supported, usage_count, note| FeatureRow {
            feature,
            sbvr_supported,
            ocl_supported,
            usage_count,
            note,
        };
        let rows = vec![
            row("Query support", false, true, 0, "SBVR is not query language"),
            row("Sequence collection", false, true, 0, "SBVR does not support Sequence Collection."),
            row(
                "Closed projection",
                true,
                false,
                count(rules, |f| matches!(f, Formulation::Projection { kind: ProjectionKind::Closed, .. })),
                "OCL does not support Closed Projection.",
            ),
            row("Graphical notation", false, false, 0, "OCL does not support graphical notation"),
            row(
                "Set collection",
                true,
                true,
                count(rules, |f| matches!(f, Formulation::Quantification { .. })),
                "quantifier scopes range over sets",
            ),
            row("Bag collection", true, true, count(rules, nonunique), "nonunique association ends"),
            row("Invariants", true, true, emitted(&[ConstraintKind::Inv]), "structural rules"),
            row(
                "Pre/post conditions",
                true,
                true,
                emitted(&[ConstraintKind::Pre, ConstraintKind::Post]),
                "operative rules on action verbs",
            ),
            row(
                "Counting quantification",
                true,
                true,
                count(rules, |f| {
                    matches!(f, Formulation::Quantification { quantifier, .. } if quantifier.count().is_some())
                }),
                "size() comparisons",
            ),
            row(
                "Characteristics",
                true,
                true,
                count(rules, |f| matches!(f, Formulation::CharacteristicTest { .. })),
                "Boolean attributes",
            ),
            row(
                "Action verbs",
                true,
                true,
                count(rules, |f| matches!(f, Formulation::Atomic { fact, .. } if v.fact(*fact).is_action)),
                "operations",
            ),
            row(
                "Individual concepts",
                true,
                false,
                count(rules, |f| {
                    matches!(f, Formulation::Atomic { args, .. }
                        if args.iter().any(|a| matches!(a, Arg::Individual(_))))
                }),
                "no instance literals",
            ),
        ];
        FeatureMatrix { version: 1, rows }
    }

    pub fn row(&self, feature: &str) -> Option<&FeatureRow> {
        self.rows.iter().find(|r| r.feature == feature)
    }

    pub fn to_text(&self) -> String {
        let yn = |b: bool| if b { "yes" } else { "no" };
        let mut out = format!("{:<24} {:<5} {:<5} {:>5}  {}\n", "feature", "sbvr", "ocl", "usage", "note");
        for r in &self.rows {
            out.push_str(&format!(
                "{:<24} {:<5} {:<5} {:>5}  {}\n",
                r.feature,
                yn(r.sbvr_supported),
                yn(r.ocl_supported),
                r.usage_count,
                r.note
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("feature matrix serializes") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use sbvr2ocl_core::sbvr::parse_rules;
    use sbvr2ocl_core::vocabulary::{derive_class_model, load_vocabulary};

    #[test]
    fn counts_usage() {
        let v = load_vocabulary(
            "term customer\nterm account plural accounts\nfact customer has account\n\
             fact customer opens account action\ncharacteristic account is frozen\n\
             attribute account . balance : Integer\n\
             multiplicity customer has account : 0..* , 0..* nonunique\n",
        )
        .unwrap();
        let m = derive_class_model(&v).unwrap();
        let rules = parse_rules(
            "It is necessary that each customer has at most 2 accounts.\n\
             It is necessary that no account is frozen.\n\
             It is prohibited that a customer opens an account only if the balance of the account is less than 0.\n",
            &v,
        )
        .rules;
        let mx = FeatureMatrix::build(&rules, &v, &m);
        let usage = |f| mx.row(f).unwrap().usage_count;
        assert_eq!(usage("Counting quantification"), 1);
        assert_eq!(usage("Characteristics"), 1);
        assert_eq!(usage("Action verbs"), 1);
        assert_eq!(usage("Bag collection"), 1);
        assert_eq!(usage("Invariants"), 2);
        assert_eq!(usage("Pre/post conditions"), 1);
        assert_eq!(usage("Closed projection"), 0);
        assert_eq!(mx.rows.len(), 12);
    }

    #[test]
    fn text_has_one_line_per_row() {
        let v = load_vocabulary("term customer\n").unwrap();
        let m = derive_class_model(&v).unwrap();
        let mx = FeatureMatrix::build(&[], &v, &m);
        assert_eq!(mx.to_text().lines().count(), mx.rows.len() + 1);
        assert!(mx.to_json().starts_with("{\n  \"version\": 1,"));
    }
}
