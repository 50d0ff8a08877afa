//! Random sentences within the rule grammar, for differential testing.

use crate::value::ValueType;
use crate::vocabulary::{FactType, Vocabulary};

/// Source of choices: `pick(n)` returns an index below `n`.
pub type Pick<'a> = &'a mut dyn FnMut(usize) -> usize;

const MODALITIES: [&str; 4] = [
    "It is necessary that",
    "It is impossible that",
    "It is obligatory that",
    "It is prohibited that",
];

fn article(word: &str) -> &'static str {
    if word.starts_with(['a', 'e', 'i', 'o', 'u']) {
        "an"
    } else {
        "a"
    }
}

fn noun(v: &Vocabulary, term: &str, plural: bool) -> String {
    match v.object_type(term).and_then(|t| t.plural.clone()) {
        Some(p) if plural => p,
        _ => term.to_string(),
    }
}

/// Quantifier phrase and noun for `term`.
fn quantified(v: &Vocabulary, term: &str, pick: Pick) -> String {
    let n = pick(4);
    let (q, plural) = match pick(10) {
        0 => ("each".to_string(), false),
        1 => ("some".to_string(), false),
        2 => (article(term).to_string(), false),
        3 => ("at least one".to_string(), false),
        4 => (format!("at least {n}"), n != 1),
        5 => (format!("at most {n}"), n != 1),
        6 => (format!("exactly {n}"), n != 1),
        7 => (format!("more than {n}"), n != 1),
        8 => ("no".to_string(), false),
        _ => ("each".to_string(), false),
    };
    format!("{q} {}", noun(v, term, plural))
}

fn literal(t: ValueType, pick: Pick) -> String {
    match t {
        ValueType::Integer => pick(4).to_string(),
        ValueType::String => ["\"a\"", "\"b\"", "\"c\""][pick(3)].to_string(),
        ValueType::Boolean => ["true", "false"][pick(2)].to_string(),
    }
}

fn comparison(pick: Pick) -> &'static str {
    ["equal to", "greater than", "less than", "at least", "at most"][pick(5)]
}

/// Attributes visible on `term`, inherited ones included.
fn attributes(v: &Vocabulary, term: &str) -> Vec<(String, ValueType)> {
    v.ancestors(term)
        .into_iter()
        .flat_map(|t| v.attributes.iter().filter(move |a| a.owner == t))
        .map(|a| (a.name.clone(), a.value_type))
        .collect()
}

fn subtypes<'a>(v: &'a Vocabulary, term: &'a str) -> Vec<&'a str> {
    v.object_types
        .iter()
        .map(|t| t.term.as_str())
        .filter(|t| v.conforms(t, term))
        .collect()
}

fn predicate(v: &Vocabulary, subject: &str, pick: Pick) -> String {
    let chars: Vec<String> = v
        .ancestors(subject)
        .into_iter()
        .flat_map(|t| v.characteristics.iter().filter(move |c| c.owner == t))
        .map(|c| c.adjective.clone())
        .collect();
    let attrs = attributes(v, subject);
    let facts: Vec<&FactType> = v
        .fact_types
        .iter()
        .filter(|f| f.is_relational() && v.conforms(subject, &f.subject))
        .collect();
    let mut options = Vec::new();
    if !chars.is_empty() {
        options.push(0);
    }
    if !attrs.is_empty() {
        options.push(1);
    }
    if !facts.is_empty() {
        options.extend([2, 2]);
    }
    match options.get(pick(options.len().max(1))).copied().unwrap_or(3) {
        0 => format!("is {}", chars[pick(chars.len())]),
        1 => {
            let (name, t) = &attrs[pick(attrs.len())];
            format!("has {name} {} {}", comparison(pick), literal(*t, pick))
        }
        2 => {
            let f = facts[pick(facts.len())];
            let objects = subtypes(v, f.object.as_deref().unwrap_or_default());
            let object = objects[pick(objects.len())];
            let mut out = format!("{} {}", f.verb_phrase, quantified(v, object, pick));
            let attrs = attributes(v, object);
            if !attrs.is_empty() && pick(2) == 0 {
                let (name, t) = &attrs[pick(attrs.len())];
                out.push_str(&format!(
                    " only if the {name} of the {object} is {} {}",
                    comparison(pick),
                    literal(*t, pick)
                ));
            }
            out
        }
        _ => "is".to_string(),
    }
}

fn clause(v: &Vocabulary, pick: Pick) -> String {
    let terms: Vec<&str> = v.object_types.iter().map(|t| t.term.as_str()).collect();
    let subject = terms[pick(terms.len())];
    let negation = if pick(4) == 0 { "it is not the case that " } else { "" };
    format!("{negation}{} {}", quantified(v, subject, pick), predicate(v, subject, pick))
}

/// One sentence of the rule grammar over `v`. Literals always match the
/// attribute type, so every generated rule is well typed.
pub fn generate_rule(v: &Vocabulary, pick: Pick) -> String {
    let modality = MODALITIES[pick(4)];
    let body = match pick(6) {
        0 => format!("if {} then {}", clause(v, pick), clause(v, pick)),
        1 => format!("{} and {}", clause(v, pick), clause(v, pick)),
        2 => format!("{} or {}", clause(v, pick), clause(v, pick)),
        3 => format!("{} or {} and {}", clause(v, pick), clause(v, pick), clause(v, pick)),
        _ => clause(v, pick),
    };
    format!("{modality} {body}.")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sbvr::parse_rules;
    use crate::vocabulary::load_vocabulary;

    #[test]
    fn generated_rules_parse() {
        let v = load_vocabulary(
            "term customer plural customers\nterm vip\nterm account plural accounts\n\
             fact vip is-category-of customer\nfact customer has account\n\
             attribute account . balance : Integer\nattribute account . owner : String\n\
             characteristic account is frozen\n",
        )
        .unwrap();
        let mut state = 12345u64;
        let mut pick = |n: usize| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % n as u64) as usize
        };
        for _ in 0..300 {
            let text = generate_rule(&v, &mut pick);
            let out = parse_rules(&text, &v);
            assert!(out.diagnostics.is_empty(), "{text}: {:?}", out.diagnostics);
            assert_eq!(out.rules.len(), 1);
        }
    }
}
