use super::*;

/// A whitespace-separated word with its 1-based column.
#[derive(Clone, Copy, Debug)]
struct Word<'a> {
    text: &'a str,
    col: usize,
}

struct Line<'a> {
    number: usize,
    words: Vec<Word<'a>>,
}

fn split_line(number: usize, raw: &str) -> Line<'_> {
    let content = match raw.find('#') {
        Some(i) => &raw[..i],
        None => raw,
    };
    let mut words = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in content.char_indices().chain(std::iter::once((content.len(), ' '))) {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                let col = content[..s].chars().count() + 1;
                words.push(Word { text: &content[s..i], col });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    Line { number, words }
}

fn is_term(text: &str) -> bool {
    !text.is_empty() && text.chars().all(|c| c.is_ascii_lowercase() || c == '_')
}

struct Loader<'a> {
    vocab: Vocabulary,
    errors: Vec<VocabError>,
    lines: Vec<Line<'a>>,
}

impl<'a> Loader<'a> {
    fn syntax(&mut self, line: usize, col: usize, message: impl Into<String>) {
        self.errors.push(VocabError::Syntax {
            line,
            col,
            message: message.into(),
        });
    }

    fn known_term(&mut self, line: usize, word: Word<'_>) -> Option<String> {
        if self.vocab.object_type(word.text).is_some() {
            Some(word.text.to_string())
        } else {
            self.errors.push(VocabError::UnknownTerm {
                line,
                col: word.col,
                term: word.text.to_string(),
            });
            None
        }
    }

    fn load_terms(&mut self) {
        let mut names: BTreeSet<String> = BTreeSet::new();
        for idx in 0..self.lines.len() {
            let Line { number, ref words } = self.lines[idx];
            if words.first().map(|w| w.text) != Some("term") {
                continue;
            }
            let words = words.clone();
            let (singular, plural) = match words.as_slice() {
                [_, s] => (*s, None),
                [_, s, kw, p] if kw.text == "plural" => (*s, Some(*p)),
                _ => {
                    let col = words[0].col;
                    self.syntax(number, col, "expected `term <singular> [plural <plural>]`");
                    continue;
                }
            };
            let mut ok = true;
            for w in std::iter::once(singular).chain(plural) {
                if !is_term(w.text) {
                    self.syntax(
                        number,
                        w.col,
                        format!("term `{}` must be lowercase letters or underscores", w.text),
                    );
                    ok = false;
                } else if !names.insert(w.text.to_string()) {
                    self.errors.push(VocabError::Duplicate {
                        line: number,
                        col: w.col,
                        name: w.text.to_string(),
                    });
                    ok = false;
                }
            }
            if ok {
                self.vocab.object_types.push(ObjectType {
                    term: singular.text.to_string(),
                    plural: plural.map(|p| p.text.to_string()),
                });
            }
        }
    }

    fn load_facts(&mut self) {
        for idx in 0..self.lines.len() {
            let number = self.lines[idx].number;
            let words = self.lines[idx].words.clone();
            match words.first().map(|w| w.text) {
                Some("fact") => self.fact(number, &words),
                Some("characteristic") => self.characteristic(number, &words),
                _ => {}
            }
        }
    }

    fn load_rest(&mut self) {
        for idx in 0..self.lines.len() {
            let number = self.lines[idx].number;
            let words = self.lines[idx].words.clone();
            let Some(head) = words.first() else { continue };
            match head.text {
                "term" | "fact" | "characteristic" => {}
                "instance" => self.instance(number, &words),
                "attribute" => self.attribute(number, &words),
                "multiplicity" => self.multiplicity(number, &words),
                other => self.syntax(number, head.col, format!("unknown directive `{other}`")),
            }
        }
    }

    fn instance(&mut self, line: usize, words: &[Word<'_>]) {
        let Some(colon) = words.iter().position(|w| w.text == ":") else {
            self.syntax(line, words[0].col, "expected `instance <Name...> : <term>`");
            return;
        };
        if colon < 2 || words.len() != colon + 2 {
            self.syntax(line, words[0].col, "expected `instance <Name...> : <term>`");
            return;
        }
        let name = words[1..colon]
            .iter()
            .map(|w| w.text)
            .collect::<Vec<_>>()
            .join(" ");
        let Some(term) = self.known_term(line, words[colon + 1]) else { return };
        if self.vocab.individual(&name).is_some() {
            self.errors.push(VocabError::Duplicate {
                line,
                col: words[1].col,
                name,
            });
            return;
        }
        self.vocab.individual_concepts.push(IndividualConcept {
            name,
            instance_of: term,
        });
    }

    fn fact(&mut self, line: usize, words: &[Word<'_>]) {
        let mut body = &words[1..];
        let mut is_action = false;
        if body.len() >= 4 && body.last().map(|w| w.text) == Some("action") {
            is_action = true;
            body = &body[..body.len() - 1];
        }
        if body.len() < 3 {
            self.syntax(line, words[0].col, "expected `fact <term> <verb...> <term>`");
            return;
        }
        let subject_word = body[0];
        let object_word = body[body.len() - 1];
        let verb_words = &body[1..body.len() - 1];
        let verb_phrase = verb_words
            .iter()
            .map(|w| w.text)
            .collect::<Vec<_>>()
            .join(" ");
        let kind = match verb_phrase.as_str() {
            CATEGORIZATION_VERB => FactKind::Categorization,
            PARTITIVE_VERB => FactKind::Partitive,
            _ => FactKind::Associative,
        };
        if is_action && kind != FactKind::Associative {
            self.syntax(line, verb_words[0].col, "only associative fact types can be actions");
            return;
        }
        let subject = self.known_term(line, subject_word);
        let object = self.known_term(line, object_word);
        let (Some(subject), Some(object)) = (subject, object) else { return };
        if self.vocab.find_fact(&subject, &verb_phrase, &object).is_some() {
            self.errors.push(VocabError::Duplicate {
                line,
                col: subject_word.col,
                name: format!("{subject} {verb_phrase} {object}"),
            });
            return;
        }
        if kind == FactKind::Categorization && self.vocab.conforms(&object, &subject) {
            self.syntax(
                line,
                subject_word.col,
                format!("categorization `{subject}` of `{object}` forms a cycle"),
            );
            return;
        }
        self.vocab.fact_types.push(FactType {
            kind,
            subject,
            verb_phrase,
            object: Some(object),
            is_action,
        });
    }

    fn characteristic(&mut self, line: usize, words: &[Word<'_>]) {
        let [_, owner, is, adjective] = words else {
            self.syntax(line, words[0].col, "expected `characteristic <term> is <adjective>`");
            return;
        };
        if is.text != "is" {
            self.syntax(line, is.col, "expected `is`");
            return;
        }
        if !is_term(adjective.text) {
            self.syntax(line, adjective.col, "adjective must be lowercase letters or underscores");
            return;
        }
        let Some(owner) = self.known_term(line, *owner) else { return };
        if self
            .vocab
            .characteristics
            .iter()
            .any(|c| c.owner == owner && c.adjective == adjective.text)
        {
            self.errors.push(VocabError::Duplicate {
                line,
                col: adjective.col,
                name: format!("{owner} is {}", adjective.text),
            });
            return;
        }
        self.vocab.characteristics.push(CharacteristicDecl {
            owner: owner.clone(),
            adjective: adjective.text.to_string(),
        });
        self.vocab.fact_types.push(FactType {
            kind: FactKind::Characteristic,
            subject: owner,
            verb_phrase: format!("is {}", adjective.text),
            object: None,
            is_action: false,
        });
    }

    fn attribute(&mut self, line: usize, words: &[Word<'_>]) {
        let [_, owner, dot, name, colon, ty] = words else {
            self.syntax(
                line,
                words[0].col,
                "expected `attribute <term> . <name> : Integer|String|Boolean`",
            );
            return;
        };
        if dot.text != "." || colon.text != ":" {
            self.syntax(line, dot.col, "expected `<term> . <name> : <type>`");
            return;
        }
        if !is_term(name.text) {
            self.syntax(line, name.col, "attribute name must be lowercase letters or underscores");
            return;
        }
        let Some(value_type) = ValueType::from_name(ty.text) else {
            self.syntax(line, ty.col, format!("unknown value type `{}`", ty.text));
            return;
        };
        let Some(owner) = self.known_term(line, *owner) else { return };
        if self
            .vocab
            .attributes
            .iter()
            .any(|a| a.owner == owner && a.name == name.text)
        {
            self.errors.push(VocabError::Duplicate {
                line,
                col: name.col,
                name: format!("{owner}.{}", name.text),
            });
            return;
        }
        self.vocab.attributes.push(AttributeDecl {
            owner,
            name: name.text.to_string(),
            value_type,
        });
    }

    fn multiplicity(&mut self, line: usize, words: &[Word<'_>]) {
        let usage = "expected `multiplicity <term> <verb...> <term> : <lo>..<hi> , <lo>..<hi> [nonunique]`";
        let Some(colon) = words.iter().position(|w| w.text == ":") else {
            self.syntax(line, words[0].col, usage);
            return;
        };
        if colon < 4 {
            self.syntax(line, words[0].col, usage);
            return;
        }
        let subject = self.known_term(line, words[1]);
        let object = self.known_term(line, words[colon - 1]);
        let (Some(subject), Some(object)) = (subject, object) else { return };
        let verb = words[2..colon - 1]
            .iter()
            .map(|w| w.text)
            .collect::<Vec<_>>()
            .join(" ");
        let fact = match self.vocab.find_fact(&subject, &verb, &object) {
            Some(id) if self.vocab.fact(id).is_relational() => id,
            _ => {
                self.errors.push(VocabError::UnknownFact {
                    line,
                    col: words[1].col,
                    fact: format!("{subject} {verb} {object}"),
                });
                return;
            }
        };
        let mut rest: Vec<&str> = words[colon + 1..].iter().map(|w| w.text).collect();
        let forward_unique = if rest.last() == Some(&"nonunique") {
            rest.pop();
            false
        } else {
            true
        };
        let joined = rest.concat();
        let parts: Vec<&str> = joined.split(',').collect();
        let col = words[colon].col;
        let bounds = match parts.as_slice() {
            [f, r] => parse_bounds(f).zip(parse_bounds(r)),
            _ => None,
        };
        let Some((forward, reverse)) = bounds else {
            self.syntax(line, col, usage);
            return;
        };
        if self.vocab.multiplicity(fact).is_some() {
            self.errors.push(VocabError::Duplicate {
                line,
                col: words[1].col,
                name: format!("multiplicity of {subject} {verb} {object}"),
            });
            return;
        }
        self.vocab.multiplicities.push(MultiplicityDecl {
            fact,
            forward,
            reverse,
            forward_unique,
            reverse_unique: true,
        });
    }
}

fn parse_bounds(text: &str) -> Option<Bounds> {
    let (lo, hi) = text.split_once("..")?;
    let low: u32 = lo.parse().ok()?;
    let high = match hi {
        "*" => None,
        n => Some(n.parse::<u32>().ok()?),
    };
    if matches!(high, Some(h) if h < low) {
        return None;
    }
    Some(Bounds { low, high })
}

/// Parse a `.vocab` source. Declarations may reference terms declared later
/// in the file; every error found is reported, in line order.
pub fn load_vocabulary(source: &str) -> Result<Vocabulary, Vec<VocabError>> {
    let lines: Vec<Line<'_>> = source
        .lines()
        .enumerate()
        .map(|(i, raw)| split_line(i + 1, raw))
        .filter(|l| !l.words.is_empty())
        .collect();
    let mut loader = Loader {
        vocab: Vocabulary::default(),
        errors: Vec::new(),
        lines,
    };
    loader.load_terms();
    loader.load_facts();
    loader.load_rest();
    if loader.errors.is_empty() {
        Ok(loader.vocab)
    } else {
        loader.errors.sort_by_key(|e| e.position());
        Err(loader.errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn codes(src: &str) -> Vec<&'static str> {
        load_vocabulary(src)
            .unwrap_err()
            .iter()
            .map(VocabError::code)
            .collect()
    }

    #[test]
    fn two_terms_one_fact() {
        let v = load_vocabulary("term customer\nterm account\nfact customer has account").unwrap();
        assert_eq!(v.object_types.len(), 2);
        assert_eq!(v.fact_types.len(), 1);
        assert_eq!(v.fact_types[0].kind, FactKind::Associative);
        assert_eq!(v.fact_types[0].verb_phrase, "has");
    }

    #[test]
    fn fact_without_terms_is_unknown_term() {
        let err = load_vocabulary("fact customer has account").unwrap_err();
        assert_eq!(
            err[0],
            VocabError::UnknownTerm {
                line: 1,
                col: 6,
                term: "customer".into()
            }
        );
    }

    #[test]
    fn duplicate_term() {
        let err = load_vocabulary("term customer\nterm customer").unwrap_err();
        assert_eq!(
            err,
            vec![VocabError::Duplicate {
                line: 2,
                col: 6,
                name: "customer".into()
            }]
        );
    }

    #[test]
    fn plural_clashing_with_singular_is_duplicate() {
        assert_eq!(codes("term data plural data"), vec!["E_DUPLICATE"]);
        assert_eq!(codes("term a plural bs\nterm bs"), vec!["E_DUPLICATE"]);
    }

    #[test]
    fn order_of_directives_does_not_matter_for_resolution() {
        let v = load_vocabulary(
            "fact customer opens account action\nattribute account . balance : Integer\nterm account\nterm customer",
        )
        .unwrap();
        assert!(v.fact_types[0].is_action);
        assert_eq!(v.attributes[0].owner, "account");
    }

    #[test]
    fn all_directives() {
        let v = load_vocabulary(
            "# bank\n\
             term customer plural customers\n\
             term account plural accounts   # trailing comment\n\
             term branch\n\
             instance John Doe : customer\n\
             fact customer has account\n\
             fact account is-part-of branch\n\
             attribute customer . name : String\n\
             characteristic customer is premium\n\
             multiplicity customer has account : 1..* , 0..1 nonunique\n",
        )
        .unwrap();
        assert_eq!(v.individual_concepts[0].name, "John Doe");
        assert_eq!(v.fact_types[1].kind, FactKind::Partitive);
        assert_eq!(v.fact_types[2].kind, FactKind::Characteristic);
        let m = &v.multiplicities[0];
        assert_eq!(m.forward, Bounds { low: 1, high: None });
        assert_eq!(m.reverse, Bounds { low: 0, high: Some(1) });
        assert!(!m.forward_unique);
        assert!(m.reverse_unique);
    }

    #[test]
    fn malformed_directives() {
        assert_eq!(codes("term Customer"), vec!["E_SYNTAX"]);
        assert_eq!(codes("term a b c"), vec!["E_SYNTAX"]);
        assert_eq!(codes("frobnicate x"), vec!["E_SYNTAX"]);
        assert_eq!(codes("term a\nattribute a . x : Float"), vec!["E_SYNTAX"]);
        assert_eq!(codes("term a\nterm b\nfact a r b\nmultiplicity a r b : 3..1 , 0..*"), vec!["E_SYNTAX"]);
        assert_eq!(codes("term a\nterm b\nfact a is-category-of b action"), vec!["E_SYNTAX"]);
    }

    #[test]
    fn multiplicity_needs_a_fact() {
        assert_eq!(
            codes("term a\nterm b\nmultiplicity a r b : 0..1 , 0..1"),
            vec!["E_UNKNOWN_FACT"]
        );
    }

    #[test]
    fn redeclarations() {
        assert_eq!(codes("term a\nterm b\nfact a r b\nfact a r b"), vec!["E_DUPLICATE"]);
        assert_eq!(
            codes("term a\nattribute a . x : Integer\nattribute a . x : String"),
            vec!["E_DUPLICATE"]
        );
        assert_eq!(codes("term a\ninstance X : a\ninstance X : a"), vec!["E_DUPLICATE"]);
    }

    #[test]
    fn categorization_cycle_rejected() {
        assert_eq!(
            codes("term a\nterm b\nfact a is-category-of b\nfact b is-category-of a"),
            vec!["E_SYNTAX"]
        );
    }

    #[test]
    fn errors_carry_positions_and_are_all_reported() {
        let err = load_vocabulary("term a\nfact a has b\nattribute c . x : Integer").unwrap_err();
        assert_eq!(err.len(), 2);
        assert_eq!(err[0].position(), (2, 12));
        assert_eq!(err[1].position(), (3, 11));
    }
}
