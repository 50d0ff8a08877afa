use serde::{Deserialize, Serialize};

use super::lexer::{lex, Token, TokenKind};
use super::model::{Arg, Formulation, Modality, Quantifier, SbvrRule, SourceSpan, VarId};
use crate::value::{CmpOp, Literal};
use crate::vocabulary::{FactId, Vocabulary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub line: usize,
    pub col: usize,
}

impl ParseDiagnostic {
    pub fn error(code: &'static str, message: impl Into<String>, line: usize, col: usize) -> Self {
        ParseDiagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            line,
            col,
        }
    }
}

/// Rules parsed from a file, the diagnostics of the sentences that failed,
/// and the number of sentences seen.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParseOutput {
    pub rules: Vec<SbvrRule>,
    pub diagnostics: Vec<ParseDiagnostic>,
    pub sentences: usize,
}

type PResult<T> = Result<T, ParseDiagnostic>;

const MODALITIES: [(&str, Modality); 4] = [
    ("it is necessary that", Modality::Necessity),
    ("it is impossible that", Modality::Impossibility),
    ("it is obligatory that", Modality::Obligation),
    ("it is prohibited that", Modality::Prohibition),
];

const COMPARISONS: [(&str, CmpOp); 5] = [
    ("equal to", CmpOp::Eq),
    ("greater than", CmpOp::Gt),
    ("less than", CmpOp::Lt),
    ("at least", CmpOp::Ge),
    ("at most", CmpOp::Le),
];

fn comparison(tok: Option<&Token>) -> Option<CmpOp> {
    let tok = tok?;
    COMPARISONS
        .iter()
        .find(|(kw, _)| tok.is_keyword(kw))
        .map(|&(_, op)| op)
}

struct SentenceParser<'a> {
    toks: &'a [Token],
    pos: usize,
    vocab: &'a Vocabulary,
    next_var: u32,
    /// Bound variables in scope, innermost last.
    scope: Vec<(VarId, String)>,
    /// Where "unexpected end of sentence" is reported.
    end: (usize, usize),
}

impl<'a> SentenceParser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, k: usize) -> Option<&'a Token> {
        self.toks.get(self.pos + k)
    }

    fn error_here(&self, code: &'static str, message: impl Into<String>) -> ParseDiagnostic {
        let (line, col) = self
            .peek()
            .map(|t| (t.line, t.col))
            .unwrap_or(self.end);
        ParseDiagnostic::error(code, message, line, col)
    }

    fn unexpected(&self, expected: &str) -> ParseDiagnostic {
        match self.peek() {
            Some(t) => self.error_here("E_SYNTAX", format!("expected {expected}, found `{}`", t.text)),
            None => self.error_here("E_SYNTAX", format!("expected {expected}, found end of sentence")),
        }
    }

    fn eat_keyword(&mut self, phrase: &str) -> bool {
        if self.peek().is_some_and(|t| t.is_keyword(phrase)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, phrase: &str) -> PResult<()> {
        if self.eat_keyword(phrase) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{phrase}`")))
        }
    }

    fn fresh_var(&mut self) -> VarId {
        let v = VarId(self.next_var);
        self.next_var += 1;
        v
    }

    fn rule(&mut self) -> PResult<(Modality, Formulation)> {
        let modality = self
            .peek()
            .and_then(|t| MODALITIES.iter().find(|(kw, _)| t.is_keyword(kw)))
            .map(|&(_, m)| m)
            .ok_or_else(|| self.unexpected("modality keyword (`it is necessary that`, `it is impossible that`, `it is obligatory that` or `it is prohibited that`)"))?;
        self.pos += 1;
        let body = self.statement()?;
        if self.peek().is_some() {
            return Err(self.unexpected("`and`, `or` or end of sentence"));
        }
        Ok((modality, body))
    }

    fn statement(&mut self) -> PResult<Formulation> {
        if self.eat_keyword("if") {
            let antecedent = self.clause()?;
            self.expect_keyword("then")?;
            let consequent = self.clause()?;
            return Ok(Formulation::implies(antecedent, consequent));
        }
        let mut left = self.conjunction()?;
        while self.eat_keyword("or") {
            let right = self.conjunction()?;
            left = Formulation::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> PResult<Formulation> {
        let mut left = self.clause()?;
        while self.eat_keyword("and") {
            let right = self.clause()?;
            left = Formulation::and(left, right);
        }
        Ok(left)
    }

    fn clause(&mut self) -> PResult<Formulation> {
        let negated = self.eat_keyword("it is not the case that");
        let quantifier = self.quantifier()?;
        let term = self.term()?;
        let x = self.fresh_var();
        self.scope.push((x, term.clone()));
        let scope = self.predicate(x, &term);
        self.scope.pop();
        let q = Formulation::quantification(quantifier, x, term, scope?);
        Ok(if negated { Formulation::negate(q) } else { q })
    }

    fn starts_quantifier(&self) -> bool {
        self.peek().is_some_and(|t| {
            ["each", "some", "a", "an", "at least one", "no", "at least", "at most", "exactly", "more than"]
                .iter()
                .any(|kw| t.is_keyword(kw))
        })
    }

    fn quantifier(&mut self) -> PResult<Quantifier> {
        let Some(tok) = self.peek() else {
            return Err(self.unexpected("quantifier"));
        };
        let simple = match tok.keyword().as_deref() {
            Some("each") => Some(Quantifier::Universal),
            Some("some" | "a" | "an" | "at least one") => Some(Quantifier::Existential),
            Some("no") => Some(Quantifier::None),
            _ => None,
        };
        if let Some(q) = simple {
            self.pos += 1;
            return Ok(q);
        }
        let counting: fn(u32) -> Quantifier = match tok.keyword().as_deref() {
            Some("at least") => Quantifier::AtLeast,
            Some("at most") => Quantifier::AtMost,
            Some("exactly") => Quantifier::Exactly,
            Some("more than") => Quantifier::MoreThan,
            _ => return Err(self.unexpected("quantifier")),
        };
        self.pos += 1;
        let n = self.number()?;
        Ok(counting(n))
    }

    fn number(&mut self) -> PResult<u32> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Number => {
                let n = t
                    .text
                    .parse()
                    .map_err(|_| self.error_here("E_SYNTAX", format!("number `{}` is too large", t.text)))?;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.unexpected("number")),
        }
    }

    fn term(&mut self) -> PResult<String> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Word => match self.vocab.resolve_term(&t.text) {
                Some(ot) => {
                    self.pos += 1;
                    Ok(ot.term.clone())
                }
                None => Err(self.error_here("E_UNKNOWN_TERM", format!("unknown term `{}`", t.text))),
            },
            _ => Err(self.unexpected("term")),
        }
    }

    fn at_clause_end(&self, k: usize) -> bool {
        match self.peek_at(k) {
            None => true,
            Some(t) => t.is_keyword("and") || t.is_keyword("or") || t.is_keyword("then"),
        }
    }

    fn predicate(&mut self, x: VarId, term: &str) -> PResult<Formulation> {
        let Some(tok) = self.peek() else {
            return Err(self.unexpected("verb"));
        };
        let next = self.peek_at(1).filter(|t| t.kind == TokenKind::Word);

        if let Some(adj) = next.filter(|_| tok.is_word("is") && self.at_clause_end(2)) {
            if let Some(c) = self.vocab.characteristic(term, &adj.text) {
                self.pos += 2;
                return Ok(Formulation::CharacteristicTest {
                    variable: x,
                    characteristic: c.clone(),
                });
            }
        }
        if let Some(name) = next.filter(|_| tok.is_word("has") && comparison(self.peek_at(2)).is_some()) {
            if let Some(attribute) = self.vocab.attribute(term, &name.text) {
                let attribute = attribute.clone();
                self.pos += 2;
                let op = comparison(self.peek()).expect("checked above");
                self.pos += 1;
                let literal = self.literal()?;
                return Ok(Formulation::AttrComparison {
                    variable: x,
                    attribute,
                    op,
                    literal,
                });
            }
        }

        let Some((facts, len)) = self.match_verb(term) else {
            if let Some(name) = next {
                if tok.is_word("has") && comparison(self.peek_at(2)).is_some() {
                    return Err(ParseDiagnostic::error(
                        "E_UNKNOWN_ATTRIBUTE",
                        format!("`{term}` has no attribute `{}`", name.text),
                        name.line,
                        name.col,
                    ));
                }
                if tok.is_word("is") && self.at_clause_end(2) {
                    return Err(ParseDiagnostic::error(
                        "E_UNKNOWN_ATTRIBUTE",
                        format!("`{term}` has no characteristic `{}`", name.text),
                        name.line,
                        name.col,
                    ));
                }
            }
            return Err(self.error_here(
                "E_UNKNOWN_FACT",
                format!("no fact type with subject `{term}` and verb starting `{}`", tok.text),
            ));
        };
        let verb_tok = tok;
        self.pos += len;
        let verb = self.vocab.fact(facts[0]).verb_phrase.clone();

        if self.starts_quantifier() {
            let quantifier = self.quantifier()?;
            let object_tok = self.peek();
            let object = self.term()?;
            let fact = self.pick_fact(&facts, &object).ok_or_else(|| {
                let t = object_tok.expect("term() consumed a token");
                ParseDiagnostic::error(
                    "E_UNKNOWN_FACT",
                    format!("no fact type `{term} {verb} {object}`"),
                    t.line,
                    t.col,
                )
            })?;
            let y = self.fresh_var();
            self.scope.push((y, object.clone()));
            let scope = self.only_if(Formulation::atomic(fact, [x, y]));
            self.scope.pop();
            return Ok(Formulation::quantification(quantifier, y, object, scope?));
        }

        let (name, width) = self.instance_name().ok_or_else(|| self.unexpected("quantifier or individual concept"))?;
        let instance = self.vocab.individual(&name).expect("matched by instance_name");
        let fact = self.pick_fact(&facts, &instance.instance_of).ok_or_else(|| {
            ParseDiagnostic::error(
                "E_UNKNOWN_FACT",
                format!("no fact type `{term} {verb} {}`", instance.instance_of),
                verb_tok.line,
                verb_tok.col,
            )
        })?;
        self.pos += width;
        self.only_if(Formulation::Atomic {
            fact,
            args: vec![Arg::Var(x), Arg::Individual(name)],
        })
    }

    /// Fact types whose subject generalizes `term` and whose verb phrase is the
    /// longest one matching the upcoming tokens.
    fn match_verb(&self, term: &str) -> Option<(Vec<FactId>, usize)> {
        let mut best: Option<(Vec<FactId>, usize)> = None;
        for (id, f) in self.vocab.facts() {
            if !f.is_relational() || !self.vocab.conforms(term, &f.subject) {
                continue;
            }
            let Some(len) = self.verb_length(f.verb_words()) else { continue };
            match &mut best {
                Some((ids, l)) if *l == len => ids.push(id),
                Some((_, l)) if *l > len => {}
                _ => best = Some((vec![id], len)),
            }
        }
        best
    }

    /// Number of tokens covered if the upcoming tokens spell `words`.
    fn verb_length<'w>(&self, words: impl Iterator<Item = &'w str>) -> Option<usize> {
        let words: Vec<&str> = words.collect();
        let mut wi = 0;
        let mut ti = 0;
        while wi < words.len() {
            let tok = self.peek_at(ti)?;
            if !matches!(tok.kind, TokenKind::Word | TokenKind::KeywordPhrase) {
                return None;
            }
            for part in tok.text.split(' ') {
                if words.get(wi).is_none_or(|w| !w.eq_ignore_ascii_case(part)) {
                    return None;
                }
                wi += 1;
            }
            ti += 1;
        }
        Some(ti)
    }

    /// Among verb-matched facts, the one whose object best fits `object`:
    /// same type, then a specialization, then a generalization.
    fn pick_fact(&self, facts: &[FactId], object: &str) -> Option<FactId> {
        let v = self.vocab;
        let target = |id: &FactId| v.fact(*id).object.clone().unwrap_or_default();
        facts
            .iter()
            .find(|id| target(id) == object)
            .or_else(|| facts.iter().find(|id| v.conforms(object, &target(id))))
            .or_else(|| facts.iter().find(|id| v.conforms(&target(id), object)))
            .copied()
    }

    /// Longest individual-concept name spelled by the upcoming tokens.
    fn instance_name(&self) -> Option<(String, usize)> {
        self.vocab
            .individual_concepts
            .iter()
            .filter_map(|ic| {
                let words: Vec<&str> = ic.name.split(' ').collect();
                let fits = words
                    .iter()
                    .enumerate()
                    .all(|(k, w)| self.peek_at(k).is_some_and(|t| t.text == *w));
                fits.then(|| (ic.name.clone(), words.len()))
            })
            .max_by_key(|(_, n)| *n)
    }

    fn only_if(&mut self, atomic: Formulation) -> PResult<Formulation> {
        if !self.eat_keyword("only if") {
            return Ok(atomic);
        }
        let condition = self.attr_condition()?;
        Ok(Formulation::implies(atomic, condition))
    }

    fn attr_condition(&mut self) -> PResult<Formulation> {
        self.expect_keyword("the")?;
        let attr_tok = match self.peek() {
            Some(t) if t.kind == TokenKind::Word => t,
            _ => return Err(self.unexpected("attribute name")),
        };
        self.pos += 1;
        self.expect_keyword("of")?;
        self.expect_keyword("the")?;
        let term_tok = self.peek();
        let term = self.term()?;
        let term_tok = term_tok.expect("term() consumed a token");
        let bound = self
            .scope
            .iter()
            .rev()
            .find(|(_, t)| *t == term)
            .or_else(|| self.scope.iter().rev().find(|(_, t)| self.vocab.conforms(t, &term)))
            .cloned();
        let Some((variable, var_term)) = bound else {
            return Err(ParseDiagnostic::error(
                "E_SYNTAX",
                format!("`the {term}` does not refer to a bound {term}"),
                term_tok.line,
                term_tok.col,
            ));
        };
        let attribute = self.vocab.attribute(&var_term, &attr_tok.text).cloned().ok_or_else(|| {
            ParseDiagnostic::error(
                "E_UNKNOWN_ATTRIBUTE",
                format!("`{var_term}` has no attribute `{}`", attr_tok.text),
                attr_tok.line,
                attr_tok.col,
            )
        })?;
        if !self.peek().is_some_and(|t| t.is_word("is")) {
            return Err(self.unexpected("`is`"));
        }
        self.pos += 1;
        let op = comparison(self.peek()).ok_or_else(|| self.unexpected("comparison"))?;
        self.pos += 1;
        let literal = self.literal()?;
        Ok(Formulation::AttrComparison {
            variable,
            attribute,
            op,
            literal,
        })
    }

    fn literal(&mut self) -> PResult<Literal> {
        let lit = match self.peek() {
            Some(t) if t.kind == TokenKind::Number => Literal::Integer(
                t.text
                    .parse()
                    .map_err(|_| self.error_here("E_SYNTAX", format!("number `{}` is too large", t.text)))?,
            ),
            Some(t) if t.kind == TokenKind::StringLiteral => {
                Literal::String(t.text[1..t.text.len() - 1].to_string())
            }
            Some(t) if t.is_keyword("true") => Literal::Boolean(true),
            Some(t) if t.is_keyword("false") => Literal::Boolean(false),
            _ => return Err(self.unexpected("literal")),
        };
        self.pos += 1;
        Ok(lit)
    }
}

/// Char offset of the start of each line, for span lengths.
fn line_starts(source: &str) -> Vec<usize> {
    let mut starts = vec![0];
    for (i, c) in source.chars().enumerate() {
        if c == '\n' {
            starts.push(i + 1);
        }
    }
    starts
}

/// Parse every sentence of `source`. A sentence with an error contributes
/// exactly one diagnostic and no rule; parsing resumes at the next sentence.
/// Rules are numbered by sentence position, from 1.
pub fn parse_rules(source: &str, vocab: &Vocabulary) -> ParseOutput {
    let starts = line_starts(source);
    let offset = |line: usize, col: usize| starts[line - 1] + col - 1;
    let mut out = ParseOutput::default();
    let mut sentence: Vec<Result<Token, ParseDiagnostic>> = Vec::new();
    let mut lexemes = lex(source).into_iter().peekable();
    loop {
        let next = lexemes.next();
        let period = match &next {
            Some(Ok(t)) if t.kind == TokenKind::Period => Some(t.clone()),
            Some(other) => {
                sentence.push(other.clone());
                continue;
            }
            None if sentence.is_empty() => break,
            None => None,
        };
        out.sentences += 1;
        let index = out.sentences as u32;
        let group = std::mem::take(&mut sentence);
        if let Some(err) = group.iter().find_map(|l| l.as_ref().err()) {
            out.diagnostics.push(err.clone());
            if period.is_none() {
                break;
            }
            continue;
        }
        let toks: Vec<Token> = group.into_iter().map(Result::unwrap).collect();
        let Some(period) = period else {
            let last = toks.last().expect("non-empty sentence");
            out.diagnostics.push(ParseDiagnostic::error(
                "E_SYNTAX",
                "sentence is not terminated by `.`",
                last.line,
                last.col,
            ));
            break;
        };
        let mut p = SentenceParser {
            toks: &toks,
            pos: 0,
            vocab,
            next_var: 0,
            scope: Vec::new(),
            end: (period.line, period.col),
        };
        match p.rule() {
            Ok((modality, body)) => {
                let (line, col) = toks
                    .first()
                    .map(|t| (t.line, t.col))
                    .unwrap_or((period.line, period.col));
                out.rules.push(SbvrRule {
                    index,
                    modality,
                    body,
                    span: SourceSpan {
                        line,
                        col,
                        length: offset(period.line, period.col) + 1 - offset(line, col),
                    },
                });
            }
            Err(d) => out.diagnostics.push(d),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocabulary::load_vocabulary;

    const VOCAB: &str = "\
term customer plural customers
term account plural accounts
term savings_account plural savings_accounts
instance John Doe : customer
fact savings_account is-category-of account
fact customer has account
fact customer opens account action
fact customer is owner of account
fact customer refers customer
attribute account . balance : Integer
attribute customer . name : String
characteristic customer is premium
";

    fn vocab() -> Vocabulary {
        load_vocabulary(VOCAB).unwrap()
    }

    fn dump(src: &str) -> Vec<String> {
        let v = vocab();
        let out = parse_rules(src, &v);
        assert!(out.diagnostics.is_empty(), "{:?}", out.diagnostics);
        out.rules.iter().map(|r| r.dump(&v)).collect()
    }

    fn first_code(src: &str) -> &'static str {
        let out = parse_rules(src, &vocab());
        assert!(out.rules.is_empty());
        out.diagnostics[0].code
    }

    #[test]
    fn structural_rule_golden_dump() {
        assert_eq!(
            dump("It is necessary that each customer has at least one account."),
            ["rule 1 necessity (forall x:customer (exists y:account (has x y)))"]
        );
    }

    #[test]
    fn constructs_golden_dumps() {
        let src = "\
It is impossible that a customer has more than 100 accounts.
It is obligatory that a customer opens an account only if the balance of the account is at least 0.
It is necessary that each customer is premium or each customer has name equal to \"x\".
It is necessary that if some customer is premium then no customer is owner of exactly 2 savings_accounts.
It is prohibited that it is not the case that each customer refers John Doe and each account has balance at most 5.
";
        assert_eq!(
            dump(src),
            [
                "rule 1 impossibility (exists x:customer (more-than 100 y:account (has x y)))",
                "rule 2 obligation (exists x:customer (exists y:account (implies (opens x y) (>= (balance y) 0))))",
                "rule 3 necessity (or (forall x:customer (premium x)) (forall y:customer (= (name y) \"x\")))",
                "rule 4 necessity (implies (exists x:customer (premium x)) (no y:customer (exactly 2 z:savings_account (is_owner_of y z))))",
                "rule 5 prohibition (and (not (forall x:customer (refers x \"John Doe\"))) (forall y:account (<= (balance y) 5)))",
            ]
        );
    }

    #[test]
    fn and_binds_tighter_than_or() {
        let d = dump("It is necessary that each customer is premium or each customer is premium and each account has balance at least 1.");
        assert_eq!(
            d[0],
            "rule 1 necessity (or (forall x:customer (premium x)) (and (forall y:customer (premium y)) (forall z:account (>= (balance z) 1))))"
        );
    }

    #[test]
    fn subtype_subject_inherits_facts_and_attributes() {
        assert_eq!(
            dump("It is necessary that each savings_account has balance greater than 10."),
            ["rule 1 necessity (forall x:savings_account (> (balance x) 10))"]
        );
    }

    #[test]
    fn unknown_fact() {
        assert_eq!(first_code("It is necessary that each customer flies account."), "E_UNKNOWN_FACT");
        assert_eq!(first_code("It is necessary that each account has a customer."), "E_UNKNOWN_FACT");
    }

    #[test]
    fn missing_modality() {
        let out = parse_rules("Each customer has an account.", &vocab());
        assert_eq!(out.diagnostics.len(), 1);
        assert_eq!(out.diagnostics[0].code, "E_SYNTAX");
        assert!(out.diagnostics[0].message.contains("modality"));
        assert_eq!((out.diagnostics[0].line, out.diagnostics[0].col), (1, 1));
    }

    #[test]
    fn unknown_term_and_attribute() {
        assert_eq!(first_code("It is necessary that each ledger has an account."), "E_UNKNOWN_TERM");
        assert_eq!(first_code("It is necessary that each account has colour equal to 1."), "E_UNKNOWN_ATTRIBUTE");
        assert_eq!(first_code("It is necessary that each account is frozen."), "E_UNKNOWN_ATTRIBUTE");
        assert_eq!(
            first_code("It is obligatory that a customer opens an account only if the colour of the account is at least 0."),
            "E_UNKNOWN_ATTRIBUTE"
        );
    }

    #[test]
    fn the_must_refer_to_bound_variable() {
        assert_eq!(
            first_code("It is obligatory that a customer opens an account only if the balance of the savings_account is at least 0."),
            "E_SYNTAX"
        );
    }

    #[test]
    fn error_recovery_counts_sentences() {
        let src = "\
It is necessary that each customer has an account.
It is necessary that each customer flies account.
It is necessary that each customer is premium.
Nonsense here.
It is necessary that each ¤ customer is premium.
It is necessary that each account has balance at least 0.";
        let out = parse_rules(src, &vocab());
        assert_eq!(out.sentences, 6);
        assert_eq!(out.rules.len(), 3);
        assert_eq!(out.diagnostics.len(), 3);
        assert_eq!(out.rules.iter().map(|r| r.index).collect::<Vec<_>>(), [1, 3, 6]);
        assert_eq!(out.diagnostics[2].code, "E_BAD_CHAR");
        assert_eq!((out.diagnostics[2].line, out.diagnostics[2].col), (5, 27));
    }

    #[test]
    fn unterminated_sentence_and_empty_input() {
        let out = parse_rules("It is necessary that each customer is premium", &vocab());
        assert_eq!((out.sentences, out.rules.len(), out.diagnostics.len()), (1, 0, 1));
        let out = parse_rules("  # nothing\n", &vocab());
        assert_eq!(out, ParseOutput::default());
    }

    #[test]
    fn spans_cover_sentences() {
        let v = vocab();
        let out = parse_rules("  It is necessary that\n each customer is premium. ", &v);
        let span = out.rules[0].span;
        assert_eq!((span.line, span.col), (1, 3));
        assert_eq!(span.length, "It is necessary that\n each customer is premium.".chars().count());
    }
}
