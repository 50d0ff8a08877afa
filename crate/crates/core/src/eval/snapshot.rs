use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::value::Literal;
use crate::vocabulary::{ClassModel, FactId, Vocabulary};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SnapObject {
    pub id: String,
    /// Class name, e.g. `Customer`.
    pub class: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AttrEntry {
    pub object: String,
    pub attr: String,
    /// `None` is a missing value.
    pub value: Option<Literal>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Link {
    pub fact: FactId,
    pub subject: String,
    pub object: String,
}

/// A finite population: objects, attribute values and links. Attributes
/// without an entry are missing.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Snapshot {
    pub objects: Vec<SnapObject>,
    pub attr_values: Vec<AttrEntry>,
    pub links: Vec<Link>,
}

impl Snapshot {
    pub fn object(&self, id: &str) -> Option<&SnapObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    /// Render in the `.snap` format.
    pub fn to_snap_text(&self, v: &Vocabulary, m: &ClassModel) -> String {
        let mut out = String::new();
        for o in &self.objects {
            let term = m.class(&o.class).map_or(o.class.as_str(), |c| c.term.as_str());
            writeln!(out, "object {} : {term}", o.id).unwrap();
        }
        for a in &self.attr_values {
            let value = a.value.as_ref().map_or("missing".to_string(), |l| l.to_string());
            writeln!(out, "attr {} . {} = {value}", a.object, a.attr).unwrap();
        }
        for l in &self.links {
            writeln!(out, "link {} {} {}", l.subject, v.fact(l.fact).verb_phrase, l.object).unwrap();
        }
        out
    }
}

fn load_err(line: usize, code: &'static str, message: impl Into<String>) -> EvalError {
    EvalError::Load { line, code, message: message.into() }
}

fn parse_value(text: &str, line: usize) -> Result<Option<Literal>, EvalError> {
    Ok(Some(match text {
        "missing" => return Ok(None),
        "true" => Literal::Boolean(true),
        "false" => Literal::Boolean(false),
        t if t.len() >= 2 && t.starts_with('"') && t.ends_with('"') => Literal::String(t[1..t.len() - 1].to_string()),
        t => Literal::Integer(
            t.parse()
                .map_err(|_| load_err(line, "E_SYNTAX", format!("bad attribute value `{t}`")))?,
        ),
    }))
}

/// Load a `.snap` file:
///
/// ```text
/// object c1 : customer
/// attr a1 . balance = 3
/// link c1 has a1
/// ```
pub fn load_snapshot(source: &str, v: &Vocabulary, m: &ClassModel) -> Result<Snapshot, EvalError> {
    let lines: Vec<(usize, &str)> = source
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let mut snap = Snapshot::default();

    // Objects first so that attributes and links may precede declarations.
    for &(n, l) in &lines {
        let words: Vec<&str> = l.split_whitespace().collect();
        if words[0] != "object" {
            continue;
        }
        let [_, id, ":", term] = words.as_slice() else {
            return Err(load_err(n, "E_SYNTAX", "expected `object <id> : <term>`"));
        };
        let class = m
            .class_of_term(term)
            .ok_or_else(|| load_err(n, "E_CLASS_UNKNOWN", format!("unknown term `{term}`")))?;
        if snap.object(id).is_some() {
            return Err(load_err(n, "E_DUPLICATE", format!("object `{id}` is already declared")));
        }
        snap.objects.push(SnapObject { id: id.to_string(), class: class.name.clone() });
    }

    for &(n, l) in &lines {
        let (keyword, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        match keyword {
            "object" => {}
            "attr" => {
                let (id, rest) = rest
                    .split_once('.')
                    .ok_or_else(|| load_err(n, "E_SYNTAX", "expected `attr <id> . <name> = <value>`"))?;
                let (name, value) = rest
                    .split_once('=')
                    .ok_or_else(|| load_err(n, "E_SYNTAX", "expected `attr <id> . <name> = <value>`"))?;
                let (id, name) = (id.trim(), name.trim());
                let obj = snap
                    .object(id)
                    .ok_or_else(|| load_err(n, "E_UNKNOWN_OBJECT", format!("unknown object `{id}`")))?;
                let attr = m.attribute(&obj.class, name).ok_or_else(|| {
                    load_err(n, "E_UNKNOWN_ATTRIBUTE", format!("class `{}` has no attribute `{name}`", obj.class))
                })?;
                let value = parse_value(value.trim(), n)?;
                if let Some(lit) = &value {
                    if lit.value_type() != attr.value_type {
                        return Err(load_err(
                            n,
                            "E_TYPE_MISMATCH",
                            format!("`{name}` is {}, got {lit}", attr.value_type),
                        ));
                    }
                }
                if snap.attr_values.iter().any(|a| a.object == id && a.attr == name) {
                    return Err(load_err(n, "E_DUPLICATE", format!("`{id}.{name}` is assigned twice")));
                }
                snap.attr_values.push(AttrEntry { object: id.into(), attr: name.into(), value });
            }
            "link" => {
                let words: Vec<&str> = rest.split_whitespace().collect();
                if words.len() < 3 {
                    return Err(load_err(n, "E_SYNTAX", "expected `link <id> <verb> <id>`"));
                }
                let (s, o) = (words[0], words[words.len() - 1]);
                let verb = words[1..words.len() - 1].join(" ");
                let term_of = |id: &str| {
                    snap.object(id)
                        .and_then(|obj| m.class(&obj.class))
                        .map(|c| c.term.clone())
                        .ok_or_else(|| load_err(n, "E_UNKNOWN_OBJECT", format!("unknown object `{id}`")))
                };
                let (st, ot) = (term_of(s)?, term_of(o)?);
                let fact = v
                    .facts()
                    .find(|(_, f)| {
                        f.is_relational()
                            && f.verb_phrase == verb
                            && v.conforms(&st, &f.subject)
                            && f.object.as_deref().is_some_and(|fo| v.conforms(&ot, fo))
                    })
                    .map(|(id, _)| id)
                    .ok_or_else(|| load_err(n, "E_UNKNOWN_FACT", format!("no fact type `{st} {verb} {ot}`")))?;
                let link = Link { fact, subject: s.into(), object: o.into() };
                if !snap.links.contains(&link) {
                    snap.links.push(link);
                }
            }
            other => return Err(load_err(n, "E_SYNTAX", format!("unknown declaration `{other}`"))),
        }
    }
    Ok(snap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocabulary::{derive_class_model, load_vocabulary};

    fn setup() -> (Vocabulary, ClassModel) {
        let v = load_vocabulary(
            "term customer\nterm account\nterm vip\nfact vip is-category-of customer\n\
             fact customer has account\nattribute account . balance : Integer\n\
             attribute customer . name : String\ncharacteristic account is frozen\n",
        )
        .unwrap();
        let m = derive_class_model(&v).unwrap();
        (v, m)
    }

    #[test]
    fn load_and_render() {
        let (v, m) = setup();
        let src = "# sample\nlink v1 has a1\nobject v1 : vip\nobject a1 : account\n\
                   attr a1 . balance = -3\nattr a1 . frozen = missing\nattr v1 . name = \"Ann Lee\"\n";
        let s = load_snapshot(src, &v, &m).unwrap();
        assert_eq!(s.objects[0], SnapObject { id: "v1".into(), class: "Vip".into() });
        assert_eq!(s.attr_values[0].value, Some(Literal::Integer(-3)));
        assert_eq!(s.attr_values[1].value, None);
        assert_eq!(s.attr_values[2].value, Some(Literal::String("Ann Lee".into())));
        assert_eq!(s.links.len(), 1);
        let text = s.to_snap_text(&v, &m);
        assert_eq!(load_snapshot(&text, &v, &m).unwrap(), s);
        assert!(text.contains("link v1 has a1\n"));
    }

    #[test]
    fn load_errors() {
        let (v, m) = setup();
        let code = |src: &str| load_snapshot(src, &v, &m).unwrap_err().code();
        assert_eq!(code("object b1 : bank"), "E_CLASS_UNKNOWN");
        assert_eq!(code("object a1 : account\nobject a1 : account"), "E_DUPLICATE");
        assert_eq!(code("object a1 : account\nattr a1 . colour = 1"), "E_UNKNOWN_ATTRIBUTE");
        assert_eq!(code("object a1 : account\nattr a1 . balance = \"x\""), "E_TYPE_MISMATCH");
        assert_eq!(code("object a1 : account\nattr a1 . balance = x"), "E_SYNTAX");
        assert_eq!(code("object a1 : account\nlink a1 has a1"), "E_UNKNOWN_FACT");
        assert_eq!(code("link c1 has a1"), "E_UNKNOWN_OBJECT");
        assert_eq!(code("thing"), "E_SYNTAX");
        let e = load_snapshot("\n\nobject b1 : bank", &v, &m).unwrap_err();
        assert!(matches!(e, EvalError::Load { line: 3, .. }));
    }
}
