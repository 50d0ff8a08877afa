use super::ast::{BoolOpKind, OclConstraint, OclExpr};
use crate::value::Literal;

// Binding strength, tightest first: navigation and calls, not, comparison,
// and, or, implies.
const PREC_ATOM: u8 = 6;
const PREC_NOT: u8 = 5;
const PREC_CMP: u8 = 4;

fn precedence(e: &OclExpr) -> u8 {
    match e {
        OclExpr::Not { .. } => PREC_NOT,
        OclExpr::Cmp { .. } => PREC_CMP,
        OclExpr::BoolOp { op, .. } => match op {
            BoolOpKind::And => 3,
            BoolOpKind::Or => 2,
            BoolOpKind::Implies => 1,
        },
        _ => PREC_ATOM,
    }
}

fn write_lit(out: &mut String, lit: &Literal) {
    match lit {
        Literal::Integer(n) => out.push_str(&n.to_string()),
        Literal::Boolean(b) => out.push_str(if *b { "true" } else { "false" }),
        Literal::String(s) => {
            out.push('\'');
            for c in s.chars() {
                if c == '\'' || c == '\\' {
                    out.push('\\');
                }
                out.push(c);
            }
            out.push('\'');
        }
    }
}

fn write_at(out: &mut String, e: &OclExpr, min: u8) {
    if precedence(e) < min {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    } else {
        write_expr(out, e);
    }
}

fn write_expr(out: &mut String, e: &OclExpr) {
    match e {
        OclExpr::SelfRef => out.push_str("self"),
        OclExpr::VarRef { name } => out.push_str(name),
        OclExpr::AttrNav { src, attr } => {
            write_at(out, src, PREC_ATOM);
            out.push('.');
            out.push_str(attr);
        }
        OclExpr::AssocNav { src, end } => {
            write_at(out, src, PREC_ATOM);
            out.push('.');
            out.push_str(end);
        }
        OclExpr::AllInstances { class } => {
            out.push_str(class);
            out.push_str(".allInstances()");
        }
        OclExpr::IterCall { src, iter, var, body } => {
            write_at(out, src, PREC_ATOM);
            out.push_str("->");
            out.push_str(iter.name());
            out.push('(');
            out.push_str(var);
            out.push_str(" | ");
            write_expr(out, body);
            out.push(')');
        }
        OclExpr::CollOp { src, op } => {
            write_at(out, src, PREC_ATOM);
            out.push_str("->");
            out.push_str(op.name());
            out.push_str("()");
        }
        OclExpr::Cmp { op, l, r } => {
            write_at(out, l, PREC_NOT);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_at(out, r, PREC_NOT);
        }
        OclExpr::BoolOp { op, l, r } => {
            let p = precedence(e);
            // and/or associate to the left; implies always brackets its peers.
            let (lmin, rmin) = match op {
                BoolOpKind::Implies => (p + 1, p + 1),
                _ => (p, p + 1),
            };
            write_at(out, l, lmin);
            out.push(' ');
            out.push_str(op.name());
            out.push(' ');
            write_at(out, r, rmin);
        }
        OclExpr::Not { inner } => {
            out.push_str("not ");
            write_at(out, inner, PREC_NOT);
        }
        OclExpr::Lit(lit) => write_lit(out, lit),
    }
}

pub fn print_expr(e: &OclExpr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

/// Two lines: the context declaration, then `<kind> <label>: <body>`.
pub fn print_constraint(c: &OclConstraint) -> String {
    let mut out = format!("context {}", c.context_class);
    if let Some(op) = &c.operation {
        let params: Vec<String> = op.params.iter().map(|(n, t)| format!("{n} : {t}")).collect();
        out.push_str(&format!("::{}({})", op.name, params.join(", ")));
    }
    out.push('\n');
    out.push_str(&format!("{} {}: ", c.kind, c.label));
    write_expr(&mut out, &c.body);
    out
}

/// Constraints separated by one blank line, with a final newline.
pub fn print_ocl_file<'a>(constraints: impl IntoIterator<Item = &'a OclConstraint>) -> String {
    let blocks: Vec<String> = constraints.into_iter().map(print_constraint).collect();
    if blocks.is_empty() {
        return String::new();
    }
    let mut out = blocks.join("\n\n");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ocl::{CollOpKind, ConstraintKind, IterKind, OclCmp, OperationRef};

    fn inv(label: &str, body: OclExpr) -> OclConstraint {
        OclConstraint {
            context_class: "Customer".into(),
            operation: None,
            kind: ConstraintKind::Inv,
            label: label.into(),
            body,
        }
    }

    fn b(name: &str) -> OclExpr {
        OclExpr::SelfRef.attr(name)
    }

    #[test]
    fn invariant_layout() {
        let c = inv("rule_1", OclExpr::SelfRef.nav("account").coll(CollOpKind::NotEmpty));
        assert_eq!(print_constraint(&c), "context Customer\ninv rule_1: self.account->notEmpty()");
        let c = inv("rule_9", OclExpr::Lit(Literal::Boolean(true)));
        assert_eq!(print_constraint(&c), "context Customer\ninv rule_9: true");
    }

    #[test]
    fn operation_layout() {
        let c = OclConstraint {
            context_class: "Customer".into(),
            operation: Some(OperationRef {
                name: "opens".into(),
                params: vec![("account".into(), "Account".into())],
            }),
            kind: ConstraintKind::Post,
            label: "rule_3".into(),
            body: OclExpr::cmp(OclCmp::Ge, OclExpr::var("account").attr("balance"), OclExpr::int(0)),
        };
        assert_eq!(
            print_constraint(&c),
            "context Customer::opens(account : Account)\npost rule_3: account.balance >= 0"
        );
    }

    #[test]
    fn minimal_parentheses() {
        let cmp = OclExpr::cmp(OclCmp::Gt, OclExpr::SelfRef.nav("account").coll(CollOpKind::Size), OclExpr::int(100));
        assert_eq!(print_expr(&OclExpr::not(cmp.clone())), "not (self.account->size() > 100)");
        assert_eq!(print_expr(&OclExpr::not(b("premium"))), "not self.premium");
        assert_eq!(print_expr(&OclExpr::not(OclExpr::not(b("p")))), "not not self.p");

        let and = OclExpr::and(OclExpr::or(b("a"), b("b")), b("c"));
        assert_eq!(print_expr(&and), "(self.a or self.b) and self.c");
        let or = OclExpr::or(b("a"), OclExpr::and(b("b"), b("c")));
        assert_eq!(print_expr(&or), "self.a or self.b and self.c");
        let left = OclExpr::and(OclExpr::and(b("a"), b("b")), b("c"));
        assert_eq!(print_expr(&left), "self.a and self.b and self.c");
        let right = OclExpr::and(b("a"), OclExpr::and(b("b"), b("c")));
        assert_eq!(print_expr(&right), "self.a and (self.b and self.c)");

        let imp = OclExpr::implies(OclExpr::implies(b("a"), b("b")), b("c"));
        assert_eq!(print_expr(&imp), "(self.a implies self.b) implies self.c");
        let imp = OclExpr::implies(b("a"), OclExpr::implies(b("b"), b("c")));
        assert_eq!(print_expr(&imp), "self.a implies (self.b implies self.c)");
        let imp = OclExpr::implies(OclExpr::or(b("a"), b("b")), cmp);
        assert_eq!(print_expr(&imp), "self.a or self.b implies self.account->size() > 100");
    }

    #[test]
    fn iterators_and_literals() {
        let e = OclExpr::SelfRef
            .nav("account")
            .iterate(IterKind::Select, "a", b("x"))
            .coll(CollOpKind::IsEmpty);
        assert_eq!(print_expr(&e), "self.account->select(a | self.x)->isEmpty()");
        let e = OclExpr::all_instances("Account").iterate(
            IterKind::ForAll,
            "a",
            OclExpr::cmp(OclCmp::Eq, OclExpr::var("a").attr("owner"), OclExpr::Lit(Literal::String("it's".into()))),
        );
        assert_eq!(print_expr(&e), "Account.allInstances()->forAll(a | a.owner = 'it\\'s')");
    }

    #[test]
    fn file_layout() {
        let a = inv("rule_1", b("p"));
        let c = inv("rule_2", b("q"));
        assert_eq!(
            print_ocl_file([&a, &c]),
            "context Customer\ninv rule_1: self.p\n\ncontext Customer\ninv rule_2: self.q\n"
        );
        assert_eq!(print_ocl_file([]), "");
    }
}
