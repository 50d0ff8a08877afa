use super::population::{Population, Schema};
use super::snapshot::Snapshot;
use super::EvalError;
use crate::sbvr::{Arg, Formulation, Quantifier, SbvrRule};
use crate::value::{CmpOp, Literal};
use crate::vocabulary::{derive_class_model, Vocabulary};

#[derive(Clone, Debug)]
enum SArg {
    Var(usize),
    Individual(String),
}

#[derive(Clone, Debug)]
enum Test {
    IsTrue,
    Cmp(CmpOp, Literal),
}

#[derive(Clone, Debug)]
enum SExpr {
    Quant { q: Quantifier, var: usize, class: usize, scope: Box<SExpr> },
    Link { fact: usize, args: [SArg; 2] },
    Attr { var: usize, slot: usize, test: Test },
    Not(Box<SExpr>),
    And(Box<SExpr>, Box<SExpr>),
    Or(Box<SExpr>, Box<SExpr>),
    Implies(Box<SExpr>, Box<SExpr>),
}

/// A rule resolved against a schema, ready to evaluate on many populations.
#[derive(Clone, Debug)]
pub struct CompiledRule {
    pub index: u32,
    negate: bool,
    body: SExpr,
    vars: usize,
}

fn compile(f: &Formulation, schema: &Schema, vars: &mut usize) -> Result<SExpr, EvalError> {
    let mut var = |v: crate::sbvr::VarId| {
        *vars = (*vars).max(v.0 as usize + 1);
        v.0 as usize
    };
    let slot = |name: &str| {
        schema
            .slot(name)
            .ok_or_else(|| EvalError::Model(format!("no attribute `{name}` in the class model")))
    };
    Ok(match f {
        Formulation::Quantification { quantifier, variable, over, scope } => SExpr::Quant {
            q: *quantifier,
            var: var(*variable),
            class: schema.class_of_term(over).ok_or_else(|| EvalError::ClassUnknown(over.clone()))?,
            scope: Box::new(compile(scope, schema, vars)?),
        },
        Formulation::Atomic { fact, args } => {
            let fact = schema
                .fact_slot(*fact)
                .ok_or_else(|| EvalError::Model(format!("fact type {} has no association", fact.0)))?;
            let mut conv = args.iter().map(|a| match a {
                Arg::Var(v) => SArg::Var(var(*v)),
                Arg::Individual(n) => SArg::Individual(n.clone()),
            });
            match (conv.next(), conv.next(), conv.next()) {
                (Some(a), Some(b), None) => SExpr::Link { fact, args: [a, b] },
                _ => return Err(EvalError::Model("fact type applied to the wrong number of arguments".into())),
            }
        }
        Formulation::CharacteristicTest { variable, characteristic } => SExpr::Attr {
            var: var(*variable),
            slot: slot(&characteristic.adjective)?,
            test: Test::IsTrue,
        },
        Formulation::AttrComparison { variable, attribute, op, literal } => SExpr::Attr {
            var: var(*variable),
            slot: slot(&attribute.name)?,
            test: Test::Cmp(*op, literal.clone()),
        },
        Formulation::Not(g) => SExpr::Not(Box::new(compile(g, schema, vars)?)),
        Formulation::And(a, b) => SExpr::And(Box::new(compile(a, schema, vars)?), Box::new(compile(b, schema, vars)?)),
        Formulation::Or(a, b) => SExpr::Or(Box::new(compile(a, schema, vars)?), Box::new(compile(b, schema, vars)?)),
        Formulation::Implies(a, b) => {
            SExpr::Implies(Box::new(compile(a, schema, vars)?), Box::new(compile(b, schema, vars)?))
        }
        Formulation::Projection { inner, .. } => compile(inner, schema, vars)?,
    })
}

fn object(arg: &SArg, env: &[u32], p: &Population) -> Option<u32> {
    match arg {
        SArg::Var(v) => Some(env[*v]),
        SArg::Individual(name) => p.find(name),
    }
}

fn eval(e: &SExpr, p: &Population, env: &mut [u32]) -> bool {
    match e {
        SExpr::Quant { q, var, class, scope } => {
            let domain = p.members(*class);
            let holds = |o: u32, env: &mut [u32]| {
                env[*var] = o;
                eval(scope, p, env)
            };
            match q {
                Quantifier::Universal => domain.iter().all(|&o| holds(o, env)),
                Quantifier::Existential => domain.iter().any(|&o| holds(o, env)),
                Quantifier::None => !domain.iter().any(|&o| holds(o, env)),
                q => {
                    let matching = domain.iter().filter(|&&o| holds(o, env)).count();
                    q.holds(matching, domain.len())
                }
            }
        }
        SExpr::Link { fact, args: [a, b] } => match (object(a, env, p), object(b, env, p)) {
            (Some(s), Some(o)) => p.has_link(*fact, s, o),
            _ => false,
        },
        // A missing value makes the ground fact false.
        SExpr::Attr { var, slot, test } => match (p.value(env[*var], *slot), test) {
            (Some(Literal::Boolean(b)), Test::IsTrue) => *b,
            (Some(v), Test::Cmp(op, lit)) => op.apply(v, lit).unwrap_or(false),
            _ => false,
        },
        SExpr::Not(g) => !eval(g, p, env),
        SExpr::And(a, b) => eval(a, p, env) && eval(b, p, env),
        SExpr::Or(a, b) => eval(a, p, env) || eval(b, p, env),
        SExpr::Implies(a, b) => !eval(a, p, env) || eval(b, p, env),
    }
}

impl CompiledRule {
    pub fn new(r: &SbvrRule, schema: &Schema) -> Result<Self, EvalError> {
        let mut vars = 0;
        let body = compile(&r.body, schema, &mut vars)?;
        Ok(CompiledRule { index: r.index, negate: r.modality.is_negative(), body, vars })
    }

    /// Two-valued truth of the rule, modality polarity applied.
    pub fn eval(&self, p: &Population) -> bool {
        let mut env = [0u32; 16];
        let holds = if self.vars <= env.len() {
            eval(&self.body, p, &mut env)
        } else {
            eval(&self.body, p, &mut vec![0; self.vars])
        };
        holds != self.negate
    }
}

/// Evaluate `r` on `s` with two-valued semantics.
pub fn eval_sbvr(r: &SbvrRule, s: &Snapshot, v: &Vocabulary) -> Result<bool, EvalError> {
    let m = derive_class_model(v).map_err(|e| EvalError::Model(e.to_string()))?;
    let schema = Schema::new(&m);
    let p = Population::from_snapshot(s, &schema)?;
    Ok(CompiledRule::new(r, &schema)?.eval(&p))
}
