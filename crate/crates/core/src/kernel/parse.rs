//! S-expression reader and the formula/term parser.
//!
//! Concrete syntax (comments run from `;` to end of line):
//!
//! ```text
//! formula := atom | (not f) | (and f f+) | (or f f+) | (implies f f)
//!          | (forall (x Sort) f) | (exists (x Sort) f)
//!          | (P ag t f) | (K ag t f) | (B ag t f) | (C t f)
//!          | (S ag t f) | (S ag ag t f) | (D ag t f) | (I ag t f)
//!          | (O ag t f happens-lit) | (O-legal ...) | (O-moral ...)
//! ```
//!
//! An atom is a Boolean-sorted term: a Boolean constant or a function
//! application with Boolean result. Integer tokens are Moment constants.
//! Symbols starting with `#` are local constants (prover eigenvariables);
//! their sort is inferred from the enclosing application profile.

use std::fmt;

use super::formula::{Formula, OughtFlavor};
use super::sig::{is_moment_literal, Signature};
use super::term::Term;
use super::KernelError;

/// Line/column source position, 1-based. `Position::none()` marks values
/// constructed programmatically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Position {
    pub line: u32,
    pub col: u32,
}

impl Position {
    pub fn none() -> Self {
        Position { line: 0, col: 0 }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "<builtin>")
        } else {
            write!(f, "{}:{}", self.line, self.col)
        }
    }
}

/// A read S-expression with source positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Sym(String, Position),
    List(Vec<Sexp>, Position),
}

impl Sexp {
    pub fn pos(&self) -> Position {
        match self {
            Sexp::Sym(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_sym(&self) -> Option<&str> {
        match self {
            Sexp::Sym(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn expect_sym(&self, what: &str) -> Result<&str, KernelError> {
        self.as_sym().ok_or_else(|| KernelError::Syntax {
            pos: self.pos(),
            msg: format!("expected {what}, found a list"),
        })
    }
}

struct Reader {
    src: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
}

impl Reader {
    fn new(src: &str) -> Self {
        Reader {
            src: src.chars().collect(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn position(&self) -> Position {
        Position {
            line: self.line,
            col: self.col,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = *self.src.get(self.pos)?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<char> {
        self.src.get(self.pos).copied()
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some(';') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
    }

    fn read(&mut self) -> Result<Option<Sexp>, KernelError> {
        self.skip_trivia();
        let start = self.position();
        match self.peek() {
            None => Ok(None),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        Some(')') => {
                            self.bump();
                            return Ok(Some(Sexp::List(items, start)));
                        }
                        None => {
                            return Err(KernelError::Syntax {
                                pos: start,
                                msg: "unclosed parenthesis".into(),
                            })
                        }
                        _ => match self.read()? {
                            Some(s) => items.push(s),
                            None => {
                                return Err(KernelError::Syntax {
                                    pos: start,
                                    msg: "unclosed parenthesis".into(),
                                })
                            }
                        },
                    }
                }
            }
            Some(')') => Err(KernelError::Syntax {
                pos: start,
                msg: "unmatched `)`".into(),
            }),
            Some(_) => {
                let mut sym = String::new();
                while let Some(c) = self.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    sym.push(c);
                    self.bump();
                }
                Ok(Some(Sexp::Sym(sym, start)))
            }
        }
    }
}

/// Read every top-level S-expression in `text`.
pub fn read_sexps(text: &str) -> Result<Vec<Sexp>, KernelError> {
    let mut reader = Reader::new(text);
    let mut out = Vec::new();
    while let Some(s) = reader.read()? {
        out.push(s);
    }
    Ok(out)
}

fn single_sexp(text: &str) -> Result<Sexp, KernelError> {
    let mut all = read_sexps(text)?;
    match all.len() {
        1 => Ok(all.remove(0)),
        0 => Err(KernelError::Syntax {
            pos: Position { line: 1, col: 1 },
            msg: "empty input".into(),
        }),
        _ => Err(KernelError::Syntax {
            pos: all[1].pos(),
            msg: "trailing input after first expression".into(),
        }),
    }
}

/// Connective and operator heads; these cannot be user symbols in formula
/// position.
const FORMULA_HEADS: &[&str] = &[
    "not", "and", "or", "implies", "forall", "exists", "P", "K", "B", "C", "S", "D", "I", "O",
    "O-legal", "O-moral",
];

/// Bound-variable environment during parsing: name -> sort.
pub type VarEnv = Vec<(String, String)>;

/// Parse a formula in the scenario syntax against `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, KernelError> {
    let sexp = single_sexp(text)?;
    formula_from_sexp(&sexp, sig, &mut Vec::new())
}

/// Parse a term in the scenario syntax against `sig`.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, KernelError> {
    let sexp = single_sexp(text)?;
    term_from_sexp(&sexp, sig, &Vec::new(), None)
}

pub fn formula_from_sexp(
    sexp: &Sexp,
    sig: &Signature,
    env: &mut VarEnv,
) -> Result<Formula, KernelError> {
    match sexp {
        Sexp::Sym(name, pos) => {
            if name == "false" {
                return Ok(Formula::falsum());
            }
            let term = term_from_sexp(sexp, sig, env, None)?;
            expect_boolean(&term, *pos)?;
            if matches!(term, Term::Var { .. }) {
                return Err(KernelError::Sort {
                    expected: "first-order atom".into(),
                    found: "Boolean variable".into(),
                    pos: *pos,
                });
            }
            Ok(Formula::Atom(term))
        }
        Sexp::List(items, pos) => {
            let head = match items.first() {
                Some(Sexp::Sym(s, _)) => s.as_str(),
                Some(other) => {
                    return Err(KernelError::Syntax {
                        pos: other.pos(),
                        msg: "expected an operator or function symbol".into(),
                    })
                }
                None => {
                    return Err(KernelError::Syntax {
                        pos: *pos,
                        msg: "empty list".into(),
                    })
                }
            };
            let args = &items[1..];
            match head {
                "not" => {
                    arity(args, 1, "not", *pos)?;
                    Ok(Formula::not(formula_from_sexp(&args[0], sig, env)?))
                }
                "and" | "or" => {
                    if args.len() < 2 {
                        return Err(KernelError::Syntax {
                            pos: *pos,
                            msg: format!("`{head}` takes at least two formulas"),
                        });
                    }
                    let fs = args
                        .iter()
                        .map(|a| formula_from_sexp(a, sig, env))
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok(if head == "and" {
                        Formula::And(fs)
                    } else {
                        Formula::Or(fs)
                    })
                }
                "implies" => {
                    arity(args, 2, "implies", *pos)?;
                    Ok(Formula::implies(
                        formula_from_sexp(&args[0], sig, env)?,
                        formula_from_sexp(&args[1], sig, env)?,
                    ))
                }
                "forall" | "exists" => {
                    arity(args, 2, head, *pos)?;
                    let (var, sort) = binder_from_sexp(&args[0], sig)?;
                    env.push((var.clone(), sort.clone()));
                    let body = formula_from_sexp(&args[1], sig, env);
                    env.pop();
                    let body = Box::new(body?);
                    Ok(if head == "forall" {
                        Formula::ForAll { var, sort, body }
                    } else {
                        Formula::Exists { var, sort, body }
                    })
                }
                "P" | "K" | "B" | "D" | "I" => {
                    arity(args, 3, head, *pos)?;
                    let agent = sorted_term(&args[0], sig, env, "Agent")?;
                    let time = sorted_term(&args[1], sig, env, "Moment")?;
                    let body = Box::new(formula_from_sexp(&args[2], sig, env)?);
                    Ok(match head {
                        "P" => Formula::Perceives { agent, time, body },
                        "K" => Formula::Knows { agent, time, body },
                        "B" => Formula::Believes { agent, time, body },
                        "D" => Formula::Desires { agent, time, body },
                        _ => Formula::Intends { agent, time, body },
                    })
                }
                "C" => {
                    arity(args, 2, "C", *pos)?;
                    let time = sorted_term(&args[0], sig, env, "Moment")?;
                    let body = Box::new(formula_from_sexp(&args[1], sig, env)?);
                    Ok(Formula::Common { time, body })
                }
                "S" => match args.len() {
                    3 => {
                        let agent = sorted_term(&args[0], sig, env, "Agent")?;
                        let time = sorted_term(&args[1], sig, env, "Moment")?;
                        let body = Box::new(formula_from_sexp(&args[2], sig, env)?);
                        Ok(Formula::Says { agent, time, body })
                    }
                    4 => {
                        let agent = sorted_term(&args[0], sig, env, "Agent")?;
                        let to = sorted_term(&args[1], sig, env, "Agent")?;
                        let time = sorted_term(&args[2], sig, env, "Moment")?;
                        let body = Box::new(formula_from_sexp(&args[3], sig, env)?);
                        Ok(Formula::SaysTo {
                            agent,
                            to,
                            time,
                            body,
                        })
                    }
                    n => Err(KernelError::Syntax {
                        pos: *pos,
                        msg: format!("`S` takes 3 or 4 arguments, found {n}"),
                    }),
                },
                "O" | "O-legal" | "O-moral" => {
                    arity(args, 4, head, *pos)?;
                    let agent = sorted_term(&args[0], sig, env, "Agent")?;
                    let time = sorted_term(&args[1], sig, env, "Moment")?;
                    let condition = Box::new(formula_from_sexp(&args[2], sig, env)?);
                    let action = Box::new(formula_from_sexp(&args[3], sig, env)?);
                    if !action.is_happens_action_literal() {
                        return Err(KernelError::Sort {
                            expected: "(possibly negated) happens literal over action(_, _)"
                                .into(),
                            found: "other formula".into(),
                            pos: args[3].pos(),
                        });
                    }
                    let flavor = match head {
                        "O" => OughtFlavor::Unflagged,
                        "O-legal" => OughtFlavor::Legal,
                        _ => OughtFlavor::Moral,
                    };
                    Ok(Formula::Ought {
                        agent,
                        time,
                        condition,
                        action,
                        flavor,
                    })
                }
                _ => {
                    let term = term_from_sexp(sexp, sig, env, None)?;
                    expect_boolean(&term, *pos)?;
                    Ok(Formula::Atom(term))
                }
            }
        }
    }
}

fn binder_from_sexp(sexp: &Sexp, sig: &Signature) -> Result<(String, String), KernelError> {
    match sexp {
        Sexp::List(items, pos) if items.len() == 2 => {
            let var = items[0].expect_sym("a variable name")?.to_string();
            let sort = items[1].expect_sym("a sort name")?.to_string();
            if !sig.has_sort(&sort) {
                return Err(KernelError::UnknownSymbol {
                    name: sort,
                    pos: items[1].pos(),
                });
            }
            if sort == "Boolean" {
                return Err(KernelError::Sort {
                    expected: "first-order quantification".into(),
                    found: "Boolean-sorted variable".into(),
                    pos: *pos,
                });
            }
            if is_moment_literal(&var) || var.starts_with('#') {
                return Err(KernelError::Syntax {
                    pos: items[0].pos(),
                    msg: format!("`{var}` is not a legal variable name"),
                });
            }
            Ok((var, sort))
        }
        other => Err(KernelError::Syntax {
            pos: other.pos(),
            msg: "expected a binder of the form (name Sort)".into(),
        }),
    }
}

fn sorted_term(
    sexp: &Sexp,
    sig: &Signature,
    env: &VarEnv,
    expected: &str,
) -> Result<Term, KernelError> {
    let t = term_from_sexp(sexp, sig, env, Some(expected))?;
    if !sig.is_subsort(t.sort(), expected) {
        return Err(KernelError::Sort {
            expected: expected.into(),
            found: t.sort().into(),
            pos: sexp.pos(),
        });
    }
    Ok(t)
}

fn expect_boolean(t: &Term, pos: Position) -> Result<(), KernelError> {
    if t.sort() != "Boolean" {
        return Err(KernelError::Sort {
            expected: "Boolean".into(),
            found: t.sort().into(),
            pos,
        });
    }
    Ok(())
}

/// Parse a term. `expected` is the sort required by the enclosing position,
/// used to give `#`-local constants their sort.
pub fn term_from_sexp(
    sexp: &Sexp,
    sig: &Signature,
    env: &VarEnv,
    expected: Option<&str>,
) -> Result<Term, KernelError> {
    match sexp {
        Sexp::Sym(name, pos) => {
            if let Some((_, sort)) = env.iter().rev().find(|(n, _)| n == name) {
                return Ok(Term::Var {
                    name: name.clone(),
                    sort: sort.clone(),
                });
            }
            if let Some(stripped) = name.strip_prefix('#') {
                if stripped.is_empty() {
                    return Err(KernelError::Syntax {
                        pos: *pos,
                        msg: "empty local-constant name".into(),
                    });
                }
                return match expected {
                    Some(sort) => Ok(Term::Const {
                        name: name.clone(),
                        sort: sort.into(),
                    }),
                    None => Err(KernelError::UnknownSymbol {
                        name: name.clone(),
                        pos: *pos,
                    }),
                };
            }
            sig.constant(name).ok_or_else(|| KernelError::UnknownSymbol {
                name: name.clone(),
                pos: *pos,
            })
        }
        Sexp::List(items, pos) => {
            let head = match items.first() {
                Some(Sexp::Sym(s, _)) => s.clone(),
                _ => {
                    return Err(KernelError::Syntax {
                        pos: *pos,
                        msg: "expected a function symbol".into(),
                    })
                }
            };
            if FORMULA_HEADS.contains(&head.as_str()) {
                return Err(KernelError::Syntax {
                    pos: *pos,
                    msg: format!("`{head}` is a formula operator, not a function symbol"),
                });
            }
            let (params, _) = sig
                .func_profile(&head)
                .ok_or_else(|| KernelError::UnknownSymbol {
                    name: head.clone(),
                    pos: *pos,
                })?;
            let params: Vec<String> = params.to_vec();
            if params.len() != items.len() - 1 {
                return Err(KernelError::Syntax {
                    pos: *pos,
                    msg: format!(
                        "`{head}` takes {} arguments, found {}",
                        params.len(),
                        items.len() - 1
                    ),
                });
            }
            let mut args = Vec::with_capacity(params.len());
            for (param, item) in params.iter().zip(&items[1..]) {
                let arg = term_from_sexp(item, sig, env, Some(param))?;
                if !sig.is_subsort(arg.sort(), param) {
                    return Err(KernelError::Sort {
                        expected: param.clone(),
                        found: arg.sort().into(),
                        pos: item.pos(),
                    });
                }
                args.push(arg);
            }
            sig.app(&head, args).map_err(|e| match e {
                KernelError::Sort {
                    expected, found, ..
                } => KernelError::Sort {
                    expected,
                    found,
                    pos: *pos,
                },
                other => other,
            })
        }
    }
}

fn arity(args: &[Sexp], n: usize, head: &str, pos: Position) -> Result<(), KernelError> {
    if args.len() != n {
        return Err(KernelError::Syntax {
            pos,
            msg: format!("`{head}` takes {n} arguments, found {}", args.len()),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::print::pretty;

    fn sig() -> Signature {
        let mut sig = Signature::new();
        sig.declare_const("jack", "Agent").unwrap();
        sig.declare_const("running", "ActionType").unwrap();
        sig.declare_const("f", "Fluent").unwrap();
        sig
    }

    #[test]
    fn action_term_is_action_sorted() {
        let sig = sig();
        let t = parse_term("(action jack running)", &sig).unwrap();
        assert_eq!(t.sort(), "Action");
    }

    #[test]
    fn holds_atom_parses() {
        let sig = sig();
        let f = parse_formula("(holds f 3)", &sig).unwrap();
        assert!(matches!(f, Formula::Atom(_)));
    }

    #[test]
    fn swapped_holds_arguments_rejected() {
        let sig = sig();
        let err = parse_formula("(holds 3 f)", &sig).unwrap_err();
        match err {
            KernelError::Sort {
                expected,
                found,
                pos,
            } => {
                assert_eq!(expected, "Fluent");
                assert_eq!(found, "Moment");
                assert_eq!(pos, Position { line: 1, col: 8 });
            }
            other => panic!("expected sort error, got {other:?}"),
        }
    }

    #[test]
    fn action_terms_accepted_where_event_expected() {
        let sig = sig();
        // happens: Event x Moment, action(...) : Action, Action <= Event.
        parse_formula("(happens (action jack running) 2)", &sig).unwrap();
    }

    #[test]
    fn unknown_symbol_reported_with_position() {
        let sig = sig();
        let err = parse_formula("(holds g 3)", &sig).unwrap_err();
        assert!(matches!(err, KernelError::UnknownSymbol { ref name, .. } if name == "g"));
    }

    #[test]
    fn comments_and_whitespace() {
        let sig = sig();
        let f = parse_formula("; a remark\n(holds f 3) ; trailing", &sig).unwrap();
        assert_eq!(pretty(&f), "(holds f 3)");
    }

    #[test]
    fn both_says_arities() {
        let mut sig = sig();
        sig.declare_const("jill", "Agent").unwrap();
        let f3 = parse_formula("(S jack 1 (holds f 3))", &sig).unwrap();
        assert!(matches!(f3, Formula::Says { .. }));
        let f4 = parse_formula("(S jack jill 1 (holds f 3))", &sig).unwrap();
        assert!(matches!(f4, Formula::SaysTo { .. }));
    }

    #[test]
    fn ought_requires_happens_literal() {
        let sig = sig();
        let ok = parse_formula(
            "(O jack 1 (holds f 1) (happens (action jack running) 2))",
            &sig,
        )
        .unwrap();
        assert!(matches!(
            ok,
            Formula::Ought {
                flavor: OughtFlavor::Unflagged,
                ..
            }
        ));
        let neg = parse_formula(
            "(O-moral jack 1 (holds f 1) (not (happens (action jack running) 2)))",
            &sig,
        )
        .unwrap();
        assert!(matches!(
            neg,
            Formula::Ought {
                flavor: OughtFlavor::Moral,
                ..
            }
        ));
        assert!(parse_formula("(O jack 1 (holds f 1) (holds f 2))", &sig).is_err());
    }

    #[test]
    fn quantifier_binds_variable() {
        let sig = sig();
        let f = parse_formula("(forall (t Moment) (holds f t))", &sig).unwrap();
        assert!(f.is_closed());
        assert_eq!(pretty(&f), "(forall (t Moment) (holds f t))");
    }

    #[test]
    fn boolean_quantifier_rejected() {
        let sig = sig();
        assert!(parse_formula("(forall (p Boolean) (holds f 1))", &sig).is_err());
    }
}
