//! Formulas: a sorted first-order core under modal operators.

use std::collections::BTreeSet;

use super::sig::Signature;
use super::term::Term;
use super::KernelError;

/// Flavor tag on the dyadic deontic operator. Inference treats all flavors
/// alike; only the agents runtime's override policy distinguishes them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OughtFlavor {
    Unflagged,
    Legal,
    Moral,
}

/// Abstract syntax of the logic: first-order connectives and quantifiers,
/// plus perception (P), knowledge (K), common knowledge (C), communication
/// (S), belief (B), desire (D), intention (I), and the dyadic obligation
/// operator (O).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    /// A Boolean-sorted term.
    Atom(Term),
    Not(Box<Formula>),
    /// Conjunction of two or more formulas.
    And(Vec<Formula>),
    /// Disjunction of two or more formulas.
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    ForAll {
        var: String,
        sort: String,
        body: Box<Formula>,
    },
    Exists {
        var: String,
        sort: String,
        body: Box<Formula>,
    },
    Perceives {
        agent: Term,
        time: Term,
        body: Box<Formula>,
    },
    Knows {
        agent: Term,
        time: Term,
        body: Box<Formula>,
    },
    Common {
        time: Term,
        body: Box<Formula>,
    },
    Says {
        agent: Term,
        time: Term,
        body: Box<Formula>,
    },
    SaysTo {
        agent: Term,
        to: Term,
        time: Term,
        body: Box<Formula>,
    },
    Believes {
        agent: Term,
        time: Term,
        body: Box<Formula>,
    },
    Desires {
        agent: Term,
        time: Term,
        body: Box<Formula>,
    },
    Intends {
        agent: Term,
        time: Term,
        body: Box<Formula>,
    },
    /// `O(agent, time, condition, action)`: under `condition` the agent is
    /// obliged to see to `action`, a positive or negated `happens` literal
    /// over an `action(_, _)` event.
    Ought {
        agent: Term,
        time: Term,
        condition: Box<Formula>,
        action: Box<Formula>,
        flavor: OughtFlavor,
    },
}

impl Formula {
    /// The falsum proposition: the built-in Boolean constant `false`.
    pub fn falsum() -> Formula {
        Formula::Atom(Term::Const {
            name: "false".into(),
            sort: "Boolean".into(),
        })
    }

    pub fn is_falsum(&self) -> bool {
        matches!(self, Formula::Atom(Term::Const { name, .. }) if name == "false")
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Conjunction helper: a single conjunct stays bare.
    pub fn conjoin(mut fs: Vec<Formula>) -> Formula {
        match fs.len() {
            0 => panic!("conjoin of zero formulas"),
            1 => fs.remove(0),
            _ => Formula::And(fs),
        }
    }

    /// Is this a positive or negated `happens(action(_, _), _)` literal?
    pub fn is_happens_action_literal(&self) -> bool {
        let inner = match self {
            Formula::Not(f) => f.as_ref(),
            other => other,
        };
        match inner {
            Formula::Atom(Term::App { func, args, .. }) if func == "happens" => {
                matches!(&args[0], Term::App { func, .. } if func == "action")
            }
            _ => false,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(t) => t.size(),
            Formula::Not(f) => 1 + f.size(),
            Formula::And(fs) | Formula::Or(fs) => 1 + fs.iter().map(Formula::size).sum::<usize>(),
            Formula::Implies(a, b) => 1 + a.size() + b.size(),
            Formula::ForAll { body, .. } | Formula::Exists { body, .. } => 2 + body.size(),
            Formula::Perceives { agent, time, body }
            | Formula::Knows { agent, time, body }
            | Formula::Says { agent, time, body }
            | Formula::Believes { agent, time, body }
            | Formula::Desires { agent, time, body }
            | Formula::Intends { agent, time, body } => {
                1 + agent.size() + time.size() + body.size()
            }
            Formula::Common { time, body } => 1 + time.size() + body.size(),
            Formula::SaysTo {
                agent,
                to,
                time,
                body,
            } => 1 + agent.size() + to.size() + time.size() + body.size(),
            Formula::Ought {
                agent,
                time,
                condition,
                action,
                ..
            } => 1 + agent.size() + time.size() + condition.size() + action.size(),
        }
    }

    /// Free variables with their sorts.
    pub fn free_vars(&self) -> BTreeSet<(String, String)> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<(String, String)>) {
        let term_vars = |t: &Term, bound: &Vec<String>, out: &mut BTreeSet<(String, String)>| {
            let mut vs = BTreeSet::new();
            t.free_vars(&mut vs);
            for v in vs {
                if !bound.contains(&v.0) {
                    out.insert(v);
                }
            }
        };
        match self {
            Formula::Atom(t) => term_vars(t, bound, out),
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_free(bound, out);
                }
            }
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::ForAll { var, body, .. } | Formula::Exists { var, body, .. } => {
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Formula::Perceives { agent, time, body }
            | Formula::Knows { agent, time, body }
            | Formula::Says { agent, time, body }
            | Formula::Believes { agent, time, body }
            | Formula::Desires { agent, time, body }
            | Formula::Intends { agent, time, body } => {
                term_vars(agent, bound, out);
                term_vars(time, bound, out);
                body.collect_free(bound, out);
            }
            Formula::Common { time, body } => {
                term_vars(time, bound, out);
                body.collect_free(bound, out);
            }
            Formula::SaysTo {
                agent,
                to,
                time,
                body,
            } => {
                term_vars(agent, bound, out);
                term_vars(to, bound, out);
                term_vars(time, bound, out);
                body.collect_free(bound, out);
            }
            Formula::Ought {
                agent,
                time,
                condition,
                action,
                ..
            } => {
                term_vars(agent, bound, out);
                term_vars(time, bound, out);
                condition.collect_free(bound, out);
                action.collect_free(bound, out);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// All constant names occurring in the formula.
    pub fn constants(&self, out: &mut BTreeSet<String>) {
        self.visit_terms(&mut |t| t.constants(out));
    }

    pub fn contains_const(&self, name: &str) -> bool {
        let mut found = false;
        self.visit_terms(&mut |t| {
            if t.contains_const(name) {
                found = true;
            }
        });
        found
    }

    /// Ground terms occurring in the formula (subterms included).
    pub fn ground_terms(&self, out: &mut Vec<Term>) {
        self.visit_terms(&mut |t| t.ground_subterms(out));
    }

    /// Visit every term position (modal arguments included).
    pub fn visit_terms<F: FnMut(&Term)>(&self, f: &mut F) {
        match self {
            Formula::Atom(t) => f(t),
            Formula::Not(g) => g.visit_terms(f),
            Formula::And(fs) | Formula::Or(fs) => {
                for g in fs {
                    g.visit_terms(f);
                }
            }
            Formula::Implies(a, b) => {
                a.visit_terms(f);
                b.visit_terms(f);
            }
            Formula::ForAll { body, .. } | Formula::Exists { body, .. } => body.visit_terms(f),
            Formula::Perceives { agent, time, body }
            | Formula::Knows { agent, time, body }
            | Formula::Says { agent, time, body }
            | Formula::Believes { agent, time, body }
            | Formula::Desires { agent, time, body }
            | Formula::Intends { agent, time, body } => {
                f(agent);
                f(time);
                body.visit_terms(f);
            }
            Formula::Common { time, body } => {
                f(time);
                body.visit_terms(f);
            }
            Formula::SaysTo {
                agent,
                to,
                time,
                body,
            } => {
                f(agent);
                f(to);
                f(time);
                body.visit_terms(f);
            }
            Formula::Ought {
                agent,
                time,
                condition,
                action,
                ..
            } => {
                f(agent);
                f(time);
                condition.visit_terms(f);
                action.visit_terms(f);
            }
        }
    }

    /// Re-check sorts throughout the formula: every term well-sorted, atoms
    /// Boolean, modal arguments Agent/Moment-sorted, and the obligation's
    /// fourth argument a `happens` action literal.
    pub fn sort_check(&self, sig: &Signature) -> Result<(), KernelError> {
        let agent_time =
            |agent: &Term, time: &Term, sig: &Signature| -> Result<(), KernelError> {
                sig.check_term(agent)?;
                sig.check_term(time)?;
                if !sig.is_subsort(agent.sort(), "Agent") {
                    return Err(KernelError::sort("Agent", agent.sort().to_string()));
                }
                if !sig.is_subsort(time.sort(), "Moment") {
                    return Err(KernelError::sort("Moment", time.sort().to_string()));
                }
                Ok(())
            };
        match self {
            Formula::Atom(t) => {
                sig.check_term(t)?;
                if t.sort() != "Boolean" {
                    return Err(KernelError::sort("Boolean", t.sort().to_string()));
                }
                if matches!(t, Term::Var { .. }) {
                    return Err(KernelError::sort(
                        "first-order atom",
                        "Boolean variable".to_string(),
                    ));
                }
                Ok(())
            }
            Formula::Not(f) => f.sort_check(sig),
            Formula::And(fs) | Formula::Or(fs) => {
                if fs.len() < 2 {
                    return Err(KernelError::sort(
                        "two or more operands",
                        format!("{} operand(s)", fs.len()),
                    ));
                }
                fs.iter().try_for_each(|f| f.sort_check(sig))
            }
            Formula::Implies(a, b) => {
                a.sort_check(sig)?;
                b.sort_check(sig)
            }
            Formula::ForAll { sort, body, .. } | Formula::Exists { sort, body, .. } => {
                if !sig.has_sort(sort) {
                    return Err(KernelError::UnknownSymbol {
                        name: sort.clone(),
                        pos: super::Position::none(),
                    });
                }
                if sort == "Boolean" {
                    return Err(KernelError::sort(
                        "first-order quantification",
                        "Boolean-sorted variable".to_string(),
                    ));
                }
                body.sort_check(sig)
            }
            Formula::Perceives { agent, time, body }
            | Formula::Knows { agent, time, body }
            | Formula::Says { agent, time, body }
            | Formula::Believes { agent, time, body }
            | Formula::Desires { agent, time, body }
            | Formula::Intends { agent, time, body } => {
                agent_time(agent, time, sig)?;
                body.sort_check(sig)
            }
            Formula::Common { time, body } => {
                sig.check_term(time)?;
                if !sig.is_subsort(time.sort(), "Moment") {
                    return Err(KernelError::sort("Moment", time.sort().to_string()));
                }
                body.sort_check(sig)
            }
            Formula::SaysTo {
                agent,
                to,
                time,
                body,
            } => {
                agent_time(agent, time, sig)?;
                sig.check_term(to)?;
                if !sig.is_subsort(to.sort(), "Agent") {
                    return Err(KernelError::sort("Agent", to.sort().to_string()));
                }
                body.sort_check(sig)
            }
            Formula::Ought {
                agent,
                time,
                condition,
                action,
                ..
            } => {
                agent_time(agent, time, sig)?;
                condition.sort_check(sig)?;
                action.sort_check(sig)?;
                if !action.is_happens_action_literal() {
                    return Err(KernelError::sort(
                        "(possibly negated) happens literal over action(_, _)",
                        "other formula".to_string(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Alpha-equivalence: structural equality up to renaming of bound variables.
pub fn alpha_eq(a: &Formula, b: &Formula) -> bool {
    alpha_eq_in(a, b, &mut Vec::new())
}

fn term_alpha_eq(a: &Term, b: &Term, env: &[(String, String)]) -> bool {
    match (a, b) {
        (Term::Var { name: na, sort: sa }, Term::Var { name: nb, sort: sb }) => {
            if sa != sb {
                return false;
            }
            // Innermost binding wins.
            for (x, y) in env.iter().rev() {
                if x == na || y == nb {
                    return x == na && y == nb;
                }
            }
            na == nb
        }
        (Term::Const { name: na, sort: sa }, Term::Const { name: nb, sort: sb }) => {
            na == nb && sa == sb
        }
        (
            Term::App {
                func: fa, args: aa, ..
            },
            Term::App {
                func: fb, args: ab, ..
            },
        ) => {
            fa == fb
                && aa.len() == ab.len()
                && aa.iter().zip(ab).all(|(x, y)| term_alpha_eq(x, y, env))
        }
        _ => false,
    }
}

fn alpha_eq_in(a: &Formula, b: &Formula, env: &mut Vec<(String, String)>) -> bool {
    use Formula::*;
    match (a, b) {
        (Atom(x), Atom(y)) => term_alpha_eq(x, y, env),
        (Not(x), Not(y)) => alpha_eq_in(x, y, env),
        (And(xs), And(ys)) | (Or(xs), Or(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_eq_in(x, y, env))
        }
        (Implies(xa, xb), Implies(ya, yb)) => alpha_eq_in(xa, ya, env) && alpha_eq_in(xb, yb, env),
        (
            ForAll {
                var: va,
                sort: sa,
                body: ba,
            },
            ForAll {
                var: vb,
                sort: sb,
                body: bb,
            },
        )
        | (
            Exists {
                var: va,
                sort: sa,
                body: ba,
            },
            Exists {
                var: vb,
                sort: sb,
                body: bb,
            },
        ) => {
            if sa != sb {
                return false;
            }
            env.push((va.clone(), vb.clone()));
            let r = alpha_eq_in(ba, bb, env);
            env.pop();
            r
        }
        (
            Perceives {
                agent: aa,
                time: ta,
                body: ba,
            },
            Perceives {
                agent: ab,
                time: tb,
                body: bb,
            },
        )
        | (
            Knows {
                agent: aa,
                time: ta,
                body: ba,
            },
            Knows {
                agent: ab,
                time: tb,
                body: bb,
            },
        )
        | (
            Says {
                agent: aa,
                time: ta,
                body: ba,
            },
            Says {
                agent: ab,
                time: tb,
                body: bb,
            },
        )
        | (
            Believes {
                agent: aa,
                time: ta,
                body: ba,
            },
            Believes {
                agent: ab,
                time: tb,
                body: bb,
            },
        )
        | (
            Desires {
                agent: aa,
                time: ta,
                body: ba,
            },
            Desires {
                agent: ab,
                time: tb,
                body: bb,
            },
        )
        | (
            Intends {
                agent: aa,
                time: ta,
                body: ba,
            },
            Intends {
                agent: ab,
                time: tb,
                body: bb,
            },
        ) => {
            term_alpha_eq(aa, ab, env) && term_alpha_eq(ta, tb, env) && alpha_eq_in(ba, bb, env)
        }
        (
            Common {
                time: ta,
                body: ba,
            },
            Common {
                time: tb,
                body: bb,
            },
        ) => term_alpha_eq(ta, tb, env) && alpha_eq_in(ba, bb, env),
        (
            SaysTo {
                agent: aa,
                to: oa,
                time: ta,
                body: ba,
            },
            SaysTo {
                agent: ab,
                to: ob,
                time: tb,
                body: bb,
            },
        ) => {
            term_alpha_eq(aa, ab, env)
                && term_alpha_eq(oa, ob, env)
                && term_alpha_eq(ta, tb, env)
                && alpha_eq_in(ba, bb, env)
        }
        (
            Ought {
                agent: aa,
                time: ta,
                condition: ca,
                action: xa,
                flavor: fa,
            },
            Ought {
                agent: ab,
                time: tb,
                condition: cb,
                action: xb,
                flavor: fb,
            },
        ) => {
            fa == fb
                && term_alpha_eq(aa, ab, env)
                && term_alpha_eq(ta, tb, env)
                && alpha_eq_in(ca, cb, env)
                && alpha_eq_in(xa, xb, env)
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn room_sig() -> Signature {
        let mut sig = Signature::new();
        sig.declare_sort("Room", None).unwrap();
        sig.declare_const("kitchen", "Room").unwrap();
        sig.declare_func("clean", &["Room"], "Boolean").unwrap();
        sig
    }

    fn clean_of_var(sig: &Signature, var: &str) -> Formula {
        Formula::Atom(
            sig.app(
                "clean",
                vec![Term::Var {
                    name: var.into(),
                    sort: "Room".into(),
                }],
            )
            .unwrap(),
        )
    }

    #[test]
    fn alpha_equivalence_of_renamed_quantifier() {
        let sig = room_sig();
        let fa = Formula::ForAll {
            var: "r".into(),
            sort: "Room".into(),
            body: Box::new(clean_of_var(&sig, "r")),
        };
        let fb = Formula::ForAll {
            var: "q".into(),
            sort: "Room".into(),
            body: Box::new(clean_of_var(&sig, "q")),
        };
        assert!(alpha_eq(&fa, &fb));
        assert_ne!(fa, fb);

        let fc = Formula::ForAll {
            var: "q".into(),
            sort: "Room".into(),
            body: Box::new(clean_of_var(&sig, "r")),
        };
        assert!(!alpha_eq(&fa, &fc));
    }

    #[test]
    fn ought_action_shape_enforced() {
        let sig = room_sig();
        let bad = Formula::Ought {
            agent: Term::Var {
                name: "a".into(),
                sort: "Agent".into(),
            },
            time: sig.moment(1),
            condition: Formula::falsum().into(),
            action: Box::new(Formula::Atom(
                sig.app("clean", vec![sig.constant("kitchen").unwrap()])
                    .unwrap(),
            )),
            flavor: OughtFlavor::Unflagged,
        };
        assert!(bad.sort_check(&sig).is_err());
    }

    #[test]
    fn closedness() {
        let sig = room_sig();
        let open = clean_of_var(&sig, "r");
        assert!(!open.is_closed());
        let closed = Formula::ForAll {
            var: "r".into(),
            sort: "Room".into(),
            body: Box::new(open),
        };
        assert!(closed.is_closed());
    }
}
