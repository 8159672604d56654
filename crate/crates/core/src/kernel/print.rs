//! Canonical printer: the inverse of the scenario-syntax parser, up to
//! alpha-equivalence.

use super::formula::{Formula, OughtFlavor};
use super::term::Term;

pub fn pretty_term(t: &Term) -> String {
    match t {
        Term::Var { name, .. } | Term::Const { name, .. } => name.clone(),
        Term::App { func, args, .. } => {
            let mut out = String::from("(");
            out.push_str(func);
            for a in args {
                out.push(' ');
                out.push_str(&pretty_term(a));
            }
            out.push(')');
            out
        }
    }
}

pub fn pretty(f: &Formula) -> String {
    match f {
        Formula::Atom(t) => pretty_term(t),
        Formula::Not(g) => format!("(not {})", pretty(g)),
        Formula::And(fs) => nary("and", fs),
        Formula::Or(fs) => nary("or", fs),
        Formula::Implies(a, b) => format!("(implies {} {})", pretty(a), pretty(b)),
        Formula::ForAll { var, sort, body } => {
            format!("(forall ({var} {sort}) {})", pretty(body))
        }
        Formula::Exists { var, sort, body } => {
            format!("(exists ({var} {sort}) {})", pretty(body))
        }
        Formula::Perceives { agent, time, body } => modal("P", agent, time, body),
        Formula::Knows { agent, time, body } => modal("K", agent, time, body),
        Formula::Common { time, body } => {
            format!("(C {} {})", pretty_term(time), pretty(body))
        }
        Formula::Says { agent, time, body } => modal("S", agent, time, body),
        Formula::SaysTo {
            agent,
            to,
            time,
            body,
        } => format!(
            "(S {} {} {} {})",
            pretty_term(agent),
            pretty_term(to),
            pretty_term(time),
            pretty(body)
        ),
        Formula::Believes { agent, time, body } => modal("B", agent, time, body),
        Formula::Desires { agent, time, body } => modal("D", agent, time, body),
        Formula::Intends { agent, time, body } => modal("I", agent, time, body),
        Formula::Ought {
            agent,
            time,
            condition,
            action,
            flavor,
        } => {
            let head = match flavor {
                OughtFlavor::Unflagged => "O",
                OughtFlavor::Legal => "O-legal",
                OughtFlavor::Moral => "O-moral",
            };
            format!(
                "({head} {} {} {} {})",
                pretty_term(agent),
                pretty_term(time),
                pretty(condition),
                pretty(action)
            )
        }
    }
}

fn nary(head: &str, fs: &[Formula]) -> String {
    let mut out = String::from("(");
    out.push_str(head);
    for f in fs {
        out.push(' ');
        out.push_str(&pretty(f));
    }
    out.push(')');
    out
}

fn modal(head: &str, agent: &Term, time: &Term, body: &Formula) -> String {
    format!(
        "({head} {} {} {})",
        pretty_term(agent),
        pretty_term(time),
        pretty(body)
    )
}
