//! Capture-avoiding substitution.

use std::collections::BTreeSet;

use super::formula::Formula;
use super::sig::Signature;
use super::term::Term;
use super::KernelError;

/// Substitute `replacement` for the free variable `var` throughout `f`,
/// renaming bound variables where they would capture. The replacement's sort
/// must be a subsort of the variable's declared sort.
pub fn substitute(
    f: &Formula,
    var: &str,
    var_sort: &str,
    replacement: &Term,
    sig: &Signature,
) -> Result<Formula, KernelError> {
    if !sig.is_subsort(replacement.sort(), var_sort) {
        return Err(KernelError::sort(
            var_sort.to_string(),
            replacement.sort().to_string(),
        ));
    }
    let mut repl_vars = BTreeSet::new();
    replacement.free_vars(&mut repl_vars);
    let repl_names: BTreeSet<String> = repl_vars.into_iter().map(|(n, _)| n).collect();
    Ok(subst_in(f, var, replacement, &repl_names))
}

/// A variable name distinct from everything in `avoid`, derived from `base`.
pub fn fresh_variable_name(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
    let stem = if stem.is_empty() { "v" } else { stem };
    for i in 2.. {
        let candidate = format!("{stem}_{i}");
        if !avoid.contains(&candidate) {
            return candidate;
        }
    }
    unreachable!()
}

fn subst_in(f: &Formula, var: &str, replacement: &Term, repl_names: &BTreeSet<String>) -> Formula {
    let term = |t: &Term| t.replace_var(var, replacement);
    match f {
        Formula::Atom(t) => Formula::Atom(term(t)),
        Formula::Not(g) => Formula::not(subst_in(g, var, replacement, repl_names)),
        Formula::And(fs) => Formula::And(
            fs.iter()
                .map(|g| subst_in(g, var, replacement, repl_names))
                .collect(),
        ),
        Formula::Or(fs) => Formula::Or(
            fs.iter()
                .map(|g| subst_in(g, var, replacement, repl_names))
                .collect(),
        ),
        Formula::Implies(a, b) => Formula::implies(
            subst_in(a, var, replacement, repl_names),
            subst_in(b, var, replacement, repl_names),
        ),
        Formula::ForAll {
            var: bv,
            sort,
            body,
        } => {
            let (bv, body) = subst_under_binder(bv, sort, body, var, replacement, repl_names);
            Formula::ForAll {
                var: bv,
                sort: sort.clone(),
                body: Box::new(body),
            }
        }
        Formula::Exists {
            var: bv,
            sort,
            body,
        } => {
            let (bv, body) = subst_under_binder(bv, sort, body, var, replacement, repl_names);
            Formula::Exists {
                var: bv,
                sort: sort.clone(),
                body: Box::new(body),
            }
        }
        Formula::Perceives { agent, time, body } => Formula::Perceives {
            agent: term(agent),
            time: term(time),
            body: Box::new(subst_in(body, var, replacement, repl_names)),
        },
        Formula::Knows { agent, time, body } => Formula::Knows {
            agent: term(agent),
            time: term(time),
            body: Box::new(subst_in(body, var, replacement, repl_names)),
        },
        Formula::Common { time, body } => Formula::Common {
            time: term(time),
            body: Box::new(subst_in(body, var, replacement, repl_names)),
        },
        Formula::Says { agent, time, body } => Formula::Says {
            agent: term(agent),
            time: term(time),
            body: Box::new(subst_in(body, var, replacement, repl_names)),
        },
        Formula::SaysTo {
            agent,
            to,
            time,
            body,
        } => Formula::SaysTo {
            agent: term(agent),
            to: term(to),
            time: term(time),
            body: Box::new(subst_in(body, var, replacement, repl_names)),
        },
        Formula::Believes { agent, time, body } => Formula::Believes {
            agent: term(agent),
            time: term(time),
            body: Box::new(subst_in(body, var, replacement, repl_names)),
        },
        Formula::Desires { agent, time, body } => Formula::Desires {
            agent: term(agent),
            time: term(time),
            body: Box::new(subst_in(body, var, replacement, repl_names)),
        },
        Formula::Intends { agent, time, body } => Formula::Intends {
            agent: term(agent),
            time: term(time),
            body: Box::new(subst_in(body, var, replacement, repl_names)),
        },
        Formula::Ought {
            agent,
            time,
            condition,
            action,
            flavor,
        } => Formula::Ought {
            agent: term(agent),
            time: term(time),
            condition: Box::new(subst_in(condition, var, replacement, repl_names)),
            action: Box::new(subst_in(action, var, replacement, repl_names)),
            flavor: *flavor,
        },
    }
}

fn subst_under_binder(
    bound: &str,
    bound_sort: &str,
    body: &Formula,
    var: &str,
    replacement: &Term,
    repl_names: &BTreeSet<String>,
) -> (String, Formula) {
    if bound == var {
        // The binder shadows the substituted variable.
        return (bound.to_string(), body.clone());
    }
    if repl_names.contains(bound) {
        // The replacement mentions the bound name: rename the binder first.
        let mut avoid = repl_names.clone();
        for (n, _) in body.free_vars() {
            avoid.insert(n);
        }
        avoid.insert(var.to_string());
        let fresh = fresh_variable_name(bound, &avoid);
        let renamed = subst_in(
            body,
            bound,
            &Term::Var {
                name: fresh.clone(),
                sort: bound_sort.to_string(),
            },
            &BTreeSet::new(),
        );
        (fresh, subst_in(&renamed, var, replacement, repl_names))
    } else {
        (
            bound.to_string(),
            subst_in(body, var, replacement, repl_names),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        let mut sig = Signature::new();
        sig.declare_sort("Room", None).unwrap();
        sig.declare_const("kitchen", "Room").unwrap();
        sig.declare_func("clean", &["Room"], "Boolean").unwrap();
        sig.declare_func("near", &["Room", "Room"], "Boolean")
            .unwrap();
        sig
    }

    fn var(name: &str) -> Term {
        Term::Var {
            name: name.into(),
            sort: "Room".into(),
        }
    }

    #[test]
    fn forall_elimination_instance() {
        let sig = sig();
        let body = Formula::Atom(sig.app("clean", vec![var("r")]).unwrap());
        let out = substitute(&body, "r", "Room", &sig.constant("kitchen").unwrap(), &sig).unwrap();
        assert_eq!(
            out,
            Formula::Atom(
                sig.app("clean", vec![sig.constant("kitchen").unwrap()])
                    .unwrap()
            )
        );
    }

    #[test]
    fn identity_binding() {
        let sig = sig();
        let f = Formula::ForAll {
            var: "r".into(),
            sort: "Room".into(),
            body: Box::new(Formula::Atom(sig.app("clean", vec![var("r")]).unwrap())),
        };
        let out = substitute(&f, "q", "Room", &var("q"), &sig).unwrap();
        assert_eq!(out, f);
    }

    #[test]
    fn capture_is_avoided() {
        let sig = sig();
        // (forall r. near(r, q))[q := r]  must rename the binder.
        let f = Formula::ForAll {
            var: "r".into(),
            sort: "Room".into(),
            body: Box::new(Formula::Atom(
                sig.app("near", vec![var("r"), var("q")]).unwrap(),
            )),
        };
        let out = substitute(&f, "q", "Room", &var("r"), &sig).unwrap();
        match &out {
            Formula::ForAll { var: bv, body, .. } => {
                assert_ne!(bv, "r");
                let expected = Formula::Atom(
                    sig.app(
                        "near",
                        vec![
                            Term::Var {
                                name: bv.clone(),
                                sort: "Room".into(),
                            },
                            var("r"),
                        ],
                    )
                    .unwrap(),
                );
                assert_eq!(body.as_ref(), &expected);
            }
            other => panic!("unexpected shape: {other:?}"),
        }
    }

    #[test]
    fn sort_incompatible_binding_rejected() {
        let sig = sig();
        let f = Formula::Atom(sig.app("clean", vec![var("r")]).unwrap());
        let err = substitute(&f, "r", "Room", &sig.moment(3), &sig);
        assert!(err.is_err());
    }
}
