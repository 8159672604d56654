//! Terms of the sorted language.

use std::collections::BTreeSet;

/// A sorted first-order term. Applications carry their computed result sort,
/// so `sort()` is total: unsortable terms cannot be constructed (see
/// [`super::Signature::app`]).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var {
        name: String,
        sort: String,
    },
    Const {
        name: String,
        sort: String,
    },
    App {
        func: String,
        args: Vec<Term>,
        sort: String,
    },
}

impl Term {
    /// The least sort of the term.
    pub fn sort(&self) -> &str {
        match self {
            Term::Var { sort, .. } | Term::Const { sort, .. } | Term::App { sort, .. } => sort,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var { .. } => false,
            Term::Const { .. } => true,
            Term::App { args, .. } => args.iter().all(Term::is_ground),
        }
    }

    /// Integer value of a Moment literal, if this is one.
    pub fn moment_value(&self) -> Option<i64> {
        match self {
            Term::Const { name, sort } if sort == "Moment" => name.parse().ok(),
            _ => None,
        }
    }

    pub fn free_vars(&self, out: &mut BTreeSet<(String, String)>) {
        match self {
            Term::Var { name, sort } => {
                out.insert((name.clone(), sort.clone()));
            }
            Term::Const { .. } => {}
            Term::App { args, .. } => {
                for a in args {
                    a.free_vars(out);
                }
            }
        }
    }

    pub fn contains_var(&self, var_name: &str) -> bool {
        match self {
            Term::Var { name, .. } => name == var_name,
            Term::Const { .. } => false,
            Term::App { args, .. } => args.iter().any(|a| a.contains_var(var_name)),
        }
    }

    pub fn contains_const(&self, const_name: &str) -> bool {
        match self {
            Term::Var { .. } => false,
            Term::Const { name, .. } => name == const_name,
            Term::App { args, .. } => args.iter().any(|a| a.contains_const(const_name)),
        }
    }

    /// Replace a variable by a term, relabeling nothing (terms bind nothing).
    pub fn replace_var(&self, var_name: &str, replacement: &Term) -> Term {
        match self {
            Term::Var { name, .. } if name == var_name => replacement.clone(),
            Term::Var { .. } | Term::Const { .. } => self.clone(),
            Term::App { func, args, sort } => Term::App {
                func: func.clone(),
                args: args
                    .iter()
                    .map(|a| a.replace_var(var_name, replacement))
                    .collect(),
                sort: sort.clone(),
            },
        }
    }

    /// All constant names occurring in the term.
    pub fn constants(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var { .. } => {}
            Term::Const { name, .. } => {
                out.insert(name.clone());
            }
            Term::App { args, .. } => {
                for a in args {
                    a.constants(out);
                }
            }
        }
    }

    /// Ground subterms of the term, including itself, preorder.
    pub fn ground_subterms(&self, out: &mut Vec<Term>) {
        if self.is_ground() && !out.contains(self) {
            out.push(self.clone());
        }
        if let Term::App { args, .. } = self {
            for a in args {
                a.ground_subterms(out);
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var { .. } | Term::Const { .. } => 1,
            Term::App { args, .. } => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }
}
