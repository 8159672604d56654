//! Signatures: the sort forest and the function/constant vocabulary.

use std::collections::HashMap;

use super::term::Term;
use super::KernelError;

/// Sorts present in every signature. `Action` is a subsort of `Event`.
pub const BUILTIN_SORTS: &[(&str, Option<&str>)] = &[
    ("Boolean", None),
    ("Agent", None),
    ("ActionType", None),
    ("Event", None),
    ("Action", Some("Event")),
    ("Moment", None),
    ("Fluent", None),
    ("Plan", None),
    ("AgentList", None),
];

/// Function symbols present in every signature. The first eight are the
/// event-calculus vocabulary; the rest support capability facts and plan
/// reification.
const BUILTIN_FUNCS: &[(&str, &[&str], &str)] = &[
    ("action", &["Agent", "ActionType"], "Action"),
    ("initially", &["Fluent"], "Boolean"),
    ("holds", &["Fluent", "Moment"], "Boolean"),
    ("happens", &["Event", "Moment"], "Boolean"),
    ("clipped", &["Moment", "Fluent", "Moment"], "Boolean"),
    ("initiates", &["Event", "Fluent", "Moment"], "Boolean"),
    ("terminates", &["Event", "Fluent", "Moment"], "Boolean"),
    ("prior", &["Moment", "Moment"], "Boolean"),
    ("can", &["Agent", "ActionType", "Moment"], "Boolean"),
    ("plan", &["Plan", "AgentList"], "Boolean"),
    ("executed", &["Plan"], "Boolean"),
    ("cons", &["Agent", "AgentList"], "AgentList"),
    (
        "plan-step",
        &["Agent", "ActionType", "Moment", "Plan"],
        "Plan",
    ),
    ("plan-at", &["Moment", "Plan"], "Plan"),
];

/// Constant symbols present in every signature. `false` is the falsum
/// proposition the prover refutes against.
const BUILTIN_CONSTS: &[(&str, &str)] = &[
    ("false", "Boolean"),
    ("nil", "AgentList"),
    ("plan-empty", "Plan"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
struct FuncDecl {
    args: Vec<String>,
    result: String,
}

/// A sorted vocabulary: sort forest plus typed function and constant symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    /// name -> parent sort, in declaration order for deterministic iteration.
    sort_order: Vec<String>,
    sorts: HashMap<String, Option<String>>,
    func_order: Vec<String>,
    funcs: HashMap<String, FuncDecl>,
    const_order: Vec<String>,
    consts: HashMap<String, String>,
    builtin_names: std::collections::HashSet<String>,
}

impl Default for Signature {
    fn default() -> Self {
        Self::new()
    }
}

impl Signature {
    /// A fresh signature containing exactly the built-in vocabulary.
    pub fn new() -> Self {
        let mut sig = Signature {
            sort_order: Vec::new(),
            sorts: HashMap::new(),
            func_order: Vec::new(),
            funcs: HashMap::new(),
            const_order: Vec::new(),
            consts: HashMap::new(),
            builtin_names: std::collections::HashSet::new(),
        };
        for (name, parent) in BUILTIN_SORTS {
            sig.sort_order.push((*name).into());
            sig.sorts.insert((*name).into(), parent.map(Into::into));
            sig.builtin_names.insert((*name).into());
        }
        for (name, args, result) in BUILTIN_FUNCS {
            sig.func_order.push((*name).into());
            sig.funcs.insert(
                (*name).into(),
                FuncDecl {
                    args: args.iter().map(|s| (*s).into()).collect(),
                    result: (*result).into(),
                },
            );
            sig.builtin_names.insert((*name).into());
        }
        for (name, sort) in BUILTIN_CONSTS {
            sig.const_order.push((*name).into());
            sig.consts.insert((*name).into(), (*sort).into());
            sig.builtin_names.insert((*name).into());
        }
        sig
    }

    fn check_fresh(&self, name: &str) -> Result<(), KernelError> {
        if self.builtin_names.contains(name) || is_moment_literal(name) {
            return Err(KernelError::ShadowsBuiltin { name: name.into() });
        }
        if self.sorts.contains_key(name)
            || self.funcs.contains_key(name)
            || self.consts.contains_key(name)
        {
            return Err(KernelError::Duplicate { name: name.into() });
        }
        Ok(())
    }

    /// Declare a new sort, optionally under a parent. The sort graph stays a
    /// forest; cycles and unknown parents are rejected.
    pub fn declare_sort(&mut self, name: &str, parent: Option<&str>) -> Result<(), KernelError> {
        self.check_fresh(name)?;
        if let Some(p) = parent {
            if !self.sorts.contains_key(p) {
                return Err(KernelError::UnknownSymbol {
                    name: p.into(),
                    pos: super::Position::none(),
                });
            }
            // A parent chain cannot reach back to `name`: `name` is fresh, so
            // only a self-parent could close a cycle.
            if p == name {
                return Err(KernelError::SortCycle { name: name.into() });
            }
        }
        self.sort_order.push(name.into());
        self.sorts.insert(name.into(), parent.map(Into::into));
        Ok(())
    }

    pub fn declare_const(&mut self, name: &str, sort: &str) -> Result<(), KernelError> {
        self.check_fresh(name)?;
        if !self.sorts.contains_key(sort) {
            return Err(KernelError::UnknownSymbol {
                name: sort.into(),
                pos: super::Position::none(),
            });
        }
        self.const_order.push(name.into());
        self.consts.insert(name.into(), sort.into());
        Ok(())
    }

    pub fn declare_func(
        &mut self,
        name: &str,
        args: &[&str],
        result: &str,
    ) -> Result<(), KernelError> {
        self.check_fresh(name)?;
        for s in args.iter().chain(std::iter::once(&result)) {
            if !self.sorts.contains_key(*s) {
                return Err(KernelError::UnknownSymbol {
                    name: (*s).into(),
                    pos: super::Position::none(),
                });
            }
        }
        self.func_order.push(name.into());
        self.funcs.insert(
            name.into(),
            FuncDecl {
                args: args.iter().map(|s| (*s).into()).collect(),
                result: result.into(),
            },
        );
        Ok(())
    }

    pub fn has_sort(&self, name: &str) -> bool {
        self.sorts.contains_key(name)
    }

    /// Reflexive-transitive subsort test along parent edges.
    pub fn is_subsort(&self, sub: &str, sup: &str) -> bool {
        let mut cur = sub;
        loop {
            if cur == sup {
                return true;
            }
            match self.sorts.get(cur).and_then(|p| p.as_deref()) {
                Some(p) => cur = p,
                None => return false,
            }
        }
    }

    /// Declared profile of a function symbol.
    pub fn func_profile(&self, name: &str) -> Option<(&[String], &str)> {
        self.funcs
            .get(name)
            .map(|d| (d.args.as_slice(), d.result.as_str()))
    }

    pub fn const_sort(&self, name: &str) -> Option<&str> {
        if is_moment_literal(name) {
            return Some("Moment");
        }
        self.consts.get(name).map(String::as_str)
    }

    /// Build a constant term, resolving integer literals to `Moment`.
    pub fn constant(&self, name: &str) -> Option<Term> {
        self.const_sort(name).map(|sort| Term::Const {
            name: name.into(),
            sort: sort.into(),
        })
    }

    /// Moment constant for an integer literal.
    pub fn moment(&self, value: i64) -> Term {
        Term::Const {
            name: value.to_string(),
            sort: "Moment".into(),
        }
    }

    /// Sort-checked application. Every argument sort must be a subsort of the
    /// declared parameter sort.
    pub fn app(&self, func: &str, args: Vec<Term>) -> Result<Term, KernelError> {
        let decl = self
            .funcs
            .get(func)
            .ok_or_else(|| KernelError::UnknownSymbol {
                name: func.into(),
                pos: super::Position::none(),
            })?;
        if decl.args.len() != args.len() {
            return Err(KernelError::sort(
                format!("{} arguments to {func}", decl.args.len()),
                format!("{} arguments", args.len()),
            ));
        }
        for (expected, arg) in decl.args.iter().zip(&args) {
            if !self.is_subsort(arg.sort(), expected) {
                return Err(KernelError::sort(expected.clone(), arg.sort().to_string()));
            }
        }
        Ok(Term::App {
            func: func.into(),
            args,
            sort: decl.result.clone(),
        })
    }

    /// Declared constants of a sort (subsorts included), declaration order.
    pub fn constants_of_sort(&self, sort: &str) -> Vec<Term> {
        self.const_order
            .iter()
            .filter_map(|name| {
                let s = self.consts.get(name)?;
                if self.is_subsort(s, sort) {
                    Some(Term::Const {
                        name: name.clone(),
                        sort: s.clone(),
                    })
                } else {
                    None
                }
            })
            .collect()
    }

    /// Declaration index used for canonical orderings; built-ins first.
    pub fn const_index(&self, name: &str) -> Option<usize> {
        self.const_order.iter().position(|n| n == name)
    }

    /// Re-check that a term is well-sorted over this signature.
    pub fn check_term(&self, term: &Term) -> Result<(), KernelError> {
        match term {
            Term::Var { sort, .. } => {
                if self.has_sort(sort) {
                    Ok(())
                } else {
                    Err(KernelError::UnknownSymbol {
                        name: sort.clone(),
                        pos: super::Position::none(),
                    })
                }
            }
            Term::Const { name, sort } => {
                if name.starts_with('#') {
                    // Local constants (prover eigenvariables) carry their sort.
                    if self.has_sort(sort) {
                        return Ok(());
                    }
                    return Err(KernelError::UnknownSymbol {
                        name: sort.clone(),
                        pos: super::Position::none(),
                    });
                }
                match self.const_sort(name) {
                    Some(s) if s == sort => Ok(()),
                    Some(s) => Err(KernelError::sort(s.to_string(), sort.clone())),
                    None => Err(KernelError::UnknownSymbol {
                        name: name.clone(),
                        pos: super::Position::none(),
                    }),
                }
            }
            Term::App { func, args, sort } => {
                let (params, result) =
                    self.func_profile(func)
                        .ok_or_else(|| KernelError::UnknownSymbol {
                            name: func.clone(),
                            pos: super::Position::none(),
                        })?;
                if params.len() != args.len() || result != sort {
                    return Err(KernelError::sort(result.to_string(), sort.clone()));
                }
                let params = params.to_vec();
                for (expected, arg) in params.iter().zip(args) {
                    self.check_term(arg)?;
                    if !self.is_subsort(arg.sort(), expected) {
                        return Err(KernelError::sort(expected.clone(), arg.sort().to_string()));
                    }
                }
                Ok(())
            }
        }
    }
}

/// Integer tokens denote Moment constants.
pub(crate) fn is_moment_literal(name: &str) -> bool {
    !name.is_empty()
        && name != "-"
        && name
            .strip_prefix('-')
            .unwrap_or(name)
            .chars()
            .all(|c| c.is_ascii_digit())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_present() {
        let sig = Signature::new();
        for (name, _) in BUILTIN_SORTS {
            assert!(sig.has_sort(name));
        }
        let (args, result) = sig.func_profile("action").unwrap();
        assert_eq!(args, ["Agent".to_string(), "ActionType".into()]);
        assert_eq!(result, "Action");
        assert!(sig.is_subsort("Action", "Event"));
        assert!(!sig.is_subsort("Event", "Action"));
    }

    #[test]
    fn shadowing_builtin_rejected() {
        let mut sig = Signature::new();
        assert!(matches!(
            sig.declare_func("holds", &["Fluent", "Moment"], "Boolean"),
            Err(KernelError::ShadowsBuiltin { .. })
        ));
        assert!(matches!(
            sig.declare_sort("Moment", None),
            Err(KernelError::ShadowsBuiltin { .. })
        ));
        assert!(matches!(
            sig.declare_const("7", "Moment"),
            Err(KernelError::ShadowsBuiltin { .. })
        ));
    }

    #[test]
    fn duplicate_rejected() {
        let mut sig = Signature::new();
        sig.declare_sort("Room", None).unwrap();
        assert!(matches!(
            sig.declare_sort("Room", None),
            Err(KernelError::Duplicate { .. })
        ));
    }

    #[test]
    fn moment_literals() {
        let sig = Signature::new();
        assert_eq!(sig.const_sort("42"), Some("Moment"));
        assert_eq!(sig.const_sort("-3"), Some("Moment"));
        assert_eq!(sig.const_sort("x42"), None);
    }
}
