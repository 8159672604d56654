//! Knowledge bases: finite sets of closed formulas with provenance labels.

use std::collections::HashSet;

use super::formula::Formula;
use super::sig::Signature;
use super::KernelError;

/// Where a formula came from. `Contract(a)` marks membership in agent `a`'s
/// contract; contract formulas form per-agent subsets of the base.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    Axiom,
    Contract(String),
    Percept,
    Derived,
    Declared,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Provenance::Axiom => write!(f, "axiom"),
            Provenance::Contract(a) => write!(f, "contract({a})"),
            Provenance::Percept => write!(f, "percept"),
            Provenance::Derived => write!(f, "derived"),
            Provenance::Declared => write!(f, "declared"),
        }
    }
}

/// A finite, insertion-ordered set of closed, sort-checked formulas over a
/// signature. Duplicate formulas are kept once (first provenance wins).
#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    sig: Signature,
    entries: Vec<(Formula, Provenance)>,
    index: HashSet<Formula>,
}

impl KnowledgeBase {
    pub fn new(sig: Signature) -> Self {
        KnowledgeBase {
            sig,
            entries: Vec::new(),
            index: HashSet::new(),
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    /// Insert a closed formula. Returns whether the formula was new.
    pub fn insert(&mut self, f: Formula, prov: Provenance) -> Result<bool, KernelError> {
        if let Some((name, _)) = f.free_vars().into_iter().next() {
            return Err(KernelError::NotClosed { name });
        }
        f.sort_check(&self.sig)?;
        if self.index.contains(&f) {
            return Ok(false);
        }
        self.index.insert(f.clone());
        self.entries.push((f, prov));
        Ok(true)
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.index.contains(f)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Formulas in insertion order.
    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.entries.iter().map(|(f, _)| f)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Formula, &Provenance)> {
        self.entries.iter().map(|(f, p)| (f, p))
    }

    /// The contract subset for one agent, in insertion order.
    pub fn contract_of(&self, agent: &str) -> Vec<&Formula> {
        self.entries
            .iter()
            .filter(|(_, p)| matches!(p, Provenance::Contract(a) if a == agent))
            .map(|(f, _)| f)
            .collect()
    }

    /// A copy of this base extended with extra formulas (provenance derived).
    pub fn extended(&self, extra: &[Formula]) -> Result<KnowledgeBase, KernelError> {
        let mut out = self.clone();
        for f in extra {
            out.insert(f.clone(), Provenance::Derived)?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::parse::parse_formula;

    #[test]
    fn open_formula_rejected() {
        let mut sig = Signature::new();
        sig.declare_const("f", "Fluent").unwrap();
        let mut kb = KnowledgeBase::new(sig);
        let sig = kb.signature().clone();
        let open = crate::kernel::Formula::Atom(
            sig.app(
                "holds",
                vec![
                    sig.constant("f").unwrap(),
                    crate::kernel::Term::Var {
                        name: "t".into(),
                        sort: "Moment".into(),
                    },
                ],
            )
            .unwrap(),
        );
        assert!(kb.insert(open, Provenance::Axiom).is_err());
    }

    #[test]
    fn dedup_and_order() {
        let mut sig = Signature::new();
        sig.declare_const("f", "Fluent").unwrap();
        let f1 = parse_formula("(holds f 1)", &sig).unwrap();
        let f2 = parse_formula("(holds f 2)", &sig).unwrap();
        let mut kb = KnowledgeBase::new(sig);
        assert!(kb.insert(f1.clone(), Provenance::Axiom).unwrap());
        assert!(kb.insert(f2.clone(), Provenance::Percept).unwrap());
        assert!(!kb.insert(f1.clone(), Provenance::Derived).unwrap());
        let order: Vec<_> = kb.formulas().cloned().collect();
        assert_eq!(order, vec![f1, f2]);
    }
}
