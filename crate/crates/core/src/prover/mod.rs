//! Bounded natural-deduction proof search with proof objects, plus an
//! independent checker.
//!
//! `prove` is deterministic: identical inputs yield identical proofs. The
//! search works goal-directed over a forward-saturated closure; the modal
//! schemata instantiate only over formulas present in the knowledge base and
//! goal, which keeps the search finite per budget. `check` validates a proof
//! tree node by node without consulting any search heuristics.

mod checker;
mod order;
mod proof;
mod rules;
mod saturate;
mod search;

pub use checker::{check, Reject};
pub use order::MomentOrder;
pub use proof::{read_proof, write_proof, Proof, ProofReadError, SideCondition};
pub use rules::{RuleId, ALL_RULES};

use serde::{Deserialize, Serialize};

use crate::kernel::{Formula, KernelError, KnowledgeBase};

/// Search bounds. All dimensions must be positive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Maximum backward-search depth.
    pub max_depth: u32,
    /// Largest formula the search may construct.
    pub max_formula_size: usize,
    /// Total quantifier instantiations across saturation and search.
    pub max_candidates: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_depth: 8,
            max_formula_size: 400,
            max_candidates: 20_000,
        }
    }
}

impl Budget {
    pub fn new(max_depth: u32, max_formula_size: usize, max_candidates: usize) -> Budget {
        assert!(
            max_depth > 0 && max_formula_size > 0 && max_candidates > 0,
            "budget dimensions must be positive"
        );
        Budget {
            max_depth,
            max_formula_size,
            max_candidates,
        }
    }
}

/// Which bound a failed search ran into. `Space` means the bounded search
/// space was exhausted without hitting any cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exhausted {
    Depth,
    Size,
    Candidates,
    Space,
}

impl std::fmt::Display for Exhausted {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exhausted::Depth => write!(f, "depth"),
            Exhausted::Size => write!(f, "size"),
            Exhausted::Candidates => write!(f, "candidates"),
            Exhausted::Space => write!(f, "space"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct ExhaustFlags {
    pub depth: bool,
    pub size: bool,
    pub candidates: bool,
}

impl ExhaustFlags {
    pub(crate) fn merge(&mut self, other: &ExhaustFlags) {
        self.depth |= other.depth;
        self.size |= other.size;
        self.candidates |= other.candidates;
    }

    fn dominant(&self) -> Exhausted {
        if self.depth {
            Exhausted::Depth
        } else if self.size {
            Exhausted::Size
        } else if self.candidates {
            Exhausted::Candidates
        } else {
            Exhausted::Space
        }
    }
}

/// Outcome of a proof search.
#[derive(Debug, Clone, PartialEq)]
pub enum ProveOutcome {
    Proved(Proof),
    NoProofWithinBudget(Exhausted),
}

impl ProveOutcome {
    pub fn proof(&self) -> Option<&Proof> {
        match self {
            ProveOutcome::Proved(p) => Some(p),
            ProveOutcome::NoProofWithinBudget(_) => None,
        }
    }

    pub fn is_proved(&self) -> bool {
        matches!(self, ProveOutcome::Proved(_))
    }
}

/// Search for a proof of `goal` from `gamma` within `budget`.
///
/// The goal must be closed and well-sorted over the base's signature. On
/// success the returned proof's conclusion equals the goal and the
/// independent checker accepts it.
pub fn prove(
    gamma: &KnowledgeBase,
    goal: &Formula,
    budget: &Budget,
) -> Result<ProveOutcome, KernelError> {
    if let Some((name, _)) = goal.free_vars().into_iter().next() {
        return Err(KernelError::NotClosed { name });
    }
    goal.sort_check(gamma.signature())?;
    let mut closure = saturate::Closure::new(gamma.signature(), gamma.formulas(), budget);
    closure.seed_terms(goal);
    let mut searcher = search::Searcher::new(budget);
    match searcher.prove_goal(&closure, goal, budget.max_depth) {
        Some(proof) => {
            // A bare hypothesis at the root is restated, so the proof tree
            // always ends in a proper rule application.
            let proof = if proof.rule == RuleId::Hyp {
                Proof {
                    conclusion: proof.conclusion.clone(),
                    rule: RuleId::Reiteration,
                    premises: vec![proof],
                    side: vec![],
                }
            } else {
                proof
            };
            Ok(ProveOutcome::Proved(proof))
        }
        None => {
            let mut flags = searcher.flags;
            flags.merge(&closure.flags);
            Ok(ProveOutcome::NoProofWithinBudget(flags.dominant()))
        }
    }
}

/// Result of a bounded consistency check. The positive answer is explicitly
/// relative to the budget used.
#[derive(Debug, Clone, PartialEq)]
pub enum Consistency {
    ConsistentAsFarAsChecked { budget: Budget },
    Inconsistent(Proof),
}

impl Consistency {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Consistency::ConsistentAsFarAsChecked { .. })
    }
}

/// Check `gamma` extended by `extra` for a refutation within `budget`.
pub fn consistent(
    gamma: &KnowledgeBase,
    extra: &[Formula],
    budget: &Budget,
) -> Result<Consistency, KernelError> {
    let kb = gamma.extended(extra)?;
    match prove(&kb, &Formula::falsum(), budget)? {
        ProveOutcome::Proved(p) => Ok(Consistency::Inconsistent(p)),
        ProveOutcome::NoProofWithinBudget(_) => Ok(Consistency::ConsistentAsFarAsChecked {
            budget: budget.clone(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{parse_formula, pretty, KnowledgeBase, Provenance, Signature};

    fn sig() -> Signature {
        let mut sig = Signature::new();
        sig.declare_const("a", "Agent").unwrap();
        sig.declare_const("alpha", "ActionType").unwrap();
        sig.declare_const("p", "Boolean").unwrap();
        sig.declare_const("q", "Boolean").unwrap();
        sig.declare_const("phi", "Boolean").unwrap();
        sig.declare_const("psi", "Boolean").unwrap();
        sig
    }

    fn kb(sig: &Signature, formulas: &[&str]) -> KnowledgeBase {
        let mut kb = KnowledgeBase::new(sig.clone());
        for f in formulas {
            let f = parse_formula(f, sig).unwrap();
            kb.insert(f, Provenance::Axiom).unwrap();
        }
        kb
    }

    fn proved(kb: &KnowledgeBase, goal: &str, budget: &Budget) -> Proof {
        let goal = parse_formula(goal, kb.signature()).unwrap();
        let outcome = prove(kb, &goal, budget).unwrap();
        let proof = match outcome {
            ProveOutcome::Proved(p) => p,
            ProveOutcome::NoProofWithinBudget(d) => {
                panic!("expected a proof of {}, exhausted {d}", pretty(&goal))
            }
        };
        assert_eq!(proof.conclusion, goal);
        check(&proof, kb).unwrap_or_else(|r| panic!("checker rejected: {r}"));
        proof
    }

    #[test]
    fn i4_knowledge_is_veridical() {
        let sig = sig();
        let kb = kb(&sig, &["(K a 1 phi)"]);
        let proof = proved(&kb, "phi", &Budget::default());
        assert_eq!(proof.rule, RuleId::I4);
    }

    #[test]
    fn ik_closes_knowledge_under_derivation() {
        let sig = sig();
        let kb = kb(&sig, &["(K a 1 p)", "(K a 1 (implies p q))"]);
        let proof = proved(&kb, "(K a 2 q)", &Budget::default());
        assert_eq!(proof.rule, RuleId::Ik);
        assert!(proof
            .side
            .iter()
            .any(|s| matches!(s, SideCondition::TimeLe(..))));
    }

    #[test]
    fn ik_respects_time_order() {
        let sig = sig();
        let kb = kb(&sig, &["(K a 2 p)"]);
        let goal = parse_formula("(K a 1 p)", &sig).unwrap();
        let outcome = prove(&kb, &goal, &Budget::new(4, 200, 500)).unwrap();
        assert!(!outcome.is_proved());
    }

    #[test]
    fn i14_obligations_become_known_intentions() {
        let sig = sig();
        let chi = "(happens (action a alpha) 2)";
        let kb = kb(
            &sig,
            &[
                "(B a 1 phi)",
                &format!("(B a 1 (O a 1 phi {chi}))"),
                &format!("(O a 1 phi {chi})"),
            ],
        );
        let proof = proved(&kb, &format!("(K a 1 (I a 1 {chi}))"), &Budget::default());
        assert_eq!(proof.rule, RuleId::I14);
    }

    #[test]
    fn i13_intentions_become_perceptions() {
        let sig = sig();
        let kb = kb(&sig, &["(I a 1 psi)"]);
        let proof = proved(&kb, "(P a 2 psi)", &Budget::default());
        assert_eq!(proof.rule, RuleId::I13);

        // Strict order: a perception at the same moment is not derivable.
        let goal = parse_formula("(P a 1 psi)", &sig).unwrap();
        assert!(!prove(&kb, &goal, &Budget::new(4, 200, 500))
            .unwrap()
            .is_proved());
    }

    #[test]
    fn excluded_middle_is_classical() {
        let sig = sig();
        let kb = KnowledgeBase::new(sig);
        let proof = proved(&kb, "(or p (not p))", &Budget::default());
        assert_eq!(proof.rule, RuleId::Dne);
    }

    #[test]
    fn direct_contradiction_refuted() {
        let sig = sig();
        let kb = kb(&sig, &["p", "(not p)"]);
        match consistent(&kb, &[], &Budget::default()).unwrap() {
            Consistency::Inconsistent(p) => {
                assert_eq!(p.rule, RuleId::NotElim);
                assert_eq!(p.premises.len(), 2);
                check(&p, &kb).unwrap();
            }
            other => panic!("expected a refutation, got {other:?}"),
        }
    }

    #[test]
    fn capability_axiom_refutes_impossible_happening() {
        let sig = sig();
        let kb = kb(
            &sig,
            &[
                "(forall (x Agent) (forall (y ActionType) (forall (t Moment) \
                 (implies (not (can x y t)) (not (happens (action x y) t))))))",
                "(not (can a alpha 1))",
                "(happens (action a alpha) 1)",
            ],
        );
        match consistent(&kb, &[], &Budget::default()).unwrap() {
            Consistency::Inconsistent(p) => check(&p, &kb).unwrap(),
            other => panic!("expected a refutation, got {other:?}"),
        }
    }

    #[test]
    fn goal_in_base_restated() {
        let sig = sig();
        let kb = kb(&sig, &["p"]);
        let proof = proved(&kb, "p", &Budget::default());
        assert_eq!(proof.rule, RuleId::Reiteration);
    }

    #[test]
    fn deterministic_serialized_proofs() {
        let sig = sig();
        let kb = kb(&sig, &["(K a 1 p)", "(K a 1 (implies p q))"]);
        let goal = parse_formula("(K a 2 q)", &sig).unwrap();
        let a = prove(&kb, &goal, &Budget::default()).unwrap();
        let b = prove(&kb, &goal, &Budget::default()).unwrap();
        let (pa, pb) = (a.proof().unwrap(), b.proof().unwrap());
        assert_eq!(write_proof(pa), write_proof(pb));
    }

    #[test]
    fn checker_rejects_backward_time_ik() {
        let sig = sig();
        let kb = kb(&sig, &["(K a 2 p)"]);
        // Hand-built IK node claiming K(a,1,p) from K(a,2,p): t1 <= t2 fails.
        let wrapped = parse_formula("(K a 2 p)", &sig).unwrap();
        let p = parse_formula("p", &sig).unwrap();
        let conclusion = parse_formula("(K a 1 p)", &sig).unwrap();
        let bad = Proof {
            conclusion,
            rule: RuleId::Ik,
            premises: vec![Proof::hyp(wrapped), Proof::hyp(p.clone())],
            side: vec![
                SideCondition::TimeLe(
                    kb.signature().moment(2),
                    kb.signature().moment(1),
                ),
                SideCondition::Discharged(p),
            ],
        };
        let reject = check(&bad, &kb).unwrap_err();
        assert!(reject.reason.contains("time"), "reason: {}", reject.reason);
    }

    #[test]
    fn checker_rejects_mutated_conclusion() {
        let sig = sig();
        let kb = kb(&sig, &["(K a 1 phi)"]);
        let mut proof = proved(&kb, "phi", &Budget::default());
        proof.conclusion = parse_formula("psi", kb.signature()).unwrap();
        assert!(check(&proof, &kb).is_err());
    }
}
