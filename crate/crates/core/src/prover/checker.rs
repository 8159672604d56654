//! Independent proof checking.
//!
//! The checker walks the proof tree and verifies that every node is a correct
//! rule instance with matching discharged assumptions, eigenvariable
//! freshness, and time side-conditions. It shares no code path with the
//! search: acceptance is decided by the node shapes alone.

use std::collections::HashSet;

use crate::kernel::{pretty, substitute, Formula, KnowledgeBase, Signature, Term};

use super::order::MomentOrder;
use super::proof::{Proof, SideCondition};
use super::rules::RuleId;

/// A rejected proof: the path of premise indices from the root to the first
/// failing node, and the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reject {
    pub path: Vec<usize>,
    pub reason: String,
}

impl std::fmt::Display for Reject {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "node at path {:?}: {}", self.path, self.reason)
    }
}

struct Cx<'a> {
    sig: &'a Signature,
    hyps: Vec<Formula>,
    hyp_index: HashSet<Formula>,
}

impl<'a> Cx<'a> {
    fn new(sig: &'a Signature, hyps: Vec<Formula>) -> Self {
        let hyp_index = hyps.iter().cloned().collect();
        Cx {
            sig,
            hyps,
            hyp_index,
        }
    }

    fn order_with(&self, live: &[Formula]) -> MomentOrder {
        MomentOrder::from_formulas(self.hyps.iter().chain(live.iter()))
    }

    fn name_occurs(&self, name: &str, live: &[Formula]) -> bool {
        self.hyps.iter().any(|f| f.contains_const(name))
            || live.iter().any(|f| f.contains_const(name))
    }
}

/// Check a proof against a knowledge base. Accepts exactly proofs whose every
/// node is a correct rule instance.
pub fn check(proof: &Proof, gamma: &KnowledgeBase) -> Result<(), Reject> {
    let cx = Cx::new(
        gamma.signature(),
        gamma.formulas().cloned().collect::<Vec<_>>(),
    );
    let mut live = Vec::new();
    let mut path = Vec::new();
    check_node(proof, &cx, &mut live, &mut path)
}

fn fail(path: &[usize], reason: impl Into<String>) -> Result<(), Reject> {
    Err(Reject {
        path: path.to_vec(),
        reason: reason.into(),
    })
}

fn check_node(
    node: &Proof,
    cx: &Cx,
    live: &mut Vec<Formula>,
    path: &mut Vec<usize>,
) -> Result<(), Reject> {
    if let Err(e) = node.conclusion.sort_check(cx.sig) {
        return fail(path, format!("conclusion fails sort check: {e}"));
    }
    let n = node.premises.len();
    let premise = |i: usize| &node.premises[i];
    let descend = |i: usize,
                   cx: &Cx,
                   live: &mut Vec<Formula>,
                   path: &mut Vec<usize>|
     -> Result<(), Reject> {
        path.push(i);
        let r = check_node(&node.premises[i], cx, live, path);
        path.pop();
        r
    };
    let descend_all = |cx: &Cx, live: &mut Vec<Formula>, path: &mut Vec<usize>| {
        for i in 0..n {
            descend(i, cx, live, path)?;
        }
        Ok(())
    };
    let discharged: Vec<&Formula> = node
        .side
        .iter()
        .filter_map(|s| match s {
            SideCondition::Discharged(f) => Some(f),
            _ => None,
        })
        .collect();

    match node.rule {
        RuleId::Hyp => {
            if n != 0 {
                return fail(path, "HYP must be a leaf");
            }
            if !cx.hyp_index.contains(&node.conclusion) && !live.contains(&node.conclusion) {
                return fail(
                    path,
                    format!(
                        "hypothesis `{}` is neither in the base nor a live assumption",
                        pretty(&node.conclusion)
                    ),
                );
            }
            Ok(())
        }
        RuleId::Reiteration => {
            if n != 1 || premise(0).conclusion != node.conclusion {
                return fail(path, "reiteration must restate its single premise");
            }
            descend_all(cx, live, path)
        }
        RuleId::AndIntro => {
            let Formula::And(cs) = &node.conclusion else {
                return fail(path, "AndI must conclude a conjunction");
            };
            if cs.len() != n {
                return fail(path, "AndI premise count mismatch");
            }
            for (i, c) in cs.iter().enumerate() {
                if &premise(i).conclusion != c {
                    return fail(path, format!("AndI premise {i} proves the wrong conjunct"));
                }
            }
            descend_all(cx, live, path)
        }
        RuleId::AndElim => {
            if n != 1 {
                return fail(path, "AndE takes one premise");
            }
            let Formula::And(cs) = &premise(0).conclusion else {
                return fail(path, "AndE premise must be a conjunction");
            };
            if !cs.contains(&node.conclusion) {
                return fail(path, "AndE conclusion is not a conjunct of its premise");
            }
            descend_all(cx, live, path)
        }
        RuleId::OrIntro => {
            let Formula::Or(ds) = &node.conclusion else {
                return fail(path, "OrI must conclude a disjunction");
            };
            if n != 1 || !ds.contains(&premise(0).conclusion) {
                return fail(path, "OrI premise must prove one disjunct");
            }
            descend_all(cx, live, path)
        }
        RuleId::OrElim => {
            if n < 2 {
                return fail(path, "OrE takes the disjunction plus one branch per disjunct");
            }
            let Formula::Or(ds) = &premise(0).conclusion else {
                return fail(path, "OrE first premise must be a disjunction");
            };
            if ds.len() != n - 1 || discharged.len() != ds.len() {
                return fail(path, "OrE branch or discharge count mismatch");
            }
            descend(0, cx, live, path)?;
            for (i, d) in ds.iter().enumerate() {
                if discharged[i] != d {
                    return fail(path, format!("OrE branch {i} discharges the wrong case"));
                }
                if premise(i + 1).conclusion != node.conclusion {
                    return fail(path, format!("OrE branch {i} proves the wrong conclusion"));
                }
                live.push(d.clone());
                let r = descend(i + 1, cx, live, path);
                live.pop();
                r?;
            }
            Ok(())
        }
        RuleId::ImpIntro => {
            let Formula::Implies(a, b) = &node.conclusion else {
                return fail(path, "ImpI must conclude an implication");
            };
            if n != 1 || discharged.len() != 1 || discharged[0] != a.as_ref() {
                return fail(path, "ImpI must discharge exactly the antecedent");
            }
            if &premise(0).conclusion != b.as_ref() {
                return fail(path, "ImpI premise must prove the consequent");
            }
            live.push(a.as_ref().clone());
            let r = descend(0, cx, live, path);
            live.pop();
            r
        }
        RuleId::ImpElim => {
            if n != 2 {
                return fail(path, "ImpE takes two premises");
            }
            let Formula::Implies(a, b) = &premise(0).conclusion else {
                return fail(path, "ImpE first premise must be an implication");
            };
            if &premise(1).conclusion != a.as_ref() || b.as_ref() != &node.conclusion {
                return fail(path, "ImpE premises do not fit the conclusion");
            }
            descend_all(cx, live, path)
        }
        RuleId::NotIntro => {
            let Formula::Not(a) = &node.conclusion else {
                return fail(path, "NegI must conclude a negation");
            };
            if n != 1 || discharged.len() != 1 || discharged[0] != a.as_ref() {
                return fail(path, "NegI must discharge exactly the negated formula");
            }
            if !premise(0).conclusion.is_falsum() {
                return fail(path, "NegI premise must prove falsum");
            }
            live.push(a.as_ref().clone());
            let r = descend(0, cx, live, path);
            live.pop();
            r
        }
        RuleId::NotElim => {
            if !node.conclusion.is_falsum() {
                return fail(path, "NegE must conclude falsum");
            }
            if n != 2 || premise(1).conclusion != Formula::not(premise(0).conclusion.clone()) {
                return fail(path, "NegE premises must be a formula and its negation");
            }
            descend_all(cx, live, path)
        }
        RuleId::FalsumElim => {
            if n != 1 || !premise(0).conclusion.is_falsum() {
                return fail(path, "BotE premise must prove falsum");
            }
            descend_all(cx, live, path)
        }
        RuleId::Dne => {
            if n != 1
                || premise(0).conclusion
                    != Formula::not(Formula::not(node.conclusion.clone()))
            {
                return fail(path, "DNE premise must be the double negation");
            }
            descend_all(cx, live, path)
        }
        RuleId::ForallIntro => {
            let Formula::ForAll { var, sort, body } = &node.conclusion else {
                return fail(path, "AllI must conclude a universal");
            };
            let Some(SideCondition::Eigen(eigen)) = node.side.first() else {
                return fail(path, "AllI requires an eigenvariable side condition");
            };
            let Term::Const { name, sort: es } = eigen else {
                return fail(path, "eigenvariable must be a constant");
            };
            if es != sort {
                return fail(path, "eigenvariable sort mismatch");
            }
            if cx.name_occurs(name, live) || node.conclusion.contains_const(name) {
                return fail(path, "eigenvariable is not fresh");
            }
            let expected = match substitute(body, var, sort, eigen, cx.sig) {
                Ok(f) => f,
                Err(e) => return fail(path, format!("bad instantiation: {e}")),
            };
            if n != 1 || premise(0).conclusion != expected {
                return fail(path, "AllI premise must prove the eigen instance");
            }
            descend_all(cx, live, path)
        }
        RuleId::ForallElim => {
            if n != 1 {
                return fail(path, "AllE takes one premise");
            }
            let Formula::ForAll { var, sort, body } = &premise(0).conclusion else {
                return fail(path, "AllE premise must be a universal");
            };
            let Some(SideCondition::Witness(t)) = node.side.first() else {
                return fail(path, "AllE requires a witness side condition");
            };
            if !t.is_ground() || !cx.sig.is_subsort(t.sort(), sort) {
                return fail(path, "AllE witness must be ground and sort-compatible");
            }
            let expected = match substitute(body, var, sort, t, cx.sig) {
                Ok(f) => f,
                Err(e) => return fail(path, format!("bad instantiation: {e}")),
            };
            if node.conclusion != expected {
                return fail(path, "AllE conclusion is not the witness instance");
            }
            descend_all(cx, live, path)
        }
        RuleId::ExistsIntro => {
            let Formula::Exists { var, sort, body } = &node.conclusion else {
                return fail(path, "ExI must conclude an existential");
            };
            let Some(SideCondition::Witness(t)) = node.side.first() else {
                return fail(path, "ExI requires a witness side condition");
            };
            if !t.is_ground() || !cx.sig.is_subsort(t.sort(), sort) {
                return fail(path, "ExI witness must be ground and sort-compatible");
            }
            let expected = match substitute(body, var, sort, t, cx.sig) {
                Ok(f) => f,
                Err(e) => return fail(path, format!("bad instantiation: {e}")),
            };
            if n != 1 || premise(0).conclusion != expected {
                return fail(path, "ExI premise must prove the witness instance");
            }
            descend_all(cx, live, path)
        }
        RuleId::ExistsElim => {
            if n != 2 {
                return fail(path, "ExE takes the existential plus the main premise");
            }
            let Formula::Exists { var, sort, body } = &premise(0).conclusion else {
                return fail(path, "ExE first premise must be an existential");
            };
            let (Some(SideCondition::Eigen(eigen)), 1) = (node.side.first(), discharged.len())
            else {
                return fail(path, "ExE requires an eigenvariable and one discharge");
            };
            let Term::Const { name, sort: es } = eigen else {
                return fail(path, "eigenvariable must be a constant");
            };
            if es != sort {
                return fail(path, "eigenvariable sort mismatch");
            }
            if cx.name_occurs(name, live)
                || node.conclusion.contains_const(name)
                || premise(0).conclusion.contains_const(name)
            {
                return fail(path, "eigenvariable is not fresh");
            }
            let inst = match substitute(body, var, sort, eigen, cx.sig) {
                Ok(f) => f,
                Err(e) => return fail(path, format!("bad instantiation: {e}")),
            };
            if discharged[0] != &inst {
                return fail(path, "ExE discharge must be the eigen instance");
            }
            if premise(1).conclusion != node.conclusion {
                return fail(path, "ExE main premise must prove the conclusion");
            }
            descend(0, cx, live, path)?;
            live.push(inst);
            let r = descend(1, cx, live, path);
            live.pop();
            r
        }
        RuleId::Ik | RuleId::Ib => {
            let knowledge = node.rule == RuleId::Ik;
            let (agent, t2, body) = match (&node.conclusion, knowledge) {
                (Formula::Knows { agent, time, body }, true)
                | (Formula::Believes { agent, time, body }, false) => (agent, time, body),
                _ => {
                    return fail(
                        path,
                        if knowledge {
                            "IK must conclude a K formula"
                        } else {
                            "IB must conclude a B formula"
                        },
                    )
                }
            };
            let Some(SideCondition::TimeLe(t1, t2_side)) = node
                .side
                .iter()
                .find(|s| matches!(s, SideCondition::TimeLe(..)))
            else {
                return fail(path, "IK/IB requires a time side condition");
            };
            if t2_side != t2 {
                return fail(path, "IK/IB time side condition must target the conclusion time");
            }
            if !cx.order_with(live).le(t1, t2) {
                return fail(path, "IK/IB time side condition violated: t1 <= t2 fails");
            }
            if discharged.is_empty() || n != discharged.len() + 1 {
                return fail(path, "IK/IB premise/discharge counts do not fit");
            }
            for (i, psi) in discharged.iter().enumerate() {
                let ok = match (&premise(i).conclusion, knowledge) {
                    (Formula::Knows { agent: a, time: t, body: b }, true)
                    | (Formula::Believes { agent: a, time: t, body: b }, false) => {
                        a == agent && t == t1 && b.as_ref() == *psi
                    }
                    _ => false,
                };
                if !ok {
                    return fail(
                        path,
                        format!("IK/IB premise {i} must wrap discharged member {i} at t1"),
                    );
                }
                descend(i, cx, live, path)?;
            }
            let inner = premise(n - 1);
            if &inner.conclusion != body.as_ref() {
                return fail(path, "IK/IB inner derivation must conclude the body");
            }
            // The inner derivation runs from the discharged members alone.
            let inner_cx = Cx::new(cx.sig, discharged.iter().map(|f| (*f).clone()).collect());
            let mut inner_live = Vec::new();
            path.push(n - 1);
            let r = check_node(inner, &inner_cx, &mut inner_live, path);
            path.pop();
            r
        }
        RuleId::I4 => {
            if n != 1 {
                return fail(path, "I4 takes one premise");
            }
            match &premise(0).conclusion {
                Formula::Knows { body, .. } if body.as_ref() == &node.conclusion => {
                    descend_all(cx, live, path)
                }
                _ => fail(path, "I4 premise must be K of the conclusion"),
            }
        }
        RuleId::I13 => {
            if n != 1 {
                return fail(path, "I13 takes one premise");
            }
            let Formula::Perceives { agent, time, body } = &node.conclusion else {
                return fail(path, "I13 must conclude a P formula");
            };
            let Formula::Intends {
                agent: ia,
                time: it,
                body: ib,
            } = &premise(0).conclusion
            else {
                return fail(path, "I13 premise must be an I formula");
            };
            if ia != agent || ib != body {
                return fail(path, "I13 premise does not match the conclusion");
            }
            let Some(SideCondition::TimeLt(t0, t1)) = node
                .side
                .iter()
                .find(|s| matches!(s, SideCondition::TimeLt(..)))
            else {
                return fail(path, "I13 requires a strict time side condition");
            };
            if t0 != it || t1 != time {
                return fail(path, "I13 side condition times must match premise/conclusion");
            }
            if !cx.order_with(live).lt(t0, t1) {
                return fail(path, "I13 time side condition violated: t < t' fails");
            }
            descend_all(cx, live, path)
        }
        RuleId::I14 => {
            if n != 3 {
                return fail(path, "I14 takes three premises");
            }
            let Formula::Knows {
                agent: ka,
                time: kt,
                body: kb,
            } = &node.conclusion
            else {
                return fail(path, "I14 must conclude K(a, t, I(a, t, chi))");
            };
            let Formula::Intends {
                agent: ia,
                time: it,
                body: chi,
            } = kb.as_ref()
            else {
                return fail(path, "I14 must conclude K(a, t, I(a, t, chi))");
            };
            if ia != ka || it != kt {
                return fail(path, "I14 intention must be the agent's own, same time");
            }
            let Formula::Ought {
                agent: oa,
                time: ot,
                condition,
                action,
                ..
            } = &premise(2).conclusion
            else {
                return fail(path, "I14 third premise must be an obligation");
            };
            if oa != ka || ot != kt || action.as_ref() != chi.as_ref() {
                return fail(path, "I14 obligation must prescribe chi for the agent at t");
            }
            let want_b_cond = Formula::Believes {
                agent: ka.clone(),
                time: kt.clone(),
                body: condition.clone(),
            };
            let want_b_ought = Formula::Believes {
                agent: ka.clone(),
                time: kt.clone(),
                body: Box::new(premise(2).conclusion.clone()),
            };
            if premise(0).conclusion != want_b_cond {
                return fail(path, "I14 first premise must be B(a, t, condition)");
            }
            if premise(1).conclusion != want_b_ought {
                return fail(path, "I14 second premise must be B(a, t, obligation)");
            }
            descend_all(cx, live, path)
        }
    }
}
