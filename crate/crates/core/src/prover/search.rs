//! Goal-directed backward search over the saturated closure.
//!
//! Connective goals are decomposed by their introduction rules; modal goals
//! go through the IK/IB/I13/I14 schemata with instances drawn from the
//! closure; falsum is sought through present negations; and a classical
//! fallback reduces any goal to absurdity of its negation followed by DNE.

use std::collections::HashMap;

use crate::kernel::{substitute, Formula, Term};

use super::proof::{Proof, SideCondition};
use super::rules::RuleId;
use super::saturate::Closure;
use super::{Budget, ExhaustFlags};

pub(crate) struct Searcher {
    budget: Budget,
    pub(crate) flags: ExhaustFlags,
    eigen_counter: usize,
    /// goal + closure fingerprint -> highest depth at which it already failed.
    failed: HashMap<(Formula, u64), u32>,
}

impl Searcher {
    pub(crate) fn new(budget: &Budget) -> Searcher {
        Searcher {
            budget: budget.clone(),
            flags: ExhaustFlags::default(),
            eigen_counter: 0,
            failed: HashMap::new(),
        }
    }

    fn fresh_eigen(&mut self, sort: &str) -> Term {
        let name = format!("#e{}", self.eigen_counter);
        self.eigen_counter += 1;
        Term::Const {
            name,
            sort: sort.into(),
        }
    }

    pub(crate) fn prove_goal(&mut self, cl: &Closure, goal: &Formula, depth: u32) -> Option<Proof> {
        if let Some(p) = cl.proof(goal) {
            return Some(p.clone());
        }
        if depth == 0 {
            self.flags.depth = true;
            return None;
        }
        if let Some(&d) = self.failed.get(&(goal.clone(), cl.fingerprint)) {
            if d >= depth {
                return None;
            }
        }
        let result = self
            .try_intro(cl, goal, depth)
            .or_else(|| self.try_or_elim(cl, goal, depth))
            .or_else(|| self.try_exists_elim(cl, goal, depth))
            .or_else(|| self.try_reductio(cl, goal, depth));
        if result.is_none() {
            let key = (goal.clone(), cl.fingerprint);
            let entry = self.failed.entry(key).or_insert(0);
            *entry = (*entry).max(depth);
        }
        self.flags.merge(&cl.flags);
        result
    }

    fn try_intro(&mut self, cl: &Closure, goal: &Formula, depth: u32) -> Option<Proof> {
        match goal {
            Formula::Atom(_) if goal.is_falsum() => self.prove_falsum_targets(cl, depth),
            Formula::And(fs) => {
                let mut premises = Vec::with_capacity(fs.len());
                for f in fs {
                    premises.push(self.prove_goal(cl, f, depth - 1)?);
                }
                Some(Proof {
                    conclusion: goal.clone(),
                    rule: RuleId::AndIntro,
                    premises,
                    side: vec![],
                })
            }
            Formula::Or(ds) => {
                for d in ds {
                    if let Some(p) = self.prove_goal(cl, d, depth - 1) {
                        return Some(Proof {
                            conclusion: goal.clone(),
                            rule: RuleId::OrIntro,
                            premises: vec![p],
                            side: vec![],
                        });
                    }
                }
                None
            }
            Formula::Implies(a, b) => {
                let extended = cl.assume(a.as_ref().clone());
                let body = self.prove_goal(&extended, b, depth - 1)?;
                Some(Proof {
                    conclusion: goal.clone(),
                    rule: RuleId::ImpIntro,
                    premises: vec![body],
                    side: vec![SideCondition::Discharged(a.as_ref().clone())],
                })
            }
            Formula::Not(a) => {
                let extended = cl.assume(a.as_ref().clone());
                let absurd = self.prove_goal(&extended, &Formula::falsum(), depth - 1)?;
                Some(Proof {
                    conclusion: goal.clone(),
                    rule: RuleId::NotIntro,
                    premises: vec![absurd],
                    side: vec![SideCondition::Discharged(a.as_ref().clone())],
                })
            }
            Formula::ForAll { var, sort, body } => {
                let eigen = self.fresh_eigen(sort);
                let inst = substitute(body, var, sort, &eigen, &cl.sig).ok()?;
                let premise = self.prove_goal(cl, &inst, depth - 1)?;
                Some(Proof {
                    conclusion: goal.clone(),
                    rule: RuleId::ForallIntro,
                    premises: vec![premise],
                    side: vec![SideCondition::Eigen(eigen)],
                })
            }
            Formula::Exists { var, sort, body } => {
                for t in cl.candidates(sort) {
                    if let Ok(inst) = substitute(body, var, sort, &t, &cl.sig) {
                        if let Some(p) = self.prove_goal(cl, &inst, depth - 1) {
                            return Some(Proof {
                                conclusion: goal.clone(),
                                rule: RuleId::ExistsIntro,
                                premises: vec![p],
                                side: vec![SideCondition::Witness(t)],
                            });
                        }
                    }
                }
                None
            }
            Formula::Knows { agent, time, body } => self
                .try_i14(cl, goal, agent, time, body, depth)
                .or_else(|| self.try_closure_rule(cl, goal, agent, time, body, depth, true)),
            Formula::Believes { agent, time, body } => {
                self.try_closure_rule(cl, goal, agent, time, body, depth, false)
            }
            Formula::Perceives { agent, time, body } => self.try_i13(cl, goal, agent, time, body),
            _ => None,
        }
    }

    /// IK / IB: the agent's knowledge (belief) at an earlier moment, closed
    /// under derivation.
    #[allow(clippy::too_many_arguments)]
    fn try_closure_rule(
        &mut self,
        cl: &Closure,
        goal: &Formula,
        agent: &Term,
        time: &Term,
        body: &Formula,
        depth: u32,
        knowledge: bool,
    ) -> Option<Proof> {
        // Group closure entries K(agent, t1, _) by t1 (first-seen order).
        let mut groups: Vec<(Term, Vec<(Formula, Formula)>)> = Vec::new();
        for entry in cl.entries() {
            let (a, t1, inner) = match (knowledge, entry) {
                (true, Formula::Knows { agent, time, body }) => (agent, time, body.as_ref()),
                (false, Formula::Believes { agent, time, body }) => (agent, time, body.as_ref()),
                _ => continue,
            };
            if a != agent || !cl.order.le(t1, time) {
                continue;
            }
            match groups.iter_mut().find(|(t, _)| t == t1) {
                Some((_, members)) => members.push((entry.clone(), inner.clone())),
                None => groups.push((t1.clone(), vec![(entry.clone(), inner.clone())])),
            }
        }
        for (t1, members) in groups {
            let hypotheses: Vec<Formula> = members.iter().map(|(_, inner)| inner.clone()).collect();
            let mut inner_cl = Closure::new(&cl.sig, hypotheses.iter(), &self.budget);
            inner_cl.seed_terms(body);
            if let Some(inner_proof) = self.prove_goal(&inner_cl, body, depth - 1) {
                let mut premises: Vec<Proof> = Vec::new();
                for (wrapped, _) in &members {
                    premises.push(cl.proof(wrapped).cloned().unwrap_or_else(|| {
                        Proof::hyp(wrapped.clone())
                    }));
                }
                premises.push(inner_proof);
                let mut side = vec![SideCondition::TimeLe(t1.clone(), time.clone())];
                side.extend(hypotheses.into_iter().map(SideCondition::Discharged));
                return Some(Proof {
                    conclusion: goal.clone(),
                    rule: if knowledge { RuleId::Ik } else { RuleId::Ib },
                    premises,
                    side,
                });
            }
        }
        None
    }

    /// I14: believed obligation plus the obligation itself yield a known
    /// intention.
    fn try_i14(
        &mut self,
        cl: &Closure,
        goal: &Formula,
        agent: &Term,
        time: &Term,
        body: &Formula,
        depth: u32,
    ) -> Option<Proof> {
        let Formula::Intends {
            agent: ia,
            time: it,
            body: chi,
        } = body
        else {
            return None;
        };
        if ia != agent || it != time {
            return None;
        }
        let oughts: Vec<Formula> = cl
            .entries()
            .iter()
            .filter(|e| {
                matches!(e, Formula::Ought { agent: oa, time: ot, action, .. }
                    if oa == agent && ot == time && action.as_ref() == chi.as_ref())
            })
            .cloned()
            .collect();
        for ought in oughts {
            let Formula::Ought { condition, .. } = &ought else {
                continue;
            };
            let b_cond = Formula::Believes {
                agent: agent.clone(),
                time: time.clone(),
                body: condition.clone(),
            };
            let b_ought = Formula::Believes {
                agent: agent.clone(),
                time: time.clone(),
                body: Box::new(ought.clone()),
            };
            let (Some(p1), Some(p2), Some(p3)) = (
                self.prove_goal(cl, &b_cond, depth - 1),
                self.prove_goal(cl, &b_ought, depth - 1),
                self.prove_goal(cl, &ought, depth - 1),
            ) else {
                continue;
            };
            return Some(Proof {
                conclusion: goal.clone(),
                rule: RuleId::I14,
                premises: vec![p1, p2, p3],
                side: vec![],
            });
        }
        None
    }

    /// I13: an intention at t becomes a perception at any later t'.
    fn try_i13(
        &mut self,
        cl: &Closure,
        goal: &Formula,
        agent: &Term,
        time: &Term,
        body: &Formula,
    ) -> Option<Proof> {
        for entry in cl.entries() {
            if let Formula::Intends {
                agent: ia,
                time: it,
                body: ib,
            } = entry
            {
                if ia == agent && ib.as_ref() == body && cl.order.lt(it, time) {
                    return Some(Proof {
                        conclusion: goal.clone(),
                        rule: RuleId::I13,
                        premises: vec![cl.proof(entry).cloned().expect("entry has proof")],
                        side: vec![SideCondition::TimeLt(it.clone(), time.clone())],
                    });
                }
            }
        }
        None
    }

    /// Falsum via a present negation: prove phi for some `not phi` at hand.
    fn prove_falsum_targets(&mut self, cl: &Closure, depth: u32) -> Option<Proof> {
        let falsum = Formula::falsum();
        let targets: Vec<Formula> = cl
            .entries()
            .iter()
            .filter_map(|e| match e {
                Formula::Not(inner) => Some(inner.as_ref().clone()),
                _ => None,
            })
            .collect();
        for phi in targets {
            let neg = Formula::not(phi.clone());
            if let Some(p_phi) = self.prove_goal(cl, &phi, depth - 1) {
                let p_neg = cl.proof(&neg).cloned().expect("negation is present");
                return Some(Proof {
                    conclusion: falsum,
                    rule: RuleId::NotElim,
                    premises: vec![p_phi, p_neg],
                    side: vec![],
                });
            }
        }
        None
    }

    /// Case analysis over a present disjunction.
    fn try_or_elim(&mut self, cl: &Closure, goal: &Formula, depth: u32) -> Option<Proof> {
        let disjunctions: Vec<Formula> = cl
            .entries()
            .iter()
            .filter(|e| matches!(e, Formula::Or(_)) && *e != goal)
            .cloned()
            .collect();
        for or_formula in disjunctions {
            let Formula::Or(ds) = &or_formula else {
                continue;
            };
            // Splitting is pointless when a disjunct is already present.
            if ds.iter().any(|d| cl.has(d)) {
                continue;
            }
            let mut premises = vec![cl.proof(&or_formula).cloned().expect("entry has proof")];
            let mut side = Vec::new();
            let mut ok = true;
            for d in ds {
                let branch = cl.assume(d.clone());
                match self.prove_goal(&branch, goal, depth - 1) {
                    Some(p) => {
                        premises.push(p);
                        side.push(SideCondition::Discharged(d.clone()));
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                return Some(Proof {
                    conclusion: goal.clone(),
                    rule: RuleId::OrElim,
                    premises,
                    side,
                });
            }
        }
        None
    }

    /// Open a present existential under a fresh eigenvariable.
    fn try_exists_elim(&mut self, cl: &Closure, goal: &Formula, depth: u32) -> Option<Proof> {
        let existentials: Vec<Formula> = cl
            .entries()
            .iter()
            .filter(|e| matches!(e, Formula::Exists { .. }))
            .cloned()
            .collect();
        for ex in existentials {
            let Formula::Exists { var, sort, body } = &ex else {
                continue;
            };
            if ex == *goal {
                continue;
            }
            let eigen = self.fresh_eigen(sort);
            if goal.contains_const(eigen_name(&eigen)) {
                continue;
            }
            let Ok(inst) = substitute(body, var, sort, &eigen, &cl.sig) else {
                continue;
            };
            if cl.has(&inst) {
                continue;
            }
            let branch = cl.assume(inst.clone());
            if let Some(main) = self.prove_goal(&branch, goal, depth - 1) {
                return Some(Proof {
                    conclusion: goal.clone(),
                    rule: RuleId::ExistsElim,
                    premises: vec![cl.proof(&ex).cloned().expect("entry has proof"), main],
                    side: vec![SideCondition::Eigen(eigen), SideCondition::Discharged(inst)],
                });
            }
        }
        None
    }

    /// Classical fallback: goal from refuting its negation, closed with DNE.
    fn try_reductio(&mut self, cl: &Closure, goal: &Formula, depth: u32) -> Option<Proof> {
        if goal.is_falsum() {
            return None;
        }
        let negated = Formula::not(goal.clone());
        if cl.has(&negated) {
            // The closure already pairs negations; a direct hit would have
            // been found. Assuming again cannot help.
        }
        let extended = cl.assume(negated.clone());
        let absurd = self.prove_goal(&extended, &Formula::falsum(), depth - 1)?;
        let double_neg = Proof {
            conclusion: Formula::not(negated.clone()),
            rule: RuleId::NotIntro,
            premises: vec![absurd],
            side: vec![SideCondition::Discharged(negated)],
        };
        Some(Proof {
            conclusion: goal.clone(),
            rule: RuleId::Dne,
            premises: vec![double_neg],
            side: vec![],
        })
    }
}

fn eigen_name(t: &Term) -> &str {
    match t {
        Term::Const { name, .. } => name,
        _ => "",
    }
}
