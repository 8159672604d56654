//! Proof-carrying forward closure.
//!
//! Saturation applies the elimination rules (AndE, ImpE, DNE, I4, NegE) plus
//! quantifier instantiation until fixpoint. Universally quantified
//! implications are instantiated by matching their antecedent literals
//! against the closure rather than by blind enumeration, which keeps the
//! event-calculus axioms cheap; other universal facts are instantiated over
//! the ground-term pool, bounded by the candidate budget. Every derived
//! formula carries a complete proof built from official rules only.

use std::collections::{HashMap, HashSet};

use crate::kernel::{substitute, Formula, Signature, Term};

use super::order::MomentOrder;
use super::proof::{Proof, SideCondition};
use super::rules::RuleId;
use super::{Budget, ExhaustFlags};

#[derive(Debug, Clone)]
pub(crate) struct Closure {
    pub(crate) sig: Signature,
    pub(crate) order: MomentOrder,
    entries: Vec<Formula>,
    proofs: HashMap<Formula, Proof>,
    pool: Vec<Term>,
    pool_index: HashSet<Term>,
    /// (universal formula, full binding) pairs already expanded.
    applied: HashSet<(Formula, Vec<Term>)>,
    pub(crate) candidates_used: usize,
    pub(crate) flags: ExhaustFlags,
    budget: Budget,
    /// Fingerprint of the entry set, used by the search failure memo.
    pub(crate) fingerprint: u64,
}

fn hash_of(f: &Formula) -> u64 {
    use std::hash::{Hash, Hasher};
    let mut h = std::collections::hash_map::DefaultHasher::new();
    f.hash(&mut h);
    h.finish()
}

impl Closure {
    pub(crate) fn new<'a>(
        sig: &Signature,
        base: impl Iterator<Item = &'a Formula>,
        budget: &Budget,
    ) -> Closure {
        let mut cl = Closure {
            sig: sig.clone(),
            order: MomentOrder::default(),
            entries: Vec::new(),
            proofs: HashMap::new(),
            pool: Vec::new(),
            pool_index: HashSet::new(),
            applied: HashSet::new(),
            candidates_used: 0,
            flags: ExhaustFlags::default(),
            budget: budget.clone(),
            fingerprint: 0,
        };
        for f in base {
            cl.add(f.clone(), Proof::hyp(f.clone()));
        }
        cl.saturate();
        cl
    }

    /// Extend the candidate pool with the ground terms of `f` (typically the
    /// goal) and re-saturate, so instantiation can reach goal-only terms.
    pub(crate) fn seed_terms(&mut self, f: &Formula) {
        let mut terms = Vec::new();
        f.ground_terms(&mut terms);
        let mut grew = false;
        for t in terms {
            if self.pool_index.insert(t.clone()) {
                self.pool.push(t);
                grew = true;
            }
        }
        if grew {
            self.saturate();
        }
    }

    pub(crate) fn entries(&self) -> &[Formula] {
        &self.entries
    }

    pub(crate) fn proof(&self, f: &Formula) -> Option<&Proof> {
        self.proofs.get(f)
    }

    pub(crate) fn has(&self, f: &Formula) -> bool {
        self.proofs.contains_key(f)
    }

    pub(crate) fn inconsistency(&self) -> Option<&Proof> {
        self.proofs.get(&Formula::falsum())
    }

    /// Ground candidate terms whose sort fits `sort`, first-seen order.
    pub(crate) fn candidates(&self, sort: &str) -> Vec<Term> {
        self.pool
            .iter()
            .filter(|t| self.sig.is_subsort(t.sort(), sort))
            .cloned()
            .collect()
    }

    /// Extend with an assumption and re-saturate.
    pub(crate) fn assume(&self, f: Formula) -> Closure {
        let mut cl = self.clone();
        cl.add(f.clone(), Proof::hyp(f));
        cl.saturate();
        cl
    }

    fn add(&mut self, f: Formula, proof: Proof) -> bool {
        if self.proofs.contains_key(&f) {
            return false;
        }
        if f.size() > self.budget.max_formula_size {
            self.flags.size = true;
            return false;
        }
        self.order.absorb(&f);
        let mut terms = Vec::new();
        f.ground_terms(&mut terms);
        for t in terms {
            if self.pool_index.insert(t.clone()) {
                self.pool.push(t);
            }
        }
        self.fingerprint ^= hash_of(&f);
        self.entries.push(f.clone());
        self.proofs.insert(f, proof);
        true
    }

    pub(crate) fn saturate(&mut self) {
        loop {
            let mut changed = false;
            let mut i = 0;
            while i < self.entries.len() {
                let f = self.entries[i].clone();
                changed |= self.step(&f);
                i += 1;
            }
            if !changed {
                break;
            }
        }
    }

    /// Apply every forward rule to one entry. Returns whether anything new
    /// was derived.
    fn step(&mut self, f: &Formula) -> bool {
        let mut changed = false;
        let proof = self.proofs.get(f).cloned().expect("entry has a proof");

        // Contradiction with a present negation.
        let neg = Formula::not(f.clone());
        if let Some(neg_proof) = self.proofs.get(&neg).cloned() {
            changed |= self.add(
                Formula::falsum(),
                Proof {
                    conclusion: Formula::falsum(),
                    rule: RuleId::NotElim,
                    premises: vec![proof.clone(), neg_proof],
                    side: vec![],
                },
            );
        }

        match f {
            Formula::And(fs) => {
                for c in fs {
                    changed |= self.add(
                        c.clone(),
                        Proof {
                            conclusion: c.clone(),
                            rule: RuleId::AndElim,
                            premises: vec![proof.clone()],
                            side: vec![],
                        },
                    );
                }
            }
            Formula::Not(inner) => {
                if let Formula::Not(g) = inner.as_ref() {
                    changed |= self.add(
                        g.as_ref().clone(),
                        Proof {
                            conclusion: g.as_ref().clone(),
                            rule: RuleId::Dne,
                            premises: vec![proof.clone()],
                            side: vec![],
                        },
                    );
                }
            }
            Formula::Knows { body, .. } => {
                changed |= self.add(
                    body.as_ref().clone(),
                    Proof {
                        conclusion: body.as_ref().clone(),
                        rule: RuleId::I4,
                        premises: vec![proof.clone()],
                        side: vec![],
                    },
                );
            }
            Formula::Implies(a, b) => {
                if let Some(pa) = self.proofs.get(a.as_ref()).cloned() {
                    changed |= self.add(
                        b.as_ref().clone(),
                        Proof {
                            conclusion: b.as_ref().clone(),
                            rule: RuleId::ImpElim,
                            premises: vec![proof.clone(), pa],
                            side: vec![],
                        },
                    );
                } else {
                    // Derive a disjunctive or conjunctive antecedent when its
                    // parts are present, so the implication can fire.
                    match a.as_ref() {
                        Formula::Or(ds) => {
                            for d in ds {
                                if let Some(pd) = self.proofs.get(d).cloned() {
                                    changed |= self.add(
                                        a.as_ref().clone(),
                                        Proof {
                                            conclusion: a.as_ref().clone(),
                                            rule: RuleId::OrIntro,
                                            premises: vec![pd],
                                            side: vec![],
                                        },
                                    );
                                    break;
                                }
                            }
                        }
                        Formula::And(cs) => {
                            if cs.iter().all(|c| self.proofs.contains_key(c)) {
                                let premises =
                                    cs.iter().map(|c| self.proofs[c].clone()).collect();
                                changed |= self.add(
                                    a.as_ref().clone(),
                                    Proof {
                                        conclusion: a.as_ref().clone(),
                                        rule: RuleId::AndIntro,
                                        premises,
                                        side: vec![],
                                    },
                                );
                            }
                        }
                        _ => {}
                    }
                }
            }
            Formula::ForAll { .. } => {
                changed |= self.expand_universal(f, &proof);
            }
            _ => {}
        }
        changed
    }

    /// Instantiate a universally quantified entry.
    fn expand_universal(&mut self, f: &Formula, proof: &Proof) -> bool {
        let mut vars = Vec::new();
        let mut core = f;
        while let Formula::ForAll { var, sort, body } = core {
            vars.push((var.clone(), sort.clone()));
            core = body;
        }
        if let Formula::Implies(ante, head) = core {
            self.expand_guided(f, proof, &vars, ante, head)
        } else {
            self.expand_blind(f, proof, &vars[0])
        }
    }

    /// Blind instantiation of the outermost variable over the term pool.
    fn expand_blind(&mut self, f: &Formula, proof: &Proof, var: &(String, String)) -> bool {
        let mut changed = false;
        let candidates = self.candidates(&var.1);
        for t in candidates {
            let key = (f.clone(), vec![t.clone()]);
            if self.applied.contains(&key) {
                continue;
            }
            if self.candidates_used >= self.budget.max_candidates {
                self.flags.candidates = true;
                return changed;
            }
            self.candidates_used += 1;
            self.applied.insert(key);
            if let Some((inst, inst_proof)) = self.instantiate_once(f, proof, &t) {
                changed |= self.add(inst, inst_proof);
            }
        }
        changed
    }

    fn instantiate_once(&self, f: &Formula, proof: &Proof, t: &Term) -> Option<(Formula, Proof)> {
        let Formula::ForAll { var, sort, body } = f else {
            return None;
        };
        let inst = substitute(body, var, sort, t, &self.sig).ok()?;
        let node = Proof {
            conclusion: inst.clone(),
            rule: RuleId::ForallElim,
            premises: vec![proof.clone()],
            side: vec![SideCondition::Witness(t.clone())],
        };
        Some((inst, node))
    }

    /// Guided instantiation: match antecedent literals against the closure.
    fn expand_guided(
        &mut self,
        f: &Formula,
        proof: &Proof,
        vars: &[(String, String)],
        ante: &Formula,
        _head: &Formula,
    ) -> bool {
        let lits: Vec<&Formula> = match ante {
            Formula::And(ls) => ls.iter().collect(),
            other => vec![other],
        };
        // Match positive atoms first so they bind variables, then negated
        // atoms, then anything else (which must be fully ground by then).
        let mut ordered: Vec<&Formula> = Vec::new();
        for pass in 0..3 {
            for l in &lits {
                let class = match l {
                    Formula::Atom(_) => 0,
                    Formula::Not(inner) if matches!(inner.as_ref(), Formula::Atom(_)) => 1,
                    _ => 2,
                };
                if class == pass {
                    ordered.push(l);
                }
            }
        }
        let mut bindings: Vec<Vec<(String, Term)>> = vec![Vec::new()];
        for lit in ordered {
            let mut next = Vec::new();
            for binding in &bindings {
                self.match_literal(lit, binding, &mut next);
            }
            bindings = next;
            if bindings.is_empty() {
                return false;
            }
        }

        let mut changed = false;
        for binding in bindings {
            // Enumerate any head-only variables left unbound.
            let mut full: Vec<Vec<(String, Term)>> = vec![binding];
            for (name, sort) in vars {
                let mut next = Vec::new();
                for b in &full {
                    if b.iter().any(|(n, _)| n == name) {
                        next.push(b.clone());
                    } else {
                        for t in self.candidates(sort) {
                            let mut b2 = b.clone();
                            b2.push((name.clone(), t));
                            next.push(b2);
                        }
                    }
                }
                full = next;
            }
            for b in full {
                let terms: Vec<Term> = vars
                    .iter()
                    .map(|(n, _)| {
                        b.iter()
                            .find(|(bn, _)| bn == n)
                            .map(|(_, t)| t.clone())
                            .expect("binding complete")
                    })
                    .collect();
                let key = (f.clone(), terms.clone());
                if self.applied.contains(&key) {
                    continue;
                }
                if self.candidates_used >= self.budget.max_candidates {
                    self.flags.candidates = true;
                    return changed;
                }
                self.candidates_used += 1;
                self.applied.insert(key);
                changed |= self.fire_instance(f, proof, vars, &terms);
            }
        }
        changed
    }

    /// Build the AllE chain for one full binding, then fire ImpE if the
    /// instantiated antecedent is derivable from present parts.
    fn fire_instance(
        &mut self,
        f: &Formula,
        proof: &Proof,
        vars: &[(String, String)],
        terms: &[Term],
    ) -> bool {
        let mut current = f.clone();
        let mut current_proof = proof.clone();
        for ((_, _), t) in vars.iter().zip(terms) {
            let Some((inst, node)) = self.instantiate_once(&current, &current_proof, t) else {
                return false;
            };
            current = inst;
            current_proof = node;
        }
        let Formula::Implies(ante, head) = &current else {
            return false;
        };
        let ante_proof = match self.proofs.get(ante.as_ref()) {
            Some(p) => p.clone(),
            None => match ante.as_ref() {
                Formula::And(cs) => {
                    let mut premises = Vec::new();
                    for c in cs {
                        match self.proofs.get(c) {
                            Some(p) => premises.push(p.clone()),
                            None => return false,
                        }
                    }
                    Proof {
                        conclusion: ante.as_ref().clone(),
                        rule: RuleId::AndIntro,
                        premises,
                        side: vec![],
                    }
                }
                _ => return false,
            },
        };
        let head_proof = Proof {
            conclusion: head.as_ref().clone(),
            rule: RuleId::ImpElim,
            premises: vec![current_proof, ante_proof],
            side: vec![],
        };
        self.add(head.as_ref().clone(), head_proof)
    }

    /// All extensions of `binding` that match `lit` against a closure entry.
    fn match_literal(
        &self,
        lit: &Formula,
        binding: &[(String, Term)],
        out: &mut Vec<Vec<(String, Term)>>,
    ) {
        match lit {
            Formula::Atom(pat) => {
                for entry in &self.entries {
                    if let Formula::Atom(ground) = entry {
                        let mut b = binding.to_vec();
                        if self.match_term(pat, ground, &mut b) {
                            out.push(b);
                        }
                    }
                }
            }
            Formula::Not(inner) => {
                if let Formula::Atom(pat) = inner.as_ref() {
                    for entry in &self.entries {
                        if let Formula::Not(entry_inner) = entry {
                            if let Formula::Atom(ground) = entry_inner.as_ref() {
                                let mut b = binding.to_vec();
                                if self.match_term(pat, ground, &mut b) {
                                    out.push(b);
                                }
                            }
                        }
                    }
                }
            }
            other => {
                // Non-literal conjunct: usable only once fully ground under
                // the current binding, by direct membership.
                let mut ground = other.clone();
                for (name, t) in binding {
                    let fv = ground.free_vars();
                    if let Some((_, sort)) = fv.iter().find(|(n, _)| n == name) {
                        let sort = sort.clone();
                        if let Ok(g) = substitute(&ground, name, &sort, t, &self.sig) {
                            ground = g;
                        }
                    }
                }
                if ground.free_vars().is_empty() && self.has(&ground) {
                    out.push(binding.to_vec());
                }
            }
        }
    }

    fn match_term(&self, pat: &Term, ground: &Term, binding: &mut Vec<(String, Term)>) -> bool {
        match pat {
            Term::Var { name, sort } => {
                if let Some((_, bound)) = binding.iter().find(|(n, _)| n == name) {
                    bound == ground
                } else if self.sig.is_subsort(ground.sort(), sort) {
                    binding.push((name.clone(), ground.clone()));
                    true
                } else {
                    false
                }
            }
            Term::Const { .. } => pat == ground,
            Term::App { func, args, .. } => match ground {
                Term::App {
                    func: gf,
                    args: ga,
                    ..
                } => {
                    func == gf
                        && args.len() == ga.len()
                        && args
                            .iter()
                            .zip(ga)
                            .all(|(p, g)| self.match_term(p, g, binding))
                }
                _ => false,
            },
        }
    }
}
