//! Plan search with satisfaction proofs and bounded nonexistence
//! certificates.
//!
//! Candidate plans are drawn from the capability catalog and enumerated in a
//! canonical order: by length, then lexicographically over step tuples with
//! agents, action types, and times in declaration order. `search` returns the
//! first candidate that is a consistent plan and whose goal entailment proof
//! succeeds; if none exists it returns a certificate covering the entire
//! candidate space for the declared pool and horizon, cross-checked against
//! the combinatorial count.

mod certificate;
mod reify;

pub use certificate::{
    read_certificate, verify_certificate, write_certificate, CertificateError, FailureReason,
    NonexistenceCertificate,
};
pub use reify::{agent_list_term, interpret, reify};

use thiserror::Error;

use crate::kernel::{pretty, pretty_term, Formula, KernelError, KnowledgeBase, Term};
use crate::prover::{
    check, consistent, prove, Budget, Consistency, Exhausted, Proof, ProveOutcome,
};

/// One plan step: an agent performing an action type at an integer moment.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PlanStep {
    pub agent: Term,
    pub action: Term,
    pub time: i64,
}

impl PlanStep {
    pub fn render(&self) -> String {
        format!(
            "({} {} {})",
            pretty_term(&self.agent),
            pretty_term(&self.action),
            self.time
        )
    }
}

/// A time-ordered sequence of steps rooted at a planning moment. Steps are
/// strictly later than the planning time and strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub planning_time: i64,
    pub steps: Vec<PlanStep>,
}

impl Plan {
    pub fn empty(planning_time: i64) -> Plan {
        Plan {
            planning_time,
            steps: Vec::new(),
        }
    }

    pub fn agents(&self) -> Vec<Term> {
        let mut out: Vec<Term> = Vec::new();
        for s in &self.steps {
            if !out.contains(&s.agent) {
                out.push(s.agent.clone());
            }
        }
        out
    }

    pub fn render(&self) -> String {
        let steps: Vec<String> = self.steps.iter().map(PlanStep::render).collect();
        format!("[{}]", steps.join(" "))
    }

    fn well_formed(&self) -> Result<(), PlanError> {
        let mut last = self.planning_time;
        for s in &self.steps {
            if s.time <= last {
                return Err(PlanError::Malformed(format!(
                    "step times must strictly increase after the planning time: {}",
                    self.render()
                )));
            }
            last = s.time;
        }
        Ok(())
    }

    /// The happens extension: one ground atom per step.
    pub fn happens_facts(&self, kb: &KnowledgeBase) -> Result<Vec<Formula>, KernelError> {
        let sig = kb.signature();
        self.steps
            .iter()
            .map(|s| {
                let event = sig.app("action", vec![s.agent.clone(), s.action.clone()])?;
                Ok(Formula::Atom(
                    sig.app("happens", vec![event, sig.moment(s.time)])?,
                ))
            })
            .collect()
    }
}

/// A ground capability fact `can(agent, action, time)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanFact {
    pub agent: Term,
    pub action: Term,
    pub time: i64,
}

impl CanFact {
    pub fn atom(&self, kb: &KnowledgeBase) -> Result<Formula, KernelError> {
        Ok(Formula::Atom(kb.signature().app(
            "can",
            vec![
                self.agent.clone(),
                self.action.clone(),
                kb.signature().moment(self.time),
            ],
        )?))
    }

    pub fn render(&self) -> String {
        format!(
            "(can {} {} {})",
            pretty_term(&self.agent),
            pretty_term(&self.action),
            self.time
        )
    }
}

/// Prover budgets used during planning.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Budgets {
    /// For goal-entailment proofs.
    pub satisfaction: Budget,
    /// For capability provability and the bounded consistency check.
    pub consistency: Budget,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            satisfaction: Budget::default(),
            consistency: Budget::new(3, 400, 20_000),
        }
    }
}

/// A planning problem over a knowledge base.
#[derive(Debug, Clone)]
pub struct PlanningProblem {
    pub gamma: KnowledgeBase,
    /// The planning agent, recorded in certificates.
    pub planner: Term,
    pub goal: Formula,
    pub planning_time: i64,
    /// Steps may use moments in `(planning_time, planning_time + horizon]`.
    pub horizon: i64,
    /// Agents allowed to act.
    pub pool: Vec<Term>,
    /// Capability facts the plan may draw on.
    pub catalog: Vec<CanFact>,
    pub budgets: Budgets,
    /// Hard cap on the candidate count; exceeding it is an error, never a
    /// silent truncation.
    pub ceiling: u64,
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("malformed plan: {0}")]
    Malformed(String),
    #[error("malformed plan term: {0}")]
    MalformedPlanTerm(String),
    #[error("candidate count {candidates} exceeds the configured ceiling {ceiling}")]
    HorizonTooLarge { candidates: u128, ceiling: u64 },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Why a plan fails the consistency demands.
#[derive(Debug, Clone)]
pub enum PlanViolation {
    MissingCan(PlanStep),
    Inconsistent(Proof),
}

/// Result of the per-plan consistency test.
#[derive(Debug, Clone)]
pub enum PlanCheck {
    Yes,
    No(PlanViolation),
}

impl PlanCheck {
    pub fn is_yes(&self) -> bool {
        matches!(self, PlanCheck::Yes)
    }
}

/// A plan is consistent when every step's capability fact is provable and
/// the happens extension is consistent with the base (bounded check).
pub fn is_consistent_plan(
    plan: &Plan,
    gamma: &KnowledgeBase,
    budgets: &Budgets,
) -> Result<PlanCheck, PlanError> {
    plan.well_formed()?;
    for step in &plan.steps {
        let fact = CanFact {
            agent: step.agent.clone(),
            action: step.action.clone(),
            time: step.time,
        };
        let atom = fact.atom(gamma)?;
        if !prove(gamma, &atom, &budgets.consistency)?.is_proved() {
            return Ok(PlanCheck::No(PlanViolation::MissingCan(step.clone())));
        }
    }
    let extension = plan.happens_facts(gamma)?;
    match consistent(gamma, &extension, &budgets.consistency)? {
        Consistency::Inconsistent(proof) => Ok(PlanCheck::No(PlanViolation::Inconsistent(proof))),
        Consistency::ConsistentAsFarAsChecked { .. } => Ok(PlanCheck::Yes),
    }
}

/// Outcome of the goal-entailment test for one plan.
#[derive(Debug, Clone)]
pub enum Satisfaction {
    Proved(Proof),
    NotShown { exhausted: Exhausted, budget: Budget },
}

/// Try to prove the goal from the base extended with the plan's happens
/// facts.
pub fn satisfies(
    plan: &Plan,
    gamma: &KnowledgeBase,
    goal: &Formula,
    budget: &Budget,
) -> Result<Satisfaction, PlanError> {
    plan.well_formed()?;
    let extension = plan.happens_facts(gamma)?;
    let extended = gamma.extended(&extension)?;
    match prove(&extended, goal, budget)? {
        ProveOutcome::Proved(p) => Ok(Satisfaction::Proved(p)),
        ProveOutcome::NoProofWithinBudget(exhausted) => Ok(Satisfaction::NotShown {
            exhausted,
            budget: budget.clone(),
        }),
    }
}

/// Search outcome: the canonical-order-first satisfying plan with its proof,
/// or a complete nonexistence certificate for the pool and horizon.
#[derive(Debug, Clone)]
pub enum SearchResult {
    Found { plan: Plan, proof: Proof },
    Nonexistent(NonexistenceCertificate),
}

/// Canonical step ordering: agents, action types, and times in declaration
/// order.
fn step_key(kb: &KnowledgeBase, f: &CanFact) -> (usize, usize, i64) {
    let idx = |t: &Term| match t {
        Term::Const { name, .. } => kb
            .signature()
            .const_index(name)
            .unwrap_or(usize::MAX),
        _ => usize::MAX,
    };
    (idx(&f.agent), idx(&f.action), f.time)
}

/// The candidate space over a canonically sorted catalog: every subset of
/// distinct times with one step per chosen time, so the count is the product
/// of (1 + steps at t) over distinct times t, the empty plan included.
fn expected_candidates(catalog: &[CanFact]) -> u128 {
    let mut times: Vec<i64> = catalog.iter().map(|c| c.time).collect();
    times.sort_unstable();
    times.dedup();
    times
        .iter()
        .map(|t| 1 + catalog.iter().filter(|c| c.time == *t).count() as u128)
        .product()
}

/// All candidate plans in canonical order.
pub(crate) fn enumerate_plans(catalog: &[CanFact], planning_time: i64) -> Vec<Plan> {
    let mut out = Vec::new();
    let mut current: Vec<PlanStep> = Vec::new();
    // Plans of length k for k = 0, 1, ... in lexicographic order each.
    let max_len = {
        let mut times: Vec<i64> = catalog.iter().map(|c| c.time).collect();
        times.sort_unstable();
        times.dedup();
        times.len()
    };
    for len in 0..=max_len {
        extend(catalog, planning_time, len, &mut current, &mut out);
    }
    out
}

fn extend(
    catalog: &[CanFact],
    planning_time: i64,
    len: usize,
    current: &mut Vec<PlanStep>,
    out: &mut Vec<Plan>,
) {
    if current.len() == len {
        out.push(Plan {
            planning_time,
            steps: current.clone(),
        });
        return;
    }
    let last_time = current.last().map(|s| s.time).unwrap_or(planning_time);
    // Iterating the sorted catalog at every level yields lexicographic order
    // over step sequences; the time filter keeps steps strictly increasing.
    for c in catalog {
        if c.time <= last_time {
            continue;
        }
        current.push(PlanStep {
            agent: c.agent.clone(),
            action: c.action.clone(),
            time: c.time,
        });
        extend(catalog, planning_time, len, current, out);
        current.pop();
    }
}

/// Search the candidate space in canonical order.
pub fn search(problem: &PlanningProblem) -> Result<SearchResult, PlanError> {
    let kb = &problem.gamma;
    // Restrict the catalog to the pool, the horizon window, and facts
    // actually provable from the base; the candidate space is defined over
    // exactly these.
    let window_lo = problem.planning_time;
    let window_hi = problem.planning_time + problem.horizon;
    let mut catalog: Vec<CanFact> = Vec::new();
    for fact in &problem.catalog {
        if fact.time <= window_lo || fact.time > window_hi {
            continue;
        }
        if !problem.pool.contains(&fact.agent) {
            continue;
        }
        let atom = fact.atom(kb)?;
        if prove(kb, &atom, &problem.budgets.consistency)?.is_proved() {
            catalog.push(fact.clone());
        }
    }
    catalog.sort_by_key(|f| step_key(kb, f));
    catalog.dedup();

    let expected = expected_candidates(&catalog);
    if expected > problem.ceiling as u128 {
        return Err(PlanError::HorizonTooLarge {
            candidates: expected,
            ceiling: problem.ceiling,
        });
    }

    let mut entries = Vec::new();
    for plan in enumerate_plans(&catalog, problem.planning_time) {
        match is_consistent_plan(&plan, kb, &problem.budgets)? {
            PlanCheck::No(PlanViolation::Inconsistent(proof)) => {
                entries.push((plan, FailureReason::Inconsistent { refutation: proof }));
                continue;
            }
            PlanCheck::No(PlanViolation::MissingCan(step)) => {
                // The catalog was restricted to provable facts above.
                return Err(PlanError::Malformed(format!(
                    "catalog fact became unprovable: {}",
                    step.render()
                )));
            }
            PlanCheck::Yes => {}
        }
        match satisfies(&plan, kb, &problem.goal, &problem.budgets.satisfaction)? {
            Satisfaction::Proved(proof) => {
                debug_assert!(check(&proof, &kb.extended(&plan.happens_facts(kb)?)?).is_ok());
                return Ok(SearchResult::Found { plan, proof });
            }
            Satisfaction::NotShown { exhausted, budget } => {
                entries.push((plan, FailureReason::GoalNotEntailed { exhausted, budget }));
            }
        }
    }

    assert_eq!(
        entries.len() as u128,
        expected,
        "certificate enumeration must cover the combinatorial candidate count"
    );
    Ok(SearchResult::Nonexistent(NonexistenceCertificate::new(
        problem, catalog, entries,
    )))
}

/// Extract the ground capability facts present in a knowledge base.
pub fn catalog_from_kb(kb: &KnowledgeBase) -> Vec<CanFact> {
    let mut out = Vec::new();
    for f in kb.formulas() {
        if let Formula::Atom(Term::App { func, args, .. }) = f {
            if func == "can" && args.iter().all(Term::is_ground) {
                if let Some(time) = args[2].moment_value() {
                    out.push(CanFact {
                        agent: args[0].clone(),
                        action: args[1].clone(),
                        time,
                    });
                }
            }
        }
    }
    out
}

#[allow(unused_imports)]
pub(crate) use certificate::entries_render;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{parse_formula, KnowledgeBase, Provenance, Signature};

    fn sig() -> Signature {
        let mut sig = Signature::new();
        sig.declare_const("ag1", "Agent").unwrap();
        sig.declare_const("ag2", "Agent").unwrap();
        sig.declare_const("act1", "ActionType").unwrap();
        sig.declare_const("act2", "ActionType").unwrap();
        sig.declare_const("goal-state", "Boolean").unwrap();
        sig
    }

    fn kb(sig: &Signature, formulas: &[&str]) -> KnowledgeBase {
        let mut kb = KnowledgeBase::new(sig.clone());
        for ax in crate::eventcalc::axioms() {
            kb.insert(ax, Provenance::Axiom).unwrap();
        }
        for p in crate::eventcalc::prior_facts(sig, &[0, 1, 2, 3, 4]) {
            kb.insert(p, Provenance::Axiom).unwrap();
        }
        for f in formulas {
            kb.insert(parse_formula(f, sig).unwrap(), Provenance::Axiom)
                .unwrap();
        }
        kb
    }

    fn step(sig: &Signature, agent: &str, action: &str, time: i64) -> PlanStep {
        PlanStep {
            agent: sig.constant(agent).unwrap(),
            action: sig.constant(action).unwrap(),
            time,
        }
    }

    #[test]
    fn consistent_plan_with_capability() {
        let sig = sig();
        let kb = kb(&sig, &["(can ag1 act1 1)"]);
        let plan = Plan {
            planning_time: 0,
            steps: vec![step(&sig, "ag1", "act1", 1)],
        };
        assert!(is_consistent_plan(&plan, &kb, &Budgets::default())
            .unwrap()
            .is_yes());
    }

    #[test]
    fn missing_capability_detected() {
        let sig = sig();
        let kb = kb(&sig, &[]);
        let plan = Plan {
            planning_time: 0,
            steps: vec![step(&sig, "ag1", "act1", 1)],
        };
        match is_consistent_plan(&plan, &kb, &Budgets::default()).unwrap() {
            PlanCheck::No(PlanViolation::MissingCan(s)) => assert_eq!(s.time, 1),
            other => panic!("expected MissingCan, got {other:?}"),
        }
    }

    #[test]
    fn prohibited_step_yields_refutation() {
        let sig = sig();
        let kb = kb(
            &sig,
            &[
                "(can ag1 act1 1)",
                "(forall (t Moment) (not (happens (action ag1 act1) t)))",
            ],
        );
        let plan = Plan {
            planning_time: 0,
            steps: vec![step(&sig, "ag1", "act1", 1)],
        };
        match is_consistent_plan(&plan, &kb, &Budgets::default()).unwrap() {
            PlanCheck::No(PlanViolation::Inconsistent(proof)) => {
                let extended = kb.extended(&plan.happens_facts(&kb).unwrap()).unwrap();
                check(&proof, &extended).unwrap();
            }
            other => panic!("expected refutation, got {other:?}"),
        }
    }

    #[test]
    fn empty_plan_satisfies_entailed_goal_by_reiteration() {
        let sig = sig();
        let kb = kb(&sig, &["goal-state"]);
        let goal = parse_formula("goal-state", &sig).unwrap();
        let plan = Plan::empty(0);
        match satisfies(&plan, &kb, &goal, &Budget::default()).unwrap() {
            Satisfaction::Proved(p) => {
                assert_eq!(p.rule, crate::prover::RuleId::Reiteration);
            }
            other => panic!("expected proof, got {other:?}"),
        }
    }

    #[test]
    fn search_finds_single_step_plan() {
        let sig = sig();
        let kb = kb(
            &sig,
            &[
                "(can ag1 act1 1)",
                "(can ag1 act1 2)",
                "(forall (t Moment) (implies (happens (action ag1 act1) t) goal-state))",
            ],
        );
        let problem = PlanningProblem {
            gamma: kb,
            planner: sig.constant("ag1").unwrap(),
            goal: parse_formula("goal-state", &sig).unwrap(),
            planning_time: 0,
            horizon: 3,
            pool: vec![sig.constant("ag1").unwrap()],
            catalog: vec![
                CanFact {
                    agent: sig.constant("ag1").unwrap(),
                    action: sig.constant("act1").unwrap(),
                    time: 1,
                },
                CanFact {
                    agent: sig.constant("ag1").unwrap(),
                    action: sig.constant("act1").unwrap(),
                    time: 2,
                },
            ],
            budgets: Budgets::default(),
            ceiling: 10_000,
        };
        match search(&problem).unwrap() {
            SearchResult::Found { plan, .. } => {
                assert_eq!(plan.steps.len(), 1);
                assert_eq!(plan.steps[0].time, 1, "canonical order prefers time 1");
            }
            other => panic!("expected plan, got {other:?}"),
        }
    }

    #[test]
    fn search_produces_complete_certificate() {
        let sig = sig();
        let kb = kb(
            &sig,
            &["(can ag1 act1 1)", "(can ag1 act2 1)", "(can ag1 act1 2)"],
        );
        let catalog = catalog_from_kb(&kb);
        let problem = PlanningProblem {
            gamma: kb,
            planner: sig.constant("ag1").unwrap(),
            goal: parse_formula("goal-state", &sig).unwrap(),
            planning_time: 0,
            horizon: 3,
            pool: vec![sig.constant("ag1").unwrap()],
            catalog,
            budgets: Budgets::default(),
            ceiling: 10_000,
        };
        match search(&problem).unwrap() {
            SearchResult::Nonexistent(cert) => {
                // Times {1: 2 steps, 2: 1 step}: (1+2)*(1+1) = 6 candidates.
                assert_eq!(cert.candidate_count(), 6);
                verify_certificate(&write_certificate(&cert), &problem.gamma).unwrap();
            }
            other => panic!("expected certificate, got {other:?}"),
        }
    }

    #[test]
    fn horizon_ceiling_enforced() {
        let sig = sig();
        let mut formulas = Vec::new();
        for t in 1..=4 {
            formulas.push(format!("(can ag1 act1 {t})"));
            formulas.push(format!("(can ag1 act2 {t})"));
            formulas.push(format!("(can ag2 act1 {t})"));
        }
        let texts: Vec<&str> = formulas.iter().map(String::as_str).collect();
        let kb = kb(&sig, &texts);
        let problem = PlanningProblem {
            planner: sig.constant("ag1").unwrap(),
            goal: parse_formula("goal-state", &sig).unwrap(),
            planning_time: 0,
            horizon: 4,
            pool: vec![sig.constant("ag1").unwrap(), sig.constant("ag2").unwrap()],
            catalog: catalog_from_kb(&kb),
            gamma: kb,
            budgets: Budgets::default(),
            ceiling: 100,
        };
        match search(&problem) {
            Err(PlanError::HorizonTooLarge { candidates, .. }) => {
                assert_eq!(candidates, 256, "(1+3)^4 candidates");
            }
            other => panic!("expected HorizonTooLarge, got {other:?}"),
        }
    }

    #[test]
    fn enumeration_is_length_then_lex() {
        let sig = sig();
        let catalog = vec![
            CanFact {
                agent: sig.constant("ag1").unwrap(),
                action: sig.constant("act1").unwrap(),
                time: 1,
            },
            CanFact {
                agent: sig.constant("ag1").unwrap(),
                action: sig.constant("act1").unwrap(),
                time: 2,
            },
            CanFact {
                agent: sig.constant("ag2").unwrap(),
                action: sig.constant("act1").unwrap(),
                time: 1,
            },
        ];
        let plans = enumerate_plans(&catalog, 0);
        let rendered: Vec<String> = plans.iter().map(Plan::render).collect();
        assert_eq!(
            rendered,
            vec![
                "[]",
                "[(ag1 act1 1)]",
                "[(ag1 act1 2)]",
                "[(ag2 act1 1)]",
                "[(ag1 act1 1) (ag1 act1 2)]",
                "[(ag2 act1 1) (ag1 act1 2)]",
            ]
        );
    }
}
