//! Nonexistence certificates: exhaustive-enumeration evidence that no plan
//! over a declared pool and horizon achieves a goal.
//!
//! The serialized form is line-delimited: a header carrying the goal, pool,
//! horizon, capability catalog (with hash), budgets, and counts, then one
//! record per candidate with its failure reason. `verify_certificate`
//! re-derives the candidate space from the knowledge base, checks the
//! combinatorial count, re-checks every refutation with the independent proof
//! checker, and deterministically re-runs the failed entailments.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::kernel::{parse_formula, pretty, pretty_term, Formula, KnowledgeBase, Term};
use crate::prover::{check, prove, read_proof, write_proof, Budget, Exhausted, Proof};

use super::{
    enumerate_plans, expected_candidates, step_key, Budgets, CanFact, Plan, PlanStep,
    PlanningProblem,
};

/// Why one candidate plan fails.
#[derive(Debug, Clone)]
pub enum FailureReason {
    Inconsistent { refutation: Proof },
    GoalNotEntailed { exhausted: Exhausted, budget: Budget },
}

/// Exhaustive evidence that no candidate plan achieves the goal.
#[derive(Debug, Clone)]
pub struct NonexistenceCertificate {
    pub goal: Formula,
    pub planner: Term,
    pub pool: Vec<Term>,
    pub planning_time: i64,
    pub horizon: i64,
    pub catalog: Vec<CanFact>,
    pub budgets: Budgets,
    pub entries: Vec<(Plan, FailureReason)>,
}

impl NonexistenceCertificate {
    pub(crate) fn new(
        problem: &PlanningProblem,
        catalog: Vec<CanFact>,
        entries: Vec<(Plan, FailureReason)>,
    ) -> NonexistenceCertificate {
        NonexistenceCertificate {
            goal: problem.goal.clone(),
            planner: problem.planner.clone(),
            pool: problem.pool.clone(),
            planning_time: problem.planning_time,
            horizon: problem.horizon,
            catalog,
            budgets: problem.budgets.clone(),
            entries,
        }
    }

    pub fn candidate_count(&self) -> usize {
        self.entries.len()
    }

    pub fn catalog_hash(&self) -> String {
        catalog_hash(&self.catalog)
    }
}

pub(crate) fn catalog_hash(catalog: &[CanFact]) -> String {
    let mut hasher = Sha256::new();
    for fact in catalog {
        hasher.update(fact.render().as_bytes());
        hasher.update(b"\n");
    }
    format!("sha256:{}", hex_string(&hasher.finalize()))
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize, Deserialize)]
struct Header {
    artifact: String,
    version: u32,
    goal: String,
    planner: String,
    pool: Vec<String>,
    planning_time: i64,
    horizon: i64,
    catalog: Vec<String>,
    catalog_hash: String,
    budgets: Budgets,
    expected_count: String,
    candidate_count: u64,
}

#[derive(Serialize, Deserialize)]
struct EntryRecord {
    plan: Vec<(String, String, i64)>,
    reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    exhausted: Option<Exhausted>,
    #[serde(skip_serializing_if = "Option::is_none")]
    budget: Option<Budget>,
    #[serde(skip_serializing_if = "Option::is_none")]
    refutation: Option<String>,
}

pub fn write_certificate(cert: &NonexistenceCertificate) -> String {
    let header = Header {
        artifact: "nonexistence-certificate".into(),
        version: 1,
        goal: pretty(&cert.goal),
        planner: pretty_term(&cert.planner),
        pool: cert.pool.iter().map(pretty_term).collect(),
        planning_time: cert.planning_time,
        horizon: cert.horizon,
        catalog: cert.catalog.iter().map(CanFact::render).collect(),
        catalog_hash: cert.catalog_hash(),
        budgets: cert.budgets.clone(),
        expected_count: expected_candidates(&cert.catalog).to_string(),
        candidate_count: cert.entries.len() as u64,
    };
    let mut lines = vec![serde_json::to_string(&header).expect("header serializes")];
    for (plan, reason) in &cert.entries {
        let record = match reason {
            FailureReason::Inconsistent { refutation } => EntryRecord {
                plan: plan_triples(plan),
                reason: "inconsistent".into(),
                exhausted: None,
                budget: None,
                refutation: Some(write_proof(refutation)),
            },
            FailureReason::GoalNotEntailed { exhausted, budget } => EntryRecord {
                plan: plan_triples(plan),
                reason: "goal-not-entailed".into(),
                exhausted: Some(*exhausted),
                budget: Some(budget.clone()),
                refutation: None,
            },
        };
        lines.push(serde_json::to_string(&record).expect("entry serializes"));
    }
    lines.join("\n") + "\n"
}

fn plan_triples(plan: &Plan) -> Vec<(String, String, i64)> {
    plan.steps
        .iter()
        .map(|s| (pretty_term(&s.agent), pretty_term(&s.action), s.time))
        .collect()
}

pub(crate) fn entries_render(cert: &NonexistenceCertificate) -> Vec<String> {
    cert.entries.iter().map(|(p, _)| p.render()).collect()
}

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("certificate verification failed: {0}")]
    Verify(String),
    #[error(transparent)]
    Kernel(#[from] crate::kernel::KernelError),
}

fn malformed(msg: impl Into<String>) -> CertificateError {
    CertificateError::Malformed(msg.into())
}

fn refused(msg: impl Into<String>) -> CertificateError {
    CertificateError::Verify(msg.into())
}

/// Read a certificate against a knowledge base's signature.
pub fn read_certificate(
    text: &str,
    kb: &KnowledgeBase,
) -> Result<NonexistenceCertificate, CertificateError> {
    let sig = kb.signature();
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Header = serde_json::from_str(
        lines
            .next()
            .ok_or_else(|| malformed("empty certificate"))?,
    )
    .map_err(|e| malformed(format!("bad header: {e}")))?;
    if header.artifact != "nonexistence-certificate" || header.version != 1 {
        return Err(malformed("not a version-1 nonexistence certificate"));
    }
    let goal = parse_formula(&header.goal, sig)?;
    let planner = sig
        .constant(&header.planner)
        .ok_or_else(|| malformed(format!("unknown planner agent `{}`", header.planner)))?;
    let pool = header
        .pool
        .iter()
        .map(|name| {
            sig.constant(name)
                .ok_or_else(|| malformed(format!("unknown pool agent `{name}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut catalog = Vec::new();
    for line in &header.catalog {
        let f = parse_formula(line, sig)?;
        let Formula::Atom(Term::App { func, args, .. }) = &f else {
            return Err(malformed(format!("catalog line is not a can fact: {line}")));
        };
        if func != "can" {
            return Err(malformed(format!("catalog line is not a can fact: {line}")));
        }
        let time = args[2]
            .moment_value()
            .ok_or_else(|| malformed("catalog time must be an integer moment"))?;
        catalog.push(CanFact {
            agent: args[0].clone(),
            action: args[1].clone(),
            time,
        });
    }
    if catalog_hash(&catalog) != header.catalog_hash {
        return Err(refused("catalog hash mismatch"));
    }

    let mut entries = Vec::new();
    for line in lines {
        let record: EntryRecord =
            serde_json::from_str(line).map_err(|e| malformed(format!("bad entry: {e}")))?;
        let steps = record
            .plan
            .iter()
            .map(|(agent, action, time)| {
                Ok(PlanStep {
                    agent: sig
                        .constant(agent)
                        .ok_or_else(|| malformed(format!("unknown agent `{agent}`")))?,
                    action: sig
                        .constant(action)
                        .ok_or_else(|| malformed(format!("unknown action `{action}`")))?,
                    time: *time,
                })
            })
            .collect::<Result<Vec<_>, CertificateError>>()?;
        let plan = Plan {
            planning_time: header.planning_time,
            steps,
        };
        let reason = match record.reason.as_str() {
            "inconsistent" => {
                let doc = record
                    .refutation
                    .ok_or_else(|| malformed("inconsistent entry without refutation"))?;
                let (_, proof) = read_proof(&doc, sig)
                    .map_err(|e| malformed(format!("bad refutation: {e}")))?;
                FailureReason::Inconsistent { refutation: proof }
            }
            "goal-not-entailed" => FailureReason::GoalNotEntailed {
                exhausted: record
                    .exhausted
                    .ok_or_else(|| malformed("entry without exhausted dimension"))?,
                budget: record
                    .budget
                    .ok_or_else(|| malformed("entry without budget record"))?,
            },
            other => return Err(malformed(format!("unknown failure reason `{other}`"))),
        };
        entries.push((plan, reason));
    }
    if entries.len() as u64 != header.candidate_count {
        return Err(refused("candidate count does not match entry count"));
    }
    Ok(NonexistenceCertificate {
        goal,
        planner,
        pool,
        planning_time: header.planning_time,
        horizon: header.horizon,
        catalog,
        budgets: header.budgets,
        entries,
    })
}

/// Full verification of a serialized certificate against a knowledge base.
pub fn verify_certificate(text: &str, kb: &KnowledgeBase) -> Result<(), CertificateError> {
    let cert = read_certificate(text, kb)?;

    // Catalog facts must be provable, and the base must not hold additional
    // capability facts inside the window for the pool.
    for fact in &cert.catalog {
        let atom = fact.atom(kb)?;
        if !prove(kb, &atom, &cert.budgets.consistency)
            .map_err(CertificateError::Kernel)?
            .is_proved()
        {
            return Err(refused(format!("catalog fact not provable: {}", fact.render())));
        }
    }
    for fact in super::catalog_from_kb(kb) {
        let in_window = fact.time > cert.planning_time
            && fact.time <= cert.planning_time + cert.horizon;
        if in_window && cert.pool.contains(&fact.agent) && !cert.catalog.contains(&fact) {
            return Err(refused(format!(
                "capability fact missing from catalog: {}",
                fact.render()
            )));
        }
    }

    // The enumeration must cover the combinatorial candidate space in
    // canonical order.
    let expected = expected_candidates(&cert.catalog);
    if cert.entries.len() as u128 != expected {
        return Err(refused(format!(
            "entry count {} does not equal the combinatorial count {expected}",
            cert.entries.len()
        )));
    }
    let mut sorted = cert.catalog.clone();
    sorted.sort_by_key(|f| step_key(kb, f));
    let canonical = enumerate_plans(&sorted, cert.planning_time);
    if canonical.len() != cert.entries.len() {
        return Err(refused("enumeration length mismatch"));
    }
    for (expected_plan, (stated_plan, _)) in canonical.iter().zip(&cert.entries) {
        if expected_plan != stated_plan {
            return Err(refused(format!(
                "candidate order mismatch: expected {}, found {}",
                expected_plan.render(),
                stated_plan.render()
            )));
        }
    }

    // Per-candidate evidence.
    for (plan, reason) in &cert.entries {
        let extension = plan.happens_facts(kb)?;
        let extended = kb.extended(&extension)?;
        match reason {
            FailureReason::Inconsistent { refutation } => {
                if !refutation.conclusion.is_falsum() {
                    return Err(refused("refutation does not conclude falsum"));
                }
                check(refutation, &extended).map_err(|r| {
                    refused(format!("refutation for {} rejected: {r}", plan.render()))
                })?;
            }
            FailureReason::GoalNotEntailed { budget, .. } => {
                let outcome =
                    prove(&extended, &cert.goal, budget).map_err(CertificateError::Kernel)?;
                if outcome.is_proved() {
                    return Err(refused(format!(
                        "entailment re-run found a proof for candidate {}",
                        plan.render()
                    )));
                }
            }
        }
    }
    Ok(())
}
