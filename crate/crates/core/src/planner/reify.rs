//! Plan reification: plans as first-class terms of the language, so they can
//! appear inside declarations and be reasoned over.

use crate::kernel::{pretty_term, Formula, Signature, Term};

use super::{Plan, PlanError, PlanStep};

/// Build the Plan-sorted term for a plan: `(plan-at t0 steps)` where `steps`
/// is a `plan-step` chain ending in `plan-empty`.
pub fn reify(plan: &Plan, sig: &Signature) -> Term {
    let mut chain = sig.constant("plan-empty").expect("built-in");
    for step in plan.steps.iter().rev() {
        chain = sig
            .app(
                "plan-step",
                vec![
                    step.agent.clone(),
                    step.action.clone(),
                    sig.moment(step.time),
                    chain,
                ],
            )
            .expect("plan-step profile");
    }
    sig.app("plan-at", vec![sig.moment(plan.planning_time), chain])
        .expect("plan-at profile")
}

/// Recover a plan from its reified term.
pub fn interpret(term: &Term) -> Result<Plan, PlanError> {
    let bad = |t: &Term| PlanError::MalformedPlanTerm(pretty_term(t));
    let Term::App { func, args, .. } = term else {
        return Err(bad(term));
    };
    if func != "plan-at" || args.len() != 2 {
        return Err(bad(term));
    }
    let planning_time = args[0].moment_value().ok_or_else(|| bad(&args[0]))?;
    let mut steps = Vec::new();
    let mut cursor = &args[1];
    loop {
        match cursor {
            Term::Const { name, .. } if name == "plan-empty" => break,
            Term::App { func, args, .. } if func == "plan-step" && args.len() == 4 => {
                let time = args[2].moment_value().ok_or_else(|| bad(&args[2]))?;
                steps.push(PlanStep {
                    agent: args[0].clone(),
                    action: args[1].clone(),
                    time,
                });
                cursor = &args[3];
            }
            other => return Err(bad(other)),
        }
    }
    Ok(Plan {
        planning_time,
        steps,
    })
}

/// The cons-list term over Agent used by the variable-arity `plan` predicate.
pub fn agent_list_term(agents: &[Term], sig: &Signature) -> Term {
    let mut list = sig.constant("nil").expect("built-in");
    for a in agents.iter().rev() {
        list = sig.app("cons", vec![a.clone(), list]).expect("cons profile");
    }
    list
}

/// The atom `plan(rho, agents)` over a reified plan.
pub fn plan_atom(plan_term: Term, agents: &[Term], sig: &Signature) -> Formula {
    Formula::Atom(
        sig.app("plan", vec![plan_term, agent_list_term(agents, sig)])
            .expect("plan profile"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{parse_formula, pretty, Signature};

    fn sig() -> Signature {
        let mut sig = Signature::new();
        sig.declare_const("ag1", "Agent").unwrap();
        sig.declare_const("ag2", "Agent").unwrap();
        sig.declare_const("act1", "ActionType").unwrap();
        sig
    }

    #[test]
    fn round_trip_plan() {
        let sig = sig();
        let plan = Plan {
            planning_time: 0,
            steps: vec![
                PlanStep {
                    agent: sig.constant("ag1").unwrap(),
                    action: sig.constant("act1").unwrap(),
                    time: 1,
                },
                PlanStep {
                    agent: sig.constant("ag2").unwrap(),
                    action: sig.constant("act1").unwrap(),
                    time: 2,
                },
            ],
        };
        let term = reify(&plan, &sig);
        assert_eq!(term.sort(), "Plan");
        assert_eq!(interpret(&term).unwrap(), plan);
    }

    #[test]
    fn round_trip_empty_plan() {
        let sig = sig();
        let plan = Plan::empty(3);
        assert_eq!(interpret(&reify(&plan, &sig)).unwrap(), plan);
    }

    #[test]
    fn malformed_plan_term_rejected() {
        let sig = sig();
        // A Plan-sorted term that is not plan-at at the root.
        let bare = sig.constant("plan-empty").unwrap();
        assert!(matches!(
            interpret(&bare),
            Err(PlanError::MalformedPlanTerm(_))
        ));
        // Nested plan-at inside the chain.
        let nested = sig
            .app(
                "plan-at",
                vec![
                    sig.moment(0),
                    sig.app("plan-at", vec![sig.moment(1), sig.constant("plan-empty").unwrap()])
                        .unwrap(),
                ],
            )
            .unwrap();
        assert!(matches!(
            interpret(&nested),
            Err(PlanError::MalformedPlanTerm(_))
        ));
    }

    #[test]
    fn reified_plan_embeds_in_declarations() {
        let mut sig = sig();
        sig.declare_const("goal-state", "Boolean").unwrap();
        let plan = Plan {
            planning_time: 0,
            steps: vec![PlanStep {
                agent: sig.constant("ag1").unwrap(),
                action: sig.constant("act1").unwrap(),
                time: 1,
            }],
        };
        let rho = reify(&plan, &sig);
        let atom = plan_atom(rho.clone(), &plan.agents(), &sig);
        let says = crate::kernel::Formula::Says {
            agent: sig.constant("ag1").unwrap(),
            time: sig.moment(2),
            body: Box::new(crate::kernel::Formula::And(vec![
                atom,
                crate::kernel::Formula::implies(
                    crate::kernel::Formula::Atom(sig.app("executed", vec![rho]).unwrap()),
                    parse_formula("goal-state", &sig).unwrap(),
                ),
            ])),
        };
        says.sort_check(&sig).unwrap();
        // The printed declaration parses back.
        let text = pretty(&says);
        let back = parse_formula(&text, &sig).unwrap();
        assert_eq!(back, says);
    }
}
