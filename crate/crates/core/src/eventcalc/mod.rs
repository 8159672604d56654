//! The event-calculus theory and a closed-world projection evaluator.
//!
//! `axioms` returns the shipped first-order axiom set. `project` evaluates
//! `holds(f, t)` directly over a ground narrative under the closed-world
//! assumption, serving as a fast path and as an oracle for the prover: on
//! positive queries it agrees with derivability of `holds(f, t)` from
//! `axioms() + narrative_formulas(...)`.
//!
//! The derivational side is open-world, so `narrative_formulas` compiles the
//! narrative's closure explicitly: besides the ground facts it emits the
//! `(not (clipped t1 f t2))` literals that hold under the closed-world
//! reading, plus `holds(f, tmin)` for each `initially` fluent, anchored at
//! the least moment of the narrative.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::kernel::{parse_formula, read_sexps, Formula, Signature, Term};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EventCalcError {
    #[error("moment `{0}` is not comparable with the narrative's moments")]
    UnorderedMoment(String),
    #[error("narrative fact is not ground or badly sorted: {0}")]
    BadFact(String),
}

/// The shipped axiom formulas, identical across calls.
pub fn axioms() -> Vec<Formula> {
    let sig = Signature::new();
    axiom_sexps()
        .iter()
        .map(|text| parse_formula(text, &sig).expect("shipped axioms parse"))
        .collect()
}

/// The axiom source texts, one per axiom.
pub fn axiom_sexps() -> Vec<String> {
    let src = include_str!("axioms.sexp");
    read_sexps(src)
        .expect("shipped axiom file reads")
        .iter()
        .map(render_sexp)
        .collect()
}

fn render_sexp(s: &crate::kernel::Sexp) -> String {
    match s {
        crate::kernel::Sexp::Sym(sym, _) => sym.clone(),
        crate::kernel::Sexp::List(items, _) => {
            let inner: Vec<String> = items.iter().map(render_sexp).collect();
            format!("({})", inner.join(" "))
        }
    }
}

/// A ground record of what happens: event occurrences, effect facts, and
/// initially-true fluents. Moments are integer literals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Narrative {
    pub happens: Vec<(Term, i64)>,
    pub initiates: Vec<(Term, Term, i64)>,
    pub terminates: Vec<(Term, Term, i64)>,
    pub initially: Vec<Term>,
}

impl Narrative {
    /// Every moment mentioned by a fact.
    pub fn moments(&self) -> BTreeSet<i64> {
        let mut out = BTreeSet::new();
        out.extend(self.happens.iter().map(|(_, t)| *t));
        out.extend(self.initiates.iter().map(|(_, _, t)| *t));
        out.extend(self.terminates.iter().map(|(_, _, t)| *t));
        out
    }

    /// Every fluent mentioned by a fact, first-seen order.
    pub fn fluents(&self) -> Vec<Term> {
        let mut out: Vec<Term> = Vec::new();
        let mut push = |f: &Term| {
            if !out.contains(f) {
                out.push(f.clone());
            }
        };
        for (_, f, _) in &self.initiates {
            push(f);
        }
        for (_, f, _) in &self.terminates {
            push(f);
        }
        for f in &self.initially {
            push(f);
        }
        out
    }

    /// The least moment of the narrative; `initially` fluents hold there.
    pub fn least_moment(&self) -> i64 {
        self.moments().first().copied().unwrap_or(0).min(0)
    }

    fn validate(&self, sig: &Signature) -> Result<(), EventCalcError> {
        let check = |t: &Term, sort: &str| -> Result<(), EventCalcError> {
            if !t.is_ground() || !sig.is_subsort(t.sort(), sort) {
                return Err(EventCalcError::BadFact(crate::kernel::pretty_term(t)));
            }
            Ok(())
        };
        for (e, _) in &self.happens {
            check(e, "Event")?;
        }
        for (e, f, _) in self.initiates.iter().chain(&self.terminates) {
            check(e, "Event")?;
            check(f, "Fluent")?;
        }
        for f in &self.initially {
            check(f, "Fluent")?;
        }
        Ok(())
    }

    /// Is some terminating occurrence of `fluent` in the window `[from, to)`?
    fn clipped_between(&self, fluent: &Term, from: i64, to: i64) -> bool {
        self.terminates.iter().any(|(e, f, u)| {
            f == fluent
                && *u >= from
                && *u < to
                && self.happens.iter().any(|(he, ht)| he == e && ht == u)
        })
    }

    /// Compile the narrative for the prover: ground facts plus the
    /// closed-world completion of `clipped` over `universe`, plus the
    /// `initially` anchor facts.
    pub fn to_formulas(
        &self,
        sig: &Signature,
        universe: &[i64],
    ) -> Result<Vec<Formula>, EventCalcError> {
        self.validate(sig)?;
        let mut out = Vec::new();
        let atom = |t: Term| Formula::Atom(t);
        for (e, t) in &self.happens {
            out.push(atom(
                sig.app("happens", vec![e.clone(), sig.moment(*t)])
                    .expect("validated"),
            ));
        }
        for (name, facts) in [("initiates", &self.initiates), ("terminates", &self.terminates)] {
            for (e, f, t) in facts {
                out.push(atom(
                    sig.app(name, vec![e.clone(), f.clone(), sig.moment(*t)])
                        .expect("validated"),
                ));
            }
        }
        let tmin = self.least_moment();
        for f in &self.initially {
            out.push(atom(
                sig.app("initially", vec![f.clone()]).expect("validated"),
            ));
            out.push(atom(
                sig.app("holds", vec![f.clone(), sig.moment(tmin)])
                    .expect("validated"),
            ));
        }
        let mut moments: BTreeSet<i64> = universe.iter().copied().collect();
        moments.extend(self.moments());
        moments.insert(tmin);
        for f in self.fluents() {
            for &t1 in &moments {
                for &t2 in &moments {
                    if t1 < t2 && !self.clipped_between(&f, t1, t2) {
                        out.push(Formula::not(atom(
                            sig.app(
                                "clipped",
                                vec![sig.moment(t1), f.clone(), sig.moment(t2)],
                            )
                            .expect("validated"),
                        )));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Ground `prior` facts for a strictly increasing run of moments.
pub fn prior_facts(sig: &Signature, moments: &[i64]) -> Vec<Formula> {
    let set: BTreeSet<i64> = moments.iter().copied().collect();
    let mut out = Vec::new();
    for &a in &set {
        for &b in &set {
            if a < b {
                out.push(Formula::Atom(
                    sig.app("prior", vec![sig.moment(a), sig.moment(b)])
                        .expect("prior profile"),
                ));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    Holds,
    NotHolds,
}

/// Closed-world evaluation of `holds(fluent, at)` over the narrative.
pub fn project(n: &Narrative, fluent: &Term, at: &Term) -> Result<Projection, EventCalcError> {
    let t = at
        .moment_value()
        .ok_or_else(|| EventCalcError::UnorderedMoment(crate::kernel::pretty_term(at)))?;
    let tmin = n.least_moment();
    if n.initially.contains(fluent) && t >= tmin && !n.clipped_between(fluent, tmin, t) {
        return Ok(Projection::Holds);
    }
    for (e, f, u) in &n.initiates {
        if f == fluent
            && *u < t
            && n.happens.iter().any(|(he, ht)| he == e && ht == u)
            && !n.clipped_between(fluent, *u, t)
        {
            return Ok(Projection::Holds);
        }
    }
    Ok(Projection::NotHolds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{pretty, KnowledgeBase, Provenance};
    use crate::prover::{check, prove, Budget, ProveOutcome};

    fn sig() -> Signature {
        let mut sig = Signature::new();
        sig.declare_const("e", "Event").unwrap();
        sig.declare_const("e2", "Event").unwrap();
        sig.declare_const("g", "Fluent").unwrap();
        sig
    }

    fn ec_kb(sig: &Signature, n: &Narrative, universe: &[i64]) -> KnowledgeBase {
        let mut kb = KnowledgeBase::new(sig.clone());
        for ax in axioms() {
            kb.insert(ax, Provenance::Axiom).unwrap();
        }
        for p in prior_facts(sig, universe) {
            kb.insert(p, Provenance::Axiom).unwrap();
        }
        for f in n.to_formulas(sig, universe).unwrap() {
            kb.insert(f, Provenance::Derived).unwrap();
        }
        kb
    }

    #[test]
    fn axioms_sort_check_and_include_capability() {
        let sig = Signature::new();
        let axs = axioms();
        for ax in &axs {
            ax.sort_check(&sig).unwrap();
            assert!(ax.is_closed());
        }
        assert_eq!(axs, axioms());
        assert!(axs.iter().any(|ax| pretty(ax).contains("(can a x t)")));
    }

    #[test]
    fn initiation_then_holds() {
        let sig = sig();
        let e = sig.constant("e").unwrap();
        let g = sig.constant("g").unwrap();
        let n = Narrative {
            happens: vec![(e.clone(), 1)],
            initiates: vec![(e.clone(), g.clone(), 1)],
            ..Default::default()
        };
        assert_eq!(project(&n, &g, &sig.moment(2)).unwrap(), Projection::Holds);
        assert_eq!(
            project(&n, &g, &sig.moment(1)).unwrap(),
            Projection::NotHolds
        );

        // The prover agrees.
        let kb = ec_kb(&sig, &n, &[0, 1, 2]);
        let goal = crate::kernel::parse_formula("(holds g 2)", &sig).unwrap();
        match prove(&kb, &goal, &Budget::default()).unwrap() {
            ProveOutcome::Proved(p) => check(&p, &kb).unwrap(),
            other => panic!("expected proof, got {other:?}"),
        }
    }

    #[test]
    fn empty_narrative_never_holds() {
        let sig = sig();
        let g = sig.constant("g").unwrap();
        let n = Narrative::default();
        for t in 0..4 {
            assert_eq!(
                project(&n, &g, &sig.moment(t)).unwrap(),
                Projection::NotHolds
            );
        }
    }

    #[test]
    fn initiate_then_terminate_window() {
        let sig = sig();
        let e = sig.constant("e").unwrap();
        let e2 = sig.constant("e2").unwrap();
        let g = sig.constant("g").unwrap();
        let n = Narrative {
            happens: vec![(e.clone(), 1), (e2.clone(), 3)],
            initiates: vec![(e.clone(), g.clone(), 1)],
            terminates: vec![(e2.clone(), g.clone(), 3)],
            ..Default::default()
        };
        assert_eq!(project(&n, &g, &sig.moment(2)).unwrap(), Projection::Holds);
        assert_eq!(
            project(&n, &g, &sig.moment(4)).unwrap(),
            Projection::NotHolds
        );

        let kb = ec_kb(&sig, &n, &[0, 1, 2, 3, 4]);
        let holds2 = crate::kernel::parse_formula("(holds g 2)", &sig).unwrap();
        assert!(prove(&kb, &holds2, &Budget::default()).unwrap().is_proved());
        let holds4 = crate::kernel::parse_formula("(holds g 4)", &sig).unwrap();
        assert!(!prove(&kb, &holds4, &Budget::new(3, 200, 4000))
            .unwrap()
            .is_proved());
    }

    #[test]
    fn inertia_carries_initially_forward() {
        let sig = sig();
        let g = sig.constant("g").unwrap();
        let n = Narrative {
            initially: vec![g.clone()],
            ..Default::default()
        };
        assert_eq!(project(&n, &g, &sig.moment(0)).unwrap(), Projection::Holds);
        assert_eq!(project(&n, &g, &sig.moment(5)).unwrap(), Projection::Holds);
        assert_eq!(
            project(&n, &g, &sig.moment(-1)).unwrap(),
            Projection::NotHolds
        );
    }

    #[test]
    fn symbolic_moment_rejected() {
        let mut sig = sig();
        sig.declare_const("sometime", "Moment").unwrap();
        let g = sig.constant("g").unwrap();
        let n = Narrative::default();
        let st = sig.constant("sometime").unwrap();
        assert!(matches!(
            project(&n, &g, &st),
            Err(EventCalcError::UnorderedMoment(_))
        ));
    }
}
