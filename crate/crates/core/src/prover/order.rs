//! Decision routine for the strict order on Moments: integer literals compare
//! numerically; symbolic moments are ordered only through the transitive
//! closure of `prior` facts. Unordered pairs fail both tests.

use std::collections::{HashMap, HashSet};

use crate::kernel::{pretty_term, Formula, Term};

#[derive(Debug, Clone, Default)]
pub struct MomentOrder {
    /// Adjacency over moment keys from ground `prior(a, b)` facts.
    edges: HashMap<String, Vec<(String, Option<i64>)>>,
    /// Integer values appearing as edge endpoints or sources.
    int_nodes: Vec<(i64, String)>,
}

fn key(t: &Term) -> String {
    pretty_term(t)
}

impl MomentOrder {
    /// Collect ground `prior` atoms from the given formulas.
    pub fn from_formulas<'a>(formulas: impl Iterator<Item = &'a Formula>) -> Self {
        let mut order = MomentOrder::default();
        for f in formulas {
            order.absorb(f);
        }
        order
    }

    /// Record a `prior` fact if `f` is one.
    pub fn absorb(&mut self, f: &Formula) {
        if let Formula::Atom(Term::App { func, args, .. }) = f {
            if func == "prior" && args.len() == 2 && args[0].is_ground() && args[1].is_ground() {
                let (ka, kb) = (key(&args[0]), key(&args[1]));
                for (v, k) in [(&args[0], &ka), (&args[1], &kb)] {
                    if let Some(i) = v.moment_value() {
                        if !self.int_nodes.iter().any(|(_, n)| n == k) {
                            self.int_nodes.push((i, k.clone()));
                        }
                    }
                }
                self.edges
                    .entry(ka)
                    .or_default()
                    .push((kb, args[1].moment_value()));
            }
        }
    }

    /// Strict order: `a < b`.
    pub fn lt(&self, a: &Term, b: &Term) -> bool {
        if let (Some(x), Some(y)) = (a.moment_value(), b.moment_value()) {
            return x < y;
        }
        let target = key(b);
        let target_val = b.moment_value();
        let mut visited: HashSet<String> = HashSet::new();
        let mut frontier: Vec<(String, Option<i64>)> = vec![(key(a), a.moment_value())];
        while let Some((node, val)) = frontier.pop() {
            if !visited.insert(node.clone()) {
                continue;
            }
            if node == target {
                return true;
            }
            if let (Some(i), Some(j)) = (val, target_val) {
                if i < j {
                    return true;
                }
            }
            if let Some(next) = self.edges.get(&node) {
                for (n, v) in next {
                    frontier.push((n.clone(), *v));
                }
            }
            // An integer node also precedes every larger integer node that
            // participates in the prior graph.
            if let Some(i) = val {
                for (j, n) in &self.int_nodes {
                    if *j > i {
                        frontier.push((n.clone(), Some(*j)));
                    }
                }
            }
        }
        false
    }

    /// Reflexive order: `a <= b`.
    pub fn le(&self, a: &Term, b: &Term) -> bool {
        if a == b {
            return true;
        }
        if let (Some(x), Some(y)) = (a.moment_value(), b.moment_value()) {
            return x <= y;
        }
        self.lt(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{parse_formula, Signature};

    #[test]
    fn integer_literals_totally_ordered() {
        let sig = Signature::new();
        let order = MomentOrder::default();
        assert!(order.lt(&sig.moment(1), &sig.moment(2)));
        assert!(!order.lt(&sig.moment(2), &sig.moment(2)));
        assert!(order.le(&sig.moment(2), &sig.moment(2)));
    }

    #[test]
    fn symbolic_moments_need_prior_facts() {
        let mut sig = Signature::new();
        sig.declare_const("dawn", "Moment").unwrap();
        sig.declare_const("dusk", "Moment").unwrap();
        let dawn = sig.constant("dawn").unwrap();
        let dusk = sig.constant("dusk").unwrap();

        let empty = MomentOrder::default();
        assert!(!empty.lt(&dawn, &dusk));
        assert!(!empty.le(&dawn, &dusk));
        assert!(empty.le(&dawn, &dawn));

        let facts = [parse_formula("(prior dawn dusk)", &sig).unwrap()];
        let order = MomentOrder::from_formulas(facts.iter());
        assert!(order.lt(&dawn, &dusk));
        assert!(!order.lt(&dusk, &dawn));
    }

    #[test]
    fn mixed_chains_through_integers() {
        let mut sig = Signature::new();
        sig.declare_const("s", "Moment").unwrap();
        sig.declare_const("u", "Moment").unwrap();
        let facts = [
            parse_formula("(prior s 3)", &sig).unwrap(),
            parse_formula("(prior 4 u)", &sig).unwrap(),
        ];
        let order = MomentOrder::from_formulas(facts.iter());
        let s = sig.constant("s").unwrap();
        let u = sig.constant("u").unwrap();
        assert!(order.lt(&s, &u));
        assert!(!order.lt(&u, &s));
        assert!(order.lt(&s, &sig.moment(9)));
    }
}
