//! Proof objects and their serialized form.
//!
//! A proof is a finite tree of rule applications. The serialized form is a
//! line-delimited document with stable field order: a header line, one record
//! per node (premises referenced by id, ids assigned in postorder), and a
//! root line. This is the format `prove --emit-proof` writes and `check`
//! reads back.

use serde::{Deserialize, Serialize};

use crate::kernel::{
    parse_formula, pretty, pretty_term, read_sexps, term_from_sexp, Formula, KernelError,
    Signature, Term,
};

use super::rules::RuleId;

/// Extra obligations attached to a proof node: discharged assumptions,
/// eigenvariables, instantiation witnesses, and the time-ordering facts used
/// by the modal schemata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SideCondition {
    Discharged(Formula),
    Eigen(Term),
    Witness(Term),
    TimeLe(Term, Term),
    TimeLt(Term, Term),
}

impl SideCondition {
    pub fn render(&self) -> String {
        match self {
            SideCondition::Discharged(f) => format!("discharge {}", pretty(f)),
            SideCondition::Eigen(t) => format!("eigen {} {}", t.sort(), pretty_term(t)),
            SideCondition::Witness(t) => format!("witness {} {}", t.sort(), pretty_term(t)),
            SideCondition::TimeLe(a, b) => format!("le {} {}", pretty_term(a), pretty_term(b)),
            SideCondition::TimeLt(a, b) => format!("lt {} {}", pretty_term(a), pretty_term(b)),
        }
    }

    pub fn parse(text: &str, sig: &Signature) -> Result<SideCondition, KernelError> {
        let bad = |msg: &str| KernelError::Syntax {
            pos: crate::kernel::Position::none(),
            msg: format!("side condition `{text}`: {msg}"),
        };
        let (kind, rest) = text.split_once(' ').ok_or_else(|| bad("missing payload"))?;
        match kind {
            "discharge" => Ok(SideCondition::Discharged(parse_formula(rest, sig)?)),
            "eigen" | "witness" => {
                let (sort, term_text) = rest
                    .split_once(' ')
                    .ok_or_else(|| bad("missing sort or term"))?;
                let sexps = read_sexps(term_text)?;
                if sexps.len() != 1 {
                    return Err(bad("expected one term"));
                }
                let term = term_from_sexp(&sexps[0], sig, &Vec::new(), Some(sort))?;
                Ok(if kind == "eigen" {
                    SideCondition::Eigen(term)
                } else {
                    SideCondition::Witness(term)
                })
            }
            "le" | "lt" => {
                let sexps = read_sexps(rest)?;
                if sexps.len() != 2 {
                    return Err(bad("expected two moment terms"));
                }
                let a = term_from_sexp(&sexps[0], sig, &Vec::new(), Some("Moment"))?;
                let b = term_from_sexp(&sexps[1], sig, &Vec::new(), Some("Moment"))?;
                Ok(if kind == "le" {
                    SideCondition::TimeLe(a, b)
                } else {
                    SideCondition::TimeLt(a, b)
                })
            }
            _ => Err(bad("unknown side-condition kind")),
        }
    }
}

/// A node in a natural-deduction derivation. Leaves are `Hyp` nodes pointing
/// into the knowledge base or a live assumption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub conclusion: Formula,
    pub rule: RuleId,
    pub premises: Vec<Proof>,
    pub side: Vec<SideCondition>,
}

impl Proof {
    pub fn hyp(conclusion: Formula) -> Proof {
        Proof {
            conclusion,
            rule: RuleId::Hyp,
            premises: Vec::new(),
            side: Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(Proof::node_count).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.premises.iter().map(Proof::depth).max().unwrap_or(0)
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    artifact: String,
    version: u32,
    goal: String,
}

#[derive(Serialize, Deserialize)]
struct NodeRecord {
    id: usize,
    rule: String,
    conclusion: String,
    premises: Vec<usize>,
    side: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct RootRecord {
    root: usize,
}

/// Serialize a proof of `goal`. Node ids are assigned in postorder, so every
/// premise id precedes the node that uses it; the root is the last node.
pub fn write_proof(proof: &Proof) -> String {
    let mut lines = Vec::new();
    let header = Header {
        artifact: "proof".into(),
        version: 1,
        goal: pretty(&proof.conclusion),
    };
    lines.push(serde_json::to_string(&header).expect("header serializes"));
    let mut next_id = 0usize;
    let root = write_node(proof, &mut next_id, &mut lines);
    lines.push(serde_json::to_string(&RootRecord { root }).expect("root serializes"));
    lines.join("\n") + "\n"
}

fn write_node(node: &Proof, next_id: &mut usize, lines: &mut Vec<String>) -> usize {
    let premises: Vec<usize> = node
        .premises
        .iter()
        .map(|p| write_node(p, next_id, lines))
        .collect();
    let id = *next_id;
    *next_id += 1;
    let record = NodeRecord {
        id,
        rule: node.rule.name().into(),
        conclusion: pretty(&node.conclusion),
        premises,
        side: node.side.iter().map(SideCondition::render).collect(),
    };
    lines.push(serde_json::to_string(&record).expect("node serializes"));
    id
}

/// Errors reading a serialized proof.
#[derive(Debug, thiserror::Error)]
pub enum ProofReadError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Kernel {
        line: usize,
        source: KernelError,
    },
}

/// Read a proof document back. Returns the stated goal and the proof tree.
pub fn read_proof(text: &str, sig: &Signature) -> Result<(Formula, Proof), ProofReadError> {
    let malformed = |line: usize, msg: &str| ProofReadError::Malformed {
        line,
        msg: msg.into(),
    };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or_else(|| malformed(0, "empty document"))?;
    let header: Header = serde_json::from_str(header)
        .map_err(|e| malformed(hline + 1, &format!("bad header: {e}")))?;
    if header.artifact != "proof" || header.version != 1 {
        return Err(malformed(hline + 1, "not a version-1 proof artifact"));
    }
    let goal = parse_formula(&header.goal, sig).map_err(|e| ProofReadError::Kernel {
        line: hline + 1,
        source: e,
    })?;

    let mut nodes: Vec<(usize, Proof, Vec<usize>)> = Vec::new();
    let mut root: Option<usize> = None;
    for (lineno, line) in lines {
        if let Ok(r) = serde_json::from_str::<RootRecord>(line) {
            root = Some(r.root);
            continue;
        }
        let rec: NodeRecord = serde_json::from_str(line)
            .map_err(|e| malformed(lineno + 1, &format!("bad node record: {e}")))?;
        let rule = RuleId::from_name(&rec.rule)
            .ok_or_else(|| malformed(lineno + 1, &format!("unknown rule `{}`", rec.rule)))?;
        let conclusion =
            parse_formula(&rec.conclusion, sig).map_err(|e| ProofReadError::Kernel {
                line: lineno + 1,
                source: e,
            })?;
        let side = rec
            .side
            .iter()
            .map(|s| SideCondition::parse(s, sig))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ProofReadError::Kernel {
                line: lineno + 1,
                source: e,
            })?;
        nodes.push((
            rec.id,
            Proof {
                conclusion,
                rule,
                premises: Vec::new(),
                side,
            },
            rec.premises,
        ));
    }
    let root = root.ok_or_else(|| malformed(0, "missing root record"))?;
    // Rebuild bottom-up; postorder ids mean premises already resolved.
    let mut resolved: Vec<Option<Proof>> = vec![None; nodes.len()];
    for (id, mut node, premise_ids) in nodes {
        if id >= resolved.len() {
            return Err(malformed(0, "node id out of range"));
        }
        for pid in premise_ids {
            let p = resolved
                .get_mut(pid)
                .and_then(Option::take)
                .ok_or_else(|| malformed(0, "premise id unresolved or reused"))?;
            node.premises.push(p);
        }
        resolved[id] = Some(node);
    }
    let proof = resolved
        .get_mut(root)
        .and_then(Option::take)
        .ok_or_else(|| malformed(0, "root id unresolved"))?;
    Ok((goal, proof))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut sig = Signature::new();
        sig.declare_const("f", "Fluent").unwrap();
        let a = parse_formula("(holds f 1)", &sig).unwrap();
        let b = parse_formula("(holds f 2)", &sig).unwrap();
        let proof = Proof {
            conclusion: Formula::And(vec![a.clone(), b.clone()]),
            rule: RuleId::AndIntro,
            premises: vec![Proof::hyp(a), Proof::hyp(b)],
            side: vec![],
        };
        let text = write_proof(&proof);
        let (goal, back) = read_proof(&text, &sig).unwrap();
        assert_eq!(goal, proof.conclusion);
        assert_eq!(back, proof);
        // Byte-stable serialization.
        assert_eq!(text, write_proof(&back));
    }
}
