//! Inference rule identifiers.

use std::fmt;

/// The natural-deduction rules: first-order introduction/elimination plus the
/// modal schemata IK, IB, I4, I13, I14, and the assumption marker HYP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleId {
    /// Leaf pointing into the knowledge base or a live assumption.
    Hyp,
    Reiteration,
    AndIntro,
    AndElim,
    OrIntro,
    OrElim,
    ImpIntro,
    ImpElim,
    NotIntro,
    NotElim,
    /// Ex falso quodlibet.
    FalsumElim,
    /// Double-negation elimination (classical).
    Dne,
    ForallIntro,
    ForallElim,
    ExistsIntro,
    ExistsElim,
    /// Knowledge closed under derivation: K(a,t1,G), G |- phi, t1 <= t2
    /// yields K(a,t2,phi).
    Ik,
    /// Belief closed under derivation, as IK but for B.
    Ib,
    /// Knowledge veridicality: K(a,t,phi) yields phi.
    I4,
    /// Intention becomes perception: I(a,t,psi), t < t' yields P(a,t',psi).
    I13,
    /// Believed obligation becomes known intention.
    I14,
}

pub const ALL_RULES: &[RuleId] = &[
    RuleId::Hyp,
    RuleId::Reiteration,
    RuleId::AndIntro,
    RuleId::AndElim,
    RuleId::OrIntro,
    RuleId::OrElim,
    RuleId::ImpIntro,
    RuleId::ImpElim,
    RuleId::NotIntro,
    RuleId::NotElim,
    RuleId::FalsumElim,
    RuleId::Dne,
    RuleId::ForallIntro,
    RuleId::ForallElim,
    RuleId::ExistsIntro,
    RuleId::ExistsElim,
    RuleId::Ik,
    RuleId::Ib,
    RuleId::I4,
    RuleId::I13,
    RuleId::I14,
];

impl RuleId {
    pub fn name(&self) -> &'static str {
        match self {
            RuleId::Hyp => "HYP",
            RuleId::Reiteration => "Reit",
            RuleId::AndIntro => "AndI",
            RuleId::AndElim => "AndE",
            RuleId::OrIntro => "OrI",
            RuleId::OrElim => "OrE",
            RuleId::ImpIntro => "ImpI",
            RuleId::ImpElim => "ImpE",
            RuleId::NotIntro => "NegI",
            RuleId::NotElim => "NegE",
            RuleId::FalsumElim => "BotE",
            RuleId::Dne => "DNE",
            RuleId::ForallIntro => "AllI",
            RuleId::ForallElim => "AllE",
            RuleId::ExistsIntro => "ExI",
            RuleId::ExistsElim => "ExE",
            RuleId::Ik => "IK",
            RuleId::Ib => "IB",
            RuleId::I4 => "I4",
            RuleId::I13 => "I13",
            RuleId::I14 => "I14",
        }
    }

    pub fn from_name(name: &str) -> Option<RuleId> {
        ALL_RULES.iter().copied().find(|r| r.name() == name)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
