use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::analysis::{duplicate_lexemes, verb_args, ArgRelation};
use crate::grammar::{DerivationTree, Grammar, LexicalFilter, Lexicon, Pos, SlotContext, Symbol};
use crate::naturalizer::{CaseFrameList, FrameRole};

/// One unlicensed verb-noun pairing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub verb: String,
    pub role: FrameRole,
    pub noun: String,
    #[serde(skip)]
    pub noun_path: Vec<usize>,
}

/// Selectional violations of a tree. Subjects are checked only when inanimate.
pub fn selectional_violations(
    t: &DerivationTree,
    g: &Grammar,
    lex: &Lexicon,
    frames: &CaseFrameList,
    strict: bool,
) -> Vec<Violation> {
    let leaf = |p: &[usize]| match t.at(p) {
        Some(DerivationTree::Leaf { entry, .. }) => Some(lex.get(*entry)),
        _ => None,
    };
    let mut out = Vec::new();
    for arg in verb_args(t, g) {
        let (Some(v), Some(n)) = (leaf(&arg.verb), leaf(&arg.noun)) else { continue };
        let role = match arg.relation {
            ArgRelation::Subject if n.is_animate() => continue,
            ArgRelation::Subject => FrameRole::InanimateSubject,
            ArgRelation::DirectObject => FrameRole::DirectObject,
        };
        if !frames.licenses(&v.lemma, role, &n.lemma, strict) {
            out.push(Violation { verb: v.lemma.clone(), role, noun: n.lemma.clone(), noun_path: arg.noun });
        }
    }
    out
}

/// Why a sentence could not be made natural.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Rejection {
    DuplicateLexeme { lemma: String },
    TargetSlot { violation: Violation },
    ProperNoun { violation: Violation },
    NoCandidate { violation: Violation },
    /// Fixing one constraint left or created another.
    Residual { violations: Vec<Violation> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Clean,
    Repaired { replacements: Vec<(String, String)> },
    Rejected(Rejection),
}

const MAX_REPAIRS: usize = 4;

/// Rejects duplicate content lemmas, then repairs selectional violations by
/// swapping the offending noun for the best-ranked licensed one that the slot
/// and `filter` admit and that is not already in the sentence.
pub fn naturalize(
    t: &mut DerivationTree,
    g: &Grammar,
    lex: &Lexicon,
    frames: &CaseFrameList,
    strict: bool,
    filter: &dyn LexicalFilter,
) -> Outcome {
    if let Some(lemma) = duplicate_lexemes(t, g, lex).into_iter().next() {
        return Outcome::Rejected(Rejection::DuplicateLexeme { lemma });
    }
    let mut replacements = Vec::new();
    let mut touched: Vec<Vec<usize>> = Vec::new();
    for _ in 0..MAX_REPAIRS {
        let violations = selectional_violations(t, g, lex, frames, strict);
        let Some(v) = violations.first().cloned() else {
            return if replacements.is_empty() { Outcome::Clean } else { Outcome::Repaired { replacements } };
        };
        if violations.iter().any(|x| touched.contains(&x.noun_path))
            || violations.iter().filter(|x| x.noun_path == v.noun_path).count() > 1
        {
            return Outcome::Rejected(Rejection::Residual { violations });
        }
        let parent = &v.noun_path[..v.noun_path.len() - 1];
        let index = *v.noun_path.last().expect("noun path");
        let prod = t.at(parent).and_then(|n| n.prod()).expect("noun under a node");
        let Symbol::Slot(slot) = &g.get(prod).rhs[index] else { unreachable!("noun leaf fills a slot") };
        if slot.target {
            return Outcome::Rejected(Rejection::TargetSlot { violation: v });
        }
        if slot.pos == Pos::ProperNoun {
            return Outcome::Rejected(Rejection::ProperNoun { violation: v });
        }
        let chain: Vec<&str> = (0..=parent.len())
            .filter_map(|k| t.at(&parent[..k]).and_then(|n| n.prod()).map(|p| g.get(p).lhs.as_str()))
            .collect();
        let ctx = SlotContext::from_ancestors(chain.into_iter(), slot);
        let used: BTreeSet<&str> = {
            let mut s = BTreeSet::new();
            t.walk(&mut |_, n| {
                if let DerivationTree::Leaf { entry, .. } = n {
                    s.insert(lex.get(*entry).lemma.as_str());
                }
            });
            s
        };
        let candidate = frames.pool(&v.verb, v.role).iter().find_map(|noun| {
            let id = lex.find(noun, slot.pos)?;
            let e = lex.get(id);
            (slot.admits(e) && filter.admits(e, slot, &ctx) && !used.contains(noun.as_str())).then_some(id)
        });
        let Some(id) = candidate else {
            return Outcome::Rejected(Rejection::NoCandidate { violation: v });
        };
        let new = lex.get(id).lemma.clone();
        if let Some(DerivationTree::Leaf { entry, .. }) = t.at_mut(&v.noun_path) {
            *entry = id;
        }
        replacements.push((v.noun.clone(), new));
        touched.push(v.noun_path);
    }
    Outcome::Rejected(Rejection::Residual { violations: selectional_violations(t, g, lex, frames, strict) })
}
