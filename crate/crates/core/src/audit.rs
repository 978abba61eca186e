//! Gap auditing: training and in-distribution evaluation data must not
//! realize any held-out combination, must contain each pattern's
//! prerequisites, and no sentence pair may sit in two splits.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::analyze;
use crate::corpus::{Record, Split};
use crate::grammar::{DerivationTree, Grammar, Lexicon, Pos};
use crate::patterns::Inventory;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// A non-generalization record realizes the held-out combination.
    Leak,
    /// No exposure record for the pattern in training.
    MissingExposure,
    /// A target lexeme never appears in training.
    MissingTarget,
    /// The same sentence pair appears in two splits.
    SplitOverlap,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GapViolation {
    pub pattern: String,
    pub kind: ViolationKind,
    pub record: Option<String>,
    pub detail: String,
}

impl fmt::Display for GapViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ViolationKind::Leak => "leak",
            ViolationKind::MissingExposure => "missing exposure",
            ViolationKind::MissingTarget => "missing target",
            ViolationKind::SplitOverlap => "split overlap",
        };
        write!(f, "{}: {kind}", self.pattern)?;
        if let Some(r) = &self.record {
            write!(f, " in {r}")?;
        }
        write!(f, ": {}", self.detail)
    }
}

/// Audits records whose parsed trees are given alongside (`trees[i]` belongs to `records[i]`).
pub fn audit_gap(
    records: &[Record],
    trees: &[Vec<DerivationTree>],
    inv: &Inventory,
    g: &Grammar,
    lex: &Lexicon,
) -> Vec<GapViolation> {
    assert_eq!(records.len(), trees.len(), "one tree list per record");
    let mut out: Vec<GapViolation> = records
        .par_iter()
        .zip(trees.par_iter())
        .filter(|(r, _)| r.split != Split::Gen)
        .flat_map_iter(|(r, ts)| {
            let mut leaks = BTreeSet::new();
            for t in ts {
                leaks.extend(inv.leaks(&analyze(t, g), g, lex));
            }
            leaks.into_iter().map(|p| GapViolation {
                pattern: p.to_string(),
                kind: ViolationKind::Leak,
                record: Some(r.id.clone()),
                detail: r.source.clone(),
            })
        })
        .collect();

    let mut seen_targets: BTreeSet<(Pos, &str)> = BTreeSet::new();
    let mut exposed: BTreeSet<&str> = BTreeSet::new();
    for (r, ts) in records.iter().zip(trees) {
        if r.split != Split::Train {
            continue;
        }
        if r.provenance.grammar.starts_with("exp:") {
            if let Some(p) = &r.pattern {
                exposed.insert(p);
            }
        }
        for t in ts {
            t.walk(&mut |_, n| {
                if let DerivationTree::Leaf { entry, .. } = n {
                    let e = lex.get(*entry);
                    if inv.target_of(e).is_some() {
                        seen_targets.insert((e.pos, e.lemma.as_str()));
                    }
                }
            });
        }
    }
    for p in &inv.patterns {
        if !exposed.contains(p.id) {
            out.push(GapViolation {
                pattern: p.id.into(),
                kind: ViolationKind::MissingExposure,
                record: None,
                detail: "no exposure record in train".into(),
            });
        }
        if let Some(pos) = p.target_pos {
            for t in p.targets {
                if !seen_targets.contains(&(pos, *t)) {
                    out.push(GapViolation {
                        pattern: p.id.into(),
                        kind: ViolationKind::MissingTarget,
                        record: None,
                        detail: format!("target {t} never occurs in train"),
                    });
                }
            }
        }
    }

    let mut first_split: HashMap<(&str, &str), (Split, &str)> = HashMap::new();
    for r in records {
        let key = (r.source.as_str(), r.target.as_str());
        match first_split.get(&key) {
            Some(&(s, id)) if s != r.split => out.push(GapViolation {
                pattern: r.pattern.clone().unwrap_or_else(|| "-".into()),
                kind: ViolationKind::SplitOverlap,
                record: Some(r.id.clone()),
                detail: format!("same pair as {id} ({s})"),
            }),
            Some(_) => {}
            None => {
                first_split.insert(key, (r.split, &r.id));
            }
        }
    }
    out.sort();
    out
}
