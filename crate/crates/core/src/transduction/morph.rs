use std::collections::HashMap;

use crate::error::LoadError;
use crate::grammar::{Tense, Voice};

/// Stem ending appended to the root, then suffix tokens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Inflection {
    pub stem_final: String,
    pub suffix: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MorphKey {
    pub tense: Tense,
    pub voice: Voice,
    pub question: bool,
}

/// Rows keyed by (inflection class, tense, voice, interrogative).
#[derive(Clone, Debug, Default)]
pub struct MorphTable {
    rows: HashMap<(String, MorphKey), Inflection>,
}

impl MorphTable {
    /// TSV: class, tense, voice, question (yes/no), stem_final, suffix tokens.
    pub fn parse(text: &str) -> Result<MorphTable, LoadError> {
        let mut rows = HashMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let err = |msg: String| LoadError::Format { line, msg };
            let cols: Vec<&str> = raw.split('\t').collect();
            if cols.len() != 6 {
                return Err(err(format!("expected 6 columns, found {}", cols.len())));
            }
            let tense = match cols[1] {
                "past" => Tense::Past,
                "present" => Tense::Present,
                t => return Err(err(format!("unknown tense {t}"))),
            };
            let voice = match cols[2] {
                "active" => Voice::Active,
                "passive" => Voice::Passive,
                v => return Err(err(format!("unknown voice {v}"))),
            };
            let question = match cols[3] {
                "yes" => true,
                "no" => false,
                q => return Err(err(format!("question must be yes or no, found {q}"))),
            };
            let key = MorphKey { tense, voice, question };
            let inflection = Inflection {
                stem_final: cols[4].trim().to_string(),
                suffix: cols[5].split_whitespace().map(String::from).collect(),
            };
            if rows.insert((cols[0].to_string(), key), inflection).is_some() {
                return Err(err(format!("duplicate row for {} {} {} {}", cols[0], cols[1], cols[2], cols[3])));
            }
        }
        Ok(MorphTable { rows })
    }

    pub fn lookup(&self, class: &str, key: MorphKey) -> Option<&Inflection> {
        self.rows.get(&(class.to_string(), key))
    }

    /// Target tokens of an inflected verb.
    pub fn inflect(&self, class: &str, root: &str, key: MorphKey) -> Option<Vec<String>> {
        let inf = self.lookup(class, key)?;
        let mut out = Vec::with_capacity(1 + inf.suffix.len());
        out.push(format!("{root}{}", inf.stem_final));
        out.extend(inf.suffix.iter().cloned());
        Some(out)
    }

    /// Missing rows for the given classes over every bundle the shipped grammars can request.
    pub fn gaps<'a>(&self, classes: impl Iterator<Item = &'a str>) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for c in classes {
            if !seen.insert(c) {
                continue;
            }
            for tense in [Tense::Past, Tense::Present] {
                for voice in [Voice::Active, Voice::Passive] {
                    for question in [false, true] {
                        if self.lookup(c, MorphKey { tense, voice, question }).is_none() {
                            out.push(format!("no morphology row for {c} {tense:?} {voice:?} question={question}"));
                        }
                    }
                }
            }
        }
        out
    }
}
