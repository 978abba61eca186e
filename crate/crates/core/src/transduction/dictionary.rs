use std::collections::HashMap;

use crate::error::LoadError;
use crate::grammar::{Lexicon, Pos};

/// How a lemma is realized in the target language. Verbs carry an
/// inflection class and a root that the morphology table completes; every
/// other part of speech maps to a fixed token sequence (possibly empty, as
/// for English articles).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetLexeme {
    Verb { class: String, root: String },
    Tokens(Vec<String>),
}

/// Rows are keyed by (lemma, pos, frame); frame `*` matches any verb frame
/// not listed explicitly, which lets one English verb map to different
/// Japanese verbs by argument structure (e.g. unaccusative vs transitive).
#[derive(Clone, Debug, Default)]
pub struct Dictionary {
    entries: HashMap<(String, Pos, String), TargetLexeme>,
}

impl Dictionary {
    /// TSV: lemma, pos, frame, class (`-` for non-verbs), target.
    pub fn parse(text: &str) -> Result<Dictionary, LoadError> {
        let mut entries = HashMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = raw.split('\t').collect();
            if cols.len() != 5 {
                return Err(LoadError::Format { line, msg: format!("expected 5 columns, found {}", cols.len()) });
            }
            let pos = Pos::parse(cols[1])
                .ok_or_else(|| LoadError::Format { line, msg: format!("unknown part of speech {}", cols[1]) })?;
            let lexeme = if pos == Pos::Verb {
                if cols[3] == "-" || cols[4].trim().is_empty() {
                    return Err(LoadError::Format { line, msg: format!("verb {} needs a class and a root", cols[0]) });
                }
                TargetLexeme::Verb { class: cols[3].to_string(), root: cols[4].trim().to_string() }
            } else {
                TargetLexeme::Tokens(cols[4].split_whitespace().map(String::from).collect())
            };
            let key = (cols[0].to_string(), pos, cols[2].to_string());
            if entries.insert(key, lexeme).is_some() {
                return Err(LoadError::Format { line, msg: format!("duplicate entry {} {} {}", cols[0], cols[1], cols[2]) });
            }
        }
        Ok(Dictionary { entries })
    }

    pub fn lookup(&self, lemma: &str, pos: Pos, frame: Option<&str>) -> Option<&TargetLexeme> {
        if let Some(f) = frame {
            if let Some(e) = self.entries.get(&(lemma.to_string(), pos, f.to_string())) {
                return Some(e);
            }
        }
        self.entries.get(&(lemma.to_string(), pos, "*".to_string()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Verb classes used by any row.
    pub fn classes(&self) -> impl Iterator<Item = &str> {
        self.entries.values().filter_map(|e| match e {
            TargetLexeme::Verb { class, .. } => Some(class.as_str()),
            _ => None,
        })
    }

    /// Lexicon entries with no default row.
    pub fn uncovered(&self, lex: &Lexicon) -> Vec<String> {
        lex.entries()
            .iter()
            .filter(|e| self.lookup(&e.lemma, e.pos, None).is_none())
            .map(|e| format!("no dictionary entry for {} ({})", e.lemma, e.pos))
            .collect()
    }
}
