use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::LoadError;

/// The two verb-noun relations that selectional checking covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameRole {
    InanimateSubject,
    DirectObject,
}

impl FrameRole {
    pub fn parse(s: &str) -> Option<FrameRole> {
        match s {
            "inanimate_subject" => Some(FrameRole::InanimateSubject),
            "direct_object" => Some(FrameRole::DirectObject),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FrameRole::InanimateSubject => "inanimate_subject",
            FrameRole::DirectObject => "direct_object",
        }
    }
}

/// Licensed (verb, role, noun) triples. A (verb, role) pair that has any row
/// is closed: nouns not listed for it are violations. Pairs with no rows are
/// licensed in open-world mode and violations in strict mode.
#[derive(Clone, Debug, Default)]
pub struct CaseFrameList {
    pools: BTreeMap<(String, FrameRole), Vec<String>>,
    pairs: BTreeSet<(String, FrameRole, String)>,
}

impl CaseFrameList {
    /// TSV: verb, role, noun, rank (1 is preferred).
    pub fn parse(text: &str) -> Result<CaseFrameList, LoadError> {
        let mut ranked: BTreeMap<(String, FrameRole), Vec<(u32, String)>> = BTreeMap::new();
        let mut pairs = BTreeSet::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = raw.split('\t').map(str::trim).collect();
            if cols.len() != 4 {
                return Err(LoadError::Format { line, msg: format!("expected 4 columns, found {}", cols.len()) });
            }
            let role = FrameRole::parse(cols[1])
                .ok_or_else(|| LoadError::Format { line, msg: format!("unknown role {}", cols[1]) })?;
            let rank: u32 =
                cols[3].parse().map_err(|_| LoadError::Format { line, msg: format!("bad rank {}", cols[3]) })?;
            if !pairs.insert((cols[0].to_string(), role, cols[2].to_string())) {
                return Err(LoadError::Format { line, msg: format!("duplicate pair {} {} {}", cols[0], cols[1], cols[2]) });
            }
            ranked.entry((cols[0].to_string(), role)).or_default().push((rank, cols[2].to_string()));
        }
        let pools = ranked
            .into_iter()
            .map(|(k, mut v)| {
                v.sort();
                (k, v.into_iter().map(|(_, n)| n).collect())
            })
            .collect();
        Ok(CaseFrameList { pools, pairs })
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn covers(&self, verb: &str, role: FrameRole) -> bool {
        self.pools.contains_key(&(verb.to_string(), role))
    }

    pub fn licenses(&self, verb: &str, role: FrameRole, noun: &str, strict: bool) -> bool {
        if self.covers(verb, role) {
            self.pairs.contains(&(verb.to_string(), role, noun.to_string()))
        } else {
            !strict
        }
    }

    /// Replacement candidates, best first.
    pub fn pool(&self, verb: &str, role: FrameRole) -> &[String] {
        self.pools.get(&(verb.to_string(), role)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(String, FrameRole, String)> {
        self.pairs.iter()
    }
}
