use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::LoadError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pos {
    ProperNoun,
    CommonNoun,
    Verb,
    Adjective,
    Preposition,
    Determiner,
    Complementizer,
    RelPronoun,
    WhPronoun,
    Auxiliary,
}

impl Pos {
    pub const ALL: [Pos; 10] = [
        Pos::ProperNoun,
        Pos::CommonNoun,
        Pos::Verb,
        Pos::Adjective,
        Pos::Preposition,
        Pos::Determiner,
        Pos::Complementizer,
        Pos::RelPronoun,
        Pos::WhPronoun,
        Pos::Auxiliary,
    ];

    pub fn parse(s: &str) -> Option<Pos> {
        Pos::ALL.iter().copied().find(|p| p.as_str() == s)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Pos::ProperNoun => "ProperNoun",
            Pos::CommonNoun => "CommonNoun",
            Pos::Verb => "Verb",
            Pos::Adjective => "Adjective",
            Pos::Preposition => "Preposition",
            Pos::Determiner => "Determiner",
            Pos::Complementizer => "Complementizer",
            Pos::RelPronoun => "RelPronoun",
            Pos::WhPronoun => "WhPronoun",
            Pos::Auxiliary => "Auxiliary",
        }
    }

    pub fn is_noun(self) -> bool {
        matches!(self, Pos::ProperNoun | Pos::CommonNoun)
    }

    /// Nouns, verbs and adjectives; the lemmas the duplicate filter looks at.
    pub fn is_content(self) -> bool {
        matches!(self, Pos::ProperNoun | Pos::CommonNoun | Pos::Verb | Pos::Adjective)
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tense {
    Past,
    Present,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Voice {
    Active,
    Passive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Finiteness {
    Finite,
    Infinitive,
}

/// Morphological feature bundle a surface form realizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MorphBundle {
    pub tense: Tense,
    pub voice: Voice,
    pub finiteness: Finiteness,
}

/// Named surface forms. Non-verbs only have `Base`; English passive
/// participles carry past tense in their bundle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Base,
    Past,
    Present,
    Passive,
    Infinitive,
}

impl Form {
    pub fn parse(s: &str) -> Option<Form> {
        Some(match s {
            "base" => Form::Base,
            "past" => Form::Past,
            "present" => Form::Present,
            "passive" => Form::Passive,
            "infinitive" => Form::Infinitive,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Form::Base => "base",
            Form::Past => "past",
            Form::Present => "present",
            Form::Passive => "passive",
            Form::Infinitive => "infinitive",
        }
    }

    pub fn bundle(self) -> Option<MorphBundle> {
        let (tense, voice, finiteness) = match self {
            Form::Base => return None,
            Form::Past => (Tense::Past, Voice::Active, Finiteness::Finite),
            Form::Present => (Tense::Present, Voice::Active, Finiteness::Finite),
            Form::Passive => (Tense::Past, Voice::Passive, Finiteness::Finite),
            Form::Infinitive => (Tense::Present, Voice::Active, Finiteness::Infinitive),
        };
        Some(MorphBundle { tense, voice, finiteness })
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexEntry {
    pub lemma: String,
    pub pos: Pos,
    /// Set-valued features, e.g. `verb_class -> {transitive, passivizable}`.
    pub features: BTreeMap<String, BTreeSet<String>>,
    pub forms: BTreeMap<Form, String>,
    pub zipf_rank: u32,
}

impl LexEntry {
    pub fn has_feature(&self, key: &str, value: &str) -> bool {
        self.features.get(key).is_some_and(|vs| vs.contains(value))
    }

    pub fn feature(&self, key: &str) -> Option<&str> {
        self.features.get(key).and_then(|vs| vs.iter().next()).map(|s| s.as_str())
    }

    pub fn surface(&self, form: Form) -> Option<&str> {
        match self.forms.get(&form) {
            Some(s) => Some(s),
            None if form == Form::Base => Some(&self.lemma),
            None => None,
        }
    }

    pub fn is_animate(&self) -> bool {
        self.has_feature("animacy", "animate")
    }
}

pub type EntryId = u32;

#[derive(Clone, Debug, Default)]
pub struct Lexicon {
    entries: Vec<LexEntry>,
    index: HashMap<(String, Pos), EntryId>,
}

impl Lexicon {
    pub fn new(entries: Vec<LexEntry>) -> Result<Lexicon, LoadError> {
        let mut index = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            if index.insert((e.lemma.clone(), e.pos), i as EntryId).is_some() {
                return Err(LoadError::Format {
                    line: i + 1,
                    msg: format!("duplicate lexicon entry {} {}", e.lemma, e.pos),
                });
            }
        }
        Ok(Lexicon { entries, index })
    }

    /// TSV: lemma, pos, features (`k=v1,v2;k2=v`), forms (`form=surface;...`), zipf_rank.
    pub fn parse(text: &str) -> Result<Lexicon, LoadError> {
        let mut entries = Vec::new();
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
            let mut features = BTreeMap::new();
            for kv in cols[2].split(';').filter(|s| !s.is_empty()) {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| LoadError::Format { line, msg: format!("bad feature {kv}") })?;
                let set: BTreeSet<String> = v.split(',').map(str::to_string).collect();
                features.insert(k.to_string(), set);
            }
            let mut forms = BTreeMap::new();
            for kv in cols[3].split(';').filter(|s| !s.is_empty()) {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| LoadError::Format { line, msg: format!("bad form {kv}") })?;
                let form = Form::parse(k).ok_or_else(|| LoadError::Format { line, msg: format!("unknown form {k}") })?;
                forms.insert(form, v.to_string());
            }
            let zipf_rank = cols[4]
                .trim()
                .parse()
                .map_err(|_| LoadError::Format { line, msg: format!("bad rank {}", cols[4]) })?;
            entries.push(LexEntry { lemma: cols[0].to_string(), pos, features, forms, zipf_rank });
        }
        Lexicon::new(entries)
    }

    pub fn entries(&self) -> &[LexEntry] {
        &self.entries
    }

    pub fn get(&self, id: EntryId) -> &LexEntry {
        &self.entries[id as usize]
    }

    pub fn find(&self, lemma: &str, pos: Pos) -> Option<EntryId> {
        self.index.get(&(lemma.to_string(), pos)).copied()
    }

    /// First entry with this lemma in any part of speech.
    pub fn find_any(&self, lemma: &str) -> Option<EntryId> {
        Pos::ALL.iter().find_map(|&p| self.find(lemma, p))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Lexicon-level problems: rank gaps or clashes within a POS, verbs lacking a past form.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut by_pos: BTreeMap<Pos, Vec<(u32, &str)>> = BTreeMap::new();
        for e in &self.entries {
            by_pos.entry(e.pos).or_default().push((e.zipf_rank, &e.lemma));
            if e.pos == Pos::Verb && !e.forms.contains_key(&Form::Past) {
                out.push(format!("verb {} has no past form", e.lemma));
            }
        }
        for (pos, mut ranks) in by_pos {
            ranks.sort();
            for (i, (r, lemma)) in ranks.iter().enumerate() {
                if *r != i as u32 + 1 {
                    out.push(format!("{pos} ranks not contiguous from 1 at {lemma} (rank {r})"));
                    break;
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "# lemma\tpos\tfeatures\tforms\tzipf_rank\n\
        dog\tCommonNoun\tanimacy=animate\tbase=dog\t1\n\
        cup\tCommonNoun\tanimacy=inanimate\tbase=cup\t2\n\
        find\tVerb\tverb_class=transitive,passivizable\tpast=found;infinitive=find\t1\n";

    #[test]
    fn parses_set_features_and_forms() {
        let lex = Lexicon::parse(TINY).unwrap();
        let find = lex.get(lex.find("find", Pos::Verb).unwrap());
        assert!(find.has_feature("verb_class", "passivizable"));
        assert_eq!(find.surface(Form::Past), Some("found"));
        assert_eq!(find.surface(Form::Present), None);
        assert!(lex.violations().is_empty());
    }

    #[test]
    fn flags_rank_gap_and_missing_past() {
        let text = "a\tCommonNoun\t\tbase=a\t1\nb\tCommonNoun\t\tbase=b\t3\ngo\tVerb\t\tinfinitive=go\t1\n";
        let v = Lexicon::parse(text).unwrap().violations();
        assert_eq!(v.len(), 2, "{v:?}");
    }

    #[test]
    fn passive_bundle_is_past() {
        let b = Form::Passive.bundle().unwrap();
        assert_eq!((b.tense, b.voice), (Tense::Past, Voice::Passive));
        assert_eq!(Form::Infinitive.bundle().unwrap().finiteness, Finiteness::Infinitive);
    }
}
