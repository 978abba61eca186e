use std::path::Path;
use std::sync::Arc;

use crate::error::LoadError;
use crate::grammar::{Grammar, Lexicon};
use crate::naturalizer::CaseFrameList;
use crate::transduction::{Dictionary, MorphTable, RuleSet, Transducer};

pub const GRAMMAR: &str = include_str!("../data/grammar.pcfg");
pub const LEXICON: &str = include_str!("../data/lexicon.tsv");
pub const RULES: &str = include_str!("../data/transduction.rules");
pub const DICTIONARY: &str = include_str!("../data/dictionary.tsv");
pub const MORPHOLOGY: &str = include_str!("../data/morphology.tsv");
pub const CASEFRAMES: &str = include_str!("../data/caseframes.tsv");

/// Grammar bank, lexicon, transduction data and case frames, immutable after load.
#[derive(Clone, Debug)]
pub struct Resources {
    pub grammar: Arc<Grammar>,
    pub lexicon: Arc<Lexicon>,
    pub transducer: Arc<Transducer>,
    pub caseframes: Arc<CaseFrameList>,
}

/// File texts in load order: grammar, lexicon, rules, dictionary, morphology, case frames.
pub struct Texts<'a> {
    pub grammar: &'a str,
    pub lexicon: &'a str,
    pub rules: &'a str,
    pub dictionary: &'a str,
    pub morphology: &'a str,
    pub caseframes: &'a str,
}

impl Resources {
    pub fn bundled() -> Resources {
        Resources::from_texts(&Texts {
            grammar: GRAMMAR,
            lexicon: LEXICON,
            rules: RULES,
            dictionary: DICTIONARY,
            morphology: MORPHOLOGY,
            caseframes: CASEFRAMES,
        })
        .expect("bundled data loads")
    }

    pub fn from_texts(t: &Texts) -> Result<Resources, LoadError> {
        Ok(Resources {
            grammar: Arc::new(Grammar::parse(t.grammar).map_err(|e| e.in_file("grammar"))?),
            lexicon: Arc::new(Lexicon::parse(t.lexicon).map_err(|e| e.in_file("lexicon"))?),
            transducer: Arc::new(Transducer {
                rules: RuleSet::parse(t.rules).map_err(|e| e.in_file("transduction rules"))?,
                dictionary: Dictionary::parse(t.dictionary).map_err(|e| e.in_file("dictionary"))?,
                morphology: MorphTable::parse(t.morphology).map_err(|e| e.in_file("morphology"))?,
            }),
            caseframes: Arc::new(CaseFrameList::parse(t.caseframes).map_err(|e| e.in_file("case frames"))?),
        })
    }

    /// Reads each file, falling back to the bundled copy where a path is `None`.
    pub fn load(paths: &crate::config::ResourcePaths) -> Result<Resources, LoadError> {
        fn read(p: &Option<String>, bundled: &'static str) -> Result<std::borrow::Cow<'static, str>, LoadError> {
            match p {
                None => Ok(bundled.into()),
                Some(p) => std::fs::read_to_string(Path::new(p))
                    .map(Into::into)
                    .map_err(|source| LoadError::Io { path: p.into(), source }),
            }
        }
        let grammar = read(&paths.grammar, GRAMMAR)?;
        let lexicon = read(&paths.lexicon, LEXICON)?;
        let rules = read(&paths.rules, RULES)?;
        let dictionary = read(&paths.dictionary, DICTIONARY)?;
        let morphology = read(&paths.morphology, MORPHOLOGY)?;
        let caseframes = read(&paths.caseframes, CASEFRAMES)?;
        Resources::from_texts(&Texts {
            grammar: &grammar,
            lexicon: &lexicon,
            rules: &rules,
            dictionary: &dictionary,
            morphology: &morphology,
            caseframes: &caseframes,
        })
    }

    /// Cross-file checks: rule coverage, dictionary and morphology totality, case-frame lemmas.
    pub fn violations(&self) -> Vec<String> {
        let tr = &self.transducer;
        let mut out = tr.rules.violations(&self.grammar);
        out.extend(tr.dictionary.uncovered(&self.lexicon));
        out.extend(tr.morphology.gaps(tr.dictionary.classes()));
        for (verb, role, noun) in self.caseframes.pairs() {
            if self.lexicon.find(verb, crate::grammar::Pos::Verb).is_none() {
                out.push(format!("case frame verb {verb} is not in the lexicon"));
            }
            if self.lexicon.find(noun, crate::grammar::Pos::CommonNoun).is_none() {
                out.push(format!("case frame noun {noun} ({}) is not in the lexicon", role.as_str()));
            }
        }
        out.sort();
        out.dedup();
        out
    }
}
