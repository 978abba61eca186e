use std::collections::BTreeMap;

use crate::error::TransduceError;
use crate::grammar::{DerivationTree, Form, Grammar, Lexicon, Symbol, Tense, Voice};
use crate::transduction::dictionary::{Dictionary, TargetLexeme};
use crate::transduction::morph::{MorphKey, MorphTable};
use crate::transduction::rules::{RuleSet, TemplateItem};

/// Target-side tree. Every node and word remembers the source path it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetTree {
    Node { prod: String, source: Vec<usize>, children: Vec<TargetTree> },
    Word { source: Vec<usize>, tokens: Vec<String> },
    Morpheme(String),
}

/// A translated sentence. `alignment[i]` is the target span of source token
/// `i` (None for dropped tokens such as articles and English literals);
/// `spans` maps every source node path to the target span its material covers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SentencePair {
    pub source: Vec<String>,
    pub target: Vec<String>,
    pub alignment: Vec<Option<(usize, usize)>>,
    pub spans: BTreeMap<Vec<usize>, (usize, usize)>,
}

impl SentencePair {
    pub fn target_of(&self, path: &[usize]) -> Option<&[String]> {
        self.spans.get(path).map(|&(a, b)| &self.target[a..b])
    }
}

/// Everything needed to translate trees of one grammar bank.
#[derive(Clone, Debug)]
pub struct Transducer {
    pub rules: RuleSet,
    pub dictionary: Dictionary,
    pub morphology: MorphTable,
}

fn morph_key(form: Form, tense: Option<Tense>, question: bool) -> MorphKey {
    let (t, voice) = match form {
        Form::Present | Form::Infinitive => (Tense::Present, Voice::Active),
        Form::Passive => (Tense::Past, Voice::Passive),
        _ => (Tense::Past, Voice::Active),
    };
    MorphKey { tense: tense.unwrap_or(t), voice, question }
}

impl Transducer {
    pub fn transduce(&self, t: &DerivationTree, g: &Grammar, lex: &Lexicon) -> Result<TargetTree, TransduceError> {
        let mut path = Vec::new();
        self.node(t, &mut path, g, lex)
    }

    fn node(
        &self,
        t: &DerivationTree,
        path: &mut Vec<usize>,
        g: &Grammar,
        lex: &Lexicon,
    ) -> Result<TargetTree, TransduceError> {
        let DerivationTree::Node { prod, .. } = t else {
            return Err(TransduceError::BadReference { rule: "<root>".into(), msg: "root is not a production".into() });
        };
        let p = g.get(*prod);
        let template = self.rules.get(&p.id).ok_or_else(|| TransduceError::UncoveredProduction(p.id.clone()))?;
        let mut children = Vec::with_capacity(template.len());
        for item in template {
            match item {
                TemplateItem::Literal(s) => children.push(TargetTree::Morpheme(s.clone())),
                TemplateItem::Child(rel) | TemplateItem::Morph { path: rel, .. } => {
                    let (question, tense) = match item {
                        TemplateItem::Morph { question, tense, .. } => (*question, *tense),
                        _ => (false, None),
                    };
                    let bad = |msg: &str| TransduceError::BadReference { rule: p.id.clone(), msg: format!("{rel:?}: {msg}") };
                    let sub = t.at(rel).ok_or_else(|| bad("no such child"))?;
                    let parent = t.at(&rel[..rel.len() - 1]).and_then(|n| n.prod()).ok_or_else(|| bad("no parent"))?;
                    let sym = &g.get(parent).rhs[*rel.last().expect("nonempty path")];
                    let base = path.len();
                    path.extend_from_slice(rel);
                    let out = match (sub, sym) {
                        (DerivationTree::Node { .. }, _) => {
                            if matches!(item, TemplateItem::Morph { .. }) {
                                path.truncate(base);
                                return Err(bad("morph directive on a phrase"));
                            }
                            self.node(sub, path, g, lex)
                        }
                        (DerivationTree::Leaf { entry, form }, Symbol::Slot(slot)) => {
                            let e = lex.get(*entry);
                            let frame = slot.frame();
                            let uncovered = || TransduceError::UncoveredLexeme {
                                lemma: e.lemma.clone(),
                                pos: e.pos.to_string(),
                                frame: frame.unwrap_or("*").to_string(),
                            };
                            let tokens = match self.dictionary.lookup(&e.lemma, e.pos, frame).ok_or_else(uncovered)? {
                                TargetLexeme::Tokens(t) => {
                                    if matches!(item, TemplateItem::Morph { .. }) {
                                        path.truncate(base);
                                        return Err(bad("morph directive on a non-verb"));
                                    }
                                    t.clone()
                                }
                                TargetLexeme::Verb { class, root } => {
                                    let key = morph_key(*form, tense, question);
                                    self.morphology.inflect(class, root, key).ok_or_else(|| {
                                        TransduceError::UncoveredMorph { class: class.clone(), bundle: format!("{key:?}") }
                                    })?
                                }
                            };
                            Ok(TargetTree::Word { source: path.clone(), tokens })
                        }
                        _ => Err(bad("reference to a literal")),
                    };
                    path.truncate(base);
                    children.push(out?);
                }
            }
        }
        Ok(TargetTree::Node { prod: p.id.clone(), source: path.clone(), children })
    }

    pub fn translate(&self, t: &DerivationTree, g: &Grammar, lex: &Lexicon) -> Result<SentencePair, TransduceError> {
        let tt = self.transduce(t, g, lex)?;
        let mut target = Vec::new();
        let mut spans: BTreeMap<Vec<usize>, (usize, usize)> = BTreeMap::new();
        let mut words: BTreeMap<Vec<usize>, (usize, usize)> = BTreeMap::new();
        collect(&tt, &mut target, &mut spans, &mut words);

        let mut source_paths = Vec::new();
        t.walk(&mut |p, n| {
            if !matches!(n, DerivationTree::Node { .. }) {
                source_paths.push(p.to_vec());
            }
        });
        let source = crate::grammar::yield_tokens(t, g, lex);
        let alignment = source_paths.iter().map(|p| words.get(p).copied()).collect();
        Ok(SentencePair { source, target, alignment, spans })
    }
}

fn extend(spans: &mut BTreeMap<Vec<usize>, (usize, usize)>, path: &[usize], a: usize, b: usize) {
    for k in 0..=path.len() {
        let e = spans.entry(path[..k].to_vec()).or_insert((a, b));
        e.0 = e.0.min(a);
        e.1 = e.1.max(b);
    }
}

fn collect(
    t: &TargetTree,
    out: &mut Vec<String>,
    spans: &mut BTreeMap<Vec<usize>, (usize, usize)>,
    words: &mut BTreeMap<Vec<usize>, (usize, usize)>,
) {
    match t {
        TargetTree::Node { source, children, .. } => {
            for c in children {
                if let TargetTree::Morpheme(m) = c {
                    out.push(m.clone());
                    extend(spans, source, out.len() - 1, out.len());
                } else {
                    collect(c, out, spans, words);
                }
            }
        }
        TargetTree::Word { source, tokens } => {
            let a = out.len();
            out.extend(tokens.iter().cloned());
            if !tokens.is_empty() {
                extend(spans, source, a, out.len());
                words.insert(source.clone(), (a, out.len()));
            }
        }
        TargetTree::Morpheme(m) => out.push(m.clone()),
    }
}

/// Left-to-right target tokens.
pub fn linearize(tt: &TargetTree) -> Vec<String> {
    let mut out = Vec::new();
    let mut spans = BTreeMap::new();
    let mut words = BTreeMap::new();
    collect(tt, &mut out, &mut spans, &mut words);
    out
}
