use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::error::ForeignProduction;
use crate::grammar::lexicon::{EntryId, Form, Lexicon};
use crate::grammar::production::{Grammar, ProdId, Ratio, Symbol};
use crate::grammar::tree::DerivationTree;

#[derive(Debug, Error, PartialEq)]
#[error("cannot build a Zipf distribution over an empty lexicon")]
pub struct EmptyLexicon;

/// `p(k) = k^-s / sum_j j^-s` for ranks 1..=n.
pub fn zipf_weights(n: usize, s: f64) -> Result<Vec<f64>, EmptyLexicon> {
    if n == 0 {
        return Err(EmptyLexicon);
    }
    let raw: Vec<f64> = (1..=n).map(|k| (k as f64).powf(-s)).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// Lexical candidates for one slot, weighted by global Zipf rank within their POS.
#[derive(Clone, Debug, Default)]
pub struct SlotLexicon {
    pub entries: Vec<EntryId>,
    pub weights: Vec<f64>,
    pub total: f64,
}

impl SlotLexicon {
    pub fn contains(&self, e: EntryId) -> bool {
        self.entries.binary_search(&e).is_ok()
    }

    pub fn probability(&self, e: EntryId) -> Option<f64> {
        let i = self.entries.binary_search(&e).ok()?;
        Some(self.weights[i] / self.total)
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Alternatives {
    pub lhs: String,
    pub prods: Vec<ProdId>,
    /// Integer weights over a common denominator so draws are exact.
    pub ints: Vec<u128>,
    pub total: u128,
    pub raw_sum: Ratio,
}

#[derive(Clone, Debug, Default)]
pub struct PcfgOptions {
    pub zipf_exponent: f64,
    /// Lemmas admissible in `target` slots.
    pub targets: BTreeSet<String>,
}

impl PcfgOptions {
    pub fn new(zipf_exponent: f64) -> PcfgOptions {
        PcfgOptions { zipf_exponent, targets: BTreeSet::new() }
    }

    pub fn with_targets<I: IntoIterator<Item = S>, S: Into<String>>(mut self, targets: I) -> PcfgOptions {
        self.targets = targets.into_iter().map(Into::into).collect();
        self
    }
}

/// A weighted grammar instance: a production bank, a lexicon, a start symbol
/// and the set of productions that take part.
#[derive(Clone, Debug)]
pub struct Pcfg {
    grammar: Arc<Grammar>,
    lexicon: Arc<Lexicon>,
    start: String,
    options: PcfgOptions,
    member: Vec<bool>,
    pub(crate) alts: Vec<Alternatives>,
    alt_of_lhs: HashMap<String, u32>,
    /// For each production and rhs position: alternatives index of a nonterminal child.
    pub(crate) child_alt: Vec<Vec<Option<u32>>>,
    /// For each production and rhs position: lexical candidates of a slot.
    pub(crate) slot_lex: Vec<Vec<Option<Arc<SlotLexicon>>>>,
    surface_index: Arc<HashMap<String, Vec<(EntryId, Form)>>>,
}

impl Pcfg {
    /// Every production of the bank takes part.
    pub fn new(grammar: Arc<Grammar>, lexicon: Arc<Lexicon>, start: &str, options: PcfgOptions) -> Pcfg {
        let member = vec![true; grammar.len()];
        Pcfg::build(grammar, lexicon, start, options, member)
    }

    /// Only productions reachable from `start` take part.
    pub fn reachable(grammar: Arc<Grammar>, lexicon: Arc<Lexicon>, start: &str, options: PcfgOptions) -> Pcfg {
        let mut member = vec![false; grammar.len()];
        let mut seen: HashSet<&str> = HashSet::new();
        let mut stack = vec![start];
        while let Some(nt) = stack.pop() {
            if !seen.insert(nt) {
                continue;
            }
            for &p in grammar.alternatives(nt) {
                member[p as usize] = true;
                for s in &grammar.get(p).rhs {
                    if let Symbol::Nonterminal(c) = s {
                        stack.push(c);
                    }
                }
            }
        }
        Pcfg::build(grammar.clone(), lexicon, start, options, member)
    }

    fn build(grammar: Arc<Grammar>, lexicon: Arc<Lexicon>, start: &str, options: PcfgOptions, member: Vec<bool>) -> Pcfg {
        let mut alts = Vec::new();
        let mut alt_of_lhs = HashMap::new();
        for nt in grammar.nonterminals() {
            let prods: Vec<ProdId> = grammar.alternatives(nt).iter().copied().filter(|&p| member[p as usize]).collect();
            if prods.is_empty() {
                continue;
            }
            let weights: Vec<Ratio> = prods.iter().map(|&p| grammar.get(p).weight).collect();
            let lcm = weights.iter().fold(1u128, |acc, w| acc / gcd(acc, w.den) * w.den);
            let ints: Vec<u128> = weights.iter().map(|w| w.num * (lcm / w.den)).collect();
            let total = ints.iter().sum();
            let raw_sum = weights.iter().fold(Ratio::ZERO, |a, &w| a + w);
            alt_of_lhs.insert(nt.to_string(), alts.len() as u32);
            alts.push(Alternatives { lhs: nt.to_string(), prods, ints, total, raw_sum });
        }

        let mut cache: HashMap<String, Arc<SlotLexicon>> = HashMap::new();
        let mut child_alt = Vec::with_capacity(grammar.len());
        let mut slot_lex = Vec::with_capacity(grammar.len());
        for (i, p) in grammar.productions().iter().enumerate() {
            if !member[i] {
                child_alt.push(Vec::new());
                slot_lex.push(Vec::new());
                continue;
            }
            let mut ca = Vec::with_capacity(p.rhs.len());
            let mut sl = Vec::with_capacity(p.rhs.len());
            for s in &p.rhs {
                match s {
                    Symbol::Nonterminal(nt) => {
                        ca.push(alt_of_lhs.get(nt).copied());
                        sl.push(None);
                    }
                    Symbol::Slot(slot) => {
                        ca.push(None);
                        let key = slot.to_string();
                        let entry = cache.entry(key).or_insert_with(|| {
                            let mut entries = Vec::new();
                            let mut weights = Vec::new();
                            for (id, e) in lexicon.entries().iter().enumerate() {
                                if slot.admits(e) && (!slot.target || options.targets.contains(&e.lemma)) {
                                    entries.push(id as EntryId);
                                    weights.push((e.zipf_rank as f64).powf(-options.zipf_exponent));
                                }
                            }
                            let total = weights.iter().sum();
                            Arc::new(SlotLexicon { entries, weights, total })
                        });
                        sl.push(Some(entry.clone()));
                    }
                    Symbol::Literal(_) => {
                        ca.push(None);
                        sl.push(None);
                    }
                }
            }
            child_alt.push(ca);
            slot_lex.push(sl);
        }

        let mut surface_index: HashMap<String, Vec<(EntryId, Form)>> = HashMap::new();
        for (id, e) in lexicon.entries().iter().enumerate() {
            let mut forms: Vec<(Form, &str)> = e.forms.iter().map(|(f, s)| (*f, s.as_str())).collect();
            if !e.forms.contains_key(&Form::Base) {
                forms.push((Form::Base, e.lemma.as_str()));
            }
            for (f, s) in forms {
                surface_index.entry(s.to_string()).or_default().push((id as EntryId, f));
            }
        }

        Pcfg {
            grammar,
            lexicon,
            start: start.to_string(),
            options,
            member,
            alts,
            alt_of_lhs,
            child_alt,
            slot_lex,
            surface_index: Arc::new(surface_index),
        }
    }

    pub fn grammar(&self) -> &Arc<Grammar> {
        &self.grammar
    }

    pub fn lexicon(&self) -> &Arc<Lexicon> {
        &self.lexicon
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    pub fn zipf_exponent(&self) -> f64 {
        self.options.zipf_exponent
    }

    pub fn targets(&self) -> &BTreeSet<String> {
        &self.options.targets
    }

    pub fn options(&self) -> &PcfgOptions {
        &self.options
    }

    pub fn is_member(&self, p: ProdId) -> bool {
        self.member.get(p as usize).copied().unwrap_or(false)
    }

    pub fn members(&self) -> impl Iterator<Item = ProdId> + '_ {
        self.member.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i as ProdId)
    }

    pub(crate) fn alt_index(&self, lhs: &str) -> Option<u32> {
        self.alt_of_lhs.get(lhs).copied()
    }

    pub(crate) fn surfaces(&self, token: &str) -> &[(EntryId, Form)] {
        self.surface_index.get(token).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Normalized probability of choosing `p` among its lhs alternatives.
    pub fn production_probability(&self, p: ProdId) -> Option<f64> {
        if !self.is_member(p) {
            return None;
        }
        let a = &self.alts[self.alt_of_lhs[&self.grammar.get(p).lhs] as usize];
        let i = a.prods.iter().position(|&q| q == p)?;
        if a.total == 0 {
            return Some(0.0);
        }
        Some(a.ints[i] as f64 / a.total as f64)
    }

    pub fn slot_lexicon(&self, p: ProdId, idx: usize) -> Option<&SlotLexicon> {
        self.slot_lex.get(p as usize)?.get(idx)?.as_deref()
    }

    /// Product of production probabilities and Zipf lexical probabilities along `t`.
    pub fn derivation_probability(&self, t: &DerivationTree) -> Result<f64, ForeignProduction> {
        match t {
            DerivationTree::Node { prod, children } => {
                let mut p = self
                    .production_probability(*prod)
                    .ok_or_else(|| ForeignProduction(self.grammar.get(*prod).id.clone()))?;
                for (i, c) in children.iter().enumerate() {
                    match c {
                        DerivationTree::Leaf { entry, .. } => {
                            let lexp = self
                                .slot_lexicon(*prod, i)
                                .and_then(|sl| sl.probability(*entry))
                                .ok_or_else(|| ForeignProduction(self.lexicon.get(*entry).lemma.clone()))?;
                            p *= lexp;
                        }
                        DerivationTree::Node { .. } => p *= self.derivation_probability(c)?,
                        DerivationTree::Literal => {}
                    }
                }
                Ok(p)
            }
            DerivationTree::Leaf { entry, .. } => Err(ForeignProduction(self.lexicon.get(*entry).lemma.clone())),
            DerivationTree::Literal => Ok(1.0),
        }
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Violations found by [`validate_grammar`]; empty means the instance is sound.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_grammar(g: &Pcfg) -> ValidationReport {
    let grammar = g.grammar();
    let lex = g.lexicon();
    let mut v = Vec::new();

    for a in &g.alts {
        if a.raw_sum != Ratio::ONE {
            v.push(format!("lhs {} sums to {}", a.lhs, a.raw_sum));
        }
    }

    // nonterminals referenced but never defined
    let mut undefined = BTreeSet::new();
    for p in g.members() {
        for s in &grammar.get(p).rhs {
            if let Symbol::Nonterminal(nt) = s {
                if g.alt_index(nt).is_none() {
                    undefined.insert(nt.clone());
                }
            }
        }
    }

    // slot coverage
    for p in g.members() {
        let prod = grammar.get(p);
        for (i, s) in prod.rhs.iter().enumerate() {
            let Symbol::Slot(slot) = s else { continue };
            let cands = g.slot_lexicon(p, i).map(|c| c.entries.len()).unwrap_or(0);
            if cands == 0 {
                v.push(format!("dangling slot {slot} in production {}", prod.id));
            }
            for e in lex.entries() {
                if slot.matches_features(e)
                    && (!slot.target || g.targets().contains(&e.lemma))
                    && e.surface(slot.form).is_none()
                {
                    v.push(format!("missing {} form for {} {} (production {})", slot.form, e.pos, e.lemma, prod.id));
                }
            }
        }
    }

    // productivity fixpoint
    let mut productive: HashSet<&str> = HashSet::new();
    loop {
        let mut changed = false;
        for p in g.members() {
            let prod = grammar.get(p);
            if productive.contains(prod.lhs.as_str()) {
                continue;
            }
            let ok = prod.rhs.iter().enumerate().all(|(i, s)| match s {
                Symbol::Nonterminal(nt) => productive.contains(nt.as_str()),
                Symbol::Slot(_) => g.slot_lexicon(p, i).is_some_and(|c| !c.entries.is_empty()),
                Symbol::Literal(_) => true,
            });
            if ok {
                productive.insert(prod.lhs.as_str());
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for nt in &undefined {
        v.push(format!("unproductive {nt}"));
    }
    for a in &g.alts {
        if !productive.contains(a.lhs.as_str()) {
            v.push(format!("unproductive {}", a.lhs));
        }
    }

    // reachability
    if g.alt_index(g.start()).is_none() {
        v.push(format!("start symbol {} has no productions", g.start()));
    }
    let mut reached: HashSet<&str> = HashSet::new();
    let mut stack = vec![g.start()];
    while let Some(nt) = stack.pop() {
        if !reached.insert(nt) {
            continue;
        }
        if let Some(ai) = g.alt_index(nt) {
            for &p in &g.alts[ai as usize].prods {
                for s in &grammar.get(p).rhs {
                    if let Symbol::Nonterminal(c) = s {
                        stack.push(c);
                    }
                }
            }
        }
    }
    for a in &g.alts {
        if !reached.contains(a.lhs.as_str()) {
            v.push(format!("unreachable {}", a.lhs));
        }
    }

    v.extend(lex.violations());
    ValidationReport { violations: v }
}
