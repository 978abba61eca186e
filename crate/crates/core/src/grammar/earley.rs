use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use crate::grammar::lexicon::{EntryId, Form};
use crate::grammar::pcfg::Pcfg;
use crate::grammar::production::{ProdId, Symbol};
use crate::grammar::tree::{capitalize, DerivationTree};

/// Upper bound on the derivations returned for one sentence.
pub const MAX_DERIVATIONS: usize = 10_000;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Item {
    prod: ProdId,
    dot: u16,
    origin: u32,
}

struct Chart<'a> {
    g: &'a Pcfg,
    tokens: &'a [String],
    /// Completed constituents: (alternatives index, start) -> ends, and (alt, start, end) -> productions.
    ends: HashMap<(u32, usize), Vec<usize>>,
    complete: HashMap<(u32, usize, usize), Vec<ProdId>>,
    memo: HashMap<(u32, usize, usize), Rc<Vec<DerivationTree>>>,
    active: HashSet<(u32, usize, usize)>,
}

/// All derivations of `tokens` under `g`, found with an Earley chart over the
/// grammar as written. Sentence-initial capitals and `an` are accepted as
/// written by the yield.
pub fn parse(g: &Pcfg, tokens: &[String]) -> Vec<DerivationTree> {
    let Some(start) = g.alt_index(g.start()) else { return Vec::new() };
    if tokens.is_empty() {
        return Vec::new();
    }
    let grammar = g.grammar();
    let n = tokens.len();
    let mut sets: Vec<Vec<Item>> = vec![Vec::new(); n + 1];
    let mut seen: Vec<HashSet<Item>> = vec![HashSet::new(); n + 1];
    let mut chart = Chart {
        g,
        tokens,
        ends: HashMap::new(),
        complete: HashMap::new(),
        memo: HashMap::new(),
        active: HashSet::new(),
    };

    let push = |sets: &mut Vec<Vec<Item>>, seen: &mut Vec<HashSet<Item>>, i: usize, it: Item| {
        if seen[i].insert(it) {
            sets[i].push(it);
        }
    };
    for &p in &g.alts[start as usize].prods {
        push(&mut sets, &mut seen, 0, Item { prod: p, dot: 0, origin: 0 });
    }
    let mut predicted: Vec<HashSet<u32>> = vec![HashSet::new(); n + 1];

    for i in 0..=n {
        let mut k = 0;
        while k < sets[i].len() {
            let it = sets[i][k];
            k += 1;
            let prod = grammar.get(it.prod);
            let dot = it.dot as usize;
            if dot == prod.rhs.len() {
                let alt = g.alt_index(&prod.lhs).expect("member lhs");
                let origin = it.origin as usize;
                let key = (alt, origin, i);
                let entry = chart.complete.entry(key).or_default();
                if !entry.contains(&it.prod) {
                    if entry.is_empty() {
                        chart.ends.entry((alt, origin)).or_default().push(i);
                    }
                    entry.push(it.prod);
                }
                let waiting: Vec<Item> = sets[origin]
                    .iter()
                    .filter(|w| {
                        let wp = grammar.get(w.prod);
                        (w.dot as usize) < wp.rhs.len() && g.child_alt[w.prod as usize][w.dot as usize] == Some(alt)
                    })
                    .copied()
                    .collect();
                for w in waiting {
                    push(&mut sets, &mut seen, i, Item { dot: w.dot + 1, ..w });
                }
                continue;
            }
            match &prod.rhs[dot] {
                Symbol::Nonterminal(_) => {
                    let Some(alt) = g.child_alt[it.prod as usize][dot] else { continue };
                    if predicted[i].insert(alt) {
                        for &p in &g.alts[alt as usize].prods {
                            push(&mut sets, &mut seen, i, Item { prod: p, dot: 0, origin: i as u32 });
                        }
                    }
                }
                Symbol::Literal(_) | Symbol::Slot(_) => {
                    if i < n && !chart.terminal_matches(it.prod, dot, i).is_empty() {
                        push(&mut sets, &mut seen, i + 1, Item { dot: it.dot + 1, ..it });
                    }
                }
            }
        }
    }

    let mut out = chart.trees(start, 0, n).as_ref().clone();
    out.truncate(MAX_DERIVATIONS);
    out
}

impl Chart<'_> {
    /// Lexical readings of token `i` for the terminal at `prod.rhs[idx]`; a literal yields one `Literal`.
    fn terminal_matches(&self, prod: ProdId, idx: usize, i: usize) -> Vec<DerivationTree> {
        let tok = self.tokens[i].as_str();
        match &self.g.grammar().get(prod).rhs[idx] {
            Symbol::Literal(l) => {
                if tok == l || (i == 0 && tok == capitalize(l)) {
                    vec![DerivationTree::Literal]
                } else {
                    Vec::new()
                }
            }
            Symbol::Slot(slot) => {
                let Some(sl) = self.g.slot_lexicon(prod, idx) else { return Vec::new() };
                let mut out: Vec<(EntryId, Form)> = Vec::new();
                let mut look = |s: &str| {
                    for &(e, f) in self.g.surfaces(s) {
                        if f == slot.form && sl.contains(e) && !out.contains(&(e, f)) {
                            out.push((e, f));
                        }
                    }
                };
                look(tok);
                if tok == "an" {
                    look("a");
                }
                if i == 0 {
                    let lower: String = {
                        let mut c = tok.chars();
                        match c.next() {
                            Some(f) => f.to_lowercase().collect::<String>() + c.as_str(),
                            None => String::new(),
                        }
                    };
                    if lower != tok {
                        look(&lower);
                        if lower == "an" {
                            look("a");
                        }
                    }
                }
                out.into_iter().map(|(entry, form)| DerivationTree::Leaf { entry, form }).collect()
            }
            Symbol::Nonterminal(_) => Vec::new(),
        }
    }

    fn trees(&mut self, alt: u32, i: usize, j: usize) -> Rc<Vec<DerivationTree>> {
        if let Some(t) = self.memo.get(&(alt, i, j)) {
            return t.clone();
        }
        if !self.active.insert((alt, i, j)) {
            return Rc::new(Vec::new());
        }
        let prods = self.complete.get(&(alt, i, j)).cloned().unwrap_or_default();
        let mut out = Vec::new();
        for p in prods {
            let mut partial: Vec<Vec<DerivationTree>> = Vec::new();
            self.expand_rhs(p, 0, i, j, &mut Vec::new(), &mut partial);
            for children in partial {
                out.push(DerivationTree::Node { prod: p, children });
                if out.len() >= MAX_DERIVATIONS {
                    break;
                }
            }
        }
        self.active.remove(&(alt, i, j));
        let rc = Rc::new(out);
        self.memo.insert((alt, i, j), rc.clone());
        rc
    }

    fn expand_rhs(
        &mut self,
        p: ProdId,
        k: usize,
        a: usize,
        j: usize,
        prefix: &mut Vec<DerivationTree>,
        out: &mut Vec<Vec<DerivationTree>>,
    ) {
        if out.len() >= MAX_DERIVATIONS {
            return;
        }
        let grammar = self.g.grammar().clone();
        let rhs = &grammar.get(p).rhs;
        if k == rhs.len() {
            if a == j {
                out.push(prefix.clone());
            }
            return;
        }
        let remaining = rhs.len() - k;
        if j - a < remaining {
            return;
        }
        match &rhs[k] {
            Symbol::Nonterminal(_) => {
                let Some(alt) = self.g.child_alt[p as usize][k] else { return };
                let ends = self.ends.get(&(alt, a)).cloned().unwrap_or_default();
                for b in ends {
                    if b > j {
                        continue;
                    }
                    let subtrees = self.trees(alt, a, b);
                    for t in subtrees.iter() {
                        prefix.push(t.clone());
                        self.expand_rhs(p, k + 1, b, j, prefix, out);
                        prefix.pop();
                    }
                }
            }
            _ => {
                for t in self.terminal_matches(p, k, a) {
                    prefix.push(t);
                    self.expand_rhs(p, k + 1, a + 1, j, prefix, out);
                    prefix.pop();
                }
            }
        }
    }
}
