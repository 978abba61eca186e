use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SampleError;
use crate::grammar::conventions::{Construct, Role};
use crate::grammar::depth::Depths;
use crate::grammar::lexicon::{LexEntry, Pos};
use crate::grammar::pcfg::Pcfg;
use crate::grammar::production::{ProdId, Slot, Symbol};
use crate::grammar::tree::DerivationTree;

pub const REJECTION_BUDGET: usize = 10_000;
const NODE_BUDGET: usize = 4_000;

/// Where a lexical slot sits, as far as a lexical filter cares.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlotContext {
    /// Role of the nearest enclosing argument wrapper.
    pub role: Option<Role>,
    /// The slot is the whole of a bare primitive exposure.
    pub primitive: bool,
}

impl SlotContext {
    pub fn from_ancestors<'a>(lhs_chain: impl DoubleEndedIterator<Item = &'a str>, slot: &Slot) -> SlotContext {
        let mut it = lhs_chain.rev();
        let parent = it.next();
        let primitive = parent.is_some_and(|p| p.starts_with("Prim"));
        let role = if slot.pos == Pos::Verb {
            if primitive {
                Some(Role::Primitive)
            } else {
                None
            }
        } else {
            parent.into_iter().chain(it).find_map(Role::of_lhs)
        };
        SlotContext { role, primitive }
    }
}

/// Decides whether an entry may fill a slot in a given context.
pub trait LexicalFilter: Sync {
    fn admits(&self, entry: &LexEntry, slot: &Slot, ctx: &SlotContext) -> bool;
}

pub struct AdmitAll;

impl LexicalFilter for AdmitAll {
    fn admits(&self, _: &LexEntry, _: &Slot, _: &SlotContext) -> bool {
        true
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Constraints {
    pub required: Vec<String>,
    pub forbidden: Vec<String>,
    /// Allowed depths per construct; constructs not listed are unconstrained.
    pub depths: BTreeMap<Construct, Vec<u32>>,
}

impl Constraints {
    pub fn none() -> Constraints {
        Constraints::default()
    }

    pub fn depth(mut self, c: Construct, allowed: &[u32]) -> Constraints {
        self.depths.insert(c, allowed.to_vec());
        self
    }
}

#[derive(Debug)]
enum Abort {
    Forbidden(ProdId),
    TooDeep(Construct),
    Budget,
    NoLexeme(ProdId, usize),
    Dead(String),
}

struct Drawer<'a> {
    g: &'a Pcfg,
    rng: &'a mut ChaCha8Rng,
    filter: &'a dyn LexicalFilter,
    forbidden: &'a [bool],
    limits: [u32; 3],
    depth: [u32; 3],
    nodes: usize,
    ancestors: Vec<ProdId>,
}

fn construct_slot(c: Construct) -> Option<usize> {
    match c {
        Construct::Cp => Some(0),
        Construct::Pp => Some(1),
        Construct::CenterEmbedRc => Some(2),
        Construct::Adj => None,
    }
}

impl Drawer<'_> {
    fn expand(&mut self, alt: u32) -> Result<DerivationTree, Abort> {
        self.nodes += 1;
        if self.nodes > NODE_BUDGET {
            return Err(Abort::Budget);
        }
        let a = &self.g.alts[alt as usize];
        if a.total == 0 {
            return Err(Abort::Dead(a.lhs.clone()));
        }
        let mut r = self.rng.gen_range(0..a.total);
        let mut chosen = a.prods[a.prods.len() - 1];
        for (i, &w) in a.ints.iter().enumerate() {
            if r < w {
                chosen = a.prods[i];
                break;
            }
            r -= w;
        }
        if self.forbidden[chosen as usize] {
            return Err(Abort::Forbidden(chosen));
        }
        let grammar = self.g.grammar().clone();
        let prod = grammar.get(chosen);
        let construct = Construct::of_lhs(&prod.lhs).and_then(construct_slot);
        if let Some(ci) = construct {
            self.depth[ci] += 1;
            if self.depth[ci] > self.limits[ci] {
                return Err(Abort::TooDeep(Construct::ALL[ci]));
            }
        }
        self.ancestors.push(chosen);
        let mut children = Vec::with_capacity(prod.rhs.len());
        for (i, sym) in prod.rhs.iter().enumerate() {
            let child = match sym {
                Symbol::Nonterminal(nt) => match self.g.child_alt[chosen as usize][i] {
                    Some(ai) => self.expand(ai)?,
                    None => return Err(Abort::Dead(nt.clone())),
                },
                Symbol::Slot(slot) => self.lexeme(chosen, i, slot)?,
                Symbol::Literal(_) => DerivationTree::Literal,
            };
            children.push(child);
        }
        self.ancestors.pop();
        if let Some(ci) = construct {
            self.depth[ci] -= 1;
        }
        Ok(DerivationTree::Node { prod: chosen, children })
    }

    fn lexeme(&mut self, prod: ProdId, idx: usize, slot: &Slot) -> Result<DerivationTree, Abort> {
        let Some(sl) = self.g.slot_lexicon(prod, idx) else {
            return Err(Abort::NoLexeme(prod, idx));
        };
        let grammar = self.g.grammar();
        let ctx = SlotContext::from_ancestors(self.ancestors.iter().map(|&p| grammar.get(p).lhs.as_str()), slot);
        let lex = self.g.lexicon();
        let mut admitted = Vec::with_capacity(sl.entries.len());
        let mut total = 0.0;
        for (&e, &w) in sl.entries.iter().zip(&sl.weights) {
            if self.filter.admits(lex.get(e), slot, &ctx) {
                admitted.push((e, w));
                total += w;
            }
        }
        if admitted.is_empty() {
            return Err(Abort::NoLexeme(prod, idx));
        }
        let mut r = self.rng.gen::<f64>() * total;
        let mut pick = admitted[admitted.len() - 1].0;
        for &(e, w) in &admitted {
            if r < w {
                pick = e;
                break;
            }
            r -= w;
        }
        Ok(DerivationTree::Leaf { entry: pick, form: slot.form })
    }
}

pub fn sample(g: &Pcfg, seed: u64, constraints: &Constraints) -> Result<DerivationTree, SampleError> {
    sample_with(g, seed, constraints, &AdmitAll)
}

/// Draws from the grammar, rejecting derivations that break `constraints` or
/// hit a slot where the filter admits nothing.
pub fn sample_with(
    g: &Pcfg,
    seed: u64,
    constraints: &Constraints,
    filter: &dyn LexicalFilter,
) -> Result<DerivationTree, SampleError> {
    let start = g.alt_index(g.start()).ok_or_else(|| SampleError::NoStart(g.start().to_string()))?;
    let grammar = g.grammar();
    let mut forbidden = vec![false; grammar.len()];
    for id in &constraints.forbidden {
        if let Some(p) = grammar.id_of(id) {
            forbidden[p as usize] = true;
        }
    }
    let required: Vec<ProdId> = constraints.required.iter().filter_map(|id| grammar.id_of(id)).collect();
    if required.len() != constraints.required.len() || required.iter().any(|&p| !g.is_member(p)) {
        let missing = constraints
            .required
            .iter()
            .find(|id| grammar.id_of(id).is_none_or(|p| !g.is_member(p)))
            .cloned()
            .unwrap_or_default();
        return Err(SampleError::Unsatisfiable { constraint: format!("required production {missing}"), attempts: 0 });
    }
    let mut limits = [u32::MAX; 3];
    for (c, allowed) in &constraints.depths {
        if let Some(ci) = construct_slot(*c) {
            limits[ci] = allowed.iter().copied().max().unwrap_or(0);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures: BTreeMap<String, usize> = BTreeMap::new();
    for _ in 0..REJECTION_BUDGET {
        let mut d = Drawer {
            g,
            rng: &mut rng,
            filter,
            forbidden: &forbidden,
            limits,
            depth: [0; 3],
            nodes: 0,
            ancestors: Vec::new(),
        };
        let reason = match d.expand(start) {
            Ok(tree) => match check(g, &tree, &required, constraints) {
                None => return Ok(tree),
                Some(r) => r,
            },
            Err(Abort::Forbidden(p)) => format!("forbidden production {}", grammar.get(p).id),
            Err(Abort::TooDeep(c)) => format!("{c} depth in {:?}", constraints.depths[&c]),
            Err(Abort::Budget) => format!("derivation size under {NODE_BUDGET} nodes"),
            Err(Abort::NoLexeme(p, i)) => format!("lexical filter at {} in production {}", grammar.get(p).rhs[i], grammar.get(p).id),
            Err(Abort::Dead(nt)) => format!("nonterminal {nt} has no usable productions"),
        };
        *failures.entry(reason).or_default() += 1;
    }
    let constraint = failures
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(r, _)| r)
        .unwrap_or_default();
    Err(SampleError::Unsatisfiable { constraint, attempts: REJECTION_BUDGET })
}

fn check(g: &Pcfg, tree: &DerivationTree, required: &[ProdId], c: &Constraints) -> Option<String> {
    if !required.is_empty() {
        let mut seen = vec![false; required.len()];
        tree.walk(&mut |_, t| {
            if let Some(p) = t.prod() {
                if let Some(i) = required.iter().position(|&r| r == p) {
                    seen[i] = true;
                }
            }
        });
        if let Some(i) = seen.iter().position(|s| !s) {
            return Some(format!("required production {}", g.grammar().get(required[i]).id));
        }
    }
    if !c.depths.is_empty() {
        let depths = Depths::of(tree, g.grammar());
        for (construct, allowed) in &c.depths {
            if !allowed.contains(&depths.get(*construct)) {
                return Some(format!("{construct} depth in {allowed:?}"));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::grammar::lexicon::Lexicon;
    use crate::grammar::pcfg::PcfgOptions;
    use crate::grammar::production::Grammar;
    use crate::grammar::tree::yield_tokens;

    fn pcfg(text: &str, lex: &str) -> Pcfg {
        Pcfg::new(
            Arc::new(Grammar::parse(text).unwrap()),
            Arc::new(Lexicon::parse(lex).unwrap()),
            "S",
            PcfgOptions::new(1.0),
        )
    }

    #[test]
    fn degenerate_grammar_has_one_tree() {
        let g = pcfg("s\tS -> the N\t1\nn\tN -> dog\t1\n", "");
        let first = sample(&g, 0, &Constraints::none()).unwrap();
        for seed in 1..20 {
            assert_eq!(sample(&g, seed, &Constraints::none()).unwrap(), first);
        }
        assert_eq!(yield_tokens(&first, g.grammar(), g.lexicon()), vec!["the", "dog"]);
    }

    #[test]
    fn same_seed_same_tree() {
        let g = pcfg(
            "s\tS -> CommonNoun[] V\t1\nv1\tV -> ran\t0.5\nv2\tV -> slept\t0.5\n",
            "dog\tCommonNoun\t\tbase=dog\t1\ncat\tCommonNoun\t\tbase=cat\t2\n",
        );
        for seed in 0..50 {
            assert_eq!(sample(&g, seed, &Constraints::none()), sample(&g, seed, &Constraints::none()));
        }
    }

    #[test]
    fn forbidden_and_required_productions() {
        let g = pcfg("a\tS -> a\t0.7\nb\tS -> b\t0.3\n", "");
        let only_b = Constraints { forbidden: vec!["a".into()], ..Default::default() };
        let t = sample(&g, 3, &only_b).unwrap();
        assert_eq!(t.prod(), g.grammar().id_of("b"));
        let need_a = Constraints { required: vec!["a".into()], ..Default::default() };
        assert_eq!(sample(&g, 3, &need_a).unwrap().prod(), g.grammar().id_of("a"));
        let both = Constraints { required: vec!["a".into()], forbidden: vec!["a".into()], ..Default::default() };
        match sample(&g, 3, &both) {
            Err(SampleError::Unsatisfiable { constraint, .. }) => assert_eq!(constraint, "forbidden production a"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn depth_constraint_names_construct() {
        let g = pcfg("s\tS -> x\t1\n", "");
        let c = Constraints::none().depth(Construct::Cp, &[2]);
        match sample(&g, 1, &c) {
            Err(SampleError::Unsatisfiable { constraint, attempts }) => {
                assert_eq!(constraint, "cp depth in [2]");
                assert_eq!(attempts, REJECTION_BUDGET);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn filter_excludes_entries() {
        struct NoDog;
        impl LexicalFilter for NoDog {
            fn admits(&self, e: &LexEntry, _: &Slot, _: &SlotContext) -> bool {
                e.lemma != "dog"
            }
        }
        let g = pcfg(
            "s\tS -> Subj\t1\nsubj\tSubj -> CommonNoun[]\t1\n",
            "dog\tCommonNoun\t\tbase=dog\t1\ncat\tCommonNoun\t\tbase=cat\t2\n",
        );
        for seed in 0..30 {
            let t = sample_with(&g, seed, &Constraints::none(), &NoDog).unwrap();
            assert_eq!(yield_tokens(&t, g.grammar(), g.lexicon()), vec!["cat"]);
        }
    }

    #[test]
    fn slot_context_roles() {
        let slot = Slot::parse("CommonNoun[]").unwrap();
        let ctx = SlotContext::from_ancestors(["S", "Clause", "Obj", "NPmod", "PP", "Loc"].into_iter(), &slot);
        assert_eq!(ctx.role, Some(Role::Locative));
        let ctx = SlotContext::from_ancestors(["S", "Clause", "SubjA", "NPa"].into_iter(), &slot);
        assert_eq!(ctx.role, Some(Role::Subject));
        let verb = Slot::parse("Verb[form=infinitive]").unwrap();
        let ctx = SlotContext::from_ancestors(["X_p", "PrimV"].into_iter(), &verb);
        assert!(ctx.primitive);
        let ctx = SlotContext::from_ancestors(["S", "Clause", "Obj"].into_iter(), &verb);
        assert_eq!(ctx.role, None);
    }
}
