//! Structural facts about a derivation that auditing, annotation and the
//! naturalizer read: lexical uses in context, modifiers and their hosts,
//! question shapes, relative-clause gaps, and verb-argument pairs.

use crate::grammar::conventions::{is_adjective_stack, is_long_movement_gap, is_question, is_relative, relative_gap};
use crate::grammar::{
    Construct, DerivationTree, Depths, EntryId, Form, Grammar, Lexicon, Pos, ProdId, Role, Slot, SlotContext, Symbol,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexUse {
    pub path: Vec<usize>,
    pub entry: EntryId,
    pub prod: ProdId,
    pub index: usize,
    pub ctx: SlotContext,
    pub in_question: bool,
}

impl LexUse {
    pub fn slot<'g>(&self, g: &'g Grammar) -> &'g Slot {
        match &g.get(self.prod).rhs[self.index] {
            Symbol::Slot(s) => s,
            _ => unreachable!("lexical use points at a slot"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModifierKind {
    Pp,
    Relative(Role),
    Adjective,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Modifier {
    pub kind: ModifierKind,
    pub path: Vec<usize>,
    /// Role of the noun phrase the modifier attaches to.
    pub host_role: Option<Role>,
    /// The host noun phrase is an argument of a relative clause.
    pub host_in_relative: bool,
    pub in_question: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Question {
    pub path: Vec<usize>,
    pub wh_role: Option<Role>,
    pub frame: Option<String>,
    pub passive: bool,
    pub long_movement: bool,
    pub subject_pp: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Analysis {
    pub uses: Vec<LexUse>,
    pub modifiers: Vec<Modifier>,
    pub questions: Vec<Question>,
    pub relative_gaps: Vec<Role>,
    pub depths: Depths,
}

fn lhs_at<'g>(t: &DerivationTree, g: &'g Grammar, path: &[usize]) -> Option<&'g str> {
    t.at(path).and_then(|n| n.prod()).map(|p| g.get(p).lhs.as_str())
}

fn is_clause(g: &Grammar, p: ProdId) -> bool {
    g.get(p).verb_slot().is_some()
}

/// Nearest proper ancestor (by path prefix) satisfying `f`.
fn nearest_ancestor(path: &[usize], mut f: impl FnMut(&[usize]) -> bool) -> Option<Vec<usize>> {
    (0..path.len()).rev().map(|k| &path[..k]).find(|p| f(p)).map(|p| p.to_vec())
}

pub fn analyze(t: &DerivationTree, g: &Grammar) -> Analysis {
    let mut a = Analysis { depths: Depths::of(t, g), ..Analysis::default() };
    let in_question = |path: &[usize]| (0..path.len()).any(|k| lhs_at(t, g, &path[..k]).is_some_and(is_question));
    let role_of = |p: &[usize]| lhs_at(t, g, p).and_then(Role::of_lhs);
    let host = |path: &[usize]| -> (Option<Role>, bool) {
        let Some(rp) = nearest_ancestor(path, |p| role_of(p).is_some()) else { return (None, false) };
        let role = role_of(&rp);
        let clause = nearest_ancestor(&rp, |p| t.at(p).and_then(|n| n.prod()).is_some_and(|q| is_clause(g, q)));
        let rel = clause.is_some_and(|c| lhs_at(t, g, &c).is_some_and(is_relative));
        (role, rel)
    };

    t.walk(&mut |path, node| match node {
        DerivationTree::Leaf { entry, .. } => {
            let parent = &path[..path.len() - 1];
            let prod = t.at(parent).and_then(|n| n.prod()).expect("leaf under a node");
            let index = *path.last().expect("leaf has a path");
            let Symbol::Slot(slot) = &g.get(prod).rhs[index] else { return };
            let chain: Vec<&str> = (1..=parent.len()).filter_map(|k| lhs_at(t, g, &parent[..k])).collect();
            let root = lhs_at(t, g, &[]).into_iter();
            let ctx = SlotContext::from_ancestors(root.chain(chain), slot);
            let q = in_question(path);
            if slot.pos == Pos::Adjective {
                let (host_role, host_in_relative) = host(path);
                a.modifiers.push(Modifier {
                    kind: ModifierKind::Adjective,
                    path: path.to_vec(),
                    host_role,
                    host_in_relative,
                    in_question: q,
                });
            }
            a.uses.push(LexUse { path: path.to_vec(), entry: *entry, prod, index, ctx, in_question: q });
        }
        DerivationTree::Node { prod, .. } => {
            let lhs = g.get(*prod).lhs.as_str();
            let kind = if Construct::of_lhs(lhs) == Some(Construct::Pp) {
                Some(ModifierKind::Pp)
            } else if is_relative(lhs) {
                let gap = relative_gap(lhs).unwrap_or(Role::Subject);
                a.relative_gaps.push(gap);
                Some(ModifierKind::Relative(gap))
            } else {
                None
            };
            if let Some(kind) = kind {
                let (host_role, host_in_relative) = host(path);
                a.modifiers.push(Modifier { kind, path: path.to_vec(), host_role, host_in_relative, in_question: in_question(path) });
            }
            if is_question(lhs) {
                if let Some((_, slot)) = g.get(*prod).verb_slot() {
                    a.questions.push(question(t, g, path, slot));
                }
            }
        }
        DerivationTree::Literal => {}
    });
    a
}

fn question(t: &DerivationTree, g: &Grammar, path: &[usize], verb: &Slot) -> Question {
    let node = t.at(path).expect("question node");
    let p = g.get(node.prod().expect("question is a node"));
    let mut wh_role = None;
    let mut long_movement = false;
    let mut subject_pp = false;
    for (i, (c, sym)) in node.children().iter().zip(&p.rhs).enumerate() {
        let Symbol::Nonterminal(nt) = sym else { continue };
        if is_long_movement_gap(nt) {
            long_movement = true;
        }
        let role = Role::of_lhs(nt);
        c.walk(&mut |sub, n| {
            if let DerivationTree::Leaf { .. } = n {
                let parent = t.at(&[path, &[i], &sub[..sub.len() - 1]].concat()).and_then(|x| x.prod());
                if let Some(pp) = parent {
                    if let Symbol::Slot(s) = &g.get(pp).rhs[*sub.last().unwrap()] {
                        if s.pos == Pos::WhPronoun && wh_role.is_none() {
                            wh_role = role;
                        }
                    }
                }
            }
            if role == Some(Role::Subject) {
                if let Some(q) = n.prod() {
                    if Construct::of_lhs(&g.get(q).lhs) == Some(Construct::Pp) {
                        subject_pp = true;
                    }
                }
            }
        });
    }
    Question {
        path: path.to_vec(),
        wh_role,
        frame: verb.frame().map(String::from),
        passive: verb.form == Form::Passive,
        long_movement,
        subject_pp,
    }
}

fn is_modifier(lhs: &str) -> bool {
    Construct::of_lhs(lhs) == Some(Construct::Pp) || is_relative(lhs) || is_adjective_stack(lhs)
}

/// Path of the head noun of the phrase at `path`: a noun slot of the phrase
/// itself, else the head of its first non-modifier phrase child.
pub fn head_noun(t: &DerivationTree, g: &Grammar, path: &[usize]) -> Option<Vec<usize>> {
    let node = t.at(path)?;
    let p = g.get(node.prod()?);
    for (i, sym) in p.rhs.iter().enumerate() {
        if let Symbol::Slot(s) = sym {
            if s.pos.is_noun() {
                return Some([path, &[i]].concat());
            }
        }
    }
    for (i, sym) in p.rhs.iter().enumerate() {
        if let Symbol::Nonterminal(nt) = sym {
            if !is_modifier(nt) && !nt.starts_with("CP") && !is_clause_nt(g, node, i) {
                if let Some(h) = head_noun(t, g, &[path, &[i]].concat()) {
                    return Some(h);
                }
            }
        }
    }
    None
}

fn is_clause_nt(g: &Grammar, node: &DerivationTree, i: usize) -> bool {
    node.children().get(i).and_then(|c| c.prod()).is_some_and(|p| is_clause(g, p))
}

/// Verb-argument relation used by selectional checking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ArgRelation {
    Subject,
    DirectObject,
}

/// One verb paired with the head noun of one of its arguments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerbArg {
    pub verb: Vec<usize>,
    pub noun: Vec<usize>,
    pub relation: ArgRelation,
}

/// Subject and direct-object heads of every clause. Passive subjects count as
/// direct objects unless the clause has its own object (a recipient
/// passive); the head noun of an object-gap relative clause is that clause's
/// direct object, and of a subject-gap clause its subject.
pub fn verb_args(t: &DerivationTree, g: &Grammar) -> Vec<VerbArg> {
    let mut out = Vec::new();
    t.walk(&mut |path, node| {
        let Some(prod) = node.prod() else { return };
        let p = g.get(prod);
        let Some((vi, vslot)) = p.verb_slot() else { return };
        let verb = [path, &[vi]].concat();
        let passive = vslot.form == Form::Passive;
        let mut subj = None;
        let mut obj = None;
        for (i, sym) in p.rhs.iter().enumerate() {
            let Symbol::Nonterminal(nt) = sym else { continue };
            match Role::of_lhs(nt) {
                Some(Role::Subject) if subj.is_none() => subj = head_noun(t, g, &[path, &[i]].concat()),
                Some(Role::DirectObject) if obj.is_none() => obj = head_noun(t, g, &[path, &[i]].concat()),
                _ => {}
            }
        }
        if let Some(gap) = relative_gap(&p.lhs) {
            let host = nearest_ancestor(path, |q| {
                t.at(q)
                    .and_then(|n| n.prod())
                    .is_some_and(|pp| g.get(pp).rhs.iter().any(|s| matches!(s, Symbol::Slot(sl) if sl.pos.is_noun())))
            });
            if let Some(h) = host.and_then(|h| head_noun(t, g, &h)) {
                match gap {
                    Role::Subject => subj = Some(h),
                    Role::DirectObject => obj = Some(h),
                    _ => {}
                }
            }
        }
        if passive && obj.is_none() {
            if let Some(s) = subj.take() {
                out.push(VerbArg { verb: verb.clone(), noun: s, relation: ArgRelation::DirectObject });
            }
        }
        if let Some(s) = subj {
            if !passive {
                out.push(VerbArg { verb: verb.clone(), noun: s, relation: ArgRelation::Subject });
            }
        }
        if let Some(o) = obj {
            out.push(VerbArg { verb, noun: o, relation: ArgRelation::DirectObject });
        }
    });
    out
}

/// Lemmas of content words (nouns, verbs, adjectives) that occur more than once.
pub fn duplicate_lexemes(t: &DerivationTree, g: &Grammar, lex: &Lexicon) -> Vec<String> {
    let _ = g;
    let mut seen = std::collections::BTreeMap::<(Pos, &str), usize>::new();
    t.walk(&mut |_, n| {
        if let DerivationTree::Leaf { entry, .. } = n {
            let e = lex.get(*entry);
            if e.pos.is_content() {
                *seen.entry((e.pos, e.lemma.as_str())).or_default() += 1;
            }
        }
    });
    seen.into_iter().filter(|&(_, c)| c > 1).map(|((_, l), _)| l.to_string()).collect()
}
