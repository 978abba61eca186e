//! The 42 generalization patterns: what each holds out of training, how its
//! generalization and exposure sentences are drawn, and which constituent
//! partial matching looks at.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::{Analysis, ModifierKind};
use crate::config::Counts;
use crate::grammar::conventions::Construct;
use crate::grammar::{DerivationTree, Depths, Form, Grammar, LexEntry, LexicalFilter, Lexicon, Pos, Role, Slot, SlotContext};
use crate::transduction::SentencePair;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    PrimitiveSubstitution,
    TenseAlternation,
    PrimitiveStructuralAlternation,
    PhraseRecombination,
    RecursionDepthAlternation,
    GapPositionRecombination,
    WhStructuralAlternation,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::PrimitiveSubstitution,
        Category::TenseAlternation,
        Category::PrimitiveStructuralAlternation,
        Category::PhraseRecombination,
        Category::RecursionDepthAlternation,
        Category::GapPositionRecombination,
        Category::WhStructuralAlternation,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Lexical,
    LexicalMorphological,
    Structural,
}

impl Group {
    pub const ALL: [Group; 3] = [Group::Lexical, Group::LexicalMorphological, Group::Structural];

    pub fn as_str(self) -> &'static str {
        match self {
            Group::Lexical => "lexical",
            Group::LexicalMorphological => "lexical_morphological",
            Group::Structural => "structural",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phrase {
    Pp,
    Relative,
    Adjective,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WhShape {
    IndirectObject,
    ActiveSubject,
    PassiveSubject,
    DitransitiveObject,
    SubjectWithPp,
    LongMovement,
}

/// What training must not contain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Held {
    /// Target nouns occur in training only in this role.
    NounOnlyAs(Role),
    /// Targets occur in training only as bare one-word sentences.
    PrimitiveOnly,
    /// Target verbs never occur in the present tense.
    NotPresent,
    /// Target verbs never occur in the present tense in these frames.
    NotPresentIn(&'static [&'static str]),
    NotPassive,
    OnlyPassive,
    OnlyFrame(&'static str),
    NotFrame(&'static str),
    /// No such modifier on an argument with this role in a declarative main or complement clause.
    Modifier(Phrase, Role),
    /// Depth 3 (shallower) or 5 and beyond (deeper) of a construct.
    Depth(Construct, bool),
    RelativeGap(Role),
    Wh(WhShape),
}

impl Held {
    /// Whether a training occurrence of a target lexeme is licensed.
    pub fn licenses(self, slot: &Slot, ctx: &SlotContext) -> bool {
        let present = slot.form == Form::Present;
        match self {
            Held::NounOnlyAs(r) => ctx.role == Some(r),
            Held::PrimitiveOnly => ctx.primitive,
            Held::NotPresent => !present,
            Held::NotPresentIn(frames) => !(present && slot.frame().is_some_and(|f| frames.contains(&f))),
            Held::NotPassive => slot.form != Form::Passive,
            Held::OnlyPassive => slot.form == Form::Passive,
            Held::OnlyFrame(f) => slot.frame() == Some(f),
            Held::NotFrame(f) => slot.frame() != Some(f),
            _ => true,
        }
    }

    pub fn is_lexical(self) -> bool {
        !matches!(self, Held::Modifier(..) | Held::Depth(..) | Held::RelativeGap(_) | Held::Wh(_))
    }

    /// Whether a tree realizes the held-out structure.
    pub fn realized_by(self, a: &Analysis) -> bool {
        match self {
            Held::Modifier(phrase, role) => a.modifiers.iter().any(|m| {
                let kind = match m.kind {
                    ModifierKind::Pp => Phrase::Pp,
                    ModifierKind::Relative(_) => Phrase::Relative,
                    ModifierKind::Adjective => Phrase::Adjective,
                };
                kind == phrase && m.host_role == Some(role) && !m.host_in_relative && !m.in_question
            }),
            Held::Depth(c, deeper) => {
                let d = a.depths.get(c);
                if deeper {
                    d >= 5
                } else {
                    d == 3
                }
            }
            Held::RelativeGap(r) => a.relative_gaps.contains(&r),
            Held::Wh(shape) => a.questions.iter().any(|q| match shape {
                WhShape::IndirectObject => q.wh_role == Some(Role::IndirectObject),
                WhShape::ActiveSubject => {
                    q.wh_role == Some(Role::Subject) && !q.passive && q.frame.as_deref() != Some("transitive")
                }
                WhShape::PassiveSubject => q.passive,
                WhShape::DitransitiveObject => {
                    q.wh_role == Some(Role::DirectObject)
                        && matches!(q.frame.as_deref(), Some("ditransitive_DO" | "ditransitive_PP"))
                }
                WhShape::SubjectWithPp => q.subject_pp,
                WhShape::LongMovement => q.long_movement,
            }),
            _ => false,
        }
    }
}

/// Which part of a generalization sentence partial matching checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constituent {
    /// The leaf filling the target slot.
    TargetLeaf,
    /// The first node expanding one of these nonterminals.
    Phrase(&'static [&'static str]),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExposureMode {
    /// Cycle through the target lexemes; at least one sentence each.
    Targets,
    /// Cycle through the training depths 1, 2 and 4 of a construct.
    Depths(Construct),
    Plain,
}

#[derive(Clone, Debug)]
pub struct PatternSpec {
    pub id: &'static str,
    pub category: Category,
    pub group: Group,
    pub held: Held,
    pub target_pos: Option<Pos>,
    pub targets: &'static [&'static str],
    /// Generalization sentences per pattern at scale 1 (full or reduced count).
    pub reduced: bool,
    pub partial: Option<Constituent>,
    pub cp_embedding: bool,
    pub exposure: ExposureMode,
}

impl PatternSpec {
    pub fn partial_evaluable(&self) -> bool {
        self.partial.is_some()
    }

    pub fn gen_count(&self, counts: &Counts) -> usize {
        if self.reduced {
            counts.gen_reduced
        } else {
            counts.gen
        }
    }

    pub fn gen_start(&self) -> String {
        format!("G_{}", self.id)
    }

    pub fn gen_cp_start(&self) -> String {
        format!("GC_{}", self.id)
    }

    pub fn exposure_start(&self) -> String {
        format!("X_{}", self.id)
    }

    /// Depths generalization sentences must have.
    pub fn gen_depth(&self) -> Option<(Construct, &'static [u32])> {
        match self.held {
            Held::Depth(c, false) => Some((c, &[3])),
            Held::Depth(c, true) => Some((c, &[5, 6])),
            _ => None,
        }
    }

    pub fn is_target(&self, e: &LexEntry) -> bool {
        self.target_pos == Some(e.pos) && self.targets.contains(&e.lemma.as_str())
    }
}

const SUBJ_TO_OBJ_COMMON: &[&str] = &["goat", "hen", "tiger", "clown", "lawyer"];
const SUBJ_TO_OBJ_PROPER: &[&str] = &["Chris", "Jordan", "Max", "Iris", "Kevin"];
const OBJ_TO_SUBJ_COMMON: &[&str] = &["panda", "duck", "fox", "chef", "poet"];
const OBJ_TO_SUBJ_PROPER: &[&str] = &["Taylor", "Ethan", "Morgan", "Mia", "Ruby"];
const PRIM_TO_SUBJ_COMMON: &[&str] = &["thief", "banker", "pig", "director", "wolf"];
const PRIM_TO_SUBJ_PROPER: &[&str] = &["Coco", "Amelia", "Omar", "Harper", "Laura"];
const PRIM_TO_OBJ_COMMON: &[&str] = &["trainer", "bunny", "mayor", "mouse", "dancer"];
const PRIM_TO_OBJ_PROPER: &[&str] = &["Nova", "Evelyn", "Riley", "Felix", "Hugo"];
const PRIM_TO_INF_VERB: &[&str] = &["jump", "dance", "sneeze", "hop", "skate"];

fn spec(
    id: &'static str,
    category: Category,
    group: Group,
    held: Held,
    target_pos: Option<Pos>,
    targets: &'static [&'static str],
    partial: Option<Constituent>,
) -> PatternSpec {
    let exposure = match (held, targets.is_empty()) {
        (_, false) => ExposureMode::Targets,
        (Held::Depth(c, _), true) => ExposureMode::Depths(c),
        _ => ExposureMode::Plain,
    };
    let question = matches!(held, Held::Wh(_));
    let cp_recursion = matches!(held, Held::Depth(Construct::Cp, _));
    PatternSpec {
        id,
        category,
        group,
        held,
        target_pos,
        targets,
        reduced: question || cp_recursion,
        partial,
        cp_embedding: !(question || cp_recursion),
        exposure,
    }
}

/// The full inventory, in table order.
pub fn all() -> Vec<PatternSpec> {
    use Category::*;
    use Group::*;
    let leaf = Some(Constituent::TargetLeaf);
    let ps = PrimitiveSubstitution;
    let ta = TenseAlternation;
    let sa = PrimitiveStructuralAlternation;
    let pr = PhraseRecombination;
    let rd = RecursionDepthAlternation;
    let cn = Some(Pos::CommonNoun);
    let pn = Some(Pos::ProperNoun);
    let v = Some(Pos::Verb);
    let subj = Held::NounOnlyAs(Role::Subject);
    let obj = Held::NounOnlyAs(Role::DirectObject);
    let prim = Held::PrimitiveOnly;
    let ditrans: &[&str] = &["ditransitive_DO", "ditransitive_PP"];
    let phrase = |lhs: &'static [&'static str]| Some(Constituent::Phrase(lhs));
    let depth = |id, c, deeper, partial| spec(id, rd, Structural, Held::Depth(c, deeper), None, &[], partial);
    let wh = |id, shape| spec(id, WhStructuralAlternation, Structural, Held::Wh(shape), None, &[], None);
    vec![
        spec("subj_to_obj_common", ps, Lexical, subj, cn, SUBJ_TO_OBJ_COMMON, leaf),
        spec("subj_to_obj_proper", ps, Lexical, subj, pn, SUBJ_TO_OBJ_PROPER, leaf),
        spec("obj_to_subj_common", ps, Lexical, obj, cn, OBJ_TO_SUBJ_COMMON, leaf),
        spec("obj_to_subj_proper", ps, Lexical, obj, pn, OBJ_TO_SUBJ_PROPER, leaf),
        spec("prim_to_subj_common", ps, Lexical, prim, cn, PRIM_TO_SUBJ_COMMON, leaf),
        spec("prim_to_subj_proper", ps, Lexical, prim, pn, PRIM_TO_SUBJ_PROPER, leaf),
        spec("prim_to_obj_common", ps, Lexical, prim, cn, PRIM_TO_OBJ_COMMON, leaf),
        spec("prim_to_obj_proper", ps, Lexical, prim, pn, PRIM_TO_OBJ_PROPER, leaf),
        spec("prim_to_inf_verb", ps, Lexical, prim, v, PRIM_TO_INF_VERB, None),
        spec("present_ditransitive", ta, LexicalMorphological, Held::NotPresent, v, &["lend", "return", "offer", "pass", "rent"], leaf),
        spec("present_infinitive", ta, LexicalMorphological, Held::NotPresent, v, &["want", "try", "plan", "need", "forget"], leaf),
        spec("present_complement", ta, LexicalMorphological, Held::NotPresent, v, &["hope", "claim", "wish", "suppose", "think"], leaf),
        spec(
            "transitive_to_present_ditransitive",
            ta,
            LexicalMorphological,
            Held::NotPresentIn(ditrans),
            v,
            &["show", "serve", "pour", "forward", "sell"],
            leaf,
        ),
        spec(
            "transitive_to_present_infinitive",
            ta,
            LexicalMorphological,
            Held::NotPresentIn(&["inf_taking"]),
            v,
            &["prepare", "attempt", "prefer", "hate", "begin"],
            leaf,
        ),
        spec(
            "transitive_to_present_complement",
            ta,
            LexicalMorphological,
            Held::NotPresentIn(&["cp_taking"]),
            v,
            &["learn", "notice", "confirm", "remember", "hear"],
            leaf,
        ),
        spec("active_to_passive", sa, LexicalMorphological, Held::NotPassive, v, &["move", "touch", "lift", "wash", "pull"], leaf),
        spec("passive_to_active", sa, LexicalMorphological, Held::OnlyPassive, v, &["drop", "kick", "squeeze", "tow", "poke"], leaf),
        spec(
            "obj_omitted_to_transitive",
            sa,
            LexicalMorphological,
            Held::OnlyFrame("obj_omitted"),
            v,
            &["write", "sketch", "knit", "hunt", "nurse"],
            leaf,
        ),
        spec(
            "unaccusative_to_transitive",
            sa,
            LexicalMorphological,
            Held::OnlyFrame("unaccusative"),
            v,
            &["explode", "shatter", "melt", "collapse", "bend"],
            leaf,
        ),
        spec("double_obj_to_pp", sa, Lexical, Held::NotFrame("ditransitive_PP"), v, &["grant", "award", "feed", "promise", "assign"], leaf),
        spec("pp_to_double_obj", sa, Lexical, Held::NotFrame("ditransitive_DO"), v, &["gift", "loan", "mail", "ship", "deliver"], leaf),
        spec("pp_in_subj", pr, Structural, Held::Modifier(Phrase::Pp, Role::Subject), None, &[], phrase(&["SubjPP", "SubjPPA"])),
        spec("pp_in_iobj", pr, Structural, Held::Modifier(Phrase::Pp, Role::IndirectObject), None, &[], phrase(&["IObjPP"])),
        spec("rc_in_subj", pr, Structural, Held::Modifier(Phrase::Relative, Role::Subject), None, &[], phrase(&["SubjRC"])),
        spec("rc_in_iobj", pr, Structural, Held::Modifier(Phrase::Relative, Role::IndirectObject), None, &[], phrase(&["IObjRC"])),
        spec("adj_in_subj", pr, Structural, Held::Modifier(Phrase::Adjective, Role::Subject), None, &[], phrase(&["SubjAdj"])),
        spec("adj_in_iobj", pr, Structural, Held::Modifier(Phrase::Adjective, Role::IndirectObject), None, &[], phrase(&["IObjAdj"])),
        depth("cp_shallower", Construct::Cp, false, None),
        depth("pp_shallower", Construct::Pp, false, phrase(&["ObjPPR"])),
        depth("ce_shallower", Construct::CenterEmbedRc, false, None),
        depth("adj_shallower", Construct::Adj, false, phrase(&["ObjAdjR"])),
        depth("cp_deeper", Construct::Cp, true, None),
        depth("pp_deeper", Construct::Pp, true, phrase(&["ObjPPR"])),
        depth("ce_deeper", Construct::CenterEmbedRc, true, None),
        depth("adj_deeper", Construct::Adj, true, phrase(&["ObjAdjR"])),
        spec("iobj_rc", GapPositionRecombination, Structural, Held::RelativeGap(Role::IndirectObject), None, &[], phrase(&["ObjRCI"])),
        spec("iobj_wh", GapPositionRecombination, Structural, Held::Wh(WhShape::IndirectObject), None, &[], None),
        wh("wh_active_subject", WhShape::ActiveSubject),
        wh("wh_passive_subject", WhShape::PassiveSubject),
        wh("wh_dobj_ditransitive", WhShape::DitransitiveObject),
        wh("wh_subject_with_pp", WhShape::SubjectWithPp),
        wh("wh_long_movement", WhShape::LongMovement),
    ]
}

/// Target lexemes keyed by (part of speech, lemma), mapped to their pattern.
#[derive(Clone, Debug)]
pub struct Inventory {
    pub patterns: Vec<PatternSpec>,
    targets: HashMap<(Pos, String), usize>,
}

impl Default for Inventory {
    fn default() -> Self {
        Inventory::new(all())
    }
}

impl Inventory {
    pub fn new(patterns: Vec<PatternSpec>) -> Inventory {
        let mut targets = HashMap::new();
        for (i, p) in patterns.iter().enumerate() {
            if let Some(pos) = p.target_pos {
                for t in p.targets {
                    targets.insert((pos, t.to_string()), i);
                }
            }
        }
        Inventory { patterns, targets }
    }

    pub fn get(&self, id: &str) -> Option<&PatternSpec> {
        self.patterns.iter().find(|p| p.id == id)
    }

    /// The pattern an entry is a target lexeme of.
    pub fn target_of(&self, e: &LexEntry) -> Option<&PatternSpec> {
        self.targets.get(&(e.pos, e.lemma.clone())).map(|&i| &self.patterns[i])
    }

    /// Training-side filter: target lexemes only in their licensed uses.
    pub fn train_filter(&self) -> TrainFilter<'_> {
        TrainFilter(self)
    }

    /// Generalization-side filter: no target lexeme outside a target slot.
    pub fn gen_filter(&self) -> GenFilter<'_> {
        GenFilter(self)
    }

    /// Patterns whose held-out combination a training tree realizes.
    pub fn leaks(&self, a: &Analysis, g: &Grammar, lex: &Lexicon) -> Vec<&'static str> {
        let mut out = Vec::new();
        for u in &a.uses {
            if let Some(p) = self.target_of(lex.get(u.entry)) {
                if !p.held.licenses(u.slot(g), &u.ctx) {
                    out.push(p.id);
                }
            }
        }
        for p in &self.patterns {
            if !p.held.is_lexical() && p.held.realized_by(a) {
                out.push(p.id);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

pub struct TrainFilter<'a>(&'a Inventory);

impl LexicalFilter for TrainFilter<'_> {
    fn admits(&self, e: &LexEntry, slot: &Slot, ctx: &SlotContext) -> bool {
        self.0.target_of(e).is_none_or(|p| p.held.licenses(slot, ctx))
    }
}

pub struct GenFilter<'a>(&'a Inventory);

impl LexicalFilter for GenFilter<'_> {
    fn admits(&self, e: &LexEntry, slot: &Slot, _: &SlotContext) -> bool {
        slot.target || self.0.target_of(e).is_none()
    }
}

/// What partial matching needs to know about a generalization sentence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    /// Reference target tokens of the checked constituent.
    pub constituent: Option<Vec<String>>,
    pub expected_role: Option<Role>,
    pub depth: Depths,
    pub in_cp: bool,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
#[error("pattern {pattern}: {msg}")]
pub struct AnnotationError {
    pub pattern: String,
    pub msg: String,
}

/// Annotation of a generalization tree of `p`.
pub fn annotate(
    p: &PatternSpec,
    t: &DerivationTree,
    pair: &SentencePair,
    g: &Grammar,
    lex: &Lexicon,
    a: &Analysis,
) -> Result<Annotation, AnnotationError> {
    let err = |msg: String| AnnotationError { pattern: p.id.to_string(), msg };
    let lhs_at = |path: &[usize]| t.at(path).and_then(|n| n.prod()).map(|q| g.get(q).lhs.as_str());
    let located: Option<(Vec<usize>, Option<Role>)> = match p.partial {
        None => None,
        Some(Constituent::TargetLeaf) => {
            let u = a
                .uses
                .iter()
                .find(|u| u.slot(g).target && p.is_target(lex.get(u.entry)))
                .ok_or_else(|| err("no target lexeme in the sentence".into()))?;
            let role = if u.slot(g).pos == Pos::Verb { None } else { u.ctx.role };
            Some((u.path.clone(), role))
        }
        Some(Constituent::Phrase(names)) => {
            let mut found = None;
            t.walk(&mut |path, _| {
                if found.is_none() {
                    if let Some(l) = lhs_at(path).filter(|l| names.contains(l)) {
                        found = Some((path.to_vec(), Role::of_lhs(l)));
                    }
                }
            });
            Some(found.ok_or_else(|| err(format!("no {names:?} constituent")))?)
        }
    };
    let in_cp = |path: &[usize]| (0..path.len()).any(|k| lhs_at(&path[..k]).is_some_and(|l| l.starts_with("CPG")));
    Ok(match located {
        None => Annotation { constituent: None, expected_role: None, depth: a.depths, in_cp: in_cp_tree(t, g) },
        Some((path, role)) => {
            let tokens = pair
                .target_of(&path)
                .filter(|s| !s.is_empty())
                .ok_or_else(|| err(format!("constituent at {path:?} has no target tokens")))?;
            Annotation { constituent: Some(tokens.to_vec()), expected_role: role, depth: a.depths, in_cp: in_cp(&path) }
        }
    })
}

fn in_cp_tree(t: &DerivationTree, g: &Grammar) -> bool {
    let mut any = false;
    t.walk(&mut |_, n| {
        if let Some(p) = n.prod() {
            any |= g.get(p).lhs.starts_with("CPG");
        }
    });
    any
}

/// Start symbols of the pattern's generalization and exposure grammars.
pub fn start_symbols(p: &PatternSpec, g: &Grammar) -> Vec<String> {
    let mut out = vec![p.gen_start(), p.exposure_start()];
    if p.cp_embedding {
        out.push(p.gen_cp_start());
    }
    out.retain(|s| !g.alternatives(s).is_empty());
    out
}
