use compgen::grammar::{parse, yield_tokens, AdmitAll, DerivationTree, Pcfg, PcfgOptions};
use compgen::naturalizer::{naturalize, selectional_violations, Outcome, Rejection};
use compgen::Resources;

fn tree(r: &Resources, english: &str) -> DerivationTree {
    let g = Pcfg::reachable(r.grammar.clone(), r.lexicon.clone(), "S", PcfgOptions::new(1.0));
    let toks: Vec<String> = english.split_whitespace().map(String::from).collect();
    let mut trees = parse(&g, &toks);
    assert_eq!(trees.len(), 1, "{english}");
    trees.remove(0)
}

fn run(r: &Resources, english: &str) -> (Outcome, String) {
    let mut t = tree(r, english);
    let out = naturalize(&mut t, &r.grammar, &r.lexicon, &r.caseframes, false, &AdmitAll);
    (out, yield_tokens(&t, &r.grammar, &r.lexicon).join(" "))
}

#[test]
fn bed_is_not_eaten() {
    let r = Resources::bundled();
    let (out, s) = run(&r, "The child ate the bed .");
    assert_eq!(out, Outcome::Repaired { replacements: vec![("bed".into(), "apple".into())] });
    assert_eq!(s, "The child ate the apple .");
}

#[test]
fn object_gap_relatives_are_checked() {
    let r = Resources::bundled();
    let (out, s) = run(&r, "The girl saw the bed that the child ate .");
    assert!(matches!(out, Outcome::Repaired { .. }), "{out:?}");
    assert_eq!(s, "The girl saw the apple that the child ate .");
}

#[test]
fn inanimate_subjects_are_checked() {
    let r = Resources::bundled();
    assert_eq!(run(&r, "The paper burned .").0, Outcome::Clean);
    let (out, s) = run(&r, "The rock burned .");
    assert!(matches!(out, Outcome::Repaired { .. }));
    assert_eq!(s, "The candle burned .");
}

#[test]
fn passive_subjects_count_as_objects() {
    let r = Resources::bundled();
    let t = tree(&r, "The bed was eaten .");
    let v = selectional_violations(&t, &r.grammar, &r.lexicon, &r.caseframes, false);
    assert_eq!(v.len(), 1);
    assert_eq!((v[0].verb.as_str(), v[0].noun.as_str()), ("eat", "bed"));
}

#[test]
fn open_world_and_strict_modes() {
    let r = Resources::bundled();
    let t = tree(&r, "The girl saw the bed .");
    assert!(selectional_violations(&t, &r.grammar, &r.lexicon, &r.caseframes, false).is_empty());
    assert_eq!(selectional_violations(&t, &r.grammar, &r.lexicon, &r.caseframes, true).len(), 1);
}

#[test]
fn duplicates_and_unrepairable_slots_are_rejected() {
    let r = Resources::bundled();
    let (out, _) = run(&r, "The child saw the cake that the girl saw .");
    assert_eq!(out, Outcome::Rejected(Rejection::DuplicateLexeme { lemma: "see".into() }));
    let (out, _) = run(&r, "The child ate Emma .");
    assert!(matches!(out, Outcome::Rejected(Rejection::ProperNoun { .. })), "{out:?}");
}
