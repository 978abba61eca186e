use compgen::corpus::{Provenance, Record, Split};
use compgen::grammar::{Depths, Role};
use compgen::metrics::*;
use compgen::patterns::{Annotation, Group, Inventory};
use proptest::prelude::*;

fn toks(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

fn record(id: &str, pattern: Option<&str>, target: &str, constituent: Option<&str>, role: Option<Role>) -> Record {
    Record {
        id: id.into(),
        split: Split::Gen,
        pattern: pattern.map(String::from),
        source: "-".into(),
        target: target.into(),
        annotation: pattern.map(|_| Annotation {
            constituent: constituent.map(toks),
            expected_role: role,
            depth: Depths::default(),
            in_cp: false,
        }),
        provenance: Provenance { seed: 0, grammar: "S".into(), augmentation: vec![], trees: vec![] },
    }
}

#[test]
fn worked_partial_match_example() {
    let gold = "jyosei ga panda o mituke ta";
    let ann = Annotation {
        constituent: Some(toks("panda")),
        expected_role: Some(Role::DirectObject),
        depth: Depths::default(),
        in_cp: false,
    };
    let preds = ["jyosei ga inu o mituke ta", "panda ga jyosei o mituke ta", "dansei ga panda o mituke ta"];
    let verdicts: Vec<bool> = preds.iter().map(|p| partial_match(&toks(p), &ann).unwrap()).collect();
    assert_eq!(verdicts, [false, false, true]);
    assert!(!exact_match(&toks(preds[2]), &toks(gold)));
    assert_eq!(extract_role(&toks(gold), &toks("panda")).role, ParticleRole::DirectObject);
    assert_eq!(extract_role(&toks(preds[1]), &toks("panda")).role, ParticleRole::Subject);
    assert_eq!(extract_role(&toks(preds[0]), &toks("panda")).role, ParticleRole::Unknown);
}

#[test]
fn bleu_identity_and_empty() {
    let refs = vec![toks("jyosei ga panda o mituke ta"), toks("onnanoko ga hasit ta yo")];
    assert_eq!(corpus_bleu(&refs, &refs, Smoothing::Exp).unwrap(), 100.0);
    assert_eq!(corpus_bleu(&refs, &refs, Smoothing::None).unwrap(), 100.0);
    let empty: Vec<Vec<String>> = vec![vec![], vec![]];
    assert_eq!(corpus_bleu(&empty, &refs, Smoothing::Exp).unwrap(), 0.0);
    assert_eq!(corpus_bleu::<String, String>(&[], &[], Smoothing::Exp), Err(MetricError::Empty));
}

#[test]
fn bleu_matches_hand_computed_corpus() {
    // Matches per order: 15/16, 11/13, 7/10, 4/7; equal lengths.
    let refs = vec![toks("jyosei ga panda o mituke ta"), toks("dansei ga inu o kat ta"), toks("onnanoko ga hasit ta")];
    let mut hyps = refs.clone();
    hyps[1][2] = "neko".into();
    let b = corpus_bleu(&hyps, &refs, Smoothing::Exp).unwrap();
    assert!((b - 75.0533618267102).abs() < 1e-6, "{b}");
    let closed = 100.0 * (4620.0f64 / 14560.0).powf(0.25);
    assert!((b - closed).abs() < 1e-9);
}

#[test]
fn bleu_exp_smoothing_and_brevity() {
    // 3/4, 1/3, then two zero orders floored at 1/(2·2) and 1/(4·1).
    let b = corpus_bleu(&[toks("a b c d")], &[toks("a b x d")], Smoothing::Exp).unwrap();
    assert!((b - 35.35533905932737).abs() < 1e-9, "{b}");
    assert_eq!(corpus_bleu(&[toks("a b c d")], &[toks("a b x d")], Smoothing::None).unwrap(), 0.0);
    let short = corpus_bleu(&[toks("a b c d")], &[toks("a b c d e f")], Smoothing::Exp).unwrap();
    assert!((short - 100.0 * (1.0f64 - 6.0 / 4.0).exp()).abs() < 1e-9);
}

fn fixture() -> Vec<Record> {
    vec![
        record("r0", Some("subj_to_obj_common"), "jyosei ga panda o mituke ta", Some("panda"), Some(Role::DirectObject)),
        record("r1", Some("subj_to_obj_common"), "dansei ga yagi o tukamae ta", Some("yagi"), Some(Role::DirectObject)),
        record("r2", Some("prim_to_subj_common"), "ginkooin ga tabe ta", Some("ginkooin"), Some(Role::Subject)),
        record("r3", Some("active_to_passive"), "jyosei ga hika re ta", Some("hika re ta"), None),
        record("r4", Some("passive_to_active"), "anna ga kaban o sibot ta", Some("sibot ta"), None),
        record("r5", Some("cp_deeper"), "dansei ga ema ga noa o mituke ta to it ta", None, None),
        record("r6", Some("pp_in_subj"), "hon no ue no onnanoko ga riamu o mituke ta", Some("hon no ue no onnanoko"), Some(Role::Subject)),
        record("r7", Some("iobj_wh"), "akanboo ga kappu o dare ni age ta ka ?", None, None),
        record("r8", None, "onnanoko ga hasit ta", None, None),
        record("r9", Some("rc_in_subj"), "saken da onnanoko ga teeburu o kiniit ta", Some("saken da onnanoko"), Some(Role::Subject)),
    ]
}

const HYPS: [&str; 10] = [
    "jyosei ga panda o mituke ta",
    "yagi ga dansei o tukamae ta",
    "ginkooin ga tabe ta",
    "jyosei ga hik ta",
    "anna ga kaban o sibot ta",
    "dansei ga ema ga noa o mituke ta to it ta",
    "onnanoko ga hon no ue no onnanoko o mituke ta",
    "akanboo ga kappu o dare ni age ta ka",
    "onnanoko ga hasit ta",
    "saken da onnanoko ga teeburu o kiniit ta",
];

#[test]
fn report_agrees_with_per_record_tally() {
    let records = fixture();
    let inv = Inventory::default();
    let hyps: Vec<Vec<String>> = HYPS.iter().map(|h| toks(h)).collect();
    let report = score_records(&records, &hyps, &inv, Smoothing::Exp).unwrap();
    // Hand verdicts per record.
    let exact = [true, false, true, false, true, true, false, false, true, true];
    let partial = [Some(true), Some(false), Some(true), Some(false), Some(true), None, Some(false), None, None, Some(true)];
    assert_eq!(report.overall.exact_pct, 60.0);
    assert_eq!(report.overall.partial_pct, Some(100.0 * 4.0 / 7.0));
    assert_eq!((report.scored, report.skipped), (10, 3));
    for (i, r) in records.iter().enumerate() {
        let v = verdict(&hyps[i], r);
        assert_eq!((v.exact, v.partial), (exact[i], partial[i]), "{}", r.id);
    }
    let by = |g: Group| report.per_group.iter().find(|x| x.group == g).unwrap().scores.clone();
    // lexical: r0 r1 r2; lexical+morph: r3 r4; structural: r5 r6 r7 r9.
    assert_eq!(by(Group::Lexical).records, 3);
    assert!((by(Group::Lexical).exact_pct - 200.0 / 3.0).abs() < 1e-9);
    assert_eq!(by(Group::LexicalMorphological).partial_pct, Some(50.0));
    assert_eq!(by(Group::Structural).exact_pct, 50.0);
    assert_eq!(by(Group::Structural).partial_pct, Some(50.0));
    let row = report.per_pattern.iter().find(|p| p.pattern == "cp_deeper").unwrap();
    assert_eq!((row.scores.exact_pct, row.scores.partial_pct), (100.0, None));
    assert_eq!(report.per_pattern.len(), 8);
}

#[test]
fn references_as_hypotheses_score_full_marks() {
    let records = fixture();
    let text: String = records.iter().map(|r| format!("{}\n", r.target)).collect();
    let report = score_file(&text, &records, &Inventory::default(), &Whitespace, Smoothing::Exp).unwrap();
    assert_eq!(report.overall.exact_pct, 100.0);
    assert_eq!(report.overall.bleu, 100.0);
    assert_eq!(report.overall.partial_pct, Some(100.0));
    for p in &report.per_pattern {
        assert_eq!(p.scores.exact_pct, 100.0);
        assert!(p.scores.partial_pct.is_none_or(|x| x == 100.0));
    }
}

#[test]
fn swapped_constituent_nouns_zero_partial() {
    let records: Vec<Record> = fixture().into_iter().filter(|r| r.id == "r0" || r.id == "r1" || r.id == "r2").collect();
    let hyps = vec![toks("jyosei ga inu o mituke ta"), toks("dansei ga inu o tukamae ta"), toks("inu ga tabe ta")];
    let report = score_records(&records, &hyps, &Inventory::default(), Smoothing::Exp).unwrap();
    assert_eq!(report.overall.partial_pct, Some(0.0));
    assert_eq!(report.overall.exact_pct, 0.0);
}

#[test]
fn hypothesis_alignment_errors_name_the_line() {
    let records = fixture();
    let jsonl: String = records
        .iter()
        .map(|r| format!("{}\n", serde_json::json!({"id": r.id, "hypothesis": r.target})))
        .collect();
    assert!(score_file(&jsonl, &records, &Inventory::default(), &Whitespace, Smoothing::Exp).is_ok());
    let mut lines: Vec<&str> = jsonl.lines().collect();
    lines.swap(3, 4);
    let err = score_file(&lines.join("\n"), &records, &Inventory::default(), &Whitespace, Smoothing::Exp).unwrap_err();
    assert!(matches!(err, MetricError::Alignment { line: 4, .. }), "{err}");
    let short = "a\nb\n";
    let err = score_file(short, &records, &Inventory::default(), &Whitespace, Smoothing::Exp).unwrap_err();
    assert!(matches!(err, MetricError::Alignment { line: 3, .. }), "{err}");
}

const VOCAB: [&str; 12] = ["jyosei", "dansei", "panda", "inu", "mituke", "ta", "ga", "o", "ni", "no", "niyotte", "ka"];

fn role_of_particle(tok: &str) -> Option<Role> {
    match ParticleRole::of_particle(tok) {
        ParticleRole::Subject => Some(Role::Subject),
        ParticleRole::DirectObject => Some(Role::DirectObject),
        ParticleRole::IndirectObject => Some(Role::IndirectObject),
        ParticleRole::GenitiveModifier => Some(Role::Locative),
        ParticleRole::AgentBy => Some(Role::Agent),
        ParticleRole::Unknown => None,
    }
}

fn sentence() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(prop::sample::select(&VOCAB[..]).prop_map(String::from), 2..12)
}

#[derive(Debug, Clone)]
enum Edit {
    Keep,
    Substitute(usize, usize),
    Delete(usize),
    Insert(usize, usize),
    Swap(usize, usize),
}

fn edit() -> impl Strategy<Value = Edit> {
    prop_oneof![
        Just(Edit::Keep),
        (any::<usize>(), 0..VOCAB.len()).prop_map(|(i, w)| Edit::Substitute(i, w)),
        any::<usize>().prop_map(Edit::Delete),
        (any::<usize>(), 0..VOCAB.len()).prop_map(|(i, w)| Edit::Insert(i, w)),
        (any::<usize>(), any::<usize>()).prop_map(|(i, j)| Edit::Swap(i, j)),
    ]
}

fn apply(mut s: Vec<String>, e: &Edit) -> Vec<String> {
    let n = s.len();
    match *e {
        Edit::Keep => {}
        Edit::Substitute(i, w) => s[i % n] = VOCAB[w].into(),
        Edit::Delete(i) => {
            s.remove(i % n);
        }
        Edit::Insert(i, w) => s.insert(i % (n + 1), VOCAB[w].into()),
        Edit::Swap(i, j) => s.swap(i % n, j % n),
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn exact_implies_partial(reference in sentence(), span in (any::<usize>(), 1usize..4), e in edit()) {
        let n = reference.len();
        let start = span.0 % (n - 1);
        let end = (start + span.1).min(n - 1);
        let ann = Annotation {
            constituent: Some(reference[start..end].to_vec()),
            expected_role: role_of_particle(&reference[end]),
            depth: Depths::default(),
            in_cp: false,
        };
        let hyp = apply(reference.clone(), &e);
        if exact_match(&hyp, &reference) {
            prop_assert_eq!(partial_match(&hyp, &ann), Some(true));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn bleu_bounded_and_order_free(pairs in prop::collection::vec((sentence(), sentence()), 1..8), rot in any::<usize>()) {
        let (hyps, refs): (Vec<_>, Vec<_>) = pairs.iter().cloned().unzip();
        let b = corpus_bleu(&hyps, &refs, Smoothing::Exp).unwrap();
        prop_assert!((0.0..=100.0).contains(&b));
        let mut rotated = pairs.clone();
        let k = rot % rotated.len();
        rotated.rotate_left(k);
        let (h2, r2): (Vec<_>, Vec<_>) = rotated.into_iter().unzip();
        prop_assert_eq!(corpus_bleu(&h2, &r2, Smoothing::Exp).unwrap(), b);
        prop_assert_eq!(corpus_bleu(&refs, &refs, Smoothing::Exp).unwrap(), if refs.iter().any(|r| r.len() >= 4) { 100.0 } else { 0.0 });
    }
}
