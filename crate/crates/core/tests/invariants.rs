use std::sync::OnceLock;

use proptest::prelude::*;

use compgen::analysis::duplicate_lexemes;
use compgen::build::{derive_seed, topicalize};
use compgen::corpus::{Provenance, Record, Split};
use compgen::grammar::{parse, sample, sample_with, yield_tokens, zipf_weights, AdmitAll, Constraints, Pcfg, PcfgOptions};
use compgen::naturalizer::{naturalize, selectional_violations, Outcome};
use compgen::Resources;

fn fixture() -> &'static (Resources, Pcfg) {
    static F: OnceLock<(Resources, Pcfg)> = OnceLock::new();
    F.get_or_init(|| {
        let r = Resources::bundled();
        let g = Pcfg::reachable(r.grammar.clone(), r.lexicon.clone(), "S", PcfgOptions::new(1.0));
        (r, g)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn samples_are_reproducible_parseable_and_translatable(seed in any::<u64>()) {
        let (r, g) = fixture();
        let t = sample(g, seed, &Constraints::none()).unwrap();
        prop_assert_eq!(&sample(g, seed, &Constraints::none()).unwrap(), &t);
        let p = g.derivation_probability(&t).unwrap();
        prop_assert!(p > 0.0 && p <= 1.0);
        let toks = yield_tokens(&t, &r.grammar, &r.lexicon);
        prop_assert!(parse(g, &toks).contains(&t));
        let pair = r.transducer.translate(&t, &r.grammar, &r.lexicon).unwrap();
        prop_assert_eq!(&pair.source, &toks);
        prop_assert_eq!(pair.alignment.len(), pair.source.len());
        for (a, b) in pair.alignment.iter().flatten() {
            prop_assert!(a <= b && *b <= pair.target.len());
        }
        let back = compgen::grammar::DerivationTree::parse_bracketed(&t.render(&r.grammar, &r.lexicon), &r.grammar, &r.lexicon).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn naturalized_trees_are_clean_and_stay_clean(seed in any::<u64>()) {
        let (r, g) = fixture();
        let mut t = sample_with(g, seed, &Constraints::none(), &AdmitAll).unwrap();
        let out = naturalize(&mut t, &r.grammar, &r.lexicon, &r.caseframes, false, &AdmitAll);
        if !matches!(out, Outcome::Rejected(_)) {
            prop_assert!(duplicate_lexemes(&t, &r.grammar, &r.lexicon).is_empty());
            prop_assert!(selectional_violations(&t, &r.grammar, &r.lexicon, &r.caseframes, false).is_empty());
            let before = t.clone();
            prop_assert_eq!(naturalize(&mut t, &r.grammar, &r.lexicon, &r.caseframes, false, &AdmitAll), Outcome::Clean);
            prop_assert_eq!(t, before);
        }
    }

    #[test]
    fn topicalization_fronts_the_object_and_keeps_the_words(seed in any::<u64>()) {
        let (r, g) = fixture();
        let t = sample(g, seed, &Constraints::none()).unwrap();
        if let Some(top) = topicalize(&t, &r.grammar) {
            let lower = |v: Vec<String>| {
                let mut v: Vec<String> = v.into_iter().map(|s| s.to_lowercase()).collect();
                v.sort();
                v
            };
            let before = yield_tokens(&t, &r.grammar, &r.lexicon);
            let after = yield_tokens(&top, &r.grammar, &r.lexicon);
            let mut with_comma = before.clone();
            with_comma.push(",".into());
            prop_assert_eq!(lower(with_comma), lower(after.clone()));
            prop_assert!(parse(g, &after).contains(&top));
            let ja = r.transducer.translate(&top, &r.grammar, &r.lexicon).unwrap().target;
            prop_assert!(ja.iter().any(|w| w == "wa"));
        }
    }

    #[test]
    fn zipf_weights_normalize_and_decrease(n in 1usize..500, s in 0.1f64..3.0) {
        let w = zipf_weights(n, s).unwrap();
        prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(w.windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn seed_streams_are_separate(master in any::<u64>(), i in any::<u64>()) {
        prop_assert_eq!(derive_seed(master, "pool", i), derive_seed(master, "pool", i));
        prop_assert_ne!(derive_seed(master, "pool", i), derive_seed(master, "pool", i.wrapping_add(1)));
        prop_assert_ne!(derive_seed(master, "pool", i), derive_seed(master, "gen:pp_in_subj", i));
    }

    #[test]
    fn records_round_trip_through_json(id in "[a-z]{3}-[0-9]{5}", src in "[A-Za-z ,.?]{0,40}", tgt in "[a-z ]{0,40}", seed in any::<u64>()) {
        let r = Record {
            id,
            split: Split::Train,
            pattern: None,
            source: src,
            target: tgt,
            annotation: None,
            provenance: Provenance { seed, grammar: "S".into(), augmentation: vec!["topicalized".into()], trees: vec![] },
        };
        let back: Record = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        prop_assert_eq!(back, r);
    }
}
