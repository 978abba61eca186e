use compgen::grammar::{parse, sample, validate_grammar, yield_tokens, Constraints, Pcfg, PcfgOptions};
use compgen::Resources;

fn starts(r: &Resources) -> Vec<String> {
    let mut s: Vec<String> = r
        .grammar
        .nonterminals()
        .filter(|n| *n == "S" || n.starts_with("G_") || n.starts_with("GC_") || n.starts_with("X_"))
        .map(String::from)
        .collect();
    s.sort();
    s
}

#[test]
fn cross_file_checks_are_clean() {
    let r = Resources::bundled();
    let v = r.violations();
    assert!(v.is_empty(), "{v:#?}");
}

#[test]
fn every_start_validates_and_translates() {
    let r = Resources::bundled();
    let starts = starts(&r);
    assert!(starts.len() > 100, "{}", starts.len());
    // every lemma may fill a target slot here; pattern-specific targets are tested with the patterns
    let all = r.lexicon.entries().iter().map(|e| e.lemma.clone()).collect::<Vec<_>>();
    for start in &starts {
        let opts = PcfgOptions::new(1.0).with_targets(all.iter().cloned());
        let g = Pcfg::reachable(r.grammar.clone(), r.lexicon.clone(), start, opts);
        let rep = validate_grammar(&g);
        assert!(rep.is_empty(), "{start}: {:?}", rep.violations);
        for seed in 0..40 {
            let t = sample(&g, seed, &Constraints::none()).unwrap();
            let pair = r.transducer.translate(&t, &r.grammar, &r.lexicon).unwrap_or_else(|e| panic!("{start}: {e}"));
            let toks = yield_tokens(&t, &r.grammar, &r.lexicon);
            assert!(parse(&g, &toks).contains(&t), "{start}: {}", toks.join(" "));
            assert!(!pair.target.is_empty());
        }
    }
}
