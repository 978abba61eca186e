use compgen::analysis::analyze;
use compgen::grammar::{sample_with, validate_grammar, Constraints, Construct, DerivationTree, Pcfg, PcfgOptions};
use compgen::patterns::{annotate, ExposureMode, Inventory};
use compgen::Resources;

const SEEDS: u64 = 60;

fn pcfg(r: &Resources, start: &str, targets: &[&str]) -> Pcfg {
    let opts = PcfgOptions::new(1.0).with_targets(targets.iter().copied());
    Pcfg::reachable(r.grammar.clone(), r.lexicon.clone(), start, opts)
}

fn render(r: &Resources, t: &DerivationTree) -> String {
    compgen::grammar::yield_tokens(t, &r.grammar, &r.lexicon).join(" ")
}

#[test]
fn gen_grammars_validate_and_leak_only_their_pattern() {
    let r = Resources::bundled();
    let inv = Inventory::default();
    let filter = inv.gen_filter();
    for p in &inv.patterns {
        let mut starts = vec![p.gen_start()];
        if p.cp_embedding {
            starts.push(p.gen_cp_start());
        }
        for start in starts {
            let g = pcfg(&r, &start, p.targets);
            let report = validate_grammar(&g);
            assert!(report.is_empty(), "{start}: {:?}", report.violations);
            let mut c = Constraints::none();
            if let Some((k, ds)) = p.gen_depth() {
                c = c.depth(k, ds);
            }
            for seed in 0..SEEDS {
                let t = sample_with(&g, seed, &c, &filter).unwrap_or_else(|e| panic!("{start}: {e}"));
                let a = analyze(&t, &r.grammar);
                let leaks = inv.leaks(&a, &r.grammar, &r.lexicon);
                assert_eq!(leaks, vec![p.id], "{start}: {}", render(&r, &t));
                let pair = r.transducer.translate(&t, &r.grammar, &r.lexicon).unwrap();
                let ann = annotate(p, &t, &pair, &r.grammar, &r.lexicon, &a).unwrap();
                assert_eq!(ann.constituent.is_some(), p.partial_evaluable(), "{start}");
                assert_eq!(ann.in_cp, start.starts_with("GC_"), "{start}: {}", render(&r, &t));
                if let Some((k, ds)) = p.gen_depth() {
                    assert!(ds.contains(&a.depths.get(k)), "{start}");
                }
            }
        }
    }
}

#[test]
fn exposure_and_training_grammars_do_not_leak() {
    let r = Resources::bundled();
    let inv = Inventory::default();
    let filter = inv.train_filter();
    let train_depths = |c: Constraints| {
        Construct::ALL.iter().fold(c, |c, &k| c.depth(k, &[0, 1, 2, 4]))
    };
    for p in &inv.patterns {
        let start = p.exposure_start();
        let targets: Vec<&str> = p.targets.to_vec();
        let g = pcfg(&r, &start, &targets);
        let report = validate_grammar(&g);
        assert!(report.is_empty(), "{start}: {:?}", report.violations);
        for seed in 0..SEEDS {
            let c = match p.exposure {
                ExposureMode::Depths(k) => Constraints::none().depth(k, &[[1, 2, 4][seed as usize % 3]]),
                _ => train_depths(Constraints::none()),
            };
            let t = sample_with(&g, seed, &c, &filter).unwrap_or_else(|e| panic!("{start}: {e}"));
            let a = analyze(&t, &r.grammar);
            let leaks = inv.leaks(&a, &r.grammar, &r.lexicon);
            assert!(leaks.is_empty(), "{start}: {} leaks {leaks:?}", render(&r, &t));
        }
    }
    let g = pcfg(&r, "S", &[]);
    for seed in 0..2000 {
        let t = sample_with(&g, seed, &train_depths(Constraints::none()), &filter).unwrap();
        let a = analyze(&t, &r.grammar);
        let leaks = inv.leaks(&a, &r.grammar, &r.lexicon);
        assert!(leaks.is_empty(), "{} leaks {leaks:?}", render(&r, &t));
    }
}

#[test]
fn injected_sentences_are_caught() {
    let r = Resources::bundled();
    let inv = Inventory::default();
    let check = |start: &str, english: &str| {
        let g = pcfg(&r, start, &[]);
        let toks: Vec<String> = english.split_whitespace().map(String::from).collect();
        let trees = compgen::grammar::parse(&g, &toks);
        assert!(!trees.is_empty(), "{english}");
        let a = analyze(&trees[0], &r.grammar);
        inv.leaks(&a, &r.grammar, &r.lexicon)
    };
    assert_eq!(check("G_pp_in_subj", "The baby in the room cried ."), vec!["pp_in_subj"]);
    assert_eq!(
        check("S", "Emma said that Liam thought that the girl believed that the boy slept ."),
        vec!["cp_shallower"]
    );
    assert!(check("S", "Emma said that Liam thought that the boy slept .").is_empty());
}
