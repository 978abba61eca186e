use compgen::grammar::{parse, Pcfg, PcfgOptions};
use compgen::Resources;

fn translate_all(r: &Resources, start: &str, english: &str) -> Vec<String> {
    let g = Pcfg::reachable(r.grammar.clone(), r.lexicon.clone(), start, PcfgOptions::new(1.0));
    let toks: Vec<String> = english.split_whitespace().map(String::from).collect();
    let trees = parse(&g, &toks);
    assert!(!trees.is_empty(), "no parse for {english} under {start}");
    let mut out: Vec<String> = trees
        .iter()
        .map(|t| r.transducer.translate(t, &r.grammar, &r.lexicon).unwrap().target.join(" "))
        .collect();
    out.sort();
    out.dedup();
    out
}

#[test]
fn gloss_goldens() {
    let r = Resources::bundled();
    let cases = [
        ("S", "The woman found the panda .", "jyosei ga panda o mituke ta"),
        ("S", "Sophia was recognized by Liam .", "sofia ga riamu niyotte ninsikisa re ta"),
        ("G_pp_in_subj", "A jar on the book changed .", "hon no ue no bin ga kawat ta"),
        ("G_wh_passive_subject", "What was seen ?", "nani ga mi rare ta ka ?"),
        (
            "S",
            "The child handed the box beside a table beside a tree beside a house to the teacher .",
            "kodomo ga ie no yoko no ki no yoko no teeburu no yoko no hako o kyoosi ni tewatasi ta",
        ),
    ];
    for (start, en, ja) in cases {
        assert_eq!(translate_all(&r, start, en), vec![ja.to_string()], "{en}");
    }
}
