#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use compgen::grammar::{sample, Constraints, DerivationTree, Grammar, Lexicon, Pcfg, PcfgOptions};

/// Ten rules with one subcritical recursion (NP -> NP and NP).
pub const TEN_RULES: &str = "\
s1\tS -> NP VP\t0.8
s2\tS -> VP\t0.2
np1\tNP -> CommonNoun[]\t0.6
np2\tNP -> the CommonNoun[]\t0.3
np3\tNP -> NP and NP\t0.1
vp1\tVP -> ran\t0.5
vp2\tVP -> slept ADV\t0.25
vp3\tVP -> saw NP\t0.25
adv1\tADV -> quickly\t0.5
adv2\tADV -> slowly\t0.5
";

pub const TWO_NOUNS: &str = "dog\tCommonNoun\t\tbase=dog\t1\ncat\tCommonNoun\t\tbase=cat\t2\n";

pub fn pcfg(grammar: &str, lexicon: &str, zipf: f64) -> Pcfg {
    Pcfg::new(
        Arc::new(Grammar::parse(grammar).unwrap()),
        Arc::new(Lexicon::parse(lexicon).unwrap()),
        "S",
        PcfgOptions::new(zipf),
    )
}

/// Exact share of each rule among all rule uses, from expected nonterminal
/// occurrence counts solved by fixed-point iteration over the grammar text.
pub fn exact_rule_shares(grammar: &str) -> HashMap<String, f64> {
    let rules: Vec<(String, String, Vec<String>, f64)> = grammar
        .lines()
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            let (lhs, rhs) = f[1].split_once(" -> ").unwrap();
            (f[0].to_string(), lhs.to_string(), rhs.split(' ').map(String::from).collect(), f[2].parse().unwrap())
        })
        .collect();
    let mut occ: HashMap<String, f64> = HashMap::from([("S".to_string(), 1.0)]);
    for _ in 0..200 {
        let mut next: HashMap<String, f64> = HashMap::from([("S".to_string(), 1.0)]);
        for (_, lhs, rhs, w) in &rules {
            let o = occ.get(lhs).copied().unwrap_or(0.0);
            for s in rhs {
                if rules.iter().any(|r| &r.1 == s) {
                    *next.entry(s.clone()).or_default() += o * w;
                }
            }
        }
        occ = next;
    }
    let counts: Vec<(String, f64)> = rules.iter().map(|(id, lhs, _, w)| (id.clone(), occ[lhs] * w)).collect();
    let total: f64 = counts.iter().map(|c| c.1).sum();
    counts.into_iter().map(|(id, c)| (id, c / total)).collect()
}

pub fn empirical_rule_shares(g: &Pcfg, n: u64) -> HashMap<String, f64> {
    let mut counts: HashMap<String, u64> = HashMap::new();
    let mut total = 0u64;
    for seed in 0..n {
        let t = sample(g, seed, &Constraints::none()).unwrap();
        t.walk(&mut |_, node: &DerivationTree| {
            if let Some(p) = node.prod() {
                *counts.entry(g.grammar().get(p).id.clone()).or_default() += 1;
                total += 1;
            }
        });
    }
    counts.into_iter().map(|(k, c)| (k, c as f64 / total as f64)).collect()
}

pub fn l1(a: &HashMap<String, f64>, b: &HashMap<String, f64>) -> f64 {
    let keys: std::collections::BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    keys.into_iter().map(|k| (a.get(k).unwrap_or(&0.0) - b.get(k).unwrap_or(&0.0)).abs()).sum()
}

/// Least-squares slope of log frequency on log rank over the `fit` most frequent ranks,
/// from `draws` single-noun sentences over a lexicon of `n` nouns.
pub fn zipf_slope(s: f64, n: usize, draws: u64, fit: usize) -> f64 {
    let lex: String = (1..=n).map(|r| format!("n{r}\tCommonNoun\t\tbase=n{r}\t{r}\n")).collect();
    let g = pcfg("s\tS -> CommonNoun[]\t1\n", &lex, s);
    let mut counts = vec![0u64; n + 1];
    for seed in 0..draws {
        let t = sample(&g, seed, &Constraints::none()).unwrap();
        let DerivationTree::Node { children, .. } = &t else { panic!() };
        let DerivationTree::Leaf { entry, .. } = &children[0] else { panic!() };
        counts[g.lexicon().get(*entry).zipf_rank as usize] += 1;
    }
    let pts: Vec<(f64, f64)> = (1..=fit).map(|r| ((r as f64).ln(), (counts[r] as f64).ln())).collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
