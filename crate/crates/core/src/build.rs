//! Corpus construction: the in-distribution pool and its dev/test/train
//! partition, generalization sets, primitive exposures, topicalization and
//! length concatenation, followed by a fail-closed gap audit.
//!
//! Every draw has its own seed, derived from the master seed, a stream name
//! and an attempt index. Attempts run in parallel batches and are accepted
//! strictly in index order, so thread count never changes the output.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::analyze;
use crate::audit::{audit_gap, GapViolation};
use crate::config::RunConfig;
use crate::corpus::{Manifest, NaturalizerStats, PatternCounts, Provenance, Record, Split, TrainBreakdown, RESIDUAL_LOG};
use crate::error::{SampleError, TransduceError};
use crate::grammar::{sample_with, Constraints, Construct, DerivationTree, LexicalFilter, Pcfg, PcfgOptions};
use crate::naturalizer::{naturalize, Outcome, Rejection};
use crate::patterns::{annotate, Annotation, AnnotationError, ExposureMode, Inventory, PatternSpec};
use crate::resources::Resources;
use crate::transduction::SentencePair;

fn fnv1a64(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of attempt `index` in the named stream.
pub fn derive_seed(master: u64, stream: &str, index: u64) -> u64 {
    splitmix64(splitmix64(master ^ fnv1a64(stream)) ^ index)
}

pub const TRAIN_DEPTHS: [u32; 4] = [0, 1, 2, 4];
const EXPOSURE_DEPTHS: [u32; 3] = [1, 2, 4];

#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error("{stream}: {source}")]
    Sample { stream: String, source: SampleError },
    #[error("{stream}: {source}")]
    Translate { stream: String, source: TransduceError },
    #[error(transparent)]
    Annotation(#[from] AnnotationError),
    #[error("{stream}: only {accepted} of {wanted} sentences after {attempts} attempts")]
    Exhausted { stream: String, wanted: usize, accepted: usize, attempts: usize },
    #[error("pattern {pattern}: {unrepairable} of {drawn} drawn sentences were unrepairable")]
    Unrepairable { pattern: String, unrepairable: usize, drawn: usize },
    #[error("{0}")]
    Invalid(String),
    #[error("gap audit failed with {} violation(s); first: {}", .0.len(), .0[0])]
    Audit(Vec<GapViolation>),
}

/// A built corpus with the derivations behind each record.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub records: Vec<Record>,
    pub trees: Vec<Vec<DerivationTree>>,
    pub manifest: Manifest,
}

struct Drawn {
    seed: u64,
    tree: DerivationTree,
    pair: SentencePair,
    annotation: Option<Annotation>,
}

enum Attempt {
    Ok(Drawn, bool),
    Rejected(Rejection),
}

struct Stream<'a> {
    name: String,
    pcfg: Pcfg,
    constraints: Constraints,
    filter: &'a dyn LexicalFilter,
    pattern: Option<&'a PatternSpec>,
}

struct Builder<'a> {
    cfg: &'a RunConfig,
    res: &'a Resources,
    stats: BTreeMap<String, NaturalizerStats>,
}

fn train_constraints() -> Constraints {
    Construct::ALL.iter().fold(Constraints::none(), |c, &k| c.depth(k, &TRAIN_DEPTHS))
}

impl<'a> Builder<'a> {
    fn pcfg(&self, start: &str, targets: &[&str]) -> Pcfg {
        let opts = PcfgOptions::new(self.cfg.zipf_exponent).with_targets(targets.iter().copied());
        Pcfg::reachable(self.res.grammar.clone(), self.res.lexicon.clone(), start, opts)
    }

    fn attempt(&self, s: &Stream, seed: u64) -> Result<Attempt, BuildError> {
        let (g, lex) = (&self.res.grammar, &self.res.lexicon);
        let mut tree = sample_with(&s.pcfg, seed, &s.constraints, s.filter)
            .map_err(|source| BuildError::Sample { stream: s.name.clone(), source })?;
        let repaired = match naturalize(&mut tree, g, lex, &self.res.caseframes, self.cfg.strict_selectional, s.filter) {
            Outcome::Clean => false,
            Outcome::Repaired { .. } => true,
            Outcome::Rejected(r) => return Ok(Attempt::Rejected(r)),
        };
        let pair = self
            .res
            .transducer
            .translate(&tree, g, lex)
            .map_err(|source| BuildError::Translate { stream: s.name.clone(), source })?;
        let annotation = match s.pattern {
            Some(p) => Some(annotate(p, &tree, &pair, g, lex, &analyze(&tree, g))?),
            None => None,
        };
        Ok(Attempt::Ok(Drawn { seed, tree, pair, annotation }, repaired))
    }

    /// Draws `count` sentences from a stream, keeping those `accept` takes.
    fn draw(
        &mut self,
        s: &Stream,
        count: usize,
        stats_key: &str,
        mut accept: impl FnMut(&Drawn) -> bool,
    ) -> Result<Vec<Drawn>, BuildError> {
        let master = self.cfg.seed;
        let max_attempts = 200 * count + 2_000;
        let mut out = Vec::with_capacity(count);
        let mut stats = NaturalizerStats::default();
        let mut next = 0usize;
        while out.len() < count {
            if next >= max_attempts {
                return Err(BuildError::Exhausted {
                    stream: s.name.clone(),
                    wanted: count,
                    accepted: out.len(),
                    attempts: next,
                });
            }
            let batch = ((count - out.len()) * 5 / 4 + 16).min(max_attempts - next);
            let results: Vec<Result<Attempt, BuildError>> = (next..next + batch)
                .into_par_iter()
                .map(|i| self.attempt(s, derive_seed(master, &s.name, i as u64)))
                .collect();
            for r in results {
                next += 1;
                stats.drawn += 1;
                match r? {
                    Attempt::Ok(d, repaired) => {
                        if accept(&d) {
                            stats.repaired += repaired as usize;
                            out.push(d);
                        }
                    }
                    Attempt::Rejected(Rejection::DuplicateLexeme { .. }) => stats.duplicate_lexeme += 1,
                    Attempt::Rejected(r) => {
                        stats.unrepairable += 1;
                        if matches!(r, Rejection::Residual { .. }) && stats.residuals.len() < RESIDUAL_LOG {
                            stats.residuals.push(r);
                        }
                    }
                }
                if out.len() == count {
                    break;
                }
            }
        }
        self.stats.entry(stats_key.to_string()).or_default().absorb(&stats);
        Ok(out)
    }

    fn record(&self, id: String, split: Split, pattern: Option<&str>, grammar: &str, d: &Drawn) -> Record {
        Record {
            id,
            split,
            pattern: pattern.map(String::from),
            source: d.pair.source.join(" "),
            target: d.pair.target.join(" "),
            annotation: d.annotation.clone(),
            provenance: Provenance {
                seed: d.seed,
                grammar: grammar.to_string(),
                augmentation: Vec::new(),
                trees: vec![d.tree.render(&self.res.grammar, &self.res.lexicon)],
            },
        }
    }
}

/// Builds a corpus on the current rayon pool.
pub fn build(cfg: &RunConfig, res: &Resources) -> Result<Corpus, BuildError> {
    cfg.check().map_err(|e| BuildError::Invalid(e.to_string()))?;
    let inv = Inventory::default();
    let mut b = Builder { cfg, res, stats: BTreeMap::new() };
    let (g, lex) = (res.grammar.clone(), res.lexicon.clone());
    let counts = &cfg.counts;
    let n_train = cfg.scaled(counts.train);
    let n_dev = cfg.scaled(counts.dev);
    let n_test = cfg.scaled(counts.test);
    let n_concat = if cfg.concatenate { cfg.scaled(counts.concatenated) } else { 0 };
    let n_exposure = |p: &PatternSpec| {
        let min = match p.exposure {
            ExposureMode::Targets => p.targets.len(),
            ExposureMode::Depths(_) => EXPOSURE_DEPTHS.len(),
            ExposureMode::Plain => 1,
        };
        cfg.scaled(counts.exposures).max(min)
    };
    let total_exposures: usize = inv.patterns.iter().map(n_exposure).sum();
    let budget = n_train
        .checked_sub(total_exposures + n_concat)
        .ok_or_else(|| BuildError::Invalid(format!("train size {n_train} cannot hold the exposures and concatenations")))?;

    let train_filter = inv.train_filter();
    let gen_filter = inv.gen_filter();

    // In-distribution pool.
    let pool_stream = Stream {
        name: "pool".into(),
        pcfg: b.pcfg("S", &[]),
        constraints: train_constraints(),
        filter: &train_filter,
        pattern: None,
    };
    let mut pool_sources: HashSet<String> = HashSet::new();
    let pool = b.draw(&pool_stream, n_dev + n_test + budget, "in_distribution", |d| {
        pool_sources.insert(d.pair.source.join(" "))
    })?;
    let mut order: Vec<usize> = (0..pool.len()).collect();
    order.sort_by_key(|&i| (derive_seed(cfg.seed, "split", i as u64), i));

    // Generalization sets.
    let mut records: Vec<Record> = Vec::new();
    let mut trees: Vec<Vec<DerivationTree>> = Vec::new();
    let mut patterns: BTreeMap<String, PatternCounts> = BTreeMap::new();
    let mut gen_sources: HashSet<String> = HashSet::new();
    for p in &inv.patterns {
        let n = cfg.scaled(p.gen_count(counts));
        let n_cp = if p.cp_embedding { (n as f64 * cfg.cp_embedding_fraction).round() as usize } else { 0 };
        let mut constraints = Constraints::none();
        if let Some((c, ds)) = p.gen_depth() {
            constraints = constraints.depth(c, ds);
        }
        let mut drawn: Vec<(&str, Drawn)> = Vec::new();
        for (kind, start, k) in [("gen", p.gen_start(), n - n_cp), ("gen-cp", p.gen_cp_start(), n_cp)] {
            if k == 0 {
                continue;
            }
            let s = Stream {
                name: format!("{kind}:{}", p.id),
                pcfg: b.pcfg(&start, p.targets),
                constraints: constraints.clone(),
                filter: &gen_filter,
                pattern: Some(p),
            };
            let got = b.draw(&s, k, p.id, |d| {
                let src = d.pair.source.join(" ");
                !pool_sources.contains(&src) && gen_sources.insert(src)
            })?;
            drawn.extend(got.into_iter().map(|d| (kind, d)));
        }
        let pc = patterns.entry(p.id.to_string()).or_default();
        pc.gen = drawn.len();
        pc.gen_in_cp = n_cp;
        for (i, (kind, d)) in drawn.iter().enumerate() {
            records.push(b.record(format!("gen-{}-{i:05}", p.id), Split::Gen, Some(p.id), &format!("{kind}:{}", p.id), d));
            trees.push(vec![d.tree.clone()]);
        }
    }
    let gen_max_len = records.iter().map(|r| r.source_tokens().len()).max().unwrap_or(0);

    // Primitive exposures.
    for p in &inv.patterns {
        let n = n_exposure(p);
        let start = p.exposure_start();
        let subs: Vec<(Vec<&str>, Constraints)> = match p.exposure {
            ExposureMode::Targets => p.targets.iter().map(|t| (vec![*t], train_constraints())).collect(),
            ExposureMode::Depths(c) => EXPOSURE_DEPTHS.iter().map(|&d| (vec![], train_constraints().depth(c, &[d]))).collect(),
            ExposureMode::Plain => vec![(vec![], train_constraints())],
        };
        let m = subs.len();
        let mut k = 0;
        for (j, (targets, constraints)) in subs.into_iter().enumerate() {
            let want = n / m + usize::from(j < n % m);
            let s = Stream {
                name: format!("exp:{}:{j}", p.id),
                pcfg: b.pcfg(&start, &targets),
                constraints,
                filter: &train_filter,
                pattern: None,
            };
            let got = b.draw(&s, want, p.id, |d| !pool_sources.contains(&d.pair.source.join(" ")))?;
            for d in got {
                records.push(b.record(format!("exp-{}-{k:05}", p.id), Split::Train, Some(p.id), &format!("exp:{}", p.id), &d));
                trees.push(vec![d.tree]);
                k += 1;
            }
        }
        patterns.entry(p.id.to_string()).or_default().exposures = k;
    }

    // Dev and test, then the training base with topicalization.
    for (rank, &i) in order.iter().enumerate().take(n_dev + n_test) {
        let split = if rank < n_dev { Split::Dev } else { Split::Test };
        records.push(b.record(format!("ind-{i:06}"), split, None, "S", &pool[i]));
        trees.push(vec![pool[i].tree.clone()]);
    }
    let candidates: Vec<usize> = order[n_dev + n_test..].to_vec();
    let eligible: Vec<bool> = candidates.iter().map(|&i| topicalizable(&pool[i].tree, &g)).collect();
    let mut prefix = vec![0usize; candidates.len() + 1];
    for (k, e) in eligible.iter().enumerate() {
        prefix[k + 1] = prefix[k] + usize::from(*e);
    }
    let n_topic = |base: usize| (prefix[base] as f64 * cfg.topicalize_fraction).round() as usize;
    let n_base = (0..=candidates.len()).rev().find(|&base| base + n_topic(base) <= budget).unwrap_or(0);
    let n_top = budget - n_base;
    if n_top > prefix[n_base] {
        return Err(BuildError::Invalid("too few sentences with a modified object to topicalize".into()));
    }
    let base = &candidates[..n_base];
    for &i in base {
        records.push(b.record(format!("ind-{i:06}"), Split::Train, None, "S", &pool[i]));
        trees.push(vec![pool[i].tree.clone()]);
    }
    let mut chosen: Vec<usize> = base.iter().copied().filter(|&i| topicalizable(&pool[i].tree, &g)).collect();
    chosen.sort_by_key(|&i| (derive_seed(cfg.seed, "topicalize", i as u64), i));
    chosen.truncate(n_top);
    chosen.sort_unstable();
    for (k, &i) in chosen.iter().enumerate() {
        let t = topicalize(&pool[i].tree, &g).expect("eligible tree topicalizes");
        let pair = res
            .transducer
            .translate(&t, &g, &lex)
            .map_err(|source| BuildError::Translate { stream: "topicalize".into(), source })?;
        let d = Drawn { seed: pool[i].seed, tree: t, pair, annotation: None };
        let mut r = b.record(format!("top-{k:05}"), Split::Train, None, "S", &d);
        r.provenance.augmentation.push("topicalized".into());
        records.push(r);
        trees.push(vec![d.tree]);
    }

    // Length concatenation.
    let mut n_cat = 0;
    if n_concat > 0 && gen_max_len > 0 {
        let s_decl = g.id_of("s_decl");
        let segments: Vec<usize> = base
            .iter()
            .copied()
            .filter(|&i| pool[i].tree.prod() == s_decl && pool[i].pair.source.len() * 4 > gen_max_len)
            .collect();
        if segments.is_empty() {
            return Err(BuildError::Invalid("no sentences long enough to concatenate".into()));
        }
        for k in 0..n_concat {
            let seed = derive_seed(cfg.seed, "concat", k as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut parts: Vec<usize> = Vec::new();
            let mut len = 0;
            while len <= gen_max_len {
                let i = *segments.choose(&mut rng).expect("nonempty");
                len += pool[i].pair.source.len();
                parts.push(i);
            }
            let source: Vec<String> = parts.iter().map(|&i| pool[i].pair.source.join(" ")).collect();
            let target: Vec<String> = parts.iter().map(|&i| pool[i].pair.target.join(" ")).collect();
            records.push(Record {
                id: format!("cat-{k:05}"),
                split: Split::Train,
                pattern: None,
                source: source.join(" "),
                target: target.join(" . "),
                annotation: None,
                provenance: Provenance {
                    seed,
                    grammar: "S".into(),
                    augmentation: vec!["concatenated".into()],
                    trees: parts.iter().map(|&i| pool[i].tree.render(&g, &lex)).collect(),
                },
            });
            trees.push(parts.iter().map(|&i| pool[i].tree.clone()).collect());
            n_cat += 1;
        }
    }

    // Order, check and audit.
    let mut idx: Vec<usize> = (0..records.len()).collect();
    idx.sort_by(|&a, &b| (records[a].split, &records[a].id).cmp(&(records[b].split, &records[b].id)));
    let records: Vec<Record> = idx.iter().map(|&i| records[i].clone()).collect();
    let trees: Vec<Vec<DerivationTree>> = idx.iter().map(|&i| trees[i].clone()).collect();

    for p in &inv.patterns {
        if let Some(s) = b.stats.get(p.id) {
            if s.drawn >= 20 && s.unrepairable as f64 > cfg.max_unrepairable_fraction * s.drawn as f64 {
                return Err(BuildError::Unrepairable {
                    pattern: p.id.into(),
                    unrepairable: s.unrepairable,
                    drawn: s.drawn,
                });
            }
        }
    }

    let mut counts_by_split: BTreeMap<Split, usize> = Split::ALL.iter().map(|&s| (s, 0)).collect();
    let mut max_source_len: BTreeMap<Split, usize> = counts_by_split.clone();
    let mut max_target_len = counts_by_split.clone();
    for r in &records {
        *counts_by_split.get_mut(&r.split).unwrap() += 1;
        let m = max_source_len.get_mut(&r.split).unwrap();
        *m = (*m).max(r.source_tokens().len());
        let m = max_target_len.get_mut(&r.split).unwrap();
        *m = (*m).max(r.target_tokens().len());
    }
    let expected = [(Split::Train, n_train), (Split::Dev, n_dev), (Split::Test, n_test)];
    for (s, n) in expected {
        if counts_by_split[&s] != n {
            return Err(BuildError::Invalid(format!("{s} has {} records, expected {n}", counts_by_split[&s])));
        }
    }

    let violations = audit_gap(&records, &trees, &inv, &g, &lex);
    if !violations.is_empty() {
        return Err(BuildError::Audit(violations));
    }

    let mut naturalizer = NaturalizerStats::default();
    for s in b.stats.values() {
        naturalizer.absorb(s);
    }
    let manifest = Manifest {
        seed: cfg.seed,
        config: cfg.clone(),
        counts: counts_by_split,
        train: TrainBreakdown {
            base: n_base,
            topicalized: chosen.len(),
            topicalize_eligible: prefix[n_base],
            exposures: total_exposures,
            concatenated: n_cat,
        },
        patterns,
        max_source_len,
        max_target_len,
        naturalizer,
        audit_violations: 0,
    };
    Ok(Corpus { records, trees, manifest })
}

/// Builds on a dedicated pool of `threads` workers (0 means one per core).
pub fn build_with_threads(cfg: &RunConfig, res: &Resources, threads: usize) -> Result<Corpus, BuildError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| BuildError::Invalid(format!("thread pool: {e}")))?;
    pool.install(|| build(cfg, res))
}

const TOPICALIZABLE: [(&str, &str); 6] = [
    ("cl_trans_past", "top_trans_past"),
    ("cl_trans_pres", "top_trans_pres"),
    ("cl_dat_do_past", "top_dat_do_past"),
    ("cl_dat_do_pres", "top_dat_do_pres"),
    ("cl_dat_pp_past", "top_dat_pp_past"),
    ("cl_dat_pp_pres", "top_dat_pp_pres"),
];

/// A declarative whose direct object carries a modifier.
pub fn topicalizable(t: &DerivationTree, g: &crate::grammar::Grammar) -> bool {
    topicalize(t, g).is_some()
}

/// Fronts the modified direct object: `SubjA V ... Obj` becomes `Obj , SubjA V ...`.
pub fn topicalize(t: &DerivationTree, g: &crate::grammar::Grammar) -> Option<DerivationTree> {
    let DerivationTree::Node { prod, children } = t else { return None };
    if g.get(*prod).id != "s_decl" {
        return None;
    }
    let DerivationTree::Node { prod: cl, children: args } = &children[0] else { return None };
    let cl_id = g.get(*cl).id.as_str();
    let top_id = TOPICALIZABLE.iter().find(|(c, _)| *c == cl_id)?.1;
    let obj_at = g.get(*cl).rhs.iter().position(|s| s.as_nonterminal() == Some("Obj"))?;
    let obj = &args[obj_at];
    if obj.prod().map(|p| g.get(p).id.as_str()) != Some("obj_mod") {
        return None;
    }
    let mut rest: Vec<DerivationTree> = args.iter().enumerate().filter(|&(i, _)| i != obj_at).map(|(_, c)| c.clone()).collect();
    let mut top_children = vec![obj.clone(), DerivationTree::Literal];
    top_children.append(&mut rest);
    let top = DerivationTree::Node { prod: g.id_of(top_id)?, children: top_children };
    Some(DerivationTree::Node {
        prod: g.id_of("s_top")?,
        children: vec![top, children[1].clone()],
    })
}

/// Cross-file resource checks plus grammar validation of every start symbol the build samples from.
pub fn validate(res: &Resources, zipf_exponent: f64) -> Vec<String> {
    let mut out = res.violations();
    let inv = Inventory::default();
    let mut starts: Vec<(String, &[&str])> = vec![("S".into(), &[])];
    for p in &inv.patterns {
        for s in crate::patterns::start_symbols(p, &res.grammar) {
            starts.push((s, p.targets));
        }
    }
    for (start, targets) in starts {
        let opts = PcfgOptions::new(zipf_exponent).with_targets(targets.iter().copied());
        let g = Pcfg::reachable(res.grammar.clone(), res.lexicon.clone(), &start, opts);
        out.extend(crate::grammar::validate_grammar(&g).violations.into_iter().map(|v| format!("{start}: {v}")));
    }
    out
}
