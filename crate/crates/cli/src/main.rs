use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use regex::Regex;

use compgen::analysis::analyze;
use compgen::audit::audit_gap;
use compgen::build::{build_with_threads, validate, BuildError};
use compgen::corpus::{read_corpus, read_manifest, write_corpus, Record, Split};
use compgen::grammar::{Construct, Depths};
use compgen::metrics::{score_file, MetricError, Smoothing, Whitespace};
use compgen::patterns::Inventory;
use compgen::{Resources, RunConfig};

#[derive(Parser)]
#[command(name = "compgen", version, about = "Build, audit and score English-Japanese compositional generalization corpora")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check grammars and transduction resources.
    Validate(ConfigArgs),
    /// Build a corpus and write it to the output directory.
    Generate(GenerateArgs),
    /// Re-run the gap audit over a written corpus.
    Audit(AuditArgs),
    /// Score hypotheses against a corpus split.
    Score(ScoreArgs),
    /// Print records matching the given filters.
    Inspect(InspectArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// JSON run configuration; built-in defaults when omitted. Relative resource
    /// paths resolve against the file's directory.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    scale: Option<f64>,
    /// Skip length concatenation; base sentences fill its share of train.
    #[arg(long)]
    wo_concat: bool,
    /// Check subjects of every verb against case frames, not only inanimate ones.
    #[arg(long)]
    strict_selectional: bool,
    /// Output directory; overrides the config and COMPGEN_OUT_DIR.
    #[arg(long, env = "COMPGEN_OUT_DIR")]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Args)]
struct AuditArgs {
    /// Corpus directory.
    dir: PathBuf,
    /// Resources to parse the corpus with; defaults to the manifest's configuration.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    /// Corpus directory.
    #[arg(long)]
    corpus: PathBuf,
    /// Plain text (one hypothesis per line) or JSONL with `id` and `hypothesis`.
    #[arg(long)]
    hyp: PathBuf,
    #[arg(long, default_value = "gen")]
    split: String,
    /// Score only records of this pattern.
    #[arg(long)]
    pattern: Option<String>,
    /// Where to write the JSON report.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Plain corpus BLEU without smoothing of empty n-gram orders.
    #[arg(long)]
    no_smoothing: bool,
}

#[derive(Args)]
struct InspectArgs {
    /// Corpus directory.
    dir: PathBuf,
    #[arg(long)]
    split: Option<String>,
    #[arg(long)]
    pattern: Option<String>,
    /// Construct depth, e.g. `cp=5`; repeatable.
    #[arg(long)]
    depth: Vec<String>,
    /// Regular expression matched against the source sentence.
    #[arg(long)]
    regex: Option<String>,
    #[arg(long)]
    id: Option<String>,
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Exit status 1: checks ran and failed. Exit status 2: could not run them.
enum Failure {
    Check(String),
    Io(String),
}

type Outcome = Result<(), Failure>;

fn io<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Io(e.to_string())
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, Failure> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            let mut cfg = RunConfig::from_json(&text).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
            let base = p.parent().unwrap_or(Path::new(""));
            let paths = &mut cfg.paths;
            for f in [
                &mut paths.grammar,
                &mut paths.lexicon,
                &mut paths.rules,
                &mut paths.dictionary,
                &mut paths.morphology,
                &mut paths.caseframes,
            ] {
                if let Some(rel) = f.as_ref().filter(|x| Path::new(x).is_relative()) {
                    *f = Some(base.join(rel).display().to_string());
                }
            }
            Ok(cfg)
        }
    }
}

fn load_resources(cfg: &RunConfig) -> Result<Resources, Failure> {
    Resources::load(&cfg.paths).map_err(io)
}

/// Configuration recorded with a corpus, unless one is given explicitly.
fn corpus_config(dir: &Path, explicit: Option<&Path>) -> Result<RunConfig, Failure> {
    if explicit.is_some() {
        return load_config(explicit);
    }
    match read_manifest(dir) {
        Ok(m) => Ok(m.config),
        Err(_) => Ok(RunConfig::default()),
    }
}

fn check_resources(cfg: &RunConfig, res: &Resources) -> Outcome {
    let v = validate(res, cfg.zipf_exponent);
    if v.is_empty() {
        return Ok(());
    }
    for x in &v {
        println!("violation: {x}");
    }
    Err(Failure::Check(format!("{} validation violation(s)", v.len())))
}

fn cmd_validate(a: ConfigArgs) -> Outcome {
    let cfg = load_config(a.config.as_deref())?;
    let res = load_resources(&cfg)?;
    check_resources(&cfg, &res)?;
    println!("ok: {} productions, {} lexical entries", res.grammar.len(), res.lexicon.entries().len());
    Ok(())
}

fn cmd_generate(a: GenerateArgs) -> Outcome {
    let mut cfg = load_config(a.config.config.as_deref())?;
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(s) = a.scale {
        cfg.scale = s;
    }
    if a.wo_concat {
        cfg.concatenate = false;
    }
    if a.strict_selectional {
        cfg.strict_selectional = true;
    }
    if let Some(o) = &a.out {
        cfg.out_dir = o.display().to_string();
    }
    cfg.check().map_err(io)?;
    let res = load_resources(&cfg)?;
    check_resources(&cfg, &res)?;
    let corpus = build_with_threads(&cfg, &res, a.threads).map_err(|e| match e {
        BuildError::Invalid(m) => Failure::Io(m),
        BuildError::Audit(v) => {
            for x in &v {
                eprintln!("{x}");
            }
            Failure::Check(format!("gap audit failed with {} violation(s); nothing written", v.len()))
        }
        e => Failure::Check(e.to_string()),
    })?;
    let out = PathBuf::from(&cfg.out_dir);
    write_corpus(&out, &corpus.records, &corpus.manifest).map_err(io)?;
    let m = &corpus.manifest;
    let counts: Vec<String> = m.counts.iter().map(|(s, n)| format!("{s} {n}")).collect();
    println!("wrote {}: {}", out.display(), counts.join(", "));
    println!(
        "train: {} base, {} topicalized, {} exposures, {} concatenated",
        m.train.base, m.train.topicalized, m.train.exposures, m.train.concatenated
    );
    Ok(())
}

fn parse_trees(records: &[Record], res: &Resources) -> Result<Vec<Vec<compgen::grammar::DerivationTree>>, Failure> {
    records.iter().map(|r| r.trees(&res.grammar, &res.lexicon).map_err(Failure::Io)).collect()
}

fn cmd_audit(a: AuditArgs) -> Outcome {
    let cfg = corpus_config(&a.dir, a.config.as_deref())?;
    let res = load_resources(&cfg)?;
    let records = read_corpus(&a.dir).map_err(io)?;
    let trees = parse_trees(&records, &res)?;
    let v = audit_gap(&records, &trees, &Inventory::default(), &res.grammar, &res.lexicon);
    for x in &v {
        println!("{x}");
    }
    if v.is_empty() {
        println!("ok: {} records, 0 violations", records.len());
        Ok(())
    } else {
        Err(Failure::Check(format!("{} violation(s)", v.len())))
    }
}

fn cmd_score(a: ScoreArgs) -> Outcome {
    let split = Split::parse(&a.split).ok_or_else(|| Failure::Io(format!("unknown split {}", a.split)))?;
    let records: Vec<Record> = read_corpus(&a.corpus)
        .map_err(io)?
        .into_iter()
        .filter(|r| r.split == split && a.pattern.as_ref().is_none_or(|p| r.pattern.as_ref() == Some(p)))
        .collect();
    let text = fs::read_to_string(&a.hyp).map_err(|e| Failure::Io(format!("{}: {e}", a.hyp.display())))?;
    let smoothing = if a.no_smoothing { Smoothing::None } else { Smoothing::Exp };
    let report = score_file(&text, &records, &Inventory::default(), &Whitespace, smoothing).map_err(|e| match e {
        MetricError::Alignment { .. } | MetricError::Length { .. } => Failure::Check(format!("{}: {e}", a.hyp.display())),
        MetricError::Empty => Failure::Io(format!("no {split} records to score")),
    })?;
    print!("{}", report.table());
    if let Some(p) = &a.report {
        fs::write(p, report.to_json()).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn parse_depth(s: &str) -> Result<(Construct, u32), Failure> {
    let bad = || Failure::Io(format!("--depth expects construct=N, got {s}"));
    let (c, n) = s.split_once('=').ok_or_else(bad)?;
    Ok((Construct::parse(c.trim()).ok_or_else(bad)?, n.trim().parse().map_err(|_| bad())?))
}

fn cmd_inspect(a: InspectArgs) -> Outcome {
    let split = match &a.split {
        Some(s) => Some(Split::parse(s).ok_or_else(|| Failure::Io(format!("unknown split {s}")))?),
        None => None,
    };
    let depths: Vec<(Construct, u32)> = a.depth.iter().map(|d| parse_depth(d)).collect::<Result<_, _>>()?;
    let re = a.regex.as_deref().map(Regex::new).transpose().map_err(io)?;
    let cfg = corpus_config(&a.dir, a.config.as_deref())?;
    let res = load_resources(&cfg)?;
    let records = read_corpus(&a.dir).map_err(io)?;
    let mut shown = 0;
    for r in &records {
        if a.limit.is_some_and(|l| shown >= l) {
            break;
        }
        let keep = split.is_none_or(|s| r.split == s)
            && a.pattern.as_ref().is_none_or(|p| r.pattern.as_ref() == Some(p))
            && a.id.as_ref().is_none_or(|i| &r.id == i)
            && re.as_ref().is_none_or(|re| re.is_match(&r.source));
        if !keep {
            continue;
        }
        let trees = r.trees(&res.grammar, &res.lexicon).map_err(Failure::Io)?;
        let d = trees.iter().fold(Depths::default(), |acc, t| acc.max(analyze(t, &res.grammar).depths));
        if !depths.iter().all(|&(c, n)| d.get(c) == n) {
            continue;
        }
        shown += 1;
        println!("{} [{}] {}", r.id, r.split, r.pattern.as_deref().unwrap_or("-"));
        println!("  en: {}", r.source);
        println!("  ja: {}", r.target);
        let ds: Vec<String> = Construct::ALL.iter().map(|&c| format!("{c}={}", d.get(c))).collect();
        println!("  depths: {}", ds.join(" "));
        if let Some(ann) = &r.annotation {
            println!("  annotation: {}", serde_json::to_string(ann).expect("annotation serializes"));
        }
        if !r.provenance.augmentation.is_empty() {
            println!("  augmentation: {}", r.provenance.augmentation.join(", "));
        }
        for t in &r.provenance.trees {
            println!("  tree: {t}");
        }
    }
    println!("{shown} record(s) shown");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Validate(a) => cmd_validate(a),
        Cmd::Generate(a) => cmd_generate(a),
        Cmd::Audit(a) => cmd_audit(a),
        Cmd::Score(a) => cmd_score(a),
        Cmd::Inspect(a) => cmd_inspect(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
