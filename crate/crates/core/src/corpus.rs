//! Corpus records and their on-disk forms: one JSONL and one TSV file per
//! split plus a JSON manifest.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::LoadError;
use crate::grammar::{DerivationTree, Grammar, Lexicon};
use crate::naturalizer::Rejection;
use crate::patterns::Annotation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
    Gen,
}

impl Split {
    pub const ALL: [Split; 4] = [Split::Train, Split::Dev, Split::Test, Split::Gen];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
            Split::Gen => "gen",
        }
    }

    pub fn parse(s: &str) -> Option<Split> {
        Split::ALL.into_iter().find(|x| x.as_str() == s)
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    /// `S`, `gen:<pattern>`, `gen-cp:<pattern>` or `exp:<pattern>`.
    pub grammar: String,
    pub augmentation: Vec<String>,
    /// Bracketed derivations, one per concatenated segment.
    pub trees: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub split: Split,
    pub pattern: Option<String>,
    pub source: String,
    pub target: String,
    pub annotation: Option<Annotation>,
    pub provenance: Provenance,
}

impl Record {
    pub fn source_tokens(&self) -> Vec<&str> {
        self.source.split_whitespace().collect()
    }

    pub fn target_tokens(&self) -> Vec<&str> {
        self.target.split_whitespace().collect()
    }

    pub fn trees(&self, g: &Grammar, lex: &Lexicon) -> Result<Vec<DerivationTree>, String> {
        self.provenance
            .trees
            .iter()
            .map(|t| DerivationTree::parse_bracketed(t, g, lex).map_err(|e| format!("{}: {e}", self.id)))
            .collect()
    }

    /// Start symbol of the grammar the record's trees derive from.
    pub fn start_symbol(&self) -> String {
        let g = &self.provenance.grammar;
        if let Some(p) = g.strip_prefix("gen-cp:") {
            format!("GC_{p}")
        } else if let Some(p) = g.strip_prefix("gen:") {
            format!("G_{p}")
        } else if let Some(p) = g.strip_prefix("exp:") {
            format!("X_{p}")
        } else {
            g.clone()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainBreakdown {
    pub base: usize,
    pub topicalized: usize,
    pub topicalize_eligible: usize,
    pub exposures: usize,
    pub concatenated: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternCounts {
    pub gen: usize,
    pub gen_in_cp: usize,
    pub exposures: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NaturalizerStats {
    pub drawn: usize,
    pub repaired: usize,
    pub duplicate_lexeme: usize,
    pub unrepairable: usize,
    /// First few sentences where fixing one constraint left another.
    pub residuals: Vec<Rejection>,
}

impl NaturalizerStats {
    pub fn absorb(&mut self, o: &NaturalizerStats) {
        self.drawn += o.drawn;
        self.repaired += o.repaired;
        self.duplicate_lexeme += o.duplicate_lexeme;
        self.unrepairable += o.unrepairable;
        for r in &o.residuals {
            if self.residuals.len() < RESIDUAL_LOG {
                self.residuals.push(r.clone());
            }
        }
    }
}

pub const RESIDUAL_LOG: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub config: RunConfig,
    pub counts: BTreeMap<Split, usize>,
    pub train: TrainBreakdown,
    pub patterns: BTreeMap<String, PatternCounts>,
    pub max_source_len: BTreeMap<Split, usize>,
    pub max_target_len: BTreeMap<Split, usize>,
    pub naturalizer: NaturalizerStats,
    pub audit_violations: usize,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

fn io_err(path: &Path, source: std::io::Error) -> LoadError {
    LoadError::Io { path: path.to_path_buf(), source }
}

/// JSONL lines of one split, in the given order.
pub fn jsonl(records: &[&Record]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn tsv(records: &[&Record]) -> String {
    let mut out = String::from("id\tsplit\tpattern\tsource\ttarget\n");
    for r in records {
        let pattern = r.pattern.as_deref().unwrap_or("-");
        out.push_str(&format!("{}\t{}\t{}\t{}\t{}\n", r.id, r.split, pattern, r.source, r.target));
    }
    out
}

/// File name and contents of every output file, in a fixed order.
pub fn render_files(records: &[Record], manifest: &Manifest) -> Vec<(String, String)> {
    let mut files = Vec::new();
    for split in Split::ALL {
        let rs: Vec<&Record> = records.iter().filter(|r| r.split == split).collect();
        files.push((format!("{split}.jsonl"), jsonl(&rs)));
        files.push((format!("{split}.tsv"), tsv(&rs)));
    }
    files.push(("manifest.json".into(), manifest.to_json()));
    files
}

pub fn write_corpus(dir: &Path, records: &[Record], manifest: &Manifest) -> Result<(), LoadError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for (name, text) in render_files(records, manifest) {
        let path = dir.join(name);
        let f = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
        let mut w = BufWriter::new(f);
        w.write_all(text.as_bytes()).and_then(|_| w.flush()).map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}

pub fn read_jsonl(path: &Path) -> Result<Vec<Record>, LoadError> {
    let f = fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let r: Record = serde_json::from_str(&line)
            .map_err(|e| LoadError::Format { line: i + 1, msg: e.to_string() }.in_file(path.display().to_string()))?;
        out.push(r);
    }
    Ok(out)
}

/// Records of every split present in `dir`, in split then file order.
pub fn read_corpus(dir: &Path) -> Result<Vec<Record>, LoadError> {
    let mut out = Vec::new();
    let mut any = false;
    for split in Split::ALL {
        let path = dir.join(format!("{split}.jsonl"));
        if path.exists() {
            any = true;
            out.extend(read_jsonl(&path)?);
        }
    }
    if !any {
        return Err(io_err(dir, std::io::Error::new(std::io::ErrorKind::NotFound, "no split files")));
    }
    Ok(out)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest, LoadError> {
    let path = dir.join("manifest.json");
    let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    serde_json::from_str(&text).map_err(|e| LoadError::Invalid(format!("{}: {e}", path.display())))
}
