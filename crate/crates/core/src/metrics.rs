//! Exact match, corpus BLEU and partial match over whitespace-tokenized
//! Japanese, with per-group and per-pattern aggregation.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Record;
use crate::grammar::Role;
use crate::patterns::{Annotation, Group, Inventory};

/// Grammatical role read off the particle that follows a constituent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParticleRole {
    Subject,
    DirectObject,
    IndirectObject,
    GenitiveModifier,
    AgentBy,
    Unknown,
}

impl ParticleRole {
    pub fn of_particle(tok: &str) -> ParticleRole {
        match tok {
            "ga" => ParticleRole::Subject,
            "o" => ParticleRole::DirectObject,
            "ni" => ParticleRole::IndirectObject,
            "no" => ParticleRole::GenitiveModifier,
            "niyotte" => ParticleRole::AgentBy,
            _ => ParticleRole::Unknown,
        }
    }

    /// The particle role a grammar role surfaces as; primitives carry none.
    pub fn of_role(r: Role) -> Option<ParticleRole> {
        match r {
            Role::Subject => Some(ParticleRole::Subject),
            Role::DirectObject => Some(ParticleRole::DirectObject),
            Role::IndirectObject => Some(ParticleRole::IndirectObject),
            Role::Agent => Some(ParticleRole::AgentBy),
            Role::Locative => Some(ParticleRole::GenitiveModifier),
            Role::Primitive => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleExtraction {
    pub role: ParticleRole,
    /// The particle token, when the constituent was found and something follows it.
    pub evidence: Option<String>,
}

/// Splits hypothesis text into tokens. Metrics only ever see the output of one of these.
pub trait Tokenize: Sync {
    fn tokenize(&self, text: &str) -> Vec<String>;
}

pub struct Whitespace;

impl Tokenize for Whitespace {
    fn tokenize(&self, text: &str) -> Vec<String> {
        text.split_whitespace().map(String::from).collect()
    }
}

pub fn exact_match<S: AsRef<str>, T: AsRef<str>>(hyp: &[S], reference: &[T]) -> bool {
    hyp.len() == reference.len() && hyp.iter().zip(reference).all(|(a, b)| a.as_ref() == b.as_ref())
}

fn occurrences<'a, S: AsRef<str>>(hyp: &'a [S], constituent: &'a [String]) -> impl Iterator<Item = usize> + 'a {
    let n = constituent.len();
    (0..(hyp.len() + 1).saturating_sub(n))
        .filter(move |&i| n > 0 && hyp[i..i + n].iter().zip(constituent).all(|(a, b)| a.as_ref() == b))
        .map(move |i| i + n)
}

fn role_after<S: AsRef<str>>(hyp: &[S], end: usize) -> RoleExtraction {
    match hyp.get(end) {
        Some(t) => RoleExtraction { role: ParticleRole::of_particle(t.as_ref()), evidence: Some(t.as_ref().to_string()) },
        None => RoleExtraction { role: ParticleRole::Unknown, evidence: None },
    }
}

/// Role of the first occurrence of `constituent` in `hyp`.
pub fn extract_role<S: AsRef<str>>(hyp: &[S], constituent: &[String]) -> RoleExtraction {
    match occurrences(hyp, constituent).next() {
        Some(end) => role_after(hyp, end),
        None => RoleExtraction { role: ParticleRole::Unknown, evidence: None },
    }
}

/// Whether the constituent's reference translation occurs in `hyp` and, when
/// the annotation names a role, some occurrence carries that role. `None` for
/// records without a constituent.
pub fn partial_match<S: AsRef<str>>(hyp: &[S], ann: &Annotation) -> Option<bool> {
    let constituent = ann.constituent.as_ref()?;
    let want = ann.expected_role.and_then(ParticleRole::of_role);
    Some(occurrences(hyp, constituent).any(|end| want.is_none_or(|w| role_after(hyp, end).role == w)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothing {
    None,
    /// Each order with no matches gets precision 1 / (2^k · total) for the k-th such order.
    Exp,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("empty corpus")]
    Empty,
    #[error("{hyps} hypotheses for {refs} references")]
    Length { hyps: usize, refs: usize },
    #[error("line {line}: {msg}")]
    Alignment { line: usize, msg: String },
}

pub const MAX_ORDER: usize = 4;

/// Matched and total n-gram counts per order plus hypothesis and reference lengths.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub matches: [u64; MAX_ORDER],
    pub totals: [u64; MAX_ORDER],
    pub hyp_len: u64,
    pub ref_len: u64,
}

impl BleuStats {
    pub fn sentence<S: AsRef<str>, T: AsRef<str>>(hyp: &[S], reference: &[T]) -> BleuStats {
        let mut s = BleuStats { hyp_len: hyp.len() as u64, ref_len: reference.len() as u64, ..Default::default() };
        for n in 1..=MAX_ORDER {
            let mut ref_counts: HashMap<Vec<&str>, u64> = HashMap::new();
            for w in reference.windows(n) {
                *ref_counts.entry(w.iter().map(AsRef::as_ref).collect()).or_default() += 1;
            }
            for w in hyp.windows(n) {
                s.totals[n - 1] += 1;
                let key: Vec<&str> = w.iter().map(AsRef::as_ref).collect();
                if let Some(c) = ref_counts.get_mut(&key) {
                    if *c > 0 {
                        *c -= 1;
                        s.matches[n - 1] += 1;
                    }
                }
            }
        }
        s
    }

    pub fn add(&mut self, o: &BleuStats) {
        for n in 0..MAX_ORDER {
            self.matches[n] += o.matches[n];
            self.totals[n] += o.totals[n];
        }
        self.hyp_len += o.hyp_len;
        self.ref_len += o.ref_len;
    }

    /// Score in [0, 100].
    pub fn score(&self, smoothing: Smoothing) -> f64 {
        if self.hyp_len == 0 {
            return 0.0;
        }
        let mut log_sum = 0.0;
        let mut halvings = 1.0;
        for n in 0..MAX_ORDER {
            let p = if self.totals[n] == 0 {
                0.0
            } else if self.matches[n] == 0 {
                match smoothing {
                    Smoothing::Exp => {
                        halvings *= 2.0;
                        1.0 / (halvings * self.totals[n] as f64)
                    }
                    Smoothing::None => 0.0,
                }
            } else {
                self.matches[n] as f64 / self.totals[n] as f64
            };
            if p == 0.0 {
                return 0.0;
            }
            log_sum += p.ln();
        }
        let bp = if self.hyp_len < self.ref_len { (1.0 - self.ref_len as f64 / self.hyp_len as f64).exp() } else { 1.0 };
        100.0 * bp * (log_sum / MAX_ORDER as f64).exp()
    }
}

pub fn corpus_bleu<S: AsRef<str> + Sync, T: AsRef<str> + Sync>(
    hyps: &[Vec<S>],
    refs: &[Vec<T>],
    smoothing: Smoothing,
) -> Result<f64, MetricError> {
    if hyps.len() != refs.len() {
        return Err(MetricError::Length { hyps: hyps.len(), refs: refs.len() });
    }
    if hyps.is_empty() {
        return Err(MetricError::Empty);
    }
    let mut total = BleuStats::default();
    for (h, r) in hyps.iter().zip(refs) {
        total.add(&BleuStats::sentence(h, r));
    }
    Ok(total.score(smoothing))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub records: usize,
    pub exact_pct: f64,
    pub bleu: f64,
    /// Over records with a constituent; `None` when there are none.
    pub partial_pct: Option<f64>,
    pub partial_records: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupRow {
    pub group: Group,
    #[serde(flatten)]
    pub scores: Scores,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternRow {
    pub pattern: String,
    pub group: Group,
    #[serde(flatten)]
    pub scores: Scores,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub overall: Scores,
    pub per_group: Vec<GroupRow>,
    pub per_pattern: Vec<PatternRow>,
    pub scored: usize,
    /// Records without a partial-match constituent.
    pub skipped: usize,
    pub smoothing: Smoothing,
}

/// Per-record verdicts, kept for aggregation.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub exact: bool,
    pub partial: Option<bool>,
    pub bleu: BleuStats,
}

pub fn verdict(hyp: &[String], r: &Record) -> Verdict {
    let reference = r.target_tokens();
    Verdict {
        exact: exact_match(hyp, &reference),
        partial: r.annotation.as_ref().and_then(|a| partial_match(hyp, a)),
        bleu: BleuStats::sentence(hyp, &reference),
    }
}

fn aggregate<'a>(vs: impl Iterator<Item = &'a Verdict>, smoothing: Smoothing) -> Scores {
    let (mut n, mut exact, mut pn, mut partial) = (0usize, 0usize, 0usize, 0usize);
    let mut bleu = BleuStats::default();
    for v in vs {
        n += 1;
        exact += v.exact as usize;
        if let Some(p) = v.partial {
            pn += 1;
            partial += p as usize;
        }
        bleu.add(&v.bleu);
    }
    let pct = |a: usize, b: usize| 100.0 * a as f64 / b as f64;
    Scores {
        records: n,
        exact_pct: if n == 0 { 0.0 } else { pct(exact, n) },
        bleu: bleu.score(smoothing),
        partial_pct: (pn > 0).then(|| pct(partial, pn)),
        partial_records: pn,
    }
}

/// Scores hypotheses already aligned one-to-one with `records`.
pub fn score_records(
    records: &[Record],
    hyps: &[Vec<String>],
    inv: &Inventory,
    smoothing: Smoothing,
) -> Result<EvalReport, MetricError> {
    if records.len() != hyps.len() {
        return Err(MetricError::Length { hyps: hyps.len(), refs: records.len() });
    }
    if records.is_empty() {
        return Err(MetricError::Empty);
    }
    let verdicts: Vec<Verdict> = records.par_iter().zip(hyps.par_iter()).map(|(r, h)| verdict(h, r)).collect();
    let overall = aggregate(verdicts.iter(), smoothing);
    let mut by_pattern: BTreeMap<&str, Vec<&Verdict>> = BTreeMap::new();
    for (r, v) in records.iter().zip(&verdicts) {
        if let Some(p) = r.pattern.as_deref().filter(|p| inv.get(p).is_some()) {
            by_pattern.entry(p).or_default().push(v);
        }
    }
    let mut per_pattern = Vec::new();
    let mut per_group = Vec::new();
    for group in Group::ALL {
        let mut in_group: Vec<&Verdict> = Vec::new();
        for p in inv.patterns.iter().filter(|p| p.group == group) {
            if let Some(vs) = by_pattern.get(p.id) {
                in_group.extend(vs.iter().copied());
                per_pattern.push(PatternRow { pattern: p.id.into(), group, scores: aggregate(vs.iter().copied(), smoothing) });
            }
        }
        if !in_group.is_empty() {
            per_group.push(GroupRow { group, scores: aggregate(in_group.into_iter(), smoothing) });
        }
    }
    let scored = overall.records;
    let skipped = scored - overall.partial_records;
    Ok(EvalReport { overall, per_group, per_pattern, scored, skipped, smoothing })
}

#[derive(Deserialize)]
struct JsonHyp {
    id: String,
    hypothesis: String,
}

/// Aligns a hypothesis file with `records`: either plain text with one line
/// per record, or JSONL objects `{id, hypothesis}` in record order.
pub fn align_hypotheses(text: &str, records: &[Record], tok: &dyn Tokenize) -> Result<Vec<Vec<String>>, MetricError> {
    let lines: Vec<&str> = text.lines().collect();
    let lines = match lines.last() {
        Some(&"") => &lines[..lines.len() - 1],
        _ => &lines[..],
    };
    let is_json = lines.first().is_some_and(|l| l.trim_start().starts_with('{'));
    let mut out = Vec::with_capacity(records.len());
    for (i, line) in lines.iter().enumerate() {
        let Some(r) = records.get(i) else {
            return Err(MetricError::Alignment { line: i + 1, msg: format!("only {} records to score", records.len()) });
        };
        let hyp = if is_json {
            let h: JsonHyp = serde_json::from_str(line).map_err(|e| MetricError::Alignment { line: i + 1, msg: e.to_string() })?;
            if h.id != r.id {
                return Err(MetricError::Alignment { line: i + 1, msg: format!("id {} where {} was expected", h.id, r.id) });
            }
            h.hypothesis
        } else {
            line.to_string()
        };
        out.push(tok.tokenize(&hyp));
    }
    if out.len() < records.len() {
        return Err(MetricError::Alignment {
            line: out.len() + 1,
            msg: format!("{} hypotheses for {} records", out.len(), records.len()),
        });
    }
    Ok(out)
}

pub fn score_file(
    text: &str,
    records: &[Record],
    inv: &Inventory,
    tok: &dyn Tokenize,
    smoothing: Smoothing,
) -> Result<EvalReport, MetricError> {
    let hyps = align_hypotheses(text, records, tok)?;
    score_records(records, &hyps, inv, smoothing)
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let row = |out: &mut String, name: &str, s: &Scores| {
            let partial = s.partial_pct.map_or("-".to_string(), |p| format!("{p:.2}"));
            let _ = writeln!(out, "{name:<36} {:>7} {:>8.2} {:>8.2} {:>8}", s.records, s.exact_pct, s.bleu, partial);
        };
        let _ = writeln!(out, "{:<36} {:>7} {:>8} {:>8} {:>8}", "", "n", "exact", "bleu", "partial");
        row(&mut out, "overall", &self.overall);
        for g in &self.per_group {
            row(&mut out, g.group.as_str(), &g.scores);
        }
        for p in &self.per_pattern {
            row(&mut out, &format!("  {}", p.pattern), &p.scores);
        }
        let _ = writeln!(out, "scored {}, without partial constituent {}", self.scored, self.skipped);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn particles_map_to_roles() {
        let hyp = toks("jyosei ga panda o mituke ta");
        assert_eq!(extract_role(&hyp, &toks("panda")).role, ParticleRole::DirectObject);
        assert_eq!(extract_role(&hyp, &toks("jyosei")).role, ParticleRole::Subject);
        assert_eq!(extract_role(&hyp, &toks("inu")).role, ParticleRole::Unknown);
        assert_eq!(extract_role(&hyp, &toks("ta")), RoleExtraction { role: ParticleRole::Unknown, evidence: None });
    }

    #[test]
    fn empty_hypothesis_scores_zero() {
        let s = BleuStats::sentence(&Vec::<String>::new(), &toks("a b c d"));
        assert_eq!(s.score(Smoothing::Exp), 0.0);
    }

    #[test]
    fn short_sentences_without_four_grams_score_zero() {
        assert_eq!(BleuStats::sentence(&toks("a b"), &toks("a b")).score(Smoothing::Exp), 0.0);
    }
}
