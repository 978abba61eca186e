use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::LoadError;
use crate::grammar::lexicon::{Form, LexEntry, Pos};

/// Exact nonnegative rational, parsed from decimals like `0.85` or fractions like `17/20`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Ratio {
    pub num: u128,
    pub den: u128,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Ratio {
    pub const ZERO: Ratio = Ratio { num: 0, den: 1 };
    pub const ONE: Ratio = Ratio { num: 1, den: 1 };

    pub fn new(num: u128, den: u128) -> Ratio {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den).max(1);
        Ratio { num: num / g, den: den / g }
    }

    pub fn parse(s: &str) -> Option<Ratio> {
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            let den: u128 = b.trim().parse().ok()?;
            if den == 0 {
                return None;
            }
            return Some(Ratio::new(a.trim().parse().ok()?, den));
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if int.is_empty() && frac.is_empty() {
            return None;
        }
        if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) || frac.len() > 18 {
            return None;
        }
        let den = 10u128.pow(frac.len() as u32);
        let int: u128 = if int.is_empty() { 0 } else { int.parse().ok()? };
        let frac_v: u128 = if frac.is_empty() { 0 } else { frac.parse().ok()? };
        Some(Ratio::new(int * den + frac_v, den))
    }


    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

impl std::ops::Add for Ratio {
    type Output = Ratio;

    fn add(self, o: Ratio) -> Ratio {
        let g = gcd(self.den, o.den);
        let den = self.den / g * o.den;
        Ratio::new(self.num * (den / self.den) + o.num * (den / o.den), den)
    }
}

impl fmt::Display for Ratio {
    /// Decimal when the denominator divides a power of ten, `a/b` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = self.den;
        let mut digits = 0u32;
        while d.is_multiple_of(10) {
            d /= 10;
            digits += 1;
        }
        while d.is_multiple_of(2) || d.is_multiple_of(5) {
            if d.is_multiple_of(2) {
                d /= 2;
            } else {
                d /= 5;
            }
            digits += 1;
        }
        if d != 1 {
            return write!(f, "{}/{}", self.num, self.den);
        }
        let scale = 10u128.pow(digits);
        let scaled = self.num * (scale / self.den);
        let int = scaled / scale;
        if digits == 0 {
            return write!(f, "{int}");
        }
        let frac = format!("{:0width$}", scaled % scale, width = digits as usize);
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            write!(f, "{int}")
        } else {
            write!(f, "{int}.{frac}")
        }
    }
}

/// A lexical slot: `POS[key=value,...]`. The `form` key selects the surface
/// form; a bare `target` flag restricts the slot to the grammar instance's
/// target lemmas. Other keys must match one of the entry's feature values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Slot {
    pub pos: Pos,
    pub constraints: Vec<(String, String)>,
    pub form: Form,
    pub target: bool,
}

impl Slot {
    pub fn parse(s: &str) -> Result<Slot, String> {
        let open = s.find('[').ok_or_else(|| format!("slot {s} lacks brackets"))?;
        if !s.ends_with(']') {
            return Err(format!("slot {s} lacks closing bracket"));
        }
        let pos = Pos::parse(&s[..open]).ok_or_else(|| format!("unknown part of speech in {s}"))?;
        let mut slot = Slot { pos, constraints: Vec::new(), form: Form::Base, target: false };
        let mut form = None;
        for item in s[open + 1..s.len() - 1].split(',').map(str::trim).filter(|x| !x.is_empty()) {
            if item == "target" {
                slot.target = true;
                continue;
            }
            let (k, v) = item.split_once('=').ok_or_else(|| format!("bad slot constraint {item} in {s}"))?;
            if k == "form" {
                form = Some(Form::parse(v).ok_or_else(|| format!("unknown form {v} in {s}"))?);
            } else {
                slot.constraints.push((k.to_string(), v.to_string()));
            }
        }
        match (pos, form) {
            (Pos::Verb, None) => return Err(format!("verb slot {s} needs a form")),
            (_, Some(f)) => slot.form = f,
            _ => {}
        }
        Ok(slot)
    }

    /// Whether an entry fits this slot, ignoring the target restriction.
    pub fn admits(&self, e: &LexEntry) -> bool {
        e.pos == self.pos
            && self.constraints.iter().all(|(k, v)| e.has_feature(k, v))
            && e.surface(self.form).is_some()
    }

    /// Like `admits` but without requiring the form to exist.
    pub fn matches_features(&self, e: &LexEntry) -> bool {
        e.pos == self.pos && self.constraints.iter().all(|(k, v)| e.has_feature(k, v))
    }

    /// The verb frame this slot selects, if it constrains `verb_class`.
    pub fn frame(&self) -> Option<&str> {
        self.constraints.iter().find(|(k, _)| k == "verb_class").map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items: Vec<String> = self.constraints.iter().map(|(k, v)| format!("{k}={v}")).collect();
        if self.form != Form::Base || self.pos == Pos::Verb {
            items.push(format!("form={}", self.form));
        }
        if self.target {
            items.push("target".into());
        }
        write!(f, "{}[{}]", self.pos, items.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Nonterminal(String),
    Slot(Slot),
    Literal(String),
}

impl Symbol {
    /// Nonterminals are capitalized identifiers; anything with brackets is a slot; the rest are literals.
    pub fn parse(tok: &str) -> Result<Symbol, String> {
        if tok.contains('[') {
            return Slot::parse(tok).map(Symbol::Slot);
        }
        let mut chars = tok.chars();
        let first = chars.next().ok_or("empty symbol")?;
        if first.is_ascii_uppercase() && chars.all(|c| c.is_ascii_alphanumeric() || c == '_') {
            Ok(Symbol::Nonterminal(tok.to_string()))
        } else {
            Ok(Symbol::Literal(tok.to_string()))
        }
    }

    pub fn as_nonterminal(&self) -> Option<&str> {
        match self {
            Symbol::Nonterminal(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Nonterminal(n) | Symbol::Literal(n) => f.write_str(n),
            Symbol::Slot(s) => s.fmt(f),
        }
    }
}

pub type ProdId = u32;

#[derive(Clone, Debug, PartialEq)]
pub struct Production {
    pub id: String,
    pub lhs: String,
    pub rhs: Vec<Symbol>,
    pub weight: Ratio,
}

impl Production {
    pub fn verb_slot(&self) -> Option<(usize, &Slot)> {
        self.rhs.iter().enumerate().find_map(|(i, s)| match s {
            Symbol::Slot(sl) if sl.pos == Pos::Verb => Some((i, sl)),
            _ => None,
        })
    }
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rhs: Vec<String> = self.rhs.iter().map(|s| s.to_string()).collect();
        write!(f, "{}\t{} -> {}\t{}", self.id, self.lhs, rhs.join(" "), self.weight)
    }
}

/// A bank of productions loaded from one grammar file. Several start symbols
/// may live in the same bank; a [`crate::grammar::Pcfg`] picks one.
#[derive(Clone, Debug, Default)]
pub struct Grammar {
    productions: Vec<Production>,
    by_id: HashMap<String, ProdId>,
    by_lhs: BTreeMap<String, Vec<ProdId>>,
}

impl Grammar {
    pub fn new(productions: Vec<Production>) -> Result<Grammar, LoadError> {
        let mut g = Grammar::default();
        for (i, p) in productions.into_iter().enumerate() {
            if p.rhs.is_empty() {
                return Err(LoadError::Invalid(format!("production {} has an empty right-hand side", p.id)));
            }
            if g.by_id.insert(p.id.clone(), i as ProdId).is_some() {
                return Err(LoadError::Invalid(format!("duplicate production id {}", p.id)));
            }
            g.by_lhs.entry(p.lhs.clone()).or_default().push(i as ProdId);
            g.productions.push(p);
        }
        Ok(g)
    }

    /// `id <tab> lhs -> rhs... <tab> weight`, `#` comments.
    pub fn parse(text: &str) -> Result<Grammar, LoadError> {
        let mut prods = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let err = |msg: String| LoadError::Format { line, msg };
            let cols: Vec<&str> = raw.split('\t').collect();
            if cols.len() != 3 {
                return Err(err(format!("expected 3 tab-separated columns, found {}", cols.len())));
            }
            let (lhs, rhs) = cols[1].split_once("->").ok_or_else(|| err("missing ->".into()))?;
            let lhs = lhs.trim();
            match Symbol::parse(lhs) {
                Ok(Symbol::Nonterminal(_)) => {}
                _ => return Err(err(format!("left-hand side {lhs} is not a nonterminal"))),
            }
            let rhs = rhs.split_whitespace().map(Symbol::parse).collect::<Result<Vec<_>, _>>().map_err(err)?;
            if rhs.is_empty() {
                return Err(err(format!("production {} has an empty right-hand side", cols[0])));
            }
            let weight = Ratio::parse(cols[2]).ok_or_else(|| err(format!("bad weight {}", cols[2])))?;
            prods.push(Production { id: cols[0].trim().to_string(), lhs: lhs.to_string(), rhs, weight });
        }
        Grammar::new(prods)
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn get(&self, id: ProdId) -> &Production {
        &self.productions[id as usize]
    }

    pub fn id_of(&self, name: &str) -> Option<ProdId> {
        self.by_id.get(name).copied()
    }

    pub fn alternatives(&self, lhs: &str) -> &[ProdId] {
        self.by_lhs.get(lhs).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = &str> {
        self.by_lhs.keys().map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.productions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.productions.is_empty()
    }
}
