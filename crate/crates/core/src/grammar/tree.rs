use std::fmt::Write as _;

use crate::grammar::lexicon::{EntryId, Form, Lexicon};
use crate::grammar::production::{Grammar, ProdId, Symbol};

/// A derivation. Children line up one-to-one with the production's rhs,
/// literals included.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DerivationTree {
    Node { prod: ProdId, children: Vec<DerivationTree> },
    Leaf { entry: EntryId, form: Form },
    Literal,
}

impl DerivationTree {
    pub fn prod(&self) -> Option<ProdId> {
        match self {
            DerivationTree::Node { prod, .. } => Some(*prod),
            _ => None,
        }
    }

    pub fn children(&self) -> &[DerivationTree] {
        match self {
            DerivationTree::Node { children, .. } => children,
            _ => &[],
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&DerivationTree> {
        let mut t = self;
        for &i in path {
            t = t.children().get(i)?;
        }
        Some(t)
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut DerivationTree> {
        let mut t = self;
        for &i in path {
            t = match t {
                DerivationTree::Node { children, .. } => children.get_mut(i)?,
                _ => return None,
            };
        }
        Some(t)
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }

    /// Visits every node with its path from the root, parents before children.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&[usize], &'a DerivationTree)) {
        let mut path = Vec::new();
        walk_rec(self, &mut path, f);
    }

    /// Production ids and lemmas in bracket notation: `(s_decl (cl_trans_past ...) .)`.
    pub fn render(&self, g: &Grammar, lex: &Lexicon) -> String {
        let mut out = String::new();
        render_rec(self, None, g, lex, &mut out);
        out
    }

    pub fn parse_bracketed(text: &str, g: &Grammar, lex: &Lexicon) -> Result<DerivationTree, String> {
        let toks = bracket_tokens(text);
        let mut pos = 0;
        let t = parse_node(&toks, &mut pos, g, lex)?;
        if pos != toks.len() {
            return Err(format!("trailing input after tree at token {pos}"));
        }
        Ok(t)
    }

    /// Leaf surfaces without orthographic adjustment.
    pub fn raw_yield(&self, g: &Grammar, lex: &Lexicon) -> Vec<String> {
        let mut out = Vec::new();
        raw_yield_rec(self, None, g, lex, &mut out);
        out
    }
}

fn walk_rec<'a>(t: &'a DerivationTree, path: &mut Vec<usize>, f: &mut impl FnMut(&[usize], &'a DerivationTree)) {
    f(path, t);
    for (i, c) in t.children().iter().enumerate() {
        path.push(i);
        walk_rec(c, path, f);
        path.pop();
    }
}

fn raw_yield_rec(t: &DerivationTree, literal: Option<&str>, g: &Grammar, lex: &Lexicon, out: &mut Vec<String>) {
    match t {
        DerivationTree::Node { prod, children } => {
            let p = g.get(*prod);
            for (c, sym) in children.iter().zip(&p.rhs) {
                let lit = match sym {
                    Symbol::Literal(s) => Some(s.as_str()),
                    _ => None,
                };
                raw_yield_rec(c, lit, g, lex, out);
            }
        }
        DerivationTree::Leaf { entry, form } => {
            let e = lex.get(*entry);
            out.push(e.surface(*form).unwrap_or(&e.lemma).to_string());
        }
        DerivationTree::Literal => out.push(literal.unwrap_or("?").to_string()),
    }
}

fn render_rec(t: &DerivationTree, literal: Option<&str>, g: &Grammar, lex: &Lexicon, out: &mut String) {
    match t {
        DerivationTree::Node { prod, children } => {
            let p = g.get(*prod);
            let _ = write!(out, "({}", p.id);
            for (c, sym) in children.iter().zip(&p.rhs) {
                out.push(' ');
                let lit = match sym {
                    Symbol::Literal(s) => Some(s.as_str()),
                    _ => None,
                };
                render_rec(c, lit, g, lex, out);
            }
            out.push(')');
        }
        DerivationTree::Leaf { entry, .. } => out.push_str(&lex.get(*entry).lemma),
        DerivationTree::Literal => out.push_str(literal.unwrap_or("?")),
    }
}

fn bracket_tokens(s: &str) -> Vec<&str> {
    let mut toks = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' | ')' => {
                if let Some(b) = start.take() {
                    toks.push(&s[b..i]);
                }
                toks.push(&s[i..i + 1]);
            }
            c if c.is_whitespace() => {
                if let Some(b) = start.take() {
                    toks.push(&s[b..i]);
                }
            }
            _ => {
                if start.is_none() {
                    start = Some(i);
                }
            }
        }
    }
    if let Some(b) = start {
        toks.push(&s[b..]);
    }
    toks
}

fn parse_node(toks: &[&str], pos: &mut usize, g: &Grammar, lex: &Lexicon) -> Result<DerivationTree, String> {
    if toks.get(*pos) != Some(&"(") {
        return Err(format!("expected ( at token {}", *pos));
    }
    *pos += 1;
    let id = toks.get(*pos).ok_or("unexpected end of tree")?;
    let prod = g.id_of(id).ok_or_else(|| format!("unknown production {id}"))?;
    *pos += 1;
    let p = g.get(prod);
    let mut children = Vec::with_capacity(p.rhs.len());
    for sym in &p.rhs {
        let tok = *toks.get(*pos).ok_or("unexpected end of tree")?;
        match sym {
            Symbol::Nonterminal(nt) => {
                let child = parse_node(toks, pos, g, lex)?;
                let cp = child.prod().map(|c| g.get(c).lhs.as_str());
                if cp != Some(nt.as_str()) {
                    return Err(format!("production {} expects {nt} at child {}", p.id, children.len()));
                }
                children.push(child);
            }
            Symbol::Slot(slot) => {
                let entry = lex
                    .find(tok, slot.pos)
                    .ok_or_else(|| format!("unknown {} {tok}", slot.pos))?;
                children.push(DerivationTree::Leaf { entry, form: slot.form });
                *pos += 1;
            }
            Symbol::Literal(l) => {
                if tok != l {
                    return Err(format!("production {} expects literal {l}, found {tok}", p.id));
                }
                children.push(DerivationTree::Literal);
                *pos += 1;
            }
        }
    }
    if toks.get(*pos) != Some(&")") {
        return Err(format!("production {} has too many children", p.id));
    }
    *pos += 1;
    Ok(DerivationTree::Node { prod, children })
}

fn starts_with_vowel(s: &str) -> bool {
    s.chars().next().is_some_and(|c| "aeiouAEIOU".contains(c))
}

pub fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().collect::<String>() + c.as_str(),
        None => String::new(),
    }
}

/// English orthography over raw leaf surfaces: `a` becomes `an` before a
/// vowel, and sentences (ending in `.` or `?`) get a capitalized first token.
pub fn orthography(raw: Vec<String>) -> Vec<String> {
    let mut out = raw;
    for i in 0..out.len().saturating_sub(1) {
        if out[i] == "a" && starts_with_vowel(&out[i + 1]) {
            out[i] = "an".into();
        }
    }
    let sentence = out.last().is_some_and(|t| t == "." || t == "?");
    if sentence {
        if let Some(first) = out.first_mut() {
            *first = capitalize(first);
        }
    }
    out
}

pub fn yield_tokens(t: &DerivationTree, g: &Grammar, lex: &Lexicon) -> Vec<String> {
    orthography(t.raw_yield(g, lex))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthography_rules() {
        let toks = |s: &str| s.split(' ').map(String::from).collect::<Vec<_>>();
        assert_eq!(orthography(toks("a girl saw a apple .")).join(" "), "A girl saw an apple .");
        assert_eq!(orthography(toks("jump")).join(" "), "jump");
        assert_eq!(orthography(toks("who ran ?")).join(" "), "Who ran ?");
    }

    #[test]
    fn bracket_tokenizer() {
        assert_eq!(bracket_tokens("(a (b x) .)"), vec!["(", "a", "(", "b", "x", ")", ".", ")"]);
    }
}
