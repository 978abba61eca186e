use std::collections::{BTreeSet, HashMap};

use crate::error::LoadError;
use crate::grammar::{Grammar, Pos, Symbol, Tense};

/// One element of a target template.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TemplateItem {
    /// `$k` or `$k.j`: translation of child `k` (or grandchild `j` of child `k`).
    Child(Vec<usize>),
    /// `@morph(k[,past|present][,q])`: inflect the verb at that path.
    Morph { path: Vec<usize>, tense: Option<Tense>, question: bool },
    Literal(String),
}

impl TemplateItem {
    pub fn path(&self) -> Option<&[usize]> {
        match self {
            TemplateItem::Child(p) | TemplateItem::Morph { path: p, .. } => Some(p),
            TemplateItem::Literal(_) => None,
        }
    }
}

fn parse_path(s: &str) -> Option<Vec<usize>> {
    s.split('.').map(|x| x.trim().parse().ok()).collect()
}

pub fn parse_template(s: &str) -> Result<Vec<TemplateItem>, String> {
    let mut out = Vec::new();
    for tok in s.split_whitespace() {
        if let Some(rest) = tok.strip_prefix('$') {
            out.push(TemplateItem::Child(parse_path(rest).ok_or_else(|| format!("bad child reference {tok}"))?));
        } else if let Some(args) = tok.strip_prefix("@morph(").and_then(|r| r.strip_suffix(')')) {
            let mut parts = args.split(',').map(str::trim);
            let path = parts
                .next()
                .and_then(parse_path)
                .ok_or_else(|| format!("bad morph reference {tok}"))?;
            let mut tense = None;
            let mut question = false;
            for opt in parts {
                match opt {
                    "past" => tense = Some(Tense::Past),
                    "present" => tense = Some(Tense::Present),
                    "q" => question = true,
                    other => return Err(format!("unknown morph option {other} in {tok}")),
                }
            }
            out.push(TemplateItem::Morph { path, tense, question });
        } else {
            out.push(TemplateItem::Literal(tok.to_string()));
        }
    }
    Ok(out)
}

/// Target templates keyed by source production id.
#[derive(Clone, Debug, Default)]
pub struct RuleSet {
    rules: HashMap<String, Vec<TemplateItem>>,
}

impl RuleSet {
    /// `<production id> <tab> <template>` per line, `#` comments. An empty template drops the node.
    pub fn parse(text: &str) -> Result<RuleSet, LoadError> {
        let mut rules = HashMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let (id, template) = raw.split_once('\t').unwrap_or((raw, ""));
            let items = parse_template(template).map_err(|msg| LoadError::Format { line, msg })?;
            if rules.insert(id.trim().to_string(), items).is_some() {
                return Err(LoadError::Format { line, msg: format!("duplicate rule for {id}") });
            }
        }
        Ok(RuleSet { rules })
    }

    pub fn get(&self, production_id: &str) -> Option<&[TemplateItem]> {
        self.rules.get(production_id).map(|v| v.as_slice())
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Coverage and reference checks against a production bank.
    pub fn violations(&self, g: &Grammar) -> Vec<String> {
        let mut out = Vec::new();
        for p in g.productions() {
            let Some(items) = self.rules.get(&p.id) else {
                out.push(format!("no transduction rule for production {}", p.id));
                continue;
            };
            let mut used = BTreeSet::new();
            for item in items {
                let Some(path) = item.path() else { continue };
                if !used.insert(path.to_vec()) {
                    out.push(format!("rule {}: child {:?} referenced twice", p.id, path));
                }
                let morph = matches!(item, TemplateItem::Morph { .. });
                if let Err(msg) = check_path(g, &p.rhs, path, morph) {
                    out.push(format!("rule {}: {msg}", p.id));
                }
            }
        }
        for id in self.rules.keys() {
            if g.id_of(id).is_none() {
                out.push(format!("rule for unknown production {id}"));
            }
        }
        out.sort();
        out
    }
}

fn check_path(g: &Grammar, rhs: &[Symbol], path: &[usize], morph: bool) -> Result<(), String> {
    let (&k, rest) = path.split_first().ok_or("empty reference")?;
    let sym = rhs.get(k).ok_or_else(|| format!("child {k} out of range"))?;
    match sym {
        Symbol::Literal(l) => Err(format!("child {k} is the literal {l}")),
        Symbol::Slot(s) => {
            if !rest.is_empty() {
                Err(format!("child {k} is a slot and has no children"))
            } else if morph && s.pos != Pos::Verb {
                Err(format!("morph directive on non-verb child {k}"))
            } else {
                Ok(())
            }
        }
        Symbol::Nonterminal(nt) => {
            if rest.is_empty() {
                if morph {
                    return Err(format!("morph directive on nonterminal child {k}"));
                }
                return Ok(());
            }
            let alts = g.alternatives(nt);
            if alts.is_empty() {
                return Err(format!("child {k} ({nt}) has no productions"));
            }
            for &a in alts {
                check_path(g, &g.get(a).rhs, rest, morph)?;
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn template_syntax() {
        let t = parse_template("$2 ga $4.1 o @morph(4.2,past) to @morph(3,past,q) ?").unwrap();
        assert_eq!(t[0], TemplateItem::Child(vec![2]));
        assert_eq!(t[2], TemplateItem::Child(vec![4, 1]));
        assert_eq!(t[4], TemplateItem::Morph { path: vec![4, 2], tense: Some(Tense::Past), question: false });
        assert_eq!(t[6], TemplateItem::Morph { path: vec![3], tense: Some(Tense::Past), question: true });
        assert_eq!(t[7], TemplateItem::Literal("?".into()));
        assert!(parse_template("@morph(1,future)").is_err());
    }

    #[test]
    fn checks_against_grammar() {
        let g = Grammar::parse("a\tS -> Determiner[] N was Verb[form=past]\t1\nb\tN -> dog\t1\n").unwrap();
        let ok = RuleSet::parse("a\t$1 ga @morph(3)\nb\tinu\n").unwrap();
        assert!(ok.violations(&g).is_empty(), "{:?}", ok.violations(&g));
        let bad = RuleSet::parse("a\t$2 $1 $1 @morph(1)\n").unwrap();
        let v = bad.violations(&g);
        assert!(v.iter().any(|m| m.contains("literal was")), "{v:?}");
        assert!(v.iter().any(|m| m.contains("referenced twice")), "{v:?}");
        assert!(v.iter().any(|m| m.contains("no transduction rule for production b")), "{v:?}");
    }
}
