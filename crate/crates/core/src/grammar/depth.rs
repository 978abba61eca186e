use serde::{Deserialize, Serialize};

use crate::grammar::conventions::{is_adjective_stack, Construct};
use crate::grammar::lexicon::Pos;
use crate::grammar::production::{Grammar, Symbol};
use crate::grammar::tree::DerivationTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthProfile {
    pub construct: Construct,
    pub depth: u32,
}

/// Depth of every construct in one tree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Depths {
    pub cp: u32,
    pub pp: u32,
    pub ce: u32,
    pub adj: u32,
}

impl Depths {
    pub fn of(t: &DerivationTree, g: &Grammar) -> Depths {
        let mut d = Depths::default();
        nesting(t, g, [0; 3], &mut d);
        d.adj = max_adjective_run(t, g);
        d
    }

    pub fn get(&self, c: Construct) -> u32 {
        match c {
            Construct::Cp => self.cp,
            Construct::Pp => self.pp,
            Construct::CenterEmbedRc => self.ce,
            Construct::Adj => self.adj,
        }
    }

    pub fn max(self, o: Depths) -> Depths {
        Depths { cp: self.cp.max(o.cp), pp: self.pp.max(o.pp), ce: self.ce.max(o.ce), adj: self.adj.max(o.adj) }
    }
}

pub fn depth_of(t: &DerivationTree, g: &Grammar, construct: Construct) -> DepthProfile {
    DepthProfile { construct, depth: Depths::of(t, g).get(construct) }
}

fn nesting(t: &DerivationTree, g: &Grammar, mut on_path: [u32; 3], out: &mut Depths) {
    let DerivationTree::Node { prod, children } = t else { return };
    match Construct::of_lhs(&g.get(*prod).lhs) {
        Some(Construct::Cp) => on_path[0] += 1,
        Some(Construct::Pp) => on_path[1] += 1,
        Some(Construct::CenterEmbedRc) => on_path[2] += 1,
        _ => {}
    }
    out.cp = out.cp.max(on_path[0]);
    out.pp = out.pp.max(on_path[1]);
    out.ce = out.ce.max(on_path[2]);
    for c in children {
        nesting(c, g, on_path, out);
    }
}

/// Adjective leaves directly under a node plus those inside its adjective-stack children.
fn adjective_run(t: &DerivationTree, g: &Grammar) -> u32 {
    let DerivationTree::Node { prod, children } = t else { return 0 };
    let p = g.get(*prod);
    children
        .iter()
        .zip(&p.rhs)
        .map(|(c, sym)| match sym {
            Symbol::Slot(s) if s.pos == Pos::Adjective => 1,
            Symbol::Nonterminal(nt) if is_adjective_stack(nt) => adjective_run(c, g),
            _ => 0,
        })
        .sum()
}

fn max_adjective_run(t: &DerivationTree, g: &Grammar) -> u32 {
    let mut best = 0;
    t.walk(&mut |_, n| {
        if n.prod().is_some() {
            best = best.max(adjective_run(n, g));
        }
    });
    best
}
