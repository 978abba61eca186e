//! Naming conventions the shipped grammars follow. Grammatical roles and
//! construct membership are read off nonterminal names so that analysis,
//! auditing and annotation need no extra tag columns.
//!
//! | prefix            | meaning                                   |
//! |-------------------|-------------------------------------------|
//! | `Subj`            | subject argument wrapper                  |
//! | `IObj`            | indirect object wrapper                   |
//! | `Obj`             | direct object wrapper                     |
//! | `Agent`           | passive `by`-phrase wrapper               |
//! | `Loc`             | object of a preposition                   |
//! | `Prim`            | bare primitive exposure                   |
//! | `CP`              | complement clause (CP recursion)          |
//! | `PP`              | prepositional modifier (PP recursion)     |
//! | `RCgap`           | relative clause; `S`/`O`/`I` marks the gap |
//! | `AP`              | adjective stack                           |
//! | `Q`               | wh-question clause                        |
//!
//! A production containing a `Verb` slot is a clause, and the slot's
//! `verb_class` constraint is its frame.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Subject,
    DirectObject,
    IndirectObject,
    Agent,
    Locative,
    Primitive,
}

impl Role {
    pub fn of_lhs(lhs: &str) -> Option<Role> {
        if lhs.starts_with("Subj") {
            Some(Role::Subject)
        } else if lhs.starts_with("IObj") {
            Some(Role::IndirectObject)
        } else if lhs.starts_with("Obj") {
            Some(Role::DirectObject)
        } else if lhs.starts_with("Agent") {
            Some(Role::Agent)
        } else if lhs.starts_with("Loc") {
            Some(Role::Locative)
        } else if lhs.starts_with("Prim") {
            Some(Role::Primitive)
        } else {
            None
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Subject => "subject",
            Role::DirectObject => "direct_object",
            Role::IndirectObject => "indirect_object",
            Role::Agent => "agent",
            Role::Locative => "locative",
            Role::Primitive => "primitive",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Construct {
    #[serde(rename = "cp")]
    Cp,
    #[serde(rename = "pp")]
    Pp,
    #[serde(rename = "ce")]
    CenterEmbedRc,
    #[serde(rename = "adj")]
    Adj,
}

impl Construct {
    pub const ALL: [Construct; 4] = [Construct::Cp, Construct::Pp, Construct::CenterEmbedRc, Construct::Adj];

    /// Constructs counted by nesting of labelled nodes (adjectives are counted by stacking instead).
    pub fn of_lhs(lhs: &str) -> Option<Construct> {
        if lhs.starts_with("CP") {
            Some(Construct::Cp)
        } else if lhs.starts_with("PP") {
            Some(Construct::Pp)
        } else if lhs.starts_with("RCgap") {
            Some(Construct::CenterEmbedRc)
        } else {
            None
        }
    }

    pub fn parse(s: &str) -> Option<Construct> {
        match s.to_ascii_lowercase().as_str() {
            "cp" => Some(Construct::Cp),
            "pp" => Some(Construct::Pp),
            "ce" | "rc" | "center_embed" => Some(Construct::CenterEmbedRc),
            "adj" => Some(Construct::Adj),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Construct::Cp => "cp",
            Construct::Pp => "pp",
            Construct::CenterEmbedRc => "ce",
            Construct::Adj => "adj",
        }
    }
}

impl fmt::Display for Construct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn is_adjective_stack(lhs: &str) -> bool {
    lhs.starts_with("AP")
}

pub fn is_question(lhs: &str) -> bool {
    lhs.starts_with('Q')
}

pub fn is_relative(lhs: &str) -> bool {
    lhs.starts_with("RCgap")
}

/// Gap role of a relative-clause nonterminal (`RCgapS`, `RCgapO...`, `RCgapI`).
pub fn relative_gap(lhs: &str) -> Option<Role> {
    let rest = lhs.strip_prefix("RCgap")?;
    match rest.chars().next() {
        Some('S') => Some(Role::Subject),
        Some('O') => Some(Role::DirectObject),
        Some('I') => Some(Role::IndirectObject),
        _ => None,
    }
}

pub fn is_long_movement_gap(lhs: &str) -> bool {
    lhs.starts_with("CPgap")
}
