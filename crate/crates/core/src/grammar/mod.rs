//! Weighted grammars over a featured lexicon: loading, validation, seeded
//! sampling, chart parsing and construct-depth analysis.

pub mod conventions;
pub mod depth;
pub mod earley;
pub mod lexicon;
pub mod pcfg;
pub mod production;
pub mod sample;
pub mod tree;

pub use conventions::{Construct, Role};
pub use depth::{depth_of, DepthProfile, Depths};
pub use earley::parse;
pub use lexicon::{EntryId, Finiteness, Form, LexEntry, Lexicon, MorphBundle, Pos, Tense, Voice};
pub use pcfg::{validate_grammar, zipf_weights, EmptyLexicon, Pcfg, PcfgOptions, SlotLexicon, ValidationReport};
pub use production::{Grammar, ProdId, Production, Ratio, Slot, Symbol};
pub use sample::{sample, sample_with, AdmitAll, Constraints, LexicalFilter, SlotContext, REJECTION_BUDGET};
pub use tree::{yield_tokens, DerivationTree};
