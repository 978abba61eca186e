//! Rule-based English to Japanese tree transduction: per-production target
//! templates, a bilingual dictionary and a verb morphology table.

pub mod dictionary;
pub mod morph;
pub mod rules;
pub mod transduce;

pub use dictionary::{Dictionary, TargetLexeme};
pub use morph::{Inflection, MorphKey, MorphTable};
pub use rules::{parse_template, RuleSet, TemplateItem};
pub use transduce::{linearize, SentencePair, TargetTree, Transducer};
