//! Turns span-based QA pairs into (subject, relation, object) tuples with a
//! dependency-rule cascade, and scores tuple predictions with embedding
//! similarity.

pub mod align;
pub mod classify;
pub mod conllu;
pub mod corpus;
pub mod embed;
pub mod error;
pub mod eval;
pub mod extraction;
pub mod matcher;
pub mod pipeline;
pub mod qa;
pub mod rules;

pub use align::{align, segment_sentences, AlignedExample, Flag};
pub use classify::{classify, classify_text, AuxPattern, QuestionType, Wh};
pub use conllu::{parse_conllu, DepTree, Token};
pub use embed::{cosine, EmbeddingTable};
pub use error::{Error, Result};
pub use eval::{area_under_pr, evaluate, load_gold, load_predictions, Evaluation, GoldSet, PrPoint};
pub use extraction::{Extraction, Slot};
pub use matcher::{tuple_match, MatchConfig, MatchResult};
pub use pipeline::{convert, ConvertConfig, Conversion};
pub use qa::{read_newsqa, read_squad, QAPair, Source};
pub use rules::{apply_rules, run_rule, Registry, RuleId, RuleSpec};
