//! QA pairs plus question parses in, aligned tuples out.

use std::collections::HashMap;

use log::{debug, warn};
use rayon::prelude::*;

use crate::align::{align, AlignedExample};
use crate::classify::{classify_text, DEFAULT_MAX_QUESTION_CHARS};
use crate::conllu::DepTree;
use crate::corpus::DropCounts;
use crate::error::{Error, Result};
use crate::qa::QAPair;
use crate::rules::{apply_rules, Registry};

#[derive(Clone, Debug)]
pub struct ConvertConfig {
    pub max_question_chars: usize,
    pub registry: Registry,
    /// Worker threads; output order does not depend on it.
    pub jobs: usize,
}

impl Default for ConvertConfig {
    fn default() -> Self {
        ConvertConfig {
            max_question_chars: DEFAULT_MAX_QUESTION_CHARS,
            registry: Registry::default(),
            jobs: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DropCause {
    MissingParse,
    TooLong,
    NoRule,
    AlignError,
}

#[derive(Clone, Debug, Default)]
pub struct Conversion {
    pub examples: Vec<AlignedExample>,
    pub drops: DropCounts,
}

/// Indexes parses by `sent_id`, which must equal the QA pair id.
pub fn index_parses(trees: Vec<DepTree>) -> HashMap<String, DepTree> {
    trees.into_iter().map(|t| (t.sent_id.clone(), t)).collect()
}

/// Converts one QA pair.
pub fn convert_one(qa: &QAPair, parses: &HashMap<String, DepTree>, config: &ConvertConfig) -> std::result::Result<AlignedExample, DropCause> {
    let tree = parses.get(&qa.id).ok_or(DropCause::MissingParse)?;
    let qtype = classify_text(tree, &qa.question, config.max_question_chars);
    if !qtype.length_ok {
        return Err(DropCause::TooLong);
    }
    let ex = apply_rules(tree, &qa.answer, &qtype, config.registry.rules()).ok_or(DropCause::NoRule)?;
    align(ex, qa).map_err(|e| {
        warn!("{}", e);
        DropCause::AlignError
    })
}

pub fn convert(pairs: &[QAPair], parses: &HashMap<String, DepTree>, config: &ConvertConfig) -> Result<Conversion> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {}", e)))?;
    let outcomes: Vec<_> = pool.install(|| pairs.par_iter().map(|qa| convert_one(qa, parses, config)).collect());

    let mut out = Conversion::default();
    for (qa, outcome) in pairs.iter().zip(outcomes) {
        match outcome {
            Ok(ex) => out.examples.push(ex),
            Err(cause) => {
                debug!("{}: dropped ({:?})", qa.id, cause);
                let d = &mut out.drops;
                match cause {
                    DropCause::MissingParse => d.missing_parse += 1,
                    DropCause::TooLong => d.too_long += 1,
                    DropCause::NoRule => d.no_rule += 1,
                    DropCause::AlignError => d.align_error += 1,
                }
            }
        }
    }
    if out.drops.missing_parse > 0 {
        warn!("{} QA pairs have no question parse", out.drops.missing_parse);
    }
    Ok(out)
}

/// Share of QA pairs that produced a tuple.
pub fn coverage(conversion: &Conversion, pairs: usize) -> f64 {
    if pairs == 0 {
        return 0.0;
    }
    conversion.examples.len() as f64 / pairs as f64
}
