//! Sentence segmentation and answer-to-sentence alignment.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extraction::Extraction;
use crate::qa::{QAPair, Source};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// The answer runs past the end of its sentence.
    BoundarySpanning,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignedExample {
    pub qa_id: String,
    pub source: Source,
    pub sentence: String,
    pub sentence_index: usize,
    pub extraction: Extraction,
    pub flags: Vec<Flag>,
}

/// Splits a passage after every period. Intervals are byte ranges that
/// cover the passage; whitespace-only pieces are dropped.
pub fn segment_sentences(passage: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in passage.char_indices() {
        if c == '.' {
            push_nonblank(&mut out, passage, start, i + 1);
            start = i + 1;
        }
    }
    push_nonblank(&mut out, passage, start, passage.len());
    if out.is_empty() {
        out.push((0, passage.len()));
    }
    out
}

fn push_nonblank(out: &mut Vec<(usize, usize)>, passage: &str, start: usize, end: usize) {
    if start < end && !passage[start..end].trim().is_empty() {
        out.push((start, end));
    }
}

/// Finds the sentence holding the answer start and attaches the tuple to it.
pub fn align(extraction: Extraction, qa: &QAPair) -> Result<AlignedExample> {
    let len = qa.passage.len();
    if qa.answer_start >= len {
        return Err(Error::AnswerOffset {
            qa_id: qa.id.clone(),
            offset: qa.answer_start,
            len,
        });
    }
    let intervals = segment_sentences(&qa.passage);
    let (sentence_index, &(start, end)) = intervals
        .iter()
        .enumerate()
        .find(|(_, (s, e))| *s <= qa.answer_start && qa.answer_start < *e)
        .ok_or(Error::AnswerOffset {
            qa_id: qa.id.clone(),
            offset: qa.answer_start,
            len,
        })?;
    let mut flags = Vec::new();
    if qa.answer_start + qa.answer.len() > end {
        flags.push(Flag::BoundarySpanning);
    }
    Ok(AlignedExample {
        qa_id: qa.id.clone(),
        source: qa.source,
        sentence: qa.passage[start..end].trim().to_string(),
        sentence_index,
        extraction,
        flags,
    })
}
