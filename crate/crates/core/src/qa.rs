//! Readers for span-based reading comprehension datasets.
//!
//! Both readers produce [`QAPair`]s whose `answer_start` is a byte offset
//! into `passage`. The source files count offsets in characters; they are
//! converted on the way in.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Squad,
    Newsqa,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Squad => "squad",
            Source::Newsqa => "newsqa",
        })
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "squad" => Ok(Source::Squad),
            "newsqa" => Ok(Source::Newsqa),
            other => Err(Error::InvalidArgument(format!(
                "unknown dataset format '{}' (expected squad or newsqa)",
                other
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QAPair {
    pub id: String,
    pub source: Source,
    pub passage: String,
    pub question: String,
    pub answer: String,
    /// Byte offset of `answer` in `passage`.
    pub answer_start: usize,
}

impl QAPair {
    /// Checks the answer-span and non-empty invariants.
    pub fn is_consistent(&self) -> bool {
        !self.question.trim().is_empty()
            && !self.answer.is_empty()
            && self
                .passage
                .get(self.answer_start..self.answer_start + self.answer.len())
                .is_some_and(|s| s == self.answer)
    }
}

/// Pairs read from a source file plus the number discarded on the way.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct QaRead {
    pub pairs: Vec<QAPair>,
    pub dropped: usize,
}

impl QaRead {
    fn keep(&mut self, pair: Option<QAPair>) {
        match pair {
            Some(p) if p.is_consistent() => self.pairs.push(p),
            _ => self.dropped += 1,
        }
    }

    fn log(self, what: &str) -> Self {
        if self.dropped > 0 {
            warn!("{}: dropped {} question(s) without a usable answer span", what, self.dropped);
        }
        self
    }
}

fn char_to_byte(text: &str, char_offset: usize) -> Option<usize> {
    if char_offset == 0 {
        return Some(0);
    }
    text.char_indices()
        .map(|(b, _)| b)
        .chain(std::iter::once(text.len()))
        .nth(char_offset)
}

fn get<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    v.get(key)
        .ok_or_else(|| Error::schema(format!("{}.{}", path, key), "missing required key"))
}

fn get_str<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a str> {
    get(v, key, path)?
        .as_str()
        .ok_or_else(|| Error::schema(format!("{}.{}", path, key), "expected a string"))
}

fn get_array<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Vec<Value>> {
    get(v, key, path)?
        .as_array()
        .ok_or_else(|| Error::schema(format!("{}.{}", path, key), "expected an array"))
}

/// Reads SQuAD v1.1 JSON, one pair per question using its first answer.
pub fn read_squad(input: &str) -> Result<QaRead> {
    if input.trim().is_empty() {
        return Ok(QaRead::default());
    }
    let root: Value = serde_json::from_str(input)?;
    let mut read = QaRead::default();

    for (ai, article) in get_array(&root, "data", "$")?.iter().enumerate() {
        let apath = format!("$.data[{}]", ai);
        for (pi, para) in get_array(article, "paragraphs", &apath)?.iter().enumerate() {
            let ppath = format!("{}.paragraphs[{}]", apath, pi);
            let context = get_str(para, "context", &ppath)?;
            for (qi, qa) in get_array(para, "qas", &ppath)?.iter().enumerate() {
                let qpath = format!("{}.qas[{}]", ppath, qi);
                if qa.get("is_impossible").is_some() || qa.get("plausible_answers").is_some() {
                    return Err(Error::schema(
                        qpath,
                        "unanswerable-question fields found; only the SQuAD v1.1 layout is supported",
                    ));
                }
                let id = get_str(qa, "id", &qpath)?;
                let question = get_str(qa, "question", &qpath)?;
                let answers = get_array(qa, "answers", &qpath)?;
                let Some(first) = answers.first() else {
                    read.dropped += 1;
                    continue;
                };
                let apath = format!("{}.answers[0]", qpath);
                let text = get_str(first, "text", &apath)?;
                let start = get(first, "answer_start", &apath)?
                    .as_u64()
                    .ok_or_else(|| Error::schema(format!("{}.answer_start", apath), "expected an integer"))?;
                let pair = char_to_byte(context, start as usize).map(|b| QAPair {
                    id: id.to_string(),
                    source: Source::Squad,
                    passage: context.to_string(),
                    question: question.to_string(),
                    answer: text.to_string(),
                    answer_start: b,
                });
                read.keep(pair);
            }
        }
    }
    Ok(read.log("squad"))
}

/// Builds a pair from a character range, trimming surrounding whitespace
/// off the answer.
fn span_pair(id: String, passage: &str, question: &str, start: usize, end: usize) -> Option<QAPair> {
    if start >= end {
        return None;
    }
    let b0 = char_to_byte(passage, start)?;
    let b1 = char_to_byte(passage, end)?;
    let raw = &passage[b0..b1];
    let lead = raw.len() - raw.trim_start().len();
    let answer = raw.trim();
    if answer.is_empty() {
        return None;
    }
    Some(QAPair {
        id,
        source: Source::Newsqa,
        passage: passage.to_string(),
        question: question.to_string(),
        answer: answer.to_string(),
        answer_start: b0 + lead,
    })
}

fn parse_range(s: &str) -> Option<(usize, usize)> {
    let (a, b) = s.trim().split_once(':')?;
    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
}

fn story_stem(story_id: &str) -> String {
    let name = story_id.rsplit('/').next().unwrap_or(story_id);
    name.strip_suffix(".story").unwrap_or(name).to_string()
}

fn newsqa_id(story_id: &str, n: usize) -> String {
    format!("newsqa-{}-{}", story_stem(story_id), n)
}

/// Reads NewsQA, either the combined JSON release or the combined CSV.
///
/// CSV rows without a `story_text` column are resolved against
/// `stories_dir`. Question ids are `newsqa-<story>-<n>` with `n` counting
/// questions within the story in file order.
pub fn read_newsqa(input: &str, stories_dir: Option<&Path>) -> Result<QaRead> {
    let trimmed = input.trim_start();
    if trimmed.is_empty() {
        return Ok(QaRead::default());
    }
    let read = if trimmed.starts_with('{') {
        read_newsqa_json(input)?
    } else {
        read_newsqa_csv(input, stories_dir)?
    };
    Ok(read.log("newsqa"))
}

fn read_newsqa_json(input: &str) -> Result<QaRead> {
    let root: Value = serde_json::from_str(input)?;
    let mut read = QaRead::default();
    for (si, story) in get_array(&root, "data", "$")?.iter().enumerate() {
        let spath = format!("$.data[{}]", si);
        let story_id = get_str(story, "storyId", &spath)?;
        let text = get_str(story, "text", &spath)?;
        for (qi, q) in get_array(story, "questions", &spath)?.iter().enumerate() {
            let qpath = format!("{}.questions[{}]", spath, qi);
            let question = get_str(q, "q", &qpath)?;
            let range = q.get("consensus").and_then(|c| {
                let s = c.get("s")?.as_u64()?;
                let e = c.get("e")?.as_u64()?;
                Some((s as usize, e as usize))
            });
            let pair = range.and_then(|(s, e)| span_pair(newsqa_id(story_id, qi), text, question, s, e));
            read.keep(pair);
        }
    }
    Ok(read)
}

/// Majority range among validated answers, if validation picked a span.
fn validated_range(raw: &str) -> Option<Option<(usize, usize)>> {
    let v: Value = serde_json::from_str(raw).ok()?;
    let votes = v.as_object()?;
    let (best, _) = votes
        .iter()
        .filter_map(|(k, n)| Some((k, n.as_u64()?)))
        .fold(None::<(&String, u64)>, |acc, (k, n)| match acc {
            Some((_, m)) if m >= n => acc,
            _ => Some((k, n)),
        })?;
    Some(parse_range(best))
}

/// First range of every annotator, when they all agree.
fn agreed_range(raw: &str) -> Option<(usize, usize)> {
    let mut agreed = None;
    for annotator in raw.split('|') {
        let first = annotator.split(',').next()?;
        let r = parse_range(first)?;
        match agreed {
            None => agreed = Some(r),
            Some(a) if a == r => {}
            Some(_) => return None,
        }
    }
    agreed
}

fn read_newsqa_csv(input: &str, stories_dir: Option<&Path>) -> Result<QaRead> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(input.as_bytes());
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let story_col = col("story_id").ok_or_else(|| Error::schema("header.story_id", "missing required column"))?;
    let question_col = col("question").ok_or_else(|| Error::schema("header.question", "missing required column"))?;
    let ranges_col = col("answer_char_ranges")
        .ok_or_else(|| Error::schema("header.answer_char_ranges", "missing required column"))?;
    let absent_col = col("is_answer_absent");
    let validated_col = col("validated_answers");
    let text_col = col("story_text");
    if text_col.is_none() && stories_dir.is_none() {
        return Err(Error::schema(
            "header.story_text",
            "no story_text column; a stories directory is required",
        ));
    }

    let mut read = QaRead::default();
    let mut per_story: HashMap<String, usize> = HashMap::new();
    let mut story_cache: HashMap<String, String> = HashMap::new();

    for (ri, record) in rdr.records().enumerate() {
        let record = record?;
        let row = ri + 2;
        let cell = |i: usize| record.get(i).unwrap_or("").trim();
        let story_id = cell(story_col).to_string();
        let n = per_story.entry(story_id.clone()).or_insert(0);
        let id = newsqa_id(&story_id, *n);
        *n += 1;

        let passage = match text_col {
            Some(i) => record.get(i).unwrap_or("").to_string(),
            None => match story_cache.get(&story_id) {
                Some(p) => p.clone(),
                None => {
                    let p = load_story(stories_dir.expect("checked above"), &story_id, row)?;
                    story_cache.insert(story_id.clone(), p.clone());
                    p
                }
            },
        };

        let range = match validated_col.map(cell).filter(|s| !s.is_empty()) {
            Some(v) => validated_range(v).flatten(),
            None => {
                let absent = absent_col
                    .map(cell)
                    .and_then(|s| s.parse::<f64>().ok())
                    .unwrap_or(0.0);
                if absent >= 0.5 {
                    None
                } else {
                    agreed_range(cell(ranges_col))
                }
            }
        };
        let pair = range.and_then(|(s, e)| span_pair(id, &passage, cell(question_col), s, e));
        read.keep(pair);
    }
    Ok(read)
}

fn load_story(dir: &Path, story_id: &str, row: usize) -> Result<String> {
    let rel = story_id.trim_start_matches("./");
    let candidates: [PathBuf; 2] = [dir.join(rel), dir.join(rel.rsplit('/').next().unwrap_or(rel))];
    for path in &candidates {
        if path.is_file() {
            return fs::read_to_string(path).map_err(|e| Error::io(path, e));
        }
    }
    Err(Error::Row {
        row,
        message: format!("story '{}' not found under {}", story_id, dir.display()),
    })
}
