//! Corpus files: `corpus.jsonl`, parallel `src.txt` / `tgt.txt` and `stats.json`.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::align::{AlignedExample, Flag};
use crate::classify::QuestionType;
use crate::error::{Error, Result};
use crate::extraction::Extraction;
use crate::qa::Source;
use crate::rules::RuleId;

pub const CORPUS_FILE: &str = "corpus.jsonl";
pub const SRC_FILE: &str = "src.txt";
pub const TGT_FILE: &str = "tgt.txt";
pub const STATS_FILE: &str = "stats.json";
pub const VALIDATION_DIR: &str = "validation";

/// One line of `corpus.jsonl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub qa_id: String,
    pub source: Source,
    pub sentence: String,
    pub subject: String,
    pub relation: String,
    pub object: String,
    pub rule_id: Option<RuleId>,
    pub sentence_index: usize,
    pub flags: Vec<Flag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qtype: Option<QuestionType>,
}

impl From<&AlignedExample> for CorpusRecord {
    fn from(ex: &AlignedExample) -> Self {
        CorpusRecord {
            qa_id: ex.qa_id.clone(),
            source: ex.source,
            sentence: ex.sentence.clone(),
            subject: ex.extraction.subject.clone(),
            relation: ex.extraction.relation.clone(),
            object: ex.extraction.object.clone(),
            rule_id: ex.extraction.rule_id,
            sentence_index: ex.sentence_index,
            flags: ex.flags.clone(),
            qtype: ex.extraction.qtype,
        }
    }
}

impl From<CorpusRecord> for AlignedExample {
    fn from(r: CorpusRecord) -> Self {
        AlignedExample {
            qa_id: r.qa_id,
            source: r.source,
            sentence: r.sentence,
            sentence_index: r.sentence_index,
            extraction: Extraction {
                subject: r.subject,
                relation: r.relation,
                object: r.object,
                rule_id: r.rule_id,
                qtype: r.qtype,
                confidence: None,
            },
            flags: r.flags,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceStats {
    /// Distinct sentences carrying at least one tuple.
    pub sentences: usize,
    pub tuples: usize,
    /// QA pairs read from the source.
    pub qa_pairs: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DropCounts {
    pub reader_dropped: usize,
    pub missing_parse: usize,
    pub too_long: usize,
    pub no_rule: usize,
    pub align_error: usize,
}

impl DropCounts {
    pub fn total(&self) -> usize {
        self.reader_dropped + self.missing_parse + self.too_long + self.no_rule + self.align_error
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub sources: BTreeMap<String, SourceStats>,
    pub total: SourceStats,
    pub validation_tuples: usize,
    pub drops: DropCounts,
}

impl CorpusStats {
    /// Counts over every example, training and validation alike.
    pub fn compute(examples: &[AlignedExample], qa_pairs: &BTreeMap<Source, usize>, validation_tuples: usize, drops: DropCounts) -> Self {
        let mut sources: BTreeMap<String, SourceStats> = BTreeMap::new();
        let mut seen: HashSet<(Source, &str)> = HashSet::new();
        for (src, n) in qa_pairs {
            sources.entry(src.to_string()).or_default().qa_pairs = *n;
        }
        for ex in examples {
            let s = sources.entry(ex.source.to_string()).or_default();
            s.tuples += 1;
            if seen.insert((ex.source, ex.sentence.as_str())) {
                s.sentences += 1;
            }
        }
        let total = sources.values().fold(SourceStats::default(), |acc, s| SourceStats {
            sentences: acc.sentences + s.sentences,
            tuples: acc.tuples + s.tuples,
            qa_pairs: acc.qa_pairs + s.qa_pairs,
        });
        CorpusStats {
            sources,
            total,
            validation_tuples,
            drops,
        }
    }
}

fn escape_tgt(slot: &str) -> String {
    slot.replace('<', "&lt;")
}

fn one_line(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn src_line(ex: &AlignedExample) -> String {
    one_line(&ex.sentence)
}

/// `<sub> s <rel> r <obj> o`
pub fn tgt_line(ex: &AlignedExample) -> String {
    let e = &ex.extraction;
    format!(
        "<sub> {} <rel> {} <obj> {}",
        escape_tgt(&one_line(&e.subject)),
        escape_tgt(&one_line(&e.relation)),
        escape_tgt(&one_line(&e.object))
    )
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

/// Writes `corpus.jsonl`, `src.txt` and `tgt.txt` into `dir`.
pub fn write_examples(dir: &Path, examples: &[AlignedExample]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut jsonl = create(&dir.join(CORPUS_FILE))?;
    let mut src = create(&dir.join(SRC_FILE))?;
    let mut tgt = create(&dir.join(TGT_FILE))?;
    for ex in examples {
        serde_json::to_writer(&mut jsonl, &CorpusRecord::from(ex))?;
        writeln!(jsonl)?;
        writeln!(src, "{}", src_line(ex))?;
        writeln!(tgt, "{}", tgt_line(ex))?;
    }
    jsonl.flush()?;
    src.flush()?;
    tgt.flush()?;
    Ok(())
}

/// Writes the training corpus, the optional validation split and `stats.json`.
pub fn write_corpus(dir: &Path, train: &[AlignedExample], validation: &[AlignedExample], stats: &CorpusStats) -> Result<()> {
    write_examples(dir, train)?;
    if !validation.is_empty() {
        write_examples(&dir.join(VALIDATION_DIR), validation)?;
    }
    let mut out = create(&dir.join(STATS_FILE))?;
    serde_json::to_writer_pretty(&mut out, stats)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Reads a `corpus.jsonl` file.
pub fn read_corpus(path: &Path) -> Result<Vec<AlignedExample>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: CorpusRecord = serde_json::from_str(&line).map_err(|e| Error::Row {
            row: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec.into());
    }
    Ok(out)
}

/// Reads training and validation examples from a corpus directory.
pub fn read_corpus_dir(dir: &Path) -> Result<Vec<AlignedExample>> {
    let mut out = read_corpus(&dir.join(CORPUS_FILE))?;
    let val = dir.join(VALIDATION_DIR).join(CORPUS_FILE);
    if val.exists() {
        out.extend(read_corpus(&val)?);
    }
    Ok(out)
}

pub fn read_stats(dir: &Path) -> Result<CorpusStats> {
    let path = dir.join(STATS_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Seeded random indices into `0..len`, sorted.
pub fn sample_indices(len: usize, n: usize, seed: u64) -> Result<Vec<usize>> {
    if n > len {
        return Err(Error::InvalidArgument(format!(
            "cannot sample {} examples from a corpus of {}",
            n, len
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = sample(&mut rng, len, n).into_vec();
    idx.sort_unstable();
    Ok(idx)
}

/// Moves `n` seeded-random examples into a validation set. Both halves keep
/// input order.
pub fn split_validation(examples: Vec<AlignedExample>, n: usize, seed: u64) -> Result<(Vec<AlignedExample>, Vec<AlignedExample>)> {
    let picked: HashSet<usize> = sample_indices(examples.len(), n, seed)?.into_iter().collect();
    let (val, train): (Vec<_>, Vec<_>) = examples
        .into_iter()
        .enumerate()
        .partition(|(i, _)| picked.contains(i));
    Ok((
        train.into_iter().map(|(_, e)| e).collect(),
        val.into_iter().map(|(_, e)| e).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(id: &str, sentence: &str) -> AlignedExample {
        AlignedExample {
            qa_id: id.into(),
            source: Source::Squad,
            sentence: sentence.into(),
            sentence_index: 0,
            extraction: Extraction::new("a<b", "is", "c"),
            flags: vec![],
        }
    }

    #[test]
    fn tgt_escapes_angle_brackets() {
        assert_eq!(tgt_line(&ex("1", "s")), "<sub> a&lt;b <rel> is <obj> c");
    }

    #[test]
    fn round_trip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut e = ex("1", "A sentence.");
        e.flags.push(Flag::BoundarySpanning);
        e.extraction.rule_id = Some(RuleId::Whose);
        let all = vec![e, ex("2", "Another\nsentence.")];
        let stats = CorpusStats::compute(&all, &BTreeMap::from([(Source::Squad, 3)]), 0, DropCounts::default());
        write_corpus(dir.path(), &all, &[], &stats).unwrap();
        assert_eq!(read_corpus_dir(dir.path()).unwrap(), all);
        assert_eq!(read_stats(dir.path()).unwrap(), stats);
        let src = fs::read_to_string(dir.path().join(SRC_FILE)).unwrap();
        assert_eq!(src, "A sentence.\nAnother sentence.\n");
    }

    #[test]
    fn stats_count_distinct_sentences() {
        let all = vec![ex("1", "S."), ex("2", "S."), ex("3", "T.")];
        let s = CorpusStats::compute(&all, &BTreeMap::from([(Source::Squad, 5)]), 1, DropCounts::default());
        assert_eq!(s.sources["squad"], SourceStats { sentences: 2, tuples: 3, qa_pairs: 5 });
        assert_eq!(s.total.tuples, 3);
    }

    #[test]
    fn validation_split_is_seeded() {
        let all: Vec<_> = (0..20).map(|i| ex(&i.to_string(), "S.")).collect();
        let (t1, v1) = split_validation(all.clone(), 5, 7).unwrap();
        let (t2, v2) = split_validation(all.clone(), 5, 7).unwrap();
        assert_eq!((t1.len(), v1.len()), (15, 5));
        assert_eq!(v1, v2);
        assert_eq!(t1, t2);
        assert!(split_validation(all, 21, 7).is_err());
    }
}
