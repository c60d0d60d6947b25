//! Precision-recall evaluation of scored predictions against gold tuples.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::embed::{cosine, EmbeddingTable};
use crate::error::{Error, Result};
use crate::extraction::Extraction;
use crate::matcher::MatchConfig;

#[derive(Clone, Debug, PartialEq)]
pub struct SentenceTuple {
    pub sentence: String,
    pub extraction: Extraction,
}

/// Gold tuples indexed by whitespace-normalized sentence.
#[derive(Clone, Debug, Default)]
pub struct GoldSet {
    tuples: Vec<SentenceTuple>,
    by_sentence: HashMap<String, Vec<usize>>,
}

impl GoldSet {
    pub fn new(tuples: Vec<SentenceTuple>) -> Self {
        let mut by_sentence: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, t) in tuples.iter().enumerate() {
            by_sentence.entry(sentence_key(&t.sentence)).or_default().push(i);
        }
        GoldSet { tuples, by_sentence }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[SentenceTuple] {
        &self.tuples
    }

    pub fn for_sentence(&self, sentence: &str) -> &[usize] {
        self.by_sentence
            .get(&sentence_key(sentence))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn sentence_count(&self) -> usize {
        self.by_sentence.len()
    }
}

fn sentence_key(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PrPoint {
    pub cutoff: f64,
    pub precision: f64,
    pub recall: f64,
    pub matched: usize,
    pub predicted: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    /// One point per distinct confidence, highest cutoff first.
    pub points: Vec<PrPoint>,
    pub auc: f64,
    /// Whether each prediction, in input order, was matched.
    pub correct: Vec<bool>,
    /// Out-of-vocabulary words seen while embedding slots.
    pub oov: usize,
}

fn read_rows(path: &Path, columns: usize) -> Result<Vec<(usize, Vec<String>)>> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(false)
        .quoting(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = rec.position().map_or(i + 1, |p| p.line() as usize);
        if rec.len() != columns {
            return Err(Error::Row {
                row,
                message: format!("expected {} tab-separated columns, found {}", columns, rec.len()),
            });
        }
        rows.push((row, rec.iter().map(str::to_string).collect()));
    }
    Ok(rows)
}

/// Reads `sentence<TAB>subject<TAB>relation<TAB>object` rows.
pub fn load_gold(path: &Path) -> Result<GoldSet> {
    let tuples = read_rows(path, 4)?
        .into_iter()
        .map(|(_, r)| SentenceTuple {
            sentence: r[0].clone(),
            extraction: Extraction::new(&r[1], &r[2], &r[3]),
        })
        .collect();
    Ok(GoldSet::new(tuples))
}

/// Reads `sentence<TAB>subject<TAB>relation<TAB>object<TAB>confidence` rows.
pub fn load_predictions(path: &Path) -> Result<Vec<SentenceTuple>> {
    read_rows(path, 5)?
        .into_iter()
        .map(|(row, r)| {
            let conf: f64 = r[4].trim().parse().map_err(|_| Error::Row {
                row,
                message: format!("confidence '{}' is not a number", r[4]),
            })?;
            Ok(SentenceTuple {
                sentence: r[0].clone(),
                extraction: Extraction::new(&r[1], &r[2], &r[3]).with_confidence(conf),
            })
        })
        .collect()
}

struct Embedded {
    slots: [Vec<f64>; 3],
}

fn embed(table: &EmbeddingTable, ex: &Extraction, oov: &mut usize) -> Embedded {
    let slots = ex.slots().map(|s| {
        let p = table.bow_embed(s);
        *oov += p.oov;
        p.vector
    });
    Embedded { slots }
}

fn min_sim(a: &Embedded, b: &Embedded) -> Result<f64> {
    let mut m = f64::INFINITY;
    for (u, v) in a.slots.iter().zip(&b.slots) {
        m = m.min(cosine(u, v)?);
    }
    Ok(m)
}

/// Greedy one-to-one matching in descending confidence, scoped to each
/// sentence, then precision and recall at every distinct confidence.
pub fn evaluate(gold: &GoldSet, preds: &[SentenceTuple], table: &EmbeddingTable, config: &MatchConfig) -> Result<Evaluation> {
    if gold.is_empty() {
        return Err(Error::Eval("gold set is empty".into()));
    }
    let mut confs = Vec::with_capacity(preds.len());
    for (i, p) in preds.iter().enumerate() {
        let c = p
            .extraction
            .confidence
            .ok_or_else(|| Error::Eval(format!("prediction {} has no confidence", i + 1)))?;
        if !c.is_finite() {
            return Err(Error::Eval(format!("prediction {} has non-finite confidence {}", i + 1, c)));
        }
        confs.push(c);
    }

    let mut oov = 0;
    let gold_vecs: Vec<Embedded> = gold
        .tuples()
        .iter()
        .map(|t| embed(table, &t.extraction, &mut oov))
        .collect();

    let mut order: Vec<usize> = (0..preds.len()).collect();
    order.sort_by(|&a, &b| confs[b].total_cmp(&confs[a]));

    let mut used = vec![false; gold.len()];
    let mut correct = vec![false; preds.len()];
    for &i in &order {
        let pv = embed(table, &preds[i].extraction, &mut oov);
        let mut best: Option<(f64, usize)> = None;
        for &g in gold.for_sentence(&preds[i].sentence) {
            if used[g] {
                continue;
            }
            let m = min_sim(&pv, &gold_vecs[g])?;
            if m > config.threshold && best.is_none_or(|(b, _)| m > b) {
                best = Some((m, g));
            }
        }
        if let Some((_, g)) = best {
            used[g] = true;
            correct[i] = true;
        }
    }

    let total = gold.len() as f64;
    let mut points = Vec::new();
    let mut matched = 0;
    for (k, &i) in order.iter().enumerate() {
        matched += correct[i] as usize;
        let last_at_cutoff = order.get(k + 1).is_none_or(|&j| confs[j] != confs[i]);
        if last_at_cutoff {
            let predicted = k + 1;
            points.push(PrPoint {
                cutoff: confs[i],
                precision: matched as f64 / predicted as f64,
                recall: matched as f64 / total,
                matched,
                predicted,
            });
        }
    }
    if points.is_empty() {
        points.push(PrPoint {
            cutoff: f64::INFINITY,
            precision: 1.0,
            recall: 0.0,
            matched: 0,
            predicted: 0,
        });
    }
    let auc = area_under_pr(&points);
    Ok(Evaluation {
        points,
        auc,
        correct,
        oov,
    })
}

/// Trapezoidal area under precision over recall, starting from (R=0, P=1).
/// Points with equal recall keep their given order.
pub fn area_under_pr(points: &[PrPoint]) -> f64 {
    let mut pts: Vec<(f64, f64)> = points.iter().map(|p| (p.recall, p.precision)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut area = 0.0;
    let (mut r0, mut p0) = (0.0, 1.0);
    for (r, p) in pts {
        area += (r - r0) * (p + p0) / 2.0;
        r0 = r;
        p0 = p;
    }
    area
}

/// Writes `cutoff,precision,recall,matched,predicted`.
pub fn write_pr_csv<W: Write>(out: W, points: &[PrPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}
