#![allow(dead_code)]

use std::path::PathBuf;
use std::sync::OnceLock;

use proptest::prelude::*;

use qa2oie::eval::{GoldSet, SentenceTuple};
use qa2oie::matcher::{tuple_match, MatchConfig};
use qa2oie::{parse_conllu, DepTree, EmbeddingTable, Extraction};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn vectors() -> &'static EmbeddingTable {
    static TABLE: OnceLock<EmbeddingTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        EmbeddingTable::load(&fixture("vectors50.txt"), None).unwrap()
    })
}

pub const VOCAB: [&str; 16] = [
    "is", "was", "by", "for", "works", "employed", "chief", "acme", "globex", "smith", "powell", "based", "paris",
    "acquires", "owns", "rate",
];

pub const WORDS: [&str; 16] = [
    "Who", "What", "When", "Where", "How", "Which", "whose", "did", "was", "is", "Tesla", "coil", "the", "build", "in",
    "?",
];
pub const RELS: [&str; 13] = [
    "nsubj", "obj", "det", "amod", "aux", "cop", "advmod", "obl", "case", "nsubj:pass", "aux:pass", "punct", "compound",
];
pub const UPOS: [&str; 6] = ["NOUN", "VERB", "AUX", "PRON", "PROPN", "DET"];

pub fn phrase() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(&VOCAB[..]), 1..5).prop_map(|w| w.join(" "))
}

pub fn triple() -> impl Strategy<Value = Extraction> {
    (phrase(), phrase(), phrase()).prop_map(|(s, r, o)| Extraction::new(s, r, o))
}

/// Random valid dependency trees: a random node order where every node
/// after the first attaches to an earlier one.
pub fn dep_tree(words: &'static [&'static str]) -> impl Strategy<Value = DepTree> {
    (1usize..10)
        .prop_flat_map(move |n| {
            (
                Just((1..=n).collect::<Vec<usize>>()).prop_shuffle(),
                prop::collection::vec(any::<prop::sample::Index>(), n),
                prop::collection::vec(
                    (prop::sample::select(words), prop::sample::select(&RELS[..]), prop::sample::select(&UPOS[..])),
                    n,
                ),
            )
        })
        .prop_map(|(order, picks, labels)| {
            let n = order.len();
            let mut heads = vec![0; n + 1];
            for k in 1..n {
                heads[order[k]] = order[picks[k].index(k)];
            }
            let words: Vec<&str> = labels.iter().map(|l| l.0).collect();
            let mut block = format!("# sent_id = p\n# text = {}\n", words.join(" "));
            for i in 1..=n {
                let (w, rel, upos) = labels[i - 1];
                let rel = if heads[i] == 0 { "root" } else { rel };
                block.push_str(&format!("{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\t_\n", i, w, w.to_lowercase(), upos, heads[i], rel));
            }
            parse_conllu(block.as_bytes()).unwrap().remove(0)
        })
}

pub fn norm(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Largest one-to-one matching among the included predictions, by exhaustive search.
pub fn max_matching(ok: &[Vec<bool>], preds: &[usize], used: &mut Vec<bool>) -> usize {
    let Some((&p, rest)) = preds.split_first() else {
        return 0;
    };
    let mut best = max_matching(ok, rest, used);
    for g in 0..used.len() {
        if ok[p][g] && !used[g] {
            used[g] = true;
            best = best.max(1 + max_matching(ok, rest, used));
            used[g] = false;
        }
    }
    best
}

pub fn brute_force(gold: &GoldSet, preds: &[SentenceTuple], table: &EmbeddingTable, cfg: &MatchConfig) -> Vec<(f64, usize, usize)> {
    let ok: Vec<Vec<bool>> = preds
        .iter()
        .map(|p| {
            gold.tuples()
                .iter()
                .map(|g| {
                    norm(&p.sentence) == norm(&g.sentence)
                        && tuple_match(&p.extraction, &g.extraction, table, cfg).unwrap().matched
                })
                .collect()
        })
        .collect();
    let conf = |i: usize| preds[i].extraction.confidence.unwrap();
    let mut cutoffs: Vec<f64> = preds.iter().map(|p| p.extraction.confidence.unwrap()).collect();
    cutoffs.sort_by(|a, b| b.total_cmp(a));
    cutoffs.dedup();
    cutoffs
        .into_iter()
        .map(|c| {
            let inc: Vec<usize> = (0..preds.len()).filter(|&i| conf(i) >= c).collect();
            let m = max_matching(&ok, &inc, &mut vec![false; gold.len()]);
            (c, m, inc.len())
        })
        .collect()
}
