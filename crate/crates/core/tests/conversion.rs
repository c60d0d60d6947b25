use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;

use qa2oie::corpus::{self, split_validation, write_examples};
use qa2oie::pipeline::{convert, convert_one, coverage, index_parses, ConvertConfig, DropCause};
use qa2oie::{parse_conllu, read_newsqa, read_squad, segment_sentences, AlignedExample, DepTree, Extraction, QAPair, Source};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn load(qa: &str, parses: &str) -> (Vec<QAPair>, HashMap<String, DepTree>) {
    let text = fs::read_to_string(fixture(qa)).unwrap();
    let pairs = if qa.ends_with(".csv") {
        read_newsqa(&text, None).unwrap().pairs
    } else {
        read_squad(&text).unwrap().pairs
    };
    let trees = parse_conllu(fs::read_to_string(fixture(parses)).unwrap().as_bytes()).unwrap();
    (pairs, index_parses(trees))
}

/// Hand-checked expected output for the 50-question fixture.
const COVERAGE50: [(&str, &str, &str, &str, &str); 41] = [
    ("q01", "R01-who-copula", "The Norse leader", "was", "Rollo"),
    ("q02", "R14-generic-nsubj", "Normandy", "in what country is located", "France"),
    ("q03", "R14-generic-nsubj", "Rollo", "who did swear fealty to", "King Charles III of West Francia"),
    ("q04", "R15-generic-no-subj", "The Normans", "what gave", "its name to Normandy"),
    ("q05", "R05-when-did", "the Norman identity", "when did emerge", "in the first half of the 10th century"),
    ("q06", "R05-when-did", "Einstein", "when did emigrate to the US", "1933"),
    ("q07", "R09-what-did", "Einstein", "what did develop", "the theory of relativity"),
    ("q08", "R07-where-did", "Einstein", "where did settle", "Princeton"),
    ("q09", "R09-what-did", "Einstein", "what prize did receive in 1921", "the Nobel Prize in Physics"),
    ("q11", "R09-what-did", "Tesla", "what did build", "a coil"),
    ("q12", "R03-who-passive", "the Tesla coil", "invented by", "Nikola Tesla"),
    ("q13", "R02-who-verb", "Westinghouse Electric", "licensed", "his alternating current motor"),
    ("q14", "R11-how-no-subj", "around 300", "how many patents were granted", "to Tesla"),
    ("q15", "R04-what-copula-nsubj", "Nikola Tesla", "was", "a Serbian-American inventor and electrical engineer"),
    ("q16", "R08-where-copula", "the Eiffel Tower", "where is", "on the Champ de Mars in Paris"),
    ("q17", "R06-when-was", "the Eiffel Tower", "when was built", "between 1887 and 1889"),
    ("q18", "R13-whose", "Gustave Eiffel", "has", "company"),
    ("q19", "R14-generic-nsubj", "the Eiffel Tower", "how tall is", "330 metres"),
    ("q21", "R10-how-many-nsubj", "Jupiter", "how many moons does have", "95"),
    ("q22", "R02-who-verb", "Galileo Galilei", "discovered", "the four largest moons of Jupiter"),
    ("q23", "R14-generic-nsubj", "Jupiter", "what was named after", "the Roman god Jupiter"),
    ("q24", "R04-what-copula-nsubj", "Jupiter", "is", "a gas giant"),
    ("q26", "R02-who-verb", "Steve Jobs, Steve Wozniak and Ronald Wayne", "founded", "Apple"),
    ("q27", "R14-generic-nsubj", "Apple", "where is headquartered", "Cupertino, California"),
    ("q28", "R01-who-copula", "Tim Cook", "is", "the chief executive of Apple"),
    ("q29", "R09-what-did", "Apple", "what does design", "the iPhone, the iPad and the Mac"),
    ("q30", "R12-which-nsubj", "Apple", "was valued", "at one trillion dollars"),
    ("q31", "R08-where-copula", "the source of the Amazon", "where is", "in the Andes Mountains of Peru"),
    ("q32", "R14-generic-nsubj", "the Amazon", "which countries does flow through", "Brazil, Peru and Colombia"),
    ("q33", "R10-how-many-nsubj", "the Amazon basin", "how much area does cover", "about seven million square kilometres"),
    ("q34", "R01-who-copula", "Francisco de Orellana", "was", "the first European to navigate the Amazon"),
    ("q36", "R09-what-did", "Marie Curie", "what did research", "radioactivity"),
    ("q37", "R02-who-verb", "her husband Pierre Curie", "discovered with Marie Curie", "polonium and radium"),
    ("q38", "R14-generic-nsubj", "Marie Curie", "why did die", "aplastic anaemia caused by exposure to radiation"),
    ("q41", "R02-who-verb", "the Ming dynasty", "built", "the best-known sections of the wall"),
    ("q42", "R14-generic-nsubj", "the wall", "how far does stretch", "more than 21,000 kilometres"),
    ("q43", "R06-when-was", "the Great Wall", "when was declared a World Heritage Site", "1987"),
    ("q44", "R04-what-copula-nsubj", "the Great Wall of China", "is", "a series of fortifications"),
    ("q46", "R06-when-was", "Beethoven", "when was born", "December 1770"),
    ("q47", "R07-where-did", "Beethoven", "where did move in his early twenties", "Vienna"),
    ("q48", "R14-generic-nsubj", "Beethoven", "who did study with", "Joseph Haydn"),
];

#[test]
fn coverage_fixture_tuples() {
    let (pairs, parses) = load("coverage50.json", "coverage50.conllu");
    let out = convert(&pairs, &parses, &ConvertConfig::default()).unwrap();
    let got: HashMap<&str, &AlignedExample> = out.examples.iter().map(|e| (e.qa_id.as_str(), e)).collect();
    assert_eq!(got.len(), COVERAGE50.len());
    for (id, rule, s, r, o) in COVERAGE50 {
        let ex = got.get(id).unwrap_or_else(|| panic!("{} not converted", id));
        assert_eq!(ex.extraction.rule_id.unwrap().as_str(), rule, "{}", id);
        assert_eq!(ex.extraction.slots(), [s, r, o], "{}", id);
    }
    assert_eq!(out.drops.too_long, 3);
    assert_eq!(out.drops.no_rule, 6);
    assert_eq!(coverage(&out, pairs.len()), 0.82);
}

#[test]
fn coverage_fixture_drop_reasons() {
    let (pairs, parses) = load("coverage50.json", "coverage50.conllu");
    let config = ConvertConfig::default();
    let cause = |id: &str| {
        let qa = pairs.iter().find(|p| p.id == id).unwrap();
        convert_one(qa, &parses, &config).err()
    };
    for id in ["q20", "q45", "q49"] {
        assert_eq!(cause(id), Some(DropCause::TooLong), "{}", id);
    }
    // no wh-word, or nothing left for a slot once the wh-word is removed
    for id in ["q10", "q25", "q35", "q39", "q40", "q50"] {
        assert_eq!(cause(id), Some(DropCause::NoRule), "{}", id);
    }
}

#[test]
fn newsqa_fixture_tuples() {
    let (pairs, parses) = load("newsqa8.csv", "newsqa8.conllu");
    let out = convert(&pairs, &parses, &ConvertConfig::default()).unwrap();
    assert_eq!(out.examples.len(), 13);
    let triples: Vec<[&str; 3]> = out.examples.iter().map(|e| e.extraction.slots()).collect();
    assert_eq!(triples[0], ["Jerome Powell", "is", "the Fed chair"]);
    assert_eq!(triples[5], ["More than 5,000", "how many visitors attended", "the ceremony"]);
    assert_eq!(triples[12], ["the fire", "when was brought under control", "by Sunday"]);
    assert!(out.examples.iter().all(|e| e.source == Source::Newsqa));
}

#[test]
fn missing_parse_is_counted() {
    let (pairs, mut parses) = load("squad_mini.json", "squad_mini.conllu");
    parses.remove("q01");
    let out = convert(&pairs, &parses, &ConvertConfig::default()).unwrap();
    assert_eq!(out.drops.missing_parse, 1);
    assert_eq!(out.examples.len(), 11);
}

#[test]
fn golden_corpus_is_byte_identical() {
    let (pairs, parses) = load("squad_mini.json", "squad_mini.conllu");
    let out = convert(&pairs, &parses, &ConvertConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    write_examples(dir.path(), &out.examples).unwrap();
    for name in [corpus::CORPUS_FILE, corpus::SRC_FILE, corpus::TGT_FILE] {
        let got = fs::read(dir.path().join(name)).unwrap();
        let want = fs::read(fixture("golden").join(name)).unwrap();
        assert!(got == want, "{} differs from golden", name);
    }
    assert_eq!(corpus::read_corpus(&fixture("golden").join(corpus::CORPUS_FILE)).unwrap(), out.examples);
}

#[test]
fn worker_count_does_not_change_output() {
    let (pairs, parses) = load("coverage50.json", "coverage50.conllu");
    let one = convert(&pairs, &parses, &ConvertConfig::default()).unwrap();
    let four = convert(&pairs, &parses, &ConvertConfig { jobs: 4, ..ConvertConfig::default() }).unwrap();
    assert_eq!(one.examples, four.examples);
    assert_eq!(one.drops, four.drops);
}

#[test]
fn answer_start_lies_in_chosen_sentence() {
    for (qa, parses) in [
        ("squad_mini.json", "squad_mini.conllu"),
        ("coverage50.json", "coverage50.conllu"),
        ("newsqa8.csv", "newsqa8.conllu"),
    ] {
        let (pairs, trees) = load(qa, parses);
        let out = convert(&pairs, &trees, &ConvertConfig::default()).unwrap();
        for ex in &out.examples {
            let qa = pairs.iter().find(|p| p.id == ex.qa_id).unwrap();
            let (start, end) = segment_sentences(&qa.passage)[ex.sentence_index];
            assert!(start <= qa.answer_start && qa.answer_start < end, "{}", ex.qa_id);
            assert_eq!(ex.sentence, qa.passage[start..end].trim());
        }
    }
}

#[test]
fn seeded_validation_split_is_frozen() {
    let examples: Vec<AlignedExample> = (0..100)
        .map(|i| AlignedExample {
            qa_id: format!("id{:03}", i),
            source: Source::Squad,
            sentence: format!("Sentence {}.", i),
            sentence_index: 0,
            extraction: Extraction::new("a", "b", "c"),
            flags: vec![],
        })
        .collect();
    let (train, val) = split_validation(examples.clone(), 10, 42).unwrap();
    let ids: Vec<&str> = val.iter().map(|e| e.qa_id.as_str()).collect();
    assert_eq!(ids, FROZEN_SPLIT);
    assert_eq!(train.len(), 90);
    assert!(train.iter().all(|t| !ids.contains(&t.qa_id.as_str())));

    let (train, val) = split_validation(examples.clone(), 0, 42).unwrap();
    assert_eq!((train.len(), val.len()), (100, 0));
    let (train, val) = split_validation(examples, 100, 42).unwrap();
    assert_eq!((train.len(), val.len()), (0, 100));
}

const FROZEN_SPLIT: [&str; 10] = [
    "id013", "id020", "id028", "id031", "id033", "id040", "id063", "id071", "id072", "id088",
];
