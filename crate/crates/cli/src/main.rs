use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{info, warn};

use qa2oie::corpus::{self, CorpusStats, DropCounts};
use qa2oie::eval::{evaluate, load_gold, load_predictions, write_pr_csv};
use qa2oie::matcher::{tuple_match, MatchConfig, DEFAULT_THRESHOLD};
use qa2oie::pipeline::{convert, index_parses, ConvertConfig};
use qa2oie::{parse_conllu, read_newsqa, read_squad, EmbeddingTable, Error, Extraction, Registry, Source};

const AUDIT_CATEGORIES: [&str; 8] = [
    "noun-mediated",
    "sentence-level inference",
    "long sentence",
    "nominalization",
    "noisy informal",
    "pp-attachment",
    "explicit",
    "misaligned",
];

/// Reference counts for the full public SQuAD v1.1 and NewsQA releases
/// converted with the original parser: (sentences, tuples).
const REFERENCE_COUNTS: [(&str, usize, usize); 3] = [
    ("newsqa", 50_880, 56_646),
    ("squad", 38_773, 51_949),
    ("total", 89_653, 107_595),
];
const REFERENCE_VALIDATION: usize = 1_000;

#[derive(Parser)]
#[command(name = "qa2oie", version, about = "Convert QA datasets into OpenIE tuples and evaluate extractions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a QA dataset plus question parses into a tuple corpus.
    Convert {
        #[arg(long)]
        input: PathBuf,
        /// squad or newsqa
        #[arg(long)]
        format: String,
        /// CoNLL-U parses of the questions, sent_id = question id.
        #[arg(long)]
        parses: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Directory of NewsQA story files, for CSV input without story_text.
        #[arg(long)]
        stories: Option<PathBuf>,
        #[arg(long, default_value_t = qa2oie::classify::DEFAULT_MAX_QUESTION_CHARS)]
        max_question_chars: usize,
        /// Tuples held out into <out>/validation.
        #[arg(long, default_value_t = 0)]
        validation_n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Rule order file, one rule id per line.
        #[arg(long)]
        rules: Option<PathBuf>,
    },
    /// Summarize a converted corpus.
    Stats {
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Print a seeded random sample for manual audit.
    ///
    /// Audit categories: noun-mediated, sentence-level inference, long
    /// sentence, nominalization, noisy informal, pp-attachment, explicit,
    /// misaligned.
    Sample {
        /// corpus.jsonl or a corpus directory
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare one predicted tuple with one gold tuple.
    Match {
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        #[arg(long, num_args = 3, value_names = ["SUBJECT", "RELATION", "OBJECT"])]
        pred: Vec<String>,
        #[arg(long, num_args = 3, value_names = ["SUBJECT", "RELATION", "OBJECT"])]
        gold: Vec<String>,
        #[arg(long)]
        vocab_limit: Option<usize>,
    },
    /// Score predictions against gold tuples and write a PR curve.
    Eval {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        preds: PathBuf,
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
        /// Load only the first N vectors.
        #[arg(long)]
        vocab_limit: Option<usize>,
        #[arg(long, default_value = "pr_curve.csv")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            match e {
                Error::InvalidArgument(_) | Error::Registry(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn read_text(path: &Path) -> qa2oie::Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn run(command: Command) -> qa2oie::Result<()> {
    match command {
        Command::Convert {
            input,
            format,
            parses,
            out,
            stories,
            max_question_chars,
            validation_n,
            seed,
            jobs,
            rules,
        } => {
            let source: Source = format.parse()?;
            if jobs == 0 {
                return Err(Error::InvalidArgument("--jobs must be at least 1".into()));
            }
            let registry = match rules {
                Some(p) => Registry::parse_order(&read_text(&p)?)?,
                None => Registry::default(),
            };
            let text = read_text(&input)?;
            let read = match source {
                Source::Squad => read_squad(&text)?,
                Source::Newsqa => read_newsqa(&text, stories.as_deref())?,
            };
            let file = fs::File::open(&parses).map_err(|e| Error::Io {
                path: parses.clone(),
                source: e,
            })?;
            let trees = parse_conllu(io::BufReader::new(file))?;
            let config = ConvertConfig {
                max_question_chars,
                registry,
                jobs,
            };
            let conversion = convert(&read.pairs, &index_parses(trees), &config)?;
            info!("{} of {} pairs converted", conversion.examples.len(), read.pairs.len());

            let drops = DropCounts {
                reader_dropped: read.dropped,
                ..conversion.drops
            };
            let qa_pairs = BTreeMap::from([(source, read.pairs.len() + read.dropped)]);
            let stats = CorpusStats::compute(&conversion.examples, &qa_pairs, validation_n, drops);
            let (train, validation) = corpus::split_validation(conversion.examples, validation_n, seed)?;
            corpus::write_corpus(&out, &train, &validation, &stats)?;
            print_stats(&mut io::stdout().lock(), &stats)?;
            Ok(())
        }
        Command::Stats { corpus: dir } => {
            let stats = match corpus::read_stats(&dir) {
                Ok(s) => s,
                Err(_) => {
                    warn!("no {} in {}; counting from the corpus", corpus::STATS_FILE, dir.display());
                    let examples = corpus::read_corpus_dir(&dir)?;
                    CorpusStats::compute(&examples, &BTreeMap::new(), 0, DropCounts::default())
                }
            };
            let mut out = io::stdout().lock();
            print_stats(&mut out, &stats)?;
            writeln!(out)?;
            writeln!(out, "reference (full public data, original parser)")?;
            writeln!(out, "{:<8} {:>10} {:>8}", "source", "sentences", "tuples")?;
            for (name, s, t) in REFERENCE_COUNTS {
                writeln!(out, "{:<8} {:>10} {:>8}", name, s, t)?;
            }
            writeln!(out, "validation tuples: {}", REFERENCE_VALIDATION)?;
            Ok(())
        }
        Command::Sample { corpus: path, n, seed } => {
            let examples = if path.is_dir() {
                corpus::read_corpus(&path.join(corpus::CORPUS_FILE))?
            } else {
                corpus::read_corpus(&path)?
            };
            let picked = corpus::sample_indices(examples.len(), n, seed)?;
            let mut out = io::stdout().lock();
            if picked.is_empty() {
                return Ok(());
            }
            writeln!(out, "# {} of {} tuples, seed {}", n, examples.len(), seed)?;
            writeln!(out, "# categories: {}", AUDIT_CATEGORIES.join(" | "))?;
            for (k, &i) in picked.iter().enumerate() {
                let ex = &examples[i];
                let rule = ex.extraction.rule_id.map_or("-".to_string(), |r| r.to_string());
                writeln!(out)?;
                writeln!(out, "[{}] {} {} {}", k + 1, ex.qa_id, ex.source, rule)?;
                writeln!(out, "sentence: {}", ex.sentence)?;
                writeln!(out, "tuple:    {}", ex.extraction.triple_text())?;
                writeln!(out, "category: ")?;
            }
            Ok(())
        }
        Command::Match {
            embeddings,
            threshold,
            pred,
            gold,
            vocab_limit,
        } => {
            let config = MatchConfig::new(threshold)?;
            let table = EmbeddingTable::load(&embeddings, vocab_limit)?;
            let p = Extraction::new(&pred[0], &pred[1], &pred[2]);
            let g = Extraction::new(&gold[0], &gold[1], &gold[2]);
            let r = tuple_match(&p, &g, &table, &config)?;
            if r.oov > 0 {
                warn!("{} out-of-vocabulary words skipped", r.oov);
            }
            let mut out = io::stdout().lock();
            writeln!(out, "subject\t{}", r.sims.subject)?;
            writeln!(out, "relation\t{}", r.sims.relation)?;
            writeln!(out, "object\t{}", r.sims.object)?;
            writeln!(out, "matched\t{}", r.matched)?;
            Ok(())
        }
        Command::Eval {
            gold,
            preds,
            embeddings,
            threshold,
            vocab_limit,
            out,
        } => {
            let config = MatchConfig::new(threshold)?;
            let gold = load_gold(&gold)?;
            let preds = load_predictions(&preds)?;
            let table = EmbeddingTable::load(&embeddings, vocab_limit)?;
            let ev = evaluate(&gold, &preds, &table, &config)?;
            if ev.oov > 0 {
                warn!("{} out-of-vocabulary words skipped", ev.oov);
            }
            let file = fs::File::create(&out).map_err(|e| Error::Io {
                path: out.clone(),
                source: e,
            })?;
            write_pr_csv(io::BufWriter::new(file), &ev.points)?;
            writeln!(io::stdout().lock(), "auc\t{}", ev.auc)?;
            Ok(())
        }
    }
}

fn print_stats<W: Write>(out: &mut W, stats: &CorpusStats) -> io::Result<()> {
    writeln!(out, "{:<8} {:>10} {:>8} {:>9}", "source", "sentences", "tuples", "qa_pairs")?;
    for (name, s) in &stats.sources {
        writeln!(out, "{:<8} {:>10} {:>8} {:>9}", name, s.sentences, s.tuples, s.qa_pairs)?;
    }
    let t = &stats.total;
    writeln!(out, "{:<8} {:>10} {:>8} {:>9}", "total", t.sentences, t.tuples, t.qa_pairs)?;
    writeln!(out, "validation tuples: {}", stats.validation_tuples)?;
    let d = &stats.drops;
    writeln!(
        out,
        "dropped: reader {}, missing parse {}, too long {}, no rule {}, align {}",
        d.reader_dropped, d.missing_parse, d.too_long, d.no_rule, d.align_error
    )
}
