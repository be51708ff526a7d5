use std::fs;
use std::io::{self, BufRead, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use multibridge::bpe::{learn_bpe, revert_line, BpeConfig, BpeModel};
use multibridge::corpus::{LanguageCode, LanguagePair, LanguageRegistry, TranslationDirection};
use multibridge::metrics::{
    bleu, chrf2, cosine_batch, nway_compare, sentence_cosines, BleuTokenize, EmbeddingTable,
    EvalReport, Metric, MetricScore,
};
use multibridge::pipeline::{
    discover_bitext, extract, load_mined, run_pipeline, write_mined, PipelineConfig,
};
use multibridge::pivot::{build_pivot_index, extraction_stats, MiningConfig, StatsMatrix};
use multibridge::sampler::{
    assemble_training_set, select_spanning_pairs, SamplingPlan, SamplingStrategy, DEFAULT_PER_PAIR,
};
use multibridge::script::{detokenize, from_devanagari, normalize_unicode, to_devanagari, tokenize};
use multibridge::tagger::{tag_line, untag};

#[derive(Parser)]
#[command(name = "mbridge", version, about = "Corpus tooling for multi-bridge multilingual NMT")]
struct Cli {
    /// Log level for stderr (error, warn, info, debug, trace).
    #[arg(long, global = true, default_value = "info")]
    log: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RegistryArg {
    /// TOML language registry; defaults to the built-in ten Indic languages plus English.
    #[arg(long)]
    registry: Option<PathBuf>,
}

impl RegistryArg {
    fn load(&self) -> Result<LanguageRegistry> {
        match &self.registry {
            None => Ok(LanguageRegistry::builtin().clone()),
            Some(p) => {
                let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                LanguageRegistry::from_toml(&text).with_context(|| format!("parsing {}", p.display()))
            }
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Mine non-English bitext by joining English-centric corpora on the English side.
    Extract {
        #[arg(long, default_value = "en")]
        pivot: String,
        /// Directory of `<a>-<b>.<a>` / `<a>-<b>.<b>` files.
        #[arg(long)]
        inputs: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Restrict mining to these pairs (comma separated, e.g. bn-hi,ta-te).
        #[arg(long, value_delimiter = ',')]
        pairs: Option<Vec<String>>,
        /// Per-key cross-product cap; 0 disables it.
        #[arg(long, default_value_t = 64)]
        xprod_cap: usize,
        #[command(flatten)]
        registry: RegistryArg,
    },
    /// Write the pair-count matrix as TSV.
    Stats {
        #[arg(long, default_value = "en")]
        pivot: String,
        /// English-centric corpora the mined set came from.
        #[arg(long, requires = "mined", conflicts_with = "matrix")]
        inputs: Option<PathBuf>,
        /// Output directory of `extract`.
        #[arg(long, requires = "inputs")]
        mined: Option<PathBuf>,
        /// Re-read an existing matrix TSV instead of counting corpora.
        #[arg(long, required_unless_present = "inputs")]
        matrix: Option<PathBuf>,
        /// Output path; the pre-dedup matrix goes to `<out>.raw.tsv` when counting corpora.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        registry: RegistryArg,
    },
    /// Assemble a training set and its manifest.
    Sample {
        #[arg(long, value_enum)]
        strategy: StrategyArg,
        /// Pairs for sample-pairs (comma separated).
        #[arg(long, value_delimiter = ',', conflicts_with = "n_pairs")]
        pairs: Option<Vec<String>>,
        /// Draw this many spanning pairs for sample-pairs instead of listing them.
        #[arg(long)]
        n_pairs: Option<usize>,
        /// Per-pair target for sample-fraction.
        #[arg(long, default_value_t = DEFAULT_PER_PAIR)]
        per_pair: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "en")]
        pivot: String,
        /// English-centric corpora.
        #[arg(long)]
        inputs: PathBuf,
        /// Output directory of `extract`.
        #[arg(long)]
        mined: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        registry: RegistryArg,
    },
    /// Normalize, transliterate and tokenize stdin line by line.
    Preprocess {
        #[arg(long)]
        lang: String,
        #[arg(long, conflicts_with = "from_devanagari")]
        to_devanagari: bool,
        #[arg(long)]
        from_devanagari: bool,
        #[arg(long, conflicts_with = "detokenize")]
        tokenize: bool,
        #[arg(long)]
        detokenize: bool,
    },
    /// Learn BPE merges from tokenized text (files, or stdin when none are given).
    LearnBpe {
        #[arg(long, default_value_t = 32000)]
        merges: usize,
        #[arg(long, default_value_t = 5)]
        min_freq: u64,
        #[arg(long, default_value_t = 2)]
        merge_floor: u64,
        #[arg(long)]
        out: PathBuf,
        inputs: Vec<PathBuf>,
    },
    /// Segment stdin with a learned model, or undo segmentation.
    ApplyBpe {
        #[arg(long, required_unless_present = "revert")]
        model: Option<PathBuf>,
        #[arg(long)]
        revert: bool,
    },
    /// Prefix stdin lines with direction tags, or strip them.
    Tag {
        #[arg(long, required_unless_present = "untag")]
        src: Option<String>,
        #[arg(long, required_unless_present = "untag")]
        tgt: Option<String>,
        #[arg(long)]
        untag: bool,
    },
    /// Score hypotheses against references; TSV on stdout.
    Evaluate {
        #[arg(long, value_delimiter = ',', required = true)]
        metric: Vec<Metric>,
        #[arg(long, value_enum, default_value = "13a")]
        tok: TokArg,
        #[arg(long)]
        hyp: Option<PathBuf>,
        #[arg(long = "ref")]
        reference: Option<PathBuf>,
        /// Hypothesis embeddings for cosine.
        #[arg(long)]
        emb_a: Option<PathBuf>,
        /// Reference embeddings for cosine.
        #[arg(long)]
        emb_b: Option<PathBuf>,
        /// Direction label (e.g. bn-hi); required for --json.
        #[arg(long)]
        direction: Option<String>,
        /// Write the JSON report here.
        #[arg(long, requires = "direction")]
        json: Option<PathBuf>,
        /// Source and target reference embeddings for test-set similarity.
        #[arg(long, num_args = 2, value_names = ["SRC", "TGT"])]
        tset: Option<Vec<PathBuf>>,
    },
    /// Build the English-centric vs non-English comparison from JSON reports.
    Compare {
        #[arg(long, default_value = "en")]
        pivot: String,
        #[arg(required = true)]
        reports: Vec<PathBuf>,
    },
    /// Run every stage from a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's work directory.
        #[arg(long)]
        work: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    SamplePairs,
    SampleFraction,
    TrainAll,
}

#[derive(Clone, Copy, ValueEnum)]
enum TokArg {
    #[value(name = "13a")]
    Thirteen,
    None,
}

impl From<TokArg> for BleuTokenize {
    fn from(t: TokArg) -> Self {
        match t {
            TokArg::Thirteen => BleuTokenize::Thirteen,
            TokArg::None => BleuTokenize::None,
        }
    }
}

/// Marks argument errors found after clap parsing so they exit with 1.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn lang(registry: &LanguageRegistry, code: &str) -> Result<LanguageCode> {
    registry.lookup(code).map_err(|e| usage(e.to_string()))
}

fn pairs(registry: &LanguageRegistry, specs: &[String]) -> Result<Vec<LanguagePair>> {
    specs
        .iter()
        .map(|s| {
            let (a, b) = s.split_once('-').ok_or_else(|| usage(format!("bad pair {s:?}")))?;
            LanguagePair::new(lang(registry, a)?, lang(registry, b)?).map_err(|e| usage(e.to_string()))
        })
        .collect()
}

fn check_pivot(registry: &LanguageRegistry, pivot: &str) -> Result<LanguageCode> {
    let code = lang(registry, pivot)?;
    if code != registry.pivot() {
        return Err(usage(format!("pivot {pivot} does not match the registry pivot {}", registry.pivot())));
    }
    Ok(code)
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.lines().map(str::to_string).collect())
}

fn stdin_lines() -> impl Iterator<Item = io::Result<String>> {
    io::stdin().lock().lines()
}

/// Applies `f` to each stdin line and writes the results to stdout.
fn filter_stdin(mut f: impl FnMut(&str) -> Result<String>) -> Result<()> {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    for (i, line) in stdin_lines().enumerate() {
        let line = line.context("reading stdin")?;
        let processed = f(&line).with_context(|| format!("line {}", i + 1))?;
        writeln!(out, "{processed}")?;
    }
    out.flush()?;
    Ok(())
}

fn mined_and_languages(
    inputs: &Path,
    registry: &LanguageRegistry,
    pivot: LanguageCode,
) -> Result<(Vec<multibridge::BitextCorpus>, Vec<LanguageCode>)> {
    let corpora = discover_bitext(inputs, registry)?;
    if corpora.is_empty() {
        bail!("no <a>-<b>.<a> bitext files in {}", inputs.display());
    }
    let mut langs: Vec<LanguageCode> = corpora
        .iter()
        .flat_map(|c| [c.src_lang(), c.tgt_lang()])
        .filter(|l| *l != pivot)
        .collect();
    langs.sort();
    langs.dedup();
    Ok((corpora, langs))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Extract { pivot, inputs, out, pairs: pair_specs, xprod_cap, registry } => {
            let registry = registry.load()?;
            let pivot = check_pivot(&registry, &pivot)?;
            let wanted = pair_specs.as_deref().map(|p| pairs(&registry, p)).transpose()?;
            let (english, langs) = mined_and_languages(&inputs, &registry, pivot)?;
            let index = build_pivot_index(&english, pivot)?;
            let config = MiningConfig { xprod_cap: (xprod_cap > 0).then_some(xprod_cap) };
            let mined = extract(&index, &langs, wanted.as_deref(), &config)?;
            write_mined(&mined, &out)?;
            for (pair, m) in mined.iter() {
                log::info!("pair={pair} pairs={} raw_pairs={}", m.corpus.len(), m.raw_pairs);
            }
        }
        Command::Stats { pivot, inputs, mined, matrix, out, registry } => {
            let registry = registry.load()?;
            let pivot = check_pivot(&registry, &pivot)?;
            if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
            }
            let table = match (inputs, mined, matrix) {
                (Some(inputs), Some(mined), _) => {
                    let (english, _) = mined_and_languages(&inputs, &registry, pivot)?;
                    let stats = extraction_stats(pivot, &english, &load_mined(&mined, &registry)?)?;
                    fs::write(&out, stats.deduplicated.to_tsv(1)).with_context(|| format!("writing {}", out.display()))?;
                    let raw = out.with_extension("raw.tsv");
                    fs::write(&raw, stats.raw.to_tsv(1)).with_context(|| format!("writing {}", raw.display()))?;
                    stats.deduplicated
                }
                (_, _, Some(matrix)) => {
                    let text = fs::read_to_string(&matrix).with_context(|| format!("reading {}", matrix.display()))?;
                    let table = StatsMatrix::parse_tsv(&text, &registry)?;
                    fs::write(&out, table.to_tsv(1)).with_context(|| format!("writing {}", out.display()))?;
                    table
                }
                _ => return Err(usage("pass either --inputs with --mined, or --matrix")),
            };
            log::info!(
                "english_total={} grand_total={} unique_pairs={}",
                table.english_total(),
                table.grand_total(),
                table.unique_pairs()
            );
        }
        Command::Sample { strategy, pairs: pair_specs, n_pairs, per_pair, seed, pivot, inputs, mined, out, registry } => {
            let registry = registry.load()?;
            let pivot = check_pivot(&registry, &pivot)?;
            let (english, langs) = mined_and_languages(&inputs, &registry, pivot)?;
            let strategy = match strategy {
                StrategyArg::SamplePairs => {
                    let pairs = match (pair_specs, n_pairs) {
                        (Some(p), _) => pairs(&registry, &p)?,
                        (None, Some(n)) => select_spanning_pairs(&langs, n, seed)?,
                        (None, None) => return Err(usage("sample-pairs needs --pairs or --n-pairs")),
                    };
                    SamplingStrategy::SamplePairs { pairs }
                }
                StrategyArg::SampleFraction => SamplingStrategy::SampleFraction { per_pair_target: per_pair },
                StrategyArg::TrainAll => SamplingStrategy::TrainAll,
            };
            let mined = load_mined(&mined, &registry)?;
            let dataset = assemble_training_set(pivot, &english, &mined, &SamplingPlan::new(strategy, seed))?;
            let manifest = dataset.write(&out, "train")?;
            manifest.save(out.join("manifest.json"))?;
            manifest.verify_counts(&out)?;
        }
        Command::Preprocess { lang: code, to_devanagari: to_dev, from_devanagari: from_dev, tokenize: tok, detokenize: detok } => {
            let code = lang(LanguageRegistry::builtin(), &code)?;
            let indic = code.script().is_indic();
            filter_stdin(|line| {
                let mut text = normalize_unicode(line);
                if to_dev && indic {
                    text = to_devanagari(&text, code)?;
                }
                if detok {
                    let tokens: Vec<&str> = text.split_whitespace().collect();
                    text = detokenize(&tokens, code);
                }
                if from_dev && indic {
                    text = from_devanagari(&text, code)?;
                }
                if tok {
                    text = tokenize(&text, code).join(" ");
                }
                Ok(text)
            })?;
        }
        Command::LearnBpe { merges, min_freq, merge_floor, out, inputs } => {
            let mut lines = Vec::new();
            if inputs.is_empty() {
                let mut text = String::new();
                io::stdin().read_to_string(&mut text).context("reading stdin")?;
                lines.extend(text.lines().map(str::to_string));
            }
            for path in &inputs {
                lines.extend(read_lines(path)?);
            }
            let config = BpeConfig { num_merges: merges, min_frequency: min_freq, merge_floor };
            let model = learn_bpe(&lines, &config)?;
            model.save(&out)?;
            log::info!("merges={} vocab={}", model.merges().len(), model.vocab().map_or(0, |v| v.len()));
        }
        Command::ApplyBpe { model, revert } => {
            if revert {
                filter_stdin(|line| Ok(revert_line(line)?))?;
            } else {
                let model = BpeModel::load(model.as_deref().expect("required by clap"))?;
                filter_stdin(|line| Ok(model.apply_line(line)))?;
            }
        }
        Command::Tag { src, tgt, untag: strip } => {
            if strip {
                filter_stdin(|line| {
                    let tokens: Vec<&str> = line.split_whitespace().collect();
                    Ok(untag(&tokens)?.payload.join(" "))
                })?;
            } else {
                let registry = LanguageRegistry::builtin();
                let src = lang(registry, src.as_deref().expect("required by clap"))?;
                let tgt = lang(registry, tgt.as_deref().expect("required by clap"))?;
                filter_stdin(|line| Ok(tag_line(line, src, tgt)?))?;
            }
        }
        Command::Evaluate { metric, tok, hyp, reference, emb_a, emb_b, direction, json, tset } => {
            let direction = direction
                .map(|d| d.parse::<TranslationDirection>().map_err(|e| usage(e.to_string())))
                .transpose()?;
            let text_needed = metric.iter().any(|m| *m != Metric::Cosine);
            let texts = if text_needed {
                let (Some(h), Some(r)) = (&hyp, &reference) else {
                    return Err(usage("bleu and chrf2 need --hyp and --ref"));
                };
                Some((read_lines(h)?, read_lines(r)?))
            } else {
                None
            };
            let mut scores: Vec<MetricScore> = Vec::new();
            let mut n_sentences = texts.as_ref().map_or(0, |(h, _)| h.len());
            for m in &metric {
                let score = match m {
                    Metric::Bleu => {
                        let (h, r) = texts.as_ref().expect("checked above");
                        bleu(h, r, tok.into())?
                    }
                    Metric::Chrf2 => {
                        let (h, r) = texts.as_ref().expect("checked above");
                        chrf2(h, r)?
                    }
                    Metric::Cosine => {
                        let (Some(a), Some(b)) = (&emb_a, &emb_b) else {
                            return Err(usage("cosine needs --emb-a and --emb-b"));
                        };
                        let (a, b) = (EmbeddingTable::load(a)?, EmbeddingTable::load(b)?);
                        n_sentences = n_sentences.max(sentence_cosines(&a, &b)?.len());
                        cosine_batch(&a, &b)?
                    }
                };
                scores.push(score);
            }
            let tset_score = match &tset {
                Some(paths) => Some(cosine_batch(&EmbeddingTable::load(&paths[0])?, &EmbeddingTable::load(&paths[1])?)?),
                None => None,
            };

            let stdout = io::stdout();
            let mut out = stdout.lock();
            writeln!(out, "metric\tscore\tsignature")?;
            for s in &scores {
                writeln!(out, "{}\t{:.4}\t{}", s.metric, s.value, s.signature)?;
            }
            if let Some(t) = &tset_score {
                writeln!(out, "tset_sim\t{:.4}\t{}", t.value, t.signature)?;
            }
            if let (Some(path), Some(direction)) = (json, direction) {
                let mut report = EvalReport::new(direction, n_sentences);
                for s in scores {
                    report = report.with_score(s);
                }
                report.testset_similarity = tset_score;
                let text = serde_json::to_string_pretty(&report)? + "\n";
                fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Compare { pivot, reports } => {
            let pivot = lang(LanguageRegistry::builtin(), &pivot)?;
            let reports = reports
                .iter()
                .map(|p| {
                    let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                    serde_json::from_str::<EvalReport>(&text).with_context(|| format!("parsing {}", p.display()))
                })
                .collect::<Result<Vec<_>>>()?;
            let table = nway_compare(&reports, pivot)?;
            for d in &table.missing {
                log::warn!("missing direction {d}");
            }
            print!("{}", table.to_tsv());
        }
        Command::Run { config, work } => {
            let mut config = PipelineConfig::load(&config)?;
            if let Some(work) = work {
                config.paths.work = work;
            }
            let report = run_pipeline(&config)?;
            log::info!(
                "done mined_pairs={} train_pairs={} merges={}",
                report.mined.iter().map(|m| m.pairs).sum::<u64>(),
                report.train.total_pairs,
                report.bpe.merges
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    env_logger::Builder::new()
        .parse_filters(&cli.log)
        .format_timestamp_millis()
        .target(env_logger::Target::Stderr)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
