use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use apirec_core::code::ApiWhitelist;
use apirec_core::convert::{convert_posts_file, ConvertOptions, ConvertReport};
use apirec_core::corpus::read_jsonl_file;
use apirec_core::eval::{load_gold, render_table, render_tsv, run_experiment};
use apirec_core::index::{build_index_par, load_index, save_index, BuildConfig, Indices};
use apirec_core::stats::{
    api_frequency_stats, keyword_coverage, load_query_log, package_coverage, FrequencyDistribution, PackageMap,
    CODE_SEARCH_TERMS,
};
use apirec_core::{recommend, CorpusDocument, LexiconTagger, QueryConfig, QueryTermMode, Recommendation, StopWordList};
use serde::Serialize;

use crate::config::{self, require_exists, FileConfig, RankOverrides};
use crate::error::CliError;
use crate::{BuildArgs, Cli, Command, ConvertArgs, EvalArgs, RecommendArgs, StatsCommand};

pub fn run(cli: Cli) -> Result<(), CliError> {
    let file = FileConfig::load_optional(cli.config.as_deref())?;
    match cli.command {
        Command::Convert(a) => convert(a),
        Command::Build(a) => build(a, &file),
        Command::Recommend(a) => recommend_cmd(a, &file),
        Command::Eval(a) => eval(a, &file),
        Command::Stats(s) => stats(s, &file),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Other(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn read_corpus(path: &Path) -> Result<Vec<CorpusDocument>, CliError> {
    require_exists(path, "corpus")?;
    let read = read_jsonl_file(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    for s in &read.skipped {
        log::warn!("{}: line {} skipped: {}", path.display(), s.line, s.reason);
    }
    Ok(read.documents)
}

fn open_index(path: &Path, stops: &StopWordList) -> Result<Indices, CliError> {
    require_exists(path, "index directory")?;
    let indices = load_index(path)?;
    if BuildConfig::stopword_fingerprint(stops) != indices.stopwords_hash {
        log::warn!("the stop-word list differs from the one used to build {}", path.display());
    }
    Ok(indices)
}

fn convert(a: ConvertArgs) -> Result<(), CliError> {
    require_exists(&a.posts, "posts file")?;
    let opts = ConvertOptions {
        tag: (!a.any_tag).then(|| a.tag.clone()),
        min_answers: a.min_answers,
        require_code: !a.allow_no_code,
    };
    let report = match &a.out {
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            convert_posts_file(&a.posts, &opts, BufWriter::new(f))?
        }
        None => convert_posts_file(&a.posts, &opts, io::stdout().lock())?,
    };
    // With JSONL on stdout the report goes to stderr.
    let text = if a.json {
        serde_json::to_string_pretty(&report).map_err(|e| CliError::Other(e.to_string()))?
    } else {
        convert_report_text(&report)
    };
    if a.out.is_some() {
        println!("{}", text.trim_end());
    } else {
        eprintln!("{}", text.trim_end());
    }
    Ok(())
}

fn convert_report_text(r: &ConvertReport) -> String {
    [
        ("rows", r.rows),
        ("malformed_rows", r.malformed_rows),
        ("questions", r.questions),
        ("dropped_tag", r.dropped_tag),
        ("dropped_min_answers", r.dropped_min_answers),
        ("dropped_no_accepted", r.dropped_no_accepted),
        ("dropped_accepted_missing", r.dropped_accepted_missing),
        ("dropped_no_code", r.dropped_no_code),
        ("kept", r.kept),
    ]
    .iter()
    .map(|(k, v)| format!("{k}\t{v}\n"))
    .collect()
}

#[derive(Serialize)]
struct BuildSummary {
    documents: u64,
    skipped: usize,
    without_apis: u64,
    vocabulary: usize,
    associations: usize,
    context_pairs: usize,
    index: String,
}

fn build(a: BuildArgs, file: &FileConfig) -> Result<(), CliError> {
    require_exists(&a.corpus, "corpus")?;
    let stopwords = config::stopwords(a.stopwords.as_deref(), file)?;
    let whitelist = match &a.whitelist {
        Some(p) => {
            require_exists(p, "whitelist")?;
            Some(ApiWhitelist::from_file(p)?)
        }
        None => None,
    };
    let cfg = BuildConfig {
        stopwords,
        whitelist,
        min_count: a.min_count,
    };
    let docs = read_corpus(&a.corpus)?;
    let (indices, report) = build_index_par(&docs, &cfg);
    for s in &report.skipped {
        log::warn!("document {:?} skipped: {}", s.id, s.reason);
    }
    save_index(&indices, &a.out)?;
    let summary = BuildSummary {
        documents: report.ingested,
        skipped: report.skipped.len(),
        without_apis: report.without_apis,
        vocabulary: indices.assoc.vocabulary_size(),
        associations: indices.assoc.association_count(),
        context_pairs: indices.context.pairs().count(),
        index: a.out.display().to_string(),
    };
    if a.json {
        return print_json(&summary);
    }
    println!("documents\t{}", summary.documents);
    println!("skipped\t{}", summary.skipped);
    println!("without_apis\t{}", summary.without_apis);
    println!("vocabulary\t{}", summary.vocabulary);
    println!("associations\t{}", summary.associations);
    println!("context_pairs\t{}", summary.context_pairs);
    Ok(())
}

fn recommend_cmd(a: RecommendArgs, file: &FileConfig) -> Result<(), CliError> {
    let over = RankOverrides {
        delta: a.rank.delta,
        gamma: a.rank.gamma,
        top_k: a.top,
    };
    let cfg = QueryConfig {
        mode: config::query_mode(a.terms, file)?,
        ranker: config::ranker_config(&over, file)?,
    };
    let stops = config::stopwords(a.rank.stopwords.as_deref(), file)?;
    let indices = open_index(&a.index, &stops)?;
    let query = a.query.join(" ");
    let rec = recommend(&indices, &query, &stops, &LexiconTagger, &cfg)?;
    if rec.degraded {
        log::warn!("part-of-speech tagging failed; all query terms were used");
    }
    if a.json {
        return print_json(&rec);
    }
    print_recommendation(&rec, a.explain)
}

fn print_recommendation(rec: &Recommendation, explain: bool) -> Result<(), CliError> {
    if rec.apis.is_empty() {
        let kws: Vec<&str> = rec.keywords.iter().map(|k| k.as_str()).collect();
        eprintln!("no API is associated with the keywords {kws:?}");
        return Ok(());
    }
    let mut out = io::stdout().lock();
    for (i, s) in rec.apis.iter().enumerate() {
        writeln!(out, "{}\t{}\t{:.4}", i + 1, s.api, s.total)?;
        if explain {
            for (k, v) in &s.kac_parts {
                writeln!(out, "\tkac\t{k}\t{v:.4}")?;
            }
            for ((x, y), v) in &s.kkc_parts {
                writeln!(out, "\tkkc\t{x}+{y}\t{v:.4}")?;
            }
        }
    }
    Ok(())
}

fn eval(a: EvalArgs, file: &FileConfig) -> Result<(), CliError> {
    require_exists(&a.gold, "gold file")?;
    let over = RankOverrides {
        delta: a.rank.delta,
        gamma: a.rank.gamma,
        top_k: None,
    };
    let ranker = config::ranker_config(&over, file)?;
    if a.k.contains(&0) {
        return Err(CliError::Usage("--k values must be at least 1".into()));
    }
    let modes = if a.modes.is_empty() {
        QueryTermMode::ALL.to_vec()
    } else {
        a.modes.clone()
    };
    let stops = config::stopwords(a.rank.stopwords.as_deref(), file)?;
    let indices = open_index(&a.index, &stops)?;
    let gold = load_gold(&a.gold)?;
    let reports = run_experiment(&indices, &gold, &stops, &LexiconTagger, &ranker, &modes, &a.k)?;
    for r in &reports {
        for f in &r.failures {
            log::warn!("[{}] {:?}: {}", r.mode, f.query, f.reason);
        }
    }
    if a.json {
        print_json(&reports)
    } else if a.tsv {
        print!("{}", render_tsv(&reports));
        Ok(())
    } else {
        print!("{}", render_table(&reports));
        Ok(())
    }
}

fn distribution_text(d: &FrequencyDistribution) -> String {
    let mut out = format!("# documents\t{}\n# mean\t{:.4}\n", d.documents, d.mean);
    for q in &d.quantiles {
        out.push_str(&format!("# q{}\t{}\n", q.q, q.value));
    }
    out + &d.to_tsv()
}

fn stats(cmd: StatsCommand, file: &FileConfig) -> Result<(), CliError> {
    match cmd {
        StatsCommand::ApiFreq {
            corpus,
            whitelist,
            distinct,
            json,
        } => {
            require_exists(&whitelist, "whitelist")?;
            let wl = ApiWhitelist::from_file(&whitelist)?;
            let docs = read_corpus(&corpus)?;
            let dist = api_frequency_stats(&docs, &wl, distinct)?;
            if json {
                return print_json(&dist);
            }
            print!("{}", distribution_text(&dist));
        }
        StatsCommand::Coverage { corpus, packages, json } => {
            require_exists(&packages, "package map")?;
            let map = PackageMap::from_file(&packages)?;
            let docs = read_corpus(&corpus)?;
            let report = package_coverage(&docs, &map)?;
            if json {
                return print_json(&report);
            }
            println!("# answers\t{}\n# mean_coverage\t{:.4}", report.answers, report.mean_coverage);
            print!("{}", report.to_tsv());
        }
        StatsCommand::Keywords {
            corpus,
            queries,
            filter,
            stopwords,
            json,
        } => {
            require_exists(&queries, "query log")?;
            let stops = config::stopwords(stopwords.as_deref(), file)?;
            let docs = read_corpus(&corpus)?;
            let log = load_query_log(&queries)?;
            let filter: BTreeSet<String> = if filter.is_empty() {
                CODE_SEARCH_TERMS.iter().map(|s| s.to_string()).collect()
            } else {
                filter.into_iter().collect()
            };
            let titles: Vec<&str> = docs.iter().map(|d| d.title.as_str()).collect();
            let report = keyword_coverage(&titles, &log, &filter, &stops)?;
            if json {
                return print_json(&report);
            }
            print!("{}", report.to_tsv());
            println!("# keywords per title");
            print!("{}", distribution_text(&report.per_title));
        }
    }
    Ok(())
}
