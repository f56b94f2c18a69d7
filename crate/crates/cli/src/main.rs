//! `convbench` — corpus-in, benchmark-out conversational retrieval pipeline.
//!
//! Exit codes: 0 success, 1 usage/config, 2 schema violation or missing
//! upstream artifact, 3 provider failure, 4 cost-budget refusal.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use convbench_core::curate::{HeuristicScorer, QualityScorer, RemoteScorer};
use convbench_core::pipeline::{
    run_all, run_stage, validate_file, validate_run_dir, RunConfig, RunManifest, SchemaKind,
    Stage, StagePaths,
};
use convbench_core::{store, Error};

#[derive(Parser)]
#[command(name = "convbench", version, about = "Synthesize, audit, and score conversational retrieval benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run pipeline stages (all six by default) under a run config.
    Run(RunArgs),
    /// Curate a raw-document JSONL into a chunk corpus.
    Curate(CurateArgs),
    /// Cluster a chunk corpus into ordered semantic clusters.
    Cluster(ClusterArgs),
    /// Generate multi-turn conversations from clusters.
    Generate(GenerateArgs),
    /// Audit conversations with the judge ensemble.
    Audit(AuditArgs),
    /// Evaluate retrieval quality over a generated benchmark.
    Bench(BenchArgs),
    /// Normalize an external benchmark into local instances.
    Adapt(AdaptArgs),
    /// Validate artifacts against their schemas.
    Validate(ValidateArgs),
    /// Re-emit the report for an existing run directory.
    Report(ReportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration TOML.
    #[arg(long)]
    config: PathBuf,
    /// Run a single stage instead of all six.
    #[arg(long)]
    stage: Option<String>,
    /// Re-execute even when the manifest says outputs are current.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct CurateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1024)]
    max_chars: usize,
    #[arg(long, default_value_t = 0.9)]
    dedup_threshold: f64,
    /// heuristic | remote
    #[arg(long, default_value = "heuristic")]
    scorer: String,
    /// Run config providing provider settings (needed for --scorer remote).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 8)]
    k: usize,
    #[arg(long, default_value_t = 32)]
    top_k: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    clusters: PathBuf,
    /// Chunk corpus the cluster member ids resolve against.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 8)]
    turns: usize,
    #[arg(long = "hard-prob", default_value_t = 0.25)]
    hard_prob: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Run config naming the agent models and provider.
    #[arg(long)]
    models: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    conversations: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    /// Comma-separated judge model ids.
    #[arg(long, value_delimiter = ',')]
    judges: Vec<String>,
    #[arg(long, default_value_t = 5)]
    pool_size: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output directory for records.jsonl and summary.json.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    conversations: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    /// Run config naming the embedding provider.
    #[arg(long)]
    embedder: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    budget: usize,
    /// Output directory for runs.jsonl and report.json.
    #[arg(long)]
    out: PathBuf,
    /// Enable the oracle rewrite arm with this model.
    #[arg(long)]
    rewrite: Option<String>,
}

#[derive(Args)]
struct AdaptArgs {
    /// qrecc | topiocqa | doc2dial
    #[arg(long)]
    format: String,
    #[arg(long)]
    instances: PathBuf,
    #[arg(long)]
    corpus: PathBuf,
    /// Output directory for instances.jsonl and corpus chunks.jsonl.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Schema kind (see `--help`) when validating one file.
    #[arg(long, requires = "file")]
    schema: Option<String>,
    #[arg(long)]
    file: Option<PathBuf>,
    /// Validate every artifact in a run directory instead.
    #[arg(long, conflicts_with_all = ["schema", "file"])]
    run_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    run_dir: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig, Error> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn dispatch(command: Command) -> Result<(), Error> {
    match command {
        Command::Run(args) => {
            let cfg = RunConfig::load(&args.config)?;
            let outcomes = match args.stage {
                Some(name) => vec![run_stage(Stage::from_str(&name)?, &cfg, args.force)?],
                None => run_all(&cfg, args.force)?,
            };
            for o in &outcomes {
                println!(
                    "{:<9} {}  {:>6} ms  ${:.6}  {} provider calls",
                    o.stage.to_string(),
                    if o.skipped { "skipped (current)" } else { "ran" },
                    o.entry.wall_time_ms,
                    o.entry.provider_cost_usd,
                    o.entry.provider_calls,
                );
            }
            Ok(())
        }
        Command::Curate(args) => {
            let mut cfg = load_config(&args.config)?;
            cfg.curate.max_chars = args.max_chars;
            cfg.curate.dedup_threshold = args.dedup_threshold;
            let docs: Vec<convbench_core::curate::RawDocument> = store::read_jsonl(&args.input)?;
            let gateway = cfg.gateway()?;
            let heuristic = HeuristicScorer;
            let remote;
            let scorer: &dyn QualityScorer = match args.scorer.as_str() {
                "heuristic" => &heuristic,
                "remote" => {
                    remote = RemoteScorer::new(&gateway, &cfg.curate.scorer_model);
                    &remote
                }
                other => return Err(Error::Config(format!("unknown scorer '{other}'"))),
            };
            let outcome =
                convbench_core::curate::curate_corpus(&docs, &cfg.curation_params(), scorer)?;
            store::write_jsonl(&args.out, &outcome.chunks)?;
            println!(
                "kept {} chunks ({} duplicates, {} below quality)",
                outcome.chunks.len(),
                outcome.dropped_duplicates.len(),
                outcome.dropped_quality.len()
            );
            Ok(())
        }
        Command::Cluster(args) => {
            let mut cfg = load_config(&args.config)?;
            cfg.cluster.k = args.k;
            cfg.cluster.top_k = args.top_k;
            cfg.seed = args.seed;
            let chunks: Vec<convbench_core::curate::Chunk> = store::read_jsonl(&args.input)?;
            let gateway = cfg.gateway()?;
            let clusters = convbench_core::cluster::cluster_chunks(
                &chunks,
                &cfg.cluster_params(),
                &gateway,
                cfg.seed,
            )?;
            store::write_jsonl(&args.out, &clusters)?;
            println!("{} clusters over {} chunks", clusters.len(), chunks.len());
            Ok(())
        }
        Command::Generate(args) => {
            let mut cfg = load_config(&args.models)?;
            cfg.generate.turns = args.turns;
            cfg.generate.hard_switch_prob = args.hard_prob;
            cfg.seed = args.seed;
            let clusters: Vec<convbench_core::cluster::SemanticCluster> =
                store::read_jsonl(&args.clusters)?;
            let chunks: Vec<convbench_core::curate::Chunk> = store::read_jsonl(&args.corpus)?;
            let corpus = convbench_core::curate::CorpusIndex::from_chunks(chunks);
            let gateway = cfg.gateway()?;
            let conversations = convbench_core::dialogue::generate_batch(
                &clusters,
                &corpus,
                &cfg.generate,
                &gateway,
                cfg.seed,
            )?;
            store::write_jsonl(&args.out, &conversations)?;
            let stats = convbench_core::dialogue::corpus_stats(&conversations);
            println!(
                "{} conversations, {} turns, {:.2} topics/conversation",
                stats.conversations, stats.turns, stats.mean_topics_per_conversation
            );
            Ok(())
        }
        Command::Audit(args) => {
            let mut cfg = load_config(&args.config)?;
            if !args.judges.is_empty() {
                cfg.audit.judges = args.judges.clone();
            }
            cfg.audit.pool_size = args.pool_size;
            cfg.seed = args.seed;
            let conversations: Vec<convbench_core::dialogue::Conversation> =
                store::read_jsonl(&args.conversations)?;
            let chunks: Vec<convbench_core::curate::Chunk> = store::read_jsonl(&args.corpus)?;
            let corpus = convbench_core::curate::CorpusIndex::from_chunks(chunks);
            let gateway = cfg.gateway()?;
            let outcome = convbench_core::audit::audit_conversations(
                &conversations,
                &corpus,
                &cfg.audit_params(),
                &gateway,
                cfg.seed,
            )?;
            store::write_jsonl(&args.out.join("records.jsonl"), &outcome.records)?;
            store::write_json(&args.out.join("summary.json"), &outcome.report)?;
            for (metric, mean) in &outcome.report.metric_means {
                println!("{metric:<15} {mean:.2}");
            }
            println!(
                "{} instances, {} flagged",
                outcome.report.instances,
                outcome.report.flagged.len()
            );
            Ok(())
        }
        Command::Bench(args) => {
            let mut cfg = load_config(&args.embedder)?;
            cfg.bench.budget = args.budget;
            cfg.bench.rewrite_model = args.rewrite.unwrap_or_default();
            let conversations: Vec<convbench_core::dialogue::Conversation> =
                store::read_jsonl(&args.conversations)?;
            let chunks: Vec<convbench_core::curate::Chunk> = store::read_jsonl(&args.corpus)?;
            let corpus = convbench_core::curate::CorpusIndex::from_chunks(chunks);
            let gateway = cfg.gateway()?;
            let index = convbench_core::retrieval::EmbeddingIndex::build(&corpus, &gateway)?;
            let instances =
                convbench_core::retrieval::instances_from_conversations(&conversations);
            let budget = cfg.bench.budget.min(corpus.len());
            let runs =
                convbench_core::retrieval::retrieve_all(&instances, &index, &gateway, budget)?;
            let judged = convbench_core::retrieval::judged_runs(&instances, &runs)?;
            let raw = convbench_core::retrieval::metrics_report(&judged, &cfg.bench.k_set);
            store::write_jsonl(&args.out.join("runs.jsonl"), &runs)?;

            let (rewritten, gap, excluded) = if cfg.bench.rewrite_model.is_empty() {
                (None, None, 0)
            } else {
                let (kept, rewritten_instances) = convbench_core::retrieval::rewrite_all(
                    &instances,
                    &cfg.bench.rewrite_model,
                    &gateway,
                );
                let rewritten_runs = convbench_core::retrieval::retrieve_all(
                    &rewritten_instances,
                    &index,
                    &gateway,
                    budget,
                )?;
                let rewritten_judged =
                    convbench_core::retrieval::judged_runs(&rewritten_instances, &rewritten_runs)?;
                let metrics =
                    convbench_core::retrieval::metrics_report(&rewritten_judged, &cfg.bench.k_set);
                let raw_on_kept: Vec<_> = kept.iter().map(|&i| judged[i].clone()).collect();
                let gap = convbench_core::retrieval::recall_at_k(&rewritten_judged, 5)
                    - convbench_core::retrieval::recall_at_k(&raw_on_kept, 5);
                (Some(metrics), Some(gap), instances.len() - kept.len())
            };
            let report = convbench_core::pipeline::BenchReport {
                raw,
                rewritten,
                rewrite_gap_r5: gap,
                rewrite_excluded: excluded,
            };
            store::write_json(&args.out.join("report.json"), &report)?;
            for (k, v) in &report.raw.recall {
                println!("R@{k:<5} {:6.2}", convbench_core::pipeline::pct(*v));
            }
            println!(
                "MRR@20 {:6.2}   NDCG@20 {:6.2}",
                convbench_core::pipeline::pct(report.raw.mrr_at_20),
                convbench_core::pipeline::pct(report.raw.ndcg_at_20)
            );
            Ok(())
        }
        Command::Adapt(args) => {
            let adapted = convbench_core::retrieval::adapt_external_benchmark(
                &args.instances,
                &args.corpus,
                &args.format,
            )?;
            store::write_jsonl(&args.out.join("instances.jsonl"), &adapted.instances)?;
            store::write_jsonl(&args.out.join("chunks.jsonl"), &adapted.corpus)?;
            println!(
                "{} instances, {} corpus chunks, {} rejected",
                adapted.instances.len(),
                adapted.corpus.len(),
                adapted.rejected.len()
            );
            for reason in &adapted.rejected {
                eprintln!("rejected: {reason}");
            }
            Ok(())
        }
        Command::Validate(args) => {
            if let Some(dir) = args.run_dir {
                let checked = validate_run_dir(&dir)?;
                for (name, count) in &checked {
                    println!("{name:<15} ok ({count} records)");
                }
                return Ok(());
            }
            match (args.schema, args.file) {
                (Some(schema), Some(file)) => {
                    let count = validate_file(SchemaKind::from_str(&schema)?, &file)?;
                    println!("{schema} ok ({count} records)");
                    Ok(())
                }
                _ => Err(Error::Config(
                    "validate needs either --run-dir or both --schema and --file".into(),
                )),
            }
        }
        Command::Report(args) => {
            let paths = StagePaths::new(&args.run_dir);
            if !paths.manifest.exists() {
                return Err(Error::MissingInput(paths.manifest));
            }
            let manifest: RunManifest = store::read_json(&paths.manifest)?;
            let doc = convbench_core::pipeline::write_report_files(&manifest, &paths)?;
            print!("{}", convbench_core::pipeline::render_text(&doc));
            Ok(())
        }
    }
}
