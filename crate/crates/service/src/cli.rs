//! `lineup` command line.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lineup_core::catalog::{dataset_stats, ingest_persons_with_report};
use lineup_core::descriptor_file::write_descriptor_file;
use lineup_core::fairness::{sample_description, simulate_members, MockDescription};
use lineup_core::recommenders::{build_cb_index, top_k_with, HybridIndex};
use lineup_core::session::{read_event_log, replay_log};
use lineup_core::studylab::{load_study_log, study_report, Tail, DEFAULT_CENTRAL_EUROPE};
use lineup_core::{interleave_lists, Strategy};

use crate::config::{Overrides, ServiceConfig};
use crate::data::{load_catalog, load_descriptor_matrix, load_engine};

#[derive(Debug, Parser)]
#[command(name = "lineup", version, about = "Photo lineup candidate engine")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct GlobalArgs {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "DIR")]
    pub data_dir: Option<PathBuf>,
    /// Candidates per strategy.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Weight of suspect similarity during refinement.
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    /// Weight of the visual score in the hybrid strategy.
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_name = "ADDR")]
    pub listen: Option<String>,
    /// Hide recommendation provenance in API responses.
    #[arg(long, global = true)]
    pub study_mode: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a person file and store it canonically in the data directory.
    Ingest { input: PathBuf },
    /// Build the attribute index and, optionally, import a descriptor file.
    Index {
        #[arg(long, value_name = "FILE")]
        descriptors: Option<PathBuf>,
    },
    /// Print the top-k candidates for a suspect.
    Recommend {
        #[arg(long)]
        suspect: String,
        #[arg(long, default_value = "cb", value_parser = parse_strategy)]
        strategy: Strategy,
    },
    /// Print the interleaved CB and visual lists for a suspect.
    Interleave {
        #[arg(long)]
        suspect: String,
    },
    /// Session log tools.
    Session {
        #[command(subcommand)]
        action: SessionCommand,
    },
    /// Simulate mock witnesses on a lineup.
    Fairness {
        #[arg(long)]
        suspect: String,
        /// Comma-separated filler ids.
        #[arg(long, value_delimiter = ',', required = true)]
        fillers: Vec<String>,
        /// Comma-separated description tokens; sampled from the suspect if absent.
        #[arg(long, value_delimiter = ',')]
        description: Vec<String>,
        /// Tokens to sample when no description is given [default: 3, capped
        /// at the suspect's token count].
        #[arg(long)]
        description_size: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        witnesses: u64,
    },
    /// Report selection statistics, agreement and t-tests for a study log.
    Evaluate {
        study: PathBuf,
        #[arg(long, value_enum, default_value_t = TailArg::TwoSided)]
        tail: TailArg,
        /// Comma-separated nationalities forming the in-group.
        #[arg(long, value_delimiter = ',')]
        in_group: Vec<String>,
    },
    /// Print dataset statistics.
    Stats {
        #[arg(long, default_value_t = 10)]
        top_nationalities: usize,
        #[arg(long, default_value_t = 10)]
        top_features: usize,
    },
    /// Run the HTTP service.
    Serve,
}

#[derive(Debug, Subcommand)]
pub enum SessionCommand {
    /// Rebuild a session from its event log and verify every event.
    Replay { log: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TailArg {
    TwoSided,
    Greater,
    Less,
}

impl From<TailArg> for Tail {
    fn from(t: TailArg) -> Self {
        match t {
            TailArg::TwoSided => Tail::TwoSided,
            TailArg::Greater => Tail::Greater,
            TailArg::Less => Tail::Less,
        }
    }
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    s.parse().map_err(|e: lineup_core::Error| e.to_string())
}

impl GlobalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            data_dir: self.data_dir.clone(),
            k: self.k,
            lambda: self.lambda,
            beta: self.beta,
            seed: self.seed,
            listen: self.listen.clone(),
            study_mode: self.study_mode.then_some(true),
        }
    }

    pub fn resolve(&self) -> anyhow::Result<ServiceConfig> {
        let env = Overrides::from_env(|k| std::env::var(k).ok())?;
        Ok(ServiceConfig::resolve(
            self.config.as_deref(),
            env,
            self.overrides(),
        )?)
    }
}

impl Cli {
    pub fn run(self, out: &mut dyn Write) -> anyhow::Result<()> {
        let config = self.global.resolve()?;
        match self.command {
            Command::Ingest { input } => ingest(&config, &input, out),
            Command::Index { descriptors } => index(&config, descriptors, out),
            Command::Recommend { suspect, strategy } => recommend(&config, &suspect, strategy, out),
            Command::Interleave { suspect } => interleave(&config, &suspect, out),
            Command::Session {
                action: SessionCommand::Replay { log },
            } => replay(&config, &log, out),
            Command::Fairness {
                suspect,
                fillers,
                description,
                description_size,
                witnesses,
            } => {
                let catalog = load_catalog(&config.persons_path())?;
                let s = catalog.require(&suspect)?;
                let description = if description.is_empty() {
                    let m = description_size.unwrap_or_else(|| {
                        crate::api::DEFAULT_DESCRIPTION_SIZE.min(s.tokens().len())
                    });
                    sample_description(s, m, config.seed)?
                } else {
                    MockDescription::new(description)?
                };
                let mut members = vec![s];
                for f in &fillers {
                    members.push(catalog.require(f)?);
                }
                let report = simulate_members(
                    &suspect,
                    &members,
                    &description,
                    witnesses,
                    config.seed,
                    lineup_core::Execution::default(),
                )?;
                write!(out, "{}", report.render())?;
                Ok(())
            }
            Command::Evaluate {
                study,
                tail,
                in_group,
            } => {
                let file = File::open(&study)
                    .with_context(|| format!("cannot open {}", study.display()))?;
                let log = load_study_log(BufReader::new(file))
                    .with_context(|| format!("cannot load {}", study.display()))?;
                let report = if in_group.is_empty() {
                    study_report(&log, &DEFAULT_CENTRAL_EUROPE, tail.into())
                } else {
                    study_report(&log, &in_group, tail.into())
                };
                write!(out, "{}", report.render())?;
                Ok(())
            }
            Command::Stats {
                top_nationalities,
                top_features,
            } => {
                let catalog = load_catalog(&config.persons_path())?;
                let stats = dataset_stats(&catalog)?;
                write!(
                    out,
                    "{}",
                    stats.render_table(top_nationalities, top_features)
                )?;
                Ok(())
            }
            Command::Serve => {
                let rt = tokio::runtime::Runtime::new()?;
                rt.block_on(crate::api::serve(config))
            }
        }
    }
}

fn ingest(config: &ServiceConfig, input: &PathBuf, out: &mut dyn Write) -> anyhow::Result<()> {
    let file = File::open(input).with_context(|| format!("cannot open {}", input.display()))?;
    let (catalog, report) = ingest_persons_with_report(BufReader::new(file))
        .with_context(|| format!("cannot ingest {}", input.display()))?;
    std::fs::create_dir_all(&config.data_dir)?;
    let dest = config.persons_path();
    let mut buf = Vec::new();
    catalog.write_jsonl(&mut buf)?;
    std::fs::write(&dest, buf).with_context(|| format!("cannot write {}", dest.display()))?;
    writeln!(
        out,
        "ingested {} persons ({} features, {} nationalities, {} unknown fields ignored) -> {}",
        catalog.len(),
        catalog.feature_vocabulary().len(),
        catalog.nationality_vocabulary().len(),
        report.unknown_fields,
        dest.display()
    )?;
    Ok(())
}

fn index(
    config: &ServiceConfig,
    descriptors: Option<PathBuf>,
    out: &mut dyn Write,
) -> anyhow::Result<()> {
    let catalog = load_catalog(&config.persons_path())?;
    let cb = build_cb_index(&catalog);
    writeln!(
        out,
        "attribute index: {} persons, {} tokens",
        catalog.len(),
        cb.vocabulary().len()
    )?;
    if let Some(src) = descriptors {
        let matrix = load_descriptor_matrix(&src, &catalog)?;
        let dest = config.descriptors_path();
        let file =
            File::create(&dest).with_context(|| format!("cannot write {}", dest.display()))?;
        write_descriptor_file(std::io::BufWriter::new(file), &matrix.to_file())?;
        writeln!(
            out,
            "visual index: {} descriptors of dimension {}, {} persons missing -> {}",
            matrix.len(),
            matrix.dim(),
            matrix.missing().len(),
            dest.display()
        )?;
    }
    Ok(())
}

fn recommend(
    config: &ServiceConfig,
    suspect: &str,
    strategy: Strategy,
    out: &mut dyn Write,
) -> anyhow::Result<()> {
    let engine = load_engine(config)?;
    let visual = || {
        engine
            .visual
            .as_deref()
            .context("no descriptors loaded; run `lineup index --descriptors FILE` first")
    };
    let list = match strategy {
        Strategy::Cb => top_k_with(engine.cb.as_ref(), suspect, config.k, engine.exec)?,
        Strategy::Visual => top_k_with(visual()?, suspect, config.k, engine.exec)?,
        Strategy::Hybrid => {
            let h = HybridIndex::new(&engine.cb, visual()?, config.beta)?;
            top_k_with(&h, suspect, config.k, engine.exec)?
        }
    };
    writeln!(out, "# {} top-{} for {suspect}", list.strategy, config.k)?;
    for (i, c) in list.entries.iter().enumerate() {
        writeln!(out, "{}\t{}\t{:.6}", i + 1, c.person_id, c.score)?;
    }
    Ok(())
}

fn interleave(config: &ServiceConfig, suspect: &str, out: &mut dyn Write) -> anyhow::Result<()> {
    let engine = load_engine(config)?;
    let Some(visual) = engine.visual.as_deref() else {
        bail!("no descriptors loaded; run `lineup index --descriptors FILE` first");
    };
    let a = top_k_with(engine.cb.as_ref(), suspect, config.k, engine.exec)?;
    let b = top_k_with(visual, suspect, config.k, engine.exec)?;
    let merged = interleave_lists(&a, &b, config.seed)?;
    serde_json::to_writer_pretty(&mut *out, &merged)?;
    writeln!(out)?;
    Ok(())
}

fn replay(config: &ServiceConfig, log: &PathBuf, out: &mut dyn Write) -> anyhow::Result<()> {
    let engine = load_engine(config)?;
    let file = File::open(log).with_context(|| format!("cannot open {}", log.display()))?;
    let events = read_event_log(BufReader::new(file))?;
    let s = replay_log(&engine, &events)
        .with_context(|| format!("replay of {} failed", log.display()))?;
    writeln!(
        out,
        "session {} verified: {} events, {} rounds, {} fillers, {:?}",
        s.session_id,
        s.events.len(),
        s.rounds.len(),
        s.selected.len(),
        s.status
    )?;
    Ok(())
}
