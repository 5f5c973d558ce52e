//! The `wgverify` command-line driver.
//!
//! Subcommands:
//!
//! - `verify`: Monte Carlo trials of the sampling test described by a TOML
//!   run manifest, one CSV or JSON-lines row per trial plus an aggregate row.
//! - `gap`: dense check of the spectral-gap and perturbation formulas.
//! - `iqp`: IQP instance artifacts (state, distribution, Z_R, copy plan).
//! - `state`: amplitude dump of a weighted graph state.
//!
//! Exit codes: 0 on success whatever the accept/reject statistics, 3 when a
//! size limit is exceeded, 2 for every other error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{greedy_cover, load_graph, IndependenceCover, Vertex, WeightedGraph};
use crate::iqp::{self, IqpInstance};
use crate::operators::{certify, GapRequest};
use crate::protocols::{
    run_random_sampling_test, CandidateBases, Protocol, ProtocolConfig, ProtocolKind,
};
use crate::sources::{make_source, SourceSpec};
use crate::state::StateVector;

#[derive(Debug, Parser)]
#[command(
    name = "wgverify",
    version,
    about = "Verification of weighted graph states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run repeated sampling tests from a run manifest.
    Verify(VerifyArgs),
    /// Check spectral gaps and perturbation bounds on a small graph.
    Gap(GapArgs),
    /// Work with an IQP instance file.
    Iqp(IqpArgs),
    /// Print the amplitudes of a weighted graph state.
    State(StateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum OutputFormat {
    Csv,
    JsonLines,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    /// TOML run manifest.
    #[arg(long)]
    pub manifest: PathBuf,
    /// Number of independent runs (overrides the manifest).
    #[arg(long, env = "WGVERIFY_TRIALS")]
    pub trials: Option<usize>,
    /// Base seed; trial t uses stream t of this seed (overrides the manifest).
    #[arg(long, env = "WGVERIFY_SEED")]
    pub seed: Option<u64>,
    #[arg(long, value_enum, env = "WGVERIFY_FORMAT", default_value = "csv")]
    pub format: OutputFormat,
    /// Output file; standard output when absent.
    #[arg(long, env = "WGVERIFY_OUT")]
    pub out: Option<PathBuf>,
    /// Draw one basis label per copy in nonadaptive_h instead of one per vertex.
    #[arg(long)]
    pub shared_draw: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GapKind {
    AdaptiveExact,
    AdaptiveH,
    Nonadaptive,
    NonadaptiveH,
}

#[derive(Debug, clap::Args)]
pub struct GapArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Cover as semicolon-separated parts, e.g. "1,3;2". Greedy when absent.
    #[arg(long)]
    pub cover: Option<String>,
    #[arg(long, value_enum)]
    pub kind: GapKind,
    /// Number of bases (grid kinds; uniform h(k) for nonadaptive).
    #[arg(long)]
    pub h: Option<u32>,
    /// Per-vertex basis counts for nonadaptive, e.g. "1,2,2".
    #[arg(long, conflicts_with = "h")]
    pub hvec: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IqpAction {
    /// Amplitude dump of the IQP output state.
    State,
    /// Z-basis output distribution.
    Dist,
    /// Brute-force Z_R.
    Zr,
    /// Copies needed for verification.
    Plan,
    /// Underlying weighted graph in graph-file format.
    Graph,
}

#[derive(Debug, clap::Args)]
pub struct IqpArgs {
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(value_enum)]
    pub action: IqpAction,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.05)]
    pub beta: f64,
}

#[derive(Debug, clap::Args)]
pub struct StateArgs {
    #[arg(long)]
    pub graph: PathBuf,
}

/// Run manifest. Paths are relative to the manifest's directory.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub graph: PathBuf,
    /// Explicit cover; greedy in vertex order when absent.
    pub cover: Option<Vec<Vec<Vertex>>>,
    pub protocol: String,
    /// N, tested copies per run.
    pub copies: usize,
    pub beta: f64,
    pub h: Option<u32>,
    /// Candidate angles per vertex for nonadaptive_e; derived when absent.
    pub candidates: Option<Vec<Vec<f64>>>,
    /// As the `--shared-draw` flag.
    #[serde(default)]
    pub shared_draw: bool,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    #[serde(default = "honest")]
    pub source: SourceSpec,
}

fn honest() -> SourceSpec {
    SourceSpec::Honest
}

impl Manifest {
    pub fn parse(text: &str, name: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].lines().count().max(1))
                .unwrap_or(0);
            Error::Parse {
                path: name.to_string(),
                line,
                msg: e.message().to_string(),
            }
        })
    }
}

/// Output row shared by the CSV and JSON-lines formats.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub row: &'static str,
    pub manifest_hash: String,
    pub seed: u64,
    pub trial: Option<usize>,
    pub protocol: &'static str,
    /// Whether the run accepted; for the aggregate row, the number accepted.
    pub accepted: Option<usize>,
    pub withheld: Option<usize>,
    pub failed_copies: Option<usize>,
    pub certificate: Option<f64>,
    pub informative: Option<bool>,
    pub acceptance_rate: Option<f64>,
    pub completeness_bound: Option<f64>,
}

pub const CSV_HEADER: &str = "row,manifest_hash,seed,trial,protocol,accepted,withheld,failed_copies,certificate,informative,acceptance_rate,completeness_bound";

impl Row {
    fn csv(&self) -> String {
        fn opt<T: ToString>(x: &Option<T>) -> String {
            x.as_ref().map(T::to_string).unwrap_or_default()
        }
        [
            self.row.to_string(),
            self.manifest_hash.clone(),
            self.seed.to_string(),
            opt(&self.trial),
            self.protocol.to_string(),
            opt(&self.accepted),
            opt(&self.withheld),
            opt(&self.failed_copies),
            opt(&self.certificate),
            opt(&self.informative),
            opt(&self.acceptance_rate),
            opt(&self.completeness_bound),
        ]
        .join(",")
    }
}

/// Manifest plus everything it references, ready to run.
pub struct Experiment {
    pub graph: WeightedGraph,
    pub config: ProtocolConfig,
    pub source: SourceSpec,
    pub manifest_hash: String,
    pub seed: u64,
    pub trials: usize,
}

/// First 16 hex digits of the SHA-256 of the manifest bytes.
pub fn manifest_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))[..16].to_string()
}

pub fn parse_cover_arg(g: &WeightedGraph, text: &str) -> Result<IndependenceCover> {
    let parts = text
        .split(';')
        .map(|p| {
            p.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<Vertex>()
                        .map_err(|_| Error::input(format!("bad vertex '{v}' in cover")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    IndependenceCover::new(g, parts)
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|x| {
            x.trim()
                .parse::<T>()
                .map_err(|_| Error::input(format!("bad {what} entry '{x}'")))
        })
        .collect()
}

fn natural_cover(g: &WeightedGraph) -> Result<IndependenceCover> {
    greedy_cover(g, &g.vertices().collect::<Vec<_>>())
}

impl Experiment {
    pub fn load(args: &VerifyArgs) -> Result<Self> {
        let bytes = std::fs::read(&args.manifest)?;
        let name = args.manifest.display().to_string();
        let text = String::from_utf8(bytes.clone()).map_err(|_| Error::Parse {
            path: name.clone(),
            line: 0,
            msg: "manifest is not UTF-8".into(),
        })?;
        let m = Manifest::parse(&text, &name)?;
        let base = args.manifest.parent().unwrap_or(Path::new("."));
        let graph = load_graph(&base.join(&m.graph))?;
        let cover = match &m.cover {
            Some(parts) => IndependenceCover::new(&graph, parts.clone())?,
            None => natural_cover(&graph)?,
        };
        let need_h = || {
            m.h.ok_or_else(|| Error::config(format!("protocol {} needs 'h'", m.protocol)))
        };
        let protocol = match ProtocolKind::parse(&m.protocol)? {
            ProtocolKind::AdaptiveExact => Protocol::AdaptiveExact,
            ProtocolKind::AdaptiveH => Protocol::AdaptiveH { h: need_h()? },
            ProtocolKind::NonadaptiveE => Protocol::NonadaptiveE(match &m.candidates {
                Some(lists) => CandidateBases::new(&graph, lists.clone())?,
                None => CandidateBases::derive(&graph)?,
            }),
            ProtocolKind::NonadaptiveH => Protocol::NonadaptiveH {
                h: need_h()?,
                shared_draw: args.shared_draw || m.shared_draw,
            },
        };
        let config = ProtocolConfig::new(&graph, cover, protocol, m.copies, m.beta)?;
        let trials = args.trials.or(m.trials).unwrap_or(1);
        if trials == 0 {
            return Err(Error::config("trials must be at least 1"));
        }
        // Fail early on a bad source rather than inside every trial.
        make_source(&m.source, &graph, m.copies)?;
        Ok(Experiment {
            graph,
            config,
            source: m.source,
            manifest_hash: manifest_hash(&bytes),
            seed: args.seed.or(m.seed).unwrap_or(0),
            trials,
        })
    }

    /// Runs every trial (in parallel) and returns rows in trial order,
    /// followed by the aggregate row.
    pub fn run(&self) -> Result<Vec<Row>> {
        let protocol = self.config.kind().name();
        let results: Vec<Result<Row>> = (0..self.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(t as u64);
                let mut src = make_source(&self.source, &self.graph, self.config.copies())?;
                let r =
                    run_random_sampling_test(src.as_mut(), &self.graph, &self.config, &mut rng)?;
                Ok(Row {
                    row: "trial",
                    manifest_hash: self.manifest_hash.clone(),
                    seed: self.seed,
                    trial: Some(t),
                    protocol,
                    accepted: Some(usize::from(r.accepted)),
                    withheld: Some(r.withheld),
                    failed_copies: Some(r.failed_copies()),
                    certificate: r.certificate.map(|c| c.bound),
                    informative: r.certificate.map(|c| c.informative),
                    acceptance_rate: None,
                    completeness_bound: None,
                })
            })
            .collect();
        let rows = results.into_iter().collect::<Result<Vec<_>>>()?;
        let accepted: usize = rows.iter().filter_map(|r| r.accepted).sum();
        let cert = self.config.certificate();
        let aggregate = Row {
            row: "aggregate",
            manifest_hash: self.manifest_hash.clone(),
            seed: self.seed,
            trial: None,
            protocol,
            accepted: Some(accepted),
            withheld: None,
            failed_copies: None,
            certificate: Some(cert.bound),
            informative: Some(cert.informative),
            acceptance_rate: Some(accepted as f64 / self.trials as f64),
            completeness_bound: Some(self.config.completeness_bound()),
        };
        let mut rows = rows;
        rows.push(aggregate);
        Ok(rows)
    }
}

pub fn write_rows(rows: &[Row], format: OutputFormat, out: &mut dyn Write) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for r in rows {
                writeln!(out, "{}", r.csv())?;
            }
        }
        OutputFormat::JsonLines => {
            for r in rows {
                let line = serde_json::to_string(r).map_err(|e| Error::Input(e.to_string()))?;
                writeln!(out, "{line}")?;
            }
        }
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, stdout: &mut dyn Write) -> Result<()> {
    let exp = Experiment::load(args)?;
    let rows = exp.run()?;
    match &args.out {
        Some(path) => {
            let mut buf = Vec::new();
            write_rows(&rows, args.format, &mut buf)?;
            std::fs::write(path, buf)?;
        }
        None => write_rows(&rows, args.format, stdout)?,
    }
    Ok(())
}

fn cmd_gap(args: &GapArgs, stdout: &mut dyn Write) -> Result<()> {
    let g = load_graph(&args.graph)?;
    if g.n() > crate::operators::ORACLE_LIMIT {
        return Err(Error::capability(format!(
            "gap checks limited to n <= {}, got {}",
            crate::operators::ORACLE_LIMIT,
            g.n()
        )));
    }
    let cover = match &args.cover {
        Some(text) => parse_cover_arg(&g, text)?,
        None => natural_cover(&g)?,
    };
    let need_h = || args.h.ok_or_else(|| Error::input("this kind needs --h"));
    let request = match args.kind {
        GapKind::AdaptiveExact => GapRequest::AdaptiveExact,
        GapKind::AdaptiveH => GapRequest::AdaptiveH(need_h()?),
        GapKind::NonadaptiveH => GapRequest::NonadaptiveH(need_h()?),
        GapKind::Nonadaptive => GapRequest::Nonadaptive(match (&args.hvec, args.h) {
            (Some(text), _) => parse_list(text, "hvec")?,
            (None, Some(h)) => vec![h; g.n()],
            (None, None) => CandidateBases::derive(&g)?.counts(),
        }),
    };
    let report = certify(&g, &cover, &request)?;
    write!(stdout, "{}", report.to_text())?;
    Ok(())
}

fn cmd_iqp(args: &IqpArgs, stdout: &mut dyn Write) -> Result<()> {
    let inst = IqpInstance::load(&args.instance)?;
    match args.action {
        IqpAction::State => write!(
            stdout,
            "{}",
            iqp::build_iqp_state(&inst)?.state()?.to_dump()
        )?,
        IqpAction::Dist => {
            let s = iqp::build_iqp_state(&inst)?.state()?;
            write!(
                stdout,
                "{}",
                iqp::format_distribution(&iqp::output_distribution(&s), inst.n())
            )?;
        }
        IqpAction::Zr => {
            let z = iqp::compute_z_r(&inst)?;
            writeln!(
                stdout,
                "re {:?}\nim {:?}\nabs2 {:?}",
                z.re,
                z.im,
                z.norm_sqr()
            )?;
        }
        IqpAction::Plan => {
            let plan = iqp::verification_params_iqp(inst.n(), args.epsilon, args.beta)?;
            writeln!(stdout, "protocol nonadaptive_e")?;
            writeln!(stdout, "n {}", inst.n())?;
            writeln!(stdout, "epsilon {}", args.epsilon)?;
            writeln!(stdout, "beta {}", args.beta)?;
            writeln!(stdout, "max_bases 2")?;
            writeln!(stdout, "copies {}", plan.copies)?;
        }
        IqpAction::Graph => write!(stdout, "{}", iqp::build_iqp_state(&inst)?.graph.to_text())?,
    }
    Ok(())
}

fn cmd_state(args: &StateArgs, stdout: &mut dyn Write) -> Result<()> {
    let g = load_graph(&args.graph)?;
    write!(
        stdout,
        "{}",
        StateVector::weighted_graph_state(&g)?.to_dump()
    )?;
    Ok(())
}

/// Executes a parsed command, writing reports to `stdout`.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Verify(a) => cmd_verify(a, stdout),
        Command::Gap(a) => cmd_gap(a, stdout),
        Command::Iqp(a) => cmd_iqp(a, stdout),
        Command::State(a) => cmd_state(a, stdout),
    }
}
