//! Command-line front end.
//!
//! Exit codes: 0 when the experiment passes, 1 when it runs but fails its
//! threshold, 2 on a configuration error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::corpus::Corpus;
use crate::experiments::{
    self, CollideConfig, GamesCheckConfig, InfluenceConfig, PrfChoice, PrfConfig, Schedule,
};
use crate::transcript::format_play;
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "pargames", version, about = "Parametrized-game experiments")]
pub struct Cli {
    /// Seed for every random choice of the run.
    #[arg(long, global = true, env = "PARGAMES_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Write the JSON report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    /// Record wall-clock times in the report.
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the game-model invariant suites at small n.
    GamesCheck {
        #[arg(long, default_value_t = 4)]
        max_n: u64,
        /// Random strategy triples for the composition laws.
        #[arg(long, default_value_t = 100)]
        triples: u64,
        /// Coin budget of strategies checked for normalization.
        #[arg(long, default_value_t = 12)]
        max_bits: u64,
    },
    /// Run the influential-variable algorithm on a decision-tree corpus.
    Influence(InfluenceArgs),
    /// Find collisions against the MAC fixture.
    Collide(CollideArgs),
    /// Forge tags from the collisions found against the MAC fixture.
    Forge(CollideArgs),
    /// Estimate distinguishing advantages against the lifted PRF.
    PrfDistinguish(PrfArgs),
}

#[derive(Debug, Args)]
pub struct InfluenceArgs {
    /// Corpus file; a corpus is generated from the seed when absent.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Save the corpus used.
    #[arg(long)]
    pub write_corpus: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub instances: u64,
    #[arg(long = "N", default_value_t = 32)]
    pub big_n: usize,
    #[arg(long, default_value_t = 4)]
    pub max_outputs: usize,
    #[arg(long, default_value_t = 3)]
    pub max_depth: usize,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value = "adaptive")]
    pub schedule: Schedule,
}

#[derive(Debug, Args)]
pub struct CollideArgs {
    #[arg(long, default_value_t = 16)]
    pub n: u64,
    #[arg(long = "N", default_value_t = 256)]
    pub big_n: usize,
    /// Query bound, a polynomial in `id`.
    #[arg(long, default_value = "8")]
    pub q: String,
    /// Tag length, a polynomial in `id`.
    #[arg(long, default_value = "8")]
    pub p: String,
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    /// Defaults to delta / p(n).
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub trials: u64,
    /// Samples for the sampled distance checks.
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    #[arg(long, default_value = "adaptive")]
    pub schedule: Schedule,
    /// Query the fixture by playing its strategy.
    #[arg(long)]
    pub via_game: bool,
    /// Smallest passing success rate.
    #[arg(long, default_value_t = 0.8)]
    pub threshold: f64,
    /// Also write the per-trial rows as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PrfArgs {
    #[arg(long, default_value_t = 16)]
    pub n: u64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// ignore, first-bit, consistency, first-query, random-parity or all.
    #[arg(long, default_value = "all")]
    pub adversary: String,
    #[arg(long, default_value = "builtin")]
    pub prf: PrfChoice,
    #[arg(long, default_value = "lg + 8")]
    pub w: String,
    #[arg(long, default_value = "8")]
    pub p: String,
    #[arg(long, default_value = "2")]
    pub sessions: String,
    /// Largest passing advantage estimate.
    #[arg(long, default_value_t = 0.1)]
    pub max_advantage: f64,
    /// Write one play of the candidate here.
    #[arg(long)]
    pub dump_transcript: Option<PathBuf>,
}

impl CollideArgs {
    fn config(&self, seed: u64) -> CollideConfig {
        CollideConfig {
            n: self.n,
            big_n: self.big_n,
            q: self.q.clone(),
            p: self.p.clone(),
            delta: self.delta,
            eps: self.eps,
            trials: self.trials,
            samples: self.samples,
            schedule: self.schedule,
            via_game: self.via_game,
            threshold: self.threshold,
            seed,
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Error> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn emit<T: Serialize>(report: &T, output: Option<&Path>) -> Result<(), Error> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    match output {
        Some(path) => write_file(path, &text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

/// Runs the parsed command; `Ok(passed)` when the experiment ran.
pub fn run(cli: &Cli) -> Result<bool, Error> {
    let out = cli.output.as_deref();
    match &cli.command {
        Command::GamesCheck {
            max_n,
            triples,
            max_bits,
        } => {
            let config = GamesCheckConfig {
                max_n: *max_n,
                triples: *triples,
                max_bits: *max_bits,
                seed: cli.seed,
            };
            let r = experiments::games_check(config, cli.timing)?;
            emit(&r, out)?;
            Ok(r.passed)
        }
        Command::Influence(a) => {
            let corpus = match &a.corpus {
                Some(path) => Corpus::read(path)?,
                None => {
                    Corpus::generate(a.instances, a.big_n, a.max_outputs, a.max_depth, cli.seed)
                }
            };
            if let Some(path) = &a.write_corpus {
                corpus.write(path)?;
            }
            let config = InfluenceConfig {
                corpus: a.corpus.as_ref().map(|p| p.display().to_string()),
                instances: corpus.instances.len() as u64,
                input_len: a.big_n,
                max_outputs: a.max_outputs,
                max_depth: a.max_depth,
                eps: a.eps,
                delta: a.delta,
                schedule: a.schedule,
                seed: cli.seed,
            };
            let r = experiments::influence(config, &corpus, cli.timing)?;
            emit(&r, out)?;
            Ok(r.passed)
        }
        Command::Collide(a) => {
            let r = experiments::collide(a.config(cli.seed), cli.timing)?;
            if let Some(path) = &a.csv {
                let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
                experiments::write_csv(&r, file)?;
            }
            emit(&r, out)?;
            Ok(r.passed)
        }
        Command::Forge(a) => {
            let r = experiments::forge_run(a.config(cli.seed), cli.timing)?;
            emit(&r, out)?;
            Ok(r.passed)
        }
        Command::PrfDistinguish(a) => {
            let config = PrfConfig {
                n: a.n,
                trials: a.trials,
                adversary: a.adversary.clone(),
                prf: a.prf,
                w: a.w.clone(),
                p: a.p.clone(),
                sessions: a.sessions.clone(),
                max_advantage: a.max_advantage,
                seed: cli.seed,
            };
            if let Some(path) = &a.dump_transcript {
                let play = experiments::candidate_play(&config)?;
                let game = experiments::candidate_game(&config)?;
                write_file(path, &format_play(&game, &play))?;
            }
            let r = experiments::prf_distinguish(config, cli.timing)?;
            emit(&r, out)?;
            Ok(r.passed)
        }
    }
}

/// Parses the process arguments, runs, and maps the outcome to an exit
/// code.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}
