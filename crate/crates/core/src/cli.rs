//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for configuration errors (bad flags, bad
//! config file, unknown test level), 3 for data errors (unreadable corpus,
//! untrainable data, I/O failures).

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{check_playable, format_path_dump, JumpModel, Objective};
use crate::alphabet::TileAlphabet;
use crate::approach::{Approach, TrainedApproach};
use crate::assembler::{GeneratedLevel, LayoutFile, DEFAULT_RESAMPLE_CAP};
use crate::bundle;
use crate::corpus::{load_corpus, Corpus, LoadOptions};
use crate::grid::parse_level;
use crate::metrics::{comparison_table, generate_batch, report_for_batch, EvalConfig, MetricsError, MetricsReport};
use crate::seeds::level_seed;
use crate::sequence::parse_sequence;

pub const OUTPUT_DIR_ENV: &str = "MMLEVEL_OUTPUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

fn data<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Data(e.to_string())
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |e| CliError::Data(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "mmlevel", version, about = "Markov-chain level generation for tile-based platformers")]
pub struct Cli {
    /// TOML file with default values for any run option.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for generation and evaluation (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one approach and write its model bundle.
    Train(RunArgs),
    /// Generate a batch of levels with layout sidecars.
    Generate(GenerateArgs),
    /// Withhold a test level, then train, generate and score approaches.
    Evaluate(RunArgs),
    /// Print a level file, optionally overlaying an agent path dump.
    Render(RenderArgs),
    /// Print a comparison table for saved metrics reports.
    Compare(CompareArgs),
}

/// Flags shared by the run commands. Unset flags fall back to the config
/// file, then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub corpus_dir: Option<PathBuf>,
    /// Level file withheld from training, e.g. `mm_1_1.txt`.
    #[arg(long)]
    pub test_level: Option<String>,
    /// ensemble, simplified or hierarchical. Repeat for several; `evaluate`
    /// defaults to all three.
    #[arg(long = "approach")]
    pub approaches: Vec<Approach>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub rooms_per_level: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub resample_cap: Option<u32>,
    #[arg(long)]
    pub max_rise: Option<u8>,
    #[arg(long)]
    pub max_horizontal: Option<u8>,
    /// Tile alphabet TOML (default: the corpus directory's, else built-in).
    #[arg(long)]
    pub alphabet: Option<PathBuf>,
    #[arg(long, env = OUTPUT_DIR_ENV)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Load a bundle written by `train` instead of training inline.
    #[arg(long)]
    pub model_dir: Option<PathBuf>,
    /// Force this room-type sequence (e.g. `HHVVH`) for every level.
    #[arg(long)]
    pub sequence: Option<String>,
    /// Also write the agent path of each playable level.
    #[arg(long)]
    pub path_dumps: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    pub level: PathBuf,
    /// Path dump with one `col,row` per line.
    #[arg(long)]
    pub path: Option<PathBuf>,
    #[arg(long, default_value_t = 'o')]
    pub overlay: char,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Report files written by `evaluate`.
    #[arg(required = true)]
    pub reports: Vec<PathBuf>,
}

/// Values readable from a `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub corpus_dir: Option<PathBuf>,
    pub test_level: Option<String>,
    pub approach: Option<Vec<Approach>>,
    pub batch_size: Option<usize>,
    pub rooms_per_level: Option<usize>,
    pub seed: Option<u64>,
    pub resample_cap: Option<u32>,
    pub max_rise: Option<u8>,
    pub max_horizontal: Option<u8>,
    pub alphabet: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Fully resolved run options.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub corpus_dir: Option<PathBuf>,
    pub test_level: Option<String>,
    pub approaches: Vec<Approach>,
    pub batch_size: usize,
    pub rooms_per_level: usize,
    pub seed: u64,
    pub resample_cap: u32,
    pub jump: JumpModel,
    pub alphabet: Option<PathBuf>,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn resolve(args: &RunArgs, file: &ConfigFile) -> Result<Self, CliError> {
        let defaults = EvalConfig::default();
        let jump_default = JumpModel::default();
        let config = Self {
            corpus_dir: args.corpus_dir.clone().or_else(|| file.corpus_dir.clone()),
            test_level: args.test_level.clone().or_else(|| file.test_level.clone()),
            approaches: if args.approaches.is_empty() {
                file.approach.clone().unwrap_or_default()
            } else {
                args.approaches.clone()
            },
            batch_size: args.batch_size.or(file.batch_size).unwrap_or(defaults.batch_size),
            rooms_per_level: args.rooms_per_level.or(file.rooms_per_level).unwrap_or(defaults.rooms_per_level),
            seed: args.seed.or(file.seed).unwrap_or(defaults.seed),
            resample_cap: args.resample_cap.or(file.resample_cap).unwrap_or(DEFAULT_RESAMPLE_CAP),
            jump: JumpModel {
                max_rise: args.max_rise.or(file.max_rise).unwrap_or(jump_default.max_rise),
                max_horizontal: args
                    .max_horizontal
                    .or(file.max_horizontal)
                    .unwrap_or(jump_default.max_horizontal),
            },
            alphabet: args.alphabet.clone().or_else(|| file.alphabet.clone()),
            output_dir: args
                .output_dir
                .clone()
                .or_else(|| file.output_dir.clone())
                .unwrap_or_else(|| PathBuf::from("out")),
        };
        if config.batch_size == 0 {
            return Err(CliError::Config("batch size must be at least 1".into()));
        }
        if config.rooms_per_level == 0 {
            return Err(CliError::Config("rooms per level must be at least 1".into()));
        }
        if config.jump.max_rise == 0 || config.jump.max_horizontal == 0 {
            return Err(CliError::Config("jump budgets must be at least 1".into()));
        }
        Ok(config)
    }

    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            batch_size: self.batch_size,
            rooms_per_level: self.rooms_per_level,
            seed: self.seed,
            resample_cap: self.resample_cap,
            jump: self.jump,
        }
    }

    fn single_approach(&self) -> Result<Approach, CliError> {
        match self.approaches.as_slice() {
            [] => Ok(Approach::Ensemble),
            [one] => Ok(*one),
            _ => Err(CliError::Config("this command takes a single --approach".into())),
        }
    }

    fn load_options(&self) -> Result<LoadOptions, CliError> {
        let mut options = LoadOptions::default();
        if let Some(path) = &self.alphabet {
            options.alphabet = TileAlphabet::load(path).map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(options)
    }

    fn corpus(&self) -> Result<Corpus, CliError> {
        let dir = self
            .corpus_dir
            .as_ref()
            .ok_or_else(|| CliError::Config("no corpus directory given (--corpus-dir)".into()))?;
        let mut corpus = load_corpus(dir, &self.load_options()?).map_err(data)?;
        if let Some(path) = &self.alphabet {
            // An explicit alphabet beats the corpus directory's own.
            corpus.alphabet = TileAlphabet::load(path).map_err(|e| CliError::Config(e.to_string()))?;
        }
        Ok(corpus)
    }

    /// Split the corpus into training levels and the optional test level.
    fn split(&self, corpus: &Corpus) -> Result<(Corpus, Option<String>), CliError> {
        match &self.test_level {
            None => Ok((corpus.clone(), None)),
            Some(name) => {
                let (train, test) = corpus.withhold(name).ok_or_else(|| {
                    CliError::Config(format!("test level {name:?} is not in the corpus"))
                })?;
                Ok((train, Some(test.name)))
            }
        }
    }
}

fn train_model(approach: Approach, corpus: &Corpus) -> Result<TrainedApproach, CliError> {
    let levels: Vec<_> = corpus.annotated().collect();
    TrainedApproach::train(approach, &levels, corpus.chunk, &corpus.alphabet).map_err(data)
}

fn level_names(corpus: &Corpus) -> Vec<String> {
    corpus.levels.iter().map(|l| l.name.clone()).collect()
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(io_error(dir))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(io_error(path))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
    text.push('\n');
    text
}

pub fn cmd_train(config: &RunConfig) -> Result<String, CliError> {
    let approach = config.single_approach()?;
    let corpus = config.corpus()?;
    let (train, withheld) = config.split(&corpus)?;
    let model = train_model(approach, &train)?;
    let dir = config.output_dir.join("model");
    let manifest = bundle::save(&dir, &model, corpus.chunk, level_names(&train), withheld).map_err(data)?;
    let chains = bundle::chain_exports(&model).len();
    Ok(format!(
        "trained {approach} on {} levels ({chains} chains): {}\n",
        train.levels.len(),
        manifest.display()
    ))
}

pub fn cmd_generate(args: &GenerateArgs, config: &RunConfig) -> Result<String, CliError> {
    let (model, alphabet) = match &args.model_dir {
        Some(dir) => {
            let alphabet = match &config.alphabet {
                Some(path) => TileAlphabet::load(path).map_err(|e| CliError::Config(e.to_string()))?,
                None => TileAlphabet::mega_man(),
            };
            let (_, model) = bundle::load(dir, &alphabet).map_err(data)?;
            (model, alphabet)
        }
        None => {
            let corpus = config.corpus()?;
            let (train, _) = config.split(&corpus)?;
            (train_model(config.single_approach()?, &train)?, corpus.alphabet)
        }
    };
    let forced = match &args.sequence {
        None => None,
        Some(_) if model.chain().is_none() => {
            return Err(CliError::Config(format!(
                "--sequence needs a sequence-based approach, not {}",
                model.approach()
            )))
        }
        Some(text) => Some(parse_sequence(text).map_err(|e| CliError::Config(e.to_string()))?),
    };

    let eval = config.eval_config();
    let levels: Vec<GeneratedLevel> = match &forced {
        None => generate_batch(&model, &eval, &alphabet).map_err(data)?,
        Some(types) => (0..eval.batch_size as u64)
            .map(|k| {
                model.generate(
                    level_seed(eval.seed, k),
                    types.len(),
                    eval.resample_cap,
                    &alphabet,
                    Some(types),
                )
            })
            .collect::<Result<_, _>>()
            .map_err(data)?,
    };

    let dir = config.output_dir.join("levels");
    create_dir(&dir)?;
    let dumps: Vec<Option<String>> = if args.path_dumps {
        use rayon::prelude::*;
        levels
            .par_iter()
            .map(|level| {
                let objective = Objective::for_generated(level)?;
                let verdict = check_playable(&level.grid, &objective, eval.jump, &alphabet).ok()?;
                verdict.path.map(|p| format_path_dump(&p))
            })
            .collect()
    } else {
        vec![None; levels.len()]
    };
    for (k, (level, dump)) in levels.iter().zip(&dumps).enumerate() {
        let stem = format!("level_{k:03}");
        write_file(&dir.join(format!("{stem}.txt")), &level.grid.to_text())?;
        write_file(&dir.join(format!("{stem}.layout.json")), &to_json(&LayoutFile::from_level(level)))?;
        if let Some(dump) = dump {
            write_file(&dir.join(format!("{stem}.agent.path")), dump)?;
        }
    }
    Ok(format!("wrote {} levels to {}\n", levels.len(), dir.display()))
}

/// A saved report with provenance fields that are not part of the metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub tool_version: String,
    /// Seconds since the Unix epoch; `SOURCE_DATE_EPOCH` overrides the clock.
    pub created_at: u64,
    pub report: MetricsReport,
}

fn timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or_else(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        })
}

pub fn cmd_evaluate(config: &RunConfig) -> Result<String, CliError> {
    let corpus = config.corpus()?;
    let name = config
        .test_level
        .as_ref()
        .ok_or_else(|| CliError::Config("evaluate needs --test-level".into()))?;
    let (train, test) = corpus
        .withhold(name)
        .ok_or_else(|| CliError::Config(format!("test level {name:?} is not in the corpus")))?;
    let approaches = if config.approaches.is_empty() {
        Approach::ALL.to_vec()
    } else {
        config.approaches.clone()
    };
    let eval = config.eval_config();
    let dir = config.output_dir.join("reports");
    create_dir(&dir)?;

    let mut reports = Vec::new();
    for approach in approaches {
        let model = train_model(approach, &train)?;
        let batch = generate_batch(&model, &eval, &corpus.alphabet).map_err(data)?;
        let report = report_for_batch(&model, &batch, &test.name, &test.level, &eval, &corpus.alphabet)
            .map_err(|e| match e {
                MetricsError::MissingTestLevel(_) => CliError::Config(e.to_string()),
                other => data(other),
            })?;
        let file = ReportFile {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            created_at: timestamp(),
            report: report.clone(),
        };
        write_file(&dir.join(format!("{approach}.json")), &to_json(&file))?;
        reports.push(report);
    }
    if reports.len() == 1 {
        return Ok(to_json(&reports[0]));
    }
    let table = comparison_table(&reports);
    write_file(&dir.join("comparison.txt"), &table)?;
    Ok(table)
}

pub fn cmd_compare(args: &CompareArgs) -> Result<String, CliError> {
    let mut reports = Vec::new();
    for path in &args.reports {
        let text = std::fs::read_to_string(path).map_err(io_error(path))?;
        let file: ReportFile =
            serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
        reports.push(file.report);
    }
    Ok(comparison_table(&reports))
}

/// Overlay `mark` on every `col,row` of `dump` that lies inside `text`.
pub fn render(text: &str, dump: Option<&str>, mark: char) -> Result<String, CliError> {
    let mut grid = parse_level(text).map_err(data)?;
    if let Some(dump) = dump {
        let coords = crate::corpus::parse_sidecar(dump).map_err(data)?;
        let mark = u8::try_from(mark)
            .ok()
            .filter(u8::is_ascii)
            .ok_or_else(|| CliError::Config(format!("overlay {mark:?} is not ASCII")))?;
        for c in coords {
            if c.col < grid.width() && c.row < grid.height() {
                grid.set(c.col, c.row, mark);
            }
        }
    }
    Ok(grid.to_text())
}

pub fn cmd_render(args: &RenderArgs) -> Result<String, CliError> {
    let text = std::fs::read_to_string(&args.level).map_err(io_error(&args.level))?;
    let dump = match &args.path {
        Some(p) => Some(std::fs::read_to_string(p).map_err(io_error(p))?),
        None => None,
    };
    render(&text, dump.as_deref(), args.overlay)
}

/// Run a parsed command line and return what should go to stdout.
pub fn run(cli: Cli) -> Result<String, CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        // Fails only if a pool already exists, e.g. when called twice in-process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match &cli.command {
        Command::Train(args) => cmd_train(&RunConfig::resolve(args, &file)?),
        Command::Generate(args) => cmd_generate(args, &RunConfig::resolve(&args.run, &file)?),
        Command::Evaluate(args) => cmd_evaluate(&RunConfig::resolve(args, &file)?),
        Command::Render(args) => cmd_render(args),
        Command::Compare(args) => cmd_compare(args),
    }
}
