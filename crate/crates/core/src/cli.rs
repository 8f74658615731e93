//! Command-line entry point.
//!
//! Every subcommand accepts `--config <file>` plus flags that override
//! individual config keys; a flag always wins over the file. Exit status is
//! 0 on success, 2 for configuration or usage errors and 1 for runtime
//! failures.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use crate::config::{FileConfig, RunConfig};
use crate::error::{Error, Result};
use crate::game::{play, play_proposal, SelfTau, TieBreak};
use crate::identity::ModeKind;
use crate::output::{
    curve_table, game_grid_table, matrix_table, outcome_table, tau_table, write_output, Format, Table,
};
use crate::payoff::LensFamily;
use crate::sweep::{acceptance_matrix, game_grid, tau_curves, utility_curves, GridParam, PlayerParam, Role};
use crate::utility::Split;

/// Caps sweep parallelism; 0 or unset means one thread per core.
pub const THREADS_ENV: &str = "TRANSCEND_UG_THREADS";

#[derive(Debug, Parser)]
#[command(name = "transcend-ug", version, about = "Ultimatum Game simulator for transcendent agents with fairness thresholds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Play one game and print the outcome
    Play(PlayArgs),
    /// Utility of one player over all splits, one curve per parameter value
    UtilityCurves(CommonArgs),
    /// Which offers the subject accepts at each distance
    AcceptanceMatrix(CommonArgs),
    /// Association-based threshold 1 - gamma^d over distance
    TauCurves(CommonArgs),
    /// Settled game state over a grid of two player parameters
    GameGrid(CommonArgs),
}

#[derive(Debug, Args)]
pub struct PlayArgs {
    #[command(flatten)]
    pub common: CommonArgs,

    /// Force the recipient's share instead of the allocator's best split;
    /// snapped to the split grid
    #[arg(long)]
    pub offer: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Config file (sections game, agent.allocator, agent.recipient, payoff, sweep, output)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output path, `-` for stdout [config: output.path]
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// [config: output.format]
    #[arg(long)]
    pub format: Option<Format>,
    /// Print the fully resolved config and exit
    #[arg(long)]
    pub print_config: bool,

    #[arg(long, help_heading = "Game")]
    pub grid_step: Option<f64>,
    #[arg(long, help_heading = "Game")]
    pub accept_threshold: Option<f64>,
    #[arg(long, help_heading = "Game")]
    pub tie_break: Option<TieBreak>,
    #[arg(long, help_heading = "Game")]
    pub tolerance: Option<f64>,
    #[arg(long, help_heading = "Game")]
    pub association_self_tau: Option<SelfTau>,

    #[arg(long, help_heading = "Allocator")]
    pub allocator_gamma: Option<f64>,
    #[arg(long, help_heading = "Allocator")]
    pub allocator_d: Option<f64>,
    #[arg(long, help_heading = "Allocator")]
    pub allocator_mode: Option<ModeKind>,
    #[arg(long, help_heading = "Allocator")]
    pub allocator_tau: Option<f64>,

    #[arg(long, help_heading = "Recipient")]
    pub recipient_gamma: Option<f64>,
    #[arg(long, help_heading = "Recipient")]
    pub recipient_d: Option<f64>,
    #[arg(long, help_heading = "Recipient")]
    pub recipient_mode: Option<ModeKind>,
    #[arg(long, help_heading = "Recipient")]
    pub recipient_tau: Option<f64>,

    #[arg(long, help_heading = "Payoff lens")]
    pub family: Option<LensFamily>,
    #[arg(long, help_heading = "Payoff lens")]
    pub k: Option<f64>,
    #[arg(long, help_heading = "Payoff lens")]
    pub lambda: Option<f64>,

    /// Player whose utility/acceptance a curve or matrix sweep reports
    #[arg(long, help_heading = "Sweep")]
    pub subject: Option<Role>,
    #[arg(long, help_heading = "Sweep")]
    pub curve_param: Option<PlayerParam>,
    #[arg(long, help_heading = "Sweep")]
    pub curve_min: Option<f64>,
    #[arg(long, help_heading = "Sweep")]
    pub curve_max: Option<f64>,
    #[arg(long, help_heading = "Sweep")]
    pub curve_step: Option<f64>,
    #[arg(long, help_heading = "Sweep")]
    pub curve_split_step: Option<f64>,
    #[arg(long, help_heading = "Sweep")]
    pub d_min: Option<f64>,
    #[arg(long, help_heading = "Sweep")]
    pub d_max: Option<f64>,
    #[arg(long, help_heading = "Sweep")]
    pub d_step: Option<f64>,
    #[arg(long, help_heading = "Sweep")]
    pub matrix_split_step: Option<f64>,
    /// Gamma values for tau-curves (comma separated) [config: sweep.gammas]
    #[arg(long = "gamma", value_delimiter = ',', help_heading = "Sweep")]
    pub gammas: Option<Vec<f64>>,
    #[arg(long, help_heading = "Sweep")]
    pub grid_axis1: Option<GridParam>,
    #[arg(long, help_heading = "Sweep")]
    pub grid_axis1_min: Option<f64>,
    #[arg(long, help_heading = "Sweep")]
    pub grid_axis1_max: Option<f64>,
    #[arg(long, help_heading = "Sweep")]
    pub grid_axis1_step: Option<f64>,
    #[arg(long, help_heading = "Sweep")]
    pub grid_axis2: Option<GridParam>,
    #[arg(long, help_heading = "Sweep")]
    pub grid_axis2_min: Option<f64>,
    #[arg(long, help_heading = "Sweep")]
    pub grid_axis2_max: Option<f64>,
    #[arg(long, help_heading = "Sweep")]
    pub grid_axis2_step: Option<f64>,
}

fn set<T>(slot: &mut Option<T>, flag: &Option<T>)
where
    T: Clone,
{
    if let Some(v) = flag {
        *slot = Some(v.clone());
    }
}

impl CommonArgs {
    /// Overlays every flag that was given onto `file`.
    pub fn apply(&self, file: &mut FileConfig) {
        let g = file.game_mut();
        set(&mut g.grid_step, &self.grid_step);
        set(&mut g.accept_threshold, &self.accept_threshold);
        set(&mut g.tie_break, &self.tie_break);
        set(&mut g.tolerance, &self.tolerance);
        set(&mut g.association_self_tau, &self.association_self_tau);

        let a = file.agent_mut(Role::Allocator);
        set(&mut a.gamma, &self.allocator_gamma);
        set(&mut a.distance, &self.allocator_d);
        set(&mut a.fairness_mode, &self.allocator_mode);
        set(&mut a.tau, &self.allocator_tau);

        let r = file.agent_mut(Role::Recipient);
        set(&mut r.gamma, &self.recipient_gamma);
        set(&mut r.distance, &self.recipient_d);
        set(&mut r.fairness_mode, &self.recipient_mode);
        set(&mut r.tau, &self.recipient_tau);

        let p = file.payoff_mut();
        set(&mut p.family, &self.family);
        set(&mut p.k, &self.k);
        set(&mut p.lambda, &self.lambda);

        let s = file.sweep_mut();
        set(&mut s.subject, &self.subject);
        set(&mut s.curve_param, &self.curve_param);
        set(&mut s.curve_min, &self.curve_min);
        set(&mut s.curve_max, &self.curve_max);
        set(&mut s.curve_step, &self.curve_step);
        set(&mut s.curve_split_step, &self.curve_split_step);
        set(&mut s.d_min, &self.d_min);
        set(&mut s.d_max, &self.d_max);
        set(&mut s.d_step, &self.d_step);
        set(&mut s.matrix_split_step, &self.matrix_split_step);
        set(&mut s.gammas, &self.gammas);
        set(&mut s.grid_axis1, &self.grid_axis1);
        set(&mut s.grid_axis1_min, &self.grid_axis1_min);
        set(&mut s.grid_axis1_max, &self.grid_axis1_max);
        set(&mut s.grid_axis1_step, &self.grid_axis1_step);
        set(&mut s.grid_axis2, &self.grid_axis2);
        set(&mut s.grid_axis2_min, &self.grid_axis2_min);
        set(&mut s.grid_axis2_max, &self.grid_axis2_max);
        set(&mut s.grid_axis2_step, &self.grid_axis2_step);

        let o = file.output_mut();
        set(&mut o.path, &self.output);
        set(&mut o.format, &self.format);
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        let mut file = match &self.config {
            Some(path) => FileConfig::read(path)?,
            None => FileConfig::default(),
        };
        self.apply(&mut file);
        RunConfig::resolve(&file)
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            Error::config(THREADS_ENV, format!("must be a non-negative integer (got `{v}`)"))
        })?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Io(std::io::Error::other(e)))
}

fn render_play(cfg: &RunConfig, offer: Option<f64>) -> Result<Table> {
    let allocator = cfg.allocator_spec();
    let recipient = cfg.recipient_spec();
    let outcome = match offer {
        None => play(&allocator, &recipient, &cfg.game),
        Some(x) => {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::config("--offer", format!("must lie in [0, 1] (got {x})")));
            }
            let snapped = cfg.game.snap(x);
            if (snapped - x).abs() > cfg.game.tolerance() {
                warn!("offer {x} is off the {} grid; using {snapped}", cfg.game.grid_step());
            }
            let proposal = Split::new(cfg.game.snap(1.0 - snapped))?;
            play_proposal(&allocator, &recipient, &cfg.game, proposal)
        }
    };
    Ok(outcome_table(&outcome))
}

fn execute(command: &Command) -> Result<()> {
    let (common, offer) = match command {
        Command::Play(p) => (&p.common, p.offer),
        Command::UtilityCurves(c)
        | Command::AcceptanceMatrix(c)
        | Command::TauCurves(c)
        | Command::GameGrid(c) => (c, None),
    };
    let cfg = common.resolve()?;
    if common.print_config {
        let text = cfg.to_file().to_toml();
        write_output(std::path::Path::new("-"), text.as_bytes())?;
        return Ok(());
    }
    let pool = thread_pool()?;
    let table = pool.install(|| -> Result<Table> {
        Ok(match command {
            Command::Play(_) => render_play(&cfg, offer)?,
            Command::UtilityCurves(_) => curve_table(&utility_curves(&cfg.curve_sweep())?),
            Command::AcceptanceMatrix(_) => matrix_table(&acceptance_matrix(&cfg.matrix_sweep())?),
            Command::TauCurves(_) => tau_table(&tau_curves(&cfg.tau_sweep())?),
            Command::GameGrid(_) => game_grid_table(&game_grid(&cfg.game_grid_sweep())?),
        })
    })?;
    let natural = match command {
        Command::Play(_) => Format::Json,
        _ => Format::Csv,
    };
    let bytes = table.render(cfg.output.format.or(natural))?;
    write_output(&cfg.output.path, &bytes)?;
    if cfg.output.path.as_os_str() != "-" {
        info!("wrote {} rows to {}", table.rows.len(), cfg.output.path.display());
    }
    Ok(())
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .try_init();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
