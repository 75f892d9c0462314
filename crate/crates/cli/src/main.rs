//! `padestep` command-line driver.

mod commands;
mod config;
mod model;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};

use model::ModelInputs;

#[derive(Parser, Debug)]
#[command(name = "padestep", version, about = "High-order Padé time stepping for linear structural dynamics")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Effective options as `key=value` pairs, defaults included.
    #[arg(skip)]
    pub echo: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the Padé polynomials, roots, force polynomials and parity numerator.
    Scheme(SchemeArgs),
    /// Integrate one trajectory and write `step,t,dof_id,u,v`.
    Run(RunArgs),
    /// Step-size sweep with slope fit, written as `order,dt,epsilon_L2,slope`.
    Converge(ConvergeArgs),
    /// Amplitude error and period elongation of SDOF case 1 over many periods.
    Peae(PeaeArgs),
    /// Wall-clock cost per step and of the setup, per integrator.
    Time(TimeArgs),
}

#[derive(Args, Debug, Clone)]
pub struct SchemeArgs {
    /// Padé index M (accuracy order 2M).
    pub m: usize,
    /// Force polynomial degree; defaults to M.
    #[arg(long)]
    pub pf: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// sdof:<case>, rod:<nx>x<ny>, lamb:<ne>, random:<n> or files.
    #[arg(long, default_value = "sdof:1")]
    pub model: String,
    /// Seed for the random model.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Rayleigh damping for the random model.
    #[arg(long)]
    pub damped: bool,
    /// MatrixMarket mass matrix (files model).
    #[arg(long)]
    pub mass: Option<PathBuf>,
    /// MatrixMarket stiffness matrix (files model).
    #[arg(long)]
    pub stiffness: Option<PathBuf>,
    /// MatrixMarket damping matrix (files model).
    #[arg(long)]
    pub damping: Option<PathBuf>,
    /// Whitespace-separated load distribution (files model).
    #[arg(long)]
    pub load: Option<PathBuf>,
    /// Load signal: f1, f2, sine_burst or ricker.
    #[arg(long)]
    pub signal: Option<String>,
}

impl ModelArgs {
    pub fn inputs(&self) -> ModelInputs {
        ModelInputs {
            seed: self.seed,
            damped: self.damped,
            mass: self.mass.clone(),
            stiffness: self.stiffness.clone(),
            damping: self.damping.clone(),
            load: self.load.clone(),
            signal: self.signal.clone(),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// newmark, exact or pade<M>.
    #[arg(long, default_value = "pade2")]
    pub method: String,
    /// Padé index; shorthand for --method pade<M>.
    #[arg(long)]
    pub m: Option<usize>,
    /// Time step in seconds.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Steps per natural period (SDOF models).
    #[arg(long)]
    pub steps_per_period: Option<usize>,
    /// Simulated time; the step count is rounded up.
    #[arg(long)]
    pub t_sim: Option<f64>,
    /// Force polynomial degree override.
    #[arg(long)]
    pub pf: Option<usize>,
    /// Recorded dofs (comma separated); defaults to the model's observation dof.
    #[arg(long, value_delimiter = ',')]
    pub dofs: Vec<usize>,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Integrators to sweep.
    #[arg(long, value_delimiter = ',', default_value = "pade1,pade2,pade3,pade4")]
    pub methods: Vec<String>,
    /// Geometric ladder `start,factor,count`.
    #[arg(long, value_delimiter = ',', num_args = 1..=3)]
    pub ladder: Vec<f64>,
    /// Steps per period ladder (SDOF models).
    #[arg(long, value_delimiter = ',')]
    pub steps_per_period: Vec<usize>,
    #[arg(long)]
    pub t_sim: Option<f64>,
    /// Observed dof; defaults to the model's observation dof.
    #[arg(long)]
    pub dof: Option<usize>,
    /// Reference step is the smallest ladder step divided by this factor.
    #[arg(long, default_value_t = 1)]
    pub ref_refine: usize,
    /// Points with a larger error (percent) are left out of the slope fit.
    #[arg(long, default_value_t = 10.0)]
    pub fit_max: f64,
    /// `root` (default) or `squared` error ratio.
    #[arg(long, default_value = "root")]
    pub form: String,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct PeaeArgs {
    #[arg(long, value_delimiter = ',', default_value = "pade1,pade2,pade3,pade4")]
    pub methods: Vec<String>,
    /// Step size over natural period.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.5,0.25,0.1,0.05,0.025,0.01,0.005,0.0025,0.001"
    )]
    pub ratios: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub periods: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct TimeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_delimiter = ',', default_value = "newmark,pade1,pade2,pade3,pade4")]
    pub methods: Vec<String>,
    #[arg(long, default_value_t = 1.5625e-4)]
    pub dt: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn echo(m: &ArgMatches) -> String {
    let Some((name, sub)) = m.subcommand() else {
        return String::new();
    };
    let mut parts = vec![format!("command={name}")];
    // Argument groups from flattened structs carry CamelCase ids.
    for id in sub.ids().filter(|id| !id.as_str().starts_with(|c: char| c.is_ascii_uppercase())) {
        if let Ok(Some(vals)) = sub.try_get_raw(id.as_str()) {
            let v: Vec<String> = vals.map(|v| v.to_string_lossy().into_owned()).collect();
            parts.push(format!("{id}={}", v.join(",")));
        }
    }
    parts.join(" ")
}

fn main() -> ExitCode {
    let args = match config::expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::command()
        .try_get_matches_from(args)
        .and_then(|m| Cli::from_arg_matches(&m).map(|c| (c, m)))
    {
        Ok((mut c, m)) => {
            c.echo = echo(&m);
            c
        }
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        // A closed downstream pipe (`| head`) is not a failure.
        Err(padestep::Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}
