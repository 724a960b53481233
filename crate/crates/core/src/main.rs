//! Command-line front end: simulate a policy, optimize one, or sweep the
//! value of statistical life.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lockopt::cli::{
    format_summary, load_scenario, parse_c1_grid, resolve_policy, write_policy_csv,
    write_sweep_csv, write_trajectory_csv, CliError, PolicySpec, EXIT_NON_CONVERGENCE,
};
use lockopt::harness::{default_c1_grid, run_sweep, SweepSpec};
use lockopt::integrator::simulate;
use lockopt::model::ScenarioParams;
use lockopt::objective::evaluate;
use lockopt::optimizer::{optimize, OptimizerOptions};

#[derive(Parser)]
#[command(
    name = "lockopt",
    about = "Simulate a coupled epidemic-economy model and search for optimal lockdown policies",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario TOML file (may name a preset and override fields).
    #[arg(long)]
    scenario: PathBuf,
    /// Override the integration/control step (days).
    #[arg(long)]
    dt: Option<f64>,
    /// Override the value of statistical life ($/death).
    #[arg(long)]
    c1: Option<f64>,
    /// Override the cost per infection ($/infection).
    #[arg(long)]
    c2: Option<f64>,
}

impl ScenarioArgs {
    fn load(&self) -> Result<ScenarioParams, CliError> {
        let mut params = load_scenario(&self.scenario)?;
        if let Some(dt) = self.dt {
            params.dt = dt;
        }
        if let Some(c1) = self.c1 {
            params.cost.c1 = c1;
        }
        if let Some(c2) = self.c2 {
            params.cost.c2 = c2;
        }
        let violations = lockopt::model::validate(&params);
        if !violations.is_empty() {
            return Err(CliError::Validation(violations));
        }
        Ok(params)
    }
}

#[derive(Args)]
struct OptimizerArgs {
    /// Iteration budget per start.
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    /// Relative objective-improvement tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Finite-difference step for gradients.
    #[arg(long, default_value_t = 1e-4)]
    fd_step: f64,
    /// Comma-separated constant starting policies (default 0,l_max/2,l_max).
    #[arg(long)]
    starts: Option<String>,
}

impl OptimizerArgs {
    fn options(&self, l_max: f64) -> Result<OptimizerOptions, CliError> {
        let mut opts = OptimizerOptions::for_l_max(l_max);
        opts.max_iterations = self.max_iters;
        opts.tol_rel = self.tol;
        opts.fd_step = self.fd_step;
        if let Some(starts) = &self.starts {
            opts.starts = starts
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Parse(format!("bad start {s:?}")))
                })
                .collect::<Result<_, _>>()?;
        }
        Ok(opts)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the scenario under a fixed policy and write the trajectory.
    Simulate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// `constant:<level>` or a CSV file of per-step values.
        #[arg(long)]
        policy: String,
        /// Trajectory CSV output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Search for the policy minimizing the terminal cost.
    Optimize {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        /// Optimal policy CSV output path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Optimize across a grid of statistical-life values.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        optimizer: OptimizerArgs,
        /// Grid as `lo:hi:n` (log-spaced); default spans a decade either
        /// side of the scenario's c1.
        #[arg(long)]
        c1_grid: Option<String>,
        /// Sweep CSV output path; per-point policies go next to it.
        #[arg(long)]
        out: PathBuf,
    },
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
}

fn flush(mut out: BufWriter<File>, path: &Path) -> Result<(), CliError> {
    out.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn cmd_simulate(scenario: &ScenarioArgs, policy: &str, out: &Path) -> Result<i32, CliError> {
    let params = scenario.load()?;
    let spec: PolicySpec = policy.parse()?;
    let policy = resolve_policy(&spec, &params)?;
    let trajectory = simulate(&policy, &params)?;

    let mut writer = create(out)?;
    write_trajectory_csv(&mut writer, &trajectory).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    flush(writer, out)?;

    let breakdown = evaluate(&trajectory, &params.cost)?;
    println!(
        "{}",
        format_summary(trajectory.final_state(), &breakdown, trajectory.final_time())
    );
    println!("mean lockdown = {}", trajectory.mean_lockdown());
    println!("trajectory written to {}", out.display());
    Ok(0)
}

fn cmd_optimize(
    scenario: &ScenarioArgs,
    optimizer: &OptimizerArgs,
    out: &Path,
) -> Result<i32, CliError> {
    let params = scenario.load()?;
    let opts = optimizer.options(params.epidemic.l_max)?;
    let result = optimize(&params, &opts)?;

    let mut writer = create(out)?;
    write_policy_csv(&mut writer, &result.policy, &params).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    flush(writer, out)?;

    println!("cost breakdown:");
    println!("  death_cost = {}", result.cost.death_cost);
    println!("  infection_cost = {}", result.cost.infection_cost);
    println!("  economy_value = {}", result.cost.economy_value);
    println!("  total = {}", result.cost.total);
    println!("start used = {}", result.start_used);
    println!(
        "iterations per start = {}",
        result
            .iterations
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    );
    println!("projected gradient norm = {}", result.gradient_norm);
    println!("converged = {}", result.converged);
    println!("policy written to {}", out.display());

    Ok(if result.converged {
        0
    } else {
        EXIT_NON_CONVERGENCE
    })
}

fn cmd_sweep(
    scenario: &ScenarioArgs,
    optimizer: &OptimizerArgs,
    c1_grid: Option<&str>,
    out: &Path,
) -> Result<i32, CliError> {
    let params = scenario.load()?;
    let grid = match c1_grid {
        Some(spec) => parse_c1_grid(spec)?,
        None => {
            if params.cost.c1 <= 0.0 {
                return Err(CliError::Parse(
                    "scenario c1 is not positive; pass an explicit --c1-grid".into(),
                ));
            }
            default_c1_grid(params.cost.c1)
        }
    };

    let spec = SweepSpec {
        scenario: params.clone(),
        c1_values: grid,
        optimizer: optimizer.options(params.epidemic.l_max)?,
    };
    let items = run_sweep(&spec);

    let mut writer = create(out)?;
    write_sweep_csv(&mut writer, &items).map_err(|source| CliError::Io {
        path: out.to_path_buf(),
        source,
    })?;
    flush(writer, out)?;

    // One policy profile per grid point, indexed in row order.
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sweep".to_string());
    let directory = out.parent().unwrap_or_else(|| Path::new("."));
    let mut all_converged = true;
    for (index, item) in items.iter().enumerate() {
        match &item.outcome {
            Ok(record) => {
                all_converged &= record.optimal.converged;
                let path = directory.join(format!("{stem}_policy_{index:02}.csv"));
                let mut writer = create(&path)?;
                write_policy_csv(&mut writer, &record.optimal.policy, &spec.scenario).map_err(
                    |source| CliError::Io {
                        path: path.clone(),
                        source,
                    },
                )?;
                flush(writer, &path)?;
            }
            Err(error) => {
                all_converged = false;
                eprintln!("warning: grid point c1 = {} failed: {error}", item.c1);
            }
        }
    }
    println!("sweep written to {}", out.display());
    Ok(if all_converged { 0 } else { EXIT_NON_CONVERGENCE })
}

fn run() -> Result<i32, CliError> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Simulate {
            scenario,
            policy,
            out,
        } => cmd_simulate(scenario, policy, out),
        Command::Optimize {
            scenario,
            optimizer,
            out,
        } => cmd_optimize(scenario, optimizer, out),
        Command::Sweep {
            scenario,
            optimizer,
            c1_grid,
            out,
        } => cmd_sweep(scenario, optimizer, c1_grid.as_deref(), out),
    }
}

fn main() -> ExitCode {
    // Die quietly when stdout is a closed pipe (e.g. `lockopt ... | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run() {
        Ok(code) => ExitCode::from(u8::try_from(code).unwrap_or(1)),
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(u8::try_from(error.exit_code()).unwrap_or(1))
        }
    }
}
