//! `route`: command-line front end for the photon router simulator.
//!
//! Every evaluating subcommand writes CSV with a fixed header (see
//! [`run::CSV_HEADER`]) to `--out` or stdout. Exit codes: 0 success, 1 failed
//! verification or I/O, 2 invalid arguments or parameters, 3 numerical
//! resolution failure.

mod config;
mod error;
mod run;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use photon_router::oracle::{self, PulseTrain, TimeGrid};
use photon_router::suites::{Suite, DEFAULT_SEED};
use photon_router::RouterParams;

use config::{Axis, Inputs, Method, Settings, SweepCase, SweepVar};
use error::CliError;
use run::Case;

#[derive(Debug, Parser)]
#[command(name = "route", version, about = "Four-port interference photon router simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Coherent input on port 1 only.
    Single(ScenarioArgs),
    /// Equal inputs on ports 1 and 2, relative phase --phi.
    Two(ScenarioArgs),
    /// Equal inputs on ports 1, 3 and 4, phases --theta and --theta-prime.
    Three(ScenarioArgs),
    /// Gaussian wave packets with cavity loss.
    Packet(PacketArgs),
    /// Sweep one or two parameters.
    Sweep(SweepArgs),
    /// Run the invariant suites and print a summary.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    #[arg(long, allow_hyphen_values = true)]
    gamma1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma2: Option<f64>,
    #[arg(long = "gamma-c", allow_hyphen_values = true)]
    gamma_c: Option<f64>,
    /// Detuning omega_c - omega.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long = "theta-prime", allow_hyphen_values = true)]
    theta_prime: Option<f64>,
    /// Mean photon number |alpha|^2 per input port.
    #[arg(long = "mean-n", allow_hyphen_values = true)]
    mean_n: Option<f64>,
    /// Packet center detuning omega_c - omega0 (defaults to --delta).
    #[arg(long = "omega0-detuning", allow_hyphen_values = true)]
    omega0_detuning: Option<f64>,
    /// Packet half-bandwidth Omega.
    #[arg(long, allow_hyphen_values = true)]
    bandwidth: Option<f64>,
    /// Frequency quadrature nodes (odd, >= 2001).
    #[arg(long)]
    points: Option<usize>,
    /// Output CSV path (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scenario file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ScenarioArgs {
    fn settings(&self) -> Result<Settings, CliError> {
        let mut settings = match &self.config {
            Some(path) => config::load_config(path)?,
            None => Settings::default(),
        };
        settings.overlay(&Settings {
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            gamma_c: self.gamma_c,
            delta: self.delta,
            phi: self.phi,
            theta: self.theta,
            theta_prime: self.theta_prime,
            mean_n: self.mean_n,
            omega0_detuning: self.omega0_detuning,
            bandwidth: self.bandwidth,
            points: self.points,
            ..Default::default()
        });
        Ok(settings)
    }
}

#[derive(Debug, Args)]
struct PacketArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Which ports carry packets.
    #[arg(long, value_enum)]
    inputs: Option<Inputs>,
    /// Frequency-domain quadrature or time-domain integration.
    #[arg(long, value_enum)]
    method: Option<Method>,
    /// Also integrate in time and dump the cavity trajectory as CSV.
    #[arg(long)]
    trajectory: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[arg(long, value_enum)]
    case: Option<SweepCase>,
    /// Packet inputs when --case packet.
    #[arg(long, value_enum)]
    inputs: Option<Inputs>,
    #[arg(long, value_enum)]
    method: Option<Method>,
    #[arg(long, value_enum)]
    var: Option<SweepVar>,
    #[arg(long, allow_hyphen_values = true)]
    start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    stop: Option<f64>,
    #[arg(long)]
    count: Option<usize>,
    /// Second axis for surfaces, emitted in long format.
    #[arg(long, value_enum)]
    var2: Option<SweepVar>,
    #[arg(long, allow_hyphen_values = true)]
    start2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    stop2: Option<f64>,
    #[arg(long)]
    count2: Option<usize>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// all, core, scattering, wavepacket or oracle.
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the summary here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn open_output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(args: &ScenarioArgs, rows: &[run::Row]) -> Result<(), CliError> {
    run::write_rows(open_output(args.out.as_ref())?, rows)
}

fn run_single_case(args: &ScenarioArgs, inputs: Inputs) -> Result<(), CliError> {
    let scenario = args.settings()?.scenario();
    let row = run::evaluate(Case::Mono(inputs), &scenario)?;
    emit(args, &[row])
}

fn run_packet(args: &PacketArgs) -> Result<(), CliError> {
    let mut settings = args.scenario.settings()?;
    settings.overlay(&Settings {
        inputs: args.inputs,
        method: args.method,
        ..Default::default()
    });
    let scenario = settings.scenario();
    let inputs = settings.inputs.unwrap_or(Inputs::Two);
    let method = settings.method.unwrap_or(Method::Freq);
    let row = run::evaluate(Case::Packet(inputs, method), &scenario)?;

    if let Some(path) = &args.trajectory {
        let params = RouterParams::new(scenario.gamma1, scenario.gamma2, scenario.gamma_c, 0.0);
        let pulses = PulseTrain::new(run::scenario_packets(&scenario, inputs), 0.0);
        let grid = TimeGrid::for_packets(&params, &pulses.packets, 0.0)?;
        let traj = oracle::integrate_cavity(&params, &pulses, &grid)?;
        run::write_trajectory(BufWriter::new(File::create(path)?), &traj)?;
    }
    emit(&args.scenario, &[row])
}

fn axis(
    var: Option<SweepVar>,
    start: Option<f64>,
    stop: Option<f64>,
    count: Option<usize>,
    suffix: &str,
) -> Result<Axis, CliError> {
    let missing = |name: &str| CliError::usage(format!("sweep needs --{name}{suffix}"));
    Ok(Axis {
        var: var.ok_or_else(|| missing("var"))?,
        start: start.ok_or_else(|| missing("start"))?,
        stop: stop.ok_or_else(|| missing("stop"))?,
        count: count.ok_or_else(|| missing("count"))?,
    })
}

fn run_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let mut s = args.scenario.settings()?;
    s.overlay(&Settings {
        case: args.case,
        inputs: args.inputs,
        method: args.method,
        var: args.var,
        start: args.start,
        stop: args.stop,
        count: args.count,
        var2: args.var2,
        start2: args.start2,
        stop2: args.stop2,
        count2: args.count2,
        ..Default::default()
    });
    let case = match s.case.unwrap_or(SweepCase::Two) {
        SweepCase::Single => Case::Mono(Inputs::Single),
        SweepCase::Two => Case::Mono(Inputs::Two),
        SweepCase::Three => Case::Mono(Inputs::Three),
        SweepCase::Packet => Case::Packet(s.inputs.unwrap_or(Inputs::Two), s.method.unwrap_or(Method::Freq)),
    };
    let first = axis(s.var, s.start, s.stop, s.count, "")?;
    let second = if s.var2.is_some() || s.start2.is_some() || s.stop2.is_some() || s.count2.is_some() {
        Some(axis(s.var2, s.start2, s.stop2, s.count2, "2")?)
    } else {
        None
    };
    let rows = run::sweep(case, &s.scenario(), &first, second.as_ref())?;
    emit(&args.scenario, &rows)
}

fn run_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let suites: Vec<Suite> = if args.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::from_name(&args.suite).ok_or_else(|| {
            CliError::usage(format!(
                "unknown suite '{}' (expected all, core, scattering, wavepacket or oracle)",
                args.suite
            ))
        })?]
    };
    let reports: Vec<_> = suites.iter().map(|s| s.run(args.seed)).collect();

    let mut out = open_output(args.out.as_ref())?;
    for report in &reports {
        for check in &report.checks {
            writeln!(out, "[{}] {check}", report.suite)?;
        }
    }
    writeln!(out)?;
    writeln!(
        out,
        "{:<12} {:>7} {:>7} {:>14}  status",
        "suite", "checks", "failed", "max deviation"
    )?;
    let mut failed = 0;
    for report in &reports {
        let n_failed = report.checks.iter().filter(|c| !c.passed()).count();
        failed += n_failed;
        writeln!(
            out,
            "{:<12} {:>7} {:>7} {:>14.3e}  {}",
            report.suite.name(),
            report.checks.len(),
            n_failed,
            report.max_deviation(),
            if n_failed == 0 { "PASS" } else { "FAIL" }
        )?;
    }
    out.flush()?;
    if failed > 0 {
        return Err(CliError::VerifyFailed(failed));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Single(a) => run_single_case(a, Inputs::Single),
        Command::Two(a) => run_single_case(a, Inputs::Two),
        Command::Three(a) => run_single_case(a, Inputs::Three),
        Command::Packet(a) => run_packet(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("route: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
