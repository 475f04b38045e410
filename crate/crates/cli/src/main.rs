use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fockport::formulas;
use fockport::stations::{
    bell_state_statistics, simulated_channel_fidelity, teleport, BellLabel, Classification,
};
use fockport::{InputStateSpec, NoiseProfile};
use rayon::prelude::*;

mod report;

use report::{Format, Table};

#[derive(Parser)]
#[command(
    name = "fockport",
    version,
    about = "Lossy linear-optics teleportation simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the protocol and report every heralded outcome after correction.
    Teleport {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        noise: NoiseArgs,
        /// Only report this outcome.
        #[arg(long, value_enum)]
        outcome: Option<OutcomeArg>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Closed-form and simulated fidelity of the shared entangled channel.
    ChannelFidelity {
        #[command(flatten)]
        noise: NoiseArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Teleportation fidelity of the Psi+ outcome over a (gamma, lambda) grid.
    Fig3 {
        #[command(flatten)]
        noise: NoiseArgs,
        /// Points per axis: gamma in [0, pi], lambda in [0, 2pi).
        #[arg(long, default_value_t = 37, value_parser = clap::value_parser!(u32).range(2..))]
        grid: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Detection statistics for each Bell state fed into Alice's analyzer.
    BellTable {
        #[command(flatten)]
        noise: NoiseArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct InputArgs {
    /// Polar angle in units of pi (c1 = cos gamma).
    #[arg(long, conflicts_with = "gamma", value_parser = angle)]
    gamma_pi: Option<f64>,
    /// Polar angle in radians.
    #[arg(long, value_parser = angle)]
    gamma: Option<f64>,
    /// Relative phase in units of pi (c2 = sin gamma e^{i lambda}).
    #[arg(long, conflicts_with = "lambda", value_parser = angle)]
    lambda_pi: Option<f64>,
    /// Relative phase in radians.
    #[arg(long, value_parser = angle)]
    lambda: Option<f64>,
}

impl InputArgs {
    fn angles(&self) -> (f64, f64) {
        let pick = |pi_units: Option<f64>, radians: Option<f64>, default: f64| {
            pi_units.map(|x| x * PI).or(radians).unwrap_or(default)
        };
        (
            pick(self.gamma_pi, self.gamma, PI / 4.0),
            pick(self.lambda_pi, self.lambda, 0.0),
        )
    }
}

fn probability(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is not in (0, 1]"))
    }
}

fn angle(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err("angle must be finite".into())
    }
}

#[derive(Args)]
struct NoiseArgs {
    /// Beam-splitter survival probability.
    #[arg(long, default_value_t = 0.98, value_parser = probability)]
    kappa: f64,
    /// Cross-Kerr survival probability.
    #[arg(long, default_value_t = 0.98, value_parser = probability)]
    eta: f64,
    /// Detector efficiency.
    #[arg(long, default_value_t = 0.7, value_parser = probability)]
    epsilon: f64,
    /// Phase-plate survival probability.
    #[arg(long, default_value_t = 1.0, value_parser = probability)]
    varkappa: f64,
}

impl NoiseArgs {
    fn profile(&self) -> NoiseProfile {
        NoiseProfile {
            kappa: self.kappa,
            eta: self.eta,
            epsilon: self.epsilon,
            varkappa: self.varkappa,
        }
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutcomeArg {
    #[value(name = "psi+")]
    PsiPlus,
    #[value(name = "psi-")]
    PsiMinus,
    #[value(name = "phi+")]
    PhiPlus,
    #[value(name = "phi-")]
    PhiMinus,
}

impl From<OutcomeArg> for BellLabel {
    fn from(o: OutcomeArg) -> Self {
        match o {
            OutcomeArg::PsiPlus => BellLabel::PsiPlus,
            OutcomeArg::PsiMinus => BellLabel::PsiMinus,
            OutcomeArg::PhiPlus => BellLabel::PhiPlus,
            OutcomeArg::PhiMinus => BellLabel::PhiMinus,
        }
    }
}

fn pattern_string(p: &[u8]) -> String {
    p.iter().map(|n| n.to_string()).collect()
}

fn cmd_teleport(
    input: &InputArgs,
    noise: &NoiseProfile,
    outcome: Option<BellLabel>,
) -> fockport::Result<Table> {
    let (gamma, lambda) = input.angles();
    let spec = InputStateSpec::from_angles(gamma, lambda);
    let (reports, accepted) = teleport(&spec, noise)?;
    let mut table = Table::new(&["outcome", "pattern", "probability", "fidelity"]);
    table.config_angle("gamma", gamma);
    table.config_angle("lambda", lambda);
    table.config_noise(noise);
    if let Some(label) = outcome {
        table.config_text("outcome", label.name());
    }
    for r in reports
        .iter()
        .filter(|r| outcome.is_none_or(|l| l == r.label))
    {
        table.row_mixed(
            vec![r.label.name().into(), pattern_string(&r.pattern)],
            &[r.probability, r.fidelity],
        );
    }
    table.summary("acceptance_rate", accepted);
    Ok(table)
}

fn cmd_channel_fidelity(noise: &NoiseProfile) -> fockport::Result<Table> {
    let closed = formulas::channel_fidelity(noise.kappa, noise.eta)?;
    let simulated = simulated_channel_fidelity(noise)?;
    let mut table = Table::new(&["closed_form", "simulated", "difference"]);
    table.config_noise(noise);
    table.row_mixed(vec![], &[closed, simulated, (closed - simulated).abs()]);
    Ok(table)
}

fn cmd_fig3(noise: &NoiseProfile, grid: u32) -> fockport::Result<Table> {
    let n = grid as usize;
    let rows: Vec<Vec<[f64; 3]>> = (0..n)
        .into_par_iter()
        .map(|gi| {
            let gamma = PI * gi as f64 / (n - 1) as f64;
            (0..n)
                .map(|li| {
                    let lambda = 2.0 * PI * li as f64 / n as f64;
                    let spec = InputStateSpec::from_angles(gamma, lambda);
                    formulas::teleport_fidelity(&spec, noise.kappa, noise.eta)
                        .map(|f| [gamma, lambda, f])
                })
                .collect::<fockport::Result<Vec<_>>>()
        })
        .collect::<fockport::Result<Vec<_>>>()?;
    let mut table = Table::new(&["gamma", "lambda", "F"]);
    table.config_noise(noise);
    table.config_int("grid", grid as u64);
    for row in rows.into_iter().flatten() {
        table.row_mixed(vec![], &row);
    }
    Ok(table)
}

fn cmd_bell_table(noise: &NoiseProfile) -> fockport::Result<Table> {
    let mut header = vec!["input".to_string()];
    header.extend(BellLabel::ALL.iter().map(|l| pattern_string(&l.pattern())));
    header.push("rejected".into());
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut table = Table::new(&header);
    table.config_noise(noise);
    for input in BellLabel::ALL {
        let stats = bell_state_statistics(input, noise)?;
        let mut values: Vec<f64> = BellLabel::ALL
            .iter()
            .map(|l| {
                stats
                    .iter()
                    .find(|(p, _)| *p == l.pattern())
                    .map_or(0.0, |(_, p)| *p)
            })
            .collect();
        let rejected: f64 = stats
            .iter()
            .filter(|(p, _)| Classification::of_pattern(p) == Classification::Rejected)
            .map(|(_, p)| p)
            .sum();
        values.push(rejected);
        table.row_mixed(vec![input.name().into()], &values);
    }
    Ok(table)
}

fn run(cli: Cli) -> Result<(), String> {
    let (table, output) = match &cli.command {
        Command::Teleport {
            input,
            noise,
            outcome,
            output,
        } => (
            cmd_teleport(input, &noise.profile(), outcome.map(Into::into)),
            output,
        ),
        Command::ChannelFidelity { noise, output } => {
            (cmd_channel_fidelity(&noise.profile()), output)
        }
        Command::Fig3 {
            noise,
            grid,
            output,
        } => (cmd_fig3(&noise.profile(), *grid), output),
        Command::BellTable { noise, output } => (cmd_bell_table(&noise.profile()), output),
    };
    let text = table.map_err(|e| e.to_string())?.render(output.format);
    match &output.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
