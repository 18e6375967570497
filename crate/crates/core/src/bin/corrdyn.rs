use std::fs::OpenOptions;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use corrdyn::bound::{lower_bound_from_counts, lower_bound_from_state, CorrelatorResult, ErrorMethod};
use corrdyn::experiments::{
    run_fig4, run_fig6, run_fig7, run_fig8, run_scenario, seed_override, Check, Fig4Variant, Fig8Options,
    SamplingOptions, ScenarioConfig, ScenarioResult,
};
use corrdyn::io::{load_state, read_json, state_to_json, write_json, ChannelFile, NoiseScenario};
use corrdyn::linalg::Observable;
use corrdyn::measure::{measure_ibar, PartyStructure};
use corrdyn::tomography::{
    mle_process_tomography, mle_state_tomography, process_tomography_settings, simulate_record,
    state_tomography_settings, MeasurementRecord, MleOptions, DEFAULT_SHOTS,
};
use corrdyn::Result;

#[derive(Parser)]
#[command(name = "corrdyn", version, about = "Spatial correlations of multi-qubit quantum dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Correlation measure of a channel given as Kraus operators or CJ state.
    Ibar {
        #[arg(long)]
        channel: PathBuf,
        /// Party structure as `M,d`; defaults to the file's own.
        #[arg(long, value_parser = parse_parties)]
        parties: Option<PartyStructure>,
        /// Append a row to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value = "channel")]
        label: String,
    },
    /// Lower bound from a state or from measured counts.
    Lowerbound(LowerboundArgs),
    /// Simulated tomography and maximum-likelihood reconstruction.
    #[command(subcommand)]
    Tomo(TomoCommand),
    /// Run a reproduction scenario and write its CSV.
    #[command(subcommand)]
    Reproduce(ReproduceCommand),
    /// Exact (and sampled) channel of a noise scenario.
    Noise {
        #[arg(long)]
        scenario: PathBuf,
        /// Also estimate the channel from phase samples.
        #[arg(long)]
        sampled: bool,
        /// Write the exact channel as a channel file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct LowerboundArgs {
    #[arg(long, conflicts_with = "counts", required_unless_present = "counts")]
    state: Option<PathBuf>,
    #[arg(long)]
    counts: Option<PathBuf>,
    /// One Pauli string per party, comma separated, e.g. `X,X,X,X`.
    #[arg(long)]
    obs: String,
    /// Party structure as `M,d`; defaults to one qubit per party.
    #[arg(long, value_parser = parse_parties)]
    parties: Option<PartyStructure>,
    /// Bootstrap resamples for the counts error bar (delta method otherwise).
    #[arg(long)]
    bootstrap: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value = "run")]
    label: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum TomoKind {
    State,
    Process,
}

#[derive(Subcommand)]
enum TomoCommand {
    /// Simulate a finite-shot record for a state or a channel.
    Simulate {
        #[arg(long, conflicts_with = "channel", required_unless_present = "channel")]
        state: Option<PathBuf>,
        #[arg(long)]
        channel: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SHOTS)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct a state or channel from a record.
    Reconstruct {
        #[arg(long)]
        record: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Accept records without a complete setting set.
        #[arg(long)]
        allow_incomplete: bool,
    },
}

#[derive(Args, Clone)]
struct SamplingArgs {
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    traj: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl SamplingArgs {
    fn resolve(&self) -> SamplingOptions {
        let d = SamplingOptions::default();
        SamplingOptions {
            shots: self.shots.unwrap_or(d.shots),
            n_traj: self.traj.unwrap_or(d.n_traj),
            repetitions: self.reps.unwrap_or(d.repetitions),
            seed: seed_override().or(self.seed).unwrap_or(d.seed),
        }
    }
}

#[derive(Subcommand)]
enum ReproduceCommand {
    /// Two-qubit correlation measure versus time.
    Fig4 {
        #[arg(long, value_parser = parse_variant)]
        variant: Fig4Variant,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Four-qubit pairwise bounds.
    Fig6 {
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Four-qubit four-body bounds per encoding configuration.
    Fig7 {
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Two-qubit measure over a grid of the two phase widths.
    Fig8 {
        #[arg(long)]
        out: PathBuf,
    },
    /// A scenario described by a JSON configuration.
    Scenario {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_parties(s: &str) -> std::result::Result<PartyStructure, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [m, d] = parts.as_slice() else {
        return Err(format!("expected M,d but got {s:?}"));
    };
    let m: usize = m.parse().map_err(|e| format!("M: {e}"))?;
    let d: usize = d.parse().map_err(|e| format!("d: {e}"))?;
    PartyStructure::uniform(m, d).map_err(|e| e.to_string())
}

fn parse_variant(s: &str) -> std::result::Result<Fig4Variant, String> {
    s.parse().map_err(|e: corrdyn::Error| e.to_string())
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

/// Appends one row, writing `header` first when the file is new or empty.
fn append_csv_row(path: &Path, header: &[String], row: &[String]) -> Result<()> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut w = csv::Writer::from_writer(file);
    if fresh {
        w.write_record(header)?;
    }
    w.write_record(row)?;
    w.flush()?;
    Ok(())
}

fn cmd_ibar(channel: &Path, parties: Option<PartyStructure>, csv: Option<&Path>, label: &str) -> Result<()> {
    let (channel, parties) = ChannelFile::load(channel)?.to_channel(parties.as_ref())?;
    let report = measure_ibar(&channel, &parties)?;
    print_json(&report)?;
    if let Some(path) = csv {
        let m = parties.len();
        let d = parties.common_dim().unwrap_or(0);
        let mut header: Vec<String> = ["label", "M", "d", "iBar", "joint_entropy"].map(String::from).to_vec();
        header.extend((1..=m).map(|i| format!("marginal_entropy_{i}")));
        let mut row = vec![
            label.to_string(),
            m.to_string(),
            d.to_string(),
            report.i_bar.to_string(),
            report.joint_entropy.to_string(),
        ];
        row.extend(report.entropies.iter().map(f64::to_string));
        append_csv_row(path, &header, &row)?;
    }
    Ok(())
}

fn cmd_lowerbound(args: &LowerboundArgs) -> Result<()> {
    let labels: Vec<&str> = args.obs.split(',').map(str::trim).collect();
    let (result, parties): (CorrelatorResult, PartyStructure) = if let Some(path) = &args.state {
        let rho = load_state(path)?;
        let parties = match &args.parties {
            Some(p) => p.clone(),
            None => PartyStructure::new(rho.dims().to_vec())?,
        };
        let obs = labels.iter().map(|l| Observable::pauli(l)).collect::<Result<Vec<_>>>()?;
        (lower_bound_from_state(&rho, &obs, &parties)?, parties)
    } else {
        let record: MeasurementRecord = read_json(args.counts.as_ref().expect("clap enforces one source"))?;
        let parties = match &args.parties {
            Some(p) => p.clone(),
            None => PartyStructure::uniform(record.n, 2)?,
        };
        let method = match args.bootstrap {
            Some(resamples) => ErrorMethod::Bootstrap {
                resamples,
                seed: args.seed,
            },
            None => ErrorMethod::Delta,
        };
        (lower_bound_from_counts(&record, &labels, &parties, method)?, parties)
    };
    print_json(&result)?;
    if let Some(path) = &args.csv {
        let m = result.singles.len();
        let mut header: Vec<String> = ["label", "M", "d", "joint"].map(String::from).to_vec();
        header.extend((1..=m).map(|i| format!("single_{i}")));
        header.extend(["c", "lower_bound", "std_err"].map(String::from));
        let mut row = vec![
            args.label.clone(),
            m.to_string(),
            parties.common_dim().unwrap_or(0).to_string(),
            result.joint.to_string(),
        ];
        row.extend(result.singles.iter().map(f64::to_string));
        row.extend([
            result.c.to_string(),
            result.lower_bound.to_string(),
            result.std_err.map(|s| s.to_string()).unwrap_or_default(),
        ]);
        append_csv_row(path, &header, &row)?;
    }
    Ok(())
}

fn cmd_tomo(cmd: &TomoCommand) -> Result<()> {
    match cmd {
        TomoCommand::Simulate {
            state,
            channel,
            shots,
            seed,
            out,
        } => {
            let seed = seed_override().unwrap_or(*seed);
            let record = if let Some(path) = state {
                let rho = load_state(path)?;
                let n = rho.dims().len();
                simulate_record(&rho, &state_tomography_settings(n), *shots, seed)?
            } else {
                let path = channel.as_ref().expect("clap enforces one source");
                let (ch, _) = ChannelFile::load(path)?.to_channel(None)?;
                let n = ch.dims().len();
                simulate_record(&ch, &process_tomography_settings(n), *shots, seed)?
            };
            write_json(out, &record)?;
            print_json(&json!({ "n": record.n, "settings": record.settings.len(), "out": out }))
        }
        TomoCommand::Reconstruct {
            record,
            out,
            max_iter,
            tol,
            allow_incomplete,
        } => {
            let record: MeasurementRecord = read_json(record)?;
            let opts = MleOptions {
                max_iter: *max_iter,
                tol: *tol,
                allow_incomplete: *allow_incomplete,
            };
            let is_process = record.settings.iter().any(|s| s.input.is_some());
            if is_process {
                let est = mle_process_tomography(&record, &opts)?;
                let parties = PartyStructure::uniform(record.n, 2)?;
                write_json(out, &ChannelFile::choi_form(&est.channel, &parties)?)?;
                print_json(&json!({
                    "kind": "process",
                    "iterations": est.iterations,
                    "logLikelihood": est.log_likelihood.last(),
                    "iBar": measure_ibar(&est.channel, &parties)?.i_bar,
                    "warnings": est.warnings,
                }))
            } else {
                let est = mle_state_tomography(&record, &opts)?;
                write_json(out, &state_to_json(&est.state))?;
                print_json(&json!({
                    "kind": "state",
                    "iterations": est.iterations,
                    "logLikelihood": est.log_likelihood.last(),
                    "warnings": est.warnings,
                }))
            }
        }
    }
}

fn report<R: Serialize>(result: &ScenarioResult<R>, out: &Path) -> Result<bool> {
    result.write_csv(out)?;
    eprintln!("{}: wrote {} rows to {}", result.id, result.rows.len(), out.display());
    for Check { name, passed, detail } in &result.checks {
        eprintln!("  [{}] {name}  {detail}", if *passed { "PASS" } else { "FAIL" });
    }
    Ok(result.passed())
}

fn cmd_reproduce(cmd: &ReproduceCommand) -> Result<bool> {
    match cmd {
        ReproduceCommand::Fig4 { variant, out, sampling } => report(&run_fig4(*variant, &sampling.resolve())?, out),
        ReproduceCommand::Fig6 { out, sampling } => report(&run_fig6(&sampling.resolve())?, out),
        ReproduceCommand::Fig7 { out, sampling } => report(&run_fig7(&sampling.resolve())?, out),
        ReproduceCommand::Fig8 { out } => report(&run_fig8(&Fig8Options::default())?, out),
        ReproduceCommand::Scenario { config, out } => {
            let mut config: ScenarioConfig = read_json(config)?;
            if let Some(seed) = seed_override() {
                config.seed = seed;
            }
            report(&run_scenario(&config)?, out)
        }
    }
}

fn cmd_noise(path: &Path, sampled: bool, out: Option<&Path>) -> Result<()> {
    let mut scenario: NoiseScenario = read_json(path)?;
    if let Some(seed) = seed_override() {
        scenario.seed = seed;
    }
    let n = scenario.n_qubits();
    let parties = PartyStructure::uniform(n, 2)?;
    let exact = scenario.exact_channel()?;
    let sampled_ibar = if sampled {
        Some(measure_ibar(&scenario.sampled_channel()?, &parties)?.i_bar)
    } else {
        None
    };
    if let Some(out) = out {
        write_json(out, &ChannelFile::kraus_form(&exact, Some(&parties)))?;
    }
    print_json(&json!({
        "nQubits": n,
        "iBar": measure_ibar(&exact, &parties)?.i_bar,
        "iBarSampled": sampled_ibar,
    }))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Ibar {
            channel,
            parties,
            csv,
            label,
        } => cmd_ibar(&channel, parties, csv.as_deref(), &label).map(|_| true),
        Command::Lowerbound(args) => cmd_lowerbound(&args).map(|_| true),
        Command::Tomo(cmd) => cmd_tomo(&cmd).map(|_| true),
        Command::Reproduce(cmd) => cmd_reproduce(&cmd),
        Command::Noise { scenario, sampled, out } => cmd_noise(&scenario, sampled, out.as_deref()).map(|_| true),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
