//! Command-line surface: parse state specifications, run the analyses, and
//! emit machine-readable reports.
//!
//! Exit codes are a stable contract. 0 means success; 1 means a well-formed
//! request failed in the computation (unphysical state, truncation bound
//! exceeded); 2 means a usage or parse error. Reports go to stdout as JSON
//! unless a command offers CSV; `--out` redirects them to a file.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cvteleport::{
    added_noise, compare_to_analytic, distorting_field, epr_moments, epr_uncertainty,
    fidelity_coherent, run_protocol, teleport, teleport_report, EprMoments, GaussianState,
    ProtocolConfig,
};
use serde::Serialize;

mod states;

use states::{parse_state_spec, Role};

#[derive(Parser)]
#[command(
    name = "cvteleport",
    version,
    about = "Gaussian-state teleportation: analytic channel reports and seeded protocol simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// States are given as inline presets ("vacuum", "coherent:1+0.5i",
/// "thermal:0.3", "svs:0.8") or as paths to JSON state files.
#[derive(Subcommand)]
enum Command {
    /// EPR moments of a two-mode resource and its inseparability verdict
    EprStats {
        /// Resource state: preset or JSON file
        #[arg(long, value_name = "STATE")]
        resource: String,
        /// Write the report here instead of stdout
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Field a resource imprints on the output: moments, classicality, photon content
    Distort {
        /// Resource state: preset or JSON file
        #[arg(long, value_name = "STATE")]
        resource: String,
        /// Largest Fock index kept in the photon-number report
        #[arg(long, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
        cutoff: u32,
        /// Fail when the truncation deficit reaches this bound
        #[arg(long, value_name = "EPS")]
        max_deficit: Option<f64>,
        /// Write the report here instead of stdout
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Output state and channel figures for one input through one resource
    Teleport {
        /// Single-mode input state: preset or JSON file
        #[arg(long, value_name = "STATE")]
        input: String,
        /// Resource state: preset or JSON file
        #[arg(long, value_name = "STATE")]
        resource: String,
        /// Write the report here instead of stdout
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Coherent-state teleportation fidelity of a resource
    Fidelity {
        /// Resource state: preset or JSON file
        #[arg(long, value_name = "STATE")]
        resource: String,
        /// Write the report here instead of stdout
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Sampled protocol run with z-scores against the analytic channel
    Simulate {
        /// Single-mode input state: preset or JSON file
        #[arg(long, value_name = "STATE")]
        input: String,
        /// Resource state: preset or JSON file
        #[arg(long, value_name = "STATE")]
        resource: String,
        /// Number of measurement outcomes to draw
        #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        /// Seed of the reproducible sample stream
        #[arg(long, value_name = "SEED", default_value_t = 0)]
        seed: u64,
        /// Also write every outcome pair to this CSV file
        #[arg(long, value_name = "PATH")]
        record_outcomes: Option<PathBuf>,
        /// Write the report here instead of stdout
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Channel figures of squeezed-vacuum resources over a uniform r grid
    Sweep {
        /// Smallest squeezing parameter
        #[arg(long, value_name = "R", default_value_t = 0.0)]
        r_min: f64,
        /// Largest squeezing parameter
        #[arg(long, value_name = "R", default_value_t = 2.0)]
        r_max: f64,
        /// Number of grid rows, both endpoints included
        #[arg(long, value_name = "K", default_value_t = 21, value_parser = clap::value_parser!(u32).range(1..))]
        steps: u32,
        /// Table format
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Write the table here instead of stdout
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// A failed run, split by exit class.
#[derive(Debug)]
pub(crate) enum Failure {
    /// The computation itself failed on a well-formed request: exit 1.
    Compute(String),
    /// The request could not be understood or validated: exit 2.
    Usage(String),
}

impl Failure {
    fn exit(self) -> ExitCode {
        let (code, message) = match self {
            Failure::Compute(m) => (1, m),
            Failure::Usage(m) => (2, m),
        };
        eprintln!("error: {message}");
        ExitCode::from(code)
    }
}

/// Splits library errors into the two exit classes: rejected parameters and
/// shape mismatches are usage errors, everything that can only be discovered
/// by doing the computation is a computational failure.
impl From<cvteleport::Error> for Failure {
    fn from(err: cvteleport::Error) -> Self {
        use cvteleport::Error as E;
        match err {
            E::NegativeParameter { .. }
            | E::ModeCountMismatch { .. }
            | E::DimensionMismatch { .. }
            | E::ModeOutOfRange { .. }
            | E::EqualModes(_)
            | E::InvalidCutoff
            | E::GeneratingArgOutOfRange(_) => Failure::Usage(err.to_string()),
            E::NotSymmetric { .. }
            | E::Unphysical { .. }
            | E::NotSymplectic { .. }
            | E::TruncationDeficit { .. }
            | E::DegenerateDistribution { .. }
            | E::NotStrictlyClassical { .. }
            | E::SingularMeasurement { .. }
            | E::TooFewSamples { .. } => Failure::Compute(err.to_string()),
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => failure.exit(),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::EprStats { resource, out } => {
            let resource = parse_state_spec(&resource, Role::Resource)?;
            let moments = epr_moments(&resource)?;
            let report = EprStatsReport {
                inseparable: moments.inseparable(),
                moments,
            };
            emit(&to_json(&report)?, out.as_deref())
        }
        Command::Distort {
            resource,
            cutoff,
            max_deficit,
            out,
        } => {
            let resource = parse_state_spec(&resource, Role::Resource)?;
            let report = distort_report(&resource, cutoff as usize, max_deficit)?;
            emit(&to_json(&report)?, out.as_deref())
        }
        Command::Teleport {
            input,
            resource,
            out,
        } => {
            let input = parse_state_spec(&input, Role::Input)?;
            let resource = parse_state_spec(&resource, Role::Resource)?;
            let report = teleport_report(&input, &resource)?;
            emit(&to_json(&report)?, out.as_deref())
        }
        Command::Fidelity { resource, out } => {
            let resource = parse_state_spec(&resource, Role::Resource)?;
            let report = FidelityReport {
                fidelity_coherent: fidelity_coherent(&resource)?,
            };
            emit(&to_json(&report)?, out.as_deref())
        }
        Command::Simulate {
            input,
            resource,
            samples,
            seed,
            record_outcomes,
            out,
        } => {
            let input = parse_state_spec(&input, Role::Input)?;
            let resource = parse_state_spec(&resource, Role::Resource)?;
            let config = ProtocolConfig {
                n_samples: samples as usize,
                seed,
                record_outcomes: record_outcomes.is_some(),
            };
            let estimate = run_protocol(&input, &resource, &config)?;
            if let Some(path) = &record_outcomes {
                let outcomes = estimate.outcomes.as_deref().expect("recording was requested");
                write_outcome_csv(path, outcomes)?;
            }
            let analytic = teleport(&input, &resource)?;
            let comparison = compare_to_analytic(&estimate, &analytic)?;
            let report = SimulateReport {
                estimate,
                analytic,
                comparison,
            };
            emit(&to_json(&report)?, out.as_deref())
        }
        Command::Sweep {
            r_min,
            r_max,
            steps,
            format,
            out,
        } => {
            if !(r_min.is_finite() && r_max.is_finite()) {
                return Err(Failure::Usage(format!(
                    "r range [{r_min}, {r_max}] must be finite"
                )));
            }
            if r_max < r_min {
                return Err(Failure::Usage(format!(
                    "r-max ({r_max}) must not be below r-min ({r_min})"
                )));
            }
            let rows = sweep_rows(&sweep_grid(r_min, r_max, steps))?;
            let body = match format {
                Format::Json => to_json(&rows)?,
                Format::Csv => sweep_csv(&rows),
            };
            emit(&body, out.as_deref())
        }
    }
}

#[derive(Serialize)]
struct EprStatsReport {
    moments: EprMoments,
    inseparable: bool,
}

#[derive(Serialize)]
struct FidelityReport {
    fidelity_coherent: f64,
}

#[derive(Serialize)]
struct GSample {
    s: f64,
    value: f64,
}

#[derive(Serialize)]
struct DistortReport {
    /// The single-mode field state itself (mean and covariance).
    state: GaussianState,
    /// Normally ordered covariance; its spectrum decides classicality.
    noise_matrix: [[f64; 2]; 2],
    min_noise_eigenvalue: f64,
    strictly_classical: bool,
    truncation_deficit: f64,
    /// p_l for l = 0..=cutoff.
    photon_distribution: Vec<f64>,
    /// Moment generating function on the quarter grid of [0, 1].
    generating_function: Vec<GSample>,
}

#[derive(Serialize)]
struct SimulateReport {
    estimate: cvteleport::EnsembleEstimate,
    /// Exact output state the ensemble must reproduce.
    analytic: GaussianState,
    comparison: cvteleport::ComparisonReport,
}

#[derive(Serialize)]
struct SweepRow {
    r: f64,
    epr_uncertainty: f64,
    added_noise: f64,
    fidelity_coherent: f64,
}

fn distort_report(
    resource: &GaussianState,
    cutoff: usize,
    max_deficit: Option<f64>,
) -> Result<DistortReport, Failure> {
    let field = distorting_field(resource)?;
    let fock = match max_deficit {
        Some(bound) => field.fock_matrix_with_deficit_bound(cutoff, bound)?,
        None => field.fock_matrix(cutoff)?,
    };
    let photon_distribution = (0..=cutoff).map(|l| fock.entry(l, l).re).collect();
    let mut generating_function = Vec::with_capacity(5);
    for k in 0..=4 {
        let s = 0.25 * f64::from(k);
        generating_function.push(GSample {
            s,
            value: field.generating_function(s)?,
        });
    }
    let n = field.noise_matrix();
    let min_noise_eigenvalue = {
        let half_tr = 0.5 * (n[(0, 0)] + n[(1, 1)]);
        let disc = 0.25 * (n[(0, 0)] - n[(1, 1)]).powi(2) + n[(0, 1)] * n[(1, 0)];
        half_tr - disc.max(0.0).sqrt()
    };
    Ok(DistortReport {
        state: field.state().clone(),
        noise_matrix: [[n[(0, 0)], n[(0, 1)]], [n[(1, 0)], n[(1, 1)]]],
        min_noise_eigenvalue,
        strictly_classical: min_noise_eigenvalue > 0.0,
        truncation_deficit: fock.deficit(),
        photon_distribution,
        generating_function,
    })
}

/// Uniform grid over [r_min, r_max] with exact endpoints; a single step
/// degenerates to r_min alone.
fn sweep_grid(r_min: f64, r_max: f64, steps: u32) -> Vec<f64> {
    if steps == 1 {
        return vec![r_min];
    }
    let h = (r_max - r_min) / f64::from(steps - 1);
    (0..steps)
        .map(|i| {
            if i == steps - 1 {
                r_max
            } else {
                r_min + f64::from(i) * h
            }
        })
        .collect()
}

fn sweep_rows(grid: &[f64]) -> Result<Vec<SweepRow>, Failure> {
    grid.iter()
        .map(|&r| {
            let resource = GaussianState::two_mode_squeezed_vacuum(r)?;
            Ok(SweepRow {
                r,
                epr_uncertainty: epr_uncertainty(&resource)?,
                added_noise: added_noise(&resource)?,
                fidelity_coherent: fidelity_coherent(&resource)?,
            })
        })
        .collect()
}

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut lines = vec!["r,epr_uncertainty,added_noise,fidelity_coherent".to_string()];
    lines.extend(rows.iter().map(|row| {
        format!(
            "{},{},{},{}",
            row.r, row.epr_uncertainty, row.added_noise, row.fidelity_coherent
        )
    }));
    lines.join("\n")
}

fn write_outcome_csv(path: &Path, outcomes: &[[f64; 2]]) -> Result<(), Failure> {
    let mut text = String::from("sample,q,p\n");
    for (i, pair) in outcomes.iter().enumerate() {
        text.push_str(&format!("{i},{},{}\n", pair[0], pair[1]));
    }
    fs::write(path, text)
        .map_err(|e| Failure::Compute(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure::Compute(e.to_string()))
}

fn emit(body: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, format!("{body}\n"))
            .map_err(|e| Failure::Compute(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}
