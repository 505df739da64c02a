//! `multiport` — simulate symmetric-multiport interferometers, check which
//! output distributions they can produce, and synthesize the phase shifts
//! that produce them.
//!
//! Exit codes: 0 success/feasible, 2 invalid input, 3 infeasible,
//! 4 search exhausted without a solution.

mod output;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use multiport::{
    check_single_photon_distribution, concurrence_matrix, exact_condition_residuals,
    interferometer, output_amplitudes, propagate_with_limit, synthesize_search,
    synthesize_three_port, transfer_matrix, two_mode_only_possible,
    two_photon_same_port_conditions, two_photon_two_port_conditions, Dimension,
    FeasibilityReport, FockRecord, FockState, PhaseVector, ProbabilityDistribution,
    SearchConfig, SynthesisMethod, SynthesisOutcome, Verdict, DEFAULT_MAX_PHOTONS,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const TOLERANCE_ENV: &str = "MULTIPORT_TOLERANCE";

#[derive(Debug, Parser)]
#[command(name = "multiport", version, about = "Multi-path interferometer simulation, feasibility analysis, and phase synthesis")]
struct Cli {
    /// Output format (sweep defaults to csv, everything else to json).
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,

    /// JSON config file supplying defaults for omitted flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Feasibility tolerance (default 1e-9; MULTIPORT_TOLERANCE overrides
    /// the default, this flag overrides both).
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodChoice {
    Auto,
    ClosedForm,
    Search,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepKind {
    Simplex,
    PhaseGrid,
    Magnitude,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Propagate a single photon or a Fock state through a phase setting.
    Simulate {
        /// Number of ports.
        #[arg(long)]
        d: Option<usize>,
        /// Phase shifts in radians, comma-separated.
        #[arg(long)]
        phases: Option<String>,
        /// Phase shifts as unit-modulus complex literals, e.g. "i,1,-0.5+0.866i".
        #[arg(long, conflicts_with = "phases")]
        phases_complex: Option<String>,
        /// Input port for a single photon (default 0).
        #[arg(long, conflicts_with = "fock")]
        input_port: Option<usize>,
        /// Input occupation numbers, e.g. "2,0,0"; switches to Fock propagation.
        #[arg(long)]
        fock: Option<String>,
        /// Photon-number cap for Fock propagation (default 6).
        #[arg(long)]
        max_photons: Option<usize>,
    },
    /// Check whether a target distribution or entanglement pattern is producible.
    Check {
        #[arg(long)]
        d: Option<usize>,
        /// Target probabilities (d entries, or 6 for two-photon checks);
        /// accepts floats and rationals like 1/9.
        #[arg(long)]
        target: Option<String>,
        /// Treat the target as a two-photon distribution with both photons
        /// entering one port (3-port device, basis 200,020,002,110,101,011).
        #[arg(long)]
        two_photon_same_port: bool,
        /// Treat the target as a two-photon distribution with photons
        /// entering ports 0 and 1.
        #[arg(long, conflicts_with = "two_photon_same_port")]
        two_photon_two_port: bool,
        /// Ask whether a state entangling exactly this mode pair "a,b" exists.
        #[arg(long)]
        two_modes: Option<String>,
    },
    /// Synthesize phase shifts realizing a target output distribution.
    Synthesize {
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        target: Option<String>,
        /// Search restarts (d != 3 or --method search).
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Convergence threshold for the search.
        #[arg(long)]
        search_tol: Option<f64>,
        #[arg(long, value_enum)]
        method: Option<MethodChoice>,
    },
    /// Two-photon feasibility analysis and general Fock propagation.
    Multiphoton {
        #[arg(long)]
        d: Option<usize>,
        /// Analyze a 6-entry target for both photons entering one port.
        #[arg(long)]
        same_port: bool,
        /// Analyze a 6-entry target for photons entering ports 0 and 1.
        #[arg(long, conflicts_with = "same_port")]
        two_port: bool,
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        phases: Option<String>,
        #[arg(long, conflicts_with = "phases")]
        phases_complex: Option<String>,
        /// Input occupation for propagation mode.
        #[arg(long)]
        fock: Option<String>,
        #[arg(long)]
        max_photons: Option<usize>,
    },
    /// Grid experiments, emitted as CSV.
    Sweep {
        #[arg(long, value_enum)]
        kind: Option<SweepKind>,
        #[arg(long)]
        d: Option<usize>,
        /// Simplex grid step (simplex and magnitude sweeps).
        #[arg(long)]
        step: Option<f64>,
        /// Phase-grid resolution per axis.
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Magnitude threshold classifying a component as occupied.
        #[arg(long)]
        component_tol: Option<f64>,
        /// Refuse grids larger than this many points.
        #[arg(long)]
        cap: Option<usize>,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    d: Option<usize>,
    phases: Option<Vec<f64>>,
    phases_complex: Option<Vec<String>>,
    target: Option<Vec<f64>>,
    input_port: Option<usize>,
    fock: Option<Vec<usize>>,
    max_photons: Option<usize>,
    format: Option<String>,
    tolerance: Option<f64>,
    #[serde(default)]
    search: SearchSection,
    #[serde(default)]
    sweep: SweepSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SearchSection {
    restarts: Option<usize>,
    seed: Option<u64>,
    max_iters: Option<usize>,
    tol: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepSection {
    kind: Option<String>,
    step: Option<f64>,
    resolution: Option<usize>,
    cap: Option<usize>,
    component_tol: Option<f64>,
}

/// A failure that should reach the user as text on stderr plus exit 2.
struct Invalid(String);

impl<E: std::fmt::Display> From<E> for Invalid {
    fn from(err: E) -> Self {
        Invalid(err.to_string())
    }
}

enum Outcome {
    Ok,
    Infeasible,
    NotFound,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Infeasible) => ExitCode::from(3),
        Ok(Outcome::NotFound) => ExitCode::from(4),
        Err(Invalid(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, Invalid> {
    let config: FileConfig = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Invalid(format!("cannot read config {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| Invalid(format!("bad config {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    let format = resolve_format(cli.format, &config, &cli.command)?;
    let eps = resolve_tolerance(cli.tolerance, &config)?;

    match cli.command {
        Command::Simulate {
            d,
            phases,
            phases_complex,
            input_port,
            fock,
            max_photons,
        } => {
            let lambda = resolve_phases(d, &phases, &phases_complex, &config)?;
            let fock_occ = resolve_fock(&fock, &config)?;
            match fock_occ {
                Some(occ) => {
                    let max = max_photons.or(config.max_photons).unwrap_or(DEFAULT_MAX_PHOTONS);
                    cmd_simulate_fock(&lambda, occ, max, format)
                }
                None => {
                    let port = input_port.or(config.input_port).unwrap_or(0);
                    cmd_simulate_single(&lambda, port, format)
                }
            }
        }
        Command::Check {
            d,
            target,
            two_photon_same_port,
            two_photon_two_port,
            two_modes,
        } => {
            if let Some(modes) = two_modes {
                let dim = d.or(config.d).ok_or(Invalid("--d is required".into()))?;
                return cmd_check_two_modes(dim, &modes, format);
            }
            let target = resolve_target(&target, &config)?;
            if two_photon_same_port || two_photon_two_port {
                let dim = d.or(config.d).unwrap_or(3);
                if dim != 3 {
                    return Err(Invalid("two-photon checks support --d 3 only".into()));
                }
                cmd_two_photon(
                    "check",
                    &target,
                    two_photon_same_port,
                    eps,
                    format,
                )
            } else {
                cmd_check_distribution(&target, eps, format)
            }
        }
        Command::Synthesize {
            d,
            target,
            restarts,
            seed,
            max_iters,
            search_tol,
            method,
        } => {
            let target = resolve_target(&target, &config)?;
            if let Some(dim) = d.or(config.d) {
                if dim != target.len() {
                    return Err(Invalid(format!(
                        "--d {dim} does not match a target with {} entries",
                        target.len()
                    )));
                }
            }
            let search = SearchConfig {
                restarts: restarts.or(config.search.restarts).unwrap_or(64),
                seed: seed.or(config.search.seed).unwrap_or(0),
                max_iters: max_iters.or(config.search.max_iters).unwrap_or(600),
                tol: search_tol.or(config.search.tol).unwrap_or(1e-12),
            };
            cmd_synthesize(&target, method.unwrap_or(MethodChoice::Auto), eps, &search, format)
        }
        Command::Multiphoton {
            d,
            same_port,
            two_port,
            target,
            phases,
            phases_complex,
            fock,
            max_photons,
        } => {
            if same_port || two_port {
                let dim = d.or(config.d).unwrap_or(3);
                if dim != 3 {
                    return Err(Invalid("two-photon analysis supports --d 3 only".into()));
                }
                let target = resolve_target(&target, &config)?;
                cmd_two_photon("multiphoton", &target, same_port, eps, format)
            } else {
                let lambda = resolve_phases(d, &phases, &phases_complex, &config)?;
                let occ = resolve_fock(&fock, &config)?
                    .ok_or(Invalid("--fock is required unless --same-port/--two-port".into()))?;
                let max = max_photons.or(config.max_photons).unwrap_or(DEFAULT_MAX_PHOTONS);
                cmd_simulate_fock(&lambda, occ, max, format)
            }
        }
        Command::Sweep {
            kind,
            d,
            step,
            resolution,
            restarts,
            seed,
            max_iters,
            component_tol,
            cap,
            output,
        } => {
            let kind = match kind {
                Some(k) => k,
                None => match config.sweep.kind.as_deref() {
                    Some("simplex") => SweepKind::Simplex,
                    Some("phase-grid") => SweepKind::PhaseGrid,
                    Some("magnitude") => SweepKind::Magnitude,
                    Some(other) => return Err(Invalid(format!("unknown sweep kind '{other}'"))),
                    None => return Err(Invalid("--kind is required".into())),
                },
            };
            let search = SearchConfig {
                restarts: restarts
                    .or(config.search.restarts)
                    .unwrap_or(match kind {
                        SweepKind::Magnitude => 256,
                        _ => 64,
                    }),
                seed: seed.or(config.search.seed).unwrap_or(0),
                max_iters: max_iters.or(config.search.max_iters).unwrap_or(600),
                tol: config.search.tol.unwrap_or(1e-12),
            };
            let params = SweepParams {
                kind,
                d: d.or(config.d),
                step: step.or(config.sweep.step),
                resolution: resolution.or(config.sweep.resolution).unwrap_or(200),
                component_tol: component_tol.or(config.sweep.component_tol).unwrap_or(1e-6),
                cap: cap.or(config.sweep.cap).unwrap_or(1_000_000),
                output,
            };
            cmd_sweep(params, &search, eps, format)
        }
    }
}

fn resolve_format(
    flag: Option<OutputFormat>,
    config: &FileConfig,
    command: &Command,
) -> Result<OutputFormat, Invalid> {
    if let Some(f) = flag {
        return Ok(f);
    }
    if let Some(name) = config.format.as_deref() {
        return match name {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            "pretty" => Ok(OutputFormat::Pretty),
            other => Err(Invalid(format!("unknown format '{other}' in config"))),
        };
    }
    Ok(match command {
        Command::Sweep { .. } => OutputFormat::Csv,
        _ => OutputFormat::Json,
    })
}

fn resolve_tolerance(flag: Option<f64>, config: &FileConfig) -> Result<f64, Invalid> {
    let eps = if let Some(t) = flag {
        t
    } else if let Some(t) = config.tolerance {
        t
    } else if let Ok(raw) = std::env::var(TOLERANCE_ENV) {
        raw.parse()
            .map_err(|_| Invalid(format!("bad {TOLERANCE_ENV} value '{raw}'")))?
    } else {
        multiport::tolerances::FEASIBILITY
    };
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Invalid(format!("tolerance must be positive, got {eps}")));
    }
    Ok(eps)
}

fn resolve_phases(
    d: Option<usize>,
    phases: &Option<String>,
    phases_complex: &Option<String>,
    config: &FileConfig,
) -> Result<PhaseVector, Invalid> {
    let lambda = if let Some(raw) = phases_complex {
        PhaseVector::new(parse::parse_complex_list(raw)?)?
    } else if let Some(raw) = phases {
        PhaseVector::from_angles(&parse::parse_number_list(raw)?)?
    } else if let Some(list) = &config.phases_complex {
        let values: Result<Vec<Complex64>, _> =
            list.iter().map(|s| parse::parse_complex(s)).collect();
        PhaseVector::new(values?)?
    } else if let Some(angles) = &config.phases {
        PhaseVector::from_angles(angles)?
    } else {
        return Err(Invalid("--phases or --phases-complex is required".into()));
    };
    if let Some(dim) = d.or(config.d) {
        if dim != lambda.dim() {
            return Err(Invalid(format!(
                "--d {dim} does not match {} phase shifts",
                lambda.dim()
            )));
        }
    }
    Ok(lambda)
}

fn resolve_target(
    target: &Option<String>,
    config: &FileConfig,
) -> Result<ProbabilityDistribution, Invalid> {
    let values = if let Some(raw) = target {
        parse::parse_number_list(raw)?
    } else if let Some(list) = &config.target {
        list.clone()
    } else {
        return Err(Invalid("--target is required".into()));
    };
    Ok(ProbabilityDistribution::new(values)?)
}

fn resolve_fock(
    fock: &Option<String>,
    config: &FileConfig,
) -> Result<Option<FockState>, Invalid> {
    let occ = if let Some(raw) = fock {
        Some(parse::parse_occupations(raw)?)
    } else {
        config.fock.clone()
    };
    occ.map(|o| FockState::new(o).map_err(Invalid::from)).transpose()
}

#[derive(Serialize)]
struct Envelope<I: Serialize, R: Serialize, D: Serialize> {
    command: &'static str,
    input: I,
    result: R,
    residuals: D,
    version: &'static str,
}

fn emit<I: Serialize, R: Serialize, D: Serialize>(
    envelope: &Envelope<I, R, D>,
    format: OutputFormat,
    pretty: impl FnOnce() -> String,
) {
    match format {
        OutputFormat::Json => println!("{}", output::to_json(envelope)),
        OutputFormat::Csv => print!("{}", output::to_flat_csv(envelope)),
        OutputFormat::Pretty => println!("{}", pretty()),
    }
}

#[derive(Serialize)]
struct PhaseInput {
    d: usize,
    phases_radians: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    input_port: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fock: Option<String>,
}

#[derive(Serialize)]
struct SimulateResult {
    amplitudes: Vec<Complex64>,
    probabilities: Vec<f64>,
    concurrence: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct SimulateResiduals {
    unitarity_defect: f64,
    max_exact_residual: f64,
}

fn cmd_simulate_single(
    lambda: &PhaseVector,
    port: usize,
    format: OutputFormat,
) -> Result<Outcome, Invalid> {
    let c = output_amplitudes(lambda, port)?;
    let u = interferometer(lambda);
    let cm = concurrence_matrix(&c);
    let max_exact = exact_condition_residuals(&c)
        .iter()
        .map(|r| r.norm())
        .fold(0.0, f64::max);
    let probabilities = c.probabilities().as_slice().to_vec();
    let d = lambda.dim();
    let envelope = Envelope {
        command: "simulate",
        input: PhaseInput {
            d,
            phases_radians: lambda.angles(),
            input_port: Some(port),
            fock: None,
        },
        result: SimulateResult {
            amplitudes: c.as_slice().to_vec(),
            probabilities: probabilities.clone(),
            concurrence: (0..d)
                .map(|m| (0..d).map(|n| cm.get(m, n)).collect())
                .collect(),
        },
        residuals: SimulateResiduals {
            unitarity_defect: u.unitarity_defect(),
            max_exact_residual: max_exact,
        },
        version: VERSION,
    };
    emit(&envelope, format, || {
        let mut lines = vec![format!("simulate: d = {d}, input port {port}")];
        for (m, (amp, p)) in c.as_slice().iter().zip(&probabilities).enumerate() {
            lines.push(format!(
                "  output {m}: amplitude {:+.9} {:+.9}i   P = {:.9}",
                amp.re, amp.im, p
            ));
        }
        lines.join("\n")
    });
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct FockResult {
    records: Vec<FockRecord>,
    probabilities: Vec<f64>,
}

#[derive(Serialize)]
struct FockResiduals {
    normalization_error: f64,
}

fn cmd_simulate_fock(
    lambda: &PhaseVector,
    input: FockState,
    max_photons: usize,
    format: OutputFormat,
) -> Result<Outcome, Invalid> {
    let v = transfer_matrix(lambda);
    let fv = propagate_with_limit(&input, &v, max_photons)?;
    let probabilities = fv.probabilities();
    let norm_err = (probabilities.iter().sum::<f64>() - 1.0).abs();
    let records = fv.records();
    let envelope = Envelope {
        command: "simulate",
        input: PhaseInput {
            d: lambda.dim(),
            phases_radians: lambda.angles(),
            input_port: None,
            fock: Some(input.label()),
        },
        result: FockResult {
            records,
            probabilities: probabilities.clone(),
        },
        residuals: FockResiduals {
            normalization_error: norm_err,
        },
        version: VERSION,
    };
    emit(&envelope, format, || {
        let mut lines = vec![format!(
            "simulate: d = {}, Fock input |{}>",
            lambda.dim(),
            input.label()
        )];
        for (state, p) in fv.basis().iter().zip(&probabilities) {
            lines.push(format!("  |{}>  P = {:.9}", state.label(), p));
        }
        lines.join("\n")
    });
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct CheckInput {
    d: usize,
    target: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    variant: Option<&'static str>,
}

#[derive(Serialize)]
struct ReportResiduals {
    #[serde(skip_serializing_if = "Option::is_none")]
    max_exact_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_polygon_margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_product_deviation: Option<f64>,
}

fn report_residuals(report: &FeasibilityReport) -> ReportResiduals {
    ReportResiduals {
        max_exact_residual: report
            .exact_residuals
            .iter()
            .map(|r| r.norm())
            .max_by(f64::total_cmp),
        min_polygon_margin: report.min_polygon_margin(),
        max_product_deviation: report
            .product_margins
            .iter()
            .map(|m| m.deviation.abs())
            .max_by(f64::total_cmp),
    }
}

fn verdict_outcome(report: &FeasibilityReport) -> Outcome {
    if report.is_rejected() {
        Outcome::Infeasible
    } else {
        Outcome::Ok
    }
}

fn pretty_report(header: String, report: &FeasibilityReport) -> String {
    let verdict = match report.verdict {
        Verdict::Feasible => "feasible",
        Verdict::Infeasible => "infeasible",
        Verdict::NecessaryPassed => "necessary-passed",
    };
    let mut lines = vec![header, format!("  verdict: {verdict}")];
    if let Some(margin) = report.min_polygon_margin() {
        lines.push(format!("  min polygon margin: {margin:.3e}"));
    }
    if let Some(lambda) = &report.phases {
        let angles: Vec<String> = lambda.angles().iter().map(|a| format!("{a:.9}")).collect();
        lines.push(format!("  phases [rad]: {}", angles.join(", ")));
    }
    lines.push(format!("  notes: {}", report.notes));
    lines.join("\n")
}

fn cmd_check_distribution(
    target: &ProbabilityDistribution,
    eps: f64,
    format: OutputFormat,
) -> Result<Outcome, Invalid> {
    let report = check_single_photon_distribution(target, eps)?;
    let envelope = Envelope {
        command: "check",
        input: CheckInput {
            d: target.len(),
            target: target.as_slice().to_vec(),
            variant: None,
        },
        result: &report,
        residuals: report_residuals(&report),
        version: VERSION,
    };
    emit(&envelope, format, || {
        pretty_report(format!("check: d = {}", target.len()), &report)
    });
    Ok(verdict_outcome(&report))
}

#[derive(Serialize)]
struct TwoModesInput {
    d: usize,
    modes: [usize; 2],
}

#[derive(Serialize)]
struct TwoModesResult {
    possible: bool,
}

#[derive(Serialize)]
struct NoResiduals {}

fn cmd_check_two_modes(
    d: usize,
    modes: &str,
    format: OutputFormat,
) -> Result<Outcome, Invalid> {
    let parsed = parse::parse_occupations(modes)?;
    if parsed.len() != 2 {
        return Err(Invalid("--two-modes expects exactly two mode indices".into()));
    }
    let (a, b) = (parsed[0], parsed[1]);
    let possible = two_mode_only_possible(Dimension::new(d)?, a, b)?;
    let envelope = Envelope {
        command: "check",
        input: TwoModesInput { d, modes: [a, b] },
        result: TwoModesResult { possible },
        residuals: NoResiduals {},
        version: VERSION,
    };
    emit(&envelope, format, || {
        format!(
            "check: entangling exactly modes {a} and {b} of {d} is {}",
            if possible { "possible" } else { "impossible" }
        )
    });
    Ok(if possible { Outcome::Ok } else { Outcome::Infeasible })
}

fn cmd_two_photon(
    command: &'static str,
    target: &ProbabilityDistribution,
    same_port: bool,
    eps: f64,
    format: OutputFormat,
) -> Result<Outcome, Invalid> {
    let report = if same_port {
        two_photon_same_port_conditions(target, eps)?
    } else {
        two_photon_two_port_conditions(target, eps)?
    };
    let variant = if same_port {
        "two-photon-same-port"
    } else {
        "two-photon-two-port"
    };
    let envelope = Envelope {
        command,
        input: CheckInput {
            d: 3,
            target: target.as_slice().to_vec(),
            variant: Some(variant),
        },
        result: &report,
        residuals: report_residuals(&report),
        version: VERSION,
    };
    emit(&envelope, format, || {
        pretty_report(format!("{command}: {variant}"), &report)
    });
    Ok(verdict_outcome(&report))
}

#[derive(Serialize)]
struct SynthesizeInput {
    d: usize,
    target: Vec<f64>,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    search: Option<SearchConfig>,
}

#[derive(Serialize)]
struct SynthesizeResult {
    outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<SynthesisMethod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phases_radians: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    phases_complex: Option<Vec<Complex64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    achieved_probabilities: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<FeasibilityReport>,
}

#[derive(Serialize)]
struct SynthesizeResiduals {
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    min_polygon_margin: Option<f64>,
}

fn cmd_synthesize(
    target: &ProbabilityDistribution,
    method: MethodChoice,
    eps: f64,
    search: &SearchConfig,
    format: OutputFormat,
) -> Result<Outcome, Invalid> {
    let use_closed_form = match method {
        MethodChoice::Auto => target.len() == 3,
        MethodChoice::ClosedForm => {
            if target.len() != 3 {
                return Err(Invalid("--method closed-form requires a 3-entry target".into()));
            }
            true
        }
        MethodChoice::Search => false,
    };
    let outcome = if use_closed_form {
        synthesize_three_port(target, eps)?
    } else {
        synthesize_search(target, search)?
    };
    let method_name = if use_closed_form { "closed-form" } else { "search" };

    let (result, exit, pretty_text) = match &outcome {
        SynthesisOutcome::Success(res) => (
            SynthesizeResult {
                outcome: "success",
                method: Some(res.method),
                phases_radians: Some(res.lambda.angles()),
                phases_complex: Some(res.lambda.as_slice().to_vec()),
                residual: Some(res.residual),
                achieved_probabilities: Some(res.achieved.probabilities().as_slice().to_vec()),
                report: None,
            },
            Outcome::Ok,
            {
                let angles: Vec<String> =
                    res.lambda.angles().iter().map(|a| format!("{a:.9}")).collect();
                format!(
                    "synthesize: success ({method_name})\n  phases [rad]: {}\n  residual: {:.3e}",
                    angles.join(", "),
                    res.residual
                )
            },
        ),
        SynthesisOutcome::Infeasible(report) => (
            SynthesizeResult {
                outcome: "infeasible",
                method: None,
                phases_radians: None,
                phases_complex: None,
                residual: None,
                achieved_probabilities: None,
                report: Some(report.clone()),
            },
            Outcome::Infeasible,
            pretty_report("synthesize: infeasible".into(), report),
        ),
        SynthesisOutcome::NotFound(best) => (
            SynthesizeResult {
                outcome: "not-found",
                method: Some(best.method),
                phases_radians: Some(best.lambda.angles()),
                phases_complex: Some(best.lambda.as_slice().to_vec()),
                residual: Some(best.residual),
                achieved_probabilities: Some(best.achieved.probabilities().as_slice().to_vec()),
                report: None,
            },
            Outcome::NotFound,
            format!(
                "synthesize: not-found (best residual {:.3e} over {} restarts, seed {}); not a proof of infeasibility",
                best.residual, search.restarts, search.seed
            ),
        ),
    };
    let residuals = SynthesizeResiduals {
        residual: result.residual,
        min_polygon_margin: result
            .report
            .as_ref()
            .and_then(|r| r.min_polygon_margin()),
    };
    let envelope = Envelope {
        command: "synthesize",
        input: SynthesizeInput {
            d: target.len(),
            target: target.as_slice().to_vec(),
            method: method_name,
            search: if use_closed_form { None } else { Some(*search) },
        },
        result,
        residuals,
        version: VERSION,
    };
    emit(&envelope, format, || pretty_text);
    Ok(exit)
}

struct SweepParams {
    kind: SweepKind,
    d: Option<usize>,
    step: Option<f64>,
    resolution: usize,
    component_tol: f64,
    cap: usize,
    output: Option<PathBuf>,
}

#[derive(Serialize)]
struct SweepInput {
    kind: &'static str,
    d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    resolution: Option<usize>,
    search: SearchConfig,
}

fn cmd_sweep(
    params: SweepParams,
    search: &SearchConfig,
    eps: f64,
    format: OutputFormat,
) -> Result<Outcome, Invalid> {
    let (csv, json_rows, input, summary) = match params.kind {
        SweepKind::Simplex => {
            let step = params.step.unwrap_or(0.02);
            let points = multiport::sweep::simplex_grid_len(3, step)?;
            check_cap(points, params.cap)?;
            let rows = multiport::sweep::sweep_simplex_three_port(step, search, eps)?;
            let mut csv = String::from(
                "p0,p1,p2,triangle_passed,closed_form_feasible,closed_form_residual,search_found,search_residual,agree\n",
            );
            for row in &rows {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    output::fmt_float(row.target[0]),
                    output::fmt_float(row.target[1]),
                    output::fmt_float(row.target[2]),
                    row.triangle_passed,
                    row.closed_form_feasible,
                    row.closed_form_residual.map(output::fmt_float).unwrap_or_default(),
                    row.search_found,
                    row.search_residual.map(output::fmt_float).unwrap_or_default(),
                    row.agree,
                ));
            }
            let agree = rows.iter().filter(|r| r.agree).count();
            let summary = format!(
                "simplex sweep: {} points, verdicts agree at {agree}",
                rows.len()
            );
            (
                csv,
                serde_json::to_value(&rows).expect("rows serialize"),
                SweepInput {
                    kind: "simplex",
                    d: 3,
                    step: Some(step),
                    resolution: None,
                    search: *search,
                },
                summary,
            )
        }
        SweepKind::PhaseGrid => {
            let resolution = params.resolution;
            check_cap(resolution.saturating_mul(resolution), params.cap)?;
            let rows =
                multiport::sweep::sweep_phase_grid_three_port(resolution, params.component_tol)?;
            let mut csv = String::from("theta1,theta2,c0,c1,c2,above,below,two_mode_pattern\n");
            for row in &rows {
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    output::fmt_float(row.theta1),
                    output::fmt_float(row.theta2),
                    output::fmt_float(row.magnitudes[0]),
                    output::fmt_float(row.magnitudes[1]),
                    output::fmt_float(row.magnitudes[2]),
                    row.above,
                    row.below,
                    row.two_mode_pattern,
                ));
            }
            let hits = rows.iter().filter(|r| r.two_mode_pattern).count();
            let summary = format!(
                "phase-grid sweep: {} points, {hits} rows show the two-mode pattern",
                rows.len()
            );
            (
                csv,
                serde_json::to_value(&rows).expect("rows serialize"),
                SweepInput {
                    kind: "phase-grid",
                    d: 3,
                    step: None,
                    resolution: Some(resolution),
                    search: *search,
                },
                summary,
            )
        }
        SweepKind::Magnitude => {
            let d = params.d.unwrap_or(4);
            let step = params.step.unwrap_or(0.1);
            let points = multiport::sweep::simplex_grid_len(d, step)?;
            check_cap(points, params.cap)?;
            let rows = multiport::sweep::sweep_magnitude(d, step, search)?;
            let mut header: Vec<String> = (0..d).map(|i| format!("p{i}")).collect();
            header.extend(
                ["polygon_passed", "search_found", "search_residual"]
                    .iter()
                    .map(|s| s.to_string()),
            );
            let mut csv = header.join(",") + "\n";
            for row in &rows {
                let mut fields: Vec<String> =
                    row.target.iter().map(|&p| output::fmt_float(p)).collect();
                fields.push(row.polygon_passed.to_string());
                fields.push(row.search_found.to_string());
                fields.push(row.search_residual.map(output::fmt_float).unwrap_or_default());
                csv.push_str(&(fields.join(",") + "\n"));
            }
            let evidence = rows
                .iter()
                .filter(|r| r.is_sufficiency_gap_evidence(1e-4))
                .count();
            let summary = format!(
                "magnitude sweep: {} points, {evidence} polygon-passing points with search residual > 1e-4 (seed {}, {} restarts)",
                rows.len(),
                search.seed,
                search.restarts
            );
            (
                csv,
                serde_json::to_value(&rows).expect("rows serialize"),
                SweepInput {
                    kind: "magnitude",
                    d,
                    step: Some(step),
                    resolution: None,
                    search: *search,
                },
                summary,
            )
        }
    };

    match format {
        OutputFormat::Csv => {
            if let Some(path) = &params.output {
                std::fs::write(path, &csv)
                    .map_err(|e| Invalid(format!("cannot write {}: {e}", path.display())))?;
                eprintln!("{summary}");
            } else {
                print!("{csv}");
            }
        }
        OutputFormat::Json => {
            let envelope = Envelope {
                command: "sweep",
                input,
                result: json_rows,
                residuals: NoResiduals {},
                version: VERSION,
            };
            let rendered = output::to_json(&envelope);
            if let Some(path) = &params.output {
                std::fs::write(path, rendered.as_bytes())
                    .map_err(|e| Invalid(format!("cannot write {}: {e}", path.display())))?;
                eprintln!("{summary}");
            } else {
                println!("{rendered}");
            }
        }
        OutputFormat::Pretty => println!("{summary}"),
    }
    Ok(Outcome::Ok)
}

fn check_cap(points: usize, cap: usize) -> Result<(), Invalid> {
    if points > cap {
        return Err(Invalid(format!(
            "sweep grid of {points} points exceeds the cap of {cap}; raise --cap to proceed"
        )));
    }
    Ok(())
}
