//! Command-line front end. Every subcommand writes a deterministic data file
//! (CSV or key-sorted JSON) and, when `--out` is given, a run manifest next
//! to it.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::fock::{four_photon_state, ghz_epr_decompose};
use crate::io::{self, fmt_num, rational_string, rational_to_f64, RunManifest};
use crate::mode::{hv_label, Mode};
use crate::polarimetry::{
    correlation_scan, fit_sinusoid, fringe_scan_linear, sample_counts, sample_multinomial,
    uniform_grid, CurveKind, FitResult, FringeCurve, Phases,
};
use crate::qccs::{
    self, average_exact, promise_inputs, run_protocol_trials, score_strategy, table_one,
    ClassicalBound, LowBits, QccsInputs, RuleOptimum, Scoring, TableOptions,
};
use crate::state::{mix_with_white_noise, ExactState, Measurable, MeasurementBasis, NoisyState};

#[derive(Debug, Parser)]
#[command(name = "fourphoton", version, about = "Four-photon entangled state and four-party protocol simulator")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct GlobalArgs {
    /// RNG seed for all sampling [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Monte Carlo events per distribution, point or case; 0 = analytic only [default: 0]
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Weight of the pure state in the white-noise mixture, in [0, 1] [default: 1]
    #[arg(long, global = true)]
    pub noise: Option<f64>,
    /// Output data file; a manifest is written alongside. Stdout if omitted
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format [default: csv, or json for `state`]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Flat JSON config file; command-line flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Reject promise-violating protocol inputs [default: true]
    #[arg(long, global = true)]
    pub strict_promise: Option<bool>,
    /// Worker threads for parallel sections [default: all cores]
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Fourphoton,
    TwoEpr,
}

#[derive(Debug, Args, Default, Clone)]
pub struct GridArgs {
    /// First angle, radians
    #[arg(long)]
    pub start: Option<f64>,
    /// End of the half-open angle range, radians
    #[arg(long)]
    pub stop: Option<f64>,
    /// Number of grid points (at least 4)
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derived four-photon state, post-selection weight and GHZ/EPR overlaps
    State,
    /// Sixteen-outcome coincidence distribution in one analyzer setting
    Coincidences {
        /// hv, pm, or custom (requires --phases)
        #[arg(long)]
        basis: Option<String>,
        /// Four analyzer phases for modes c,d,e,f (custom basis)
        #[arg(long)]
        phases: Option<String>,
    },
    /// Four-fold probability versus the linear analyzer angle in mode f
    Fringe {
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Correlation function versus one analyzer phase
    CorrelationScan {
        /// Mode whose phase is varied
        #[arg(long)]
        mode: Option<String>,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Protocol success probabilities per low-bit case
    Qccs {
        /// Low-bit pattern such as 0011, or "all"
        #[arg(long)]
        case: Option<String>,
        #[arg(long, value_enum)]
        source: Option<Source>,
        /// Full inputs X,Y,Z,K; runs the protocol round by round
        #[arg(long)]
        inputs: Option<String>,
    },
    /// Exhaustive search for the best classical one-bit broadcast strategy
    ClassicalBound {
        /// Headline scoring rule: all-correct or worst-party
        #[arg(long)]
        scoring: Option<String>,
        /// Comma-separated low-bit patterns to restrict the input set
        #[arg(long)]
        restrict: Option<String>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::State => "state",
            Command::Coincidences { .. } => "coincidences",
            Command::Fringe { .. } => "fringe",
            Command::CorrelationScan { .. } => "correlation-scan",
            Command::Qccs { .. } => "qccs",
            Command::ClassicalBound { .. } => "classical-bound",
        }
    }
}

/// Flat config file; keys match the long flag names.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub noise: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub strict_promise: Option<bool>,
    pub workers: Option<usize>,
    pub basis: Option<String>,
    pub phases: Option<String>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
    pub mode: Option<String>,
    pub case: Option<String>,
    pub source: Option<Source>,
    pub inputs: Option<String>,
    pub scoring: Option<String>,
    pub restrict: Option<String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Fully resolved settings for one run, echoed into the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub seed: u64,
    pub trials: u64,
    pub noise_weight: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub strict_promise: bool,
    pub workers: Option<usize>,
    pub basis: Option<String>,
    pub phases: Option<String>,
    pub grid: Option<GridSpec>,
    pub mode: Option<String>,
    pub case: Option<String>,
    pub source: Option<Source>,
    pub inputs: Option<String>,
    pub scoring: Option<String>,
    pub restrict: Option<String>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl GridSpec {
    fn angles(&self) -> Result<Vec<f64>> {
        if self.points < crate::polarimetry::MIN_FIT_POINTS {
            return Err(Error::GridTooSmall {
                points: self.points,
                min: crate::polarimetry::MIN_FIT_POINTS,
            });
        }
        uniform_grid(self.start, self.stop, self.points)
    }
}

fn pick<T: Clone>(cli: &Option<T>, file: &Option<T>) -> Option<T> {
    cli.clone().or_else(|| file.clone())
}

fn grid(args: &GridArgs, file: &ConfigFile, default_stop: f64) -> GridSpec {
    GridSpec {
        start: pick(&args.start, &file.start).unwrap_or(0.0),
        stop: pick(&args.stop, &file.stop).unwrap_or(default_stop),
        points: pick(&args.points, &file.points).unwrap_or(24),
    }
}

impl RunConfig {
    /// Flags over config file over built-in defaults.
    pub fn resolve(cli: &Cli, file: &ConfigFile) -> Result<Self> {
        let name = cli.command.name();
        if let Some(c) = &file.command {
            if c != name {
                return Err(Error::InvalidArgument(format!(
                    "config file is for command '{c}', not '{name}'"
                )));
            }
        }
        let g = &cli.global;
        let default_format = match cli.command {
            Command::State | Command::ClassicalBound { .. } => Format::Json,
            _ => Format::Csv,
        };
        let noise_weight = pick(&g.noise, &file.noise).unwrap_or(1.0);
        if !(0.0..=1.0).contains(&noise_weight) {
            return Err(Error::WeightOutOfRange(noise_weight));
        }
        let mut cfg = RunConfig {
            command: name.to_string(),
            seed: pick(&g.seed, &file.seed).unwrap_or(0),
            trials: pick(&g.trials, &file.trials).unwrap_or(0),
            noise_weight,
            out: pick(&g.out, &file.out),
            format: pick(&g.format, &file.format).unwrap_or(default_format),
            strict_promise: pick(&g.strict_promise, &file.strict_promise).unwrap_or(true),
            workers: pick(&g.workers, &file.workers),
            basis: None,
            phases: None,
            grid: None,
            mode: None,
            case: None,
            source: None,
            inputs: None,
            scoring: None,
            restrict: None,
        };
        match &cli.command {
            Command::State => {}
            Command::Coincidences { basis, phases } => {
                cfg.basis = Some(pick(basis, &file.basis).unwrap_or_else(|| "pm".into()));
                cfg.phases = pick(phases, &file.phases);
            }
            Command::Fringe { grid: args } => cfg.grid = Some(grid(args, file, PI)),
            Command::CorrelationScan { mode, grid: args } => {
                cfg.mode = Some(pick(mode, &file.mode).unwrap_or_else(|| "c".into()));
                cfg.grid = Some(grid(args, file, 2.0 * PI));
            }
            Command::Qccs {
                case,
                source,
                inputs,
            } => {
                cfg.case = Some(pick(case, &file.case).unwrap_or_else(|| "all".into()));
                cfg.source = Some(pick(source, &file.source).unwrap_or(Source::Fourphoton));
                cfg.inputs = pick(inputs, &file.inputs);
            }
            Command::ClassicalBound { scoring, restrict } => {
                cfg.scoring =
                    Some(pick(scoring, &file.scoring).unwrap_or_else(|| "all-correct".into()));
                cfg.restrict = pick(restrict, &file.restrict);
            }
        }
        Ok(cfg)
    }
}

/// One rendered artifact: a file-name suffix (None for the primary file) and its text.
pub struct Artifact {
    pub suffix: Option<&'static str>,
    pub contents: String,
}

impl Artifact {
    fn primary(contents: String) -> Self {
        Artifact {
            suffix: None,
            contents,
        }
    }
}

fn parse_list<T, F>(s: &str, what: &str, parse: F) -> Result<Vec<T>>
where
    F: Fn(&str) -> Option<T>,
{
    s.split(',')
        .map(|part| {
            parse(part.trim())
                .ok_or_else(|| Error::InvalidArgument(format!("malformed {what} '{part}'")))
        })
        .collect()
}

fn noisy(state: &ExactState, weight: f64) -> Result<NoisyState> {
    mix_with_white_noise(&state.to_pure(), weight)
}

fn exact_source(source: Source) -> ExactState {
    match source {
        Source::Fourphoton => four_photon_state().exact,
        Source::TwoEpr => qccs::two_epr_exact(),
    }
}

fn cmd_state(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let ps = four_photon_state();
    let dec = ghz_epr_decompose(&ps.state)?;
    let n = ps.state.num_qubits();
    let rows: Vec<_> = ps
        .state
        .amplitudes()
        .iter()
        .zip(ps.exact.amplitudes())
        .enumerate()
        .map(|(i, (a, e))| (hv_label(i, n), *a, e.to_string()))
        .collect();
    let weight = ps
        .weight
        .to_rational()
        .expect("post-selection weight is rational");
    let norm = ps.exact.norm_sqr().to_rational().expect("rational norm");
    match cfg.format {
        Format::Json => {
            let amplitudes: Vec<_> = rows
                .iter()
                .filter(|(_, a, _)| a.norm() > 0.0)
                .map(|(label, a, exact)| {
                    json!({
                        "outcome": label,
                        "re": a.re,
                        "im": a.im,
                        "probability": a.norm_sqr(),
                        "unnormalized": exact,
                    })
                })
                .collect();
            let doc = json!({
                "modes": ps.state.modes().iter().map(|m| m.name()).collect::<Vec<_>>(),
                "amplitudes": amplitudes,
                "norm_sqr_unnormalized": rational_string(&norm),
                "postselection_weight": rational_string(&weight),
                "postselection_weight_float": rational_to_f64(&weight),
                "overlaps": {
                    "ghz": dec.ghz.re,
                    "epr": dec.epr.re,
                    "ghz_abs": dec.ghz.norm(),
                    "epr_abs": dec.epr.norm(),
                    "residual": dec.residual,
                },
            });
            Ok(vec![Artifact::primary(io::to_sorted_json(&doc)?)])
        }
        Format::Csv => {
            let body: Vec<Vec<String>> = rows
                .iter()
                .map(|(label, a, exact)| {
                    vec![
                        label.clone(),
                        fmt_num(a.re),
                        fmt_num(a.im),
                        fmt_num(a.norm_sqr()),
                        exact.clone(),
                    ]
                })
                .collect();
            let csv = io::csv_string(&["outcome", "re", "im", "probability", "unnormalized"], &body)?;
            let overlaps = io::to_sorted_json(&json!({
                "ghz": dec.ghz.re,
                "epr": dec.epr.re,
                "residual": dec.residual,
                "postselection_weight": rational_string(&weight),
            }))?;
            Ok(vec![
                Artifact::primary(csv),
                Artifact {
                    suffix: Some("overlaps.json"),
                    contents: overlaps,
                },
            ])
        }
    }
}

fn parse_phases(s: &str) -> Result<Phases> {
    let v = parse_list(s, "phase", |p| p.parse::<f64>().ok().filter(|x| x.is_finite()))?;
    if v.len() != 4 {
        return Err(Error::InvalidArgument(format!(
            "custom basis needs four phases for c,d,e,f, got {}",
            v.len()
        )));
    }
    Ok(Phases {
        c: v[0],
        d: v[1],
        e: v[2],
        f: v[3],
    })
}

fn cmd_coincidences(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let basis = cfg.basis.as_deref().unwrap_or("pm");
    let state = noisy(&four_photon_state().exact, cfg.noise_weight)?;
    let modes = state.modes().to_vec();
    let n = modes.len();
    let (bases, label): (Vec<MeasurementBasis>, Box<dyn Fn(usize) -> String>) = match basis {
        "hv" => (
            vec![MeasurementBasis::computational(); n],
            Box::new(move |i| hv_label(i, n)),
        ),
        "pm" => (
            vec![MeasurementBasis::diagonal(); n],
            Box::new(move |i| hv_label(i, n).replace('H', "+").replace('V', "-")),
        ),
        "custom" => {
            let phases = cfg.phases.as_deref().ok_or_else(|| {
                Error::InvalidArgument("custom basis requires --phases".into())
            })?;
            (
                parse_phases(phases)?.bases_for(&modes)?,
                Box::new(move |i| hv_label(i, n).replace('H', "+").replace('V', "-")),
            )
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown basis '{other}', expected hv, pm or custom"
            )))
        }
    };
    let dist = state.born_distribution(&bases)?;
    let sample = (cfg.trials > 0).then(|| sample_counts(&dist, cfg.trials, cfg.seed));
    match cfg.format {
        Format::Csv => Ok(vec![Artifact::primary(io::csv_string(
            &io::CURVE_HEADER,
            &io::distribution_rows(&dist, sample.as_ref(), label),
        )?)]),
        Format::Json => {
            let rows: Vec<_> = dist
                .probabilities()
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    json!({
                        "outcome": label(i),
                        "probability": p,
                        "count": sample.as_ref().map(|s| s.counts[i]),
                        "std_error": sample.as_ref().map(|s| s.std_errors[i]),
                    })
                })
                .collect();
            let doc = json!({
                "basis": basis,
                "modes": modes.iter().map(|m| m.name()).collect::<Vec<_>>(),
                "noise_weight": cfg.noise_weight,
                "parity_expectation": dist.parity_expectation(),
                "rows": rows,
                "trials": cfg.trials,
            });
            Ok(vec![Artifact::primary(io::to_sorted_json(&doc)?)])
        }
    }
}

/// Per-point binomial counts for a probability curve, or E estimates from
/// multinomial counts for a correlation curve.
fn sample_curve<S: Measurable>(
    curve: &mut FringeCurve,
    state: &S,
    phases_for: impl Fn(f64) -> Result<Phases>,
    trials: u64,
    seed: u64,
) -> Result<FringeCurve> {
    let mut counts = Vec::with_capacity(curve.len());
    let mut errors = Vec::with_capacity(curve.len());
    let mut estimates = Vec::with_capacity(curve.len());
    for (i, (&angle, &value)) in curve.angles.iter().zip(&curve.values).enumerate() {
        let point_seed = qccs::case_seed(seed, i);
        match curve.kind {
            CurveKind::Probability => {
                let c = sample_multinomial(&[value, 1.0 - value], trials, point_seed)[0];
                counts.push(c);
                errors.push((c as f64).sqrt());
                estimates.push(c as f64 / trials as f64);
            }
            CurveKind::Correlation => {
                let phases = phases_for(angle)?;
                let dist = state.born_distribution(&phases.bases_for(state.modes())?)?;
                let sample = sample_counts(&dist, trials, point_seed);
                let e: f64 = sample
                    .counts
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| if k.count_ones() % 2 == 0 { c as f64 } else { -(c as f64) })
                    .sum::<f64>()
                    / trials as f64;
                counts.push(trials);
                errors.push(((1.0 - e * e).max(0.0) / trials as f64).sqrt());
                estimates.push(e);
            }
        }
    }
    curve.counts = Some(counts);
    curve.errors = Some(errors);
    FringeCurve::new(curve.kind, curve.angles.clone(), estimates)
}

fn curve_artifacts(
    cfg: &RunConfig,
    curve: &FringeCurve,
    fit: &FitResult,
    sampled_fit: Option<&FitResult>,
    extra: serde_json::Value,
) -> Result<Vec<Artifact>> {
    let fit_doc = json!({
        "fit": fit,
        "fit_sampled": sampled_fit,
        "context": extra,
    });
    match cfg.format {
        Format::Csv => Ok(vec![
            Artifact::primary(io::csv_string(&io::CURVE_HEADER, &io::curve_rows(curve))?),
            Artifact {
                suffix: Some("fit.json"),
                contents: io::to_sorted_json(&fit_doc)?,
            },
        ]),
        Format::Json => {
            let doc = json!({
                "curve": curve,
                "fit": fit,
                "fit_sampled": sampled_fit,
                "context": extra,
            });
            Ok(vec![Artifact::primary(io::to_sorted_json(&doc)?)])
        }
    }
}

fn cmd_fringe(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let spec = cfg.grid.expect("resolved grid");
    let angles = spec.angles()?;
    let state = noisy(&four_photon_state().exact, cfg.noise_weight)?;
    let mut curve = fringe_scan_linear(&state, &angles)?;
    let fit = fit_sinusoid(&curve, 2)?;
    let sampled_fit = if cfg.trials > 0 {
        let sampled = sample_curve(&mut curve, &state, |_| Ok(Phases::zero()), cfg.trials, cfg.seed)?;
        Some(fit_sinusoid(&sampled, 2)?)
    } else {
        None
    };
    let v = cfg.noise_weight;
    let extra = json!({
        "harmonic": 2,
        "noise_weight": v,
        "visibility_closed_form": (v / 6.0) / (v / 6.0 + (1.0 - v) / 16.0),
    });
    curve_artifacts(cfg, &curve, &fit, sampled_fit.as_ref(), extra)
}

fn cmd_correlation_scan(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let spec = cfg.grid.expect("resolved grid");
    let angles = spec.angles()?;
    let mode: Mode = cfg.mode.as_deref().unwrap_or("c").parse()?;
    let state = noisy(&four_photon_state().exact, cfg.noise_weight)?;
    let mut curve = correlation_scan(&state, mode, &angles)?;
    let fit = fit_sinusoid(&curve, 1)?;
    let sampled_fit = if cfg.trials > 0 {
        let sampled = sample_curve(
            &mut curve,
            &state,
            |phi| Phases::zero().with(mode, phi),
            cfg.trials,
            cfg.seed,
        )?;
        Some(fit_sinusoid(&sampled, 1)?)
    } else {
        None
    };
    let extra = json!({
        "harmonic": 1,
        "mode": mode.name(),
        "noise_weight": cfg.noise_weight,
        "correlation_at_zero": crate::polarimetry::correlation(&state, &Phases::zero())?,
    });
    curve_artifacts(cfg, &curve, &fit, sampled_fit.as_ref(), extra)
}

fn parse_inputs(s: &str) -> Result<[u8; 4]> {
    let v = parse_list(s, "input", |p| p.parse::<u8>().ok())?;
    <[u8; 4]>::try_from(v)
        .map_err(|_| Error::InvalidArgument("--inputs takes four values X,Y,Z,K".into()))
}

fn cmd_qccs(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let source = cfg.source.unwrap_or(Source::Fourphoton);
    let exact = exact_source(source);
    if let Some(inputs) = &cfg.inputs {
        return qccs_inputs_run(cfg, &exact, parse_inputs(inputs)?);
    }
    let opts = TableOptions {
        noise_weight: cfg.noise_weight,
        trials: cfg.trials,
        seed: cfg.seed,
    };
    let case = cfg.case.as_deref().unwrap_or("all");
    let reports = if case == "all" {
        table_one(&exact, &opts)?
    } else {
        let low: LowBits = case.parse()?;
        qccs::f0(low)?;
        let index = LowBits::TABLE_ORDER
            .iter()
            .position(|l| *l == low)
            .expect("even patterns are in the table");
        vec![qccs::case_report(low, &exact, &opts, index)?]
    };
    let avg = average_exact(&reports);
    let avg_model = reports.iter().map(|r| r.p_model).sum::<f64>() / reports.len() as f64;
    let mc = reports
        .iter()
        .filter_map(|r| r.monte_carlo.as_ref())
        .collect::<Vec<_>>();
    let (mc_rate, mc_err) = if mc.len() == reports.len() && !mc.is_empty() {
        let trials: u64 = mc.iter().map(|m| m.trials).sum();
        let successes: u64 = mc.iter().map(|m| m.successes).sum();
        let rate = successes as f64 / trials as f64;
        (Some(rate), Some(crate::polarimetry::binomial_std_error(rate, trials)))
    } else {
        (None, None)
    };
    match cfg.format {
        Format::Csv => {
            let mut rows = io::case_rows(&reports);
            if case == "all" {
                rows.push(vec![
                    "average".into(),
                    String::new(),
                    String::new(),
                    avg.numer().to_string(),
                    avg.denom().to_string(),
                    fmt_num(rational_to_f64(&avg)),
                    fmt_num(avg_model),
                    mc_rate.map(fmt_num).unwrap_or_default(),
                    mc_err.map(fmt_num).unwrap_or_default(),
                ]);
            }
            Ok(vec![Artifact::primary(io::csv_string(&io::CASE_HEADER, &rows)?)])
        }
        Format::Json => {
            let doc = json!({
                "source": source,
                "noise_weight": cfg.noise_weight,
                "trials_per_case": cfg.trials,
                "cases": reports,
                "average": {
                    "p_exact": rational_string(&avg),
                    "p_exact_float": rational_to_f64(&avg),
                    "p_model": avg_model,
                    "p_mc": mc_rate,
                    "p_mc_err": mc_err,
                },
            });
            Ok(vec![Artifact::primary(io::to_sorted_json(&doc)?)])
        }
    }
}

fn qccs_inputs_run(cfg: &RunConfig, exact: &ExactState, values: [u8; 4]) -> Result<Vec<Artifact>> {
    let inputs = QccsInputs::new(values)?;
    if !qccs::promise_holds(&inputs) {
        if cfg.strict_promise {
            return Err(Error::PromiseViolated { sum: inputs.sum() });
        }
        let doc = json!({ "inputs": values, "promise_holds": false });
        return Ok(vec![Artifact::primary(io::to_sorted_json(&doc)?)]);
    }
    let state = noisy(exact, cfg.noise_weight)?;
    let trials = cfg.trials.max(1);
    let summary = run_protocol_trials(&inputs, &state, trials, cfg.seed)?;
    let (high, f0) = qccs::decompose_f(&inputs)?;
    let p_exact = qccs::quantum_success_probability(inputs.low_bits(), exact)?;
    match cfg.format {
        Format::Csv => {
            let rows: Vec<Vec<String>> = summary
                .records
                .iter()
                .enumerate()
                .map(|(t, r)| {
                    let bits = |b: [u8; 4]| b.iter().map(|x| x.to_string()).collect::<String>();
                    vec![
                        t.to_string(),
                        bits(r.measured),
                        bits(r.broadcasts),
                        r.decoded.to_string(),
                        (r.correct as u8).to_string(),
                    ]
                })
                .collect();
            Ok(vec![Artifact::primary(io::csv_string(
                &["trial", "measured", "broadcasts", "decoded", "correct"],
                &rows,
            )?)])
        }
        Format::Json => {
            let doc = json!({
                "inputs": values,
                "promise_holds": true,
                "target_f": qccs::target_f(&inputs)?,
                "high_xor": high,
                "f0": f0,
                "p_exact": rational_string(&p_exact),
                "p_model": qccs::noisy_success(rational_to_f64(&p_exact), cfg.noise_weight),
                "summary": summary,
            });
            Ok(vec![Artifact::primary(io::to_sorted_json(&doc)?)])
        }
    }
}

fn strategy_json(rule: &RuleOptimum, rescored: &BigRational) -> serde_json::Value {
    let w = &rule.witness;
    let broadcast: Vec<String> = (0..4)
        .map(|i| (0..4).map(|v| char::from(b'0' + w.broadcast_bit(i, v))).collect())
        .collect();
    let answers: Vec<String> = (0..4)
        .map(|i| {
            (0..32u32)
                .map(|c| char::from(b'0' + ((w.answers[i] >> c) & 1) as u8))
                .collect()
        })
        .collect();
    json!({
        "scoring": rule.scoring,
        "max_probability": rational_string(&rule.probability),
        "max_probability_float": rational_to_f64(&rule.probability),
        "correct": rule.correct,
        "inputs": rule.inputs,
        "combination": rule.combination,
        "witness_rescored": rational_string(rescored),
        "witness": {
            "broadcast_by_input_value": broadcast,
            "answers_by_cell": answers,
        },
    })
}

fn rescore(rule: &RuleOptimum, inputs: &[QccsInputs]) -> Result<BigRational> {
    let s = score_strategy(&rule.witness, inputs)?;
    let r = BigRational::new(s.count(rule.scoring).into(), (s.inputs as i64).into());
    if r != rule.probability {
        return Err(Error::InvalidArgument(format!(
            "witness re-scores to {} instead of {}",
            rational_string(&r),
            rational_string(&rule.probability)
        )));
    }
    Ok(r)
}

fn cmd_classical_bound(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let scoring: Scoring = cfg.scoring.as_deref().unwrap_or("all-correct").parse()?;
    let filter = cfg
        .restrict
        .as_deref()
        .map(|s| parse_list(s, "pattern", |p| p.parse::<LowBits>().ok()))
        .transpose()?;
    if let Some(f) = &filter {
        for low in f {
            qccs::f0(*low)?;
        }
    }
    let inputs = promise_inputs(filter.as_deref());
    let bound: ClassicalBound = qccs::classical_search(&inputs, 1024)?;
    let rescored_all = rescore(&bound.all_correct, &inputs)?;
    let rescored_worst = rescore(&bound.worst_party, &inputs)?;
    let headline = bound.rule(scoring);
    let restrict: Option<Vec<String>> =
        filter.map(|f| f.iter().map(|l| l.to_string()).collect());
    match cfg.format {
        Format::Json => {
            let doc = json!({
                "scoring": scoring,
                "max_probability": rational_string(&headline.probability),
                "max_probability_float": rational_to_f64(&headline.probability),
                "search_size": bound.combinations_visited,
                "inputs": inputs.len(),
                "restrict": restrict,
                "rules": {
                    "all-correct": strategy_json(&bound.all_correct, &rescored_all),
                    "worst-party": strategy_json(&bound.worst_party, &rescored_worst),
                },
            });
            Ok(vec![Artifact::primary(io::to_sorted_json(&doc)?)])
        }
        Format::Csv => {
            let row = |r: &RuleOptimum| {
                let w = &r.witness;
                let mut v = vec![
                    r.scoring.to_string(),
                    rational_string(&r.probability),
                    fmt_num(rational_to_f64(&r.probability)),
                    r.correct.to_string(),
                    r.inputs.to_string(),
                    r.combination.to_string(),
                    bound.combinations_visited.to_string(),
                ];
                v.extend((0..4).map(|i| {
                    (0..4)
                        .map(|x| char::from(b'0' + w.broadcast_bit(i, x)))
                        .collect::<String>()
                }));
                v
            };
            let rows = vec![row(&bound.all_correct), row(&bound.worst_party)];
            let header = [
                "scoring",
                "max_probability",
                "max_probability_float",
                "correct",
                "inputs",
                "combination",
                "search_size",
                "broadcast_a",
                "broadcast_b",
                "broadcast_c",
                "broadcast_d",
            ];
            Ok(vec![Artifact::primary(io::csv_string(&header, &rows)?)])
        }
    }
}

/// Renders every artifact for a resolved config without touching the filesystem.
pub fn render(cli: &Cli, cfg: &RunConfig) -> Result<Vec<Artifact>> {
    match &cli.command {
        Command::State => cmd_state(cfg),
        Command::Coincidences { .. } => cmd_coincidences(cfg),
        Command::Fringe { .. } => cmd_fringe(cfg),
        Command::CorrelationScan { .. } => cmd_correlation_scan(cfg),
        Command::Qccs { .. } => cmd_qccs(cfg),
        Command::ClassicalBound { .. } => cmd_classical_bound(cfg),
    }
}

/// Resolves the config, renders, and writes data files plus a manifest.
/// Returns the written paths, or prints to stdout when no `--out` is set.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>> {
    let started = Instant::now();
    let file = match &cli.global.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let cfg = RunConfig::resolve(cli, &file)?;
    let artifacts = match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .install(|| render(cli, &cfg))?,
        None => render(cli, &cfg)?,
    };
    let Some(out) = cfg.out.clone() else {
        for a in &artifacts {
            if a.suffix.is_none() {
                print!("{}", a.contents);
            } else {
                eprint!("{}", a.contents);
            }
        }
        return Ok(Vec::new());
    };
    let mut written = Vec::new();
    let mut pending = Vec::new();
    for a in &artifacts {
        let path = match a.suffix {
            None => out.clone(),
            Some(suffix) => io::sibling_path(&out, suffix),
        };
        io::write_file(&path, &a.contents)?;
        pending.push((path.clone(), a.contents.as_str()));
        written.push(path);
    }
    let mut manifest = RunManifest::new(&cfg, started.elapsed().as_secs_f64());
    for (path, contents) in pending {
        manifest.record(&path, contents);
    }
    let manifest_path = io::manifest_path(&out);
    io::write_file(&manifest_path, &io::to_sorted_json(&manifest)?)?;
    written.push(manifest_path);
    Ok(written)
}
