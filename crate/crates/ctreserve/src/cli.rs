//! The `ctreserve` command.
//!
//! ```text
//! ctreserve reserve   --dataset taylor_ashe
//! ctreserve bootstrap --dataset taylor_ashe --method ct --sims 100000 --seed 42
//! ctreserve compare   --file triangle.csv --sims 100000 --format json --out results/
//! ```

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ctreserve_core::analytics::{histogram, BinSpec};
use ctreserve_core::parametric::fit_parametric;
use ctreserve_core::{
    builtin_dataset, summarize, Bootstrap, BootstrapConfig, DevParams, Family, Method,
    NegativePolicy, ParametricReserve, Triangle, TsParamMode,
};

use crate::compare::{bootstrap_row_name, comparison_table, zero_mass_diagnostics, SummaryRow};
use crate::csv::parse_triangle;
use crate::parallel::run_parallel;
use crate::report::{
    samples_sha256, write_outputs, Diagnostics, Estimates, MethodHistogram, Report, RunManifest,
    SampleDigest, SimulationDiagnostics, Source, VERSION,
};
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "ctreserve", version, about = "Chain-ladder reserve risk with a continuous-time bootstrap")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Chain-ladder estimates, reserves and Mack's MSEP.
    Reserve {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Bootstrap distribution of the total reserve for one method.
    Bootstrap {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Ct)]
        method: MethodArg,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Mack Log-normal, Mack bootstrap, time-series and continuous-time side by side.
    Compare {
        #[command(flatten)]
        source: SourceArgs,
        #[command(flatten)]
        sim: SimArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SourceArgs {
    /// Built-in triangle: taylor_ashe or mortgage.
    #[arg(long)]
    pub dataset: Option<String>,
    /// Triangle CSV file.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Number of bootstrap replicates.
    #[arg(long, default_value_t = 100_000)]
    pub sims: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Treatment of negative projected cells in the Gaussian methods.
    #[arg(long, value_enum, default_value_t = NegPolicyArg::Zero)]
    pub neg_policy: NegPolicyArg,
    /// Parameter draw of the time-series method.
    #[arg(long, value_enum, default_value_t = TsModeArg::Direct)]
    pub ts_mode: TsModeArg,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Quantile probabilities, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.75, 0.95, 0.995])]
    pub probs: Vec<f64>,
    /// Histogram bin count.
    #[arg(long, default_value_t = 100)]
    pub bins: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Directory for report.json, summary.csv, histogram.csv and samples.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write raw samples (little-endian f64) into the output directory.
    #[arg(long)]
    pub emit_samples: bool,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Ct,
    Mack,
    Ts,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Ct => Method::ContinuousTime,
            MethodArg::Mack => Method::MackResidual,
            MethodArg::Ts => Method::TimeSeries,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NegPolicyArg {
    Zero,
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TsModeArg {
    Direct,
    Resample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl SimArgs {
    fn config(&self, method: Method) -> BootstrapConfig {
        BootstrapConfig {
            method,
            replicates: self.sims,
            seed: self.seed,
            neg_policy: match self.neg_policy {
                NegPolicyArg::Zero => NegativePolicy::ClampZero,
                NegPolicyArg::Drop => NegativePolicy::DropReplicate,
            },
            ts_param_mode: match self.ts_mode {
                TsModeArg::Direct => TsParamMode::Direct,
                TsModeArg::Resample => TsParamMode::Resample,
            },
        }
    }
}

impl OutputArgs {
    fn validate(&self) -> Result<(), Error> {
        if self.emit_samples && self.out.is_none() {
            return Err(Error::Config("--emit-samples needs --out DIR".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        if self.bins == 0 {
            return Err(Error::Config("--bins must be at least 1".into()));
        }
        if let Some(p) = self.probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::Config(format!("--probs value {p} is outside [0, 1]")));
        }
        Ok(())
    }
}

pub fn load_triangle(source: &SourceArgs) -> Result<(Triangle, Source), Error> {
    match (&source.dataset, &source.file) {
        (Some(name), _) => Ok((builtin_dataset(name)?, Source::Dataset(name.clone()))),
        (None, Some(path)) => {
            let shown = path.display().to_string();
            let text = std::fs::read_to_string(path)
                .map_err(|source| Error::Io { path: path.clone(), source })?;
            let label = path.file_stem().map_or(shown.clone(), |s| s.to_string_lossy().into_owned());
            let t = parse_triangle(&text, &label)
                .map_err(|source| Error::Input { path: shown.clone(), source })?;
            Ok((t, Source::File(shown)))
        }
        (None, None) => Err(Error::Config("one of --dataset or --file is required".into())),
    }
}

/// A finished command: its report and the raw samples per method.
pub struct Outcome {
    pub report: Report,
    pub samples: Vec<(String, Vec<f64>)>,
}

struct Base {
    estimates: Estimates,
    lognormal: ParametricReserve,
    gamma: ParametricReserve,
    params: DevParams,
}

fn base(t: &Triangle) -> Result<Base, Error> {
    let params = DevParams::estimate(t)?;
    let lognormal = fit_parametric(t, Family::Lognormal)?;
    let gamma = ParametricReserve::fit(lognormal.mu_r, lognormal.sigma2_r, Family::Gamma);
    Ok(Base { estimates: Estimates::new(t, &params), lognormal, gamma, params })
}

fn manifest(
    command: &str,
    source: Source,
    configs: Vec<BootstrapConfig>,
    output: &OutputArgs,
    started: Instant,
    samples: &[(String, Vec<f64>)],
) -> RunManifest {
    let simulated = !configs.is_empty();
    RunManifest {
        command: command.to_string(),
        source,
        seed: configs.first().map(|c| c.seed),
        configs,
        probs: output.probs.clone(),
        bins: simulated.then_some(output.bins),
        threads: output.threads,
        version: VERSION.to_string(),
        duration_secs: started.elapsed().as_secs_f64(),
        samples: samples
            .iter()
            .map(|(method, s)| SampleDigest {
                method: method.clone(),
                count: s.len(),
                sha256: samples_sha256(s),
            })
            .collect(),
    }
}

/// Runs a parsed command without printing anything.
pub fn execute(command: &Command) -> Result<Outcome, Error> {
    let started = Instant::now();
    match command {
        Command::Reserve { source, output } => {
            output.validate()?;
            let (t, source) = load_triangle(source)?;
            let b = base(&t)?;
            let r_hat = b.estimates.reserve;
            let lognormal = SummaryRow::from_parametric("mack_lognormal", &b.lognormal, r_hat, &output.probs)?;
            let gamma = SummaryRow::from_parametric("mack_gamma", &b.gamma, r_hat, &output.probs)?;
            let report = Report {
                manifest: manifest("reserve", source, Vec::new(), output, started, &[]),
                estimates: b.estimates,
                summary: vec![lognormal],
                histogram: Vec::new(),
                diagnostics: Diagnostics {
                    zero_mass: zero_mass_diagnostics(&t, &b.params),
                    gamma_variant: gamma,
                    simulation: Vec::new(),
                },
            };
            Ok(Outcome { report, samples: Vec::new() })
        }
        Command::Bootstrap { source, method, sim, output } => {
            output.validate()?;
            let config = sim.config((*method).into());
            config.validate()?;
            let (t, source) = load_triangle(source)?;
            let b = base(&t)?;
            let r_hat = b.estimates.reserve;
            let bootstrap = Bootstrap::new(&t, config)?;
            let result = run_parallel(&bootstrap, output.threads)?;
            let name = bootstrap_row_name(&config);
            let summary = summarize(&result.samples, r_hat, &output.probs)?;
            let hist = histogram(&result.samples, &BinSpec::Count(output.bins))?;
            let gamma = SummaryRow::from_parametric("mack_gamma", &b.gamma, r_hat, &output.probs)?;
            let diagnostics = Diagnostics {
                zero_mass: zero_mass_diagnostics(&t, &b.params),
                gamma_variant: gamma,
                simulation: vec![SimulationDiagnostics::new(&name, &result)],
            };
            let samples = vec![(config.method.name().to_string(), result.samples)];
            let report = Report {
                manifest: manifest("bootstrap", source, vec![config], output, started, &samples),
                estimates: b.estimates,
                summary: vec![SummaryRow::from_summary(&name, &summary, r_hat)],
                histogram: vec![MethodHistogram::new(name, hist)],
                diagnostics,
            };
            Ok(Outcome { report, samples })
        }
        Command::Compare { source, sim, output } => {
            output.validate()?;
            let configs: Vec<BootstrapConfig> = [Method::MackResidual, Method::TimeSeries, Method::ContinuousTime]
                .into_iter()
                .map(|m| sim.config(m))
                .collect();
            configs[0].validate()?;
            let (t, source) = load_triangle(source)?;
            let b = base(&t)?;
            let cmp = comparison_table(&t, &configs, &output.probs, output.threads)?;

            let edges = common_edges(cmp.runs.iter().map(|r| r.result.samples.as_slice()), output.bins)?;
            let mut histograms = Vec::new();
            for run in &cmp.runs {
                let h = histogram(&run.result.samples, &BinSpec::Edges(edges.clone()))?;
                histograms.push(MethodHistogram::new(run.row.method.clone(), h));
            }
            let simulation = cmp
                .runs
                .iter()
                .map(|r| SimulationDiagnostics::new(r.row.method.clone(), &r.result))
                .collect();
            let summary = cmp.rows();
            let samples: Vec<(String, Vec<f64>)> = cmp
                .runs
                .into_iter()
                .map(|r| (r.result.config.method.name().to_string(), r.result.samples))
                .collect();
            let report = Report {
                manifest: manifest("compare", source, configs, output, started, &samples),
                estimates: b.estimates,
                summary,
                histogram: histograms,
                diagnostics: Diagnostics {
                    zero_mass: cmp.zero_mass,
                    gamma_variant: cmp.gamma,
                    simulation,
                },
            };
            Ok(Outcome { report, samples })
        }
    }
}

/// Equal-width edges over the pooled range of several sample sets.
pub fn common_edges<'a>(
    sets: impl Iterator<Item = &'a [f64]>,
    bins: usize,
) -> Result<Vec<f64>, Error> {
    let pooled: Vec<f64> = sets
        .flat_map(|s| {
            let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            [lo, hi]
        })
        .filter(|x| x.is_finite())
        .collect();
    Ok(histogram(&pooled, &BinSpec::Count(bins))?.edges)
}

fn output_of(command: &Command) -> &OutputArgs {
    match command {
        Command::Reserve { output, .. }
        | Command::Bootstrap { output, .. }
        | Command::Compare { output, .. } => output,
    }
}

fn render(outcome: &Outcome, output: &OutputArgs) -> Result<String, Error> {
    let report = &outcome.report;
    Ok(match output.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json()?,
        Format::Csv => report.to_csv(),
    })
}

fn run(command: &Command) -> Result<String, Error> {
    let output = output_of(command);
    let outcome = execute(command)?;
    if let Some(dir) = &output.out {
        let samples: Vec<(&str, &[f64])> = if output.emit_samples {
            outcome.samples.iter().map(|(m, s)| (m.as_str(), s.as_slice())).collect()
        } else {
            Vec::new()
        };
        write_outputs(dir, &outcome.report, &samples)?;
    }
    render(&outcome, output)
}

/// Entry point of the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            if output_of(&cli.command).format == Format::Json {
                let body = serde_json::json!({
                    "error": { "kind": e.kind(), "message": e.to_string() }
                });
                eprintln!("{body}");
            } else {
                eprintln!("error[{}]: {e}", e.kind());
            }
            ExitCode::from(e.exit_code())
        }
    }
}
