//! Run reports.
//!
//! Every command produces a [`Report`] with the same top-level fields:
//! `manifest`, `estimates`, `summary`, `histogram` and `diagnostics`. It renders
//! as JSON, as long-format CSV (`statistic,method,value`) or as text tables.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ctreserve_core::chain_ladder::{mack_msep, ultimates_and_reserve};
use ctreserve_core::{BootstrapConfig, BootstrapResult, DevParams, Histogram, TailSource, Triangle};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::compare::{SummaryRow, ZeroMassDiagnostics};
use crate::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Dataset(String),
    File(String),
}

impl std::fmt::Display for Source {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Source::Dataset(name) => write!(f, "dataset {name}"),
            Source::File(path) => write!(f, "file {path}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampleDigest {
    pub method: String,
    pub count: usize,
    /// SHA-256 of the samples as consecutive little-endian `f64`s.
    pub sha256: String,
}

/// Everything needed to rerun a command and check its output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub source: Source,
    pub configs: Vec<BootstrapConfig>,
    pub seed: Option<u64>,
    pub probs: Vec<f64>,
    pub bins: Option<usize>,
    pub threads: Option<usize>,
    pub version: String,
    pub duration_secs: f64,
    pub samples: Vec<SampleDigest>,
}

/// Chain-ladder point estimates and Mack's MSEP.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimates {
    pub label: String,
    pub n: usize,
    pub factors: Vec<f64>,
    pub sigma2: Vec<f64>,
    pub tail: TailSource,
    pub latest: Vec<f64>,
    pub ultimates: Vec<f64>,
    pub reserves: Vec<f64>,
    pub reserve: f64,
    pub msep_per_year: Vec<f64>,
    pub msep_total: f64,
    pub msep_pct: f64,
}

impl Estimates {
    pub fn new(t: &Triangle, p: &DevParams) -> Self {
        let summary = ultimates_and_reserve(t, p.factors());
        let msep = mack_msep(t, p);
        Self {
            label: t.label().to_string(),
            n: t.n(),
            factors: p.factors().to_vec(),
            sigma2: p.sigma2().to_vec(),
            tail: p.tail(),
            latest: t.latest_diagonal().into_iter().map(|(_, c)| c).collect(),
            ultimates: summary.ultimates,
            reserves: summary.reserves,
            reserve: summary.total,
            msep_pct: 100.0 * msep.total_se() / summary.total,
            msep_per_year: msep.per_year,
            msep_total: msep.total,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodHistogram {
    pub method: String,
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl MethodHistogram {
    pub fn new(method: impl Into<String>, h: Histogram) -> Self {
        Self { method: method.into(), edges: h.edges, counts: h.counts }
    }
}

/// Negative-cell and drop accounting of one bootstrap run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationDiagnostics {
    pub method: String,
    pub replicates: u64,
    pub kept: usize,
    pub dropped: u64,
    pub zero_clamped: u64,
    pub negative_replicates: u64,
    pub negative_incidence_pct: f64,
    pub negative_pseudo_data: u64,
}

impl SimulationDiagnostics {
    pub fn new(method: impl Into<String>, r: &BootstrapResult) -> Self {
        Self {
            method: method.into(),
            replicates: r.config.replicates,
            kept: r.samples.len(),
            dropped: r.dropped,
            zero_clamped: r.zero_clamped,
            negative_replicates: r.negative_replicates,
            negative_incidence_pct: r.negative_incidence_pct(),
            negative_pseudo_data: r.negative_pseudo_data,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub zero_mass: ZeroMassDiagnostics,
    /// Mack moments matched to a Gamma law instead of a Log-normal.
    pub gamma_variant: SummaryRow,
    pub simulation: Vec<SimulationDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub manifest: RunManifest,
    pub estimates: Estimates,
    pub summary: Vec<SummaryRow>,
    pub histogram: Vec<MethodHistogram>,
    pub diagnostics: Diagnostics,
}

pub fn samples_sha256(samples: &[f64]) -> String {
    let mut hasher = Sha256::new();
    for x in samples {
        hasher.update(x.to_le_bytes());
    }
    hex::encode(hasher.finalize())
}

pub fn samples_to_bytes(samples: &[f64]) -> Vec<u8> {
    samples.iter().flat_map(|x| x.to_le_bytes()).collect()
}

/// Inverse of [`samples_to_bytes`]; a trailing partial value is ignored.
pub fn samples_from_bytes(bytes: &[u8]) -> Vec<f64> {
    bytes
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
        .collect()
}

fn fmt_p(p: f64) -> String {
    let s = format!("{p}");
    s.trim_start_matches("0.").to_string()
}

impl Report {
    pub fn to_json(&self) -> Result<String, Error> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    /// `statistic,method,value`, one line per statistic of every summary row
    /// and the Gamma variant.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("statistic,method,value\n");
        for row in self.summary.iter().chain(std::iter::once(&self.diagnostics.gamma_variant)) {
            let m = &row.method;
            if let Some(count) = row.count {
                writeln!(out, "count,{m},{count}").unwrap();
            }
            writeln!(out, "mean,{m},{}", row.mean).unwrap();
            writeln!(out, "sd,{m},{}", row.sd).unwrap();
            writeln!(out, "msep_pct,{m},{}", row.msep_pct).unwrap();
            writeln!(out, "q995_excess_pct,{m},{}", row.q995_excess_pct).unwrap();
            for q in &row.quantiles {
                writeln!(out, "q{},{m},{}", fmt_p(q.p), q.value).unwrap();
                writeln!(out, "q{}_excess_pct,{m},{}", fmt_p(q.p), q.excess_pct).unwrap();
            }
        }
        out
    }

    /// `method,lower,upper,count`.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("method,lower,upper,count\n");
        for h in &self.histogram {
            for (k, count) in h.counts.iter().enumerate() {
                writeln!(out, "{},{},{},{count}", h.method, h.edges[k], h.edges[k + 1]).unwrap();
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let e = &self.estimates;
        let mut out = String::new();
        writeln!(out, "{} ({}, n = {})", self.manifest.command, self.manifest.source, e.n).unwrap();
        writeln!(out).unwrap();
        writeln!(out, "{:>4} {:>14} {:>18}", "j", "F_j", "Sigma2_j").unwrap();
        for (k, (f, s2)) in e.factors.iter().zip(&e.sigma2).enumerate() {
            writeln!(out, "{:>4} {:>14.8} {:>18.4}", k + 1, f, s2).unwrap();
        }
        writeln!(out, "tail: {:?}", e.tail).unwrap();
        writeln!(out).unwrap();
        writeln!(
            out,
            "{:>4} {:>16} {:>16} {:>16} {:>16}",
            "i", "latest", "ultimate", "reserve", "sqrt(MSEP)"
        )
        .unwrap();
        for i in 0..e.n {
            writeln!(
                out,
                "{:>4} {:>16.2} {:>16.2} {:>16.2} {:>16.2}",
                i + 1,
                e.latest[i],
                e.ultimates[i],
                e.reserves[i],
                e.msep_per_year[i].sqrt()
            )
            .unwrap();
        }
        writeln!(out).unwrap();
        writeln!(out, "reserve      {:.2}", e.reserve).unwrap();
        writeln!(out, "Mack MSEP    {:.6e}", e.msep_total).unwrap();
        writeln!(out, "sqrt(MSEP)   {:.2} ({:.4}% of reserve)", e.msep_total.sqrt(), e.msep_pct)
            .unwrap();

        writeln!(out).unwrap();
        writeln!(out, "{:<16} {:>12} {:>16}", "method", "sqrt(MSEP) %", "Q(99.5%) - R %").unwrap();
        for row in self.summary.iter().chain(std::iter::once(&self.diagnostics.gamma_variant)) {
            writeln!(out, "{:<16} {:>12.4} {:>16.4}", row.method, row.msep_pct, row.q995_excess_pct)
                .unwrap();
        }

        let with_quantiles: Vec<_> = self.summary.iter().filter(|r| !r.quantiles.is_empty()).collect();
        if !with_quantiles.is_empty() {
            writeln!(out).unwrap();
            write!(out, "{:<16}", "quantile").unwrap();
            for q in &with_quantiles[0].quantiles {
                write!(out, " {:>16}", format!("{}", q.p)).unwrap();
            }
            writeln!(out).unwrap();
            for row in with_quantiles {
                write!(out, "{:<16}", row.method).unwrap();
                for q in &row.quantiles {
                    write!(out, " {:>16.2}", q.value).unwrap();
                }
                writeln!(out).unwrap();
            }
        }

        let z = &self.diagnostics.zero_mass;
        writeln!(out).unwrap();
        writeln!(out, "P(next cell = 0), continuous-time model").unwrap();
        writeln!(out, "{:>4} {:>4} {:>16} {:>12} {:>12}", "i", "j", "C_ij", "log P", "P").unwrap();
        for m in z.next_year.iter().chain(std::iter::once(&z.substitute)) {
            let exponent = m.exponent.map_or("-inf".to_string(), |x| format!("{x:.4}"));
            writeln!(
                out,
                "{:>4} {:>4} {:>16.2} {:>12} {:>12.4e}",
                m.accident_year, m.development_year, m.start, exponent, m.prob
            )
            .unwrap();
        }
        writeln!(out, "last row is year {} started from C_{{{},1}}", z.substitute.accident_year, z.substitute.accident_year - 1)
            .unwrap();

        for s in &self.diagnostics.simulation {
            writeln!(out).unwrap();
            writeln!(
                out,
                "{}: {} replicates, {} kept, {} dropped, {} cells clamped, negative projected cells in {:.4}% of replicates, negative pseudo-data in {}",
                s.method,
                s.replicates,
                s.kept,
                s.dropped,
                s.zero_clamped,
                s.negative_incidence_pct,
                s.negative_pseudo_data
            )
            .unwrap();
        }
        writeln!(out).unwrap();
        writeln!(out, "version {}, {:.3} s", self.manifest.version, self.manifest.duration_secs).unwrap();
        for d in &self.manifest.samples {
            writeln!(out, "samples {} sha256 {}", d.method, d.sha256).unwrap();
        }
        out
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), Error> {
    fs::write(path, contents).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Writes `report.json`, `summary.csv`, `histogram.csv` and, when given,
/// `samples_<method>.bin` into `dir`.
pub fn write_outputs(
    dir: &Path,
    report: &Report,
    samples: &[(&str, &[f64])],
) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    write_file(&dir.join("report.json"), report.to_json()?.as_bytes())?;
    write_file(&dir.join("summary.csv"), report.to_csv().as_bytes())?;
    if !report.histogram.is_empty() {
        write_file(&dir.join("histogram.csv"), report.histogram_csv().as_bytes())?;
    }
    for (method, s) in samples {
        write_file(&dir.join(format!("samples_{method}.bin")), &samples_to_bytes(s))?;
    }
    Ok(())
}
