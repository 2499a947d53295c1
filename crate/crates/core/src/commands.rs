//! The five user-facing commands. Each validates a [`RunConfig`], does its
//! work, writes its tables under the output directory and returns a short
//! summary for the terminal.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::field_poly::Fq;
use crate::lfunction::{functional_equation_defect, l_zeros};
use crate::moments::charsum::char_sum_grid;
use crate::moments::divisor::{
    brute_force_tables, growth_slope, DEFAULT_BRUTE_BUDGET, MAX_SERIES_DEGREE,
};
use crate::moments::{
    holder_check, moment_sum, weighted_first_moment, MomentReport, TruncationParams,
};
use crate::qsqrt::QSqrt;
use crate::scan::{scan_degree, Scan, ScanOptions};
use crate::strategy::{DivisorSumMethod, IrreducibilityTest, Strategies, SymbolBackend};
use crate::verify::{self, CheckResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub q: u64,
    pub degrees: Vec<usize>,
    pub ks: Vec<u32>,
    pub x_override: Option<usize>,
    pub max_series_degree: usize,
    /// Brute-force cross-check limit for divisor sums.
    pub brute_max_degree: usize,
    pub tol: f64,
    pub jobs: usize,
    /// Defaults to `<out_dir>/cache`.
    pub cache_dir: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    pub charsum_max_degree: usize,
    pub irreducibility: String,
    pub symbols: String,
    pub divisor_method: String,
    /// Test mode for `verify`: perturb one coefficient per degree.
    pub inject_fault: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = Strategies::builtin();
        RunConfig {
            q: 5,
            degrees: vec![3, 5],
            ks: vec![2, 4],
            x_override: None,
            max_series_degree: 40,
            brute_max_degree: 8,
            tol: crate::lfunction::DEFAULT_RH_TOLERANCE,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            cache_dir: None,
            out_dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
            charsum_max_degree: 3,
            irreducibility: s.irreducibility.default_name().to_string(),
            symbols: s.symbols.default_name().to_string(),
            divisor_method: s.divisor_sums.default_name().to_string(),
            inject_fault: false,
        }
    }
}

/// A validated configuration with its strategies resolved.
struct Resolved {
    ring: Fq,
    irreducibility: Arc<dyn IrreducibilityTest>,
    symbols: Arc<dyn SymbolBackend>,
    divisor_method: Arc<dyn DivisorSumMethod>,
}

impl RunConfig {
    fn resolve(&self) -> Result<Resolved> {
        let ring = Fq::new(self.q)?;
        if self.jobs == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::Config(format!(
                "--tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_series_degree > MAX_SERIES_DEGREE {
            return Err(Error::Config(format!(
                "--max-series-degree is limited to {MAX_SERIES_DEGREE}, got {}",
                self.max_series_degree
            )));
        }
        let s = Strategies::builtin();
        Ok(Resolved {
            ring,
            irreducibility: s.irreducibility.get(&self.irreducibility)?,
            symbols: s.symbols.get(&self.symbols)?,
            divisor_method: s.divisor_sums.get(&self.divisor_method)?,
        })
    }

    fn check_l_degrees(&self) -> Result<()> {
        if self.degrees.is_empty() {
            return Err(Error::Config(
                "--degrees must list at least one degree".into(),
            ));
        }
        if let Some(&bad) = self.degrees.iter().find(|&&n| n < 3 || n % 2 == 0) {
            return Err(Error::Config(format!(
                "degree {bad} is not supported: L-value commands need odd degrees >= 3"
            )));
        }
        Ok(())
    }

    fn check_ks(&self) -> Result<()> {
        if self.ks.is_empty() {
            return Err(Error::Config(
                "--k must list at least one moment order".into(),
            ));
        }
        Ok(())
    }

    pub fn effective_cache_dir(&self) -> PathBuf {
        self.cache_dir
            .clone()
            .unwrap_or_else(|| self.out_dir.join("cache"))
    }

    fn scan_options(&self, r: &Resolved) -> ScanOptions {
        ScanOptions {
            jobs: self.jobs,
            cache_dir: Some(self.effective_cache_dir()),
            irreducibility: Arc::clone(&r.irreducibility),
            symbols: Arc::clone(&r.symbols),
        }
    }

    fn output_path(&self, stem: &str) -> PathBuf {
        self.out_dir
            .join(format!("{stem}.{}", self.format.extension()))
    }
}

/// Floats are rendered with 15 significant digits in scientific notation.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.14e}")
    }
}

fn rational_text(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Rows of strings with a header, written as CSV or as a JSON array of
/// objects.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(headers: &[&str]) -> Self {
        Table {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.headers)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                let bytes = w
                    .into_inner()
                    .map_err(|e| Error::io("flushing CSV buffer", e.into_error()))?;
                Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields"))
            }
            OutputFormat::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = self
                            .headers
                            .iter()
                            .cloned()
                            .zip(row.iter().map(|v| Value::String(v.clone())))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                Ok(serde_json::to_string_pretty(&rows)? + "\n")
            }
        }
    }
}

fn write_output(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

fn write_table(config: &RunConfig, stem: &str, table: &Table) -> Result<PathBuf> {
    let path = config.output_path(stem);
    write_output(&path, &table.render(config.format)?)?;
    Ok(path)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanSummary {
    pub n: usize,
    pub conductors: usize,
    pub cache_hits: usize,
    pub recomputed: usize,
    pub repaired: usize,
    pub cache_written: bool,
    pub output: PathBuf,
}

fn scan_all(config: &RunConfig, r: &Resolved) -> Result<Vec<Scan>> {
    let opts = config.scan_options(r);
    config
        .degrees
        .iter()
        .map(|&n| scan_degree(&r.ring, n, &opts))
        .collect()
}

/// One row per conductor:
/// `q, n, P, c_0..c_{2g}, a_num, a_den, b_num, b_den, central_float,
/// fe_defect, rh_defect`.
pub fn lvalue_table(scan: &Scan, tol: f64, jobs: usize) -> Result<Table> {
    let two_g = scan.degree - 1;
    let mut headers: Vec<String> = vec!["q".into(), "n".into(), "P".into()];
    headers.extend((0..=two_g).map(|i| format!("c_{i}")));
    headers.extend(
        [
            "a_num",
            "a_den",
            "b_num",
            "b_den",
            "central_float",
            "fe_defect",
            "rh_defect",
        ]
        .map(String::from),
    );
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} workers: {e}")))?;
    let rows: Vec<Result<Vec<String>>> = pool.install(|| {
        scan.records
            .par_iter()
            .map(|rec| {
                let zeros = l_zeros(&rec.l, tol)?;
                let mut row = vec![
                    scan.q.to_string(),
                    scan.degree.to_string(),
                    rec.conductor.canonical(),
                ];
                row.extend(rec.l.coeffs().iter().map(|c| c.to_string()));
                let (a, b) = (rec.central.a(), rec.central.b());
                row.extend([
                    a.numer().to_string(),
                    a.denom().to_string(),
                    b.numer().to_string(),
                    b.denom().to_string(),
                    fmt_float(rec.central.to_f64()),
                    functional_equation_defect(&rec.l).to_string(),
                    fmt_float(zeros.moduli_defect),
                ]);
                Ok(row)
            })
            .collect()
    });
    Ok(Table {
        headers,
        rows: rows.into_iter().collect::<Result<_>>()?,
    })
}

/// Scans every requested degree, refreshes the cache and writes one
/// L-value table per degree.
pub fn cmd_scan(config: &RunConfig) -> Result<Vec<ScanSummary>> {
    let r = config.resolve()?;
    config.check_l_degrees()?;
    let mut out = Vec::new();
    for scan in scan_all(config, &r)? {
        let table = lvalue_table(&scan, config.tol, config.jobs)?;
        let output = write_table(
            config,
            &format!("lvalues_q{}_n{}", scan.q, scan.degree),
            &table,
        )?;
        out.push(ScanSummary {
            n: scan.degree,
            conductors: scan.records.len(),
            cache_hits: scan.provenance.cache_hits,
            recomputed: scan.provenance.recomputed,
            repaired: scan.provenance.repaired,
            cache_written: scan.provenance.cache_written,
            output,
        });
    }
    Ok(out)
}

const MOMENT_HEADERS: [&str; 25] = [
    "q",
    "n",
    "k",
    "conductors",
    "x_nominal_num",
    "x_nominal_den",
    "x_effective",
    "moment_a",
    "moment_b",
    "moment_float",
    "normalized_float",
    "log_power",
    "normalized_over_log_power",
    "s1_a",
    "s1_b",
    "s2_a",
    "s2_b",
    "holder_lhs_float",
    "holder_rhs_float",
    "holder_holds",
    "holder_gap_float",
    "weighted_first_a",
    "weighted_first_b",
    "first_moment_ratio_float",
    "first_moment_ratio_a",
];

fn qsqrt_pair(x: &QSqrt) -> [String; 2] {
    [rational_text(x.a()), rational_text(x.b())]
}

/// One moments row. Orders that are not positive and even have no Hölder
/// data; those columns stay empty.
pub fn moment_row(scan: &Scan, k: u32, x_override: Option<usize>) -> Result<Vec<String>> {
    let genus = (scan.degree - 1) / 2;
    let moment = moment_sum(scan, k);
    let wf = weighted_first_moment(scan);
    let exponent = k * (k + 1) / 2;
    let log_power = BigInt::from(scan.degree).pow(exponent);
    let normalized = moment.normalized.to_f64();
    let mut row = vec![
        scan.q.to_string(),
        scan.degree.to_string(),
        k.to_string(),
        scan.records.len().to_string(),
    ];
    let params = TruncationParams::new(k, genus, x_override).ok();
    let nominal = crate::moments::x_nominal(genus, k.max(1));
    match &params {
        Some(p) => row.extend([
            p.x_nominal().numer().to_string(),
            p.x_nominal().denom().to_string(),
            p.x_effective().to_string(),
        ]),
        None if k == 0 => row.extend([String::new(), String::new(), String::new()]),
        None => row.extend([
            nominal.numer().to_string(),
            nominal.denom().to_string(),
            String::new(),
        ]),
    }
    row.extend(qsqrt_pair(&moment.total));
    row.extend([
        fmt_float(moment.total.to_f64()),
        fmt_float(normalized),
        log_power.to_string(),
        fmt_float(normalized / log_power.to_f64().unwrap_or(f64::INFINITY)),
    ]);
    match params {
        Some(p) => {
            let report = MomentReport::build(scan, p);
            let h = holder_check(&report)?;
            row.extend(qsqrt_pair(&report.s1));
            row.extend(qsqrt_pair(&report.s2));
            row.extend([
                fmt_float(report.holder_lhs.to_f64()),
                fmt_float(report.holder_rhs.to_f64()),
                h.holds.to_string(),
                fmt_float(h.gap),
            ]);
        }
        None => row.extend(std::iter::repeat_n(String::new(), 8)),
    }
    row.extend(qsqrt_pair(&wf.weighted));
    row.push(fmt_float(wf.ratio.to_f64()));
    row.push(rational_text(wf.ratio.a()));
    Ok(row)
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentsSummary {
    pub rows: usize,
    pub holder_failures: usize,
    pub output: PathBuf,
    pub seconds: f64,
}

/// The `(n, k)` grid of moment sums, `S1`, `S2` and the Hölder comparison.
pub fn cmd_moments(config: &RunConfig) -> Result<MomentsSummary> {
    let start = Instant::now();
    let r = config.resolve()?;
    config.check_l_degrees()?;
    config.check_ks()?;
    let mut table = Table::new(&MOMENT_HEADERS);
    for scan in scan_all(config, &r)? {
        for &k in &config.ks {
            table.push(moment_row(&scan, k, config.x_override)?);
        }
    }
    let holds = MOMENT_HEADERS
        .iter()
        .position(|h| *h == "holder_holds")
        .unwrap();
    let holder_failures = table.rows.iter().filter(|r| r[holds] == "false").count();
    let output = write_table(config, &format!("moments_q{}", config.q), &table)?;
    Ok(MomentsSummary {
        rows: table.rows.len(),
        holder_failures,
        output,
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DivisorSummary {
    pub fits: Vec<crate::moments::divisor::SlopeFit>,
    pub brute_mismatches: usize,
    pub outputs: Vec<PathBuf>,
}

/// Slope window: `[20, 40]` when the table reaches 40, else the upper half.
pub fn slope_window(max_degree: usize) -> (usize, usize) {
    if max_degree >= 40 {
        (20, 40)
    } else {
        ((max_degree / 2).max(1), max_degree)
    }
}

/// Per-degree divisor-sum terms for every `k`, the brute-force agreement
/// column, and one slope fit per `k`.
pub fn cmd_divisor_sums(config: &RunConfig) -> Result<DivisorSummary> {
    let r = config.resolve()?;
    config.check_ks()?;
    if let Some(&k) = config.ks.iter().find(|&&k| k == 0) {
        return Err(Error::Config(format!("divisor sums need k >= 1, got {k}")));
    }
    let d_max = config.max_series_degree;
    if d_max < 2 {
        return Err(Error::Config(
            "--max-series-degree must be at least 2".into(),
        ));
    }
    let brute_max = config.brute_max_degree.min(d_max);
    let brute = brute_force_tables(&r.ring, &config.ks, brute_max, DEFAULT_BRUTE_BUDGET)?;
    let mut table = Table::new(&[
        "q",
        "k",
        "d",
        "t_num",
        "t_den",
        "partial_num",
        "partial_den",
        "partial_float",
        "brute_agrees",
    ]);
    let mut slopes = Table::new(&[
        "q",
        "k",
        "method",
        "z_lo",
        "z_hi",
        "slope",
        "target",
        "relative_error",
        "within_15_percent",
    ]);
    let mut fits = Vec::new();
    let mut brute_mismatches = 0;
    let window = slope_window(d_max);
    for (&k, brute_table) in config.ks.iter().zip(&brute) {
        let t = r.divisor_method.table(&r.ring, k, d_max)?;
        for d in 0..=d_max {
            let agrees = if d <= brute_max {
                let ok = brute_table.partial[d] == t.partial[d];
                brute_mismatches += usize::from(!ok);
                ok.to_string()
            } else {
                String::new()
            };
            table.push(vec![
                config.q.to_string(),
                k.to_string(),
                d.to_string(),
                t.terms[d].numer().to_string(),
                t.terms[d].denom().to_string(),
                t.partial[d].numer().to_string(),
                t.partial[d].denom().to_string(),
                fmt_float(t.partial[d].to_f64().unwrap_or(f64::NAN)),
                agrees,
            ]);
        }
        let fit = growth_slope(&t, window.0, window.1)?;
        slopes.push(vec![
            config.q.to_string(),
            k.to_string(),
            r.divisor_method.name().to_string(),
            fit.z_lo.to_string(),
            fit.z_hi.to_string(),
            fmt_float(fit.slope),
            fmt_float(fit.target),
            fmt_float(fit.relative_error),
            (fit.relative_error.abs() <= 0.15).to_string(),
        ]);
        fits.push(fit);
    }
    let outputs = vec![
        write_table(config, &format!("divisor_sums_q{}", config.q), &table)?,
        write_table(config, &format!("divisor_slopes_q{}", config.q), &slopes)?,
    ];
    Ok(DivisorSummary {
        fits,
        brute_mismatches,
        outputs,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CharSumSummary {
    pub rows: usize,
    pub max_ratio: f64,
    pub argmax: Option<(String, usize)>,
    pub output: PathBuf,
}

/// Prime character sums for every non-square monic `f` up to the degree
/// bound, with the running maximum of the normalized ratio.
pub fn cmd_charsum(config: &RunConfig) -> Result<CharSumSummary> {
    let r = config.resolve()?;
    if config.degrees.is_empty() || config.degrees.contains(&0) {
        return Err(Error::Config("--degrees must list positive degrees".into()));
    }
    let rows = char_sum_grid(&r.ring, config.charsum_max_degree, &config.degrees)?;
    let mut table = Table::new(&["q", "f", "deg_f", "n", "sum", "ratio", "running_max"]);
    let mut max_ratio: f64 = 0.0;
    let mut argmax = None;
    for row in &rows {
        if row.ratio > max_ratio || argmax.is_none() {
            max_ratio = row.ratio.max(max_ratio);
            argmax = Some((row.f.canonical(), row.n));
        }
        table.push(vec![
            config.q.to_string(),
            row.f.canonical(),
            row.f.degree().to_string(),
            row.n.to_string(),
            row.sum.to_string(),
            fmt_float(row.ratio),
            fmt_float(max_ratio),
        ]);
    }
    let output = write_table(config, &format!("charsum_q{}", config.q), &table)?;
    Ok(CharSumSummary {
        rows: rows.len(),
        max_ratio,
        argmax,
        output,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TimedCheck {
    #[serde(flatten)]
    pub result: CheckResult,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub q: u32,
    pub degrees: Vec<usize>,
    pub ks: Vec<u32>,
    pub x_grid: Vec<usize>,
    pub tolerance: f64,
    pub fault_injected: bool,
    pub passed: bool,
    pub checks: Vec<TimedCheck>,
    #[serde(skip)]
    pub output: PathBuf,
}

impl VerifyReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &TimedCheck> {
        self.checks.iter().filter(|c| !c.result.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks
            .iter()
            .map(|c| &c.result)
            .find(|c| c.name == name)
    }
}

/// Largest `n` with `q^n ≤ limit`.
fn degree_within(q: u32, limit: u64) -> usize {
    let mut n = 0;
    let mut size = 1u64;
    while size.saturating_mul(q as u64) <= limit {
        size *= q as u64;
        n += 1;
    }
    n
}

fn timed(f: impl FnOnce() -> Result<CheckResult>) -> Result<TimedCheck> {
    let start = Instant::now();
    let result = f()?;
    Ok(TimedCheck {
        result,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs every invariant check and writes `verify_q{q}.json`. The report
/// is returned even when checks fail; callers map that to exit code 1.
pub fn cmd_verify(config: &RunConfig) -> Result<VerifyReport> {
    let r = config.resolve()?;
    config.check_l_degrees()?;
    config.check_ks()?;
    let ring = r.ring;
    let q = ring.q();
    let scans = scan_all(config, &r)?;
    let scan_refs: Vec<&Scan> = scans.iter().collect();
    let x_grid: Vec<usize> = match config.x_override {
        Some(x) => vec![x],
        None => vec![0, 1, 2],
    };
    let holder_ks: Vec<u32> = config
        .ks
        .iter()
        .copied()
        .filter(|k| *k > 0 && k % 2 == 0)
        .collect();
    let brute_z = config
        .brute_max_degree
        .min(degree_within(q, DEFAULT_BRUTE_BUDGET).saturating_sub(1));
    let window = slope_window(config.max_series_degree);
    let reciprocity_degree = if q == 5 { 3 } else { 2 };
    let checks = vec![
        timed(|| {
            verify::irreducible_counts(&ring, degree_within(q, 15_625), r.irreducibility.as_ref())
        })?,
        timed(|| Ok(verify::functional_equation(&scan_refs, config.inject_fault)))?,
        timed(|| verify::afe_identity(&ring, &scan_refs, r.symbols.as_ref()))?,
        timed(|| Ok(verify::central_nonnegative(&scan_refs)))?,
        timed(|| verify::rh_defect(&scan_refs, config.tol, 5, 500))?,
        timed(|| verify::holder(&scan_refs, &holder_ks, &x_grid))?,
        timed(|| {
            Ok(verify::divisor_oracle(
                &ring,
                degree_within(q, 625),
                &[2, 3, 4],
            ))
        })?,
        timed(|| verify::divisor_cross_oracle(&ring, &[2, 3], brute_z))?,
        timed(|| verify::divisor_growth(&ring, &[2, 3], window, 0.15))?,
        timed(|| verify::square_bracket(&ring, &[2, 4], &[0, 1, 2]))?,
        timed(|| Ok(verify::reciprocal_norms(&ring, 3)))?,
        timed(|| verify::reciprocity(&ring, reciprocity_degree))?,
        timed(|| {
            verify::charsum_envelope(&ring, config.charsum_max_degree, &config.degrees, 10.0)
        })?,
        timed(|| Ok(verify::first_moment_trend(&scan_refs)))?,
    ];
    let passed = checks.iter().all(|c| c.result.passed);
    let report = VerifyReport {
        q,
        degrees: config.degrees.clone(),
        ks: config.ks.clone(),
        x_grid,
        tolerance: config.tol,
        fault_injected: config.inject_fault,
        passed,
        checks,
        output: config.out_dir.join(format!("verify_q{q}.json")),
    };
    let text = serde_json::to_string_pretty(&report)? + "\n";
    write_output(&report.output, &text)?;
    Ok(report)
}

/// Compact machine-readable form of a report for stdout.
pub fn verify_json(report: &VerifyReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(&json!(report))?)
}
