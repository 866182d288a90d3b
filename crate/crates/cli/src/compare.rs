//! Batch comparison of every bound against the exact count.
//!
//! CSV columns, in order: `id, n, m, exact_count, v0`, then for each name in
//! [`BOUND_COLUMNS`] the exact value, its decimal (rounded up) and the
//! solution cap (`floor(2^n · value)`, empty for estimates), then
//! `verdict, soundness_violations`, the stage timings in milliseconds and
//! `error`. Cells that could not be computed are empty.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use frustration_core::bounds::{BoundReport, Soundness, Verdict};
use frustration_core::cnf::parse_dimacs;
use frustration_core::frustration::moments;
use frustration_core::generate::{generate, GenSpec};
use frustration_core::oracle::OracleConfig;
use frustration_core::rational::{decimal_up, fraction_string, to_f64, Rational};
use frustration_core::CnfFormula;
use num_bigint::BigUint;
use rayon::prelude::*;

use crate::args::CompareArgs;
use crate::{exact_distribution, oracle_config, CliError, Result};

pub const BOUND_COLUMNS: [&str; 9] = [
    "basic",
    "sharpened",
    "medium_cutoff",
    "optimized_cutoff",
    "v1_split",
    "cutoff_scan",
    "ratio_estimate",
    "ratio_minus_v1_estimate",
    "ratio_minus_tail_estimate",
];

const DECIMALS: usize = 6;

pub enum Source {
    File(PathBuf),
    Generated(GenSpec),
}

pub struct Instance {
    pub id: String,
    pub source: Source,
}

#[derive(Debug, Clone, Default)]
pub struct Timings {
    pub parse_ms: f64,
    pub moments_ms: f64,
    pub oracle_ms: f64,
    pub bounds_ms: f64,
}

#[derive(Debug, Clone)]
pub struct BoundCell {
    pub value: Rational,
    pub cap: Option<BigUint>,
    pub soundness: Soundness,
}

#[derive(Debug, Clone, Default)]
pub struct CompareRow {
    pub id: String,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub exact_count: Option<u64>,
    pub v0: Option<Rational>,
    pub bounds: Vec<Option<BoundCell>>,
    pub verdict: Option<Verdict>,
    pub violations: usize,
    pub timings: Timings,
    pub error: Option<String>,
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn load(inst: &Instance) -> std::result::Result<CnfFormula, String> {
    match &inst.source {
        Source::File(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            parse_dimacs(&text).map(|p| p.formula).map_err(|e| format!("parse error: {e}"))
        }
        Source::Generated(spec) => generate(spec).map_err(|e| e.to_string()),
    }
}

pub fn analyze(inst: &Instance, config: OracleConfig) -> CompareRow {
    let mut row = CompareRow { id: inst.id.clone(), bounds: vec![None; BOUND_COLUMNS.len()], ..Default::default() };
    let t = Instant::now();
    let f = match load(inst) {
        Ok(f) => f,
        Err(e) => {
            row.error = Some(e);
            return row;
        }
    };
    row.timings.parse_ms = elapsed_ms(t);
    row.n = Some(f.num_vars());
    row.m = Some(f.num_clauses());

    let t = Instant::now();
    let mom = moments(&f);
    row.timings.moments_ms = elapsed_ms(t);

    let t = Instant::now();
    let dist = match exact_distribution(&f, config) {
        Ok(d) => d,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.timings.oracle_ms = elapsed_ms(t);
    row.exact_count = Some(dist.model_count());
    row.v0 = Some(dist.probability(0));

    let t = Instant::now();
    let report = match BoundReport::with_distribution(f.num_vars(), f.num_clauses(), &mom, &dist) {
        Ok(r) => r,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.timings.bounds_ms = elapsed_ms(t);
    let count = BigUint::from(dist.model_count());
    for e in &report.entries {
        if e.soundness == Soundness::Sound && e.max_solutions.as_ref().is_some_and(|c| *c < count) {
            row.violations += 1;
        }
        if let Some(i) = BOUND_COLUMNS.iter().position(|&c| c == e.name) {
            row.bounds[i] = Some(BoundCell { value: e.value.clone(), cap: e.max_solutions.clone(), soundness: e.soundness });
        }
    }
    row.verdict = Some(report.verdict);
    if report.verdict == Verdict::UnsatCertified && dist.model_count() > 0 {
        row.violations += 1;
    }
    row
}

pub fn header() -> Vec<String> {
    let mut h: Vec<String> = ["id", "n", "m", "exact_count", "v0"].map(String::from).to_vec();
    for name in BOUND_COLUMNS {
        h.push(name.to_string());
        h.push(format!("{name}_decimal"));
        h.push(format!("{name}_cap"));
    }
    h.extend(
        ["verdict", "soundness_violations", "parse_ms", "moments_ms", "oracle_ms", "bounds_ms", "error"].map(String::from),
    );
    h
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

pub fn record(row: &CompareRow) -> Vec<String> {
    let mut r = vec![row.id.clone(), opt(&row.n), opt(&row.m), opt(&row.exact_count)];
    r.push(row.v0.as_ref().map(fraction_string).unwrap_or_default());
    for cell in &row.bounds {
        match cell {
            Some(c) => {
                r.push(fraction_string(&c.value));
                r.push(decimal_up(&c.value, DECIMALS));
                r.push(opt(&c.cap));
            }
            None => r.extend([String::new(), String::new(), String::new()]),
        }
    }
    r.push(opt(&row.verdict));
    r.push(row.violations.to_string());
    let t = &row.timings;
    for ms in [t.parse_ms, t.moments_ms, t.oracle_ms, t.bounds_ms] {
        r.push(format!("{ms:.3}"));
    }
    r.push(row.error.clone().unwrap_or_default());
    r
}

pub struct Summary {
    pub instances: usize,
    pub errors: usize,
    pub violations: usize,
    /// Mean of `bound / v_0` over rows with `v_0 > 0`, per bound column.
    pub mean_ratios: Vec<(String, Option<f64>)>,
}

pub fn summarize(rows: &[CompareRow]) -> Summary {
    let mean_ratios = BOUND_COLUMNS
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let ratios: Vec<f64> = rows
                .iter()
                .filter_map(|r| {
                    let v0 = r.v0.as_ref().filter(|v| **v > Rational::from_integer(0.into()))?;
                    let cell = r.bounds[i].as_ref()?;
                    Some(to_f64(&(&cell.value / v0)))
                })
                .collect();
            let mean = (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64);
            (name.to_string(), mean)
        })
        .collect();
    Summary {
        instances: rows.len(),
        errors: rows.iter().filter(|r| r.error.is_some()).count(),
        violations: rows.iter().map(|r| r.violations).sum(),
        mean_ratios,
    }
}

impl std::fmt::Display for Summary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "instances={} errors={} soundness_violations={} mean_bound_over_v0:",
            self.instances, self.errors, self.violations
        )?;
        for (name, mean) in &self.mean_ratios {
            match mean {
                Some(m) => write!(f, " {name}={m:.4}")?,
                None => write!(f, " {name}=-")?,
            }
        }
        Ok(())
    }
}

fn directory_instances(dir: &Path) -> Result<Vec<Instance>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "cnf"))
        .collect();
    paths.sort();
    Ok(paths
        .into_iter()
        .map(|p| {
            let id = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            Instance { id, source: Source::File(p) }
        })
        .collect())
}

fn ensemble_instances(a: &CompareArgs) -> Vec<Instance> {
    let (n, m) = (a.vars.unwrap_or(0), a.clauses.unwrap_or(0));
    (a.seed_base..a.seed_base + a.seeds)
        .map(|seed| Instance {
            id: format!("seed{seed}"),
            source: Source::Generated(GenSpec { n, m, width: a.width, seed }),
        })
        .collect()
}

/// Rows come back in instance order regardless of scheduling.
pub fn compare(instances: &[Instance], config: OracleConfig) -> Vec<CompareRow> {
    instances.par_iter().map(|inst| analyze(inst, config)).collect()
}

pub fn write_csv(rows: &[CompareRow], sink: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(header())?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush().map_err(|e| CliError::io("<csv>", e))?;
    Ok(())
}

pub fn cmd_compare(a: &CompareArgs, out: &mut dyn Write) -> Result<()> {
    let instances = match &a.dir {
        Some(dir) => directory_instances(dir)?,
        None => ensemble_instances(a),
    };
    let rows = compare(&instances, oracle_config()?);
    match &a.out {
        Some(p) => {
            let file = fs::File::create(p).map_err(|e| CliError::io(p, e))?;
            write_csv(&rows, file)?;
        }
        None => write_csv(&rows, &mut *out)?,
    }
    let summary = summarize(&rows);
    eprintln!("{summary}");
    if summary.violations > 0 {
        return Err(CliError::Invariant(format!("{} soundness violations", summary.violations)));
    }
    Ok(())
}
