//! Command implementations behind the `frustration` binary.

pub mod args;
pub mod compare;
mod error;

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use frustration_core::bounds::{
    distribution_entries, external_entries, moments_only_entries, sat_verdict, BoundEntry, BoundReport, ExternalEstimates,
    Soundness,
};
use frustration_core::cnf::{emit_dimacs, parse_dimacs};
use frustration_core::frustration::{moments, moments_f64};
use frustration_core::generate::{generate, GenSpec};
use frustration_core::oracle::{enumerate, OracleConfig, UDistribution, DEFAULT_VAR_CAP};
use frustration_core::rational::{decimal_up, fraction_string, from_f64, parse_rational, Rational};
use frustration_core::slim::{normalize, slim_stats};
use frustration_core::{CnfFormula, Moments};
use num_bigint::BigUint;

use args::{BoundsArgs, Cli, Command, GenArgs, InputArgs, SlimArgs};
pub use error::{CliError, Result};

/// Overrides the enumeration cap (number of variables).
pub const CAP_ENV: &str = "FRUSTRATION_ORACLE_CAP";
/// Above this many variables enumeration gets slow enough to warn about.
const WARN_VARS: usize = 24;

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Bounds(a) => cmd_bounds(&a, out),
        Command::Count(a) => cmd_count(&a, out),
        Command::Dist(a) => cmd_dist(&a, out),
        Command::Slim(a) => cmd_slim(&a, out),
        Command::Gen(a) => cmd_gen(&a, out),
        Command::Compare(a) => compare::cmd_compare(&a, out),
    }
}

pub fn oracle_config() -> Result<OracleConfig> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(OracleConfig::with_cap)
            .map_err(|_| CliError::Usage(format!("{CAP_ENV}={v:?} is not a variable count"))),
        Err(_) => Ok(OracleConfig::with_cap(DEFAULT_VAR_CAP)),
    }
}

/// Enumerates after checking the cap, warning on stderr for large `n`.
pub fn exact_distribution(f: &CnfFormula, config: OracleConfig) -> Result<UDistribution> {
    if f.num_vars() > WARN_VARS && f.num_vars() <= config.max_vars {
        eprintln!("warning: enumerating 2^{} assignments; this may take a while", f.num_vars());
    }
    Ok(enumerate(f, config)?)
}

pub fn read_formula(path: &Path) -> Result<CnfFormula> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| CliError::io(path, e))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| CliError::io(path, e))?
    };
    let parsed = parse_dimacs(&text).map_err(|source| CliError::Parse { path: path.display().to_string(), source })?;
    for w in &parsed.warnings {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(parsed.formula)
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e))
}

fn write_file_or(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => write_out(out, text),
    }
}

fn parse_probability(flag: &str, text: &Option<String>) -> Result<Option<Rational>> {
    text.as_deref()
        .map(|t| parse_rational(t).ok_or_else(|| CliError::Usage(format!("--{flag}: cannot parse {t:?} as a number"))))
        .transpose()
}

/// Checks every sound and conditional cap against a known count.
pub fn check_caps(report: &BoundReport, count: u64) -> Result<()> {
    let count = BigUint::from(count);
    for e in report.entries.iter().filter(|e| e.soundness == Soundness::Sound) {
        if let Some(cap) = &e.max_solutions {
            if *cap < count {
                return Err(CliError::Invariant(format!("{} allows {cap} solutions but there are {count}", e.name)));
            }
        }
    }
    Ok(())
}

fn moments_json(mom: &Moments) -> serde_json::Value {
    serde_json::to_value(mom).expect("moments serialize")
}

fn cmd_bounds(a: &BoundsArgs, out: &mut dyn Write) -> Result<()> {
    let f = read_formula(&a.file)?;
    if a.float {
        return bounds_float(&f, a, out);
    }
    let mom = moments(&f);
    let mut entries = moments_only_entries(&mom);
    let ext = ExternalEstimates { v1: parse_probability("v1", &a.v1)?, v_le: parse_probability("v-le", &a.v_le)? };
    entries.extend(external_entries(&mom, &ext)?);
    let dist = if a.exact {
        let d = exact_distribution(&f, oracle_config()?)?;
        if d.mean() != mom.mean || d.second_moment() != mom.second_moment {
            return Err(CliError::Invariant("closed-form moments disagree with enumeration".into()));
        }
        entries.extend(distribution_entries(&mom, &d)?);
        Some(d)
    } else {
        None
    };
    let report = sat_verdict(entries, f.num_vars(), f.num_clauses())?;
    if let Some(d) = &dist {
        check_caps(&report, d.model_count())?;
    }

    if a.json {
        let mut json = report.to_json();
        json["moments"] = moments_json(&mom);
        if let Some(d) = &dist {
            json["exact_count"] = d.model_count().into();
        }
        return write_out(out, &format!("{}\n", serde_json::to_string_pretty(&json)?));
    }
    write_out(out, &render_table(&report, &mom, dist.as_ref(), a.digits))
}

fn bounds_float(f: &CnfFormula, a: &BoundsArgs, out: &mut dyn Write) -> Result<()> {
    let mom = moments_f64(f);
    let basic = mom.basic_bound();
    let up = |x: f64| from_f64(x).map(|r| decimal_up(&r, a.digits)).unwrap_or_else(|| x.to_string());
    let cap = (basic * 2f64.powi(f.num_vars() as i32)).floor();
    if a.json {
        let json = serde_json::json!({
            "n": f.num_vars(),
            "m": f.num_clauses(),
            "mode": "float",
            "moments": mom,
            "basic": basic,
            "max_solutions_approx": cap,
        });
        return write_out(out, &format!("{}\n", serde_json::to_string_pretty(&json)?));
    }
    let text = format!(
        "n = {}, m = {} (floating point)\nE(u)   = {}\nE(u^2) = {}\nvar(u) = {}\nbasic  <= {}  (about {} solutions at most)\n",
        f.num_vars(),
        f.num_clauses(),
        mom.mean,
        mom.second_moment,
        mom.variance,
        up(basic),
        cap
    );
    write_out(out, &text)
}

fn kind(e: &BoundEntry) -> &'static str {
    match e.soundness {
        Soundness::Sound => "sound",
        Soundness::Conditional => "conditional",
        Soundness::Estimate => "estimate",
    }
}

fn render_table(report: &BoundReport, mom: &Moments, dist: Option<&UDistribution>, digits: usize) -> String {
    let mut s = format!("n = {}, m = {}\n", report.n, report.m);
    s += &format!("E(u)   = {}\n", fraction_string(&mom.mean));
    s += &format!("E(u^2) = {}\n", fraction_string(&mom.second_moment));
    s += &format!("var(u) = {}\n\n", fraction_string(&mom.variance));

    let rows: Vec<[String; 6]> = report
        .entries
        .iter()
        .map(|e| {
            let mut value = decimal_up(&e.value, digits);
            if e.clamped() {
                value.push('*');
            }
            [
                e.name.clone(),
                e.target.to_string(),
                fraction_string(&e.value),
                value,
                kind(e).to_string(),
                e.max_solutions.as_ref().map(|c| c.to_string()).unwrap_or_else(|| "-".into()),
            ]
        })
        .collect();
    let header = ["bound", "target", "exact", "decimal", "kind", "max_solutions"].map(String::from);
    let widths: Vec<usize> =
        (0..6).map(|i| rows.iter().chain([&header]).map(|r| r[i].chars().count()).max().unwrap_or(0)).collect();
    for row in std::iter::once(&header).chain(&rows) {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        s += cells.join("  ").trim_end();
        s.push('\n');
    }
    if report.clamped_entries().next().is_some() {
        s += "* clamped to [0, 1]\n";
    }
    s += &format!("\nverdict: {}\n", report.verdict);
    if let Some(d) = dist {
        s += &format!("exact count: {}\n", d.model_count());
    }
    s
}

fn cmd_count(a: &InputArgs, out: &mut dyn Write) -> Result<()> {
    let f = read_formula(&a.file)?;
    let d = exact_distribution(&f, oracle_config()?)?;
    let text = if a.json {
        format!("{}\n", serde_json::json!({ "n": f.num_vars(), "count": d.model_count() }))
    } else {
        format!("{}\n", d.model_count())
    };
    write_out(out, &text)
}

fn cmd_dist(a: &InputArgs, out: &mut dyn Write) -> Result<()> {
    let f = read_formula(&a.file)?;
    let d = exact_distribution(&f, oracle_config()?)?;
    write_out(out, &format!("{}\n", serde_json::to_string(&d)?))
}

fn cmd_slim(a: &SlimArgs, out: &mut dyn Write) -> Result<()> {
    let f = read_formula(&a.file)?;
    let result = normalize(&f);
    let stats = if result.verdict().is_none() {
        Some(slim_stats(&result.formula).map_err(|e| CliError::Invariant(e.to_string()))?)
    } else {
        None
    };
    let log = serde_json::json!({
        "log": result.log,
        "count_preserving": result.count_preserving,
        "stats": stats,
        "expected_mean": stats.as_ref().map(|s| fraction_string(&s.expected_mean())),
    });
    let log = format!("{}\n", serde_json::to_string_pretty(&log)?);
    match &a.log {
        Some(p) => fs::write(p, &log).map_err(|e| CliError::io(p, e))?,
        None => eprint!("{log}"),
    }
    write_file_or(out, a.out.as_deref(), &emit_dimacs(&result.formula))
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<()> {
    let spec = GenSpec { n: a.vars, m: a.clauses, width: a.width, seed: a.seed };
    let f = generate(&spec)?;
    let text = format!("c random k-SAT n={} m={} width={} seed={}\n{}", a.vars, a.clauses, a.width, a.seed, emit_dimacs(&f));
    write_file_or(out, a.out.as_deref(), &text)
}
