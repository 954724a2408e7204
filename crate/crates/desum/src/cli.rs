//! Command-line front end: argument model, dispatch, and report emission.
//!
//! Exit code contract: 0 when every verdict passes, 1 when any check fails
//! (the report is still written), 2 for usage and argument errors.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::fs;
use std::path::{Path, PathBuf};

use crate::arith::{is_prime, next_prime_at_or_above, prev_prime_at_or_below};
use crate::golden;
use crate::hybrid::{prime_scan, ScanTarget};
use crate::report::{exit_code_for, to_csv, to_json, Cell, Record};
use crate::sums::{dedekind_sum, two_term_exponential_sum, DedekindMethod, ExpSumParams};
use crate::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "desum",
    version,
    about = "Exact and floating-point verification of two-term exponential sums, \
             Dedekind sums, and their hybrid power means"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact Dedekind sum S(h, q) as a reduced rational.
    Dedekind {
        h: i64,
        q: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Direct)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Two-term exponential sum C(m, n, k, h; q) as a complex float.
    Expsum {
        m: i64,
        n: i64,
        k: u32,
        h: u32,
        q: u64,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Exact-identity and bounded-envelope checks
    /// (lemma21..lemma27, eq2), one row per prime.
    Verify {
        /// One of: lemma21 lemma22 lemma23 lemma24 lemma25 lemma26 lemma27 eq2
        target: String,
        #[command(flatten)]
        opts: ScanOpts,
    },
    /// Theorem-level residual scans (t11, t12, wangpan).
    Scan {
        /// One of: t11 t12 wangpan
        target: String,
        #[command(flatten)]
        opts: ScanOpts,
    },
    /// Record or check golden reference results for every target.
    Golden {
        #[arg(value_enum)]
        action: GoldenAction,
        /// Directory for the reference files
        /// (default: $DESUM_GOLDEN_DIR, then ./golden).
        #[arg(long)]
        golden_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        workers: usize,
        /// Relative tolerance for float cells during `check`.
        #[arg(long, default_value_t = golden::DEFAULT_CHECK_TOLERANCE)]
        tolerance: f64,
        /// Cap every target's upper prime bound (record and check must
        /// agree on this).
        #[arg(long)]
        pmax: Option<u64>,
    },
}

#[derive(Args, Debug)]
pub struct ScanOpts {
    /// Smallest prime to scan (snapped up to a prime; target default if
    /// omitted).
    #[arg(long)]
    pub pmin: Option<u64>,
    /// Largest prime to scan (snapped down to a prime; target default if
    /// omitted).
    #[arg(long)]
    pub pmax: Option<u64>,
    #[arg(long, default_value_t = 8)]
    pub workers: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fill runtime_ms with measured times. Off by default so that output
    /// is byte-identical across runs and worker counts.
    #[arg(long)]
    pub timings: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodArg {
    Direct,
    Reciprocity,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GoldenAction {
    Record,
    Check,
}

/// Targets served by `verify` (exact identities and lemma-level bounds).
const VERIFY_TOKENS: [&str; 8] =
    ["lemma21", "lemma22", "lemma23", "lemma24", "lemma25", "lemma26", "lemma27", "eq2"];
/// Targets served by `scan` (theorem-level residual scans).
const SCAN_TOKENS: [&str; 3] = ["t11", "t12", "wangpan"];

fn parse_target(token: &str, scan_level: bool) -> Result<ScanTarget> {
    let allowed: &[&str] = if scan_level { &SCAN_TOKENS } else { &VERIFY_TOKENS };
    if !allowed.contains(&token) {
        return Err(Error::Usage(format!(
            "unknown {} target {token:?}; expected one of: {}",
            if scan_level { "scan" } else { "verify" },
            allowed.join(" ")
        )));
    }
    ScanTarget::from_token(token)
        .ok_or_else(|| Error::Usage(format!("unknown target {token:?}")))
}

/// Resolve the prime range, snapping non-prime bounds inward with a warning
/// on stderr.
pub fn snapped_range(target: ScanTarget, pmin: Option<u64>, pmax: Option<u64>) -> (u64, u64) {
    let (dlo, dhi) = target.default_range();
    let lo_req = pmin.unwrap_or(dlo);
    let hi_req = pmax.unwrap_or(dhi);
    let lo = if is_prime(lo_req) {
        lo_req
    } else {
        let snapped = next_prime_at_or_above(lo_req.max(2));
        eprintln!("warning: --pmin {lo_req} is not prime; snapping up to {snapped}");
        snapped
    };
    let hi = if is_prime(hi_req) {
        hi_req
    } else {
        match prev_prime_at_or_below(hi_req) {
            Some(snapped) => {
                eprintln!("warning: --pmax {hi_req} is not prime; snapping down to {snapped}");
                snapped
            }
            None => {
                eprintln!("warning: no prime <= {hi_req}; scan range is empty");
                0
            }
        }
    };
    (lo, hi)
}

/// Serialize records in the requested format to `out` or stdout.
pub fn emit_report(records: &[Record], format: FormatArg, out: Option<&Path>) -> Result<()> {
    let text = match format {
        FormatArg::Csv => to_csv(records),
        FormatArg::Json => to_json(records),
    };
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run_scan(target: ScanTarget, opts: &ScanOpts) -> Result<i32> {
    let (lo, hi) = snapped_range(target, opts.pmin, opts.pmax);
    let records = prime_scan(lo, hi, target, opts.workers, opts.timings)?;
    emit_report(&records, opts.format, opts.out.as_deref())?;
    Ok(exit_code_for(&records))
}

/// Execute one parsed command; the returned code is the process exit code.
pub fn run_command(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Dedekind { h, q, method, format } => {
            let m = match method {
                MethodArg::Direct => DedekindMethod::Direct,
                MethodArg::Reciprocity => DedekindMethod::Reciprocity,
            };
            let value = dedekind_sum(h, q, m)?;
            let cell = Cell::Rat(value.clone());
            match format {
                FormatArg::Csv => {
                    println!("h,q,method,value");
                    println!("{h},{q},{},{}", method_token(method), cell.emit());
                }
                FormatArg::Json => {
                    println!(
                        "{{\"h\":{h},\"q\":{q},\"method\":\"{}\",\"num\":\"{}\",\"den\":\"{}\"}}",
                        method_token(method),
                        value.numer(),
                        value.denom()
                    );
                }
            }
            Ok(0)
        }
        Command::Expsum { m, n, k, h, q, format } => {
            let value = two_term_exponential_sum(&ExpSumParams { m, n, k, h, q })?;
            match format {
                FormatArg::Csv => {
                    println!("m,n,k,h,q,re,im");
                    println!("{m},{n},{k},{h},{q},{:.16e},{:.16e}", value.re, value.im);
                }
                FormatArg::Json => {
                    println!(
                        "{{\"m\":{m},\"n\":{n},\"k\":{k},\"h\":{h},\"q\":{q},\
                         \"re\":{:.16e},\"im\":{:.16e}}}",
                        value.re, value.im
                    );
                }
            }
            Ok(0)
        }
        Command::Verify { target, opts } => run_scan(parse_target(&target, false)?, &opts),
        Command::Scan { target, opts } => run_scan(parse_target(&target, true)?, &opts),
        Command::Golden { action, golden_dir, workers, tolerance, pmax } => {
            let dir = golden::resolve_dir(golden_dir.as_deref());
            match action {
                GoldenAction::Record => {
                    let written = golden::record_all(&dir, workers, pmax)?;
                    for (name, rows) in written {
                        println!("wrote {} ({rows} rows)", dir.join(name).display());
                    }
                    Ok(0)
                }
                GoldenAction::Check => {
                    let report = golden::check_all(&dir, workers, tolerance, pmax)?;
                    for (name, rows, bad) in &report.targets {
                        println!(
                            "{name}: {rows} rows, {}",
                            if *bad == 0 { "ok".to_string() } else { format!("{bad} differ") }
                        );
                    }
                    println!("constants: {}", if report.constants_ok { "ok" } else { "differ" });
                    Ok(if report.all_ok() { 0 } else { 1 })
                }
            }
        }
    }
}

fn method_token(m: MethodArg) -> &'static str {
    match m {
        MethodArg::Direct => "direct",
        MethodArg::Reciprocity => "reciprocity",
    }
}
