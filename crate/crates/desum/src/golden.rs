//! Golden reference files: record verification runs to CSV, check later
//! runs against them, and track the observed envelope constants.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::hybrid::{prime_scan, ScanTarget};
use crate::report::{parse_csv, to_csv, Cell, Record};
use crate::{Error, Result};

/// Environment variable consulted when no directory is given explicitly.
pub const GOLDEN_DIR_ENV: &str = "DESUM_GOLDEN_DIR";
/// Fallback directory relative to the working directory.
pub const DEFAULT_GOLDEN_DIR: &str = "golden";
/// Relative tolerance for float cells when checking against a recording.
pub const DEFAULT_CHECK_TOLERANCE: f64 = 1e-8;

const CONSTANTS_FILE: &str = "constants.csv";

/// Directory precedence: explicit flag, then `DESUM_GOLDEN_DIR`, then
/// `golden/`.
pub fn resolve_dir(explicit: Option<&Path>) -> PathBuf {
    if let Some(d) = explicit {
        return d.to_path_buf();
    }
    if let Ok(d) = std::env::var(GOLDEN_DIR_ENV) {
        if !d.is_empty() {
            return PathBuf::from(d);
        }
    }
    PathBuf::from(DEFAULT_GOLDEN_DIR)
}

/// (target, lo, hi) scan specs covering every target at its default range,
/// optionally capping every upper bound (used to keep test recordings
/// cheap; calibration recordings use the full defaults).
pub fn default_specs(cap: Option<u64>) -> Vec<(ScanTarget, u64, u64)> {
    ScanTarget::ALL
        .iter()
        .filter_map(|&t| {
            let (lo, hi) = t.default_range();
            let hi = cap.map_or(hi, |c| hi.min(c));
            (lo <= hi).then_some((t, lo, hi))
        })
        .collect()
}

/// Run the given scans and write one `<target>.csv` per spec plus
/// `constants.csv`; returns (file name, row count) pairs.
pub fn record_targets(
    dir: &Path,
    specs: &[(ScanTarget, u64, u64)],
    workers: usize,
) -> Result<Vec<(String, usize)>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut by_target: BTreeMap<&'static str, Vec<Record>> = BTreeMap::new();
    for &(target, lo, hi) in specs {
        let rows = prime_scan(lo, hi, target, workers, false)?;
        let name = format!("{}.csv", target.token());
        fs::write(dir.join(&name), to_csv(&rows))?;
        written.push((name, rows.len()));
        by_target.insert(target.token(), rows);
    }
    let constants = observed_constants(&by_target);
    fs::write(dir.join(CONSTANTS_FILE), constants_csv(&constants))?;
    written.push((CONSTANTS_FILE.to_string(), constants.len()));
    Ok(written)
}

/// Record every target at its default range (optionally capped).
pub fn record_all(dir: &Path, workers: usize, cap: Option<u64>) -> Result<Vec<(String, usize)>> {
    record_targets(dir, &default_specs(cap), workers)
}

/// Outcome of a golden check.
#[derive(Clone, Debug)]
pub struct CheckReport {
    /// (file name, rows compared, rows that differed).
    pub targets: Vec<(String, usize, usize)>,
    pub constants_ok: bool,
}

impl CheckReport {
    pub fn all_ok(&self) -> bool {
        self.constants_ok && self.targets.iter().all(|(_, _, bad)| *bad == 0)
    }
}

/// Re-run the given scans and compare them against the recorded files.
pub fn check_targets(
    dir: &Path,
    specs: &[(ScanTarget, u64, u64)],
    workers: usize,
    tolerance: f64,
) -> Result<CheckReport> {
    let mut targets = Vec::new();
    let mut by_target: BTreeMap<&'static str, Vec<Record>> = BTreeMap::new();
    for &(target, lo, hi) in specs {
        let name = format!("{}.csv", target.token());
        let path = dir.join(&name);
        let stored = parse_csv(&read_golden(&path)?)?;
        let fresh = prime_scan(lo, hi, target, workers, false)?;
        let mut bad = fresh.len().abs_diff(stored.len());
        for (s, f) in stored.iter().zip(&fresh) {
            if !records_close(s, f, tolerance) {
                bad += 1;
            }
        }
        targets.push((name, stored.len(), bad));
        by_target.insert(target.token(), fresh);
    }
    let stored_constants = parse_constants(&read_golden(&dir.join(CONSTANTS_FILE))?)?;
    let fresh_constants = observed_constants(&by_target);
    let constants_ok = stored_constants.len() == fresh_constants.len()
        && stored_constants.iter().zip(&fresh_constants).all(|((ka, va), (kb, vb))| {
            ka == kb && floats_close(*va, *vb, tolerance)
        });
    Ok(CheckReport { targets, constants_ok })
}

/// Check every target at its default range (optionally capped; must match
/// the cap used when recording).
pub fn check_all(
    dir: &Path,
    workers: usize,
    tolerance: f64,
    cap: Option<u64>,
) -> Result<CheckReport> {
    check_targets(dir, &default_specs(cap), workers, tolerance)
}

fn read_golden(path: &Path) -> Result<String> {
    if !path.exists() {
        return Err(Error::MissingGolden(path.display().to_string()));
    }
    Ok(fs::read_to_string(path)?)
}

fn floats_close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    let scale = a.abs().max(b.abs()).max(1e-300);
    ((a - b) / scale).abs() <= tol
}

fn records_close(a: &Record, b: &Record, tol: f64) -> bool {
    a.target == b.target
        && a.p == b.p
        && a.p_mod_8 == b.p_mod_8
        && a.verdict == b.verdict
        && cells_close(&a.brute_or_mean, &b.brute_or_mean, tol)
        && cells_close(&a.closed_or_main, &b.closed_or_main, tol)
        && cells_close(&a.ratio, &b.ratio, tol)
        && cells_close(&a.normalized_residual, &b.normalized_residual, tol)
}

/// Floats compare within tolerance; exact cells compare on their wire
/// representation (a rational that reduces to an integer equals that
/// integer).
fn cells_close(a: &Cell, b: &Cell, tol: f64) -> bool {
    match (a, b) {
        (Cell::Float(x), Cell::Float(y)) => floats_close(*x, *y, tol),
        _ => a.emit() == b.emit(),
    }
}

/// The empirical envelope maxima a full recording pins down, keyed by name.
fn observed_constants(by_target: &BTreeMap<&'static str, Vec<Record>>) -> Vec<(String, f64)> {
    let mut out: BTreeMap<String, f64> = BTreeMap::new();
    let mut fold = |key: &str, value: f64| {
        let slot = out.entry(key.to_string()).or_insert(0.0);
        if value.abs() > *slot {
            *slot = value.abs();
        }
    };
    for (token, rows) in by_target {
        for r in rows {
            let normres = r.normalized_residual.as_f64().unwrap_or(0.0);
            match *token {
                "lemma22" if (r.p - 1) % 5 == 0 => fold("lemma22_dev_over_p3_max", normres),
                "lemma23" => fold("lemma23_max_abs", r.brute_or_mean.as_f64().unwrap_or(0.0)),
                "lemma24" => fold("lemma24_max_abs", r.brute_or_mean.as_f64().unwrap_or(0.0)),
                "lemma26" => fold("lemma26_normres_max", normres),
                "lemma27" => fold("lemma27_scaled_max", normres),
                "t11" if r.p % 4 == 3 => fold("t11_normres_max_3mod4", normres),
                "t11" => fold("t11_normres_max_1mod4", normres),
                "t12" => fold("t12_normres_max", normres),
                // one scan, two row targets
                "wangpan" => match r.target.as_str() {
                    "wangpan31" => fold("wangpan31_normres_max", normres),
                    "wangpan42" => fold("wangpan42_normres_max", normres),
                    _ => {}
                },
                _ => {}
            }
        }
    }
    out.into_iter().collect()
}

fn constants_csv(constants: &[(String, f64)]) -> String {
    let mut text = String::from("constant,value\n");
    for (k, v) in constants {
        text.push_str(&format!("{k},{v:.16e}\n"));
    }
    text
}

fn parse_constants(text: &str) -> Result<Vec<(String, f64)>> {
    let mut lines = text.lines();
    match lines.next() {
        Some("constant,value") => {}
        other => return Err(Error::BadRecordField(format!("constants header {other:?}"))),
    }
    let mut out = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once(',')
            .ok_or_else(|| Error::BadRecordField(format!("constants row {line:?}")))?;
        let value: f64 =
            v.parse().map_err(|_| Error::BadRecordField(format!("constant value {v:?}")))?;
        out.push((k.to_string(), value));
    }
    Ok(out)
}
