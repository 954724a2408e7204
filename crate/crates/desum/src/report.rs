//! Result records and their CSV/JSON wire formats.
//!
//! The emission rules are part of the tool's contract: a fixed nine-column
//! header, exact integers in decimal, exact rationals as `num/den`, floats
//! with 17 significant digits (`{:.16e}`), and empty cells for
//! not-applicable slots. Emission is hand-rolled so the bytes are fully
//! specified; parsing accepts exactly what emission produces.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::Value;
use std::fmt;
use std::str::FromStr;

use crate::arith::Rational;
use crate::{Error, Result};

/// The fixed CSV column set.
pub const CSV_HEADER: &str =
    "target,p,p_mod_8,brute_or_mean,closed_or_main,ratio,normalized_residual,verdict,runtime_ms";

/// Outcome of one check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Exact agreement of two exactly-computed quantities.
    Match,
    /// Exact disagreement.
    Mismatch,
    /// A bounded quantity stayed within its pinned envelope.
    BoundOk,
    /// It did not.
    BoundFail,
}

impl Verdict {
    /// Verdicts that do not fail a run.
    pub fn is_pass(self) -> bool {
        matches!(self, Verdict::Match | Verdict::BoundOk)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Match => "MATCH",
            Verdict::Mismatch => "MISMATCH",
            Verdict::BoundOk => "BOUND_OK",
            Verdict::BoundFail => "BOUND_FAIL",
        })
    }
}

impl FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "MATCH" => Ok(Verdict::Match),
            "MISMATCH" => Ok(Verdict::Mismatch),
            "BOUND_OK" => Ok(Verdict::BoundOk),
            "BOUND_FAIL" => Ok(Verdict::BoundFail),
            other => Err(Error::BadRecordField(format!("verdict {other:?}"))),
        }
    }
}

/// One value slot of a record: exact integer, exact rational, float, or
/// not applicable.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Empty,
    Int(i128),
    Rat(Rational),
    Float(f64),
}

impl Cell {
    /// Reduced exact ratio `num/den`, or Empty when the denominator is 0.
    /// Normalizes to Int when the reduced ratio is integral, so a value and
    /// its wire-format reparse are the same cell.
    pub fn exact_ratio(num: i128, den: i128) -> Cell {
        if den == 0 {
            return Cell::Empty;
        }
        let r = Rational::new(BigInt::from(num), BigInt::from(den));
        if r.denom().is_one() {
            if let Some(v) = r.numer().to_i128() {
                return Cell::Int(v);
            }
        }
        Cell::Rat(r)
    }

    /// Numeric view for tolerance checks; Empty has none.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Empty => None,
            Cell::Int(v) => Some(*v as f64),
            Cell::Rat(r) => r.to_f64(),
            Cell::Float(v) => Some(*v),
        }
    }

    /// The CSV/JSON-string payload of the cell.
    pub fn emit(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Int(v) => v.to_string(),
            Cell::Rat(r) => {
                if r.denom().is_one() {
                    r.numer().to_string()
                } else {
                    format!("{}/{}", r.numer(), r.denom())
                }
            }
            Cell::Float(v) => format_float(*v),
        }
    }

    /// Inverse of `emit`: "" -> Empty, a '/' means rational, a '.' or
    /// exponent means float, anything else is an integer.
    fn parse(s: &str) -> Result<Cell> {
        if s.is_empty() {
            return Ok(Cell::Empty);
        }
        if s.contains('/') {
            let (n, d) = s.split_once('/').expect("checked");
            let numer: BigInt =
                n.parse().map_err(|_| Error::BadRecordField(format!("rational {s:?}")))?;
            let denom: BigInt =
                d.parse().map_err(|_| Error::BadRecordField(format!("rational {s:?}")))?;
            if denom.is_zero() {
                return Err(Error::BadRecordField(format!("rational {s:?}")));
            }
            return Ok(Cell::Rat(Rational::new(numer, denom)));
        }
        if s.contains('.') || s.contains('e') || s.contains('E') {
            return s
                .parse::<f64>()
                .map(Cell::Float)
                .map_err(|_| Error::BadRecordField(format!("float {s:?}")));
        }
        s.parse::<i128>().map(Cell::Int).map_err(|_| Error::BadRecordField(format!("int {s:?}")))
    }
}

/// 17 significant digits — enough to round-trip every f64 exactly.
fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// One row of a verification run.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub target: String,
    pub p: u64,
    pub p_mod_8: u8,
    pub brute_or_mean: Cell,
    pub closed_or_main: Cell,
    pub ratio: Cell,
    pub normalized_residual: Cell,
    pub verdict: Verdict,
    pub runtime_ms: u64,
    /// Free-form branch/parameter detail. Kept in memory for diagnostics;
    /// never serialized.
    pub witness: Option<String>,
}

impl Record {
    pub fn new(target: &str, p: u64) -> Record {
        Record {
            target: target.to_string(),
            p,
            p_mod_8: (p % 8) as u8,
            brute_or_mean: Cell::Empty,
            closed_or_main: Cell::Empty,
            ratio: Cell::Empty,
            normalized_residual: Cell::Empty,
            verdict: Verdict::Match,
            runtime_ms: 0,
            witness: None,
        }
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.target,
            self.p,
            self.p_mod_8,
            self.brute_or_mean.emit(),
            self.closed_or_main.emit(),
            self.ratio.emit(),
            self.normalized_residual.emit(),
            self.verdict,
            self.runtime_ms
        )
    }

    fn to_json_object(&self) -> String {
        let mut out = String::from("{");
        out.push_str(&format!("\"target\":\"{}\",", self.target));
        out.push_str(&format!("\"p\":{},", self.p));
        out.push_str(&format!("\"p_mod_8\":{},", self.p_mod_8));
        out.push_str(&format!("\"brute_or_mean\":{},", json_cell(&self.brute_or_mean)));
        out.push_str(&format!("\"closed_or_main\":{},", json_cell(&self.closed_or_main)));
        out.push_str(&format!("\"ratio\":{},", json_cell(&self.ratio)));
        out.push_str(&format!(
            "\"normalized_residual\":{},",
            json_cell(&self.normalized_residual)
        ));
        out.push_str(&format!("\"verdict\":\"{}\",", self.verdict));
        out.push_str(&format!("\"runtime_ms\":{}", self.runtime_ms));
        out.push('}');
        out
    }
}

/// Exact cells become JSON strings (i128 and big rationals overflow JSON
/// numbers); floats are bare numbers; Empty is null.
fn json_cell(c: &Cell) -> String {
    match c {
        Cell::Empty => "null".into(),
        Cell::Float(v) => format_float(*v),
        exact => format!("\"{}\"", exact.emit()),
    }
}

/// Full CSV document: header plus one line per record, '\n'-terminated.
pub fn to_csv(records: &[Record]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}

/// JSON array of row objects, one object per line, '\n'-terminated.
pub fn to_json(records: &[Record]) -> String {
    let mut out = String::from("[");
    for (i, r) in records.iter().enumerate() {
        out.push_str(if i == 0 { "\n  " } else { ",\n  " });
        out.push_str(&r.to_json_object());
    }
    out.push_str("\n]\n");
    out
}

/// Parse a CSV document produced by [`to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<Record>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(Error::BadRecordField(format!("csv header {other:?}"))),
    }
    let mut records = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::BadRecordField(format!("csv row with {} fields", fields.len())));
        }
        records.push(Record {
            target: fields[0].to_string(),
            p: fields[1].parse().map_err(|_| Error::BadRecordField(format!("p {:?}", fields[1])))?,
            p_mod_8: fields[2]
                .parse()
                .map_err(|_| Error::BadRecordField(format!("p_mod_8 {:?}", fields[2])))?,
            brute_or_mean: Cell::parse(fields[3])?,
            closed_or_main: Cell::parse(fields[4])?,
            ratio: Cell::parse(fields[5])?,
            normalized_residual: Cell::parse(fields[6])?,
            verdict: fields[7].parse()?,
            runtime_ms: fields[8]
                .parse()
                .map_err(|_| Error::BadRecordField(format!("runtime_ms {:?}", fields[8])))?,
            witness: None,
        });
    }
    Ok(records)
}

/// Parse a JSON document produced by [`to_json`].
pub fn parse_json(text: &str) -> Result<Vec<Record>> {
    let value: Value = serde_json::from_str(text)?;
    let rows = value
        .as_array()
        .ok_or_else(|| Error::BadRecordField("json root is not an array".into()))?;
    let mut records = Vec::new();
    for row in rows {
        let obj = row
            .as_object()
            .ok_or_else(|| Error::BadRecordField("json row is not an object".into()))?;
        let get = |k: &str| -> Result<&Value> {
            obj.get(k).ok_or_else(|| Error::BadRecordField(format!("missing key {k:?}")))
        };
        let cell = |k: &str| -> Result<Cell> {
            match get(k)? {
                Value::Null => Ok(Cell::Empty),
                Value::Number(n) => n
                    .as_f64()
                    .map(Cell::Float)
                    .ok_or_else(|| Error::BadRecordField(format!("float {k:?}"))),
                Value::String(s) => Cell::parse(s),
                other => Err(Error::BadRecordField(format!("cell {k:?}: {other}"))),
            }
        };
        records.push(Record {
            target: get("target")?
                .as_str()
                .ok_or_else(|| Error::BadRecordField("target".into()))?
                .to_string(),
            p: get("p")?.as_u64().ok_or_else(|| Error::BadRecordField("p".into()))?,
            p_mod_8: get("p_mod_8")?
                .as_u64()
                .ok_or_else(|| Error::BadRecordField("p_mod_8".into()))? as u8,
            brute_or_mean: cell("brute_or_mean")?,
            closed_or_main: cell("closed_or_main")?,
            ratio: cell("ratio")?,
            normalized_residual: cell("normalized_residual")?,
            verdict: get("verdict")?
                .as_str()
                .ok_or_else(|| Error::BadRecordField("verdict".into()))?
                .parse()?,
            runtime_ms: get("runtime_ms")?
                .as_u64()
                .ok_or_else(|| Error::BadRecordField("runtime_ms".into()))?,
            witness: None,
        });
    }
    Ok(records)
}

/// Process exit code: 0 when every verdict passes, 1 otherwise.
pub fn exit_code_for(records: &[Record]) -> i32 {
    if records.iter().all(|r| r.verdict.is_pass()) {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_records() -> Vec<Record> {
        let mut a = Record::new("lemma21", 13);
        a.brute_or_mean = Cell::Int(140400);
        a.closed_or_main = Cell::Int(146146);
        a.ratio = Cell::exact_ratio(140400, 146146);
        a.normalized_residual = Cell::Float(-3.931_281e-2);
        a.verdict = Verdict::Mismatch;

        let mut b = Record::new("t11", 101);
        b.brute_or_mean = Cell::Float(2.0e9);
        b.closed_or_main = Cell::Float(2.55e9);
        b.ratio = Cell::Float(0.784);
        b.normalized_residual = Cell::Float(-6.1e-4);
        b.verdict = Verdict::BoundOk;

        let mut c = Record::new("lemma25", 7);
        c.brute_or_mean = Cell::Rat(Rational::new(BigInt::from(0), BigInt::from(1)));
        c.closed_or_main = Cell::Rat(Rational::new(BigInt::from(1), BigInt::from(18)));
        c.verdict = Verdict::Match;
        vec![a, b, c]
    }

    #[test]
    fn csv_header_is_fixed() {
        let text = to_csv(&sample_records());
        assert!(text.starts_with(
            "target,p,p_mod_8,brute_or_mean,closed_or_main,ratio,normalized_residual,verdict,runtime_ms\n"
        ));
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn csv_round_trip() {
        let records = sample_records();
        let text = to_csv(&records);
        let parsed = parse_csv(&text).unwrap();
        // re-emission is byte-identical
        assert_eq!(to_csv(&parsed), text);
        assert_eq!(parsed.len(), records.len());
        assert_eq!(parsed[0].verdict, Verdict::Mismatch);
        assert_eq!(parsed[2].closed_or_main, Cell::Rat(Rational::new(1.into(), 18.into())));
    }

    #[test]
    fn json_round_trip() {
        let records = sample_records();
        let text = to_json(&records);
        let parsed = parse_json(&text).unwrap();
        assert_eq!(to_json(&parsed), text);
        assert_eq!(parsed[1].brute_or_mean, Cell::Float(2.0e9));
        // valid JSON according to an independent parser
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 3);
    }

    #[test]
    fn rational_cells() {
        assert_eq!(Cell::exact_ratio(140400, 146146).emit(), "5400/5621");
        assert_eq!(Cell::exact_ratio(4, 2).emit(), "2");
        assert_eq!(Cell::exact_ratio(5, 0), Cell::Empty);
        assert_eq!(Cell::parse("-1/18").unwrap().emit(), "-1/18");
        assert_eq!(Cell::parse("").unwrap(), Cell::Empty);
        assert!(Cell::parse("1/0").is_err());
    }

    #[test]
    fn float_cells_17_digits() {
        let c = Cell::Float(1.0 / 3.0);
        assert_eq!(c.emit(), "3.3333333333333331e-1");
        let back = Cell::parse(&c.emit()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn exit_codes() {
        let mut records = sample_records();
        assert_eq!(exit_code_for(&records), 1); // contains a MISMATCH
        records.remove(0);
        assert_eq!(exit_code_for(&records), 0);
        assert_eq!(exit_code_for(&[]), 0);
    }

    #[test]
    fn bad_inputs_rejected() {
        assert!(parse_csv("wrong,header\n").is_err());
        assert!(parse_csv(&format!("{CSV_HEADER}\nlemma21,5,5\n")).is_err());
        assert!(parse_json("{\"not\":\"an array\"}").is_err());
        assert!("BOGUS".parse::<Verdict>().is_err());
    }

    proptest! {
        /// Every f64 bit pattern that is finite survives emit/parse exactly.
        #[test]
        fn float_round_trip_exact(bits in any::<u64>()) {
            let v = f64::from_bits(bits);
            prop_assume!(v.is_finite());
            let c = Cell::Float(v);
            let back = Cell::parse(&c.emit()).unwrap();
            if let Cell::Float(w) = back {
                prop_assert_eq!(v.to_bits(), w.to_bits());
            } else {
                prop_assert!(false, "reparsed as {:?}", back);
            }
        }

        /// Integer cells round-trip through both wire formats.
        #[test]
        fn int_round_trip(v in any::<i64>()) {
            let mut r = Record::new("lemma21", 5);
            r.brute_or_mean = Cell::Int(v as i128);
            let text = to_csv(&[r.clone()]);
            let parsed = parse_csv(&text).unwrap();
            prop_assert_eq!(&parsed[0].brute_or_mean, &r.brute_or_mean);
            let jtext = to_json(&[r.clone()]);
            let jparsed = parse_json(&jtext).unwrap();
            prop_assert_eq!(&jparsed[0].brute_or_mean, &r.brute_or_mean);
        }
    }
}
