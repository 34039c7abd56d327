//! Selection-constant tables and table look-up.
//!
//! Row `k` (divisor truncated to `ŷ = k·2^-u`) holds the integer thresholds
//! `s_{1,k} < … < s_{a,k}`; digit `d >= 1` is selected for a non-negative
//! truncated shifted remainder `ŝ` when `s_{d,k} <= ŝ < s_{d+1,k}`.
//! Negative remainders are handled in sign-magnitude: the digit for `-m` is
//! the negation of the digit for `m`.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine;
use crate::error::{Error, Result};
use crate::exactnum::{ceil_div, pow2};
use crate::params::{divisor_indices, RadixConfig, TruncationPair};

/// Largest `u` or `t` a table may be built for.
pub const MAX_TABLE_BITS: u32 = 30;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionTable {
    cfg: RadixConfig,
    u: u32,
    t: u32,
    /// Row-major, `a` thresholds per divisor index.
    thresholds: Vec<i64>,
}

/// A truncated operand pair presented to the table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncatedOperands {
    /// Divisor index, `ŷ = k·2^-u`.
    pub k: u64,
    /// Truncated shifted remainder in units of `2^-t`.
    pub s_trunc: i64,
}

/// `(numerator, denominator)` of `2^(t-u)` with a common factor removed.
fn scale(u: u32, t: u32) -> (i128, i128) {
    if t >= u {
        (pow2(t - u).expect("bounded"), 1)
    } else {
        (1, pow2(u - t).expect("bounded"))
    }
}

fn check_bits(u: u32, t: u32) -> Result<()> {
    if !(1..=MAX_TABLE_BITS).contains(&u) || !(1..=MAX_TABLE_BITS).contains(&t) {
        return Err(Error::InvalidTruncation(format!("u = {u}, t = {t}; both must lie in 1..={MAX_TABLE_BITS}")));
    }
    Ok(())
}

/// Selection constant `s_{d,k} = ⌈2^(t-u)(d - ρ)(k + 1)⌉`.
pub fn selection_constant(cfg: &RadixConfig, u: u32, t: u32, d: u32, k: u64) -> i64 {
    let m = (cfg.beta() - 1) as i128;
    let (num, den) = scale(u, t);
    // (d - ρ) = (d·m - a)/m
    let value = ceil_div((d as i128 * m - cfg.a() as i128) * (k as i128 + 1) * num, m * den);
    value as i64
}

/// Build the table for an engine-validated pair.
pub fn build_table(cfg: &RadixConfig, u: u32, t: u32) -> Result<SelectionTable> {
    check_bits(u, t)?;
    if !engine::is_validated(cfg, u, t)? {
        return Err(Error::NotValidated { u, t });
    }
    build_table_unvalidated(cfg, u, t)
}

/// Build the table without asking the engine; for experiments on pairs the
/// engine rejects. The verifier can refute the result.
pub fn build_table_unvalidated(cfg: &RadixConfig, u: u32, t: u32) -> Result<SelectionTable> {
    check_bits(u, t)?;
    let a = cfg.a();
    let mut thresholds = Vec::with_capacity((a as usize) << (u - 1));
    for k in divisor_indices(u) {
        thresholds.extend((1..=a).map(|d| selection_constant(cfg, u, t, d, k)));
    }
    Ok(SelectionTable { cfg: *cfg, u, t, thresholds })
}

impl SelectionTable {
    /// Assemble a table from explicit rows, e.g. parsed from a file.
    pub fn from_rows(cfg: RadixConfig, u: u32, t: u32, rows: Vec<(u64, Vec<i64>)>) -> Result<Self> {
        check_bits(u, t)?;
        let a = cfg.a() as usize;
        let expected = divisor_indices(u);
        if rows.len() as u64 != expected.end - expected.start {
            return Err(Error::MalformedTable(format!(
                "expected {} rows for u = {u}, found {}",
                expected.end - expected.start,
                rows.len()
            )));
        }
        let mut thresholds = Vec::with_capacity(a * rows.len());
        for ((k, s), want) in rows.into_iter().zip(expected) {
            if k != want {
                return Err(Error::MalformedTable(format!("row for k = {want} expected, found k = {k}")));
            }
            if s.len() != a {
                return Err(Error::MalformedTable(format!("row k = {k} has {} thresholds, expected {a}", s.len())));
            }
            thresholds.extend(s);
        }
        Ok(SelectionTable { cfg, u, t, thresholds })
    }

    pub fn cfg(&self) -> &RadixConfig {
        &self.cfg
    }

    pub fn u(&self) -> u32 {
        self.u
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn pair(&self) -> TruncationPair {
        TruncationPair::new(self.u, self.t)
    }

    pub fn k_range(&self) -> std::ops::Range<u64> {
        divisor_indices(self.u)
    }

    pub fn row_count(&self) -> usize {
        1 << (self.u - 1)
    }

    /// Thresholds `s_{1,k}..s_{a,k}`.
    pub fn row(&self, k: u64) -> &[i64] {
        let a = self.cfg.a() as usize;
        let i = (k - self.k_range().start) as usize;
        &self.thresholds[i * a..(i + 1) * a]
    }

    pub fn rows(&self) -> impl Iterator<Item = (u64, &[i64])> + '_ {
        self.k_range().zip(self.thresholds.chunks(self.cfg.a() as usize))
    }

    /// `s_{d,k}` for `1 <= d <= a`.
    pub fn threshold(&self, d: u32, k: u64) -> i64 {
        self.row(k)[d as usize - 1]
    }

    /// Largest truncated magnitude reachable at divisor index `k`:
    /// `⌈βρ(k + 1)2^(t-u)⌉`.
    pub fn reachable_max(&self, k: u64) -> i64 {
        let (num, den) = scale(self.u, self.t);
        let m = (self.cfg.beta() - 1) as i128;
        let beta_rho_num = self.cfg.beta() as i128 * self.cfg.a() as i128;
        ceil_div(beta_rho_num * (k as i128 + 1) * num, m * den) as i64
    }
}

/// Table look-up for a truncated operand pair.
pub fn select_digit(table: &SelectionTable, ops: TruncatedOperands) -> Result<i32> {
    if !table.k_range().contains(&ops.k) {
        return Err(Error::OperandOutOfRange(format!("divisor index {} outside {:?}", ops.k, table.k_range())));
    }
    let magnitude = ops.s_trunc.unsigned_abs() as i64;
    if ops.s_trunc == i64::MIN || magnitude > table.reachable_max(ops.k) {
        return Err(Error::OperandOutOfRange(format!(
            "remainder {} outside the reachable range at k = {}",
            ops.s_trunc, ops.k
        )));
    }
    // With s_{0,k} = 0, the digit is the number of thresholds not above m.
    let digit = table.row(ops.k).partition_point(|&s| s <= magnitude) as i32;
    Ok(if ops.s_trunc < 0 { -digit } else { digit })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    Json,
    Csv,
    Text,
}

impl FromStr for TableFormat {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(TableFormat::Json),
            "csv" => Ok(TableFormat::Csv),
            "text" => Ok(TableFormat::Text),
            other => Err(format!("unknown table format `{other}` (json, csv, text)")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TableRow {
    k: u64,
    s: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    beta: u32,
    a: u32,
    u: u32,
    t: u32,
    rows: Vec<TableRow>,
}

pub fn emit_table<W: Write>(table: &SelectionTable, format: TableFormat, mut out: W) -> std::io::Result<()> {
    match format {
        TableFormat::Json => {
            let file = TableFile {
                beta: table.cfg.beta(),
                a: table.cfg.a(),
                u: table.u,
                t: table.t,
                rows: table.rows().map(|(k, s)| TableRow { k, s: s.to_vec() }).collect(),
            };
            serde_json::to_writer(&mut out, &file)?;
            writeln!(out)
        }
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let mut header = vec!["k".to_string()];
            header.extend((1..=table.cfg.a()).map(|d| format!("s_{d}")));
            w.write_record(&header)?;
            for (k, s) in table.rows() {
                let mut record = vec![k.to_string()];
                record.extend(s.iter().map(i64::to_string));
                w.write_record(&record)?;
            }
            w.flush()
        }
        TableFormat::Text => out.write_all(render_text(table).as_bytes()),
    }
}

fn render_text(table: &SelectionTable) -> String {
    let cfg = &table.cfg;
    let width = table
        .thresholds
        .iter()
        .map(|s| s.to_string().len())
        .chain(std::iter::once(cfg.a().to_string().len() + 2))
        .max()
        .unwrap_or(1);
    let kw = table.k_range().end.to_string().len().max(1);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# selection constants: beta={} a={} rho={} u={} t={} (threshold x 2^-{})",
        cfg.beta(),
        cfg.a(),
        cfg.rho(),
        table.u,
        table.t,
        table.t
    );
    let _ = write!(s, "{:>kw$}", "k");
    for d in 1..=cfg.a() {
        let _ = write!(s, " {:>width$}", format!("s_{d}"));
    }
    s.push('\n');
    for (k, row) in table.rows() {
        let _ = write!(s, "{k:>kw$}");
        for v in row {
            let _ = write!(s, " {v:>width$}");
        }
        s.push('\n');
    }
    s
}

/// Parse the JSON interchange format.
pub fn parse_json<R: Read>(input: R) -> Result<SelectionTable> {
    let file: TableFile = serde_json::from_reader(input).map_err(|e| Error::MalformedTable(e.to_string()))?;
    let cfg = RadixConfig::new(file.beta, file.a)?;
    let rows = file.rows.into_iter().map(|r| (r.k, r.s)).collect();
    SelectionTable::from_rows(cfg, file.u, file.t, rows)
}

/// Parse the CSV format; radix and `t` are not part of it and must be given.
pub fn parse_csv<R: Read>(input: R, beta: u32, t: u32) -> Result<SelectionTable> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers().map_err(|e| Error::MalformedTable(e.to_string()))?.clone();
    let a = header
        .len()
        .checked_sub(1)
        .filter(|&a| a > 0)
        .ok_or_else(|| Error::MalformedTable("header must be k,s_1,...,s_a".into()))? as u32;
    let cfg = RadixConfig::new(beta, a)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::MalformedTable(e.to_string()))?;
        let mut fields = record.iter().map(|f| f.trim().parse::<i64>());
        let k = fields
            .next()
            .and_then(|k| k.ok())
            .filter(|&k| k > 0)
            .ok_or_else(|| Error::MalformedTable("bad k column".into()))? as u64;
        let s =
            fields.collect::<std::result::Result<Vec<i64>, _>>().map_err(|e| Error::MalformedTable(e.to_string()))?;
        rows.push((k, s));
    }
    let first = rows.first().map(|r| r.0).ok_or_else(|| Error::MalformedTable("no rows".into()))?;
    if !first.is_power_of_two() {
        return Err(Error::MalformedTable(format!("first row k = {first} is not 2^(u-1)")));
    }
    let u = first.trailing_zeros() + 1;
    SelectionTable::from_rows(cfg, u, t, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn radix4_table() -> SelectionTable {
        build_table(&RadixConfig::new(4, 2).unwrap(), 4, 4).unwrap()
    }

    fn ops(k: u64, s_trunc: i64) -> TruncatedOperands {
        TruncatedOperands { k, s_trunc }
    }

    #[test]
    fn radix4_constants() {
        let t = radix4_table();
        assert_eq!(t.threshold(1, 8), 3);
        assert_eq!(t.threshold(2, 8), 12);
        assert_eq!(t.threshold(1, 15), 6);
        assert_eq!(t.row_count(), 8);
    }

    #[test]
    fn build_rejects_unvalidated_pairs() {
        let c = RadixConfig::new(16, 15).unwrap();
        assert_eq!(build_table(&c, 9, 2), Err(Error::NotValidated { u: 9, t: 2 }));
        assert!(build_table_unvalidated(&c, 9, 2).is_ok());
        assert!(build_table(&c, 6, 3).is_ok());
        assert!(matches!(build_table_unvalidated(&c, 40, 2), Err(Error::InvalidTruncation(_))));
    }

    #[test]
    fn digit_selection() {
        let t = radix4_table();
        assert_eq!(select_digit(&t, ops(8, 0)), Ok(0));
        assert_eq!(select_digit(&t, ops(8, 2)), Ok(0));
        assert_eq!(select_digit(&t, ops(8, 3)), Ok(1));
        assert_eq!(select_digit(&t, ops(8, 11)), Ok(1));
        assert_eq!(select_digit(&t, ops(8, 12)), Ok(2));
        assert_eq!(select_digit(&t, ops(8, -3)), Ok(-1));
        assert!(select_digit(&t, ops(7, 0)).is_err());
        assert!(select_digit(&t, ops(16, 0)).is_err());
        let top = t.reachable_max(8);
        assert_eq!(select_digit(&t, ops(8, top)), Ok(2));
        assert!(select_digit(&t, ops(8, top + 1)).is_err());
        assert!(select_digit(&t, ops(8, -top - 1)).is_err());
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        emit_table(&radix4_table(), TableFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "k,s_1,s_2");
        assert_eq!(lines.len(), 9);
        assert_eq!(lines[1], "8,3,12");
        let back = parse_csv(text.as_bytes(), 4, 4).unwrap();
        assert_eq!(back, radix4_table());
    }

    #[test]
    fn json_schema() {
        let mut buf = Vec::new();
        emit_table(&radix4_table(), TableFormat::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["beta"], 4);
        assert_eq!(v["a"], 2);
        assert_eq!(v["u"], 4);
        assert_eq!(v["t"], 4);
        assert_eq!(v["rows"][0]["k"], 8);
        assert_eq!(v["rows"][0]["s"], serde_json::json!([3, 12]));
        assert_eq!(v["rows"].as_array().unwrap().len(), 8);
    }

    #[test]
    fn text_has_every_row() {
        let mut buf = Vec::new();
        emit_table(&radix4_table(), TableFormat::Text, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2 + 8);
        assert!(text.lines().nth(2).unwrap().split_whitespace().eq(["8", "3", "12"]));
    }

    #[test]
    fn example_table_dimensions() {
        let t = build_table(&RadixConfig::new(16, 8).unwrap(), 9, 7).unwrap();
        assert_eq!(t.row_count(), 256);
        assert!(t.rows().all(|(_, r)| r.len() == 8));
    }

    #[test]
    fn malformed_json_is_rejected() {
        assert!(matches!(parse_json(&b"{\"beta\":4"[..]), Err(Error::MalformedTable(_))));
        let bad_rows = br#"{"beta":4,"a":2,"u":4,"t":4,"rows":[{"k":8,"s":[3,12]}]}"#;
        assert!(matches!(parse_json(&bad_rows[..]), Err(Error::MalformedTable(_))));
        let bad_radix = br#"{"beta":2,"a":1,"u":4,"t":4,"rows":[]}"#;
        assert_eq!(parse_json(&bad_radix[..]), Err(Error::RadixTwo));
    }

    /// Every table the engine validates for small radices.
    fn small_tables() -> &'static [SelectionTable] {
        static TABLES: std::sync::OnceLock<Vec<SelectionTable>> = std::sync::OnceLock::new();
        TABLES.get_or_init(|| {
            RadixConfig::all(2..=4)
                .iter()
                .flat_map(|c| {
                    engine::enumerate_params(c).pairs().into_iter().map(move |p| build_table(c, p.u, p.t).unwrap())
                })
                .collect()
        })
    }

    #[test]
    fn thresholds_are_monotone() {
        for table in small_tables() {
            let mut prev: Option<Vec<i64>> = None;
            for (_, row) in table.rows() {
                assert!(row[0] >= 0);
                assert!(row.windows(2).all(|w| w[0] < w[1]));
                if let Some(p) = &prev {
                    assert!(p.iter().zip(row).all(|(a, b)| a <= b));
                }
                prev = Some(row.to_vec());
            }
        }
    }

    #[test]
    fn thresholds_sit_in_the_bracket() {
        // ⌈L⌉ <= s <= ⌊U⌋ - 1 with L, U the two sides of the selection condition.
        for table in small_tables() {
            let c = *table.cfg();
            let rho = c.rho();
            let scale = crate::Rational::pow2(table.t() as i32 - table.u() as i32).unwrap();
            for (k, row) in table.rows() {
                for (i, &s) in row.iter().enumerate() {
                    let d = crate::Rational::from_int(i as i128 + 1);
                    let kr = crate::Rational::from_int(k as i128);
                    let lo = (scale * (d - rho) * (kr + crate::Rational::ONE)).ceil();
                    let hi = (scale * (d + rho - crate::Rational::ONE) * kr).floor() - 1;
                    assert_eq!(s as i128, lo);
                    assert!(s as i128 <= hi, "{c} {:?} d={} k={k}", table.pair(), i + 1);
                }
            }
        }
    }

    #[test]
    fn every_reachable_remainder_gets_a_digit() {
        for table in small_tables() {
            let a = table.cfg().a() as i32;
            for k in table.k_range() {
                for s in -table.reachable_max(k)..=table.reachable_max(k) {
                    let d = select_digit(table, ops(k, s)).unwrap();
                    assert!((-a..=a).contains(&d));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn selection_is_odd(k_off in 0u64..8, m in 0i64..30) {
            let t = radix4_table();
            let k = 8 + k_off;
            let m = m.min(t.reachable_max(k));
            prop_assert_eq!(select_digit(&t, ops(k, -m)).unwrap(), -select_digit(&t, ops(k, m)).unwrap());
        }

        #[test]
        fn json_round_trip(idx in 0usize..64) {
            let tables = small_tables();
            let table = &tables[idx % tables.len()];
            let mut buf = Vec::new();
            emit_table(table, TableFormat::Json, &mut buf).unwrap();
            prop_assert_eq!(&parse_json(&buf[..]).unwrap(), table);
        }
    }
}
