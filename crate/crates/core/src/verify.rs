//! Independent oracles for selection tables.
//!
//! Nothing here evaluates the margin `Δ` or the closed-form bounds. The
//! geometric oracle works from the digit regions of the P-D plane directly:
//! digit `d` may be selected at a point `(y, P)` (divisor, shifted remainder)
//! when `(d - ρ)y <= P <= (d + ρ)y`. A table entry is correct when its digit
//! is valid on the whole uncertainty rectangle of the entry.
//!
//! The remainder side of an uncertainty rectangle spans two units of `2^-t`:
//! the truncated estimate `ŝ` of a redundant (carry-save) shifted remainder
//! satisfies `ŝ·2^-t <= P < (ŝ + 2)·2^-t`. Rectangles are closed on every
//! side.
//!
//! The second oracle runs the division recurrence `r' = βr - q·y` exactly
//! and checks `|r| <= ρy` and the reconstruction identity at every step.

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{self, Witness};
use crate::error::{Error, Result};
use crate::exactnum::{ArithError, Dyadic, Rational};
use crate::params::{self, divisor_indices, RadixConfig};
use crate::tables::{self, select_digit, SelectionTable, TruncatedOperands};

/// Height of an uncertainty rectangle in units of `2^-t`.
pub const REMAINDER_ULPS: i128 = 2;

/// Closed rectangle `[y_lo, y_hi] × [p_lo, p_hi]` in the P-D plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rectangle {
    pub y_lo: Dyadic,
    pub y_hi: Dyadic,
    pub p_lo: Dyadic,
    pub p_hi: Dyadic,
}

impl Rectangle {
    pub fn new(y_lo: Dyadic, y_hi: Dyadic, p_lo: Dyadic, p_hi: Dyadic) -> Result<Self> {
        if y_lo >= y_hi || p_lo >= p_hi {
            return Err(Error::OperandOutOfRange("empty rectangle".into()));
        }
        Ok(Rectangle { y_lo, y_hi, p_lo, p_hi })
    }

    /// Rectangle of the truncated pair `(k·2^-u, ŝ·2^-t)`.
    pub fn cell(k: u64, u: u32, s: i64, t: u32) -> Self {
        let (u, t) = (u as i32, t as i32);
        Rectangle {
            y_lo: Dyadic::new(k as i128, -u),
            y_hi: Dyadic::new(k as i128 + 1, -u),
            p_lo: Dyadic::new(s as i128, -t),
            p_hi: Dyadic::new(s as i128 + REMAINDER_ULPS, -t),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// The rectangle reaches below `(d - ρ)y`.
    Lower,
    /// The rectangle reaches above `(d + ρ)y`.
    Upper,
}

/// `lhs_coef · lhs <= rhs_coef · rhs`, exactly.
fn scaled_le(lhs_coef: i128, lhs: Dyadic, rhs_coef: i128, rhs: Dyadic) -> bool {
    let l = lhs.checked_mul_int(lhs_coef).expect("region bound overflow");
    let r = rhs.checked_mul_int(rhs_coef).expect("region bound overflow");
    l <= r
}

/// `(d - ρ)·y_hi <= p_lo`, with ρ = a/m: `(d·m - a)·y_hi <= m·p_lo`.
fn lower_side_ok(cfg: &RadixConfig, d: i64, rect: &Rectangle) -> bool {
    let m = (cfg.beta() - 1) as i128;
    scaled_le(d as i128 * m - cfg.a() as i128, rect.y_hi, m, rect.p_lo)
}

/// `p_hi <= (d + ρ)·y_lo`.
fn upper_side_ok(cfg: &RadixConfig, d: i64, rect: &Rectangle) -> bool {
    let m = (cfg.beta() - 1) as i128;
    scaled_le(m, rect.p_hi, d as i128 * m + cfg.a() as i128, rect.y_lo)
}

/// The side of digit `d`'s region the rectangle crosses, if any. The upper
/// side of digit `a` is `(a + ρ)y = βρy`, the ceiling of reachable shifted
/// remainders, so it is not checked.
pub fn region_violation(cfg: &RadixConfig, d: u32, rect: &Rectangle) -> Option<Side> {
    let d = d as i64;
    if !lower_side_ok(cfg, d, rect) {
        Some(Side::Lower)
    } else if d != cfg.a() as i64 && !upper_side_ok(cfg, d, rect) {
        Some(Side::Upper)
    } else {
        None
    }
}

pub fn digit_region_contains(cfg: &RadixConfig, d: u32, rect: &Rectangle) -> bool {
    region_violation(cfg, d, rect).is_none()
}

/// A table entry whose rectangle leaves the region of its digit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub k: u64,
    /// Truncated shifted remainder of the entry.
    pub s: i64,
    /// Digit whose selection constant `s_{d,k}` is misplaced: the selected
    /// digit for a lower-side failure, the next digit for an upper-side one.
    pub d: u32,
    pub side: Side,
}

impl Violation {
    fn new(k: u64, s: i64, chosen: u32, side: Side) -> Self {
        let d = match side {
            Side::Lower => chosen,
            Side::Upper => chosen + 1,
        };
        Violation { k, s, d, side }
    }

    /// The digit the table selected for this entry.
    pub fn chosen_digit(&self) -> u32 {
        match self.side {
            Side::Lower => self.d,
            Side::Upper => self.d - 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub cfg: RadixConfig,
    pub u: u32,
    pub t: u32,
    /// Reachable non-negative entries covered by the check.
    pub checked: u64,
    /// Sorted by `(k, s)`.
    pub violations: Vec<Violation>,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    valid: bool,
    checked: u64,
    violations: &'a [Violation],
}

impl VerificationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    /// `{"valid", "checked", "violations": [{"k", "s", "d", "side"}]}`.
    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(ReportJson { valid: self.is_valid(), checked: self.checked, violations: &self.violations })
            .expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        self.to_value().to_string()
    }
}

/// Largest `ŝ` whose rectangle meets the wedge `P <= (a + ρ)y` at index `k`.
fn top_cell(table: &SelectionTable, k: u64) -> i64 {
    let cfg = table.cfg();
    let mut s = table.reachable_max(k);
    let reaches = |s: i64| {
        let rect = Rectangle::cell(k, table.u(), s, table.t());
        let m = (cfg.beta() - 1) as i128;
        scaled_le(m, rect.p_lo, cfg.beta() as i128 * cfg.a() as i128, rect.y_hi)
    };
    while s > 0 && !reaches(s) {
        s -= 1;
    }
    s
}

fn check_cell(table: &SelectionTable, k: u64, s: i64) -> Option<Violation> {
    let digit = select_digit(table, TruncatedOperands { k, s_trunc: s }).expect("cell within reachable range") as u32;
    let rect = Rectangle::cell(k, table.u(), s, table.t());
    region_violation(table.cfg(), digit, &rect).map(|side| Violation::new(k, s, digit, side))
}

/// Check one row. Within the run of entries selecting the same digit the
/// rectangles are vertical translates, so the lower side is tightest at the
/// bottom entry and the upper side at the top entry; runs are checked from
/// both ends inward until an entry passes. Rows whose thresholds are not
/// increasing are scanned entry by entry.
fn verify_row(table: &SelectionTable, k: u64) -> (u64, Vec<Violation>) {
    let top = top_cell(table, k);
    let row = table.row(k);
    let ordered = row.first().is_some_and(|&s| s >= 0) && row.windows(2).all(|w| w[0] < w[1]);
    let mut found = BTreeMap::new();
    if !ordered {
        for s in 0..=top {
            if let Some(v) = check_cell(table, k, s) {
                found.insert(s, v);
            }
        }
    } else {
        let a = row.len();
        for d in 0..=a {
            let lo = if d == 0 { 0 } else { row[d - 1] };
            let hi = if d == a { top } else { (row[d] - 1).min(top) };
            let mut s = lo;
            while s <= hi {
                match check_cell(table, k, s) {
                    Some(v) => found.insert(s, v),
                    None => break,
                };
                s += 1;
            }
            let mut s = hi;
            while s >= lo && !found.contains_key(&s) {
                match check_cell(table, k, s) {
                    Some(v) => found.insert(s, v),
                    None => break,
                };
                s -= 1;
            }
        }
    }
    ((top + 1) as u64, found.into_values().collect())
}

/// Geometric check of every reachable non-negative entry of the table.
pub fn verify_table_geometric(table: &SelectionTable) -> VerificationReport {
    let ks: Vec<u64> = table.k_range().collect();
    #[cfg(feature = "parallel")]
    let per_row: Vec<(u64, Vec<Violation>)> = {
        use rayon::prelude::*;
        ks.par_iter().map(|&k| verify_row(table, k)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_row: Vec<(u64, Vec<Violation>)> = ks.iter().map(|&k| verify_row(table, k)).collect();

    let mut checked = 0;
    let mut violations = Vec::new();
    for (count, v) in per_row {
        checked += count;
        violations.extend(v);
    }
    VerificationReport { cfg: *table.cfg(), u: table.u(), t: table.t(), checked, violations }
}

/// Smallest `s` in `[lo, hi]` satisfying a predicate that is monotone
/// (false then true) on that interval.
fn first_true(mut lo: i64, mut hi: i64, pred: impl Fn(i64) -> bool) -> Option<i64> {
    if !pred(hi) {
        return None;
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(lo)
}

/// Cells `(d, k)` for which no integer selection constant exists: every
/// placement of `s_{d,k}` either lets the lowest rectangle of digit `d`
/// cross `(d - ρ)y` or the highest rectangle of digit `d - 1` cross
/// `(d - 1 + ρ)y`. Empty iff some table with parameters `(u, t)` is valid.
pub fn find_parameter_violations(cfg: &RadixConfig, u: u32, t: u32) -> Vec<Witness> {
    // (d - ρ)y <= a for y < 1, so s = a·2^t always clears the lower side.
    let ceiling = (cfg.a() as i64) << t;
    let mut out = Vec::new();
    for d in 1..=cfg.a() {
        for k in divisor_indices(u) {
            let lowest = first_true(0, ceiling, |s| lower_side_ok(cfg, d as i64, &Rectangle::cell(k, u, s, t)))
                .expect("ceiling clears the lower side");
            // The upper side only gets harder as s grows, so the lowest
            // admissible s is the only candidate worth trying.
            if !upper_side_ok(cfg, d as i64 - 1, &Rectangle::cell(k, u, lowest - 1, t)) {
                out.push(Witness { d, k });
            }
        }
    }
    out
}

/// How the simulator truncates the shifted remainder `|βr|` to `t` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateModel {
    /// Non-redundant remainder: `⌊|P|·2^t⌋`, error below one unit.
    Truncate,
    /// Carry-save remainder: `|P|` is split into two random non-negative
    /// words which are truncated separately, error below two units.
    CarrySave,
    /// Carry-save remainder split so that the estimate is as low as the
    /// word width allows.
    CarrySaveLag,
}

impl EstimateModel {
    pub const ALL: [EstimateModel; 3] =
        [EstimateModel::Truncate, EstimateModel::CarrySave, EstimateModel::CarrySaveLag];
}

impl std::str::FromStr for EstimateModel {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "truncate" => Ok(EstimateModel::Truncate),
            "carry-save" => Ok(EstimateModel::CarrySave),
            "carry-save-lag" => Ok(EstimateModel::CarrySaveLag),
            other => Err(format!("unknown estimate model `{other}` (truncate, carry-save, carry-save-lag)")),
        }
    }
}

/// Produces the truncated magnitude of a shifted remainder.
pub trait RemainderEstimator {
    fn estimate(&mut self, magnitude: Dyadic, t: u32) -> Result<i64, ArithError>;
}

pub struct Truncation;

impl RemainderEstimator for Truncation {
    fn estimate(&mut self, magnitude: Dyadic, t: u32) -> Result<i64, ArithError> {
        Ok(magnitude.shl(t as i32).floor()? as i64)
    }
}

pub struct CarrySaveSplit<R> {
    rng: R,
}

impl<R: RngCore> CarrySaveSplit<R> {
    pub fn new(rng: R) -> Self {
        CarrySaveSplit { rng }
    }
}

impl<R: RngCore> RemainderEstimator for CarrySaveSplit<R> {
    fn estimate(&mut self, magnitude: Dyadic, t: u32) -> Result<i64, ArithError> {
        let frac = split_bits(magnitude, t);
        let units = magnitude.shl(frac as i32).floor()?;
        let sum_units = if units == 0 { 0 } else { self.rng.gen_range(0..=units) };
        let sum = Dyadic::new(sum_units, -(frac as i32));
        let carry = magnitude.checked_sub(&sum)?;
        Ok((sum.shl(t as i32).floor()? + carry.shl(t as i32).floor()?) as i64)
    }
}

/// Word width below the `2^-t` bit used by the carry-save models.
fn split_bits(magnitude: Dyadic, t: u32) -> u32 {
    magnitude.fractional_bits().max(t + 8)
}

/// One word holds all ones below the `2^-t` bit, the other holds the rest;
/// the truncated sum is one unit short whenever the borrow fits.
pub struct LaggingSplit;

impl RemainderEstimator for LaggingSplit {
    fn estimate(&mut self, magnitude: Dyadic, t: u32) -> Result<i64, ArithError> {
        let frac = split_bits(magnitude, t);
        let ones = Dyadic::new((1i128 << (frac - t)) - 1, -(frac as i32));
        let rest = magnitude.checked_sub(&ones)?;
        if rest.is_negative() {
            return Ok(0);
        }
        Ok(rest.shl(t as i32).floor()? as i64)
    }
}

impl<E: RemainderEstimator + ?Sized> RemainderEstimator for &mut E {
    fn estimate(&mut self, magnitude: Dyadic, t: u32) -> Result<i64, ArithError> {
        (**self).estimate(magnitude, t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    /// `|r_i| > ρy`.
    BoundViolation,
    /// The truncated operands fall outside the table.
    MissingEntry,
    /// `x/β != y·Q_i + β^-i·r_i`.
    Reconstruction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SimFailure {
    /// 1-based iteration; 0 refers to the initial remainder.
    pub step: usize,
    pub kind: FailureKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SrtTrace {
    pub x: Dyadic,
    pub y: Dyadic,
    pub digits: Vec<i32>,
    /// `r_0 = x/β, r_1, …`.
    pub remainders: Vec<Rational>,
    /// `|r_i| <= ρy`, aligned with `remainders`.
    pub bound_ok: Vec<bool>,
    pub quotient: Dyadic,
    pub failure: Option<SimFailure>,
}

impl SrtTrace {
    pub fn is_ok(&self) -> bool {
        self.failure.is_none()
    }
}

/// `|r| <= ρy` as `|r|·(β - 1) <= a·y`.
fn within_bound(cfg: &RadixConfig, r: Dyadic, y: Dyadic) -> bool {
    scaled_le((cfg.beta() - 1) as i128, r.abs(), cfg.a() as i128, y)
}

/// Run `n` iterations of radix-β SRT division of `x` by `y` with digits from
/// the table. `y` must be normalized to `[1/2, 1)` with at most `u + 8`
/// fractional bits, and `x` must lie in `[1/2, 1)`.
pub fn simulate_division<E: RemainderEstimator>(
    table: &SelectionTable,
    x: Dyadic,
    y: Dyadic,
    n: usize,
    estimator: E,
) -> Result<SrtTrace> {
    let cfg = table.cfg();
    let half = Dyadic::new(1, -1);
    let one = Dyadic::from_int(1);
    if y < half || y >= one || y.fractional_bits() > table.u() + 8 {
        return Err(Error::OperandOutOfRange(format!(
            "divisor {y} must be in [1/2, 1) with at most u+8 fractional bits"
        )));
    }
    if x < half || x >= one {
        return Err(Error::OperandOutOfRange(format!("dividend {x} must be in [1/2, 1)")));
    }
    simulate_from(table, x.shl(-(cfg.p() as i32)), y, n, estimator)
}

/// Run the recurrence from an arbitrary initial remainder `r_0`; the trace's
/// `x` is `β·r_0`. Used to start divisions on chosen points of the P-D plane.
pub fn simulate_from<E: RemainderEstimator>(
    table: &SelectionTable,
    r0: Dyadic,
    y: Dyadic,
    n: usize,
    mut estimator: E,
) -> Result<SrtTrace> {
    let cfg = table.cfg();
    let p = cfg.p() as i32;
    if y < Dyadic::new(1, -1) || y >= Dyadic::from_int(1) {
        return Err(Error::OperandOutOfRange(format!("divisor {y} must be in [1/2, 1)")));
    }
    if n == 0 {
        return Err(Error::OperandOutOfRange("at least one digit is required".into()));
    }
    let k = y.shl(table.u() as i32).floor()? as u64;
    let x_scaled = r0;

    let mut r = x_scaled;
    let mut quotient = Dyadic::ZERO;
    let mut trace = SrtTrace {
        x: r0.shl(p),
        y,
        digits: Vec::with_capacity(n),
        remainders: vec![r.to_rational()?],
        bound_ok: vec![within_bound(cfg, r, y)],
        quotient,
        failure: None,
    };
    if !trace.bound_ok[0] {
        trace.failure = Some(SimFailure { step: 0, kind: FailureKind::BoundViolation });
        return Ok(trace);
    }
    for step in 1..=n {
        let shifted = r.shl(p);
        let magnitude = estimator.estimate(shifted.abs(), table.t())?;
        // Select on the magnitude and apply the sign afterwards: a negative
        // remainder can truncate to magnitude 0 and must still get -d.
        let digit = match select_digit(table, TruncatedOperands { k, s_trunc: magnitude }) {
            Ok(d) if shifted.is_negative() => -d,
            Ok(d) => d,
            Err(_) => {
                trace.failure = Some(SimFailure { step, kind: FailureKind::MissingEntry });
                break;
            }
        };
        r = shifted.checked_sub(&y.checked_mul_int(digit as i128)?)?;
        quotient = quotient.checked_add(&Dyadic::new(digit as i128, -p * step as i32))?;
        let ok = within_bound(cfg, r, y);
        trace.digits.push(digit);
        trace.remainders.push(r.to_rational()?);
        trace.bound_ok.push(ok);
        trace.quotient = quotient;

        let rebuilt = y.checked_mul(&quotient)?.checked_add(&r.shl(-p * step as i32))?;
        if rebuilt != x_scaled {
            trace.failure = Some(SimFailure { step, kind: FailureKind::Reconstruction });
            break;
        }
        if !ok {
            trace.failure = Some(SimFailure { step, kind: FailureKind::BoundViolation });
            break;
        }
    }
    Ok(trace)
}

/// Uniform dyadic in `[1/2, 1)` with `bits` fractional bits.
pub fn random_operand<R: Rng>(rng: &mut R, bits: u32) -> Dyadic {
    let lo = 1i128 << (bits - 1);
    Dyadic::new(rng.gen_range(lo..2 * lo), -(bits as i32))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FailedTrial {
    pub trial: usize,
    pub x: String,
    pub y: String,
    pub failure: SimFailure,
}

/// How starting points are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Schedule {
    /// Uniform dividends and divisors with `u + 8` fractional bits.
    Uniform,
    /// One division per edge of every digit run of every row, started from
    /// the corner of the divisor interval where that edge is tightest.
    Edges,
}

impl std::str::FromStr for Schedule {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "uniform" => Ok(Schedule::Uniform),
            "edges" => Ok(Schedule::Edges),
            other => Err(format!("unknown schedule `{other}` (uniform, edges)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimulationSummary {
    pub seed: u64,
    pub model: EstimateModel,
    pub schedule: Schedule,
    pub trials: usize,
    pub digits: usize,
    pub passed: usize,
    pub failed: usize,
    pub first_failure: Option<FailedTrial>,
}

impl SimulationSummary {
    fn new(seed: u64, model: EstimateModel, schedule: Schedule, digits: usize) -> Self {
        SimulationSummary { seed, model, schedule, trials: 0, digits, passed: 0, failed: 0, first_failure: None }
    }

    pub fn all_ok(&self) -> bool {
        self.failed == 0
    }

    fn record(&mut self, trace: &SrtTrace) {
        let trial = self.trials;
        self.trials += 1;
        match trace.failure {
            None => self.passed += 1,
            Some(failure) => {
                self.failed += 1;
                if self.first_failure.is_none() {
                    self.first_failure =
                        Some(FailedTrial { trial, x: trace.x.to_string(), y: trace.y.to_string(), failure });
                }
            }
        }
    }
}

fn run_one<R: RngCore>(
    table: &SelectionTable,
    r0: Dyadic,
    y: Dyadic,
    digits: usize,
    model: EstimateModel,
    rng: &mut R,
) -> Result<SrtTrace> {
    match model {
        EstimateModel::Truncate => simulate_from(table, r0, y, digits, Truncation),
        EstimateModel::CarrySave => simulate_from(table, r0, y, digits, CarrySaveSplit::new(rng)),
        EstimateModel::CarrySaveLag => simulate_from(table, r0, y, digits, LaggingSplit),
    }
}

/// Seeded batch of random divisions. Operands carry `u + 8` fractional bits.
pub fn run_trials(
    table: &SelectionTable,
    trials: usize,
    digits: usize,
    seed: u64,
    model: EstimateModel,
) -> Result<SimulationSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits = table.u() + 8;
    let p = table.cfg().p() as i32;
    let mut summary = SimulationSummary::new(seed, model, Schedule::Uniform, digits);
    for _ in 0..trials {
        let x = random_operand(&mut rng, bits);
        let y = random_operand(&mut rng, bits);
        let trace = run_one(table, x.shl(-p), y, digits, model, &mut rng)?;
        summary.record(&trace);
    }
    Ok(summary)
}

/// Divisions started next to every threshold of the table. For each row
/// `k` and digit `d` with threshold `s`, two starting points are used: the
/// lowest shifted remainder the model maps to `s`, at the top of the
/// divisor interval, and the highest one it maps below `s`, at the bottom
/// of the interval. Only the table is consulted to place them. Starting
/// remainders outside `|r| <= ρy` are skipped.
pub fn run_edge_trials(
    table: &SelectionTable,
    digits: usize,
    seed: u64,
    model: EstimateModel,
) -> Result<SimulationSummary> {
    const G: i32 = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = table.cfg();
    let (u, t, p) = (table.u() as i32, table.t() as i32, cfg.p() as i32);
    // Offsets from s in units of 2^-(t+G).
    let unit = 1i128 << G;
    let (low, high) = match model {
        EstimateModel::Truncate => (0, -1),
        EstimateModel::CarrySave => (0, unit - 2),
        EstimateModel::CarrySaveLag => (unit - 1, unit - 2),
    };
    let mut summary = SimulationSummary::new(seed, model, Schedule::Edges, digits);
    for (k, row) in table.rows() {
        let y_bottom = Dyadic::new(k as i128, -u);
        let y_top = Dyadic::new(((k as i128 + 1) << G) - 1, -(u + G));
        for &s in row {
            for (offset, y) in [(low, y_top), (high, y_bottom)] {
                let shifted = Dyadic::new((s as i128) * unit + offset, -(t + G));
                let r0 = shifted.shl(-p);
                if shifted.is_negative() || !within_bound(cfg, r0, y) {
                    continue;
                }
                let trace = run_one(table, r0, y, digits, model, &mut rng)?;
                summary.record(&trace);
            }
        }
    }
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossCheck {
    pub cfg: RadixConfig,
    pub mismatches: Vec<String>,
}

impl CrossCheck {
    pub fn agrees(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// For every `u` in `[u_min, u_max]`: the engine's `(u, t)` must pass the
/// geometric oracle, and when the engine raised `t̂` to `t̂ + 1` the oracle
/// must refute `t̂`.
pub fn cross_check_engine(cfg: &RadixConfig) -> Result<CrossCheck> {
    let mut mismatches = Vec::new();
    for u in params::u_min(cfg)..=params::u_max(cfg) {
        let record = engine::decide_t(cfg, u)?;
        let table = tables::build_table_unvalidated(cfg, u, record.t_final)?;
        let report = verify_table_geometric(&table);
        if !report.is_valid() {
            mismatches.push(format!(
                "u={u}: engine chose t={} but the table has {} violating entries",
                record.t_final,
                report.violations.len()
            ));
        }
        if record.t_final > record.t_hat && find_parameter_violations(cfg, u, record.t_hat).is_empty() {
            mismatches.push(format!(
                "u={u}: engine raised t to {} but t={} admits a valid table",
                record.t_final, record.t_hat
            ));
        }
    }
    Ok(CrossCheck { cfg: *cfg, mismatches })
}
