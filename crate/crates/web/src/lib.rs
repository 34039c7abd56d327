//! Browser bindings: the parameter menu of a digit set, the P-D diagram of a
//! table with its violations, and a traced division.
//!
//! Each export is a thin wrapper around a plain function returning JSON, so
//! the logic is testable without a browser.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use srt_select::engine;
use srt_select::plot::{render_pd_svg, PlotOptions};
use srt_select::tables::{build_table, build_table_unvalidated, SelectionTable};
use srt_select::verify::{
    simulate_division, verify_table_geometric, CarrySaveSplit, EstimateModel, LaggingSplit, Truncation,
};
use srt_select::{Dyadic, RadixConfig, Rational};
use wasm_bindgen::prelude::*;

fn radix(beta: u32, a: u32) -> Result<RadixConfig, String> {
    RadixConfig::new(beta, a).map_err(|e| e.to_string())
}

fn table(beta: u32, a: u32, u: u32, t: u32, allow_unvalidated: bool) -> Result<SelectionTable, String> {
    let cfg = radix(beta, a)?;
    let built = if allow_unvalidated { build_table_unvalidated(&cfg, u, t) } else { build_table(&cfg, u, t) };
    built.map_err(|e| e.to_string())
}

pub fn menu_json(beta: u32, a: u32) -> Result<String, String> {
    Ok(engine::enumerate_params(&radix(beta, a)?).to_json().to_string())
}

/// `window` is `[y0, y1, p0, p1]`; an empty slice shows the whole plane.
pub fn diagram_json(
    beta: u32,
    a: u32,
    u: u32,
    t: u32,
    allow_unvalidated: bool,
    window: &[f64],
) -> Result<String, String> {
    let table = table(beta, a, u, t, allow_unvalidated)?;
    let report = verify_table_geometric(&table);
    let mut opts = PlotOptions::default();
    match window {
        [] => {}
        [y0, y1, p0, p1] if y0 < y1 && p0 < p1 => {
            opts.y_range = Some((*y0, *y1));
            opts.p_range = Some((*p0, *p1));
        }
        _ => return Err("window must be [y0, y1, p0, p1] with y0 < y1 and p0 < p1".into()),
    }
    let svg = render_pd_svg(&table, &report.violations, &opts);
    Ok(json!({
        "svg": svg,
        "rows": table.row_count(),
        "report": report.to_value(),
    })
    .to_string())
}

/// Decimal (`0.71`) or fraction (`5/7`).
fn parse_number(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let bad = || format!("cannot read `{s}` as a number");
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| bad())?;
        let d: i128 = d.trim().parse().map_err(|_| bad())?;
        return Rational::new(n, d).map_err(|_| bad());
    }
    let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 30 || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let n: i128 =
        if digits.is_empty() || digits == "-" { return Err(bad()) } else { digits.parse().map_err(|_| bad())? };
    Rational::new(n, 10i128.pow(frac.len() as u32)).map_err(|_| bad())
}

/// Round down to `bits` fractional bits.
fn to_dyadic(r: Rational, bits: u32) -> Result<Dyadic, String> {
    let scaled = r.mul_pow2(bits as i32).map_err(|e| e.to_string())?;
    Ok(Dyadic::new(scaled.floor(), -(bits as i32)))
}

#[allow(clippy::too_many_arguments)]
pub fn trace_json(
    beta: u32,
    a: u32,
    u: u32,
    t: u32,
    allow_unvalidated: bool,
    x: &str,
    y: &str,
    digits: usize,
    model: &str,
    seed: u64,
) -> Result<String, String> {
    let table = table(beta, a, u, t, allow_unvalidated)?;
    let bits = u + 8;
    let x = to_dyadic(parse_number(x)?, bits)?;
    let y = to_dyadic(parse_number(y)?, bits)?;
    let model: EstimateModel = model.parse()?;
    let trace = match model {
        EstimateModel::Truncate => simulate_division(&table, x, y, digits, Truncation),
        EstimateModel::CarrySave => {
            simulate_division(&table, x, y, digits, CarrySaveSplit::new(ChaCha8Rng::seed_from_u64(seed)))
        }
        EstimateModel::CarrySaveLag => simulate_division(&table, x, y, digits, LaggingSplit),
    }
    .map_err(|e| e.to_string())?;
    let steps: Vec<_> = trace
        .remainders
        .iter()
        .zip(&trace.bound_ok)
        .enumerate()
        .map(|(i, (r, ok))| {
            json!({
                "step": i,
                "digit": if i == 0 { None } else { Some(trace.digits[i - 1]) },
                "remainder": r.to_string(),
                "remainder_approx": r.to_f64(),
                "bound_ok": ok,
            })
        })
        .collect();
    let failure = trace.failure.map(|f| json!({"step": f.step, "kind": format!("{:?}", f.kind)}));
    Ok(json!({
        "x": x.to_string(),
        "y": y.to_string(),
        "quotient": trace.quotient.to_string(),
        "quotient_approx": trace.quotient.to_f64() * beta as f64,
        "exact_approx": x.to_f64() / y.to_f64(),
        "steps": steps,
        "failure": failure,
    })
    .to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = paramMenu)]
pub fn param_menu(beta: u32, a: u32) -> Result<String, JsError> {
    js(menu_json(beta, a))
}

#[wasm_bindgen(js_name = pdDiagram)]
pub fn pd_diagram(
    beta: u32,
    a: u32,
    u: u32,
    t: u32,
    allow_unvalidated: bool,
    window: Vec<f64>,
) -> Result<String, JsError> {
    js(diagram_json(beta, a, u, t, allow_unvalidated, &window))
}

#[allow(clippy::too_many_arguments)]
#[wasm_bindgen(js_name = traceDivision)]
pub fn trace_division(
    beta: u32,
    a: u32,
    u: u32,
    t: u32,
    allow_unvalidated: bool,
    x: &str,
    y: &str,
    digits: usize,
    model: &str,
    seed: u64,
) -> Result<String, JsError> {
    js(trace_json(beta, a, u, t, allow_unvalidated, x, y, digits, model, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn menu_for_example_one() {
        let v = parse(&menu_json(16, 8).unwrap());
        assert_eq!(v["best"], json!({"u": 9, "t": 7}));
        assert_eq!(v["entries"].as_array().unwrap().len(), 5);
        assert!(menu_json(2, 1).unwrap_err().contains("radix 2"));
    }

    #[test]
    fn diagram_marks_the_bad_cell() {
        let v = parse(&diagram_json(16, 15, 9, 2, true, &[]).unwrap());
        assert_eq!(v["report"]["valid"], false);
        assert!(v["svg"].as_str().unwrap().contains("class=\"violation\""));
        let zoomed = parse(&diagram_json(16, 15, 9, 2, true, &[0.515, 0.52, 6.5, 7.5]).unwrap());
        assert!(
            zoomed["svg"].as_str().unwrap().contains(">0.516<") || zoomed["svg"].as_str().unwrap().contains(">0.518<")
        );
        assert!(diagram_json(16, 15, 9, 2, false, &[]).is_err());
        assert!(diagram_json(16, 15, 6, 3, false, &[0.6, 0.5, 0.0, 1.0]).is_err());
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_number("0.75").unwrap(), Rational::new(3, 4).unwrap());
        assert_eq!(parse_number("5/7").unwrap(), Rational::new(5, 7).unwrap());
        assert_eq!(parse_number(".5").unwrap(), Rational::HALF);
        assert!(parse_number("abc").is_err());
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("").is_err());
        assert_eq!(to_dyadic(Rational::new(5, 7).unwrap(), 4).unwrap(), Dyadic::new(11, -4));
    }

    #[test]
    fn traced_division() {
        let v = parse(&trace_json(4, 2, 4, 4, false, "1/2", "1/2", 4, "truncate", 0).unwrap());
        let digits: Vec<i64> =
            v["steps"].as_array().unwrap()[1..].iter().map(|s| s["digit"].as_i64().unwrap()).collect();
        assert_eq!(digits, vec![1, 0, 0, 0]);
        assert_eq!(v["failure"], Value::Null);

        let v = parse(&trace_json(16, 8, 9, 7, false, "0.8", "0.6", 10, "carry-save", 9).unwrap());
        assert!((v["quotient_approx"].as_f64().unwrap() - v["exact_approx"].as_f64().unwrap()).abs() < 1e-9);

        // Digit 1 first, then 16(x - y) lands in the bad cell of the (9, 2)
        // table and the lagging estimate selects 13.
        let v = parse(&trace_json(16, 15, 9, 2, true, "127217/131072", "265/512", 8, "carry-save-lag", 0).unwrap());
        assert_eq!(v["failure"], json!({"step": 2, "kind": "BoundViolation"}));
        let v = parse(&trace_json(16, 15, 9, 2, true, "127217/131072", "265/512", 8, "truncate", 0).unwrap());
        assert_eq!(v["failure"], Value::Null);
        assert!(trace_json(16, 8, 9, 7, false, "2", "0.6", 4, "truncate", 0).is_err());
        assert!(trace_json(16, 8, 9, 7, false, "0.7", "0.6", 4, "exact", 0).is_err());
    }
}
