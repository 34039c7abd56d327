//! Acceptance suite. Each criterion prints one PASS/FAIL line with its
//! runtime against the budget; the process exits non-zero if any fails.

use std::collections::{BTreeSet, HashMap};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use srt_select::engine::{self, margin_witnesses, Witness};
use srt_select::params::{self, RadixConfig, TruncationPair};
use srt_select::tables::{build_table, build_table_unvalidated};
use srt_select::verify::{
    find_parameter_violations, run_edge_trials, run_trials, verify_table_geometric, EstimateModel,
};
use srt_select::Rational;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cfg(beta: u32, a: u32) -> RadixConfig {
    RadixConfig::new(beta, a).unwrap()
}

fn pairs(list: &[(u32, u32)]) -> Vec<TruncationPair> {
    list.iter().map(|&(u, t)| TruncationPair::new(u, t)).collect()
}

fn c1_delta_regression() -> Outcome {
    let cases = [
        ((16, 15), 2, 9, 256, (57, 64)),
        ((32, 31), 2, 11, 1024, (241, 256)),
        ((16, 15), 3, 6, 32, (5, 4)),
        ((32, 31), 3, 7, 64, (9, 8)),
    ];
    for ((beta, a), t0, u, k, (n, d)) in cases {
        let got = params::delta_gap(&cfg(beta, a), t0, u, a, k).map_err(|e| e.to_string())?;
        let want = Rational::new(n, d).unwrap();
        ensure(got == want, || format!("beta={beta} t0={t0} u={u}: got {got}, want {want}"))?;
    }
    Ok("57/64, 241/256, 5/4, 9/8".into())
}

fn c2_example_menu() -> Outcome {
    let menu = engine::enumerate_params(&cfg(16, 8));
    let want = pairs(&[(8, 9), (9, 7), (10, 7), (11, 7), (12, 6)]);
    ensure(menu.pairs() == want, || format!("menu {:?}", menu.pairs()))?;
    ensure(menu.best_pair() == TruncationPair::new(9, 7), || format!("best {:?}", menu.best_pair()))?;
    Ok("5 pairs, best (9,7)".into())
}

fn c3_theorem2() -> Outcome {
    for p in params::MIN_BITS..=params::MAX_BITS {
        let want = if p == 2 { pairs(&[(3, 2)]) } else { pairs(&[(p + 1, p), (p + 2, 3)]) };
        let got = engine::theorem2_params(p).map_err(|e| e.to_string())?;
        ensure(got == want, || format!("p={p}: theorem2_params {got:?}"))?;
        let menu = engine::enumerate_params(&RadixConfig::maximally_redundant(p).unwrap());
        ensure(menu.pairs() == want, || format!("p={p}: enumerate_params {:?}", menu.pairs()))?;
    }
    Ok("p=2..7".into())
}

fn c4_accept_list() -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().map_err(|e| e.to_string())?;
    let got: BTreeSet<(u32, u32)> =
        pool.install(|| engine::sweep_accept_list(params::MIN_BITS..=params::MAX_BITS)).into_iter().collect();
    let want: BTreeSet<(u32, u32)> = [
        (4, 2),
        (16, 10),
        (32, 25),
        (64, 38),
        (64, 42),
        (64, 44),
        (64, 46),
        (64, 51),
        (128, 81),
        (128, 89),
        (128, 94),
        (128, 105),
    ]
    .into_iter()
    .collect();
    ensure(got == want, || format!("sweep gave {got:?}"))?;
    Ok(format!("{} configs, 1 thread", got.len()))
}

fn c5_counterexamples() -> Outcome {
    for (beta, bad_u, good_u) in [(16, 9, 6), (32, 11, 7)] {
        let c = cfg(beta, beta - 1);
        let bad = find_parameter_violations(&c, bad_u, 2);
        ensure(bad.iter().any(|w| w.d == beta - 2), || format!("beta={beta}: no witness at d=a-1 in {bad:?}"))?;
        let good = find_parameter_violations(&c, good_u, 3);
        ensure(good.is_empty(), || format!("beta={beta} u={good_u} t=3: {good:?}"))?;
    }
    Ok("both refuted at d=a-1, corrections clean".into())
}

fn c6_oracle_equivalence() -> Outcome {
    let mut tables = 0;
    for c in RadixConfig::all(params::MIN_BITS..=params::MAX_BITS) {
        for u in params::u_min(&c)..=params::u_max(&c) {
            let rec = engine::decide_t(&c, u).map_err(|e| e.to_string())?;
            let table = build_table_unvalidated(&c, u, rec.t_final).map_err(|e| e.to_string())?;
            let report = verify_table_geometric(&table);
            ensure(report.is_valid(), || {
                format!("beta={} a={} u={u} t={}: {} violations", c.beta(), c.a(), rec.t_final, report.violations.len())
            })?;
            tables += 1;
        }
    }
    let mut grids = 0;
    for c in RadixConfig::all(params::MIN_BITS..=4) {
        let t_top = params::t_hat(&c, params::u_min(&c)).unwrap() + 2;
        for u in 1..=params::u_max(&c) + 1 {
            for t in 1..=t_top {
                let by_delta: BTreeSet<Witness> = margin_witnesses(&c, u, t).into_iter().collect();
                let by_geometry: BTreeSet<Witness> = find_parameter_violations(&c, u, t).into_iter().collect();
                ensure(by_delta == by_geometry, || {
                    format!("beta={} a={} u={u} t={t}: delta {by_delta:?} vs geometry {by_geometry:?}", c.beta(), c.a())
                })?;
                grids += 1;
            }
        }
    }
    Ok(format!("{tables} engine tables verified, {grids} (u,t) pairs agree for p<=4"))
}

fn c7_padding() -> Outcome {
    let mut checked = 0;
    for c in RadixConfig::all(params::MIN_BITS..=4) {
        let mut memo: HashMap<(u32, u32), bool> = HashMap::new();
        let mut valid =
            |u: u32, t: u32| *memo.entry((u, t)).or_insert_with(|| find_parameter_violations(&c, u, t).is_empty());
        let t_top = params::t_hat(&c, params::u_min(&c)).unwrap() + 2;
        for u in 1..=params::u_max(&c) + 1 {
            for t in 1..=t_top {
                if valid(u, t) {
                    checked += 1;
                    ensure(valid(u + 1, t), || {
                        format!("beta={} a={}: ({u},{t}) valid, ({},{t}) not", c.beta(), c.a(), u + 1)
                    })?;
                    ensure(valid(u, t + 1), || {
                        format!("beta={} a={}: ({u},{t}) valid, ({u},{}) not", c.beta(), c.a(), t + 1)
                    })?;
                }
            }
        }
    }
    Ok(format!("{checked} valid pairs padded"))
}

fn c8_simulation() -> Outcome {
    let mut configs: Vec<(RadixConfig, u32, u32)> = Vec::new();
    for (beta, a) in engine::sweep_accept_list(params::MIN_BITS..=params::MAX_BITS) {
        let c = cfg(beta, a);
        let rec = engine::decide_t(&c, params::u_min(&c)).map_err(|e| e.to_string())?;
        configs.push((c, rec.u, rec.t_final));
    }
    for p in params::MIN_BITS..=params::MAX_BITS {
        let c = RadixConfig::maximally_redundant(p).unwrap();
        for pair in engine::theorem2_params(p).unwrap() {
            configs.push((c, pair.u, pair.t));
        }
    }
    let mut divisions = 0;
    for (i, (c, u, t)) in configs.iter().enumerate() {
        let table = build_table(c, *u, *t).map_err(|e| e.to_string())?;
        for model in EstimateModel::ALL {
            let seed = 1000 + i as u64;
            let uniform = run_trials(&table, 1000, 12, seed, model).map_err(|e| e.to_string())?;
            let edges = run_edge_trials(&table, 12, seed, model).map_err(|e| e.to_string())?;
            for summary in [uniform, edges] {
                ensure(summary.all_ok(), || {
                    format!("beta={} a={} ({u},{t}) {model:?}: {:?}", c.beta(), c.a(), summary.first_failure)
                })?;
                divisions += summary.trials;
            }
        }
    }
    // Uniform operands essentially never land in the bad cell, so the
    // refutation uses the edge schedule with lagging carry-save estimates.
    let bad = build_table_unvalidated(&cfg(16, 15), 9, 2).map_err(|e| e.to_string())?;
    let uniform = run_trials(&bad, 10_000, 8, 1, EstimateModel::CarrySave).map_err(|e| e.to_string())?;
    let edges = run_edge_trials(&bad, 8, 1, EstimateModel::CarrySaveLag).map_err(|e| e.to_string())?;
    let first = edges.first_failure.ok_or("known-bad (16,15,9,2) table not refuted by the edge schedule")?;
    ensure(first.trial < 10_000, || format!("first refutation only at trial {}", first.trial))?;
    Ok(format!(
        "{} tables, {divisions} clean divisions; bad table refuted at edge trial {} (x={}, y={}, {:?} at step {}), {} of 10^4 uniform trials failed",
        configs.len(),
        first.trial,
        first.x,
        first.y,
        first.failure.kind,
        first.failure.step,
        uniform.failed
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("1 delta regression", Duration::from_millis(1), c1_delta_regression),
        ("2 example 1 menu", Duration::from_secs(1), c2_example_menu),
        ("3 theorem 2 pairs", Duration::from_secs(10), c3_theorem2),
        ("4 accept list sweep", Duration::from_secs(120), c4_accept_list),
        ("5 counterexample refutation", Duration::from_secs(10), c5_counterexamples),
        ("6 oracle/engine equivalence", Duration::from_secs(300), c6_oracle_equivalence),
        ("7 padding property", Duration::from_secs(120), c7_padding),
        ("8 simulation property", Duration::from_secs(120), c8_simulation),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, budget, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.starts_with(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let over = took > budget;
        let (tag, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("over budget: {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("{tag} criterion {name} [{took:.2?} / {budget:?}] {detail}");
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
