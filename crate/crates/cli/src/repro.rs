//! Recomputes the published numbers: the δ values of the counterexamples,
//! the Example 1 menu, the maximally redundant pairs, the list of digit
//! sets needing t̂ + 1, and the counterexample refutations.

use std::fmt::Write as _;

use serde_json::json;
use srt_select::engine;
use srt_select::params::{self, RadixConfig, TruncationPair};
use srt_select::verify::find_parameter_violations;
use srt_select::Rational;

pub struct Item {
    pub name: String,
    pub pass: bool,
    pub got: String,
    pub want: String,
}

impl Item {
    fn new(name: impl Into<String>, got: String, want: String) -> Self {
        Item { name: name.into(), pass: got == want, got, want }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({"item": self.name, "pass": self.pass, "got": self.got, "want": self.want})
    }
}

fn cfg(beta: u32, a: u32) -> RadixConfig {
    RadixConfig::new(beta, a).expect("reference configuration")
}

fn show_pairs(pairs: &[TruncationPair]) -> String {
    pairs.iter().map(|p| format!("({},{})", p.u, p.t)).collect::<Vec<_>>().join(" ")
}

const ACCEPT_LIST: [(u32, u32); 12] = [
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
];

pub fn run() -> Vec<Item> {
    let mut items = Vec::new();

    for (beta, t0, u, k, (n, d)) in
        [(16, 2, 9, 256, (57, 64)), (32, 2, 11, 1024, (241, 256)), (16, 3, 6, 32, (5, 4)), (32, 3, 7, 64, (9, 8))]
    {
        let c = cfg(beta, beta - 1);
        let got = params::delta_gap(&c, t0, u, beta - 1, k).map(|r| r.to_string()).unwrap_or_else(|e| e.to_string());
        let want = Rational::new(n, d).expect("nonzero").to_string();
        items.push(Item::new(format!("delta beta={beta} t0={t0} u={u} d=a k={k}"), got, want));
    }

    let menu = engine::enumerate_params(&cfg(16, 8));
    items.push(Item::new(
        "example 1 menu beta=16 a=8",
        show_pairs(&menu.pairs()),
        "(8,9) (9,7) (10,7) (11,7) (12,6)".into(),
    ));
    items.push(Item::new("example 1 best pair", show_pairs(&[menu.best_pair()]), "(9,7)".into()));

    for p in params::MIN_BITS..=params::MAX_BITS {
        let want = if p == 2 { format!("({},{})", 3, 2) } else { format!("({},{}) ({},3)", p + 1, p, p + 2) };
        let menu = engine::enumerate_params(&RadixConfig::maximally_redundant(p).expect("p in range"));
        items.push(Item::new(format!("maximally redundant pairs beta={}", 1u32 << p), show_pairs(&menu.pairs()), want));
    }

    let found = engine::sweep_accept_list(params::MIN_BITS..=params::MAX_BITS);
    for p in params::MIN_BITS..=params::MAX_BITS {
        let beta = 1u32 << p;
        let pick = |list: &[(u32, u32)]| {
            let digits: Vec<String> = list.iter().filter(|(b, _)| *b == beta).map(|(_, a)| a.to_string()).collect();
            if digits.is_empty() {
                "(none)".to_string()
            } else {
                digits.join(" ")
            }
        };
        items.push(Item::new(format!("t_hat+1 digit sets beta={beta}"), pick(&found), pick(&ACCEPT_LIST)));
    }

    for (beta, bad_u, good_u) in [(16, 9, 6), (32, 11, 7)] {
        let c = cfg(beta, beta - 1);
        let bad = find_parameter_violations(&c, bad_u, 2);
        items.push(Item::new(
            format!("counterexample beta={beta} u={bad_u} t=2 fails at d=a-1"),
            bad.iter().any(|w| w.d == beta - 2).to_string(),
            "true".into(),
        ));
        items.push(Item::new(
            format!("correction beta={beta} u={good_u} t=3 admits a table"),
            find_parameter_violations(&c, good_u, 3).is_empty().to_string(),
            "true".into(),
        ));
    }
    items
}

pub fn text(items: &[Item]) -> String {
    let mut s = String::new();
    for i in items {
        let _ = write!(s, "{} {}", if i.pass { "PASS" } else { "FAIL" }, i.name);
        if i.pass {
            let _ = writeln!(s, ": {}", i.got);
        } else {
            let _ = writeln!(s, ": got {}, want {}", i.got, i.want);
        }
    }
    let passed = items.iter().filter(|i| i.pass).count();
    let _ = writeln!(s, "{passed}/{} items reproduced", items.len());
    s
}

pub fn csv(items: &[Item]) -> String {
    let mut s = String::from("item,pass,got,want\n");
    for i in items {
        let _ = writeln!(s, "\"{}\",{},\"{}\",\"{}\"", i.name, i.pass, i.got, i.want);
    }
    s
}
