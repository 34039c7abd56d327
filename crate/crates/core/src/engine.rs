//! Decision procedures for the remainder precision `t`.
//!
//! For a divisor precision `u` in `[u_min, u_max]` the weak bound yields a
//! candidate `t̂`. The candidate is kept only if the margin `Δ(t̂, u, d, k)` is
//! non-negative for every digit `d` in `1..=a` and every divisor index `k`;
//! otherwise `t̂ + 1` is used. The check on `d = a` alone ("simple") is not
//! sufficient, so the remaining digits ("rest") are scanned whenever it
//! passes.

use std::ops::RangeInclusive;

use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::params::{self, divisor_indices, RadixConfig, TruncationPair};

/// A cell `(d, k)` whose margin is negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Witness {
    pub d: u32,
    pub k: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckOutcome {
    pub failed: bool,
    pub witnesses: Vec<Witness>,
}

impl CheckOutcome {
    fn from_witnesses(witnesses: Vec<Witness>) -> Self {
        CheckOutcome { failed: !witnesses.is_empty(), witnesses }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecisionRecord {
    pub cfg: RadixConfig,
    pub u: u32,
    pub t_hat: u32,
    pub simple_failed: bool,
    /// `false` also when the rest check was skipped because simple failed.
    pub rest_failed: bool,
    pub rest_checked: bool,
    pub t_final: u32,
    pub witnesses: Vec<Witness>,
}

impl DecisionRecord {
    pub fn pair(&self) -> TruncationPair {
        TruncationPair::new(self.u, self.t_final)
    }

    /// True when the weak bound alone was enough.
    pub fn kept_t_hat(&self) -> bool {
        self.t_final == self.t_hat
    }
}

fn scan(cfg: &RadixConfig, u: u32, t: u32, digits: RangeInclusive<u32>) -> Vec<Witness> {
    let mut witnesses = Vec::new();
    for d in digits {
        for k in divisor_indices(u) {
            if params::delta_margin(cfg, t, u, d, k) < 0 {
                witnesses.push(Witness { d, k });
            }
        }
    }
    witnesses
}

fn require_u_min(cfg: &RadixConfig, u: u32) -> Result<()> {
    let u_min = params::u_min(cfg);
    if u < u_min {
        return Err(Error::UBelowMinimum { u, u_min });
    }
    Ok(())
}

/// Is `Δ(t, u, a, k) < 0` for some `k`? Witnesses are all such `(a, k)`.
pub fn check_simple(cfg: &RadixConfig, u: u32, t: u32) -> Result<CheckOutcome> {
    require_u_min(cfg, u)?;
    Ok(CheckOutcome::from_witnesses(scan(cfg, u, t, cfg.a()..=cfg.a())))
}

/// Is `Δ(t, u, d, k) < 0` for some `d` in `1..a` and some `k`?
pub fn check_rest(cfg: &RadixConfig, u: u32, t: u32) -> Result<CheckOutcome> {
    require_u_min(cfg, u)?;
    Ok(CheckOutcome::from_witnesses(scan(cfg, u, t, 1..=cfg.a() - 1)))
}

/// Every `(d, k)` with a negative margin, for all digits.
pub fn margin_witnesses(cfg: &RadixConfig, u: u32, t: u32) -> Vec<Witness> {
    scan(cfg, u, t, 1..=cfg.a())
}

/// Choose `t` for divisor precision `u`.
pub fn decide_t(cfg: &RadixConfig, u: u32) -> Result<DecisionRecord> {
    let (u_min, u_max) = (params::u_min(cfg), params::u_max(cfg));
    if u < u_min || u > u_max {
        return Err(Error::UOutOfRange { u, u_min, u_max });
    }
    let t_hat = params::t_hat(cfg, u)?;
    let simple = check_simple(cfg, u, t_hat)?;
    let (rest, rest_checked) =
        if simple.failed { (CheckOutcome::default(), false) } else { (check_rest(cfg, u, t_hat)?, true) };
    let bump = simple.failed || rest.failed;
    let mut witnesses = simple.witnesses;
    witnesses.extend(rest.witnesses);
    Ok(DecisionRecord {
        cfg: *cfg,
        u,
        t_hat,
        simple_failed: simple.failed,
        rest_failed: rest.failed,
        rest_checked,
        t_final: if bump { t_hat + 1 } else { t_hat },
        witnesses,
    })
}

/// The decisions for every `u` in `[u_min, u_max]`.
#[derive(Clone, Debug)]
pub struct ParamMenu {
    pub cfg: RadixConfig,
    pub u_min: u32,
    pub u_max: u32,
    pub entries: Vec<DecisionRecord>,
    /// Index of the entry minimizing `u + t`, smallest `u` on ties.
    pub best: usize,
}

impl ParamMenu {
    pub fn pairs(&self) -> Vec<TruncationPair> {
        self.entries.iter().map(DecisionRecord::pair).collect()
    }

    pub fn best_pair(&self) -> TruncationPair {
        self.entries[self.best].pair()
    }

    pub fn entry(&self, u: u32) -> Option<&DecisionRecord> {
        self.entries.iter().find(|e| e.u == u)
    }

    /// `rest_failed` is null where the rest check was skipped.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<_> = self
            .entries
            .iter()
            .map(|e| {
                json!({
                    "u": e.u,
                    "t_hat": e.t_hat,
                    "simple_failed": e.simple_failed,
                    "rest_failed": if e.rest_checked { Some(e.rest_failed) } else { None },
                    "t": e.t_final,
                    "cost": e.pair().cost(),
                })
            })
            .collect();
        let best = self.best_pair();
        json!({
            "beta": self.cfg.beta(),
            "a": self.cfg.a(),
            "rho": self.cfg.rho().to_string(),
            "u_min": self.u_min,
            "u_max": self.u_max,
            "entries": entries,
            "best": {"u": best.u, "t": best.t},
        })
    }
}

pub fn enumerate_params(cfg: &RadixConfig) -> ParamMenu {
    let (u_min, u_max) = (params::u_min(cfg), params::u_max(cfg));
    let entries: Vec<DecisionRecord> =
        (u_min..=u_max).map(|u| decide_t(cfg, u).expect("u within [u_min, u_max]")).collect();
    let best =
        entries.iter().enumerate().min_by_key(|(_, e)| (e.pair().cost(), e.u)).map(|(i, _)| i).expect("u_max >= u_min");
    ParamMenu { cfg: *cfg, u_min, u_max, entries, best }
}

/// Closed-form pairs for the maximally redundant digit set of radix `2^p`.
pub fn theorem2_params(p: u32) -> Result<Vec<TruncationPair>> {
    if !(params::MIN_BITS..=params::MAX_BITS).contains(&p) {
        return Err(if p == 1 { Error::RadixTwo } else { Error::RadixOutOfRange(1u32 << p.min(31)) });
    }
    Ok(if p == 2 {
        vec![TruncationPair::new(3, 2)]
    } else {
        vec![TruncationPair::new(p + 1, p), TruncationPair::new(p + 2, 3)]
    })
}

/// Whether `(u, t)` is backed by the engine: a decided or closed-form pair,
/// one padded from such a pair (`u` or `t` increased), or one above the
/// divisor bound `u_for_t(t)`.
pub fn is_validated(cfg: &RadixConfig, u: u32, t: u32) -> Result<bool> {
    let (u_min, u_max) = (params::u_min(cfg), params::u_max(cfg));
    if u < u_min {
        return Ok(false);
    }
    if t >= params::t_prime(cfg) && u >= params::u_for_t(cfg, t)? {
        return Ok(true);
    }
    if cfg.is_maximally_redundant() {
        let closed = theorem2_params(cfg.p())?;
        if closed.iter().any(|pair| u >= pair.u && t >= pair.t) {
            return Ok(true);
        }
    }
    for v in u_min..=u.min(u_max) {
        if t >= decide_t(cfg, v)?.t_final {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Configs `(β, a)` with `β/2 <= a < β - 1` whose decision at `u_min`
/// keeps `t̂`. Deterministic, in `(β, a)` order.
pub fn sweep_accept_list(bits: RangeInclusive<u32>) -> Vec<(u32, u32)> {
    let configs: Vec<RadixConfig> =
        RadixConfig::all(bits).into_iter().filter(|c| !c.is_maximally_redundant()).collect();
    let keep = |c: &RadixConfig| decide_t(c, params::u_min(c)).expect("u_min is decidable").kept_t_hat();
    #[cfg(feature = "parallel")]
    let kept: Vec<bool> = {
        use rayon::prelude::*;
        configs.par_iter().map(keep).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let kept: Vec<bool> = configs.iter().map(keep).collect();
    configs.iter().zip(kept).filter(|(_, k)| *k).map(|(c, _)| (c.beta(), c.a())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(beta: u32, a: u32) -> RadixConfig {
        RadixConfig::new(beta, a).unwrap()
    }

    fn pairs(list: &[(u32, u32)]) -> Vec<TruncationPair> {
        list.iter().map(|&(u, t)| TruncationPair::new(u, t)).collect()
    }

    #[test]
    fn simple_check() {
        let out = check_simple(&cfg(16, 15), 6, 2).unwrap();
        assert!(out.failed);
        assert!(out.witnesses.contains(&Witness { d: 15, k: 34 }));
        assert!(out.witnesses.iter().all(|w| w.d == 15));

        assert!(!check_simple(&cfg(8, 7), 4, 3).unwrap().failed);

        // Brute force over k = 256..511 for t̂ = 6 at u = 9.
        let c = cfg(16, 8);
        let brute: Vec<u64> = (256..512).filter(|&k| params::delta_margin(&c, 6, 9, 8, k) < 0).collect();
        let out = check_simple(&c, 9, 6).unwrap();
        assert_eq!(out.failed, !brute.is_empty());
        assert_eq!(out.witnesses.iter().map(|w| w.k).collect::<Vec<_>>(), brute);
        assert!(out.failed || check_rest(&c, 9, 6).unwrap().failed);
    }

    #[test]
    fn rest_check() {
        let out = check_rest(&cfg(16, 15), 9, 2).unwrap();
        assert!(out.failed);
        assert!(out.witnesses.iter().any(|w| w.d == 14));
        assert!(!check_simple(&cfg(16, 15), 9, 2).unwrap().failed);

        assert!(!check_rest(&cfg(4, 2), 4, 4).unwrap().failed);
        let c = cfg(16, 10);
        assert_eq!(params::u_min(&c), 6);
        assert_eq!(params::t_hat(&c, 6), Ok(6));
        assert!(!check_rest(&c, 6, 6).unwrap().failed);
        assert!(matches!(check_rest(&c, 5, 6), Err(Error::UBelowMinimum { .. })));
    }

    #[test]
    fn decide_t_rows() {
        let c = cfg(16, 8);
        assert_eq!(decide_t(&c, 8).unwrap().t_final, 9);
        assert_eq!(decide_t(&c, 12).unwrap().t_final, 6);
        let r = decide_t(&cfg(16, 15), 5).unwrap();
        assert_eq!((r.t_hat, r.t_final), (4, 4));
        assert!(r.witnesses.is_empty());
        assert!(matches!(decide_t(&c, 13), Err(Error::UOutOfRange { .. })));
        assert!(matches!(decide_t(&c, 7), Err(Error::UOutOfRange { .. })));
    }

    #[test]
    fn short_circuit_after_simple_fails() {
        let r = decide_t(&cfg(16, 15), 6).unwrap();
        assert!(r.simple_failed);
        assert!(!r.rest_checked);
        assert_eq!(r.t_final, r.t_hat + 1);
    }

    #[test]
    fn decision_record_invariant() {
        for c in RadixConfig::all(2..=4) {
            for e in enumerate_params(&c).entries {
                assert_eq!(e.t_final == e.t_hat + 1, e.simple_failed || e.rest_failed);
                assert_eq!(e.witnesses.is_empty(), !(e.simple_failed || e.rest_failed));
            }
        }
    }

    #[test]
    fn menus() {
        let m = enumerate_params(&cfg(16, 8));
        assert_eq!(m.pairs(), pairs(&[(8, 9), (9, 7), (10, 7), (11, 7), (12, 6)]));
        assert_eq!(m.best_pair(), TruncationPair::new(9, 7));
        assert_eq!(enumerate_params(&cfg(16, 15)).pairs(), pairs(&[(5, 4), (6, 3)]));
        assert_eq!(enumerate_params(&cfg(4, 3)).pairs(), pairs(&[(3, 2)]));
    }

    #[test]
    fn closed_form_pairs() {
        assert_eq!(theorem2_params(4).unwrap(), pairs(&[(5, 4), (6, 3)]));
        assert_eq!(theorem2_params(2).unwrap(), pairs(&[(3, 2)]));
        assert_eq!(theorem2_params(5).unwrap(), pairs(&[(6, 5), (7, 3)]));
        assert_eq!(theorem2_params(1), Err(Error::RadixTwo));
        assert!(theorem2_params(8).is_err());
        for p in 2..=6 {
            let c = RadixConfig::maximally_redundant(p).unwrap();
            assert_eq!(enumerate_params(&c).pairs(), theorem2_params(p).unwrap());
        }
    }

    #[test]
    fn validation_gate() {
        let c = cfg(16, 15);
        assert!(!is_validated(&c, 9, 2).unwrap());
        assert!(is_validated(&c, 9, 3).unwrap());
        assert!(is_validated(&c, 6, 3).unwrap());
        assert!(!is_validated(&c, 5, 3).unwrap());
        assert!(!is_validated(&c, 4, 9).unwrap());
        let c = cfg(16, 8);
        assert!(is_validated(&c, 9, 7).unwrap());
        assert!(!is_validated(&c, 9, 6).unwrap());
        assert!(is_validated(&c, 20, 6).unwrap());
    }

    #[test]
    fn small_sweeps() {
        assert_eq!(sweep_accept_list(2..=2), vec![(4, 2)]);
        assert_eq!(sweep_accept_list(3..=3), vec![]);
        assert_eq!(sweep_accept_list(4..=4), vec![(16, 10)]);
        assert_eq!(sweep_accept_list(5..=5), vec![(32, 25)]);
    }
}
