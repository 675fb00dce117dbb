//! Check verdicts and the witnesses that back every failure.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{serde_dec, Nat};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

/// Reproduction data for one observed violation. Each variant carries the
/// indices and primes needed to recompute it plus the values that were seen.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Witness {
    /// `v_p(a_{kn}) != v_p(a_k) + v_p(n)` with `p | a_k`.
    LProperty {
        #[serde(with = "serde_dec")]
        p: Nat,
        k: u64,
        n: u64,
        expected: u64,
        actual: u64,
    },
    /// `a_k` does not divide `a_{nk}`.
    Divisibility {
        k: u64,
        n: u64,
        #[serde(with = "serde_dec")]
        remainder: Nat,
    },
    /// `gcd(a_m, a_n) != a_{gcd(m, n)}`.
    GcdIdentity {
        m: u64,
        n: u64,
        #[serde(with = "serde_dec")]
        gcd: Nat,
        #[serde(with = "serde_dec")]
        expected: Nat,
    },
    /// `a_n != prod_{d | n} b_d`.
    ProductFormula {
        n: u64,
        #[serde(with = "serde_dec")]
        a_n: Nat,
        #[serde(with = "serde_dec")]
        product: Nat,
    },
    /// `gcd(b_m, b_n) > 1` although neither index divides the other.
    PairwiseCoprime {
        m: u64,
        n: u64,
        #[serde(with = "serde_dec")]
        gcd: Nat,
    },
    /// `b_n` does not divide `a_n`.
    BDividesA {
        n: u64,
        #[serde(with = "serde_dec")]
        remainder: Nat,
    },
    /// `b_target != numerator / denominator` for one of the recursion
    /// identities (`prime`, `prime_power`, `prime_pair`).
    RecursionIdentity {
        identity: RecursionKind,
        target: u64,
        #[serde(with = "serde_dec")]
        b_value: Nat,
        #[serde(with = "serde_dec")]
        numerator: Nat,
        #[serde(with = "serde_dec")]
        denominator: Nat,
    },
    /// `(p | a_k)` and `(rank | k)` disagree.
    RankDivisibility {
        #[serde(with = "serde_dec")]
        p: Nat,
        rho: u64,
        k: u64,
        p_divides: bool,
        rho_divides: bool,
    },
    /// `p^s || a_k`, `p^r || a_rho`, but `k` is not `p^{s-r} rho l` with `p ∤ l`.
    ValuationStructure {
        #[serde(with = "serde_dec")]
        p: Nat,
        rho: u64,
        k: u64,
        r: u64,
        s: u64,
    },
    /// `v_p(a_{rho s}) != v_p(a_rho) + v_p(s)`.
    RankLte {
        #[serde(with = "serde_dec")]
        p: Nat,
        rho: u64,
        s: u64,
        expected: u64,
        actual: u64,
    },
    /// The valuations `v_p(b_{pd})`, `d | rho`, are not one 1 and the rest 0.
    Delta {
        #[serde(with = "serde_dec")]
        p: Nat,
        rho: u64,
        valuations: Vec<(u64, u64)>,
    },
    /// `p | b_{de}` for `d | rho`, `e | k`, `e > 1`, `gcd(p rho, k) = 1`.
    CoprimeBlock {
        #[serde(with = "serde_dec")]
        p: Nat,
        rho: u64,
        k: u64,
        d: u64,
        e: u64,
        valuation: u64,
    },
    /// First index with `p | a_n` differs from the first with `p | b_n`.
    /// `None` means not found within `bound`.
    RankAgreement {
        #[serde(with = "serde_dec")]
        p: Nat,
        bound: u64,
        rank_a: Option<u64>,
        rank_b: Option<u64>,
    },
    /// `p | rank(p)` but `p != rank(p)`.
    RankNotCoprime {
        #[serde(with = "serde_dec")]
        p: Nat,
        rho: u64,
    },
    /// `gcd(b_m, b_n) > 1` with `m > n`, and `m / n` is not a prime power
    /// (or, for the strong reading, its prime does not divide the gcd).
    SharedFactor {
        m: u64,
        n: u64,
        #[serde(with = "serde_dec")]
        gcd: Nat,
    },
    /// `n` squarefree but `prime^2 | b_n`.
    NonSquarefreeB {
        n: u64,
        #[serde(with = "serde_dec")]
        b_n: Nat,
        #[serde(with = "serde_dec")]
        prime: Nat,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecursionKind {
    /// `b_p = a_p / a_1`
    Prime,
    /// `b_{p^{k+1}} = a_{p^{k+1}} / a_{p^k}`
    PrimePower,
    /// `b_{pq} = a_{pq} / lcm(a_p, a_q)`
    PrimePair,
}

impl Witness {
    /// Largest sequence index needed to recompute this witness.
    pub fn max_index(&self) -> u64 {
        match self {
            Witness::LProperty { k, n, .. } | Witness::Divisibility { k, n, .. } => k * n,
            Witness::GcdIdentity { m, n, .. }
            | Witness::PairwiseCoprime { m, n, .. }
            | Witness::SharedFactor { m, n, .. } => (*m).max(*n),
            Witness::ProductFormula { n, .. }
            | Witness::BDividesA { n, .. }
            | Witness::NonSquarefreeB { n, .. } => *n,
            Witness::RecursionIdentity { target, .. } => *target,
            Witness::RankDivisibility { rho, k, .. } => (*rho).max(*k),
            Witness::ValuationStructure { rho, k, .. } => (*rho).max(*k),
            Witness::RankLte { rho, s, .. } => rho * s,
            Witness::Delta { p, rho, .. } => rho.saturating_mul(small(p)),
            Witness::CoprimeBlock { rho, k, .. } => rho * k,
            Witness::RankAgreement { bound, .. } => *bound,
            Witness::RankNotCoprime { rho, .. } => *rho,
        }
    }
}

fn small(p: &Nat) -> u64 {
    use num_traits::ToPrimitive;
    p.to_u64().unwrap_or(u64::MAX)
}

/// Verdict of one check over a scanned range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub status: Status,
    pub witnesses: Vec<Witness>,
    /// Witnesses dropped from `witnesses` by a serialization cap.
    #[serde(default)]
    pub witness_overflow: u64,
    pub tested_count: u64,
    pub skipped_count: u64,
    pub skip_reasons: BTreeMap<String, u64>,
    pub inconclusive_reasons: Vec<String>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Keeps the first `cap` witnesses and counts the rest.
    pub fn cap_witnesses(&mut self, cap: usize) {
        if self.witnesses.len() > cap {
            self.witness_overflow += (self.witnesses.len() - cap) as u64;
            self.witnesses.truncate(cap);
        }
    }
}

/// Accumulator that checkers merge across work items.
#[derive(Debug, Default, Clone)]
pub struct Tally {
    pub tested: u64,
    pub witnesses: Vec<Witness>,
    pub skips: BTreeMap<String, u64>,
    pub pending: Vec<String>,
}

impl Tally {
    pub fn test(&mut self, ok: bool, witness: impl FnOnce() -> Witness) {
        self.tested += 1;
        if !ok {
            self.witnesses.push(witness());
        }
    }

    pub fn skip(&mut self, reason: &str) {
        *self.skips.entry(reason.to_string()).or_default() += 1;
    }

    pub fn merge(&mut self, other: Tally) {
        self.tested += other.tested;
        self.witnesses.extend(other.witnesses);
        for (k, v) in other.skips {
            *self.skips.entry(k).or_default() += v;
        }
        self.pending.extend(other.pending);
    }

    pub fn merged(parts: impl IntoIterator<Item = Tally>) -> Tally {
        let mut out = Tally::default();
        for part in parts {
            out.merge(part);
        }
        out
    }

    pub fn into_report(mut self, name: &str, notes: Vec<String>) -> CheckReport {
        self.witnesses.sort();
        self.witnesses.dedup();
        self.pending.sort();
        self.pending.dedup();
        let status = if !self.witnesses.is_empty() {
            Status::Fail
        } else if !self.pending.is_empty() {
            Status::Inconclusive
        } else {
            Status::Pass
        };
        CheckReport {
            name: name.to_string(),
            status,
            witnesses: self.witnesses,
            witness_overflow: 0,
            tested_count: self.tested,
            skipped_count: self.skips.values().sum(),
            skip_reasons: self.skips,
            inconclusive_reasons: self.pending,
            notes,
        }
    }
}
