//! Falsification scans for four open claims about valuation-lifting
//! sequences. A scan never reports a claim as verified: the best outcome is
//! "no counterexample in the scanned range".

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::analysis::{primitive_parts, Rank, RankTable};
use crate::arith::{
    index_divisors, prime_power_base, squarefree_verdict, FactorCache, Factorization, Factorizer,
    PrimePower, SquarefreeVerdict,
};
use crate::bseq::BSequence;
use crate::exec::Executor;
use crate::report::Witness;
use crate::seq::SequenceCache;
use crate::{serde_dec, Nat, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjectureStatus {
    NoCounterexample,
    Counterexample,
    Inconclusive,
}

/// One interpretation of a conjecture and its outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reading {
    pub name: String,
    /// Whether this reading decides the overall status.
    pub primary: bool,
    pub status: ConjectureStatus,
    pub witnesses: Vec<Witness>,
    #[serde(default)]
    pub witness_overflow: u64,
    pub pending: Vec<String>,
}

impl Reading {
    fn new(name: &str, primary: bool, mut witnesses: Vec<Witness>, pending: Vec<String>) -> Self {
        witnesses.sort();
        witnesses.dedup();
        let status = if !witnesses.is_empty() {
            ConjectureStatus::Counterexample
        } else if !pending.is_empty() {
            ConjectureStatus::Inconclusive
        } else {
            ConjectureStatus::NoCounterexample
        };
        Reading {
            name: name.to_string(),
            primary,
            status,
            witnesses,
            witness_overflow: 0,
            pending,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureResult {
    pub conjecture_id: u8,
    pub status: ConjectureStatus,
    pub readings: Vec<Reading>,
    pub scanned_n: u64,
    pub scanned_p: u64,
    pub tested_count: u64,
    pub skipped_count: u64,
    /// Indices whose term has no primitive prime divisor (conjecture 4).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exceptional_set: Option<Vec<u64>>,
    /// `lcm` of the exceptional set, when it is nonempty.
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "serde_dec::opt"
    )]
    pub candidate_m: Option<Nat>,
    pub notes: Vec<String>,
}

impl ConjectureResult {
    fn from_readings(id: u8, readings: Vec<Reading>, n: u64, p: u64) -> Self {
        let status = readings
            .iter()
            .find(|r| r.primary)
            .map_or(ConjectureStatus::NoCounterexample, |r| r.status);
        ConjectureResult {
            conjecture_id: id,
            status,
            readings,
            scanned_n: n,
            scanned_p: p,
            tested_count: 0,
            skipped_count: 0,
            exceptional_set: None,
            candidate_m: None,
            notes: Vec::new(),
        }
    }

    pub fn cap_witnesses(&mut self, cap: usize) {
        for r in &mut self.readings {
            if r.witnesses.len() > cap {
                r.witness_overflow += (r.witnesses.len() - cap) as u64;
                r.witnesses.truncate(cap);
            }
        }
    }
}

/// If `gcd(p, rank(p)) != 1` then `p = rank(p)`, for ranked `p <= p_bound`.
pub fn scan_conj1(ranks: &RankTable, p_bound: u64) -> ConjectureResult {
    let mut witnesses = Vec::new();
    let (mut coprime, mut equal, mut tested, mut skipped) = (0u64, 0u64, 0u64, 0u64);
    for entry in ranks.entries() {
        if entry.p > Nat::from(p_bound) {
            continue;
        }
        let Rank::Found { rho } = entry.rank else {
            skipped += 1;
            continue;
        };
        tested += 1;
        let rho_nat = Nat::from(rho);
        if entry.p.gcd(&rho_nat).is_one() {
            coprime += 1;
        } else if entry.p == rho_nat {
            equal += 1;
        } else {
            witnesses.push(Witness::RankNotCoprime {
                p: entry.p.clone(),
                rho,
            });
        }
    }
    let max_rank = ranks
        .entries()
        .iter()
        .filter_map(|e| e.rank.rho())
        .max()
        .unwrap_or(0);
    let mut out = ConjectureResult::from_readings(
        1,
        vec![Reading::new(
            "single_implication",
            true,
            witnesses,
            Vec::new(),
        )],
        max_rank,
        p_bound,
    );
    out.tested_count = tested;
    out.skipped_count = skipped;
    out.notes = vec![
        alloc::format!("coprime rank: {coprime}"),
        alloc::format!("rank equals p: {equal}"),
    ];
    out
}

/// If `gcd(b_m, b_n) > 1` with `m > n`, then `m / n = q^a` for a prime `q`
/// and `a >= 1`. The strong reading also asks `q | gcd(b_m, b_n)`.
pub fn scan_conj2<E: Executor>(b: &BSequence, n: u64, exec: &E) -> Result<ConjectureResult> {
    b.require(n)?;
    let parts = exec.map((2..=n).collect::<Vec<u64>>(), |m| {
        let mut weak = Vec::new();
        let mut strong = Vec::new();
        let mut tested = 0u64;
        for j in 1..m {
            let g = b.b(m).gcd(b.b(j));
            if g.is_one() {
                continue;
            }
            tested += 1;
            let base = (m % j == 0).then(|| prime_power_base(m / j)).flatten();
            let witness = || Witness::SharedFactor {
                m,
                n: j,
                gcd: g.clone(),
            };
            match base {
                None => {
                    weak.push(witness());
                    strong.push(witness());
                }
                Some(q) if !(&g % q).is_zero() => strong.push(witness()),
                Some(_) => {}
            }
        }
        (weak, strong, tested)
    });
    let mut weak = Vec::new();
    let mut strong = Vec::new();
    let mut tested = 0;
    for (w, s, t) in parts {
        weak.extend(w);
        strong.extend(s);
        tested += t;
    }
    let mut out = ConjectureResult::from_readings(
        2,
        vec![
            Reading::new("weak_prime_power_ratio", true, weak, Vec::new()),
            Reading::new("strong_ratio_prime_divides_gcd", false, strong, Vec::new()),
        ],
        n,
        0,
    );
    out.tested_count = tested;
    out.notes = vec!["pairs with gcd(b_m, b_n) = 1 are vacuous and not counted".to_string()];
    Ok(out)
}

fn without_two(f: &Factorization) -> Factorization {
    let two = Nat::from(2u32);
    Factorization {
        factors: f
            .factors
            .iter()
            .filter(|pp| pp.prime != two)
            .cloned()
            .collect::<Vec<PrimePower>>(),
        ..f.clone()
    }
}

fn is_squarefree_index(n: u64) -> bool {
    index_divisors(n)
        .iter()
        .skip(1)
        .all(|&d| d * d > n || !n.is_multiple_of(d * d))
}

/// `b_n` squarefree for squarefree `n <= n_max`, under two readings: all
/// primes, and odd primes only (the exponent of 2 ignored).
pub fn scan_conj3<E: Executor, C: FactorCache + ?Sized>(
    b: &BSequence,
    n_max: u64,
    factorizer: &Factorizer,
    fcache: &C,
    odd_primes_only: bool,
    exec: &E,
) -> Result<ConjectureResult> {
    b.require(n_max)?;
    let indices: Vec<u64> = (1..=n_max).filter(|&n| is_squarefree_index(n)).collect();
    let skipped = n_max - indices.len() as u64;
    let tested = indices.len() as u64;
    let verdicts = exec.map(indices, |n| {
        let f = factorizer.factorize_cached(b.b(n), fcache);
        (
            n,
            squarefree_verdict(&f),
            squarefree_verdict(&without_two(&f)),
            f.probabilistic,
        )
    });
    let mut all = (Vec::new(), Vec::new());
    let mut odd = (Vec::new(), Vec::new());
    let mut probabilistic = 0u64;
    for (n, v_all, v_odd, prob) in verdicts {
        probabilistic += prob as u64;
        for (verdict, sink) in [(v_all, &mut all), (v_odd, &mut odd)] {
            match verdict {
                SquarefreeVerdict::Squarefree => {}
                SquarefreeVerdict::NotSquarefree { witness } => {
                    sink.0.push(Witness::NonSquarefreeB {
                        n,
                        b_n: b.b(n).clone(),
                        prime: witness,
                    })
                }
                SquarefreeVerdict::Inconclusive { reason } => {
                    sink.1.push(alloc::format!("n={n}: {reason}"))
                }
            }
        }
    }
    let mut out = ConjectureResult::from_readings(
        3,
        vec![
            Reading::new("all_primes", !odd_primes_only, all.0, all.1),
            Reading::new("odd_primes", odd_primes_only, odd.0, odd.1),
        ],
        n_max,
        0,
    );
    out.tested_count = tested;
    out.skipped_count = skipped;
    out.notes = vec![alloc::format!(
        "verdicts depending on probable primes: {probabilistic}"
    )];
    Ok(out)
}

/// Indices `n <= n_max` where `a_n` has no primitive prime divisor, and
/// their lcm. Existence of a primitive divisor is decided exactly from the
/// primitive part, so no index is left pending.
pub fn scan_conj4(cache: &SequenceCache, n_max: u64) -> Result<ConjectureResult> {
    let parts = primitive_parts(cache, n_max)?;
    let exceptional: Vec<u64> = (1..=n_max)
        .filter(|&n| parts[n as usize].is_one())
        .collect();
    let candidate_m = (!exceptional.is_empty()).then(|| {
        exceptional
            .iter()
            .fold(Nat::one(), |acc, &n| acc.lcm(&Nat::from(n)))
    });
    let mut out = ConjectureResult::from_readings(
        4,
        vec![Reading::new(
            "finite_exceptions_dividing_m",
            true,
            Vec::new(),
            Vec::new(),
        )],
        n_max,
        0,
    );
    out.tested_count = n_max;
    out.notes = vec![
        "existential claim: the exceptional set is evidence, not a verdict".to_string(),
        alloc::format!(
            "largest exceptional index: {}",
            exceptional
                .last()
                .map_or("none".to_string(), |n| n.to_string())
        ),
    ];
    if let Some(m) = &candidate_m {
        let all_divide = exceptional
            .iter()
            .all(|&n| m.to_u64().is_none_or(|mv| mv % n == 0));
        out.notes.push(alloc::format!(
            "every exceptional index divides M: {all_divide}"
        ));
    }
    out.exceptional_set = Some(exceptional);
    out.candidate_m = candidate_m;
    Ok(out)
}
