//! Ranks of apparition, primitive divisors, and instance checks for the
//! structural theorems about valuation-lifting sequences.
//!
//! Every checker takes an explicit prime list. Checkers whose hypothesis is
//! "odd prime" take an `odd_only` flag: when set, `p = 2` is skipped and
//! counted; when clear, `p = 2` is checked like any other prime (the
//! informational run).

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{
    divides, index_divisors, index_valuation, nu, primality, FactorCache, Factorizer,
};
use crate::bseq::BSequence;
use crate::exec::Executor;
use crate::report::{CheckReport, Status, Tally, Witness};
use crate::seq::SequenceCache;
use crate::{serde_dec, Error, Nat, Result};

const SKIP_EVEN: &str = "p = 2 outside the odd-prime hypothesis";
const SKIP_NO_RANK: &str = "rank not found within bound";
const SKIP_P_DIVIDES_RANK: &str = "p divides its rank";
const SKIP_OUT_OF_RANGE: &str = "p * rank beyond the scanned range";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Rank {
    Found { rho: u64 },
    NotFound { search_bound: u64 },
}

impl Rank {
    pub fn rho(self) -> Option<u64> {
        match self {
            Rank::Found { rho } => Some(rho),
            Rank::NotFound { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankEntry {
    #[serde(with = "serde_dec")]
    pub p: Nat,
    #[serde(flatten)]
    pub rank: Rank,
}

/// Ranks keyed by prime, ascending.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankTable {
    entries: Vec<RankEntry>,
}

impl RankTable {
    pub fn compute<E: Executor>(
        cache: &SequenceCache,
        primes: &[Nat],
        bound: u64,
        exec: &E,
    ) -> Result<Self> {
        cache.require(bound)?;
        let mut ps: Vec<Nat> = primes.to_vec();
        ps.sort();
        ps.dedup();
        let ranks = exec.map(ps.clone(), |p| rank(cache, &p, bound));
        let entries = ps
            .into_iter()
            .zip(ranks)
            .map(|(p, r)| r.map(|rank| RankEntry { p, rank }))
            .collect::<Result<Vec<_>>>()?;
        Ok(RankTable { entries })
    }

    pub fn get(&self, p: &Nat) -> Option<Rank> {
        self.entries
            .binary_search_by(|e| e.p.cmp(p))
            .ok()
            .map(|i| self.entries[i].rank)
    }

    pub fn entries(&self) -> &[RankEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Smallest `k <= bound` with `p | a_k`.
pub fn rank(cache: &SequenceCache, p: &Nat, bound: u64) -> Result<Rank> {
    if !primality(p, 20).is_prime_like() {
        return Err(Error::Domain(alloc::format!("{p} is not prime")));
    }
    cache.require(bound)?;
    Ok((1..=bound).find(|&k| divides(p, cache.a(k))).map_or(
        Rank::NotFound {
            search_bound: bound,
        },
        |rho| Rank::Found { rho },
    ))
}

/// `v_p(n)` for an index `n` and a prime of any size.
fn index_nu(n: u64, p: &Nat) -> u64 {
    match p.to_u64() {
        Some(small) => index_valuation(n, small),
        None => 0,
    }
}

fn index_divisible(n: u64, p: &Nat) -> bool {
    p.to_u64().is_some_and(|small| n.is_multiple_of(small))
}

fn is_two(p: &Nat) -> bool {
    *p == Nat::from(2u32)
}

/// `v_p(a_k)` for `k = 1..=n`, 1-based (slot 0 unused).
fn valuation_column(cache: &SequenceCache, p: &Nat, n: u64) -> Vec<u64> {
    let mut col = vec![0; n as usize + 1];
    for k in 1..=n {
        col[k as usize] = nu(cache.a(k), p);
    }
    col
}

pub fn check_l_property<E: Executor>(
    cache: &SequenceCache,
    n: u64,
    primes: &[Nat],
    odd_only: bool,
    exec: &E,
) -> Result<CheckReport> {
    cache.require(n)?;
    let parts = exec.map(primes.to_vec(), |p| {
        let mut t = Tally::default();
        if odd_only && is_two(&p) {
            t.skip(SKIP_EVEN);
            return t;
        }
        let col = valuation_column(cache, &p, n);
        for k in 1..=n {
            let vk = col[k as usize];
            if vk == 0 {
                continue;
            }
            for m in 2..=n / k {
                let expected = vk + index_nu(m, &p);
                let actual = col[(k * m) as usize];
                t.test(expected == actual, || Witness::LProperty {
                    p: p.clone(),
                    k,
                    n: m,
                    expected,
                    actual,
                });
            }
        }
        t
    });
    Ok(Tally::merged(parts).into_report("l_property", vec![]))
}

pub fn check_divisibility<E: Executor>(
    cache: &SequenceCache,
    n: u64,
    exec: &E,
) -> Result<CheckReport> {
    cache.require(n)?;
    let parts = exec.map((1..=n).collect(), |k| {
        let mut t = Tally::default();
        for m in 2..=n / k {
            let rem = cache.a(k * m) % cache.a(k);
            t.test(rem.is_zero(), || Witness::Divisibility {
                k,
                n: m,
                remainder: rem.clone(),
            });
        }
        t
    });
    Ok(Tally::merged(parts).into_report("divisibility", vec![]))
}

pub fn check_gcd_identity<E: Executor>(
    cache: &SequenceCache,
    n: u64,
    exec: &E,
) -> Result<CheckReport> {
    cache.require(n)?;
    let parts = exec.map((1..=n).collect(), |m| {
        let mut t = Tally::default();
        for j in m..=n {
            let g = cache.a(m).gcd(cache.a(j));
            let expected = cache.a(m.gcd(&j));
            t.test(&g == expected, || Witness::GcdIdentity {
                m,
                n: j,
                gcd: g.clone(),
                expected: expected.clone(),
            });
        }
        t
    });
    Ok(Tally::merged(parts).into_report("gcd_identity", vec![]))
}

/// `(p | a_k) <=> (rank(p) | k)` for every ranked prime and `k <= n`.
pub fn check_rank_divisibility<E: Executor>(
    cache: &SequenceCache,
    ranks: &RankTable,
    n: u64,
    exec: &E,
) -> Result<CheckReport> {
    cache.require(n)?;
    let parts = exec.map(ranks.entries().to_vec(), |entry| {
        let mut t = Tally::default();
        let Some(rho) = entry.rank.rho() else {
            t.skip(SKIP_NO_RANK);
            return t;
        };
        for k in 1..=n {
            let p_divides = divides(&entry.p, cache.a(k));
            let rho_divides = k % rho == 0;
            t.test(p_divides == rho_divides, || Witness::RankDivisibility {
                p: entry.p.clone(),
                rho,
                k,
                p_divides,
                rho_divides,
            });
        }
        t
    });
    Ok(Tally::merged(parts).into_report("rank_divisibility", vec![]))
}

/// Looks up the rank of an odd prime for the odd-prime checks, recording
/// the reason whenever the prime has to be skipped.
fn ranked(t: &mut Tally, ranks: &RankTable, p: &Nat, odd_only: bool) -> Option<u64> {
    if odd_only && is_two(p) {
        t.skip(SKIP_EVEN);
        return None;
    }
    match ranks.get(p).and_then(Rank::rho) {
        Some(rho) => Some(rho),
        None => {
            t.skip(SKIP_NO_RANK);
            None
        }
    }
}

/// For `p^s || a_k` with `s >= 1` and `p^r || a_rho`: `s >= r` and
/// `k = p^{s-r} rho l` with `p ∤ l`.
pub fn check_valuation_structure<E: Executor>(
    cache: &SequenceCache,
    ranks: &RankTable,
    n: u64,
    primes: &[Nat],
    odd_only: bool,
    exec: &E,
) -> Result<CheckReport> {
    cache.require(n)?;
    let parts = exec.map(primes.to_vec(), |p| {
        let mut t = Tally::default();
        let Some(rho) = ranked(&mut t, ranks, &p, odd_only) else {
            return t;
        };
        let col = valuation_column(cache, &p, n);
        let r = nu(cache.a(rho), &p);
        for k in 1..=n {
            let s = col[k as usize];
            if s == 0 {
                continue;
            }
            let ok = s >= r && k % rho == 0 && index_nu(k / rho, &p) == s - r;
            t.test(ok, || Witness::ValuationStructure {
                p: p.clone(),
                rho,
                k,
                r,
                s,
            });
        }
        t
    });
    Ok(Tally::merged(parts).into_report("valuation_structure", vec![]))
}

/// `v_p(a_{rho s}) = v_p(a_rho) + v_p(s)` for every `s` with `rho s <= n`.
pub fn check_rank_lte<E: Executor>(
    cache: &SequenceCache,
    ranks: &RankTable,
    n: u64,
    primes: &[Nat],
    odd_only: bool,
    exec: &E,
) -> Result<CheckReport> {
    cache.require(n)?;
    let parts = exec.map(primes.to_vec(), |p| {
        let mut t = Tally::default();
        let Some(rho) = ranked(&mut t, ranks, &p, odd_only) else {
            return t;
        };
        let base = nu(cache.a(rho), &p);
        for s in 1..=n / rho {
            let expected = base + index_nu(s, &p);
            let actual = nu(cache.a(rho * s), &p);
            t.test(expected == actual, || Witness::RankLte {
                p: p.clone(),
                rho,
                s,
                expected,
                actual,
            });
        }
        t
    });
    Ok(Tally::merged(parts).into_report("rank_lte", vec![]))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaResult {
    #[serde(with = "serde_dec")]
    pub p: Nat,
    pub rho: u64,
    /// The unique divisor with `p || b_{p delta}`, when the claim holds.
    pub delta: Option<u64>,
    /// `(d, v_p(b_{pd}))` for every `d | rho`, ascending in `d`.
    pub valuations: Vec<(u64, u64)>,
    pub status: Status,
}

/// Valuations `v_p(b_{pd})` over `d | rho`; passes iff exactly one equals 1
/// and the others are 0.
pub fn find_delta(
    cache: &SequenceCache,
    b: &BSequence,
    p: &Nat,
    ranks: &RankTable,
) -> Result<DeltaResult> {
    if is_two(p) {
        return Err(Error::PreconditionSkip(SKIP_EVEN.to_string()));
    }
    let rho = ranks
        .get(p)
        .and_then(Rank::rho)
        .ok_or_else(|| Error::PreconditionSkip(SKIP_NO_RANK.to_string()))?;
    if index_divisible(rho, p) {
        return Err(Error::PreconditionSkip(SKIP_P_DIVIDES_RANK.to_string()));
    }
    let small = p.to_u64().ok_or(Error::IndexOutOfRange {
        index: u64::MAX,
        available: b.len(),
    })?;
    let top = small.checked_mul(rho).ok_or(Error::IndexOutOfRange {
        index: u64::MAX,
        available: b.len(),
    })?;
    b.require(top)?;
    cache.require(top)?;
    let valuations: Vec<(u64, u64)> = index_divisors(rho)
        .into_iter()
        .map(|d| (d, nu(b.b(small * d), p)))
        .collect();
    let ones: Vec<u64> = valuations
        .iter()
        .filter(|(_, v)| *v == 1)
        .map(|(d, _)| *d)
        .collect();
    let zeros = valuations.iter().filter(|(_, v)| *v == 0).count();
    let holds = ones.len() == 1 && zeros + 1 == valuations.len();
    Ok(DeltaResult {
        p: p.clone(),
        rho,
        delta: holds.then(|| ones[0]),
        valuations,
        status: if holds { Status::Pass } else { Status::Fail },
    })
}

/// [`find_delta`] over a prime list, with skips counted by reason.
pub fn check_delta<E: Executor>(
    cache: &SequenceCache,
    b: &BSequence,
    ranks: &RankTable,
    primes: &[Nat],
    exec: &E,
) -> (CheckReport, Vec<DeltaResult>) {
    let outcomes = exec.map(primes.to_vec(), |p| find_delta(cache, b, &p, ranks));
    let mut t = Tally::default();
    let mut results = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(res) => {
                t.test(res.status == Status::Pass, || Witness::Delta {
                    p: res.p.clone(),
                    rho: res.rho,
                    valuations: res.valuations.clone(),
                });
                results.push(res);
            }
            Err(Error::PreconditionSkip(reason)) => t.skip(&reason),
            Err(_) => t.skip(SKIP_OUT_OF_RANGE),
        }
    }
    (t.into_report("delta", vec![]), results)
}

/// For `gcd(p rho, k) = 1` with `rho k <= n`: `p ∤ b_{de}` for every `d | rho`
/// and `e | k` with `e > 1`.
///
/// The pair `(d, e) = (rho, 1)` is excluded: it is `b_rho`, which `p` always
/// divides. The quantifier `e > 1` is what makes the block equal to
/// `a_{rho k} / a_rho`.
pub fn check_coprime_block<E: Executor>(
    cache: &SequenceCache,
    b: &BSequence,
    ranks: &RankTable,
    n: u64,
    primes: &[Nat],
    odd_only: bool,
    exec: &E,
) -> Result<CheckReport> {
    cache.require(n)?;
    b.require(n)?;
    let parts = exec.map(primes.to_vec(), |p| {
        let mut t = Tally::default();
        let Some(rho) = ranked(&mut t, ranks, &p, odd_only) else {
            return t;
        };
        let rho_divisors = index_divisors(rho);
        for k in 2..=n / rho {
            if index_divisible(k, &p) || k.gcd(&rho) != 1 {
                continue;
            }
            for e in index_divisors(k).into_iter().skip(1) {
                for &d in &rho_divisors {
                    let valuation = nu(b.b(d * e), &p);
                    t.test(valuation == 0, || Witness::CoprimeBlock {
                        p: p.clone(),
                        rho,
                        k,
                        d,
                        e,
                        valuation,
                    });
                }
            }
        }
        t
    });
    let note =
        "tests divisor pairs (d, e) with e > 1; the pair (rho, 1) is b_rho itself and is excluded";
    Ok(Tally::merged(parts).into_report("coprime_block", vec![note.to_string()]))
}

/// First index `<= n` at which `p` divides `a` and `b` respectively; the two
/// must agree (including both absent, which is the prime-set claim).
pub fn check_rank_agreement<E: Executor>(
    cache: &SequenceCache,
    b: &BSequence,
    ranks: &RankTable,
    n: u64,
    primes: &[Nat],
    exec: &E,
) -> Result<CheckReport> {
    cache.require(n)?;
    b.require(n)?;
    let parts = exec.map(primes.to_vec(), |p| {
        let mut t = Tally::default();
        let rank_a = match ranks.get(&p) {
            Some(Rank::Found { rho }) if rho <= n => Some(rho),
            Some(Rank::NotFound { search_bound }) if search_bound >= n => None,
            _ => (1..=n).find(|&k| divides(&p, cache.a(k))),
        };
        let rank_b = (1..=n).find(|&k| divides(&p, b.b(k)));
        t.test(rank_a == rank_b, || Witness::RankAgreement {
            p: p.clone(),
            bound: n,
            rank_a,
            rank_b,
        });
        t
    });
    Ok(Tally::merged(parts).into_report("rank_agreement", vec![]))
}

/// `a_n` with every prime that divides an earlier term removed.
///
/// A prime divides some `a_i`, `i < n`, iff it divides `lcm(a_1..a_{n-1})`,
/// so stripping common factors with the prefix lcm leaves exactly the
/// product of the primitive prime powers.
pub fn primitive_part(a_n: &Nat, earlier_lcm: &Nat) -> Nat {
    let mut rest = a_n.clone();
    loop {
        let g = rest.gcd(earlier_lcm);
        if g.is_one() {
            return rest;
        }
        rest /= g;
    }
}

/// Primitive parts of `a_1..a_n`, 1-based (slot 0 unused).
pub fn primitive_parts(cache: &SequenceCache, n: u64) -> Result<Vec<Nat>> {
    cache.require(n)?;
    let mut out = vec![Nat::zero()];
    let mut running = Nat::one();
    for i in 1..=n {
        out.push(primitive_part(cache.a(i), &running));
        running = running.lcm(cache.a(i));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitiveDivisors {
    pub n: u64,
    /// Product of the primitive prime powers of `a_n`; 1 iff none exist.
    #[serde(with = "serde_dec")]
    pub primitive_part: Nat,
    /// Primitive primes found by factoring the primitive part.
    #[serde(with = "serde_dec::vec")]
    pub primes: Vec<Nat>,
    /// Unsplit part of the primitive part (1 when `primes` is complete).
    #[serde(with = "serde_dec")]
    pub unfactored: Nat,
    pub probabilistic: bool,
}

impl PrimitiveDivisors {
    pub fn exists(&self) -> bool {
        !self.primitive_part.is_one()
    }

    pub fn is_complete(&self) -> bool {
        self.unfactored.is_one()
    }
}

fn describe_primitive<C: FactorCache + ?Sized>(
    n: u64,
    part: Nat,
    factorizer: &Factorizer,
    fcache: &C,
) -> PrimitiveDivisors {
    let f = factorizer.factorize_cached(&part, fcache);
    PrimitiveDivisors {
        n,
        primes: f.primes().cloned().collect(),
        unfactored: f.residual.clone(),
        probabilistic: f.probabilistic,
        primitive_part: part,
    }
}

pub fn primitive_divisors<C: FactorCache + ?Sized>(
    cache: &SequenceCache,
    n: u64,
    factorizer: &Factorizer,
    fcache: &C,
) -> Result<PrimitiveDivisors> {
    cache.require(n)?;
    if n == 0 {
        return Err(Error::IndexOutOfRange {
            index: 0,
            available: cache.len(),
        });
    }
    let earlier = (1..n).fold(Nat::one(), |acc, i| acc.lcm(cache.a(i)));
    let part = primitive_part(cache.a(n), &earlier);
    Ok(describe_primitive(n, part, factorizer, fcache))
}

/// Primes dividing some `a_k`, `k <= n`, found by factoring primitive parts.
/// Returns the primes and a description of every part left unfactored.
pub fn found_primes<E: Executor, C: FactorCache + ?Sized>(
    cache: &SequenceCache,
    n: u64,
    factorizer: &Factorizer,
    fcache: &C,
    exec: &E,
) -> Result<(Vec<Nat>, Vec<String>)> {
    let parts = primitive_parts(cache, n)?;
    let items: Vec<(u64, Nat)> = parts
        .into_iter()
        .enumerate()
        .skip(1)
        .map(|(i, v)| (i as u64, v))
        .collect();
    let described = exec.map(items, |(i, part)| {
        describe_primitive(i, part, factorizer, fcache)
    });
    let mut primes = Vec::new();
    let mut pending = Vec::new();
    for d in described {
        primes.extend(d.primes.iter().cloned());
        if !d.is_complete() {
            pending.push(alloc::format!("n={}: unfactored {}", d.n, d.unfactored));
        }
    }
    primes.sort();
    primes.dedup();
    Ok((primes, pending))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{EffortBudget, NoCache};
    use crate::bseq::build_bsequence;
    use crate::exec::Sequential;
    use crate::seq::{terms_up_to, SequenceSpec};

    fn nat(v: u64) -> Nat {
        Nat::from(v)
    }

    fn cache(spec: SequenceSpec, n: u64) -> SequenceCache {
        terms_up_to(&spec, n).unwrap()
    }

    fn mersenne(n: u64) -> SequenceCache {
        cache(SequenceSpec::power_diff(nat(2), nat(1)).unwrap(), n)
    }

    fn fib(n: u64) -> SequenceCache {
        cache(SequenceSpec::fibonacci(), n)
    }

    fn primes(ps: &[u64]) -> Vec<Nat> {
        ps.iter().map(|&p| nat(p)).collect()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&fib(20), &nat(7), 20).unwrap(), Rank::Found { rho: 8 });
        assert_eq!(
            rank(&mersenne(20), &nat(2), 20).unwrap(),
            Rank::NotFound { search_bound: 20 }
        );
        assert_eq!(
            rank(&mersenne(20), &nat(7), 20).unwrap(),
            Rank::Found { rho: 3 }
        );
        assert!(matches!(rank(&fib(5), &nat(9), 5), Err(Error::Domain(_))));
    }

    #[test]
    fn l_property_examples() {
        let c = cache(SequenceSpec::power_diff(nat(4), nat(1)).unwrap(), 30);
        let r = check_l_property(&c, 30, &primes(&[3, 5, 7]), true, &Sequential).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert_eq!(nu(c.a(3), &nat(3)), 2);
        let f = fib(25);
        assert_eq!(nu(f.a(25), &nat(5)), 2);
        let r = check_l_property(&f, 25, &primes(&[2, 3, 5, 7]), true, &Sequential).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.skip_reasons.get(SKIP_EVEN), Some(&1));
    }

    #[test]
    fn l_property_fails_for_two_on_fibonacci() {
        // v_2(F_6) = 3 but v_2(F_3) + v_2(2) = 2.
        let f = fib(12);
        let r = check_l_property(&f, 12, &primes(&[2]), false, &Sequential).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(r.witnesses.contains(&Witness::LProperty {
            p: nat(2),
            k: 3,
            n: 2,
            expected: 2,
            actual: 3
        }));
    }

    #[test]
    fn divisibility_and_gcd_examples() {
        for c in [mersenne(40), fib(40)] {
            assert!(check_divisibility(&c, 40, &Sequential).unwrap().passed());
            assert!(check_gcd_identity(&c, 40, &Sequential).unwrap().passed());
        }
        let f = fib(18);
        assert_eq!(f.a(12).gcd(f.a(18)), nat(8));
        let m = mersenne(6);
        assert_eq!(m.a(4).gcd(m.a(6)), nat(3));
    }

    #[test]
    fn divisibility_fails_for_power_sum() {
        // a_n = 2^n + 1: a_1 = 3 does not divide a_2 = 5.
        let terms = (1..=10u32).map(|n| (Nat::one() << n) + 1u32).collect();
        let c = cache(SequenceSpec::explicit("2^n+1", terms).unwrap(), 10);
        let r = check_divisibility(&c, 10, &Sequential).unwrap();
        assert!(r.witnesses.contains(&Witness::Divisibility {
            k: 1,
            n: 2,
            remainder: nat(2)
        }));
    }

    #[test]
    fn rank_divisibility_examples() {
        let m = mersenne(30);
        let ranks = RankTable::compute(&m, &primes(&[2, 3, 5, 7, 31]), 30, &Sequential).unwrap();
        let r = check_rank_divisibility(&m, &ranks, 30, &Sequential).unwrap();
        assert!(r.passed());
        assert_eq!(r.skip_reasons.get(SKIP_NO_RANK), Some(&1));
        let f = fib(30);
        let ranks = RankTable::compute(&f, &primes(&[2, 3, 5, 7]), 30, &Sequential).unwrap();
        assert_eq!(ranks.get(&nat(2)), Some(Rank::Found { rho: 3 }));
        assert!(check_rank_divisibility(&f, &ranks, 30, &Sequential)
            .unwrap()
            .passed());
    }

    #[test]
    fn valuation_structure_and_rank_lte_examples() {
        let f = fib(60);
        let ps = primes(&[3, 5, 7, 11]);
        let ranks = RankTable::compute(&f, &ps, 60, &Sequential).unwrap();
        assert!(
            check_valuation_structure(&f, &ranks, 60, &ps, true, &Sequential)
                .unwrap()
                .passed()
        );
        assert!(check_rank_lte(&f, &ranks, 60, &ps, true, &Sequential)
            .unwrap()
            .passed());
        // F_12 = 144: v_3 = 2 = v_3(F_4) + v_3(3)
        assert_eq!(nu(f.a(12), &nat(3)), 2);
        let c = cache(SequenceSpec::power_diff(nat(4), nat(1)).unwrap(), 6);
        assert_eq!(nu(c.a(6), &nat(3)), 2);
    }

    #[test]
    fn delta_examples() {
        let m = mersenne(30);
        let b = build_bsequence(&m, 30).unwrap();
        let ranks = RankTable::compute(&m, &primes(&[3, 5, 7]), 30, &Sequential).unwrap();
        let d = find_delta(&m, &b, &nat(7), &ranks).unwrap();
        assert_eq!(d.valuations, vec![(1, 0), (3, 1)]);
        assert_eq!(d.delta, Some(3));
        assert_eq!(b.b(21), &nat(7 * 337));

        let f = fib(60);
        let b = build_bsequence(&f, 60).unwrap();
        let ranks = RankTable::compute(&f, &primes(&[2, 5, 7, 13]), 60, &Sequential).unwrap();
        let d = find_delta(&f, &b, &nat(7), &ranks).unwrap();
        assert_eq!(d.rho, 8);
        assert_eq!(d.status, Status::Pass);
        assert_eq!(d.valuations.iter().filter(|(_, v)| *v == 1).count(), 1);
        assert!(matches!(
            find_delta(&f, &b, &nat(5), &ranks),
            Err(Error::PreconditionSkip(_))
        ));
        assert!(matches!(
            find_delta(&f, &b, &nat(13), &ranks),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn delta_with_rank_one() {
        // 4^n - 1: rank of 3 is 1, so only d = 1 and 3 || b_3 = 21.
        let c = cache(SequenceSpec::power_diff(nat(4), nat(1)).unwrap(), 9);
        let b = build_bsequence(&c, 9).unwrap();
        let ranks = RankTable::compute(&c, &primes(&[3]), 9, &Sequential).unwrap();
        let d = find_delta(&c, &b, &nat(3), &ranks).unwrap();
        assert_eq!(d.valuations, vec![(1, 1)]);
        assert_eq!(d.delta, Some(1));
    }

    #[test]
    fn coprime_block_examples() {
        let m = mersenne(12);
        let b = build_bsequence(&m, 12).unwrap();
        let ranks = RankTable::compute(&m, &primes(&[7]), 12, &Sequential).unwrap();
        let r = check_coprime_block(&m, &b, &ranks, 12, &primes(&[7]), true, &Sequential).unwrap();
        assert!(r.passed());
        // k = 2 (e = 2; d = 1, 3) and k = 4 (e = 2, 4; d = 1, 3)
        assert_eq!(r.tested_count, 6);

        let r = check_coprime_block(&m, &b, &ranks, 3, &primes(&[7]), true, &Sequential).unwrap();
        assert_eq!((r.status, r.tested_count), (Status::Pass, 0));

        let f = fib(12);
        let b = build_bsequence(&f, 12).unwrap();
        let ranks = RankTable::compute(&f, &primes(&[2]), 12, &Sequential).unwrap();
        let r = check_coprime_block(&f, &b, &ranks, 12, &primes(&[2]), true, &Sequential).unwrap();
        assert_eq!(r.skipped_count, 1);
    }

    #[test]
    fn rank_agreement_examples() {
        let m = mersenne(40);
        let b = build_bsequence(&m, 40).unwrap();
        let ps = primes(&[2, 3, 5, 7, 11, 13, 17]);
        let ranks = RankTable::compute(&m, &ps, 40, &Sequential).unwrap();
        assert_eq!(ranks.get(&nat(5)), Some(Rank::Found { rho: 4 }));
        assert!(check_rank_agreement(&m, &b, &ranks, 40, &ps, &Sequential)
            .unwrap()
            .passed());
    }

    #[test]
    fn primitive_divisor_examples() {
        let fz = Factorizer::new(EffortBudget::default());
        let m = mersenne(6);
        let p6 = primitive_divisors(&m, 6, &fz, &NoCache).unwrap();
        assert!(!p6.exists() && p6.primes.is_empty());
        let c = cache(SequenceSpec::power_diff(nat(7), nat(1)).unwrap(), 1);
        let p1 = primitive_divisors(&c, 1, &fz, &NoCache).unwrap();
        assert_eq!(p1.primes, primes(&[2, 3]));
        let f = fib(7);
        let p7 = primitive_divisors(&f, 7, &fz, &NoCache).unwrap();
        assert_eq!(p7.primes, primes(&[13]));
    }

    #[test]
    fn primitive_part_matches_per_term_scan() {
        let fz = Factorizer::new(EffortBudget::default());
        let f = fib(60);
        let parts = primitive_parts(&f, 60).unwrap();
        for n in 1..=60u64 {
            let full = fz.factorize(f.a(n));
            let brute: Vec<Nat> = full
                .primes()
                .filter(|p| (1..n).all(|i| !divides(p, f.a(i))))
                .cloned()
                .collect();
            let mine = fz.factorize(&parts[n as usize]);
            assert_eq!(mine.primes().cloned().collect::<Vec<_>>(), brute, "n = {n}");
        }
    }
}
