//! The b-sequence: `b_1 = a_1`, `b_n = lcm(a_1..a_n) / lcm(a_1..a_{n-1})`,
//! and the structural claims `a_n = prod_{d|n} b_d`, pairwise coprimality of
//! non-nested indices, and `b_n | a_n`.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{index_divisors, is_prime_u64, primes_up_to};
use crate::exec::Executor;
use crate::report::{CheckReport, RecursionKind, Tally, Witness};
use crate::seq::SequenceCache;
use crate::{Error, Nat, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BSequence {
    terms: Vec<Nat>,
    prefix_lcms: Vec<Nat>,
}

impl BSequence {
    /// `b_n`, 1-based.
    pub fn b(&self, n: u64) -> &Nat {
        &self.terms[n as usize - 1]
    }

    pub fn len(&self) -> u64 {
        self.terms.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Nat] {
        &self.terms
    }

    /// `lcm(a_1..a_n)`, 1-based.
    pub fn prefix_lcm(&self, n: u64) -> &Nat {
        &self.prefix_lcms[n as usize - 1]
    }

    pub fn require(&self, n: u64) -> Result<()> {
        if n == 0 || n > self.len() {
            return Err(Error::IndexOutOfRange {
                index: n,
                available: self.len(),
            });
        }
        Ok(())
    }
}

/// Builds `b_1..b_N`. Consecutive prefix lcms always divide one another, so
/// every quotient is an integer; sequences outside the theory show up as
/// failures in [`verify_structure`], not here.
pub fn build_bsequence(cache: &SequenceCache, n: u64) -> Result<BSequence> {
    cache.require(n)?;
    if n == 0 {
        return Err(Error::IndexOutOfRange {
            index: 0,
            available: cache.len(),
        });
    }
    let mut terms = Vec::with_capacity(n as usize);
    let mut prefix_lcms = Vec::with_capacity(n as usize);
    let mut running = Nat::one();
    for i in 1..=n {
        let next = running.lcm(cache.a(i));
        let (q, r) = next.div_rem(&running);
        debug_assert!(r.is_zero());
        terms.push(q);
        prefix_lcms.push(next.clone());
        running = next;
    }
    Ok(BSequence { terms, prefix_lcms })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub product_formula: CheckReport,
    pub pairwise_coprimality: CheckReport,
    pub b_divides_a: CheckReport,
}

impl StructureReport {
    pub fn into_checks(self) -> [CheckReport; 3] {
        [
            self.product_formula,
            self.pairwise_coprimality,
            self.b_divides_a,
        ]
    }
}

pub fn verify_structure<E: Executor>(
    cache: &SequenceCache,
    b: &BSequence,
    n: u64,
    exec: &E,
) -> Result<StructureReport> {
    cache.require(n)?;
    b.require(n)?;
    let indices: Vec<u64> = (1..=n).collect();

    let product = Tally::merged(exec.map(indices.clone(), |i| {
        let mut t = Tally::default();
        let prod = index_divisors(i)
            .into_iter()
            .fold(Nat::one(), |acc, d| acc * b.b(d));
        let a = cache.a(i);
        t.test(&prod == a, || Witness::ProductFormula {
            n: i,
            a_n: a.clone(),
            product: prod.clone(),
        });
        t
    }));

    let coprime = Tally::merged(exec.map(indices.clone(), |hi| {
        let mut t = Tally::default();
        for lo in 1..hi {
            if hi % lo == 0 {
                continue;
            }
            let g = b.b(lo).gcd(b.b(hi));
            t.test(g.is_one(), || Witness::PairwiseCoprime {
                m: lo,
                n: hi,
                gcd: g.clone(),
            });
        }
        t
    }));

    let divides = Tally::merged(exec.map(indices, |i| {
        let mut t = Tally::default();
        let rem = cache.a(i) % b.b(i);
        t.test(rem.is_zero(), || Witness::BDividesA {
            n: i,
            remainder: rem.clone(),
        });
        t
    }));

    Ok(StructureReport {
        product_formula: product.into_report("product_formula", vec![]),
        pairwise_coprimality: coprime.into_report(
            "pairwise_coprimality",
            vec!["gcd computed on stored b-values".to_string()],
        ),
        b_divides_a: divides.into_report("b_divides_a", vec![]),
    })
}

/// `numerator / denominator` is exact and equals `b_value`.
fn quotient_matches(b_value: &Nat, numerator: &Nat, denominator: &Nat) -> bool {
    let (q, r) = numerator.div_rem(denominator);
    r.is_zero() && &q == b_value
}

fn record_identity(
    tally: &mut Tally,
    identity: RecursionKind,
    target: u64,
    b: &BSequence,
    numerator: Nat,
    denominator: Nat,
) {
    let b_value = b.b(target);
    tally.test(quotient_matches(b_value, &numerator, &denominator), || {
        Witness::RecursionIdentity {
            identity,
            target,
            b_value: b_value.clone(),
            numerator,
            denominator,
        }
    });
}

/// Checks `b_p = a_p / a_1`, `b_{p^{k+1}} = a_{p^{k+1}} / a_{p^k}`, and
/// `b_{pq} = a_{pq} / lcm(a_p, a_q)` for one choice of primes `p != q` and `k`.
pub fn recursion_identities(
    cache: &SequenceCache,
    b: &BSequence,
    p: u64,
    q: u64,
    k: u32,
) -> Result<CheckReport> {
    if !is_prime_u64(p) || !is_prime_u64(q) || p == q {
        return Err(Error::Domain(format!(
            "recursion identities need distinct primes, got {p} and {q}"
        )));
    }
    let high = p.checked_pow(k + 1).ok_or(Error::IndexOutOfRange {
        index: u64::MAX,
        available: b.len(),
    })?;
    for idx in [p, high, p * q] {
        b.require(idx)?;
        cache.require(idx)?;
    }
    let mut tally = Tally::default();
    record_identity(
        &mut tally,
        RecursionKind::Prime,
        p,
        b,
        cache.a(p).clone(),
        cache.a(1).clone(),
    );
    record_identity(
        &mut tally,
        RecursionKind::PrimePower,
        high,
        b,
        cache.a(high).clone(),
        cache.a(high / p).clone(),
    );
    record_identity(
        &mut tally,
        RecursionKind::PrimePair,
        p * q,
        b,
        cache.a(p * q).clone(),
        cache.a(p).lcm(cache.a(q)),
    );
    Ok(tally.into_report("recursion_identities", vec![]))
}

/// Every instance of the three recursion identities with indices `<= n`.
pub fn check_recursion_identities<E: Executor>(
    cache: &SequenceCache,
    b: &BSequence,
    n: u64,
    exec: &E,
) -> Result<CheckReport> {
    cache.require(n)?;
    b.require(n)?;
    let primes = primes_up_to(n);
    let parts = exec.map(primes.clone(), |p| {
        let mut t = Tally::default();
        record_identity(
            &mut t,
            RecursionKind::Prime,
            p,
            b,
            cache.a(p).clone(),
            cache.a(1).clone(),
        );
        let mut power = p;
        while let Some(next) = power.checked_mul(p).filter(|&v| v <= n) {
            record_identity(
                &mut t,
                RecursionKind::PrimePower,
                next,
                b,
                cache.a(next).clone(),
                cache.a(power).clone(),
            );
            power = next;
        }
        for &q in primes.iter().filter(|&&q| q > p && p * q <= n) {
            record_identity(
                &mut t,
                RecursionKind::PrimePair,
                p * q,
                b,
                cache.a(p * q).clone(),
                cache.a(p).lcm(cache.a(q)),
            );
        }
        t
    });
    Ok(Tally::merged(parts).into_report("recursion_identities", vec![]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::report::Status;
    use crate::seq::{terms_up_to, SequenceSpec};

    fn nat(v: u64) -> Nat {
        Nat::from(v)
    }

    fn mersenne(n: u64) -> SequenceCache {
        terms_up_to(&SequenceSpec::power_diff(nat(2), nat(1)).unwrap(), n).unwrap()
    }

    fn fib(n: u64) -> SequenceCache {
        terms_up_to(&SequenceSpec::fibonacci(), n).unwrap()
    }

    #[test]
    fn mersenne_b_terms() {
        let b = build_bsequence(&mersenne(6), 6).unwrap();
        assert_eq!(b.terms(), &[1u64, 3, 7, 5, 31, 3].map(nat));
    }

    #[test]
    fn fibonacci_b_terms() {
        let b = build_bsequence(&fib(6), 6).unwrap();
        assert_eq!(b.terms(), &[1u64, 1, 2, 3, 5, 4].map(nat));
        assert_eq!(b.prefix_lcm(5), &nat(30));
        assert_eq!(b.prefix_lcm(6), &nat(120));
    }

    #[test]
    fn first_term_is_a1() {
        for spec in [
            SequenceSpec::power_diff(nat(7), nat(2)).unwrap(),
            SequenceSpec::lucas_u(3, 2),
            SequenceSpec::explicit("e", vec![nat(12), nat(5)]).unwrap(),
        ] {
            let c = terms_up_to(&spec, 2).unwrap();
            assert_eq!(build_bsequence(&c, 2).unwrap().b(1), c.a(1));
        }
    }

    #[test]
    fn structure_passes_on_mersenne_and_fibonacci() {
        for cache in [mersenne(6), fib(12)] {
            let n = cache.len();
            let b = build_bsequence(&cache, n).unwrap();
            let r = verify_structure(&cache, &b, n, &Sequential).unwrap();
            for check in r.into_checks() {
                assert_eq!(check.status, Status::Pass, "{}", check.name);
            }
        }
        let b = build_bsequence(&fib(12), 12).unwrap();
        assert_eq!(b.b(4).gcd(b.b(6)), nat(1));
    }

    #[test]
    fn structure_flags_non_divisibility_sequence() {
        // a_n = n + 1 breaks the product formula at n = 2: b_1 b_2 = 2 * 3 != 3.
        let terms = (1..=8u64).map(|n| nat(n + 1)).collect();
        let spec = SequenceSpec::explicit("n+1", terms).unwrap();
        let cache = terms_up_to(&spec, 8).unwrap();
        let b = build_bsequence(&cache, 8).unwrap();
        let r = verify_structure(&cache, &b, 8, &Sequential).unwrap();
        assert_eq!(r.product_formula.status, Status::Fail);
        assert!(r
            .product_formula
            .witnesses
            .contains(&Witness::ProductFormula {
                n: 2,
                a_n: nat(3),
                product: nat(6),
            }));
    }

    #[test]
    fn recursion_identity_examples() {
        let cache = mersenne(12);
        let b = build_bsequence(&cache, 12).unwrap();
        let r = recursion_identities(&cache, &b, 3, 2, 0).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert_eq!(r.tested_count, 3);
        let r = recursion_identities(&cache, &b, 2, 3, 1).unwrap();
        assert_eq!(r.status, Status::Pass);
        // b_4 = a_4 / a_2 = 5, b_6 = 63 / lcm(3, 7) = 3
        assert_eq!(b.b(4), &nat(5));
        assert_eq!(b.b(6), &nat(3));
        assert!(matches!(
            recursion_identities(&cache, &b, 2, 7, 1),
            Err(Error::IndexOutOfRange { index: 14, .. })
        ));
        assert!(recursion_identities(&cache, &b, 4, 3, 1).is_err());
        let sweep = check_recursion_identities(&cache, &b, 12, &Sequential).unwrap();
        assert_eq!(sweep.status, Status::Pass);
    }
}
