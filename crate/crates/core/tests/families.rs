//! Sweeps over several sequence families, each compared against an oracle
//! written independently of the library.

use std::sync::Mutex;
use std::thread;

use lseq_core::analysis::{
    check_coprime_block, check_delta, check_divisibility, check_gcd_identity, check_l_property,
    check_rank_agreement, check_rank_divisibility, check_rank_lte, check_valuation_structure,
    RankTable,
};
use lseq_core::arith::{odd_primes_up_to, primes_up_to};
use lseq_core::bseq::{build_bsequence, check_recursion_identities, verify_structure};
use lseq_core::exec::{Executor, Sequential};
use lseq_core::report::Status;
use lseq_core::seq::{terms_up_to, SequenceSpec};
use lseq_core::Nat;
use num_integer::Integer;
use num_traits::Zero;

/// Splits work across scoped threads in interleaved stripes, so item order
/// and thread assignment differ from the sequential executor.
struct Striped(usize);

impl Executor for Striped {
    fn map<T, R, F>(&self, items: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync + Send,
    {
        let len = items.len();
        let slots: Vec<Mutex<Option<R>>> = (0..len).map(|_| Mutex::new(None)).collect();
        let mut stripes: Vec<Vec<(usize, T)>> = (0..self.0).map(|_| Vec::new()).collect();
        for (i, item) in items.into_iter().enumerate() {
            stripes[i % self.0].push((i, item));
        }
        thread::scope(|s| {
            for stripe in stripes {
                let (f, slots) = (&f, &slots);
                s.spawn(move || {
                    for (i, item) in stripe.into_iter().rev() {
                        *slots[i].lock().unwrap() = Some(f(item));
                    }
                });
            }
        });
        slots
            .into_iter()
            .map(|m| m.into_inner().unwrap().unwrap())
            .collect()
    }
}

fn nat(v: u64) -> Nat {
    Nat::from(v)
}

fn families() -> Vec<SequenceSpec> {
    vec![
        SequenceSpec::power_diff(nat(2), nat(1)).unwrap(),
        SequenceSpec::power_diff(nat(3), nat(1)).unwrap(),
        SequenceSpec::power_diff(nat(5), nat(3)).unwrap(),
        SequenceSpec::power_diff(nat(10), nat(7)).unwrap(),
        SequenceSpec::fibonacci(),
        SequenceSpec::lucas_u(3, 2),
        SequenceSpec::lucas_u(3, -1),
        SequenceSpec::lucas_u(5, 3),
    ]
}

fn pow_diff_oracle(x: u64, y: u64, n: u32) -> Nat {
    num_traits::pow(nat(x), n as usize) - num_traits::pow(nat(y), n as usize)
}

#[test]
fn divisibility_by_direct_remainders() {
    for spec in families() {
        let cache = terms_up_to(&spec, 300).unwrap();
        for k in 1..=30u64 {
            for m in 1..=300 / k {
                assert!(
                    (cache.a(k * m) % cache.a(k)).is_zero(),
                    "{spec} k={k} m={m}"
                );
            }
        }
        for (m, n) in [(12u64, 18u64), (100, 75), (299, 13), (256, 96)] {
            assert_eq!(&cache.a(m).gcd(cache.a(n)), cache.a(m.gcd(&n)), "{spec}");
        }
    }
}

#[test]
fn power_diff_terms_match_exponentiation() {
    for (x, y) in [(2u64, 1u64), (7, 2), (10, 9)] {
        let cache = terms_up_to(&SequenceSpec::power_diff(nat(x), nat(y)).unwrap(), 120).unwrap();
        for n in 1..=120u32 {
            assert_eq!(cache.a(n as u64), &pow_diff_oracle(x, y, n));
        }
    }
}

/// `b_n = a_n / prod_{d | n, d < n} b_d`, peeled in index order.
fn peeled_b(a: &[Nat]) -> Vec<Nat> {
    let n = a.len() - 1;
    let mut b = vec![Nat::zero(); n + 1];
    for i in 1..=n {
        let mut rest = a[i].clone();
        for d in (1..i).filter(|d| i % d == 0) {
            let (q, r) = rest.div_rem(&b[d]);
            assert!(r.is_zero());
            rest = q;
        }
        b[i] = rest;
    }
    b
}

#[test]
fn b_sequence_matches_peeling_oracle() {
    for spec in families() {
        let cache = terms_up_to(&spec, 200).unwrap();
        let b = build_bsequence(&cache, 200).unwrap();
        let mut a = vec![Nat::zero()];
        a.extend(cache.terms().iter().cloned());
        let oracle = peeled_b(&a);
        for n in 1..=200 {
            assert_eq!(b.b(n), &oracle[n as usize], "{spec} n={n}");
        }
    }
}

#[test]
fn b_sequence_checks_pass_across_families() {
    for spec in families() {
        let cache = terms_up_to(&spec, 200).unwrap();
        let b = build_bsequence(&cache, 200).unwrap();
        for check in verify_structure(&cache, &b, 200, &Sequential)
            .unwrap()
            .into_checks()
        {
            assert!(check.passed(), "{spec}: {check:?}");
        }
        let rec = check_recursion_identities(&cache, &b, 200, &Sequential).unwrap();
        assert!(rec.passed(), "{spec}: {rec:?}");
    }
}

#[test]
fn b_valuations_follow_rank_pattern() {
    // For an odd prime p with rank rho not divisible by p, p divides b_n only
    // at n = rho p^j, with valuation v_p(a_rho) at j = 0 and 1 afterwards.
    for spec in families() {
        let n = 200;
        let cache = terms_up_to(&spec, n).unwrap();
        let b = build_bsequence(&cache, n).unwrap();
        for p in odd_primes_up_to(60) {
            let pn = nat(p);
            let Some(rho) = (1..=n).find(|&k| (cache.a(k) % &pn).is_zero()) else {
                continue;
            };
            if rho % p == 0 {
                continue;
            }
            let base = lseq_core::arith::nu(cache.a(rho), &pn);
            for m in 1..=n {
                let v = lseq_core::arith::nu(b.b(m), &pn);
                let mut q = m;
                let expected = if m % rho != 0 {
                    0
                } else {
                    q /= rho;
                    let mut j = 0;
                    while q % p == 0 {
                        q /= p;
                        j += 1;
                    }
                    match (q, j) {
                        (1, 0) => base,
                        (1, _) => 1,
                        _ => 0,
                    }
                };
                assert_eq!(v, expected, "{spec} p={p} m={m}");
            }
        }
    }
}

#[test]
fn classical_lte_exhaustive() {
    let mut pairs = 0;
    for x in 2u64..=12 {
        for y in 1..x {
            if x.gcd(&y) != 1 {
                continue;
            }
            pairs += 1;
            let spec = SequenceSpec::power_diff(nat(x), nat(y)).unwrap();
            let cache = terms_up_to(&spec, 200).unwrap();
            for p in odd_primes_up_to(100)
                .into_iter()
                .filter(|p| (x - y) % p == 0)
            {
                let pn = nat(p);
                let base = lseq_core::arith::nu(&nat(x - y), &pn);
                for n in 1..=200u64 {
                    let mut m = n;
                    let mut vn = 0;
                    while m % p == 0 {
                        m /= p;
                        vn += 1;
                    }
                    assert_eq!(
                        lseq_core::arith::nu(cache.a(n), &pn),
                        base + vn,
                        "x={x} y={y} p={p} n={n}"
                    );
                }
            }
        }
    }
    assert!(pairs >= 20);
}

#[test]
fn theorem_checks_pass_across_families() {
    for spec in families() {
        let n = 150;
        let cache = terms_up_to(&spec, n).unwrap();
        let b = build_bsequence(&cache, n).unwrap();
        let primes: Vec<Nat> = primes_up_to(200).into_iter().map(Nat::from).collect();
        let ranks = RankTable::compute(&cache, &primes, n, &Sequential).unwrap();
        let reports = [
            check_divisibility(&cache, n, &Sequential).unwrap(),
            check_gcd_identity(&cache, n, &Sequential).unwrap(),
            check_l_property(&cache, n, &primes, true, &Sequential).unwrap(),
            check_rank_divisibility(&cache, &ranks, n, &Sequential).unwrap(),
            check_valuation_structure(&cache, &ranks, n, &primes, true, &Sequential).unwrap(),
            check_rank_lte(&cache, &ranks, n, &primes, true, &Sequential).unwrap(),
            check_delta(&cache, &b, &ranks, &primes, &Sequential).0,
            check_coprime_block(&cache, &b, &ranks, n, &primes, true, &Sequential).unwrap(),
            check_rank_agreement(&cache, &b, &ranks, n, &primes, &Sequential).unwrap(),
        ];
        for r in reports {
            assert_eq!(r.status, Status::Pass, "{spec}: {r:?}");
            assert!(r.tested_count > 0, "{spec}: {}", r.name);
        }
    }
}

#[test]
fn rank_implications_by_brute_force() {
    for spec in families() {
        let n = 120;
        let cache = terms_up_to(&spec, n).unwrap();
        for p in primes_up_to(80) {
            let pn = nat(p);
            let hits: Vec<u64> = (1..=n).filter(|&k| (cache.a(k) % &pn).is_zero()).collect();
            let Some(&rho) = hits.first() else { continue };
            // Every hit is a multiple of the rank, and every multiple is a hit.
            assert!(hits.iter().all(|k| k % rho == 0), "{spec} p={p}");
            assert_eq!(hits.len() as u64, n / rho, "{spec} p={p}");
        }
    }
}

fn snapshot<E: Executor>(spec: &SequenceSpec, exec: &E) -> Vec<String> {
    let n = 120;
    let cache = terms_up_to(spec, n).unwrap();
    let b = build_bsequence(&cache, n).unwrap();
    let primes: Vec<Nat> = primes_up_to(150).into_iter().map(Nat::from).collect();
    let ranks = RankTable::compute(&cache, &primes, n, exec).unwrap();
    vec![
        format!(
            "{:?}",
            check_l_property(&cache, n, &primes, false, exec).unwrap()
        ),
        format!(
            "{:?}",
            check_coprime_block(&cache, &b, &ranks, n, &primes, false, exec).unwrap()
        ),
        format!("{:?}", check_delta(&cache, &b, &ranks, &primes, exec)),
        format!("{:?}", verify_structure(&cache, &b, n, exec).unwrap()),
        format!("{:?}", ranks),
    ]
}

#[test]
fn reports_do_not_depend_on_the_executor() {
    assert_eq!(
        Striped(4).map((0..100).collect(), |x: u32| x * 2),
        (0..100).map(|x| x * 2).collect::<Vec<_>>()
    );
    for spec in [
        SequenceSpec::lucas_u(1, -1),
        SequenceSpec::power_diff(nat(3), nat(2)).unwrap(),
    ] {
        let expected = snapshot(&spec, &Sequential);
        for workers in [1, 3, 8] {
            assert_eq!(
                snapshot(&spec, &Striped(workers)),
                expected,
                "{spec} workers={workers}"
            );
        }
    }
}
