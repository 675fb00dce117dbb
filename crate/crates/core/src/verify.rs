//! Standalone re-verification of a single witness: regenerate the sequence,
//! recompute every recorded value from the witness's indices and primes, and
//! confirm both that the values match and that they violate the claim.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{
    divides, index_divisors, index_valuation, is_prime_u64, nu, primality, prime_power_base,
};
use crate::bseq::{build_bsequence, BSequence};
use crate::report::{RecursionKind, Witness};
use crate::seq::{terms_up_to_with, SequenceCache, SequenceSpec, TermLimits};
use crate::{Error, Nat, Result};

/// Witnesses referring to larger indices are rejected outright.
pub const MAX_VERIFY_INDEX: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reproduction {
    Reproduced,
    Mismatch(String),
}

impl Reproduction {
    pub fn is_reproduced(&self) -> bool {
        matches!(self, Reproduction::Reproduced)
    }
}

struct Ctx {
    cache: SequenceCache,
    b: BSequence,
}

impl Ctx {
    fn a(&self, n: u64) -> &Nat {
        self.cache.a(n)
    }
    fn b(&self, n: u64) -> &Nat {
        self.b.b(n)
    }
    fn is_rank(&self, p: &Nat, rho: u64) -> bool {
        rho >= 1 && divides(p, self.a(rho)) && (1..rho).all(|j| !divides(p, self.a(j)))
    }
    fn first_div_a(&self, p: &Nat, bound: u64) -> Option<u64> {
        (1..=bound).find(|&k| divides(p, self.a(k)))
    }
    fn first_div_b(&self, p: &Nat, bound: u64) -> Option<u64> {
        (1..=bound).find(|&k| divides(p, self.b(k)))
    }
}

fn index_nu(n: u64, p: &Nat) -> u64 {
    p.to_u64().map_or(0, |small| index_valuation(n, small))
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> core::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn verify_witness(spec: &SequenceSpec, witness: &Witness) -> Result<Reproduction> {
    verify_witness_with(spec, witness, &TermLimits::default())
}

pub fn verify_witness_with(
    spec: &SequenceSpec,
    witness: &Witness,
    limits: &TermLimits,
) -> Result<Reproduction> {
    let top = witness.max_index();
    if top == 0 {
        return Ok(Reproduction::Mismatch("witness refers to index 0".into()));
    }
    if top > MAX_VERIFY_INDEX {
        return Err(Error::IndexOutOfRange {
            index: top,
            available: MAX_VERIFY_INDEX,
        });
    }
    let cache = match terms_up_to_with(spec, top, limits) {
        Ok(c) => c,
        Err(Error::IndexOutOfRange { index, available }) => {
            return Ok(Reproduction::Mismatch(format!(
                "index {index} beyond the sequence ({available} terms)"
            )))
        }
        Err(e) => return Err(e),
    };
    let b = build_bsequence(&cache, top)?;
    let ctx = Ctx { cache, b };
    Ok(match reproduce(&ctx, witness) {
        Ok(()) => Reproduction::Reproduced,
        Err(msg) => Reproduction::Mismatch(msg),
    })
}

fn prime(p: &Nat) -> core::result::Result<(), String> {
    check(primality(p, 20).is_prime_like(), || {
        format!("{p} is not prime")
    })
}

fn positive(values: &[u64]) -> core::result::Result<(), String> {
    check(values.iter().all(|&v| v >= 1), || {
        "indices must be positive".into()
    })
}

fn same<T: PartialEq + core::fmt::Debug>(
    what: &str,
    recorded: &T,
    actual: &T,
) -> core::result::Result<(), String> {
    check(recorded == actual, || {
        format!("{what}: recorded {recorded:?}, recomputed {actual:?}")
    })
}

fn reproduce(ctx: &Ctx, w: &Witness) -> core::result::Result<(), String> {
    match w {
        Witness::LProperty {
            p,
            k,
            n,
            expected,
            actual,
        } => {
            positive(&[*k])?;
            prime(p)?;
            check(*n >= 2, || "multiplier must be at least 2".into())?;
            let vk = nu(ctx.a(*k), p);
            check(vk >= 1, || format!("{p} does not divide a_{k}"))?;
            same("expected valuation", expected, &(vk + index_nu(*n, p)))?;
            same("actual valuation", actual, &nu(ctx.a(k * n), p))?;
            check(expected != actual, || {
                "valuations agree; no violation".into()
            })
        }
        Witness::Divisibility { k, n, remainder } => {
            positive(&[*k])?;
            check(*n >= 2, || "multiplier must be at least 2".into())?;
            same("remainder", remainder, &(ctx.a(k * n) % ctx.a(*k)))?;
            check(!remainder.is_zero(), || {
                "a_k divides a_nk; no violation".into()
            })
        }
        Witness::GcdIdentity {
            m,
            n,
            gcd,
            expected,
        } => {
            positive(&[*m])?;
            check(m <= n, || "indices must satisfy m <= n".into())?;
            same("gcd", gcd, &ctx.a(*m).gcd(ctx.a(*n)))?;
            same("expected", expected, ctx.a(m.gcd(n)))?;
            check(gcd != expected, || {
                "gcd identity holds; no violation".into()
            })
        }
        Witness::ProductFormula { n, a_n, product } => {
            same("a_n", a_n, ctx.a(*n))?;
            let prod = index_divisors(*n)
                .into_iter()
                .fold(Nat::one(), |acc, d| acc * ctx.b(d));
            same("product", product, &prod)?;
            check(a_n != product, || {
                "product formula holds; no violation".into()
            })
        }
        Witness::PairwiseCoprime { m, n, gcd } => {
            positive(&[*m])?;
            check(m < n && n % m != 0, || {
                "indices must be non-nested with m < n".into()
            })?;
            same("gcd", gcd, &ctx.b(*m).gcd(ctx.b(*n)))?;
            check(!gcd.is_one(), || "coprime; no violation".into())
        }
        Witness::BDividesA { n, remainder } => {
            same("remainder", remainder, &(ctx.a(*n) % ctx.b(*n)))?;
            check(!remainder.is_zero(), || {
                "b_n divides a_n; no violation".into()
            })
        }
        Witness::RecursionIdentity {
            identity,
            target,
            b_value,
            numerator,
            denominator,
        } => {
            let t = *target;
            let (num, den) = match identity {
                RecursionKind::Prime => {
                    check(is_prime_u64(t), || format!("{t} is not prime"))?;
                    (ctx.a(t).clone(), ctx.a(1).clone())
                }
                RecursionKind::PrimePower => {
                    let p =
                        prime_power_base(t).ok_or_else(|| format!("{t} is not a prime power"))?;
                    check(t != p, || format!("{t} is a prime, not a higher power"))?;
                    (ctx.a(t).clone(), ctx.a(t / p).clone())
                }
                RecursionKind::PrimePair => {
                    let p = index_divisors(t)
                        .into_iter()
                        .find(|&d| d > 1)
                        .ok_or_else(|| format!("{t} has no prime factor"))?;
                    let q = t / p;
                    check(is_prime_u64(q) && q != p, || {
                        format!("{t} is not a product of two distinct primes")
                    })?;
                    (ctx.a(t).clone(), ctx.a(p).lcm(ctx.a(q)))
                }
            };
            same("b value", b_value, ctx.b(t))?;
            same("numerator", numerator, &num)?;
            same("denominator", denominator, &den)?;
            let (q, r) = num.div_rem(&den);
            check(!(r.is_zero() && &q == b_value), || {
                "identity holds; no violation".into()
            })
        }
        Witness::RankDivisibility {
            p,
            rho,
            k,
            p_divides,
            rho_divides,
        } => {
            positive(&[*k])?;
            prime(p)?;
            check(ctx.is_rank(p, *rho), || {
                format!("{rho} is not the rank of {p}")
            })?;
            same("p divides a_k", p_divides, &divides(p, ctx.a(*k)))?;
            same("rank divides k", rho_divides, &(k % rho == 0))?;
            check(p_divides != rho_divides, || {
                "both sides agree; no violation".into()
            })
        }
        Witness::ValuationStructure { p, rho, k, r, s } => {
            positive(&[*k])?;
            prime(p)?;
            check(ctx.is_rank(p, *rho), || {
                format!("{rho} is not the rank of {p}")
            })?;
            same("r", r, &nu(ctx.a(*rho), p))?;
            same("s", s, &nu(ctx.a(*k), p))?;
            check(*s >= 1, || "p does not divide a_k".into())?;
            let holds = s >= r && k % rho == 0 && index_nu(k / rho, p) == s - r;
            check(!holds, || "k has the predicted shape; no violation".into())
        }
        Witness::RankLte {
            p,
            rho,
            s,
            expected,
            actual,
        } => {
            positive(&[*s])?;
            prime(p)?;
            check(ctx.is_rank(p, *rho), || {
                format!("{rho} is not the rank of {p}")
            })?;
            same(
                "expected",
                expected,
                &(nu(ctx.a(*rho), p) + index_nu(*s, p)),
            )?;
            same("actual", actual, &nu(ctx.a(rho * s), p))?;
            check(expected != actual, || {
                "valuations agree; no violation".into()
            })
        }
        Witness::Delta { p, rho, valuations } => {
            prime(p)?;
            check(ctx.is_rank(p, *rho), || {
                format!("{rho} is not the rank of {p}")
            })?;
            check(index_nu(*rho, p) == 0, || "p divides its rank".into())?;
            let small = p.to_u64().ok_or("prime too large for an index")?;
            let recomputed: Vec<(u64, u64)> = index_divisors(*rho)
                .into_iter()
                .map(|d| (d, nu(ctx.b(small * d), p)))
                .collect();
            same("valuations", valuations, &recomputed)?;
            let ones = valuations.iter().filter(|(_, v)| *v == 1).count();
            let zeros = valuations.iter().filter(|(_, v)| *v == 0).count();
            check(!(ones == 1 && zeros + 1 == valuations.len()), || {
                "unique exact divisor; no violation".into()
            })
        }
        Witness::CoprimeBlock {
            p,
            rho,
            k,
            d,
            e,
            valuation,
        } => {
            positive(&[*k, *d])?;
            prime(p)?;
            check(ctx.is_rank(p, *rho), || {
                format!("{rho} is not the rank of {p}")
            })?;
            check(index_nu(*k, p) == 0 && k.gcd(rho) == 1, || {
                "gcd(p rho, k) != 1".into()
            })?;
            check(rho % d == 0 && k % e == 0 && *e > 1, || {
                "need d | rho, e | k, e > 1".into()
            })?;
            same("valuation", valuation, &nu(ctx.b(d * e), p))?;
            check(*valuation > 0, || {
                "p does not divide b_de; no violation".into()
            })
        }
        Witness::RankAgreement {
            p,
            bound,
            rank_a,
            rank_b,
        } => {
            prime(p)?;
            same("rank in a", rank_a, &ctx.first_div_a(p, *bound))?;
            same("rank in b", rank_b, &ctx.first_div_b(p, *bound))?;
            check(rank_a != rank_b, || "ranks agree; no violation".into())
        }
        Witness::RankNotCoprime { p, rho } => {
            prime(p)?;
            check(ctx.is_rank(p, *rho), || {
                format!("{rho} is not the rank of {p}")
            })?;
            let r = Nat::from(*rho);
            check(!p.gcd(&r).is_one() && *p != r, || {
                "claim holds for this prime".into()
            })
        }
        Witness::SharedFactor { m, n, gcd } => {
            positive(&[*n])?;
            check(m > n, || "need m > n".into())?;
            same("gcd", gcd, &ctx.b(*m).gcd(ctx.b(*n)))?;
            check(!gcd.is_one(), || "coprime pair; vacuous".into())?;
            let strong_ok = (m % n == 0)
                .then(|| prime_power_base(m / n))
                .flatten()
                .is_some_and(|q| (gcd % q).is_zero());
            check(!strong_ok, || {
                "ratio is a prime power dividing the gcd; no violation".into()
            })
        }
        Witness::NonSquarefreeB { n, b_n, prime: q } => {
            check(
                index_divisors(*n).iter().skip(1).all(|&d| n % (d * d) != 0),
                || format!("{n} is not squarefree"),
            )?;
            prime(q)?;
            same("b_n", b_n, ctx.b(*n))?;
            check((b_n % (q * q)).is_zero(), || {
                format!("{q}^2 does not divide b_n")
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn nat(v: u64) -> Nat {
        Nat::from(v)
    }

    #[test]
    fn fibonacci_b6_witness() {
        let w = Witness::NonSquarefreeB {
            n: 6,
            b_n: nat(4),
            prime: nat(2),
        };
        assert!(verify_witness(&SequenceSpec::fibonacci(), &w)
            .unwrap()
            .is_reproduced());
        let bad = Witness::NonSquarefreeB {
            n: 6,
            b_n: nat(5),
            prime: nat(2),
        };
        assert!(!verify_witness(&SequenceSpec::fibonacci(), &bad)
            .unwrap()
            .is_reproduced());
        let bad = Witness::NonSquarefreeB {
            n: 7,
            b_n: nat(4),
            prime: nat(2),
        };
        assert!(!verify_witness(&SequenceSpec::fibonacci(), &bad)
            .unwrap()
            .is_reproduced());
    }

    #[test]
    fn l_property_for_two_on_fibonacci() {
        let w = Witness::LProperty {
            p: nat(2),
            k: 3,
            n: 2,
            expected: 2,
            actual: 3,
        };
        assert!(verify_witness(&SequenceSpec::fibonacci(), &w)
            .unwrap()
            .is_reproduced());
        // Same data against 2^n - 1 cannot reproduce: 2 divides no term.
        let m = SequenceSpec::power_diff(nat(2), nat(1)).unwrap();
        assert!(!verify_witness(&m, &w).unwrap().is_reproduced());
    }

    #[test]
    fn holding_claims_are_not_violations() {
        let m = SequenceSpec::power_diff(nat(2), nat(1)).unwrap();
        let w = Witness::Divisibility {
            k: 3,
            n: 2,
            remainder: nat(0),
        };
        assert!(!verify_witness(&m, &w).unwrap().is_reproduced());
        let w = Witness::GcdIdentity {
            m: 4,
            n: 6,
            gcd: nat(3),
            expected: nat(3),
        };
        assert!(!verify_witness(&m, &w).unwrap().is_reproduced());
    }

    #[test]
    fn explicit_index_beyond_terms() {
        let e = SequenceSpec::explicit("e", vec![nat(1), nat(2)]).unwrap();
        let w = Witness::BDividesA {
            n: 5,
            remainder: nat(1),
        };
        assert!(!verify_witness(&e, &w).unwrap().is_reproduced());
    }
}
