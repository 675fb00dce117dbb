//! Integer primitives: p-adic valuations, gcd/lcm, primality, and a bounded
//! factorizer that reports what it could not finish instead of guessing.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{serde_dec, Error, Nat, Result};

/// Miller-Rabin with the first 13 prime bases is exact below this value.
const MR_DETERMINISTIC_BOUND: &[u8] = b"3317044064679887385961981";

const SMALL_PRIMES: [u32; 64] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307,
    311,
];

/// `p^exponent` exactly divides some value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Valuation {
    #[serde(with = "serde_dec")]
    pub prime: Nat,
    pub exponent: u64,
}

/// Outcome of a primality test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primality {
    Composite,
    Prime,
    /// Passed every configured Miller-Rabin base above the deterministic range.
    ProbablePrime,
}

impl Primality {
    pub fn is_prime_like(self) -> bool {
        !matches!(self, Primality::Composite)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualStatus {
    Unit,
    Prime,
    CompositeUnfactored,
    ProbablePrime,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PrimePower {
    #[serde(with = "serde_dec")]
    pub prime: Nat,
    pub exponent: u32,
}

/// Prime-power decomposition with an explicit unfactored remainder.
///
/// `product(factors) * residual` is always the factored value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factorization {
    pub factors: Vec<PrimePower>,
    #[serde(with = "serde_dec")]
    pub residual: Nat,
    pub residual_status: ResidualStatus,
    /// Some listed prime (or the residual) is only a probable prime.
    pub probabilistic: bool,
}

impl Factorization {
    pub fn unit() -> Self {
        Factorization {
            factors: Vec::new(),
            residual: Nat::one(),
            residual_status: ResidualStatus::Unit,
            probabilistic: false,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.residual_status == ResidualStatus::Unit
    }

    pub fn primes(&self) -> impl Iterator<Item = &Nat> {
        self.factors.iter().map(|f| &f.prime)
    }

    pub fn product(&self) -> Nat {
        self.factors.iter().fold(self.residual.clone(), |acc, f| {
            acc * f.prime.pow(f.exponent)
        })
    }

    /// Checks every structural invariant against `value`. Used before
    /// trusting factorizations that come from outside this process.
    pub fn validate(&self, value: &Nat, mr_rounds: u32) -> core::result::Result<(), String> {
        if self.product() != *value {
            return Err("product of factors and residual differs from the value".to_string());
        }
        if self.factors.windows(2).any(|w| w[0].prime >= w[1].prime) {
            return Err("factors are not strictly ascending".to_string());
        }
        if self.factors.iter().any(|f| f.exponent == 0) {
            return Err("zero exponent".to_string());
        }
        let mut probable = false;
        for f in &self.factors {
            match primality(&f.prime, mr_rounds) {
                Primality::Composite => {
                    return Err(alloc::format!("listed factor {} is not prime", f.prime))
                }
                Primality::ProbablePrime => probable = true,
                Primality::Prime => {}
            }
        }
        if self.residual.is_one() != (self.residual_status == ResidualStatus::Unit) {
            return Err("residual and residual status disagree".to_string());
        }
        match self.residual_status {
            ResidualStatus::Prime if primality(&self.residual, mr_rounds) != Primality::Prime => {
                return Err("residual marked prime is not a proven prime".to_string())
            }
            ResidualStatus::ProbablePrime
                if primality(&self.residual, mr_rounds) == Primality::Composite =>
            {
                return Err("residual marked probable prime is composite".to_string())
            }
            ResidualStatus::ProbablePrime => probable = true,
            _ => {}
        }
        if probable != self.probabilistic {
            return Err("probabilistic flag does not match the listed primes".to_string());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SquarefreeVerdict {
    Squarefree,
    NotSquarefree {
        #[serde(with = "serde_dec")]
        witness: Nat,
    },
    Inconclusive {
        reason: String,
    },
}

/// Work limits for [`factorize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EffortBudget {
    /// Trial division by every prime up to this bound.
    pub trial_bound: u32,
    /// Pollard rho iterations allowed per composite cofactor.
    pub rho_iterations: u64,
    /// Miller-Rabin bases used above the deterministic range.
    pub mr_rounds: u32,
    /// First rho polynomial constant; later attempts use `seed + 1`, `seed + 2`, ...
    pub seed: u64,
}

impl Default for EffortBudget {
    fn default() -> Self {
        EffortBudget {
            trial_bound: 100_000,
            rho_iterations: 10_000_000,
            mr_rounds: 20,
            seed: 1,
        }
    }
}

impl EffortBudget {
    pub fn quick() -> Self {
        EffortBudget {
            trial_bound: 10_000,
            rho_iterations: 200_000,
            ..Self::default()
        }
    }

    pub fn thorough() -> Self {
        EffortBudget {
            trial_bound: 1_000_000,
            rho_iterations: 100_000_000,
            mr_rounds: 32,
            ..Self::default()
        }
    }
}

impl fmt::Display for EffortBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "trial={},rho={},rounds={},seed={}",
            self.trial_bound, self.rho_iterations, self.mr_rounds, self.seed
        )
    }
}

/// Memoization hook for factorizations. Implementations must be safe to
/// read concurrently; inserts may be serialized internally.
pub trait FactorCache: Sync {
    fn lookup(&self, value: &Nat) -> Option<Factorization>;
    fn store(&self, value: &Nat, factorization: &Factorization);
}

/// A cache that remembers nothing.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoCache;

impl FactorCache for NoCache {
    fn lookup(&self, _: &Nat) -> Option<Factorization> {
        None
    }
    fn store(&self, _: &Nat, _: &Factorization) {}
}

pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

pub fn odd_primes_up_to(bound: u64) -> Vec<u64> {
    primes_up_to(bound)
        .into_iter()
        .filter(|&p| p != 2)
        .collect()
}

/// Divisors of a machine-sized index, ascending.
pub fn index_divisors(n: u64) -> Vec<u64> {
    let mut low = Vec::new();
    let mut high = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            low.push(d);
            if d != n / d {
                high.push(n / d);
            }
        }
        d += 1;
    }
    low.extend(high.into_iter().rev());
    low
}

pub fn is_prime_u64(n: u64) -> bool {
    primality_u64(n)
}

/// `v_p(n)` for machine-sized `n >= 1`.
pub fn index_valuation(mut n: u64, p: u64) -> u64 {
    debug_assert!(n >= 1 && p >= 2);
    let mut e = 0;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    e
}

/// `n = p^a` with `a >= 1` for a single prime `p`: returns `p`.
pub fn prime_power_base(n: u64) -> Option<u64> {
    if n < 2 {
        return None;
    }
    let p = (2..)
        .find(|d| n.is_multiple_of(*d) || d * d > n)
        .filter(|d| n.is_multiple_of(*d))
        .unwrap_or(n);
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
    }
    (m == 1).then_some(p)
}

/// Largest `e` with `p^e | a`. The caller guarantees `a >= 1` and `p >= 2`.
pub fn nu(a: &Nat, p: &Nat) -> u64 {
    debug_assert!(!a.is_zero());
    if !divides(p, a) {
        return 0;
    }
    let mut e = 0;
    let mut rest = a.clone();
    loop {
        let (q, r) = rest.div_rem(p);
        if !r.is_zero() {
            return e;
        }
        rest = q;
        e += 1;
    }
}

/// `p | a` without computing the full valuation.
pub fn divides(p: &Nat, a: &Nat) -> bool {
    if let Some(small) = p.to_u32() {
        return (a % small).is_zero();
    }
    (a % p).is_zero()
}

pub fn padic_valuation(a: &Nat, p: &Nat) -> Result<Valuation> {
    if a.is_zero() {
        return Err(Error::Domain("valuation of 0 is undefined".to_string()));
    }
    if !primality(p, EffortBudget::default().mr_rounds).is_prime_like() {
        return Err(Error::Domain(alloc::format!("{p} is not prime")));
    }
    Ok(Valuation {
        prime: p.clone(),
        exponent: nu(a, p),
    })
}

pub fn gcd(a: &Nat, b: &Nat) -> Nat {
    a.gcd(b)
}

pub fn lcm(a: &Nat, b: &Nat) -> Result<Nat> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::Domain("lcm needs positive arguments".to_string()));
    }
    Ok(a.lcm(b))
}

pub fn primality(n: &Nat, mr_rounds: u32) -> Primality {
    if let Some(small) = n.to_u64() {
        return if primality_u64(small) {
            Primality::Prime
        } else {
            Primality::Composite
        };
    }
    for &p in SMALL_PRIMES.iter() {
        if (n % p).is_zero() {
            return Primality::Composite;
        }
    }
    let deterministic = *n < Nat::parse_bytes(MR_DETERMINISTIC_BOUND, 10).unwrap();
    let rounds = if deterministic {
        13
    } else {
        (mr_rounds as usize).clamp(13, SMALL_PRIMES.len())
    };
    let one = Nat::one();
    let n_minus_one = n - &one;
    let s = n_minus_one.trailing_zeros().unwrap_or(0);
    let d = &n_minus_one >> s;
    'bases: for &base in &SMALL_PRIMES[..rounds] {
        let mut x = Nat::from(base).modpow(&d, n);
        if x == one || x == n_minus_one {
            continue;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n_minus_one {
                continue 'bases;
            }
        }
        return Primality::Composite;
    }
    if deterministic {
        Primality::Prime
    } else {
        Primality::ProbablePrime
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn primality_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES[..12] {
        let p = p as u64;
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    // The first 12 prime bases are exact for all 64-bit inputs.
    'bases: for &base in &SMALL_PRIMES[..12] {
        let mut x = pow_mod(base as u64, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Reusable factorizer holding the trial-division prime table.
#[derive(Debug, Clone)]
pub struct Factorizer {
    effort: EffortBudget,
    trial_primes: Vec<u32>,
}

impl Factorizer {
    pub fn new(effort: EffortBudget) -> Self {
        let trial_primes = primes_up_to(effort.trial_bound as u64)
            .into_iter()
            .map(|p| p as u32)
            .collect();
        Factorizer {
            effort,
            trial_primes,
        }
    }

    pub fn effort(&self) -> &EffortBudget {
        &self.effort
    }

    pub fn factorize_cached<C: FactorCache + ?Sized>(&self, n: &Nat, cache: &C) -> Factorization {
        if let Some(hit) = cache.lookup(n) {
            return hit;
        }
        let f = self.factorize(n);
        cache.store(n, &f);
        f
    }

    /// Factors `n >= 1`. Never wrong: anything not split within the budget is
    /// left in the residual as `composite_unfactored`.
    pub fn factorize(&self, n: &Nat) -> Factorization {
        assert!(!n.is_zero(), "factorize requires n >= 1");
        let mut found: Vec<PrimePower> = Vec::new();
        let mut probabilistic = false;
        let mut rest = n.clone();

        let mut exhausted = true;
        for &p in &self.trial_primes {
            let pn = Nat::from(p);
            if &pn * &pn > rest {
                exhausted = false;
                break;
            }
            let mut e = 0;
            loop {
                let (q, r) = rest.div_rem(&pn);
                if !r.is_zero() {
                    break;
                }
                rest = q;
                e += 1;
            }
            if e > 0 {
                found.push(PrimePower {
                    prime: pn,
                    exponent: e,
                });
            }
        }

        let mut residual = Nat::one();
        if !rest.is_one() {
            let bound = Nat::from(self.effort.trial_bound) + 1u32;
            if !exhausted || rest < &bound * &bound {
                add_prime(&mut found, rest, 1);
            } else {
                let mut pending = vec![rest];
                while let Some(mut c) = pending.pop() {
                    for f in found.iter_mut() {
                        while divides(&f.prime, &c) {
                            c /= &f.prime;
                            f.exponent += 1;
                        }
                    }
                    if c.is_one() {
                        continue;
                    }
                    match primality(&c, self.effort.mr_rounds) {
                        Primality::Prime => add_prime(&mut found, c, 1),
                        Primality::ProbablePrime => {
                            probabilistic = true;
                            add_prime(&mut found, c, 1);
                        }
                        Primality::Composite => {
                            if let Some((root, k)) = perfect_power(&c) {
                                for _ in 0..k {
                                    pending.push(root.clone());
                                }
                            } else if let Some(d) = rho_split(&c, &self.effort) {
                                let other = &c / &d;
                                pending.push(other);
                                pending.push(d);
                            } else {
                                residual *= c;
                            }
                        }
                    }
                }
                for f in found.iter_mut() {
                    while !residual.is_one() && divides(&f.prime, &residual) {
                        residual /= &f.prime;
                        f.exponent += 1;
                    }
                }
            }
        }
        found.sort();
        let residual_status = if residual.is_one() {
            ResidualStatus::Unit
        } else {
            ResidualStatus::CompositeUnfactored
        };
        Factorization {
            factors: found,
            residual,
            residual_status,
            probabilistic,
        }
    }
}

fn add_prime(found: &mut Vec<PrimePower>, p: Nat, e: u32) {
    match found.iter_mut().find(|f| f.prime == p) {
        Some(f) => f.exponent += e,
        None => found.push(PrimePower {
            prime: p,
            exponent: e,
        }),
    }
}

/// `n = root^k` with the largest such `k >= 2`.
fn perfect_power(n: &Nat) -> Option<(Nat, u32)> {
    let bits = n.bits() as u32;
    (2..=bits).rev().find_map(|k| {
        let r = n.nth_root(k);
        (r > Nat::one() && r.pow(k) == *n).then_some((r, k))
    })
}

pub fn factorize(n: &Nat, effort: &EffortBudget) -> Factorization {
    Factorizer::new(*effort).factorize(n)
}

pub fn divisors(n: &Nat, effort: &EffortBudget) -> Result<Vec<Nat>> {
    if n.is_zero() {
        return Err(Error::Domain("divisors of 0".to_string()));
    }
    let f = factorize(n, effort);
    if !f.is_complete() {
        return Err(Error::EffortExceeded(n.clone()));
    }
    let mut out = vec![Nat::one()];
    for pp in &f.factors {
        let mut next = Vec::with_capacity(out.len() * (pp.exponent as usize + 1));
        for d in &out {
            let mut power = Nat::one();
            for _ in 0..=pp.exponent {
                next.push(d * &power);
                power *= &pp.prime;
            }
        }
        out = next;
    }
    out.sort();
    Ok(out)
}

pub fn squarefree_verdict(f: &Factorization) -> SquarefreeVerdict {
    if let Some(pp) = f.factors.iter().find(|pp| pp.exponent >= 2) {
        return SquarefreeVerdict::NotSquarefree {
            witness: pp.prime.clone(),
        };
    }
    if f.residual.is_one() {
        return SquarefreeVerdict::Squarefree;
    }
    if let Some(p) = f.primes().find(|p| divides(p, &f.residual)) {
        return SquarefreeVerdict::NotSquarefree { witness: p.clone() };
    }
    if let Some((root, _)) = perfect_power(&f.residual) {
        if primality(&root, 32).is_prime_like() {
            return SquarefreeVerdict::NotSquarefree { witness: root };
        }
    }
    match f.residual_status {
        ResidualStatus::Unit | ResidualStatus::Prime => SquarefreeVerdict::Squarefree,
        ResidualStatus::ProbablePrime => SquarefreeVerdict::Inconclusive {
            reason: alloc::format!("residual {} is only a probable prime", f.residual),
        },
        ResidualStatus::CompositeUnfactored => SquarefreeVerdict::Inconclusive {
            reason: alloc::format!("unfactored composite residual {}", f.residual),
        },
    }
}

fn rho_split(n: &Nat, effort: &EffortBudget) -> Option<Nat> {
    if n.is_even() {
        return Some(Nat::from(2u32));
    }
    let mut budget = effort.rho_iterations;
    let mut c = effort.seed;
    while budget > 0 {
        let attempt = match n.to_u64() {
            Some(small) => brent_u64(small, c, &mut budget).map(Nat::from),
            None => brent_big(n, &Nat::from(c), &mut budget),
        };
        if attempt.is_some() {
            return attempt;
        }
        c += 1;
    }
    None
}

const BATCH: u64 = 128;

fn brent_u64(n: u64, c: u64, budget: &mut u64) -> Option<u64> {
    let c = c % n;
    let f = |x: u64| ((x as u128 * x as u128 + c as u128) % n as u128) as u64;
    let diff = |a: u64, b: u64| a.abs_diff(b);
    let mut y = 2 % n;
    let mut x = y;
    let mut ys = y;
    let mut q = 1u64;
    let mut g = 1u64;
    let mut r = 1u64;
    while g == 1 {
        if *budget == 0 {
            return None;
        }
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        *budget = budget.saturating_sub(r);
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let steps = BATCH.min(r - k);
            for _ in 0..steps {
                y = f(y);
                q = mul_mod(q, diff(x, y), n);
            }
            *budget = budget.saturating_sub(steps);
            g = gcd_u64(q, n);
            k += BATCH;
        }
        r *= 2;
    }
    if g == n {
        for _ in 0..=BATCH {
            ys = f(ys);
            g = gcd_u64(diff(x, ys), n);
            if g != 1 {
                break;
            }
        }
    }
    (g != 1 && g != n).then_some(g)
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn brent_big(n: &Nat, c: &Nat, budget: &mut u64) -> Option<Nat> {
    let f = |x: &Nat| (x * x + c) % n;
    let diff = |a: &Nat, b: &Nat| if a > b { a - b } else { b - a };
    let mut y = Nat::from(2u32);
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut q = Nat::one();
    let mut g = Nat::one();
    let mut r = 1u64;
    while g.is_one() {
        if *budget == 0 {
            return None;
        }
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        *budget = budget.saturating_sub(r);
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let steps = BATCH.min(r - k);
            for _ in 0..steps {
                y = f(&y);
                q = q * diff(&x, &y) % n;
            }
            *budget = budget.saturating_sub(steps);
            g = q.gcd(n);
            k += BATCH;
        }
        r *= 2;
    }
    if g == *n {
        for _ in 0..=BATCH {
            ys = f(&ys);
            g = diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (!g.is_one() && g != *n).then_some(g)
}
