//! Sequence families and term generation.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Nat, Result};

/// Default cap on the decimal length of any generated term.
pub const DEFAULT_MAX_DIGITS: u64 = 50_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SequenceSpec {
    /// `a_n = x^n - y^n` with `x > y >= 1`, `gcd(x, y) = 1`.
    PowerDiff { x: Nat, y: Nat },
    /// Lucas sequence of the first kind: `U_1 = 1`, `U_2 = P`,
    /// `U_n = P U_{n-1} - Q U_{n-2}`.
    LucasU { p: i64, q: i64 },
    /// Terms supplied by the caller; `source` is a label for reports.
    Explicit { source: String, terms: Vec<Nat> },
}

impl SequenceSpec {
    pub fn power_diff(x: Nat, y: Nat) -> Result<Self> {
        if y.is_zero() || x <= y {
            return Err(Error::Domain(format!(
                "power-diff needs x > y >= 1, got x={x}, y={y}"
            )));
        }
        let g = x.gcd(&y);
        if !g.is_one() {
            return Err(Error::Domain(format!(
                "power-diff needs coprime x and y, gcd({x},{y}) = {g}"
            )));
        }
        Ok(SequenceSpec::PowerDiff { x, y })
    }

    pub fn lucas_u(p: i64, q: i64) -> Self {
        SequenceSpec::LucasU { p, q }
    }

    pub fn fibonacci() -> Self {
        SequenceSpec::LucasU { p: 1, q: -1 }
    }

    pub fn explicit(source: impl Into<String>, terms: Vec<Nat>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidSequence {
                index: 1,
                reason: "explicit sequence has no terms".to_string(),
            });
        }
        if let Some(i) = terms.iter().position(Zero::is_zero) {
            return Err(Error::InvalidSequence {
                index: i as u64 + 1,
                reason: "explicit terms must be positive".to_string(),
            });
        }
        Ok(SequenceSpec::Explicit {
            source: source.into(),
            terms,
        })
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceSpec::PowerDiff { x, y } => write!(f, "power-diff:x={x},y={y}"),
            SequenceSpec::LucasU { p, q } => write!(f, "lucas-u:P={p},Q={q}"),
            SequenceSpec::Explicit { source, .. } => write!(f, "explicit:file={source}"),
        }
    }
}

/// Limits applied while generating terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermLimits {
    pub max_digits: u64,
}

impl Default for TermLimits {
    fn default() -> Self {
        TermLimits {
            max_digits: DEFAULT_MAX_DIGITS,
        }
    }
}

impl TermLimits {
    fn check_bits(&self, index: u64, bits: u64) -> Result<()> {
        // floor(bits * log10(2)) + 1, with log10(2) ~ 0.30103
        let digits = bits.saturating_mul(30_103) / 100_000 + 1;
        if digits > self.max_digits {
            return Err(Error::TermTooLarge {
                index,
                max_digits: self.max_digits,
            });
        }
        Ok(())
    }
}

/// `a_n` of `spec`.
pub fn term(spec: &SequenceSpec, n: u64) -> Result<Nat> {
    if n == 0 {
        return Err(Error::IndexOutOfRange {
            index: 0,
            available: available(spec),
        });
    }
    let limits = TermLimits::default();
    match spec {
        SequenceSpec::PowerDiff { x, y } => power_diff_term(x, y, n, &limits),
        SequenceSpec::LucasU { .. } => {
            let cache = terms_up_to_with(spec, n, &limits)?;
            Ok(cache.terms.into_iter().next_back().unwrap())
        }
        SequenceSpec::Explicit { terms, .. } => {
            terms
                .get(n as usize - 1)
                .cloned()
                .ok_or(Error::IndexOutOfRange {
                    index: n,
                    available: terms.len() as u64,
                })
        }
    }
}

fn available(spec: &SequenceSpec) -> u64 {
    match spec {
        SequenceSpec::Explicit { terms, .. } => terms.len() as u64,
        _ => u64::MAX,
    }
}

fn power_diff_term(x: &Nat, y: &Nat, n: u64, limits: &TermLimits) -> Result<Nat> {
    // x^n has at most n * bits(x) bits; reject hopeless sizes before computing.
    limits.check_bits(n, x.bits().saturating_mul(n) / 2)?;
    let e = n.to_u32().ok_or(Error::TermTooLarge {
        index: n,
        max_digits: limits.max_digits,
    })?;
    let value = x.pow(e) - y.pow(e);
    limits.check_bits(n, value.bits())?;
    Ok(value)
}

/// Terms `a_1..a_N`, validated positive. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceCache {
    spec: SequenceSpec,
    terms: Vec<Nat>,
}

impl SequenceCache {
    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    pub fn len(&self) -> u64 {
        self.terms.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `a_n`, 1-based. Panics outside `1..=len`; use [`SequenceCache::get`]
    /// for a checked lookup.
    pub fn a(&self, n: u64) -> &Nat {
        &self.terms[n as usize - 1]
    }

    pub fn get(&self, n: u64) -> Result<&Nat> {
        if n == 0 || n > self.len() {
            return Err(Error::IndexOutOfRange {
                index: n,
                available: self.len(),
            });
        }
        Ok(self.a(n))
    }

    pub fn terms(&self) -> &[Nat] {
        &self.terms
    }

    /// Errors with `IndexOutOfRange` unless `1..=n` is covered.
    pub fn require(&self, n: u64) -> Result<()> {
        if n > self.len() {
            return Err(Error::IndexOutOfRange {
                index: n,
                available: self.len(),
            });
        }
        Ok(())
    }
}

pub fn terms_up_to(spec: &SequenceSpec, n: u64) -> Result<SequenceCache> {
    terms_up_to_with(spec, n, &TermLimits::default())
}

pub fn terms_up_to_with(spec: &SequenceSpec, n: u64, limits: &TermLimits) -> Result<SequenceCache> {
    if n == 0 {
        return Err(Error::IndexOutOfRange {
            index: 0,
            available: available(spec),
        });
    }
    let terms = match spec {
        SequenceSpec::PowerDiff { x, y } => (1..=n)
            .map(|i| power_diff_term(x, y, i, limits))
            .collect::<Result<Vec<_>>>()?,
        SequenceSpec::LucasU { p, q } => lucas_terms(*p, *q, n, limits)?,
        SequenceSpec::Explicit { terms, .. } => {
            if n > terms.len() as u64 {
                return Err(Error::IndexOutOfRange {
                    index: n,
                    available: terms.len() as u64,
                });
            }
            for (i, t) in terms.iter().take(n as usize).enumerate() {
                if t.is_zero() {
                    return Err(Error::InvalidSequence {
                        index: i as u64 + 1,
                        reason: "term is not positive".to_string(),
                    });
                }
                limits.check_bits(i as u64 + 1, t.bits())?;
            }
            terms[..n as usize].to_vec()
        }
    };
    Ok(SequenceCache {
        spec: spec.clone(),
        terms,
    })
}

fn lucas_terms(p: i64, q: i64, n: u64, limits: &TermLimits) -> Result<Vec<Nat>> {
    let big_p = BigInt::from(p);
    let big_q = BigInt::from(q);
    let mut prev = BigInt::zero();
    let mut cur = BigInt::one();
    let mut out = Vec::with_capacity(n as usize);
    for i in 1..=n {
        if !cur.is_positive() {
            return Err(Error::InvalidSequence {
                index: i,
                reason: format!("U_{i} = {cur} is not positive"),
            });
        }
        limits.check_bits(i, cur.bits())?;
        out.push(cur.to_biguint().unwrap());
        let next = &big_p * &cur - &big_q * &prev;
        prev = cur;
        cur = next;
    }
    Ok(out)
}
