//! Shared value types: primes, compositions, exact counts and count records.

use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::InputError;

/// A rational prime, checked on construction.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self, InputError> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(InputError::NotPrime(p))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }

    /// `p^k` as an exact big integer.
    pub fn pow_big(self, k: u32) -> BigUint {
        num_traits::pow(BigUint::from(self.0), k as usize)
    }

    /// `p^k` if it fits in an `i128`.
    pub fn checked_pow(self, k: u32) -> Option<i128> {
        (self.0 as i128).checked_pow(k)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Serialize for Prime {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(self.0)
    }
}

/// Trial-division primality; the engine only ever sees small primes.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// The first `k` primes in increasing order.
pub fn first_primes(k: usize) -> Vec<Prime> {
    (2u64..)
        .filter(|&n| is_prime(n))
        .take(k)
        .map(Prime)
        .collect()
}

/// All primes in `[lo, hi]`.
pub fn primes_between(lo: u64, hi: u64) -> Vec<Prime> {
    (lo..=hi).filter(|&n| is_prime(n)).map(Prime).collect()
}

/// Largest `k` with `p^k | x`. Zero has no finite valuation.
pub fn p_valuation(x: i128, p: Prime) -> Result<u32, InputError> {
    if x == 0 {
        return Err(InputError::ZeroValuation);
    }
    let p = p.get() as i128;
    let mut x = x;
    let mut k = 0;
    while x % p == 0 {
        x /= p;
        k += 1;
    }
    Ok(k)
}

/// Same as [`p_valuation`] for big unsigned integers.
pub fn p_valuation_big(x: &BigUint, p: Prime) -> Result<u32, InputError> {
    if x.is_zero() {
        return Err(InputError::ZeroValuation);
    }
    let p = BigUint::from(p.get());
    let mut x = x.clone();
    let mut k = 0;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&x, &p);
        if !r.is_zero() {
            return Ok(k);
        }
        x = q;
        k += 1;
    }
}

/// An ordered tuple of positive integers `(e_1, ..., e_{n-1})`, the
/// diagonal exponent vector of an irreducible subring matrix of size `n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Composition(Vec<u32>);

impl Composition {
    pub fn new(parts: Vec<u32>) -> Result<Self, InputError> {
        if parts.is_empty() {
            return Err(InputError::EmptyComposition);
        }
        if let Some(pos) = parts.iter().position(|&x| x == 0) {
            return Err(InputError::NonPositivePart { position: pos + 1 });
        }
        Ok(Composition(parts))
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// Matrix dimension `n = len + 1`.
    pub fn n(&self) -> usize {
        self.0.len() + 1
    }

    /// Total exponent `e = sum of parts`.
    pub fn e(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Drops leading parts equal to one. Returns `None` if every part is one.
    pub fn strip_leading_ones(&self) -> Option<Composition> {
        let first = self.0.iter().position(|&x| x != 1)?;
        Some(Composition(self.0[first..].to_vec()))
    }
}

impl TryFrom<Vec<u32>> for Composition {
    type Error = InputError;
    fn try_from(v: Vec<u32>) -> Result<Self, Self::Error> {
        Composition::new(v)
    }
}

impl From<Composition> for Vec<u32> {
    fn from(c: Composition) -> Self {
        c.0
    }
}

impl FromStr for Composition {
    type Err = InputError;

    /// Parses a comma-separated list such as `2,3,2,2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| InputError::Parse(format!("bad composition part {t:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Composition::new(parts)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// All compositions of `e` into `parts` positive parts, lexicographic.
pub fn compositions(e: u32, parts: usize) -> Vec<Composition> {
    let mut out = Vec::new();
    if parts == 0 || (e as usize) < parts {
        return out;
    }
    let mut cur = Vec::with_capacity(parts);
    fn rec(remaining: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Composition>) {
        if slots == 1 {
            cur.push(remaining);
            out.push(Composition(cur.clone()));
            cur.pop();
            return;
        }
        // leave at least one for each later slot
        for first in 1..=remaining - (slots as u32 - 1) {
            cur.push(first);
            rec(remaining - first, slots - 1, cur, out);
            cur.pop();
        }
    }
    rec(e, parts, &mut cur, &mut out);
    out
}

/// All tuples of `parts` nonnegative integers summing to `e`, lexicographic.
pub fn weak_compositions(e: u32, parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    if parts == 0 {
        if e == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    let mut cur = Vec::with_capacity(parts);
    fn rec(remaining: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            cur.push(remaining);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for first in 0..=remaining {
            cur.push(first);
            rec(remaining - first, slots - 1, cur, out);
            cur.pop();
        }
    }
    rec(e, parts, &mut cur, &mut out);
    out
}

/// Ordinary binomial coefficient, exact.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// An exact nonnegative count of arbitrary size.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigCount(pub BigUint);

impl BigCount {
    pub fn zero() -> Self {
        BigCount(BigUint::zero())
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }
}

impl From<u128> for BigCount {
    fn from(v: u128) -> Self {
        BigCount(BigUint::from(v))
    }
}

impl From<BigUint> for BigCount {
    fn from(v: BigUint) -> Self {
        BigCount(v)
    }
}

impl Add for BigCount {
    type Output = BigCount;
    fn add(self, rhs: BigCount) -> BigCount {
        BigCount(self.0 + rhs.0)
    }
}

impl AddAssign<&BigCount> for BigCount {
    fn add_assign(&mut self, rhs: &BigCount) {
        self.0 += &rhs.0;
    }
}

impl std::iter::Sum for BigCount {
    fn sum<I: Iterator<Item = BigCount>>(iter: I) -> Self {
        iter.fold(BigCount::zero(), |a, b| a + b)
    }
}

impl PartialEq<u64> for BigCount {
    fn eq(&self, other: &u64) -> bool {
        self.0 == BigUint::from(*other)
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

// Decimal strings survive any JSON reader without precision loss.
impl Serialize for BigCount {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_str_radix(10))
    }
}

/// Which counting function a record refers to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetDescriptor {
    GAlpha { alpha: Composition },
    GN { n: usize, e: u32 },
    FN { n: usize, e: u32 },
    Subgroups { n: usize, e: u32 },
    SubsetCensus { alpha: Composition, pairs: Vec<(usize, usize)> },
    Variety { name: String },
    Formula { name: String },
}

/// One evaluated count at one prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountRecord {
    pub target: TargetDescriptor,
    pub prime: Prime,
    pub count: BigCount,
}

impl CountRecord {
    pub fn new(target: TargetDescriptor, prime: u64, count: BigCount) -> Result<Self, InputError> {
        Ok(CountRecord {
            target,
            prime: Prime::new(prime)?,
            count,
        })
    }
}
