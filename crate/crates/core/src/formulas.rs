//! Closed-form counts and local zeta factors.
//!
//! Every closed form is a Laurent polynomial in `p` over a denominator
//! `c·(p-1)^a·(p+1)^b`. Evaluation happens at an integer prime: the
//! numerator is computed exactly, the denominator is required to divide it,
//! and the quotient is returned. A failed division means the transcription
//! is wrong, so it is an error rather than a rounding.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::FormulaError;
use crate::types::{BigCount, Composition, Prime};

/// Finite sum `Σ c_k p^k`, `k` possibly negative.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Laurent {
    terms: BTreeMap<i64, BigInt>,
}

impl Laurent {
    pub fn zero() -> Self {
        Laurent::default()
    }

    /// `c·p^k`.
    pub fn mono(c: i64, k: i64) -> Self {
        let mut l = Laurent::zero();
        if c != 0 {
            l.terms.insert(k, BigInt::from(c));
        }
        l
    }

    pub fn constant(c: i64) -> Self {
        Laurent::mono(c, 0)
    }

    /// The variable `p`.
    pub fn p() -> Self {
        Laurent::mono(1, 1)
    }

    pub fn scale(mut self, c: i64) -> Self {
        for v in self.terms.values_mut() {
            *v *= c;
        }
        self.terms.retain(|_, v| !v.is_zero());
        self
    }

    fn add_term(&mut self, k: i64, c: BigInt) {
        let e = self.terms.entry(k).or_insert_with(BigInt::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// `Σ c_k p^{k+shift}`; requires every shifted exponent to be `>= 0`.
    fn eval_shifted(&self, p: &BigInt, shift: i64) -> BigInt {
        let mut acc = BigInt::zero();
        for (&k, c) in &self.terms {
            let e = k + shift;
            debug_assert!(e >= 0);
            acc += c * num_traits::pow(p.clone(), e as usize);
        }
        acc
    }
}

impl Add for Laurent {
    type Output = Laurent;
    fn add(mut self, rhs: Laurent) -> Laurent {
        for (k, c) in rhs.terms {
            self.add_term(k, c);
        }
        self
    }
}

impl Sub for Laurent {
    type Output = Laurent;
    fn sub(self, rhs: Laurent) -> Laurent {
        self + (-rhs)
    }
}

impl Neg for Laurent {
    type Output = Laurent;
    fn neg(mut self) -> Laurent {
        for v in self.terms.values_mut() {
            *v = -v.clone();
        }
        self
    }
}

impl Mul for Laurent {
    type Output = Laurent;
    fn mul(self, rhs: Laurent) -> Laurent {
        let mut out = Laurent::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                out.add_term(ka + kb, ca * cb);
            }
        }
        out
    }
}

/// `c·(p-1)^a·(p+1)^b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Denominator {
    pub constant: i64,
    pub p_minus_1: u32,
    pub p_plus_1: u32,
}

impl Denominator {
    pub const ONE: Denominator = Denominator { constant: 1, p_minus_1: 0, p_plus_1: 0 };

    fn eval(&self, p: &BigInt) -> BigInt {
        BigInt::from(self.constant)
            * num_traits::pow(p - 1, self.p_minus_1 as usize)
            * num_traits::pow(p + 1, self.p_plus_1 as usize)
    }
}

/// A closed form `numerator / denominator` with parameters substituted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedForm {
    pub numerator: Laurent,
    pub denominator: Denominator,
}

impl ClosedForm {
    fn poly(numerator: Laurent) -> Self {
        ClosedForm { numerator, denominator: Denominator::ONE }
    }

    fn over(numerator: Laurent, constant: i64, p_minus_1: u32, p_plus_1: u32) -> Self {
        ClosedForm { numerator, denominator: Denominator { constant, p_minus_1, p_plus_1 } }
    }

    /// Exact value at `p`, with the divisibility and sign asserted.
    pub fn eval(&self, p: Prime, label: &str) -> Result<BigCount, FormulaError> {
        let pb = BigInt::from(p.get());
        let shift = (-self.numerator.min_exponent().unwrap_or(0)).max(0);
        let num = self.numerator.eval_shifted(&pb, shift);
        let den = self.denominator.eval(&pb) * num_traits::pow(pb.clone(), shift as usize);
        let (q, r) = num.div_rem(&den);
        if !r.is_zero() {
            return Err(FormulaError::NotDivisible {
                formula: label.to_string(),
                p: p.get(),
                numerator: num.to_string(),
                denominator: den.to_string(),
            });
        }
        to_count(q, p, label)
    }
}

fn to_count(v: BigInt, p: Prime, label: &str) -> Result<BigCount, FormulaError> {
    match v.sign() {
        Sign::Minus => Err(FormulaError::Negative {
            formula: label.to_string(),
            p: p.get(),
            value: v.to_string(),
        }),
        _ => Ok(BigCount(v.magnitude().clone())),
    }
}

/// The named closed forms.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FormulaName {
    GBasicELt,
    GBasicNMinus1,
    GBasicN,
    GNPlus1,
    GNPlus2,
    LemmaBeta4,
    Lemma2Beta,
    Lemma3Beta,
    Lemma222,
    Cor2Beta,
    Cor32,
    Cor222,
}

impl FormulaName {
    pub const ALL: [FormulaName; 12] = [
        FormulaName::GBasicELt,
        FormulaName::GBasicNMinus1,
        FormulaName::GBasicN,
        FormulaName::GNPlus1,
        FormulaName::GNPlus2,
        FormulaName::LemmaBeta4,
        FormulaName::Lemma2Beta,
        FormulaName::Lemma3Beta,
        FormulaName::Lemma222,
        FormulaName::Cor2Beta,
        FormulaName::Cor32,
        FormulaName::Cor222,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FormulaName::GBasicELt => "g_basic_e_lt",
            FormulaName::GBasicNMinus1 => "g_basic_n_minus_1",
            FormulaName::GBasicN => "g_basic_n",
            FormulaName::GNPlus1 => "g_n_plus_1",
            FormulaName::GNPlus2 => "g_n_plus_2",
            FormulaName::LemmaBeta4 => "lemma_beta4",
            FormulaName::Lemma2Beta => "lemma_2beta",
            FormulaName::Lemma3Beta => "lemma_3beta",
            FormulaName::Lemma222 => "lemma_222",
            FormulaName::Cor2Beta => "cor_2beta",
            FormulaName::Cor32 => "cor_32",
            FormulaName::Cor222 => "cor_222",
        }
    }
}

impl fmt::Display for FormulaName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for FormulaName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl FromStr for FormulaName {
    type Err = FormulaError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FormulaName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| FormulaError::Unknown(s.to_string()))
    }
}

/// A formula together with its integer parameters. Unused parameters are
/// `None`; `e` is only read by `g_basic_e_lt`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FormulaId {
    pub name: FormulaName,
    pub n: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e: Option<i64>,
}

impl FormulaId {
    pub fn new(name: FormulaName, n: i64) -> Self {
        FormulaId { name, n, k: None, l: None, beta: None, e: None }
    }

    pub fn with_k(mut self, k: i64) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_l(mut self, l: i64) -> Self {
        self.l = Some(l);
        self
    }

    pub fn with_beta(mut self, beta: i64) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn with_e(mut self, e: i64) -> Self {
        self.e = Some(e);
        self
    }

    pub fn label(&self) -> String {
        let mut s = format!("{}(n={}", self.name, self.n);
        for (key, v) in [("k", self.k), ("l", self.l), ("beta", self.beta), ("e", self.e)] {
            if let Some(v) = v {
                s.push_str(&format!(",{key}={v}"));
            }
        }
        s.push(')');
        s
    }

    fn out_of_range(&self, reason: impl Into<String>) -> FormulaError {
        FormulaError::OutOfRange { formula: self.label(), reason: reason.into() }
    }

    fn need(&self, v: Option<i64>, key: &str) -> Result<i64, FormulaError> {
        v.ok_or_else(|| self.out_of_range(format!("missing parameter {key}")))
    }

    /// Checks parameter ranges and builds the closed form.
    pub fn closed_form(&self) -> Result<ClosedForm, FormulaError> {
        let n = self.n;
        let require = |ok: bool, why: &str| if ok { Ok(()) } else { Err(self.out_of_range(why)) };
        match self.name {
            FormulaName::GBasicELt => {
                let e = self.need(self.e, "e")?;
                require(n >= 1 && e >= 0 && e < n - 1, "need n >= 1 and 0 <= e < n-1")?;
                Ok(table::g_basic_e_lt())
            }
            FormulaName::GBasicNMinus1 => {
                require(n >= 1, "need n >= 1")?;
                Ok(table::g_basic_n_minus_1())
            }
            FormulaName::GBasicN => {
                require(n >= 1, "need n >= 1")?;
                Ok(table::g_basic_n(n))
            }
            FormulaName::GNPlus1 => {
                require(n >= 1, "need n >= 1")?;
                Ok(table::g_n_plus_1(n))
            }
            FormulaName::GNPlus2 => {
                require(n >= 3, "need n > 2")?;
                Ok(table::g_n_plus_2(n))
            }
            FormulaName::LemmaBeta4 => {
                require(n >= 2, "need n >= 2")?;
                Ok(table::lemma_beta4(n))
            }
            FormulaName::Lemma2Beta => {
                let k = self.need(self.k, "k")?;
                let beta = self.need(self.beta, "beta")?;
                require(n >= 3 && (2..=n - 1).contains(&k), "need 2 <= k <= n-1")?;
                require(beta >= 2, "need beta > 1")?;
                Ok(table::lemma_2beta(n, k, beta))
            }
            FormulaName::Lemma3Beta => {
                let k = self.need(self.k, "k")?;
                let beta = self.need(self.beta, "beta")?;
                require(n >= 3 && (1..=n - 2).contains(&k), "need 1 <= k <= n-2")?;
                require(beta >= 2, "need beta > 1")?;
                Ok(table::lemma_3beta(n, k, beta))
            }
            FormulaName::Lemma222 => {
                let k = self.need(self.k, "k")?;
                let l = self.need(self.l, "l")?;
                require(1 <= k && k < l && l <= n - 2, "need 1 <= k < l <= n-2")?;
                Ok(table::lemma_222(n, k, l))
            }
            FormulaName::Cor2Beta => {
                require(n >= 3, "need n >= 3")?;
                if let Some(beta) = self.beta {
                    require(beta >= 3, "need beta > 2")?;
                }
                Ok(table::cor_2beta(n))
            }
            FormulaName::Cor32 => {
                require(n >= 3, "need n >= 3")?;
                Ok(table::cor_32(n))
            }
            FormulaName::Cor222 => {
                require(n >= 4, "need n >= 4")?;
                Ok(table::cor_222(n))
            }
        }
    }
}

/// Evaluates a named closed form at `p`.
pub fn eval_formula(id: &FormulaId, p: Prime) -> Result<BigCount, FormulaError> {
    id.closed_form()?.eval(p, &id.label())
}

/// Transcriptions of the closed forms, one function per named result.
/// `P` stands for the prime, `m(c, k)` for `c·p^k`.
mod table {
    use super::{ClosedForm, Laurent};

    fn m(c: i64, k: i64) -> Laurent {
        Laurent::mono(c, k)
    }

    /// `p - c`
    fn p_minus(c: i64) -> Laurent {
        Laurent::p() - Laurent::constant(c)
    }

    fn choose2(x: i64) -> i64 {
        x * (x - 1) / 2
    }

    pub fn g_basic_e_lt() -> ClosedForm {
        ClosedForm::poly(Laurent::zero())
    }

    pub fn g_basic_n_minus_1() -> ClosedForm {
        ClosedForm::poly(Laurent::constant(1))
    }

    /// (p^{n-1} - 1) / (p - 1)
    pub fn g_basic_n(n: i64) -> ClosedForm {
        ClosedForm::over(m(1, n - 1) - m(1, 0), 1, 1, 0)
    }

    /// [2p^{2n-3} + (n²-n)p^{n+1} - (n²-n)p^n - (n²-n+2)p^{n-1}
    ///  + (n²-n-2)p^{n-2} + 2] / (2(p-1)²(p+1))
    pub fn g_n_plus_1(n: i64) -> ClosedForm {
        let t = n * n - n;
        let num = m(2, 2 * n - 3) + m(t, n + 1) - m(t, n) - m(t + 2, n - 1) + m(t - 2, n - 2) + m(2, 0);
        ClosedForm::over(num, 2, 2, 1)
    }

    /// p^{n-5} / (24(p-1)²) · [ … ]
    pub fn g_n_plus_2(n: i64) -> ClosedForm {
        let inner = m(24, 2 * n - 5) - m(24, 2 * n - 6) + m(24, 2 * n - 7)
            + m(12 * n * (n - 1), n + 1)
            - m(12 * n * (n - 1), n)
            - m(24, n - 2)
            - m(12 * (n - 2) * (n - 3), n - 3)
            + m(12 * (n - 1) * (n - 4), n - 4)
            + m(n * (n - 1) * (n - 2) * (n - 3), 6)
            - m(4 * n * (n - 1) * (n - 1) * (n - 5), 5)
            + m(7 * n.pow(4) - 50 * n.pow(3) + 41 * n * n + 98 * n - 120, 4)
            - m(4 * (n - 2) * (n + 7) * (n * n - 7 * n + 9), 3)
            + m(-5 * n.pow(4) + 102 * n.pow(3) - 619 * n * n + 1482 * n - 1200, 2)
            + m(4 * (n - 2) * (n - 3) * (n - 4) * (2 * n - 15), 1)
            - m((n - 4) * (n - 5) * (n - 6) * (3 * n - 5), 0);
        ClosedForm::over(m(1, n - 5) * inner, 24, 2, 0)
    }

    /// (n-1)p^{n-2}
    pub fn lemma_beta4(n: i64) -> ClosedForm {
        ClosedForm::poly(m(n - 1, n - 2))
    }

    /// β = 2: p^{2n-k-4} + (n-k)p^{n-3}(p-1)
    /// β ≥ 3: (n-k)(p^{2n-k-4} + p^{n-3}(p-1))
    pub fn lemma_2beta(n: i64, k: i64, beta: i64) -> ClosedForm {
        let num = if beta == 2 {
            m(1, 2 * n - k - 4) + m(n - k, n - 3) * p_minus(1)
        } else {
            (m(1, 2 * n - k - 4) + m(1, n - 3) * p_minus(1)).scale(n - k)
        };
        ClosedForm::poly(num)
    }

    /// β in position k+1 after a leading 3.
    pub fn lemma_3beta(n: i64, k: i64, beta: i64) -> ClosedForm {
        let num = if beta == 2 {
            m(n - 1, 2 * n - k - 5) + m((n - k - 1) * (n - 2), n - 3) * p_minus(1)
                - m(n - k - 1, n - 3)
                + m((n - k - 2) + choose2(n - k - 2), n - 3) * p_minus(2) * p_minus(3)
        } else {
            m((n - k - 1) * (n - 2), 2 * n - k - 5)
                + m((n - k - 1) * (k - 1) + 1 + (n - k - 2) * (n - k - 3), n - 3) * p_minus(1)
                + m(n - k - 2, n - 3) * p_minus(1) * p_minus(1)
                + m(n - k - 2, n - 2) * p_minus(1)
                + m((n - k - 2) * (n - k - 3), n - 3) * p_minus(1) * p_minus(2)
        };
        ClosedForm::poly(num)
    }

    /// 2s in positions 1, k+1, l+1.
    pub fn lemma_222(n: i64, k: i64, l: i64) -> ClosedForm {
        let num = m(1, 3 * n - k - l - 9)
            + m(n - l - 1, 2 * n - k - 7) * p_minus(1) * (Laurent::p() + Laurent::constant(1))
            + m(n - k - 1, 2 * n - l - 6) * p_minus(1)
            - m(n - l - 1, n - 4) * p_minus(1)
            + m((n - k - 2) * (n - l - 1), n - 4) * p_minus(1) * p_minus(1)
            + m((n - l - 2) + choose2(n - l - 2), n - 4) * p_minus(1) * p_minus(2) * p_minus(3);
        ClosedForm::poly(num)
    }

    /// p^{n-3}((n-2)p^{n-1} - (n-1)p^{n-2} + 1)/(p-1)² + (p-1)p^{n-3}C(n-1,2)
    pub fn cor_2beta(n: i64) -> ClosedForm {
        let first = m(1, n - 3) * (m(n - 2, n - 1) - m(n - 1, n - 2) + m(1, 0));
        let second = m(choose2(n - 1), n - 3) * p_minus(1) * p_minus(1) * p_minus(1);
        ClosedForm::over(first + second, 1, 2, 0)
    }

    /// [6(n-1)p^{2n-5} + (n-1)(n-2)(n-3)p^n - 3(n-1)(n-2)(n-4)p^{n-1}
    ///  + (n-1)(n-2)(5n-24)p^{n-2} - 3(n-1)(n-3)(n-4)p^{n-3}] / (6(p-1))
    pub fn cor_32(n: i64) -> ClosedForm {
        let num = m(6 * (n - 1), 2 * n - 5) + m((n - 1) * (n - 2) * (n - 3), n)
            - m(3 * (n - 1) * (n - 2) * (n - 4), n - 1)
            + m((n - 1) * (n - 2) * (5 * n - 24), n - 2)
            - m(3 * (n - 1) * (n - 3) * (n - 4), n - 3);
        ClosedForm::over(num, 6, 1, 0)
    }

    /// p^{n-4} / (24(p-1)²(p+1)) · [ … ]
    pub fn cor_222(n: i64) -> ClosedForm {
        let inner = m(12 * (n - 2) * (n - 3), n + 1) + m(24, n)
            - m(24 * (n - 1) * (n - 3), n - 1)
            - m(24, n - 2)
            + m(12 * n * (n - 3), n - 3)
            + m(24, 2 * n - 5)
            + m((n - 1) * (n - 2) * (n - 3) * (n - 4), 6)
            - m(4 * (n - 1) * (n - 2) * (n - 3) * (n - 5), 5)
            + m((n - 1) * (n - 2) * (n - 3) * (7 * n - 44), 4)
            - m(4 * (n - 1) * (n - 2) * (n * n - 11 * n + 27), 3)
            - m((n - 3) * (5 * n.pow(3) - 43 * n * n + 82 * n - 56), 2)
            + m(4 * (n - 3) * (2 * n.pow(3) - 19 * n * n + 46 * n - 26), 1)
            - m((n - 3) * (n - 4) * (n - 5) * (3 * n - 2), 0);
        ClosedForm::over(m(1, n - 4) * inner, 24, 2, 1)
    }
}

/// Closed-form `g_α(p)` where a known shape applies, after stripping
/// leading ones. `Ok(None)` means no closed form covers `alpha`.
pub fn g_alpha_formula(alpha: &Composition, p: Prime) -> Result<Option<BigCount>, FormulaError> {
    match g_alpha_formula_id(alpha) {
        None => Ok(None),
        Some(AlphaFormula::One) => Ok(Some(BigCount::from(1u64))),
        Some(AlphaFormula::Named(id)) => eval_formula(&id, p).map(Some),
        Some(AlphaFormula::BasicDifference(n)) => {
            // (2,1,…,1) of length n-1 is the difference of consecutive
            // g_n(p^n) values
            let hi = eval_formula(&FormulaId::new(FormulaName::GBasicN, n), p)?;
            let lo = eval_formula(&FormulaId::new(FormulaName::GBasicN, n - 1), p)?;
            Ok(Some(BigCount(hi.0 - lo.0)))
        }
    }
}

/// What [`g_alpha_formula`] dispatches to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlphaFormula {
    One,
    BasicDifference(i64),
    Named(FormulaId),
}

pub fn g_alpha_formula_id(alpha: &Composition) -> Option<AlphaFormula> {
    let Some(core) = alpha.strip_leading_ones() else {
        return Some(AlphaFormula::One);
    };
    let parts = core.parts();
    let n = core.n() as i64;
    // 1-based positions of parts other than 1, after the leading part
    let big: Vec<(usize, u32)> = parts
        .iter()
        .enumerate()
        .skip(1)
        .filter(|&(_, &x)| x != 1)
        .map(|(i, &x)| (i + 1, x))
        .collect();
    match (parts[0], big.as_slice()) {
        (2, []) => Some(AlphaFormula::BasicDifference(n)),
        (4, []) => Some(AlphaFormula::Named(FormulaId::new(FormulaName::LemmaBeta4, n))),
        (2, &[(pos, beta)]) => Some(AlphaFormula::Named(
            FormulaId::new(FormulaName::Lemma2Beta, n).with_k(pos as i64).with_beta(beta as i64),
        )),
        (3, &[(pos, beta)]) => Some(AlphaFormula::Named(
            FormulaId::new(FormulaName::Lemma3Beta, n)
                .with_k(pos as i64 - 1)
                .with_beta(beta as i64),
        )),
        (2, &[(pos1, 2), (pos2, 2)]) => Some(AlphaFormula::Named(
            FormulaId::new(FormulaName::Lemma222, n)
                .with_k(pos1 as i64 - 1)
                .with_l(pos2 as i64 - 1),
        )),
        _ => None,
    }
}

/// A local factor `N(p, t) / Π (1 - p^a t^b)` with `t = p^{-s}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalFactor {
    pub n: usize,
    /// Coefficient of `t^k` as integer coefficients of a polynomial in `p`.
    pub numerator: Vec<Vec<i64>>,
    /// Factors `(a, b)` of `1 - p^a t^b`, repeated by multiplicity.
    pub denominator: Vec<(u32, u32)>,
}

impl LocalFactor {
    /// Known local factors of the subring zeta function of `Z^n`.
    /// For `n = 3` this is `ζ(3s-1)ζ(s)^3/ζ(2s)^2`.
    pub fn for_dimension(n: usize) -> Result<Self, FormulaError> {
        match n {
            2 => Ok(LocalFactor { n, numerator: vec![vec![1]], denominator: vec![(0, 1)] }),
            3 => Ok(LocalFactor {
                n,
                // (1 - t^2)^2
                numerator: vec![vec![1], vec![], vec![-2], vec![], vec![1]],
                denominator: vec![(0, 1), (0, 1), (0, 1), (1, 3)],
            }),
            4 => Ok(LocalFactor {
                n,
                numerator: vec![
                    vec![1],
                    vec![4],
                    vec![2],
                    vec![-3, 4],
                    vec![-1, 5],
                    vec![0, -5, 1],
                    vec![0, -4, 3],
                    vec![0, 0, -2],
                    vec![0, 0, -4],
                    vec![0, 0, -1],
                ],
                denominator: vec![(0, 1), (0, 1), (2, 4), (3, 6)],
            }),
            _ => Err(FormulaError::UnsupportedDimension(n)),
        }
    }

    /// Series coefficients of `t^0 … t^max_e` at `p`.
    pub fn expand(&self, p: Prime, max_e: usize) -> Vec<BigInt> {
        let pb = BigInt::from(p.get());
        let len = max_e + 1;
        let mut series: Vec<BigInt> = (0..len)
            .map(|k| {
                self.numerator.get(k).map_or_else(BigInt::zero, |coeffs| {
                    coeffs
                        .iter()
                        .enumerate()
                        .map(|(i, &c)| BigInt::from(c) * num_traits::pow(pb.clone(), i))
                        .sum()
                })
            })
            .collect();
        // multiply by 1/(1 - q t^b) = Σ q^j t^{bj}: s_k += q·s_{k-b}, ascending
        for &(a, b) in &self.denominator {
            let q = num_traits::pow(pb.clone(), a as usize);
            let b = b as usize;
            for k in b..len {
                let add = &series[k - b] * &q;
                series[k] += add;
            }
        }
        series
    }
}

/// `f_n(p^0), …, f_n(p^max_e)` from the local factor, `n ∈ {2, 3, 4}`.
pub fn zeta_local_coefficients(n: usize, p: Prime, max_e: usize) -> Result<Vec<BigCount>, FormulaError> {
    let factor = LocalFactor::for_dimension(n)?;
    factor
        .expand(p, max_e)
        .into_iter()
        .map(|c| to_count(c, p, &format!("zeta local factor n={n}")))
        .collect()
}

/// Gaussian binomial `[a choose b]_p = Π_{i=1}^{b} (p^{a-b+i} - 1)/(p^i - 1)`.
pub fn p_binomial(a: u32, b: u32, p: Prime) -> Result<BigCount, FormulaError> {
    if b > a {
        return Err(FormulaError::OutOfRange {
            formula: "p_binomial".into(),
            reason: format!("b = {b} exceeds a = {a}"),
        });
    }
    let pb = BigUint::from(p.get());
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 1..=b {
        num *= num_traits::pow(pb.clone(), (a - b + i) as usize) - 1u32;
        den *= num_traits::pow(pb.clone(), i as usize) - 1u32;
    }
    let (q, r) = num.div_rem(&den);
    debug_assert!(r.is_zero());
    Ok(BigCount(q))
}

/// Sum of the lemma values a corollary adds up, evaluated term by term.
pub fn corollary_term_sum(cor: FormulaName, n: i64, p: Prime) -> Result<BigCount, FormulaError> {
    let ids: Vec<FormulaId> = match cor {
        FormulaName::Cor2Beta => (2..=n - 1)
            .map(|k| FormulaId::new(FormulaName::Lemma2Beta, n).with_k(k).with_beta(3))
            .collect(),
        FormulaName::Cor32 => (1..=n - 2)
            .map(|k| FormulaId::new(FormulaName::Lemma3Beta, n).with_k(k).with_beta(2))
            .collect(),
        FormulaName::Cor222 => (1..=n - 2)
            .flat_map(|k| {
                (k + 1..=n - 2).map(move |l| FormulaId::new(FormulaName::Lemma222, n).with_k(k).with_l(l))
            })
            .collect(),
        other => {
            return Err(FormulaError::OutOfRange {
                formula: other.to_string(),
                reason: "not a corollary".into(),
            })
        }
    };
    let mut total = BigCount::zero();
    for id in &ids {
        total += &eval_formula(id, p)?;
    }
    Ok(total)
}

/// The compositions a corollary sums over, for brute-force comparison.
pub fn corollary_compositions(cor: FormulaName, n: usize, beta: u32) -> Vec<Composition> {
    let len = n - 1;
    let mut out = Vec::new();
    let with = |positions: &[(usize, u32)]| {
        let mut v = vec![1u32; len];
        for &(pos, val) in positions {
            v[pos - 1] = val;
        }
        Composition::new(v).expect("positive parts")
    };
    match cor {
        FormulaName::Cor2Beta => {
            for k in 2..=len {
                out.push(with(&[(1, 2), (k, beta)]));
            }
        }
        FormulaName::Cor32 => {
            for k in 1..=len - 1 {
                out.push(with(&[(1, 3), (k + 1, 2)]));
            }
        }
        FormulaName::Cor222 => {
            for k in 1..=len - 1 {
                for l in k + 1..=len - 1 {
                    out.push(with(&[(1, 2), (k + 1, 2), (l + 1, 2)]));
                }
            }
        }
        _ => {}
    }
    out
}
