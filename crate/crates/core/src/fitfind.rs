//! Exact classification of prime-indexed count sequences.
//!
//! A sequence is fitted by exact rational interpolation on the smallest
//! primes and checked on the rest. Nothing here is a proof: every verdict
//! only describes the primes that were sampled.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::census::{count_subgroups_direct, Census, PairSubset, Pins};
use crate::error::{FitError, ProbeError, TargetError};
use crate::types::{p_valuation_big, BigCount, Composition, Prime, TargetDescriptor};
use crate::varieties::{count_points, PolySystem, DEFAULT_POINT_BUDGET};

/// Attached to every report.
pub const EMPIRICAL_LABEL: &str = "empirical at the sampled primes";

pub const DEFAULT_MAX_DEGREE: usize = 12;
pub const DEFAULT_MAX_MODULUS: u64 = 12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SamplePoint {
    pub p: Prime,
    pub count: BigCount,
}

impl SamplePoint {
    pub fn new(p: Prime, count: impl Into<BigCount>) -> Self {
        SamplePoint { p, count: count.into() }
    }
}

/// Polynomial in `p` with exact rational coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_at(&self, p: Prime) -> BigRational {
        self.eval(&rat(BigInt::from(p.get())))
    }

    /// Multiplies by `p^k`.
    fn shift(mut self, k: usize) -> Self {
        if !self.coeffs.is_empty() {
            let mut c = vec![BigRational::zero(); k];
            c.append(&mut self.coeffs);
            self.coeffs = c;
        }
        self
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            let unit = a.is_one();
            match (k, unit) {
                (0, _) => write!(f, "{a}")?,
                (_, true) => {}
                (_, false) if a.is_integer() => write!(f, "{a}")?,
                (_, false) => write!(f, "({a})")?,
            }
            match k {
                0 => {}
                1 => f.write_str("p")?,
                _ => write!(f, "p^{k}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for RationalPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs.iter().map(|c| c.to_string()))
    }
}

fn rat(x: BigInt) -> BigRational {
    BigRational::from_integer(x)
}

fn count_rat(c: &BigCount) -> BigRational {
    rat(BigInt::from(c.0.clone()))
}

fn check_distinct(points: &[SamplePoint]) -> Result<(), FitError> {
    let mut seen = BTreeSet::new();
    for pt in points {
        if !seen.insert(pt.p) {
            return Err(FitError::DuplicatePrime(pt.p.get()));
        }
    }
    Ok(())
}

/// The unique polynomial of degree `<= degree` through the first
/// `degree + 1` points.
pub fn interpolate_exact(points: &[SamplePoint], degree: usize) -> Result<RationalPoly, FitError> {
    if points.len() < degree + 1 {
        return Err(FitError::InsufficientPoints { needed: degree + 1, got: points.len() });
    }
    let used = &points[..degree + 1];
    check_distinct(used)?;
    let xy: Vec<(BigRational, BigRational)> =
        used.iter().map(|pt| (rat(BigInt::from(pt.p.get())), count_rat(&pt.count))).collect();
    Ok(newton(&xy))
}

/// Newton divided differences, expanded into the monomial basis.
fn newton(xy: &[(BigRational, BigRational)]) -> RationalPoly {
    let m = xy.len();
    let mut dd: Vec<BigRational> = xy.iter().map(|(_, y)| y.clone()).collect();
    for j in 1..m {
        for i in (j..m).rev() {
            dd[i] = (&dd[i] - &dd[i - 1]) / (&xy[i].0 - &xy[i - j].0);
        }
    }
    // c_{m-1}, then repeatedly multiply by (x - x_i) and add c_i
    let mut coeffs = vec![dd[m - 1].clone()];
    for i in (0..m - 1).rev() {
        let mut next = vec![BigRational::zero(); coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * &xy[i].0;
        }
        next[0] += &dd[i];
        coeffs = next;
    }
    RationalPoly::new(coeffs)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Polynomial,
    Quasipolynomial,
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Polynomial => "polynomial",
            Verdict::Quasipolynomial => "quasipolynomial",
            Verdict::Undetermined => "undetermined",
        })
    }
}

/// One residue class of a quasipolynomial fit. Primes dividing the modulus
/// form their own class and carry their value instead of a polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassFit {
    pub residue: u64,
    pub primes: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<RationalPoly>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<BigCount>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Evidence {
    pub fitted_points: usize,
    pub held_out_points: usize,
    pub max_degree_tried: usize,
    /// Largest `k` with `p^k` dividing every nonzero count, factored out
    /// before fitting.
    pub monomial_factor: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FitReport {
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polynomial: Option<RationalPoly>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<ClassFit>,
    pub evidence: Evidence,
    pub samples: Vec<SamplePoint>,
    pub label: &'static str,
}

impl FitReport {
    /// Re-evaluates the fit at every sample.
    pub fn reproduces_samples(&self) -> bool {
        match self.verdict {
            Verdict::Polynomial => {
                let poly = self.polynomial.as_ref().expect("polynomial verdict carries a polynomial");
                self.samples.iter().all(|s| poly.eval_at(s.p) == count_rat(&s.count))
            }
            Verdict::Quasipolynomial => self.samples.iter().all(|s| {
                let cls = self.classes.iter().find(|c| c.primes.contains(&s.p.get()));
                match cls {
                    Some(ClassFit { polynomial: Some(poly), .. }) => poly.eval_at(s.p) == count_rat(&s.count),
                    Some(ClassFit { value: Some(v), .. }) => *v == s.count,
                    _ => false,
                }
            }),
            Verdict::Undetermined => true,
        }
    }
}

/// Normalized sample: prime, and count divided by `p^v`.
struct Norm {
    p: Prime,
    x: BigRational,
    y: BigRational,
}

/// Smallest degree that fits the first `d + 1` points and matches at
/// least one more.
fn fit_class(points: &[&Norm], d_max: usize) -> Option<(RationalPoly, usize)> {
    for d in 0..=d_max {
        if points.len() < d + 2 {
            return None;
        }
        let xy: Vec<_> = points[..d + 1].iter().map(|n| (n.x.clone(), n.y.clone())).collect();
        let poly = newton(&xy);
        if points.iter().all(|n| poly.eval(&n.x) == n.y) {
            return Some((poly, d));
        }
    }
    None
}

/// Classifies a sequence as polynomial, quasipolynomial by residue of `p`
/// modulo some `N <= n_max`, or undetermined.
pub fn classify(points: &[SamplePoint], d_max: usize, n_max: u64) -> Result<FitReport, FitError> {
    if points.len() < 4 {
        return Err(FitError::InsufficientPoints { needed: 4, got: points.len() });
    }
    check_distinct(points)?;
    let mut samples = points.to_vec();
    samples.sort_by_key(|s| s.p);

    let v = samples
        .iter()
        .filter(|s| !s.count.0.is_zero())
        .map(|s| p_valuation_big(&s.count.0, s.p).expect("nonzero"))
        .min()
        .unwrap_or(0);
    let norm: Vec<Norm> = samples
        .iter()
        .map(|s| {
            let pk = num_traits::pow(BigUint::from(s.p.get()), v as usize);
            Norm {
                p: s.p,
                x: rat(BigInt::from(s.p.get())),
                y: rat(BigInt::from(&s.count.0 / pk)),
            }
        })
        .collect();
    let all: Vec<&Norm> = norm.iter().collect();
    let mut report = FitReport {
        verdict: Verdict::Undetermined,
        polynomial: None,
        modulus: None,
        classes: Vec::new(),
        evidence: Evidence { max_degree_tried: d_max, monomial_factor: v, ..Evidence::default() },
        samples,
        label: EMPIRICAL_LABEL,
    };

    if let Some((poly, d)) = fit_class(&all, d_max) {
        report.verdict = Verdict::Polynomial;
        report.polynomial = Some(poly.shift(v as usize));
        report.evidence.fitted_points = d + 1;
        report.evidence.held_out_points = all.len() - d - 1;
        return Ok(report);
    }

    'modulus: for n in 2..=n_max {
        let mut exceptional = Vec::new();
        let mut by_residue: BTreeMap<u64, Vec<&Norm>> = BTreeMap::new();
        for pt in &norm {
            if n % pt.p.get() == 0 {
                exceptional.push(pt);
            } else {
                by_residue.entry(pt.p.get() % n).or_default().push(pt);
            }
        }
        if exceptional.is_empty() && by_residue.len() < 2 {
            continue;
        }
        let mut classes = Vec::new();
        let (mut fitted, mut held) = (0, 0);
        for (residue, pts) in &by_residue {
            let Some((poly, d)) = fit_class(pts, d_max) else {
                continue 'modulus;
            };
            fitted += d + 1;
            held += pts.len() - d - 1;
            classes.push(ClassFit {
                residue: *residue,
                primes: pts.iter().map(|n| n.p.get()).collect(),
                polynomial: Some(poly.shift(v as usize)),
                value: None,
                degree: Some(d + v as usize),
            });
        }
        for pt in exceptional {
            let s = report.samples.iter().find(|s| s.p == pt.p).expect("sample");
            classes.push(ClassFit {
                residue: pt.p.get() % n,
                primes: vec![pt.p.get()],
                polynomial: None,
                value: Some(s.count.clone()),
                degree: None,
            });
        }
        classes.sort_by_key(|c| c.residue);
        report.verdict = Verdict::Quasipolynomial;
        report.modulus = Some(n);
        report.classes = classes;
        report.evidence.fitted_points = fitted;
        report.evidence.held_out_points = held;
        return Ok(report);
    }
    Ok(report)
}

/// Something that can be counted at a prime.
#[derive(Clone, Debug)]
pub enum ProbeTarget {
    GAlpha(Composition),
    GN { n: usize, e: u32 },
    FN { n: usize, e: u32 },
    Subgroups { n: usize, e: u32 },
    Subset { alpha: Composition, pairs: PairSubset, pins: Pins },
    Variety { name: String, system: PolySystem },
}

impl ProbeTarget {
    pub fn evaluate(&self, census: &Census, p: Prime) -> Result<BigCount, TargetError> {
        Ok(match self {
            ProbeTarget::GAlpha(alpha) => census.g_alpha(alpha, p)?,
            ProbeTarget::GN { n, e } => census.g_n(*n, *e, p)?,
            ProbeTarget::FN { n, e } => census.f_n_recurrence(*n, *e, p)?,
            ProbeTarget::Subgroups { n, e } => count_subgroups_direct(*n, *e, p),
            ProbeTarget::Subset { alpha, pairs, pins } => census.g_alpha_with(alpha, p, pairs, pins)?,
            ProbeTarget::Variety { system, .. } => count_points(system, p, DEFAULT_POINT_BUDGET)?,
        })
    }

    pub fn descriptor(&self) -> TargetDescriptor {
        match self {
            ProbeTarget::GAlpha(alpha) => TargetDescriptor::GAlpha { alpha: alpha.clone() },
            ProbeTarget::GN { n, e } => TargetDescriptor::GN { n: *n, e: *e },
            ProbeTarget::FN { n, e } => TargetDescriptor::FN { n: *n, e: *e },
            ProbeTarget::Subgroups { n, e } => TargetDescriptor::Subgroups { n: *n, e: *e },
            ProbeTarget::Subset { alpha, pairs, .. } => {
                let set = match pairs {
                    PairSubset::All => match PairSubset::every_pair(alpha.n()) {
                        PairSubset::Pairs(s) => s,
                        PairSubset::All => BTreeSet::new(),
                    },
                    PairSubset::Pairs(s) => s.clone(),
                };
                TargetDescriptor::SubsetCensus { alpha: alpha.clone(), pairs: set.into_iter().collect() }
            }
            ProbeTarget::Variety { name, .. } => TargetDescriptor::Variety { name: name.clone() },
        }
    }
}

/// Counts `target` at each prime, then classifies the sequence.
pub fn probe_polynomiality(
    census: &Census,
    target: &ProbeTarget,
    primes: &[Prime],
    d_max: usize,
    n_max: u64,
) -> Result<FitReport, ProbeError> {
    let mut samples = Vec::with_capacity(primes.len());
    for &p in primes {
        match target.evaluate(census, p) {
            Ok(count) => samples.push(SamplePoint::new(p, count)),
            Err(source) => return Err(ProbeError::Evaluation { prime: p.get(), partial: samples, source }),
        }
    }
    Ok(classify(&samples, d_max, n_max)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::CensusConfig;
    use crate::types::first_primes;
    use proptest::prelude::*;

    fn p(x: u64) -> Prime {
        Prime::new(x).unwrap()
    }

    fn sample(f: impl Fn(u128) -> u128, primes: &[u64]) -> Vec<SamplePoint> {
        primes.iter().map(|&q| SamplePoint::new(p(q), f(q as u128))).collect()
    }

    fn ints(poly: &RationalPoly) -> Vec<i64> {
        poly.coefficients()
            .iter()
            .map(|c| {
                assert!(c.is_integer());
                i64::try_from(c.to_integer()).unwrap()
            })
            .collect()
    }

    const SMALL: [u64; 6] = [2, 3, 5, 7, 11, 13];

    #[test]
    fn interpolation_examples() {
        let ones = sample(|_| 1, &[2, 3, 5]);
        assert_eq!(ints(&interpolate_exact(&ones, 0).unwrap()), vec![1]);
        assert_eq!(ints(&interpolate_exact(&sample(|q| q, &[2, 3]), 1).unwrap()), vec![0, 1]);
        assert_eq!(ints(&interpolate_exact(&sample(|q| q + 1, &[2, 3]), 1).unwrap()), vec![1, 1]);
        assert_eq!(
            interpolate_exact(&ones, 3),
            Err(FitError::InsufficientPoints { needed: 4, got: 3 })
        );
        let dup = vec![SamplePoint::new(p(2), 1u64), SamplePoint::new(p(2), 1u64)];
        assert_eq!(interpolate_exact(&dup, 1), Err(FitError::DuplicatePrime(2)));
    }

    #[test]
    fn rational_coefficients_survive() {
        // (p^2 - 1)/8 is integral at odd primes with rational coefficients
        let pts = sample(|q| (q * q - 1) / 8, &[3, 5, 7, 11]);
        let r = classify(&pts, 4, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Polynomial);
        let poly = r.polynomial.unwrap();
        assert!(!poly.is_integral());
        assert_eq!(poly.to_string(), "(1/8)p^2 - 1/8");
    }

    #[test]
    fn constant_and_monomial() {
        let r = classify(&sample(|_| 7, &SMALL), 4, 6).unwrap();
        assert_eq!(r.verdict, Verdict::Polynomial);
        assert_eq!(ints(r.polynomial.as_ref().unwrap()), vec![7]);
        assert_eq!(r.evidence.held_out_points, 5);

        let r = classify(&sample(|q| q.pow(9), &SMALL), 2, 6).unwrap();
        assert_eq!(r.verdict, Verdict::Polynomial);
        assert_eq!(r.evidence.monomial_factor, 9);
        assert_eq!(r.polynomial.as_ref().unwrap().degree(), Some(9));
        assert!(r.reproduces_samples());
    }

    #[test]
    fn two_split() {
        let f = |q: u128| if q == 2 { 8 } else { 2 * q.pow(3) - 3 * q * q + 3 * q - 1 };
        let r = classify(&sample(f, &SMALL), 6, 6).unwrap();
        assert_eq!(r.verdict, Verdict::Quasipolynomial);
        assert_eq!(r.modulus, Some(2));
        assert_eq!(r.classes.len(), 2);
        assert_eq!(r.classes[0].value, Some(BigCount::from(8u64)));
        assert_eq!(ints(r.classes[1].polynomial.as_ref().unwrap()), vec![-1, 3, -3, 2]);
        assert_eq!(r.classes[1].primes, vec![3, 5, 7, 11, 13]);
        assert!(r.reproduces_samples());
    }

    #[test]
    fn residue_split() {
        let primes: Vec<u64> = first_primes(14).iter().map(|p| p.get()).collect();
        let f = |q: u128| if q % 3 == 1 { q * q } else { q + 5 };
        let r = classify(&sample(f, &primes), 3, 6).unwrap();
        assert_eq!(r.verdict, Verdict::Quasipolynomial);
        assert_eq!(r.modulus, Some(3));
        assert!(r.reproduces_samples());
    }

    #[test]
    fn undetermined_when_nothing_fits() {
        let primes = [2u64, 3, 5, 7, 11];
        let f = |q: u128| 2u128.pow(q as u32);
        let r = classify(&sample(f, &primes), 2, 4).unwrap();
        assert_eq!(r.verdict, Verdict::Undetermined);
        assert!(r.polynomial.is_none());
    }

    #[test]
    fn classify_needs_four_points() {
        assert_eq!(
            classify(&sample(|_| 1, &[2, 3, 5]), 2, 2),
            Err(FitError::InsufficientPoints { needed: 4, got: 3 })
        );
    }

    #[test]
    fn probes() {
        let census = Census::new(CensusConfig::single_threaded());
        let primes = first_primes(6);
        let r = probe_polynomiality(&census, &ProbeTarget::GN { n: 4, e: 3 }, &primes, 4, 6).unwrap();
        assert_eq!(r.verdict, Verdict::Polynomial);
        assert_eq!(ints(r.polynomial.as_ref().unwrap()), vec![1]);

        let alpha: Composition = "3,2".parse().unwrap();
        let r = probe_polynomiality(&census, &ProbeTarget::GAlpha(alpha), &primes, 4, 6).unwrap();
        assert_eq!(ints(r.polynomial.as_ref().unwrap()), vec![0, 1]);

        let alpha: Composition = "2,2,2".parse().unwrap();
        let target = ProbeTarget::Subset { alpha, pairs: PairSubset::pairs([(3, 3)]), pins: Pins::new() };
        let r = probe_polynomiality(&census, &target, &primes, 6, 6).unwrap();
        assert_eq!(r.verdict, Verdict::Polynomial);
        assert!(r.reproduces_samples());
    }

    #[test]
    fn probe_keeps_partial_results() {
        let census = Census::new(CensusConfig::single_threaded().with_budget(200));
        // search space p^4
        let alpha: Composition = "3,1,1".parse().unwrap();
        let err = probe_polynomiality(&census, &ProbeTarget::GAlpha(alpha), &first_primes(6), 4, 4).unwrap_err();
        match err {
            ProbeError::Evaluation { prime, partial, .. } => {
                assert_eq!(prime, 5);
                let full = Census::new(CensusConfig::single_threaded());
                let expect: Vec<SamplePoint> = [2, 3]
                    .into_iter()
                    .map(|q| SamplePoint::new(p(q), full.g_alpha(&"3,1,1".parse().unwrap(), p(q)).unwrap()))
                    .collect();
                assert_eq!(partial, expect);
            }
            other => panic!("{other:?}"),
        }
    }

    fn arb_poly() -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(-50i64..=50, 1..=5)
    }

    fn eval_int(c: &[i64], q: i128) -> i128 {
        c.iter().rev().fold(0i128, |acc, &x| acc * q + x as i128)
    }

    proptest! {
        #[test]
        fn interpolation_reproduces_fitted_points(c in arb_poly(), shift in 0usize..3) {
            let primes: Vec<u64> = first_primes(8).iter().map(|p| p.get()).skip(shift).collect();
            let d = c.len() - 1;
            let pts: Vec<(u64, BigRational)> = primes.iter().take(d + 1)
                .map(|&q| (q, rat(BigInt::from(eval_int(&c, q as i128))))).collect();
            let xy: Vec<_> = pts.iter().map(|(q, y)| (rat(BigInt::from(*q)), y.clone())).collect();
            let poly = newton(&xy);
            for (x, y) in &xy {
                prop_assert_eq!(&poly.eval(x), y);
            }
        }

        #[test]
        fn polynomial_verdict_is_permutation_invariant(
            c in arb_poly(),
            perm in Just((0..8usize).collect::<Vec<_>>()).prop_shuffle(),
        ) {
            let primes = first_primes(8);
            prop_assume!(primes.iter().all(|q| eval_int(&c, q.get() as i128) >= 0));
            let pts: Vec<SamplePoint> = primes.iter()
                .map(|&q| SamplePoint::new(q, eval_int(&c, q.get() as i128) as u128)).collect();
            let shuffled: Vec<SamplePoint> = perm.iter().map(|&i| pts[i].clone()).collect();
            let a = classify(&pts, 6, 4).unwrap();
            let b = classify(&shuffled, 6, 4).unwrap();
            prop_assert_eq!(a.verdict, Verdict::Polynomial);
            prop_assert_eq!(&a, &b);
            prop_assert!(a.reproduces_samples());
            let expect: Vec<BigRational> = RationalPoly::new(c.iter().map(|&x| rat(BigInt::from(x))).collect())
                .coefficients().to_vec();
            let got = a.polynomial.clone().unwrap();
            prop_assert_eq!(got.coefficients(), &expect[..]);
        }

        #[test]
        fn too_few_points_per_class_never_quasi(vals in proptest::collection::vec(0u64..1000, 4..=5)) {
            let primes = first_primes(vals.len());
            let pts: Vec<SamplePoint> = primes.iter().zip(&vals).map(|(&q, &v)| SamplePoint::new(q, v)).collect();
            let r = classify(&pts, 6, 12).unwrap();
            if r.verdict == Verdict::Quasipolynomial {
                for cls in &r.classes {
                    if let (Some(_), Some(d)) = (&cls.polynomial, cls.degree) {
                        let fitted_degree = d - r.evidence.monomial_factor as usize;
                        prop_assert!(cls.primes.len() >= fitted_degree + 2);
                    } else {
                        prop_assert_eq!(cls.primes.len(), 1);
                        prop_assert_eq!(r.modulus.unwrap() % cls.primes[0], 0);
                    }
                }
            }
            prop_assert!(r.reproduces_samples());
        }
    }
}
