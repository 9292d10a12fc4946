//! Exhaustive point counts of polynomial systems over `F_p`.
//!
//! Documents look like
//! `{"vars": ["x", "y"], "polys": [[[1, [1, 1]], [-1, [0, 0]]]]}`,
//! one list of `[coefficient, [exponents…]]` terms per polynomial.

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde_json::Value;

use crate::error::VarietyError;
use crate::types::{BigCount, Prime};

/// Largest point grid counted without an explicit budget, `31^8`.
pub const DEFAULT_POINT_BUDGET: u128 = 852_891_037_441;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coefficient: i64,
    pub exponents: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySystem {
    vars: Vec<String>,
    polys: Vec<Polynomial>,
}

fn schema(position: impl Into<String>, message: impl Into<String>) -> VarietyError {
    VarietyError::Schema { position: position.into(), message: message.into() }
}

impl PolySystem {
    pub fn new(vars: Vec<String>, polys: Vec<Polynomial>) -> Result<Self, VarietyError> {
        if vars.is_empty() {
            return Err(schema("vars", "at least one variable is required"));
        }
        if polys.is_empty() {
            return Err(schema("polys", "at least one polynomial is required"));
        }
        for (i, poly) in polys.iter().enumerate() {
            for (j, t) in poly.terms.iter().enumerate() {
                if t.exponents.len() != vars.len() {
                    return Err(schema(
                        format!("polys[{i}][{j}][1]"),
                        format!("expected {} exponents, found {}", vars.len(), t.exponents.len()),
                    ));
                }
            }
        }
        Ok(PolySystem { vars, polys })
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn polys(&self) -> &[Polynomial] {
        &self.polys
    }

    /// Appends a polynomial, keeping the arity check.
    pub fn with_poly(mut self, poly: Polynomial) -> Result<Self, VarietyError> {
        self.polys.push(poly);
        PolySystem::new(self.vars, self.polys)
    }

    /// Parses a polynomial document. Unknown fields are rejected.
    pub fn from_json_str(doc: &str) -> Result<Self, VarietyError> {
        let v: Value = serde_json::from_str(doc)
            .map_err(|e| schema(format!("line {} column {}", e.line(), e.column()), e.to_string()))?;
        let obj = v.as_object().ok_or_else(|| schema("$", "document must be an object"))?;
        if let Some(k) = obj.keys().find(|k| *k != "vars" && *k != "polys") {
            return Err(schema(k.clone(), "unknown field"));
        }
        let vars = obj
            .get("vars")
            .ok_or_else(|| schema("vars", "missing field"))?
            .as_array()
            .ok_or_else(|| schema("vars", "must be a list of names"))?
            .iter()
            .enumerate()
            .map(|(i, x)| {
                x.as_str().map(str::to_string).ok_or_else(|| schema(format!("vars[{i}]"), "must be a string"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let polys_v = obj
            .get("polys")
            .ok_or_else(|| schema("polys", "missing field"))?
            .as_array()
            .ok_or_else(|| schema("polys", "must be a list of polynomials"))?;
        let mut polys = Vec::with_capacity(polys_v.len());
        for (i, pv) in polys_v.iter().enumerate() {
            let terms_v = pv.as_array().ok_or_else(|| schema(format!("polys[{i}]"), "must be a list of terms"))?;
            let mut terms = Vec::with_capacity(terms_v.len());
            for (j, tv) in terms_v.iter().enumerate() {
                let at = format!("polys[{i}][{j}]");
                let pair = tv
                    .as_array()
                    .filter(|a| a.len() == 2)
                    .ok_or_else(|| schema(&at, "term must be [coefficient, [exponents...]]"))?;
                let coefficient = pair[0]
                    .as_i64()
                    .ok_or_else(|| schema(format!("{at}[0]"), "coefficient must be a 64-bit integer"))?;
                let exponents = pair[1]
                    .as_array()
                    .ok_or_else(|| schema(format!("{at}[1]"), "exponents must be a list"))?
                    .iter()
                    .enumerate()
                    .map(|(k, x)| {
                        x.as_u64()
                            .and_then(|x| u32::try_from(x).ok())
                            .ok_or_else(|| schema(format!("{at}[1][{k}]"), "exponent must be a nonnegative integer"))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                terms.push(Term { coefficient, exponents });
            }
            polys.push(Polynomial { terms });
        }
        PolySystem::new(vars, polys)
    }

    /// Resolves `builtin:NAME`.
    pub fn builtin(name: &str) -> Result<Self, VarietyError> {
        match name.strip_prefix("builtin:").unwrap_or(name) {
            "qp-pair" => Ok(qp_pair()),
            other => Err(VarietyError::UnknownBuiltin(other.to_string())),
        }
    }
}

/// `-a1·a4² + a2²` and `-a1·a5² + a3²` in `a1 … a5`.
fn qp_pair() -> PolySystem {
    let t = |c: i64, e: [u32; 5]| Term { coefficient: c, exponents: e.to_vec() };
    PolySystem::new(
        (1..=5).map(|i| format!("a{i}")).collect(),
        vec![
            Polynomial { terms: vec![t(-1, [1, 0, 0, 2, 0]), t(1, [0, 2, 0, 0, 0])] },
            Polynomial { terms: vec![t(-1, [1, 0, 0, 0, 2]), t(1, [0, 0, 2, 0, 0])] },
        ],
    )
    .expect("builtin is well formed")
}

/// Loads a document or a `builtin:` name.
pub fn load_system(source: &str) -> Result<PolySystem, VarietyError> {
    if source.starts_with("builtin:") {
        PolySystem::builtin(source)
    } else {
        PolySystem::from_json_str(source)
    }
}

/// A polynomial with coefficients reduced mod `p`.
struct Reduced {
    terms: Vec<(u64, Vec<(usize, u32)>)>,
}

fn reduce(system: &PolySystem, p: u64) -> Vec<Reduced> {
    system
        .polys
        .iter()
        .map(|poly| Reduced {
            terms: poly
                .terms
                .iter()
                .map(|t| {
                    let c = t.coefficient.rem_euclid(p as i64) as u64;
                    let vars = t.exponents.iter().copied().enumerate().filter(|&(_, e)| e > 0).collect();
                    (c, vars)
                })
                .filter(|(c, _)| *c != 0)
                .collect(),
        })
        .collect()
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u32, p: u64) -> u64 {
    let mut acc = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

fn vanishes(polys: &[Reduced], x: &[u64], p: u64) -> bool {
    polys.iter().all(|poly| {
        let mut s = 0u64;
        for (c, vars) in &poly.terms {
            let mut v = *c;
            for &(i, e) in vars {
                v = mul_mod(v, pow_mod(x[i], e, p), p);
            }
            s = (s + v) % p;
        }
        s == 0
    })
}

/// Counts points of `F_p^k` on which every polynomial vanishes.
pub fn count_points(system: &PolySystem, p: Prime, budget: u128) -> Result<BigCount, VarietyError> {
    let k = system.var_count();
    let space = num_traits::pow(BigUint::from(p.get()), k);
    if space > BigUint::from(budget) {
        return Err(VarietyError::BudgetExceeded { search_space: space, budget });
    }
    let p = p.get();
    let polys = reduce(system, p);
    // split on the first coordinate, odometer over the rest
    let total: u64 = (0..p)
        .into_par_iter()
        .map(|x0| {
            let mut x = vec![0u64; k];
            x[0] = x0;
            let mut count = 0u64;
            loop {
                if vanishes(&polys, &x, p) {
                    count += 1;
                }
                let mut i = k;
                loop {
                    i -= 1;
                    if i == 0 {
                        return count;
                    }
                    x[i] += 1;
                    if x[i] < p {
                        break;
                    }
                    x[i] = 0;
                }
            }
        })
        .sum();
    Ok(BigCount::from(total))
}

/// `p^k`, the size of the point grid.
pub fn point_space(system: &PolySystem, p: Prime) -> BigUint {
    let mut s = BigUint::one();
    for _ in 0..system.var_count() {
        s *= p.get();
    }
    s
}

/// The two-branch count of the builtin pair system: `p³` at 2, else
/// `2p³ - 3p² + 3p - 1`.
pub fn qp_pair_expected(p: Prime) -> BigCount {
    let q = p.get() as u128;
    if q == 2 {
        BigCount::from(8u64)
    } else {
        BigCount::from(2 * q.pow(3) - 3 * q * q + 3 * q - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: u64) -> Prime {
        Prime::new(x).unwrap()
    }

    fn single(coeffs: &[(i64, &[u32])], k: usize) -> PolySystem {
        PolySystem::new(
            (0..k).map(|i| format!("x{i}")).collect(),
            vec![Polynomial {
                terms: coeffs.iter().map(|(c, e)| Term { coefficient: *c, exponents: e.to_vec() }).collect(),
            }],
        )
        .unwrap()
    }

    /// Independent oracle: enumerate with i128 arithmetic, no modular tricks.
    fn naive(system: &PolySystem, q: i128) -> u64 {
        let k = system.var_count();
        let total = q.pow(k as u32);
        let mut n = 0;
        for idx in 0..total {
            let x: Vec<i128> = (0..k).map(|i| (idx / q.pow(i as u32)) % q).collect();
            let ok = system.polys().iter().all(|poly| {
                let s: i128 = poly
                    .terms
                    .iter()
                    .map(|t| {
                        t.coefficient as i128
                            * t.exponents.iter().zip(&x).map(|(&e, &xi)| xi.pow(e)).product::<i128>()
                    })
                    .sum();
                s.rem_euclid(q) == 0
            });
            n += ok as u64;
        }
        n
    }

    #[test]
    fn trivial_systems() {
        for q in [2, 3, 5, 7] {
            assert_eq!(count_points(&single(&[(1, &[1])], 1), p(q), DEFAULT_POINT_BUDGET).unwrap(), 1);
            assert_eq!(count_points(&single(&[(1, &[0, 0])], 2), p(q), DEFAULT_POINT_BUDGET).unwrap(), 0);
            let zero = PolySystem::new(vec!["x".into(), "y".into()], vec![Polynomial { terms: vec![] }]).unwrap();
            assert_eq!(count_points(&zero, p(q), DEFAULT_POINT_BUDGET).unwrap(), q * q);
            // x·y - 1: the q - 1 units
            let hyper = single(&[(1, &[1, 1]), (-1, &[0, 0])], 2);
            assert_eq!(count_points(&hyper, p(q), DEFAULT_POINT_BUDGET).unwrap(), q - 1);
        }
    }

    #[test]
    fn qp_pair_counts() {
        let s = PolySystem::builtin("builtin:qp-pair").unwrap();
        assert_eq!(s.var_count(), 5);
        for q in [2u64, 3, 5, 7, 11, 13] {
            assert_eq!(count_points(&s, p(q), DEFAULT_POINT_BUDGET).unwrap(), qp_pair_expected(p(q)));
        }
        assert_eq!(count_points(&s, p(3), DEFAULT_POINT_BUDGET).unwrap(), 35);
        assert_eq!(naive(&s, 3), 35);
    }

    #[test]
    fn budget_is_enforced() {
        let s = PolySystem::builtin("qp-pair").unwrap();
        let err = count_points(&s, p(3), 100).unwrap_err();
        assert_eq!(err, VarietyError::BudgetExceeded { search_space: BigUint::from(243u32), budget: 100 });
    }

    #[test]
    fn documents() {
        let s = load_system(r#"{"vars":["x","y"],"polys":[[[1,[1,1]],[-1,[0,0]]]]}"#).unwrap();
        assert_eq!(s.var_count(), 2);
        assert_eq!(s.polys(), single(&[(1, &[1, 1]), (-1, &[0, 0])], 2).polys());
        assert_eq!(s.vars(), ["x", "y"]);

        let bad = [
            (r#"{"vars":["x","y"],"polys":[[[1,[1]]]]}"#, "polys[0][0][1]"),
            (r#"{"vars":["x"],"polys":[[[1,[1]]]],"extra":1}"#, "extra"),
            (r#"{"vars":["x"],"polys":[]}"#, "polys"),
            (r#"{"vars":["x"],"polys":[[[1.5,[1]]]]}"#, "polys[0][0][0]"),
            (r#"{"vars":["x"],"polys":[[[1,[-1]]]]}"#, "polys[0][0][1][0]"),
            (r#"{"vars":[],"polys":[[[1,[]]]]}"#, "vars"),
            (r#"{"polys":[[[1,[1]]]]}"#, "vars"),
        ];
        for (doc, pos) in bad {
            match load_system(doc) {
                Err(VarietyError::Schema { position, .. }) => assert_eq!(position, pos, "{doc}"),
                other => panic!("{doc}: {other:?}"),
            }
        }
        assert!(matches!(load_system("builtin:nope"), Err(VarietyError::UnknownBuiltin(_))));
    }

    fn arb_system() -> impl Strategy<Value = PolySystem> {
        (1usize..=3).prop_flat_map(|k| {
            let term = (-5i64..=5, proptest::collection::vec(0u32..=3, k))
                .prop_map(|(c, e)| Term { coefficient: c, exponents: e });
            let poly = proptest::collection::vec(term, 0..4).prop_map(|terms| Polynomial { terms });
            proptest::collection::vec(poly, 1..3)
                .prop_map(move |polys| PolySystem::new((0..k).map(|i| format!("x{i}")).collect(), polys).unwrap())
        })
    }

    proptest! {
        #[test]
        fn matches_naive_enumeration(s in arb_system(), q in prop::sample::select(vec![2u64, 3, 5])) {
            prop_assert_eq!(count_points(&s, p(q), DEFAULT_POINT_BUDGET).unwrap(), naive(&s, q as i128));
        }

        #[test]
        fn adding_a_polynomial_never_increases(s in arb_system(), extra in arb_system(), q in prop::sample::select(vec![2u64, 3, 5])) {
            prop_assume!(extra.var_count() == s.var_count());
            let before = count_points(&s, p(q), DEFAULT_POINT_BUDGET).unwrap();
            let after = count_points(&s.clone().with_poly(extra.polys()[0].clone()).unwrap(), p(q), DEFAULT_POINT_BUDGET).unwrap();
            prop_assert!(after.0 <= before.0);
        }
    }
}
