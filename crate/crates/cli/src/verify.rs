//! The `verify` subcommand: closed forms against exhaustive counts.

use std::time::{Duration, Instant};

use serde_json::{json, Value};

use subring_core::census::count_subgroups_direct;
use subring_core::formulas::{
    corollary_compositions, corollary_term_sum, eval_formula, p_binomial, zeta_local_coefficients, FormulaId,
    FormulaName,
};
use subring_core::{BigCount, CensusError, Composition, Prime};

use crate::report::Report;
use crate::{CliError, Ctx, Suite};

enum CheckError {
    Census(CensusError),
    Other(String),
}

impl From<CensusError> for CheckError {
    fn from(e: CensusError) -> Self {
        CheckError::Census(e)
    }
}

impl From<subring_core::FormulaError> for CheckError {
    fn from(e: subring_core::FormulaError) -> Self {
        CheckError::Other(e.to_string())
    }
}

type Pair = Result<(BigCount, BigCount), CheckError>;

struct Verifier<'a> {
    ctx: &'a mut Ctx,
    deadline: Option<Instant>,
}

impl Verifier<'_> {
    /// Runs one check: `f` returns `(expected, actual)`.
    fn check(&mut self, params: Value, p: Prime, f: impl FnOnce(&Verifier) -> Pair) -> Result<(), CliError> {
        let start = Instant::now();
        let base = Report::new("verify", params.clone()).prime(p.get());
        if self.deadline.is_some_and(|d| start >= d) {
            self.ctx.status.budget = true;
            self.ctx.out.emit(&base.verdict("skipped").elapsed(start))?;
            return Ok(());
        }
        match f(self) {
            Ok((expected, actual)) => {
                let pass = expected == actual;
                if !pass {
                    self.ctx.status.mismatch = true;
                }
                let detail = json!({"expected": expected.to_string(), "actual": actual.to_string()});
                self.ctx.out.emit(
                    &base.count(&actual).verdict(if pass { "pass" } else { "fail" }).detail(detail).elapsed(start),
                )?;
            }
            Err(CheckError::Census(e)) => self.ctx.census_error("verify", &params, p, e, start)?,
            Err(CheckError::Other(msg)) => {
                self.ctx.status.mismatch = true;
                self.ctx.out.emit(&base.verdict("error").detail(json!({"error": msg})).elapsed(start))?;
            }
        }
        Ok(())
    }

    fn g_alpha(&self, a: &Composition, p: Prime) -> Result<BigCount, CheckError> {
        Ok(self.ctx.census.g_alpha(a, p)?)
    }

    fn basic(&mut self, max_n: usize, primes: &[Prime]) -> Result<(), CliError> {
        let worked: Composition = "3,2".parse().expect("valid");
        for &p in primes {
            self.check(json!({"check": "worked_example", "alpha": [3, 2]}), p, |v| {
                Ok((BigCount::from(p.get()), v.g_alpha(&worked, p)?))
            })?;
        }
        for n in 2..=max_n {
            for e in 0..=n as u32 {
                let id = match e as usize {
                    e if e + 1 < n => FormulaId::new(FormulaName::GBasicELt, n as i64).with_e(e as i64),
                    e if e + 1 == n => FormulaId::new(FormulaName::GBasicNMinus1, n as i64),
                    _ => FormulaId::new(FormulaName::GBasicN, n as i64),
                };
                for &p in primes {
                    self.check(json!({"check": id.name, "n": n, "e": e}), p, |v| {
                        Ok((eval_formula(&id, p)?, v.ctx.census.g_n(n, e, p)?))
                    })?;
                }
            }
            let id = FormulaId::new(FormulaName::GNPlus1, n as i64);
            for &p in primes {
                self.check(json!({"check": id.name, "n": n, "e": n + 1}), p, |v| {
                    Ok((eval_formula(&id, p)?, v.ctx.census.g_n(n, n as u32 + 1, p)?))
                })?;
            }
        }
        for n in 1..=max_n {
            for e in 0..=3u32 {
                for &p in primes {
                    self.check(json!({"check": "subgroups", "n": n, "e": e}), p, |_| {
                        Ok((p_binomial(n as u32 - 1 + e, e, p)?, count_subgroups_direct(n, e, p)))
                    })?;
                }
            }
        }
        Ok(())
    }

    fn lemmas(&mut self, max_n: usize, primes: &[Prime]) -> Result<(), CliError> {
        let place = |n: usize, parts: &[(usize, u32)]| {
            let mut v = vec![1u32; n - 1];
            for &(pos, x) in parts {
                v[pos - 1] = x;
            }
            Composition::new(v).expect("positive parts")
        };
        let mut cases = Vec::new();
        for n in 2..=max_n {
            let ni = n as i64;
            cases.push((FormulaId::new(FormulaName::LemmaBeta4, ni), place(n, &[(1, 4)])));
            for beta in 2..=4u32 {
                for k in 2..n {
                    cases.push((
                        FormulaId::new(FormulaName::Lemma2Beta, ni).with_k(k as i64).with_beta(beta as i64),
                        place(n, &[(1, 2), (k, beta)]),
                    ));
                }
                for k in 1..n.saturating_sub(1) {
                    cases.push((
                        FormulaId::new(FormulaName::Lemma3Beta, ni).with_k(k as i64).with_beta(beta as i64),
                        place(n, &[(1, 3), (k + 1, beta)]),
                    ));
                }
            }
            for k in 1..n.saturating_sub(1) {
                for l in k + 1..n - 1 {
                    cases.push((
                        FormulaId::new(FormulaName::Lemma222, ni).with_k(k as i64).with_l(l as i64),
                        place(n, &[(1, 2), (k + 1, 2), (l + 1, 2)]),
                    ));
                }
            }
        }
        for (id, a) in &cases {
            let params = json!({"check": id.name, "formula": id, "alpha": a.parts()});
            for &p in primes {
                self.check(params.clone(), p, |v| Ok((eval_formula(id, p)?, v.g_alpha(a, p)?)))?;
            }
        }
        for cor in [FormulaName::Cor2Beta, FormulaName::Cor32, FormulaName::Cor222] {
            let lo = if cor == FormulaName::Cor222 { 4 } else { 3 };
            for n in lo..=max_n {
                let id = FormulaId::new(cor, n as i64);
                for &p in primes {
                    self.check(json!({"check": cor, "n": n, "against": "lemma_sum"}), p, |_| {
                        Ok((eval_formula(&id, p)?, corollary_term_sum(cor, n as i64, p)?))
                    })?;
                    let beta = if cor == FormulaName::Cor2Beta { 3 } else { 2 };
                    self.check(json!({"check": cor, "n": n, "against": "brute_force"}), p, |v| {
                        let mut total = BigCount::zero();
                        for a in corollary_compositions(cor, n, beta) {
                            total += &v.g_alpha(&a, p)?;
                        }
                        Ok((eval_formula(&id, p)?, total))
                    })?;
                }
            }
        }
        for n in 3..=max_n {
            let id = FormulaId::new(FormulaName::GNPlus2, n as i64);
            for &p in primes {
                self.check(json!({"check": id.name, "n": n, "e": n + 2}), p, |v| {
                    Ok((eval_formula(&id, p)?, v.ctx.census.g_n(n, n as u32 + 2, p)?))
                })?;
            }
        }
        Ok(())
    }

    fn zeta(&mut self, max_n: usize, primes: &[Prime], max_e: usize) -> Result<(), CliError> {
        for n in 2..=max_n.min(4) {
            for &p in primes {
                let series = match zeta_local_coefficients(n, p, max_e) {
                    Ok(s) => s,
                    Err(e) => return Err(e.into()),
                };
                for (e, coeff) in series.into_iter().enumerate() {
                    self.check(json!({"check": "zeta_local_factor", "n": n, "e": e}), p, |v| {
                        Ok((coeff, v.ctx.census.f_n_recurrence(n, e as u32, p)?))
                    })?;
                }
            }
        }
        if max_n >= 3 {
            for &p in primes {
                for e in 0..=3u32 {
                    self.check(json!({"check": "f_n_direct", "n": 3, "e": e}), p, |v| {
                        Ok((v.ctx.census.f_n_recurrence(3, e, p)?, v.ctx.census.f_n_direct(3, e, p)?))
                    })?;
                }
            }
        }
        Ok(())
    }
}

pub fn run(
    ctx: &mut Ctx,
    suite: Suite,
    max_n: usize,
    primes: &[Prime],
    max_e: usize,
    budget_seconds: Option<f64>,
) -> Result<(), CliError> {
    if max_n < 2 {
        return Err(CliError::Usage("--max-n must be at least 2".into()));
    }
    let deadline = match budget_seconds {
        Some(s) if !(s.is_finite() && s >= 0.0) => {
            return Err(CliError::Usage("--budget-seconds must be a nonnegative number".into()))
        }
        Some(s) => Some(Instant::now() + Duration::from_secs_f64(s)),
        None => None,
    };
    let mut v = Verifier { ctx, deadline };
    if matches!(suite, Suite::Basic | Suite::All) {
        v.basic(max_n, primes)?;
    }
    if matches!(suite, Suite::Lemmas | Suite::All) {
        v.lemmas(max_n, primes)?;
    }
    if matches!(suite, Suite::Zeta | Suite::All) {
        v.zeta(max_n, primes, max_e)?;
    }
    Ok(())
}
