//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL line
//! with the exact mismatches it found.

use std::time::Instant;

use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use subring_core::census::{count_subgroups_direct, g_alpha_search_space};
use subring_core::fitfind::{classify, probe_polynomiality, ProbeTarget, SamplePoint, Verdict};
use subring_core::formulas::{
    corollary_compositions, corollary_term_sum, eval_formula, g_alpha_formula, p_binomial,
    zeta_local_coefficients, FormulaId, FormulaName,
};
use subring_core::lattice::{col_span_contains, HnfMatrix};
use subring_core::types::first_primes;
use subring_core::varieties::{count_points, qp_pair_expected, PolySystem, DEFAULT_POINT_BUDGET};
use subring_core::{compositions, BigCount, Census, CensusConfig, Composition, PairSubset, Pins, Prime};

/// Criteria known to fail. The stored closed form for `g_n(p^{n+2})` is
/// transcribed term for term and disagrees with exhaustive counts for
/// `n >= 4`; see the README.
const KNOWN_FAILING: &[u32] = &[4];

type Check = Result<String, Vec<String>>;

fn p(x: u64) -> Prime {
    Prime::new(x).unwrap()
}

fn alpha(s: &str) -> Composition {
    s.parse().unwrap()
}

fn census() -> Census {
    Census::new(CensusConfig::default().with_budget(100_000_000_000))
}

/// Collects `label: expected vs actual` lines for every mismatch.
#[derive(Default)]
struct Tally {
    checked: usize,
    skipped: usize,
    mismatches: Vec<String>,
}

impl Tally {
    fn eq<T: PartialEq + std::fmt::Display>(&mut self, label: impl FnOnce() -> String, expected: T, actual: T) {
        self.checked += 1;
        if expected != actual {
            self.mismatches.push(format!("{}: expected {expected}, got {actual}", label()));
        }
    }

    fn truth(&mut self, label: impl FnOnce() -> String, ok: bool) {
        self.checked += 1;
        if !ok {
            self.mismatches.push(label());
        }
    }

    fn finish(self) -> Check {
        if self.mismatches.is_empty() {
            let skipped = if self.skipped > 0 { format!(", {} over budget skipped", self.skipped) } else { String::new() };
            Ok(format!("{} checks{skipped}", self.checked))
        } else {
            Err(self.mismatches)
        }
    }
}

fn worked_example(c: &Census) -> Check {
    let mut t = Tally::default();
    for q in [2, 3, 5, 7, 11] {
        t.eq(|| format!("g_(3,2)({q})"), BigCount::from(q), c.g_alpha(&alpha("3,2"), p(q)).unwrap());
    }
    t.finish()
}

fn basic_formulas(c: &Census) -> Check {
    let mut t = Tally::default();
    for n in 3..=5usize {
        for q in [2u64, 3, 5] {
            for e in 0..=n as u32 {
                let expected = match e {
                    e if e + 1 < n as u32 => BigCount::zero(),
                    e if e + 1 == n as u32 => BigCount::from(1u64),
                    _ => BigCount::from((q.pow(n as u32 - 1) - 1) / (q - 1)),
                };
                let id = match e {
                    e if e + 1 < n as u32 => FormulaId::new(FormulaName::GBasicELt, n as i64).with_e(e as i64),
                    e if e + 1 == n as u32 => FormulaId::new(FormulaName::GBasicNMinus1, n as i64),
                    _ => FormulaId::new(FormulaName::GBasicN, n as i64),
                };
                let brute = c.g_n(n, e, p(q)).unwrap();
                t.eq(|| format!("g_{n}({q}^{e}) brute"), expected.clone(), brute);
                t.eq(|| format!("{} at {q}", id.label()), expected, eval_formula(&id, p(q)).unwrap());
            }
        }
    }
    t.finish()
}

fn g_n_closed_form(c: &Census, name: FormulaName, shift: u32, grid: &[(usize, &[u64])]) -> Check {
    let mut t = Tally::default();
    for &(n, primes) in grid {
        for &q in primes {
            let id = FormulaId::new(name, n as i64);
            t.eq(
                || format!("{} at p = {q} (brute vs formula)", id.label()),
                c.g_n(n, n as u32 + shift, p(q)).unwrap(),
                eval_formula(&id, p(q)).unwrap(),
            );
        }
    }
    t.finish()
}

/// Every composition of length `n - 1` holding the given non-one parts at
/// 1-based positions.
fn placed(n: usize, parts: &[(usize, u32)]) -> Composition {
    let mut v = vec![1u32; n - 1];
    for &(pos, x) in parts {
        v[pos - 1] = x;
    }
    Composition::new(v).unwrap()
}

fn lemmas(c: &Census) -> Check {
    const SPACE_CAP: u64 = 100_000_000;
    let mut cases: Vec<(FormulaId, Composition)> = Vec::new();
    for n in 2..=6usize {
        let ni = n as i64;
        cases.push((FormulaId::new(FormulaName::LemmaBeta4, ni), placed(n, &[(1, 4)])));
        for beta in 2..=4u32 {
            for k in 2..n {
                cases.push((
                    FormulaId::new(FormulaName::Lemma2Beta, ni).with_k(k as i64).with_beta(beta as i64),
                    placed(n, &[(1, 2), (k, beta)]),
                ));
            }
            for k in 1..n.saturating_sub(1) {
                cases.push((
                    FormulaId::new(FormulaName::Lemma3Beta, ni).with_k(k as i64).with_beta(beta as i64),
                    placed(n, &[(1, 3), (k + 1, beta)]),
                ));
            }
        }
        for k in 1..n.saturating_sub(1) {
            for l in k + 1..n - 1 {
                cases.push((
                    FormulaId::new(FormulaName::Lemma222, ni).with_k(k as i64).with_l(l as i64),
                    placed(n, &[(1, 2), (k + 1, 2), (l + 1, 2)]),
                ));
            }
        }
    }
    let mut t = Tally::default();
    for (id, a) in &cases {
        for q in [2u64, 3, 5] {
            if g_alpha_search_space(a, p(q)) > BigUint::from(SPACE_CAP) {
                t.skipped += 1;
                continue;
            }
            t.eq(
                || format!("{} on {a} at p = {q}", id.label()),
                c.g_alpha(a, p(q)).unwrap(),
                eval_formula(id, p(q)).unwrap(),
            );
        }
    }
    t.finish()
}

fn corollaries(c: &Census) -> Check {
    let mut t = Tally::default();
    for cor in [FormulaName::Cor2Beta, FormulaName::Cor32, FormulaName::Cor222] {
        for n in 4..=6usize {
            for q in [2u64, 3] {
                let id = FormulaId::new(cor, n as i64);
                let closed = eval_formula(&id, p(q)).unwrap();
                t.eq(
                    || format!("{} at {q}: lemma sum", id.label()),
                    corollary_term_sum(cor, n as i64, p(q)).unwrap(),
                    closed.clone(),
                );
                let betas: &[u32] = if cor == FormulaName::Cor2Beta { &[3, 4] } else { &[2] };
                for &beta in betas {
                    let brute: BigCount =
                        corollary_compositions(cor, n, beta).iter().map(|a| c.g_alpha(a, p(q)).unwrap()).sum();
                    t.eq(|| format!("{} at {q}: brute sum, beta = {beta}", id.label()), brute, closed.clone());
                }
            }
        }
    }
    t.finish()
}

fn zeta(c: &Census) -> Check {
    let mut t = Tally::default();
    for n in 2..=4usize {
        for q in [2u64, 3, 5] {
            let series = zeta_local_coefficients(n, p(q), 6).unwrap();
            for (e, coeff) in series.into_iter().enumerate() {
                t.eq(
                    || format!("f_{n}({q}^{e}) local factor vs recurrence"),
                    coeff,
                    c.f_n_recurrence(n, e as u32, p(q)).unwrap(),
                );
            }
        }
    }
    t.finish()
}

fn recurrence_vs_direct(c: &Census) -> Check {
    let mut t = Tally::default();
    for q in [2u64, 3] {
        for e in 0..=3 {
            t.eq(
                || format!("f_3({q}^{e})"),
                c.f_n_recurrence(3, e, p(q)).unwrap(),
                c.f_n_direct(3, e, p(q)).unwrap(),
            );
        }
    }
    t.finish()
}

fn subgroups() -> Check {
    let mut t = Tally::default();
    for n in 1..=5usize {
        for e in 0..=5u32 {
            for q in [2u64, 3, 5, 7] {
                t.eq(
                    || format!("subgroups n = {n}, e = {e}, p = {q}"),
                    p_binomial(n as u32 - 1 + e, e, p(q)).unwrap(),
                    count_subgroups_direct(n, e, p(q)),
                );
            }
        }
    }
    t.finish()
}

fn quasipolynomial_example(c: &Census) -> Check {
    let mut t = Tally::default();
    let primes = first_primes(6);
    let system = PolySystem::builtin("builtin:qp-pair").unwrap();
    let mut samples = Vec::new();
    for &q in &primes {
        let count = count_points(&system, q, DEFAULT_POINT_BUDGET).unwrap();
        let expected = if q.get() == 2 {
            BigCount::from(8u64)
        } else {
            let x = q.get() as u128;
            BigCount::from(2 * x.pow(3) - 3 * x * x + 3 * x - 1)
        };
        t.eq(|| format!("qp-pair at {q}"), expected, count.clone());
        t.eq(|| format!("qp-pair closed form at {q}"), qp_pair_expected(q), count.clone());
        samples.push(SamplePoint::new(q, count));
    }
    let r = classify(&samples, 8, 12).unwrap();
    t.eq(|| "qp-pair verdict".into(), Verdict::Quasipolynomial, r.verdict);
    let split: Vec<(Vec<u64>, String)> = r
        .classes
        .iter()
        .map(|cl| {
            let shape = match (&cl.polynomial, &cl.value) {
                (Some(poly), _) => poly.to_string(),
                (None, Some(v)) => v.to_string(),
                _ => String::new(),
            };
            (cl.primes.clone(), shape)
        })
        .collect();
    let expected_split =
        vec![(vec![2], "8".to_string()), (vec![3, 5, 7, 11, 13], "2p^3 - 3p^2 + 3p - 1".to_string())];
    t.truth(|| format!("qp-pair split: expected {expected_split:?}, got {split:?}"), split == expected_split);

    let a = alpha("3,2,2,2");
    let subset = ProbeTarget::Subset { alpha: a.clone(), pairs: PairSubset::pairs([(3, 3), (4, 4)]), pins: Pins::new() };
    let r = probe_polynomiality(c, &subset, &primes, 8, 12).unwrap();
    t.eq(|| "subset census {(3,3),(4,4)} on (3,2,2,2)".into(), Verdict::Quasipolynomial, r.verdict);
    let r = probe_polynomiality(c, &ProbeTarget::GAlpha(a), &primes, 8, 12).unwrap();
    t.eq(|| "full census on (3,2,2,2)".into(), Verdict::Polynomial, r.verdict);
    t.finish()
}

fn pinned_case(c: &Census) -> Check {
    let mut t = Tally::default();
    let a = alpha("2,3,2,2");
    let pins = Pins::from([((1, 2), 0)]);
    for q in [2u64, 3, 5] {
        t.eq(
            || format!("(2,3,2,2) with a_1 = 0 at {q}"),
            BigCount::from(q.pow(3) * (2 * q - 1)),
            c.g_alpha_with(&a, p(q), &PairSubset::All, &pins).unwrap(),
        );
    }
    t.finish()
}

fn random_hnf(rng: &mut StdRng, n: usize) -> HnfMatrix {
    let mut entries = vec![0i128; n * n];
    for i in 0..n {
        let d = rng.gen_range(1..=30i128);
        entries[i * n + i] = d;
        for j in i + 1..n {
            entries[i * n + j] = rng.gen_range(0..d);
        }
    }
    HnfMatrix::new(n, entries).unwrap()
}

fn properties(c: &Census) -> Check {
    let mut t = Tally::default();

    // span membership is linear
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for trial in 0..1000 {
        let n = rng.gen_range(1..=6usize);
        let a = random_hnf(&mut rng, n);
        let x: Vec<i128> = (0..n).map(|_| rng.gen_range(-50..=50)).collect();
        let y: Vec<i128> = (0..n).map(|_| rng.gen_range(-50..=50)).collect();
        let k: i128 = rng.gen_range(-5..=5);
        let u = a.apply(&x).unwrap();
        let v = a.apply(&y).unwrap();
        let combo: Vec<i128> = u.iter().zip(&v).map(|(a, b)| a + k * b).collect();
        t.truth(|| format!("trial {trial}: A x in span"), col_span_contains(&a, &u).unwrap());
        t.truth(|| format!("trial {trial}: A x + k A y in span"), col_span_contains(&a, &combo).unwrap());
        t.truth(|| format!("trial {trial}: solve recovers x"), a.solve(&u).unwrap() == Some(x.clone()));
        // moving off the lattice along the last coordinate by less than its
        // diagonal entry leaves the span
        let d = a.get(n, n);
        if d > 1 {
            let mut w = u.clone();
            w[n - 1] += rng.gen_range(1..d);
            t.truth(|| format!("trial {trial}: perturbed vector not in span"), !col_span_contains(&a, &w).unwrap());
        }
    }

    // stripping leading ones
    for e in 1..=5u32 {
        for parts in 1..=e as usize {
            for a in compositions(e, parts) {
                let mut padded = vec![1];
                padded.extend_from_slice(a.parts());
                let padded = Composition::new(padded).unwrap();
                for q in [2u64, 3, 5] {
                    t.eq(|| format!("g_{padded} vs g_{a} at {q}"), c.g_alpha(&a, p(q)).unwrap(), c.g_alpha(&padded, p(q)).unwrap());
                    if let Some(stripped) = a.strip_leading_ones() {
                        t.eq(
                            || format!("g_{a} vs g_{stripped} at {q}"),
                            c.g_alpha(&stripped, p(q)).unwrap(),
                            c.g_alpha(&a, p(q)).unwrap(),
                        );
                    }
                }
            }
        }
    }

    // counts do not depend on the partitioning
    let targets: Vec<(Composition, PairSubset, u64)> = vec![
        (alpha("2,3,2,2"), PairSubset::All, 3),
        (alpha("3,2,2,2"), PairSubset::All, 5),
        (alpha("3,2,2,2"), PairSubset::pairs([(3, 3), (4, 4)]), 3),
        (alpha("4,1,1"), PairSubset::pairs([(2, 3)]), 5),
        (alpha("2,2,2,2"), PairSubset::All, 3),
    ];
    for (a, subset, q) in &targets {
        let reference = Census::new(CensusConfig::single_threaded()).g_alpha_with(a, p(*q), subset, &Pins::new()).unwrap();
        for threads in [1usize, 2, 7, 16] {
            let cen = Census::new(CensusConfig::default().with_threads(threads));
            t.eq(
                || format!("{a} at {q} with {threads} threads"),
                reference.clone(),
                cen.g_alpha_with(a, p(*q), subset, &Pins::new()).unwrap(),
            );
        }
    }

    // every single-pair census is polynomial at the first six primes
    let primes = first_primes(6);
    for e in 1..=6u32 {
        for parts in 1..=e as usize {
            for a in compositions(e, parts) {
                let n = a.n();
                for i in 1..=n {
                    for j in i..=n {
                        let target =
                            ProbeTarget::Subset { alpha: a.clone(), pairs: PairSubset::pairs([(i, j)]), pins: Pins::new() };
                        let r = probe_polynomiality(c, &target, &primes, 8, 12).unwrap();
                        t.eq(|| format!("single pair ({i},{j}) on {a}"), Verdict::Polynomial, r.verdict);
                        t.truth(|| format!("single pair ({i},{j}) on {a}: fit reproduces samples"), r.reproduces_samples());
                    }
                }
            }
        }
    }

    // closed forms and the dispatcher agree wherever both apply
    for e in 1..=6u32 {
        for parts in 1..=e as usize {
            for a in compositions(e, parts) {
                for q in [2u64, 3] {
                    if let Some(v) = g_alpha_formula(&a, p(q)).unwrap() {
                        t.eq(|| format!("dispatch {a} at {q}"), c.g_alpha(&a, p(q)).unwrap(), v);
                    }
                }
            }
        }
    }
    t.finish()
}

#[test]
fn acceptance() {
    let c = census();
    let criteria: Vec<(u32, &str, Box<dyn Fn() -> Check + '_>)> = vec![
        (1, "worked example g_(3,2)(p) = p", Box::new(|| worked_example(&c))),
        (2, "g_n(p^e) for e <= n", Box::new(|| basic_formulas(&c))),
        (
            3,
            "g_n(p^{n+1}) closed form",
            Box::new(|| g_n_closed_form(&c, FormulaName::GNPlus1, 1, &[(3, &[2, 3, 5]), (4, &[2, 3, 5]), (5, &[2, 3, 5])])),
        ),
        (
            4,
            "g_n(p^{n+2}) closed form",
            Box::new(|| g_n_closed_form(&c, FormulaName::GNPlus2, 2, &[(3, &[2, 3, 5]), (4, &[2, 3, 5]), (5, &[2, 3])])),
        ),
        (5, "single-diagonal closed forms", Box::new(|| lemmas(&c))),
        (6, "summed closed forms", Box::new(|| corollaries(&c))),
        (7, "local zeta factors vs recurrence", Box::new(|| zeta(&c))),
        (8, "recurrence vs direct f_3", Box::new(|| recurrence_vs_direct(&c))),
        (9, "subgroup counts", Box::new(subgroups)),
        (10, "quasipolynomial example", Box::new(|| quasipolynomial_example(&c))),
        (11, "pinned (2,3,2,2) case count", Box::new(|| pinned_case(&c))),
        (12, "property suites", Box::new(|| properties(&c))),
    ];

    let mut failing = Vec::new();
    for (id, name, check) in &criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{id:>2}] {name} ({detail}, {secs:.2}s)"),
            Err(mismatches) => {
                println!("FAIL [{id:>2}] {name} ({} mismatches, {secs:.2}s)", mismatches.len());
                for m in &mismatches {
                    println!("         {m}");
                }
                failing.push(*id);
            }
        }
    }
    assert_eq!(failing, KNOWN_FAILING, "failing criteria differ from the known set");
}
