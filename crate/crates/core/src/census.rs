//! Exhaustive counts: `g_α(p)`, `g_n(p^e)`, `f_n(p^e)` and subgroup counts.
//!
//! Irreducible counts enumerate the free entries of an
//! [`IrreducibleTemplate`]. The default strategy walks the slots row by row
//! from the bottom of the matrix up (columns ascending inside a row) and
//! runs the back-substitution step of every enforced `v_i ∘ v_j` as soon as
//! all entries it reads are fixed; a subtree is skipped only when one of
//! those exact divisibility steps fails, so the count equals the plain
//! enumeration, which is kept as [`Strategy::Exhaustive`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{PrimInt, Signed};
use rayon::prelude::*;

use crate::error::{CensusError, InputError};
use crate::lattice::{
    build_irreducible, closure_violations, is_subring_matrix, EntryAssignment, HnfMatrix,
    IrreducibleTemplate, MAX_DIAGONAL,
};
use crate::types::{binomial, compositions, weak_compositions, BigCount, Composition, Prime};

pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

/// Which closure products `v_i ∘ v_j` are enforced.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum PairSubset {
    #[default]
    All,
    Pairs(BTreeSet<(usize, usize)>),
}

impl PairSubset {
    pub fn pairs<I: IntoIterator<Item = (usize, usize)>>(pairs: I) -> Self {
        PairSubset::Pairs(pairs.into_iter().collect())
    }

    /// Parses `i:j,k:l` (1-based column indices).
    pub fn parse(s: &str) -> Result<Self, InputError> {
        let mut out = BTreeSet::new();
        for item in s.split(',').filter(|t| !t.trim().is_empty()) {
            let (a, b) = item
                .split_once(':')
                .ok_or_else(|| InputError::Parse(format!("pair {item:?} is not of the form i:j")))?;
            let parse = |t: &str| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| InputError::Parse(format!("bad pair index {t:?}")))
            };
            out.insert((parse(a)?, parse(b)?));
        }
        Ok(PairSubset::Pairs(out))
    }

    /// Checks index bounds for dimension `n`.
    pub fn validate(&self, n: usize) -> Result<(), InputError> {
        if let PairSubset::Pairs(ps) = self {
            for &(i, j) in ps {
                if i < 1 || i > j || j > n {
                    return Err(InputError::InvalidPair(i, j));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, pair: (usize, usize)) -> bool {
        match self {
            PairSubset::All => true,
            PairSubset::Pairs(ps) => ps.contains(&pair),
        }
    }

    /// Every pair `1 <= i <= j <= n` explicitly.
    pub fn every_pair(n: usize) -> Self {
        PairSubset::Pairs((1..=n).flat_map(|i| (i..=n).map(move |j| (i, j))).collect())
    }
}

/// How irreducible assignments are visited.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Bottom-up slot order with early exit on the first failed step.
    #[default]
    Pruned,
    /// Every assignment is built and checked with `closure_violations`.
    Exhaustive,
}

/// Slot values held fixed during a count, keyed by 1-based `(row, col)`.
pub type Pins = BTreeMap<(usize, usize), u64>;

#[derive(Clone, Debug)]
pub struct CensusConfig {
    /// Cap on the number of assignments a single count may visit.
    pub budget: u128,
    /// Worker threads; 1 runs on the calling thread.
    pub threads: usize,
    /// Number of chunks the leading slots are split into. Defaults to a
    /// multiple of `threads`.
    pub partitions: Option<usize>,
    pub strategy: Strategy,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            budget: DEFAULT_BUDGET,
            threads: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            partitions: None,
            strategy: Strategy::Pruned,
            cancel: None,
        }
    }
}

impl CensusConfig {
    pub fn single_threaded() -> Self {
        CensusConfig { threads: 1, ..Default::default() }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_partitions(mut self, k: usize) -> Self {
        self.partitions = Some(k.max(1));
        self
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    fn partition_count(&self) -> usize {
        self.partitions.unwrap_or(if self.threads <= 1 { 1 } else { self.threads * 16 })
    }

    fn cancelled(&self) -> bool {
        self.cancel.as_ref().is_some_and(|c| c.load(Ordering::Relaxed))
    }

    fn check_budget(&self, search_space: &BigUint) -> Result<(), CensusError> {
        if *search_space > BigUint::from(self.budget) {
            Err(CensusError::BudgetExceeded { search_space: search_space.clone(), budget: self.budget })
        } else {
            Ok(())
        }
    }
}

/// Entry point for all exhaustive counts. Holds the worker pool.
pub struct Census {
    config: CensusConfig,
    pool: Option<rayon::ThreadPool>,
}

impl Default for Census {
    fn default() -> Self {
        Census::new(CensusConfig::default())
    }
}

impl Census {
    pub fn new(config: CensusConfig) -> Self {
        let pool = (config.threads > 1).then(|| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(config.threads)
                .build()
                .expect("thread pool")
        });
        Census { config, pool }
    }

    pub fn config(&self) -> &CensusConfig {
        &self.config
    }

    /// Sums `chunk(c)` over `0..chunks`, on the pool when there is one.
    fn sum_chunks<F>(&self, chunks: usize, chunk: F) -> Result<u128, CensusError>
    where
        F: Fn(usize) -> Result<u128, CensusError> + Sync + Send,
    {
        match &self.pool {
            Some(pool) => pool.install(|| {
                (0..chunks).into_par_iter().map(&chunk).try_reduce(|| 0, |a, b| Ok(a + b))
            }),
            None => (0..chunks).map(chunk).try_fold(0u128, |a, r| Ok(a + r?)),
        }
    }

    /// `g_α(p)`: irreducible subring matrices with diagonal `(p^{e_1}, …, 1)`.
    pub fn g_alpha(&self, alpha: &Composition, p: Prime) -> Result<BigCount, CensusError> {
        self.g_alpha_with(alpha, p, &PairSubset::All, &Pins::new())
    }

    /// Counts assignments for `alpha` at `p` whose closure violations avoid
    /// `subset`, with the slots in `pins` held at the given values.
    pub fn g_alpha_with(
        &self,
        alpha: &Composition,
        p: Prime,
        subset: &PairSubset,
        pins: &Pins,
    ) -> Result<BigCount, CensusError> {
        let template = IrreducibleTemplate::new(alpha.clone());
        subset.validate(template.n())?;
        let levels = Levels::new(&template, p, pins)?;
        self.config.check_budget(&levels.search_space())?;
        let count = match self.config.strategy {
            Strategy::Exhaustive => self.exhaustive_irreducible(&template, &levels, p, subset)?,
            Strategy::Pruned => {
                if fits_i64(&levels) {
                    self.pruned::<i64>(&levels, subset)?
                } else {
                    self.pruned::<i128>(&levels, subset)?
                }
            }
        };
        Ok(BigCount::from(count))
    }

    fn exhaustive_irreducible(
        &self,
        template: &IrreducibleTemplate,
        levels: &Levels,
        p: Prime,
        subset: &PairSubset,
    ) -> Result<u128, CensusError> {
        let radices: Vec<u64> = levels.slots.iter().map(|l| l.values.len() as u64).collect();
        let space = MixedRadix::new(radices);
        let chunks = self.config.partition_count();
        self.sum_chunks(chunks, |c| {
            let mut count = 0u128;
            let mut digits = vec![0u64; space.len()];
            for idx in space.chunk(c, chunks) {
                if idx % 4096 == 0 && self.config.cancelled() {
                    return Err(CensusError::Cancelled);
                }
                space.decode(idx, &mut digits);
                let mut asg = EntryAssignment::new();
                for (l, &d) in levels.slots.iter().zip(&digits) {
                    asg.values.insert((l.row, l.col), l.values[d as usize]);
                }
                let a = build_irreducible(template, &asg, p)?;
                let violated = closure_violations(&a);
                if violated.iter().all(|&pair| !subset.contains(pair)) {
                    count += 1;
                }
            }
            Ok(count)
        })
    }

    fn pruned<T: Entry>(&self, levels: &Levels, subset: &PairSubset) -> Result<u128, CensusError> {
        let search = PrunedSearch::<T>::new(levels, subset);
        let chunks = self.config.partition_count();
        // Split over the smallest prefix of levels with at least `chunks`
        // combined values; each prefix assignment is one unit of work.
        let mut prefix_len = 0;
        let mut prefix_size = 1u64;
        while prefix_len < levels.slots.len() && prefix_size < chunks as u64 {
            prefix_size = prefix_size.saturating_mul(levels.slots[prefix_len].values.len() as u64);
            prefix_len += 1;
        }
        let prefix = MixedRadix::new(
            levels.slots[..prefix_len].iter().map(|l| l.values.len() as u64).collect(),
        );
        self.sum_chunks(chunks, |c| {
            let mut state = search.fresh_state();
            let mut digits = vec![0u64; prefix_len];
            let mut count = 0u128;
            for idx in prefix.chunk(c, chunks) {
                if self.config.cancelled() {
                    return Err(CensusError::Cancelled);
                }
                prefix.decode(idx, &mut digits);
                if search.assign_prefix(&mut state, &digits) {
                    count += search.descend(&mut state, prefix_len, &self.config)?;
                }
            }
            Ok(count)
        })
    }

    /// `g_n(p^e) = Σ_{α ∈ C_{n,e}} g_α(p)`. For `n = 1` the only
    /// irreducible subring is `Z` itself, at `e = 0`.
    pub fn g_n(&self, n: usize, e: u32, p: Prime) -> Result<BigCount, CensusError> {
        if n == 0 {
            return Err(InputError::InvalidMatrix("g_n needs n >= 1".into()).into());
        }
        if n == 1 {
            return Ok(BigCount::from((e == 0) as u64));
        }
        let comps = compositions(e, n - 1);
        let total: BigUint = comps
            .iter()
            .map(|a| IrreducibleTemplate::new(a.clone()).search_space(p))
            .sum();
        self.config.check_budget(&total)?;
        let mut sum = BigCount::zero();
        for alpha in &comps {
            sum += &self.g_alpha(alpha, p)?;
        }
        Ok(sum)
    }

    /// `f_n(p^e)` from irreducible counts via Liu's recurrence
    /// `f_n(p^e) = Σ_i Σ_j C(n-1, j-1) f_{n-j}(p^{e-i}) g_j(p^i)`,
    /// memoized within this call.
    pub fn f_n_recurrence(&self, n: usize, e: u32, p: Prime) -> Result<BigCount, CensusError> {
        let mut memo = RecurrenceMemo::default();
        self.f_rec(n, e, p, &mut memo)
    }

    fn f_rec(&self, n: usize, e: u32, p: Prime, memo: &mut RecurrenceMemo) -> Result<BigCount, CensusError> {
        if n == 0 {
            return Ok(BigCount::from((e == 0) as u64));
        }
        if let Some(v) = memo.f.get(&(n, e)) {
            return Ok(v.clone());
        }
        let mut total = BigUint::from(0u32);
        for i in 0..=e {
            for j in 1..=n {
                let g = match memo.g.get(&(j, i)) {
                    Some(g) => g.clone(),
                    None => {
                        let g = self.g_n(j, i, p)?;
                        memo.g.insert((j, i), g.clone());
                        g
                    }
                };
                if g.0 == BigUint::from(0u32) {
                    continue;
                }
                let f = self.f_rec(n - j, e - i, p, memo)?;
                total += binomial(n as u64 - 1, j as u64 - 1) * f.0 * g.0;
            }
        }
        let v = BigCount(total);
        memo.f.insert((n, e), v.clone());
        Ok(v)
    }

    /// `f_n(p^e)` by enumerating every HNF matrix of determinant `p^e` and
    /// testing the subring conditions directly.
    pub fn f_n_direct(&self, n: usize, e: u32, p: Prime) -> Result<BigCount, CensusError> {
        if n == 0 {
            return Ok(BigCount::from((e == 0) as u64));
        }
        let diagonals = weak_compositions(e, n);
        let mut total_space = BigUint::from(0u32);
        for d in &diagonals {
            let exp: u32 = d.iter().enumerate().map(|(i, &di)| di * (n - 1 - i) as u32).sum();
            total_space += p.pow_big(exp);
        }
        self.config.check_budget(&total_space)?;
        let too_big = || CensusError::from(InputError::InvalidMatrix("diagonal exceeds 2^32".into()));
        let mut count = 0u128;
        for d in &diagonals {
            let diag: Vec<i128> = d
                .iter()
                .map(|&di| p.checked_pow(di).filter(|&v| v < MAX_DIAGONAL).ok_or_else(too_big))
                .collect::<Result<_, _>>()?;
            let mut radices = Vec::new();
            for i in 0..n {
                for _ in i + 1..n {
                    radices.push(diag[i] as u64);
                }
            }
            let space = MixedRadix::new(radices);
            let chunks = self.config.partition_count();
            count += self.sum_chunks(chunks, |c| {
                let mut digits = vec![0u64; space.len()];
                let mut hits = 0u128;
                for idx in space.chunk(c, chunks) {
                    if idx % 4096 == 0 && self.config.cancelled() {
                        return Err(CensusError::Cancelled);
                    }
                    space.decode(idx, &mut digits);
                    let mut entries = vec![0i128; n * n];
                    let mut k = 0;
                    for i in 0..n {
                        entries[i * n + i] = diag[i];
                        for j in i + 1..n {
                            entries[i * n + j] = digits[k] as i128;
                            k += 1;
                        }
                    }
                    let a = HnfMatrix::new(n, entries)?;
                    if is_subring_matrix(&a) {
                        hits += 1;
                    }
                }
                Ok(hits)
            })?;
        }
        Ok(BigCount::from(count))
    }
}

#[derive(Default)]
struct RecurrenceMemo {
    f: HashMap<(usize, u32), BigCount>,
    g: HashMap<(usize, u32), BigCount>,
}

/// Number of HNF matrices of determinant `p^e` in dimension `n`:
/// `Σ_{d_1+…+d_n = e} Π_i p^{d_i (n-i)}`, no closure conditions.
pub fn count_subgroups_direct(n: usize, e: u32, p: Prime) -> BigCount {
    if n == 0 {
        return BigCount::from((e == 0) as u64);
    }
    let total = weak_compositions(e, n)
        .into_iter()
        .map(|d| {
            let exp: u32 = d.iter().enumerate().map(|(i, &di)| di * (n - 1 - i) as u32).sum();
            p.pow_big(exp)
        })
        .sum();
    BigCount(total)
}

/// Mixed-radix index space; digit 0 is most significant.
struct MixedRadix {
    radices: Vec<u64>,
    size: u64,
}

impl MixedRadix {
    fn new(radices: Vec<u64>) -> Self {
        let size = radices.iter().product();
        MixedRadix { radices, size }
    }

    fn len(&self) -> usize {
        self.radices.len()
    }

    fn decode(&self, mut idx: u64, digits: &mut [u64]) {
        for (d, &r) in digits.iter_mut().zip(&self.radices).rev() {
            *d = idx % r;
            idx /= r;
        }
    }

    /// Contiguous chunk `c` of `k`.
    fn chunk(&self, c: usize, k: usize) -> std::ops::Range<u64> {
        let lo = (self.size as u128 * c as u128 / k as u128) as u64;
        let hi = (self.size as u128 * (c as u128 + 1) / k as u128) as u64;
        lo..hi
    }
}

/// One enumeration level: a slot and the values it may take.
struct Level {
    row: usize,
    col: usize,
    values: Vec<u64>,
}

/// Slots in enumeration order (bottom row first, columns ascending).
struct Levels {
    m: usize,
    p: u64,
    diagonal: Vec<i128>,
    slots: Vec<Level>,
}

impl Levels {
    fn new(template: &IrreducibleTemplate, p: Prime, pins: &Pins) -> Result<Self, InputError> {
        for &(row, col) in pins.keys() {
            if template.slot_index(row, col).is_none() {
                return Err(InputError::InvalidPair(row, col));
            }
        }
        let m = template.n() - 1;
        let diagonal = template
            .alpha()
            .parts()
            .iter()
            .map(|&e| {
                p.checked_pow(e)
                    .filter(|&d| d < MAX_DIAGONAL)
                    .ok_or_else(|| InputError::InvalidMatrix("diagonal exceeds 2^32".into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut slots = Vec::new();
        for row in (1..=m).rev() {
            for col in row + 1..=m {
                let s = template.slots()[template.slot_index(row, col).expect("slot exists")];
                let bound = p.get().pow(s.range_exp);
                let values = match pins.get(&(row, col)) {
                    Some(&v) if v < bound => vec![v],
                    Some(&v) => return Err(InputError::OutOfRange { row, col, value: v, bound }),
                    None => (0..bound).collect(),
                };
                slots.push(Level { row, col, values });
            }
        }
        Ok(Levels { m, p: p.get(), diagonal, slots })
    }

    fn search_space(&self) -> BigUint {
        self.slots.iter().map(|l| BigUint::from(l.values.len())).product()
    }
}

/// Integer type used inside the pruned search.
trait Entry: PrimInt + Signed + Send + Sync {
    fn from_i128(v: i128) -> Self;
}

impl Entry for i64 {
    fn from_i128(v: i128) -> Self {
        v as i64
    }
}

impl Entry for i128 {
    fn from_i128(v: i128) -> Self {
        v
    }
}

// Intermediate values stay below about n·2^n·M^3 for largest diagonal M.
fn fits_i64(levels: &Levels) -> bool {
    let max = levels.diagonal.iter().copied().max().unwrap_or(1).max(levels.p as i128);
    let m = levels.m as u32;
    let bound = (max as f64).powi(3) * (m as f64 + 1.0) * 2f64.powi(m as i32 + 1);
    bound < 2f64.powi(62)
}

#[derive(Copy, Clone)]
struct PairStep {
    pair: usize,
    i: usize,
    j: usize,
}

struct PrunedSearch<T> {
    m: usize,
    diagonal: Vec<T>,
    /// (row, col, values) per level, 0-based row/col.
    slots: Vec<(usize, usize, Vec<T>)>,
    /// Steps to run once the level's slot is assigned.
    steps: Vec<Vec<PairStep>>,
    pair_count: usize,
}

struct SearchState<T> {
    a: Vec<T>,
    x: Vec<T>,
    nodes: u64,
}

impl<T: Entry> PrunedSearch<T> {
    fn new(levels: &Levels, subset: &PairSubset) -> Self {
        let m = levels.m;
        // Pairs touching the all-ones column always hold.
        let pairs: Vec<(usize, usize)> = (1..=m)
            .flat_map(|i| (i..=m).map(move |j| (i, j)))
            .filter(|&pr| subset.contains(pr))
            .collect();
        let slots: Vec<(usize, usize, Vec<T>)> = levels
            .slots
            .iter()
            .map(|l| {
                let vals = l
                    .values
                    .iter()
                    .map(|&v| T::from_i128(v as i128 * levels.p as i128))
                    .collect();
                (l.row - 1, l.col - 1, vals)
            })
            .collect();
        let steps = slots
            .iter()
            .map(|&(s, c, _)| {
                pairs
                    .iter()
                    .enumerate()
                    .filter(|&(_, &(i, j))| j - 1 == c && i - 1 > s)
                    .map(|(k, &(i, j))| PairStep { pair: k, i: i - 1, j: j - 1 })
                    .collect()
            })
            .collect();
        PrunedSearch {
            m,
            diagonal: levels.diagonal.iter().map(|&d| T::from_i128(d)).collect(),
            slots,
            steps,
            pair_count: pairs.len(),
        }
    }

    fn fresh_state(&self) -> SearchState<T> {
        let m = self.m;
        let mut a = vec![T::zero(); m * m];
        for i in 0..m {
            a[i * m + i] = self.diagonal[i];
        }
        SearchState { a, x: vec![T::zero(); self.pair_count * m], nodes: 0 }
    }

    /// Back-substitution step at row `s` for one pair; records `x_s`.
    #[inline]
    fn step(&self, st: &mut SearchState<T>, s: usize, ps: PairStep) -> bool {
        let m = self.m;
        let a = &st.a;
        let row = &a[s * m..(s + 1) * m];
        let (i, j) = (ps.i, ps.j);
        let mut r = row[i] * row[j];
        let x = &mut st.x[ps.pair * m..(ps.pair + 1) * m];
        for t in s + 1..i {
            r = r - row[t] * x[t];
        }
        // x_i is the pair's own entry: a_ij for i < j, a_ii for i = j.
        r = r - row[i] * a[i * m + j];
        let d = row[s];
        if r % d != T::zero() {
            return false;
        }
        x[s] = r / d;
        true
    }

    fn assign_and_check(&self, st: &mut SearchState<T>, level: usize, value: T) -> bool {
        let (s, c, _) = self.slots[level];
        st.a[s * self.m + c] = value;
        self.steps[level].iter().all(|&ps| self.step(st, s, ps))
    }

    fn assign_prefix(&self, st: &mut SearchState<T>, digits: &[u64]) -> bool {
        digits
            .iter()
            .enumerate()
            .all(|(level, &d)| self.assign_and_check(st, level, self.slots[level].2[d as usize]))
    }

    fn descend(&self, st: &mut SearchState<T>, level: usize, cfg: &CensusConfig) -> Result<u128, CensusError> {
        if level == self.slots.len() {
            return Ok(1);
        }
        st.nodes += 1;
        if st.nodes & 0xFFF == 0 && cfg.cancelled() {
            return Err(CensusError::Cancelled);
        }
        let mut count = 0u128;
        let last = level + 1 == self.slots.len();
        for k in 0..self.slots[level].2.len() {
            let v = self.slots[level].2[k];
            if self.assign_and_check(st, level, v) {
                count += if last { 1 } else { self.descend(st, level + 1, cfg)? };
            }
        }
        Ok(count)
    }
}

/// Budget needed to count `g_α(p)` exhaustively.
pub fn g_alpha_search_space(alpha: &Composition, p: Prime) -> BigUint {
    IrreducibleTemplate::new(alpha.clone()).search_space(p)
}
