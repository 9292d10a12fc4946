//! Subring-matrix candidates and exact column-span membership.
//!
//! Matrices are upper triangular with positive diagonal, so membership of a
//! vector `w` in the integer column span is decided by back-substitution:
//! walk the rows bottom-up, subtract the contribution of the already solved
//! coordinates and require the diagonal entry to divide what is left. No
//! rational arithmetic is involved.
//!
//! Column indices in the public API are 1-based to match the `v_i ∘ v_j`
//! notation; storage is 0-based.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;

use crate::error::InputError;
use crate::types::{Composition, Prime};

/// Upper bound on the dimension accepted by [`HnfMatrix`].
pub const MAX_DIM: usize = 16;
/// Diagonal entries must stay below this so back-substitution fits in `i128`.
pub const MAX_DIAGONAL: i128 = 1 << 32;
/// Vectors tested for span membership must stay below this in absolute value.
pub const MAX_VECTOR_ENTRY: i128 = 1 << 64;

/// An upper-triangular integer matrix in Hermite normal form:
/// `a_ii >= 1`, `0 <= a_ij < a_ii` for `i < j`, zeros below the diagonal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HnfMatrix {
    n: usize,
    entries: Vec<i128>,
}

impl HnfMatrix {
    /// Builds from row-major entries, checking the HNF invariants.
    pub fn new(n: usize, entries: Vec<i128>) -> Result<Self, InputError> {
        if n == 0 || n > MAX_DIM {
            return Err(InputError::InvalidMatrix(format!("dimension {n} outside 1..={MAX_DIM}")));
        }
        if entries.len() != n * n {
            return Err(InputError::InvalidMatrix(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        for i in 0..n {
            let d = entries[i * n + i];
            if d < 1 || d >= MAX_DIAGONAL {
                return Err(InputError::InvalidMatrix(format!(
                    "diagonal entry {d} at row {} outside [1, 2^32)",
                    i + 1
                )));
            }
            for j in 0..n {
                let a = entries[i * n + j];
                if j < i && a != 0 {
                    return Err(InputError::InvalidMatrix(format!(
                        "nonzero entry below diagonal at ({},{})",
                        i + 1,
                        j + 1
                    )));
                }
                if j > i && !(0..d).contains(&a) {
                    return Err(InputError::InvalidMatrix(format!(
                        "entry {a} at ({},{}) not reduced modulo diagonal {d}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(HnfMatrix { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1;
        }
        HnfMatrix { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry at 1-based `(row, col)`.
    pub fn get(&self, row: usize, col: usize) -> i128 {
        self.entries[(row - 1) * self.n + (col - 1)]
    }

    /// Column `j` (1-based) as a vector.
    pub fn column(&self, col: usize) -> Vec<i128> {
        (0..self.n).map(|i| self.entries[i * self.n + col - 1]).collect()
    }

    pub fn rows(&self) -> Vec<Vec<i128>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Product of the diagonal, which is the index of the spanned lattice.
    pub fn determinant(&self) -> BigUint {
        (0..self.n)
            .map(|i| BigUint::from(self.entries[i * self.n + i] as u128))
            .product()
    }

    /// `A·x` for an integer vector `x`.
    pub fn apply(&self, x: &[i128]) -> Result<Vec<i128>, InputError> {
        if x.len() != self.n {
            return Err(InputError::LengthMismatch { left: self.n, right: x.len() });
        }
        Ok((0..self.n)
            .map(|i| (i..self.n).map(|j| self.entries[i * self.n + j] * x[j]).sum())
            .collect())
    }

    /// The integer solution of `A·x = w`, if one exists.
    pub fn solve(&self, w: &[i128]) -> Result<Option<Vec<i128>>, InputError> {
        if w.len() != self.n {
            return Err(InputError::LengthMismatch { left: self.n, right: w.len() });
        }
        if let Some(v) = w.iter().find(|v| v.abs() >= MAX_VECTOR_ENTRY) {
            return Err(InputError::InvalidMatrix(format!("vector entry {v} exceeds 2^64")));
        }
        let n = self.n;
        let mut x = vec![0i128; n];
        for i in (0..n).rev() {
            let row = &self.entries[i * n..(i + 1) * n];
            let mut r = w[i];
            for j in i + 1..n {
                r -= row[j] * x[j];
            }
            let d = row[i];
            if r % d != 0 {
                return Ok(None);
            }
            x[i] = r / d;
        }
        Ok(Some(x))
    }
}

impl fmt::Debug for HnfMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

/// Componentwise product `u ∘ v`.
pub fn hadamard(u: &[i128], v: &[i128]) -> Result<Vec<i128>, InputError> {
    if u.len() != v.len() {
        return Err(InputError::LengthMismatch { left: u.len(), right: v.len() });
    }
    Ok(u.iter().zip(v).map(|(a, b)| a * b).collect())
}

/// Whether `w` lies in the integer column span of `a`.
pub fn col_span_contains(a: &HnfMatrix, w: &[i128]) -> Result<bool, InputError> {
    Ok(a.solve(w)?.is_some())
}

/// Pairs `(i, j)`, `1 <= i <= j <= n`, whose product `v_i ∘ v_j` is not in
/// the column span of `a`.
pub fn closure_violations(a: &HnfMatrix) -> BTreeSet<(usize, usize)> {
    let n = a.n();
    let cols: Vec<Vec<i128>> = (1..=n).map(|j| a.column(j)).collect();
    let mut out = BTreeSet::new();
    for i in 1..=n {
        for j in i..=n {
            let w = hadamard(&cols[i - 1], &cols[j - 1]).expect("columns share length");
            if !col_span_contains(a, &w).expect("bounded entries") {
                out.insert((i, j));
            }
        }
    }
    out
}

/// Whether `a` is a subring matrix: `(1,…,1)` and every `v_i ∘ v_j` lie in
/// the column span.
pub fn is_subring_matrix(a: &HnfMatrix) -> bool {
    let ones = vec![1i128; a.n()];
    col_span_contains(a, &ones).expect("bounded entries") && closure_violations(a).is_empty()
}

/// A free off-diagonal position `(row, col)` of an irreducible matrix,
/// 1-based, `row < col <= n - 1`. Its value `a` ranges over
/// `[0, p^range_exp)` and the matrix entry is `p·a`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub row: usize,
    pub col: usize,
    pub range_exp: u32,
}

/// The shape of an irreducible subring matrix with diagonal
/// `(p^{e_1}, …, p^{e_{n-1}}, 1)` and all-ones last column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrreducibleTemplate {
    alpha: Composition,
    slots: Vec<Slot>,
}

impl IrreducibleTemplate {
    pub fn new(alpha: Composition) -> Self {
        let m = alpha.parts().len();
        let mut slots = Vec::with_capacity(m * m.saturating_sub(1) / 2);
        for row in 1..=m {
            for col in row + 1..=m {
                slots.push(Slot { row, col, range_exp: alpha.parts()[row - 1] - 1 });
            }
        }
        IrreducibleTemplate { alpha, slots }
    }

    pub fn alpha(&self) -> &Composition {
        &self.alpha
    }

    pub fn n(&self) -> usize {
        self.alpha.n()
    }

    /// Slots in row-major order `(1,2), (1,3), …, (n-2,n-1)`.
    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn slot_index(&self, row: usize, col: usize) -> Option<usize> {
        self.slots.iter().position(|s| s.row == row && s.col == col)
    }

    /// Number of entry assignments at prime `p`.
    pub fn search_space(&self, p: Prime) -> BigUint {
        let exp: u32 = self.slots.iter().map(|s| s.range_exp).sum();
        p.pow_big(exp)
    }
}

/// Concrete values `a_ij` for the slots of a template. Slots not present
/// are read as zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EntryAssignment {
    pub values: BTreeMap<(usize, usize), u64>,
}

impl EntryAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, row: usize, col: usize, value: u64) -> Self {
        self.values.insert((row, col), value);
        self
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.values.get(&(row, col)).copied().unwrap_or(0)
    }
}

/// Assembles the irreducible matrix for `assignment` at prime `p`.
pub fn build_irreducible(
    template: &IrreducibleTemplate,
    assignment: &EntryAssignment,
    p: Prime,
) -> Result<HnfMatrix, InputError> {
    let n = template.n();
    for &(row, col) in assignment.values.keys() {
        if template.slot_index(row, col).is_none() {
            return Err(InputError::InvalidPair(row, col));
        }
    }
    let parts = template.alpha().parts();
    let too_big = || InputError::InvalidMatrix("diagonal exceeds 2^32".into());
    let mut entries = vec![0i128; n * n];
    for (i, &e) in parts.iter().enumerate() {
        entries[i * n + i] = p.checked_pow(e).filter(|&d| d < MAX_DIAGONAL).ok_or_else(too_big)?;
        entries[i * n + n - 1] = 1;
    }
    entries[n * n - 1] = 1;
    for s in template.slots() {
        let bound = p.get().pow(s.range_exp);
        let value = assignment.get(s.row, s.col);
        if value >= bound {
            return Err(InputError::OutOfRange { row: s.row, col: s.col, value, bound });
        }
        entries[(s.row - 1) * n + (s.col - 1)] = p.get() as i128 * value as i128;
    }
    HnfMatrix::new(n, entries)
}
