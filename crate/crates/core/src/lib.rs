//! Exact counting of subrings of finite index in `Z^n`.
//!
//! The crate enumerates subring matrices (Hermite normal forms whose column
//! span is closed under the componentwise product and contains the
//! all-ones vector), evaluates the known closed forms for the counting
//! functions `g_α(p)`, `g_n(p^e)`, `f_n(p^e)`, expands the local zeta
//! factors for `n <= 4`, counts `F_p`-points of small polynomial systems,
//! and classifies prime-indexed count sequences as polynomial or
//! quasipolynomial by exact interpolation.

pub mod census;
pub mod error;
pub mod fitfind;
pub mod formulas;
pub mod lattice;
pub mod types;
pub mod varieties;

pub use census::{Census, CensusConfig, PairSubset, Pins, Strategy};
pub use error::{CensusError, FitError, FormulaError, InputError, ProbeError, TargetError, VarietyError};
pub use types::{compositions, p_valuation, BigCount, Composition, CountRecord, Prime};
