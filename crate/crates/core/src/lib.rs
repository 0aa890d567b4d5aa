//! Exact and numerical solutions of the Wegner flow equation `dH/ds = [G, H]`
//! under the Mielke generator.
//!
//! The closed forms express every matrix entry of `H(s)` through a handful of
//! finite exponential sums ("η functions") whose exponents are twice the
//! trace-centred eigenvalues of `H(0)`:
//!
//! * [`closed3`]: 2×2 and 3×3 Hermitian matrices, including phase evolution
//!   and the one-degenerate-eigenvalue branch;
//! * [`tridiag`]: N×N tridiagonal Hermitian matrices via the η-chain;
//! * [`numeric`]: an independent fixed-step RK4 integrator for any generator,
//!   used as an oracle;
//! * [`verify4`]: a residual harness for the structural relations that hold
//!   along 4×4 real symmetric flows.

pub mod closed3;
pub mod error;
pub mod exact;
pub mod expsum;
pub mod io;
pub mod matrix;
pub mod numeric;
pub mod quadrature;
pub mod spectra;
pub mod tridiag;
pub mod verify4;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use expsum::ExpSum;
pub use matrix::{ComplexMatrix, GeneratorKind, HermitianMatrix};
pub use num_complex::Complex64;
