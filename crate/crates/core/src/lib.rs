//! Bifinite multirelations over involutive commutative semirings.
//!
//! A relation `r: X → Y` assigns a scalar to each pair `(x, y)` such that every
//! row `r(x, −)` and every column `r(−, y)` has finite support. These form a
//! dagger category with biproducts, tensors, a compact structure and (over
//! fields, on finite carriers) dagger kernels. The crate also carries the
//! small instance categories built on the same data — partial injections,
//! bistochastic relations, Galois connections between orthomodular lattices,
//! tame formal distributions — and an exact Hadamard walk on `ℤ + ℤ`.

pub mod carrier;
pub mod error;
pub mod formaldist;
pub mod instances;
pub mod io;
pub mod kernel;
pub mod multiset;
pub mod omlattice;
pub mod random;
pub mod rel;
pub mod semiring;
pub mod walk;

pub use carrier::{BasisExtension, Carrier, Elem, Monomial};
pub use error::{Error, Result};
pub use kernel::{dagger_kernel, factor_through_kernel, gram_schmidt, left_nullspace_basis, KernelResult};
pub use multiset::FinMultiset;
pub use rel::{ClassifyOptions, Classification, Rel};
pub use semiring::{Prob, QISqrt2, QSqrt2, Semiring, Value};
