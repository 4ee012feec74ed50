//! Stochastic sparse subspace clustering.
//!
//! Subspace clustering by sparse self-expression: each data point is written
//! as a sparse combination of the others, the coefficients induce an
//! affinity graph, and normalized-cut spectral clustering segments it. On
//! top of the plain orthogonal-matching-pursuit baseline ([`omp`]), this
//! crate adds dropout: columns of the dictionary are randomly zeroed in `T`
//! subproblems and the per-subproblem damped pursuits are averaged into a
//! consensus coefficient vector ([`consensus`]). Dropping columns is, in
//! expectation, a squared-l2 regularizer on the coefficients, which densifies
//! the solutions and repairs the affinity-graph connectivity that plain
//! sparse pursuit tends to lose.
//!
//! Modules:
//! - [`dataset`]: data matrices, synthetic union-of-subspaces generation,
//!   PCA, file formats.
//! - [`omp`]: the plain pursuit baseline.
//! - [`consensus`]: dropout masks, damped pursuit, consensus solver, and the
//!   dropout-objective equivalence pair.
//! - [`spectral`]: affinity construction, normalized Laplacian, eigensolvers,
//!   k-means, spectral clustering.
//! - [`metrics`]: clustering accuracy, subspace-preserving error, algebraic
//!   connectivity.
//!
//! All randomness flows through seeded ChaCha8 streams (see [`rng`]), so
//! every result is reproducible from a single 64-bit seed.

pub mod consensus;
pub mod dataset;
mod linalg;
pub mod metrics;
pub mod omp;
pub mod rng;
pub mod sparse;
pub mod spectral;
