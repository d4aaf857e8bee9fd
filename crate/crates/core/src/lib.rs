//! Exact invariant-function calculus for the Lie algebras gl(n, F_q) and
//! u(2n, F_{q^2}).
//!
//! The crate provides, all in exact rational arithmetic:
//!
//! - finite fields F_{p^e} and dense matrices over them ([`field`], [`matrix`]);
//! - partitions and Hall-Littlewood symmetric functions with both Pieri
//!   coefficient families ([`partition`], [`symfunc`]);
//! - adjoint-orbit classification and the bordered-matrix edge counts of the
//!   two branching graphs ([`orbit`]);
//! - parabolic induction and restriction for invariant functions, with the
//!   Mackey-identity verifier ([`parabolic`]);
//! - the graded product/coproduct structure on the tower of gl invariant
//!   functions and the twisted module/comodule structure on the unitary
//!   tower ([`bimodule`]);
//! - branching graphs, similarity gauges and harmonicity checks ([`graphs`]);
//! - positive harmonic functionals, including the mixing construction
//!   ([`harmonic`]).

pub mod bimodule;
pub mod error;
pub mod field;
pub mod fqpoly;
pub mod graphs;
pub mod harmonic;
pub mod matrix;
pub mod orbit;
pub mod parabolic;
pub mod partition;
pub mod ratio;
pub mod ratpoly;
pub mod symfunc;
pub mod unitary;

pub use error::{Error, Result};
pub use field::{Fe, FieldSpec};
pub use matrix::{anti_diagonal_j, jordan_type, membership, Matrix, SpaceKind};
pub use orbit::{OrbitLabel, OrbitTable};
pub use partition::Partition;

/// Configure the global worker pool for the brute-force sweeps. A no-op
/// error is returned when the pool was already initialized.
pub fn configure_threads(threads: usize) -> std::result::Result<(), String> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}
