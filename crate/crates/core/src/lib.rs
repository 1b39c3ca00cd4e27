//! Exact combinatorics of permutation spaces under the Kendall tau and
//! Chebyshev metrics: ball volumes, rate-distortion bounds for lossy
//! compression of rankings, and covering-code constructions.
//!
//! The crate is organized bottom-up:
//!
//! * [`perm`] — permutations, the two metrics, inversion vectors,
//!   restriction operators.
//! * [`ball`] — exact ball/sphere volumes and certified bounds.
//! * [`bounds`] — rate-distortion bounds (non-asymptotic and asymptotic)
//!   and the data grids behind the standard comparison figures.
//! * [`codes`] — covering codes: an explicit block construction, a greedy
//!   cover, and exact minimal-cover search at toy sizes.
//! * [`figures`] — tabulated curve data for the standard plots, with a
//!   CSV writer.
//! * [`verify`] — the self-check suite wiring all of the above against
//!   brute-force oracles.
//!
//! Everything that can be exact is exact (`BigUint`/`BigRational`); floats
//! appear only where a logarithm does.

pub mod ball;
pub mod bounds;
pub mod codes;
pub mod error;
pub mod figures;
pub mod numutil;
pub mod perm;
pub mod verify;

pub use error::{Error, Result};
pub use perm::{Metric, Permutation};
