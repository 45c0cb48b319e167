//! Searches for primes `p` dividing the special Harmonic numbers
//! `H_{floor(p/N)}` for `N` = 2 through 46.
//!
//! The crate is organized around the way such a residue can be obtained:
//!
//! - [`modmath`] — modular exponentiation, single and batch inversion,
//!   Jacobi symbols, and small fixed-dimension matrix powers over moduli
//!   up to `p²`.
//! - [`quotients`] — Fermat quotients, Lucas-sequence quotients
//!   (Fibonacci, Pell, A001353, A004189), and the `Z(p)` composition
//!   used for the `N = 9` case.
//! - [`harmonic`] — the residue `H_{floor(p/N)} mod p` by closed-form
//!   congruence, by neighbor extension from a formula-computable case,
//!   by an accelerated direct sum, or by the definitional oracle.
//! - [`classify`] — forced-divisor rules, Wolstenholme verification,
//!   Harmonic-irregular scanning, and linear-form divisor scans over
//!   exact numerators.
//! - [`search`] — segmented, checkpointed, resumable prime-range search.
//! - [`corpus`] — the published divisor table embedded as data, with
//!   per-entry re-verification.
//! - [`report`] — hit-file parsing and report/figure-data generation.

pub mod classify;
pub mod corpus;
mod error;
pub mod harmonic;
pub mod modmath;
pub mod quotients;
pub mod report;
pub mod search;

pub use error::{Error, Result};
pub use modmath::PrimeContext;
