//! Energy-efficient joint power and rate control for shared-spectrum
//! uplinks.
//!
//! Users on a common band pick transmit power and rate selfishly to
//! maximize bits-per-joule, each under a mean packet-delay bound. This
//! crate computes everything that story needs, closed-form first and
//! oracle-checked:
//!
//! - [`efficiency`]: packet success curves f(γ) and the efficiency-optimal
//!   SIR γ* (the root of f(γ) = γ·f'(γ)).
//! - [`queueing`]: the M/G/1-with-ARQ delay model, the delay-feasibility
//!   region, and a Monte-Carlo simulator validating the closed forms.
//! - [`game`]: the SIR model, utilities, the Pareto-dominant rate Ω*, user
//!   sizes Φ*, the closed-form Nash equilibrium, and a best-response
//!   iteration that independently reproduces (or refutes) it.
//! - [`admission`]: who to admit when the size budget ΣΦ* < 1 cannot fit
//!   everyone — exact subset search and the class-level closed forms.
//!
//! All quantities are SI (Hz, seconds, Watts, bits/second) and all SIRs
//! are linear ratios; dB belongs to presentation layers.

pub mod admission;
pub mod efficiency;
pub mod error;
pub mod game;
pub mod queueing;
mod solve;

pub use error::{Error, Result};
