//! Exact pure-dephasing dynamics of a two-level system coupled to a squeezed
//! thermal boson bath.
//!
//! The crate evaluates the closed-form decoherence factor and dephasing rates,
//! the system and bath entropy flows, and single-mode phase-space portraits,
//! and cross-checks each closed form against an independent numerical route:
//!
//! * [`decay`]: closed-form decoherence factor Γ(t) (zero temperature, high
//!   temperature and the exact thermal series) plus the rates κ and κ'.
//! * [`quadrature`]: adaptive Gauss–Kronrod oracle for the frequency integrals.
//! * [`tls`]: qubit state evolution, Bloch-vector entropy and the Born–Markov
//!   dephasing channel.
//! * [`fock`]: truncated Fock-space engine (displacement, squeezing, thermal
//!   states, Hermitian Jacobi eigensolver, von Neumann entropy, Wigner grids).
//! * [`bath`]: aggregate bath-entropy rate and the f(t, δθ) landscape.
//! * [`cli`]: the `dephasim` command-line front end.
//!
//! Units: ħ = k_B = 1. Times enter most closed forms through τ = Ω_c t.

pub mod bath;
pub mod cli;
pub mod decay;
pub mod exec;
pub mod fock;
pub mod params;
pub mod quadrature;
pub mod tls;

pub use exec::Exec;
pub use params::{BathSpectrum, ModeParams, ParamBundle, SqueezeParams, TlsParams, TlsState};
