//! Domain-aware uncertainty relations on discretized one-dimensional
//! Hilbert spaces.
//!
//! The crate computes means, uncertainties `ΔA = ‖(A − ⟨A⟩)ψ‖`, symmetrized
//! covariances `σ_AB = Re⟨Aψ, Bψ⟩ − ⟨A⟩⟨B⟩` and the imaginary cross term
//! `Im⟨Aψ, Bψ⟩` for states sampled on a line segment or on the circle, and
//! evaluates
//!
//! ```text
//! ΔA ΔB ≥ √(σ_AB² + (Im⟨Aψ, Bψ⟩)²)          valid for ψ ∈ D(A) ∩ D(B)
//! ΔA ΔB ≥ √(σ_AB² + ¼(i⟨[A, B]⟩)²)          needs ψ ∈ D(AB) ∩ D(BA)
//! ΔA ΔB ≥ ½|i⟨[A, B]⟩|
//! ```
//!
//! with every bound gated on an explicit domain diagnostic. Applying the
//! commutator forms to `ψ_m = e^{imφ}/√(2π)` with `A = φ`, `B = L_z` is the
//! standard way to "disprove" them; here that evaluation is refused with a
//! `BoundaryConditionViolated` report instead.

pub mod classical;
pub mod config;
pub mod error;
pub mod expr;
pub mod grid;
pub mod operators;
pub mod oracle;
pub mod relations;
pub mod report;
pub mod states;
pub mod stats;

pub use config::{Config, Tolerances};
pub use error::{Error, Result};
pub use grid::{inner_product, norm, normalize, refine, GridTopology, WaveFunction};
pub use operators::{
    apply, composite_domain_check, domain_check, DomainReason, DomainReport, Membership, OperatorKind, OperatorSpec,
};
pub use states::{realize, StateRecipe};
