//! Open Toda chains for the classical series A, B, C, D and the rational
//! Goldfish models they are dual to.
//!
//! The Toda side lives in [`toda`], the Moser gauge and its minors in
//! [`moser`], the Goldfish Hamiltonians in [`goldfish`], and the map between
//! the two gauges in [`duality`]. [`suite`] bundles the numerical checks.

pub mod duality;
pub mod error;
pub mod goldfish;
pub mod linalg;
pub mod moser;
pub mod poissonlab;
pub mod rootsys;
pub mod sampling;
pub mod suite;
pub mod toda;

pub use duality::{
    goldfish_to_toda, symplectomorphism_check, toda_to_goldfish, toda_to_moser,
    verify_duality_identities, DualityReport, MoserImage, SymplecticCheck,
};
pub use error::{Error, Result};
pub use goldfish::{
    a_from_p, goldfish_hamiltonian, goldfish_hamiltonians, p_from_a, rs_hamiltonian_a,
    signed_goldfish_hamiltonian_a, GoldfishPoint, RSCoupling,
};
pub use linalg::{ComplexMatrix, MinorSelector, C64};
pub use moser::{
    build_moser_g, build_ruijsenaars_matrix, closed_form_minor, gram_minor, minor_oracle_mk,
    moser_momentum_residual, MoserPoint, RuijsenaarsMatrixSpec,
};
pub use poissonlab::{
    commutativity_matrix, poisson_bracket, ObservableFamily, ObservableHandle, PhasePoint,
};
pub use rootsys::{build_root_datum, AlgebraType, Family, RootDatum, SimpleRoot};
pub use sampling::SeededSampler;
pub use suite::{run_verification_suite, SuiteConfig, VerificationReport};
pub use toda::{
    build_lax, equations_of_motion, hamiltonian_gradient, integrate_flow, integrate_flow_with, lax_spectrum,
    toda_hamiltonian, toda_hamiltonians, FlowScheme, LaxPair, SymplecticForm, TodaPoint,
};
