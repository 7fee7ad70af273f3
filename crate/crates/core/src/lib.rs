//! Numerical toolkit for signed local models of multi-qudit states.
//!
//! The crate is organized in four layers:
//!
//! - [`qlinalg`]: dense complex Hermitian linear algebra (eigendecomposition,
//!   spectral projectors, positive/negative operator parts, tensor embedding,
//!   partial traces, symmetrized products, standard state constructors).
//! - [`lqhv`]: construction of the signed scenario distribution for an
//!   N-site, S-settings-per-site projective measurement scenario, marginal
//!   verification against quantum joint probabilities, total-variation norms,
//!   moment measures, and the analytic chain-overlap bound.
//! - [`bounds`]: closed-form upper bounds on maximal Bell-inequality
//!   violations and comparison tables against published bounds.
//! - [`bell`]: Bell functionals (CHSH, CH, Mermin-Klyshko), exact classical
//!   bounds by strategy enumeration, quantum values, violation ratios, and
//!   see-saw optimization of measurement settings.

pub mod bell;
pub mod bounds;
pub mod lqhv;
pub mod qlinalg;

pub(crate) mod util;
