//! # slitlab
//!
//! A desk-scale simulator and verifier for non-disturbing detection of
//! incompatible properties in the double-slit experiment.
//!
//! The library models a particle on a product space `H1 (x) H2`: `H1` carries
//! position (which slit, where it lands on the final screen), `H2` carries the
//! auxiliary degrees of freedom of a bank of four micromaser cavities. On top
//! of that it provides:
//!
//! - construction of all operators (slit projector, which-slit property and
//!   detector, candidate property projectors and their detectors, screens);
//! - a checker deciding whether a candidate `(layout, decomposition, K, psi)`
//!   is a genuine simultaneous non-disturbing detection of the which-slit
//!   property and an incompatible property, with per-condition residuals;
//! - closed-form solution families in dimensions 4 and 6, the two-cavity
//!   eraser setup, and the four-cavity ideal apparatus;
//! - a numerical solver that searches for new property projectors for a given
//!   state by parametrizing the linear detection constraints and driving the
//!   idempotence residual to zero;
//! - an interference lab: quantum vs. classical screen distributions,
//!   detector-selected cross terms, non-disturbance checks, and seeded
//!   Born-rule Monte Carlo sampling of detection runs.
//!
//! See the `examples/` directory for one runnable example per capability, and
//! the `slitlab` binary for file-based workflows (`verify`, `family`,
//! `search`, `simulate`, `sample`, `screen-check`).

pub mod block;
pub mod checker;
pub mod families;
pub mod interference;
pub mod io;
pub mod linalg;
pub mod operators;
pub mod sample;
pub mod screen;
pub mod solver;

pub use block::{assemble_state, BlockState, Cavity, CavityDecomposition, SlitLayout};
pub use checker::{
    check_problem, classify_correlation, conditional_probability, verify_nondisturbing,
    CheckReport, CorrelationClass, CorrelationKind, ProblemInstance, Tolerances,
};
pub use families::FamilyTag;
pub use linalg::{
    commutator, is_projector, projector_rank, tensor_product, ComplexMatrix, ComplexVector, C64,
};
pub use screen::{build_screen, ScreenKind, ScreenModel};
