//! Block representation of the two-factor Hilbert space.
//!
//! The position factor H1 has an orthonormal basis ordered slit-1 block first
//! (e_1..e_m, then r_1..r_m); the auxiliary factor H2 is split by four
//! mutually orthogonal cavity projectors A, B, C, D whose basis slots come in
//! that order. A state is stored as the per-basis-vector H2 components
//! x_1..x_m (slit-1 side) and y_1..y_m (slit-2 side), matching the column
//! layout in which all operators of this crate are written.

use crate::linalg::{ComplexMatrix, ComplexVector, C64};
use serde::{Deserialize, Serialize};
use std::ops::Range;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("state dimensions inconsistent: {0}")]
    DimMismatch(String),
    #[error("state vector is zero")]
    ZeroState,
    #[error("state violates detector compatibility: forbidden-component norm {residual:.3e}")]
    DetectorCompatViolation { residual: f64 },
    #[error("state is not normalized: norm {norm}")]
    NotNormalized { norm: f64 },
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
}

/// Symmetric-slit layout of H1: `m` basis slots behind each slit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlitLayout {
    m: usize,
}

impl SlitLayout {
    pub fn new(m: usize) -> Result<Self, StateError> {
        if m == 0 {
            return Err(StateError::DimMismatch(
                "per-slit rank m must be positive".into(),
            ));
        }
        Ok(Self { m })
    }

    /// Per-slit rank.
    pub fn m(&self) -> usize {
        self.m
    }

    /// dim(H1) = 2m.
    pub fn dim1(&self) -> usize {
        2 * self.m
    }

    /// The slit-1 localization projector: diagonal, first m slots 1, rest 0.
    pub fn slit_projector(&self) -> ComplexMatrix {
        let mut d = vec![0.0; self.dim1()];
        for v in d.iter_mut().take(self.m) {
            *v = 1.0;
        }
        ComplexMatrix::diag_real(&d)
    }
}

/// One of the four cavities of the auxiliary factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cavity {
    A,
    B,
    C,
    D,
}

impl Cavity {
    pub const ALL: [Cavity; 4] = [Cavity::A, Cavity::B, Cavity::C, Cavity::D];

    pub fn label(&self) -> &'static str {
        match self {
            Cavity::A => "A",
            Cavity::B => "B",
            Cavity::C => "C",
            Cavity::D => "D",
        }
    }
}

/// Ranks of the four orthogonal blocks A, B, C, D that split H2.
///
/// The ws marker is A+B (its outcome tags slit 1), the property marker is A+C;
/// the two commute by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CavityDecomposition {
    pub r_a: usize,
    pub r_b: usize,
    pub r_c: usize,
    pub r_d: usize,
}

impl CavityDecomposition {
    pub fn new(r_a: usize, r_b: usize, r_c: usize, r_d: usize) -> Result<Self, StateError> {
        if r_a + r_b + r_c + r_d == 0 {
            return Err(StateError::DimMismatch("cavity ranks sum to zero".into()));
        }
        Ok(Self { r_a, r_b, r_c, r_d })
    }

    /// All four cavities rank-1; the default desk-scale auxiliary space.
    pub fn uniform() -> Self {
        Self {
            r_a: 1,
            r_b: 1,
            r_c: 1,
            r_d: 1,
        }
    }

    /// dim(H2).
    pub fn dim2(&self) -> usize {
        self.r_a + self.r_b + self.r_c + self.r_d
    }

    pub fn rank(&self, cavity: Cavity) -> usize {
        match cavity {
            Cavity::A => self.r_a,
            Cavity::B => self.r_b,
            Cavity::C => self.r_c,
            Cavity::D => self.r_d,
        }
    }

    /// Basis-slot range of a cavity block, in A, B, C, D order.
    pub fn range(&self, cavity: Cavity) -> Range<usize> {
        let (start, len) = match cavity {
            Cavity::A => (0, self.r_a),
            Cavity::B => (self.r_a, self.r_b),
            Cavity::C => (self.r_a + self.r_b, self.r_c),
            Cavity::D => (self.r_a + self.r_b + self.r_c, self.r_d),
        };
        start..start + len
    }

    pub fn cavity_projector(&self, cavity: Cavity) -> ComplexMatrix {
        let mut d = vec![0.0; self.dim2()];
        for i in self.range(cavity) {
            d[i] = 1.0;
        }
        ComplexMatrix::diag_real(&d)
    }

    /// A + B: the H2 projector whose outcome marks passage through slit 1.
    pub fn ws_marker(&self) -> ComplexMatrix {
        self.cavity_projector(Cavity::A)
            .add(&self.cavity_projector(Cavity::B))
            .expect("same dims")
    }

    /// A + C: the H2 projector whose outcome marks the detected property.
    pub fn property_marker(&self) -> ComplexMatrix {
        self.cavity_projector(Cavity::A)
            .add(&self.cavity_projector(Cavity::C))
            .expect("same dims")
    }
}

/// A unit state stored in the block layout: H2 components per H1 basis slot.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockState {
    layout: SlitLayout,
    decomp: CavityDecomposition,
    x: Vec<ComplexVector>,
    y: Vec<ComplexVector>,
}

/// Assembles and normalizes a block state from its components.
///
/// With `strict_compat` set, any detector-incompatible component (a slit-1
/// component in the C/D blocks or a slit-2 component in the A/B blocks) is an
/// error instead of a reportable residual.
pub fn assemble_state(
    layout: SlitLayout,
    decomp: CavityDecomposition,
    x: Vec<ComplexVector>,
    y: Vec<ComplexVector>,
    strict_compat: bool,
) -> Result<BlockState, StateError> {
    let m = layout.m();
    let dim2 = decomp.dim2();
    if x.len() != m || y.len() != m {
        return Err(StateError::DimMismatch(format!(
            "expected {m} slit-1 and {m} slit-2 components, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    for v in x.iter().chain(y.iter()) {
        if v.dim() != dim2 {
            return Err(StateError::DimMismatch(format!(
                "component dim {} does not match dim(H2) = {dim2}",
                v.dim()
            )));
        }
    }
    let total: f64 = x.iter().chain(y.iter()).map(|v| v.norm_squared()).sum();
    if total <= 0.0 {
        return Err(StateError::ZeroState);
    }
    let scale = C64::new(1.0 / total.sqrt(), 0.0);
    let state = BlockState {
        layout,
        decomp,
        x: x.into_iter().map(|v| v.scale(scale)).collect(),
        y: y.into_iter().map(|v| v.scale(scale)).collect(),
    };
    if strict_compat {
        let residual = state.detector_compat_residual();
        if residual > 1e-12 {
            return Err(StateError::DetectorCompatViolation { residual });
        }
    }
    Ok(state)
}

impl BlockState {
    pub fn layout(&self) -> SlitLayout {
        self.layout
    }

    pub fn decomp(&self) -> CavityDecomposition {
        self.decomp
    }

    pub fn dim(&self) -> usize {
        self.layout.dim1() * self.decomp.dim2()
    }

    /// Slit-1 component x_j (0-based).
    pub fn x(&self, j: usize) -> &ComplexVector {
        &self.x[j]
    }

    /// Slit-2 component y_k (0-based).
    pub fn y(&self, k: usize) -> &ComplexVector {
        &self.y[k]
    }

    /// Cavity sub-block of x_j.
    pub fn x_block(&self, j: usize, cavity: Cavity) -> Vec<C64> {
        self.decomp
            .range(cavity)
            .map(|i| self.x[j].get(i))
            .collect()
    }

    /// Cavity sub-block of y_k.
    pub fn y_block(&self, k: usize, cavity: Cavity) -> Vec<C64> {
        self.decomp
            .range(cavity)
            .map(|i| self.y[k].get(i))
            .collect()
    }

    /// Flattens to the full column vector (x_1 .. x_m, y_1 .. y_m).
    pub fn to_vector(&self) -> ComplexVector {
        let dim2 = self.decomp.dim2();
        let mut out = ComplexVector::zeros(self.dim());
        for (j, v) in self.x.iter().enumerate() {
            for i in 0..dim2 {
                out.set(j * dim2 + i, v.get(i));
            }
        }
        let off = self.layout.m() * dim2;
        for (k, v) in self.y.iter().enumerate() {
            for i in 0..dim2 {
                out.set(off + k * dim2 + i, v.get(i));
            }
        }
        out
    }

    /// Rebuilds a block state from a full column vector.
    pub fn from_vector(
        layout: SlitLayout,
        decomp: CavityDecomposition,
        v: &ComplexVector,
        strict_compat: bool,
    ) -> Result<Self, StateError> {
        let dim2 = decomp.dim2();
        if v.dim() != layout.dim1() * dim2 {
            return Err(StateError::DimMismatch(format!(
                "vector dim {} does not match layout {} x {}",
                v.dim(),
                layout.dim1(),
                dim2
            )));
        }
        let comp = |slot: usize| {
            ComplexVector::new((0..dim2).map(|i| v.get(slot * dim2 + i)).collect())
                .unwrap_or_else(|_| ComplexVector::zeros(dim2))
        };
        let x = (0..layout.m()).map(comp).collect();
        let y = (layout.m()..layout.dim1()).map(comp).collect();
        assemble_state(layout, decomp, x, y, strict_compat)
    }

    /// Norm of the components forbidden by detector compatibility:
    /// C/D blocks of the x side and A/B blocks of the y side.
    pub fn detector_compat_residual(&self) -> f64 {
        let mut sq = 0.0;
        for j in 0..self.layout.m() {
            for cav in [Cavity::C, Cavity::D] {
                sq += self
                    .x_block(j, cav)
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum::<f64>();
            }
            for cav in [Cavity::A, Cavity::B] {
                sq += self
                    .y_block(j, cav)
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum::<f64>();
            }
        }
        sq.sqrt()
    }

    pub fn is_detector_compatible(&self, tol: f64) -> bool {
        self.detector_compat_residual() <= tol
    }

    /// The image a ws detection leaves of this state: keeps the A/B blocks of
    /// the slit-1 components and zeroes everything else.
    pub fn ws_image(&self) -> ComplexVector {
        let dim2 = self.decomp.dim2();
        let mut out = ComplexVector::zeros(self.dim());
        for j in 0..self.layout.m() {
            for cav in [Cavity::A, Cavity::B] {
                for i in self.decomp.range(cav) {
                    out.set(j * dim2 + i, self.x[j].get(i));
                }
            }
        }
        out
    }

    /// The image a property detection leaves of this state: keeps the A blocks
    /// of the slit-1 components and the C blocks of the slit-2 components.
    pub fn property_image(&self) -> ComplexVector {
        let dim2 = self.decomp.dim2();
        let m = self.layout.m();
        let mut out = ComplexVector::zeros(self.dim());
        for j in 0..m {
            for i in self.decomp.range(Cavity::A) {
                out.set(j * dim2 + i, self.x[j].get(i));
            }
            for i in self.decomp.range(Cavity::C) {
                out.set((m + j) * dim2 + i, self.y[j].get(i));
            }
        }
        out
    }

    /// Probability of the photon landing in each cavity (squared block norms).
    pub fn cavity_weights(&self) -> [f64; 4] {
        let mut w = [0.0; 4];
        for (idx, cav) in Cavity::ALL.iter().enumerate() {
            for j in 0..self.layout.m() {
                w[idx] += self
                    .x_block(j, *cav)
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum::<f64>();
                w[idx] += self
                    .y_block(j, *cav)
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum::<f64>();
            }
        }
        w
    }
}

/// Both detection images of a state, used as componentwise oracles for the
/// lifted-operator actions.
#[derive(Debug, Clone)]
pub struct ExpectedImages {
    pub ws_image: ComplexVector,
    pub property_image: ComplexVector,
}

/// Componentwise masks of the state a solution's detectors must reproduce.
///
/// Requires detector compatibility; the masks are exactly what the ws and
/// property detectors map the state to for any valid solution.
pub fn expected_images(state: &BlockState, tol: f64) -> Result<ExpectedImages, StateError> {
    let residual = state.detector_compat_residual();
    if residual > tol {
        return Err(StateError::DetectorCompatViolation { residual });
    }
    Ok(ExpectedImages {
        ws_image: state.ws_image(),
        property_image: state.property_image(),
    })
}
