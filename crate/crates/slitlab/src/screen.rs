//! Final-screen model: a resolution of identity on the position factor.
//!
//! The screen is a unitary propagator followed by localization in bins of the
//! post-propagation basis: `J(bin) = U* P_bin U`, lifted to the product space
//! as `F(bin) = J(bin) (x) 1`. Any unitary that fails to commute with the
//! slit projector is admissible; the discrete Fourier matrix is the default
//! because it guarantees visible cross terms between the two slit blocks at
//! every dimension.

use crate::linalg::{tensor_product, ComplexMatrix, LinalgError, C64};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScreenError {
    #[error("number of bins {n_bins} does not divide the screen dimension {dim1}")]
    BadBinCount { dim1: usize, n_bins: usize },
    #[error("screen dimension must be even and positive, got {0}")]
    BadDimension(usize),
    #[error("degenerate screen: largest slit cross term {max_cross:.3e} is below {threshold:.1e}")]
    Degenerate { max_cross: f64, threshold: f64 },
    #[error("propagator is not unitary (residual {0:.3e})")]
    NotUnitary(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Propagator choice for the screen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScreenKind {
    /// Discrete Fourier matrix; cross terms are alternating and nonzero.
    Dft,
    /// Identity propagator; commutes with the slit projector, so every cross
    /// term vanishes and construction is rejected. Kept for negative tests.
    Identity,
}

impl ScreenKind {
    pub fn label(&self) -> &'static str {
        match self {
            ScreenKind::Dft => "dft",
            ScreenKind::Identity => "identity",
        }
    }
}

/// A binned screen on the position factor.
#[derive(Debug, Clone)]
pub struct ScreenModel {
    dim1: usize,
    kind: ScreenKind,
    bins: Vec<Vec<usize>>,
    bin_projectors: Vec<ComplexMatrix>,
}

/// Minimum visible slit cross term a screen must produce.
pub const CROSS_TERM_THRESHOLD: f64 = 1e-3;

fn dft_matrix(n: usize) -> ComplexMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    let mut m = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let angle = -std::f64::consts::TAU * (r as f64) * (c as f64) / (n as f64);
            m.set(r, c, C64::from_polar(scale, angle));
        }
    }
    m
}

/// Builds a screen with `n_bins` contiguous bins of equal size.
pub fn build_screen(
    dim1: usize,
    kind: ScreenKind,
    n_bins: usize,
) -> Result<ScreenModel, ScreenError> {
    if dim1 == 0 || dim1 % 2 != 0 {
        return Err(ScreenError::BadDimension(dim1));
    }
    if n_bins == 0 || dim1 % n_bins != 0 {
        return Err(ScreenError::BadBinCount { dim1, n_bins });
    }
    let propagator = match kind {
        ScreenKind::Dft => dft_matrix(dim1),
        ScreenKind::Identity => ComplexMatrix::identity(dim1),
    };
    let unitary_residual = propagator
        .dagger()
        .mul(&propagator)?
        .sub(&ComplexMatrix::identity(dim1))?
        .frobenius_norm();
    if unitary_residual > 1e-12 {
        return Err(ScreenError::NotUnitary(unitary_residual));
    }

    let bin_size = dim1 / n_bins;
    let bins: Vec<Vec<usize>> = (0..n_bins)
        .map(|b| (b * bin_size..(b + 1) * bin_size).collect())
        .collect();

    let dagger = propagator.dagger();
    let mut bin_projectors = Vec::with_capacity(n_bins);
    for bin in &bins {
        let mut p = vec![0.0; dim1];
        for &i in bin {
            p[i] = 1.0;
        }
        let proj = dagger
            .mul(&ComplexMatrix::diag_real(&p))?
            .mul(&propagator)?;
        bin_projectors.push(proj);
    }

    let screen = ScreenModel {
        dim1,
        kind,
        bins,
        bin_projectors,
    };
    let max_cross = screen.max_slit_cross_term();
    if max_cross <= CROSS_TERM_THRESHOLD {
        return Err(ScreenError::Degenerate {
            max_cross,
            threshold: CROSS_TERM_THRESHOLD,
        });
    }
    Ok(screen)
}

impl ScreenModel {
    pub fn dim1(&self) -> usize {
        self.dim1
    }

    pub fn kind(&self) -> ScreenKind {
        self.kind
    }

    pub fn n_bins(&self) -> usize {
        self.bins.len()
    }

    pub fn bins(&self) -> &[Vec<usize>] {
        &self.bins
    }

    /// J(bin): the propagated localization projector on the position factor.
    pub fn bin_projector(&self, bin: usize) -> &ComplexMatrix {
        &self.bin_projectors[bin]
    }

    /// F(bin) = J(bin) (x) 1 on the product space.
    pub fn lifted_bin_projector(
        &self,
        bin: usize,
        dim2: usize,
    ) -> Result<ComplexMatrix, LinalgError> {
        tensor_product(&self.bin_projectors[bin], &ComplexMatrix::identity(dim2))
    }

    /// max over bins of |Re <e_1| J(bin) r_1>|: how visible interference
    /// between the first slit-1 and slit-2 basis states can get.
    pub fn max_slit_cross_term(&self) -> f64 {
        let r1 = self.dim1 / 2;
        self.bin_projectors
            .iter()
            .map(|j| j.get(0, r1).re.abs())
            .fold(0.0, f64::max)
    }

    /// Residual of `sum_bins J(bin) = 1`.
    pub fn resolution_residual(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim1, self.dim1);
        for j in &self.bin_projectors {
            sum = sum.add(j).expect("same dims");
        }
        sum.sub(&ComplexMatrix::identity(self.dim1))
            .expect("same dims")
            .frobenius_norm()
    }
}
