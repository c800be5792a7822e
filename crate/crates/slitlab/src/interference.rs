//! Screen statistics: quantum vs. classical distributions, detector-selected
//! cross terms, and the joint cavity/screen table.
//!
//! The quantum hit distribution splits, per bin, into the classical two-path
//! mixture plus the interference term `2 Re <psi_1| Z F psi_2>` where
//! `psi_1`, `psi_2` are the two slit images of the state and Z is an optional
//! selecting detector. For any verified solution instance the term vanishes
//! for Z in {1, T, Y, TY}; for the eraser's plus-detector it does not.

use crate::block::Cavity;
use crate::checker::ProblemInstance;
use crate::linalg::{commutator, ComplexMatrix, ComplexVector};
use crate::operators::lift_cavity;
use crate::screen::ScreenModel;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("state dim {state} does not match screen dim {screen} x auxiliary dim {dim2}")]
    DimMismatch {
        state: usize,
        screen: usize,
        dim2: usize,
    },
    #[error("selector does not commute with the screen (residual {residual:.3e})")]
    NonCommutingSelector { residual: f64 },
    #[error("degenerate slit split: pi(1) = {pi1}")]
    DegenerateSplit { pi1: f64 },
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
    #[error(transparent)]
    Check(#[from] crate::checker::CheckError),
}

/// The two slit images of a state with their weights.
#[derive(Debug, Clone)]
pub struct SplitState {
    pub psi1: ComplexVector,
    pub psi2: ComplexVector,
    pub pi1: f64,
    pub pi2: f64,
}

/// Splits a state by a which-slit property projector.
pub fn split_state(
    psi: &ComplexVector,
    ws_property: &ComplexMatrix,
) -> Result<SplitState, LabError> {
    let psi1 = ws_property.apply(psi)?;
    let psi2 = psi.sub(&psi1)?;
    Ok(SplitState {
        pi1: psi1.norm_squared(),
        pi2: psi2.norm_squared(),
        psi1,
        psi2,
    })
}

fn check_dims(psi: &ComplexVector, screen: &ScreenModel, dim2: usize) -> Result<(), LabError> {
    if psi.dim() != screen.dim1() * dim2 {
        return Err(LabError::DimMismatch {
            state: psi.dim(),
            screen: screen.dim1(),
            dim2,
        });
    }
    Ok(())
}

fn check_selector(z: &ComplexMatrix, screen: &ScreenModel, dim2: usize) -> Result<(), LabError> {
    for bin in 0..screen.n_bins() {
        let f = screen.lifted_bin_projector(bin, dim2)?;
        let residual = commutator(z, &f)?.frobenius_norm();
        if residual > 1e-10 {
            return Err(LabError::NonCommutingSelector { residual });
        }
    }
    Ok(())
}

/// Quantum per-bin hit probabilities `<psi| F(bin) psi>`.
pub fn screen_distribution(
    psi: &ComplexVector,
    screen: &ScreenModel,
    dim2: usize,
) -> Result<Vec<f64>, LabError> {
    check_dims(psi, screen, dim2)?;
    let mut out = Vec::with_capacity(screen.n_bins());
    for bin in 0..screen.n_bins() {
        let f = screen.lifted_bin_projector(bin, dim2)?;
        out.push(psi.inner(&f.apply(psi)?)?.re);
    }
    Ok(out)
}

/// The two-path mixture a which-slit assignment would predict:
/// `<psi_1| F psi_1> + <psi_2| F psi_2>` per bin.
///
/// Well-defined for any state; on an eigenstate of the ws property one path
/// carries no weight and the mixture equals the quantum distribution.
pub fn classical_distribution(
    psi: &ComplexVector,
    ws_property: &ComplexMatrix,
    screen: &ScreenModel,
    dim2: usize,
) -> Result<Vec<f64>, LabError> {
    check_dims(psi, screen, dim2)?;
    let split = split_state(psi, ws_property)?;
    let mut out = Vec::with_capacity(screen.n_bins());
    for bin in 0..screen.n_bins() {
        let f = screen.lifted_bin_projector(bin, dim2)?;
        let p1 = split.psi1.inner(&f.apply(&split.psi1)?)?.re;
        let p2 = split.psi2.inner(&f.apply(&split.psi2)?)?.re;
        out.push(p1 + p2);
    }
    Ok(out)
}

/// Per-bin interference term `2 Re <psi_1| Z F(bin) psi_2>`.
///
/// `selector` defaults to the identity; it must commute with every screen
/// projector.
pub fn interference_term(
    psi: &ComplexVector,
    ws_property: &ComplexMatrix,
    screen: &ScreenModel,
    dim2: usize,
    selector: Option<&ComplexMatrix>,
) -> Result<Vec<f64>, LabError> {
    check_dims(psi, screen, dim2)?;
    if let Some(z) = selector {
        check_selector(z, screen, dim2)?;
    }
    let split = split_state(psi, ws_property)?;
    let mut out = Vec::with_capacity(screen.n_bins());
    for bin in 0..screen.n_bins() {
        let f = screen.lifted_bin_projector(bin, dim2)?;
        let f_psi2 = f.apply(&split.psi2)?;
        let zf_psi2 = match selector {
            Some(z) => z.apply(&f_psi2)?,
            None => f_psi2,
        };
        out.push(2.0 * split.psi1.inner(&zf_psi2)?.re);
    }
    Ok(out)
}

/// Conditional hit distributions given each slit: the per-slit renormalized
/// screen statistics whose pi-weighted mixture is the classical distribution.
pub fn conditional_screen(
    psi: &ComplexVector,
    ws_property: &ComplexMatrix,
    screen: &ScreenModel,
    dim2: usize,
) -> Result<(Vec<f64>, Vec<f64>), LabError> {
    check_dims(psi, screen, dim2)?;
    let split = split_state(psi, ws_property)?;
    if split.pi1 <= 1e-12 || split.pi2 <= 1e-12 {
        return Err(LabError::DegenerateSplit { pi1: split.pi1 });
    }
    let mut given_1 = Vec::with_capacity(screen.n_bins());
    let mut given_2 = Vec::with_capacity(screen.n_bins());
    for bin in 0..screen.n_bins() {
        let f = screen.lifted_bin_projector(bin, dim2)?;
        given_1.push(split.psi1.inner(&f.apply(&split.psi1)?)?.re / split.pi1);
        given_2.push(split.psi2.inner(&f.apply(&split.psi2)?)?.re / split.pi2);
    }
    Ok((given_1, given_2))
}

/// Unnormalized joint distribution of a hit in each bin together with a
/// firing of the (commuting) selector: `<psi| Z F(bin) psi>` per bin.
pub fn selected_distribution(
    psi: &ComplexVector,
    selector: &ComplexMatrix,
    screen: &ScreenModel,
    dim2: usize,
) -> Result<Vec<f64>, LabError> {
    check_dims(psi, screen, dim2)?;
    check_selector(selector, screen, dim2)?;
    let mut out = Vec::with_capacity(screen.n_bins());
    for bin in 0..screen.n_bins() {
        let f = screen.lifted_bin_projector(bin, dim2)?;
        out.push(psi.inner(&selector.apply(&f.apply(psi)?)?)?.re);
    }
    Ok(out)
}

/// Joint (cavity, bin) probability table with both marginals.
#[derive(Debug, Clone)]
pub struct JointTable {
    /// probs[cavity][bin]
    pub probs: [Vec<f64>; 4],
}

impl JointTable {
    pub fn n_bins(&self) -> usize {
        self.probs[0].len()
    }

    pub fn cavity_marginal(&self) -> [f64; 4] {
        [
            self.probs[0].iter().sum(),
            self.probs[1].iter().sum(),
            self.probs[2].iter().sum(),
            self.probs[3].iter().sum(),
        ]
    }

    pub fn screen_marginal(&self) -> Vec<f64> {
        (0..self.n_bins())
            .map(|b| self.probs.iter().map(|row| row[b]).sum())
            .collect()
    }

    /// Flattened in (cavity-major, bin-minor) order.
    pub fn flatten(&self) -> Vec<f64> {
        self.probs
            .iter()
            .flat_map(|row| row.iter().copied())
            .collect()
    }
}

/// `P(cavity, bin) = <psi| (1 (x) P_cavity) F(bin) psi>` for an instance.
pub fn joint_outcome_distribution(
    instance: &ProblemInstance,
    screen: &ScreenModel,
) -> Result<JointTable, LabError> {
    let psi = instance.psi.to_vector();
    let dim2 = instance.psi.decomp().dim2();
    check_dims(&psi, screen, dim2)?;
    let mut probs: [Vec<f64>; 4] = Default::default();
    for (i, cav) in Cavity::ALL.iter().enumerate() {
        let pc = lift_cavity(instance.psi.layout(), instance.psi.decomp(), *cav);
        let mut row = Vec::with_capacity(screen.n_bins());
        for bin in 0..screen.n_bins() {
            let f = screen.lifted_bin_projector(bin, dim2)?;
            row.push(psi.inner(&pc.apply(&f.apply(&psi)?)?)?.re.max(0.0));
        }
        probs[i] = row;
    }
    Ok(JointTable { probs })
}
