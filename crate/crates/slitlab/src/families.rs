//! Named instances and closed-form solution families.
//!
//! Every family builds a complete, checker-verified instance: the dimension-4
//! families (detections always correlated), the dimension-6 family
//! (uncorrelated detections), the two-cavity eraser setup (detectors that do
//! *not* commute, kept as the contrast case), and the four-cavity ideal
//! apparatus whose cavity outcomes identify both the slit and the property.
//! The module also classifies states into the four structural cases, mirrors
//! case-(b) solutions into case-(c) ones, and certifies that no solution
//! exists when the position factor is two-dimensional.

use crate::block::{assemble_state, BlockState, Cavity, CavityDecomposition, SlitLayout};
use crate::checker::{check_problem, CheckReport, ProblemInstance, Tolerances};
use crate::linalg::{tensor_product, ComplexMatrix, ComplexVector, C64};
use crate::solver::{self, SolverOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("no idempotent completion found (best residual {best_residual:.3e})")]
    NoCompletion { best_residual: f64 },
    #[error("solver found no verified member (best residual {best_residual:.3e})")]
    SolverFailed { best_residual: f64 },
    #[error("constructed instance failed verification")]
    Verification(Box<CheckReport>),
    #[error("state shape unsupported: {0}")]
    UnsupportedShape(String),
    #[error("degenerate state side: {0}")]
    DegenerateSide(&'static str),
    #[error("no family member fits this matrix: {0}")]
    NoFit(String),
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
    #[error(transparent)]
    State(#[from] crate::block::StateError),
    #[error(transparent)]
    Check(#[from] crate::checker::CheckError),
    #[error(transparent)]
    Solver(#[from] crate::solver::SolverError),
}

/// Which family an instance came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyTag {
    Dim4Symmetric,
    Dim4MuZero,
    Dim4General,
    Dim6,
    Eraser,
    IdealApparatus,
}

impl FamilyTag {
    pub fn label(&self) -> &'static str {
        match self {
            FamilyTag::Dim4Symmetric => "dim4-sym",
            FamilyTag::Dim4MuZero => "dim4-mu0",
            FamilyTag::Dim4General => "dim4-general",
            FamilyTag::Dim6 => "dim6",
            FamilyTag::Eraser => "eraser",
            FamilyTag::IdealApparatus => "ideal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dim4-sym" => Some(FamilyTag::Dim4Symmetric),
            "dim4-mu0" => Some(FamilyTag::Dim4MuZero),
            "dim4-general" => Some(FamilyTag::Dim4General),
            "dim6" => Some(FamilyTag::Dim6),
            "eraser" => Some(FamilyTag::Eraser),
            "ideal" => Some(FamilyTag::IdealApparatus),
            _ => None,
        }
    }
}

/// Parameter record a family is instantiated from (the CLI surface).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyParams {
    pub family: FamilyTag,
    pub lambda: C64,
    pub mu: C64,
    pub p: f64,
    pub q: f64,
    pub theta: f64,
    pub seed: u64,
}

impl FamilyParams {
    pub fn new(family: FamilyTag) -> Self {
        Self {
            family,
            lambda: C64::new(1.0, 0.0),
            mu: C64::new(1.0, 0.0),
            p: 0.25,
            q: 0.25,
            theta: 0.0,
            seed: 0,
        }
    }

    pub fn build(&self) -> Result<ProblemInstance, FamilyError> {
        match self.family {
            FamilyTag::Dim4Symmetric => family_dim4_sym(self.q, self.theta),
            FamilyTag::Dim4MuZero => family_dim4_mu0(self.lambda, self.p, self.theta),
            FamilyTag::Dim4General => family_dim4_general(self.lambda, self.mu, self.seed),
            FamilyTag::Dim6 => family_dim6(self.p, self.theta),
            FamilyTag::Eraser => Ok(eraser_instance().as_instance()),
            FamilyTag::IdealApparatus => Ok(ideal_apparatus_instance()?.instance),
        }
    }
}

fn cz(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn slot_vector(dim: usize, slot: usize, value: C64) -> ComplexVector {
    let mut v = ComplexVector::zeros(dim);
    v.set(slot, value);
    v
}

/// K = [[P, U], [U*, Q]] over the slit blocks.
fn property_from_blocks(p: &ComplexMatrix, u: &ComplexMatrix, q: &ComplexMatrix) -> ComplexMatrix {
    let m = p.rows();
    let v = u.dagger();
    let mut k = ComplexMatrix::zeros(2 * m, 2 * m);
    for r in 0..m {
        for c in 0..m {
            k.set(r, c, p.get(r, c));
            k.set(r, m + c, u.get(r, c));
            k.set(m + r, c, v.get(r, c));
            k.set(m + r, m + c, q.get(r, c));
        }
    }
    k
}

fn verified(psi: BlockState, k: ComplexMatrix) -> Result<ProblemInstance, FamilyError> {
    let instance = ProblemInstance::new(psi, Some(k))?;
    let report = check_problem(&instance, &Tolerances::default())?;
    if !report.verdict {
        return Err(FamilyError::Verification(Box::new(report)));
    }
    Ok(instance)
}

/// Case-(b) state for m = 2: slit-1 support on the A block (second component
/// mu times the first), slit-2 support on the D block (second lambda times
/// the first).
pub fn case_b_state(lambda: C64, mu: C64, a1: C64, delta1: C64) -> Result<BlockState, FamilyError> {
    let layout = SlitLayout::new(2)?;
    let decomp = CavityDecomposition::uniform();
    let a_slot = decomp.range(Cavity::A).start;
    let d_slot = decomp.range(Cavity::D).start;
    let x1 = slot_vector(4, a_slot, a1);
    let x2 = x1.scale(mu);
    let y1 = slot_vector(4, d_slot, delta1);
    let y2 = y1.scale(lambda);
    Ok(assemble_state(
        layout,
        decomp,
        vec![x1, x2],
        vec![y1, y2],
        true,
    )?)
}

/// Dimension-4 symmetric family (lambda = mu = 1).
///
/// For q in (0, 1/2) and any phase theta the property projector has diagonal
/// 1-q on the slit-1 block, off-diagonal magnitude sqrt((1/2 - q) q), and
/// rank 2; the resulting detections are directly correlated.
pub fn family_dim4_sym(q: f64, theta: f64) -> Result<ProblemInstance, FamilyError> {
    if !(0.0..0.5).contains(&q) || q == 0.0 {
        return Err(FamilyError::ParamOutOfRange(format!(
            "q = {q} not in (0, 1/2)"
        )));
    }
    let u = C64::from_polar(((0.5 - q) * q).sqrt(), theta);
    let p = 1.0 - q;
    let pb = ComplexMatrix::new(2, 2, vec![cz(p), cz(q), cz(q), cz(p)])?;
    let ub = ComplexMatrix::new(2, 2, vec![-u, u, u, -u])?;
    let qb = ComplexMatrix::new(2, 2, vec![cz(q), cz(-q), cz(-q), cz(q)])?;
    let k = property_from_blocks(&pb, &ub, &qb);
    let psi = case_b_state(cz(1.0), cz(1.0), cz(0.5), cz(0.5))?;
    verified(psi, k)
}

/// The tempting closed-form completion for the mu = 0 family.
///
/// Its off-diagonal magnitude is right, but the q it pairs with is not
/// idempotence-consistent for any p in (0, 1); kept as a regression guard for
/// the audit (see `examples/mu_zero_audit.rs`).
pub fn mu_zero_uncorrected_completion(lambda: C64, p: f64, theta: f64) -> (C64, f64) {
    let l2 = lambda.norm_sqr();
    let u = C64::from_polar(((p - p * p) / (1.0 + l2)).sqrt(), theta);
    (u, 1.0 / (1.0 + l2))
}

fn mu_zero_property(lambda: C64, p: f64, u: C64, q: f64) -> ComplexMatrix {
    let l2 = lambda.norm_sqr();
    let pb = ComplexMatrix::new(2, 2, vec![cz(1.0), cz(0.0), cz(0.0), cz(p)]).expect("2x2");
    let ub = ComplexMatrix::new(2, 2, vec![cz(0.0), cz(0.0), -lambda * u, u]).expect("2x2");
    #[rustfmt::skip]
    let q_entries = vec![
        cz(l2 * q),        -lambda.conj() * cz(q),
        -lambda * cz(q),   cz(q),
    ];
    let qb = ComplexMatrix::new(2, 2, q_entries).expect("2x2");
    property_from_blocks(&pb, &ub, &qb)
}

/// Solves the idempotence consistency conditions of the mu = 0 ansatz for
/// (|u|, q) by Newton iteration and verifies the result by multiplication.
pub fn mu_zero_derived_completion(
    lambda: C64,
    p: f64,
    theta: f64,
) -> Result<(C64, f64), FamilyError> {
    if !(0.0..1.0).contains(&p) || p == 0.0 {
        return Err(FamilyError::ParamOutOfRange(format!(
            "p = {p} not in (0, 1)"
        )));
    }
    if lambda.norm() == 0.0 {
        return Err(FamilyError::ParamOutOfRange(
            "lambda must be nonzero".into(),
        ));
    }
    let phase = C64::from_polar(1.0, theta);
    // residual entries that pin (|u|, q): the slit-1 diagonal entry and the
    // slit-coupling entry of K^2 - K
    let g = |nu: f64, q: f64| -> (f64, f64) {
        let k = mu_zero_property(lambda, p, phase * cz(nu), q);
        let r = k.mul(&k).expect("square").sub(&k).expect("same dims");
        (r.get(1, 1).re, (r.get(1, 3) * phase.conj()).re)
    };
    let mut nu = 0.25;
    let mut q = 0.25;
    let h = 1e-7;
    let mut best = f64::INFINITY;
    for _ in 0..80 {
        let (g1, g2) = g(nu, q);
        best = best.min((g1 * g1 + g2 * g2).sqrt());
        if g1.abs() < 1e-14 && g2.abs() < 1e-14 {
            break;
        }
        let (g1n, g2n) = g(nu + h, q);
        let (g1q, g2q) = g(nu, q + h);
        let j11 = (g1n - g1) / h;
        let j12 = (g1q - g1) / h;
        let j21 = (g2n - g2) / h;
        let j22 = (g2q - g2) / h;
        let det = j11 * j22 - j12 * j21;
        if det.abs() < 1e-14 {
            break;
        }
        nu -= (j22 * g1 - j12 * g2) / det;
        q -= (-j21 * g1 + j11 * g2) / det;
        nu = nu.abs().max(1e-9);
    }
    let u = phase * cz(nu);
    let k = mu_zero_property(lambda, p, u, q);
    let residual = k.idempotence_residual();
    if residual > 1e-10 {
        return Err(FamilyError::NoCompletion {
            best_residual: residual.min(best),
        });
    }
    Ok((u, q))
}

/// Dimension-4 family with vanishing slit-1 dependence (mu = 0).
///
/// The (u, q) completion is derived numerically from the idempotence
/// condition rather than taken in closed form; see
/// [`mu_zero_derived_completion`].
pub fn family_dim4_mu0(lambda: C64, p: f64, theta: f64) -> Result<ProblemInstance, FamilyError> {
    let (u, q) = mu_zero_derived_completion(lambda, p, theta)?;
    let k = mu_zero_property(lambda, p, u, q);
    let t = 1.0 / (2.0 + lambda.norm_sqr()).sqrt();
    let layout = SlitLayout::new(2)?;
    let decomp = CavityDecomposition::uniform();
    let a_slot = decomp.range(Cavity::A).start;
    let d_slot = decomp.range(Cavity::D).start;
    let x1 = slot_vector(4, a_slot, cz(t));
    let x2 = ComplexVector::zeros(4);
    let y1 = slot_vector(4, d_slot, cz(t));
    let y2 = y1.scale(lambda);
    let psi = assemble_state(layout, decomp, vec![x1, x2], vec![y1, y2], true)?;
    verified(psi, k)
}

/// Dimension-4 family for generic nonzero lambda, mu: instantiates the
/// Hermitian detection-constraint ansatz for the case-(b) state and hands the
/// free parameters to the projector solver (rank target 2).
pub fn family_dim4_general(
    lambda: C64,
    mu: C64,
    seed: u64,
) -> Result<ProblemInstance, FamilyError> {
    if lambda.norm() == 0.0 || mu.norm() == 0.0 {
        return Err(FamilyError::ParamOutOfRange(
            "lambda and mu must be nonzero".into(),
        ));
    }
    let t = 1.0 / (2.0 + lambda.norm_sqr() + mu.norm_sqr()).sqrt();
    let psi = case_b_state(lambda, mu, cz(t), cz(t))?;
    let opts = SolverOptions {
        restarts: 48,
        rank_target: Some(2),
        seed,
        ..SolverOptions::default()
    };
    let outcome = solver::search_solutions(&psi, &opts)?;
    outcome
        .solutions
        .into_iter()
        .next()
        .ok_or(FamilyError::SolverFailed {
            best_residual: outcome.best_residual,
        })
}

/// The default dimension-6 state: equal amplitudes on b_1, b_2, a_3 over the
/// slit-1 components and delta_1, delta_2, gamma_3 over the slit-2 ones
/// (lambda = mu = 1).
pub fn dim6_default_state() -> Result<BlockState, FamilyError> {
    let layout = SlitLayout::new(3)?;
    let decomp = CavityDecomposition::uniform();
    let s = cz(1.0 / 6f64.sqrt());
    let a = decomp.range(Cavity::A).start;
    let b = decomp.range(Cavity::B).start;
    let c = decomp.range(Cavity::C).start;
    let d = decomp.range(Cavity::D).start;
    let x = vec![
        slot_vector(4, b, s),
        slot_vector(4, b, s),
        slot_vector(4, a, s),
    ];
    let y = vec![
        slot_vector(4, d, s),
        slot_vector(4, d, s),
        slot_vector(4, c, s),
    ];
    Ok(assemble_state(layout, decomp, x, y, true)?)
}

/// Dimension-6 uncorrelated family.
///
/// For p in (0, 1/2) and any phase the property projector has rank 3; on the
/// default state the two detections are genuinely uncorrelated. The p = 1/4,
/// theta = 0 member has all entries in {0, +-1/4, 1}.
pub fn family_dim6(p: f64, theta: f64) -> Result<ProblemInstance, FamilyError> {
    if !(0.0..0.5).contains(&p) || p == 0.0 {
        return Err(FamilyError::ParamOutOfRange(format!(
            "p = {p} not in (0, 1/2)"
        )));
    }
    let u = C64::from_polar((p * (0.5 - p)).sqrt(), theta);
    let qv = 0.5 - p;
    #[rustfmt::skip]
    let p_entries = vec![
        cz(p),   cz(-p),  cz(0.0),
        cz(-p),  cz(p),   cz(0.0),
        cz(0.0), cz(0.0), cz(1.0),
    ];
    #[rustfmt::skip]
    let u_entries = vec![
        u,       -u,      cz(0.0),
        -u,      u,       cz(0.0),
        cz(0.0), cz(0.0), cz(0.0),
    ];
    #[rustfmt::skip]
    let q_entries = vec![
        cz(qv),  cz(-qv), cz(0.0),
        cz(-qv), cz(qv),  cz(0.0),
        cz(0.0), cz(0.0), cz(1.0),
    ];
    let pb = ComplexMatrix::new(3, 3, p_entries)?;
    let ub = ComplexMatrix::new(3, 3, u_entries)?;
    let qb = ComplexMatrix::new(3, 3, q_entries)?;
    let k = property_from_blocks(&pb, &ub, &qb);
    verified(dim6_default_state()?, k)
}

/// Reads (p, theta) off a dimension-6 family member.
pub fn fit_dim6_member(k: &ComplexMatrix) -> Result<(f64, f64), FamilyError> {
    if k.rows() != 6 || k.cols() != 6 {
        return Err(FamilyError::NoFit(format!(
            "expected 6x6, got {}x{}",
            k.rows(),
            k.cols()
        )));
    }
    let p = k.get(0, 0).re;
    let u = k.get(0, 3);
    if !(0.0..0.5).contains(&p) || p == 0.0 || u.norm() < 1e-12 {
        return Err(FamilyError::NoFit(format!("p = {p}, |u| = {}", u.norm())));
    }
    Ok((p, u.arg()))
}

/// Reads (q, theta) off a dimension-4 symmetric family member.
pub fn fit_dim4_sym_member(k: &ComplexMatrix) -> Result<(f64, f64), FamilyError> {
    if k.rows() != 4 || k.cols() != 4 {
        return Err(FamilyError::NoFit(format!(
            "expected 4x4, got {}x{}",
            k.rows(),
            k.cols()
        )));
    }
    let q = k.get(2, 2).re;
    let u = k.get(0, 3);
    if !(0.0..0.5).contains(&q) || q == 0.0 || u.norm() < 1e-12 {
        return Err(FamilyError::NoFit(format!("q = {q}, |u| = {}", u.norm())));
    }
    Ok((q, u.arg()))
}

/// The two-cavity eraser setup: a which-slit detector plus the incompatible
/// plus-basis pair. The plus detector is non-disturbing for the plus property
/// but does not commute with the ws detector, so using it erases ws knowledge.
#[derive(Debug, Clone)]
pub struct EraserInstance {
    pub psi: ComplexVector,
    pub block_state: BlockState,
    pub ws_property: ComplexMatrix,
    pub ws_detector: ComplexMatrix,
    pub plus_property: ComplexMatrix,
    pub plus_detector: ComplexMatrix,
}

impl EraserInstance {
    pub fn layout(&self) -> SlitLayout {
        self.block_state.layout()
    }

    pub fn decomp(&self) -> CavityDecomposition {
        self.block_state.decomp()
    }

    /// As a ws-only instance (no candidate property projector).
    pub fn as_instance(&self) -> ProblemInstance {
        ProblemInstance::new(self.block_state.clone(), None).expect("no projector to mismatch")
    }
}

/// Builds the two-cavity eraser setup on a 2 (x) 2 space.
pub fn eraser_instance() -> EraserInstance {
    let layout = SlitLayout::new(1).expect("m = 1");
    let decomp = CavityDecomposition::new(1, 0, 0, 1).expect("two cavities");
    let s = cz(1.0 / 2f64.sqrt());
    let x = vec![slot_vector(2, 0, s)];
    let y = vec![slot_vector(2, 1, s)];
    let block_state = assemble_state(layout, decomp, x, y, true).expect("unit state");

    let i2 = ComplexMatrix::identity(2);
    let ws_property = tensor_product(&layout.slit_projector(), &i2).expect("4x4");
    let ws_detector = tensor_product(&i2, &decomp.ws_marker()).expect("4x4");

    let plus_slit = ComplexVector::new(vec![s, s]).expect("unit");
    let plus_cavity = ComplexVector::new(vec![s, s]).expect("unit");
    let plus_property =
        tensor_product(&ComplexMatrix::outer_projector(&plus_slit), &i2).expect("4x4");
    let plus_detector =
        tensor_product(&i2, &ComplexMatrix::outer_projector(&plus_cavity)).expect("4x4");

    EraserInstance {
        psi: block_state.to_vector(),
        block_state,
        ws_property,
        ws_detector,
        plus_property,
        plus_detector,
    }
}

/// Which slit a cavity outcome certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Slit {
    One,
    Two,
}

impl Slit {
    pub fn label(&self) -> &'static str {
        match self {
            Slit::One => "slit1",
            Slit::Two => "slit2",
        }
    }
}

/// What a photon found in a given cavity reveals: the slit, and whether the
/// incompatible property was detected (true) or its complement (false).
pub fn cavity_inference(cavity: Cavity) -> (Slit, bool) {
    match cavity {
        Cavity::A => (Slit::One, true),
        Cavity::B => (Slit::One, false),
        Cavity::C => (Slit::Two, true),
        Cavity::D => (Slit::Two, false),
    }
}

/// The four-cavity ideal apparatus: a verified uncorrelated instance whose
/// cavity outcomes determine both the slit and the property via
/// [`cavity_inference`].
#[derive(Debug, Clone)]
pub struct IdealApparatus {
    pub instance: ProblemInstance,
}

/// Builds the ideal apparatus.
///
/// Each slit is split into three regions; two regions of slit 1 feed cavity
/// A and one feeds cavity B (mirrored on slit 2 with D and C), giving cavity
/// marginals (1/3, 1/6, 1/6, 1/3). The property projector is the rank-3
/// member matching this coupling pattern, with entries in {0, +-1/4, 3/4, 1}.
pub fn ideal_apparatus_instance() -> Result<IdealApparatus, FamilyError> {
    let layout = SlitLayout::new(3)?;
    let decomp = CavityDecomposition::uniform();
    let s = cz(1.0 / 6f64.sqrt());
    let a = decomp.range(Cavity::A).start;
    let b = decomp.range(Cavity::B).start;
    let c = decomp.range(Cavity::C).start;
    let d = decomp.range(Cavity::D).start;
    // regions (up, centre, down) of slit i map to position slots i_1..i_3
    let x = vec![
        slot_vector(4, a, s),
        slot_vector(4, a, s),
        slot_vector(4, b, s),
    ];
    let y = vec![
        slot_vector(4, d, s),
        slot_vector(4, d, s),
        slot_vector(4, c, s),
    ];
    let psi = assemble_state(layout, decomp, x, y, true)?;

    // mirror of the dimension-6 family under the a <-> b coupling swap,
    // at the balanced parameter choice
    let k = mirrored_dim6_property(0.5, 0.0)?;
    let instance = verified(psi, k)?;
    Ok(IdealApparatus { instance })
}

/// Rank-3 projector solving the detection constraints for states whose
/// slit-1 support couples two components to cavity A and one to cavity B.
fn mirrored_dim6_property(c: f64, theta: f64) -> Result<ComplexMatrix, FamilyError> {
    if !(0.0..1.0).contains(&c) || c == 0.0 {
        return Err(FamilyError::ParamOutOfRange(format!(
            "c = {c} not in (0, 1)"
        )));
    }
    let pp = (1.0 + c) / 2.0;
    let qv = (1.0 - c) / 2.0;
    let u = C64::from_polar((c * (1.0 - c)).sqrt() / 2.0, theta);
    #[rustfmt::skip]
    let p_entries = vec![
        cz(pp),       cz(1.0 - pp), cz(0.0),
        cz(1.0 - pp), cz(pp),       cz(0.0),
        cz(0.0),      cz(0.0),      cz(0.0),
    ];
    #[rustfmt::skip]
    let u_entries = vec![
        u,       -u,      cz(0.0),
        -u,      u,       cz(0.0),
        cz(0.0), cz(0.0), cz(0.0),
    ];
    #[rustfmt::skip]
    let q_entries = vec![
        cz(qv),  cz(-qv), cz(0.0),
        cz(-qv), cz(qv),  cz(0.0),
        cz(0.0), cz(0.0), cz(1.0),
    ];
    let pb = ComplexMatrix::new(3, 3, p_entries)?;
    let ub = ComplexMatrix::new(3, 3, u_entries)?;
    let qb = ComplexMatrix::new(3, 3, q_entries)?;
    Ok(property_from_blocks(&pb, &ub, &qb))
}

/// Mirrors a case-(b) solution into a case-(c) one: relabel the cavity blocks
/// (A <-> B, C <-> D) and complement the property projector. The mirrored
/// instance is re-verified before being returned.
pub fn mirror_case_c(instance: &ProblemInstance) -> Result<ProblemInstance, FamilyError> {
    let decomp = instance.psi.decomp();
    if decomp.r_a != decomp.r_b || decomp.r_c != decomp.r_d {
        return Err(FamilyError::UnsupportedShape(
            "cavity swap needs rank(A) = rank(B) and rank(C) = rank(D)".into(),
        ));
    }
    let k = instance
        .property_projector
        .as_ref()
        .ok_or(FamilyError::UnsupportedShape(
            "instance has no property projector".into(),
        ))?;
    let layout = instance.psi.layout();
    let swap = |v: &ComplexVector| {
        let mut out = ComplexVector::zeros(v.dim());
        for (src, dst) in decomp
            .range(Cavity::A)
            .zip(decomp.range(Cavity::B))
            .chain(decomp.range(Cavity::C).zip(decomp.range(Cavity::D)))
        {
            out.set(dst, v.get(src));
            out.set(src, v.get(dst));
        }
        out
    };
    let x = (0..layout.m()).map(|j| swap(instance.psi.x(j))).collect();
    let y = (0..layout.m()).map(|j| swap(instance.psi.y(j))).collect();
    let psi = assemble_state(layout, decomp, x, y, true)?;
    let k_mirror = ComplexMatrix::identity(k.rows()).sub(k)?;
    verified(psi, k_mirror)
}

/// Structural case of a detector-compatible state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateCase {
    A,
    B,
    C,
    D,
}

/// Linear relation between the two vectors of a component pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Dependence {
    /// Second vector is `coefficient` times the first (or both vanish, or the
    /// first vanishes: coefficient then unavailable).
    Dependent {
        coefficient: Option<C64>,
    },
    Independent,
}

/// Case label plus the dependence witnesses that justify it.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CaseLabel {
    pub case: StateCase,
    /// Slit-1 pair witness (the mu coefficient when dependent).
    pub mu: Dependence,
    /// Slit-2 pair witness (the lambda coefficient when dependent).
    pub lambda: Dependence,
}

/// Relative singular-value threshold for the linear-dependence rank tests.
const DEPENDENCE_REL_TOL: f64 = 1e-8;

fn dependence(u: &[C64], v: &[C64]) -> Dependence {
    let nu: f64 = u.iter().map(|z| z.norm_sqr()).sum();
    let nv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let uv: C64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
    // singular values of the two-column matrix [u v] via its Gram matrix
    let trace = nu + nv;
    let det = (nu * nv - uv.norm_sqr()).max(0.0);
    let disc = (trace * trace - 4.0 * det).max(0.0).sqrt();
    let s1 = ((trace + disc) / 2.0).sqrt();
    let s2 = ((trace - disc) / 2.0).sqrt();
    if s1 <= 0.0 {
        return Dependence::Dependent { coefficient: None };
    }
    if s2 > DEPENDENCE_REL_TOL * s1 {
        return Dependence::Independent;
    }
    if nu > DEPENDENCE_REL_TOL * DEPENDENCE_REL_TOL {
        Dependence::Dependent {
            coefficient: Some(uv / cz(nu)),
        }
    } else {
        Dependence::Dependent { coefficient: None }
    }
}

/// Classifies a detector-compatible state into one of the four cases.
///
/// For m = 2 the label is read off the vanishing of the first B-block and
/// D-block components; for m = 3 off the linear (in)dependence of the first
/// two B-block and D-block components.
pub fn classify_case(psi: &BlockState) -> Result<CaseLabel, FamilyError> {
    let m = psi.layout().m();
    if !(2..=3).contains(&m) {
        return Err(FamilyError::UnsupportedShape(format!(
            "case classification is defined for m in {{2, 3}}, got {m}"
        )));
    }
    let x_norm: f64 = (0..m).map(|j| psi.x(j).norm_squared()).sum();
    let y_norm: f64 = (0..m).map(|k| psi.y(k).norm_squared()).sum();
    if x_norm <= 1e-16 {
        return Err(FamilyError::DegenerateSide("slit-1"));
    }
    if y_norm <= 1e-16 {
        return Err(FamilyError::DegenerateSide("slit-2"));
    }

    if m == 2 {
        let b1: f64 = psi
            .x_block(0, Cavity::B)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
        let d1: f64 = psi
            .y_block(0, Cavity::D)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
        let mu = dependence(psi.x(0).entries(), psi.x(1).entries());
        let lambda = dependence(psi.y(0).entries(), psi.y(1).entries());
        let case = match (b1 <= 1e-8, d1 <= 1e-8) {
            (true, true) => StateCase::A,
            (true, false) => StateCase::B,
            (false, true) => StateCase::C,
            (false, false) => StateCase::D,
        };
        Ok(CaseLabel { case, mu, lambda })
    } else {
        let b_pair = (psi.x_block(0, Cavity::B), psi.x_block(1, Cavity::B));
        let d_pair = (psi.y_block(0, Cavity::D), psi.y_block(1, Cavity::D));
        let mu = dependence(&b_pair.0, &b_pair.1);
        let lambda = dependence(&d_pair.0, &d_pair.1);
        let case = match (
            matches!(mu, Dependence::Dependent { .. }),
            matches!(lambda, Dependence::Dependent { .. }),
        ) {
            (false, false) => StateCase::A,
            (true, false) => StateCase::B,
            (false, true) => StateCase::C,
            (true, true) => StateCase::D,
        };
        Ok(CaseLabel { case, mu, lambda })
    }
}

/// Deterministic argument plus a stochastic search certificate that the
/// two-dimensional position factor admits no solution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InfeasibilityCertificate {
    pub exact_infeasible: bool,
    pub exact_steps: Vec<String>,
    pub trials: usize,
    pub solutions_found: usize,
    /// Smallest constraint-plus-idempotence residual over all trials.
    pub min_residual: f64,
}

/// Certifies that no solution exists for m = 1.
///
/// The exact branch reproduces the elimination argument; the stochastic
/// branch runs the full search pipeline on seeded random detector-compatible
/// states and reports the best residual any trial achieved.
pub fn dim2_infeasibility(
    trials: usize,
    seed: u64,
) -> Result<InfeasibilityCertificate, FamilyError> {
    let exact_steps = vec![
        "a 2x2 property candidate [[p, u], [u*, q]] must have u != 0, otherwise it commutes \
         with the slit projector"
            .to_string(),
        "the slit-1 detection rows u*gamma = 0 and u*delta = 0 then force the whole slit-2 \
         side of the state to vanish"
            .to_string(),
        "the conjugate rows u**a = 0 and u**b = 0 force the slit-1 side to vanish as well"
            .to_string(),
        "no unit state vector remains, so the five conditions cannot hold together".to_string(),
    ];

    let layout = SlitLayout::new(1)?;
    let decomp = CavityDecomposition::uniform();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_residual = f64::INFINITY;
    let mut solutions_found = 0usize;
    let opts = SolverOptions {
        restarts: 2,
        max_iterations: 50,
        ..SolverOptions::default()
    };

    for trial in 0..trials {
        // component moduli bounded away from zero keep the certificate margin
        // meaningful; phases are unrestricted
        let mut draw = || {
            let modulus = rng.gen_range(0.2..1.0);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            C64::from_polar(modulus, phase)
        };
        let x = vec![ComplexVector::new(vec![draw(), draw(), cz(0.0), cz(0.0)]).expect("finite")];
        let y = vec![ComplexVector::new(vec![cz(0.0), cz(0.0), draw(), draw()]).expect("finite")];
        let psi = assemble_state(layout, decomp, x, y, true)?;
        let trial_opts = SolverOptions {
            seed: seed.wrapping_add(trial as u64),
            ..opts.clone()
        };
        let outcome = solver::search_solutions(&psi, &trial_opts)?;
        solutions_found += outcome.solutions.len();
        min_residual = min_residual.min(outcome.best_residual);
    }

    Ok(InfeasibilityCertificate {
        exact_infeasible: true,
        exact_steps,
        trials,
        solutions_found,
        min_residual,
    })
}

/// Lifted cavity projector of an instance's decomposition, convenience for
/// inference checks.
pub fn lifted_cavity(instance: &ProblemInstance, cavity: Cavity) -> ComplexMatrix {
    crate::operators::lift_cavity(instance.psi.layout(), instance.psi.decomp(), cavity)
}
