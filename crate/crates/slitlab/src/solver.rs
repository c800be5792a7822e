//! Numerical search for new property projectors.
//!
//! For a fixed detector-compatible state the detection condition
//! `Y psi = G psi` is *linear* in the entries of the candidate projector K.
//! Together with Hermiticity this carves an affine subspace out of the space
//! of H1 operators; what remains of the problem is the quadratic condition
//! `K^2 = K`. The solver therefore works in two stages:
//!
//! 1. [`build_constraint_subspace`] assembles the linear system over a real
//!    parametrization of Hermitian matrices and extracts an offset plus an
//!    orthonormal basis of the homogeneous solution set (SVD);
//! 2. [`find_projector`] runs Levenberg-Marquardt descent on
//!    `||K^2 - K||_F^2` (plus an optional trace penalty steering the rank)
//!    from seeded Gaussian starts inside that subspace.
//!
//! Everything a search emits is re-verified from scratch by the checker;
//! nothing is trusted from the optimizer's internal state.

use crate::block::{BlockState, Cavity};
use crate::checker::{check_problem, ProblemInstance, Tolerances};
use crate::linalg::{ComplexMatrix, C64};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(
        "state violates detector compatibility (residual {residual:.3e}); no solution can exist"
    )]
    NotDetectorCompatible { residual: f64 },
    #[error("state is degenerate for the search ({which} margin {margin:.3e}); nondegeneracy can never hold")]
    DegenerateState { which: &'static str, margin: f64 },
    #[error("detection constraints are infeasible (least-squares gap {infeasibility:.3e})")]
    EmptySubspace { infeasibility: f64 },
    #[error("invalid solver options: {0}")]
    BadOptions(String),
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
    #[error(transparent)]
    Check(#[from] crate::checker::CheckError),
}

/// Knobs for the projector search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Accept a candidate once `||K^2 - K||_F` drops below this.
    pub residual_tol: f64,
    /// Desired rounded trace of accepted candidates, if any.
    pub rank_target: Option<usize>,
    /// Candidates closer than this (Frobenius) are the same solution.
    pub dedup_distance: f64,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iterations: 250,
            residual_tol: 1e-11,
            rank_target: None,
            dedup_distance: 1e-6,
            seed: 0,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<(), SolverError> {
        if self.restarts == 0 || self.max_iterations == 0 {
            return Err(SolverError::BadOptions(
                "restarts and iterations must be positive".into(),
            ));
        }
        if self.residual_tol >= self.dedup_distance {
            return Err(SolverError::BadOptions(
                "residual tolerance must stay below the dedup distance".into(),
            ));
        }
        Ok(())
    }
}

// Real parametrization of Hermitian n x n matrices: n diagonal entries, then
// (re, im) for each strict upper-triangle entry in row-major order.
fn param_count(n: usize) -> usize {
    n * n
}

fn upper_index(n: usize, r: usize, c: usize) -> usize {
    // position of (r, c), r < c, in the row-major strict upper triangle
    debug_assert!(r < c && c < n);
    let before = r * n - (r * (r + 1)) / 2; // entries in rows above
    n + 2 * (before + (c - r - 1))
}

fn matrix_from_params(n: usize, params: &[f64]) -> ComplexMatrix {
    let mut k = ComplexMatrix::zeros(n, n);
    for (i, &p) in params.iter().take(n).enumerate() {
        k.set(i, i, C64::new(p, 0.0));
    }
    for r in 0..n {
        for c in (r + 1)..n {
            let idx = upper_index(n, r, c);
            let z = C64::new(params[idx], params[idx + 1]);
            k.set(r, c, z);
            k.set(c, r, z.conj());
        }
    }
    k
}

fn params_from_matrix(k: &ComplexMatrix) -> Vec<f64> {
    let n = k.rows();
    let mut params = vec![0.0; param_count(n)];
    for (i, p) in params.iter_mut().take(n).enumerate() {
        *p = k.get(i, i).re;
    }
    for r in 0..n {
        for c in (r + 1)..n {
            // hermitian part, in case the input is slightly off
            let z = (k.get(r, c) + k.get(c, r).conj()) * C64::new(0.5, 0.0);
            let idx = upper_index(n, r, c);
            params[idx] = z.re;
            params[idx + 1] = z.im;
        }
    }
    params
}

/// Affine parametrization of every Hermitian K compatible with the linear
/// detection constraints of a fixed state.
#[derive(Debug, Clone)]
pub struct ConstraintSubspace {
    dim1: usize,
    offset: ComplexMatrix,
    basis: Vec<ComplexMatrix>,
    matrix: DMatrix<f64>,
    rhs: DVector<f64>,
    infeasibility: f64,
}

impl ConstraintSubspace {
    /// Number of free real parameters.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn dim1(&self) -> usize {
        self.dim1
    }

    /// Least-squares gap of the affine system; ~0 for feasible states.
    pub fn infeasibility(&self) -> f64 {
        self.infeasibility
    }

    pub fn offset(&self) -> &ComplexMatrix {
        &self.offset
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    /// The affine point at the given coordinates.
    pub fn point(&self, coords: &[f64]) -> ComplexMatrix {
        assert_eq!(coords.len(), self.basis.len());
        let mut k = self.offset.clone();
        for (c, b) in coords.iter().zip(&self.basis) {
            k = k.add(&b.scale(C64::new(*c, 0.0))).expect("same dims");
        }
        k
    }

    /// Residual of the constraint system at an arbitrary Hermitian matrix.
    pub fn membership_residual(&self, k: &ComplexMatrix) -> f64 {
        let params = DVector::from_vec(params_from_matrix(k));
        (&self.matrix * params - &self.rhs).norm()
    }
}

struct EquationBuilder {
    n: usize,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl EquationBuilder {
    fn new(n: usize) -> Self {
        Self {
            n,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    /// Adds the complex equation sum(coeffs[(r, c)] * K[r][c]) = rhs as two
    /// real rows over the Hermitian parametrization.
    fn push(&mut self, coeffs: &[((usize, usize), C64)], rhs: C64) {
        let n = self.n;
        let mut real_row = vec![0.0; param_count(n)];
        let mut imag_row = vec![0.0; param_count(n)];
        for &((r, c), co) in coeffs {
            if r == c {
                real_row[r] += co.re;
                imag_row[r] += co.im;
            } else if r < c {
                let idx = upper_index(n, r, c);
                real_row[idx] += co.re;
                real_row[idx + 1] -= co.im;
                imag_row[idx] += co.im;
                imag_row[idx + 1] += co.re;
            } else {
                // K[r][c] = conj(K[c][r])
                let idx = upper_index(n, c, r);
                real_row[idx] += co.re;
                real_row[idx + 1] += co.im;
                imag_row[idx] += co.im;
                imag_row[idx + 1] -= co.re;
            }
        }
        self.rows.push(real_row);
        self.rhs.push(rhs.re);
        self.rows.push(imag_row);
        self.rhs.push(rhs.im);
    }
}

/// Assembles the affine space of Hermitian candidates for a state.
///
/// Errors with [`SolverError::EmptySubspace`] when the linear system is
/// infeasible (the least-squares gap is then the certificate margin).
pub fn build_constraint_subspace(psi: &BlockState) -> Result<ConstraintSubspace, SolverError> {
    let compat = psi.detector_compat_residual();
    if compat > 1e-10 {
        return Err(SolverError::NotDetectorCompatible { residual: compat });
    }
    let layout = psi.layout();
    let decomp = psi.decomp();
    let m = layout.m();
    let n = layout.dim1();
    let mut eq = EquationBuilder::new(n);

    // For each position row j and each basis slot of each cavity block, the
    // property image constraints are linear in one block of K:
    //   slit-1 rows:   sum_i K[j][i]     a_i = a_j,  sum_i K[j][i]     b_i = 0,
    //                  sum_l K[j][m+l]   g_l = 0,    sum_l K[j][m+l]   d_l = 0;
    //   slit-2 rows:   sum_i K[m+j][i]   a_i = 0,    sum_i K[m+j][i]   b_i = 0,
    //                  sum_l K[m+j][m+l] g_l = g_j,  sum_l K[m+j][m+l] d_l = 0.
    for j in 0..m {
        for t in decomp.range(Cavity::A) {
            let coeffs: Vec<_> = (0..m).map(|i| ((j, i), psi.x(i).get(t))).collect();
            eq.push(&coeffs, psi.x(j).get(t));
            let coeffs: Vec<_> = (0..m).map(|i| ((m + j, i), psi.x(i).get(t))).collect();
            eq.push(&coeffs, C64::new(0.0, 0.0));
        }
        for t in decomp.range(Cavity::B) {
            let coeffs: Vec<_> = (0..m).map(|i| ((j, i), psi.x(i).get(t))).collect();
            eq.push(&coeffs, C64::new(0.0, 0.0));
            let coeffs: Vec<_> = (0..m).map(|i| ((m + j, i), psi.x(i).get(t))).collect();
            eq.push(&coeffs, C64::new(0.0, 0.0));
        }
        for t in decomp.range(Cavity::C) {
            let coeffs: Vec<_> = (0..m).map(|l| ((j, m + l), psi.y(l).get(t))).collect();
            eq.push(&coeffs, C64::new(0.0, 0.0));
            let coeffs: Vec<_> = (0..m).map(|l| ((m + j, m + l), psi.y(l).get(t))).collect();
            eq.push(&coeffs, psi.y(j).get(t));
        }
        for t in decomp.range(Cavity::D) {
            let coeffs: Vec<_> = (0..m).map(|l| ((j, m + l), psi.y(l).get(t))).collect();
            eq.push(&coeffs, C64::new(0.0, 0.0));
            let coeffs: Vec<_> = (0..m).map(|l| ((m + j, m + l), psi.y(l).get(t))).collect();
            eq.push(&coeffs, C64::new(0.0, 0.0));
        }
    }

    let cols = param_count(n);
    // pad with zero rows so the thin SVD still exposes the full right-singular
    // basis when the system is wide
    let rows = eq.rows.len().max(cols);
    let mut a = DMatrix::<f64>::zeros(rows, cols);
    let mut b = DVector::<f64>::zeros(rows);
    for (r, row) in eq.rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            a[(r, c)] = *v;
        }
        b[r] = eq.rhs[r];
    }

    let svd = a.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = (sigma_max * 1e-12).max(1e-12);
    let x0 = svd
        .solve(&b, eps)
        .map_err(|e| SolverError::BadOptions(e.to_string()))?;
    let infeasibility = (&a * &x0 - &b).norm();
    if infeasibility > 1e-8 {
        return Err(SolverError::EmptySubspace { infeasibility });
    }

    let v_t = svd.v_t.as_ref().expect("computed");
    let mut basis = Vec::new();
    for i in 0..v_t.nrows() {
        if svd.singular_values.get(i).copied().unwrap_or(0.0) <= eps {
            let row: Vec<f64> = v_t.row(i).iter().cloned().collect();
            basis.push(matrix_from_params(n, &row));
        }
    }

    let offset_params: Vec<f64> = x0.iter().cloned().collect();
    Ok(ConstraintSubspace {
        dim1: n,
        offset: matrix_from_params(n, &offset_params),
        basis,
        matrix: a,
        rhs: b,
        infeasibility,
    })
}

/// `||K^2 - K||_F^2` (plus the squared trace penalty when a rank target is
/// set) and its gradient in subspace coordinates.
pub fn objective_and_gradient(
    subspace: &ConstraintSubspace,
    coords: &[f64],
    rank_target: Option<usize>,
) -> (f64, Vec<f64>) {
    let k = subspace.point(coords);
    let r = k.mul(&k).expect("square").sub(&k).expect("same dims");
    let mut f: f64 = r.entries().iter().map(|z| z.norm_sqr()).sum();
    let trace_gap = rank_target.map(|t| k.trace().re - t as f64);
    if let Some(g) = trace_gap {
        f += g * g;
    }
    let mut grad = Vec::with_capacity(subspace.dim());
    for b in subspace.basis() {
        // d/dc ||R||^2 = 2 Re <R, BK + KB - B>
        let dr = b
            .mul(&k)
            .expect("square")
            .add(&k.mul(b).expect("square"))
            .expect("same dims")
            .sub(b)
            .expect("same dims");
        let mut g: f64 = 2.0
            * r.entries()
                .iter()
                .zip(dr.entries())
                .map(|(a, d)| (a.conj() * d).re)
                .sum::<f64>();
        if let Some(gap) = trace_gap {
            g += 2.0 * gap * b.trace().re;
        }
        grad.push(g);
    }
    (f, grad)
}

/// Per-restart diagnostics: the best idempotence residual seen so far at each
/// accepted iteration (non-increasing by construction).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RestartTrace {
    pub best_residuals: Vec<f64>,
    pub converged: bool,
}

/// Result of a projector search inside one subspace.
#[derive(Debug, Clone)]
pub struct SolverRun {
    pub solutions: Vec<ComplexMatrix>,
    pub traces: Vec<RestartTrace>,
    /// Smallest idempotence residual reached by any restart.
    pub best_residual: f64,
}

fn stack_residual(k: &ComplexMatrix, rank_target: Option<usize>) -> (DVector<f64>, f64) {
    let r = k.mul(k).expect("square").sub(k).expect("same dims");
    let idem = r.frobenius_norm();
    let extra = usize::from(rank_target.is_some());
    let mut v = DVector::zeros(2 * r.entries().len() + extra);
    for (i, z) in r.entries().iter().enumerate() {
        v[2 * i] = z.re;
        v[2 * i + 1] = z.im;
    }
    if let Some(t) = rank_target {
        let idx = v.len() - 1;
        v[idx] = k.trace().re - t as f64;
    }
    (v, idem)
}

fn jacobian(
    subspace: &ConstraintSubspace,
    k: &ComplexMatrix,
    rank_target: Option<usize>,
) -> DMatrix<f64> {
    let n2 = k.entries().len();
    let extra = usize::from(rank_target.is_some());
    let mut j = DMatrix::zeros(2 * n2 + extra, subspace.dim());
    for (col, b) in subspace.basis().iter().enumerate() {
        let dr = b
            .mul(k)
            .expect("square")
            .add(&k.mul(b).expect("square"))
            .expect("same dims")
            .sub(b)
            .expect("same dims");
        for (i, z) in dr.entries().iter().enumerate() {
            j[(2 * i, col)] = z.re;
            j[(2 * i + 1, col)] = z.im;
        }
        if rank_target.is_some() {
            j[(2 * n2, col)] = b.trace().re;
        }
    }
    j
}

/// Levenberg-Marquardt descent on the idempotence residual from seeded
/// Gaussian starts; returns deduplicated verified projectors.
pub fn find_projector(
    subspace: &ConstraintSubspace,
    opts: &SolverOptions,
) -> Result<SolverRun, SolverError> {
    opts.validate()?;
    let d = subspace.dim();
    let mut solutions: Vec<ComplexMatrix> = Vec::new();
    let mut traces = Vec::with_capacity(opts.restarts);
    let mut best_residual = f64::INFINITY;

    for restart in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(restart as u64 + 1);
        let mut coords: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();

        let mut lambda = 1e-3;
        let mut trace_best = Vec::with_capacity(opts.max_iterations);
        let mut k = subspace.point(&coords);
        let (mut res_vec, mut idem) = stack_residual(&k, opts.rank_target);
        let mut f = res_vec.norm_squared();
        let mut best = idem;
        trace_best.push(best);
        let mut converged = idem <= opts.residual_tol && rank_ok(&k, opts.rank_target);

        if d > 0 {
            for _ in 0..opts.max_iterations {
                if converged {
                    break;
                }
                let j = jacobian(subspace, &k, opts.rank_target);
                let jt = j.transpose();
                let grad = &jt * &res_vec;
                let jtj = &jt * &j;
                let mut stepped = false;
                for _ in 0..12 {
                    let lhs = &jtj + DMatrix::identity(d, d) * lambda;
                    let Some(delta) = lhs.lu().solve(&(-&grad)) else {
                        lambda *= 10.0;
                        continue;
                    };
                    let trial: Vec<f64> = coords
                        .iter()
                        .zip(delta.iter())
                        .map(|(c, s)| c + s)
                        .collect();
                    let kt = subspace.point(&trial);
                    let (rv, id) = stack_residual(&kt, opts.rank_target);
                    let ft = rv.norm_squared();
                    if ft < f {
                        coords = trial;
                        k = kt;
                        res_vec = rv;
                        idem = id;
                        f = ft;
                        lambda = (lambda * 0.3).max(1e-14);
                        stepped = true;
                        break;
                    }
                    lambda *= 10.0;
                }
                best = best.min(idem);
                trace_best.push(best);
                if idem <= opts.residual_tol && rank_ok(&k, opts.rank_target) {
                    converged = true;
                }
                if !stepped {
                    break;
                }
            }
        }

        best_residual = best_residual.min(best);
        traces.push(RestartTrace {
            best_residuals: trace_best,
            converged,
        });

        if converged {
            // re-verify from scratch before keeping
            let verified = crate::linalg::is_projector(&k, 1e-9).pass
                && subspace.membership_residual(&k) <= 1e-8
                && rank_ok(&k, opts.rank_target);
            if verified {
                let duplicate = solutions.iter().any(|s| {
                    s.distance(&k)
                        .map(|dd| dd < opts.dedup_distance)
                        .unwrap_or(false)
                });
                if !duplicate {
                    solutions.push(k);
                }
            }
        }
    }

    Ok(SolverRun {
        solutions,
        traces,
        best_residual,
    })
}

fn rank_ok(k: &ComplexMatrix, target: Option<usize>) -> bool {
    match target {
        None => true,
        Some(t) => {
            let tr = k.trace().re;
            (tr - t as f64).abs() < 0.25
        }
    }
}

/// Full search result: subspace diagnostics plus checker-verified instances.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub options: SolverOptions,
    pub subspace_dim: usize,
    /// Least-squares gap of the linear constraints (nonzero means infeasible).
    pub infeasibility: f64,
    pub traces: Vec<RestartTrace>,
    pub solutions: Vec<ProblemInstance>,
    /// Best combined residual reached; for infeasible constraint systems this
    /// is the infeasibility gap itself.
    pub best_residual: f64,
}

/// Pipeline: constraint subspace, projector descent, full checker filter.
///
/// An empty solution list is a valid outcome; states that can never satisfy
/// nondegeneracy are rejected up front with a named error.
pub fn search_solutions(
    psi: &BlockState,
    opts: &SolverOptions,
) -> Result<SearchOutcome, SolverError> {
    opts.validate()?;
    let compat = psi.detector_compat_residual();
    if compat > 1e-10 {
        return Err(SolverError::NotDetectorCompatible { residual: compat });
    }
    let full = psi.to_vector();
    let ws = psi.ws_image();
    let prop = psi.property_image();
    let checks: [(&'static str, f64); 4] = [
        ("ws image", ws.norm()),
        ("ws complement", full.sub(&ws)?.norm()),
        ("property image", prop.norm()),
        ("property complement", full.sub(&prop)?.norm()),
    ];
    for (which, margin) in checks {
        if margin <= 1e-6 {
            return Err(SolverError::DegenerateState { which, margin });
        }
    }

    let subspace = match build_constraint_subspace(psi) {
        Ok(s) => s,
        Err(SolverError::EmptySubspace { infeasibility }) => {
            return Ok(SearchOutcome {
                options: opts.clone(),
                subspace_dim: 0,
                infeasibility,
                traces: Vec::new(),
                solutions: Vec::new(),
                best_residual: infeasibility,
            });
        }
        Err(e) => return Err(e),
    };

    let run = find_projector(&subspace, opts)?;
    let tol = Tolerances::default();
    let mut instances = Vec::new();
    for k in run.solutions {
        let candidate = ProblemInstance::new(psi.clone(), Some(k))?;
        if check_problem(&candidate, &tol)?.verdict {
            instances.push(candidate);
        }
    }
    Ok(SearchOutcome {
        options: opts.clone(),
        subspace_dim: subspace.dim(),
        infeasibility: subspace.infeasibility(),
        traces: run.traces,
        solutions: instances,
        best_residual: run.best_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::{assemble_state, CavityDecomposition, SlitLayout};
    use crate::families;
    use crate::linalg::ComplexVector;
    use rand::Rng;

    fn canonical_state() -> BlockState {
        families::family_dim6(0.25, 0.0).unwrap().psi
    }

    #[test]
    fn canonical_dim6_subspace_has_dimension_four() {
        let subspace = build_constraint_subspace(&canonical_state()).unwrap();
        assert_eq!(subspace.dim(), 4);
        assert!(subspace.infeasibility() < 1e-12);
    }

    #[test]
    fn closed_form_members_lie_in_the_subspace() {
        let subspace = build_constraint_subspace(&canonical_state()).unwrap();
        for p in [0.1, 0.25, 0.4] {
            for theta in [0.0, 0.9, std::f64::consts::FRAC_PI_2] {
                let k = families::family_dim6(p, theta)
                    .unwrap()
                    .property_projector
                    .unwrap();
                assert!(
                    subspace.membership_residual(&k) < 1e-12,
                    "p={p} theta={theta}"
                );
            }
        }
    }

    #[test]
    fn affine_points_satisfy_constraints() {
        let subspace = build_constraint_subspace(&canonical_state()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..16 {
            let coords: Vec<f64> = (0..subspace.dim())
                .map(|_| rng.gen_range(-3.0..3.0))
                .collect();
            let k = subspace.point(&coords);
            assert!(subspace.membership_residual(&k) < 1e-12);
            assert!(k.hermiticity_residual() < 1e-12);
        }
    }

    #[test]
    fn fully_constrained_dim2_state_is_infeasible() {
        // all four scalar components nonzero: the slit-1 row demands the
        // upper-left entry be both 1 and 0
        let layout = SlitLayout::new(1).unwrap();
        let decomp = CavityDecomposition::uniform();
        let mk = |slots: &[(usize, f64)]| {
            let mut v = ComplexVector::zeros(4);
            for &(i, val) in slots {
                v.set(i, C64::new(val, 0.0));
            }
            v
        };
        let psi = assemble_state(
            layout,
            decomp,
            vec![mk(&[(0, 0.6), (1, 0.5)])],
            vec![mk(&[(2, 0.4), (3, 0.5)])],
            true,
        )
        .unwrap();
        match build_constraint_subspace(&psi) {
            Err(SolverError::EmptySubspace { infeasibility }) => {
                assert!(infeasibility > 1e-3);
            }
            other => panic!("expected infeasible subspace, got {other:?}"),
        }
    }

    #[test]
    fn all_a_supported_state_admits_the_identity() {
        let layout = SlitLayout::new(2).unwrap();
        let decomp = CavityDecomposition::uniform();
        let mut e0 = ComplexVector::zeros(4);
        e0.set(0, C64::new(1.0, 0.0));
        let psi = assemble_state(
            layout,
            decomp,
            vec![e0.clone(), e0],
            vec![ComplexVector::zeros(4), ComplexVector::zeros(4)],
            true,
        )
        .unwrap();
        let subspace = build_constraint_subspace(&psi).unwrap();
        let identity = ComplexMatrix::identity(4);
        assert!(subspace.membership_residual(&identity) < 1e-12);
    }

    #[test]
    fn gradient_matches_central_differences() {
        let subspace = build_constraint_subspace(&canonical_state()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..8 {
            let coords: Vec<f64> = (0..subspace.dim())
                .map(|_| rng.gen_range(-1.5..1.5))
                .collect();
            let (_, grad) = objective_and_gradient(&subspace, &coords, None);
            let h = 1e-5;
            for i in 0..coords.len() {
                let mut up = coords.clone();
                up[i] += h;
                let mut dn = coords.clone();
                dn[i] -= h;
                let (fu, _) = objective_and_gradient(&subspace, &up, None);
                let (fd, _) = objective_and_gradient(&subspace, &dn, None);
                let fd_grad = (fu - fd) / (2.0 * h);
                let denom = grad[i].abs().max(fd_grad.abs()).max(1e-8);
                assert!(
                    (grad[i] - fd_grad).abs() / denom < 1e-5,
                    "trial {trial} coord {i}: {} vs {}",
                    grad[i],
                    fd_grad
                );
            }
        }
    }

    #[test]
    fn search_recovers_dim6_family_members() {
        let opts = SolverOptions {
            restarts: 24,
            rank_target: Some(3),
            seed: 17,
            ..SolverOptions::default()
        };
        let outcome = search_solutions(&canonical_state(), &opts).unwrap();
        assert!(!outcome.solutions.is_empty());
        for inst in &outcome.solutions {
            let k = inst.property_projector.as_ref().unwrap();
            let (p, theta) = families::fit_dim6_member(k).unwrap();
            let member = families::family_dim6(p, theta)
                .unwrap()
                .property_projector
                .unwrap();
            assert!(k.distance(&member).unwrap() < 1e-6);
        }
        // the recovered detections are genuinely uncorrelated
        let class =
            crate::checker::classify_correlation(&outcome.solutions[0], &Tolerances::default())
                .unwrap();
        assert_eq!(class.kind, crate::checker::CorrelationKind::Uncorrelated);
    }

    #[test]
    fn search_is_deterministic_for_fixed_seed() {
        let opts = SolverOptions {
            restarts: 8,
            rank_target: Some(3),
            seed: 3,
            ..SolverOptions::default()
        };
        let a = search_solutions(&canonical_state(), &opts).unwrap();
        let b = search_solutions(&canonical_state(), &opts).unwrap();
        assert_eq!(a.solutions.len(), b.solutions.len());
        for (x, y) in a.solutions.iter().zip(&b.solutions) {
            let kx = x.property_projector.as_ref().unwrap();
            let ky = y.property_projector.as_ref().unwrap();
            assert_eq!(kx.entries(), ky.entries());
        }
    }

    #[test]
    fn reported_best_residuals_are_nonincreasing() {
        let opts = SolverOptions {
            restarts: 6,
            rank_target: Some(3),
            seed: 9,
            ..SolverOptions::default()
        };
        let subspace = build_constraint_subspace(&canonical_state()).unwrap();
        let run = find_projector(&subspace, &opts).unwrap();
        for trace in &run.traces {
            for w in trace.best_residuals.windows(2) {
                assert!(w[1] <= w[0] + 1e-15);
            }
        }
    }

    #[test]
    fn impossible_rank_target_yields_nothing() {
        let opts = SolverOptions {
            restarts: 8,
            rank_target: Some(6),
            seed: 2,
            ..SolverOptions::default()
        };
        let outcome = search_solutions(&canonical_state(), &opts).unwrap();
        assert!(outcome.solutions.is_empty());
    }

    #[test]
    fn degenerate_side_states_are_rejected_before_search() {
        // independent b-pairs and d-pairs force a vanishing property image
        let layout = SlitLayout::new(3).unwrap();
        let decomp = CavityDecomposition::new(1, 2, 1, 2).unwrap();
        let dim2 = decomp.dim2();
        let mk = |slots: &[(usize, f64)]| {
            let mut v = ComplexVector::zeros(dim2);
            for &(i, val) in slots {
                v.set(i, C64::new(val, 0.0));
            }
            v
        };
        // b blocks occupy slots 1..3, d blocks slots 4..6
        let x = vec![mk(&[(1, 1.0)]), mk(&[(2, 1.0)]), ComplexVector::zeros(dim2)];
        let y = vec![mk(&[(4, 1.0)]), mk(&[(5, 1.0)]), ComplexVector::zeros(dim2)];
        let psi = assemble_state(layout, decomp, x, y, true).unwrap();
        let err = search_solutions(&psi, &SolverOptions::default()).unwrap_err();
        assert!(matches!(err, SolverError::DegenerateState { .. }));
    }

    #[test]
    fn case_a_projectors_kill_the_property_image() {
        // same state as above, driven through the low-level pipeline: every
        // projector the descent finds maps the state to a vanishing property
        // image, which is exactly why the full search refuses it
        let layout = SlitLayout::new(3).unwrap();
        let decomp = CavityDecomposition::new(1, 2, 1, 2).unwrap();
        let dim2 = decomp.dim2();
        let mk = |i: usize| {
            let mut v = ComplexVector::zeros(dim2);
            v.set(i, C64::new(1.0, 0.0));
            v
        };
        let x = vec![mk(1), mk(2), ComplexVector::zeros(dim2)];
        let y = vec![mk(4), mk(5), ComplexVector::zeros(dim2)];
        let psi = assemble_state(layout, decomp, x, y, true).unwrap();
        let subspace = build_constraint_subspace(&psi).unwrap();
        let opts = SolverOptions {
            restarts: 12,
            seed: 4,
            ..SolverOptions::default()
        };
        let run = find_projector(&subspace, &opts).unwrap();
        assert!(!run.solutions.is_empty());
        let i2 = ComplexMatrix::identity(dim2);
        let full = psi.to_vector();
        for k in &run.solutions {
            let g = crate::linalg::tensor_product(k, &i2).unwrap();
            assert!(g.apply(&full).unwrap().norm() < 1e-8);
        }
    }

    #[test]
    fn dim4_case_d_state_is_degenerate_for_the_search() {
        // both sides carry only B/D support: the property image is zero and
        // nondegeneracy can never hold
        let layout = SlitLayout::new(2).unwrap();
        let decomp = CavityDecomposition::uniform();
        let mk = |slot: usize, v: f64| {
            let mut out = ComplexVector::zeros(4);
            out.set(slot, C64::new(v, 0.0));
            out
        };
        let x = vec![mk(1, 0.5), mk(1, 0.5)];
        let y = vec![mk(3, 0.5), mk(3, 0.5)];
        let psi = assemble_state(layout, decomp, x, y, true).unwrap();
        let err = search_solutions(&psi, &SolverOptions::default()).unwrap_err();
        assert!(matches!(
            err,
            SolverError::DegenerateState {
                which: "property image",
                ..
            }
        ));
    }

    #[test]
    fn options_validation_rejects_inverted_thresholds() {
        let opts = SolverOptions {
            residual_tol: 1e-3,
            dedup_distance: 1e-6,
            ..Default::default()
        };
        assert!(matches!(
            find_projector(
                &build_constraint_subspace(&canonical_state()).unwrap(),
                &opts
            ),
            Err(SolverError::BadOptions(_))
        ));
    }
}
