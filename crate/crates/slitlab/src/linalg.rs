//! Dense complex matrices and vectors.
//!
//! Everything downstream (operators, states, screens, the solver) is built on
//! the two types here. Matrices are stored row-major; all values are immutable
//! after construction and every operation is a pure function, so they can be
//! shared freely across threads.

use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Hard cap on any single matrix dimension; keeps the dense algebra desk-scale.
pub const MAX_DIM: usize = 4096;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("dimension {0} exceeds the configured maximum {MAX_DIM}")]
    TooLarge(usize),
    #[error("non-finite entry at flat index {0}")]
    NonFinite(usize),
    #[error("not a projector (hermiticity residual {herm:.3e}, idempotence residual {idem:.3e})")]
    NotProjector { herm: f64, idem: f64 },
    #[error("trace {trace} of projector is not within {tol:.1e} of an integer")]
    NonIntegralTrace { trace: f64, tol: f64 },
}

fn check_dim(n: usize) -> Result<usize, LinalgError> {
    if n == 0 {
        return Err(LinalgError::DimMismatch(
            "dimension must be positive".into(),
        ));
    }
    if n > MAX_DIM {
        return Err(LinalgError::TooLarge(n));
    }
    Ok(n)
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self, LinalgError> {
        check_dim(rows)?;
        check_dim(cols)?;
        if entries.len() != rows * cols {
            return Err(LinalgError::DimMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if let Some(i) = entries
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(LinalgError::NonFinite(i));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![C64::new(0.0, 0.0); rows * cols]).expect("valid zero matrix")
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * n + i] = C64::new(v, 0.0);
        }
        m
    }

    /// Rank-one projector |v><v| / <v|v>.
    pub fn outer_projector(v: &ComplexVector) -> Self {
        let n = v.dim();
        let nrm2 = v.norm_squared();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.entries[i * n + j] = v.entries[i] * v.entries[j].conj() / nrm2;
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: C64) {
        self.entries[r * self.cols + c] = v;
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.entries[c * self.rows + r] = self.get(r, c).conj();
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..other.cols {
                    out.entries[r * other.cols + c] += a * other.get(k, c);
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector, LinalgError> {
        if self.cols != v.dim() {
            return Err(LinalgError::DimMismatch(format!(
                "{}x{} applied to dim-{} vector",
                self.rows,
                self.cols,
                v.dim()
            )));
        }
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for (r, slot) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..self.cols {
                acc += self.get(r, c) * v.entries[c];
            }
            *slot = acc;
        }
        Ok(ComplexVector { entries: out })
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius distance to another matrix of the same shape.
    pub fn distance(&self, other: &Self) -> Result<f64, LinalgError> {
        Ok(self.sub(other)?.frobenius_norm())
    }

    pub fn hermiticity_residual(&self) -> f64 {
        self.sub(&self.dagger())
            .map(|d| d.frobenius_norm())
            .unwrap_or(f64::INFINITY)
    }

    pub fn idempotence_residual(&self) -> f64 {
        match self.mul(self) {
            Ok(sq) => sq
                .sub(self)
                .map(|d| d.frobenius_norm())
                .unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    }
}

/// Dense complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<C64>,
}

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Result<Self, LinalgError> {
        check_dim(entries.len())?;
        if let Some(i) = entries
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(LinalgError::NonFinite(i));
        }
        Ok(Self { entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: vec![C64::new(0.0, 0.0); dim],
        }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.entries[index] = C64::new(1.0, 0.0);
        v
    }

    pub fn from_real(values: &[f64]) -> Self {
        Self {
            entries: values.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> C64 {
        self.entries[i]
    }

    pub fn set(&mut self, i: usize, v: C64) {
        self.entries[i] = v;
    }

    pub fn norm_squared(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// <self|other>, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<C64, LinalgError> {
        if self.dim() != other.dim() {
            return Err(LinalgError::DimMismatch(format!(
                "{} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.dim() != other.dim() {
            return Err(LinalgError::DimMismatch(format!(
                "{} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.dim() != other.dim() {
            return Err(LinalgError::DimMismatch(format!(
                "{} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            entries: self.entries.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n <= 0.0 {
            return None;
        }
        Some(self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn distance(&self, other: &Self) -> Result<f64, LinalgError> {
        Ok(self.sub(other)?.norm())
    }
}

/// Kronecker product: block (i, j) of the result is `a[i][j] * b`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    check_dim(rows)?;
    check_dim(cols)?;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let f = a.get(ar, ac);
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for br in 0..b.rows {
                for bc in 0..b.cols {
                    out.entries[(ar * b.rows + br) * cols + (ac * b.cols + bc)] = f * b.get(br, bc);
                }
            }
        }
    }
    Ok(out)
}

/// AB - BA for square matrices of equal dimension.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    if !a.is_square() || !b.is_square() || a.rows != b.rows {
        return Err(LinalgError::DimMismatch(format!(
            "commutator needs equal square matrices, got {}x{} and {}x{}",
            a.rows, a.cols, b.rows, b.cols
        )));
    }
    a.mul(b)?.sub(&b.mul(a)?)
}

/// Residual report produced by [`is_projector`].
#[derive(Debug, Clone, Copy)]
pub struct ProjectorReport {
    pub hermiticity_residual: f64,
    pub idempotence_residual: f64,
    pub pass: bool,
}

/// Tests M = M* = M^2 within `tol` (Frobenius residuals on both conditions).
pub fn is_projector(m: &ComplexMatrix, tol: f64) -> ProjectorReport {
    let herm = m.hermiticity_residual();
    let idem = m.idempotence_residual();
    ProjectorReport {
        hermiticity_residual: herm,
        idempotence_residual: idem,
        pass: herm <= tol && idem <= tol,
    }
}

/// Rank of a verified projector, computed as the rounded trace.
///
/// Fails if the matrix is not a projector at `tol`, or if the trace is not
/// within `tol` of an integer.
pub fn projector_rank(m: &ComplexMatrix, tol: f64) -> Result<usize, LinalgError> {
    let report = is_projector(m, tol);
    if !report.pass {
        return Err(LinalgError::NotProjector {
            herm: report.hermiticity_residual,
            idem: report.idempotence_residual,
        });
    }
    let tr = m.trace().re;
    let rounded = tr.round();
    if (tr - rounded).abs() > tol.max(1e-9) || rounded < 0.0 {
        return Err(LinalgError::NonIntegralTrace {
            trace: tr,
            tol: tol.max(1e-9),
        });
    }
    Ok(rounded as usize)
}
