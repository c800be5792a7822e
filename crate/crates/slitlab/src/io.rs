//! File formats: JSON instances and reports, CSV distribution tables.
//!
//! Complex scalars serialize as two-element `[re, im]` arrays; matrices carry
//! explicit row/column counts with row-major entries. All CSV floats are
//! written with 17 significant digits so files are bit-reproducible and
//! round-trip exactly.

use crate::block::{assemble_state, BlockState, CavityDecomposition, SlitLayout};
use crate::checker::{CheckReport, Condition, ProblemInstance, ProjectorCondition};
use crate::families::FamilyTag;
use crate::interference::JointTable;
use crate::linalg::{ComplexMatrix, ComplexVector, C64};
use crate::solver::{SearchOutcome, SolverOptions};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

/// Version tag carried by every JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unknown schema version {found} (this build reads {SCHEMA_VERSION})")]
    SchemaVersion { found: u32 },
    #[error("invalid artifact: field `{field}`: {message}")]
    Validation {
        field: &'static str,
        message: String,
    },
    #[error(transparent)]
    State(#[from] crate::block::StateError),
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
    #[error(transparent)]
    Check(#[from] crate::checker::CheckError),
}

fn invalid(field: &'static str, message: impl Into<String>) -> IoError {
    IoError::Validation {
        field,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixSchema {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixSchema {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, IoError> {
        let entries = self
            .entries
            .iter()
            .map(|[re, im]| C64::new(*re, *im))
            .collect();
        Ok(ComplexMatrix::new(self.rows, self.cols, entries)?)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LayoutSchema {
    pub m: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DecompSchema {
    #[serde(rename = "rA")]
    pub r_a: usize,
    #[serde(rename = "rB")]
    pub r_b: usize,
    #[serde(rename = "rC")]
    pub r_c: usize,
    #[serde(rename = "rD")]
    pub r_d: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateSchema {
    pub layout: LayoutSchema,
    pub decomp: DecompSchema,
    pub x: Vec<Vec<[f64; 2]>>,
    pub y: Vec<Vec<[f64; 2]>>,
}

impl StateSchema {
    pub fn from_state(state: &BlockState) -> Self {
        let decomp = state.decomp();
        let comp = |v: &ComplexVector| v.entries().iter().map(|z| [z.re, z.im]).collect();
        Self {
            layout: LayoutSchema {
                m: state.layout().m(),
            },
            decomp: DecompSchema {
                r_a: decomp.r_a,
                r_b: decomp.r_b,
                r_c: decomp.r_c,
                r_d: decomp.r_d,
            },
            x: (0..state.layout().m()).map(|j| comp(state.x(j))).collect(),
            y: (0..state.layout().m()).map(|k| comp(state.y(k))).collect(),
        }
    }
}

/// On-disk form of a problem instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub family: Option<String>,
    pub layout: LayoutSchema,
    pub decomp: DecompSchema,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<MatrixSchema>,
    pub psi: StateSchema,
}

impl InstanceFile {
    pub fn from_instance(instance: &ProblemInstance, family: Option<FamilyTag>) -> Self {
        let psi = StateSchema::from_state(&instance.psi);
        Self {
            schema_version: SCHEMA_VERSION,
            family: family.map(|f| f.label().to_string()),
            layout: psi.layout,
            decomp: psi.decomp,
            k: instance
                .property_projector
                .as_ref()
                .map(MatrixSchema::from_matrix),
            psi,
        }
    }
}

/// An instance parsed from disk, with any non-fatal findings.
#[derive(Debug)]
pub struct LoadedInstance {
    pub instance: ProblemInstance,
    pub family: Option<String>,
    pub warnings: Vec<String>,
}

/// Parses and validates an instance file.
///
/// Non-normalized states are renormalized with a warning unless `strict` is
/// set; a non-Hermitian K is loaded with a warning (the checker will fail it).
pub fn parse_instance(text: &str, strict: bool) -> Result<LoadedInstance, IoError> {
    let file: InstanceFile = serde_json::from_str(text)?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(IoError::SchemaVersion {
            found: file.schema_version,
        });
    }
    if file.layout.m != file.psi.layout.m {
        return Err(invalid(
            "layout.m",
            "instance layout disagrees with psi.layout",
        ));
    }
    let d = &file.decomp;
    let pd = &file.psi.decomp;
    if (d.r_a, d.r_b, d.r_c, d.r_d) != (pd.r_a, pd.r_b, pd.r_c, pd.r_d) {
        return Err(invalid(
            "decomp",
            "instance decomp disagrees with psi.decomp",
        ));
    }
    let layout = SlitLayout::new(file.layout.m).map_err(|e| invalid("layout.m", e.to_string()))?;
    let decomp = CavityDecomposition::new(d.r_a, d.r_b, d.r_c, d.r_d)
        .map_err(|e| invalid("decomp", e.to_string()))?;

    let dim2 = decomp.dim2();
    let parse_side = |side: &[Vec<[f64; 2]>], field: &'static str| {
        if side.len() != layout.m() {
            return Err(invalid(
                field,
                format!("expected {} components, got {}", layout.m(), side.len()),
            ));
        }
        side.iter()
            .map(|comp| {
                if comp.len() != dim2 {
                    return Err(invalid(
                        field,
                        format!("component dim {} != dim(H2) {dim2}", comp.len()),
                    ));
                }
                ComplexVector::new(comp.iter().map(|[re, im]| C64::new(*re, *im)).collect())
                    .map_err(|e| invalid(field, e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()
    };
    let x = parse_side(&file.psi.x, "psi.x")?;
    let y = parse_side(&file.psi.y, "psi.y")?;

    let mut warnings = Vec::new();
    let raw_norm: f64 = x
        .iter()
        .chain(y.iter())
        .map(|v| v.norm_squared())
        .sum::<f64>()
        .sqrt();
    if (raw_norm - 1.0).abs() > 1e-9 {
        if strict {
            return Err(invalid("psi", format!("state norm {raw_norm} is not 1")));
        }
        warnings.push(format!("state norm {raw_norm} renormalized to 1"));
    }
    let psi = assemble_state(layout, decomp, x, y, false)?;

    let k = match &file.k {
        Some(schema) => {
            let m = schema.to_matrix()?;
            if !m.is_square() || m.rows() != layout.dim1() {
                return Err(invalid("k", format!("expected {0}x{0}", layout.dim1())));
            }
            let herm = m.hermiticity_residual();
            if herm > 1e-9 {
                warnings.push(format!(
                    "property projector is not Hermitian (residual {herm:.3e}); verification will fail it"
                ));
            }
            Some(m)
        }
        None => None,
    };
    let instance = ProblemInstance::new(psi, k)?;
    Ok(LoadedInstance {
        instance,
        family: file.family,
        warnings,
    })
}

pub fn load_instance(path: &Path, strict: bool) -> Result<LoadedInstance, IoError> {
    parse_instance(&fs::read_to_string(path)?, strict)
}

pub fn save_instance(
    path: &Path,
    instance: &ProblemInstance,
    family: Option<FamilyTag>,
) -> Result<(), IoError> {
    let file = InstanceFile::from_instance(instance, family);
    write_json(path, &file)
}

/// Check report in its on-disk layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReportFile {
    pub schema_version: u32,
    #[serde(rename = "C1")]
    pub c1: Condition,
    #[serde(rename = "C2")]
    pub c2: Condition,
    #[serde(rename = "C3")]
    pub c3: Condition,
    #[serde(rename = "C4")]
    pub c4: Condition,
    #[serde(rename = "C5")]
    pub c5: Condition,
    #[serde(rename = "K_projector")]
    pub k_projector: ProjectorCondition,
    pub verdict: bool,
}

impl CheckReportFile {
    pub fn from_report(report: &CheckReport) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            c1: report.incompatibility,
            c2: report.joint_measurability,
            c3: report.ws_detection,
            c4: report.property_detection,
            c5: report.nondegeneracy,
            k_projector: report.projector,
            verdict: report.verdict,
        }
    }
}

pub fn save_check_report(path: &Path, report: &CheckReport) -> Result<(), IoError> {
    write_json(path, &CheckReportFile::from_report(report))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RestartSummary {
    pub iterations: usize,
    pub best_residual: f64,
    pub converged: bool,
}

/// Solver search report in its on-disk layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchReportFile {
    pub schema_version: u32,
    pub options: SolverOptions,
    pub subspace_dim: usize,
    pub infeasibility: f64,
    pub best_residual: f64,
    pub restarts: Vec<RestartSummary>,
    pub solutions: Vec<MatrixSchema>,
}

impl SearchReportFile {
    pub fn from_outcome(outcome: &SearchOutcome) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            options: outcome.options.clone(),
            subspace_dim: outcome.subspace_dim,
            infeasibility: outcome.infeasibility,
            best_residual: outcome.best_residual,
            restarts: outcome
                .traces
                .iter()
                .map(|t| RestartSummary {
                    iterations: t.best_residuals.len(),
                    best_residual: t.best_residuals.last().copied().unwrap_or(f64::INFINITY),
                    converged: t.converged,
                })
                .collect(),
            solutions: outcome
                .solutions
                .iter()
                .filter_map(|inst| inst.property_projector.as_ref())
                .map(MatrixSchema::from_matrix)
                .collect(),
        }
    }
}

pub fn save_search_report(path: &Path, outcome: &SearchOutcome) -> Result<(), IoError> {
    write_json(path, &SearchReportFile::from_outcome(outcome))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// 17 significant digits; enough to reproduce any f64 exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// One row of the per-bin distribution table.
#[derive(Debug, Clone, Copy)]
pub struct DistributionRow {
    pub bin: usize,
    pub p_quantum: f64,
    pub p_classical: f64,
    pub cross_term: f64,
    pub p_selected_y: f64,
    pub p_selected_t: f64,
}

pub fn write_distribution_csv(path: &Path, rows: &[DistributionRow]) -> Result<(), IoError> {
    let mut out = fs::File::create(path)?;
    writeln!(
        out,
        "bin,p_quantum,p_classical,cross_term,p_selected_Y,p_selected_T"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.bin,
            fmt_float(r.p_quantum),
            fmt_float(r.p_classical),
            fmt_float(r.cross_term),
            fmt_float(r.p_selected_y),
            fmt_float(r.p_selected_t)
        )?;
    }
    Ok(())
}

/// Joint (cavity, bin) table with matching counts (zeros when not sampled).
pub fn write_joint_csv(
    path: &Path,
    table: &JointTable,
    counts: Option<&[Vec<u64>; 4]>,
) -> Result<(), IoError> {
    let mut out = fs::File::create(path)?;
    writeln!(out, "cavity,bin,probability,count")?;
    let labels = ["A", "B", "C", "D"];
    for (c, row) in table.probs.iter().enumerate() {
        for (b, p) in row.iter().enumerate() {
            let count = counts.map(|cs| cs[c][b]).unwrap_or(0);
            writeln!(out, "{},{},{},{}", labels[c], b, fmt_float(*p), count)?;
        }
    }
    Ok(())
}
