//! File-based front door for the library: verify instances, generate family
//! fixtures, run the solver, compute screen distributions, and sample runs.
//!
//! Exit codes: 0 success, 1 domain failure (failed verification, required
//! solution missing, degenerate screen), 2 malformed input.

use clap::{Args, Parser, Subcommand};
use slitlab::block::Cavity;
use slitlab::checker::{check_problem, ProblemInstance, Tolerances};
use slitlab::families::{
    self, cavity_inference, dim2_infeasibility, EraserInstance, FamilyParams, FamilyTag,
};
use slitlab::interference::{
    classical_distribution, interference_term, screen_distribution, selected_distribution,
};
use slitlab::io::{
    self, load_instance, save_check_report, save_instance, save_search_report, DistributionRow,
};
use slitlab::linalg::{ComplexMatrix, C64};
use slitlab::sample::sample_runs;
use slitlab::screen::{build_screen, ScreenKind, ScreenModel};
use slitlab::solver::{search_solutions, SolverOptions};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "slitlab",
    version = concat!(env!("CARGO_PKG_VERSION"), " (schema 1)"),
    about = "Simulate and verify non-disturbing detection in the double-slit experiment"
)]
struct Cli {
    /// Equality tolerance override (also read from SLITLAB_TOL).
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file against the five detection conditions.
    Verify {
        /// Instance JSON to verify.
        #[arg(long = "in")]
        input: PathBuf,
        /// Treat a non-normalized state as an error instead of renormalizing.
        #[arg(long)]
        strict: bool,
        /// Write the full report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a named family member and write it as an instance file.
    Family {
        /// dim4-sym | dim4-mu0 | dim4-general | dim6 | eraser | ideal
        name: String,
        #[command(flatten)]
        params: FamilyArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Search for property projectors (from a state file, or certify the
    /// two-dimensional no-go with random trials).
    Search {
        /// Instance JSON whose state seeds the search.
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Position-factor dimension for the no-go certificate (must be 2).
        #[arg(long)]
        dim1: Option<usize>,
        /// Number of random trial states for the certificate.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        rank_target: Option<usize>,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exit 1 when the search comes back empty.
        #[arg(long)]
        require_solution: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute per-bin screen distributions and cross terms as CSV.
    Simulate {
        #[arg(long)]
        family: Option<String>,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[command(flatten)]
        params: FamilyArgs,
        #[arg(long, default_value = "dft")]
        screen: String,
        /// Number of screen bins (default: one per basis slot).
        #[arg(long)]
        bins: Option<usize>,
        /// Selector for the cross-term column: none | T | Y | TY | Tplus.
        #[arg(long, default_value = "none")]
        select: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw labeled detection runs and write the joint counts table as CSV.
    Sample {
        #[arg(long)]
        family: Option<String>,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[command(flatten)]
        params: FamilyArgs,
        #[arg(long, default_value = "dft")]
        screen: String,
        #[arg(long)]
        bins: Option<usize>,
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate a screen construction.
    ScreenCheck {
        #[arg(long)]
        dim1: usize,
        #[arg(long, default_value = "dft")]
        screen: String,
        #[arg(long)]
        bins: Option<usize>,
    },
}

#[derive(Args, Clone)]
struct FamilyArgs {
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    lambda_re: Option<f64>,
    #[arg(long)]
    lambda_im: Option<f64>,
    #[arg(long)]
    mu_re: Option<f64>,
    #[arg(long)]
    mu_im: Option<f64>,
    #[arg(long)]
    family_seed: Option<u64>,
}

impl FamilyArgs {
    fn into_params(self, tag: FamilyTag) -> FamilyParams {
        let mut params = FamilyParams::new(tag);
        if let Some(q) = self.q {
            params.q = q;
        }
        if let Some(p) = self.p {
            params.p = p;
        }
        if let Some(theta) = self.theta {
            params.theta = theta;
        }
        params.lambda = C64::new(
            self.lambda_re.unwrap_or(params.lambda.re),
            self.lambda_im.unwrap_or(params.lambda.im),
        );
        params.mu = C64::new(
            self.mu_re.unwrap_or(params.mu.re),
            self.mu_im.unwrap_or(params.mu.im),
        );
        if let Some(seed) = self.family_seed {
            params.seed = seed;
        }
        params
    }
}

enum AppError {
    /// Malformed input: exit 2.
    Input(String),
    /// Domain failure: exit 1.
    Domain(String),
}

impl AppError {
    fn input(e: impl std::fmt::Display) -> Self {
        AppError::Input(e.to_string())
    }

    fn code(&self) -> ExitCode {
        match self {
            AppError::Input(_) => ExitCode::from(2),
            AppError::Domain(_) => ExitCode::from(1),
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Input(m) | AppError::Domain(m) => m,
        }
    }
}

fn tolerances(cli_tol: Option<f64>) -> Result<Tolerances, AppError> {
    let tol = match cli_tol {
        Some(t) => Some(t),
        None => match std::env::var("SLITLAB_TOL") {
            Ok(raw) => Some(
                raw.parse::<f64>()
                    .map_err(|_| AppError::Input(format!("SLITLAB_TOL `{raw}` is not a number")))?,
            ),
            Err(_) => None,
        },
    };
    Ok(match tol {
        Some(t) if t > 0.0 => Tolerances::with_equality(t),
        Some(t) => return Err(AppError::Input(format!("tolerance {t} must be positive"))),
        None => Tolerances::default(),
    })
}

fn parse_family(name: &str) -> Result<FamilyTag, AppError> {
    FamilyTag::parse(name).ok_or_else(|| {
        AppError::Input(format!(
            "unknown family `{name}` (expected dim4-sym, dim4-mu0, dim4-general, dim6, eraser, ideal)"
        ))
    })
}

fn parse_screen_kind(name: &str) -> Result<ScreenKind, AppError> {
    match name {
        "dft" => Ok(ScreenKind::Dft),
        "identity" => Ok(ScreenKind::Identity),
        other => Err(AppError::Input(format!("unknown screen kind `{other}`"))),
    }
}

/// An instance plus the eraser bundle when the eraser family was requested
/// (its selections need the raw plus-detector).
struct ResolvedInstance {
    instance: ProblemInstance,
    eraser: Option<EraserInstance>,
}

fn resolve_instance(
    family: Option<&str>,
    input: Option<&PathBuf>,
    params: &FamilyArgs,
) -> Result<ResolvedInstance, AppError> {
    match (family, input) {
        (Some(name), None) => {
            let tag = parse_family(name)?;
            let eraser = (tag == FamilyTag::Eraser).then(families::eraser_instance);
            let instance = params
                .clone()
                .into_params(tag)
                .build()
                .map_err(AppError::input)?;
            Ok(ResolvedInstance { instance, eraser })
        }
        (None, Some(path)) => {
            let loaded = load_instance(path, false).map_err(AppError::input)?;
            for w in &loaded.warnings {
                eprintln!("warning: {w}");
            }
            let tag = loaded.family.as_deref().and_then(FamilyTag::parse);
            let eraser = (tag == Some(FamilyTag::Eraser)).then(families::eraser_instance);
            Ok(ResolvedInstance {
                instance: loaded.instance,
                eraser,
            })
        }
        _ => Err(AppError::Input(
            "give exactly one of --family or --in".into(),
        )),
    }
}

fn build_instance_screen(
    instance: &ProblemInstance,
    kind: ScreenKind,
    bins: Option<usize>,
) -> Result<ScreenModel, AppError> {
    let dim1 = instance.psi.layout().dim1();
    build_screen(dim1, kind, bins.unwrap_or(dim1)).map_err(|e| AppError::Domain(e.to_string()))
}

fn run(cli: Cli) -> Result<(), AppError> {
    let tol = tolerances(cli.tol)?;
    match cli.command {
        Command::Verify { input, strict, out } => {
            let loaded = load_instance(&input, strict).map_err(AppError::input)?;
            for w in &loaded.warnings {
                eprintln!("warning: {w}");
            }
            let report = check_problem(&loaded.instance, &tol).map_err(AppError::input)?;
            for (name, cond) in report.conditions() {
                println!(
                    "{name}: {} (residual {:.3e})",
                    if cond.pass { "pass" } else { "FAIL" },
                    cond.residual
                );
            }
            println!(
                "K projector: {} (hermiticity {:.3e}, idempotence {:.3e})",
                if report.projector.pass {
                    "pass"
                } else {
                    "FAIL"
                },
                report.projector.hermiticity_residual,
                report.projector.idempotence_residual
            );
            println!("verdict: {}", if report.verdict { "pass" } else { "FAIL" });
            if let Some(path) = out {
                save_check_report(&path, &report).map_err(AppError::input)?;
            }
            if report.verdict {
                Ok(())
            } else {
                Err(AppError::Domain("verification failed".into()))
            }
        }

        Command::Family { name, params, out } => {
            let tag = parse_family(&name)?;
            let instance = params.into_params(tag).build().map_err(AppError::input)?;
            save_instance(&out, &instance, Some(tag)).map_err(AppError::input)?;
            println!(
                "family {} written to {} (dim {} x {})",
                tag.label(),
                out.display(),
                instance.psi.layout().dim1(),
                instance.psi.decomp().dim2()
            );
            Ok(())
        }

        Command::Search {
            input,
            dim1,
            trials,
            rank_target,
            restarts,
            seed,
            require_solution,
            out,
        } => {
            if let Some(d) = dim1 {
                if d != 2 {
                    return Err(AppError::Input(format!(
                        "--dim1 {d}: the trial certificate is defined for dim1 = 2"
                    )));
                }
                let cert = dim2_infeasibility(trials, seed).map_err(AppError::input)?;
                println!("exact argument: infeasible");
                for step in &cert.exact_steps {
                    println!("  - {step}");
                }
                println!(
                    "trials: {} random states, {} solutions, best residual {:.3e}",
                    cert.trials, cert.solutions_found, cert.min_residual
                );
                if let Some(path) = out {
                    let text = serde_json::to_string_pretty(&cert).map_err(AppError::input)? + "\n";
                    std::fs::write(path, text).map_err(AppError::input)?;
                }
                if cert.solutions_found > 0 {
                    return Err(AppError::Domain("unexpected solution at dim1 = 2".into()));
                }
                return Ok(());
            }
            let path = input.ok_or_else(|| AppError::Input("give --in or --dim1 2".into()))?;
            let loaded = load_instance(&path, false).map_err(AppError::input)?;
            let opts = SolverOptions {
                restarts,
                rank_target,
                seed,
                ..SolverOptions::default()
            };
            let outcome = search_solutions(&loaded.instance.psi, &opts).map_err(AppError::input)?;
            println!(
                "subspace dim {}, {} verified solutions, best residual {:.3e}",
                outcome.subspace_dim,
                outcome.solutions.len(),
                outcome.best_residual
            );
            if let Some(path) = out {
                save_search_report(&path, &outcome).map_err(AppError::input)?;
            }
            if require_solution && outcome.solutions.is_empty() {
                return Err(AppError::Domain("search found no solution".into()));
            }
            Ok(())
        }

        Command::Simulate {
            family,
            input,
            params,
            screen,
            bins,
            select,
            out,
        } => {
            let resolved = resolve_instance(family.as_deref(), input.as_ref(), &params)?;
            let kind = parse_screen_kind(&screen)?;
            let screen = build_instance_screen(&resolved.instance, kind, bins)?;
            let rows = simulate_rows(&resolved, &screen, &select)?;
            io::write_distribution_csv(&out, &rows).map_err(AppError::input)?;
            let max_cross = rows.iter().map(|r| r.cross_term.abs()).fold(0.0, f64::max);
            println!(
                "{} bins written to {}; max |cross_term| = {:.3e}",
                rows.len(),
                out.display(),
                max_cross
            );
            Ok(())
        }

        Command::Sample {
            family,
            input,
            params,
            screen,
            bins,
            n,
            seed,
            out,
        } => {
            if n == 0 {
                return Err(AppError::Input("--n must be at least 1".into()));
            }
            let resolved = resolve_instance(family.as_deref(), input.as_ref(), &params)?;
            let kind = parse_screen_kind(&screen)?;
            let screen = build_instance_screen(&resolved.instance, kind, bins)?;
            let outcome = sample_runs(&resolved.instance, &screen, n, seed)
                .map_err(|e| AppError::Domain(e.to_string()))?;
            io::write_joint_csv(&out, &outcome.table, Some(&outcome.counts))
                .map_err(AppError::input)?;
            let freqs = outcome.cavity_frequencies();
            for (cav, freq) in Cavity::ALL.iter().zip(freqs) {
                let (slit, detected) = cavity_inference(*cav);
                println!(
                    "cavity {}: frequency {:.6} => {}, property {}",
                    cav.label(),
                    freq,
                    slit.label(),
                    if detected { "detected" } else { "complement" }
                );
            }
            println!("{n} runs written to {}", out.display());
            Ok(())
        }

        Command::ScreenCheck { dim1, screen, bins } => {
            let kind = parse_screen_kind(&screen)?;
            let screen = build_screen(dim1, kind, bins.unwrap_or(dim1))
                .map_err(|e| AppError::Domain(e.to_string()))?;
            println!(
                "screen ok: dim {}, {} bins, resolution residual {:.3e}, max cross term {:.3e}",
                screen.dim1(),
                screen.n_bins(),
                screen.resolution_residual(),
                screen.max_slit_cross_term()
            );
            Ok(())
        }
    }
}

fn simulate_rows(
    resolved: &ResolvedInstance,
    screen: &ScreenModel,
    select: &str,
) -> Result<Vec<DistributionRow>, AppError> {
    let instance = &resolved.instance;
    let dim2 = instance.psi.decomp().dim2();
    let psi = instance.psi.to_vector();
    let ops = instance.lifted().map_err(AppError::input)?;

    // property-side selector: Y for solution instances, the plus detector for
    // the eraser setup
    let property_selector: ComplexMatrix = match &resolved.eraser {
        Some(e) => e.plus_detector.clone(),
        None => ops.property_detector.clone(),
    };
    let cross_selector: Option<ComplexMatrix> = match select {
        "none" => None,
        "T" => Some(ops.ws_detector.clone()),
        "Y" => Some(ops.property_detector.clone()),
        "TY" => Some(
            ops.ws_detector
                .mul(&ops.property_detector)
                .map_err(AppError::input)?,
        ),
        "Tplus" => Some(
            resolved
                .eraser
                .as_ref()
                .ok_or_else(|| {
                    AppError::Input("--select Tplus is only defined for the eraser family".into())
                })?
                .plus_detector
                .clone(),
        ),
        other => {
            return Err(AppError::Input(format!(
                "unknown selector `{other}` (expected none, T, Y, TY, Tplus)"
            )))
        }
    };

    let quantum =
        screen_distribution(&psi, screen, dim2).map_err(|e| AppError::Domain(e.to_string()))?;
    let classical = classical_distribution(&psi, &ops.ws_property, screen, dim2)
        .map_err(|e| AppError::Domain(e.to_string()))?;
    let cross = interference_term(
        &psi,
        &ops.ws_property,
        screen,
        dim2,
        cross_selector.as_ref(),
    )
    .map_err(|e| AppError::Domain(e.to_string()))?;
    let sel_y = selected_distribution(&psi, &property_selector, screen, dim2)
        .map_err(|e| AppError::Domain(e.to_string()))?;
    let sel_t = selected_distribution(&psi, &ops.ws_detector, screen, dim2)
        .map_err(|e| AppError::Domain(e.to_string()))?;

    Ok((0..screen.n_bins())
        .map(|b| DistributionRow {
            bin: b,
            p_quantum: quantum[b],
            p_classical: classical[b],
            cross_term: cross[b],
            p_selected_y: sel_y[b],
            p_selected_t: sel_t[b],
        })
        .collect())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}
