//! Build the canonical dimension-6 instance and walk through its full
//! verification: the five conditions, the projector check, and the two
//! detector conditionals.
//!
//! ```bash
//! cargo run -p slitlab --example verify_canonical
//! ```

use slitlab::checker::{check_problem, classify_correlation, conditional_probability, Tolerances};
use slitlab::families::family_dim6;
use slitlab::linalg::commutator;

fn main() {
    let instance = family_dim6(0.25, 0.0).expect("canonical member");
    let k = instance.property_projector.as_ref().unwrap();
    let tol = Tolerances::default();

    println!("property projector (row major, real parts):");
    for r in 0..k.rows() {
        let row: Vec<String> = (0..k.cols())
            .map(|c| format!("{:+.2}", k.get(r, c).re))
            .collect();
        println!("  [{}]", row.join(", "));
    }

    let l = instance.psi.layout().slit_projector();
    println!(
        "\nslit commutator norm ||[L, K]||_F = {:.12} (sqrt(1/2) = {:.12})",
        commutator(&l, k).unwrap().frobenius_norm(),
        0.5f64.sqrt()
    );

    let report = check_problem(&instance, &tol).expect("checkable");
    println!("\ncondition            pass   residual");
    for (name, cond) in report.conditions() {
        println!("{name:<20} {:<6} {:.3e}", cond.pass, cond.residual);
    }
    println!(
        "K projector          {:<6} herm {:.3e}, idem {:.3e}",
        report.projector.pass,
        report.projector.hermiticity_residual,
        report.projector.idempotence_residual
    );
    println!("verdict: {}", report.verdict);

    let ops = instance.lifted().unwrap();
    let psi = instance.psi.to_vector();
    let p_y_t =
        conditional_probability(&ops.property_detector, &ops.ws_detector, &psi, &tol).unwrap();
    let p_t_y =
        conditional_probability(&ops.ws_detector, &ops.property_detector, &psi, &tol).unwrap();
    let class = classify_correlation(&instance, &tol).unwrap();
    println!(
        "\np(Y=1 | T=1) = {p_y_t:.6}   p(T=1 | Y=1) = {p_t_y:.6}   => {:?}",
        class.kind
    );
}
