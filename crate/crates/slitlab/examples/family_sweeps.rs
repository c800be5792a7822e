//! Sweep the two closed-form families over their parameter ranges and print
//! the verification margins, projector ranks, and correlation classes.
//!
//! ```bash
//! cargo run -p slitlab --example family_sweeps
//! ```

use slitlab::checker::{check_problem, classify_correlation, Tolerances};
use slitlab::families::{family_dim4_sym, family_dim6};
use slitlab::linalg::projector_rank;

fn main() {
    let tol = Tolerances::default();
    let thetas = [0.0, std::f64::consts::FRAC_PI_3, 1.0];

    println!("dimension-4 symmetric family");
    println!(
        "{:>6} {:>6} {:>5} {:>11} {:>14}",
        "q", "theta", "rank", "idem", "class"
    );
    for i in 1..10 {
        let q = i as f64 * 0.05;
        for theta in thetas {
            let instance = family_dim4_sym(q, theta).unwrap();
            let k = instance.property_projector.as_ref().unwrap();
            let class = classify_correlation(&instance, &tol).unwrap();
            println!(
                "{q:>6.2} {theta:>6.2} {:>5} {:>11.2e} {:>14?}",
                projector_rank(k, 1e-10).unwrap(),
                k.idempotence_residual(),
                class.kind
            );
        }
    }

    println!("\ndimension-6 family");
    println!(
        "{:>6} {:>6} {:>5} {:>11} {:>9} {:>14}",
        "p", "theta", "rank", "idem", "margin", "class"
    );
    for i in 1..10 {
        let p = i as f64 * 0.05;
        for theta in thetas {
            let instance = family_dim6(p, theta).unwrap();
            let k = instance.property_projector.as_ref().unwrap();
            let report = check_problem(&instance, &tol).unwrap();
            let class = classify_correlation(&instance, &tol).unwrap();
            println!(
                "{p:>6.2} {theta:>6.2} {:>5} {:>11.2e} {:>9.3} {:>14?}",
                projector_rank(k, 1e-10).unwrap(),
                k.idempotence_residual(),
                report.nondegeneracy.residual,
                class.kind
            );
        }
    }
}
