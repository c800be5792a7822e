//! Audit of the mu = 0 family completion: the tempting closed form
//! (u = e^{i theta} sqrt(p(1-p)/(1+|lambda|^2)), q = 1/(1+|lambda|^2)) is not
//! idempotent for any p in (0, 1); the completion this crate derives from the
//! idempotence conditions is.
//!
//! ```bash
//! cargo run -p slitlab --example mu_zero_audit
//! ```

use slitlab::checker::{check_problem, Tolerances};
use slitlab::families::{
    family_dim4_mu0, mu_zero_derived_completion, mu_zero_uncorrected_completion,
};
use slitlab::linalg::{ComplexMatrix, C64};

fn assemble(lambda: C64, p: f64, u: C64, q: f64) -> ComplexMatrix {
    let z = C64::new(0.0, 0.0);
    let l2 = lambda.norm_sqr();
    #[rustfmt::skip]
    let entries = vec![
        C64::new(1.0, 0.0), z, z, z,
        z, C64::new(p, 0.0), -lambda * u, u,
        z, (-lambda * u).conj(), C64::new(l2 * q, 0.0), -lambda.conj() * C64::new(q, 0.0),
        z, u.conj(), -lambda * C64::new(q, 0.0), C64::new(q, 0.0),
    ];
    ComplexMatrix::new(4, 4, entries).expect("4x4")
}

fn main() {
    let lambda = C64::new(1.0, 0.0);
    println!("lambda = {lambda}");
    println!(
        "{:>6} {:>14} {:>14} {:>12} {:>12}",
        "p", "q(naive)", "q(derived)", "idem(naive)", "idem(drvd)"
    );
    for i in 1..20 {
        let p = i as f64 * 0.05;
        let (u_naive, q_naive) = mu_zero_uncorrected_completion(lambda, p, 0.0);
        let (u_derived, q_derived) = mu_zero_derived_completion(lambda, p, 0.0).unwrap();
        let naive = assemble(lambda, p, u_naive, q_naive).idempotence_residual();
        let derived = assemble(lambda, p, u_derived, q_derived).idempotence_residual();
        println!("{p:>6.2} {q_naive:>14.6} {q_derived:>14.6} {naive:>12.3e} {derived:>12.3e}");
    }

    println!("\nend-to-end: the derived completion verifies as a full instance");
    for (lambda, p) in [
        (C64::new(1.0, 0.0), 0.5),
        (C64::new(2.0, 0.0), 0.3),
        (C64::new(0.5, 0.5), 0.7),
    ] {
        let instance = family_dim4_mu0(lambda, p, 0.0).unwrap();
        let report = check_problem(&instance, &Tolerances::default()).unwrap();
        println!("  lambda = {lambda}, p = {p}: verdict {}", report.verdict);
    }
}
