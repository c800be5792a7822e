//! Certify that a two-dimensional position factor admits no solution: the
//! exact elimination argument plus a seeded random search that never finds
//! one.
//!
//! ```bash
//! cargo run -p slitlab --example dim2_no_solution
//! ```

use slitlab::families::dim2_infeasibility;

fn main() {
    let cert = dim2_infeasibility(1000, 42).expect("certificate");

    println!(
        "exact argument ({}):",
        if cert.exact_infeasible {
            "infeasible"
        } else {
            "gap!"
        }
    );
    for (i, step) in cert.exact_steps.iter().enumerate() {
        println!("  {}. {step}", i + 1);
    }

    println!("\nstochastic certificate:");
    println!("  trials:          {}", cert.trials);
    println!("  solutions found: {}", cert.solutions_found);
    println!(
        "  best residual:   {:.3e} (infeasibility of the detection constraints)",
        cert.min_residual
    );
    assert_eq!(cert.solutions_found, 0);
}
