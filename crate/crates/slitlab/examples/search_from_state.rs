//! Given only the default dimension-6 state, search for property projectors
//! numerically and fit every hit back to the closed-form family.
//!
//! ```bash
//! cargo run -p slitlab --example search_from_state
//! ```

use slitlab::families::{dim6_default_state, family_dim6, fit_dim6_member};
use slitlab::solver::{build_constraint_subspace, search_solutions, SolverOptions};

fn main() {
    let psi = dim6_default_state().expect("state");
    let subspace = build_constraint_subspace(&psi).expect("feasible constraints");
    println!(
        "constraint subspace: {} free parameters, infeasibility {:.2e}",
        subspace.dim(),
        subspace.infeasibility()
    );

    let opts = SolverOptions {
        restarts: 40,
        rank_target: Some(3),
        seed: 2024,
        ..SolverOptions::default()
    };
    let outcome = search_solutions(&psi, &opts).expect("search runs");
    println!(
        "{} verified solutions from {} restarts (best residual {:.2e})\n",
        outcome.solutions.len(),
        opts.restarts,
        outcome.best_residual
    );

    println!("{:>4} {:>8} {:>8} {:>12}", "#", "p", "theta", "family dist");
    for (i, inst) in outcome.solutions.iter().enumerate().take(12) {
        let k = inst.property_projector.as_ref().unwrap();
        let (p, theta) = fit_dim6_member(k).expect("fits the family");
        let member = family_dim6(p, theta).unwrap().property_projector.unwrap();
        println!(
            "{i:>4} {p:>8.4} {theta:>8.4} {:>12.2e}",
            k.distance(&member).unwrap()
        );
    }
    if outcome.solutions.len() > 12 {
        println!("  ... and {} more", outcome.solutions.len() - 12);
    }
}
