//! Run the four-cavity ideal apparatus: exact joint (cavity, bin) table,
//! the inference each cavity outcome licenses, and a seeded Monte Carlo run
//! compared against the exact marginals.
//!
//! ```bash
//! cargo run -p slitlab --example ideal_apparatus_run
//! ```

use slitlab::block::Cavity;
use slitlab::families::{cavity_inference, ideal_apparatus_instance};
use slitlab::interference::joint_outcome_distribution;
use slitlab::sample::{chi_square_statistic, chi_square_threshold, sample_runs};
use slitlab::screen::{build_screen, ScreenKind};

fn main() {
    let apparatus = ideal_apparatus_instance().expect("verified instance");
    let screen = build_screen(6, ScreenKind::Dft, 6).expect("screen");
    let table = joint_outcome_distribution(&apparatus.instance, &screen).expect("joint table");

    println!("exact joint P(cavity, bin):");
    print!("{:>8}", "");
    for b in 0..screen.n_bins() {
        print!("{:>10}", format!("bin {b}"));
    }
    println!("{:>10}", "marginal");
    for (i, cav) in Cavity::ALL.iter().enumerate() {
        let (slit, detected) = cavity_inference(*cav);
        print!("{:>8}", cav.label());
        for p in &table.probs[i] {
            print!("{p:>10.5}");
        }
        println!(
            "{:>10.5}   => {}, property {}",
            table.probs[i].iter().sum::<f64>(),
            slit.label(),
            if detected { "detected" } else { "complement" }
        );
    }

    let n = 1_000_000;
    let outcome = sample_runs(&apparatus.instance, &screen, n, 7).expect("sampling");
    println!("\n{n} seeded runs: cavity frequencies vs exact");
    for (cav, (freq, exact)) in Cavity::ALL.iter().zip(
        outcome
            .cavity_frequencies()
            .iter()
            .zip(table.cavity_marginal()),
    ) {
        println!("  {}: {freq:.5} vs {exact:.5}", cav.label());
    }

    let observed: Vec<u64> = outcome
        .counts
        .iter()
        .flat_map(|row| row.iter().copied())
        .collect();
    let (stat, df) = chi_square_statistic(&observed, &table.flatten(), n);
    let threshold = chi_square_threshold(df, 0.001);
    println!(
        "\nchi-square vs exact joint: {stat:.2} on {df} dof (0.001-level threshold {threshold:.2}) => {}",
        if stat <= threshold { "consistent" } else { "inconsistent" }
    );
}
