//! Seeded Born-rule sampling of detection runs.
//!
//! Each run draws one (cavity, screen bin) outcome from the exact joint
//! table by inverse CDF and labels it with what the cavity outcome reveals.
//! Sampling is reproducible: the generator is seeded explicitly, and worker
//! sub-streams are derived from (seed, worker index) so a parallel split
//! would agree with the serial run.

use crate::block::Cavity;
use crate::checker::ProblemInstance;
use crate::families::{cavity_inference, Slit};
use crate::interference::{joint_outcome_distribution, JointTable, LabError};
use crate::screen::ScreenModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// One labeled detection run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDraw {
    pub cavity: Cavity,
    pub bin: usize,
    pub slit: Slit,
    pub property_detected: bool,
}

/// Empirical counts of a sampling run plus the exact table they were drawn
/// from.
#[derive(Debug, Clone)]
pub struct SampleOutcome {
    /// counts[cavity][bin]
    pub counts: [Vec<u64>; 4],
    pub draws: Vec<LabeledDraw>,
    pub table: JointTable,
    pub n: usize,
}

impl SampleOutcome {
    pub fn cavity_frequencies(&self) -> [f64; 4] {
        let n = self.n as f64;
        [
            self.counts[0].iter().sum::<u64>() as f64 / n,
            self.counts[1].iter().sum::<u64>() as f64 / n,
            self.counts[2].iter().sum::<u64>() as f64 / n,
            self.counts[3].iter().sum::<u64>() as f64 / n,
        ]
    }

    pub fn screen_frequencies(&self) -> Vec<f64> {
        let bins = self.counts[0].len();
        let n = self.n as f64;
        (0..bins)
            .map(|b| self.counts.iter().map(|row| row[b]).sum::<u64>() as f64 / n)
            .collect()
    }
}

/// Draws `n` labeled runs from the joint outcome distribution of an instance.
pub fn sample_runs(
    instance: &ProblemInstance,
    screen: &ScreenModel,
    n: usize,
    seed: u64,
) -> Result<SampleOutcome, LabError> {
    let table = joint_outcome_distribution(instance, screen)?;
    let bins = table.n_bins();
    let flat = table.flatten();
    // inverse-CDF over the flattened (cavity-major) joint table
    let mut cdf = Vec::with_capacity(flat.len());
    let mut acc = 0.0;
    for p in &flat {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1); // worker 0 of the sub-seed contract
    let mut counts: [Vec<u64>; 4] = [vec![0; bins], vec![0; bins], vec![0; bins], vec![0; bins]];
    let mut draws = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.gen_range(0.0..total);
        let idx = cdf.partition_point(|&c| c <= u).min(flat.len() - 1);
        let cavity = Cavity::ALL[idx / bins];
        let bin = idx % bins;
        counts[idx / bins][bin] += 1;
        let (slit, property_detected) = cavity_inference(cavity);
        draws.push(LabeledDraw {
            cavity,
            bin,
            slit,
            property_detected,
        });
    }
    Ok(SampleOutcome {
        counts,
        draws,
        table,
        n,
    })
}

/// Pearson chi-square statistic of observed counts against exact cell
/// probabilities. Cells with zero probability are excluded from the statistic
/// but must be empty; returns the statistic and the degrees of freedom.
pub fn chi_square_statistic(observed: &[u64], probs: &[f64], n: usize) -> (f64, usize) {
    assert_eq!(observed.len(), probs.len());
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&obs, &p) in observed.iter().zip(probs) {
        if p <= 1e-15 {
            if obs > 0 {
                return (f64::INFINITY, observed.len().saturating_sub(1));
            }
            continue;
        }
        let expect = p * n as f64;
        let diff = obs as f64 - expect;
        stat += diff * diff / expect;
        cells += 1;
    }
    (stat, cells.saturating_sub(1))
}

/// Upper chi-square quantile for a test at the given significance level.
pub fn chi_square_threshold(df: usize, significance: f64) -> f64 {
    ChiSquared::new(df as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - significance)
}
