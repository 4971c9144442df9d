//! Stability sweep for the full-aperture cutoff.
//!
//! The contrast is sampled on the basis nodes and pushed through the same
//! discrete forward operator, so the only error sources left are truncation
//! and noise.

use num_complex::Complex64;
use prolate_core::analysis::projection_error_onto;
use prolate_core::disk::ScaledDiskBasis;
use prolate_core::forward::{add_noise_absolute, synthesize_born, ContrastField, DataGrid};
use prolate_core::recon::{beta_of_alpha, cutoff_full, reconstruct_full, ReconOptions};
use prolate_core::Result;
use serde::Serialize;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentRow {
    /// Absolute noise level.
    pub delta: f64,
    pub alpha: f64,
    pub seed: u64,
    pub error: f64,
    pub bound: f64,
    pub beta: f64,
    pub truncation: f64,
    pub retained: usize,
}

pub const COLUMNS: &str = "delta,alpha,seed,error,bound,beta,truncation,retained";

/// Contrast sampled on the basis nodes and its discrete Born data.
pub fn discrete_data(
    contrast: &ContrastField,
    basis: &ScaledDiskBasis,
) -> Result<(Vec<f64>, DataGrid)> {
    let q: Vec<f64> = basis.quad.nodes.iter().map(|&p| contrast.eval(p)).collect();
    let sampled = ContrastField::sampled(basis.quad.clone(), q.clone())?;
    let data = synthesize_born(&sampled, basis.kernel_scale(), &basis.quad)?
        .with_geometry(basis.geometry());
    Ok((q, data))
}

/// Reconstructs for every `(δ, α, seed)` and pairs the `L²(D)` error with
/// `δ/β(α) + ‖π q - q‖`.
pub fn experiment_stability(
    contrast: &ContrastField,
    basis: &ScaledDiskBasis,
    deltas: &[f64],
    alphas: &[f64],
    seeds: &[u64],
) -> Result<Vec<ExperimentRow>> {
    let (q, clean) = discrete_data(contrast, basis)?;
    let mut rows = Vec::new();
    for &alpha in alphas {
        let beta = beta_of_alpha(basis, alpha)?;
        let retained = cutoff_full(basis, alpha);
        let truncation = projection_error_onto(&q, basis, &retained);
        for &delta in deltas {
            for &seed in seeds {
                let noisy = add_noise_absolute(&clean, delta, seed)?;
                let rec = reconstruct_full(&noisy, basis, alpha, &ReconOptions::default())?;
                let error = basis
                    .quad
                    .weights
                    .iter()
                    .zip(rec.node_values.iter().zip(&q))
                    .map(|(w, (v, &t))| w * (v - Complex64::new(t, 0.0)).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                rows.push(ExperimentRow {
                    delta,
                    alpha,
                    seed,
                    error,
                    bound: delta / beta + truncation,
                    beta,
                    truncation,
                    retained: retained.len(),
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_table<W: Write>(mut w: W, rows: &[ExperimentRow]) -> std::io::Result<()> {
    writeln!(w, "{COLUMNS}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.delta, r.alpha, r.seed, r.error, r.bound, r.beta, r.truncation, r.retained
        )?;
    }
    w.flush()
}
