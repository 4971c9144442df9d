//! Picard-series reconstruction and spectral-cutoff regularization.

use crate::disk::ScaledDiskBasis;
use crate::error::{param, Error, Result};
use crate::forward::DataGrid;
use crate::numerics::QuadratureRule;
use crate::point::Point;
use crate::symset::SymSetBasis;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Largest fraction of the domain weight that may be flagged missing.
pub const MAX_MISSING_FRACTION: f64 = 0.1;

/// Common view of the data-domain eigensystems: modes `φ_i` with
/// `∫_D e^{iκ p·p'} φ_i(p') dp' = μ_i φ_i(p)` and `‖φ_i‖_{L²(D)} = λ_i`.
pub trait SpectralBasis {
    fn quadrature(&self) -> &QuadratureRule;
    fn mode_count(&self) -> usize;
    fn mode_id(&self, i: usize) -> String;
    fn mu(&self, i: usize) -> Complex64;
    /// `φ_i / λ_i` at the quadrature nodes.
    fn unit_values(&self, i: usize) -> &[f64];
    /// `φ_i / λ_i` at an arbitrary point (analytic extension off the domain).
    fn eval_unit(&self, i: usize, p: Point) -> f64;
    /// Whether `μ_i` is resolved well enough to divide by.
    fn usable(&self, i: usize) -> bool;
}

impl SpectralBasis for ScaledDiskBasis {
    fn quadrature(&self) -> &QuadratureRule {
        &self.quad
    }

    fn mode_count(&self) -> usize {
        self.base.modes.len()
    }

    fn mode_id(&self, i: usize) -> String {
        self.base.modes[i].id()
    }

    fn mu(&self, i: usize) -> Complex64 {
        ScaledDiskBasis::mu(self, &self.base.modes[i])
    }

    fn unit_values(&self, i: usize) -> &[f64] {
        &self.unit[i]
    }

    fn eval_unit(&self, i: usize, p: Point) -> f64 {
        let mode = &self.base.modes[i];
        self.eval(mode, p) / self.mode_norm(mode)
    }

    fn usable(&self, i: usize) -> bool {
        self.base.modes[i].usable
    }
}

/// Symmetric-set modes with their node values normalized once.
#[derive(Debug, Clone)]
pub struct NormalizedSymSet<'a> {
    pub basis: &'a SymSetBasis,
    unit: Vec<Vec<f64>>,
}

impl<'a> NormalizedSymSet<'a> {
    pub fn new(basis: &'a SymSetBasis) -> Self {
        let unit = (0..basis.modes.len())
            .map(|n| {
                let lam = basis.mode_norm(n);
                basis.modes[n].values.iter().map(|v| v / lam).collect()
            })
            .collect();
        Self { basis, unit }
    }
}

impl SpectralBasis for NormalizedSymSet<'_> {
    fn quadrature(&self) -> &QuadratureRule {
        &self.basis.quad
    }

    fn mode_count(&self) -> usize {
        self.basis.modes.len()
    }

    fn mode_id(&self, i: usize) -> String {
        i.to_string()
    }

    fn mu(&self, i: usize) -> Complex64 {
        self.basis.mu(i)
    }

    fn unit_values(&self, i: usize) -> &[f64] {
        &self.unit[i]
    }

    fn eval_unit(&self, i: usize, p: Point) -> f64 {
        self.basis.eval(i, p) / self.basis.mode_norm(i)
    }

    fn usable(&self, _i: usize) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeCoefficient {
    pub index: usize,
    pub id: String,
    pub coeff: Complex64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReconOptions {
    /// Drop the imaginary part of the reconstruction on the nodes.
    pub realify: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionResult {
    pub alpha: f64,
    /// `min |μ|` over the retained set (full aperture only).
    pub beta_alpha: Option<f64>,
    /// Weighted norm of the noise recorded on the data.
    pub delta: f64,
    /// Retained modes with their coefficients in the unit-normalized basis.
    pub modes: Vec<ModeCoefficient>,
    /// Reconstruction at the quadrature nodes.
    pub node_values: Vec<Complex64>,
    /// `‖Σ μ q φ̂ - u‖` on the data nodes.
    pub residual: f64,
    /// Weighted norm of the imaginary part removed by `realify`.
    pub imag_dropped: f64,
    pub realified: bool,
}

impl ReconstructionResult {
    /// Evaluates the reconstructed contrast at `x`.
    pub fn eval<B: SpectralBasis + ?Sized>(&self, basis: &B, x: Point) -> Complex64 {
        let z = self
            .modes
            .iter()
            .map(|mc| mc.coeff * basis.eval_unit(mc.index, x))
            .sum::<Complex64>();
        if self.realified {
            Complex64::new(z.re, 0.0)
        } else {
            z
        }
    }
}

fn check_data<B: SpectralBasis + ?Sized>(data: &DataGrid, basis: &B) -> Result<()> {
    if !data.rule.same_nodes(basis.quadrature()) {
        return Err(Error::NodeMismatch(format!(
            "{} data nodes vs {} basis nodes, or differing coordinates",
            data.rule.len(),
            basis.quadrature().len()
        )));
    }
    let fraction = data.missing_fraction();
    if fraction > MAX_MISSING_FRACTION {
        return Err(Error::InsufficientCoverage { fraction });
    }
    Ok(())
}

/// `⟨u, φ̂⟩ = Σ w u φ̂` over nodes with data.
fn inner(data: &DataGrid, unit: &[f64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for ((&w, &u), (&v, &m)) in data
        .rule
        .weights
        .iter()
        .zip(&data.values)
        .zip(unit.iter().zip(&data.missing))
    {
        if !m {
            acc += u * (w * v);
        }
    }
    acc
}

/// Picard coefficients `⟨u, φ̂_i⟩ / μ_i` for every mode.
pub fn picard_coefficients<B: SpectralBasis + ?Sized>(
    data: &DataGrid,
    basis: &B,
) -> Result<Vec<Complex64>> {
    check_data(data, basis)?;
    Ok((0..basis.mode_count())
        .map(|i| inner(data, basis.unit_values(i)) / basis.mu(i))
        .collect())
}

/// Reconstruction restricted to the modes in `retained`.
pub fn reconstruct_modes<B: SpectralBasis + ?Sized>(
    data: &DataGrid,
    basis: &B,
    retained: &[usize],
    alpha: f64,
    options: &ReconOptions,
) -> Result<ReconstructionResult> {
    check_data(data, basis)?;
    if retained.is_empty() {
        return Err(Error::EmptyCutoff { alpha });
    }
    let n = data.rule.len();
    let mut node_values = vec![Complex64::new(0.0, 0.0); n];
    let mut fitted = vec![Complex64::new(0.0, 0.0); n];
    let mut modes = Vec::with_capacity(retained.len());
    for &i in retained {
        let unit = basis.unit_values(i);
        let proj = inner(data, unit);
        let coeff = proj / basis.mu(i);
        for j in 0..n {
            node_values[j] += coeff * unit[j];
            fitted[j] += proj * unit[j];
        }
        modes.push(ModeCoefficient {
            index: i,
            id: basis.mode_id(i),
            coeff,
        });
    }
    let residual = data
        .rule
        .weights
        .iter()
        .zip(fitted.iter().zip(&data.values))
        .zip(&data.missing)
        .filter(|(_, &m)| !m)
        .map(|((w, (f, u)), _)| w * (f - u).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let mut imag_dropped = 0.0;
    if options.realify {
        imag_dropped = data
            .rule
            .weights
            .iter()
            .zip(&node_values)
            .map(|(w, v)| w * v.im * v.im)
            .sum::<f64>()
            .sqrt();
        node_values.iter_mut().for_each(|v| v.im = 0.0);
    }
    Ok(ReconstructionResult {
        alpha,
        beta_alpha: None,
        delta: data.meta.delta_abs,
        modes,
        node_values,
        residual,
        imag_dropped,
        realified: options.realify,
    })
}

/// Resolved disk modes with `χ < 1/α`, tested as `α < 1/χ` so that
/// `α = 1/χ` written as a float lands on the excluded side.
pub fn cutoff_full(basis: &ScaledDiskBasis, alpha: f64) -> Vec<usize> {
    basis
        .base
        .modes
        .iter()
        .enumerate()
        .filter(|(_, md)| md.usable && alpha < 1.0 / md.chi)
        .map(|(i, _)| i)
        .collect()
}

/// Symmetric-set modes with `|μ| > α`.
pub fn cutoff_partial(basis: &SymSetBasis, alpha: f64) -> Vec<usize> {
    (0..basis.modes.len())
        .filter(|&n| basis.mu(n).norm() > alpha)
        .collect()
}

/// `β(α) = min |μ|` over the full-aperture cutoff set.
pub fn beta_of_alpha(basis: &ScaledDiskBasis, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return param(format!("alpha must be positive, got {alpha}"));
    }
    cutoff_full(basis, alpha)
        .into_iter()
        .map(|i| SpectralBasis::mu(basis, i).norm())
        .min_by(f64::total_cmp)
        .ok_or(Error::EmptyCutoff { alpha })
}

/// Full-aperture regularized solution: modes with `χ(c) < 1/α`.
pub fn reconstruct_full(
    data: &DataGrid,
    basis: &ScaledDiskBasis,
    alpha: f64,
    options: &ReconOptions,
) -> Result<ReconstructionResult> {
    let beta = beta_of_alpha(basis, alpha)?;
    let retained = cutoff_full(basis, alpha);
    let mut out = reconstruct_modes(data, basis, &retained, alpha, options)?;
    out.beta_alpha = Some(beta);
    Ok(out)
}

/// Partial-data spectral cutoff: modes with `|μ| > α`.
pub fn reconstruct_partial(
    data: &DataGrid,
    basis: &SymSetBasis,
    alpha: f64,
    options: &ReconOptions,
) -> Result<ReconstructionResult> {
    if !(alpha > 0.0) {
        return param(format!("alpha must be positive, got {alpha}"));
    }
    let retained = cutoff_partial(basis, alpha);
    reconstruct_modes(
        data,
        &NormalizedSymSet::new(basis),
        &retained,
        alpha,
        options,
    )
}

/// A-priori choice `α(δ) = c₀ (δ/E)^{1/(1+σ)}`.
pub fn choose_alpha_partial(delta: f64, e: f64, sigma: f64, c0: f64) -> Result<f64> {
    for (name, v) in [("delta", delta), ("E", e), ("sigma", sigma), ("c0", c0)] {
        if !(v > 0.0 && v.is_finite()) {
            return param(format!("{name} must be positive, got {v}"));
        }
    }
    Ok(c0 * (delta / e).powf(1.0 / (1.0 + sigma)))
}
