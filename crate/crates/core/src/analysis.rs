//! Spectral-cutoff projection, spectral Sobolev norms, band-limited
//! extrapolation and basis self-validation.

use crate::disk::{DiskBasis, DiskMode, ScaledDiskBasis};
use crate::error::{Error, Result};
use crate::forward::DataGrid;
use crate::geometry::{build_polar_quadrature, Geometry};
use crate::numerics::QuadratureRule;
use crate::point::Point;
use crate::symset::{Parity, SymSetBasis};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

fn weighted_dot(rule: &QuadratureRule, a: &[f64], b: &[f64]) -> f64 {
    rule.weights
        .iter()
        .zip(a)
        .zip(b)
        .map(|((w, x), y)| w * x * y)
        .sum()
}

fn weighted_norm(rule: &QuadratureRule, a: &[f64]) -> f64 {
    weighted_dot(rule, a, a).sqrt()
}

/// Indices of modes with `χ < 1/α`.
pub fn pi_alpha_modes(basis: &ScaledDiskBasis, alpha: f64) -> Vec<usize> {
    basis
        .base
        .modes
        .iter()
        .enumerate()
        .filter(|(_, md)| alpha < 1.0 / md.chi)
        .map(|(i, _)| i)
        .collect()
}

/// Orthogonal projection of nodal values onto the given modes.
pub fn project_onto(u: &[f64], basis: &ScaledDiskBasis, modes: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; u.len()];
    for &i in modes {
        let v = &basis.unit[i];
        let c = weighted_dot(&basis.quad, u, v);
        out.iter_mut().zip(v).for_each(|(o, x)| *o += c * x);
    }
    out
}

/// `π_α u = Σ_{χ < 1/α} ⟨u, ψ̂⟩ ψ̂` on the basis quadrature nodes.
pub fn project_pi_alpha(u: &[f64], basis: &ScaledDiskBasis, alpha: f64) -> Vec<f64> {
    project_onto(u, basis, &pi_alpha_modes(basis, alpha))
}

/// `‖π_α u - u‖_{L²(D)}`.
pub fn projection_error(u: &[f64], basis: &ScaledDiskBasis, alpha: f64) -> f64 {
    projection_error_onto(u, basis, &pi_alpha_modes(basis, alpha))
}

/// `‖Pu - u‖_{L²(D)}` for the projection onto `modes`.
pub fn projection_error_onto(u: &[f64], basis: &ScaledDiskBasis, modes: &[usize]) -> f64 {
    let p = project_onto(u, basis, modes);
    let diff: Vec<f64> = p.iter().zip(u).map(|(a, b)| a - b).collect();
    weighted_norm(&basis.quad, &diff)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SobolevNorm {
    pub norm: f64,
    /// `‖u - Πu‖ / ‖u‖` with `Π` the projection onto every computed mode.
    pub tail_fraction: f64,
}

/// `sqrt(Σ χ^s |⟨u, ψ̂⟩|²)` over the computed modes.
pub fn sobolev_norm_tilde(u: &[f64], basis: &ScaledDiskBasis, s: f64) -> SobolevNorm {
    let mut sum = 0.0;
    let mut proj = vec![0.0; u.len()];
    for (md, v) in basis.base.modes.iter().zip(&basis.unit) {
        let c = weighted_dot(&basis.quad, u, v);
        sum += md.chi.powf(s) * c * c;
        proj.iter_mut().zip(v).for_each(|(o, x)| *o += c * x);
    }
    let total = weighted_norm(&basis.quad, u);
    let diff: Vec<f64> = proj.iter().zip(u).map(|(a, b)| a - b).collect();
    let tail = weighted_norm(&basis.quad, &diff);
    SobolevNorm {
        norm: sum.sqrt(),
        tail_fraction: if total > 0.0 { tail / total } else { 0.0 },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub alpha: f64,
    pub retained: usize,
    pub error_l2: f64,
    /// `α^{s/2} ‖u‖_{H̃ˢ}`.
    pub bound: f64,
    pub passed: bool,
}

/// Measures `‖π_α u - u‖` against `α^{s/2} ‖u‖_{H̃ˢ}`.
pub fn projection_report(
    u: &[f64],
    basis: &ScaledDiskBasis,
    alpha: f64,
    s: f64,
) -> ProjectionReport {
    let retained = pi_alpha_modes(basis, alpha).len();
    let error_l2 = projection_error(u, basis, alpha);
    let bound = alpha.powf(0.5 * s) * sobolev_norm_tilde(u, basis, s).norm;
    ProjectionReport {
        alpha,
        retained,
        error_l2,
        bound,
        passed: error_l2 <= bound * (1.0 + 1e-12),
    }
}

/// Band-limited extension of data on the data disk to arbitrary points.
pub fn extrapolate(
    data: &DataGrid,
    basis: &ScaledDiskBasis,
    targets: &[Point],
) -> Result<Vec<Complex64>> {
    extrapolate_with(data, basis, targets, |_| true)
}

/// As [`extrapolate`], using only resolved modes accepted by `keep`.
pub fn extrapolate_with(
    data: &DataGrid,
    basis: &ScaledDiskBasis,
    targets: &[Point],
    keep: impl Fn(&DiskMode) -> bool,
) -> Result<Vec<Complex64>> {
    if !data.rule.same_nodes(&basis.quad) {
        return Err(Error::NodeMismatch(
            "data nodes differ from the basis quadrature".into(),
        ));
    }
    let mut terms = Vec::new();
    for (i, md) in basis.base.modes.iter().enumerate() {
        if !md.usable || !keep(md) {
            continue;
        }
        let coeff: Complex64 = data
            .rule
            .weights
            .iter()
            .zip(&data.values)
            .zip(basis.unit[i].iter().zip(&data.missing))
            .filter(|(_, (_, &m))| !m)
            .map(|((&w, &u), (&v, _))| u * (w * v))
            .sum();
        terms.push((md, coeff));
    }
    Ok(targets
        .iter()
        .map(|&p| {
            terms
                .iter()
                .map(|(md, c)| c * (basis.eval(md, p) / basis.mode_norm(md)))
                .sum()
        })
        .collect())
}

/// One line of a validation report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub check: String,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: &str, residual: f64, threshold: f64) -> Self {
        Self {
            check: name.into(),
            residual,
            threshold,
            passed: residual <= threshold,
        }
    }
}

pub const GRAM_TOLERANCE_DISK: f64 = 1e-8;
pub const GRAM_TOLERANCE_SYMSET: f64 = 1e-6;
pub const NORM_TOLERANCE: f64 = 1e-6;
pub const HS_TOLERANCE: f64 = 1e-3;
/// Modes with `|α|` below this fraction of the largest are skipped by the
/// quadrature eigenvalue check, whose absolute error does not shrink with α.
pub const RAYLEIGH_FLOOR: f64 = 1e-6;

/// Basis accepted by [`validate_basis`].
pub enum BasisRef<'a> {
    Disk(&'a DiskBasis),
    SymSet(&'a SymSetBasis),
}

pub fn validate_basis(basis: BasisRef<'_>) -> Result<Vec<Check>> {
    match basis {
        BasisRef::Disk(b) => validate_disk(b),
        BasisRef::SymSet(b) => Ok(validate_symset(b)),
    }
}

/// Largest `|G_ij| / sqrt(G_ii G_jj)` over `i != j`.
fn gram_off_diagonal(rule: &QuadratureRule, vectors: &[&[f64]]) -> f64 {
    let diag: Vec<f64> = vectors.iter().map(|v| weighted_dot(rule, v, v)).collect();
    let mut worst: f64 = 0.0;
    for i in 0..vectors.len() {
        for j in 0..i {
            let g = weighted_dot(rule, vectors[i], vectors[j]);
            worst = worst.max(g.abs() / (diag[i] * diag[j]).sqrt());
        }
    }
    worst
}

/// Rayleigh quotient `⟨F v, v⟩ / ⟨v, v⟩` of `F f = ∫ e^{iκ p·p'} f(p') dp'`
/// for each vector, by the quadrature.
fn rayleigh_quotients(rule: &QuadratureRule, kappa: f64, vectors: &[&[f64]]) -> Vec<Complex64> {
    let n = rule.len();
    let wv: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| v.iter().zip(&rule.weights).map(|(a, w)| a * w).collect())
        .collect();
    let mut num = vec![Complex64::new(0.0, 0.0); vectors.len()];
    for i in 0..n {
        let (mut row_c, mut row_s) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for j in 0..n {
            let (s, c) = (kappa * rule.nodes[i].dot(rule.nodes[j])).sin_cos();
            row_c.push(c);
            row_s.push(s);
        }
        for (k, x) in wv.iter().enumerate() {
            let (mut re, mut im) = (0.0, 0.0);
            for j in 0..n {
                re += row_c[j] * x[j];
                im += row_s[j] * x[j];
            }
            num[k] += Complex64::new(re, im) * x[i];
        }
    }
    num.iter()
        .zip(&wv)
        .zip(vectors)
        .map(|((z, x), v)| z / x.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<f64>())
        .collect()
}

fn validate_disk(b: &DiskBasis) -> Result<Vec<Check>> {
    let mut out = Vec::new();

    let mut bracket: f64 = 0.0;
    let mut strict = true;
    for md in &b.modes {
        let d = (md.m + 2 * md.n) as f64;
        let lo = d * (d + 2.0);
        let hi = lo + b.c * b.c;
        strict &= md.chi > lo && md.chi < hi;
        bracket = bracket.max(lo - md.chi).max(md.chi - hi);
    }
    out.push(Check {
        check: "chi_bracket".into(),
        residual: bracket.max(0.0),
        threshold: 0.0,
        passed: strict,
    });

    let radial_gap = b
        .modes
        .iter()
        .map(|md| (md.chi_radial - md.chi - 0.75).abs())
        .fold(0.0, f64::max);
    out.push(Check::new("chi_radial_shift", radial_gap, 1e-12));

    let phase = b
        .modes
        .iter()
        .map(|md| {
            let z = md.alpha / crate::disk::i_pow(md.m);
            z.im.abs() / z.norm()
        })
        .fold(0.0, f64::max);
    out.push(Check::new("alpha_phase", phase, 1e-12));

    let resolution = 8 * (b.m_max + 2 * b.n_max + b.c.ceil() as usize + 16);
    let rule = build_polar_quadrature(&Geometry::disk(1.0)?, resolution)?;
    let values: Vec<Vec<f64>> = b
        .modes
        .iter()
        .map(|md| rule.nodes.iter().map(|&p| b.eval_unit(md, p)).collect())
        .collect();
    let refs: Vec<&[f64]> = values.iter().map(|v| v.as_slice()).collect();
    out.push(Check::new(
        "gram_diagonal",
        gram_off_diagonal(&rule, &refs),
        GRAM_TOLERANCE_DISK,
    ));

    // ‖ψ‖_{B(0,1)} = (c/2π)|α| against |α| recomputed from the kernel.
    let top = b.modes.iter().map(|md| md.alpha.norm()).fold(0.0, f64::max);
    let checked: Vec<usize> = (0..b.modes.len())
        .filter(|&i| b.modes[i].usable && b.modes[i].alpha.norm() >= RAYLEIGH_FLOOR * top)
        .collect();
    // A coarser rule keeps the dense kernel affordable; the modes checked
    // here are the well-resolved ones.
    let coarse = build_polar_quadrature(&Geometry::disk(1.0)?, (resolution / 2).max(64))?;
    let coarse_values: Vec<Vec<f64>> = checked
        .iter()
        .map(|&i| {
            coarse
                .nodes
                .iter()
                .map(|&p| b.eval_unit(&b.modes[i], p))
                .collect()
        })
        .collect();
    let coarse_refs: Vec<&[f64]> = coarse_values.iter().map(|v| v.as_slice()).collect();
    let rq = rayleigh_quotients(&coarse, b.c, &coarse_refs);
    let norm_gap = checked
        .iter()
        .zip(&rq)
        .map(|(&i, z)| {
            let stored = b.mode_norm(&b.modes[i]);
            let measured = b.c / (2.0 * PI) * z.norm();
            (measured / stored - 1.0).abs()
        })
        .fold(0.0, f64::max);
    out.push(Check::new(
        "norm_alpha_consistency",
        norm_gap,
        NORM_TOLERANCE,
    ));
    Ok(out)
}

fn validate_symset(b: &SymSetBasis) -> Vec<Check> {
    let mut out = Vec::new();
    let refs: Vec<&[f64]> = b.modes.iter().map(|m| m.values.as_slice()).collect();
    out.push(Check::new(
        "gram_diagonal",
        gram_off_diagonal(&b.quad, &refs),
        GRAM_TOLERANCE_SYMSET,
    ));

    let top = b.modes.first().map_or(0.0, |m| m.alpha.norm());
    let checked: Vec<usize> = (0..b.modes.len())
        .filter(|&n| b.modes[n].alpha.norm() >= RAYLEIGH_FLOOR * top)
        .collect();
    let sub: Vec<&[f64]> = checked.iter().map(|&n| refs[n]).collect();
    let rq = rayleigh_quotients(&b.quad, b.kernel_scale(), &sub);
    let h2 = b.geometry.h * b.geometry.h;
    let norm_gap = checked
        .iter()
        .zip(&rq)
        .map(|(&n, z)| {
            let stored = weighted_norm(&b.quad, &b.modes[n].values);
            let measured = b.c / (2.0 * PI) * z.norm() / h2;
            (measured / stored - 1.0).abs()
        })
        .fold(0.0, f64::max);
    out.push(Check::new(
        "norm_alpha_consistency",
        norm_gap,
        NORM_TOLERANCE,
    ));

    let area = b.geometry.area() / h2;
    out.push(Check::new(
        "hilbert_schmidt_sum",
        (b.hs_sum / (area * area) - 1.0).abs(),
        HS_TOLERANCE,
    ));

    let mut parity: f64 = 0.0;
    if let Some(h) = b.quad.half {
        for m in &b.modes {
            let scale = m.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            for i in 0..h {
                parity =
                    parity.max((m.values[i + h] - m.parity.sign() * m.values[i]).abs() / scale);
            }
            let off = match m.parity {
                Parity::Even => m.alpha.im.abs(),
                Parity::Odd => m.alpha.re.abs(),
            };
            parity = parity.max(off / m.alpha.norm());
        }
    }
    out.push(Check::new("parity", parity, 1e-8));
    out
}

/// Largest relative gap between the top `count` `|α|` of a symmetric-set
/// basis on the unit disk and the disk basis (each `m >= 1` value counted
/// twice).
pub fn cross_check(disk: &DiskBasis, symset: &SymSetBasis, count: usize, threshold: f64) -> Check {
    let mut a: Vec<f64> = disk
        .modes
        .iter()
        .filter(|m| m.usable)
        .map(|m| m.alpha.norm())
        .collect();
    a.sort_by(|x, y| y.total_cmp(x));
    let gap = symset
        .modes
        .iter()
        .zip(&a)
        .take(count)
        .map(|(s, d)| (s.alpha.norm() / d - 1.0).abs())
        .fold(0.0, f64::max);
    let enough = symset.modes.len() >= count && a.len() >= count;
    let mut c = Check::new("disk_symset_alpha", gap, threshold);
    c.passed &= enough;
    c
}
