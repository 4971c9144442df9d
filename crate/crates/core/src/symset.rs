//! Nyström eigensystem of the finite Fourier transform on a point-symmetric
//! set.
//!
//! On `A_h = hA` the operator `f ↦ ∫_{A_h} e^{i(c/h²) p·p'} f(p') dp'` splits
//! into a cosine part acting on even functions and a sine part acting on odd
//! ones. With a point-symmetric rule both reduce to real symmetric matrices
//! on half of the nodes.

use crate::error::{param, Result};
use crate::geometry::Geometry;
use crate::numerics::{symmetric_eigen, QuadratureRule, SymMatrix};
use crate::point::Point;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Modes with `|α| <= MODE_FLOOR · |α_0|` are never retained.
pub const MODE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymSetMode {
    pub parity: Parity,
    /// Eigenvalue on the unscaled set `A` at bandwidth `c`; real for even
    /// modes, purely imaginary for odd ones.
    pub alpha: Complex64,
    /// Values at the quadrature nodes, normalized so that
    /// `Σ w ψ² = (c/2π)² |α|²`.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymSetBasis {
    pub c: f64,
    pub geometry: Geometry,
    pub quad: QuadratureRule,
    /// Sorted by `|α|` descending.
    pub modes: Vec<SymSetMode>,
    /// `Σ |α|²` over every Nyström eigenvalue, retained or not.
    pub hs_sum: f64,
    /// Set when fewer modes than requested cleared the floor.
    pub truncated: bool,
}

/// Computes the top `n_modes` eigenpairs on `geometry` using `quad`, which
/// must be point-symmetric (see [`QuadratureRule::symmetric`]).
pub fn compute_symset_basis(
    c: f64,
    geometry: &Geometry,
    quad: &QuadratureRule,
    n_modes: usize,
) -> Result<SymSetBasis> {
    if !(c > 0.0 && c.is_finite()) {
        return param(format!("bandwidth must be positive, got {c}"));
    }
    if n_modes == 0 {
        return param("at least one mode must be requested");
    }
    let half = match quad.half {
        Some(h) if h > 0 => h,
        _ => return param("quadrature rule must be point-symmetric"),
    };
    let h2 = geometry.h * geometry.h;
    let kappa = c / h2;
    let nodes = &quad.nodes[..half];
    let sqrt_w: Vec<f64> = quad.weights[..half].iter().map(|w| w.sqrt()).collect();

    let mut even = SymMatrix::zeros(half);
    let mut odd = SymMatrix::zeros(half);
    for i in 0..half {
        for j in 0..=i {
            let (s, co) = (kappa * nodes[i].dot(nodes[j])).sin_cos();
            let scale = 2.0 * sqrt_w[i] * sqrt_w[j];
            even.set(i, j, scale * co);
            odd.set(i, j, scale * s);
        }
    }
    let eig_even = symmetric_eigen(&even, true)?;
    let eig_odd = symmetric_eigen(&odd, true)?;

    let hs_sum = eig_even
        .values
        .iter()
        .chain(&eig_odd.values)
        .map(|v| (v / h2).powi(2))
        .sum();

    let mut candidates: Vec<(f64, Parity, usize)> = eig_even
        .values
        .iter()
        .enumerate()
        .map(|(k, &v)| (v / h2, Parity::Even, k))
        .chain(
            eig_odd
                .values
                .iter()
                .enumerate()
                .map(|(k, &v)| (v / h2, Parity::Odd, k)),
        )
        .collect();
    candidates.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()));
    let top = candidates.first().map_or(0.0, |c| c.0.abs());

    let mut modes = Vec::new();
    for &(beta, parity, k) in candidates.iter().take(n_modes) {
        if beta.abs() <= MODE_FLOOR * top || beta == 0.0 {
            break;
        }
        let vec = match parity {
            Parity::Even => &eig_even.vectors[k],
            Parity::Odd => &eig_odd.vectors[k],
        };
        let alpha = match parity {
            Parity::Even => Complex64::new(beta, 0.0),
            Parity::Odd => Complex64::new(0.0, beta),
        };
        // Half-set vector has unit norm, so Σ_all w f² = 2 before rescaling.
        let target = c / (2.0 * PI) * alpha.norm();
        let pivot = vec
            .iter()
            .copied()
            .fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
        let scale = target / 2f64.sqrt() * pivot.signum();
        let mut values: Vec<f64> = vec
            .iter()
            .zip(&sqrt_w)
            .map(|(v, s)| scale * v / s)
            .collect();
        let mirrored: Vec<f64> = values.iter().map(|v| parity.sign() * v).collect();
        values.extend(mirrored);
        modes.push(SymSetMode {
            parity,
            alpha,
            values,
        });
    }
    let truncated = modes.len() < n_modes;
    Ok(SymSetBasis {
        c,
        geometry: *geometry,
        quad: quad.clone(),
        modes,
        hs_sum,
        truncated,
    })
}

impl SymSetBasis {
    /// Kernel frequency `c / h²` on the dilated set.
    pub fn kernel_scale(&self) -> f64 {
        self.c / (self.geometry.h * self.geometry.h)
    }

    /// Eigenvalue `h² α` of the operator on the dilated set.
    pub fn mu(&self, n: usize) -> Complex64 {
        self.modes[n].alpha * (self.geometry.h * self.geometry.h)
    }

    /// `‖ψ_n‖ = (c/2π)|α_n|`.
    pub fn mode_norm(&self, n: usize) -> f64 {
        self.c / (2.0 * PI) * self.modes[n].alpha.norm()
    }

    /// Nyström interpolant, which is also the analytic extension off the set.
    pub fn eval(&self, n: usize, p: Point) -> f64 {
        let mode = &self.modes[n];
        let kappa = self.kernel_scale();
        let mu = self.mu(n);
        let sum: f64 = self
            .quad
            .nodes
            .iter()
            .zip(&self.quad.weights)
            .zip(&mode.values)
            .map(|((&q, &w), &v)| {
                let phase = kappa * p.dot(q);
                w * v
                    * match mode.parity {
                        Parity::Even => phase.cos(),
                        Parity::Odd => phase.sin(),
                    }
            })
            .sum();
        match mode.parity {
            Parity::Even => sum / mu.re,
            Parity::Odd => sum / mu.im,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_polar_quadrature;

    fn disk_basis(c: f64, res: usize, n: usize) -> SymSetBasis {
        let g = Geometry::disk(1.0).unwrap();
        let q = build_polar_quadrature(&g, res).unwrap();
        compute_symset_basis(c, &g, &q, n).unwrap()
    }

    #[test]
    fn parity_of_eigenvalues_and_values() {
        let b = disk_basis(4.0, 80, 12);
        let h = b.quad.half.unwrap();
        for m in &b.modes {
            match m.parity {
                Parity::Even => assert_eq!(m.alpha.im, 0.0),
                Parity::Odd => assert_eq!(m.alpha.re, 0.0),
            }
            for i in 0..h {
                assert!((m.values[i + h] - m.parity.sign() * m.values[i]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn sorted_and_normalized() {
        let b = disk_basis(4.0, 80, 12);
        assert!(b
            .modes
            .windows(2)
            .all(|w| w[0].alpha.norm() >= w[1].alpha.norm()));
        for (n, m) in b.modes.iter().enumerate() {
            let norm_sq: f64 = b
                .quad
                .weights
                .iter()
                .zip(&m.values)
                .map(|(w, v)| w * v * v)
                .sum();
            assert!((norm_sq.sqrt() / b.mode_norm(n) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolant_reproduces_nodes() {
        let b = disk_basis(5.0, 80, 6);
        for n in 0..6 {
            for j in (0..b.quad.len()).step_by(37) {
                let v = b.eval(n, b.quad.nodes[j]);
                assert!((v - b.modes[n].values[j]).abs() < 1e-8, "mode {n} node {j}");
            }
        }
    }

    #[test]
    fn even_modes_even_off_set() {
        let b = disk_basis(5.0, 80, 6);
        let p = Point::new(1.3, -0.4);
        for n in 0..6 {
            let s = b.modes[n].parity.sign();
            assert!((b.eval(n, -p) - s * b.eval(n, p)).abs() < 1e-10);
        }
    }

    #[test]
    fn hilbert_schmidt_sum() {
        let b = disk_basis(5.0, 80, 4);
        assert!((b.hs_sum / (PI * PI) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn requires_symmetric_rule() {
        let g = Geometry::disk(1.0).unwrap();
        let q = QuadratureRule::new(vec![Point::new(0.1, 0.0)], vec![0.1]);
        assert!(compute_symset_basis(1.0, &g, &q, 1).is_err());
    }
}
