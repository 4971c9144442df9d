//! Prolate eigensystem on the unit disk and its dilation onto a data disk.
//!
//! Each mode is `ψ(x) = R(|x|) Y(arg x)` with `Y = 1` (m = 0), `cos mθ`
//! (ℓ = 1) or `sin mθ` (ℓ = 2). The radial factor `R` is expanded in
//! orthonormal disk polynomials; the expansion coefficients are eigenvectors
//! of the tridiagonal Galerkin matrix of the Sturm–Liouville operator that
//! commutes with the finite Fourier transform on the disk.

use crate::error::{param, Result};
use crate::geometry::{build_polar_quadrature, Geometry};
use crate::numerics::{
    bessel_j_all, gauss_legendre, jacobi_all, zernike_norm, zernike_reduced_all, QuadratureRule,
    SymmetricTridiagonal,
};
use crate::point::Point;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative least-squares residual of the kernel eigen-relation above which
/// a mode's `gamma` is considered lost in rounding.
pub const USABLE_RESIDUAL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskMode {
    pub m: usize,
    pub n: usize,
    pub ell: u8,
    /// Eigenvalue of the Sturm–Liouville operator on the disk.
    pub chi: f64,
    /// Eigenvalue of the radial operator; `chi + 3/4`.
    pub chi_radial: f64,
    /// Eigenvalue of the kernel `J_m(c r r') sqrt(c r r')` on [0, 1].
    pub gamma: f64,
    /// Eigenvalue of the finite Fourier transform on the unit disk.
    pub alpha: Complex64,
    /// Radial expansion coefficients in `Z_{m,0..J}`, unit Euclidean norm.
    /// The radial factor of `ψ` is `(c/2π)|α| / sqrt(∫Y²) · Σ a_j Z_{m,j}`.
    pub coeffs: Vec<f64>,
    /// False when `gamma` could not be resolved in double precision.
    pub usable: bool,
}

impl DiskMode {
    pub fn id(&self) -> String {
        format!("{}:{}:{}", self.m, self.n, self.ell)
    }

    /// `Y_{m,ℓ}(θ)`.
    pub fn angular(&self, theta: f64) -> f64 {
        match (self.m, self.ell) {
            (0, _) => 1.0,
            (m, 1) => (m as f64 * theta).cos(),
            (m, _) => (m as f64 * theta).sin(),
        }
    }

    /// `∫ Y² dθ` over one period.
    pub fn angular_norm_sq(&self) -> f64 {
        if self.m == 0 {
            2.0 * PI
        } else {
            PI
        }
    }
}

/// Disk eigensystem at bandwidth `c` for `m <= m_max`, `n <= n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskBasis {
    pub c: f64,
    pub m_max: usize,
    pub n_max: usize,
    pub truncation: usize,
    pub modes: Vec<DiskMode>,
}

/// Default Galerkin size for the requested radial range.
pub fn default_truncation(c: f64, n_max: usize) -> usize {
    2 * n_max + c.ceil() as usize + 10
}

/// Galerkin matrix of the disk Sturm–Liouville operator for azimuthal order
/// `m` in `Z_{m,0..truncation}`. `c = 0` is allowed and gives the diagonal
/// `(m+2j)(m+2j+2)`.
pub fn assemble_sl_matrix(c: f64, m: usize, truncation: usize) -> Result<SymmetricTridiagonal> {
    if !(c >= 0.0 && c.is_finite()) {
        return param(format!("bandwidth must be nonnegative, got {c}"));
    }
    if truncation == 0 {
        return param("truncation must be positive");
    }
    let jn = truncation;
    // ∫_0^1 f r dr = (1/4) ∫_{-1}^{1} f dt with t = 2r² - 1; the integrand
    // r² Z_j Z_k is a polynomial of degree m + j + k + 1 in t.
    let rule = gauss_legendre(jn + m / 2 + 2);
    let mut diag_ip = vec![0.0; jn];
    let mut off_ip = vec![0.0; jn.saturating_sub(1)];
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let r2 = 0.5 * (1.0 + t);
        let p = jacobi_all(jn, 0.0, m as f64, t);
        let common = 0.25 * w * r2 * r2.powi(m as i32);
        for j in 0..jn {
            let zj = zernike_norm(m, j) * p[j];
            diag_ip[j] += common * zj * zj;
            if j + 1 < jn {
                off_ip[j] += common * zj * zernike_norm(m, j + 1) * p[j + 1];
            }
        }
    }
    let c2 = c * c;
    let diagonal = (0..jn)
        .map(|j| {
            let d = (m + 2 * j) as f64;
            d * (d + 2.0) + c2 * diag_ip[j]
        })
        .collect();
    let off_diagonal = off_ip.iter().map(|v| c2 * v).collect();
    Ok(SymmetricTridiagonal {
        diagonal,
        off_diagonal,
    })
}

impl DiskBasis {
    /// Computes the basis with the default truncation.
    pub fn compute(c: f64, m_max: usize, n_max: usize) -> Result<Self> {
        Self::compute_with_truncation(c, m_max, n_max, default_truncation(c, n_max))
    }

    pub fn compute_with_truncation(
        c: f64,
        m_max: usize,
        n_max: usize,
        truncation: usize,
    ) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return param(format!("bandwidth must be positive, got {c}"));
        }
        if truncation <= n_max {
            return param(format!("truncation {truncation} must exceed n_max {n_max}"));
        }
        let kernel = RadialKernel::new(c, m_max, truncation);
        let mut modes = Vec::new();
        for m in 0..=m_max {
            let matrix = assemble_sl_matrix(c, m, truncation)?;
            let eig = matrix.eigen(true)?;
            for n in 0..=n_max {
                let mut coeffs = eig.vectors[n].clone();
                // Sign: R(r) / r^m > 0 at the origin.
                let origin: f64 = coeffs
                    .iter()
                    .zip(zernike_reduced_all(m, truncation - 1, 0.0))
                    .map(|(a, z)| a * z)
                    .sum();
                if origin < 0.0 {
                    coeffs.iter_mut().for_each(|a| *a = -*a);
                }
                let (gamma, residual) = kernel.eigenvalue(m, &coeffs);
                let alpha = i_pow(m) * (2.0 * PI * gamma / c.sqrt());
                let usable = gamma.abs() > 1e-300 && residual < USABLE_RESIDUAL;
                let chi = eig.values[n];
                for ell in if m == 0 { 1..=1 } else { 1..=2 } {
                    modes.push(DiskMode {
                        m,
                        n,
                        ell,
                        chi,
                        chi_radial: chi + 0.75,
                        gamma,
                        alpha,
                        coeffs: coeffs.clone(),
                        usable,
                    });
                }
            }
        }
        modes.sort_by_key(|md| (md.m + 2 * md.n, md.m, md.ell));
        Ok(Self {
            c,
            m_max,
            n_max,
            truncation,
            modes,
        })
    }

    pub fn find(&self, m: usize, n: usize, ell: u8) -> Option<&DiskMode> {
        self.modes
            .iter()
            .find(|md| md.m == m && md.n == n && md.ell == ell)
    }

    pub fn index_of(&self, m: usize, n: usize, ell: u8) -> Option<usize> {
        self.modes
            .iter()
            .position(|md| md.m == m && md.n == n && md.ell == ell)
    }

    /// `‖ψ‖_{L²(B(0,1))} = (c/2π)|α|`.
    pub fn mode_norm(&self, mode: &DiskMode) -> f64 {
        self.c / (2.0 * PI) * mode.alpha.norm()
    }

    /// Factor turning `Σ a_j Z_j · Y` into `ψ`.
    fn scale(&self, mode: &DiskMode) -> f64 {
        self.mode_norm(mode) / mode.angular_norm_sq().sqrt()
    }

    /// `Σ a_j Z_{m,j}(r)`, unit norm in `L²([0,1], r dr)`.
    pub fn radial_unit(&self, mode: &DiskMode, r: f64) -> f64 {
        let z = zernike_reduced_all(mode.m, mode.coeffs.len() - 1, r);
        let s: f64 = mode.coeffs.iter().zip(&z).map(|(a, b)| a * b).sum();
        s * r.powi(mode.m as i32)
    }

    /// Radial factor `R(r)` of `ψ` for `0 <= r <= 1`.
    pub fn radial(&self, mode: &DiskMode, r: f64) -> f64 {
        self.scale(mode) * self.radial_unit(mode, r)
    }

    /// `ψ / ‖ψ‖_{L²(B(0,1))}` inside the unit disk. Independent of `α`, so
    /// well defined even for modes whose eigenvalue is not resolved.
    pub fn eval_unit(&self, mode: &DiskMode, x: Point) -> f64 {
        self.radial_unit(mode, x.norm().min(1.0)) * mode.angular(x.angle())
            / mode.angular_norm_sq().sqrt()
    }

    /// `φ(r) = r^{1/2} R(r)`, the prolate radial function.
    pub fn phi(&self, mode: &DiskMode, r: f64) -> f64 {
        r.sqrt() * self.radial(mode, r)
    }

    /// `ψ(x)`; inside the unit disk from the polynomial expansion, outside
    /// from the analytic extension `(1/α) ∫_{B(0,1)} e^{i c x·p} ψ(p) dp`.
    pub fn eval(&self, mode: &DiskMode, x: Point) -> f64 {
        let r = x.norm();
        let y = mode.angular(x.angle());
        if r <= 1.0 {
            self.radial(mode, r) * y
        } else {
            self.extension_radial(mode, r) * y
        }
    }

    /// Radial part of the extension formula, valid for every `r > 0`.
    ///
    /// Uses `∫_0^1 Z_{m,j}(s) J_m(a s) s ds = sqrt(2(m+2j+1)) (-1)^j
    /// J_{m+2j+1}(a) / a`.
    pub fn extension_radial(&self, mode: &DiskMode, r: f64) -> f64 {
        let m = mode.m;
        let a = self.c * r;
        let jn = mode.coeffs.len();
        let bessel = bessel_j_all(m + 2 * jn + 1, a);
        let s: f64 = mode
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, &cj)| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                cj * zernike_norm(m, j) * sign * bessel[m + 2 * j + 1]
            })
            .sum();
        self.scale(mode) * self.c.sqrt() / mode.gamma * s / a
    }
}

/// `i^m`.
pub fn i_pow(m: usize) -> Complex64 {
    match m % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Discretized kernel `J_m(c r r') sqrt(c r r')` on a Gauss rule in `r`.
struct RadialKernel {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `bessel[i * n + k][m] = J_m(c r_i r_k)`.
    bessel: Vec<Vec<f64>>,
    c: f64,
    truncation: usize,
}

impl RadialKernel {
    fn new(c: f64, m_max: usize, truncation: usize) -> Self {
        let rule = gauss_legendre(truncation + m_max + 40).mapped(0.0, 1.0);
        let n = rule.len();
        let mut bessel = vec![Vec::new(); n * n];
        for i in 0..n {
            for k in 0..=i {
                let v = bessel_j_all(m_max, c * rule.nodes[i] * rule.nodes[k]);
                bessel[k * n + i] = v.clone();
                bessel[i * n + k] = v;
            }
        }
        Self {
            nodes: rule.nodes,
            weights: rule.weights,
            bessel,
            c,
            truncation,
        }
    }

    /// Weighted least-squares eigenvalue of the kernel for the radial
    /// function with coefficients `coeffs`, and the relative residual.
    fn eigenvalue(&self, m: usize, coeffs: &[f64]) -> (f64, f64) {
        let n = self.nodes.len();
        let phi: Vec<f64> = self
            .nodes
            .iter()
            .map(|&r| {
                let z = zernike_reduced_all(m, self.truncation - 1, r);
                let s: f64 = coeffs.iter().zip(&z).map(|(a, b)| a * b).sum();
                r.sqrt() * r.powi(m as i32) * s
            })
            .collect();
        let k_phi: Vec<f64> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|k| {
                        let x = self.c * self.nodes[i] * self.nodes[k];
                        self.weights[k] * self.bessel[i * n + k][m] * x.sqrt() * phi[k]
                    })
                    .sum()
            })
            .collect();
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            num += self.weights[i] * phi[i] * k_phi[i];
            den += self.weights[i] * phi[i] * phi[i];
        }
        let gamma = num / den;
        let res: f64 = (0..n)
            .map(|i| self.weights[i] * (k_phi[i] - gamma * phi[i]).powi(2))
            .sum();
        let rel = res.sqrt() / (gamma.abs() * den.sqrt());
        (gamma, if rel.is_finite() { rel } else { f64::INFINITY })
    }
}

/// Disk basis dilated onto the data disk `D = B(0, h)`, `h = c / (2k)`:
/// `ψ^F(x) = (1/h) ψ(x/h)`, eigenvalue `h² α`.
#[derive(Debug, Clone)]
pub struct ScaledDiskBasis {
    pub base: DiskBasis,
    pub k: f64,
    /// Radius `h` of the data disk.
    pub radius: f64,
    pub resolution: usize,
    pub quad: QuadratureRule,
    /// `unit[i][j]` is mode `i` normalized in `L²(D)`, at `quad.nodes[j]`.
    pub unit: Vec<Vec<f64>>,
}

/// Polar quadrature resolution adequate for products of the basis modes.
pub fn default_resolution(basis: &DiskBasis) -> usize {
    8 * (basis.m_max + 2 * basis.n_max + basis.c.ceil() as usize + 16)
}

impl ScaledDiskBasis {
    pub fn new(base: DiskBasis, k: f64) -> Result<Self> {
        let res = default_resolution(&base);
        Self::with_resolution(base, k, res)
    }

    pub fn with_resolution(base: DiskBasis, k: f64, resolution: usize) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return param(format!("wavenumber must be positive, got {k}"));
        }
        let radius = base.c / (2.0 * k);
        let quad = build_polar_quadrature(&Self::geometry_for(radius)?, resolution)?;
        let unit = base
            .modes
            .iter()
            .map(|md| {
                quad.nodes
                    .iter()
                    .map(|&p| base.eval_unit(md, p.scale(1.0 / radius)) / radius)
                    .collect()
            })
            .collect();
        Ok(Self {
            base,
            k,
            radius,
            resolution,
            quad,
            unit,
        })
    }

    fn geometry_for(radius: f64) -> Result<Geometry> {
        Geometry::disk(1.0)?.scaled(radius)
    }

    /// The data-domain geometry `B(0, h)`.
    pub fn geometry(&self) -> Geometry {
        Self::geometry_for(self.radius).expect("radius is positive")
    }

    /// Kernel frequency `4k²/c` of the data-domain operator.
    pub fn kernel_scale(&self) -> f64 {
        4.0 * self.k * self.k / self.base.c
    }

    pub fn eval(&self, mode: &DiskMode, x: Point) -> f64 {
        self.base.eval(mode, x.scale(1.0 / self.radius)) / self.radius
    }

    /// Eigenvalue `h² α` of the data-domain operator.
    pub fn mu(&self, mode: &DiskMode) -> Complex64 {
        mode.alpha * (self.radius * self.radius)
    }

    /// `‖ψ^F‖_{L²(D)} = (c/2π)|α|`.
    pub fn mode_norm(&self, mode: &DiskMode) -> f64 {
        self.base.mode_norm(mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_bandwidth_decouples() {
        let a = assemble_sl_matrix(0.0, 0, 3).unwrap();
        assert_eq!(a.diagonal, vec![0.0, 8.0, 24.0]);
        assert_eq!(a.off_diagonal, vec![0.0, 0.0]);
    }

    #[test]
    fn negative_bandwidth_rejected() {
        assert!(assemble_sl_matrix(-1.0, 0, 3).is_err());
        assert!(DiskBasis::compute(0.0, 1, 1).is_err());
    }

    #[test]
    fn small_bandwidth_limit() {
        let b = DiskBasis::compute(1e-6, 1, 1).unwrap();
        let md = b.find(1, 1, 1).unwrap();
        assert!((md.chi - 15.0).abs() < 1e-9);
        assert_eq!(md.chi_radial - md.chi, 0.75);
    }

    #[test]
    fn eigenvalue_bracket_example() {
        let b = DiskBasis::compute(20.0, 3, 2).unwrap();
        let md = b.find(3, 2, 1).unwrap();
        assert!(md.chi > 63.0 && md.chi < 463.0, "{}", md.chi);
    }

    #[test]
    fn mode_order_and_ells() {
        let b = DiskBasis::compute(5.0, 2, 1).unwrap();
        let keys: Vec<_> = b
            .modes
            .iter()
            .map(|md| (md.m + 2 * md.n, md.m, md.ell))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(b.modes.len(), 2 * (1 + 2 + 2));
        assert!(b.modes.iter().all(|md| md.m > 0 || md.ell == 1));
    }

    #[test]
    fn alpha_phase_is_i_to_the_m() {
        let b = DiskBasis::compute(8.0, 5, 3).unwrap();
        for md in &b.modes {
            let z = md.alpha / i_pow(md.m);
            assert!(z.im.abs() <= 1e-15 * z.re.abs(), "{}", md.id());
            assert!(md.alpha.norm() > 0.0);
        }
    }

    #[test]
    fn psi_axis_zero_for_sine_mode() {
        let b = DiskBasis::compute(4.0, 1, 0).unwrap();
        assert_eq!(b.eval(b.find(1, 0, 2).unwrap(), Point::new(0.7, 0.0)), 0.0);
    }

    #[test]
    fn psi_radial_symmetry() {
        let b = DiskBasis::compute(4.0, 0, 0).unwrap();
        let md = b.find(0, 0, 1).unwrap();
        let a = b.eval(md, Point::new(0.3, 0.4));
        let c = b.eval(md, Point::new(0.5, 0.0));
        assert!((a - c).abs() < 1e-10);
    }

    #[test]
    fn extension_matches_interior_expansion() {
        let b = DiskBasis::compute(6.0, 4, 3).unwrap();
        for md in b.modes.iter().filter(|md| md.usable) {
            for r in [0.2, 0.55, 0.9, 1.0] {
                let inside = b.radial(md, r);
                let ext = b.extension_radial(md, r);
                let scale = b.radial(md, 1.0).abs().max(1e-3);
                assert!(
                    (inside - ext).abs() < 1e-8 * scale.max(inside.abs()),
                    "{} r={r}: {inside} vs {ext}",
                    md.id()
                );
            }
        }
    }

    #[test]
    fn unit_scaling_is_identity() {
        let b = DiskBasis::compute(3.0, 1, 1).unwrap();
        let s = ScaledDiskBasis::with_resolution(b.clone(), 1.5, 64).unwrap();
        assert_eq!(s.radius, 1.0);
        let md = &b.modes[2];
        let x = Point::new(0.2, -0.4);
        assert_eq!(s.eval(md, x), b.eval(md, x));
    }
}
