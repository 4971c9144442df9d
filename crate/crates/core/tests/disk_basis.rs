use num_complex::Complex64;
use prolate_core::disk::{default_truncation, DiskBasis, DiskMode, ScaledDiskBasis};
use prolate_core::geometry::{build_polar_quadrature, Geometry};
use prolate_core::numerics::{gauss_legendre, zernike_norm, QuadratureRule};
use prolate_core::symset::compute_symset_basis;
use prolate_core::Point;
use std::f64::consts::PI;

fn unit_disk_rule(resolution: usize) -> QuadratureRule {
    build_polar_quadrature(&Geometry::disk(1.0).unwrap(), resolution).unwrap()
}

/// `∫_{B(0,1)} e^{i c x·p} ψ(p) dp` by direct quadrature.
fn kernel_integral(
    basis: &DiskBasis,
    mode: &DiskMode,
    rule: &QuadratureRule,
    x: Point,
) -> Complex64 {
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&p, &w)| Complex64::from_polar(w * basis.eval(mode, p), basis.c * x.dot(p)))
        .sum()
}

#[test]
fn low_modes_match_nystrom_on_the_disk() {
    let c = 5.0;
    let galerkin = DiskBasis::compute(c, 3, 3).unwrap();
    let g = Geometry::disk(1.0).unwrap();
    let nystrom = compute_symset_basis(c, &g, &unit_disk_rule(200), 60).unwrap();
    let reference: Vec<f64> = nystrom.modes.iter().map(|m| m.alpha.norm()).collect();
    for mode in &galerkin.modes {
        let a = mode.alpha.norm();
        let gap = reference
            .iter()
            .map(|&b| (a - b).abs() / a)
            .fold(f64::INFINITY, f64::min);
        assert!(
            gap < 1e-5,
            "mode {}: |alpha| = {a:e}, closest relative gap {gap:e}",
            mode.id()
        );
    }
}

#[test]
fn exterior_values_satisfy_the_eigen_relation() {
    let basis = DiskBasis::compute(5.0, 3, 3).unwrap();
    let rule = unit_disk_rule(320);
    let x = Point::new(1.5, 0.2);
    for mode in basis.modes.iter().filter(|m| m.m + 2 * m.n <= 5) {
        let lhs = mode.alpha * basis.eval(mode, x);
        let rhs = kernel_integral(&basis, mode, &rule, x);
        assert!(
            (lhs - rhs).norm() < 1e-8,
            "mode {}: {lhs} vs {rhs}",
            mode.id()
        );
    }
}

#[test]
fn scaled_modes_keep_their_norm_on_the_data_disk() {
    let base = DiskBasis::compute(8.0, 4, 3).unwrap();
    let scaled = ScaledDiskBasis::with_resolution(base, 2.5, 240).unwrap();
    let rule = build_polar_quadrature(&scaled.geometry(), 320).unwrap();
    for mode in &scaled.base.modes {
        let norm_sq = rule.integrate(|p| scaled.eval(mode, p).powi(2));
        let expect = (scaled.base.c / (2.0 * PI) * mode.alpha.norm()).powi(2);
        assert!(
            (norm_sq - expect).abs() <= 1e-8 * expect,
            "mode {}: {norm_sq:e} vs {expect:e}",
            mode.id()
        );
    }
}

/// `∫_0^∞ R(r)² r dr` for the radial factor of the extended mode: Gauss
/// panels up to `r_max`, then the tail from the leading Hankel asymptotics.
/// Every exterior term `(-1)^j J_{m+2j+1}(cr)` shares the phase
/// `cr - (m+1)π/2 - π/4`, so `R(r) ≈ A cos(cr - φ) r^{-3/2}` and the tail is
/// `A² (1/(2R) - sin(2cR - 2φ)/(4cR²))`.
fn whole_line_radial_energy(basis: &DiskBasis, mode: &DiskMode, r_max: f64) -> f64 {
    let c = basis.c;
    let panel = gauss_legendre(24);
    let inner = panel
        .mapped(0.0, 1.0)
        .integrate(|r| basis.radial(mode, r).powi(2) * r);
    let mut outer = 0.0;
    let steps = (r_max - 1.0).round() as usize;
    for s in 0..steps {
        let a = 1.0 + s as f64;
        outer += panel
            .mapped(a, a + 1.0)
            .integrate(|r| basis.extension_radial(mode, r).powi(2) * r);
    }
    let m = mode.m;
    let sum: f64 = mode
        .coeffs
        .iter()
        .enumerate()
        .map(|(j, a)| a * zernike_norm(m, j))
        .sum();
    let prefactor =
        basis.mode_norm(mode) / mode.angular_norm_sq().sqrt() * c.sqrt() / mode.gamma / c;
    let amplitude = prefactor * (2.0 / (PI * c)).sqrt() * sum;
    let phase = (m + 1) as f64 * PI / 2.0 + PI / 4.0;
    let tail = amplitude.powi(2)
        * (0.5 / r_max - (2.0 * c * r_max - 2.0 * phase).sin() / (4.0 * c * r_max * r_max));
    inner + outer + tail
}

#[test]
fn modes_have_unit_energy_in_the_plane() {
    let basis = DiskBasis::compute(5.0, 2, 2).unwrap();
    for mode in &basis.modes {
        let energy = whole_line_radial_energy(&basis, mode, 600.0) * mode.angular_norm_sq();
        assert!(
            (energy - 1.0).abs() < 1e-6,
            "mode {}: energy {energy}",
            mode.id()
        );
    }
}

#[test]
fn galerkin_truncation_is_converged() {
    for c in [1.0, 10.0, 20.0] {
        let j0 = default_truncation(c, 10);
        let a = DiskBasis::compute_with_truncation(c, 10, 10, j0).unwrap();
        let b = DiskBasis::compute_with_truncation(c, 10, 10, j0 + 10).unwrap();
        for (x, y) in a.modes.iter().zip(&b.modes) {
            assert!(
                (x.chi - y.chi).abs() <= 1e-9 * y.chi.abs().max(1.0),
                "c = {c}, mode {}",
                x.id()
            );
        }
    }
}

/// `-((1-r²)φ')' + ((m² - 1/4)/r² + c²r²) φ` by central differences.
fn radial_operator(basis: &DiskBasis, mode: &DiskMode, r: f64, h: f64) -> f64 {
    let f = |s: f64| basis.phi(mode, s);
    let flux = |s: f64| (1.0 - s * s) * (f(s + h / 2.0) - f(s - h / 2.0)) / h;
    let m = mode.m as f64;
    -(flux(r + h / 2.0) - flux(r - h / 2.0)) / h
        + ((m * m - 0.25) / (r * r) + basis.c * basis.c * r * r) * f(r)
}

#[test]
fn radial_functions_solve_the_radial_equation() {
    let basis = DiskBasis::compute(6.0, 3, 2).unwrap();
    let radii: Vec<f64> = (3..=9).map(|i| 0.1 * i as f64).collect();
    for mode in &basis.modes {
        let scale = radii
            .iter()
            .map(|&r| basis.phi(mode, r).abs())
            .fold(0.0, f64::max)
            * mode.chi_radial;
        let residual = |h: f64| {
            radii
                .iter()
                .map(|&r| {
                    (radial_operator(&basis, mode, r, h) - mode.chi_radial * basis.phi(mode, r))
                        .abs()
                })
                .fold(0.0, f64::max)
                / scale
        };
        let (coarse, fine) = (residual(1e-2), residual(5e-3));
        assert!(coarse < 1e-3, "mode {}: residual {coarse:e}", mode.id());
        // Second order: halving h cuts the residual about four times.
        assert!(
            fine < coarse / 3.0,
            "mode {}: {coarse:e} -> {fine:e}",
            mode.id()
        );
    }
}

#[test]
fn eigenvalue_phase_is_i_to_the_m() {
    let basis = DiskBasis::compute(10.0, 6, 6).unwrap();
    for mode in basis.modes.iter().filter(|m| m.usable) {
        let rotated = mode.alpha * prolate_core::disk::i_pow(mode.m).conj();
        assert!(
            rotated.im.abs() <= 1e-12 * rotated.norm(),
            "mode {}: {}",
            mode.id(),
            mode.alpha
        );
    }
}
