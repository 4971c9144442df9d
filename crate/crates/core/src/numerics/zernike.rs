//! Orthonormal radial disk polynomials.
//!
//! `Z_{m,j}(r) = sqrt(2(m+2j+1)) r^m P_j^{(0,m)}(2r^2 - 1)` satisfies
//! `∫_0^1 Z_{m,j} Z_{m,k} r dr = δ_{jk}`. With this normalization the Galerkin
//! matrix of the disk Sturm–Liouville operator at zero bandwidth is
//! `diag((m+2j)(m+2j+2))`.

/// Jacobi polynomials `P_0^{(a,b)}(t), ..., P_{n}^{(a,b)}(t)`.
pub fn jacobi_all(n: usize, a: f64, b: f64, t: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(1.0);
    if n == 0 {
        return p;
    }
    p.push(0.5 * (a - b) + 0.5 * (a + b + 2.0) * t);
    for k in 2..=n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let c1 = 2.0 * kf * (kf + a + b) * (s - 2.0);
        let c2 = (s - 1.0) * (s * (s - 2.0) * t + a * a - b * b);
        let c3 = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * s;
        let next = (c2 * p[k - 1] - c3 * p[k - 2]) / c1;
        p.push(next);
    }
    p
}

/// Normalization constant `sqrt(2(m+2j+1))`.
#[inline]
pub fn zernike_norm(m: usize, j: usize) -> f64 {
    (2.0 * (m + 2 * j + 1) as f64).sqrt()
}

/// `Z_{m,j}(r) / r^m` for `j = 0..=jmax`; finite at `r = 0`.
pub fn zernike_reduced_all(m: usize, jmax: usize, r: f64) -> Vec<f64> {
    let t = 2.0 * r * r - 1.0;
    let mut p = jacobi_all(jmax, 0.0, m as f64, t);
    for (j, v) in p.iter_mut().enumerate() {
        *v *= zernike_norm(m, j);
    }
    p
}

/// `Z_{m,j}(r)` for `j = 0..=jmax`.
pub fn zernike_radial_all(m: usize, jmax: usize, r: f64) -> Vec<f64> {
    let rm = r.powi(m as i32);
    let mut z = zernike_reduced_all(m, jmax, r);
    for v in &mut z {
        *v *= rm;
    }
    z
}

/// Single orthonormal radial factor `Z_{m,j}(r)`.
pub fn zernike_radial(m: usize, j: usize, r: f64) -> f64 {
    zernike_radial_all(m, j, r)[j]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gauss_legendre;

    #[test]
    fn degree_zero_is_constant() {
        let a = zernike_radial(0, 0, 0.1);
        for r in [0.0, 0.3, 0.77, 1.0] {
            assert_eq!(zernike_radial(0, 0, r), a);
        }
        assert!((a - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn orthonormal_under_200_node_rule() {
        let rule = gauss_legendre(200).mapped(0.0, 1.0);
        for m in [0usize, 1, 4, 11] {
            let jmax = 12;
            let vals: Vec<Vec<f64>> = rule
                .nodes
                .iter()
                .map(|&r| zernike_radial_all(m, jmax, r))
                .collect();
            for j in 0..=jmax {
                for k in 0..=jmax {
                    let ip: f64 = rule
                        .nodes
                        .iter()
                        .zip(&rule.weights)
                        .zip(&vals)
                        .map(|((&r, &w), v)| w * r * v[j] * v[k])
                        .sum();
                    let want = if j == k { 1.0 } else { 0.0 };
                    assert!((ip - want).abs() < 1e-12, "m={m} j={j} k={k}: {ip}");
                }
            }
        }
    }

    #[test]
    fn jacobi_low_degree_closed_forms() {
        // P_1^{(a,b)}(t) = (a+1) + (a+b+2)(t-1)/2
        let (a, b, t) = (0.0, 3.0, 0.4);
        let p = jacobi_all(2, a, b, t);
        assert!((p[1] - ((a + 1.0) + (a + b + 2.0) * (t - 1.0) / 2.0)).abs() < 1e-15);
        // Legendre case
        let p = jacobi_all(3, 0.0, 0.0, t);
        assert!((p[2] - 0.5 * (3.0 * t * t - 1.0)).abs() < 1e-15);
        assert!((p[3] - 0.5 * (5.0 * t * t * t - 3.0 * t)).abs() < 1e-15);
    }

    #[test]
    fn value_at_one() {
        // P_j^{(0,m)}(1) = 1
        for m in 0..5 {
            for j in 0..6 {
                assert!((zernike_radial(m, j, 1.0) - zernike_norm(m, j)).abs() < 1e-12);
            }
        }
    }
}
