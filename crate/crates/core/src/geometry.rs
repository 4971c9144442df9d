//! Data-domain geometries and quadrature rules on them.
//!
//! Every geometry is an open set `A` symmetric under `p -> -p`, dilated by a
//! scale `h`: membership of `p` means `p / h ∈ A`.

use crate::error::{param, Error, Result};
use crate::numerics::{gauss_legendre, QuadratureRule, Rule1d};
use crate::point::Point;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Unscaled shape of the data domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Shape {
    /// Open disk `|p| < radius`.
    Disk { radius: f64 },
    /// Interior of `{θ̂ - x̂}` with both direction angles in `(-theta, theta)`.
    LimitedAperture { theta: f64 },
    /// Union of the open unit disks centered at `±x_star`.
    MultiFreq { x_star: Point },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    #[serde(flatten)]
    pub shape: Shape,
    pub h: f64,
}

impl Geometry {
    pub fn disk(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return param(format!("disk radius must be positive, got {radius}"));
        }
        Ok(Self {
            shape: Shape::Disk { radius },
            h: 1.0,
        })
    }

    /// `theta = π` is accepted and gives the disk of radius 2.
    pub fn limited_aperture(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= PI) {
            return param(format!("aperture must lie in (0, pi], got {theta}"));
        }
        Ok(Self {
            shape: Shape::LimitedAperture { theta },
            h: 1.0,
        })
    }

    pub fn multi_freq(x_star: Point) -> Result<Self> {
        if (x_star.norm() - 1.0).abs() > 1e-12 {
            return param(format!(
                "x_star must be a unit vector, |x_star| = {}",
                x_star.norm()
            ));
        }
        Ok(Self {
            shape: Shape::MultiFreq { x_star },
            h: 1.0,
        })
    }

    pub fn scaled(self, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return param(format!("scale must be positive, got {h}"));
        }
        Ok(Self { h, ..self })
    }

    pub fn kind_name(&self) -> &'static str {
        match self.shape {
            Shape::Disk { .. } => "disk",
            Shape::LimitedAperture { .. } => "L",
            Shape::MultiFreq { .. } => "M",
        }
    }

    /// Membership of `p` in the open set `h A`.
    pub fn contains(&self, p: Point) -> bool {
        let q = p.scale(1.0 / self.h);
        match self.shape {
            Shape::Disk { radius } => q.norm() < radius,
            Shape::MultiFreq { x_star } => (q - x_star).norm() < 1.0 || (q + x_star).norm() < 1.0,
            Shape::LimitedAperture { theta } => in_limited_aperture(q, theta),
        }
    }

    /// Half-widths `(bx, by)` of a box `[-bx, bx] x [-by, by]` containing the set.
    pub fn bounding_box(&self) -> (f64, f64) {
        let (bx, by) = match self.shape {
            Shape::Disk { radius } => (radius, radius),
            Shape::LimitedAperture { .. } => (2.0, 2.0),
            Shape::MultiFreq { x_star } => (x_star.x.abs() + 1.0, x_star.y.abs() + 1.0),
        };
        (bx * self.h, by * self.h)
    }

    /// Supremum of `|p|` over the set.
    pub fn circumradius(&self) -> f64 {
        let r = match self.shape {
            Shape::Disk { radius } => radius,
            Shape::LimitedAperture { theta } => 2.0 * theta.min(FRAC_PI_2).sin(),
            Shape::MultiFreq { .. } => 2.0,
        };
        r * self.h
    }

    /// Closed-form measure of the set.
    pub fn area(&self) -> f64 {
        let a = match self.shape {
            Shape::Disk { radius } => PI * radius * radius,
            Shape::LimitedAperture { theta } => 4.0 * theta - 2.0 * (2.0 * theta).sin(),
            Shape::MultiFreq { .. } => 2.0 * PI,
        };
        a * self.h * self.h
    }
}

/// Does `q = θ̂ - x̂` for unit vectors with angles in `(-theta, theta)`?
///
/// `x̂ · q = -|q|²/2` has at most two unit solutions; each is checked.
fn in_limited_aperture(q: Point, theta: f64) -> bool {
    let r2 = q.norm_sq();
    if r2 >= 4.0 {
        return false;
    }
    let inside = |u: Point| u.angle().abs() < theta;
    if r2 == 0.0 {
        // θ̂ = x̂, any admissible direction works.
        return true;
    }
    let r = r2.sqrt();
    let along = q.scale(-0.5);
    let perp = Point::new(-q.y / r, q.x / r).scale((1.0 - r2 / 4.0).max(0.0).sqrt());
    [along + perp, along - perp]
        .into_iter()
        .any(|x_hat| inside(x_hat) && inside(x_hat + q))
}

/// Radial extent of the limited-aperture set along direction `beta`.
///
/// The set is star-shaped about the origin with boundary
/// `2 sin(min(theta - t, π/2))`, `t` the angular distance from `±π/2`.
fn aperture_radius(theta: f64, beta: f64) -> f64 {
    let b = beta.rem_euclid(PI);
    let t = (b - FRAC_PI_2).abs();
    if t >= theta {
        0.0
    } else {
        2.0 * (theta - t).min(FRAC_PI_2).sin()
    }
}

/// Midpoint rule over the bounding box, filtered by membership; each kept
/// cell carries its full area. `resolution` cells per axis (rounded up to
/// even so the grid is point-symmetric).
pub fn build_quadrature(geometry: &Geometry, resolution: usize) -> Result<QuadratureRule> {
    if resolution < 8 {
        return param(format!("resolution must be at least 8, got {resolution}"));
    }
    let n = resolution + resolution % 2;
    let (bx, by) = geometry.bounding_box();
    let dx = 2.0 * bx / n as f64;
    let dy = 2.0 * by / n as f64;
    let mut nodes = Vec::new();
    // Row-major first half; the second half is its mirror image.
    for j in 0..n / 2 {
        let y = -by + (j as f64 + 0.5) * dy;
        for i in 0..n {
            let p = Point::new(-bx + (i as f64 + 0.5) * dx, y);
            if geometry.contains(p) {
                nodes.push(p);
            }
        }
    }
    if nodes.is_empty() {
        return Err(Error::EmptyQuadrature);
    }
    let weights = vec![dx * dy; nodes.len()];
    Ok(QuadratureRule::symmetric(nodes, weights))
}

/// Spectrally accurate rule: polar Gauss on disks, composite Gauss in angle
/// and radius on the star-shaped aperture set. `resolution` sets roughly
/// `resolution / 4` angular and `resolution / 8` radial nodes.
pub fn build_polar_quadrature(geometry: &Geometry, resolution: usize) -> Result<QuadratureRule> {
    if resolution < 8 {
        return param(format!("resolution must be at least 8, got {resolution}"));
    }
    let n_angle = (resolution / 4).max(2);
    let n_radial = (resolution / 8).max(1);
    let h = geometry.h;
    let (nodes, weights) = match geometry.shape {
        Shape::Disk { radius } => polar_disk_half(Point::ORIGIN, radius * h, n_angle, n_radial),
        Shape::MultiFreq { x_star } => {
            // Complete the disk about +x_star; the mirror covers the other one.
            let center = x_star.scale(h);
            let (mut nodes, mut weights) = polar_disk_half(center, h, n_angle, n_radial);
            let reflected: Vec<Point> = nodes.iter().map(|&p| center.scale(2.0) - p).collect();
            nodes.extend(reflected);
            weights.extend_from_within(..);
            (nodes, weights)
        }
        Shape::LimitedAperture { theta } => aperture_half(theta, h, n_angle, n_radial),
    };
    if nodes.is_empty() {
        return Err(Error::EmptyQuadrature);
    }
    Ok(QuadratureRule::symmetric(nodes, weights))
}

/// Half of a polar rule on the disk of radius `radius` about `center`: the
/// angles in `[0, π)`. The other half is the point reflection through the
/// center.
fn polar_disk_half(
    center: Point,
    radius: f64,
    n_angle: usize,
    n_radial: usize,
) -> (Vec<Point>, Vec<f64>) {
    let n_angle = n_angle + n_angle % 2;
    let radial = gauss_legendre(n_radial).mapped(0.0, radius);
    let dphi = 2.0 * PI / n_angle as f64;
    let mut nodes = Vec::with_capacity(n_angle / 2 * n_radial);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for k in 0..n_angle / 2 {
        let phi = (k as f64 + 0.5) * dphi;
        for (&r, &w) in radial.nodes.iter().zip(&radial.weights) {
            nodes.push(center + Point::polar(r, phi));
            weights.push(w * r * dphi);
        }
    }
    (nodes, weights)
}

fn aperture_half(theta: f64, h: f64, n_angle: usize, n_radial: usize) -> (Vec<Point>, Vec<f64>) {
    // Breakpoints of the boundary radius on [0, π).
    let mut breaks = vec![0.0, FRAC_PI_2, PI];
    for d in [theta, theta - FRAC_PI_2] {
        for b in [FRAC_PI_2 - d, FRAC_PI_2 + d] {
            if b > 0.0 && b < PI {
                breaks.push(b);
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let radial = gauss_legendre(n_radial);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let mid = 0.5 * (a + b);
        if aperture_radius(theta, mid) == 0.0 {
            continue;
        }
        let count = ((n_angle as f64 * (b - a) / PI).ceil() as usize).max(4);
        let angular: Rule1d = gauss_legendre(count).mapped(a, b);
        for (&beta, &wb) in angular.nodes.iter().zip(&angular.weights) {
            let rmax = aperture_radius(theta, beta) * h;
            let rr = radial.mapped(0.0, rmax);
            for (&r, &wr) in rr.nodes.iter().zip(&rr.weights) {
                nodes.push(Point::polar(r, beta));
                weights.push(wb * wr * r);
            }
        }
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Sweeps direction pairs `(a, b)` strictly inside the aperture and
    /// reports whether `θ̂(a) - x̂(b)` comes within `tol` of `q`.
    fn sweep_oracle(q: Point, theta: f64, steps: usize, tol: f64) -> bool {
        (1..steps).any(|i| {
            let a = -theta + 2.0 * theta * i as f64 / steps as f64;
            (1..steps).any(|j| {
                let b = -theta + 2.0 * theta * j as f64 / steps as f64;
                (Point::polar(1.0, a) - Point::polar(1.0, b) - q).norm() < tol
            })
        })
    }

    #[test]
    fn multi_freq_center_is_inside() {
        let g = Geometry::multi_freq(Point::new(1.0, 0.0)).unwrap();
        assert!(g.contains(Point::new(1.0, 0.0)));
        assert!(g.contains(Point::new(-1.0, 0.0)));
        assert!(!g.contains(Point::ORIGIN));
        assert!(!g.contains(Point::new(0.0, 0.5)));
    }

    #[test]
    fn full_aperture_is_disk_of_radius_two() {
        let g = Geometry::limited_aperture(PI).unwrap();
        assert!(g.contains(Point::new(1.99, 0.0)));
        assert!(!g.contains(Point::new(2.01, 0.0)));
        assert!((g.area() - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn half_aperture_excludes_boundary_pair() {
        let g = Geometry::limited_aperture(FRAC_PI_2).unwrap();
        assert!(!g.contains(Point::new(0.0, 2.0)));
        // The sweep oracle only reaches (0, 2) in the limit of closed arcs.
        assert!(!sweep_oracle(Point::new(0.0, 2.0), FRAC_PI_2, 400, 1e-6));
        assert!(g.contains(Point::new(0.0, 1.9)));
    }

    #[test]
    fn aperture_membership_matches_sweep_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for theta in [PI / 4.0, FRAC_PI_2, 3.0 * PI / 4.0] {
            let g = Geometry::limited_aperture(theta).unwrap();
            let mut checked = 0;
            while checked < 150 {
                let q = Point::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
                // Skip points close to the boundary where the sweep is ambiguous.
                let near = (0..64).any(|k| {
                    let d = Point::polar(0.02, k as f64 * PI / 32.0);
                    g.contains(q + d) != g.contains(q)
                });
                if near {
                    continue;
                }
                assert_eq!(
                    g.contains(q),
                    sweep_oracle(q, theta, 600, 0.015),
                    "{q:?} theta={theta}"
                );
                checked += 1;
            }
        }
    }

    #[test]
    fn aperture_radius_matches_membership() {
        for theta in [0.3, PI / 4.0, 1.2, FRAC_PI_2, 2.0, 3.0 * PI / 4.0, PI] {
            let g = Geometry::limited_aperture(theta).unwrap();
            for k in 0..97 {
                let beta = 2.0 * PI * k as f64 / 97.0;
                let r = aperture_radius(theta, beta);
                if r > 1e-9 {
                    assert!(g.contains(Point::polar(r * (1.0 - 1e-9), beta)));
                }
                assert!(
                    !g.contains(Point::polar(r + 1e-9, beta)),
                    "theta={theta} beta={beta}"
                );
            }
        }
    }

    #[test]
    fn membership_is_point_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let geoms = [
            Geometry::disk(1.0).unwrap(),
            Geometry::limited_aperture(3.0 * PI / 4.0).unwrap(),
            Geometry::limited_aperture(PI / 5.0)
                .unwrap()
                .scaled(0.7)
                .unwrap(),
            Geometry::multi_freq(Point::polar(1.0, 0.4)).unwrap(),
        ];
        for g in geoms {
            for _ in 0..10_000 {
                let p = Point::new(rng.gen_range(-2.5..2.5), rng.gen_range(-2.5..2.5));
                assert_eq!(g.contains(p), g.contains(-p), "{g:?} {p:?}");
            }
        }
    }

    #[test]
    fn midpoint_areas() {
        let disk = build_quadrature(&Geometry::disk(1.0).unwrap(), 400).unwrap();
        assert!((disk.total_weight() / PI - 1.0).abs() < 1e-3);
        let m =
            build_quadrature(&Geometry::multi_freq(Point::new(1.0, 0.0)).unwrap(), 400).unwrap();
        assert!((m.total_weight() / (2.0 * PI) - 1.0).abs() < 1e-3);
        assert!(disk.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn midpoint_refinement_reduces_error() {
        let g = Geometry::disk(1.0).unwrap();
        let e200 = (build_quadrature(&g, 200).unwrap().total_weight() - PI).abs();
        let e400 = (build_quadrature(&g, 400).unwrap().total_weight() - PI).abs();
        assert!(e400 * 2.0 <= e200, "{e200} -> {e400}");
    }

    #[test]
    fn coarse_resolution_is_rejected() {
        let g = Geometry::disk(1.0).unwrap();
        assert!(build_quadrature(&g, 4).is_err());
    }

    #[test]
    fn polar_areas_are_exact() {
        let cases = [
            Geometry::disk(1.0).unwrap(),
            Geometry::disk(0.5).unwrap().scaled(3.0).unwrap(),
            Geometry::multi_freq(Point::polar(1.0, 0.9)).unwrap(),
            Geometry::limited_aperture(PI / 4.0).unwrap(),
            Geometry::limited_aperture(3.0 * PI / 4.0)
                .unwrap()
                .scaled(0.5)
                .unwrap(),
            Geometry::limited_aperture(PI).unwrap(),
        ];
        for g in cases {
            let q = build_polar_quadrature(&g, 120).unwrap();
            assert!(
                (q.total_weight() / g.area() - 1.0).abs() < 1e-12,
                "{g:?}: {}",
                q.total_weight()
            );
            assert!(q.nodes.iter().all(|&p| g.contains(p)), "{g:?}");
            let h = q.half.unwrap();
            for i in 0..h {
                assert_eq!(q.nodes[i + h], -q.nodes[i]);
            }
        }
    }

    #[test]
    fn polar_rule_integrates_smooth_function() {
        // ∫_{B(0,1)} e^{x} dx = 2π I_1(1) = π (1 + 1/8 + 1/192 + ...) via series.
        let i1: f64 = (0..20)
            .map(|k| {
                0.5f64.powi(2 * k + 1) / (1..=k).chain(1..=k + 1).map(|v| v as f64).product::<f64>()
            })
            .sum();
        let q = build_polar_quadrature(&Geometry::disk(1.0).unwrap(), 160).unwrap();
        let got = q.integrate(|p| p.x.exp());
        assert!((got - 2.0 * PI * i1).abs() < 1e-13);
    }
}
