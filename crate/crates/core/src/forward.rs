//! Born data synthesis, far-field ingestion and noise.

use crate::error::{param, Error, Result};
use crate::geometry::Geometry;
use crate::numerics::{gauss_legendre, QuadratureRule};
use crate::point::Point;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;

/// One primitive of a contrast configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ShapeSpec {
    Disk {
        center: [f64; 2],
        radius: f64,
        value: f64,
    },
    Annulus {
        center: [f64; 2],
        inner: f64,
        radius: f64,
        value: f64,
    },
}

/// Piecewise-constant cells; `values[j][i]` covers
/// `[x0 + i dx, x0 + (i+1) dx] x [y0 + j dy, y0 + (j+1) dy]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: [f64; 2],
    pub dx: f64,
    pub dy: f64,
    pub values: Vec<Vec<f64>>,
}

/// Contrast configuration file. Shapes superpose; the grid adds on top.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ContrastConfig {
    #[serde(default)]
    pub shapes: Vec<ShapeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
}

#[derive(Debug, Clone, PartialEq)]
enum Component {
    Shape(ShapeSpec),
    Grid(GridSpec),
    Samples {
        rule: QuadratureRule,
        values: Vec<f64>,
    },
}

/// The contrast `q`, extended by zero outside its support, together with a
/// quadrature rule over the support.
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastField {
    components: Vec<Component>,
    nodes: Vec<Point>,
    /// Quadrature weight times `q` at each node.
    weighted: Vec<f64>,
    spacing: f64,
}

/// Default polar resolution for disk and annulus primitives.
pub const DEFAULT_SHAPE_RESOLUTION: usize = 400;
const GRID_CELL_ORDER: usize = 4;

impl ContrastField {
    pub fn from_config(config: &ContrastConfig) -> Result<Self> {
        Self::from_config_with_resolution(config, DEFAULT_SHAPE_RESOLUTION)
    }

    /// `resolution` follows the polar convention of the geometry module:
    /// about `resolution / 4` angles and `resolution / 8` radii per shape.
    pub fn from_config_with_resolution(config: &ContrastConfig, resolution: usize) -> Result<Self> {
        if config.shapes.is_empty() && config.grid.is_none() {
            return param("contrast needs at least one shape or a grid");
        }
        let mut components = Vec::new();
        for s in &config.shapes {
            validate_shape(s)?;
            components.push(Component::Shape(s.clone()));
        }
        if let Some(g) = &config.grid {
            validate_grid(g)?;
            components.push(Component::Grid(g.clone()));
        }
        Ok(Self::assemble(components, resolution))
    }

    /// A contrast known only through samples on a quadrature rule. Point
    /// evaluation returns the value at the nearest node.
    pub fn sampled(rule: QuadratureRule, values: Vec<f64>) -> Result<Self> {
        if rule.len() != values.len() {
            return param(format!("{} samples for {} nodes", values.len(), rule.len()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return param("contrast samples must be finite");
        }
        Ok(Self::assemble(vec![Component::Samples { rule, values }], 0))
    }

    fn assemble(components: Vec<Component>, resolution: usize) -> Self {
        let mut nodes = Vec::new();
        let mut weighted = Vec::new();
        let mut spacing: f64 = 0.0;
        for comp in &components {
            let before = nodes.len();
            let mut area = 0.0;
            match comp {
                Component::Shape(s) => {
                    let (center, inner, outer, value) = shape_params(s);
                    let n_angle = (resolution / 4).max(4);
                    let n_radial = (resolution / 8).max(2);
                    let radial = gauss_legendre(n_radial).mapped(inner, outer);
                    let dphi = 2.0 * PI / n_angle as f64;
                    for k in 0..n_angle {
                        let phi = (k as f64 + 0.5) * dphi;
                        for (&r, &w) in radial.nodes.iter().zip(&radial.weights) {
                            nodes.push(center + Point::polar(r, phi));
                            weighted.push(w * r * dphi * value);
                            area += w * r * dphi;
                        }
                    }
                }
                Component::Grid(g) => {
                    let gl = gauss_legendre(GRID_CELL_ORDER);
                    for (j, row) in g.values.iter().enumerate() {
                        for (i, &v) in row.iter().enumerate() {
                            let x0 = g.origin[0] + i as f64 * g.dx;
                            let y0 = g.origin[1] + j as f64 * g.dy;
                            let rx = gl.mapped(x0, x0 + g.dx);
                            let ry = gl.mapped(y0, y0 + g.dy);
                            for (&y, &wy) in ry.nodes.iter().zip(&ry.weights) {
                                for (&x, &wx) in rx.nodes.iter().zip(&rx.weights) {
                                    nodes.push(Point::new(x, y));
                                    weighted.push(wx * wy * v);
                                    area += wx * wy;
                                }
                            }
                        }
                    }
                }
                Component::Samples { rule, values } => {
                    nodes.extend_from_slice(&rule.nodes);
                    weighted.extend(rule.weights.iter().zip(values).map(|(w, v)| w * v));
                    area = rule.total_weight();
                }
            }
            let count = nodes.len() - before;
            if count > 0 {
                spacing = spacing.max((area / count as f64).sqrt());
            }
        }
        Self {
            components,
            nodes,
            weighted,
            spacing,
        }
    }

    pub fn eval(&self, x: Point) -> f64 {
        self.components.iter().map(|c| component_value(c, x)).sum()
    }

    /// Nodes of the support quadrature and `w q` at each.
    pub fn weighted_nodes(&self) -> (&[Point], &[f64]) {
        (&self.nodes, &self.weighted)
    }

    /// `∫ q`.
    pub fn mass(&self) -> f64 {
        self.weighted.iter().sum()
    }

    /// `∫ e^{iκ p·p'} q(p') dp'`.
    pub fn born_amplitude(&self, kappa: f64, p: Point) -> Complex64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for (&y, &wq) in self.nodes.iter().zip(&self.weighted) {
            let (s, c) = (kappa * p.dot(y)).sin_cos();
            re += wq * c;
            im += wq * s;
        }
        Complex64::new(re, im)
    }

    /// Points on the boundary of the support, `per_component` per primitive
    /// (grid cells with nonzero value contribute their corners).
    pub fn support_boundary(&self, per_component: usize) -> Vec<Point> {
        let mut out = Vec::new();
        for comp in &self.components {
            match comp {
                Component::Shape(s) => {
                    let (center, _, outer, _) = shape_params(s);
                    for k in 0..per_component {
                        let phi = 2.0 * PI * k as f64 / per_component as f64;
                        out.push(center + Point::polar(outer, phi));
                    }
                }
                Component::Grid(g) => {
                    for (j, row) in g.values.iter().enumerate() {
                        for (i, &v) in row.iter().enumerate() {
                            if v == 0.0 {
                                continue;
                            }
                            let x0 = g.origin[0] + i as f64 * g.dx;
                            let y0 = g.origin[1] + j as f64 * g.dy;
                            for (a, b) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
                                out.push(Point::new(x0 + a * g.dx, y0 + b * g.dy));
                            }
                        }
                    }
                }
                Component::Samples { rule, values } => {
                    out.extend(
                        rule.nodes
                            .iter()
                            .zip(values)
                            .filter(|(_, &v)| v != 0.0)
                            .map(|(&p, _)| p),
                    );
                }
            }
        }
        out
    }

    /// `max |x|` over the support boundary.
    pub fn circumradius(&self) -> f64 {
        self.support_boundary(256)
            .iter()
            .map(|p| p.norm())
            .fold(0.0, f64::max)
    }
}

fn shape_params(s: &ShapeSpec) -> (Point, f64, f64, f64) {
    match *s {
        ShapeSpec::Disk {
            center,
            radius,
            value,
        } => (Point::new(center[0], center[1]), 0.0, radius, value),
        ShapeSpec::Annulus {
            center,
            inner,
            radius,
            value,
        } => (Point::new(center[0], center[1]), inner, radius, value),
    }
}

fn validate_shape(s: &ShapeSpec) -> Result<()> {
    let (c, inner, outer, value) = shape_params(s);
    if !(c.x.is_finite() && c.y.is_finite()) {
        return param("shape center must be finite");
    }
    if !(outer > 0.0 && outer.is_finite() && inner >= 0.0 && inner < outer) {
        return param(format!("invalid radii: inner {inner}, outer {outer}"));
    }
    if !(value >= 0.0 && value.is_finite()) {
        return param(format!(
            "contrast values must be finite and nonnegative, got {value}"
        ));
    }
    Ok(())
}

fn validate_grid(g: &GridSpec) -> Result<()> {
    if !(g.dx > 0.0 && g.dy > 0.0 && g.dx.is_finite() && g.dy.is_finite()) {
        return param("grid spacing must be positive");
    }
    if g.values.is_empty() || g.values[0].is_empty() {
        return param("grid has no cells");
    }
    let width = g.values[0].len();
    if g.values.iter().any(|row| row.len() != width) {
        return param("grid rows have different lengths");
    }
    if g.values
        .iter()
        .flatten()
        .any(|v| !(*v >= 0.0 && v.is_finite()))
    {
        return param("grid values must be finite and nonnegative");
    }
    Ok(())
}

fn component_value(c: &Component, x: Point) -> f64 {
    match c {
        Component::Shape(s) => {
            let (center, inner, outer, value) = shape_params(s);
            let r = (x - center).norm();
            if r >= inner && r < outer {
                value
            } else {
                0.0
            }
        }
        Component::Grid(g) => {
            let i = ((x.x - g.origin[0]) / g.dx).floor();
            let j = ((x.y - g.origin[1]) / g.dy).floor();
            if i < 0.0 || j < 0.0 {
                return 0.0;
            }
            g.values
                .get(j as usize)
                .and_then(|row| row.get(i as usize))
                .copied()
                .unwrap_or(0.0)
        }
        Component::Samples { rule, values } => rule
            .nodes
            .iter()
            .zip(values)
            .min_by(|a, b| (*a.0 - x).norm_sq().total_cmp(&(*b.0 - x).norm_sq()))
            .map_or(0.0, |(_, &v)| v),
    }
}

/// Provenance of a data grid.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DataMeta {
    /// Kernel frequency κ of the data-domain operator.
    pub kappa: f64,
    /// Relative noise level requested (fraction of `‖u‖`).
    pub delta: f64,
    /// Weighted norm of the noise actually added.
    pub delta_abs: f64,
    pub seed: Option<u64>,
    /// Noise model, `"gaussian"` when noise was added.
    pub noise: Option<String>,
    /// Heuristic: the contrast quadrature may not resolve the kernel.
    pub under_resolved: bool,
    /// Wavenumber and bandwidth of the regime that produced the data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Resolution of the rule the nodes came from, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
}

/// Complex data on the nodes of a data-domain quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct DataGrid {
    pub geometry: Option<Geometry>,
    pub rule: QuadratureRule,
    pub values: Vec<Complex64>,
    /// Nodes without usable data; excluded from every inner product.
    pub missing: Vec<bool>,
    pub meta: DataMeta,
}

impl DataGrid {
    pub fn new(rule: QuadratureRule, values: Vec<Complex64>, kappa: f64) -> Result<Self> {
        if rule.len() != values.len() {
            return param(format!("{} values for {} nodes", values.len(), rule.len()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return param("data values must be finite");
        }
        let missing = vec![false; values.len()];
        Ok(Self {
            geometry: None,
            rule,
            values,
            missing,
            meta: DataMeta {
                kappa,
                ..Default::default()
            },
        })
    }

    pub fn with_geometry(mut self, geometry: Geometry) -> Self {
        self.geometry = Some(geometry);
        self
    }

    /// Weighted `L²` norm over nodes that are not missing.
    pub fn norm(&self) -> f64 {
        weighted_norm(&self.rule.weights, &self.values, &self.missing)
    }

    /// Fraction of the total weight carried by missing nodes.
    pub fn missing_fraction(&self) -> f64 {
        let total = self.rule.total_weight();
        let gone: f64 = self
            .rule
            .weights
            .iter()
            .zip(&self.missing)
            .filter(|(_, &m)| m)
            .map(|(w, _)| w)
            .sum();
        if total > 0.0 {
            gone / total
        } else {
            0.0
        }
    }
}

fn weighted_norm(weights: &[f64], values: &[Complex64], missing: &[bool]) -> f64 {
    weights
        .iter()
        .zip(values)
        .zip(missing)
        .filter(|(_, &m)| !m)
        .map(|((w, v), _)| w * v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Nodes per kernel period below which a data grid is flagged.
const NODES_PER_PERIOD: f64 = 10.0;

/// `u(p) = ∫ e^{iκ p·p'} q(p') dp'` at every node of `targets`.
pub fn synthesize_born(
    q: &ContrastField,
    kappa: f64,
    targets: &QuadratureRule,
) -> Result<DataGrid> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return param(format!("kernel scale must be positive, got {kappa}"));
    }
    let values = targets
        .nodes
        .iter()
        .map(|&p| q.born_amplitude(kappa, p))
        .collect();
    let mut grid = DataGrid::new(targets.clone(), values, kappa)?;
    let p_max = targets.nodes.iter().map(|p| p.norm()).fold(0.0, f64::max);
    if p_max > 0.0 {
        let period = 2.0 * PI / (kappa * p_max);
        grid.meta.under_resolved = q.spacing > period / NODES_PER_PERIOD;
    }
    Ok(grid)
}

/// Scattering amplitude `k² ∫ e^{-ik x̂·p'} q(p') e^{ik p'·θ̂} dp'`.
pub fn far_field(q: &ContrastField, x_hat: Point, theta_hat: Point, k: f64) -> Complex64 {
    q.born_amplitude(k, theta_hat - x_hat) * (k * k)
}

/// A far-field measurement at wavenumber `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FarFieldSample {
    pub x_hat: Point,
    pub theta_hat: Point,
    pub k: f64,
    pub value: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct IngestOptions {
    /// Nodes farther than this from every sample are flagged missing.
    /// Defaults to four times the typical sample spacing.
    pub cutoff: Option<f64>,
}

/// Maps far-field samples to `p = (k/κ)(θ̂ - x̂)` with value `ũ / k²`, averages
/// duplicates, and interpolates onto `target` by inverse-distance weighting
/// of the four nearest points.
pub fn ingest_farfield(
    samples: &[FarFieldSample],
    kappa: f64,
    target: &QuadratureRule,
    options: IngestOptions,
) -> Result<DataGrid> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return param(format!("kernel scale must be positive, got {kappa}"));
    }
    let mut buckets: HashMap<(i64, i64), (Point, Complex64, usize)> = HashMap::new();
    let mut order = Vec::new();
    for s in samples {
        if !(s.k > 0.0) {
            return param(format!("sample wavenumber must be positive, got {}", s.k));
        }
        let p = (s.theta_hat - s.x_hat).scale(s.k / kappa);
        let key = ((p.x * 1e12).round() as i64, (p.y * 1e12).round() as i64);
        let entry = buckets.entry(key).or_insert_with(|| {
            order.push(key);
            (p, Complex64::new(0.0, 0.0), 0)
        });
        entry.1 += s.value / (s.k * s.k);
        entry.2 += 1;
    }
    let points: Vec<(Point, Complex64)> = order
        .iter()
        .map(|k| {
            let (p, sum, n) = buckets[k];
            (p, sum / n as f64)
        })
        .collect();

    let n = target.len();
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    let mut missing = vec![true; n];
    if !points.is_empty() {
        let index = GridIndex::new(&points);
        let cutoff = options.cutoff.unwrap_or(4.0 * index.cell);
        for (i, &p) in target.nodes.iter().enumerate() {
            let near = index.nearest(&points, p, 4);
            if near.is_empty() || near[0].1 > cutoff {
                continue;
            }
            missing[i] = false;
            if near[0].1 < 1e-14 {
                values[i] = points[near[0].0].1;
                continue;
            }
            let mut num = Complex64::new(0.0, 0.0);
            let mut den = 0.0;
            for &(j, d) in &near {
                let w = 1.0 / (d * d);
                num += points[j].1 * w;
                den += w;
            }
            values[i] = num / den;
        }
    }
    let mut grid = DataGrid::new(target.clone(), values, kappa)?;
    grid.missing = missing;
    Ok(grid)
}

/// Uniform bucket grid for nearest-neighbour queries.
struct GridIndex {
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl GridIndex {
    fn new(points: &[(Point, Complex64)]) -> Self {
        let (mut lo, mut hi) = (points[0].0, points[0].0);
        for (p, _) in points {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let area = ((hi.x - lo.x) * (hi.y - lo.y)).max(1e-300);
        let mut cell = (area / points.len() as f64).sqrt();
        if !(cell > 0.0) {
            cell = 1.0;
        }
        let nx = (((hi.x - lo.x) / cell).floor() as usize + 1).min(1 << 12);
        let ny = (((hi.y - lo.y) / cell).floor() as usize + 1).min(1 << 12);
        let mut buckets = vec![Vec::new(); nx * ny];
        let mut index = Self {
            origin: lo,
            cell,
            nx,
            ny,
            buckets: Vec::new(),
        };
        for (k, (p, _)) in points.iter().enumerate() {
            let (i, j) = index.cell_of(*p);
            buckets[j * nx + i].push(k);
        }
        index.buckets = buckets;
        index
    }

    fn cell_of(&self, p: Point) -> (usize, usize) {
        let i = ((p.x - self.origin.x) / self.cell)
            .floor()
            .clamp(0.0, (self.nx - 1) as f64);
        let j = ((p.y - self.origin.y) / self.cell)
            .floor()
            .clamp(0.0, (self.ny - 1) as f64);
        (i as usize, j as usize)
    }

    /// Up to `k` nearest points as `(index, distance)`, closest first.
    fn nearest(&self, points: &[(Point, Complex64)], p: Point, k: usize) -> Vec<(usize, f64)> {
        let (ci, cj) = self.cell_of(p);
        let mut best: Vec<(usize, f64)> = Vec::new();
        let max_ring = self.nx.max(self.ny);
        for ring in 0..=max_ring {
            let lo_i = ci as i64 - ring as i64;
            let hi_i = ci as i64 + ring as i64;
            let lo_j = cj as i64 - ring as i64;
            let hi_j = cj as i64 + ring as i64;
            for j in lo_j..=hi_j {
                for i in lo_i..=hi_i {
                    let on_ring = i == lo_i || i == hi_i || j == lo_j || j == hi_j;
                    if !on_ring || i < 0 || j < 0 || i >= self.nx as i64 || j >= self.ny as i64 {
                        continue;
                    }
                    for &idx in &self.buckets[j as usize * self.nx + i as usize] {
                        best.push((idx, (points[idx].0 - p).norm()));
                    }
                }
            }
            best.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            best.truncate(k);
            // Points beyond this ring are at least `ring * cell` away.
            if best.len() == k && best[k - 1].1 <= ring as f64 * self.cell {
                break;
            }
        }
        best
    }
}

/// Adds complex Gaussian noise whose weighted norm is exactly
/// `delta · ‖u‖` (relative convention).
pub fn add_noise(data: &DataGrid, delta: f64, seed: u64) -> Result<DataGrid> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return param(format!("noise level must be nonnegative, got {delta}"));
    }
    let mut out = add_noise_absolute(data, delta * data.norm(), seed)?;
    out.meta.delta = delta;
    Ok(out)
}

/// Adds complex Gaussian noise with weighted norm exactly `delta_abs`.
pub fn add_noise_absolute(data: &DataGrid, delta_abs: f64, seed: u64) -> Result<DataGrid> {
    if !(delta_abs >= 0.0 && delta_abs.is_finite()) {
        return param(format!("noise level must be nonnegative, got {delta_abs}"));
    }
    let mut out = data.clone();
    out.meta.seed = Some(seed);
    out.meta.noise = Some("gaussian".into());
    out.meta.delta_abs = delta_abs;
    let norm = data.norm();
    out.meta.delta = if norm > 0.0 { delta_abs / norm } else { 0.0 };
    if delta_abs == 0.0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise: Vec<Complex64> = data
        .missing
        .iter()
        .map(|&m| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            if m {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(re, im)
            }
        })
        .collect();
    let raw = weighted_norm(&data.rule.weights, &noise, &data.missing);
    if raw == 0.0 {
        return Err(Error::Parameter("no nodes available for noise".into()));
    }
    let scale = delta_abs / raw;
    for (v, n) in out.values.iter_mut().zip(&noise) {
        *v += n * scale;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_polar_quadrature;
    use crate::numerics::bessel_j;

    fn disk_contrast(r: f64) -> ContrastField {
        let cfg = ContrastConfig {
            shapes: vec![ShapeSpec::Disk {
                center: [0.0, 0.0],
                radius: r,
                value: 1.0,
            }],
            grid: None,
        };
        ContrastField::from_config(&cfg).unwrap()
    }

    fn targets() -> QuadratureRule {
        build_polar_quadrature(&Geometry::disk(1.0).unwrap(), 48).unwrap()
    }

    #[test]
    fn zero_frequency_moment() {
        let q = disk_contrast(0.4);
        let u = q.born_amplitude(3.0, Point::ORIGIN);
        assert!((u.re - PI * 0.16).abs() < 1e-12 && u.im.abs() < 1e-12);
    }

    #[test]
    fn disk_indicator_closed_form() {
        let (r, kappa) = (0.4, 5.0);
        let q = disk_contrast(r);
        for p in [
            Point::new(0.3, 0.1),
            Point::new(-0.8, 0.5),
            Point::new(0.0, 0.95),
        ] {
            let s = p.norm();
            let exact = 2.0 * PI * r * bessel_j(1, kappa * r * s) / (kappa * s);
            let u = q.born_amplitude(kappa, p);
            assert!(
                (u.re - exact).abs() < 1e-12 * exact.abs().max(1e-3),
                "{p:?}"
            );
            assert!(u.im.abs() < 1e-12);
        }
    }

    #[test]
    fn far_field_relations() {
        let cfg = ContrastConfig {
            shapes: vec![ShapeSpec::Disk {
                center: [0.1, -0.05],
                radius: 0.2,
                value: 2.0,
            }],
            grid: None,
        };
        let q = ContrastField::from_config(&cfg).unwrap();
        let k = 3.0;
        let x = Point::polar(1.0, 0.4);
        let t = Point::polar(1.0, 2.1);
        let v = far_field(&q, x, t, k);
        let born = q.born_amplitude(k, t - x) * (k * k);
        assert!((v - born).norm() < 1e-14);
        let fwd = far_field(&q, x, x, k);
        assert!((fwd.re - k * k * q.mass()).abs() < 1e-12 && fwd.im.abs() < 1e-12);
        let rec = far_field(&q, -t, -x, k);
        assert!((v - rec).norm() < 1e-12);
    }

    #[test]
    fn linearity_and_hermitian_symmetry() {
        let q1 = disk_contrast(0.3);
        let cfg = ContrastConfig {
            shapes: vec![ShapeSpec::Annulus {
                center: [0.1, 0.0],
                inner: 0.1,
                radius: 0.25,
                value: 0.5,
            }],
            grid: None,
        };
        let q2 = ContrastField::from_config(&cfg).unwrap();
        let both = ContrastConfig {
            shapes: vec![
                ShapeSpec::Disk {
                    center: [0.0, 0.0],
                    radius: 0.3,
                    value: 1.0,
                },
                ShapeSpec::Annulus {
                    center: [0.1, 0.0],
                    inner: 0.1,
                    radius: 0.25,
                    value: 0.5,
                },
            ],
            grid: None,
        };
        let q12 = ContrastField::from_config(&both).unwrap();
        let t = targets();
        let u1 = synthesize_born(&q1, 4.0, &t).unwrap();
        let u2 = synthesize_born(&q2, 4.0, &t).unwrap();
        let u12 = synthesize_born(&q12, 4.0, &t).unwrap();
        for i in 0..t.len() {
            assert!((u12.values[i] - u1.values[i] - u2.values[i]).norm() < 1e-12);
        }
        let h = t.half.unwrap();
        for i in 0..h {
            assert!((u12.values[i + h] - u12.values[i].conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn grid_contrast_eval_and_mass() {
        let cfg = ContrastConfig {
            shapes: vec![],
            grid: Some(GridSpec {
                origin: [-0.2, -0.1],
                dx: 0.1,
                dy: 0.1,
                values: vec![vec![1.0, 2.0], vec![0.0, 3.0]],
            }),
        };
        let q = ContrastField::from_config(&cfg).unwrap();
        assert_eq!(q.eval(Point::new(-0.15, -0.05)), 1.0);
        assert_eq!(q.eval(Point::new(-0.05, 0.05)), 3.0);
        assert_eq!(q.eval(Point::new(0.5, 0.0)), 0.0);
        assert!((q.mass() - 0.06).abs() < 1e-15);
    }

    #[test]
    fn negative_contrast_rejected() {
        let cfg = ContrastConfig {
            shapes: vec![ShapeSpec::Disk {
                center: [0.0, 0.0],
                radius: 0.3,
                value: -1.0,
            }],
            grid: None,
        };
        assert!(ContrastField::from_config(&cfg).is_err());
        assert!(ContrastField::from_config(&ContrastConfig::default()).is_err());
    }

    #[test]
    fn noise_levels() {
        let q = disk_contrast(0.3);
        let u = synthesize_born(&q, 4.0, &targets()).unwrap();
        assert_eq!(add_noise(&u, 0.0, 1).unwrap().values, u.values);
        let noisy = add_noise(&u, 0.05, 9).unwrap();
        let diff: Vec<Complex64> = noisy
            .values
            .iter()
            .zip(&u.values)
            .map(|(a, b)| a - b)
            .collect();
        let n = weighted_norm(&u.rule.weights, &diff, &u.missing);
        assert!((n / u.norm() - 0.05).abs() < 1e-12);
        let again = add_noise(&u, 0.05, 9).unwrap();
        assert!(noisy
            .values
            .iter()
            .zip(&again.values)
            .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()));
    }

    #[test]
    fn ingest_edge_cases() {
        let t = targets();
        let empty = ingest_farfield(&[], 1.0, &t, IngestOptions::default()).unwrap();
        assert!(empty.missing.iter().all(|&m| m));
        let x = Point::polar(1.0, 0.3);
        let s = FarFieldSample {
            x_hat: x,
            theta_hat: x,
            k: 2.0,
            value: Complex64::new(4.0, 0.0),
        };
        let rule = QuadratureRule::new(vec![Point::ORIGIN, Point::new(0.9, 0.0)], vec![1.0, 1.0]);
        let g = ingest_farfield(&[s, s], 1.0, &rule, IngestOptions { cutoff: Some(0.5) }).unwrap();
        assert_eq!(g.values[0], Complex64::new(1.0, 0.0));
        assert_eq!(g.missing, vec![false, true]);
    }
}
