//! One-dimensional Gauss–Legendre rules and the planar rule container.

use crate::point::Point;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Nodes and positive weights on an interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1d {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Affine map from [-1, 1] onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> Rule1d {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        Rule1d {
            nodes: self.nodes.iter().map(|t| mid + half * t).collect(),
            weights: self.weights.iter().map(|w| w * half).collect(),
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss–Legendre rule with `n` nodes on [-1, 1], nodes ascending.
///
/// Exact for polynomials of degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> Rule1d {
    assert!(n >= 1, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton on the three-term recurrence.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule1d { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Planar quadrature rule.
///
/// When `half` is `Some(h)` the rule is point-symmetric: `nodes[i + h] ==
/// -nodes[i]` and `weights[i + h] == weights[i]` for `i < h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    pub half: Option<usize>,
}

impl QuadratureRule {
    pub fn new(nodes: Vec<Point>, weights: Vec<f64>) -> Self {
        assert_eq!(nodes.len(), weights.len());
        Self {
            nodes,
            weights,
            half: None,
        }
    }

    /// Builds a point-symmetric rule from its first half.
    pub fn symmetric(half_nodes: Vec<Point>, half_weights: Vec<f64>) -> Self {
        assert_eq!(half_nodes.len(), half_weights.len());
        let h = half_nodes.len();
        let mut nodes = half_nodes;
        let mirrored: Vec<Point> = nodes.iter().map(|&p| -p).collect();
        nodes.extend(mirrored);
        let mut weights = half_weights;
        weights.extend_from_within(..);
        Self {
            nodes,
            weights,
            half: Some(h),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(p))
            .sum()
    }

    /// Uniform dilation `p -> s p`; weights scale by `s^2`.
    pub fn dilated(&self, s: f64) -> Self {
        Self {
            nodes: self.nodes.iter().map(|p| p.scale(s)).collect(),
            weights: self.weights.iter().map(|w| w * s * s).collect(),
            half: self.half,
        }
    }

    /// True when both rules have bitwise identical nodes and weights.
    pub fn same_nodes(&self, other: &QuadratureRule) -> bool {
        self.len() == other.len()
            && self
                .nodes
                .iter()
                .zip(&other.nodes)
                .all(|(a, b)| a.x.to_bits() == b.x.to_bits() && a.y.to_bits() == b.y.to_bits())
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}
