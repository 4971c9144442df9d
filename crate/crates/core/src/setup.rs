//! Problem setup: contrast, measurement regime, bandwidth and the derived
//! data-domain geometry.

use crate::error::{param, Error, Result};
use crate::forward::{ContrastConfig, ContrastField};
use crate::geometry::{Geometry, Shape};
use crate::point::Point;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// Margin factor on the circumradius of the support for the default
/// full-aperture bandwidth.
pub const DEFAULT_MARGIN: f64 = 1.1;
/// Support boundary samples per primitive used by [`ProblemSetup::validate`].
pub const BOUNDARY_SAMPLES: usize = 1024;

/// Setup file contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum SetupConfig {
    Full {
        k: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c_param: Option<f64>,
        contrast: ContrastConfig,
    },
    Limited {
        k: f64,
        theta: f64,
        c_param: Option<f64>,
        contrast: ContrastConfig,
    },
    Multifreq {
        #[serde(rename = "K")]
        k_max: f64,
        x_star: [f64; 2],
        c_param: Option<f64>,
        contrast: ContrastConfig,
    },
}

/// Measurement regime with the bandwidth resolved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum Regime {
    Full { k: f64, c: f64 },
    Limited { k: f64, theta: f64, c: f64 },
    Multifreq { k_max: f64, x_star: Point, c: f64 },
}

impl Regime {
    /// Bandwidth `c_F`, `c_L` or `c_M`.
    pub fn bandwidth(&self) -> f64 {
        match *self {
            Regime::Full { c, .. } | Regime::Limited { c, .. } | Regime::Multifreq { c, .. } => c,
        }
    }

    /// Wavenumber `k` (or `K`).
    pub fn wavenumber(&self) -> f64 {
        match *self {
            Regime::Full { k, .. } | Regime::Limited { k, .. } => k,
            Regime::Multifreq { k_max, .. } => k_max,
        }
    }

    /// Dilation `h`: `c/2k`, `c/k` or `c/K`.
    pub fn scale(&self) -> f64 {
        match *self {
            Regime::Full { k, c } => c / (2.0 * k),
            Regime::Limited { k, c, .. } => c / k,
            Regime::Multifreq { k_max, c, .. } => c / k_max,
        }
    }

    /// Kernel frequency of the data-domain operator: `4k²/c`, `k²/c`, `K²/c`.
    pub fn kernel_scale(&self) -> f64 {
        match *self {
            Regime::Full { k, c } => 4.0 * k * k / c,
            Regime::Limited { k, c, .. } => k * k / c,
            Regime::Multifreq { k_max, c, .. } => k_max * k_max / c,
        }
    }

    /// Scaled data domain `D = h A`.
    pub fn data_geometry(&self) -> Result<Geometry> {
        let base = match *self {
            Regime::Full { .. } => Geometry::disk(1.0)?,
            Regime::Limited { theta, .. } => Geometry::limited_aperture(theta)?,
            Regime::Multifreq { x_star, .. } => Geometry::multi_freq(x_star)?,
        };
        base.scaled(self.scale())
    }
}

#[derive(Debug, Clone)]
pub struct ProblemSetup {
    pub contrast: ContrastField,
    pub regime: Regime,
}

/// Outcome of a successful containment check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Containment {
    pub samples: usize,
    /// Smallest distance from a sampled support point to the boundary of D.
    pub margin: f64,
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        param(format!("{name} must be positive, got {v}"))
    }
}

impl SetupConfig {
    pub fn contrast(&self) -> &ContrastConfig {
        match self {
            SetupConfig::Full { contrast, .. }
            | SetupConfig::Limited { contrast, .. }
            | SetupConfig::Multifreq { contrast, .. } => contrast,
        }
    }

    /// Resolves the regime. Only the full-aperture default bandwidth looks at
    /// the contrast.
    pub fn regime(&self) -> Result<Regime> {
        match self {
            SetupConfig::Full {
                k,
                c_param,
                contrast,
            } => {
                let k = positive("k", *k)?;
                let c = match c_param {
                    Some(c) => positive("c_param", *c)?,
                    None => {
                        2.0 * k
                            * DEFAULT_MARGIN
                            * ContrastField::from_config(contrast)?.circumradius()
                    }
                };
                Ok(Regime::Full { k, c })
            }
            SetupConfig::Limited {
                k, theta, c_param, ..
            } => {
                let k = positive("k", *k)?;
                if !(*theta > 0.0 && *theta <= PI) {
                    return param(format!("theta must lie in (0, pi], got {theta}"));
                }
                let c = positive("c_param", c_param.ok_or_else(|| missing_c("limited"))?)?;
                Ok(Regime::Limited {
                    k,
                    theta: *theta,
                    c,
                })
            }
            SetupConfig::Multifreq {
                k_max,
                x_star,
                c_param,
                ..
            } => {
                let k_max = positive("K", *k_max)?;
                let x_star = Point::new(x_star[0], x_star[1]);
                if (x_star.norm() - 1.0).abs() > 1e-12 {
                    return param(format!(
                        "x_star must be a unit vector, |x_star| = {}",
                        x_star.norm()
                    ));
                }
                let c = positive("c_param", c_param.ok_or_else(|| missing_c("multifreq"))?)?;
                Ok(Regime::Multifreq { k_max, x_star, c })
            }
        }
    }
}

impl ProblemSetup {
    pub fn from_config(config: &SetupConfig) -> Result<Self> {
        let regime = config.regime()?;
        let contrast = ContrastField::from_config(config.contrast())?;
        Ok(Self { contrast, regime })
    }

    pub fn effective_kernel_scale(&self) -> f64 {
        self.regime.kernel_scale()
    }

    pub fn data_geometry(&self) -> Result<Geometry> {
        self.regime.data_geometry()
    }

    /// Checks that sampled points of the support boundary lie in `D`.
    pub fn validate(&self) -> Result<Containment> {
        let geometry = self.data_geometry()?;
        let points = self.contrast.support_boundary(BOUNDARY_SAMPLES);
        let offending: Vec<Point> = points
            .iter()
            .copied()
            .filter(|&p| !geometry.contains(p))
            .collect();
        if !offending.is_empty() {
            let shown: Vec<String> = offending
                .iter()
                .take(8)
                .map(|p| format!("({:.6}, {:.6})", p.x, p.y))
                .collect();
            return Err(Error::Containment(format!(
                "{} of {} support samples lie outside the data domain, e.g. {}",
                offending.len(),
                points.len(),
                shown.join(", ")
            )));
        }
        let margin = points
            .iter()
            .map(|&p| boundary_distance(&geometry, p))
            .fold(f64::INFINITY, f64::min);
        Ok(Containment {
            samples: points.len(),
            margin,
        })
    }
}

fn missing_c(regime: &str) -> Error {
    Error::Parameter(format!("the {regime} regime needs an explicit c_param"))
}

/// Distance from an interior point to the boundary of the geometry.
pub fn boundary_distance(g: &Geometry, p: Point) -> f64 {
    let h = g.h;
    let q = p.scale(1.0 / h);
    match g.shape {
        Shape::Disk { radius } => h * (radius - q.norm()),
        Shape::MultiFreq { x_star } => {
            h * (1.0 - (q - x_star).norm()).max(1.0 - (q + x_star).norm())
        }
        Shape::LimitedAperture { theta } => {
            // Distance to a dense sampling of the star-shaped boundary.
            let n = 4096;
            (0..n)
                .map(|i| {
                    let beta = 2.0 * PI * i as f64 / n as f64;
                    let b = beta.rem_euclid(PI);
                    let t = (b - FRAC_PI_2).abs();
                    let r = if t >= theta {
                        0.0
                    } else {
                        2.0 * (theta - t).min(FRAC_PI_2).sin()
                    };
                    (Point::polar(r, beta) - q).norm()
                })
                .fold(f64::INFINITY, f64::min)
                * h
        }
    }
}
