//! Synthetic process windows drawn uniformly from simple regions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Deserialize;

use crate::error::{Result, SvddError};
use crate::window::{default_column_names, ProcessWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeKind {
    Disk,
    Annulus,
    Boomerang,
    TwoDonut,
    Box,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 5] = [
        ShapeKind::Disk,
        ShapeKind::Annulus,
        ShapeKind::Boomerang,
        ShapeKind::TwoDonut,
        ShapeKind::Box,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ShapeKind::Disk => "disk",
            ShapeKind::Annulus => "annulus",
            ShapeKind::Boomerang => "boomerang",
            ShapeKind::TwoDonut => "two_donut",
            ShapeKind::Box => "box",
        }
    }

    pub fn valid_names() -> String {
        Self::ALL.map(Self::name).join(", ")
    }
}

impl fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ShapeKind {
    type Err = SvddError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                SvddError::InvalidParameter(format!(
                    "unknown shape '{s}'; valid shapes: {}",
                    Self::valid_names()
                ))
            })
    }
}

/// Region to sample from.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Solid ball (a disk when `center` has two coordinates).
    Disk { center: Vec<f64>, radius: f64 },
    /// Spherical shell between two radii.
    Annulus {
        center: Vec<f64>,
        inner: f64,
        outer: f64,
    },
    /// Annulus sector in the plane. `center` is the area centroid of the
    /// band; `orientation_deg` is the direction from the arc's pivot to the
    /// middle of the band.
    Boomerang {
        center: [f64; 2],
        inner: f64,
        outer: f64,
        extent_deg: f64,
        orientation_deg: f64,
    },
    /// Equal mixture of two planar annuli.
    TwoDonut {
        centers: [[f64; 2]; 2],
        inner: f64,
        outer: f64,
    },
    /// Axis-aligned box `center ± half_widths`.
    Box {
        center: Vec<f64>,
        half_widths: Vec<f64>,
    },
}

impl Shape {
    /// Disk of radius 2 at the origin.
    pub fn default_disk() -> Self {
        Shape::Disk {
            center: vec![0.0, 0.0],
            radius: 2.0,
        }
    }

    pub fn default_annulus() -> Self {
        Shape::Annulus {
            center: vec![0.0, 0.0],
            inner: 1.0,
            outer: 2.0,
        }
    }

    /// Half-annulus band with radii 4–5.5 opening downward, centroid at
    /// (5, 5); the band fits inside `[-2, 12]²`.
    pub fn default_boomerang() -> Self {
        Shape::Boomerang {
            center: [5.0, 5.0],
            inner: 4.0,
            outer: 5.5,
            extent_deg: 180.0,
            orientation_deg: 90.0,
        }
    }

    /// Annuli of radii 2–4 at (0, 0) and (10, 20); the mixture fits inside
    /// `[-10, 20] × [-10, 30]`.
    pub fn default_two_donut() -> Self {
        Shape::TwoDonut {
            centers: [[0.0, 0.0], [10.0, 20.0]],
            inner: 2.0,
            outer: 4.0,
        }
    }

    pub fn default_box() -> Self {
        Shape::Box {
            center: vec![0.0, 0.0],
            half_widths: vec![1.0, 1.0],
        }
    }

    pub fn default_for(kind: ShapeKind) -> Self {
        match kind {
            ShapeKind::Disk => Self::default_disk(),
            ShapeKind::Annulus => Self::default_annulus(),
            ShapeKind::Boomerang => Self::default_boomerang(),
            ShapeKind::TwoDonut => Self::default_two_donut(),
            ShapeKind::Box => Self::default_box(),
        }
    }

    pub fn kind(&self) -> ShapeKind {
        match self {
            Shape::Disk { .. } => ShapeKind::Disk,
            Shape::Annulus { .. } => ShapeKind::Annulus,
            Shape::Boomerang { .. } => ShapeKind::Boomerang,
            Shape::TwoDonut { .. } => ShapeKind::TwoDonut,
            Shape::Box { .. } => ShapeKind::Box,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Shape::Disk { center, .. }
            | Shape::Annulus { center, .. }
            | Shape::Box { center, .. } => center.len(),
            Shape::Boomerang { .. } | Shape::TwoDonut { .. } => 2,
        }
    }

    fn validate(&self) -> Result<()> {
        let invalid = |m: &str| Err(SvddError::InvalidParameter(format!("{}: {m}", self.kind())));
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if self.dim() == 0 {
            return invalid("center must have at least one coordinate");
        }
        match self {
            Shape::Disk { center, radius } => {
                if !finite(center) || !(*radius > 0.0 && radius.is_finite()) {
                    return invalid("radius must be positive and center finite");
                }
            }
            Shape::Annulus {
                center,
                inner,
                outer,
            } => {
                if !finite(center) || !(*inner > 0.0 && inner < outer && outer.is_finite()) {
                    return invalid("radii must satisfy 0 < inner < outer");
                }
            }
            Shape::Boomerang {
                center,
                inner,
                outer,
                extent_deg,
                orientation_deg,
            } => {
                if !finite(center) || !orientation_deg.is_finite() {
                    return invalid("center and orientation must be finite");
                }
                if !(*inner > 0.0 && inner < outer && outer.is_finite()) {
                    return invalid("radii must satisfy 0 < inner < outer");
                }
                if !(*extent_deg > 0.0 && *extent_deg <= 360.0) {
                    return invalid("angular extent must be in (0, 360] degrees");
                }
            }
            Shape::TwoDonut {
                centers,
                inner,
                outer,
            } => {
                if !finite(&centers[0]) || !finite(&centers[1]) {
                    return invalid("centers must be finite");
                }
                if !(*inner > 0.0 && inner < outer && outer.is_finite()) {
                    return invalid("radii must satisfy 0 < inner < outer");
                }
            }
            Shape::Box {
                center,
                half_widths,
            } => {
                if half_widths.len() != center.len() {
                    return invalid("half widths must match the center dimension");
                }
                if !finite(center) || !half_widths.iter().all(|h| *h > 0.0 && h.is_finite()) {
                    return invalid("half widths must be positive");
                }
            }
        }
        Ok(())
    }
}

/// A shape plus sample count and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSpec {
    pub shape: Shape,
    pub n: usize,
    pub seed: u64,
}

impl ShapeSpec {
    pub fn new(shape: Shape, n: usize, seed: u64) -> Self {
        Self { shape, n, seed }
    }
}

/// Unit vector uniform on the sphere in `dim` dimensions.
fn unit_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    if dim == 1 {
        return vec![if rng.random::<bool>() { 1.0 } else { -1.0 }];
    }
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Radius of a point uniform in the shell `[inner, outer]` of a `dim`-ball.
fn shell_radius(rng: &mut ChaCha8Rng, dim: usize, inner: f64, outer: f64) -> f64 {
    let d = dim as f64;
    let u: f64 = rng.random();
    (inner.powf(d) + u * (outer.powf(d) - inner.powf(d))).powf(1.0 / d)
}

fn planar_ring_point(
    rng: &mut ChaCha8Rng,
    pivot: [f64; 2],
    inner: f64,
    outer: f64,
    angle: f64,
) -> [f64; 2] {
    let u: f64 = rng.random();
    let r = (inner * inner + u * (outer * outer - inner * inner)).sqrt();
    [pivot[0] + r * angle.cos(), pivot[1] + r * angle.sin()]
}

/// Distance from the pivot to the area centroid of an annulus sector with
/// half-angle `half`.
pub fn sector_centroid_offset(inner: f64, outer: f64, half: f64) -> f64 {
    let radial = 2.0 / 3.0 * (outer.powi(3) - inner.powi(3)) / (outer.powi(2) - inner.powi(2));
    if half >= PI {
        0.0
    } else {
        radial * half.sin() / half
    }
}

pub fn generate(spec: &ShapeSpec) -> Result<ProcessWindow> {
    if spec.n == 0 {
        return Err(SvddError::InvalidParameter(
            "sample count n must be at least 1".into(),
        ));
    }
    spec.shape.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let q = spec.shape.dim();
    let mut data = Array2::zeros((spec.n, q));

    for (i, mut row) in data.rows_mut().into_iter().enumerate() {
        match &spec.shape {
            Shape::Disk { center, radius } => {
                let dir = unit_direction(&mut rng, q);
                let r = shell_radius(&mut rng, q, 0.0, *radius);
                for j in 0..q {
                    row[j] = center[j] + r * dir[j];
                }
            }
            Shape::Annulus {
                center,
                inner,
                outer,
            } => {
                let dir = unit_direction(&mut rng, q);
                let r = shell_radius(&mut rng, q, *inner, *outer);
                for j in 0..q {
                    row[j] = center[j] + r * dir[j];
                }
            }
            Shape::Boomerang {
                center,
                inner,
                outer,
                extent_deg,
                orientation_deg,
            } => {
                let half = extent_deg.to_radians() / 2.0;
                let mid = orientation_deg.to_radians();
                let off = sector_centroid_offset(*inner, *outer, half);
                let pivot = [center[0] - off * mid.cos(), center[1] - off * mid.sin()];
                let u: f64 = rng.random();
                let angle = mid - half + 2.0 * half * u;
                let p = planar_ring_point(&mut rng, pivot, *inner, *outer, angle);
                row[0] = p[0];
                row[1] = p[1];
            }
            Shape::TwoDonut {
                centers,
                inner,
                outer,
            } => {
                let c = centers[i % 2];
                let u: f64 = rng.random();
                let p = planar_ring_point(&mut rng, c, *inner, *outer, 2.0 * PI * u);
                row[0] = p[0];
                row[1] = p[1];
            }
            Shape::Box {
                center,
                half_widths,
            } => {
                for j in 0..q {
                    let u: f64 = rng.random();
                    row[j] = center[j] + half_widths[j] * (2.0 * u - 1.0);
                }
            }
        }
    }
    ProcessWindow::new(data, default_column_names(q))
}

/// Shape parameters read from a TOML file; absent keys take the defaults of
/// the named shape.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeConfig {
    pub shape: Option<String>,
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub center: Option<Vec<f64>>,
    pub second_center: Option<Vec<f64>>,
    pub radius: Option<f64>,
    pub inner_radius: Option<f64>,
    pub outer_radius: Option<f64>,
    pub extent: Option<f64>,
    pub orientation: Option<f64>,
    pub half_widths: Option<Vec<f64>>,
}

impl ShapeConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| SvddError::Parse {
            line: 0,
            message: e.message().to_owned(),
        })
    }

    /// Fields set in `other` override those in `self`.
    pub fn merged(self, other: ShapeConfig) -> ShapeConfig {
        ShapeConfig {
            shape: other.shape.or(self.shape),
            n: other.n.or(self.n),
            seed: other.seed.or(self.seed),
            center: other.center.or(self.center),
            second_center: other.second_center.or(self.second_center),
            radius: other.radius.or(self.radius),
            inner_radius: other.inner_radius.or(self.inner_radius),
            outer_radius: other.outer_radius.or(self.outer_radius),
            extent: other.extent.or(self.extent),
            orientation: other.orientation.or(self.orientation),
            half_widths: other.half_widths.or(self.half_widths),
        }
    }

    pub fn to_shape(&self, kind: ShapeKind) -> Result<Shape> {
        let planar = |v: &Vec<f64>| -> Result<[f64; 2]> {
            match v.as_slice() {
                [x, y] => Ok([*x, *y]),
                _ => Err(SvddError::InvalidParameter(format!(
                    "{kind}: expected a 2-D point, got {} coordinates",
                    v.len()
                ))),
            }
        };
        let shape = match Shape::default_for(kind) {
            Shape::Disk { center, radius } => Shape::Disk {
                center: self.center.clone().unwrap_or(center),
                radius: self.radius.unwrap_or(radius),
            },
            Shape::Annulus {
                center,
                inner,
                outer,
            } => Shape::Annulus {
                center: self.center.clone().unwrap_or(center),
                inner: self.inner_radius.unwrap_or(inner),
                outer: self.outer_radius.unwrap_or(outer),
            },
            Shape::Boomerang {
                center,
                inner,
                outer,
                extent_deg,
                orientation_deg,
            } => Shape::Boomerang {
                center: self
                    .center
                    .as_ref()
                    .map(planar)
                    .transpose()?
                    .unwrap_or(center),
                inner: self.inner_radius.unwrap_or(inner),
                outer: self.outer_radius.unwrap_or(outer),
                extent_deg: self.extent.unwrap_or(extent_deg),
                orientation_deg: self.orientation.unwrap_or(orientation_deg),
            },
            Shape::TwoDonut {
                centers,
                inner,
                outer,
            } => Shape::TwoDonut {
                centers: [
                    self.center
                        .as_ref()
                        .map(planar)
                        .transpose()?
                        .unwrap_or(centers[0]),
                    self.second_center
                        .as_ref()
                        .map(planar)
                        .transpose()?
                        .unwrap_or(centers[1]),
                ],
                inner: self.inner_radius.unwrap_or(inner),
                outer: self.outer_radius.unwrap_or(outer),
            },
            Shape::Box {
                center,
                half_widths,
            } => {
                let center = self.center.clone().unwrap_or(center);
                let half_widths = self
                    .half_widths
                    .clone()
                    .unwrap_or_else(|| vec![half_widths[0]; center.len()]);
                Shape::Box {
                    center,
                    half_widths,
                }
            }
        };
        shape.validate()?;
        Ok(shape)
    }
}
