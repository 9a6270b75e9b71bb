//! Inlier/outlier maps over a two-dimensional specification box.
//!
//! The box is cut into a `resolution × resolution` grid and each cell is
//! classified by scoring its center. The map renders as SVG with inlier
//! cells black, outlier cells gray and the specification box outlined in red.

use std::collections::VecDeque;
use std::fmt::Write as _;

use ndarray::{Array1, ArrayView2};
use rayon::prelude::*;

use crate::error::{Result, SvddError};
use crate::trainer::SvddModel;
use crate::window::{check_dim, SpecLimits, Standardizer};

const CANVAS: f64 = 600.0;
const MARGIN: f64 = 24.0;

#[derive(Debug, Clone, PartialEq)]
pub struct InlierGrid {
    resolution: usize,
    spec: SpecLimits,
    /// Row-major, row 0 at `lsl_y`.
    inlier: Vec<bool>,
}

impl InlierGrid {
    /// Scores the cell centers. `transform` maps raw coordinates into the
    /// space the model was trained in.
    pub fn score(
        model: &SvddModel,
        spec: &SpecLimits,
        resolution: usize,
        transform: Option<&Standardizer>,
    ) -> Result<Self> {
        if spec.q() != 2 || model.q() != 2 {
            return Err(SvddError::InvalidParameter(format!(
                "plots need two variables (model has q = {}, spec has q = {})",
                model.q(),
                spec.q()
            )));
        }
        if resolution == 0 {
            return Err(SvddError::InvalidParameter(
                "grid resolution must be at least 1".into(),
            ));
        }
        let (lsl, usl) = (spec.lsl(), spec.usl());
        let dx = (usl[0] - lsl[0]) / resolution as f64;
        let dy = (usl[1] - lsl[1]) / resolution as f64;
        let inlier = (0..resolution * resolution)
            .into_par_iter()
            .map(|idx| {
                let (iy, ix) = (idx / resolution, idx % resolution);
                let raw = Array1::from(vec![
                    lsl[0] + (ix as f64 + 0.5) * dx,
                    lsl[1] + (iy as f64 + 0.5) * dy,
                ]);
                let z = match transform {
                    Some(t) => t.apply_point(raw.view()),
                    None => raw,
                };
                !model.classify(z.view()).is_outlier
            })
            .collect();
        Ok(Self {
            resolution,
            spec: spec.clone(),
            inlier,
        })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn is_inlier(&self, ix: usize, iy: usize) -> bool {
        self.inlier[iy * self.resolution + ix]
    }

    pub fn inlier_cells(&self) -> usize {
        self.inlier.iter().filter(|&&b| b).count()
    }

    pub fn inlier_fraction(&self) -> f64 {
        self.inlier_cells() as f64 / self.inlier.len() as f64
    }

    /// Number of 4-connected components of inlier cells.
    pub fn component_count(&self) -> usize {
        let r = self.resolution;
        let mut seen = vec![false; self.inlier.len()];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.inlier.len() {
            if !self.inlier[start] || seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(idx) = queue.pop_front() {
                let (iy, ix) = (idx / r, idx % r);
                let mut visit = |n: usize| {
                    if self.inlier[n] && !seen[n] {
                        seen[n] = true;
                        queue.push_back(n);
                    }
                };
                if ix > 0 {
                    visit(idx - 1);
                }
                if ix + 1 < r {
                    visit(idx + 1);
                }
                if iy > 0 {
                    visit(idx - r);
                }
                if iy + 1 < r {
                    visit(idx + r);
                }
            }
        }
        count
    }

    /// Renders the map; `points` (raw coordinates) are drawn as open circles.
    pub fn to_svg(&self, points: Option<ArrayView2<'_, f64>>) -> Result<String> {
        let (lsl, usl) = (self.spec.lsl(), self.spec.usl());
        let (wx, wy) = (usl[0] - lsl[0], usl[1] - lsl[1]);
        let scale = (CANVAS - 2.0 * MARGIN) / wx.max(wy);
        let (pw, ph) = (wx * scale, wy * scale);
        let (width, height) = (pw + 2.0 * MARGIN, ph + 2.0 * MARGIN);
        let px = |x: f64| MARGIN + (x - lsl[0]) * scale;
        let py = |y: f64| MARGIN + (usl[1] - y) * scale;
        let r = self.resolution;
        let (cw, ch) = (pw / r as f64, ph / r as f64);

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2}" height="{height:.2}" viewBox="0 0 {width:.2} {height:.2}">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(svg, r#"<g shape-rendering="crispEdges">"#);
        for iy in 0..r {
            let top = MARGIN + (r - 1 - iy) as f64 * ch;
            let mut ix = 0;
            while ix < r {
                let class = self.is_inlier(ix, iy);
                let start = ix;
                while ix < r && self.is_inlier(ix, iy) == class {
                    ix += 1;
                }
                let fill = if class { "black" } else { "#b0b0b0" };
                let _ = writeln!(
                    svg,
                    r#"<rect x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="{fill}"/>"#,
                    MARGIN + start as f64 * cw,
                    top,
                    (ix - start) as f64 * cw,
                    ch
                );
            }
        }
        let _ = writeln!(svg, "</g>");
        let _ = writeln!(
            svg,
            r#"<rect x="{MARGIN:.3}" y="{MARGIN:.3}" width="{pw:.3}" height="{ph:.3}" fill="none" stroke="red" stroke-width="2"/>"#
        );
        if let Some(points) = points {
            check_dim(2, points.ncols())?;
            let _ = writeln!(
                svg,
                r##"<g fill="none" stroke="#8b4513" stroke-width="0.8">"##
            );
            for p in points.rows() {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{:.3}" cy="{:.3}" r="2"/>"#,
                    px(p[0]),
                    py(p[1])
                );
            }
            let _ = writeln!(svg, "</g>");
        }
        let _ = writeln!(svg, "</svg>");
        Ok(svg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::HyperParams;
    use crate::trainer::train;
    use crate::window::ProcessWindow;

    fn blob(cx: f64, cy: f64) -> Vec<Vec<f64>> {
        vec![
            vec![cx, cy],
            vec![cx + 0.3, cy],
            vec![cx, cy + 0.3],
            vec![cx - 0.3, cy],
            vec![cx, cy - 0.3],
        ]
    }

    #[test]
    fn single_cell_grid_is_valid_svg() {
        let w = ProcessWindow::from_rows(&blob(0.0, 0.0)).unwrap();
        let model = train(&w, HyperParams::with_bandwidth(0.5).unwrap()).unwrap();
        let spec = SpecLimits::from_bounds(&[(-1.0, 1.0), (-1.0, 1.0)]).unwrap();
        let grid = InlierGrid::score(&model, &spec, 1, None).unwrap();
        let svg = grid.to_svg(None).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<rect").count(), 3);
    }

    #[test]
    fn separated_blobs_form_two_components() {
        let mut rows = blob(-3.0, -3.0);
        rows.extend(blob(3.0, 3.0));
        let w = ProcessWindow::from_rows(&rows).unwrap();
        let model = train(&w, HyperParams::with_bandwidth(0.4).unwrap()).unwrap();
        let spec = SpecLimits::from_bounds(&[(-5.0, 5.0), (-5.0, 5.0)]).unwrap();
        let grid = InlierGrid::score(&model, &spec, 80, None).unwrap();
        assert_eq!(grid.component_count(), 2);
    }

    #[test]
    fn rejects_non_planar_models() {
        let w = ProcessWindow::from_rows(&[vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]]).unwrap();
        let model = train(&w, HyperParams::with_bandwidth(1.0).unwrap()).unwrap();
        let spec = SpecLimits::from_bounds(&[(0.0, 1.0); 3]).unwrap();
        assert!(InlierGrid::score(&model, &spec, 10, None).is_err());
    }

    #[test]
    fn rendering_is_deterministic() {
        let w = ProcessWindow::from_rows(&blob(0.0, 0.0)).unwrap();
        let model = train(&w, HyperParams::with_bandwidth(0.5).unwrap()).unwrap();
        let spec = SpecLimits::from_bounds(&[(-1.0, 1.0), (-2.0, 2.0)]).unwrap();
        let a = InlierGrid::score(&model, &spec, 40, None).unwrap();
        let b = InlierGrid::score(&model, &spec, 40, None).unwrap();
        assert_eq!(
            a.to_svg(Some(w.observations())).unwrap(),
            b.to_svg(Some(w.observations())).unwrap()
        );
    }
}
