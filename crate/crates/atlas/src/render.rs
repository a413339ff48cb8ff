//! Deterministic SVG rendering of level sets, trimmed walls, and Stokes
//! graphs.
//!
//! Output bytes depend only on the inputs: curves are emitted in a fixed
//! order, coordinates are formatted with a fixed precision, and no timestamps
//! or environment data are written.

use crate::config::{AtlasConfig, Palette, Window};
use crate::scan::AtlasError;
use std::fmt::Write as _;
use stokes_core::levelset::{special_points, trace_level_curve, BranchId, TraceConfig};
use stokes_core::periods::Sign;
use stokes_core::regions::build_region_map;
use stokes_core::trajectory::all_critical_rays;
use stokes_core::Complex64;

/// What to draw and how.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderSpec {
    /// World-coordinate window.
    pub window: Window,
    /// Pixel resolution.
    pub width: u32,
    pub height: u32,
    /// Layer toggles.
    pub layers: Layers,
    pub palette: Palette,
    pub stroke_width: f64,
}

/// Which layers are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layers {
    /// Level sets attached to the zeros (blue/red families).
    pub sigma: bool,
    /// The segment-period level set (green).
    pub sigma_theta: bool,
    /// Special-point markers t, e, s.
    pub markers: bool,
    /// Zeros of the cubic (for graph renders).
    pub zeros: bool,
}

impl RenderSpec {
    pub fn with_defaults(cfg: &AtlasConfig) -> RenderSpec {
        RenderSpec {
            window: cfg.grid.window,
            width: 800,
            height: 800,
            layers: Layers {
                sigma: true,
                sigma_theta: true,
                markers: true,
                zeros: true,
            },
            palette: cfg.palette,
            stroke_width: 1.2,
        }
    }
}

/// Fixed-precision pixel coordinate: two decimals are below visual resolution
/// and keep files byte-stable.
fn px(v: f64) -> String {
    format!("{v:.2}")
}

struct Canvas {
    spec: RenderSpec,
    body: String,
}

impl Canvas {
    fn new(spec: RenderSpec) -> Canvas {
        let mut body = String::new();
        let _ = writeln!(
            body,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
            spec.width, spec.height, spec.width, spec.height
        );
        let _ = writeln!(
            body,
            "<rect width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>",
            spec.width, spec.height
        );
        Canvas { spec, body }
    }

    fn to_pixel(&self, z: Complex64) -> (f64, f64) {
        let w = self.spec.window;
        let x = (z.re - w.x0) / w.width() * self.spec.width as f64;
        let y = (w.y1 - z.im) / w.height() * self.spec.height as f64;
        (x, y)
    }

    /// Draw a polyline, clipped to the window by segment (points far outside
    /// are dropped; SVG handles partial overhang via the viewBox).
    fn polyline(&mut self, pts: &[Complex64], color: &str, width_scale: f64) {
        if pts.len() < 2 {
            return;
        }
        // Decimate long polylines: keep enough points that the chord error
        // stays below a pixel at the default resolution.
        let step = (pts.len() / 1500).max(1);
        let w = self.spec.window;
        let margin_x = w.width() * 0.5;
        let margin_y = w.height() * 0.5;
        let visible = |z: Complex64| {
            z.re > w.x0 - margin_x
                && z.re < w.x1 + margin_x
                && z.im > w.y0 - margin_y
                && z.im < w.y1 + margin_y
        };
        let mut runs: Vec<Vec<(f64, f64)>> = Vec::new();
        let mut current: Vec<(f64, f64)> = Vec::new();
        let mut idx = 0;
        while idx < pts.len() {
            let z = pts[idx];
            if visible(z) {
                current.push(self.to_pixel(z));
            } else if !current.is_empty() {
                runs.push(std::mem::take(&mut current));
            }
            if idx + step < pts.len() || idx == pts.len() - 1 {
                idx += step;
            } else {
                idx = pts.len() - 1;
            }
        }
        if !current.is_empty() {
            runs.push(current);
        }
        for run in runs {
            if run.len() < 2 {
                continue;
            }
            let coords: Vec<String> = run.iter().map(|(x, y)| format!("{},{}", px(*x), px(*y))).collect();
            let _ = writeln!(
                self.body,
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" points=\"{}\"/>",
                color,
                px(self.spec.stroke_width * width_scale),
                coords.join(" ")
            );
        }
    }

    fn dot(&mut self, z: Complex64, color: &str, r: f64) {
        let (x, y) = self.to_pixel(z);
        let _ = writeln!(
            self.body,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\"/>",
            px(x),
            px(y),
            px(r),
            color
        );
    }

    fn label(&mut self, z: Complex64, text: &str, color: &str) {
        let (x, y) = self.to_pixel(z);
        let _ = writeln!(
            self.body,
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" fill=\"{}\">{}</text>",
            px(x + 6.0),
            px(y - 6.0),
            color,
            text
        );
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn draw_special_markers(
    canvas: &mut Canvas,
    theta: f64,
) -> Result<(), AtlasError> {
    let sp = special_points(theta).map_err(|e| AtlasError::Solver(e.to_string()))?;
    let color = canvas.spec.palette.marker;
    canvas.dot(sp.t, color, 4.0);
    canvas.label(sp.t, "t", color);
    canvas.dot(Complex64::new(sp.s, 0.0), color, 4.0);
    canvas.label(Complex64::new(sp.s, 0.0), "s", color);
    if let Some(e) = sp.e {
        canvas.dot(e, color, 4.0);
        canvas.label(e, "e", color);
    }
    Ok(())
}

/// Full level sets: the four rays of each zero-attached family plus the
/// segment-period arc, untrimmed.
pub fn render_sigma(theta: f64, spec: RenderSpec) -> Result<String, AtlasError> {
    let mut canvas = Canvas::new(spec);
    let cfg = TraceConfig::default();
    if spec.layers.sigma {
        for (sign, color) in [
            (Sign::Plus, spec.palette.sigma_plus),
            (Sign::Minus, spec.palette.sigma_minus),
        ] {
            for ray in 0..4 {
                let curve = trace_level_curve(theta, BranchId::ZeroRay { which: sign, ray }, &cfg)
                    .map_err(|e| AtlasError::Solver(e.to_string()))?;
                canvas.polyline(&curve.points, color, 1.0);
            }
        }
    }
    if spec.layers.sigma_theta {
        let curve = trace_level_curve(theta, BranchId::SigmaTheta, &cfg)
            .map_err(|e| AtlasError::Solver(e.to_string()))?;
        canvas.polyline(&curve.points, spec.palette.sigma_theta, 1.0);
    }
    if spec.layers.markers {
        draw_special_markers(&mut canvas, theta)?;
    }
    Ok(canvas.finish())
}

/// Trimmed walls: exactly the arcs that carry short trajectories.
pub fn render_xi(theta: f64, spec: RenderSpec) -> Result<String, AtlasError> {
    let map = build_region_map(theta).map_err(|e| AtlasError::Solver(e.to_string()))?;
    let mut canvas = Canvas::new(spec);
    for wall in &map.walls {
        let color = match wall.kind {
            stokes_core::regions::WallKind::SPlus => spec.palette.sigma_plus,
            stokes_core::regions::WallKind::SMinus => spec.palette.sigma_minus,
            stokes_core::regions::WallKind::STheta => spec.palette.sigma_theta,
        };
        canvas.polyline(wall.points(), color, 1.0);
    }
    if spec.layers.markers {
        draw_special_markers(&mut canvas, theta)?;
    }
    Ok(canvas.finish())
}

/// The Stokes graph of one configuration: critical rays, short trajectories,
/// and the three zeros.
pub fn render_graph(a: Complex64, theta: f64, spec: RenderSpec) -> Result<String, AtlasError> {
    let rays = all_critical_rays(a, theta).map_err(|e| AtlasError::Solver(e.to_string()))?;
    let mut canvas = Canvas::new(spec);
    for ray in &rays.rays {
        canvas.polyline(&ray.points, spec.palette.ray, 1.0);
    }
    for short in &rays.shorts {
        canvas.polyline(&short.polyline, spec.palette.short, 2.0);
    }
    if spec.layers.zeros {
        canvas.dot(Complex64::new(-1.0, 0.0), spec.palette.fixed_zero, 4.0);
        canvas.label(Complex64::new(-1.0, 0.0), "-1", spec.palette.fixed_zero);
        canvas.dot(Complex64::new(1.0, 0.0), spec.palette.fixed_zero, 4.0);
        canvas.label(Complex64::new(1.0, 0.0), "+1", spec.palette.fixed_zero);
        canvas.dot(a, spec.palette.movable_zero, 4.0);
        canvas.label(a, "a", spec.palette.movable_zero);
    }
    Ok(canvas.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::AtlasConfig;

    #[test]
    fn graph_render_is_deterministic_and_layered() {
        let cfg = AtlasConfig::default();
        let spec = RenderSpec::with_defaults(&cfg);
        let a = Complex64::new(2.0, 1.0);
        let one = render_graph(a, 0.0, spec).unwrap();
        let two = render_graph(a, 0.0, spec).unwrap();
        assert_eq!(one, two);
        assert!(one.starts_with("<svg "));
        assert!(one.trim_end().ends_with("</svg>"));
        assert!(one.contains("polyline"));
        assert!(one.contains(cfg.palette.ray));
    }
}
