//! Embedded configuration: world geometry, tolerances, default grid, palette.
//!
//! All defaults are compiled in and printed by `atlas config show`; there is no
//! configuration file to drift out of sync with the binary.

/// Axis-aligned window in the parameter plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Window {
    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }
}

/// Rectangular scan grid over a window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub window: Window,
}

/// SVG stroke/fill colors, one entry per drawable layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Palette {
    /// Level set of the period at the zero `+1`.
    pub sigma_plus: &'static str,
    /// Level set of the period at the zero `-1`.
    pub sigma_minus: &'static str,
    /// Level set of the segment period.
    pub sigma_theta: &'static str,
    /// Critical rays of a Stokes graph.
    pub ray: &'static str,
    /// Short trajectories.
    pub short: &'static str,
    /// Fixed zeros of the cubic.
    pub fixed_zero: &'static str,
    /// The movable zero `a`.
    pub movable_zero: &'static str,
    /// Special-point markers (t, e, s).
    pub marker: &'static str,
}

/// Full embedded configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtlasConfig {
    /// Radius of the disk in which walls are traced and points located.
    pub world_radius: f64,
    /// Half-width of the on-curve band used by locate verdicts.
    pub locate_tol: f64,
    /// Bound on `|Re e^{i theta} Int sqrt(p)|` certifying a short trajectory.
    pub period_residual: f64,
    /// Exclusion radius around the fixed zeros `+-1` in grid scans.
    pub puncture_radius: f64,
    /// Default scan grid.
    pub grid: GridSpec,
    /// Default colors.
    pub palette: Palette,
}

impl Default for AtlasConfig {
    fn default() -> Self {
        AtlasConfig {
            world_radius: stokes_core::regions::WORLD_RADIUS,
            locate_tol: stokes_core::regions::LOCATE_TOL,
            period_residual: stokes_core::trajectory::PERIOD_RESID,
            puncture_radius: 1e-3,
            grid: GridSpec {
                nx: 50,
                ny: 50,
                window: Window {
                    x0: -3.0,
                    x1: 3.0,
                    y0: -3.0,
                    y1: 3.0,
                },
            },
            palette: Palette {
                sigma_plus: "#1f5fd0",
                sigma_minus: "#d03022",
                sigma_theta: "#1f9d3a",
                ray: "#444444",
                short: "#e08900",
                fixed_zero: "#000000",
                movable_zero: "#7a1fa2",
                marker: "#666666",
            },
        }
    }
}

impl AtlasConfig {
    /// Deterministic key/value listing of every default, printed by
    /// `atlas config show`.
    pub fn show(&self) -> String {
        let g = crate::records::fmt_g12;
        let mut out = String::new();
        out.push_str("# embedded defaults\n");
        out.push_str(&format!("world_radius = {}\n", g(self.world_radius)));
        out.push_str(&format!("locate_tol = {}\n", g(self.locate_tol)));
        out.push_str(&format!("period_residual = {}\n", g(self.period_residual)));
        out.push_str(&format!("puncture_radius = {}\n", g(self.puncture_radius)));
        out.push_str("\n[grid]\n");
        out.push_str(&format!("nx = {}\n", self.grid.nx));
        out.push_str(&format!("ny = {}\n", self.grid.ny));
        out.push_str(&format!(
            "window = {},{},{},{}\n",
            g(self.grid.window.x0),
            g(self.grid.window.x1),
            g(self.grid.window.y0),
            g(self.grid.window.y1),
        ));
        out.push_str("\n[palette]\n");
        out.push_str(&format!("sigma_plus = \"{}\"\n", self.palette.sigma_plus));
        out.push_str(&format!("sigma_minus = \"{}\"\n", self.palette.sigma_minus));
        out.push_str(&format!("sigma_theta = \"{}\"\n", self.palette.sigma_theta));
        out.push_str(&format!("ray = \"{}\"\n", self.palette.ray));
        out.push_str(&format!("short = \"{}\"\n", self.palette.short));
        out.push_str(&format!("fixed_zero = \"{}\"\n", self.palette.fixed_zero));
        out.push_str(&format!(
            "movable_zero = \"{}\"\n",
            self.palette.movable_zero
        ));
        out.push_str(&format!("marker = \"{}\"\n", self.palette.marker));
        out
    }
}
