//! Command implementations: special-point table, single-point classification,
//! grid scans, phase-transition scan, and the "very flat" rotation search.
//!
//! Every command returns its full output as a `String` (one record or report
//! line per text line) so the CLI and the test suite share one code path and
//! outputs stay deterministic.

use crate::config::{AtlasConfig, GridSpec};
use crate::normalize::{normalize, Normalized};
use crate::records::{RecordLine, ScanFailure, ScanRecord, Verdict};
use rayon::prelude::*;
use std::f64::consts::FRAC_PI_4;
use stokes_core::graph::{classify, Classification};
use stokes_core::levelset::{find_e, special_points};
use stokes_core::periods::{f_pm1, f_pm1_deriv, f_theta, f_theta_deriv, Sign};
use stokes_core::regions::{build_region_map, Location, RegionMap, WallKind};
use stokes_core::Complex64;
use thiserror::Error;

/// Command-level errors, mapped to process exit codes by the CLI.
#[derive(Debug, Error)]
pub enum AtlasError {
    /// Bad arguments or out-of-domain preconditions; exit code 1.
    #[error("usage: {0}")]
    Usage(String),
    /// A solver failed to converge or a configuration could not be built;
    /// exit code 2.
    #[error("solver: {0}")]
    Solver(String),
    /// Filesystem failures; exit code 1.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl AtlasError {
    pub fn exit_code(&self) -> u8 {
        match self {
            AtlasError::Usage(_) => 1,
            AtlasError::Solver(_) => 2,
            AtlasError::Io(_) => 1,
        }
    }

    fn solver(e: impl std::fmt::Display) -> AtlasError {
        AtlasError::Solver(e.to_string())
    }
}

/// Map a reduced-frame locate verdict into the caller frame: swapping the
/// fixed zeros exchanges the two zero-attached wall families.
fn verdict_in_caller_frame(loc: Location, swap: bool) -> Verdict {
    match loc {
        Location::Region(k) => Verdict::Region(k),
        Location::AtT => Verdict::AtT,
        Location::AtE => Verdict::AtE,
        Location::OnCurve(kind) => match (kind, swap) {
            (WallKind::SPlus, false) | (WallKind::SMinus, true) => Verdict::OnSPlus1,
            (WallKind::SMinus, false) | (WallKind::SPlus, true) => Verdict::OnSMinus1,
            (WallKind::STheta, _) => Verdict::OnSTheta,
        },
    }
}

/// Classify one caller-frame point against a prebuilt reduced-frame region
/// map. `map` must belong to `norm.theta`.
fn record_with_map(
    a: Complex64,
    theta: f64,
    norm: &Normalized,
    map: &RegionMap,
    cfg: &AtlasConfig,
) -> RecordLine {
    let fail = |e: String| {
        RecordLine::Failed(ScanFailure {
            theta,
            a,
            error: e,
        })
    };
    let loc = match map.locate(norm.a, cfg.locate_tol) {
        Ok(loc) => loc,
        Err(e) => return fail(e.to_string()),
    };
    let cls: Classification = match classify(norm.a, norm.theta) {
        Ok(c) => c,
        Err(e) => return fail(e.to_string()),
    };
    let caller_sig = cls
        .signature
        .relabeled(norm.relabel.swap, norm.relabel.k_map);
    RecordLine::Ok(ScanRecord {
        theta,
        a,
        signature: caller_sig.canonical,
        shorts: cls.rays.shorts.len(),
        strips: cls.decomposition.strips,
        tree: cls.signature.tree,
        verdict: verdict_in_caller_frame(loc, norm.relabel.swap),
        relabel: norm.relabel,
    })
}

/// Classify a single point, building the region map for its reduced rotation.
pub fn classify_point(a: Complex64, theta: f64, cfg: &AtlasConfig) -> Result<RecordLine, AtlasError> {
    let norm = normalize(a, theta);
    let map = build_region_map(norm.theta).map_err(AtlasError::solver)?;
    Ok(record_with_map(a, theta, &norm, &map, cfg))
}

/// `classify` command: one record line.
pub fn cmd_classify(a: Complex64, theta: f64, cfg: &AtlasConfig) -> Result<String, AtlasError> {
    Ok(format!("{}\n", classify_point(a, theta, cfg)?))
}

/// `table` command: one line per rotation with the three special points.
pub fn cmd_table(thetas: &[f64]) -> Result<String, AtlasError> {
    for &theta in thetas {
        if !(0.0..=FRAC_PI_4 + 1e-12).contains(&theta) {
            return Err(AtlasError::Usage(format!(
                "table rotations must lie in [0, pi/4]; got {theta}"
            )));
        }
    }
    let g = crate::records::fmt_g12;
    let mut out = String::new();
    for &theta in thetas {
        match special_points(theta) {
            Ok(sp) => {
                out.push_str(&format!(
                    "theta={} t_re={} t_im={} s={}",
                    g(theta),
                    g(sp.t.re),
                    g(sp.t.im),
                    g(sp.s)
                ));
                match sp.e {
                    Some(e) => out.push_str(&format!(" e_re={} e_im={}\n", g(e.re), g(e.im))),
                    None => out.push_str(" e=none\n"),
                }
            }
            Err(e) => out.push_str(&format!("theta={} error={}\n", g(theta), e)),
        }
    }
    Ok(out)
}

/// Arc-length position along a polyline; returns the interpolated point at
/// fraction `frac` of the total length.
fn polyline_at_fraction(pts: &[Complex64], frac: f64) -> Complex64 {
    let total: f64 = pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
    let mut remaining = frac.clamp(0.0, 1.0) * total;
    for w in pts.windows(2) {
        let seg = (w[1] - w[0]).norm();
        if seg > 0.0 && remaining <= seg {
            return w[0] + (w[1] - w[0]) * (remaining / seg);
        }
        remaining -= seg;
    }
    *pts.last().expect("non-empty polyline")
}

/// Newton-polish `a` onto the zero set of the wall-defining period's real
/// part. Returns `None` if the polish does not converge to `1e-12`.
pub fn polish_to_wall(a: Complex64, kind: WallKind, theta: f64) -> Option<Complex64> {
    let mut a = a;
    for _ in 0..8 {
        let (val, deriv) = match kind {
            WallKind::SPlus => (
                f_pm1(a, theta, Sign::Plus).ok()?,
                f_pm1_deriv(a, theta, Sign::Plus).ok()?,
            ),
            WallKind::SMinus => (
                f_pm1(a, theta, Sign::Minus).ok()?,
                f_pm1_deriv(a, theta, Sign::Minus).ok()?,
            ),
            WallKind::STheta => (f_theta(a, theta).ok()?, f_theta_deriv(a, theta).ok()?),
        };
        let g = val.re;
        if g.abs() <= 1e-12 {
            return Some(a);
        }
        if deriv.norm() < 1e-12 {
            return None;
        }
        // First-order step killing the real part along the gradient.
        a -= deriv.conj() * (g / deriv.norm_sqr());
    }
    None
}

/// The wall polylines of a region map split at the special points `t` and `e`,
/// so each returned arc carries a single configuration class.
pub fn wall_arcs(map: &RegionMap) -> Vec<(WallKind, Vec<Complex64>)> {
    let mut cuts = vec![map.special.t];
    if let Some(e) = map.special.e {
        cuts.push(e);
    }
    let mut arcs = Vec::new();
    for wall in &map.walls {
        let mut pieces: Vec<Vec<Complex64>> = vec![wall.points().to_vec()];
        for &cut in &cuts {
            let mut next: Vec<Vec<Complex64>> = Vec::new();
            for piece in pieces {
                // Distance from the cut to this piece; split where it lands
                // on the interior of the polyline.
                let mut best: Option<(usize, f64)> = None;
                for i in 0..piece.len().saturating_sub(1) {
                    let d = stokes_core::levelset::point_segment_distance(
                        cut,
                        piece[i],
                        piece[i + 1],
                    );
                    if best.map_or(true, |(_, bd)| d < bd) {
                        best = Some((i, d));
                    }
                }
                // The cut provably lies on the wall when it splits; the traced
                // polyline only approximates the curve to its chord sagitta
                // (~3e-4 near the crossings), so the hit test must be looser
                // than that while staying below genuine inter-wall distances.
                match best {
                    Some((i, d)) if d < 3e-3 => {
                        let end_gap = (cut - piece[0])
                            .norm()
                            .min((cut - *piece.last().unwrap()).norm());
                        if end_gap < 1e-6 {
                            // The cut is an endpoint already; nothing to split.
                            next.push(piece);
                            continue;
                        }
                        let mut head = piece[..=i].to_vec();
                        head.push(cut);
                        let mut tail = vec![cut];
                        tail.extend_from_slice(&piece[i + 1..]);
                        if head.len() > 1 {
                            next.push(head);
                        }
                        if tail.len() > 1 {
                            next.push(tail);
                        }
                    }
                    _ => next.push(piece),
                }
            }
            pieces = next;
        }
        for piece in pieces {
            arcs.push((wall.kind, piece));
        }
    }
    arcs
}

/// Feature points guaranteeing that the scan stream realizes every on-wall
/// configuration class: the midpoint of each wall arc (polished back onto the
/// wall) plus the special points `t` and `e` when they are not degenerate.
fn feature_points(map: &RegionMap) -> Vec<Complex64> {
    let mut pts = Vec::new();
    for (kind, arc) in wall_arcs(map) {
        let mid = polyline_at_fraction(&arc, 0.5);
        if let Some(polished) = polish_to_wall(mid, kind, map.theta) {
            pts.push(polished);
        }
    }
    let away_from_zeros = |p: Complex64| {
        (p - Complex64::new(1.0, 0.0)).norm() > 1e-6 && (p + Complex64::new(1.0, 0.0)).norm() > 1e-6
    };
    if away_from_zeros(map.special.t) {
        pts.push(map.special.t);
    }
    if let Some(e) = map.special.e {
        if away_from_zeros(e) {
            pts.push(e);
        }
    }
    pts
}

/// `atlas` command: row-major grid records followed by the feature records.
pub fn cmd_atlas(theta: f64, grid: &GridSpec, cfg: &AtlasConfig) -> Result<String, AtlasError> {
    if grid.nx == 0 || grid.ny == 0 {
        return Err(AtlasError::Usage("grid must be at least 1x1".to_string()));
    }
    if !(grid.window.width() > 0.0) || !(grid.window.height() > 0.0) {
        return Err(AtlasError::Usage(
            "window must satisfy x0 < x1 and y0 < y1".to_string(),
        ));
    }
    // One reduced frame serves the whole scan.
    let probe = normalize(Complex64::new(0.0, 0.0), theta);
    let map = build_region_map(probe.theta).map_err(AtlasError::solver)?;

    let w = grid.window;
    let mut points: Vec<Complex64> = Vec::with_capacity(grid.nx * grid.ny);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let x = w.x0 + w.width() * (i as f64 + 0.5) / grid.nx as f64;
            let y = w.y0 + w.height() * (j as f64 + 0.5) / grid.ny as f64;
            points.push(Complex64::new(x, y));
        }
    }
    // Feature points live in the reduced frame; report them in caller frame.
    points.extend(
        feature_points(&map)
            .into_iter()
            .map(|p| probe.frame.to_caller(p)),
    );

    let puncture = cfg.puncture_radius;
    let lines: Vec<Option<String>> = points
        .par_iter()
        .map(|&a| {
            let norm = normalize(a, theta);
            if (norm.a - Complex64::new(1.0, 0.0)).norm() < puncture
                || (norm.a + Complex64::new(1.0, 0.0)).norm() < puncture
            {
                return None;
            }
            Some(record_with_map(a, theta, &norm, &map, cfg).to_string())
        })
        .collect();

    let mut out = String::new();
    for line in lines.into_iter().flatten() {
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}

/// `phase-scan` command: one line per sampled rotation plus the bracket of the
/// existence boundary of the double-tree point `e`.
pub fn cmd_phase_scan(from: f64, to: f64, step: f64) -> Result<String, AtlasError> {
    if !(step > 0.0) {
        return Err(AtlasError::Usage("step must be positive".to_string()));
    }
    if !(from < to) {
        return Err(AtlasError::Usage("need from < to".to_string()));
    }
    if !(0.0..=FRAC_PI_4 + 1e-12).contains(&from) || !(0.0..=FRAC_PI_4 + 1e-12).contains(&to) {
        return Err(AtlasError::Usage(
            "scan range must lie in [0, pi/4]".to_string(),
        ));
    }
    let g = crate::records::fmt_g12;
    let n_steps = ((to - from) / step).round() as usize;
    let mut out = String::new();
    let mut last_with_e: Option<f64> = None;
    let mut first_without_e: Option<f64> = None;
    for i in 0..=n_steps {
        let theta = (from + step * i as f64).min(to);
        let e = find_e(theta).map_err(AtlasError::solver)?;
        match e {
            Some(e) => {
                last_with_e = Some(theta);
                out.push_str(&format!(
                    "theta={} e=yes abs_e={} trees=2\n",
                    g(theta),
                    g(e.norm())
                ));
            }
            None => {
                if first_without_e.is_none() && last_with_e.is_some() {
                    first_without_e = Some(theta);
                }
                out.push_str(&format!("theta={} e=no trees=1\n", g(theta)));
            }
        }
    }
    match (last_with_e, first_without_e) {
        (Some(lo), Some(hi)) => {
            out.push_str(&format!("transition_bracket={},{}\n", g(lo), g(hi)));
        }
        (Some(_), None) => out.push_str("transition_bracket=none (e exists on the whole range)\n"),
        (None, _) => out.push_str("transition_bracket=none (e absent on the whole range)\n"),
    }
    Ok(out)
}

/// `find-flat` command: first rotation in a deterministic `[0, pi/4]` sweep
/// whose configuration has two strip domains (the maximum), refining the sweep
/// when every coarse sample lands on a wall.
pub fn cmd_find_flat(a: Complex64, cfg: &AtlasConfig) -> Result<String, AtlasError> {
    if (a - Complex64::new(1.0, 0.0)).norm() < cfg.puncture_radius
        || (a + Complex64::new(1.0, 0.0)).norm() < cfg.puncture_radius
    {
        return Err(AtlasError::Usage(
            "the movable zero must stay away from +-1".to_string(),
        ));
    }
    for n in [17usize, 33, 65] {
        for i in 0..n {
            let theta = FRAC_PI_4 * i as f64 / (n - 1) as f64;
            let Ok(cls) = classify(a, theta) else {
                continue;
            };
            if cls.decomposition.strips == 2 && cls.rays.shorts.is_empty() {
                let rec = classify_point(a, theta, cfg)?;
                return Ok(format!("{rec}\n"));
            }
        }
    }
    Err(AtlasError::Solver(format!(
        "no rotation in [0, pi/4] with two strip domains found for a = {a} at refinement 65"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polyline_fraction_interpolates_by_arc_length() {
        let pts = [
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 3.0),
        ];
        let mid = polyline_at_fraction(&pts, 0.5);
        assert!((mid - Complex64::new(1.0, 1.0)).norm() < 1e-12);
        assert_eq!(polyline_at_fraction(&pts, 0.0), pts[0]);
        assert_eq!(polyline_at_fraction(&pts, 1.0), pts[2]);
    }
}
