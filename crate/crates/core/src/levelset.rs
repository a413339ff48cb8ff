//! Level curves `Re f = 0` of the period functions, traced as polylines, and the
//! distinguished points where they intersect.
//!
//! Three curve families exist for each rotation `theta`:
//!
//! - `Sigma_{+1,theta} = {a : Re f_{+1,theta}(a) = 0}`: four rays leaving `a = 1`,
//! - `Sigma_{-1,theta} = {a : Re f_{-1,theta}(a) = 0}`: four rays leaving `a = -1`,
//! - `Sigma_theta = {a : Re f_theta(a) = 0}` off the segment, starting at the real
//!   boundary point `s_theta` and escaping to infinity.
//!
//! The tracer is a predictor-corrector walk: Euler predictor along the unit
//! tangent `+- i conj(f') / |f'|`, then a Newton corrector `a -= Re f * conj(f')
//! / |f'|^2` back onto the curve. Step size is limited by a turning-angle bound,
//! by proximity to the finite zeros, and by a base cap, so the polyline stays
//! within a fraction of the locate tolerance of the true curve.
//!
//! Crossings with a second period's level set are watched during the walk and
//! refined by a two-dimensional Newton iteration; this is how the junction point
//! `t_theta` and (for `theta < pi/8`) the exceptional point `e_theta` are found.

use crate::periods::{f_pm1, f_pm1_deriv, f_theta, f_theta_deriv, segment_m, segment_r, PeriodError, Sign};
use crate::{angle_dist, wrap_angle, Complex64};
use std::f64::consts::{FRAC_PI_4, PI};
use thiserror::Error;

/// Which level curve to trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchId {
    /// One of the four rays of `Sigma_{+-1, theta}`; `ray` is `0..4`, ordered by
    /// launch angle `(j pi - theta)/2` (plus) or `((2j+1) pi - 2 theta)/4` (minus).
    ZeroRay { which: Sign, ray: usize },
    /// The curve `Sigma_theta`, launched at `s_theta`.
    SigmaTheta,
}

/// How a traced curve ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurveEnd {
    /// Reached the world radius; `angle` is the final position angle and `k` the
    /// matched divergence direction `(-2 theta + 2 k pi)/5` (zero rays only).
    Infinity { angle: f64, k: Option<usize> },
    /// Converged onto the other finite zero (`theta = 0` degenerations).
    Zero { which: Sign },
}

/// A crossing of the traced curve with a watched second level set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveEvent {
    /// Index into `points` of the last vertex before the crossing.
    pub index: usize,
    /// Newton-refined intersection point.
    pub at: Complex64,
    /// Residual `max(|Re f|, |Re g|)` at the refined point.
    pub residual: f64,
}

/// A traced level curve.
#[derive(Debug, Clone)]
pub struct LevelCurve {
    pub branch: BranchId,
    pub theta: f64,
    /// Vertices along the curve; the first is the launch point (the zero itself
    /// for rays, `s_theta` for `Sigma_theta`).
    pub points: Vec<Complex64>,
    pub end: CurveEnd,
    /// Watched-crossing events in encounter order (see module docs).
    pub events: Vec<CurveEvent>,
}

impl LevelCurve {
    /// Arc length of the polyline.
    pub fn arc_length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// Distance from `a` to the polyline (segment-wise).
    pub fn distance_to(&self, a: Complex64) -> f64 {
        let mut best = f64::INFINITY;
        for w in self.points.windows(2) {
            best = best.min(point_segment_distance(a, w[0], w[1]));
        }
        if self.points.len() == 1 {
            best = (a - self.points[0]).norm();
        }
        best
    }
}

/// Distance from point `p` to segment `[u, v]`.
pub fn point_segment_distance(p: Complex64, u: Complex64, v: Complex64) -> f64 {
    let d = v - u;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - u).norm();
    }
    let t = ((p - u).re * d.re + (p - u).im * d.im) / len2;
    let t = t.clamp(0.0, 1.0);
    (p - (u + d * t)).norm()
}

/// Errors from tracing and from the special-point solvers.
#[derive(Debug, Error, PartialEq)]
pub enum LevelSetError {
    /// The solvers are defined for `theta` in `[0, pi/4]`.
    #[error("theta = {theta} outside the solver domain [0, pi/4]")]
    ThetaOutOfRange { theta: f64 },

    /// The corrector stalled where the defining period's derivative vanishes.
    #[error("level-curve tracing hit a critical point near {at}")]
    CriticalPointHit { at: Complex64 },

    /// The arc-length budget was exhausted without reaching a terminal.
    #[error("level-curve tracing stalled after arc {arc} near {at}")]
    StallDetected { arc: f64, at: Complex64 },

    /// A Newton or bisection solve failed to converge.
    #[error("solver failed to converge: {context}")]
    NoConvergence { context: &'static str },

    #[error(transparent)]
    Period(#[from] PeriodError),
}

/// Tracing parameters. `Default` matches the locate/region pipeline.
#[derive(Debug, Clone)]
pub struct TraceConfig {
    /// Escape radius: tracing stops once `|a|` exceeds this.
    pub r_world: f64,
    /// Initial step size.
    pub h0: f64,
    /// Base step cap.
    pub h_max: f64,
    /// Allow the cap to grow like `0.02 |a|` far out (used for the long hunt for
    /// `e_theta`, which can live at radius in the thousands near `theta = pi/8`).
    pub grow_far: bool,
    /// Stall budget: maximum accumulated arc length.
    pub max_arc: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            r_world: 50.0,
            h0: 1e-3,
            h_max: 0.05,
            grow_far: false,
            max_arc: 500.0,
        }
    }
}

/// Launch angles of the four rays of `Sigma_{which,theta}` at its zero, wrapped
/// to `[0, 2 pi)`, in ray order `j = 0..4`.
pub fn launch_angles_at_zero(theta: f64, which: Sign) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = wrap_angle(ray_launch_angle(theta, which, j));
    }
    out
}

fn ray_launch_angle(theta: f64, which: Sign, ray: usize) -> f64 {
    match which {
        Sign::Plus => (ray as f64 * PI - theta) / 2.0,
        Sign::Minus => ((2.0 * ray as f64 + 1.0) * PI - 2.0 * theta) / 4.0,
    }
}

/// The five divergence directions `(-2 theta + 2 k pi)/5` for `k = 0..5`.
pub fn divergence_directions(theta: f64) -> [f64; 5] {
    let mut out = [0.0; 5];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = wrap_angle((-2.0 * theta + 2.0 * PI * k as f64) / 5.0);
    }
    out
}

/// The five critical directions at infinity `(-2 theta + (2 k + 1) pi)/5`.
pub fn critical_directions(theta: f64) -> [f64; 5] {
    let mut out = [0.0; 5];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = wrap_angle((-2.0 * theta + (2.0 * k as f64 + 1.0) * PI) / 5.0);
    }
    out
}

/// Noise floor for the on-curve residual: the periods grow like `|a|^{5/2}`, so
/// a relative rounding level of ~1e-15 forces the absolute tolerance up with
/// radius. At the world radius 50 this still keeps vertices within 1e-8.
fn corrector_tol(a: Complex64) -> f64 {
    let s = 1.0 + a.norm();
    (s.powf(2.5) * 1e-13).max(1e-10)
}

struct CurveField<'a> {
    f: Box<dyn Fn(Complex64) -> Result<Complex64, PeriodError> + 'a>,
    fp: Box<dyn Fn(Complex64) -> Result<Complex64, PeriodError> + 'a>,
}

fn field_for(branch: BranchId, theta: f64) -> CurveField<'static> {
    match branch {
        BranchId::ZeroRay { which, .. } => CurveField {
            f: Box::new(move |a| f_pm1(a, theta, which)),
            fp: Box::new(move |a| f_pm1_deriv(a, theta, which)),
        },
        BranchId::SigmaTheta => CurveField {
            f: Box::new(move |a| f_theta(a, theta)),
            fp: Box::new(move |a| f_theta_deriv(a, theta)),
        },
    }
}

/// Monitor family watched for sign changes of `Re g` along a traced curve.
fn monitor_for(branch: BranchId, theta: f64) -> Option<CurveField<'static>> {
    match branch {
        // Crossings of a plus-ray with Sigma_{-1}: yields t and e on the l-ray.
        BranchId::ZeroRay { which: Sign::Plus, .. } => Some(CurveField {
            f: Box::new(move |a| f_pm1(a, theta, Sign::Minus)),
            fp: Box::new(move |a| f_pm1_deriv(a, theta, Sign::Minus)),
        }),
        // Crossings of a minus-ray with Sigma_{+1}.
        BranchId::ZeroRay { which: Sign::Minus, .. } => Some(CurveField {
            f: Box::new(move |a| f_pm1(a, theta, Sign::Plus)),
            fp: Box::new(move |a| f_pm1_deriv(a, theta, Sign::Plus)),
        }),
        // Crossings of Sigma_theta with Sigma_{+1}: t first, then e if present.
        BranchId::SigmaTheta => Some(CurveField {
            f: Box::new(move |a| f_pm1(a, theta, Sign::Plus)),
            fp: Box::new(move |a| f_pm1_deriv(a, theta, Sign::Plus)),
        }),
    }
}

fn corrector(
    field: &CurveField,
    mut a: Complex64,
    floor_hint: f64,
) -> Result<(Complex64, Complex64), CorrectorFail> {
    for _ in 0..12 {
        let fv = (field.f)(a).map_err(CorrectorFail::Period)?;
        let d = (field.fp)(a).map_err(CorrectorFail::Period)?;
        let dn2 = d.norm_sqr();
        if dn2 < 1e-24 {
            return Err(CorrectorFail::Critical(a));
        }
        let u = fv.re;
        if u.abs() <= corrector_tol(a).max(floor_hint) {
            return Ok((a, d));
        }
        a -= u * d.conj() / dn2;
    }
    Err(CorrectorFail::NoConverge(a))
}

enum CorrectorFail {
    Period(PeriodError),
    Critical(Complex64),
    NoConverge(Complex64),
}

fn unit_tangent(deriv: Complex64, align_with: Complex64) -> Complex64 {
    let t = Complex64::i() * deriv.conj() / deriv.norm();
    if t.re * align_with.re + t.im * align_with.im >= 0.0 {
        t
    } else {
        -t
    }
}

/// Trace one level curve. See [`BranchId`] for the families, [`TraceConfig`] for
/// the knobs, and the module docs for the walk itself.
pub fn trace_level_curve(
    theta: f64,
    branch: BranchId,
    cfg: &TraceConfig,
) -> Result<LevelCurve, LevelSetError> {
    if let BranchId::ZeroRay { ray, .. } = branch {
        assert!(ray < 4, "ray index must be 0..4");
    }
    let field = field_for(branch, theta);
    let monitor = monitor_for(branch, theta);

    // Launch data: starting point, initial direction, zeros to watch for.
    let (start, dir0): (Complex64, Complex64) = match branch {
        BranchId::ZeroRay { which, ray } => {
            let z0 = Complex64::new(which.value(), 0.0);
            let phi = ray_launch_angle(theta, which, ray);
            let mut dir = Complex64::from_polar(1.0, phi);
            // Snap axis-aligned launches exactly onto the axes so that curves
            // running along the real line keep an exactly-zero imaginary part.
            if dir.re.abs() < 1e-12 {
                dir.re = 0.0;
            }
            if dir.im.abs() < 1e-12 {
                dir.im = 0.0;
            }
            (z0, dir)
        }
        BranchId::SigmaTheta => {
            let s = find_s(theta)?;
            let dir = if theta > 0.0 {
                Complex64::i()
            } else {
                -Complex64::new(1.0, 0.0)
            };
            (Complex64::new(s, 0.0), dir)
        }
    };

    let mut points = vec![start];
    let mut events = Vec::new();

    // Step off the start (where f' may vanish) and correct onto the curve.
    let mut a = start + dir0 * cfg.h0;
    if branch == BranchId::SigmaTheta && theta == 0.0 {
        // Launch along the real axis: the curve is exactly the ray ]-inf, -1[.
        // Keep the imaginary part at +0 so evaluation stays on the upper edge.
        a = Complex64::new(a.re, 0.0);
    }
    let (mut a, d0) = match corrector(&field, a, 0.0) {
        Ok(ok) => ok,
        Err(CorrectorFail::Critical(at)) => return Err(LevelSetError::CriticalPointHit { at }),
        Err(CorrectorFail::NoConverge(at)) => {
            return Err(LevelSetError::StallDetected { arc: 0.0, at })
        }
        Err(CorrectorFail::Period(e)) => return Err(e.into()),
    };
    let mut tang = unit_tangent(d0, dir0);
    points.push(a);

    let mut monitor_val: Option<f64> = monitor
        .as_ref()
        .and_then(|m| (m.f)(a).ok().map(|v| v.re));

    let mut h = cfg.h0;
    let mut arc = 0.0;
    let zeros = [Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)];

    loop {
        // Step cap: base, far-field growth, turning control via retries, and a
        // brake when heading into a finite zero.
        let mut cap = cfg.h_max;
        if cfg.grow_far {
            cap = cap.max(0.02 * a.norm());
        }
        for (zi, z) in zeros.iter().enumerate() {
            let dz = z - a;
            let dist = dz.norm();
            let toward = dz.re * tang.re + dz.im * tang.im > 0.0;
            if dist < 0.05 && toward && arc > 0.01 {
                cap = cap.min((0.4 * dist).max(1e-7));
            }
            // Terminal: converged onto a zero.
            if dist <= 1e-6 && arc > 0.01 {
                let which = if zi == 0 { Sign::Minus } else { Sign::Plus };
                return Ok(LevelCurve {
                    branch,
                    theta,
                    points,
                    end: CurveEnd::Zero { which },
                    events,
                });
            }
        }
        h = h.min(cap);
        if h < 1e-12 {
            return Err(LevelSetError::StallDetected { arc, at: a });
        }

        let pred = a + tang * h;
        match corrector(&field, pred, 0.0) {
            Ok((anew, dnew)) => {
                let tnew = unit_tangent(dnew, tang);
                let turn = angle_dist(tnew.arg(), tang.arg());
                if turn > 0.25 && h > 1e-9 {
                    h *= 0.5;
                    continue;
                }
                // Watched crossing?
                if let (Some(mon), Some(vprev)) = (monitor.as_ref(), monitor_val) {
                    if let Ok(vnew) = (mon.f)(anew).map(|v| v.re) {
                        if vprev != 0.0 && vnew != 0.0 && vprev.signum() != vnew.signum() {
                            let lambda = vprev / (vprev - vnew);
                            let seed = a + (anew - a) * lambda;
                            if let Some((at, residual)) = newton2(&field, mon, seed) {
                                events.push(CurveEvent {
                                    index: points.len() - 1,
                                    at,
                                    residual,
                                });
                            } else {
                                return Err(LevelSetError::NoConvergence {
                                    context: "crossing refinement",
                                });
                            }
                        }
                        monitor_val = Some(vnew);
                    } else {
                        monitor_val = None;
                    }
                } else if let Some(mon) = monitor.as_ref() {
                    monitor_val = (mon.f)(anew).ok().map(|v| v.re);
                }

                arc += (anew - a).norm();
                a = anew;
                tang = tnew;
                points.push(a);

                if a.norm() >= cfg.r_world {
                    let angle = wrap_angle(a.arg());
                    let k = match branch {
                        BranchId::ZeroRay { .. } => {
                            let dirs = divergence_directions(theta);
                            Some(
                                (0..5)
                                    .min_by(|&i, &j| {
                                        angle_dist(angle, dirs[i])
                                            .partial_cmp(&angle_dist(angle, dirs[j]))
                                            .unwrap()
                                    })
                                    .unwrap(),
                            )
                        }
                        BranchId::SigmaTheta => None,
                    };
                    return Ok(LevelCurve {
                        branch,
                        theta,
                        points,
                        end: CurveEnd::Infinity { angle, k },
                        events,
                    });
                }
                if arc > cfg.max_arc {
                    return Err(LevelSetError::StallDetected { arc, at: a });
                }
                h = (h * 1.5).min(cap);
            }
            Err(CorrectorFail::Critical(at)) => {
                if h > 1e-9 {
                    h *= 0.5;
                } else {
                    return Err(LevelSetError::CriticalPointHit { at });
                }
            }
            Err(_) => {
                if h > 1e-11 {
                    h *= 0.5;
                } else {
                    return Err(LevelSetError::StallDetected { arc, at: a });
                }
            }
        }
    }
}

/// Two-dimensional Newton iteration on `(Re f, Re g)`. Returns the root and the
/// final residual, or `None` when the iteration leaves the basin or the Jacobian
/// degenerates (tangential crossing).
fn newton2(fa: &CurveField, fb: &CurveField, seed: Complex64) -> Option<(Complex64, f64)> {
    let mut a = seed;
    let mut best = f64::INFINITY;
    for _ in 0..60 {
        let v1 = (fa.f)(a).ok()?;
        let v2 = (fb.f)(a).ok()?;
        let d1 = (fa.fp)(a).ok()?;
        let d2 = (fb.fp)(a).ok()?;
        let scale = 1.0 + v1.norm() + v2.norm();
        let (u1, u2) = (v1.re, v2.re);
        let resid = u1.abs().max(u2.abs());
        best = best.min(resid);
        // Rows of the Jacobian of (Re f, Re g) as functions of (x, y).
        let (a11, a12) = (d1.re, -d1.im);
        let (a21, a22) = (d2.re, -d2.im);
        let det = a11 * a22 - a12 * a21;
        if det.abs() < 1e-13 * (d1.norm() * d2.norm()).max(1e-300) {
            return None;
        }
        let (b1, b2) = (-u1, -u2);
        let dx = (b1 * a22 - a12 * b2) / det;
        let dy = (a11 * b2 - b1 * a21) / det;
        let step = Complex64::new(dx, dy);
        a += step;
        if resid <= 1e-12 * scale || step.norm() <= 1e-13 * (1.0 + a.norm()) {
            let r1 = (fa.f)(a).ok()?.re.abs();
            let r2 = (fb.f)(a).ok()?.re.abs();
            let fin = r1.max(r2);
            if fin <= 1e-9 * scale {
                return Some((a, fin));
            }
        }
    }
    None
}

/// The special points of one rotation: the triple junction `t_theta`, the
/// exceptional double point `e_theta` (present exactly for `theta < pi/8`), and
/// the real launch point `s_theta` of `Sigma_theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialPoints {
    pub theta: f64,
    pub t: Complex64,
    pub e: Option<Complex64>,
    pub s: f64,
}

fn check_theta(theta: f64) -> Result<(), LevelSetError> {
    if !(0.0..=FRAC_PI_4 + 1e-12).contains(&theta) {
        return Err(LevelSetError::ThetaOutOfRange { theta });
    }
    Ok(())
}

/// The launch point `s_theta` of `Sigma_theta` on `[-1, 1]`: the unique real root
/// of `cos(theta) R(x) = sin(theta) M(x)`, found by bisection to width 1e-12.
/// `s_0 = -1` exactly and `s_{pi/4}` is `0` by the symmetry `R(0) = M(0)`.
pub fn find_s(theta: f64) -> Result<f64, LevelSetError> {
    check_theta(theta)?;
    if theta == 0.0 {
        return Ok(-1.0);
    }
    let (ct, st) = (theta.cos(), theta.sin());
    let g = |x: f64| -> Result<f64, LevelSetError> {
        Ok(ct * segment_r(x)? - st * segment_m(x)?)
    };
    let (mut lo, mut hi) = (-1.0, 1.0);
    if g(lo)? > 0.0 || g(hi)? < 0.0 {
        return Err(LevelSetError::NoConvergence { context: "s bracketing" });
    }
    // Invariant: g(lo) <= 0 <= g(hi).
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Trace the leftward ray of `Sigma_{+1,theta}` (ray index 2), which carries both
/// watched crossings with `Sigma_{-1,theta}`: first `t_theta`, then `e_theta`.
fn trace_plus_l_ray(theta: f64, cfg: &TraceConfig) -> Result<LevelCurve, LevelSetError> {
    trace_level_curve(
        theta,
        BranchId::ZeroRay { which: Sign::Plus, ray: 2 },
        cfg,
    )
}

/// The triple junction `t_theta` where all three level sets meet. For
/// `theta = 0` this degenerates to `-1` exactly.
pub fn find_t(theta: f64) -> Result<Complex64, LevelSetError> {
    check_theta(theta)?;
    if theta == 0.0 {
        return Ok(Complex64::new(-1.0, 0.0));
    }
    let curve = trace_plus_l_ray(theta, &TraceConfig::default())?;
    match curve.events.first() {
        Some(ev) => Ok(ev.at),
        None => Err(LevelSetError::NoConvergence { context: "t crossing not found" }),
    }
}

/// Escape radius for the hunt for `e_theta`, which runs off to infinity as
/// `theta` approaches `pi/8` from below.
const E_HUNT_RADIUS: f64 = 1e4;

/// The exceptional point `e_theta`: the second intersection of the leftward
/// `Sigma_{+1}` ray with `Sigma_{-1,theta}`. Present exactly for
/// `theta < pi/8`; the hunt traces out to radius 1e4 before giving up, so the
/// transition is located by computation rather than by a hard-coded threshold.
/// For `theta = 0` the intersection degenerates to `-1`.
pub fn find_e(theta: f64) -> Result<Option<Complex64>, LevelSetError> {
    check_theta(theta)?;
    if theta == 0.0 {
        return Ok(Some(Complex64::new(-1.0, 0.0)));
    }
    let cfg = TraceConfig {
        r_world: E_HUNT_RADIUS,
        grow_far: true,
        max_arc: 1e5,
        ..TraceConfig::default()
    };
    let curve = trace_plus_l_ray(theta, &cfg)?;
    if curve.events.is_empty() {
        return Err(LevelSetError::NoConvergence { context: "t crossing not found" });
    }
    Ok(curve.events.get(1).map(|ev| ev.at))
}

/// All three special points of one rotation.
pub fn special_points(theta: f64) -> Result<SpecialPoints, LevelSetError> {
    check_theta(theta)?;
    Ok(SpecialPoints {
        theta,
        t: find_t(theta)?,
        e: find_e(theta)?,
        s: find_s(theta)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periods::f_pm1;

    const ATAN_HALF_OVER_2: f64 = 0.23182380450040305;

    #[test]
    fn launch_angles_match_the_quarter_turn_pattern() {
        let plus = launch_angles_at_zero(0.0, Sign::Plus);
        assert!((plus[0] - 0.0).abs() < 1e-15);
        assert!((plus[1] - PI / 2.0).abs() < 1e-15);
        assert!((plus[2] - PI).abs() < 1e-15);
        let minus = launch_angles_at_zero(0.0, Sign::Minus);
        assert!((minus[0] - PI / 4.0).abs() < 1e-15);
        for j in 0..4 {
            let d = wrap_angle(minus[j] - plus[j]);
            assert!((d - PI / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn s_points_match_references() {
        assert_eq!(find_s(0.0).unwrap(), -1.0);
        assert!((find_s(PI / 8.0).unwrap() - -0.23671856019755696).abs() < 1e-9);
        assert!((find_s(ATAN_HALF_OVER_2).unwrap() - -0.37507461895146247).abs() < 1e-9);
        assert!(find_s(FRAC_PI_4).unwrap().abs() < 1e-6);
        assert!(find_s(1.0).is_err());
    }

    #[test]
    fn t_points_match_references() {
        let t = find_t(PI / 8.0).unwrap();
        assert!((t - Complex64::new(-0.49179291307310346, 0.35911059776535088)).norm() < 1e-7);
        let t = find_t(ATAN_HALF_OVER_2).unwrap();
        assert!((t - Complex64::new(-0.69193434822130133, 0.25257570962312312)).norm() < 1e-7);
        let t = find_t(FRAC_PI_4).unwrap();
        assert!((t - Complex64::new(0.0, 0.46205279685408133)).norm() < 1e-7);
        // The junction lies on all three level sets.
        for theta in [PI / 8.0, FRAC_PI_4] {
            let t = find_t(theta).unwrap();
            assert!(f_pm1(t, theta, Sign::Plus).unwrap().re.abs() < 1e-8);
            assert!(f_pm1(t, theta, Sign::Minus).unwrap().re.abs() < 1e-8);
            assert!(f_theta(t, theta).unwrap().re.abs() < 1e-8);
        }
    }

    #[test]
    fn e_point_exists_only_below_pi_over_8() {
        let e = find_e(ATAN_HALF_OVER_2).unwrap().expect("e exists below pi/8");
        assert!((e - Complex64::new(-1.7128670711616194, 0.82592332514897941)).norm() < 1e-6);
        assert!(find_e(PI / 8.0).unwrap().is_none());
        assert!(find_e(FRAC_PI_4).unwrap().is_none());
        assert_eq!(find_e(0.0).unwrap(), Some(Complex64::new(-1.0, 0.0)));
    }

    #[test]
    fn traced_rays_stay_on_level_and_diverge_in_matched_directions() {
        let theta = FRAC_PI_4;
        let dirs = divergence_directions(theta);
        for which in [Sign::Plus, Sign::Minus] {
            let mut seen = Vec::new();
            for ray in 0..4 {
                let curve = trace_level_curve(
                    theta,
                    BranchId::ZeroRay { which, ray },
                    &TraceConfig::default(),
                )
                .unwrap();
                // Vertex residuals: skip the launch vertex (the zero itself).
                for &a in &curve.points[1..] {
                    let r = f_pm1(a, theta, which).unwrap().re.abs();
                    assert!(r <= 1e-8, "residual {r} at {a}");
                }
                match curve.end {
                    CurveEnd::Infinity { angle, k } => {
                        let k = k.expect("zero rays match a divergence direction");
                        assert!(angle_dist(angle, dirs[k]) < 2f64.to_radians() * 2.0);
                        seen.push(k);
                    }
                    other => panic!("expected escape to infinity, got {other:?}"),
                }
            }
            seen.sort_unstable();
            seen.dedup();
            assert_eq!(seen.len(), 4, "four distinct divergence directions");
        }
    }

    #[test]
    fn sigma_theta_escapes_along_pi_minus_two_theta() {
        for theta in [ATAN_HALF_OVER_2, PI / 8.0, FRAC_PI_4] {
            let curve =
                trace_level_curve(theta, BranchId::SigmaTheta, &TraceConfig::default()).unwrap();
            match curve.end {
                CurveEnd::Infinity { angle, k } => {
                    assert!(k.is_none());
                    assert!(angle_dist(angle, PI - 2.0 * theta) < 0.07);
                }
                other => panic!("expected escape, got {other:?}"),
            }
        }
    }

    #[test]
    fn degenerate_rotation_curves_follow_the_real_axis() {
        // Sigma_0 is the ray ]-inf, -1]: launched leftward from s_0 = -1.
        let sigma = trace_level_curve(0.0, BranchId::SigmaTheta, &TraceConfig::default()).unwrap();
        for &a in &sigma.points {
            assert_eq!(a.im, 0.0);
            assert!(a.re <= -1.0 + 2e-3);
        }
        match sigma.end {
            CurveEnd::Infinity { angle, .. } => assert!(angle_dist(angle, PI) < 1e-9),
            other => panic!("expected escape, got {other:?}"),
        }
        // The leftward plus-ray at theta = 0 runs along the segment into -1.
        let l = trace_plus_l_ray(0.0, &TraceConfig::default()).unwrap();
        assert_eq!(l.end, CurveEnd::Zero { which: Sign::Minus });
        for &a in &l.points {
            assert_eq!(a.im, 0.0);
        }
    }

    #[test]
    fn special_points_bundle_is_consistent() {
        let sp = special_points(PI / 8.0).unwrap();
        assert!(sp.e.is_none());
        assert!((sp.s - -0.236718560197557).abs() < 1e-8);
        let sp = special_points(ATAN_HALF_OVER_2).unwrap();
        assert!(sp.e.is_some());
    }
}
