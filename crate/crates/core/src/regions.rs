//! Decomposition of the parameter disk `|a| <= 50` into the open regions cut out
//! by the wall system `Xi_theta = S_{+1} u S_{-1} u S_theta`, and point location
//! against it.
//!
//! The wall system is the union of the *trimmed* level sets:
//!
//! - `S_{+1,theta}`: the four rays of `Sigma_{+1}` through `+1`, with the
//!   leftward ray cut at the exceptional point `e_theta` when that point exists
//!   (for `theta = 0` the leftward ray is the segment `[-1, 1]` and the cut is
//!   vacuous),
//! - `S_{-1,theta}`: all four rays of `Sigma_{-1}` through `-1`, untrimmed,
//! - `S_theta`: the arc of `Sigma_theta` from the junction `t_theta` to infinity
//!   (for `theta = 0` the whole ray `]-inf, -1]`).
//!
//! The asymmetry of the trim is forced by the region counts together with
//! continuity in `theta`: at `theta = 0` the deleted arc is the component of
//! `Sigma_{+1}` through `-1`, while `Sigma_{-1}` keeps all four of its rays as
//! region boundaries; following those walls to `theta > 0` trims only the
//! `Sigma_{+1}` side. The count is then 8 at `theta = 0`, 10 for
//! `0 < theta < pi/8` (the tenth region is the wedge between the kept
//! `Sigma_{-1}` arc beyond `e` and `S_theta`), and 9 for
//! `pi/8 <= theta <= pi/4`, where `e_theta` no longer exists.
//!
//! Region counting is combinatorial: the walls, their mutual crossings (`t`,
//! `e`), and the world-disk rim form a planar graph whose faces are enumerated
//! by a rotation-system walk, so the count does not depend on any raster
//! resolution. A windowed flood fill ([`flood_region_count`]) provides an
//! independent cross-check used by the test suite.

use crate::levelset::{
    special_points, trace_level_curve, BranchId, CurveEnd, LevelCurve, LevelSetError,
    SpecialPoints, TraceConfig,
};
use crate::periods::{f_pm1, f_theta, Sign};
use crate::Complex64;
use thiserror::Error;

/// Radius of the world disk served by [`RegionMap::locate`].
pub const WORLD_RADIUS: f64 = 50.0;

/// Walls are traced slightly past the world radius and clipped back to it, so
/// every unbounded wall crosses the rim transversally.
const TRACE_RADIUS: f64 = 53.0;

/// Default point-location tolerance.
pub const LOCATE_TOL: f64 = 1e-3;

/// Geometric resolution of the traced wall polylines: the maximum sagitta a
/// curve can hide between consecutive vertices. The on-curve distance check uses
/// at least this much fuzz.
const POLYLINE_RESOLUTION: f64 = 3e-3;

/// Two special points closer than this are treated as one vertex of the
/// arrangement (the `t = e = -1` collision at `theta = 0`).
const VERTEX_MERGE: f64 = 1e-9;

/// Angular step used to sample rim arcs into face polygons.
const RIM_STEP: f64 = 5e-3;

/// Which wall family an on-curve point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallKind {
    /// The trimmed `Sigma_{+1}` rays.
    SPlus,
    /// The `Sigma_{-1}` rays.
    SMinus,
    /// The arc of `Sigma_theta` from `t_theta` outward.
    STheta,
}

/// Point-location verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    /// Inside an open region; ids are contiguous from 0, ordered by the
    /// (area-weighted) centroid of the region, lexicographically by real part
    /// then imaginary part.
    Region(usize),
    /// On a wall, within tolerance.
    OnCurve(WallKind),
    /// Within tolerance of the triple junction `t_theta`.
    AtT,
    /// Within tolerance of the exceptional point `e_theta`.
    AtE,
}

#[derive(Debug, Error, PartialEq)]
pub enum RegionError {
    /// Point location is only served inside the world disk.
    #[error("a = {a} is outside the world disk |a| <= {}", WORLD_RADIUS)]
    OutOfWorld { a: Complex64 },

    /// The wall system did not assemble into a coherent planar arrangement.
    #[error("inconsistent arrangement: {detail}")]
    InconsistentArrangement { detail: String },

    /// A query point could not be attributed to any region; not expected for
    /// in-world inputs.
    #[error("could not attribute a = {a} to a region")]
    AmbiguousCell { a: Complex64 },

    #[error(transparent)]
    LevelSet(#[from] LevelSetError),
}

fn inconsistent(detail: impl Into<String>) -> RegionError {
    RegionError::InconsistentArrangement {
        detail: detail.into(),
    }
}

/// One wall: a trimmed polyline tagged with its family.
#[derive(Debug, Clone)]
pub struct Wall {
    pub kind: WallKind,
    pub curve: LevelCurve,
}

impl Wall {
    pub fn points(&self) -> &[Complex64] {
        &self.curve.points
    }
}

/// One region: a closed boundary polygon (walls and rim arcs) with positive
/// orientation, plus cached centroid data for deterministic ordering.
#[derive(Debug, Clone)]
struct Face {
    polygon: Vec<Complex64>,
    area: f64,
    centroid: Complex64,
}

impl Face {
    /// Winding-number membership test (nonzero rule).
    fn contains(&self, a: Complex64) -> bool {
        let mut winding = 0i64;
        let n = self.polygon.len();
        for i in 0..n {
            let p = self.polygon[i];
            let q = self.polygon[(i + 1) % n];
            if p.im <= a.im {
                if q.im > a.im && cross(q - p, a - p) > 0.0 {
                    winding += 1;
                }
            } else if q.im <= a.im && cross(q - p, a - p) < 0.0 {
                winding -= 1;
            }
        }
        winding != 0
    }
}

fn cross(u: Complex64, v: Complex64) -> f64 {
    u.re * v.im - u.im * v.re
}

/// The region decomposition of the world disk for one rotation.
#[derive(Debug, Clone)]
pub struct RegionMap {
    pub theta: f64,
    pub special: SpecialPoints,
    /// Trimmed wall polylines, in deterministic order: the four `Sigma_{+1}`
    /// rays, the four `Sigma_{-1}` rays, then `S_theta`.
    pub walls: Vec<Wall>,
    /// Number of open regions inside the world disk.
    pub n_regions: usize,
    faces: Vec<Face>,
}

/// A wall piece running between two arrangement vertices (or a vertex and the
/// rim), with exact node coordinates at both ends.
struct Chain {
    pts: Vec<Complex64>,
    from: usize,
    to: usize,
}

/// Split a traced polyline at the refined crossing `at` (last vertex index
/// `idx`), returning the `..=at` prefix and the `at..` suffix, both containing
/// the exact crossing point.
fn split_at(pts: &[Complex64], idx: usize, at: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut head: Vec<Complex64> = pts[..=idx.min(pts.len() - 1)].to_vec();
    // Drop trailing vertices that overshoot the refined point (the tracer's
    // last step before the crossing can land past it).
    while head.len() > 1 && (head[head.len() - 1] - at).norm() < 1e-12 {
        head.pop();
    }
    head.push(at);
    let mut tail: Vec<Complex64> = vec![at];
    tail.extend_from_slice(&pts[(idx + 1).min(pts.len())..]);
    (head, tail)
}

/// Clip an unbounded polyline at the world rim, returning the clipped polyline
/// (ending exactly on the circle) and the exit point.
fn clip_at_rim(pts: &[Complex64]) -> Result<(Vec<Complex64>, Complex64), RegionError> {
    let mut out: Vec<Complex64> = Vec::with_capacity(pts.len());
    for w in pts.windows(2) {
        let (u, v) = (w[0], w[1]);
        out.push(u);
        if u.norm() <= WORLD_RADIUS && v.norm() > WORLD_RADIUS {
            // Solve |u + s (v - u)| = R on s in (0, 1].
            let d = v - u;
            let aa = d.norm_sqr();
            let bb = 2.0 * (u.re * d.re + u.im * d.im);
            let cc = u.norm_sqr() - WORLD_RADIUS * WORLD_RADIUS;
            let disc = (bb * bb - 4.0 * aa * cc).max(0.0).sqrt();
            let s = (-bb + disc) / (2.0 * aa);
            let exit = u + d * s.clamp(0.0, 1.0);
            // Normalise onto the circle exactly.
            let exit = exit * (WORLD_RADIUS / exit.norm());
            out.push(exit);
            return Ok((out, exit));
        }
    }
    Err(inconsistent(format!(
        "wall does not reach the world rim (last point {:?})",
        pts.last()
    )))
}

/// Trace the nine wall curves for `theta` and split them into arrangement
/// chains. Returns the display walls (trimmed polylines) and the chain/node
/// structure.
#[allow(clippy::type_complexity)]
fn build_walls_and_chains(
    theta: f64,
    special: &SpecialPoints,
) -> Result<(Vec<Wall>, Vec<Chain>, Vec<Complex64>), RegionError> {
    let cfg = TraceConfig {
        r_world: TRACE_RADIUS,
        ..TraceConfig::default()
    };

    let t = special.t;
    // Treat `e` as an arrangement vertex only when it is distinct from `t`
    // (they collide at `-1` for `theta = 0`, where the trim is vacuous).
    let e_vertex: Option<Complex64> = special.e.filter(|e| (e - t).norm() > VERTEX_MERGE);

    // Node table: 0 = +1, 1 = -1, 2 = t, (3 = e); rim nodes appended later.
    let plus = Complex64::new(1.0, 0.0);
    let minus = Complex64::new(-1.0, 0.0);
    let mut nodes: Vec<Complex64> = vec![plus, minus];
    let t_is_minus = (t - minus).norm() <= VERTEX_MERGE;
    let node_t = if t_is_minus {
        1
    } else {
        nodes.push(t);
        nodes.len() - 1
    };
    let node_e = e_vertex.map(|e| {
        nodes.push(e);
        nodes.len() - 1
    });

    let mut walls: Vec<Wall> = Vec::with_capacity(9);
    // (pts, from, to_node_or_rim): rim ends marked with usize::MAX.
    let mut raw_chains: Vec<Chain> = Vec::new();
    const RIM: usize = usize::MAX;

    let expect_near = |at: Complex64, want: Complex64, what: &str| -> Result<(), RegionError> {
        let tol = 1e-5 + 1e-4 * want.norm();
        if (at - want).norm() > tol {
            Err(inconsistent(format!(
                "{what}: crossing at {at} but expected {want}"
            )))
        } else {
            Ok(())
        }
    };

    // Sigma_{+1} rays.
    for ray in 0..4 {
        let curve = trace_level_curve(theta, BranchId::ZeroRay { which: Sign::Plus, ray }, &cfg)?;
        let mut trimmed = curve.clone();
        if ray == 2 {
            // Leftward ray: passes t, then (when e exists) e, where it is cut.
            match curve.end {
                CurveEnd::Zero { .. } => {
                    // theta = 0: the segment from +1 to -1; no crossings.
                    let mut pts = curve.points.clone();
                    pts.push(minus);
                    trimmed.points = pts.clone();
                    raw_chains.push(Chain {
                        pts,
                        from: 0,
                        to: 1,
                    });
                }
                _ => {
                    let ev_t = curve
                        .events
                        .first()
                        .copied()
                        .ok_or_else(|| inconsistent("leftward ray of Sigma_{+1} misses t"))?;
                    expect_near(ev_t.at, t, "leftward ray of Sigma_{+1} at t")?;
                    let (head, tail) = split_at(&curve.points, ev_t.index, t);
                    raw_chains.push(Chain {
                        pts: head,
                        from: 0,
                        to: node_t,
                    });
                    if let (Some(e), Some(ne)) = (e_vertex, node_e) {
                        let ev_e = curve.events.get(1).copied().ok_or_else(|| {
                            inconsistent("leftward ray of Sigma_{+1} misses e")
                        })?;
                        expect_near(ev_e.at, e, "leftward ray of Sigma_{+1} at e")?;
                        let local = ev_e.index.saturating_sub(ev_t.index);
                        let (mid, cut) = split_at(&tail, local, e);
                        raw_chains.push(Chain {
                            pts: mid.clone(),
                            from: node_t,
                            to: ne,
                        });
                        // The tail beyond e is not a wall: drop `cut`.
                        drop(cut);
                        let mut display = raw_chains[raw_chains.len() - 2].pts.clone();
                        display.extend_from_slice(&mid[1..]);
                        trimmed.points = display;
                        trimmed.end = CurveEnd::Infinity {
                            angle: e.arg(),
                            k: None,
                        };
                    } else {
                        raw_chains.push(Chain {
                            pts: tail,
                            from: node_t,
                            to: RIM,
                        });
                    }
                }
            }
        } else {
            raw_chains.push(Chain {
                pts: curve.points.clone(),
                from: 0,
                to: RIM,
            });
        }
        walls.push(Wall {
            kind: WallKind::SPlus,
            curve: trimmed,
        });
    }

    // Sigma_{-1} rays, untrimmed. Ray 0 passes t; ray 1 passes e (when the
    // respective crossing exists away from -1).
    for ray in 0..4 {
        let curve = trace_level_curve(theta, BranchId::ZeroRay { which: Sign::Minus, ray }, &cfg)?;
        let mut consumed = false;
        if ray == 0 && !t_is_minus {
            let ev = curve
                .events
                .first()
                .copied()
                .ok_or_else(|| inconsistent("Sigma_{-1} ray 0 misses t"))?;
            expect_near(ev.at, t, "Sigma_{-1} ray 0 at t")?;
            let (head, tail) = split_at(&curve.points, ev.index, t);
            raw_chains.push(Chain {
                pts: head,
                from: 1,
                to: node_t,
            });
            raw_chains.push(Chain {
                pts: tail,
                from: node_t,
                to: RIM,
            });
            consumed = true;
        }
        if let (Some(e), Some(ne)) = (e_vertex, node_e) {
            if ray == 1 {
                let ev = curve
                    .events
                    .first()
                    .copied()
                    .ok_or_else(|| inconsistent("Sigma_{-1} ray 1 misses e"))?;
                expect_near(ev.at, e, "Sigma_{-1} ray 1 at e")?;
                let (head, tail) = split_at(&curve.points, ev.index, e);
                raw_chains.push(Chain {
                    pts: head,
                    from: 1,
                    to: ne,
                });
                raw_chains.push(Chain {
                    pts: tail,
                    from: ne,
                    to: RIM,
                });
                consumed = true;
            }
        }
        if !consumed {
            raw_chains.push(Chain {
                pts: curve.points.clone(),
                from: 1,
                to: RIM,
            });
        }
        walls.push(Wall {
            kind: WallKind::SMinus,
            curve,
        });
    }

    // S_theta: the arc of Sigma_theta from t outward (through e when present).
    {
        let curve = trace_level_curve(theta, BranchId::SigmaTheta, &cfg)?;
        let mut trimmed = curve.clone();
        if t_is_minus {
            // theta = 0: the trace starts at s = t = -1 and runs down the
            // negative axis; the whole polyline is the wall.
            raw_chains.push(Chain {
                pts: curve.points.clone(),
                from: 1,
                to: RIM,
            });
        } else {
            let ev_t = curve
                .events
                .first()
                .copied()
                .ok_or_else(|| inconsistent("Sigma_theta misses its junction t"))?;
            expect_near(ev_t.at, t, "Sigma_theta at t")?;
            let (_, tail) = split_at(&curve.points, ev_t.index, t);
            if let (Some(e), Some(ne)) = (e_vertex, node_e) {
                let ev_e = curve
                    .events
                    .get(1)
                    .copied()
                    .ok_or_else(|| inconsistent("Sigma_theta misses e"))?;
                expect_near(ev_e.at, e, "Sigma_theta at e")?;
                let local = ev_e.index.saturating_sub(ev_t.index);
                let (mid, far) = split_at(&tail, local, e);
                trimmed.points = {
                    let mut p = mid.clone();
                    p.extend_from_slice(&far[1..]);
                    p
                };
                raw_chains.push(Chain {
                    pts: mid,
                    from: node_t,
                    to: ne,
                });
                raw_chains.push(Chain {
                    pts: far,
                    from: ne,
                    to: RIM,
                });
            } else {
                trimmed.points = tail.clone();
                raw_chains.push(Chain {
                    pts: tail,
                    from: node_t,
                    to: RIM,
                });
            }
        }
        walls.push(Wall {
            kind: WallKind::STheta,
            curve: trimmed,
        });
    }

    // Clip rim-bound chains, collect exits as rim nodes.
    let mut chains: Vec<Chain> = Vec::with_capacity(raw_chains.len());
    for chain in raw_chains {
        if chain.to == RIM {
            let (pts, exit) = clip_at_rim(&chain.pts)?;
            nodes.push(exit);
            chains.push(Chain {
                pts,
                from: chain.from,
                to: nodes.len() - 1,
            });
        } else {
            chains.push(chain);
        }
    }

    Ok((walls, chains, nodes))
}

/// Enumerate the faces of the arrangement formed by `chains` and the rim
/// circle. Returns interior faces only.
fn enumerate_faces(
    chains: &[Chain],
    nodes: &[Complex64],
    first_rim_node: usize,
) -> Result<Vec<Face>, RegionError> {
    // Append rim arcs between angularly consecutive exits as additional chains.
    let mut all: Vec<Chain> = Vec::with_capacity(chains.len() + 8);
    for c in chains {
        all.push(Chain {
            pts: c.pts.clone(),
            from: c.from,
            to: c.to,
        });
    }
    let mut rim: Vec<(f64, usize)> = (first_rim_node..nodes.len())
        .map(|i| (nodes[i].arg(), i))
        .collect();
    rim.sort_by(|a, b| a.0.total_cmp(&b.0));
    if rim.len() < 2 {
        return Err(inconsistent("fewer than two rim exits"));
    }
    for k in 0..rim.len() {
        let (phi0, n0) = rim[k];
        let (phi1, n1) = rim[(k + 1) % rim.len()];
        let dphi = if k + 1 == rim.len() {
            phi1 + 2.0 * std::f64::consts::PI - phi0
        } else {
            phi1 - phi0
        };
        if dphi <= 0.0 {
            return Err(inconsistent("rim exits are not angularly distinct"));
        }
        let steps = (dphi / RIM_STEP).ceil().max(1.0) as usize;
        let mut pts = Vec::with_capacity(steps + 1);
        pts.push(nodes[n0]);
        for s in 1..steps {
            let phi = phi0 + dphi * (s as f64 / steps as f64);
            pts.push(Complex64::from_polar(WORLD_RADIUS, phi));
        }
        pts.push(nodes[n1]);
        all.push(Chain {
            pts,
            from: n0,
            to: n1,
        });
    }

    // Half-edge structure: he 2c = forward, 2c + 1 = backward.
    let n_he = 2 * all.len();
    let origin = |he: usize| -> usize {
        let c = &all[he / 2];
        if he % 2 == 0 {
            c.from
        } else {
            c.to
        }
    };
    let departure = |he: usize| -> f64 {
        let c = &all[he / 2];
        let (anchor, iter): (Complex64, Box<dyn Iterator<Item = &Complex64>>) = if he % 2 == 0 {
            (c.pts[0], Box::new(c.pts.iter().skip(1)))
        } else {
            (c.pts[c.pts.len() - 1], Box::new(c.pts.iter().rev().skip(1)))
        };
        let mut dir = None;
        for p in iter {
            if (p - anchor).norm() >= 0.02 {
                dir = Some((p - anchor).arg());
                break;
            }
        }
        dir.unwrap_or_else(|| {
            let p = if he % 2 == 0 {
                c.pts[c.pts.len() - 1]
            } else {
                c.pts[0]
            };
            (p - anchor).arg()
        })
    };

    // Rotation system: outgoing half-edges per node, sorted by departure angle.
    let mut star: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for he in 0..n_he {
        star[origin(he)].push(he);
    }
    let mut depart = vec![0.0f64; n_he];
    for (he, d) in depart.iter_mut().enumerate() {
        *d = departure(he);
    }
    for list in star.iter_mut() {
        list.sort_by(|&a, &b| depart[a].total_cmp(&depart[b]));
    }

    // Face walk: next(he) = the half-edge clockwise-adjacent to twin(he)
    // around the target node, which traverses interior faces counterclockwise.
    let twin = |he: usize| -> usize { he ^ 1 };
    let next = |he: usize| -> usize {
        let tw = twin(he);
        let v = origin(tw);
        let list = &star[v];
        let pos = list.iter().position(|&x| x == tw).expect("twin in star");
        list[(pos + list.len() - 1) % list.len()]
    };

    let mut seen = vec![false; n_he];
    let mut faces: Vec<Face> = Vec::new();
    let mut negatives = 0usize;
    for start in 0..n_he {
        if seen[start] {
            continue;
        }
        let mut polygon: Vec<Complex64> = Vec::new();
        let mut he = start;
        let mut guard = 0usize;
        loop {
            seen[he] = true;
            let c = &all[he / 2];
            if he % 2 == 0 {
                polygon.extend_from_slice(&c.pts[..c.pts.len() - 1]);
            } else {
                polygon.extend(c.pts.iter().rev().take(c.pts.len() - 1));
            }
            he = next(he);
            guard += 1;
            if he == start {
                break;
            }
            if guard > n_he {
                return Err(inconsistent("face walk does not close"));
            }
        }
        // Shoelace area and centroid.
        let mut area2 = 0.0f64;
        let mut cx = 0.0f64;
        let mut cy = 0.0f64;
        let m = polygon.len();
        for i in 0..m {
            let p = polygon[i];
            let q = polygon[(i + 1) % m];
            let w = cross(p, q);
            area2 += w;
            cx += (p.re + q.re) * w;
            cy += (p.im + q.im) * w;
        }
        let area = 0.5 * area2;
        if area <= 0.0 {
            negatives += 1;
            continue;
        }
        let centroid = Complex64::new(cx / (3.0 * area2), cy / (3.0 * area2));
        faces.push(Face {
            polygon,
            area,
            centroid,
        });
    }
    if negatives != 1 {
        return Err(inconsistent(format!(
            "expected exactly one outer face, found {negatives}"
        )));
    }

    // Euler check: V - E + F = 2 for the connected arrangement.
    let v = nodes.len();
    let e = all.len();
    let f = faces.len() + 1;
    if v + f != e + 2 {
        return Err(inconsistent(format!(
            "Euler check failed: V = {v}, E = {e}, F = {f}"
        )));
    }

    // Deterministic ids: order by centroid, lexicographically.
    faces.sort_by(|a, b| {
        a.centroid
            .re
            .total_cmp(&b.centroid.re)
            .then(a.centroid.im.total_cmp(&b.centroid.im))
    });
    Ok(faces)
}

/// Build the region decomposition for `theta` in `[0, pi/4]`.
pub fn build_region_map(theta: f64) -> Result<RegionMap, RegionError> {
    let special = special_points(theta)?;
    let (walls, chains, nodes) = build_walls_and_chains(theta, &special)?;
    let first_rim = nodes
        .iter()
        .position(|p| (p.norm() - WORLD_RADIUS).abs() < 1e-6)
        .ok_or_else(|| inconsistent("no rim exits"))?;
    let faces = enumerate_faces(&chains, &nodes, first_rim)?;
    let total_area: f64 = faces.iter().map(|f| f.area).sum();
    let disk = std::f64::consts::PI * WORLD_RADIUS * WORLD_RADIUS;
    if (total_area - disk).abs() > 0.01 * disk {
        return Err(inconsistent(format!(
            "face areas sum to {total_area:.1}, disk area is {disk:.1}"
        )));
    }
    Ok(RegionMap {
        theta,
        special,
        n_regions: faces.len(),
        walls,
        faces,
    })
}

impl RegionMap {
    /// Locate `a` against the decomposition.
    ///
    /// Verdict precedence: the special points `t`, `e` first (within `tol`),
    /// then wall membership (period residual within `tol` *and* polyline
    /// distance within the resolution fuzz), then the open region id.
    pub fn locate(&self, a: Complex64, tol: f64) -> Result<Location, RegionError> {
        if a.norm() > WORLD_RADIUS {
            return Err(RegionError::OutOfWorld { a });
        }
        if (a - self.special.t).norm() <= tol {
            return Ok(Location::AtT);
        }
        if let Some(e) = self.special.e {
            if (a - e).norm() <= tol {
                return Ok(Location::AtE);
            }
        }

        let dist_tol = tol.max(POLYLINE_RESOLUTION);
        for kind in [WallKind::SPlus, WallKind::SMinus, WallKind::STheta] {
            let residual_ok = match kind {
                WallKind::SPlus => f_pm1(a, self.theta, Sign::Plus)
                    .map(|v| v.re.abs() <= tol)
                    .unwrap_or(false),
                WallKind::SMinus => f_pm1(a, self.theta, Sign::Minus)
                    .map(|v| v.re.abs() <= tol)
                    .unwrap_or(false),
                WallKind::STheta => match f_theta(a, self.theta) {
                    Ok(v) => v.re.abs() <= tol,
                    // On the segment the wall can only be hit for theta = 0,
                    // where the segment belongs to Sigma_{+1} anyway.
                    Err(_) => false,
                },
            };
            if !residual_ok {
                continue;
            }
            let dist = self
                .walls
                .iter()
                .filter(|w| w.kind == kind)
                .map(|w| w.curve.distance_to(a))
                .fold(f64::INFINITY, f64::min);
            if dist <= dist_tol {
                return Ok(Location::OnCurve(kind));
            }
        }

        // Pull rim points just inside so the winding test is unambiguous.
        let q = if a.norm() > WORLD_RADIUS - 1e-9 {
            a * ((WORLD_RADIUS - 1e-9) / a.norm())
        } else {
            a
        };
        for (id, face) in self.faces.iter().enumerate() {
            if face.contains(q) {
                return Ok(Location::Region(id));
            }
        }
        Err(RegionError::AmbiguousCell { a })
    }
}

/// Independent region count: flood fill over a uniform grid on the window
/// `[-13, 13]^2` (which contains every bounded region and a section of every
/// unbounded one), with walls rasterised at three-quarters of a cell and
/// components below an area of `0.01` discarded as rasterisation slivers.
///
/// This deliberately repeats none of the combinatorial machinery, so the test
/// suite can cross-check [`build_region_map`] against it at several
/// resolutions.
pub fn flood_region_count(theta: f64, grid_n: usize) -> Result<usize, RegionError> {
    let special = special_points(theta)?;
    let (walls, _, _) = build_walls_and_chains(theta, &special)?;

    let world = 13.0f64;
    let rim = 1.0f64;
    let n = grid_n;
    let h = 2.0 * world / n as f64;
    let thick = 0.75 * h;

    let center = |idx: usize| -> Complex64 {
        Complex64::new(
            -world + ((idx % n) as f64 + 0.5) * h,
            -world + ((idx / n) as f64 + 0.5) * h,
        )
    };

    let mut blocked = vec![false; n * n];
    for wall in &walls {
        for w in wall.curve.points.windows(2) {
            let (u, v) = (w[0], w[1]);
            if u.norm().min(v.norm()) > world * 1.6 {
                continue;
            }
            let len = (v - u).norm();
            let steps = (len / (0.5 * h)).ceil().max(1.0) as usize;
            for k in 0..=steps {
                let z = u + (v - u) * (k as f64 / steps as f64);
                let i0 = ((z.re - thick + world) / h).floor() as isize;
                let i1 = ((z.re + thick + world) / h).ceil() as isize;
                let j0 = ((z.im - thick + world) / h).floor() as isize;
                let j1 = ((z.im + thick + world) / h).ceil() as isize;
                for j in j0.max(0)..=(j1.min(n as isize - 1)) {
                    for i in i0.max(0)..=(i1.min(n as isize - 1)) {
                        let idx = j as usize * n + i as usize;
                        if !blocked[idx] && (center(idx) - z).norm() <= thick {
                            blocked[idx] = true;
                        }
                    }
                }
            }
        }
    }

    let inside = |idx: usize| -> bool { center(idx).norm() <= world - rim };
    let mut label: Vec<u32> = vec![u32::MAX; n * n];
    let mut sizes: Vec<usize> = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    for start in 0..n * n {
        if blocked[start] || label[start] != u32::MAX || !inside(start) {
            continue;
        }
        let id = sizes.len() as u32;
        sizes.push(0);
        label[start] = id;
        queue.push_back(start);
        while let Some(c) = queue.pop_front() {
            sizes[id as usize] += 1;
            let (ci, cj) = (c % n, c / n);
            let mut visit = |ni: usize, nj: usize| {
                let nid = nj * n + ni;
                if !blocked[nid] && label[nid] == u32::MAX && inside(nid) {
                    label[nid] = id;
                    queue.push_back(nid);
                }
            };
            if ci > 0 {
                visit(ci - 1, cj);
            }
            if ci + 1 < n {
                visit(ci + 1, cj);
            }
            if cj > 0 {
                visit(ci, cj - 1);
            }
            if cj + 1 < n {
                visit(ci, cj + 1);
            }
        }
    }

    let min_cells = (0.01 / (h * h)).ceil() as usize;
    Ok(sizes.iter().filter(|&&s| s >= min_cells.max(2)).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    const ATAN_HALF_OVER_2: f64 = 0.23182380450040305;

    #[test]
    fn region_counts_match_the_known_phase_portrait() {
        assert_eq!(build_region_map(0.0).unwrap().n_regions, 8);
        assert_eq!(build_region_map(ATAN_HALF_OVER_2).unwrap().n_regions, 10);
        assert_eq!(
            build_region_map(std::f64::consts::FRAC_PI_8).unwrap().n_regions,
            9
        );
        assert_eq!(
            build_region_map(std::f64::consts::FRAC_PI_4).unwrap().n_regions,
            9
        );
        // The ten-region window is exactly 0 < theta < pi/8.
        assert_eq!(build_region_map(0.31).unwrap().n_regions, 10);
    }

    #[test]
    fn flood_fill_confirms_the_combinatorial_counts() {
        // The lens between t and e at the middle angle needs cells finer than
        // its ~0.05 waist, hence the resolution.
        for (theta, want) in [
            (0.0, 8),
            (ATAN_HALF_OVER_2, 10),
            (std::f64::consts::FRAC_PI_4, 9),
        ] {
            assert_eq!(flood_region_count(theta, 1300).unwrap(), want, "theta = {theta}");
        }
    }

    #[test]
    fn locate_distinguishes_regions_curves_and_special_points() {
        let map = build_region_map(std::f64::consts::FRAC_PI_4).unwrap();
        assert_eq!(map.n_regions, 9);

        // The junction by its reference location.
        let t = Complex64::new(0.0, 0.462);
        assert_eq!(map.locate(t, 1e-3).unwrap(), Location::AtT);

        // 0.7i sits on Sigma_theta above t.
        let on_sigma = Complex64::new(0.0, 0.7);
        assert_eq!(
            map.locate(on_sigma, 1e-3).unwrap(),
            Location::OnCurve(WallKind::STheta)
        );

        // A generic interior point.
        match map.locate(Complex64::new(2.0, 1.0), 1e-3).unwrap() {
            Location::Region(_) => {}
            other => panic!("expected a region, got {other:?}"),
        }

        // Out of world.
        assert!(matches!(
            map.locate(Complex64::new(60.0, 0.0), 1e-3),
            Err(RegionError::OutOfWorld { .. })
        ));
    }

    #[test]
    fn locate_is_deterministic_and_ids_are_contiguous() {
        let map = build_region_map(0.0).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for y in [-2.0, -1.0, 1.0, 2.0] {
            for x in [-2.2, -0.5, 0.5, 2.2] {
                if let Location::Region(id) = map.locate(Complex64::new(x, y), 1e-3).unwrap() {
                    seen.insert(id);
                }
            }
        }
        // Theta = 0 has 8 regions, 4 above and 4 below the axis; the sample
        // points touch all of them.
        assert_eq!(seen.len(), 8);
        assert_eq!(*seen.iter().next_back().unwrap(), 7);

        // Same build, same ids.
        let again = build_region_map(0.0).unwrap();
        for y in [-2.0, 1.5] {
            for x in [-2.2, 0.4, 2.2] {
                let a = Complex64::new(x, y);
                assert_eq!(map.locate(a, 1e-3).unwrap(), again.locate(a, 1e-3).unwrap());
            }
        }
    }

    #[test]
    fn locate_matches_the_documented_examples() {
        // theta = 0: a = -2.5 + 0.7i lies in the region whose closure contains
        // the ray ]-inf, -1]; a = 10 + 10i is far from every wall.
        let map = build_region_map(0.0).unwrap();
        let left = map.locate(Complex64::new(-2.5, 0.7), 1e-3).unwrap();
        let Location::Region(left_id) = left else {
            panic!("expected a region verdict, got {left:?}");
        };
        // Same region as a point hugging the negative real axis from above.
        let probe = map.locate(Complex64::new(-30.0, 0.5), 1e-3).unwrap();
        assert_eq!(probe, Location::Region(left_id));

        let far = map.locate(Complex64::new(10.0, 10.0), 1e-3).unwrap();
        assert!(matches!(far, Location::Region(_)), "got {far:?}");

        // On-sigma just below the axis is a different region (the walls are
        // not mirrored into doubled copies).
        let below = map.locate(Complex64::new(-2.5, -0.7), 1e-3).unwrap();
        let Location::Region(below_id) = below else {
            panic!("expected a region verdict, got {below:?}");
        };
        assert_ne!(below_id, left_id);
    }
}
