//! The Stokes graph of a configuration, its face decomposition on the sphere,
//! signatures for phase classification, and flat Gauss-Bonnet residuals.
//!
//! The graph's vertices are the three simple zeros plus the point at infinity
//! (an order-seven pole, with five critical directions). Edges are the traced
//! critical rays, with the two halves of each short trajectory merged into a
//! single zero-to-zero edge. Faces are read off a rotation system: at a finite
//! zero the incident edge ends are ordered counter-clockwise by their measured
//! direction, at infinity by *descending* final position angle (the orientation
//! chart at the pole reverses). Each face is a half-plane (one corner at
//! infinity spanning one critical-direction gap) or a strip (two corners at
//! infinity spanning none); the gap multiplicities across all faces sum to the
//! five directions.
//!
//! The residual functions implement the flat Gauss-Bonnet count for a closed
//! boundary cycle: corner angles snap to the admissible grid (`pi/3` at a simple
//! zero, `pi/2` at a regular point) and the total
//! `sum_j (1 - (n_j + 2) theta_j / (2 pi)) - 2 - sum(interior orders)` must
//! vanish for a realisable domain.

use crate::cubic::CubicPolynomial;
use crate::quad::integrate_sqrt_p;
use crate::trajectory::{RaySet, RayTerminal, TrajectoryError, ZeroId};
use crate::{angle_dist, wrap_angle, Complex64};
use std::f64::consts::PI;
use thiserror::Error;

/// Radius near which parallel infinite rays are compared for the rotation
/// order at the pole; inside the tracer's escape radius so every infinite ray
/// has vertices there, far outside the zeros so a cross-segment between two
/// rays stays in regular territory.
const POLE_COMPARE_RADIUS: f64 = 15.0;

#[derive(Debug, Error)]
pub enum GraphError {
    /// Two edges cross away from the common zeros: the traced set is not a
    /// planar embedding.
    #[error("edges cross near {at}: not a planar embedding")]
    NonPlanar { at: Complex64 },

    /// A zero does not carry exactly three edge ends.
    #[error("zero {zero:?} has degree {degree}, expected 3")]
    BadDegree { zero: ZeroId, degree: usize },

    /// The face walk disagrees with Euler's formula.
    #[error("embedding inconsistent: V={v}, E={e}, F={f}")]
    EmbeddingInconsistent { v: usize, e: usize, f: usize },

    /// A face fits neither the half-plane nor the strip template.
    #[error("face {face} is neither a half-plane nor a strip")]
    FaceClassificationAmbiguous { face: usize },

    /// A measured corner angle is too far from every admissible value.
    #[error("corner angle {measured} rad does not snap to the admissible grid")]
    AngleSnapFailure { measured: f64 },

    /// The rotation order of parallel rays at the pole could not be measured.
    #[error("pole rotation order unresolved: {detail}")]
    PoleOrderUnresolved { detail: String },
}

/// What an edge of the Stokes graph is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// A ray from `origin` escaping along critical direction `k`.
    Infinite { origin: ZeroId, k: usize },
    /// A short trajectory between two zeros (polyline oriented `u -> v`).
    Short { u: ZeroId, v: ZeroId },
}

#[derive(Debug, Clone)]
pub struct GraphEdge {
    pub kind: EdgeKind,
    /// Oriented polyline: starts at the tail zero; for infinite edges ends at
    /// the escape radius, for shorts at the head zero.
    pub polyline: Vec<Complex64>,
    /// Measured direction leaving the tail (at arc length 0.05).
    tail_dir: f64,
    /// Rotation key at the head: measured direction leaving the head zero, or
    /// the final position angle for infinite edges.
    head_key: f64,
}

impl GraphEdge {
    pub fn tail(&self) -> ZeroId {
        match self.kind {
            EdgeKind::Infinite { origin, .. } => origin,
            EdgeKind::Short { u, .. } => u,
        }
    }
    pub fn head(&self) -> Vertex {
        match self.kind {
            EdgeKind::Infinite { .. } => Vertex::Inf,
            EdgeKind::Short { v, .. } => Vertex::Zero(v),
        }
    }
}

/// Vertices of the graph on the sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    Zero(ZeroId),
    Inf,
}

/// The assembled Stokes graph of one configuration.
#[derive(Debug, Clone)]
pub struct StokesGraph {
    pub a: Complex64,
    pub theta: f64,
    pub edges: Vec<GraphEdge>,
    /// Number of merged short edges.
    pub n_shorts: usize,
}

/// Point at arc length `s` from the chosen end of a polyline.
fn arc_point(poly: &[Complex64], from_start: bool, s: f64) -> Complex64 {
    let n = poly.len();
    let idx = |i: usize| if from_start { poly[i] } else { poly[n - 1 - i] };
    let mut remaining = s;
    let mut prev = idx(0);
    for i in 1..n {
        let cur = idx(i);
        let seg = (cur - prev).norm();
        if seg >= remaining {
            return prev + (cur - prev) * (remaining / seg.max(1e-300));
        }
        remaining -= seg;
        prev = cur;
    }
    prev
}

fn end_direction(poly: &[Complex64], from_start: bool) -> f64 {
    let base = if from_start { poly[0] } else { poly[poly.len() - 1] };
    let probe = arc_point(poly, from_start, 0.05);
    wrap_angle((probe - base).arg())
}

/// Index of the first polyline vertex at or beyond radius `r`.
fn vertex_beyond(poly: &[Complex64], r: f64) -> Option<usize> {
    poly.iter().position(|z| z.norm() >= r)
}

/// Signed conserved level of ray `pi` relative to ray `pj`, for two rays
/// escaping along the same critical direction. Every trajectory keeps
/// `Re(e^{i theta} int sqrt(p))` constant, so near a common radius the two
/// rays sit on distinct level lines of a single flat coordinate; integrating
/// `sqrt(p)` along the cross-segment between them measures the signed
/// separation to quadrature accuracy, which stays decisive even when the
/// geometric gap is far below polyline resolution (rays pinched off by a
/// near-miss at a zero). The branch is anchored on `pj` by matching the
/// trajectory field to its recorded direction of travel. The level increases
/// to the *right* of the direction of travel, so a positive value means `pi`
/// runs clockwise of `pj` as seen from the pole.
fn relative_level(
    p: &CubicPolynomial,
    phase: Complex64,
    pi: &[Complex64],
    pj: &[Complex64],
) -> Result<f64, GraphError> {
    let fail = |detail: &str| GraphError::PoleOrderUnresolved {
        detail: detail.to_string(),
    };
    let vi = vertex_beyond(pi, POLE_COMPARE_RADIUS)
        .ok_or_else(|| fail("ray ends short of the comparison radius"))?;
    let vj = vertex_beyond(pj, POLE_COMPARE_RADIUS)
        .ok_or_else(|| fail("ray ends short of the comparison radius"))?;
    if vj == 0 {
        return Err(fail("ray starts beyond the comparison radius"));
    }
    let (zi, zj) = (pi[vi], pj[vj]);
    let travel = zj - pj[vj - 1];
    // The two roots of p at z_j drive the field in opposite directions; keep
    // the one aligned with the polyline's travel.
    let s = p.eval(zj).sqrt();
    let field = Complex64::i() * (phase * s).conj();
    let root = if (field * travel.conj()).re >= 0.0 { s } else { -s };
    let seg = integrate_sqrt_p(p, &[zj, zi], root, 1e-13).map_err(|e| {
        GraphError::PoleOrderUnresolved {
            detail: e.to_string(),
        }
    })?;
    Ok((phase * seg.value).re)
}

/// Proper crossing of two segments, excluding touching at endpoints.
fn segments_cross(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> Option<Complex64> {
    let d1 = p2 - p1;
    let d2 = q2 - q1;
    let denom = d1.re * d2.im - d1.im * d2.re;
    if denom.abs() < 1e-18 {
        return None;
    }
    let rel = q1 - p1;
    let t = (rel.re * d2.im - rel.im * d2.re) / denom;
    let s = (rel.re * d1.im - rel.im * d1.re) / denom;
    if t > 1e-9 && t < 1.0 - 1e-9 && s > 1e-9 && s < 1.0 - 1e-9 {
        Some(p1 + d1 * t)
    } else {
        None
    }
}

/// Assemble the Stokes graph from a traced ray set: merge the two halves of each
/// short, check vertex degrees, and verify planarity of the drawn polylines.
pub fn assemble(a: Complex64, theta: f64, set: &RaySet) -> Result<StokesGraph, GraphError> {
    let mut edges: Vec<GraphEdge> = Vec::new();

    // Mark hit rays as consumed by their short.
    let mut consumed = vec![false; set.rays.len()];
    for cert in &set.shorts {
        // The certified polyline runs from one endpoint to the other; identify
        // the two member rays of this pair.
        let mut members: Vec<usize> = Vec::new();
        for (i, ray) in set.rays.iter().enumerate() {
            if let RayTerminal::ZeroHit { target, .. } = ray.terminal {
                let key = if ray.origin <= target {
                    (ray.origin, target)
                } else {
                    (target, ray.origin)
                };
                if key == cert.endpoints {
                    members.push(i);
                }
            }
        }
        for &i in &members {
            consumed[i] = true;
        }
        let u = cert.polyline.first().copied().unwrap();
        let (tail, head) = {
            let d0 = (u - cert.endpoints.0.value(a)).norm();
            if d0 < 1e-6 {
                (cert.endpoints.0, cert.endpoints.1)
            } else {
                (cert.endpoints.1, cert.endpoints.0)
            }
        };
        edges.push(GraphEdge {
            kind: EdgeKind::Short { u: tail, v: head },
            tail_dir: end_direction(&cert.polyline, true),
            head_key: end_direction(&cert.polyline, false),
            polyline: cert.polyline.clone(),
        });
    }

    for (i, ray) in set.rays.iter().enumerate() {
        if consumed[i] {
            continue;
        }
        match ray.terminal {
            RayTerminal::Infinity { k, angle } => {
                edges.push(GraphEdge {
                    kind: EdgeKind::Infinite { origin: ray.origin, k },
                    tail_dir: end_direction(&ray.points, true),
                    head_key: wrap_angle(angle),
                    polyline: ray.points.clone(),
                });
            }
            RayTerminal::ZeroHit { target, .. } => {
                // A hit ray without a certified short: inconsistent input.
                return Err(GraphError::BadDegree {
                    zero: target,
                    degree: 0,
                });
            }
        }
    }

    // Degree check: three edge ends at each zero.
    for z in ZeroId::ALL {
        let mut degree = 0;
        for e in &edges {
            if e.tail() == z {
                degree += 1;
            }
            if e.head() == Vertex::Zero(z) {
                degree += 1;
            }
        }
        if degree != 3 {
            return Err(GraphError::BadDegree { zero: z, degree });
        }
    }

    // Planarity: decimated pairwise polyline crossing test, ignoring meetings
    // in the immediate neighbourhood of a zero (edges legitimately share them).
    // A decimated chord can cross spuriously when two rays share a narrow
    // channel, so candidate hits are re-examined at full resolution before the
    // pair is declared non-planar.
    let zeros = [
        Complex64::new(-1.0, 0.0),
        Complex64::new(1.0, 0.0),
        a,
    ];
    let decimate = |poly: &[Complex64]| -> Vec<usize> {
        let step = (poly.len() / 100).max(1);
        let mut out: Vec<usize> = (0..poly.len()).step_by(step).collect();
        if *out.last().unwrap() != poly.len() - 1 {
            out.push(poly.len() - 1);
        }
        out
    };
    let idx: Vec<Vec<usize>> = edges.iter().map(|e| decimate(&e.polyline)).collect();
    for i in 0..edges.len() {
        for j in (i + 1)..edges.len() {
            let (pi, pj) = (&edges[i].polyline, &edges[j].polyline);
            for wi in idx[i].windows(2) {
                for wj in idx[j].windows(2) {
                    let coarse = segments_cross(pi[wi[0]], pi[wi[1]], pj[wj[0]], pj[wj[1]]);
                    let Some(_) = coarse else { continue };
                    // Full-resolution recheck within the implicated windows.
                    // Near-tangent crossings are forgiven: a pair of rays
                    // sharing a channel thinner than tracing accuracy braids
                    // numerically without being a genuine transversal crossing.
                    for si in wi[0]..wi[1] {
                        for sj in wj[0]..wj[1] {
                            if let Some(x) = segments_cross(
                                pi[si],
                                pi[si + 1],
                                pj[sj],
                                pj[sj + 1],
                            ) {
                                let d1 = pi[si + 1] - pi[si];
                                let d2 = pj[sj + 1] - pj[sj];
                                let sin = (d1.re * d2.im - d1.im * d2.re).abs()
                                    / (d1.norm() * d2.norm()).max(1e-300);
                                if sin < 0.02 {
                                    continue;
                                }
                                if zeros.iter().all(|z| (x - z).norm() > 0.02) {
                                    return Err(GraphError::NonPlanar { at: x });
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    let n_shorts = set.shorts.len();
    Ok(StokesGraph {
        a,
        theta,
        edges,
        n_shorts,
    })
}

/// A corner of a face at infinity.
#[derive(Debug, Clone, Copy)]
pub struct InfCorner {
    /// Swept angle between the arriving and departing edge ends (descending).
    pub gap: f64,
    /// Number of critical-direction gaps spanned (`gap ~ m * 2 pi / 5`).
    pub m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceKind {
    HalfPlane,
    Strip,
}

#[derive(Debug, Clone)]
pub struct Face {
    pub kind: FaceKind,
    /// Edge indices in boundary-walk order.
    pub boundary_edges: Vec<usize>,
    /// Measured interior angles at finite zeros (counter-clockwise gaps).
    pub zero_corners: Vec<(ZeroId, f64)>,
    pub inf_corners: Vec<InfCorner>,
    /// Whether the face contains the midpoint of the segment `[-1, 1]`
    /// (informational; false when the midpoint lies on the boundary).
    pub contains_segment_midpoint: bool,
}

/// The face decomposition of the sphere cut by the Stokes graph.
#[derive(Debug, Clone)]
pub struct DomainDecomposition {
    pub faces: Vec<Face>,
    pub half_planes: usize,
    pub strips: usize,
}

#[derive(Debug, Clone, Copy)]
struct HalfEdge {
    edge: usize,
    tail: Vertex,
    head: Vertex,
    /// Rotation key at the tail vertex.
    key: f64,
    twin: usize,
}

/// Decompose the sphere along the graph into half-planes and strips.
pub fn decompose(graph: &StokesGraph) -> Result<DomainDecomposition, GraphError> {
    // Conserved-level scalar ordering the infinite rays that share one
    // critical direction: within each group the first member is the reference
    // and every other member's level is measured against it. Ascending level
    // is descending position angle at the pole, and levels are differences of
    // one scalar per ray, so the order is automatically transitive.
    let p = CubicPolynomial::new(graph.a);
    let phase = Complex64::from_polar(1.0, graph.theta);
    let mut pole_level = vec![0.0f64; graph.edges.len()];
    for k in 0..5usize {
        let group: Vec<usize> = (0..graph.edges.len())
            .filter(|&i| matches!(graph.edges[i].kind, EdgeKind::Infinite { k: gk, .. } if gk == k))
            .collect();
        for &m in group.iter().skip(1) {
            pole_level[m] = relative_level(
                &p,
                phase,
                &graph.edges[m].polyline,
                &graph.edges[group[0]].polyline,
            )?;
        }
    }

    let mut hes: Vec<HalfEdge> = Vec::new();
    for (i, e) in graph.edges.iter().enumerate() {
        let fwd = HalfEdge {
            edge: i,
            tail: Vertex::Zero(e.tail()),
            head: e.head(),
            key: e.tail_dir,
            twin: hes.len() + 1,
        };
        let bwd = HalfEdge {
            edge: i,
            tail: e.head(),
            head: Vertex::Zero(e.tail()),
            key: e.head_key,
            twin: hes.len(),
        };
        hes.push(fwd);
        hes.push(bwd);
    }

    // Rotation system: per vertex, the half-edges leaving it in cyclic order.
    let mut verts: Vec<Vertex> = hes.iter().map(|h| h.tail).collect();
    verts.sort_unstable();
    verts.dedup();
    let mut rotation: std::collections::HashMap<Vertex, Vec<usize>> =
        std::collections::HashMap::new();
    for v in &verts {
        let mut out: Vec<usize> = (0..hes.len()).filter(|&i| hes[i].tail == *v).collect();
        match v {
            Vertex::Zero(_) => {
                out.sort_by(|&i, &j| hes[i].key.partial_cmp(&hes[j].key).unwrap())
            }
            // At the pole the chart reverses orientation, so the rotation runs
            // by descending direction; parallel rays within one critical
            // direction are ordered by ascending conserved level (the level
            // grows to the right of travel, i.e. clockwise seen from the pole).
            Vertex::Inf => out.sort_by(|&i, &j| {
                let (ei, ej) = (hes[i].edge, hes[j].edge);
                let d_k = |e: usize| match graph.edges[e].kind {
                    EdgeKind::Infinite { k, .. } => {
                        wrap_angle((-2.0 * graph.theta + (2.0 * k as f64 + 1.0) * PI) / 5.0)
                    }
                    EdgeKind::Short { .. } => unreachable!("shorts never reach the pole"),
                };
                let (di, dj) = (d_k(ei), d_k(ej));
                if (di - dj).abs() > 1e-9 {
                    dj.total_cmp(&di)
                } else {
                    pole_level[ei].total_cmp(&pole_level[ej])
                }
            }),
        }
        rotation.insert(*v, out);
    }

    let successor = |h: usize| -> usize {
        let v = hes[h].tail;
        let ring = &rotation[&v];
        let pos = ring.iter().position(|&x| x == h).unwrap();
        ring[(pos + 1) % ring.len()]
    };

    // Face walk: next half-edge in a face is the rotation successor of the twin.
    let mut visited = vec![false; hes.len()];
    let mut raw_faces: Vec<Vec<usize>> = Vec::new();
    for start in 0..hes.len() {
        if visited[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut h = start;
        loop {
            visited[h] = true;
            cycle.push(h);
            h = successor(hes[h].twin);
            if h == start {
                break;
            }
        }
        raw_faces.push(cycle);
    }

    let v = verts.len();
    let e = graph.edges.len();
    let f = raw_faces.len();
    if v + f != e + 2 {
        return Err(GraphError::EmbeddingInconsistent { v, e, f });
    }

    let mut faces = Vec::new();
    let mut m_total = 0usize;
    for (fi, cycle) in raw_faces.iter().enumerate() {
        let mut zero_corners = Vec::new();
        let mut inf_corners = Vec::new();
        for (pos, &h1) in cycle.iter().enumerate() {
            let h2 = cycle[(pos + 1) % cycle.len()];
            let x = hes[h1].head;
            debug_assert_eq!(x, hes[h2].tail);
            let dir_in = hes[hes[h1].twin].key;
            let dir_out = hes[h2].key;
            match x {
                Vertex::Zero(z) => {
                    let gap = wrap_angle(dir_out - dir_in);
                    zero_corners.push((z, gap));
                }
                Vertex::Inf => {
                    // Swept clockwise in position angle (descending rotation).
                    let gap = wrap_angle(dir_in - dir_out);
                    let sector = 2.0 * PI / 5.0;
                    let m_raw = (gap / sector).round() as i64;
                    let dev = (gap - m_raw as f64 * sector).abs();
                    if dev > 0.25 {
                        return Err(GraphError::FaceClassificationAmbiguous { face: fi });
                    }
                    let m = (m_raw.rem_euclid(5)) as usize;
                    inf_corners.push(InfCorner { gap, m });
                }
            }
        }
        let kind = match (inf_corners.len(), inf_corners.iter().map(|c| c.m).sum::<usize>()) {
            (1, 1) => FaceKind::HalfPlane,
            (2, 0) => FaceKind::Strip,
            _ => return Err(GraphError::FaceClassificationAmbiguous { face: fi }),
        };
        m_total += inf_corners.iter().map(|c| c.m).sum::<usize>();

        let contains = face_contains(graph, &hes, cycle, Complex64::new(0.0, 0.0));
        faces.push(Face {
            kind,
            boundary_edges: cycle.iter().map(|&h| hes[h].edge).collect(),
            zero_corners,
            inf_corners,
            contains_segment_midpoint: contains,
        });
    }

    if m_total != 5 {
        return Err(GraphError::EmbeddingInconsistent { v, e, f });
    }

    let half_planes = faces.iter().filter(|f| f.kind == FaceKind::HalfPlane).count();
    let strips = faces.iter().filter(|f| f.kind == FaceKind::Strip).count();
    Ok(DomainDecomposition {
        faces,
        half_planes,
        strips,
    })
}

/// Winding-number membership of `probe` in the closed boundary loop of a face,
/// with arcs at the escape radius closing the corners at infinity.
fn face_contains(
    graph: &StokesGraph,
    hes: &[HalfEdge],
    cycle: &[usize],
    probe: Complex64,
) -> bool {
    let mut boundary: Vec<Complex64> = Vec::new();
    for (pos, &h) in cycle.iter().enumerate() {
        let e = &graph.edges[hes[h].edge];
        let forward = hes[h].tail == Vertex::Zero(e.tail());
        if forward {
            boundary.extend(e.polyline.iter().copied());
        } else {
            boundary.extend(e.polyline.iter().rev().copied());
        }
        // Close a corner at infinity with a clockwise arc.
        if hes[h].head == Vertex::Inf {
            let h2 = cycle[(pos + 1) % cycle.len()];
            let a_in = wrap_angle(hes[hes[h].twin].key);
            let a_out = wrap_angle(hes[h2].key);
            let gap = wrap_angle(a_in - a_out);
            let r = boundary.last().map(|z| z.norm()).unwrap_or(30.0);
            let steps = 24;
            for i in 1..steps {
                let ang = a_in - gap * (i as f64 / steps as f64);
                boundary.push(Complex64::from_polar(r, ang));
            }
        }
    }
    // Winding number of the probe.
    let mut total = 0.0f64;
    let mut min_dist = f64::INFINITY;
    for i in 0..boundary.len() {
        let u = boundary[i] - probe;
        let w = boundary[(i + 1) % boundary.len()] - probe;
        min_dist = min_dist.min(u.norm());
        let cross = u.re * w.im - u.im * w.re;
        let dot = u.re * w.re + u.im * w.im;
        total += cross.atan2(dot);
    }
    if min_dist < 1e-6 {
        return false;
    }
    (total / (2.0 * PI)).round() as i64 != 0
}

/// Corner kinds for the cycle form of the residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleCorner {
    /// Corner at a simple zero; admissible angles are multiples of `pi/3`.
    SimpleZero,
    /// Corner at a regular point; admissible angles are multiples of `pi/2`.
    Regular,
}

const SNAP_TOL: f64 = 5.0 * PI / 180.0;

fn snap(measured: f64, grid: f64) -> Result<f64, GraphError> {
    let n = (measured / grid).round();
    let snapped = n * grid;
    if (measured - snapped).abs() > SNAP_TOL {
        return Err(GraphError::AngleSnapFailure { measured });
    }
    Ok(snapped)
}

/// Flat Gauss-Bonnet residual of a closed cycle described by its corners and the
/// total order of interior zeros:
/// `sum_j (1 - (n_j + 2) theta_j / (2 pi)) - 2 - interior_order_sum`.
/// The result is `0` exactly for boundaries of realisable flat domains.
pub fn teichmuller_residual_cycle(
    corners: &[(CycleCorner, f64)],
    interior_order_sum: usize,
) -> Result<f64, GraphError> {
    let mut total = 0.0;
    for &(kind, measured) in corners {
        match kind {
            CycleCorner::SimpleZero => {
                let theta = snap(measured, PI / 3.0)?;
                total += 1.0 - 3.0 * theta / (2.0 * PI);
            }
            CycleCorner::Regular => {
                let theta = snap(measured, PI / 2.0)?;
                total += 1.0 - theta / PI;
            }
        }
    }
    Ok(total - 2.0 - interior_order_sum as f64)
}

/// Residual of one face of a decomposition: corners at zeros snap to the
/// `pi/3` grid, corners at infinity contribute `1 + m` each. Faces of a genuine
/// Stokes graph come out exactly `0`.
pub fn teichmuller_residual_face(
    deco: &DomainDecomposition,
    face_idx: usize,
) -> Result<f64, GraphError> {
    let face = &deco.faces[face_idx];
    let mut total = 0.0;
    for &(_, measured) in &face.zero_corners {
        let theta = snap(measured, PI / 3.0)?;
        total += 1.0 - 3.0 * theta / (2.0 * PI);
    }
    for corner in &face.inf_corners {
        total += 1.0 + corner.m as f64;
    }
    Ok(total - 2.0)
}

/// Canonical signature of a Stokes graph: the sorted edge multiset plus the
/// strip count and tree flag. Two configurations in the same region of the
/// parameter disk share their signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSignature {
    /// Comma-joined sorted edge tokens, e.g. `+1~D0,-1~D1,a~+1,...`.
    pub canonical: String,
    pub strips: usize,
    /// Whether the shorts form the two-edge tree through all three zeros.
    pub tree: bool,
}

fn zero_token(z: ZeroId) -> &'static str {
    z.label()
}

fn token_rank(tok: &str) -> (u8, String) {
    match tok {
        "-1" => (0, String::new()),
        "+1" => (1, String::new()),
        "a" => (2, String::new()),
        other => (3, other.to_string()),
    }
}

fn edge_token(kind: &EdgeKind) -> String {
    match kind {
        EdgeKind::Infinite { origin, k } => {
            format!("{}~D{}", zero_token(*origin), k)
        }
        EdgeKind::Short { u, v } => {
            let (a, b) = (zero_token(*u), zero_token(*v));
            if token_rank(a) <= token_rank(b) {
                format!("{a}~{b}")
            } else {
                format!("{b}~{a}")
            }
        }
    }
}

impl GraphSignature {
    pub fn of(graph: &StokesGraph, deco: &DomainDecomposition) -> GraphSignature {
        let mut tokens: Vec<String> = graph.edges.iter().map(|e| edge_token(&e.kind)).collect();
        tokens.sort();
        GraphSignature {
            canonical: tokens.join(","),
            strips: deco.strips,
            tree: graph.n_shorts == 2,
        }
    }

    /// The image of the signature under a symmetry of the configuration space:
    /// optionally swap the fixed zeros `-1 <-> +1` and relabel the critical
    /// directions by `k -> k_map[k]`.
    pub fn relabeled(&self, swap_fixed_zeros: bool, k_map: [usize; 5]) -> GraphSignature {
        let map_label = |lab: &str| -> String {
            match lab {
                "-1" if swap_fixed_zeros => "+1".to_string(),
                "+1" if swap_fixed_zeros => "-1".to_string(),
                other => {
                    if let Some(k) = other.strip_prefix('D').and_then(|d| d.parse::<usize>().ok())
                    {
                        format!("D{}", k_map[k])
                    } else {
                        other.to_string()
                    }
                }
            }
        };
        let mut tokens: Vec<String> = self
            .canonical
            .split(',')
            .map(|tok| {
                let mut parts = tok.splitn(2, '~');
                let a = map_label(parts.next().unwrap());
                let b = map_label(parts.next().unwrap());
                if token_rank(&a) <= token_rank(&b) {
                    format!("{a}~{b}")
                } else {
                    format!("{b}~{a}")
                }
            })
            .collect();
        tokens.sort();
        GraphSignature {
            canonical: tokens.join(","),
            strips: self.strips,
            tree: self.tree,
        }
    }
}

/// A fully classified configuration.
#[derive(Debug, Clone)]
pub struct Classification {
    pub rays: RaySet,
    pub graph: StokesGraph,
    pub decomposition: DomainDecomposition,
    pub signature: GraphSignature,
}

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Trajectory(#[from] TrajectoryError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Trace, assemble, and decompose the configuration at `(a, theta)`.
/// Valid for any real `theta`; no normalisation is applied here.
pub fn classify(a: Complex64, theta: f64) -> Result<Classification, ClassifyError> {
    let rays = crate::trajectory::all_critical_rays(a, theta)?;
    let graph = assemble(a, theta, &rays)?;
    let decomposition = decompose(&graph)?;
    let signature = GraphSignature::of(&graph, &decomposition);
    Ok(Classification {
        rays,
        graph,
        decomposition,
        signature,
    })
}

/// Check that a ray's final position angle matches its claimed critical
/// direction within `tol` radians (diagnostic helper).
pub fn direction_deviation(theta: f64, terminal: &RayTerminal) -> Option<f64> {
    match terminal {
        RayTerminal::Infinity { k, angle } => {
            let d = wrap_angle((-2.0 * theta + (2.0 * *k as f64 + 1.0) * PI) / 5.0);
            Some(angle_dist(*angle, d))
        }
        RayTerminal::ZeroHit { .. } => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn generic_configuration_has_five_half_planes_and_two_strips() {
        let cls = classify(c(2.0, 1.0), 0.0).unwrap();
        assert_eq!(cls.decomposition.half_planes, 5);
        assert_eq!(cls.decomposition.strips, 2);
        assert_eq!(cls.decomposition.faces.len(), 7);
        assert!(!cls.signature.tree);
        assert_eq!(cls.signature.strips, 2);
    }

    #[test]
    fn one_short_gives_one_strip() {
        let cls = classify(c(-2.0, 0.0), 0.0).unwrap();
        assert_eq!(cls.graph.n_shorts, 1);
        assert_eq!(cls.decomposition.half_planes, 5);
        assert_eq!(cls.decomposition.strips, 1);
        assert!(cls.signature.canonical.contains("-1~+1"));
    }

    #[test]
    fn tree_configuration_has_no_strips() {
        let cls = classify(c(0.0, 0.46205279685408133), FRAC_PI_4).unwrap();
        assert_eq!(cls.graph.n_shorts, 2);
        assert_eq!(cls.decomposition.half_planes, 5);
        assert_eq!(cls.decomposition.strips, 0);
        assert!(cls.signature.tree);
    }

    #[test]
    fn face_residuals_vanish() {
        for (a, theta) in [
            (c(2.0, 1.0), 0.0),
            (c(-2.0, 0.0), 0.0),
            (c(0.0, 0.7), FRAC_PI_4),
        ] {
            let cls = classify(a, theta).unwrap();
            for i in 0..cls.decomposition.faces.len() {
                let r = teichmuller_residual_face(&cls.decomposition, i).unwrap();
                assert_eq!(r, 0.0, "face {i} of ({a}, {theta})");
            }
        }
    }

    #[test]
    fn cycle_residual_rejects_the_bigon_and_accepts_the_tree_cycle() {
        // A bigon bounded by two shorts with 120-degree corners at two simple
        // zeros encloses nothing: residual -2, an impossible domain.
        let bigon = [
            (CycleCorner::SimpleZero, 2.0 * PI / 3.0),
            (CycleCorner::SimpleZero, 2.0 * PI / 3.0),
        ];
        assert_eq!(teichmuller_residual_cycle(&bigon, 0).unwrap(), -2.0);

        // The cycle around the two shorts of a tree configuration, closed by
        // two infinite rays meeting at a cusp: pi/3 wedges at the outer zeros,
        // a flat 2 pi/3 pass at the middle zero, and a zero-angle cusp at a
        // regular point. Residual 0: realisable.
        let tree_cycle = [
            (CycleCorner::SimpleZero, PI / 3.0),
            (CycleCorner::SimpleZero, 2.0 * PI / 3.0),
            (CycleCorner::SimpleZero, PI / 3.0),
            (CycleCorner::Regular, 0.0),
        ];
        assert_eq!(teichmuller_residual_cycle(&tree_cycle, 0).unwrap(), 0.0);

        // Snapping rejects angles far off the grid.
        assert!(matches!(
            teichmuller_residual_cycle(&[(CycleCorner::SimpleZero, 0.4)], 0),
            Err(GraphError::AngleSnapFailure { .. })
        ));
    }

    #[test]
    fn signature_relabeling_acts_on_tokens() {
        let sig = GraphSignature {
            canonical: "-1~D0,+1~D3,a~D2".to_string(),
            strips: 2,
            tree: false,
        };
        let mapped = sig.relabeled(true, [3, 4, 0, 1, 2]);
        assert_eq!(mapped.canonical, "+1~D3,-1~D1,a~D0");
    }
}
