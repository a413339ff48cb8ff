//! Adaptive Gauss-Kronrod quadrature and branch-aware path integrals of `sqrt(p)`.
//!
//! Two layers live here:
//!
//! - [`integrate`], a plain adaptive 7-15 Gauss-Kronrod rule for complex-valued
//!   integrands of one real variable;
//! - [`integrate_sqrt_p`], which integrates the tracked square root of the cubic
//!   along a polyline. A segment endpoint on a simple zero of `p` is computed with
//!   the substitution `s = u^2`, which turns the square-root endpoint singularity
//!   into an analytic integrand, so the rule converges at full speed. An endpoint
//!   on a double zero (`a = -1` or `a = +1`) needs no substitution at all: there
//!   `sqrt(p) = (z - z0) sqrt(q)` with `q` regular, and the factor is pulled out
//!   explicitly instead.

use crate::cubic::{BranchError, CubicPolynomial};
use num_complex::Complex64;
use thiserror::Error;

/// Kronrod abscissae for the 7-15 pair (positive half, descending).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// Kronrod weights matching [`XGK`].
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Gauss weights for the embedded 7-point rule (nodes `XGK[1], XGK[3], XGK[5], XGK[7]`).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One 7-15 Gauss-Kronrod evaluation on `[lo, hi]`; returns `(kronrod, |kronrod - gauss|)`.
fn gk15<F: Fn(f64) -> Complex64>(f: &F, lo: f64, hi: f64) -> (Complex64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut kr = WGK[7] * fc;
    let mut gs = WG[3] * fc;
    for j in 0..7 {
        let fa = f(c - h * XGK[j]);
        let fb = f(c + h * XGK[j]);
        kr += WGK[j] * (fa + fb);
        if j % 2 == 1 {
            gs += WG[j / 2] * (fa + fb);
        }
    }
    (kr * h, ((kr - gs) * h).norm())
}

/// Adaptive bisection driver used by [`integrate`].
fn adapt<F: Fn(f64) -> Complex64>(
    f: &F,
    lo: f64,
    hi: f64,
    tol: f64,
    depth: u32,
    max_depth: u32,
) -> Result<(Complex64, f64), QuadError> {
    let (v, e) = gk15(f, lo, hi);
    if e <= tol || hi - lo < 1e-15 {
        return Ok((v, e));
    }
    if depth >= max_depth {
        return Err(QuadError::NonConvergence {
            interval: (lo, hi),
            error: e,
            tol,
        });
    }
    let mid = 0.5 * (lo + hi);
    let (va, ea) = adapt(f, lo, mid, 0.5 * tol, depth + 1, max_depth)?;
    let (vb, eb) = adapt(f, mid, hi, 0.5 * tol, depth + 1, max_depth)?;
    Ok((va + vb, ea + eb))
}

/// Errors from quadrature and path integration.
#[derive(Debug, Error)]
pub enum QuadError {
    /// The adaptive rule hit its recursion limit before reaching the tolerance.
    #[error("quadrature did not converge on [{:.6}, {:.6}]: err {error:.3e} > tol {tol:.3e}", interval.0, interval.1)]
    NonConvergence {
        interval: (f64, f64),
        error: f64,
        tol: f64,
    },

    /// Branch continuation failed along the path.
    #[error(transparent)]
    Branch(#[from] BranchError),

    /// A polyline vertex other than the first or last sits on a zero of `p`.
    #[error("interior path vertex {at} lies on a zero of p")]
    InteriorZero { at: Complex64 },
}

/// Adaptively integrate a complex-valued `f` over `[lo, hi]` to absolute tolerance `tol`.
///
/// Returns the value and an error estimate (sum of per-panel Kronrod-Gauss gaps).
pub fn integrate<F: Fn(f64) -> Complex64>(
    f: &F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<(Complex64, f64), QuadError> {
    if lo == hi {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    adapt(f, lo, hi, tol, 0, 28)
}

// ---------------------------------------------------------------------------
// Branch-resolved roots along a straight segment
// ---------------------------------------------------------------------------

/// Tolerance below which `sq` is considered to vanish while resolving a branch.
const SQ_COLLAPSE: f64 = 1e-18;

/// A branch choice of `+-sqrt(sq(s))` along `s in [0, 1]`, stored as knots dense
/// enough that nearest-candidate lookup between knots is unambiguous.
struct BranchLine {
    knots: Vec<(f64, Complex64)>,
}

impl BranchLine {
    /// Resolve the branch starting from `seed = sqrt(sq(0))` (either sign).
    /// `sq` must not vanish on the closed interval; `at` maps the parameter back
    /// to the plane for error reporting.
    fn build<G: Fn(f64) -> Complex64>(
        sq: &G,
        seed: Complex64,
        at: impl Fn(f64) -> Complex64,
    ) -> Result<Self, QuadError> {
        let mut knots = vec![(0.0, seed)];
        Self::refine(sq, 0.0, seed, 1.0, 0, &mut knots, &at)?;
        Ok(Self { knots })
    }

    fn refine<G: Fn(f64) -> Complex64>(
        sq: &G,
        s_lo: f64,
        r_lo: Complex64,
        s_hi: f64,
        depth: u32,
        knots: &mut Vec<(f64, Complex64)>,
        at: &impl Fn(f64) -> Complex64,
    ) -> Result<(), QuadError> {
        let r = sq(s_hi).sqrt();
        let pick = if (r - r_lo).norm() <= (-r - r_lo).norm() {
            r
        } else {
            -r
        };
        let scale = pick.norm().max(r_lo.norm());
        let jump = (pick - r_lo).norm();
        if scale * scale < SQ_COLLAPSE {
            return Err(BranchError::CriticalPointHit { at: at(s_hi) }.into());
        }
        // Accept when the root moved by well under a quarter turn, so the other
        // candidate is unambiguously worse for every parameter in between.
        if jump <= 0.35 * scale {
            knots.push((s_hi, pick));
            return Ok(());
        }
        if depth >= 48 {
            return Err(BranchError::BranchAmbiguity {
                near: jump,
                far: (pick + r_lo).norm(),
            }
            .into());
        }
        let mid = 0.5 * (s_lo + s_hi);
        Self::refine(sq, s_lo, r_lo, mid, depth + 1, knots, at)?;
        let r_mid = knots.last().unwrap().1;
        Self::refine(sq, mid, r_mid, s_hi, depth + 1, knots, at)
    }

    /// The resolved root at parameter `s`, via the nearest candidate to a linear
    /// interpolation of the bracketing knot roots.
    fn at<G: Fn(f64) -> Complex64>(&self, sq: &G, s: f64) -> Complex64 {
        let i = match self
            .knots
            .binary_search_by(|(k, _)| k.partial_cmp(&s).unwrap())
        {
            Ok(i) => return self.knots[i].1,
            Err(i) => i.min(self.knots.len() - 1),
        };
        let (s0, r0) = self.knots[i.saturating_sub(1)];
        let (s1, r1) = self.knots[i];
        let reference = if s1 > s0 {
            r0 + (r1 - r0) * ((s - s0) / (s1 - s0))
        } else {
            r0
        };
        let r = sq(s).sqrt();
        if (r - reference).norm() <= (-r - reference).norm() {
            r
        } else {
            -r
        }
    }

    fn end(&self) -> Complex64 {
        self.knots.last().unwrap().1
    }
}

// ---------------------------------------------------------------------------
// Path integral of sqrt(p)
// ---------------------------------------------------------------------------

/// Result of integrating the tracked `sqrt(p)` along a polyline.
#[derive(Debug, Clone, Copy)]
pub struct PathIntegral {
    /// `int sqrt(p(z)) dz` along the path, on the tracked branch.
    pub value: Complex64,
    /// Accumulated quadrature error estimate.
    pub abs_err: f64,
    /// The tracked root at the final vertex (zero if the path ends on a zero of `p`).
    pub end_root: Complex64,
}

/// How a segment endpoint sits relative to the zeros of `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum EndKind {
    Regular,
    SimpleZero,
    DoubleZero,
}

fn end_kind(p: &CubicPolynomial, z: Complex64) -> EndKind {
    if p.eval(z).norm() >= 1e-12 {
        EndKind::Regular
    } else if p.deriv(z).norm() >= 1e-6 {
        EndKind::SimpleZero
    } else {
        EndKind::DoubleZero
    }
}

/// Branch seed for one segment.
#[derive(Debug, Clone, Copy)]
enum Seed {
    /// Exact tracked root at the segment start (start is a regular point).
    Root(Complex64),
    /// Direction hint for the root just after a zero start.
    Hint(Complex64),
}

impl Seed {
    fn value(self) -> Complex64 {
        match self {
            Seed::Root(r) | Seed::Hint(r) => r,
        }
    }
}

fn nearest_sign(candidate: Complex64, target: Complex64) -> Complex64 {
    if (candidate - target).norm() <= (-candidate - target).norm() {
        candidate
    } else {
        -candidate
    }
}

struct SegOut {
    value: Complex64,
    abs_err: f64,
    /// Root at the segment end (zero when the end is on a zero of `p`).
    end_root: Complex64,
    /// Branch hint carried past a zero end (the nonvanishing factor there).
    hint_out: Complex64,
}

/// Integrate `sqrt(p)` over one straight segment `[z0, z1]`.
fn segment_integral(
    p: &CubicPolynomial,
    z0: Complex64,
    z1: Complex64,
    seed: Seed,
    tol: f64,
) -> Result<SegOut, QuadError> {
    let d = z1 - z0;
    let kind0 = end_kind(p, z0);
    let kind1 = end_kind(p, z1);

    if kind0 != EndKind::Regular && kind1 != EndKind::Regular {
        // Both endpoints singular: split at the midpoint, matching branches there.
        let mid = 0.5 * (z0 + z1);
        if end_kind(p, mid) != EndKind::Regular {
            return Err(QuadError::InteriorZero { at: mid });
        }
        let first = segment_integral(p, z0, mid, seed, 0.5 * tol)?;
        let second = segment_integral(p, mid, z1, Seed::Root(first.end_root), 0.5 * tol)?;
        return Ok(SegOut {
            value: first.value + second.value,
            abs_err: first.abs_err + second.abs_err,
            end_root: second.end_root,
            hint_out: second.hint_out,
        });
    }

    match (kind0, kind1) {
        (EndKind::Regular, EndKind::Regular) => {
            let sq = |s: f64| p.eval(z0 + d * s);
            let r0 = match seed {
                Seed::Root(r) => nearest_sign(p.eval(z0).sqrt(), r),
                Seed::Hint(h) => nearest_sign(p.eval(z0).sqrt(), h),
            };
            let line = BranchLine::build(&sq, r0, |s| z0 + d * s)?;
            let f = |s: f64| line.at(&sq, s) * d;
            let (v, e) = integrate(&f, 0.0, 1.0, tol)?;
            let end = line.end();
            Ok(SegOut {
                value: v,
                abs_err: e,
                end_root: end,
                hint_out: end,
            })
        }
        (EndKind::SimpleZero, EndKind::Regular) => {
            // z(u) = z0 + d u^2: sqrt(p) = u w(u), w^2 = d q, q = p / (z - z0).
            let sq = |u: f64| {
                let z = z0 + d * (u * u);
                let q = if u.abs() < 1e-9 {
                    p.deriv(z0)
                } else {
                    p.eval(z) / (z - z0)
                };
                d * q
            };
            let w0 = nearest_sign(sq(0.0).sqrt(), seed.value());
            let line = BranchLine::build(&sq, w0, |u| z0 + d * (u * u))?;
            let f = |u: f64| 2.0 * d * (u * u) * line.at(&sq, u);
            let (v, e) = integrate(&f, 0.0, 1.0, tol)?;
            let end = line.end(); // w(1) = sqrt(p)(z1) on the tracked branch
            Ok(SegOut {
                value: v,
                abs_err: e,
                end_root: end,
                hint_out: end,
            })
        }
        (EndKind::Regular, EndKind::SimpleZero) => {
            // z(u) = z1 + e u^2 with e = z0 - z1; u runs 1 -> 0 along the path.
            let e_dir = z0 - z1;
            let sq = |u: f64| {
                let z = z1 + e_dir * (u * u);
                let q = if u.abs() < 1e-9 {
                    p.deriv(z1)
                } else {
                    p.eval(z) / (z - z1)
                };
                e_dir * q
            };
            let r0 = nearest_sign(p.eval(z0).sqrt(), seed.value());
            // Resolve w from u = 1 (the regular end) downward: v = 1 - u.
            let sq_rev = |v: f64| sq(1.0 - v);
            let line = BranchLine::build(&sq_rev, r0, |v| {
                let u = 1.0 - v;
                z1 + e_dir * (u * u)
            })?;
            let f = |u: f64| -2.0 * e_dir * (u * u) * line.at(&sq_rev, 1.0 - u);
            let (v, e) = integrate(&f, 0.0, 1.0, tol)?;
            Ok(SegOut {
                value: v,
                abs_err: e,
                end_root: Complex64::new(0.0, 0.0),
                hint_out: line.end(),
            })
        }
        (EndKind::DoubleZero, EndKind::Regular) => {
            // sqrt(p) = (z - z0) v(z) with v^2 = q2 = p / (z - z0)^2, regular at z0.
            let sq = |s: f64| {
                let z = z0 + d * s;
                let w = z - z0;
                if s.abs() < 1e-9 {
                    // q2 at the double zero: p''(z0) / 2 = 3 z0 - a.
                    3.0 * z0 - p.a
                } else {
                    p.eval(z) / (w * w)
                }
            };
            let v0c = sq(0.0).sqrt();
            // The root grows like s d v(0): match that direction against the hint.
            let v0 = if (d * v0c - seed.value()).norm() <= (-d * v0c - seed.value()).norm() {
                v0c
            } else {
                -v0c
            };
            let line = BranchLine::build(&sq, v0, |s| z0 + d * s)?;
            let f = |s: f64| (d * s) * line.at(&sq, s) * d;
            let (v, e) = integrate(&f, 0.0, 1.0, tol)?;
            let end = d * line.end(); // (z1 - z0) v(1)
            Ok(SegOut {
                value: v,
                abs_err: e,
                end_root: end,
                hint_out: end,
            })
        }
        (EndKind::Regular, EndKind::DoubleZero) => {
            let sq = |s: f64| {
                let z = z0 + d * s;
                let w = z - z1;
                if (1.0 - s).abs() < 1e-9 {
                    3.0 * z1 - p.a
                } else {
                    p.eval(z) / (w * w)
                }
            };
            let r0 = nearest_sign(p.eval(z0).sqrt(), seed.value());
            let v0 = r0 / (z0 - z1);
            let line = BranchLine::build(&sq, v0, |s| z0 + d * s)?;
            let f = |s: f64| (z0 + d * s - z1) * line.at(&sq, s) * d;
            let (v, e) = integrate(&f, 0.0, 1.0, tol)?;
            Ok(SegOut {
                value: v,
                abs_err: e,
                end_root: Complex64::new(0.0, 0.0),
                hint_out: line.end(),
            })
        }
        _ => unreachable!("double-singular case handled above"),
    }
}

/// Integrate the branch-tracked `sqrt(p)` along the polyline `path`.
///
/// `seed` fixes the branch. When the path starts at a regular point it must be
/// (approximately) the chosen root of `p` there; when the path starts on a zero of
/// `p` the root vanishes and `seed` instead acts as a direction hint: the branch on
/// the first segment is the continuation whose launch direction is closer to it.
///
/// Segments with an endpoint on a zero are handled by explicit desingularisation,
/// so the quadrature sees only analytic integrands. A vertex on a zero anywhere
/// except the two path ends is an error. `tol` is the absolute quadrature target
/// per segment.
pub fn integrate_sqrt_p(
    p: &CubicPolynomial,
    path: &[Complex64],
    seed: Complex64,
    tol: f64,
) -> Result<PathIntegral, QuadError> {
    assert!(path.len() >= 2, "path needs at least two vertices");
    let n = path.len() - 1;
    let mut value = Complex64::new(0.0, 0.0);
    let mut abs_err = 0.0;
    let mut seed_next = if end_kind(p, path[0]) == EndKind::Regular {
        Seed::Root(seed)
    } else {
        Seed::Hint(seed)
    };
    let mut end_root = Complex64::new(0.0, 0.0);

    for (i, w) in path.windows(2).enumerate() {
        let (z0, z1) = (w[0], w[1]);
        if i > 0 && end_kind(p, z0) != EndKind::Regular {
            return Err(QuadError::InteriorZero { at: z0 });
        }
        if i < n - 1 && end_kind(p, z1) != EndKind::Regular {
            return Err(QuadError::InteriorZero { at: z1 });
        }
        let out = segment_integral(p, z0, z1, seed_next, tol)?;
        value += out.value;
        abs_err += out.abs_err;
        end_root = out.end_root;
        seed_next = Seed::Root(out.end_root);
    }

    Ok(PathIntegral {
        value,
        abs_err,
        end_root,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gk_handles_polynomials_exactly() {
        let f = |x: f64| c(x * x * x - 2.0 * x, 0.5 * x);
        let (v, _) = integrate(&f, -1.0, 3.0, 1e-12).unwrap();
        // Antiderivative: x^4/4 - x^2 + i x^2/4.
        assert_abs_diff_eq!(v.re, (81.0 / 4.0 - 9.0) - (0.25 - 1.0), epsilon = 1e-12);
        assert_abs_diff_eq!(v.im, 0.25 * (9.0 - 1.0), epsilon = 1e-12);
    }

    #[test]
    fn adaptive_reaches_tolerance_on_peaked_integrand() {
        let f = |x: f64| c(1.0 / (1e-4 + x * x), 0.0);
        let (v, _) = integrate(&f, -1.0, 1.0, 1e-10).unwrap();
        let exact = 2.0 * 1e2 * (1e2f64).atan();
        assert_abs_diff_eq!(v.re, exact, epsilon = 1e-7);
    }

    #[test]
    fn segment_between_two_simple_zeros_matches_midpoint_rule() {
        // a = 2: integrate sqrt((z-1)(z-2)(z+1)) from 1 to 2; both endpoints are
        // simple zeros of p. Reference: composite midpoint rule on the real form.
        let p = CubicPolynomial::new(c(2.0, 0.0));
        let path = [c(1.0, 0.0), c(2.0, 0.0)];
        // Branch hint: on (1, 2) the product is negative, pick +i sqrt(|p|).
        let out = integrate_sqrt_p(&p, &path, c(0.0, 1.0), 1e-12).unwrap();

        let n = 2_000_000;
        let h = 1.0 / n as f64;
        let mut acc = 0.0;
        for k in 0..n {
            let x = 1.0 + (k as f64 + 0.5) * h;
            acc += ((x - 1.0) * (2.0 - x) * (x + 1.0)).sqrt();
        }
        acc *= h;

        assert_abs_diff_eq!(out.value.im, acc, epsilon = 1e-8);
        assert!(out.value.re.abs() < 1e-10);
    }

    #[test]
    fn degenerate_segment_reproduces_the_closed_form() {
        // a = 1: p = (z-1)^2 (z+1), double zero at the far end. On [-1, 1] the
        // upper-edge branch is real and integrates to 16 sqrt(2) / 15.
        let p = CubicPolynomial::new(c(1.0, 0.0));
        let path = [c(-1.0, 0.0), c(1.0, 0.0)];
        let out = integrate_sqrt_p(&p, &path, c(1.0, 0.0), 1e-12).unwrap();
        let exact = 16.0 * 2.0f64.sqrt() / 15.0;
        assert_abs_diff_eq!(out.value.re.abs(), exact, epsilon = 1e-9);
        assert!(out.value.im.abs() < 1e-10);
    }

    #[test]
    fn path_integral_is_additive_over_subdivision() {
        let p = CubicPolynomial::new(c(0.3, 0.9));
        let seed = p.eval(c(2.0, 2.0)).sqrt();
        let whole = integrate_sqrt_p(&p, &[c(2.0, 2.0), c(-1.5, 2.0)], seed, 1e-12).unwrap();
        let split = integrate_sqrt_p(
            &p,
            &[c(2.0, 2.0), c(0.5, 2.0), c(-1.5, 2.0)],
            seed,
            1e-12,
        )
        .unwrap();
        assert!((whole.value - split.value).norm() < 1e-10);
        assert!((whole.end_root - split.end_root).norm() < 1e-10);
    }

    #[test]
    fn reversing_the_path_flips_the_sign() {
        let p = CubicPolynomial::new(c(0.3, 0.9));
        let seed = p.eval(c(2.0, 2.0)).sqrt();
        let fwd = integrate_sqrt_p(&p, &[c(2.0, 2.0), c(3.0, 1.0)], seed, 1e-12).unwrap();
        // Walk the same branch backwards: seed with the root the forward pass
        // ended on, so the two values cancel exactly.
        let bwd = integrate_sqrt_p(&p, &[c(3.0, 1.0), c(2.0, 2.0)], fwd.end_root, 1e-12).unwrap();
        assert!((fwd.value + bwd.value).norm() < 2e-10);
        assert!(fwd.value.norm() > 0.5, "integral should be nontrivial");
    }

    #[test]
    fn branch_seed_sign_flips_the_value() {
        let p = CubicPolynomial::new(c(0.3, 0.9));
        let seed = p.eval(c(2.0, 2.0)).sqrt();
        let plus = integrate_sqrt_p(&p, &[c(2.0, 2.0), c(3.0, 1.0)], seed, 1e-12).unwrap();
        let minus = integrate_sqrt_p(&p, &[c(2.0, 2.0), c(3.0, 1.0)], -seed, 1e-12).unwrap();
        assert!((plus.value + minus.value).norm() < 1e-12);
    }

    #[test]
    fn zero_start_segment_agrees_with_offset_regular_path() {
        // Integrating away from the zero +1 must agree with a path that starts a
        // tiny step off the zero; the missing piece is O(eps^{3/2}).
        let p = CubicPolynomial::new(c(0.0, 2.0));
        let from_zero =
            integrate_sqrt_p(&p, &[c(1.0, 0.0), c(1.0, 1.0)], c(1.0, 1.0), 1e-12).unwrap();
        let eps = 1e-6;
        let z_eps = c(1.0, eps);
        let r_eps = nearest_sign(p.eval(z_eps).sqrt(), from_zero.end_root);
        let tail = integrate_sqrt_p(&p, &[z_eps, c(1.0, 1.0)], r_eps, 1e-12).unwrap();
        assert!((from_zero.end_root - tail.end_root).norm() < 1e-9);
        assert!((from_zero.value - tail.value).norm() < 1e-8);
    }

    #[test]
    fn root_consistency_along_tracked_path() {
        let p = CubicPolynomial::new(c(0.5, 1.0));
        let path = [c(2.0, 0.5), c(1.8, 1.5), c(0.2, 2.0), c(-2.0, 1.0)];
        let seed = p.eval(path[0]).sqrt();
        let out = integrate_sqrt_p(&p, &path, seed, 1e-11).unwrap();
        let pv = p.eval(path[3]);
        assert!((out.end_root * out.end_root - pv).norm() <= 1e-10 * (1.0 + pv.norm()));
    }

    #[test]
    fn interior_zero_vertex_is_rejected() {
        let p = CubicPolynomial::new(c(0.0, 2.0));
        let path = [c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)];
        let err = integrate_sqrt_p(&p, &path, c(0.0, 1.0), 1e-10).unwrap_err();
        assert!(matches!(err, QuadError::InteriorZero { .. }));
    }
}
