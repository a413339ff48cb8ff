//! The cubic `p_a(z) = (z - a)(z^2 - 1)` and branch-continuous square roots.
//!
//! `sqrt(p)` lives on a double cover branched over the three simple zeros, so a
//! plain principal square root is useless along paths: it jumps whenever the value
//! crosses the negative real axis. [`BranchTracker`] instead continues a chosen
//! root by nearest-candidate matching, and [`sqrt_p_tracked`] drives it along a
//! polyline with automatic refinement near the branch points.

use num_complex::Complex64;
use thiserror::Error;

/// Distance below which a path sample is considered to sit on a zero of `p`.
pub const ZERO_HIT_EPS: f64 = 1e-9;

/// Errors from branch continuation.
#[derive(Debug, Error, PartialEq)]
pub enum BranchError {
    /// The two square-root candidates are equally plausible continuations.
    ///
    /// The distances from the previous root to `+sqrt(p)` and `-sqrt(p)` differ by
    /// less than ten percent, which means the sampling is too coarse to decide.
    /// Callers respond by halving the step; [`sqrt_p_tracked`] does so internally.
    #[error("branch continuation ambiguous: candidate distances {near:.3e} and {far:.3e}")]
    BranchAmbiguity { near: f64, far: f64 },

    /// The path ran into a zero of `p`, where the two branches collide.
    #[error("path passes through a zero of p at {at}")]
    CriticalPointHit { at: Complex64 },

    /// The initial root does not square to `p` at the path start.
    #[error("seed root {seed} does not match p = {expected} at the path start")]
    SeedMismatch { seed: Complex64, expected: Complex64 },
}

/// The monic cubic `(z - a)(z - 1)(z + 1)` defining the differential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicPolynomial {
    /// The movable zero `a`.
    pub a: Complex64,
}

impl CubicPolynomial {
    pub fn new(a: Complex64) -> Self {
        Self { a }
    }

    /// `p_a(z) = (z - a)(z^2 - 1)`.
    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        (z - self.a) * (z * z - 1.0)
    }

    /// `p_a'(z) = 3z^2 - 2az - 1`.
    #[inline]
    pub fn deriv(&self, z: Complex64) -> Complex64 {
        3.0 * z * z - 2.0 * self.a * z - 1.0
    }

    /// The three zeros in the fixed order `[-1, +1, a]`.
    #[inline]
    pub fn zeros(&self) -> [Complex64; 3] {
        [
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
            self.a,
        ]
    }

    /// Index and distance of the zero closest to `z`.
    pub fn nearest_zero(&self, z: Complex64) -> (usize, f64) {
        let mut best = (0usize, f64::INFINITY);
        for (i, w) in self.zeros().iter().enumerate() {
            let d = (z - w).norm();
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// True when the three zeros are pairwise distinct.
    pub fn is_generic(&self) -> bool {
        (self.a - 1.0).norm() > 1e-12 && (self.a + 1.0).norm() > 1e-12
    }
}

/// Continues one branch of `sqrt(p)` along a sampled path.
#[derive(Debug, Clone, Copy)]
pub struct BranchTracker {
    current: Complex64,
}

impl BranchTracker {
    /// Start tracking from a nonzero seed root.
    pub fn new(seed: Complex64) -> Self {
        Self { current: seed }
    }

    /// The root at the most recent sample.
    #[inline]
    pub fn current(&self) -> Complex64 {
        self.current
    }

    /// Pick the continuation of the tracked branch among `{+r, -r}` where `r^2 = p`.
    ///
    /// Fails with [`BranchError::BranchAmbiguity`] when the sample spacing is too
    /// coarse for a safe decision, and with [`BranchError::CriticalPointHit`] when
    /// `p` vanishes at the sample.
    pub fn advance(&mut self, p_value: Complex64, at: Complex64) -> Result<Complex64, BranchError> {
        let r = p_value.sqrt();
        if r.norm() < ZERO_HIT_EPS.max(1e-9 * self.current.norm()) {
            return Err(BranchError::CriticalPointHit { at });
        }
        let d_plus = (r - self.current).norm();
        let d_minus = (-r - self.current).norm();
        let (near, far, pick) = if d_plus <= d_minus {
            (d_plus, d_minus, r)
        } else {
            (d_minus, d_plus, -r)
        };
        if far - near < 0.1 * (near + far) {
            return Err(BranchError::BranchAmbiguity { near, far });
        }
        self.current = pick;
        Ok(pick)
    }

    /// Like [`advance`](Self::advance) but never fails: always takes the nearer
    /// candidate. Safe only when the caller controls the sample spacing.
    pub fn advance_unchecked(&mut self, p_value: Complex64) -> Complex64 {
        let r = p_value.sqrt();
        let pick = if (r - self.current).norm() <= (-r - self.current).norm() {
            r
        } else {
            -r
        };
        self.current = pick;
        pick
    }
}

/// Track `sqrt(p)` along a polyline, returning the branch-continuous root at each vertex.
///
/// `seed` selects the branch at `path[0]`; it must square to `p(path[0])` up to a
/// relative tolerance of `1e-6`. Between consecutive vertices the tracker inserts
/// dyadic midpoints whenever the continuation would be ambiguous, so vertices may be
/// spaced arbitrarily as long as the polyline itself stays away from the zeros.
pub fn sqrt_p_tracked(
    p: &CubicPolynomial,
    path: &[Complex64],
    seed: Complex64,
) -> Result<Vec<Complex64>, BranchError> {
    assert!(!path.is_empty(), "path must contain at least one vertex");
    let p0 = p.eval(path[0]);
    if (seed * seed - p0).norm() > 1e-6 * (p0.norm() + seed.norm() * seed.norm()).max(1e-30) {
        return Err(BranchError::SeedMismatch {
            seed,
            expected: p0,
        });
    }
    let mut tracker = BranchTracker::new(seed);
    let mut out = Vec::with_capacity(path.len());
    out.push(seed);
    for window in path.windows(2) {
        let (z0, z1) = (window[0], window[1]);
        advance_segment(p, &mut tracker, z0, z1, 0)?;
        out.push(tracker.current());
    }
    Ok(out)
}

/// Continue the tracker from `z0` (where it is current) to `z1`, bisecting on ambiguity.
fn advance_segment(
    p: &CubicPolynomial,
    tracker: &mut BranchTracker,
    z0: Complex64,
    z1: Complex64,
    depth: u32,
) -> Result<(), BranchError> {
    let saved = *tracker;
    match tracker.advance(p.eval(z1), z1) {
        Ok(_) => Ok(()),
        Err(BranchError::BranchAmbiguity { .. }) if depth < 48 => {
            *tracker = saved;
            let mid = 0.5 * (z0 + z1);
            advance_segment(p, tracker, z0, mid, depth + 1)?;
            advance_segment(p, tracker, mid, z1, depth + 1)
        }
        Err(BranchError::BranchAmbiguity { near, far }) => {
            // Bisection has shrunk the segment to rounding scale. If the root
            // magnitude collapsed as well, the path runs through a zero of `p`;
            // report the hit instead of an unresolvable ambiguity.
            let (ra, rb) = (p.eval(z0).norm().sqrt(), p.eval(z1).norm().sqrt());
            let there = if ra <= rb { z0 } else { z1 };
            if ra.min(rb) < 1e-5 * (1.0 + tracker.current().norm()) {
                Err(BranchError::CriticalPointHit { at: there })
            } else {
                Err(BranchError::BranchAmbiguity { near, far })
            }
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_and_deriv_agree_with_product_rule() {
        let p = CubicPolynomial::new(c(0.3, 0.7));
        let z = c(1.4, -0.2);
        let h = 1e-6;
        let numeric = (p.eval(z + h) - p.eval(z - h)) / (2.0 * h);
        assert!((numeric - p.deriv(z)).norm() < 1e-7);
    }

    #[test]
    fn loop_around_one_zero_flips_the_branch() {
        // A closed loop encircling z = 1 once (and no other zero) must return the
        // opposite root: the cover is branched there.
        let p = CubicPolynomial::new(c(0.0, 2.0));
        let n = 200;
        let path: Vec<Complex64> = (0..=n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                c(1.0, 0.0) + 0.4 * c(t.cos(), t.sin())
            })
            .collect();
        let seed = p.eval(path[0]).sqrt();
        let roots = sqrt_p_tracked(&p, &path, seed).unwrap();
        let last = *roots.last().unwrap();
        assert!((last + seed).norm() < 1e-9, "expected sign flip, got {last}");
    }

    #[test]
    fn loop_around_no_zero_preserves_the_branch() {
        let p = CubicPolynomial::new(c(0.0, 2.0));
        let n = 200;
        let path: Vec<Complex64> = (0..=n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                c(4.0, -3.0) + 0.7 * c(t.cos(), t.sin())
            })
            .collect();
        let seed = -p.eval(path[0]).sqrt();
        let roots = sqrt_p_tracked(&p, &path, seed).unwrap();
        assert!((roots.last().unwrap() - seed).norm() < 1e-9);
    }

    #[test]
    fn coarse_sampling_is_refined_not_rejected() {
        // Only eight vertices around the loop: naive nearest-candidate matching
        // would be ambiguous, the tracker must subdivide internally.
        let p = CubicPolynomial::new(c(0.0, 2.0));
        let n = 8;
        let path: Vec<Complex64> = (0..=n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                c(1.0, 0.0) + 0.4 * c(t.cos(), t.sin())
            })
            .collect();
        let seed = p.eval(path[0]).sqrt();
        let roots = sqrt_p_tracked(&p, &path, seed).unwrap();
        assert!((roots.last().unwrap() + seed).norm() < 1e-9);
    }

    #[test]
    fn path_through_zero_is_reported() {
        let p = CubicPolynomial::new(c(0.0, 2.0));
        let path = vec![c(0.5, 0.0), c(1.0, 0.0), c(1.5, 0.0)];
        let seed = p.eval(path[0]).sqrt();
        let err = sqrt_p_tracked(&p, &path, seed).unwrap_err();
        assert!(matches!(err, BranchError::CriticalPointHit { .. }));
    }

    #[test]
    fn seed_must_square_to_p() {
        let p = CubicPolynomial::new(c(0.0, 2.0));
        let path = vec![c(3.0, 0.0), c(3.0, 1.0)];
        let err = sqrt_p_tracked(&p, &path, c(10.0, 10.0)).unwrap_err();
        assert!(matches!(err, BranchError::SeedMismatch { .. }));
    }
}
