//! Geometry of the quadratic differential `-e^{2i theta} (z - a)(z^2 - 1) dz^2`.
//!
//! The crate is organised bottom-up:
//!
//! - [`cubic`]: the cubic `p_a(z) = (z - a)(z^2 - 1)`, its zeros, and branch-tracked
//!   square roots along paths.
//! - [`quad`]: adaptive Gauss-Kronrod quadrature and path integrals of `sqrt(p)`.
//! - [`periods`]: the three pinned period functions `f_{+1}`, `f_{-1}`, `f_theta`
//!   together with their derivatives and the two-sided segment period.
//! - [`levelset`]: predictor-corrector tracing of the level curves `Re f = 0` in the
//!   parameter plane, and the distinguished points `t_theta`, `e_theta`, `s_theta`.
//! - [`regions`]: the wall-and-chamber decomposition of the parameter disk cut by the
//!   trimmed level sets, with point location.
//! - [`trajectory`]: horizontal trajectories of the differential in the `z` plane,
//!   launched from the three simple zeros, with short-trajectory certification.
//! - [`graph`]: assembly of the critical graph, face decomposition into half planes
//!   and strips, and the flat Gauss-Bonnet (Teichmuller) residual.
//!
//! All floating point work is deterministic: no randomness, no time, no hashing of
//! addresses. Complex numbers are `num_complex::Complex64` throughout.

pub mod cubic;
pub mod graph;
pub mod levelset;
pub mod periods;
pub mod quad;
pub mod regions;
pub mod trajectory;

pub use num_complex::Complex64;

/// Normalise the imaginary part `-0.0` to `+0.0`.
///
/// The principal square root jumps across the negative real axis, and several period
/// integrands are evaluated exactly on it when the parameter is real. Canonicalising
/// the signed zero makes every on-axis evaluation take the upper edge of the cut, so
/// results do not depend on how a caller happened to produce an imaginary part of zero.
#[inline]
pub fn canonical_upper(z: Complex64) -> Complex64 {
    if z.im == 0.0 {
        Complex64::new(z.re, 0.0)
    } else {
        z
    }
}

/// Principal square root after signed-zero canonicalisation.
#[inline]
pub fn sqrt_upper(z: Complex64) -> Complex64 {
    canonical_upper(z).sqrt()
}

/// Wrap an angle to the half-open interval `[0, 2*pi)`.
#[inline]
pub fn wrap_angle(phi: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut r = phi % two_pi;
    if r < 0.0 {
        r += two_pi;
    }
    if r >= two_pi {
        r = 0.0;
    }
    r
}

/// Absolute difference of two angles on the circle, in `[0, pi]`.
#[inline]
pub fn angle_dist(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(std::f64::consts::TAU - d)
}
