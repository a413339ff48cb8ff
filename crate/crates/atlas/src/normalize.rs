//! Reduction of an arbitrary rotation to the fundamental interval `[0, pi/4]`.
//!
//! The differential depends on the rotation only through `e^{2 i theta}`, so
//! `theta` is first reduced modulo `pi` (each removed `pi` shifts every
//! critical-direction index by one). The remaining interval `[0, pi)` folds
//! into `[0, pi/4]` with the two configuration-space symmetries:
//!
//! * rotation: the structure at `(a, theta + pi/2)` equals the structure at
//!   `(-a, theta)` with the fixed zeros swapped and directions shifted by 3;
//! * reflection: the structure at `(-conj(a), pi/2 - theta)` equals the one at
//!   `(a, theta)` with the fixed zeros swapped and directions mapped by
//!   `k -> (2 - k) mod 5`.
//!
//! `normalize` returns the reduced parameters plus the relabeling that carries
//! signatures computed in the reduced frame back to the caller's frame.

use crate::records::Relabel;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use stokes_core::Complex64;

/// The (anti)linear map taking caller-frame parameters to the reduced frame:
/// `a_reduced = sign * a` or `sign * conj(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameMap {
    pub negate: bool,
    pub conjugate: bool,
}

impl FrameMap {
    pub const IDENTITY: FrameMap = FrameMap {
        negate: false,
        conjugate: false,
    };

    pub fn to_reduced(&self, a: Complex64) -> Complex64 {
        let a = if self.conjugate { a.conj() } else { a };
        if self.negate {
            -a
        } else {
            a
        }
    }

    /// Inverse map (the sign and the conjugation each square to the identity).
    pub fn to_caller(&self, a: Complex64) -> Complex64 {
        let a = if self.negate { -a } else { a };
        if self.conjugate {
            a.conj()
        } else {
            a
        }
    }
}

/// A caller-frame configuration expressed in the fundamental domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalized {
    /// Movable zero in the reduced frame.
    pub a: Complex64,
    /// Rotation in `[0, pi/4]`.
    pub theta: f64,
    /// Carries reduced-frame signatures back to the caller frame.
    pub relabel: Relabel,
    /// Caller-frame to reduced-frame coordinate map for the movable zero.
    pub frame: FrameMap,
}

/// Direction shift by `n` steps: `k -> (k + n) mod 5`.
fn shift(n: i64) -> [usize; 5] {
    let mut m = [0usize; 5];
    for (k, slot) in m.iter_mut().enumerate() {
        *slot = ((k as i64 + n).rem_euclid(5)) as usize;
    }
    m
}

const SYM_ROTATION: Relabel = Relabel {
    swap: true,
    k_map: [3, 4, 0, 1, 2],
};

const SYM_REFLECTION: Relabel = Relabel {
    swap: true,
    k_map: [2, 1, 0, 4, 3],
};

/// Reduce `(a, theta)` to the fundamental domain `theta in [0, pi/4]`.
pub fn normalize(a: Complex64, theta: f64) -> Normalized {
    // Step 1: theta modulo pi. Removing m half-turns shifts each direction
    // index by m, so the caller-frame signature is the reduced-frame signature
    // with `k -> k + m`.
    let theta_mod = theta.rem_euclid(PI);
    let m = ((theta - theta_mod) / PI).round() as i64;
    let mut relabel = Relabel {
        swap: false,
        k_map: shift(m),
    };
    let mut frame = FrameMap::IDENTITY;
    let mut a = a;
    let mut theta = theta_mod;

    // Step 2: fold (pi/2, pi) down by the quarter-turn rotation symmetry.
    if theta > FRAC_PI_2 {
        a = -a;
        theta -= FRAC_PI_2;
        relabel = relabel.then_inner(&SYM_ROTATION);
        frame.negate = !frame.negate;
    }

    // Step 3: fold (pi/4, pi/2] down by the reflection symmetry (an
    // involution, so the relabeling is its own inverse).
    if theta > FRAC_PI_4 {
        a = Complex64::new(-a.re, a.im);
        theta = FRAC_PI_2 - theta;
        relabel = relabel.then_inner(&SYM_REFLECTION);
        frame.negate = !frame.negate;
        frame.conjugate = !frame.conjugate;
    }

    Normalized {
        a,
        theta,
        relabel,
        frame,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fundamental_domain_is_untouched() {
        for &theta in &[0.0, 0.1, FRAC_PI_4] {
            let n = normalize(Complex64::new(0.5, 1.0), theta);
            assert_eq!(n.theta, theta);
            assert_eq!(n.a, Complex64::new(0.5, 1.0));
            assert!(n.relabel.is_identity());
        }
    }

    #[test]
    fn reduced_theta_always_lands_in_range() {
        for i in -40..80 {
            let theta = 0.11 * i as f64;
            let a = Complex64::new(1.3, -0.4);
            let n = normalize(a, theta);
            assert!(
                (0.0..=FRAC_PI_4 + 1e-15).contains(&n.theta),
                "theta {theta} reduced to {}",
                n.theta
            );
            assert_eq!(n.frame.to_reduced(a), n.a);
            assert_eq!(n.frame.to_caller(n.a), a);
        }
    }

    #[test]
    fn half_turn_shifts_directions_by_one() {
        let n = normalize(Complex64::new(2.0, 1.0), 0.2 + PI);
        assert!((n.theta - 0.2).abs() < 1e-15);
        assert_eq!(n.a, Complex64::new(2.0, 1.0));
        assert_eq!(n.relabel.k_map, [1, 2, 3, 4, 0]);
        assert!(!n.relabel.swap);
    }

    #[test]
    fn quarter_turn_uses_the_rotation_symmetry() {
        let n = normalize(Complex64::new(2.0, 1.0), 0.2 + FRAC_PI_2);
        assert!((n.theta - 0.2).abs() < 1e-15);
        assert_eq!(n.a, Complex64::new(-2.0, -1.0));
        assert_eq!(n.relabel, SYM_ROTATION);
    }

    #[test]
    fn reflection_window_uses_the_reflection_symmetry() {
        let n = normalize(Complex64::new(2.0, 1.0), FRAC_PI_2 - 0.2);
        assert!((n.theta - 0.2).abs() < 1e-15);
        assert_eq!(n.a, Complex64::new(-2.0, 1.0));
        assert_eq!(n.relabel, SYM_REFLECTION);
    }
}
