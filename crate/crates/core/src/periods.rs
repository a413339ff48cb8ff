//! The three pinned period functions of the differential and their derivatives.
//!
//! For `p_a(z) = (z - a)(z^2 - 1)` the relevant periods are
//!
//! - `f_{+1,theta}(a) = i e^{i theta} (a-1)^2 I(a)`, with
//!   `I(a) = int_0^1 sqrt(t(1-t)) sqrt(t(a-1)+2) dt`,
//! - `f_{-1,theta}(a) = e^{i theta} (a+1)^2 J(a)`, with
//!   `J(a) = int_0^1 sqrt(t(1-t)) sqrt(2-t(a+1)) dt`,
//! - `f_theta(a) = e^{i theta} int_{-1}^{1} sqrt(1-t^2) sqrt(a-t) dt`,
//!
//! each with the principal branch of the inner square root, which pins the branch
//! of `int sqrt(p)` exactly once and for all. The cuts are `]-inf, -1]` for
//! `f_{+1}`, `[1, +inf[` for `f_{-1}`, and `[-1, 1]` for `f_theta`; on-cut
//! evaluation of `f_theta` for real `a < -1` deliberately lands on the upper edge
//! (see [`crate::canonical_upper`]).
//!
//! For `a` on the segment `[-1, 1]` the two one-sided limits of `f_theta` are
//! `e^{i theta} (R(a) +- i M(a))` with the real integrals `R`, `M` below.
//!
//! All integrals are pushed through trigonometric substitutions that absorb the
//! endpoint square-root singularities, so the adaptive Gauss-Kronrod rule sees
//! analytic integrands and converges at spectral speed for every admissible `a`.

use crate::quad::{integrate, QuadError};
use crate::{canonical_upper, Complex64};
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

/// Selects one of the two fixed zeros `+1`, `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// The zero as a real number.
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sign::Plus => write!(f, "+1"),
            Sign::Minus => write!(f, "-1"),
        }
    }
}

/// Which one-sided branch to use for `a` on the segment `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentSide {
    /// Limit from the upper half-plane.
    Plus,
    /// Limit from the lower half-plane.
    Minus,
    /// `a` off the segment: the single-valued function itself.
    OffSegment,
}

/// Errors from period evaluation.
#[derive(Debug, Error, PartialEq)]
pub enum PeriodError {
    /// `a` lies on the single-valuedness cut of the requested period.
    #[error("a = {a} lies on the cut of f_({which})")]
    OnCut { a: Complex64, which: Sign },

    /// `f_theta` was requested on `[-1, 1]`, where a one-sided branch is required.
    #[error("a = {a} is on [-1, 1]: a boundary side (+/-) is required")]
    BoundaryRequired { a: Complex64 },

    /// A one-sided branch was requested for `a` off the segment `[-1, 1]`.
    #[error("a = {a} is not on [-1, 1]: boundary sides only apply on the segment")]
    SideRequiresSegment { a: Complex64 },

    /// The quadrature failed to converge.
    #[error("period quadrature failed: {0}")]
    Quad(String),
}

impl From<QuadError> for PeriodError {
    fn from(e: QuadError) -> Self {
        PeriodError::Quad(e.to_string())
    }
}

/// Absolute quadrature target for the inner integrals. The full period then
/// carries an error of at most `|prefactor|` times this, which stays below the
/// `1e-8` level-set budget for `|a|` up to the world radius.
const QTOL: f64 = 1e-12;

#[inline]
fn phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

#[inline]
fn on_segment(a: Complex64) -> bool {
    a.im == 0.0 && (-1.0..=1.0).contains(&a.re)
}

/// `I(a)` after `t = sin^2 u`: `int_0^{pi/2} 2 sin^2 u cos^2 u sqrt(t(a-1)+2) du`.
fn integral_i(a: Complex64) -> Result<Complex64, PeriodError> {
    let am1 = a - 1.0;
    let f = |u: f64| {
        let (s, c) = u.sin_cos();
        let t = s * s;
        let w = canonical_upper(am1 * t + 2.0);
        2.0 * (s * s * c * c) * w.sqrt()
    };
    Ok(integrate(&f, 0.0, FRAC_PI_2, QTOL)?.0)
}

/// `I'(a) = int_0^1 sqrt(t(1-t)) t / (2 sqrt(t(a-1)+2)) dt`, same substitution.
fn integral_i_deriv(a: Complex64) -> Result<Complex64, PeriodError> {
    let am1 = a - 1.0;
    let f = |u: f64| {
        let (s, c) = u.sin_cos();
        let t = s * s;
        let w = canonical_upper(am1 * t + 2.0);
        2.0 * (s * s * c * c) * t / (2.0 * w.sqrt())
    };
    Ok(integrate(&f, 0.0, FRAC_PI_2, QTOL)?.0)
}

/// `J(a)`: as `I` but with `2 - t(a+1)` under the root.
fn integral_j(a: Complex64) -> Result<Complex64, PeriodError> {
    let ap1 = a + 1.0;
    let f = |u: f64| {
        let (s, c) = u.sin_cos();
        let t = s * s;
        let w = canonical_upper(-ap1 * t + 2.0);
        2.0 * (s * s * c * c) * w.sqrt()
    };
    Ok(integrate(&f, 0.0, FRAC_PI_2, QTOL)?.0)
}

fn integral_j_deriv(a: Complex64) -> Result<Complex64, PeriodError> {
    let ap1 = a + 1.0;
    let f = |u: f64| {
        let (s, c) = u.sin_cos();
        let t = s * s;
        let w = canonical_upper(-ap1 * t + 2.0);
        -2.0 * (s * s * c * c) * t / (2.0 * w.sqrt())
    };
    Ok(integrate(&f, 0.0, FRAC_PI_2, QTOL)?.0)
}

/// `K(a) = int_{-1}^1 sqrt(1-t^2) sqrt(a-t) dt` after `t = -cos v`.
fn integral_k(a: Complex64) -> Result<Complex64, PeriodError> {
    let f = |v: f64| {
        let s = v.sin();
        let w = canonical_upper(a + v.cos());
        (s * s) * w.sqrt()
    };
    Ok(integrate(&f, 0.0, PI, QTOL)?.0)
}

fn integral_k_deriv(a: Complex64) -> Result<Complex64, PeriodError> {
    let f = |v: f64| {
        let s = v.sin();
        let w = canonical_upper(a + v.cos());
        (s * s) / (2.0 * w.sqrt())
    };
    Ok(integrate(&f, 0.0, PI, QTOL)?.0)
}

fn check_cut(a: Complex64, which: Sign) -> Result<(), PeriodError> {
    let on_cut = match which {
        Sign::Plus => a.im == 0.0 && a.re <= -1.0,
        Sign::Minus => a.im == 0.0 && a.re >= 1.0,
    };
    if on_cut {
        Err(PeriodError::OnCut { a, which })
    } else {
        Ok(())
    }
}

/// The period pinned at the zero `which`:
/// `f_{+1,theta}(a) = i e^{i theta} (a-1)^2 I(a)` or
/// `f_{-1,theta}(a) = e^{i theta} (a+1)^2 J(a)`.
///
/// The cut of `f_{+1}` is `]-inf, -1]` and of `f_{-1}` is `[1, +inf[`; evaluation
/// there returns [`PeriodError::OnCut`]. At the pinning zero itself the value is
/// exactly `0` (`f_{+1,theta}(1) = 0`).
pub fn f_pm1(a: Complex64, theta: f64, which: Sign) -> Result<Complex64, PeriodError> {
    check_cut(a, which)?;
    match which {
        Sign::Plus => {
            let am1 = a - 1.0;
            Ok(Complex64::i() * phase(theta) * am1 * am1 * integral_i(a)?)
        }
        Sign::Minus => {
            let ap1 = a + 1.0;
            Ok(phase(theta) * ap1 * ap1 * integral_j(a)?)
        }
    }
}

/// Complex derivative `d/da` of [`f_pm1`], used for tangents and Newton steps.
pub fn f_pm1_deriv(a: Complex64, theta: f64, which: Sign) -> Result<Complex64, PeriodError> {
    check_cut(a, which)?;
    match which {
        Sign::Plus => {
            let am1 = a - 1.0;
            let i0 = integral_i(a)?;
            let i1 = integral_i_deriv(a)?;
            Ok(Complex64::i() * phase(theta) * (2.0 * am1 * i0 + am1 * am1 * i1))
        }
        Sign::Minus => {
            let ap1 = a + 1.0;
            let j0 = integral_j(a)?;
            let j1 = integral_j_deriv(a)?;
            Ok(phase(theta) * (2.0 * ap1 * j0 + ap1 * ap1 * j1))
        }
    }
}

/// `R(a) = int_{-1}^a sqrt((a-t)(1-t^2)) dt` for real `a` in `[-1, 1]`.
pub fn segment_r(a: f64) -> Result<f64, PeriodError> {
    let ap1 = a + 1.0;
    let f = |u: f64| {
        let (s, c) = u.sin_cos();
        let t = -1.0 + ap1 * (s * s);
        let rad = (2.0 - ap1 * (s * s)).max(0.0);
        debug_assert!(t <= 1.0 + 1e-12);
        Complex64::new(2.0 * ap1 * ap1 * (s * s * c * c) * rad.sqrt(), 0.0)
    };
    Ok(integrate(&f, 0.0, FRAC_PI_2, QTOL)?.0.re)
}

/// `M(a) = int_a^1 sqrt((t-a)(1-t^2)) dt` for real `a` in `[-1, 1]`.
pub fn segment_m(a: f64) -> Result<f64, PeriodError> {
    let am1 = 1.0 - a;
    let f = |u: f64| {
        let (s, c) = u.sin_cos();
        let t = a + am1 * (s * s);
        let rad = (1.0 + t).max(0.0);
        Complex64::new(2.0 * am1 * am1 * (s * s * c * c) * rad.sqrt(), 0.0)
    };
    Ok(integrate(&f, 0.0, FRAC_PI_2, QTOL)?.0.re)
}

/// The segment period `e^{i theta} int_{-1}^1 sqrt(p_a)` with branch selection.
///
/// - `OffSegment`: requires `a` off `[-1, 1]`; returns `f_theta(a)`.
/// - `Plus` / `Minus`: requires real `a` in `[-1, 1]`; returns the one-sided limit
///   `e^{i theta} (R(a) +- i M(a))`. The two sides are complex conjugates up to
///   the phase factor by construction.
pub fn f_segment(a: Complex64, theta: f64, side: SegmentSide) -> Result<Complex64, PeriodError> {
    match side {
        SegmentSide::OffSegment => {
            if on_segment(a) {
                return Err(PeriodError::BoundaryRequired { a });
            }
            Ok(phase(theta) * integral_k(a)?)
        }
        SegmentSide::Plus | SegmentSide::Minus => {
            if !on_segment(a) {
                return Err(PeriodError::SideRequiresSegment { a });
            }
            let r = segment_r(a.re)?;
            let m = segment_m(a.re)?;
            let inner = match side {
                SegmentSide::Plus => Complex64::new(r, m),
                _ => Complex64::new(r, -m),
            };
            Ok(phase(theta) * inner)
        }
    }
}

/// `f_theta(a)` for `a` off the segment (shorthand for the `OffSegment` side).
pub fn f_theta(a: Complex64, theta: f64) -> Result<Complex64, PeriodError> {
    f_segment(a, theta, SegmentSide::OffSegment)
}

/// Complex derivative of [`f_theta`].
pub fn f_theta_deriv(a: Complex64, theta: f64) -> Result<Complex64, PeriodError> {
    if on_segment(a) {
        return Err(PeriodError::BoundaryRequired { a });
    }
    Ok(phase(theta) * integral_k_deriv(a)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Shorthand: assert a complex value matches a reference to `eps`.
    fn close(v: Complex64, re: f64, im: f64, eps: f64) {
        assert!(
            (v - c(re, im)).norm() < eps,
            "got {v}, want {re}+{im}i (eps {eps})"
        );
    }

    // Reference values computed independently with 40-digit arithmetic from the
    // defining integrals; tolerances leave two orders of margin over QTOL.

    #[test]
    fn plus_period_reference_values() {
        close(
            f_pm1(c(2.0, 1.0), 0.0, Sign::Plus).unwrap(),
            -1.2471057475220721,
            -0.12066604417669559,
            1e-10,
        );
        close(
            f_pm1(c(0.5, 0.3), PI / 8.0, Sign::Plus).unwrap(),
            0.10629301153397589,
            0.14140966938594086,
            1e-10,
        );
    }

    #[test]
    fn minus_period_reference_values() {
        close(
            f_pm1(c(2.0, 1.0), 0.0, Sign::Minus).unwrap(),
            3.5219393886803818,
            0.67021028420885276,
            1e-10,
        );
        close(
            f_pm1(c(-0.3, 0.8), PI / 4.0, Sign::Minus).unwrap(),
            -0.41436067237459750,
            0.40473267857209502,
            1e-10,
        );
    }

    #[test]
    fn segment_period_reference_values() {
        close(
            f_theta(c(2.0, 1.0), 0.0).unwrap(),
            2.2748336411583097,
            0.54954424003215717,
            1e-10,
        );
        close(
            f_theta(c(0.0, 0.7), PI / 4.0).unwrap(),
            0.0,
            1.3811024763665075,
            1e-10,
        );
        // Real a < -1: the upper-edge convention (signed zero canonicalised).
        close(
            f_theta(c(-2.0, 0.0), 0.3).unwrap(),
            -0.65113318601522877,
            2.1049365757713398,
            1e-10,
        );
        close(
            f_theta(c(-2.0, 0.0), 0.0).unwrap(),
            0.0,
            2.2033457318247438,
            1e-10,
        );
    }

    #[test]
    fn derivative_reference_values() {
        close(
            f_pm1_deriv(c(2.0, 1.0), 0.0, Sign::Plus).unwrap(),
            -1.4867979489240098,
            1.1398637732547119,
            1e-9,
        );
        close(
            f_pm1_deriv(c(2.0, 1.0), 0.0, Sign::Minus).unwrap(),
            2.0014822059795176,
            -1.2701879582902940,
            1e-9,
        );
        close(
            f_theta_deriv(c(2.0, 1.0), 0.0).unwrap(),
            0.51468425705550779,
            -0.13032418503558213,
            1e-9,
        );
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let a = c(0.7, 1.3);
        let h = 1e-5;
        for which in [Sign::Plus, Sign::Minus] {
            let d = f_pm1_deriv(a, 0.4, which).unwrap();
            let num = (f_pm1(a + h, 0.4, which).unwrap() - f_pm1(a - h, 0.4, which).unwrap())
                / (2.0 * h);
            assert!((d - num).norm() < 1e-8, "{which}: {d} vs {num}");
        }
        let d = f_theta_deriv(a, 0.4).unwrap();
        let num = (f_theta(a + h, 0.4).unwrap() - f_theta(a - h, 0.4).unwrap()) / (2.0 * h);
        assert!((d - num).norm() < 1e-8);
    }

    #[test]
    fn pinned_zero_vanishes_quadratically() {
        assert_eq!(f_pm1(c(1.0, 0.0), 0.7, Sign::Plus).unwrap().norm(), 0.0);
        assert_eq!(f_pm1(c(-1.0, 0.0), 0.7, Sign::Minus).unwrap().norm(), 0.0);
        // Local model near a = 1: f ~ i e^{i theta} (sqrt(2) pi / 8)(a-1)^2.
        let eps = 1e-4;
        let a = c(1.0 + eps, 0.0);
        let f = f_pm1(a, 0.0, Sign::Plus).unwrap();
        let model = Complex64::i() * (2.0f64.sqrt() * PI / 8.0) * (eps * eps);
        assert!((f - model).norm() < 1e-11);
    }

    #[test]
    fn cut_rejections() {
        assert!(matches!(
            f_pm1(c(-1.0, 0.0), 0.0, Sign::Plus),
            Err(PeriodError::OnCut { .. })
        ));
        assert!(matches!(
            f_pm1(c(-3.5, 0.0), 0.2, Sign::Plus),
            Err(PeriodError::OnCut { .. })
        ));
        assert!(matches!(
            f_pm1(c(2.0, 0.0), 0.2, Sign::Minus),
            Err(PeriodError::OnCut { .. })
        ));
        assert!(matches!(
            f_theta(c(0.3, 0.0), 0.2),
            Err(PeriodError::BoundaryRequired { .. })
        ));
        assert!(matches!(
            f_segment(c(2.5, 0.0), 0.2, SegmentSide::Plus),
            Err(PeriodError::SideRequiresSegment { .. })
        ));
    }

    #[test]
    fn segment_sides_are_conjugate_and_match_references() {
        let r = segment_r(0.3).unwrap();
        let m = segment_m(0.3).unwrap();
        assert!((r - 0.76529907678259970).abs() < 1e-10);
        assert!((m - 0.24682121148742000).abs() < 1e-10);
        // R(1) is the closed-form constant 16 sqrt(2) / 15.
        assert!((segment_r(1.0).unwrap() - 16.0 * 2.0f64.sqrt() / 15.0).abs() < 1e-10);

        let plus = f_segment(c(0.3, 0.0), 0.4, SegmentSide::Plus).unwrap();
        let minus = f_segment(c(0.3, 0.0), 0.4, SegmentSide::Minus).unwrap();
        let ph = Complex64::from_polar(1.0, 0.4);
        assert!(((plus / ph).conj() - minus / ph).norm() < 1e-12);
    }

    #[test]
    fn rotation_identity_is_algebraically_exact() {
        // f_{-1, theta + pi/2}(-a) = f_{+1, theta}(a): both sides reduce to the
        // same inner integral, so they agree to rounding.
        for (a, theta) in [
            (c(0.4, 0.9), 0.2),
            (c(-1.7, 0.3), 0.6),
            (c(2.2, -1.1), 0.05),
        ] {
            let lhs = f_pm1(-a, theta + FRAC_PI_2, Sign::Minus).unwrap();
            let rhs = f_pm1(a, theta, Sign::Plus).unwrap();
            assert!((lhs - rhs).norm() < 1e-13 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn reflection_identity_holds() {
        // f_{-1, pi/2 - theta}(-conj a) = -conj(f_{+1, theta}(a)).
        for (a, theta) in [(c(0.4, 0.9), 0.2), (c(1.3, 2.4), 0.0), (c(-0.2, 0.5), 0.7)] {
            let lhs = f_pm1(-a.conj(), FRAC_PI_2 - theta, Sign::Minus).unwrap();
            let rhs = -f_pm1(a, theta, Sign::Plus).unwrap().conj();
            assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
        }
    }

    #[test]
    fn conjugation_at_theta_zero() {
        let a = c(0.8, 1.7);
        let f_up = f_pm1(a, 0.0, Sign::Plus).unwrap();
        let f_dn = f_pm1(a.conj(), 0.0, Sign::Plus).unwrap();
        // The i prefactor makes the plus period anti-conjugate in a.
        assert!((f_dn + f_up.conj()).norm() < 1e-12);
        let g_up = f_pm1(a, 0.0, Sign::Minus).unwrap();
        let g_dn = f_pm1(a.conj(), 0.0, Sign::Minus).unwrap();
        assert!((g_dn - g_up.conj()).norm() < 1e-12);
    }

    #[test]
    fn far_field_follows_the_five_halves_power_law() {
        // |f_{+1}| / |a|^{5/2} approaches 4/15, monotonically in |a| on a ray.
        let dir = Complex64::from_polar(1.0, 0.9);
        let mut prev_gap = f64::INFINITY;
        for r in [1e2, 1e3, 1e4] {
            let a = dir * r;
            let ratio = f_pm1(a, 0.3, Sign::Plus).unwrap().norm() / r.powf(2.5);
            let gap = (ratio - 4.0 / 15.0).abs();
            assert!(gap < prev_gap, "gap should shrink along the ray");
            prev_gap = gap;
        }
        assert!(prev_gap < 2e-2 * 4.0 / 15.0);
    }
}
