//! Line-delimited scan records.
//!
//! One record per line, `key=value` fields separated by single spaces, complex
//! numbers split into two decimal fields with 12 significant digits. A record
//! that has been serialized once re-serializes byte-identically after parsing
//! (the 12-digit quantization is idempotent).

use std::fmt;
use std::str::FromStr;
use stokes_core::Complex64;
use thiserror::Error;

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed,
/// scientific notation outside `[1e-4, 1e12)`.
pub fn fmt_g12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    let s = if (-4..12).contains(&mag) {
        let dec = (11 - mag).max(0) as usize;
        format!("{x:.dec$}")
    } else {
        // {:.11e} prints a bare exponent (`1.5e-7`); keep it, trimming only
        // the mantissa.
        let s = format!("{x:.11e}");
        let (mant, exp) = s.split_once('e').expect("exponent in scientific form");
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        return format!("{mant}e{exp}");
    };
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Point-location verdict in the caller's frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Inside open region `K` of the normalized-frame region map.
    Region(usize),
    /// On the trimmed wall attached to the zero `+1`.
    OnSPlus1,
    /// On the wall attached to the zero `-1`.
    OnSMinus1,
    /// On the segment-period wall.
    OnSTheta,
    /// At the triple junction `t`.
    AtT,
    /// At the exceptional double-tree point `e`.
    AtE,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Region(k) => write!(f, "region:{k}"),
            Verdict::OnSPlus1 => write!(f, "on-s-plus1"),
            Verdict::OnSMinus1 => write!(f, "on-s-minus1"),
            Verdict::OnSTheta => write!(f, "on-s-theta"),
            Verdict::AtT => write!(f, "at-t"),
            Verdict::AtE => write!(f, "at-e"),
        }
    }
}

impl FromStr for Verdict {
    type Err = RecordParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(k) = s.strip_prefix("region:") {
            let k = k
                .parse::<usize>()
                .map_err(|_| RecordParseError::bad("verdict", s))?;
            return Ok(Verdict::Region(k));
        }
        match s {
            "on-s-plus1" => Ok(Verdict::OnSPlus1),
            "on-s-minus1" => Ok(Verdict::OnSMinus1),
            "on-s-theta" => Ok(Verdict::OnSTheta),
            "at-t" => Ok(Verdict::AtT),
            "at-e" => Ok(Verdict::AtE),
            _ => Err(RecordParseError::bad("verdict", s)),
        }
    }
}

/// Signature relabeling connecting the normalized frame back to the caller's
/// frame: an optional swap of the fixed zeros plus a permutation of the five
/// critical-direction indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Relabel {
    pub swap: bool,
    /// `k_map[k]` is the caller-frame index of normalized-frame direction `k`.
    pub k_map: [usize; 5],
}

impl Relabel {
    pub const IDENTITY: Relabel = Relabel {
        swap: false,
        k_map: [0, 1, 2, 3, 4],
    };

    pub fn is_identity(&self) -> bool {
        *self == Relabel::IDENTITY
    }

    /// Composition acting on signatures: `(self.then_inner(inner))(sig)` equals
    /// `self(inner(sig))`.
    pub fn then_inner(&self, inner: &Relabel) -> Relabel {
        let mut k_map = [0usize; 5];
        for k in 0..5 {
            k_map[k] = self.k_map[inner.k_map[k]];
        }
        Relabel {
            swap: self.swap ^ inner.swap,
            k_map,
        }
    }
}

impl fmt::Display for Relabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "none");
        }
        write!(f, "{}", if self.swap { 'S' } else { 'R' })?;
        for k in self.k_map {
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

impl FromStr for Relabel {
    type Err = RecordParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "none" {
            return Ok(Relabel::IDENTITY);
        }
        let bad = || RecordParseError::bad("relabel", s);
        let mut chars = s.chars();
        let swap = match chars.next() {
            Some('S') => true,
            Some('R') => false,
            _ => return Err(bad()),
        };
        let mut k_map = [0usize; 5];
        for slot in &mut k_map {
            let c = chars.next().ok_or_else(bad)?;
            let d = c.to_digit(10).ok_or_else(bad)? as usize;
            if d > 4 {
                return Err(bad());
            }
            *slot = d;
        }
        if chars.next().is_some() {
            return Err(bad());
        }
        Ok(Relabel { swap, k_map })
    }
}

/// One successfully classified parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    /// Rotation angle, caller frame.
    pub theta: f64,
    /// Movable zero, caller frame.
    pub a: Complex64,
    /// Canonical graph signature, caller frame.
    pub signature: String,
    /// Number of short trajectories.
    pub shorts: usize,
    /// Number of strip domains.
    pub strips: usize,
    /// Whether the shorts form the two-edge tree through all three zeros.
    pub tree: bool,
    /// Locate verdict, caller frame.
    pub verdict: Verdict,
    /// Relabeling used to express normalized-frame results in the caller frame.
    pub relabel: Relabel,
}

/// A parameter point whose classification failed; recorded, not fatal.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanFailure {
    pub theta: f64,
    pub a: Complex64,
    /// Error text, free-form (always the last field on the line).
    pub error: String,
}

/// A line of a scan stream.
#[derive(Debug, Clone, PartialEq)]
pub enum RecordLine {
    Ok(ScanRecord),
    Failed(ScanFailure),
}

impl fmt::Display for ScanRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "theta={} a_re={} a_im={} signature={} shorts={} strips={} tree={} verdict={} relabel={}",
            fmt_g12(self.theta),
            fmt_g12(self.a.re),
            fmt_g12(self.a.im),
            self.signature,
            self.shorts,
            self.strips,
            if self.tree { 1 } else { 0 },
            self.verdict,
            self.relabel,
        )
    }
}

impl fmt::Display for ScanFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "theta={} a_re={} a_im={} error={}",
            fmt_g12(self.theta),
            fmt_g12(self.a.re),
            fmt_g12(self.a.im),
            self.error,
        )
    }
}

impl fmt::Display for RecordLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecordLine::Ok(r) => r.fmt(f),
            RecordLine::Failed(r) => r.fmt(f),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RecordParseError {
    #[error("missing field `{0}`")]
    Missing(&'static str),
    #[error("malformed field `{field}`: `{value}`")]
    Malformed { field: &'static str, value: String },
    #[error("unexpected field `{0}`")]
    Unexpected(String),
}

impl RecordParseError {
    fn bad(field: &'static str, value: &str) -> Self {
        RecordParseError::Malformed {
            field,
            value: value.to_string(),
        }
    }
}

fn parse_f64(field: &'static str, value: &str) -> Result<f64, RecordParseError> {
    value
        .parse::<f64>()
        .map_err(|_| RecordParseError::bad(field, value))
}

impl FromStr for RecordLine {
    type Err = RecordParseError;

    fn from_str(line: &str) -> Result<Self, Self::Err> {
        let mut theta = None;
        let mut a_re = None;
        let mut a_im = None;
        let mut signature = None;
        let mut shorts = None;
        let mut strips = None;
        let mut tree = None;
        let mut verdict = None;
        let mut relabel = Relabel::IDENTITY;

        let mut rest = line.trim_end_matches('\n');
        while !rest.is_empty() {
            let rest_trim = rest.trim_start();
            let Some(eq) = rest_trim.find('=') else {
                return Err(RecordParseError::Unexpected(rest_trim.to_string()));
            };
            let key = &rest_trim[..eq];
            let after = &rest_trim[eq + 1..];
            // The error field is free-form and swallows the rest of the line.
            if key == "error" {
                return Ok(RecordLine::Failed(ScanFailure {
                    theta: theta.ok_or(RecordParseError::Missing("theta"))?,
                    a: Complex64::new(
                        a_re.ok_or(RecordParseError::Missing("a_re"))?,
                        a_im.ok_or(RecordParseError::Missing("a_im"))?,
                    ),
                    error: after.to_string(),
                }));
            }
            let (value, tail) = match after.find(' ') {
                Some(sp) => (&after[..sp], &after[sp + 1..]),
                None => (after, ""),
            };
            match key {
                "theta" => theta = Some(parse_f64("theta", value)?),
                "a_re" => a_re = Some(parse_f64("a_re", value)?),
                "a_im" => a_im = Some(parse_f64("a_im", value)?),
                "signature" => signature = Some(value.to_string()),
                "shorts" => {
                    shorts =
                        Some(value.parse::<usize>().map_err(|_| {
                            RecordParseError::bad("shorts", value)
                        })?)
                }
                "strips" => {
                    strips =
                        Some(value.parse::<usize>().map_err(|_| {
                            RecordParseError::bad("strips", value)
                        })?)
                }
                "tree" => {
                    tree = Some(match value {
                        "0" => false,
                        "1" => true,
                        _ => return Err(RecordParseError::bad("tree", value)),
                    })
                }
                "verdict" => verdict = Some(value.parse::<Verdict>()?),
                "relabel" => relabel = value.parse::<Relabel>()?,
                other => return Err(RecordParseError::Unexpected(other.to_string())),
            }
            rest = tail;
        }

        Ok(RecordLine::Ok(ScanRecord {
            theta: theta.ok_or(RecordParseError::Missing("theta"))?,
            a: Complex64::new(
                a_re.ok_or(RecordParseError::Missing("a_re"))?,
                a_im.ok_or(RecordParseError::Missing("a_im"))?,
            ),
            signature: signature.ok_or(RecordParseError::Missing("signature"))?,
            shorts: shorts.ok_or(RecordParseError::Missing("shorts"))?,
            strips: strips.ok_or(RecordParseError::Missing("strips"))?,
            tree: tree.ok_or(RecordParseError::Missing("tree"))?,
            verdict: verdict.ok_or(RecordParseError::Missing("verdict"))?,
            relabel,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g12_matches_printf_g_conventions() {
        assert_eq!(fmt_g12(0.0), "0");
        assert_eq!(fmt_g12(1.0), "1");
        assert_eq!(fmt_g12(-2.5), "-2.5");
        assert_eq!(fmt_g12(0.2318238045), "0.2318238045");
        assert_eq!(fmt_g12(16.0 * 2.0f64.sqrt() / 15.0), "1.50849446653");
        assert_eq!(fmt_g12(1e-7), "1e-7");
        assert_eq!(fmt_g12(-1.25e-9), "-1.25e-9");
        assert_eq!(fmt_g12(3.0e15), "3e15");
        assert_eq!(fmt_g12(123456789012.0), "123456789012");
    }

    #[test]
    fn g12_is_idempotent_under_reparse() {
        for &x in &[
            0.1234567890123456,
            -9.87654321e-5,
            1.0 / 3.0,
            2.0f64.sqrt() * 1e8,
            5.5e-17,
        ] {
            let once = fmt_g12(x);
            let back: f64 = once.parse().unwrap();
            assert_eq!(fmt_g12(back), once, "x = {x}");
        }
    }

    #[test]
    fn record_roundtrip_is_exact_after_first_serialization() {
        let rec = RecordLine::Ok(ScanRecord {
            theta: 0.7853981633974483,
            a: Complex64::new(-0.5000000000004321, 0.77),
            signature: "+1~D0,-1~D2,a~+1".to_string(),
            shorts: 1,
            strips: 1,
            tree: false,
            verdict: Verdict::OnSPlus1,
            relabel: Relabel {
                swap: true,
                k_map: [3, 4, 0, 1, 2],
            },
        });
        let line = rec.to_string();
        let parsed: RecordLine = line.parse().unwrap();
        assert_eq!(parsed.to_string(), line);
    }

    #[test]
    fn failure_lines_keep_free_form_error_text() {
        let fail = RecordLine::Failed(ScanFailure {
            theta: 0.0,
            a: Complex64::new(1.0, 1.0),
            error: "merge conflict: rays disagree near +1".to_string(),
        });
        let line = fail.to_string();
        let parsed: RecordLine = line.parse().unwrap();
        assert_eq!(parsed, fail);
        assert_eq!(parsed.to_string(), line);
    }

    #[test]
    fn relabel_composition_matches_sequential_application() {
        let r1 = Relabel {
            swap: true,
            k_map: [3, 4, 0, 1, 2],
        };
        let r2 = Relabel {
            swap: true,
            k_map: [2, 1, 0, 4, 3],
        };
        let composed = r1.then_inner(&r2);
        for k in 0..5 {
            assert_eq!(composed.k_map[k], r1.k_map[r2.k_map[k]]);
        }
        assert!(!composed.swap);
        assert_eq!("none".parse::<Relabel>().unwrap(), Relabel::IDENTITY);
        assert_eq!(r1.to_string().parse::<Relabel>().unwrap(), r1);
    }
}
