//! Exceptional `X_m` Jacobi polynomials and the admissibility conditions on
//! `(a, b, m)`.
//!
//! The polynomial of index `n = m + j` is a two-term combination of classical
//! Jacobi polynomials,
//!
//! ```text
//! 𝒫_n(x) = (-1)^m [ (a+b+j+1)/(2(a+j+1)) (x-1) P_m^{(-a-1,b-1)} P_{j-1}^{(a+2,b)}
//!                 + (a-m+1)/(a+j+1)           P_m^{(-a-2,b)}   P_j^{(a+1,b-1)} ]
//! ```
//!
//! with the convention `P_{-1} ≡ 0` so that the ground state `j = 0` is
//! well defined. The family is orthogonal on `[-1, 1]` with respect to
//! `(1-x)^a (1+x)^b / P_m^{(-a-1,b-1)}(x)^2`.

use std::fmt;

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::specfun::{jacobi_poly, jacobi_poly_signed};

/// Samples used by [`denominator_zero_scan`] by default.
pub const ZERO_SCAN_POINTS: usize = 2048;
/// Bracket width at which sign-change bisection stops.
pub const ZERO_SCAN_TOL: f64 = 1e-10;

const INTEGER_EPS: f64 = 1e-12;

/// Which of the two admissible parameter regions holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// `-1 < b < 0` and `m-2 < a < m-1`.
    NegativeB,
    /// `b > 0` and `a > m-1`.
    PositiveB,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::NegativeB => write!(f, "(i) -1<b<0, m-2<a<m-1"),
            Branch::PositiveB => write!(f, "(ii) b>0, a>m-1"),
        }
    }
}

/// One violated admissibility clause.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    BIsZero,
    /// `a` equals an integer in `{0, …, m-1}`.
    AInExcludedSet(usize),
    /// `a-b-m+1` equals an integer in `{0, …, m-1}`.
    ShiftInExcludedSet(usize),
    ANotAboveMMinusTwo { a: f64, bound: f64 },
    SignMismatch { sign_a_shift: f64, sign_b: f64 },
    BNotAboveMinusOne(f64),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BIsZero => write!(f, "b = 0"),
            Violation::AInExcludedSet(k) => write!(f, "a = {k} lies in {{0,…,m-1}}"),
            Violation::ShiftInExcludedSet(k) => write!(f, "a-b-m+1 = {k} lies in {{0,…,m-1}}"),
            Violation::ANotAboveMMinusTwo { a, bound } => write!(f, "a = {a} is not > m-2 = {bound}"),
            Violation::SignMismatch {
                sign_a_shift,
                sign_b,
            } => write!(f, "sgn(a-m+1) = {sign_a_shift} differs from sgn(b) = {sign_b}"),
            Violation::BNotAboveMinusOne(b) => write!(f, "b = {b} is not > -1"),
        }
    }
}

/// Result of [`validate`]; never an error by itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub branch: Option<Branch>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn describe(&self) -> String {
        if self.valid {
            format!("valid, branch {}", self.branch.expect("valid implies branch"))
        } else {
            self.violations
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; ")
        }
    }
}

fn integer_in_range(x: f64, m: usize) -> Option<usize> {
    let r = x.round();
    if (x - r).abs() < INTEGER_EPS && r >= 0.0 && (r as usize) < m {
        Some(r as usize)
    } else {
        None
    }
}

/// Checks `(a, b, m)` against every admissibility clause and reports all
/// violations at once.
pub fn validate(a: f64, b: f64, m: usize) -> ValidationReport {
    let mf = m as f64;
    let mut violations = Vec::new();
    if b == 0.0 {
        violations.push(Violation::BIsZero);
    }
    if let Some(k) = integer_in_range(a, m) {
        violations.push(Violation::AInExcludedSet(k));
    }
    if let Some(k) = integer_in_range(a - b - mf + 1.0, m) {
        violations.push(Violation::ShiftInExcludedSet(k));
    }
    if !(a > mf - 2.0) {
        violations.push(Violation::ANotAboveMMinusTwo { a, bound: mf - 2.0 });
    }
    let sa = (a - mf + 1.0).signum();
    let sb = b.signum();
    if b != 0.0 && (a - mf + 1.0 == 0.0 || sa != sb) {
        violations.push(Violation::SignMismatch {
            sign_a_shift: if a - mf + 1.0 == 0.0 { 0.0 } else { sa },
            sign_b: sb,
        });
    }
    if b < 0.0 && !(b > -1.0) {
        violations.push(Violation::BNotAboveMinusOne(b));
    }

    let branch = if b > 0.0 && a > mf - 1.0 {
        Some(Branch::PositiveB)
    } else if b < 0.0 && b > -1.0 && a > mf - 2.0 && a < mf - 1.0 {
        Some(Branch::NegativeB)
    } else {
        None
    };
    ValidationReport {
        valid: violations.is_empty(),
        branch,
        violations,
    }
}

/// Parameters `(a, b, m)` of the exceptional family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XmParams {
    pub a: f64,
    pub b: f64,
    pub m: usize,
    /// Set when the parameters fail [`validate`] and were accepted anyway.
    pub overridden: bool,
}

impl XmParams {
    /// Validated constructor.
    pub fn new(a: f64, b: f64, m: usize) -> Result<Self> {
        let report = validate(a, b, m);
        if !report.valid {
            return Err(Error::InvalidParameters {
                a,
                b,
                m,
                violations: report.describe(),
            });
        }
        Ok(Self {
            a,
            b,
            m,
            overridden: false,
        })
    }

    /// Accepts inadmissible parameters, logging every violated clause.
    pub fn with_override(a: f64, b: f64, m: usize) -> Self {
        let report = validate(a, b, m);
        if !report.valid {
            warn!(
                "accepting inadmissible parameters (a={a}, b={b}, m={m}): {}",
                report.describe()
            );
        }
        Self {
            a,
            b,
            m,
            overridden: !report.valid,
        }
    }

    /// Constructor honoring an explicit `allow_invalid` flag.
    pub fn build(a: f64, b: f64, m: usize, allow_invalid: bool) -> Result<Self> {
        if allow_invalid {
            Ok(Self::with_override(a, b, m))
        } else {
            Self::new(a, b, m)
        }
    }

    pub fn report(&self) -> ValidationReport {
        validate(self.a, self.b, self.m)
    }

    /// `P_m^{(-a-1,b-1)}(x)`, the weight denominator.
    pub fn denominator(&self, x: f64) -> f64 {
        jacobi_poly(self.m, -self.a - 1.0, self.b - 1.0, x)
    }

    /// `P_{m-1}^{(-a,b)}(x)`, appearing in the rational part of the potential.
    pub fn rational_numerator(&self, x: f64) -> f64 {
        jacobi_poly_signed(self.m as i64 - 1, -self.a, self.b, x)
    }
}

/// Evaluates `𝒫_n^{(a,b,m)}(x)`.
pub fn xm_eval(n: usize, params: &XmParams, x: f64) -> Result<f64> {
    let XmParams { a, b, m, .. } = *params;
    if n < m {
        return Err(Error::IndexOutOfRange { n, min: m });
    }
    let j = n - m;
    let jf = j as f64;
    let mf = m as f64;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let first = (a + b + jf + 1.0) / (2.0 * (a + jf + 1.0))
        * (x - 1.0)
        * jacobi_poly(m, -a - 1.0, b - 1.0, x)
        * jacobi_poly_signed(j as i64 - 1, a + 2.0, b, x);
    let second = (a - mf + 1.0) / (a + jf + 1.0)
        * jacobi_poly(m, -a - 2.0, b, x)
        * jacobi_poly(j, a + 1.0, b - 1.0, x);
    Ok(sign * (first + second))
}

/// Brackets the interior zeros of `P_m^{(-a-1,b-1)}` on `(-1, 1)`.
///
/// Returns an empty list for admissible parameters. Each bracket is refined
/// by bisection until narrower than [`ZERO_SCAN_TOL`].
pub fn denominator_zero_scan(params: &XmParams, grid_points: usize) -> Vec<(f64, f64)> {
    let grid_points = grid_points.max(100);
    if params.m == 0 {
        return Vec::new();
    }
    let f = |x: f64| params.denominator(x);
    let h = 2.0 / grid_points as f64;
    let xs: Vec<f64> = (0..=grid_points)
        .map(|i| (-1.0 + i as f64 * h).clamp(-1.0 + 1e-14, 1.0 - 1e-14))
        .collect();
    let mut out = Vec::new();
    let mut prev_x = xs[0];
    let mut prev_f = f(prev_x);
    for &x in &xs[1..] {
        let fx = f(x);
        if fx == 0.0 {
            out.push((x, x));
        } else if prev_f != 0.0 && prev_f.signum() != fx.signum() {
            let (mut lo, mut hi, mut flo) = (prev_x, x, prev_f);
            while hi - lo > ZERO_SCAN_TOL {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            out.push((lo, hi));
        }
        prev_x = x;
        prev_f = fx;
    }
    out
}
