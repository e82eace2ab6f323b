//! Self-consistency suite run by the `verify` subcommand.
//!
//! Every check pairs two independent routes to one quantity, or tests a
//! quantity against a closed-form value, and reports the measured gap next to
//! its tolerance.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::config::RunConfig;
use crate::cwt::{
    analytic_grid, cwt_analytic, detect_fractional_revivals, harmonic_calibration, numeric_grid, relative_l2,
    shift_for, w_pq, w_pq_grid, DetectionPolicy, MorletParams,
};
use crate::error::Result;
use crate::gkcs::{
    direct_statistics, identity_element, mandel_q, mean_n, moment, norm_sq, norm_sq_direct, rho_n, weights,
    MomentTable,
};
use crate::revival::{sample_signal, Autocorrelation};
use crate::scarf::{interior_grid, orthonormality_matrix, schrodinger_residual, ModelParams};
use crate::specfun::jacobi_poly;
use crate::xjacobi::{xm_eval, XmParams};

/// Direction of the comparison between measured value and tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub bound: Bound,
}

impl Check {
    fn at_most(name: &str, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
            bound: Bound::AtMost,
        }
    }

    fn at_least(name: &str, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
            bound: Bound::AtLeast,
        }
    }

    fn from_result(name: &str, r: Result<Check>) -> Self {
        r.unwrap_or_else(|e| {
            log::error!("{name}: {e}");
            Self::at_most(name, f64::NAN, 0.0)
        })
    }

    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::AtMost => self.measured <= self.tolerance,
            Bound::AtLeast => self.measured >= self.tolerance,
        }
    }

    /// Factor by which the check clears its tolerance; below 1 means failure.
    pub fn margin(&self) -> f64 {
        match self.bound {
            Bound::AtMost if self.measured == 0.0 => f64::INFINITY,
            Bound::AtMost => self.tolerance / self.measured,
            Bound::AtLeast => self.measured / self.tolerance,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.bound {
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        };
        write!(
            f,
            "check={} measured={:.3e} bound={}{:.3e} margin={:.3e} verdict={}",
            self.name,
            self.measured,
            op,
            self.tolerance,
            self.margin(),
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Multiplies every upper-bound tolerance.
    pub tolerance_scale: f64,
    /// Perturbs one entry of the moment table so the recurrence check fails.
    pub corrupt_rho: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tolerance_scale: 1.0,
            corrupt_rho: false,
        }
    }
}

/// Parameters with every low-order moment convergent.
pub fn moment_reference() -> ModelParams {
    ModelParams::new(XmParams::with_override(4.5, 2.0, 3), 1.0).expect("positive frequency")
}

const ACTIONS: [f64; 4] = [1.0, 10.0, 40.0, 100.0];

fn rho_checks(model: &ModelParams, corrupt: bool) -> Result<Vec<Check>> {
    let mut table = MomentTable::new(model, 40)?;
    if corrupt {
        table.ln_rho[17] += 1e-6;
    }
    let rec = MomentTable::from_recurrence(model, 40);
    let closed_vs_product = table
        .ln_rho
        .iter()
        .zip(&rec.ln_rho)
        .map(|(a, b)| (a - b).abs() / b.abs().max(1.0))
        .fold(0.0, f64::max);
    Ok(vec![
        Check::at_most("rho_zero", (rho_n(model, 0)? - 1.0).abs(), 0.0),
        Check::at_most("rho_recurrence", table.recurrence_defect(model), 1e-12),
        Check::at_most("rho_closed_vs_product", closed_vs_product, 1e-12),
    ])
}

fn norm_dual_path(model: &ModelParams) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for j in ACTIONS {
        let (a, b) = (norm_sq(model, j)?, norm_sq_direct(model, j)?);
        worst = worst.max((a - b).abs() / a);
    }
    Ok(Check::at_most("norm_dual_path", worst, 1e-12))
}

fn weights_normalization(model: &ModelParams, n_trunc: usize) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for j in [0.5, 10.0, 100.0] {
        let w = weights(model, j, n_trunc)?;
        let total = w.total();
        worst = worst.max((total - 1.0).max(1.0 - w.tail_bound - total).max(0.0));
    }
    Ok(Check::at_most("weights_normalization", worst, 1e-13))
}

fn statistics_dual_path(model: &ModelParams) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for j in ACTIONS {
        let d = direct_statistics(model, j)?;
        let m1 = mean_n(model, j)?;
        let q = mandel_q(model, j)?;
        worst = worst
            .max((d.mean_n - m1).abs() / m1)
            .max((d.mandel_q - q).abs() / (1.0 + q.abs()));
    }
    Ok(Check::at_most("statistics_dual_path", worst, 1e-9))
}

/// Relative moment error over every convergent order `n <= 3` of `model`
/// and of the reference set.
fn moment_identity(model: &ModelParams) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for p in [*model, moment_reference()] {
        for n in 0..=3usize {
            if n as f64 + p.shift() <= -1.0 {
                continue;
            }
            let want = rho_n(&p, n)?;
            worst = worst
                .max((moment(&p, n)? - want).abs() / want)
                .max((identity_element(&p, n)? - 1.0).abs());
        }
    }
    Ok(Check::at_most("moment_identity", worst, 1e-7))
}

fn autocorr_dual_form(ac: &Autocorrelation) -> Check {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let span = 2.0 * ac.timescales.ratio;
    let worst = (1..=200)
        .map(|k| {
            let t = (k as f64 * golden).fract() * span;
            (ac.direct(t).norm_sqr() - ac.cauchy_sq(t)).abs()
        })
        .fold(0.0, f64::max);
    Check::at_most("autocorr_dual_form", worst, 1e-9)
}

fn revival_peak(ac: &Autocorrelation) -> Result<Check> {
    let ts = ac.timescales;
    let (lo, hi) = (0.9 * ts.t_rev, 1.1 * ts.t_rev);
    let n = ((hi - lo) / (ts.t_cl / 64.0)) as usize + 1;
    let sig = sample_signal(ac, lo, hi, n)?;
    let peak = sig.values.iter().copied().fold(0.0, f64::max);
    Ok(Check::at_least("revival_peak", peak, 0.9))
}

fn cwt_substitution(ac: &Autocorrelation, params: &MorletParams) -> Check {
    let ts = ac.timescales;
    let mut worst: f64 = 0.0;
    for p in 1..=4 {
        let (_, s) = harmonic_calibration(&ts, p, params);
        for q in 0..=8 {
            let a = w_pq(ac, p, q, params);
            let b = cwt_analytic(ac, s, shift_for(q, p, &ts), params);
            worst = worst.max((a - b).norm() / b.norm().max(1e-300));
        }
    }
    Check::at_most("cwt_substitution", worst, 1e-9)
}

fn cwt_dual_path(ac: &Autocorrelation, params: &MorletParams) -> Result<Check> {
    let ts = ac.timescales;
    let n = ((ts.t_rev + 2.0 * ts.t_cl) / (ts.t_cl / 32.0)) as usize + 1;
    let sig = sample_signal(ac, -ts.t_cl, ts.t_rev + ts.t_cl, n)?;
    let s: Vec<f64> = (0..10)
        .map(|i| params.omega0 * ts.t_cl / (2.0 * PI * (1.0 + i as f64 / 3.0)))
        .collect();
    let tau: Vec<f64> = (0..10).map(|i| ts.t_rev * i as f64 / 9.0).collect();
    let a = analytic_grid(ac, &s, &tau, params)?;
    let b = numeric_grid(&sig, &s, &tau, params)?;
    Ok(Check::at_most("cwt_dual_path", relative_l2(&b, &a), 1e-3))
}

/// 1 when the quarter revival is the strongest fraction strictly inside
/// `(0, 1/2)`, 0 otherwise.
fn quarter_revival_first(ac: &Autocorrelation, params: &MorletParams) -> Result<Check> {
    let grid = w_pq_grid(ac, 4, 8, params)?;
    let found = detect_fractional_revivals(&grid, &DetectionPolicy::default())?;
    let first = found.iter().find(|d| d.fraction() > 0.0 && d.fraction() < 0.5);
    let ok = first.is_some_and(|d| (d.numerator, d.denominator) == (1, 4));
    Ok(Check::at_least("quarter_revival_first", if ok { 1.0 } else { 0.0 }, 1.0))
}

fn schrodinger(model: &ModelParams) -> Result<Check> {
    let grid = interior_grid(model, 0.9, 2000);
    let mut worst: f64 = 0.0;
    for n in model.m()..=model.m() + 5 {
        worst = worst.max(schrodinger_residual(model, n, &grid)?.residual);
    }
    Ok(Check::at_most("schrodinger_residual", worst, 1e-5))
}

fn orthonormality(model: &ModelParams) -> Result<Check> {
    let g = orthonormality_matrix(model, model.m(), 9)?;
    let mut worst: f64 = 0.0;
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            worst = worst.max((v - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    Ok(Check::at_most("orthonormality", worst, 1e-7))
}

/// Largest gap between the `m = 0` exceptional polynomial and the classical
/// one, relative to the classical polynomial's maximum on the grid.
pub fn classical_reduction_gap(a: f64, b: f64, max_degree: usize) -> Result<f64> {
    let p = XmParams::with_override(a, b, 0);
    let grid: Vec<f64> = (0..=200).map(|i| -1.0 + i as f64 / 100.0).collect();
    let mut worst: f64 = 0.0;
    for n in 0..=max_degree {
        let cl: Vec<f64> = grid.iter().map(|&x| jacobi_poly(n, a, b, x)).collect();
        let sup = cl.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (&x, c) in grid.iter().zip(&cl) {
            worst = worst.max((xm_eval(n, &p, x)? - c).abs() / sup);
        }
    }
    Ok(worst)
}

fn classical_reduction(model: &ModelParams) -> Result<Check> {
    let gap = classical_reduction_gap(model.a(), model.b(), 15)?;
    Ok(Check::at_most("classical_reduction", gap, 1e-12))
}

fn timescale_ratio(ac: &Autocorrelation) -> Check {
    let ts = ac.timescales;
    let spread = 2.0 * ac.config.centre_offset();
    let gaps = [
        (ts.ratio - ts.t_rev / ts.t_cl).abs(),
        (ts.ratio - spread).abs() / spread,
    ];
    Check::at_most("timescale_ratio", gaps.into_iter().fold(0.0, f64::max), 1e-12)
}

/// Runs every check on the configured model and its first `J`.
pub fn run_suite(cfg: &RunConfig, opts: &VerifyOptions) -> Result<Vec<Check>> {
    let model = cfg.model()?;
    let ac = Autocorrelation::new(cfg.revival(cfg.j[0])?)?;
    let params = MorletParams::new(cfg.omega0())?;

    let mut checks = rho_checks(&model, opts.corrupt_rho)?;
    checks.push(Check::from_result("norm_dual_path", norm_dual_path(&model)));
    checks.push(Check::from_result(
        "weights_normalization",
        weights_normalization(&model, cfg.n_trunc),
    ));
    checks.push(Check::from_result("statistics_dual_path", statistics_dual_path(&model)));
    checks.push(Check::from_result("moment_identity", moment_identity(&model)));
    checks.push(autocorr_dual_form(&ac));
    checks.push(Check::from_result("revival_peak", revival_peak(&ac)));
    checks.push(cwt_substitution(&ac, &params));
    checks.push(Check::from_result("cwt_dual_path", cwt_dual_path(&ac, &params)));
    checks.push(Check::from_result("quarter_revival_first", quarter_revival_first(&ac, &params)));
    checks.push(Check::from_result("schrodinger_residual", schrodinger(&model)));
    checks.push(Check::from_result("orthonormality", orthonormality(&model)));
    checks.push(Check::from_result("classical_reduction", classical_reduction(&model)));
    checks.push(timescale_ratio(&ac));

    for c in &mut checks {
        if c.bound == Bound::AtMost {
            c.tolerance *= opts.tolerance_scale;
        }
    }
    Ok(checks)
}
