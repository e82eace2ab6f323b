//! The rationally extended trigonometric Scarf I model.
//!
//! Units follow `ħ = 2M = 1`; the energy scale is `ω = k²/4` and the
//! position domain is `|x| < π/(2k)`. Wavefunctions are evaluated through
//! `u = sin kx`, with the wall factors `1 ∓ u` computed from half-angle
//! identities so that they keep full relative precision near the walls.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use log::debug;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_pieces, QuadOptions};
use crate::specfun::ln_gamma;
use crate::xjacobi::{xm_eval, XmParams};

/// Potential and spectrum parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub xm: XmParams,
    pub omega: f64,
}

impl ModelParams {
    pub fn new(xm: XmParams, omega: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::Config(format!("omega must be positive, got {omega}")));
        }
        Ok(Self { xm, omega })
    }

    pub fn a(&self) -> f64 {
        self.xm.a
    }

    pub fn b(&self) -> f64 {
        self.xm.b
    }

    pub fn m(&self) -> usize {
        self.xm.m
    }

    /// `k = 2√ω`.
    pub fn k(&self) -> f64 {
        2.0 * self.omega.sqrt()
    }

    /// `Ω = (a+b+1)/2`.
    pub fn big_omega(&self) -> f64 {
        0.5 * (self.xm.a + self.xm.b + 1.0)
    }

    /// `Ω - m`, the shift that enters every label-space formula.
    pub fn shift(&self) -> f64 {
        self.big_omega() - self.xm.m as f64
    }

    /// Half-width `π/(2k)` of the position domain.
    pub fn half_width(&self) -> f64 {
        FRAC_PI_2 / self.k()
    }

    /// Dimensionless level `e_n = (2n-2m+a+b+1)²`.
    pub fn level(&self, n: usize) -> f64 {
        let v = 2.0 * (n as f64 - self.xm.m as f64) + self.xm.a + self.xm.b + 1.0;
        v * v
    }
}

/// One bound state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenState {
    pub n: usize,
    pub energy: f64,
    pub norm_const: f64,
}

impl EigenState {
    pub fn new(params: &ModelParams, n: usize) -> Result<Self> {
        Ok(Self {
            n,
            energy: energy(params, n)?,
            norm_const: norm_const(params, n)?,
        })
    }

    pub fn eval(&self, params: &ModelParams, x: f64) -> Result<f64> {
        let w = WallFactors::at(params, x)?;
        psi_from_factors(params, self.n, self.norm_const, &w)
    }

    /// Value at distance `delta` from a wall, accurate even when `delta` is
    /// far below the resolution of `x` near `±π/(2k)`.
    pub fn eval_near_wall(&self, params: &ModelParams, wall: Wall, delta: f64) -> Result<f64> {
        let w = WallFactors::near(params, wall, delta);
        psi_from_factors(params, self.n, self.norm_const, &w)
    }
}

/// `u = sin kx` and the wall factors `1 - u`, `1 + u`.
#[derive(Debug, Clone, Copy)]
struct WallFactors {
    u: f64,
    one_minus: f64,
    one_plus: f64,
}

/// Side of the domain a wall distance refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wall {
    Left,
    Right,
}

impl WallFactors {
    fn at(params: &ModelParams, x: f64) -> Result<Self> {
        let half = params.half_width();
        if !(x.abs() < half) {
            return Err(Error::Domain {
                function: "scarf",
                argument: x,
                expected: "|x| < π/(2k)",
            });
        }
        let theta = params.k() * x;
        let sm = (FRAC_PI_4 - 0.5 * theta).sin();
        let sp = (FRAC_PI_4 + 0.5 * theta).sin();
        Ok(Self {
            u: theta.sin(),
            one_minus: 2.0 * sm * sm,
            one_plus: 2.0 * sp * sp,
        })
    }

    /// Factors at distance `delta` from a wall.
    fn near(params: &ModelParams, wall: Wall, delta: f64) -> Self {
        let s = (0.5 * params.k() * delta).sin();
        let near = 2.0 * s * s;
        let far = 2.0 - near;
        let c = 1.0 - near; // cos(k δ)
        match wall {
            Wall::Right => Self {
                u: c,
                one_minus: near,
                one_plus: far,
            },
            Wall::Left => Self {
                u: -c,
                one_minus: far,
                one_plus: near,
            },
        }
    }
}

fn checked_denominator(xm: &XmParams, u: f64) -> Result<f64> {
    let d = xm.denominator(u);
    if d == 0.0 || !d.is_finite() {
        return Err(Error::Singular { u });
    }
    Ok(d)
}

fn psi_from_factors(params: &ModelParams, n: usize, norm: f64, w: &WallFactors) -> Result<f64> {
    let xm = &params.xm;
    let d = checked_denominator(xm, w.u)?;
    let envelope =
        w.one_minus.powf(0.5 * xm.a + 0.25) * w.one_plus.powf(0.5 * xm.b + 0.25);
    Ok(norm * envelope / d * xm_eval(n, xm, w.u)?)
}

/// The extended Scarf I potential `V^{(m)}(x)`.
pub fn potential(params: &ModelParams, x: f64) -> Result<f64> {
    let w = WallFactors::at(params, x)?;
    let ModelParams { xm, .. } = params;
    let (a, b, mf) = (xm.a, xm.b, xm.m as f64);
    let k2 = params.k().powi(2);
    let cos2 = w.one_minus * w.one_plus;
    let shift = a - b - mf + 1.0;
    let mut v = k2 * (2.0 * a * a + 2.0 * b * b - 1.0) / 4.0 / cos2
        - k2 * (b * b - a * a) / 2.0 * w.u / cos2
        - 2.0 * k2 * mf * shift;
    if xm.m > 0 {
        let r = xm.rational_numerator(w.u) / checked_denominator(xm, w.u)?;
        v += -k2 * shift * (a + b + (a - b + 1.0) * w.u) * r + k2 * shift * shift * cos2 / 2.0 * r * r;
    }
    Ok(v)
}

/// `E_n = ω (2n-2m+a+b+1)²`.
pub fn energy(params: &ModelParams, n: usize) -> Result<f64> {
    if n < params.m() {
        return Err(Error::IndexOutOfRange {
            n,
            min: params.m(),
        });
    }
    Ok(params.omega * params.level(n))
}

/// Accumulates `ln|factor|` and its sign, remembering negative factors.
struct SignedLog {
    ln: f64,
    sign: f64,
    negatives: Vec<String>,
}

impl SignedLog {
    fn new() -> Self {
        Self {
            ln: 0.0,
            sign: 1.0,
            negatives: Vec::new(),
        }
    }

    fn factor(&mut self, name: &str, value: f64, power: i32) -> Result<()> {
        if value == 0.0 {
            return Err(Error::Domain {
                function: "norm_const",
                argument: value,
                expected: "non-vanishing normalization factor",
            });
        }
        self.ln += power as f64 * value.abs().ln();
        if value < 0.0 && power % 2 != 0 {
            self.sign = -self.sign;
            self.negatives.push(format!("{name}={value}"));
        }
        Ok(())
    }

    fn gamma(&mut self, name: &str, arg: f64, power: i32) -> Result<()> {
        let (l, s) = ln_gamma(arg)?;
        self.ln += power as f64 * l;
        if s < 0.0 && power % 2 != 0 {
            self.sign = -self.sign;
            self.negatives.push(format!("{name}=Γ({arg})"));
        }
        Ok(())
    }

    fn sqrt(self, n: usize) -> Result<f64> {
        if self.sign < 0.0 {
            return Err(Error::NegativeRadicand {
                n,
                factors: self.negatives.join(", "),
            });
        }
        Ok((0.5 * self.ln).exp())
    }
}

/// Normalization constant `N_n^{(m)}` making `∫ψ_n² dx = 1`.
///
/// ```text
/// N² = k (2j+a+b+1)(j+a+1)² Γ(j+1) Γ(j+a+b+1)
///      / (2^{a+b+1} (j+a-m+1)(n+b) Γ(j+a+2) Γ(j+b)),   j = n - m
/// ```
///
/// For `m = 0` this is the classical Jacobi normalization. Evaluated in log
/// space with sign tracking.
pub fn norm_const(params: &ModelParams, n: usize) -> Result<f64> {
    let m = params.m();
    if n < m {
        return Err(Error::IndexOutOfRange { n, min: m });
    }
    let (a, b) = (params.a(), params.b());
    let j = (n - m) as f64;
    let mut acc = SignedLog::new();
    acc.factor("k", params.k(), 1)?;
    acc.factor("2j+a+b+1", 2.0 * j + a + b + 1.0, 1)?;
    acc.factor("j+a+1", j + a + 1.0, 2)?;
    acc.gamma("Γ(j+1)", j + 1.0, 1)?;
    acc.gamma("Γ(j+a+b+1)", j + a + b + 1.0, 1)?;
    acc.ln -= (a + b + 1.0) * std::f64::consts::LN_2;
    acc.factor("j+a-m+1", j + a - m as f64 + 1.0, -1)?;
    acc.factor("n+b", n as f64 + b, -1)?;
    acc.gamma("Γ(j+a+2)", j + a + 2.0, -1)?;
    acc.gamma("Γ(j+b)", j + b, -1)?;
    acc.sqrt(n)
}

/// The normalization constant with the Gamma factor `Γ(n+b+1)` in place of
/// `(n+b) Γ(j+b)`. Agrees with [`norm_const`] only for `m = 0`; kept for
/// comparison.
pub fn norm_const_as_printed(params: &ModelParams, n: usize) -> Result<f64> {
    let m = params.m();
    if n < m {
        return Err(Error::IndexOutOfRange { n, min: m });
    }
    let (a, b) = (params.a(), params.b());
    let nf = n as f64;
    let mf = m as f64;
    let mut acc = SignedLog::new();
    acc.factor("k", params.k(), 1)?;
    acc.factor("2n-2m+a+b+1", 2.0 * nf - 2.0 * mf + a + b + 1.0, 1)?;
    acc.factor("n-m+a+1", nf - mf + a + 1.0, 2)?;
    acc.gamma("Γ(n-m+1)", nf - mf + 1.0, 1)?;
    acc.gamma("Γ(n-m+a+b+1)", nf - mf + a + b + 1.0, 1)?;
    acc.ln -= (a + b + 1.0) * std::f64::consts::LN_2;
    acc.factor("n-2m+a+1", nf - 2.0 * mf + a + 1.0, -1)?;
    acc.gamma("Γ(n-m+a+2)", nf - mf + a + 2.0, -1)?;
    acc.gamma("Γ(n+b+1)", nf + b + 1.0, -1)?;
    acc.sqrt(n)
}

/// Normalized eigenfunction `ψ_n^{(m)}(x)`.
pub fn wavefunction(params: &ModelParams, n: usize, x: f64) -> Result<f64> {
    EigenState::new(params, n)?.eval(params, x)
}

/// Cut-off distance from a wall so that the neglected part of `∫ψ²` stays
/// below about 1e-13. Near the wall `ψ² ~ (kδ)^p`.
fn wall_cutoff(params: &ModelParams, p: f64) -> Result<f64> {
    if p <= -1.0 {
        return Err(Error::Domain {
            function: "domain_integral",
            argument: p,
            expected: "square-integrable wall exponent (> -1)",
        });
    }
    let eps = (1e-13 * (p + 1.0)).powf(1.0 / (p + 1.0)) / params.k();
    Ok(eps.min(1e-6 * params.half_width()))
}

/// Integrates `f(wall, δ)` over the whole domain, splitting it at the centre
/// and parameterizing each half by the distance `δ` to its wall.
///
/// The integrand is assumed to behave like a product of two eigenfunctions
/// near the walls, which fixes where the wall regions are cut off.
pub fn domain_integral<F>(params: &ModelParams, mut f: F) -> Result<f64>
where
    F: FnMut(Wall, f64) -> Result<f64>,
{
    let half = params.half_width();
    let opts = QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_intervals: 8000,
    };
    let mut total = 0.0;
    for (wall, p) in [
        (Wall::Left, 2.0 * params.b() + 1.0),
        (Wall::Right, 2.0 * params.a() + 1.0),
    ] {
        let eps = wall_cutoff(params, p)?;
        let breaks = [eps, 1e-3 * half, 0.05 * half, 0.25 * half, 0.6 * half, half];
        let mut failure = None;
        let r = integrate_pieces(
            |d| {
                f(wall, d).unwrap_or_else(|e| {
                    failure.get_or_insert(e);
                    0.0
                })
            },
            &breaks,
            opts,
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        total += r.value;
    }
    Ok(total)
}

/// `⟨ψ_n|ψ_l⟩` by adaptive quadrature.
pub fn overlap(params: &ModelParams, n: usize, l: usize) -> Result<f64> {
    let sn = EigenState::new(params, n)?;
    let sl = EigenState::new(params, l)?;
    domain_integral(params, |wall, d| {
        Ok(sn.eval_near_wall(params, wall, d)? * sl.eval_near_wall(params, wall, d)?)
    })
}

/// Gram matrix `G_{nl} = ⟨ψ_n|ψ_l⟩` for `n, l ∈ [first, first + size)`.
#[allow(clippy::needless_range_loop)]
pub fn orthonormality_matrix(params: &ModelParams, first: usize, size: usize) -> Result<Vec<Vec<f64>>> {
    let mut g = vec![vec![0.0; size]; size];
    for i in 0..size {
        for j in i..size {
            let v = overlap(params, first + i, first + j)?;
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    Ok(g)
}

/// Uniform grid over the central `fraction` of the domain.
pub fn interior_grid(params: &ModelParams, fraction: f64, points: usize) -> Vec<f64> {
    let half = params.half_width() * fraction;
    let step = 2.0 * half / (points - 1) as f64;
    (0..points).map(|i| -half + step * i as f64).collect()
}

/// Outcome of [`schrodinger_residual`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ResidualReport {
    /// `max |−ψ'' + Vψ − Eψ| / (|E| max|ψ|)` with stencil step equal to the
    /// grid spacing.
    pub residual: f64,
    /// Same quantity with half the stencil step.
    pub residual_half_step: f64,
    /// Set when halving the step reduces the residual by more than 4×, i.e.
    /// the measured residual is mostly finite-difference truncation.
    pub discretization_dominated: bool,
}

fn residual_with_step(params: &ModelParams, state: &EigenState, grid: &[f64], h: f64) -> Result<f64> {
    let psi = |x: f64| state.eval(params, x);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &x in grid {
        let p0 = psi(x)?;
        let d2 = (-psi(x + 2.0 * h)? + 16.0 * psi(x + h)? - 30.0 * p0 + 16.0 * psi(x - h)?
            - psi(x - 2.0 * h)?)
            / (12.0 * h * h);
        let r = -d2 + potential(params, x)? * p0 - state.energy * p0;
        worst = worst.max(r.abs());
        scale = scale.max(p0.abs());
    }
    Ok(worst / (state.energy.abs() * scale))
}

/// Maximum relative residual of the Schrödinger equation on an interior grid,
/// using a five-point second-difference stencil.
pub fn schrodinger_residual(params: &ModelParams, n: usize, grid: &[f64]) -> Result<ResidualReport> {
    if grid.len() < 200 {
        return Err(Error::Config(format!(
            "residual grid needs at least 200 points, got {}",
            grid.len()
        )));
    }
    let h = grid[1] - grid[0];
    let half = params.half_width();
    if grid.iter().any(|x| x.abs() + 2.0 * h >= half) {
        return Err(Error::Config("residual grid must lie strictly inside the domain".into()));
    }
    let state = EigenState::new(params, n)?;
    let residual = residual_with_step(params, &state, grid, h)?;
    let residual_half_step = residual_with_step(params, &state, grid, 0.5 * h)?;
    let discretization_dominated = residual_half_step < 0.25 * residual;
    if discretization_dominated {
        debug!(
            "residual for n={n} is dominated by discretization ({residual:e} -> {residual_half_step:e} at h/2); grid too coarse"
        );
    }
    Ok(ResidualReport {
        residual,
        residual_half_step,
        discretization_dominated,
    })
}
