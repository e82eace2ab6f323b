//! Gazeau–Klauder coherent states built on the extended Scarf I spectrum.
//!
//! Label-space quantities use the index `n = 0, 1, 2, …` with the dimensionless
//! levels `e_n = (2n-2m+a+b+1)² = 4(n+s)²`, where `s = Ω - m` is
//! [`ModelParams::shift`]. The moments are `ρ_n = Π_{i≤n} e_i`, the squared
//! normalization is `N²(J) = ₁F₂(1; 1+s, 1+s; J/4)` and the photon-number
//! weights are `|c_n|² = Jⁿ / (N²(J) ρ_n)`.
//!
//! Spatial synthesis only includes `n ≥ m`, the indices for which an
//! eigenfunction exists.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_pieces, QuadOptions};
use crate::scarf::{domain_integral, EigenState, ModelParams, Wall};
use crate::specfun::{bessel_k0, hyper_1f2, hyper_2f3, ln_gamma};

/// Default truncation used by the figure presets.
pub const DEFAULT_N_TRUNC: usize = 50;

/// Largest tail bound accepted by [`weights`].
pub const TAIL_LIMIT: f64 = 1e-10;

/// `ln ρ_n` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentTable {
    pub ln_rho: Vec<f64>,
}

impl MomentTable {
    /// Closed form `ρ_n = (2ⁿ Γ(n+1+s) / Γ(1+s))²`.
    pub fn new(model: &ModelParams, n_max: usize) -> Result<Self> {
        let ln_rho = (0..=n_max).map(|n| ln_rho(model, n)).collect::<Result<_>>()?;
        Ok(Self { ln_rho })
    }

    /// Built from the product recurrence `ρ_n = e_n ρ_{n-1}`.
    pub fn from_recurrence(model: &ModelParams, n_max: usize) -> Self {
        let mut ln_rho = Vec::with_capacity(n_max + 1);
        let mut acc = 0.0;
        ln_rho.push(acc);
        for n in 1..=n_max {
            acc += model.level(n).ln();
            ln_rho.push(acc);
        }
        Self { ln_rho }
    }

    pub fn rho(&self, n: usize) -> f64 {
        self.ln_rho[n].exp()
    }

    /// Largest `|ln ρ_n − ln ρ_{n−1} − ln e_n|` over the table.
    pub fn recurrence_defect(&self, model: &ModelParams) -> f64 {
        self.ln_rho
            .windows(2)
            .enumerate()
            .map(|(i, w)| (w[1] - w[0] - model.level(i + 1).ln()).abs())
            .fold(0.0, f64::max)
    }
}

/// `ln ρ_n`.
pub fn ln_rho(model: &ModelParams, n: usize) -> Result<f64> {
    let c = 1.0 + model.shift();
    let (num, _) = ln_gamma(n as f64 + c)?;
    let (den, _) = ln_gamma(c)?;
    Ok(2.0 * (n as f64 * std::f64::consts::LN_2 + num - den))
}

/// `ρ_n = (2ⁿ Γ(n+1+s) / Γ(1+s))²`.
pub fn rho_n(model: &ModelParams, n: usize) -> Result<f64> {
    Ok(ln_rho(model, n)?.exp())
}

fn check_action(j: f64) -> Result<()> {
    if !(j >= 0.0) || !j.is_finite() {
        return Err(Error::Domain {
            function: "gkcs",
            argument: j,
            expected: "J >= 0",
        });
    }
    Ok(())
}

/// `N²(J) = ₁F₂(1; 1+s, 1+s; J/4)`.
pub fn norm_sq(model: &ModelParams, j: f64) -> Result<f64> {
    check_action(j)?;
    let c = 1.0 + model.shift();
    hyper_1f2(1.0, c, c, 0.25 * j)?.require_converged("norm_sq")
}

/// `N²(J)` as the explicit sum `Σ Jⁿ/ρ_n`.
pub fn norm_sq_direct(model: &ModelParams, j: f64) -> Result<f64> {
    check_action(j)?;
    let n_max = certified_truncation(model, j, 1e-17)?;
    let mut terms = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        terms.push(ln_term(model, j, n)?.exp());
    }
    Ok(pairwise_sum(&terms))
}

/// `ln(Jⁿ/ρ_n)`.
fn ln_term(model: &ModelParams, j: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    Ok(n as f64 * j.ln() - ln_rho(model, n)?)
}

/// Smallest `N` for which the ratio-test bound on `Σ_{n>N} Jⁿ/(N²ρ_n)` is
/// below `limit`.
pub fn certified_truncation(model: &ModelParams, j: f64, limit: f64) -> Result<usize> {
    check_action(j)?;
    if j == 0.0 {
        return Ok(0);
    }
    let ln_norm = norm_sq(model, j)?.ln();
    for n in 1..100_000usize {
        if tail_bound(model, j, n, ln_norm)? < limit {
            return Ok(n);
        }
    }
    Err(Error::Truncation {
        n_trunc: 100_000,
        tail_bound: f64::INFINITY,
        limit,
    })
}

/// Bound on the normalized weight beyond `n_trunc`: once the term ratio
/// `x/(n+1+s)²` is below one it decreases monotonically, so the tail is
/// dominated by a geometric series.
fn tail_bound(model: &ModelParams, j: f64, n_trunc: usize, ln_norm: f64) -> Result<f64> {
    if j == 0.0 {
        return Ok(0.0);
    }
    let x = 0.25 * j;
    let next = n_trunc as f64 + 2.0 + model.shift();
    if next <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let ratio = x / (next * next);
    if ratio >= 1.0 {
        return Ok(f64::INFINITY);
    }
    let first = (ln_term(model, j, n_trunc + 1)? - ln_norm).exp();
    Ok(first / (1.0 - ratio))
}

/// Normalized photon-number weights `|c_n(J)|²`, `n = 0..=n_trunc`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Weights {
    pub values: Vec<f64>,
    /// Certified bound on the omitted weight beyond `n_trunc`.
    pub tail_bound: f64,
    pub norm_sq: f64,
}

impl Weights {
    pub fn total(&self) -> f64 {
        pairwise_sum(&self.values)
    }

    pub fn argmax(&self) -> usize {
        self.values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

/// `|c_n(J)|² = Jⁿ/(N²(J) ρ_n)` for `n ≤ n_trunc`.
pub fn weights(model: &ModelParams, j: f64, n_trunc: usize) -> Result<Weights> {
    check_action(j)?;
    if j == 0.0 {
        let mut values = vec![0.0; n_trunc + 1];
        values[0] = 1.0;
        return Ok(Weights {
            values,
            tail_bound: 0.0,
            norm_sq: 1.0,
        });
    }
    let norm = norm_sq(model, j)?;
    let ln_norm = norm.ln();
    let values = (0..=n_trunc)
        .map(|n| Ok((ln_term(model, j, n)? - ln_norm).exp()))
        .collect::<Result<Vec<_>>>()?;
    let tail = tail_bound(model, j, n_trunc, ln_norm)?;
    if tail > TAIL_LIMIT {
        return Err(Error::Truncation {
            n_trunc,
            tail_bound: tail,
            limit: TAIL_LIMIT,
        });
    }
    Ok(Weights {
        values,
        tail_bound: tail,
        norm_sq: norm,
    })
}

/// Sign of the real coefficient `c_n(J)`, that of `Γ(1+s) Γ(n+1+s)`.
pub fn coefficient_sign(model: &ModelParams, n: usize) -> Result<f64> {
    let c = 1.0 + model.shift();
    Ok(ln_gamma(c)?.1 * ln_gamma(n as f64 + c)?.1)
}

/// Measure density `ρ(J) = K₀(√J) (J/4)^s / (2Γ²(1+s))`.
pub fn weight_measure(model: &ModelParams, j: f64) -> Result<f64> {
    if !(j > 0.0) {
        return Err(Error::Domain {
            function: "weight_measure",
            argument: j,
            expected: "J > 0",
        });
    }
    let s = model.shift();
    let (lg, _) = ln_gamma(1.0 + s)?;
    let k0 = bessel_k0(j.sqrt())?;
    Ok(k0 * (s * (0.25 * j).ln() - 2.0 * lg).exp() / 2.0)
}

/// Resolution-of-identity density `k(J) = N²(J) ρ(J)`.
pub fn k_measure(model: &ModelParams, j: f64) -> Result<f64> {
    Ok(norm_sq(model, j)? * weight_measure(model, j)?)
}

/// Integrates `g(J)` against `dJ` on `(0, ∞)` through `J = y²`.
///
/// `exponent` is the power of `J` with which the integrand vanishes (or
/// diverges) at the origin, up to logarithms; it decides convergence and
/// the far cut-off.
fn half_line_integral<G>(exponent: f64, order: usize, mut g: G) -> Result<f64>
where
    G: FnMut(f64) -> Result<f64>,
{
    if exponent <= -1.0 {
        return Err(Error::DivergentMoment { order, exponent });
    }
    // integrand in y behaves as y^{2·exponent+1} e^{-y}
    let power = 2.0 * exponent + 1.0;
    let far = 60.0 + 3.0 * power.max(0.0);
    let breaks = [0.0, 0.5, 2.0, 8.0, 20.0, far];
    let mut failure = None;
    let r = integrate_pieces(
        |y| {
            g(y * y).map(|v| 2.0 * y * v).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                0.0
            })
        },
        &breaks,
        QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-12,
            max_intervals: 4000,
        },
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(r.value)
}

/// `∫₀^∞ Jⁿ ρ(J) dJ`, which equals `ρ_n` whenever it converges, i.e. for
/// `n + s > -1`.
pub fn moment(model: &ModelParams, n: usize) -> Result<f64> {
    let exponent = n as f64 + model.shift();
    half_line_integral(exponent, n, |j| Ok(j.powi(n as i32) * weight_measure(model, j)?))
}

/// `∫₀^∞ Jⁿ/(N²(J) ρ_n) k(J) dJ`, the diagonal resolution-of-identity
/// element; equal to one when it converges.
pub fn identity_element(model: &ModelParams, n: usize) -> Result<f64> {
    let exponent = n as f64 + model.shift();
    let rho = rho_n(model, n)?;
    half_line_integral(exponent, n, |j| {
        Ok(j.powi(n as i32) / (norm_sq(model, j)? * rho) * k_measure(model, j)?)
    })
}

/// Mean label `⟨n⟩ = (x/c²) ₁F₂(2; c+1, c+1; x) / ₁F₂(1; c, c; x)`,
/// `x = J/4`, `c = 1+s`.
pub fn mean_n(model: &ModelParams, j: f64) -> Result<f64> {
    check_action(j)?;
    let (x, c) = (0.25 * j, 1.0 + model.shift());
    let num = hyper_1f2(2.0, c + 1.0, c + 1.0, x)?.require_converged("mean_n")?;
    Ok(x / (c * c) * num / norm_sq(model, j)?)
}

/// `⟨n²⟩ = (x/c²) ₂F₃(2, 2; 1, c+1, c+1; x) / ₁F₂(1; c, c; x)`.
pub fn mean_n2(model: &ModelParams, j: f64) -> Result<f64> {
    check_action(j)?;
    let (x, c) = (0.25 * j, 1.0 + model.shift());
    let num = hyper_2f3(2.0, 2.0, 1.0, c + 1.0, c + 1.0, x)?.require_converged("mean_n2")?;
    Ok(x / (c * c) * num / norm_sq(model, j)?)
}

/// Mandel parameter `Q = (⟨n²⟩ − ⟨n⟩²)/⟨n⟩ − 1`.
///
/// Evaluated as `⟨n(n−1)⟩/⟨n⟩ − ⟨n⟩`, where both terms carry an explicit
/// factor `x`, so the small-`J` limit is free of cancellation. Returns 0 at
/// `J = 0`.
pub fn mandel_q(model: &ModelParams, j: f64) -> Result<f64> {
    check_action(j)?;
    if j == 0.0 {
        return Ok(0.0);
    }
    let (x, c) = (0.25 * j, 1.0 + model.shift());
    let f1 = norm_sq(model, j)?;
    let f2 = hyper_1f2(2.0, c + 1.0, c + 1.0, x)?.require_converged("mandel_q")?;
    let f3 = hyper_1f2(3.0, c + 2.0, c + 2.0, x)?.require_converged("mandel_q")?;
    Ok(x * (2.0 * f3 / ((c + 1.0) * (c + 1.0) * f2) - f2 / (c * c * f1)))
}

/// Label-space statistics from explicit weighted sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectStatistics {
    pub total: f64,
    pub mean_n: f64,
    pub mean_n2: f64,
    pub mandel_q: f64,
    pub n_trunc: usize,
}

/// `Σ|c_n|²`, `Σ n|c_n|²`, `Σ n²|c_n|²` and `Q`, extending the truncation until
/// the certified tail is negligible at double precision.
pub fn direct_statistics(model: &ModelParams, j: f64) -> Result<DirectStatistics> {
    check_action(j)?;
    // n² grows polynomially, so leave headroom below the tail limit
    let n_trunc = certified_truncation(model, j, 1e-20)? + 10;
    let w = weights(model, j, n_trunc)?;
    let first: Vec<f64> = w.values.iter().enumerate().map(|(n, v)| n as f64 * v).collect();
    let second: Vec<f64> = w.values.iter().enumerate().map(|(n, v)| (n * n) as f64 * v).collect();
    let factorial: Vec<f64> = w
        .values
        .iter()
        .enumerate()
        .map(|(n, v)| (n as f64) * (n as f64 - 1.0) * v)
        .collect();
    let mean = pairwise_sum(&first);
    let q = if j == 0.0 {
        0.0
    } else {
        pairwise_sum(&factorial) / mean - mean
    };
    Ok(DirectStatistics {
        total: w.total(),
        mean_n: mean,
        mean_n2: pairwise_sum(&second),
        mandel_q: q,
        n_trunc,
    })
}

/// Coherent state `|J, γ⟩` truncated at `n_trunc`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherentState {
    pub model: ModelParams,
    pub j: f64,
    pub gamma: f64,
    pub n_trunc: usize,
    /// `c_n e^{−iγ e_n}` for `n = 0..=n_trunc`.
    #[serde(skip)]
    pub coeffs: Vec<Complex64>,
    pub tail_bound: f64,
    #[serde(skip)]
    basis: Vec<EigenState>,
}

impl CoherentState {
    pub fn new(model: ModelParams, j: f64, gamma: f64, n_trunc: usize) -> Result<Self> {
        let w = weights(&model, j, n_trunc)?;
        let coeffs = w
            .values
            .iter()
            .enumerate()
            .map(|(n, v)| {
                let sign = coefficient_sign(&model, n)?;
                Ok(Complex64::from_polar(sign * v.sqrt(), -gamma * model.level(n)))
            })
            .collect::<Result<Vec<_>>>()?;
        let basis = (model.m()..=n_trunc)
            .map(|n| EigenState::new(&model, n))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            model,
            j,
            gamma,
            n_trunc,
            coeffs,
            tail_bound: w.tail_bound,
            basis,
        })
    }

    /// State at dimensionless time `γ = ωt`.
    pub fn at_time(model: ModelParams, j: f64, t: f64, n_trunc: usize) -> Result<Self> {
        Self::new(model, j, model.omega * t, n_trunc)
    }

    /// Weight carried by the synthesizable indices `n ≥ m`.
    pub fn synthesized_weight(&self) -> f64 {
        let v: Vec<f64> = self.coeffs[self.model.m().min(self.coeffs.len())..]
            .iter()
            .map(|c| c.norm_sqr())
            .collect();
        pairwise_sum(&v)
    }

    /// `Ξ(x) = Σ_{n≥m} c_n e^{−iγe_n} ψ_n(x)`.
    pub fn wavefunction(&self, x: f64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for s in &self.basis {
            acc += self.coeffs[s.n] * s.eval(&self.model, x)?;
        }
        Ok(acc)
    }

    fn wavefunction_near_wall(&self, wall: Wall, delta: f64) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for s in &self.basis {
            acc += self.coeffs[s.n] * s.eval_near_wall(&self.model, wall, delta)?;
        }
        Ok(acc)
    }

    /// `∫|Ξ(x)|² dx` by quadrature.
    pub fn norm_sq_quadrature(&self) -> Result<f64> {
        domain_integral(&self.model, |wall, d| {
            Ok(self.wavefunction_near_wall(wall, d)?.norm_sqr())
        })
    }
}

/// Pairwise summation.
pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}
