//! Morlet continuous wavelet transform of the return probability `|A(t)|²`.
//!
//! With the mother wavelet `h(t) = π^{-1/4} e^{iω₀t} e^{-t²/2}` the transform
//! is `W(s, τ) = √s ∫ f(sζ + τ) h*(ζ) dζ`. For a signal made of spectral
//! lines, `f(t) = Σ w_n w_k e^{-i(E_n-E_k)t}`, the Gaussian integral is exact:
//!
//! ```text
//! W(s, τ) = π^{-1/4} √(2πs) Σ w_n w_k e^{-iΔτ} e^{-(ω₀ + sΔ)²/2},  Δ = E_n − E_k
//! ```
//!
//! The harmonic grid reads scales and shifts in units tied to the revival
//! timescales: `s = ω₀ T_cl / (2πp)` and `τ = q T_rev / (2p)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::revival::{Autocorrelation, SampledSignal, Timescales};

/// Half-width of the wavelet window in units of the Gaussian width.
pub const WINDOW: f64 = 6.0;

/// Central frequency below which the Morlet wavelet is far from zero-mean.
pub const ADMISSIBLE_OMEGA0: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MorletParams {
    pub omega0: f64,
}

impl MorletParams {
    pub fn new(omega0: f64) -> Result<Self> {
        if !(omega0 > 0.0) || !omega0.is_finite() {
            return Err(Error::Config(format!("omega0 must be positive, got {omega0}")));
        }
        if omega0 < ADMISSIBLE_OMEGA0 {
            warn!(
                "omega0 = {omega0:e} < {ADMISSIBLE_OMEGA0}: the Morlet wavelet has a large non-zero mean and the transform is not admissible"
            );
        }
        Ok(Self { omega0 })
    }
}

/// `h(t) = π^{-1/4} e^{iω₀t} e^{-t²/2}`.
pub fn morlet(t: f64, params: &MorletParams) -> Complex64 {
    Complex64::from_polar(PI.powf(-0.25) * (-0.5 * t * t).exp(), params.omega0 * t)
}

/// `W(s, τ)` of a sampled signal by trapezoid quadrature over `ζ ∈ [-6, 6]`,
/// interpolating the signal linearly.
pub fn cwt_numeric(signal: &SampledSignal, s: f64, tau: f64, params: &MorletParams) -> Result<Complex64> {
    if !(s > 0.0) {
        return Err(Error::Domain {
            function: "cwt_numeric",
            argument: s,
            expected: "s > 0",
        });
    }
    let (lo, hi) = (tau - WINDOW * s, tau + WINDOW * s);
    let (t0, t1) = (signal.t_start, signal.t_end());
    if lo < t0 || hi > t1 {
        let (mlo, mhi) = if lo < t0 { (lo, t0.min(hi)) } else { (t1.max(lo), hi) };
        return Err(Error::SupportNotCovered { lo: mlo, hi: mhi });
    }
    // resolve both the wavelet oscillation and the sample spacing
    let by_phase = 2.0 * PI / (32.0 * params.omega0);
    let by_samples = signal.dt / (4.0 * s);
    let dz = 0.02_f64.min(by_phase).min(by_samples);
    let nodes = ((2.0 * WINDOW / dz).ceil() as usize).max(16);
    let h = 2.0 * WINDOW / nodes as f64;
    let mut re = Vec::with_capacity(nodes + 1);
    let mut im = Vec::with_capacity(nodes + 1);
    for i in 0..=nodes {
        let z = -WINDOW + h * i as f64;
        let t = (s * z + tau).clamp(t0, t1);
        let f = signal.interpolate(t).expect("inside the checked support");
        let wt = if i == 0 || i == nodes { 0.5 } else { 1.0 };
        let v = morlet(z, params).conj() * (f * wt);
        re.push(v.re);
        im.push(v.im);
    }
    Ok(Complex64::new(pairwise(&re), pairwise(&im)) * (h * s.sqrt()))
}

/// Spectral lines `(w_n, E_n)` of `|A(t)|² = |Σ w_n e^{-iE_n t}|²`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralLines {
    pub weights: Vec<f64>,
    pub energies: Vec<f64>,
}

impl SpectralLines {
    pub fn new(weights: Vec<f64>, energies: Vec<f64>) -> Result<Self> {
        if weights.len() != energies.len() || weights.is_empty() {
            return Err(Error::Config("spectral lines need matching non-empty weights and energies".into()));
        }
        Ok(Self { weights, energies })
    }

    /// Lines of an autocorrelation: `E_n = ω e_n` for `n = n_min..=n_trunc`.
    pub fn from_autocorrelation(ac: &Autocorrelation) -> Self {
        let c = &ac.config;
        let energies = (c.n_min..=c.n_trunc)
            .map(|n| c.model.omega * c.model.level(n))
            .collect();
        Self {
            weights: ac.weights().to_vec(),
            energies,
        }
    }

    /// `|A(t)|²` evaluated from the lines.
    pub fn signal(&self, t: f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.energies)
            .map(|(w, e)| Complex64::from_polar(*w, -e * t))
            .sum::<Complex64>()
            .norm_sqr()
    }

    /// Exact transform `π^{-1/4} √(2πs) Σ w_n w_k e^{-iΔτ} e^{-(ω₀+sΔ)²/2}`.
    pub fn transform(&self, s: f64, tau: f64, params: &MorletParams) -> Complex64 {
        let w0 = params.omega0;
        let mut re = Vec::with_capacity(self.weights.len().pow(2));
        let mut im = Vec::with_capacity(self.weights.len().pow(2));
        for (wn, en) in self.weights.iter().zip(&self.energies) {
            for (wk, ek) in self.weights.iter().zip(&self.energies) {
                let d = en - ek;
                let g = w0 + s * d;
                let z = Complex64::from_polar(wn * wk * (-0.5 * g * g).exp(), -d * tau);
                re.push(z.re);
                im.push(z.im);
            }
        }
        Complex64::new(pairwise(&re), pairwise(&im)) * (PI.powf(-0.25) * (2.0 * PI * s).sqrt())
    }
}

/// `W(s, τ)` of `|A|²` from the closed-form double sum.
pub fn cwt_analytic(ac: &Autocorrelation, s: f64, tau: f64, params: &MorletParams) -> Complex64 {
    SpectralLines::from_autocorrelation(ac).transform(s, tau, params)
}

/// Frequency `ν = p/T_cl` of the `p`-th harmonic and its scale
/// `s = ω₀/(2πν)`.
pub fn harmonic_calibration(ts: &Timescales, p: usize, params: &MorletParams) -> (f64, f64) {
    let nu = p as f64 / ts.t_cl;
    (nu, params.omega0 / (2.0 * PI * nu))
}

/// `τ = q T_rev / (2p)`.
pub fn shift_for(q: i64, p: usize, ts: &Timescales) -> f64 {
    q as f64 * ts.t_rev / (2.0 * p as f64)
}

/// `W(p, q)` written directly in harmonic coordinates:
///
/// ```text
/// π^{-1/4} √(ω₀T_cl/p) Σ w_n w_k exp{-2πi(n−k)(T_rev/T_cl + n+k−2n̄) q/(2p)}
///     × exp{-(ω₀²/2)[1 + (n−k)/p (1 + (n+k−2n̄) T_cl/T_rev)]²}
/// ```
pub fn w_pq(ac: &Autocorrelation, p: usize, q: i64, params: &MorletParams) -> Complex64 {
    let c = &ac.config;
    let ts = &ac.timescales;
    let w = ac.weights();
    let pf = p as f64;
    let w0 = params.omega0;
    let frac = q as f64 / (2.0 * pf);
    let mut re = Vec::with_capacity(w.len() * w.len());
    let mut im = Vec::with_capacity(w.len() * w.len());
    for (i, wn) in w.iter().enumerate() {
        for (l, wk) in w.iter().enumerate() {
            let (n, k) = ((c.n_min + i) as f64, (c.n_min + l) as f64);
            let spread = n + k - 2.0 * c.n_bar;
            let phase = -2.0 * PI * (n - k) * (ts.ratio + spread) * frac;
            let g = 1.0 + (n - k) / pf * (1.0 + spread / ts.ratio);
            let z = Complex64::from_polar(wn * wk * (-0.5 * w0 * w0 * g * g).exp(), phase);
            re.push(z.re);
            im.push(z.im);
        }
    }
    Complex64::new(pairwise(&re), pairwise(&im)) * (PI.powf(-0.25) * (w0 * ts.t_cl / pf).sqrt())
}

/// Axes of a transform grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GridAxes {
    Harmonic { p: Vec<usize>, q: Vec<i64> },
    ScaleShift { s: Vec<f64>, tau: Vec<f64> },
}

/// Transform values on a grid; `values[i][j]` belongs to the `i`-th entry
/// of the first axis and the `j`-th of the second.
#[derive(Debug, Clone, PartialEq)]
pub struct CwtGrid {
    pub axes: GridAxes,
    pub values: Vec<Vec<Complex64>>,
    pub omega0: f64,
}

impl CwtGrid {
    pub fn new(axes: GridAxes, values: Vec<Vec<Complex64>>, omega0: f64) -> Result<Self> {
        let (rows, cols) = match &axes {
            GridAxes::Harmonic { p, q } => (p.len(), q.len()),
            GridAxes::ScaleShift { s, tau } => (s.len(), tau.len()),
        };
        if values.len() != rows || values.iter().any(|r| r.len() != cols) {
            return Err(Error::Config(format!(
                "grid values do not match axes ({rows}×{cols})"
            )));
        }
        Ok(Self { axes, values, omega0 })
    }

    /// `ln|W|²` per cell.
    pub fn log_power(&self) -> Vec<Vec<f64>> {
        self.values
            .iter()
            .map(|r| r.iter().map(|w| w.norm_sqr().ln()).collect())
            .collect()
    }
}

/// `W(p, q)` for `p = 1..=p_max`, `q = 0..=q_max`, cells in parallel.
pub fn w_pq_grid(ac: &Autocorrelation, p_max: usize, q_max: i64, params: &MorletParams) -> Result<CwtGrid> {
    if p_max < 1 || q_max < 0 {
        return Err(Error::Config("harmonic grid needs p_max >= 1 and q_max >= 0".into()));
    }
    let ps: Vec<usize> = (1..=p_max).collect();
    let qs: Vec<i64> = (0..=q_max).collect();
    let values = ps
        .par_iter()
        .map(|&p| qs.iter().map(|&q| w_pq(ac, p, q, params)).collect())
        .collect();
    CwtGrid::new(GridAxes::Harmonic { p: ps, q: qs }, values, params.omega0)
}

/// Analytic transform on an `(s, τ)` grid.
pub fn analytic_grid(ac: &Autocorrelation, s: &[f64], tau: &[f64], params: &MorletParams) -> Result<CwtGrid> {
    let lines = SpectralLines::from_autocorrelation(ac);
    let values = s
        .par_iter()
        .map(|&sv| tau.iter().map(|&t| lines.transform(sv, t, params)).collect())
        .collect();
    CwtGrid::new(
        GridAxes::ScaleShift {
            s: s.to_vec(),
            tau: tau.to_vec(),
        },
        values,
        params.omega0,
    )
}

/// Numerical transform of a sampled signal on an `(s, τ)` grid.
pub fn numeric_grid(signal: &SampledSignal, s: &[f64], tau: &[f64], params: &MorletParams) -> Result<CwtGrid> {
    let values = s
        .par_iter()
        .map(|&sv| tau.iter().map(|&t| cwt_numeric(signal, sv, t, params)).collect())
        .collect::<Result<Vec<Vec<_>>>>()?;
    CwtGrid::new(
        GridAxes::ScaleShift {
            s: s.to_vec(),
            tau: tau.to_vec(),
        },
        values,
        params.omega0,
    )
}

/// `‖a − b‖₂ / ‖b‖₂` over all cells.
pub fn relative_l2(a: &CwtGrid, b: &CwtGrid) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (ra, rb) in a.values.iter().zip(&b.values) {
        for (x, y) in ra.iter().zip(rb) {
            num += (x - y).norm_sqr();
            den += y.norm_sqr();
        }
    }
    (num / den).sqrt()
}

/// Detector settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionPolicy {
    /// Minimum contrast `ln(|W(p,0)|²/|W(p,q)|²)` for a cell to join a patch.
    pub threshold: f64,
    /// Relative floor on `|W(p,q)|²/|W(p,0)|²` so that exact zeros give a
    /// finite contrast.
    pub floor: f64,
}

impl Default for DetectionPolicy {
    fn default() -> Self {
        Self {
            threshold: 5f64.ln(),
            floor: 1e-12,
        }
    }
}

/// One detected fractional revival `τ = (numerator/denominator) T_rev`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Detection {
    pub numerator: i64,
    pub denominator: i64,
    /// Cells `(p, q)` of the patch.
    pub cells: Vec<(usize, i64)>,
    /// Mean contrast of the patch relative to the strongest patch.
    pub strength: f64,
    /// Mean contrast in nepers of power.
    pub contrast: f64,
}

impl Detection {
    pub fn fraction(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Cells of one reduced fraction and their contrasts.
type Patch = (Vec<(usize, i64)>, Vec<f64>);

/// Locates fractional revivals as patches of suppressed `|W(p, q)|`.
///
/// Each cell with `q ≥ 1` gets the contrast `ln(|W(p,0)|²/|W(p,q)|²)`
/// against the `τ = 0` baseline of its own harmonic. Cells above the
/// threshold are grouped by the reduced fraction `q/(2p)`; a patch's strength
/// is its mean contrast. Results are ranked by strength, normalized to the
/// strongest patch. An empty list means no cell passed.
pub fn detect_fractional_revivals(grid: &CwtGrid, policy: &DetectionPolicy) -> Result<Vec<Detection>> {
    let (ps, qs) = match &grid.axes {
        GridAxes::Harmonic { p, q } => (p, q),
        GridAxes::ScaleShift { .. } => {
            return Err(Error::Config("fraction detection needs a harmonic (p, q) grid".into()))
        }
    };
    if ps.iter().copied().max().unwrap_or(0) < 4 {
        return Err(Error::Config("fraction detection needs p_max >= 4".into()));
    }
    let base_col = qs
        .iter()
        .position(|&q| q == 0)
        .ok_or_else(|| Error::Config("fraction detection needs the q = 0 column".into()))?;
    let mut patches: BTreeMap<(i64, i64), Patch> = BTreeMap::new();
    for (row, &p) in grid.values.iter().zip(ps) {
        let base = row[base_col].norm_sqr();
        for (w, &q) in row.iter().zip(qs) {
            if q < 1 {
                continue;
            }
            let ratio = (w.norm_sqr() / base).max(policy.floor);
            let contrast = -ratio.ln();
            if contrast < policy.threshold {
                continue;
            }
            let den = 2 * p as i64;
            let g = gcd(q, den);
            let entry = patches.entry((q / g, den / g)).or_default();
            entry.0.push((p, q));
            entry.1.push(contrast);
        }
    }
    let mut found: Vec<Detection> = patches
        .into_iter()
        .map(|((numerator, denominator), (cells, c))| Detection {
            numerator,
            denominator,
            cells,
            strength: 0.0,
            contrast: c.iter().sum::<f64>() / c.len() as f64,
        })
        .collect();
    found.sort_by(|a, b| {
        b.contrast
            .total_cmp(&a.contrast)
            .then(a.fraction().total_cmp(&b.fraction()))
    });
    if let Some(top) = found.first().map(|d| d.contrast) {
        for d in &mut found {
            d.strength = d.contrast / top;
        }
    }
    Ok(found)
}

fn pairwise(v: &[f64]) -> f64 {
    crate::gkcs::pairwise_sum(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::revival::{sample_signal, RevivalConfig};
    use crate::scarf::ModelParams;
    use crate::xjacobi::XmParams;
    use proptest::prelude::*;

    fn fig3(j: f64) -> Autocorrelation {
        let omega = PI / (2.0 * 2896.825);
        let model = ModelParams::new(XmParams::new(4.4, -1.0 / 3.0, 6).unwrap(), omega).unwrap();
        Autocorrelation::new(RevivalConfig::new(model, j, 100.0, 50, 0).unwrap()).unwrap()
    }

    fn tone(nu: f64, t_end: f64, dt: f64) -> SampledSignal {
        let n = (t_end / dt) as usize + 1;
        let v = (0..n).map(|i| (2.0 * PI * nu * i as f64 * dt).cos()).collect();
        SampledSignal::new(0.0, dt, v).unwrap()
    }

    #[test]
    fn wavelet_basics() {
        let p = MorletParams::new(6.0).unwrap();
        assert!((morlet(0.0, &p).re - 0.751_125_544_464_942_5).abs() < 1e-15);
        for &t in &[0.3, 1.7, 4.0] {
            assert!((morlet(t, &p).norm() - morlet(-t, &p).norm()).abs() < 1e-16);
        }
        let h = 1e-3;
        let l2: f64 = (-12000..=12000).map(|i| morlet(i as f64 * h, &p).norm_sqr() * h).sum();
        assert!((l2 - 1.0).abs() < 1e-10);
        assert!(MorletParams::new(0.0).is_err());
    }

    #[test]
    fn constant_signal() {
        let p = MorletParams::new(1.5).unwrap();
        let sig = SampledSignal::new(0.0, 0.01, vec![2.5; 5001]).unwrap();
        let s = 3.0;
        let w = cwt_numeric(&sig, s, 25.0, &p).unwrap();
        let expected = 2.5 * s.sqrt() * PI.powf(-0.25) * (2.0 * PI).sqrt() * (-0.5 * 1.5f64 * 1.5).exp();
        assert!((w.re - expected).abs() < 1e-7 * expected && w.im.abs() < 1e-9, "{w} vs {expected}");
    }

    #[test]
    fn pure_tone_scale() {
        let p = MorletParams::new(6.0).unwrap();
        let nu = 0.2;
        let sig = tone(nu, 400.0, 0.05);
        let scales: Vec<f64> = (0..200).map(|i| 2.0 + 0.05 * i as f64).collect();
        let best = scales
            .iter()
            .map(|&s| (s, cwt_numeric(&sig, s, 200.0, &p).unwrap().norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
            .0;
        // √s·exp(-(ω₀ - 2πνs)²/2) peaks where 2πνs = (ω₀ + √(ω₀² + 2))/2
        let exact = (6.0 + (36.0f64 + 2.0).sqrt()) / 2.0 / (2.0 * PI * nu);
        assert!((best - exact).abs() < 0.03, "{best} vs {exact}");
        let nominal = 6.0 / (2.0 * PI * nu);
        assert!((best / nominal - 1.0).abs() < 0.02);
    }

    #[test]
    fn support_check() {
        let p = MorletParams::new(6.0).unwrap();
        let sig = tone(0.1, 100.0, 0.1);
        match cwt_numeric(&sig, 2.0, 5.0, &p) {
            Err(Error::SupportNotCovered { lo, hi }) => {
                assert_eq!(lo, -7.0);
                assert_eq!(hi, 0.0);
            }
            other => panic!("{other:?}"),
        }
        assert!(cwt_numeric(&sig, 2.0, 95.0, &p).is_err());
        assert!(cwt_numeric(&sig, 2.0, 50.0, &p).is_ok());
    }

    #[test]
    fn linearity_and_shift() {
        let p = MorletParams::new(6.0).unwrap();
        let f = tone(0.13, 200.0, 0.05);
        let g = tone(0.31, 200.0, 0.05);
        let mix: Vec<f64> = f.values.iter().zip(&g.values).map(|(a, b)| 2.0 * a - 0.7 * b).collect();
        let mix = SampledSignal::new(0.0, 0.05, mix).unwrap();
        for &(s, t) in &[(3.0, 60.0), (7.5, 100.0), (1.2, 150.0)] {
            let lhs = cwt_numeric(&mix, s, t, &p).unwrap();
            let rhs = cwt_numeric(&f, s, t, &p).unwrap() * 2.0 - cwt_numeric(&g, s, t, &p).unwrap() * 0.7;
            assert!((lhs - rhs).norm() < 1e-13 * lhs.norm().max(1.0));
        }
        // translating the samples by whole steps translates W exactly
        let shifted = SampledSignal::new(12.5, 0.05, f.values.clone()).unwrap();
        for &(s, t) in &[(3.0, 60.0), (7.5, 100.0)] {
            let a = cwt_numeric(&f, s, t, &p).unwrap();
            let b = cwt_numeric(&shifted, s, t + 12.5, &p).unwrap();
            assert!((a - b).norm() < 1e-6 * a.norm().max(1e-3), "{a} {b}");
        }
    }

    #[test]
    fn diagonal_offset_and_small_scale() {
        let ac = fig3(10.0);
        let p = MorletParams::new(2.0).unwrap();
        let lines = SpectralLines::from_autocorrelation(&ac);
        let sum4: f64 = lines.weights.iter().map(|w| w.powi(4)).sum();
        let s = 1e-12;
        let w = cwt_analytic(&ac, s, 7.0, &p);
        let total = PI.powf(-0.25) * (2.0 * PI * s).sqrt() * (-2.0f64).exp();
        // as s → 0 all Gaussians collapse to e^{-ω₀²/2}; the sum becomes f(τ)
        assert!((w.re - total * lines.signal(7.0)).abs() < 1e-9 * total);
        assert!(sum4 < 1.0);
    }

    #[test]
    fn harmonic_axes() {
        let ac = fig3(10.0);
        let ts = ac.timescales;
        let p = MorletParams::new(ac.config.model.omega).unwrap();
        let (nu, _) = harmonic_calibration(&ts, 1, &p);
        assert!((nu - 0.066_65).abs() < 1e-4);
        let s1 = harmonic_calibration(&ts, 1, &p).1;
        for k in 2..=6 {
            assert!((harmonic_calibration(&ts, k, &p).1 * k as f64 - s1).abs() < 1e-15 * s1);
        }
        for k in 1..=4 {
            assert!(1.0 + k as f64 / ts.ratio < 1.03);
        }
        assert_eq!(shift_for(0, 3, &ts), 0.0);
        assert!((shift_for(1, 2, &ts) - ts.t_rev / 4.0).abs() < 1e-12);
        assert!((shift_for(3, 2, &ts) - 0.75 * ts.t_rev).abs() < 1e-12);
    }

    #[test]
    fn substitution_identity() {
        let ac = fig3(10.0);
        for &w0 in &[ac.config.model.omega, 6.0] {
            let p = MorletParams::new(w0).unwrap();
            for pp in 1..=4 {
                for q in 0..=8 {
                    let a = w_pq(&ac, pp, q, &p);
                    let s = harmonic_calibration(&ac.timescales, pp, &p).1;
                    let b = cwt_analytic(&ac, s, shift_for(q, pp, &ac.timescales), &p);
                    assert!((a - b).norm() <= 1e-9 * b.norm().max(1e-300), "p={pp} q={q}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn dual_path_on_preset() {
        let ac = fig3(10.0);
        let ts = ac.timescales;
        let p = MorletParams::new(ac.config.model.omega).unwrap();
        let sig = sample_signal(&ac, -ts.t_cl, ts.t_rev + ts.t_cl, (((ts.t_rev + 2.0 * ts.t_cl) / (ts.t_cl / 32.0)) as usize) + 1).unwrap();
        let s: Vec<f64> = (0..10)
            .map(|i| p.omega0 * ts.t_cl / (2.0 * PI * (1.0 + i as f64 / 3.0)))
            .collect();
        let tau: Vec<f64> = (0..10).map(|i| ts.t_rev * i as f64 / 9.0).collect();
        let a = analytic_grid(&ac, &s, &tau, &p).unwrap();
        let n = numeric_grid(&sig, &s, &tau, &p).unwrap();
        let err = relative_l2(&n, &a);
        assert!(err < 1e-3, "{err}");
    }

    #[test]
    fn quarter_revival_leads() {
        let ac = fig3(10.0);
        let p = MorletParams::new(ac.config.model.omega).unwrap();
        let grid = w_pq_grid(&ac, 4, 8, &p).unwrap();
        let found = detect_fractional_revivals(&grid, &DetectionPolicy::default()).unwrap();
        let inner: Vec<&Detection> = found.iter().filter(|d| d.fraction() > 0.0 && d.fraction() < 0.5).collect();
        assert_eq!((inner[0].numerator, inner[0].denominator), (1, 4));
        for (n, d) in [(1, 8), (1, 6), (1, 3)] {
            let hit = found.iter().find(|x| x.numerator == n && x.denominator == d).expect("missing fraction");
            assert!(hit.strength < inner[0].strength);
        }
        for (n, d) in [(1, 2), (1, 1)] {
            assert!(!found.iter().any(|x| x.numerator == n && x.denominator == d));
        }
        assert_eq!(found[0].strength, 1.0);
    }

    #[test]
    fn single_beat_gives_one_family() {
        // |½ + ½e^{-iΔt}|² with Δ = 4π/T_rev vanishes at odd quarters of T_rev
        let t_rev = 1000.0;
        let ts = Timescales {
            t_cl: 10.0,
            t_rev,
            ratio: 100.0,
        };
        let lines = SpectralLines::new(vec![0.5, 0.5], vec![0.0, 4.0 * PI / t_rev]).unwrap();
        let params = MorletParams::new(1e-3).unwrap();
        let ps: Vec<usize> = (1..=4).collect();
        let qs: Vec<i64> = (0..=8).collect();
        let values = ps
            .iter()
            .map(|&p| {
                let s = harmonic_calibration(&ts, p, &params).1;
                qs.iter().map(|&q| lines.transform(s, shift_for(q, p, &ts), &params)).collect()
            })
            .collect();
        let grid = CwtGrid::new(GridAxes::Harmonic { p: ps, q: qs }, values, params.omega0).unwrap();
        let policy = DetectionPolicy {
            threshold: 5.0,
            ..DetectionPolicy::default()
        };
        let found = detect_fractional_revivals(&grid, &policy).unwrap();
        assert!(!found.is_empty());
        for d in &found {
            assert_eq!(d.denominator, 4, "{d:?}");
            assert_eq!(d.numerator % 2, 1);
        }
    }

    #[test]
    fn detector_preconditions() {
        let v = vec![vec![Complex64::new(1.0, 0.0); 3]; 2];
        let g = CwtGrid::new(GridAxes::Harmonic { p: vec![1, 2], q: vec![0, 1, 2] }, v, 1.0).unwrap();
        assert!(detect_fractional_revivals(&g, &DetectionPolicy::default()).is_err());
        let flat = vec![vec![Complex64::new(1.0, 0.0); 3]; 4];
        let g = CwtGrid::new(GridAxes::Harmonic { p: vec![1, 2, 3, 4], q: vec![0, 1, 2] }, flat, 1.0).unwrap();
        assert!(detect_fractional_revivals(&g, &DetectionPolicy::default()).unwrap().is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn conjugate_symmetry(p in 1usize..=6, q in 0i64..=16, w0 in 1e-4f64..8.0) {
            let ac = fig3(10.0);
            let params = MorletParams { omega0: w0 };
            let a = w_pq(&ac, p, q, &params);
            let b = w_pq(&ac, p, -q, &params);
            prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1e-300));
        }
    }
}
