//! Revival timescales and the autocorrelation `A(t) = ⟨Ξ(0)|Ξ(t)⟩`.
//!
//! Time is measured internally in units of the classical period
//! (`t̄ = t/T_cl`). With `D = n̄ − m + Ω` the phase of level `n` relative to
//! the packet centre is `π(n−n̄)(n+n̄−2m+2Ω) t̄ / D`.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gkcs::{pairwise_sum, weights};
use crate::scarf::ModelParams;

/// Parameters of an autocorrelation computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RevivalConfig {
    pub model: ModelParams,
    pub j: f64,
    /// Expansion centre `n̄` of the spectrum.
    pub n_bar: f64,
    pub n_trunc: usize,
    /// Lowest included index (0 for label-space sums, `m` for synthesizable
    /// states only).
    pub n_min: usize,
}

impl RevivalConfig {
    pub fn new(model: ModelParams, j: f64, n_bar: f64, n_trunc: usize, n_min: usize) -> Result<Self> {
        let cfg = Self {
            model,
            j,
            n_bar,
            n_trunc,
            n_min,
        };
        if !(cfg.centre_offset() > 0.0) {
            return Err(Error::Config(format!(
                "n_bar = {n_bar} gives a non-positive classical frequency; need n_bar > m - Ω = {}",
                model.m() as f64 - model.big_omega()
            )));
        }
        if n_trunc < 1 || n_min > n_trunc {
            return Err(Error::Config(format!(
                "need 1 <= n_trunc and n_min <= n_trunc (got n_trunc={n_trunc}, n_min={n_min})"
            )));
        }
        if !(j >= 0.0) {
            return Err(Error::Config(format!("J must be non-negative, got {j}")));
        }
        Ok(cfg)
    }

    /// `D = n̄ − m + Ω`.
    pub fn centre_offset(&self) -> f64 {
        self.n_bar - self.model.m() as f64 + self.model.big_omega()
    }

    pub fn timescales(&self) -> Timescales {
        timescales(self)
    }
}

/// Classical period and revival time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timescales {
    pub t_cl: f64,
    pub t_rev: f64,
    /// `T_rev / T_cl = 2D`.
    pub ratio: f64,
}

/// `T_cl = π/(4ωD)`, `T_rev = π/(2ω)`.
pub fn timescales(config: &RevivalConfig) -> Timescales {
    let d = config.centre_offset();
    let w = config.model.omega;
    Timescales {
        t_cl: PI / (4.0 * w * d),
        t_rev: PI / (2.0 * w),
        ratio: 2.0 * d,
    }
}

/// Autocorrelation of one coherent state, with its weights precomputed.
#[derive(Debug, Clone)]
pub struct Autocorrelation {
    pub config: RevivalConfig,
    pub timescales: Timescales,
    /// `|c_n|²` for `n = n_min..=n_trunc`.
    weights: Vec<f64>,
    /// `w_k w_{n−k}` from log-space weights, row `n − 2n_min`, column
    /// `k − max(n_min, n − n_trunc)`.
    pair_weights: Vec<Vec<f64>>,
    pub tail_bound: f64,
}

impl Autocorrelation {
    pub fn new(config: RevivalConfig) -> Result<Self> {
        let w = weights(&config.model, config.j, config.n_trunc)?;
        let kept: Vec<f64> = w.values[config.n_min..].to_vec();
        let ln_w: Vec<f64> = kept.iter().map(|v| v.ln()).collect();
        let (lo, hi) = (config.n_min, config.n_trunc);
        let pair_weights = (2 * lo..=2 * hi)
            .map(|n| {
                (lo.max(n.saturating_sub(hi))..=hi.min(n - lo))
                    .map(|k| (ln_w[k - lo] + ln_w[n - k - lo]).exp())
                    .collect()
            })
            .collect();
        Ok(Self {
            timescales: timescales(&config),
            config,
            weights: kept,
            pair_weights,
            tail_bound: w.tail_bound,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Level phase coefficient `(n−n̄)(n+n̄−2m+2Ω)`.
    fn level_phase(&self, n: usize) -> f64 {
        let c = &self.config;
        let nf = n as f64;
        let two_omega = 2.0 * c.model.big_omega();
        (nf - c.n_bar) * (nf + c.n_bar - 2.0 * c.model.m() as f64 + two_omega)
    }

    /// `A(t̄)` as a single sum over levels.
    pub fn direct(&self, t_bar: f64) -> Complex64 {
        let d = self.config.centre_offset();
        let scale = PI * t_bar / d;
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, w) in self.weights.iter().enumerate() {
            let n = self.config.n_min + i;
            acc += w * Complex64::cis(-scale * self.level_phase(n));
        }
        acc * Complex64::cis(-PI * d * t_bar)
    }

    /// `|A(t̄)|²` from the Cauchy-product double sum
    /// `Σ_n Σ_k w_k w_{n−k} exp(iπ(n−2k)(n−2m+2Ω)t̄/D)`.
    ///
    /// Returns the real part and the imaginary residue, which vanishes
    /// analytically because the `k ↔ n−k` terms are conjugate.
    pub fn cauchy_sq_with_residue(&self, t_bar: f64) -> (f64, f64) {
        let c = &self.config;
        let (lo, hi) = (c.n_min, c.n_trunc);
        let offset = 2.0 * (c.model.big_omega() - c.model.m() as f64);
        let scale = PI * t_bar / c.centre_offset();
        let mut outer_re = Vec::with_capacity(self.pair_weights.len());
        let mut outer_im = Vec::with_capacity(self.pair_weights.len());
        let mut re = Vec::with_capacity(hi - lo + 1);
        let mut im = Vec::with_capacity(hi - lo + 1);
        for (row, mags) in self.pair_weights.iter().enumerate() {
            re.clear();
            im.clear();
            let n = 2 * lo + row;
            let freq = scale * (n as f64 + offset);
            let k0 = lo.max(n.saturating_sub(hi));
            // phase advances by −2·freq per step in k; re-anchor every 16 steps
            let step = Complex64::cis(-2.0 * freq);
            let mut z = Complex64::new(0.0, 0.0);
            for (i, mag) in mags.iter().enumerate() {
                if i % 16 == 0 {
                    z = Complex64::cis(freq * (n as f64 - 2.0 * (k0 + i) as f64));
                } else {
                    z *= step;
                }
                re.push(mag * z.re);
                im.push(mag * z.im);
            }
            outer_re.push(pairwise_sum(&re));
            outer_im.push(pairwise_sum(&im));
        }
        (pairwise_sum(&outer_re), pairwise_sum(&outer_im))
    }

    /// `|A(t̄)|²` from the Cauchy-product form.
    pub fn cauchy_sq(&self, t_bar: f64) -> f64 {
        self.cauchy_sq_with_residue(t_bar).0
    }

    /// `|A(t)|²` at absolute time `t`.
    pub fn sq_at(&self, t: f64) -> f64 {
        self.cauchy_sq(t / self.timescales.t_cl)
    }

    /// Angular frequencies (in `t̄`) present in `|A|²`, with their amplitudes
    /// `2 w_k w_l` aggregated over pairs `k > l` sharing a frequency.
    pub fn beat_spectrum(&self) -> Vec<(f64, f64)> {
        let c = &self.config;
        let offset = 2.0 * (c.model.big_omega() - c.model.m() as f64);
        let scale = PI / c.centre_offset();
        let mut lines: Vec<(f64, f64)> = Vec::new();
        for (i, wk) in self.weights.iter().enumerate() {
            for (l, wl) in self.weights.iter().enumerate().take(i) {
                let (k, l) = ((c.n_min + i) as f64, (c.n_min + l) as f64);
                let f = (scale * (k - l) * (k + l + offset)).abs();
                lines.push((f, 2.0 * wk * wl));
            }
        }
        lines.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (f, a) in lines {
            match merged.last_mut() {
                Some(last) if (last.0 - f).abs() <= 1e-12 * f.max(1.0) => last.1 += a,
                _ => merged.push((f, a)),
            }
        }
        merged
    }
}

/// `A(t̄)` from a configuration (weights recomputed each call).
pub fn autocorr_direct(config: &RevivalConfig, t_bar: f64) -> Result<Complex64> {
    Ok(Autocorrelation::new(*config)?.direct(t_bar))
}

/// `|A(t̄)|²` from the Cauchy-product form.
pub fn autocorr_sq_cauchy(config: &RevivalConfig, t_bar: f64) -> Result<f64> {
    Ok(Autocorrelation::new(*config)?.cauchy_sq(t_bar))
}

/// Uniformly sampled real signal on an absolute time axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledSignal {
    pub t_start: f64,
    pub dt: f64,
    pub values: Vec<f64>,
}

impl SampledSignal {
    pub fn new(t_start: f64, dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || values.len() < 2 {
            return Err(Error::Config("sampled signal needs dt > 0 and at least two samples".into()));
        }
        Ok(Self { t_start, dt, values })
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t_start + self.dt * i as f64
    }

    pub fn t_end(&self) -> f64 {
        self.time(self.values.len() - 1)
    }

    /// Linear interpolation; `None` outside the sampled span.
    pub fn interpolate(&self, t: f64) -> Option<f64> {
        let u = (t - self.t_start) / self.dt;
        let last = (self.values.len() - 1) as f64;
        if !(u >= 0.0 && u <= last) {
            return None;
        }
        let i = (u.floor() as usize).min(self.values.len() - 2);
        let frac = u - i as f64;
        Some(self.values[i] + frac * (self.values[i + 1] - self.values[i]))
    }
}

/// Samples `|A(t)|²` at `n_samples` uniform points of `[t_start, t_end]`
/// (absolute time, endpoints included).
pub fn sample_signal(ac: &Autocorrelation, t_start: f64, t_end: f64, n_samples: usize) -> Result<SampledSignal> {
    if n_samples < 2 || !(t_end > t_start) {
        return Err(Error::Config(format!(
            "sampling needs at least two samples over a positive span (got {n_samples} over [{t_start}, {t_end}])"
        )));
    }
    let dt = (t_end - t_start) / (n_samples - 1) as f64;
    if dt > ac.timescales.t_cl / 8.0 {
        warn!(
            "sampling step {dt:e} exceeds T_cl/8 = {:e}; beat frequencies near p/T_cl will alias",
            ac.timescales.t_cl / 8.0
        );
    }
    let values = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let t = if i == n_samples - 1 { t_end } else { t_start + dt * i as f64 };
            ac.sq_at(t)
        })
        .collect();
    SampledSignal::new(t_start, dt, values)
}

/// Indices of strict local maxima above `threshold`.
pub fn peaks_above(values: &[f64], threshold: f64) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > threshold && values[i] > values[i - 1] && values[i] >= values[i + 1])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xjacobi::XmParams;
    use proptest::prelude::*;
    use rustfft::FftPlanner;

    const PRESET_T_REV: f64 = 2896.825;

    fn fig3_model() -> ModelParams {
        let omega = PI / (2.0 * PRESET_T_REV);
        ModelParams::new(XmParams::new(4.4, -1.0 / 3.0, 6).unwrap(), omega).unwrap()
    }

    fn fig3(j: f64) -> Autocorrelation {
        Autocorrelation::new(RevivalConfig::new(fig3_model(), j, 100.0, 50, 0).unwrap()).unwrap()
    }

    #[test]
    fn preset_timescales() {
        let ts = fig3(10.0).timescales;
        assert!((ts.ratio - 193.066_666_666_666_7).abs() < 1e-10);
        assert!((ts.t_rev - PRESET_T_REV).abs() < 1e-9);
        assert!((ts.t_cl - 15.004).abs() < 1e-2);
        assert!((ts.t_rev / ts.t_cl - ts.ratio).abs() < 1e-10);

        let mut m = fig3_model();
        m.omega *= 2.0;
        let ts2 = timescales(&RevivalConfig::new(m, 10.0, 100.0, 50, 0).unwrap());
        assert!((ts2.t_rev - 0.5 * ts.t_rev).abs() < 1e-9);
        assert!((ts2.t_cl - 0.5 * ts.t_cl).abs() < 1e-12);
        assert_eq!(ts2.ratio, ts.ratio);
    }

    #[test]
    fn rejects_bad_centre() {
        assert!(RevivalConfig::new(fig3_model(), 10.0, 1.0, 50, 0).is_err());
        assert!(RevivalConfig::new(fig3_model(), 10.0, 100.0, 5, 6).is_err());
    }

    #[test]
    fn unit_at_origin() {
        let ac = fig3(10.0);
        let a0 = ac.direct(0.0);
        assert!((a0.re - 1.0).abs() < 1e-12 && a0.im.abs() < 1e-15);
        assert!((ac.cauchy_sq(0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn near_unity_revival_peak() {
        let ac = fig3(10.0);
        let r = ac.timescales.ratio;
        let best = (0..=4000)
            .map(|i| ac.cauchy_sq(r * (0.9 + 0.2 * i as f64 / 4000.0)))
            .fold(0.0, f64::max);
        assert!(best > 0.9, "{best}");
    }

    #[test]
    fn sub_peaks_sharpen_with_action() {
        let mut last = 0;
        for &j in &[10.0, 20.0, 40.0, 100.0] {
            let ac = fig3(j);
            let r = ac.timescales.ratio;
            let n = (2.0 * r * 32.0) as usize;
            let v: Vec<f64> = (0..=n).map(|i| ac.cauchy_sq(i as f64 / 32.0)).collect();
            let count = peaks_above(&v, 0.1).len();
            assert!(count > last, "J={j}: {count} peaks");
            last = count;
        }
    }

    #[test]
    fn synthesizable_band_only() {
        let model = fig3_model();
        let cfg = RevivalConfig::new(model, 40.0, 100.0, 50, model.m()).unwrap();
        let ac = Autocorrelation::new(cfg).unwrap();
        let kept: f64 = ac.weights().iter().sum();
        assert!((ac.direct(0.0).re - kept).abs() < 1e-14);
        let t = 3.7;
        assert!((ac.direct(t).norm_sqr() - ac.cauchy_sq(t)).abs() < 1e-12);
    }

    #[test]
    fn dominant_beat_matches_fft() {
        let ac = fig3(10.0);
        // one cycle of t̄ spans 2π rad; sample in t̄ with step 1/32
        let n = 1 << 16;
        let step = 1.0 / 32.0;
        let v: Vec<f64> = (0..n).into_par_iter().map(|i| ac.cauchy_sq(i as f64 * step)).collect();
        let mean = v.iter().sum::<f64>() / n as f64;
        let mut buf: Vec<Complex64> = v
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let hann = 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos();
                Complex64::new((x - mean) * hann, 0.0)
            })
            .collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let (bin, _) = buf[1..n / 2]
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap();
        let measured = (bin + 1) as f64 / (n as f64 * step);
        let (omega, _) = ac
            .beat_spectrum()
            .into_iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        let predicted = omega / (2.0 * PI);
        let resolution = 1.0 / (n as f64 * step);
        assert!((measured - predicted).abs() <= 1.5 * resolution, "{measured} vs {predicted}");
    }

    #[test]
    fn sampling_endpoints_and_interpolation() {
        let ac = fig3(10.0);
        let s = sample_signal(&ac, 0.0, 30.0, 2).unwrap();
        assert_eq!(s.values.len(), 2);
        assert_eq!(s.values[0], ac.sq_at(0.0));
        assert_eq!(s.values[1], ac.sq_at(30.0));
        assert_eq!(s.interpolate(15.0).unwrap(), 0.5 * (s.values[0] + s.values[1]));
        assert!(s.interpolate(30.1).is_none());
        assert!(sample_signal(&ac, 0.0, 30.0, 1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn dual_form(t in 0.0f64..386.0) {
            let ac = fig3(10.0);
            let d = ac.direct(t).norm_sqr();
            let (c, residue) = ac.cauchy_sq_with_residue(t);
            prop_assert!((d - c).abs() < 1e-9);
            prop_assert!(residue.abs() < 1e-10);
            prop_assert!((-1e-12..=1.0 + 1e-9).contains(&c));
        }

        #[test]
        fn modulus_ignores_global_phase(t in 0.0f64..386.0, j in 1.0f64..100.0) {
            let ac = fig3(j);
            let a = ac.direct(t);
            let d = ac.config.centre_offset();
            let stripped = a * Complex64::cis(PI * d * t);
            prop_assert!((a.norm() - stripped.norm()).abs() < 1e-14);
        }
    }
}
