//! Dataset builders behind the command-line subcommands. Each returns named
//! tables; writing them is left to the caller.

use crate::config::RunConfig;
use crate::cwt::{
    detect_fractional_revivals, harmonic_calibration, shift_for, w_pq_grid, DetectionPolicy, GridAxes, MorletParams,
    SpectralLines,
};
use crate::error::{Error, Result};
use crate::gkcs::{mandel_q, weights};
use crate::io::{Cell, Table};
use crate::revival::{sample_signal, Autocorrelation};
use crate::scarf::{energy, potential, EigenState};

/// Samples per classical period when `samples` is not given.
pub const SAMPLES_PER_T_CL: f64 = 32.0;

/// Points across the domain for position-space tables.
pub const DEFAULT_POINTS: usize = 401;

pub type Dataset = Vec<(String, Table)>;

fn j_label(j: f64) -> String {
    format!("J={j}")
}

/// Midpoint grid strictly inside `(-L, L)`.
fn position_grid(half: f64, points: usize) -> Vec<f64> {
    let h = 2.0 * half / points as f64;
    (0..points).map(|i| -half + h * (i as f64 + 0.5)).collect()
}

/// `(x, V(x))`.
pub fn potential_table(cfg: &RunConfig) -> Result<Dataset> {
    let model = cfg.model()?;
    let points = cfg.samples.unwrap_or(DEFAULT_POINTS);
    let mut t = Table::new(cfg.header("potential"), &["x", "V"]);
    for x in position_grid(model.half_width(), points) {
        t.push(vec![x.into(), potential(&model, x)?.into()]);
    }
    Ok(vec![("potential".into(), t)])
}

/// `(n, E_n, E_n/ω)` for `levels` states from `n = m`.
pub fn spectrum_table(cfg: &RunConfig, levels: usize) -> Result<Dataset> {
    let model = cfg.model()?;
    let mut t = Table::new(cfg.header("spectrum"), &["n", "E", "E_over_omega"]);
    for n in model.m()..model.m() + levels {
        t.push(vec![n.into(), energy(&model, n)?.into(), model.level(n).into()]);
    }
    Ok(vec![("spectrum".into(), t)])
}

/// `(x, ψ_n(x))`; `n` defaults to the ground state `m`.
pub fn wavefunction_table(cfg: &RunConfig, n: Option<usize>) -> Result<Dataset> {
    let model = cfg.model()?;
    let n = n.unwrap_or(model.m());
    let state = EigenState::new(&model, n)?;
    let points = cfg.samples.unwrap_or(DEFAULT_POINTS);
    let mut header = cfg.header("wavefunction");
    header.push(("n".into(), n.to_string()));
    let mut t = Table::new(header, &["x", "psi"]);
    for x in position_grid(model.half_width(), points) {
        t.push(vec![x.into(), state.eval(&model, x)?.into()]);
    }
    Ok(vec![(format!("wavefunction_n{n}"), t)])
}

/// Photon-number distributions `|c_n(J)|²`, one column per `J`.
pub fn fig1(cfg: &RunConfig) -> Result<Dataset> {
    let model = cfg.model()?;
    let dists = cfg
        .j
        .iter()
        .map(|&j| weights(&model, j, cfg.n_trunc))
        .collect::<Result<Vec<_>>>()?;
    let mut cols = vec!["n".to_string()];
    cols.extend(cfg.j.iter().map(|&j| j_label(j)));
    let mut t = Table::with_columns(cfg.header("fig1"), cols);
    for n in 0..=cfg.n_trunc {
        let mut row: Vec<Cell> = vec![n.into()];
        row.extend(dists.iter().map(|d| Cell::from(d.values[n])));
        t.push(row);
    }
    Ok(vec![("fig1".into(), t)])
}

/// Mandel parameter against `J`, one column per value of `a`.
pub fn fig2(cfg: &RunConfig) -> Result<Dataset> {
    let models = cfg.a.iter().map(|&a| cfg.model_for(a)).collect::<Result<Vec<_>>>()?;
    let mut cols = vec!["J".to_string()];
    cols.extend(cfg.a.iter().map(|a| format!("a={a}")));
    let mut t = Table::with_columns(cfg.header("fig2"), cols);
    for &j in &cfg.j {
        let mut row: Vec<Cell> = vec![j.into()];
        for m in &models {
            row.push(mandel_q(m, j)?.into());
        }
        t.push(row);
    }
    Ok(vec![("fig2".into(), t)])
}

fn span_samples(cfg: &RunConfig, span: f64, t_cl: f64) -> usize {
    cfg.samples
        .unwrap_or_else(|| (span / t_cl * SAMPLES_PER_T_CL).round() as usize + 1)
}

/// `|A|²` against `t̄ = t/T_cl` over `t_span` revival times (default 2),
/// one column per `J`.
pub fn fig3(cfg: &RunConfig) -> Result<Dataset> {
    let acs = cfg
        .j
        .iter()
        .map(|&j| Autocorrelation::new(cfg.revival(j)?))
        .collect::<Result<Vec<_>>>()?;
    let ts = acs[0].timescales;
    let span = cfg.t_span.unwrap_or(2.0) * ts.t_rev;
    let n = span_samples(cfg, span, ts.t_cl);
    let signals = acs
        .iter()
        .map(|ac| sample_signal(ac, 0.0, span, n))
        .collect::<Result<Vec<_>>>()?;
    let mut cols = vec!["t_bar".to_string()];
    cols.extend(cfg.j.iter().map(|&j| j_label(j)));
    let mut header = cfg.header("fig3");
    header.extend(timescale_header(&acs[0]));
    let mut t = Table::with_columns(header, cols);
    for i in 0..n {
        let mut row: Vec<Cell> = vec![(signals[0].time(i) / ts.t_cl).into()];
        row.extend(signals.iter().map(|s| Cell::from(s.values[i])));
        t.push(row);
    }
    Ok(vec![("fig3".into(), t)])
}

fn timescale_header(ac: &Autocorrelation) -> Vec<(String, String)> {
    let ts = ac.timescales;
    vec![
        ("T_cl".into(), ts.t_cl.to_string()),
        ("T_rev".into(), ts.t_rev.to_string()),
        ("ratio".into(), ts.ratio.to_string()),
    ]
}

fn single_j(cfg: &RunConfig) -> Result<f64> {
    match cfg.j.as_slice() {
        [j] => Ok(*j),
        _ => Err(Error::Config(format!("this figure takes a single J, got {:?}", cfg.j))),
    }
}

/// `|A|²` over `t_span` revival times (default 10) and `|W(τ)|²` for the
/// first harmonic on `τ ∈ [2T_rev/9, 2T_rev/7]`.
pub fn fig4(cfg: &RunConfig) -> Result<Dataset> {
    let ac = Autocorrelation::new(cfg.revival(single_j(cfg)?)?)?;
    let ts = ac.timescales;
    let span = cfg.t_span.unwrap_or(10.0) * ts.t_rev;
    let n = span_samples(cfg, span, ts.t_cl);
    let sig = sample_signal(&ac, 0.0, span, n)?;
    let mut header = cfg.header("fig4");
    header.extend(timescale_header(&ac));
    let mut a = Table::new(header.clone(), &["t_bar", "abs_a_sq"]);
    for (i, v) in sig.values.iter().enumerate() {
        a.push(vec![(sig.time(i) / ts.t_cl).into(), (*v).into()]);
    }

    let params = MorletParams::new(cfg.omega0())?;
    let lines = SpectralLines::from_autocorrelation(&ac);
    let (_, s) = harmonic_calibration(&ts, 1, &params);
    let (lo, hi) = (2.0 / 9.0, 2.0 / 7.0);
    let points = 2001;
    let mut w = Table::new(header, &["tau_bar", "abs_w_sq"]);
    for i in 0..points {
        let tb = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        w.push(vec![tb.into(), lines.transform(s, tb * ts.t_rev, &params).norm_sqr().into()]);
    }
    Ok(vec![("fig4a".into(), a), ("fig4b".into(), w)])
}

/// `|W(τ)|²` for `p = 1..=p_max` over `t_span` revival times (default 1), the
/// `(p, q)` grid with `ln|W|²`, and the ranked fractional revivals.
pub fn fig5(cfg: &RunConfig) -> Result<Dataset> {
    let ac = Autocorrelation::new(cfg.revival(single_j(cfg)?)?)?;
    let ts = ac.timescales;
    let params = MorletParams::new(cfg.omega0())?;
    let mut header = cfg.header("fig5");
    header.extend(timescale_header(&ac));

    let lines = SpectralLines::from_autocorrelation(&ac);
    let span = cfg.t_span.unwrap_or(1.0);
    let points = cfg.samples.unwrap_or(2001);
    let mut cols = vec!["tau_bar".to_string()];
    cols.extend((1..=cfg.p_max).map(|p| format!("p={p}")));
    let mut scan = Table::with_columns(header.clone(), cols);
    let scales: Vec<f64> = (1..=cfg.p_max).map(|p| harmonic_calibration(&ts, p, &params).1).collect();
    for i in 0..points {
        let tb = span * i as f64 / (points - 1) as f64;
        let mut row: Vec<Cell> = vec![tb.into()];
        row.extend(scales.iter().map(|&s| Cell::from(lines.transform(s, tb * ts.t_rev, &params).norm_sqr())));
        scan.push(row);
    }

    let grid = w_pq_grid(&ac, cfg.p_max, cfg.q_max as i64, &params)?;
    let mut g = Table::new(header.clone(), &["p", "q", "tau_bar", "re_w", "im_w", "ln_abs_w_sq"]);
    if let GridAxes::Harmonic { p, q } = &grid.axes {
        for (row, &pp) in grid.values.iter().zip(p) {
            for (w, &qq) in row.iter().zip(q) {
                g.push(vec![
                    pp.into(),
                    qq.into(),
                    (shift_for(qq, pp, &ts) / ts.t_rev).into(),
                    w.re.into(),
                    w.im.into(),
                    w.norm_sqr().ln().into(),
                ]);
            }
        }
    }

    let policy = DetectionPolicy::default();
    let mut fh = header;
    fh.push(("threshold".into(), policy.threshold.to_string()));
    let mut f = Table::new(fh, &["numerator", "denominator", "fraction", "strength", "contrast", "cells"]);
    for d in detect_fractional_revivals(&grid, &policy)? {
        f.push(vec![
            d.numerator.into(),
            d.denominator.into(),
            d.fraction().into(),
            d.strength.into(),
            d.contrast.into(),
            d.cells.len().into(),
        ]);
    }
    Ok(vec![("fig5a".into(), scan), ("fig5b".into(), g), ("fig5_fractions".into(), f)])
}

/// Dataset for figure `n`.
pub fn figure(n: u8, cfg: &RunConfig) -> Result<Dataset> {
    match n {
        1 => fig1(cfg),
        2 => fig2(cfg),
        3 => fig3(cfg),
        4 => fig4(cfg),
        5 => fig5(cfg),
        other => Err(Error::Config(format!("no figure {other}; expected 1 to 5"))),
    }
}

/// Default preset for `fig n`.
pub fn default_preset(n: u8) -> &'static str {
    match n {
        1 => "fig1-right",
        2 => "fig2-c",
        3 => "fig3",
        4 => "fig4",
        _ => "fig5",
    }
}
