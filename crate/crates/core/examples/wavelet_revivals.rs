//! Harmonic wavelet grid and the fractional revivals it reveals.

use revivalkit::config::Settings;
use revivalkit::cwt::{detect_fractional_revivals, w_pq_grid, DetectionPolicy, MorletParams};
use revivalkit::revival::Autocorrelation;

fn main() -> revivalkit::Result<()> {
    let cfg = Settings::preset("fig5")?.resolve()?;
    let ac = Autocorrelation::new(cfg.revival(cfg.j[0])?)?;
    let grid = w_pq_grid(&ac, cfg.p_max, cfg.q_max as i64, &MorletParams::new(cfg.omega0())?)?;

    for (p, row) in grid.log_power().iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:7.2}")).collect();
        println!("p={} ln|W|²: {}", p + 1, cells.join(""));
    }
    for d in detect_fractional_revivals(&grid, &DetectionPolicy::default())? {
        if d.fraction() < 1.0 {
            println!("{}/{}  strength {:.3}", d.numerator, d.denominator, d.strength);
        }
    }
    Ok(())
}
