//! Return probability |A(t)|² of the fig3 preset and its revival.

use revivalkit::config::Settings;
use revivalkit::revival::{peaks_above, sample_signal, Autocorrelation};

fn main() -> revivalkit::Result<()> {
    let cfg = Settings::preset("fig3")?.resolve()?;
    let ac = Autocorrelation::new(cfg.revival(10.0)?)?;
    let ts = ac.timescales;
    println!("T_cl = {:.4}, T_rev = {:.3}, ratio = {:.4}", ts.t_cl, ts.t_rev, ts.ratio);

    let sig = sample_signal(&ac, 0.0, 1.1 * ts.t_rev, (1.1 * ts.ratio * 32.0) as usize)?;
    let peaks = peaks_above(&sig.values, 0.5);
    for i in peaks {
        println!("|A|² = {:.4} at t/T_rev = {:.4}", sig.values[i], sig.time(i) / ts.t_rev);
    }
    Ok(())
}
