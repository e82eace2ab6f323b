//! Runs the self-consistency suite on the fig3 preset.

use revivalkit::config::Settings;
use revivalkit::verify::{run_suite, VerifyOptions};

fn main() -> revivalkit::Result<()> {
    let cfg = Settings::preset("fig3")?.resolve()?;
    let checks = run_suite(&cfg, &VerifyOptions::default())?;
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    println!("{failed} of {} checks failed", checks.len());
    Ok(())
}
