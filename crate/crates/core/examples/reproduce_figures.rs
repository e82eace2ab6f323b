//! Writes every figure dataset to `figures/` (or the first argument).

use std::path::PathBuf;

use revivalkit::config::Settings;
use revivalkit::pipeline::{default_preset, figure};

fn main() -> revivalkit::Result<()> {
    let out = std::env::args().nth(1).map_or_else(|| PathBuf::from("figures"), PathBuf::from);
    for n in 1..=5 {
        let cfg = Settings::preset(default_preset(n))?.resolve()?;
        for (stem, table) in figure(n, &cfg)? {
            let path = table.write(&out, &stem, cfg.format)?;
            println!("{} ({} rows)", path.display(), table.rows.len());
        }
    }
    Ok(())
}
