//! Levels, potential and eigenfunction checks for the extended Scarf I well.

use revivalkit::scarf::{energy, interior_grid, orthonormality_matrix, potential, schrodinger_residual, ModelParams};
use revivalkit::xjacobi::XmParams;

fn main() -> revivalkit::Result<()> {
    let model = ModelParams::new(XmParams::new(4.4, -1.0 / 3.0, 6)?, 1.0)?;
    println!("domain |x| < {:.6}", model.half_width());
    for n in 6..12 {
        println!("E_{n} = {:.6}", energy(&model, n)?);
    }
    for x in [-0.5, 0.0, 0.5] {
        println!("V({x:+}) = {:.6}", potential(&model, x)?);
    }

    let grid = interior_grid(&model, 0.9, 2000);
    for n in 6..9 {
        let r = schrodinger_residual(&model, n, &grid)?;
        println!("residual n={n}: {:.2e}", r.residual);
    }
    let g = orthonormality_matrix(&model, 6, 4)?;
    for row in g {
        println!("{}", row.iter().map(|v| format!("{v:+.2e}")).collect::<Vec<_>>().join(" "));
    }
    Ok(())
}
