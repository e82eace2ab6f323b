//! Admissibility of (a, b, m) and the exceptional Jacobi polynomials.

use revivalkit::xjacobi::{denominator_zero_scan, validate, xm_eval, XmParams, ZERO_SCAN_POINTS};

fn main() -> revivalkit::Result<()> {
    for (a, b, m) in [(4.4, -1.0 / 3.0, 6), (2.5, -0.5, 3), (4.5, 2.0, 3)] {
        let report = validate(a, b, m);
        println!("(a={a:.3}, b={b:.3}, m={m}): {}", report.describe());
    }

    let p = XmParams::new(4.4, -1.0 / 3.0, 6)?;
    for n in 6..10 {
        let row: Vec<String> = [-0.9, -0.3, 0.3, 0.9]
            .iter()
            .map(|&x| xm_eval(n, &p, x).map(|v| format!("{v:+.6e}")))
            .collect::<revivalkit::Result<_>>()?;
        println!("P_{n}: {}", row.join("  "));
    }

    let forced = XmParams::with_override(-0.5, 0.5, 1);
    println!("denominator zeros for (-0.5, 0.5, 1): {:?}", denominator_zero_scan(&forced, ZERO_SCAN_POINTS));
    Ok(())
}
