//! Weights and photon statistics of the Gazeau-Klauder coherent state.

use revivalkit::gkcs::{mandel_q, mean_n, weights, CoherentState, DEFAULT_N_TRUNC};
use revivalkit::scarf::ModelParams;
use revivalkit::xjacobi::XmParams;

fn main() -> revivalkit::Result<()> {
    let model = ModelParams::new(XmParams::new(4.4, -1.0 / 3.0, 6)?, 1.0)?;
    for j in [10.0, 20.0, 40.0, 100.0] {
        let w = weights(&model, j, DEFAULT_N_TRUNC)?;
        println!(
            "J={j:>5}: peak at n={:>2}, <n>={:.4}, Q={:+.4}, tail <= {:.1e}",
            w.argmax(),
            mean_n(&model, j)?,
            mandel_q(&model, j)?,
            w.tail_bound
        );
    }

    let state = CoherentState::at_time(model, 10.0, 0.3, DEFAULT_N_TRUNC)?;
    // only labels n >= m have eigenfunctions to synthesize
    println!(
        "weight on n >= m: {:.12}, ∫|ψ|² by quadrature: {:.12}",
        state.synthesized_weight(),
        state.norm_sq_quadrature()?
    );
    Ok(())
}
