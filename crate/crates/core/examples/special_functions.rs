//! Gamma, Bessel K0, hypergeometric series and Jacobi polynomials.

use revivalkit::specfun::{bessel_k0, gamma, hyper_1f2, jacobi_poly, ln_gamma};

fn main() -> revivalkit::Result<()> {
    println!("Γ(4.5)        = {:.15}", gamma(4.5)?);
    let (lg, sign) = ln_gamma(-2.5)?;
    println!("ln|Γ(-2.5)|   = {lg:.15} (sign {sign})");
    println!("K0(0.3)       = {:.15}", bessel_k0(0.3)?);

    let s = hyper_1f2(1.0, 2.2, 2.2, 25.0)?;
    println!("1F2(1;2.2,2.2;25) = {:.15e} after {} terms", s.value, s.terms_used);

    for n in 0..5 {
        println!("P_{n}^(1.5,-1/3)(0.4) = {:+.15}", jacobi_poly(n, 1.5, -1.0 / 3.0, 0.4));
    }
    Ok(())
}
