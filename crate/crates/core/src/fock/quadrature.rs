//! Amplitude-quadrature eigenfunctions `⟨n|x⟩` in Wigner units.
//!
//! `⟨n|x⟩ = (2/π)^{1/4} Hₙ(√2 x) e^{−x²} / √(2ⁿ n!)`, with `|x⟩` delta-normalized
//! so `|⟨ψ|x⟩|²` is a probability density in `x`. Values come from the
//! normalized upward recurrence
//! `ψₙ₊₁ = (2x/√(n+1)) ψₙ − √(n/(n+1)) ψₙ₋₁`,
//! which never forms `Hₙ` or `n!` and so does not overflow.

use std::f64::consts::PI;

/// `⟨n|x⟩` for `n = 0..count`.
pub fn quadrature_wavefunctions(x: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    let psi0 = (2.0 / PI).powf(0.25) * (-x * x).exp();
    out.push(psi0);
    if count == 1 {
        return out;
    }
    out.push(2.0 * x * psi0);
    for n in 1..count - 1 {
        let nf = n as f64;
        let next = 2.0 * x / (nf + 1.0).sqrt() * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// `⟨n|x⟩` for a single `n`.
pub fn quadrature_wavefunction(n: usize, x: f64) -> f64 {
    quadrature_wavefunctions(x, n + 1)[n]
}
