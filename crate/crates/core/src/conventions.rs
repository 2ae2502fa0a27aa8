//! Quadrature conventions and unit conversions.
//!
//! A mode amplitude is written `α = α⁺ + iα⁻`. In *Wigner units* the vacuum
//! Wigner function is `(2/π)·exp(−2|α|²)`, so each vacuum quadrature has
//! variance 1/4 and `X⁺ = (a + a†)/2`. Experimental reporting uses *SNL units*
//! (shot-noise limit), where the vacuum variance is 1 and `X⁺ = a + a†`.
//! Variances convert by a factor 4, amplitudes and outcomes by a factor 2.

/// Fixed quadrature convention used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conventions;

impl Conventions {
    pub const VACUUM_VARIANCE_WIG: f64 = 0.25;
    pub const VACUUM_VARIANCE_SNL: f64 = 1.0;
    /// `V_snl = 4 · V_wig`.
    pub const VARIANCE_FACTOR: f64 = 4.0;
    /// `x_snl = 2 · x_wig`.
    pub const AMPLITUDE_FACTOR: f64 = 2.0;
}

/// Default truncation of the number basis.
pub const DEFAULT_DIM: usize = 40;
/// Extra levels used when exponentiating single-mode generators.
pub const OPERATOR_BUFFER: usize = 20;
/// Largest population allowed outside the retained number basis.
pub const TAIL_MASS_LIMIT: f64 = 1e-8;

#[inline]
pub fn outcome_wig_to_snl(x_wig: f64) -> f64 {
    x_wig * Conventions::AMPLITUDE_FACTOR
}

#[inline]
pub fn outcome_snl_to_wig(x_snl: f64) -> f64 {
    x_snl / Conventions::AMPLITUDE_FACTOR
}

#[inline]
pub fn variance_wig_to_snl(v_wig: f64) -> f64 {
    v_wig * Conventions::VARIANCE_FACTOR
}

#[inline]
pub fn variance_snl_to_wig(v_snl: f64) -> f64 {
    v_snl / Conventions::VARIANCE_FACTOR
}

/// Noise level in dB relative to the shot-noise limit, as an SNL variance.
#[inline]
pub fn db_to_variance(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn variance_to_db(v_snl: f64) -> f64 {
    10.0 * v_snl.log10()
}

/// Transmissivity `T = 1 − R`.
#[inline]
pub fn transmissivity(reflectivity: f64) -> f64 {
    1.0 - reflectivity
}

pub(crate) fn check_reflectivity(r: f64) -> crate::Result<()> {
    if !(0.0..=1.0).contains(&r) || !r.is_finite() {
        return Err(crate::Error::param(
            "reflectivity",
            format!("{r} not in [0, 1]"),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_variances_differ_by_four() {
        assert_eq!(
            variance_wig_to_snl(Conventions::VACUUM_VARIANCE_WIG),
            Conventions::VACUUM_VARIANCE_SNL
        );
        assert_eq!(outcome_wig_to_snl(0.025), 0.05);
        assert_eq!(outcome_snl_to_wig(outcome_wig_to_snl(0.3)), 0.3);
    }

    #[test]
    fn db_round_trip() {
        let v = db_to_variance(-4.5);
        assert!((v - 0.354_813).abs() < 1e-6);
        assert!((variance_to_db(v) + 4.5).abs() < 1e-12);
    }
}
