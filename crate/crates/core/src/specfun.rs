//! Special functions: log-gamma, digamma, and the classical gamma-function
//! inequalities used when bounding the Jeffreys GEV prior.
//!
//! Coefficients below are regenerated by `scripts/oracles.py coeffs`.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};

/// Euler–Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

/// λ = (π²/6 − γ)/2, the exponent constant of Alzer's gamma-function bound.
pub const ALZER_LAMBDA: f64 = 0.533_859_200_973_346_787_9;

/// π²/6 = ζ(2).
pub const PI2_OVER_6: f64 = 1.644_934_066_848_226_436_5;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_8;

/// B_{2k} / (2k(2k-1)), k = 1..=10.
const STIRLING: [f64; 10] = [
    0.083_333_333_333_333_333_33,
    -0.002_777_777_777_777_777_777_8,
    0.000_793_650_793_650_793_650_79,
    -0.000_595_238_095_238_095_238_1,
    0.000_841_750_841_750_841_750_84,
    -0.001_917_526_917_526_917_526_9,
    0.006_410_256_410_256_410_256_4,
    -0.029_550_653_594_771_241_83,
    0.179_644_372_368_830_573_16,
    -1.392_432_216_905_901_116_4,
];

/// B_{2k} / (2k), k = 1..=10.
const DIGAMMA_ASYMPTOTIC: [f64; 10] = [
    0.083_333_333_333_333_333_333,
    -0.008_333_333_333_333_333_333_3,
    0.003_968_253_968_253_968_254,
    -0.004_166_666_666_666_666_666_7,
    0.007_575_757_575_757_575_757_6,
    -0.021_092_796_092_796_092_796,
    0.083_333_333_333_333_333_333,
    -0.443_259_803_921_568_627_45,
    3.053_954_330_270_119_743_8,
    -26.456_212_121_212_121_212,
];

/// ζ(k) for k = 2..=40; `ZETA[k - 2]`.
pub(crate) const ZETA: [f64; 39] = [
    1.644_934_066_848_226_436_5,
    1.202_056_903_159_594_285_4,
    1.082_323_233_711_138_191_5,
    1.036_927_755_143_369_926_3,
    1.017_343_061_984_449_139_7,
    1.008_349_277_381_922_826_8,
    1.004_077_356_197_944_339_4,
    1.002_008_392_826_082_214_4,
    1.000_994_575_127_818_085_3,
    1.000_494_188_604_119_464_6,
    1.000_246_086_553_308_048_3,
    1.000_122_713_347_578_489_1,
    1.000_061_248_135_058_704_8,
    1.000_030_588_236_307_020_5,
    1.000_015_282_259_408_651_9,
    1.000_007_637_197_637_899_8,
    1.000_003_817_293_264_999_8,
    1.000_001_908_212_716_553_9,
    1.000_000_953_962_033_872_8,
    1.000_000_476_932_986_787_8,
    1.000_000_238_450_502_727_7,
    1.000_000_119_219_925_965_3,
    1.000_000_059_608_189_051_3,
    1.000_000_029_803_503_514_7,
    1.000_000_014_901_554_828_4,
    1.000_000_007_450_711_789_8,
    1.000_000_003_725_334_024_8,
    1.000_000_001_862_659_723_5,
    1.000_000_000_931_327_432_4,
    1.000_000_000_465_662_906_5,
    1.000_000_000_232_831_183_4,
    1.000_000_000_116_415_501_7,
    1.000_000_000_058_207_720_9,
    1.000_000_000_029_103_850_4,
    1.000_000_000_014_551_921_9,
    1.000_000_000_007_275_959_8,
    1.000_000_000_003_637_979_5,
    1.000_000_000_001_818_989_7,
    1.000_000_000_000_909_494_8,
];

fn check_positive(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(name, format!("argument must be finite and positive, got {x}")))
    }
}

/// ln Γ(2+ε) for |ε| ≤ 1/2 from (1−γ)ε + Σ (−ε)^k (ζ(k)−1)/k.
fn ln_gamma_2p_series(eps: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = -eps;
    for (j, z) in ZETA.iter().enumerate() {
        pow *= -eps;
        let term = (z - 1.0) * pow / (j + 2) as f64;
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum + (1.0 - EULER_GAMMA) * eps
}

fn ln_gamma_stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut pow = inv;
    for c in STIRLING {
        series += c * pow;
        pow *= inv2;
    }
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + series
}

/// Natural log of the gamma function for `x > 0`; the caller guarantees the domain.
pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x >= 10.0 {
        return ln_gamma_stirling(x);
    }
    if x < 0.5 {
        return ln_gamma_unchecked(x + 1.0) - x.ln();
    }
    if x < 1.5 {
        let eps = x - 1.0;
        return ln_gamma_2p_series(eps) - eps.ln_1p();
    }
    let mut shifted = x;
    let mut prod = 1.0;
    while shifted > 2.5 {
        shifted -= 1.0;
        prod *= shifted;
    }
    ln_gamma_2p_series(shifted - 2.0) + prod.ln()
}

pub(crate) fn digamma_unchecked(x: f64) -> f64 {
    let mut acc = 0.0;
    let mut y = x;
    while y < 10.0 {
        acc -= 1.0 / y;
        y += 1.0;
    }
    let inv2 = 1.0 / (y * y);
    let mut series = 0.0;
    let mut pow = inv2;
    for c in DIGAMMA_ASYMPTOTIC {
        series += c * pow;
        pow *= inv2;
    }
    acc + y.ln() - 0.5 / y - series
}

/// ln Γ(x) for finite `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    check_positive("log_gamma", x)?;
    Ok(ln_gamma_unchecked(x))
}

/// ψ(x) = d/dx ln Γ(x) for finite `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    check_positive("digamma", x)?;
    Ok(digamma_unchecked(x))
}

/// Alzer's bound x^{λ(x−1)−γ}. Γ(x) exceeds it for x > 1.
pub fn alzer_lower_bound(x: f64) -> Result<f64> {
    check_positive("alzer_lower_bound", x)?;
    Ok(((ALZER_LAMBDA * (x - 1.0) - EULER_GAMMA) * x.ln()).exp())
}

/// Residual of the Legendre duplication formula in log form; zero up to rounding.
pub fn duplication_residual(z: f64) -> Result<f64> {
    check_positive("duplication_residual", z)?;
    let lhs = ln_gamma_unchecked(2.0 * z);
    let rhs = -0.5 * (2.0 * PI).ln()
        + (2.0 * z - 0.5) * LN_2
        + ln_gamma_unchecked(z)
        + ln_gamma_unchecked(z + 0.5);
    Ok(lhs - rhs)
}

/// The upper bound ψ(1+ξ) < ln(1+ξ) − (1+ξ)^{-1}/2, valid for ξ > 0.
pub fn digamma_upper_bound(xi: f64) -> f64 {
    xi.ln_1p() - 0.5 / (1.0 + xi)
}

/// Numerically stable log(Σ exp(a_i)); −∞ for an empty or all −∞ input.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return max;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// log(e^a + e^b).
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    if hi == f64::INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

#[cfg(test)]
mod tests {
    use super::*;

    // mpmath, 50 digits (scripts/oracles.py values).
    const LGAMMA_REF: [(f64, f64); 11] = [
        (0.001, 6.907_178_885_383_853_661_7),
        (0.1, 2.252_712_651_734_205_902),
        (0.5, 0.572_364_942_924_700_087_07),
        (0.9999, 0.000_057_729_791_561_193_862_808),
        (1.5, -0.120_782_237_635_245_222_35),
        (2.0001, 0.000_042_281_658_112_919_946_317),
        (3.7, 1.428_072_326_665_388_129_2),
        (7.3, 7.147_892_523_022_248_692_1),
        (25.5, 56.389_167_643_719_946_744),
        (150.0, 600.009_470_555_327_428_11),
        (1000.0, 5_905.220_423_209_181_211_8),
    ];

    #[test]
    fn log_gamma_matches_high_precision_reference() {
        for (x, want) in LGAMMA_REF {
            let got = log_gamma(x).unwrap();
            let rel = ((got - want) / want).abs();
            assert!(rel <= 1e-12, "x={x}: got {got}, want {want}, rel {rel:e}");
        }
    }

    #[test]
    fn log_gamma_special_points() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-16);
        let half = 0.5 * PI.ln();
        assert!((log_gamma(0.5).unwrap() - half).abs() < 1e-15);
        assert!((log_gamma(0.5).unwrap() - 0.572_364_9).abs() < 1e-7);
    }

    #[test]
    fn log_gamma_rejects_bad_domain() {
        for x in [0.0, -1.0, f64::NAN, f64::INFINITY, -0.5] {
            assert!(log_gamma(x).is_err(), "x={x}");
            assert!(digamma(x).is_err(), "x={x}");
        }
    }

    #[test]
    fn log_gamma_branches_agree_at_switch_points() {
        for x in [0.5, 1.5, 2.5, 3.5, 10.0] {
            let below = ln_gamma_unchecked(x - 1e-12);
            let above = ln_gamma_unchecked(x + 1e-12);
            assert!((below - above).abs() < 1e-11, "x={x}: {below} vs {above}");
        }
    }

    #[test]
    fn digamma_reference_values() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-15);
        assert!((digamma(1.0).unwrap() + 0.57722).abs() < 1e-5);
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-15);
        for (x, want) in [
            (0.1, -10.423_754_940_411_076_795),
            (5.5, 1.611_093_148_581_751_123_7),
            (40.0, 3.676_327_374_034_843_125_9),
        ] {
            let got = digamma(x).unwrap();
            assert!(((got - want) / want).abs() < 1e-13, "x={x}: {got}");
        }
    }

    #[test]
    fn digamma_matches_central_difference_of_log_gamma() {
        let h = 1e-5;
        let mut x: f64 = 0.1;
        while x <= 100.0 {
            let fd = (ln_gamma_unchecked(x + h) - ln_gamma_unchecked(x - h)) / (2.0 * h);
            let d = digamma(x).unwrap();
            assert!((d - fd).abs() <= 1e-6, "x={x}: psi={d} fd={fd}");
            x *= 1.07;
        }
        // frozen from the finite-difference oracle at 5.5
        let fd55 = (ln_gamma_unchecked(5.5 + h) - ln_gamma_unchecked(5.5 - h)) / (2.0 * h);
        assert!((fd55 - 1.611_093_148_6).abs() < 1e-6);
    }

    #[test]
    fn alzer_examples() {
        assert_eq!(alzer_lower_bound(1.0).unwrap(), 1.0);
        let two = alzer_lower_bound(2.0).unwrap();
        assert!((two - ((ALZER_LAMBDA - EULER_GAMMA) * LN_2).exp()).abs() < 1e-15);
        assert!((two - 2f64.powf(0.534 - 0.57722)).abs() < 1e-3);
        let ten = alzer_lower_bound(10.0).unwrap();
        assert!(ten < log_gamma(10.0).unwrap().exp());
        assert!(ten < 362_880.0);
    }

    #[test]
    fn alzer_bound_holds_above_one_and_reverses_below() {
        for i in 0..200 {
            let x = 10f64.powf(-2.0 + 4.0 * i as f64 / 199.0);
            if (x - 1.0).abs() < 1e-3 {
                continue;
            }
            let gamma = ln_gamma_unchecked(x).exp();
            let bound = alzer_lower_bound(x).unwrap();
            if x > 1.0 {
                assert!(gamma > bound, "x={x}");
            } else {
                // On (0, 1) the same expression is an upper bound.
                assert!(gamma < bound, "x={x}");
            }
        }
    }

    #[test]
    fn constants() {
        assert!((EULER_GAMMA - 0.57722).abs() < 5e-6);
        assert!((ALZER_LAMBDA - (PI2_OVER_6 - EULER_GAMMA) / 2.0).abs() < 1e-15);
        assert!((PI2_OVER_6 - PI * PI / 6.0).abs() < 1e-15);
        assert!((ZETA[0] - PI2_OVER_6).abs() < 1e-16);
    }

    #[test]
    fn duplication_examples() {
        for z in [1.0, 3.5, 0.75] {
            assert!(duplication_residual(z).unwrap().abs() <= 1e-12, "z={z}");
        }
    }

    #[test]
    fn log_sum_exp_handles_extremes() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]), f64::NEG_INFINITY);
        assert!((log_sum_exp(&[1000.0, 1000.0]) - (1000.0 + LN_2)).abs() < 1e-12);
        assert!((log_add_exp(-1e4, 0.0)).abs() < 1e-300);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, 2.0), 2.0);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn recurrence(x in 0.01f64..200.0) {
                let r = digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x;
                prop_assert!(r.abs() <= 1e-10);
                let g = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap() - x.ln();
                prop_assert!(g.abs() <= 1e-11 * (1.0 + log_gamma(x + 1.0).unwrap().abs()));
            }

            #[test]
            fn duplication(z in 0.01f64..100.0) {
                prop_assert!(duplication_residual(z).unwrap().abs() <= 1e-10);
            }

            #[test]
            fn digamma_below_qiu_vuorinen_bound(xi in 1e-3f64..50.0) {
                prop_assert!(digamma(1.0 + xi).unwrap() < digamma_upper_bound(xi));
            }
        }
    }
}
