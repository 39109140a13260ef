//! Log-space double-exponential (tanh-sinh) quadrature.
//!
//! Integrands are supplied as log densities and accumulated with a running
//! log-sum-exp, so integrals whose values under- or overflow `f64` (the
//! divergent normalizing constants reach e^{10^4}) are still representable.
//! Integrable algebraic endpoint singularities are handled natively by the
//! double-exponential node clustering.

use std::f64::consts::FRAC_PI_2;

/// Outcome of a quadrature: `ln_value` is ln ∫ f, `rel_change` the relative
/// difference between the last two refinement levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub ln_value: f64,
    pub rel_change: f64,
    pub converged: bool,
    pub evals: usize,
}

impl QuadResult {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }

    fn zero() -> Self {
        QuadResult { ln_value: f64::NEG_INFINITY, rel_change: 0.0, converged: true, evals: 0 }
    }
}

/// Running log-sum-exp.
#[derive(Debug, Clone, Copy)]
pub struct LogAccumulator {
    max: f64,
    scaled: f64,
}

impl Default for LogAccumulator {
    fn default() -> Self {
        LogAccumulator { max: f64::NEG_INFINITY, scaled: 0.0 }
    }
}

impl LogAccumulator {
    pub fn push(&mut self, ln_term: f64) {
        if ln_term == f64::NEG_INFINITY {
            return;
        }
        if ln_term > self.max {
            self.scaled = self.scaled * (self.max - ln_term).exp() + 1.0;
            self.max = ln_term;
        } else {
            self.scaled += (ln_term - self.max).exp();
        }
    }

    pub fn merge(&mut self, other: &LogAccumulator) {
        if other.max == f64::NEG_INFINITY {
            return;
        }
        if other.max > self.max {
            self.scaled = self.scaled * (self.max - other.max).exp() + other.scaled;
            self.max = other.max;
        } else {
            self.scaled += other.scaled * (other.max - self.max).exp();
        }
    }

    pub fn ln_sum(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

/// Tuning of [`ln_integrate`].
#[derive(Debug, Clone, Copy)]
pub struct TanhSinh {
    /// Relative change between successive levels accepted as converged.
    pub tol: f64,
    /// Deepest refinement level (step 2^{-max_level}).
    pub max_level: u32,
    /// Levels always computed before a convergence test is made.
    pub min_level: u32,
}

impl Default for TanhSinh {
    fn default() -> Self {
        TanhSinh { tol: 1e-10, max_level: 9, min_level: 3 }
    }
}

const T_MAX: f64 = 6.6;

/// Node offset from the nearest endpoint (in units of the half width) and weight
/// factor for abscissa `t`.
#[inline]
fn node(t: f64) -> (f64, f64) {
    let u = FRAC_PI_2 * t.abs().sinh();
    let e = (-2.0 * u).exp();
    let dist = 2.0 * e / (1.0 + e);
    let weight = FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
    (dist, weight)
}

impl TanhSinh {
    pub fn with_tol(tol: f64) -> Self {
        TanhSinh { tol, ..Default::default() }
    }

    /// ln ∫_a^b exp(ln_f(x)) dx for finite a < b.
    pub fn ln_integrate<F: Fn(f64) -> f64>(&self, ln_f: F, a: f64, b: f64) -> QuadResult {
        if !(a < b) {
            return QuadResult::zero();
        }
        let half = 0.5 * (b - a);
        let mid = a + half;
        let ln_half = half.ln();
        let mut evals = 0usize;
        let mut acc = LogAccumulator::default();
        let mut bad = false;

        // false when the node has collapsed onto an endpoint
        let eval_at = |t: f64, acc: &mut LogAccumulator, evals: &mut usize, bad: &mut bool| -> bool {
            let (dist, w) = node(t);
            let off = half * dist;
            let x = if t > 0.0 {
                b - off
            } else if t < 0.0 {
                a + off
            } else {
                mid
            };
            if x <= a || x >= b {
                return false;
            }
            let lf = ln_f(x);
            *evals += 1;
            if lf.is_nan() || lf == f64::INFINITY {
                *bad = true;
                return true;
            }
            acc.push(lf + w.ln() + ln_half);
            true
        };

        // level 0: integer abscissae
        eval_at(0.0, &mut acc, &mut evals, &mut bad);
        let mut k = 1.0;
        while k <= T_MAX {
            let l = eval_at(k, &mut acc, &mut evals, &mut bad);
            let r = eval_at(-k, &mut acc, &mut evals, &mut bad);
            if !l && !r {
                break;
            }
            k += 1.0;
        }
        let mut h = 1.0f64;
        let mut prev = acc.ln_sum() + h.ln();
        let mut rel_change = f64::INFINITY;
        for level in 1..=self.max_level {
            h *= 0.5;
            let mut j = 1usize;
            loop {
                let t = j as f64 * h;
                if t > T_MAX {
                    break;
                }
                let l = eval_at(t, &mut acc, &mut evals, &mut bad);
                let r = eval_at(-t, &mut acc, &mut evals, &mut bad);
                if !l && !r {
                    break;
                }
                j += 2;
            }
            if bad {
                return QuadResult { ln_value: f64::NAN, rel_change: f64::INFINITY, converged: false, evals };
            }
            let cur = acc.ln_sum() + h.ln();
            rel_change = if cur == f64::NEG_INFINITY && prev == f64::NEG_INFINITY {
                0.0
            } else {
                (1.0 - (prev - cur).exp()).abs()
            };
            prev = cur;
            if level >= self.min_level && rel_change <= self.tol {
                return QuadResult { ln_value: cur, rel_change, converged: true, evals };
            }
        }
        QuadResult { ln_value: prev, rel_change, converged: false, evals }
    }

    /// ln ∫_lo^∞ exp(ln_f(x)) dx for `lo > 0`, through x = lo/s. Nodes whose x overflows carry no weight.
    pub fn ln_integrate_upper_tail<F: Fn(f64) -> f64>(&self, ln_f: F, lo: f64) -> QuadResult {
        assert!(lo > 0.0, "tail start must be positive");
        let ln_lo = lo.ln();
        self.ln_integrate(
            |s| {
                let x = lo / s;
                if x.is_finite() {
                    ln_f(x) + ln_lo - 2.0 * s.ln()
                } else {
                    f64::NEG_INFINITY
                }
            },
            0.0,
            1.0,
        )
    }

    /// ln ∫_{−∞}^{−hi} exp(ln_f(x)) dx for `hi > 0`, through x = −hi/s.
    pub fn ln_integrate_lower_tail<F: Fn(f64) -> f64>(&self, ln_f: F, hi: f64) -> QuadResult {
        self.ln_integrate_upper_tail(|x| ln_f(-x), hi)
    }
}

/// ln ∫_a^b exp(ln_f) with default tuning.
pub fn ln_integrate<F: Fn(f64) -> f64>(ln_f: F, a: f64, b: f64) -> QuadResult {
    TanhSinh::default().ln_integrate(ln_f, a, b)
}

/// ∫_a^b f for a non-negative integrand, returned in linear scale.
pub fn integrate_nonneg<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, bool) {
    let r = TanhSinh::with_tol(tol).ln_integrate(|x| f(x).ln(), a, b);
    (r.value(), r.converged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_and_exponential() {
        let r = ln_integrate(|x| (x * x).ln(), 0.0, 3.0);
        assert!(r.converged);
        assert!((r.value() - 9.0).abs() < 1e-12);
        let r = ln_integrate(|x| -x, 0.0, 50.0);
        assert!((r.value() - (1.0 - (-50f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularities() {
        // ∫_0^1 x^{-1/2} = 2
        let r = ln_integrate(|x| -0.5 * x.ln(), 0.0, 1.0);
        assert!((r.value() - 2.0).abs() < 1e-7, "{r:?}");
        // ∫_0^1 ln(1/x) = 1
        let r = ln_integrate(|x| (-x.ln()).ln(), 0.0, 1.0);
        assert!((r.value() - 1.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn huge_magnitudes_in_log_space() {
        // ∫_0^{2000} e^x = e^{2000} − 1
        let r = ln_integrate(|x| x, 0.0, 2000.0);
        assert!(r.converged);
        assert!((r.ln_value - 2000.0).abs() < 1e-9);
        let r = ln_integrate(|x| -x - 5000.0, 0.0, 1.0);
        assert!((r.ln_value - (-5000.0 + (1.0 - (-1f64).exp()).ln())).abs() < 1e-10);
    }

    #[test]
    fn tails() {
        let ts = TanhSinh::default();
        // ∫_1^∞ x^{-2} = 1
        let r = ts.ln_integrate_upper_tail(|x| -2.0 * x.ln(), 1.0);
        assert!((r.value() - 1.0).abs() < 1e-12);
        // ∫_{2}^∞ dx/(1+x²) = π/2 − atan 2
        let r = ts.ln_integrate_upper_tail(|x| -(1.0 + x * x).ln(), 2.0);
        assert!((r.value() - (PI / 2.0 - 2f64.atan())).abs() < 1e-12);
        // ∫_{-∞}^{-3} e^{x} = e^{-3}
        let r = ts.ln_integrate_lower_tail(|x| x, 3.0);
        assert!((r.value() - (-3f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn divergent_tail_is_not_converged() {
        let ts = TanhSinh::default();
        let r = ts.ln_integrate_upper_tail(|x| -x.ln(), 1.0);
        assert!(!r.converged, "{r:?}");
        let r = ts.ln_integrate_upper_tail(|x| x, 1.0);
        assert!(!r.converged || r.ln_value > 100.0, "{r:?}");
    }

    #[test]
    fn zero_and_nan_integrands() {
        let r = ln_integrate(|_| f64::NEG_INFINITY, 0.0, 1.0);
        assert!(r.converged && r.ln_value == f64::NEG_INFINITY);
        let r = ln_integrate(|_| f64::NAN, 0.0, 1.0);
        assert!(!r.converged);
        assert_eq!(ln_integrate(|x| x, 1.0, 1.0).ln_value, f64::NEG_INFINITY);
    }

    #[test]
    fn accumulator_merge_is_order_free() {
        let terms = [-3.0, 700.0, 2.0, -1e5, 699.5];
        let mut a = LogAccumulator::default();
        terms.iter().for_each(|t| a.push(*t));
        let mut left = LogAccumulator::default();
        let mut right = LogAccumulator::default();
        terms[..2].iter().for_each(|t| left.push(*t));
        terms[2..].iter().for_each(|t| right.push(*t));
        right.merge(&left);
        assert!((a.ln_sum() - right.ln_sum()).abs() < 1e-12);
    }
}
