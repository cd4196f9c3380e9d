//! Log-Gamma helpers.
//!
//! `ln Γ` itself comes from `statrs`. Differences `ln Γ(a + b) - ln Γ(a)` for
//! large `a` lose absolute precision when taken as a plain difference of two
//! huge numbers, so they are evaluated from the Stirling series directly.

pub use statrs::function::gamma::ln_gamma;

// B_{2k} / (2k (2k-1)) for k = 1..=7
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
];

fn stirling_tail(z: f64) -> f64 {
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut term = inv;
    let mut sum = 0.0;
    for c in STIRLING {
        sum += c * term;
        term *= inv2;
    }
    sum
}

/// `ln Γ(a + b) - ln Γ(a)` for `a > 0`, `a + b > 0`.
pub fn ln_gamma_ratio(a: f64, b: f64) -> f64 {
    debug_assert!(a > 0.0 && a + b > 0.0);
    if b == 0.0 {
        return 0.0;
    }
    if a < 20.0 || a + b < 20.0 {
        return ln_gamma(a + b) - ln_gamma(a);
    }
    let c = a + b;
    // (c - 1/2) ln c - (a - 1/2) ln a - b, rearranged around ln(1 + b/a)
    (a - 0.5) * (b / a).ln_1p() + b * c.ln() - b + stirling_tail(c) - stirling_tail(a)
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    if a >= b {
        ln_gamma(b) - ln_gamma_ratio(a, b)
    } else {
        ln_gamma(a) - ln_gamma_ratio(b, a)
    }
}

/// `ln Γ(z)` through the Stirling series; only used to cross-check.
#[cfg(test)]
fn ln_gamma_stirling(z: f64) -> f64 {
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + stirling_tail(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn ratio_matches_factorials() {
        // Γ(n + 2) / Γ(n + 1) = n + 1
        for n in [0.0, 3.0, 25.0, 1e3, 1e5, 1e9] {
            assert_relative_eq!(ln_gamma_ratio(n + 1.0, 1.0).exp(), n + 1.0, max_relative = 1e-13);
        }
        // Γ(n + 3) / Γ(n + 1) = (n + 1)(n + 2)
        for n in [30.0, 4096.0] {
            assert_relative_eq!(
                ln_gamma_ratio(n + 1.0, 2.0).exp(),
                (n + 1.0) * (n + 2.0),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn stirling_agrees_with_statrs() {
        for z in [20.0, 37.5, 400.0] {
            assert_relative_eq!(ln_gamma_stirling(z), ln_gamma(z), max_relative = 1e-14);
        }
    }

    #[test]
    fn beta_symmetric_and_known() {
        assert_relative_eq!(ln_beta(2.0, 2.0).exp(), 1.0 / 6.0, max_relative = 1e-14);
        assert_relative_eq!(ln_beta(0.5, 0.5).exp(), PI, max_relative = 1e-14);
        assert_relative_eq!(ln_beta(3.5, 51.0), ln_beta(51.0, 3.5), max_relative = 1e-15);
    }
}
