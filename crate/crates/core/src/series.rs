//! Truncated Taylor series, circle evaluation and coefficient multipliers.

use std::cell::RefCell;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::special::{ln_gamma, ln_gamma_ratio};
use crate::weights::RadialWeight;

/// Default truncation degree for named families.
pub const DEFAULT_DEGREE: usize = 1024;

/// A polynomial `Σ_{n ≤ N} f̂(n) zⁿ` with finite coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSeries {
    coeffs: Vec<Complex64>,
}

impl TaylorSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if let Some(n) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::domain(format!("coefficient {n} is not finite")));
        }
        Ok(TaylorSeries { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        TaylorSeries { coeffs: vec![Complex64::new(0.0, 0.0)] }
    }

    pub fn constant(c: Complex64) -> Self {
        TaylorSeries { coeffs: vec![c] }
    }

    /// `zⁿ`.
    pub fn monomial(n: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = Complex64::new(1.0, 0.0);
        TaylorSeries { coeffs }
    }

    /// `(1 - λz)^{-s}` truncated at degree `n_max`.
    pub fn geometric(lambda: f64, s: f64, n_max: usize) -> Result<Self> {
        if !(lambda.abs() < 1.0 && s > 0.0 && s.is_finite()) {
            return Err(Error::domain(format!(
                "geometric kernel needs |lambda| < 1 and s > 0, got lambda={lambda}, s={s}"
            )));
        }
        let mut coeffs = Vec::with_capacity(n_max + 1);
        let mut c = 1.0;
        coeffs.push(c);
        for n in 1..=n_max {
            c *= lambda * (n as f64 + s - 1.0) / n as f64;
            coeffs.push(c);
        }
        Self::from_real(&coeffs)
    }

    /// `Σ_j z^{k^j}` over `k^j ≤ n_max`.
    pub fn lacunary(k: usize, n_max: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain(format!("lacunary series needs k >= 2, got {k}")));
        }
        let mut coeffs = vec![0.0; n_max + 1];
        let mut j = 1usize;
        while j <= n_max {
            coeffs[j] = 1.0;
            j = match j.checked_mul(k) {
                Some(v) => v,
                None => break,
            };
        }
        Self::from_real(&coeffs)
    }

    /// Degree-`deg` polynomial with real and imaginary parts uniform on `[-1, 1)`.
    pub fn random(seed: u64, deg: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = (0..=deg)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        TaylorSeries { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Storage length, trailing zeros included.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Index of the last nonzero coefficient; `None` for the zero series.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != Complex64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        TaylorSeries { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    /// Coefficientwise sum, padded to the longer operand.
    pub fn add(&self, other: &Self) -> Self {
        let n = self.len().max(other.len());
        TaylorSeries { coeffs: (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect() }
    }

    /// Multiply coefficient `n` by `m(n)`.
    pub fn map_multiplier(&self, mut m: impl FnMut(usize) -> f64) -> Self {
        TaylorSeries {
            coeffs: self.coeffs.iter().enumerate().map(|(n, a)| a * m(n)).collect(),
        }
    }

    /// Writes `n,re,im` lines, one per stored coefficient.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,re,im\n");
        for (n, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(out, "{n},{},{}", c.re, c.im);
        }
        out
    }

    /// Reads `n,re,im` lines; a header line and `#` comments are skipped,
    /// missing indices are zero.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("n,") {
                continue;
            }
            let loc = |field: &str, msg: String| Error::config(Some(i + 1), Some(field), msg);
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(loc("n,re,im", format!("expected 3 fields, got {}", parts.len())));
            }
            let n: usize = parts[0].parse().map_err(|e| loc("n", format!("{e}")))?;
            let re: f64 = parts[1].parse().map_err(|e| loc("re", format!("{e}")))?;
            let im: f64 = parts[2].parse().map_err(|e| loc("im", format!("{e}")))?;
            entries.push((n, Complex64::new(re, im)));
        }
        let len = entries.iter().map(|(n, _)| n + 1).max().unwrap_or(1);
        if len > 1 << 26 {
            return Err(Error::Resource(format!("series of length {len} is too large")));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
        for (n, c) in entries {
            coeffs[n] += c;
        }
        Self::new(coeffs)
    }
}

impl FromStr for TaylorSeries {
    type Err = Error;

    /// Named families: `monomial:n`, `geometric:λ,s` (degree 1024, or
    /// `geometric:λ,s,N`), `lacunary:k,N`, `random:seed,deg`.
    fn from_str(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::config(None, Some("f"), msg);
        let (name, params) = text
            .trim()
            .split_once(':')
            .ok_or_else(|| bad(format!("expected `family:params`, got `{text}`")))?;
        let nums: Vec<&str> = params.split(',').map(str::trim).collect();
        let float = |i: usize| -> Result<f64> {
            nums.get(i)
                .ok_or_else(|| bad(format!("`{name}` is missing parameter {}", i + 1)))?
                .parse::<f64>()
                .map_err(|e| bad(format!("`{}`: {e}", nums[i])))
        };
        let int = |i: usize| -> Result<usize> {
            nums.get(i)
                .ok_or_else(|| bad(format!("`{name}` is missing parameter {}", i + 1)))?
                .parse::<usize>()
                .map_err(|e| bad(format!("`{}`: {e}", nums[i])))
        };
        let arity = |lo: usize, hi: usize| {
            if (lo..=hi).contains(&nums.len()) {
                Ok(())
            } else {
                Err(bad(format!("`{name}` takes {lo}..={hi} parameters, got {}", nums.len())))
            }
        };
        match name {
            "monomial" => {
                arity(1, 1)?;
                Ok(Self::monomial(int(0)?))
            }
            "geometric" => {
                arity(2, 3)?;
                let n = if nums.len() == 3 { int(2)? } else { DEFAULT_DEGREE };
                Self::geometric(float(0)?, float(1)?, n)
            }
            "lacunary" => {
                arity(2, 2)?;
                Self::lacunary(int(0)?, int(1)?)
            }
            "random" => {
                arity(2, 2)?;
                Ok(Self::random(int(0)? as u64, int(1)?))
            }
            other => Err(bad(format!("unknown series family `{other}`"))),
        }
    }
}

/// `D^μ f`: coefficient `n` divided by `μ_{2n+1}`.
///
/// The multiplier is only meaningful when `μ` is upper doubling; that is left
/// to the caller (see [`crate::classify::classify`]).
pub fn frac_deriv_mu(f: &TaylorSeries, mu: &RadialWeight) -> Result<TaylorSeries> {
    let mut coeffs = Vec::with_capacity(f.len());
    for (n, a) in f.coeffs().iter().enumerate() {
        let m = mu.moment(2.0 * n as f64 + 1.0).map_err(|e| match e {
            Error::Numeric { residual, .. } => Error::numeric(
                format!("moment mu_{{2n+1}} of `{}` vanished at n = {n}", mu.label()),
                residual,
            ),
            other => other,
        })?;
        coeffs.push(a / m);
    }
    TaylorSeries::new(coeffs)
}

/// Multiplier `(2/Γ(β+1)) Γ(n+β+1)/Γ(n+1)` of the Hardy–Littlewood derivative.
///
/// The `n = 0` term uses the same formula, which keeps `D^β` equal to `D^μ`
/// for the standard weight `β(1-s²)^{β-1}`.
pub fn beta_multiplier(n: usize, beta: f64) -> f64 {
    (std::f64::consts::LN_2 - ln_gamma(beta + 1.0) + ln_gamma_ratio(n as f64 + 1.0, beta)).exp()
}

/// `D^β f`.
pub fn frac_deriv_beta(f: &TaylorSeries, beta: f64) -> Result<TaylorSeries> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::domain(format!("order must be positive, got {beta}")));
    }
    TaylorSeries::new(f.map_multiplier(|n| beta_multiplier(n, beta)).coeffs)
        .map_err(|_| Error::numeric("fractional derivative overflowed", f64::INFINITY))
}

/// `f^{[β]}`: coefficient `n` times `(n+1)^β`.
pub fn multiplier_transform(f: &TaylorSeries, beta: f64) -> Result<TaylorSeries> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::domain(format!("order must be positive, got {beta}")));
    }
    TaylorSeries::new(f.map_multiplier(|n| (n as f64 + 1.0).powf(beta)).coeffs)
        .map_err(|_| Error::numeric("multiplier transform overflowed", f64::INFINITY))
}

/// Coefficientwise product; the result has the shorter length.
pub fn hadamard(w: &TaylorSeries, f: &TaylorSeries) -> TaylorSeries {
    let coeffs: Vec<Complex64> = w.coeffs().iter().zip(f.coeffs()).map(|(a, b)| a * b).collect();
    if coeffs.is_empty() {
        TaylorSeries::zero()
    } else {
        TaylorSeries { coeffs }
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// `f(r e^{2πiq/Q})` for `q = 0..Q`.
///
/// Coefficients are scaled by `rⁿ`, folded modulo `Q` and transformed with a
/// single inverse FFT.
pub fn evaluate_circle(f: &TaylorSeries, r: f64, q: usize) -> Result<Vec<Complex64>> {
    if q == 0 {
        return Err(Error::domain("need at least one sample point"));
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::domain(format!("radius must lie in [0, 1], got {r}")));
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); q];
    let mut rn = 1.0;
    for (n, a) in f.coeffs().iter().enumerate() {
        if rn == 0.0 {
            break;
        }
        buf[n % q] += a * rn;
        rn *= r;
    }
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(q).process(&mut buf));
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn degree_ignores_trailing_zeros() {
        let f = TaylorSeries::from_real(&[1.0, 2.0, 0.0, 0.0]).unwrap();
        assert_eq!(f.degree(), Some(1));
        assert_eq!(f.len(), 4);
        assert_eq!(TaylorSeries::zero().degree(), None);
        assert!(TaylorSeries::new(vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn beta_multiplier_of_order_one() {
        for n in [0usize, 1, 7, 1000, 100_000] {
            assert_relative_eq!(beta_multiplier(n, 1.0), 2.0 * (n as f64 + 1.0), max_relative = 1e-13);
        }
        let d = frac_deriv_beta(&TaylorSeries::monomial(5), 1.0).unwrap();
        assert_relative_eq!(d.coeff(5).re, 12.0, max_relative = 1e-14);
        assert!(frac_deriv_beta(&TaylorSeries::zero(), 2.0).unwrap().is_zero());
        assert!(frac_deriv_beta(&TaylorSeries::zero(), 0.0).is_err());
    }

    #[test]
    fn mu_derivative_of_standard_order_one() {
        let mu = RadialWeight::standard_order(1.0).unwrap();
        let f = TaylorSeries::random(3, 40);
        let d = frac_deriv_mu(&f, &mu).unwrap();
        for n in 0..=40 {
            let want = f.coeff(n) * (2.0 * (n as f64 + 1.0));
            assert_relative_eq!(d.coeff(n).re, want.re, max_relative = 1e-12);
            assert_relative_eq!(d.coeff(n).im, want.im, max_relative = 1e-12);
        }
        assert!(frac_deriv_mu(&TaylorSeries::zero(), &mu).unwrap().is_zero());
    }

    #[test]
    fn beta_and_mu_derivatives_agree() {
        // μ_{2n+1} = Γ(n+1)Γ(β+1) / (2Γ(n+β+1)) for μ = β(1-s²)^{β-1}
        let f = TaylorSeries::random(11, 200);
        for beta in [0.5, 1.0, 2.5] {
            let a = frac_deriv_beta(&f, beta).unwrap();
            let b = frac_deriv_mu(&f, &RadialWeight::standard_order(beta).unwrap()).unwrap();
            for n in 0..=200 {
                let oracle = 2.0 * (ln_gamma(n as f64 + beta + 1.0) - ln_gamma(n as f64 + 1.0)
                    - ln_gamma(beta + 1.0))
                .exp();
                assert_relative_eq!(a.coeff(n).re, (f.coeff(n) * oracle).re, max_relative = 1e-10);
                assert_relative_eq!(a.coeff(n).re, b.coeff(n).re, max_relative = 1e-8);
                assert_relative_eq!(a.coeff(n).im, b.coeff(n).im, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn flett_multiplier() {
        let g = multiplier_transform(&TaylorSeries::monomial(3), 2.0).unwrap();
        assert_eq!(g.coeff(3), c(16.0, 0.0));
        let h = multiplier_transform(&TaylorSeries::from_real(&[1.0, 1.0]).unwrap(), 1.0).unwrap();
        assert_eq!(h.coeffs(), &[c(1.0, 0.0), c(2.0, 0.0)]);
        // (n+1)^β and the Gamma-ratio multiplier are comparable
        let ratios: Vec<f64> = (0..=10_000)
            .map(|n| (n as f64 + 1.0).powf(1.5) / beta_multiplier(n, 1.5))
            .collect();
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        assert!(lo > 0.3 && hi < 1.0, "lo={lo} hi={hi}");
    }

    #[test]
    fn circle_samples() {
        let z = TaylorSeries::monomial(1);
        let v = evaluate_circle(&z, 1.0, 4).unwrap();
        let want = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)];
        for (a, b) in v.iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }
        let k = TaylorSeries::constant(c(2.0, -1.0));
        assert!(evaluate_circle(&k, 0.3, 5).unwrap().iter().all(|x| (x - c(2.0, -1.0)).norm() < 1e-15));
        let f = TaylorSeries::from_real(&[1.0, 1.0]).unwrap();
        let v = evaluate_circle(&f, 0.5, 8).unwrap();
        let mean = v.iter().map(|x| x.norm_sqr()).sum::<f64>() / 8.0;
        assert_relative_eq!(mean, 1.25, max_relative = 1e-15);
    }

    #[test]
    fn aliasing_is_folded() {
        // fewer samples than coefficients: values still exact at the nodes
        let f = TaylorSeries::random(5, 30);
        let v = evaluate_circle(&f, 0.9, 7).unwrap();
        for (q, val) in v.iter().enumerate() {
            let z = Complex64::from_polar(0.9, 2.0 * std::f64::consts::PI * q as f64 / 7.0);
            let direct: Complex64 = f.coeffs().iter().rev().fold(c(0.0, 0.0), |acc, a| acc * z + a);
            assert!((val - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn hadamard_products() {
        let f = TaylorSeries::random(1, 10);
        let ones = TaylorSeries::from_real(&[1.0; 11]).unwrap();
        assert_eq!(hadamard(&f, &ones), f);
        let z2 = TaylorSeries::monomial(2);
        assert!(hadamard(&z2, &TaylorSeries::from_real(&[1.0, 1.0]).unwrap()).is_zero());
        let a = TaylorSeries::monomial(3).scale(c(2.0, 0.0));
        let b = TaylorSeries::monomial(3).scale(c(3.0, 0.0));
        assert_eq!(hadamard(&a, &b).coeff(3), c(6.0, 0.0));
    }

    #[test]
    fn named_families_parse() {
        assert_eq!("monomial:4".parse::<TaylorSeries>().unwrap(), TaylorSeries::monomial(4));
        let g: TaylorSeries = "geometric:0.5,2".parse().unwrap();
        assert_eq!(g.len(), DEFAULT_DEGREE + 1);
        assert_relative_eq!(g.coeff(3).re, 4.0 * 0.125, max_relative = 1e-15);
        let l: TaylorSeries = "lacunary:2,16".parse().unwrap();
        let support: Vec<usize> = (0..l.len()).filter(|&n| l.coeff(n).re != 0.0).collect();
        assert_eq!(support, vec![1, 2, 4, 8, 16]);
        assert!("geometric:1.5,1".parse::<TaylorSeries>().is_err());
        assert!("spline:3".parse::<TaylorSeries>().is_err());
    }

    #[test]
    fn csv_round_trip() {
        let f = TaylorSeries::random(9, 17);
        assert_eq!(TaylorSeries::from_csv(&f.to_csv()).unwrap(), f);
        let err = TaylorSeries::from_csv("n,re,im\n0,1,x\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }

    proptest! {
        #[test]
        fn derivatives_are_linear(
            seed in 0u64..1000,
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
            beta in 0.1f64..4.0,
        ) {
            let f = TaylorSeries::random(seed, 24);
            let g = TaylorSeries::random(seed + 1, 24);
            let comb = f.scale(c(a, 0.0)).add(&g.scale(c(b, 0.0)));
            let lhs = frac_deriv_beta(&comb, beta).unwrap();
            let rhs = frac_deriv_beta(&f, beta).unwrap().scale(c(a, 0.0))
                .add(&frac_deriv_beta(&g, beta).unwrap().scale(c(b, 0.0)));
            for n in 0..=24 {
                let scale = 1.0 + lhs.coeff(n).norm();
                prop_assert!((lhs.coeff(n) - rhs.coeff(n)).norm() <= 1e-12 * scale * beta_multiplier(n, beta));
            }
            let lhs = multiplier_transform(&comb, beta).unwrap();
            let rhs = multiplier_transform(&f, beta).unwrap().scale(c(a, 0.0))
                .add(&multiplier_transform(&g, beta).unwrap().scale(c(b, 0.0)));
            for n in 0..=24 {
                prop_assert!((lhs.coeff(n) - rhs.coeff(n)).norm() <= 1e-11 * (n as f64 + 1.0).powf(beta) * 8.0);
            }
        }

        #[test]
        fn mu_derivative_keeps_support(seed in 0u64..1000, alpha in -0.5f64..3.0) {
            let mu = RadialWeight::standard(alpha).unwrap();
            let f = TaylorSeries::random(seed, 20).map_multiplier(|n| if n % 3 == 0 { 0.0 } else { 1.0 });
            let d = frac_deriv_mu(&f, &mu).unwrap();
            prop_assert_eq!(d.degree(), f.degree());
            for n in 0..=20 {
                prop_assert_eq!(d.coeff(n) == c(0.0, 0.0), f.coeff(n) == c(0.0, 0.0));
            }
        }
    }
}
