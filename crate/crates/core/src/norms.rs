//! Integral means, Hardy and weighted Bergman norms, block norms.

use num_complex::Complex64;

use crate::cesaro::{block, build_basis};
use crate::error::{Error, Result};
use crate::series::{evaluate_circle, TaylorSeries};
use crate::weights::RadialWeight;

/// Sampling controls for circle integrals.
///
/// Radial integrals always run on the crate's fixed graded mesh (see
/// [`crate::quad`]); only the circle sampling is tunable.
#[derive(Debug, Clone, PartialEq)]
pub struct NormSettings {
    /// Circle samples per unit of `deg + 1`, at least 4.
    pub q_oversample: usize,
    /// Largest number of circle samples tried when `p` is not an even integer.
    pub q_cap: usize,
    /// Relative change below which doubling the samples stops.
    pub doubling_tol: f64,
    /// Inside radial integrals, non-even `p` uses this many times the base
    /// sample count at every node instead of doubling; the quadrature error
    /// of circles passing near zeros averages out in the radial integral.
    pub radial_q_factor: usize,
}

impl Default for NormSettings {
    fn default() -> Self {
        NormSettings {
            q_oversample: 4,
            q_cap: 1 << 20,
            doubling_tol: 1e-9,
            radial_q_factor: 2,
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("p must be positive and finite, got {p}")))
    }
}

fn abs_pow(v: Complex64, p: f64) -> f64 {
    if p == 2.0 {
        v.norm_sqr()
    } else if p == 1.0 {
        v.norm()
    } else if p == 4.0 {
        let a = v.norm_sqr();
        a * a
    } else if p == 0.5 {
        v.norm().sqrt()
    } else {
        v.norm_sqr().powf(0.5 * p)
    }
}

/// `|c|^p r^{np}` when `f = c zⁿ`, whose modulus is constant on circles.
fn single_term_mean(f: &TaylorSeries, r: f64, p: f64) -> Option<f64> {
    let zero = Complex64::new(0.0, 0.0);
    let mut support = f.coeffs().iter().enumerate().filter(|(_, c)| **c != zero);
    match (support.next(), support.next()) {
        (Some((n, c)), None) => Some(abs_pow(*c, p) * (n as f64 * p * r.ln()).exp()),
        _ => None,
    }
}

/// Last index whose term `|a_n| rⁿ` is not negligible against the largest.
fn effective_degree(f: &TaylorSeries, r: f64) -> Option<usize> {
    let mut rn = 1.0;
    let mut big = 0.0f64;
    let mut terms = Vec::with_capacity(f.len());
    for a in f.coeffs() {
        let t = a.norm() * rn;
        big = big.max(t);
        terms.push(t);
        rn *= r;
    }
    if big == 0.0 {
        return None;
    }
    terms.iter().rposition(|&t| t >= 1e-18 * big)
}

impl NormSettings {
    fn validate(&self) -> Result<()> {
        if self.q_oversample < 4
            || self.q_cap < 4
            || self.radial_q_factor < 1
            || !(self.doubling_tol > 0.0)
        {
            return Err(Error::domain("invalid norm settings"));
        }
        Ok(())
    }

    /// Samples used for a polynomial of degree `d`.
    pub fn samples_for(&self, d: usize) -> usize {
        (self.q_oversample * (d + 1)).next_power_of_two()
    }

    /// `M_p(r, f)^p`.
    pub fn mean_pow(&self, f: &TaylorSeries, r: f64, p: f64) -> Result<f64> {
        check_p(p)?;
        self.validate()?;
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::domain(format!("radius must lie in [0, 1], got {r}")));
        }
        if r == 0.0 {
            return Ok(abs_pow(f.coeff(0), p));
        }
        if let Some(v) = single_term_mean(f, r, p) {
            return Ok(v);
        }
        let Some(d) = effective_degree(f, r) else {
            return Ok(0.0);
        };
        let trimmed;
        let g = if d + 1 < f.len() {
            trimmed = TaylorSeries::new(f.coeffs()[..=d].to_vec())?;
            &trimmed
        } else {
            f
        };
        let mean = |q: usize| -> Result<f64> {
            let v = evaluate_circle(g, r, q)?;
            Ok(v.iter().map(|z| abs_pow(*z, p)).sum::<f64>() / q as f64)
        };
        let mut q = self.samples_for(d).min(self.q_cap.next_power_of_two());
        let mut value = mean(q)?;
        // for even p, |f|^p is a trigonometric polynomial of degree p·d/2,
        // which the trapezoid rule integrates exactly once q exceeds it
        let even = p.fract() == 0.0 && (p as u64).is_multiple_of(2);
        if even && (q as f64) > p * d as f64 / 2.0 {
            return Ok(value);
        }
        while q < self.q_cap {
            q *= 2;
            let next = mean(q)?;
            let change = (next - value).abs();
            value = next;
            if change <= self.doubling_tol * value.abs() {
                break;
            }
        }
        Ok(value)
    }

    /// `M_p(r, f)^p` from exactly `q` circle samples (after dropping
    /// negligible high-order terms).
    pub fn mean_pow_fixed(&self, f: &TaylorSeries, r: f64, p: f64, q: usize) -> Result<f64> {
        check_p(p)?;
        if r == 0.0 {
            return Ok(abs_pow(f.coeff(0), p));
        }
        if let Some(v) = single_term_mean(f, r, p) {
            return Ok(v);
        }
        let Some(d) = effective_degree(f, r) else {
            return Ok(0.0);
        };
        // fewer terms need fewer samples for the same resolution
        let q = q.min(self.samples_for(d) * self.radial_q_factor.max(1)).max(1);
        let v = evaluate_circle(&TaylorSeries::new(f.coeffs()[..=d].to_vec())?, r, q)?;
        Ok(v.iter().map(|z| abs_pow(*z, p)).sum::<f64>() / q as f64)
    }

    /// `M_p(r, f)`.
    pub fn integral_mean(&self, f: &TaylorSeries, r: f64, p: f64) -> Result<f64> {
        Ok(self.mean_pow(f, r, p)?.powf(1.0 / p))
    }

    /// `‖f‖_{A^p_ω}^p = 2 ∫_0^1 r M_p(r,f)^p ω(r) dr`.
    ///
    /// Integral means are sampled at the mesh nodes down to a gap at which
    /// `M_p(r, f)^p` is indistinguishable from `M_p(1, f)^p`; the mass below is
    /// weighted by the boundary value.
    pub fn bergman_pow(&self, f: &TaylorSeries, w: &RadialWeight, p: f64) -> Result<f64> {
        check_p(p)?;
        let Some(d) = f.degree() else {
            return Ok(0.0);
        };
        let cut = 1e-13 / ((d as f64 + 1.0) * p.max(1.0));
        let boundary = self.mean_pow(f, 1.0, p)?;
        let even = p.fract() == 0.0 && (p as u64).is_multiple_of(2);
        let q = self.samples_for(d) * if even { 1 } else { self.radial_q_factor };
        let mut err = None;
        let v = w.integrate_against(1.0, cut, boundary, |s, _| {
            match self.mean_pow_fixed(f, s, p, q) {
                Ok(m) => m,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        let v = 2.0 * v;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::numeric(format!("Bergman integral against `{}` diverged", w.label()), v))
        }
    }

    pub fn bergman_norm(&self, f: &TaylorSeries, w: &RadialWeight, p: f64) -> Result<f64> {
        Ok(self.bergman_pow(f, w, p)?.powf(1.0 / p))
    }

    /// `Σ_n η_{kⁿ} ‖V_{n,k} ∗ f‖_{H^p}^p` over the blocks meeting `deg f`.
    pub fn block_pow(&self, f: &TaylorSeries, eta: &RadialWeight, k: usize, p: f64) -> Result<f64> {
        check_p(p)?;
        let Some(d) = f.degree() else {
            return Ok(0.0);
        };
        let basis = build_basis(k, d.max(1))?;
        let mut sum = 0.0;
        let mut kn = 1.0f64;
        for n in 0..=basis.max_block() {
            let b = block(f, &basis, n);
            if !b.is_zero() {
                sum += eta.moment(kn)? * self.mean_pow(&b, 1.0, p)?;
            }
            kn *= k as f64;
        }
        Ok(sum)
    }

    pub fn block_norm(&self, f: &TaylorSeries, eta: &RadialWeight, k: usize, p: f64) -> Result<f64> {
        Ok(self.block_pow(f, eta, k, p)?.powf(1.0 / p))
    }
}

/// `M_p(r, f)` with default settings.
pub fn integral_mean(f: &TaylorSeries, r: f64, p: f64) -> Result<f64> {
    NormSettings::default().integral_mean(f, r, p)
}

/// `‖P‖_{H^p} = M_p(1, P)`; integral means increase with `r`, so for a
/// polynomial the supremum sits at the boundary.
pub fn hardy_norm(f: &TaylorSeries, p: f64) -> Result<f64> {
    NormSettings::default().integral_mean(f, 1.0, p)
}

/// `‖f‖_{A^p_ω}` with default settings.
pub fn bergman_norm(f: &TaylorSeries, w: &RadialWeight, p: f64) -> Result<f64> {
    NormSettings::default().bergman_norm(f, w, p)
}

/// `(Σ_n η_{kⁿ} ‖V_{n,k} ∗ f‖_{H^p}^p)^{1/p}` with default settings.
pub fn block_norm(f: &TaylorSeries, eta: &RadialWeight, k: usize, p: f64) -> Result<f64> {
    NormSettings::default().block_norm(f, eta, k, p)
}

/// Both sides of the block comparison for nonnegative coefficients:
/// `lhs = ∫_0^1 (Σ a_j s^j)^p η(s) ds`, `rhs = Σ_n η_{kⁿ} t_n^p` with
/// `t_0 = Σ_{j<k} a_j` and `t_n = Σ_{kⁿ ≤ j < k^{n+1}} a_j`.
pub fn block_sum_compare(a: &[f64], eta: &RadialWeight, k: usize, p: f64) -> Result<(f64, f64)> {
    check_p(p)?;
    if k < 2 {
        return Err(Error::domain(format!("k must be at least 2, got {k}")));
    }
    if let Some(j) = a.iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::domain(format!("coefficient {j} is negative or not finite: {}", a[j])));
    }
    let Some(d) = a.iter().rposition(|v| *v > 0.0) else {
        return Ok((0.0, 0.0));
    };
    let a = &a[..=d];
    let poly = |s: f64| a.iter().rev().fold(0.0, |acc, c| acc * s + c);
    let cut = 1e-13 / ((d as f64 + 1.0) * p.max(1.0));
    let lhs = eta.integrate_against(0.0, cut, poly(1.0).powf(p), |s, _| poly(s).powf(p));

    let mut rhs = 0.0;
    let (mut lo, mut hi) = (0usize, k);
    let mut kn = 1.0f64;
    while lo <= d {
        let t: f64 = a[lo..hi.min(d + 1)].iter().sum();
        if t > 0.0 {
            rhs += eta.moment(kn)? * t.powf(p);
        }
        lo = hi;
        hi = hi.saturating_mul(k);
        kn *= k as f64;
    }
    Ok((lhs, rhs))
}
