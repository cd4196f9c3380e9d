//! Smooth cutoffs and the dyadic (k-adic) Cesàro blocks `V_{n,k}`.
//!
//! With a smooth decreasing `Ψ` equal to 1 on `(-∞, 1]` and 0 on `[k, ∞)`,
//! and `ψ(t) = Ψ(t/k) - Ψ(t)`, the blocks are
//!
//! ```text
//! V_0(z) = Σ_{j<k} Ψ(j) z^j,     V_n(z) = Σ_{k^{n-1} ≤ j < k^{n+1}} ψ(j / k^{n-1}) z^j.
//! ```
//!
//! Their coefficients telescope, so `Σ_n V̂_n(j) = 1` for every `j`.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::TaylorSeries;

/// Largest coefficient index a basis may cover.
pub const MAX_DEGREE: usize = 1 << 26;

/// Highest derivative order supported by [`cutoff_seminorm`].
pub const MAX_ORDER: usize = 4;

/// `h(s) = g(s) / (g(s) + g(1-s))` with `g(s) = exp(-1/s)`.
fn transition(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        1.0 / (1.0 + (1.0 / s - 1.0 / (1.0 - s)).exp())
    }
}

/// The canonical cutoff `Ψ` for a given `k ≥ 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothCutoff {
    k: usize,
}

impl SmoothCutoff {
    pub fn new(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain(format!("cutoff needs k >= 2, got {k}")));
        }
        Ok(SmoothCutoff { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `Ψ(t)`.
    pub fn big_psi(&self, t: f64) -> f64 {
        let k = self.k as f64;
        if t <= 1.0 {
            1.0
        } else if t >= k {
            0.0
        } else {
            transition((k - t) / (k - 1.0))
        }
    }

    /// `ψ(t) = Ψ(t/k) - Ψ(t)`, supported on `(1, k²)`.
    pub fn small_psi(&self, t: f64) -> f64 {
        self.big_psi(t / self.k as f64) - self.big_psi(t)
    }

    /// `A_{Ψ,m}`.
    pub fn seminorm(&self, m: usize) -> Result<f64> {
        cutoff_seminorm(|t| self.big_psi(t), (1.0, self.k as f64), m, 1e-3)
    }

    /// `A_{ψ,m}`.
    pub fn small_seminorm(&self, m: usize) -> Result<f64> {
        let k = self.k as f64;
        cutoff_seminorm(|t| self.small_psi(t), (1.0, k * k), m, 1e-3)
    }
}

/// `make_cutoff(k)`.
pub fn make_cutoff(k: usize) -> Result<SmoothCutoff> {
    SmoothCutoff::new(k)
}

/// `m`-th derivative by `m` nested central differences of step `h`.
pub fn nested_difference(phi: &impl Fn(f64) -> f64, x: f64, m: usize, h: f64) -> f64 {
    let mut binom = 1.0;
    let mut sum = 0.0;
    for i in 0..=m {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binom * phi(x + (m as f64 / 2.0 - i as f64) * h);
        binom = binom * (m - i) as f64 / (i + 1) as f64;
    }
    sum / h.powi(m as i32)
}

/// `A_{Φ,m} = max|Φ| + m · max|Φ^{(m)}|` for a function whose variation is
/// confined to `support = (a, b)`.
///
/// Maxima are taken over a grid of step `rel_step · (b - a)` covering the
/// support plus a margin of one step on each side; derivatives use
/// [`nested_difference`] with the same step.
pub fn cutoff_seminorm(
    phi: impl Fn(f64) -> f64,
    support: (f64, f64),
    m: usize,
    rel_step: f64,
) -> Result<f64> {
    let (a, b) = support;
    if !(b > a) || !(rel_step > 0.0 && rel_step < 1.0) {
        return Err(Error::domain("seminorm needs a < b and a step in (0, 1)"));
    }
    if m > MAX_ORDER {
        return Err(Error::domain(format!("derivative order capped at {MAX_ORDER}, got {m}")));
    }
    let h = rel_step * (b - a);
    let steps = (1.0 / rel_step).round() as usize + 2;
    let mut sup = 0.0f64;
    let mut sup_d = 0.0f64;
    for i in 0..=steps {
        let x = a - h + i as f64 * h;
        sup = sup.max(phi(x).abs());
        if m > 0 {
            sup_d = sup_d.max(nested_difference(&phi, x, m, h).abs());
        }
    }
    Ok(sup + m as f64 * sup_d)
}

/// Coefficients of one block, stored from `start` on.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub start: usize,
    pub values: Vec<f64>,
}

impl Block {
    pub fn coefficient(&self, j: usize) -> f64 {
        j.checked_sub(self.start)
            .and_then(|i| self.values.get(i))
            .copied()
            .unwrap_or(0.0)
    }

    /// One past the last stored index.
    pub fn end(&self) -> usize {
        self.start + self.values.len()
    }
}

/// Blocks `V_{0,k}, …, V_{M,k}` restricted to indices `j ≤ N`.
#[derive(Debug, Clone)]
pub struct CesaroBasis {
    cutoff: SmoothCutoff,
    degree: usize,
    blocks: Vec<Block>,
}

/// Smallest `e` with `k^e ≥ n`.
fn ceil_log(k: usize, n: usize) -> usize {
    let mut e = 0;
    let mut p = 1usize;
    while p < n {
        p = p.saturating_mul(k);
        e += 1;
    }
    e
}

/// `build_basis(k, N)`: `M = ⌈log_k N⌉ + 1` and blocks `0..=M`.
pub fn build_basis(k: usize, n: usize) -> Result<CesaroBasis> {
    let cutoff = SmoothCutoff::new(k)?;
    if n < 1 {
        return Err(Error::domain("basis degree must be at least 1"));
    }
    if n > MAX_DEGREE {
        return Err(Error::Resource(format!(
            "basis degree {n} exceeds the limit {MAX_DEGREE}"
        )));
    }
    let m = ceil_log(k, n) + 1;
    let mut blocks = Vec::with_capacity(m + 1);
    blocks.push(Block {
        start: 0,
        values: (0..k.min(n + 1)).map(|j| cutoff.big_psi(j as f64)).collect(),
    });
    let mut lo = 1usize; // k^{n-1}
    for _ in 1..=m {
        let hi = lo.saturating_mul(k).saturating_mul(k).min(n + 1);
        let scale = lo as f64;
        let values = (lo.min(hi)..hi).map(|j| cutoff.small_psi(j as f64 / scale)).collect();
        blocks.push(Block { start: lo.min(hi), values });
        lo = lo.saturating_mul(k);
    }
    Ok(CesaroBasis { cutoff, degree: n, blocks })
}

impl CesaroBasis {
    pub fn k(&self) -> usize {
        self.cutoff.k
    }

    pub fn cutoff(&self) -> SmoothCutoff {
        self.cutoff
    }

    /// Largest index covered.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Index of the last block.
    pub fn max_block(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// `V̂_{n,k}(j)`; zero outside the stored range.
    pub fn coefficient(&self, n: usize, j: usize) -> f64 {
        self.blocks.get(n).map_or(0.0, |b| b.coefficient(j))
    }

    /// `V_{n,k}` as a series.
    pub fn series(&self, n: usize) -> TaylorSeries {
        let Some(b) = self.blocks.get(n) else {
            return TaylorSeries::zero();
        };
        let mut coeffs = vec![Complex64::new(0.0, 0.0); b.end().max(1)];
        for (i, v) in b.values.iter().enumerate() {
            coeffs[b.start + i] = Complex64::new(*v, 0.0);
        }
        TaylorSeries::new(coeffs).expect("cutoff values are finite")
    }

    /// `n,j,coefficient` lines for every stored coefficient.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,j,coefficient\n");
        for (n, b) in self.blocks.iter().enumerate() {
            for (i, v) in b.values.iter().enumerate() {
                let _ = writeln!(out, "{n},{},{v}", b.start + i);
            }
        }
        out
    }
}

/// `V_{n,k} ∗ f`. Blocks past the last one are zero.
pub fn block(f: &TaylorSeries, basis: &CesaroBasis, n: usize) -> TaylorSeries {
    let Some(b) = basis.blocks.get(n) else {
        return TaylorSeries::zero();
    };
    let end = b.end().min(f.len());
    if end <= b.start {
        return TaylorSeries::zero();
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); end];
    for (j, c) in coeffs.iter_mut().enumerate().take(end).skip(b.start) {
        *c = f.coeff(j) * b.values[j - b.start];
    }
    TaylorSeries::new(coeffs).expect("product of finite values")
}
