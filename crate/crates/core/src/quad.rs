//! Gauss–Legendre rules and the graded mesh on `[0, 1)`.
//!
//! Every integrand in this crate either concentrates at `s = 1` (moments
//! with large exponents, weights with a boundary singularity) or has limited
//! smoothness at `s = 0` (fractional powers `s^x`). The mesh therefore grades
//! geometrically toward both ends:
//!
//! * `s`-cells `[2^{-i-1}, 2^{-i}]` for `i = 1..=S_DEPTH`, plus `[0, 2^{-S_DEPTH-1}]`;
//! * gap cells `1 - s ∈ [2^{-j-1}, 2^{-j}]` for `j = 1..=GAP_DEPTH`.
//!
//! Nodes inside gap cells are generated from the gap `δ = 1 - s` directly so
//! that `δ` keeps full relative precision even when `s` rounds to `1.0`.
//! What lies beyond the last gap cell (`δ < 2^{-GAP_DEPTH-1}`) is handed back
//! to the caller as a remainder, since only the weight knows its own tail.

use std::sync::OnceLock;

/// Points per Gauss–Legendre panel on the mesh.
pub const ORDER: usize = 16;
/// Number of dyadic `s`-cells toward `s = 0`.
pub const S_DEPTH: usize = 48;
/// Number of dyadic gap cells toward `s = 1`.
pub const GAP_DEPTH: usize = 256;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // three-term recurrence for P_n and its derivative
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER))
}

/// Single-panel Gauss–Legendre integral of `f` over `[a, b]`.
pub fn panel(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let (x, w) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter()
        .zip(w)
        .map(|(xi, wi)| wi * f(mid + half * xi))
        .sum::<f64>()
        * half
}

/// Integral over `[a, b]` of an integrand that may be singular (integrably)
/// or rapidly varying at the left endpoint `a`.
///
/// Cells `[a + w/2^{j+1}, a + w/2^j]` are summed until a cell contributes less
/// than `1e-17` of the running total, then the last cell value is used as the
/// residual estimate.
pub fn graded_left(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    let width = b - a;
    let mut sum = 0.0;
    let mut last = 0.0;
    for j in 0..1100 {
        let hi = a + width * 0.5f64.powi(j);
        let lo = a + width * 0.5f64.powi(j + 1);
        if hi <= lo {
            break;
        }
        last = panel(lo, hi, &mut f);
        sum += last;
        if j > 4 && last.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    (sum, last.abs())
}

/// Integral over `[0, ∞)` of a decaying integrand whose variation near `0`
/// happens on the scale `h0`.
pub fn semi_infinite(h0: f64, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    let mut sum = panel(0.0, h0, &mut f);
    let mut lo = h0;
    let mut last = sum;
    for _ in 0..2000 {
        let hi = 2.0 * lo;
        last = panel(lo, hi, &mut f);
        sum += last;
        lo = hi;
        if lo > 1.0 && last.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    (sum, last.abs())
}

/// A quadrature node on the graded mesh.
#[derive(Debug, Clone, Copy)]
pub struct Node {
    pub s: f64,
    /// `1 - s`, carried with full relative precision.
    pub gap: f64,
    /// `ln s`.
    pub ln_s: f64,
    pub weight: f64,
}

/// A cell of the graded mesh; `gap_hi > gap_lo`.
#[derive(Debug, Clone)]
pub struct Cell {
    pub gap_lo: f64,
    pub gap_hi: f64,
    pub nodes: std::ops::Range<usize>,
}

/// The graded mesh, cells ordered by increasing `s`.
#[derive(Debug)]
pub struct Mesh {
    pub nodes: Vec<Node>,
    pub cells: Vec<Cell>,
}

impl Mesh {
    fn build() -> Mesh {
        let (x, w) = rule();
        let mut nodes = Vec::new();
        let mut cells = Vec::new();

        let mut push_s_cell = |s_lo: f64, s_hi: f64, nodes: &mut Vec<Node>| {
            let start = nodes.len();
            let half = 0.5 * (s_hi - s_lo);
            let mid = 0.5 * (s_hi + s_lo);
            for (xi, wi) in x.iter().zip(w) {
                let s = mid + half * xi;
                nodes.push(Node {
                    s,
                    gap: 1.0 - s,
                    ln_s: s.ln(),
                    weight: wi * half,
                });
            }
            cells.push(Cell {
                gap_lo: 1.0 - s_hi,
                gap_hi: 1.0 - s_lo,
                nodes: start..nodes.len(),
            });
        };

        let tiny = 0.5f64.powi(S_DEPTH as i32 + 1);
        push_s_cell(0.0, tiny, &mut nodes);
        for i in (1..=S_DEPTH).rev() {
            push_s_cell(0.5f64.powi(i as i32 + 1), 0.5f64.powi(i as i32), &mut nodes);
        }
        for j in 1..=GAP_DEPTH {
            let g_hi = 0.5f64.powi(j as i32);
            let g_lo = 0.5 * g_hi;
            let start = nodes.len();
            let half = 0.5 * (g_hi - g_lo);
            let mid = 0.5 * (g_hi + g_lo);
            // traverse so that s increases within the cell
            for (xi, wi) in x.iter().zip(w).rev() {
                let gap = mid + half * xi;
                nodes.push(Node {
                    s: 1.0 - gap,
                    gap,
                    ln_s: (-gap).ln_1p(),
                    weight: wi * half,
                });
            }
            cells.push(Cell {
                gap_lo: g_lo,
                gap_hi: g_hi,
                nodes: start..nodes.len(),
            });
        }
        Mesh { nodes, cells }
    }

    /// The process-wide mesh.
    pub fn global() -> &'static Mesh {
        static MESH: OnceLock<Mesh> = OnceLock::new();
        MESH.get_or_init(Mesh::build)
    }

    /// Smallest gap resolved by the mesh; the rest is a remainder.
    pub fn min_gap(&self) -> f64 {
        self.cells.last().map(|c| c.gap_lo).unwrap_or(0.0)
    }

    /// Index of the first gap cell (the cell `[1/4, 1/2]` in gap).
    pub fn first_gap_cell(&self) -> usize {
        S_DEPTH + 1
    }

    /// Index of the gap cell whose upper end is `2^{-j}`, `j ≥ 1`.
    pub fn gap_cell(&self, j: usize) -> Option<usize> {
        if j == 0 || j > GAP_DEPTH {
            None
        } else {
            Some(self.first_gap_cell() + j - 1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 31] {
            let (x, w) = gauss_legendre(n);
            for deg in 0..(2 * n) {
                let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
                let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((got - want).abs() < 1e-13, "n={n} deg={deg} got={got}");
            }
        }
    }

    #[test]
    fn mesh_covers_unit_interval() {
        let mesh = Mesh::global();
        let total: f64 = mesh.nodes.iter().map(|n| n.weight).sum();
        assert_relative_eq!(total + mesh.min_gap(), 1.0, max_relative = 1e-14);
        for pair in mesh.cells.windows(2) {
            assert!(pair[0].gap_lo == pair[1].gap_hi || (pair[0].gap_lo - pair[1].gap_hi).abs() < 1e-16);
        }
        assert_eq!(mesh.cells[mesh.gap_cell(1).unwrap()].gap_hi, 0.5);
    }

    #[test]
    fn graded_left_handles_inverse_sqrt() {
        let (v, _) = graded_left(0.0, 1.0, |x| 1.0 / x.sqrt());
        assert_relative_eq!(v, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn semi_infinite_exponential() {
        let (v, _) = semi_infinite(1e-3, |u| (-u).exp());
        assert_relative_eq!(v, 1.0, max_relative = 1e-13);
    }
}
