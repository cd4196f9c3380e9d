//! Numeric diagnostics for the weight classes D̂, Ď, M and D.
//!
//! Membership is asymptotic, so the classifier samples the defining ratios
//! on finite grids and applies the heuristics documented on [`Thresholds`].
//! The curves are always part of the report.

use std::fmt;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::weights::RadialWeight;

/// Outcome of a class test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    In,
    Out,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::In => "in",
            Verdict::Out => "out",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Decision rules.
///
/// * D̂: "in" when the running supremum of the D̂ curve moves by less than
///   `stability` over the last `decade` grid points; "out" when the last
///   value exceeds `out_factor` times the median and is still rising.
/// * Ď and M, per `k`: the excess `ratio - 1` must have a stable infimum
///   (moving by less than `stability`, relative, over the last decade) and
///   the infimum ratio must exceed `1 + lower_margin`. The class is "in" if
///   some `k` passes and "out" if for every `k` the infimum keeps falling.
/// * D: "in" when D̂ is in and Ď or M is in; "out" when D̂ is out or both Ď
///   and M are out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub stability: f64,
    pub out_factor: f64,
    pub lower_margin: f64,
    pub decade: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            stability: 0.01,
            out_factor: 10.0,
            lower_margin: 1e-3,
            decade: 10,
        }
    }
}

/// A sampled ratio curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub name: String,
    pub k: Option<usize>,
    pub points: Vec<(f64, f64)>,
}

impl Curve {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    pub fn max(&self) -> f64 {
        self.values().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub dhat: Verdict,
    pub dcheck: Verdict,
    pub m: Verdict,
    pub d: Verdict,
}

/// Curves and verdicts for one weight.
#[derive(Debug, Clone, Serialize)]
pub struct ClassReport {
    pub label: String,
    /// `(r, ω̂(r) / ω̂((1+r)/2))`.
    pub dhat_curve: Curve,
    /// `(r, ω̂(r) / ω̂(1 - (1-r)/k))` per `k`.
    pub dcheck_curves: Vec<Curve>,
    /// `(x, ω_x / ω_{kx})` per `k`, for `kx` within the grid.
    pub m_curves: Vec<Curve>,
    /// `(x, ω_x / ω̂(1 - 1/x))`; points where the ratio over- or underflows
    /// are left out.
    pub comparability_curve: Curve,
    /// `(n, ω_n / ω_{2n})` for `n = 1, 2, 4, …, 2^14`.
    pub moment_doubling_curve: Curve,
    pub verdicts: Verdicts,
    pub thresholds: Thresholds,
}

/// Sampling grids for [`classify`].
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyGrids {
    pub r_grid: Vec<f64>,
    pub k_set: Vec<usize>,
    pub x_grid: Vec<f64>,
}

/// Deepest default radius `1 - 2^{-R_DEPTH}`.
pub const R_DEPTH: usize = 30;
/// Default `x_max`.
pub const X_MAX: f64 = 1e4;

impl ClassifyGrids {
    /// `r_i = 1 - 2^{-i}` for `i ≤ 30`, `k ∈ {2, 4, 8, 16}` and
    /// `x_j = 2^{j/4} ≤ 10^4`.
    ///
    /// The radial grid stops early once `ω̂(r_i)/ω̂(0)` drops below `1e-300`
    /// or a ratio on the grid would overflow; tails themselves keep full
    /// relative precision that deep.
    pub fn default_for(w: &RadialWeight) -> ClassifyGrids {
        let k_set = vec![2, 4, 8, 16];
        let k_max = 16.0;
        let lt0 = w.log_tail_gap(1.0);
        let floor = 1e-300f64.ln();
        let ceiling = 1e300f64.ln();
        let mut r_grid = vec![0.0];
        for i in 1..=R_DEPTH {
            let gap = 0.5f64.powi(i as i32);
            let lt = w.log_tail_gap(gap);
            if !(lt - lt0 > floor && lt - w.log_tail_gap(gap / k_max) < ceiling) {
                break;
            }
            r_grid.push(1.0 - gap);
        }
        let x_grid = (0..)
            .map(|j| 2f64.powf(j as f64 / 4.0))
            .take_while(|&x| x <= X_MAX)
            .collect();
        ClassifyGrids { r_grid, k_set, x_grid }
    }
}

fn checked(name: &str, x: f64, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::numeric(format!("{name} curve is {v} at {x}"), v))
    }
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn decade_len(n: usize, t: &Thresholds) -> usize {
    t.decade.min(n.saturating_sub(1)).max(1)
}

/// Verdict of an upper (supremum) condition.
pub fn sup_verdict(values: &[f64], t: &Thresholds) -> Verdict {
    let n = values.len();
    if n < 2 {
        return Verdict::Inconclusive;
    }
    let dec = decade_len(n, t);
    let sup_all = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sup_before = values[..n - dec].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if sup_all / sup_before - 1.0 < t.stability {
        Verdict::In
    } else if values[n - 1] > t.out_factor * median(values) && values[n - 1] > values[n - 2] {
        Verdict::Out
    } else {
        Verdict::Inconclusive
    }
}

/// Verdict of a lower (infimum above one) condition for a single curve.
pub fn inf_verdict(values: &[f64], t: &Thresholds) -> Verdict {
    let n = values.len();
    if n < 2 {
        return Verdict::Inconclusive;
    }
    let dec = decade_len(n, t);
    let excess: Vec<f64> = values.iter().map(|v| v - 1.0).collect();
    let inf_all = excess.iter().cloned().fold(f64::INFINITY, f64::min);
    let inf_before = excess[..n - dec].iter().cloned().fold(f64::INFINITY, f64::min);
    let stable = inf_all > 0.0 && inf_before / inf_all - 1.0 < t.stability;
    if stable && inf_all > t.lower_margin {
        Verdict::In
    } else if !stable && excess[n - dec..].windows(2).all(|w| w[1] <= w[0]) {
        Verdict::Out
    } else {
        Verdict::Inconclusive
    }
}

fn combine_any(vs: &[Verdict]) -> Verdict {
    if vs.contains(&Verdict::In) {
        Verdict::In
    } else if !vs.is_empty() && vs.iter().all(|v| *v == Verdict::Out) {
        Verdict::Out
    } else {
        Verdict::Inconclusive
    }
}

/// Samples the class ratios of `w` and applies the default [`Thresholds`].
pub fn classify(w: &RadialWeight, grids: &ClassifyGrids) -> Result<ClassReport> {
    classify_with(w, grids, Thresholds::default())
}

pub fn classify_with(w: &RadialWeight, grids: &ClassifyGrids, t: Thresholds) -> Result<ClassReport> {
    if grids.r_grid.is_empty() || grids.k_set.is_empty() || grids.x_grid.is_empty() {
        return Err(Error::domain("classification grids must be non-empty"));
    }
    if let Some(r) = grids.r_grid.iter().find(|r| !(0.0..1.0).contains(*r)) {
        return Err(Error::domain(format!("r grid must lie in [0, 1), found {r}")));
    }
    if let Some(k) = grids.k_set.iter().find(|k| **k < 2) {
        return Err(Error::domain(format!("k must be at least 2, found {k}")));
    }
    if let Some(x) = grids.x_grid.iter().find(|x| !(**x >= 1.0 && x.is_finite())) {
        return Err(Error::domain(format!("x grid must lie in [1, inf), found {x}")));
    }

    let lt = |gap: f64| w.log_tail_gap(gap);
    let mut dhat = Vec::with_capacity(grids.r_grid.len());
    for &r in &grids.r_grid {
        let gap = 1.0 - r;
        dhat.push((r, checked("D-hat", r, (lt(gap) - lt(0.5 * gap)).exp())?));
    }
    let mut dcheck_curves = Vec::new();
    for &k in &grids.k_set {
        let mut pts = Vec::with_capacity(grids.r_grid.len());
        for &r in &grids.r_grid {
            let gap = 1.0 - r;
            pts.push((r, checked("D-check", r, (lt(gap) - lt(gap / k as f64)).exp())?));
        }
        dcheck_curves.push(Curve { name: "dcheck".into(), k: Some(k), points: pts });
    }

    let x_max = grids.x_grid.iter().cloned().fold(0.0, f64::max);
    let mut m_curves = Vec::new();
    for &k in &grids.k_set {
        let mut pts = Vec::new();
        for &x in grids.x_grid.iter().filter(|&&x| x * k as f64 <= x_max) {
            let v = w.moment(x)? / w.moment(k as f64 * x)?;
            pts.push((x, checked("M", x, v)?));
        }
        m_curves.push(Curve { name: "m".into(), k: Some(k), points: pts });
    }

    let mut comp = Vec::new();
    for &x in &grids.x_grid {
        let v = (w.moment(x)?.ln() - lt(1.0 / x)).exp();
        if v.is_finite() && v > 0.0 {
            comp.push((x, v));
        }
    }
    let mut doubling = Vec::new();
    for i in 0..=14 {
        let n = 2f64.powi(i);
        doubling.push((n, checked("moment doubling", n, w.moment(n)? / w.moment(2.0 * n)?)?));
    }

    let dhat_curve = Curve { name: "dhat".into(), k: None, points: dhat };
    let vals = |c: &Curve| c.values().collect::<Vec<_>>();
    let v_dhat = sup_verdict(&vals(&dhat_curve), &t);
    let v_dcheck = combine_any(
        &dcheck_curves.iter().map(|c| inf_verdict(&vals(c), &t)).collect::<Vec<_>>(),
    );
    let v_m = combine_any(
        &m_curves
            .iter()
            .filter(|c| !c.points.is_empty())
            .map(|c| inf_verdict(&vals(c), &t))
            .collect::<Vec<_>>(),
    );
    let v_d = if v_dhat == Verdict::In && (v_dcheck == Verdict::In || v_m == Verdict::In) {
        Verdict::In
    } else if v_dhat == Verdict::Out || (v_dcheck == Verdict::Out && v_m == Verdict::Out) {
        Verdict::Out
    } else {
        Verdict::Inconclusive
    };

    Ok(ClassReport {
        label: w.label().to_owned(),
        dhat_curve,
        dcheck_curves,
        m_curves,
        comparability_curve: Curve { name: "comparability".into(), k: None, points: comp },
        moment_doubling_curve: Curve { name: "moment_doubling".into(), k: None, points: doubling },
        verdicts: Verdicts { dhat: v_dhat, dcheck: v_dcheck, m: v_m, d: v_d },
        thresholds: t,
    })
}

impl ClassReport {
    fn curves(&self) -> impl Iterator<Item = &Curve> {
        std::iter::once(&self.dhat_curve)
            .chain(&self.dcheck_curves)
            .chain(&self.m_curves)
            .chain([&self.comparability_curve, &self.moment_doubling_curve])
    }

    /// One row per grid point per curve: `curve,k,x,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("curve,k,x,value\n");
        for c in self.curves() {
            let k = c.k.map(|k| k.to_string()).unwrap_or_default();
            for (x, v) in &c.points {
                let _ = writeln!(out, "{},{k},{x},{v}", c.name);
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `label: D-hat in, D-check out, M out, D out`.
    pub fn summary(&self) -> String {
        let v = &self.verdicts;
        format!(
            "{}: D-hat {}, D-check {}, M {}, D {}",
            self.label, v.dhat, v.dcheck, v.m, v.d
        )
    }
}
