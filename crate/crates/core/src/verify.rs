//! Experiments measuring the equivalence constants between Bergman norms,
//! fractional-derivative norms, integral means and block decompositions.
//!
//! Every experiment produces an [`ExperimentReport`]. "Bounded" is decided
//! by [`doubling_growth`]: the running maximum of a column may grow by less
//! than [`BOUNDED_GROWTH`] when the parameter range doubles.

use std::collections::HashMap;

use crate::classify::{classify, ClassifyGrids, Verdict};
use crate::cli::{Experiment, RunConfig};
use crate::error::{Error, Result};
use crate::norms::{block_sum_compare, NormSettings};
use crate::report::{ExperimentReport, Row};
use crate::series::{frac_deriv_mu, TaylorSeries};
use crate::weights::{scaled_weight, RadialWeight};

/// Growth factor below which a running maximum counts as bounded.
pub const BOUNDED_GROWTH: f64 = 1.05;

/// Seed of the default random polynomials.
pub const DEFAULT_SEED: u64 = 20_240_917;

/// A labelled test function; `param` is the monomial exponent or the degree.
#[derive(Debug, Clone)]
pub struct NamedSeries {
    pub label: String,
    pub param: f64,
    pub monomial: bool,
    pub series: TaylorSeries,
}

/// Shape of the standard test family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    /// Monomials `z^n` for dyadic `n ≤ monomial_max`.
    pub monomial_max: usize,
    /// Truncation of the geometric kernels and of the lacunary series.
    pub kernel_degree: usize,
    pub random_degree: usize,
    pub random_count: usize,
    pub seed: u64,
}

impl Default for FamilySpec {
    fn default() -> Self {
        FamilySpec {
            monomial_max: 1 << 11,
            kernel_degree: 1024,
            random_degree: 512,
            random_count: 10,
            seed: DEFAULT_SEED,
        }
    }
}

impl FamilySpec {
    /// Every member of degree at most `d` (monomials, kernels and random
    /// polynomials all reach `d`).
    pub fn at_degree(d: usize, seed: u64) -> Self {
        FamilySpec {
            monomial_max: d,
            kernel_degree: d,
            random_degree: d,
            random_count: 10,
            seed,
        }
    }

    /// Monomials, `(1 - λz)^{-s}` for `λ ∈ {0.5, 0.9, 0.99}`, `s ∈ {1, 2}`,
    /// `Σ z^{2^j}`, and seeded random polynomials.
    pub fn build(&self) -> Result<Vec<NamedSeries>> {
        let mut fam = Vec::new();
        let mut n = 1usize;
        while n <= self.monomial_max {
            fam.push(NamedSeries {
                label: format!("z^{n}"),
                param: n as f64,
                monomial: true,
                series: TaylorSeries::monomial(n),
            });
            n *= 2;
        }
        let kd = self.kernel_degree;
        for lambda in [0.5, 0.9, 0.99] {
            for s in [1.0, 2.0] {
                fam.push(NamedSeries {
                    label: format!("geometric(l={lambda};s={s};N={kd})"),
                    param: kd as f64,
                    monomial: false,
                    series: TaylorSeries::geometric(lambda, s, kd)?,
                });
            }
        }
        fam.push(NamedSeries {
            label: format!("lacunary(k=2;N={kd})"),
            param: kd as f64,
            monomial: false,
            series: TaylorSeries::lacunary(2, kd)?,
        });
        for i in 0..self.random_count {
            let seed = self.seed.wrapping_add(i as u64);
            fam.push(NamedSeries {
                label: format!("random(seed={seed};N={})", self.random_degree),
                param: self.random_degree as f64,
                monomial: false,
                series: TaylorSeries::random(seed, self.random_degree),
            });
        }
        Ok(fam)
    }
}

/// `runmax(all) / runmax(x ≤ x_last / 2)` over points `(x, value)`;
/// `None` when no point lies in the first half of the range.
pub fn doubling_growth(points: &[(f64, f64)]) -> Option<f64> {
    let x_last = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let all = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let half = points
        .iter()
        .filter(|p| p.0 <= 0.5 * x_last)
        .map(|p| p.1)
        .fold(f64::NEG_INFINITY, f64::max);
    if half.is_finite() {
        Some(all / half)
    } else {
        None
    }
}

pub fn is_bounded(points: &[(f64, f64)]) -> bool {
    doubling_growth(points).is_some_and(|g| g < BOUNDED_GROWTH)
}

fn fmt_growth(g: Option<f64>) -> String {
    g.map_or("n/a".into(), |g| format!("{g:.6}"))
}

/// `ω`, `μ`, `p` together with the paired weight `ν = ω μ̂^p`.
pub struct LpSetup {
    pub omega: RadialWeight,
    pub mu: RadialWeight,
    pub nu: RadialWeight,
    pub p: f64,
    pub settings: NormSettings,
}

impl LpSetup {
    pub fn new(omega: &RadialWeight, mu: &RadialWeight, p: f64) -> Result<Self> {
        Ok(LpSetup {
            omega: omega.clone(),
            mu: mu.clone(),
            nu: scaled_weight(omega, mu, p)?,
            p,
            settings: NormSettings::default(),
        })
    }

    /// `ν_{np+1} / (μ_{2n+1}^p ω_{np+1})`, the ratio for `f = zⁿ`.
    pub fn monomial_ratio(&self, n: usize) -> Result<f64> {
        let x = n as f64 * self.p + 1.0;
        let mu = self.mu.moment(2.0 * n as f64 + 1.0)?;
        Ok(self.nu.moment(x)? / (mu.powf(self.p) * self.omega.moment(x)?))
    }

    /// The ratio through the two Bergman norms.
    pub fn ratio_by_norms(&self, f: &TaylorSeries) -> Result<f64> {
        let den = self.settings.bergman_pow(f, &self.omega, self.p)?;
        if den == 0.0 {
            return Err(Error::domain("lp_ratio of the zero function"));
        }
        let num = self.settings.bergman_pow(&frac_deriv_mu(f, &self.mu)?, &self.nu, self.p)?;
        Ok(num / den)
    }

    /// `∫|D^μ f|^p μ̂^p ω dA / ∫|f|^p ω dA`; single-term series use the
    /// moment identity.
    pub fn ratio(&self, f: &TaylorSeries) -> Result<f64> {
        let zero = num_complex::Complex64::new(0.0, 0.0);
        let mut support = f.coeffs().iter().enumerate().filter(|(_, c)| **c != zero);
        match (support.next(), support.next()) {
            (None, _) => Err(Error::domain("lp_ratio of the zero function")),
            (Some((n, _)), None) => self.monomial_ratio(n),
            _ => self.ratio_by_norms(f),
        }
    }
}

/// `lp_ratio(f, ω, μ, p)`.
pub fn lp_ratio(f: &TaylorSeries, omega: &RadialWeight, mu: &RadialWeight, p: f64) -> Result<f64> {
    LpSetup::new(omega, mu, p)?.ratio(f)
}

/// Growth of the `upper` and `lower` columns over the monomial rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGrowth {
    pub upper: Option<f64>,
    pub lower: Option<f64>,
}

/// Rows `(f, lp_ratio, 1/lp_ratio)` over a family.
pub fn equivalence_sweep(
    family: &[NamedSeries],
    omega: &RadialWeight,
    mu: &RadialWeight,
    p: f64,
) -> Result<(ExperimentReport, SweepGrowth)> {
    if family.is_empty() {
        return Err(Error::domain("empty test family"));
    }
    let setup = LpSetup::new(omega, mu, p)?;
    let mut rows = Vec::with_capacity(family.len());
    let (mut up, mut lo) = (Vec::new(), Vec::new());
    for f in family {
        let r = setup.ratio(&f.series)?;
        if f.monomial {
            up.push((f.param, r));
            lo.push((f.param, 1.0 / r));
        }
        rows.push(Row { label: f.label.clone(), params: vec![f.param], ratios: vec![r, 1.0 / r] });
    }
    let growth = SweepGrowth { upper: doubling_growth(&up), lower: doubling_growth(&lo) };
    let mut rep = ExperimentReport::new("lp-sweep", &["n_or_degree"], &["upper", "lower"], rows)?;
    rep.note(format!("omega = {}, mu = {}, p = {p}", omega.label(), mu.label()));
    rep.note(format!(
        "monomial running-max growth under doubling: upper {}, lower {} (bounded below {BOUNDED_GROWTH})",
        fmt_growth(growth.upper),
        fmt_growth(growth.lower)
    ));
    Ok((rep, growth))
}

/// Rows `(n, R_n)` for `n = 0..=n_max` with
/// `R_n = ω_{np+1} μ_{2n+1}^p / (ω μ̂^p)_{np+1}`.
pub fn monomial_necessity_curve(
    omega: &RadialWeight,
    mu: &RadialWeight,
    p: f64,
    n_max: usize,
) -> Result<ExperimentReport> {
    if n_max < 8 {
        return Err(Error::domain(format!("n_max must be at least 8, got {n_max}")));
    }
    let setup = LpSetup::new(omega, mu, p)?;
    let mut rows = Vec::with_capacity(n_max + 1);
    let mut pts = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let r = 1.0 / setup.monomial_ratio(n)?;
        pts.push((n as f64, r));
        rows.push(Row { label: format!("z^{n}"), params: vec![n as f64], ratios: vec![r] });
    }
    let g = doubling_growth(&pts);
    let mut rep = ExperimentReport::new("monomial-curve", &["n"], &["R_n"], rows)?;
    rep.note(format!("omega = {}, mu = {}, p = {p}", omega.label(), mu.label()));
    rep.note(format!("running-max growth under doubling: {}", fmt_growth(g)));
    let mut lo = 1usize;
    while lo * 10 <= n_max {
        rep.note(format!("R_{} / R_{lo} = {:.6}", lo * 10, pts[lo * 10].1 / pts[lo].1));
        lo *= 10;
    }
    Ok(rep)
}

/// Radial grids `1 - 2^{-j/m}`: `ρ` for `j = 1..=14m`, `r` for `j = 0..=14m`.
pub fn means_grids(m: usize) -> (Vec<f64>, Vec<f64>) {
    let m = m.max(1);
    let at = |j: usize| 1.0 - 2f64.powf(-(j as f64) / m as f64);
    let r = (0..=14 * m).map(at).collect();
    let rho = (1..=14 * m).map(at).collect();
    (r, rho)
}

/// Rows `((r, ρ), M_p(r, D^μ f) μ̂(r/ρ) / M_p(ρ, f))` over pairs `r < ρ`.
///
/// Pairs where either integral mean vanishes are skipped and counted in the
/// notes. Integral means use a fixed circle rule with twice the base number
/// of samples.
pub fn integral_means_check(
    f: &TaylorSeries,
    mu: &RadialWeight,
    p: f64,
    r_grid: &[f64],
    rho_grid: &[f64],
) -> Result<ExperimentReport> {
    if let Some(x) = r_grid.iter().chain(rho_grid).find(|x| !(0.0..1.0).contains(*x)) {
        return Err(Error::domain(format!("grid values must lie in [0, 1), found {x}")));
    }
    let settings = NormSettings::default();
    let df = frac_deriv_mu(f, mu)?;
    let q_of = |g: &TaylorSeries| settings.samples_for(g.degree().unwrap_or(0)) * settings.radial_q_factor;
    let (qf, qd) = (q_of(f), q_of(&df));
    let mut cache_r: HashMap<u64, f64> = HashMap::new();
    let mut rows = Vec::new();
    let mut skipped = 0usize;
    for &rho in rho_grid {
        let den = settings.mean_pow_fixed(f, rho, p, qf)?.powf(1.0 / p);
        for &r in r_grid.iter().filter(|&&r| r < rho) {
            let num = match cache_r.get(&r.to_bits()) {
                Some(v) => *v,
                None => {
                    let v = settings.mean_pow_fixed(&df, r, p, qd)?.powf(1.0 / p);
                    cache_r.insert(r.to_bits(), v);
                    v
                }
            };
            if den == 0.0 || num == 0.0 {
                skipped += 1;
                continue;
            }
            let q = num * mu.tail(r / rho)? / den;
            rows.push(Row { label: String::new(), params: vec![r, rho], ratios: vec![q] });
        }
    }
    let mut rep = ExperimentReport::new("means-check", &["r", "rho"], &["quantity"], rows)?;
    rep.note(format!("mu = {}, p = {p}", mu.label()));
    rep.note(format!("skipped pairs with a vanishing integral mean: {skipped}"));
    Ok(rep)
}

/// Rows `(r, (1 + Σ_n r^{kⁿ} / μ_{kⁿ}^γ) μ̂(r)^γ)`.
pub fn suma_check(mu: &RadialWeight, gamma: f64, k: usize, r_grid: &[f64]) -> Result<ExperimentReport> {
    if !(gamma > 0.0 && gamma.is_finite()) || k < 2 {
        return Err(Error::domain(format!("need gamma > 0 and k >= 2, got gamma={gamma}, k={k}")));
    }
    let mut rows = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        let tail = mu.tail(r)?;
        let mut sum = 0.0;
        if r > 0.0 {
            let ln_r = r.ln();
            let mut x = 1.0f64;
            for _ in 0..200 {
                let term = (x * ln_r - gamma * mu.moment(x)?.ln()).exp();
                sum += term;
                if x * -ln_r > 1.0 && term <= 1e-16 * (1.0 + sum) {
                    break;
                }
                x *= k as f64;
            }
        }
        let v = (1.0 + sum) * tail.powf(gamma);
        rows.push(Row { label: String::new(), params: vec![r], ratios: vec![v] });
    }
    let mut rep = ExperimentReport::new("suma-check", &["r"], &["ratio"], rows)?;
    rep.note(format!("mu = {}, gamma = {gamma}, k = {k}", mu.label()));
    Ok(rep)
}

/// Rows `(f, ‖f‖_{A^p_η}^p / Σ_n η_{kⁿ} ‖V_{n,k} ∗ f‖_{H^p}^p)`.
pub fn norm_equivalence_check(
    family: &[NamedSeries],
    eta: &RadialWeight,
    k: usize,
    p: f64,
) -> Result<ExperimentReport> {
    if family.is_empty() {
        return Err(Error::domain("empty test family"));
    }
    let settings = NormSettings::default();
    let mut rows = Vec::with_capacity(family.len());
    for f in family {
        let b = settings.bergman_pow(&f.series, eta, p)?;
        let c = settings.block_pow(&f.series, eta, k, p)?;
        rows.push(Row { label: f.label.clone(), params: vec![f.param], ratios: vec![b / c] });
    }
    let mut rep = ExperimentReport::new("norm-equiv", &["n_or_degree"], &["ratio"], rows)?;
    rep.note(format!("eta = {}, k = {k}, p = {p}", eta.label()));
    Ok(rep)
}

/// Rows `(a, lhs / rhs)` of [`block_sum_compare`] over nonnegative sequences.
pub fn block_sum_suite(
    suite: &[(String, Vec<f64>)],
    eta: &RadialWeight,
    k: usize,
    p: f64,
) -> Result<ExperimentReport> {
    let mut rows = Vec::with_capacity(suite.len());
    for (label, a) in suite {
        let (l, r) = block_sum_compare(a, eta, k, p)?;
        rows.push(Row { label: label.clone(), params: vec![a.len() as f64 - 1.0], ratios: vec![l / r] });
    }
    let mut rep = ExperimentReport::new("block-sum", &["degree"], &["ratio"], rows)?;
    rep.note(format!("eta = {}, k = {k}, p = {p}", eta.label()));
    Ok(rep)
}

fn weight_or_default(w: &Option<RadialWeight>) -> Result<RadialWeight> {
    match w {
        Some(w) => Ok(w.clone()),
        None => RadialWeight::standard(1.0),
    }
}

fn class_of(w: &RadialWeight) -> Result<crate::classify::ClassReport> {
    classify(w, &ClassifyGrids::default_for(w))
}

/// Refuses weights the classifier places outside `class` unless forced.
fn screen(w: &RadialWeight, role: &str, class: &str, v: Verdict, force: bool) -> Result<()> {
    if v == Verdict::Out && !force {
        return Err(Error::domain(format!(
            "{role} = {} is classified out of {class}; set `force = true` to run anyway",
            w.label()
        )));
    }
    Ok(())
}

/// Runs the experiment a configuration names and sets its verdict.
pub fn run_experiment(cfg: &RunConfig) -> Result<ExperimentReport> {
    let p = cfg.p;
    match cfg.experiment {
        Experiment::Classify => {
            let w = weight_or_default(&cfg.omega)?;
            let mut grids = ClassifyGrids::default_for(&w);
            if let Some(depth) = cfg.r_depth {
                grids.r_grid.truncate(depth + 1);
            }
            let rep = classify(&w, &grids)?;
            let mut rows = Vec::new();
            let curves = std::iter::once(&rep.dhat_curve)
                .chain(&rep.dcheck_curves)
                .chain(&rep.m_curves)
                .chain([&rep.comparability_curve, &rep.moment_doubling_curve]);
            for c in curves {
                for (x, v) in &c.points {
                    rows.push(Row {
                        label: c.name.clone(),
                        params: vec![c.k.unwrap_or(0) as f64, *x],
                        ratios: vec![*v],
                    });
                }
            }
            let v = rep.verdicts;
            let consistent = v.d != Verdict::In
                || (v.dhat == Verdict::In && (v.dcheck == Verdict::In || v.m == Verdict::In));
            let mut out = ExperimentReport::new("classify", &["k", "x"], &["ratio"], rows)?
                .with_verdict(consistent, rep.summary());
            out.note(format!("thresholds: {:?}", rep.thresholds));
            Ok(out)
        }
        Experiment::LpSweep => {
            let omega = weight_or_default(&cfg.omega)?;
            let mu = weight_or_default(&cfg.mu)?;
            let cm = class_of(&mu)?;
            screen(&mu, "mu", "D-hat", cm.verdicts.dhat, cfg.force)?;
            let fam = FamilySpec { monomial_max: cfg.monomial_max, seed: cfg.seed, ..FamilySpec::default() }
                .build()?;
            let (rep, growth) = equivalence_sweep(&fam, &omega, &mu, p)?;
            let co = class_of(&omega)?;
            let up_ok = growth.upper.is_some_and(|g| g < BOUNDED_GROWTH);
            let lo_ok = growth.lower.is_some_and(|g| g < BOUNDED_GROWTH);
            let (passed, claim) = match (co.verdicts.dhat, co.verdicts.d) {
                (_, Verdict::In) => (up_ok && lo_ok, "omega in D: both columns bounded"),
                (Verdict::In, _) => (up_ok, "omega in D-hat: upper column bounded"),
                _ => (true, "omega not in D-hat: no assertion"),
            };
            let text = format!(
                "{claim}; upper growth {}, lower growth {}",
                fmt_growth(growth.upper),
                fmt_growth(growth.lower)
            );
            Ok(rep.with_verdict(passed, text))
        }
        Experiment::MonomialCurve => {
            let omega = weight_or_default(&cfg.omega)?;
            let mu = weight_or_default(&cfg.mu)?;
            let cm = class_of(&mu)?;
            screen(&mu, "mu", "D-hat", cm.verdicts.dhat, cfg.force)?;
            let rep = monomial_necessity_curve(&omega, &mu, p, cfg.n_max)?;
            let pts: Vec<(f64, f64)> = rep
                .param_values("n")
                .unwrap()
                .into_iter()
                .zip(rep.ratio_values("R_n").unwrap())
                .collect();
            let g = doubling_growth(&pts);
            let co = class_of(&omega)?;
            let (passed, claim) = if co.verdicts.d == Verdict::In {
                (is_bounded(&pts), "omega in D: R_n bounded")
            } else {
                (true, "omega not in D: no assertion")
            };
            Ok(rep.with_verdict(passed, format!("{claim}; growth {}", fmt_growth(g))))
        }
        Experiment::MeansCheck => {
            let mu = weight_or_default(&cfg.mu)?;
            let cm = class_of(&mu)?;
            screen(&mu, "mu", "D-hat", cm.verdicts.dhat, cfg.force)?;
            let fam = FamilySpec { monomial_max: cfg.monomial_max, seed: cfg.seed, ..FamilySpec::default() }
                .build()?;
            let (r1, rho1) = means_grids(cfg.refine);
            let (r2, rho2) = means_grids(2 * cfg.refine);
            let mut rows = Vec::new();
            let mut worst = 1.0f64;
            for f in &fam {
                let coarse = integral_means_check(&f.series, &mu, p, &r1, &rho1)?;
                let fine = integral_means_check(&f.series, &mu, p, &r2, &rho2)?;
                let (a, b) = (coarse.summary[0].max, fine.summary[0].max);
                worst = worst.max(a.max(b) / a.min(b));
                for row in fine.rows {
                    rows.push(Row { label: f.label.clone(), ..row });
                }
            }
            let rep = ExperimentReport::new("means-check", &["r", "rho"], &["quantity"], rows)?;
            let passed = worst < 2.0;
            let text = format!(
                "summary max per function changes by at most {worst:.4}x under 2x grid refinement (limit 2x)"
            );
            Ok(rep.with_verdict(passed, text))
        }
        Experiment::SumaCheck => {
            let mu = weight_or_default(&cfg.mu)?;
            let cm = class_of(&mu)?;
            screen(&mu, "mu", "D", cm.verdicts.d, cfg.force)?;
            let depth = cfg.r_depth.unwrap_or(25);
            let grid: Vec<f64> = (0..=depth).map(|i| 1.0 - 0.5f64.powi(i as i32)).collect();
            let rep = suma_check(&mu, cfg.gamma, cfg.k, &grid)?;
            let vals = rep.ratio_values("ratio").unwrap();
            let up: Vec<(f64, f64)> = (0..vals.len()).map(|i| (2f64.powi(i as i32), vals[i])).collect();
            let down: Vec<(f64, f64)> = up.iter().map(|(x, v)| (*x, 1.0 / v)).collect();
            let passed = is_bounded(&up) && is_bounded(&down);
            let text = format!(
                "bracket {:.6}..{:.6}; growth of max {}, of 1/min {}",
                rep.summary[0].min,
                rep.summary[0].max,
                fmt_growth(doubling_growth(&up)),
                fmt_growth(doubling_growth(&down))
            );
            Ok(rep.with_verdict(passed, text))
        }
        Experiment::NormEquiv => {
            let eta = match &cfg.eta {
                Some(w) => w.clone(),
                None => weight_or_default(&cfg.omega)?,
            };
            let ce = class_of(&eta)?;
            screen(&eta, "eta", "D", ce.verdicts.d, cfg.force)?;
            let d = cfg.degree;
            let small = norm_equivalence_check(&FamilySpec::at_degree(d, cfg.seed).build()?, &eta, cfg.k, p)?;
            let large = norm_equivalence_check(&FamilySpec::at_degree(2 * d, cfg.seed).build()?, &eta, cfg.k, p)?;
            let (s1, s2) = (small.summary[0].spread, large.summary[0].spread);
            let mut rows = small.rows;
            rows.extend(large.rows);
            let rep = ExperimentReport::new("norm-equiv", &["n_or_degree"], &["ratio"], rows)?;
            let change = s2 / s1;
            let passed = change < BOUNDED_GROWTH && change > 1.0 / BOUNDED_GROWTH;
            let text = format!(
                "bracket spread {s1:.6} at degree {d}, {s2:.6} at degree {}; change {change:.6}",
                2 * d
            );
            Ok(rep.with_verdict(passed, text))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    #[test]
    fn growth_helper() {
        let flat: Vec<(f64, f64)> = (0..12).map(|i| (2f64.powi(i), 3.0 - 0.5f64.powi(i))).collect();
        assert!(is_bounded(&flat));
        let log: Vec<(f64, f64)> = (1..12).map(|i| (2f64.powi(i), i as f64)).collect();
        assert!(!is_bounded(&log));
        assert_eq!(doubling_growth(&[(1.0, 1.0)]), None);
    }

    #[test]
    fn monomial_ratio_matches_norms() {
        let omega = RadialWeight::standard(1.0).unwrap();
        let mu = RadialWeight::standard(1.0).unwrap();
        for p in [0.5, 2.0] {
            let s = LpSetup::new(&omega, &mu, p).unwrap();
            for n in [0usize, 3, 40] {
                let f = TaylorSeries::monomial(n);
                assert_relative_eq!(s.monomial_ratio(n).unwrap(), s.ratio_by_norms(&f).unwrap(), max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn constant_function_ratio() {
        let w = RadialWeight::standard(1.0).unwrap();
        let nu = scaled_weight(&w, &w, 2.0).unwrap();
        let want = nu.moment(1.0).unwrap() / (w.moment(1.0).unwrap().powi(2) * w.moment(1.0).unwrap());
        let got = lp_ratio(&TaylorSeries::constant(Complex64::new(2.0, 0.0)), &w, &w, 2.0).unwrap();
        assert_relative_eq!(got, want, max_relative = 1e-12);
        assert!(lp_ratio(&TaylorSeries::zero(), &w, &w, 2.0).is_err());
    }

    #[test]
    fn lp_ratio_is_homogeneous() {
        let w = RadialWeight::standard(1.0).unwrap();
        let f = TaylorSeries::random(4, 30);
        let a = lp_ratio(&f, &w, &w, 2.0).unwrap();
        let b = lp_ratio(&f.scale(Complex64::new(-3.0, 0.5)), &w, &w, 2.0).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }

    #[test]
    fn means_check_monomial_closed_form() {
        let mu = RadialWeight::standard(1.0).unwrap();
        let n = 6;
        let rep = integral_means_check(&TaylorSeries::monomial(n), &mu, 2.0, &[0.0, 0.3, 0.7], &[0.5, 0.9]).unwrap();
        let m = mu.moment(2.0 * n as f64 + 1.0).unwrap();
        for row in &rep.rows {
            let (r, rho) = (row.params[0], row.params[1]);
            let want = (r.powi(n as i32) / m) * mu.tail(r / rho).unwrap() / rho.powi(n as i32);
            assert_relative_eq!(row.ratios[0], want, max_relative = 1e-12);
        }
        // the r = 0 pairs vanish for a monomial and are skipped
        assert_eq!(rep.rows.len(), 3);
    }

    #[test]
    fn suma_at_zero_is_tail_power() {
        let mu = RadialWeight::standard(1.0).unwrap();
        let rep = suma_check(&mu, 2.0, 2, &[0.0]).unwrap();
        assert_relative_eq!(rep.rows[0].ratios[0], (4.0f64 / 3.0).powi(2), max_relative = 1e-14);
    }

    #[test]
    fn family_shape() {
        let fam = FamilySpec::default().build().unwrap();
        assert_eq!(fam.iter().filter(|f| f.monomial).count(), 12);
        assert_eq!(fam.len(), 12 + 6 + 1 + 10);
        assert_eq!(fam.last().unwrap().series.degree(), Some(512));
    }
}
