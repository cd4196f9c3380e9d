//! Acceptance run: each criterion prints one `[PASS]` or `[FAIL]` line with
//! its measured values and wall time, and the process fails if any fails.

use std::time::{Duration, Instant};

use bergman_frac::cesaro::{block, build_basis};
use bergman_frac::norms::{bergman_norm, integral_mean};
use bergman_frac::series::{frac_deriv_beta, frac_deriv_mu};
use bergman_frac::verify::{
    doubling_growth, equivalence_sweep, integral_means_check, means_grids, monomial_necessity_curve,
    norm_equivalence_check, suma_check, FamilySpec, LpSetup, NamedSeries,
};
use bergman_frac::{RadialWeight, TaylorSeries};
use num_complex::Complex64;
use statrs::function::gamma::ln_gamma;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn w(spec: &str) -> RadialWeight {
    spec.parse().unwrap()
}

/// `∫_0^1 s^x (α+1)(1-s²)^α ds = (α+1)/2 · B((x+1)/2, α+1)`.
fn standard_moment(alpha: f64, x: f64) -> f64 {
    let (a, b) = ((x + 1.0) / 2.0, alpha + 1.0);
    (alpha + 1.0) / 2.0 * (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        left + right + (left + right - whole) / 15.0
    } else {
        simpson(f, a, m, fa, flm, fm, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, tol / 2.0, depth - 1)
    }
}

fn adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    simpson(&f, a, b, fa, fm, fb, tol, 40)
}

/// Moments of `(1-s²)^{-1} log(e/(1-s²))^{-α}` after `1 + log(1/(1-s²)) = e^v`:
/// `½ ∫_0^∞ (1 - e^{1-e^v})^{(x-1)/2} e^{(1-α)v} dv`.
fn log_moment(alpha: f64, x: f64) -> f64 {
    let g = |v: f64| {
        let t = v.exp_m1();
        (-(-t).exp_m1()).powf((x - 1.0) / 2.0) * ((1.0 - alpha) * v).exp()
    };
    // split at the bulk of (1 - e^{-t})^{(x-1)/2} so the step finds it
    let knee = ((x + 1.0).ln() + 1.0).ln().max(0.5);
    0.5 * (adaptive(g, 0.0, knee, 1e-14) + adaptive(g, knee, 80.0, 1e-14))
}

fn c1_moments() -> Outcome {
    let mut worst: f64 = 0.0;
    for alpha in [0.0, 1.0, 2.5] {
        let om = RadialWeight::standard(alpha).unwrap();
        for x in [0.0, 1.0, 3.0, 10.0, 100.0, 1e4] {
            worst = worst.max(rel(om.moment_by_quadrature(x).unwrap(), standard_moment(alpha, x)));
        }
    }
    check(worst < 1e-8, format!("max relative error {worst:.2e} (tol 1e-8)"))
}

fn c2_fractional() -> Outcome {
    let f = TaylorSeries::random(2, 200);
    let mut worst: f64 = 0.0;
    for beta in [0.5, 1.0, 2.5] {
        let a = frac_deriv_beta(&f, beta).unwrap();
        let b = frac_deriv_mu(&f, &RadialWeight::standard_order(beta).unwrap()).unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            worst = worst.max((x - y).norm() / y.norm());
        }
    }
    check(worst < 1e-8, format!("max coefficient relative error {worst:.2e} (tol 1e-8)"))
}

fn c3_cesaro() -> Outcome {
    let mut unity: f64 = 0.0;
    for k in [2, 3, 4] {
        let basis = build_basis(k, 4096).unwrap();
        for j in 0..=4096 {
            let s: f64 = (0..=basis.max_block()).map(|n| basis.coefficient(n, j)).sum();
            unity = unity.max((s - 1.0).abs());
        }
    }
    let basis = build_basis(2, 1000).unwrap();
    let mut recon: f64 = 0.0;
    for seed in 0..20 {
        let f = TaylorSeries::random(1000 + seed, 1000);
        let mut sum = TaylorSeries::zero();
        for n in 0..=basis.max_block() {
            sum = sum.add(&block(&f, &basis, n));
        }
        for j in 0..=1000 {
            recon = recon.max((sum.coeff(j) - f.coeff(j)).norm());
        }
    }
    check(
        unity < 1e-12 && recon < 1e-10,
        format!("partition error {unity:.2e} (tol 1e-12), reconstruction error {recon:.2e} (tol 1e-10)"),
    )
}

fn c4_parseval() -> Outcome {
    let mut worst: f64 = 0.0;
    for f in FamilySpec::default().build().unwrap() {
        for r in [0.0f64, 0.5, 0.9, 0.99, 1.0] {
            let want: f64 = f
                .series
                .coeffs()
                .iter()
                .enumerate()
                .map(|(n, c)| c.norm_sqr() * r.powi(2 * n as i32))
                .sum::<f64>()
                .sqrt();
            let got = integral_mean(&f.series, r, 2.0).unwrap();
            worst = worst.max(if want == 0.0 { got } else { rel(got, want) });
        }
    }
    check(worst < 1e-8, format!("max relative error {worst:.2e} (tol 1e-8)"))
}

fn c5_monomial_norms() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for (om, moment) in [
        (w("standard:1"), &(|x: f64| standard_moment(1.0, x)) as &dyn Fn(f64) -> f64),
        (w("log:2"), &|x: f64| log_moment(2.0, x)),
    ] {
        for p in [0.5, 2.0] {
            for n in 0..=512usize {
                let got = bergman_norm(&TaylorSeries::monomial(n), &om, p).unwrap().powf(p);
                let e = rel(got, 2.0 * moment(n as f64 * p + 1.0));
                if e > worst {
                    worst = e;
                    at = format!("{} p={p} n={n}", om.label());
                }
            }
        }
    }
    check(worst < 1e-6, format!("max relative error {worst:.2e} at {at} (tol 1e-6)"))
}

fn c6_sweep_standard() -> Outcome {
    let om = w("standard:1");
    let spread = |max: usize| {
        let fam = FamilySpec { monomial_max: max, ..FamilySpec::default() }.build().unwrap();
        equivalence_sweep(&fam, &om, &om, 2.0).unwrap().0.column("upper").unwrap().spread
    };
    let (a, b) = (spread(1 << 10), spread(1 << 11));
    let change = rel(b, a);
    check(
        change < 0.05,
        format!("max/min {a:.6} with monomials to 2^10, {b:.6} to 2^11; change {:.3}% (limit 5%)", 100.0 * change),
    )
}

fn c7_necessity_curve() -> Outcome {
    let mu = w("standard:1");
    let log = monomial_necessity_curve(&w("log:2"), &mu, 2.0, 10_000).unwrap();
    let r = log.ratio_values("R_n").unwrap();
    let increasing = (100..10_000).all(|n| r[n + 1] > r[n]);
    let g2 = r[1000] / r[100];
    let g3 = r[10_000] / r[1000];
    let std = monomial_necessity_curve(&mu, &mu, 2.0, 10_000).unwrap();
    let s = std.ratio_values("R_n").unwrap();
    let spread = |hi: usize| {
        let (lo, mx) = s[..=hi].iter().fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
        mx / lo
    };
    // recorded bracket for Standard 1, p = 2 over n <= 10^4: max/min = 27.45
    const BRACKET: f64 = 30.0;
    let (h, f) = (spread(5000), spread(10_000));
    let ok = increasing && g2 > 1.05 && g3 > 1.05 && f < BRACKET && rel(f, h) < 0.05;
    check(
        ok,
        format!(
            "log:2 strictly increasing on [100, 10^4]: {increasing}, decade growth {g2:.4}, {g3:.4} (> 1.05); \
             standard:1 max/min {h:.4} (n <= 5000), {f:.4} (n <= 10^4), bracket {BRACKET}"
        ),
    )
}

fn c8_sweep_exponential() -> Outcome {
    let fam: Vec<NamedSeries> = (1..=1000)
        .map(|n| NamedSeries {
            label: format!("z^{n}"),
            param: n as f64,
            monomial: true,
            series: TaylorSeries::monomial(n),
        })
        .collect();
    let (rep, growth) = equivalence_sweep(&fam, &w("exp:1,1"), &w("standard:1"), 2.0).unwrap();
    let up = rep.ratio_values("upper").unwrap();
    let increasing = up.windows(2).all(|p| p[1] > p[0]);
    let g = growth.upper.unwrap();
    check(
        increasing && g > 1.05,
        format!("upper strictly increasing over n <= 1000: {increasing}; growth under doubling {g:.4} (> 1.05)"),
    )
}

fn c9_integral_means() -> Outcome {
    let mu = w("standard:1");
    let fam = FamilySpec::default().build().unwrap();
    let (r1, rho1) = means_grids(1);
    let (r2, rho2) = means_grids(2);
    let mut worst: f64 = 1.0;
    let mut overall = Vec::new();
    for p in [0.5, 2.0] {
        let (mut m1, mut m2) = (0.0f64, 0.0f64);
        for f in &fam {
            let a = integral_means_check(&f.series, &mu, p, &r1, &rho1).unwrap().summary[0].max;
            let b = integral_means_check(&f.series, &mu, p, &r2, &rho2).unwrap().summary[0].max;
            worst = worst.max(a.max(b) / a.min(b));
            m1 = m1.max(a);
            m2 = m2.max(b);
        }
        worst = worst.max(m1.max(m2) / m1.min(m2));
        overall.push(format!("p={p}: max {m1:.4} -> {m2:.4}"));
    }
    check(
        worst < 2.0,
        format!("{}; worst per-function change {worst:.4}x (limit 2x)", overall.join(", ")),
    )
}

fn c10_suma() -> Outcome {
    let grid: Vec<f64> = (0..=25).map(|i| 1.0 - 0.5f64.powi(i)).collect();
    let mut lines = Vec::new();
    let mut ok = true;
    for mu in ["standard:1", "standard:0.5"] {
        for gamma in [1.0, 2.0] {
            for k in [2, 4] {
                let rep = suma_check(&w(mu), gamma, k, &grid).unwrap();
                let v = rep.ratio_values("ratio").unwrap();
                let up: Vec<(f64, f64)> = v.iter().enumerate().map(|(i, x)| (2f64.powi(i as i32), *x)).collect();
                let down: Vec<(f64, f64)> = up.iter().map(|(x, y)| (*x, 1.0 / y)).collect();
                let (g1, g2) = (doubling_growth(&up).unwrap(), doubling_growth(&down).unwrap());
                let s = rep.summary[0].spread;
                ok &= s.is_finite() && g1 < 1.05 && g2 < 1.05;
                lines.push(format!("{mu} g={gamma} k={k}: {s:.3}"));
            }
        }
    }
    check(ok, format!("max/min {}", lines.join("; ")))
}

fn c11_block_norms() -> Outcome {
    let eta = w("standard:1");
    let small = FamilySpec::at_degree(512, bergman_frac::verify::DEFAULT_SEED).build().unwrap();
    let large = FamilySpec::at_degree(1024, bergman_frac::verify::DEFAULT_SEED).build().unwrap();
    let mut ok = true;
    let mut lines = Vec::new();
    for p in [0.5, 1.0, 2.0, 4.0] {
        let a = norm_equivalence_check(&small, &eta, 2, p).unwrap().summary[0].clone();
        let b = norm_equivalence_check(&large, &eta, 2, p).unwrap().summary[0].clone();
        let change = rel(b.spread, a.spread);
        ok &= b.spread.is_finite() && change < 0.05;
        lines.push(format!("p={p}: [{:.4}, {:.4}] -> [{:.4}, {:.4}]", a.min, a.max, b.min, b.max));
    }
    check(ok, format!("{} (spread change limit 5%)", lines.join("; ")))
}

fn c12_scale_invariance() -> Outcome {
    let c = 7.3;
    let mut worst: f64 = 0.0;
    let mut track = |a: f64, b: f64| worst = worst.max(rel(b, a));
    let mu = w("standard:1");
    for om in [w("standard:1"), w("log:2"), w("exp:1,1")] {
        let big = om.scaled(c).unwrap();
        for p in [0.5, 2.0] {
            let (s0, s1) = (LpSetup::new(&om, &mu, p).unwrap(), LpSetup::new(&big, &mu, p).unwrap());
            for n in [0, 1, 7, 64, 1000] {
                track(s0.monomial_ratio(n).unwrap(), s1.monomial_ratio(n).unwrap());
            }
            let r0 = monomial_necessity_curve(&om, &mu, p, 64).unwrap();
            let r1 = monomial_necessity_curve(&big, &mu, p, 64).unwrap();
            for (a, b) in r0.rows.iter().zip(&r1.rows) {
                track(a.ratios[0], b.ratios[0]);
            }
        }
        let f = TaylorSeries::random(9, 64).add(&TaylorSeries::constant(Complex64::new(1.0, 0.0)));
        let (s0, s1) = (LpSetup::new(&om, &mu, 2.0).unwrap(), LpSetup::new(&big, &mu, 2.0).unwrap());
        track(s0.ratio(&f).unwrap(), s1.ratio(&f).unwrap());
    }
    let fam = FamilySpec::at_degree(64, 1).build().unwrap();
    let eta = w("standard:1");
    for p in [0.5, 2.0] {
        let a = norm_equivalence_check(&fam, &eta, 2, p).unwrap();
        let b = norm_equivalence_check(&fam, &eta.scaled(c).unwrap(), 2, p).unwrap();
        for (x, y) in a.rows.iter().zip(&b.rows) {
            track(x.ratios[0], y.ratios[0]);
        }
    }
    let (r, rho) = means_grids(1);
    let f = TaylorSeries::random(3, 128);
    let a = integral_means_check(&f, &mu, 2.0, &r, &rho).unwrap();
    let b = integral_means_check(&f, &mu.scaled(c).unwrap(), 2.0, &r, &rho).unwrap();
    for (x, y) in a.rows.iter().zip(&b.rows) {
        track(x.ratios[0], y.ratios[0]);
    }
    check(worst < 1e-12, format!("max relative change under 7.3x scaling {worst:.2e} (tol 1e-12)"))
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let secs = Duration::from_secs;
    let criteria: [Criterion; 12] = [
        ("1 moment oracle", secs(1), c1_moments),
        ("2 fractional-derivative consistency", secs(1), c2_fractional),
        ("3 Cesaro partition of unity", secs(5), c3_cesaro),
        ("4 Parseval oracle", secs(5), c4_parseval),
        ("5 monomial norm identity", secs(30), c5_monomial_norms),
        ("6 equivalence bounded in D", secs(120), c6_sweep_standard),
        ("7 monomial curve diverges outside D", secs(120), c7_necessity_curve),
        ("8 upper ratio unbounded outside D-hat", secs(120), c8_sweep_exponential),
        ("9 integral means constant", secs(120), c9_integral_means),
        ("10 lacunary summation bracket", secs(30), c10_suma),
        ("11 block-norm equivalence", secs(180), c11_block_norms),
        ("12 scale invariance", secs(120), c12_scale_invariance),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let in_time = took <= budget;
        let (tag, detail) = match &outcome {
            Ok(d) if in_time => ("PASS", d.clone()),
            Ok(d) => ("FAIL", format!("{d}; over the {budget:?} budget")),
            Err(d) => ("FAIL", d.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("[{tag}] criterion {name}: {detail} ({:.2}s)", took.as_secs_f64());
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
