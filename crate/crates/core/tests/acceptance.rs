//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit status if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tentspace::funcmodel::{kernel_primitive, AnalyticFn};
use tentspace::geometry::{DiskPoint, Region};
use tentspace::harness::{run_verify, Config, Report};
use tentspace::operators::{apply_s, apply_t};
use tentspace::quadrature::{disk_integral, forelli_rudin_check, region_integral, QuadratureSpec, WeightedIntegrand};

const ALGEBRA_TOL: f64 = 1e-10;
const MOMENT_TOL: f64 = 1e-6;
const MONTE_CARLO_TOL: f64 = 0.01;
const MONTE_CARLO_SAMPLES: usize = 1_000_000;

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

fn samples() -> Vec<AnalyticFn> {
    let k1 = AnalyticFn::kernel(c(0.3, 0.4), 1.5, c(1.0, -0.5)).unwrap();
    let k2 = AnalyticFn::kernel(c(-0.5, 0.1), 2.0, c(0.25, 0.0)).unwrap();
    let lg = AnalyticFn::log(c(0.0, -0.45), c(2.0, 1.0)).unwrap();
    let poly = AnalyticFn::polynomial(vec![c(1.0, 0.0), c(0.0, -2.0), c(0.5, 0.5), c(3.0, 0.0)]);
    vec![k1.clone(), k2.clone(), lg.clone(), poly.clone(), k1 + lg + poly, k2.scaled(c(0.0, 1.0))]
}

fn points() -> Vec<Complex64> {
    vec![c(0.0, 0.0), c(0.1, -0.2), c(-0.25, 0.05), c(0.2, 0.2)]
}

fn exact_algebra() -> Outcome {
    let degree = 256;
    let fs = samples();
    let mut worst = 0.0f64;
    let mut note = |name: &str, err: f64| -> Result<(), String> {
        worst = worst.max(err);
        ensure(err <= ALGEBRA_TOL, format!("{name}: error {err:e}"))
    };
    for (i, f) in fs.iter().enumerate() {
        for n in 1..=3 {
            let back = f.integrate_n(n, degree).derivative(n).taylor(degree);
            let orig = f.taylor(degree);
            let err = back.iter().zip(&orig).map(|(a, b)| rel(*a, *b)).fold(0.0, f64::max);
            note(&format!("D^{n} I^{n} of sample {i}"), err)?;
        }
        for g in &fs {
            let fg = f.product(g, degree);
            let d_fg = fg.derivative(1);
            for &z in &points() {
                note("product", rel(fg.evaluate(z), f.evaluate(z) * g.evaluate(z)))?;
                let leibniz = f.derivative(1).evaluate(z) * g.evaluate(z) + f.evaluate(z) * g.derivative(1).evaluate(z);
                note("Leibniz rule", rel(d_fg.evaluate(z), leibniz))?;
            }
            for n in 1..=3 {
                for k in 0..n {
                    let t = apply_t(f, g, n, k, degree).map_err(|e| e.to_string())?;
                    ensure(t.taylor(n - 1).iter().all(|x| *x == c(0.0, 0.0)), "image does not vanish to order n")?;
                    let direct = f.derivative(k).product(&g.derivative(n - k), degree);
                    for &z in &points() {
                        note("D^n T_g", rel(t.derivative(n).evaluate(z), direct.evaluate(z)))?;
                    }
                    if k >= 1 {
                        let s = apply_s(f, g, n, n - k, degree).map_err(|e| e.to_string())?;
                        ensure(s.taylor(degree) == t.taylor(degree), format!("duality fails for n = {n}, k = {}", n - k))?;
                    }
                }
            }
        }
    }
    for s in [0.5f64, 1.0, 2.5, 3.0] {
        for m in 0..=3 {
            // a log atom has no primitive in the family
            if s.fract() == 0.0 && s <= m as f64 - 1.0 {
                ensure(kernel_primitive(c(0.6, -0.3), s, c(1.0, 0.5), m).is_err(), "primitive of a log accepted")?;
                continue;
            }
            let prim = kernel_primitive(c(0.6, -0.3), s, c(1.0, 0.5), m).map_err(|e| e.to_string())?;
            let target = AnalyticFn::kernel(c(0.6, -0.3), s, c(1.0, 0.5)).unwrap();
            for &z in &points() {
                note("kernel primitive", rel(prim.derivative(m).evaluate(z), target.evaluate(z)))?;
            }
        }
    }
    Ok(format!("max error {worst:.2e}"))
}

/// Mean of `h` over `MONTE_CARLO_SAMPLES` uniform points of the disk, i.e. its integral against
/// normalized area measure.
fn monte_carlo(seed: u64, h: impl Fn(Complex64) -> f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    for _ in 0..MONTE_CARLO_SAMPLES {
        let r: f64 = rng.gen::<f64>().sqrt();
        let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        sum += h(Complex64::from_polar(r, t));
    }
    sum / MONTE_CARLO_SAMPLES as f64
}

fn quadrature_calibration() -> Outcome {
    let spec = QuadratureSpec::default();
    let mut worst_moment = 0.0f64;
    for gamma in [-0.5, 0.0, 1.0, 2.5] {
        let got = disk_integral(&WeightedIntegrand::new(|_| 1.0, gamma), &spec).map_err(|e| e.to_string())?.value;
        let err = (got * (gamma + 1.0) - 1.0).abs();
        worst_moment = worst_moment.max(err);
        ensure(err <= MOMENT_TOL, format!("moment gamma = {gamma}: {got} vs {}", 1.0 / (gamma + 1.0)))?;
    }

    let one = c(1.0, 0.0);
    let mut worst_mc = 0.0f64;
    let kernel = move |z: Complex64| 1.0 / (one - c(0.5, 0.2) * z).norm_sqr();
    let q = disk_integral(&WeightedIntegrand::new(kernel, 1.0), &spec).map_err(|e| e.to_string())?.value;
    let mc = monte_carlo(1, |z| kernel(z) * (1.0 - z.norm_sqr()));
    worst_mc = worst_mc.max((q / mc - 1.0).abs());

    let peaked = move |z: Complex64| (one - c(0.0, 0.8) * z).norm().powf(-1.5);
    let q = disk_integral(&WeightedIntegrand::new(peaked, 0.5), &spec).map_err(|e| e.to_string())?.value;
    let mc = monte_carlo(2, |z| peaked(z) * (1.0 - z.norm_sqr()).sqrt());
    worst_mc = worst_mc.max((q / mc - 1.0).abs());

    let u = DiskPoint::polar(0.5, 1.0).unwrap();
    let boxed = |z: Complex64| z.norm_sqr();
    let q = region_integral(&WeightedIntegrand::new(boxed, 1.0), &Region::CarlesonBox(u), &spec)
        .map_err(|e| e.to_string())?
        .value;
    let mc = monte_carlo(3, |z| {
        let w = DiskPoint::from_complex(z).unwrap();
        if tentspace::geometry::in_carleson_box(u, w) { boxed(z) * (1.0 - z.norm_sqr()) } else { 0.0 }
    });
    worst_mc = worst_mc.max((q / mc - 1.0).abs());
    ensure(worst_mc <= MONTE_CARLO_TOL, format!("Monte-Carlo disagreement {worst_mc:.4}"))?;
    Ok(format!("moments within {worst_moment:.1e}, Monte-Carlo within {worst_mc:.2e}"))
}

fn verify_all(ids: &[&str], config: &Config) -> Result<Vec<Report>, String> {
    ids.iter().map(|id| run_verify(id, config).map_err(|e| format!("{id}: {e}"))).collect()
}

fn summarize(reports: &[&Report], filter: impl Fn(&str) -> bool) -> Outcome {
    let mut total = 0;
    let mut failed = Vec::new();
    for r in reports {
        if !r.errors.is_empty() {
            failed.push(format!("{}: errors {:?}", r.suite, r.errors));
        }
        for ch in r.checks.iter().filter(|ch| filter(&ch.name)) {
            total += 1;
            if !ch.passed {
                failed.push(format!("{} / {}: {}", r.suite, ch.name, ch.detail));
            }
        }
    }
    if total == 0 {
        return Err("no checks ran".into());
    }
    if failed.is_empty() {
        Ok(format!("{total} checks passed"))
    } else {
        Err(failed.join("; "))
    }
}

fn forelli_rudin(config: &Config) -> Outcome {
    let r = run_verify("forelli-rudin", config).map_err(|e| e.to_string())?;
    let summary = summarize(&[&r], |_| true)?;
    // at a = b = 0 the integral is the moment 1/(s+1) and the bound is 1
    let o = DiskPoint::ORIGIN;
    for (s, rr, t) in tentspace::harness::suites::FORELLI_RUDIN_PARAMS {
        let got = forelli_rudin_check(o, o, s, rr, t, &config.eval.settings.quad).map_err(|e| e.to_string())?;
        ensure((got * (s + 1.0) - 1.0).abs() <= MOMENT_TOL, format!("origin ratio {got} for s = {s}"))?;
    }
    Ok(summary)
}

fn main() {
    let config = Config::default();
    let th1 = std::cell::OnceCell::new();
    let th1_report = || -> Result<Report, String> {
        th1.get_or_init(|| run_verify("th1", &config).map_err(|e| e.to_string())).clone()
    };

    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("exact algebra", Box::new(exact_algebra)),
        ("quadrature calibration", Box::new(quadrature_calibration)),
        ("Littlewood-Paley equivalence", Box::new(|| summarize(&verify_all(&["lp"], &config)?.iter().collect::<Vec<_>>(), |_| true))),
        ("growth bound", Box::new(|| summarize(&verify_all(&["z"], &config)?.iter().collect::<Vec<_>>(), |_| true))),
        ("T_g sufficiency, p <= q", Box::new(|| summarize(&[&th1_report()?], |n| !n.contains("blow up")))),
        (
            "T_g necessity and compactness decay",
            Box::new(|| {
                let th1 = th1_report()?;
                let th3 = verify_all(&["th3"], &config)?;
                summarize(&[&th1, &th3[0]], |n| n.contains("blow up") || n.contains("weakly null") || n.contains("classification"))
            }),
        ),
        ("T_g with q < p", Box::new(|| summarize(&verify_all(&["th2", "th4"], &config)?.iter().collect::<Vec<_>>(), |_| true))),
        ("S_g suites and duality", Box::new(|| summarize(&verify_all(&["sn1", "sn2", "sn3", "sn4"], &config)?.iter().collect::<Vec<_>>(), |_| true))),
        (
            "atomic machinery",
            Box::new(|| {
                let ids = ["synthesis", "discretization", "multiplier", "truncation"];
                summarize(&verify_all(&ids, &config)?.iter().collect::<Vec<_>>(), |_| true)
            }),
        ),
        ("Forelli-Rudin estimate", Box::new(|| forelli_rudin(&config))),
        (
            "determinism",
            Box::new(|| {
                let first = th1_report()?;
                let second = run_verify("th1", &config).map_err(|e| e.to_string())?;
                let (a, b) = (first.to_json().map_err(|e| e.to_string())?, second.to_json().map_err(|e| e.to_string())?);
                ensure(a == b, "reports differ")?;
                let (da, db) = (tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?);
                let fa = first.write(da.path()).map_err(|e| e.to_string())?;
                let fb = second.write(db.path()).map_err(|e| e.to_string())?;
                for (x, y) in fa.iter().zip(&fb) {
                    ensure(std::fs::read(x).ok() == std::fs::read(y).ok(), format!("{} differs", x.display()))?;
                }
                Ok(format!("{} files byte-identical", fa.len()))
            }),
        ),
    ];

    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({secs:.1} s): {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.1} s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
