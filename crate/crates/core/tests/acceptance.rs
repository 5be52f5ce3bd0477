//! Acceptance gate: one line per criterion, non-zero exit if any fails.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectra_core::bounds::{
    convex_lower_check, default_family, energy_bound_check, gap_bound_check, hersch_bound_check, minmax_upper_bound,
    mobius_center_radial, optimize_family, revolution_lower_check, sandwich_check, semiclassical_check, weyl_check, Annulus, BoundReport,
    ConvexDomain, Pole,
};
use spectra_core::cartesian::{assemble_cartesian, solve_cartesian, PlanarDensity, PlanarDomain, DEFAULT_TOL};
use spectra_core::radial::{refine_convergence, richardson, spectrum_with_measure, Measure};
use spectra_core::spectral::{circle_equivalence_check, schrodinger_equivalence_check};
use spectra_core::{full_spectrum, lambda2, make_density, make_profile, DensityFamily, Expr, Grid, ProfileChoice, Result};

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = fn() -> Result<Outcome>;

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// `J_1'(x)` from its power series.
fn bessel_j1_prime(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 0.5; // k = 0: (1/2) (x/2)^0 / (0! 1!)
    let mut sum = term;
    for k in 1..60 {
        let kf = k as f64;
        // ratio of consecutive coefficients (-1)^k (2k+1)/2 (x/2)^{2k} / (k! (k+1)!)
        term *= -half * half * (2.0 * kf + 1.0) / ((2.0 * kf - 1.0) * kf * (kf + 1.0));
        sum += term;
    }
    sum
}

/// First positive zero of `J_1'` by bisection on `[1, 3]`.
fn first_zero_j1_prime() -> f64 {
    let (mut a, mut b) = (1.0f64, 3.0f64);
    let fa = bessel_j1_prime(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (bessel_j1_prime(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn sphere_spectrum() -> Result<Outcome> {
    let start = Instant::now();
    let p = make_profile(ProfileChoice::RoundSphere, PI, 2)?;
    let d = make_density(DensityFamily::Constant { c: 1.0 }, &p)?;
    let spec = full_spectrum(&p, &d, 5, 4, &Grid::uniform(PI, 4000)?)?;
    let values = spec.expanded();
    // l(l+1) repeated 2l+1 times
    let exact: Vec<f64> = (0..4usize).flat_map(|l| std::iter::repeat_n((l * (l + 1)) as f64, 2 * l + 1)).collect();
    let mut worst = values[0].abs();
    for (v, e) in values.iter().zip(&exact).skip(1) {
        worst = worst.max(rel(*v, *e));
    }
    // the next value starts the cluster at 20
    let multiplicities_ok = values.len() > exact.len() && rel(values[exact.len()], 20.0) < 1e-3;
    let secs = start.elapsed().as_secs_f64();
    outcome(worst < 1e-4 && multiplicities_ok && secs < 10.0, format!("max rel err {worst:.2e}, multiplicities {multiplicities_ok}, {secs:.2}s"))
}

fn bessel() -> Result<Outcome> {
    let z = first_zero_j1_prime();
    let exact = z * z;
    let p = make_profile(ProfileChoice::FlatBall, 1.0, 2)?;
    let d = make_density(DensityFamily::Constant { c: 1.0 }, &p)?;
    let raw = lambda2(&p, &d, &Grid::uniform(1.0, 4000)?)?.0;
    let r = refine_convergence(&p, &d, 1, 0, 1000)?;
    let (e_raw, e_ext) = (rel(raw, exact), rel(r.extrapolated, exact));
    outcome(e_raw < 1e-4 && e_ext < 1e-6, format!("j'_11^2 = {exact:.10}, raw err {e_raw:.2e}, extrapolated err {e_ext:.2e}"))
}

fn convex_lower() -> Result<Outcome> {
    let start = Instant::now();
    let mut ok = true;
    let mut lines = Vec::new();
    for j in [1.0, 2.0, 4.0, 8.0] {
        let r = convex_lower_check(ConvexDomain::Ball { r_max: 3.0, n: 2 }, j, [0.0, 0.0], 4000)?;
        ok &= r.satisfied;
        if j * 9.0 >= 30.0 {
            ok &= rel(r.rhs, 2.0 * j) < 0.01;
        }
        lines.push(format!("ball j={j}: {:.5}", r.rhs));
    }
    for j in [2.0, 6.0] {
        let r = convex_lower_check(ConvexDomain::Rectangle { a: 2.0, b: 2.0 }, j, [0.0, 0.0], 128)?;
        ok &= r.satisfied;
        lines.push(format!("square j={j}: {:.5}", r.rhs));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(ok && secs < 60.0, format!("{}, {secs:.1}s", lines.join(", ")))
}

fn sandwich() -> Result<Outcome> {
    let js = [10.0, 20.0, 40.0, 80.0];
    let a = sandwich_check(1.0, 3, &js, 2000)?;
    let b = sandwich_check(1.0, 3, &js, 4000)?;
    let threshold = a.threshold.unwrap_or(f64::INFINITY);
    let lower_ok = a.reports.iter().zip(&js).all(|(r, j)| *j < threshold || r.satisfied) && a.threshold.is_some();
    let drift = rel(a.b_hat, b.b_hat);
    let slope80 = b.lambda2_over_j[3];
    outcome(
        lower_ok && drift < 0.02 && (1.96..=2.04).contains(&slope80),
        format!("threshold j = {threshold}, B3 = {:.4} (drift {drift:.1e}), lambda2/j at 80 = {slope80:.4}", b.b_hat),
    )
}

fn hersch_densities(rng: &mut ChaCha8Rng) -> Vec<Expr> {
    let mut out = Vec::new();
    while out.len() < 20 {
        let (a, b, c): (f64, f64, f64) = (rng.random_range(-1.5..1.5), rng.random_range(-1.0..1.0), rng.random_range(-0.5..0.5));
        if a.abs() + b.abs() + c.abs() < 0.2 {
            continue;
        }
        out.push(Expr::parse(&format!("exp({a}*cos(r) + {b}*cos(2*r) + {c}*cos(3*r))")).expect("generated density parses"));
    }
    out
}

fn hersch() -> Result<Outcome> {
    let grid = Grid::uniform(PI, 4000)?;
    let s2 = make_profile(ProfileChoice::RoundSphere, PI, 2)?;
    let s3 = make_profile(ProfileChoice::RoundSphere, PI, 3)?;
    let one2 = hersch_bound_check(&s2, &make_density(DensityFamily::Constant { c: 1.0 }, &s2)?, &grid)?;
    let one3 = hersch_bound_check(&s3, &make_density(DensityFamily::Constant { c: 1.0 }, &s3)?, &grid)?;
    let eq2 = (one2.lhs - 2.0).abs() < 1e-4 && (one2.rhs - 2.0).abs() < 1e-4 && one2.satisfied;
    let eq3 = (one3.lhs - 3.0).abs() < 1e-4 && (one3.rhs - 3.0).abs() < 1e-4 && one3.satisfied;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut strict = 0;
    let mut min_margin = f64::INFINITY;
    for sigma in hersch_densities(&mut rng) {
        let r = hersch_bound_check(&s2, &make_density(DensityFamily::Custom { sigma }, &s2)?, &grid)?;
        if r.satisfied && r.margin > 0.0 {
            strict += 1;
        }
        min_margin = min_margin.min(r.margin / r.rhs);
    }
    outcome(
        eq2 && eq3 && strict == 20,
        format!("S2: {:.6} vs {:.6}, S3: {:.6} vs {:.6}, strict {strict}/20, min rel margin {min_margin:.2e}", one2.lhs, one2.rhs, one3.lhs, one3.rhs),
    )
}

fn mobius() -> Result<Outcome> {
    let grid = Grid::uniform(PI, 4000)?;
    let s2 = make_profile(ProfileChoice::RoundSphere, PI, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut family = vec![make_density(DensityFamily::Constant { c: 1.0 }, &s2)?];
    for sigma in hersch_densities(&mut rng) {
        family.push(make_density(DensityFamily::Custom { sigma }, &s2)?);
    }
    let mut inside = 0;
    let mut worst_low = f64::INFINITY;
    for d in &family {
        let r = hersch_bound_check(&s2, d, &grid)?;
        let q = mobius_center_radial(&s2, d)?.min_quotient();
        if q >= r.lhs - 1e-6 && q <= r.rhs * (1.0 + 1e-4) {
            inside += 1;
        }
        worst_low = worst_low.min(q - r.lhs);
    }
    outcome(inside == family.len(), format!("{inside}/{} in range, min(quotient - lambda2) = {worst_low:.2e}", family.len()))
}

fn energy_lemma() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut passed = 0;
    let mut total = 0;
    let mut tightest = f64::INFINITY;
    for (choice, r_max) in [(ProfileChoice::FlatBall, 1.0), (ProfileChoice::RoundSphere, PI)] {
        let p = make_profile(choice, r_max, 3)?;
        let d = make_density(DensityFamily::Constant { c: 1.0 }, &p)?;
        let grid = Grid::uniform(r_max, 4000)?;
        for _ in 0..100 {
            let outer = rng.random_range(0.02..0.5) * r_max;
            let inner = if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..0.95) * outer };
            let pole = if r_max == PI && rng.random_bool(0.5) { Pole::South } else { Pole::North };
            let r = energy_bound_check(&p, &d, &Annulus::new(pole, inner, outer)?, &grid)?;
            total += 1;
            if r.satisfied {
                passed += 1;
            }
            tightest = tightest.min(r.rhs / r.lhs);
        }
    }
    outcome(passed == total, format!("{passed}/{total}, smallest rhs/lhs {tightest:.3}"))
}

fn random_family(rng: &mut ChaCha8Rng, k: usize, r_max: f64) -> Result<Vec<Annulus>> {
    // nested caps: each doubled annulus starts where the previous one ends
    let mut out = Vec::with_capacity(k);
    let mut start = 0.0;
    let reach = r_max * rng.random_range(0.3..1.0);
    for i in 0..k {
        let room = reach * 4f64.powi(i as i32 + 1 - k as i32);
        let inner = 2.0 * start;
        let outer = (room / 2.0).max(inner * rng.random_range(1.05..1.2));
        if 2.0 * outer > r_max {
            break;
        }
        out.push(Annulus::new(Pole::North, inner, outer)?);
        start = 2.0 * outer;
    }
    Ok(out)
}

fn minmax() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    let mut failed = 0;
    for (choice, r_max) in [(ProfileChoice::FlatBall, 1.0), (ProfileChoice::RoundSphere, PI)] {
        let p = make_profile(choice, r_max, 2)?;
        let grid = Grid::uniform(r_max, 2000)?;
        for d in [
            make_density(DensityFamily::Constant { c: 1.0 }, &p)?,
            make_density(DensityFamily::Custom { sigma: Expr::parse("exp(-r^2)")? }, &p)?,
        ] {
            for nu in [Measure::Sigma, Measure::Riemannian] {
                for k in 2..=6 {
                    let mut families = vec![default_family(&p, k)?];
                    let extra = random_family(&mut rng, k, r_max)?;
                    if extra.len() == k {
                        families.push(extra);
                    }
                    for fam in families {
                        let r = minmax_upper_bound(&p, &d, &fam, &grid, &nu)?;
                        checked += 1;
                        if r.rhs < r.lhs - 1e-9 {
                            failed += 1;
                        }
                    }
                    if k <= 3 {
                        let (_, r) = optimize_family(&p, &d, &default_family(&p, k)?, &grid, &nu, 20)?;
                        checked += 1;
                        if r.rhs < r.lhs - 1e-9 {
                            failed += 1;
                        }
                    }
                }
            }
        }
    }
    outcome(failed == 0, format!("{} of {checked} families valid", checked - failed))
}

fn semiclassical() -> Result<Outcome> {
    let f0 = Expr::parse("cos(2*t)")?;
    let r = semiclassical_check(&f0, &[0.1, 0.05, 0.02], 4000)?;
    let all = r.reports.iter().all(|b| b.satisfied);
    let ratios: Vec<f64> = r.reports.iter().map(|b| b.params["lambda_m0"].as_f64().unwrap_or(f64::NAN) / b.rhs).collect();
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    let l3: Vec<String> = r.reports.iter().map(|b| format!("{:.3}", b.rhs)).collect();
    let q: Vec<String> = ratios.iter().map(|x| format!("{x:.2e}")).collect();
    outcome(r.minima == 2 && all && decreasing, format!("lambda3 = [{}], lambda2/lambda3 = [{}]", l3.join(", "), q.join(", ")))
}

fn gap() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let coeffs: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
    let trig = format!("{}*cos(t) + {}*sin(2*t) + {}*cos(3*t) + {}*sin(t)", coeffs[0], coeffs[1], coeffs[2], coeffs[3]);
    let mut ok = true;
    let mut worst = 0.0f64;
    for v in ["0".to_string(), "3*cos(t)".to_string(), trig] {
        let r = gap_bound_check(&Expr::parse(&v)?, 10, 4000)?;
        let dev = r.params["relative_deviation"].as_f64().unwrap_or(f64::NAN);
        ok &= r.satisfied && dev < 1e-3;
        worst = worst.max(dev);
    }
    outcome(ok, format!("k = 10, worst relative deviation {worst:.2e}"))
}

fn revolution_growth() -> Result<Outcome> {
    let p = make_profile(ProfileChoice::RoundSphere, PI, 2)?;
    let r = revolution_lower_check(&p, &[5.0, 10.0, 20.0, 40.0], 4000)?;
    let slope = r.slope.unwrap_or(f64::NAN);
    let values: Vec<String> = r.reports.iter().map(|b| format!("{:.3}", b.rhs)).collect();
    outcome((1.9..=2.1).contains(&slope), format!("j0 = {:?}, lambda2 = [{}], slope {slope:.4}", r.j0, values.join(", ")))
}

fn equivalence() -> Result<Outcome> {
    let s2 = make_profile(ProfileChoice::RoundSphere, PI, 2)?;
    let d = make_density(DensityFamily::Gaussian { j: 1.0 }, &s2)?;
    let fine = schrodinger_equivalence_check(&s2, &d, 6, 4, &Grid::uniform(PI, 4000)?)?.max_deviation;
    let coarse = schrodinger_equivalence_check(&s2, &d, 6, 4, &Grid::uniform(PI, 2000)?)?.max_deviation;
    let f = Expr::parse("cos(t)")?;
    let cfine = circle_equivalence_check(2.0 * PI, &f, 6, 4000, DEFAULT_TOL)?.max_deviation;
    let ccoarse = circle_equivalence_check(2.0 * PI, &f, 6, 2000, DEFAULT_TOL)?.max_deviation;
    outcome(
        fine < 5e-3 && cfine < 5e-3 && fine < coarse && cfine < ccoarse,
        format!("sphere {coarse:.2e} -> {fine:.2e}, circle {ccoarse:.2e} -> {cfine:.2e}"),
    )
}

fn weyl() -> Result<Outcome> {
    let p = make_profile(ProfileChoice::FlatBall, 1.0, 2)?;
    let grid = Grid::uniform(1.0, 4000)?;
    let a = weyl_check(&p, &make_density(DensityFamily::Constant { c: 1.0 }, &p)?, 200, &grid)?;
    let b = weyl_check(&p, &make_density(DensityFamily::Gaussian { j: 1.0 }, &p)?, 200, &grid)?;
    let ca = a.params["coefficient"].as_f64().unwrap_or(f64::NAN);
    let cb = b.params["coefficient"].as_f64().unwrap_or(f64::NAN);
    outcome(a.satisfied && b.satisfied && rel(cb, ca) < 0.1, format!("coefficients {ca:.4} (sigma = 1) and {cb:.4} (Gaussian), target 4"))
}

fn order_in_range(values: [f64; 3]) -> Option<f64> {
    richardson(values).order.filter(|o| (1.8..=2.2).contains(o))
}

fn properties() -> Result<Outcome> {
    let mut notes = Vec::new();
    let mut ok = true;
    // scale invariance of L_sigma
    let p = make_profile(ProfileChoice::FlatBall, 1.0, 2)?;
    let grid = Grid::uniform(1.0, 1000)?;
    let d = make_density(DensityFamily::Gaussian { j: 2.0 }, &p)?;
    let base = full_spectrum(&p, &d, 3, 3, &grid)?.expanded();
    let scaled = full_spectrum(&p, &d.scaled(7.5), 3, 3, &grid)?.expanded();
    let inv = base.iter().zip(&scaled).skip(1).map(|(a, b)| rel(*b, *a)).fold(0.0, f64::max);
    ok &= inv < 1e-12;
    notes.push(format!("scale invariance {inv:.1e}"));
    // homogeneity of mu_k(c sigma, dv)
    let mu = spectrum_with_measure(&p, &d, 3, 3, &grid, &Measure::Riemannian)?.expanded();
    let mu_c = spectrum_with_measure(&p, &d.scaled(7.5), 3, 3, &grid, &Measure::Riemannian)?.expanded();
    let hom = mu.iter().zip(&mu_c).skip(1).map(|(a, b)| rel(*b, 7.5 * a)).fold(0.0, f64::max);
    ok &= hom < 1e-12 && mu[0].abs() < 1e-10 && mu[1] > 0.0;
    notes.push(format!("homogeneity {hom:.1e}"));
    // convergence orders
    let mut orders = Vec::new();
    let sphere = make_profile(ProfileChoice::RoundSphere, PI, 2)?;
    let one = make_density(DensityFamily::Constant { c: 1.0 }, &sphere)?;
    orders.push(("sphere", refine_convergence(&sphere, &one, 1, 0, 250)?.order));
    let disk_one = make_density(DensityFamily::Constant { c: 1.0 }, &p)?;
    orders.push(("disk", refine_convergence(&p, &disk_one, 1, 0, 250)?.order));
    orders.push(("gaussian disk", refine_convergence(&p, &d, 0, 1, 250)?.order));
    let circle = |m: usize| -> Result<f64> {
        let dom = PlanarDomain::circle(2.0 * PI, m, PlanarDensity::Log(Expr::parse("cos(t)")?));
        Ok(solve_cartesian(&assemble_cartesian(&dom)?, 2, DEFAULT_TOL)?.values[1])
    };
    orders.push(("circle", order_in_range([circle(100)?, circle(200)?, circle(400)?])));
    let interval = |m: usize| -> Result<f64> {
        let dom = PlanarDomain::interval(1.0, m, PlanarDensity::Log(Expr::parse("x^2")?));
        Ok(solve_cartesian(&assemble_cartesian(&dom)?, 2, DEFAULT_TOL)?.values[1])
    };
    orders.push(("interval", order_in_range([interval(100)?, interval(200)?, interval(400)?])));
    let square = |m: usize| -> Result<f64> {
        let dom = PlanarDomain::rectangle(2.0, 2.0, m, m, PlanarDensity::Gaussian { j: 1.0, center: [0.0, 0.0] });
        Ok(solve_cartesian(&assemble_cartesian(&dom)?, 2, DEFAULT_TOL)?.values[1])
    };
    orders.push(("square", order_in_range([square(16)?, square(32)?, square(64)?])));
    for (name, order) in &orders {
        let good = order.is_some_and(|o| (1.8..=2.2).contains(&o));
        ok &= good;
        notes.push(format!("{name} order {}", order.map_or("n/a".into(), |o| format!("{o:.3}"))));
    }
    // repeated runs serialize identically
    let run = || -> Result<String> {
        let reports: Vec<BoundReport> = vec![
            hersch_bound_check(&sphere, &one, &Grid::uniform(PI, 500)?)?,
            gap_bound_check(&Expr::parse("3*cos(t)")?, 4, 400)?,
            convex_lower_check(ConvexDomain::Rectangle { a: 2.0, b: 2.0 }, 2.0, [0.0, 0.0], 32)?,
        ];
        Ok(serde_json::to_string(&reports).expect("reports serialize"))
    };
    let same = run()? == run()?;
    ok &= same;
    notes.push(format!("byte-identical {same}"));
    outcome(ok, notes.join(", "))
}

fn main() {
    let criteria: [(&str, Criterion); 14] = [
        ("sphere spectrum", sphere_spectrum),
        ("disk Neumann eigenvalue", bessel),
        ("Gaussian lower bound on convex domains", convex_lower),
        ("two-sided estimate on the 3-ball", sandwich),
        ("sphere upper bound", hersch),
        ("conformal centring", mobius),
        ("annulus energy estimate", energy_lemma),
        ("min-max validity", minmax),
        ("semiclassical growth", semiclassical),
        ("Schrodinger gap bound", gap),
        ("growth on the closed sphere", revolution_growth),
        ("unitary equivalence", equivalence),
        ("Weyl asymptotics", weyl),
        ("scaling, order and determinism", properties),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match run() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!("{} {:>2} {name}: {detail} [{:.1}s]", if pass { "PASS" } else { "FAIL" }, i + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
