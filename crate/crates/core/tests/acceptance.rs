//! Acceptance checks. Runs without the libtest harness so that one PASS/FAIL
//! line per criterion is always printed; exits non-zero if any fails.

mod common;

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use degbeam::coefficient::DegeneracyCoefficient;
use degbeam::config::RunConfig;
use degbeam::discretization::{BeamDiscretization, DofVector};
use degbeam::dynamics::{
    multiplier_identity_residual, simulate, CurvatureTrace, SimulationOptions,
};
use degbeam::initial::{InitialData, Profile, Shape};
use degbeam::poly::Polynomial;
use degbeam::run::{run_sweep, SimulationReport};
use degbeam::statics::{solve_variational, StaticProblem};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn sweep_config() -> RunConfig {
    // defaults: x²(1−x)² data at rest, n = 128, dt = 1e-3, t_end = 20,
    // Hardy constant at mesh 512, alpha × beta × gamma = 4 × 3 × 3
    RunConfig::with_alpha(0.5)
}

fn key(r: &SimulationReport) -> String {
    format!("(alpha {}, beta {}, gamma {})", r.alpha, r.beta, r.gamma)
}

fn energy_identity(sweep: &[SimulationReport]) -> Verdict {
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for r in sweep {
        let t = &r.trace;
        let e0 = t.initial_energy();
        for (n, d) in t.step_dissipation.iter().enumerate() {
            let defect = (t.energy[n + 1] - t.energy[n] + t.dt * d).abs() / e0;
            if defect > worst {
                worst = defect;
                at = key(r);
            }
        }
    }
    verdict(
        worst <= 1e-10,
        format!(
            "max |E(n+1) - E(n) + dt D| / E(0) = {worst:.2e} at {at} over {} runs",
            sweep.len()
        ),
    )
}

fn decay_certificate(sweep: &[SimulationReport]) -> Verdict {
    let mut failures = Vec::new();
    let mut min_margin = f64::INFINITY;
    let mut extended = 0;
    let mut m_range = (f64::INFINITY, 0.0f64);
    for r in sweep {
        let m = r.ledger.constants.m;
        m_range = (m_range.0.min(m), m_range.1.max(m));
        let t = &r.trace;
        let e0 = t.initial_energy();
        let bound = |s: f64| e0 * (1.0 - s / m).exp();
        let mut ok = true;
        for (&s, &e) in t.times.iter().zip(&t.energy) {
            ok &= e <= bound(s) * (1.0 + 1e-6);
            if e > 0.0 {
                min_margin = min_margin.min(bound(s) / e);
            }
        }
        let monotone = t.energy.windows(2).all(|w| w[1] <= w[0] + 1e-10 * e0);
        let horizon = t.times.last().copied().unwrap().max(3.0 * m);
        assert!((horizon - r.horizon).abs() <= 1e-9 * horizon);
        // E non-increasing: E(t) ≤ E(T) ≤ bound(horizon) ≤ bound(t) on [T, horizon]
        let tail = t.final_energy() <= bound(horizon) * (1.0 + 1e-6);
        if !tail {
            extended += 1;
        }
        ok &= monotone && (tail || (r.decay.ok && r.decay.certified_until >= horizon));
        if !ok {
            failures.push(key(r));
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{} runs, M in [{:.3e}, {:.3e}], min bound/E = {min_margin:.3}, tail by monotonicity on {} runs, extended on {extended}{}",
            sweep.len(),
            m_range.0,
            m_range.1,
            sweep.len() - extended,
            if failures.is_empty() { String::new() } else { format!(", failing {failures:?}") }
        ),
    )
}

fn trapezoid_from(t: &[f64], e: &[f64], s: f64) -> f64 {
    let mut acc = 0.0;
    for i in 1..t.len() {
        if t[i - 1] >= s - 1e-12 {
            acc += 0.5 * (t[i] - t[i - 1]) * (e[i] + e[i - 1]);
        }
    }
    acc
}

fn integral_inequality(sweep: &[SimulationReport]) -> Verdict {
    let mut worst: f64 = 0.0;
    let mut fails = Vec::new();
    for r in sweep {
        let c = &r.ledger.constants;
        let t = &r.trace;
        for s in [0.1, 1.0] {
            let i = t
                .times
                .iter()
                .position(|&x| (x - s).abs() < 1e-9)
                .expect("s is a sample");
            let lhs = (c.eps0 - c.delta * c.c1) * trapezoid_from(&t.times, &t.energy, s);
            let rhs = c.c2 * t.energy[i];
            worst = worst.max(lhs / rhs);
            if lhs > rhs * 1.05 {
                fails.push(format!("{} s={s}", key(r)));
            }
        }
    }
    verdict(
        fails.is_empty(),
        format!(
            "max lhs/rhs = {worst:.3e} over s in {{0.1, 1}}{}",
            if fails.is_empty() {
                String::new()
            } else {
                format!(", failing {fails:?}")
            }
        ),
    )
}

fn static_oracle(rng: &mut ChaCha8Rng) -> Verdict {
    let mut worst: f64 = 0.0;
    let mut estimates_ok = true;
    let mut count = 0;
    for alpha in [0.5, 1.5] {
        let coeff = DegeneracyCoefficient::power_law(alpha).unwrap();
        let c_hp = degbeam::coefficient::estimate_hardy_constant(&coeff, 512)
            .unwrap()
            .c_hp;
        let loads: Vec<(f64, f64)> = (0..100)
            .map(|_| (rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0)))
            .collect();
        for beta in [0.0, 0.5, 1.0, 2.0] {
            for gamma in [0.0, 0.5, 1.0, 2.0] {
                let d = BeamDiscretization::build(&coeff, 128, beta, gamma, 2.0).unwrap();
                for &(l, m) in &loads {
                    let z = solve_variational(&d, &StaticProblem::new(l, m, beta, gamma).unwrap())
                        .unwrap();
                    let (p, q) = common::static_cubic(l, m, beta, gamma);
                    let exact = d
                        .interpolate(
                            |x| p * x * x + q * x * x * x,
                            |x| 2.0 * p * x + 3.0 * q * x * x,
                        )
                        .unwrap();
                    let err = d.triple_norm_sq(&z.sub(&exact)).sqrt();
                    let norm = d.triple_norm_sq(&exact).sqrt();
                    worst = worst.max(err / norm.max(1e-300));
                    let load = (l.abs() + m.abs()).powi(2);
                    estimates_ok &= d.weighted_l2_norm_sq(&z)
                        <= (4.0 * c_hp + 1.0) * load * (1.0 + 1e-9)
                        && d.triple_norm_sq(&z) <= load * (1.0 + 1e-9);
                    count += 1;
                }
            }
        }
    }
    verdict(
        worst <= 1e-10 && estimates_ok,
        format!(
            "{count} solves, max |||z_h - z||| / |||z||| = {worst:.2e}, estimates {}",
            if estimates_ok { "hold" } else { "VIOLATED" }
        ),
    )
}

fn gauss_green() -> Verdict {
    let coeff = DegeneracyCoefficient::power_law(0.5).unwrap();
    let d = BeamDiscretization::build(&coeff, 64, 1.0, 1.0, 2.0).unwrap();
    let mut worst: f64 = 0.0;
    let mut oracle_worst: f64 = 0.0;
    for i in 2..=4 {
        for j in 2..=4 {
            let (u, v) = (Polynomial::monomial(i), Polynomial::monomial(j));
            worst = worst.max(d.gauss_green_residual(&u, &v).unwrap());
            // ∫u''''v = [u'''v - u''v']₀¹ + ∫u''v'' with u = xⁱ, v = xʲ
            let (fi, fj) = (i as f64, j as f64);
            let d4 = |x: f64| if i == 4 { 24.0 } else { 0.0 * x };
            let lhs = common::integrate(|x| d4(x) * x.powi(j as i32), 0.0, 1.0, 1e-14);
            let u3 = fi * (fi - 1.0) * (fi - 2.0);
            let u2 = fi * (fi - 1.0);
            let bending = common::integrate(
                |x| u2 * fj * (fj - 1.0) * x.powi(i as i32 + j as i32 - 4),
                0.0,
                1.0,
                1e-14,
            );
            oracle_worst = oracle_worst.max((lhs - (u3 - u2 * fj + bending)).abs());
        }
    }
    verdict(
        worst <= 1e-10 && oracle_worst <= 1e-12,
        format!("9 pairs from {{x^2, x^3, x^4}}: max residual {worst:.2e} (quadrature oracle {oracle_worst:.1e})"),
    )
}

fn random_dofs(rng: &mut ChaCha8Rng, d: &BeamDiscretization, k: usize) -> DofVector {
    if k.is_multiple_of(2) {
        DofVector::from_vec(
            (0..d.n_dof())
                .map(|_| rng.random_range(-1.0..1.0))
                .collect(),
        )
    } else {
        let c: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        d.interpolate(
            |x| c[0] * x * x + c[1] * x.powi(3) + c[2] * x.powi(4),
            |x| 2.0 * c[0] * x + 3.0 * c[1] * x * x + 4.0 * c[2] * x.powi(3),
        )
        .unwrap()
    }
}

fn hardy(sweep: &[SimulationReport], rng: &mut ChaCha8Rng) -> Verdict {
    let mut alphas: Vec<f64> = sweep.iter().map(|r| r.alpha).collect();
    alphas.dedup();
    let mut lines = Vec::new();
    let mut ok = true;
    let mut worst_quotient: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    for &alpha in &alphas {
        let h = &sweep
            .iter()
            .find(|r| r.alpha == alpha)
            .unwrap()
            .ledger
            .hardy;
        let change = (h.fine.c_hp - h.coarse.c_hp).abs() / h.fine.c_hp;
        let exact = common::hardy_power_law(alpha);
        ok &= change < 0.01 && (h.fine.c_hp - exact).abs() < 0.01 * exact;
        lines.push(format!(
            "a{alpha}: {:.5}/{:.5} vs series {exact:.5}",
            h.coarse.c_hp, h.fine.c_hp
        ));

        // 250 trial functions per alpha, integrals by adaptive quadrature
        let c_hp = h.fine.c_hp;
        let (mode, dmode) = common::frobenius_mode(alpha);
        for k in 0..250 {
            let q = if k == 0 {
                let num = common::integrate(|x| mode(x).powi(2) / x.powf(alpha), 0.0, 1.0, 1e-13);
                num / common::integrate(|x| dmode(x).powi(2), 0.0, 1.0, 1e-13)
            } else if k % 2 == 0 {
                let terms: Vec<(f64, f64)> = (0..4)
                    .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(1.0..5.0)))
                    .collect();
                let u = |x: f64| terms.iter().map(|(c, p)| c * x.powf(*p)).sum::<f64>();
                let du = |x: f64| {
                    terms
                        .iter()
                        .map(|(c, p)| c * p * x.powf(p - 1.0))
                        .sum::<f64>()
                };
                common::integrate(|x| u(x).powi(2) / x.powf(alpha), 0.0, 1.0, 1e-13)
                    / common::integrate(|x| du(x).powi(2), 0.0, 1.0, 1e-13)
            } else {
                let c: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
                let w = |j: usize| (j as f64 + 0.5) * std::f64::consts::PI;
                let u = |x: f64| {
                    c.iter()
                        .enumerate()
                        .map(|(j, cj)| cj * (w(j) * x).sin())
                        .sum::<f64>()
                };
                let du = |x: f64| {
                    c.iter()
                        .enumerate()
                        .map(|(j, cj)| cj * w(j) * (w(j) * x).cos())
                        .sum::<f64>()
                };
                common::integrate(|x| u(x).powi(2) / x.powf(alpha), 0.0, 1.0, 1e-13)
                    / common::integrate(|x| du(x).powi(2), 0.0, 1.0, 1e-13)
            };
            worst_quotient = worst_quotient.max(q / c_hp);
        }

        // ‖u‖² ≤ (4 c_hp + 1) |||u|||² for the bending part
        let coeff = DegeneracyCoefficient::power_law(alpha).unwrap();
        let d = BeamDiscretization::build(&coeff, 128, 0.0, 0.0, 2.0).unwrap();
        for k in 0..25 {
            let u = random_dofs(rng, &d, k);
            let s = d.stiffness().bilinear(&u, &u);
            let lhs = d.mass().bilinear(&u, &u) + s;
            worst_norm = worst_norm.max(lhs / ((4.0 * c_hp + 1.0) * s));
        }
    }
    ok &= worst_quotient <= 1.0 + 1e-3 && worst_norm <= 1.0 + 1e-3;
    verdict(
        ok,
        format!(
            "{}; max quotient/c_hp over 1000 trials = {worst_quotient:.6}; max norm ratio over 100 vectors = {worst_norm:.4}",
            lines.join(", ")
        ),
    )
}

fn trace_bounds(sweep: &[SimulationReport], rng: &mut ChaCha8Rng) -> Verdict {
    let mut worst: f64 = 0.0;
    for r in sweep {
        let c = &r.ledger.constants;
        let t = &r.trace;
        for i in 0..t.len() {
            let e = t.energy[i];
            if e > 0.0 {
                worst = worst
                    .max(t.trace_y1[i].powi(2) / (c.c_beta * e))
                    .max(t.trace_yx1[i].powi(2) / (c.c_gamma * e));
            }
        }
    }
    let coeff = DegeneracyCoefficient::power_law(0.7).unwrap();
    let d = BeamDiscretization::build(&coeff, 128, 0.0, 0.0, 2.0).unwrap();
    let mut worst_vec: f64 = 0.0;
    for k in 0..100 {
        // u = x²/2 makes the slope bound sharp
        let u = if k == 0 {
            d.interpolate(|x| 0.5 * x * x, |x| x).unwrap()
        } else {
            random_dofs(rng, &d, k)
        };
        let s = d.stiffness().bilinear(&u, &u);
        worst_vec = worst_vec
            .max(d.trace_value(&u).powi(2) / s)
            .max(d.trace_slope(&u).powi(2) / s);
    }
    verdict(
        worst <= 1.0 + 1e-3 && worst_vec <= 1.0 + 1e-3,
        format!(
            "sweep max trace²/(C E) = {worst:.4}; random vectors max trace²/uSu = {worst_vec:.6}"
        ),
    )
}

fn multiplier_convergence() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for alpha in [0.5, 1.5] {
        let coeff = DegeneracyCoefficient::power_law(alpha).unwrap();
        let mut res = Vec::new();
        for (n, dt) in [(128, 1e-3), (256, 5e-4)] {
            let d = BeamDiscretization::build(&coeff, n, 1.0, 1.0, 2.0).unwrap();
            let init = InitialData {
                displacement: Profile::single(Shape::X2, 1.0),
                velocity: Profile::zero(),
                compatible: false,
            };
            let (y0, y1) = init.interpolate(&d).unwrap();
            let opts = SimulationOptions {
                snapshot_stride: 1,
                ..Default::default()
            };
            let sim = simulate(&d, &y0, &y1, dt, 2.0, opts).unwrap();
            let r = multiplier_identity_residual(
                &d,
                &sim.snapshots,
                0.1,
                2.0,
                CurvatureTrace::Pointwise,
            )
            .unwrap();
            res.push(r.residual_multiplier);
        }
        ok &= res[0] <= 0.05 && res[0] / res[1] >= 2.0;
        parts.push(format!(
            "a{alpha}: {:.2e} -> {:.2e} (x{:.2})",
            res[0],
            res[1],
            res[0] / res[1]
        ));
    }
    verdict(ok, parts.join(", "))
}

fn scheme_order() -> Verdict {
    let coeff = DegeneracyCoefficient::power_law(0.5).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    let t_end = 1.0;
    for n in [4, 6] {
        let d = BeamDiscretization::build(&coeff, n, 1.0, 1.0, 2.0).unwrap();
        let omega = d.summary().unwrap().lambda_max_estimate.sqrt();
        // resolve the fastest mode (4h·ω = 0.025) with t_end an exact multiple of 4h
        let h = t_end / (4.0 * (t_end / (4.0 * 0.025 / (4.0 * omega))).ceil());
        let init = InitialData {
            displacement: Profile::single(Shape::X2, 1.0),
            velocity: Profile::zero(),
            compatible: false,
        };
        let (y0, y1) = init.interpolate(&d).unwrap();
        let opts = SimulationOptions {
            snapshot_stride: 0,
            ..Default::default()
        };
        let e: Vec<f64> = [4.0, 2.0, 1.0]
            .iter()
            .map(|m| {
                let tr = simulate(&d, &y0, &y1, m * h, t_end, opts).unwrap().trace;
                assert!((tr.times.last().unwrap() - t_end).abs() < 1e-9);
                tr.final_energy()
            })
            .collect();
        let order = ((e[0] - e[1]) / (e[1] - e[2])).abs().log2();
        ok &= order >= 1.9;
        parts.push(format!("n={n} h={h:.3e}: order {order:.3}"));
    }
    verdict(ok, parts.join(", "))
}

fn ledger_sanity(sweep: &[SimulationReport]) -> Verdict {
    let mut fails = Vec::new();
    let mut min_ratio = f64::INFINITY;
    for r in sweep {
        let c = &r.ledger.constants;
        let t = &r.trace;
        let floor = 1e-14 * t.initial_energy();
        let rate =
            common::fitted_decay_rate(&t.times, &t.energy, 0.5 * t.times.last().unwrap(), floor)
                .expect("enough samples");
        min_ratio = min_ratio.min(rate * c.m);
        let ok = c.delta > 0.0
            && c.delta < c.nu.min(c.eps0 / c.c1)
            && c.c_delta > 0.0
            && c.m > 0.0
            && rate >= 1.0 / c.m;
        if !ok {
            fails.push(key(r));
        }
    }
    verdict(
        fails.is_empty(),
        format!(
            "delta, C_delta, M admissible on {} runs; min fitted_rate * M = {min_ratio:.1}{}",
            sweep.len(),
            if fails.is_empty() {
                String::new()
            } else {
                format!(", failing {fails:?}")
            }
        ),
    )
}

fn main() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let cfg = sweep_config();
    let sweep = run_sweep(&cfg, None).expect("sweep runs");
    println!(
        "sweep: {} runs in {:.1} s",
        sweep.len(),
        start.elapsed().as_secs_f64()
    );

    type Check<'a> = Box<dyn FnOnce(&mut ChaCha8Rng) -> Verdict + 'a>;
    let s = &sweep;
    let checks: Vec<(&str, Check)> = vec![
        (
            "discrete energy identity",
            Box::new(move |_| energy_identity(s)),
        ),
        ("decay certificate", Box::new(move |_| decay_certificate(s))),
        (
            "integral inequality",
            Box::new(move |_| integral_inequality(s)),
        ),
        ("static oracle equivalence", Box::new(static_oracle)),
        ("Gauss-Green residual", Box::new(|_| gauss_green())),
        ("Hardy constant consistency", Box::new(move |r| hardy(s, r))),
        ("trace bounds", Box::new(move |r| trace_bounds(s, r))),
        (
            "multiplier identity convergence",
            Box::new(|_| multiplier_convergence()),
        ),
        ("scheme order", Box::new(|_| scheme_order())),
        (
            "constant ledger sanity",
            Box::new(move |_| ledger_sanity(s)),
        ),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.into_iter().enumerate() {
        let t0 = Instant::now();
        let v = check(&mut rng);
        if !v.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name} ({:.1} s): {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            t0.elapsed().as_secs_f64(),
            v.detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        10 - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
