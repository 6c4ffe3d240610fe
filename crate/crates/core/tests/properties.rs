mod common;

use proptest::prelude::*;

use degbeam::coefficient::{estimate_hardy_constant, DegeneracyCoefficient};
use degbeam::config::RunConfig;
use degbeam::discretization::{BeamDiscretization, DofVector};
use degbeam::dynamics::{energy_derivative_identity_residual, simulate, SimulationOptions};
use degbeam::initial::{InitialData, Profile, Shape};
use degbeam::report::{fmt_f64, get_f64, key_values, parse_key_values};
use degbeam::stability::{compute_constants, evaluate_at, DeltaPolicy, LedgerInput};
use degbeam::statics::{solve_variational, StaticProblem};

fn shape() -> impl Strategy<Value = Shape> {
    prop_oneof![
        Just(Shape::X2),
        Just(Shape::X3),
        Just(Shape::X2OneMinusX2),
        Just(Shape::SinBumpX2),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn static_solve_reproduces_the_cubic(
        alpha in 0.05f64..1.95,
        beta in 0.0f64..4.0,
        gamma in 0.0f64..4.0,
        lambda in -20.0f64..20.0,
        mu in -20.0f64..20.0,
        n in 4usize..40,
    ) {
        let c = DegeneracyCoefficient::power_law(alpha).unwrap();
        let d = BeamDiscretization::build(&c, n, beta, gamma, 2.0).unwrap();
        let z = solve_variational(&d, &StaticProblem::new(lambda, mu, beta, gamma).unwrap()).unwrap();
        let (p, q) = common::static_cubic(lambda, mu, beta, gamma);
        let exact = d.interpolate(|x| p * x * x + q * x.powi(3), |x| 2.0 * p * x + 3.0 * q * x * x).unwrap();
        let err = d.triple_norm_sq(&z.sub(&exact)).sqrt();
        prop_assert!(err <= 1e-10 * (1.0 + d.triple_norm_sq(&exact).sqrt()), "err {err:e}");
    }

    #[test]
    fn energy_never_increases_and_balances(
        alpha in 0.05f64..1.95,
        beta in 0.0f64..3.0,
        gamma in 0.0f64..3.0,
        y0 in shape(),
        y1 in shape(),
        a0 in -2.0f64..2.0,
        a1 in -2.0f64..2.0,
    ) {
        let c = DegeneracyCoefficient::power_law(alpha).unwrap();
        let d = BeamDiscretization::build(&c, 12, beta, gamma, 2.0).unwrap();
        let init = InitialData {
            displacement: Profile::single(y0, a0),
            velocity: Profile::single(y1, a1),
            compatible: false,
        };
        let (u0, u1) = init.interpolate(&d).unwrap();
        let opts = SimulationOptions { snapshot_stride: 0, ..Default::default() };
        let tr = simulate(&d, &u0, &u1, 5e-3, 0.5, opts).unwrap().trace;
        let e0 = tr.initial_energy();
        prop_assert!(tr.energy.windows(2).all(|w| w[1] <= w[0] + 1e-10 * e0));
        prop_assert!(energy_derivative_identity_residual(&tr) <= 1e-10);
    }

    #[test]
    fn traces_are_bounded_by_the_bending_energy(
        alpha in 0.05f64..1.95,
        seed in any::<u64>(),
        n in 4usize..30,
    ) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let c = DegeneracyCoefficient::power_law(alpha).unwrap();
        let d = BeamDiscretization::build(&c, n, 0.0, 0.0, 2.0).unwrap();
        let u = DofVector::from_vec((0..d.n_dof()).map(|_| rng.random_range(-1.0..1.0)).collect());
        let s = d.bending_norm_sq(&u);
        // u(1) = ∫(1 − x)u'' and u'(1) = ∫u'' for clamped u
        prop_assert!(d.trace_value(&u).powi(2) <= s / 3.0 * (1.0 + 1e-9));
        prop_assert!(d.trace_slope(&u).powi(2) <= s * (1.0 + 1e-9));
    }

    #[test]
    fn ledger_is_self_consistent(
        k in 0.05f64..1.95,
        c_hp in 0.1f64..3.0,
        beta in 0.0f64..5.0,
        gamma in 0.0f64..5.0,
    ) {
        let input = LedgerInput::new(k, 1.0, c_hp, beta, gamma);
        let c = compute_constants(&input, DeltaPolicy::Scan).unwrap();
        prop_assert!(c.is_admissible());
        prop_assert!(c.delta > 0.0 && c.delta < c.nu && c.delta * c.c1 < c.eps0);
        prop_assert_eq!(evaluate_at(&input, c.delta).unwrap(), c);
        // Hardy constant enters C₂ increasingly
        let bigger = compute_constants(&LedgerInput::new(k, 1.0, c_hp * 1.5, beta, gamma), DeltaPolicy::Scan).unwrap();
        prop_assert!(bigger.m > c.m);
    }

    #[test]
    fn floats_survive_the_text_format(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        let text = key_values([("x", fmt_f64(x))]);
        let map = parse_key_values(&text).unwrap();
        prop_assert_eq!(get_f64(&map, "x").unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn config_roundtrips_through_toml(
        alpha in 0.05f64..1.95,
        beta in 0.0f64..10.0,
        stride in 1usize..50,
    ) {
        let mut cfg = RunConfig::with_alpha(alpha);
        cfg.beta = beta;
        cfg.time.snapshot_stride = stride;
        let back = RunConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn polynomial_quotients_stay_below_the_hardy_constant(
        alpha in 0.1f64..1.9,
        coef in prop::collection::vec(-1.0f64..1.0, 3),
        pows in prop::collection::vec(1.0f64..4.0, 3),
    ) {
        let c = DegeneracyCoefficient::power_law(alpha).unwrap();
        let c_hp = estimate_hardy_constant(&c, 256).unwrap().c_hp;
        let u = |x: f64| coef.iter().zip(&pows).map(|(a, p)| a * x.powf(*p)).sum::<f64>();
        let du = |x: f64| coef.iter().zip(&pows).map(|(a, p)| a * p * x.powf(p - 1.0)).sum::<f64>();
        let den = common::integrate(|x| du(x).powi(2), 0.0, 1.0, 1e-13);
        prop_assume!(den > 1e-8);
        let q = common::integrate(|x| u(x).powi(2) / x.powf(alpha), 0.0, 1.0, 1e-13) / den;
        prop_assert!(q <= c_hp * (1.0 + 1e-3), "q {q} c_hp {c_hp}");
        // and the discrete estimate sits just below the series value
        let exact = common::hardy_power_law(alpha);
        prop_assert!(c_hp <= exact * (1.0 + 1e-9) && c_hp >= exact * (1.0 - 1e-3));
    }
}
