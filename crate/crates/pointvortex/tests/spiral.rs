use num_complex::Complex64;
use pointvortex::{
    angular_rate, expansion_time, kr_rhs, spiral_position, spiral_velocity, synthesize_config,
    MassTriple, Orientation, SideLengths,
};
use std::f64::consts::PI;

fn canonical() -> pointvortex::SpiralConfig {
    synthesize_config(&MassTriple::new(1.0, 1.0, -0.5), 1.0, Orientation::Positive).unwrap()
}

#[test]
fn canonical_synthesis_matches_closed_formulas() {
    let cfg = canonical();
    assert!((cfg.l0.l12 - 2.0f64.sqrt()).abs() < 1e-15);
    assert!((cfg.l0.l23 - 3.0f64.sqrt()).abs() < 1e-15);
    assert!((cfg.l0.l13 - 1.0).abs() < 1e-15);
    assert!((cfg.area0() - 2.0f64.sqrt() / 2.0).abs() < 1e-14);
    assert!((cfg.tau - 3.0 * 2.0f64.sqrt() * PI).abs() < 1e-12, "tau {}", cfg.tau);
    assert!(
        (cfg.lambda_rate - 5.0 / (12.0 * PI)).abs() < 1e-15,
        "lambda {}",
        cfg.lambda_rate
    );
}

#[test]
fn synthesized_positions_realize_the_side_lengths() {
    let cfg = canonical();
    let d = |a: Complex64, b: Complex64| (a - b).norm();
    assert!((d(cfg.z0[0], cfg.z0[1]) - cfg.l0.l12).abs() < 1e-12 * cfg.l0.l12);
    assert!((d(cfg.z0[1], cfg.z0[2]) - cfg.l0.l23).abs() < 1e-12 * cfg.l0.l23);
    assert!((d(cfg.z0[0], cfg.z0[2]) - cfg.l0.l13).abs() < 1e-12 * cfg.l0.l13);
    // Circulation-weighted center sits at the origin.
    let m = cfg.masses;
    let c = m.m1 * cfg.z0[0] + m.m2 * cfg.z0[1] + m.m3 * cfg.z0[2];
    assert!(c.norm() < 1e-14);
}

#[test]
fn length_scaling_laws() {
    let m = MassTriple::new(1.0, 1.0, -0.5);
    let base = synthesize_config(&m, 1.0, Orientation::Positive).unwrap();
    for s in [0.5, 2.0, 7.0] {
        let scaled = synthesize_config(&m, s, Orientation::Positive).unwrap();
        assert!((scaled.tau - base.tau * s * s).abs() < 1e-10 * scaled.tau);
        assert!(
            (scaled.lambda_rate - base.lambda_rate / (s * s)).abs()
                < 1e-10 * scaled.lambda_rate
        );
    }
}

#[test]
fn expansion_rate_is_linear_in_m3() {
    // The closed 1/tau formula, evaluated directly on a fixed geometry.
    let sides = SideLengths::new(2.0f64.sqrt(), 3.0f64.sqrt(), 1.0);
    let area = 2.0f64.sqrt() / 2.0;
    let at = |m3: f64| 1.0 / expansion_time(&MassTriple::new(1.0, 1.0, m3), &sides, area);
    let r1 = at(-0.5);
    let r2 = at(-0.25);
    let r3 = at(-1e-9);
    assert!((r2 / r1 - 0.5).abs() < 1e-12);
    assert!(r3.abs() < 1e-8 * r1.abs());
}

#[test]
fn negative_orientation_is_rejected_as_collapse() {
    let err = synthesize_config(&MassTriple::new(1.0, 1.0, -0.5), 1.0, Orientation::Negative)
        .unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("collaps") || msg.contains("tau"), "{msg}");
}

#[test]
fn spiral_position_identity_at_t0() {
    let cfg = canonical();
    for j in 0..3 {
        let z = spiral_position(&cfg, j, 0.0);
        assert_eq!(z, cfg.z0[j]);
    }
}

#[test]
fn spiral_modulus_grows_like_sqrt() {
    let cfg = canonical();
    for j in 0..3 {
        for t in [0.3, 1.0, 13.0, 400.0] {
            let ratio = spiral_position(&cfg, j, t).norm() / cfg.z0[j].norm();
            let expect = (1.0 + t / cfg.tau).sqrt();
            assert!((ratio - expect).abs() < 1e-13 * expect);
        }
    }
}

#[test]
fn pairwise_distances_follow_the_same_sqrt_law() {
    let cfg = canonical();
    for t in [0.0, 0.7, 5.0, 90.0] {
        let s = (1.0 + t / cfg.tau).sqrt();
        let z: Vec<Complex64> = (0..3).map(|j| spiral_position(&cfg, j, t)).collect();
        assert!(((z[0] - z[1]).norm() - cfg.l0.l12 * s).abs() < 1e-12 * s);
        assert!(((z[1] - z[2]).norm() - cfg.l0.l23 * s).abs() < 1e-12 * s);
        assert!(((z[0] - z[2]).norm() - cfg.l0.l13 * s).abs() < 1e-12 * s);
    }
}

#[test]
fn spiral_is_a_solution_of_the_vortex_system() {
    // Defining property: the analytic time derivative of the closed form
    // equals the interaction velocity field, at t = 0 and later.
    let cfg = canonical();
    for t in [0.0, 7.3, 52.0] {
        let z = [
            spiral_position(&cfg, 0, t),
            spiral_position(&cfg, 1, t),
            spiral_position(&cfg, 2, t),
        ];
        let v = kr_rhs(&cfg.masses, &z).unwrap();
        for j in 0..3 {
            let vd = spiral_velocity(&cfg, j, t);
            assert!(
                (v[j] - vd).norm() <= 1e-12 * vd.norm(),
                "t={t} j={j}: {} vs {}",
                v[j],
                vd
            );
        }
    }
}

#[test]
fn velocity_at_t0_matches_the_derivative_formula() {
    let cfg = canonical();
    let lam_tau = cfg.lambda_rate * cfg.tau;
    for j in 0..3 {
        let expect = cfg.z0[j] * Complex64::new(0.5, lam_tau) / cfg.tau;
        let got = spiral_velocity(&cfg, j, 0.0);
        assert!((got - expect).norm() < 1e-15 * expect.norm());
    }
}

#[test]
fn kr_rhs_elementary_cases() {
    // Lone vortex: the other two have zero mass, so it does not move.
    let m = MassTriple::new(0.0, 0.0, 1.0);
    let z = [
        Complex64::new(5.0, 0.0),
        Complex64::new(0.0, 5.0),
        Complex64::new(0.0, 0.0),
    ];
    let v = kr_rhs(&m, &z).unwrap();
    assert_eq!(v[2], Complex64::new(0.0, 0.0));

    // Equal pair at +-d/2: speeds m/(2 pi d), opposite, perpendicular to
    // the separation axis.
    let strength = 1.7;
    let d = 2.3;
    let m = MassTriple::new(strength, strength, 0.0);
    let z = [
        Complex64::new(d / 2.0, 0.0),
        Complex64::new(-d / 2.0, 0.0),
        Complex64::new(100.0, 100.0),
    ];
    let v = kr_rhs(&m, &z).unwrap();
    let speed = strength / (2.0 * PI * d);
    assert!((v[0].norm() - speed).abs() < 1e-14 * speed);
    assert!((v[0] + v[1]).norm() < 1e-14 * speed);
    assert!(v[0].re.abs() < 1e-16, "velocity must be perpendicular");
}

#[test]
fn coincident_positions_are_an_error() {
    let m = MassTriple::new(1.0, 1.0, -0.5);
    let z = [
        Complex64::new(1.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
    ];
    assert!(kr_rhs(&m, &z).is_err());
}

#[test]
fn angular_rate_formula_canonical_value() {
    let sides = SideLengths::new(2.0f64.sqrt(), 3.0f64.sqrt(), 1.0);
    let lam = angular_rate(&MassTriple::new(1.0, 1.0, -0.5), &sides);
    assert!((lam - 5.0 / (12.0 * PI)).abs() < 1e-15);
}
