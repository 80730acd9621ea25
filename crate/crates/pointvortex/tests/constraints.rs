use pointvortex::{check_constraints, MassTriple, SideLengths};

fn canonical_masses() -> MassTriple {
    MassTriple::new(1.0, 1.0, -0.5)
}

fn canonical_sides() -> SideLengths {
    SideLengths::new(2.0f64.sqrt(), 3.0f64.sqrt(), 1.0)
}

#[test]
fn canonical_masses_pass_all_mass_constraints() {
    let rep = check_constraints(&canonical_masses(), &canonical_sides()).unwrap();
    assert!(rep.all_pass(), "{rep:?}");
    // m1 m2 + m2 m3 + m1 m3 = 1 - 1/2 - 1/2 is exactly zero in binary.
    let hm = rep.check("harmonic-mean").unwrap();
    assert_eq!(hm.residual, 0.0);
    assert!(hm.pass);
}

#[test]
fn equal_positive_masses_fail() {
    let rep = check_constraints(
        &MassTriple::new(1.0, 1.0, 1.0),
        &canonical_sides(),
    )
    .unwrap();
    assert!(!rep.all_pass());
    let hm = rep.check("harmonic-mean").unwrap();
    assert_eq!(hm.residual, 3.0);
    assert!(!hm.pass);
    // The sign pattern is also violated: m3 must be negative.
    assert!(!rep.check("mass-signs").unwrap().pass);
}

#[test]
fn canonical_lengths_pass_angular_momentum_and_ordering() {
    let rep = check_constraints(&canonical_masses(), &canonical_sides()).unwrap();
    let am = rep.check("angular-momentum").unwrap();
    // 1*1*2 + 1*(-1/2)*3 + 1*(-1/2)*1 = 0; squaring sqrt(2) and sqrt(3)
    // leaves one ulp of noise.
    assert!(am.residual.abs() < 1e-15 * am.scale);
    assert!(am.pass);
    assert!(rep.check("length-ordering").unwrap().pass);
}

#[test]
fn equilateral_triangle_fails_ordering() {
    let rep = check_constraints(&canonical_masses(), &SideLengths::new(1.0, 1.0, 1.0)).unwrap();
    let ord = rep.check("length-ordering").unwrap();
    assert!(!ord.pass);
    assert_eq!(ord.residual, 0.0);
}

#[test]
fn wrong_ordering_fails_with_negative_residual() {
    // l13 > l12 breaks the required chain l23 > l12 > l13.
    let rep = check_constraints(&canonical_masses(), &SideLengths::new(1.0, 3.0, 2.0)).unwrap();
    let ord = rep.check("length-ordering").unwrap();
    assert!(!ord.pass);
    assert!(ord.residual < 0.0);
}

#[test]
fn non_finite_inputs_rejected() {
    assert!(check_constraints(
        &MassTriple::new(f64::NAN, 1.0, -0.5),
        &canonical_sides()
    )
    .is_err());
    assert!(check_constraints(
        &canonical_masses(),
        &SideLengths::new(f64::INFINITY, 1.0, 1.0)
    )
    .is_err());
    assert!(check_constraints(&canonical_masses(), &SideLengths::new(-1.0, 1.0, 1.0)).is_err());
}

#[test]
fn closing_mass_satisfies_harmonic_mean_for_any_pair() {
    for (m1, m2) in [(1.0, 1.0), (2.0, 1.0), (0.3, 1.7), (5.0, 0.25)] {
        let m = MassTriple::closing(m1, m2);
        assert!(m.m3 < 0.0);
        let res = m.m1 * m.m2 + m.m2 * m.m3 + m.m1 * m.m3;
        let scale = (m.m1 * m.m2).abs() + (m.m2 * m.m3).abs() + (m.m1 * m.m3).abs();
        assert!(res.abs() <= 1e-15 * scale);
        assert!(m.m1 + m.m2 + m.m3 > 0.0);
    }
}
