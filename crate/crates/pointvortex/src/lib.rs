//! Three-vortex configurations whose mutual interaction drives an exactly
//! self-similar expanding spiral, plus the point-vortex dynamics needed to
//! verify them.
//!
//! A configuration is admissible when the circulations satisfy the sign and
//! harmonic-mean conditions and the triangle of initial positions satisfies
//! the angular-momentum identity. Under those constraints the whole triangle
//! evolves as
//!
//! ```text
//! z_j(t) = z_j(0) (1 + t/tau)^(1/2 + i lambda tau)
//! ```
//!
//! so every pairwise distance grows like sqrt(1 + t/tau) while the triangle
//! rotates at the decaying rate lambda tau / (tau + t).

use num_complex::Complex64;
use numerics::ode::{integrate, OdeError, OdeOptions};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Positive,
    Negative,
}

/// Circulations of the three vortices. Plain data; admissibility is checked
/// by [`check_constraints`] and enforced where configurations are built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassTriple {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
}

impl MassTriple {
    pub fn new(m1: f64, m2: f64, m3: f64) -> Self {
        MassTriple { m1, m2, m3 }
    }

    /// The unique third circulation making the triple harmonic,
    /// m3 = -m1 m2 / (m1 + m2).
    pub fn closing(m1: f64, m2: f64) -> Self {
        MassTriple {
            m1,
            m2,
            m3: -m1 * m2 / (m1 + m2),
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.m1, self.m2, self.m3]
    }

    pub fn total(&self) -> f64 {
        self.m1 + self.m2 + self.m3
    }
}

/// The three side lengths of the vortex triangle at t = 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideLengths {
    pub l12: f64,
    pub l23: f64,
    pub l13: f64,
}

impl SideLengths {
    pub fn new(l12: f64, l23: f64, l13: f64) -> Self {
        SideLengths { l12, l23, l13 }
    }

    /// Distance between vortices `i` and `j` (zero-based, i != j).
    pub fn between(&self, i: usize, j: usize) -> f64 {
        match (i.min(j), i.max(j)) {
            (0, 1) => self.l12,
            (1, 2) => self.l23,
            (0, 2) => self.l13,
            _ => panic!("invalid vortex pair ({i}, {j})"),
        }
    }

    pub fn min(&self) -> f64 {
        self.l12.min(self.l23).min(self.l13)
    }
}

#[derive(Debug, Clone)]
pub struct ConstraintCheck {
    pub name: &'static str,
    /// Signed residual; positive margins pass for inequality constraints,
    /// identities pass when the residual is small against `scale`.
    pub residual: f64,
    pub scale: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct ConstraintReport {
    pub checks: Vec<ConstraintCheck>,
}

impl ConstraintReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&ConstraintCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn first_failure(&self) -> Option<&ConstraintCheck> {
        self.checks.iter().find(|c| !c.pass)
    }
}

#[derive(Debug, Clone)]
pub enum PointVortexError {
    NonFinite,
    Constraint { name: String, residual: f64 },
    /// tau came out non-positive: the configuration contracts instead of
    /// expanding (mirrored triangles collapse in finite time).
    Collapse { tau: f64 },
    Coincident { i: usize, j: usize },
    Collision { t: f64, i: usize, j: usize, dist: f64 },
    Integration(OdeError),
}

impl std::fmt::Display for PointVortexError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PointVortexError::NonFinite => write!(f, "non-finite input"),
            PointVortexError::Constraint { name, residual } => {
                write!(f, "constraint {name} violated (residual {residual:e})")
            }
            PointVortexError::Collapse { tau } => {
                write!(f, "configuration collapses: tau = {tau} is not positive")
            }
            PointVortexError::Coincident { i, j } => {
                write!(f, "vortices {i} and {j} coincide")
            }
            PointVortexError::Collision { t, i, j, dist } => write!(
                f,
                "collision floor tripped at t = {t}: |z{i} - z{j}| = {dist:e}"
            ),
            PointVortexError::Integration(e) => write!(f, "integration failed: {e}"),
        }
    }
}

impl std::error::Error for PointVortexError {}

impl From<OdeError> for PointVortexError {
    fn from(e: OdeError) -> Self {
        PointVortexError::Integration(e)
    }
}

/// Check the four admissibility constraints and report signed residuals.
pub fn check_constraints(
    masses: &MassTriple,
    l0: &SideLengths,
) -> Result<ConstraintReport, PointVortexError> {
    let ms = masses.as_array();
    let ls = [l0.l12, l0.l23, l0.l13];
    if ms.iter().any(|v| !v.is_finite()) || ls.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(PointVortexError::NonFinite);
    }
    let MassTriple { m1, m2, m3 } = *masses;

    // Sign pattern: m1, m2 > 0 > m3 and positive total circulation.
    let signs = m1.min(m2).min(-m3).min(m1 + m2 + m3);
    // Harmonic identity m1 m2 + m2 m3 + m1 m3 = 0, relative to term size.
    let hm = m1 * m2 + m2 * m3 + m1 * m3;
    let hm_scale = (m1 * m2).abs() + (m2 * m3).abs() + (m1 * m3).abs();
    // Angular momentum identity on the squared side lengths.
    let am = m1 * m2 * l0.l12 * l0.l12 + m2 * m3 * l0.l23 * l0.l23 + m1 * m3 * l0.l13 * l0.l13;
    let am_scale = (m1 * m2 * l0.l12 * l0.l12).abs()
        + (m2 * m3 * l0.l23 * l0.l23).abs()
        + (m1 * m3 * l0.l13 * l0.l13).abs();
    // Strict ordering l23 > l12 > l13; equality (equilateral included) fails.
    let ordering = (l0.l23 - l0.l12).min(l0.l12 - l0.l13);

    let checks = vec![
        ConstraintCheck {
            name: "mass-signs",
            residual: signs,
            scale: m1.abs().max(m2.abs()).max(m3.abs()),
            pass: signs > 0.0,
        },
        ConstraintCheck {
            name: "harmonic-mean",
            residual: hm,
            scale: hm_scale,
            pass: hm.abs() <= 1e-12 * hm_scale,
        },
        ConstraintCheck {
            name: "angular-momentum",
            residual: am,
            scale: am_scale,
            pass: am.abs() <= 1e-12 * am_scale,
        },
        ConstraintCheck {
            name: "length-ordering",
            residual: ordering,
            scale: l0.l23,
            pass: ordering > 0.0,
        },
    ];
    Ok(ConstraintReport { checks })
}

/// An admissible configuration together with its spiral parameters.
#[derive(Debug, Clone)]
pub struct SpiralConfig {
    pub masses: MassTriple,
    pub z0: [Complex64; 3],
    pub l0: SideLengths,
    /// theta_ji = arg(z0_j - z0_i) for (j, i) = (2,1), (3,2), (3,1),
    /// one-based as in `theta(j, i)`.
    pub theta: [f64; 3],
    pub tau: f64,
    pub lambda_rate: f64,
    pub orientation: Orientation,
}

impl SpiralConfig {
    /// Build a configuration from explicit side lengths. The lengths must
    /// satisfy all four admissibility constraints; within those there is a
    /// one-parameter family of shapes per mass triple, and this constructor
    /// accepts any member that forms a genuine triangle.
    pub fn from_sides(
        masses: &MassTriple,
        l0: &SideLengths,
        orientation: Orientation,
    ) -> Result<Self, PointVortexError> {
        let report = check_constraints(masses, l0)?;
        if let Some(fail) = report.first_failure() {
            return Err(PointVortexError::Constraint {
                name: fail.name.to_string(),
                residual: fail.residual,
            });
        }
        // Vertex 3 from the two circle constraints around vertices 1, 2.
        let x3 = (l0.l12 * l0.l12 + l0.l13 * l0.l13 - l0.l23 * l0.l23) / (2.0 * l0.l12);
        let y3_sq = l0.l13 * l0.l13 - x3 * x3;
        if y3_sq <= 0.0 {
            return Err(PointVortexError::Constraint {
                name: "triangle-inequality".to_string(),
                residual: y3_sq,
            });
        }
        let y3 = match orientation {
            Orientation::Positive => y3_sq.sqrt(),
            Orientation::Negative => -y3_sq.sqrt(),
        };
        let mut z0 = [
            Complex64::new(0.0, 0.0),
            Complex64::new(l0.l12, 0.0),
            Complex64::new(x3, y3),
        ];
        // Center the circulation-weighted mean: the flow preserves it, and
        // the spiral closed form rotates about the origin.
        let center = (masses.m1 * z0[0] + masses.m2 * z0[1] + masses.m3 * z0[2])
            / masses.total();
        for z in &mut z0 {
            *z -= center;
        }

        let area = signed_area(&z0);
        let tau = expansion_time(masses, l0, area);
        if !(tau > 0.0) {
            return Err(PointVortexError::Collapse { tau });
        }
        let lambda_rate = angular_rate(masses, l0);
        let theta = [
            (z0[1] - z0[0]).arg(),
            (z0[2] - z0[1]).arg(),
            (z0[2] - z0[0]).arg(),
        ];
        Ok(SpiralConfig {
            masses: *masses,
            z0,
            l0: *l0,
            theta,
            tau,
            lambda_rate,
            orientation,
        })
    }

    /// theta_ji for one-based indices; flipping the pair shifts by pi.
    pub fn theta(&self, j: usize, i: usize) -> f64 {
        match (j, i) {
            (2, 1) => self.theta[0],
            (3, 2) => self.theta[1],
            (3, 1) => self.theta[2],
            (1, 2) => self.theta[0] + PI,
            (2, 3) => self.theta[1] + PI,
            (1, 3) => self.theta[2] + PI,
            _ => panic!("invalid vortex pair ({j}, {i})"),
        }
    }

    /// Signed area of the initial triangle; positive for positive orientation.
    pub fn area0(&self) -> f64 {
        signed_area(&self.z0)
    }
}

fn signed_area(z: &[Complex64; 3]) -> f64 {
    0.5 * ((z[1] - z[0]).conj() * (z[2] - z[0])).im
}

/// The expansion time constant: 1/tau = (2/pi) m3 (A / L12^2) (1/L23^2 - 1/L13^2)
/// with A the signed area, so mirrored triangles yield negative tau.
pub fn expansion_time(masses: &MassTriple, l0: &SideLengths, area: f64) -> f64 {
    let x = l0.l12 * l0.l12;
    let y = l0.l23 * l0.l23;
    let c = l0.l13 * l0.l13;
    let inv_tau = (2.0 / PI) * masses.m3 * (area / x) * (1.0 / y - 1.0 / c);
    1.0 / inv_tau
}

/// The angular rate of the spiral.
pub fn angular_rate(masses: &MassTriple, l0: &SideLengths) -> f64 {
    let MassTriple { m1, m2, .. } = *masses;
    let pi_ratio = (m1 / m2) * (l0.l13 * l0.l13) / (l0.l23 * l0.l23);
    let num = (m1 + m2).powi(3) + m1.powi(3) * (1.0 + 1.0 / pi_ratio) + m2.powi(3) * (1.0 + pi_ratio);
    num / (4.0 * PI * (m1 + m2).powi(2) * l0.l12 * l0.l12)
}

/// Build the spiral configuration with the given smallest side L13.
///
/// The admissibility constraints leave a one-parameter family of triangle
/// shapes for each mass triple; this picks the member with a right angle at
/// vortex 1, L12^2 = L13^2 (m1 + m2)/m1 and L23^2 = L12^2 + L13^2, which
/// always exists, always satisfies the ordering strictly, and keeps the
/// area formula A(0) = L12 L13 / 2 exact.
pub fn synthesize_config(
    masses: &MassTriple,
    l13: f64,
    orientation: Orientation,
) -> Result<SpiralConfig, PointVortexError> {
    if !l13.is_finite() || l13 <= 0.0 {
        return Err(PointVortexError::NonFinite);
    }
    let c = l13 * l13;
    let x = c * (masses.m1 + masses.m2) / masses.m1;
    let l0 = SideLengths::new(x.sqrt(), (x + c).sqrt(), l13);
    SpiralConfig::from_sides(masses, &l0, orientation)
}

/// Closed-form position of vortex `j` (zero-based) at time `t >= 0`.
pub fn spiral_position(cfg: &SpiralConfig, j: usize, t: f64) -> Complex64 {
    debug_assert!(t >= 0.0 && t.is_finite());
    let s = 1.0 + t / cfg.tau;
    cfg.z0[j] * Complex64::from_polar(s.sqrt(), cfg.lambda_rate * cfg.tau * s.ln())
}

/// Analytic time derivative of [`spiral_position`].
pub fn spiral_velocity(cfg: &SpiralConfig, j: usize, t: f64) -> Complex64 {
    let s = 1.0 + t / cfg.tau;
    spiral_position(cfg, j, t) * Complex64::new(0.5, cfg.lambda_rate * cfg.tau) / (cfg.tau * s)
}

/// Interaction velocities: conj(dz_j/dt) = sum_{l != j} m_l / (2 pi i (z_j - z_l)).
pub fn kr_rhs(
    masses: &MassTriple,
    z: &[Complex64; 3],
) -> Result<[Complex64; 3], PointVortexError> {
    let m = masses.as_array();
    if z.iter().any(|v| !v.re.is_finite() || !v.im.is_finite())
        || m.iter().any(|v| !v.is_finite())
    {
        return Err(PointVortexError::NonFinite);
    }
    for i in 0..3 {
        for j in i + 1..3 {
            if z[i] == z[j] {
                return Err(PointVortexError::Coincident { i, j });
            }
        }
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for j in 0..3 {
        let mut s = Complex64::new(0.0, 0.0);
        for l in 0..3 {
            if l != j && m[l] != 0.0 {
                s += m[l] / (two_pi_i * (z[j] - z[l]));
            }
        }
        out[j] = s.conj();
    }
    Ok(out)
}

/// An integrated trajectory sampled at the accepted step endpoints.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub positions: Vec<[Complex64; 3]>,
    pub steps: usize,
    pub rejected: usize,
    pub max_local_error: f64,
    /// max_t |sum_j m_j z_j(t) - sum_j m_j z_j(0)|
    pub center_drift: f64,
    /// max_t |sum_j m_j |z_j(t)|^2 - sum_j m_j |z_j(0)|^2|
    pub impulse_drift: f64,
}

/// Integrate the three-vortex system from arbitrary initial positions.
/// Aborts with a collision error when any pairwise distance falls below
/// `collision_floor`.
pub fn integrate_masses(
    masses: &MassTriple,
    z0: [Complex64; 3],
    horizon: f64,
    tol: f64,
    collision_floor: f64,
) -> Result<Trajectory, PointVortexError> {
    assert!(tol > 0.0 && horizon.is_finite() && horizon > 0.0);
    let m = masses.as_array();
    let y0 = [
        z0[0].re, z0[0].im, z0[1].re, z0[1].im, z0[2].re, z0[2].im,
    ];
    let center0 = m[0] * z0[0] + m[1] * z0[1] + m[2] * z0[2];
    let impulse0 = m[0] * z0[0].norm_sqr() + m[1] * z0[1].norm_sqr() + m[2] * z0[2].norm_sqr();

    let rhs = move |_t: f64, y: &[f64], dy: &mut [f64]| {
        let z = [
            Complex64::new(y[0], y[1]),
            Complex64::new(y[2], y[3]),
            Complex64::new(y[4], y[5]),
        ];
        // A coincidence inside a trial step produces non-finite derivatives,
        // which the integrator reports; the floor check below catches near
        // misses on accepted steps.
        match kr_rhs_unchecked(&m, &z) {
            Some(v) => {
                for j in 0..3 {
                    dy[2 * j] = v[j].re;
                    dy[2 * j + 1] = v[j].im;
                }
            }
            None => dy.fill(f64::NAN),
        }
    };

    let mut times = vec![0.0];
    let mut positions = vec![z0];
    let mut center_drift: f64 = 0.0;
    let mut impulse_drift: f64 = 0.0;
    let mut collision: Option<(f64, usize, usize, f64)> = None;

    let opts = OdeOptions::with_tol(tol);
    let result = integrate(rhs, 0.0, &y0, horizon, &opts, |step| {
        let z = [
            Complex64::new(step.y1[0], step.y1[1]),
            Complex64::new(step.y1[2], step.y1[3]),
            Complex64::new(step.y1[4], step.y1[5]),
        ];
        times.push(step.t1);
        positions.push(z);
        let center = m[0] * z[0] + m[1] * z[1] + m[2] * z[2];
        let impulse = m[0] * z[0].norm_sqr() + m[1] * z[1].norm_sqr() + m[2] * z[2].norm_sqr();
        center_drift = center_drift.max((center - center0).norm());
        impulse_drift = impulse_drift.max((impulse - impulse0).abs());
        for i in 0..3 {
            for j in i + 1..3 {
                let d = (z[i] - z[j]).norm();
                if d < collision_floor {
                    collision = Some((step.t1, i, j, d));
                    return false;
                }
            }
        }
        true
    });

    if let Some((t, i, j, dist)) = collision {
        return Err(PointVortexError::Collision { t, i, j, dist });
    }
    let res = result?;
    Ok(Trajectory {
        times,
        positions,
        steps: res.steps,
        rejected: res.rejected,
        max_local_error: res.max_local_error,
        center_drift,
        impulse_drift,
    })
}

/// Integrate an admissible spiral configuration. The collision floor is
/// 1e-6 of the smallest initial side, a safety net only: admissible
/// configurations separate.
pub fn integrate_kr(
    cfg: &SpiralConfig,
    horizon: f64,
    tol: f64,
) -> Result<Trajectory, PointVortexError> {
    integrate_masses(&cfg.masses, cfg.z0, horizon, tol, 1e-6 * cfg.l0.min())
}

fn kr_rhs_unchecked(m: &[f64; 3], z: &[Complex64; 3]) -> Option<[Complex64; 3]> {
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for j in 0..3 {
        let mut s = Complex64::new(0.0, 0.0);
        for l in 0..3 {
            if l != j && m[l] != 0.0 {
                let dz = z[j] - z[l];
                if dz.norm_sqr() == 0.0 {
                    return None;
                }
                s += m[l] / (two_pi_i * dz);
            }
        }
        out[j] = s.conj();
    }
    Some(out)
}
