//! First-order dynamics of perturbations about the self-similar spiral.
//!
//! Writing z_j(t) = z*_j(t) + zeta_j(t) and dropping quadratic terms leaves
//! a linear system dzeta/dt = A(t) zeta / (2 pi (1 + t/tau)). The entries of
//! A are sines and cosines of the doubled separation angles, which rotate
//! logarithmically in time, so A is bounded but never settles. Its weighted
//! antiderivative B(t) does stay bounded for all time, and that makes the
//! closed form e^{-B(t)} zeta_0 a candidate solution. The exchange of
//! exponential and derivative behind that form needs B'(t) and B(t) to
//! commute, which has not been established, so this module keeps both
//! routes: the closed form, and direct integration of the linear system.
//! [`LinearizedSystem::propagate`] evaluates the two side by side and
//! reports their gap instead of assuming it away.

use nalgebra::{Matrix6, Vector6};
use numerics::ode::{integrate, OdeOptions};
use pointvortex::SpiralConfig;
use std::f64::consts::PI;

// Pair index for distinct vortices (j, i), zero-based:
// (0,1) -> 0, (1,2) -> 1, (0,2) -> 2. Symmetric: the doubled angle loses
// the sign flip of swapping the pair.
const PAIR: [[usize; 3]; 3] = [
    [usize::MAX, 0, 2],
    [0, usize::MAX, 1],
    [2, 1, usize::MAX],
];

/// Sine and cosine of the doubled separation angles, each divided by the
/// squared initial side length. Pair order (1,2), (2,3), (1,3).
#[derive(Debug, Clone, Copy)]
pub struct TrigCoefficients {
    pub s: [f64; 3],
    pub c: [f64; 3],
}

/// Both propagation routes for the same initial perturbation, with their gap.
///
/// `route_b` integrates the linear system directly and is the reference;
/// `route_a` applies e^{-B(t)}, exact only up to commutator terms.
#[derive(Debug, Clone)]
pub struct PropagationResult {
    pub route_a: Vector6<f64>,
    pub route_b: Vector6<f64>,
    pub discrepancy: f64,
}

/// The linearization of the three-vortex system about one spiral solution.
pub struct LinearizedSystem<'a> {
    config: &'a SpiralConfig,
    /// Doubled initial angles 2 theta_ji per pair.
    phase0: [f64; 3],
    /// 1 / L_ji(0)^2 per pair.
    inv_l2: [f64; 3],
}

impl<'a> LinearizedSystem<'a> {
    pub fn new(config: &'a SpiralConfig) -> Self {
        let ls = [config.l0.l12, config.l0.l23, config.l0.l13];
        let mut phase0 = [0.0; 3];
        let mut inv_l2 = [0.0; 3];
        for k in 0..3 {
            phase0[k] = 2.0 * config.theta[k];
            inv_l2[k] = 1.0 / (ls[k] * ls[k]);
        }
        LinearizedSystem {
            config,
            phase0,
            inv_l2,
        }
    }

    /// The rotation accumulated by every doubled separation angle up to t.
    fn swirl(&self, t: f64) -> f64 {
        let cfg = self.config;
        2.0 * cfg.lambda_rate * cfg.tau * (1.0 + t / cfg.tau).ln()
    }

    pub fn trig_coefficients(&self, t: f64) -> TrigCoefficients {
        let sw = self.swirl(t);
        let mut s = [0.0; 3];
        let mut c = [0.0; 3];
        for k in 0..3 {
            let phi = self.phase0[k] + sw;
            s[k] = phi.sin() * self.inv_l2[k];
            c[k] = phi.cos() * self.inv_l2[k];
        }
        TrigCoefficients { s, c }
    }

    /// Per-pair integrals of the trig coefficients against the weight
    /// ds / (2 pi (1 + s/tau)), in closed form. Both vanish at t = 0.
    fn integral_atoms(&self, t: f64) -> ([f64; 3], [f64; 3]) {
        let sw = self.swirl(t);
        let lam = self.config.lambda_rate;
        let mut is = [0.0; 3];
        let mut ic = [0.0; 3];
        for k in 0..3 {
            let phi0 = self.phase0[k];
            let phi = phi0 + sw;
            let w = self.inv_l2[k] / (4.0 * PI * lam);
            is[k] = (phi0.cos() - phi.cos()) * w;
            ic[k] = (phi.sin() - phi0.sin()) * w;
        }
        (is, ic)
    }

    /// The coefficient matrix of the linearized system at time t, acting on
    /// the stacked coordinates (Re zeta_1, Im zeta_1, ..., Im zeta_3).
    pub fn matrix_a(&self, t: f64) -> Matrix6<f64> {
        let tc = self.trig_coefficients(t);
        assemble(&self.config.masses.as_array(), &tc.s, &tc.c)
    }

    /// B(t) = -int_0^t A(s) / (2 pi (1 + s/tau)) ds, in closed form. Its
    /// entries are bounded uniformly in t because the integrals of the
    /// oscillating coefficients are.
    pub fn matrix_b(&self, t: f64) -> Matrix6<f64> {
        let (is, ic) = self.integral_atoms(t);
        -assemble(&self.config.masses.as_array(), &is, &ic)
    }

    /// (e^{+B(t)}, e^{-B(t)}).
    pub fn exp_pm_b(&self, t: f64) -> (Matrix6<f64>, Matrix6<f64>) {
        let b = self.matrix_b(t);
        (expm6(&b), expm6(&(-b)))
    }

    /// Propagate an initial perturbation to time t by both routes.
    ///
    /// Route B integrates dzeta/dt = A zeta / (2 pi (1 + t/tau)) adaptively
    /// at tolerance 1e-12 and is what downstream checks should trust.
    pub fn propagate(&self, zeta0: &Vector6<f64>, t: f64) -> PropagationResult {
        assert!(t >= 0.0 && t.is_finite());
        if t == 0.0 {
            return PropagationResult {
                route_a: *zeta0,
                route_b: *zeta0,
                discrepancy: 0.0,
            };
        }
        let route_a = self.exp_pm_b(t).1 * zeta0;

        let tau = self.config.tau;
        let rhs = |s: f64, y: &[f64], dy: &mut [f64]| {
            let v = Vector6::from_column_slice(y);
            let out = self.matrix_a(s) * v / (2.0 * PI * (1.0 + s / tau));
            dy.copy_from_slice(out.as_slice());
        };
        let opts = OdeOptions::with_tol(1e-12);
        let res = integrate(rhs, 0.0, zeta0.as_slice(), t, &opts, |_| true)
            .expect("the linear system has no singularities in t >= 0");
        let route_b = Vector6::from_column_slice(&res.y);
        PropagationResult {
            discrepancy: (route_a - route_b).norm(),
            route_a,
            route_b,
        }
    }
}

/// Shared 6x6 assembly for A and B. Row pair (2j, 2j+1) receives, for each
/// i != j with per-pair weights s = sv[pair], c = cv[pair]:
///
/// ```text
/// d(Re zeta_j)/ds = sum m_i ( s (Re zeta_j - Re zeta_i) - c (Im zeta_j - Im zeta_i))
/// d(Im zeta_j)/ds = -sum m_i ( c (Re zeta_j - Re zeta_i) + s (Im zeta_j - Im zeta_i))
/// ```
///
/// Uniform translations are therefore always in the kernel.
fn assemble(m: &[f64; 3], sv: &[f64; 3], cv: &[f64; 3]) -> Matrix6<f64> {
    let mut a = Matrix6::zeros();
    for j in 0..3 {
        for i in 0..3 {
            if i == j {
                continue;
            }
            let k = PAIR[j][i];
            let s = m[i] * sv[k];
            let c = m[i] * cv[k];
            let (r, q) = (2 * j, 2 * i);
            a[(r, q)] = -s;
            a[(r, q + 1)] = c;
            a[(r, r)] += s;
            a[(r, r + 1)] -= c;
            a[(r + 1, q)] = c;
            a[(r + 1, q + 1)] = s;
            a[(r + 1, r)] -= c;
            a[(r + 1, r + 1)] -= s;
        }
    }
    a
}

/// Matrix exponential by scaling and squaring with a degree-20 Taylor sum.
/// After scaling the norm is at most 1/2, so the truncation error of the
/// series sits far below machine precision.
fn expm6(m: &Matrix6<f64>) -> Matrix6<f64> {
    let norm = m.norm();
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = m * 0.5f64.powi(s);
    let mut term = Matrix6::identity();
    let mut sum = Matrix6::identity();
    for n in 1..=20 {
        term = term * scaled / n as f64;
        sum += term;
    }
    for _ in 0..s {
        sum = sum * sum;
    }
    sum
}
