//! Angular-mode analysis of the linearized vorticity operator.
//!
//! Around the glued profile the linearization acts mode by mode: on the
//! k-th Fourier mode in the angle it is the radial operator
//!
//!   L_k[psi] = psi'' + psi'/r - k^2 psi/r^2 + W psi,     W = gamma Gamma^{gamma-1}_+,
//!
//! and this crate solves L_k[psi] = W g for given forcings g, produces the
//! positive homogeneous solutions zeta_k, and computes the spectrum of the
//! weighted eigenproblem -Delta e = mu W e. The weight vanishes outside the
//! unit disk, so beyond r = 1 everything is governed by the Euler operator
//! whose solutions are r^{±k}: numerical integration happens on [0, 1] only
//! and the far field is attached in closed form. In particular, for |k| >= 2
//! the inhomogeneous solution is exactly a multiple of r^{-k} past the
//! support, and the truncation radius affects nothing but how far the
//! returned samples extend.
//!
//! zeta_k grows like r^k across sixteen decades for the larger modes, so the
//! integration variable is the normalized zh = zeta/r^k, which stays of
//! order one and turns absolute integrator tolerances harmless. The
//! variation-of-parameters integrals are then accumulated over grid panels
//! by adaptive quadrature against cubic Hermite interpolants with exact
//! nodal derivatives; the outer integral is accumulated from the boundary
//! inward, where all contributions carry one sign, because forming it as a
//! difference of two primitives loses ten digits across the core.

use numerics::ode::{integrate, OdeError, OdeOptions};
use numerics::quad::quad;
use numerics::roots::brent;
use numerics::stencil::deriv_at;
use numerics::tridiag::{pencil_count_below, pencil_eigenvector};
use profile::VortexProfile;
use std::fmt::Write as _;

/// Largest angular mode the radial machinery accepts. The powers r^{2k+1}
/// stay comfortably inside f64 range down to the first grid node for k up
/// to this cap.
pub const MAX_MODE: i32 = 16;

/// Samples returned past the unit disk extend to this radius. Diagnostic
/// only: the exterior values are closed-form.
pub const R_MAX: f64 = 50.0;

const N_IN: usize = 2048;
const N_OUT: usize = 128;
const ODE_TOL: f64 = 1e-12;
const PANEL_RTOL: f64 = 1e-11;

#[derive(Debug, Clone)]
pub enum ModalError {
    /// Mode number outside what the solver supports (k = 0 has no r^k
    /// normalization and the inhomogeneous problem is not posed for it).
    UnsupportedMode(i32),
    /// The homogeneous solution crossed zero, which contradicts its
    /// positivity; the profile data must be corrupt.
    SignChange { k: i32, r: f64 },
    /// Eigenvalues moved too much between the half and full resolution
    /// grids, or the eigensolver failed to certify a pair.
    TooCoarse { k: i32, detail: f64 },
    Integration(OdeError),
}

impl std::fmt::Display for ModalError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModalError::UnsupportedMode(k) => write!(f, "unsupported angular mode k = {k}"),
            ModalError::SignChange { k, r } => {
                write!(f, "homogeneous solution of mode {k} changed sign near r = {r}")
            }
            ModalError::TooCoarse { k, detail } => {
                write!(f, "spectrum of mode {k} not resolved (drift {detail:.3e})")
            }
            ModalError::Integration(e) => write!(f, "mode integration failed: {e}"),
        }
    }
}

impl std::error::Error for ModalError {}

impl From<OdeError> for ModalError {
    fn from(e: OdeError) -> Self {
        ModalError::Integration(e)
    }
}

/// Cubic Hermite evaluation on sorted nodes with exact derivatives.
/// Unlike a fitted spline this reproduces the integrator's own accuracy
/// between samples. Returns (value, derivative).
fn hermite(x: &[f64], y: &[f64], yp: &[f64], t: f64) -> (f64, f64) {
    let n = x.len();
    if t <= x[0] {
        return (y[0], yp[0]);
    }
    if t >= x[n - 1] {
        return (y[n - 1], yp[n - 1]);
    }
    let j = x.partition_point(|&v| v <= t) - 1;
    let h = x[j + 1] - x[j];
    let s = (t - x[j]) / h;
    let (s2, s3) = (s * s, s * s * s);
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let v = h00 * y[j] + h10 * h * yp[j] + h01 * y[j + 1] + h11 * h * yp[j + 1];
    let d00 = (6.0 * s2 - 6.0 * s) / h;
    let d10 = 3.0 * s2 - 4.0 * s + 1.0;
    let d01 = (-6.0 * s2 + 6.0 * s) / h;
    let d11 = 3.0 * s2 - 2.0 * s;
    let d = d00 * y[j] + d10 * yp[j] + d01 * y[j + 1] + d11 * yp[j + 1];
    (v, d)
}

/// Interior grid on [0, 1]: sinh-graded with the same demand as the profile
/// grid, spacing near core_width/100 at the axis growing in proportion to r.
fn inner_grid(p: &VortexProfile) -> Vec<f64> {
    sinh_grid(p, N_IN)
}

fn outer_grid() -> Vec<f64> {
    (1..=N_OUT)
        .map(|j| (R_MAX.ln() * j as f64 / N_OUT as f64).exp())
        .collect()
}

/// zh = zeta/r^k and its derivative on the inner grid, from the regularized
/// equation zh'' + (2k+1) zh'/r + W zh = 0 with zh(0) = 1.
struct Radial {
    k: u32,
    r: Vec<f64>,
    zh: Vec<f64>,
    zhp: Vec<f64>,
    /// Exterior coefficients: zeta = far_a r^k + far_b r^{-k} for r >= 1.
    far_a: f64,
    far_b: f64,
}

impl Radial {
    /// (zeta, zeta') anywhere inside the closed unit disk.
    fn zeta_in(&self, r: f64) -> (f64, f64) {
        let k = self.k as f64;
        let (zh, zhp) = hermite(&self.r, &self.zh, &self.zhp, r);
        if r == 0.0 {
            // r^{k-1} -> 1 for k = 1, 0 for k >= 2.
            let slope = if self.k == 1 { zh } else { 0.0 };
            return (0.0, slope);
        }
        let rk = r.powi(self.k as i32);
        (rk * zh, k * rk / r * zh + rk * zhp)
    }

    fn zeta_out(&self, r: f64) -> (f64, f64) {
        let k = self.k as f64;
        let (gr, de) = (r.powi(self.k as i32), r.powi(-(self.k as i32)));
        (
            self.far_a * gr + self.far_b * de,
            k * (self.far_a * gr - self.far_b * de) / r,
        )
    }
}

fn integrate_zeta_hat(p: &VortexProfile, k_signed: i32) -> Result<Radial, ModalError> {
    let k = k_signed.unsigned_abs();
    let r = inner_grid(p);
    let w0 = p.linearization_weight(0.0);
    let c = -w0 / (4.0 * (k as f64 + 1.0));
    let r_eps = 1e-6;
    let y0 = [1.0 + c * r_eps * r_eps, 2.0 * c * r_eps];
    let kk = 2.0 * k as f64 + 1.0;
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = -kk * y[1] / t - p.linearization_weight(t) * y[0];
    };
    let opts = OdeOptions {
        h_max: Some(p.core_width / 2.0),
        ..OdeOptions::with_tol(ODE_TOL)
    };

    let n = r.len();
    let mut zh = Vec::with_capacity(n);
    let mut zhp = Vec::with_capacity(n);
    zh.push(1.0);
    zhp.push(0.0);
    let mut idx = 1usize;
    let mut crossed: Option<f64> = None;
    let res = integrate(rhs, r_eps, &y0, 1.0, &opts, |step| {
        if step.y1[0] <= 0.0 {
            crossed = Some(step.t1);
            return false;
        }
        while idx < n && r[idx] <= step.t1 {
            let y = step.eval(r[idx]);
            zh.push(y[0]);
            zhp.push(y[1]);
            idx += 1;
        }
        true
    })?;
    if let Some(rx) = crossed {
        return Err(ModalError::SignChange { k: k_signed, r: rx });
    }
    while idx < n {
        zh.push(res.y[0]);
        zhp.push(res.y[1]);
        idx += 1;
    }

    // zeta(1) = zh(1), zeta'(1) = k zh(1) + zh'(1); match a r^k + b r^{-k}.
    let (z1, dz1) = (zh[n - 1], zhp[n - 1]);
    let far_a = z1 + dz1 / (2.0 * k as f64);
    let far_b = -dz1 / (2.0 * k as f64);
    Ok(Radial { k, r, zh, zhp, far_a, far_b })
}

/// A positive solution of L_k[zeta] = 0 normalized by zeta/r^{|k|} -> 1 at
/// the axis. For |k| = 1 this is -Gamma'(r) divided by its axis slope
/// nu(0)^gamma / 2, and its exterior growth coefficient vanishes; for
/// |k| >= 2 the exterior decay admixture is tiny because the weight sits on
/// the core, far inside the unit circle.
pub struct HomogeneousMode {
    pub k: i32,
    pub r_grid: Vec<f64>,
    pub zeta: Vec<f64>,
    pub zeta_prime: Vec<f64>,
    /// Coefficient of r^{|k|} in the exterior closed form.
    pub far_growth: f64,
    /// Coefficient of r^{-|k|} in the exterior closed form.
    pub far_decay: f64,
    rad: Radial,
}

impl HomogeneousMode {
    /// (zeta, zeta') at any radius.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        assert!(r >= 0.0);
        if r <= 1.0 {
            self.rad.zeta_in(r)
        } else {
            self.rad.zeta_out(r)
        }
    }
}

pub fn homogeneous_solution(p: &VortexProfile, k: i32) -> Result<HomogeneousMode, ModalError> {
    if k == 0 || k.abs() > MAX_MODE {
        return Err(ModalError::UnsupportedMode(k));
    }
    let rad = integrate_zeta_hat(p, k)?;
    let n_in = rad.r.len() - 1;
    let mut r_grid = rad.r.clone();
    r_grid.extend(outer_grid());
    let mut zeta = Vec::with_capacity(r_grid.len());
    let mut zeta_prime = Vec::with_capacity(r_grid.len());
    for (i, &r) in r_grid.iter().enumerate() {
        let (z, dz) = if i <= n_in { rad.zeta_in(r) } else { rad.zeta_out(r) };
        zeta.push(z);
        zeta_prime.push(dz);
    }
    Ok(HomogeneousMode {
        k,
        r_grid,
        zeta,
        zeta_prime,
        far_growth: rad.far_a,
        far_decay: rad.far_b,
        rad,
    })
}

/// One inhomogeneous mode: psi solves L_k[psi] = W g for the stored g
/// (L_k[psi] = g directly when built by `solve_mode_forced`), with psi
/// bounded at the axis and of minimal growth at infinity (decay r^{-|k|}
/// for |k| >= 2, linear growth for |k| = 1).
pub struct ModalSolution {
    pub k: i32,
    pub r_grid: Vec<f64>,
    pub zeta: Vec<f64>,
    pub psi: Vec<f64>,
    pub g: Vec<f64>,
    /// psi = far_coefficient r^{-|k|} past the unit disk for |k| >= 2;
    /// psi/r -> far_coefficient at infinity for |k| = 1.
    pub far_coefficient: f64,
    /// Integral of zeta g W r over the support of the weight. The inner
    /// integral of the construction is constant past r = 1 at this value.
    pub weight_integral: f64,
    rad: Radial,
    /// Signed accumulated outer factor: psi = zeta * sacc inside [0, 1].
    sacc: Vec<f64>,
    saccp: Vec<f64>,
    f1s: f64,
    w: Vec<f64>,
    /// Samples of the realized right side of L_k[psi] = rhs (W g for the
    /// weighted constructors, the raw forcing for `solve_mode_forced`).
    rhs: Vec<f64>,
}

impl ModalSolution {
    /// psi at any radius, matching the integrator's accuracy between nodes.
    pub fn eval_psi(&self, r: f64) -> f64 {
        self.eval_psi_d(r).0
    }

    /// (psi, psi') at any radius. The interior derivative combines the exact
    /// zeta' with the Hermite derivative of the outer factor; both exterior
    /// branches are closed forms.
    pub fn eval_psi_d(&self, r: f64) -> (f64, f64) {
        assert!(r >= 0.0);
        let k = self.k.unsigned_abs();
        if r <= 1.0 {
            let (z, dz) = self.rad.zeta_in(r);
            let (s, sp) = hermite(&self.rad.r, &self.sacc, &self.saccp, r);
            (z * s, dz * s + z * sp)
        } else if k == 1 {
            let (z, dz) = self.rad.zeta_out(r);
            let (a, b) = (self.rad.far_a, self.rad.far_b);
            let den = a * r * r + b;
            let h = self.f1s + self.weight_integral * (r * r - 1.0) / (2.0 * (a + b) * den);
            let hp = self.weight_integral * r / (den * den);
            (z * h, dz * h + z * hp)
        } else {
            let kf = k as f64;
            let v = self.far_coefficient * r.powi(-(k as i32));
            (v, -kf * v / r)
        }
    }

    /// (zeta, zeta') of the accompanying homogeneous solution.
    pub fn eval_zeta(&self, r: f64) -> (f64, f64) {
        if r <= 1.0 {
            self.rad.zeta_in(r)
        } else {
            self.rad.zeta_out(r)
        }
    }

    /// CSV dump `r,zeta_k,psi_k,residual`. The residual column is the
    /// finite-difference defect of L_k[psi] - W g over the stored samples,
    /// normalized by the local term sizes; it is a smoke diagnostic limited
    /// by differencing noise, not the certification of the solve (the
    /// integrated-form tests are).
    pub fn to_csv_string(&self) -> String {
        let res = self.residual_samples();
        let mut out = String::from("r,zeta_k,psi_k,residual\n");
        for i in 0..self.r_grid.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.r_grid[i], self.zeta[i], self.psi[i], res[i]
            )
            .unwrap();
        }
        out
    }

    fn residual_samples(&self) -> Vec<f64> {
        let n = self.r_grid.len();
        let k2 = (self.k * self.k) as f64;
        let mut out = vec![0.0; n];
        for i in 2..n - 2 {
            let r = self.r_grid[i];
            let d1 = deriv_at(&self.r_grid, &self.psi, i, 1, 5);
            let d2 = deriv_at(&self.r_grid, &self.psi, i, 2, 5);
            let terms = [
                d2,
                d1 / r,
                -k2 * self.psi[i] / (r * r),
                self.w[i] * self.psi[i],
                -self.rhs[i],
            ];
            let scale = 1e-30 + terms.iter().map(|t| t.abs()).sum::<f64>();
            out[i] = terms.iter().sum::<f64>() / scale;
        }
        out
    }
}

/// Solve L_k[psi] = W g for the solution bounded at the axis and of minimal
/// growth at infinity. `g` must be the mode-k radial profile of a smooth
/// function, vanishing like r^{|k|} at the axis; a forcing that stays
/// bounded away from zero there makes the reduced outer integral divergent
/// for |k| >= 2 and the result meaningless.
pub fn solve_mode<F: Fn(f64) -> f64>(
    p: &VortexProfile,
    k: i32,
    g: F,
) -> Result<ModalSolution, ModalError> {
    if k == 0 || k.abs() > MAX_MODE {
        return Err(ModalError::UnsupportedMode(k));
    }
    build_solution(p, k, &|r| p.linearization_weight(r) * g(r), &g)
}

/// Solve L_k[psi] = f for a forcing given directly, without the weight
/// factor, under the same boundary selection and axis contract as
/// `solve_mode` (f like r^{|k|} at the axis). f must vanish for r >= 1: the
/// construction's exterior closed forms assume the forcing lives inside the
/// weight's support, and anything beyond r = 1 is ignored.
pub fn solve_mode_forced<F: Fn(f64) -> f64>(
    p: &VortexProfile,
    k: i32,
    f: F,
) -> Result<ModalSolution, ModalError> {
    if k == 0 || k.abs() > MAX_MODE {
        return Err(ModalError::UnsupportedMode(k));
    }
    build_solution(p, k, &|r| if r <= 1.0 { f(r) } else { 0.0 }, &f)
}

/// The mode-l response to the forcing -r^l, for l in {2, 3, 4}: the positive
/// function with L_l[rho] = -W r^l, exposed separately because the vorticity
/// correction of the expansion consumes the combination (rho/r^l + 1):
///
///   -Delta(rho_l e^{il theta}) = W (rho_l/r^l + 1) r^l e^{il theta},
///
/// finite at the axis and supported, like W, in the closed unit disk. The
/// returned solution stores g = -r^l, so it satisfies the same modal
/// equation contract as `solve_mode`.
pub fn rho_l(p: &VortexProfile, l: i32) -> Result<ModalSolution, ModalError> {
    if !(2..=4).contains(&l) {
        return Err(ModalError::UnsupportedMode(l));
    }
    build_solution(
        p,
        l,
        &|r| -p.linearization_weight(r) * r.powi(l),
        &|r: f64| -r.powi(l),
    )
}

/// Core variation-of-parameters solve of L_k[psi] = rhs. `rhs` is the true
/// right side (weight factor already applied where there is one); `g_stored`
/// fills the public g samples for callers that think in L psi = W g terms.
fn build_solution(
    p: &VortexProfile,
    k_signed: i32,
    rhs: &dyn Fn(f64) -> f64,
    g_stored: &dyn Fn(f64) -> f64,
) -> Result<ModalSolution, ModalError> {
    let rad = integrate_zeta_hat(p, k_signed)?;
    let k = rad.k;
    let kf = k as f64;
    let n_in = rad.r.len() - 1;
    let r_in = &rad.r;

    // Inner primitive G(r) = int_0^r zeta rhs t dt, panel by panel. Exact
    // derivatives at the nodes make the Hermite interpolant of G as
    // accurate as the quadrature itself.
    let zeta_at = |r: f64| rad.zeta_in(r).0;
    let mut big_g = Vec::with_capacity(n_in + 1);
    let mut big_gp = Vec::with_capacity(n_in + 1);
    big_g.push(0.0);
    big_gp.push(0.0);
    for i in 1..=n_in {
        let panel = quad(
            |t| zeta_at(t) * rhs(t) * t,
            r_in[i - 1],
            r_in[i],
            PANEL_RTOL,
            1e-300,
        );
        big_g.push(big_g[i - 1] + panel.value);
        big_gp.push(zeta_at(r_in[i]) * rhs(r_in[i]) * r_in[i]);
    }
    let g1 = big_g[n_in];
    let (a, b) = (rad.far_a, rad.far_b);
    assert!(a > 0.0 || k == 1, "growth coefficient must be positive");

    // Outer factor. The integrand G/(r zeta^2) is integrated forward from
    // the axis for |k| = 1 and backward from the boundary for |k| >= 2,
    // where the closed-form tail over (1, inf) seeds the accumulation.
    // G vanishes like r^{2k+2} at the axis, which a cubic interpolant
    // renders as r^2 and turns the quotient non-integrable; on the first
    // panels G is therefore requadratured directly.
    let direct = 12.min(n_in);
    let g_int = |t: f64| zeta_at(t) * rhs(t) * t;
    let outer_at = |s: f64, requad: bool| {
        let gv = if requad {
            quad(g_int, 0.0, s, PANEL_RTOL, 1e-300).value
        } else {
            hermite(r_in, &big_g, &big_gp, s).0
        };
        let z = zeta_at(s);
        gv / (s * z * z)
    };
    let outer_integrand = |s: f64| outer_at(s, false);
    let mut acc = vec![0.0; n_in + 1];
    if k == 1 {
        for i in 1..=n_in {
            let panel = quad(|s| outer_at(s, i <= direct), r_in[i - 1], r_in[i], PANEL_RTOL, 1e-300);
            acc[i] = acc[i - 1] + panel.value;
        }
    } else {
        acc[n_in] = g1 / (2.0 * kf * a * (a + b));
        for i in (0..n_in).rev() {
            let panel = quad(|s| outer_at(s, i < direct), r_in[i], r_in[i + 1], PANEL_RTOL, 1e-300);
            acc[i] = acc[i + 1] + panel.value;
        }
    }
    // The boundary-respecting outer factor is the forward integral for
    // |k| = 1 and minus the backward one for |k| >= 2; S' = G/(r zeta^2)
    // either way.
    let s_sign = if k == 1 { 1.0 } else { -1.0 };
    let mut sacc = Vec::with_capacity(n_in + 1);
    let mut saccp = Vec::with_capacity(n_in + 1);
    for i in 0..=n_in {
        sacc.push(s_sign * acc[i]);
        saccp.push(if i == 0 { 0.0 } else { outer_integrand(r_in[i]) });
    }
    let f1s = sacc[n_in];

    let wint = g1;
    let far_coefficient = if k == 1 {
        a * f1s + wint / (2.0 * (a + b))
    } else {
        -wint / (2.0 * kf * a)
    };

    let mut r_grid = r_in.clone();
    r_grid.extend(outer_grid());
    let mut zeta = Vec::with_capacity(r_grid.len());
    let mut psi = Vec::with_capacity(r_grid.len());
    let mut gout = Vec::with_capacity(r_grid.len());
    let mut w = Vec::with_capacity(r_grid.len());
    let mut rhs_out = Vec::with_capacity(r_grid.len());
    let mut sol = ModalSolution {
        k: k_signed,
        r_grid: Vec::new(),
        zeta: Vec::new(),
        psi: Vec::new(),
        g: Vec::new(),
        far_coefficient,
        weight_integral: wint,
        rad,
        sacc,
        saccp,
        f1s,
        w: Vec::new(),
        rhs: Vec::new(),
    };
    for &r in &r_grid {
        let (z, _) = sol.eval_zeta(r);
        zeta.push(z);
        psi.push(sol.eval_psi(r));
        gout.push(g_stored(r));
        w.push(p.linearization_weight(r));
        rhs_out.push(if r <= 1.0 { rhs(r) } else { 0.0 });
    }
    sol.r_grid = r_grid;
    sol.zeta = zeta;
    sol.psi = psi;
    sol.g = gout;
    sol.w = w;
    sol.rhs = rhs_out;
    Ok(sol)
}

/// Spectrum of -Delta e = mu W e restricted to one angular mode.
pub struct ModeSpectrum {
    pub k: i32,
    pub eigenvalues: Vec<f64>,
    /// Radial samples of the eigenfunctions on `r_grid`, W-normalized.
    pub eigenfunctions: Vec<Vec<f64>>,
    /// Discrete pencil residuals, certifying each pair on its grid.
    pub residuals: Vec<f64>,
    /// Movement of each eigenvalue between the half and full grids.
    pub refinement_drift: Vec<f64>,
}

pub struct WeightedSpectrum {
    pub r_grid: Vec<f64>,
    pub modes: Vec<ModeSpectrum>,
}

impl WeightedSpectrum {
    /// JSON report of eigenvalues and certification numbers per mode.
    pub fn to_json_string(&self) -> String {
        let list = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:.16e}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut out = String::from("{\n  \"modes\": [\n");
        for (i, m) in self.modes.iter().enumerate() {
            let sep = if i + 1 < self.modes.len() { "," } else { "" };
            writeln!(
                out,
                "    {{\"k\": {}, \"eigenvalues\": [{}], \"residuals\": [{}], \"refinement_drift\": [{}]}}{}",
                m.k,
                list(&m.eigenvalues),
                list(&m.residuals),
                list(&m.refinement_drift),
                sep
            )
            .unwrap();
        }
        let _ = writeln!(out, "  ],\n  \"n_grid\": {}\n}}", self.r_grid.len() - 1);
        out
    }
}

/// Flux-form second-order discretization of -Delta restricted to mode k on
/// [0, 1], with the exact exterior reduction folded into the boundary row:
/// outside the support of W every finite-energy eigenfunction is a pure
/// power, e proportional to r^{-k} (constant for k = 0), so the Robin
/// closure e'(1) = -k e(1) is exact and the truncation commits no error.
/// Returns (diag, off, weight) over the unknowns (node 0 is dropped for
/// k >= 1 where e(0) = 0).
fn assemble_pencil(
    p: &VortexProfile,
    k: u32,
    r: &[f64],
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = r.len() - 1;
    let lo = if k >= 1 { 1 } else { 0 };
    let m = n + 1 - lo;
    let mut diag = vec![0.0; m];
    let mut off = vec![0.0; m - 1];
    let mut bw = vec![0.0; m];
    for (row, i) in (lo..=n).enumerate() {
        let mut d = 0.0;
        let mut cell = 0.0;
        if i > 0 {
            let h = r[i] - r[i - 1];
            let rm = 0.5 * (r[i] + r[i - 1]);
            d += rm / h;
            cell += 0.5 * h;
        }
        if i < n {
            let h = r[i + 1] - r[i];
            let rm = 0.5 * (r[i + 1] + r[i]);
            d += rm / h;
            off[row] = -rm / h;
            cell += 0.5 * h;
        }
        if k >= 1 {
            if i > 0 {
                d += (k * k) as f64 * cell / r[i];
            }
            if i == n {
                d += k as f64;
            }
        }
        diag[row] = d;
        bw[row] = p.linearization_weight(r[i]) * r[i] * cell;
    }
    (diag, off, bw)
}

fn sinh_grid(p: &VortexProfile, n: usize) -> Vec<f64> {
    let grade = (n as f64 * p.core_width / 100.0).min(0.999);
    let b = brent(|b| b / b.sinh() - grade, 1e-3, 40.0, 1e-13)
        .expect("b/sinh(b) falls monotonically from 1 to 0 across the bracket");
    let sinh_b = b.sinh();
    let mut r = Vec::with_capacity(n + 1);
    r.push(0.0);
    for i in 1..n {
        r.push((b * i as f64 / n as f64).sinh() / sinh_b);
    }
    r.push(1.0);
    r
}

/// Smallest `count` pencil eigenvalues with B merely nonnegative: bisection
/// on the inertia count. B has zero rows wherever the weight vanishes, so
/// the positive-definite fast path of the shared solver does not apply, but
/// Sylvester's count is indifferent to that.
fn smallest_eigenvalues(diag: &[f64], off: &[f64], bw: &[f64], count: usize) -> Vec<f64> {
    let lo0 = -1e-6;
    let mut hi = 4.0;
    while pencil_count_below(diag, off, bw, hi) < count {
        hi *= 2.0;
        assert!(hi < 1e12, "weighted spectrum ran away; weight must be broken");
    }
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let (mut a, mut b) = (lo0, hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if b - a <= 1e-12 * (1.0 + mid.abs()) {
                break;
            }
            if pencil_count_below(diag, off, bw, mid) > j {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}

/// Spectrum of the weighted eigenproblem for each requested angular mode.
/// `n_grid` controls the radial resolution; the same problem is also solved
/// at half resolution and any eigenvalue drifting by more than 1e-3 flags
/// the request as under-resolved.
pub fn weighted_spectrum(
    p: &VortexProfile,
    angular_modes: &[i32],
    n_per_mode: usize,
    n_grid: usize,
) -> Result<WeightedSpectrum, ModalError> {
    assert!(n_grid >= 32, "grid too small to mean anything");
    assert!(n_per_mode >= 1);
    let r_fine = sinh_grid(p, n_grid);
    let r_half = sinh_grid(p, n_grid / 2);
    let mut modes = Vec::new();
    let mut seen = Vec::new();
    for &ks in angular_modes {
        let k = ks.unsigned_abs();
        if ks.abs() > MAX_MODE {
            return Err(ModalError::UnsupportedMode(ks));
        }
        if seen.contains(&k) {
            continue;
        }
        seen.push(k);

        let (diag, off, bw) = assemble_pencil(p, k, &r_fine);
        let (dh, oh, bh) = assemble_pencil(p, k, &r_half);
        let mu = smallest_eigenvalues(&diag, &off, &bw, n_per_mode);
        let mu_half = smallest_eigenvalues(&dh, &oh, &bh, n_per_mode);

        let mut eigenfunctions = Vec::with_capacity(n_per_mode);
        let mut residuals = Vec::with_capacity(n_per_mode);
        let mut drift = Vec::with_capacity(n_per_mode);
        for (j, &m) in mu.iter().enumerate() {
            let v = pencil_eigenvector(&diag, &off, &bw, m);
            // Backward-error style residual: the defect against the
            // absolute size of the row contributions, so it stays
            // meaningful at mu = 0 where both sides vanish.
            let mut num = 0.0f64;
            let mut den = 0.0f64;
            for i in 0..v.len() {
                let mut sv = diag[i] * v[i];
                let mut row = (diag[i] * v[i]).abs() + (m * bw[i] * v[i]).abs();
                if i > 0 {
                    sv += off[i - 1] * v[i - 1];
                    row += (off[i - 1] * v[i - 1]).abs();
                }
                if i + 1 < v.len() {
                    sv += off[i] * v[i + 1];
                    row += (off[i] * v[i + 1]).abs();
                }
                num += (sv - m * bw[i] * v[i]) * (sv - m * bw[i] * v[i]);
                den += row * row;
            }
            let res = (num / den.max(1e-300)).sqrt();
            let d = (m - mu_half[j]).abs();
            if res > 1e-6 || d > 1e-3 {
                return Err(ModalError::TooCoarse { k: ks, detail: res.max(d) });
            }
            let mut full = Vec::with_capacity(r_fine.len());
            if k >= 1 {
                full.push(0.0);
            }
            full.extend_from_slice(&v);
            eigenfunctions.push(full);
            residuals.push(res);
            drift.push(d);
        }
        modes.push(ModeSpectrum {
            k: ks,
            eigenvalues: mu,
            eigenfunctions,
            residuals,
            refinement_drift: drift,
        });
    }
    Ok(WeightedSpectrum { r_grid: r_fine, modes })
}
