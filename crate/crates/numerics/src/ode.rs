//! Dormand-Prince 5(4) with PI step control and 4th-order dense output.

#[derive(Debug, Clone)]
pub struct OdeOptions {
    /// Relative tolerance on the per-step local error.
    pub rtol: f64,
    /// Absolute tolerance floor.
    pub atol: f64,
    /// Initial step; estimated from the right-hand side when absent.
    pub h0: Option<f64>,
    /// Hard cap on the step size.
    pub h_max: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h0: None,
            h_max: None,
            max_steps: 5_000_000,
        }
    }
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        OdeOptions {
            rtol: tol,
            atol: tol * 1e-2,
            ..Default::default()
        }
    }
}

/// One accepted step. `eval` interpolates inside `[t0, t1]` with the scheme's
/// own quartic continuous extension, matching the 4th-order accuracy of the
/// embedded pair, so sample points do not have to land on step boundaries.
#[derive(Debug, Clone)]
pub struct OdeStep {
    pub t0: f64,
    pub t1: f64,
    pub y0: Vec<f64>,
    pub y1: Vec<f64>,
    pub f0: Vec<f64>,
    pub f1: Vec<f64>,
    /// Quartic interpolation coefficient built from the internal stages.
    dense: Vec<f64>,
}

impl OdeStep {
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let h = self.t1 - self.t0;
        let s = (t - self.t0) / h;
        let s1 = 1.0 - s;
        for i in 0..out.len() {
            let ydiff = self.y1[i] - self.y0[i];
            let bspl = h * self.f0[i] - ydiff;
            let c4 = ydiff - h * self.f1[i] - bspl;
            out[i] = self.y0[i] + s * (ydiff + s1 * (bspl + s * (c4 + s1 * self.dense[i])));
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.y0.len()];
        self.eval_into(t, &mut out);
        out
    }
}

#[derive(Debug, Clone)]
pub struct OdeResult {
    pub t: f64,
    pub y: Vec<f64>,
    pub steps: usize,
    pub rejected: usize,
    pub n_evals: usize,
    /// Largest accepted scaled error estimate (<= 1 by construction).
    pub max_local_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OdeError {
    MaxStepsExceeded { t: f64 },
    StepUnderflow { t: f64 },
    NonFinite { t: f64 },
}

impl std::fmt::Display for OdeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OdeError::MaxStepsExceeded { t } => write!(f, "step budget exhausted at t = {t}"),
            OdeError::StepUnderflow { t } => write!(f, "step size underflow at t = {t}"),
            OdeError::NonFinite { t } => write!(f, "non-finite state at t = {t}"),
        }
    }
}

impl std::error::Error for OdeError {}

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// 4th-order embedded weights (include the FSAL stage).
const E1: f64 = 5179.0 / 57600.0;
const E3: f64 = 7571.0 / 16695.0;
const E4: f64 = 393.0 / 640.0;
const E5: f64 = -92097.0 / 339200.0;
const E6: f64 = 187.0 / 2100.0;
const E7: f64 = 1.0 / 40.0;
// Continuous-output weights.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integrate dy/dt = f(t, y) from `t0` to `t_end` (forward only).
///
/// `observer` sees every accepted step and may return `false` to stop the
/// integration early; the result then carries the state at that step's end.
pub fn integrate<F, O>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    opts: &OdeOptions,
    mut observer: O,
) -> Result<OdeResult, OdeError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(&OdeStep) -> bool,
{
    assert!(t_end > t0, "integrate: t_end must exceed t0");
    let n = y0.len();
    let span = t_end - t0;
    let h_max = opts.h_max.unwrap_or(span).min(span);

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    f(t, &y, &mut k1);
    let mut n_evals = 1usize;

    let mut h = match opts.h0 {
        Some(h0) => h0.min(h_max),
        None => initial_step(&mut f, t, &y, &k1, opts, &mut n_evals).min(h_max),
    };

    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut ytmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];

    let mut steps = 0usize;
    let mut rejected = 0usize;
    let mut max_err: f64 = 0.0;
    let mut err_prev: f64 = 1e-4;

    while t < t_end {
        if steps + rejected > opts.max_steps {
            return Err(OdeError::MaxStepsExceeded { t });
        }
        if h < f64::EPSILON * t.abs().max(1.0) * 16.0 {
            return Err(OdeError::StepUnderflow { t });
        }
        if t + h > t_end {
            h = t_end - t;
        }

        for i in 0..n {
            ytmp[i] = y[i] + h * A21 * k1[i];
        }
        f(t + h / 5.0, &ytmp, &mut k2);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + 3.0 * h / 10.0, &ytmp, &mut k3);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + 4.0 * h / 5.0, &ytmp, &mut k4);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + 8.0 * h / 9.0, &ytmp, &mut k5);
        for i in 0..n {
            ytmp[i] = y[i]
                + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f(t + h, &ytmp, &mut k6);
        for i in 0..n {
            y_new[i] =
                y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        // FSAL stage doubles as the error stage and the next step's k1.
        f(t + h, &y_new, &mut k7);
        n_evals += 6;

        let mut err_sq = 0.0;
        for i in 0..n {
            let e = h
                * ((B1 - E1) * k1[i] + (B3 - E3) * k3[i] + (B4 - E4) * k4[i]
                    + (B5 - E5) * k5[i]
                    + (B6 - E6) * k6[i]
                    - E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err_sq += (e / sc) * (e / sc);
        }
        let err = (err_sq / n as f64).sqrt();

        if !err.is_finite() {
            return Err(OdeError::NonFinite { t });
        }

        if err <= 1.0 {
            let dense: Vec<f64> = (0..n)
                .map(|i| {
                    h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i]
                        + D7 * k7[i])
                })
                .collect();
            let step = OdeStep {
                t0: t,
                t1: t + h,
                y0: std::mem::replace(&mut y, y_new.clone()),
                y1: y_new.clone(),
                f0: k1.clone(),
                f1: k7.clone(),
                dense,
            };
            t += h;
            steps += 1;
            max_err = max_err.max(err);
            std::mem::swap(&mut k1, &mut k7);
            let keep_going = observer(&step);
            if !keep_going {
                return Ok(OdeResult {
                    t,
                    y,
                    steps,
                    rejected,
                    n_evals,
                    max_local_error: max_err,
                });
            }
            let fac = (0.9 * err.max(1e-30).powf(-0.17) * err_prev.powf(0.04)).clamp(0.2, 5.0);
            err_prev = err.max(1e-4);
            h = (h * fac).min(h_max);
        } else {
            rejected += 1;
            let fac = (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            h *= fac;
        }
    }

    Ok(OdeResult {
        t,
        y,
        steps,
        rejected,
        n_evals,
        max_local_error: max_err,
    })
}

/// Standard cheap starting-step heuristic (Hairer's HINIT, trimmed).
fn initial_step<F>(
    f: &mut F,
    t0: f64,
    y0: &[f64],
    f0: &[f64],
    opts: &OdeOptions,
    n_evals: &mut usize,
) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let sc = |y: f64| opts.atol + opts.rtol * y.abs();
    let d0 = (y0.iter().map(|&v| (v / sc(v)).powi(2)).sum::<f64>() / n as f64).sqrt();
    let d1 = (f0
        .iter()
        .zip(y0)
        .map(|(&fv, &yv)| (fv / sc(yv)).powi(2))
        .sum::<f64>()
        / n as f64)
        .sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    // One Euler probe to estimate the second derivative scale.
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(&y, &fv)| y + h0 * fv).collect();
    let mut f1 = vec![0.0; n];
    f(t0 + h0, &y1, &mut f1);
    *n_evals += 1;
    let d2 = (f1
        .iter()
        .zip(f0)
        .zip(y0)
        .map(|((&a, &b), &yv)| ((a - b) / sc(yv)).powi(2))
        .sum::<f64>()
        / n as f64)
        .sqrt()
        / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / dm).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1)
}

/// Integrate and return Hermite-interpolated states at the sorted times `ts`
/// (all inside `[t0, t_end]`), along with the integration summary.
pub fn integrate_sampled<F>(
    f: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    ts: &[f64],
    opts: &OdeOptions,
) -> Result<(OdeResult, Vec<Vec<f64>>), OdeError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let mut samples: Vec<Vec<f64>> = Vec::with_capacity(ts.len());
    let mut idx = 0usize;
    while idx < ts.len() && ts[idx] <= t0 {
        samples.push(y0.to_vec());
        idx += 1;
    }
    let res = integrate(f, t0, y0, t_end, opts, |step| {
        while idx < ts.len() && ts[idx] <= step.t1 {
            samples.push(step.eval(ts[idx]));
            idx += 1;
        }
        true
    })?;
    while idx < ts.len() {
        samples.push(res.y.clone());
        idx += 1;
    }
    Ok((res, samples))
}
