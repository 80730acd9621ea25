//! Symmetric tridiagonal pencil eigenproblems S v = mu B v (B diagonal,
//! positive) by Sturm-sequence bisection, plus banded solves.

/// Solve a general tridiagonal system via LU with partial pivoting.
/// `lower[i]` couples row i+1 to column i, `upper[i]` row i to column i+1.
pub fn tridiag_solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    assert_eq!(lower.len(), n - 1);
    assert_eq!(upper.len(), n - 1);
    assert_eq!(rhs.len(), n);
    if n == 1 {
        return vec![rhs[0] / diag[0]];
    }
    // Pivoting fills one extra superdiagonal (du2).
    let mut dl = lower.to_vec();
    let mut d = diag.to_vec();
    let mut du = upper.to_vec();
    let mut du2 = vec![0.0; n - 2];
    let mut swapped = vec![false; n - 1];
    let mut b = rhs.to_vec();
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            let piv = if d[i] != 0.0 { d[i] } else { f64::MIN_POSITIVE };
            let fact = dl[i] / piv;
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let tmp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = tmp - fact * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du[i + 1];
            }
            swapped[i] = true;
        }
    }
    // Forward substitution, replaying the row interchanges.
    for i in 0..n - 1 {
        if swapped[i] {
            b.swap(i, i + 1);
        }
        b[i + 1] -= dl[i] * b[i];
    }
    // Back substitution against the upper-triangular factor.
    let mut x = vec![0.0; n];
    let dn = if d[n - 1] != 0.0 { d[n - 1] } else { f64::MIN_POSITIVE };
    x[n - 1] = b[n - 1] / dn;
    x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    for i in (0..n - 2).rev() {
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    x
}

/// Number of pencil eigenvalues strictly below `mu`, by the inertia of
/// S - mu B (LDL^T pivot signs; Sylvester's law).
pub fn pencil_count_below(s_diag: &[f64], s_off: &[f64], b_diag: &[f64], mu: f64) -> usize {
    let n = s_diag.len();
    let mut count = 0usize;
    let mut d = s_diag[0] - mu * b_diag[0];
    if d == 0.0 {
        d = -f64::MIN_POSITIVE;
    }
    if d < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let mut di = (s_diag[i] - mu * b_diag[i]) - s_off[i - 1] * s_off[i - 1] / d;
        if di == 0.0 {
            di = -f64::MIN_POSITIVE;
        }
        if di < 0.0 {
            count += 1;
        }
        d = di;
    }
    count
}

/// The `m` smallest eigenvalues of S v = mu B v with all `b_diag > 0`.
pub fn pencil_smallest(
    s_diag: &[f64],
    s_off: &[f64],
    b_diag: &[f64],
    m: usize,
    tol: f64,
) -> Vec<f64> {
    let n = s_diag.len();
    assert_eq!(s_off.len(), n - 1);
    assert_eq!(b_diag.len(), n);
    assert!(b_diag.iter().all(|&b| b > 0.0));
    // Gershgorin bounds for B^{ -1/2 } S B^{ -1/2 }.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += s_off[i - 1].abs() / (b_diag[i] * b_diag[i - 1]).sqrt();
        }
        if i + 1 < n {
            r += s_off[i].abs() / (b_diag[i] * b_diag[i + 1]).sqrt();
        }
        let c = s_diag[i] / b_diag[i];
        lo = lo.min(c - r);
        hi = hi.max(c + r);
    }
    let m = m.min(n);
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let mut a = lo;
        let mut b = hi;
        // Find the j-th eigenvalue: smallest mu with count(mu+) > j.
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if b - a <= tol * (1.0 + mid.abs()) {
                break;
            }
            if pencil_count_below(s_diag, s_off, b_diag, mid) > j {
                b = mid;
            } else {
                a = mid;
            }
        }
        out.push(0.5 * (a + b));
    }
    out
}

/// Eigenvector for an isolated pencil eigenvalue by inverse iteration.
pub fn pencil_eigenvector(
    s_diag: &[f64],
    s_off: &[f64],
    b_diag: &[f64],
    mu: f64,
) -> Vec<f64> {
    let n = s_diag.len();
    // Shift slightly off the eigenvalue so the solve stays finite.
    let scale = s_diag.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let shift = mu + 1e-11 * (1.0 + mu.abs());
    let d: Vec<f64> = (0..n)
        .map(|i| s_diag[i] - shift * b_diag[i])
        .collect();
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 0.5 * ((i * 2654435761) % 97) as f64 / 97.0)
        .collect();
    normalize_b(&mut v, b_diag);
    for _ in 0..4 {
        let rhs: Vec<f64> = (0..n).map(|i| b_diag[i] * v[i]).collect();
        let mut w = tridiag_solve(s_off, &d, s_off, &rhs);
        let norm = w.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        if !norm.is_finite() || norm == 0.0 {
            break;
        }
        w.iter_mut().for_each(|x| *x /= norm);
        v = w;
        normalize_b(&mut v, b_diag);
        // Converged when the residual is tiny relative to the matrix scale.
        let mut res = 0.0f64;
        for i in 0..n {
            let mut r = (s_diag[i] - mu * b_diag[i]) * v[i];
            if i > 0 {
                r += s_off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                r += s_off[i] * v[i + 1];
            }
            res = res.max(r.abs());
        }
        if res < 1e-10 * scale.max(1.0) {
            break;
        }
    }
    v
}

fn normalize_b(v: &mut [f64], b: &[f64]) {
    let s: f64 = v.iter().zip(b).map(|(&x, &w)| w * x * x).sum();
    let s = s.sqrt();
    if s > 0.0 {
        v.iter_mut().for_each(|x| *x /= s);
    }
    // Fix the overall sign: make the largest-magnitude entry positive.
    let mut imax = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[imax].abs() {
            imax = i;
        }
    }
    if v[imax] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn laplacian(n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        (vec![2.0; n], vec![-1.0; n - 1], vec![1.0; n])
    }

    #[test]
    fn dirichlet_laplacian_spectrum() {
        let n = 64;
        let (d, e, b) = laplacian(n);
        let vals = pencil_smallest(&d, &e, &b, 5, 1e-13);
        for (j, v) in vals.iter().enumerate() {
            let exact =
                2.0 - 2.0 * ((j + 1) as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((v - exact).abs() < 1e-10, "lambda_{j}: {v} vs {exact}");
        }
    }

    #[test]
    fn eigenvector_residual_small() {
        let n = 50;
        let (d, e, b) = laplacian(n);
        let vals = pencil_smallest(&d, &e, &b, 2, 1e-13);
        for &mu in &vals {
            let v = pencil_eigenvector(&d, &e, &b, mu);
            for i in 0..n {
                let mut r = (d[i] - mu) * v[i];
                if i > 0 {
                    r += e[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    r += e[i] * v[i + 1];
                }
                assert!(r.abs() < 1e-8, "residual {r} at {i}");
            }
        }
    }

    #[test]
    fn weighted_pencil_2x2_analytic() {
        // S = [[2,-1],[-1,2]], B = diag(1,4): det(S - mu B) = 0
        // => 4 mu^2 - 10 mu + 3 = 0 => mu = (10 +- sqrt(52)) / 8.
        let d = vec![2.0, 2.0];
        let e = vec![-1.0];
        let b = vec![1.0, 4.0];
        let vals = pencil_smallest(&d, &e, &b, 2, 1e-14);
        let lo = (10.0 - 52.0f64.sqrt()) / 8.0;
        let hi = (10.0 + 52.0f64.sqrt()) / 8.0;
        assert!((vals[0] - lo).abs() < 1e-12);
        assert!((vals[1] - hi).abs() < 1e-12);
    }

    #[test]
    fn tridiag_solve_random_system() {
        let n = 40;
        let l: Vec<f64> = (0..n - 1).map(|i| -0.3 - 0.01 * i as f64).collect();
        let u: Vec<f64> = (0..n - 1).map(|i| 0.4 + 0.02 * i as f64).collect();
        let d: Vec<f64> = (0..n).map(|i| 2.0 + 0.05 * i as f64).collect();
        let xt: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            rhs[i] = d[i] * xt[i];
            if i > 0 {
                rhs[i] += l[i - 1] * xt[i - 1];
            }
            if i + 1 < n {
                rhs[i] += u[i] * xt[i + 1];
            }
        }
        let x = tridiag_solve(&l, &d, &u, &rhs);
        for i in 0..n {
            assert!((x[i] - xt[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        // d[0] = 0 forces a row swap immediately.
        let l = vec![1.0, 0.5];
        let d = vec![0.0, 1.0, 2.0];
        let u = vec![2.0, -1.0];
        let xt = vec![1.0, -2.0, 3.0];
        let rhs = vec![
            d[0] * xt[0] + u[0] * xt[1],
            l[0] * xt[0] + d[1] * xt[1] + u[1] * xt[2],
            l[1] * xt[1] + d[2] * xt[2],
        ];
        let x = tridiag_solve(&l, &d, &u, &rhs);
        for i in 0..3 {
            assert!((x[i] - xt[i]).abs() < 1e-12, "{x:?}");
        }
    }

    proptest! {
        #[test]
        fn sturm_count_is_monotone_and_complete(seed in 0u64..500) {
            let n = 12usize;
            let d: Vec<f64> = (0..n)
                .map(|i| ((seed.wrapping_mul(i as u64 + 1) % 19) as f64) - 9.0)
                .collect();
            let e: Vec<f64> = (0..n - 1)
                .map(|i| ((seed.wrapping_mul(3 * i as u64 + 7) % 13) as f64) * 0.3 - 1.8)
                .collect();
            let b = vec![1.0; n];
            let lo = -40.0;
            let hi = 40.0;
            prop_assert_eq!(pencil_count_below(&d, &e, &b, lo), 0);
            prop_assert_eq!(pencil_count_below(&d, &e, &b, hi), n);
            let mut prev = 0;
            for k in 0..=20 {
                let mu = lo + (hi - lo) * k as f64 / 20.0;
                let c = pencil_count_below(&d, &e, &b, mu);
                prop_assert!(c >= prev);
                prev = c;
            }
        }
    }
}
