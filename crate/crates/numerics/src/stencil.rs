//! Finite-difference weights on arbitrary nodes (Fornberg's recursion).

/// Weights `w[k][j]` such that the k-th derivative of f at `z` is
/// approximated by `sum_j w[k][j] f(x[j])`, for k = 0..=m.
pub fn fd_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    assert!(n > m, "need more nodes than the derivative order");
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// k-th derivative at `x[i]` from the `width` nearest samples.
pub fn deriv_at(x: &[f64], y: &[f64], i: usize, k: usize, width: usize) -> f64 {
    let n = x.len();
    let half = width / 2;
    let lo = if i < half { 0 } else { (i - half).min(n - width) };
    let w = fd_weights(x[i], &x[lo..lo + width], k);
    (0..width).map(|j| w[k][j] * y[lo + j]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn classic_central_second_derivative() {
        let w = fd_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert!((w[2][0] - 1.0).abs() < 1e-14);
        assert!((w[2][1] + 2.0).abs() < 1e-14);
        assert!((w[2][2] - 1.0).abs() < 1e-14);
        assert!((w[1][0] + 0.5).abs() < 1e-14);
        assert!((w[1][2] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn deriv_at_on_nonuniform_grid() {
        let x: Vec<f64> = (0..60)
            .map(|i| (i as f64 / 59.0).powi(2) * 2.0 + i as f64 * 0.001)
            .collect();
        let y: Vec<f64> = x.iter().map(|v| (2.0 * v).sin()).collect();
        for &(i, k) in &[(5usize, 1usize), (30, 1), (58, 1), (30, 2)] {
            let d = deriv_at(&x, &y, i, k, 7);
            let exact = match k {
                1 => 2.0 * (2.0 * x[i]).cos(),
                2 => -4.0 * (2.0 * x[i]).sin(),
                _ => unreachable!(),
            };
            assert!(
                (d - exact).abs() < 1e-5,
                "i={i} k={k}: {d} vs {exact}"
            );
        }
    }

    proptest! {
        // Weights must differentiate polynomials up to degree n-1 exactly.
        #[test]
        fn exact_on_polynomials(seed in 0u64..1000) {
            let n = 6usize;
            let mut nodes: Vec<f64> = (0..n)
                .map(|i| i as f64 + 0.3 * (((seed + i as u64 * 37) % 17) as f64 / 17.0))
                .collect();
            nodes.sort_by(|a, b| a.total_cmp(b));
            let z = nodes[2] + 0.25;
            let w = fd_weights(z, &nodes, 3);
            for p in 0..n {
                for k in 0..=3usize {
                    let approx: f64 = (0..n).map(|j| w[k][j] * nodes[j].powi(p as i32)).sum();
                    // d^k/dz^k z^p
                    let exact = if k > p {
                        0.0
                    } else {
                        (p - k + 1..=p).map(|q| q as f64).product::<f64>()
                            * z.powi((p - k) as i32)
                    };
                    prop_assert!((approx - exact).abs() < 1e-7 * exact.abs().max(1.0),
                        "p={p} k={k}: {approx} vs {exact}");
                }
            }
        }
    }
}
