//! Chebyshev-Gauss-Lobatto collocation on an interval [0, R].

/// Nodes r_k = R(1 − cos(πk/N))/2, k = 0..=N, increasing from 0 to R.
pub fn lobatto_nodes(n: usize, radius: f64) -> Vec<f64> {
    (0..=n)
        .map(|k| 0.5 * radius * (1.0 - (std::f64::consts::PI * k as f64 / n as f64).cos()))
        .collect()
}

/// Differentiation matrix d/dr on the nodes from [`lobatto_nodes`], row-major (N+1)².
pub fn diff_matrix(n: usize, radius: f64) -> Vec<f64> {
    let m = n + 1;
    let x: Vec<f64> = (0..=n).map(|k| (std::f64::consts::PI * k as f64 / n as f64).cos()).collect();
    let c: Vec<f64> = (0..=n)
        .map(|k| {
            let e = if k == 0 || k == n { 2.0 } else { 1.0 };
            if k % 2 == 0 {
                e
            } else {
                -e
            }
        })
        .collect();
    let mut d = vec![0.0; m * m];
    for i in 0..m {
        let mut row_sum = 0.0;
        for j in 0..m {
            if i != j {
                let v = c[i] / c[j] / (x[i] - x[j]);
                d[i * m + j] = v;
                row_sum += v;
            }
        }
        d[i * m + i] = -row_sum;
    }
    // dr = −(R/2) dx
    let scale = -2.0 / radius;
    for v in d.iter_mut() {
        *v *= scale;
    }
    d
}

/// Barycentric weights for Lobatto nodes.
pub fn bary_weights(n: usize) -> Vec<f64> {
    (0..=n)
        .map(|k| {
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            if k == 0 || k == n {
                0.5 * s
            } else {
                s
            }
        })
        .collect()
}

/// Barycentric interpolation of nodal values at r.
pub fn bary_eval(nodes: &[f64], weights: &[f64], values: &[f64], r: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&x, &w), &v) in nodes.iter().zip(weights).zip(values) {
        let d = r - x;
        if d == 0.0 {
            return v;
        }
        let t = w / d;
        num += t * v;
        den += t;
    }
    num / den
}
