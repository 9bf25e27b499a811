//! Legendre polynomials and Gauss–Legendre rules.

/// `[P_0(x), ..., P_lmax(x)]` by the three-term recurrence.
pub fn legendre_values(x: f64, lmax: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(lmax + 1);
    p.push(1.0);
    if lmax == 0 {
        return p;
    }
    p.push(x);
    for l in 1..lmax {
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * x * p[l] - lf * p[l - 1]) / (lf + 1.0);
        p.push(next);
    }
    p
}

pub fn legendre(l: usize, x: f64) -> f64 {
    legendre_values(x, l)[l]
}

/// `(P_n(x), P_n'(x))`, valid for `|x| < 1`.
fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss–Legendre nodes (strictly decreasing in `x`) and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let nf = n as f64;
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

/// Chebyshev–Gauss–Lobatto points mapped to `[0, 1]` (increasing) and the
/// matching spectral differentiation matrix, row-major.
pub fn chebyshev_unit_interval(n_points: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n_points >= 2);
    let n = n_points - 1;
    let t: Vec<f64> = (0..=n)
        .map(|k| (std::f64::consts::PI * k as f64 / n as f64).cos())
        .collect();
    let c: Vec<f64> = (0..=n)
        .map(|k| {
            let base = if k == 0 || k == n { 2.0 } else { 1.0 };
            if k % 2 == 0 {
                base
            } else {
                -base
            }
        })
        .collect();
    let m = n + 1;
    let mut d = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            if i != j {
                d[i * m + j] = c[i] / c[j] / (t[i] - t[j]);
            }
        }
        let row_sum: f64 = (0..m).filter(|&j| j != i).map(|j| d[i * m + j]).sum();
        d[i * m + i] = -row_sum;
    }
    // t runs from +1 down to -1; s = (1 - t) / 2 runs from 0 up to 1, ds = -dt / 2.
    let s: Vec<f64> = t.iter().map(|&ti| 0.5 * (1.0 - ti)).collect();
    for v in d.iter_mut() {
        *v *= -2.0;
    }
    (s, d)
}
