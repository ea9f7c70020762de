//! Small deterministic numerics shared across the crate: quasi-random
//! sequences, compensated summation order, extrapolation, root bracketing.

/// Halton low-discrepancy sequence in the unit cube. `index` starts the
/// stream; identical (index, dim) always reproduces the same points.
pub fn halton(index: usize, dim: usize) -> Vec<f64> {
    const PRIMES: [usize; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    assert!(dim <= PRIMES.len());
    (0..dim)
        .map(|d| van_der_corput(index + 1, PRIMES[d]))
        .collect()
}

fn van_der_corput(mut n: usize, base: usize) -> f64 {
    let mut q = 0.0;
    let mut bk = 1.0 / base as f64;
    while n > 0 {
        q += (n % base) as f64 * bk;
        n /= base;
        bk /= base as f64;
    }
    q
}

/// Maps unit-cube samples into a box, keeping a relative margin away from
/// each face (margin 0.1 shrinks every interval by 10% per side).
pub fn into_box(unit: &[f64], lo_hi: &[(f64, f64)], margin: f64) -> Vec<f64> {
    unit.iter()
        .zip(lo_hi)
        .map(|(u, (lo, hi))| lo + (hi - lo) * (margin + (1.0 - 2.0 * margin) * u))
        .collect()
}

/// Pairwise (cascade) summation in a fixed order; deterministic and
/// accurate to O(log n) rounding.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Richardson extrapolation for samples f(h), f(h/r), f(h/r^2), ... with a
/// known ladder of correction powers. `values` is ordered largest h first;
/// stage k eliminates the h^powers[k] term. Returns the final accelerated
/// estimate (uses as many stages as data allows).
pub fn richardson(values: &[f64], ratio: f64, powers: &[usize]) -> f64 {
    assert!(!values.is_empty());
    let mut col: Vec<f64> = values.to_vec();
    let stages = (values.len() - 1).min(powers.len());
    for &p in powers.iter().take(stages) {
        let w = ratio.powi(p as i32);
        let mut next = Vec::with_capacity(col.len() - 1);
        for i in 0..col.len() - 1 {
            next.push((w * col[i + 1] - col[i]) / (w - 1.0));
        }
        col = next;
    }
    *col.last().unwrap()
}

/// Bisection for a sign change of `f` on [a, b]; refines until the bracket
/// is narrower than `tol`. Panics if the endpoints do not bracket a root.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let (fa, fb) = (f(a), f(b));
    assert!(
        fa.signum() != fb.signum() && fa.is_finite() && fb.is_finite(),
        "bisect: no sign change on [{a}, {b}]"
    );
    let descending = fa > 0.0;
    while (b - a) > tol {
        let m = 0.5 * (a + b);
        let fm = f(m);
        let positive = fm > 0.0;
        if positive == descending {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Nodes and weights of the m-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        // Tricomi initial guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
        let (_, d) = legendre_with_derivative(m, 0.0);
        weights[m / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_is_deterministic_and_in_range() {
        let a = halton(17, 3);
        let b = halton(17, 3);
        assert_eq!(a, b);
        assert!(a.iter().all(|&u| (0.0..1.0).contains(&u)));
        assert_ne!(halton(18, 3), a);
    }

    #[test]
    fn box_margin() {
        let p = into_box(&[0.0, 1.0], &[(0.0, 10.0), (2.0, 4.0)], 0.1);
        assert!((p[0] - 1.0).abs() < 1e-12);
        assert!((p[1] - 3.8).abs() < 1e-12);
    }

    #[test]
    fn richardson_kills_leading_powers() {
        // f(h) = 1 + h + h^2 sampled at h = 0.4, 0.2, 0.1.
        let f = |h: f64| 1.0 + h + h * h;
        let vals = [f(0.4), f(0.2), f(0.1)];
        let r = richardson(&vals, 2.0, &[1, 2]);
        assert!((r - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bisect_cubic() {
        // r^3 + r - 1 = 0 has its root near 0.6823278.
        let root = bisect(|r| r * r * r + r - 1.0, 0.0, 1.0, 1e-13);
        assert!((root - 0.682_327_803_8).abs() < 1e-9);
    }

    #[test]
    fn gauss_legendre_exactness() {
        let (x, w) = gauss_legendre(5);
        // Integrates x^8 over [-1,1] exactly (degree 9 rule): 2/9.
        let int: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(8)).sum();
        assert!((int - 2.0 / 9.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn pairwise_sum_matches_exact() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499_500.0);
    }
}
