//! Gauss–Legendre rules on reference and physical intervals.

/// 4-point Gauss rule on [-1, 1]; exact for polynomials of degree ≤ 7.
pub const GAUSS4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
pub const GAUSS4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_85,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_85,
];

/// Integrates `g` over `[a, b]` with the 4-point rule.
pub fn gauss4(a: f64, b: f64, mut g: impl FnMut(f64) -> f64) -> f64 {
    let (h, m) = (0.5 * (b - a), 0.5 * (a + b));
    GAUSS4_NODES.iter().zip(GAUSS4_WEIGHTS.iter()).map(|(&t, &w)| w * g(m + h * t)).sum::<f64>() * h
}

/// Composite 4-point rule over consecutive breakpoints (assumed sorted).
pub fn gauss4_composite(breaks: &[f64], mut g: impl FnMut(f64) -> f64) -> f64 {
    breaks.windows(2).filter(|w| w[1] > w[0]).map(|w| gauss4(w[0], w[1], &mut g)).sum()
}

/// `n`-point Gauss–Legendre nodes and weights on [-1, 1] (Newton on the three-term recurrence).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Classical (unnormalized) Legendre polynomial `P_n(z)` and its derivative.
fn legendre_and_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss4_exact_to_degree_seven() {
        for p in 0..=7 {
            let exact = (1.0f64.powi(p + 1) - 0.25f64.powi(p + 1)) / (p + 1) as f64;
            let q = gauss4(0.25, 1.0, |x| x.powi(p));
            assert!((q - exact).abs() < 1e-15, "degree {p}");
        }
    }

    #[test]
    fn gauss_legendre_moments() {
        for n in [1usize, 2, 5, 12, 20] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for p in 0..(2 * n) as i32 {
                let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(p)).sum();
                let exact = if p % 2 == 0 { 2.0 / (p + 1) as f64 } else { 0.0 };
                assert!((q - exact).abs() < 1e-13, "n={n} p={p}");
            }
        }
    }
}
