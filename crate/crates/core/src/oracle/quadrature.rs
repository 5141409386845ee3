//! Reference quadrature: exact-degree Gauss–Legendre moments and an adaptive
//! Gauss–Kronrod rule that respects breakpoints.

use std::f64::consts::PI;

/// Kronrod nodes (positive half, descending) of the 15-point rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Weights of the embedded 7-point Gauss rule (nodes `XGK[1], XGK[3], XGK[5], XGK[7]`).
const WG: [f64; 4] = [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

const MAX_DEPTH: u32 = 40;

/// Classical Legendre `P_n(y)` and `P_{n-1}(y)` by the Bonnet recursion.
fn legendre_pair(n: usize, y: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, y);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * y * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// `n`-point Gauss–Legendre nodes and weights on `[-1, 1]` (weights sum to 2).
pub fn gauss_legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut y = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, q) = legendre_pair(n, y);
            let dp = n as f64 * (y * p - q) / (y * y - 1.0);
            let step = p / dp;
            y -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (p, q) = legendre_pair(n, y);
        let dp = n as f64 * (y * p - q) / (y * y - 1.0);
        x[i] = y;
        w[i] = 2.0 / ((1.0 - y * y) * dp * dp);
    }
    (x, w)
}

/// `L_n = √(2n+1) P_n`, orthonormal for the uniform probability measure on `[-1, 1]`.
pub fn legendre_orthonormal(n: usize, y: f64) -> f64 {
    ((2 * n + 1) as f64).sqrt() * legendre_pair(n, y).0
}

/// `∫ y L_m(y) L_n(y) dσ(y)` with `dσ = dy/2`, by a Gauss rule exact for the integrand degree.
///
/// # Panics
/// For degrees above 30.
pub fn gauss_legendre_moment(m: usize, n: usize) -> f64 {
    assert!(m <= 30 && n <= 30, "moment degrees above 30");
    let pts = (m + n).div_ceil(2) + 1;
    let (x, w) = gauss_legendre_rule(pts);
    x.iter().zip(&w).map(|(&y, &wi)| 0.5 * wi * y * legendre_orthonormal(m, y) * legendre_orthonormal(n, y)).sum()
}

fn kronrod(g: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = g(c);
    let mut k = WGK[7] * fc;
    let mut gs = WG[3] * fc;
    for i in 0..7 {
        let s = g(c - h * XGK[i]) + g(c + h * XGK[i]);
        k += WGK[i] * s;
        if i % 2 == 1 {
            gs += WG[i / 2] * s;
        }
    }
    (k * h, (k - gs).abs() * h)
}

fn adapt(g: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (v, err) = kronrod(g, a, b);
    if err <= tol || depth >= MAX_DEPTH || b - a < 1e-15 {
        return v;
    }
    let m = 0.5 * (a + b);
    adapt(g, a, m, 0.5 * tol, depth + 1) + adapt(g, m, b, 0.5 * tol, depth + 1)
}

/// `∫_a^b g` to absolute tolerance about 1e-13 by recursive 7/15-point Gauss–Kronrod.
pub fn adaptive_quadrature(g: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    adaptive_quadrature_with_breaks(g, a, b, &[])
}

/// As [`adaptive_quadrature`], first splitting `(a, b)` at the given kinks and jumps.
pub fn adaptive_quadrature_with_breaks(g: impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64]) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let tol = 1e-13 / (pts.len() - 1) as f64;
    pts.windows(2).map(|w| adapt(&g, w[0], w[1], tol, 0)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_is_exact() {
        let (x, w) = gauss_legendre_rule(6);
        for d in 0..12 {
            let q: f64 = x.iter().zip(&w).map(|(y, wi)| wi * y.powi(d)).sum();
            let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d + 1) as f64 };
            assert!((q - exact).abs() < 1e-14, "degree {d}");
        }
    }

    #[test]
    fn moments() {
        assert!((gauss_legendre_moment(0, 1) - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!(gauss_legendre_moment(3, 3).abs() < 1e-15);
        assert!(gauss_legendre_moment(2, 5).abs() < 1e-15);
    }

    #[test]
    fn kronrod_handles_kinks() {
        let v = adaptive_quadrature_with_breaks(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[0.3]);
        assert!((v - (0.09 + 0.49) / 2.0).abs() < 1e-14);
        let v = adaptive_quadrature(|x: f64| (x - 0.3).abs(), 0.0, 1.0);
        assert!((v - 0.29).abs() < 1e-12);
        let v = adaptive_quadrature(f64::sin, 0.0, PI);
        assert!((v - 2.0).abs() < 1e-13);
    }
}
