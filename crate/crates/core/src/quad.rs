//! Adaptive Gauss-Kronrod (7/15) quadrature and the periodic trapezoid rule.

use std::f64::consts::PI;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 40;

fn kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let x = h * XGK[i];
        let pair = f(c - x) + f(c + x);
        kron += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Integrates `f` over `[a, b]` by recursive bisection until each piece's
/// Kronrod/Gauss difference falls below its share of the tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> f64 {
    let (whole, _) = kronrod_15(f, a, b);
    let tol = abs_tol.max(rel_tol * whole.abs());
    refine(f, a, b, tol, 0)
}

fn refine<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let (val, err) = kronrod_15(f, a, b);
    if err <= tol || depth >= MAX_DEPTH {
        return val;
    }
    let mid = 0.5 * (a + b);
    refine(f, a, mid, 0.5 * tol, depth + 1) + refine(f, mid, b, 0.5 * tol, depth + 1)
}

/// Integral over one period `[0, 2pi)`, split at the supplied break points so
/// that kinks sit on panel edges.
pub fn integrate_periodic<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], rel_tol: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut edges: Vec<f64> = (0..=8).map(|i| two_pi * i as f64 / 8.0).collect();
    edges.extend(breaks.iter().map(|b| b.rem_euclid(two_pi)));
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let scale: f64 = edges
        .windows(2)
        .map(|w| kronrod_15(f, w[0], w[1]).0.abs())
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);
    let n = (edges.len() - 1) as f64;
    edges
        .windows(2)
        .map(|w| refine(f, w[0], w[1], rel_tol * scale / n, 0))
        .sum()
}

/// Uniform grid `theta_j = 2 pi j / n`.
pub fn periodic_nodes(n: usize) -> Vec<f64> {
    (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
}
