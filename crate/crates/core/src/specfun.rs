//! Special functions used throughout the crate: Bessel functions of the
//! first kind (integer order), their derivatives and positive zeros, and the
//! Gamma function.
//!
//! Everything here is a pure function of its inputs. The zero cache is filled
//! lazily, one order at a time, and is read-only afterwards.

use std::f64::consts::PI;
use std::sync::OnceLock;

use thiserror::Error;

/// Largest Bessel order accepted by the checked entry points.
pub const MAX_ORDER: u32 = 64;

/// Largest zero index accepted by [`bessel_zero`].
pub const MAX_ZERO_INDEX: u32 = 64;

/// Below this argument the ascending power series is used directly.
const SERIES_CUTOFF: f64 = 2.0;

const RESCALE_LIMIT: f64 = 1e250;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("{func}: argument {x} is outside the supported domain")]
    Domain { func: &'static str, x: f64 },
    #[error("{func}: order {order} exceeds the supported ceiling of {MAX_ORDER}")]
    OrderTooLarge { func: &'static str, order: u32 },
    #[error("bessel_zero({order}, {index}): index must lie in 1..={MAX_ZERO_INDEX}")]
    ZeroIndex { order: u32, index: u32 },
    #[error("bessel_zero({order}, {index}): {reason}")]
    Convergence {
        order: u32,
        index: u32,
        reason: String,
    },
}

pub type Result<T> = std::result::Result<T, SpecFunError>;

// Lanczos approximation, g = 7, nine terms.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function for positive real arguments.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecFunError::Domain { func: "gamma", x });
    }
    Ok(gamma_positive(x))
}

fn gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        // reflection keeps the Lanczos sum in its accurate range
        return PI / ((PI * x).sin() * gamma_positive(1.0 - x));
    }
    if x == x.floor() && x <= 21.0 {
        return (1..x as u64).fold(1.0, |acc, k| acc * k as f64);
    }
    let z = x - 1.0;
    let mut sum = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * sum
}

fn check_order(func: &'static str, m: u32) -> Result<()> {
    if m > MAX_ORDER {
        return Err(SpecFunError::OrderTooLarge { func, order: m });
    }
    Ok(())
}

fn check_arg(func: &'static str, x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(SpecFunError::Domain { func, x });
    }
    Ok(())
}

/// Bessel function of the first kind `J_m(x)`.
pub fn bessel_j(m: u32, x: f64) -> Result<f64> {
    check_order("bessel_j", m)?;
    check_arg("bessel_j", x)?;
    Ok(jn(m as usize, x))
}

/// First derivative `J_m'(x)`.
pub fn bessel_j_prime(m: u32, x: f64) -> Result<f64> {
    check_order("bessel_j_prime", m)?;
    check_arg("bessel_j_prime", x)?;
    Ok(jn_prime(m as usize, x))
}

/// Second derivative `J_m''(x)`.
///
/// Evaluated as `(J_{m-2} - 2 J_m + J_{m+2}) / 4`, which equals
/// `-J'/x - (1 - m^2/x^2) J` for `x > 0` and reproduces the series limit at
/// the origin without the `1/x^2` cancellation.
pub fn bessel_j_second(m: u32, x: f64) -> Result<f64> {
    check_order("bessel_j_second", m)?;
    check_arg("bessel_j_second", x)?;
    Ok(jn_second(m as usize, x))
}

/// Unchecked `J_m(x)` for `x >= 0`. Orders slightly above [`MAX_ORDER`] are
/// fine; derivative formulas need `m + 2`.
pub(crate) fn jn(m: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if x < SERIES_CUTOFF {
        return ascending_series(m, x);
    }
    let mut out = vec![0.0; m + 1];
    miller_into(x, &mut out);
    out[m]
}

/// `J_{-k}(x) = (-1)^k J_k(x)`.
fn jn_signed(m: i64, x: f64) -> f64 {
    let v = jn(m.unsigned_abs() as usize, x);
    if m < 0 && m % 2 != 0 {
        -v
    } else {
        v
    }
}

pub(crate) fn jn_prime(m: usize, x: f64) -> f64 {
    if m == 0 {
        return -jn(1, x);
    }
    0.5 * (jn(m - 1, x) - jn(m + 1, x))
}

pub(crate) fn jn_second(m: usize, x: f64) -> f64 {
    let m = m as i64;
    0.25 * (jn_signed(m - 2, x) - 2.0 * jn_signed(m, x) + jn_signed(m + 2, x))
}

/// Fills `out[k] = J_k(x)` for `k = 0..out.len()`.
///
/// One downward recurrence serves every order, which is what the collocation
/// solver needs when it evaluates a whole Fourier-Bessel basis at one point.
pub fn bessel_j_orders_into(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    if x == 0.0 {
        out.fill(0.0);
        out[0] = 1.0;
        return;
    }
    if x < SERIES_CUTOFF {
        for (k, v) in out.iter_mut().enumerate() {
            *v = ascending_series(k, x);
        }
        return;
    }
    miller_into(x, out);
}

fn ascending_series(m: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for i in 1..=m {
        term *= half / i as f64;
    }
    if term == 0.0 {
        return 0.0;
    }
    let q = half * half;
    let mut sum = term;
    let mut k = 0usize;
    loop {
        k += 1;
        term *= -q / (k as f64 * (k + m) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Miller's downward recurrence normalized by `J_0 + 2 sum J_{2k} = 1`.
fn miller_into(x: f64, out: &mut [f64]) {
    let m_max = out.len() - 1;
    let top = (m_max as f64).max(x.ceil());
    let mut start = (top + 30.0 + (60.0 * top).sqrt()) as usize;
    start += start % 2;

    let mut j_next = 0.0;
    let mut j_cur = 1e-30;
    let mut norm = 2.0 * j_cur;
    let two_over_x = 2.0 / x;
    out.fill(0.0);
    for n in (1..=start).rev() {
        let j_prev = n as f64 * two_over_x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        let idx = n - 1;
        if idx <= m_max {
            out[idx] = j_cur;
        }
        if idx == 0 {
            norm += j_cur;
        } else if idx % 2 == 0 {
            norm += 2.0 * j_cur;
        }
        if j_cur.abs() > RESCALE_LIMIT {
            let s = 1.0 / RESCALE_LIMIT;
            j_cur *= s;
            j_next *= s;
            norm *= s;
            if idx <= m_max {
                for v in &mut out[idx..] {
                    *v *= s;
                }
            }
        }
    }
    let inv = 1.0 / norm;
    for v in out.iter_mut() {
        *v *= inv;
    }
}

#[allow(clippy::declare_interior_mutable_const)]
const EMPTY_ORDER: OnceLock<std::result::Result<Vec<f64>, String>> = OnceLock::new();
static ZERO_CACHE: [OnceLock<std::result::Result<Vec<f64>, String>>; MAX_ORDER as usize + 1] =
    [EMPTY_ORDER; MAX_ORDER as usize + 1];

/// `n`-th positive zero of `J_m`.
pub fn bessel_zero(m: u32, n: u32) -> Result<f64> {
    check_order("bessel_zero", m)?;
    if n == 0 || n > MAX_ZERO_INDEX {
        return Err(SpecFunError::ZeroIndex { order: m, index: n });
    }
    let zeros = ZERO_CACHE[m as usize].get_or_init(|| zeros_of_order(m as usize));
    match zeros {
        Ok(z) => Ok(z[n as usize - 1]),
        Err(reason) => Err(SpecFunError::Convergence {
            order: m,
            index: n,
            reason: reason.clone(),
        }),
    }
}

/// Brackets every sign change of `J_m` on a fixed grid starting just above
/// `x = m` (all zeros of `J_m` exceed `m`), then bisects and polishes with
/// Newton steps that are only accepted inside the bracket.
fn zeros_of_order(m: usize) -> std::result::Result<Vec<f64>, String> {
    const STEP: f64 = 0.2;
    let wanted = MAX_ZERO_INDEX as usize;
    let mut zeros = Vec::with_capacity(wanted);
    let mut a = if m == 0 { 0.5 } else { m as f64 };
    let mut fa = jn(m, a);
    let limit = (wanted as f64 + 0.5 * m as f64 + 4.0) * PI;
    while zeros.len() < wanted {
        let b = a + STEP;
        if b > limit {
            return Err(format!(
                "only {} zeros found below x = {limit}",
                zeros.len()
            ));
        }
        let fb = jn(m, b);
        if fa == 0.0 {
            zeros.push(a);
        } else if fa * fb < 0.0 {
            zeros.push(refine_zero(m, a, b, fa)?);
        }
        a = b;
        fa = fb;
    }
    Ok(zeros)
}

fn refine_zero(m: usize, mut a: f64, mut b: f64, mut fa: f64) -> std::result::Result<f64, String> {
    for _ in 0..200 {
        if b - a <= 1e-10 * b {
            break;
        }
        let mid = 0.5 * (a + b);
        let fm = jn(m, mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..4 {
        let d = jn_prime(m, x);
        if d == 0.0 {
            break;
        }
        let next = x - jn(m, x) / d;
        if !(next >= a && next <= b) {
            break;
        }
        if (next - x).abs() <= 1e-16 * x {
            x = next;
            break;
        }
        x = next;
    }
    if !x.is_finite() {
        return Err(format!("refinement diverged in [{a}, {b}]"));
    }
    Ok(x)
}

/// Dense table of Bessel zeros `rho[m][n-1]` for `m <= max_order`,
/// `n <= max_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct BesselZeroTable {
    max_order: u32,
    max_index: u32,
    values: Vec<Vec<f64>>,
}

impl BesselZeroTable {
    pub fn new(max_order: u32, max_index: u32) -> Result<Self> {
        check_order("BesselZeroTable", max_order)?;
        if max_index == 0 || max_index > MAX_ZERO_INDEX {
            return Err(SpecFunError::ZeroIndex {
                order: max_order,
                index: max_index,
            });
        }
        let values = (0..=max_order)
            .map(|m| {
                (1..=max_index)
                    .map(|n| bessel_zero(m, n))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            max_order,
            max_index,
            values,
        })
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn max_index(&self) -> u32 {
        self.max_index
    }

    pub fn get(&self, m: u32, n: u32) -> Option<f64> {
        if n == 0 {
            return None;
        }
        self.values.get(m as usize)?.get(n as usize - 1).copied()
    }

    /// All `(m, n, rho)` triples with `rho` inside `[lo, hi]`, sorted by value.
    pub fn within(&self, lo: f64, hi: f64) -> Vec<(u32, u32, f64)> {
        let mut out: Vec<_> = self
            .values
            .iter()
            .enumerate()
            .flat_map(|(m, row)| {
                row.iter()
                    .enumerate()
                    .map(move |(i, &z)| (m as u32, i as u32 + 1, z))
            })
            .filter(|&(_, _, z)| z >= lo && z <= hi)
            .collect();
        out.sort_by(|a, b| a.2.total_cmp(&b.2));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Independent reference: plain ascending series, summed without any of the
    // production shortcuts, and bisection on it.
    fn series_oracle(m: u32, x: f64) -> f64 {
        let mut sum = 0.0;
        for k in 0..80u32 {
            let mut t = if k % 2 == 0 { 1.0 } else { -1.0 };
            for i in 1..=k {
                t *= (x / 2.0) * (x / 2.0) / (i as f64 * (i + m) as f64);
            }
            for i in 1..=m {
                t *= (x / 2.0) / i as f64;
            }
            sum += t;
        }
        sum
    }

    fn bisect_oracle(m: u32, mut a: f64, mut b: f64) -> f64 {
        let mut fa = series_oracle(m, a);
        for _ in 0..200 {
            let c = 0.5 * (a + b);
            let fc = series_oracle(m, c);
            if fa * fc <= 0.0 {
                b = c;
            } else {
                a = c;
                fa = fc;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn gamma_known_values() {
        assert!((gamma(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
        assert_eq!(gamma(5.0).unwrap(), 24.0);
        assert!((gamma(1.0).unwrap() - 1.0).abs() < 1e-15);
        // 4 * int_0^inf exp(-u^4) du, evaluated with mpmath quadrature
        let g = gamma(0.25).unwrap();
        assert!((g / 3.625_609_908_221_908 - 1.0).abs() < 1e-12, "{g}");
    }

    #[test]
    fn gamma_matches_factorials_up_to_fifty() {
        let mut fact = 1.0f64;
        for n in 1..=50u32 {
            let g = gamma(n as f64).unwrap();
            assert!((g / fact - 1.0).abs() < 1e-12, "n={n}: {g} vs {fact}");
            fact *= n as f64;
        }
    }

    #[test]
    fn gamma_recurrence_on_non_integers() {
        for i in 1..200 {
            let x = 0.013 + 0.247 * i as f64;
            if x + 1.0 > 50.0 {
                break;
            }
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            assert!((lhs / rhs - 1.0).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn gamma_rejects_non_positive() {
        assert!(matches!(gamma(0.0), Err(SpecFunError::Domain { .. })));
        assert!(gamma(-1.5).is_err());
        assert!(gamma(f64::NAN).is_err());
    }

    #[test]
    fn bessel_at_origin() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(3, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j_prime(1, 0.0).unwrap(), 0.5);
        assert_eq!(bessel_j_prime(0, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j_second(0, 0.0).unwrap(), -0.5);
        assert_eq!(bessel_j_second(2, 0.0).unwrap(), 0.25);
        assert_eq!(bessel_j_second(1, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn bessel_against_reference_values() {
        // mpmath besselj at 30 digits
        let cases = [
            (0, 1.5, 0.511_827_671_735_918_1),
            (1, 7.3, 0.082_570_430_493_257_84),
            (5, 12.25, -0.019_313_404_217_825_292),
            (10, 3.0, 1.292_835_164_571_588_4e-5),
            (0, 99.5, -0.019_543_066_407_440_784),
            (20, 55.0, 0.025_389_204_574_566_668),
            (64, 80.0, 0.111_128_330_937_962_54),
            (3, 0.7, 0.006_929_654_826_750_839),
            (64, 10.0, 2.904_936_028_729_109_3e-45),
            (2, 33.3, -0.055_899_317_905_390_315),
        ];
        for (m, x, want) in cases {
            let got = bessel_j(m, x).unwrap();
            assert!(
                (got - want).abs() < 1e-12,
                "J_{m}({x}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn bessel_matches_series_oracle_for_small_arguments() {
        for m in 0..12 {
            for i in 1..40 {
                let x = 0.2 * i as f64;
                let want = series_oracle(m, x);
                let got = bessel_j(m, x).unwrap();
                assert!((got - want).abs() < 1e-13, "J_{m}({x})");
            }
        }
    }

    #[test]
    fn bessel_domain_errors() {
        assert!(matches!(
            bessel_j(0, -1.0),
            Err(SpecFunError::Domain { .. })
        ));
        assert!(matches!(
            bessel_j(65, 1.0),
            Err(SpecFunError::OrderTooLarge { .. })
        ));
        assert!(bessel_j_prime(70, 1.0).is_err());
        assert!(bessel_j_second(0, -0.1).is_err());
        assert!(bessel_zero(65, 1).is_err());
        assert!(matches!(
            bessel_zero(0, 0),
            Err(SpecFunError::ZeroIndex { .. })
        ));
        assert!(bessel_zero(0, 65).is_err());
    }

    #[test]
    fn first_derivative_identities() {
        for i in 0..50 {
            let x = 0.37 * i as f64;
            assert_eq!(bessel_j_prime(0, x).unwrap(), -bessel_j(1, x).unwrap());
        }
    }

    #[test]
    fn second_derivative_at_a_zero_of_j0() {
        let rho = bessel_zero(0, 1).unwrap();
        let want = -bessel_j_prime(0, rho).unwrap() / rho;
        assert!((bessel_j_second(0, rho).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn first_zeros_match_bisection_on_series() {
        let cases = [
            (0, 1, 2.0, 3.0),
            (1, 1, 3.5, 4.0),
            (2, 1, 5.0, 5.5),
            (0, 2, 5.0, 6.0),
            (3, 1, 6.0, 6.5),
        ];
        for (m, n, a, b) in cases {
            let want = bisect_oracle(m, a, b);
            let got = bessel_zero(m, n).unwrap();
            assert!((got - want).abs() < 1e-12, "j_{m},{n}: {got} vs {want}");
        }
        assert!((bessel_zero(0, 1).unwrap() - 2.404_825_557_695_773).abs() < 1e-13);
        assert!((bessel_zero(1, 1).unwrap() - 3.831_705_970_207_512).abs() < 1e-13);
        assert!((bessel_zero(2, 1).unwrap() - 5.135_622_301_840_683).abs() < 1e-13);
    }

    #[test]
    fn far_zeros_against_reference() {
        // mpmath besseljzero
        let cases = [
            (10, 10, 45.231_574_103_535_045),
            (64, 64, 293.809_502_855_317_52),
            (0, 64, 200.277_155_793_332_4),
        ];
        for (m, n, want) in cases {
            let got = bessel_zero(m, n).unwrap();
            assert!((got - want).abs() < 1e-10, "j_{m},{n} = {got}");
        }
    }

    #[test]
    fn zeros_are_roots_with_sign_change() {
        for m in 0..=MAX_ORDER {
            for n in 1..=MAX_ZERO_INDEX {
                let z = bessel_zero(m, n).unwrap();
                assert!(jn(m as usize, z).abs() <= 1e-12, "J_{m}(j_{m},{n})");
                if m <= 10 && n <= 10 {
                    let l = jn(m as usize, z - 1e-6);
                    let r = jn(m as usize, z + 1e-6);
                    assert!(l * r < 0.0);
                }
            }
        }
    }

    #[test]
    fn table_is_increasing_and_interlaced() {
        let t = BesselZeroTable::new(11, 11).unwrap();
        for m in 0..=10 {
            for n in 1..=10 {
                let a = t.get(m, n).unwrap();
                assert!(a < t.get(m, n + 1).unwrap());
                assert!(a < t.get(m + 1, n).unwrap());
                assert!(t.get(m + 1, n).unwrap() < t.get(m, n + 1).unwrap());
            }
        }
        assert_eq!(t.get(0, 0), None);
        assert_eq!(t.get(12, 1), None);
        let low = t.within(0.0, 5.2);
        let labels: Vec<_> = low.iter().map(|&(m, n, _)| (m, n)).collect();
        assert_eq!(labels, vec![(0, 1), (1, 1), (2, 1)]);
    }

    #[test]
    fn orders_into_matches_single_order() {
        let mut buf = vec![0.0; 31];
        for &x in &[0.0, 0.3, 1.99, 2.0, 7.7, 42.0] {
            bessel_j_orders_into(x, &mut buf);
            for (m, &v) in buf.iter().enumerate() {
                assert!((v - jn(m, x)).abs() < 1e-15, "m={m} x={x}");
            }
        }
    }

    proptest! {
        #[test]
        fn three_term_recurrence(x in 0.01f64..50.0, m in 1u32..=10) {
            let lhs = bessel_j(m - 1, x).unwrap() + bessel_j(m + 1, x).unwrap();
            let rhs = 2.0 * m as f64 / x * bessel_j(m, x).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }

        #[test]
        fn second_derivative_matches_finite_difference(x in 0.5f64..40.0, m in 0u32..=10) {
            let h = 1e-5;
            let fd = (bessel_j_prime(m, x + h).unwrap() - bessel_j_prime(m, x - h).unwrap()) / (2.0 * h);
            prop_assert!((bessel_j_second(m, x).unwrap() - fd).abs() < 1e-6);
        }

        #[test]
        fn second_derivative_satisfies_bessel_ode(x in 0.5f64..60.0, m in 0u32..=20) {
            let j = bessel_j(m, x).unwrap();
            let jp = bessel_j_prime(m, x).unwrap();
            let ode = -jp / x - (1.0 - (m * m) as f64 / (x * x)) * j;
            prop_assert!((bessel_j_second(m, x).unwrap() - ode).abs() < 1e-12);
        }
    }
}
