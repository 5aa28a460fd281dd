//! Real special functions: gamma family, polygamma, Riemann zeta, and the
//! `sin`-kernels used by the extremal functions.

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
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

/// Gamma function for real arguments (Lanczos, with reflection below 1/2).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS[0];
        let t = x + LANCZOS_G + 0.5;
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// `n!` as a float.
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Digamma ψ(x) for x > 0.
pub fn digamma(mut x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut acc = 0.0;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    acc + x.ln() - 0.5 / x
        - x2 * (1.0 / 12.0
            - x2 * (1.0 / 120.0 - x2 * (1.0 / 252.0 - x2 * (1.0 / 240.0 - x2 * (1.0 / 132.0)))))
}

/// Trigamma ψ'(x) for x > 0.
pub fn trigamma(mut x: f64) -> f64 {
    debug_assert!(x > 0.0);
    let mut acc = 0.0;
    while x < 10.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let x2 = 1.0 / (x * x);
    acc + 1.0 / x
        + 0.5 * x2
        + (1.0 / x)
            * x2
            * (1.0 / 6.0
                - x2 * (1.0 / 30.0 - x2 * (1.0 / 42.0 - x2 * (1.0 / 30.0 - x2 * (5.0 / 66.0)))))
}

/// Riemann zeta ζ(s) for real s > 1 (Euler–Maclaurin with N = 10).
pub fn zeta(s: f64) -> f64 {
    debug_assert!(s > 1.0);
    const N: usize = 10;
    // B_{2k}/(2k)!
    const B: [f64; 6] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30_240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
        -691.0 / 1_307_674_368_000.0,
    ];
    let n = N as f64;
    let mut sum: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // Rising products s(s+1)...(s+2k-2) times N^{-s-2k+1}.
    let mut rising = s;
    let mut npow = n.powf(-s - 1.0);
    for (k, b) in B.iter().enumerate() {
        sum += b * rising * npow;
        let j = 2.0 * k as f64;
        rising *= (s + j + 1.0) * (s + j + 2.0);
        npow /= n * n;
    }
    sum
}

/// `sin(πt)` computed with argument reduction so that integers give exact zeros.
pub fn sin_pi(t: f64) -> f64 {
    let r = t - 2.0 * (t / 2.0).round();
    // r in [-1, 1]
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    if r.abs() <= 0.5 {
        (PI * r).sin()
    } else {
        let s = if r > 0.0 { 1.0 - r } else { -1.0 - r };
        (PI * s).sin()
    }
}

/// `sin(πx)/(πx)` with its removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let y = PI * x;
        let y2 = y * y;
        1.0 - y2 / 6.0 + y2 * y2 / 120.0
    } else {
        sin_pi(x) / (PI * x)
    }
}

/// The Fejér kernel `q₁(t) = (sin πt / πt)²`.
pub fn q1(t: f64) -> f64 {
    let s = sinc(t);
    s * s
}

/// `q₂(t) = sin²(πt)/(πt)`.
pub fn q2(t: f64) -> f64 {
    sin_pi(t) * sinc(t)
}

/// Bernoulli numbers `B_0..=B_n` (convention `B_1 = −1/2`) from
/// `Σ_{k=0}^{m} C(m+1, k) B_k = 0`. Adequate in double precision for `n ≲ 30`.
pub fn bernoulli(n: usize) -> Vec<f64> {
    let mut b = vec![1.0];
    for m in 1..=n {
        let mut acc = 0.0;
        let mut binom = 1.0; // C(m+1, k)
        for (k, bk) in b.iter().enumerate() {
            acc += binom * bk;
            binom *= (m + 1 - k) as f64 / (k + 1) as f64;
        }
        // binom is now C(m+1, m) = m+1
        b.push(if m % 2 == 1 && m > 1 { 0.0 } else { -acc / binom });
    }
    b
}

/// ζ(s) at integer arguments `s ≠ 1`, including the trivial-zero region.
pub fn zeta_int(s: i32) -> f64 {
    match s {
        1 => f64::INFINITY,
        s if s > 1 => zeta(s as f64),
        0 => -0.5,
        s => {
            // ζ(−m) = −B_{m+1}/(m+1)
            let m = (-s) as usize;
            -bernoulli(m + 1)[m + 1] / (m as f64 + 1.0)
        }
    }
}

/// Harmonic number `H_n`.
pub fn harmonic(n: u32) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(5.0) - 24.0).abs() < 1e-11);
        assert!((gamma(1.5) - 0.5 * PI.sqrt()).abs() < 1e-14);
        assert!((gamma(2.5) - 0.75 * PI.sqrt()).abs() < 1e-14);
        assert!((gamma(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn digamma_values() {
        let euler = 0.577_215_664_901_532_9;
        assert!((digamma(1.0) + euler).abs() < 1e-13);
        assert!((digamma(3.0) - (1.5 - euler)).abs() < 1e-13);
    }

    #[test]
    fn trigamma_values() {
        assert!((trigamma(1.0) - PI * PI / 6.0).abs() < 1e-13);
        assert!((trigamma(0.5) - PI * PI / 2.0).abs() < 1e-12);
        // reflection ψ'(1−z) + ψ'(z) = π²/sin²(πz)
        let z = 0.3;
        let lhs = trigamma(1.0 - z) + trigamma(z);
        assert!((lhs - PI * PI / (PI * z).sin().powi(2)).abs() < 1e-11);
    }

    #[test]
    fn zeta_values() {
        assert!((zeta(2.0) - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta(4.0) - PI.powi(4) / 90.0).abs() < 1e-14);
        assert!((zeta(3.0) - 1.202_056_903_159_594_2).abs() < 1e-14);
        assert!((zeta(1.5) - 2.612_375_348_685_488).abs() < 1e-13);
    }

    #[test]
    fn sin_pi_is_exact_at_integers() {
        for n in -5..=5 {
            assert_eq!(sin_pi(n as f64), 0.0);
        }
        assert!((sin_pi(0.5) - 1.0).abs() < 1e-16);
        assert!((sin_pi(-1.5) - 1.0).abs() < 1e-15);
        assert!((sin_pi(2.25) - (PI / 4.0).sin()).abs() < 1e-15);
    }

    #[test]
    fn kernels_near_zero() {
        assert!((q1(0.0) - 1.0).abs() < 1e-16);
        assert!(q2(0.0).abs() < 1e-16);
        let t = 1e-5;
        assert!((q1(t) - ((PI * t).sin() / (PI * t)).powi(2)).abs() < 1e-14);
    }

    #[test]
    fn bernoulli_and_negative_zeta() {
        let b = bernoulli(10);
        assert!((b[2] - 1.0 / 6.0).abs() < 1e-15);
        assert!((b[4] + 1.0 / 30.0).abs() < 1e-15);
        assert!((b[10] - 5.0 / 66.0).abs() < 1e-13);
        assert!(b[3].abs() < 1e-15);
        assert!((zeta_int(-1) + 1.0 / 12.0).abs() < 1e-15);
        assert!((zeta_int(-3) - 1.0 / 120.0).abs() < 1e-15);
        assert!(zeta_int(-2).abs() < 1e-15);
        assert_eq!(zeta_int(0), -0.5);
        assert!((harmonic(3) - 11.0 / 6.0).abs() < 1e-15);
    }
}
