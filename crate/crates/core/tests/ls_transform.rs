use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

use tauber_core::dist::Distribution;
use tauber_core::ls_transform::*;
use tauber_core::numerics::geomspace;
use tauber_core::numerics::quad::{integrate, integrate_to_infinity, QuadConfig};
use tauber_core::numerics::special::factorial;
use tauber_core::Error;

const CANDIDATES: [f64; 6] = [0.5, 1.0, 1.5, 2.0, 2.5, 3.0];

fn real_samples(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> Vec<ComplexSample> {
    geomspace(lo, hi, n)
        .into_iter()
        .map(|s| ComplexSample {
            s: Complex64::new(s, 0.0),
            value: Complex64::new(f(s), 0.0),
        })
        .collect()
}

fn phi_samples(d: &Distribution) -> Vec<ComplexSample> {
    phi_samples_on(d, 1e-2)
}

fn phi_samples_on(d: &Distribution, eps: f64) -> Vec<ComplexSample> {
    let s: Vec<Complex64> = geomspace(eps * 1e-2, eps, 40)
        .into_iter()
        .map(|x| Complex64::new(x, 0.0))
        .collect();
    sample_phi(d, &s, 1e-13).unwrap()
}

/// Singular constant of L(t^{−(r+1)}Δ_1) read off from the (r+1)-th
/// derivative: φ^{(r+1)}(s) = (−1)^{r+1}∫_1^∞ e^{−st}dt, and
/// (s^r log s)^{(r+1)} = r!/s, so c_r = lim s·φ^{(r+1)}(s)/r!.
fn power_log_oracle(r: u32) -> f64 {
    let s = 1e-7;
    let cfg = QuadConfig::new(1e-300, 1e-12);
    let inner = integrate_to_infinity(|t: f64| (-s * t).exp(), 1.0, cfg).unwrap().value;
    let sign = if (r + 1) % 2 == 0 { 1.0 } else { -1.0 };
    sign * s * inner / factorial(r)
}

#[test]
fn power_log_constant_matches_derivative_oracle() {
    let c1 = power_log_oracle(1);
    println!("singular coefficient of s log s for density t^-2: {c1:+.9}");
    assert!((c1 - 1.0).abs() < 1e-6);
    assert!((power_log_coefficient(1) - c1).abs() < 1e-6);
    let c2 = power_log_oracle(2);
    assert!((c2 + 0.5).abs() < 1e-6);
    assert!((power_log_coefficient(2) - c2).abs() < 1e-6);
    assert!((power_log_coefficient(3) - power_log_oracle(3)).abs() < 1e-6);
}

#[test]
fn pure_power_constant_matches_derivative_fit() {
    // φ'(s) = −∫_1^∞ t^{−r} e^{−st} dt for density t^{−(r+1)}; its singular
    // part is r·c·s^{r−1}. For r = 1/2 the remainder is analytic, so a fit
    // of c·r·s^{−1/2} + b0 + b1 s on tiny s isolates c.
    for (r, expect) in [(0.5, -2.0 * PI.sqrt()), (1.5, 4.0 * PI.sqrt() / 3.0)] {
        let cfg = QuadConfig::new(1e-300, 1e-13);
        let dphi = |s: f64| {
            -integrate_to_infinity(|t: f64| t.powf(-r) * (-s * t).exp(), 1.0, cfg)
                .unwrap()
                .value
        };
        // Second difference in s kills the constant and linear terms:
        // for r=3/2 the singular part of φ' is r·c·s^{1/2}.
        let (s1, s2, s3) = (1e-6, 4e-6, 16e-6);
        let f = |s: f64| dphi(s);
        let pw = r - 1.0;
        let g = |s: f64| s.powf(pw);
        // Solve c·r·g(s_i) + b0 + b1 s_i = f(s_i), i = 1..3.
        let a = nalgebra::Matrix3::new(
            r * g(s1), 1.0, s1,
            r * g(s2), 1.0, s2,
            r * g(s3), 1.0, s3,
        );
        let rhs = nalgebra::Vector3::new(f(s1), f(s2), f(s3));
        let sol = a.lu().solve(&rhs).unwrap();
        assert!((sol[0] - expect).abs() < 1e-3 * expect.abs(), "r={r}: {} vs {expect}", sol[0]);
        assert!((pure_power_coefficient(r) - sol[0]).abs() < 1e-3 * expect.abs());
    }
}

#[test]
fn power_log_plus_fitted_remainder_reproduces_phi() {
    // Pareto r=1: φ(s) − c_1 s log s is analytic; a quadratic fit on
    // [0.005, 0.05] leaves an O(s² log s) residual.
    let d = Distribution::pareto(1.0).unwrap();
    let s = geomspace(0.005, 0.05, 30);
    let y: Vec<f64> = s
        .iter()
        .map(|&x| {
            let v = phi_quadrature(&d, Complex64::new(x, 0.0), 1e-13).unwrap().re;
            v - canonical_power_log(1.0, Complex64::new(x, 0.0)).unwrap().re
        })
        .collect();
    let a = nalgebra::DMatrix::from_fn(s.len(), 3, |i, j| s[i].powi(j as i32));
    let fit = tauber_core::numerics::lstsq::lstsq(&a, &y, 1e12).unwrap();
    let sm = 0.01;
    let phi = phi_quadrature(&d, Complex64::new(sm, 0.0), 1e-13).unwrap().re;
    let rebuilt = canonical_power_log(1.0, Complex64::new(sm, 0.0)).unwrap().re
        + fit.coeffs[0]
        + fit.coeffs[1] * sm
        + fit.coeffs[2] * sm * sm;
    assert!((rebuilt - phi).abs() < 5.0 * sm * sm * sm.ln().abs());
}

#[test]
fn oracle_agreement_on_decade_window() {
    // canonical part + exact analytic remainder vs quadrature, relative 1e-4
    // on s ∈ [1e-3, 1e-1].
    for d in [
        Distribution::pareto(1.0).unwrap(),
        Distribution::pareto(2.0).unwrap(),
        Distribution::pareto(0.5).unwrap(),
        Distribution::zeta_diff(2).unwrap(),
    ] {
        let form = catalog_form(&d, 6).unwrap();
        for s in geomspace(1e-3, 1e-1, 9) {
            let s = Complex64::new(s, 0.0);
            let v = phi_quadrature(&d, s, 1e-13).unwrap();
            assert!((form.eval(s) - v).norm() < 1e-4 * v.norm(), "{d:?} at {s}");
        }
    }
}

#[test]
fn canonical_forms_are_real_on_unit_interval() {
    for s in [0.01, 0.3, 0.99] {
        let z = Complex64::new(s, 0.0);
        assert_eq!(canonical_power_log(2.0, z).unwrap().im, 0.0);
        assert_eq!(canonical_pure_power(1.5, z).unwrap().im, 0.0);
    }
}

#[test]
fn fit_recovers_generator() {
    let samples = real_samples(|s| s * s.ln() + 1.0 - s, 1e-4, 1e-2, 30);
    let fit = fit_singularity(&samples, &[1.0, 2.0, 0.5], 2).unwrap();
    assert_eq!(fit.form.kind, SingularityKind::PowerLog);
    assert_eq!(fit.form.r, 1.0);
    assert!((fit.form.alpha[0] - 1.0).abs() < 1e-6);
}

#[test]
fn fit_pareto_one() {
    let fit = fit_singularity(&phi_samples(&Distribution::pareto(1.0).unwrap()), &CANDIDATES, 3)
        .unwrap();
    assert_eq!(fit.form.r, 1.0);
    assert!((fit.form.alpha[0] - 1.0).abs() < 1e-2, "{:?}", fit.form);
}

#[test]
fn fit_pareto_half() {
    let fit = fit_singularity(&phi_samples(&Distribution::pareto(0.5).unwrap()), &CANDIDATES, 3)
        .unwrap();
    assert_eq!(fit.form.kind, SingularityKind::PurePower);
    assert_eq!(fit.form.r, 0.5);
    assert!((fit.form.alpha[0] + PI.sqrt()).abs() < 2e-2, "{:?}", fit.form);
}

#[test]
fn fit_catalog_matches_closed_forms() {
    for (d, order) in [
        (Distribution::pareto(1.5).unwrap(), 3),
        (Distribution::pareto(2.0).unwrap(), 3),
        (Distribution::zeta_diff(1).unwrap(), 3),
        (Distribution::zeta_diff(2).unwrap(), 3),
        (Distribution::zeta_diff(3).unwrap(), 3),
    ] {
        // s³ log s is invisible under rounding noise on a window ending at 1e-2.
        let eps = if d.r() >= 3.0 { 1e-1 } else { 1e-2 };
        let fit = fit_singularity(&phi_samples_on(&d, eps), &CANDIDATES, order).unwrap();
        let exact = catalog_form(&d, order).unwrap();
        assert_eq!(fit.form.r, d.r(), "{d:?}");
        let rel = (fit.form.alpha[0] - exact.alpha[0]).abs() / exact.alpha[0].abs();
        // The wider r=3 window pays O(ε) truncation bias.
        let tol = if d.r() >= 3.0 { 5e-3 } else { 1e-4 };
        assert!(rel < tol, "{d:?}: {:?} vs {:?}", fit.form.alpha, exact.alpha);
        assert!((fit.form.beta[0] - 1.0).abs() < 1e-8);
        assert!(sign_check(&fit.form).pass);
    }
}

#[test]
fn ambiguous_and_ill_posed_inputs() {
    // Pure polynomial data: no singular term, every candidate fits to rounding.
    let samples = real_samples(|s| 1.0 - 2.0 * s, 1e-4, 1e-2, 30);
    let err = fit_singularity(&samples, &[0.5, 1.5], 2).unwrap_err();
    assert!(matches!(err, Error::Ambiguous { .. }), "{err:?}");

    let few = real_samples(|s| s, 1e-4, 1e-2, 10);
    assert!(matches!(fit_singularity(&few, &[1.0], 2), Err(Error::Domain(_))));
    let narrow = real_samples(|s| s, 1e-3, 5e-3, 30);
    assert!(matches!(fit_singularity(&narrow, &[1.0], 2), Err(Error::Domain(_))));
    // Far too many coefficients for the window: the design is singular.
    let many = real_samples(|s| s * s.ln(), 1e-4, 1e-3, 40);
    assert!(matches!(fit_singularity(&many, &[1.0], 12), Err(Error::Numeric(_))));
}

#[test]
fn derivative_parity_of_power_log_members() {
    // φ^{(r)}(s) ~ r!·α_0·log s, so it diverges to −∞·sign((−1)^{r+1}).
    for r in 1..=3u32 {
        let d = Distribution::pareto(r as f64).unwrap();
        let cfg = QuadConfig::new(1e-300, 1e-12);
        let deriv = |s: f64| {
            let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
            sign * r as f64
                * integrate_to_infinity(|t: f64| t.powi(-1) * (-s * t).exp(), 1.0, cfg)
                    .unwrap()
                    .value
        };
        let a = deriv(1e-3);
        let b = deriv(1e-6);
        let expected = if r % 2 == 1 { -1.0 } else { 1.0 };
        assert!((b - a) * expected > 0.0 && b.abs() > a.abs(), "r={r}");
        let _ = d;
    }
}

#[test]
fn derivative_parity_from_quadrature_differences() {
    // Same statement checked from φ itself for r=1 via a second difference.
    let d = Distribution::pareto(1.0).unwrap();
    let phi = |s: f64| phi_quadrature(&d, Complex64::new(s, 0.0), 1e-13).unwrap().re;
    let second = |s: f64| {
        let h = s * 1e-2;
        (phi(s + h) - 2.0 * phi(s) + phi(s - h)) / (h * h)
    };
    // φ'' ≈ 1/s > 0 grows without bound (α_0 > 0 makes φ' ~ log s → −∞).
    assert!(second(1e-4) > second(1e-2));
    let exact = integrate(|t: f64| (-1e-2 * t).exp(), 1.0, 1e4, QuadConfig::default()).unwrap();
    assert!((second(1e-2) - exact.value).abs() < 1e-2 * exact.value);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fit_round_trip(
        ri in 0usize..6,
        order in 1usize..=3,
        a0 in 0.3f64..3.0,
        neg in any::<bool>(),
        rest in proptest::collection::vec(-2.0f64..2.0, 6),
    ) {
        let r = CANDIDATES[ri];
        let a0 = if neg { -a0 } else { a0 };
        let mut alpha = vec![a0];
        alpha.extend_from_slice(&rest[..order - 1]);
        let mut beta = vec![1.0];
        beta.extend_from_slice(&rest[3..3 + order - 1]);
        let form = SingularityForm::new(r, alpha, beta).unwrap();
        // ε = 0.1: at ε = 0.01 an s³ log s term sits only ~1e-10 above rounding.
        let samples = real_samples(|s| form.eval(Complex64::new(s, 0.0)).re, 1e-3, 1e-1, 40);
        let fit = fit_singularity(&samples, &CANDIDATES, order).unwrap();
        prop_assert_eq!(fit.form.r, r);
        prop_assert!((fit.form.alpha[0] - a0).abs() < 1e-6, "{:?} vs {:?}", fit.form, form);
    }
}
