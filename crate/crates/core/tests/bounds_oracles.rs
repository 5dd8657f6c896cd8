use anytime::bounds::{self, ChannelSpec};
use anytime::estimation::companion;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_coeffs(r: &mut ChaCha8Rng, max_m: usize) -> Vec<f64> {
    let m = r.random_range(1..=max_m);
    (0..m).map(|_| r.random_range(-3.0..3.0)).collect()
}

/// Eigenvalue moduli of the companion matrix with first column `-a`, from
/// nalgebra's Schur decomposition.
fn eig_radius(first_column: &[f64]) -> f64 {
    let f: DMatrix<f64> = companion(first_column);
    f.complex_eigenvalues().iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn neg(a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| -x).collect()
}

fn abs(a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| x.abs()).collect()
}

#[test]
fn spectral_radius_agrees_with_eigenvalues() {
    let mut r = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..200 {
        let a = random_coeffs(&mut r, 6);
        let lambda = bounds::spectral_radius(&a).unwrap();
        let oracle = eig_radius(&neg(&a));
        assert!((lambda - oracle).abs() <= 1e-6 * oracle.max(1.0), "{a:?}: {lambda} vs {oracle}");
        let lambda_abs = bounds::nonneg_radius(&abs(&a));
        let oracle_abs = eig_radius(&abs(&a));
        assert!((lambda_abs - oracle_abs).abs() <= 1e-6 * oracle_abs.max(1.0));
    }
}

#[test]
fn roots_have_small_residuals() {
    let mut r = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let a = random_coeffs(&mut r, 6);
        let scale = 1.0 + a.iter().map(|x| x.abs()).sum::<f64>();
        for z in bounds::polynomial_roots(&a).unwrap() {
            // Horner evaluation of z^m + a_1 z^{m-1} + ... + a_m.
            let mut acc = num_complex::Complex64::new(1.0, 0.0);
            for &c in &a {
                acc = acc * z + c;
            }
            let zpow = z.norm().max(1.0).powi(a.len() as i32);
            assert!(acc.norm() <= 1e-6 * scale * zpow);
        }
    }
}

#[test]
fn sandwiches_hold() {
    let mut r = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let a = random_coeffs(&mut r, 6);
        let m = a.len() as f64;
        let rep = bounds::spectral_report(&a).unwrap();
        let tol = 1e-9 * rep.lambda_abs.max(1.0);
        assert!(rep.lambda <= rep.fujiwara + tol, "{a:?}");
        assert!(rep.fujiwara <= 2.0 * rep.lambda_abs + tol, "{a:?}");
        assert!(rep.lambda <= rep.lambda_abs + tol, "{a:?}");
        assert!(rep.lambda_abs <= rep.lambda / (m.recip().exp2() - 1.0) + tol, "{a:?}");
    }
}

#[test]
fn companion_identity_feedback_equals_closed_form() {
    let mut r = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let a = random_coeffs(&mut r, 6);
        if abs(&a).iter().sum::<f64>() <= 1.0 {
            continue;
        }
        let n = r.random_range(1..=20);
        let blind = bounds::cuboid_no_feedback(&a, n, 2.0).unwrap();
        let fed = bounds::cuboid_feedback(&a, n, 2.0).unwrap();
        assert!((blind.rate - fed.rate).abs() < 1e-6, "{a:?}");
        assert!(fed.rate <= fed.rate_bound.unwrap() + 1e-9);
    }
}

#[test]
fn ellipsoid_feedback_rate_below_coefficient_bound() {
    let mut r = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 100 {
        let m = r.random_range(2..=6);
        let a: Vec<f64> = (0..m).map(|_| r.random_range(-3.0..3.0)).collect();
        let n = r.random_range(1..=20);
        let Ok(rep) = bounds::ellipsoid_feedback(&a, n, 2.0) else {
            continue;
        };
        assert!(rep.rate <= rep.rate_bound.unwrap() + 1e-9, "{a:?}");
        checked += 1;
    }
}

#[test]
fn ellipsoid_substitution_example() {
    // m = 2, a = (-2, 0): θ = 2, R = (1/n) log2[(√2/2)·2] = 1/(2n).
    let rep = bounds::ellipsoid_no_feedback(&[-2.0, 0.0], 7, 2.0).unwrap();
    assert!((rep.rate - 0.5 / 7.0).abs() < 1e-12);
    assert!(bounds::ellipsoid_no_feedback(&[-2.0], 7, 2.0).is_err());
    // Example 2 ellipsoid exponent 2/15 sits below the cuboid one.
    let a = [-2.0, -0.25, 0.5];
    let e = bounds::ellipsoid_no_feedback(&a, 15, 2.0).unwrap();
    let c = bounds::cuboid_no_feedback(&a, 15, 2.0).unwrap();
    assert!((e.beta - 2.0 / 15.0).abs() < 1e-9);
    assert!(e.beta < c.beta);
}

#[test]
fn limiting_convergence() {
    let mu = [1.3, 1.1];
    let (r_star, beta_star) = bounds::limiting_values(&mu);
    assert!((r_star - (1.3f64 * 1.1).log2()).abs() < 1e-12);
    let gap = |n: u32| {
        let a = bounds::coefficients_from_roots(&mu, n);
        let rep = bounds::cuboid_no_feedback(&a, n, 2.0).unwrap();
        ((rep.rate / r_star - 1.0).abs(), (rep.beta - beta_star).abs())
    };
    let (r64, b64) = gap(64);
    assert!(r64 < 0.05, "gap {r64}");
    let (r16, b16) = gap(16);
    let (r32, b32) = gap(32);
    assert!(r64 <= r32 && r32 <= r16);
    assert!(b64 <= b32 && b32 <= b16);
    // The feedback and ellipsoid rates approach R* as well.
    let rates = |n: u32| {
        let a = bounds::coefficients_from_roots(&mu, n);
        [
            bounds::cuboid_feedback(&a, n, 2.0).unwrap().rate,
            bounds::ellipsoid_no_feedback(&a, n, 2.0).unwrap().rate,
            bounds::ellipsoid_feedback(&a, n, 2.0).unwrap().rate,
        ]
    };
    let (q16, q64, q256) = (rates(16), rates(64), rates(256));
    for i in 0..3 {
        let g = |q: [f64; 3]| (q[i] / r_star - 1.0).abs();
        assert!(g(q256) < g(q64) && g(q64) < g(q16));
        assert!(g(q256) < 0.05);
    }
}

#[test]
fn trivial_limits() {
    assert_eq!(bounds::limiting_values(&[0.5, 0.9]).0, 0.0);
    let (r, b) = bounds::limiting_values(&[2.0, 0.5, 0.5]);
    assert!((r - 1.0).abs() < 1e-15 && (b - 2.0).abs() < 1e-15);
    assert!((bounds::fujiwara(&[0.0, -1.0]) - 2f64.sqrt()).abs() < 1e-15);
    assert!((bounds::fujiwara(&[-3.0]) - 3.0).abs() < 1e-15);
    assert_eq!(bounds::spectral_radius(&[-2.0]).unwrap(), 2.0);
}

/// KL divergence in bits, written from the definition with natural logs.
fn kl(p: f64, q: f64) -> f64 {
    let t = |x: f64, y: f64| if x == 0.0 { 0.0 } else { x * (x / y).ln() };
    (t(p, q) + t(1.0 - p, 1.0 - q)) / std::f64::consts::LN_2
}

/// Inverse binary entropy on [0, 1/2] by bisection with natural logs.
fn h_inv(y: f64) -> f64 {
    let h = |x: f64| {
        if x <= 0.0 {
            0.0
        } else {
            -(x * x.ln() + (1.0 - x) * (1.0 - x).ln()) / std::f64::consts::LN_2
        }
    };
    let (mut lo, mut hi) = (0.0, 0.5);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn bsc_exponent_matches_independent_kl() {
    let t = bounds::bsc_thresholds(0.11, 0.25).unwrap();
    let expect = kl(h_inv(0.75), 0.11);
    assert!((t.beta_max - expect).abs() < 1e-9, "{} vs {expect}", t.beta_max);
    assert!(bounds::bsc_thresholds(0.5, 0.0).unwrap().rate_max.abs() < 1e-12);
    let near = bounds::bsc_thresholds(0.11, t.rate_max - 1e-9).unwrap();
    assert!(near.beta_max < 1e-6);
}

#[test]
fn bhattacharyya_by_summation() {
    for &e in &[0.0f64, 0.11, 0.3, 0.5] {
        // Σ_z √(p(z|0) p(z|1)) over z ∈ {0, 1}.
        let sum = 2.0 * (e * (1.0 - e)).sqrt();
        assert!((bounds::bhattacharyya(&ChannelSpec::bsc(e)) - sum).abs() < 1e-15);
        // BEC: only the erasure symbol has mass under both inputs.
        assert!((bounds::bhattacharyya(&ChannelSpec::bec(e)) - e).abs() < 1e-15);
    }
}

#[test]
fn toeplitz_thresholds_shape() {
    let t = bounds::toeplitz_thresholds(0.3, 0.5, 0.4).unwrap();
    assert!((t.rate_max - (1.0 - 1.3f64.log2())).abs() < 1e-9);
    assert!(t.achievable);
    // β decreases in R and in ζ.
    let mut prev = f64::INFINITY;
    for i in 0..60 {
        let b = bounds::toeplitz_thresholds(0.3, 0.5, i as f64 * 0.01).unwrap().beta_max;
        assert!(b <= prev + 1e-12);
        prev = b;
    }
    for i in 1..10 {
        let lo = bounds::toeplitz_thresholds(0.1 * i as f64 - 0.05, 0.5, 0.1).unwrap();
        let hi = bounds::toeplitz_thresholds(0.1 * i as f64, 0.5, 0.1).unwrap();
        assert!(hi.beta_max <= lo.beta_max && hi.rate_max <= lo.rate_max);
    }
    // R → 0 with p = 1/2 gives (1/2) log2(1/ζ).
    let zero = bounds::toeplitz_thresholds(0.3, 0.5, 0.0).unwrap();
    assert!((zero.beta_max - 0.5 * (1.0 / 0.3f64).log2()).abs() < 1e-9);
    assert!(bounds::toeplitz_thresholds(0.999_999, 0.5, 0.0).unwrap().rate_max < 1e-5);
}
