use kesten_core::linalg::Matrix;
use kesten_core::model::AffineMap;
use kesten_core::simulate::{forward_marginal, sample_stationary, stationarity_check};
use kesten_core::spectral::{chi_solve, k_estimate, top_lyapunov, PowerIterParams};
use kesten_core::stats::{ks_critical, ks_two_sample};
use kesten_core::{AffineMeasure64, LinearMeasure64, Seed};

fn rotation_example() -> AffineMeasure64 {
    AffineMeasure64::from_maps(
        2,
        vec![
            (0.5, AffineMap::linear(Matrix::rotation(0.25, 1.0))),
            (0.5, AffineMap::new(Matrix::diagonal(&[2.0, 0.5]), vec![1.0, 0.0])),
        ],
    )
    .unwrap()
}

fn cantor() -> AffineMeasure64 {
    AffineMeasure64::scalar(&[(0.5, 1.0 / 3.0, 1.0), (0.5, 0.5, 1.0)]).unwrap()
}

fn kesten_d1() -> AffineMeasure64 {
    AffineMeasure64::scalar(&[(0.5, 1.0 / 3.0, 1.0), (0.5, 2.0, 1.0)]).unwrap()
}

fn norm2x2(m: [f64; 4]) -> f64 {
    // largest singular value from the trace and determinant of mᵀm
    let [a, b, c, d] = m;
    let t = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    ((t + (t * t - 4.0 * det * det).max(0.0).sqrt()) / 2.0).sqrt()
}

fn mul2x2(x: [f64; 4], y: [f64; 4]) -> [f64; 4] {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

/// Σ over all words of length n of weight × ‖g₁⋯gₙ‖^s.
fn enumerate_moment(atoms: &[(f64, [f64; 4])], n: usize, s: f64) -> f64 {
    fn go(atoms: &[(f64, [f64; 4])], prod: [f64; 4], w: f64, left: usize, s: f64) -> f64 {
        if left == 0 {
            return w * norm2x2(prod).powf(s);
        }
        atoms.iter().map(|(p, m)| go(atoms, mul2x2(prod, *m), w * p, left - 1, s)).sum()
    }
    go(atoms, [1.0, 0.0, 0.0, 1.0], 1.0, n, s)
}

#[test]
fn planar_k_matches_exhaustive_product_norms() {
    let (c, s) = (0.25 * 1f64.cos(), 0.25 * 1f64.sin());
    let atoms = [(0.5, [c, -s, s, c]), (0.5, [2.0, 0.0, 0.0, 0.5])];
    // E‖Pₙ‖ ≈ C k(1)ⁿ, so the ratio of consecutive lengths removes the constant
    let oracle = enumerate_moment(&atoms, 20, 1.0) / enumerate_moment(&atoms, 19, 1.0);
    let params = PowerIterParams::default().with_particles(16384);
    let k = k_estimate(&rotation_example().linear_projection(), 1.0, &params, Seed(3)).unwrap();
    assert!((k.k - oracle).abs() <= 3.0 * k.stderr, "particle {} ± {} vs oracle {oracle}", k.k, k.stderr);
    assert!((oracle - 1.0684958).abs() < 1e-6);
}

#[test]
fn particle_k_matches_closed_form_for_similarities() {
    // ‖c R‖ = c for rotations, so k(s) = Σ p cˢ
    let mu = LinearMeasure64::new(
        2,
        vec![(0.3, Matrix::rotation(0.4, 0.7)), (0.7, Matrix::rotation(1.8, -2.1))],
    )
    .unwrap();
    for s in [0.5, 1.0, 2.0] {
        let exact = 0.3 * 0.4f64.powf(s) + 0.7 * 1.8f64.powf(s);
        let k = k_estimate(&mu, s, &PowerIterParams::default(), Seed(9)).unwrap();
        assert!((k.k - exact).abs() <= 3.0 * k.stderr + 1e-12 * exact, "s={s}: {k:?} vs {exact}");
    }
}

#[test]
fn lyapunov_matches_closed_form_in_d1() {
    let alpha_a = -0.5 * 6f64.ln();
    let alpha_b = -0.5 * 1.5f64.ln();
    for (eta, alpha) in [(cantor(), alpha_a), (kesten_d1(), alpha_b)] {
        let est = top_lyapunov(&eta.linear_projection(), 10_000, 64, Seed(1)).unwrap();
        assert!((est.alpha - alpha).abs() <= 3.0 * est.stderr, "{est:?} vs {alpha}");
    }
}

#[test]
fn chi_is_root_of_exact_k() {
    let mu = kesten_d1().linear_projection();
    let lyap = top_lyapunov(&mu, 10_000, 64, Seed(1)).unwrap();
    let c = chi_solve(&mu, &lyap, 20.0, &PowerIterParams::default(), Seed(1)).unwrap();
    // independent bisection on ½(3⁻ˢ + 2ˢ) = 1
    let f = |s: f64| 0.5 * (3f64.powf(-s) + 2f64.powf(s)) - 1.0;
    let (mut lo, mut hi) = (0.1, 2.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
    assert!((c.chi - lo).abs() < 1e-9, "{} vs {lo}", c.chi);
    assert!(f(c.chi).abs() <= 1e-6);
}

#[test]
fn forward_marginal_agrees_with_backward_samples() {
    let eta = kesten_d1();
    let fwd = forward_marginal(&eta, &[0.0], 200, 10_000, Seed(4)).unwrap();
    let bwd = sample_stationary(&eta, 10_000, 1e-9, 100_000, Seed(5)).unwrap();
    let d = ks_two_sample(fwd.as_flat(), bwd.samples.as_flat());
    assert!(d < ks_critical(0.001, 10_000, 10_000), "KS {d}");
}

/// Images of [lo, hi] under all words of the given length.
fn word_images(eta: &AffineMeasure64, depth: usize) -> Vec<(f64, f64)> {
    let mut intervals = vec![(1.5, 2.0)];
    for _ in 0..depth {
        intervals = intervals
            .iter()
            .flat_map(|&(lo, hi)| eta.atoms().iter().map(move |a| (a.map.a[(0, 0)] * lo + a.map.b[0], a.map.a[(0, 0)] * hi + a.map.b[0])))
            .collect();
    }
    intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
    intervals
}

#[test]
fn cantor_samples_avoid_depth_two_gaps() {
    let eta = cantor();
    let set = sample_stationary(&eta, 100_000, 1e-9, 100_000, Seed(6)).unwrap();
    let xs = set.samples.as_flat();
    let tol = 1e-8;
    assert!(xs.iter().all(|&x| (1.5 - tol..=2.0 + tol).contains(&x)));
    let images = word_images(&eta, 2);
    let gaps: Vec<(f64, f64)> = images.windows(2).filter(|w| w[0].1 < w[1].0).map(|w| (w[0].1, w[1].0)).collect();
    assert_eq!(gaps.len(), 3);
    for (lo, hi) in gaps {
        assert!(!xs.iter().any(|&x| x > lo + tol && x < hi - tol), "sample in gap ({lo}, {hi})");
    }
    // (1.75, 1.8333) is the image of [1.5, 2] under x ↦ (x/3 + 1)/2 + 1, not a gap:
    // its fixed point 1.8 lies in the support
    assert!(xs.iter().any(|&x| x > 1.75 && x < 1.8334));
    assert!(!xs.iter().any(|&x| x > 2.5));
}

#[test]
fn stationarity_passes_on_reference_measures() {
    for (i, eta) in [cantor(), kesten_d1(), rotation_example()].iter().enumerate() {
        let set = sample_stationary(eta, 100_000, 1e-9, 100_000, Seed(10 + i as u64)).unwrap();
        let r = stationarity_check(&set.samples, eta, Seed(20 + i as u64)).unwrap();
        assert!(r.pass, "measure {i}: {r:?}");
    }
}

#[test]
fn stationarity_rejects_a_shifted_law() {
    let eta = kesten_d1();
    let set = sample_stationary(&eta, 20_000, 1e-9, 100_000, Seed(7)).unwrap();
    let shifted = kesten_core::simulate::PointCloud::from_flat(1, set.samples.as_flat().iter().map(|x| x + 0.2).collect());
    assert!(!stationarity_check(&shifted, &eta, Seed(8)).unwrap().pass);
}
