use kesten_core::linalg::Matrix;
use kesten_core::model::AffineMap;
use kesten_core::simulate::{forward_orbit, sample_stationary};
use kesten_core::spectral::{k_curve, k_estimate, log_convexity_violations, top_lyapunov, PowerIterParams};
use kesten_core::structure::{fixed_points, proximal_scan};
use kesten_core::tails::hill_estimator;
use kesten_core::{AffineMeasure64, Matrix64, Seed};
use proptest::prelude::*;

fn small_params() -> PowerIterParams {
    PowerIterParams {
        n_particles: 1024,
        n_steps: 120,
        burn_in: 40,
        resample_threshold: 0.5,
    }
}

/// Two-atom planar measure; both linear parts have operator norm at most `max_norm`.
fn planar(entries: [f64; 8], b: [f64; 4], p: f64, max_norm: f64) -> Option<AffineMeasure64> {
    let m1 = Matrix::from_rows(&[vec![entries[0], entries[1]], vec![entries[2], entries[3]]])?;
    let m2 = Matrix::from_rows(&[vec![entries[4], entries[5]], vec![entries[6], entries[7]]])?;
    let mut atoms = Vec::new();
    for (m, b, w) in [(m1, [b[0], b[1]], p), (m2, [b[2], b[3]], 1.0 - p)] {
        if m.determinant().abs() < 1e-2 {
            return None;
        }
        let m = m.scaled(max_norm / m.spectral_norm());
        atoms.push((w, AffineMap::new(m, b.to_vec())));
    }
    AffineMeasure64::from_maps(2, atoms).ok()
}

fn planar_strategy(max_norm: f64) -> impl Strategy<Value = AffineMeasure64> {
    (prop::array::uniform8(-1.0..1.0f64), prop::array::uniform4(-2.0..2.0f64), 0.1..0.9f64)
        .prop_filter_map("degenerate draw", move |(e, b, p)| planar(e, b, p, max_norm))
}

fn quarter_turn() -> Matrix64 {
    Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap()
}

fn conjugate(eta: &AffineMeasure64, r: &Matrix64) -> AffineMeasure64 {
    let rt = r.transpose();
    eta.map_atoms(|h| AffineMap::new(r.mul(&h.a).mul(&rt), r.mul_vec(&h.b))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn k_at_zero_is_exactly_one(eta in planar_strategy(1.5), seed in any::<u64>()) {
        let k = k_estimate(&eta.linear_projection(), 0.0, &small_params(), Seed(seed)).unwrap();
        prop_assert_eq!(k.k, 1.0);
    }

    #[test]
    fn exact_d1_k_grid_is_log_convex(a1 in 0.05..3.0f64, a2 in -3.0..-0.05f64, p in 0.05..0.95f64) {
        let eta = AffineMeasure64::scalar(&[(p, a1, 1.0), (1.0 - p, a2, -1.0)]).unwrap();
        let grid: Vec<f64> = (0..20).map(|i| 0.3 * i as f64).collect();
        let k = k_curve(&eta.linear_projection(), &grid, &small_params(), Seed(1)).unwrap();
        prop_assert!(log_convexity_violations(&k).is_empty());
    }

    #[test]
    fn hill_is_invariant_under_power_of_two_scaling(
        xs in prop::collection::vec(1e-3..1e3f64, 50..400),
        e in -20i32..20,
    ) {
        let k = xs.len() / 4;
        let scaled: Vec<f64> = xs.iter().map(|x| x * 2f64.powi(e)).collect();
        let a = hill_estimator(&xs, k).unwrap();
        let b = hill_estimator(&scaled, k).unwrap();
        prop_assert_eq!(a.chi_hat, b.chi_hat);
        prop_assert_eq!(a.stderr, b.stderr);
    }

    #[test]
    fn backward_samples_scale_with_translations(eta in planar_strategy(0.9), e in -8i32..8, seed in any::<u64>()) {
        let c = 2f64.powi(e);
        let scaled = eta.map_atoms(|h| AffineMap::new(h.a.clone(), h.b.iter().map(|x| c * x).collect())).unwrap();
        let z = sample_stationary(&eta, 200, 1e-10, 10_000, Seed(seed)).unwrap();
        let w = sample_stationary(&scaled, 200, 1e-10, 10_000, Seed(seed)).unwrap();
        for (x, y) in z.samples.as_flat().iter().zip(w.samples.as_flat()) {
            prop_assert_eq!(c * x, *y);
        }
    }

    #[test]
    fn backward_samples_follow_affine_conjugation(
        eta in planar_strategy(0.9),
        c in 0.2..5.0f64,
        t in prop::array::uniform2(-3.0..3.0f64),
        seed in any::<u64>(),
    ) {
        // g(x) = c x + t conjugates h to a x + c b + (I - a) t, and pushes ν forward
        let moved = eta.map_atoms(|h| {
            let at = h.a.mul_vec(&t);
            let b = (0..2).map(|i| c * h.b[i] + t[i] - at[i]).collect();
            AffineMap::new(h.a.clone(), b)
        }).unwrap();
        let tol = 1e-11;
        let z = sample_stationary(&eta, 200, tol, 10_000, Seed(seed)).unwrap();
        let w = sample_stationary(&moved, 200, tol, 10_000, Seed(seed)).unwrap();
        let scale = eta.max_translation_norm() * c + 4.0 * (t[0].abs() + t[1].abs());
        for (x, y) in z.samples.iter().zip(w.samples.iter()) {
            for i in 0..2 {
                prop_assert!((c * x[i] + t[i] - y[i]).abs() <= 100.0 * tol * scale, "{:?} {:?}", x, y);
            }
        }
    }

    #[test]
    fn quarter_turn_conjugation_rotates_samples_exactly(eta in planar_strategy(0.9), seed in any::<u64>()) {
        let r = quarter_turn();
        let turned = conjugate(&eta, &r);
        let z = sample_stationary(&eta, 200, 1e-10, 10_000, Seed(seed)).unwrap();
        let w = sample_stationary(&turned, 200, 1e-10, 10_000, Seed(seed)).unwrap();
        for (x, y) in z.samples.iter().zip(w.samples.iter()) {
            prop_assert_eq!(r.mul_vec(x), y.to_vec());
        }
    }

    #[test]
    fn spectral_estimates_are_rotation_invariant(eta in planar_strategy(1.5), seed in any::<u64>()) {
        let mu = eta.linear_projection();
        let turned = conjugate(&eta, &quarter_turn()).linear_projection();
        let a = top_lyapunov(&mu, 2000, 16, Seed(seed)).unwrap();
        let b = top_lyapunov(&turned, 2000, 16, Seed(seed)).unwrap();
        prop_assert!((a.alpha - b.alpha).abs() <= 3.0 * (a.stderr.hypot(b.stderr)) + 1e-9);
        let ka = k_estimate(&mu, 1.0, &small_params(), Seed(seed)).unwrap();
        let kb = k_estimate(&turned, 1.0, &small_params(), Seed(seed)).unwrap();
        prop_assert!((ka.k - kb.k).abs() <= 4.0 * ka.stderr.hypot(kb.stderr) + 1e-9, "{:?} {:?}", ka, kb);
    }

    #[test]
    fn fixed_point_residuals_are_small(eta in planar_strategy(1.5)) {
        for fp in fixed_points(&eta, 8).unwrap() {
            let norm = fp.point.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!(fp.residual <= 1e-6 * (1.0 + norm), "{:?}", fp);
        }
    }

    #[test]
    fn proximal_witnesses_are_eigenpairs(eta in planar_strategy(1.5)) {
        let mu = eta.linear_projection();
        for w in proximal_scan(&mu, 8, 0.05).unwrap() {
            let mut g = Matrix64::identity(2);
            for &i in &w.word {
                g = g.mul(&mu.atoms()[i].1);
            }
            let gv = g.mul_vec(&w.v);
            let res = gv.iter().zip(&w.v).map(|(x, v)| (x - w.lambda * v).powi(2)).sum::<f64>().sqrt();
            prop_assert!(res <= 1e-8 * w.lambda.abs(), "{:?} residual {}", w, res);
            prop_assert!(w.gap > 0.05);
        }
    }

    #[test]
    fn orbits_with_shared_draws_contract(eta in planar_strategy(1.5), x0 in prop::array::uniform2(-5.0..5.0f64), seed in any::<u64>()) {
        let a = forward_orbit(&eta, &[0.0, 0.0], 40, Seed(seed)).unwrap();
        let b = forward_orbit(&eta, &x0, 40, Seed(seed)).unwrap();
        prop_assert_eq!(&a.atom_indices, &b.atom_indices);
        // |x_n - y_n| ≤ Π ‖a_i‖ |x_0 - y_0|
        let mut bound = (x0[0] * x0[0] + x0[1] * x0[1]).sqrt();
        for (n, &i) in a.atom_indices.iter().enumerate() {
            bound *= eta.atoms()[i].map.a.spectral_norm();
            let (x, y) = (&a.states[n + 1], &b.states[n + 1]);
            let dist = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
            prop_assert!(dist <= bound * (1.0 + 1e-9) + 1e-9, "step {}: {} > {}", n, dist, bound);
        }
    }
}

#[test]
fn particle_k_grid_is_log_convex_within_noise() {
    let eta = AffineMeasure64::from_maps(
        2,
        vec![
            (0.5, AffineMap::linear(Matrix::rotation(0.25, 1.0))),
            (0.5, AffineMap::new(Matrix::diagonal(&[2.0, 0.5]), vec![1.0, 0.0])),
        ],
    )
    .unwrap();
    let grid: Vec<f64> = (0..9).map(|i| 0.25 * i as f64).collect();
    let k = k_curve(&eta.linear_projection(), &grid, &PowerIterParams::default(), Seed(5)).unwrap();
    assert!(log_convexity_violations(&k).is_empty(), "{k:?}");
}
