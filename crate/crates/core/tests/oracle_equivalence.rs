mod common;

use common::oracle::{bh_naive, power_svd, quantile_naive, subspace_gap, z_naive};
use probedim::directions::hadamard_directions;
use probedim::inference::{bh_adjust, target_test, TestOptions};
use probedim::numkern::{jacobi_eigh, svd_thin, Matrix};
use probedim::rank2::fit_matrix;
use probedim::screenflow::quantile_normalize_arrays;
use rand::Rng;

fn rows(y: &Matrix<f64>) -> Vec<Vec<f64>> {
    (0..y.nrows()).map(|i| y.row(i).to_vec()).collect()
}

#[test]
fn svd_matches_power_iteration() {
    let mut rng = common::rng(11);
    for case in 0..100 {
        let y =
            if case % 2 == 0 { common::gaussian(&mut rng, 20, 12) } else { common::rank2_plus_noise(&mut rng, 20, 12) };
        let svd = svd_thin(&y).unwrap();
        let oracle = power_svd(&rows(&y), 12);
        for (k, (a, b)) in svd.singular_values.iter().zip(&oracle.values).enumerate() {
            assert!((a - b).abs() < 1e-8, "case {case} sigma{k}: {a} vs {b}");
        }
        let gap = subspace_gap(&svd.right_vectors[..2], &oracle.v[..2]);
        assert!(gap < 1e-8, "case {case}: subspace gap {gap:e}");
    }
}

#[test]
fn fit_matches_power_iteration() {
    let mut rng = common::rng(12);
    for case in 0..100 {
        let y = common::rank2_plus_noise(&mut rng, 20, 12);
        let fit = fit_matrix(&y).unwrap();
        let oracle = power_svd(&rows(&y), 2);
        for k in 0..2 {
            assert!((fit.lambda[k] - oracle.values[k]).abs() < 1e-8, "case {case}");
        }
        for (phi, v) in [(&fit.phi1, &oracle.v[0]), (&fit.phi2, &oracle.v[1])] {
            let gap = subspace_gap(std::slice::from_ref(phi), std::slice::from_ref(v));
            assert!(gap < 1e-8, "case {case}: {gap:e}");
        }
        // θ̂₂ = Yφ̂₂ entry by entry
        for i in 0..20 {
            let t: f64 = y.row(i).iter().zip(&fit.phi2).map(|(a, b)| a * b).sum();
            assert!((t - fit.theta2[i]).abs() < 1e-9);
        }
    }
}

#[test]
fn eigen_matches_power_iteration() {
    let mut rng = common::rng(13);
    for _ in 0..30 {
        let b = common::gaussian(&mut rng, 9, 6);
        let s = b.gram();
        let e = jacobi_eigh(&s).unwrap();
        let oracle = power_svd(&rows(&b), 6);
        for (l, sv) in e.values.iter().zip(&oracle.values) {
            assert!((l - sv * sv).abs() < 1e-9 * e.values[0].max(1.0));
        }
    }
}

#[test]
fn target_statistic_matches_direct_formula() {
    let mut rng = common::rng(14);
    let a = hadamard_directions::<f64>(16, 1).unwrap();
    for _ in 0..50 {
        let y = common::rank2_plus_noise(&mut rng, 16, 12);
        let fit = fit_matrix(&y).unwrap();
        let out = target_test(&fit, a.row(0), TestOptions::default()).unwrap();
        let z = z_naive(a.row(0), &fit.theta2);
        assert!((out.statistic - z).abs() < 1e-10 * z.abs().max(1.0));
    }
}

#[test]
fn bh_matches_definition() {
    let mut rng = common::rng(15);
    for len in [1, 2, 5, 40, 200] {
        let mut p: Vec<f64> = (0..len).map(|_| rng.random::<f64>().powi(3)).collect();
        if len > 4 {
            p[1] = p[0];
            p[3] = p[2];
        }
        let got = bh_adjust(&p).unwrap();
        for (a, b) in got.iter().zip(bh_naive(&p)) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
    }
}

#[test]
fn quantile_normalization_matches_reference() {
    let mut rng = common::rng(16);
    for _ in 0..20 {
        // coarse values force ties
        let arrays: Vec<Vec<f64>> =
            (0..5).map(|_| (0..30).map(|_| (rng.random::<f64>() * 8.0).floor()).collect()).collect();
        let got = quantile_normalize_arrays(&arrays).unwrap();
        let want = quantile_naive(&arrays);
        for (g, w) in got.iter().flatten().zip(want.iter().flatten()) {
            assert!((g - w).abs() < 1e-12);
        }
    }
}
