mod common;

use common::checks::with_threads;
use probedim::directions::hadamard_directions;
use probedim::inference::{bootstrap_p, target_test, BootstrapMethod, MaxCalibration, TestOptions};
use probedim::rank2::fit_matrix;
use probedim::rng::substream;
use probedim::simlab::{
    alternating, gen_matrix, run_cell, DirectionCase, ErrorDist, Hypothesis, SimulationSpec, TestConfig,
};

fn moments(dist: ErrorDist, draws: usize) -> (f64, f64, f64) {
    let mut rng = substream(31, dist as u64);
    let xs: Vec<f64> = (0..draws).map(|_| dist.sample(&mut rng)).collect();
    let n = draws as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let skew = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n / var.powf(1.5);
    (mean, var, skew)
}

#[test]
fn error_laws_have_variance_5000() {
    // (law, kurtosis) for the standard error of the sample variance
    for (dist, kurt) in [(ErrorDist::Normal, 3.0), (ErrorDist::T5Scaled, 9.0), (ErrorDist::ChisqCentered, 15.0)] {
        let draws = 1_000_000;
        let (mean, var, skew) = moments(dist, draws);
        let se_mean = (5000.0 / draws as f64).sqrt();
        let se_var = 5000.0 * ((kurt - 1.0) / draws as f64).sqrt();
        assert!(mean.abs() < 3.0 * se_mean, "{dist}: mean {mean}");
        assert!((4900.0..=5100.0).contains(&var), "{dist}: variance {var}");
        assert!((var - 5000.0).abs() < 3.0 * se_var, "{dist}: variance {var}");
        if dist == ErrorDist::ChisqCentered {
            assert!(skew > 0.0);
        }
    }
}

#[test]
fn noiseless_spec_recovers_probe_effects() {
    for n in [8, 16, 33] {
        let mut spec = SimulationSpec::standard(n, Hypothesis::Alternative, ErrorDist::Zero, 1);
        spec.mu2 = alternating(n).into_iter().map(|s| 125.0 * s).collect();
        if n % 2 == 1 {
            // keep μ₂ ⊥ μ₁ for odd n
            spec.mu2[n - 1] = 0.0;
            spec.mu2[n - 2] = 0.0;
            spec.mu2[0] = 0.0;
        }
        spec.var_theta1 = 0.0;
        spec.var_theta2 = 0.0;
        let fit = fit_matrix(&gen_matrix(&spec, 0).unwrap()).unwrap();
        for (est, truth) in [(&fit.phi1, &spec.phi1), (&fit.phi2, &spec.phi2)] {
            let sign = if est.iter().zip(truth.iter()).map(|(a, b)| a * b).sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
            let dev = est.iter().zip(truth.iter()).map(|(a, b)| (sign * a - b).abs()).fold(0.0, f64::max);
            assert!(dev < 1e-8, "n={n}: deviation {dev:e}");
        }
    }
}

#[test]
fn run_cell_independent_of_thread_count() {
    let spec = SimulationSpec::standard(16, Hypothesis::Null, ErrorDist::T5Scaled, 77);
    for test in [
        TestConfig::Target { case: DirectionCase::Case1 },
        TestConfig::Chisq { k: 4 },
        TestConfig::ChisqBootstrap { k: 4, resamples: 200 },
    ] {
        let a = with_threads(1, || run_cell(&spec, &test, 300, 0.05).unwrap());
        let b = with_threads(8, || run_cell(&spec, &test, 300, 0.05).unwrap());
        assert_eq!(a.rejections, b.rejections, "{}", test.label());
        assert_eq!(a.rejection_rate.to_bits(), b.rejection_rate.to_bits());
    }
}

#[test]
fn null_rates_valid_at_n128() {
    let tests = [
        TestConfig::Target { case: DirectionCase::Case1 },
        TestConfig::Chisq { k: 4 },
        TestConfig::Max { calibration: MaxCalibration::PhiPower },
    ];
    for (d, dist) in ErrorDist::TABLE.into_iter().enumerate() {
        for (t, test) in tests.iter().enumerate() {
            let spec = SimulationSpec::standard(128, Hypothesis::Null, dist, 9000 + 10 * d as u64 + t as u64);
            let r = run_cell(&spec, test, 4000, 0.05).unwrap();
            assert!((0.035..=0.065).contains(&r.rejection_rate), "{dist} {}: {}", test.label(), r.rejection_rate);
            assert_eq!(r.failures, 0);
        }
    }
}

#[test]
fn residual_variance_tracks_error_variance() {
    for dist in ErrorDist::TABLE {
        let spec = SimulationSpec::standard(128, Hypothesis::Null, dist, 4242);
        let avg =
            (0..100).map(|r| fit_matrix(&gen_matrix(&spec, r).unwrap()).unwrap().resid_sigma2).sum::<f64>() / 100.0;
        assert!((avg / 5000.0 - 1.0).abs() < 0.10, "{dist}: {avg}");
    }
}

// B = 1000 alone leaves a resampling error of up to 0.016 in the p-value
const BOOTSTRAP_B: usize = 20_000;

#[test]
fn bootstrap_tracks_asymptotic_at_n128() {
    let spec = SimulationSpec::standard(128, Hypothesis::Null, ErrorDist::Normal, 128);
    let a = hadamard_directions::<f64>(128, 1).unwrap();
    let close = (0..200u64)
        .filter(|&r| {
            let fit = fit_matrix(&gen_matrix(&spec, r).unwrap()).unwrap();
            let asym = target_test(&fit, a.row(0), TestOptions::default()).unwrap().p_value;
            let boot =
                bootstrap_p(&fit, &a, BootstrapMethod::Target, BOOTSTRAP_B, r, TestOptions::default()).unwrap().p_value;
            (asym - boot).abs() < 0.02
        })
        .count();
    assert!(close >= 190, "{close}/200 within 0.02");
}
