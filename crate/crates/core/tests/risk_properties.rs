mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use stripe_core::risk::{
    approximate_spectrum, average_value_at_risk, kusuoka_risk, pseudo_metric_estimate, spectral_risk,
    spectral_risk_weighted, value_at_risk, EmpiricalLoss, KusuokaMeasure, RiskSpectrum,
};
use stripe_core::type_space::{
    equivalent_spectrum, simplex_lattice, simplex_project, wasserstein1, TypeDistribution, TypeSpace,
};

fn sample_strategy() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, 1..50)
}

proptest! {
    #[test]
    fn avar_matches_minimization_oracle(z in sample_strategy(), alpha in 0.0..0.999f64) {
        let s = EmpiricalLoss::new(z.clone()).unwrap();
        let lib = average_value_at_risk(&s, alpha).unwrap();
        prop_assert!((lib - avar_oracle(&z, alpha)).abs() <= 1e-9);
    }

    #[test]
    fn avar_dominates_var_and_mean(z in sample_strategy(), alpha in 0.0..0.999f64) {
        let s = EmpiricalLoss::new(z).unwrap();
        let avar = average_value_at_risk(&s, alpha).unwrap();
        prop_assert!(avar >= value_at_risk(&s, alpha).unwrap() - 1e-12);
        prop_assert!(avar >= s.mean() - 1e-12);
    }

    #[test]
    fn spectral_matches_avar_mixture_oracle(z in sample_strategy(), seed in 0u64..10_000) {
        let spectrum = random_spectrum(&mut rng(seed));
        let s = EmpiricalLoss::new(z.clone()).unwrap();
        let oracle = spectral_oracle(&z, &spectrum);
        prop_assert!((spectral_risk(&s, &spectrum) - oracle).abs() <= 1e-9);
        prop_assert!((kusuoka_risk(&s, &spectrum.to_kusuoka()) - oracle).abs() <= 1e-9);
    }

    #[test]
    fn equivalent_spectrum_is_the_weighted_mixture(z in sample_strategy(), seed in 0u64..10_000, m in 1usize..5) {
        let mut r = rng(seed);
        let ts = random_type_space(&mut r, m);
        let mu = random_distribution(&mut r, m, 0.0);
        let s = EmpiricalLoss::new(z).unwrap();
        let eq = equivalent_spectrum(&ts, &mu).unwrap();
        let mixed: f64 = ts.spectra().iter().zip(mu.weights()).map(|(sp, w)| w * spectral_risk(&s, sp)).sum();
        prop_assert!((spectral_risk(&s, &eq) - mixed).abs() <= 1e-9);
    }

    #[test]
    fn weighted_risk_with_equal_weights_matches_empirical(z in sample_strategy(), seed in 0u64..10_000) {
        let spectrum = random_spectrum(&mut rng(seed));
        let probs = vec![1.0 / z.len() as f64; z.len()];
        let weighted = spectral_risk_weighted(&z, &probs, &spectrum).unwrap();
        let s = EmpiricalLoss::new(z).unwrap();
        prop_assert!((weighted - spectral_risk(&s, &spectrum)).abs() <= 1e-9);
    }

    #[test]
    fn wasserstein_matches_quantile_oracle(seed in 0u64..10_000, m in 1usize..6) {
        let mut r = rng(seed);
        let ts = random_type_space(&mut r, m);
        let mu = random_distribution(&mut r, m, 0.0);
        let nu = random_distribution(&mut r, m, 0.0);
        let w = wasserstein1(&mu, &nu, &ts).unwrap();
        prop_assert!((w - w1_oracle(mu.weights(), nu.weights(), ts.locations())).abs() <= 1e-9);
        prop_assert!((w - wasserstein1(&nu, &mu, &ts).unwrap()).abs() <= 1e-15);
        prop_assert!(wasserstein1(&mu, &mu, &ts).unwrap() == 0.0);
    }

    #[test]
    fn wasserstein_triangle_inequality(seed in 0u64..10_000, m in 2usize..6) {
        let mut r = rng(seed);
        let ts = random_type_space(&mut r, m);
        let a = random_distribution(&mut r, m, 0.0);
        let b = random_distribution(&mut r, m, 0.0);
        let c = random_distribution(&mut r, m, 0.0);
        let ab = wasserstein1(&a, &b, &ts).unwrap();
        let bc = wasserstein1(&b, &c, &ts).unwrap();
        let ac = wasserstein1(&a, &c, &ts).unwrap();
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    #[test]
    fn simplex_projection_is_a_projection(v in prop::collection::vec(-3.0..3.0f64, 1..8)) {
        let p = simplex_project(&v).unwrap();
        prop_assert!((p.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(p.weights().iter().all(|w| *w >= 0.0));
        let again = simplex_project(p.weights()).unwrap();
        for (a, b) in p.weights().iter().zip(again.weights()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        // Optimality: ⟨v − p, q − p⟩ ≤ 0 for every vertex q.
        for k in 0..v.len() {
            let inner: f64 = (0..v.len())
                .map(|j| (v[j] - p.weights()[j]) * ((j == k) as u8 as f64 - p.weights()[j]))
                .sum();
            prop_assert!(inner <= 1e-12);
        }
    }
}

#[test]
fn var_uses_the_floor_index_convention() {
    let s = EmpiricalLoss::new(vec![4.0, 1.0, 3.0, 2.0]).unwrap();
    // Sorted 1, 2, 3, 4: index ⌊αN⌋.
    assert_eq!(value_at_risk(&s, 0.0).unwrap(), 1.0);
    assert_eq!(value_at_risk(&s, 0.25).unwrap(), 2.0);
    assert_eq!(value_at_risk(&s, 0.7).unwrap(), 3.0);
    assert_eq!(average_value_at_risk(&s, 0.5).unwrap(), 3.5);
    assert_eq!(average_value_at_risk(&s, 0.0).unwrap(), 2.5);
}

#[test]
fn flat_spectrum_is_the_mean() {
    let mut r = rng(11);
    let z = uniform_values(&mut r, 37, -2.0, 2.0);
    let s = EmpiricalLoss::new(z).unwrap();
    assert!((spectral_risk(&s, &RiskSpectrum::flat()) - s.mean()).abs() < 1e-12);
}

#[test]
fn avar_spectrum_reproduces_avar() {
    let mut r = rng(12);
    for _ in 0..50 {
        let z = uniform_values(&mut r, 23, -1.0, 1.0);
        let alpha = r.random_range(0.0..0.95);
        let s = EmpiricalLoss::new(z).unwrap();
        let spectrum = RiskSpectrum::average_value_at_risk(alpha).unwrap();
        let direct = average_value_at_risk(&s, alpha).unwrap();
        assert!((spectral_risk(&s, &spectrum) - direct).abs() < 1e-9);
    }
}

#[test]
fn invalid_spectra_and_measures_are_rejected() {
    assert!(RiskSpectrum::new(vec![0.0, 0.5], vec![1.0]).is_err());
    assert!(RiskSpectrum::new(vec![0.0], vec![2.0]).is_err());
    assert!(RiskSpectrum::new(vec![0.0, 0.5], vec![1.5, -0.5]).is_err());
    assert!(KusuokaMeasure::new(vec![(0.5, 0.7)]).is_err());
    assert!(KusuokaMeasure::new(vec![(1.0, 1.0)]).is_err());
    assert!(average_value_at_risk(&EmpiricalLoss::new(vec![1.0]).unwrap(), 1.0).is_err());
    assert!(EmpiricalLoss::new(vec![]).is_err());
}

#[test]
fn finer_step_approximations_get_closer() {
    let target = |t: f64| 3.0 * t * t;
    let mut r = rng(13);
    let probes: Vec<EmpiricalLoss> = (0..40)
        .map(|_| EmpiricalLoss::new(uniform_values(&mut r, 100, -1.0, 1.0)).unwrap())
        .collect();
    let fine = approximate_spectrum(target, 1024).unwrap().to_kusuoka();
    let gaps: Vec<f64> = [16, 64, 256]
        .iter()
        .map(|&n| {
            let coarse = approximate_spectrum(target, n).unwrap().to_kusuoka();
            pseudo_metric_estimate(&coarse, &fine, &probes).unwrap()
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn simplex_lattice_counts_and_membership() {
    // C(r + m − 1, m − 1) points.
    assert_eq!(simplex_lattice(2, 10).unwrap().len(), 11);
    assert_eq!(simplex_lattice(3, 4).unwrap().len(), 15);
    for p in simplex_lattice(3, 7).unwrap() {
        assert!((p.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn type_space_validation() {
    assert!(TypeSpace::new(vec![1.0, 0.0], vec![RiskSpectrum::flat(), RiskSpectrum::flat()]).is_err());
    assert!(TypeSpace::new(vec![0.0], vec![]).is_err());
    assert!(TypeDistribution::new(vec![0.5, 0.6]).is_err());
    assert!(TypeDistribution::new(vec![-0.1, 1.1]).is_err());
}
