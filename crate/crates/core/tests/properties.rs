use std::f64::consts::PI;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qklyst_core::design::sweep_gain;
use qklyst_core::klystron::{gain_factor, wavenumber_after_emission_approx, wavenumber_after_emission_exact, Klystron};
use qklyst_core::oracle::{ppt_negativity, random_mixed_state, random_valid_params, verify_rate_identity};
use qklyst_core::quantum_state::{
    amplify_channel, bell_state, concurrence, density_matrix, werner_state, BellKind, TwoPhotonState, C64,
};

fn bell_kind() -> impl Strategy<Value = BellKind> {
    prop::sample::select(BellKind::ALL.to_vec())
}

fn pure_state() -> impl Strategy<Value = TwoPhotonState> {
    prop::array::uniform8(-1.0f64..1.0)
        .prop_filter("non-zero", |a| a.iter().map(|x| x * x).sum::<f64>() > 1e-3)
        .prop_map(|a| {
            let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let amps = [0, 1, 2, 3].map(|i| C64::new(a[2 * i] / norm, a[2 * i + 1] / norm));
            TwoPhotonState::new(amps).unwrap()
        })
}

proptest! {
    #[test]
    fn concurrence_lies_in_unit_interval(seed in any::<u64>(), parts in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_mixed_state(&mut rng, parts).unwrap();
        let c = concurrence(&rho);
        prop_assert!((0.0..=1.0).contains(&c));
    }

    #[test]
    fn concurrence_and_ppt_agree(seed in any::<u64>(), parts in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_mixed_state(&mut rng, parts).unwrap();
        prop_assert_eq!(concurrence(&rho) > 0.0, ppt_negativity(&rho).is_entangled);
    }

    #[test]
    fn indistinguishable_electrons_leave_any_state_alone(psi in pure_state(), n in 1u32..50) {
        let rho = amplify_channel(&psi, n, 1.0).unwrap();
        let pure = density_matrix(&psi).unwrap();
        prop_assert!((rho.matrix() - pure.matrix()).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn channel_output_is_a_valid_state(psi in pure_state(), n in 1u32..50, eta in 0.0f64..=1.0) {
        let rho = amplify_channel(&psi, n, eta).unwrap();
        prop_assert!((rho.trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
        prop_assert!(rho.purity() <= 1.0 + 1e-12);
    }

    #[test]
    fn phi_states_keep_full_concurrence(n in 1u32..100, eta in 0.0f64..=1.0, minus in any::<bool>()) {
        let kind = if minus { BellKind::PhiMinus } else { BellKind::PhiPlus };
        let rho = amplify_channel(&bell_state(kind), n, eta).unwrap();
        prop_assert!((concurrence(&rho) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn psi_concurrence_equals_overlap(n in 1u32..100, eta in 0.0f64..=1.0, minus in any::<bool>()) {
        let kind = if minus { BellKind::PsiMinus } else { BellKind::PsiPlus };
        let rho = amplify_channel(&bell_state(kind), n, eta).unwrap();
        prop_assert!((concurrence(&rho) - eta).abs() < 1e-9);
        prop_assert_eq!(eta > 1e-9, ppt_negativity(&rho).is_entangled);
    }

    #[test]
    fn werner_concurrence_formula(p in 0.0f64..=1.0, kind in bell_kind()) {
        let rho = werner_state(p, kind).unwrap();
        let expected = ((3.0 * p - 1.0) / 2.0).max(0.0);
        prop_assert!((concurrence(&rho) - expected).abs() < 1e-9);
    }

    #[test]
    fn gain_series_joins_closed_form(gamma in 9e-4f64..1.1e-3) {
        // The series branch stops at 1e-3; both sides must agree across it.
        let below = gain_factor(gamma * (1.0 - 1e-9)).unwrap();
        let above = gain_factor(gamma * (1.0 + 1e-9)).unwrap();
        prop_assert!(((above - below) / below).abs() < 1e-7);
        prop_assert!(below < 0.0);
    }

    #[test]
    fn gain_is_even(gamma in 0.01f64..20.0) {
        let g = gain_factor(gamma).unwrap();
        let h = gain_factor(-gamma).unwrap();
        prop_assert!((g - h).abs() <= 1e-12 * g.abs().max(1.0));
    }

    #[test]
    fn emission_then_absorption_round_trips(k in 1e5f64..1e9, alpha in 1e-6f64..0.4) {
        let omega = alpha * qklyst_core::constants::HBAR * k * k / qklyst_core::constants::ELECTRON_MASS;
        let k1 = wavenumber_after_emission_exact(k, omega).unwrap();
        let back = wavenumber_after_emission_exact(k1, -omega).unwrap();
        prop_assert!(((back - k) / k).abs() < 1e-12);
        if alpha < 0.1 {
            // Remainder α³/2 + 5α⁴/8 + ..., bounded by α³ for α < 0.1.
            let approx = wavenumber_after_emission_approx(k, omega).unwrap();
            prop_assert!(((approx - k1) / k).abs() <= alpha.powi(3) + 1e-15);
        }
    }

    #[test]
    fn rate_identity_holds_on_random_points(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = random_valid_params(&mut rng);
        let report = verify_rate_identity(&params).unwrap();
        prop_assert!(report.passed, "{:?}", report);
        let rates = Klystron::new(params).unwrap().rate_total();
        prop_assert!(rates.spontaneous >= 0.0 || Klystron::new(params).unwrap().gain_factor() < 0.0);
    }
}

#[test]
fn gain_curve_zeros_and_negative_first_lobe() {
    let curve = sweep_gain(0.0, 4.0 * PI, 2000).unwrap();
    for m in 1..=4 {
        let target = m as f64 * PI;
        let nearest = curve
            .iter()
            .min_by(|a, b| (a.0 - target).abs().total_cmp(&(b.0 - target).abs()))
            .unwrap();
        assert!(nearest.1.abs() < 1e-9, "{nearest:?}");
    }
    assert!(curve.iter().filter(|p| p.0 < PI - 1e-9).all(|p| p.1 < 0.0));
}
