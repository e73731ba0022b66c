use qqmems::hermitian_core::{negativity, negativity_from_pt_spectrum, trace_norm, DensityMatrix};
use qqmems::xstate::{random_xstate, x_negativity, x_spectra, XState};
use qqmems::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn closed_form_spectra_match_eigensolver() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..2000 {
        let x = random_xstate(&mut rng);
        let rho = x.to_matrix().unwrap();
        let s = x_spectra(&x);
        for (u, v) in rho.eigenvalues().iter().zip(s.state_eigs()) {
            assert!((u - v).abs() < 1e-12);
        }
        let pt = qqmems::hermitian_core::eigvals_hermitian(&rho.partial_transpose()).unwrap();
        for (u, v) in pt.iter().zip(s.pt_eigs()) {
            assert!((u - v).abs() < 1e-12);
        }
        let n = x_negativity(&x);
        assert!((n - (trace_norm(&rho.partial_transpose()).unwrap() - 1.0)).abs() < 1e-10);
        assert!((n - negativity_from_pt_spectrum(&rho)).abs() < 1e-10);
    }
}

#[test]
fn matrix_round_trip_preserves_everything() {
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    for _ in 0..500 {
        let x = random_xstate(&mut rng);
        let back = XState::from_matrix(&x.to_matrix().unwrap()).unwrap();
        for k in 0..3 {
            assert!((back.a()[k] - x.a()[k]).abs() < 1e-15);
            assert!((back.r()[k] - x.r()[k]).abs() < 1e-15);
        }
        assert!((x_negativity(&back) - x_negativity(&x)).abs() < 1e-14);
    }
}

#[test]
fn non_x_matrix_is_rejected_with_entries() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let rho = qqmems::hermitian_core::random_noisy_pure_state(0.6, &mut rng).unwrap();
    match XState::from_matrix(&rho) {
        Err(Error::NotXPattern(entries)) => assert!(!entries.is_empty()),
        other => panic!("expected NotXPattern, got {other:?}"),
    }
    assert!(XState::from_matrix(&DensityMatrix::maximally_mixed()).is_ok());
}

#[test]
fn invalid_parameters() {
    assert!(XState::real([0.5, 0.0, 0.0], [0.5, 0.0, 0.0], [0.6, 0.0, 0.0]).is_err());
    assert!(XState::real([0.5, 0.0, 0.0], [0.4, 0.0, 0.0], [0.0; 3]).is_err());
    assert!(XState::real([-0.1, 0.6, 0.0], [0.5, 0.0, 0.0], [0.0; 3]).is_err());
}

#[test]
fn phases_do_not_change_negativity() {
    let mut rng = ChaCha8Rng::seed_from_u64(54);
    for _ in 0..200 {
        let x = random_xstate(&mut rng);
        let y = x.with_phases([0.3, -1.2, 2.9]);
        assert!((negativity(&x.to_matrix().unwrap()) - negativity(&y.to_matrix().unwrap())).abs() < 1e-10);
    }
}
