use qqmems::hermitian_core::{adjust_purity, negativity, ComplexMatrix};
use qqmems::purity_mems::{
    certificate_data, construct_deg, construct_rank2, construct_rank3, curve_point, deg_eigenvalues,
    h_p, n_hed, n_x_p_deg, n_x_p_rank2, n_x_p_rank3, rank2_eigenvalues, rank3_eigenvalues,
    verify_certificate, DualCertificate, HedValue, Theorem,
};
use qqmems::spectrum_mems::{n_x_lambda, Spectrum};
use qqmems::xstate::x_negativity;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spectrum_of(nonzero: &[f64]) -> Spectrum {
    let mut v = [0.0; 6];
    v[..nonzero.len()].copy_from_slice(nonzero);
    Spectrum::from_unsorted(v).unwrap()
}

/// Random nearby spectrum with the same support size and purity.
fn perturb(base: &[f64], p: f64, eps: f64, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    let mut x: Vec<f64> = base.iter().map(|v| v + eps * rng.random_range(-1.0..1.0)).collect();
    if x.iter().any(|&v| v <= 0.0) {
        return None;
    }
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
    let u = 1.0 / x.len() as f64;
    if p < u {
        return None;
    }
    Some(adjust_purity(&x, p))
}

#[test]
fn rank2_and_rank3_are_locally_maximal() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for i in 0..10 {
        let p = 0.5 + 0.49 * i as f64 / 9.0;
        let (l1, l2) = rank2_eigenvalues(p).unwrap();
        let best = n_x_p_rank2(p).unwrap();
        for _ in 0..1000 {
            if let Some(x) = perturb(&[l1, l2], p, 1e-3, &mut rng) {
                assert!(n_x_lambda(&spectrum_of(&x)) <= best + 1e-8, "rank2 P = {p}");
            }
        }
    }
    for i in 0..10 {
        let p = 1.0 / 3.0 + 0.65 * i as f64 / 9.0;
        let (l1, l2, l3) = rank3_eigenvalues(p).unwrap();
        let best = n_x_p_rank3(p).unwrap();
        for _ in 0..1000 {
            if let Some(x) = perturb(&[l1, l2, l3], p, 1e-3, &mut rng) {
                assert!(n_x_lambda(&spectrum_of(&x)) <= best + 1e-8, "rank3 P = {p}");
            }
        }
    }
}

#[test]
fn deg_is_locally_maximal() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for i in 0..10 {
        let p = 0.21 + 0.78 * i as f64 / 9.0;
        let e = deg_eigenvalues(p).unwrap();
        let best = n_x_p_deg(p).unwrap();
        for _ in 0..1000 {
            // Perturb (l1, l2, l3, s) keeping the smallest value threefold.
            let mut v = [e.l1, e.l2, e.l3, e.smallest];
            for x in v.iter_mut() {
                *x += 1e-3 * rng.random_range(-1.0..1.0);
            }
            if v.iter().any(|&x| x < 0.0) || v[3] > v[2].min(v[1]).min(v[0]) {
                continue;
            }
            let full = [v[0], v[1], v[2], v[3], v[3], v[3]];
            let s: f64 = full.iter().sum();
            let full: Vec<f64> = full.iter().map(|x| x / s).collect();
            let pur: f64 = full.iter().map(|x| x * x).sum();
            // Interpolation toward uniform keeps the threefold degeneracy.
            let t = ((p - 1.0 / 6.0) / (pur - 1.0 / 6.0)).sqrt();
            let adj: Vec<f64> = full.iter().map(|x| 1.0 / 6.0 + t * (x - 1.0 / 6.0)).collect();
            if adj.iter().any(|&x| x < 0.0) {
                continue;
            }
            let spec = Spectrum::from_unsorted(adj.try_into().unwrap()).unwrap();
            assert!(n_x_lambda(&spec) <= best + 1e-8, "deg P = {p}");
        }
    }
}

#[test]
fn constructions_match_their_closed_forms() {
    for i in 0..50 {
        let p = 0.5 + 0.49 * i as f64 / 49.0;
        let x = construct_rank2(p).unwrap();
        let n = n_x_p_rank2(p).unwrap();
        assert!((x_negativity(&x) - n).abs() < 1e-12);
        assert!((negativity(&x.to_matrix().unwrap()) - n).abs() < 1e-10);
        assert!((x.purity() - p).abs() < 1e-12);
    }
    for i in 0..50 {
        let p = 1.0 / 3.0 + 0.66 * i as f64 / 49.0;
        let x = construct_rank3(p).unwrap();
        let n = n_x_p_rank3(p).unwrap();
        assert!((negativity(&x.to_matrix().unwrap()) - n).abs() < 1e-10);
        assert!((x.purity() - p).abs() < 1e-12);
    }
    for i in 0..50 {
        let p = 0.2 + 0.79 * (i + 1) as f64 / 50.0;
        let x = construct_deg(p).unwrap();
        let n = n_x_p_deg(p).unwrap();
        let rho = x.to_matrix().unwrap();
        assert!((negativity(&rho) - n).abs() < 1e-10, "P = {p}");
        assert!((x.purity() - p).abs() < 1e-12);
        let ev = rho.eigenvalues();
        assert!((ev[0] - ev[2]).abs() < 1e-12);
    }
}

#[test]
fn deg_at_three_tenths_is_full_rank() {
    let x = construct_deg(0.3).unwrap();
    let ev = x.to_matrix().unwrap().eigenvalues();
    let want = (1.0 - 2.0 * h_p(0.3)) / 6.0;
    assert!(want > 0.0);
    assert!((ev[0] - want).abs() < 1e-12);
}

#[test]
fn deg_matches_rank3_at_three_eighths() {
    let a = construct_deg(0.375).unwrap().to_matrix().unwrap().eigenvalues();
    let b = construct_rank3(0.375).unwrap().to_matrix().unwrap().eigenvalues();
    for (u, v) in a.iter().zip(&b) {
        assert!((u - v).abs() < 1e-12);
    }
}

#[test]
fn curves_respect_domains() {
    let c = curve_point(0.25);
    assert!(c.n2.is_none() && c.n3.is_none() && c.ndeg.is_some());
    let c = curve_point(0.5);
    assert!((c.n2.unwrap() - 0.5).abs() < 1e-15);
    assert!((c.n3.unwrap() - 2.0 / 3.0).abs() < 1e-15);
    assert!((c.ndeg.unwrap() - 2.0 / 3.0).abs() < 1e-15);
    let c = curve_point(0.375);
    assert!((c.n3.unwrap() - 0.5).abs() < 1e-15 && (c.ndeg.unwrap() - 0.5).abs() < 1e-15);
    assert!((n_x_p_rank2(0.625).unwrap() - 0.75).abs() < 1e-15);
}

#[test]
fn hedemann_limits() {
    assert!(matches!(n_hed(0.3).unwrap(), HedValue::Undefined { radicand } if radicand < -3.0));
    let near = n_hed(0.2 + 1e-10).unwrap().value().unwrap();
    assert!(near.abs() < 1e-3);
    assert!((n_hed(0.375).unwrap().value().unwrap() - 0.5).abs() < 1e-15);
}

// Entries re-entered by hand from the printed certificates, independently of
// the fixture code.
#[test]
fn certificate_transcription() {
    let p = 0.7;
    let tr = |m: &ComplexMatrix| m.trace().re;

    let d = certificate_data(Theorem::Rank2, p).unwrap();
    assert!((tr(&d.f[0]) - (p + 0.5)).abs() < 1e-15);
    assert!((tr(&d.f[1]) - 1.0).abs() < 1e-15);
    assert_eq!(d.f[1][(1, 2)].re, 1.0);
    assert_eq!(d.f[0][(2, 2)].re, p - 1.0);

    let d = certificate_data(Theorem::Rank3, p).unwrap();
    assert!((tr(&d.f[0]) - (p + 4.0 / 3.0)).abs() < 1e-15);
    assert!((tr(&d.f[1]) - 1.0).abs() < 1e-15 && (tr(&d.f[2]) - 1.0).abs() < 1e-15);
    assert!((d.f[0][(1, 2)].re + 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(d.f[2][(2, 3)].re, 1.0);

    let d = certificate_data(Theorem::Deg, p).unwrap();
    assert!((tr(&d.f[0]) - (p + 19.0 / 6.0)).abs() < 1e-14);
    for i in 1..4 {
        assert!((tr(&d.f[i]) + 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(d.f[i][(i, 4)].re, 1.0);
    }
    assert_eq!(d.c, vec![-2.0, -1.0, -1.0]);

    // Mixed-branch dual at P = 0.3: corner entries of the 4x4 block.
    let d = certificate_data(Theorem::Deg, 0.3).unwrap();
    let h = h_p(0.3);
    match d.dual {
        DualCertificate::Interior { z, .. } => {
            assert!((z[(1, 1)].re - (2.0 / 3.0 + h + 1.0 / (9.0 * h))).abs() < 1e-14);
            assert!((z[(1, 4)].re - (-1.0 - 1.0 / (3.0 * h))).abs() < 1e-14);
            assert!((z[(4, 4)].re - 1.0 / h).abs() < 1e-14);
        }
        DualCertificate::Asymptotic { .. } => panic!("expected an interior certificate"),
    }
    assert!(matches!(certificate_data(Theorem::Rank2, 0.5).unwrap().dual, DualCertificate::Asymptotic { .. }));
}

#[test]
fn certificate_examples() {
    let r = verify_certificate(Theorem::Rank2, 0.75).unwrap();
    assert!(r.verified);
    assert!((r.dual_value - n_x_p_rank2(0.75).unwrap()).abs() < 1e-12);

    let r = verify_certificate(Theorem::Rank3, 1.0 / 3.0).unwrap();
    assert!(r.verified && r.asymptotic.is_some());
    assert!((r.dual_value - 1.0 / 3.0).abs() < 1e-12);

    let r = verify_certificate(Theorem::Deg, 0.3).unwrap();
    assert!(r.verified && r.asymptotic.is_none());
    assert!((r.negativity - n_x_p_deg(0.3).unwrap()).abs() < 1e-12);

    assert!(verify_certificate(Theorem::Rank2, 0.4).is_err());
    assert!(verify_certificate(Theorem::Deg, 0.2).is_err());
}

#[test]
fn hierarchy_on_random_purities() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..10_000 {
        let p = rng.random_range(0.2..1.0);
        let c = curve_point(p);
        if let (Some(d), Some(n3)) = (c.ndeg, c.n3) {
            assert!(d >= n3 - 1e-12);
        }
        if let (Some(n3), Some(n2)) = (c.n3, c.n2) {
            assert!(n3 >= n2 - 1e-12);
        }
    }
}
