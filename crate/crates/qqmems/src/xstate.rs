//! Qubit-qutrit X states: density matrices supported on the main diagonal and
//! the anti-diagonal.
//!
//! Layout (index m = 3a + b): diagonal (a1, a2, a3, b3, b2, b1); coherences
//! r1 e^{-i phi1} at (0,5), r2 e^{-i phi2} at (1,4), r3 e^{-i phi3} at (2,3),
//! plus their conjugates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian_core::{ComplexMatrix, DensityMatrix, C64, DIM};

/// Additive slack for normalization and for r_k <= sqrt(a_k b_k).
pub const X_TOL: f64 = 1e-12;
/// PT eigenvalues below minus this count as negative.
pub const NEGATIVE_EIG_THRESHOLD: f64 = 1e-12;

const PATTERN_TOL: f64 = 1e-12;
const DIAG_SLOT: [(usize, usize); 3] = [(0, 5), (1, 4), (2, 3)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "XStateRecord", into = "XStateRecord")]
pub struct XState {
    a: [f64; 3],
    b: [f64; 3],
    r: [f64; 3],
    phi: [f64; 3],
}

/// Flat serialized form with keys a1..a3, b1..b3, r1..r3, phi1..phi3.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct XStateRecord {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
}

impl TryFrom<XStateRecord> for XState {
    type Error = Error;
    fn try_from(x: XStateRecord) -> Result<Self> {
        XState::new(
            [x.a1, x.a2, x.a3],
            [x.b1, x.b2, x.b3],
            [x.r1, x.r2, x.r3],
            [x.phi1, x.phi2, x.phi3],
        )
    }
}

impl From<XState> for XStateRecord {
    fn from(x: XState) -> Self {
        XStateRecord {
            a1: x.a[0],
            a2: x.a[1],
            a3: x.a[2],
            b1: x.b[0],
            b2: x.b[1],
            b3: x.b[2],
            r1: x.r[0],
            r2: x.r[1],
            r3: x.r[2],
            phi1: x.phi[0],
            phi2: x.phi[1],
            phi3: x.phi[2],
        }
    }
}

impl XState {
    pub fn new(a: [f64; 3], b: [f64; 3], r: [f64; 3], phi: [f64; 3]) -> Result<Self> {
        let all = a.iter().chain(&b).chain(&r).chain(&phi);
        if all.clone().any(|v| !v.is_finite()) {
            return Err(Error::InvalidXState("non-finite parameter".into()));
        }
        for (name, vals) in [("a", &a), ("b", &b), ("r", &r)] {
            if let Some(k) = vals.iter().position(|&v| v < -X_TOL) {
                return Err(Error::InvalidXState(format!(
                    "{name}{} = {} is negative",
                    k + 1,
                    vals[k]
                )));
            }
        }
        let total: f64 = a.iter().chain(&b).sum();
        if (total - 1.0).abs() > X_TOL {
            return Err(Error::InvalidXState(format!(
                "sum of a_k + b_k is {total}, not 1"
            )));
        }
        for k in 0..3 {
            let bound = (a[k].max(0.0) * b[k].max(0.0)).sqrt();
            if r[k] > bound + X_TOL {
                return Err(Error::InvalidXState(format!(
                    "r{0} = {1} exceeds sqrt(a{0} b{0}) = {2}",
                    k + 1,
                    r[k],
                    bound
                )));
            }
        }
        Ok(XState { a, b, r, phi })
    }

    /// Real X state (all phases zero).
    pub fn real(a: [f64; 3], b: [f64; 3], r: [f64; 3]) -> Result<Self> {
        Self::new(a, b, r, [0.0; 3])
    }

    pub fn a(&self) -> [f64; 3] {
        self.a
    }
    pub fn b(&self) -> [f64; 3] {
        self.b
    }
    pub fn r(&self) -> [f64; 3] {
        self.r
    }
    pub fn phi(&self) -> [f64; 3] {
        self.phi
    }

    pub fn with_phases(&self, phi: [f64; 3]) -> Self {
        XState { phi, ..*self }
    }

    pub fn to_matrix(&self) -> Result<DensityMatrix> {
        let mut m = ComplexMatrix::zeros(DIM)?;
        for k in 0..3 {
            let (i, j) = DIAG_SLOT[k];
            m[(i, i)] = C64::new(self.a[k], 0.0);
            m[(j, j)] = C64::new(self.b[k], 0.0);
            let z = C64::from_polar(self.r[k], -self.phi[k]);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
        DensityMatrix::new(m)
    }

    pub fn from_matrix(rho: &DensityMatrix) -> Result<Self> {
        let m = rho.matrix();
        let mut offending = Vec::new();
        for i in 0..DIM {
            for j in 0..DIM {
                let on_pattern = i == j || i + j == DIM - 1;
                if !on_pattern && m[(i, j)].norm() >= PATTERN_TOL {
                    offending.push((i, j));
                }
            }
        }
        if !offending.is_empty() {
            return Err(Error::NotXPattern(offending));
        }
        let mut a = [0.0; 3];
        let mut b = [0.0; 3];
        let mut r = [0.0; 3];
        let mut phi = [0.0; 3];
        for k in 0..3 {
            let (i, j) = DIAG_SLOT[k];
            a[k] = m[(i, i)].re;
            b[k] = m[(j, j)].re;
            r[k] = m[(i, j)].norm();
            phi[k] = if r[k] > 0.0 { -m[(i, j)].arg() } else { 0.0 };
        }
        Self::new(a, b, r, phi)
    }

    pub fn purity(&self) -> f64 {
        (0..3)
            .map(|k| self.a[k].powi(2) + self.b[k].powi(2) + 2.0 * self.r[k].powi(2))
            .sum()
    }
}

/// Closed-form spectra of an X state and of its partial transpose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XSpectra {
    /// lambda_k^+ for k = 1..3.
    pub state_plus: [f64; 3],
    /// lambda_k^- for k = 1..3.
    pub state_minus: [f64; 3],
    /// lambda'_k^+ for k = 1..3.
    pub pt_plus: [f64; 3],
    /// lambda'_k^- for k = 1..3.
    pub pt_minus: [f64; 3],
    /// d_k = (b_k - a_k) / 2.
    pub d: [f64; 3],
}

impl XSpectra {
    pub fn state_eigs(&self) -> Vec<f64> {
        sorted(self.state_plus.iter().chain(&self.state_minus))
    }

    pub fn pt_eigs(&self) -> Vec<f64> {
        sorted(self.pt_plus.iter().chain(&self.pt_minus))
    }
}

fn sorted<'a>(it: impl Iterator<Item = &'a f64>) -> Vec<f64> {
    let mut v: Vec<f64> = it.copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn x_spectra(x: &XState) -> XSpectra {
    let mut s = XSpectra {
        state_plus: [0.0; 3],
        state_minus: [0.0; 3],
        pt_plus: [0.0; 3],
        pt_minus: [0.0; 3],
        d: [0.0; 3],
    };
    for k in 0..3 {
        let mean = 0.5 * (x.a[k] + x.b[k]);
        let d = 0.5 * (x.b[k] - x.a[k]);
        let w = x.r[k].hypot(d);
        // The partial transpose swaps the outer and inner coherences.
        let wp = x.r[2 - k].hypot(d);
        s.d[k] = d;
        s.state_plus[k] = mean + w;
        s.state_minus[k] = mean - w;
        s.pt_plus[k] = mean + wp;
        s.pt_minus[k] = mean - wp;
    }
    s
}

/// 2 max(0, -lambda'_1^-, -lambda'_3^-).
pub fn x_negativity(x: &XState) -> f64 {
    let s = x_spectra(x);
    2.0 * 0.0f64.max(-s.pt_minus[0]).max(-s.pt_minus[2])
}

/// Negativity written through the state eigenvalues of blocks 1 and 3,
/// valid on the branch where lambda'_1^- is the negative PT eigenvalue.
pub fn x_negativity_block1_form(x: &XState) -> f64 {
    let s = x_spectra(x);
    let (p1, m1) = (s.state_plus[0], s.state_minus[0]);
    let (p3, m3) = (s.state_plus[2], s.state_minus[2]);
    let rad = (p1 - m1).powi(2) + (p3 - m3).powi(2) - 4.0 * s.d[2].powi(2) - 4.0 * x.r[0].powi(2);
    -p1 - m1 + rad.max(0.0).sqrt()
}

/// Number of PT eigenvalues below -1e-12. Two would contradict the
/// single-negative-eigenvalue property and is reported as an error.
pub fn count_negative_pt_eigs(x: &XState) -> Result<usize> {
    let n = x_spectra(x)
        .pt_eigs()
        .iter()
        .filter(|&&v| v < -NEGATIVE_EIG_THRESHOLD)
        .count();
    if n > 1 {
        Err(Error::TooManyNegativePtEigenvalues(n))
    } else {
        Ok(n)
    }
}

/// Random valid X state: simplex diagonal, r_k a uniform fraction of
/// sqrt(a_k b_k), uniform phases.
pub fn random_xstate<R: rand::Rng + ?Sized>(rng: &mut R) -> XState {
    let w = crate::hermitian_core::random_simplex(6, rng);
    let a = [w[0], w[1], w[2]];
    let b = [w[3], w[4], w[5]];
    let mut r = [0.0; 3];
    let mut phi = [0.0; 3];
    for k in 0..3 {
        // Put some mass on the PSD boundary r = sqrt(ab).
        let frac: f64 = if rng.random::<f64>() < 0.2 {
            1.0
        } else {
            rng.random()
        };
        r[k] = frac * (a[k] * b[k]).sqrt();
        phi[k] = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    }
    XState::new(a, b, r, phi).expect("construction satisfies the invariants")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian_core::{eigvals_hermitian, negativity};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell_like() -> XState {
        XState::real([0.0, 0.0, 0.5], [0.0, 0.0, 0.5], [0.0, 0.0, 0.5]).unwrap()
    }

    #[test]
    fn bell_like_state_is_pure() {
        let rho = bell_like().to_matrix().unwrap();
        let ev = rho.eigenvalues();
        assert!((ev[5] - 1.0).abs() < 1e-12);
        assert!(ev[..5].iter().all(|v| v.abs() < 1e-12));
        assert!((negativity(&rho) - 1.0).abs() < 1e-12);
        assert!((x_negativity(&bell_like()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_when_r_is_zero() {
        let x = XState::real([0.1, 0.2, 0.15], [0.05, 0.3, 0.2], [0.0; 3]).unwrap();
        let m = x.to_matrix().unwrap();
        for i in 0..6 {
            for j in 0..6 {
                if i != j {
                    assert_eq!(m.matrix()[(i, j)], C64::new(0.0, 0.0));
                }
            }
        }
        let s = x_spectra(&x);
        let mut expect = vec![0.1, 0.2, 0.15, 0.05, 0.3, 0.2];
        expect.sort_by(f64::total_cmp);
        for (u, v) in s.state_eigs().iter().zip(&expect) {
            assert!((u - v).abs() < 1e-15);
        }
    }

    #[test]
    fn validation_names_the_condition() {
        let err = XState::real([0.2, 0.2, 0.2], [0.2, 0.1, 0.1], [0.3, 0.0, 0.0]).unwrap_err();
        assert!(err.to_string().contains("r1"), "{err}");
        let err = XState::real([0.2, 0.2, 0.2], [0.2, 0.1, 0.2], [0.0; 3]).unwrap_err();
        assert!(err.to_string().contains("sum"), "{err}");
        let err = XState::real([-0.1, 0.3, 0.2], [0.2, 0.2, 0.2], [0.0; 3]).unwrap_err();
        assert!(err.to_string().contains("a1"), "{err}");
    }

    #[test]
    fn from_matrix_round_trip_and_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let x = random_xstate(&mut rng);
            let m = x.to_matrix().unwrap();
            let back = XState::from_matrix(&m).unwrap();
            assert!(back.to_matrix().unwrap().matrix().max_abs_diff(m.matrix()) <= 1e-12);
        }
        let mixed = DensityMatrix::maximally_mixed();
        let x = XState::from_matrix(&mixed).unwrap();
        assert!(x.a().iter().chain(&x.b()).all(|&v| (v - 1.0 / 6.0).abs() < 1e-15));
        assert_eq!(x.r(), [0.0; 3]);

        let mut m = mixed.matrix().clone();
        m[(0, 1)] = C64::new(1e-3, 0.0);
        m[(1, 0)] = C64::new(1e-3, 0.0);
        let rho = DensityMatrix::new(m).unwrap();
        match XState::from_matrix(&rho) {
            Err(Error::NotXPattern(v)) => assert_eq!(v, vec![(0, 1), (1, 0)]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn partial_transpose_swaps_outer_and_inner_coherences() {
        let x = XState::new(
            [0.1, 0.15, 0.2],
            [0.2, 0.15, 0.2],
            [0.12, 0.1, 0.05],
            [0.3, -1.1, 2.0],
        )
        .unwrap();
        let pt = x.to_matrix().unwrap().partial_transpose();
        // Expected: r1 <-> r3, phi1 <-> phi3, i <-> -i.
        let swapped = XState::new(x.a(), x.b(), [0.05, 0.1, 0.12], [-2.0, 1.1, -0.3]).unwrap();
        let m = swapped.to_matrix().unwrap();
        assert!(pt.max_abs_diff(m.matrix()) < 1e-15);
    }

    #[test]
    fn serde_uses_flat_keys() {
        let x = bell_like();
        let s = serde_json::to_string(&x).unwrap();
        assert!(s.contains("\"a3\":0.5") && s.contains("\"phi1\":0.0"), "{s}");
        let back: XState = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        let bad = s.replace("\"r3\":0.5", "\"r3\":0.9");
        assert!(serde_json::from_str::<XState>(&bad).is_err());
    }

    #[test]
    fn ppt_states_have_zero_negativity() {
        let x = XState::real([0.2, 0.1, 0.2], [0.2, 0.1, 0.2], [0.2, 0.1, 0.2]).unwrap();
        assert_eq!(x_negativity(&x), 0.0);
        assert_eq!(count_negative_pt_eigs(&x).unwrap(), 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn spectra_match_eigensolver(seed in any::<u64>()) {
            let x = random_xstate(&mut ChaCha8Rng::seed_from_u64(seed));
            let s = x_spectra(&x);
            let rho = x.to_matrix().unwrap();
            for (u, v) in s.state_eigs().iter().zip(rho.eigenvalues()) {
                prop_assert!((u - v).abs() <= 1e-10);
            }
            let pt = eigvals_hermitian(&rho.partial_transpose()).unwrap();
            for (u, v) in s.pt_eigs().iter().zip(pt) {
                prop_assert!((u - v).abs() <= 1e-10);
            }
            prop_assert_eq!(s.pt_plus[1], s.state_plus[1]);
            prop_assert_eq!(s.pt_minus[1], s.state_minus[1]);
        }

        #[test]
        fn closed_form_matches_trace_norm(seed in any::<u64>()) {
            let x = random_xstate(&mut ChaCha8Rng::seed_from_u64(seed));
            let oracle = negativity(&x.to_matrix().unwrap());
            prop_assert!((x_negativity(&x) - oracle).abs() <= 1e-10);
        }

        #[test]
        fn negativity_ignores_phases(seed in any::<u64>(), p1 in -3.0..3.0f64, p2 in -3.0..3.0f64, p3 in -3.0..3.0f64) {
            let x = random_xstate(&mut ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(x_negativity(&x), x_negativity(&x.with_phases([p1, p2, p3])));
        }

        #[test]
        fn block1_form_agrees_on_its_branch(seed in any::<u64>()) {
            let x = random_xstate(&mut ChaCha8Rng::seed_from_u64(seed));
            let s = x_spectra(&x);
            if s.pt_minus[0] < 0.0 {
                prop_assert!((x_negativity(&x) - x_negativity_block1_form(&x)).abs() <= 1e-12);
            }
        }

        #[test]
        fn negative_pt_eig_criterion(seed in any::<u64>()) {
            let x = random_xstate(&mut ChaCha8Rng::seed_from_u64(seed));
            let s = x_spectra(&x);
            let (a, b, r) = (x.a(), x.b(), x.r());
            for k in [0usize, 2] {
                let bound = (a[k] * b[k]).sqrt();
                let gap = r[2 - k] - bound;
                if gap.abs() > 1e-9 {
                    prop_assert_eq!(s.pt_minus[k] < 0.0, gap > 0.0);
                }
            }
            prop_assert!(count_negative_pt_eigs(&x).unwrap() <= 1);
        }
    }
}
