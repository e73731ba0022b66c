//! Maximal X-state negativity at a fixed spectrum and the state reaching it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::xstate::XState;

const SPECTRUM_TOL: f64 = 1e-12;

/// Six eigenvalues, descending, summing to one. Serialized as a JSON array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Spectrum {
    values: [f64; 6],
}

impl TryFrom<Vec<f64>> for Spectrum {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        let values: [f64; 6] = v
            .try_into()
            .map_err(|v: Vec<f64>| Error::InvalidSpectrum(format!("expected 6 values, got {}", v.len())))?;
        Spectrum::new(values)
    }
}

impl From<Spectrum> for Vec<f64> {
    fn from(s: Spectrum) -> Self {
        s.values.to_vec()
    }
}

impl Spectrum {
    pub fn new(values: [f64; 6]) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpectrum("non-finite value".into()));
        }
        if values[5] < -SPECTRUM_TOL {
            return Err(Error::InvalidSpectrum(format!("negative value {}", values[5])));
        }
        if let Some(w) = values.windows(2).position(|w| w[0] < w[1] - SPECTRUM_TOL) {
            return Err(Error::InvalidSpectrum(format!(
                "not descending at positions {} and {}",
                w + 1,
                w + 2
            )));
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > SPECTRUM_TOL {
            return Err(Error::InvalidSpectrum(format!("sum is {total}, not 1")));
        }
        Ok(Spectrum { values })
    }

    /// Sorts descending before validating.
    pub fn from_unsorted(mut values: [f64; 6]) -> Result<Self> {
        values.sort_by(|a, b| b.total_cmp(a));
        Self::new(values)
    }

    pub fn uniform() -> Self {
        Spectrum {
            values: [1.0 / 6.0; 6],
        }
    }

    /// Uniform draw on the simplex, sorted descending.
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        let w = crate::hermitian_core::random_simplex(6, rng);
        let mut values = [0.0; 6];
        values.copy_from_slice(&w);
        Self::from_unsorted(values).expect("simplex draw is a valid spectrum")
    }

    pub fn values(&self) -> [f64; 6] {
        self.values
    }

    /// lambda_j with the 1-based index used throughout.
    pub fn lambda(&self, j: usize) -> f64 {
        self.values[j - 1]
    }
}

/// Index choice (i, j, k, l), 1-based, with i < j, k < l and {i,j}, {k,l} disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SequenceChoice {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub l: usize,
}

impl SequenceChoice {
    pub const OPTIMAL: SequenceChoice = SequenceChoice { i: 4, j: 6, k: 1, l: 5 };

    pub fn new(i: usize, j: usize, k: usize, l: usize) -> Result<Self> {
        let in_range = [i, j, k, l].iter().all(|&x| (1..=6).contains(&x));
        let disjoint = i != k && i != l && j != k && j != l;
        if in_range && i < j && k < l && disjoint {
            Ok(SequenceChoice { i, j, k, l })
        } else {
            Err(Error::InvalidSequence { i, j, k, l })
        }
    }

    /// All 90 valid choices in lexicographic order.
    pub fn all() -> Vec<SequenceChoice> {
        let mut out = Vec::with_capacity(90);
        for i in 1..=6 {
            for j in i + 1..=6 {
                for k in 1..=6 {
                    for l in k + 1..=6 {
                        if let Ok(c) = SequenceChoice::new(i, j, k, l) {
                            out.push(c);
                        }
                    }
                }
            }
        }
        out
    }
}

/// -(l_i + l_j) + sqrt((l_i - l_j)^2 + (l_k - l_l)^2).
pub fn s_value(spec: &Spectrum, c: SequenceChoice) -> f64 {
    let (li, lj) = (spec.lambda(c.i), spec.lambda(c.j));
    let (lk, ll) = (spec.lambda(c.k), spec.lambda(c.l));
    -(li + lj) + (li - lj).hypot(lk - ll)
}

/// Exhaustive argmax over all 90 choices; ties keep the lexicographically
/// smallest choice.
pub fn best_sequence_bruteforce(spec: &Spectrum) -> (SequenceChoice, f64) {
    let mut best: Option<(SequenceChoice, f64)> = None;
    for c in SequenceChoice::all() {
        let v = s_value(spec, c);
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some((c, v));
        }
    }
    best.expect("90 choices")
}

/// Maximal X-state negativity for the spectrum (negative means no X state
/// with this spectrum is entangled).
pub fn n_x_lambda(spec: &Spectrum) -> f64 {
    s_value(spec, SequenceChoice::OPTIMAL)
}

/// X state with spectrum `spec` whose negativity is max(0, n_x_lambda).
pub fn construct_spectrum_xmems(spec: &Spectrum) -> XState {
    let l = |j| spec.lambda(j);
    let mid = 0.5 * (l(1) + l(5));
    let coh = 0.5 * (l(1) - l(5));
    XState::real([l(4), l(2), mid], [l(6), l(3), mid], [0.0, 0.0, coh])
        .expect("spectrum construction is a valid X state")
}

/// The three auxiliary inequalities for nonnegative a, b, c, each with slack
/// -1e-12:
/// a + sqrt((a+b)^2 + (b+c)^2) >= sqrt(b^2 + (a+b+c)^2),
/// sqrt((b+a)^2 + (c+a)^2) >= sqrt(b^2 + c^2) + a,
/// sqrt(b^2 + c^2) + a >= sqrt((b+a)^2 + c^2).
pub fn lemma1_check(a: f64, b: f64, c: f64) -> [bool; 3] {
    const SLACK: f64 = -1e-12;
    let first = a + (a + b).hypot(b + c) - b.hypot(a + b + c);
    let second = (b + a).hypot(c + a) - (b.hypot(c) + a);
    let third = b.hypot(c) + a - (b + a).hypot(c);
    [first >= SLACK, second >= SLACK, third >= SLACK]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian_core::negativity;
    use crate::xstate::{x_negativity, x_spectra};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pure() -> Spectrum {
        Spectrum::new([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn ninety_choices() {
        let all = SequenceChoice::all();
        assert_eq!(all.len(), 90);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(SequenceChoice::new(1, 2, 2, 3).is_err());
        assert!(SequenceChoice::new(2, 1, 3, 4).is_err());
        assert!(SequenceChoice::new(1, 2, 3, 7).is_err());
    }

    #[test]
    fn uniform_spectrum() {
        let u = Spectrum::uniform();
        for c in SequenceChoice::all() {
            assert!((s_value(&u, c) + 1.0 / 3.0).abs() < 1e-15);
        }
        let (c, v) = best_sequence_bruteforce(&u);
        assert_eq!(c, SequenceChoice::new(1, 2, 3, 4).unwrap());
        assert!((v + 1.0 / 3.0).abs() < 1e-15);
        assert!(n_x_lambda(&u) < 0.0);
        let x = construct_spectrum_xmems(&u);
        assert_eq!(x_negativity(&x), 0.0);
    }

    #[test]
    fn pure_spectrum() {
        assert_eq!(s_value(&pure(), SequenceChoice::OPTIMAL), 1.0);
        assert_eq!(n_x_lambda(&pure()), 1.0);
        let x = construct_spectrum_xmems(&pure());
        assert!((negativity(&x.to_matrix().unwrap()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_example_spectrum() {
        let s = Spectrum::new([0.4, 0.25, 0.15, 0.1, 0.07, 0.03]).unwrap();
        let (_, v) = best_sequence_bruteforce(&s);
        assert!((v - s_value(&s, SequenceChoice::OPTIMAL)).abs() < 1e-15);
    }

    #[test]
    fn spectrum_validation_and_json() {
        assert!(Spectrum::new([0.5, 0.6, 0.0, 0.0, 0.0, -0.1]).is_err());
        assert!(Spectrum::new([0.6, 0.5, 0.0, 0.0, 0.0, 0.0]).is_err());
        let s = Spectrum::new([0.4, 0.25, 0.15, 0.1, 0.07, 0.03]).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, "[0.4,0.25,0.15,0.1,0.07,0.03]");
        assert_eq!(serde_json::from_str::<Spectrum>(&j).unwrap(), s);
        assert!(serde_json::from_str::<Spectrum>("[0.5,0.5]").is_err());
    }

    #[test]
    fn lemma1_examples() {
        assert_eq!(lemma1_check(0.0, 0.0, 0.0), [true; 3]);
        assert_eq!(lemma1_check(1.0, 2.0, 3.0), [true; 3]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn optimal_choice_wins(seed in any::<u64>()) {
            let s = Spectrum::random(&mut ChaCha8Rng::seed_from_u64(seed));
            let (_, v) = best_sequence_bruteforce(&s);
            prop_assert!((v - n_x_lambda(&s)).abs() <= 1e-12);
        }

        #[test]
        fn construction_realizes_assignment(seed in any::<u64>()) {
            let s = Spectrum::random(&mut ChaCha8Rng::seed_from_u64(seed));
            let x = construct_spectrum_xmems(&s);
            let sp = x_spectra(&x);
            prop_assert!((sp.state_plus[0] - s.lambda(4)).abs() <= 1e-15);
            prop_assert!((sp.state_minus[0] - s.lambda(6)).abs() <= 1e-15);
            prop_assert!((sp.state_plus[2] - s.lambda(1)).abs() <= 1e-15);
            prop_assert!((sp.state_minus[2] - s.lambda(5)).abs() <= 1e-15);
            prop_assert!((x_negativity(&x) - n_x_lambda(&s).max(0.0)).abs() <= 1e-12);
            if n_x_lambda(&s) <= 0.0 {
                let pt = x.to_matrix().unwrap().partial_transpose();
                let ev = crate::hermitian_core::eigvals_hermitian(&pt).unwrap();
                prop_assert!(ev[0] >= -1e-12);
            }
        }

        #[test]
        fn lemma1_holds(a in 0.0..10.0f64, b in 0.0..10.0f64, c in 0.0..10.0f64) {
            prop_assert_eq!(lemma1_check(a, b, c), [true; 3]);
        }
    }
}
