//! Rank-2 and rank-3 TGX candidate families, their closed-form negativities,
//! and multistart maximization at fixed purity.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_domain, Error, Result};
use crate::hermitian_core::{negativity, ComplexMatrix, DensityMatrix, C64, DIM};
use crate::nelder_mead::{nelder_mead, NelderMeadOptions};
use crate::par::{derive_seed, map_indexed, Execution};
use crate::purity_mems::{f_p, P_MAX};

const PARAM_TOL: f64 = 1e-12;
/// Formula and trace-norm values further apart than this count as a mismatch.
pub const FORMULA_TOL: f64 = 1e-10;

static FORMULA_MISMATCHES: AtomicU64 = AtomicU64::new(0);

/// How often a closed form disagreed with the trace-norm value (process-wide).
pub fn formula_mismatch_count() -> u64 {
    FORMULA_MISMATCHES.load(Ordering::Relaxed)
}

fn check_probabilities(p: &[f64]) -> Result<()> {
    if p.iter().any(|&v| !v.is_finite() || v <= 0.0) {
        return Err(Error::InvalidParams(format!("probabilities {p:?} must be positive")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > PARAM_TOL {
        return Err(Error::InvalidParams(format!("probabilities sum to {s}, not 1")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tgx2Params {
    pub theta1: f64,
    pub theta2: f64,
    pub p1: f64,
    pub p2: f64,
}

impl Tgx2Params {
    pub fn new(theta1: f64, theta2: f64, p1: f64, p2: f64) -> Result<Self> {
        check_probabilities(&[p1, p2])?;
        Ok(Tgx2Params {
            theta1,
            theta2,
            p1,
            p2,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tgx3Params {
    pub theta: [f64; 3],
    pub p: [f64; 3],
}

impl Tgx3Params {
    pub fn new(theta: [f64; 3], p: [f64; 3]) -> Result<Self> {
        check_probabilities(&p)?;
        Ok(Tgx3Params { theta, p })
    }
}

// (row, column) pairs of the three 2x2 blocks: |00>,|12>; |01>,|10>; |02>,|11>.
const BLOCKS: [(usize, usize); 3] = [(0, 5), (1, 3), (2, 4)];

fn tgx_matrix(theta: &[f64], p: &[f64]) -> Result<DensityMatrix> {
    let mut m = ComplexMatrix::zeros(DIM)?;
    for ((&(i, j), &t), &pk) in BLOCKS.iter().zip(theta).zip(p) {
        let (s, c) = t.sin_cos();
        m[(i, i)] = C64::new(pk * c * c, 0.0);
        m[(j, j)] = C64::new(pk * s * s, 0.0);
        m[(i, j)] = C64::new(pk * s * c, 0.0);
        m[(j, i)] = C64::new(pk * s * c, 0.0);
    }
    DensityMatrix::new(m)
}

pub fn tgx2_matrix(q: &Tgx2Params) -> Result<DensityMatrix> {
    tgx_matrix(&[q.theta1, q.theta2], &[q.p1, q.p2])
}

pub fn tgx3_matrix(q: &Tgx3Params) -> Result<DensityMatrix> {
    tgx_matrix(&q.theta, &q.p)
}

/// Closed form for the rank-2 family.
pub fn tgx2_negativity_formula(q: &Tgx2Params) -> f64 {
    let c1 = q.theta1.cos();
    let s2 = q.theta2.sin();
    let s2t1 = (2.0 * q.theta1).sin();
    let s2t2 = (2.0 * q.theta2).sin();
    let (p1, p2) = (q.p1, q.p2);
    -p1 * c1 * c1 - p2 * s2 * s2
        + (p1 * p1 * c1.powi(4) + p2 * p2 * s2t2 * s2t2).sqrt()
        + (p2 * p2 * s2.powi(4) + p1 * p1 * s2t1 * s2t1).sqrt()
}

/// The three possibly negative PT eigenvalues sigma_1..sigma_3 of the rank-3 family.
pub fn tgx3_sigmas(q: &Tgx3Params) -> [f64; 3] {
    let mut sigma = [0.0; 3];
    // (i, j, k) cyclic over (1,2,3), zero-based; result stored at 4 - k.
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        let u = q.p[i] * q.theta[i].sin().powi(2);
        let v = q.p[j] * q.theta[j].cos().powi(2);
        let w = q.p[k] * (2.0 * q.theta[k]).sin();
        sigma[2 - k] = 0.5 * (u + v) - 0.5 * (w * w + (u - v).powi(2)).sqrt();
    }
    sigma
}

/// Closed form sum_l |sigma_l| - sigma_l for the rank-3 family.
pub fn tgx3_negativity_formula(q: &Tgx3Params) -> f64 {
    tgx3_sigmas(q).iter().map(|s| s.abs() - s).sum()
}

fn checked(formula: f64, rho: Result<DensityMatrix>) -> f64 {
    let Ok(rho) = rho else {
        FORMULA_MISMATCHES.fetch_add(1, Ordering::Relaxed);
        return formula;
    };
    let oracle = negativity(&rho);
    if (formula - oracle).abs() > FORMULA_TOL {
        FORMULA_MISMATCHES.fetch_add(1, Ordering::Relaxed);
        oracle
    } else {
        formula
    }
}

/// Closed form, replaced by the trace-norm value (and counted) when they disagree.
pub fn tgx2_negativity(q: &Tgx2Params) -> f64 {
    checked(tgx2_negativity_formula(q), tgx2_matrix(q))
}

/// Closed form, replaced by the trace-norm value (and counted) when they disagree.
pub fn tgx3_negativity(q: &Tgx3Params) -> f64 {
    checked(tgx3_negativity_formula(q), tgx3_matrix(q))
}

/// Probabilities on the circle {sum p = 1, sum p^2 = P} at angle t.
pub fn tgx3_probabilities(purity: f64, t: f64) -> [f64; 3] {
    let radius = (purity - 1.0 / 3.0).max(0.0).sqrt();
    let (s, c) = t.sin_cos();
    let e1 = [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0];
    let e2 = [1.0 / 6f64.sqrt(), 1.0 / 6f64.sqrt(), -2.0 / 6f64.sqrt()];
    let mut p = [0.0; 3];
    for k in 0..3 {
        p[k] = 1.0 / 3.0 + radius * (c * e1[k] + s * e2[k]);
    }
    p
}

fn feasible(p: &[f64; 3]) -> bool {
    p.iter().all(|&v| v > 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TgxOptions {
    pub restarts: usize,
    pub xtol: f64,
    pub max_iter: usize,
    pub exec: Execution,
}

impl Default for TgxOptions {
    fn default() -> Self {
        TgxOptions {
            restarts: 32,
            xtol: 1e-10,
            max_iter: 2000,
            exec: Execution::default(),
        }
    }
}

impl TgxOptions {
    fn nm(&self) -> NelderMeadOptions {
        NelderMeadOptions {
            xtol: self.xtol,
            max_iter: self.max_iter,
            ..NelderMeadOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rank")]
pub enum TgxParams {
    #[serde(rename = "2")]
    Rank2(Tgx2Params),
    #[serde(rename = "3")]
    Rank3(Tgx3Params),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximizationResult {
    #[serde(rename = "P")]
    pub p: f64,
    pub best_value: f64,
    pub best_params: TgxParams,
    pub restarts_used: usize,
    pub converged: bool,
}

struct Local {
    x: Vec<f64>,
    value: f64,
    converged: bool,
}

/// Run the restarts (in parallel when enabled), keep the best, then polish it
/// with one more local search from a smaller simplex.
fn multistart(
    objective: &(impl Fn(&[f64]) -> f64 + Sync),
    start: &(impl Fn(&mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) + Sync),
    polish_steps: &(impl Fn(&[f64]) -> Vec<f64> + Sync),
    opts: &TgxOptions,
    base_seed: u64,
) -> Local {
    let nm = opts.nm();
    let runs = map_indexed(opts.restarts.max(1), opts.exec, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(base_seed, r as u64));
        let (x0, steps) = start(&mut rng);
        let res = nelder_mead(|x| -objective(x), &x0, &steps, &nm);
        Local {
            x: res.x,
            value: -res.fx,
            converged: res.converged,
        }
    });
    // Max-reduction in restart order, so ties resolve the same way every run.
    let mut best = runs
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least one restart");
    let polished = nelder_mead(|x| -objective(x), &best.x, &polish_steps(&best.x), &nm);
    if -polished.fx >= best.value {
        best = Local {
            x: polished.x,
            value: -polished.fx,
            converged: polished.converged,
        };
    }
    best
}

/// Maximize the rank-2 closed form over (theta1, theta2) with p1, p2 fixed by P.
pub fn maximize_tgx2<R: Rng + ?Sized>(
    purity: f64,
    opts: &TgxOptions,
    rng: &mut R,
) -> Result<MaximizationResult> {
    check_domain("P", purity, "[1/2, 1)", (0.5..=P_MAX).contains(&purity))?;
    let f = f_p(purity);
    let (p1, p2) = (0.5 * (1.0 + f), 0.5 * (1.0 - f));
    let objective = |x: &[f64]| {
        tgx2_negativity_formula(&Tgx2Params {
            theta1: x[0],
            theta2: x[1],
            p1,
            p2,
        })
    };
    let start = |rng: &mut ChaCha8Rng| {
        let x0 = vec![rng.random_range(-PI..PI), rng.random_range(-PI..PI)];
        (x0, vec![0.5, 0.5])
    };
    let polish = |_: &[f64]| vec![0.05, 0.05];
    let best = multistart(&objective, &start, &polish, opts, rng.random());
    let params = Tgx2Params::new(best.x[0], best.x[1], p1, p2)?;
    Ok(MaximizationResult {
        p: purity,
        best_value: tgx2_negativity(&params),
        best_params: TgxParams::Rank2(params),
        restarts_used: opts.restarts.max(1),
        converged: best.converged,
    })
}

/// Largest d <= cap (halving) such that t - d and t + d are both feasible.
fn feasible_step(purity: f64, t: f64, cap: f64) -> f64 {
    let mut d = cap;
    for _ in 0..60 {
        if feasible(&tgx3_probabilities(purity, t + d)) && feasible(&tgx3_probabilities(purity, t - d)) {
            return d;
        }
        d *= 0.5;
    }
    d
}

/// Maximize the rank-3 closed form over (theta1, theta2, theta3, t), where t
/// parametrizes the feasible probability circle and infeasible points are rejected.
pub fn maximize_tgx3<R: Rng + ?Sized>(
    purity: f64,
    opts: &TgxOptions,
    rng: &mut R,
) -> Result<MaximizationResult> {
    check_domain("P", purity, "[1/3, 1)", (1.0 / 3.0..=P_MAX).contains(&purity))?;
    let objective = |x: &[f64]| {
        let p = tgx3_probabilities(purity, x[3]);
        if !feasible(&p) {
            return f64::NEG_INFINITY;
        }
        tgx3_negativity_formula(&Tgx3Params {
            theta: [x[0], x[1], x[2]],
            p,
        })
    };
    let start = |rng: &mut ChaCha8Rng| {
        let t = loop {
            let t = rng.random_range(0.0..2.0 * PI);
            if feasible(&tgx3_probabilities(purity, t)) {
                break t;
            }
        };
        let x0 = vec![
            rng.random_range(-PI..PI),
            rng.random_range(-PI..PI),
            rng.random_range(-PI..PI),
            t,
        ];
        (x0, vec![0.5, 0.5, 0.5, feasible_step(purity, t, 0.5)])
    };
    let polish = |x: &[f64]| vec![0.05, 0.05, 0.05, feasible_step(purity, x[3], 0.05)];
    let best = multistart(&objective, &start, &polish, opts, rng.random());
    let params = Tgx3Params::new(
        [best.x[0], best.x[1], best.x[2]],
        tgx3_probabilities(purity, best.x[3]),
    )?;
    Ok(MaximizationResult {
        p: purity,
        best_value: tgx3_negativity(&params),
        best_params: TgxParams::Rank3(params),
        restarts_used: opts.restarts.max(1),
        converged: best.converged,
    })
}
