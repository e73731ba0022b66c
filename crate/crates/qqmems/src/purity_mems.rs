//! Purity-constrained X-state maximizers (rank 2, rank 3, threefold degenerate
//! smallest eigenvalue), the Hedemann comparison curve, and numerical checks of
//! the dual certificates proving optimality.

use serde::{Deserialize, Serialize};

use crate::error::{check_domain, Result};
use crate::hermitian_core::{eigvals_hermitian, ComplexMatrix};
use crate::xstate::XState;

/// Largest purity accepted by the closed forms; P = 1 is only reached as a limit.
pub const P_MAX: f64 = 1.0 - 1e-9;

/// Tolerance used to decide whether a certificate check passed.
pub const CERT_TOL: f64 = 1e-10;

/// Points at which the asymptotic certificates are evaluated.
pub const ASYMPTOTIC_Z: [f64; 3] = [1e3, 1e6, 1e9];

pub fn f_p(p: f64) -> f64 {
    (2.0 * p - 1.0).max(0.0).sqrt()
}

pub fn g_p(p: f64) -> f64 {
    (6.0 * p - 2.0).max(0.0).sqrt()
}

pub fn h_p(p: f64) -> f64 {
    (6.0 * p / 5.0 - 0.2).max(0.0).sqrt()
}

pub fn e_p(p: f64) -> f64 {
    (40.0 * p / 7.0 - 8.0 / 7.0).max(0.0).sqrt()
}

fn rank2_domain(p: f64) -> Result<()> {
    check_domain("P", p, "[1/2, 1)", (0.5..=P_MAX).contains(&p))
}

fn rank3_domain(p: f64) -> Result<()> {
    check_domain("P", p, "[1/3, 1)", (1.0 / 3.0..=P_MAX).contains(&p))
}

fn deg_domain(p: f64) -> Result<()> {
    check_domain("P", p, "(1/5, 1)", p > 0.2 && p <= P_MAX)
}

pub fn n_x_p_rank2(p: f64) -> Result<f64> {
    rank2_domain(p)?;
    Ok(0.5 * (1.0 + f_p(p)))
}

/// Nonzero eigenvalues (l1, l2) of the rank-2 maximizer.
pub fn rank2_eigenvalues(p: f64) -> Result<(f64, f64)> {
    rank2_domain(p)?;
    let f = f_p(p);
    Ok((0.5 * (1.0 + f), 0.5 * (1.0 - f)))
}

pub fn construct_rank2(p: f64) -> Result<XState> {
    let (l1, l2) = rank2_eigenvalues(p)?;
    let half = 0.5 * l1;
    XState::real([0.0, l2, half], [0.0, 0.0, half], [0.0, 0.0, half])
}

pub fn n_x_p_rank3(p: f64) -> Result<f64> {
    rank3_domain(p)?;
    Ok((1.0 + g_p(p)) / 3.0)
}

/// Nonzero eigenvalues (l1, l2, l3) of the rank-3 maximizer, l2 = l3.
pub fn rank3_eigenvalues(p: f64) -> Result<(f64, f64, f64)> {
    rank3_domain(p)?;
    let g = g_p(p);
    let l23 = (2.0 - g) / 6.0;
    Ok(((1.0 + g) / 3.0, l23, l23))
}

pub fn construct_rank3(p: f64) -> Result<XState> {
    let (l1, l2, l3) = rank3_eigenvalues(p)?;
    let half = 0.5 * l1;
    XState::real([0.0, l2, half], [0.0, l3, half], [0.0, 0.0, half])
}

/// (-1 + 5 h_P) / 3, the closed form used below P = 3/8.
pub fn n_deg_mixed_branch(p: f64) -> f64 {
    (-1.0 + 5.0 * h_p(p)) / 3.0
}

pub fn n_x_p_deg(p: f64) -> Result<f64> {
    deg_domain(p)?;
    if p < 0.375 {
        Ok(n_deg_mixed_branch(p))
    } else {
        Ok((1.0 + g_p(p)) / 3.0)
    }
}

/// Eigenvalues of the degenerate maximizer: l1, l2 = l3, and the threefold
/// smallest eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegEigenvalues {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub smallest: f64,
}

impl DegEigenvalues {
    pub fn spectrum(&self) -> [f64; 6] {
        let s = self.smallest;
        [self.l1, self.l2, self.l3, s, s, s]
    }
}

pub fn deg_eigenvalues(p: f64) -> Result<DegEigenvalues> {
    deg_domain(p)?;
    if p < 0.375 {
        Ok(deg_eigenvalues_mixed_branch(p))
    } else {
        let g = g_p(p);
        let l23 = (2.0 - g) / 6.0;
        Ok(DegEigenvalues {
            l1: (1.0 + g) / 3.0,
            l2: l23,
            l3: l23,
            smallest: 0.0,
        })
    }
}

/// The P < 3/8 expressions evaluated at any P (for continuity checks).
pub fn deg_eigenvalues_mixed_branch(p: f64) -> DegEigenvalues {
    let h = h_p(p);
    let l23 = (1.0 + h) / 6.0;
    DegEigenvalues {
        l1: (1.0 + 4.0 * h) / 6.0,
        l2: l23,
        l3: l23,
        smallest: (1.0 - 2.0 * h) / 6.0,
    }
}

pub fn construct_deg(p: f64) -> Result<XState> {
    let e = deg_eigenvalues(p)?;
    let mid = 0.5 * (e.l1 + e.smallest);
    let coh = 0.5 * (e.l1 - e.smallest);
    XState::real([e.smallest, e.l2, mid], [e.smallest, e.l3, mid], [0.0, 0.0, coh])
}

/// Value of the Hedemann comparison curve, or the reason it is not real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HedValue {
    Defined { value: f64 },
    Undefined { radicand: f64 },
}

impl HedValue {
    pub fn value(&self) -> Option<f64> {
        match *self {
            HedValue::Defined { value } => Some(value),
            HedValue::Undefined { .. } => None,
        }
    }
}

/// Radicand (-1 + e_P)^2 - (25/4) e_P^2 of the lower Hedemann branch.
pub fn hed_radicand(p: f64) -> f64 {
    let e = e_p(p);
    (e - 1.0).powi(2) - 6.25 * e * e
}

pub fn n_hed(p: f64) -> Result<HedValue> {
    deg_domain(p)?;
    if p >= 0.375 {
        return Ok(HedValue::Defined {
            value: (1.0 + g_p(p)) / 3.0,
        });
    }
    let rad = hed_radicand(p);
    if rad < 0.0 {
        return Ok(HedValue::Undefined { radicand: rad });
    }
    let e = e_p(p);
    Ok(HedValue::Defined {
        value: 0.2 * (-1.0 + e + rad.sqrt()),
    })
}

/// One row of the maximal-negativity curves; `None` outside a domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PurityCurvePoint {
    pub p: f64,
    pub n2: Option<f64>,
    pub n3: Option<f64>,
    pub ndeg: Option<f64>,
    pub nhed: Option<f64>,
}

pub fn curve_point(p: f64) -> PurityCurvePoint {
    PurityCurvePoint {
        p,
        n2: n_x_p_rank2(p).ok(),
        n3: n_x_p_rank3(p).ok(),
        ndeg: n_x_p_deg(p).ok(),
        nhed: n_hed(p).ok().and_then(|h| h.value()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    Rank2,
    Rank3,
    Deg,
}

impl Theorem {
    pub const ALL: [Theorem; 3] = [Theorem::Rank2, Theorem::Rank3, Theorem::Deg];

    pub fn name(&self) -> &'static str {
        match self {
            Theorem::Rank2 => "rank2",
            Theorem::Rank3 => "rank3",
            Theorem::Deg => "deg",
        }
    }

    pub fn check_domain(&self, p: f64) -> Result<()> {
        match self {
            Theorem::Rank2 => rank2_domain(p),
            Theorem::Rank3 => rank3_domain(p),
            Theorem::Deg => deg_domain(p),
        }
    }

    pub fn max_negativity(&self, p: f64) -> Result<f64> {
        match self {
            Theorem::Rank2 => n_x_p_rank2(p),
            Theorem::Rank3 => n_x_p_rank3(p),
            Theorem::Deg => n_x_p_deg(p),
        }
    }

    /// n evenly spaced purities covering the domain; closed left endpoints
    /// are included, the right endpoint 1 never is.
    pub fn domain_grid(&self, n: usize) -> Vec<f64> {
        let (lo, closed) = match self {
            Theorem::Rank2 => (0.5, true),
            Theorem::Rank3 => (1.0 / 3.0, true),
            Theorem::Deg => (0.2, false),
        };
        let width = 1.0 - lo;
        (0..n)
            .map(|i| {
                if closed {
                    lo + width * i as f64 / n as f64
                } else {
                    lo + width * (i + 1) as f64 / (n + 1) as f64
                }
            })
            .collect()
    }
}

impl std::str::FromStr for Theorem {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rank2" => Ok(Theorem::Rank2),
            "rank3" => Ok(Theorem::Rank3),
            "deg" => Ok(Theorem::Deg),
            other => Err(format!("unknown theorem '{other}' (rank2, rank3, deg)")),
        }
    }
}

/// Asymptotic dual certificate evaluated along z -> infinity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCheck {
    pub z: Vec<f64>,
    pub lambda_plus: Vec<f64>,
    pub lambda_minus: Vec<f64>,
    /// Max relative gap between the closed-form pair and the Jacobi eigenvalues at z = 1e3.
    pub eigen_residual: f64,
    pub plus_nonnegative: bool,
    pub minus_negative: bool,
    pub minus_monotone_to_zero: bool,
}

impl AsymptoticCheck {
    pub fn passed(&self) -> bool {
        self.plus_nonnegative
            && self.minus_negative
            && self.minus_monotone_to_zero
            && self.eigen_residual <= CERT_TOL
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    pub theorem_id: Theorem,
    #[serde(rename = "P")]
    pub p: f64,
    pub primal_point: Vec<f64>,
    /// Linear objective at the primal point (before the constant offset).
    pub primal_value: f64,
    /// primal_value minus the constant offset, i.e. the negativity.
    pub negativity: f64,
    pub primal_min_eigenvalue: f64,
    pub primal_feasible: bool,
    /// Largest gap between the computed and the closed-form spectrum of F(x).
    pub primal_spectrum_residual: f64,
    /// tr[F_0 Z].
    pub dual_value: f64,
    /// tr[F_i Z] - c_i for each constraint (both z = 0 and z = 1 for asymptotic certificates).
    pub dual_trace_residuals: Vec<f64>,
    /// Min eigenvalue of Z; for asymptotic certificates, Lambda_-(1e9).
    pub dual_psd_margin: f64,
    /// Largest gap between the computed and the closed-form spectrum of Z (interior certificates).
    pub dual_spectrum_residual: f64,
    pub asymptotic: Option<AsymptoticCheck>,
    /// tr[F_0 Z] - primal_value.
    pub duality_gap: f64,
    pub verified: bool,
}

/// The certificate data for one theorem at one purity.
pub struct CertificateData {
    /// F_0, F_1, ..., F_m.
    pub f: Vec<ComplexMatrix>,
    /// Dual equality right-hand sides tr[F_i Z] = c_i.
    pub c: Vec<f64>,
    /// Constant subtracted from the linear objective to get the negativity.
    pub offset: f64,
    pub primal_point: Vec<f64>,
    /// Closed-form spectrum of F(primal_point).
    pub primal_spectrum: Vec<f64>,
    pub dual: DualCertificate,
}

pub enum DualCertificate {
    Interior {
        z: ComplexMatrix,
        /// Closed-form spectrum of z.
        spectrum: Vec<f64>,
    },
    /// One-parameter family Z(z), PSD only in the limit.
    Asymptotic {
        z: fn(f64) -> ComplexMatrix,
        /// Closed-form nonzero eigenvalues (Lambda_+, Lambda_-).
        lambda: fn(f64) -> (f64, f64),
    },
}

fn rm(blocks: &[&[&[f64]]]) -> ComplexMatrix {
    ComplexMatrix::real_block_diag(blocks).expect("certificate blocks are square and small")
}

fn rank2_z_asymptotic(z: f64) -> ComplexMatrix {
    rm(&[&[&[0.0]], &[&[z, 0.5 - z], &[0.5 - z, z - 1.0]]])
}

fn rank2_lambda(z: f64) -> (f64, f64) {
    let plus = z - 0.5 + (z * z - (z - 0.5)).sqrt();
    // Lambda_+ Lambda_- = -1/4; dividing avoids cancellation at large z.
    (plus, -0.25 / plus)
}

fn rank3_z_asymptotic(z: f64) -> ComplexMatrix {
    rm(&[
        &[&[0.0]],
        &[
            &[z, z - 0.5, -z + 0.5],
            &[z - 0.5, z - 1.0, -z + 1.0],
            &[-z + 0.5, -z + 1.0, z - 1.0],
        ],
    ])
}

fn rank3_lambda(z: f64) -> (f64, f64) {
    let plus = 1.5 * z - 1.0 + 0.75f64.sqrt() * (3.0 * z * z - 4.0 * z + 2.0).sqrt();
    // Lambda_+ Lambda_- = -1/2.
    (plus, -0.5 / plus)
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// F_i, dual constraints, primal point and dual matrix for a theorem and purity.
pub fn certificate_data(theorem: Theorem, p: f64) -> Result<CertificateData> {
    theorem.check_domain(p)?;
    let data = match theorem {
        Theorem::Rank2 => {
            let f = f_p(p);
            let (l1, _) = rank2_eigenvalues(p)?;
            let f0 = rm(&[&[&[1.0]], &[&[0.5, 0.0], &[0.0, p - 1.0]]]);
            let f1 = rm(&[&[&[-1.0]], &[&[0.0, 1.0], &[1.0, 2.0]]]);
            let dual = if p == 0.5 {
                DualCertificate::Asymptotic {
                    z: rank2_z_asymptotic,
                    lambda: rank2_lambda,
                }
            } else {
                let off = -0.5 * (1.0 + 1.0 / f);
                DualCertificate::Interior {
                    z: rm(&[
                        &[&[0.0]],
                        &[&[1.0 + f / 2.0 + 1.0 / (2.0 * f), off], &[off, 1.0 / (2.0 * f)]],
                    ]),
                    spectrum: sorted(vec![0.0, 0.0, 1.0 + f / 2.0 + 1.0 / f]),
                }
            };
            CertificateData {
                f: vec![f0, f1],
                c: vec![-1.0],
                offset: 0.0,
                primal_point: vec![l1],
                primal_spectrum: sorted(vec![0.0, (1.0 - f) / 2.0, 1.0 + f + f * f / 2.0]),
                dual,
            }
        }
        Theorem::Rank3 => {
            let g = g_p(p);
            let (l1, l2, _) = rank3_eigenvalues(p)?;
            let third = 1.0 / 3.0;
            let f0 = rm(&[
                &[&[1.0]],
                &[
                    &[2.0 * third, -third, 0.0],
                    &[-third, 2.0 * third, 0.0],
                    &[0.0, 0.0, p - 1.0],
                ],
            ]);
            let f1 = rm(&[
                &[&[-1.0]],
                &[&[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0], &[1.0, 0.0, 2.0]],
            ]);
            let f2 = rm(&[
                &[&[-1.0]],
                &[&[0.0, 0.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 1.0, 2.0]],
            ]);
            let dual = if p == 1.0 / 3.0 {
                DualCertificate::Asymptotic {
                    z: rank3_z_asymptotic,
                    lambda: rank3_lambda,
                }
            } else {
                let a = 1.0 + g / 4.0 + 1.0 / g;
                let b = 0.5 + 1.0 / g;
                let c = 1.0 / g;
                DualCertificate::Interior {
                    z: rm(&[&[&[0.0]], &[&[a, b, -b], &[b, c, -c], &[-b, -c, c]]]),
                    spectrum: sorted(vec![0.0, 0.0, 0.0, 1.0 + g / 4.0 + 3.0 / g]),
                }
            };
            let root = (16.0 + 4.0 * g + g * g).sqrt();
            let alpha = |s: f64| (12.0 + 2.0 * g + g * g + s * g * root) / 12.0;
            CertificateData {
                f: vec![f0, f1, f2],
                c: vec![-1.0, 0.0],
                offset: 0.0,
                primal_point: vec![l1, l2],
                primal_spectrum: sorted(vec![0.0, (2.0 - g) / 6.0, alpha(-1.0), alpha(1.0)]),
                dual,
            }
        }
        Theorem::Deg => {
            let e = deg_eigenvalues(p)?;
            let (s, o) = (5.0 / 6.0, -1.0 / 6.0);
            let f0 = rm(&[
                &[&[1.0]],
                &[
                    &[s, o, o, 0.0],
                    &[o, s, o, 0.0],
                    &[o, o, s, 0.0],
                    &[0.0, 0.0, 0.0, p - 1.0 / 3.0],
                ],
            ]);
            let fi = |i: usize| {
                let mut b = [[0.0; 4]; 4];
                b[i][3] = 1.0;
                b[3][i] = 1.0;
                b[3][3] = 2.0 / 3.0;
                rm(&[&[&[-1.0]], &[&b[0], &b[1], &b[2], &b[3]]])
            };
            let (z, z_spec, primal_spec) = if p < 0.375 {
                let h = h_p(p);
                let pp = 2.0 / 3.0 + h + 1.0 / (9.0 * h);
                let q = 0.5 + h / 2.0 + 1.0 / (9.0 * h);
                let r = -1.0 - 1.0 / (3.0 * h);
                let ss = 1.0 / 3.0 + h / 4.0 + 1.0 / (9.0 * h);
                let t = -0.5 - 1.0 / (3.0 * h);
                let u = 1.0 / h;
                let z = rm(&[
                    &[&[0.0]],
                    &[&[pp, q, q, r], &[q, ss, ss, t], &[q, ss, ss, t], &[r, t, t, u]],
                ]);
                let root = (4.0 - 16.0 * h + 8.0 * h * h + 40.0 * h.powi(3) + 25.0 * h.powi(4)).sqrt();
                let beta = |sg: f64| (10.0 + 4.0 * h + 5.0 * h * h + sg * root) / 12.0;
                (
                    z,
                    vec![0.0, 0.0, 0.0, 0.0, 4.0 / 3.0 + 1.5 * h + 4.0 / (3.0 * h)],
                    vec![1.0, 0.0, 0.5 - h, beta(-1.0), beta(1.0)],
                )
            } else {
                let g = g_p(p);
                let z00 = 4.0 / 3.0 - 2.0 / (3.0 * g);
                let pp = 4.0 / 9.0 + g / 9.0 + 4.0 / (9.0 * g);
                let q = 1.0 / 9.0 - g / 18.0 + 4.0 / (9.0 * g);
                let r = -1.0 / 3.0 - 2.0 / (3.0 * g);
                let ss = -2.0 / 9.0 + g / 36.0 + 4.0 / (9.0 * g);
                let t = 1.0 / 6.0 - 2.0 / (3.0 * g);
                let u = 1.0 / g;
                let z = rm(&[
                    &[&[z00]],
                    &[&[pp, q, q, r], &[q, ss, ss, t], &[q, ss, ss, t], &[r, t, t, u]],
                ]);
                let root = (1.0 + 14.0 * g * g + g.powi(4)).sqrt();
                let gamma = |sg: f64| (13.0 + g * g + sg * root) / 12.0;
                (
                    z,
                    // The 1x1 entry is itself an eigenvalue of Z.
                    vec![0.0, 0.0, 0.0, z00, g / 6.0 + 7.0 / (3.0 * g)],
                    vec![1.0, 0.0, 0.0, gamma(-1.0), gamma(1.0)],
                )
            };
            CertificateData {
                f: vec![f0, fi(0), fi(1), fi(2)],
                c: vec![-2.0, -1.0, -1.0],
                offset: 1.0,
                primal_point: vec![e.l1, e.l2, e.l3],
                primal_spectrum: sorted(primal_spec),
                dual: DualCertificate::Interior {
                    z,
                    spectrum: sorted(z_spec),
                },
            }
        }
    };
    Ok(data)
}

impl CertificateData {
    /// F_0 + sum_i x_i F_i.
    pub fn primal_matrix(&self, x: &[f64]) -> ComplexMatrix {
        let mut m = self.f[0].clone();
        for (xi, fi) in x.iter().zip(&self.f[1..]) {
            m = &m + &fi.scale(*xi);
        }
        m
    }

    /// Linear primal objective -sum_i c_i x_i.
    pub fn objective(&self, x: &[f64]) -> f64 {
        -x.iter().zip(&self.c).map(|(xi, ci)| xi * ci).sum::<f64>()
    }

    fn trace_residuals(&self, z: &ComplexMatrix) -> Vec<f64> {
        self.f[1..]
            .iter()
            .zip(&self.c)
            .map(|(fi, ci)| fi.trace_product(z).re - ci)
            .collect()
    }
}

fn max_gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(1.0))
        .fold(0.0, f64::max)
}

/// Evaluate primal feasibility, dual constraints, dual PSD-ness and the
/// duality gap for one theorem and purity.
pub fn verify_certificate(theorem: Theorem, p: f64) -> Result<CertificateReport> {
    let data = certificate_data(theorem, p)?;
    let x = &data.primal_point;
    let fx = data.primal_matrix(x);
    let primal_eigs = eigvals_hermitian(&fx)?;
    let primal_min_eigenvalue = primal_eigs[0];
    let primal_value = data.objective(x);
    let primal_spectrum_residual = max_gap(&primal_eigs, &data.primal_spectrum);

    let (dual_value, dual_trace_residuals, dual_psd_margin, dual_spectrum_residual, asymptotic) =
        match &data.dual {
            DualCertificate::Interior { z, spectrum } => {
                let eigs = eigvals_hermitian(z)?;
                (
                    data.f[0].trace_product(z).re,
                    data.trace_residuals(z),
                    eigs[0],
                    max_gap(&eigs, spectrum),
                    None,
                )
            }
            DualCertificate::Asymptotic { z, lambda } => {
                // Trace conditions are affine in z: checking z = 0 and z = 1
                // covers every z without large-z roundoff.
                let (z0, z1) = (z(0.0), z(1.0));
                let mut residuals = data.trace_residuals(&z0);
                residuals.extend(data.trace_residuals(&z1));
                let v0 = data.f[0].trace_product(&z0).re;
                let v1 = data.f[0].trace_product(&z1).re;
                residuals.push(v1 - v0);

                let pairs: Vec<(f64, f64)> = ASYMPTOTIC_Z.iter().map(|&t| lambda(t)).collect();
                let lambda_plus: Vec<f64> = pairs.iter().map(|p| p.0).collect();
                let lambda_minus: Vec<f64> = pairs.iter().map(|p| p.1).collect();
                let jacobi = eigvals_hermitian(&z(ASYMPTOTIC_Z[0]))?;
                let n = jacobi.len();
                let eigen_residual = ((jacobi[n - 1] - lambda_plus[0]).abs()
                    / lambda_plus[0].abs())
                .max((jacobi[0] - lambda_minus[0]).abs() / lambda_plus[0].abs());
                // Lambda_- = O(1/z): z |Lambda_-| must settle to a constant.
                let scaled: Vec<f64> = ASYMPTOTIC_Z
                    .iter()
                    .zip(&lambda_minus)
                    .map(|(t, l)| t * l.abs())
                    .collect();
                let settles = ((scaled[2] - scaled[1]) / scaled[2]).abs() < 1e-3;
                let check = AsymptoticCheck {
                    z: ASYMPTOTIC_Z.to_vec(),
                    plus_nonnegative: lambda_plus.iter().all(|&v| v >= 0.0),
                    minus_negative: lambda_minus.iter().all(|&v| v < 0.0),
                    minus_monotone_to_zero: lambda_minus.windows(2).all(|w| w[1].abs() < w[0].abs())
                        && settles,
                    lambda_plus,
                    lambda_minus,
                    eigen_residual,
                };
                let margin = *check.lambda_minus.last().expect("three points");
                (v0, residuals, margin, 0.0, Some(check))
            }
        };

    let duality_gap = dual_value - primal_value;
    let psd_ok = match &asymptotic {
        Some(a) => a.passed(),
        None => dual_psd_margin >= -CERT_TOL,
    };
    let primal_feasible = primal_min_eigenvalue >= -CERT_TOL;
    let verified = primal_feasible
        && psd_ok
        && dual_trace_residuals.iter().all(|r| r.abs() <= CERT_TOL)
        && duality_gap.abs() <= CERT_TOL
        && primal_spectrum_residual <= CERT_TOL
        && dual_spectrum_residual <= CERT_TOL;

    Ok(CertificateReport {
        theorem_id: theorem,
        p,
        primal_point: x.clone(),
        primal_value,
        negativity: primal_value - data.offset,
        primal_min_eigenvalue,
        primal_feasible,
        primal_spectrum_residual,
        dual_value,
        dual_trace_residuals,
        dual_psd_margin,
        dual_spectrum_residual,
        asymptotic,
        duality_gap,
        verified,
    })
}
