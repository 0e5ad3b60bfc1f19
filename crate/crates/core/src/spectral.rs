//! Affine-linear representation of the update operator, symmetric
//! eigensolving, spectral radius, gauge transform, and influence analysis.
//!
//! The exact eigen kernel is restricted to symmetric matrices (cyclic
//! Jacobi); every statement consuming exact spectra assumes the symmetric
//! soft-opposition class. General matrices get a dominant-modulus estimate
//! flagged as such.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{self, BipartitionCertificate};
use crate::graph::SignedMultigraph;
use crate::{Error, Result};

/// Off-diagonal magnitude at which the Jacobi sweep stops.
pub const JACOBI_OFF_TOL: f64 = 1e-12;

/// Tolerance for accepting a matrix as symmetric.
pub const SYM_TOL: f64 = 1e-12;

/// Tolerance for testing +-1 membership in a Jacobi spectrum.
pub const EIG_MEMBERSHIP_TOL: f64 = 1e-8;

/// Power-iteration controls: deterministic seed, vector tolerance, cap.
const POWER_SEED: u64 = 0x5eed_0001;
const POWER_TOL: f64 = 1e-12;
const POWER_MAX_ITERS: usize = 10_000;

/// The update operator written as `x -> Ax + d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineRep {
    pub a: Vec<Vec<f64>>,
    pub d: Vec<f64>,
}

impl AffineRep {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.d)
            .map(|(row, di)| row.iter().zip(x).map(|(aij, xj)| aij * xj).sum::<f64>() + di)
            .collect()
    }
}

/// Build `(A, d)` for a graph whose deviation specs all act affinely
/// (soft opposition is `a = -1`, constants are `a = 0`); per-edge
/// parameters are allowed. Errors when some positively weighted deviate
/// edge carries a non-affine spec or the spectrum is discrete.
pub fn affine_representation(g: &SignedMultigraph) -> Result<AffineRep> {
    if !g.spectrum().is_continuous() {
        return Err(Error::RepresentationUnavailable(
            "affine representation needs an interval spectrum".into(),
        ));
    }
    let n = g.n();
    let mut a = vec![vec![0.0; n]; n];
    let mut d = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            let w = g.weight(i, j);
            if w == 0.0 {
                continue;
            }
            match g.relation(i, j) {
                crate::graph::Relation::Follow => a[i][j] = w,
                crate::graph::Relation::Deviate(id) => {
                    let spec = g.deviation(id).ok_or_else(|| {
                        Error::RepresentationUnavailable(format!("dangling spec `{id}`"))
                    })?;
                    let (slope, offset) = spec.as_affine(g.spectrum()).ok_or_else(|| {
                        Error::RepresentationUnavailable(format!(
                            "deviation `{id}` ({}) is not affine",
                            spec.kind_name()
                        ))
                    })?;
                    a[i][j] = slope * w;
                    d[i] += offset * w;
                }
            }
        }
    }
    Ok(AffineRep { a, d })
}

/// Entrywise absolute value.
pub fn abs_matrix(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    a.iter().map(|row| row.iter().map(|x| x.abs()).collect()).collect()
}

/// Max |A_ij - A_ji|.
pub fn asymmetry(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[i][j] - a[j][i]).abs());
        }
    }
    worst
}

/// Eigen decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues, ascending.
    pub values: Vec<f64>,
    /// `vectors[k]` is the orthonormal eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

impl SymmetricEigen {
    /// True iff some eigenvalue is within `tol` of `lambda`.
    pub fn contains(&self, lambda: f64, tol: f64) -> bool {
        self.values.iter().any(|v| (v - lambda).abs() <= tol)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Full real spectrum of a symmetric matrix via cyclic Jacobi rotations.
/// The off-diagonal magnitude is driven below [`JACOBI_OFF_TOL`].
pub fn eigen_symmetric(a: &[Vec<f64>]) -> Result<SymmetricEigen> {
    let n = a.len();
    let worst = asymmetry(a);
    if worst > SYM_TOL {
        return Err(Error::NotSymmetric {
            found: worst,
            tol: SYM_TOL,
        });
    }
    let mut m: Vec<Vec<f64>> = a.to_vec();
    // symmetrize exactly so rounding in the input cannot bias the sweep
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m[i][j] + m[j][i]);
            m[i][j] = avg;
            m[j][i] = avg;
        }
    }
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }

    let max_off = |m: &Vec<Vec<f64>>| -> f64 {
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max(m[i][j].abs());
            }
        }
        worst
    };

    for _sweep in 0..200 {
        if max_off(&m) < JACOBI_OFF_TOL {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p][q];
                if apq.abs() < JACOBI_OFF_TOL * 1e-3 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i][i].partial_cmp(&m[j][j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| m[i][i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row][col]).collect())
        .collect();
    Ok(SymmetricEigen { values, vectors })
}

/// Spectral radius with an exactness flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralRadius {
    pub value: f64,
    /// True when computed from the full symmetric spectrum; false for the
    /// power-iteration estimate on general matrices.
    pub exact: bool,
}

/// Spectral radius: exact (Jacobi) for symmetric matrices, otherwise a
/// dominant-modulus estimate from power iteration with a two-term
/// recurrence fit that also covers complex conjugate pairs. The fit is
/// cross-checked against the norm limit `||A^(2^k)||^(1/2^k)`, which wins
/// whenever they disagree (three or more equal-modulus eigenvalues defeat
/// a two-term recurrence).
pub fn spectral_radius(a: &[Vec<f64>]) -> SpectralRadius {
    if asymmetry(a) <= SYM_TOL {
        if let Ok(eig) = eigen_symmetric(a) {
            return SpectralRadius {
                value: eig.spectral_radius(),
                exact: true,
            };
        }
    }
    let fit = dominant_modulus_estimate(a);
    let norm_limit = gelfand_estimate(a);
    let value = if (fit - norm_limit).abs() <= 1e-7 * norm_limit.max(1.0) {
        fit
    } else {
        norm_limit
    };
    SpectralRadius {
        value,
        exact: false,
    }
}

/// `||A^(2^k)||_F^(1/2^k)` by repeated squaring with rescaling: an upper
/// bound on the spectral radius for every k, converging as the root
/// crushes the norm constants.
fn gelfand_estimate(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let mut b: Vec<Vec<f64>> = a.to_vec();
    let frob = |m: &[Vec<f64>]| -> f64 {
        m.iter()
            .flat_map(|r| r.iter())
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    };
    let s0 = frob(&b);
    if s0 == 0.0 {
        return 0.0;
    }
    for row in b.iter_mut() {
        for x in row.iter_mut() {
            *x /= s0;
        }
    }
    // invariant: A^(2^k) = B * exp(acc), with ||B||_F = 1
    let mut acc = s0.ln();
    for k in 0..48u32 {
        let mut sq = vec![vec![0.0; n]; n];
        for i in 0..n {
            for l in 0..n {
                let bil = b[i][l];
                if bil == 0.0 {
                    continue;
                }
                for j in 0..n {
                    sq[i][j] += bil * b[l][j];
                }
            }
        }
        let s = frob(&sq);
        if s == 0.0 || !s.is_finite() {
            return 0.0; // nilpotent: the powers vanished
        }
        for row in sq.iter_mut() {
            for x in row.iter_mut() {
                *x /= s;
            }
        }
        b = sq;
        acc = 2.0 * acc + s.ln();
        let _ = k;
    }
    (acc / 2f64.powi(48)).exp()
}

fn mat_vec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(aij, xj)| aij * xj).sum())
        .collect()
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Power iteration on a seeded random start. Each step fits the two-term
/// recurrence `y_{k+2} = p y_{k+1} + q y_k` by least squares; the roots of
/// `mu^2 - p mu - q` cover a dominant real eigenvalue and a dominant
/// complex pair alike. Tolerance 1e-9 on the estimate.
fn dominant_modulus_estimate(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_SEED);
    let mut u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let nu = norm2(&u);
    if nu == 0.0 {
        u[0] = 1.0;
    } else {
        u.iter_mut().for_each(|x| *x /= nu);
    }
    let mut v = mat_vec(a, &u);
    let mut w = mat_vec(a, &v);

    let mut prev = f64::INFINITY;
    let mut stable = 0;
    for _ in 0..POWER_MAX_ITERS {
        if norm2(&w) == 0.0 {
            return 0.0; // the orbit died out
        }
        // least squares for w ~ p*v + q*u
        let vv = dot(&v, &v);
        let uu = dot(&u, &u);
        let uv = dot(&u, &v);
        let vw = dot(&v, &w);
        let uw = dot(&u, &w);
        let det = vv * uu - uv * uv;
        let est = if det.abs() > 1e-14 * vv.max(uu).max(1e-300) {
            let p = (vw * uu - uw * uv) / det;
            let q = (vv * uw - uv * vw) / det;
            let disc = p * p + 4.0 * q;
            if disc >= 0.0 {
                let r = disc.sqrt();
                (0.5 * (p + r)).abs().max((0.5 * (p - r)).abs())
            } else {
                (-q).sqrt()
            }
        } else if vv > 0.0 {
            // iterates are collinear: plain Rayleigh ratio
            (vw / vv).abs()
        } else {
            0.0
        };
        if (est - prev).abs() <= 1e-9 * est.max(1.0) {
            stable += 1;
            if stable >= 3 {
                return est;
            }
        } else {
            stable = 0;
        }
        prev = est;

        let next = mat_vec(a, &w);
        u = v;
        v = w;
        w = next;
        let s = norm2(&w);
        if s > 0.0 {
            let inv = 1.0 / s;
            u.iter_mut().for_each(|x| *x *= inv);
            v.iter_mut().for_each(|x| *x *= inv);
            w.iter_mut().for_each(|x| *x *= inv);
        }
    }
    prev
}

/// Diagonal +-1 gauge: `Delta A Delta = |A|` entrywise, existing exactly
/// when the network is opposition bipartite (signs +1 on side 1, -1 on
/// side 2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeMatrix {
    pub signs: Vec<f64>,
}

impl GaugeMatrix {
    /// `Delta A Delta`.
    pub fn conjugate(&self, a: &[Vec<f64>]) -> Vec<Vec<f64>> {
        a.iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, x)| self.signs[i] * x * self.signs[j])
                    .collect()
            })
            .collect()
    }
}

/// Gauge matrix of a symmetric soft-opposition network, `None` when no
/// opposition bipartition exists. Errors if the graph is outside the
/// symmetric soft-opposition class.
pub fn gauge_matrix(g: &SignedMultigraph) -> Result<Option<GaugeMatrix>> {
    let report = g.is_sslss();
    if !report.is_sslss {
        return Err(Error::InvalidInput(format!(
            "gauge transform needs the symmetric soft-opposition class: {}",
            report.problems.join("; ")
        )));
    }
    let all: Vec<usize> = (0..g.n()).collect();
    Ok(analysis::opposition_bipartition(g, &all).map(|cert| GaugeMatrix {
        signs: (0..g.n()).map(|i| cert.sign_of(i).unwrap()).collect(),
    }))
}

/// Influence weights and long-run prediction for strongly connected,
/// aperiodic, opposition-bipartite symmetric soft-opposition networks:
/// every agent ends at `a` or `-a` with `a = sum_j g(j) s_j b_j(0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceReport {
    /// Left unit eigenvector of |A| normalized to sum 1; agent j's
    /// absolute power is `s_j`.
    pub s: Vec<f64>,
    /// +-1 side signs from the opposition bipartition.
    pub g_signs: Vec<f64>,
    pub certificate: BipartitionCertificate,
}

impl InfluenceReport {
    /// Predicted long-run value `a` and per-agent limit vector for an
    /// initial profile.
    pub fn predict(&self, b0: &[f64]) -> (f64, Vec<f64>) {
        let a: f64 = self
            .g_signs
            .iter()
            .zip(&self.s)
            .zip(b0)
            .map(|((g, s), b)| g * s * b)
            .sum();
        let limit = self.g_signs.iter().map(|g| g * a).collect();
        (a, limit)
    }
}

/// Compute the influence report, naming the violated condition on failure:
/// reverse-opposition-bipartite networks diverge (influence undefined),
/// imbalanced ones forget initial opinions (all powers zero).
pub fn influence_report(g: &SignedMultigraph) -> Result<InfluenceReport> {
    let ssls = g.is_sslss();
    if !ssls.is_sslss {
        return Err(Error::Regime {
            condition: format!(
                "not in the symmetric soft-opposition class ({})",
                ssls.problems.join("; ")
            ),
        });
    }
    let all: Vec<usize> = (0..g.n()).collect();
    if !analysis::is_strongly_connected(g, &all) {
        return Err(Error::Regime {
            condition: "not strongly connected".into(),
        });
    }
    let reverse = analysis::reverse_opposition_bipartition(g, &all);
    if reverse.is_some() {
        return Err(Error::Regime {
            condition: "reverse opposition bipartite: the dynamics diverge, \
                        opinion leadership is undefined"
                .into(),
        });
    }
    let cert = match analysis::opposition_bipartition(g, &all) {
        Some(c) => c,
        None => {
            return Err(Error::Regime {
                condition: "neither opposition bipartite nor reverse opposition \
                            bipartite: all influence weights are zero"
                    .into(),
            })
        }
    };
    // periodic + opposition bipartite would also be reverse bipartite and
    // is already rejected above; this guards the remaining corner exactly.
    if analysis::period(g, &all)? != 1 {
        return Err(Error::Regime {
            condition: "periodic network".into(),
        });
    }

    let a = affine_representation(g)?.a;
    let s = stationary_left_vector(&abs_matrix(&a));
    let g_signs: Vec<f64> = (0..g.n()).map(|i| cert.sign_of(i).unwrap()).collect();
    Ok(InfluenceReport {
        s,
        g_signs,
        certificate: cert,
    })
}

/// Left unit eigenvector of a row-stochastic matrix by power iteration on
/// the transpose, normalized to sum 1. Deterministic uniform start.
fn stationary_left_vector(p: &[Vec<f64>]) -> Vec<f64> {
    let n = p.len();
    let mut s = vec![1.0 / n as f64; n];
    for _ in 0..POWER_MAX_ITERS {
        let mut next = vec![0.0; n];
        for (i, row) in p.iter().enumerate() {
            for j in 0..n {
                next[j] += s[i] * row[j];
            }
        }
        let total: f64 = next.iter().sum();
        if total > 0.0 {
            next.iter_mut().for_each(|x| *x /= total);
        }
        let delta = next
            .iter()
            .zip(&s)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        s = next;
        if delta < POWER_TOL {
            break;
        }
    }
    s
}
