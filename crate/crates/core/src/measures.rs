//! Entanglement measures of three-qubit pure states.
//!
//! Two-qubit concurrence and concurrence of assistance (CoA) are evaluated in
//! closed form from a pure-state ensemble `{v_k}` of the reduced matrix. With
//! `T_kl = v_kᵀ (σy⊗σy) v_l` and `s_i` the singular values of `T` (the square
//! roots of the eigenvalues of `ρ ρ̃`), the concurrence is
//! `max(0, s1 - s2 - s3 - s4)` and the CoA is `Σ s_i`.
//!
//! For rank ≤ 2, which covers every reduced pair of a three-qubit pure state,
//! `(s1 ± s2)² = ||T||_F² ± 2|det T|` is used directly so that no small
//! singular value is ever extracted by a square root of roundoff.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};
use crate::par::stream_rng;
use crate::qmath::{
    hermitian_eigensystem, partial_trace, pauli_y, psd_sqrt, single_qubit_marginal, ComplexMatrix, Qubit, QubitPair,
    C64, ZERO,
};
use crate::states::{PureState3, SchmidtParams};
use crate::tol;

fn clamped_sqrt(x: f64, what: &str) -> Result<f64> {
    if x >= 0.0 {
        Ok(x.sqrt())
    } else if x > -tol::SQRT_CLAMP {
        Ok(0.0)
    } else {
        Err(Error::NumericalDomain(format!("negative radicand {x:e} in {what}")))
    }
}

/// `C_{i(jk)} = 2 √det ρ_i` for the cut separating `solo` from the other two
/// qubits.
pub fn concurrence_bipartition(state: &PureState3, solo: Qubit) -> f64 {
    bipartition_sq(state, solo).sqrt()
}

fn bipartition_sq(state: &PureState3, solo: Qubit) -> f64 {
    let rho = single_qubit_marginal(state, solo);
    let det = rho[(0, 0)].re * rho[(1, 1)].re - rho[(0, 1)].norm_sqr();
    (4.0 * det).clamp(0.0, 1.0)
}

fn yy() -> ComplexMatrix {
    let y = pauli_y();
    y.kron(&y)
}

/// `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`.
pub fn spin_flip(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho.dim() != 4 {
        return Err(Error::invalid("spin flip acts on two-qubit (4x4) matrices"));
    }
    let yy = yy();
    Ok(yy.matmul(&rho.conj()).matmul(&yy))
}

/// `vᵀ (σy⊗σy) w`.
fn flip_product(v: &[C64], w: &[C64]) -> C64 {
    -v[0] * w[3] + v[1] * w[2] + v[2] * w[1] - v[3] * w[0]
}

/// Concurrence and CoA of one two-qubit reduced state, with their squares
/// kept separately for the monogamy bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairConcurrences {
    pub concurrence: f64,
    pub assistance: f64,
    pub concurrence_sq: f64,
    pub assistance_sq: f64,
}

fn from_ensemble(vs: &[Vec<C64>]) -> Result<PairConcurrences> {
    let r = vs.len();
    let t = |k: usize, l: usize| flip_product(&vs[k], &vs[l]);
    let (c_sq, a_sq) = match r {
        0 => (0.0, 0.0),
        1 => {
            let x = t(0, 0).norm_sqr();
            (x, x)
        }
        2 => {
            let (t00, t01, t11) = (t(0, 0), t(0, 1), t(1, 1));
            let frob = t00.norm_sqr() + 2.0 * t01.norm_sqr() + t11.norm_sqr();
            let det = (t00 * t11 - t01 * t01).norm();
            ((frob - 2.0 * det).max(0.0), frob + 2.0 * det)
        }
        _ => {
            let mut gram = ComplexMatrix::zeros(r);
            for i in 0..r {
                for j in 0..r {
                    gram[(i, j)] = (0..r).map(|k| t(k, i).conj() * t(k, j)).sum();
                }
            }
            let eig = hermitian_eigensystem(&gram)?;
            let s: Vec<f64> = eig.eigenvalues.iter().map(|w| w.max(0.0).sqrt()).collect();
            let c = (s[0] - s[1..].iter().sum::<f64>()).max(0.0);
            let a: f64 = s.iter().sum();
            (c * c, a * a)
        }
    };
    Ok(PairConcurrences {
        concurrence: c_sq.sqrt(),
        assistance: a_sq.sqrt(),
        concurrence_sq: c_sq,
        assistance_sq: a_sq,
    })
}

/// Concurrence and CoA of a two-qubit density matrix.
pub fn pair_concurrences(rho: &ComplexMatrix) -> Result<PairConcurrences> {
    if rho.dim() != 4 {
        return Err(Error::invalid("expected a two-qubit (4x4) density matrix"));
    }
    let eig = hermitian_eigensystem(rho)?;
    if let Some(&w) = eig.eigenvalues.last() {
        if w < -tol::PSD_REJECT {
            return Err(Error::NumericalDomain(format!("density matrix has eigenvalue {w:e}")));
        }
    }
    let vs: Vec<Vec<C64>> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > tol::RANK_FLOOR)
        .map(|(k, &w)| eig.eigenvector(k).into_iter().map(|z| z * w.sqrt()).collect())
        .collect();
    from_ensemble(&vs)
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn concurrence_mixed(rho: &ComplexMatrix) -> Result<f64> {
    Ok(pair_concurrences(rho)?.concurrence)
}

/// Concurrence of assistance of a two-qubit density matrix.
pub fn coa_mixed(rho: &ComplexMatrix) -> Result<f64> {
    Ok(pair_concurrences(rho)?.assistance)
}

/// `(C^a_12, C^a_23, C^a_31)` evaluated directly on canonical parameters.
pub fn coa_from_schmidt(s: &SchmidtParams) -> Result<[f64; 3]> {
    let [l0, l1, l2, l3, l4] = s.lambda;
    let c12 = 2.0 * l0 * clamped_sqrt(l3 * l3 + l4 * l4, "C^a_12")?;
    let radicand = l0 * l0 * l4 * l4 + l1 * l1 * l4 * l4 + l2 * l2 * l3 * l3 - 2.0 * l1 * l2 * l3 * l4 * s.theta.cos();
    let c23 = 2.0 * clamped_sqrt(radicand, "C^a_23")?;
    let c31 = 2.0 * l0 * clamped_sqrt(l2 * l2 + l4 * l4, "C^a_31")?;
    Ok([c12, c23, c31])
}

fn require_w_class(s: &SchmidtParams) -> Result<()> {
    if s.lambda[4].abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "W-class form needs λ4 = 0, got {}",
            s.lambda[4]
        )));
    }
    Ok(())
}

/// Minimal CoA on the W class: `2 min(λ0λ2, λ2λ3, λ3λ0)`.
pub fn wclass_coa_min(s: &SchmidtParams) -> Result<f64> {
    require_w_class(s)?;
    let [l0, _, l2, l3, _] = s.lambda;
    Ok(2.0 * (l0 * l2).min(l2 * l3).min(l3 * l0))
}

/// All pairwise and tripartite measures of one state.
///
/// Pair arrays are ordered `(12, 23, 31)`; bipartition and residual arrays by
/// the solo qubit `(1, 2, 3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureReport {
    pub c_bipartition: [f64; 3],
    pub c_pair: [f64; 3],
    pub coa_pair: [f64; 3],
    pub coa_min: f64,
    pub tau: f64,
    pub sigma: f64,
    pub monogamy_residuals: [f64; 3],
}

impl Serialize for MeasureReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("MeasureReport", 15)?;
        st.serialize_field("c_1_23", &self.c_bipartition[0])?;
        st.serialize_field("c_2_13", &self.c_bipartition[1])?;
        st.serialize_field("c_3_12", &self.c_bipartition[2])?;
        st.serialize_field("c_12", &self.c_pair[0])?;
        st.serialize_field("c_23", &self.c_pair[1])?;
        st.serialize_field("c_31", &self.c_pair[2])?;
        st.serialize_field("coa_12", &self.coa_pair[0])?;
        st.serialize_field("coa_23", &self.coa_pair[1])?;
        st.serialize_field("coa_31", &self.coa_pair[2])?;
        st.serialize_field("coa_min", &self.coa_min)?;
        st.serialize_field("tau", &self.tau)?;
        st.serialize_field("sigma", &self.sigma)?;
        st.serialize_field("monogamy_residual_1", &self.monogamy_residuals[0])?;
        st.serialize_field("monogamy_residual_2", &self.monogamy_residuals[1])?;
        st.serialize_field("monogamy_residual_3", &self.monogamy_residuals[2])?;
        st.end()
    }
}

pub(crate) const PAIRS: [(u8, u8); 3] = [(1, 2), (2, 3), (1, 3)];

/// Computes a [`MeasureReport`] from the reduced matrices of `state`.
pub fn pairwise_measures(state: &PureState3) -> Result<MeasureReport> {
    let cb_sq = Qubit::ALL.map(|q| bipartition_sq(state, q));
    let mut pairs = [None; 3];
    for (slot, (a, b)) in pairs.iter_mut().zip(PAIRS) {
        let rho = partial_trace(state, QubitPair::from_labels(a, b)?);
        *slot = Some(pair_concurrences(&rho)?);
    }
    let [p12, p23, p31] = pairs.map(|p| p.expect("all pairs computed"));

    let tau = cb_sq[0] - p12.concurrence_sq - p31.concurrence_sq;
    let sigma = [
        (cb_sq[0] + cb_sq[1]) / 2.0 - p12.concurrence_sq,
        (cb_sq[1] + cb_sq[2]) / 2.0 - p23.concurrence_sq,
        (cb_sq[2] + cb_sq[0]) / 2.0 - p31.concurrence_sq,
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    let monogamy_residuals = [
        cb_sq[0] - p12.concurrence_sq - p31.assistance_sq,
        cb_sq[1] - p23.concurrence_sq - p12.assistance_sq,
        cb_sq[2] - p31.concurrence_sq - p23.assistance_sq,
    ];
    let coa_pair = [p12.assistance, p23.assistance, p31.assistance];
    Ok(MeasureReport {
        c_bipartition: cb_sq.map(f64::sqrt),
        c_pair: [p12.concurrence, p23.concurrence, p31.concurrence],
        coa_pair,
        coa_min: coa_pair.into_iter().fold(f64::INFINITY, f64::min),
        tau,
        sigma,
        monogamy_residuals,
    })
}

/// Minimal CoA of a state.
pub fn coa_min(state: &PureState3) -> Result<f64> {
    Ok(pairwise_measures(state)?.coa_min)
}

/// Result of the decomposition search.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OracleBounds {
    /// Best average concurrence over the decompositions tried; a certified
    /// lower bound on the CoA.
    pub lower: f64,
    /// Closed-form CoA.
    pub upper_hint: f64,
}

/// Average concurrence `Σ_k p_k C(φ_k)` of the decomposition with
/// unnormalized members `φ̃_k = Σ_j U_kj c_j`. For each member,
/// `p_k C(φ_k) = 2 |det Φ_k|` where `Φ_k` is its 2x2 coefficient matrix.
fn decomposition_average(columns: &[[C64; 4]; 4], u: &ComplexMatrix) -> f64 {
    let mut total = 0.0;
    for k in 0..4 {
        let mut phi = [ZERO; 4];
        for (j, col) in columns.iter().enumerate() {
            let ukj = u[(k, j)];
            for i in 0..4 {
                phi[i] += ukj * col[i];
            }
        }
        total += 2.0 * (phi[0] * phi[3] - phi[1] * phi[2]).norm();
    }
    total
}

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> ComplexMatrix {
    let data = (0..16)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re * scale, im * scale)
        })
        .collect();
    ComplexMatrix::from_row_major(4, data).expect("finite gaussian entries")
}

/// Gram–Schmidt on the columns of `m`; applied to a Gaussian matrix this
/// yields a Haar unitary.
fn orthonormalize(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.dim();
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| m[(i, j)]).collect()).collect();
    for j in 0..n {
        for k in 0..j {
            let proj: C64 = (0..n).map(|i| cols[k][i].conj() * cols[j][i]).sum();
            let (done, rest) = cols.split_at_mut(j);
            for (x, b) in rest[0].iter_mut().zip(&done[k]) {
                *x -= proj * b;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols[j].iter_mut().for_each(|z| *z /= norm);
    }
    let mut out = ComplexMatrix::zeros(n);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            out[(i, j)] = col[i];
        }
    }
    out
}

/// Stochastic search over decompositions of `rho` for the largest average
/// concurrence.
///
/// Every decomposition into at most four members arises as
/// `φ̃_k = Σ_j U_kj c_j` for a unitary `U` and the columns `c_j` of `√ρ`. The
/// first quarter of the trials draw Haar unitaries; the rest perturb the best
/// unitary found so far with a shrinking step.
pub fn coa_brute_force_oracle(rho: &ComplexMatrix, trials: usize, seed: u64) -> Result<OracleBounds> {
    if trials == 0 {
        return Err(Error::invalid("oracle needs at least one trial"));
    }
    let upper_hint = coa_mixed(rho)?;
    let root = psd_sqrt(rho)?;
    let columns: [[C64; 4]; 4] = std::array::from_fn(|j| std::array::from_fn(|i| root[(i, j)]));
    let mut rng = stream_rng(seed, 0);

    let mut best_u = ComplexMatrix::identity(4);
    let mut best = decomposition_average(&columns, &best_u);
    let explore = (trials / 4).max(1);
    for t in 0..trials {
        let candidate = if t < explore {
            orthonormalize(&gaussian_matrix(&mut rng, 1.0))
        } else {
            let progress = (t - explore) as f64 / (trials - explore).max(1) as f64;
            let step = 0.3 * (1.0 - progress).powi(2) + 1e-3;
            orthonormalize(&best_u.add(&gaussian_matrix(&mut rng, step)))
        };
        let value = decomposition_average(&columns, &candidate);
        if value > best {
            best = value;
            best_u = candidate;
        }
    }
    Ok(OracleBounds {
        lower: best,
        upper_hint,
    })
}
