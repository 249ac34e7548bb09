//! Reduction of an arbitrary three-qubit pure state to the five-term form
//! `λ0|000> + λ1 e^{iθ}|100> + λ2|101> + λ3|110> + λ4|111>` by local unitaries.
//!
//! The primary route is constructive. Split `|ψ> = |0>⊗T0 + |1>⊗T1` with 2x2
//! blocks `T0, T1` on qubits 2 and 3. A qubit-1 unitary whose first row is
//! `(α, β)` makes the new `|0>` block `αT0 + βT1`, which is singular when
//! `det(αT0 + βT1) = 0`, a quadratic in `β/α`. A rank-one block `λ0 u wᵀ` is
//! then rotated to `λ0|00>` by unitaries on qubits 2 and 3. Of the (generally
//! two) roots, the one with the larger `λ0` is kept, which makes the output
//! unique for generic states.
//!
//! If the constructive route leaves a residual on the forbidden indices
//! `{001, 010, 011}` above [`tol::CANONICAL_RESIDUAL`], a multistart simplex
//! search over three SU(2) rotations is used instead.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{PureState3, SchmidtParams};
use crate::error::{Error, Result};
use crate::par::stream_rng;
use crate::qmath::{hermitian_eigensystem, ComplexMatrix, Mat2, C64, ONE, ZERO};
use crate::simplex::{minimize_with_restarts, SimplexOptions};
use crate::tol;

const FORBIDDEN: [usize; 3] = [0b001, 0b010, 0b011];
const NUMERICAL_RESTARTS: u64 = 16;
const NUMERICAL_MAX_ITERATIONS: usize = 2000;
const NUMERICAL_TARGET: f64 = 1e-16;
const NUMERICAL_SEED: u64 = 0x5eed_c0de;
const IDENTITY: Mat2 = [[ONE, ZERO], [ZERO, ONE]];

/// Canonical parameters plus the forbidden-index weight left over by the
/// local transformation that produced them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Canonical {
    pub params: SchmidtParams,
    pub residual: f64,
}

fn forbidden_weight(amps: &[C64; 8]) -> f64 {
    FORBIDDEN.iter().map(|&i| amps[i].norm_sqr()).sum()
}

fn blocks(amps: &[C64; 8]) -> ([[C64; 2]; 2], [[C64; 2]; 2]) {
    let t0 = [[amps[0], amps[1]], [amps[2], amps[3]]];
    let t1 = [[amps[4], amps[5]], [amps[6], amps[7]]];
    (t0, t1)
}

fn det2(m: &[[C64; 2]; 2]) -> C64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn combine(a: C64, t0: &[[C64; 2]; 2], b: C64, t1: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    std::array::from_fn(|j| std::array::from_fn(|k| a * t0[j][k] + b * t1[j][k]))
}

fn frob(m: &[[C64; 2]; 2]) -> f64 {
    m.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Unit vectors `(α, β)` for which `det(αT0 + βT1) = 0`.
fn singular_directions(t0: &[[C64; 2]; 2], t1: &[[C64; 2]; 2]) -> Vec<(C64, C64)> {
    let d0 = det2(t0);
    let d1 = det2(t1);
    let m = t0[0][0] * t1[1][1] + t1[0][0] * t0[1][1] - t0[0][1] * t1[1][0] - t1[0][1] * t0[1][0];
    let scale = d0.norm().max(d1.norm()).max(m.norm());
    let tiny = 1e-13;
    if scale < tiny {
        // Every combination is singular: keep the one with the largest weight.
        let g00 = t0.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>();
        let g11 = t1.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>();
        let g01: C64 = t0
            .iter()
            .flatten()
            .zip(t1.iter().flatten())
            .map(|(a, b)| a.conj() * b)
            .sum();
        let gram = ComplexMatrix::from_row_major(2, vec![C64::new(g00, 0.0), g01, g01.conj(), C64::new(g11, 0.0)])
            .expect("finite gram matrix");
        let eig = hermitian_eigensystem(&gram).expect("gram matrix is Hermitian");
        let v = eig.eigenvector(0);
        // ||αT0 + βT1||² = v^† G v with v = (α, β).
        return vec![(v[0], v[1])];
    }
    let (d0, d1, m) = (d0 / scale, d1 / scale, m / scale);
    let unit = |x: C64| {
        let n = (1.0 + x.norm_sqr()).sqrt();
        (ONE / n, x / n)
    };
    let mut out = Vec::with_capacity(2);
    if d1.norm() < tiny {
        out.push((ZERO, ONE));
        if m.norm() >= tiny {
            out.push(unit(-d0 / m));
        }
        return out;
    }
    let disc = (m * m - d0 * d1 * 4.0).sqrt();
    let sign = if (m.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
    let q = (m + disc * sign) * -0.5;
    if q.norm() < 1e-300 {
        out.push(unit(ZERO));
    } else {
        out.push(unit(q / d1));
        out.push(unit(d0 / q));
    }
    out
}

/// `[[u0*, u1*], [-u1, u0]]`, the SU(2) element sending unit `u` to `|0>`.
fn rotate_to_zero(u: [C64; 2]) -> Mat2 {
    [[u[0].conj(), u[1].conj()], [-u[1], u[0]]]
}

/// Local unitaries on qubits 2 and 3 that bring `χ` to diagonal singular-value
/// form `diag(s0, s1)`.
fn diagonalize_block(chi: &[[C64; 2]; 2]) -> (Mat2, Mat2) {
    let mut gram = ComplexMatrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            gram[(i, j)] = (0..2).map(|k| chi[k][i].conj() * chi[k][j]).sum();
        }
    }
    let eig = hermitian_eigensystem(&gram).expect("gram matrix is Hermitian");
    let r0 = eig.eigenvector(0);
    let r1 = eig.eigenvector(1);
    let s0 = eig.eigenvalues[0].max(0.0).sqrt();
    if s0 < 1e-300 {
        return (IDENTITY, IDENTITY);
    }
    let l0: [C64; 2] = std::array::from_fn(|i| (chi[i][0] * r0[0] + chi[i][1] * r0[1]) / s0);
    let n0 = (l0[0].norm_sqr() + l0[1].norm_sqr()).sqrt();
    let l0 = [l0[0] / n0, l0[1] / n0];
    let u2 = rotate_to_zero(l0);
    // U3 = Rᵀ with R the right singular vectors as columns.
    let u3 = [[r0[0], r0[1]], [r1[0], r1[1]]];
    (u2, u3)
}

/// Constructive local transformation into the five-term form.
fn constructive_transform(state: &PureState3) -> [Mat2; 3] {
    let (t0, t1) = blocks(state.amplitudes());
    let best = singular_directions(&t0, &t1)
        .into_iter()
        .map(|(a, b)| (a, b, frob(&combine(a, &t0, b, &t1))))
        .fold(None::<(C64, C64, f64)>, |acc, cand| match acc {
            Some(prev) if prev.2 >= cand.2 - 1e-14 => Some(prev),
            _ => Some(cand),
        })
        .expect("at least one singular direction");
    let (alpha, beta, lambda0) = best;
    let u1: Mat2 = [[alpha, beta], [-beta.conj(), alpha.conj()]];

    if lambda0 < 1e-12 {
        // Qubit 1 factors out; the remaining block sits on |1>.
        let chi = combine(-beta.conj(), &t0, alpha.conj(), &t1);
        let (u2, u3) = diagonalize_block(&chi);
        return [u1, u2, u3];
    }

    let block = combine(alpha, &t0, beta, &t1);
    let (j, _) = (0..2)
        .map(|k| (k, block[0][k].norm_sqr() + block[1][k].norm_sqr()))
        .fold((0, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
    let col = [block[0][j], block[1][j]];
    let cn = (col[0].norm_sqr() + col[1].norm_sqr()).sqrt();
    let u = [col[0] / cn, col[1] / cn];
    let w: [C64; 2] = std::array::from_fn(|k| (u[0].conj() * block[0][k] + u[1].conj() * block[1][k]) / lambda0);
    let wn = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
    let w = [w[0] / wn, w[1] / wn];
    [u1, rotate_to_zero(u), rotate_to_zero(w)]
}

/// Reads canonical parameters off a state whose forbidden amplitudes are
/// (nearly) zero.
fn params_from_transformed(amps: &[C64; 8]) -> SchmidtParams {
    let mags = [0b000, 0b100, 0b101, 0b110, 0b111].map(|i| amps[i].norm());
    let norm = mags.iter().map(|m| m * m).sum::<f64>().sqrt();
    let lambda = mags.map(|m| m / norm);
    // The relative phase arg(c100 c111 / (c101 c110)) is the only one local
    // diagonal phases cannot remove.
    let identifiable = lambda[1] >= 1e-9 && lambda[1] * lambda[2] * lambda[3] * lambda[4] > 1e-14;
    let theta = if identifiable {
        (amps[0b100] * amps[0b111] * amps[0b101].conj() * amps[0b110].conj())
            .arg()
            .abs()
            .min(PI)
    } else {
        0.0
    };
    SchmidtParams { lambda, theta }
}

/// Canonical five-term parameters of `state`.
///
/// A relative phase outside `[0, π]` is reflected into it; the reflected state
/// is the complex conjugate of a local-unitary image of the input, which
/// leaves every concurrence and every optimal Mermin value unchanged.
pub fn canonicalize(state: &PureState3) -> Result<Canonical> {
    let ops = constructive_transform(state);
    let transformed = state.apply_local(&ops);
    let residual = forbidden_weight(transformed.amplitudes());
    if residual < tol::CANONICAL_RESIDUAL {
        return Ok(Canonical {
            params: params_from_transformed(transformed.amplitudes()),
            residual,
        });
    }
    canonicalize_numerical(state)
}

fn su2_from_angles(a: f64, b: f64, c: f64) -> Mat2 {
    let x = C64::from_polar(a.cos(), b);
    let y = C64::from_polar(a.sin(), c);
    [[x, y], [-y.conj(), x.conj()]]
}

fn ops_from_params(p: &[f64]) -> [Mat2; 3] {
    std::array::from_fn(|k| su2_from_angles(p[3 * k], p[3 * k + 1], p[3 * k + 2]))
}

/// Canonicalization by direct minimization of the forbidden-index weight over
/// three SU(2) rotations: 16 seeded simplex restarts, each capped at 2000
/// iterations and stopped once the weight drops below 1e-16.
pub fn canonicalize_numerical(state: &PureState3) -> Result<Canonical> {
    let objective = |p: &[f64]| forbidden_weight(state.apply_local(&ops_from_params(p)).amplitudes());
    let opts = SimplexOptions {
        max_iterations: NUMERICAL_MAX_ITERATIONS,
        f_tolerance: 0.0,
        target: NUMERICAL_TARGET,
        initial_step: 0.4,
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for restart in 0..NUMERICAL_RESTARTS {
        let start: Vec<f64> = if restart == 0 {
            vec![0.0; 9]
        } else {
            let mut rng = stream_rng(NUMERICAL_SEED, restart);
            (0..9).map(|_| rng.random_range(0.0..2.0 * PI)).collect()
        };
        let r = minimize_with_restarts(objective, &start, &opts, 4);
        if best.as_ref().is_none_or(|(v, _)| r.value < *v) {
            best = Some((r.value, r.point));
        }
        if best.as_ref().is_some_and(|(v, _)| *v < NUMERICAL_TARGET) {
            break;
        }
    }
    let (residual, point) = best.expect("at least one restart");
    if !(residual < tol::CANONICAL_RESIDUAL) {
        return Err(Error::Canonicalization { residual });
    }
    let transformed = state.apply_local(&ops_from_params(&point));
    Ok(Canonical {
        params: params_from_transformed(transformed.amplitudes()),
        residual,
    })
}
