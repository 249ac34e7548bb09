//! The three-qubit Mermin operator
//! `B = A1A2A3 - A1B2B3 - B1A2B3 - B1B2A3` with `A_j = a_j·σ`, `B_j = b_j·σ`,
//! its expectation values, the fixed measurement presets, closed-form family
//! curves and a multistart search over measurement directions.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{map_indices, stream_rng, Execution};
use crate::qmath::{
    apply_single, check_unit_vector, observable_from_unit_vector, observable_mat2, tensor3, ComplexMatrix, C64, PAULI,
};
use crate::simplex::{minimize_with_restarts, SimplexOptions};
use crate::states::{PureState3, SchmidtParams};
use crate::tol;

/// Measurement directions `a1, a2, a3` and `b1, b2, b3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MerminSettings {
    pub a: [[f64; 3]; 3],
    pub b: [[f64; 3]; 3],
}

impl MerminSettings {
    pub fn new(a: [[f64; 3]; 3], b: [[f64; 3]; 3]) -> Result<Self> {
        let s = MerminSettings { a, b };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.a.iter().chain(&self.b).try_for_each(check_unit_vector)
    }

    /// Same directions on every qubit.
    pub fn uniform(a: [f64; 3], b: [f64; 3]) -> Result<Self> {
        Self::new([a; 3], [b; 3])
    }

    pub fn negated(&self) -> Self {
        let neg = |v: [f64; 3]| v.map(|x| -x);
        MerminSettings {
            a: self.a.map(neg),
            b: self.b.map(neg),
        }
    }

    /// Exchanges the roles of `a` and `b` on every qubit.
    pub fn swapped(&self) -> Self {
        MerminSettings { a: self.b, b: self.a }
    }

    /// The four operator terms as (sign, directions for qubits 1..3).
    fn terms(&self) -> [(f64, [[f64; 3]; 3]); 4] {
        let (a, b) = (&self.a, &self.b);
        [
            (1.0, [a[0], a[1], a[2]]),
            (-1.0, [a[0], b[1], b[2]]),
            (-1.0, [b[0], a[1], b[2]]),
            (-1.0, [b[0], b[1], a[2]]),
        ]
    }
}

/// The assembled 8x8 Mermin operator.
pub fn mermin_operator(settings: &MerminSettings) -> Result<ComplexMatrix> {
    settings.validate()?;
    let mut op = ComplexMatrix::zeros(8);
    for (sign, dirs) in settings.terms() {
        let [m1, m2, m3] = dirs.map(|v| observable_from_unit_vector(v).expect("validated"));
        op = op.add(&tensor3(&m1, &m2, &m3)?.scale(C64::new(sign, 0.0)));
    }
    Ok(op)
}

fn product_expectation(amps: &[C64; 8], dirs: &[[f64; 3]; 3]) -> C64 {
    let mut out = *amps;
    for (q, v) in dirs.iter().enumerate() {
        out = apply_single(&out, q, &observable_mat2(v));
    }
    amps.iter().zip(&out).map(|(a, b)| a.conj() * b).sum()
}

/// `<ψ|B|ψ>` as a sum of the four product-observable expectations.
pub fn mermin_expectation(state: &PureState3, settings: &MerminSettings) -> Result<f64> {
    settings.validate()?;
    let amps = state.amplitudes();
    let value: C64 = settings
        .terms()
        .iter()
        .map(|(sign, dirs)| product_expectation(amps, dirs) * *sign)
        .sum();
    if value.im.abs() >= tol::EXPECTATION_IMAG {
        return Err(Error::InternalConsistency(format!(
            "Mermin expectation has imaginary part {:e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// `<ψ|B|ψ>` through the assembled operator matrix.
pub fn mermin_expectation_via_operator(state: &PureState3, settings: &MerminSettings) -> Result<f64> {
    let op = mermin_operator(settings)?;
    let value = op.quadratic_form(state.amplitudes());
    if value.im.abs() >= tol::EXPECTATION_IMAG {
        return Err(Error::InternalConsistency(format!(
            "Mermin expectation has imaginary part {:e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// Full correlation tensor `T_ijk = <σ_i ⊗ σ_j ⊗ σ_k>`; any product
/// expectation is then a trilinear form in the three directions.
#[derive(Debug, Clone, Copy)]
pub struct CorrelationTensor([[[f64; 3]; 3]; 3]);

impl CorrelationTensor {
    pub fn from_state(state: &PureState3) -> Self {
        let amps = state.amplitudes();
        let mut t = [[[0.0; 3]; 3]; 3];
        for k in 0..3 {
            let s3 = apply_single(amps, 2, &PAULI[k]);
            for j in 0..3 {
                let s23 = apply_single(&s3, 1, &PAULI[j]);
                for i in 0..3 {
                    let s123 = apply_single(&s23, 0, &PAULI[i]);
                    t[i][j][k] = amps.iter().zip(&s123).map(|(a, b)| a.conj() * b).sum::<C64>().re;
                }
            }
        }
        CorrelationTensor(t)
    }

    pub fn product(&self, x: &[f64; 3], y: &[f64; 3], z: &[f64; 3]) -> f64 {
        let mut acc = 0.0;
        for (xi, plane) in x.iter().zip(&self.0) {
            for (yj, row) in y.iter().zip(plane) {
                acc += xi * yj * (row[0] * z[0] + row[1] * z[1] + row[2] * z[2]);
            }
        }
        acc
    }

    /// Vectors `(u, v)` with `<B> = a1·u + b1·v` once the qubit-2 and qubit-3
    /// directions are fixed.
    pub fn qubit_one_fields(&self, a2: &[f64; 3], a3: &[f64; 3], b2: &[f64; 3], b3: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
        let mut u = [0.0; 3];
        let mut v = [0.0; 3];
        for (i, plane) in self.0.iter().enumerate() {
            for (j, row) in plane.iter().enumerate() {
                let ta = row[0] * a3[0] + row[1] * a3[1] + row[2] * a3[2];
                let tb = row[0] * b3[0] + row[1] * b3[1] + row[2] * b3[2];
                u[i] += a2[j] * ta - b2[j] * tb;
                v[i] -= a2[j] * tb + b2[j] * ta;
            }
        }
        (u, v)
    }

    /// Signed Mermin expectation.
    pub fn mermin(&self, s: &MerminSettings) -> f64 {
        let (a, b) = (&s.a, &s.b);
        // Contract qubit 3 first, then qubit 2, sharing partial sums.
        let mut total = 0.0;
        for i in 0..3 {
            let (mut x, mut y) = (0.0, 0.0);
            for j in 0..3 {
                let row = &self.0[i][j];
                let ta = row[0] * a[2][0] + row[1] * a[2][1] + row[2] * a[2][2];
                let tb = row[0] * b[2][0] + row[1] * b[2][1] + row[2] * b[2][2];
                x += a[1][j] * ta - b[1][j] * tb;
                y += a[1][j] * tb + b[1][j] * ta;
            }
            total += a[0][i] * x - b[0][i] * y;
        }
        total
    }
}

pub const PRESET_NAMES: [&str; 4] = ["ghz-xy", "wclass-zx", "ws-zx", "ghzw-tilt"];

/// The fixed measurement choices used in the family-by-family analysis.
///
/// * `ghz-xy`: `a_j = x`, `b_j = y`
/// * `wclass-zx`: `a_j = z`, `b_1 = -x`, `b_2 = b_3 = x`
/// * `ws-zx`: `a_j = -z`, `b_j = x`
/// * `ghzw-tilt`: `a_j = (1/2, 0, -√3/2)`, `b_j = y`
pub fn preset_settings(name: &str) -> Result<MerminSettings> {
    const X: [f64; 3] = [1.0, 0.0, 0.0];
    const Y: [f64; 3] = [0.0, 1.0, 0.0];
    const Z: [f64; 3] = [0.0, 0.0, 1.0];
    match name {
        "ghz-xy" => MerminSettings::uniform(X, Y),
        "wclass-zx" => MerminSettings::new([Z; 3], [[-1.0, 0.0, 0.0], X, X]),
        "ws-zx" => MerminSettings::uniform([0.0, 0.0, -1.0], X),
        "ghzw-tilt" => MerminSettings::uniform([0.5, 0.0, -(3f64.sqrt()) / 2.0], Y),
        other => Err(Error::invalid(format!(
            "unknown preset `{other}` (expected one of {})",
            PRESET_NAMES.join(", ")
        ))),
    }
}

/// Settings of the multistart search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizationConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for OptimizationConfig {
    fn default() -> Self {
        OptimizationConfig {
            restarts: 32,
            max_iterations: 500,
            tolerance: 1e-10,
            seed: 0,
            execution: Execution::default(),
        }
    }
}

impl OptimizationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::invalid("restarts must be at least 1"));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be at least 1"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid("tolerance must be positive"));
        }
        Ok(())
    }
}

/// Best Mermin value found and the directions attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MerminResult {
    /// `|<B>|` at `settings`.
    pub value: f64,
    pub violated: bool,
    /// `value - 2`.
    pub margin: f64,
    pub settings: MerminSettings,
}

impl MerminResult {
    pub fn from_value(value: f64, settings: MerminSettings) -> Self {
        let margin = value - tol::MERMIN_CLASSICAL_BOUND;
        MerminResult {
            value,
            violated: margin > 0.0,
            margin,
            settings,
        }
    }
}

/// `|<B>|` for a named preset.
pub fn preset_result(state: &PureState3, name: &str) -> Result<MerminResult> {
    let settings = preset_settings(name)?;
    Ok(MerminResult::from_value(
        mermin_expectation(state, &settings)?.abs(),
        settings,
    ))
}

fn direction(polar: f64, azimuth: f64) -> [f64; 3] {
    let (st, ct) = polar.sin_cos();
    let (sp, cp) = azimuth.sin_cos();
    [st * cp, st * sp, ct]
}

fn angles(v: &[f64; 3]) -> (f64, f64) {
    (v[2].clamp(-1.0, 1.0).acos(), v[1].atan2(v[0]))
}

fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn unit_or_z(v: &[f64; 3]) -> [f64; 3] {
    let n = norm3(v);
    if n > 0.0 {
        v.map(|x| x / n)
    } else {
        [0.0, 0.0, 1.0]
    }
}

/// Qubit-2 and qubit-3 directions `(a2, a3, b2, b3)` from eight angles.
fn reduced_directions(p: &[f64]) -> [[f64; 3]; 4] {
    std::array::from_fn(|k| direction(p[2 * k], p[2 * k + 1]))
}

/// `max |<B>|` over the qubit-1 pair for fixed qubit-2 and qubit-3
/// directions, i.e. `|u| + |v|`.
fn reduced_value(tensor: &CorrelationTensor, p: &[f64]) -> f64 {
    let [a2, a3, b2, b3] = reduced_directions(p);
    let (u, v) = tensor.qubit_one_fields(&a2, &a3, &b2, &b3);
    norm3(&u) + norm3(&v)
}

/// Full settings with the qubit-1 pair aligned to its optimal fields.
fn completed_settings(tensor: &CorrelationTensor, p: &[f64]) -> MerminSettings {
    let [a2, a3, b2, b3] = reduced_directions(p);
    let (u, v) = tensor.qubit_one_fields(&a2, &a3, &b2, &b3);
    MerminSettings {
        a: [unit_or_z(&u), a2, a3],
        b: [unit_or_z(&v), b2, b3],
    }
}

fn reduced_angles(s: &MerminSettings) -> Vec<f64> {
    [s.a[1], s.a[2], s.b[1], s.b[2]]
        .iter()
        .flat_map(|v| {
            let (t, p) = angles(v);
            [t, p]
        })
        .collect()
}

/// Seeded uniform directions for `(a1, a2, a3, b1, b2, b3)`; the qubit-1 pair
/// is drawn but not used, so the stream layout matches a full draw.
fn random_start(seed: u64, restart: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, restart);
    let mut angles = Vec::with_capacity(8);
    for k in 0..6 {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        if k % 3 != 0 {
            angles.extend([(1.0 - 2.0 * u).acos(), 2.0 * PI * v]);
        }
    }
    angles
}

/// Rounds of simplex rebuilding per restart.
const POLISH_ROUNDS: usize = 5;

/// Maximizes `|<ψ|B|ψ>|` over all measurement directions.
///
/// `<B>` is linear in the qubit-1 pair, `<B> = a1·u + b1·v`, so for fixed
/// qubit-2 and qubit-3 directions the best qubit-1 choice is `a1 = u/|u|`,
/// `b1 = v/|v|` with value `|u| + |v|`. The simplex search runs over the
/// remaining eight polar/azimuthal angles. Starting points are the four presets followed by `restarts - 4` seeded
/// uniform-on-sphere draws (restart `i` draws from stream `i` of
/// `config.seed`, so a larger `restarts` only adds starting points). The
/// restarts are independent and run in parallel under `config.execution`.
pub fn optimize_mermin(state: &PureState3, config: &OptimizationConfig) -> Result<MerminResult> {
    config.validate()?;
    let tensor = CorrelationTensor::from_state(state);
    let presets: Vec<MerminSettings> = PRESET_NAMES
        .iter()
        .map(|n| preset_settings(n).expect("known preset"))
        .collect();
    let n_starts = presets.len() + config.restarts.saturating_sub(presets.len());
    let opts = SimplexOptions {
        max_iterations: config.max_iterations,
        f_tolerance: config.tolerance,
        target: -4.0,
        initial_step: 0.4,
    };
    let objective = |p: &[f64]| -reduced_value(&tensor, p);

    let runs = map_indices(config.execution, n_starts, |i| {
        let start = if i < presets.len() {
            reduced_angles(&presets[i])
        } else {
            random_start(config.seed, i as u64)
        };
        let r = minimize_with_restarts(objective, &start, &opts, POLISH_ROUNDS);
        let settings = completed_settings(&tensor, &r.point);
        (tensor.mermin(&settings).abs(), settings)
    });

    let mut best: Option<(f64, MerminSettings)> = None;
    let candidates = presets.iter().map(|s| (tensor.mermin(s).abs(), *s)).chain(runs);
    for (value, settings) in candidates {
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, settings));
        }
    }
    let (_, settings) = best.expect("at least one start");
    let value = mermin_expectation(state, &settings)?.abs();
    Ok(MerminResult::from_value(value, settings))
}

/// Closed-form `<B>` of a W-class state under the `wclass-zx` preset:
/// `λ0² - λ1² + λ2² + λ3² + 2λ0λ2 + 2λ2λ3 + 2λ3λ0`.
pub fn wclass_mermin_lhs(s: &SchmidtParams) -> Result<f64> {
    if s.lambda[4].abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "W-class form needs λ4 = 0, got {}",
            s.lambda[4]
        )));
    }
    let [l0, l1, l2, l3, _] = s.lambda;
    Ok(l0 * l0 - l1 * l1 + l2 * l2 + l3 * l3 + 2.0 * (l0 * l2 + l2 * l3 + l3 * l0))
}

/// Closed-form `<B>` of `√(1-p)|GHZ> + √p|W>` under the `ghzw-tilt` preset:
/// `(3√2(5+√3)√(p(1-p)) + 13(1-p) + 9√3 p) / 8`.
pub fn ghzw_mermin_curve(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("p = {p} outside [0, 1]")));
    }
    let s3 = 3f64.sqrt();
    Ok((3.0 * 2f64.sqrt() * (5.0 + s3) * (p * (1.0 - p)).sqrt() + 13.0 * (1.0 - p) + 9.0 * s3 * p) / 8.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmath::hermitian_eigensystem;
    use crate::states::{family_state, from_schmidt, sample_indexed, FamilySpec, SamplingMode};

    fn random_settings(seed: u64, i: u64) -> MerminSettings {
        let mut rng = stream_rng(seed, i);
        let mut d = || {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            direction((1.0 - 2.0 * u).acos(), 2.0 * PI * v)
        };
        MerminSettings {
            a: [d(), d(), d()],
            b: [d(), d(), d()],
        }
    }

    #[test]
    fn qubit_one_fields_reproduce_expectation() {
        for i in 0..20 {
            let t = CorrelationTensor::from_state(&sample_indexed(SamplingMode::Haar, 4, i));
            let s = random_settings(4, i);
            let (u, v) = t.qubit_one_fields(&s.a[1], &s.a[2], &s.b[1], &s.b[2]);
            let dot = |x: &[f64; 3], y: &[f64; 3]| x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
            assert!((dot(&s.a[0], &u) + dot(&s.b[0], &v) - t.mermin(&s)).abs() < 1e-12);
            let best = completed_settings(&t, &reduced_angles(&s));
            assert!((t.mermin(&best) - (norm3(&u) + norm3(&v))).abs() < 1e-12);
            assert!(t.mermin(&best) >= t.mermin(&s).abs() - 1e-12);
        }
    }

    #[test]
    fn ghz_xy_operator_spectrum() {
        let op = mermin_operator(&preset_settings("ghz-xy").unwrap()).unwrap();
        let eig = hermitian_eigensystem(&op).unwrap();
        assert!((eig.eigenvalues[0] - 4.0).abs() < 1e-9);
        let top = eig.eigenvector(0);
        let ghz = PureState3::ghz();
        let overlap: C64 = ghz.amplitudes().iter().zip(&top).map(|(a, b)| a.conj() * b).sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn equal_settings_give_minus_two_triple_product() {
        let a = [0.6, 0.0, 0.8];
        let s = MerminSettings::uniform(a, a).unwrap();
        let op = mermin_operator(&s).unwrap();
        let m = observable_from_unit_vector(a).unwrap();
        let expected = tensor3(&m, &m, &m).unwrap().scale(C64::new(-2.0, 0.0));
        assert!(op.max_abs_diff(&expected) < 1e-12);
        let eig = hermitian_eigensystem(&op).unwrap();
        assert!(eig.eigenvalues.iter().all(|w| (w.abs() - 2.0).abs() < 1e-9));
    }

    #[test]
    fn swapped_settings_stay_hermitian() {
        let s = random_settings(3, 1);
        let op = mermin_operator(&s.swapped()).unwrap();
        assert!(op.is_hermitian(1e-12));
    }

    #[test]
    fn spectrum_bounded_by_four() {
        for i in 0..500 {
            let op = mermin_operator(&random_settings(11, i)).unwrap();
            let eig = hermitian_eigensystem(&op).unwrap();
            assert!(eig.eigenvalues[0] <= 4.0 + 1e-9);
            assert!(*eig.eigenvalues.last().unwrap() >= -4.0 - 1e-9);
        }
    }

    #[test]
    fn rejects_non_unit_settings() {
        assert!(MerminSettings::uniform([1.0, 1.0, 0.0], [0.0, 1.0, 0.0]).is_err());
        let bad = MerminSettings {
            a: [[2.0, 0.0, 0.0]; 3],
            b: [[0.0, 1.0, 0.0]; 3],
        };
        assert!(mermin_operator(&bad).is_err());
        assert!(mermin_expectation(&PureState3::ghz(), &bad).is_err());
    }

    #[test]
    fn expectation_examples() {
        let ghz_xy = preset_settings("ghz-xy").unwrap();
        assert!((mermin_expectation(&PureState3::ghz(), &ghz_xy).unwrap() - 4.0).abs() < 1e-12);
        assert!(mermin_expectation(&PureState3::basis(0), &ghz_xy).unwrap().abs() < 1e-12);
        let ws = preset_settings("ws-zx").unwrap();
        assert!((mermin_expectation(&PureState3::w(), &ws).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn preset_vectors() {
        let s = preset_settings("wclass-zx").unwrap();
        assert_eq!(s.a, [[0.0, 0.0, 1.0]; 3]);
        assert_eq!(s.b, [[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]);
        let s = preset_settings("ghzw-tilt").unwrap();
        assert_eq!(s.a[2], [0.5, 0.0, -(3f64.sqrt()) / 2.0]);
        assert_eq!(s.b[0], [0.0, 1.0, 0.0]);
        assert!(preset_settings("chsh").is_err());
    }

    #[test]
    fn three_evaluation_paths_agree() {
        for i in 0..100 {
            let state = sample_indexed(SamplingMode::Haar, 5, i);
            let s = random_settings(6, i);
            let terms = mermin_expectation(&state, &s).unwrap();
            let matrix = mermin_expectation_via_operator(&state, &s).unwrap();
            let tensor = CorrelationTensor::from_state(&state).mermin(&s);
            assert!((terms - matrix).abs() < 1e-12);
            assert!((terms - tensor).abs() < 1e-12);
            let neg = mermin_expectation(&state, &s.negated()).unwrap();
            assert!((neg + terms).abs() < 1e-12);
        }
    }

    #[test]
    fn relabeling_qubits_is_absorbed_by_the_directions() {
        // B is symmetric under qubit permutations once the directions are
        // permuted along, so relabeled operator variants add nothing.
        for i in 0..20 {
            let state = sample_indexed(SamplingMode::Haar, 7, i);
            let s = random_settings(8, i);
            let permuted = state.permute_qubits([2, 3, 1]).unwrap();
            let ps = MerminSettings {
                a: [s.a[1], s.a[2], s.a[0]],
                b: [s.b[1], s.b[2], s.b[0]],
            };
            let x = mermin_expectation(&state, &s).unwrap();
            let y = mermin_expectation(&permuted, &ps).unwrap();
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn optimizer_examples() {
        let config = OptimizationConfig::default();
        let ghz = optimize_mermin(&PureState3::ghz(), &config).unwrap();
        assert!((ghz.value - 4.0).abs() < 1e-6);
        assert!(ghz.violated);

        let product = optimize_mermin(&PureState3::basis(0), &config).unwrap();
        assert!((product.value - 2.0).abs() < 1e-6, "{product:?}");

        let phi = (0.5f64).asin() / 2.0;
        let boundary = family_state(&FamilySpec::GeneralizedGhz { phi }).unwrap();
        let r = optimize_mermin(&boundary, &config).unwrap();
        assert!((r.value - 2.0).abs() < 5e-3, "{r:?}");
    }

    #[test]
    fn optimizer_dominates_presets_and_is_deterministic() {
        let config = OptimizationConfig {
            restarts: 8,
            ..Default::default()
        };
        for i in 0..10 {
            let state = sample_indexed(SamplingMode::Haar, 19, i);
            let r = optimize_mermin(&state, &config).unwrap();
            for name in PRESET_NAMES {
                let p = preset_result(&state, name).unwrap();
                assert!(r.value >= p.value - 1e-9);
            }
            assert!(r.value <= 4.0 + 1e-9);
            assert_eq!(r, optimize_mermin(&state, &config).unwrap());
            let seq = OptimizationConfig {
                execution: Execution::Sequential,
                ..config
            };
            assert_eq!(r, optimize_mermin(&state, &seq).unwrap());
        }
    }

    #[test]
    fn more_restarts_never_hurt() {
        for i in 0..10 {
            let state = sample_indexed(SamplingMode::Haar, 23, i);
            let few = OptimizationConfig {
                restarts: 4,
                ..Default::default()
            };
            let many = OptimizationConfig {
                restarts: 32,
                ..Default::default()
            };
            let a = optimize_mermin(&state, &few).unwrap().value;
            let b = optimize_mermin(&state, &many).unwrap().value;
            assert!(b >= a - 1e-12);
        }
    }

    #[test]
    fn config_validation() {
        let bad = OptimizationConfig {
            restarts: 0,
            ..Default::default()
        };
        assert!(optimize_mermin(&PureState3::ghz(), &bad).is_err());
        let bad = OptimizationConfig {
            tolerance: 0.0,
            ..Default::default()
        };
        assert!(optimize_mermin(&PureState3::ghz(), &bad).is_err());
    }

    #[test]
    fn wclass_lhs_examples() {
        let t = 1.0 / 3f64.sqrt();
        let w = SchmidtParams::w_class([t, 0.0, t, t]).unwrap();
        assert!((wclass_mermin_lhs(&w).unwrap() - 3.0).abs() < 1e-12);
        let b = SchmidtParams::w_class([0.5, 0.5, 0.5, 0.5]).unwrap();
        assert!((wclass_mermin_lhs(&b).unwrap() - 2.0).abs() < 1e-12);
        let p = SchmidtParams::w_class([1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((wclass_mermin_lhs(&p).unwrap() - 1.0).abs() < 1e-12);
        let g = SchmidtParams::new([0.6, 0.0, 0.0, 0.0, 0.8], 0.0).unwrap();
        assert!(wclass_mermin_lhs(&g).is_err());
    }

    #[test]
    fn wclass_lhs_matches_preset_expectation() {
        let preset = preset_settings("wclass-zx").unwrap();
        for i in 0..200 {
            let s = crate::states::sample_w_class(41, i);
            let direct = mermin_expectation(&from_schmidt(&s), &preset).unwrap();
            assert!((direct - wclass_mermin_lhs(&s).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn ghzw_curve_examples() {
        assert!((ghzw_mermin_curve(0.0).unwrap() - 1.625).abs() < 1e-12);
        assert!((ghzw_mermin_curve(1.0).unwrap() - 9.0 * 3f64.sqrt() / 8.0).abs() < 1e-12);
        assert!((ghzw_mermin_curve(0.5).unwrap() - 3.571_883_120_754).abs() < 1e-9);
        assert!(ghzw_mermin_curve(1.01).is_err());
    }

    #[test]
    fn ghzw_curve_matches_preset_expectation() {
        let preset = preset_settings("ghzw-tilt").unwrap();
        for i in 0..=200 {
            let p = i as f64 / 200.0;
            let state = family_state(&FamilySpec::GhzW { p }).unwrap();
            let direct = mermin_expectation(&state, &preset).unwrap();
            assert!((direct - ghzw_mermin_curve(p).unwrap()).abs() < 1e-9, "p = {p}");
        }
    }

    #[test]
    fn result_json_shape() {
        let r = preset_result(&PureState3::ghz(), "ghz-xy").unwrap();
        let v = serde_json::to_value(r).unwrap();
        assert!((v["value"].as_f64().unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(v["violated"], serde_json::Value::Bool(true));
        assert_eq!(v["settings"]["a"].as_array().unwrap().len(), 3);
        assert_eq!(v["settings"]["b"][0].as_array().unwrap().len(), 3);
    }
}
