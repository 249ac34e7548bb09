//! Three-qubit pure states: constructors for the studied families, seeded
//! sampling, and the five-term canonical form.

mod canonical;
mod spec;

pub use canonical::{canonicalize, canonicalize_numerical, Canonical};
pub use spec::{FamilyTemplate, StateSpec};

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::stream_rng;
use crate::qmath::{apply_single, Mat2, C64, ZERO};
use crate::tol;

/// Normalized amplitudes over the basis `b1 b2 b3`, qubit 1 most significant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PureState3 {
    amps: [C64; 8],
}

/// Result of normalizing user-supplied amplitudes.
#[derive(Debug, Clone, Copy)]
pub struct Normalized {
    pub state: PureState3,
    /// `| ||c||^2 - 1 |` of the input.
    pub norm_deviation: f64,
    /// Set when the input was off by more than [`tol::NORM_WARNING`].
    pub warning: bool,
}

impl PureState3 {
    pub fn from_amplitudes(amps: [C64; 8]) -> Result<Normalized> {
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("amplitudes must be finite"));
        }
        let norm_sqr: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if norm_sqr == 0.0 {
            return Err(Error::invalid("the zero vector is not a state"));
        }
        let norm = norm_sqr.sqrt();
        let deviation = (norm_sqr - 1.0).abs();
        Ok(Normalized {
            state: PureState3 {
                amps: amps.map(|z| z / norm),
            },
            norm_deviation: deviation,
            warning: deviation > tol::NORM_WARNING,
        })
    }

    /// Normalizes without reporting; for internal constructions that are
    /// nonzero by construction.
    pub(crate) fn normalized(amps: [C64; 8]) -> Self {
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        PureState3 {
            amps: amps.map(|z| z / norm),
        }
    }

    pub fn from_real(amps: [f64; 8]) -> Result<Normalized> {
        Self::from_amplitudes(amps.map(|x| C64::new(x, 0.0)))
    }

    pub fn basis(index: usize) -> Self {
        let mut amps = [ZERO; 8];
        amps[index & 7] = C64::new(1.0, 0.0);
        PureState3 { amps }
    }

    /// `(|000> + |111>)/√2`.
    pub fn ghz() -> Self {
        Self::normalized(real_amps(&[(0b000, 1.0), (0b111, 1.0)]))
    }

    /// `(|001> + |010> + |100>)/√3`.
    pub fn w() -> Self {
        Self::normalized(real_amps(&[(0b001, 1.0), (0b010, 1.0), (0b100, 1.0)]))
    }

    pub fn amplitudes(&self) -> &[C64; 8] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState3) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn fidelity(&self, other: &PureState3) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `(u1 ⊗ u2 ⊗ u3) |self>`.
    pub fn apply_local(&self, ops: &[Mat2; 3]) -> PureState3 {
        let mut amps = self.amps;
        for (q, op) in ops.iter().enumerate() {
            amps = apply_single(&amps, q, op);
        }
        PureState3 { amps }
    }

    /// Relabels qubits: qubit `k` (1-based) of the output is qubit
    /// `perm[k-1]` of `self`.
    pub fn permute_qubits(&self, perm: [usize; 3]) -> Result<PureState3> {
        let mut seen = [false; 3];
        for &p in &perm {
            if !(1..=3).contains(&p) || std::mem::replace(&mut seen[p - 1], true) {
                return Err(Error::invalid(format!("{perm:?} is not a permutation of 1,2,3")));
            }
        }
        let mut amps = [ZERO; 8];
        for (out_idx, slot) in amps.iter_mut().enumerate() {
            let bits = [(out_idx >> 2) & 1, (out_idx >> 1) & 1, out_idx & 1];
            let mut src = 0;
            for k in 0..3 {
                src |= bits[k] << (3 - perm[k]);
            }
            *slot = self.amps[src];
        }
        Ok(PureState3 { amps })
    }

    /// Complex conjugate of every amplitude.
    pub fn conj(&self) -> PureState3 {
        PureState3 {
            amps: self.amps.map(|z| z.conj()),
        }
    }
}

fn real_amps(entries: &[(usize, f64)]) -> [C64; 8] {
    let mut amps = [ZERO; 8];
    for &(i, v) in entries {
        amps[i] = C64::new(v, 0.0);
    }
    amps
}

/// The five coefficients `λ0..λ4` and phase `θ` of the canonical form
/// `λ0|000> + λ1 e^{iθ}|100> + λ2|101> + λ3|110> + λ4|111>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchmidtParams {
    pub lambda: [f64; 5],
    pub theta: f64,
}

impl SchmidtParams {
    /// Validates `λ_j ≥ 0`, `Σλ² = 1` (within [`tol::PARAM_NORM`], then
    /// renormalized exactly) and `0 ≤ θ ≤ π`.
    pub fn new(lambda: [f64; 5], theta: f64) -> Result<Self> {
        if lambda.iter().chain([&theta]).any(|x| !x.is_finite()) {
            return Err(Error::invalid("Schmidt parameters must be finite"));
        }
        if let Some(neg) = lambda.iter().find(|&&l| l < 0.0) {
            return Err(Error::invalid(format!("Schmidt coefficient {neg} is negative")));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::invalid(format!("phase θ = {theta} outside [0, π]")));
        }
        let sum: f64 = lambda.iter().map(|l| l * l).sum();
        if (sum - 1.0).abs() > tol::PARAM_NORM {
            return Err(Error::invalid(format!(
                "Schmidt coefficients have Σλ² = {sum}, expected 1"
            )));
        }
        let norm = sum.sqrt();
        Ok(SchmidtParams {
            lambda: lambda.map(|l| l / norm),
            theta,
        })
    }

    /// W-class parameters `(λ0, λ1, λ2, λ3)` with `λ4 = 0`, `θ = 0`.
    pub fn w_class(l: [f64; 4]) -> Result<Self> {
        Self::new([l[0], l[1], l[2], l[3], 0.0], 0.0)
    }

    pub fn to_state(&self) -> PureState3 {
        from_schmidt(self)
    }
}

/// Builds the canonical-form state for `s`.
pub fn from_schmidt(s: &SchmidtParams) -> PureState3 {
    let [l0, l1, l2, l3, l4] = s.lambda;
    let mut amps = [ZERO; 8];
    amps[0b000] = C64::new(l0, 0.0);
    amps[0b100] = C64::from_polar(l1, s.theta);
    amps[0b101] = C64::new(l2, 0.0);
    amps[0b110] = C64::new(l3, 0.0);
    amps[0b111] = C64::new(l4, 0.0);
    PureState3::normalized(amps)
}

/// One of the state families analysed by this crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Ghz,
    W,
    /// `cos φ|000> + sin φ|111>`, φ ∈ [0, π/2].
    GeneralizedGhz {
        phi: f64,
    },
    /// `λ0|000> + λ1|100> + λ2|101> + λ3|110>`.
    WClass {
        lambda: [f64; 4],
    },
    /// `√(1-p) (cos φ|000> + sin φ|111>) + √p |101>`.
    GhzS {
        phi: f64,
        p: f64,
    },
    /// `√(1-p) |W> + √p |000>`.
    WS {
        p: f64,
    },
    /// `√(1-p) |GHZ> + √p |W>`.
    GhzW {
        p: f64,
    },
}

pub(crate) fn check_phi(phi: f64) -> Result<()> {
    if !(0.0..=PI / 2.0).contains(&phi) {
        return Err(Error::invalid(format!("φ = {phi} outside [0, π/2]")));
    }
    Ok(())
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("p = {p} outside [0, 1]")));
    }
    Ok(())
}

impl FamilySpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            FamilySpec::Ghz | FamilySpec::W => Ok(()),
            FamilySpec::GeneralizedGhz { phi } => check_phi(phi),
            FamilySpec::WClass { lambda } => SchmidtParams::w_class(lambda).map(|_| ()),
            FamilySpec::GhzS { phi, p } => check_phi(phi).and(check_p(p)),
            FamilySpec::WS { p } | FamilySpec::GhzW { p } => check_p(p),
        }
    }
}

/// Constructs the state described by `spec`.
pub fn family_state(spec: &FamilySpec) -> Result<PureState3> {
    spec.validate()?;
    let gghz = |phi: f64| real_amps(&[(0b000, phi.cos()), (0b111, phi.sin())]);
    let mix =
        |a: &[C64; 8], wa: f64, b: &[C64; 8], wb: f64| -> [C64; 8] { std::array::from_fn(|i| a[i] * wa + b[i] * wb) };
    let state = match *spec {
        FamilySpec::Ghz => PureState3::ghz(),
        FamilySpec::W => PureState3::w(),
        FamilySpec::GeneralizedGhz { phi } => PureState3 { amps: gghz(phi) },
        FamilySpec::WClass { lambda } => from_schmidt(&SchmidtParams::w_class(lambda)?),
        FamilySpec::GhzS { phi, p } => PureState3 {
            amps: mix(
                &gghz(phi),
                (1.0 - p).sqrt(),
                PureState3::basis(0b101).amplitudes(),
                p.sqrt(),
            ),
        },
        FamilySpec::WS { p } => PureState3 {
            amps: mix(
                PureState3::w().amplitudes(),
                (1.0 - p).sqrt(),
                PureState3::basis(0).amplitudes(),
                p.sqrt(),
            ),
        },
        FamilySpec::GhzW { p } => PureState3 {
            amps: mix(
                PureState3::ghz().amplitudes(),
                (1.0 - p).sqrt(),
                PureState3::w().amplitudes(),
                p.sqrt(),
            ),
        },
    };
    Ok(state)
}

/// How random states are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    /// Unitarily invariant measure: normalized complex Gaussian amplitudes.
    Haar,
    /// Flat-Dirichlet squared canonical coefficients, θ uniform on [0, π].
    SchmidtUniform,
}

impl std::str::FromStr for SamplingMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haar" => Ok(SamplingMode::Haar),
            "schmidt-uniform" => Ok(SamplingMode::SchmidtUniform),
            other => Err(Error::invalid(format!(
                "unknown sampling mode `{other}` (expected haar or schmidt-uniform)"
            ))),
        }
    }
}

fn draw_state<R: Rng + ?Sized>(mode: SamplingMode, rng: &mut R) -> PureState3 {
    match mode {
        SamplingMode::Haar => {
            let amps: [C64; 8] =
                std::array::from_fn(|_| C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)));
            PureState3::normalized(amps)
        }
        SamplingMode::SchmidtUniform => {
            let weights: [f64; 5] = std::array::from_fn(|_| Exp1.sample(rng));
            let total: f64 = weights.iter().sum();
            let lambda = weights.map(|w| (w / total).sqrt());
            let theta = rng.random_range(0.0..=PI);
            from_schmidt(&SchmidtParams { lambda, theta })
        }
    }
}

/// A single seeded sample; equal to `sample_indexed(mode, seed, 0)`.
pub fn sample_state(mode: SamplingMode, seed: u64) -> PureState3 {
    sample_indexed(mode, seed, 0)
}

/// Sample `index` of the batch seeded by `seed`.
pub fn sample_indexed(mode: SamplingMode, seed: u64, index: u64) -> PureState3 {
    draw_state(mode, &mut stream_rng(seed, index))
}

/// Seeded canonical-form parameters (flat Dirichlet weights, uniform θ).
pub fn sample_schmidt(seed: u64, index: u64) -> SchmidtParams {
    let mut rng = stream_rng(seed, index);
    let weights: [f64; 5] = std::array::from_fn(|_| Exp1.sample(&mut rng));
    let total: f64 = weights.iter().sum();
    SchmidtParams {
        lambda: weights.map(|w| (w / total).sqrt()),
        theta: rng.random_range(0.0..=PI),
    }
}

/// Seeded W-class parameters `(λ0, λ1, λ2, λ3)` with flat Dirichlet squares.
pub fn sample_w_class(seed: u64, index: u64) -> SchmidtParams {
    let mut rng = stream_rng(seed, index);
    let weights: [f64; 4] = std::array::from_fn(|_| Exp1.sample(&mut rng));
    let total: f64 = weights.iter().sum();
    let l = weights.map(|w| (w / total).sqrt());
    SchmidtParams {
        lambda: [l[0], l[1], l[2], l[3], 0.0],
        theta: 0.0,
    }
}

/// Haar-random element of SU(2).
pub fn random_su2<R: Rng + ?Sized>(rng: &mut R) -> Mat2 {
    let q: [f64; 4] = std::array::from_fn(|_| StandardNormal.sample(rng));
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let a = C64::new(q[0] / n, q[3] / n);
    let b = C64::new(q[2] / n, q[1] / n);
    [[a, b], [-b.conj(), a.conj()]]
}

/// Three independent seeded local unitaries.
pub fn random_local_unitaries(seed: u64, index: u64) -> [Mat2; 3] {
    let mut rng = stream_rng(seed, index);
    std::array::from_fn(|_| random_su2(&mut rng))
}
