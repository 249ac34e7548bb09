//! Dense complex linear algebra for the 2-, 4- and 8-dimensional spaces of up
//! to three qubits.
//!
//! Basis ordering everywhere is `b1 b2 b3` with qubit 1 the most significant bit.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::states::PureState3;
use crate::tol;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Row-major square complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries. Rejects non-square input and
    /// non-finite entries.
    pub fn from_row_major(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(ComplexMatrix { dim, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// The projector `|v><v|`.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    m.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        m
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "dimension mismatch");
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `<v| M |v>`.
    pub fn quadratic_form(&self, v: &[C64]) -> C64 {
        let mv = self.apply(v);
        v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let mut out = Self::zeros(n * m);
        for i in 0..n {
            for j in 0..n {
                let a = self[(i, j)];
                for k in 0..m {
                    for l in 0..m {
                        out[(i * m + k, j * m + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() < tol
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Fixed-size 2x2 block used on hot paths (local unitaries, single-qubit
/// observables).
pub type Mat2 = [[C64; 2]; 2];

pub(crate) fn mat2_to_matrix(m: &Mat2) -> ComplexMatrix {
    ComplexMatrix {
        dim: 2,
        data: vec![m[0][0], m[0][1], m[1][0], m[1][1]],
    }
}

/// Applies `m` to qubit `qubit` (0-based, 0 = most significant) of an 8-vector.
pub(crate) fn apply_single(amps: &[C64; 8], qubit: usize, m: &Mat2) -> [C64; 8] {
    let shift = 2 - qubit;
    let mut out = [ZERO; 8];
    for (idx, slot) in out.iter_mut().enumerate() {
        let bit = (idx >> shift) & 1;
        let base = idx & !(1 << shift);
        *slot = m[bit][0] * amps[base] + m[bit][1] * amps[base | (1 << shift)];
    }
    out
}

pub fn pauli_x() -> ComplexMatrix {
    mat2_to_matrix(&PAULI[0])
}

pub fn pauli_y() -> ComplexMatrix {
    mat2_to_matrix(&PAULI[1])
}

pub fn pauli_z() -> ComplexMatrix {
    mat2_to_matrix(&PAULI[2])
}

pub(crate) const PAULI: [Mat2; 3] = [
    [[ZERO, ONE], [ONE, ZERO]],
    [[ZERO, C64::new(0.0, -1.0)], [I, ZERO]],
    [[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]],
];

pub(crate) fn check_unit_vector(v: &[f64; 3]) -> Result<()> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("measurement direction must be finite"));
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > tol::UNIT_VECTOR {
        return Err(Error::invalid(format!(
            "measurement direction {v:?} has norm {norm}, expected 1"
        )));
    }
    Ok(())
}

pub(crate) fn observable_mat2(v: &[f64; 3]) -> Mat2 {
    let (x, y, z) = (v[0], v[1], v[2]);
    [[C64::new(z, 0.0), C64::new(x, -y)], [C64::new(x, y), C64::new(-z, 0.0)]]
}

/// The single-qubit observable `v · σ` for a unit vector `v`.
pub fn observable_from_unit_vector(v: [f64; 3]) -> Result<ComplexMatrix> {
    check_unit_vector(&v)?;
    Ok(mat2_to_matrix(&observable_mat2(&v)))
}

/// `m1 ⊗ m2 ⊗ m3` on three qubits.
pub fn tensor3(m1: &ComplexMatrix, m2: &ComplexMatrix, m3: &ComplexMatrix) -> Result<ComplexMatrix> {
    if [m1, m2, m3].iter().any(|m| m.dim != 2) {
        return Err(Error::invalid("tensor3 expects three 2x2 matrices"));
    }
    Ok(m1.kron(m2).kron(m3))
}

/// A qubit label in `{1, 2, 3}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Qubit(u8);

impl Qubit {
    pub const ONE: Qubit = Qubit(1);
    pub const TWO: Qubit = Qubit(2);
    pub const THREE: Qubit = Qubit(3);
    pub const ALL: [Qubit; 3] = [Qubit::ONE, Qubit::TWO, Qubit::THREE];

    pub fn new(label: u8) -> Result<Self> {
        if (1..=3).contains(&label) {
            Ok(Qubit(label))
        } else {
            Err(Error::invalid(format!("qubit label {label} not in 1..=3")))
        }
    }

    pub fn label(self) -> u8 {
        self.0
    }

    /// Position of this qubit's bit in a basis index, counting from the least
    /// significant bit.
    pub(crate) fn shift(self) -> usize {
        3 - self.0 as usize
    }
}

/// An unordered pair of distinct qubits, stored in ascending order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QubitPair(Qubit, Qubit);

impl QubitPair {
    pub fn new(a: Qubit, b: Qubit) -> Result<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(QubitPair(a, b)),
            std::cmp::Ordering::Greater => Ok(QubitPair(b, a)),
            std::cmp::Ordering::Equal => Err(Error::invalid(format!(
                "qubit pair needs two distinct labels, got {} twice",
                a.0
            ))),
        }
    }

    pub fn from_labels(a: u8, b: u8) -> Result<Self> {
        Self::new(Qubit::new(a)?, Qubit::new(b)?)
    }

    pub fn first(self) -> Qubit {
        self.0
    }

    pub fn second(self) -> Qubit {
        self.1
    }

    /// The qubit not in the pair.
    pub fn complement(self) -> Qubit {
        Qubit(6 - self.0 .0 - self.1 .0)
    }
}

/// Reduced two-qubit density matrix on `kept`, ordered by ascending label.
pub fn partial_trace(state: &PureState3, kept: QubitPair) -> ComplexMatrix {
    let amps = state.amplitudes();
    let (sa, sb, sc) = (kept.0.shift(), kept.1.shift(), kept.complement().shift());
    let index = |a: usize, b: usize, c: usize| (a << sa) | (b << sb) | (c << sc);
    let mut rho = ComplexMatrix::zeros(4);
    for row in 0..4 {
        for col in 0..4 {
            let mut acc = ZERO;
            for traced in 0..2 {
                let i = index(row >> 1, row & 1, traced);
                let j = index(col >> 1, col & 1, traced);
                acc += amps[i] * amps[j].conj();
            }
            rho[(row, col)] = acc;
        }
    }
    rho
}

/// Single-qubit reduced density matrix of `qubit`.
pub fn single_qubit_marginal(state: &PureState3, qubit: Qubit) -> ComplexMatrix {
    let amps = state.amplitudes();
    let shift = qubit.shift();
    let mut rho = ComplexMatrix::zeros(2);
    for idx in 0..8 {
        if (idx >> shift) & 1 == 0 {
            let partner = idx | (1 << shift);
            rho[(0, 0)] += amps[idx].norm_sqr();
            rho[(1, 1)] += amps[partner].norm_sqr();
            rho[(0, 1)] += amps[idx] * amps[partner].conj();
        }
    }
    rho[(1, 0)] = rho[(0, 1)].conj();
    rho
}

/// Eigenvalues in descending order with matching orthonormal eigenvector
/// columns.
#[derive(Debug, Clone)]
pub struct HermitianEigensystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigensystem {
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        let n = self.eigenvectors.dim;
        (0..n).map(|i| self.eigenvectors[(i, k)]).collect()
    }

    /// `V diag(f(w)) V^†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvectors.dim;
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n);
        for (k, &w) in self.eigenvalues.iter().enumerate() {
            let fw = f(w);
            if fw == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * fw;
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|w| w)
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim;
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Cyclic Jacobi eigensolver for a Hermitian matrix.
///
/// Each rotation first removes the phase of `a[p][q]` with a diagonal unitary
/// and then applies the real symmetric Jacobi rotation that zeroes it.
pub fn hermitian_eigensystem(m: &ComplexMatrix) -> Result<HermitianEigensystem> {
    let herm_err = m.hermiticity_error();
    if !(herm_err < tol::HERMITIAN) {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (max |m - m^†| = {herm_err:e})"
        )));
    }
    let n = m.dim;
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    let mut v = ComplexMatrix::identity(n);
    let threshold = tol::JACOBI_OFF_DIAGONAL * m.frobenius_norm().max(1.0);

    for _ in 0..tol::JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) < threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r < 1e-300 {
                    continue;
                }
                let phase_conj = (apq / r).conj();
                let zeta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let u_pp = C64::new(c, 0.0);
                let u_pq = C64::new(s, 0.0);
                let u_qp = phase_conj * (-s);
                let u_qq = phase_conj * c;

                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * u_pp + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * u_qq;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * u_pp + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * u_qq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[(i, col)] = v[(i, k)];
        }
    }
    Ok(HermitianEigensystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Principal square root of a Hermitian positive-semidefinite matrix.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigensystem(m)?;
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -tol::PSD_REJECT {
        return Err(Error::NumericalDomain(format!(
            "matrix has eigenvalue {min:e}, not positive semidefinite"
        )));
    }
    Ok(eig.reconstruct_with(|w| w.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::PureState3;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = c(rng.random_range(-1.0..1.0));
            for j in (i + 1)..n {
                let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn observable_examples() {
        let z = observable_from_unit_vector([0.0, 0.0, 1.0]).unwrap();
        assert_eq!(z, ComplexMatrix::from_real_diagonal(&[1.0, -1.0]));
        let x = observable_from_unit_vector([1.0, 0.0, 0.0]).unwrap();
        assert_eq!(x, pauli_x());
        let h = 0.5f64.sqrt();
        let d = observable_from_unit_vector([h, h, 0.0]).unwrap();
        let expected = pauli_x().add(&pauli_y()).scale(c(h));
        assert!(d.max_abs_diff(&expected) < 1e-15);
        assert!(d.matmul(&d).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn observable_rejects_non_unit() {
        assert!(matches!(
            observable_from_unit_vector([1.0, 1.0, 0.0]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn observable_squares_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let u = v.map(|x| x / n);
            let m = observable_from_unit_vector(u).unwrap();
            assert!(m.is_hermitian(1e-15));
            assert!(m.trace().norm() < 1e-15);
            assert!(m.matmul(&m).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
        }
    }

    #[test]
    fn tensor3_examples() {
        let id = ComplexMatrix::identity(2);
        assert_eq!(tensor3(&id, &id, &id).unwrap(), ComplexMatrix::identity(8));
        let zii = tensor3(&pauli_z(), &id, &id).unwrap();
        let expected = ComplexMatrix::from_real_diagonal(&[1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0]);
        assert_eq!(zii, expected);

        let xyy = tensor3(&pauli_x(), &pauli_y(), &pauli_y()).unwrap();
        let mut ket111 = vec![ZERO; 8];
        ket111[7] = ONE;
        let out = xyy.apply(&ket111);
        let mut expected = vec![ZERO; 8];
        expected[0] = c(-1.0);
        for (a, b) in out.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn tensor3_rejects_wrong_shape() {
        let id = ComplexMatrix::identity(2);
        assert!(tensor3(&ComplexMatrix::identity(4), &id, &id).is_err());
    }

    #[test]
    fn tensor3_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let paulis = [ComplexMatrix::identity(2), pauli_x(), pauli_y(), pauli_z()];
        let random_combo = |rng: &mut ChaCha8Rng| {
            let mut m = ComplexMatrix::zeros(2);
            for p in &paulis {
                let w = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m = m.add(&p.scale(w));
            }
            m
        };
        for _ in 0..20 {
            let ms: Vec<_> = (0..6).map(|_| random_combo(&mut rng)).collect();
            let lhs = tensor3(&ms[0], &ms[1], &ms[2])
                .unwrap()
                .matmul(&tensor3(&ms[3], &ms[4], &ms[5]).unwrap());
            let rhs = tensor3(&ms[0].matmul(&ms[3]), &ms[1].matmul(&ms[4]), &ms[2].matmul(&ms[5])).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn partial_trace_examples() {
        let ghz = PureState3::ghz();
        let rho = partial_trace(&ghz, QubitPair::from_labels(1, 2).unwrap());
        let expected = ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]);
        assert!(rho.max_abs_diff(&expected) < 1e-15);

        let zero = PureState3::basis(0);
        let rho = partial_trace(&zero, QubitPair::from_labels(3, 2).unwrap());
        assert!(rho.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 0.0])) < 1e-15);

        let w = PureState3::w();
        let rho = partial_trace(&w, QubitPair::from_labels(1, 2).unwrap());
        let eig = hermitian_eigensystem(&rho).unwrap();
        let expected = [2.0 / 3.0, 1.0 / 3.0, 0.0, 0.0];
        for (a, b) in eig.eigenvalues.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_kept_order_is_ascending() {
        // |011>: qubit 1 = 0, qubits 2,3 = 1. Keeping {1,3} gives |01><01|.
        let s = PureState3::basis(0b011);
        let rho = partial_trace(&s, QubitPair::from_labels(3, 1).unwrap());
        assert_eq!(rho[(1, 1)], ONE);
    }

    #[test]
    fn pair_labels_are_validated() {
        assert!(QubitPair::from_labels(1, 1).is_err());
        assert!(QubitPair::from_labels(0, 2).is_err());
        assert!(QubitPair::from_labels(2, 4).is_err());
        assert_eq!(QubitPair::from_labels(3, 1).unwrap().complement(), Qubit::TWO);
    }

    #[test]
    fn eigensystem_examples() {
        let eig = hermitian_eigensystem(&ComplexMatrix::from_real_diagonal(&[1.0, 3.0])).unwrap();
        assert_eq!(eig.eigenvalues, vec![3.0, 1.0]);

        let eig = hermitian_eigensystem(&pauli_x()).unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((eig.eigenvalues[1] + 1.0).abs() < 1e-15);
        let h = 0.5f64.sqrt();
        let plus = eig.eigenvector(0);
        let overlap = (plus[0] * h + plus[1] * h).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
        let minus = eig.eigenvector(1);
        let overlap = (minus[0] * h - minus[1] * h).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigensystem_rejects_non_hermitian() {
        let mut m = ComplexMatrix::zeros(2);
        m[(0, 1)] = ONE;
        assert!(matches!(hermitian_eigensystem(&m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn eigensystem_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for n in [2usize, 3, 4, 8] {
            for _ in 0..50 {
                let m = random_hermitian(n, &mut rng);
                let eig = hermitian_eigensystem(&m).unwrap();
                assert!(eig.reconstruct().max_abs_diff(&m) < 1e-10);
                assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
                let v = &eig.eigenvectors;
                let gram = v.adjoint().matmul(v);
                assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-10);
            }
        }
    }

    #[test]
    fn psd_sqrt_examples() {
        let id = ComplexMatrix::identity(4);
        assert!(psd_sqrt(&id).unwrap().max_abs_diff(&id) < 1e-14);

        let d = ComplexMatrix::from_real_diagonal(&[4.0, 1.0, 0.0, 0.0]);
        let r = psd_sqrt(&d).unwrap();
        assert!(r.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[2.0, 1.0, 0.0, 0.0])) < 1e-14);

        let half = ComplexMatrix::from_real_diagonal(&[0.5, 0.0, 0.0, 0.5]);
        let r = psd_sqrt(&half).unwrap();
        assert!(r.max_abs_diff(&half.scale(c(2.0f64.sqrt()))) < 1e-14);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let a = random_hermitian(4, &mut rng);
            let m = a.matmul(&a);
            let r = psd_sqrt(&m).unwrap();
            assert!(r.is_hermitian(1e-12));
            assert!(r.matmul(&r).max_abs_diff(&m) < 1e-9);
        }
    }

    #[test]
    fn psd_sqrt_rejects_negative_spectrum() {
        let m = ComplexMatrix::from_real_diagonal(&[1.0, -1e-3]);
        assert!(matches!(psd_sqrt(&m), Err(Error::NumericalDomain(_))));
        let tiny = ComplexMatrix::from_real_diagonal(&[1.0, -1e-11]);
        assert!(psd_sqrt(&tiny).is_ok());
    }
}
