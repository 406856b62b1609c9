//! Hermitian surrogates of the non-Hermitian generator and the auxiliary
//! objects the quantum pipelines consume.
//!
//! The block embedding `[[0, Q], [Q^dag, 0]]` carries the singular values of
//! `Q` as its nonnegative eigenvalues; `Q Q^dag` is semi-positive definite
//! with the squared singular values, and its zeromode is the uniform vector
//! because the columns of `Q` sum to zero.

use ndarray::{s, Array2};
use ndarray_linalg::Eigh;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qsim::StateVector;
use crate::system::GeneratorMatrix;

const HERMITICITY_TOL: f64 = 1e-12;
const UNITARITY_TOL: f64 = 1e-10;

/// Provenance of a Hermitian operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// `[[0, Q], [Q^dag, 0]]`; eigenvalues come in `+-sigma` pairs.
    BlockEmbedding,
    /// `Q Q^dag`; eigenvalues are squared singular values, all nonnegative.
    SemiPositiveDefinite,
    /// Anything else that is Hermitian.
    General,
}

/// Dense Hermitian matrix with power-of-two dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: Array2<Complex64>,
    kind: OperatorKind,
}

impl HermitianOperator {
    /// Validate and wrap a Hermitian matrix (elementwise tolerance 1e-12).
    pub fn new(matrix: Array2<Complex64>) -> Result<Self> {
        Self::with_kind(matrix, OperatorKind::General)
    }

    fn with_kind(matrix: Array2<Complex64>, kind: OperatorKind) -> Result<Self> {
        let (r, c) = matrix.dim();
        if r != c || !r.is_power_of_two() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian operator must be square with power-of-two dimension, got {r}x{c}"
            )));
        }
        for i in 0..r {
            for j in 0..r {
                let delta = (matrix[[i, j]] - matrix[[j, i]].conj()).norm();
                if delta > HERMITICITY_TOL {
                    return Err(Error::InvalidParameter(format!(
                        "matrix is not Hermitian: |H[{i},{j}] - conj(H[{j},{i}])| = {delta:.3e}"
                    )));
                }
            }
        }
        Ok(Self { matrix, kind })
    }

    /// Wrap a real symmetric matrix.
    pub fn from_real(matrix: Array2<f64>) -> Result<Self> {
        Self::new(matrix.mapv(|x| Complex64::new(x, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }
}

/// Zero-pad a square complex matrix up to the next power of two.
fn pad_to_power_of_two(m: Array2<Complex64>) -> Array2<Complex64> {
    let d = m.nrows();
    if d.is_power_of_two() {
        return m;
    }
    let target = d.next_power_of_two();
    let mut out = Array2::<Complex64>::zeros((target, target));
    out.slice_mut(s![..d, ..d]).assign(&m);
    out
}

/// Hermitian block embedding `[[0, Q], [Q^dag, 0]]`. The result is padded
/// with zero rows/columns when twice the generator dimension is not a power
/// of two; padded directions carry zero eigenvectors.
pub fn block_embed(q: &GeneratorMatrix) -> HermitianOperator {
    let d = q.dim();
    let mut m = Array2::<Complex64>::zeros((2 * d, 2 * d));
    for i in 0..d {
        for j in 0..d {
            let v = q.entry(i, j);
            m[[i, d + j]] = Complex64::new(v, 0.0);
            m[[d + j, i]] = Complex64::new(v, 0.0);
        }
    }
    HermitianOperator::with_kind(pad_to_power_of_two(m), OperatorKind::BlockEmbedding)
        .expect("block embedding is Hermitian by construction")
}

/// Semi-positive definite surrogate `Q Q^dag`; padded to a power of two when
/// needed.
pub fn spd_form(q: &GeneratorMatrix) -> HermitianOperator {
    let d = q.dim();
    let qm = q.matrix();
    let mut m = Array2::<Complex64>::zeros((d, d));
    for i in 0..d {
        for j in 0..=i {
            let mut acc = 0.0;
            for k in 0..d {
                acc += qm[[i, k]] * qm[[j, k]];
            }
            m[[i, j]] = Complex64::new(acc, 0.0);
            m[[j, i]] = Complex64::new(acc, 0.0);
        }
    }
    HermitianOperator::with_kind(pad_to_power_of_two(m), OperatorKind::SemiPositiveDefinite)
        .expect("Q Q^dag is Hermitian by construction")
}

/// Uniform ("constant") state with all `2^n` amplitudes equal to
/// `1/sqrt(2^n)`; the zeromode of any `spd_form` output.
pub fn constant_state(n_qubits: usize) -> StateVector {
    StateVector::uniform(n_qubits)
}

/// Raw constant-vector amplitudes. With `normalized = false` every entry is
/// `1/2^n` (unit sum, not unit L2 norm), the literal textbook form; with
/// `normalized = true` entries are `1/sqrt(2^n)`.
pub fn constant_amplitudes(n_qubits: usize, normalized: bool) -> Vec<f64> {
    let dim = 1usize << n_qubits;
    let value = if normalized {
        1.0 / (dim as f64).sqrt()
    } else {
        1.0 / dim as f64
    };
    vec![value; dim]
}

/// Dense unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: Array2<Complex64>,
}

impl UnitaryOperator {
    /// Validate `U U^dag = I` within 1e-10 Frobenius norm.
    pub fn new(matrix: Array2<Complex64>) -> Result<Self> {
        if !crate::qsim::is_unitary(&matrix, UNITARITY_TOL) {
            return Err(Error::InvalidParameter(
                "matrix is not unitary within 1e-10".into(),
            ));
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.matrix
    }
}

/// Unitary `exp(-i H)` computed through the Hermitian eigendecomposition,
/// so it shares eigenvectors with `H` exactly; eigenvalue `w` maps to the
/// phase `exp(-i w)`.
pub fn unitary_of(h: &HermitianOperator) -> Result<UnitaryOperator> {
    let (vals, vecs) = h
        .matrix()
        .eigh(ndarray_linalg::UPLO::Lower)
        .map_err(Error::solver)?;
    let d = h.dim();
    let mut u = Array2::<Complex64>::zeros((d, d));
    for (k, &w) in vals.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -w);
        for i in 0..d {
            for j in 0..d {
                u[[i, j]] += phase * vecs[[i, k]] * vecs[[j, k]].conj();
            }
        }
    }
    UnitaryOperator::new(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::SchloglSystem;
    use approx::assert_relative_eq;

    fn two_state_q() -> GeneratorMatrix {
        SchloglSystem::bistable(1.0, 1).unwrap().generator()
    }

    #[test]
    fn block_embedding_has_zero_diagonal_blocks() {
        let h = block_embed(&two_state_q());
        assert_eq!(h.dim(), 4);
        assert_eq!(h.kind(), OperatorKind::BlockEmbedding);
        let m = h.matrix();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(m[[i, j]], Complex64::ZERO);
                assert_eq!(m[[2 + i, 2 + j]], Complex64::ZERO);
            }
        }
        assert_relative_eq!(m[[0, 2]].re, -0.25);
        assert_relative_eq!(m[[0, 3]].re, 2.95);
        // lower-left block is the transpose
        assert_relative_eq!(m[[2, 0]].re, -0.25);
        assert_relative_eq!(m[[3, 0]].re, 2.95);
    }

    #[test]
    fn block_embedding_of_zero_matrix_is_zero() {
        let q = GeneratorMatrix::from_entries(Array2::zeros((2, 2))).unwrap();
        let h = block_embed(&q);
        assert!(h.matrix().iter().all(|z| *z == Complex64::ZERO));
    }

    #[test]
    fn spd_form_annihilates_uniform_vector() {
        let q = SchloglSystem::bistable(1.7, 3).unwrap().generator();
        let h = spd_form(&q);
        assert_eq!(h.kind(), OperatorKind::SemiPositiveDefinite);
        let d = h.dim();
        let w = 1.0 / (d as f64).sqrt();
        for i in 0..d {
            let row: Complex64 = (0..d).map(|j| h.matrix()[[i, j]] * w).sum();
            assert!(row.norm() <= 1e-10, "residual {} at row {i}", row.norm());
        }
    }

    #[test]
    fn spd_of_pure_death_matrix_is_identity_like() {
        // Q = diag(-1, -1) is not a generator; exercise the algebra directly
        let m = ndarray::array![[-1.0, 0.0], [0.0, -1.0]];
        let mut prod = Array2::<Complex64>::zeros((2, 2));
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0.0;
                for k in 0..2 {
                    acc += m[[i, k]] * m[[j, k]];
                }
                prod[[i, j]] = Complex64::new(acc, 0.0);
            }
        }
        assert_eq!(prod[[0, 0]], Complex64::ONE);
        assert_eq!(prod[[1, 1]], Complex64::ONE);
        assert_eq!(prod[[0, 1]], Complex64::ZERO);
    }

    #[test]
    fn constant_state_amplitudes() {
        let s = constant_state(1);
        for a in s.amplitudes() {
            assert_relative_eq!(a.re, std::f64::consts::FRAC_1_SQRT_2);
        }
        let s = constant_state(2);
        for a in s.amplitudes() {
            assert_relative_eq!(a.re, 0.5);
        }
        let raw = constant_amplitudes(2, false);
        assert!(raw.iter().all(|&x| x == 0.25));
        let sum: f64 = raw.iter().sum();
        assert_relative_eq!(sum, 1.0);
    }

    #[test]
    fn unitary_of_zero_is_identity() {
        let h = HermitianOperator::from_real(Array2::zeros((2, 2))).unwrap();
        let u = unitary_of(&h).unwrap();
        assert_relative_eq!(u.matrix()[[0, 0]].re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(u.matrix()[[1, 1]].re, 1.0, epsilon = 1e-12);
        assert!(u.matrix()[[0, 1]].norm() < 1e-12);
    }

    #[test]
    fn unitary_of_diagonal_phases() {
        let h = HermitianOperator::from_real(ndarray::array![
            [0.0, 0.0],
            [0.0, std::f64::consts::FRAC_PI_2]
        ])
        .unwrap();
        let u = unitary_of(&h).unwrap();
        assert_relative_eq!(u.matrix()[[0, 0]].re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(u.matrix()[[1, 1]].im, -1.0, epsilon = 1e-12);
        assert!(u.matrix()[[1, 1]].re.abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_matrix_rejected() {
        let m = ndarray::array![[0.0, 1.0], [0.0, 0.0]];
        assert!(HermitianOperator::from_real(m).is_err());
    }

    #[test]
    fn non_unitary_matrix_rejected() {
        let m = Array2::<Complex64>::zeros((2, 2));
        assert!(UnitaryOperator::new(m).is_err());
    }
}
