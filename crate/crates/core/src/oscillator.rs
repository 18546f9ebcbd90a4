//! Truncated harmonic-oscillator operators and dense Hermitian matrix utilities.
//!
//! The Wilson-line variable and its conjugate momentum are represented in the
//! first `N` oscillator levels, `phi = (a + a^dagger)/sqrt(2)` and
//! `p = i (a^dagger - a)/sqrt(2)`. Potentials of `phi` are evaluated through
//! the spectral decomposition of the truncated matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance used for every Hermiticity contract check.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Default number of oscillator levels (16 levels map onto 4 qubits).
pub const DEFAULT_LEVELS: usize = 16;

/// Dense square complex matrix that is Hermitian within [`HERMITICITY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: DMatrix<Complex64>,
}

/// Ascending eigenvalues with the matching orthonormal eigenvectors stored as
/// the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

/// Largest elementwise deviation `|A[j,k] - conj(A[k,j])|`.
pub fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for k in j..n {
            worst = worst.max((m[(j, k)] - m[(k, j)].conj()).norm());
        }
    }
    worst
}

fn hermitian_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

impl HermitianOperator {
    /// Wraps `matrix` after checking that it is square, at least 2x2 and
    /// Hermitian within [`HERMITICITY_TOL`].
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                actual: matrix.ncols(),
            });
        }
        if matrix.nrows() < 2 {
            return Err(Error::InvalidTruncation(format!(
                "operator dimension must be at least 2, got {}",
                matrix.nrows()
            )));
        }
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian {
                max_deviation: dev,
                tolerance: HERMITICITY_TOL,
            });
        }
        Ok(Self { matrix })
    }

    /// Builds from a real symmetric matrix given row-major.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        Self::new(DMatrix::from_fn(dim, dim, |j, k| {
            Complex64::new(entries[j * dim + k], 0.0)
        }))
    }

    // Results of exact algebra on Hermitian inputs; rounding is folded back
    // into the Hermitian part.
    pub(crate) fn from_hermitian_unchecked(matrix: DMatrix<Complex64>) -> Self {
        Self {
            matrix: hermitian_part(&matrix),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            matrix: DMatrix::from_fn(n, n, |j, k| {
                if j == k {
                    Complex64::new(diag[j], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    /// True when every imaginary part is below `tol` in magnitude.
    pub fn is_real(&self, tol: f64) -> bool {
        self.matrix.iter().all(|z| z.im.abs() <= tol)
    }

    /// Real parts, row-major.
    pub fn real_entries(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                out.push(self.matrix[(j, k)].re);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self::from_hermitian_unchecked(&self.matrix + &other.matrix))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(Self::from_hermitian_unchecked(&self.matrix - &other.matrix))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            matrix: &self.matrix * Complex64::new(factor, 0.0),
        }
    }

    /// `A + c I`.
    pub fn shift(&self, c: f64) -> Self {
        let mut matrix = self.matrix.clone();
        for j in 0..self.dim() {
            matrix[(j, j)] += Complex64::new(c, 0.0);
        }
        Self { matrix }
    }

    /// `A * A`, which stays Hermitian.
    pub fn square(&self) -> Self {
        Self::from_hermitian_unchecked(&self.matrix * &self.matrix)
    }

    /// Plain matrix product; generally not Hermitian.
    pub fn mul(&self, other: &Self) -> Result<DMatrix<Complex64>> {
        self.check_same_dim(other)?;
        Ok(&self.matrix * &other.matrix)
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Result<DMatrix<Complex64>> {
        self.check_same_dim(other)?;
        Ok(&self.matrix * &other.matrix - &other.matrix * &self.matrix)
    }

    /// `U A U^dagger` for a unitary `u`.
    pub fn conjugate_by(&self, u: &DMatrix<Complex64>) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: u.nrows(),
            });
        }
        Ok(Self::from_hermitian_unchecked(
            u * &self.matrix * u.adjoint(),
        ))
    }

    /// `<v|A|v>` for an arbitrary (not necessarily normalized) vector.
    pub fn quadratic_form(&self, v: &[Complex64]) -> Result<f64> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: v.len(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, vj) in v.iter().enumerate() {
            let row: Complex64 = v
                .iter()
                .enumerate()
                .map(|(k, vk)| self.matrix[(j, k)] * vk)
                .sum();
            acc += vj.conj() * row;
        }
        Ok(acc.re)
    }

    /// Full eigendecomposition with eigenvalues sorted ascending.
    pub fn eigen(&self) -> Spectrum {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(self.dim(), self.dim(), |r, c| {
            eig.eigenvectors[(r, order[c])]
        });
        Spectrum { values, vectors }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.matrix - &other.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(())
    }
}

impl Spectrum {
    /// `U diag(values) U^dagger` with the given replacement values.
    pub fn recompose(&self, values: &[f64]) -> HermitianOperator {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for c in 0..n {
            let w = Complex64::new(values[c], 0.0);
            for r in 0..n {
                scaled[(r, c)] *= w;
            }
        }
        HermitianOperator::from_hermitian_unchecked(scaled * self.vectors.adjoint())
    }
}

/// Number of retained oscillator levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruncationConfig {
    levels: usize,
}

impl TruncationConfig {
    pub fn new(levels: usize) -> Result<Self> {
        if levels < 2 {
            return Err(Error::InvalidTruncation(format!(
                "need at least 2 levels, got {levels}"
            )));
        }
        Ok(Self { levels })
    }

    /// Truncation that maps exactly onto `n_qubits` qubits.
    pub fn for_qubits(n_qubits: u32) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 16 {
            return Err(Error::InvalidTruncation(format!(
                "qubit count {n_qubits} out of range 1..=16"
            )));
        }
        Self::new(1usize << n_qubits)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// `log2(N)`; errors unless `N` is a power of two.
    pub fn qubits(&self) -> Result<u32> {
        if self.levels.is_power_of_two() {
            Ok(self.levels.trailing_zeros())
        } else {
            Err(Error::NotPowerOfTwo(self.levels))
        }
    }
}

impl Default for TruncationConfig {
    fn default() -> Self {
        Self {
            levels: DEFAULT_LEVELS,
        }
    }
}

/// Position operator: `sqrt(k/2)` on the first off-diagonals, `k = 1..N-1`.
pub fn position_op(cfg: &TruncationConfig) -> HermitianOperator {
    let n = cfg.levels();
    let mut m = DMatrix::zeros(n, n);
    for k in 1..n {
        let v = Complex64::new((k as f64 / 2.0).sqrt(), 0.0);
        m[(k - 1, k)] = v;
        m[(k, k - 1)] = v;
    }
    HermitianOperator { matrix: m }
}

/// Momentum operator: `-i sqrt(k/2)` above the diagonal, `+i sqrt(k/2)` below.
pub fn momentum_op(cfg: &TruncationConfig) -> HermitianOperator {
    let n = cfg.levels();
    let mut m = DMatrix::zeros(n, n);
    for k in 1..n {
        let v = (k as f64 / 2.0).sqrt();
        m[(k - 1, k)] = Complex64::new(0.0, -v);
        m[(k, k - 1)] = Complex64::new(0.0, v);
    }
    HermitianOperator { matrix: m }
}

/// Kronecker product `a ⊗ b`; `a` acts on the more significant index.
pub fn tensor_product(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    HermitianOperator {
        matrix: a.matrix.kronecker(&b.matrix),
    }
}

/// `f(A) = U f(diag(lambda)) U^dagger` for a real scalar function `f`.
pub fn apply_scalar_function<F>(op: &HermitianOperator, f: F) -> Result<HermitianOperator>
where
    F: Fn(f64) -> f64,
{
    let dev = hermitian_deviation(&op.matrix);
    if dev > HERMITICITY_TOL {
        return Err(Error::NotHermitian {
            max_deviation: dev,
            tolerance: HERMITICITY_TOL,
        });
    }
    let spectrum = op.eigen();
    let mapped: Vec<f64> = spectrum.values.iter().map(|&x| f(x)).collect();
    Ok(spectrum.recompose(&mapped))
}
