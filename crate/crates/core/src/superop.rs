//! Dense complex matrix and superoperator algebra.
//!
//! Everything downstream hangs off one normative convention: operators are
//! vectorized by **column stacking**, so the map X ↦ A X B is represented by
//! the Kronecker product Bᵀ ⊗ A. The convention is pinned by a dedicated
//! test; do not change it without changing every module at once.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix. nalgebra stores column-major, which makes
/// column-stacking vectorization a plain copy of the backing storage.
pub type CMatrix = DMatrix<Complex64>;

/// Complex column vector.
pub type CVector = DVector<Complex64>;

/// Default tolerances used by validating constructors and certification
/// routines. All of them can be overridden by passing explicit values to the
/// corresponding operations.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Max entrywise |M − M†| accepted as Hermitian on construction.
    pub hermiticity: f64,
    /// |tr ρ − 1| accepted for density matrices.
    pub trace: f64,
    /// Eigenvalues above −psd count as nonnegative.
    pub psd: f64,
    /// Complete-positivity / trace-preservation certification tolerance.
    pub cpt: f64,
    /// Lindblad-generator (conditional complete positivity) tolerance.
    pub lindblad: f64,
    /// ‖Z(t₀,t₀)‖ accepted as zero when validating exponent families.
    pub zero_at_origin: f64,
    /// Classification threshold for the Markovianity probe.
    pub markovian: f64,
    /// Allowed disagreement between the quadrature and Fréchet evaluation
    /// paths of the local-generator formula.
    pub cross_check: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermiticity: 1e-12,
            trace: 1e-12,
            psd: 1e-10,
            cpt: 1e-10,
            lindblad: 1e-10,
            zero_at_origin: 1e-12,
            markovian: 1e-8,
            cross_check: 1e-6,
        }
    }
}

/// Complex unit i.
pub const IM: Complex64 = Complex64::new(0.0, 1.0);

/// Real scalar promoted to a complex one.
#[inline]
pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Max absolute entry, the workhorse norm for tolerance checks.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Max entrywise |M − M†|.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Conjugate transpose.
pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// Errors unless every entry is finite.
pub fn ensure_finite(m: &CMatrix, what: &str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Validation(format!("{what} contains non-finite entries")))
    }
}

/// Matrix unit E_{ij} = |i⟩⟨j| of dimension d (0-indexed).
pub fn matrix_unit(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = re(1.0);
    m
}

/// Column-stacking vectorization: columns of `op` stacked top to bottom.
pub fn vec_op(op: &CMatrix) -> Result<CVector> {
    if op.nrows() != op.ncols() {
        return Err(Error::Dimension(format!(
            "vec expects a square operator, got {}x{}",
            op.nrows(),
            op.ncols()
        )));
    }
    Ok(CVector::from_column_slice(op.as_slice()))
}

/// Inverse of [`vec_op`]; the length must be a perfect square.
pub fn unvec(v: &CVector) -> Result<CMatrix> {
    let n = v.len();
    let d = (n as f64).sqrt().round() as usize;
    if d * d != n {
        return Err(Error::Dimension(format!(
            "unvec expects a square length, got {n}"
        )));
    }
    Ok(CMatrix::from_column_slice(d, d, v.as_slice()))
}

/// Density matrix ρ: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        Self::with_tolerances(mat, &Tolerances::default())
    }

    pub fn with_tolerances(mat: CMatrix, tol: &Tolerances) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::Dimension(format!(
                "density matrix must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        ensure_finite(&mat, "density matrix")?;
        let herm = hermiticity_defect(&mat);
        if herm > tol.hermiticity {
            return Err(Error::Validation(format!(
                "density matrix is not Hermitian: defect {herm:e}"
            )));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::Validation(format!(
                "density matrix trace is {tr}, expected 1"
            )));
        }
        let eigs = hermitian_eigvals_tol(&mat, 10.0 * tol.hermiticity)?;
        if eigs[0] < -tol.psd {
            return Err(Error::Validation(format!(
                "density matrix has negative eigenvalue {:e}",
                eigs[0]
            )));
        }
        Ok(DensityMatrix { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix {
            mat: CMatrix::identity(d, d).map(|z| z / re(d as f64)),
        }
    }

    /// Pure state |i⟩⟨i|.
    pub fn basis_state(d: usize, i: usize) -> Self {
        DensityMatrix {
            mat: matrix_unit(d, i, i),
        }
    }
}

/// A linear map on d×d operators, stored as its d²×d² matrix acting on
/// column-stacked operands. Houses dynamical maps Λ, local generators L,
/// exponents Z, and their integrands X alike.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperOp {
    dim: usize,
    mat: CMatrix,
}

impl SuperOp {
    pub fn new(dim: usize, mat: CMatrix) -> Result<Self> {
        let n = dim * dim;
        if mat.nrows() != n || mat.ncols() != n {
            return Err(Error::Dimension(format!(
                "superoperator on dimension {dim} must be {n}x{n}, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        ensure_finite(&mat, "superoperator")?;
        Ok(SuperOp { dim, mat })
    }

    pub fn identity(dim: usize) -> Self {
        SuperOp {
            dim,
            mat: CMatrix::identity(dim * dim, dim * dim),
        }
    }

    pub fn zero(dim: usize) -> Self {
        SuperOp {
            dim,
            mat: CMatrix::zeros(dim * dim, dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Apply the map to an operator: unvec(S · vec(op)).
    pub fn apply(&self, op: &CMatrix) -> Result<CMatrix> {
        if op.nrows() != self.dim || op.ncols() != self.dim {
            return Err(Error::Dimension(format!(
                "operand is {}x{}, superoperator acts on {}x{}",
                op.nrows(),
                op.ncols(),
                self.dim,
                self.dim
            )));
        }
        unvec(&(&self.mat * vec_op(op)?))
    }

    /// Apply the Hilbert-Schmidt adjoint map (Heisenberg picture).
    pub fn apply_adjoint(&self, op: &CMatrix) -> Result<CMatrix> {
        if op.nrows() != self.dim || op.ncols() != self.dim {
            return Err(Error::Dimension(format!(
                "operand is {}x{}, superoperator acts on {}x{}",
                op.nrows(),
                op.ncols(),
                self.dim,
                self.dim
            )));
        }
        unvec(&(self.mat.adjoint() * vec_op(op)?))
    }

    /// ‖Φ†(I)‖∞ — zero for a generator that annihilates trace.
    pub fn trace_annihilation_defect(&self) -> f64 {
        let id = CMatrix::identity(self.dim, self.dim);
        max_abs(&self.apply_adjoint(&id).expect("dimensions agree"))
    }

    /// ‖Φ†(I) − I‖∞ — zero for a trace-preserving map.
    pub fn trace_preservation_defect(&self) -> f64 {
        let id = CMatrix::identity(self.dim, self.dim);
        max_abs(&(self.apply_adjoint(&id).expect("dimensions agree") - id))
    }

    /// Matrix exponential of the superoperator.
    pub fn expm(&self) -> Result<SuperOp> {
        Ok(SuperOp {
            dim: self.dim,
            mat: expm(&self.mat)?,
        })
    }

    pub fn scale(&self, c: Complex64) -> SuperOp {
        SuperOp {
            dim: self.dim,
            mat: self.mat.map(|z| z * c),
        }
    }

    pub fn scale_re(&self, c: f64) -> SuperOp {
        self.scale(re(c))
    }

    /// Max absolute entry of the representing matrix.
    pub fn max_abs(&self) -> f64 {
        max_abs(&self.mat)
    }
}

impl std::ops::Add for &SuperOp {
    type Output = SuperOp;
    fn add(self, rhs: &SuperOp) -> SuperOp {
        assert_eq!(self.dim, rhs.dim, "superoperator dimensions differ");
        SuperOp {
            dim: self.dim,
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl std::ops::Sub for &SuperOp {
    type Output = SuperOp;
    fn sub(self, rhs: &SuperOp) -> SuperOp {
        assert_eq!(self.dim, rhs.dim, "superoperator dimensions differ");
        SuperOp {
            dim: self.dim,
            mat: &self.mat - &rhs.mat,
        }
    }
}

/// Composition: (S1 * S2)(ρ) = S1(S2(ρ)).
impl std::ops::Mul for &SuperOp {
    type Output = SuperOp;
    fn mul(self, rhs: &SuperOp) -> SuperOp {
        assert_eq!(self.dim, rhs.dim, "superoperator dimensions differ");
        SuperOp {
            dim: self.dim,
            mat: &self.mat * &rhs.mat,
        }
    }
}

impl std::ops::Neg for &SuperOp {
    type Output = SuperOp;
    fn neg(self) -> SuperOp {
        self.scale(re(-1.0))
    }
}

/// Superoperator of ρ ↦ a ρ b, i.e. bᵀ ⊗ a under column stacking.
pub fn sandwich_superop(a: &CMatrix, b: &CMatrix) -> Result<SuperOp> {
    if a.nrows() != a.ncols() || b.nrows() != b.ncols() {
        return Err(Error::Dimension(
            "sandwich factors must be square".into(),
        ));
    }
    if a.nrows() != b.nrows() {
        return Err(Error::Dimension(format!(
            "sandwich factors have different dimensions {} and {}",
            a.nrows(),
            b.nrows()
        )));
    }
    let d = a.nrows();
    SuperOp::new(d, b.transpose().kronecker(a))
}

/// Superoperator of left multiplication ρ ↦ a ρ.
pub fn left_mult_superop(a: &CMatrix) -> Result<SuperOp> {
    let id = CMatrix::identity(a.nrows(), a.ncols());
    sandwich_superop(a, &id)
}

/// Superoperator of right multiplication ρ ↦ ρ b.
pub fn right_mult_superop(b: &CMatrix) -> Result<SuperOp> {
    let id = CMatrix::identity(b.nrows(), b.ncols());
    sandwich_superop(&id, b)
}

/// Choi matrix Σ_{ij} E_{ij} ⊗ Φ(E_{ij}), unnormalized. The map Φ is
/// completely positive iff this matrix is positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    dim: usize,
    mat: CMatrix,
}

impl ChoiMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.mat)
    }

    /// Ascending eigenvalues. Errors if the Choi matrix is not Hermitian,
    /// i.e. if the source map does not preserve Hermiticity.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        hermitian_eigvals_tol(&self.mat, 1e-10)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }
}

/// Choi transform of a superoperator.
pub fn choi(s: &SuperOp) -> ChoiMatrix {
    let d = s.dim();
    let mut c = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let block = s
                .apply(&matrix_unit(d, i, j))
                .expect("dimensions agree by construction");
            for r in 0..d {
                for q in 0..d {
                    c[(i * d + r, j * d + q)] = block[(r, q)];
                }
            }
        }
    }
    ChoiMatrix { dim: d, mat: c }
}

// Squarings are capped well past the accuracy contract; beyond the cap the
// result would be dominated by rounding from repeated squaring anyway.
const EXPM_MAX_SQUARINGS: u32 = 40;

/// Matrix exponential. Scaling-and-squaring Padé behind the scenes
/// (nalgebra), with range checks on both ends.
pub fn expm(a: &CMatrix) -> Result<CMatrix> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "expm expects a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    ensure_finite(a, "expm argument")?;
    let norm1 = one_norm(a);
    if norm1 > (2.0f64).powi(EXPM_MAX_SQUARINGS as i32) {
        return Err(Error::NumericalRange(format!(
            "expm argument has 1-norm {norm1:e}, outside the supported range"
        )));
    }
    let e = a.clone().exp();
    ensure_finite(&e, "expm result")
        .map_err(|_| Error::NumericalRange("expm overflowed f64 range".into()))?;
    Ok(e)
}

fn one_norm(a: &CMatrix) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential together with its directional (Fréchet) derivative
/// along `e`: D = ∫₀¹ e^{sa} e e^{(1−s)a} ds.
///
/// Computed from the block-triangular embedding exp([[a, e], [0, a]]), whose
/// top-right block is exactly D; no extra tolerance knobs enter.
pub fn expm_frechet(a: &CMatrix, e: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = a.nrows();
    if a.ncols() != n || e.nrows() != n || e.ncols() != n {
        return Err(Error::Dimension(format!(
            "expm_frechet expects square matrices of equal size, got {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            e.nrows(),
            e.ncols()
        )));
    }
    let mut block = CMatrix::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(a);
    block.view_mut((0, n), (n, n)).copy_from(e);
    block.view_mut((n, n), (n, n)).copy_from(a);
    let big = expm(&block)?;
    let ea = CMatrix::from(big.view((0, 0), (n, n)));
    let d = CMatrix::from(big.view((0, n), (n, n)));
    Ok((ea, d))
}

/// Ascending real eigenvalues of a Hermitian matrix.
///
/// The input must be Hermitian within 1e−10; use [`hermitian_eigvals_tol`]
/// for a different gate.
pub fn hermitian_eigvals(a: &CMatrix) -> Result<Vec<f64>> {
    hermitian_eigvals_tol(a, 1e-10)
}

pub fn hermitian_eigvals_tol(a: &CMatrix, herm_tol: f64) -> Result<Vec<f64>> {
    Ok(hermitian_eigen_tol(a, herm_tol)?.0)
}

/// Full Hermitian eigendecomposition: ascending eigenvalues and the matrix
/// whose columns are the matching orthonormal eigenvectors.
pub fn hermitian_eigen(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    hermitian_eigen_tol(a, 1e-10)
}

fn hermitian_eigen_tol(a: &CMatrix, herm_tol: f64) -> Result<(Vec<f64>, CMatrix)> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "eigendecomposition expects a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    ensure_finite(a, "eigendecomposition argument")?;
    let defect = hermiticity_defect(a);
    if defect > herm_tol {
        return Err(Error::Validation(format!(
            "matrix is not Hermitian: defect {defect:e} exceeds {herm_tol:e}"
        )));
    }
    // Work on the exactly-Hermitian part so the decomposition is insensitive
    // to sub-tolerance asymmetry.
    let h = (a + a.adjoint()).map(|z| z * re(0.5));
    let se = nalgebra::SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| {
        se.eigenvalues[i]
            .partial_cmp(&se.eigenvalues[j])
            .expect("eigenvalues are finite")
    });
    let eigvals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let n = a.nrows();
    let mut vecs = CMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vecs.column_mut(k).copy_from(&se.eigenvectors.column(i));
    }
    Ok((eigvals, vecs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_z() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(-1.0)])
    }

    fn rand_cmatrix(d: usize, seed: &mut u64) -> CMatrix {
        let mut next = || {
            *seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((*seed >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        CMatrix::from_fn(d, d, |_, _| Complex64::new(next(), next()))
    }

    fn rand_hermitian(d: usize, seed: &mut u64) -> CMatrix {
        let m = rand_cmatrix(d, seed);
        (&m + m.adjoint()).map(|z| z * re(0.5))
    }

    // Pins the normative convention: column stacking, A ρ B ↦ Bᵀ ⊗ A.
    #[test]
    fn vectorization_convention() {
        let e11 = matrix_unit(2, 0, 0);
        let e12 = matrix_unit(2, 0, 1);
        assert_eq!(
            vec_op(&e11).unwrap().as_slice(),
            &[re(1.0), re(0.0), re(0.0), re(0.0)]
        );
        // E12 sits in column 2, row 1 under column stacking.
        assert_eq!(
            vec_op(&e12).unwrap().as_slice(),
            &[re(0.0), re(0.0), re(1.0), re(0.0)]
        );

        let mut seed = 7u64;
        let a = rand_cmatrix(3, &mut seed);
        let b = rand_cmatrix(3, &mut seed);
        let rho = rand_cmatrix(3, &mut seed);
        let s = sandwich_superop(&a, &b).unwrap();
        let direct = &a * &rho * &b;
        let via_superop = s.apply(&rho).unwrap();
        assert!(max_abs(&(direct - via_superop)) <= 1e-14);
    }

    #[test]
    fn vec_unvec_round_trip() {
        let mut seed = 3u64;
        for d in [2usize, 3, 4, 8] {
            let m = rand_cmatrix(d, &mut seed);
            let back = unvec(&vec_op(&m).unwrap()).unwrap();
            assert_eq!(m, back);
        }
    }

    #[test]
    fn vec_rejects_non_square() {
        let m = CMatrix::zeros(2, 3);
        assert!(matches!(vec_op(&m), Err(Error::Dimension(_))));
    }

    #[test]
    fn sandwich_identity_and_sigma_z() {
        let id = CMatrix::identity(2, 2);
        let s = sandwich_superop(&id, &id).unwrap();
        assert_eq!(s.matrix(), &CMatrix::identity(4, 4));

        let sz = sigma_z();
        let s = sandwich_superop(&sz, &sz).unwrap();
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![
            re(1.0),
            re(-1.0),
            re(-1.0),
            re(1.0),
        ]));
        assert!(max_abs(&(s.matrix() - expected)) <= 1e-15);
    }

    #[test]
    fn sandwich_rejects_mismatched_dims() {
        let a = CMatrix::identity(2, 2);
        let b = CMatrix::identity(3, 3);
        assert!(matches!(
            sandwich_superop(&a, &b),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn sandwich_matches_triple_product_on_random_states() {
        let mut seed = 11u64;
        let a = rand_cmatrix(2, &mut seed);
        let b = rand_cmatrix(2, &mut seed);
        let s = sandwich_superop(&a, &b).unwrap();
        for _ in 0..100 {
            let rho = rand_cmatrix(2, &mut seed);
            let direct = &a * &rho * &b;
            let mapped = s.apply(&rho).unwrap();
            assert!(max_abs(&(direct - mapped)) <= 1e-13);
        }
    }

    #[test]
    fn choi_of_identity_map() {
        let s = SuperOp::identity(2);
        let c = choi(&s);
        let eigs = c.eigenvalues().unwrap();
        let expected = [0.0, 0.0, 0.0, 2.0];
        for (got, want) in eigs.iter().zip(expected.iter()) {
            assert!((got - want).abs() <= 1e-12, "eigs {eigs:?}");
        }
    }

    #[test]
    fn choi_of_transpose_map_is_not_positive() {
        // Transpose under column stacking permutes vec components: the swap.
        let d = 2;
        let mut mat = CMatrix::zeros(4, 4);
        for i in 0..d {
            for j in 0..d {
                // vec index of E_ij is j*d + i; transpose sends it to E_ji.
                mat[(i * d + j, j * d + i)] = re(1.0);
            }
        }
        let s = SuperOp::new(2, mat).unwrap();
        let eigs = choi(&s).eigenvalues().unwrap();
        let expected = [-1.0, 1.0, 1.0, 1.0];
        for (got, want) in eigs.iter().zip(expected.iter()) {
            assert!((got - want).abs() <= 1e-12, "eigs {eigs:?}");
        }
    }

    #[test]
    fn choi_of_sigma_z_conjugation() {
        let sz = sigma_z();
        let s = sandwich_superop(&sz, &sz).unwrap();
        let eigs = choi(&s).eigenvalues().unwrap();
        let expected = [0.0, 0.0, 0.0, 2.0];
        for (got, want) in eigs.iter().zip(expected.iter()) {
            assert!((got - want).abs() <= 1e-12, "eigs {eigs:?}");
        }
    }

    #[test]
    fn expm_zero_and_diagonal() {
        let z = CMatrix::zeros(3, 3);
        assert!(max_abs(&(expm(&z).unwrap() - CMatrix::identity(3, 3))) <= 1e-15);

        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![re(0.7), re(-1.3)]));
        let e = expm(&d).unwrap();
        assert!((e[(0, 0)].re - 0.7f64.exp()).abs() <= 1e-14);
        assert!((e[(1, 1)].re - (-1.3f64).exp()).abs() <= 1e-14);
        assert!(e[(0, 1)].norm() <= 1e-15);
    }

    #[test]
    fn expm_nilpotent() {
        let n = CMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(0.0), re(0.0)]);
        let e = expm(&n).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[re(1.0), re(1.0), re(0.0), re(1.0)]);
        assert!(max_abs(&(e - expected)) <= 1e-15);
    }

    #[test]
    fn expm_inverse_identity_at_moderate_norm() {
        let mut seed = 19u64;
        for _ in 0..5 {
            let mut a = rand_cmatrix(4, &mut seed);
            // scale to spectral norm ≈ 5 via the 1-norm upper bound
            let scale = 5.0 / super::one_norm(&a);
            a = a.map(|z| z * re(scale));
            let e = expm(&a).unwrap();
            let einv = expm(&a.map(|z| -z)).unwrap();
            let defect = max_abs(&(&e * &einv - CMatrix::identity(4, 4)));
            assert!(defect <= 1e-11, "defect {defect:e}");
        }
    }

    #[test]
    fn expm_relative_accuracy_at_norm_50() {
        let mut seed = 23u64;
        let mut h = rand_hermitian(4, &mut seed);
        let eigs = hermitian_eigvals(&h).unwrap();
        let smax = eigs.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
        h = h.map(|z| z * re(50.0 / smax));
        let (eigs, vecs) = hermitian_eigen(&h).unwrap();
        let mut reference = CMatrix::zeros(4, 4);
        for k in 0..4 {
            let v = vecs.column(k);
            reference += (v * v.adjoint()).map(|z| z * re(eigs[k].exp()));
        }
        let e = expm(&h).unwrap();
        let rel = max_abs(&(&e - &reference)) / max_abs(&reference);
        assert!(rel <= 1e-12, "relative error {rel:e}");
    }

    #[test]
    fn expm_rejects_extreme_norm() {
        let huge = CMatrix::from_diagonal(&CVector::from_vec(vec![re(1e13), re(1e13)]));
        assert!(matches!(expm(&huge), Err(Error::NumericalRange(_))));
    }

    #[test]
    fn frechet_at_zero_base_point() {
        let mut seed = 31u64;
        let e = rand_cmatrix(3, &mut seed);
        let z = CMatrix::zeros(3, 3);
        let (ea, d) = expm_frechet(&z, &e).unwrap();
        assert!(max_abs(&(ea - CMatrix::identity(3, 3))) <= 1e-15);
        assert!(max_abs(&(d - e)) <= 1e-14);
    }

    #[test]
    fn frechet_commuting_direction_collapses() {
        // e = p(a) commutes with a, so D = expm(a)·e.
        let mut seed = 37u64;
        let a = rand_cmatrix(3, &mut seed).map(|z| z * re(0.4));
        let e = &a * &a + a.map(|z| z * re(2.0));
        let (ea, d) = expm_frechet(&a, &e).unwrap();
        assert!(max_abs(&(&ea * &e - d)) <= 1e-12);
    }

    #[test]
    fn frechet_matches_central_difference() {
        let mut seed = 41u64;
        let a = rand_cmatrix(4, &mut seed);
        let e = rand_cmatrix(4, &mut seed);
        let (_, d) = expm_frechet(&a, &e).unwrap();
        let h = 1e-6;
        let plus = expm(&(&a + e.map(|z| z * re(h)))).unwrap();
        let minus = expm(&(&a - e.map(|z| z * re(h)))).unwrap();
        let fd = (plus - minus).map(|z| z / re(2.0 * h));
        assert!(max_abs(&(d - fd)) <= 1e-6);
    }

    #[test]
    fn hermitian_eigvals_basics() {
        let eigs = hermitian_eigvals(&sigma_z()).unwrap();
        assert!((eigs[0] + 1.0).abs() <= 1e-14 && (eigs[1] - 1.0).abs() <= 1e-14);

        let eigs = hermitian_eigvals(&CMatrix::identity(3, 3)).unwrap();
        for l in eigs {
            assert!((l - 1.0).abs() <= 1e-14);
        }
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        let mut seed = 43u64;
        let h = rand_hermitian(5, &mut seed);
        let (eigs, vecs) = hermitian_eigen(&h).unwrap();
        let mut rec = CMatrix::zeros(5, 5);
        for k in 0..5 {
            let v = vecs.column(k);
            rec += (v * v.adjoint()).map(|z| z * re(eigs[k]));
        }
        assert!(max_abs(&(rec - h)) <= 1e-10);
    }

    #[test]
    fn hermitian_eigvals_rejects_non_hermitian() {
        let mut seed = 47u64;
        let m = rand_cmatrix(3, &mut seed);
        assert!(matches!(
            hermitian_eigvals(&m),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn density_matrix_validation() {
        let ok = DensityMatrix::new(CMatrix::from_row_slice(
            2,
            2,
            &[re(0.5), re(0.2), re(0.2), re(0.5)],
        ));
        assert!(ok.is_ok());

        let bad_trace = DensityMatrix::new(CMatrix::identity(2, 2));
        assert!(matches!(bad_trace, Err(Error::Validation(_))));

        let not_psd = DensityMatrix::new(CMatrix::from_row_slice(
            2,
            2,
            &[re(0.5), re(0.9), re(0.9), re(0.5)],
        ));
        assert!(matches!(not_psd, Err(Error::Validation(_))));
    }
}
