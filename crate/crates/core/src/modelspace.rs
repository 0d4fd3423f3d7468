//! The model space `K_α`, its bases, kernels and conjugation.
//!
//! Coordinates are always taken with respect to the Takenaka–Malmquist (TM)
//! functions
//!
//! ```text
//! φ_k(z) = √(1 - |a_k|²) / (1 - conj(a_k) z) · ∏_{j<k} (z - a_j) / (1 - conj(a_j) z)
//! ```
//!
//! which form an orthonormal basis of `K_α` for any zero configuration.
//! Inner products of TM coordinate vectors are plain Euclidean products.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;
use num_traits::Float;

use crate::blaschke::{principal_arg, BlaschkeProduct, ClarkPointSet};
use crate::error::{Error, Result};
use crate::linalg;
use crate::quadrature::circle_mean;
use crate::tolerance::Tolerances;
use crate::{CMatrix, CVector};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `K_α` together with cached structure: compressed shift, conjugation and
/// the kernels at the origin. Cloning is cheap.
#[derive(Clone)]
pub struct ModelSpace {
    inner: Arc<SpaceData>,
}

struct SpaceData {
    alpha: BlaschkeProduct,
    tol: Tolerances,
    shift: CMatrix,
    conj: CMatrix,
    k0: CVector,
    k0_tilde: CVector,
}

impl fmt::Debug for ModelSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelSpace")
            .field("alpha", &self.inner.alpha)
            .finish()
    }
}

impl PartialEq for ModelSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.alpha == other.inner.alpha
    }
}

impl ModelSpace {
    pub fn new(alpha: BlaschkeProduct) -> Result<Self> {
        Self::with_tolerances(alpha, Tolerances::default())
    }

    pub fn with_tolerances(alpha: BlaschkeProduct, tol: Tolerances) -> Result<Self> {
        let shift = tm_compressed_shift(alpha.zeros());
        let k0 = conj_vec(&tm_values(&alpha, ZERO));
        let k0_tilde = reversed_values(&alpha, ZERO);
        let mut data = SpaceData {
            alpha,
            tol,
            shift,
            conj: CMatrix::zeros(0, 0),
            k0,
            k0_tilde,
        };
        data.conj = clark_conjugation_matrix(&data.alpha, ONE, &tol)?;
        Ok(ModelSpace {
            inner: Arc::new(data),
        })
    }

    pub fn alpha(&self) -> &BlaschkeProduct {
        &self.inner.alpha
    }

    pub fn dim(&self) -> usize {
        self.inner.alpha.degree()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.inner.tol
    }

    /// Values `φ_1(z), …, φ_m(z)` of the TM functions.
    pub fn tm_values(&self, z: Complex64) -> CVector {
        tm_values(&self.inner.alpha, z)
    }

    /// Values of `C_α φ_1, …, C_α φ_m` at `z`.
    pub fn conjugate_tm_values(&self, z: Complex64) -> CVector {
        reversed_values(&self.inner.alpha, z)
    }

    /// TM coordinates of `k_w`; valid on the closed disk.
    pub fn kernel_coords(&self, w: Complex64) -> CVector {
        conj_vec(&self.tm_values(w))
    }

    /// TM coordinates of `k̃_w = C_α k_w`, using `⟨k̃_w, φ_k⟩ = (C_α φ_k)(w)`.
    pub fn conj_kernel_coords(&self, w: Complex64) -> CVector {
        self.conjugate_tm_values(w)
    }

    pub fn k0_coords(&self) -> &CVector {
        &self.inner.k0
    }

    pub fn k0_tilde_coords(&self) -> &CVector {
        &self.inner.k0_tilde
    }

    /// Matrix `J` with `C_α f = J conj(f)` in TM coordinates.
    pub fn conjugation_matrix(&self) -> &CMatrix {
        &self.inner.conj
    }

    /// Compressed shift `S_α` in TM coordinates.
    pub fn shift_matrix(&self) -> &CMatrix {
        &self.inner.shift
    }

    /// `J` computed from the boundary formula `C_α f = α z̄ conj(f)` by
    /// circle quadrature rather than from the Clark basis.
    pub fn conjugation_matrix_by_quadrature(&self) -> Result<CMatrix> {
        let m = self.dim();
        let alpha = &self.inner.alpha;
        let values = circle_mean(m * m, self.inner.tol.quadrature, |z, out| {
            let phi = tm_values(alpha, z);
            let az = alpha.eval(z) * z.conj();
            for k in 0..m {
                let ck = az * phi[k].conj();
                for j in 0..m {
                    out[j + k * m] = ck * phi[j].conj();
                }
            }
        })?;
        Ok(CMatrix::from_column_slice(m, m, &values))
    }

    /// TM coordinates of an arbitrary boundary function `h`, via
    /// `⟨h, φ_j⟩` computed by quadrature. Only meaningful if `h ∈ K_α`.
    pub fn project_boundary_function<F>(&self, h: F) -> Result<CVector>
    where
        F: Fn(Complex64) -> Complex64,
    {
        let m = self.dim();
        let alpha = &self.inner.alpha;
        let values = circle_mean(m, self.inner.tol.quadrature, |z, out| {
            let phi = tm_values(alpha, z);
            let hz = h(z);
            for j in 0..m {
                out[j] = hz * phi[j].conj();
            }
        })?;
        Ok(CVector::from_vec(values))
    }

    pub fn tm_basis(&self) -> Arc<ModelBasis> {
        let m = self.dim();
        Arc::new(ModelBasis {
            space: self.clone(),
            kind: BasisKind::TakenakaMalmquist,
            vectors: CMatrix::identity(m, m),
            inverse: CMatrix::identity(m, m),
            gram: CMatrix::identity(m, m),
            clark: None,
            omega: None,
        })
    }

    pub fn basis(&self, kind: BasisKind) -> Result<Arc<ModelBasis>> {
        match kind {
            BasisKind::TakenakaMalmquist => Ok(self.tm_basis()),
            BasisKind::KernelAtZeros => {
                if !self.alpha().has_distinct_zeros() {
                    return Err(Error::RepeatedZeros);
                }
                let m = self.dim();
                let mut vectors = CMatrix::zeros(m, m);
                for (j, a) in self.alpha().zeros().iter().enumerate() {
                    vectors.set_column(j, &self.kernel_coords(*a));
                }
                self.finish_basis(kind, vectors, None, None)
            }
            BasisKind::Clark(lambda) => {
                let clark = self.alpha().clark_points(lambda, &self.inner.tol)?;
                let vectors = self.clark_vectors(&clark);
                self.finish_basis(BasisKind::Clark(clark.lambda), vectors, Some(clark), None)
            }
            BasisKind::ModifiedClark(lambda) => {
                self.modified_clark_basis(lambda, ArgBranch::default())
            }
        }
    }

    pub fn clark_basis(&self, lambda: Complex64) -> Result<Arc<ModelBasis>> {
        self.basis(BasisKind::Clark(lambda))
    }

    /// Clark basis with the points in the order given by `clark`, which
    /// must come from [`BlaschkeProduct::clark_points`] for this space.
    pub fn clark_basis_from_points(&self, clark: ClarkPointSet) -> Result<Arc<ModelBasis>> {
        if clark.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: clark.len(),
            });
        }
        for eta in &clark.points {
            let dev = (self.alpha().eval(*eta) - clark.target).norm();
            if dev > self.inner.tol.residual {
                return Err(Error::RootResidual { residual: dev });
            }
        }
        let vectors = self.clark_vectors(&clark);
        self.finish_basis(BasisKind::Clark(clark.lambda), vectors, Some(clark), None)
    }

    /// Modified Clark basis `e_j = ω_j v_j` with
    /// `ω_j = exp(-(i/2)(arg η_j - arg α_λ))`, which makes every `e_j` a
    /// fixed point of `C_α`. When `α(0) = 0`, `α_λ = λ`.
    pub fn modified_clark_basis(
        &self,
        lambda: Complex64,
        branch: ArgBranch,
    ) -> Result<Arc<ModelBasis>> {
        let clark = self.alpha().clark_points(lambda, &self.inner.tol)?;
        let mut vectors = self.clark_vectors(&clark);
        let target_arg = branch.arg(clark.target);
        let omega: Vec<Complex64> = clark
            .points
            .iter()
            .map(|eta| Complex64::from_polar(1.0, -0.5 * (branch.arg(*eta) - target_arg)))
            .collect();
        for (j, w) in omega.iter().enumerate() {
            let col = vectors.column(j) * *w;
            vectors.set_column(j, &col);
        }
        self.finish_basis(
            BasisKind::ModifiedClark(clark.lambda),
            vectors,
            Some(clark),
            Some(omega),
        )
    }

    fn clark_vectors(&self, clark: &ClarkPointSet) -> CMatrix {
        let m = self.dim();
        let mut vectors = CMatrix::zeros(m, m);
        for (j, eta) in clark.points.iter().enumerate() {
            let k = self.kernel_coords(*eta) / Complex64::new(clark.kernel_norm(j), 0.0);
            vectors.set_column(j, &k);
        }
        vectors
    }

    fn finish_basis(
        &self,
        kind: BasisKind,
        vectors: CMatrix,
        clark: Option<ClarkPointSet>,
        omega: Option<Vec<Complex64>>,
    ) -> Result<Arc<ModelBasis>> {
        let gram = vectors.adjoint() * &vectors;
        let inverse = linalg::inverse(&vectors)?;
        Ok(Arc::new(ModelBasis {
            space: self.clone(),
            kind,
            vectors,
            inverse,
            gram,
            clark,
            omega,
        }))
    }

    /// `k_w` as a vector in the TM basis.
    pub fn kernel(&self, w: Complex64) -> ModelVector {
        ModelVector {
            basis: self.tm_basis(),
            coeffs: self.kernel_coords(w),
        }
    }

    /// `k̃_w` as a vector in the TM basis.
    pub fn conj_kernel(&self, w: Complex64) -> ModelVector {
        ModelVector {
            basis: self.tm_basis(),
            coeffs: self.conj_kernel_coords(w),
        }
    }

    /// `C_α f`, returned in the basis of `f`.
    pub fn conjugation(&self, f: &ModelVector) -> Result<ModelVector> {
        self.check_member(f)?;
        let tm = self.conjugation_matrix() * conj_vec(&f.tm_coords());
        ModelVector::from_tm(f.basis.clone(), &tm)
    }

    /// `C_α f` from sampling `α z̄ conj(f)` on the circle and re-expanding.
    pub fn conjugation_by_boundary(&self, f: &ModelVector) -> Result<ModelVector> {
        self.check_member(f)?;
        let alpha = &self.inner.alpha;
        let tm = self.project_boundary_function(|z| alpha.eval(z) * z.conj() * f.eval(z).conj())?;
        ModelVector::from_tm(f.basis.clone(), &tm)
    }

    fn check_member(&self, f: &ModelVector) -> Result<()> {
        if f.basis.space != *self {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }
}

/// Branch of `arg` used for the modified Clark phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ArgBranch {
    /// `[0, 2π)`.
    #[default]
    ZeroToTwoPi,
    /// `(-π, π]`.
    MinusPiToPi,
}

impl ArgBranch {
    pub fn arg(self, z: Complex64) -> f64 {
        match self {
            ArgBranch::ZeroToTwoPi => principal_arg(z),
            ArgBranch::MinusPiToPi => {
                let a = z.arg();
                if a <= -PI {
                    a + 2.0 * PI
                } else {
                    a
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasisKind {
    TakenakaMalmquist,
    KernelAtZeros,
    Clark(Complex64),
    ModifiedClark(Complex64),
}

impl BasisKind {
    /// Whether bases of this kind are orthonormal.
    pub fn is_orthonormal(&self) -> bool {
        !matches!(self, BasisKind::KernelAtZeros)
    }

    pub fn lambda(&self) -> Option<Complex64> {
        match self {
            BasisKind::Clark(l) | BasisKind::ModifiedClark(l) => Some(*l),
            _ => None,
        }
    }
}

/// An ordered basis of `K_α`, stored as TM coordinate columns.
#[derive(Debug, Clone)]
pub struct ModelBasis {
    space: ModelSpace,
    kind: BasisKind,
    vectors: CMatrix,
    inverse: CMatrix,
    gram: CMatrix,
    clark: Option<ClarkPointSet>,
    omega: Option<Vec<Complex64>>,
}

impl ModelBasis {
    pub fn space(&self) -> &ModelSpace {
        &self.space
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    /// Columns are the basis vectors in TM coordinates.
    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    /// Inverse of [`vectors`](ModelBasis::vectors): maps TM coordinates to
    /// coefficients in this basis.
    pub fn inverse(&self) -> &CMatrix {
        &self.inverse
    }

    /// `gram[(i, j)] = ⟨b_j, b_i⟩`.
    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    pub fn clark(&self) -> Option<&ClarkPointSet> {
        self.clark.as_ref()
    }

    pub fn omega(&self) -> Option<&[Complex64]> {
        self.omega.as_deref()
    }

    /// Value of basis function `j` at `z`.
    pub fn eval(&self, j: usize, z: Complex64) -> Complex64 {
        self.space.tm_values(z).dot(&self.vectors.column(j))
    }

    /// The `j`-th basis vector.
    pub fn vector(self: &Arc<Self>, j: usize) -> ModelVector {
        let mut coeffs = CVector::zeros(self.dim());
        coeffs[j] = ONE;
        ModelVector {
            basis: self.clone(),
            coeffs,
        }
    }

    /// Whether both bases are the same basis of the same space.
    pub fn same_as(&self, other: &ModelBasis) -> bool {
        self.space == other.space && self.kind == other.kind
    }
}

/// Matrix `T` with `coeffs_to = T · coeffs_from`.
pub fn change_of_basis(from: &ModelBasis, to: &ModelBasis) -> Result<CMatrix> {
    if from.space != to.space {
        return Err(Error::SpaceMismatch);
    }
    Ok(&to.inverse * &from.vectors)
}

/// An element of `K_α` given by coefficients over a basis.
#[derive(Debug, Clone)]
pub struct ModelVector {
    basis: Arc<ModelBasis>,
    coeffs: CVector,
}

impl ModelVector {
    pub fn new(basis: Arc<ModelBasis>, coeffs: CVector) -> Result<Self> {
        if coeffs.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: coeffs.len(),
            });
        }
        Ok(ModelVector { basis, coeffs })
    }

    pub fn from_tm(basis: Arc<ModelBasis>, tm: &CVector) -> Result<Self> {
        if tm.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: tm.len(),
            });
        }
        let coeffs = basis.inverse() * tm;
        Ok(ModelVector { basis, coeffs })
    }

    pub fn zero(basis: Arc<ModelBasis>) -> Self {
        let m = basis.dim();
        ModelVector {
            basis,
            coeffs: CVector::zeros(m),
        }
    }

    pub fn basis(&self) -> &Arc<ModelBasis> {
        &self.basis
    }

    pub fn space(&self) -> &ModelSpace {
        self.basis.space()
    }

    pub fn coeffs(&self) -> &CVector {
        &self.coeffs
    }

    pub fn tm_coords(&self) -> CVector {
        self.basis.vectors() * &self.coeffs
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.space().tm_values(z).dot(&self.tm_coords())
    }

    /// The same vector expressed in `basis`.
    pub fn to_basis(&self, basis: &Arc<ModelBasis>) -> Result<ModelVector> {
        if self.basis.space != basis.space {
            return Err(Error::SpaceMismatch);
        }
        ModelVector::from_tm(basis.clone(), &self.tm_coords())
    }

    /// `⟨self, other⟩`, linear in `self`.
    pub fn inner(&self, other: &ModelVector) -> Result<Complex64> {
        if self.basis.space != other.basis.space {
            return Err(Error::SpaceMismatch);
        }
        if self.basis.same_as(&other.basis) {
            Ok((self.basis.gram() * &self.coeffs).dot(&conj_vec(&other.coeffs)))
        } else {
            Ok(self.tm_coords().dot(&conj_vec(&other.tm_coords())))
        }
    }

    pub fn norm(&self) -> f64 {
        self.tm_coords().norm()
    }

    pub fn scaled(&self, c: Complex64) -> ModelVector {
        ModelVector {
            basis: self.basis.clone(),
            coeffs: &self.coeffs * c,
        }
    }

    /// `self + c · other`, in the basis of `self`.
    pub fn add_scaled(&self, c: Complex64, other: &ModelVector) -> Result<ModelVector> {
        let other = other.to_basis(&self.basis)?;
        Ok(ModelVector {
            basis: self.basis.clone(),
            coeffs: &self.coeffs + other.coeffs * c,
        })
    }
}

/// `⟨f, g⟩`, linear in `f`.
pub fn inner_product(f: &ModelVector, g: &ModelVector) -> Result<Complex64> {
    f.inner(g)
}

pub(crate) fn conj_vec(v: &CVector) -> CVector {
    v.map(|z| z.conj())
}

fn tm_values(alpha: &BlaschkeProduct, z: Complex64) -> CVector {
    let zeros = alpha.zeros();
    let mut out = CVector::zeros(zeros.len());
    let mut prefix = ONE;
    for (k, a) in zeros.iter().enumerate() {
        let d = ONE - a.conj() * z;
        out[k] = prefix * Float::sqrt(1.0 - a.norm_sqr()) / d;
        prefix *= (z - a) / d;
    }
    out
}

/// `C_α φ_k = ε √(1 - |a_k|²) / (1 - conj(a_k) z) · ∏_{j>k} b_j` with
/// `b_j = (z - a_j)/(1 - conj(a_j) z)` and `α = ε ∏ b_j`.
fn reversed_values(alpha: &BlaschkeProduct, z: Complex64) -> CVector {
    let zeros = alpha.zeros();
    let m = zeros.len();
    let eps = if m.is_multiple_of(2) {
        alpha.front()
    } else {
        -alpha.front()
    };
    let mut out = CVector::zeros(m);
    let mut suffix = eps;
    for k in (0..m).rev() {
        let a = zeros[k];
        let d = ONE - a.conj() * z;
        out[k] = suffix * Float::sqrt(1.0 - a.norm_sqr()) / d;
        suffix *= (z - a) / d;
    }
    out
}

/// Compressed shift in TM coordinates: lower triangular with `a_i` on the
/// diagonal and `√(1-|a_i|²) √(1-|a_j|²) ∏_{j<k<i} (-conj(a_k))` below.
fn tm_compressed_shift(zeros: &[Complex64]) -> CMatrix {
    let m = zeros.len();
    let mut s = CMatrix::zeros(m, m);
    for i in 0..m {
        s[(i, i)] = zeros[i];
        for j in 0..i {
            let mut entry = Complex64::new(
                Float::sqrt((1.0 - zeros[i].norm_sqr()) * (1.0 - zeros[j].norm_sqr())),
                0.0,
            );
            for a in &zeros[j + 1..i] {
                entry *= -a.conj();
            }
            s[(i, j)] = entry;
        }
    }
    s
}

/// `J = V D V^T` where `V` holds the Clark basis for `λ` and
/// `D = diag(α_λ conj(η_j))`, from `C_α v_j = α_λ conj(η_j) v_j`.
fn clark_conjugation_matrix(
    alpha: &BlaschkeProduct,
    lambda: Complex64,
    tol: &Tolerances,
) -> Result<CMatrix> {
    let clark = alpha.clark_points(lambda, tol)?;
    let m = alpha.degree();
    let mut v = CMatrix::zeros(m, m);
    for (j, eta) in clark.points.iter().enumerate() {
        let col = conj_vec(&tm_values(alpha, *eta)) / Complex64::new(clark.kernel_norm(j), 0.0);
        v.set_column(j, &col);
    }
    let d = CMatrix::from_diagonal(&CVector::from_iterator(
        m,
        clark.points.iter().map(|eta| clark.target * eta.conj()),
    ));
    Ok(&v * d * v.transpose())
}
