//! Matrices of operators `K_α → K_β`.
//!
//! An [`OperatorMatrix`] stores coefficients with respect to an input basis
//! of `K_α` and an output basis of `K_β`: column `p` holds the output-basis
//! coefficients of `A b_p`. For orthonormal output bases this is
//! `r_{s,p} = ⟨A v_p, w_s⟩`.

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg;
use crate::modelspace::{ModelBasis, ModelSpace, ModelVector};
use crate::quadrature::circle_mean;
use crate::symbol::BoundarySymbol;
use crate::{CMatrix, CVector};

#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    entries: CMatrix,
    in_basis: Arc<ModelBasis>,
    out_basis: Arc<ModelBasis>,
}

impl OperatorMatrix {
    pub fn new(
        entries: CMatrix,
        in_basis: Arc<ModelBasis>,
        out_basis: Arc<ModelBasis>,
    ) -> Result<Self> {
        if entries.ncols() != in_basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: in_basis.dim(),
                found: entries.ncols(),
            });
        }
        if entries.nrows() != out_basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: out_basis.dim(),
                found: entries.nrows(),
            });
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidParameter("operator entries must be finite"));
        }
        Ok(OperatorMatrix {
            entries,
            in_basis,
            out_basis,
        })
    }

    /// Wraps a matrix in Takenaka–Malmquist coordinates and re-expresses it
    /// in the given bases.
    pub fn from_tm(
        tm: &CMatrix,
        in_basis: Arc<ModelBasis>,
        out_basis: Arc<ModelBasis>,
    ) -> Result<Self> {
        if tm.ncols() != in_basis.dim() || tm.nrows() != out_basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: in_basis.dim() * out_basis.dim(),
                found: tm.len(),
            });
        }
        let entries = out_basis.inverse() * tm * in_basis.vectors();
        Ok(OperatorMatrix {
            entries,
            in_basis,
            out_basis,
        })
    }

    fn tm_between(tm: CMatrix, alpha: &ModelSpace, beta: &ModelSpace) -> Self {
        OperatorMatrix {
            entries: tm,
            in_basis: alpha.tm_basis(),
            out_basis: beta.tm_basis(),
        }
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn in_basis(&self) -> &Arc<ModelBasis> {
        &self.in_basis
    }

    pub fn out_basis(&self) -> &Arc<ModelBasis> {
        &self.out_basis
    }

    pub fn alpha(&self) -> &ModelSpace {
        self.in_basis.space()
    }

    pub fn beta(&self) -> &ModelSpace {
        self.out_basis.space()
    }

    /// The matrix in Takenaka–Malmquist coordinates on both sides.
    pub fn tm(&self) -> CMatrix {
        self.out_basis.vectors() * &self.entries * self.in_basis.inverse()
    }

    /// The same operator with respect to other bases of the same spaces.
    pub fn in_bases(
        &self,
        in_basis: &Arc<ModelBasis>,
        out_basis: &Arc<ModelBasis>,
    ) -> Result<Self> {
        if in_basis.space() != self.alpha() || out_basis.space() != self.beta() {
            return Err(Error::SpaceMismatch);
        }
        Self::from_tm(&self.tm(), in_basis.clone(), out_basis.clone())
    }

    pub fn apply(&self, f: &ModelVector) -> Result<ModelVector> {
        let f = f.to_basis(&self.in_basis)?;
        ModelVector::new(self.out_basis.clone(), &self.entries * f.coeffs())
    }

    /// Adjoint `K_β → K_α`, in TM coordinates.
    pub fn adjoint(&self) -> OperatorMatrix {
        Self::tm_between(self.tm().adjoint(), self.beta(), self.alpha())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.entries)
    }

    pub fn is_same_shape(&self, other: &OperatorMatrix) -> bool {
        self.alpha() == other.alpha() && self.beta() == other.beta()
    }

    /// `self + c·other`, in the bases of `self`.
    pub fn add_scaled(&self, c: Complex64, other: &OperatorMatrix) -> Result<OperatorMatrix> {
        if !self.is_same_shape(other) {
            return Err(Error::SpaceMismatch);
        }
        Self::from_tm(
            &(self.tm() + other.tm() * c),
            self.in_basis.clone(),
            self.out_basis.clone(),
        )
    }
}

/// `A_φ^{α,β}` in TM coordinates, `⟨φ φ_p^α, φ_s^β⟩` by circle quadrature.
pub fn atto_tm(
    alpha: &ModelSpace,
    beta: &ModelSpace,
    symbol: &dyn BoundarySymbol,
) -> Result<CMatrix> {
    let (m, n) = (alpha.dim(), beta.dim());
    let tol = alpha
        .tolerances()
        .quadrature
        .min(beta.tolerances().quadrature);
    let values = circle_mean(m * n, tol, |z, out| {
        let fa = alpha.tm_values(z);
        let fb = beta.tm_values(z);
        let phi = symbol.value(z);
        for p in 0..m {
            let left = phi * fa[p];
            for s in 0..n {
                out[s + p * n] = left * fb[s].conj();
            }
        }
    })?;
    Ok(CMatrix::from_column_slice(n, m, &values))
}

/// Matrix of `A_φ^{α,β} f = P_β(φ f)` with respect to the given bases.
pub fn atto_matrix(
    symbol: &dyn BoundarySymbol,
    in_basis: &Arc<ModelBasis>,
    out_basis: &Arc<ModelBasis>,
) -> Result<OperatorMatrix> {
    let tm = atto_tm(in_basis.space(), out_basis.space(), symbol)?;
    OperatorMatrix::from_tm(&tm, in_basis.clone(), out_basis.clone())
}

/// `S_α = A_z^α`.
pub fn compressed_shift(basis: &Arc<ModelBasis>) -> OperatorMatrix {
    let space = basis.space();
    let tm = space.shift_matrix().clone();
    OperatorMatrix::from_tm(&tm, basis.clone(), basis.clone()).expect("square by construction")
}

pub(crate) fn modified_shift_tm(space: &ModelSpace, c: Complex64) -> CMatrix {
    space.shift_matrix() + space.k0_coords() * space.k0_tilde_coords().adjoint() * c
}

/// `S_{α,c} = S_α + c (k_0 ⊗ k̃_0)` where `(f ⊗ g)h = ⟨h, g⟩ f`.
pub fn modified_shift(basis: &Arc<ModelBasis>, c: Complex64) -> OperatorMatrix {
    let tm = modified_shift_tm(basis.space(), c);
    OperatorMatrix::from_tm(&tm, basis.clone(), basis.clone()).expect("square by construction")
}

/// Coefficient `(λ + α(0)) / (1 - |α(0)|²)` turning `S_{α,c}` into the
/// Clark unitary `U_λ`.
pub fn clark_coefficient(space: &ModelSpace, lambda: Complex64) -> Complex64 {
    let a0 = space.alpha().at_zero();
    (lambda + a0) / (1.0 - a0.norm_sqr())
}

pub fn clark_unitary(basis: &Arc<ModelBasis>, lambda: Complex64) -> Result<OperatorMatrix> {
    let tol = basis.space().tolerances();
    if (lambda.norm() - 1.0).abs() > tol.unimodular {
        return Err(Error::NotUnimodular {
            what: "lambda",
            modulus: lambda.norm(),
        });
    }
    Ok(modified_shift(
        basis,
        clark_coefficient(basis.space(), lambda),
    ))
}

/// `g ⊗ f : K_α → K_β`, `h ↦ ⟨h, f⟩ g`, in the bases of `f` and `g`.
pub fn rank_one(g: &ModelVector, f: &ModelVector) -> OperatorMatrix {
    let tm = g.tm_coords() * f.tm_coords().adjoint();
    OperatorMatrix::from_tm(&tm, f.basis().clone(), g.basis().clone())
        .expect("dimensions follow the factors")
}

/// The two rank-one forms known to lie in `T(α,β)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankOneVariant {
    /// `k̃_w^β ⊗ k_w^α`.
    ConjKKernel,
    /// `k_w^β ⊗ k̃_w^α`.
    KernelConjK,
}

impl RankOneVariant {
    pub fn tm(self, alpha: &ModelSpace, beta: &ModelSpace, w: Complex64) -> CMatrix {
        match self {
            RankOneVariant::ConjKKernel => {
                beta.conj_kernel_coords(w) * alpha.kernel_coords(w).adjoint()
            }
            RankOneVariant::KernelConjK => {
                beta.kernel_coords(w) * alpha.conj_kernel_coords(w).adjoint()
            }
        }
    }
}

/// The standard rank-one operator of the given variant, in TM bases.
pub fn standard_rank_one(
    alpha: &ModelSpace,
    beta: &ModelSpace,
    w: Complex64,
    variant: RankOneVariant,
) -> Result<OperatorMatrix> {
    if w.norm() > 1.0 + alpha.tolerances().unimodular {
        return Err(Error::InvalidParameter(
            "w must lie in the closed unit disk",
        ));
    }
    Ok(OperatorMatrix::tm_between(
        variant.tm(alpha, beta, w),
        alpha,
        beta,
    ))
}

/// `C_β A C_α`, which is linear; returned in the bases of `a`.
pub fn conjugate_operator(a: &OperatorMatrix) -> OperatorMatrix {
    let tm = conjugate_tm(&a.tm(), a.alpha(), a.beta());
    OperatorMatrix::from_tm(&tm, a.in_basis.clone(), a.out_basis.clone()).expect("same shape")
}

pub(crate) fn conjugate_tm(tm: &CMatrix, alpha: &ModelSpace, beta: &ModelSpace) -> CMatrix {
    beta.conjugation_matrix() * linalg::conj(tm) * linalg::conj(alpha.conjugation_matrix())
}

/// TM matrices of `A_{conj(φ_k^α)}` for each TM function of `K_α`, then of
/// `A_{φ_s^β}` for each TM function of `K_β`.
pub fn elementary_matrices(alpha: &ModelSpace, beta: &ModelSpace) -> Result<Vec<CMatrix>> {
    let (m, n) = (alpha.dim(), beta.dim());
    let count = m + n;
    let tol = alpha
        .tolerances()
        .quadrature
        .min(beta.tolerances().quadrature);
    let values = circle_mean(count * m * n, tol, |z, out| {
        let fa = alpha.tm_values(z);
        let fb = beta.tm_values(z);
        for idx in 0..count {
            let phi = if idx < m { fa[idx].conj() } else { fb[idx - m] };
            let block = &mut out[idx * m * n..(idx + 1) * m * n];
            for p in 0..m {
                let left = phi * fa[p];
                for s in 0..n {
                    block[s + p * n] = left * fb[s].conj();
                }
            }
        }
    })?;
    Ok((0..count)
        .map(|idx| CMatrix::from_column_slice(n, m, &values[idx * m * n..(idx + 1) * m * n]))
        .collect())
}

/// TM matrix of `A_{conj(χ)+ψ}` assembled from [`elementary_matrices`]
/// using TM coordinates of `χ` and `ψ`.
pub fn structured_tm(elementary: &[CMatrix], chi: &CVector, psi: &CVector) -> CMatrix {
    let m = chi.len();
    let mut out = CMatrix::zeros(elementary[0].nrows(), elementary[0].ncols());
    for (k, c) in chi.iter().enumerate() {
        out += &elementary[k] * c.conj();
    }
    for (s, c) in psi.iter().enumerate() {
        out += &elementary[m + s] * *c;
    }
    out
}

/// Numerical rank of the span of the structured symbol family.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanReport {
    pub dim: usize,
    pub expected: usize,
    pub singular_values: Vec<f64>,
    /// `log10(σ_dim / σ_{dim+1})`; infinite if nothing follows `σ_dim`.
    pub gap_decades: f64,
    /// Whether `T(α,β)` is all of `L(K_α, K_β)`.
    pub is_full: bool,
}

pub fn span_dimension(alpha: &ModelSpace, beta: &ModelSpace) -> Result<SpanReport> {
    let (m, n) = (alpha.dim(), beta.dim());
    let mats = elementary_matrices(alpha, beta)?;
    let mut stacked = CMatrix::zeros(mats.len(), m * n);
    for (row, mat) in mats.iter().enumerate() {
        for (col, v) in mat.iter().enumerate() {
            stacked[(row, col)] = *v;
        }
    }
    let singular_values = linalg::singular_values(&stacked);
    let dim = linalg::numerical_rank(&singular_values, alpha.tolerances().rank);
    let gap_decades = match (
        singular_values.get(dim.wrapping_sub(1)),
        singular_values.get(dim),
    ) {
        (Some(a), Some(b)) if *b > 0.0 => Float::log10(a / b),
        _ => f64::INFINITY,
    };
    Ok(SpanReport {
        dim,
        expected: m + n - 1,
        singular_values,
        gap_decades,
        is_full: dim == m * n,
    })
}

/// Frobenius distance between the TM forms of two operators.
pub fn tm_distance(a: &OperatorMatrix, b: &OperatorMatrix) -> f64 {
    linalg::frobenius(&(a.tm() - b.tm()))
}
