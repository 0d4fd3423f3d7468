//! Small dense helpers on top of nalgebra.

use alloc::vec::Vec;

use nalgebra::Schur;
use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::{CMatrix, CVector};

/// Roots of the polynomial with ascending coefficients `coeffs`, computed as
/// eigenvalues of the companion matrix.
pub(crate) fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut degree = coeffs.len().saturating_sub(1);
    while degree > 0 && coeffs[degree].norm() == 0.0 {
        degree -= 1;
    }
    if degree == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[degree];
    let mut companion = CMatrix::zeros(degree, degree);
    for i in 1..degree {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..degree {
        companion[(i, degree - 1)] = -coeffs[i] / lead;
    }
    let schur = match Schur::try_new(companion.clone(), f64::EPSILON, 10_000) {
        Some(s) => s,
        None => {
            // Shifted QR can stall on cyclic companion matrices (roots of
            // unity). A fixed unitary similarity breaks the symmetry.
            let h = householder(degree);
            Schur::try_new(&h * companion * &h, f64::EPSILON, 10_000).ok_or(Error::Inconsistent(
                "companion matrix Schur iteration did not converge",
            ))?
        }
    };
    let (_, t) = schur.unpack();
    Ok((0..degree).map(|i| t[(i, i)]).collect())
}

/// Hermitian unitary reflector `I - 2 v v^H / |v|²` with a fixed irregular `v`.
fn householder(len: usize) -> CMatrix {
    let v = CVector::from_fn(len, |i, _| {
        Complex64::new(1.0 + 0.31 * i as f64, 0.17 * (i * i) as f64 - 0.4)
    });
    let scale = 2.0 / v.norm_squared();
    CMatrix::identity(len, len) - &v * v.adjoint() * Complex64::new(scale, 0.0)
}

/// Largest entry modulus.
pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub(crate) fn frobenius(m: &CMatrix) -> f64 {
    Float::sqrt(m.iter().map(|z| z.norm_sqr()).sum::<f64>())
}

pub(crate) fn inverse(m: &CMatrix) -> Result<CMatrix> {
    m.clone()
        .try_inverse()
        .ok_or(Error::Inconsistent("singular change-of-basis matrix"))
}

/// Singular values in decreasing order.
pub(crate) fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    s
}

/// Number of singular values above `rel * σ_max`.
pub(crate) fn numerical_rank(values: &[f64], rel: f64) -> usize {
    let top = values.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    values.iter().filter(|&&s| s > rel * top).count()
}

/// Dominant singular triple `(σ, u, v)` with `m ≈ σ u v^H`.
pub(crate) fn dominant_triple(m: &CMatrix) -> (f64, CVector, CVector) {
    let svd = m.clone().svd(true, true);
    let (idx, sigma) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold(
            (0, -1.0),
            |best, (i, &s)| if s > best.1 { (i, s) } else { best },
        );
    let u = svd
        .u
        .as_ref()
        .map(|u| u.column(idx).into_owned())
        .unwrap_or_else(|| CVector::zeros(m.nrows()));
    let v = svd
        .v_t
        .as_ref()
        .map(|vt| vt.row(idx).adjoint())
        .unwrap_or_else(|| CVector::zeros(m.ncols()));
    (sigma.max(0.0), u, v)
}

/// Orthonormal basis (as columns) of the orthogonal complement of `u` in
/// `C^len`.
pub(crate) fn orthonormal_complement(u: &CVector) -> CMatrix {
    let len = u.len();
    let norm = u.norm();
    if len <= 1 {
        return CMatrix::zeros(len, 0);
    }
    let unit = u / Complex64::new(norm, 0.0);
    let mut basis: Vec<CVector> = Vec::with_capacity(len - 1);
    let mut span: Vec<CVector> = alloc::vec![unit];
    // Gram–Schmidt over the standard basis, twice for stability.
    let mut candidates: Vec<(f64, CVector)> = (0..len)
        .map(|i| {
            let mut e = CVector::zeros(len);
            e[i] = Complex64::new(1.0, 0.0);
            let proj = &span[0] * span[0].dotc(&e);
            let r = &e - proj;
            (r.norm(), e)
        })
        .collect();
    candidates.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(core::cmp::Ordering::Equal));
    for (_, e) in candidates {
        if basis.len() == len - 1 {
            break;
        }
        let mut r = e;
        for _ in 0..2 {
            for q in &span {
                let c = q.dotc(&r);
                r -= q * c;
            }
        }
        let rn = r.norm();
        if rn > 1e-8 {
            let q = r / Complex64::new(rn, 0.0);
            span.push(q.clone());
            basis.push(q);
        }
    }
    let mut out = CMatrix::zeros(len, basis.len());
    for (j, q) in basis.iter().enumerate() {
        out.set_column(j, q);
    }
    out
}

/// Entrywise complex conjugate.
pub(crate) fn conj(m: &CMatrix) -> CMatrix {
    m.map(|z| z.conj())
}
