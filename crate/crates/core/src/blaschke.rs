//! Finite Blaschke products and the Clark boundary equation.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg;
use crate::tolerance::Tolerances;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// `B(z) = c₀ ∏ (a_j - z) / (1 - conj(a_j) z)` with all `|a_j| < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeProduct {
    zeros: Vec<Complex64>,
    front: Complex64,
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<Complex64>, front: Complex64) -> Result<Self> {
        Self::with_tolerance(zeros, front, Tolerances::default().unimodular)
    }

    pub fn with_tolerance(
        zeros: Vec<Complex64>,
        front: Complex64,
        unimodular: f64,
    ) -> Result<Self> {
        if zeros.is_empty() {
            return Err(Error::EmptyProduct);
        }
        for (index, a) in zeros.iter().enumerate() {
            let modulus = a.norm();
            if modulus.is_nan() || modulus >= 1.0 {
                return Err(Error::ZeroOutsideDisk { index, modulus });
            }
        }
        let modulus = front.norm();
        if modulus.is_nan() || (modulus - 1.0).abs() > unimodular {
            return Err(Error::NotUnimodular {
                what: "front factor",
                modulus,
            });
        }
        // Store an exactly unimodular constant.
        let front = front / modulus;
        Ok(BlaschkeProduct { zeros, front })
    }

    /// Product with front factor 1.
    pub fn from_zeros(zeros: Vec<Complex64>) -> Result<Self> {
        Self::new(zeros, ONE)
    }

    /// `z^k`, written as `(-1)^k ∏ (0 - z)`.
    pub fn monomial(k: usize) -> Result<Self> {
        let front = if k.is_multiple_of(2) { ONE } else { -ONE };
        Self::new(alloc::vec![Complex64::new(0.0, 0.0); k], front)
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn front(&self) -> Complex64 {
        self.front
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn has_distinct_zeros(&self) -> bool {
        let z = &self.zeros;
        (0..z.len()).all(|i| (i + 1..z.len()).all(|j| z[i] != z[j]))
    }

    /// `B(z)` without the pole check. Intended for `|z| ≤ 1`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.zeros
            .iter()
            .fold(self.front, |acc, a| acc * (a - z) / (ONE - a.conj() * z))
    }

    /// `B(z)`, rejecting points within `tol.pole` of a pole.
    pub fn evaluate(&self, z: Complex64, tol: &Tolerances) -> Result<Complex64> {
        self.check_pole(z, tol)?;
        Ok(self.eval(z))
    }

    /// `B'(z)` via the product rule, so zeros of `B` need no special branch.
    pub fn derivative_at(&self, z: Complex64) -> Complex64 {
        let factors: Vec<Complex64> = self
            .zeros
            .iter()
            .map(|a| (a - z) / (ONE - a.conj() * z))
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        for (j, a) in self.zeros.iter().enumerate() {
            let d = ONE - a.conj() * z;
            let mut term = Complex64::new(a.norm_sqr() - 1.0, 0.0) / (d * d);
            for (i, f) in factors.iter().enumerate() {
                if i != j {
                    term *= f;
                }
            }
            total += term;
        }
        self.front * total
    }

    pub fn derivative(&self, z: Complex64, tol: &Tolerances) -> Result<Complex64> {
        self.check_pole(z, tol)?;
        Ok(self.derivative_at(z))
    }

    fn check_pole(&self, z: Complex64, tol: &Tolerances) -> Result<()> {
        for a in &self.zeros {
            if a.norm() == 0.0 {
                continue;
            }
            let pole = ONE / a.conj();
            if (z - pole).norm() < tol.pole {
                return Err(Error::PoleProximity { z });
            }
        }
        Ok(())
    }

    /// `B(0)`.
    pub fn at_zero(&self) -> Complex64 {
        self.eval(Complex64::new(0.0, 0.0))
    }

    /// The Clark target `α_λ = (λ + α(0)) / (1 + conj(α(0)) λ)`.
    pub fn clark_target(&self, lambda: Complex64) -> Complex64 {
        let a0 = self.at_zero();
        (lambda + a0) / (ONE + a0.conj() * lambda)
    }

    /// The `λ` whose Clark target is `target`; inverse of [`clark_target`].
    ///
    /// [`clark_target`]: BlaschkeProduct::clark_target
    pub fn lambda_for_target(&self, target: Complex64) -> Complex64 {
        let a0 = self.at_zero();
        (target - a0) / (ONE - a0.conj() * target)
    }

    /// Numerator and denominator `(c₀ p, q)` with ascending coefficients.
    fn polynomial_parts(&self) -> (Vec<Complex64>, Vec<Complex64>) {
        let mut p = alloc::vec![self.front];
        let mut q = alloc::vec![ONE];
        for a in &self.zeros {
            p = multiply_linear(&p, *a, -ONE);
            q = multiply_linear(&q, ONE, -a.conj());
        }
        (p, q)
    }

    /// The `m` distinct unimodular solutions of `B(η) = u`, sorted by
    /// principal argument in `[0, 2π)`.
    pub fn boundary_solve(&self, u: Complex64, tol: &Tolerances) -> Result<Vec<Complex64>> {
        let modulus = u.norm();
        if (modulus - 1.0).abs() > tol.unimodular {
            return Err(Error::NotUnimodular {
                what: "boundary value",
                modulus,
            });
        }
        let u = u / modulus;
        let (p, q) = self.polynomial_parts();
        let poly: Vec<Complex64> = p.iter().zip(&q).map(|(pi, qi)| pi - u * qi).collect();
        let mut roots = linalg::polynomial_roots(&poly)?;
        if roots.len() != self.degree() {
            return Err(Error::Inconsistent("boundary equation lost degree"));
        }
        for eta in roots.iter_mut() {
            *eta = self.polish(*eta, u);
            let residual = (self.eval(*eta) - u).norm();
            if residual > tol.residual {
                return Err(Error::RootResidual { residual });
            }
        }
        roots.sort_by(|a, b| {
            principal_arg(*a)
                .partial_cmp(&principal_arg(*b))
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                let distance = (roots[i] - roots[j]).norm();
                if distance < tol.distinct {
                    return Err(Error::RootCollision { distance });
                }
            }
        }
        Ok(roots)
    }

    /// Newton iterations on `B(η) - u` followed by projection to the circle.
    fn polish(&self, start: Complex64, u: Complex64) -> Complex64 {
        let mut eta = project(start);
        for _ in 0..60 {
            let d = self.derivative_at(eta);
            if d.norm() == 0.0 {
                break;
            }
            let step = (self.eval(eta) - u) / d;
            eta = project(eta - step);
            if step.norm() < 4.0 * f64::EPSILON {
                break;
            }
        }
        eta
    }

    /// Clark points for `λ`: solutions of `α(η) = α_λ` with weights `|α'(η)|`.
    pub fn clark_points(&self, lambda: Complex64, tol: &Tolerances) -> Result<ClarkPointSet> {
        let modulus = lambda.norm();
        if (modulus - 1.0).abs() > tol.unimodular {
            return Err(Error::NotUnimodular {
                what: "lambda",
                modulus,
            });
        }
        let lambda = lambda / modulus;
        let target = self.clark_target(lambda);
        let target = target / target.norm();
        let points = self.boundary_solve(target, tol)?;
        let weights: Vec<f64> = points
            .iter()
            .map(|eta| self.derivative_at(*eta).norm())
            .collect();
        if weights.iter().any(|w| w.is_nan() || *w <= 0.0) {
            return Err(Error::Inconsistent("non-positive Clark weight"));
        }
        Ok(ClarkPointSet {
            lambda,
            target,
            points,
            weights,
        })
    }
}

/// Unimodular solutions of `α(η) = α_λ` with their weights `|α'(η_j)|`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClarkPointSet {
    pub lambda: Complex64,
    pub target: Complex64,
    pub points: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl ClarkPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `√|α'(η_j)|`, the norm of `k_{η_j}`.
    pub fn kernel_norm(&self, j: usize) -> f64 {
        Float::sqrt(self.weights[j])
    }
}

/// Argument in `[0, 2π)`.
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.arg();
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

fn project(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        ONE
    } else {
        z / r
    }
}

/// `poly * (c0 + c1 z)` with ascending coefficients.
fn multiply_linear(poly: &[Complex64], c0: Complex64, c1: Complex64) -> Vec<Complex64> {
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); poly.len() + 1];
    for (i, p) in poly.iter().enumerate() {
        out[i] += p * c0;
        out[i + 1] += p * c1;
    }
    out
}
