//! Trapezoidal rule on the unit circle.
//!
//! For integrands that are rational with poles off the circle the rule
//! converges geometrically, so the node count is doubled until successive
//! averages agree.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// First node count tried.
pub const INITIAL_POINTS: usize = 256;
/// Node count at which refinement gives up.
pub const MAX_POINTS: usize = 1 << 17;

/// Averages the vector valued `integrand` over the unit circle,
/// `(1/2π) ∫ f(e^{iθ}) dθ`, componentwise.
///
/// `integrand(z, out)` must fill `out` (length `len`) with the values at `z`;
/// `out` arrives zeroed. Refinement stops once the largest componentwise
/// change is below `tol * max(1, largest component)`.
pub fn circle_mean<F>(len: usize, tol: f64, mut integrand: F) -> Result<Vec<Complex64>>
where
    F: FnMut(Complex64, &mut [Complex64]),
{
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    let mut sum_nodes = |count: usize, offset: usize, stride: usize, total: usize| {
        let mut acc = vec![Complex64::new(0.0, 0.0); len];
        for k in 0..count {
            let idx = offset + k * stride;
            let z = Complex64::from_polar(1.0, 2.0 * PI * idx as f64 / total as f64);
            buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
            integrand(z, &mut buf);
            for (a, b) in acc.iter_mut().zip(&buf) {
                *a += b;
            }
        }
        acc
    };

    let mut points = INITIAL_POINTS;
    let mut sum = sum_nodes(points, 0, 1, points);
    let mut mean: Vec<Complex64> = sum.iter().map(|s| s / points as f64).collect();
    while points < MAX_POINTS {
        // The refined grid adds the midpoints of the current one.
        let added = sum_nodes(points, 1, 2, 2 * points);
        for (s, a) in sum.iter_mut().zip(&added) {
            *s += a;
        }
        points *= 2;
        let refined: Vec<Complex64> = sum.iter().map(|s| s / points as f64).collect();
        let scale = refined.iter().fold(1.0f64, |m, z| m.max(z.norm()));
        let change = refined
            .iter()
            .zip(&mean)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        mean = refined;
        if change < tol * scale {
            return Ok(mean);
        }
    }
    Err(Error::QuadratureNonConvergence { points })
}

/// Scalar version of [`circle_mean`].
pub fn circle_mean_scalar<F>(tol: f64, mut integrand: F) -> Result<Complex64>
where
    F: FnMut(Complex64) -> Complex64,
{
    circle_mean(1, tol, |z, out| out[0] = integrand(z)).map(|v| v[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomials_integrate_exactly() {
        let v = circle_mean(3, 1e-12, |z, out| {
            out[0] = Complex64::new(1.0, 0.0);
            out[1] = z;
            out[2] = z * z.conj() * z.conj();
        })
        .unwrap();
        assert!((v[0] - 1.0).norm() < 1e-15);
        assert!(v[1].norm() < 1e-15);
        assert!(v[2].norm() < 1e-15);
    }

    #[test]
    fn szego_kernel_reproduces() {
        // mean of 1/(1 - w conj z) = 1 for |w| < 1.
        let w = Complex64::new(0.6, 0.3);
        let v = circle_mean_scalar(1e-13, |z| 1.0 / (1.0 - w * z.conj())).unwrap();
        assert!((v - 1.0).norm() < 1e-12);
        // mean of f(z) conj(1/(1 - conj(w) z)) = f(w) for f = 1/(2 - z).
        let v = circle_mean_scalar(1e-13, |z| {
            (1.0 / (2.0 - z)) * (1.0 / (1.0 - w.conj() * z)).conj()
        })
        .unwrap();
        assert!((v - 1.0 / (2.0 - w)).norm() < 1e-12);
    }

    #[test]
    fn pole_on_circle_does_not_converge() {
        let r = circle_mean_scalar(1e-12, |z| {
            let d = z - Complex64::new(1.0, 0.0);
            if d.norm() == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(1.0 / d.norm(), 0.0)
            }
        });
        assert!(matches!(r, Err(Error::QuadratureNonConvergence { .. })));
    }
}
