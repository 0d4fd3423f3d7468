//! Seeded random inputs for property runs.

use std::f64::consts::PI;

use atto_core::operators::{elementary_matrices, structured_tm};
use atto_core::{BlaschkeProduct, CMatrix, CVector, Complex64, ModelSpace, OperatorMatrix, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Smallest distance kept between sampled zeros.
const MIN_SEPARATION: f64 = 0.05;

pub struct Sampler(ChaCha8Rng);

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    pub fn unimodular(&mut self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * self.uniform())
    }

    /// Uniform in the disk of the given radius.
    pub fn in_disk(&mut self, radius: f64) -> Complex64 {
        Complex64::from_polar(radius * self.uniform().sqrt(), 2.0 * PI * self.uniform())
    }

    /// Real and imaginary parts uniform in `[-1, 1)`.
    pub fn complex(&mut self) -> Complex64 {
        Complex64::new(2.0 * self.uniform() - 1.0, 2.0 * self.uniform() - 1.0)
    }

    pub fn vector(&mut self, len: usize) -> CVector {
        CVector::from_iterator(len, (0..len).map(|_| self.complex()))
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| self.complex())
    }

    /// Distinct zeros in `|z| < 0.8` and a random unimodular front factor.
    pub fn product(&mut self, degree: usize) -> BlaschkeProduct {
        let mut zeros: Vec<Complex64> = Vec::with_capacity(degree);
        while zeros.len() < degree {
            let z = self.in_disk(0.8);
            if zeros.iter().all(|w| (w - z).norm() > MIN_SEPARATION) {
                zeros.push(z);
            }
        }
        BlaschkeProduct::new(zeros, self.unimodular()).expect("sampled zeros lie in the disk")
    }

    pub fn space(&mut self, degree: usize) -> ModelSpace {
        ModelSpace::new(self.product(degree)).expect("sampled product is valid")
    }

    /// A random element of `T(α,β)` in TM bases.
    pub fn member(&mut self, alpha: &ModelSpace, beta: &ModelSpace) -> Result<OperatorMatrix> {
        let el = elementary_matrices(alpha, beta)?;
        let tm = structured_tm(&el, &self.vector(alpha.dim()), &self.vector(beta.dim()));
        OperatorMatrix::from_tm(&tm, alpha.tm_basis(), beta.tm_basis())
    }

    /// `op + E` with `E` orthogonal to `T(α,β)` and `‖E‖_F = size`.
    pub fn perturb(&mut self, op: &OperatorMatrix, size: f64) -> Result<OperatorMatrix> {
        let el = elementary_matrices(op.alpha(), op.beta())?;
        let (n, m) = (op.beta().dim(), op.alpha().dim());
        let mut q: Vec<CMatrix> = Vec::new();
        for x in &el {
            let mut v = x.clone();
            orthogonalize(&mut v, &q);
            let nv = v.norm();
            if nv > 1e-8 * x.norm() {
                q.push(v / Complex64::new(nv, 0.0));
            }
        }
        let mut e = self.matrix(n, m);
        orthogonalize(&mut e, &q);
        let e = &e * Complex64::new(size / e.norm(), 0.0);
        OperatorMatrix::from_tm(&(op.tm() + e), op.alpha().tm_basis(), op.beta().tm_basis())
    }
}

/// Two passes of Gram–Schmidt against an orthonormal family.
fn orthogonalize(v: &mut CMatrix, q: &[CMatrix]) {
    for _ in 0..2 {
        for u in q {
            let c = u.dotc(v);
            *v -= u * c;
        }
    }
}
