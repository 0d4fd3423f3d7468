use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blaschke::BlaschkeProduct;
use crate::CVector;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub struct TestRng(ChaCha8Rng);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    pub fn unimodular(&mut self) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * self.uniform())
    }

    pub fn in_disk(&mut self, radius: f64) -> Complex64 {
        Complex64::from_polar(radius * self.uniform().sqrt(), 2.0 * PI * self.uniform())
    }

    pub fn complex(&mut self) -> Complex64 {
        c(2.0 * self.uniform() - 1.0, 2.0 * self.uniform() - 1.0)
    }

    pub fn vector(&mut self, len: usize) -> CVector {
        CVector::from_iterator(len, (0..len).map(|_| self.complex()))
    }
}

pub fn random_product(rng: &mut TestRng, degree: usize) -> BlaschkeProduct {
    let zeros: Vec<Complex64> = (0..degree).map(|_| rng.in_disk(0.8)).collect();
    BlaschkeProduct::new(zeros, rng.unimodular()).unwrap()
}
