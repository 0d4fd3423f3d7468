//! Symbols of truncated Toeplitz operators.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::modelspace::ModelVector;

/// A function on the unit circle that can be sampled pointwise.
pub trait BoundarySymbol {
    fn value(&self, z: Complex64) -> Complex64;
}

impl<F> BoundarySymbol for F
where
    F: Fn(Complex64) -> Complex64,
{
    fn value(&self, z: Complex64) -> Complex64 {
        self(z)
    }
}

/// Rational boundary function `z^k · p(z) / q(z)` with ascending
/// coefficient lists. On the circle a negative `k` stands for powers of
/// `conj(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSymbol {
    pub numerator: Vec<Complex64>,
    pub lowest_power: i32,
    pub denominator: Vec<Complex64>,
}

impl RawSymbol {
    pub fn new(
        numerator: Vec<Complex64>,
        lowest_power: i32,
        denominator: Vec<Complex64>,
    ) -> Result<Self> {
        if numerator.is_empty() {
            return Err(Error::InvalidParameter("raw symbol numerator is empty"));
        }
        if denominator.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
            return Err(Error::InvalidParameter("raw symbol denominator is zero"));
        }
        Ok(RawSymbol {
            numerator,
            lowest_power,
            denominator,
        })
    }

    /// The Laurent polynomial `Σ c_j z^{k+j}`.
    pub fn laurent(coeffs: Vec<Complex64>, lowest_power: i32) -> Result<Self> {
        Self::new(coeffs, lowest_power, alloc::vec![Complex64::new(1.0, 0.0)])
    }

    /// `z^k`.
    pub fn monomial(k: i32) -> Self {
        RawSymbol {
            numerator: alloc::vec![Complex64::new(1.0, 0.0)],
            lowest_power: k,
            denominator: alloc::vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// Distance from the unit circle to the nearest root of `q`.
    pub fn pole_distance(&self) -> Result<f64> {
        let roots = linalg::polynomial_roots(&self.denominator)?;
        Ok(roots
            .iter()
            .map(|r| (r.norm() - 1.0).abs())
            .fold(f64::INFINITY, f64::min))
    }
}

impl BoundarySymbol for RawSymbol {
    fn value(&self, z: Complex64) -> Complex64 {
        horner(&self.numerator, z) / horner(&self.denominator, z) * z.powi(self.lowest_power)
    }
}

/// `φ = conj(χ) + ψ` with `χ ∈ K_α` and `ψ ∈ K_β`, optionally paired with
/// a raw boundary description of the same function.
#[derive(Debug, Clone)]
pub struct SymbolSpec {
    pub co_analytic: Option<ModelVector>,
    pub analytic: Option<ModelVector>,
    pub raw: Option<RawSymbol>,
}

/// Number of circle samples used when comparing structured and raw forms.
pub const AGREEMENT_SAMPLES: usize = 64;

impl SymbolSpec {
    pub fn structured(
        co_analytic: Option<ModelVector>,
        analytic: Option<ModelVector>,
    ) -> Result<Self> {
        Self::build(co_analytic, analytic, None)
    }

    pub fn raw(raw: RawSymbol) -> Result<Self> {
        Self::build(None, None, Some(raw))
    }

    /// Builds a symbol and, when both forms are present, checks that they
    /// agree on [`AGREEMENT_SAMPLES`] circle points to `1e-9`.
    pub fn build(
        co_analytic: Option<ModelVector>,
        analytic: Option<ModelVector>,
        raw: Option<RawSymbol>,
    ) -> Result<Self> {
        if co_analytic.is_none() && analytic.is_none() && raw.is_none() {
            return Err(Error::InvalidParameter("symbol has no component"));
        }
        let spec = SymbolSpec {
            co_analytic,
            analytic,
            raw,
        };
        if let Some(raw) = &spec.raw {
            if raw.pole_distance()? < 1e-9 {
                return Err(Error::InvalidParameter(
                    "raw symbol has a pole on the circle",
                ));
            }
            if spec.is_structured() {
                let deviation = spec.structured_deviation(raw, AGREEMENT_SAMPLES);
                if deviation > 1e-9 {
                    return Err(Error::SymbolMismatch { deviation });
                }
            }
        }
        Ok(spec)
    }

    pub fn is_structured(&self) -> bool {
        self.co_analytic.is_some() || self.analytic.is_some()
    }

    /// `conj(χ(z)) + ψ(z)`, or zero if neither part is present.
    pub fn structured_value(&self, z: Complex64) -> Complex64 {
        let mut v = Complex64::new(0.0, 0.0);
        if let Some(chi) = &self.co_analytic {
            v += chi.eval(z).conj();
        }
        if let Some(psi) = &self.analytic {
            v += psi.eval(z);
        }
        v
    }

    fn structured_deviation(&self, raw: &RawSymbol, samples: usize) -> f64 {
        (0..samples)
            .map(|k| {
                let z = circle_point(k, samples);
                (self.structured_value(z) - raw.value(z)).norm()
            })
            .fold(0.0, f64::max)
    }
}

impl BoundarySymbol for SymbolSpec {
    fn value(&self, z: Complex64) -> Complex64 {
        if self.is_structured() {
            self.structured_value(z)
        } else {
            self.raw
                .as_ref()
                .map_or(Complex64::new(0.0, 0.0), |r| r.value(z))
        }
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

fn circle_point(k: usize, n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (k as f64 + 0.5) / n as f64)
}
