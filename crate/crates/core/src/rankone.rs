//! Rank-one operators and kernel-type vectors.
//!
//! A vector is tested against `k_w` and `k̃_w` through its Clark
//! coefficients: for `f = c·k_w` the products `c_j √|α'(η_j)|` are
//! proportional to `1/(1 - conj(w) η_j)`, and for `f = c·k̃_w` to
//! `1/(η_j - w)`. Two nonzero coefficients determine a candidate `w`, which
//! is then checked against the whole vector.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::blaschke::ClarkPointSet;
use crate::error::{Error, Result};
use crate::linalg;
use crate::membership::test_rank_two_residual;
use crate::modelspace::{ModelSpace, ModelVector};
use crate::operators::{rank_one, OperatorMatrix, RankOneVariant};
use crate::symbol::RawSymbol;
use crate::tolerance::Tolerances;
use crate::{BlaschkeProduct, CMatrix, CVector};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorClass {
    KernelMultiple,
    ConjKernelMultiple,
    Neither,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorClassification {
    pub class: VectorClass,
    pub w: Option<Complex64>,
    /// `c` with `f = c·k_w` (or `c·k̃_w`).
    pub scale: Option<Complex64>,
    /// Set when `w` lies on the circle, where `k_w` and `k̃_w` are
    /// unimodular multiples of each other.
    pub boundary: bool,
    /// `‖f - c·k‖ / ‖f‖` for the accepted candidate.
    pub residual: f64,
}

impl VectorClassification {
    fn neither() -> Self {
        VectorClassification {
            class: VectorClass::Neither,
            w: None,
            scale: None,
            boundary: false,
            residual: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    w: Complex64,
    class: VectorClass,
    boundary: bool,
}

/// Candidate points from the Clark coefficients `coeffs` of a vector.
fn candidates(coeffs: &CVector, clark: &ClarkPointSet, tol: &Tolerances) -> Vec<Candidate> {
    let top = coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let nonzero: Vec<usize> = (0..coeffs.len())
        .filter(|&j| coeffs[j].norm() > tol.classify * top)
        .collect();
    let mut out = Vec::new();
    if nonzero.len() == 1 {
        let w = clark.points[nonzero[0]];
        for class in [VectorClass::KernelMultiple, VectorClass::ConjKernelMultiple] {
            out.push(Candidate {
                w,
                class,
                boundary: true,
            });
        }
        return out;
    }
    let (i, j) = (nonzero[0], nonzero[1]);
    let ui = coeffs[i] * clark.kernel_norm(i);
    let uj = coeffs[j] * clark.kernel_norm(j);
    let (ei, ej) = (clark.points[i], clark.points[j]);
    let tiny = 1e-300;
    let den = uj * ej - ui * ei;
    if den.norm() > tiny {
        out.push(Candidate {
            w: ((uj - ui) / den).conj(),
            class: VectorClass::KernelMultiple,
            boundary: false,
        });
    }
    let den = uj - ui;
    if den.norm() > tiny {
        out.push(Candidate {
            w: (uj * ej - ui * ei) / den,
            class: VectorClass::ConjKernelMultiple,
            boundary: false,
        });
    }
    out.into_iter()
        .filter_map(|mut c| {
            let r = c.w.norm();
            if r > 1.0 + tol.matching {
                None
            } else {
                if r > 1.0 - tol.matching {
                    c.w /= r;
                    c.boundary = true;
                }
                Some(c)
            }
        })
        .collect()
}

/// Best scalar `t` with `x ≈ t·k` and the relative residual.
fn best_fit(x: &CVector, k: &CVector) -> (Complex64, f64) {
    let t = k.dotc(x) / k.norm_squared();
    (t, (x - k * t).norm() / x.norm())
}

/// Decides whether `f` is a multiple of a kernel or conjugate kernel, using
/// the Clark basis for `lambda`.
pub fn classify_vector(
    f: &ModelVector,
    lambda: Complex64,
    tol: &Tolerances,
) -> Result<VectorClassification> {
    let space = f.space();
    let x = f.tm_coords();
    if x.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let basis = space.clark_basis(lambda)?;
    let clark = basis.clark().expect("Clark basis carries its points");
    let coeffs = basis.vectors().adjoint() * &x;
    let mut result = VectorClassification::neither();
    for cand in candidates(&coeffs, clark, tol) {
        let k = match cand.class {
            VectorClass::KernelMultiple => space.kernel_coords(cand.w),
            _ => space.conj_kernel_coords(cand.w),
        };
        let (t, residual) = best_fit(&x, &k);
        if residual <= tol.classify {
            result = VectorClassification {
                class: cand.class,
                w: Some(cand.w),
                scale: Some(t),
                boundary: cand.boundary,
                residual,
            };
            break;
        }
    }
    if result.class == VectorClass::Neither && space.dim() <= 2 {
        return Err(Error::Inconsistent(
            "vector in a space of dimension at most two did not classify",
        ));
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankOneTag {
    Standard,
    NonStandard,
}

#[derive(Debug, Clone)]
pub struct RankOneDecomposition {
    pub tag: RankOneTag,
    pub variant: Option<RankOneVariant>,
    pub w: Option<Complex64>,
    pub scale: Option<Complex64>,
    pub boundary: bool,
    /// Relative Frobenius residual of the best standard fit.
    pub residual: f64,
    /// Factors with `A = g ⊗ f`, `‖f‖ = 1`.
    pub g: ModelVector,
    pub f: ModelVector,
}

/// Writes a rank-one member of `T(α,β)` as a multiple of `k̃_w^β ⊗ k_w^α`
/// or `k_w^β ⊗ k̃_w^α` when possible.
///
/// A non-standard outcome is only legitimate when one space is
/// one-dimensional and the other has dimension above two; any other
/// non-standard outcome is reported as [`Error::DichotomyViolation`].
pub fn decompose_rank_one(
    op: &OperatorMatrix,
    lambda1: Complex64,
    lambda2: Complex64,
    tol: &Tolerances,
) -> Result<RankOneDecomposition> {
    let (alpha, beta) = (op.alpha(), op.beta());
    let tm = op.tm();
    let sv = linalg::singular_values(&tm);
    let rank = linalg::numerical_rank(&sv, tol.rank);
    if rank != 1 {
        return Err(Error::RankNotOne { rank });
    }
    let verdict = test_rank_two_residual(op, ZERO, ZERO, tol)?;
    if !verdict.is_member {
        return Err(Error::NotMember {
            residual: verdict.max_residual,
        });
    }

    let (sigma, u, v) = linalg::dominant_triple(&tm);
    let idx = (0..v.len()).fold(0, |best, k| {
        if v[k].norm() > v[best].norm() {
            k
        } else {
            best
        }
    });
    let phase = v[idx] / v[idx].norm();
    let f = &v * phase.conj();
    let g = &u * (phase.conj() * sigma);

    let mut cands: Vec<(Complex64, RankOneVariant, bool)> = Vec::new();
    let basis_b = beta.clark_basis(lambda2)?;
    let coeffs_g = basis_b.vectors().adjoint() * &g;
    for c in candidates(&coeffs_g, basis_b.clark().expect("Clark basis"), tol) {
        let variant = match c.class {
            VectorClass::KernelMultiple => RankOneVariant::KernelConjK,
            _ => RankOneVariant::ConjKKernel,
        };
        cands.push((c.w, variant, c.boundary));
    }
    let basis_a = alpha.clark_basis(lambda1)?;
    let coeffs_f = basis_a.vectors().adjoint() * &f;
    for c in candidates(&coeffs_f, basis_a.clark().expect("Clark basis"), tol) {
        let variant = match c.class {
            VectorClass::KernelMultiple => RankOneVariant::ConjKKernel,
            _ => RankOneVariant::KernelConjK,
        };
        cands.push((c.w, variant, c.boundary));
    }

    let norm = linalg::frobenius(&tm);
    let mut best: Option<(f64, Complex64, RankOneVariant, bool, Complex64)> = None;
    for (w, variant, boundary) in cands {
        let t = variant.tm(alpha, beta, w);
        let tn = linalg::frobenius(&t);
        if tn == 0.0 {
            continue;
        }
        let scale = t
            .iter()
            .zip(tm.iter())
            .map(|(x, y)| x.conj() * y)
            .sum::<Complex64>()
            / (tn * tn);
        let residual = linalg::frobenius(&(&tm - &t * scale)) / norm;
        if best.is_none_or(|b| residual < b.0) {
            best = Some((residual, w, variant, boundary, scale));
        }
    }

    let g_vec = ModelVector::new(beta.tm_basis(), g)?;
    let f_vec = ModelVector::new(alpha.tm_basis(), f)?;
    if let Some((residual, w, variant, boundary, scale)) = best {
        if residual <= tol.classify {
            return Ok(RankOneDecomposition {
                tag: RankOneTag::Standard,
                variant: Some(variant),
                w: Some(w),
                scale: Some(scale),
                boundary,
                residual,
                g: g_vec,
                f: f_vec,
            });
        }
    }
    let (m, n) = (alpha.dim(), beta.dim());
    if !(m.min(n) == 1 && m.max(n) > 2) {
        return Err(Error::DichotomyViolation { m, n });
    }
    Ok(RankOneDecomposition {
        tag: RankOneTag::NonStandard,
        variant: None,
        w: None,
        scale: None,
        boundary: false,
        residual: best.map_or(f64::INFINITY, |b| b.0),
        g: g_vec,
        f: f_vec,
    })
}

/// The operator `1 ⊗ (1 + k_a)` from `K_α` with
/// `α(z) = -z (a - z)/(1 - ā z) · (a + z)/(1 + ā z)` into `K_z`.
#[derive(Debug, Clone)]
pub struct Example41 {
    pub a: Complex64,
    pub alpha: ModelSpace,
    pub beta: ModelSpace,
    pub operator: OperatorMatrix,
    /// `1 + conj(k_a) = (2z - a)/(z - a)` on the circle.
    pub symbol: RawSymbol,
    /// Values of `w` forced by `1 + k_a = c·k_w` at the zeros `a` and `-a`.
    pub kernel_candidates: [Complex64; 2],
    /// Values of `w` forced by `1 + k_a = c·k̃_w` at the zeros `a` and `-a`.
    pub conj_candidates: [Complex64; 2],
}

pub fn example_4_1(a: Complex64) -> Result<Example41> {
    if a.norm() == 0.0 || a.norm() >= 1.0 {
        return Err(Error::InvalidParameter("a must satisfy 0 < |a| < 1"));
    }
    let alpha = ModelSpace::new(BlaschkeProduct::new(vec![ZERO, a, -a], -ONE)?)?;
    let beta = ModelSpace::new(BlaschkeProduct::monomial(1)?)?;
    let f = alpha.kernel(ZERO).add_scaled(ONE, &alpha.kernel(a))?;
    let g = beta.kernel(ZERO);
    let operator = rank_one(&g, &f);
    let symbol = RawSymbol::new(vec![-a, Complex64::new(2.0, 0.0)], 0, vec![-a, ONE])?;
    // At a zero t of α, k_w(t) = 1/(1 - conj(w) t) and k̃_w(t) = α(w)/(w - t),
    // so the ratio f(0)/f(t) pins down w.
    let f0 = f.eval(ZERO);
    let ratio = |t: Complex64| ONE - f0 / f.eval(t);
    let kernel_w = |t: Complex64| (ratio(t) / t).conj();
    let conj_w = |t: Complex64| t / ratio(t);
    Ok(Example41 {
        a,
        kernel_candidates: [kernel_w(a), kernel_w(-a)],
        conj_candidates: [conj_w(a), conj_w(-a)],
        alpha,
        beta,
        operator,
        symbol,
    })
}

/// `‖k_w - conj(α(w)) w k̃_w‖ / ‖k_w‖` for unimodular `w`.
pub fn boundary_kernel_identity_check(space: &ModelSpace, w: Complex64) -> Result<f64> {
    if (w.norm() - 1.0).abs() > space.tolerances().unimodular {
        return Err(Error::NotUnimodular {
            what: "w",
            modulus: w.norm(),
        });
    }
    let k = space.kernel_coords(w);
    let kt = space.conj_kernel_coords(w);
    let c = space.alpha().eval(w).conj() * w;
    Ok((&k - kt * c).norm() / k.norm())
}

/// TM matrix of `g ⊗ f` from coordinate vectors.
pub fn outer(g: &CVector, f: &CVector) -> CMatrix {
    g * f.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::membership::cross_validate;
    use crate::operators::{atto_matrix, standard_rank_one};
    use crate::testutil::{c, random_product, TestRng};

    fn random_space(rng: &mut TestRng, degree: usize) -> ModelSpace {
        ModelSpace::new(random_product(rng, degree)).unwrap()
    }

    #[test]
    fn two_dimensional_cases() {
        let tol = Tolerances::default();
        let mut rng = TestRng::new(61);
        let s = random_space(&mut rng, 2);
        let lambda = rng.unimodular();
        let k0 = s.kernel(ZERO).scaled(c(0.3, -2.0));
        let r = classify_vector(&k0, lambda, &tol).unwrap();
        assert_eq!(r.class, VectorClass::KernelMultiple);
        assert!(r.w.unwrap().norm() < 1e-10);
        assert!((r.scale.unwrap() - c(0.3, -2.0)).norm() < 1e-9);
        let kt0 = s.conj_kernel(ZERO);
        let r = classify_vector(&kt0, lambda, &tol).unwrap();
        assert_eq!(r.class, VectorClass::ConjKernelMultiple);
        assert!(r.w.unwrap().norm() < 1e-10);
    }

    #[test]
    fn small_spaces_always_classify() {
        let tol = Tolerances::default();
        let mut rng = TestRng::new(62);
        for trial in 0..500 {
            let s = random_space(&mut rng, 1 + trial % 2);
            let f = ModelVector::new(s.tm_basis(), rng.vector(s.dim())).unwrap();
            let r = classify_vector(&f, rng.unimodular(), &tol).unwrap();
            assert_ne!(r.class, VectorClass::Neither);
            assert!(r.w.unwrap().norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn two_clark_vectors_in_three_dimensions_are_neither() {
        let tol = Tolerances::default();
        let mut rng = TestRng::new(63);
        for degree in 3..=5 {
            let s = random_space(&mut rng, degree);
            let lambda = rng.unimodular();
            let b = s.clark_basis(lambda).unwrap();
            let f = b.vector(0).add_scaled(ONE, &b.vector(1)).unwrap();
            assert_eq!(
                classify_vector(&f, lambda, &tol).unwrap().class,
                VectorClass::Neither
            );
            // A single Clark vector is a boundary kernel.
            let r = classify_vector(&b.vector(2), lambda, &tol).unwrap();
            assert_eq!(r.class, VectorClass::KernelMultiple);
            assert!(r.boundary);
        }
    }

    #[test]
    fn kernels_are_recovered() {
        let tol = Tolerances::default();
        let mut rng = TestRng::new(64);
        for _ in 0..50 {
            let s = random_space(&mut rng, 4);
            let w = rng.in_disk(0.95);
            let scale = rng.complex();
            let f = s.kernel(w).scaled(scale);
            let r = classify_vector(&f, rng.unimodular(), &tol).unwrap();
            assert_eq!(r.class, VectorClass::KernelMultiple);
            assert!((r.w.unwrap() - w).norm() < 1e-8);
            let f = s.conj_kernel(w).scaled(scale);
            let r = classify_vector(&f, rng.unimodular(), &tol).unwrap();
            assert_eq!(r.class, VectorClass::ConjKernelMultiple);
            assert!((r.w.unwrap() - w).norm() < 1e-8);
        }
        let s = random_space(&mut rng, 3);
        let zero = ModelVector::zero(s.tm_basis());
        assert_eq!(
            classify_vector(&zero, ONE, &tol).unwrap_err(),
            Error::ZeroVector
        );
    }

    #[test]
    fn standard_rank_ones_round_trip() {
        let tol = Tolerances::default();
        let mut rng = TestRng::new(65);
        for trial in 0..100 {
            let (m, n) = if trial % 2 == 0 { (3, 2) } else { (2, 2) };
            let alpha = random_space(&mut rng, m);
            let beta = random_space(&mut rng, n);
            let w = rng.in_disk(0.9);
            let variant = if trial % 4 < 2 {
                RankOneVariant::ConjKKernel
            } else {
                RankOneVariant::KernelConjK
            };
            let scale = rng.complex();
            let base = standard_rank_one(&alpha, &beta, w, variant).unwrap();
            let op =
                OperatorMatrix::from_tm(&(base.tm() * scale), alpha.tm_basis(), beta.tm_basis())
                    .unwrap();
            let d = decompose_rank_one(&op, rng.unimodular(), rng.unimodular(), &tol).unwrap();
            assert_eq!(d.tag, RankOneTag::Standard);
            assert_eq!(d.variant, Some(variant));
            assert!((d.w.unwrap() - w).norm() <= 1e-7);
            assert!((d.scale.unwrap() - scale).norm() <= 1e-7 * (1.0 + scale.norm()));
            let rebuilt = outer(&d.g.tm_coords(), &d.f.tm_coords());
            assert!(linalg::frobenius(&(rebuilt - op.tm())) < 1e-9 * (1.0 + scale.norm()));
        }
    }

    #[test]
    fn mismatched_partner_is_not_a_member() {
        let tol = Tolerances::default();
        let mut rng = TestRng::new(66);
        for _ in 0..20 {
            let alpha = random_space(&mut rng, 3);
            let beta = random_space(&mut rng, 2);
            let w = rng.in_disk(0.9);
            let g = beta.kernel(w);
            let f = ModelVector::new(alpha.tm_basis(), rng.vector(3)).unwrap();
            let op = rank_one(&g, &f);
            assert!(
                !test_rank_two_residual(&op, ZERO, ZERO, &tol)
                    .unwrap()
                    .is_member
            );
            assert!(matches!(
                decompose_rank_one(&op, ONE, ONE, &tol),
                Err(Error::NotMember { .. })
            ));
        }
    }

    #[test]
    fn one_dimensional_factor() {
        let tol = Tolerances::default();
        let mut rng = TestRng::new(67);
        for (m, n) in [(1, 1), (2, 1), (1, 2)] {
            for _ in 0..20 {
                let alpha = random_space(&mut rng, m);
                let beta = random_space(&mut rng, n);
                let g = ModelVector::new(beta.tm_basis(), rng.vector(n)).unwrap();
                let f = ModelVector::new(alpha.tm_basis(), rng.vector(m)).unwrap();
                let d =
                    decompose_rank_one(&rank_one(&g, &f), rng.unimodular(), rng.unimodular(), &tol)
                        .unwrap();
                assert_eq!(d.tag, RankOneTag::Standard, "({m},{n})");
            }
        }
        // (1, 3): a witness vector in K_β gives a non-standard member.
        let alpha = random_space(&mut rng, 1);
        let beta = random_space(&mut rng, 3);
        let lambda2 = rng.unimodular();
        let b = beta.clark_basis(lambda2).unwrap();
        let g = b.vector(0).add_scaled(ONE, &b.vector(1)).unwrap();
        let f = ModelVector::new(alpha.tm_basis(), rng.vector(1)).unwrap();
        let d = decompose_rank_one(&rank_one(&g, &f), rng.unimodular(), lambda2, &tol).unwrap();
        assert_eq!(d.tag, RankOneTag::NonStandard);
    }

    #[test]
    fn rank_two_is_rejected() {
        let tol = Tolerances::default();
        let mut rng = TestRng::new(68);
        let alpha = random_space(&mut rng, 3);
        let beta = random_space(&mut rng, 2);
        let a = standard_rank_one(&alpha, &beta, c(0.1, 0.2), RankOneVariant::ConjKKernel).unwrap();
        let b =
            standard_rank_one(&alpha, &beta, c(-0.3, 0.1), RankOneVariant::KernelConjK).unwrap();
        let sum = a.add_scaled(ONE, &b).unwrap();
        assert_eq!(
            decompose_rank_one(&sum, ONE, ONE, &tol).unwrap_err(),
            Error::RankNotOne { rank: 2 }
        );
    }

    #[test]
    fn example_with_half() {
        let tol = Tolerances::default();
        let ex = example_4_1(c(0.5, 0.0)).unwrap();
        let expect = [c(2.0 / 7.0, 0.0), c(2.0 / 9.0, 0.0)];
        for (x, y) in ex.kernel_candidates.iter().zip(&expect) {
            assert!((x - y).norm() < 1e-12);
        }
        let expect = [c(3.5, 0.0), c(4.5, 0.0)];
        for (x, y) in ex.conj_candidates.iter().zip(&expect) {
            assert!((x - y).norm() < 1e-12);
        }
        let from_symbol =
            atto_matrix(&ex.symbol, ex.operator.in_basis(), ex.operator.out_basis()).unwrap();
        assert!(linalg::max_abs(&(from_symbol.tm() - ex.operator.tm())) < 1e-10);
        let cv =
            cross_validate(&ex.operator, ONE, ONE, &[(c(0.2, 0.1), c(-0.4, 0.3))], &tol).unwrap();
        assert_eq!(cv.consensus, Some(true));
        let d = decompose_rank_one(&ex.operator, ONE, ONE, &tol).unwrap();
        assert_eq!(d.tag, RankOneTag::NonStandard);
    }

    #[test]
    fn example_with_complex_parameter() {
        let tol = Tolerances::default();
        let a = c(0.3, 0.2);
        let ex = example_4_1(a).unwrap();
        let r = a.norm_sqr();
        assert!((ex.kernel_candidates[0] - a / (2.0 - r)).norm() < 1e-12);
        assert!((ex.kernel_candidates[1] - a / (2.0 + r)).norm() < 1e-12);
        assert!((ex.conj_candidates[0] - (2.0 - r) / a.conj()).norm() < 1e-12);
        assert!((ex.conj_candidates[1] - (2.0 + r) / a.conj()).norm() < 1e-12);
        let cv = cross_validate(&ex.operator, c(0.0, 1.0), ONE, &[], &tol).unwrap();
        assert_eq!(cv.consensus, Some(true));
        assert_eq!(
            decompose_rank_one(&ex.operator, c(0.0, 1.0), ONE, &tol)
                .unwrap()
                .tag,
            RankOneTag::NonStandard
        );
        assert!(example_4_1(ZERO).is_err());
    }

    #[test]
    fn boundary_identity() {
        let s = ModelSpace::new(BlaschkeProduct::monomial(2).unwrap()).unwrap();
        assert!(boundary_kernel_identity_check(&s, ONE).unwrap() < 1e-15);
        assert!(boundary_kernel_identity_check(&s, c(0.0, 1.0)).unwrap() <= 1e-12);
        assert!(boundary_kernel_identity_check(&s, c(0.5, 0.0)).is_err());
        let mut rng = TestRng::new(69);
        let s = random_space(&mut rng, 5);
        for _ in 0..20 {
            assert!(boundary_kernel_identity_check(&s, rng.unimodular()).unwrap() <= 1e-9);
        }
    }
}
