//! Deciding whether an operator `K_α → K_β` is an asymmetric truncated
//! Toeplitz operator.
//!
//! Four procedures are provided and are expected to agree:
//!
//! * recurrences between entries of the Clark-basis matrix,
//! * the rank-two residual `A - S_{β,b} A S_{α,a}^*`,
//! * the conjugate residual `A - S_{β,b}^* A S_{α,a}`,
//! * shift invariance `⟨A S f, S g⟩ = ⟨A f, g⟩`.
//!
//! Each returns a residual. It is compared with `decision · (1 + ‖M‖_max)`
//! and `reject · (1 + ‖M‖_max)`, where `M` is the TM matrix of the operator;
//! residuals between the two thresholds are reported as
//! [`Error::Indeterminate`].

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::blaschke::{principal_arg, ClarkPointSet};
use crate::error::{Error, Result};
use crate::linalg;
use crate::modelspace::{ModelBasis, ModelSpace, ModelVector};
use crate::operators::{clark_coefficient, modified_shift_tm, OperatorMatrix};
use crate::tolerance::Tolerances;
use crate::{CMatrix, CVector};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Clark point sets of `K_α` and `K_β` reordered so that the `shared`
/// common points come first, `η_j = ζ_j` for `j < shared`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClarkPairing {
    pub clark_alpha: ClarkPointSet,
    pub clark_beta: ClarkPointSet,
    pub shared: usize,
    /// Position `j` of the reordered set holds original point `perm_alpha[j]`.
    pub perm_alpha: Vec<usize>,
    pub perm_beta: Vec<usize>,
}

impl ClarkPairing {
    /// Clark bases in pairing order.
    pub fn bases(
        &self,
        alpha: &ModelSpace,
        beta: &ModelSpace,
    ) -> Result<(Arc<ModelBasis>, Arc<ModelBasis>)> {
        Ok((
            alpha.clark_basis_from_points(self.clark_alpha.clone())?,
            beta.clark_basis_from_points(self.clark_beta.clone())?,
        ))
    }
}

/// Pairs equal Clark points of the two sets. A point of either set may be
/// within `tol` of at most one point of the other.
pub fn match_clark_points(
    alpha: &ClarkPointSet,
    beta: &ClarkPointSet,
    tol: f64,
) -> Result<ClarkPairing> {
    let (m, n) = (alpha.len(), beta.len());
    let mut partner_of_alpha: Vec<Option<usize>> = alloc::vec![None; m];
    let mut partner_of_beta: Vec<Option<usize>> = alloc::vec![None; n];
    for (i, eta) in alpha.points.iter().enumerate() {
        for (j, zeta) in beta.points.iter().enumerate() {
            let d = (eta - zeta).norm();
            if d <= tol {
                if partner_of_alpha[i].is_some() || partner_of_beta[j].is_some() {
                    return Err(Error::AmbiguousMatch { distance: d });
                }
                partner_of_alpha[i] = Some(j);
                partner_of_beta[j] = Some(i);
            }
        }
    }
    let mut pairs: Vec<(usize, usize)> = partner_of_alpha
        .iter()
        .enumerate()
        .filter_map(|(i, p)| p.map(|j| (i, j)))
        .collect();
    pairs.sort_by(|x, y| {
        principal_arg(alpha.points[x.0])
            .partial_cmp(&principal_arg(alpha.points[y.0]))
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let shared = pairs.len();
    if shared > m.min(n) {
        return Err(Error::SharedPointsExceedDimension { shared, m, n });
    }
    let mut perm_alpha: Vec<usize> = pairs.iter().map(|p| p.0).collect();
    perm_alpha.extend((0..m).filter(|i| partner_of_alpha[*i].is_none()));
    let mut perm_beta: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    perm_beta.extend((0..n).filter(|j| partner_of_beta[*j].is_none()));
    Ok(ClarkPairing {
        clark_alpha: permuted(alpha, &perm_alpha),
        clark_beta: permuted(beta, &perm_beta),
        shared,
        perm_alpha,
        perm_beta,
    })
}

fn permuted(set: &ClarkPointSet, perm: &[usize]) -> ClarkPointSet {
    ClarkPointSet {
        lambda: set.lambda,
        target: set.target,
        points: perm.iter().map(|&i| set.points[i]).collect(),
        weights: perm.iter().map(|&i| set.weights[i]).collect(),
    }
}

/// Computes both Clark point sets and pairs them.
pub fn clark_pairing(
    alpha: &ModelSpace,
    beta: &ModelSpace,
    lambda1: Complex64,
    lambda2: Complex64,
) -> Result<ClarkPairing> {
    let tol = alpha.tolerances();
    let ca = alpha.alpha().clark_points(lambda1, tol)?;
    let cb = beta.alpha().clark_points(lambda2, tol)?;
    match_clark_points(&ca, &cb, tol.matching)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClarkRecurrence,
    RankTwoResidual,
    ConjugateResidual,
    ShiftInvariance,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ClarkRecurrence => "clark",
            Method::RankTwoResidual => "residual",
            Method::ConjugateResidual => "conjugate",
            Method::ShiftInvariance => "shift",
        }
    }
}

/// Data `(χ, ψ)` of a residual decomposition together with the shift
/// coefficients `(a, b)` it belongs to.
#[derive(Debug, Clone)]
pub struct Witness {
    pub chi: ModelVector,
    pub psi: ModelVector,
    pub a: Complex64,
    pub b: Complex64,
}

#[derive(Debug, Clone)]
pub struct MembershipVerdict {
    pub is_member: bool,
    pub max_residual: f64,
    /// Acceptance threshold the residual was compared with.
    pub threshold: f64,
    pub method: Method,
    pub witness: Option<Witness>,
}

fn decide(
    method: Method,
    residual: f64,
    scale: f64,
    tol: &Tolerances,
) -> Result<MembershipVerdict> {
    let accept = tol.decision * (1.0 + scale);
    let reject = tol.reject * (1.0 + scale);
    if !residual.is_finite() {
        return Err(Error::ToleranceBreakdown {
            what: "residual",
            value: residual,
        });
    }
    if residual > accept && residual < reject {
        return Err(Error::Indeterminate {
            residual,
            threshold: accept,
        });
    }
    Ok(MembershipVerdict {
        is_member: residual <= accept,
        max_residual: residual,
        threshold: accept,
        method,
        witness: None,
    })
}

/// Clark-basis recurrences on the matrix of `op` in the paired Clark bases.
///
/// With no shared points every entry is determined by the first row and
/// column. With `l` shared points, entries in rows `s < l` are determined by
/// the first row (except the free diagonal `r_{s,s}`), and rows `s ≥ l` by
/// the first row and column.
pub fn test_clark_recurrence(
    op: &OperatorMatrix,
    pairing: &ClarkPairing,
    tol: &Tolerances,
) -> Result<MembershipVerdict> {
    let (va, vb) = pairing.bases(op.alpha(), op.beta())?;
    let r = op.in_bases(&va, &vb)?.entries().clone();
    let (n, m) = r.shape();
    let eta = &pairing.clark_alpha.points;
    let zeta = &pairing.clark_beta.points;
    let wa: Vec<f64> = (0..m).map(|p| pairing.clark_alpha.kernel_norm(p)).collect();
    let wb: Vec<f64> = (0..n).map(|s| pairing.clark_beta.kernel_norm(s)).collect();
    let l = pairing.shared;
    let mut sum = 0.0;
    for s in 0..n {
        for p in 0..m {
            if s < l && s == p {
                continue;
            }
            let den = eta[p] - zeta[s];
            if den.norm() < tol.matching {
                return Err(Error::ToleranceBreakdown {
                    what: "Clark point separation",
                    value: den.norm(),
                });
            }
            let second = Complex64::new(wb[0] / wb[s], 0.0) * (eta[p] - zeta[0]) / den * r[(0, p)];
            let rhs = if l == 0 {
                Complex64::new(wa[0] / wa[p], 0.0) * (eta[p] / eta[0]) * (eta[0] - zeta[s]) / den
                    * r[(s, 0)]
                    + Complex64::new(wa[0] * wb[0] / (wa[p] * wb[s]), 0.0)
                        * (eta[p] / eta[0])
                        * (zeta[0] - eta[0])
                        / den
                        * r[(0, 0)]
                    + second
            } else if s < l {
                Complex64::new(wa[s] * wb[0] / (wa[p] * wb[s]), 0.0)
                    * (eta[p] / eta[s])
                    * (eta[0] - zeta[s])
                    / den
                    * r[(0, s)]
                    + second
            } else {
                Complex64::new(wa[0] / wa[p], 0.0) * (eta[p] / eta[0]) * (eta[0] - zeta[s]) / den
                    * r[(s, 0)]
                    + second
            };
            sum += (r[(s, p)] - rhs).norm_sqr();
        }
    }
    decide(
        Method::ClarkRecurrence,
        Float::sqrt(sum),
        linalg::max_abs(&op.tm()),
        tol,
    )
}

/// `A - S_{β,b} A S_{α,a}^*` in TM coordinates.
pub fn rank_two_residual_tm(op: &OperatorMatrix, a: Complex64, b: Complex64) -> CMatrix {
    let sa = modified_shift_tm(op.alpha(), a);
    let sb = modified_shift_tm(op.beta(), b);
    let tm = op.tm();
    &tm - sb * &tm * sa.adjoint()
}

/// `A - S_{β,b}^* A S_{α,a}` in TM coordinates.
pub fn conjugate_residual_tm(op: &OperatorMatrix, a: Complex64, b: Complex64) -> CMatrix {
    let sa = modified_shift_tm(op.alpha(), a);
    let sb = modified_shift_tm(op.beta(), b);
    let tm = op.tm();
    &tm - sb.adjoint() * &tm * sa
}

/// Splits `d ≈ ψ right^H + left χ^H` with `⟨ψ, left⟩ = 0` and returns
/// `(‖d - ψ right^H - left χ^H‖_F, ψ, χ)`.
fn split_rank_two(d: &CMatrix, left: &CVector, right: &CVector) -> (f64, CVector, CVector) {
    let psi_raw = d * right / Complex64::new(right.norm_squared(), 0.0);
    let psi = &psi_raw - left * (left.dotc(&psi_raw) / left.norm_squared());
    let chi = d.adjoint() * left / Complex64::new(left.norm_squared(), 0.0);
    let rebuilt = &psi * right.adjoint() + left * chi.adjoint();
    (linalg::frobenius(&(d - rebuilt)), psi, chi)
}

fn residual_verdict(
    method: Method,
    op: &OperatorMatrix,
    d: &CMatrix,
    left: &CVector,
    right: &CVector,
    (a, b): (Complex64, Complex64),
    tol: &Tolerances,
) -> Result<MembershipVerdict> {
    let (residual, psi, chi) = split_rank_two(d, left, right);
    let mut verdict = decide(method, residual, linalg::max_abs(&op.tm()), tol)?;
    if verdict.is_member {
        verdict.witness = Some(Witness {
            chi: ModelVector::new(op.alpha().tm_basis(), chi)?,
            psi: ModelVector::new(op.beta().tm_basis(), psi)?,
            a,
            b,
        });
    }
    Ok(verdict)
}

/// Tests `A - S_{β,b} A S_{α,a}^* = ψ ⊗ k_0^α + k_0^β ⊗ χ`. The residual is
/// the Frobenius norm of `Q_β D Q_α` where `Q` projects away from `k_0`.
pub fn test_rank_two_residual(
    op: &OperatorMatrix,
    a: Complex64,
    b: Complex64,
    tol: &Tolerances,
) -> Result<MembershipVerdict> {
    let d = rank_two_residual_tm(op, a, b);
    let (left, right) = (
        op.beta().k0_coords().clone(),
        op.alpha().k0_coords().clone(),
    );
    residual_verdict(Method::RankTwoResidual, op, &d, &left, &right, (a, b), tol)
}

/// Tests `A - S_{β,b}^* A S_{α,a} = ψ ⊗ k̃_0^α + k̃_0^β ⊗ χ`.
pub fn test_conjugate_residual(
    op: &OperatorMatrix,
    a: Complex64,
    b: Complex64,
    tol: &Tolerances,
) -> Result<MembershipVerdict> {
    let d = conjugate_residual_tm(op, a, b);
    let (left, right) = (
        op.beta().k0_tilde_coords().clone(),
        op.alpha().k0_tilde_coords().clone(),
    );
    residual_verdict(
        Method::ConjugateResidual,
        op,
        &d,
        &left,
        &right,
        (a, b),
        tol,
    )
}

/// Tests `⟨A S f, S g⟩ = ⟨A f, g⟩` for `f ⊥ k̃_0^α`, `g ⊥ k̃_0^β`, the
/// vectors for which `S f = z f` stays in the model space.
pub fn test_shift_invariance(op: &OperatorMatrix, tol: &Tolerances) -> Result<MembershipVerdict> {
    let (alpha, beta) = (op.alpha(), op.beta());
    let f = linalg::orthonormal_complement(alpha.k0_tilde_coords());
    let g = linalg::orthonormal_complement(beta.k0_tilde_coords());
    let tm = op.tm();
    let defect = beta.shift_matrix().adjoint() * &tm * alpha.shift_matrix() - &tm;
    let r = g.adjoint() * defect * f;
    decide(
        Method::ShiftInvariance,
        linalg::frobenius(&r),
        linalg::max_abs(&tm),
        tol,
    )
}

/// `(χ, ψ)` with `A - U_{λ2}^β A (U_{λ1}^α)^* = ψ ⊗ k_0^α + k_0^β ⊗ χ`,
/// computed from the Clark matrix by the closed forms with `ψ(ζ_1) = psi1`.
/// The coefficients are returned in the paired Clark bases.
#[derive(Debug, Clone)]
pub struct ClarkWitness {
    pub chi: ModelVector,
    pub psi: ModelVector,
    /// Values `χ(η_p)`.
    pub chi_values: Vec<Complex64>,
    /// Values `ψ(ζ_s)`.
    pub psi_values: Vec<Complex64>,
    /// Frobenius residual of the full linear system relating the values to
    /// the matrix entries.
    pub residual: f64,
}

pub fn recover_chi_psi_clark(
    op: &OperatorMatrix,
    pairing: &ClarkPairing,
    psi1: Complex64,
    tol: &Tolerances,
) -> Result<ClarkWitness> {
    let (alpha, beta) = (op.alpha(), op.beta());
    let (va, vb) = pairing.bases(alpha, beta)?;
    let r = op.in_bases(&va, &vb)?.entries().clone();
    let (n, m) = r.shape();
    let eta = &pairing.clark_alpha.points;
    let zeta = &pairing.clark_beta.points;
    let wa: Vec<f64> = (0..m).map(|p| pairing.clark_alpha.kernel_norm(p)).collect();
    let wb: Vec<f64> = (0..n).map(|s| pairing.clark_beta.kernel_norm(s)).collect();
    let (a0, b0) = (alpha.alpha().at_zero(), beta.alpha().at_zero());
    let k0a: Vec<Complex64> = eta
        .iter()
        .map(|e| ONE - a0.conj() * alpha.alpha().eval(*e))
        .collect();
    let k0b: Vec<Complex64> = zeta
        .iter()
        .map(|z| ONE - b0.conj() * beta.alpha().eval(*z))
        .collect();
    // Entry (s, p) of the system: (1 - conj(η_p) ζ_s) r_{s,p} √|α'(η_p)| √|β'(ζ_s)|.
    let rhs = |s: usize, p: usize| (ONE - eta[p].conj() * zeta[s]) * r[(s, p)] * (wa[p] * wb[s]);

    let chi: Vec<Complex64> = (0..m)
        .map(|p| {
            ((ONE - eta[p] * zeta[0].conj()) * r[(0, p)].conj() * (wa[p] * wb[0])
                - psi1.conj() * k0a[p])
                / k0b[0].conj()
        })
        .collect();
    let l = pairing.shared;
    let psi: Vec<Complex64> = (0..n)
        .map(|s| {
            if s == 0 {
                psi1
            } else if s < l {
                -k0b[s] * chi[s].conj() / k0a[s].conj()
            } else {
                (rhs(s, 0) - k0b[s] * chi[0].conj()) / k0a[0].conj()
            }
        })
        .collect();

    let mut sum = 0.0;
    let mut scale: f64 = 0.0;
    for s in 0..n {
        for p in 0..m {
            let target = rhs(s, p);
            scale = scale.max(target.norm());
            sum += (psi[s] * k0a[p].conj() + k0b[s] * chi[p].conj() - target).norm_sqr();
        }
    }
    let residual = Float::sqrt(sum);
    if residual > tol.decision * (1.0 + scale) {
        return Err(Error::NotMember { residual });
    }
    let chi_coeffs = CVector::from_iterator(m, chi.iter().zip(&wa).map(|(c, w)| c / *w));
    let psi_coeffs = CVector::from_iterator(n, psi.iter().zip(&wb).map(|(c, w)| c / *w));
    Ok(ClarkWitness {
        chi: ModelVector::new(va, chi_coeffs)?,
        psi: ModelVector::new(vb, psi_coeffs)?,
        chi_values: chi,
        psi_values: psi,
        residual,
    })
}

/// Shift coefficients `(a_1, b_1)` for which `S_{α,a_1} = U_{λ1}^α` and
/// `S_{β,b_1} = U_{λ2}^β`.
pub fn clark_coefficients(
    alpha: &ModelSpace,
    beta: &ModelSpace,
    lambda1: Complex64,
    lambda2: Complex64,
) -> (Complex64, Complex64) {
    (
        clark_coefficient(alpha, lambda1),
        clark_coefficient(beta, lambda2),
    )
}

/// Outcome of running every procedure on one operator.
#[derive(Debug, Clone)]
pub struct CrossValidation {
    pub verdicts: Vec<MembershipVerdict>,
    /// Common verdict, or `None` if the procedures disagree.
    pub consensus: Option<bool>,
}

impl CrossValidation {
    pub fn max_residual(&self) -> f64 {
        self.verdicts
            .iter()
            .map(|v| v.max_residual)
            .fold(0.0, f64::max)
    }
}

/// Runs the Clark recurrences for `(λ1, λ2)`, the rank-two residual for
/// `(0, 0)`, the Clark coefficients and each pair in `extra`, the conjugate
/// residual for the same pairs, and the shift invariance test.
pub fn cross_validate(
    op: &OperatorMatrix,
    lambda1: Complex64,
    lambda2: Complex64,
    extra: &[(Complex64, Complex64)],
    tol: &Tolerances,
) -> Result<CrossValidation> {
    let (alpha, beta) = (op.alpha(), op.beta());
    let pairing = clark_pairing(alpha, beta, lambda1, lambda2)?;
    let mut coeffs = alloc::vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))];
    coeffs.push(clark_coefficients(alpha, beta, lambda1, lambda2));
    coeffs.extend_from_slice(extra);
    let mut verdicts = alloc::vec![test_clark_recurrence(op, &pairing, tol)?];
    for (a, b) in &coeffs {
        verdicts.push(test_rank_two_residual(op, *a, *b, tol)?);
    }
    for (a, b) in &coeffs {
        verdicts.push(test_conjugate_residual(op, *a, *b, tol)?);
    }
    verdicts.push(test_shift_invariance(op, tol)?);
    let first = verdicts[0].is_member;
    let consensus = verdicts
        .iter()
        .all(|v| v.is_member == first)
        .then_some(first);
    Ok(CrossValidation {
        verdicts,
        consensus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::BlaschkeProduct;
    use crate::operators::{atto_matrix, compressed_shift, elementary_matrices, structured_tm};
    use crate::symbol::RawSymbol;
    use crate::testutil::{c, random_product, TestRng};

    fn z(k: usize) -> ModelSpace {
        ModelSpace::new(BlaschkeProduct::monomial(k).unwrap()).unwrap()
    }

    fn random_space(rng: &mut TestRng, degree: usize) -> ModelSpace {
        ModelSpace::new(random_product(rng, degree)).unwrap()
    }

    fn random_member(
        rng: &mut TestRng,
        alpha: &ModelSpace,
        beta: &ModelSpace,
        el: &[CMatrix],
    ) -> OperatorMatrix {
        let tm = structured_tm(el, &rng.vector(alpha.dim()), &rng.vector(beta.dim()));
        OperatorMatrix::from_tm(&tm, alpha.tm_basis(), beta.tm_basis()).unwrap()
    }

    /// Adds a perturbation orthogonal to the span of `el` of Frobenius size
    /// `size`.
    fn perturb(
        rng: &mut TestRng,
        op: &OperatorMatrix,
        el: &[CMatrix],
        size: f64,
    ) -> OperatorMatrix {
        let (n, m) = op.tm().shape();
        let mut e = CMatrix::from_fn(n, m, |_, _| rng.complex());
        // Gram–Schmidt against the spanning family, twice.
        let mut q: Vec<CMatrix> = Vec::new();
        for x in el {
            let mut v = x.clone();
            for _ in 0..2 {
                for u in &q {
                    let c = u.dotc(&v);
                    v -= u * c;
                }
            }
            let nv = v.norm();
            if nv > 1e-8 * x.norm() {
                q.push(v / Complex64::new(nv, 0.0));
            }
        }
        for _ in 0..2 {
            for u in &q {
                let c = u.dotc(&e);
                e -= u * c;
            }
        }
        let e = &e * Complex64::new(size / e.norm(), 0.0);
        OperatorMatrix::from_tm(
            &(op.tm() + e),
            op.in_basis().clone(),
            op.out_basis().clone(),
        )
        .unwrap()
    }

    #[test]
    fn matching_examples() {
        let tol = Tolerances::default();
        let one = c(1.0, 0.0);
        let p = clark_pairing(&z(2), &z(3), one, one).unwrap();
        assert_eq!(p.shared, 1);
        assert!((p.clark_alpha.points[0] - one).norm() < 1e-12);
        assert!((p.clark_beta.points[0] - one).norm() < 1e-12);
        assert_eq!(clark_pairing(&z(2), &z(2), one, one).unwrap().shared, 2);
        assert_eq!(
            clark_pairing(&z(2), &z(2), one, c(0.0, 1.0))
                .unwrap()
                .shared,
            0
        );
        // A loose tolerance makes the cube roots ambiguous against ±1.
        let ca = BlaschkeProduct::monomial(2)
            .unwrap()
            .clark_points(one, &tol)
            .unwrap();
        let cb = BlaschkeProduct::monomial(3)
            .unwrap()
            .clark_points(one, &tol)
            .unwrap();
        assert!(matches!(
            match_clark_points(&ca, &cb, 1.9),
            Err(Error::AmbiguousMatch { .. })
        ));
    }

    #[test]
    fn kernel_at_zero_is_constant_on_clark_points() {
        let mut rng = TestRng::new(51);
        for trial in 0..30 {
            let s = random_space(&mut rng, 1 + trial % 6);
            let lambda = rng.unimodular();
            let clark = s.alpha().clark_points(lambda, s.tolerances()).unwrap();
            let expected = ONE - s.alpha().at_zero().conj() * clark.target;
            for eta in &clark.points {
                let v = s.kernel(Complex64::new(0.0, 0.0)).eval(*eta);
                assert!((v - expected).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn structured_symbols_pass_every_test() {
        let mut rng = TestRng::new(52);
        let tol = Tolerances::default();
        for (m, n) in [(3, 2), (2, 3), (4, 3), (3, 3), (1, 3), (2, 1)] {
            let alpha = random_space(&mut rng, m);
            let beta = random_space(&mut rng, n);
            let el = elementary_matrices(&alpha, &beta).unwrap();
            for _ in 0..5 {
                let op = random_member(&mut rng, &alpha, &beta, &el);
                let extra = [(rng.complex(), rng.complex())];
                let cv =
                    cross_validate(&op, rng.unimodular(), rng.unimodular(), &extra, &tol).unwrap();
                assert_eq!(cv.consensus, Some(true), "({m},{n})");
                assert!(cv.max_residual() <= 1e-8);
            }
        }
    }

    #[test]
    fn perturbed_members_fail_every_test() {
        let mut rng = TestRng::new(53);
        let tol = Tolerances::default();
        for (m, n) in [(3, 2), (2, 3), (4, 3), (3, 3)] {
            let alpha = random_space(&mut rng, m);
            let beta = random_space(&mut rng, n);
            let el = elementary_matrices(&alpha, &beta).unwrap();
            for _ in 0..5 {
                let op = random_member(&mut rng, &alpha, &beta, &el);
                let bad = perturb(&mut rng, &op, &el, 1e-2 * (1.0 + linalg::max_abs(&op.tm())));
                let cv =
                    cross_validate(&bad, rng.unimodular(), rng.unimodular(), &[], &tol).unwrap();
                assert_eq!(cv.consensus, Some(false), "({m},{n})");
                for v in &cv.verdicts {
                    assert!(v.max_residual >= 1e-4, "{:?} {}", v.method, v.max_residual);
                }
            }
        }
    }

    #[test]
    fn shared_clark_points() {
        let mut rng = TestRng::new(54);
        let tol = Tolerances::default();
        for (m, n) in [(3, 2), (2, 3), (4, 3), (3, 3)] {
            let alpha = random_space(&mut rng, m);
            let beta = random_space(&mut rng, n);
            let el = elementary_matrices(&alpha, &beta).unwrap();
            let lambda1 = rng.unimodular();
            let eta = alpha.alpha().clark_points(lambda1, &tol).unwrap().points[0];
            let lambda2 = beta.alpha().lambda_for_target(beta.alpha().eval(eta));
            let pairing = clark_pairing(&alpha, &beta, lambda1, lambda2).unwrap();
            assert_eq!(pairing.shared, 1);
            let op = random_member(&mut rng, &alpha, &beta, &el);
            assert!(
                test_clark_recurrence(&op, &pairing, &tol)
                    .unwrap()
                    .is_member
            );
            let w1 = recover_chi_psi_clark(&op, &pairing, rng.complex(), &tol).unwrap();
            assert!(w1.residual < 1e-8);
            let bad = perturb(&mut rng, &op, &el, 1e-2);
            assert!(
                !test_clark_recurrence(&bad, &pairing, &tol)
                    .unwrap()
                    .is_member
            );
            assert!(matches!(
                recover_chi_psi_clark(&bad, &pairing, ONE, &tol),
                Err(Error::NotMember { .. })
            ));
        }
    }

    #[test]
    fn symmetric_case_with_all_points_shared() {
        let s = z(2);
        let tol = Tolerances::default();
        let one = c(1.0, 0.0);
        let pairing = clark_pairing(&s, &s, one, one).unwrap();
        let shift = compressed_shift(&s.tm_basis());
        assert!(
            test_clark_recurrence(&shift, &pairing, &tol)
                .unwrap()
                .is_member
        );
        assert!(test_shift_invariance(&shift, &tol).unwrap().is_member);
        let toeplitz = atto_matrix(
            &RawSymbol::laurent(alloc::vec![c(0.3, 0.1), c(-1.0, 2.0), c(0.5, 0.5)], -1).unwrap(),
            &s.tm_basis(),
            &s.tm_basis(),
        )
        .unwrap();
        assert!(
            test_clark_recurrence(&toeplitz, &pairing, &tol)
                .unwrap()
                .is_member
        );
    }

    #[test]
    fn witness_reconstructs_clark_residual() {
        let mut rng = TestRng::new(55);
        let tol = Tolerances::default();
        for (m, n) in [(3, 2), (2, 3), (3, 3)] {
            let alpha = random_space(&mut rng, m);
            let beta = random_space(&mut rng, n);
            let el = elementary_matrices(&alpha, &beta).unwrap();
            let op = random_member(&mut rng, &alpha, &beta, &el);
            let (l1, l2) = (rng.unimodular(), rng.unimodular());
            let pairing = clark_pairing(&alpha, &beta, l1, l2).unwrap();
            let (a1, b1) = clark_coefficients(&alpha, &beta, l1, l2);
            let d = rank_two_residual_tm(&op, a1, b1);
            for psi1 in [Complex64::new(0.0, 0.0), rng.complex()] {
                let w = recover_chi_psi_clark(&op, &pairing, psi1, &tol).unwrap();
                let rebuilt = w.psi.tm_coords() * alpha.k0_coords().adjoint()
                    + beta.k0_coords() * w.chi.tm_coords().adjoint();
                assert!(linalg::frobenius(&(&d - rebuilt)) < 1e-8);
                // Values of the recovered functions at the Clark points.
                for (p, eta) in pairing.clark_alpha.points.iter().enumerate() {
                    assert!((w.chi.eval(*eta) - w.chi_values[p]).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn witness_for_zero_and_shift() {
        let tol = Tolerances::default();
        let s = z(2);
        let one = c(1.0, 0.0);
        let pairing = clark_pairing(&s, &s, one, one).unwrap();
        let zero =
            OperatorMatrix::from_tm(&CMatrix::zeros(2, 2), s.tm_basis(), s.tm_basis()).unwrap();
        let w = recover_chi_psi_clark(&zero, &pairing, Complex64::new(0.0, 0.0), &tol).unwrap();
        assert!(w.chi.norm() < 1e-15 && w.psi.norm() < 1e-15);
        let v = test_conjugate_residual(&zero, one, one, &tol).unwrap();
        let wit = v.witness.unwrap();
        assert!(wit.chi.norm() == 0.0 && wit.psi.norm() == 0.0);
        // For S on K_{z²} with λ = 1: U = [[0,1],[1,0]] and
        // D = S - U S U^* = [[0,-1],[1,0]].
        let shift = compressed_shift(&s.tm_basis());
        let w = recover_chi_psi_clark(&shift, &pairing, Complex64::new(0.0, 0.0), &tol).unwrap();
        let u = CMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(0.0, 0.0), one, one, Complex64::new(0.0, 0.0)],
        );
        let d = shift.tm() - &u * shift.tm() * u.adjoint();
        // D = ψ ⊗ 1 + 1 ⊗ χ fixes the z-coefficients ψ_1 = 1 and χ_1 = -1;
        // the constant terms depend on the free parameter.
        let rebuilt = w.psi.tm_coords() * s.k0_coords().adjoint()
            + s.k0_coords() * w.chi.tm_coords().adjoint();
        assert!(linalg::frobenius(&(d - rebuilt)) < 1e-12);
        assert!((w.psi.tm_coords()[1] - one).norm() < 1e-12);
        assert!((w.chi.tm_coords()[1] + one).norm() < 1e-12);
    }

    #[test]
    fn verdicts_do_not_depend_on_shift_coefficients_or_bases() {
        let mut rng = TestRng::new(56);
        let tol = Tolerances::default();
        let alpha = random_space(&mut rng, 3);
        let beta = random_space(&mut rng, 2);
        let el = elementary_matrices(&alpha, &beta).unwrap();
        let good = random_member(&mut rng, &alpha, &beta, &el);
        let bad = perturb(&mut rng, &good, &el, 0.05);
        for _ in 0..10 {
            let (a, b) = (rng.complex(), rng.complex());
            assert!(test_rank_two_residual(&good, a, b, &tol).unwrap().is_member);
            assert!(!test_rank_two_residual(&bad, a, b, &tol).unwrap().is_member);
        }
        let ca = alpha.clark_basis(rng.unimodular()).unwrap();
        let cb = beta
            .basis(crate::modelspace::BasisKind::ModifiedClark(
                rng.unimodular(),
            ))
            .unwrap();
        for op in [&good, &bad] {
            let moved = op.in_bases(&ca, &cb).unwrap();
            let x = test_shift_invariance(op, &tol).unwrap();
            let y = test_shift_invariance(&moved, &tol).unwrap();
            assert_eq!(x.is_member, y.is_member);
            assert!((x.max_residual - y.max_residual).abs() < 1e-10);
        }
    }

    #[test]
    fn band_between_thresholds_is_indeterminate() {
        let tol = Tolerances::default();
        assert!(
            decide(Method::ShiftInvariance, 1e-9, 0.0, &tol)
                .unwrap()
                .is_member
        );
        assert!(
            !decide(Method::ShiftInvariance, 1e-3, 0.0, &tol)
                .unwrap()
                .is_member
        );
        assert!(matches!(
            decide(Method::ShiftInvariance, 1e-6, 0.0, &tol),
            Err(Error::Indeterminate { .. })
        ));
    }
}
