//! Seeded end-to-end checks with a deterministic JSON report.

use atto_core::membership::cross_validate;
use atto_core::operators::{clark_unitary, span_dimension, standard_rank_one};
use atto_core::rankone::{decompose_rank_one, example_4_1, RankOneTag};
use atto_core::{Complex64, OperatorMatrix, RankOneVariant, Tolerances};
use serde::Serialize;

use crate::error::CliError;
use crate::sampling::Sampler;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Largest error observed, in whatever unit the check measures.
    pub max_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<Check>,
    pub passed: bool,
}

struct Tally {
    check: Check,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            check: Check {
                name,
                cases: 0,
                failures: 0,
                max_error: 0.0,
            },
        }
    }

    fn record(&mut self, ok: bool, error: f64) {
        self.check.cases += 1;
        if !ok {
            self.check.failures += 1;
        }
        if error.is_finite() {
            self.check.max_error = self.check.max_error.max(error);
        } else {
            self.check.max_error = f64::MAX;
        }
    }
}

/// Runs every check; a core error inside a case counts as a failure of
/// that case.
pub fn run(seed: u64, trials: usize, tol: &Tolerances) -> Result<Report, CliError> {
    let mut rng = Sampler::new(seed);
    let per = trials.div_ceil(4).max(1);
    let one = Complex64::new(1.0, 0.0);
    let mut checks = Vec::new();

    let mut t = Tally::new("clark-unitary");
    for k in 0..per {
        let space = rng.space(1 + k % 6);
        let lambda = rng.unimodular();
        match (|| -> atto_core::Result<f64> {
            let basis = space.clark_basis(lambda)?;
            let u = clark_unitary(&basis, lambda)?.tm();
            let m = space.dim();
            let gram = (basis.gram() - atto_core::CMatrix::identity(m, m)).norm();
            Ok(gram.max((u.adjoint() * &u - atto_core::CMatrix::identity(m, m)).norm()))
        })() {
            Ok(e) => t.record(e <= 1e-9, e),
            Err(_) => t.record(false, f64::INFINITY),
        }
    }
    checks.push(t.check);

    let mut t = Tally::new("membership");
    for k in 0..per {
        let (m, n) = [(3, 2), (2, 3), (4, 3), (3, 3)][k % 4];
        let (alpha, beta) = (rng.space(m), rng.space(n));
        let lambda1 = rng.unimodular();
        let lambda2 = if k % 2 == 0 {
            rng.unimodular()
        } else {
            match alpha.alpha().clark_points(lambda1, tol) {
                Ok(set) => beta
                    .alpha()
                    .lambda_for_target(beta.alpha().eval(set.points[0])),
                Err(_) => rng.unimodular(),
            }
        };
        let extra = [(rng.in_disk(0.9), rng.in_disk(0.9))];
        let result = (|| -> atto_core::Result<(bool, f64)> {
            let op = rng.member(&alpha, &beta)?;
            let good = cross_validate(&op, lambda1, lambda2, &extra, tol)?;
            let bad_op = rng.perturb(
                &op,
                1e-2 * (1.0 + op.tm().iter().fold(0.0f64, |a, z| a.max(z.norm()))),
            )?;
            let bad = cross_validate(&bad_op, lambda1, lambda2, &extra, tol)?;
            Ok((
                good.consensus == Some(true) && bad.consensus == Some(false),
                good.max_residual(),
            ))
        })();
        match result {
            Ok((ok, e)) => t.record(ok && e <= 1e-8, e),
            Err(_) => t.record(false, f64::INFINITY),
        }
    }
    checks.push(t.check);

    let mut t = Tally::new("rank-one-round-trip");
    for k in 0..per {
        let (alpha, beta) = (rng.space(3), rng.space(2));
        let w = rng.in_disk(0.9);
        let variant = if k % 2 == 0 {
            RankOneVariant::ConjKKernel
        } else {
            RankOneVariant::KernelConjK
        };
        let scale = rng.complex();
        let result = (|| -> atto_core::Result<(bool, f64)> {
            let base = standard_rank_one(&alpha, &beta, w, variant)?;
            let op =
                OperatorMatrix::from_tm(&(base.tm() * scale), alpha.tm_basis(), beta.tm_basis())?;
            let d = decompose_rank_one(&op, rng.unimodular(), rng.unimodular(), tol)?;
            let err = d.w.map_or(f64::INFINITY, |x| (x - w).norm());
            Ok((
                d.tag == RankOneTag::Standard && d.variant == Some(variant),
                err,
            ))
        })();
        match result {
            Ok((ok, e)) => t.record(ok && e <= 1e-7, e),
            Err(_) => t.record(false, f64::INFINITY),
        }
    }
    checks.push(t.check);

    let mut t = Tally::new("dimension");
    for (m, n) in [(3, 2), (2, 3), (4, 3), (3, 3), (1, 3)] {
        let (alpha, beta) = (rng.space(m), rng.space(n));
        match span_dimension(&alpha, &beta) {
            Ok(r) => t.record(
                r.dim == m + n - 1 && r.gap_decades >= 6.0,
                (r.dim as f64 - (m + n - 1) as f64).abs(),
            ),
            Err(_) => t.record(false, f64::INFINITY),
        }
    }
    checks.push(t.check);

    let mut t = Tally::new("example");
    for a in [Complex64::new(0.5, 0.0), Complex64::new(0.3, 0.2)] {
        let result = (|| -> atto_core::Result<(bool, f64)> {
            let ex = example_4_1(a)?;
            let cv = cross_validate(&ex.operator, one, one, &[], tol)?;
            let d = decompose_rank_one(&ex.operator, one, one, tol)?;
            let r = a.norm_sqr();
            let err = (ex.kernel_candidates[0] - a / (2.0 - r))
                .norm()
                .max((ex.kernel_candidates[1] - a / (2.0 + r)).norm());
            Ok((
                cv.consensus == Some(true) && d.tag == RankOneTag::NonStandard,
                err,
            ))
        })();
        match result {
            Ok((ok, e)) => t.record(ok && e <= 1e-12, e),
            Err(_) => t.record(false, f64::INFINITY),
        }
    }
    checks.push(t.check);

    let passed = checks.iter().all(|c| c.failures == 0);
    Ok(Report {
        seed,
        trials,
        checks,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes_and_repeats() {
        let tol = Tolerances::default();
        let a = run(42, 8, &tol).unwrap();
        assert!(a.passed, "{a:?}");
        assert_eq!(a, run(42, 8, &tol).unwrap());
    }
}
