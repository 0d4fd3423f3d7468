/// Numerical thresholds used across the crate.
///
/// The underlying statements are exact; these only control how floating
/// point results are judged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Residual bound for polished boundary roots `|B(η) - u|`.
    pub residual: f64,
    /// Minimum distance between distinct boundary roots.
    pub distinct: f64,
    /// Distance below which two Clark points count as shared.
    pub matching: f64,
    /// Relative residual at or below which an operator is accepted.
    pub decision: f64,
    /// Relative residual at or above which an operator is rejected.
    /// Residuals between `decision` and `reject` are indeterminate.
    pub reject: f64,
    /// Convergence threshold for successive circle quadrature refinements.
    pub quadrature: f64,
    /// Minimum distance from an evaluation point to a pole.
    pub pole: f64,
    /// Allowed deviation of `|c|` from 1 for user supplied unimodular values.
    pub unimodular: f64,
    /// Singular values below `rank * σ_max` count as zero.
    pub rank: f64,
    /// Relative tolerance for kernel / conjugate kernel classification.
    pub classify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual: 1e-10,
            distinct: 1e-8,
            matching: 1e-8,
            decision: 1e-7,
            reject: 1e-5,
            quadrature: 1e-12,
            pole: 1e-12,
            unimodular: 1e-10,
            rank: 1e-8,
            classify: 1e-7,
        }
    }
}

impl Tolerances {
    /// Whether every threshold is strictly positive and the accept/reject
    /// band is ordered.
    pub fn is_valid(&self) -> bool {
        let all = [
            self.residual,
            self.distinct,
            self.matching,
            self.decision,
            self.reject,
            self.quadrature,
            self.pole,
            self.unimodular,
            self.rank,
            self.classify,
        ];
        all.iter().all(|t| t.is_finite() && *t > 0.0) && self.decision <= self.reject
    }
}
