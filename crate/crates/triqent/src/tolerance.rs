use serde::{Deserialize, Serialize};

/// Numerical thresholds shared by every decision in the crate.
///
/// All values are absolute and assume normalized states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Smallest single-qubit marginal eigenvalue of a genuinely tripartite state.
    pub product: f64,
    /// |p − 1/2| below which the 1|23 Schmidt split is treated as degenerate.
    pub degenerate: f64,
    /// Tangle below which a state is in the W class.
    pub tangle: f64,
    /// Threshold on |Im J6| (CLU test) and |J6| (class 4).
    pub j6: f64,
    /// Threshold on the E1 extremality gap.
    pub clu: f64,
    /// Threshold on J1..J6 differences when comparing LU classes.
    pub inv: f64,
    /// Threshold on E_{1|23} spreads inside S_psi.
    pub e6: f64,
    /// Threshold on |Im c̃²|.
    pub lemma1: f64,
    /// Threshold on the residuals of the two polynomial CLU conditions.
    pub poly: f64,
    /// Threshold for the degenerate phase cases and for a = b.
    pub omega: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            product: 1e-8,
            degenerate: 1e-9,
            tangle: 1e-9,
            j6: 1e-9,
            clu: 1e-7,
            inv: 1e-8,
            e6: 1e-9,
            lemma1: 1e-9,
            poly: 1e-12,
            omega: 1e-9,
        }
    }
}
