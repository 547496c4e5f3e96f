//! Closed-form expressions used to cross-check the numerical pipeline.
//! Nothing in the production path depends on these.

use num_complex::Complex64 as C64;

use crate::bipartite::TauMatrix;
use crate::canonical::FormParams;
use crate::classify::{AcinForm, InvariantSet};

/// (C₋, C₊) from p, c0, c1 and c̃.
pub fn c_minus_plus(tm: &TauMatrix) -> (f64, f64) {
    let p = tm.p;
    let q = 1.0 - p;
    let base = p * p * tm.c0 * tm.c0 + q * q * tm.c1 * tm.c1 + 2.0 * p * q * tm.ctilde.norm_sqr();
    let spread = 2.0 * p * q * (C64::new(tm.c0 * tm.c1, 0.0) - tm.ctilde * tm.ctilde).norm();
    ((base - spread).max(0.0).sqrt(), (base + spread).max(0.0).sqrt())
}

/// Concurrence of ψs produced by measuring qubit 0 along ω.
pub fn c_psi_s(tm: &TauMatrix, omega: f64) -> f64 {
    let p = tm.p;
    let q = 1.0 - p;
    let v = p * p * tm.c0 * tm.c0
        + q * q * tm.c1 * tm.c1
        + 2.0 * p * q * (tm.c0 * tm.c1 * (2.0 * omega).cos() + 2.0 * tm.ctilde.norm_sqr());
    v.max(0.0).sqrt()
}

/// |⟨ψs|U2⊗U3|ψs⟩|² expanded in the canonical parameters.
pub fn splitting_overlap_sq(f: &FormParams) -> f64 {
    let (a, b) = (f.a, f.b());
    let (sb, cb) = f.beta.sin_cos();
    let (sp, cp) = f.beta_prime.sin_cos();
    let sum = f.alpha + f.gamma;
    let diff = f.alpha - f.gamma;
    let ab4 = 4.0 * a * a * b * b;
    ab4 * sb * sb * sp * sp * diff.cos().powi(2)
        + cb * cb * cp * cp * ((a * a - b * b).powi(2) + ab4 * sum.cos().powi(2))
        + 4.0 * a * b * cb * cp * sb * sp * sum.cos() * diff.cos()
}

/// |Tr U2 / 2|², the CJ overlap of the controlled U2.
pub fn e2_overlap_sq(f: &FormParams) -> f64 {
    (f.beta.cos() * (f.alpha + f.gamma).cos()).powi(2)
}

/// |Tr U3 / 2|².
pub fn e3_overlap_sq(f: &FormParams) -> f64 {
    f.beta_prime.cos().powi(2)
}

/// |⟨ψs|U2⊗1|ψs⟩|².
pub fn e4_overlap_sq(f: &FormParams) -> f64 {
    let (a, b) = (f.a, f.b());
    f.beta.cos().powi(2) * ((a * a - b * b).powi(2) + 4.0 * a * a * b * b * (f.alpha + f.gamma).cos().powi(2))
}

/// Tr ρ₀² of a|+⟩|00⟩ + b U2|+⟩|11⟩.
pub fn e5_purity(f: &FormParams) -> f64 {
    let (a, b) = (f.a, f.b());
    let g = (f.alpha + f.gamma).cos().powi(2) * f.beta.cos().powi(2)
        + (f.alpha - f.gamma).sin().powi(2) * f.beta.sin().powi(2);
    a.powi(4) + b.powi(4) + 2.0 * a * a * b * b * g
}

/// Schmidt probabilities (σ₊, σ₋) of the standard form from J2 + J3 + J4.
pub fn sigma_pm(inv: &InvariantSet) -> (f64, f64) {
    let r = (1.0 - 4.0 * (inv.j2 + inv.j3 + inv.j4)).max(0.0).sqrt();
    (0.5 * (1.0 + r), 0.5 * (1.0 - r))
}

/// det τ of a standard form with λ1 ≠ 0, divided back by k₊²k₋².
/// Returns the complex value carrying the e^{2iφ} factor.
pub fn det_tau_standard(form: &AcinForm, inv: &InvariantSet) -> C64 {
    let [l0, l1, _, _, l4] = form.lambda;
    let (sp, sm) = sigma_pm(inv);
    let k2 = |s: f64| l0 * l0 * l1 * l1 + (l0 * l0 - s).powi(2);
    let rhs = 4.0 * l0.powi(4) * l1 * l1 * l4 * l4 * (inv.j2 + inv.j3 + inv.j4 - 0.25);
    C64::from_polar(1.0, 2.0 * form.phi) * (rhs / (k2(sp) * k2(sm)))
}
