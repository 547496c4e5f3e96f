//! The operational measures E1..E6 of the canonical form, the four-member
//! family S_ψ and the inversion from measures back to parameters.

use serde::{Deserialize, Serialize};

use crate::bipartite::{eof_clamped, eof_inv};
use crate::canonical::{canonicalize_params, literal_state, Angles, FormParams};
use crate::error::{Error, Result};
use crate::linalg::{self, binary_entropy, c, Mat2, ZERO};
use crate::oracle;
use crate::state::{entanglement_entropy, PureState};
use crate::tolerance::Tolerances;

const CROSS_CHECK: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureSet {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    pub e4: f64,
    pub e5: f64,
    pub e6: u8,
    /// Entanglement of qubit 0 with the rest, the quantity E6 compares.
    pub e_1_23: f64,
}

/// Entropy of a rank-2 reduction with eigenvalues (1 ± |ov|)/2.
fn overlap_entropy(ov_sq: f64) -> f64 {
    binary_entropy(0.5 * (1.0 + ov_sq.clamp(0.0, 1.0).sqrt()))
}

fn purity_entropy(purity: f64) -> f64 {
    overlap_entropy(2.0 * purity - 1.0)
}

fn plus() -> PureState {
    let r = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    PureState::from_raw(vec![r, r])
}

fn phi_plus() -> PureState {
    let r = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    PureState::from_raw(vec![r, ZERO, ZERO, r])
}

/// (|00⟩|φ⁺⟩ + |11⟩(U⊗1)|φ⁺⟩)/√2 on qubits (c, c′, t, t′).
pub fn cj_state_of(u: &Mat2) -> PureState {
    let zero2 = PureState::basis(2, 0).expect("valid basis state");
    let one2 = PureState::basis(2, 3).expect("valid basis state");
    let mut rotated = phi_plus();
    rotated.apply_single(0, u);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let amps: Vec<_> = zero2
        .tensor(&phi_plus())
        .amplitudes()
        .iter()
        .zip(one2.tensor(&rotated).amplitudes())
        .map(|(x, y)| (x + y) * r)
        .collect();
    PureState::from_raw(amps)
}

pub fn e1(f: &FormParams) -> f64 {
    eof_clamped(2.0 * f.a * f.b())
}

fn cross_check(name: &str, built: f64, closed: f64) -> Result<()> {
    if (built - closed).abs() > CROSS_CHECK {
        return Err(Error::Numerical(format!("{name}: constructed {built} vs closed form {closed}")));
    }
    Ok(())
}

/// E2 and E3: entanglement needed to implement the controlled U2 and U3.
pub fn e2_e3_imp(f: &FormParams) -> Result<(f64, f64)> {
    let e2 = entanglement_entropy(&cj_state_of(&f.u2()), &[0, 1])?;
    let e3 = entanglement_entropy(&cj_state_of(&f.u3()), &[0, 1])?;
    cross_check("e2", e2, overlap_entropy(oracle::e2_overlap_sq(f)))?;
    cross_check("e3", e3, overlap_entropy(oracle::e3_overlap_sq(f)))?;
    Ok((e2, e3))
}

/// E4 and E5: entanglement across 0|12 created by the controlled U2 acting
/// on |+⟩|ψs⟩, with qubit 0 or qubit 1 as control.
pub fn e4_e5_gain(f: &FormParams) -> Result<(f64, f64)> {
    let u2 = f.u2();
    let mut fwd = plus().tensor(&f.psi_s());
    fwd.apply_controlled(0, 1, &u2);
    let mut rev = plus().tensor(&f.psi_s());
    rev.apply_controlled(1, 0, &u2);
    let e4 = entanglement_entropy(&fwd, &[0])?;
    let e5 = entanglement_entropy(&rev, &[0])?;
    cross_check("e4", e4, overlap_entropy(oracle::e4_overlap_sq(f)))?;
    cross_check("e5", e5, purity_entropy(oracle::e5_purity(f)))?;
    Ok((e4, e5))
}

/// U_c^{02} U_c^{01} (σ_n on qubit 1) |+⟩|ψs⟩.
fn s_psi_member(f: &FormParams, n: usize) -> PureState {
    let mut s = plus().tensor(&f.psi_s());
    s.apply_single(1, &linalg::pauli(n));
    s.apply_controlled(0, 1, &f.u2());
    s.apply_controlled(0, 2, &f.u3());
    s
}

/// ψ, ψ′*, ψ*, ψ′ in that order (n = 0..3).
#[derive(Clone, Debug)]
pub struct SPsiSet {
    pub members: [PureState; 4],
}

impl SPsiSet {
    pub fn psi(&self) -> &PureState {
        &self.members[0]
    }

    pub fn psi_prime(&self) -> &PureState {
        &self.members[3]
    }
}

pub fn s_psi_set(f: &FormParams) -> SPsiSet {
    SPsiSet { members: [0, 1, 2, 3].map(|n| s_psi_member(f, n)) }
}

/// Parameters of ψ′, with β negated and mapped back to the canonical ranges.
pub fn prime_params(f: &FormParams) -> FormParams {
    let t = f.angles();
    f.with_angles(canonicalize_params(Angles::new(t.alpha, -t.beta, t.gamma, t.beta_prime)))
}

/// E_{1|23} of ψ and ψ′.
fn splitting_pair(f: &FormParams) -> Result<(f64, f64)> {
    let set = s_psi_set(f);
    let mut e = [0.0; 4];
    for (k, m) in set.members.iter().enumerate() {
        e[k] = entanglement_entropy(m, &[0])?;
    }
    let fp = FormParams { beta: -f.beta, ..*f };
    let closed = [
        overlap_entropy(oracle::splitting_overlap_sq(f)),
        overlap_entropy(oracle::splitting_overlap_sq(&fp)),
    ];
    cross_check("E_1|23(ψ)", e[0], closed[0])?;
    cross_check("E_1|23(ψ*)", e[2], closed[0])?;
    cross_check("E_1|23(ψ′)", e[3], closed[1])?;
    cross_check("E_1|23(ψ′*)", e[1], closed[1])?;
    Ok((e[0], e[3]))
}

fn e6_from(pair: (f64, f64), tol: f64) -> u8 {
    let (own, other) = pair;
    let lo = own.min(other);
    let hi = own.max(other);
    if hi - lo <= tol || own <= lo + tol {
        0
    } else {
        1
    }
}

/// 0 if ψ has the smaller E_{1|23} within S_ψ (or ψ ∼ ψ′), else 1.
pub fn e6(f: &FormParams, tol: &Tolerances) -> Result<u8> {
    Ok(e6_from(splitting_pair(f)?, tol.e6))
}

pub fn measure_set(f: &FormParams, tol: &Tolerances) -> Result<MeasureSet> {
    let (e2, e3) = e2_e3_imp(f)?;
    let (e4, e5) = e4_e5_gain(f)?;
    let pair = splitting_pair(f)?;
    Ok(MeasureSet { e1: e1(f), e2, e3, e4, e5, e6: e6_from(pair, tol.e6), e_1_23: pair.0 })
}

/// Measures from the closed-form expressions only (no state construction).
fn closed_measures(f: &FormParams, tol: &Tolerances) -> MeasureSet {
    let fp = FormParams { beta: -f.beta, ..*f };
    let own = overlap_entropy(oracle::splitting_overlap_sq(f));
    let other = overlap_entropy(oracle::splitting_overlap_sq(&fp));
    MeasureSet {
        e1: e1(f),
        e2: overlap_entropy(oracle::e2_overlap_sq(f)),
        e3: overlap_entropy(oracle::e3_overlap_sq(f)),
        e4: overlap_entropy(oracle::e4_overlap_sq(f)),
        e5: purity_entropy(oracle::e5_purity(f)),
        e6: e6_from((own, other), tol.e6),
        e_1_23: own,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Inversion {
    pub candidates: Vec<FormParams>,
    /// a = b: only E1, E2 and E5 carry information.
    pub degenerate: bool,
}

const INVERSION_MATCH: f64 = 1e-9;

/// Squared overlap recovered from an entropy of the form h((1 + |ov|)/2).
fn overlap_sq_of(e: f64) -> f64 {
    (2.0 * linalg::binary_entropy_inv(e) - 1.0).powi(2)
}

fn matches(ms: &MeasureSet, got: &MeasureSet) -> bool {
    let d = [
        ms.e1 - got.e1,
        ms.e2 - got.e2,
        ms.e3 - got.e3,
        ms.e4 - got.e4,
        ms.e5 - got.e5,
        ms.e_1_23 - got.e_1_23,
    ];
    d.iter().all(|x| x.abs() <= INVERSION_MATCH) && ms.e6 == got.e6
}

fn angle_gap(x: f64, y: f64) -> f64 {
    // α and γ are only meaningful modulo π at the range edge
    let d = (x - y).rem_euclid(std::f64::consts::PI);
    d.min(std::f64::consts::PI - d)
}

fn same_params(x: &FormParams, y: &FormParams) -> bool {
    let eps = 1e-7;
    (x.a - y.a).abs() <= eps
        && angle_gap(x.alpha, y.alpha) <= eps
        && angle_gap(x.gamma, y.gamma) <= eps
        && (x.beta - y.beta).abs() <= eps
        && (x.beta_prime - y.beta_prime).abs() <= eps
}

/// Candidate canonical parameters reproducing `ms`.
pub fn invert_measures(ms: &MeasureSet, tol: &Tolerances) -> Result<Inversion> {
    let conc = eof_inv(ms.e1).clamp(0.0, 1.0);
    let a = (0.5 * (1.0 + (1.0 - conc * conc).max(0.0).sqrt())).sqrt().min(1.0 - 1e-12);
    let b = (1.0 - a * a).sqrt();
    let degenerate = (a - b).abs() <= tol.degenerate.max(1e-7);
    let v2 = overlap_sq_of(ms.e2);
    let v4 = overlap_sq_of(ms.e4);
    let rho_min = linalg::binary_entropy_inv(ms.e5);
    let ab2 = a * a * b * b;
    let v5 = if ab2 > 0.0 { 1.0 - rho_min * (1.0 - rho_min) / ab2 } else { 1.0 };

    let mut raw: Vec<Angles> = Vec::new();
    if degenerate {
        let s0 = v2.clamp(0.0, 1.0).sqrt().acos();
        for s in [s0, -s0] {
            raw.push(Angles::new(s, 0.0, 0.0, 0.0));
        }
    } else {
        let bp = overlap_sq_of(ms.e3).clamp(0.0, 1.0).sqrt().acos();
        let cos2b = ((v4 - 4.0 * ab2 * v2) / (a * a - b * b).powi(2)).clamp(0.0, 1.0);
        let beta = cos2b.sqrt().acos();
        let sin2b = 1.0 - cos2b;
        let cos2s = if cos2b > 1e-12 { (v2 / cos2b).clamp(0.0, 1.0) } else { 1.0 };
        let sin2d = if sin2b > 1e-12 { ((v5 - v2) / sin2b).clamp(0.0, 1.0) } else { 0.0 };
        let s0 = cos2s.sqrt().acos();
        let d0 = sin2d.sqrt().asin();
        let pi = std::f64::consts::PI;
        for s in [s0, -s0, s0 + pi, -s0 + pi] {
            for d in [d0, -d0, d0 + pi, -d0 + pi] {
                raw.push(Angles::new(0.5 * (s + d), beta, 0.5 * (s - d), bp));
            }
        }
    }

    let mut candidates: Vec<FormParams> = Vec::new();
    for t in raw {
        let f = FormParams::new(a, 0.0, 0.0, 0.0, 0.0).with_angles(canonicalize_params(t));
        if candidates.iter().any(|g| same_params(g, &f)) {
            continue;
        }
        if matches(ms, &closed_measures(&f, tol)) {
            candidates.push(f);
        }
    }
    if candidates.is_empty() {
        return Err(Error::InconsistentMeasures("no parameter set reproduces the measures".into()));
    }
    Ok(Inversion { candidates, degenerate })
}

/// The state of `f` with its literal (unvalidated) parameters.
pub fn form_state(f: &FormParams) -> PureState {
    literal_state(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::canonical_decomposition;
    use crate::classify::lu_equivalent;
    use crate::sampling::haar_state;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn ghz_form() -> FormParams {
        FormParams::new(FRAC_1_SQRT_2, FRAC_PI_2, 0.0, 0.0, 0.0)
    }

    #[test]
    fn ghz_measures() {
        let m = measure_set(&ghz_form(), &tol()).unwrap();
        for (name, got, want) in
            [("e1", m.e1, 1.0), ("e2", m.e2, 1.0), ("e3", m.e3, 0.0), ("e4", m.e4, 1.0), ("e5", m.e5, 1.0)]
        {
            assert!((got - want).abs() < 1e-12, "{name} = {got}");
        }
        assert_eq!(m.e6, 0);
    }

    #[test]
    fn w_e1() {
        let f = canonical_decomposition(&PureState::w(), &tol()).unwrap();
        let want = binary_entropy(0.5 * (1.0 + (1.0f64 - 4.0 / 9.0).sqrt()));
        assert!((e1(&f.params) - want).abs() < 1e-12);
        assert!((want - 0.5500477595827).abs() < 1e-9);
    }

    #[test]
    fn single_angle_values() {
        let f = FormParams::new(0.8, 0.0, 0.0, 0.0, FRAC_PI_2);
        assert!((e2_e3_imp(&f).unwrap().1 - 1.0).abs() < 1e-12);
        let f = FormParams::new(0.8, 0.1, FRAC_PI_3, FRAC_PI_4 - 0.1, 0.0);
        let x = 0.5 * (1.0 + 0.5 * FRAC_1_SQRT_2);
        assert!((e2_e3_imp(&f).unwrap().0 - binary_entropy(x)).abs() < 1e-12);
        assert!((binary_entropy(x) - 0.907_852_300_6).abs() < 1e-9);
        let f = FormParams::new(FRAC_1_SQRT_2, 0.0, 0.0, 0.0, 0.0);
        assert!(e4_e5_gain(&f).unwrap().0.abs() < 1e-12);
    }

    #[test]
    fn s_psi_members() {
        let t = tol();
        let f = FormParams::new(0.8, 0.3, 0.7, 0.2, 0.5);
        let set = s_psi_set(&f);
        assert!(set.psi().phase_distance(&reconstruct(&f)) < 1e-12);
        let eq = lu_equivalent(&set.members[2], &set.psi().conj(), &t).unwrap();
        assert!(eq.equal);
        let eq = lu_equivalent(&set.members[3], &reconstruct(&prime_params(&f)), &t).unwrap();
        assert!(eq.equal);
        let eq = lu_equivalent(set.psi(), set.psi_prime(), &t).unwrap();
        assert!(!eq.equal && !eq.conjugate_pair);
        let e = e6(&f, &t).unwrap();
        let ep = e6(&prime_params(&f), &t).unwrap();
        assert_ne!(e, ep);
        let flat = FormParams::new(0.8, 0.3, 0.7, 0.2, 0.0);
        assert_eq!(e6(&flat, &t).unwrap(), 0);
        assert_eq!(e6(&prime_params(&flat), &t).unwrap(), 0);
    }

    fn reconstruct(f: &FormParams) -> PureState {
        crate::canonical::reconstruct_state(f).unwrap()
    }

    #[test]
    fn inversion_round_trip() {
        let t = tol();
        for seed in 0..40 {
            let s = haar_state(3, seed).unwrap();
            let f = canonical_decomposition(&s, &t).unwrap().params;
            let ms = measure_set(&f, &t).unwrap();
            let inv = invert_measures(&ms, &t).unwrap();
            assert!(inv.candidates.len() <= 4, "seed {seed}: {:?}", inv.candidates);
            let hit = inv.candidates.iter().any(|g| {
                let e = lu_equivalent(&s, &reconstruct(g), &t).unwrap();
                e.equal || e.conjugate_pair
            });
            assert!(hit, "seed {seed}");
        }
        let ms = measure_set(&ghz_form(), &t).unwrap();
        let inv = invert_measures(&ms, &t).unwrap();
        assert_eq!(inv.candidates.len(), 1);
        assert!(inv.degenerate);
    }

    #[test]
    fn corrupted_measures_rejected() {
        let t = tol();
        let f = FormParams::new(0.8, 0.3, 0.7, 0.2, 0.5);
        let mut ms = measure_set(&f, &t).unwrap();
        ms.e4 = (ms.e4 + 0.1).min(1.0);
        assert!(matches!(invert_measures(&ms, &t), Err(Error::InconsistentMeasures(_))));
    }
}
