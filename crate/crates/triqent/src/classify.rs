//! Acín standard form, the invariants J1..J6, CLU/NCLU decision, the four
//! CLU subclasses and an LU-equivalence predicate.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bipartite::{self, SchmidtSplit, TauMatrix};
use crate::canonical::{self, CanonicalForm};
use crate::error::{Error, Result};
use crate::linalg::{self, c, det, Mat2, C64, ONE, ZERO};
use crate::state::{apply_local, require_genuine, LocalUnitary, PureState};
use crate::tolerance::Tolerances;

/// λ0|000⟩ + λ1 e^{iφ}|100⟩ + λ2|101⟩ + λ3|110⟩ + λ4|111⟩.
#[derive(Clone, Debug)]
pub struct AcinForm {
    pub lambda: [f64; 5],
    pub phi: f64,
    pub witness: LocalUnitary,
    /// The defining quadratic had a double root or vanished identically.
    pub degenerate_root: bool,
}

impl AcinForm {
    pub fn state(&self) -> PureState {
        standard_form_state(self.lambda, self.phi)
    }
}

/// Builds the standard-form state from λ0..λ4 and φ (normalized).
pub fn standard_form_state(lambda: [f64; 5], phi: f64) -> PureState {
    let mut amps = vec![ZERO; 8];
    amps[0] = c(lambda[0], 0.0);
    amps[4] = C64::from_polar(lambda[1], phi);
    amps[5] = c(lambda[2], 0.0);
    amps[6] = c(lambda[3], 0.0);
    amps[7] = c(lambda[4], 0.0);
    let n: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    PureState::from_raw(amps.into_iter().map(|z| z / n).collect())
}

fn slices(state: &PureState) -> (Mat2, Mat2) {
    let t = state.tensor3();
    let m = |k: usize| linalg::mat2(t[k][0][0], t[k][0][1], t[k][1][0], t[k][1][1]);
    (m(0), m(1))
}

/// Rows (u, v) of qubit-0 unitaries making det(u T0 + v T1) = 0.
fn null_rows(t0: &Mat2, t1: &Mat2) -> (Vec<(C64, C64)>, bool) {
    let qa = det(t1);
    let qc = det(t0);
    let qb = t0[(0, 0)] * t1[(1, 1)] + t0[(1, 1)] * t1[(0, 0)] - t0[(0, 1)] * t1[(1, 0)] - t0[(1, 0)] * t1[(0, 1)];
    let scale = qa.norm().max(qb.norm()).max(qc.norm());
    if scale <= 1e-14 {
        return (vec![(ONE, ZERO)], true);
    }
    // |A| ≥ |C|: A v² + B v + C = 0 with u = 1; otherwise C u² + B u + A = 0 with v = 1
    let flip = qa.norm() < qc.norm();
    let (lead, cons) = if flip { (qc, qa) } else { (qa, qc) };
    let row = |t: C64| if flip { (t, ONE) } else { (ONE, t) };
    let at_infinity = if flip { (ONE, ZERO) } else { (ZERO, ONE) };
    if lead.norm() <= 1e-14 * scale {
        return (vec![row(-cons / qb), at_infinity], false);
    }
    let disc = qb * qb - lead * cons * 4.0;
    let sq = disc.sqrt();
    let q1 = -(qb + sq) * 0.5;
    let q2 = -(qb - sq) * 0.5;
    let q = if q1.norm() >= q2.norm() { q1 } else { q2 };
    let double = disc.norm() <= 1e-12 * scale * scale;
    if q.norm() <= 1e-300 {
        return (vec![row(ZERO)], true);
    }
    (vec![row(q / lead), row(cons / q)], double)
}

fn phase_of(z: C64, eps: f64) -> Option<f64> {
    (z.norm() > eps).then(|| z.arg())
}

fn form_from_row(state: &PureState, t0: &Mat2, t1: &Mat2, u: C64, v: C64) -> AcinForm {
    let n = (u.norm_sqr() + v.norm_sqr()).sqrt();
    let (u, v) = (u / n, v / n);
    let q0 = linalg::mat2(u, v, -v.conj(), u.conj());
    let t0p = t0 * u + t1 * v;
    let t1p = t0 * (-v.conj()) + t1 * u.conj();
    let d = linalg::svd2(&t0p);
    let a2 = d.u.adjoint();
    let b3 = d.v.transpose();
    let t1s = a2 * t1p * b3.transpose();
    let eps = 1e-13;
    let (p00, p01, p10, p11) = (
        phase_of(t1s[(0, 0)], eps),
        phase_of(t1s[(0, 1)], eps),
        phase_of(t1s[(1, 0)], eps),
        phase_of(t1s[(1, 1)], eps),
    );
    let theta = match (p01, p10, p11) {
        (Some(x), Some(y), Some(z)) => -x - y + z,
        _ => p00.map(|x| -x).unwrap_or(0.0),
    };
    let chi = match (p10, p01, p11) {
        (Some(y), _, _) => -y - theta,
        (None, Some(x), Some(z)) => -z + x,
        _ => 0.0,
    };
    let eta = match (p01, p11) {
        (Some(x), _) => -x - theta,
        (None, Some(z)) => -z - theta - chi,
        _ => 0.0,
    };
    let lu = LocalUnitary::from_factors(vec![
        linalg::phase_diag(0.0, theta) * q0,
        linalg::phase_diag(0.0, chi) * a2,
        linalg::phase_diag(0.0, eta) * b3,
    ]);
    let out = apply_local(state, &lu).expect("unitary factors");
    let a = out.amplitudes();
    let lambda = [a[0].norm(), a[4].norm(), a[5].norm(), a[6].norm(), a[7].norm()];
    let mut phi = if lambda[1] > 1e-12 { (a[4] * a[0].conj()).arg() } else { 0.0 };
    if (-1e-9..0.0).contains(&phi) {
        phi = 0.0;
    } else if phi < -PI + 1e-9 || phi > PI {
        phi = PI;
    }
    // absorb the residual global phase of λ0 into the qubit-0 factor
    let g = if a[0].norm() > 0.0 { a[0].conj() / a[0].norm() } else { ONE };
    let mut f = lu.factors().to_vec();
    f[0] *= g;
    AcinForm { lambda, phi, witness: LocalUnitary::from_factors(f), degenerate_root: false }
}

pub fn acin_standard_form(state: &PureState, tol: &Tolerances) -> Result<AcinForm> {
    require_genuine(state, tol.product)?;
    let (t0, t1) = slices(state);
    let (rows, degenerate) = null_rows(&t0, &t1);
    let forms: Vec<AcinForm> = rows.into_iter().map(|(u, v)| form_from_row(state, &t0, &t1, u, v)).collect();
    let in_range = |f: &AcinForm| f.phi >= 0.0 && f.phi <= PI;
    let pool: Vec<&AcinForm> = if forms.iter().any(in_range) {
        forms.iter().filter(|f| in_range(f)).collect()
    } else {
        forms.iter().collect()
    };
    let best = pool
        .into_iter()
        .reduce(|x, y| {
            if (x.lambda[0] - y.lambda[0]).abs() > 1e-12 {
                if x.lambda[0] >= y.lambda[0] { x } else { y }
            } else if x.phi <= y.phi {
                x
            } else {
                y
            }
        })
        .expect("at least one root");
    let mut form = best.clone();
    form.degenerate_root = degenerate;
    Ok(form)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantSet {
    pub j1: f64,
    pub j2: f64,
    pub j3: f64,
    pub j4: f64,
    pub j5: f64,
    pub j6: C64,
    pub sigma_plus: f64,
    pub sigma_minus: f64,
}

pub fn j_invariants(form: &AcinForm) -> InvariantSet {
    let [l0, l1, l2, l3, l4] = form.lambda;
    let e = C64::from_polar(1.0, form.phi);
    let j1 = (e * (l1 * l4) - l2 * l3).norm_sqr();
    let (s0, s2, s3, s4) = (l0 * l0, l2 * l2, l3 * l3, l4 * l4);
    let j2 = s0 * s2;
    let j3 = s0 * s3;
    let j4 = s0 * s4;
    let j5 = s0 * (j1 + s2 * s3 - l1 * l1 * s4);
    let inner = c(l4 * (1.0 - 2.0 * s0 - 2.0 * l1 * l1), 0.0) + e.conj() * (2.0 * l1 * l2 * l3);
    let j6 = inner * inner * (s0 * s0 * s4);
    let root = (1.0 - 4.0 * (j2 + j3 + j4)).max(0.0).sqrt();
    InvariantSet {
        j1,
        j2,
        j3,
        j4,
        j5,
        j6,
        sigma_plus: 0.5 * (1.0 + root),
        sigma_minus: 0.5 * (1.0 - root),
    }
}

/// Every quantity the classification needs, computed once.
#[derive(Clone, Debug)]
pub struct StateAnalysis {
    pub split: SchmidtSplit,
    pub tau: TauMatrix,
    pub form: CanonicalForm,
    pub acin: AcinForm,
    pub invariants: InvariantSet,
}

pub fn analyze_state(state: &PureState, tol: &Tolerances) -> Result<StateAnalysis> {
    let split = bipartite::schmidt_split(state, tol)?;
    let tau = bipartite::tau_matrix(&split);
    let form = canonical::canonical_decomposition(state, tol)?;
    let acin = acin_standard_form(state, tol)?;
    let invariants = j_invariants(&acin);
    Ok(StateAnalysis { split, tau, form, acin, invariants })
}

/// Outcome of each CLU test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CluEvidence {
    pub e1: f64,
    pub eof_c23: f64,
    pub eof_ca23: f64,
    /// E1 − 𝔈(C₂₃).
    pub gap_low: f64,
    /// 𝔈(C^a₂₃) − E1.
    pub gap_high: f64,
    pub extremality: bool,
    /// |Im c̃²|, or 0 when a phase choice making c̃ real exists trivially.
    pub ctilde_sq_imag: f64,
    pub ctilde_reality: bool,
    /// | |J5| − 2√(J1J2J3) |.
    pub eq23_residual: f64,
    /// |(J4+J5)² − 4(J1+J4)(J2+J4)(J3+J4)|.
    pub eq24_residual: f64,
    pub polynomial: bool,
    pub im_j6: f64,
    pub j6_reality: bool,
    /// All four tests return the same verdict.
    pub agree: bool,
}

impl CluEvidence {
    pub fn verdict(&self) -> bool {
        self.j6_reality
    }
}

pub fn clu_evidence_from(an: &StateAnalysis, tol: &Tolerances) -> CluEvidence {
    let p = &an.form.params;
    let e1 = bipartite::eof_clamped(2.0 * p.a * p.b());
    let (c23, ca23) = bipartite::concurrence_pair(&an.tau);
    let eof_c23 = bipartite::eof_clamped(c23);
    let eof_ca23 = bipartite::eof_clamped(ca23);
    let gap_low = e1 - eof_c23;
    let gap_high = eof_ca23 - e1;
    let extremality = gap_low.abs().min(gap_high.abs()) <= tol.clu;

    let tm = &an.tau;
    let ctilde_sq_imag = if an.split.degenerate || tm.c0 <= tol.omega || tm.c1 <= tol.omega {
        0.0
    } else {
        (tm.ctilde * tm.ctilde).im.abs()
    };
    let ctilde_reality = ctilde_sq_imag <= tol.lemma1;

    let j = &an.invariants;
    let eq23_residual = (j.j5.abs() - 2.0 * (j.j1 * j.j2 * j.j3).max(0.0).sqrt()).abs();
    let eq24_residual =
        ((j.j4 + j.j5).powi(2) - 4.0 * (j.j1 + j.j4) * (j.j2 + j.j4) * (j.j3 + j.j4)).abs();
    let polynomial = eq23_residual.min(eq24_residual) <= tol.poly;

    let im_j6 = j.j6.im.abs();
    let j6_reality = im_j6 <= tol.j6;
    let agree = extremality == j6_reality && ctilde_reality == j6_reality && polynomial == j6_reality;
    CluEvidence {
        e1,
        eof_c23,
        eof_ca23,
        gap_low,
        gap_high,
        extremality,
        ctilde_sq_imag,
        ctilde_reality,
        eq23_residual,
        eq24_residual,
        polynomial,
        im_j6,
        j6_reality,
        agree,
    }
}

/// Runs every CLU test without insisting that they agree.
pub fn clu_evidence(state: &PureState, tol: &Tolerances) -> Result<CluEvidence> {
    Ok(clu_evidence_from(&analyze_state(state, tol)?, tol))
}

/// CLU verdict (the J6 reality test). Fails if any other test disagrees.
pub fn is_clu(state: &PureState, tol: &Tolerances) -> Result<(bool, CluEvidence)> {
    let ev = clu_evidence(state, tol)?;
    if !ev.agree {
        return Err(Error::CluDisagreement(Box::new(ev)));
    }
    Ok((ev.verdict(), ev))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetTauSign {
    pub sign: i8,
    pub det: f64,
    /// False when some choice of eigenstates makes c̃ = 0, so the sign is not an invariant.
    pub well_defined: bool,
}

pub fn det_tau_sign_from(an: &StateAnalysis, clu: bool, tol: &Tolerances) -> Result<DetTauSign> {
    if !clu {
        return Err(Error::NotClu);
    }
    let tm = &an.tau;
    let p = an.split.p;
    let det = if an.split.degenerate {
        // p = 1/2 forces λ1 = 0, where τ is already real with det −J4
        -an.invariants.j4
    } else {
        let realness = if tm.ctilde.re.abs() >= tm.ctilde.im.abs() { 1.0 } else { -1.0 };
        p * (1.0 - p) * (realness * tm.c0 * tm.c1 - tm.ctilde.norm_sqr())
    };
    let tangle = bipartite::tangle(tm);
    let sign = if 4.0 * det.abs() <= tol.tangle { 0 } else if det > 0.0 { 1 } else { -1 };
    let well_defined = !(an.split.degenerate
        || tm.ctilde.norm() <= tol.omega
        || (an.invariants.j6.norm() <= tol.j6 && tangle > tol.tangle));
    Ok(DetTauSign { sign, det, well_defined })
}

/// Sign of det τ_r, the real form of τ reached by eigenvector phase choices.
pub fn det_tau_sign(state: &PureState, tol: &Tolerances) -> Result<DetTauSign> {
    let an = analyze_state(state, tol)?;
    let (clu, _) = checked_verdict(&an, tol)?;
    det_tau_sign_from(&an, clu, tol)
}

fn checked_verdict(an: &StateAnalysis, tol: &Tolerances) -> Result<(bool, CluEvidence)> {
    let ev = clu_evidence_from(an, tol);
    if !ev.agree {
        return Err(Error::CluDisagreement(Box::new(ev)));
    }
    Ok((ev.verdict(), ev))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subclass {
    #[serde(rename = "Class1_W")]
    Class1W,
    Class2,
    Class3,
    Class4,
    #[serde(rename = "NCLU")]
    Nclu,
}

impl Subclass {
    pub fn label(&self) -> &'static str {
        match self {
            Subclass::Class1W => "Class1_W",
            Subclass::Class2 => "Class2",
            Subclass::Class3 => "Class3",
            Subclass::Class4 => "Class4",
            Subclass::Nclu => "NCLU",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassEvidence {
    pub tangle: f64,
    pub j6: C64,
    pub clu: CluEvidence,
    pub det_tau: Option<DetTauSign>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassLabel {
    pub clu: bool,
    pub subclass: Subclass,
    pub evidence: ClassEvidence,
}

pub fn classify_from(an: &StateAnalysis, tol: &Tolerances) -> Result<ClassLabel> {
    let (clu, ev) = checked_verdict(an, tol)?;
    let tangle = bipartite::tangle(&an.tau);
    let j6 = an.invariants.j6;
    let (subclass, det_tau) = if !clu {
        (Subclass::Nclu, None)
    } else {
        let d = det_tau_sign_from(an, clu, tol)?;
        let sub = if tangle <= tol.tangle {
            Subclass::Class1W
        } else if j6.norm() <= tol.j6 {
            Subclass::Class4
        } else if j6.re > 0.0 {
            Subclass::Class2
        } else {
            Subclass::Class3
        };
        (sub, Some(d))
    };
    let consistent = match subclass {
        Subclass::Nclu => true,
        Subclass::Class1W => ev.gap_low.abs() <= tol.clu && ev.gap_high.abs() <= tol.clu,
        Subclass::Class2 | Subclass::Class4 => ev.gap_high.abs() <= tol.clu,
        Subclass::Class3 => ev.gap_low.abs() <= tol.clu,
    };
    if !consistent {
        return Err(Error::InconsistentClassification(format!(
            "{} with gaps ({:e}, {:e})",
            subclass.label(),
            ev.gap_low,
            ev.gap_high
        )));
    }
    Ok(ClassLabel { clu, subclass, evidence: ClassEvidence { tangle, j6, clu: ev, det_tau } })
}

pub fn classify(state: &PureState, tol: &Tolerances) -> Result<ClassLabel> {
    classify_from(&analyze_state(state, tol)?, tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LuEquivalence {
    pub equal: bool,
    pub conjugate_pair: bool,
}

pub fn invariants_equivalence(a: &InvariantSet, b: &InvariantSet, tol: &Tolerances) -> LuEquivalence {
    let t = tol.inv;
    let base = (a.j1 - b.j1).abs() <= t
        && (a.j2 - b.j2).abs() <= t
        && (a.j3 - b.j3).abs() <= t
        && (a.j4 - b.j4).abs() <= t
        && (a.j5 - b.j5).abs() <= t;
    let equal = base && (a.j6 - b.j6).norm() <= t;
    let conjugate_pair = base && !equal && (a.j6 - b.j6.conj()).norm() <= t && a.j6.im.abs() > tol.j6;
    LuEquivalence { equal, conjugate_pair }
}

pub fn lu_equivalent(s1: &PureState, s2: &PureState, tol: &Tolerances) -> Result<LuEquivalence> {
    let a = j_invariants(&acin_standard_form(s1, tol)?);
    let b = j_invariants(&acin_standard_form(s2, tol)?);
    Ok(invariants_equivalence(&a, &b, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn ghz_standard_form() {
        let f = acin_standard_form(&PureState::ghz(), &tol()).unwrap();
        let want = [FRAC_1_SQRT_2, 0.0, 0.0, 0.0, FRAC_1_SQRT_2];
        for k in 0..5 {
            assert!((f.lambda[k] - want[k]).abs() < 1e-12, "{:?}", f.lambda);
        }
        assert_eq!(f.phi, 0.0);
        let j = j_invariants(&f);
        assert!((j.j4 - 0.25).abs() < 1e-12);
        assert!(j.j1.abs() < 1e-12 && j.j2.abs() < 1e-12 && j.j3.abs() < 1e-12 && j.j5.abs() < 1e-12);
        assert!(j.j6.norm() < 1e-12);
        assert!((j.sigma_plus - 0.5).abs() < 1e-12 && (j.sigma_minus - 0.5).abs() < 1e-12);
    }

    #[test]
    fn w_standard_form() {
        let f = acin_standard_form(&PureState::w(), &tol()).unwrap();
        let r = 1.0 / 3f64.sqrt();
        let want = [r, 0.0, r, r, 0.0];
        for k in 0..5 {
            assert!((f.lambda[k] - want[k]).abs() < 1e-12, "{:?}", f.lambda);
        }
        assert!(j_invariants(&f).j4.abs() < 1e-12);
    }

    #[test]
    fn witness_round_trip() {
        for seed in 0..200 {
            let s = crate::sampling::haar_state(3, seed).unwrap();
            let f = acin_standard_form(&s, &tol()).unwrap();
            let rotated = apply_local(&s, &f.witness).unwrap();
            assert!(rotated.phase_distance(&f.state()) < 1e-9, "seed {seed}");
            assert!((0.0..=PI).contains(&f.phi));
        }
    }

    #[test]
    fn fixture_classes() {
        let t = tol();
        let w = classify(&PureState::w(), &t).unwrap();
        assert_eq!(w.subclass, Subclass::Class1W);
        let g = classify(&PureState::ghz(), &t).unwrap();
        assert_eq!(g.subclass, Subclass::Class4);
        let d = det_tau_sign(&PureState::ghz(), &t).unwrap();
        assert_eq!(d.sign, -1);
        assert!(!d.well_defined);
        assert!((d.det + 0.25).abs() < 1e-12);
    }

    #[test]
    fn conjugates_pair_up() {
        let t = tol();
        let s = crate::sampling::haar_state(3, 3).unwrap();
        let eq = lu_equivalent(&s, &s.conj(), &t).unwrap();
        assert_eq!(eq, LuEquivalence { equal: false, conjugate_pair: true });
        let eq = lu_equivalent(&PureState::ghz(), &PureState::w(), &t).unwrap();
        assert_eq!(eq, LuEquivalence { equal: false, conjugate_pair: false });
    }
}
