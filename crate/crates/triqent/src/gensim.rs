//! Gate teleportation of the two controlled gates of the canonical form:
//! each party consumes a CJ resource with Bell measurements, and every one
//! of the 256 outcome branches lands in S_ψ.

use serde::{Deserialize, Serialize};

use crate::canonical::FormParams;
use crate::classify::{acin_standard_form, invariants_equivalence, j_invariants, InvariantSet};
use crate::error::{Error, Result};
use crate::linalg::{self, c, unitarity_defect, Mat2, C64, ZERO};
use crate::measures::{cj_state_of, s_psi_set};
use crate::state::PureState;
use crate::tolerance::Tolerances;

/// |0⟩⟨0| ⊗ 1 + |1⟩⟨1| ⊗ U on (control, target).
#[derive(Clone, Debug)]
pub struct ControlledGate {
    pub control: usize,
    pub target: usize,
    pub u: Mat2,
}

impl ControlledGate {
    pub fn new(control: usize, target: usize, u: Mat2) -> Result<Self> {
        if control == target {
            return Err(Error::QubitSelection("control and target coincide".into()));
        }
        let defect = unitarity_defect(&u);
        if defect > 1e-9 {
            return Err(Error::NonUnitary { index: target, defect });
        }
        Ok(ControlledGate { control, target, u })
    }

    pub fn apply(&self, state: &PureState) -> Result<PureState> {
        let n = state.n_qubits();
        if self.control >= n || self.target >= n {
            return Err(Error::QubitSelection(format!("gate on ({}, {}) for {n} qubits", self.control, self.target)));
        }
        let mut out = state.clone();
        out.apply_controlled(self.control, self.target, &self.u);
        Ok(out)
    }
}

/// Resource state of a controlled gate, qubits ordered (c, c′, t, t′); the
/// gate acts on c and t, while c′ and t′ are the ports to Bell-measure.
pub fn cj_state(gate: &ControlledGate) -> PureState {
    cj_state_of(&gate.u)
}

/// Bell vector (1 ⊗ σk)|φ⁺⟩: k = 0, 1, 2, 3 give φ⁺, ψ⁺, ψ⁻ (up to phase), φ⁻.
fn bell_component(k: u8, x: usize, y: usize) -> C64 {
    linalg::pauli(k as usize)[(y, x)] * std::f64::consts::FRAC_1_SQRT_2
}

#[derive(Clone, Debug)]
pub struct BellProjection {
    pub probability: f64,
    /// None when the outcome has probability below 1e-14.
    pub post_state: Option<PureState>,
}

/// Projects qubits `pair` onto Bell outcome `outcome` and removes them.
pub fn bell_project(state: &PureState, pair: (usize, usize), outcome: u8) -> Result<BellProjection> {
    let n = state.n_qubits();
    let (q1, q2) = pair;
    if q1 == q2 || q1 >= n || q2 >= n || n < 3 {
        return Err(Error::QubitSelection(format!("Bell pair {pair:?} on {n} qubits")));
    }
    if outcome > 3 {
        return Err(Error::QubitSelection(format!("Bell outcome {outcome} is not in 0..4")));
    }
    let bit = |q: usize| 1usize << (n - 1 - q);
    let rest: Vec<usize> = (0..n).filter(|&q| q != q1 && q != q2).collect();
    let amps = state.amplitudes();
    let mut out = vec![ZERO; 1 << rest.len()];
    for (r, slot) in out.iter_mut().enumerate() {
        let mut base = 0;
        for (k, &q) in rest.iter().enumerate() {
            if r & (1 << (rest.len() - 1 - k)) != 0 {
                base |= bit(q);
            }
        }
        for x in 0..2 {
            for y in 0..2 {
                let idx = base | if x == 1 { bit(q1) } else { 0 } | if y == 1 { bit(q2) } else { 0 };
                *slot += bell_component(outcome, x, y).conj() * amps[idx];
            }
        }
    }
    let probability: f64 = out.iter().map(|z| z.norm_sqr()).sum();
    if probability < 1e-14 {
        return Ok(BellProjection { probability: 0.0, post_state: None });
    }
    let norm = probability.sqrt();
    let post = PureState::from_raw(out.into_iter().map(|z| z / norm).collect());
    Ok(BellProjection { probability, post_state: Some(post) })
}

/// Teleports the controlled gate `u` from qubit `ctrl` onto qubit `tgt` of a
/// 3-qubit state; returns the branch for Bell outcomes (k_ctrl, k_tgt).
fn teleport_gate(state: &PureState, u: &Mat2, ctrl: usize, tgt: usize, k: (u8, u8)) -> Result<(f64, PureState)> {
    // labels 0..3 are the system, then c, c′, t, t′ of the resource
    let joint = state.tensor(&cj_state_of(u));
    let first = bell_project(&joint, (ctrl, 4), k.0)?;
    let s1 = first.post_state.ok_or_else(|| Error::Numerical("vanishing Bell branch".into()))?;
    let mut labels: Vec<usize> = (0..7).filter(|&q| q != ctrl && q != 4).collect();
    let pos = |labels: &[usize], q: usize| labels.iter().position(|&l| l == q).expect("live label");
    let second = bell_project(&s1, (pos(&labels, tgt), pos(&labels, 6)), k.1)?;
    let s2 = second.post_state.ok_or_else(|| Error::Numerical("vanishing Bell branch".into()))?;
    labels.retain(|&q| q != tgt && q != 6);
    // outputs: c (label 3) replaces ctrl, t (label 5) replaces tgt
    let order: Vec<usize> = (0..3)
        .map(|q| {
            let want = if q == ctrl { 3 } else if q == tgt { 5 } else { q };
            pos(&labels, want)
        })
        .collect();
    Ok((first.probability * second.probability, s2.permute_qubits(&order)?))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GenerationOutcome {
    /// Bell outcomes (party 0 and 1 for the first gate, party 0 and 2 for the second).
    pub bell_results: [u8; 4],
    pub probability: f64,
    #[serde(skip)]
    pub final_state: Option<PureState>,
    /// Member of S_ψ whose LU class contains the final state.
    pub s_psi_index: usize,
}

/// Probability collected by one LU class of S_ψ members.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassWeight {
    pub members: Vec<usize>,
    pub probability: f64,
    pub expected: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Generation {
    pub outcomes: Vec<GenerationOutcome>,
    pub classes: Vec<ClassWeight>,
    pub total_probability: f64,
}

impl Generation {
    /// Largest deviation of a single outcome from 1/256.
    pub fn worst_outcome_deviation(&self) -> f64 {
        self.outcomes.iter().map(|o| (o.probability - 1.0 / 256.0).abs()).fold(0.0, f64::max)
    }

    /// Largest deviation of a class weight from its share of 1/4 per member.
    pub fn worst_class_deviation(&self) -> f64 {
        self.classes.iter().map(|w| (w.probability - w.expected).abs()).fold(0.0, f64::max)
    }
}

/// Runs both gate teleportations for every combination of Bell outcomes.
pub fn enumerate_generation(f: &FormParams, tol: &Tolerances) -> Result<Generation> {
    let set = s_psi_set(f);
    let member_inv: Vec<InvariantSet> = set
        .members
        .iter()
        .map(|m| acin_standard_form(m, tol).map(|a| j_invariants(&a)))
        .collect::<Result<_>>()?;

    // group members into LU classes
    let mut class_of = [usize::MAX; 4];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for n in 0..4 {
        let found = classes
            .iter()
            .position(|cl| invariants_equivalence(&member_inv[cl[0]], &member_inv[n], tol).equal);
        match found {
            Some(k) => {
                classes[k].push(n);
                class_of[n] = k;
            }
            None => {
                class_of[n] = classes.len();
                classes.push(vec![n]);
            }
        }
    }

    let plus = PureState::from_raw(vec![c(std::f64::consts::FRAC_1_SQRT_2, 0.0); 2]);
    let input = plus.tensor(&f.psi_s());
    let (u2, u3) = (f.u2(), f.u3());

    let mut outcomes = Vec::with_capacity(256);
    let mut weights = vec![0.0; classes.len()];
    for k0 in 0..4u8 {
        for k1 in 0..4u8 {
            let (p1, mid) = teleport_gate(&input, &u2, 0, 1, (k0, k1))?;
            for k2 in 0..4u8 {
                for k3 in 0..4u8 {
                    let (p2, fin) = teleport_gate(&mid, &u3, 0, 2, (k2, k3))?;
                    let results = [k0, k1, k2, k3];
                    let inv = j_invariants(&acin_standard_form(&fin, tol)?);
                    let hit = (0..4)
                        .find(|&n| invariants_equivalence(&member_inv[n], &inv, tol).equal)
                        .or_else(|| (0..4).find(|&n| invariants_equivalence(&member_inv[n], &inv, tol).conjugate_pair))
                        .ok_or(Error::ClosureViolation(results))?;
                    let probability = p1 * p2;
                    weights[class_of[hit]] += probability;
                    outcomes.push(GenerationOutcome {
                        bell_results: results,
                        probability,
                        final_state: Some(fin),
                        s_psi_index: hit,
                    });
                }
            }
        }
    }
    let total_probability = outcomes.iter().map(|o| o.probability).sum();
    let classes = classes
        .into_iter()
        .zip(weights)
        .map(|(members, probability)| ClassWeight { expected: members.len() as f64 / 4.0, members, probability })
        .collect();
    Ok(Generation { outcomes, classes, total_probability })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::canonical_decomposition;
    use crate::sampling::haar_state;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    #[test]
    fn bell_basics() {
        let r = c(FRAC_1_SQRT_2, 0.0);
        // |0⟩ ⊗ φ⁺
        let s = PureState::new(vec![r, ZERO, ZERO, r, ZERO, ZERO, ZERO, ZERO]).unwrap();
        let b = bell_project(&s, (1, 2), 0).unwrap();
        assert!((b.probability - 1.0).abs() < 1e-12);
        let b = bell_project(&s, (1, 2), 3).unwrap();
        assert!(b.probability < 1e-14 && b.post_state.is_none());
        let s = PureState::basis(3, 0).unwrap();
        let total: f64 = (0..4).map(|k| bell_project(&s, (0, 1), k).unwrap().probability).sum();
        assert!((bell_project(&s, (0, 1), 0).unwrap().probability - 0.5).abs() < 1e-12);
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_teleportation() {
        // qubit 0 of a 2-qubit input crosses a φ⁺ pair; outcome k leaves σk times it
        let input = haar_state(2, 9).unwrap();
        let r = c(FRAC_1_SQRT_2, 0.0);
        let pair = PureState::new(vec![r, ZERO, ZERO, r]).unwrap();
        let joint = input.tensor(&pair);
        for k in 0..4u8 {
            let b = bell_project(&joint, (0, 2), k).unwrap();
            assert!((b.probability - 0.25).abs() < 1e-12);
            let mut out = b.post_state.unwrap().permute_qubits(&[1, 0]).unwrap();
            out.apply_single(0, &linalg::pauli(k as usize));
            assert!(out.phase_distance(&input) < 1e-12, "outcome {k}");
        }
    }

    #[test]
    fn controlled_gates_on_shared_control_commute() {
        let s = haar_state(3, 4).unwrap();
        let g2 = ControlledGate::new(0, 1, crate::sampling::haar_unitary(1)).unwrap();
        let g3 = ControlledGate::new(0, 2, crate::sampling::haar_unitary(2)).unwrap();
        let x = g3.apply(&g2.apply(&s).unwrap()).unwrap();
        let y = g2.apply(&g3.apply(&s).unwrap()).unwrap();
        assert!(x.phase_distance(&y) < 1e-12);
    }

    #[test]
    fn ghz_generation() {
        let tol = Tolerances::default();
        let f = FormParams::new(FRAC_1_SQRT_2, FRAC_PI_2, 0.0, 0.0, 0.0);
        let g = enumerate_generation(&f, &tol).unwrap();
        assert_eq!(g.outcomes.len(), 256);
        assert!(g.worst_outcome_deviation() < 1e-12);
        assert_eq!(g.classes.len(), 1);
        assert!((g.total_probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nclu_generation_hits_four_members() {
        let tol = Tolerances::default();
        let s = haar_state(3, 21).unwrap();
        let f = canonical_decomposition(&s, &tol).unwrap().params;
        let g = enumerate_generation(&f, &tol).unwrap();
        assert_eq!(g.classes.len(), 4);
        assert!(g.worst_class_deviation() < 1e-12);
        assert!(g.worst_outcome_deviation() < 1e-12);
    }
}
