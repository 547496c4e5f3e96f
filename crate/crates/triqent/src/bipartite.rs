//! Two-qubit entanglement and the 0|12 Schmidt / τ machinery.

use crate::error::{Error, Result};
use crate::linalg::{self, binary_entropy, Mat2, C64, ZERO};
use crate::state::{require_genuine, LocalUnitary, PureState};
use crate::tolerance::Tolerances;

/// ψᵀ (σy⊗σy) φ for two-qubit amplitude vectors, i.e. ⟨ψ̃|φ⟩ when φ = ψ.
pub fn spin_flip_form(psi: &[C64], phi: &[C64]) -> C64 {
    -psi[0] * phi[3] + psi[1] * phi[2] + psi[2] * phi[1] - psi[3] * phi[0]
}

/// σy⊗σy |ψ*⟩.
pub fn spin_flip(state: &PureState) -> Result<PureState> {
    state.expect_qubits(2)?;
    let a = state.amplitudes();
    Ok(PureState::from_raw(vec![-a[3].conj(), a[2].conj(), a[1].conj(), -a[0].conj()]))
}

/// |⟨ψ̃|ψ⟩|.
pub fn concurrence_pure(state: &PureState) -> Result<f64> {
    state.expect_qubits(2)?;
    let a = state.amplitudes();
    Ok(spin_flip_form(a, a).norm().min(1.0))
}

/// Entanglement of formation as a function of concurrence,
/// h((1 + √(1 − C²))/2).
pub fn eof(conc: f64) -> Result<f64> {
    if !(-1e-9..=1.0 + 1e-9).contains(&conc) {
        return Err(Error::ConcurrenceRange(conc));
    }
    Ok(eof_clamped(conc))
}

pub(crate) fn eof_clamped(conc: f64) -> f64 {
    let cc = conc.clamp(0.0, 1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - cc * cc).max(0.0).sqrt()))
}

/// Inverse of [`eof`] on [0, 1].
pub fn eof_inv(e: f64) -> f64 {
    let x = linalg::binary_entropy_inv(e);
    2.0 * (x * (1.0 - x)).sqrt()
}

/// Normal form √p|0⟩ψ0 + √(1−p)|1⟩ψ1 of the 0|12 split.
#[derive(Clone, Debug)]
pub struct SchmidtSplit {
    pub p: f64,
    pub psi0: PureState,
    pub psi1: PureState,
    /// Unitary on qubit 0 (identity on qubits 1, 2) taking the input to the normal form.
    pub witness: LocalUnitary,
    pub degenerate: bool,
}

impl SchmidtSplit {
    pub fn qubit0_witness(&self) -> Mat2 {
        self.witness.factors()[0]
    }

    /// The normal form state itself.
    pub fn normal_form(&self) -> PureState {
        let sp = self.p.sqrt();
        let sq = (1.0 - self.p).max(0.0).sqrt();
        let mut amps = Vec::with_capacity(8);
        amps.extend(self.psi0.amplitudes().iter().map(|a| a * sp));
        amps.extend(self.psi1.amplitudes().iter().map(|a| a * sq));
        PureState::from_raw(amps)
    }
}

fn rows_times(w: &Mat2, m: &[[C64; 4]; 2]) -> [[C64; 4]; 2] {
    let mut out = [[ZERO; 4]; 2];
    for (k, row) in out.iter_mut().enumerate() {
        for (col, x) in row.iter_mut().enumerate() {
            *x = w[(k, 0)] * m[0][col] + w[(k, 1)] * m[1][col];
        }
    }
    out
}

pub fn schmidt_split(state: &PureState, tol: &Tolerances) -> Result<SchmidtSplit> {
    require_genuine(state, tol.product)?;
    let a = state.amplitudes();
    let m = [[a[0], a[1], a[2], a[3]], [a[4], a[5], a[6], a[7]]];
    let mut rho = Mat2::zeros();
    for i in 0..2 {
        for j in 0..2 {
            rho[(i, j)] = (0..4).map(|k| m[i][k] * m[j][k].conj()).sum();
        }
    }
    let eig = linalg::herm_eig2(&rho);
    let degenerate = (eig.values[0] - 0.5).abs() <= tol.degenerate;
    let mut w = eig.vectors.adjoint();
    if degenerate {
        // Any orthonormal pair spans the eigenspace; pick the one that makes τ diagonal.
        let chi = rows_times(&w, &m);
        let mut tau = Mat2::zeros();
        for i in 0..2 {
            for j in 0..2 {
                tau[(i, j)] = spin_flip_form(&chi[i], &chi[j]);
            }
        }
        tau = (tau + tau.transpose()) * C64::new(0.5, 0.0);
        let (v, _) = linalg::takagi2(&tau);
        w = v * w;
    }
    let chi = rows_times(&w, &m);
    let mut probs = [0.0; 2];
    let mut psis: [Vec<C64>; 2] = [Vec::new(), Vec::new()];
    for k in 0..2 {
        let pk: f64 = chi[k].iter().map(|z| z.norm_sqr()).sum();
        probs[k] = pk;
        let scale = 1.0 / pk.sqrt();
        let mut psi: Vec<C64> = chi[k].iter().map(|z| z * scale).collect();
        let ck = spin_flip_form(&psi, &psi);
        let theta = if ck.norm() > 1e-12 {
            -0.5 * ck.arg()
        } else {
            let first = psi.iter().find(|z| z.norm() > 1e-12).copied().unwrap_or(C64::new(1.0, 0.0));
            -first.arg()
        };
        let ph = C64::from_polar(1.0, theta);
        for z in psi.iter_mut() {
            *z *= ph;
        }
        w[(k, 0)] *= ph;
        w[(k, 1)] *= ph;
        psis[k] = psi;
    }
    let [psi0, psi1] = psis;
    Ok(SchmidtSplit {
        p: probs[0].clamp(0.5, 1.0),
        psi0: PureState::from_raw(psi0),
        psi1: PureState::from_raw(psi1),
        witness: LocalUnitary::from_factors(vec![w, linalg::identity(), linalg::identity()]),
        degenerate,
    })
}

/// τ_ij = √(p_i p_j) ψ_iᵀ(σy⊗σy)ψ_j together with its scalar shorthand.
#[derive(Clone, Debug)]
pub struct TauMatrix {
    pub p: f64,
    pub c0: f64,
    pub c1: f64,
    pub ctilde: C64,
    pub tau: Mat2,
    /// Singular values, descending.
    pub s: [f64; 2],
}

impl TauMatrix {
    pub fn det(&self) -> C64 {
        linalg::det(&self.tau)
    }
}

pub fn tau_matrix(split: &SchmidtSplit) -> TauMatrix {
    let p = split.p;
    let q = 1.0 - p;
    let a0 = split.psi0.amplitudes();
    let a1 = split.psi1.amplitudes();
    let c0z = spin_flip_form(a0, a0);
    let c1z = spin_flip_form(a1, a1);
    let ctilde = spin_flip_form(a0, a1);
    let off = ctilde * (p * q).sqrt();
    let tau = Mat2::new(c0z * p, off, off, c1z * q);
    TauMatrix {
        p,
        c0: c0z.re.max(0.0),
        c1: c1z.re.max(0.0),
        ctilde,
        s: linalg::singular_values(&tau),
        tau,
    }
}

/// (C₂₃, C^a₂₃) = (s1 − s2, s1 + s2).
pub fn concurrence_pair(tm: &TauMatrix) -> (f64, f64) {
    ((tm.s[0] - tm.s[1]).clamp(0.0, 1.0), (tm.s[0] + tm.s[1]).clamp(0.0, 1.0))
}

/// Three-way tangle 4|det τ|.
pub fn tangle(tm: &TauMatrix) -> f64 {
    (4.0 * tm.det().norm()).min(1.0)
}
