//! Canonical decomposition (|0⟩|ψs⟩ + |1⟩ U2⊗U3 |ψs⟩)/√2 with
//! ψs = a|00⟩ + b|11⟩, U2 = Z(α)Y(β)Z(γ) and U3 = Y(β′).

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use serde::{Deserialize, Serialize};

use crate::bipartite::{self, SchmidtSplit, TauMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, c, pauli, reduce_half_turn, y_rot, z_rot, Mat2, C64, ZERO};
use crate::state::{apply_local, LocalUnitary, PureState};
use crate::tolerance::Tolerances;

/// Angles within this distance of 0 or π/2 are snapped and gauge-fixed.
const GAUGE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OmegaCase {
    Generic,
    /// c0 = c1 = 0.
    I,
    /// p c0 = (1−p) c1 ≠ 0 and arg c̃ = ±π/2.
    Ii,
    /// c̃ = 0.
    Iii,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Omega {
    pub value: f64,
    pub case: OmegaCase,
}

/// Phase ω of the qubit-0 measurement that splits the state into two equally
/// entangled branches.
pub fn solve_omega(tm: &TauMatrix, p: f64, tol: &Tolerances) -> Omega {
    let eps = tol.omega;
    let q = 1.0 - p;
    let case = if tm.c0 <= eps && tm.c1 <= eps {
        Some(OmegaCase::I)
    } else if tm.ctilde.norm() <= eps {
        Some(OmegaCase::Iii)
    } else if (p * tm.c0 - q * tm.c1).abs() <= eps && tm.ctilde.arg().cos().abs() <= eps {
        Some(OmegaCase::Ii)
    } else {
        None
    };
    if let Some(case) = case {
        // cases ii and iii: C(ψs)² grows with cos 2ω, so ω = 0 is maximal;
        // case i: C(ψs) does not depend on ω
        return Omega { value: 0.0, case };
    }
    let theta = tm.ctilde.arg();
    let num = (p * tm.c0 + q * tm.c1) * theta.cos();
    let den = (p * tm.c0 - q * tm.c1) * theta.sin();
    let mut w = num.atan2(den).rem_euclid(std::f64::consts::PI);
    if w >= std::f64::consts::PI {
        w = 0.0;
    }
    Omega { value: w, case: OmegaCase::Generic }
}

/// The five canonical parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormParams {
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub beta_prime: f64,
}

impl FormParams {
    pub fn new(a: f64, alpha: f64, beta: f64, gamma: f64, beta_prime: f64) -> Self {
        FormParams { a, alpha, beta, gamma, beta_prime }
    }

    pub fn b(&self) -> f64 {
        (1.0 - self.a * self.a).max(0.0).sqrt()
    }

    pub fn angles(&self) -> Angles {
        Angles { alpha: self.alpha, beta: self.beta, gamma: self.gamma, beta_prime: self.beta_prime }
    }

    pub fn with_angles(&self, t: Angles) -> Self {
        FormParams::new(self.a, t.alpha, t.beta, t.gamma, t.beta_prime)
    }

    pub fn u2(&self) -> Mat2 {
        z_rot(self.alpha) * y_rot(self.beta) * z_rot(self.gamma)
    }

    pub fn u3(&self) -> Mat2 {
        y_rot(self.beta_prime)
    }

    /// a|00⟩ + b|11⟩.
    pub fn psi_s(&self) -> PureState {
        PureState::from_raw(vec![c(self.a, 0.0), ZERO, ZERO, c(self.b(), 0.0)])
    }

    pub fn is_max_entangled(&self, tol: f64) -> bool {
        (self.a - self.b()).abs() <= tol
    }

    /// Checks the canonical ranges with a 1e-9 margin.
    pub fn validate(&self) -> Result<()> {
        let m = 1e-9;
        let check = |name, value: f64, lo: f64, hi: f64| {
            if value.is_finite() && value >= lo - m && value <= hi + m {
                Ok(())
            } else {
                Err(Error::ParameterRange { name, value })
            }
        };
        check("a", self.a, FRAC_1_SQRT_2, 1.0 - 1e-12)?;
        if self.a > 1.0 - 1e-12 {
            return Err(Error::ParameterRange { name: "a", value: self.a });
        }
        check("alpha", self.alpha, -FRAC_PI_2, FRAC_PI_2)?;
        check("gamma", self.gamma, -FRAC_PI_2, FRAC_PI_2)?;
        check("beta", self.beta, 0.0, FRAC_PI_2)?;
        check("beta_prime", self.beta_prime, 0.0, FRAC_PI_2)
    }
}

/// The four angles (α, β, γ, β′).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Angles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub beta_prime: f64,
}

impl Angles {
    pub fn new(alpha: f64, beta: f64, gamma: f64, beta_prime: f64) -> Self {
        Angles { alpha, beta, gamma, beta_prime }
    }
}

#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub params: FormParams,
    pub omega: Omega,
    /// True iff a = b, where U2 = Z(α) and U3 = 1 are used.
    pub max_entangled_convention: bool,
    /// Local unitary taking the input to `reconstruct_state(params)` up to a global phase.
    pub witness: LocalUnitary,
    /// |E(x0) − E(x1)| of the two measured branches.
    pub branch_gap: f64,
}

/// Builds (|0⟩ψs + |1⟩U2⊗U3ψs)/√2.
pub fn reconstruct_state(params: &FormParams) -> Result<PureState> {
    params.validate()?;
    Ok(literal_state(params))
}

pub(crate) fn literal_state(params: &FormParams) -> PureState {
    let psi = params.psi_s();
    let mut branch = psi.clone();
    branch.apply_single(0, &params.u2());
    branch.apply_single(1, &params.u3());
    let r = c(FRAC_1_SQRT_2, 0.0);
    let mut amps: Vec<C64> = psi.amplitudes().iter().map(|z| z * r).collect();
    amps.extend(branch.amplitudes().iter().map(|z| z * r));
    PureState::from_raw(amps)
}

/// Canonical-range representative of the LU class of `raw`, reached only by
/// the LU moves (α, −β, γ, −β′), (α ± π/2, −β, γ ∓ π/2, β′), (−γ, −β, −α, −β′)
/// and π shifts of single angles.
pub fn canonicalize_params(raw: Angles) -> Angles {
    Tracker::new(raw).canonicalize()
}

/// Angles plus the accumulated LU (acting on qubits 0, 1, 2 of the literal form).
struct Tracker {
    t: Angles,
    moves: [Mat2; 3],
}

fn is_near(x: f64, target: f64) -> bool {
    (x - target).abs() <= GAUGE_TOL
}

impl Tracker {
    fn new(t: Angles) -> Self {
        Tracker { t, moves: [linalg::identity(); 3] }
    }

    fn push(&mut self, m: [Mat2; 3]) {
        for k in 0..3 {
            self.moves[k] = m[k] * self.moves[k];
        }
    }

    fn flip_branch(&mut self) {
        let z = pauli(3);
        self.moves[0] = z * self.moves[0];
    }

    fn reduce(&mut self, which: usize) {
        let slot = match which {
            0 => &mut self.t.alpha,
            1 => &mut self.t.beta,
            2 => &mut self.t.gamma,
            _ => &mut self.t.beta_prime,
        };
        let (r, odd) = reduce_half_turn(*slot);
        *slot = r;
        if odd {
            self.flip_branch();
        }
    }

    /// (α, β, γ, β′) → (α, −β, γ, −β′) via 1⊗σz⊗σz.
    fn t1(&mut self) {
        self.t.beta = -self.t.beta;
        self.t.beta_prime = -self.t.beta_prime;
        self.push([linalg::identity(), pauli(3), pauli(3)]);
    }

    /// (α, β, γ) → (α + π/2, −β, γ − π/2); the operator is unchanged.
    fn t2(&mut self) {
        self.t.alpha += FRAC_PI_2;
        self.t.beta = -self.t.beta;
        self.t.gamma -= FRAC_PI_2;
    }

    /// (α, β, γ, β′) → (−γ, −β, −α, −β′) via σx ⊗ U2† ⊗ U3†.
    fn t3(&mut self) {
        let u2 = z_rot(self.t.alpha) * y_rot(self.t.beta) * z_rot(self.t.gamma);
        let u3 = y_rot(self.t.beta_prime);
        self.push([pauli(1), u2.adjoint(), u3.adjoint()]);
        self.t = Angles::new(-self.t.gamma, -self.t.beta, -self.t.alpha, -self.t.beta_prime);
    }

    /// Swap the roles of α and γ while keeping β, β′ signs.
    fn swap(&mut self) {
        self.t3();
        self.t1();
        self.reduce(0);
        self.reduce(2);
    }

    /// LU (1, Z(ξ), Z(−ξ)) fixes ψs. With β′ = 0 it maps (α, γ) → (α + ξ, γ − ξ),
    /// with β′ = π/2 it maps (α, γ) → (α + ξ, γ + ξ).
    fn shift(&mut self, xi: f64) {
        self.push([linalg::identity(), z_rot(xi), z_rot(-xi)]);
        self.t.alpha += xi;
        if self.t.beta_prime == 0.0 {
            self.t.gamma -= xi;
        } else {
            self.t.gamma += xi;
        }
    }

    /// Gauge fixing on β, β′ ∈ {0, π/2}. Returns true if only α + γ (not α − γ)
    /// survives, in which case the sign of α is itself a gauge.
    fn fold(&mut self) -> bool {
        let t = &mut self.t;
        for x in [&mut t.beta, &mut t.beta_prime] {
            if is_near(*x, 0.0) {
                *x = 0.0;
            } else if is_near(*x, FRAC_PI_2) {
                *x = FRAC_PI_2;
            }
        }
        let (b, bp) = (self.t.beta, self.t.beta_prime);
        let b_edge = b == 0.0 || b == FRAC_PI_2;
        let bp_edge = bp == 0.0 || bp == FRAC_PI_2;
        match (b_edge, bp_edge) {
            (true, true) if (b == 0.0) != (bp == 0.0) => {
                // only a combination that the qubit-2/3 gauge can cancel
                let xi = if bp == FRAC_PI_2 {
                    -0.5 * (self.t.alpha + self.t.gamma)
                } else {
                    -0.5 * (self.t.alpha - self.t.gamma)
                };
                self.shift(xi);
                self.t.alpha = 0.0;
                self.t.gamma = 0.0;
                false
            }
            (true, _) if b == 0.0 => {
                self.t.alpha += self.t.gamma;
                self.t.gamma = 0.0;
                true
            }
            (true, _) => {
                self.t.alpha -= self.t.gamma;
                self.t.gamma = 0.0;
                false
            }
            (false, true) if bp == 0.0 => {
                let g = self.t.gamma;
                self.shift(g);
                self.t.gamma = 0.0;
                true
            }
            (false, true) => {
                let g = self.t.gamma;
                self.shift(-g);
                self.t.gamma = 0.0;
                false
            }
            (false, false) => false,
        }
    }

    fn canonicalize(mut self) -> Angles {
        self.run();
        self.t
    }

    fn run(&mut self) {
        self.reduce(3);
        if self.t.beta_prime < 0.0 {
            self.t1();
        }
        self.reduce(1);
        if self.t.beta < 0.0 {
            self.t2();
        }
        self.reduce(0);
        self.reduce(2);
        let (aa, ag) = (self.t.alpha.abs(), self.t.gamma.abs());
        if aa < ag - 1e-12 || ((aa - ag).abs() <= 1e-12 && (self.t.alpha - self.t.gamma).abs() <= 1e-12 && self.t.alpha < 0.0) {
            self.swap();
        }
        let sum_gauge = self.fold();
        self.reduce(0);
        if sum_gauge && self.t.alpha < 0.0 && self.t.alpha != -FRAC_PI_2 {
            // α and −α are equivalent here: swap, then fold again.
            self.swap();
            self.fold();
            self.reduce(0);
        }
        if self.t.alpha == 0.0 {
            self.t.alpha = 0.0; // normalize −0
        }
        if self.t.gamma == 0.0 {
            self.t.gamma = 0.0;
        }
    }
}

/// Witness-rotated pair of branch states.
struct Branches {
    x0: Mat2,
    x1: Mat2,
    lu: [Mat2; 3],
}

fn coeff(v: &[C64]) -> Mat2 {
    linalg::mat2(v[0], v[1], v[2], v[3])
}

fn branches(split: &SchmidtSplit, omega: f64) -> Branches {
    let p = split.p;
    let sp = p.sqrt();
    let sq = (1.0 - p).max(0.0).sqrt();
    let e = C64::from_polar(1.0, omega);
    let a0 = split.psi0.amplitudes();
    let a1 = split.psi1.amplitudes();
    let x0: Vec<C64> = a0.iter().zip(a1).map(|(u, v)| u * sp + e * v * sq).collect();
    let x1: Vec<C64> = a0.iter().zip(a1).map(|(u, v)| -e.conj() * u * sp + v * sq).collect();
    let r = c(FRAC_1_SQRT_2, 0.0);
    let meas = linalg::mat2(r, e * r, -e.conj() * r, r);
    Branches {
        x0: coeff(&x0),
        x1: coeff(&x1),
        lu: [meas * split.qubit0_witness(), linalg::identity(), linalg::identity()],
    }
}

pub fn canonical_decomposition(state: &PureState, tol: &Tolerances) -> Result<CanonicalForm> {
    let split = bipartite::schmidt_split(state, tol)?;
    let tm = bipartite::tau_matrix(&split);
    let omega = solve_omega(&tm, split.p, tol);
    decompose_with(state, &split, omega, tol)
}

/// Like [`canonical_decomposition`] but with a caller-chosen ω. Only
/// meaningful when ω keeps both branches equally entangled (degenerate cases).
pub fn canonical_decomposition_with_omega(state: &PureState, omega: f64, tol: &Tolerances) -> Result<CanonicalForm> {
    let split = bipartite::schmidt_split(state, tol)?;
    let tm = bipartite::tau_matrix(&split);
    let mut om = solve_omega(&tm, split.p, tol);
    om.value = omega;
    decompose_with(state, &split, om, tol)
}

fn branch_concurrence(x: &Mat2) -> f64 {
    2.0 * linalg::det(x).norm()
}

fn decompose_with(state: &PureState, split: &SchmidtSplit, omega: Omega, tol: &Tolerances) -> Result<CanonicalForm> {
    let br = branches(split, omega.value);
    let c0 = branch_concurrence(&br.x0);
    let c1 = branch_concurrence(&br.x1);
    let (e0, e1) = (bipartite::eof_clamped(c0), bipartite::eof_clamped(c1));
    let branch_gap = (e0 - e1).abs();
    if branch_gap > 1e-9 {
        return Err(Error::Numerical(format!("branches unequally entangled: {e0} vs {e1}")));
    }
    let d0 = linalg::svd2(&br.x0);
    let (a, b) = {
        let cc = c0.min(1.0);
        let a2 = 0.5 * (1.0 + (1.0 - cc * cc).max(0.0).sqrt());
        let a = a2.sqrt();
        (a, if a > 0.0 { 0.5 * cc / a } else { 0.0 })
    };
    // X0 = A Σ Bᵀ; bring both branches to the Schmidt basis of x0
    let a_mat = d0.u;
    let b_mat = d0.v.conjugate();
    let y1 = a_mat.adjoint() * br.x1 * b_mat.conjugate();
    let mut lu = br.lu;
    lu[1] = a_mat.adjoint();
    lu[2] = b_mat.adjoint();
    let max_entangled = (a - b).abs() <= tol.omega;
    let (params, extra) = if max_entangled {
        max_entangled_params(a, &y1)
    } else {
        generic_params(a, &y1)
    };
    for k in 0..3 {
        lu[k] = extra[k] * lu[k];
    }
    let (params, lu) = if max_entangled {
        (params, lu)
    } else {
        let mut tr = Tracker::new(params.angles());
        tr.run();
        let mut out = lu;
        for k in 0..3 {
            out[k] = tr.moves[k] * out[k];
        }
        (params.with_angles(tr.t), out)
    };
    let witness = LocalUnitary::from_factors(lu.to_vec());
    let form = CanonicalForm { params, omega, max_entangled_convention: max_entangled, witness, branch_gap };
    let residual = apply_local(state, &form.witness)?.phase_distance(&literal_state(&form.params));
    if !(residual <= 1e-8) {
        return Err(Error::Numerical(format!("canonical witness residual {residual:e}")));
    }
    Ok(form)
}

/// Generic a ≠ b: Y1 = U2 Σ U3ᵀ; returns raw angles and the extra LU applied.
fn generic_params(a: f64, y1: &Mat2) -> (FormParams, [Mat2; 3]) {
    let d = linalg::svd2(y1);
    let u2 = d.u;
    let u3 = d.v.conjugate();
    let (s2, ph2) = linalg::to_special(&u2);
    let (s3, ph3) = linalg::to_special(&u3);
    let (a2, b2, c2) = linalg::zyz(&s2);
    let (a3, b3, c3) = linalg::zyz(&s3);
    let phase_fix = linalg::phase_diag(0.0, -(ph2 + ph3));
    let raw = FormParams::new(a, a2 + a3, b2, c2 + c3, b3);
    (raw, [phase_fix, z_rot(a3), z_rot(-a3)])
}

/// a = b: Y1 = W/√2 with W unitary. Diagonalize W by V ⊗ V*, which fixes ψs.
fn max_entangled_params(a: f64, y1: &Mat2) -> (FormParams, [Mat2; 3]) {
    let w = y1 * c(std::f64::consts::SQRT_2, 0.0);
    let (s, ph) = linalg::to_special(&w);
    // S = cos θ + i sin θ (n·σ); the Hermitian part picks the eigenbasis
    let h = (s - s.adjoint()) * c(0.0, -0.5);
    let eig = linalg::herm_eig2(&h);
    let sin_t = eig.values[0].max(0.0);
    let cos_t = 0.5 * s.trace().re;
    let r = eig.vectors;
    let mut theta = sin_t.atan2(cos_t);
    let mut q0 = linalg::phase_diag(0.0, -ph);
    let (mut q1, mut q2) = (r.adjoint(), r.transpose());
    let (t, odd) = reduce_half_turn(theta);
    theta = t;
    if odd {
        q0 = pauli(3) * q0;
    }
    if theta < 0.0 {
        theta = -theta;
        q1 = pauli(1) * q1;
        q2 = pauli(1) * q2;
    }
    (FormParams::new(a, theta, 0.0, 0.0, 0.0), [q0, q1, q2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn omega_example() {
        // p c0 = 0.4, (1 − p) c1 = 0.2, arg c̃ = π/4 → ω = arctan 3
        let p = 0.8;
        let tm = TauMatrix {
            p,
            c0: 0.5,
            c1: 1.0,
            ctilde: C64::from_polar(0.3, PI / 4.0),
            tau: Mat2::zeros(),
            s: [0.0; 2],
        };
        let om = solve_omega(&tm, p, &tol());
        assert_eq!(om.case, OmegaCase::Generic);
        assert!((om.value - 3f64.atan()).abs() < 1e-12);
        assert!((om.value - 1.2490).abs() < 1e-4);
    }

    #[test]
    fn ghz_decomposition() {
        let f = canonical_decomposition(&PureState::ghz(), &tol()).unwrap();
        assert_eq!(f.omega.case, OmegaCase::Iii);
        assert!(f.max_entangled_convention);
        assert!((f.params.a - FRAC_1_SQRT_2).abs() < 1e-9);
        assert!((f.params.alpha - FRAC_PI_2).abs() < 1e-9);
        assert_eq!((f.params.beta, f.params.gamma, f.params.beta_prime), (0.0, 0.0, 0.0));
    }

    #[test]
    fn w_decomposition() {
        let f = canonical_decomposition(&PureState::w(), &tol()).unwrap();
        assert_eq!(f.omega.case, OmegaCase::Iii);
        let cs = 2.0 * f.params.a * f.params.b();
        assert!((cs - 2.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn canonicalize_examples() {
        let t = canonicalize_params(Angles::new(FRAC_PI_2, 0.0, 0.0, 0.0));
        assert_eq!(t, Angles::new(FRAC_PI_2, 0.0, 0.0, 0.0));
        let x = canonicalize_params(Angles::new(0.3, 0.7, 0.2, 0.5));
        let y = canonicalize_params(Angles::new(0.3, -0.7, 0.2, -0.5));
        assert_eq!(x, y);
        let z = canonicalize_params(Angles::new(0.2, 0.3, 0.4, 0.1));
        assert!((z.alpha + 0.4).abs() < 1e-12 && (z.gamma + 0.2).abs() < 1e-12);
        assert!((z.beta - 0.3).abs() < 1e-12 && (z.beta_prime - 0.1).abs() < 1e-12);
    }

    #[test]
    fn haar_states_decompose() {
        let mut worst: f64 = 0.0;
        for seed in 0..300 {
            let s = crate::sampling::haar_state(3, seed).unwrap();
            let f = canonical_decomposition(&s, &tol()).unwrap();
            f.params.validate().unwrap();
            assert!(f.params.alpha.abs() >= f.params.gamma.abs() - 1e-12);
            let r = apply_local(&s, &f.witness).unwrap().phase_distance(&reconstruct_state(&f.params).unwrap());
            worst = worst.max(r);
        }
        assert!(worst < 1e-9, "worst witness residual {worst:e}");
    }

    #[test]
    fn reconstruct_guards() {
        assert!(reconstruct_state(&FormParams::new(1.0, 0.0, 0.0, 0.0, 0.0)).is_err());
        assert!(reconstruct_state(&FormParams::new(0.8, 2.0, 0.0, 0.0, 0.0)).is_err());
        let s = reconstruct_state(&FormParams::new(0.8, 0.3, 0.7, 0.2, 0.5)).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-14);
    }
}
