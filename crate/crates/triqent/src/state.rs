//! Dense state vectors, local unitaries and reduced density operators.
//!
//! Qubits are indexed from 0 and qubit 0 is the most significant bit of the
//! amplitude index, so a three-qubit state splits as 0|12 by reshaping its
//! amplitudes into a 2×4 matrix.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat2, C64, ONE, ZERO};

pub const MIN_QUBITS: usize = 2;
pub const MAX_QUBITS: usize = 11;

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amps: Vec<C64>,
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if !len.is_power_of_two() {
        return Err(Error::AmplitudeCount(len));
    }
    let n = len.trailing_zeros() as usize;
    if !(MIN_QUBITS..=MAX_QUBITS).contains(&n) {
        return Err(Error::AmplitudeCount(len));
    }
    Ok(n)
}

impl PureState {
    /// Builds a state from amplitudes that are already normalized within 1e-12.
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amps.len())?;
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized(norm_sq));
        }
        Ok(PureState { n_qubits, amps })
    }

    /// Builds a state after rescaling the amplitudes to unit norm.
    pub fn normalized(amps: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amps.len())?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 1e-150) || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(PureState { n_qubits, amps })
    }

    pub(crate) fn from_raw(amps: Vec<C64>) -> Self {
        let n_qubits = amps.len().trailing_zeros() as usize;
        PureState { n_qubits, amps }
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::normalized(amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut amps = vec![ZERO; 1 << n_qubits];
        if index >= amps.len() {
            return Err(Error::QubitSelection(format!("basis index {index} out of range")));
        }
        amps[index] = ONE;
        Self::new(amps)
    }

    /// (|000⟩ + |111⟩)/√2.
    pub fn ghz() -> Self {
        let mut amps = vec![ZERO; 8];
        amps[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[7] = amps[0];
        PureState::from_raw(amps)
    }

    /// (|001⟩ + |010⟩ + |100⟩)/√3.
    pub fn w() -> Self {
        let mut amps = vec![ZERO; 8];
        let x = C64::new(1.0 / 3f64.sqrt(), 0.0);
        amps[1] = x;
        amps[2] = x;
        amps[4] = x;
        PureState::from_raw(amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn expect_qubits(&self, n: usize) -> Result<()> {
        if self.n_qubits != n {
            return Err(Error::QubitCount { expected: n, got: self.n_qubits });
        }
        Ok(())
    }

    /// Complex conjugate in the computational basis.
    pub fn conj(&self) -> Self {
        PureState::from_raw(self.amps.iter().map(|a| a.conj()).collect())
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// |⟨self|other⟩|, equal to 1 iff the states agree up to a global phase.
    pub fn fidelity_amplitude(&self, other: &Self) -> f64 {
        self.inner(other).norm()
    }

    /// Largest amplitude difference after aligning the global phase of `other`
    /// to `self`.
    pub fn phase_distance(&self, other: &Self) -> f64 {
        let ov = other.inner(self);
        let ph = if ov.norm() > 0.0 { ov / ov.norm() } else { ONE };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b * ph).norm())
            .fold(0.0, f64::max)
    }

    /// self ⊗ other; the qubits of `self` come first.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        PureState::from_raw(amps)
    }

    fn bit(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    /// Applies `m` to qubit `q` without checking unitarity.
    pub(crate) fn apply_single(&mut self, q: usize, m: &Mat2) {
        let stride = self.bit(q);
        for i in 0..self.amps.len() {
            if i & stride == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | stride];
                self.amps[i] = m[(0, 0)] * a0 + m[(0, 1)] * a1;
                self.amps[i | stride] = m[(1, 0)] * a0 + m[(1, 1)] * a1;
            }
        }
    }

    /// Applies `m` to `target` on the branch where `control` is |1⟩.
    pub(crate) fn apply_controlled(&mut self, control: usize, target: usize, m: &Mat2) {
        let cbit = self.bit(control);
        let tbit = self.bit(target);
        for i in 0..self.amps.len() {
            if i & cbit != 0 && i & tbit == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | tbit];
                self.amps[i] = m[(0, 0)] * a0 + m[(0, 1)] * a1;
                self.amps[i | tbit] = m[(1, 0)] * a0 + m[(1, 1)] * a1;
            }
        }
    }

    /// Reorders qubits: qubit k of the result is qubit `order[k]` of `self`.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<Self> {
        let n = self.n_qubits;
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&q| q >= n || std::mem::replace(&mut seen[q], true)) {
            return Err(Error::QubitSelection(format!("{order:?} is not a permutation of {n} qubits")));
        }
        let mut amps = vec![ZERO; self.amps.len()];
        for (new_index, slot) in amps.iter_mut().enumerate() {
            let mut old_index = 0;
            for (k, &q) in order.iter().enumerate() {
                if new_index & (1 << (n - 1 - k)) != 0 {
                    old_index |= self.bit(q);
                }
            }
            *slot = self.amps[old_index];
        }
        Ok(PureState::from_raw(amps))
    }

    /// Amplitude tensor of a three-qubit state as t[i][j][k].
    pub fn tensor3(&self) -> [[[C64; 2]; 2]; 2] {
        let mut t = [[[ZERO; 2]; 2]; 2];
        for (idx, a) in self.amps.iter().enumerate().take(8) {
            t[idx >> 2][(idx >> 1) & 1][idx & 1] = *a;
        }
        t
    }
}

/// One 2×2 unitary per qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalUnitary {
    factors: Vec<Mat2>,
}

impl LocalUnitary {
    pub fn new(factors: Vec<Mat2>) -> Result<Self> {
        for (index, f) in factors.iter().enumerate() {
            let defect = linalg::unitarity_defect(f);
            if !(defect <= 1e-9) {
                return Err(Error::NonUnitary { index, defect });
            }
        }
        Ok(LocalUnitary { factors })
    }

    pub(crate) fn from_factors(factors: Vec<Mat2>) -> Self {
        LocalUnitary { factors }
    }

    pub fn identity(n: usize) -> Self {
        LocalUnitary { factors: vec![linalg::identity(); n] }
    }

    pub fn factors(&self) -> &[Mat2] {
        &self.factors
    }

    pub fn n_qubits(&self) -> usize {
        self.factors.len()
    }

    /// `self` applied after `first`.
    pub fn after(&self, first: &LocalUnitary) -> LocalUnitary {
        LocalUnitary {
            factors: self.factors.iter().zip(&first.factors).map(|(a, b)| a * b).collect(),
        }
    }

    pub fn adjoint(&self) -> LocalUnitary {
        LocalUnitary { factors: self.factors.iter().map(|f| f.adjoint()).collect() }
    }

    /// Largest factor unitarity defect.
    pub fn max_defect(&self) -> f64 {
        self.factors.iter().map(linalg::unitarity_defect).fold(0.0, f64::max)
    }
}

pub fn apply_local(state: &PureState, lu: &LocalUnitary) -> Result<PureState> {
    if lu.factors.len() != state.n_qubits {
        return Err(Error::FactorCount { expected: state.n_qubits, got: lu.factors.len() });
    }
    for (index, f) in lu.factors.iter().enumerate() {
        let defect = linalg::unitarity_defect(f);
        if !(defect <= 1e-9) {
            return Err(Error::NonUnitary { index, defect });
        }
    }
    let mut out = state.clone();
    for (q, f) in lu.factors.iter().enumerate() {
        out.apply_single(q, f);
    }
    Ok(out)
}

/// Hermitian, unit-trace operator on a subset of qubits.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    matrix: DMatrix<C64>,
}

impl DensityOperator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = if self.dim() == 2 {
            let m = Mat2::new(self.matrix[(0, 0)], self.matrix[(0, 1)], self.matrix[(1, 0)], self.matrix[(1, 1)]);
            linalg::herm_eig2(&m).values.to_vec()
        } else {
            self.matrix.clone().symmetric_eigenvalues().iter().copied().collect()
        };
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }
}

pub fn partial_trace(state: &PureState, keep: &[usize]) -> Result<DensityOperator> {
    let n = state.n_qubits;
    if keep.is_empty() || keep.len() >= n {
        return Err(Error::QubitSelection("keep set must be a nonempty strict subset".into()));
    }
    let mut seen = vec![false; n];
    for &q in keep {
        if q >= n || std::mem::replace(&mut seen[q], true) {
            return Err(Error::QubitSelection(format!("invalid keep set {keep:?}")));
        }
    }
    let rest: Vec<usize> = (0..n).filter(|q| !seen[*q]).collect();
    let dk = 1 << keep.len();
    let de = 1 << rest.len();
    let mut m = DMatrix::<C64>::zeros(dk, de);
    for (idx, a) in state.amps.iter().enumerate() {
        let pick = |qs: &[usize]| {
            qs.iter().fold(0usize, |acc, &q| (acc << 1) | ((idx >> (n - 1 - q)) & 1))
        };
        m[(pick(keep), pick(&rest))] = *a;
    }
    let matrix = &m * m.adjoint();
    Ok(DensityOperator { matrix })
}

/// Von Neumann entropy in bits. Eigenvalues in [−1e-10, 0) are clipped to 0.
pub fn entropy(rho: &DensityOperator) -> f64 {
    let s: f64 = rho
        .eigenvalues()
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum();
    s.max(0.0)
}

/// Entanglement entropy between `keep` and the rest.
pub fn entanglement_entropy(state: &PureState, keep: &[usize]) -> Result<f64> {
    Ok(entropy(&partial_trace(state, keep)?))
}

/// Smallest eigenvalue of a single-qubit marginal, computed as det/λmax so
/// that it keeps relative precision when small.
pub fn min_marginal_eigenvalue(state: &PureState, q: usize) -> Result<f64> {
    let rho = partial_trace(state, &[q])?;
    let m = rho.matrix();
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let det = a * d - m[(0, 1)].norm_sqr();
    let hi = 0.5 * (a + d) + (0.25 * (a - d).powi(2) + m[(0, 1)].norm_sqr()).sqrt();
    Ok(if hi > 0.0 { (det / hi).max(0.0) } else { 0.0 })
}

/// True iff every single-qubit marginal has smallest eigenvalue above `tol_product`.
pub fn genuine_tripartite(state: &PureState, tol_product: f64) -> bool {
    if state.n_qubits != 3 {
        return false;
    }
    (0..3).all(|q| min_marginal_eigenvalue(state, q).map(|l| l > tol_product).unwrap_or(false))
}

pub(crate) fn require_genuine(state: &PureState, tol_product: f64) -> Result<()> {
    state.expect_qubits(3)?;
    if genuine_tripartite(state, tol_product) {
        Ok(())
    } else {
        Err(Error::Biseparable)
    }
}
