//! Seeded Haar sampling.
//!
//! Every sampler takes an explicit ChaCha8 generator so results are
//! reproducible across platforms; the `*_seeded` helpers build one from a
//! `u64`.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat2, C64};
use crate::state::{LocalUnitary, PureState, MAX_QUBITS, MIN_QUBITS};

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

pub fn haar_state_with(rng: &mut Rng, n: usize) -> Result<PureState> {
    if !(MIN_QUBITS..=MAX_QUBITS).contains(&n) {
        return Err(Error::QubitSelection(format!("qubit count {n} out of range")));
    }
    let amps = (0..1usize << n).map(|_| gaussian(rng)).collect();
    PureState::normalized(amps)
}

pub fn haar_state(n: usize, seed: u64) -> Result<PureState> {
    haar_state_with(&mut rng(seed), n)
}

/// Real Gaussian amplitudes, normalized.
pub fn real_state_with(rng: &mut Rng, n: usize) -> Result<PureState> {
    if !(MIN_QUBITS..=MAX_QUBITS).contains(&n) {
        return Err(Error::QubitSelection(format!("qubit count {n} out of range")));
    }
    let amps = (0..1usize << n)
        .map(|_| C64::new(StandardNormal.sample(rng), 0.0))
        .collect();
    PureState::normalized(amps)
}

/// Haar 2×2 unitary: Gram–Schmidt on a complex Gaussian matrix with the
/// diagonal of R made positive.
pub fn haar_unitary_with(rng: &mut Rng) -> Mat2 {
    let g = Mat2::from_fn(|_, _| gaussian(rng));
    let mut q0 = g.column(0).into_owned();
    q0 /= C64::new(q0.norm(), 0.0);
    let g1 = g.column(1).into_owned();
    let proj = (q0.adjoint() * g1)[(0, 0)];
    let mut q1 = g1 - q0 * proj;
    q1 /= C64::new(q1.norm(), 0.0);
    linalg::mat2(q0[0], q1[0], q0[1], q1[1])
}

pub fn haar_unitary(seed: u64) -> Mat2 {
    haar_unitary_with(&mut rng(seed))
}

pub fn haar_local_unitary_with(rng: &mut Rng, n: usize) -> LocalUnitary {
    LocalUnitary::from_factors((0..n).map(|_| haar_unitary_with(rng)).collect())
}

/// Standard-form parameters: λ0..λ4 from normalized |Gaussian| draws, φ
/// uniform on [0, π], or 0 / π with equal odds when `real_phi` is set.
pub fn standard_form_params_with(rng: &mut Rng, real_phi: bool) -> ([f64; 5], f64) {
    let mut lambda = [0.0; 5];
    for l in lambda.iter_mut() {
        let g: f64 = StandardNormal.sample(rng);
        *l = g.abs();
    }
    let n = lambda.iter().map(|l| l * l).sum::<f64>().sqrt();
    lambda.iter_mut().for_each(|l| *l /= n);
    let phi = if real_phi {
        if rng.random::<bool>() { std::f64::consts::PI } else { 0.0 }
    } else {
        rng.random_range(0.0..std::f64::consts::PI)
    };
    (lambda, phi)
}
