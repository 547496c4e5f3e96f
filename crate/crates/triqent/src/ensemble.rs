//! Named random-state generators, looked up by name from a registry.

use rand::Rng as _;

use crate::classify::Subclass;
use crate::error::{Error, Result};
use crate::linalg::{c, C64, ZERO};
use crate::sampling::{haar_local_unitary_with, haar_state_with, real_state_with, rng, Rng};
use crate::state::{apply_local, PureState};

pub trait Ensemble: Send + Sync {
    fn name(&self) -> &'static str;

    /// Class every sample is built to belong to, if any.
    fn target(&self) -> Option<Subclass>;

    fn sample(&self, rng: &mut Rng) -> Result<PureState>;
}

struct Haar;

impl Ensemble for Haar {
    fn name(&self) -> &'static str {
        "haar"
    }

    fn target(&self) -> Option<Subclass> {
        None
    }

    fn sample(&self, rng: &mut Rng) -> Result<PureState> {
        haar_state_with(rng, 3)
    }
}

/// Gaussian real amplitudes; every sample is CLU.
struct Real;

impl Ensemble for Real {
    fn name(&self) -> &'static str {
        "real"
    }

    fn target(&self) -> Option<Subclass> {
        None
    }

    fn sample(&self, rng: &mut Rng) -> Result<PureState> {
        real_state_with(rng, 3)
    }
}

#[derive(Clone, Copy)]
enum Shape {
    /// |000⟩ + c|φ1φ2φ3⟩, c real and away from ±1.
    RealWeight,
    /// |000⟩ + e^{iδ}|φ1φ2φ3⟩, δ away from 0 and π.
    Phase,
    /// |000⟩ + |φ1φ2φ3⟩.
    Equal,
}

struct ClassFixture {
    name: &'static str,
    shape: Shape,
    target: Subclass,
}

fn real_qubit(rng: &mut Rng) -> [f64; 2] {
    // keep away from |0⟩, where the state would factorize
    let t: f64 = rng.random_range(0.35..std::f64::consts::PI - 0.35);
    [t.cos(), t.sin()]
}

impl ClassFixture {
    fn weight(&self, rng: &mut Rng) -> C64 {
        match self.shape {
            Shape::RealWeight => {
                let m: f64 = rng.random_range(0.2..0.8);
                let m = if rng.random::<bool>() { m } else { 1.0 / m };
                c(if rng.random::<bool>() { m } else { -m }, 0.0)
            }
            Shape::Phase => C64::from_polar(1.0, rng.random_range(0.35..std::f64::consts::PI - 0.35)),
            Shape::Equal => c(1.0, 0.0),
        }
    }
}

impl Ensemble for ClassFixture {
    fn name(&self) -> &'static str {
        self.name
    }

    fn target(&self) -> Option<Subclass> {
        Some(self.target)
    }

    fn sample(&self, rng: &mut Rng) -> Result<PureState> {
        let w = self.weight(rng);
        let phis = [real_qubit(rng), real_qubit(rng), real_qubit(rng)];
        let mut amps = vec![ZERO; 8];
        amps[0] = c(1.0, 0.0);
        for (i, a) in amps.iter_mut().enumerate() {
            let prod = (0..3).map(|q| phis[q][(i >> (2 - q)) & 1]).product::<f64>();
            *a += w * prod;
        }
        let bare = PureState::normalized(amps)?;
        apply_local(&bare, &haar_local_unitary_with(rng, 3))
    }
}

pub struct EnsembleRegistry {
    entries: Vec<Box<dyn Ensemble>>,
}

impl Default for EnsembleRegistry {
    fn default() -> Self {
        let mut r = EnsembleRegistry { entries: Vec::new() };
        r.register(Box::new(Haar));
        r.register(Box::new(Real));
        r.register(Box::new(ClassFixture { name: "class2", shape: Shape::RealWeight, target: Subclass::Class2 }));
        r.register(Box::new(ClassFixture { name: "class3", shape: Shape::Phase, target: Subclass::Class3 }));
        r.register(Box::new(ClassFixture { name: "class4", shape: Shape::Equal, target: Subclass::Class4 }));
        r
    }
}

impl EnsembleRegistry {
    /// Adds an ensemble, replacing any earlier one of the same name.
    pub fn register(&mut self, e: Box<dyn Ensemble>) {
        self.entries.retain(|x| x.name() != e.name());
        self.entries.push(e);
    }

    pub fn get(&self, name: &str) -> Result<&dyn Ensemble> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|e| e.as_ref())
            .ok_or_else(|| Error::UnknownEnsemble(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    /// `count` samples from one seeded stream.
    pub fn generate(&self, name: &str, count: usize, seed: u64) -> Result<Vec<PureState>> {
        let e = self.get(name)?;
        let mut r = rng(seed);
        (0..count).map(|_| e.sample(&mut r)).collect()
    }
}
