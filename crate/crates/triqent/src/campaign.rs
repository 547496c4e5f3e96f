//! Seeded verification campaigns, looked up by name. Each suite reports the
//! worst residual of every check instead of stopping at the first failure.

use serde::{Deserialize, Serialize};

use crate::bipartite::{concurrence_pair, schmidt_split, tangle, tau_matrix};
use crate::canonical::{canonical_decomposition, reconstruct_state, FormParams};
use crate::classify::{
    acin_standard_form, analyze_state, classify, det_tau_sign, invariants_equivalence, j_invariants,
    standard_form_state, InvariantSet,
};
use crate::ensemble::EnsembleRegistry;
use crate::error::{Error, Result};
use crate::gensim::enumerate_generation;
use crate::measures::{invert_measures, measure_set, MeasureSet};
use crate::oracle;
use crate::sampling::{haar_local_unitary_with, haar_state_with, rng, standard_form_params_with, Rng};
use crate::state::{apply_local, PureState};
use crate::tolerance::Tolerances;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Largest residual seen (0 for pass/fail checks).
    pub worst: f64,
    pub threshold: f64,
    pub samples: usize,
    pub failures: usize,
    pub passed: bool,
}

/// Running maximum for one check.
#[derive(Clone, Debug)]
pub struct Tally {
    name: String,
    threshold: f64,
    worst: f64,
    samples: usize,
    failures: usize,
}

impl Tally {
    pub fn new(name: &str, threshold: f64) -> Self {
        Tally { name: name.to_string(), threshold, worst: 0.0, samples: 0, failures: 0 }
    }

    pub fn residual(&mut self, r: f64) {
        self.samples += 1;
        if r.is_nan() || r > self.threshold {
            self.failures += 1;
        }
        if r.is_nan() || r > self.worst {
            self.worst = r;
        }
    }

    pub fn flag(&mut self, ok: bool) {
        self.samples += 1;
        if !ok {
            self.failures += 1;
        }
    }

    pub fn finish(self) -> Check {
        Check {
            passed: self.failures == 0,
            name: self.name,
            worst: self.worst,
            threshold: self.threshold,
            samples: self.samples,
            failures: self.failures,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub count: usize,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Library errors raised while the suite ran; each also fails a check.
    pub errors: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str, count: usize, seed: u64, checks: Vec<Check>, errors: Vec<String>) -> Self {
        let passed = errors.is_empty() && checks.iter().all(|c| c.passed);
        SuiteReport { suite: suite.to_string(), count, seed, passed, checks, errors }
    }
}

pub trait VerifySuite: Send + Sync {
    fn name(&self) -> &'static str;

    fn run(&self, count: usize, seed: u64, tol: &Tolerances) -> SuiteReport;
}

/// Keeps the first few error messages; the count lives in the checks.
fn note(errors: &mut Vec<String>, context: &str, e: &Error) {
    if errors.len() < 20 {
        errors.push(format!("{context}: {e}"));
    }
}

struct Monogamy;

impl VerifySuite for Monogamy {
    fn name(&self) -> &'static str {
        "monogamy"
    }

    fn run(&self, count: usize, seed: u64, tol: &Tolerances) -> SuiteReport {
        let mut r = rng(seed);
        let mut check = Tally::new("(Ca)^2 - C^2 - tangle", 1e-9);
        let mut errors = Vec::new();
        for k in 0..count {
            let res = haar_state_with(&mut r, 3).and_then(|s| monogamy_residual(&s, tol));
            match res {
                Ok(v) => check.residual(v),
                Err(e) => {
                    check.flag(false);
                    note(&mut errors, &format!("sample {k}"), &e);
                }
            }
        }
        SuiteReport::new(self.name(), count, seed, vec![check.finish()], errors)
    }
}

pub fn monogamy_residual(s: &PureState, tol: &Tolerances) -> Result<f64> {
    let tm = tau_matrix(&schmidt_split(s, tol)?);
    let (c23, ca23) = concurrence_pair(&tm);
    Ok((ca23 * ca23 - c23 * c23 - tangle(&tm)).abs())
}

/// Everything compared across an LU orbit.
struct Fingerprint {
    measures: MeasureSet,
    label: String,
    inv: InvariantSet,
}

fn fingerprint(s: &PureState, tol: &Tolerances) -> Result<Fingerprint> {
    let form = canonical_decomposition(s, tol)?;
    let measures = measure_set(&form.params, tol)?;
    let label = match classify(s, tol) {
        Ok(l) => l.subclass.label().to_string(),
        Err(e) => format!("error: {e}"),
    };
    let inv = j_invariants(&acin_standard_form(s, tol)?);
    Ok(Fingerprint { measures, label, inv })
}

fn measure_drift(a: &MeasureSet, b: &MeasureSet) -> f64 {
    [a.e1 - b.e1, a.e2 - b.e2, a.e3 - b.e3, a.e4 - b.e4, a.e5 - b.e5].iter().map(|x| x.abs()).fold(0.0, f64::max)
}

fn invariant_drift(a: &InvariantSet, b: &InvariantSet) -> f64 {
    [a.j1 - b.j1, a.j2 - b.j2, a.j3 - b.j3, a.j4 - b.j4, a.j5 - b.j5, a.j6.norm() - b.j6.norm()]
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
}

pub const DRESSINGS: usize = 20;

struct Invariance;

impl VerifySuite for Invariance {
    fn name(&self) -> &'static str {
        "invariance"
    }

    fn run(&self, count: usize, seed: u64, tol: &Tolerances) -> SuiteReport {
        let mut r = rng(seed);
        let mut drift = Tally::new("E1..E5 drift", 1e-8);
        let mut e6 = Tally::new("E6 unchanged", 0.0);
        let mut label = Tally::new("class label unchanged", 0.0);
        let mut inv = Tally::new("J1..J5, |J6| drift", 1e-8);
        let mut errors = Vec::new();
        for k in 0..count {
            let base = match haar_state_with(&mut r, 3).and_then(|s| Ok((fingerprint(&s, tol)?, s))) {
                Ok(x) => x,
                Err(e) => {
                    drift.flag(false);
                    note(&mut errors, &format!("sample {k}"), &e);
                    continue;
                }
            };
            let (fp0, s) = base;
            for _ in 0..DRESSINGS {
                let lu = haar_local_unitary_with(&mut r, 3);
                match apply_local(&s, &lu).and_then(|d| fingerprint(&d, tol)) {
                    Ok(fp) => {
                        drift.residual(measure_drift(&fp0.measures, &fp.measures));
                        e6.flag(fp0.measures.e6 == fp.measures.e6);
                        label.flag(fp0.label == fp.label);
                        inv.residual(invariant_drift(&fp0.inv, &fp.inv));
                    }
                    Err(e) => {
                        drift.flag(false);
                        note(&mut errors, &format!("sample {k} dressed"), &e);
                    }
                }
            }
        }
        let checks = vec![drift.finish(), e6.finish(), label.finish(), inv.finish()];
        SuiteReport::new(self.name(), count, seed, checks, errors)
    }
}

struct Oracles;

impl VerifySuite for Oracles {
    fn name(&self) -> &'static str {
        "oracles"
    }

    fn run(&self, count: usize, seed: u64, tol: &Tolerances) -> SuiteReport {
        let mut r = rng(seed);
        let mut cpm = Tally::new("C-/C+ closed form vs singular values (squared)", 1e-9);
        let mut cpsi = Tally::new("C(psi_s) closed form vs 2ab", 1e-9);
        let mut trig = Tally::new("measure trig cross-checks", 0.0);
        let mut sigma = Tally::new("sigma+ vs Schmidt p", 1e-9);
        let mut det = Tally::new("closed-form det tau vs direct", 1e-8);
        let mut errors = Vec::new();
        for k in 0..count {
            let out = haar_state_with(&mut r, 3).and_then(|s| {
                let tm = tau_matrix(&schmidt_split(&s, tol)?);
                let form = canonical_decomposition(&s, tol)?;
                Ok((tm, form))
            });
            match out {
                Ok((tm, form)) => {
                    let (lo, hi) = concurrence_pair(&tm);
                    let (cm, cp) = oracle::c_minus_plus(&tm);
                    cpm.residual((lo * lo - cm * cm).abs().max((hi * hi - cp * cp).abs()));
                    let ab2 = 2.0 * form.params.a * form.params.b();
                    cpsi.residual((oracle::c_psi_s(&tm, form.omega.value) - ab2).abs());
                    match measure_set(&form.params, tol) {
                        Ok(_) => trig.flag(true),
                        Err(e) => {
                            trig.flag(false);
                            note(&mut errors, &format!("sample {k}"), &e);
                        }
                    }
                }
                Err(e) => {
                    cpm.flag(false);
                    note(&mut errors, &format!("sample {k}"), &e);
                }
            }
            match sigma_residual(&mut r, tol) {
                Ok(v) => sigma.residual(v),
                Err(e) => {
                    sigma.flag(false);
                    note(&mut errors, &format!("standard form {k}"), &e);
                }
            }
            match det_tau_residual(&mut r, tol) {
                Ok(v) => det.residual(v),
                Err(e) => {
                    det.flag(false);
                    note(&mut errors, &format!("real standard form {k}"), &e);
                }
            }
        }
        let checks = vec![cpm.finish(), cpsi.finish(), trig.finish(), sigma.finish(), det.finish()];
        SuiteReport::new(self.name(), count, seed, checks, errors)
    }
}

/// |σ₊ − p| for a random LU-dressed standard-form state.
pub fn sigma_residual(r: &mut Rng, tol: &Tolerances) -> Result<f64> {
    let (lambda, phi) = standard_form_params_with(r, false);
    let s = apply_local(&standard_form_state(lambda, phi), &haar_local_unitary_with(r, 3))?;
    let inv = j_invariants(&acin_standard_form(&s, tol)?);
    let p = schmidt_split(&s, tol)?.p;
    Ok((oracle::sigma_pm(&inv).0 - p).abs())
}

/// |closed form − direct| of det τ_r for a random real standard form.
pub fn det_tau_residual(r: &mut Rng, tol: &Tolerances) -> Result<f64> {
    let (lambda, phi) = standard_form_params_with(r, true);
    let s = standard_form_state(lambda, phi);
    let form = acin_standard_form(&s, tol)?;
    let closed = oracle::det_tau_standard(&form, &j_invariants(&form));
    let direct = det_tau_sign(&s, tol)?;
    Ok((closed - direct.det).norm())
}

/// Canonical parameters for the generation campaign: GHZ, the three class
/// fixtures and a Haar state, cycling.
fn generation_forms(count: usize, seed: u64, tol: &Tolerances) -> Result<Vec<FormParams>> {
    let reg = EnsembleRegistry::default();
    let mut forms = Vec::with_capacity(count);
    for k in 0..count {
        let kind = ["ghz", "class2", "class3", "class4", "haar"][k % 5];
        let s = if kind == "ghz" {
            PureState::ghz()
        } else {
            reg.get(kind)?.sample(&mut rng(seed.wrapping_add(k as u64)))?
        };
        forms.push(canonical_decomposition(&s, tol)?.params);
    }
    Ok(forms)
}

struct Generation;

impl VerifySuite for Generation {
    fn name(&self) -> &'static str {
        "gensim"
    }

    fn run(&self, count: usize, seed: u64, tol: &Tolerances) -> SuiteReport {
        let mut outcomes = Tally::new("outcome probability - 1/256", 1e-12);
        let mut classes = Tally::new("S_psi class weight - share of 1/4", 1e-12);
        let mut closure = Tally::new("256 outcomes inside S_psi", 0.0);
        let mut errors = Vec::new();
        match generation_forms(count, seed, tol) {
            Ok(forms) => {
                for (k, f) in forms.iter().enumerate() {
                    match enumerate_generation(f, tol) {
                        Ok(g) => {
                            closure.flag(g.outcomes.len() == 256);
                            outcomes.residual(g.worst_outcome_deviation());
                            classes.residual(g.worst_class_deviation());
                        }
                        Err(e) => {
                            closure.flag(false);
                            note(&mut errors, &format!("form {k}"), &e);
                        }
                    }
                }
            }
            Err(e) => {
                closure.flag(false);
                note(&mut errors, "building forms", &e);
            }
        }
        let checks = vec![outcomes.finish(), classes.finish(), closure.finish()];
        SuiteReport::new(self.name(), count, seed, checks, errors)
    }
}

struct RoundTrip;

impl VerifySuite for RoundTrip {
    fn name(&self) -> &'static str {
        "roundtrip"
    }

    fn run(&self, count: usize, seed: u64, tol: &Tolerances) -> SuiteReport {
        let mut r = rng(seed);
        let mut gap = Tally::new("|E(x0) - E(x1)|", 1e-9);
        let mut rebuild = Tally::new("reconstruction LU-equivalent to input", 0.0);
        let mut inversion = Tally::new("inversion: <= 4 candidates, one matches", 0.0);
        let mut errors = Vec::new();
        for k in 0..count {
            let res = haar_state_with(&mut r, 3).and_then(|s| round_trip(&s, tol));
            match res {
                Ok(rt) => {
                    gap.residual(rt.branch_gap);
                    rebuild.flag(rt.rebuilt_equivalent);
                    inversion.flag(rt.candidates <= 4 && rt.inversion_hit);
                }
                Err(e) => {
                    gap.flag(false);
                    note(&mut errors, &format!("sample {k}"), &e);
                }
            }
        }
        let checks = vec![gap.finish(), rebuild.finish(), inversion.finish()];
        SuiteReport::new(self.name(), count, seed, checks, errors)
    }
}

pub struct RoundTripResult {
    pub branch_gap: f64,
    pub rebuilt_equivalent: bool,
    pub candidates: usize,
    pub inversion_hit: bool,
}

pub fn round_trip(s: &PureState, tol: &Tolerances) -> Result<RoundTripResult> {
    let form = canonical_decomposition(s, tol)?;
    let source = analyze_state(s, tol)?.invariants;
    let rebuilt = j_invariants(&acin_standard_form(&reconstruct_state(&form.params)?, tol)?);
    let rebuilt_equivalent = invariants_equivalence(&source, &rebuilt, tol).equal;
    let inv = invert_measures(&measure_set(&form.params, tol)?, tol)?;
    let mut inversion_hit = false;
    for g in &inv.candidates {
        let cand = j_invariants(&acin_standard_form(&reconstruct_state(g)?, tol)?);
        let eq = invariants_equivalence(&source, &cand, tol);
        inversion_hit |= eq.equal || eq.conjugate_pair;
    }
    Ok(RoundTripResult { branch_gap: form.branch_gap, rebuilt_equivalent, candidates: inv.candidates.len(), inversion_hit })
}

pub struct SuiteRegistry {
    entries: Vec<Box<dyn VerifySuite>>,
}

impl Default for SuiteRegistry {
    fn default() -> Self {
        let mut r = SuiteRegistry { entries: Vec::new() };
        r.register(Box::new(Invariance));
        r.register(Box::new(Monogamy));
        r.register(Box::new(Oracles));
        r.register(Box::new(Generation));
        r.register(Box::new(RoundTrip));
        r
    }
}

impl SuiteRegistry {
    pub fn register(&mut self, s: Box<dyn VerifySuite>) {
        self.entries.retain(|x| x.name() != s.name());
        self.entries.push(s);
    }

    pub fn get(&self, name: &str) -> Result<&dyn VerifySuite> {
        self.entries
            .iter()
            .find(|s| s.name() == name)
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::UnknownSuite(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|s| s.name()).collect()
    }

    pub fn run(&self, name: &str, count: usize, seed: u64, tol: &Tolerances) -> Result<SuiteReport> {
        Ok(self.get(name)?.run(count, seed, tol))
    }
}
