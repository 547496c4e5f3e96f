//! Per-state reports for the analysis subcommands.

use serde_json::{json, Value};
use triqent::bipartite::{concurrence_pair, tangle};
use triqent::canonical::CanonicalForm;
use triqent::classify::{analyze_state, classify_from, StateAnalysis};
use triqent::gensim::enumerate_generation;
use triqent::linalg::Mat2;
use triqent::measures::measure_set;
use triqent::state::{LocalUnitary, PureState};
use triqent::{Error, Tolerances};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Analyze,
    Decompose,
    Measures,
    Classify,
    StandardForm,
    Gensim,
}

fn matrix(m: &Mat2) -> Value {
    json!([[[m[(0, 0)].re, m[(0, 0)].im], [m[(0, 1)].re, m[(0, 1)].im]], [
        [m[(1, 0)].re, m[(1, 0)].im],
        [m[(1, 1)].re, m[(1, 1)].im]
    ]])
}

fn witness(lu: &LocalUnitary) -> Value {
    Value::Array(lu.factors().iter().map(matrix).collect())
}

pub fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Biseparable => "biseparable",
        Error::CluDisagreement(_) => "clu_disagreement",
        Error::InconsistentClassification(_) => "inconsistent_classification",
        Error::InconsistentMeasures(_) => "inconsistent_measures",
        Error::ClosureViolation(_) => "closure_violation",
        Error::NotNormalized(_) | Error::ZeroVector | Error::AmplitudeCount(_) => "invalid_state",
        _ => "numerical",
    }
}

pub fn error_value(e: &Error) -> Value {
    let mut v = json!({ "error": error_kind(e), "message": e.to_string() });
    if let Error::CluDisagreement(ev) = e {
        v["evidence"] = json!(ev);
    }
    v
}

fn canonical_value(f: &CanonicalForm) -> Value {
    let p = &f.params;
    json!({
        "a": p.a,
        "alpha": p.alpha,
        "beta": p.beta,
        "gamma": p.gamma,
        "beta_prime": p.beta_prime,
        "omega": f.omega,
        "max_entangled_convention": f.max_entangled_convention,
        "branch_gap": f.branch_gap,
    })
}

fn analyze(an: &StateAnalysis, tol: &Tolerances) -> Result<Value, Error> {
    let (c23, ca23) = concurrence_pair(&an.tau);
    let class = match classify_from(an, tol) {
        Ok(label) => json!(label),
        Err(e) => error_value(&e),
    };
    Ok(json!({
        "canonical": canonical_value(&an.form),
        "measures": measure_set(&an.form.params, tol)?,
        "bipartite": {
            "p": an.split.p,
            "degenerate": an.split.degenerate,
            "c23": c23,
            "ca23": ca23,
            "tangle": tangle(&an.tau),
        },
        "acin": {
            "lambda": an.acin.lambda,
            "phi": an.acin.phi,
            "degenerate_root": an.acin.degenerate_root,
        },
        "invariants": an.invariants,
        "class": class,
    }))
}

fn body(kind: Kind, state: &PureState, tol: &Tolerances) -> Result<Value, Error> {
    let an = analyze_state(state, tol)?;
    match kind {
        Kind::Analyze => analyze(&an, tol),
        Kind::Decompose => {
            let mut v = canonical_value(&an.form);
            v["witness"] = witness(&an.form.witness);
            Ok(v)
        }
        Kind::Measures => Ok(json!(measure_set(&an.form.params, tol)?)),
        Kind::Classify => Ok(json!(classify_from(&an, tol)?)),
        Kind::StandardForm => Ok(json!({
            "lambda": an.acin.lambda,
            "phi": an.acin.phi,
            "degenerate_root": an.acin.degenerate_root,
            "witness": witness(&an.acin.witness),
            "invariants": an.invariants,
        })),
        Kind::Gensim => {
            let g = enumerate_generation(&an.form.params, tol)?;
            Ok(json!({
                "params": an.form.params,
                "outcome_count": g.outcomes.len(),
                "total_probability": g.total_probability,
                "worst_outcome_deviation": g.worst_outcome_deviation(),
                "worst_class_deviation": g.worst_class_deviation(),
                "classes": g.classes,
                "outcomes": g.outcomes,
            }))
        }
    }
}

/// Report for one state. Library errors become an error record with the same id.
pub fn report(kind: Kind, id: &str, state: &PureState, tol: &Tolerances) -> Value {
    let inner = body(kind, state, tol).unwrap_or_else(|e| error_value(&e));
    let mut out = serde_json::Map::new();
    out.insert("id".into(), json!(id));
    match inner {
        Value::Object(m) => out.extend(m),
        other => {
            out.insert("value".into(), other);
        }
    }
    Value::Object(out)
}
