//! StateRecord wire format: a JSON array of records or one record per line.
//!
//! Amplitudes are listed by ascending basis index with qubit 1 as the most
//! significant bit, so entry 5 is the coefficient of |101⟩.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use triqent::linalg::C64;
use triqent::state::PureState;

/// Norm deviation above which the input is rescaled with a warning.
const RENORM_WARN: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub id: String,
    pub amplitudes: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub metadata: Map<String, Value>,
}

impl StateRecord {
    pub fn from_state(id: String, state: &PureState, metadata: Map<String, Value>) -> Self {
        let amplitudes = state.amplitudes().iter().map(|a| [a.re, a.im]).collect();
        StateRecord { id, amplitudes, metadata }
    }

    /// The state, rescaled to unit norm. The second value is a warning when the
    /// input was off by more than 1e-12.
    pub fn to_state(&self) -> Result<(PureState, Option<String>)> {
        if self.amplitudes.len() != 8 {
            bail!("record `{}` has {} amplitudes, expected 8", self.id, self.amplitudes.len());
        }
        let amps: Vec<C64> = self.amplitudes.iter().map(|&[re, im]| C64::new(re, im)).collect();
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            bail!("record `{}` has a non-finite amplitude", self.id);
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        let state = PureState::normalized(amps).map_err(|e| anyhow!("record `{}`: {e}", self.id))?;
        let warning = ((norm_sq - 1.0).abs() > RENORM_WARN)
            .then(|| format!("record `{}` renormalized (norm squared was {norm_sq})", self.id));
        Ok((state, warning))
    }
}

/// Parses either a top-level array or newline-delimited records.
pub fn parse_records(text: &str) -> Result<Vec<StateRecord>> {
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(text).context("parsing record array");
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("line {}: {}", i + 1, snippet(l))))
        .collect()
}

fn snippet(line: &str) -> String {
    let t = line.trim();
    if t.chars().count() > 60 {
        format!("{}...", t.chars().take(60).collect::<String>())
    } else {
        t.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn array_and_lines_agree() {
        let one = r#"{"id":"a","amplitudes":[[1,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]]}"#;
        let arr = parse_records(&format!("[{one},{one}]")).unwrap();
        let nd = parse_records(&format!("{one}\n\n{one}\n")).unwrap();
        assert_eq!(arr, nd);
        assert_eq!(arr.len(), 2);
    }

    #[test]
    fn line_context() {
        let err = parse_records("{\"id\":\"a\",\"amplitudes\":[]}\n{oops").unwrap_err();
        assert!(format!("{err:#}").contains("line 2"));
    }

    #[test]
    fn dump_then_load() {
        let s = triqent::sampling::haar_state(3, 11).unwrap();
        let r = StateRecord::from_state("h".into(), &s, Map::new());
        let back = parse_records(&serde_json::to_string(&r).unwrap()).unwrap();
        let (t, w) = back[0].to_state().unwrap();
        assert!(w.is_none());
        for (a, b) in s.amplitudes().iter().zip(t.amplitudes()) {
            assert!((a.re - b.re).abs() <= 1e-15 && (a.im - b.im).abs() <= 1e-15);
        }
    }

    #[test]
    fn renormalize_warns() {
        let mut r = StateRecord { id: "x".into(), amplitudes: vec![[0.0, 0.0]; 8], metadata: Map::new() };
        r.amplitudes[0] = [2.0, 0.0];
        let (s, w) = r.to_state().unwrap();
        assert!(w.is_some());
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        r.amplitudes[0] = [0.0, 0.0];
        assert!(r.to_state().is_err());
    }
}
