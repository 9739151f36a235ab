//! JSON interchange for state sets.
//!
//! A file carries either `bases` (a list of bases, each a list of states) or
//! a flat `states` list with an optional `grouping`. Each state is a list of
//! `[re, im]` pairs.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::scalar::Real;
use crate::states::{PureState, StateLabel, StateSet};

/// Input states may deviate from unit norm by at most this before renormalization.
pub const INPUT_NORM_TOL: f64 = 1e-6;

type Amplitudes = Vec<[f64; 2]>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSetFile {
    pub q: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bases: Option<Vec<Vec<Amplitudes>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<Amplitudes>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grouping: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<StateLabel>>,
}

impl StateSetFile {
    pub fn from_set<T: Real>(set: &StateSet<T>) -> Self {
        let pairs: Vec<Amplitudes> = set.states.iter().map(|s| s.to_pairs()).collect();
        let (bases, states) = match &set.grouping {
            Some(g) => {
                let mut it = pairs.into_iter();
                (
                    Some(g.iter().map(|&n| it.by_ref().take(n).collect()).collect()),
                    None,
                )
            }
            None => (None, Some(pairs)),
        };
        Self {
            q: set.q,
            field: set.field.clone(),
            provenance: Some(set.provenance.clone()),
            bases,
            states,
            grouping: None,
            labels: Some(set.labels.clone()),
        }
    }

    pub fn into_set<T: Real>(self) -> Result<StateSet<T>> {
        let (raw, grouping) = match (self.bases, self.states) {
            (Some(bases), None) => {
                if self.grouping.is_some() {
                    return Err(Error::Malformed(
                        "\"grouping\" only applies to a flat \"states\" list".into(),
                    ));
                }
                let g = bases.iter().map(|b| b.len()).collect();
                (bases.into_iter().flatten().collect::<Vec<_>>(), Some(g))
            }
            (None, Some(states)) => (states, self.grouping),
            (Some(_), Some(_)) => {
                return Err(Error::Malformed(
                    "both \"bases\" and \"states\" present".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Malformed(
                    "neither \"bases\" nor \"states\" present".into(),
                ))
            }
        };
        let mut states = Vec::with_capacity(raw.len());
        for (k, amps) in raw.iter().enumerate() {
            if amps.len() != self.q {
                return Err(Error::Malformed(format!(
                    "state {k} has {} amplitudes, expected {}",
                    amps.len(),
                    self.q
                )));
            }
            if amps.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::Malformed(format!(
                    "state {k} has a non-finite amplitude"
                )));
            }
            let norm = amps
                .iter()
                .map(|[re, im]| re * re + im * im)
                .sum::<f64>()
                .sqrt();
            if (norm - 1.0).abs() > INPUT_NORM_TOL {
                return Err(Error::Malformed(format!("state {k} has norm {norm}")));
            }
            states.push(PureState::from_pairs(amps)?);
        }
        let labels = match self.labels {
            Some(l) if l.len() == states.len() => l,
            Some(l) => {
                return Err(Error::Malformed(format!(
                    "{} labels for {} states",
                    l.len(),
                    states.len()
                )))
            }
            None => (0..states.len()).map(StateLabel::Index).collect(),
        };
        let set = StateSet {
            q: self.q,
            field: self.field,
            states,
            labels,
            grouping,
            provenance: self.provenance.unwrap_or_default(),
        };
        if set.grouping.is_some() {
            set.bases()?;
        }
        Ok(set)
    }
}

pub fn state_set_to_json<T: Real>(set: &StateSet<T>) -> String {
    serde_json::to_string_pretty(&StateSetFile::from_set(set)).expect("state sets serialize")
}

pub fn state_set_from_json<T: Real>(text: &str) -> Result<StateSet<T>> {
    let file: StateSetFile = serde_json::from_str(text)?;
    file.into_set()
}

pub fn read_state_set<T: Real>(path: impl AsRef<Path>) -> Result<StateSet<T>> {
    state_set_from_json(&fs::read_to_string(path)?)
}

pub fn write_state_set<T: Real>(set: &StateSet<T>, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, state_set_to_json(set) + "\n")?;
    Ok(())
}
