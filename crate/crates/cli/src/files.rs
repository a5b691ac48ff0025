//! JSON containers for S-boxes and cipher specs.
//!
//! Tables and matrix rows are plain integers: bit `i` of an integer is
//! coordinate `i + 1`, brick 1 occupies the lowest `s` bits, and row `i` of
//! a matrix is the image of `e_{i+1}`.

use ptrap_core::f2lin::{BrickLayout, LinearMap, Word};
use ptrap_core::feistel::{CipherSpec, GeneratingFunction, KeyMode, RoundForm};
use ptrap_core::sboxprops::{ParallelSBox, SBox};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

/// A parse or validation failure with its location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError {
    pub location: String,
    pub message: String,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for InputError {}

fn at(location: impl Into<String>) -> impl FnOnce(ptrap_core::Error) -> InputError {
    let location = location.into();
    move |e| InputError {
        location,
        message: e.to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SBoxFile {
    pub width: u32,
    pub table: Vec<Word>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutFile {
    pub s: u32,
    pub b: u32,
}

/// One round: either `sboxes` with `lambda`, or a raw `table` for `ρ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sboxes: Option<Vec<Vec<Word>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<Word>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Word>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub layout: LayoutFile,
    #[serde(default = "default_key_mode")]
    pub key_mode: KeyMode,
    pub rounds: Vec<RoundFile>,
}

fn default_key_mode() -> KeyMode {
    KeyMode::After
}

impl SBoxFile {
    pub fn to_sbox(&self) -> Result<SBox, InputError> {
        SBox::new(self.width, self.table.clone()).map_err(at("table"))
    }
}

impl RoundFile {
    fn to_round(
        &self,
        layout: BrickLayout,
        round: usize,
    ) -> Result<GeneratingFunction, InputError> {
        let loc = |what: &str| format!("round {round}, {what}");
        match (&self.sboxes, &self.lambda, &self.table) {
            (Some(sboxes), Some(rows), None) => {
                let boxes = sboxes
                    .iter()
                    .enumerate()
                    .map(|(j, t)| {
                        SBox::new(layout.brick_width(), t.clone())
                            .map_err(at(loc(&format!("sbox {}", j + 1))))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let gamma = ParallelSBox::new(layout, boxes).map_err(at(loc("sboxes")))?;
                let lambda =
                    LinearMap::new(layout.width(), rows.clone()).map_err(at(loc("lambda")))?;
                if !lambda.is_invertible() {
                    return Err(at(loc("lambda"))(ptrap_core::Error::Singular));
                }
                GeneratingFunction::composed(gamma, lambda).map_err(at(format!("round {round}")))
            }
            (None, None, Some(table)) => {
                GeneratingFunction::raw(layout.width(), table.clone()).map_err(at(loc("table")))
            }
            _ => Err(InputError {
                location: format!("round {round}"),
                message: "expected either `sboxes` and `lambda`, or `table`".into(),
            }),
        }
    }

    fn from_round(g: &GeneratingFunction) -> RoundFile {
        match g.form() {
            RoundForm::Composed { gamma, lambda } => RoundFile {
                sboxes: Some(gamma.boxes().iter().map(|b| b.table().to_vec()).collect()),
                lambda: Some(lambda.rows().to_vec()),
                table: None,
            },
            RoundForm::Raw { table, .. } => RoundFile {
                sboxes: None,
                lambda: None,
                table: Some(table.clone()),
            },
        }
    }
}

impl SpecFile {
    pub fn to_spec(&self) -> Result<CipherSpec, InputError> {
        let layout = BrickLayout::new(self.layout.s, self.layout.b).map_err(at("layout"))?;
        let rounds = self
            .rounds
            .iter()
            .enumerate()
            .map(|(i, r)| r.to_round(layout, i + 1))
            .collect::<Result<Vec<_>, _>>()?;
        CipherSpec::new(layout, rounds, self.key_mode).map_err(at("rounds"))
    }

    pub fn from_spec(spec: &CipherSpec) -> SpecFile {
        let layout = spec.layout();
        SpecFile {
            layout: LayoutFile {
                s: layout.brick_width(),
                b: layout.bricks(),
            },
            key_mode: spec.key_mode(),
            rounds: spec.rounds().iter().map(RoundFile::from_round).collect(),
        }
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, InputError> {
    let location = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| InputError {
        location: location.clone(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| InputError {
        location,
        message: e.to_string(),
    })
}

pub fn read_sbox_file(path: &Path) -> Result<SBox, InputError> {
    let file: SBoxFile = read_json(path)?;
    file.to_sbox().map_err(|e| InputError {
        location: format!("{}: {}", path.display(), e.location),
        ..e
    })
}

pub fn read_spec_file(path: &Path) -> Result<CipherSpec, InputError> {
    let file: SpecFile = read_json(path)?;
    file.to_spec().map_err(|e| InputError {
        location: format!("{}: {}", path.display(), e.location),
        ..e
    })
}
