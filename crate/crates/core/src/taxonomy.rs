//! Stage vocabulary, layers and canonical ordering.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Layer {
    Preprocessing,
    ModelBuilding,
    Postprocessing,
    Auxiliary,
}

/// Pipeline stage. Variant order is the display order used by reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Lib,
    Acq,
    Prp,
    Eda,
    Str,
    Ftr,
    Mdl,
    Trn,
    Evl,
    Prd,
    Int,
    Cmn,
    Dpl,
    Vis,
    Gen,
}

impl Stage {
    pub const COUNT: usize = 15;

    pub const ALL: [Stage; Stage::COUNT] = [
        Stage::Lib,
        Stage::Acq,
        Stage::Prp,
        Stage::Eda,
        Stage::Str,
        Stage::Ftr,
        Stage::Mdl,
        Stage::Trn,
        Stage::Evl,
        Stage::Prd,
        Stage::Int,
        Stage::Cmn,
        Stage::Dpl,
        Stage::Vis,
        Stage::Gen,
    ];

    /// The eleven-stage chain, in ordinal order.
    pub const CANONICAL: [Stage; 11] = [
        Stage::Acq,
        Stage::Prp,
        Stage::Str,
        Stage::Ftr,
        Stage::Mdl,
        Stage::Trn,
        Stage::Evl,
        Stage::Prd,
        Stage::Int,
        Stage::Cmn,
        Stage::Dpl,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Stage::Lib => "LIB",
            Stage::Acq => "ACQ",
            Stage::Prp => "PRP",
            Stage::Eda => "EDA",
            Stage::Str => "STR",
            Stage::Ftr => "FTR",
            Stage::Mdl => "MDL",
            Stage::Trn => "TRN",
            Stage::Evl => "EVL",
            Stage::Prd => "PRD",
            Stage::Int => "INT",
            Stage::Cmn => "CMN",
            Stage::Dpl => "DPL",
            Stage::Vis => "VIS",
            Stage::Gen => "GEN",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Stage::Lib => "Library Loading",
            Stage::Acq => "Data Acquisition",
            Stage::Prp => "Data Preparation",
            Stage::Eda => "Exploratory Data Analysis",
            Stage::Str => "Storage",
            Stage::Ftr => "Feature Engineering",
            Stage::Mdl => "Modeling",
            Stage::Trn => "Training",
            Stage::Evl => "Evaluation",
            Stage::Prd => "Prediction",
            Stage::Int => "Interpretation",
            Stage::Cmn => "Communication",
            Stage::Dpl => "Deployment",
            Stage::Vis => "Visualization",
            Stage::Gen => "Generic",
        }
    }

    pub fn layer(self) -> Layer {
        match self {
            Stage::Acq | Stage::Prp | Stage::Str => Layer::Preprocessing,
            Stage::Ftr | Stage::Mdl | Stage::Trn | Stage::Evl | Stage::Prd => Layer::ModelBuilding,
            Stage::Int | Stage::Cmn | Stage::Dpl => Layer::Postprocessing,
            Stage::Lib | Stage::Eda | Stage::Vis | Stage::Gen => Layer::Auxiliary,
        }
    }

    /// Canonical position; 0 means unordered.
    pub fn ordinal(self) -> u32 {
        match self {
            Stage::Lib => 5,
            Stage::Acq => 10,
            Stage::Prp => 20,
            Stage::Eda => 25,
            Stage::Str => 30,
            Stage::Ftr => 40,
            Stage::Mdl => 50,
            Stage::Trn => 60,
            Stage::Evl => 70,
            Stage::Prd => 80,
            Stage::Int => 90,
            Stage::Cmn => 100,
            Stage::Dpl => 110,
            Stage::Vis | Stage::Gen => 0,
        }
    }

    pub fn is_ordered(self) -> bool {
        self.ordinal() != 0
    }

    /// Dense index in `0..COUNT`, matching [`Stage::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Stage> {
        Stage::ALL.get(i).copied()
    }

    /// Case-insensitive lookup by code.
    pub fn from_code(code: &str) -> Result<Stage> {
        let trimmed = code.trim();
        Stage::ALL
            .into_iter()
            .find(|s| s.code().eq_ignore_ascii_case(trimmed))
            .ok_or_else(|| Error::UnknownStage(code.to_string()))
    }
}

/// Alias kept for callers that prefer the free-function form.
pub fn stage_from_code(code: &str) -> Result<Stage> {
    Stage::from_code(code)
}

/// Whether `from → to` points backwards in the canonical order.
pub fn is_feedback_edge(from: Stage, to: Stage) -> Result<bool> {
    for s in [from, to] {
        if !s.is_ordered() {
            return Err(Error::UnorderedStage(s.code()));
        }
    }
    Ok(to.ordinal() < from.ordinal())
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Stage> {
        Stage::from_code(s)
    }
}

impl Serialize for Stage {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for Stage {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Stage, D::Error> {
        let s = String::deserialize(deserializer)?;
        Stage::from_code(&s).map_err(serde::de::Error::custom)
    }
}
