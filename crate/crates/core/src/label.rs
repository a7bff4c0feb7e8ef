use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Class of a protein: DNA-binding (positive) or not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Label {
    Binding,
    NonBinding,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Binding => "binding",
            Label::NonBinding => "non-binding",
        }
    }

    /// +1 for binding, -1 for non-binding.
    pub fn sign(self) -> f64 {
        match self {
            Label::Binding => 1.0,
            Label::NonBinding => -1.0,
        }
    }

    /// 1 for binding, 0 for non-binding.
    pub fn target(self) -> f64 {
        match self {
            Label::Binding => 1.0,
            Label::NonBinding => 0.0,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown label {0:?} (expected `binding` or `non-binding`)")]
pub struct UnknownLabel(pub String);

impl FromStr for Label {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "binding" => Ok(Label::Binding),
            "non-binding" => Ok(Label::NonBinding),
            other => Err(UnknownLabel(other.to_string())),
        }
    }
}
