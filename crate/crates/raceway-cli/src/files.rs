//! On-disk JSON formats: user policy files and saved solutions.

use serde::{Deserialize, Serialize};

use raceway_core::{CandidateStructure, ControlPolicy, Mode, ReactorParams, Segment};

use crate::config::RunConfig;
use crate::CliError;

/// One policy segment as written by users: `mode` is one of
/// `closed`, `max`, `singular`, `const` (the latter takes `u`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySegmentFile {
    pub start: f64,
    pub end: f64,
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
}

pub fn read_policy(
    path: &std::path::Path,
    params: &ReactorParams,
) -> Result<ControlPolicy, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    let raw: Vec<PolicySegmentFile> =
        serde_json::from_str(&text).map_err(|e| CliError::schema(format!("policy: {e}")))?;
    let mut segments = Vec::with_capacity(raw.len());
    for (i, seg) in raw.iter().enumerate() {
        let mode = match seg.mode.as_str() {
            "closed" => Mode::Closed,
            "max" => Mode::Max,
            "singular" => Mode::Singular,
            "const" => Mode::Const(seg.u.ok_or_else(|| {
                CliError::schema(format!("policy[{i}]: const mode requires `u`"))
            })?),
            other => {
                return Err(CliError::schema(format!(
                    "policy[{i}].mode: unknown mode `{other}`"
                )))
            }
        };
        segments.push(Segment {
            start: seg.start,
            end: seg.end,
            mode,
        });
    }
    ControlPolicy::new(segments, params).map_err(|e| CliError::schema(format!("policy: {e}")))
}

/// Control structure in a saved solution.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum StructureFile {
    BangBang { t_open: f64, t_close: f64 },
    BangSingularBang { t_exit: f64, t_close: f64 },
    ConstantMax,
}

impl From<CandidateStructure> for StructureFile {
    fn from(s: CandidateStructure) -> Self {
        match s {
            CandidateStructure::BangBang { t_open, t_close } => {
                StructureFile::BangBang { t_open, t_close }
            }
            CandidateStructure::BangSingularBang { t_exit, t_close } => {
                StructureFile::BangSingularBang { t_exit, t_close }
            }
            CandidateStructure::ConstantMax => StructureFile::ConstantMax,
        }
    }
}

impl From<StructureFile> for CandidateStructure {
    fn from(s: StructureFile) -> Self {
        match s {
            StructureFile::BangBang { t_open, t_close } => {
                CandidateStructure::BangBang { t_open, t_close }
            }
            StructureFile::BangSingularBang { t_exit, t_close } => {
                CandidateStructure::BangSingularBang { t_exit, t_close }
            }
            StructureFile::ConstantMax => CandidateStructure::ConstantMax,
        }
    }
}

/// Saved solution: the run configuration snapshot plus the structure, so
/// `verify` can rebuild the orbit from scratch.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub config: RunConfig,
    pub structure: StructureFile,
    pub x0: f64,
    pub total_yield: f64,
    pub total_flow: f64,
}

impl SolutionFile {
    pub fn read(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::schema(format!("solution: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes")
    }
}
