//! The `classify/v1` export: one record per file with mode, basis, and the
//! evidence trail, plus the fixed immutable-participation note.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{ParticipationClassification, IMMUTABLE_NOTE};

pub const CLASSIFY_SCHEMA: &str = "classify/v1";

#[derive(Debug, Error)]
pub enum ClassifyTextError {
    #[error("classification text is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema `{0}` (expected `classify/v1`)")]
    BadSchema(String),
}

#[derive(Serialize, Deserialize)]
struct ClassifyDoc {
    schema: String,
    immutable_note: String,
    classifications: Vec<ParticipationClassification>,
}

pub fn print_classifications(classifications: &[ParticipationClassification]) -> String {
    let doc = ClassifyDoc {
        schema: CLASSIFY_SCHEMA.to_string(),
        immutable_note: IMMUTABLE_NOTE.to_string(),
        classifications: classifications.to_vec(),
    };
    let mut out =
        serde_json::to_string_pretty(&doc).expect("classification serialization cannot fail");
    out.push('\n');
    out
}

pub fn parse_classifications(
    text: &str,
) -> Result<Vec<ParticipationClassification>, ClassifyTextError> {
    let doc: ClassifyDoc = serde_json::from_str(text)?;
    if doc.schema != CLASSIFY_SCHEMA {
        return Err(ClassifyTextError::BadSchema(doc.schema));
    }
    Ok(doc.classifications)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{Basis, Evidence, Mode};

    #[test]
    fn classification_round_trip() {
        let cs = vec![ParticipationClassification {
            file: "main.py".into(),
            mode: Mode::Mandatory,
            basis: Basis::GraphOnly,
            evidence: vec![],
        },
        ParticipationClassification {
            file: "vendor.py".into(),
            mode: Mode::Essential,
            basis: Basis::GraphOnly,
            evidence: vec![Evidence::PinnedVersion],
        }];
        let printed = print_classifications(&cs);
        assert!(printed.contains("classify/v1"));
        assert!(printed.contains("pinned-version"));
        assert!(printed.contains("immutable participation"));
        assert_eq!(parse_classifications(&printed).unwrap(), cs);
    }
}
