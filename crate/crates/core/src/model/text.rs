//! The `model/v1` interchange format.
//!
//! A model is stored as a single JSON document with a `schema` discriminator.
//! Printing is canonical (entities sorted by id, tuples in total order), so
//! parse-then-print is the identity on canonical documents.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Entity, FiniteModel, ModelError, Tuple};

pub const MODEL_SCHEMA: &str = "model/v1";

#[derive(Debug, Error)]
pub enum ModelTextError {
    #[error("model text is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema `{0}` (expected `model/v1`)")]
    BadSchema(String),
    #[error(transparent)]
    Invalid(#[from] ModelError),
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    schema: String,
    horizon: u32,
    binding_name: String,
    entities: Vec<Entity>,
    tuples: Vec<Tuple>,
}

/// Serializes a model in canonical form.
pub fn print_model(model: &FiniteModel) -> String {
    let doc = ModelDoc {
        schema: MODEL_SCHEMA.to_string(),
        horizon: model.horizon(),
        binding_name: model.binding_name().to_string(),
        entities: model.entities().cloned().collect(),
        tuples: model.tuples().cloned().collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("model serialization cannot fail");
    out.push('\n');
    out
}

/// Parses and validates a `model/v1` document.
pub fn parse_model(text: &str) -> Result<FiniteModel, ModelTextError> {
    let doc: ModelDoc = serde_json::from_str(text)?;
    if doc.schema != MODEL_SCHEMA {
        return Err(ModelTextError::BadSchema(doc.schema));
    }
    Ok(FiniteModel::new(
        doc.entities,
        doc.tuples,
        doc.horizon,
        doc.binding_name,
    )?)
}
