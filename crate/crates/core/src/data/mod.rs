//! Item catalog, interaction matrix and review corpus loaders, plus the
//! title auto-completion index used during preference elicitation.
//!
//! All three structures are immutable once loaded and can be shared
//! freely across threads.

mod autocomplete;
mod catalog;
mod interactions;
mod reviews;

pub use autocomplete::{AutocompleteIndex, AUTOCOMPLETE_MAX_RANK};
pub use catalog::{load_catalog, CatalogEntry, ItemCatalog};
pub use interactions::{load_interactions, Interaction, InteractionMatrix};
pub use reviews::{load_id_map, load_reviews, Review, ReviewCorpus};

use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("duplicate item id `{0}`")]
    DuplicateItem(String),
    #[error("duplicate review id `{0}`")]
    DuplicateReview(String),
    #[error("line {line}: unknown item id `{item_id}`")]
    UnknownItem { line: u64, item_id: String },
    #[error("line {line}: review `{review_id}` has empty text")]
    EmptyReview { line: u64, review_id: String },
}

impl DataError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        DataError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn parse(path: &Path, line: u64, message: impl Into<String>) -> Self {
        DataError::Parse {
            path: path.to_path_buf(),
            line,
            message: message.into(),
        }
    }
}

/// Tab for `.tsv` files, comma otherwise.
fn delimiter_for(path: &Path) -> u8 {
    match path.extension().and_then(|e| e.to_str()) {
        Some("tsv") | Some("tab") => b'\t',
        _ => b',',
    }
}

fn csv_reader(path: &Path) -> Result<csv::Reader<std::fs::File>, DataError> {
    let file = std::fs::File::open(path).map_err(|e| DataError::io(path, e))?;
    Ok(csv::ReaderBuilder::new()
        .delimiter(delimiter_for(path))
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::None)
        .from_reader(file))
}

fn csv_error(path: &Path, err: csv::Error) -> DataError {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    DataError::parse(path, line, err.to_string())
}
